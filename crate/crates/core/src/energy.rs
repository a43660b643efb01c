//! Riesz energy, its gradient on the product of spheres, and the continuum
//! energy constant `gamma_{d,s}` of the uniform measure.
//!
//! Totals follow the ordered-pair convention: every unordered pair
//! contributes twice.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Point, COINCIDENCE_TOL};
use crate::specfun::gamma;
use crate::sum::{neumaier_sum, Neumaier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `|x - y|^{-s}`, `s > 0`
    Power,
    /// `log(1 / |x - y|)`, `s = 0`
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszParams {
    pub dim_d: usize,
    pub s: f64,
    pub kernel: Kernel,
}

impl RieszParams {
    pub fn new(dim_d: usize, s: f64) -> Result<Self> {
        if dim_d < 1 {
            return Err(Error::Domain("sphere dimension d must be >= 1".into()));
        }
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!(
                "Riesz parameter s must be >= 0, got {s}"
            )));
        }
        let kernel = if s == 0.0 {
            Kernel::Logarithmic
        } else {
            Kernel::Power
        };
        Ok(Self { dim_d, s, kernel })
    }

    /// Kernel value and radial derivative factor at squared distance `r2`:
    /// `grad_x k(x, y) = factor * (x - y)`.
    #[inline]
    pub(crate) fn eval(&self, r2: f64) -> (f64, f64) {
        match self.kernel {
            Kernel::Logarithmic => (-0.5 * r2.ln(), -1.0 / r2),
            Kernel::Power => {
                let k = if self.s == 1.0 {
                    1.0 / r2.sqrt()
                } else if self.s == 2.0 {
                    1.0 / r2
                } else {
                    r2.powf(-0.5 * self.s)
                };
                (k, -self.s * k / r2)
            }
        }
    }

    /// Kernel value only.
    #[inline]
    pub(crate) fn value(&self, r2: f64) -> f64 {
        self.eval(r2).0
    }

    fn check_dim(&self, c: &Configuration) -> Result<()> {
        if self.dim_d != c.dim_d() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_d,
                found: c.dim_d(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    /// Sum over ordered pairs `i != j`.
    pub total: f64,
    /// Row sums `sum_{j != i} k(x_i, x_j)`.
    pub per_point: Vec<f64>,
    /// Largest per-point norm of the tangent gradient.
    pub grad_tangent_norm: f64,
}

/// Energy report together with the flat tangent gradient.
pub(crate) struct Evaluation {
    pub report: EnergyReport,
    pub gradient: Vec<f64>,
}

pub(crate) fn evaluate(c: &Configuration, p: &RieszParams) -> Result<Evaluation> {
    p.check_dim(c)?;
    let n = c.len();
    let amb = c.ambient_dim();
    let tol2 = COINCIDENCE_TOL * COINCIDENCE_TOL;

    let rows: Vec<Result<(f64, Vec<f64>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = c.point(i);
            let mut e = Neumaier::default();
            let mut g = vec![Neumaier::default(); amb];
            let mut diff = vec![0.0; amb];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let xj = c.point(j);
                let mut r2 = 0.0;
                for k in 0..amb {
                    diff[k] = xi[k] - xj[k];
                    r2 += diff[k] * diff[k];
                }
                if r2 < tol2 {
                    return Err(Error::CoincidentPoints {
                        i: i.min(j),
                        j: i.max(j),
                        distance: r2.sqrt(),
                    });
                }
                let (kv, factor) = p.eval(r2);
                e.add(kv);
                for k in 0..amb {
                    g[k].add(factor * diff[k]);
                }
            }
            // ordered pairs: the row appears once as i and once as j
            let mut grad: Vec<f64> = g.iter().map(|a| 2.0 * a.value()).collect();
            let radial: f64 = grad.iter().zip(xi).map(|(a, b)| a * b).sum();
            for (gk, xk) in grad.iter_mut().zip(xi) {
                *gk -= radial * xk;
            }
            Ok((e.value(), grad))
        })
        .collect();

    let mut per_point = Vec::with_capacity(n);
    let mut gradient = Vec::with_capacity(n * amb);
    let mut sup = 0.0_f64;
    for row in rows {
        let (e, g) = row?;
        per_point.push(e);
        sup = sup.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());
        gradient.extend(g);
    }
    let total = neumaier_sum(per_point.iter().copied());
    Ok(Evaluation {
        report: EnergyReport {
            total,
            per_point,
            grad_tangent_norm: sup,
        },
        gradient,
    })
}

/// Riesz s-energy (power kernel) or logarithmic energy (`s = 0`).
pub fn riesz_energy(c: &Configuration, p: &RieszParams) -> Result<EnergyReport> {
    Ok(evaluate(c, p)?.report)
}

/// Tangent gradient of the ordered-pair energy at every point.
pub fn riesz_gradient(c: &Configuration, p: &RieszParams) -> Result<Vec<Point>> {
    let amb = c.ambient_dim();
    Ok(evaluate(c, p)?
        .gradient
        .chunks_exact(amb)
        .map(|g| Point(g.to_vec()))
        .collect())
}

/// Which closed form of `gamma_{d,s}` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaForm {
    /// `Gamma((d+1)/2) Gamma(d-s) / (Gamma((d-s+1)/2) Gamma(d-s/2))`
    Direct,
    /// `2^{-s} Gamma(d) Gamma((d-s)/2) / (Gamma(d/2) Gamma(d-s/2))`, the
    /// `R -> 1` limit of the hypergeometric potential.
    BoundaryLimit,
}

/// Continuum energy `gamma_{d,s} = int int |x-y|^{-s} dmu dmu`, `0 < s < d`.
pub fn gamma_const(d: usize, s: f64, form: GammaForm) -> Result<f64> {
    let df = d as f64;
    if d < 1 || !(s > 0.0 && s < df) {
        return Err(Error::Domain(format!(
            "gamma_{{d,s}} requires 0 < s < d, got d = {d}, s = {s}"
        )));
    }
    Ok(match form {
        GammaForm::Direct => {
            gamma((df + 1.0) / 2.0) * gamma(df - s)
                / (gamma((df - s + 1.0) / 2.0) * gamma(df - s / 2.0))
        }
        GammaForm::BoundaryLimit => {
            2f64.powf(-s) * gamma(df) * gamma((df - s) / 2.0)
                / (gamma(df / 2.0) * gamma(df - s / 2.0))
        }
    })
}

/// `gamma_{d,s} N (N-1)`: averaging over the uniform measure bounds the
/// minimal energy from above.
pub fn energy_upper_bound(d: usize, s: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n}")));
    }
    let nf = n as f64;
    Ok(gamma_const(d, s, GammaForm::Direct)? * nf * (nf - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::roots_of_unity;

    fn antipodal() -> Configuration {
        Configuration::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn antipodal_energies() {
        let c = antipodal();
        let r = riesz_energy(&c, &RieszParams::new(2, 1.0).unwrap()).unwrap();
        assert_eq!(r.total, 1.0);
        assert_eq!(r.per_point, vec![0.5, 0.5]);
        let r = riesz_energy(&c, &RieszParams::new(2, 0.0).unwrap()).unwrap();
        assert!((r.total - 2.0 * 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn roots_of_unity_energy() {
        let c = roots_of_unity(4).unwrap();
        let r = riesz_energy(&c, &RieszParams::new(1, 1.0).unwrap()).unwrap();
        assert!((r.total - 7.656_854_249_492_381).abs() < 1e-13);
        assert!(r.grad_tangent_norm < 1e-12);
    }

    #[test]
    fn antipodal_gradient_vanishes() {
        for s in [0.0, 0.5, 1.0, 1.7] {
            let g = riesz_gradient(&antipodal(), &RieszParams::new(2, s).unwrap()).unwrap();
            for v in g {
                assert!(v.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gradient_is_tangent() {
        let c = crate::geometry::random_uniform(2, 10, 3).unwrap();
        let g = riesz_gradient(&c, &RieszParams::new(2, 1.3).unwrap()).unwrap();
        for (x, v) in c.points().zip(&g) {
            let dot: f64 = x.iter().zip(v.coords()).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = antipodal();
        assert!(matches!(
            riesz_energy(&c, &RieszParams::new(3, 1.0).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coincident_points_error() {
        let c = Configuration::from_flat_unchecked(1, vec![1.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
        assert!(matches!(
            riesz_energy(&c, &RieszParams::new(1, 1.0).unwrap()),
            Err(Error::CoincidentPoints { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert_eq!(
            RieszParams::new(2, 0.0).unwrap().kernel,
            Kernel::Logarithmic
        );
        assert_eq!(RieszParams::new(2, 1.0).unwrap().kernel, Kernel::Power);
        assert!(RieszParams::new(2, -1.0).is_err());
        assert!(RieszParams::new(0, 1.0).is_err());
    }

    #[test]
    fn gamma_const_examples() {
        for form in [GammaForm::Direct, GammaForm::BoundaryLimit] {
            assert!((gamma_const(2, 1.0, form).unwrap() - 1.0).abs() < 1e-14);
            // sqrt(pi) / Gamma(3/4)^2, 20-digit reference
            assert!((gamma_const(1, 0.5, form).unwrap() - 1.180_340_599_016_096_2).abs() < 1e-13);
        }
        let a = gamma_const(3, 2.0, GammaForm::Direct).unwrap();
        let b = gamma_const(3, 2.0, GammaForm::BoundaryLimit).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        assert!(gamma_const(2, 0.0, GammaForm::Direct).is_err());
        assert!(gamma_const(2, 2.0, GammaForm::Direct).is_err());
    }

    #[test]
    fn upper_bound_examples() {
        assert!((energy_upper_bound(2, 1.0, 2).unwrap() - 2.0).abs() < 1e-14);
        assert!((energy_upper_bound(2, 1.0, 4).unwrap() - 12.0).abs() < 1e-13);
        assert!(
            (energy_upper_bound(1, 0.5, 3).unwrap() - 6.0 * 1.180_340_599_016_096_2).abs() < 1e-12
        );
        assert!(12.0 / (8.0f64 / 3.0).sqrt() <= energy_upper_bound(2, 1.0, 4).unwrap());
    }
}
