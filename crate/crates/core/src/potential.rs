//! Riesz s-potentials: the discrete field of a configuration and the radial
//! potential of the uniform measure `mu` on `S^d`.
//!
//! For `|x| = R != 1`
//!
//! ```text
//! U_s^mu(x) = (R+1)^{-s} 2F1(s/2, d/2; d; 4R/(R+1)^2)
//! ```
//!
//! and on the sphere itself the potential equals `gamma_{d,s}` when
//! `0 < s < d`. The one-dimensional zonal integral and a Monte Carlo mean
//! are kept as independent checks of the closed form.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::energy::{gamma_const, GammaForm, RieszParams};
use crate::error::{Error, Result};
use crate::geometry::{dist2, push_uniform_point, Configuration, Point, COINCIDENCE_TOL};
use crate::quadrature::GaussLegendre;
use crate::specfun::{gamma, hyp2f1, Hyp2F1Params};
use crate::sum::Neumaier;

/// Closest approach to the unit sphere for the zonal quadrature.
pub const QUADRATURE_BOUNDARY_WINDOW: f64 = 1e-3;
const QUADRATURE_START_NODES: usize = 256;
const QUADRATURE_MAX_NODES: usize = 16_384;
const QUADRATURE_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialQuery {
    pub d: usize,
    pub s: f64,
    /// `R = |x|`
    pub radius: f64,
}

impl RadialQuery {
    pub fn new(d: usize, s: f64, radius: f64) -> Result<Self> {
        let q = Self { d, s, radius };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::Domain("sphere dimension d must be >= 1".into()));
        }
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::Domain(format!(
                "potential requires s > 0, got {}",
                self.s
            )));
        }
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(Error::Domain(format!(
                "radius must be finite and >= 0, got {}",
                self.radius
            )));
        }
        if self.radius == 1.0 && self.s >= self.d as f64 {
            return Err(Error::Domain(format!(
                "potential on the sphere diverges for s >= d, got d = {}, s = {}",
                self.d, self.s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMethod {
    ClosedForm,
    ElementaryD2,
    FunkHeckeQuadrature,
    MonteCarlo,
    BoundaryGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialValue {
    pub value: f64,
    pub method: PotentialMethod,
    pub abs_error_estimate: f64,
}

/// `N^{-1} sum_j |x - x_j|^{-s}` (or the logarithmic kernel for `s = 0`).
pub fn discrete_potential(c: &Configuration, p: &RieszParams, x: &Point) -> Result<f64> {
    if x.dim() != c.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: c.ambient_dim(),
            found: x.dim(),
        });
    }
    let tol2 = COINCIDENCE_TOL * COINCIDENCE_TOL;
    let mut acc = Neumaier::default();
    for (j, xj) in c.points().enumerate() {
        let r2 = dist2(x.coords(), xj);
        if r2 < tol2 {
            return Err(Error::Singularity { node: j });
        }
        acc.add(p.value(r2));
    }
    Ok(acc.value() / c.len() as f64)
}

/// Hypergeometric closed form, valid for every `R >= 0` except `R = 1`.
pub fn uniform_potential_closed(q: RadialQuery) -> Result<PotentialValue> {
    q.validate()?;
    if q.radius == 1.0 {
        return Err(Error::Domain(
            "closed form is singular at R = 1; use the boundary value gamma_{d,s}".into(),
        ));
    }
    let r = q.radius;
    let z = 4.0 * r / ((r + 1.0) * (r + 1.0));
    // 4R/(R+1)^2 rounds to 1 for R within ~1e-8 of 1
    let z = z.min(1.0 - f64::EPSILON);
    let df = q.d as f64;
    let f = hyp2f1(Hyp2F1Params::new(q.s / 2.0, df / 2.0, df)?, z)?;
    let pre = (r + 1.0).powf(-q.s);
    Ok(PotentialValue {
        value: pre * f.value,
        method: PotentialMethod::ClosedForm,
        abs_error_estimate: pre * f.abs_error_estimate,
    })
}

/// Value on the sphere, `gamma_{d,s}`, for `0 < s < d`.
pub fn uniform_potential_boundary(d: usize, s: f64) -> Result<PotentialValue> {
    let value = gamma_const(d, s, GammaForm::Direct)?;
    Ok(PotentialValue {
        value,
        method: PotentialMethod::BoundaryGamma,
        abs_error_estimate: 16.0 * f64::EPSILON * value,
    })
}

/// Elementary `d = 2` form `((1+R)^{2-s} - |R-1|^{2-s}) / (2R (2-s))`.
pub fn uniform_potential_elementary_d2(s: f64, radius: f64) -> Result<PotentialValue> {
    if !(s > 0.0) || s == 2.0 || !s.is_finite() {
        return Err(Error::Domain(format!(
            "elementary form needs s > 0 and s != 2, got {s}"
        )));
    }
    if !(radius > 0.0) || radius == 1.0 || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "elementary form needs R > 0 and R != 1, got {radius}"
        )));
    }
    let e = 2.0 - s;
    let value = ((1.0 + radius).powf(e) - (radius - 1.0).abs().powf(e)) / (2.0 * radius * e);
    Ok(PotentialValue {
        value,
        method: PotentialMethod::ElementaryD2,
        abs_error_estimate: 16.0 * f64::EPSILON * value.abs(),
    })
}

/// Zonal reduction of the sphere integral,
/// `(nu_{d-1}/nu_d) int_0^pi (R^2 + 1 - 2R cos t)^{-s/2} sin^{d-1} t dt`,
/// by Gauss-Legendre with node doubling.
pub fn uniform_potential_quadrature(q: RadialQuery) -> Result<PotentialValue> {
    q.validate()?;
    let r = q.radius;
    if (r - 1.0).abs() < QUADRATURE_BOUNDARY_WINDOW {
        return Err(Error::NearBoundary {
            radius: r,
            window: QUADRATURE_BOUNDARY_WINDOW,
        });
    }
    let df = q.d as f64;
    // nu_{d-1} / nu_d
    let ratio = gamma((df + 1.0) / 2.0) / (PI.sqrt() * gamma(df / 2.0));
    let integrand = |t: f64| {
        let base = r * r + 1.0 - 2.0 * r * t.cos();
        base.powf(-0.5 * q.s) * t.sin().powi(q.d as i32 - 1)
    };
    let mut nodes = QUADRATURE_START_NODES;
    let mut prev = ratio * GaussLegendre::cached(nodes).integrate(integrand, 0.0, PI);
    loop {
        nodes *= 2;
        let next = ratio * GaussLegendre::cached(nodes).integrate(integrand, 0.0, PI);
        let change = (next - prev).abs();
        if change <= QUADRATURE_REL_TOL * next.abs() || nodes >= QUADRATURE_MAX_NODES {
            return Ok(PotentialValue {
                value: next,
                method: PotentialMethod::FunkHeckeQuadrature,
                abs_error_estimate: change.max(4.0 * f64::EPSILON * next.abs()),
            });
        }
        prev = next;
    }
}

/// Sample mean of `|x - Y|^{-s}` for `Y` uniform on `S^d` and `|x| = R`.
/// The error estimate is one standard error.
pub fn uniform_potential_montecarlo(
    q: RadialQuery,
    samples: usize,
    seed: u64,
) -> Result<PotentialValue> {
    q.validate()?;
    if samples < 1000 {
        return Err(Error::Domain(format!(
            "Monte Carlo needs at least 1000 samples, got {samples}"
        )));
    }
    if q.radius == 0.0 {
        return Ok(PotentialValue {
            value: 1.0,
            method: PotentialMethod::MonteCarlo,
            abs_error_estimate: 0.0,
        });
    }
    let amb = q.d + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Vec::with_capacity(amb);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    // x = R e_{d+1}
    for k in 0..samples {
        y.clear();
        push_uniform_point(&mut rng, amb, &mut y);
        let last = y[amb - 1];
        let r2 = q.radius * q.radius + 1.0 - 2.0 * q.radius * last;
        let v = r2.powf(-0.5 * q.s);
        // Welford
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok(PotentialValue {
        value: mean,
        method: PotentialMethod::MonteCarlo,
        abs_error_estimate: (var / samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: usize, s: f64, r: f64) -> RadialQuery {
        RadialQuery::new(d, s, r).unwrap()
    }

    #[test]
    fn discrete_potential_examples() {
        let c = Configuration::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap();
        let p = RieszParams::new(2, 1.0).unwrap();
        let u = discrete_potential(&c, &p, &Point(vec![0.0, 0.0, 2.0])).unwrap();
        assert!((u - 2.0 / 3.0).abs() < 1e-15);
        // origin is at distance 1 from every node
        let u = discrete_potential(&c, &p, &Point(vec![0.0, 0.0, 0.0])).unwrap();
        assert_eq!(u, 1.0);

        let sq = crate::geometry::roots_of_unity(4).unwrap();
        let p1 = RieszParams::new(1, 1.0).unwrap();
        let u = discrete_potential(&sq, &p1, &Point(vec![1.5, 0.0])).unwrap();
        assert!((u - 0.877_350_098_112_614_6).abs() < 1e-14);

        assert!(matches!(
            discrete_potential(&c, &p, &Point(vec![0.0, 0.0, 1.0])),
            Err(Error::Singularity { node: 0 })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let v = uniform_potential_closed(q(2, 1.0, 2.0)).unwrap();
        assert_eq!(v.method, PotentialMethod::ClosedForm);
        assert!((v.value - 0.5).abs() < 1e-13);
        assert!((uniform_potential_closed(q(2, 1.0, 0.5)).unwrap().value - 1.0).abs() < 1e-13);
        for (d, s) in [(1, 0.5), (3, 2.5), (5, 0.1)] {
            assert_eq!(uniform_potential_closed(q(d, s, 0.0)).unwrap().value, 1.0);
        }
        assert!(uniform_potential_closed(q(2, 1.0, 1.0)).is_err());
    }

    #[test]
    fn boundary_examples() {
        let v = uniform_potential_boundary(2, 1.0).unwrap();
        assert_eq!(v.method, PotentialMethod::BoundaryGamma);
        assert!((v.value - 1.0).abs() < 1e-14);
        let g = gamma_const(3, 2.0, GammaForm::Direct).unwrap();
        assert_eq!(uniform_potential_boundary(3, 2.0).unwrap().value, g);
        assert!(uniform_potential_boundary(2, 2.5).is_err());
        for (d, s) in [(2, 1.0), (3, 2.0)] {
            let g = gamma_const(d, s, GammaForm::Direct).unwrap();
            let lo = uniform_potential_closed(q(d, s, 1.0 - 1e-6)).unwrap().value;
            let hi = uniform_potential_closed(q(d, s, 1.0 + 1e-6)).unwrap().value;
            assert!(
                (lo - g).abs() < 1e-4 && (hi - g).abs() < 1e-4,
                "{lo} {hi} {g}"
            );
        }
    }

    #[test]
    fn elementary_examples() {
        assert!((uniform_potential_elementary_d2(1.0, 2.0).unwrap().value - 0.5).abs() < 1e-15);
        assert!(
            (uniform_potential_elementary_d2(1.0, 3.0).unwrap().value - 1.0 / 3.0).abs() < 1e-15
        );
        let v = uniform_potential_elementary_d2(0.5, 2.0).unwrap().value;
        assert!((v - 0.699_358_737_117_772).abs() < 1e-14);
        assert!(uniform_potential_elementary_d2(2.0, 2.0).is_err());
        assert!(uniform_potential_elementary_d2(1.0, 1.0).is_err());
        assert!(uniform_potential_elementary_d2(1.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let v = uniform_potential_quadrature(q(2, 1.0, 2.0)).unwrap();
        assert_eq!(v.method, PotentialMethod::FunkHeckeQuadrature);
        assert!((v.value - 0.5).abs() < 1e-10);
        let a = uniform_potential_quadrature(q(3, 2.5, 1.5)).unwrap().value;
        assert!((a - 0.395_419_449_068_532).abs() < 1e-8 * a);
        for d in 1..=4 {
            let v = uniform_potential_quadrature(q(d, 0.7, 0.0)).unwrap().value;
            assert!((v - 1.0).abs() < 1e-12, "d={d} {v}");
        }
        assert!(matches!(
            uniform_potential_quadrature(q(2, 1.0, 1.0005)),
            Err(Error::NearBoundary { .. })
        ));
    }

    #[test]
    fn montecarlo_examples() {
        let v = uniform_potential_montecarlo(q(2, 1.0, 0.0), 1000, 1).unwrap();
        assert_eq!((v.value, v.abs_error_estimate), (1.0, 0.0));
        let v = uniform_potential_montecarlo(q(2, 1.0, 2.0), 200_000, 5).unwrap();
        assert!((v.value - 0.5).abs() < 3.0 * v.abs_error_estimate);
        let w = uniform_potential_montecarlo(q(2, 1.0, 2.0), 200_000, 5).unwrap();
        assert_eq!(v, w);
        assert!(uniform_potential_montecarlo(q(2, 1.0, 2.0), 10, 5).is_err());
    }
}
