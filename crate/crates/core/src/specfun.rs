//! Gamma, Pochhammer and the Gauss hypergeometric function on `[0, 1]`.
//!
//! `2F1(a, b; c; z)` is evaluated by its power series for `z <= 0.75`, by
//! Euler's integral representation on `(0.75, 1)` when `c > b > 0` (or
//! `c > a > 0` after swapping the symmetric pair), and by Gauss's summation
//! theorem at `z = 1`. Arguments outside `[0, 1]` are rejected.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, Tolerance};
use crate::sum::Neumaier;

/// Lanczos coefficients for `g = 10.900511`, n = 11 (Pugh 2004).
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
const LANCZOS_R: f64 = 10.900_511;
/// `2 * sqrt(e / pi)`
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;

/// Gamma function for real arguments off the non-positive integers.
/// Returns `inf` at poles.
///
/// Arguments in `[0.5, 50]` are shifted into `[1, 2)` by the recurrence
/// `Gamma(x+1) = x Gamma(x)`; the Lanczos power term loses about
/// `x * eps` of relative accuracy, the recurrence only `eps` per step.
pub(crate) fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x < 1.0 {
        return lanczos(x + 1.0) / x;
    }
    if x == x.floor() && x <= 30.0 {
        // exact factorial
        return (2..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    if x <= 50.0 {
        let mut y = x;
        let mut product = 1.0;
        while y >= 2.0 {
            y -= 1.0;
            product *= y;
        }
        return product * lanczos(y);
    }
    lanczos(x)
}

fn lanczos(x: f64) -> f64 {
    let sum = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |acc, (k, dk)| {
            acc + dk / (x + k as f64 - 1.0)
        });
    let base = (x - 0.5 + LANCZOS_R) / E;
    // split the power to keep it finite up to x ~ 171
    let half = base.powf(0.5 * (x - 0.5));
    sum * TWO_SQRT_E_OVER_PI * half * half
}

/// `1 / Gamma(x)`, zero at the poles.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(gamma(x))
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Parameters `(a, b; c)` of `2F1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = Self { a, b, c };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(Error::Domain(format!("non-finite 2F1 parameters {self:?}")));
        }
        if self.c <= 0.0 && self.c == self.c.floor() {
            return Err(Error::Domain(format!(
                "c = {} is a non-positive integer",
                self.c
            )));
        }
        Ok(())
    }

    /// `c - a - b`
    pub fn excess(&self) -> f64 {
        self.c - self.a - self.b
    }

    fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            c: self.c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Series,
    EulerIntegral,
    GaussSummation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: EvalMethod,
}

/// Above this `z` the series is replaced by the Euler integral.
pub const SERIES_SWITCH: f64 = 0.75;
const MAX_SERIES_TERMS: usize = 10_000_000;

/// Gauss hypergeometric function `2F1(a, b; c; z)` for `z` in `[0, 1]`.
pub fn hyp2f1(p: Hyp2F1Params, z: f64) -> Result<EvalResult> {
    p.validate()?;
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "2F1 argument z = {z} outside [0, 1]"
        )));
    }
    if z == 1.0 {
        return gauss_summation(p);
    }
    if z <= SERIES_SWITCH {
        return Ok(series(p, z));
    }
    if p.c > p.b && p.b > 0.0 {
        euler_integral(p, z, 1.0 - z)
    } else if p.c > p.a && p.a > 0.0 {
        euler_integral(p.swapped(), z, 1.0 - z)
    } else {
        Ok(series(p, z))
    }
}

/// `2F1(a, b; c; 1 - w)` for small `w > 0`, keeping `w` exact where `1 - w`
/// would round to 1. Needs `c > b > 0` or `c > a > 0`.
pub(crate) fn hyp2f1_one_minus(p: Hyp2F1Params, w: f64) -> Result<EvalResult> {
    p.validate()?;
    if !(w > 0.0 && w <= 1.0 - SERIES_SWITCH) {
        return hyp2f1(p, 1.0 - w);
    }
    let excess = p.excess();
    if w < CONNECTION_SWITCH && (excess - excess.round()).abs() > 1e-3 {
        return Ok(connection_one_minus(p, w));
    }
    let z = 1.0 - w;
    if p.c > p.b && p.b > 0.0 {
        euler_integral(p, z, w)
    } else if p.c > p.a && p.a > 0.0 {
        euler_integral(p.swapped(), z, w)
    } else {
        Err(Error::Precondition(format!(
            "near-one evaluation needs c > b > 0 or c > a > 0, got {p:?}"
        )))
    }
}

/// Below this `w = 1 - z` the near-one evaluation switches to the
/// connection formula; the Euler integrand peaks on a scale of `w`.
const CONNECTION_SWITCH: f64 = 1e-4;

/// `1 - z` connection formula for non-integer `e = c - a - b`:
/// `F = A1 F(a, b; 1-e; w) + A2 w^e F(c-a, c-b; 1+e; w)`.
fn connection_one_minus(p: Hyp2F1Params, w: f64) -> EvalResult {
    let Hyp2F1Params { a, b, c } = p;
    let e = p.excess();
    let a1 = gamma(c) * gamma(e) * rgamma(c - a) * rgamma(c - b);
    let a2 = gamma(c) * gamma(-e) * rgamma(a) * rgamma(b);
    let f1 = series(Hyp2F1Params { a, b, c: 1.0 - e }, w);
    let f2 = series(
        Hyp2F1Params {
            a: c - a,
            b: c - b,
            c: 1.0 + e,
        },
        w,
    );
    let t1 = a1 * f1.value;
    let t2 = a2 * w.powf(e) * f2.value;
    let value = t1 + t2;
    let abs_error_estimate = (a1 * f1.abs_error_estimate).abs()
        + (a2 * w.powf(e) * f2.abs_error_estimate).abs()
        + 64.0 * f64::EPSILON * (t1.abs() + t2.abs());
    EvalResult {
        value,
        abs_error_estimate,
        method: EvalMethod::EulerIntegral,
    }
}

/// `2F1` through Euler's integral
/// `Gamma(c)/(Gamma(b)Gamma(c-b)) * int_0^1 (1-zu)^{-a} u^{b-1} (1-u)^{c-b-1} du`.
pub fn hyp2f1_euler(p: Hyp2F1Params, z: f64) -> Result<EvalResult> {
    p.validate()?;
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "Euler integral requires z in [0, 1), got {z}"
        )));
    }
    euler_integral(p, z, 1.0 - z)
}

/// `d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z)`, restricted to `z` in `[0, 1)`.
pub fn hyp2f1_derivative(p: Hyp2F1Params, z: f64) -> Result<f64> {
    p.validate()?;
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "2F1 derivative requires z in [0, 1), got {z}"
        )));
    }
    let factor = p.a * p.b / p.c;
    if factor == 0.0 {
        return Ok(0.0);
    }
    let shifted = Hyp2F1Params::new(p.a + 1.0, p.b + 1.0, p.c + 1.0)?;
    Ok(factor * hyp2f1(shifted, z)?.value)
}

/// `lim_{z->1-} 2F1(a,b;c;z) / (1-z)^{c-a-b} = Gamma(c)Gamma(a+b-c)/(Gamma(a)Gamma(b))`
/// for `c - a - b < 0`.
pub fn near_one_ratio_limit(p: Hyp2F1Params) -> Result<f64> {
    p.validate()?;
    if p.excess() >= 0.0 {
        return Err(Error::Precondition(format!(
            "near-one limit needs c - a - b < 0, got {}",
            p.excess()
        )));
    }
    Ok(gamma(p.c) * gamma(-p.excess()) * rgamma(p.a) * rgamma(p.b))
}

fn gauss_summation(p: Hyp2F1Params) -> Result<EvalResult> {
    let excess = p.excess();
    if excess <= 0.0 {
        return Err(Error::Divergence(format!(
            "2F1 diverges at z = 1 when c - a - b = {excess} <= 0"
        )));
    }
    let value = gamma(p.c) * gamma(excess) * rgamma(p.c - p.a) * rgamma(p.c - p.b);
    Ok(EvalResult {
        value,
        abs_error_estimate: 64.0 * f64::EPSILON * value.abs(),
        method: EvalMethod::GaussSummation,
    })
}

fn series(p: Hyp2F1Params, z: f64) -> EvalResult {
    let Hyp2F1Params { a, b, c } = p;
    let mut acc = Neumaier::default();
    let mut magnitude = 0.0;
    let mut term = 1.0_f64;
    // past this index the term ratio is monotone in n
    let settle = (a.abs() + b.abs() + c.abs()).ceil() as usize + 2;
    let mut truncation = f64::INFINITY;
    for n in 0..MAX_SERIES_TERMS {
        acc.add(term);
        magnitude += term.abs();
        let nf = n as f64;
        let next = term * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        if next == 0.0 {
            truncation = 0.0;
            break;
        }
        if n >= settle {
            let m = nf + 1.0;
            let ratio_next = (a + m) * (b + m) / ((c + m) * (m + 1.0));
            let rho = z * ratio_next.abs().max(1.0);
            if rho < 1.0 {
                let tail = next.abs() / (1.0 - rho);
                if tail <= 1e-17 * acc.value().abs() {
                    truncation = tail;
                    break;
                }
            }
        }
        term = next;
    }
    if !truncation.is_finite() {
        // ran out of terms; report the last term as a lower bound of the tail
        truncation = term.abs() / (1.0 - z);
    }
    EvalResult {
        value: acc.value(),
        abs_error_estimate: truncation + 4.0 * f64::EPSILON * magnitude,
        method: EvalMethod::Series,
    }
}

fn euler_integral(p: Hyp2F1Params, z: f64, one_minus_z: f64) -> Result<EvalResult> {
    let Hyp2F1Params { a, b, c } = p;
    if !(c > b && b > 0.0) {
        return Err(Error::Precondition(format!(
            "Euler integral requires c > b > 0, got b = {b}, c = {c}"
        )));
    }
    let cb = c - b;
    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-14,
    };

    // [0, 1/2]: u^{b-1} is the only non-smooth factor
    let left = if b < 1.0 {
        let upper = 0.5_f64.powf(b);
        let q = adaptive(
            |t| {
                let u = t.powf(1.0 / b);
                (1.0 - u).powf(cb - 1.0) * (1.0 - z * u).powf(-a)
            },
            0.0,
            upper,
            tol,
        );
        scale_quad(q, 1.0 / b)
    } else {
        adaptive(
            |u| u.powf(b - 1.0) * (1.0 - u).powf(cb - 1.0) * (1.0 - z * u).powf(-a),
            0.0,
            0.5,
            tol,
        )
    };

    // [1/2, 1] in v = 1 - u: v^{c-b-1} and the (1 - z + z v)^{-a} peak at v ~ 1 - z
    let right = if cb < 1.0 {
        let upper = 0.5_f64.powf(cb);
        let q = adaptive(
            |t| {
                let v = t.powf(1.0 / cb);
                (1.0 - v).powf(b - 1.0) * (one_minus_z + z * v).powf(-a)
            },
            0.0,
            upper,
            tol,
        );
        scale_quad(q, 1.0 / cb)
    } else {
        adaptive(
            |v| v.powf(cb - 1.0) * (1.0 - v).powf(b - 1.0) * (one_minus_z + z * v).powf(-a),
            0.0,
            0.5,
            tol,
        )
    };

    let prefactor = gamma(c) * rgamma(b) * rgamma(cb);
    let value = prefactor * (left.value + right.value);
    let err =
        prefactor.abs() * (left.abs_error + right.abs_error) + 8.0 * f64::EPSILON * value.abs();
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "Euler integral did not produce a finite value for {p:?} at z = {z}"
        )));
    }
    Ok(EvalResult {
        value,
        abs_error_estimate: err,
        method: EvalMethod::EulerIntegral,
    })
}

fn scale_quad(q: crate::quadrature::Quad, factor: f64) -> crate::quadrature::Quad {
    crate::quadrature::Quad {
        value: q.value * factor,
        abs_error: q.abs_error * factor.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn gamma_classical_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!(close(gamma_fn(0.5).unwrap(), PI.sqrt(), 1e-14));
        assert!(close(gamma_fn(5.0).unwrap(), 24.0, 1e-14));
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn gamma_duplication_at_one() {
        // Gamma(2) = (2 pi)^{-1/2} 2^{3/2} Gamma(1) Gamma(3/2) = 1
        let lhs = gamma_fn(2.0).unwrap();
        let rhs = (2.0 * PI).powf(-0.5) * 2f64.powf(1.5) * gamma(1.0) * gamma(1.5);
        assert!(close(lhs, 1.0, 1e-14));
        assert!(close(rhs, 1.0, 1e-14));
    }

    #[test]
    fn gamma_reflection_for_negative_arguments() {
        // Gamma(-0.5) = -2 sqrt(pi)
        assert!(close(gamma(-0.5), -2.0 * PI.sqrt(), 1e-14));
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(5.3, 0), 1.0);
        assert_eq!(pochhammer(3.0, 4), 360.0);
        assert_eq!(pochhammer(0.5, 2), 0.75);
        assert_eq!(pochhammer(-2.0, 3), 0.0);
    }

    #[test]
    fn hyp2f1_at_zero_is_one() {
        let p = Hyp2F1Params::new(0.7, 1.3, 2.1).unwrap();
        let r = hyp2f1(p, 0.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.method, EvalMethod::Series);
    }

    #[test]
    fn hyp2f1_gauss_summation() {
        let p = Hyp2F1Params::new(0.5, 1.0, 2.0).unwrap();
        let r = hyp2f1(p, 1.0).unwrap();
        assert_eq!(r.method, EvalMethod::GaussSummation);
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn hyp2f1_divergent_at_one() {
        let p = Hyp2F1Params::new(1.5, 2.0, 3.0).unwrap();
        assert!(matches!(hyp2f1(p, 1.0), Err(Error::Divergence(_))));
    }

    #[test]
    fn hyp2f1_domain_errors() {
        let p = Hyp2F1Params::new(0.5, 1.0, 2.0).unwrap();
        assert!(matches!(hyp2f1(p, 1.5), Err(Error::Domain(_))));
        assert!(matches!(hyp2f1(p, -0.1), Err(Error::Domain(_))));
        assert!(Hyp2F1Params::new(1.0, 1.0, -2.0).is_err());
        assert!(Hyp2F1Params::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn hyp2f1_method_switch() {
        let p = Hyp2F1Params::new(0.5, 1.0, 2.0).unwrap();
        assert_eq!(hyp2f1(p, 0.75).unwrap().method, EvalMethod::Series);
        assert_eq!(hyp2f1(p, 0.8).unwrap().method, EvalMethod::EulerIntegral);
        // b = 1 >= c would fail, but a = 0.5 < c allows the swapped integral
        let q = Hyp2F1Params::new(0.5, 3.0, 2.0).unwrap();
        assert_eq!(hyp2f1(q, 0.8).unwrap().method, EvalMethod::EulerIntegral);
        // no admissible integral: series fallback
        let r = Hyp2F1Params::new(-0.5, 3.0, 2.0).unwrap();
        assert_eq!(hyp2f1(r, 0.8).unwrap().method, EvalMethod::Series);
    }

    #[test]
    fn euler_preconditions() {
        let p = Hyp2F1Params::new(0.5, 2.0, 2.0).unwrap();
        assert!(matches!(hyp2f1_euler(p, 0.5), Err(Error::Precondition(_))));
        let p = Hyp2F1Params::new(0.5, -1.0, 2.0).unwrap();
        assert!(matches!(hyp2f1_euler(p, 0.5), Err(Error::Precondition(_))));
        let p = Hyp2F1Params::new(0.5, 1.0, 2.0).unwrap();
        assert!(hyp2f1_euler(p, 1.0).is_err());
    }

    #[test]
    fn euler_with_zero_a_is_one() {
        let p = Hyp2F1Params::new(0.0, 1.0, 2.0).unwrap();
        let r = hyp2f1_euler(p, 0.9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_trivial_cases() {
        let p = Hyp2F1Params::new(0.7, 1.3, 2.1).unwrap();
        let d = hyp2f1_derivative(p, 0.0).unwrap();
        assert!((d - 0.7 * 1.3 / 2.1).abs() < 1e-15);
        let p = Hyp2F1Params::new(0.0, 1.0, 2.0).unwrap();
        assert_eq!(hyp2f1_derivative(p, 0.4).unwrap(), 0.0);
        assert!(hyp2f1_derivative(p, 1.0).is_err());
    }

    #[test]
    fn near_one_limit_examples() {
        let lim = |a, b, c| near_one_ratio_limit(Hyp2F1Params::new(a, b, c).unwrap()).unwrap();
        assert!((lim(2.0, 2.0, 3.0) - 2.0).abs() < 1e-13);
        assert!((lim(1.5, 2.0, 3.0) - 4.0).abs() < 1e-13);
        assert!((lim(1.0, 1.0, 1.5) - PI / 2.0).abs() < 1e-13);
        let bad = Hyp2F1Params::new(0.5, 1.0, 2.0).unwrap();
        assert!(matches!(
            near_one_ratio_limit(bad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn connection_formula_near_one() {
        // mpmath: 2F1(1, 1.5; 3; 0.99999)
        let p = Hyp2F1Params::new(1.0, 1.5, 3.0).unwrap();
        let v = hyp2f1_one_minus(p, 1e-5).unwrap().value;
        assert!(close(v, 3.974_821_274_746_666, 1e-13));
        // hands over continuously from the Euler integral
        for p in [
            Hyp2F1Params::new(2.45, 2.5, 4.0).unwrap(),
            Hyp2F1Params::new(1.25, 2.0, 3.0).unwrap(),
            Hyp2F1Params::new(0.25, 0.5, 1.0).unwrap(),
        ] {
            let w = CONNECTION_SWITCH * 0.999;
            let a = connection_one_minus(p, w).value;
            let b = euler_integral(p, 1.0 - w, w).unwrap().value;
            assert!(close(a, b, 1e-11), "{p:?}: {a} vs {b}");
        }
    }
}
