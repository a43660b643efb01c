//! Points on `S^d`, configurations and distance measurements.
//!
//! Distances are chordal (Euclidean in `R^{d+1}`). Configurations store
//! their coordinates row-major in one flat buffer.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Points closer than this are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Allowed deviation of a sphere point's norm from 1.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point of `R^{d+1}`. Sphere points have unit norm; evaluation points
/// for potentials may have any norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `N >= 2` distinct unit vectors in `R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim_d: usize,
    coords: Vec<f64>,
}

impl Configuration {
    /// Validates unit norms and pairwise distinctness.
    pub fn new(dim_d: usize, points: Vec<Point>) -> Result<Self> {
        let amb = dim_d + 1;
        let mut coords = Vec::with_capacity(points.len() * amb);
        for p in &points {
            if p.dim() != amb {
                return Err(Error::DimensionMismatch {
                    expected: amb,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(dim_d, coords)
    }

    /// Builds from a row-major coordinate buffer of length `N (d+1)`.
    pub fn from_flat(dim_d: usize, coords: Vec<f64>) -> Result<Self> {
        if dim_d < 1 {
            return Err(Error::Domain("sphere dimension d must be >= 1".into()));
        }
        let amb = dim_d + 1;
        if !coords.len().is_multiple_of(amb) {
            return Err(Error::DimensionMismatch {
                expected: amb,
                found: coords.len() % amb,
            });
        }
        let n = coords.len() / amb;
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 points, got {n}")));
        }
        for (i, p) in coords.chunks_exact(amb).enumerate() {
            let r = norm(p);
            if !r.is_finite() || (r - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Domain(format!(
                    "point {i} has norm {r}, not on the unit sphere"
                )));
            }
        }
        let c = Self { dim_d, coords };
        if let Some((i, j, distance)) = c.find_coincident_pair() {
            return Err(Error::CoincidentPoints { i, j, distance });
        }
        Ok(c)
    }

    /// Trusted constructor for iterates that are renormalized by the caller.
    pub(crate) fn from_flat_unchecked(dim_d: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len() % (dim_d + 1), 0);
        Self { dim_d, coords }
    }

    pub fn dim_d(&self) -> usize {
        self.dim_d
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim_d + 1
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let amb = self.ambient_dim();
        &self.coords[i * amb..(i + 1) * amb]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.ambient_dim())
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.points().map(|p| Point(p.to_vec())).collect()
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.coords
    }

    /// Applies a linear map given as a row-major `(d+1) x (d+1)` matrix.
    /// The result is re-validated.
    pub fn transformed(&self, matrix: &[f64]) -> Result<Self> {
        let amb = self.ambient_dim();
        if matrix.len() != amb * amb {
            return Err(Error::DimensionMismatch {
                expected: amb * amb,
                found: matrix.len(),
            });
        }
        let mut out = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            for row in matrix.chunks_exact(amb) {
                out.push(row.iter().zip(p).map(|(m, x)| m * x).sum());
            }
        }
        Self::from_flat(self.dim_d, out)
    }

    /// First pair (in sorted sweep order) closer than [`COINCIDENCE_TOL`].
    /// Sorting by the first coordinate keeps this near `O(N log N)`.
    fn find_coincident_pair(&self) -> Option<(usize, usize, f64)> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| self.point(i)[0].total_cmp(&self.point(j)[0]));
        let tol2 = COINCIDENCE_TOL * COINCIDENCE_TOL;
        for (k, &i) in order.iter().enumerate() {
            let xi = self.point(i);
            for &j in &order[k + 1..] {
                let xj = self.point(j);
                if xj[0] - xi[0] > COINCIDENCE_TOL {
                    break;
                }
                let d2 = dist2(xi, xj);
                if d2 < tol2 {
                    return Some((i.min(j), i.max(j), d2.sqrt()));
                }
            }
        }
        None
    }
}

/// Minimum pairwise distance of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationRecord {
    pub n: usize,
    pub min_distance: f64,
    pub pair: (usize, usize),
    /// `min_distance * N^{1/d}`
    pub scaled: f64,
}

pub fn chordal_distance(x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(dist2(x.coords(), y.coords()).sqrt())
}

/// Exact minimum over all pairs; ties resolve to the lexicographically
/// smallest `(i, j)`.
pub fn min_separation(c: &Configuration) -> SeparationRecord {
    let n = c.len();
    let mut best = f64::INFINITY;
    let mut pair = (0, 1);
    for i in 0..n {
        let xi = c.point(i);
        for j in i + 1..n {
            let d2 = dist2(xi, c.point(j));
            if d2 < best {
                best = d2;
                pair = (i, j);
            }
        }
    }
    let min_distance = best.sqrt();
    SeparationRecord {
        n,
        min_distance,
        pair,
        scaled: min_distance * (n as f64).powf(1.0 / c.dim_d() as f64),
    }
}

/// The `n`-th roots of unity on `S^1`.
pub fn roots_of_unity(n: usize) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n}")));
    }
    let coords = (0..n)
        .flat_map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    Configuration::from_flat(1, coords)
}

/// `n` independent uniform points on `S^d` (normalized Gaussian vectors),
/// deterministic in `seed`.
pub fn random_uniform(d: usize, n: usize, seed: u64) -> Result<Configuration> {
    if d < 1 {
        return Err(Error::Domain("sphere dimension d must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n}")));
    }
    let amb = d + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n * amb);
    for _ in 0..n {
        push_uniform_point(&mut rng, amb, &mut coords);
    }
    loop {
        let c = Configuration::from_flat_unchecked(d, coords);
        match c.find_coincident_pair() {
            None => return Ok(c),
            Some((_, j, _)) => {
                // probability-zero event: redraw the later point of the pair
                coords = c.into_flat();
                let mut fresh = Vec::with_capacity(amb);
                push_uniform_point(&mut rng, amb, &mut fresh);
                coords[j * amb..(j + 1) * amb].copy_from_slice(&fresh);
            }
        }
    }
}

pub(crate) fn push_uniform_point<R: rand::Rng>(rng: &mut R, amb: usize, out: &mut Vec<f64>) {
    loop {
        let v: Vec<f64> = (0..amb).map(|_| StandardNormal.sample(rng)).collect();
        let r = norm(&v);
        if r > 1e-150 {
            out.extend(v.iter().map(|x| x / r));
            return;
        }
    }
}

/// Rescales `x` to norm `r`.
pub fn scale_to_radius(x: &Point, r: f64) -> Result<Point> {
    let len = x.norm();
    if len == 0.0 || !len.is_finite() {
        return Err(Error::Domain("cannot rescale the zero vector".into()));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let f = r / len;
    Ok(Point(x.coords().iter().map(|v| v * f).collect()))
}

/// Normalizes every row of a flat buffer to unit length in place.
pub(crate) fn renormalize_rows(coords: &mut [f64], amb: usize) {
    for p in coords.chunks_exact_mut(amb) {
        let r = norm(p);
        for v in p.iter_mut() {
            *v /= r;
        }
    }
}
