mod common;

use std::f64::consts::PI;

use common::{random_orthogonal, tetrahedron};
use proptest::prelude::*;
use riesz_core::{
    chordal_distance, min_separation, random_uniform, roots_of_unity, scale_to_radius,
    Configuration, Error, Point,
};

#[test]
fn chordal_distance_values() {
    let x = Point::new(vec![1.0, 0.0, 0.0]);
    let y = Point::new(vec![0.0, 1.0, 0.0]);
    let z = Point::new(vec![-1.0, 0.0, 0.0]);
    assert_eq!(chordal_distance(&x, &x).unwrap(), 0.0);
    assert_eq!(chordal_distance(&x, &z).unwrap(), 2.0);
    assert!((chordal_distance(&x, &y).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!(matches!(
        chordal_distance(&x, &Point::new(vec![1.0, 0.0])),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn separation_examples() {
    let pair = Configuration::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap();
    let r = min_separation(&pair);
    assert_eq!(r.min_distance, 2.0);
    assert!((r.scaled - 2.0 * 2f64.sqrt()).abs() < 1e-14);

    let sq = min_separation(&roots_of_unity(4).unwrap());
    assert!((sq.min_distance - 2f64.sqrt()).abs() < 1e-15);
    assert!((sq.scaled - 4.0 * 2f64.sqrt()).abs() < 1e-14);

    let tet = min_separation(&Configuration::from_flat(2, tetrahedron()).unwrap());
    assert!((tet.min_distance - (8.0f64 / 3.0).sqrt()).abs() < 1e-14);
    assert!((tet.scaled - 2.0 * (8.0f64 / 3.0).sqrt()).abs() < 1e-13);
    // all six edges tie; the smallest pair wins
    assert_eq!(tet.pair, (0, 1));
}

#[test]
fn roots_of_unity_values() {
    let two = roots_of_unity(2).unwrap();
    assert_eq!(two.point(0), &[1.0, 0.0]);
    assert!((two.point(1)[0] + 1.0).abs() < 1e-15 && two.point(1)[1].abs() < 1e-15);
    for n in 2..=64 {
        let sep = min_separation(&roots_of_unity(n).unwrap()).min_distance;
        assert!((sep - 2.0 * (PI / n as f64).sin()).abs() < 1e-14, "n = {n}");
    }
    assert!((min_separation(&roots_of_unity(6).unwrap()).min_distance - 1.0).abs() < 1e-15);
    assert!(roots_of_unity(1).is_err());
}

#[test]
fn construction_rejects_bad_input() {
    assert!(matches!(
        Configuration::from_flat(2, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        Err(Error::CoincidentPoints { i: 0, j: 1, .. })
    ));
    assert!(Configuration::from_flat(2, vec![1.01, 0.0, 0.0, 0.0, 1.0, 0.0]).is_err());
    assert!(Configuration::from_flat(2, vec![1.0, 0.0]).is_err());
    assert!(Configuration::new(
        1,
        vec![Point::new(vec![1.0, 0.0]), Point::new(vec![0.0, 1.0, 0.0])]
    )
    .is_err());
}

#[test]
fn random_uniform_is_deterministic_and_unit() {
    let a = random_uniform(3, 200, 42).unwrap();
    let b = random_uniform(3, 200, 42).unwrap();
    let c = random_uniform(3, 200, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    for p in a.points() {
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }
}

#[test]
fn random_uniform_mean_is_small() {
    let c = random_uniform(2, 1_000_000, 7).unwrap();
    let mut mean = [0.0; 3];
    for p in c.points() {
        for k in 0..3 {
            mean[k] += p[k];
        }
    }
    for m in mean {
        assert!((m / 1e6).abs() < 0.005, "mean {}", m / 1e6);
    }
}

/// CDF of the first coordinate of a uniform point on `S^d`.
fn marginal_cdf(d: usize, t: f64) -> f64 {
    let t = t.clamp(-1.0, 1.0);
    match d {
        1 => 0.5 + t.asin() / PI,
        2 => (t + 1.0) / 2.0,
        3 => 0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI,
        _ => unreachable!(),
    }
}

#[test]
fn first_coordinate_passes_kolmogorov_smirnov() {
    let n = 20_000;
    // 1.95 / sqrt(n) is the asymptotic critical value at p = 0.001
    let critical = 1.95 / (n as f64).sqrt();
    for d in 1..=3 {
        for seed in [1u64, 2] {
            let rot = random_orthogonal(d + 1, 100 + seed);
            let c = random_uniform(d, n, seed)
                .unwrap()
                .transformed(&rot)
                .unwrap();
            let mut xs: Vec<f64> = c.points().map(|p| p[0]).collect();
            xs.sort_by(f64::total_cmp);
            let stat = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = marginal_cdf(d, x);
                    (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
                })
                .fold(0.0, f64::max);
            assert!(stat < critical, "d = {d}, seed {seed}: D = {stat}");
        }
    }
}

#[test]
fn scale_to_radius_examples() {
    let x = Point::new(vec![0.6, 0.8, 0.0]);
    let y = scale_to_radius(&x, 1.5).unwrap();
    assert!((y.norm() - 1.5).abs() < 1e-15);
    assert!((y.coords()[0] / y.coords()[1] - 0.75).abs() < 1e-15);
    let back = scale_to_radius(&y, 1.0).unwrap();
    for (a, b) in back.coords().iter().zip(x.coords()) {
        assert!((a - b).abs() < 1e-14);
    }
    // R_{N,d} for N = 4, d = 2
    assert_eq!(1.0 + 4f64.powf(-1.0 / 2.0), 1.5);
    assert!(scale_to_radius(&Point::new(vec![0.0, 0.0]), 1.0).is_err());
    assert!(scale_to_radius(&x, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn min_separation_is_a_lower_bound(d in 1usize..4, n in 2usize..40, seed in any::<u64>()) {
        let c = random_uniform(d, n, seed).unwrap();
        let rec = min_separation(&c);
        let pts = c.to_points();
        let (i, j) = rec.pair;
        prop_assert!(i < j);
        prop_assert_eq!(chordal_distance(&pts[i], &pts[j]).unwrap(), rec.min_distance);
        for a in 0..n {
            for b in a + 1..n {
                prop_assert!(rec.min_distance <= chordal_distance(&pts[a], &pts[b]).unwrap());
            }
        }
    }

    #[test]
    fn rotations_preserve_separation(d in 1usize..4, n in 2usize..30, seed in any::<u64>()) {
        let c = random_uniform(d, n, seed).unwrap();
        let r = c.transformed(&random_orthogonal(d + 1, seed ^ 0xabc)).unwrap();
        let a = min_separation(&c).min_distance;
        let b = min_separation(&r).min_distance;
        prop_assert!((a - b).abs() < 1e-13);
    }
}
