//! Riesz s-energy on the unit sphere `S^d`.
//!
//! The crate computes near-minimal Riesz energy point configurations,
//! evaluates the Riesz potential of the uniform surface measure in closed
//! hypergeometric form (with quadrature and Monte Carlo cross-checks), and
//! runs the separation / energy-bound verification harness.
//!
//! Module map:
//!
//! * [`specfun`] - Gamma, Pochhammer, Gauss `2F1`.
//! * [`quadrature`] - Gauss-Legendre rules and adaptive integration.
//! * [`geometry`] - points, configurations, distances, reference sets.
//! * [`energy`] - energies, gradients and the continuum constant `gamma_{d,s}`.
//! * [`potential`] - discrete and uniform-measure potentials.
//! * [`optimizer`] - Riemannian gradient descent with restarts.
//! * [`analysis`] - inequality checks, constant fitting and N-sweeps.
//! * [`io`] - CSV point sets and JSON reports.
//! * [`cli`] - the `riesz` command-line front end.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod optimizer;
pub mod parallel;
pub mod potential;
pub mod quadrature;
pub mod specfun;
mod sum;

pub use analysis::{
    fit_constants, separation_sweep, verify_lemma1, verify_lemma2, verify_lemma4, verify_lemma6,
    LemmaConstants, SweepRecord, SweepReport,
};
pub use energy::{
    energy_upper_bound, gamma_const, riesz_energy, riesz_gradient, EnergyReport, GammaForm, Kernel,
    RieszParams,
};
pub use error::{Error, Result};
pub use geometry::{
    chordal_distance, min_separation, random_uniform, roots_of_unity, scale_to_radius,
    Configuration, Point, SeparationRecord,
};
pub use optimizer::{minimize, polish, OptimizationResult, OptimizerConfig};
pub use potential::{
    discrete_potential, uniform_potential_boundary, uniform_potential_closed,
    uniform_potential_elementary_d2, uniform_potential_montecarlo, uniform_potential_quadrature,
    PotentialMethod, PotentialValue, RadialQuery,
};
pub use specfun::{
    gamma_fn, hyp2f1, hyp2f1_derivative, hyp2f1_euler, near_one_ratio_limit, pochhammer,
    EvalMethod, EvalResult, Hyp2F1Params,
};
