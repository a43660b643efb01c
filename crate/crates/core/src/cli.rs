//! `riesz` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input parse
//! error, 3 numeric domain error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    exterior_node_potential, in_separation_range, lemma1_implied_constant, node_field_check,
    verify_lemma1, verify_lemma2, verify_lemma4, DEFAULT_PROBES, OPTIMUM_SLACK, REFERENCE_A_2_1,
};
use crate::energy::{energy_upper_bound, gamma_const, GammaForm, RieszParams};
use crate::error::{Error, Result};
use crate::geometry::{min_separation, random_uniform};
use crate::io::{
    format_real, read_config_csv, report_to_json, write_config_csv, write_report_json,
};
use crate::optimizer::{minimize, OptimizerConfig};
use crate::potential::{
    uniform_potential_boundary, uniform_potential_closed, uniform_potential_elementary_d2,
    uniform_potential_montecarlo, uniform_potential_quadrature, PotentialValue, RadialQuery,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "riesz",
    version,
    about = "Minimal Riesz energy points on spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print both closed forms of gamma_{d,s} and their difference.
    Gamma {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: f64,
    },
    /// Evaluate the potential of the uniform measure at radius R.
    Potential {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimize the Riesz energy of N points on S^d.
    Optimize {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
        /// Write the best configuration as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum separation of a configuration read from CSV.
    Separation {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        d: usize,
    },
    /// Optimize and check every n of a list; emits a JSON report.
    Sweep {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: f64,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize N points and run every inequality check; exit 0 iff all pass.
    Verify {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Elementary,
    Quadrature,
    Montecarlo,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Convergence bound on the per-point tangent gradient norm.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long = "max-iters", default_value_t = 5000)]
    pub max_iters: usize,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            max_iters: self.max_iters,
            grad_tol: self.tol,
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("--{name} must be finite, got {v}")))
    }
}

fn print_potential(out: &mut dyn Write, v: &PotentialValue) -> Result<()> {
    let method = serde_json::to_value(v.method)?;
    writeln!(out, "value {}", format_real(v.value))?;
    writeln!(out, "method {}", method.as_str().unwrap_or_default())?;
    writeln!(
        out,
        "abs_error_estimate {}",
        format_real(v.abs_error_estimate)
    )?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Gamma { d, s } => {
            check_finite("s", s)?;
            let direct = gamma_const(d, s, GammaForm::Direct)?;
            let limit = gamma_const(d, s, GammaForm::BoundaryLimit)?;
            writeln!(out, "direct {}", format_real(direct))?;
            writeln!(out, "boundary_limit {}", format_real(limit))?;
            writeln!(out, "abs_diff {}", format_real((direct - limit).abs()))?;
            Ok(true)
        }
        Command::Potential {
            d,
            s,
            radius,
            method,
            samples,
            seed,
        } => {
            check_finite("s", s)?;
            check_finite("radius", radius)?;
            let q = RadialQuery::new(d, s, radius)?;
            let v = match method {
                Method::Closed if radius == 1.0 => uniform_potential_boundary(d, s)?,
                Method::Closed => uniform_potential_closed(q)?,
                Method::Elementary => {
                    if d != 2 {
                        return Err(Error::Domain(format!(
                            "elementary form exists only for d = 2, got d = {d}"
                        )));
                    }
                    uniform_potential_elementary_d2(s, radius)?
                }
                Method::Quadrature => uniform_potential_quadrature(q)?,
                Method::Montecarlo => uniform_potential_montecarlo(q, samples, seed)?,
            };
            print_potential(out, &v)?;
            Ok(true)
        }
        Command::Optimize {
            d,
            s,
            n,
            opt,
            out: path,
        } => {
            check_finite("s", s)?;
            let cfg = opt.config();
            let r = minimize(d, s, n, &cfg)?;
            let sep = min_separation(&r.config);
            writeln!(out, "energy {}", format_real(r.energy))?;
            writeln!(out, "grad_norm {}", format_real(r.grad_norm))?;
            writeln!(out, "converged {}", r.converged)?;
            writeln!(out, "iterations {}", r.iterations)?;
            writeln!(out, "restart_index {}", r.restart_index)?;
            writeln!(out, "consensus {}/{}", r.consensus, cfg.restarts)?;
            writeln!(out, "min_distance {}", format_real(sep.min_distance))?;
            writeln!(out, "scaled_separation {}", format_real(sep.scaled))?;
            if let Some(path) = path {
                write_config_csv(&r.config, &path)?;
                writeln!(out, "wrote {}", path.display())?;
            }
            Ok(true)
        }
        Command::Separation { input, d } => {
            let c = read_config_csv(&input, d)?;
            let sep = min_separation(&c);
            writeln!(out, "n {}", sep.n)?;
            writeln!(out, "min_distance {}", format_real(sep.min_distance))?;
            writeln!(out, "pair {} {}", sep.pair.0, sep.pair.1)?;
            writeln!(out, "scaled {}", format_real(sep.scaled))?;
            Ok(true)
        }
        Command::Sweep {
            d,
            s,
            n_list,
            opt,
            out: path,
        } => {
            check_finite("s", s)?;
            let report = crate::analysis::separation_sweep(d, s, &n_list, &opt.config())?;
            match path {
                Some(path) => {
                    write_report_json(&report, &path)?;
                    for r in &report.records {
                        writeln!(
                            out,
                            "n {} energy {} scaled_separation {} converged {}",
                            r.n,
                            format_real(r.best_energy),
                            format_real(r.scaled_separation),
                            r.converged
                        )?;
                    }
                    writeln!(
                        out,
                        "empirical_A {}",
                        format_real(report.constants.empirical_a)
                    )?;
                    writeln!(out, "wrote {}", path.display())?;
                }
                None => writeln!(out, "{}", report_to_json(&report)?)?,
            }
            Ok(true)
        }
        Command::Verify { d, s, n, opt } => verify(d, s, n, &opt.config(), out),
    }
}

struct Checklist<'a> {
    out: &'a mut dyn Write,
    all: bool,
}

impl Checklist<'_> {
    fn record(&mut self, name: &str, pass: bool, detail: String) -> Result<()> {
        self.all &= pass;
        let tag = if pass { "PASS" } else { "FAIL" };
        writeln!(self.out, "{tag} {name}: {detail}")?;
        Ok(())
    }
}

fn verify(d: usize, s: f64, n: usize, cfg: &OptimizerConfig, out: &mut dyn Write) -> Result<bool> {
    check_finite("s", s)?;
    let gamma = gamma_const(d, s, GammaForm::Direct)?;
    let p = RieszParams::new(d, s)?;
    let result = minimize(d, s, n, cfg)?;
    let nf = n as f64;
    let scale = nf.powf(-1.0 + s / d as f64);
    let mut list = Checklist { out, all: true };

    list.record(
        "converged",
        result.converged,
        format!(
            "grad_norm {:.3e} after {} iterations, consensus {}/{}",
            result.grad_norm, result.iterations, result.consensus, cfg.restarts
        ),
    )?;

    let ceiling = energy_upper_bound(d, s, n)?;
    list.record(
        "energy_upper_bound",
        result.energy <= ceiling * (1.0 + 1e-12),
        format!(
            "E = {} <= gamma N(N-1) = {}",
            format_real(result.energy),
            format_real(ceiling)
        ),
    )?;

    // the energy lower bound holds for any point set: witness C from the
    // optimum, test it on an independent random configuration
    let c1 = lemma1_implied_constant(d, s, n, result.energy)?;
    let random = random_uniform(d, n, cfg.seed.wrapping_add(0x5eed))?;
    let l1 = verify_lemma1(&random, s, c1)?;
    list.record(
        "energy_lower_bound",
        l1.holds,
        format!(
            "random E = {} > gamma N^2 - C N^(1+s/d) = {} with C = {}",
            format_real(l1.total),
            format_real(l1.bound),
            format_real(c1)
        ),
    )?;

    let l6 = node_field_check(&result.config, &p)?;
    list.record(
        "node_field",
        l6.holds,
        format!(
            "max_i N^-1 sum_j |x_i-x_j|^-s = {} <= gamma = {}",
            format_real(l6.max_normalized_field),
            format_real(gamma)
        ),
    )?;

    let l2 = verify_lemma2(&result.config, &p, DEFAULT_PROBES, cfg.seed)?;
    list.record(
        "sphere_potential",
        l2.averaged_energy_bound_holds,
        format!(
            "min over {} probes U = {} >= E/(N(N-1)) = {}, implied C = {}",
            l2.probes_evaluated,
            format_real(l2.min_potential),
            format_real(l2.averaged_energy_bound),
            format_real(l2.implied_c)
        ),
    )?;

    if in_separation_range(d, s) {
        let l4 = verify_lemma4(d, s, n)?;
        list.record(
            "uniform_exterior_potential",
            l4.holds,
            format!(
                "U_mu(R_N) = {} < gamma, implied C = {}, decomposition residual {:.2e}",
                format_real(l4.lhs),
                format_real(l4.implied_c),
                l4.decomposition_residual
            ),
        )?;

        let ext = exterior_node_potential(&result.config, &p)?;
        let chain_c = l2.implied_c + l4.implied_c;
        let floor = gamma - chain_c * scale;
        list.record(
            "exterior_node_potential",
            ext.min_potential >= floor * (1.0 - OPTIMUM_SLACK),
            format!(
                "min_i U(R_N x_i) = {} >= gamma - (C_sphere + C_mu) N^(-1+s/d) = {}",
                format_real(ext.min_potential),
                format_real(floor)
            ),
        )?;

        let sep = min_separation(&result.config);
        if d == 2 && s == 1.0 {
            list.record(
                "separation",
                sep.scaled >= REFERENCE_A_2_1,
                format!(
                    "min distance * N^(1/d) = {} >= {}",
                    format_real(sep.scaled),
                    REFERENCE_A_2_1
                ),
            )?;
        } else {
            writeln!(
                list.out,
                "INFO separation: min distance * N^(1/d) = {}",
                format_real(sep.scaled)
            )?;
        }
    } else {
        writeln!(
            list.out,
            "INFO s outside [d-1, d): exterior and separation checks skipped"
        )?;
    }
    Ok(list.all)
}
