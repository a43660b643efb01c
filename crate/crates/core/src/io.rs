//! CSV point sets and JSON sweep reports.
//!
//! CSV: one point per line, `d+1` comma-separated fields written with 17
//! significant digits, no header. JSON reals are likewise written with 17
//! significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::analysis::SweepReport;
use crate::error::{Error, Result};
use crate::geometry::{norm, Configuration, UNIT_NORM_TOL};

/// Points whose norm is off by more than this are rejected on read.
pub const READ_NORM_TOL: f64 = 1e-9;

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn config_to_csv(c: &Configuration) -> String {
    let mut out = String::new();
    for p in c.points() {
        let line: Vec<String> = p.iter().map(|&v| format_real(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_config_csv(c: &Configuration, path: &Path) -> Result<()> {
    fs::write(path, config_to_csv(c))?;
    Ok(())
}

/// Parses CSV text for a configuration on `S^d`. Points within
/// [`READ_NORM_TOL`] of the sphere are renormalized; points already unit to
/// [`UNIT_NORM_TOL`] are kept bit for bit.
pub fn parse_config_csv(text: &str, d: usize, path: &Path) -> Result<Configuration> {
    let amb = d + 1;
    let mut coords = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != amb {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {amb} fields for d = {d}, found {}", fields.len()),
            });
        }
        let mut point = Vec::with_capacity(amb);
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("invalid number {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("non-finite coordinate {f:?}"),
                });
            }
            point.push(v);
        }
        let r = norm(&point);
        if (r - 1.0).abs() > READ_NORM_TOL {
            return Err(Error::OffSphere {
                path: path.to_path_buf(),
                line,
                norm: r,
            });
        }
        if (r - 1.0).abs() > UNIT_NORM_TOL {
            log::warn!("{}:{line}: renormalizing point of norm {r}", path.display());
            point.iter_mut().for_each(|v| *v /= r);
        }
        coords.extend(point);
    }
    Configuration::from_flat(d, coords)
}

pub fn read_config_csv(path: &Path, d: usize) -> Result<Configuration> {
    let text = fs::read_to_string(path)?;
    parse_config_csv(&text, d, path)
}

/// Pretty JSON formatter that prints every float with 17 significant digits.
pub struct SigDigitsFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for SigDigitsFormatter<'_> {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for SigDigitsFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_real(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes any value with [`SigDigitsFormatter`].
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitsFormatter::default());
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// The report schema: `{"d", "s", "gamma", "records": [...], "constants": {...},
/// "empirical_A", ...}`. Undefined reals (outside `0 < s < d`) become `null`.
pub fn report_to_value(report: &SweepReport) -> Value {
    let records: Vec<Value> = report
        .records
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "energy": r.best_energy,
                "min_distance": r.min_distance,
                "scaled_separation": r.scaled_separation,
                "lemma2_C": r.lemma2_c,
                "lemma4_C": r.lemma4_c,
                "lemma6_pass": r.lemma6_pass,
                "converged": r.converged,
                "grad_norm": r.grad_norm,
                "consensus": r.consensus,
                "lemma1_C": r.lemma1_c,
                "lemma6_max_field": r.lemma6_max_field,
                "lemma2_min_potential": r.lemma2_min_potential_on_sphere,
                "lemma4_potential": r.lemma4_potential,
                "exterior_min_potential": r.exterior_potential_at_r_n,
                "exterior_C": r.exterior_c,
                "packing_ratio": r.packing_ratio,
            })
        })
        .collect();
    let c = &report.constants;
    json!({
        "d": report.d,
        "s": report.s,
        "gamma": c.gamma,
        "records": records,
        "constants": {
            "gamma": c.gamma,
            "beta": c.beta,
            "fitted_C_lemma1": c.fitted_c_lemma1,
            "fitted_C_lemma2": c.fitted_c_lemma2,
            "fitted_C_lemma4": c.fitted_c_lemma4,
            "fitted_C_exterior": c.fitted_c_exterior,
            "empirical_A": c.empirical_a,
        },
        "empirical_A": c.empirical_a,
        "separation_log_slope": report.separation_log_slope(),
        "packing_ratio_d2": report.packing_ratio_d2,
    })
}

pub fn report_to_json(report: &SweepReport) -> Result<String> {
    to_json_string(&report_to_value(report))
}

pub fn write_report_json(report: &SweepReport, path: &Path) -> Result<()> {
    let mut text = report_to_json(report)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
