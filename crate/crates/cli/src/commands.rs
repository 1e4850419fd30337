//! The subcommands as library functions; `main` only parses flags and
//! routes output.

use std::io::Write;
use std::path::Path;

use levyarea::{compare_values, empirical_cf, simulate_paths, Complex64, EvalConfig, Mode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::files::{ComplexJson, ProblemFile, ResultFile};

fn config(grid_step: Option<f64>) -> EvalConfig {
    EvalConfig {
        grid_step_override: grid_step,
        ..EvalConfig::default()
    }
}

/// Numeric pipeline on the problem file.
pub fn eval(problem_path: &Path, grid_step: Option<f64>) -> Result<ResultFile> {
    let problem = ProblemFile::load(problem_path)?;
    let (spec, pt) = problem.to_problem()?;
    let v = levyarea::evaluate(&spec, &pt, &config(grid_step))?;
    Ok(ResultFile::from_cf("eval", &problem, &v))
}

/// Planar closed form; needs `d = 2`, every matrix the standard skew generator
/// and characteristic mode.
pub fn closed2d(problem_path: &Path) -> Result<ResultFile> {
    let problem = ProblemFile::load(problem_path)?;
    let (spec, pt) = problem.to_problem()?;
    if pt.mode != Mode::Characteristic {
        return Err(CliError::InvalidArgument {
            what: "mode",
            message: "closed2d evaluates the characteristic function only".into(),
        });
    }
    let v = levyarea::eval_joint_cf_2d(&spec, &pt)?;
    Ok(ResultFile::from_cf("closed2d", &problem, &v))
}

/// Monte Carlo estimate with its standard error.
pub fn mc(problem_path: &Path, paths: usize, steps_per_unit: usize, seed: u64) -> Result<ResultFile> {
    let problem = ProblemFile::load(problem_path)?;
    let (spec, pt) = problem.to_problem()?;
    if pt.mode == Mode::Mgf {
        eprintln!("warning: mgf-mode Monte Carlo estimates can have very large variance");
    }
    let set = simulate_paths(&spec, paths, steps_per_unit, seed)?;
    Ok(ResultFile::from_mc(&problem, &empirical_cf(&set, &pt)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub input_digest: String,
    pub method_a: String,
    pub method_b: String,
    pub value_a: ComplexJson,
    pub value_b: ComplexJson,
    pub delta: ComplexJson,
    pub std_error: f64,
    /// `None` when the difference is nonzero but both sides are exact.
    pub z_re: Option<f64>,
    pub z_im: Option<f64>,
    pub threshold: f64,
    pub allowance: f64,
    pub pass: bool,
}

impl CompareOutput {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// Z-score comparison of two result files for the same problem.
pub fn compare(a_path: &Path, b_path: &Path) -> Result<CompareOutput> {
    let a = ResultFile::load(a_path)?;
    let b = ResultFile::load(b_path)?;
    if a.input_digest != b.input_digest {
        return Err(CliError::DigestMismatch {
            a: a.input_digest,
            b: b.input_digest,
        });
    }
    let r = compare_values(a.value.into(), a.std_error(), b.value.into(), b.std_error());
    let finite = |z: f64| z.is_finite().then_some(z);
    Ok(CompareOutput {
        input_digest: a.input_digest,
        method_a: a.method,
        method_b: b.method,
        value_a: a.value,
        value_b: b.value,
        delta: Complex64::new(r.delta_re, r.delta_im).into(),
        std_error: r.std_error,
        z_re: finite(r.z_re),
        z_im: finite(r.z_im),
        threshold: r.threshold,
        allowance: r.allowance,
        pass: r.pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    /// Zero-based position of the swept entry in `lambdas`.
    pub lambda_index: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(CliError::InvalidArgument {
                what: "points",
                message: "need at least one sweep point".into(),
            });
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(CliError::InvalidArgument {
                what: "range",
                message: format!("sweep bounds must be finite, got {} to {}", self.from, self.to),
            });
        }
        if self.points == 1 {
            return Ok(vec![self.from]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / last)
            .collect())
    }
}

/// Evaluates the problem while one `lambda` runs over a uniform grid.
pub fn sweep(problem_path: &Path, range: SweepRange, grid_step: Option<f64>) -> Result<Vec<SweepRow>> {
    let problem = ProblemFile::load(problem_path)?;
    let (spec, mut pt) = problem.to_problem()?;
    if range.lambda_index >= pt.lambdas.len() {
        return Err(CliError::InvalidArgument {
            what: "lambda-index",
            message: format!(
                "index {} out of range for {} lambdas",
                range.lambda_index,
                pt.lambdas.len()
            ),
        });
    }
    let cfg = config(grid_step);
    let mut rows = Vec::with_capacity(range.points);
    for lambda in range.values()? {
        pt.lambdas[range.lambda_index] = lambda;
        let v = levyarea::evaluate(&spec, &pt, &cfg)?.value;
        rows.push(SweepRow {
            lambda,
            re: v.re,
            im: v.im,
            abs: v.norm(),
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
