//! JSON schemas for problem and result files.

use std::path::Path;

use levyarea::{CFValue, Complex64, Diagnostics, FactorRecord, FrequencyPoint, MCEstimate, Mode, ProblemSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const TOOL_NAME: &str = "levyarea";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_mode() -> String {
    "characteristic".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub d: usize,
    pub times: Vec<f64>,
    /// One row-major `d x d` array per observation time.
    pub matrices: Vec<Vec<f64>>,
    pub gammas: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_mode")]
    pub mode: String,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn mode(&self) -> Result<Mode> {
        match self.mode.as_str() {
            "characteristic" => Ok(Mode::Characteristic),
            "mgf" => Ok(Mode::Mgf),
            other => Err(CliError::UnknownMode(other.to_string())),
        }
    }

    /// Builds and validates the core problem.
    pub fn to_problem(&self) -> Result<(ProblemSpec, FrequencyPoint)> {
        let spec = ProblemSpec::new(self.d, self.times.clone(), self.matrices.clone());
        let pt = FrequencyPoint::new(self.gammas.clone(), self.lambdas.clone(), self.mode()?);
        levyarea::validate(&spec, &pt)?;
        Ok((spec, pt))
    }

    /// SHA-256 of the compact JSON re-serialization, so formatting of the
    /// source file does not matter.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("problem files always serialize");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub trace_integral: ComplexJson,
    pub quadratic_integral: ComplexJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub grid_step: f64,
    pub steps: usize,
    pub max_k_norm: f64,
    pub max_transport_residual: f64,
    pub modulus_exceeded: bool,
}

impl From<&Diagnostics> for DiagnosticsJson {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsJson {
            grid_step: d.grid_step,
            steps: d.steps,
            max_k_norm: d.max_k_norm,
            max_transport_residual: d.max_transport_residual,
            modulus_exceeded: d.modulus_exceeded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McJson {
    pub std_error: f64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub n_paths: usize,
    pub steps_per_unit: usize,
    pub seed: u64,
}

impl From<&MCEstimate> for McJson {
    fn from(e: &MCEstimate) -> Self {
        McJson {
            std_error: e.std_error,
            std_error_re: e.std_error_re,
            std_error_im: e.std_error_im,
            n_paths: e.n_paths,
            steps_per_unit: e.steps_per_unit,
            seed: e.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub tool: String,
    pub version: String,
    /// `eval`, `closed2d` or `mc`.
    pub method: String,
    pub input_digest: String,
    pub mode: String,
    pub value: ComplexJson,
    pub factors: Vec<FactorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McJson>,
}

impl ResultFile {
    pub fn from_cf(method: &str, problem: &ProblemFile, v: &CFValue) -> Self {
        ResultFile {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            method: method.to_string(),
            input_digest: problem.digest(),
            mode: problem.mode.clone(),
            value: v.value.into(),
            factors: v
                .factors
                .iter()
                .map(|f| FactorJson {
                    trace_integral: f.trace_integral.into(),
                    quadratic_integral: f.quadratic_integral.into(),
                })
                .collect(),
            diagnostics: Some((&v.diagnostics).into()),
            mc: None,
        }
    }

    pub fn from_mc(problem: &ProblemFile, e: &MCEstimate) -> Self {
        ResultFile {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            method: "mc".to_string(),
            input_digest: problem.digest(),
            mode: problem.mode.clone(),
            value: e.mean.into(),
            factors: Vec::new(),
            diagnostics: None,
            mc: Some(e.into()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result files always serialize");
        s.push('\n');
        s
    }

    /// Recomputes the value from the stored per-interval factors.
    pub fn reassemble(&self) -> Option<Complex64> {
        if self.factors.is_empty() {
            return None;
        }
        let log: Complex64 = self
            .factors
            .iter()
            .map(|f| {
                FactorRecord {
                    trace_integral: f.trace_integral.into(),
                    quadratic_integral: f.quadratic_integral.into(),
                }
                .log_factor()
            })
            .sum();
        Some(log.exp())
    }

    /// Standard error of `value`; zero for deterministic results.
    pub fn std_error(&self) -> f64 {
        self.mc.map_or(0.0, |m| m.std_error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ProblemFile {
        ProblemFile {
            d: 2,
            times: vec![1.0],
            matrices: vec![vec![0.0, -1.0, 1.0, 0.0]],
            gammas: vec![vec![0.0, 0.0]],
            lambdas: vec![1.0],
            mode: "characteristic".into(),
        }
    }

    #[test]
    fn mode_defaults_to_characteristic() {
        let p: ProblemFile =
            serde_json::from_str(r#"{"d":2,"times":[1],"matrices":[[0,-1,1,0]],"gammas":[[0,0]],"lambdas":[1]}"#).unwrap();
        assert_eq!(p, sample());
    }

    #[test]
    fn digest_ignores_formatting() {
        let a: ProblemFile =
            serde_json::from_str(r#"{"d":2,"times":[1],"matrices":[[0,-1,1,0]],"gammas":[[0,0]],"lambdas":[1]}"#).unwrap();
        let b: ProblemFile = serde_json::from_str(&serde_json::to_string_pretty(&sample()).unwrap()).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut c = sample();
        c.lambdas[0] = 1.5;
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn unknown_mode_rejected() {
        let mut p = sample();
        p.mode = "laplace".into();
        assert!(matches!(p.to_problem(), Err(CliError::UnknownMode(_))));
    }

    #[test]
    fn result_round_trips() {
        let p = sample();
        let (spec, pt) = p.to_problem().unwrap();
        let v = levyarea::eval_joint_cf(&spec, &pt, &Default::default()).unwrap();
        let r = ResultFile::from_cf("eval", &p, &v);
        let back: ResultFile = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let z = back.reassemble().unwrap();
        assert!((z - Complex64::from(back.value)).norm() < 1e-12);
    }
}
