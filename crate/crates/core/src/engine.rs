//! Product formula for the joint characteristic function.
//!
//! ```text
//! f = prod_j exp{ 1/2 int_0^{t_j} Tr K_j ds
//!               - 1/2 int_{t_{j-1}}^{t_j} < H_j^{*-1}(s) H_j^*(t_j) mu_j >^2 ds }
//! ```
//!
//! `<z>^2` is the unconjugated square, the holomorphic continuation of the
//! real-exponent formula; the real-exponent version (`Mode::Mgf`) runs through
//! the same pipeline with `w_r = lambda_r`. Exponents are accumulated in the
//! log domain and exponentiated once.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GlobalGrid;
use crate::linalg::CVector;
use crate::problem::{validate, CFValue, Diagnostics, FactorRecord, FrequencyPoint, Mode, ProblemSpec};
use crate::riccati::{solve_riccati_recursive, RiccatiOptions, RiccatiPath, DEFAULT_BLOWUP_CAP};
use crate::transport::{mu_recursion, solve_all_transports, MuChain, TransportPath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Upper bound on the integration step; `None` picks the default grid.
    pub grid_step_override: Option<f64>,
    pub blowup_cap: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            grid_step_override: None,
            blowup_cap: DEFAULT_BLOWUP_CAP,
        }
    }
}

impl EvalConfig {
    pub fn with_step(step: f64) -> Self {
        EvalConfig {
            grid_step_override: Some(step),
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(h) = self.grid_step_override {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidConfig(format!("grid step must be positive, got {h}")));
            }
        }
        if !(self.blowup_cap > 0.0) {
            return Err(Error::InvalidConfig("blow-up cap must be positive".into()));
        }
        Ok(())
    }
}

/// Everything computed along the way, kept for inspection and testing.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub grid: GlobalGrid,
    pub riccati: Vec<RiccatiPath>,
    pub transports: Vec<TransportPath>,
    pub mu: MuChain,
    pub result: CFValue,
}

/// `int_{t_{j-1}}^{t_j} < M_j(s)^* H_j(t_j)^* mu_j >^2 ds` by composite Simpson.
pub fn quadratic_integral(j: usize, transport: &TransportPath, mu_j: &CVector, grid: &GlobalGrid) -> Complex64 {
    if mu_j.0.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Complex64::new(0.0, 0.0);
    }
    let v = transport.h_terminal().transpose_star().mul_vec(mu_j);
    grid.simpson(grid.time_index(j), grid.time_index(j + 1), |i| {
        transport.m_samples[i].transpose_star().mul_vec(&v).bilinear_square()
    })
}

/// Runs the full pipeline in whatever mode `pt` carries.
pub fn run_pipeline(spec: &ProblemSpec, pt: &FrequencyPoint, config: &EvalConfig) -> Result<Pipeline> {
    validate(spec, pt)?;
    config.validate()?;
    let grid = GlobalGrid::for_problem(spec, config.grid_step_override)?;
    let riccati = solve_riccati_recursive(
        spec,
        pt,
        &grid,
        RiccatiOptions {
            blowup_cap: config.blowup_cap,
        },
    )?;
    let transports = solve_all_transports(&riccati, spec, pt, &grid)?;
    let mu = mu_recursion(pt, &transports, &grid);

    let factors: Vec<FactorRecord> = (0..spec.n())
        .map(|j| FactorRecord {
            trace_integral: riccati[j].trace_integral,
            quadratic_integral: quadratic_integral(j, &transports[j], &mu.mu[j], &grid),
        })
        .collect();
    let diagnostics = Diagnostics {
        grid_step: grid.max_step(),
        steps: grid.total_steps(),
        max_k_norm: riccati.iter().map(|k| k.max_norm).fold(0.0, f64::max),
        max_transport_residual: transports.iter().map(|t| t.max_residual).fold(0.0, f64::max),
        modulus_exceeded: false,
    };
    let result = CFValue::from_factors(factors, diagnostics, pt.mode);
    Ok(Pipeline {
        grid,
        riccati,
        transports,
        mu,
        result,
    })
}

/// `E[exp(i sum <gamma_k, W_{t_k}> + i sum Lambda_k L^{A_k}_{t_k})]`.
pub fn eval_joint_cf(spec: &ProblemSpec, pt: &FrequencyPoint, config: &EvalConfig) -> Result<CFValue> {
    let pt = FrequencyPoint {
        mode: Mode::Characteristic,
        ..pt.clone()
    };
    Ok(run_pipeline(spec, &pt, config)?.result)
}

/// `E[exp(i sum <gamma_k, W_{t_k}> + sum lambda_k L^{A_k}_{t_k})]` for real `lambda`.
///
/// This is finite only for `lambda` in some neighbourhood of zero whose size
/// is not known in advance; leaving it shows up as [`Error::BlowUp`].
pub fn eval_real_mgf(spec: &ProblemSpec, pt: &FrequencyPoint, config: &EvalConfig) -> Result<CFValue> {
    let pt = FrequencyPoint {
        mode: Mode::Mgf,
        ..pt.clone()
    };
    Ok(run_pipeline(spec, &pt, config)?.result)
}

/// Dispatches on the point's mode.
pub fn evaluate(spec: &ProblemSpec, pt: &FrequencyPoint, config: &EvalConfig) -> Result<CFValue> {
    Ok(run_pipeline(spec, pt, config)?.result)
}
