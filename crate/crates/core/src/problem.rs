//! Problem and frequency-point data model shared by every evaluator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Observation times `0 < t_1 < ... < t_n` with one real `d x d` matrix per time.
///
/// `t_0 = 0` is implicit and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub d: usize,
    pub times: Vec<f64>,
    /// Row-major `d * d` entries for each `A_k`.
    pub matrices: Vec<Vec<f64>>,
}

/// How the area frequencies enter the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// `E[exp(i<gamma, W> + i Lambda L)]`.
    #[default]
    Characteristic,
    /// `E[exp(i<gamma, W> + lambda L)]` with real `lambda`; finite only near zero.
    Mgf,
}

/// Frequencies `gamma_1..gamma_n` and `Lambda_1..Lambda_n` at which to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPoint {
    pub gammas: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub mode: Mode,
}

/// Per-observation contribution to the log of the result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorRecord {
    pub trace_integral: Complex64,
    pub quadratic_integral: Complex64,
}

impl FactorRecord {
    pub fn log_factor(&self) -> Complex64 {
        0.5 * self.trace_integral - 0.5 * self.quadratic_integral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Largest step of the integration grid (zero for closed-form results).
    pub grid_step: f64,
    pub steps: usize,
    pub max_k_norm: f64,
    /// Worst `|H M - I|` seen on the transport paths.
    pub max_transport_residual: f64,
    /// Set when a characteristic-mode value has modulus above `1 + 1e-9`.
    pub modulus_exceeded: bool,
}

/// A joint characteristic function (or MGF) value with its breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct CFValue {
    pub value: Complex64,
    pub factors: Vec<FactorRecord>,
    pub diagnostics: Diagnostics,
}

impl CFValue {
    /// Assembles the value from per-factor exponents in the log domain.
    pub fn from_factors(factors: Vec<FactorRecord>, mut diagnostics: Diagnostics, mode: Mode) -> Self {
        let log: Complex64 = factors.iter().map(FactorRecord::log_factor).sum();
        let value = log.exp();
        if mode == Mode::Characteristic && value.norm() > 1.0 + 1e-9 {
            diagnostics.modulus_exceeded = true;
        }
        CFValue {
            value,
            factors,
            diagnostics,
        }
    }

    /// Recomputes the value from the stored factors.
    pub fn reassemble(&self) -> Complex64 {
        self.factors
            .iter()
            .map(FactorRecord::log_factor)
            .sum::<Complex64>()
            .exp()
    }
}

impl ProblemSpec {
    pub fn new(d: usize, times: Vec<f64>, matrices: Vec<Vec<f64>>) -> Self {
        ProblemSpec { d, times, matrices }
    }

    /// Same matrix at every observation time.
    pub fn with_common_matrix(d: usize, times: Vec<f64>, matrix: Vec<f64>) -> Self {
        let matrices = vec![matrix; times.len()];
        ProblemSpec { d, times, matrices }
    }

    pub fn n(&self) -> usize {
        self.times.len()
    }

    /// `t_j` with the convention `t_{-1} = 0` for the first interval start.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        let start = if j == 0 { 0.0 } else { self.times[j - 1] };
        (start, self.times[j])
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn matrix(&self, j: usize) -> CMatrix {
        CMatrix::from_real(self.d, &self.matrices[j])
    }

    /// Checks the spec on its own, without a frequency point.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.times.is_empty() {
            return Err(Error::EmptyProblem);
        }
        let mut previous = 0.0;
        for (index, &t) in self.times.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::NonFiniteInput { what: "times", index });
            }
            if t <= previous {
                return Err(Error::NonIncreasingTimes {
                    index,
                    value: t,
                    previous,
                });
            }
            previous = t;
        }
        if self.matrices.len() != self.n() {
            return Err(Error::CountMismatch {
                what: "matrices",
                expected: self.n(),
                found: self.matrices.len(),
            });
        }
        for (index, m) in self.matrices.iter().enumerate() {
            if m.len() != self.d * self.d {
                return Err(Error::DimensionMismatch {
                    what: "matrices",
                    index,
                    expected: self.d * self.d,
                    found: m.len(),
                });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteInput {
                    what: "matrices",
                    index,
                });
            }
        }
        Ok(())
    }
}

impl FrequencyPoint {
    pub fn new(gammas: Vec<Vec<f64>>, lambdas: Vec<f64>, mode: Mode) -> Self {
        FrequencyPoint {
            gammas,
            lambdas,
            mode,
        }
    }

    pub fn characteristic(gammas: Vec<Vec<f64>>, lambdas: Vec<f64>) -> Self {
        Self::new(gammas, lambdas, Mode::Characteristic)
    }

    pub fn mgf(gammas: Vec<Vec<f64>>, lambdas: Vec<f64>) -> Self {
        Self::new(gammas, lambdas, Mode::Mgf)
    }

    /// The origin: all frequencies zero.
    pub fn zero(spec: &ProblemSpec, mode: Mode) -> Self {
        Self::new(vec![vec![0.0; spec.d]; spec.n()], vec![0.0; spec.n()], mode)
    }

    /// Only area frequencies, `gamma = 0`.
    pub fn area_only(spec: &ProblemSpec, lambdas: Vec<f64>) -> Self {
        Self::characteristic(vec![vec![0.0; spec.d]; spec.n()], lambdas)
    }

    /// Coefficient multiplying `A_r` in the exponent: `i Lambda_r` or `lambda_r`.
    pub fn weight(&self, r: usize) -> Complex64 {
        match self.mode {
            Mode::Characteristic => Complex64::new(0.0, self.lambdas[r]),
            Mode::Mgf => Complex64::new(self.lambdas[r], 0.0),
        }
    }

    pub fn gamma(&self, j: usize) -> CVector {
        CVector::from_real(&self.gammas[j])
    }

    /// Frequency point with every sign flipped.
    pub fn negated(&self) -> Self {
        FrequencyPoint {
            gammas: self
                .gammas
                .iter()
                .map(|g| g.iter().map(|x| -x).collect())
                .collect(),
            lambdas: self.lambdas.iter().map(|x| -x).collect(),
            mode: self.mode,
        }
    }
}

/// Checks that `spec` and `pt` are consistent and well formed.
pub fn validate(spec: &ProblemSpec, pt: &FrequencyPoint) -> Result<()> {
    spec.validate()?;
    if pt.gammas.len() != spec.n() {
        return Err(Error::CountMismatch {
            what: "gammas",
            expected: spec.n(),
            found: pt.gammas.len(),
        });
    }
    if pt.lambdas.len() != spec.n() {
        return Err(Error::CountMismatch {
            what: "lambdas",
            expected: spec.n(),
            found: pt.lambdas.len(),
        });
    }
    for (index, g) in pt.gammas.iter().enumerate() {
        if g.len() != spec.d {
            return Err(Error::DimensionMismatch {
                what: "gammas",
                index,
                expected: spec.d,
                found: g.len(),
            });
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput {
                what: "gammas",
                index,
            });
        }
    }
    if let Some(index) = pt.lambdas.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput {
            what: "lambdas",
            index,
        });
    }
    Ok(())
}
