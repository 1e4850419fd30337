//! Monte Carlo reference for the joint characteristic function.
//!
//! Brownian increments are exact Gaussians on a grid that refines every
//! observation time; each area `L^{A_k}` is the left-point Itô sum
//! `sum <A_k W_{s_i}, W_{s_{i+1}} - W_{s_i}>` up to `t_k`. Path `p` draws from
//! its own ChaCha stream keyed by `(seed, p)`, so results do not depend on
//! how paths are scheduled across threads.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{CFValue, FrequencyPoint, Mode, ProblemSpec};

pub const MIN_STEPS_PER_UNIT: usize = 64;
/// Rejection threshold in standard errors.
pub const Z_THRESHOLD: f64 = 4.0;
/// Allowance for time-discretization bias of the area sums.
pub const DISCRETIZATION_ALLOWANCE: f64 = 0.005;

/// `W_{t_k}` and `L^{A_k}_{t_k}` for one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub w: Vec<Vec<f64>>,
    pub areas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub samples: Vec<PathSample>,
    pub steps_per_unit: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: Complex64,
    /// Larger of the real and imaginary standard errors.
    pub std_error: f64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub n_paths: usize,
    pub steps_per_unit: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareReport {
    pub delta_re: f64,
    pub delta_im: f64,
    /// Combined standard error used for the z-scores.
    pub std_error: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub threshold: f64,
    pub allowance: f64,
    pub pass: bool,
}

/// Generates path `p` of the stream keyed by `seed`.
pub fn simulate_path(spec: &ProblemSpec, steps_per_unit: usize, seed: u64, p: u64) -> PathSample {
    let d = spec.d;
    let n = spec.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);

    // One running integral int <A W, dW> per distinct matrix; L^{A_k}_{t_k}
    // is that integral read off at t_k.
    let mut distinct: Vec<&[f64]> = Vec::new();
    let mut group = Vec::with_capacity(n);
    for m in &spec.matrices {
        let g = match distinct.iter().position(|x| *x == m.as_slice()) {
            Some(g) => g,
            None => {
                distinct.push(m);
                distinct.len() - 1
            }
        };
        group.push(g);
    }
    let mut last_use = vec![0; distinct.len()];
    for (k, &g) in group.iter().enumerate() {
        last_use[g] = k;
    }

    let mut w = vec![0.0; d];
    let mut dw = vec![0.0; d];
    let mut running = vec![0.0; distinct.len()];
    let mut areas = vec![0.0; n];
    let mut observed = Vec::with_capacity(n);

    for j in 0..n {
        let (a, b) = spec.interval(j);
        let steps = (((b - a) * steps_per_unit as f64) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let sd = ((b - a) / steps as f64).sqrt();
        let active: Vec<usize> = (0..distinct.len()).filter(|&g| last_use[g] >= j).collect();
        for _ in 0..steps {
            for x in dw.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *x = sd * z;
            }
            for &g in &active {
                let m = distinct[g];
                let mut acc = 0.0;
                for r in 0..d {
                    let mut aw = 0.0;
                    for c in 0..d {
                        aw += m[r * d + c] * w[c];
                    }
                    acc += aw * dw[r];
                }
                running[g] += acc;
            }
            for (x, y) in w.iter_mut().zip(&dw) {
                *x += y;
            }
        }
        areas[j] = running[group[j]];
        observed.push(w.clone());
    }
    PathSample { w: observed, areas }
}

/// Simulates `n_paths` paths; identical arguments give identical samples.
pub fn simulate_paths(spec: &ProblemSpec, n_paths: usize, steps_per_unit: usize, seed: u64) -> Result<PathSet> {
    spec.validate()?;
    if n_paths == 0 {
        return Err(Error::InvalidConfig("need at least one path".into()));
    }
    if steps_per_unit < MIN_STEPS_PER_UNIT {
        return Err(Error::InvalidConfig(format!(
            "steps per unit time must be at least {MIN_STEPS_PER_UNIT}, got {steps_per_unit}"
        )));
    }
    let samples = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| simulate_path(spec, steps_per_unit, seed, p))
        .collect();
    Ok(PathSet {
        samples,
        steps_per_unit,
        seed,
    })
}

/// Sample mean of the exponential functional over the paths, summed in path order.
pub fn empirical_cf(paths: &PathSet, pt: &FrequencyPoint) -> MCEstimate {
    let n = paths.samples.len();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq_re = 0.0;
    let mut sum_sq_im = 0.0;
    for s in &paths.samples {
        let phase: f64 = pt
            .gammas
            .iter()
            .zip(&s.w)
            .map(|(g, w)| g.iter().zip(w).map(|(a, b)| a * b).sum::<f64>())
            .sum();
        let area: f64 = pt.lambdas.iter().zip(&s.areas).map(|(l, a)| l * a).sum();
        let z = match pt.mode {
            Mode::Characteristic => Complex64::new(0.0, phase + area).exp(),
            Mode::Mgf => Complex64::new(area, phase).exp(),
        };
        sum += z;
        sum_sq_re += z.re * z.re;
        sum_sq_im += z.im * z.im;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let se = |sq: f64, m: f64| {
        if n < 2 {
            return 0.0;
        }
        let var = ((sq - nf * m * m) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    };
    let std_error_re = se(sum_sq_re, mean.re);
    let std_error_im = se(sum_sq_im, mean.im);
    MCEstimate {
        mean,
        std_error: std_error_re.max(std_error_im),
        std_error_re,
        std_error_im,
        n_paths: n,
        steps_per_unit: paths.steps_per_unit,
        seed: paths.seed,
    }
}

/// Compares two values with standard errors `se_a`, `se_b` (zero for exact values).
pub fn compare_values(a: Complex64, se_a: f64, b: Complex64, se_b: f64) -> CompareReport {
    let std_error = (se_a * se_a + se_b * se_b).sqrt();
    let delta = a - b;
    let z = |x: f64| {
        if x == 0.0 {
            0.0
        } else if std_error == 0.0 {
            f64::INFINITY.copysign(x)
        } else {
            x / std_error
        }
    };
    let bound = Z_THRESHOLD * std_error + DISCRETIZATION_ALLOWANCE;
    CompareReport {
        delta_re: delta.re,
        delta_im: delta.im,
        std_error,
        z_re: z(delta.re),
        z_im: z(delta.im),
        threshold: Z_THRESHOLD,
        allowance: DISCRETIZATION_ALLOWANCE,
        pass: delta.re.abs() <= bound && delta.im.abs() <= bound,
    }
}

/// Checks a deterministic value against a Monte Carlo estimate.
pub fn compare(reference: &CFValue, estimate: &MCEstimate) -> CompareReport {
    compare_values(reference.value, 0.0, estimate.mean, estimate.std_error)
}
