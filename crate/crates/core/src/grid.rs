//! Shared integration grid.
//!
//! Each interval `[t_{j-1}, t_j]` is split into equal steps, so every
//! observation time is a node and every path on `[0, t_j]` lives on a prefix
//! of the same grid. Samples are addressed by "half index": even indices are
//! nodes, odd indices the step midpoints.

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Nominal number of steps across `[0, t_n]`.
pub const DEFAULT_TOTAL_STEPS: usize = 4096;
/// Floor on steps per observation interval.
pub const MIN_STEPS_PER_INTERVAL: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalGrid {
    points: Vec<f64>,
    /// Half index of `t_0 = 0, t_1, ..., t_n`.
    time_index: Vec<usize>,
}

impl GlobalGrid {
    /// Default grid, or one whose step does not exceed `step_override`.
    pub fn for_problem(spec: &ProblemSpec, step_override: Option<f64>) -> Result<Self> {
        let horizon = spec.horizon();
        let nominal = match step_override {
            Some(h) if !(h > 0.0 && h.is_finite()) => {
                return Err(Error::InvalidConfig(format!("grid step must be positive, got {h}")));
            }
            Some(h) => h,
            None => horizon / DEFAULT_TOTAL_STEPS as f64,
        };
        let steps: Vec<usize> = (0..spec.n())
            .map(|j| {
                let (a, b) = spec.interval(j);
                let m = ((b - a) / nominal * (1.0 - 1e-12)).ceil() as usize;
                m.max(MIN_STEPS_PER_INTERVAL)
            })
            .collect();
        Self::with_steps(spec, &steps)
    }

    /// Grid with an explicit number of steps in each interval.
    pub fn with_steps(spec: &ProblemSpec, steps: &[usize]) -> Result<Self> {
        if steps.len() != spec.n() {
            return Err(Error::CountMismatch {
                what: "steps",
                expected: spec.n(),
                found: steps.len(),
            });
        }
        if steps.contains(&0) {
            return Err(Error::InvalidConfig("every interval needs at least one step".into()));
        }
        let total: usize = steps.iter().sum();
        let mut points = Vec::with_capacity(2 * total + 1);
        let mut time_index = Vec::with_capacity(spec.n() + 1);
        points.push(0.0);
        time_index.push(0);
        for (j, &m) in steps.iter().enumerate() {
            let (a, b) = spec.interval(j);
            let h = (b - a) / m as f64;
            let mut left = a;
            for k in 1..=m {
                let right = if k == m { b } else { a + k as f64 * h };
                points.push(0.5 * (left + right));
                points.push(right);
                left = right;
            }
            time_index.push(points.len() - 1);
        }
        Ok(GlobalGrid { points, time_index })
    }

    /// Half index of observation time `t_j`; `j = 0` is the origin.
    #[inline]
    pub fn time_index(&self, j: usize) -> usize {
        self.time_index[j]
    }

    #[inline]
    pub fn point(&self, half_index: usize) -> f64 {
        self.points[half_index]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn total_steps(&self) -> usize {
        (self.points.len() - 1) / 2
    }

    pub fn max_step(&self) -> f64 {
        self.points
            .windows(3)
            .step_by(2)
            .map(|w| w[2] - w[0])
            .fold(0.0, f64::max)
    }

    /// Half index of a time that sits on a node or midpoint.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let i = self.points.partition_point(|&p| p < t - 1e-12);
        (i < self.points.len() && (self.points[i] - t).abs() <= 1e-12).then_some(i)
    }

    /// Composite Simpson over steps from half index `lo` to `hi` (both even),
    /// with `f` evaluated at half indices.
    pub fn simpson<T, F>(&self, lo: usize, hi: usize, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default + Copy,
        F: FnMut(usize) -> T,
    {
        debug_assert!(lo % 2 == 0 && hi % 2 == 0 && lo <= hi);
        let mut acc = T::default();
        let mut left = f(lo);
        let mut i = lo;
        while i < hi {
            let mid = f(i + 1);
            let right = f(i + 2);
            let h = self.points[i + 2] - self.points[i];
            acc = acc + (left + mid * 4.0 + right) * (h / 6.0);
            left = right;
            i += 2;
        }
        acc
    }
}
