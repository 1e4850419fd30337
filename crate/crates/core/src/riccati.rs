//! Recursive system of symmetric matrix Riccati equations.
//!
//! For `j = n-1, ..., 0` (zero-based) the path `K_j` on `[0, t_j]` solves
//!
//! ```text
//! K_j' = C_j - K_j (P_j + L_j) - (P_j + L_j)^* K_j - K_j^2,   K_j(t_j) = 0,
//! P_j  = sum_{r>j} K_r,   L_j = sum_{r>=j} w_r A_r,
//! C_j  = -w_j^2 A_j^* A_j - w_j [ (P_j + S_j^*) A_j + A_j^* (P_j + S_j) ],
//! S_j  = sum_{r>j} w_r A_r,
//! ```
//!
//! where `w_r = i Lambda_r` for the characteristic function and `w_r = lambda_r`
//! for the real-exponent functional. With `w = i Lambda` the constant term is
//! `Lambda_j^2 A_j^* A_j - i Lambda_j [...]`.
//!
//! Every equation is integrated backward with classical RK4 on the shared
//! grid. Midpoint samples come from the cubic Hermite interpolant of each
//! step, so later equations read earlier paths at stage times without any
//! further interpolation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GlobalGrid;
use crate::linalg::CMatrix;
use crate::problem::{FrequencyPoint, ProblemSpec};

/// Default cap on `|K|_inf` before the solve is abandoned.
pub const DEFAULT_BLOWUP_CAP: f64 = 1e8;

/// Sampled solution `K_j` on `[0, t_j]`.
#[derive(Debug, Clone)]
pub struct RiccatiPath {
    pub j: usize,
    /// Values at half indices `0..=grid.time_index(j + 1)`.
    pub samples: Vec<CMatrix>,
    /// `int_0^{t_j} Tr K_j(s) ds`.
    pub trace_integral: Complex64,
    pub max_norm: f64,
}

impl RiccatiPath {
    /// Sample at a half index.
    pub fn at(&self, half_index: usize, grid: &GlobalGrid) -> Result<&CMatrix> {
        self.samples.get(half_index).ok_or(Error::GridMiss {
            path: self.j,
            t: grid.points().get(half_index).copied().unwrap_or(f64::NAN),
        })
    }

    /// Sample at a time that lies on the grid.
    pub fn at_time(&self, t: f64, grid: &GlobalGrid) -> Result<&CMatrix> {
        let idx = grid
            .index_of(t)
            .ok_or(Error::GridMiss { path: self.j, t })?;
        self.samples
            .get(idx)
            .ok_or(Error::GridMiss { path: self.j, t })
    }

    pub fn terminal(&self) -> &CMatrix {
        self.samples.last().expect("paths are never empty")
    }
}

/// `sum_{r in range} w_r A_r`, optionally transposed.
fn weighted_sum(spec: &ProblemSpec, pt: &FrequencyPoint, from: usize, star: bool) -> CMatrix {
    let mut acc = CMatrix::zeros(spec.d);
    for r in from..spec.n() {
        let a = spec.matrix(r);
        let a = if star { a.transpose_star() } else { a };
        acc += &a.scale(pt.weight(r));
    }
    acc
}

fn constant_term(
    weight: Complex64,
    a: &CMatrix,
    a_star: &CMatrix,
    prior: &CMatrix,
    later: &CMatrix,
    later_star: &CMatrix,
) -> CMatrix {
    let left = &(prior + later_star) * a;
    let right = a_star * &(prior + later);
    let quad = (a_star * a).scale(-(weight * weight));
    &quad - &(&left + &right).scale(weight)
}

/// Constant term `C_j` at the grid point `half_index`.
///
/// `prior` must hold the already-solved paths `K_r` for `r > j`.
pub fn assemble_c(
    j: usize,
    half_index: usize,
    prior: &[RiccatiPath],
    spec: &ProblemSpec,
    pt: &FrequencyPoint,
    grid: &GlobalGrid,
) -> Result<CMatrix> {
    if half_index > grid.time_index(j + 1) {
        return Err(Error::GridMiss {
            path: j,
            t: grid.points().get(half_index).copied().unwrap_or(f64::NAN),
        });
    }
    let mut p = CMatrix::zeros(spec.d);
    for path in prior.iter().filter(|k| k.j > j) {
        p += path.at(half_index, grid)?;
    }
    let a = spec.matrix(j);
    let a_star = a.transpose_star();
    let later = weighted_sum(spec, pt, j + 1, false);
    let later_star = weighted_sum(spec, pt, j + 1, true);
    Ok(constant_term(pt.weight(j), &a, &a_star, &p, &later, &later_star))
}

/// Options for the backward Riccati sweep.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiOptions {
    pub blowup_cap: f64,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        RiccatiOptions {
            blowup_cap: DEFAULT_BLOWUP_CAP,
        }
    }
}

/// Solves the whole recursive system; the result is indexed by `j`.
pub fn solve_riccati_recursive(
    spec: &ProblemSpec,
    pt: &FrequencyPoint,
    grid: &GlobalGrid,
    opts: RiccatiOptions,
) -> Result<Vec<RiccatiPath>> {
    let n = spec.n();
    let d = spec.d;
    // Running sum of solved paths, sum_{r>j} K_r, at every half index.
    let mut prior_sum = vec![CMatrix::zeros(d); grid.time_index(n) + 1];
    let mut paths: Vec<Option<RiccatiPath>> = vec![None; n];

    for j in (0..n).rev() {
        let last = grid.time_index(j + 1);
        let a = spec.matrix(j);
        let a_star = a.transpose_star();
        let w = pt.weight(j);
        let later = weighted_sum(spec, pt, j + 1, false);
        let later_star = weighted_sum(spec, pt, j + 1, true);
        let linear = &later + &a.scale(w);
        let linear_star = &later_star + &a_star.scale(w);

        // Coefficients Q = P + L, Q^* = P + L^*, and C at each half index.
        let q: Vec<CMatrix> = prior_sum[..=last].iter().map(|p| p + &linear).collect();
        let q_star: Vec<CMatrix> = prior_sum[..=last].iter().map(|p| p + &linear_star).collect();
        let c: Vec<CMatrix> = prior_sum[..=last]
            .iter()
            .map(|p| constant_term(w, &a, &a_star, p, &later, &later_star))
            .collect();

        // Derivative in reversed time tau = t_j - t.
        let rev = |k: &CMatrix, i: usize| -> CMatrix {
            let f = &(&(&c[i] - &(k * &q[i])) - &(&q_star[i] * k)) - &(k * k);
            -&f
        };

        let mut samples = vec![CMatrix::zeros(d); last + 1];
        let mut k = CMatrix::zeros(d);
        let mut slope = rev(&k, last);
        let mut max_norm = 0.0f64;
        let mut i = last;
        while i > 0 {
            let h = grid.point(i) - grid.point(i - 2);
            let k1 = slope;
            let k2 = rev(&k.add_scaled(0.5 * h, &k1), i - 1);
            let k3 = rev(&k.add_scaled(0.5 * h, &k2), i - 1);
            let k4 = rev(&k.add_scaled(h, &k3), i - 2);
            let mut incr = k1.clone();
            incr += &k2.scale_real(2.0);
            incr += &k3.scale_real(2.0);
            incr += &k4;
            let next = k.add_scaled(h / 6.0, &incr);

            let norm = next.norm_inf();
            if !next.is_finite() || norm > opts.blowup_cap {
                return Err(Error::BlowUp {
                    j,
                    t: grid.point(i - 2),
                    norm: if norm.is_finite() { norm } else { f64::INFINITY },
                });
            }
            max_norm = max_norm.max(norm);

            let next_slope = rev(&next, i - 2);
            let mut mid = (&k + &next).scale_real(0.5);
            mid += &(&k1 - &next_slope).scale_real(h / 8.0);
            samples[i - 1] = mid;
            samples[i - 2] = next.clone();
            k = next;
            slope = next_slope;
            i -= 2;
        }

        let trace_integral = grid.simpson(0, last, |i| samples[i].trace());
        for (acc, s) in prior_sum.iter_mut().zip(&samples) {
            *acc += s;
        }
        paths[j] = Some(RiccatiPath {
            j,
            samples,
            trace_integral,
            max_norm,
        });
    }
    Ok(paths.into_iter().map(|p| p.expect("all paths solved")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Mode;

    const SKEW: [f64; 4] = [0.0, -1.0, 1.0, 0.0];

    fn skew_problem(times: Vec<f64>, lambdas: Vec<f64>) -> (ProblemSpec, FrequencyPoint) {
        let spec = ProblemSpec::with_common_matrix(2, times, SKEW.to_vec());
        let pt = FrequencyPoint::area_only(&spec, lambdas);
        (spec, pt)
    }

    #[test]
    fn constant_term_for_last_index_is_scaled_identity() {
        let (spec, pt) = skew_problem(vec![1.0], vec![1.3]);
        let grid = GlobalGrid::for_problem(&spec, None).unwrap();
        let c = assemble_c(0, 0, &[], &spec, &pt, &grid).unwrap();
        let expected = CMatrix::identity(2).scale_real(1.3 * 1.3);
        assert!((&c - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn zero_frequencies_give_zero_constant_term() {
        let spec = ProblemSpec::new(
            3,
            vec![0.5, 1.0],
            vec![vec![0.3, -1.0, 2.0, 0.1, 0.0, 0.4, -0.7, 0.2, 1.0]; 2],
        );
        let pt = FrequencyPoint::zero(&spec, Mode::Characteristic);
        let grid = GlobalGrid::for_problem(&spec, None).unwrap();
        let paths = solve_riccati_recursive(&spec, &pt, &grid, Default::default()).unwrap();
        for j in 0..2 {
            assert_eq!(assemble_c(j, 4, &paths, &spec, &pt, &grid).unwrap(), CMatrix::zeros(3));
            assert!(paths[j].samples.iter().all(|k| k.max_abs() == 0.0));
            assert_eq!(paths[j].trace_integral, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn constant_term_for_two_skew_observations() {
        // K_2 = k I and A skew: the k terms cancel since A + A^* = 0,
        // leaving C_1 = (L1^2 + 2 L1 L2) I.
        let (l1, l2) = (0.7, -0.3);
        let (spec, pt) = skew_problem(vec![0.5, 1.0], vec![l1, l2]);
        let grid = GlobalGrid::for_problem(&spec, None).unwrap();
        let paths = solve_riccati_recursive(&spec, &pt, &grid, Default::default()).unwrap();
        let idx = grid.time_index(1) / 2;
        let c = assemble_c(0, idx, &paths, &spec, &pt, &grid).unwrap();
        let expected = CMatrix::identity(2).scale_real(l1 * l1 + 2.0 * l1 * l2);
        assert!((&c - &expected).max_abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn grid_miss_beyond_path_end() {
        let (spec, pt) = skew_problem(vec![0.5, 1.0], vec![1.0, 1.0]);
        let grid = GlobalGrid::for_problem(&spec, None).unwrap();
        let paths = solve_riccati_recursive(&spec, &pt, &grid, Default::default()).unwrap();
        let beyond = grid.time_index(1) + 1;
        assert!(matches!(
            assemble_c(0, beyond, &paths, &spec, &pt, &grid),
            Err(Error::GridMiss { .. })
        ));
        assert!(paths[0].at(beyond, &grid).is_err());
        assert!(paths[0].at_time(0.123456789, &grid).is_err());
        assert!(paths[1].at_time(0.75, &grid).is_ok());
    }

    #[test]
    fn single_observation_matches_tanh() {
        let (spec, pt) = skew_problem(vec![1.0], vec![1.0]);
        let grid = GlobalGrid::for_problem(&spec, None).unwrap();
        let paths = solve_riccati_recursive(&spec, &pt, &grid, Default::default()).unwrap();
        let k = &paths[0];
        assert_eq!(k.terminal(), &CMatrix::zeros(2));
        let k0 = k.samples[0][(0, 0)];
        assert!((k0.re + 1f64.tanh()).abs() < 1e-12, "{k0}");
        assert!(k0.im.abs() < 1e-12);
        let expected = -2.0 * 1f64.cosh().ln();
        assert!((k.trace_integral.re - expected).abs() < 1e-12);
        // midpoint samples too
        for (i, s) in k.samples.iter().enumerate() {
            let t = grid.point(i);
            let exact = (t - 1.0).tanh();
            assert!((s[(0, 0)].re - exact).abs() < 1e-11);
            assert!(s[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn real_mode_blows_up_for_large_lambda() {
        let spec = ProblemSpec::with_common_matrix(2, vec![1.0], SKEW.to_vec());
        let pt = FrequencyPoint::mgf(vec![vec![0.0; 2]], vec![10.0]);
        let grid = GlobalGrid::for_problem(&spec, None).unwrap();
        let err = solve_riccati_recursive(&spec, &pt, &grid, Default::default()).unwrap_err();
        match err {
            // first pole of tan(10 (1 - t)) is at t = 1 - pi/20
            Error::BlowUp { j: 0, t, .. } => {
                assert!((t - (1.0 - std::f64::consts::PI / 20.0)).abs() < 0.01, "t = {t}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
