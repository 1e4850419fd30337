//! Linear transport equations `H_j' = Q_j H_j`, `H_j(0) = I`, with
//! `Q_j = sum_{r>=j} K_r + sum_{r>=j} w_r A_r`, and the frequency recursion
//! that carries each `gamma` back through them.
//!
//! The inverse `M_j = H_j^{-1}` is integrated alongside `H_j` from
//! `M_j' = -M_j Q_j`, sharing the same coefficient samples, so no pointwise
//! elimination is needed when the quadratic integrals ask for `H^{*-1}`.

use crate::error::{Error, Result};
use crate::grid::GlobalGrid;
use crate::linalg::{CMatrix, CVector};
use crate::problem::{FrequencyPoint, ProblemSpec};
use crate::riccati::RiccatiPath;

/// Threshold on `|H| |M|` beyond which products with `H^{*-1}` are untrustworthy.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone)]
pub struct TransportPath {
    pub j: usize,
    /// `H_j` at half indices `0..=grid.time_index(j + 1)`.
    pub h_samples: Vec<CMatrix>,
    /// `H_j^{-1}` at the same points.
    pub m_samples: Vec<CMatrix>,
    /// Worst `|H M - I|_inf` over the stored samples.
    pub max_residual: f64,
}

impl TransportPath {
    pub fn h_terminal(&self) -> &CMatrix {
        self.h_samples.last().expect("paths are never empty")
    }
}

/// Frequencies carried back through the transport paths.
#[derive(Debug, Clone, PartialEq)]
pub struct MuChain {
    pub mu: Vec<CVector>,
}

fn coefficient(
    j: usize,
    i: usize,
    riccati: &[RiccatiPath],
    linear: &CMatrix,
    grid: &GlobalGrid,
) -> Result<CMatrix> {
    let mut q = linear.clone();
    for path in &riccati[j..] {
        q += path.at(i, grid)?;
    }
    Ok(q)
}

/// Integrates `H_j` and `M_j` forward over `[0, t_j]`.
pub fn solve_transport(
    j: usize,
    riccati: &[RiccatiPath],
    spec: &ProblemSpec,
    pt: &FrequencyPoint,
    grid: &GlobalGrid,
) -> Result<TransportPath> {
    let d = spec.d;
    let last = grid.time_index(j + 1);
    let mut linear = CMatrix::zeros(d);
    for r in j..spec.n() {
        linear += &spec.matrix(r).scale(pt.weight(r));
    }
    let q: Vec<CMatrix> = (0..=last)
        .map(|i| coefficient(j, i, riccati, &linear, grid))
        .collect::<Result<_>>()?;

    let identity = CMatrix::identity(d);
    let mut h_samples = vec![CMatrix::zeros(d); last + 1];
    let mut m_samples = vec![CMatrix::zeros(d); last + 1];
    h_samples[0] = identity.clone();
    m_samples[0] = identity.clone();

    let mut h = identity.clone();
    let mut m = identity.clone();
    let mut dh = &q[0] * &h;
    let mut dm = -&(&m * &q[0]);
    let mut max_residual = 0.0f64;

    let mut i = 0;
    while i < last {
        let step = grid.point(i + 2) - grid.point(i);
        let (qm, qb) = (&q[i + 1], &q[i + 2]);

        let a1 = dh.clone();
        let b1 = dm.clone();
        let a2 = qm * &h.add_scaled(0.5 * step, &a1);
        let b2 = -&(&m.add_scaled(0.5 * step, &b1) * qm);
        let a3 = qm * &h.add_scaled(0.5 * step, &a2);
        let b3 = -&(&m.add_scaled(0.5 * step, &b2) * qm);
        let a4 = qb * &h.add_scaled(step, &a3);
        let b4 = -&(&m.add_scaled(step, &b3) * qb);

        let mut inc_h = a1.clone();
        inc_h += &a2.scale_real(2.0);
        inc_h += &a3.scale_real(2.0);
        inc_h += &a4;
        let mut inc_m = b1.clone();
        inc_m += &b2.scale_real(2.0);
        inc_m += &b3.scale_real(2.0);
        inc_m += &b4;
        let h_next = h.add_scaled(step / 6.0, &inc_h);
        let m_next = m.add_scaled(step / 6.0, &inc_m);

        let product = h_next.norm_inf() * m_next.norm_inf();
        if !(product <= CONDITION_LIMIT) {
            return Err(Error::IllConditioned {
                j,
                t: grid.point(i + 2),
                product,
            });
        }

        let dh_next = qb * &h_next;
        let dm_next = -&(&m_next * qb);

        let mut h_mid = (&h + &h_next).scale_real(0.5);
        h_mid += &(&a1 - &dh_next).scale_real(step / 8.0);
        let mut m_mid = (&m + &m_next).scale_real(0.5);
        m_mid += &(&b1 - &dm_next).scale_real(step / 8.0);

        for (hs, ms) in [(&h_mid, &m_mid), (&h_next, &m_next)] {
            let residual = (&(hs * ms) - &identity).norm_inf();
            max_residual = max_residual.max(residual);
        }

        h_samples[i + 1] = h_mid;
        m_samples[i + 1] = m_mid;
        h_samples[i + 2] = h_next.clone();
        m_samples[i + 2] = m_next.clone();
        h = h_next;
        m = m_next;
        dh = dh_next;
        dm = dm_next;
        i += 2;
    }

    Ok(TransportPath {
        j,
        h_samples,
        m_samples,
        max_residual,
    })
}

/// All `n` transport paths; they are independent of one another.
pub fn solve_all_transports(
    riccati: &[RiccatiPath],
    spec: &ProblemSpec,
    pt: &FrequencyPoint,
    grid: &GlobalGrid,
) -> Result<Vec<TransportPath>> {
    (0..spec.n())
        .map(|j| solve_transport(j, riccati, spec, pt, grid))
        .collect()
}

/// `mu_{n-1} = gamma_{n-1}`,
/// `mu_j = gamma_j + M_{j+1}(t_j)^* H_{j+1}(t_{j+1})^* mu_{j+1}`.
pub fn mu_recursion(pt: &FrequencyPoint, transports: &[TransportPath], grid: &GlobalGrid) -> MuChain {
    let n = pt.gammas.len();
    let mut mu = vec![CVector::zeros(0); n];
    mu[n - 1] = pt.gamma(n - 1);
    for j in (0..n - 1).rev() {
        let next = &transports[j + 1];
        let carried = next.h_terminal().transpose_star().mul_vec(&mu[j + 1]);
        let at_tj = &next.m_samples[grid.time_index(j + 1)];
        let carried = at_tj.transpose_star().mul_vec(&carried);
        mu[j] = &pt.gamma(j) + &carried;
    }
    MuChain { mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Mode;
    use crate::riccati::solve_riccati_recursive;
    use num_complex::Complex64;

    const SKEW: [f64; 4] = [0.0, -1.0, 1.0, 0.0];

    fn solve(spec: &ProblemSpec, pt: &FrequencyPoint) -> (GlobalGrid, Vec<RiccatiPath>, Vec<TransportPath>) {
        let grid = GlobalGrid::for_problem(spec, None).unwrap();
        let k = solve_riccati_recursive(spec, pt, &grid, Default::default()).unwrap();
        let t = solve_all_transports(&k, spec, pt, &grid).unwrap();
        (grid, k, t)
    }

    #[test]
    fn zero_frequencies_leave_identity() {
        let spec = ProblemSpec::new(
            3,
            vec![0.4, 1.1, 2.0],
            vec![vec![0.2, 1.0, -0.5, 0.3, 0.0, 0.9, -1.2, 0.1, 0.7]; 3],
        );
        let mut pt = FrequencyPoint::zero(&spec, Mode::Characteristic);
        pt.gammas = vec![vec![0.1, 0.2, 0.3], vec![-1.0, 0.5, 0.0], vec![0.25, 0.25, -0.75]];
        let (grid, _, transports) = solve(&spec, &pt);
        for tp in &transports {
            assert!(tp.h_samples.iter().all(|h| *h == CMatrix::identity(3)));
            assert!(tp.m_samples.iter().all(|m| *m == CMatrix::identity(3)));
        }
        let chain = mu_recursion(&pt, &transports, &grid);
        let suffix = |j: usize| -> Vec<f64> {
            (0..3).map(|c| pt.gammas[j..].iter().map(|g| g[c]).sum()).collect()
        };
        for j in 0..3 {
            let expected = CVector::from_real(&suffix(j));
            assert!((&chain.mu[j] - &expected).max_abs() < 1e-15);
        }
    }

    #[test]
    fn single_observation_base_case() {
        let spec = ProblemSpec::with_common_matrix(2, vec![1.0], SKEW.to_vec());
        let pt = FrequencyPoint::characteristic(vec![vec![0.3, -0.8]], vec![0.9]);
        let (grid, _, transports) = solve(&spec, &pt);
        assert_eq!(mu_recursion(&pt, &transports, &grid).mu[0], pt.gamma(0));
    }

    #[test]
    fn skew_transport_matches_rotation_form() {
        // H(t) = e^{a(t)} [[cosh t, -i sinh t], [i sinh t, cosh t]] with
        // a(t) = int_0^t tanh(u - 1) du = ln cosh(t - 1) - ln cosh 1.
        let spec = ProblemSpec::with_common_matrix(2, vec![1.0], SKEW.to_vec());
        let pt = FrequencyPoint::area_only(&spec, vec![1.0]);
        let (grid, _, transports) = solve(&spec, &pt);
        let tp = &transports[0];
        assert_eq!(tp.h_samples[0], CMatrix::identity(2));
        for (idx, h) in tp.h_samples.iter().enumerate().step_by(37) {
            let t = grid.point(idx);
            let ea = ((t - 1.0).cosh() / 1f64.cosh()).ln().exp();
            let (ch, sh) = (t.cosh() * ea, t.sinh() * ea);
            let expected = CMatrix::from_rows(&[
                vec![Complex64::new(ch, 0.0), Complex64::new(0.0, -sh)],
                vec![Complex64::new(0.0, sh), Complex64::new(ch, 0.0)],
            ]);
            assert!((h - &expected).max_abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn inverse_path_tracks_h() {
        let spec = ProblemSpec::new(
            3,
            vec![0.3, 0.8, 1.5],
            vec![
                vec![0.5, -1.0, 0.2, 0.7, 0.1, -0.4, 0.0, 0.9, -0.3],
                vec![0.0, 1.0, 0.0, -1.0, 0.0, 0.5, 0.0, -0.5, 0.0],
                vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            ],
        );
        let pt = FrequencyPoint::characteristic(vec![vec![0.1, -0.2, 0.3]; 3], vec![0.8, -1.1, 0.6]);
        let (_, _, transports) = solve(&spec, &pt);
        for tp in &transports {
            assert!(tp.max_residual <= 1e-8, "residual {}", tp.max_residual);
        }
    }

    #[test]
    fn equal_skew_transport_commutes() {
        let spec = ProblemSpec::with_common_matrix(2, vec![0.5, 1.2], SKEW.to_vec());
        let pt = FrequencyPoint::area_only(&spec, vec![0.7, -1.3]);
        let (_, _, transports) = solve(&spec, &pt);
        for tp in &transports {
            let n = tp.h_samples.len();
            for (a, b) in [(1, n - 1), (n / 3, n / 2), (5, 2 * n / 3)] {
                let (ha, hb) = (&tp.h_samples[a], &tp.h_samples[b]);
                assert!((&(ha * hb) - &(hb * ha)).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mu_agrees_with_pointwise_inverse() {
        let spec = ProblemSpec::with_common_matrix(2, vec![0.6, 1.4], SKEW.to_vec());
        let pt = FrequencyPoint::characteristic(vec![vec![0.4, -0.3], vec![1.0, 0.5]], vec![1.7, -0.45]);
        let (grid, _, transports) = solve(&spec, &pt);
        let chain = mu_recursion(&pt, &transports, &grid);

        let next = &transports[1];
        let h_tj = &next.h_samples[grid.time_index(1)];
        let h_inv_star = h_tj.transpose_star().inverse().unwrap();
        let carried = h_inv_star.mul_vec(&next.h_terminal().transpose_star().mul_vec(&pt.gamma(1)));
        let direct = &pt.gamma(0) + &carried;
        assert!((&chain.mu[0] - &direct).max_abs() < 1e-8);
    }
}
