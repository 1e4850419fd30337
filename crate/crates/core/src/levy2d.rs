//! Closed form for the planar Lévy area, `A = [[0, -1], [1, 0]]` at every time.
//!
//! For this generator each `K_j` is `k_j I` and the partial sums
//! `s_j = sum_{r>=j} k_r` obey the linear-term-free scalar Riccati equation
//! `s_j' = c_j^2 - s_j^2` with `c_j = sum_{r>=j} Lambda_r`. That gives
//!
//! ```text
//! s_j(t) = c_j (c_j sinh(c_j (t - t_j)) + s_j(t_j) cosh(..)) / (c_j cosh(..) + s_j(t_j) sinh(..))
//! E[exp(i sum Lambda_k L_{t_k})] = prod_j c_j / (c_j cosh(c_j (t_{j-1} - t_j)) + s_j(t_j) sinh(..))
//! H_j(t) = e^{a_j(t)} [[cosh(c_j t), -i sinh(c_j t)], [i sinh(c_j t), cosh(c_j t)]]
//! ```
//!
//! with rational limits when `c_j = 0`. Indices are zero-based throughout.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::problem::{validate, CFValue, Diagnostics, FactorRecord, FrequencyPoint, Mode, ProblemSpec};
use crate::quad::adaptive_simpson;

/// Below this `|c_j|` the rational (degenerate) formulas are used.
pub const DEGENERATE_EPS: f64 = 1e-12;
/// Normalized denominators smaller than this are reported as poles.
pub const POLE_EPS: f64 = 1e-14;
/// Absolute tolerance of the quadratic-factor quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// The planar rotation generator.
pub const SKEW_GENERATOR: [f64; 4] = [0.0, -1.0, 1.0, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarChain {
    pub times: Vec<f64>,
    /// `c_j = sum_{r>=j} Lambda_r`.
    pub c: Vec<f64>,
    /// `s_j(t_j)`.
    pub s_terminal: Vec<f64>,
    pub degenerate: Vec<bool>,
}

impl ScalarChain {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    fn start(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.times[j - 1]
        }
    }

    /// `c cosh(c u) + s sinh(c u)` divided by `c`, which stays finite as `c -> 0`.
    fn normalized_denominator(&self, j: usize, u: f64) -> f64 {
        let (c, s) = (self.c[j], self.s_terminal[j]);
        if self.degenerate[j] {
            1.0 + s * u
        } else {
            (c * (c * u).cosh() + s * (c * u).sinh()) / c
        }
    }

    /// `s_j(t)` for `t` in `[0, t_j]`.
    pub fn s_at(&self, j: usize, t: f64) -> Result<f64> {
        let (c, s) = (self.c[j], self.s_terminal[j]);
        let u = t - self.times[j];
        let denominator = self.normalized_denominator(j, u);
        if denominator.abs() < POLE_EPS {
            return Err(Error::PoleEncountered { j, denominator });
        }
        if self.degenerate[j] {
            Ok(s / denominator)
        } else {
            let cu = c * u;
            Ok(c * (c * cu.sinh() + s * cu.cosh()) / (c * cu.cosh() + s * cu.sinh()))
        }
    }

    /// `a_j(t) = int_0^t s_j(u) du`, the log of the scalar part of `H_j`.
    pub fn a_at(&self, j: usize, t: f64) -> Result<f64> {
        let num = self.normalized_denominator(j, t - self.times[j]);
        let den = self.normalized_denominator(j, -self.times[j]);
        for value in [num, den] {
            if !(value > POLE_EPS) {
                return Err(Error::PoleEncountered { j, denominator: value });
            }
        }
        Ok((num / den).ln())
    }

    /// The `j`-th factor of the area product.
    pub fn area_factor(&self, j: usize) -> Result<f64> {
        let denominator = self.normalized_denominator(j, self.start(j) - self.times[j]);
        if denominator.abs() < POLE_EPS {
            return Err(Error::PoleEncountered { j, denominator });
        }
        Ok(1.0 / denominator)
    }
}

/// Builds `c_j` and `s_j(t_j)` from the last observation backward.
pub fn scalar_chain(lambdas: &[f64], times: &[f64]) -> Result<ScalarChain> {
    let n = times.len();
    if n == 0 {
        return Err(Error::EmptyProblem);
    }
    if lambdas.len() != n {
        return Err(Error::CountMismatch {
            what: "lambdas",
            expected: n,
            found: lambdas.len(),
        });
    }
    let mut previous = 0.0;
    for (index, &t) in times.iter().enumerate() {
        if !(t > previous) {
            return Err(Error::NonIncreasingTimes {
                index,
                value: t,
                previous,
            });
        }
        previous = t;
    }

    let mut c = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        acc += lambdas[j];
        c[j] = acc;
    }
    let degenerate = c.iter().map(|x| x.abs() < DEGENERATE_EPS).collect();
    let mut chain = ScalarChain {
        times: times.to_vec(),
        c,
        s_terminal: vec![0.0; n],
        degenerate,
    };
    // s_{j-1}(t_{j-1}) = s_j(t_{j-1}) since k_{j-1}(t_{j-1}) = 0
    for j in (1..n).rev() {
        chain.s_terminal[j - 1] = chain.s_at(j, times[j - 1])?;
    }
    Ok(chain)
}

/// `E[exp(i sum_k Lambda_k L_{t_k})]` for the planar area `L = int <A W, dW>`.
pub fn area_product_formula(lambdas: &[f64], times: &[f64]) -> Result<Complex64> {
    let chain = scalar_chain(lambdas, times)?;
    let mut log = 0.0;
    for j in 0..chain.n() {
        log += chain.area_factor(j)?.ln();
    }
    Ok(Complex64::new(log.exp(), 0.0))
}

fn rotation(x: f64, sign: f64) -> CMatrix {
    let (ch, sh) = (Complex64::new(x.cosh(), 0.0), Complex64::new(0.0, sign * x.sinh()));
    CMatrix::from_rows(&[vec![ch, -sh], vec![sh, ch]])
}

/// Closed-form `H_j(t)`.
pub fn h_closed(j: usize, t: f64, chain: &ScalarChain) -> Result<CMatrix> {
    let a = chain.a_at(j, t)?;
    Ok(rotation(chain.c[j] * t, 1.0).scale_real(a.exp()))
}

/// Closed-form `H_j(t)^{-1}`.
pub fn h_inverse_closed(j: usize, t: f64, chain: &ScalarChain) -> Result<CMatrix> {
    let a = chain.a_at(j, t)?;
    Ok(rotation(chain.c[j] * t, -1.0).scale_real((-a).exp()))
}

pub fn a_eval(j: usize, t: f64, chain: &ScalarChain) -> Result<Complex64> {
    chain.a_at(j, t).map(|a| Complex64::new(a, 0.0))
}

/// Checks that the problem is the planar area with the standard generator.
pub fn check_levy2d(spec: &ProblemSpec) -> Result<()> {
    if spec.d != 2 {
        return Err(Error::NotLevy2d("dimension 2"));
    }
    if spec.matrices.iter().any(|m| m.as_slice() != SKEW_GENERATOR) {
        return Err(Error::NotLevy2d("every matrix to be [[0, -1], [1, 0]]"));
    }
    Ok(())
}

/// Joint characteristic function of `(W, L)` for the planar area, built from
/// the closed forms above. The trace entry of factor `j` holds
/// `2 ln(area factor j)`, the per-interval form of the trace integrals.
pub fn eval_joint_cf_2d(spec: &ProblemSpec, pt: &FrequencyPoint) -> Result<CFValue> {
    validate(spec, pt)?;
    check_levy2d(spec)?;
    if pt.mode != Mode::Characteristic {
        return Err(Error::InvalidConfig(
            "the closed form covers the characteristic function only".into(),
        ));
    }
    let chain = scalar_chain(&pt.lambdas, &spec.times)?;
    let n = spec.n();

    let mut mu = vec![CVector::zeros(2); n];
    mu[n - 1] = pt.gamma(n - 1);
    for j in (0..n - 1).rev() {
        let inv_star = h_inverse_closed(j + 1, spec.times[j], &chain)?.transpose_star();
        let h_star = h_closed(j + 1, spec.times[j + 1], &chain)?.transpose_star();
        mu[j] = &pt.gamma(j) + &(&inv_star * &h_star).mul_vec(&mu[j + 1]);
    }

    let mut factors = Vec::with_capacity(n);
    for (j, mu_j) in mu.iter().enumerate() {
        let area = chain.area_factor(j)?;
        let (lo, hi) = spec.interval(j);
        let quadratic = if mu_j.max_abs() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let v = h_closed(j, hi, &chain)?.transpose_star().mul_vec(mu_j);
            // the integrand only fails where a_at does, which chain construction has ruled out
            adaptive_simpson(
                |s| match h_inverse_closed(j, s, &chain) {
                    Ok(m) => m.transpose_star().mul_vec(&v).bilinear_square(),
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                },
                lo,
                hi,
                QUAD_TOL,
            )
        };
        if !(quadratic.re.is_finite() && quadratic.im.is_finite()) {
            return Err(Error::PoleEncountered {
                j,
                denominator: 0.0,
            });
        }
        factors.push(FactorRecord {
            trace_integral: Complex64::new(2.0 * area.ln(), 0.0),
            quadratic_integral: quadratic,
        });
    }
    Ok(CFValue::from_factors(factors, Diagnostics::default(), Mode::Characteristic))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(times: Vec<f64>) -> ProblemSpec {
        ProblemSpec::with_common_matrix(2, times, SKEW_GENERATOR.to_vec())
    }

    #[test]
    fn single_observation_chain() {
        let chain = scalar_chain(&[1.0], &[1.0]).unwrap();
        assert_eq!(chain.c, vec![1.0]);
        assert_eq!(chain.s_terminal, vec![0.0]);
        assert!(!chain.degenerate[0]);
        let v = area_product_formula(&[1.0], &[1.0]).unwrap();
        assert!((v.re - 1.0 / 1f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_head_uses_rational_branch() {
        let (t1, t2) = (0.5, 1.0);
        let chain = scalar_chain(&[1.0, -1.0], &[t1, t2]).unwrap();
        assert_eq!(chain.c, vec![0.0, -1.0]);
        assert!(chain.degenerate[0] && !chain.degenerate[1]);
        // s_1(t_1) from the hyperbolic formula with c = -1, s_2(t_2) = 0
        // c tanh(c (t_1 - t_2)) with c = -1
        assert!((chain.s_terminal[0] - (-(0.5f64.tanh()))).abs() < 1e-15);
        // degenerate factor 1 / (1 + s (t_0 - t_1))
        let f0 = chain.area_factor(0).unwrap();
        assert!((f0 - 1.0 / (1.0 - chain.s_terminal[0] * t1)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_branch_is_continuous() {
        let times = [0.7, 1.5];
        let exact = area_product_formula(&[1.3, -1.3], &times).unwrap();
        for (eps, tol) in [(1e-6, 1e-5), (1e-9, 1e-8)] {
            let near = area_product_formula(&[1.3 + eps, -1.3], &times).unwrap();
            assert!((near - exact).norm() < tol, "eps {eps}");
            let chain = scalar_chain(&[1.3 + eps, -1.3], &times).unwrap();
            assert!(!chain.degenerate[0]);
            let deg = scalar_chain(&[1.3, -1.3], &times).unwrap();
            for t in [0.0, 0.2, 0.7] {
                assert!((chain.s_at(0, t).unwrap() - deg.s_at(0, t).unwrap()).abs() < tol);
                assert!((chain.a_at(0, t).unwrap() - deg.a_at(0, t).unwrap()).abs() < tol);
            }
        }
    }

    #[test]
    fn zero_frequencies() {
        let v = area_product_formula(&[0.0, 0.0, 0.0], &[0.2, 0.5, 1.0]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn h_closed_at_origin_is_identity() {
        let chain = scalar_chain(&[0.4, -0.9, 1.6], &[0.2, 0.5, 1.0]).unwrap();
        for j in 0..3 {
            let h = h_closed(j, 0.0, &chain).unwrap();
            assert!((&h - &CMatrix::identity(2)).max_abs() < 1e-15);
            assert_eq!(a_eval(j, 0.0, &chain).unwrap(), Complex64::new(0.0, 0.0));
            let prod = &h_closed(j, 0.3, &chain).unwrap() * &h_inverse_closed(j, 0.3, &chain).unwrap();
            assert!((&prod - &CMatrix::identity(2)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_h_is_scalar() {
        let chain = scalar_chain(&[0.8, -0.8], &[0.4, 1.0]).unwrap();
        let h = h_closed(0, 0.3, &chain).unwrap();
        let s = chain.s_terminal[0];
        let a = ((1.0 + s * (0.3 - 0.4)) / (1.0 - s * 0.4)).ln();
        let expected = CMatrix::identity(2).scale_real(a.exp());
        assert!((&h - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn a_matches_integral_of_s() {
        let chain = scalar_chain(&[0.9, -0.2, 0.6], &[0.3, 0.8, 1.4]).unwrap();
        for j in 0..3 {
            let t = chain.times[j] * 0.8;
            let integral = adaptive_simpson(|u| chain.s_at(j, u).unwrap(), 0.0, t, 1e-13);
            assert!((chain.a_at(j, t).unwrap() - integral).abs() < 1e-11);
        }
    }

    #[test]
    fn joint_law_single_time() {
        // E[e^{i<g,W_t> + i L L_t}] = sech(L t) exp(-|g|^2 tanh(L t) / (2 L))
        let (lam, t) = (1.4, 0.9);
        let g = [0.7, -0.4];
        let spec = planar(vec![t]);
        let pt = FrequencyPoint::characteristic(vec![g.to_vec()], vec![lam]);
        let v = eval_joint_cf_2d(&spec, &pt).unwrap();
        let g2 = g[0] * g[0] + g[1] * g[1];
        let expected = (-g2 * (lam * t).tanh() / (2.0 * lam)).exp() / (lam * t).cosh();
        assert!((v.value.re - expected).abs() < 1e-10);
        assert!(v.value.im.abs() < 1e-12);
    }

    #[test]
    fn zero_gamma_reduces_to_area_product() {
        let spec = planar(vec![0.3, 0.9, 1.2]);
        let lambdas = vec![0.5, -1.2, 0.8];
        let pt = FrequencyPoint::area_only(&spec, lambdas.clone());
        let v = eval_joint_cf_2d(&spec, &pt).unwrap();
        let area = area_product_formula(&lambdas, &spec.times).unwrap();
        assert!((v.value - area).norm() < 1e-14);
    }

    #[test]
    fn zero_lambda_is_brownian() {
        let spec = planar(vec![0.4, 1.0]);
        let gammas = vec![vec![0.3, -0.6], vec![0.5, 0.2]];
        let pt = FrequencyPoint::characteristic(gammas, vec![0.0, 0.0]);
        let v = eval_joint_cf_2d(&spec, &pt).unwrap();
        let mu1 = [0.8f64, -0.4f64];
        let mu2 = [0.5f64, 0.2f64];
        let sq = |m: [f64; 2]| m[0] * m[0] + m[1] * m[1];
        let expected = (-0.5 * (sq(mu1) * 0.4 + sq(mu2) * 0.6)).exp();
        assert!((v.value.re - expected).abs() < 1e-10);
    }

    #[test]
    fn rejects_other_shapes() {
        let spec = ProblemSpec::with_common_matrix(3, vec![1.0], vec![0.0; 9]);
        let pt = FrequencyPoint::zero(&spec, Mode::Characteristic);
        assert!(matches!(eval_joint_cf_2d(&spec, &pt), Err(Error::NotLevy2d(_))));

        let spec = ProblemSpec::new(2, vec![0.5, 1.0], vec![SKEW_GENERATOR.to_vec(), vec![1.0, 0.0, 0.0, 1.0]]);
        let pt = FrequencyPoint::zero(&spec, Mode::Characteristic);
        assert!(matches!(eval_joint_cf_2d(&spec, &pt), Err(Error::NotLevy2d(_))));
    }
}
