//! Finite-dimensional joint characteristic function of a `d`-dimensional
//! Brownian motion `W` together with generalized Lévy areas
//! `L^A_t = int_0^t <A W_s, dW_s>` for arbitrary real matrices `A`.
//!
//! The numerical route ([`engine`]) solves a backward recursive system of
//! symmetric matrix Riccati equations ([`riccati`]) and independent linear
//! transport equations ([`transport`]) on a shared grid. For the planar area
//! [`levy2d`] evaluates the same quantity in closed form, and [`mc`] provides
//! a Monte Carlo reference.
//!
//! The formulas are first derived for real exponents, where they hold for
//! small `lambda`, and extended to `i Lambda` by analytic continuation; this is
//! why transposes never conjugate and vector squares are bilinear.

pub mod engine;
pub mod error;
pub mod grid;
pub mod levy2d;
pub mod linalg;
pub mod mc;
pub mod problem;
pub mod quad;
pub mod riccati;
pub mod transport;

pub use engine::{eval_joint_cf, eval_real_mgf, evaluate, run_pipeline, EvalConfig, Pipeline};
pub use error::{Error, Result};
pub use grid::GlobalGrid;
pub use levy2d::{area_product_formula, eval_joint_cf_2d, scalar_chain, ScalarChain, SKEW_GENERATOR};
pub use linalg::{bilinear_square, transpose_star, CMatrix, CVector};
pub use mc::{compare, compare_values, empirical_cf, simulate_paths, CompareReport, MCEstimate, PathSample, PathSet};
pub use problem::{validate, CFValue, Diagnostics, FactorRecord, FrequencyPoint, Mode, ProblemSpec};
pub use riccati::RiccatiPath;
pub use transport::{MuChain, TransportPath};

pub use num_complex::Complex64;
