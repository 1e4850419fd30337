//! Fixed problems shared by the benchmarks under `benches/`.

use levyarea::{FrequencyPoint, ProblemSpec, SKEW_GENERATOR};

/// Planar skew area observed at `n` evenly spaced times up to 1.
pub fn skew_problem(n: usize) -> (ProblemSpec, FrequencyPoint) {
    let times = (1..=n).map(|k| k as f64 / n as f64).collect();
    let spec = ProblemSpec::with_common_matrix(2, times, SKEW_GENERATOR.to_vec());
    let gammas = (0..n).map(|k| vec![0.3 - 0.1 * k as f64, 0.2]).collect();
    let lambdas = (0..n).map(|k| if k % 2 == 0 { 0.8 } else { -0.5 }).collect();
    (spec, FrequencyPoint::characteristic(gammas, lambdas))
}

/// Dense `d x d` matrices that differ between observation times.
pub fn generic_problem(d: usize, n: usize) -> (ProblemSpec, FrequencyPoint) {
    let times = (1..=n).map(|k| k as f64 / n as f64).collect();
    let matrices = (0..n)
        .map(|k| {
            (0..d * d)
                .map(|i| ((i * 7 + k * 3) % 11) as f64 / 5.5 - 1.0)
                .collect()
        })
        .collect();
    let spec = ProblemSpec::new(d, times, matrices);
    let gammas = (0..n).map(|k| (0..d).map(|i| 0.1 * ((i + k) % 3) as f64).collect()).collect();
    let lambdas = (0..n).map(|k| 0.5 + 0.2 * k as f64).collect();
    (spec, FrequencyPoint::characteristic(gammas, lambdas))
}
