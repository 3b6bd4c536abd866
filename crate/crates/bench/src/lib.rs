//! Fixtures shared by the benchmarks in `benches/`.

use multipack_core::construction::{sample_code, FiniteCode, SampleParams};
use multipack_core::PointList;

/// `size` uniform points on `[-K, K]^dim` with the given list parameters.
pub fn cube_code(dim: usize, list_len: usize, noise: f64, half_width: f64, size: usize, seed: u64) -> FiniteCode {
    sample_code(SampleParams { dim, list_len, noise, half_width, rate_margin: 0.0, seed, size: Some(size) })
        .expect("valid fixture parameters")
}

/// A list of `len` uniform points on `[-1, 1]^dim`.
pub fn random_list(len: usize, dim: usize, seed: u64) -> PointList {
    PointList::new(cube_code(dim, 2, 0.1, 1.0, len, seed).points).expect("valid list")
}
