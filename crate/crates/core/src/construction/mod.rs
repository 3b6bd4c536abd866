//! Random coding with expurgation on a cube, and the periodic constellation
//! obtained by tiling the expurgated code with a guard gap.

mod code;
mod constellation;
mod lists;

pub use code::{achieved_rate, default_half_width, sample_code, FiniteCode, SampleParams, ENUMERATION_BUDGET};
pub use constellation::{
    asymptotic_gap, density_report, enumerate_window, min_safe_gap, tile, verify_code, verify_packing, Constellation,
    DensityReport, Verdict, WindowPoint, MAX_WINDOW_TILES,
};
pub use lists::{expurgate, find_bad_lists, lists_below};

/// `C(m, k)` as a float, for budget checks.
pub fn binomial(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    let k = k.min(m - k);
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}
