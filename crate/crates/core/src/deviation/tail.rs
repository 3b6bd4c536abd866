//! Monte Carlo estimate of `P(avg_sq_radius(x_1..x_L) <= nN)` for `L` points
//! uniform on `[-K, K]^n`.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::beta::beta_reg;

use crate::rng::{self, Domain};
use crate::{Error, Result};

pub const MIN_TAIL_SAMPLES: u64 = 1_000;
/// Two-sided confidence level of the reported interval.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailParams {
    pub list_len: usize,
    pub dim: usize,
    pub half_width: f64,
    pub noise: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub params: TailParams,
    pub hits: u64,
    pub p_hat: f64,
    /// `-(1/n) ln p_hat`, or `-(1/n) ln ci_high` when there are no hits.
    pub exponent_hat: f64,
    /// Set when `hits == 0`: `exponent_hat` is then only a lower bound.
    pub exponent_is_lower_bound: bool,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub const TAIL_CSV_HEADER: &str = "L,n,K,N,samples,hits,p_hat,exponent_hat,ci_low,ci_high,seed";

impl TailEstimate {
    /// Binomial standard error of `p_hat`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.params.samples as f64).sqrt()
    }

    /// Exponent interval `[-(1/n) ln ci_high, -(1/n) ln ci_low]`.
    pub fn exponent_ci(&self) -> (f64, f64) {
        let n = self.params.dim as f64;
        let hi = if self.ci_low > 0.0 { -self.ci_low.ln() / n } else { f64::INFINITY };
        (-self.ci_high.ln() / n, hi)
    }

    pub fn to_csv_row(&self) -> String {
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            p.list_len,
            p.dim,
            p.half_width,
            p.noise,
            p.samples,
            self.hits,
            self.p_hat,
            self.exponent_hat,
            self.ci_low,
            self.ci_high,
            p.seed
        )
    }
}

/// Draws `samples` independent lists; sample `i` uses the random stream `(seed, i)`,
/// so the hit count does not depend on the thread pool it runs in.
///
/// The event is tested as `sum_j g(column_j) <= L n N`, accumulated column by
/// column without materialising the list.
pub fn mc_tail(params: TailParams) -> Result<TailEstimate> {
    let TailParams { list_len, dim, half_width, noise, samples, seed } = params;
    if samples < MIN_TAIL_SAMPLES {
        return Err(Error::InvalidInput(format!("need at least {MIN_TAIL_SAMPLES} samples, got {samples}")));
    }
    if dim == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    if list_len < 2 {
        return Err(Error::InvalidInput(format!("L must be >= 2, got {list_len}")));
    }
    if !(half_width > 0.0) || !(noise > 0.0) {
        return Err(Error::InvalidInput(format!("K and N must be positive, got K = {half_width}, N = {noise}")));
    }
    let threshold = (list_len * dim) as f64 * noise;

    let hits = (0..samples as usize)
        .into_par_iter()
        .with_min_len(4096)
        .filter(|&i| {
            let mut rng = rng::stream(seed, Domain::TailSample, i as u64);
            let mut col = vec![0.0; list_len];
            let mut acc = 0.0;
            for _ in 0..dim {
                for v in col.iter_mut() {
                    *v = half_width * (2.0 * rng.random::<f64>() - 1.0);
                }
                acc += crate::geometry::quadratic_form_g(&col);
                if acc > threshold {
                    return false;
                }
            }
            true
        })
        .count() as u64;

    let p_hat = hits as f64 / samples as f64;
    let alpha = 1.0 - CONFIDENCE;
    let n = dim as f64;
    let (ci_low, ci_high, exponent_hat, lower_bound) = if hits == 0 {
        // one-sided upper limit, (1 - p)^samples = alpha
        let hi = -(alpha.ln() / samples as f64).exp_m1();
        (0.0, hi, -hi.ln() / n, true)
    } else {
        let (lo, hi) = clopper_pearson(hits, samples, alpha);
        (lo, hi, -p_hat.ln() / n, false)
    };
    Ok(TailEstimate { params, hits, p_hat, exponent_hat, exponent_is_lower_bound: lower_bound, ci_low, ci_high })
}

/// Exact binomial interval with `alpha/2` in each tail.
pub fn clopper_pearson(hits: u64, samples: u64, alpha: f64) -> (f64, f64) {
    let k = hits as f64;
    let n = samples as f64;
    let lo = if hits == 0 { 0.0 } else { beta_quantile(alpha / 2.0, k, n - k + 1.0) };
    let hi = if hits == samples { 1.0 } else { beta_quantile(1.0 - alpha / 2.0, k + 1.0, n - k) };
    (lo, hi)
}

/// Inverse of the regularised incomplete beta function by bisection.
fn beta_quantile(prob: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
