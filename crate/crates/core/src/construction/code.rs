use rand::Rng;

use super::binomial;
use crate::bounds::{log_lambda_n_threshold, BoundQuery, ExponentQuery};
use crate::geometry::PointFile;
use crate::rng::{self, Domain};
use crate::{Error, Result};

/// Largest `C(M, L)` the exhaustive list routines accept.
pub const ENUMERATION_BUDGET: f64 = 1e8;

/// A finite point set inside `[-K, K]^n` with the parameters it was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCode {
    pub points: Vec<Vec<f64>>,
    pub dim: usize,
    pub list_len: usize,
    pub noise: f64,
    pub half_width: f64,
    pub seed: u64,
    pub expurgated_count: usize,
}

impl FiniteCode {
    /// Wraps explicit points; every coordinate must lie in `[-K, K]`.
    pub fn new(
        points: Vec<Vec<f64>>,
        dim: usize,
        list_len: usize,
        noise: f64,
        half_width: f64,
        seed: u64,
    ) -> Result<Self> {
        ExponentQuery::new(BoundQuery::new(noise, list_len)?, half_width)?;
        if dim == 0 {
            return Err(Error::InvalidInput("n must be >= 1".into()));
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { index, expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !(v.abs() <= half_width)) {
                return Err(Error::InvalidInput(format!(
                    "point {index} lies outside [-{half_width}, {half_width}]^{dim}"
                )));
            }
        }
        Ok(Self { points, dim, list_len, noise, half_width, seed, expurgated_count: 0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `nN`, the squared-radius threshold.
    pub fn threshold(&self) -> f64 {
        self.dim as f64 * self.noise
    }

    pub fn to_point_file(&self) -> PointFile {
        PointFile {
            dim: self.dim,
            meta: vec![
                ("L".into(), self.list_len.to_string()),
                ("N".into(), format!("{}", self.noise)),
                ("K".into(), format!("{}", self.half_width)),
                ("seed".into(), self.seed.to_string()),
                ("expurgated".into(), self.expurgated_count.to_string()),
            ],
            points: self.points.clone(),
        }
    }

    pub fn from_point_file(file: &PointFile) -> Result<Self> {
        let mut code = Self::new(
            file.points.clone(),
            file.dim,
            file.require("L")?,
            file.require("N")?,
            file.require("K")?,
            file.require("seed")?,
        )?;
        code.expurgated_count = file.get("expurgated").map(|_| file.require("expurgated")).transpose()?.unwrap_or(0);
        Ok(code)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleParams {
    pub dim: usize,
    pub list_len: usize,
    pub noise: f64,
    pub half_width: f64,
    /// Backoff (nats per dimension, `<= 0`) from the critical density `lambda_n`.
    pub rate_margin: f64,
    pub seed: u64,
    /// Overrides the computed code size and skips the enumeration budget.
    pub size: Option<usize>,
}

impl SampleParams {
    /// `ln(lambda_n e^{n margin} (2K)^n)`.
    pub fn log_target_size(&self) -> Result<f64> {
        let q = ExponentQuery::new(BoundQuery::new(self.noise, self.list_len)?, self.half_width)?;
        let n = self.dim as f64;
        Ok(log_lambda_n_threshold(q, self.dim) + n * self.rate_margin + n * (2.0 * self.half_width).ln())
    }

    /// `round(lambda_n e^{n margin} (2K)^n)`.
    pub fn target_size(&self) -> Result<f64> {
        Ok(self.log_target_size()?.exp().round())
    }
}

/// Draws `M` i.i.d. uniform points on `[-K, K]^n`; point `i` uses stream `(seed, i)`.
pub fn sample_code(params: SampleParams) -> Result<FiniteCode> {
    if !(params.rate_margin <= 0.0) {
        return Err(Error::InvalidInput(format!("rate_margin must be <= 0, got {}", params.rate_margin)));
    }
    if params.dim == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let size = match params.size {
        Some(m) => m,
        None => {
            let m = params.target_size()?;
            if !(binomial_f(m, params.list_len) <= ENUMERATION_BUDGET) {
                return Err(Error::Budget(format!(
                    "code size M = {m} gives C(M, {}) above {ENUMERATION_BUDGET:e}; pass an explicit size",
                    params.list_len
                )));
            }
            m as usize
        }
    };
    let k = params.half_width;
    let points: Vec<Vec<f64>> = (0..size as u64)
        .map(|i| {
            let mut rng = rng::stream(params.seed, Domain::CodeSample, i);
            (0..params.dim).map(|_| k * (2.0 * rng.random::<f64>() - 1.0)).collect()
        })
        .collect();
    FiniteCode::new(points, params.dim, params.list_len, params.noise, k, params.seed)
}

fn binomial_f(m: f64, k: usize) -> f64 {
    if !m.is_finite() {
        return f64::INFINITY;
    }
    if m > usize::MAX as f64 / 2.0 {
        return f64::INFINITY;
    }
    binomial(m as usize, k)
}

/// `max(n^2, 4 sqrt(nN))`.
pub fn default_half_width(dim: usize, noise: f64) -> f64 {
    let n = dim as f64;
    (n * n).max(4.0 * (n * noise).sqrt())
}

/// `(1/n) ln(|C| / (2K)^n)`.
pub fn achieved_rate(code: &FiniteCode) -> f64 {
    (code.len() as f64).ln() / code.dim as f64 - (2.0 * code.half_width).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::lambda_n_threshold;
    use approx::assert_abs_diff_eq;

    fn params() -> SampleParams {
        SampleParams { dim: 4, list_len: 2, noise: 0.01, half_width: 1.0, rate_margin: -0.2, seed: 7, size: None }
    }

    #[test]
    fn size_follows_critical_density() {
        let p = params();
        let q = ExponentQuery::new(BoundQuery::new(0.01, 2).unwrap(), 1.0).unwrap();
        let expected = (lambda_n_threshold(q, 4) * (-0.8f64).exp() * 16.0).round() as usize;
        let code = sample_code(p).unwrap();
        assert_eq!(code.len(), expected);
        assert!(code.points.iter().flatten().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn zero_margin_is_critical_density() {
        let p = SampleParams { rate_margin: 0.0, ..params() };
        let q = ExponentQuery::new(BoundQuery::new(0.01, 2).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(
            p.log_target_size().unwrap(),
            lambda_n_threshold(q, 4).ln() + 4.0 * 2f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(sample_code(params()).unwrap(), sample_code(params()).unwrap());
        let other = sample_code(SampleParams { seed: 8, ..params() }).unwrap();
        assert_ne!(other.points, sample_code(params()).unwrap().points);
    }

    #[test]
    fn budget_and_margin_checks() {
        let huge = SampleParams { dim: 12, half_width: 20.0, ..params() };
        assert!(matches!(sample_code(huge), Err(Error::Budget(_))));
        let explicit = SampleParams { size: Some(10), ..huge };
        assert_eq!(sample_code(explicit).unwrap().len(), 10);
        assert!(sample_code(SampleParams { rate_margin: 0.1, ..params() }).is_err());
    }

    #[test]
    fn rate_accounting() {
        let one = FiniteCode::new(vec![vec![0.0; 3]], 3, 2, 0.1, 0.5, 0).unwrap();
        assert_eq!(achieved_rate(&one), 0.0);
        let code = sample_code(params()).unwrap();
        let r = achieved_rate(&code);
        assert_abs_diff_eq!((4.0 * r).exp() * 16.0, code.len() as f64, epsilon = 1e-9);
    }

    #[test]
    fn default_cube() {
        assert_eq!(default_half_width(4, 0.01), 16.0);
        assert_eq!(default_half_width(1, 4.0), 8.0);
    }

    #[test]
    fn rejects_points_outside_cube() {
        assert!(FiniteCode::new(vec![vec![1.5]], 1, 2, 0.1, 1.0, 0).is_err());
        assert!(FiniteCode::new(vec![vec![0.5, 0.1]], 1, 2, 0.1, 1.0, 0).is_err());
    }

    #[test]
    fn file_round_trip() {
        let mut code = sample_code(params()).unwrap();
        code.expurgated_count = 3;
        let back = FiniteCode::from_point_file(&code.to_point_file()).unwrap();
        assert_eq!(back, code);
    }
}
