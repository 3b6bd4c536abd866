use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::lists::lists_below;
use super::{binomial, FiniteCode, ENUMERATION_BUDGET};
use crate::bounds::ball_log_volume_rate_finite;
use crate::deviation::{clopper_pearson, CONFIDENCE};
use crate::geometry::{sq_dist, PointFile};
use crate::rng::{self, Domain};
use crate::{Error, Result};

/// Largest number of tiles a window scan will visit.
pub const MAX_WINDOW_TILES: f64 = 1e7;

/// The base code repeated on the lattice `period * Z^n`, `period = 2K + 2 gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub code: FiniteCode,
    pub gap: f64,
    pub period: f64,
}

/// Smallest gap that keeps every list straddling two tiles good:
/// `sqrt(L/2) sqrt(nN)`. The gap must strictly exceed it.
pub fn min_safe_gap(code: &FiniteCode) -> f64 {
    (code.list_len as f64 / 2.0).sqrt() * code.threshold().sqrt()
}

/// `n^0.6`, a gap that is `o(n)` yet eventually exceeds `sqrt(L nN / 2)`.
pub fn asymptotic_gap(n: usize) -> f64 {
    (n as f64).powf(0.6)
}

pub fn tile(code: FiniteCode, gap: f64) -> Result<Constellation> {
    let min = min_safe_gap(&code);
    if !(gap > min) || !gap.is_finite() {
        return Err(Error::InvalidInput(format!("gap {gap} must exceed sqrt(L/2) sqrt(nN) = {min}")));
    }
    let period = 2.0 * code.half_width + 2.0 * gap;
    Ok(Constellation { code, gap, period })
}

impl Constellation {
    /// Tiles with `gap = 1.01 sqrt(L/2) sqrt(nN)`.
    pub fn with_default_gap(code: FiniteCode) -> Result<Self> {
        let gap = 1.01 * min_safe_gap(&code);
        tile(code, gap)
    }

    pub fn dim(&self) -> usize {
        self.code.dim
    }

    /// Normalised log density `(1/n) ln(|C| / period^n)`.
    pub fn nld(&self) -> f64 {
        (self.code.len() as f64).ln() / self.dim() as f64 - self.period.ln()
    }

    /// Covers the base tile and everything within interaction range of it.
    pub fn default_window_radius(&self) -> f64 {
        let reach = (2.0 * self.code.list_len as f64 * self.code.threshold()).sqrt();
        (self.dim() as f64).sqrt() * self.period / 2.0 + 2.0 * reach
    }

    pub fn to_point_file(&self) -> PointFile {
        let mut file = self.code.to_point_file();
        file.meta.push(("period".into(), format!("{}", self.period)));
        file.meta.push(("gap".into(), format!("{}", self.gap)));
        file
    }

    pub fn from_point_file(file: &PointFile) -> Result<Self> {
        let code = FiniteCode::from_point_file(file)?;
        let gap: f64 = file.require("gap")?;
        let c = tile(code, gap)?;
        if let Some(p) = file.get("period") {
            let p: f64 = p.parse().map_err(|_| Error::InvalidInput(format!("bad period {p}")))?;
            if (p - c.period).abs() > 1e-9 * c.period {
                return Err(Error::InvalidInput(format!("period {p} disagrees with 2K + 2 gap = {}", c.period)));
            }
        }
        Ok(c)
    }

    fn tile_ranges(&self, center: &[f64], radius: f64) -> Vec<(i64, i64)> {
        let k = self.code.half_width;
        center
            .iter()
            .map(|&x| (((x - radius - k) / self.period).ceil() as i64, ((x + radius + k) / self.period).floor() as i64))
            .collect()
    }

    /// Calls `visit(tile, base_index, coords)` for every point within `radius`
    /// of `center`; stops early when `visit` returns `false`.
    fn scan(&self, center: &[f64], radius: f64, mut visit: impl FnMut(&[i64], usize, &[f64]) -> bool) -> Result<()> {
        if center.len() != self.dim() {
            return Err(Error::DimensionMismatch { index: 0, expected: self.dim(), found: center.len() });
        }
        let ranges = self.tile_ranges(center, radius);
        let tiles: f64 = ranges.iter().map(|&(lo, hi)| (hi - lo + 1).max(0) as f64).product();
        if tiles > MAX_WINDOW_TILES {
            return Err(Error::Budget(format!("window spans {tiles:.3e} tiles, above {MAX_WINDOW_TILES:e}")));
        }
        if tiles == 0.0 {
            return Ok(());
        }
        let k = self.code.half_width;
        let r2 = radius * radius;
        let mut t: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        let mut coords = vec![0.0; self.dim()];
        loop {
            let box_gap: f64 = t
                .iter()
                .zip(center)
                .map(|(&ti, &x)| {
                    let d = ((x - ti as f64 * self.period).abs() - k).max(0.0);
                    d * d
                })
                .sum();
            if box_gap <= r2 {
                for (bi, p) in self.code.points.iter().enumerate() {
                    for ((c, &v), &ti) in coords.iter_mut().zip(p).zip(&t) {
                        *c = v + ti as f64 * self.period;
                    }
                    if sq_dist(&coords, center) <= r2 && !visit(&t, bi, &coords) {
                        return Ok(());
                    }
                }
            }
            let mut axis = 0;
            loop {
                if axis == t.len() {
                    return Ok(());
                }
                if t[axis] < ranges[axis].1 {
                    t[axis] += 1;
                    break;
                }
                t[axis] = ranges[axis].0;
                axis += 1;
            }
        }
    }

    fn covers(&self, x: &[f64], radius: f64) -> Result<bool> {
        let mut hit = false;
        self.scan(x, radius, |_, _, _| {
            hit = true;
            false
        })?;
        Ok(hit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowPoint {
    pub coords: Vec<f64>,
    pub tile: Vec<i64>,
    pub base_index: usize,
}

/// Constellation points within `radius` of `center` (inclusive).
pub fn enumerate_window(c: &Constellation, center: &[f64], radius: f64) -> Result<Vec<WindowPoint>> {
    let mut out = Vec::new();
    c.scan(center, radius, |t, bi, x| {
        out.push(WindowPoint { coords: x.to_vec(), tile: t.to_vec(), base_index: bi });
        true
    })?;
    Ok(out)
}

/// Outcome of an exhaustive check of every `L`-subset inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    /// `nN`.
    pub threshold: f64,
    pub window_radius: f64,
    pub window_points: usize,
    /// Number of lists with average squared radius `<= nN`.
    pub violations: usize,
    /// The lexicographically first violating list.
    pub violating_list: Option<Vec<WindowPoint>>,
    /// Smallest average squared radius seen, if one lies below `4 nN`.
    pub min_avg_sq_radius: Option<f64>,
    pub min_list: Option<Vec<WindowPoint>>,
}

/// Checks every `L`-subset of constellation points within `window_radius` of
/// the origin.
pub fn verify_packing(c: &Constellation, window_radius: f64) -> Result<Verdict> {
    let window = enumerate_window(c, &vec![0.0; c.dim()], window_radius)?;
    Ok(judge(window, c.code.list_len, c.code.threshold(), window_radius))
}

/// Checks every `L`-subset of a finite code; the window is the code itself.
pub fn verify_code(code: &FiniteCode) -> Result<Verdict> {
    let subsets = binomial(code.len(), code.list_len);
    if subsets > ENUMERATION_BUDGET {
        return Err(Error::Budget(format!(
            "C({}, {}) = {subsets:.3e} exceeds the enumeration budget {ENUMERATION_BUDGET:e}",
            code.len(),
            code.list_len
        )));
    }
    let points = code
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| WindowPoint { coords: p.clone(), tile: vec![0; code.dim], base_index: i })
        .collect();
    Ok(judge(points, code.list_len, code.threshold(), f64::INFINITY))
}

fn judge(window: Vec<WindowPoint>, l: usize, threshold: f64, window_radius: f64) -> Verdict {
    let coords: Vec<Vec<f64>> = window.iter().map(|w| w.coords.clone()).collect();
    let pick = |idx: &[usize]| idx.iter().map(|&i| window[i].clone()).collect::<Vec<_>>();
    let argmin =
        |lists: &[(Vec<usize>, f64)]| lists.iter().min_by(|a, b| a.1.total_cmp(&b.1)).map(|(idx, v)| (*v, idx.clone()));

    let bad = lists_below(&coords, l, threshold);
    let mut min = argmin(&bad);
    if min.is_none() {
        for factor in [2.0, 4.0] {
            min = argmin(&lists_below(&coords, l, factor * threshold));
            if min.is_some() {
                break;
            }
        }
    }
    Verdict {
        pass: bad.is_empty(),
        threshold,
        window_radius,
        window_points: window.len(),
        violations: bad.len(),
        violating_list: bad.first().map(|(idx, _)| pick(idx)),
        min_avg_sq_radius: min.as_ref().map(|m| m.0),
        min_list: min.map(|m| pick(&m.1)),
    }
}

/// Monte Carlo estimate of the log density of the union of noise balls.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    /// `(1/n) ln(|C| / period^n)`.
    pub rate_nld: f64,
    /// `(1/n) ln(covered fraction)`; an upper bound when no sample was covered.
    pub delta_hat: f64,
    pub delta_is_upper_bound: bool,
    pub delta_ci: (f64, f64),
    /// `rate_nld + (1/n) ln vol B(sqrt(nN))`, exact when the balls are disjoint.
    pub predicted_upper: f64,
    /// `predicted_upper - (1/n) ln(L - 1)`, valid when every point of space is
    /// covered at most `L - 1` times.
    pub predicted_lower: f64,
    pub power: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
}

/// Samples uniformly in `B(sqrt(nP))` and counts samples within `sqrt(nN)`
/// of some constellation point.
pub fn density_report(c: &Constellation, power: f64, samples: u64, seed: u64) -> Result<DensityReport> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::InvalidInput(format!("P must be positive, got {power}")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let n = c.dim();
    let nf = n as f64;
    let outer = (nf * power).sqrt();
    let r = c.code.threshold().sqrt();
    let outcomes: Vec<Result<bool>> = (0..samples as usize)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let mut rng = rng::stream(seed, Domain::DensitySample, i as u64);
            let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = outer * rng.random::<f64>().powf(1.0 / nf) / norm;
            x.iter_mut().for_each(|v| *v *= scale);
            c.covers(&x, r)
        })
        .collect();
    let mut hits = 0u64;
    for o in outcomes {
        hits += o? as u64;
    }
    let alpha = 1.0 - CONFIDENCE;
    let (lo, hi) =
        if hits == 0 { (0.0, -(alpha.ln() / samples as f64).exp_m1()) } else { clopper_pearson(hits, samples, alpha) };
    let to_delta = |f: f64| f.ln() / nf;
    let delta_hat = if hits == 0 { to_delta(hi) } else { to_delta(hits as f64 / samples as f64) };
    let rate_nld = c.nld();
    let predicted_upper = rate_nld + ball_log_volume_rate_finite(n, c.code.noise);
    Ok(DensityReport {
        rate_nld,
        delta_hat,
        delta_is_upper_bound: hits == 0,
        delta_ci: (to_delta(lo), to_delta(hi)),
        predicted_upper,
        predicted_lower: predicted_upper - ((c.code.list_len - 1) as f64).ln() / nf,
        power,
        samples,
        hits,
        seed,
    })
}
