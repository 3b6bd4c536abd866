//! Chebyshev radius (smallest enclosing ball) of a list.
//!
//! The solver works on the simplex-dual representation
//! `rad^2 = max_{z in simplex} f(z)`, `f(z) = sum_i z_i |x_i|^2 - |sum_i z_i x_i|^2`,
//! with away-step conditional gradient and exact line search. For any `z`
//! the ball of squared radius `max_i |x_i - y_z|^2` around `y_z = sum_i z_i x_i`
//! covers the list, and `f(z)` never exceeds the optimum, so
//! `[f(z), max_i |x_i - y_z|^2]` always brackets the answer.

use nalgebra::{DMatrix, DVector};

use super::radius::sq_dist;
use super::{PointList, SimplexWeights};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChebResult {
    /// Reported squared radius; equal to `upper`, a certified covering value.
    pub radius_sq: f64,
    pub center: Vec<f64>,
    pub weights: SimplexWeights,
    /// Dual value `f(z)`.
    pub lower: f64,
    /// `max_i |x_i - center|^2`.
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `100 * L * ceil(ln(1/tol))`.
pub fn default_max_iters(list_len: usize, tol: f64) -> usize {
    let logs = (1.0 / tol).ln().ceil().max(1.0) as usize;
    100 * list_len * logs
}

pub fn chebyshev_radius(list: &PointList, tol: f64, max_iters: usize) -> Result<ChebResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let l = list.len();
    let pts = list.points();
    let mut z = vec![1.0 / l as f64; l];
    let mut y = vec![0.0; list.dim()];
    let mut d = vec![0.0; l];
    let mut iterations = 0;

    loop {
        barycenter_into(pts, &z, &mut y);
        for (di, x) in d.iter_mut().zip(pts) {
            *di = sq_dist(x, &y);
        }
        let lower: f64 = z.iter().zip(&d).map(|(zi, di)| zi * di).sum();
        // lowest index wins ties
        let (toward, upper) = d
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        let gap = upper - lower;
        if gap <= tol || iterations >= max_iters {
            let converged = gap <= tol;
            let weights = SimplexWeights(z);
            return Ok(ChebResult {
                radius_sq: upper,
                center: y,
                weights,
                lower,
                upper,
                gap: gap.max(0.0),
                iterations,
                converged,
            });
        }
        iterations += 1;

        let away = d
            .iter()
            .enumerate()
            .filter(|(i, _)| z[*i] > 0.0)
            .fold((usize::MAX, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
            .0;
        let away_gap = lower - d[away];

        if gap >= away_gap {
            // toward x_t: z <- z + g (e_t - z); y moves along x_t - y
            let dir_sq = d[toward];
            let step = if dir_sq > 0.0 { (gap / (2.0 * dir_sq)).min(1.0) } else { 1.0 };
            for zi in z.iter_mut() {
                *zi *= 1.0 - step;
            }
            z[toward] += step;
        } else {
            // away from x_a: z <- z + g (z - e_a); y moves along y - x_a
            let za = z[away];
            let max_step = za / (1.0 - za);
            let dir_sq = d[away];
            let step = if dir_sq > 0.0 { (away_gap / (2.0 * dir_sq)).min(max_step) } else { max_step };
            for zi in z.iter_mut() {
                *zi *= 1.0 + step;
            }
            z[away] -= step;
            if step >= max_step {
                z[away] = 0.0;
            }
        }
        let sum: f64 = z.iter().sum();
        z.iter_mut().for_each(|zi| *zi = (*zi / sum).max(0.0));
    }
}

fn barycenter_into(pts: &[Vec<f64>], z: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    for (w, p) in z.iter().zip(pts) {
        if *w == 0.0 {
            continue;
        }
        for (yj, pj) in y.iter_mut().zip(p) {
            *yj += w * pj;
        }
    }
}

/// Largest list the enumeration oracle accepts.
pub const EXACT_MAX_LIST: usize = 12;
/// Largest support subset the enumeration oracle accepts, `min(L, n + 1)`.
pub const EXACT_MAX_SUPPORT: usize = 6;

/// Smallest enclosing ball by enumerating circumballs of affinely independent subsets.
///
/// Test oracle only; refuses lists beyond the enumeration budget.
pub fn chebyshev_radius_exact(list: &PointList) -> Result<(f64, Vec<f64>)> {
    let l = list.len();
    let support = l.min(list.dim() + 1);
    if l > EXACT_MAX_LIST || support > EXACT_MAX_SUPPORT {
        return Err(Error::Budget(format!(
            "exact Chebyshev oracle needs L <= {EXACT_MAX_LIST} and min(L, n+1) <= {EXACT_MAX_SUPPORT}, got L = {l}, n = {}",
            list.dim()
        )));
    }
    let pts = list.points();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset = Vec::with_capacity(support);
    for k in 1..=support {
        for_each_subset(l, k, &mut subset, &mut |s| {
            let Some((r2, c)) = circumball(pts, s) else { return };
            if best.as_ref().is_some_and(|(b, _)| r2 >= *b) {
                return;
            }
            let slack = r2 * 1e-10 + 1e-14;
            if pts.iter().all(|x| sq_dist(x, &c) <= r2 + slack) {
                best = Some((r2, c));
            }
        });
    }
    // the full support set always yields a candidate, so this cannot be None
    best.ok_or_else(|| Error::InvalidInput("no enclosing circumball found".into()))
}

/// Calls `f` on every `k`-subset of `0..l` in lexicographic order.
fn for_each_subset(l: usize, k: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    buf.clear();
    buf.extend(0..k);
    loop {
        f(buf);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if buf[i] < l - k + i {
                buf[i] += 1;
                for j in (i + 1)..k {
                    buf[j] = buf[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Circumcentre of the points indexed by `subset`, within their affine hull.
fn circumball(pts: &[Vec<f64>], subset: &[usize]) -> Option<(f64, Vec<f64>)> {
    let base = &pts[subset[0]];
    let m = subset.len() - 1;
    if m == 0 {
        return Some((0.0, base.clone()));
    }
    let v: Vec<Vec<f64>> = subset[1..].iter().map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let gram = DMatrix::from_fn(m, m, |a, b| v[a].iter().zip(&v[b]).map(|(x, y)| x * y).sum::<f64>());
    let rhs = DVector::from_fn(m, |a, _| 0.5 * gram[(a, a)]);
    let scale = (0..m).map(|a| gram[(a, a)]).fold(0.0, f64::max);
    let chol = gram.clone().cholesky()?;
    // reject near-degenerate simplices: the smallest pivot must be resolvable
    let min_pivot = (0..m).map(|a| chol.l_dirty()[(a, a)]).fold(f64::INFINITY, f64::min);
    if !(min_pivot * min_pivot > 1e-12 * scale) {
        return None;
    }
    let alpha = chol.solve(&rhs);
    let mut c = base.clone();
    for (a, va) in v.iter().enumerate() {
        for (cj, vj) in c.iter_mut().zip(va) {
            *cj += alpha[a] * vj;
        }
    }
    let r2 = subset.iter().map(|&i| sq_dist(&pts[i], &c)).fold(0.0, f64::max);
    Some((r2, c))
}
