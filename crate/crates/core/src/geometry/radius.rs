use nalgebra::{DMatrix, DVector};

use super::PointList;
use crate::{Error, Result};

/// Which algebraic representation of the average squared radius to evaluate.
///
/// All four are identities; they differ only in round-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvgRadiusFormula {
    /// `(1/L) sum_i |x_i - c|^2` with `c` the centroid.
    Centroid,
    /// `(1/L) sum_i |x_i|^2 - |c|^2`.
    NormMinusCenter,
    /// `(L-1)/L^2 sum_i |x_i|^2 - 1/L^2 sum_{i != j} <x_i, x_j>`.
    Correlation,
    /// `1/(2L^2) sum_{i != j} |x_i - x_j|^2`.
    Pairwise,
}

impl AvgRadiusFormula {
    pub const ALL: [AvgRadiusFormula; 4] = [
        AvgRadiusFormula::Centroid,
        AvgRadiusFormula::NormMinusCenter,
        AvgRadiusFormula::Correlation,
        AvgRadiusFormula::Pairwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AvgRadiusFormula::Centroid => "centroid",
            AvgRadiusFormula::NormMinusCenter => "norm_minus_center",
            AvgRadiusFormula::Correlation => "correlation",
            AvgRadiusFormula::Pairwise => "pairwise",
        }
    }
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_norm(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn centroid(list: &PointList) -> Vec<f64> {
    let l = list.len() as f64;
    let mut c = vec![0.0; list.dim()];
    for p in list.points() {
        for (cj, pj) in c.iter_mut().zip(p) {
            *cj += pj;
        }
    }
    c.iter_mut().for_each(|v| *v /= l);
    c
}

/// `max_i |x_i - c|^2`, the covering radius of the ball centred at the centroid.
pub fn max_centroid_dist_sq(list: &PointList) -> f64 {
    let c = centroid(list);
    list.points().iter().map(|p| sq_dist(p, &c)).fold(0.0, f64::max)
}

/// Average squared distance of the list to its centroid.
pub fn avg_sq_radius(list: &PointList, formula: AvgRadiusFormula) -> f64 {
    let l = list.len() as f64;
    let pts = list.points();
    let value = match formula {
        AvgRadiusFormula::Centroid => {
            let c = centroid(list);
            pts.iter().map(|p| sq_dist(p, &c)).sum::<f64>() / l
        }
        AvgRadiusFormula::NormMinusCenter => {
            let c = centroid(list);
            pts.iter().map(|p| sq_norm(p)).sum::<f64>() / l - sq_norm(&c)
        }
        AvgRadiusFormula::Correlation => {
            let norms: f64 = pts.iter().map(|p| sq_norm(p)).sum();
            let mut cross = 0.0;
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    cross += dot(&pts[i], &pts[j]);
                }
            }
            ((l - 1.0) * norms - 2.0 * cross) / (l * l)
        }
        AvgRadiusFormula::Pairwise => {
            let mut total = 0.0;
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    total += sq_dist(&pts[i], &pts[j]);
                }
            }
            // each unordered pair appears twice in the ordered sum
            total / (l * l)
        }
    };
    value.max(0.0)
}

/// Relative tolerance on `|x_i|^2 = nP` for [`avg_sq_radius_spherical`].
pub const SPHERE_NORM_RTOL: f64 = 1e-9;

/// `nP - |c|^2`, valid when every point lies on the sphere of radius `sqrt(nP)`.
pub fn avg_sq_radius_spherical(list: &PointList, power: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(Error::InvalidInput(format!("power must be positive, got {power}")));
    }
    let expected = list.dim() as f64 * power;
    for (index, p) in list.points().iter().enumerate() {
        let norm_sq = sq_norm(p);
        if (norm_sq - expected).abs() > SPHERE_NORM_RTOL * expected {
            return Err(Error::NormConstraint { index, norm_sq, expected });
        }
    }
    Ok((expected - sq_norm(&centroid(list))).max(0.0))
}

/// `g(t) = sum t_i^2 - (sum t_i)^2 / L = t^T (I - J/L) t`.
pub fn quadratic_form_g(t: &[f64]) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    let l = t.len() as f64;
    let mean = t.iter().sum::<f64>() / l;
    t.iter().map(|v| (v - mean) * (v - mean)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadPResult {
    pub value: f64,
    pub center: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const RAD_P_MAX_ITERS: usize = 200;

/// `(min_y (1/L) sum_i |x_i - y|^{2p})^{1/p}`.
///
/// Damped Newton on the smooth convex `h(y) = (1/L) sum_i |x_i - y|^{2p}`
/// from the centroid. Stops once the gradient of `h^{1/p}` has norm at most
/// `tol`, or once a Newton step no longer changes `h` beyond round-off.
pub fn rad_p(list: &PointList, p: f64, tol: f64) -> Result<RadPResult> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("p must be a finite value >= 1, got {p}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let mut y = centroid(list);
    let scale = list.points().iter().map(|x| sq_dist(x, &y)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(RadPResult { value: 0.0, center: y, iterations: 0, converged: true });
    }
    let n = y.len();
    let mut iterations = 0;
    let mut converged = false;
    let mut h = rad_p_h(list, p, scale, &y);
    while iterations < RAD_P_MAX_ITERS {
        let (grad, hess) = rad_p_derivatives(list, p, scale, &y);
        // chain rule: grad phi = scale (1/p) h^{1/p - 1} grad h
        let phi_grad = scale / p * h.powf(1.0 / p - 1.0) * grad.norm();
        if phi_grad <= tol {
            converged = true;
            break;
        }
        iterations += 1;
        let dir = match hess.cholesky() {
            Some(c) => c.solve(&(-&grad)),
            None => -&grad,
        };
        let slope = grad.dot(&dir);
        if !(slope < 0.0) || -slope <= 4.0 * f64::EPSILON * h {
            converged = true;
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = (0..n).map(|j| y[j] + t * dir[j]).collect();
            let ht = rad_p_h(list, p, scale, &trial);
            if ht <= h + 0.25 * t * slope {
                y = trial;
                h = ht;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            // the objective is flat to round-off along the Newton direction
            converged = true;
            break;
        }
    }
    Ok(RadPResult { value: scale * h.powf(1.0 / p), center: y, iterations, converged })
}

/// `h(y) / scale^p`.
fn rad_p_h(list: &PointList, p: f64, scale: f64, y: &[f64]) -> f64 {
    list.points().iter().map(|x| (sq_dist(x, y) / scale).powf(p)).sum::<f64>() / list.len() as f64
}

fn rad_p_derivatives(list: &PointList, p: f64, scale: f64, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = y.len();
    let l = list.len() as f64;
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    for x in list.points() {
        let d = DVector::from_iterator(n, y.iter().zip(x).map(|(a, b)| a - b));
        let u = d.norm_squared() / scale;
        if u == 0.0 {
            if p == 1.0 {
                for j in 0..n {
                    hess[(j, j)] += 2.0 / (scale * l);
                }
            }
            continue;
        }
        let w1 = 2.0 * p * u.powf(p - 1.0) / (scale * l);
        grad.axpy(w1, &d, 1.0);
        for j in 0..n {
            hess[(j, j)] += w1;
        }
        let w2 = 4.0 * p * (p - 1.0) * u.powf(p - 2.0) / (scale * scale * l);
        hess.ger(w2, &d, &d, 1.0);
    }
    (grad, hess)
}
