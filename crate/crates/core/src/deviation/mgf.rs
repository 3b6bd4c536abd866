//! Log-MGF of the quadratic form `t^T A t` under the uniform measure on a cube,
//! and the lower-tail Cramér rate built from it.
//!
//! With `c = K^2 lambda`, the Gaussian-integral identity
//! `exp((c/L) S^2) = E_w[exp(sqrt(2c/L) w S)]` decouples the coordinates and
//! reduces the `L`-dimensional cube integral to one dimension:
//!
//! ```text
//! int_{[-1,1]^L} exp(-c t^T A t) dt
//!     = sqrt(c L / pi) (pi / (4c))^{L/2} int_R F(m)^L dm,
//! F(m) = erf(sqrt(c) (1 - m)) + erf(sqrt(c) (1 + m)).
//! ```
//!
//! `F` is a plateau of height 2 on `(-1, 1)` with edges of width `1/sqrt(c)`, so
//! an adaptive rule with breakpoints at the edges stays accurate for any `c`.
//! A plain tensor-product rule is kept as an independent cross-check for
//! moderate `c`.

use std::f64::consts::{LN_2, PI};

use statrs::function::erf::{erf, erfc};

use super::quadrature::{adaptive_integrate, tensor_integrate, GaussLegendre};
use crate::bounds::{lambda_star, BoundQuery};
use crate::geometry::{quadratic_form_g, spectral_pair};
use crate::{Error, Result};

/// Largest list size accepted by the quadrature routines.
pub const MAX_QUAD_LIST: usize = 5;
pub const MIN_QUAD_ORDER: usize = 16;
pub const DEFAULT_QUAD_ORDER: usize = 64;
/// Relative change under order doubling above which a value is flagged.
pub const ORDER_DOUBLING_TOL: f64 = 1e-9;
/// Node budget for [`mgf_log_tensor`].
pub const MAX_TENSOR_NODES: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfLog {
    /// `ln E[exp(-lambda x^T A x)]` for `x` uniform on `[-K, K]^L`.
    pub value: f64,
    /// `|value(2q) - value(q)|`, the order-doubling check.
    pub doubling_delta: f64,
    pub converged: bool,
}

fn check_quad_args(list_len: usize, half_width: f64, lambda: f64, quad_order: usize) -> Result<()> {
    if !(2..=MAX_QUAD_LIST).contains(&list_len) {
        return Err(Error::Budget(format!("quadrature supports 2 <= L <= {MAX_QUAD_LIST}, got L = {list_len}")));
    }
    if quad_order < MIN_QUAD_ORDER {
        return Err(Error::InvalidInput(format!("quad_order must be >= {MIN_QUAD_ORDER}, got {quad_order}")));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidInput(format!("K must be positive and finite, got {half_width}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

/// `ln` of the cube average of `exp(-K^2 lambda t^T A t)` over `[-1, 1]^L`.
pub fn mgf_log(list_len: usize, half_width: f64, lambda: f64, quad_order: usize) -> Result<MgfLog> {
    check_quad_args(list_len, half_width, lambda, quad_order)?;
    if lambda == 0.0 {
        return Ok(MgfLog { value: 0.0, doubling_delta: 0.0, converged: true });
    }
    let c = half_width * half_width * lambda;
    let coarse = log_cube_integral(list_len, c, &GaussLegendre::new(quad_order));
    let fine = log_cube_integral(list_len, c, &GaussLegendre::new(2 * quad_order));
    let l = list_len as f64;
    let delta = (fine - coarse).abs();
    Ok(MgfLog {
        value: (fine - l * LN_2).min(0.0),
        doubling_delta: delta,
        converged: delta <= ORDER_DOUBLING_TOL * fine.abs().max(1.0),
    })
}

/// `ln int_{[-1,1]^L} exp(-c t^T A t) dt` through the one-dimensional reduction.
fn log_cube_integral(list_len: usize, c: f64, rule: &GaussLegendre) -> f64 {
    let l = list_len as f64;
    let sc = c.sqrt();
    let edge = 1.0 / sc;
    let plateau = |m: f64| -> f64 {
        let f = if m <= 1.0 {
            erf(sc * (1.0 - m)) + erf(sc * (1.0 + m))
        } else {
            erfc(sc * (m - 1.0)) - erfc(sc * (m + 1.0))
        };
        f.powi(list_len as i32)
    };
    let end = 1.0 + 9.0 * edge;
    let breakpoints: Vec<f64> =
        if 1.0 - 8.0 * edge > 0.0 { vec![0.0, 1.0 - 8.0 * edge, 1.0, end] } else { vec![0.0, 1.0, end] };
    let rough: f64 = breakpoints.windows(2).map(|w| rule.integrate(w[0], w[1], &plateau)).sum();
    // F is even; integrate the right half and double
    let half = adaptive_integrate(rule, &breakpoints, 1e-12 * rough.abs(), &plateau);
    0.5 * (c * l / PI).ln() + 0.5 * l * (PI / (4.0 * c)).ln() + (2.0 * half).ln()
}

/// Same quantity as [`mgf_log`] by a direct tensor Gauss–Legendre rule on the cube.
///
/// Only accurate while the ridge width `1/sqrt(K^2 lambda)` is resolved by the
/// node spacing; used to cross-check the reduction.
pub fn mgf_log_tensor(list_len: usize, half_width: f64, lambda: f64, order: usize) -> Result<f64> {
    check_quad_args(list_len, half_width, lambda, order)?;
    if (order as f64).powi(list_len as i32) > MAX_TENSOR_NODES as f64 {
        return Err(Error::Budget(format!("tensor rule with {order}^{list_len} nodes exceeds {MAX_TENSOR_NODES}")));
    }
    let c = half_width * half_width * lambda;
    let rule = GaussLegendre::new(order);
    let integral = tensor_integrate(&rule, list_len, &|t: &[f64]| (-c * quadratic_form_g(t)).exp());
    Ok(integral.ln() - list_len as f64 * LN_2)
}

/// `E[x^T A x] = K^2 (L - 1) / 3` for `x` uniform on `[-K, K]^L`.
pub fn cube_mean(list_len: usize, half_width: f64) -> f64 {
    half_width * half_width * (list_len as f64 - 1.0) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctionResult {
    /// Cramér rate in nats per dimension, `-lambda_opt L N - mgf_log(lambda_opt)`.
    pub rate: f64,
    pub lambda_opt: f64,
    pub mgf_log_at_opt: f64,
    pub iterations: usize,
    /// All `mgf_log` evaluations passed the order-doubling check.
    pub quadrature_converged: bool,
}

const LAMBDA_TOL: f64 = 1e-10;
const MAX_GOLDEN_ITERS: usize = 400;

/// Lower-tail rate of `(1/n) sum_j x_j^T A x_j <= L N` for coordinates uniform on `[-K, K]`:
/// `max_{lambda >= 0} { -lambda L N - ln E[exp(-lambda x^T A x)] }`.
pub fn rate_function(list_len: usize, half_width: f64, noise: f64, quad_order: usize) -> Result<RateFunctionResult> {
    check_quad_args(list_len, half_width, 0.0, quad_order)?;
    let q = BoundQuery::new(noise, list_len)?;
    let l = list_len as f64;
    let threshold = l * noise;
    let mean = cube_mean(list_len, half_width);
    if threshold > mean * (1.0 + 1e-12) {
        return Err(Error::Regime { threshold, mean });
    }
    if threshold >= mean * (1.0 - 1e-12) {
        return Ok(RateFunctionResult {
            rate: 0.0,
            lambda_opt: 0.0,
            mgf_log_at_opt: 0.0,
            iterations: 0,
            quadrature_converged: true,
        });
    }

    let mut converged = true;
    let mut objective = |lambda: f64| -> Result<(f64, f64)> {
        let m = mgf_log(list_len, half_width, lambda, quad_order)?;
        converged &= m.converged;
        Ok((-lambda * threshold - m.value, m.value))
    };

    // phi is concave with phi(0) = 0; grow the bracket until phi(hi) <= phi(hi/2)
    let mut hi = 4.0 * lambda_star(q);
    let mut iterations = 0;
    loop {
        let (at_hi, _) = objective(hi)?;
        let (at_half, _) = objective(0.5 * hi)?;
        iterations += 2;
        if at_hi <= at_half || iterations > 200 {
            break;
        }
        hi *= 2.0;
    }

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, hi);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = objective(x1)?.0;
    let mut f2 = objective(x2)?.0;
    iterations += 2;
    while b - a > LAMBDA_TOL * hi.max(1.0) && iterations < MAX_GOLDEN_ITERS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = objective(x1)?.0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = objective(x2)?.0;
        }
        iterations += 1;
    }
    let lambda_opt = 0.5 * (a + b);
    let (rate, mgf_at) = objective(lambda_opt)?;
    Ok(RateFunctionResult {
        rate: rate.max(0.0),
        lambda_opt,
        mgf_log_at_opt: mgf_at,
        iterations,
        quadrature_converged: converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceCheck {
    /// `int_{[-1,1]^L} exp(-K^2 lambda t^T A t) dt`.
    pub numeric: f64,
    /// `(pi / (K^2 lambda))^{(L-1)/2} * 2 sqrt(L)`.
    pub asymptotic: f64,
    pub ratio: f64,
}

/// Compares the cube integral with its Laplace asymptotics in `K^2 lambda`.
pub fn laplace_check(list_len: usize, half_width: f64, lambda: f64) -> Result<LaplaceCheck> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    let m = mgf_log(list_len, half_width, lambda, DEFAULT_QUAD_ORDER)?;
    let l = list_len as f64;
    let c = half_width * half_width * lambda;
    let log_numeric = m.value + l * LN_2;
    let slab = spectral_pair(list_len)?.slab_width();
    let log_asymptotic = 0.5 * (l - 1.0) * (PI / c).ln() + slab.ln();
    Ok(LaplaceCheck {
        numeric: log_numeric.exp(),
        asymptotic: log_asymptotic.exp(),
        ratio: (log_numeric - log_asymptotic).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{exponent_e, ExponentQuery};
    use approx::assert_abs_diff_eq;

    /// Independent L = 2 oracle: with u = t1 - t2 the form is u^2/2 and u has
    /// the triangular density (2 - |u|)/4 on [-2, 2].
    fn pair_cube_integral(c: f64) -> f64 {
        4.0 * (PI / (2.0 * c)).sqrt() * erf((2.0 * c).sqrt()) - 2.0 * (1.0 - (-2.0 * c).exp()) / c
    }

    #[test]
    fn zero_tilt_is_zero() {
        for l in 2..=5 {
            assert_eq!(mgf_log(l, 3.0, 0.0, 16).unwrap().value, 0.0);
        }
    }

    #[test]
    fn pair_matches_triangular_oracle() {
        let m = mgf_log(2, 1.0, 1.0, 64).unwrap();
        assert!(m.converged);
        assert_abs_diff_eq!(m.value, (pair_cube_integral(1.0) / 4.0).ln(), epsilon = 1e-9);
        for c in [1e-6, 1e-2, 0.7, 30.0, 1e3, 1e5, 1e8] {
            let m = mgf_log(2, 1.0, c, 64).unwrap();
            let oracle = (pair_cube_integral(c) / 4.0).ln();
            assert!((m.value - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "c = {c}: {} vs {oracle}", m.value);
        }
    }

    #[test]
    fn reduction_matches_tensor_rule() {
        for l in 2..=4 {
            for lambda in [0.05, 0.5, 2.0] {
                let reduced = mgf_log(l, 1.5, lambda, 32).unwrap().value;
                let tensor = mgf_log_tensor(l, 1.5, lambda, 48).unwrap();
                assert_abs_diff_eq!(reduced, tensor, epsilon = 1e-9);
            }
        }
        let reduced = mgf_log(5, 1.0, 0.8, 32).unwrap().value;
        assert_abs_diff_eq!(reduced, mgf_log_tensor(5, 1.0, 0.8, 24).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn strictly_decreasing_and_convex() {
        for l in 2..=5 {
            let grid: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
            let vals: Vec<f64> = grid.iter().map(|&x| mgf_log(l, 1.0, x, 32).unwrap().value).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
            assert!(vals.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-8));
        }
    }

    #[test]
    fn refuses_out_of_budget() {
        assert!(matches!(mgf_log(6, 1.0, 1.0, 64), Err(Error::Budget(_))));
        assert!(matches!(mgf_log(1, 1.0, 1.0, 64), Err(Error::Budget(_))));
        assert!(mgf_log(3, 1.0, 1.0, 8).is_err());
        assert!(mgf_log(3, 1.0, -1.0, 64).is_err());
        assert!(matches!(mgf_log_tensor(5, 1.0, 1.0, 64), Err(Error::Budget(_))));
    }

    #[test]
    fn rate_vanishes_at_the_mean() {
        let (l, k) = (2, 1.0);
        let noise = cube_mean(l, k) / l as f64;
        let r = rate_function(l, k, noise, 64).unwrap();
        assert_eq!(r.rate, 0.0);
        assert_eq!(r.lambda_opt, 0.0);
    }

    #[test]
    fn rate_rejects_non_rare_tail() {
        let (l, k) = (3, 1.0);
        let noise = 1.1 * cube_mean(l, k) / l as f64;
        assert!(matches!(rate_function(l, k, noise, 64), Err(Error::Regime { .. })));
    }

    #[test]
    fn rate_is_positive_below_the_mean() {
        let r = rate_function(2, 1.0, 0.5 * cube_mean(2, 1.0) / 2.0, 64).unwrap();
        assert!(r.rate > 0.0 && r.lambda_opt > 0.0);
        assert_abs_diff_eq!(
            r.rate,
            -(r.lambda_opt * 2.0 * 0.5 * cube_mean(2, 1.0) / 2.0 + r.mgf_log_at_opt),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rate_tracks_closed_form_for_large_cube() {
        let r = rate_function(2, 8.0, 0.01, 64).unwrap();
        let e = exponent_e(ExponentQuery::new(BoundQuery::new(0.01, 2).unwrap(), 8.0).unwrap());
        assert!(((r.rate - e) / e).abs() <= 0.03, "{} vs {e}", r.rate);
        let r16 = rate_function(2, 16.0, 0.01, 64).unwrap();
        let star = lambda_star(BoundQuery::new(0.01, 2).unwrap());
        assert!(((r16.lambda_opt - star) / star).abs() <= 0.05);
    }

    #[test]
    fn laplace_examples() {
        let c = laplace_check(2, 1.0, 400.0).unwrap();
        assert!((c.ratio - 1.0).abs() <= 0.02, "ratio {}", c.ratio);
        assert_abs_diff_eq!(c.asymptotic, (PI / 400.0).sqrt() * 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        let near = laplace_check(2, 1.0, 1e4).unwrap();
        let far = laplace_check(2, 1.0, 1e2).unwrap();
        assert!((far.ratio - 1.0).abs() > (near.ratio - 1.0).abs());
        // exact for L = 2: ratio = erf(sqrt(2c)) - (1 - e^{-2c}) / sqrt(2 pi c)
        let c0: f64 = 1e2;
        let exact = erf((2.0 * c0).sqrt()) - (1.0 - (-2.0 * c0).exp()) / (2.0 * PI * c0).sqrt();
        assert_abs_diff_eq!(far.ratio, exact, epsilon = 1e-10);
    }
}
