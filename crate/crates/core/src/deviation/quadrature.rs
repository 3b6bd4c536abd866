//! Gauss–Legendre rules: fixed-order, tensor-product and adaptive composite.

use std::f64::consts::PI;

/// Nodes and weights of the `order`-point rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of `P_order` by Newton iteration from the Chebyshev-like initial guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be >= 1");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `int_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, f: &impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum();
        s * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product rule over `[-1, 1]^dim`; `f` receives the node vector.
pub fn tensor_integrate(rule: &GaussLegendre, dim: usize, f: &impl Fn(&[f64]) -> f64) -> f64 {
    let q = rule.order();
    let mut idx = vec![0usize; dim];
    let mut t = vec![rule.nodes[0]; dim];
    let mut total = 0.0;
    loop {
        let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
        total += w * f(&t);
        let mut axis = 0;
        loop {
            if axis == dim {
                return total;
            }
            idx[axis] += 1;
            if idx[axis] < q {
                t[axis] = rule.nodes[idx[axis]];
                break;
            }
            idx[axis] = 0;
            t[axis] = rule.nodes[0];
            axis += 1;
        }
    }
}

const MAX_DEPTH: usize = 32;

/// Adaptive composite rule over consecutive `breakpoints`: bisect a panel until
/// its single-panel estimate agrees with the sum over its halves to within
/// `abs_tol` (shared across the whole range in proportion to panel width), or
/// to within a few ulps of the panel value.
///
/// Features narrower than the node spacing of a panel are only seen if a
/// breakpoint sits near them.
pub fn adaptive_integrate(rule: &GaussLegendre, breakpoints: &[f64], abs_tol: f64, f: &impl Fn(f64) -> f64) -> f64 {
    let span = breakpoints.last().unwrap_or(&0.0) - breakpoints.first().unwrap_or(&0.0);
    if span <= 0.0 {
        return 0.0;
    }
    breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let whole = rule.integrate(w[0], w[1], f);
            refine(rule, w[0], w[1], whole, abs_tol / span, f, 0)
        })
        .sum()
}

fn refine(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    density_tol: f64,
    f: &impl Fn(f64) -> f64,
    depth: usize,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let split = left + right;
    let diff = (split - whole).abs();
    if diff <= density_tol * (b - a) || diff <= 16.0 * f64::EPSILON * split.abs() || depth >= MAX_DEPTH {
        return split;
    }
    refine(rule, a, mid, left, density_tol, f, depth + 1) + refine(rule, mid, b, right, density_tol, f, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_two_and_nodes_sorted() {
        for q in [1usize, 2, 3, 7, 16, 64, 128] {
            let r = GaussLegendre::new(q);
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2q_minus_1() {
        let r = GaussLegendre::new(5);
        for k in 0..10 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert_abs_diff_eq!(r.integrate(-1.0, 1.0, &|x: f64| x.powi(k)), exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn three_point_rule_matches_table() {
        let r = GaussLegendre::new(3);
        assert_abs_diff_eq!(r.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn tensor_rule_separable_integrand() {
        let r = GaussLegendre::new(12);
        let v = tensor_integrate(&r, 3, &|t: &[f64]| t.iter().map(|x| x.exp()).product());
        let one = 1f64.exp() - (-1f64).exp();
        assert_abs_diff_eq!(v, one.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn adaptive_resolves_steep_step() {
        let r = GaussLegendre::new(16);
        // f(x) + f(-x) = 1, so the integral over [-1, 1] is exactly 1
        let v = adaptive_integrate(&r, &[-1.0, 1.0], 1e-14, &|x: f64| 1.0 / (1.0 + (1e3 * x).exp()));
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_with_breakpoint_at_peak() {
        let r = GaussLegendre::new(16);
        let c = 1e6;
        let v = adaptive_integrate(&r, &[-1.0, -1e-2, 1e-2, 1.0], 1e-16, &|x: f64| (-c * x * x).exp());
        let exact = (PI / c).sqrt() * statrs::function::erf::erf(c.sqrt());
        assert_abs_diff_eq!(v / exact, 1.0, epsilon = 1e-11);
    }
}
