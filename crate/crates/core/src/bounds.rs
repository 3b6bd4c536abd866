//! Closed-form capacity bounds and exponents for `(N, L-1)` multiple packings.
//!
//! All rates are in nats per dimension and may be negative; nothing is clamped.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Noise power `N` and list size `L` (a packing tolerates `L - 1` overlaps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    noise: f64,
    list_len: usize,
}

impl BoundQuery {
    pub fn new(noise: f64, list_len: usize) -> Result<Self> {
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(Error::InvalidInput(format!("N must be positive and finite, got {noise}")));
        }
        if list_len < 2 {
            return Err(Error::InvalidInput(format!("L must be >= 2, got {list_len}")));
        }
        Ok(Self { noise, list_len })
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn list_len(&self) -> usize {
        self.list_len
    }

    fn l(&self) -> f64 {
        self.list_len as f64
    }

    /// `ln((L-1) / (2 pi e N L))`, the common core of most bounds.
    fn core_log(&self) -> f64 {
        let l = self.l();
        ((l - 1.0) / (2.0 * PI * E * self.noise * l)).ln()
    }
}

/// A [`BoundQuery`] plus the half-width `K` of the cube `[-K, K]^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentQuery {
    pub query: BoundQuery,
    half_width: f64,
}

impl ExponentQuery {
    pub fn new(query: BoundQuery, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidInput(format!("K must be positive and finite, got {half_width}")));
        }
        Ok(Self { query, half_width })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

/// Lower bound achieved by expurgated random codes on a cube:
/// `1/2 ln((L-1)/(2 pi e N L)) - ln L / (2(L-1))`.
pub fn lb_ppp(q: BoundQuery) -> f64 {
    let l = q.l();
    0.5 * q.core_log() - l.ln() / (2.0 * (l - 1.0))
}

/// Unbounded adaptation of the Blachman–Few lower bound: `1/2 ln((L-1)/(4 pi e N L))`.
pub fn lb_blachman_few(q: BoundQuery) -> f64 {
    let l = q.l();
    0.5 * ((l - 1.0) / (4.0 * PI * E * q.noise * l)).ln()
}

/// Elias–Bassalygo-type upper bound: `1/2 ln((L-1)/(2 pi e N L))`.
pub fn ub_elias_bassalygo(q: BoundQuery) -> f64 {
    0.5 * q.core_log()
}

/// Large-`L` list-decoding capacity `1/2 ln(1/(2 pi e N))`.
pub fn ld_capacity(noise: f64) -> f64 {
    0.5 * (1.0 / (2.0 * PI * E * noise)).ln()
}

/// Exponent of `P(avg_sq_radius <= nN)` for `L` uniform points on `[-K, K]^n`:
/// `(L-1)/2 ln((L-1)/(2 pi e N L)) - 1/2 ln L + (L-1) ln(2K)`.
///
/// The probability decays like `exp(-n E(K))`.
pub fn exponent_e(q: ExponentQuery) -> f64 {
    let l = q.query.l();
    (l - 1.0) / 2.0 * q.query.core_log() - 0.5 * l.ln() + (l - 1.0) * (2.0 * q.half_width).ln()
}

/// Maximiser of `lambda -> -L N lambda + (L-1)/2 ln lambda`: `(L-1)/(2 L N)`.
pub fn lambda_star(q: BoundQuery) -> f64 {
    let l = q.l();
    (l - 1.0) / (2.0 * l * q.noise)
}

/// The objective maximised by [`lambda_star`].
pub fn tilt_objective(q: BoundQuery, lambda: f64) -> f64 {
    let l = q.l();
    -l * q.noise * lambda + (l - 1.0) / 2.0 * lambda.ln()
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `ln lambda_n = ln(L!/2)/(L-1) + n * lb_ppp`.
///
/// The sub-exponential `e^{o(n)}` slack of the asymptotic argument is dropped.
/// `K` cancels out; it is accepted so the call site mirrors the construction.
pub fn log_lambda_n_threshold(q: ExponentQuery, n: usize) -> f64 {
    let l = q.query.l();
    (ln_factorial(q.query.list_len) - 2f64.ln()) / (l - 1.0) + n as f64 * lb_ppp(q.query)
}

/// Critical point density (points per unit volume) at which the expected number of
/// bad lists is half the expected code size.
pub fn lambda_n_threshold(q: ExponentQuery, n: usize) -> f64 {
    log_lambda_n_threshold(q, n).exp()
}

/// `lim (1/n) ln |B^n(sqrt(nN))| = 1/2 ln(2 pi e N)`.
pub fn ball_log_volume_rate(noise: f64) -> f64 {
    0.5 * (2.0 * PI * E * noise).ln()
}

/// `(1/n) ln |B^n(sqrt(nN))|` at finite `n`, via log-gamma.
pub fn ball_log_volume_rate_finite(n: usize, noise: f64) -> f64 {
    let nf = n as f64;
    0.5 * (nf * noise).ln() + log_unit_ball_volume(n) / nf
}

/// `ln(pi^{n/2} / Gamma(n/2 + 1))`.
pub fn log_unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    half * PI.ln() - ln_gamma(half + 1.0)
}

/// One row of the bounds curve file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub noise: f64,
    pub lb_ppp: f64,
    pub lb_blachman_few: f64,
    pub ub_elias_bassalygo: f64,
    pub ld_capacity: f64,
}

pub const CURVE_HEADER: &str = "N,lb_ppp,lb_blachman_few,ub_elias_bassalygo,ld_capacity";

impl CurveRow {
    pub fn evaluate(noise: f64, list_len: usize) -> Result<Self> {
        let q = BoundQuery::new(noise, list_len)?;
        Ok(Self {
            noise,
            lb_ppp: lb_ppp(q),
            lb_blachman_few: lb_blachman_few(q),
            ub_elias_bassalygo: ub_elias_bassalygo(q),
            ld_capacity: ld_capacity(noise),
        })
    }

    pub fn values(&self) -> [f64; 5] {
        [self.noise, self.lb_ppp, self.lb_blachman_few, self.ub_elias_bassalygo, self.ld_capacity]
    }
}

/// Formats with 12 significant digits, e.g. `1.23456789012e-1`.
pub fn format_sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Rounds to the value [`format_sig12`] represents.
pub fn round_sig12(v: f64) -> f64 {
    format_sig12(v).parse().expect("formatted float parses")
}

/// Log-spaced grid of `steps` values from `min` to `max`, each rounded to 12
/// significant digits so a written grid re-parses to the exact evaluation points.
pub fn geometric_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) || !(max >= min) || !max.is_finite() {
        return Err(Error::InvalidInput(format!("need 0 < N_min <= N_max, got [{min}, {max}]")));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be >= 1".into()));
    }
    if steps == 1 {
        return Ok(vec![round_sig12(min)]);
    }
    let (lo, hi) = (min.ln(), max.ln());
    Ok((0..steps)
        .map(|i| {
            let v = if i + 1 == steps { max } else { (lo + (hi - lo) * i as f64 / (steps - 1) as f64).exp() };
            round_sig12(v)
        })
        .collect())
}

pub fn curve_rows(list_len: usize, grid: &[f64]) -> Result<Vec<CurveRow>> {
    grid.iter().map(|&n| CurveRow::evaluate(n, list_len)).collect()
}

pub fn render_curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CURVE_HEADER}");
    for r in rows {
        let fields: Vec<String> = r.values().iter().map(|&v| format_sig12(v)).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CURVE_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: format!("expected header `{CURVE_HEADER}`") }),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        if v.len() != 5 {
            return Err(Error::Parse { line: i + 1, message: format!("expected 5 fields, got {}", v.len()) });
        }
        rows.push(CurveRow {
            noise: v[0],
            lb_ppp: v[1],
            lb_blachman_few: v[2],
            ub_elias_bassalygo: v[3],
            ld_capacity: v[4],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(noise: f64, l: usize) -> BoundQuery {
        BoundQuery::new(noise, l).unwrap()
    }

    fn eq(noise: f64, l: usize, k: f64) -> ExponentQuery {
        ExponentQuery::new(q(noise, l), k).unwrap()
    }

    #[test]
    fn query_validation() {
        assert!(BoundQuery::new(0.0, 3).is_err());
        assert!(BoundQuery::new(-1.0, 3).is_err());
        assert!(BoundQuery::new(0.1, 1).is_err());
        assert!(ExponentQuery::new(q(0.1, 3), 0.0).is_err());
    }

    #[test]
    fn lb_ppp_examples() {
        assert_abs_diff_eq!(lb_ppp(q(1.0 / (8.0 * PI * E), 2)), 0.0, epsilon = 1e-15);
        let expected = 0.5 * (1.0 / (0.08 * PI * E)).ln();
        assert_abs_diff_eq!(lb_ppp(q(0.01, 2)), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.190_50, epsilon = 1e-5);
    }

    #[test]
    fn lb_ppp_increases_toward_capacity() {
        let noise = 0.02;
        let cap = ld_capacity(noise);
        let mut prev = f64::NEG_INFINITY;
        for l in [2usize, 3, 5, 10, 100, 1000, 10_000, 100_000, 1_000_000] {
            let v = lb_ppp(q(noise, l));
            assert!(v > prev && v < cap);
            prev = v;
        }
        assert!(cap - prev < 1e-4);
    }

    #[test]
    fn blachman_few_examples() {
        assert_abs_diff_eq!(lb_blachman_few(q(1.0 / (8.0 * PI * E), 2)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lb_blachman_few(q(0.03, 5)), 0.5 * (4.0 / (0.6 * PI * E)).ln(), epsilon = 1e-14);
        for (n, l) in [(0.01, 2), (0.2, 7), (1e-3, 40)] {
            let lf = l as f64;
            let gap = lb_ppp(q(n, l)) - lb_blachman_few(q(n, l));
            assert_abs_diff_eq!(gap, 0.5 * 2f64.ln() - lf.ln() / (2.0 * (lf - 1.0)), epsilon = 1e-12);
        }
    }

    #[test]
    fn elias_bassalygo_examples() {
        assert_abs_diff_eq!(ub_elias_bassalygo(q(1.0 / (4.0 * PI * E), 2)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ub_elias_bassalygo(q(0.01, 5)), 0.5 * (4.0 / (0.1 * PI * E)).ln(), epsilon = 1e-14);
    }

    #[test]
    fn capacity_examples() {
        assert_abs_diff_eq!(ld_capacity(1.0 / (2.0 * PI * E)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ld_capacity(0.01), 0.5 * (100.0 / (2.0 * PI * E)).ln(), epsilon = 1e-15);
        let l = 10_000usize;
        let diff = ub_elias_bassalygo(q(0.01, l)) - ld_capacity(0.01);
        assert_abs_diff_eq!(diff, 0.5 * ((l as f64 - 1.0) / l as f64).ln(), epsilon = 1e-12);
        assert!(diff < 0.0 && diff > -1e-4);
    }

    #[test]
    fn exponent_examples() {
        let e = exponent_e(eq(0.01, 2, 1.0));
        assert_abs_diff_eq!(e, 0.5 * (1.0 / (0.04 * PI * E)).ln() - 0.5 * 2f64.ln() + 2f64.ln(), epsilon = 1e-14);
        let e3 = exponent_e(eq(0.05, 3, 2.0));
        assert_abs_diff_eq!(e3, (2.0 / (0.3 * PI * E)).ln() - 0.5 * 3f64.ln() + 2.0 * 4f64.ln(), epsilon = 1e-14);
        for l in [2usize, 4, 9] {
            let d = exponent_e(eq(0.07, l, 6.0)) - exponent_e(eq(0.07, l, 3.0));
            assert_abs_diff_eq!(d, (l as f64 - 1.0) * 2f64.ln(), epsilon = 1e-12);
        }
    }

    /// Golden-section maximisation, independent of the closed form.
    fn golden_argmax(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        while (b - a).abs() > 1e-13 * b.abs().max(1.0) {
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - r * (b - a);
            d = a + r * (b - a);
        }
        0.5 * (a + b)
    }

    #[test]
    fn lambda_star_examples() {
        assert_abs_diff_eq!(lambda_star(q(0.25, 2)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_star(q(0.1, 5)), 4.0, epsilon = 1e-14);
        for (n, l) in [(0.25, 2), (0.1, 5), (0.013, 3)] {
            let qq = q(n, l);
            let numeric = golden_argmax(|x| tilt_objective(qq, x), 1e-6, 1e3);
            // golden section pins a smooth maximum only to about sqrt(eps)
            assert!((numeric - lambda_star(qq)).abs() <= 1e-6 * lambda_star(qq).max(1.0));
        }
    }

    #[test]
    fn lambda_n_examples() {
        let n = 7;
        let v = lambda_n_threshold(eq(0.02, 2, 1.0), n);
        assert_abs_diff_eq!(v.ln(), n as f64 * 0.5 * (1.0 / (8.0 * PI * E * 0.02)).ln(), epsilon = 1e-12);

        let v3 = lambda_n_threshold(eq(0.05, 3, 1.0), 10);
        let expected = 3f64.sqrt() * (10.0 * (0.5 * (2.0 / (0.3 * PI * E)).ln() - 0.25 * 3f64.ln())).exp();
        assert_abs_diff_eq!(v3 / expected, 1.0, epsilon = 1e-12);

        let qq = eq(0.05, 3, 1.0);
        let per_dim = log_lambda_n_threshold(qq, 10_000) / 10_000.0;
        assert!((per_dim - lb_ppp(qq.query)).abs() <= 1e-3);
    }

    #[test]
    fn ball_volume_examples() {
        assert_abs_diff_eq!(ball_log_volume_rate(1.0 / (2.0 * PI * E)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ball_log_volume_rate(0.01), -ld_capacity(0.01), epsilon = 1e-15);
        assert_abs_diff_eq!(ball_log_volume_rate(0.01), 0.5 * (0.02 * PI * E).ln(), epsilon = 1e-15);
        let finite = ball_log_volume_rate_finite(1000, 1.0);
        assert!((finite - ball_log_volume_rate(1.0)).abs() < 5e-3);
        // unit disc and unit ball
        assert_abs_diff_eq!(log_unit_ball_volume(2), PI.ln(), epsilon = 1e-13);
        assert_abs_diff_eq!(log_unit_ball_volume(3), (4.0 * PI / 3.0).ln(), epsilon = 1e-13);
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(geometric_grid(0.5, 2.0, 1).unwrap(), vec![0.5]);
        let g = geometric_grid(1e-3, 0.06, 25).unwrap();
        assert_eq!(g.len(), 25);
        assert_abs_diff_eq!(g[0], 1e-3);
        assert_abs_diff_eq!(g[24], 0.06);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(geometric_grid(0.0, 1.0, 3).is_err());
        assert!(geometric_grid(1.0, 0.5, 3).is_err());
        assert!(geometric_grid(0.1, 1.0, 0).is_err());
    }

    #[test]
    fn curve_csv_round_trip() {
        let rows = curve_rows(4, &geometric_grid(1e-3, 0.06, 9).unwrap()).unwrap();
        let text = render_curve_csv(&rows);
        assert!(text.starts_with(CURVE_HEADER));
        let parsed = parse_curve_csv(&text).unwrap();
        for (p, r) in parsed.iter().zip(&rows) {
            assert_eq!(p.noise, r.noise);
            let again = CurveRow::evaluate(p.noise, 4).unwrap();
            assert_eq!(again, *r);
            for (a, b) in p.values().iter().zip(again.values()) {
                assert_eq!(format_sig12(*a), format_sig12(b));
            }
        }
        assert!(parse_curve_csv("N,foo\n").is_err());
    }
}
