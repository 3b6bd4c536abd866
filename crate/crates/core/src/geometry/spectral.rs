use nalgebra::DMatrix;

use crate::{Error, Result};

/// `A = I - J/L` together with an orthonormal eigenbasis `U` and `D = diag(1, .., 1, 0)`,
/// so that `A = U D U^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub a: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl SpectralPair {
    pub fn list_len(&self) -> usize {
        self.a.nrows()
    }

    /// `l1` norm of the last column of `U` (the kernel direction of `A`).
    pub fn kernel_l1_norm(&self) -> f64 {
        let last = self.u.ncols() - 1;
        self.u.column(last).iter().map(|v| v.abs()).sum()
    }

    /// Length of the range of the kernel coordinate over `U^T [-1, 1]^L`, i.e. twice
    /// [`kernel_l1_norm`](Self::kernel_l1_norm).
    pub fn slab_width(&self) -> f64 {
        2.0 * self.kernel_l1_norm()
    }
}

/// Builds the Gram–Schmidt basis in closed form.
///
/// Column `k` (1-based, `k < L`) is `-1/sqrt(k(k+1))` on row 1 and on the
/// bottom `k-1` rows, `sqrt(k/(k+1))` on row `L-k+1`, and zero elsewhere. The
/// last column is constant `1/sqrt(L)`.
pub fn spectral_pair(list_len: usize) -> Result<SpectralPair> {
    if list_len < 2 {
        return Err(Error::InvalidInput(format!("L must be >= 2, got {list_len}")));
    }
    let l = list_len;
    let lf = l as f64;
    let a = DMatrix::from_fn(l, l, |i, j| if i == j { 1.0 - 1.0 / lf } else { -1.0 / lf });
    let mut u = DMatrix::zeros(l, l);
    for k in 1..l {
        let kf = k as f64;
        let neg = -1.0 / (kf * (kf + 1.0)).sqrt();
        let col = k - 1;
        u[(0, col)] = neg;
        u[(l - k, col)] = (kf / (kf + 1.0)).sqrt();
        for row in (l - k + 1)..l {
            u[(row, col)] = neg;
        }
    }
    for row in 0..l {
        u[(row, l - 1)] = 1.0 / lf.sqrt();
    }
    let d = DMatrix::from_fn(l, l, |i, j| if i == j && i + 1 < l { 1.0 } else { 0.0 });
    Ok(SpectralPair { a, u, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn l2_matches_closed_form() {
        let s = spectral_pair(2).unwrap();
        let h = 0.5f64.sqrt();
        let expected = DMatrix::from_row_slice(2, 2, &[-h, h, h, h]);
        assert!(max_abs(&(&s.u - expected)) <= 1e-15);
    }

    #[test]
    fn invariants_up_to_sixteen() {
        for l in 2..=16 {
            let s = spectral_pair(l).unwrap();
            let id = DMatrix::<f64>::identity(l, l);
            assert!(max_abs(&(s.u.transpose() * &s.u - &id)) <= 1e-12, "L = {l}");
            assert!(max_abs(&(&s.u * &s.d * s.u.transpose() - &s.a)) <= 1e-12, "L = {l}");
            assert!((s.kernel_l1_norm() - (l as f64).sqrt()).abs() <= 1e-12);
            assert!((s.slab_width() - 2.0 * (l as f64).sqrt()).abs() <= 1e-12);
            // first-row entries of the non-kernel columns are negative
            assert!((0..l - 1).all(|c| s.u[(0, c)] < 0.0));
        }
    }

    #[test]
    fn rejects_short_lists() {
        assert!(spectral_pair(1).is_err());
    }
}
