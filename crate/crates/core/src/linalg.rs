//! Symmetric cyclic tridiagonal systems.
//!
//! The Hessian of a periodic discrete action couples `t_n` only to
//! `t_{n-1}` and `t_{n+1}` (indices mod `q`). Gaussian elimination of such a
//! matrix fills in only the last row and column, so an `LDL^T` factorization
//! costs `O(q)` and its pivots give the inertia for free.

use alloc::vec;
use alloc::vec::Vec;

/// `A[i][i] = diag[i]`, `A[i][i+1 mod n] = A[i+1 mod n][i] = off[i]`.
///
/// For `n = 1` the single coupling enters twice (`A = diag + 2 off`), for
/// `n = 2` the two couplings add up; this is what differentiating a periodic
/// action with one or two free variables produces.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `A = L D L^T` with unit lower `L` supported on the subdiagonal and the
/// last row.
#[derive(Debug, Clone)]
pub struct CyclicLdl {
    pub pivots: Vec<f64>,
    sub: Vec<f64>,
    last: Vec<f64>,
}

impl CyclicTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(diag.len(), off.len());
        CyclicTridiag { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds `shift` to the diagonal.
    pub fn shifted(&self, shift: f64) -> Self {
        CyclicTridiag { diag: self.diag.iter().map(|d| d + shift).collect(), off: self.off.clone() }
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, xi)| d * xi).collect();
        for i in 0..n {
            let j = (i + 1) % n;
            y[i] += self.off[i] * x[j];
            y[j] += self.off[i] * x[i];
        }
        y
    }

    /// Dense row-major copy, for tests and tiny systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for (i, d) in self.diag.iter().enumerate() {
            a[i][i] += d;
            let j = (i + 1) % n;
            a[i][j] += self.off[i];
            a[j][i] += self.off[i];
        }
        a
    }

    /// Factorizes without pivoting. Returns the index of the first pivot
    /// with `|p| <= tiny` on failure.
    pub fn ldl(&self, tiny: f64) -> Result<CyclicLdl, usize> {
        let n = self.len();
        if n == 0 {
            return Ok(CyclicLdl { pivots: Vec::new(), sub: Vec::new(), last: Vec::new() });
        }
        let mut d = self.diag.clone();
        if n == 1 {
            d[0] += 2.0 * self.off[0];
            if d[0].abs() <= tiny || !d[0].is_finite() {
                return Err(0);
            }
            return Ok(CyclicLdl { pivots: d, sub: Vec::new(), last: Vec::new() });
        }
        // u[k] = A[k][k+1], w[k] = A[n-1][k] for k < n-2.
        let mut u: Vec<f64> = if n == 2 { vec![self.off[0] + self.off[1]] } else { self.off[..n - 1].to_vec() };
        let mut w = vec![0.0; n - 2];
        if n >= 3 {
            w[0] = self.off[n - 1];
        }
        let mut sub = vec![0.0; n - 1];
        let mut last = vec![0.0; n - 2];
        for k in 0..n - 1 {
            let p = d[k];
            if p.abs() <= tiny || !p.is_finite() {
                return Err(k);
            }
            sub[k] = u[k] / p;
            d[k + 1] -= sub[k] * u[k];
            if k < n - 2 {
                last[k] = w[k] / p;
                d[n - 1] -= last[k] * w[k];
                let fill = last[k] * u[k];
                if k + 1 < n - 2 {
                    w[k + 1] -= fill;
                } else {
                    u[n - 2] -= fill;
                }
            }
        }
        if d[n - 1].abs() <= tiny || !d[n - 1].is_finite() {
            return Err(n - 1);
        }
        Ok(CyclicLdl { pivots: d, sub, last })
    }
}

impl CyclicLdl {
    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut y = b.to_vec();
        if n == 0 {
            return y;
        }
        for k in 0..n - 1 {
            y[k + 1] -= self.sub[k] * y[k];
            if k + 2 < n {
                y[n - 1] -= self.last[k] * y[k];
            }
        }
        for (yk, p) in y.iter_mut().zip(&self.pivots) {
            *yk /= p;
        }
        for k in (0..n - 1).rev() {
            let mut v = y[k] - self.sub[k] * y[k + 1];
            if k + 2 < n {
                v -= self.last[k] * y[n - 1];
            }
            y[k] = v;
        }
        y
    }

    /// A direction of negative curvature: `d = L^-T e_k` for the first
    /// negative pivot `k`, so that `d^T A d = D_kk < 0`.
    pub fn negative_direction(&self) -> Option<Vec<f64>> {
        let n = self.pivots.len();
        let k = self.pivots.iter().position(|&p| p < 0.0)?;
        let mut d = vec![0.0; n];
        d[k] = 1.0;
        for j in (0..n - 1).rev() {
            let mut v = d[j] - self.sub[j] * d[j + 1];
            if j + 2 < n {
                v -= self.last[j] * d[n - 1];
            }
            d[j] = v;
        }
        Some(d)
    }

    /// Number of negative pivots, i.e. of negative eigenvalues of `A`.
    pub fn negative_count(&self) -> usize {
        self.pivots.iter().filter(|&&p| p < 0.0).count()
    }

    pub fn min_pivot(&self) -> f64 {
        self.pivots.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
