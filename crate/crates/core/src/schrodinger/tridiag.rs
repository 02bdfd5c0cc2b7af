//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the
//! eigenvalues, inverse iteration for the vectors.

use crate::error::{invalid, Error, Result};

/// Bisection stops once the bracket is this wide relative to the eigenvalue,
/// or when it can no longer shrink in floating point.
pub const EIGENVALUE_RTOL: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: usize = 400;
const INVERSE_ITERATIONS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diagonal: Vec<f64>,
    /// `off_diagonal[i]` couples `i` and `i + 1`.
    pub off_diagonal: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::DimensionMismatch {
                expected: diagonal.len().saturating_sub(1),
                got: off_diagonal.len(),
            });
        }
        Ok(Self { diagonal, off_diagonal })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.off_diagonal[i - 1];
                q = self.diagonal[i] - x - e * e / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) and its final bracket width.
    pub fn eigenvalue(&self, index: usize) -> Result<(f64, f64)> {
        if index >= self.dim() {
            return Err(invalid("k", format!("index {index} exceeds dimension {}", self.dim())));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs() + hi.abs()) + f64::MIN_POSITIVE;
        lo -= pad;
        hi += pad;
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok((mid, hi - lo));
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                return Ok((0.5 * (lo + hi), hi - lo));
            }
        }
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        if width <= EIGENVALUE_RTOL * mid.abs() {
            Ok((mid, width))
        } else {
            Err(Error::NoConvergence {
                iterations: MAX_BISECTION_STEPS,
                residual: width,
            })
        }
    }

    /// Solve `(T − shift) x = rhs` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, shift: f64, rhs: &mut [f64]) {
        let n = self.dim();
        if n == 1 {
            let d = self.diagonal[0] - shift;
            rhs[0] /= if d == 0.0 { f64::EPSILON } else { d };
            return;
        }
        // Rows of U carry up to two super-diagonals after pivoting.
        let mut d: Vec<f64> = self.diagonal.iter().map(|v| v - shift).collect();
        let mut du: Vec<f64> = self.off_diagonal.clone();
        let mut dl: Vec<f64> = self.off_diagonal.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let scale = self.gershgorin().1.abs().max(self.gershgorin().0.abs());
        let floor = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                rhs[i + 1] -= f * rhs[i];
                dl[i] = f;
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                du[i] = tmp;
                rhs.swap(i, i + 1);
                rhs[i + 1] -= f * rhs[i];
                dl[i] = f;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = floor;
        }
        rhs[n - 1] /= d[n - 1];
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
        }
    }

    /// Unit eigenvector for `lambda`, orthogonalized against `previous`.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.dim();
        // A deterministic start with no special symmetry.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_894_9).fract())
            .collect();
        normalize(&mut v);
        let (lo, hi) = self.gershgorin();
        let shift = lambda + 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
        for _ in 0..INVERSE_ITERATIONS {
            self.shifted_solve(shift, &mut v);
            for p in previous {
                let overlap = dot(&v, p);
                v.iter_mut().zip(p).for_each(|(a, b)| *a -= overlap * b);
            }
            normalize(&mut v);
        }
        v
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diagonal[i] * v[i];
                if i > 0 {
                    acc += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.off_diagonal[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// `‖T v − λ v‖₂` for a unit vector `v`.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(tv, x)| (tv - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}
