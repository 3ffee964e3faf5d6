//! Small dense helpers and a banded LU factorization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sq, Real};

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Real> Sym2<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Self {
        Self { xx, xy, yy }
    }

    pub fn diag(a: T, b: T) -> Self {
        Self::new(a, T::zero(), b)
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn trace(&self) -> T {
        self.xx + self.yy
    }

    pub fn det(&self) -> T {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Frobenius norm squared.
    pub fn norm_sq(&self) -> T {
        sq(self.xx) + sq(self.yy) + T::lit(2.0) * sq(self.xy)
    }

    pub fn scale(&self, c: T) -> Self {
        Self::new(self.xx * c, self.xy * c, self.yy * c)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }

    /// Matrix square `A * A`.
    pub fn square(&self) -> Self {
        Self::new(
            sq(self.xx) + sq(self.xy),
            self.xy * (self.xx + self.yy),
            sq(self.xy) + sq(self.yy),
        )
    }

    /// `A(v, w)`.
    pub fn bilinear(&self, v: [T; 2], w: [T; 2]) -> T {
        v[0] * (self.xx * w[0] + self.xy * w[1]) + v[1] * (self.xy * w[0] + self.yy * w[1])
    }

    /// `A v`.
    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// Eigenvalues in increasing order with unit eigenvectors.
    pub fn eigen(&self) -> ([T; 2], [[T; 2]; 2]) {
        let half = T::lit(0.5);
        let m = (self.xx + self.yy) * half;
        let d = (self.xx - self.yy) * half;
        let r = d.hypot(self.xy);
        let lo = m - r;
        let hi = m + r;
        // Angle of the eigenvector of the larger eigenvalue.
        let ang = half * self.xy.atan2(d);
        let (c, s) = (ang.cos(), ang.sin());
        ([lo, hi], [[-s, c], [c, s]])
    }
}

/// Square band matrix with `bw` sub- and super-diagonals, stored row-wise.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![T::zero(); n * (2 * bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.bw >= i && j <= i + self.bw);
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if j + self.bw < i || j > i + self.bw {
            T::zero()
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw).min(self.n - 1);
                let mut acc = T::zero();
                for j in lo..=hi {
                    acc += self.data[self.idx(i, j)] * x[j];
                }
                acc
            })
            .collect()
    }

    /// In-place LU factorization without pivoting.
    pub fn factor(mut self) -> Result<BandLu<T>> {
        let n = self.n;
        let bw = self.bw;
        let w = 2 * bw + 1;
        for k in 0..n {
            let pivot = self.data[k * w + bw];
            if pivot == T::zero() || !pivot.is_finite() {
                return Err(Error::Singular(k));
            }
            let inv = pivot.recip();
            let jmax = (k + bw).min(n - 1);
            let imax = (k + bw).min(n - 1);
            let row_k = k * w + bw - k;
            for i in (k + 1)..=imax {
                let ik = i * w + (k + bw - i);
                let l = self.data[ik] * inv;
                if l == T::zero() {
                    continue;
                }
                self.data[ik] = l;
                let row_i = i * w + bw - i;
                let (head, tail) = self.data.split_at_mut(row_i + k + 1);
                let src = &head[row_k + k + 1..=row_k + jmax];
                let dst = &mut tail[..jmax - k];
                for (d, v) in dst.iter_mut().zip(src) {
                    *d -= l * *v;
                }
            }
        }
        Ok(BandLu { m: self })
    }
}

/// Factorization produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    m: BandMatrix<T>,
}

impl<T: Real> BandLu<T> {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.m.n;
        let bw = self.m.bw;
        let w = 2 * bw + 1;
        let d = &self.m.data;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut acc = b[i];
            let row = i * w + bw - i;
            for j in lo..i {
                acc -= d[row + j] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let row = i * w + bw - i;
            let mut acc = b[i];
            for j in (i + 1)..=hi {
                acc -= d[row + j] * b[j];
            }
            b[i] = acc / d[row + i];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
