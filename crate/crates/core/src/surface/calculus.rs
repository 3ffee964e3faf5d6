//! Finite-difference calculus on profile curves and graph grids.
//!
//! All stencils are second order. Interior samples use central
//! differences and the first and last samples of every line use one-sided
//! second-order formulas, so every derivative is defined everywhere.
//! Nested derivatives lose accuracy near the ends, which residual norms
//! account for through their interior margin.

use rayon::prelude::*;

use crate::scalar::{sq, Real};

/// First derivative of uniformly spaced samples.
pub fn d1<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    if n < 3 {
        return out;
    }
    let inv2h = (T::lit(2.0) * h).recip();
    let (three, four) = (T::lit(3.0), T::lit(4.0));
    out[0] = (-three * f[0] + four * f[1] - f[2]) * inv2h;
    out[n - 1] = (three * f[n - 1] - four * f[n - 2] + f[n - 3]) * inv2h;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv2h;
    }
    out
}

/// Second derivative of uniformly spaced samples.
pub fn d2<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    if n < 4 {
        return out;
    }
    let invh2 = sq(h).recip();
    let (two, four, five) = (T::lit(2.0), T::lit(4.0), T::lit(5.0));
    out[0] = (two * f[0] - five * f[1] + four * f[2] - f[3]) * invh2;
    out[n - 1] = (two * f[n - 1] - five * f[n - 2] + four * f[n - 3] - f[n - 4]) * invh2;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - two * f[i] + f[i - 1]) * invh2;
    }
    out
}

/// Uniform grid stored row-major: index `j * nx + i` for column `i`, row `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridShape<T> {
    pub nx: usize,
    pub ny: usize,
    pub h: T,
}

impl<T: Real> GridShape<T> {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies a 1-D operator along every row (the `x` direction).
    fn along_x(&self, f: &[T], op: fn(&[T], T) -> Vec<T>) -> Vec<T> {
        let mut out = vec![T::zero(); f.len()];
        out.par_chunks_mut(self.nx)
            .zip(f.par_chunks(self.nx))
            .for_each(|(o, row)| o.copy_from_slice(&op(row, self.h)));
        out
    }

    /// Applies a 1-D operator along every column (the `y` direction).
    fn along_y(&self, f: &[T], op: fn(&[T], T) -> Vec<T>) -> Vec<T> {
        let cols: Vec<Vec<T>> = (0..self.nx)
            .into_par_iter()
            .map(|i| {
                let col: Vec<T> = (0..self.ny).map(|j| f[self.idx(i, j)]).collect();
                op(&col, self.h)
            })
            .collect();
        let mut out = vec![T::zero(); f.len()];
        for (i, col) in cols.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                out[j * self.nx + i] = *v;
            }
        }
        out
    }

    pub fn dx(&self, f: &[T]) -> Vec<T> {
        self.along_x(f, d1)
    }

    pub fn dy(&self, f: &[T]) -> Vec<T> {
        self.along_y(f, d1)
    }

    pub fn dxx(&self, f: &[T]) -> Vec<T> {
        self.along_x(f, d2)
    }

    pub fn dyy(&self, f: &[T]) -> Vec<T> {
        self.along_y(f, d2)
    }

    /// Mixed derivative as the composition of the two first-derivative operators.
    pub fn dxy(&self, f: &[T]) -> Vec<T> {
        self.dy(&self.dx(f))
    }

    /// Whether `(i, j)` lies at least `margin` nodes away from the boundary.
    pub fn interior(&self, i: usize, j: usize, margin: usize) -> bool {
        i >= margin && j >= margin && i + margin < self.nx && j + margin < self.ny
    }
}

/// All first and second partial derivatives of a grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Partials<T> {
    pub fx: Vec<T>,
    pub fy: Vec<T>,
    pub fxx: Vec<T>,
    pub fxy: Vec<T>,
    pub fyy: Vec<T>,
}

impl<T: Real> Partials<T> {
    pub fn of(g: &GridShape<T>, f: &[T]) -> Self {
        let fx = g.dx(f);
        let fy = g.dy(f);
        let fxy = g.dy(&fx);
        Self {
            fxx: g.dxx(f),
            fyy: g.dyy(f),
            fx,
            fy,
            fxy,
        }
    }
}

/// Intrinsic calculus on a graph `z = u(x, y)` in coordinates `(x, y)`.
///
/// Uses the metric `g = I + du du`, its inverse `I - du du / W^2`, and the
/// Christoffel symbols `Gamma^k_ij = u_ij u_k / W^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphCalculus<T> {
    pub shape: GridShape<T>,
    pub u: Partials<T>,
    pub w2: Vec<T>,
}

impl<T: Real> GraphCalculus<T> {
    pub fn new(shape: GridShape<T>, heights: &[T]) -> Self {
        let u = Partials::of(&shape, heights);
        let w2 =
            u.fx.iter()
                .zip(&u.fy)
                .map(|(&p, &q)| T::one() + p * p + q * q)
                .collect();
        Self { shape, u, w2 }
    }

    /// Inverse metric `(g^11, g^12, g^22)` at node `k`.
    #[inline]
    pub fn ginv(&self, k: usize) -> [T; 3] {
        let (p, q, w2) = (self.u.fx[k], self.u.fy[k], self.w2[k]);
        [(T::one() + q * q) / w2, -(p * q) / w2, (T::one() + p * p) / w2]
    }

    /// Second fundamental form `h_ij = -u_ij / W` in coordinates.
    #[inline]
    pub fn second_form(&self, k: usize) -> [T; 3] {
        let w = self.w2[k].sqrt();
        [-self.u.fxx[k] / w, -self.u.fxy[k] / w, -self.u.fyy[k] / w]
    }

    /// Covariant Hessian of a function from its coordinate partials.
    #[inline]
    pub fn hessian_at(&self, k: usize, f: &Partials<T>) -> [T; 3] {
        let c = (self.u.fx[k] * f.fx[k] + self.u.fy[k] * f.fy[k]) / self.w2[k];
        [
            f.fxx[k] - self.u.fxx[k] * c,
            f.fxy[k] - self.u.fxy[k] * c,
            f.fyy[k] - self.u.fyy[k] * c,
        ]
    }

    /// Metric trace of a symmetric 2-tensor.
    #[inline]
    pub fn trace(&self, k: usize, a: [T; 3]) -> T {
        let gi = self.ginv(k);
        gi[0] * a[0] + T::lit(2.0) * gi[1] * a[1] + gi[2] * a[2]
    }

    /// Raises the index of a covector.
    #[inline]
    pub fn raise(&self, k: usize, w: [T; 2]) -> [T; 2] {
        let gi = self.ginv(k);
        [gi[0] * w[0] + gi[1] * w[1], gi[1] * w[0] + gi[2] * w[1]]
    }

    /// Metric norm squared of a covector.
    #[inline]
    pub fn covector_norm_sq(&self, k: usize, w: [T; 2]) -> T {
        let v = self.raise(k, w);
        v[0] * w[0] + v[1] * w[1]
    }

    /// Metric norm squared of a symmetric 2-tensor.
    #[inline]
    pub fn tensor_norm_sq(&self, k: usize, a: [T; 3]) -> T {
        let gi = self.ginv(k);
        let m11 = gi[0] * a[0] + gi[1] * a[1];
        let m12 = gi[0] * a[1] + gi[1] * a[2];
        let m21 = gi[1] * a[0] + gi[2] * a[1];
        let m22 = gi[1] * a[1] + gi[2] * a[2];
        m11 * m11 + T::lit(2.0) * m12 * m21 + m22 * m22
    }

    /// `A g^-1 B` for symmetric tensors given as `(11, 12, 22)`.
    #[inline]
    pub fn contract(&self, k: usize, a: [T; 3], b: [T; 3]) -> [T; 3] {
        let gi = self.ginv(k);
        let a_full = [[a[0], a[1]], [a[1], a[2]]];
        let b_full = [[b[0], b[1]], [b[1], b[2]]];
        let g_full = [[gi[0], gi[1]], [gi[1], gi[2]]];
        let mut out = [[T::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (kk, gk) in g_full.iter().enumerate() {
                    for (l, gkl) in gk.iter().enumerate() {
                        acc += a_full[i][kk] * *gkl * b_full[l][j];
                    }
                }
                *v = acc;
            }
        }
        [out[0][0], out[0][1], out[1][1]]
    }

    /// Pushes a coordinate tangent vector into ambient space.
    #[inline]
    pub fn push(&self, k: usize, v: [T; 2]) -> [T; 3] {
        [v[0], v[1], self.u.fx[k] * v[0] + self.u.fy[k] * v[1]]
    }

    /// Orthonormal tangent frame in coordinates: `E1` along `d/dx`, `E2` by Gram-Schmidt.
    #[inline]
    pub fn frame(&self, k: usize) -> [[T; 2]; 2] {
        let (p, q) = (self.u.fx[k], self.u.fy[k]);
        let g11 = T::one() + p * p;
        let s = g11.sqrt();
        let w = self.w2[k].sqrt();
        [[s.recip(), T::zero()], [-(p * q) / (s * w), s / w]]
    }

    /// Components `A(E_a, E_b)` in the orthonormal frame.
    #[inline]
    pub fn to_frame(&self, k: usize, a: [T; 3]) -> [T; 3] {
        let e = self.frame(k);
        let ev = |x: [T; 2], y: [T; 2]| x[0] * (a[0] * y[0] + a[1] * y[1]) + x[1] * (a[1] * y[0] + a[2] * y[1]);
        [ev(e[0], e[0]), ev(e[0], e[1]), ev(e[1], e[1])]
    }

    /// Covariant derivative `(nabla_k h)_ij` for `k = 1, 2` from coordinate
    /// partials of the component fields of a symmetric tensor.
    pub fn tensor_derivative_at(&self, k: usize, comp: &[T; 3], dx: &[T; 3], dy: &[T; 3]) -> [[T; 3]; 2] {
        let (p, q, w2) = (self.u.fx[k], self.u.fy[k], self.w2[k]);
        let uij = [[self.u.fxx[k], self.u.fxy[k]], [self.u.fxy[k], self.u.fyy[k]]];
        let du = [p, q];
        let full = [[comp[0], comp[1]], [comp[1], comp[2]]];
        let mut out = [[T::zero(); 3]; 2];
        for (d, o) in out.iter_mut().enumerate() {
            let partial = if d == 0 { dx } else { dy };
            let pf = [[partial[0], partial[1]], [partial[1], partial[2]]];
            let mut res = [[T::zero(); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let mut v = pf[i][j];
                    for l in 0..2 {
                        // Gamma^l_{d i} = u_{d i} u_l / W^2
                        v -= uij[d][i] * du[l] / w2 * full[l][j];
                        v -= uij[d][j] * du[l] / w2 * full[i][l];
                    }
                    res[i][j] = v;
                }
            }
            *o = [res[0][0], res[0][1], res[1][1]];
        }
        out
    }
}

/// Intrinsic calculus along a profile curve with metric `ds^2 + w(s)^2 dt^2`.
///
/// The warp rate `a = w'/w` is `cos(theta)/x` for surfaces of revolution and
/// zero for translation-invariant surfaces. At an axis sample `a` is set to
/// zero; such samples always fall inside the interior margin.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCalculus<T> {
    pub h: T,
    pub a: Vec<T>,
    pub rotational: bool,
    pub x: Vec<T>,
}

impl<T: Real> ProfileCalculus<T> {
    pub fn d(&self, f: &[T]) -> Vec<T> {
        d1(f, self.h)
    }

    pub fn dd(&self, f: &[T]) -> Vec<T> {
        d2(f, self.h)
    }

    /// Laplacian `f'' + a f'` of a function of arclength.
    pub fn laplacian(&self, f: &[T]) -> Vec<T> {
        let f1 = self.d(f);
        let f2 = self.dd(f);
        (0..f.len()).map(|i| f2[i] + self.a[i] * f1[i]).collect()
    }

    /// Diagonal of the Hessian `(f'', a f')` in the frame `(e_s, e_t)`.
    pub fn hessian(&self, f: &[T]) -> (Vec<T>, Vec<T>) {
        let f1 = self.d(f);
        let f2 = self.dd(f);
        let tt = (0..f.len()).map(|i| self.a[i] * f1[i]).collect();
        (f2, tt)
    }
}
