//! Principal frames and the covariant derivatives of the shape operator.

use crate::error::Result;
use crate::scalar::{sq, Real};

use super::calculus::GraphCalculus;
use super::{GeometryField, Surface};

/// Principal directions with the coefficients of the shape-operator derivative.
///
/// All vectors are in the orthonormal sample frame. Entries that need a
/// non-umbilic point are `None` at umbilic samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalData<T> {
    /// Unit direction of `k1` (the smaller principal curvature).
    pub v1: Vec<[T; 2]>,
    /// Unit direction of `k2`.
    pub v2: Vec<[T; 2]>,
    pub umbilic: Vec<bool>,
    /// `alpha_i = h_{12,i} / (k1 - k2)`.
    pub alpha: Vec<Option<[T; 2]>>,
    /// `h_{12,1}^2 + h_{12,2}^2`.
    pub q_squared: Vec<Option<T>>,
    /// `h_{11,2}^2 + h_{22,1}^2`.
    pub q_squared_alt: Vec<Option<T>>,
    /// Threshold on `|k1 - k2|` below which a sample counts as umbilic.
    pub umbilic_threshold: T,
}

impl<T: Real> PrincipalData<T> {
    /// Largest difference between the two expressions of `Q^2` over samples
    /// at least `margin` from the boundary.
    pub fn q_squared_mismatch(&self, field: &GeometryField<T>, margin: usize) -> T {
        let mut m = T::zero();
        for k in 0..self.q_squared.len() {
            if !field.is_interior(k, margin) {
                continue;
            }
            if let (Some(a), Some(b)) = (self.q_squared[k], self.q_squared_alt[k]) {
                m = m.max((a - b).abs());
            }
        }
        m
    }
}

/// Covariant derivative of the second fundamental form on a graph, in
/// coordinates: entry `[d]` holds `(nabla_d h)_{11, 12, 22}`.
pub(crate) fn graph_shape_derivative<T: Real>(gc: &GraphCalculus<T>) -> Vec<[[T; 3]; 2]> {
    let n = gc.w2.len();
    let comps: Vec<[T; 3]> = (0..n).map(|k| gc.second_form(k)).collect();
    let col = |c: usize| comps.iter().map(|v| v[c]).collect::<Vec<T>>();
    let (h11, h12, h22) = (col(0), col(1), col(2));
    let dx = [gc.shape.dx(&h11), gc.shape.dx(&h12), gc.shape.dx(&h22)];
    let dy = [gc.shape.dy(&h11), gc.shape.dy(&h12), gc.shape.dy(&h22)];
    (0..n)
        .map(|k| {
            gc.tensor_derivative_at(
                k,
                &comps[k],
                &[dx[0][k], dx[1][k], dx[2][k]],
                &[dy[0][k], dy[1][k], dy[2][k]],
            )
        })
        .collect()
}

/// Adds principal directions, `alpha_i` and both expressions of `Q^2`.
///
/// `umbilic_threshold` defaults to `1e-8 max |S|`.
pub fn principal_frame<T: Real>(field: &GeometryField<T>, umbilic_threshold: Option<T>) -> Result<GeometryField<T>> {
    let n = field.len();
    let max_s = field.shape.iter().fold(T::zero(), |m, s| m.max(s.norm_sq().sqrt()));
    let delta = umbilic_threshold.unwrap_or(T::lit(1e-8) * max_s);
    let mut data = PrincipalData {
        v1: Vec::with_capacity(n),
        v2: Vec::with_capacity(n),
        umbilic: Vec::with_capacity(n),
        alpha: vec![None; n],
        q_squared: vec![None; n],
        q_squared_alt: vec![None; n],
        umbilic_threshold: delta,
    };
    for k in 0..n {
        let (ev, vecs) = field.shape[k].eigen();
        data.v1.push(vecs[0]);
        data.v2.push(vecs[1]);
        data.umbilic.push(!((ev[1] - ev[0]).abs() > delta));
    }

    match &field.source {
        Surface::Profile(_) => {
            let pc = field.profile_calc().expect("profile calculus");
            let ks: Vec<T> = field.shape.iter().map(|s| s.xx).collect();
            let kt: Vec<T> = field.shape.iter().map(|s| s.yy).collect();
            let dkt = pc.d(&kt);
            for k in 0..n {
                if data.umbilic[k] {
                    continue;
                }
                // Frame (e_s, e_t): h_{st,t} = a (k_s - k_t), h_{tt,s} = k_t', the
                // remaining mixed coefficients vanish by symmetry.
                let h_st_t = pc.a[k] * (ks[k] - kt[k]);
                let meridian_first = ks[k] <= kt[k];
                let (h12_1, h12_2) = if meridian_first {
                    (T::zero(), h_st_t)
                } else {
                    (h_st_t, T::zero())
                };
                let gap = field.k1[k] - field.k2[k];
                data.alpha[k] = Some([h12_1 / gap, h12_2 / gap]);
                data.q_squared[k] = Some(sq(h12_1) + sq(h12_2));
                data.q_squared_alt[k] = Some(sq(dkt[k]));
            }
        }
        Surface::Graph(_) => {
            let gc = field.graph_calc().expect("graph calculus");
            let dh = graph_shape_derivative(gc);
            for k in 0..n {
                if data.umbilic[k] {
                    continue;
                }
                let e = gc.frame(k);
                let coords =
                    |v: [T; 2]| -> [T; 2] { [v[0] * e[0][0] + v[1] * e[1][0], v[0] * e[0][1] + v[1] * e[1][1]] };
                let v = [coords(data.v1[k]), coords(data.v2[k])];
                let coeff = |a: usize, b: usize, c: usize| -> T {
                    let mut acc = T::zero();
                    for (d, dd) in dh[k].iter().enumerate() {
                        let full = [[dd[0], dd[1]], [dd[1], dd[2]]];
                        for i in 0..2 {
                            for j in 0..2 {
                                acc += v[a][i] * v[b][j] * v[c][d] * full[i][j];
                            }
                        }
                    }
                    acc
                };
                let h12_1 = coeff(0, 1, 0);
                let h12_2 = coeff(0, 1, 1);
                let h11_2 = coeff(0, 0, 1);
                let h22_1 = coeff(1, 1, 0);
                let gap = field.k1[k] - field.k2[k];
                data.alpha[k] = Some([h12_1 / gap, h12_2 / gap]);
                data.q_squared[k] = Some(sq(h12_1) + sq(h12_2));
                data.q_squared_alt[k] = Some(sq(h11_2) + sq(h22_1));
            }
        }
    }
    let mut out = field.clone();
    out.principal = Some(data);
    Ok(out)
}
