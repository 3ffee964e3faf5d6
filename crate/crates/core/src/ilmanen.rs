//! Geometry of the conformal space `(Omega, e^phi <.,.>)`.
//!
//! Indices `0, 1, 2` stand for the Euclidean frame `e1, e2, e3`. The
//! conformal frame is `e_i^phi = e^(-phi/2) e_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Sym2;
use crate::potential::{sampled_sup, Family, PotentialSpec};
use crate::scalar::{sq, Real};

/// Frame data of the conformal metric at one height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameQuantities<T> {
    pub z: T,
    /// `connection[i][j][k] = <D^phi_{e_i^phi} e_j^phi, e_k^phi>^phi`.
    pub connection: [[[T; 3]; 3]; 3],
    /// Sectional curvature of the plane spanned by `e_i^phi, e_j^phi`; diagonal unused (zero).
    pub sectional: [[T; 3]; 3],
    /// Bracket multiplying `e3` in the closed-form gradient of the sectional curvature.
    ///
    /// Equals `e^phi` times the `z`-derivative of `sectional[i][j]`.
    pub curvature_gradient_e3: [[T; 3]; 3],
    /// Norm of the gradient of `sectional[i][j]` measured in the conformal metric.
    pub curvature_gradient_norm: [[T; 3]; 3],
}

/// Sampled bounded-geometry diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedGeometryReport<T> {
    /// Supremum of `e^(-phi) max(d1^2, d2)` over the query range.
    pub sup_quantity: T,
    pub bounded: bool,
    /// `phi` is positive and increasing at the top of the sampled range.
    pub complete_hint: bool,
}

/// Shape data of a surface measured in the conformal metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalShape<T> {
    pub s_phi: Sym2<T>,
    pub k1_phi: T,
    pub k2_phi: T,
    pub h_phi: T,
}

/// Closed-form frame coefficients, sectional curvatures and curvature gradient.
///
/// A plane spanned by two frame vectors has sectional curvature
/// `-e^(-phi) d2 / 2` when it contains `e3` and `-e^(-phi) d1^2 / 4` otherwise.
pub fn frame_quantities<T: Real>(spec: &PotentialSpec<T>, z: T) -> Result<FrameQuantities<T>> {
    let e = spec.eval(z)?;
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let em = (-e.phi).exp();
    let c = half * (-e.phi * half).exp() * e.d1;
    let delta = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };

    let mut connection = [[[T::zero(); 3]; 3]; 3];
    for (i, ci) in connection.iter_mut().enumerate() {
        for (j, cij) in ci.iter_mut().enumerate() {
            for (k, v) in cij.iter_mut().enumerate() {
                *v = c * (delta(2, j) * delta(i, k) - delta(i, j) * delta(2, k));
            }
        }
    }

    let d1sq = sq(e.d1);
    let k_vertical = quarter * em * (d1sq - two * e.d2 - d1sq);
    let k_horizontal = -quarter * em * d1sq;
    let p_vertical = quarter * (two * (e.d1 * e.d2 - e.d3) + two * e.d1 * e.d2 - two * e.d1 * e.d2);
    let p_horizontal = quarter * (e.d1 * d1sq - two * e.d1 * e.d2);
    let norm_factor = (-T::lit(1.5) * e.phi).exp();

    let mut sectional = [[T::zero(); 3]; 3];
    let mut grad = [[T::zero(); 3]; 3];
    let mut grad_norm = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let vertical = i == 2 || j == 2;
            sectional[i][j] = if vertical { k_vertical } else { k_horizontal };
            grad[i][j] = if vertical { p_vertical } else { p_horizontal };
            grad_norm[i][j] = norm_factor * grad[i][j].abs();
        }
    }
    Ok(FrameQuantities {
        z,
        connection,
        sectional,
        curvature_gradient_e3: grad,
        curvature_gradient_norm: grad_norm,
    })
}

/// Largest absolute sectional curvature and gradient norm over a height range.
///
/// Returns `(sup |K^phi|, sup |grad K^phi|)` from `n` samples with refinement.
pub fn curvature_sups<T: Real>(spec: &PotentialSpec<T>, z_lo: T, z_hi: T, n: usize) -> Result<(T, T)> {
    if !(z_lo < z_hi) {
        let f = frame_quantities(spec, z_lo)?;
        return Ok((max_abs(&f.sectional), max_abs(&f.curvature_gradient_norm)));
    }
    let k = sampled_sup(
        |z| frame_quantities(spec, z).map(|f| max_abs(&f.sectional)),
        z_lo,
        z_hi,
        n.max(2),
    )?;
    let g = sampled_sup(
        |z| frame_quantities(spec, z).map(|f| max_abs(&f.curvature_gradient_norm)),
        z_lo,
        z_hi,
        n.max(2),
    )?;
    Ok((k, g))
}

fn max_abs<T: Real>(m: &[[T; 3]; 3]) -> T {
    m.iter().flat_map(|r| r.iter()).fold(T::zero(), |a, &b| a.max(b.abs()))
}

/// Whether `e^(-phi) max(d1^2, d2)` stays bounded on `[z_lo, inf[`.
fn tail_bounded<T: Real>(spec: &PotentialSpec<T>) -> bool {
    let two = T::lit(2.0);
    match &spec.family {
        Family::Constant { .. } => true,
        Family::Linear { slope } => *slope >= T::zero(),
        Family::Quadratic { lambda, beta } => *lambda > T::zero() || (*lambda == T::zero() && *beta >= T::zero()),
        // e^(-phi) d1^2 behaves like z^(-a-2) at infinity.
        Family::LogPower { a } => *a >= -two,
        Family::Series {
            lambda,
            beta,
            coefficients,
            ..
        } => {
            if *lambda != T::zero() {
                *lambda > T::zero()
            } else if *beta != T::zero() {
                *beta > T::zero()
            } else {
                coefficients.first().is_none_or(|c1| *c1 >= -two)
            }
        }
    }
}

/// Samples `e^(-phi) max(d1^2, d2)` on `[z_lo, z_hi]` and combines the
/// sampled supremum with the family's behavior above `z_hi`.
pub fn bounded_geometry_check<T: Real>(
    spec: &PotentialSpec<T>,
    z_lo: T,
    z_hi: T,
    n: usize,
) -> Result<BoundedGeometryReport<T>> {
    spec.validate()?;
    if !(spec.alpha < z_lo && z_lo < z_hi) || !z_hi.is_finite() {
        return Err(Error::Domain {
            z: z_lo.to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    let q = |z: T| -> Result<T> {
        let e = spec.eval(z)?;
        Ok((-e.phi).exp() * sq(e.d1).max(e.d2))
    };
    let fine = sampled_sup(q, z_lo, z_hi, n)?;
    let coarse = sampled_sup(q, z_lo, z_hi, (n / 2).max(2))?;
    let stable = fine.is_finite() && (fine - coarse).abs() <= T::lit(1e-6) * fine.abs().max(T::one());
    let top = spec.eval(z_hi)?;
    Ok(BoundedGeometryReport {
        sup_quantity: fine,
        bounded: stable && tail_bounded(spec),
        complete_hint: top.phi > T::zero() && top.d1 > T::zero(),
    })
}

/// Converts Euclidean shape data at height `z` into the conformal metric.
///
/// `s_euclidean` holds the shape operator in an orthonormal tangent frame
/// and `eta = <N, e3>`.
pub fn to_ilmanen_shape<T: Real>(
    spec: &PotentialSpec<T>,
    z: T,
    s_euclidean: Sym2<T>,
    eta: T,
) -> Result<ConformalShape<T>> {
    if !(eta.abs() <= T::one() + T::lit(1e3) * T::eps()) {
        return Err(Error::InvalidInput(format!("|eta| = {} exceeds 1", eta.abs())));
    }
    let e = spec.eval(z)?;
    let half = T::lit(0.5);
    let shift = half * e.d1 * eta;
    let up = (e.phi * half).exp();
    let down = (-e.phi * half).exp();
    let s_phi = Sym2::new(
        up * (s_euclidean.xx + shift),
        up * s_euclidean.xy,
        up * (s_euclidean.yy + shift),
    );
    let (k, _) = s_euclidean.eigen();
    Ok(ConformalShape {
        s_phi,
        k1_phi: down * (k[0] + shift),
        k2_phi: down * (k[1] + shift),
        h_phi: down * (s_euclidean.trace() + e.d1 * eta),
    })
}
