//! Extrinsic area density `O(r) = phi(r) A(r) / (4 pi r^2)` in Euclidean balls.

use serde::{Deserialize, Serialize};

use super::{norm3, sub3, sublevel_fraction, tri_area, AuditRecord};
use crate::error::{Error, Result};
use crate::potential::{normalize_on_window, PotentialSpec};
use crate::scalar::{sq, Real};
use crate::surface::{GeometryField, GraphPatch, ProfileCurve, ProfileKind, Surface};

/// Subdivision depth used to clip a graph triangle against a ball.
const CLIP_DEPTH: u32 = 3;

/// Density values on a list of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport<T> {
    pub center: [T; 3],
    pub radii: Vec<T>,
    /// Area of the surface inside each ball.
    pub areas: Vec<T>,
    /// Estimated clipping error of each area.
    pub area_tolerances: Vec<T>,
    /// `phi(r) A(r) / (4 pi r^2)` with the normalized potential.
    pub o_values: Vec<T>,
    /// Clipping error propagated to `o_values`.
    pub o_tolerances: Vec<T>,
    /// Comparison variant `int_{B(q, r)} e^(phi(mu)) / (4 pi r^2)`.
    pub weighted_values: Vec<T>,
    /// Right end of the window on which `0 <= phi < 1`.
    pub epsilon: T,
    /// Offset of the normalized potential.
    pub offset: T,
    /// No value drops below its predecessor by more than both tolerances.
    pub monotone: bool,
}

impl<T: Real> DensityReport<T> {
    pub fn audit_record(&self) -> AuditRecord {
        let last = self.o_values.len().saturating_sub(1);
        let max_tol = self.o_tolerances.iter().fold(T::zero(), |m, &t| m.max(t));
        AuditRecord::new("extrinsic density monotonicity")
            .hypothesis("radii below epsilon", self.radii.iter().all(|&r| r < self.epsilon))
            .value("epsilon", self.epsilon)
            .value("offset", self.offset)
            .value("radii", T::from_usize_lossy(self.radii.len()))
            .value("first_o", self.o_values.first().copied().unwrap_or(T::zero()))
            .value("last_o", self.o_values.get(last).copied().unwrap_or(T::zero()))
            .tolerance("max_o_tolerance", max_tol)
            .conclude(self.monotone)
    }

    /// Plot data with header `r,O,O_tol,weighted`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,O,O_tol,weighted\n");
        for i in 0..self.radii.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                self.radii[i], self.o_values[i], self.o_tolerances[i], self.weighted_values[i]
            ));
        }
        s
    }
}

/// Computes `O(r)` for each radius around the ambient point `q`.
///
/// The potential is first shifted so that `0 <= phi < 1` on `]0, epsilon]`;
/// `epsilon` defaults to `1.01` times the largest radius. Areas of graph
/// patches clip each lifted triangle against the ball after three levels of
/// subdivision, and the tolerance is the change from two levels. Profile
/// areas integrate the orbit length inside the ball with the trapezoid
/// rule, and the tolerance is the change under doubling the step.
pub fn density_monotonicity<T: Real>(
    field: &GeometryField<T>,
    q: [T; 3],
    radii: &[T],
    spec: &PotentialSpec<T>,
    epsilon: Option<T>,
) -> Result<DensityReport<T>> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("radius list is empty".into()));
    }
    if !(radii[0] > T::zero()) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let r_max = radii[radii.len() - 1];
    let epsilon = epsilon.unwrap_or(r_max * T::lit(1.01));
    if !(r_max < epsilon) {
        return Err(Error::InvalidInput(format!(
            "radius {} is not below epsilon = {}",
            r_max, epsilon
        )));
    }
    let normalized = normalize_on_window(spec, epsilon)?;
    let weight = |z: T| -> Result<T> { Ok(spec.eval(z)?.phi.exp()) };
    check_interior(field, q, r_max)?;

    let four_pi = T::lit(4.0) * T::PI();
    let mut report = DensityReport {
        center: q,
        radii: radii.to_vec(),
        areas: Vec::with_capacity(radii.len()),
        area_tolerances: Vec::with_capacity(radii.len()),
        o_values: Vec::with_capacity(radii.len()),
        o_tolerances: Vec::with_capacity(radii.len()),
        weighted_values: Vec::with_capacity(radii.len()),
        epsilon,
        offset: normalized.offset,
        monotone: true,
    };
    for &r in radii {
        let (area, tol, weighted) = match &field.source {
            Surface::Graph(g) => graph_ball_area(g, q, r, &weight)?,
            Surface::Profile(c) => profile_ball_area(c, q, r, &weight)?,
        };
        let phi_r = normalized.eval(r)?.phi;
        let scale = phi_r / (four_pi * sq(r));
        report.areas.push(area);
        report.area_tolerances.push(tol);
        report.o_values.push(scale * area);
        report.o_tolerances.push(scale.abs() * tol);
        report.weighted_values.push(weighted / (four_pi * sq(r)));
    }
    let o = &report.o_values;
    let t = &report.o_tolerances;
    report.monotone = (1..o.len()).all(|i| o[i] >= o[i - 1] - t[i] - t[i - 1]);
    Ok(report)
}

fn check_interior<T: Real>(field: &GeometryField<T>, q: [T; 3], r: T) -> Result<()> {
    let exceeded = |k: usize| {
        Err(Error::PatchExceeded(format!(
            "the ball of radius {} reaches boundary sample {}",
            r, k
        )))
    };
    match &field.source {
        Surface::Graph(g) => {
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let k = g.idx(i, j);
                    if g.is_boundary(i, j) && norm3(sub3(field.position[k], q)) < r {
                        return exceeded(k);
                    }
                }
            }
        }
        Surface::Profile(c) => {
            let qx = orbit_coordinate(c.kind, q);
            for k in [0, c.len() - 1] {
                let p = &c.samples[k];
                let on_axis = c.kind == ProfileKind::Rotational && p.x <= T::lit(1e-12);
                if !on_axis && (sq(p.x - qx) + sq(p.z - q[2])).sqrt() < r {
                    return exceeded(k);
                }
            }
        }
    }
    Ok(())
}

/// Distance of `q` to the axis, or its first coordinate on translation-invariant surfaces.
fn orbit_coordinate<T: Real>(kind: ProfileKind, q: [T; 3]) -> T {
    match kind {
        ProfileKind::Rotational => (sq(q[0]) + sq(q[1])).sqrt(),
        ProfileKind::TranslationInvariant => q[0],
    }
}

/// Area of a flat triangle inside the ball, with a weighted companion.
fn clip<T: Real>(v: [[T; 3]; 3], q: [T; 3], r: T, depth: u32, weight: &impl Fn(T) -> Result<T>) -> Result<(T, T)> {
    let d = [norm3(sub3(v[0], q)), norm3(sub3(v[1], q)), norm3(sub3(v[2], q))];
    let diam = norm3(sub3(v[0], v[1]))
        .max(norm3(sub3(v[1], v[2])))
        .max(norm3(sub3(v[2], v[0])));
    let third = T::lit(1.0 / 3.0);
    let centroid_z = (v[0][2] + v[1][2] + v[2][2]) * third;
    if d.iter().all(|&x| x < r) {
        let a = tri_area(v[0], v[1], v[2]);
        return Ok((a, a * weight(centroid_z)?));
    }
    if d.iter().all(|&x| x - diam > r) {
        return Ok((T::zero(), T::zero()));
    }
    if depth == 0 {
        let f = sublevel_fraction([sq(d[0]), sq(d[1]), sq(d[2])], sq(r));
        let a = f * tri_area(v[0], v[1], v[2]);
        return Ok((a, a * weight(centroid_z)?));
    }
    let half = T::lit(0.5);
    let mid = |a: [T; 3], b: [T; 3]| [(a[0] + b[0]) * half, (a[1] + b[1]) * half, (a[2] + b[2]) * half];
    let (m01, m12, m20) = (mid(v[0], v[1]), mid(v[1], v[2]), mid(v[2], v[0]));
    let mut out = (T::zero(), T::zero());
    for t in [[v[0], m01, m20], [m01, v[1], m12], [m20, m12, v[2]], [m01, m12, m20]] {
        let (a, w) = clip(t, q, r, depth - 1, weight)?;
        out.0 += a;
        out.1 += w;
    }
    Ok(out)
}

fn graph_ball_area<T: Real>(g: &GraphPatch<T>, q: [T; 3], r: T, weight: &impl Fn(T) -> Result<T>) -> Result<(T, T, T)> {
    let p = |i: usize, j: usize| [g.x(i), g.y(j), g.at(i, j)];
    let (mut fine, mut coarse, mut weighted) = (T::zero(), T::zero(), T::zero());
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let (a, b, c, d) = (p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
            for t in [[a, b, c], [a, c, d]] {
                let (af, wf) = clip(t, q, r, CLIP_DEPTH, weight)?;
                coarse += clip(t, q, r, CLIP_DEPTH - 1, weight)?.0;
                fine += af;
                weighted += wf;
            }
        }
    }
    Ok((fine, (fine - coarse).abs(), weighted))
}

fn profile_ball_area<T: Real>(
    c: &ProfileCurve<T>,
    q: [T; 3],
    r: T,
    weight: &impl Fn(T) -> Result<T>,
) -> Result<(T, T, T)> {
    let qx = orbit_coordinate(c.kind, q);
    let two = T::lit(2.0);
    // Length of the part of the orbit through sample k inside the ball.
    let orbit = |x: T, z: T| -> T {
        match c.kind {
            ProfileKind::TranslationInvariant => two * (sq(r) - sq(x - qx) - sq(z - q[2])).max(T::zero()).sqrt(),
            ProfileKind::Rotational => {
                let far = sq(x) + sq(qx) + sq(z - q[2]) - sq(r);
                if x <= T::zero() || qx <= T::zero() {
                    if far < T::zero() {
                        two * T::PI() * x
                    } else {
                        T::zero()
                    }
                } else {
                    let cos = (far / (two * x * qx)).max(-T::one()).min(T::one());
                    two * cos.acos() * x
                }
            }
        }
    };
    let n = c.len();
    let mut lens = Vec::with_capacity(n);
    let mut weighted = T::zero();
    let half = T::lit(0.5);
    for (k, p) in c.samples.iter().enumerate() {
        let l = orbit(p.x, p.z);
        lens.push(l);
        if l > T::zero() {
            let end = if k == 0 || k + 1 == n { half } else { T::one() };
            weighted += end * l * weight(p.z)? * c.step;
        }
    }
    let trapezoid = |stride: usize| -> T {
        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        if idx.last() != Some(&(n - 1)) {
            idx.push(n - 1);
        }
        idx.windows(2)
            .map(|w| (lens[w[0]] + lens[w[1]]) * half * c.step * T::from_usize_lossy(w[1] - w[0]))
            .sum()
    };
    let fine = trapezoid(1);
    let coarse = trapezoid(2);
    Ok((fine, (fine - coarse).abs(), weighted))
}
