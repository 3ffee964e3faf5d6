//! Rescalings `lambda (Sigma - p)` compared with limit models on a fixed window.

use serde::{Deserialize, Serialize};

use super::{dot3, norm3, AuditRecord};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::scalar::{sq, Real};
use crate::solvers::{solve_rotational_profile, solve_translation_profile, ShootingConfig, Start};
use crate::surface::{
    sample_geometry, GeometryField, GraphPatch, ProfileCurve, ProfileKind, ProfileSample, Rect, Surface,
};

/// Limit model of a blow-up sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupModel {
    /// Plane through the basepoint orthogonal to its normal.
    Plane,
    /// Translation-invariant profile of `phi = C z` with its tip at the basepoint.
    GrimReaper,
    /// Rotational profile of `phi = C z` with its tip at the basepoint.
    Bowl,
}

/// One rescaled surface with its distance to the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupStage<T> {
    pub scale: T,
    pub basepoint: usize,
    /// `phi'(mu(p)) / scale`.
    pub phi_ratio: T,
    /// Rescaled surface. Adding `shift` to its positions gives `scale (Sigma - p)`.
    pub surface: Surface<T>,
    pub shift: [T; 3],
    /// Number of compared points inside the window.
    pub window_samples: usize,
    /// Largest distance of a window point to the model.
    pub hausdorff_distance: T,
    /// Largest deviation of `eta` or `H` from the model at matched points.
    pub c2_distance: T,
}

/// Sequence of rescalings with the estimated limit of `phi'(mu(p)) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupResult<T> {
    pub model: BlowupModel,
    /// Radius of the comparison ball around the rescaled basepoint.
    pub window_radius: T,
    /// `phi_ratio` of the last stage.
    pub c_estimate: T,
    pub stages: Vec<BlowupStage<T>>,
}

impl<T: Real> BlowupResult<T> {
    pub fn audit_record(&self) -> AuditRecord {
        let mut r = AuditRecord::new("blow-up rescaling").value("c_estimate", self.c_estimate);
        for (i, s) in self.stages.iter().enumerate() {
            r = r
                .value(&format!("stage{i}_scale"), s.scale)
                .value(&format!("stage{i}_hausdorff"), s.hausdorff_distance)
                .value(&format!("stage{i}_c2"), s.c2_distance);
        }
        r
    }
}

/// Returns `scale (Sigma - p)` as a surface of the same kind plus the
/// translation that places the basepoint at the origin.
///
/// Surfaces of revolution stay symmetric about the original axis, so the
/// returned profile is scaled about the axis point at the height of `p` and
/// the shift moves `p` onto the axis.
pub fn rescale_surface<T: Real>(surface: &Surface<T>, p: usize, scale: T) -> Result<(Surface<T>, [T; 3])> {
    if p >= surface.len() {
        return Err(Error::InvalidInput(format!("basepoint {p} is not a sample")));
    }
    if !(scale > T::zero()) {
        return Err(Error::InvalidInput("scale must be positive".into()));
    }
    match surface {
        Surface::Graph(g) => {
            let (px, py, pz) = (g.x(p % g.nx), g.y(p / g.nx), g.u[p]);
            let domain = Rect {
                x0: scale * (g.domain.x0 - px),
                x1: scale * (g.domain.x1 - px),
                y0: scale * (g.domain.y0 - py),
                y1: scale * (g.domain.y1 - py),
            };
            let u = g.u.iter().map(|&v| scale * (v - pz)).collect();
            let out = GraphPatch {
                domain,
                h: scale * g.h,
                nx: g.nx,
                ny: g.ny,
                u,
            };
            Ok((Surface::Graph(out), [T::zero(); 3]))
        }
        Surface::Profile(c) => {
            let b = c.samples[p];
            let rotational = c.kind == ProfileKind::Rotational;
            let x_ref = if rotational { T::zero() } else { b.x };
            let samples = c
                .samples
                .iter()
                .map(|q| ProfileSample {
                    s: scale * (q.s - b.s),
                    x: scale * (q.x - x_ref),
                    z: scale * (q.z - b.z),
                    theta: q.theta,
                })
                .collect();
            let out = ProfileCurve {
                samples,
                kind: c.kind,
                step: scale * c.step,
            };
            let shift = if rotational {
                [-scale * b.x, T::zero(), T::zero()]
            } else {
                [T::zero(); 3]
            };
            Ok((Surface::Profile(out), shift))
        }
    }
}

/// Point of a rescaled surface with the data compared against a model.
struct WindowPoint<T> {
    pos: [T; 3],
    eta: T,
    mean: T,
    sample: usize,
}

/// Points of the rescaled surface within `radius` of the origin. Points
/// off the meridian of a surface of revolution are included.
fn window_points<T: Real>(field: &GeometryField<T>, shift: [T; 3], radius: T) -> Vec<WindowPoint<T>> {
    let mut out = Vec::new();
    let rotational = matches!(&field.source, Surface::Profile(c) if c.kind == ProfileKind::Rotational);
    let r2 = sq(radius);
    for k in 0..field.len() {
        let base = field.position[k];
        if !rotational {
            let pos = [base[0] + shift[0], base[1] + shift[1], base[2] + shift[2]];
            if dot3(pos, pos) < r2 {
                out.push(WindowPoint {
                    pos,
                    eta: field.eta[k],
                    mean: field.mean[k],
                    sample: k,
                });
            }
            continue;
        }
        // Orbit point at angle psi: (x cos psi - a, x sin psi, z) with a = -shift[0].
        let (x, z, a) = (base[0], base[2], -shift[0]);
        let far = sq(x) + sq(a) + sq(z) - r2;
        let angles: Vec<T> = if x <= T::zero() || a <= T::zero() {
            if far < T::zero() {
                (0..16)
                    .map(|m| T::lit(2.0) * T::PI() * T::from_usize_lossy(m) / T::lit(16.0))
                    .collect()
            } else {
                Vec::new()
            }
        } else {
            let c = far / (T::lit(2.0) * x * a);
            if c >= T::one() {
                Vec::new()
            } else {
                let top = c.max(-T::one()).acos();
                (0..17)
                    .map(|m| top * (T::from_usize_lossy(m) / T::lit(8.0) - T::one()) * T::lit(0.999))
                    .collect()
            }
        };
        for psi in angles {
            let pos = [x * psi.cos() - a, x * psi.sin(), z];
            if dot3(pos, pos) < r2 {
                out.push(WindowPoint {
                    pos,
                    eta: field.eta[k],
                    mean: field.mean[k],
                    sample: k,
                });
            }
        }
    }
    out
}

/// Rescales each surface about its basepoint and compares it with `model`
/// on the unit ball around the rescaled basepoint.
///
/// `sources` holds either one surface shared by all stages or one surface
/// per stage. Scales must be positive and nondecreasing. The model
/// profiles use `phi = C z` with `C` the last `phi'(mu(p)) / scale` and are
/// integrated with the rescaled step, so samples match one to one. Model
/// profiles need the basepoint at the tip: the axis sample for `Bowl`, a
/// sample with horizontal tangent for `GrimReaper`.
pub fn blowup_rescale<T: Real>(
    sources: &[&Surface<T>],
    basepoints: &[usize],
    scales: &[T],
    spec: &PotentialSpec<T>,
    model: BlowupModel,
) -> Result<BlowupResult<T>> {
    if scales.is_empty() || basepoints.len() != scales.len() {
        return Err(Error::InvalidInput("one basepoint per scale is required".into()));
    }
    if !(sources.len() == 1 || sources.len() == scales.len()) {
        return Err(Error::InvalidInput("give one surface or one surface per scale".into()));
    }
    if !(scales[0] > T::zero()) || scales.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("scales must be positive and nondecreasing".into()));
    }
    let radius = T::one();
    let flat = PotentialSpec::constant(T::zero());
    let source = |i: usize| if sources.len() == 1 { sources[0] } else { sources[i] };

    let mut ratios = Vec::with_capacity(scales.len());
    for (i, (&p, &scale)) in basepoints.iter().zip(scales).enumerate() {
        let s = source(i);
        if p >= s.len() {
            return Err(Error::InvalidInput(format!("basepoint {p} is not a sample")));
        }
        let mu = match s {
            Surface::Graph(g) => g.u[p],
            Surface::Profile(c) => c.samples[p].z,
        };
        ratios.push(spec.d1(mu)? / scale);
    }
    let c_estimate = ratios[ratios.len() - 1];

    let mut stages = Vec::with_capacity(scales.len());
    for (i, (&p, &scale)) in basepoints.iter().zip(scales).enumerate() {
        let (surface, shift) = rescale_surface(source(i), p, scale)?;
        let field = sample_geometry(&surface, &flat)?;
        let pts = window_points(&field, shift, radius);
        let reach = field
            .position
            .iter()
            .map(|q| norm3([q[0] + shift[0], q[1] + shift[1], q[2] + shift[2]]))
            .fold(T::zero(), |m, d| m.max(d));
        if pts.len() < 3 || reach < radius {
            return Err(Error::WindowUnderflow(format!(
                "stage {} covers radius {} with {} points, the window has radius {}",
                i,
                reach,
                pts.len(),
                radius
            )));
        }
        let (hausdorff, c2) = match model {
            BlowupModel::Plane => plane_distance(&field, p, &pts),
            BlowupModel::Bowl | BlowupModel::GrimReaper => profile_distance(&field, p, &pts, model, c_estimate)?,
        };
        stages.push(BlowupStage {
            scale,
            basepoint: p,
            phi_ratio: ratios[i],
            surface,
            shift,
            window_samples: pts.len(),
            hausdorff_distance: hausdorff,
            c2_distance: c2,
        });
    }
    Ok(BlowupResult {
        model,
        window_radius: radius,
        c_estimate,
        stages,
    })
}

fn plane_distance<T: Real>(field: &GeometryField<T>, p: usize, pts: &[WindowPoint<T>]) -> (T, T) {
    let n = field.normal[p];
    let eta_p = field.eta[p];
    let mut dist = T::zero();
    let mut c2 = T::zero();
    for w in pts {
        dist = dist.max(dot3(w.pos, n).abs());
        c2 = c2.max((w.eta - eta_p).abs()).max(w.mean.abs());
    }
    (dist, c2)
}

fn profile_distance<T: Real>(
    field: &GeometryField<T>,
    p: usize,
    pts: &[WindowPoint<T>],
    model: BlowupModel,
    c: T,
) -> Result<(T, T)> {
    let Surface::Profile(curve) = &field.source else {
        return Err(Error::UnsupportedCombination(
            "profile models need a profile surface".into(),
        ));
    };
    let tip = curve.samples[p];
    let (kind_ok, tip_ok) = match model {
        BlowupModel::Bowl => (curve.kind == ProfileKind::Rotational, tip.x <= T::lit(1e-12)),
        _ => (
            curve.kind == ProfileKind::TranslationInvariant,
            tip.theta.sin().abs() <= T::lit(1e-6),
        ),
    };
    if !kind_ok || !tip_ok {
        return Err(Error::InvalidInput(format!(
            "basepoint {} is not the tip of a {:?} profile",
            p, model
        )));
    }
    let (s_lo, s_hi) = pts.iter().fold((T::zero(), T::zero()), |(a, b), w| {
        let s = curve.samples[w.sample].s;
        (a.min(s), b.max(s))
    });
    let step = curve.step;
    let pad = T::lit(3.0) * step;
    let linear = PotentialSpec::linear(c);
    let solved = match model {
        BlowupModel::Bowl => {
            let cfg = ShootingConfig::new(Start::AxisRegular { z0: T::zero() }, s_hi + pad, step);
            solve_rotational_profile(&linear, &cfg)?
        }
        _ => {
            let start = Start::Point {
                x0: T::zero(),
                z0: T::zero(),
                theta0: T::zero(),
            };
            let cfg = ShootingConfig::new(start, s_hi + pad, step).with_s_min(s_lo - pad);
            solve_translation_profile(&linear, &cfg)?
        }
    };
    let model_field = sample_geometry(&solved.surface, &linear)?;
    let Surface::Profile(mc) = &solved.surface else {
        return Err(Error::UnsupportedCombination("model solver returned a graph".into()));
    };
    let s0 = mc.samples[0].s;
    let mut dist = T::zero();
    let mut c2 = T::zero();
    for w in pts {
        let q = curve.samples[w.sample];
        let m = ((q.s - s0) / step)
            .round()
            .to_usize()
            .filter(|&m| m < mc.len())
            .ok_or_else(|| Error::WindowUnderflow(format!("model profile does not reach arclength {}", q.s)))?;
        let mq = mc.samples[m];
        dist = dist.max((sq(q.x - mq.x) + sq(q.z - mq.z)).sqrt());
        c2 = c2
            .max((w.eta - model_field.eta[m]).abs())
            .max((w.mean - model_field.mean[m]).abs());
    }
    Ok((dist, c2))
}
