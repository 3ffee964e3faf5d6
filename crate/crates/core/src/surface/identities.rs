//! Residuals of the differential identities satisfied by `phi`-minimal surfaces.
//!
//! Items are numbered as follows, with `B(X, Y) = <grad phi', X> S(grad mu, Y)
//! + <grad phi', Y> S(grad mu, X)` and `S^[2] = S o S`:
//!
//! 1. `grad mu = e3^T`, `grad eta = S(grad mu)` and `|grad mu|^2 + eta^2 = 1`
//! 2. `phi'^2 = phi'^2 |grad mu|^2 + H^2`
//! 3. `phi' Hess mu = H S`
//! 4. `Hess eta = nabla_{grad mu} S - eta S^[2]`
//! 5. `Delta mu = phi' (1 - |grad mu|^2)`
//! 6. `Delta N + phi' grad eta + phi'' eta grad mu + |S|^2 N = 0`
//! 7. `Hess H = -eta Hess phi' - nabla_{grad phi} S - H S^[2] - B`
//! 8. `Delta S + nabla_{grad phi} S + eta Hess phi' + |S|^2 S + B = 0`
//!
//! `Hess phi'` is assembled as `phi''' dmu dmu + phi'' Hess mu` with
//! `Hess mu = H S / phi'` wherever `phi' != 0`. Item 6 differentiates the
//! ambient components of `N` one at a time.

use crate::error::{Error, Result};
use crate::potential::{PotentialEval, PotentialSpec};
use crate::scalar::{sq, Real};

use super::calculus::Partials;
use super::frame::graph_shape_derivative;
use super::{GeometryField, ResidualReport, Surface};

const NAMES: [&str; 8] = [
    "item 1: grad eta = S(grad mu), |grad mu|^2 + eta^2 = 1",
    "item 2: phi'^2 = phi'^2 |grad mu|^2 + H^2",
    "item 3: phi' Hess mu = H S",
    "item 4: Hess eta = nabla_{grad mu} S - eta S^[2]",
    "item 5: Delta mu = phi' (1 - |grad mu|^2)",
    "item 6: Delta N + phi' grad eta + phi'' eta grad mu + |S|^2 N = 0",
    "item 7: Hess H = -eta Hess phi' - nabla_{grad phi} S - H S^[2] - B",
    "item 8: Delta S + nabla_{grad phi} S + eta Hess phi' + |S|^2 S + B = 0",
];

/// Samples of a surface of revolution closer than this to the axis are
/// left out of identity residuals. The warping factor `cos(theta) / x`
/// multiplies stencil errors there, so a fixed distance keeps the observed
/// order of the remaining samples at two.
pub const AXIS_EXCLUSION: f64 = 0.1;

/// Whether sample `k` enters identity residual norms with the given margin.
fn counted<T: Real>(field: &GeometryField<T>, k: usize, margin: usize) -> bool {
    if !field.is_interior(k, margin) {
        return false;
    }
    match field.profile_calc() {
        Some(pc) if pc.rotational => pc.x[k] >= T::lit(AXIS_EXCLUSION),
        _ => true,
    }
}

/// Interior margin used for each item, equal to the nesting depth of its
/// finite differences.
const MARGINS: [usize; 8] = [2, 2, 2, 3, 2, 3, 4, 4];

fn evals<T: Real>(field: &GeometryField<T>, spec: &PotentialSpec<T>) -> Result<Vec<PotentialEval<T>>> {
    field.mu.iter().map(|&z| spec.eval(z)).collect()
}

fn report<T: Real>(field: &GeometryField<T>, item: usize, vals: Vec<T>) -> ResidualReport<T> {
    let margin = MARGINS[item - 1];
    let masked: Vec<Option<T>> = vals
        .into_iter()
        .enumerate()
        .map(|(k, v)| counted(field, k, margin).then_some(v))
        .collect();
    ResidualReport::from_values(NAMES[item - 1], &masked, field.spacing(), margin)
}

/// Residual reports for the requested items (each in `1..=8`).
///
/// Items 1 to 7 are available on profiles and graphs; item 8 needs a
/// profile source.
pub fn fundamental_identity_residuals<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    items: &[usize],
) -> Result<Vec<ResidualReport<T>>> {
    if let Some(bad) = items.iter().find(|&&i| !(1..=8).contains(&i)) {
        return Err(Error::InvalidInput(format!("identity item {bad} is not in 1..=8")));
    }
    let ev = evals(field, spec)?;
    let mut out = Vec::with_capacity(items.len());
    for &item in items {
        let vals = match &field.source {
            Surface::Profile(_) => profile_item(field, &ev, item),
            Surface::Graph(_) => graph_item(field, &ev, item)?,
        };
        out.push(report(field, item, vals));
    }
    Ok(out)
}

/// Item 2 with `H` replaced by `-phi' eta`, evaluated at every sample.
///
/// This is pure algebra given a unit normal and vanishes to rounding.
pub fn item2_substituted_residual<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
) -> Result<ResidualReport<T>> {
    let ev = evals(field, spec)?;
    let vals: Vec<Option<T>> = (0..field.len())
        .map(|k| {
            let d1 = ev[k].d1;
            let gm = sq(field.grad_mu[k][0]) + sq(field.grad_mu[k][1]);
            let h = -d1 * field.eta[k];
            Some(sq(d1) - sq(d1) * gm - sq(h))
        })
        .collect();
    Ok(ResidualReport::from_values(
        "item 2 with H = -phi' eta",
        &vals,
        field.spacing(),
        0,
    ))
}

/// Per-sample profile quantities shared by the identity residuals.
struct ProfileData<T> {
    sn: Vec<T>,
    cs: Vec<T>,
    ks: Vec<T>,
    kt: Vec<T>,
    h: Vec<T>,
    z: Vec<T>,
}

fn profile_data<T: Real>(field: &GeometryField<T>) -> ProfileData<T> {
    ProfileData {
        sn: field.grad_mu.iter().map(|g| g[0]).collect(),
        cs: field.eta.clone(),
        ks: field.shape.iter().map(|s| s.xx).collect(),
        kt: field.shape.iter().map(|s| s.yy).collect(),
        h: field.mean.clone(),
        z: field.mu.clone(),
    }
}

/// Diagonal of `Hess phi'` in the frame `(e_s, e_t)`.
fn profile_hess_d1<T: Real>(field: &GeometryField<T>, ev: &[PotentialEval<T>], d: &ProfileData<T>) -> (Vec<T>, Vec<T>) {
    let pc = field.profile_calc().expect("profile calculus");
    let (mss, mtt) = pc.hessian(&d.z);
    let n = field.len();
    let mut ss = Vec::with_capacity(n);
    let mut tt = Vec::with_capacity(n);
    for k in 0..n {
        let e = ev[k];
        let (hss, htt) = if e.d1 != T::zero() {
            (d.h[k] * d.ks[k] / e.d1, d.h[k] * d.kt[k] / e.d1)
        } else {
            (mss[k], mtt[k])
        };
        ss.push(e.d3 * sq(d.sn[k]) + e.d2 * hss);
        tt.push(e.d2 * htt);
    }
    (ss, tt)
}

fn profile_item<T: Real>(field: &GeometryField<T>, ev: &[PotentialEval<T>], item: usize) -> Vec<T> {
    let pc = field.profile_calc().expect("profile calculus");
    let d = profile_data(field);
    let n = field.len();
    let a = &pc.a;
    let two = T::lit(2.0);
    let norm2 = |u: T, v: T| (sq(u) + sq(v)).sqrt();
    match item {
        1 => {
            let deta = pc.d(&d.cs);
            (0..n)
                .map(|k| {
                    let alg = (sq(d.sn[k]) + sq(d.cs[k]) - T::one()).abs();
                    alg.max((deta[k] - d.ks[k] * d.sn[k]).abs())
                })
                .collect()
        }
        2 => (0..n)
            .map(|k| sq(ev[k].d1) * (T::one() - sq(d.sn[k])) - sq(d.h[k]))
            .collect(),
        3 => {
            let (mss, mtt) = pc.hessian(&d.z);
            (0..n)
                .map(|k| {
                    norm2(
                        ev[k].d1 * mss[k] - d.h[k] * d.ks[k],
                        ev[k].d1 * mtt[k] - d.h[k] * d.kt[k],
                    )
                })
                .collect()
        }
        4 => {
            let (ess, ett) = pc.hessian(&d.cs);
            let dks = pc.d(&d.ks);
            let dkt = pc.d(&d.kt);
            (0..n)
                .map(|k| {
                    norm2(
                        ess[k] - d.sn[k] * dks[k] + d.cs[k] * sq(d.ks[k]),
                        ett[k] - d.sn[k] * dkt[k] + d.cs[k] * sq(d.kt[k]),
                    )
                })
                .collect()
        }
        5 => {
            let lap = pc.laplacian(&d.z);
            (0..n).map(|k| lap[k] - ev[k].d1 * (T::one() - sq(d.sn[k]))).collect()
        }
        6 => {
            let f: Vec<T> = d.sn.iter().map(|&s| -s).collect();
            let lap1 = pc.laplacian(&f);
            let lap3 = pc.laplacian(&d.cs);
            let deta = pc.d(&d.cs);
            (0..n)
                .map(|k| {
                    let x = pc.x[k];
                    let orbit = if pc.rotational && x > T::zero() {
                        f[k] / sq(x)
                    } else {
                        T::zero()
                    };
                    let s2 = sq(d.ks[k]) + sq(d.kt[k]);
                    let e = ev[k];
                    let (sn, cs) = (d.sn[k], d.cs[k]);
                    let r1 = lap1[k] - orbit + e.d1 * deta[k] * cs + e.d2 * cs * sn * cs - s2 * sn;
                    let r3 = lap3[k] + e.d1 * deta[k] * sn + e.d2 * cs * sn * sn + s2 * cs;
                    norm2(r1, r3)
                })
                .collect()
        }
        7 | 8 => {
            let (hp_ss, hp_tt) = profile_hess_d1(field, ev, &d);
            let dks = pc.d(&d.ks);
            let dkt = pc.d(&d.kt);
            let (lhs_ss, lhs_tt) = if item == 7 {
                pc.hessian(&d.h)
            } else {
                let lks = pc.laplacian(&d.ks);
                let lkt = pc.laplacian(&d.kt);
                (
                    (0..n).map(|k| lks[k] + two * sq(a[k]) * (d.kt[k] - d.ks[k])).collect(),
                    (0..n).map(|k| lkt[k] + two * sq(a[k]) * (d.ks[k] - d.kt[k])).collect(),
                )
            };
            (0..n)
                .map(|k| {
                    let e = ev[k];
                    let sn = d.sn[k];
                    let b_ss = two * e.d2 * d.ks[k] * sq(sn);
                    let drift = e.d1 * sn;
                    let (c_ss, c_tt) = if item == 7 {
                        (d.h[k] * sq(d.ks[k]), d.h[k] * sq(d.kt[k]))
                    } else {
                        let s2 = sq(d.ks[k]) + sq(d.kt[k]);
                        (s2 * d.ks[k], s2 * d.kt[k])
                    };
                    norm2(
                        lhs_ss[k] + d.cs[k] * hp_ss[k] + drift * dks[k] + c_ss + b_ss,
                        lhs_tt[k] + d.cs[k] * hp_tt[k] + drift * dkt[k] + c_tt,
                    )
                })
                .collect()
        }
        _ => unreachable!(),
    }
}

fn graph_item<T: Real>(field: &GeometryField<T>, ev: &[PotentialEval<T>], item: usize) -> Result<Vec<T>> {
    let gc = field.graph_calc().expect("graph calculus");
    let n = field.len();
    let shape = gc.shape;
    let p = &gc.u.fx;
    let q = &gc.u.fy;
    let grad_mu = |k: usize| [p[k] / gc.w2[k], q[k] / gc.w2[k]];
    let gm2 = |k: usize| (sq(p[k]) + sq(q[k])) / gc.w2[k];
    let add = |a: [T; 3], b: [T; 3]| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let scale = |a: [T; 3], c: T| [a[0] * c, a[1] * c, a[2] * c];
    let s_of = |k: usize, v: [T; 2]| {
        let h = gc.second_form(k);
        [h[0] * v[0] + h[1] * v[1], h[1] * v[0] + h[2] * v[1]]
    };
    let two = T::lit(2.0);
    Ok(match item {
        1 => {
            let ex = shape.dx(&field.eta);
            let ey = shape.dy(&field.eta);
            (0..n)
                .map(|k| {
                    let alg = (gm2(k) + sq(field.eta[k]) - T::one()).abs();
                    let sm = s_of(k, grad_mu(k));
                    let w = [ex[k] - sm[0], ey[k] - sm[1]];
                    alg.max(gc.covector_norm_sq(k, w).sqrt())
                })
                .collect()
        }
        2 => (0..n)
            .map(|k| sq(ev[k].d1) * (T::one() - gm2(k)) - sq(field.mean[k]))
            .collect(),
        3 => (0..n)
            .map(|k| {
                let hm = gc.hessian_at(k, &gc.u);
                let r = add(scale(hm, ev[k].d1), scale(gc.second_form(k), -field.mean[k]));
                gc.tensor_norm_sq(k, r).sqrt()
            })
            .collect(),
        4 => {
            let pe = Partials::of(&shape, &field.eta);
            let dh = graph_shape_derivative(gc);
            (0..n)
                .map(|k| {
                    let he = gc.hessian_at(k, &pe);
                    let v = grad_mu(k);
                    let nab = add(scale(dh[k][0], v[0]), scale(dh[k][1], v[1]));
                    let h = gc.second_form(k);
                    let s2 = gc.contract(k, h, h);
                    let r = add(add(he, scale(nab, -T::one())), scale(s2, field.eta[k]));
                    gc.tensor_norm_sq(k, r).sqrt()
                })
                .collect()
        }
        5 => (0..n)
            .map(|k| {
                let lap = gc.trace(k, gc.hessian_at(k, &gc.u));
                lap - ev[k].d1 * (T::one() - gm2(k))
            })
            .collect(),
        6 => {
            let comps: Vec<Partials<T>> = (0..3)
                .map(|c| {
                    let f: Vec<T> = field.normal.iter().map(|nv| nv[c]).collect();
                    Partials::of(&shape, &f)
                })
                .collect();
            let ex = shape.dx(&field.eta);
            let ey = shape.dy(&field.eta);
            (0..n)
                .map(|k| {
                    let ge = gc.push(k, gc.raise(k, [ex[k], ey[k]]));
                    let gmu = gc.push(k, grad_mu(k));
                    let s2 = gc.tensor_norm_sq(k, gc.second_form(k));
                    let e = ev[k];
                    let mut acc = T::zero();
                    for (c, part) in comps.iter().enumerate() {
                        let lap = gc.trace(k, gc.hessian_at(k, part));
                        let r = lap + e.d1 * ge[c] + e.d2 * field.eta[k] * gmu[c] + s2 * field.normal[k][c];
                        acc += sq(r);
                    }
                    acc.sqrt()
                })
                .collect()
        }
        7 => {
            let ph = Partials::of(&shape, &field.mean);
            let dh = graph_shape_derivative(gc);
            (0..n)
                .map(|k| {
                    let e = ev[k];
                    let h = gc.second_form(k);
                    let hmu = if e.d1 != T::zero() {
                        scale(h, field.mean[k] / e.d1)
                    } else {
                        gc.hessian_at(k, &gc.u)
                    };
                    let dmu2 = [sq(p[k]), p[k] * q[k], sq(q[k])];
                    let hp = add(scale(dmu2, e.d3), scale(hmu, e.d2));
                    let v = grad_mu(k);
                    let nab = scale(add(scale(dh[k][0], v[0]), scale(dh[k][1], v[1])), e.d1);
                    let s2 = gc.contract(k, h, h);
                    let sm = s_of(k, v);
                    let du = [p[k] * e.d2, q[k] * e.d2];
                    let b = [two * du[0] * sm[0], du[0] * sm[1] + du[1] * sm[0], two * du[1] * sm[1]];
                    let hh = gc.hessian_at(k, &ph);
                    let r = add(
                        add(add(hh, scale(hp, field.eta[k])), add(nab, scale(s2, field.mean[k]))),
                        b,
                    );
                    gc.tensor_norm_sq(k, r).sqrt()
                })
                .collect()
        }
        8 => {
            return Err(Error::UnsupportedCombination(
                "item 8 needs the rough Laplacian of S, available on profile sources only".into(),
            ))
        }
        _ => unreachable!(),
    })
}

/// Residuals of the evolution identities for the principal curvatures on
/// a profile, away from umbilic points:
///
/// * `Delta^phi k_i = -|S|^2 k_i - eta Hess phi'(v_i, v_i) - B(v_i, v_i) + 2 Q^2 / (k_i - k_j)`
/// * `J^eta(k2/eta) = -phi''' <grad mu, v2>^2 + phi'' (k2/eta)(1 - 2 <grad mu, v2>^2) - (2/eta) Q^2 / (k1 - k2)`
/// * `J^(-k1)(eta/k1) = phi''' <grad mu, v1>^2 (eta/k1)^2 - phi'' (eta/k1)(1 - 2 <grad mu, v1>^2) - 2 (eta/k1) Q^2 / (k1 (k1 - k2))`
///
/// where `J^w f = Delta^phi f + 2 <grad w / w, grad f>` and `Q^2 = h_{12,1}^2 + h_{12,2}^2`.
/// Samples that are umbilic (`|k1 - k2| <= threshold`) or within
/// [`AXIS_EXCLUSION`] of the axis are skipped. The two `J` identities also
/// skip samples whose stencil meets `eta <= 0`, and the last one skips
/// `|k1| <= threshold`.
pub fn curvature_evolution_residuals<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    umbilic_threshold: Option<T>,
) -> Result<Vec<ResidualReport<T>>> {
    let pc = field
        .profile_calc()
        .ok_or_else(|| Error::UnsupportedCombination("curvature evolution identities need a profile source".into()))?;
    let ev = evals(field, spec)?;
    let d = profile_data(field);
    let n = field.len();
    let margin = 4;
    let max_s = field.shape.iter().fold(T::zero(), |m, s| m.max(s.norm_sq().sqrt()));
    let delta = umbilic_threshold.unwrap_or(T::lit(1e-8) * max_s);
    let two = T::lit(2.0);

    let usable: Vec<bool> = (0..n)
        .map(|k| counted(field, k, margin) && (d.ks[k] - d.kt[k]).abs() > delta)
        .collect();
    if !usable.iter().any(|&u| u) {
        return Err(Error::UmbilicEverywhere);
    }
    if !(0..n).any(|k| usable[k] && d.cs[k] > T::zero()) {
        return Err(Error::InvalidInput("no non-umbilic sample has eta > 0".into()));
    }

    let (hp_ss, hp_tt) = profile_hess_d1(field, &ev, &d);
    let q2: Vec<T> = (0..n).map(|k| sq(pc.a[k] * (d.ks[k] - d.kt[k]))).collect();
    let drift_lap = |f: &[T]| -> (Vec<T>, Vec<T>) {
        let f1 = pc.d(f);
        let lap = pc.laplacian(f);
        let out = (0..n).map(|k| lap[k] + ev[k].d1 * d.sn[k] * f1[k]).collect();
        (out, f1)
    };

    // Branches: index 0 follows the profile curvature k_s, index 1 the orbit curvature k_t.
    let branch = [&d.ks, &d.kt];
    let hess_bb = [&hp_ss, &hp_tt];
    let mu_dir2: [Vec<T>; 2] = [d.sn.iter().map(|&s| sq(s)).collect(), vec![T::zero(); n]];

    let mut lemma = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for b in 0..2 {
        let (lap, _) = drift_lap(branch[b]);
        for k in 0..n {
            let kb = branch[b][k];
            let ko = branch[1 - b][k];
            let s2 = sq(d.ks[k]) + sq(d.kt[k]);
            let bform = if b == 0 {
                two * ev[k].d2 * kb * mu_dir2[0][k]
            } else {
                T::zero()
            };
            lemma[b].push(lap[k] + s2 * kb + d.cs[k] * hess_bb[b][k] + bform - two * q2[k] / (kb - ko));
        }
    }

    let eta_d = pc.d(&d.cs);
    let mut paso3 = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut paso4 = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for b in 0..2 {
        // paso3 with k2 on branch b.
        let f: Vec<T> = (0..n).map(|k| branch[b][k] / d.cs[k]).collect();
        let (lap, f1) = drift_lap(&f);
        for k in 0..n {
            let k2 = branch[b][k];
            let k1 = branch[1 - b][k];
            let m2 = mu_dir2[b][k];
            let e = ev[k];
            let j = lap[k] + two * eta_d[k] / d.cs[k] * f1[k];
            let rhs = -e.d3 * m2 + e.d2 * f[k] * (T::one() - two * m2) - two / d.cs[k] * q2[k] / (k1 - k2);
            paso3[b].push(j - rhs);
        }
        // paso4 with k1 on branch b.
        let g: Vec<T> = (0..n).map(|k| d.cs[k] / branch[b][k]).collect();
        let (lap, g1) = drift_lap(&g);
        let k1d = pc.d(branch[b]);
        for k in 0..n {
            let k1 = branch[b][k];
            let k2 = branch[1 - b][k];
            let m2 = mu_dir2[b][k];
            let e = ev[k];
            let j = lap[k] + two * k1d[k] / k1 * g1[k];
            let rhs =
                e.d3 * m2 * sq(g[k]) - e.d2 * g[k] * (T::one() - two * m2) - two * g[k] * q2[k] / (k1 * (k1 - k2));
            paso4[b].push(j - rhs);
        }
    }

    let h = field.spacing();
    let mut k1_vals = Vec::with_capacity(n);
    let mut k2_vals = Vec::with_capacity(n);
    let mut p3 = Vec::with_capacity(n);
    let mut p4 = Vec::with_capacity(n);
    for k in 0..n {
        if !usable[k] {
            k1_vals.push(None);
            k2_vals.push(None);
            p3.push(None);
            p4.push(None);
            continue;
        }
        let lo = if d.ks[k] <= d.kt[k] { 0 } else { 1 };
        let hi = 1 - lo;
        k1_vals.push(Some(lemma[lo][k]));
        k2_vals.push(Some(lemma[hi][k]));
        let eta_ok = (k - margin..=k + margin).all(|i| d.cs[i] > T::zero());
        p3.push(eta_ok.then_some(paso3[hi][k]));
        let k1_ok = branch[lo][k].abs() > delta;
        p4.push((eta_ok && k1_ok).then_some(paso4[lo][k]));
    }
    Ok(vec![
        ResidualReport::from_values("Delta^phi k1 evolution", &k1_vals, h, margin),
        ResidualReport::from_values("Delta^phi k2 evolution", &k2_vals, h, margin),
        ResidualReport::from_values("J^eta(k2/eta)", &p3, h, margin),
        ResidualReport::from_values("J^(-k1)(eta/k1)", &p4, h, margin),
    ])
}
