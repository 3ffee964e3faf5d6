use approx::assert_relative_eq;
use proptest::prelude::*;

use phimin::potential::PotentialSpec;
use phimin::solvers::{
    profile_height_at, solve_graph, solve_rotational_profile, solve_translation_profile, InitialGuess, NewtonConfig,
    ShootingConfig, Start,
};
use phimin::surface::{
    curvature_evolution_residuals, drift_laplacian, fundamental_identity_residuals, item2_substituted_residual,
    phi_minimal_residual, phi_of_height, principal_frame, sample_geometry, GraphPatch, ProfileCurve, ProfileKind,
    ProfileSample, Rect, Surface,
};
use phimin::Error;

fn square(r: f64) -> Rect<f64> {
    Rect {
        x0: -r,
        x1: r,
        y0: -r,
        y1: r,
    }
}

/// Profile curve from closed-form `(x, z, theta)` as functions of arclength.
fn closed_profile(
    kind: ProfileKind,
    s0: f64,
    s1: f64,
    step: f64,
    f: impl Fn(f64) -> (f64, f64, f64),
) -> ProfileCurve<f64> {
    let n = ((s1 - s0) / step).round() as usize;
    let samples = (0..=n)
        .map(|i| {
            let s = s0 + step * i as f64;
            let (x, z, theta) = f(s);
            ProfileSample { s, x, z, theta }
        })
        .collect();
    ProfileCurve { samples, kind, step }
}

/// Catenoid `x = cosh z` by arclength `s = sinh z`.
fn catenoid(step: f64) -> Surface<f64> {
    Surface::Profile(closed_profile(ProfileKind::Rotational, -1.0, 1.0, step, |s| {
        ((1.0 + s * s).sqrt(), s.asinh(), 1.0f64.atan2(s))
    }))
}

fn vertical_plane() -> Surface<f64> {
    Surface::Profile(closed_profile(
        ProfileKind::TranslationInvariant,
        -1.0,
        1.0,
        1e-2,
        |s| (0.0, s, std::f64::consts::FRAC_PI_2),
    ))
}

fn flat_graph(h: f64) -> Surface<f64> {
    Surface::Graph(GraphPatch::from_fn(square(1.0), h, |_, _| 0.0).unwrap())
}

/// Bowl graph over `[-1, 1]^2` with boundary values from a fine rotational profile.
fn bowl_graph(h: f64) -> Surface<f64> {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let newton = NewtonConfig::new(1e-12, InitialGuess::Harmonic);
    let bc = |x: f64, y: f64| profile_height_at(&p, x.hypot(y)).unwrap();
    let r = solve_graph(&spec, square(1.0), h, bc, &newton).unwrap();
    assert!(r.converged);
    r.surface
}

/// Fine rotational bowl profile for the linear potential.
fn bowl_profile() -> ProfileCurve<f64> {
    let spec = PotentialSpec::linear(1.0);
    let prof =
        solve_rotational_profile(&spec, &ShootingConfig::new(Start::AxisRegular { z0: 0.0 }, 2.5, 1e-4)).unwrap();
    let Surface::Profile(p) = prof.surface else {
        unreachable!()
    };
    p
}

/// The bowl sampled onto a grid of spacing `h` by interpolating the profile.
fn sampled_bowl(p: &ProfileCurve<f64>, h: f64) -> Surface<f64> {
    Surface::Graph(GraphPatch::from_fn(square(1.0), h, |x, y| profile_height_at(p, x.hypot(y)).unwrap()).unwrap())
}

/// Quadratic rotational profile from the axis, solved at `base` and decimated by `k`.
fn quadratic_profile(base: f64, k: usize) -> Surface<f64> {
    let spec = PotentialSpec::quadratic(1.0, 1.0);
    let r = solve_rotational_profile(&spec, &ShootingConfig::new(Start::AxisRegular { z0: 0.0 }, 2.0, base)).unwrap();
    let Surface::Profile(p) = r.surface else { unreachable!() };
    Surface::Profile(p.decimate(k))
}

fn max_interior(values: &[f64], field_ok: impl Fn(usize) -> bool) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(k, _)| field_ok(*k))
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
}

#[test]
fn horizontal_plane_is_flat() {
    let f = sample_geometry(&flat_graph(1.0 / 8.0), &PotentialSpec::constant(0.0)).unwrap();
    for k in 0..f.len() {
        assert_eq!(f.eta[k], 1.0);
        assert_eq!((f.mean[k], f.gauss[k]), (0.0, 0.0));
        assert_eq!(f.grad_mu[k], [0.0, 0.0]);
    }
}

#[test]
fn vertical_plane_is_phi_minimal_for_every_potential() {
    for spec in [
        PotentialSpec::linear(1.0),
        PotentialSpec::quadratic(2.0, -1.0),
        PotentialSpec::constant(3.0),
    ] {
        let f = sample_geometry(&vertical_plane(), &spec).unwrap();
        assert!(f.eta.iter().all(|e| e.abs() < 1e-15));
        assert!(f.mean.iter().all(|h| h.abs() < 1e-12));
        assert!(phi_minimal_residual(&f, &spec).unwrap().max_abs_residual < 1e-12);
    }
}

#[test]
fn catenoid_has_small_mean_curvature() {
    let f = sample_geometry(&catenoid(1e-3), &PotentialSpec::constant(0.0)).unwrap();
    let h = max_interior(&f.mean, |k| f.is_interior(k, 2));
    assert!(h <= 1e-5, "max |H| = {h:e}");
}

#[test]
fn plane_is_not_phi_minimal_for_a_linear_potential() {
    let f = sample_geometry(&flat_graph(1.0 / 8.0), &PotentialSpec::linear(1.0)).unwrap();
    let r = phi_minimal_residual(&f, &PotentialSpec::linear(1.0)).unwrap();
    assert_eq!(r.max_abs_residual, 1.0);
    assert_eq!(r.l2_residual, 1.0);
}

#[test]
fn off_axis_zero_radius_is_rejected() {
    let mut p = closed_profile(ProfileKind::Rotational, 0.0, 0.1, 0.01, |s| (1.0 + s, 0.0, 0.0));
    p.samples[5].x = 0.0;
    assert!(matches!(
        sample_geometry(&Surface::Profile(p), &PotentialSpec::constant(0.0)),
        Err(Error::AxisSingularity { index: 5 })
    ));
}

#[test]
fn tiny_grid_is_rejected() {
    let g = GraphPatch::from_fn(square(0.25), 0.25, |_, _| 0.0).unwrap();
    assert!(matches!(
        sample_geometry(&Surface::Graph(g), &PotentialSpec::constant(0.0)),
        Err(Error::Stencil(_))
    ));
}

#[test]
fn bowl_graph_phi_minimality_converges_at_second_order() {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let r: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0]
        .iter()
        .map(|&h| {
            let f = sample_geometry(&sampled_bowl(&p, h), &spec).unwrap();
            let pm = phi_minimal_residual(&f, &spec).unwrap().max_abs_residual;
            let item5 = fundamental_identity_residuals(&f, &spec, &[5]).unwrap()[0].max_abs_residual;
            assert!(item2_substituted_residual(&f, &spec).unwrap().max_abs_residual < 1e-12);
            (pm, item5)
        })
        .flat_map(|(a, b)| [a, b])
        .collect();
    let (pm_ratio, item5_ratio) = (r[0] / r[2], r[1] / r[3]);
    assert!((3.0..5.5).contains(&pm_ratio), "phi-minimality ratio {pm_ratio} {r:?}");
    assert!((3.0..5.5).contains(&item5_ratio), "item 5 ratio {item5_ratio}");
}

#[test]
fn item8_on_quadratic_profile_is_second_order() {
    let spec = PotentialSpec::quadratic(1.0, 1.0);
    let res: Vec<f64> = [8, 4]
        .iter()
        .map(|&k| {
            let f = sample_geometry(&quadratic_profile(2.5e-4, k), &spec).unwrap();
            fundamental_identity_residuals(&f, &spec, &[8]).unwrap()[0].max_abs_residual
        })
        .collect();
    // C estimated at step 2e-3 bounds the residual at step 1e-3 by C step^2 with slack.
    let c = res[0] / (2e-3f64).powi(2);
    assert!(res[1] <= 1.5 * c * (1e-3f64).powi(2), "{res:?}");
}

#[test]
fn item8_needs_a_profile() {
    let f = sample_geometry(&flat_graph(1.0 / 8.0), &PotentialSpec::constant(0.0)).unwrap();
    assert!(matches!(
        fundamental_identity_residuals(&f, &PotentialSpec::constant(0.0), &[8]),
        Err(Error::UnsupportedCombination(_))
    ));
    assert!(matches!(
        fundamental_identity_residuals(&f, &PotentialSpec::constant(0.0), &[9]),
        Err(Error::InvalidInput(_))
    ));
}

/// Lower unit hemisphere from the south pole.
fn sphere() -> Surface<f64> {
    Surface::Profile(closed_profile(ProfileKind::Rotational, 0.2, 1.2, 1e-2, |s| {
        (s.sin(), -s.cos(), s)
    }))
}

#[test]
fn sphere_is_umbilic_everywhere() {
    let spec = PotentialSpec::constant(0.0);
    let f = principal_frame(&sample_geometry(&sphere(), &spec).unwrap(), None).unwrap();
    let p = f.principal.as_ref().unwrap();
    assert!(p.umbilic.iter().all(|&u| u));
    assert!(p.alpha.iter().all(Option::is_none));
    assert!(matches!(
        curvature_evolution_residuals(&f, &spec, None),
        Err(Error::UmbilicEverywhere)
    ));
}

#[test]
fn grim_reaper_principal_frame() {
    let spec = PotentialSpec::<f64>::linear(1.0);
    let cfg = ShootingConfig::new(
        Start::Point {
            x0: 0.0,
            z0: 0.0,
            theta0: 0.0,
        },
        1.2,
        1e-3,
    )
    .with_s_min(-1.2);
    let r = solve_translation_profile(&spec, &cfg).unwrap();
    let f = principal_frame(&sample_geometry(&r.surface, &spec).unwrap(), None).unwrap();
    let p = f.principal.as_ref().unwrap();
    for k in 0..f.len() {
        // k1 = -theta' < 0 lies along the profile direction e_s.
        assert!(f.k2[k].abs() < 1e-12);
        assert!(p.v1[k][0].abs() > 1.0 - 1e-12);
        assert!(p.v2[k][1].abs() > 1.0 - 1e-12);
        if let Some(q) = p.q_squared[k] {
            assert!(q < 1e-20);
        }
    }
}

#[test]
fn bowl_graph_q_squared_expressions_agree_at_second_order() {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let m: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let f = principal_frame(&sample_geometry(&sampled_bowl(&p, h), &spec).unwrap(), None).unwrap();
            let pd = f.principal.as_ref().unwrap();
            let off_axis = |k: usize| (0.3..=0.8).contains(&f.position[k][0].hypot(f.position[k][1]));
            let dev: Vec<f64> = (0..f.len())
                .map(|k| match (pd.q_squared[k], pd.q_squared_alt[k]) {
                    (Some(a), Some(b)) if off_axis(k) => a - b,
                    _ => 0.0,
                })
                .collect();
            assert!(pd.q_squared_mismatch(&f, 3) >= max_interior(&dev, off_axis));
            max_interior(&dev, off_axis)
        })
        .collect();
    assert!(m[1] < m[0] / 3.0, "{m:?}");
}

#[test]
fn drift_laplacian_of_height_is_phi_prime() {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let err: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let f = sample_geometry(&sampled_bowl(&p, h), &spec).unwrap();
            let psi = phi_of_height(&f, &spec).unwrap();
            let d = drift_laplacian(&f, &f.mu, &psi).unwrap();
            let dev: Vec<f64> = (0..f.len()).map(|k| d.values[k] - spec.d1(f.mu[k]).unwrap()).collect();
            max_interior(&dev, |k| f.is_interior(k, d.margin))
        })
        .collect();
    assert!(err[1] < err[0] / 3.0, "{err:?}");
}

#[test]
fn drift_laplacian_of_a_constant_vanishes() {
    for surface in [bowl_graph(1.0 / 16.0), catenoid(1e-2)] {
        let f = sample_geometry(&surface, &PotentialSpec::linear(1.0)).unwrap();
        let psi: Vec<f64> = f.mu.iter().map(|z| z * z).collect();
        let d = drift_laplacian(&f, &vec![2.5; f.len()], &psi).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn drift_laplacian_of_height_on_the_plane_vanishes() {
    let f = sample_geometry(&flat_graph(1.0 / 8.0), &PotentialSpec::constant(0.0)).unwrap();
    let d = drift_laplacian(&f, &f.mu, &vec![0.0; f.len()]).unwrap();
    assert!(d.values.iter().all(|&v| v == 0.0));
}

#[test]
fn evolution_identities_converge_on_profiles() {
    let spec = PotentialSpec::quadratic(1.0, 1.0);
    let res: Vec<Vec<f64>> = [8, 4]
        .iter()
        .map(|&k| {
            let f = sample_geometry(&quadratic_profile(2.5e-4, k), &spec).unwrap();
            curvature_evolution_residuals(&f, &spec, None)
                .unwrap()
                .iter()
                .map(|r| r.max_abs_residual)
                .collect()
        })
        .collect();
    let c = res[0][0] / (2e-3f64).powi(2);
    assert!(res[1][0] <= 1.5 * c * (1e-3f64).powi(2), "{res:?}");
    for (a, b) in res[0].iter().zip(&res[1]) {
        assert!(b < a || *a < 1e-10, "{res:?}");
    }
}

#[test]
fn grim_reaper_evolution_residual_is_second_order() {
    let spec = PotentialSpec::linear(1.0);
    let cfg = ShootingConfig::new(
        Start::Point {
            x0: 0.0,
            z0: 0.0,
            theta0: 0.0,
        },
        1.2,
        2.5e-4,
    )
    .with_s_min(-1.2);
    let r = solve_translation_profile(&spec, &cfg).unwrap();
    let Surface::Profile(p) = r.surface else { unreachable!() };
    let res: Vec<f64> = [8, 4]
        .iter()
        .map(|&k| {
            let f = sample_geometry(&Surface::Profile(p.decimate(k)), &spec).unwrap();
            curvature_evolution_residuals(&f, &spec, None).unwrap()[0].max_abs_residual
        })
        .collect();
    let order = (res[0] / res[1]).log2();
    assert!(order > 1.8, "{res:?}");
}

fn quadric() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(-1.5..1.5f64)
}

fn quadric_graph(c: [f64; 5]) -> Surface<f64> {
    Surface::Graph(
        GraphPatch::from_fn(square(0.5), 1.0 / 16.0, |x, y| {
            c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y
        })
        .unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_invariants_on_graphs(c in quadric(), slope in -2.0..2.0f64) {
        let spec = PotentialSpec::linear(slope);
        let f = sample_geometry(&quadric_graph(c), &spec).unwrap();
        for k in 0..f.len() {
            let scale = f.k1[k].abs().max(f.k2[k].abs()).max(1e-12);
            prop_assert!((f.mean[k] - f.k1[k] - f.k2[k]).abs() <= 1e-10 * scale);
            prop_assert!((f.gauss[k] - f.k1[k] * f.k2[k]).abs() <= 1e-10 * scale * scale);
            prop_assert!(f.k1[k] <= f.k2[k]);
            let s2 = f.shape[k].norm_sq();
            prop_assert!((s2 - (f.mean[k] * f.mean[k] - 2.0 * f.gauss[k])).abs() <= 1e-10 * scale * scale);
            let g = f.grad_mu[k];
            prop_assert!((g[0] * g[0] + g[1] * g[1] + f.eta[k] * f.eta[k] - 1.0).abs() <= 1e-12);
            prop_assert!(f.eta[k].abs() <= 1.0);
        }
        prop_assert!(item2_substituted_residual(&f, &spec).unwrap().max_abs_residual <= 1e-12 * slope.abs().max(1.0).powi(2));
    }

    #[test]
    fn curvature_invariants_on_profiles(a in 0.2..2.0f64, b in -1.0..1.0f64) {
        // Circle arc of curvature a started at angle b, away from the axis.
        let p = closed_profile(ProfileKind::Rotational, 0.0, 0.5, 1e-2, |s| {
            let t = b + a * s;
            (2.0 + (t.sin() - b.sin()) / a, -(t.cos() - b.cos()) / a, t)
        });
        let spec = PotentialSpec::quadratic(1.0, 0.0);
        let f = sample_geometry(&Surface::Profile(p), &spec).unwrap();
        for k in 0..f.len() {
            assert_relative_eq!(f.mean[k], f.k1[k] + f.k2[k], max_relative = 1e-10, epsilon = 1e-14);
            assert_relative_eq!(f.gauss[k], f.k1[k] * f.k2[k], max_relative = 1e-10, epsilon = 1e-14);
            let g = f.grad_mu[k];
            prop_assert!((g[0] * g[0] + g[1] * g[1] + f.eta[k] * f.eta[k] - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn residual_norms_are_ordered(c in quadric(), slope in -2.0..2.0f64) {
        let spec = PotentialSpec::linear(slope);
        let f = sample_geometry(&quadric_graph(c), &spec).unwrap();
        let mut reports = fundamental_identity_residuals(&f, &spec, &[1, 2, 3, 4, 5, 6, 7]).unwrap();
        reports.push(phi_minimal_residual(&f, &spec).unwrap());
        for r in reports {
            prop_assert!(r.max_abs_residual >= 0.0 && r.l2_residual >= 0.0);
            prop_assert!(r.l2_residual <= r.max_abs_residual * (1.0 + 1e-12));
        }
    }
}
