use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;

use phimin::estimates::{
    blowup_rescale, convexity_report, curvature_ratio_sup, density_monotonicity, geodesic_disk_area_check,
    ilmanen_estimate_report, omori_gamma_check, rescale_surface, BlowupModel, ConvexityVerdict,
};
use phimin::potential::PotentialSpec;
use phimin::solvers::{
    profile_height_at, solve_graph, solve_rotational_profile, solve_translation_profile, InitialGuess, NewtonConfig,
    ShootingConfig, Start,
};
use phimin::surface::{
    sample_geometry, GeometryField, GraphPatch, ProfileCurve, ProfileKind, ProfileSample, Rect, Surface,
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

fn flat_graph(r: f64, h: f64, height: f64) -> GraphPatch<f64> {
    GraphPatch::from_fn(square(r), h, |_, _| height).unwrap()
}

fn center(g: &GraphPatch<f64>) -> usize {
    g.idx(g.nx / 2, g.ny / 2)
}

fn rotational_bowl(spec: &PotentialSpec<f64>, z0: f64, s_max: f64, step: f64) -> Surface<f64> {
    let cfg = ShootingConfig::new(Start::AxisRegular { z0 }, s_max, step);
    solve_rotational_profile(spec, &cfg).unwrap().surface
}

fn bowl_profile() -> ProfileCurve<f64> {
    match rotational_bowl(&PotentialSpec::linear(1.0), 0.0, 2.5, 1e-4) {
        Surface::Profile(p) => p,
        Surface::Graph(_) => unreachable!(),
    }
}

/// Newton-solved bowl graph over `[-1, 1]^2` for the linear potential.
fn bowl_graph(p: &ProfileCurve<f64>, h: f64) -> GraphPatch<f64> {
    let newton = NewtonConfig::new(1e-12, InitialGuess::Harmonic);
    let bc = |x: f64, y: f64| profile_height_at(p, x.hypot(y)).unwrap();
    let r = solve_graph(&PotentialSpec::linear(1.0), square(1.0), h, bc, &newton).unwrap();
    match r.surface {
        Surface::Graph(g) => g,
        Surface::Profile(_) => unreachable!(),
    }
}

fn grim_reaper(step: f64) -> Surface<f64> {
    let cfg = ShootingConfig::new(
        Start::Point {
            x0: 0.0,
            z0: 0.0,
            theta0: 0.0,
        },
        3.0,
        step,
    )
    .with_s_min(-3.0);
    solve_translation_profile(&PotentialSpec::linear(1.0), &cfg)
        .unwrap()
        .surface
}

fn catenoid(step: f64) -> Surface<f64> {
    let cfg = ShootingConfig::new(
        Start::Point {
            x0: 1.0,
            z0: 0.0,
            theta0: FRAC_PI_2,
        },
        2.0,
        step,
    )
    .with_s_min(-2.0);
    solve_rotational_profile(&PotentialSpec::constant(0.0), &cfg)
        .unwrap()
        .surface
}

fn vertical_strip() -> Surface<f64> {
    let n = 200;
    let samples = (0..=n)
        .map(|i| {
            let s = -1.0 + 0.01 * i as f64;
            ProfileSample {
                s,
                x: 0.0,
                z: s,
                theta: FRAC_PI_2,
            }
        })
        .collect();
    Surface::Profile(ProfileCurve {
        samples,
        kind: ProfileKind::TranslationInvariant,
        step: 0.01,
    })
}

fn boundary_of(g: &GraphPatch<f64>) -> Vec<usize> {
    (0..g.u.len()).filter(|&k| g.is_boundary(k % g.nx, k / g.nx)).collect()
}

/// Area of the polar cap of radius `rho` on a rotational profile, by the
/// trapezoid rule on `2 pi x ds` over the meridian from the axis.
fn polar_cap_area(p: &ProfileCurve<f64>, rho: f64) -> f64 {
    let mut a = 0.0;
    for w in p.samples.windows(2) {
        if w[1].s > rho {
            break;
        }
        a += PI * (w[0].x + w[1].x) * (w[1].s - w[0].s);
    }
    a
}

#[test]
fn flat_disk_area_is_within_the_grid_error() {
    let spec = PotentialSpec::linear(1.0);
    for h in [1.0 / 16.0, 1.0 / 32.0] {
        let g = flat_graph(1.0, h, 0.0);
        let f = sample_geometry(&Surface::Graph(g.clone()), &spec).unwrap();
        for rho in [0.3, 0.5] {
            let r = geodesic_disk_area_check(&f, center(&g), rho, &spec, 1.0).unwrap();
            let exact = PI * rho * rho;
            assert!(
                (r.disk_area - exact).abs() <= 2.0 * h / rho * exact,
                "h = {h}, rho = {rho}: {}",
                r.disk_area
            );
            assert!(r.passed);
            assert_relative_eq!(r.bound, 4.0 * exact, max_relative = 1e-15);
        }
    }
}

#[test]
fn bowl_disk_area_satisfies_the_bound() {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let g = bowl_graph(&p, 1.0 / 32.0);
    let f = sample_geometry(&Surface::Graph(g.clone()), &spec).unwrap();
    let r = geodesic_disk_area_check(&f, center(&g), 0.3, &spec, -1.0).unwrap();
    // 2 rho phi'(rho + mu) = 0.6 < log 2 and sqrt(1) rho = 0.3 < 1.
    assert_relative_eq!(r.phi_term, 0.6, max_relative = 1e-12);
    assert_relative_eq!(r.gamma_term, 0.3, max_relative = 1e-15);
    assert!(r.hypothesis_ok);
    assert!(r.passed);
    assert!(r.disk_area < r.bound);
    assert!(r.audit_record().passed);
    // The disk is a polar cap of the exact bowl. The graph metric is within the flat-grid bias.
    let cap = polar_cap_area(&p, 0.3);
    let ratio = r.disk_area / cap;
    assert!(
        (0.95..=1.0).contains(&ratio),
        "graph disk {} against cap {cap}",
        r.disk_area
    );
    // On the profile itself the disk is the cap.
    let pf = sample_geometry(&Surface::Profile(p.clone()), &spec).unwrap();
    let rp = geodesic_disk_area_check(&pf, 0, 0.3, &spec, -1.0).unwrap();
    assert_relative_eq!(rp.disk_area, cap, max_relative = 2e-3);
}

#[test]
fn area_hypothesis_gate_records_without_asserting() {
    let spec = PotentialSpec::linear(1.0);
    let g = bowl_graph(&bowl_profile(), 1.0 / 16.0);
    let f = sample_geometry(&Surface::Graph(g.clone()), &spec).unwrap();
    let r = geodesic_disk_area_check(&f, center(&g), 0.5, &spec, -1.0).unwrap();
    assert!(r.phi_term >= std::f64::consts::LN_2);
    assert!(!r.hypothesis_ok);
    assert!(r.disk_area > 0.0);
    assert!(r.audit_record().passed);
}

#[test]
fn disk_touching_the_boundary_is_rejected() {
    let spec = PotentialSpec::linear(1.0);
    let g = flat_graph(1.0, 1.0 / 16.0, 0.0);
    let f = sample_geometry(&Surface::Graph(g.clone()), &spec).unwrap();
    let e = geodesic_disk_area_check(&f, center(&g), 1.2, &spec, 1.0).unwrap_err();
    assert!(matches!(e, Error::PatchExceeded(_)), "{e}");
    assert!(matches!(
        geodesic_disk_area_check(&f, center(&g), 0.0, &spec, 1.0),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn flat_density_is_a_quarter_of_the_radius() {
    let spec = PotentialSpec::linear(1.0);
    let g = flat_graph(1.0, 1.0 / 32.0, 0.0);
    let f = sample_geometry(&Surface::Graph(g), &spec).unwrap();
    let radii: Vec<f64> = (1..=20).map(|i| 0.04 * i as f64).collect();
    let d = density_monotonicity(&f, [0.0; 3], &radii, &spec, Some(0.9)).unwrap();
    assert!(d.monotone);
    assert_eq!(d.offset, 0.0);
    for (i, &r) in radii.iter().enumerate() {
        assert!(
            (d.o_values[i] - r / 4.0).abs() <= d.o_tolerances[i] + 1e-12,
            "r = {r}: {}",
            d.o_values[i]
        );
    }
    assert!(d.o_values.windows(2).all(|w| w[1] > w[0]));
}

/// Area of the unit catenoid inside the ball of radius `r` about the neck
/// point `(1, 0, 0)`, integrating the angular measure of each orbit in
/// closed form over a fine midpoint rule in arclength.
fn catenoid_ball_area(r: f64) -> f64 {
    let n = 400_000;
    let (s0, s1) = (-1.0, 1.0);
    let ds = (s1 - s0) / n as f64;
    (0..n)
        .map(|i| {
            let s = s0 + ds * (i as f64 + 0.5);
            let x = (1.0 + s * s).sqrt();
            let z = s.asinh();
            let c = (x * x + 1.0 + z * z - r * r) / (2.0 * x);
            x * 2.0 * c.clamp(-1.0, 1.0).acos() * ds
        })
        .sum()
}

#[test]
fn catenoid_density_is_nondecreasing() {
    let spec = PotentialSpec::linear(1.0);
    let f = sample_geometry(&catenoid(1e-3), &spec).unwrap();
    let radii: Vec<f64> = (1..=20).map(|i| 0.04 * i as f64).collect();
    let d = density_monotonicity(&f, [1.0, 0.0, 0.0], &radii, &spec, Some(0.9)).unwrap();
    assert!(d.monotone);
    for (i, &r) in radii.iter().enumerate() {
        let exact = catenoid_ball_area(r);
        assert!(
            (d.areas[i] - exact).abs() <= 1e-3 * exact + d.area_tolerances[i],
            "r = {r}: {} against {exact}",
            d.areas[i]
        );
    }
}

#[test]
fn single_radius_is_monotone() {
    let spec = PotentialSpec::linear(1.0);
    let f = sample_geometry(&Surface::Graph(flat_graph(1.0, 1.0 / 16.0, 0.0)), &spec).unwrap();
    let d = density_monotonicity(&f, [0.0; 3], &[0.5], &spec, None).unwrap();
    assert!(d.monotone);
    assert_eq!(d.o_values.len(), 1);
}

#[test]
fn density_errors() {
    let f = sample_geometry(
        &Surface::Graph(flat_graph(1.0, 1.0 / 16.0, 0.0)),
        &PotentialSpec::linear(1.0),
    )
    .unwrap();
    // phi = 2z rises by 1.8 over the window, so no offset fits [0, 1).
    let e = density_monotonicity(&f, [0.0; 3], &[0.5], &PotentialSpec::linear(2.0), Some(0.9)).unwrap_err();
    assert!(matches!(e, Error::Normalization(_)), "{e}");
    let lin = PotentialSpec::linear(1.0);
    assert!(matches!(
        density_monotonicity(&f, [0.0; 3], &[0.5, 0.4], &lin, None),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        density_monotonicity(&f, [0.0; 3], &[0.95], &lin, Some(0.9)),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        density_monotonicity(&f, [0.9, 0.0, 0.0], &[0.5], &lin, None),
        Err(Error::PatchExceeded(_))
    ));
}

#[test]
fn vertical_plane_has_zero_curvature_ratio() {
    let spec = PotentialSpec::linear(1.0);
    let f = sample_geometry(&vertical_strip(), &spec).unwrap();
    assert_eq!(curvature_ratio_sup(&f, &spec).unwrap(), 0.0);
}

#[test]
fn grim_reaper_curvature_ratio_peaks_at_the_tip() {
    let spec = PotentialSpec::linear(1.0);
    let s = grim_reaper(1e-3);
    let f = sample_geometry(&s, &spec).unwrap();
    let sup = curvature_ratio_sup(&f, &spec).unwrap();
    // |S| = |k1| = cos(theta) with phi' = 1; the largest sampled value is at theta = 0.
    let Surface::Profile(p) = &s else { unreachable!() };
    let oracle = p.samples.iter().map(|q| q.theta.cos()).fold(0.0, f64::max);
    assert_relative_eq!(oracle, 1.0, max_relative = 1e-12);
    assert!((sup - oracle).abs() < 1e-6, "sup = {sup}");
}

#[test]
fn quadratic_bowl_curvature_ratio_stabilizes() {
    let spec = PotentialSpec::quadratic(1.0, 1.0);
    let sup = |s_max: f64, step: f64| {
        let f = sample_geometry(&rotational_bowl(&spec, 0.0, s_max, step), &spec).unwrap();
        curvature_ratio_sup(&f, &spec).unwrap()
    };
    let coarse = sup(2.0, 2e-3);
    let wide = sup(8.0, 2e-3);
    let fine = sup(8.0, 1e-3);
    assert!(
        (wide - coarse).abs() < 1e-9,
        "window growth moved the sup: {coarse} to {wide}"
    );
    assert!((fine - wide).abs() < 1e-6, "refinement moved the sup: {wide} to {fine}");
    assert!(fine.is_finite() && fine > 0.0);
}

#[test]
fn bowl_is_convex() {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let verdicts: Vec<ConvexityVerdict> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let f = sample_geometry(&Surface::Graph(bowl_graph(&p, h)), &spec).unwrap();
            let r = convexity_report(&f, &spec, 10.0 * h * h).unwrap();
            assert!(r.hypotheses.all());
            assert!(r.min_k >= -r.tol);
            assert!(r.min_k > 0.0);
            assert!(r.audit_record().passed);
            r.verdict
        })
        .collect();
    assert_eq!(verdicts, [ConvexityVerdict::ConvexWithinTol; 2]);
}

#[test]
fn grim_reaper_is_flat_and_convex() {
    let spec = PotentialSpec::linear(1.0);
    for step in [2e-3, 1e-3] {
        let f = sample_geometry(&grim_reaper(step), &spec).unwrap();
        let r = convexity_report(&f, &spec, 1e-6).unwrap();
        assert!(r.min_k.abs() < 1e-12);
        assert_eq!(r.verdict, ConvexityVerdict::ConvexWithinTol);
    }
}

#[test]
fn catenoid_fails_the_convexity_hypotheses() {
    let flat = PotentialSpec::constant(0.0);
    for step in [2e-3, 1e-3] {
        let f = sample_geometry(&catenoid(step), &flat).unwrap();
        let r = convexity_report(&f, &flat, 1e-6).unwrap();
        assert!(!r.hypotheses.c1);
        assert_eq!(r.verdict, ConvexityVerdict::HypothesesFail);
        // K = -1 / cosh^4 at the neck.
        assert!((r.min_k + 1.0).abs() < 1e-5, "min K = {}", r.min_k);
        assert!(r.audit_record().passed);
    }
}

#[test]
fn ilmanen_estimates_vanish_on_planes() {
    let lin = PotentialSpec::linear(1.0);
    let f = sample_geometry(&vertical_strip(), &lin).unwrap();
    let last = f.len() - 1;
    let r = ilmanen_estimate_report(&f, &lin, &[0, last]).unwrap();
    assert!(r.sup_s_phi < 1e-15);
    assert!(r.sup_with_r < 1e-15 && r.sup_with_a < 1e-15);

    let flat = PotentialSpec::constant(0.0);
    let g = flat_graph(1.0, 1.0 / 16.0, 0.0);
    let f = sample_geometry(&Surface::Graph(g.clone()), &flat).unwrap();
    let r = ilmanen_estimate_report(&f, &flat, &boundary_of(&g)).unwrap();
    assert_eq!(r.sup_s_phi, 0.0);
    assert_eq!(r.sup_with_r, 0.0);
    assert_eq!(r.sup_with_a, 0.0);
    assert!(r.audit_record().passed);
}

#[test]
fn ilmanen_estimates_stabilize_on_the_bowl() {
    let spec = PotentialSpec::linear(1.0);
    let p = bowl_profile();
    let sups: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let g = bowl_graph(&p, h);
            let f = sample_geometry(&Surface::Graph(g.clone()), &spec).unwrap();
            let r = ilmanen_estimate_report(&f, &spec, &boundary_of(&g)).unwrap();
            assert!(r.sup_with_r.is_finite() && r.sup_with_a.is_finite());
            r.sup_with_r
        })
        .collect();
    assert!((sups[1] - sups[0]).abs() < 0.02 * sups[1], "{sups:?}");
}

fn big_bowl() -> (Surface<f64>, ProfileCurve<f64>) {
    let s = rotational_bowl(&PotentialSpec::linear(1.0), 0.0, 40.0, 1e-3);
    let Surface::Profile(p) = &s else { unreachable!() };
    let p = p.clone();
    (s, p)
}

#[test]
fn bowl_blowups_flatten_to_a_plane() {
    let spec = PotentialSpec::linear(1.0);
    let (s, p) = big_bowl();
    let scales = [4.0, 8.0, 16.0];
    let basepoints: Vec<usize> = scales
        .iter()
        .map(|&n| p.samples.iter().position(|q| q.z >= n).unwrap())
        .collect();
    let r = blowup_rescale(&[&s], &basepoints, &scales, &spec, BlowupModel::Plane).unwrap();
    assert_relative_eq!(r.c_estimate, 1.0 / 16.0, max_relative = 1e-12);
    for (st, &n) in r.stages.iter().zip(&scales) {
        assert_relative_eq!(st.phi_ratio, 1.0 / n, max_relative = 1e-12);
        assert!(st.hausdorff_distance >= 0.0 && st.c2_distance >= 0.0);
    }
    for w in r.stages.windows(2) {
        assert!(w[1].hausdorff_distance < 0.6 * w[0].hausdorff_distance);
        assert!(w[1].c2_distance < 0.6 * w[0].c2_distance);
    }
}

#[test]
fn identity_rescaling_matches_the_bowl() {
    let (s, _) = big_bowl();
    let r = blowup_rescale(&[&s], &[0], &[1.0], &PotentialSpec::linear(1.0), BlowupModel::Bowl).unwrap();
    assert_eq!(r.stages[0].hausdorff_distance, 0.0);
    assert_eq!(r.stages[0].c2_distance, 0.0);
}

#[test]
fn quadratic_blowups_approach_the_unit_bowl() {
    let quad = PotentialSpec::quadratic(1.0, 1.0);
    let heights = [2.0, 6.0, 14.0];
    let sources: Vec<Surface<f64>> = heights
        .iter()
        .map(|&z0| rotational_bowl(&quad, z0, 3.0 / (z0 + 1.0), 1e-3 / (z0 + 1.0)))
        .collect();
    let refs: Vec<&Surface<f64>> = sources.iter().collect();
    let scales: Vec<f64> = heights.iter().map(|z| z + 1.0).collect();
    let r = blowup_rescale(&refs, &[0, 0, 0], &scales, &quad, BlowupModel::Bowl).unwrap();
    assert_relative_eq!(r.c_estimate, 1.0, max_relative = 1e-12);
    // Independent comparison with the bowl of phi = z, solved separately.
    let unit = bowl_profile();
    let gaps: Vec<f64> = r
        .stages
        .iter()
        .map(|st| {
            let Surface::Profile(c) = &st.surface else {
                unreachable!()
            };
            c.samples
                .iter()
                .filter(|q| q.x <= 1.0)
                .map(|q| (q.z - profile_height_at(&unit, q.x).unwrap()).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < 0.5 * w[0], "{gaps:?}");
    }
    for w in r.stages.windows(2) {
        assert!(w[1].hausdorff_distance < w[0].hausdorff_distance);
        assert!(w[1].c2_distance < w[0].c2_distance);
    }
}

#[test]
fn blowup_input_errors() {
    let (s, _) = big_bowl();
    let spec = PotentialSpec::linear(1.0);
    assert!(matches!(
        blowup_rescale(&[&s], &[0, 0], &[2.0, 1.0], &spec, BlowupModel::Plane),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        blowup_rescale(&[&s], &[0], &[1.0, 2.0], &spec, BlowupModel::Plane),
        Err(Error::InvalidInput(_))
    ));
    let short = rotational_bowl(&spec, 0.0, 0.2, 1e-3);
    let e = blowup_rescale(&[&short], &[0], &[1.0], &spec, BlowupModel::Bowl).unwrap_err();
    assert!(matches!(e, Error::WindowUnderflow(_)), "{e}");
}

#[test]
fn omori_inequalities_on_a_raised_plane() {
    let flat = PotentialSpec::constant(0.0);
    let g = flat_graph(6.0, 1.0 / 8.0, 1.0);
    let f = sample_geometry(&Surface::Graph(g), &flat).unwrap();
    let o = omori_gamma_check(&f, &flat, None).unwrap();
    assert_eq!(o.a_const, 0.0);
    // On the plane z = 1 with N = e3: |p^T|^2 = |p|^2 - 1 and
    // Delta gamma = (4 - 4 |p^T|^2 / |p|^2) / |p|^2 = 4 / |p|^4.
    let mut lap_margin = f64::INFINITY;
    let mut grad_margin = f64::INFINITY;
    for q in &f.position {
        let r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        if r2.sqrt() < 2.0 {
            continue;
        }
        lap_margin = lap_margin.min(1.0 - 4.0 / (r2 * r2));
        grad_margin = grad_margin.min(2.0 - 2.0 * (r2 - 1.0).sqrt() / r2);
    }
    assert_relative_eq!(o.laplacian_margin, lap_margin, max_relative = 1e-12);
    assert_relative_eq!(o.gradient_margin, grad_margin, max_relative = 1e-12);
    assert_eq!(o.gradient.max_abs_residual, 0.0);
    assert_eq!(o.laplacian.max_abs_residual, 0.0);
    assert!(o.audit_record().passed);
}

#[test]
fn omori_inequalities_hold_on_a_far_bowl() {
    let spec = PotentialSpec::linear(1.0);
    let f = sample_geometry(&rotational_bowl(&spec, 5.0, 3.0, 1e-3), &spec).unwrap();
    let o = omori_gamma_check(&f, &spec, None).unwrap();
    assert!(o.gradient_margin > 0.0 && o.laplacian_margin > 0.0);
    assert!(o.audit_record().passed);
}

#[test]
fn omori_rejects_the_origin() {
    let flat = PotentialSpec::constant(0.0);
    let f = sample_geometry(&Surface::Graph(flat_graph(1.0, 1.0 / 8.0, 0.0)), &flat).unwrap();
    assert!(matches!(
        omori_gamma_check(&f, &flat, None),
        Err(Error::OriginProximity { .. })
    ));
}

fn quadric(a: f64, b: f64, c: f64, x0: f64, y0: f64) -> GraphPatch<f64> {
    let dom = Rect {
        x0: x0 - 1.0,
        x1: x0 + 1.0,
        y0: y0 - 1.0,
        y1: y0 + 1.0,
    };
    GraphPatch::from_fn(dom, 1.0 / 16.0, |x, y| {
        let (u, v) = (x - x0, y - y0);
        0.5 + a * u * u + b * u * v + c * v * v
    })
    .unwrap()
}

fn field_of(g: GraphPatch<f64>, spec: &PotentialSpec<f64>) -> GeometryField<f64> {
    sample_geometry(&Surface::Graph(g), spec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_ratio_is_translation_invariant(
        a in -0.5..0.5f64,
        b in -0.5..0.5f64,
        c in -0.5..0.5f64,
        dx in -5.0..5.0f64,
        dy in -5.0..5.0f64,
    ) {
        let spec = PotentialSpec::linear(1.0);
        let g = quadric(a, b, c, 0.0, 0.0);
        let mut moved = g.clone();
        moved.domain = Rect { x0: g.domain.x0 + dx, x1: g.domain.x1 + dx, y0: g.domain.y0 + dy, y1: g.domain.y1 + dy };
        let s0 = curvature_ratio_sup(&field_of(g, &spec), &spec).unwrap();
        let s1 = curvature_ratio_sup(&field_of(moved, &spec), &spec).unwrap();
        prop_assert_eq!(s0, s1);
    }

    #[test]
    fn curvatures_scale_inversely_under_rescaling(
        a in -0.5..0.5f64,
        b in -0.5..0.5f64,
        c in -0.5..0.5f64,
        lambda in 0.25..8.0f64,
    ) {
        let flat = PotentialSpec::constant(0.0);
        let g = quadric(a, b, c, 0.0, 0.0);
        let p = center(&g);
        let (scaled, _) = rescale_surface(&Surface::Graph(g.clone()), p, lambda).unwrap();
        let f0 = field_of(g, &flat);
        let f1 = sample_geometry(&scaled, &flat).unwrap();
        let scale = f0.k1.iter().chain(&f0.k2).fold(1.0f64, |m, k| m.max(k.abs()));
        for k in 0..f0.len() {
            prop_assert!((lambda * f1.k1[k] - f0.k1[k]).abs() <= 1e-12 * scale);
            prop_assert!((lambda * f1.k2[k] - f0.k2[k]).abs() <= 1e-12 * scale);
            prop_assert!((lambda * f1.mean[k] - f0.mean[k]).abs() <= 2e-12 * scale);
        }
    }

    #[test]
    fn flat_disks_pass_whenever_the_hypotheses_hold(rho in 0.05..0.8f64, height in 0.0..2.0f64) {
        let spec = PotentialSpec::linear(0.2);
        let g = flat_graph(1.0, 1.0 / 16.0, height);
        let f = sample_geometry(&Surface::Graph(g.clone()), &spec).unwrap();
        let r = geodesic_disk_area_check(&f, center(&g), rho, &spec, 0.04).unwrap();
        if r.hypothesis_ok {
            prop_assert!(r.passed);
        }
        prop_assert!(r.audit_record().passed);
    }

    #[test]
    fn flat_density_is_monotone(mut radii in proptest::collection::vec(0.02..0.85f64, 1..12)) {
        radii.sort_by(f64::total_cmp);
        radii.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
        let spec = PotentialSpec::linear(1.0);
        let f = sample_geometry(&Surface::Graph(flat_graph(1.0, 1.0 / 16.0, 0.0)), &spec).unwrap();
        let d = density_monotonicity(&f, [0.0; 3], &radii, &spec, Some(0.9)).unwrap();
        prop_assert!(d.monotone);
        for i in 1..radii.len() {
            prop_assert!(d.o_values[i] >= d.o_values[i - 1] - d.o_tolerances[i] - d.o_tolerances[i - 1]);
        }
    }
}
