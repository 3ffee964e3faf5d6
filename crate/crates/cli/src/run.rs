//! Command pipelines and the run manifest.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use phimin::estimates::{
    blowup_rescale, convexity_report, curvature_ratio_sup, density_monotonicity, geodesic_disk_area_check,
    ilmanen_estimate_report, omori_gamma_check, AuditRecord, ConvexityReport,
};
use phimin::ilmanen::bounded_geometry_check;
use phimin::potential::{asymptotics, check_conditions, PotentialSpec};
use phimin::solvers::{
    profile_height_at, solve_graph, solve_rotational_profile, solve_translation_profile, SolveResult,
};
use phimin::stability::{
    assemble, first_eigenvalue_of, jacobi_residual, rayleigh_trial_min, region_where, JacobiCertificate,
};
use phimin::surface::{
    curvature_evolution_residuals, fundamental_identity_residuals, item2_substituted_residual, phi_minimal_residual,
    sample_geometry, GeometryField, Surface,
};
use phimin::Error as CoreError;

use crate::config::{
    BoundaryConfig, CertificateConfig, CommandParams, Format, GraphParams, ProfileParams, RegionConfig, RunConfig,
    SurfaceSource,
};
use crate::export::{graph_obj, reports_json, surface_csv, to_json, Artifact, ArtifactWriter};

/// Failure of a run that is not an audit verdict.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: CoreError,
    },
    #[error("solvers: Newton iteration did not converge ({0})")]
    NotConverged(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

trait Qualify<T> {
    fn during(self, module: &'static str) -> Result<T, RunError>;
}

impl<T> Qualify<T> for phimin::Result<T> {
    fn during(self, module: &'static str) -> Result<T, RunError> {
        self.map_err(|source| RunError::Module { module, source })
    }
}

/// Options that the command line adds to a configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory; overrides `output_dir` of the configuration.
    pub out: Option<PathBuf>,
    /// Seed; overrides `seed` of the configuration.
    pub seed: Option<u64>,
    pub verbose: bool,
}

/// Record of one run, written as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: serde_json::Value,
    pub artifacts: Vec<Artifact>,
    pub versions: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
    pub exit_code: i32,
}

/// Manifest plus the directory it was written to.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
    pub records: Vec<AuditRecord>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.manifest.exit_code
    }
}

/// Default output directory when neither the configuration nor the
/// command line names one.
pub const DEFAULT_OUT_DIR: &str = "phimin-out";

struct Ctx<'a> {
    spec: PotentialSpec<f64>,
    writer: ArtifactWriter,
    records: Vec<AuditRecord>,
    seed: u64,
    verbose: bool,
    cfg: &'a RunConfig,
}

impl Ctx<'_> {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("[phimin] {}", msg.as_ref());
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.writer.write(name, contents)?;
        self.log(format!("wrote {}", path.display()));
        Ok(())
    }
}

/// Executes the pipeline of `cfg` and writes its artifacts.
///
/// Every run writes `audit.json` (possibly `[]`) and `manifest.json`. The
/// exit code is 1 when some audit record failed and 0 otherwise; errors
/// are returned instead.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let mut ctx = Ctx {
        spec: cfg.potential.to_spec(),
        writer: ArtifactWriter::new(&out_dir)?,
        records: Vec::new(),
        seed: opts.seed.unwrap_or(cfg.seed),
        verbose: opts.verbose,
        cfg,
    };
    ctx.log(format!("command {} into {}", cfg.command.cli_name(), out_dir.display()));
    dispatch(&mut ctx)?;

    let records = std::mem::take(&mut ctx.records);
    ctx.write("audit.json", &reports_json(&records))?;
    let exit_code = if records.iter().all(|r| r.passed) { 0 } else { 1 };
    for r in records.iter().filter(|r| !r.passed) {
        ctx.log(format!("audit failed: {}", r.name));
    }
    let mut echo = cfg.clone();
    echo.seed = ctx.seed;
    echo.output_dir = Some(out_dir.clone());
    let manifest = RunManifest {
        config: serde_json::to_value(&echo).expect("configuration serializes"),
        artifacts: ctx.writer.artifacts().to_vec(),
        versions: BTreeMap::from([
            ("phimin".to_string(), phimin_version().to_string()),
            ("phimin-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        exit_code,
    };
    crate::export::write_atomic(&out_dir, "manifest.json", to_json(&manifest).as_bytes())?;
    Ok(RunOutcome {
        manifest,
        out_dir,
        records,
    })
}

fn phimin_version() -> &'static str {
    // Both crates share the workspace version.
    env!("CARGO_PKG_VERSION")
}

fn dispatch(ctx: &mut Ctx<'_>) -> Result<(), RunError> {
    let params = ctx.cfg.params.clone();
    match &params {
        CommandParams::PotentialCheck(p) => potential_check(ctx, p.z_lo, p.z_hi, p.n_samples),
        CommandParams::SolveRotational(p) => {
            let r = solve_rotational_profile(&ctx.spec, &p.to_shooting()).during("solvers")?;
            write_solution(ctx, &r, &[Format::Csv, Format::Json])
        }
        CommandParams::SolveTranslation(p) => {
            let r = solve_translation_profile(&ctx.spec, &p.to_shooting()).during("solvers")?;
            write_solution(ctx, &r, &[Format::Csv, Format::Json])
        }
        CommandParams::SolveGraph(g) => {
            let r = graph_solution(ctx, g)?;
            write_solution(ctx, &r, &[Format::Csv, Format::Json, Format::Obj])
        }
        CommandParams::AuditFundamental(p) => {
            let field = solved_field(ctx, &p.surface)?;
            audit_fundamental(ctx, &field, p.items.as_deref(), p.evolution)
        }
        CommandParams::AuditStability(p) => {
            let field = solved_field(ctx, &p.surface)?;
            audit_stability(ctx, &field, p)
        }
        CommandParams::AuditArea(p) => {
            let field = solved_field(ctx, &p.surface)?;
            let center = p.center.unwrap_or_else(|| default_center(&field));
            let gamma = match p.gamma {
                Some(g) => g,
                None => {
                    let (lo, hi) = height_range(&field);
                    check_conditions(&ctx.spec, lo, hi, 257).during("potential")?.gamma
                }
            };
            let report = geodesic_disk_area_check(&field, center, p.rho, &ctx.spec, gamma).during("estimates")?;
            ctx.write("area.json", &to_json(&report))?;
            ctx.records.push(report.audit_record());
            Ok(())
        }
        CommandParams::AuditMonotonicity(p) => {
            let field = solved_field(ctx, &p.surface)?;
            let report = density_monotonicity(&field, p.q, &p.radii, &ctx.spec, p.epsilon).during("estimates")?;
            ctx.write("density.csv", &report.to_csv())?;
            ctx.write("density.json", &to_json(&report))?;
            ctx.records.push(report.audit_record());
            Ok(())
        }
        CommandParams::AuditCurvatureRatio(p) => {
            let field = solved_field(ctx, &p.surface)?;
            let sup = curvature_ratio_sup(&field, &ctx.spec).during("estimates")?;
            let boundary = boundary_samples(&field);
            let ilmanen = ilmanen_estimate_report(&field, &ctx.spec, &boundary).during("estimates")?;
            let record = AuditRecord::new("curvature ratio").value("sup |S| / phi'", sup);
            ctx.write(
                "curvature_ratio.json",
                &to_json(&CurvatureRatioOutput {
                    sup,
                    ilmanen: ilmanen.clone(),
                }),
            )?;
            ctx.records.push(record);
            ctx.records.push(ilmanen.audit_record());
            Ok(())
        }
        CommandParams::AuditConvexity(p) => {
            let field = solved_field(ctx, &p.surface)?;
            audit_convexity(ctx, &field, p.tol)
        }
        CommandParams::Blowup(p) => {
            let field = solved_field(ctx, &p.surface)?;
            let basepoints = match (&p.basepoints, &p.heights) {
                (Some(b), _) => b.clone(),
                (None, Some(h)) => h
                    .iter()
                    .map(|&z| {
                        field.mu.iter().position(|&m| m >= z).ok_or_else(|| RunError::Module {
                            module: "estimates",
                            source: CoreError::InvalidInput(format!("no sample reaches height {z}")),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                (None, None) => unreachable!("validated configuration names basepoints"),
            };
            let result =
                blowup_rescale(&[&field.source], &basepoints, &p.scales, &ctx.spec, p.model).during("estimates")?;
            let stages: Vec<StageSummary> = result
                .stages
                .iter()
                .map(|s| StageSummary {
                    scale: s.scale,
                    basepoint: s.basepoint,
                    phi_ratio: s.phi_ratio,
                    shift: s.shift,
                    window_samples: s.window_samples,
                    hausdorff_distance: s.hausdorff_distance,
                    c2_distance: s.c2_distance,
                })
                .collect();
            let summary = BlowupSummary {
                model: format!("{:?}", result.model),
                window_radius: result.window_radius,
                c_estimate: result.c_estimate,
                stages,
            };
            ctx.write("blowup.json", &to_json(&summary))?;
            ctx.records.push(result.audit_record());
            Ok(())
        }
        CommandParams::Export(p) => {
            let r = solve_source(ctx, &p.surface)?;
            let formats = match &p.formats {
                Some(f) => f.clone(),
                None if matches!(r.surface, Surface::Graph(_)) => vec![Format::Csv, Format::Json, Format::Obj],
                None => vec![Format::Csv, Format::Json],
            };
            write_solution(ctx, &r, &formats)
        }
    }
}

#[derive(Serialize)]
struct CurvatureRatioOutput {
    sup: f64,
    ilmanen: phimin::estimates::IlmanenEstimateReport<f64>,
}

#[derive(Serialize)]
struct StageSummary {
    scale: f64,
    basepoint: usize,
    phi_ratio: f64,
    shift: [f64; 3],
    window_samples: usize,
    hausdorff_distance: f64,
    c2_distance: f64,
}

#[derive(Serialize)]
struct BlowupSummary {
    model: String,
    window_radius: f64,
    c_estimate: f64,
    stages: Vec<StageSummary>,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    kind: &'static str,
    samples: usize,
    residual: f64,
    iterations: usize,
    converged: bool,
    error_constant: Option<f64>,
    diagnostics: &'a str,
    phi_minimal_residual: phimin::surface::ResidualReport<f64>,
}

fn potential_check(ctx: &mut Ctx<'_>, z_lo: f64, z_hi: f64, n: usize) -> Result<(), RunError> {
    let spec = &ctx.spec;
    let cond = check_conditions(spec, z_lo, z_hi, n).during("potential")?;
    let geometry = bounded_geometry_check(spec, z_lo, z_hi, n).during("ilmanen")?;
    let asym = match asymptotics(spec) {
        Ok(a) => Some(a),
        Err(CoreError::UnsupportedFamily(_)) => None,
        Err(e) => {
            return Err(RunError::Module {
                module: "potential",
                source: e,
            })
        }
    };
    let mut csv = String::from("z,phi,d1,d2,d3\n");
    for i in 0..n {
        let z = z_lo + (z_hi - z_lo) * i as f64 / (n - 1) as f64;
        let e = spec.eval(z).during("potential")?;
        csv.push_str(&format!("{},{},{},{},{}\n", z, e.phi, e.d1, e.d2, e.d3));
    }
    let mut record = AuditRecord::new("potential conditions")
        .hypothesis("c1", cond.c1_holds)
        .hypothesis("c2", cond.c2_holds)
        .hypothesis("cc3", cond.cc3_holds)
        .hypothesis("phi''' <= 0", cond.d3_nonpositive)
        .hypothesis("bounded geometry", geometry.bounded)
        .value("gamma", cond.gamma)
        .value("sup e^(-phi) max(phi'^2, phi'')", geometry.sup_quantity);
    if let Some(l) = cond.lambda {
        record = record.value("Lambda", l);
    }
    if let Some(b) = cond.beta {
        record = record.value("beta", b);
    }
    #[derive(Serialize)]
    struct Out<'a> {
        conditions: &'a phimin::potential::ConditionReport<f64>,
        bounded_geometry: &'a phimin::ilmanen::BoundedGeometryReport<f64>,
        asymptotics: Option<phimin::potential::Asymptotics<f64>>,
    }
    let out = Out {
        conditions: &cond,
        bounded_geometry: &geometry,
        asymptotics: asym,
    };
    ctx.write("potential.csv", &csv)?;
    ctx.write("conditions.json", &to_json(&out))?;
    ctx.records.push(record);
    Ok(())
}

fn graph_solution(ctx: &Ctx<'_>, g: &GraphParams) -> Result<SolveResult<f64>, RunError> {
    let newton = g.newton.to_newton();
    let spec = &ctx.spec;
    let d = g.domain;
    let corners = [(d.x0, d.y0), (d.x1, d.y0), (d.x0, d.y1), (d.x1, d.y1)];
    let result = match &g.boundary {
        BoundaryConfig::Constant { value } => {
            let v = *value;
            solve_graph(spec, d, g.h, |_, _| v, &newton)
        }
        BoundaryConfig::Paraboloid { a } => {
            let a = *a;
            solve_graph(spec, d, g.h, |x, y| a * (x * x + y * y), &newton)
        }
        BoundaryConfig::RotationalProfile(p) => {
            let curve = profile_curve(solve_rotational_profile(spec, &p.to_shooting()).during("solvers")?);
            let reach = corners.iter().map(|&(x, y)| x.hypot(y)).fold(0.0, f64::max);
            if profile_height_at(&curve, reach).is_none() {
                return Err(uncovered(reach));
            }
            solve_graph(
                spec,
                d,
                g.h,
                |x, y| profile_height_at(&curve, x.hypot(y)).unwrap_or(f64::NAN),
                &newton,
            )
        }
        BoundaryConfig::TranslationProfile(p) => {
            let curve = profile_curve(solve_translation_profile(spec, &p.to_shooting()).during("solvers")?);
            for x in [d.x0, d.x1] {
                if profile_height_at(&curve, x).is_none() {
                    return Err(uncovered(x));
                }
            }
            solve_graph(
                spec,
                d,
                g.h,
                |x, _| profile_height_at(&curve, x).unwrap_or(f64::NAN),
                &newton,
            )
        }
    }
    .during("solvers")?;
    if !result.converged {
        return Err(RunError::NotConverged(result.diagnostics.clone()));
    }
    Ok(result)
}

fn uncovered(x: f64) -> RunError {
    RunError::Module {
        module: "solvers",
        source: CoreError::InvalidInput(format!("boundary profile does not reach abscissa {x}")),
    }
}

fn profile_curve(r: SolveResult<f64>) -> phimin::surface::ProfileCurve<f64> {
    match r.surface {
        Surface::Profile(c) => c,
        Surface::Graph(_) => unreachable!("profile solvers return profiles"),
    }
}

fn solve_profile(ctx: &Ctx<'_>, p: &ProfileParams, rotational: bool) -> Result<SolveResult<f64>, RunError> {
    let cfg = p.to_shooting();
    if rotational {
        solve_rotational_profile(&ctx.spec, &cfg).during("solvers")
    } else {
        solve_translation_profile(&ctx.spec, &cfg).during("solvers")
    }
}

fn solve_source(ctx: &Ctx<'_>, s: &SurfaceSource) -> Result<SolveResult<f64>, RunError> {
    ctx.log("solving surface");
    match s {
        SurfaceSource::Rotational(p) => solve_profile(ctx, p, true),
        SurfaceSource::Translation(p) => solve_profile(ctx, p, false),
        SurfaceSource::Graph(g) => graph_solution(ctx, g),
    }
}

fn solved_field(ctx: &Ctx<'_>, s: &SurfaceSource) -> Result<GeometryField<f64>, RunError> {
    let r = solve_source(ctx, s)?;
    sample_geometry(&r.surface, &ctx.spec).during("surface_geometry")
}

fn write_solution(ctx: &mut Ctx<'_>, r: &SolveResult<f64>, formats: &[Format]) -> Result<(), RunError> {
    let field = sample_geometry(&r.surface, &ctx.spec).during("surface_geometry")?;
    let (kind, stem) = match &r.surface {
        Surface::Profile(_) => ("profile", "profile"),
        Surface::Graph(_) => ("graph", "graph"),
    };
    for f in formats {
        match f {
            Format::Csv => ctx.write(&format!("{stem}.csv"), &surface_csv(&field))?,
            Format::Json => {
                let summary = SolveSummary {
                    kind,
                    samples: r.surface.len(),
                    residual: r.residual,
                    iterations: r.iterations,
                    converged: r.converged,
                    error_constant: r.error_constant,
                    diagnostics: &r.diagnostics,
                    phi_minimal_residual: phi_minimal_residual(&field, &ctx.spec).during("surface_geometry")?,
                };
                ctx.write("solve.json", &to_json(&summary))?;
                ctx.write(&format!("{stem}.json"), &to_json(&r.surface))?;
            }
            Format::Obj => match &r.surface {
                Surface::Graph(g) => ctx.write(&format!("{stem}.obj"), &graph_obj(g))?,
                Surface::Profile(_) => {
                    return Err(RunError::Module {
                        module: "cli",
                        source: CoreError::UnsupportedCombination("OBJ export needs a graph surface".into()),
                    })
                }
            },
        }
    }
    Ok(())
}

fn audit_fundamental(
    ctx: &mut Ctx<'_>,
    field: &GeometryField<f64>,
    items: Option<&[u8]>,
    evolution: bool,
) -> Result<(), RunError> {
    let items: Vec<usize> = match items {
        Some(v) => v.iter().map(|&i| i as usize).collect(),
        None if field.is_profile() => (1..=8).collect(),
        None => (1..=7).collect(),
    };
    let mut reports = fundamental_identity_residuals(field, &ctx.spec, &items).during("surface_geometry")?;
    let item2 = item2_substituted_residual(field, &ctx.spec).during("surface_geometry")?;
    if evolution && field.is_profile() {
        reports.extend(curvature_evolution_residuals(field, &ctx.spec, None).during("surface_geometry")?);
    }
    let mut sup_d1 = 1.0f64;
    for &z in &field.mu {
        sup_d1 = sup_d1.max(ctx.spec.d1(z).during("potential")?.abs());
    }
    let tol = 1e-10 * sup_d1 * sup_d1;
    let mut record = AuditRecord::new("fundamental identities")
        .value("item 2 with H = -phi' eta", item2.max_abs_residual)
        .tolerance("item 2 with H = -phi' eta", tol);
    for r in &reports {
        record = record.value(&r.identity_name, r.max_abs_residual);
    }
    reports.push(item2.clone());
    ctx.write("identities.json", &reports_json(&reports))?;
    ctx.records.push(record.conclude(item2.max_abs_residual <= tol));
    Ok(())
}

#[derive(Serialize)]
struct StabilityOutput {
    region_samples: usize,
    lambda1: f64,
    iterations: usize,
    eigen_residual: f64,
    trial_min: Option<f64>,
    certificate: Option<phimin::surface::ResidualReport<f64>>,
    mean_convex: bool,
}

fn audit_stability(
    ctx: &mut Ctx<'_>,
    field: &GeometryField<f64>,
    p: &crate::config::StabilityParams,
) -> Result<(), RunError> {
    let region = match p.region {
        RegionConfig::Interior => region_where(field, |_, _| true),
        RegionConfig::Disk { radius } => region_where(field, |_, x| x[0] * x[0] + x[1] * x[1] < radius * radius),
        RegionConfig::HeightBelow { z } => region_where(field, |_, x| x[2] < z),
    };
    let asm = assemble(field, &ctx.spec, &region).during("stability")?;
    let spectrum = first_eigenvalue_of(&asm, p.eig_tol).during("stability")?;
    let trial_min = if p.trials > 0 {
        Some(rayleigh_trial_min(&asm, p.trials, ctx.seed).during("stability")?)
    } else {
        None
    };
    let certificate = match &p.certificate {
        Some(CertificateConfig::Killing { v }) => {
            Some(jacobi_residual(field, &ctx.spec, JacobiCertificate::Killing(*v)).during("stability")?)
        }
        Some(CertificateConfig::LogEta) => {
            Some(jacobi_residual(field, &ctx.spec, JacobiCertificate::LogEta).during("stability")?)
        }
        None => None,
    };
    let s_max = field.shape_norm_sq().iter().fold(0.0f64, |m, &s| m.max(s.sqrt()));
    let h_tol = 1e-8 * s_max.max(1.0);
    let mean_convex = region.iter().all(|&k| field.mean[k] <= h_tol);
    let mut increasing = true;
    for &k in &region {
        increasing &= ctx.spec.d1(field.mu[k]).during("potential")? > 0.0;
    }

    let mut eig = String::from("sample,x,y,z,u\n");
    for (k, u) in spectrum.eigenfunction.iter().enumerate() {
        let x = field.position[k];
        eig.push_str(&format!("{},{},{},{},{}\n", k, x[0], x[1], x[2], u));
    }
    let out = StabilityOutput {
        region_samples: asm.region.len(),
        lambda1: spectrum.lambda1,
        iterations: spectrum.iterations,
        eigen_residual: spectrum.residual,
        trial_min,
        certificate: certificate.clone(),
        mean_convex,
    };
    ctx.write("stability.json", &to_json(&out))?;
    ctx.write("eigenfunction.csv", &eig)?;
    let mut record = AuditRecord::new("stability")
        .hypothesis("H <= 0", mean_convex)
        .hypothesis("phi' > 0", increasing)
        .value("lambda1", spectrum.lambda1)
        .value("region_samples", asm.region.len() as f64)
        .tolerance("lambda1", p.tolerance);
    if let Some(t) = trial_min {
        record = record.value("rayleigh_trial_min", t);
    }
    if let Some(c) = &certificate {
        record = record.value(&c.identity_name, c.max_abs_residual);
    }
    ctx.records.push(record.conclude(spectrum.lambda1 >= -p.tolerance));
    Ok(())
}

fn audit_convexity(ctx: &mut Ctx<'_>, field: &GeometryField<f64>, tol: Option<f64>) -> Result<(), RunError> {
    let tol = tol.unwrap_or_else(|| {
        let s2 = field.shape_norm_sq().iter().fold(0.0f64, |m, &s| m.max(s));
        10.0 * field.spacing() * field.spacing() * s2
    });
    let report = convexity_report(field, &ctx.spec, tol).during("estimates")?;
    ctx.write("convexity.json", &to_json(&report))?;
    ctx.write("convexity_samples.csv", &ConvexityReport::samples_csv(field))?;
    ctx.records.push(report.audit_record());
    match omori_gamma_check(field, &ctx.spec, None) {
        Ok(o) => {
            ctx.write("log_distance.json", &to_json(&o))?;
            let h = report.hypotheses;
            let mut r = o.audit_record();
            r.hypotheses.insert("c1".into(), h.c1);
            r.hypotheses.insert("cc3".into(), h.cc3);
            r.hypotheses.insert("phi''' <= 0".into(), h.d3_nonpositive);
            r.passed = !r.hypotheses.values().all(|&b| b) || (o.gradient_margin >= 0.0 && o.laplacian_margin >= 0.0);
            ctx.records.push(r);
        }
        Err(CoreError::OriginProximity { index, .. }) => {
            ctx.log(format!("log distance check skipped: sample {index} sits at the origin"));
        }
        Err(e) => {
            return Err(RunError::Module {
                module: "estimates",
                source: e,
            })
        }
    }
    Ok(())
}

fn default_center(field: &GeometryField<f64>) -> usize {
    match &field.source {
        Surface::Graph(g) => g.idx(g.nx / 2, g.ny / 2),
        Surface::Profile(_) => 0,
    }
}

fn boundary_samples(field: &GeometryField<f64>) -> Vec<usize> {
    match &field.source {
        Surface::Graph(g) => (0..g.u.len()).filter(|&k| g.is_boundary(k % g.nx, k / g.nx)).collect(),
        Surface::Profile(c) => {
            let n = c.len();
            let on_axis = |k: usize| c.kind == phimin::surface::ProfileKind::Rotational && c.samples[k].x <= 1e-12;
            [0, n - 1].into_iter().filter(|&k| !on_axis(k)).collect()
        }
    }
}

fn height_range(field: &GeometryField<f64>) -> (f64, f64) {
    let lo = field.mu.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = field.mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        let pad = 1e-6 * (1.0 + lo.abs());
        (lo - pad, hi + pad)
    }
}
