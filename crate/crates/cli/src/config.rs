//! Run configuration: JSON schema, validation and conversion to core types.

use std::fmt;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use phimin::estimates::BlowupModel;
use phimin::potential::PotentialSpec;
use phimin::solvers::{InitialGuess, NewtonConfig, ShootingConfig, Start};
use phimin::surface::{GraphPatch, Rect};

/// One violation of the configuration schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// JSON path of the offending value, `.` for the document root.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {}", list(.0))]
    Schema(Vec<Violation>),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Pipeline selected by the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    PotentialCheck,
    SolveRotational,
    SolveTranslation,
    SolveGraph,
    AuditFundamental,
    AuditStability,
    AuditArea,
    AuditMonotonicity,
    AuditCurvatureRatio,
    AuditConvexity,
    Blowup,
    Export,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::PotentialCheck,
        Command::SolveRotational,
        Command::SolveTranslation,
        Command::SolveGraph,
        Command::AuditFundamental,
        Command::AuditStability,
        Command::AuditArea,
        Command::AuditMonotonicity,
        Command::AuditCurvatureRatio,
        Command::AuditConvexity,
        Command::Blowup,
        Command::Export,
    ];

    /// Name used on the command line, for example `solve-rotational`.
    pub fn cli_name(self) -> String {
        let name = format!("{self:?}");
        let mut out = String::new();
        for (i, c) in name.chars().enumerate() {
            if c.is_ascii_uppercase() && i > 0 {
                out.push('-');
            }
            out.push(c.to_ascii_lowercase());
        }
        out
    }

    pub fn from_cli_name(s: &str) -> Option<Command> {
        Self::ALL.into_iter().find(|c| c.cli_name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyName {
    Constant,
    Linear,
    Quadratic,
    LogPower,
    Series,
}

/// Potential with its parameters at the top level, as in
/// `{"family": "Linear", "slope": 1, "alpha": -1e9}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(rename = "Lambda", default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    /// Left end of the domain; the family default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

/// Starting point of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StartConfig {
    Axis { z0: f64 },
    Point { x0: f64, z0: f64, theta0: f64 },
}

fn default_order() -> u32 {
    4
}

/// Profile integration parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub start: StartConfig,
    pub s_max: f64,
    #[serde(default)]
    pub s_min: f64,
    pub step: f64,
    #[serde(default = "default_order")]
    pub integrator_order: u32,
}

/// Dirichlet data of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Constant {
        value: f64,
    },
    /// `u = a (x^2 + y^2)`.
    Paraboloid {
        a: f64,
    },
    /// Height of a rotational profile at the distance to the axis.
    RotationalProfile(ProfileParams),
    /// Height of a translation-invariant profile at `x`.
    TranslationProfile(ProfileParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GuessConfig {
    Harmonic,
    Zero,
    Paraboloid { a: f64 },
}

fn default_tol() -> f64 {
    1e-10
}

fn default_iters() -> usize {
    50
}

fn default_damping() -> f64 {
    1.0
}

fn default_guess() -> GuessConfig {
    GuessConfig::Harmonic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonParams {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_guess")]
    pub initial_guess: GuessConfig,
}

impl Default for NewtonParams {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iters: default_iters(),
            damping: default_damping(),
            initial_guess: default_guess(),
        }
    }
}

/// Graph over the rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphParams {
    pub domain: Rect<f64>,
    pub h: f64,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub newton: NewtonParams,
}

/// Surface on which an audit runs; it is solved first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSource {
    Rotational(ProfileParams),
    Translation(ProfileParams),
    Graph(GraphParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCheckParams {
    pub z_lo: f64,
    pub z_hi: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_samples() -> usize {
    257
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FundamentalParams {
    pub surface: SurfaceSource,
    /// Identity numbers `1..=8`; all supported ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<Vec<u8>>,
    /// Also evaluate the principal-curvature equations (profiles only).
    #[serde(default = "default_true")]
    pub evolution: bool,
}

/// Samples on which test functions may be nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionConfig {
    /// Every sample off the boundary.
    Interior,
    /// Samples with `x^2 + y^2 < radius^2`.
    Disk { radius: f64 },
    /// Samples with height below `z`.
    HeightBelow { z: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateConfig {
    Killing { v: [f64; 3] },
    LogEta,
}

fn default_region() -> RegionConfig {
    RegionConfig::Interior
}

fn default_eig_tol() -> f64 {
    1e-10
}

fn default_stability_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityParams {
    pub surface: SurfaceSource,
    #[serde(default = "default_region")]
    pub region: RegionConfig,
    #[serde(default = "default_eig_tol")]
    pub eig_tol: f64,
    /// Number of random trial functions; zero skips the trial bound.
    #[serde(default)]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
    /// Allowed negative part of `lambda1` on mean-convex surfaces.
    #[serde(default = "default_stability_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaParams {
    pub surface: SurfaceSource,
    /// Center sample; the middle node of a graph or the first profile sample when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<usize>,
    pub rho: f64,
    /// `sup (2 phi'' - phi'^2)`; computed over the sampled heights when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityParams {
    pub surface: SurfaceSource,
    pub q: [f64; 3],
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceParams {
    pub surface: SurfaceSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexityParams {
    pub surface: SurfaceSource,
    /// Defaults to `10 h^2 max |S|^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupParams {
    pub surface: SurfaceSource,
    /// Basepoints as the first sample reaching each height.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<f64>>,
    /// Basepoints as sample indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoints: Option<Vec<usize>>,
    pub scales: Vec<f64>,
    pub model: BlowupModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Obj,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportParams {
    pub surface: SurfaceSource,
    /// CSV and JSON, plus OBJ for graphs, when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

/// Parameters of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CommandParams {
    PotentialCheck(PotentialCheckParams),
    SolveRotational(ProfileParams),
    SolveTranslation(ProfileParams),
    SolveGraph(GraphParams),
    AuditFundamental(FundamentalParams),
    AuditStability(StabilityParams),
    AuditArea(AreaParams),
    AuditMonotonicity(MonotonicityParams),
    AuditCurvatureRatio(SurfaceParams),
    AuditConvexity(ConvexityParams),
    Blowup(BlowupParams),
    Export(ExportParams),
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub command: Command,
    pub params: CommandParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    potential: PotentialConfig,
    command: Command,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
}

fn typed<T: DeserializeOwned>(v: serde_json::Value, prefix: &str) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            prefix.to_string()
        } else {
            format!("{prefix}.{inner}")
        };
        ConfigError::Schema(vec![Violation {
            path,
            message: e.into_inner().to_string(),
        }])
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    parse_value(value)
}

/// Validates an already parsed JSON document.
pub fn parse_value(value: serde_json::Value) -> Result<RunConfig, ConfigError> {
    if !value.is_object() {
        return Err(ConfigError::Schema(vec![Violation {
            path: ".".into(),
            message: "the configuration must be a JSON object".into(),
        }]));
    }
    let raw: RawConfig = typed(value, "").map_err(|e| match e {
        ConfigError::Schema(mut v) => {
            for x in &mut v {
                x.path = x.path.trim_start_matches('.').to_string();
                if x.path.is_empty() {
                    x.path = ".".into();
                }
            }
            ConfigError::Schema(v)
        }
        other => other,
    })?;
    let p = raw.params;
    let params = match raw.command {
        Command::PotentialCheck => CommandParams::PotentialCheck(typed(p, "params")?),
        Command::SolveRotational => CommandParams::SolveRotational(typed(p, "params")?),
        Command::SolveTranslation => CommandParams::SolveTranslation(typed(p, "params")?),
        Command::SolveGraph => CommandParams::SolveGraph(typed(p, "params")?),
        Command::AuditFundamental => CommandParams::AuditFundamental(typed(p, "params")?),
        Command::AuditStability => CommandParams::AuditStability(typed(p, "params")?),
        Command::AuditArea => CommandParams::AuditArea(typed(p, "params")?),
        Command::AuditMonotonicity => CommandParams::AuditMonotonicity(typed(p, "params")?),
        Command::AuditCurvatureRatio => CommandParams::AuditCurvatureRatio(typed(p, "params")?),
        Command::AuditConvexity => CommandParams::AuditConvexity(typed(p, "params")?),
        Command::Blowup => CommandParams::Blowup(typed(p, "params")?),
        Command::Export => CommandParams::Export(typed(p, "params")?),
    };
    let cfg = RunConfig {
        potential: raw.potential,
        command: raw.command,
        params,
        output_dir: raw.output_dir,
        seed: raw.seed,
    };
    let mut v = Vec::new();
    validate(&cfg, &mut v);
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Schema(v))
    }
}

/// Serializes a configuration in the input schema.
pub fn to_json(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("configuration serializes")
}

struct Checker<'a> {
    out: &'a mut Vec<Violation>,
}

impl Checker<'_> {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.out.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.fail(path, format!("must be a positive number, got {v}"));
        }
    }

    fn finite(&mut self, path: &str, v: f64) {
        if !v.is_finite() {
            self.fail(path, "must be finite");
        }
    }

    fn profile(&mut self, path: &str, p: &ProfileParams) {
        self.positive(&format!("{path}.s_max"), p.s_max);
        self.positive(&format!("{path}.step"), p.step);
        if !(p.s_min <= 0.0 && p.s_min.is_finite()) {
            self.fail(&format!("{path}.s_min"), format!("must be <= 0, got {}", p.s_min));
        }
        if p.integrator_order != 4 {
            self.fail(&format!("{path}.integrator_order"), "only order 4 is available");
        }
        match p.start {
            StartConfig::Axis { z0 } => self.finite(&format!("{path}.start.axis.z0"), z0),
            StartConfig::Point { x0, z0, theta0 } => {
                for (k, v) in [("x0", x0), ("z0", z0), ("theta0", theta0)] {
                    self.finite(&format!("{path}.start.point.{k}"), v);
                }
            }
        }
    }

    fn graph(&mut self, path: &str, g: &GraphParams) {
        self.positive(&format!("{path}.h"), g.h);
        let d = g.domain;
        if GraphPatch::<f64>::intervals(d.x0, d.x1, g.h).is_err()
            || GraphPatch::<f64>::intervals(d.y0, d.y1, g.h).is_err()
        {
            self.fail(
                &format!("{path}.domain"),
                "h must divide both side lengths of a nonempty domain",
            );
        }
        self.positive(&format!("{path}.newton.tol"), g.newton.tol);
        if !(g.newton.damping > 0.0 && g.newton.damping <= 1.0) {
            self.fail(&format!("{path}.newton.damping"), "must lie in ]0, 1]");
        }
        if g.newton.max_iters == 0 {
            self.fail(&format!("{path}.newton.max_iters"), "must be at least 1");
        }
        match &g.boundary {
            BoundaryConfig::RotationalProfile(p) => self.profile(&format!("{path}.boundary.rotational_profile"), p),
            BoundaryConfig::TranslationProfile(p) => self.profile(&format!("{path}.boundary.translation_profile"), p),
            BoundaryConfig::Constant { value } => self.finite(&format!("{path}.boundary.constant.value"), *value),
            BoundaryConfig::Paraboloid { a } => self.finite(&format!("{path}.boundary.paraboloid.a"), *a),
        }
    }

    fn surface(&mut self, path: &str, s: &SurfaceSource) {
        match s {
            SurfaceSource::Rotational(p) => self.profile(&format!("{path}.rotational"), p),
            SurfaceSource::Translation(p) => self.profile(&format!("{path}.translation"), p),
            SurfaceSource::Graph(g) => self.graph(&format!("{path}.graph"), g),
        }
    }

    fn potential(&mut self, p: &PotentialConfig) {
        let allowed: &[&str] = match p.family {
            FamilyName::Constant => &["c0"],
            FamilyName::Linear => &["slope"],
            FamilyName::Quadratic => &["Lambda", "beta"],
            FamilyName::LogPower => &["a"],
            FamilyName::Series => &["Lambda", "beta", "coefficients", "u0"],
        };
        let present = [
            ("c0", p.c0.is_some()),
            ("slope", p.slope.is_some()),
            ("Lambda", p.lambda.is_some()),
            ("beta", p.beta.is_some()),
            ("a", p.a.is_some()),
            ("coefficients", p.coefficients.is_some()),
            ("u0", p.u0.is_some()),
        ];
        for (name, is_set) in present {
            let wanted = allowed.contains(&name);
            if wanted && !is_set {
                self.fail(
                    &format!("potential.{name}"),
                    format!("required by family {:?}", p.family),
                );
            }
            if !wanted && is_set {
                self.fail(
                    &format!("potential.{name}"),
                    format!("not a parameter of family {:?}", p.family),
                );
            }
        }
        if let Some(l) = p.lambda {
            if !(l >= 0.0) {
                self.fail("potential.Lambda", format!("must be >= 0, got {l}"));
            }
        }
        if let Some(alpha) = p.alpha {
            if alpha.is_nan() || alpha == f64::INFINITY {
                self.fail("potential.alpha", "must be a number below +inf");
            }
        }
        if self.out.iter().any(|v| v.path.starts_with("potential.")) {
            return;
        }
        if let Err(e) = p.to_spec().validate() {
            self.fail("potential", e.to_string());
        }
    }
}

fn validate(cfg: &RunConfig, out: &mut Vec<Violation>) {
    let mut c = Checker { out };
    c.potential(&cfg.potential);
    match &cfg.params {
        CommandParams::PotentialCheck(p) => {
            c.finite("params.z_lo", p.z_lo);
            c.finite("params.z_hi", p.z_hi);
            if !(p.z_lo < p.z_hi) {
                c.fail("params.z_hi", "must exceed z_lo");
            }
            if p.n_samples < 2 {
                c.fail("params.n_samples", "must be at least 2");
            }
        }
        CommandParams::SolveRotational(p) | CommandParams::SolveTranslation(p) => c.profile("params", p),
        CommandParams::SolveGraph(g) => c.graph("params", g),
        CommandParams::AuditFundamental(p) => {
            c.surface("params.surface", &p.surface);
            if let Some(items) = &p.items {
                for (i, &k) in items.iter().enumerate() {
                    if !(1..=8).contains(&k) {
                        c.fail(
                            &format!("params.items[{i}]"),
                            format!("identity numbers run from 1 to 8, got {k}"),
                        );
                    }
                }
            }
        }
        CommandParams::AuditStability(p) => {
            c.surface("params.surface", &p.surface);
            c.positive("params.eig_tol", p.eig_tol);
            if !(p.tolerance >= 0.0) {
                c.fail("params.tolerance", "must be >= 0");
            }
            match p.region {
                RegionConfig::Disk { radius } => c.positive("params.region.disk.radius", radius),
                RegionConfig::HeightBelow { z } => c.finite("params.region.height_below.z", z),
                RegionConfig::Interior => {}
            }
        }
        CommandParams::AuditArea(p) => {
            c.surface("params.surface", &p.surface);
            c.positive("params.rho", p.rho);
            if let Some(g) = p.gamma {
                c.finite("params.gamma", g);
            }
        }
        CommandParams::AuditMonotonicity(p) => {
            c.surface("params.surface", &p.surface);
            if p.radii.is_empty() {
                c.fail("params.radii", "must not be empty");
            }
            if p.radii.iter().any(|&r| !(r > 0.0)) || p.radii.windows(2).any(|w| !(w[1] > w[0])) {
                c.fail("params.radii", "must be positive and strictly increasing");
            }
            if let Some(e) = p.epsilon {
                c.positive("params.epsilon", e);
            }
        }
        CommandParams::AuditCurvatureRatio(p) => c.surface("params.surface", &p.surface),
        CommandParams::AuditConvexity(p) => {
            c.surface("params.surface", &p.surface);
            if let Some(t) = p.tol {
                if !(t >= 0.0) {
                    c.fail("params.tol", "must be >= 0");
                }
            }
        }
        CommandParams::Blowup(p) => {
            c.surface("params.surface", &p.surface);
            if p.scales.is_empty() || p.scales.iter().any(|&s| !(s > 0.0)) || p.scales.windows(2).any(|w| w[1] < w[0]) {
                c.fail("params.scales", "must be positive and nondecreasing");
            }
            let n = match (&p.heights, &p.basepoints) {
                (Some(h), None) => h.len(),
                (None, Some(b)) => b.len(),
                _ => {
                    c.fail("params", "give exactly one of heights and basepoints");
                    p.scales.len()
                }
            };
            if n != p.scales.len() {
                c.fail("params.scales", "needs one entry per basepoint");
            }
        }
        CommandParams::Export(p) => {
            c.surface("params.surface", &p.surface);
            if let Some(f) = &p.formats {
                if f.is_empty() {
                    c.fail("params.formats", "must not be empty");
                }
                if f.contains(&Format::Obj) && !matches!(p.surface, SurfaceSource::Graph(_)) {
                    c.fail("params.formats", "OBJ export needs a graph surface");
                }
            }
        }
    }
}

impl PotentialConfig {
    /// Core potential; missing parameters read as zero.
    pub fn to_spec(&self) -> PotentialSpec<f64> {
        let z = |v: Option<f64>| v.unwrap_or(0.0);
        let mut spec = match self.family {
            FamilyName::Constant => PotentialSpec::constant(z(self.c0)),
            FamilyName::Linear => PotentialSpec::linear(z(self.slope)),
            FamilyName::Quadratic => PotentialSpec::quadratic(z(self.lambda), z(self.beta)),
            FamilyName::LogPower => PotentialSpec::log_power(z(self.a)),
            FamilyName::Series => PotentialSpec::series(
                z(self.lambda),
                z(self.beta),
                self.coefficients.clone().unwrap_or_default(),
                z(self.u0),
            ),
        };
        if let Some(a) = self.alpha {
            spec = spec.with_alpha(a);
        }
        if let Some(o) = self.offset {
            spec = spec.with_offset(o);
        }
        if let Some(l) = &self.label {
            spec = spec.with_label(l.clone());
        }
        spec
    }
}

impl StartConfig {
    pub fn to_start(&self) -> Start<f64> {
        match *self {
            StartConfig::Axis { z0 } => Start::AxisRegular { z0 },
            StartConfig::Point { x0, z0, theta0 } => Start::Point { x0, z0, theta0 },
        }
    }
}

impl ProfileParams {
    pub fn to_shooting(&self) -> ShootingConfig<f64> {
        let mut c = ShootingConfig::new(self.start.to_start(), self.s_max, self.step).with_s_min(self.s_min);
        c.integrator_order = self.integrator_order;
        c
    }
}

impl NewtonParams {
    pub fn to_newton(&self) -> NewtonConfig<f64> {
        let guess = match self.initial_guess {
            GuessConfig::Harmonic => InitialGuess::Harmonic,
            GuessConfig::Zero => InitialGuess::Zero,
            GuessConfig::Paraboloid { a } => InitialGuess::Paraboloid { a },
        };
        let mut c = NewtonConfig::new(self.tol, guess);
        c.max_iters = self.max_iters;
        c.damping = self.damping;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(Command::from_cli_name(&c.cli_name()), Some(c));
        }
        assert_eq!(Command::SolveRotational.cli_name(), "solve-rotational");
    }
}
