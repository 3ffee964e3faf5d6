//! Discrete surfaces and their per-sample geometry.
//!
//! Two representations are supported: profile curves generating surfaces
//! of revolution or translation-invariant surfaces, and graphs `z = u(x, y)`
//! over a uniform grid.
//!
//! Sign convention used everywhere: `S(u, v) = <D_u N, v>` with `N` the
//! upward-type unit normal, `H = trace S`, so a surface is `phi`-minimal
//! when `H = -phi'(mu) eta`. Upward bowls have `H < 0`.

pub mod calculus;
mod frame;
mod identities;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Sym2;
use crate::potential::PotentialSpec;
use crate::scalar::{sq, Real};

pub use frame::{principal_frame, PrincipalData};
pub use identities::{
    curvature_evolution_residuals, fundamental_identity_residuals, item2_substituted_residual, AXIS_EXCLUSION,
};

use calculus::{d1, GraphCalculus, GridShape, ProfileCalculus};

/// Symmetry type of a profile curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// Surface of revolution about the `z`-axis; `x` is the distance to the axis.
    Rotational,
    /// Surface invariant under translations along `e2`; `x` is the abscissa.
    TranslationInvariant,
}

/// One point of a profile curve parametrized by arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample<T> {
    pub s: T,
    pub x: T,
    pub z: T,
    /// Angle of the unit tangent `(cos theta, sin theta)` in the `x`-`z` plane.
    pub theta: T,
}

/// Profile curve sampled at uniform arclength spacing `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve<T> {
    pub samples: Vec<ProfileSample<T>>,
    pub kind: ProfileKind,
    pub step: T,
}

impl<T: Real> ProfileCurve<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Keeps every `k`-th sample.
    pub fn decimate(&self, k: usize) -> Self {
        let k = k.max(1);
        Self {
            samples: self.samples.iter().step_by(k).copied().collect(),
            kind: self.kind,
            step: self.step * T::from_usize_lossy(k),
        }
    }

    /// Keeps the samples with `s_lo <= s <= s_hi`.
    pub fn window(&self, s_lo: T, s_hi: T) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .filter(|p| p.s >= s_lo && p.s <= s_hi)
                .copied()
                .collect(),
            kind: self.kind,
            step: self.step,
        }
    }

    fn column(&self, f: impl Fn(&ProfileSample<T>) -> T) -> Vec<T> {
        self.samples.iter().map(f).collect()
    }

    /// Largest violation of `(x', z') = (cos theta, sin theta)` by central differences.
    pub fn tangent_defect(&self) -> T {
        let xs = self.column(|p| p.x);
        let zs = self.column(|p| p.z);
        let dx = d1(&xs, self.step);
        let dz = d1(&zs, self.step);
        let mut m = T::zero();
        for i in 1..self.len().saturating_sub(1) {
            let t = self.samples[i].theta;
            m = m.max((dx[i] - t.cos()).abs()).max((dz[i] - t.sin()).abs());
        }
        m
    }
}

/// Rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

/// Heights `u(x, y)` on a uniform grid with Dirichlet boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPatch<T> {
    pub domain: Rect<T>,
    pub h: T,
    pub nx: usize,
    pub ny: usize,
    /// Row-major heights, index `j * nx + i`.
    pub u: Vec<T>,
}

impl<T: Real> GraphPatch<T> {
    /// Number of grid intervals of length `h` on `[a, b]`, if `h` divides it.
    pub fn intervals(a: T, b: T, h: T) -> Result<usize> {
        if !(h > T::zero()) || !(b > a) {
            return Err(Error::InvalidInput("grid needs h > 0 and a nonempty interval".into()));
        }
        let m = ((b - a) / h).round();
        let rel = ((b - a) / h - m).abs();
        if rel > T::lit(1e-6) || m < T::one() {
            return Err(Error::InvalidInput(format!(
                "h = {} does not divide the side length {}",
                h,
                b - a
            )));
        }
        Ok(m.to_usize().unwrap_or(0))
    }

    /// Samples `f` on the grid of spacing `h` over `domain`.
    pub fn from_fn(domain: Rect<T>, h: T, f: impl Fn(T, T) -> T) -> Result<Self> {
        let mx = Self::intervals(domain.x0, domain.x1, h)?;
        let my = Self::intervals(domain.y0, domain.y1, h)?;
        let (nx, ny) = (mx + 1, my + 1);
        let mut u = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                u.push(f(
                    domain.x0 + h * T::from_usize_lossy(i),
                    domain.y0 + h * T::from_usize_lossy(j),
                ));
            }
        }
        Ok(Self { domain, h, nx, ny, u })
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.domain.x0 + self.h * T::from_usize_lossy(i)
    }

    #[inline]
    pub fn y(&self, j: usize) -> T {
        self.domain.y0 + self.h * T::from_usize_lossy(j)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.u[self.idx(i, j)]
    }

    pub fn shape(&self) -> GridShape<T> {
        GridShape {
            nx: self.nx,
            ny: self.ny,
            h: self.h,
        }
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }
}

/// A discrete surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Surface<T> {
    Profile(ProfileCurve<T>),
    Graph(GraphPatch<T>),
}

impl<T: Real> Surface<T> {
    pub fn len(&self) -> usize {
        match self {
            Surface::Profile(p) => p.len(),
            Surface::Graph(g) => g.u.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Characteristic sample spacing.
    pub fn spacing(&self) -> T {
        match self {
            Surface::Profile(p) => p.step,
            Surface::Graph(g) => g.h,
        }
    }
}

/// Per-sample geometry of a discrete surface.
///
/// Tangent quantities are expressed in the orthonormal frame `frame[i]`.
/// For profiles the frame is `(e_s, e_t)`: unit tangent of the profile and
/// unit vector along the symmetry orbit. For graphs it is `d/dx` normalized
/// followed by Gram-Schmidt of `d/dy`. Profile samples sit in the
/// half-plane `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryField<T> {
    pub source: Surface<T>,
    pub position: Vec<[T; 3]>,
    pub mu: Vec<T>,
    pub eta: Vec<T>,
    pub grad_mu: Vec<[T; 2]>,
    pub frame: Vec<[[T; 3]; 2]>,
    pub normal: Vec<[T; 3]>,
    pub shape: Vec<Sym2<T>>,
    pub mean: Vec<T>,
    pub gauss: Vec<T>,
    pub k1: Vec<T>,
    pub k2: Vec<T>,
    /// Area element per sample: `2 pi x ds` on surfaces of revolution,
    /// `ds` per unit ruling length on translation-invariant surfaces and
    /// `W h^2` (trapezoid-weighted) on graphs.
    pub area_weight: Vec<T>,
    pub principal: Option<PrincipalData<T>>,
    pub(crate) graph: Option<GraphCalculus<T>>,
    pub(crate) profile: Option<ProfileCalculus<T>>,
}

/// Norms of a residual field over interior samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport<T> {
    pub identity_name: String,
    pub max_abs_residual: T,
    /// Root mean square over the samples that entered the norm.
    pub l2_residual: T,
    pub grid_h: T,
    /// Samples excluded at each end or boundary ring.
    pub interior_margin: usize,
    /// Number of samples that entered the norm.
    pub samples: usize,
}

impl<T: Real> ResidualReport<T> {
    /// Builds a report from pointwise residuals; `None` entries are skipped.
    pub fn from_values(name: impl Into<String>, values: &[Option<T>], grid_h: T, margin: usize) -> Self {
        let mut max = T::zero();
        let mut sum = T::zero();
        let mut count = 0usize;
        for v in values.iter().flatten() {
            let a = v.abs();
            max = if a.is_nan() { a } else { max.max(a) };
            sum += a * a;
            count += 1;
        }
        let l2 = if count > 0 {
            (sum / T::from_usize_lossy(count)).sqrt()
        } else {
            T::zero()
        };
        Self {
            identity_name: name.into(),
            max_abs_residual: max,
            l2_residual: l2,
            grid_h,
            interior_margin: margin,
            samples: count,
        }
    }
}

/// Scalar field with the number of boundary samples where it is unreliable.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    pub values: Vec<T>,
    pub margin: usize,
}

impl<T: Real> GeometryField<T> {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.source.spacing()
    }

    /// Whether sample `k` lies at least `margin` samples from the boundary.
    pub fn is_interior(&self, k: usize, margin: usize) -> bool {
        match &self.source {
            Surface::Profile(p) => k >= margin && k + margin < p.len(),
            Surface::Graph(g) => g.shape().interior(k % g.nx, k / g.nx, margin),
        }
    }

    /// `|S|^2` at every sample.
    pub fn shape_norm_sq(&self) -> Vec<T> {
        self.shape.iter().map(|s| s.norm_sq()).collect()
    }

    /// Ambient vector of a tangent vector given in the sample frame.
    pub fn ambient(&self, k: usize, v: [T; 2]) -> [T; 3] {
        let f = &self.frame[k];
        [
            f[0][0] * v[0] + f[1][0] * v[1],
            f[0][1] * v[0] + f[1][1] * v[1],
            f[0][2] * v[0] + f[1][2] * v[1],
        ]
    }

    pub fn is_profile(&self) -> bool {
        matches!(self.source, Surface::Profile(_))
    }

    pub(crate) fn profile_calc(&self) -> Option<&ProfileCalculus<T>> {
        self.profile.as_ref()
    }

    pub(crate) fn graph_calc(&self) -> Option<&GraphCalculus<T>> {
        self.graph.as_ref()
    }

    /// Mask of samples at least `margin` away from the boundary.
    pub fn interior_mask(&self, margin: usize) -> Vec<bool> {
        (0..self.len()).map(|k| self.is_interior(k, margin)).collect()
    }
}

/// Computes the geometry of a discrete surface.
///
/// Profiles use finite differences of `theta` for the profile curvature
/// `-theta'`, the exact parallel curvature `-sin(theta)/x` on surfaces of
/// revolution and zero on translation-invariant surfaces. Graphs use
/// second-order differences of `u`.
pub fn sample_geometry<T: Real>(surface: &Surface<T>, spec: &PotentialSpec<T>) -> Result<GeometryField<T>> {
    spec.validate()?;
    let field = match surface {
        Surface::Profile(p) => profile_geometry(p)?,
        Surface::Graph(g) => graph_geometry(g)?,
    };
    if let Some(&z) = field.mu.iter().find(|&&z| !(z > spec.alpha)) {
        return Err(Error::Domain {
            z: z.to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }
    Ok(field)
}

fn profile_geometry<T: Real>(p: &ProfileCurve<T>) -> Result<GeometryField<T>> {
    let n = p.len();
    if n < 5 {
        return Err(Error::Stencil(format!("profile has {n} samples, at least 5 needed")));
    }
    if !(p.step > T::zero()) {
        return Err(Error::InvalidInput("profile step must be positive".into()));
    }
    let rotational = p.kind == ProfileKind::Rotational;
    let tiny = T::lit(1e-12);
    let mut axis = vec![false; n];
    if rotational {
        for (k, q) in p.samples.iter().enumerate() {
            if q.x < T::zero() {
                return Err(Error::AxisSingularity { index: k });
            }
            if q.x <= tiny {
                let end = k == 0 || k + 1 == n;
                if !end || q.theta.sin().abs() > T::lit(1e-9) {
                    return Err(Error::AxisSingularity { index: k });
                }
                axis[k] = true;
            }
        }
    }
    let theta: Vec<T> = p.samples.iter().map(|q| q.theta).collect();
    let dtheta = d1(&theta, p.step);
    let mut field = GeometryField {
        source: Surface::Profile(p.clone()),
        position: Vec::with_capacity(n),
        mu: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        grad_mu: Vec::with_capacity(n),
        frame: Vec::with_capacity(n),
        normal: Vec::with_capacity(n),
        shape: Vec::with_capacity(n),
        mean: Vec::with_capacity(n),
        gauss: Vec::with_capacity(n),
        k1: Vec::with_capacity(n),
        k2: Vec::with_capacity(n),
        area_weight: Vec::with_capacity(n),
        principal: None,
        graph: None,
        profile: None,
    };
    let mut warp = Vec::with_capacity(n);
    let two_pi = T::lit(2.0) * T::PI();
    for (k, q) in p.samples.iter().enumerate() {
        let (sn, cs) = q.theta.sin_cos();
        let ks = -dtheta[k];
        let kt = if !rotational {
            T::zero()
        } else if axis[k] {
            ks
        } else {
            -sn / q.x
        };
        warp.push(if rotational && !axis[k] { cs / q.x } else { T::zero() });
        let shape = Sym2::diag(ks, kt);
        field.position.push([q.x, T::zero(), q.z]);
        field.mu.push(q.z);
        field.eta.push(cs);
        field.grad_mu.push([sn, T::zero()]);
        field
            .frame
            .push([[cs, T::zero(), sn], [T::zero(), T::one(), T::zero()]]);
        field.normal.push([-sn, T::zero(), cs]);
        field.shape.push(shape);
        field.mean.push(ks + kt);
        field.gauss.push(ks * kt);
        field.k1.push(ks.min(kt));
        field.k2.push(ks.max(kt));
        let ds = if k == 0 || k + 1 == n {
            p.step * T::lit(0.5)
        } else {
            p.step
        };
        field.area_weight.push(if rotational { two_pi * q.x * ds } else { ds });
    }
    field.profile = Some(ProfileCalculus {
        h: p.step,
        a: warp,
        rotational,
        x: p.samples.iter().map(|q| q.x).collect(),
    });
    Ok(field)
}

fn graph_geometry<T: Real>(g: &GraphPatch<T>) -> Result<GeometryField<T>> {
    if g.nx < 5 || g.ny < 5 {
        return Err(Error::Stencil(format!(
            "graph grid is {}x{}, at least 5x5 needed",
            g.nx, g.ny
        )));
    }
    if g.u.len() != g.nx * g.ny {
        return Err(Error::InvalidInput("height grid has the wrong length".into()));
    }
    if let Some(k) = g.u.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("height at node {k} is not finite")));
    }
    let calc = GraphCalculus::new(g.shape(), &g.u);
    let n = g.u.len();
    let mut field = GeometryField {
        source: Surface::Graph(g.clone()),
        position: Vec::with_capacity(n),
        mu: g.u.clone(),
        eta: Vec::with_capacity(n),
        grad_mu: Vec::with_capacity(n),
        frame: Vec::with_capacity(n),
        normal: Vec::with_capacity(n),
        shape: Vec::with_capacity(n),
        mean: Vec::with_capacity(n),
        gauss: Vec::with_capacity(n),
        k1: Vec::with_capacity(n),
        k2: Vec::with_capacity(n),
        area_weight: Vec::with_capacity(n),
        principal: None,
        graph: None,
        profile: None,
    };
    let half = T::lit(0.5);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            let (p, q) = (calc.u.fx[k], calc.u.fy[k]);
            let w = calc.w2[k].sqrt();
            let e = calc.frame(k);
            let hc = calc.second_form(k);
            let sf = calc.to_frame(k, hc);
            let shape = Sym2::new(sf[0], sf[1], sf[2]);
            let (ev, _) = shape.eigen();
            field.position.push([g.x(i), g.y(j), g.u[k]]);
            field.eta.push(w.recip());
            field.normal.push([-p / w, -q / w, w.recip()]);
            field.frame.push([calc.push(k, e[0]), calc.push(k, e[1])]);
            field
                .grad_mu
                .push([e[0][0] * p + e[0][1] * q, e[1][0] * p + e[1][1] * q]);
            field.mean.push(shape.trace());
            field.gauss.push(shape.det());
            field.k1.push(ev[0]);
            field.k2.push(ev[1]);
            field.shape.push(shape);
            let mut wt = w * sq(g.h);
            if i == 0 || i + 1 == g.nx {
                wt *= half;
            }
            if j == 0 || j + 1 == g.ny {
                wt *= half;
            }
            field.area_weight.push(wt);
        }
    }
    field.graph = Some(calc);
    Ok(field)
}

/// Residual of `H + phi'(mu) eta = 0` over interior samples (margin 2).
pub fn phi_minimal_residual<T: Real>(field: &GeometryField<T>, spec: &PotentialSpec<T>) -> Result<ResidualReport<T>> {
    let margin = 2;
    let mut vals = Vec::with_capacity(field.len());
    for k in 0..field.len() {
        if field.is_interior(k, margin) {
            let d1 = spec.d1(field.mu[k])?;
            vals.push(Some(field.mean[k] + d1 * field.eta[k]));
        } else {
            vals.push(None);
        }
    }
    Ok(ResidualReport::from_values(
        "phi-minimality H + phi'(mu) eta",
        &vals,
        field.spacing(),
        margin,
    ))
}

/// `Delta f + <grad psi, grad f>` at every sample.
///
/// For profiles both fields are functions of arclength. The returned
/// margin is the number of boundary samples computed with nested one-sided
/// stencils.
pub fn drift_laplacian<T: Real>(field: &GeometryField<T>, f: &[T], psi: &[T]) -> Result<SampledField<T>> {
    let n = field.len();
    if f.len() != n || psi.len() != n {
        return Err(Error::InvalidInput("field length mismatch".into()));
    }
    if let Some(pc) = field.profile_calc() {
        let f1 = pc.d(f);
        let lap = pc.laplacian(f);
        let p1 = pc.d(psi);
        let values = (0..n).map(|k| lap[k] + p1[k] * f1[k]).collect();
        return Ok(SampledField { values, margin: 1 });
    }
    let gc = field
        .graph_calc()
        .ok_or_else(|| Error::UnsupportedCombination("field has no calculus".into()))?;
    let fp = calculus::Partials::of(&gc.shape, f);
    let pp = gc.shape.dx(psi);
    let pq = gc.shape.dy(psi);
    let values = (0..n)
        .map(|k| {
            let hs = gc.hessian_at(k, &fp);
            let lap = gc.trace(k, hs);
            let gf = gc.raise(k, [fp.fx[k], fp.fy[k]]);
            lap + gf[0] * pp[k] + gf[1] * pq[k]
        })
        .collect();
    Ok(SampledField { values, margin: 2 })
}

/// `phi(mu)` at every sample, the weight exponent of the drift Laplacian.
pub fn phi_of_height<T: Real>(field: &GeometryField<T>, spec: &PotentialSpec<T>) -> Result<Vec<T>> {
    field.mu.iter().map(|&z| spec.eval(z).map(|e| e.phi)).collect()
}

/// `|grad f|^2` at every sample.
pub fn gradient_norm_sq<T: Real>(field: &GeometryField<T>, f: &[T]) -> Result<Vec<T>> {
    if f.len() != field.len() {
        return Err(Error::InvalidInput("field length mismatch".into()));
    }
    if let Some(pc) = field.profile_calc() {
        return Ok(pc.d(f).into_iter().map(sq).collect());
    }
    let gc = field
        .graph_calc()
        .ok_or_else(|| Error::UnsupportedCombination("field has no calculus".into()))?;
    let fx = gc.shape.dx(f);
    let fy = gc.shape.dy(f);
    Ok((0..f.len()).map(|k| gc.covector_norm_sq(k, [fx[k], fy[k]])).collect())
}
