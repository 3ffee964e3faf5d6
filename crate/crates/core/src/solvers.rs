//! Construction of `phi`-minimal surfaces.
//!
//! Profiles are integrated with the classical fourth-order Runge-Kutta
//! scheme in arclength. Graphs over rectangles are found by damped Newton
//! iteration on the second-order finite-difference discretization of
//! `div(grad u / W) = phi'(u) / W`, `W = sqrt(1 + |grad u|^2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::potential::PotentialSpec;
use crate::scalar::{sq, Real};
use crate::surface::{
    phi_minimal_residual, sample_geometry, GraphPatch, ProfileCurve, ProfileKind, ProfileSample, Rect, Surface,
};

/// Initial condition of a profile integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Start<T> {
    /// Leave the axis horizontally at height `z0` (surfaces of revolution only).
    AxisRegular { z0: T },
    /// Start at `(x0, z0)` with tangent angle `theta0`.
    Point { x0: T, z0: T, theta0: T },
}

/// Parameters of a profile integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig<T> {
    pub start: Start<T>,
    /// Arclength reached in the forward direction.
    pub s_max: T,
    /// Arclength reached in the backward direction (`<= 0`; must be 0 for axis starts).
    #[serde(default)]
    pub s_min: T,
    pub step: T,
    /// Order of the integrator; only 4 is available.
    #[serde(default = "four")]
    pub integrator_order: u32,
}

fn four() -> u32 {
    4
}

impl<T: Real> ShootingConfig<T> {
    pub fn new(start: Start<T>, s_max: T, step: T) -> Self {
        Self {
            start,
            s_max,
            s_min: T::zero(),
            step,
            integrator_order: 4,
        }
    }

    pub fn with_s_min(mut self, s_min: T) -> Self {
        self.s_min = s_min;
        self
    }

    fn validate(&self, kind: ProfileKind) -> Result<()> {
        if self.integrator_order != 4 {
            return Err(Error::InvalidInput(format!(
                "integrator order {} is not available, use 4",
                self.integrator_order
            )));
        }
        if !(self.step > T::zero()) {
            return Err(Error::InvalidInput("step must be positive".into()));
        }
        if !(self.s_max > self.step) {
            return Err(Error::InvalidInput("s_max must exceed the step".into()));
        }
        if self.s_min > T::zero() || !self.s_min.is_finite() {
            return Err(Error::InvalidInput("s_min must be finite and not positive".into()));
        }
        if let Start::AxisRegular { .. } = self.start {
            if kind != ProfileKind::Rotational {
                return Err(Error::InvalidInput("axis starts need a surface of revolution".into()));
            }
            if self.s_min < T::zero() {
                return Err(Error::InvalidInput("axis starts integrate forward only".into()));
            }
        }
        Ok(())
    }
}

/// Initial guess of the Newton iteration for graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialGuess<T> {
    /// Interior heights zero.
    Zero,
    /// Interior heights `a (x^2 + y^2) + b`, with `b` matching the boundary mean.
    Paraboloid { a: T },
    /// Full grid of heights; boundary entries are overwritten by the boundary data.
    Supplied(Vec<T>),
    /// Discrete harmonic extension of the boundary data.
    Harmonic,
}

/// Parameters of the Newton iteration for graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig<T> {
    /// Tolerance on the max-norm of the discrete residual.
    pub tol_residual: T,
    pub max_iters: usize,
    /// Initial step length of the backtracking line search, in `(0, 1]`.
    pub damping: T,
    pub initial_guess: InitialGuess<T>,
}

impl<T: Real> NewtonConfig<T> {
    pub fn new(tol_residual: T, initial_guess: InitialGuess<T>) -> Self {
        Self {
            tol_residual,
            max_iters: 50,
            damping: T::one(),
            initial_guess,
        }
    }
}

/// Outcome of a solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult<T> {
    pub surface: Surface<T>,
    /// Max of `|H + phi' eta|` over interior samples.
    pub residual: T,
    /// Newton iterations or integration steps.
    pub iterations: usize,
    pub converged: bool,
    /// Profiles: `residual / step^2`. Graphs: `None`.
    pub error_constant: Option<T>,
    pub diagnostics: String,
}

type State<T> = [T; 3];

fn axis_tiny<T: Real>() -> T {
    T::lit(1e-12)
}

/// Right-hand side of `(x, z, theta)' ` for the given profile symmetry.
fn profile_rhs<T: Real>(spec: &PotentialSpec<T>, kind: ProfileKind, s: T, y: State<T>) -> Result<State<T>> {
    let [x, z, th] = y;
    if !(z > spec.alpha) {
        return Err(Error::DomainExit {
            s: s.to_f64_lossy(),
            z: z.to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }
    let d1 = spec.d1(z)?;
    let (sn, cs) = th.sin_cos();
    let dth = match kind {
        ProfileKind::TranslationInvariant => d1 * cs,
        ProfileKind::Rotational => {
            if x <= axis_tiny() {
                if sn.abs() <= T::lit(1e-9) && x >= -axis_tiny::<T>() {
                    // Limit of sin(theta)/x at a horizontal axis crossing.
                    d1 * cs * T::lit(0.5)
                } else {
                    return Err(Error::AxisCollision { s: s.to_f64_lossy() });
                }
            } else {
                d1 * cs - sn / x
            }
        }
    };
    Ok([cs, sn, dth])
}

fn rk4_step<T: Real>(spec: &PotentialSpec<T>, kind: ProfileKind, s: T, y: State<T>, h: T) -> Result<State<T>> {
    let half = T::lit(0.5);
    let axpy = |y: State<T>, k: State<T>, c: T| [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2]];
    let k1 = profile_rhs(spec, kind, s, y)?;
    let k2 = profile_rhs(spec, kind, s + half * h, axpy(y, k1, half * h))?;
    let k3 = profile_rhs(spec, kind, s + half * h, axpy(y, k2, half * h))?;
    let k4 = profile_rhs(spec, kind, s + h, axpy(y, k3, h))?;
    let c = h / T::lit(6.0);
    Ok([
        y[0] + c * (k1[0] + T::lit(2.0) * (k2[0] + k3[0]) + k4[0]),
        y[1] + c * (k1[1] + T::lit(2.0) * (k2[1] + k3[1]) + k4[1]),
        y[2] + c * (k1[2] + T::lit(2.0) * (k2[2] + k3[2]) + k4[2]),
    ])
}

fn integrate<T: Real>(
    spec: &PotentialSpec<T>,
    kind: ProfileKind,
    y0: State<T>,
    h: T,
    steps: usize,
) -> Result<Vec<State<T>>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0);
    let mut y = y0;
    for i in 0..steps {
        let s = h * T::from_usize_lossy(i);
        y = rk4_step(spec, kind, s, y, h)?;
        if kind == ProfileKind::Rotational && y[0] < T::zero() {
            return Err(Error::AxisCollision {
                s: (s + h).to_f64_lossy(),
            });
        }
        out.push(y);
    }
    Ok(out)
}

fn step_count<T: Real>(length: T, step: T) -> usize {
    let r = (length / step).round();
    r.to_usize().unwrap_or(0)
}

fn solve_profile<T: Real>(
    spec: &PotentialSpec<T>,
    cfg: &ShootingConfig<T>,
    kind: ProfileKind,
) -> Result<SolveResult<T>> {
    spec.validate()?;
    cfg.validate(kind)?;
    let y0 = match cfg.start {
        Start::AxisRegular { z0 } => [T::zero(), z0, T::zero()],
        Start::Point { x0, z0, theta0 } => [x0, z0, theta0],
    };
    if !(y0[1] > spec.alpha) {
        return Err(Error::DomainExit {
            s: 0.0,
            z: y0[1].to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }
    if kind == ProfileKind::Rotational && y0[0] < T::zero() {
        return Err(Error::InvalidInput("rotational profiles need x0 >= 0".into()));
    }
    let h = cfg.step;
    let n_fwd = step_count(cfg.s_max, h);
    let n_bwd = step_count(-cfg.s_min, h);
    let fwd = integrate(spec, kind, y0, h, n_fwd)?;
    let bwd = if n_bwd > 0 {
        integrate(spec, kind, y0, -h, n_bwd)?
    } else {
        vec![y0]
    };
    let mut samples = Vec::with_capacity(n_fwd + n_bwd + 1);
    for (i, y) in bwd.iter().enumerate().skip(1).rev() {
        samples.push(ProfileSample {
            s: -h * T::from_usize_lossy(i),
            x: y[0],
            z: y[1],
            theta: y[2],
        });
    }
    for (i, y) in fwd.iter().enumerate() {
        samples.push(ProfileSample {
            s: h * T::from_usize_lossy(i),
            x: y[0],
            z: y[1],
            theta: y[2],
        });
    }
    let curve = ProfileCurve { samples, kind, step: h };
    let surface = Surface::Profile(curve);
    let field = sample_geometry(&surface, spec)?;
    let res = phi_minimal_residual(&field, spec)?;
    let residual = res.max_abs_residual;
    let converged = residual.is_finite();
    let c = residual / sq(h);
    Ok(SolveResult {
        surface,
        residual,
        iterations: n_fwd + n_bwd,
        converged,
        error_constant: Some(c),
        diagnostics: format!(
            "rk4, {} steps of {}, max |H + phi' eta| = {:e} = {:e} step^2",
            n_fwd + n_bwd,
            h,
            residual.to_f64_lossy(),
            c.to_f64_lossy()
        ),
    })
}

/// Integrates the profile of a surface of revolution:
/// `x' = cos theta`, `z' = sin theta`, `theta' = phi'(z) cos theta - sin theta / x`.
///
/// At an axis start the term `sin theta / x` is replaced by its limit
/// `theta'(0) = phi'(z0) / 2`.
pub fn solve_rotational_profile<T: Real>(spec: &PotentialSpec<T>, cfg: &ShootingConfig<T>) -> Result<SolveResult<T>> {
    solve_profile(spec, cfg, ProfileKind::Rotational)
}

/// Integrates the profile of a surface invariant along `e2`:
/// `x' = cos theta`, `z' = sin theta`, `theta' = phi'(z) cos theta`.
pub fn solve_translation_profile<T: Real>(spec: &PotentialSpec<T>, cfg: &ShootingConfig<T>) -> Result<SolveResult<T>> {
    solve_profile(spec, cfg, ProfileKind::TranslationInvariant)
}

/// Height of a profile at abscissa `x` by cubic Hermite interpolation,
/// using `dz/dx = tan theta`. The profile must be a graph over `x` between
/// consecutive samples; returns `None` outside the sampled range.
pub fn profile_height_at<T: Real>(curve: &ProfileCurve<T>, x: T) -> Option<T> {
    let s = &curve.samples;
    if s.len() < 2 {
        return None;
    }
    let increasing = s[s.len() - 1].x >= s[0].x;
    let key = |p: &ProfileSample<T>| if increasing { p.x } else { -p.x };
    let xv = if increasing { x } else { -x };
    let hi = s.partition_point(|p| key(p) < xv);
    if hi == 0 {
        return (key(&s[0]) == xv).then_some(s[0].z);
    }
    if hi >= s.len() {
        return None;
    }
    let (a, b) = (&s[hi - 1], &s[hi]);
    let dx = b.x - a.x;
    if dx == T::zero() {
        return Some(a.z);
    }
    let t = (x - a.x) / dx;
    let (t2, t3) = (t * t, t * t * t);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let h00 = two * t3 - three * t2 + T::one();
    let h10 = t3 - two * t2 + t;
    let h01 = -two * t3 + three * t2;
    let h11 = t3 - t2;
    Some(h00 * a.z + h10 * dx * a.theta.tan() + h01 * b.z + h11 * dx * b.theta.tan())
}

/// Discrete operator data at one interior node.
struct NodeTerms<T> {
    /// `H + phi' eta = L / W^3 - phi' / W`.
    residual: T,
    /// `W^3` times the residual, `L - phi' W^2`, the function Newton drives to zero.
    newton: T,
    /// Derivatives of `newton` with respect to `u` at `(di, dj)` offsets, in
    /// the order C, E, W, N, S, NE, NW, SE, SW.
    jac: [T; 9],
}

const OFFSETS: [(isize, isize); 9] = [
    (0, 0),
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (-1, 1),
    (1, -1),
    (-1, -1),
];

fn node_terms<T: Real>(
    spec: &PotentialSpec<T>,
    g: &GraphPatch<T>,
    i: usize,
    j: usize,
    with_jac: bool,
) -> Result<NodeTerms<T>> {
    let h = g.h;
    let two = T::lit(2.0);
    let u = |di: isize, dj: isize| g.at((i as isize + di) as usize, (j as isize + dj) as usize);
    let c = u(0, 0);
    let p = (u(1, 0) - u(-1, 0)) / (two * h);
    let q = (u(0, 1) - u(0, -1)) / (two * h);
    let r = (u(1, 0) - two * c + u(-1, 0)) / sq(h);
    let t = (u(0, 1) - two * c + u(0, -1)) / sq(h);
    let s = (u(1, 1) - u(-1, 1) - u(1, -1) + u(-1, -1)) / (T::lit(4.0) * sq(h));
    let w2 = T::one() + sq(p) + sq(q);
    let w = w2.sqrt();
    let w3 = w2 * w;
    let l = (T::one() + sq(q)) * r - two * p * q * s + (T::one() + sq(p)) * t;
    if !(c > spec.alpha) {
        return Err(Error::Domain {
            z: c.to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }
    let e = spec.eval(c)?;
    let residual = l / w3 - e.d1 / w;
    let newton = l - e.d1 * w2;
    let mut jac = [T::zero(); 9];
    if with_jac {
        let rp = two * (p * t - q * s - e.d1 * p);
        let rq = two * (q * r - p * s - e.d1 * q);
        let rr = T::one() + sq(q);
        let rt = T::one() + sq(p);
        let rs = -two * p * q;
        let h1 = (two * h).recip();
        let h2 = sq(h).recip();
        let h4 = (T::lit(4.0) * sq(h)).recip();
        jac[0] = -two * h2 * (rr + rt) - e.d2 * w2;
        jac[1] = rp * h1 + rr * h2;
        jac[2] = -rp * h1 + rr * h2;
        jac[3] = rq * h1 + rt * h2;
        jac[4] = -rq * h1 + rt * h2;
        jac[5] = rs * h4;
        jac[6] = -rs * h4;
        jac[7] = -rs * h4;
        jac[8] = rs * h4;
    }
    Ok(NodeTerms { residual, newton, jac })
}

/// Max-norm of the discrete residual and root-mean-square of the Newton function.
fn residual_norms<T: Real>(spec: &PotentialSpec<T>, g: &GraphPatch<T>) -> Result<(T, T)> {
    let mi = g.nx - 2;
    let mj = g.ny - 2;
    let vals: Result<Vec<(T, T)>> = (0..mi * mj)
        .into_par_iter()
        .map(|k| node_terms(spec, g, k % mi + 1, k / mi + 1, false).map(|t| (t.residual, t.newton)))
        .collect();
    let vals = vals?;
    let mut max = T::zero();
    let mut sum = T::zero();
    for (v, f) in &vals {
        max = if v.is_nan() { *v } else { max.max(v.abs()) };
        sum += sq(*f);
    }
    Ok((max, (sum / T::from_usize_lossy(vals.len())).sqrt()))
}

/// Replaces the interior heights by the solution of the five-point Laplace
/// equation with the current boundary values.
fn harmonic_fill<T: Real>(g: &mut GraphPatch<T>) -> Result<()> {
    let mi = g.nx - 2;
    let n = mi * (g.ny - 2);
    let mut a = BandMatrix::zeros(n, mi);
    let mut rhs = vec![T::zero(); n];
    for k in 0..n {
        let (i, j) = (k % mi + 1, k / mi + 1);
        a.add_to(k, k, T::lit(4.0));
        for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
            if g.is_boundary(ii, jj) {
                rhs[k] += g.at(ii, jj);
            } else {
                a.add_to(k, (ii - 1) + (jj - 1) * mi, -T::one());
            }
        }
    }
    let x = a.factor()?.solve(&rhs);
    for (k, v) in x.into_iter().enumerate() {
        let idx = g.idx(k % mi + 1, k / mi + 1);
        g.u[idx] = v;
    }
    Ok(())
}

fn in_domain<T: Real>(spec: &PotentialSpec<T>, g: &GraphPatch<T>) -> bool {
    g.u.iter().all(|&v| v > spec.alpha && v.is_finite())
}

/// Solves the `phi`-minimal graph equation on `domain` with Dirichlet data
/// `boundary(x, y)` by damped Newton iteration.
///
/// Newton acts on `W^3 (H + phi' eta) = L - phi' W^2`, where `L` is the
/// non-divergence minimal surface operator. Dividing by `W^3` would reward
/// steepening, so the undivided form is used for the step and its
/// root-mean-square for the line search. The Jacobian is assembled
/// analytically and factored as a band matrix. Each step is backtracked by
/// factors of 1/2 from `cfg.damping` down to `2^-10` until that merit
/// decreases sufficiently; convergence is judged on the max-norm of
/// `H + phi' eta`. A run that does not reach `cfg.tol_residual` returns the
/// last iterate with `converged = false`.
pub fn solve_graph<T: Real>(
    spec: &PotentialSpec<T>,
    domain: Rect<T>,
    h: T,
    boundary: impl Fn(T, T) -> T,
    cfg: &NewtonConfig<T>,
) -> Result<SolveResult<T>> {
    spec.validate()?;
    if !(cfg.tol_residual > T::zero()) {
        return Err(Error::InvalidInput("tol_residual must be positive".into()));
    }
    if !(cfg.damping > T::zero() && cfg.damping <= T::one()) {
        return Err(Error::InvalidInput("damping must lie in (0, 1]".into()));
    }
    let mut g = GraphPatch::from_fn(domain, h, |_, _| T::zero())?;
    if g.nx < 5 || g.ny < 5 {
        return Err(Error::Stencil(format!(
            "graph grid is {}x{}, at least 5x5 needed",
            g.nx, g.ny
        )));
    }
    let (nx, ny) = (g.nx, g.ny);
    let mut bsum = T::zero();
    let mut rsum = T::zero();
    let mut bcount = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            if g.is_boundary(i, j) {
                let (x, y) = (g.x(i), g.y(j));
                let v = boundary(x, y);
                let k = g.idx(i, j);
                g.u[k] = v;
                bsum += v;
                rsum += sq(x) + sq(y);
                bcount += 1;
            }
        }
    }
    let bmean = bsum / T::from_usize_lossy(bcount);
    let rmean = rsum / T::from_usize_lossy(bcount);
    match &cfg.initial_guess {
        InitialGuess::Zero => {}
        InitialGuess::Paraboloid { a } => {
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let k = g.idx(i, j);
                    g.u[k] = *a * (sq(g.x(i)) + sq(g.y(j)) - rmean) + bmean;
                }
            }
        }
        InitialGuess::Harmonic => harmonic_fill(&mut g)?,
        InitialGuess::Supplied(v) => {
            if v.len() != nx * ny {
                return Err(Error::InvalidInput(format!(
                    "supplied guess has {} entries, grid has {}",
                    v.len(),
                    nx * ny
                )));
            }
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let k = g.idx(i, j);
                    g.u[k] = v[k];
                }
            }
        }
    }
    if !in_domain(spec, &g) {
        return Err(Error::Domain {
            z: g.u.iter().fold(T::infinity(), |m, &v| m.min(v)).to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }

    let mi = nx - 2;
    let mj = ny - 2;
    let n = mi * mj;
    let bw = mi + 1;
    let (mut res, mut rms) = residual_norms(spec, &g)?;
    let mut iters = 0usize;
    let mut log = Vec::new();
    let floor = T::lit(2f64.powi(-10));
    let armijo = T::lit(1e-4);
    while res > cfg.tol_residual && iters < cfg.max_iters {
        let terms: Result<Vec<NodeTerms<T>>> = (0..n)
            .into_par_iter()
            .map(|k| node_terms(spec, &g, k % mi + 1, k / mi + 1, true))
            .collect();
        let terms = terms?;
        let mut jac = BandMatrix::zeros(n, bw);
        let mut rhs = Vec::with_capacity(n);
        for (k, t) in terms.iter().enumerate() {
            let (i, j) = (k % mi + 1, k / mi + 1);
            for (o, &(di, dj)) in OFFSETS.iter().enumerate() {
                let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                if g.is_boundary(ii, jj) {
                    continue;
                }
                let col = (ii - 1) + (jj - 1) * mi;
                jac.add_to(k, col, t.jac[o]);
            }
            rhs.push(-t.newton);
        }
        let delta = jac.factor()?.solve(&rhs);
        let base = g.u.clone();
        let mut tau = cfg.damping;
        let mut accepted = None;
        loop {
            for (k, d) in delta.iter().enumerate() {
                let idx = g.idx(k % mi + 1, k / mi + 1);
                g.u[idx] = base[idx] + tau * *d;
            }
            if in_domain(spec, &g) {
                let (m, r) = residual_norms(spec, &g)?;
                if r <= (T::one() - armijo * tau) * rms || (tau <= floor && r.is_finite()) {
                    accepted = Some((m, r));
                    break;
                }
            }
            if tau <= floor {
                break;
            }
            tau *= T::lit(0.5);
        }
        iters += 1;
        match accepted {
            Some((m, r)) => {
                res = m;
                rms = r;
            }
            None => {
                g.u = base;
                return Err(Error::DomainExit {
                    s: iters as f64,
                    z: g.u.iter().fold(T::infinity(), |m, &v| m.min(v)).to_f64_lossy(),
                    alpha: spec.alpha.to_f64_lossy(),
                });
            }
        }
        log.push(format!(
            "iter {iters}: step {} max residual {:e}",
            tau,
            res.to_f64_lossy()
        ));
    }
    let converged = res <= cfg.tol_residual;
    Ok(SolveResult {
        surface: Surface::Graph(g),
        residual: res,
        iterations: iters,
        converged,
        error_constant: None,
        diagnostics: if log.is_empty() {
            format!(
                "initial guess already within tolerance (residual {:e})",
                res.to_f64_lossy()
            )
        } else {
            log.join("; ")
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_start_uses_half_split() {
        let spec = PotentialSpec::<f64>::linear(1.0);
        let y = profile_rhs(&spec, ProfileKind::Rotational, 0.0, [0.0, 0.0, 0.0]).unwrap();
        assert_eq!(y[2], 0.5);
    }

    #[test]
    fn translation_rhs_at_start() {
        let spec = PotentialSpec::<f64>::quadratic(1.0, 1.0);
        let y = profile_rhs(&spec, ProfileKind::TranslationInvariant, 0.0, [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(y[2], 2.0);
    }

    #[test]
    fn axis_start_rejected_for_translation() {
        let spec = PotentialSpec::<f64>::linear(1.0);
        let cfg = ShootingConfig::new(Start::AxisRegular { z0: 0.0 }, 1.0, 0.01);
        assert!(matches!(
            solve_translation_profile(&spec, &cfg),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn domain_exit_is_reported() {
        let spec = PotentialSpec::<f64>::linear(1.0).with_alpha(-0.5);
        let cfg = ShootingConfig::new(
            Start::Point {
                x0: 0.0,
                z0: 0.0,
                theta0: -std::f64::consts::FRAC_PI_2,
            },
            2.0,
            0.01,
        );
        assert!(matches!(
            solve_translation_profile(&spec, &cfg),
            Err(Error::DomainExit { .. })
        ));
    }

    #[test]
    fn hermite_interpolation_is_exact_on_cubics_of_lines() {
        let samples = (0..11)
            .map(|i| {
                let x = i as f64 * 0.1;
                ProfileSample {
                    s: x,
                    x,
                    z: 2.0 * x,
                    theta: 2f64.atan(),
                }
            })
            .collect();
        let c = ProfileCurve {
            samples,
            kind: ProfileKind::TranslationInvariant,
            step: 0.1,
        };
        let z = profile_height_at(&c, 0.55).unwrap();
        assert!((z - 1.1).abs() < 1e-12);
        assert!(profile_height_at(&c, 1.5).is_none());
    }

    #[test]
    fn flat_boundary_gives_flat_minimal_graph() {
        let spec = PotentialSpec::<f64>::constant(0.0);
        let dom = Rect {
            x0: -1.0,
            x1: 1.0,
            y0: -1.0,
            y1: 1.0,
        };
        let cfg = NewtonConfig::new(1e-10, InitialGuess::Harmonic);
        let r = solve_graph(&spec, dom, 0.25, |_, _| 0.0, &cfg).unwrap();
        assert!(r.converged);
        let Surface::Graph(g) = r.surface else { panic!() };
        assert!(g.u.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let spec = PotentialSpec::<f64>::quadratic(1.0, 1.0);
        let dom = Rect {
            x0: -1.0,
            x1: 1.0,
            y0: -1.0,
            y1: 1.0,
        };
        let g = GraphPatch::from_fn(dom, 0.25, |x: f64, y: f64| {
            0.3 * x * x + 0.2 * x * y - 0.1 * y + 0.5 * (3.0 * x).sin()
        })
        .unwrap();
        let (i, j) = (3, 4);
        let t = node_terms(&spec, &g, i, j, true).unwrap();
        let eps = 1e-6;
        for (o, &(di, dj)) in OFFSETS.iter().enumerate() {
            let k = g.idx((i as isize + di) as usize, (j as isize + dj) as usize);
            let mut gp = g.clone();
            gp.u[k] += eps;
            let mut gm = g.clone();
            gm.u[k] -= eps;
            let rp = node_terms(&spec, &gp, i, j, false).unwrap().newton;
            let rm = node_terms(&spec, &gm, i, j, false).unwrap().newton;
            let fd = (rp - rm) / (2.0 * eps);
            assert!(
                (t.jac[o] - fd).abs() < 1e-5 * (1.0 + fd.abs()),
                "offset {o}: {} vs {fd}",
                t.jac[o]
            );
        }
    }
}
