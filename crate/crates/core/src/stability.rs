//! Weighted stability operator `L_phi = Delta^phi + |S|^2 - phi'' eta^2`.
//!
//! The quadratic form
//! `Q_phi(u, u) = int e^phi (|grad u|^2 - (|S|^2 - phi'' eta^2) u^2)`
//! is discretized with piecewise-linear elements and lumped mass:
//!
//! * graphs: each grid cell is split along the diagonal `(i, j)-(i+1, j+1)`
//!   into two triangles of the lifted surface; edge weights are the
//!   cotangent weights times `e^phi` at the triangle centroid height, and
//!   the mass of a node is `e^phi(mu)` times a third of the adjacent area;
//! * profiles: one-dimensional elements in arclength with density
//!   `c = 2 pi x e^phi` (revolution) or `c = e^phi` (per unit ruling).
//!
//! Test functions vanish outside a region of interior samples, which
//! realizes Dirichlet conditions. `lambda1` is the smallest eigenvalue of
//! `-L_phi` in the weighted inner product; stability means `lambda1 >= 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::potential::PotentialSpec;
use crate::scalar::{sq, Real};
use crate::surface::{
    drift_laplacian, gradient_norm_sq, phi_of_height, GeometryField, ProfileKind, ResidualReport, Surface,
};

/// Discrete form of `Q_phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityAssembly<T> {
    /// `e^phi(mu)` per sample.
    pub weights: Vec<T>,
    /// Stiffness edges `(a, b, w)` with `a < b`: the Dirichlet energy is
    /// `sum w (u_a - u_b)^2`.
    pub edges: Vec<(usize, usize, T)>,
    /// `(|S|^2 - phi'' eta^2) * mass` per sample.
    pub potential_term: Vec<T>,
    /// Lumped `e^phi` area per sample.
    pub mass: Vec<T>,
    /// Sorted sample indices where test functions may be nonzero.
    pub region: Vec<usize>,
}

/// First eigenpair of `-L_phi` on a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult<T> {
    pub lambda1: T,
    /// Mass-normalized, nonnegative-sum eigenfunction; zero outside the region.
    pub eigenfunction: Vec<T>,
    pub iterations: usize,
    /// `|| (K - P) u - lambda1 M u ||_{M^-1}` for the normalized `u`.
    pub residual: T,
}

/// Function whose Jacobi-field residual is audited.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JacobiCertificate<T> {
    /// `nu = <V, N>` for a unit horizontal vector `V`.
    Killing([T; 3]),
    /// `w = log eta`, tested against
    /// `Delta w + <grad phi, grad w> = -|grad eta|^2 / eta^2 - |S|^2 - phi'' |grad mu|^2`.
    LogEta,
}

/// Whether sample `k` may carry a nonzero test function value.
fn admissible<T: Real>(field: &GeometryField<T>, k: usize) -> bool {
    match &field.source {
        Surface::Profile(p) => {
            let n = p.len();
            if k > 0 && k + 1 < n {
                return true;
            }
            p.kind == ProfileKind::Rotational && p.samples[k].x <= T::lit(1e-12)
        }
        Surface::Graph(g) => !g.is_boundary(k % g.nx, k / g.nx),
    }
}

/// Region of samples satisfying `pred(k, position)`, with boundary samples
/// removed. An axis sample of a surface of revolution is kept.
pub fn region_where<T: Real>(field: &GeometryField<T>, pred: impl Fn(usize, [T; 3]) -> bool) -> Vec<usize> {
    (0..field.len())
        .filter(|&k| admissible(field, k) && pred(k, field.position[k]))
        .collect()
}

fn check_region<T: Real>(field: &GeometryField<T>, region: &[usize]) -> Result<Vec<usize>> {
    if region.is_empty() {
        return Err(Error::InvalidInput("region is empty".into()));
    }
    let mut r = region.to_vec();
    r.sort_unstable();
    r.dedup();
    if let Some(&k) = r.iter().find(|&&k| k >= field.len() || !admissible(field, k)) {
        return Err(Error::InvalidInput(format!(
            "region sample {k} is outside the grid or on its boundary"
        )));
    }
    Ok(r)
}

/// Builds the discrete form of `Q_phi` on `region`.
pub fn assemble<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    region: &[usize],
) -> Result<StabilityAssembly<T>> {
    let region = check_region(field, region)?;
    let n = field.len();
    let phi = phi_of_height(field, spec)?;
    let weights: Vec<T> = phi.iter().map(|p| p.exp()).collect();
    let mut edges = Vec::new();
    let mut mass = vec![T::zero(); n];
    let third = T::lit(1.0 / 3.0);
    let half = T::lit(0.5);
    match &field.source {
        Surface::Profile(p) => {
            let ds = p.step;
            let two_pi = T::lit(2.0) * T::PI();
            let c: Vec<T> = (0..n)
                .map(|k| match p.kind {
                    ProfileKind::Rotational => two_pi * p.samples[k].x * weights[k],
                    ProfileKind::TranslationInvariant => weights[k],
                })
                .collect();
            let sixth = T::lit(1.0 / 6.0);
            for k in 0..n - 1 {
                edges.push((k, k + 1, half * (c[k] + c[k + 1]) / ds));
                mass[k] += ds * (T::lit(2.0) * c[k] + c[k + 1]) * sixth;
                mass[k + 1] += ds * (T::lit(2.0) * c[k + 1] + c[k]) * sixth;
            }
        }
        Surface::Graph(g) => {
            let nx = g.nx;
            let cells: Vec<[(usize, usize, T); 3]> = (0..(g.nx - 1) * (g.ny - 1))
                .into_par_iter()
                .flat_map_iter(|c| {
                    let (i, j) = (c % (nx - 1), c / (nx - 1));
                    let a = g.idx(i, j);
                    let b = g.idx(i + 1, j);
                    let cc = g.idx(i + 1, j + 1);
                    let d = g.idx(i, j + 1);
                    [[a, b, cc], [a, cc, d]]
                        .into_iter()
                        .map(|t| triangle_edges(field, spec, t))
                })
                .collect::<Result<Vec<_>>>()?;
            // Lumped masses, accumulated in a fixed cell order.
            for c in 0..(g.nx - 1) * (g.ny - 1) {
                let (i, j) = (c % (nx - 1), c / (nx - 1));
                let a = g.idx(i, j);
                let b = g.idx(i + 1, j);
                let cc = g.idx(i + 1, j + 1);
                let d = g.idx(i, j + 1);
                for t in [[a, b, cc], [a, cc, d]] {
                    let area = tri_area(field, t);
                    for &v in &t {
                        mass[v] += weights[v] * area * third;
                    }
                }
            }
            let mut map = std::collections::BTreeMap::new();
            for tri in cells {
                for (a, b, w) in tri {
                    let key = (a.min(b), a.max(b));
                    *map.entry(key).or_insert(T::zero()) += w;
                }
            }
            edges = map.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        }
    }
    let s2 = field.shape_norm_sq();
    let potential_term = (0..n)
        .map(|k| {
            let d2 = spec.eval(field.mu[k])?.d2;
            Ok((s2[k] - d2 * sq(field.eta[k])) * mass[k])
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(StabilityAssembly {
        weights,
        edges,
        potential_term,
        mass,
        region,
    })
}

fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross_norm<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    dot3(c, c).sqrt()
}

fn tri_area<T: Real>(field: &GeometryField<T>, t: [usize; 3]) -> T {
    let p = |k: usize| field.position[t[k]];
    T::lit(0.5) * cross_norm(sub3(p(1), p(0)), sub3(p(2), p(0)))
}

/// Cotangent edge weights of one triangle, scaled by `e^phi` at the
/// centroid height.
fn triangle_edges<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    t: [usize; 3],
) -> Result<[(usize, usize, T); 3]> {
    let p = |k: usize| field.position[t[k]];
    let zc = (p(0)[2] + p(1)[2] + p(2)[2]) / T::lit(3.0);
    let w = spec.eval(zc)?.phi.exp();
    let two_area = cross_norm(sub3(p(1), p(0)), sub3(p(2), p(0)));
    let mut out = [(0, 0, T::zero()); 3];
    for v in 0..3 {
        let (a, b) = ((v + 1) % 3, (v + 2) % 3);
        let ea = sub3(p(a), p(v));
        let eb = sub3(p(b), p(v));
        let cot = dot3(ea, eb) / two_area;
        out[v] = (t[a], t[b], T::lit(0.5) * cot * w);
    }
    Ok(out)
}

impl<T: Real> StabilityAssembly<T> {
    fn check_support(&self, u: &[T]) -> Result<()> {
        if u.len() != self.mass.len() {
            return Err(Error::InvalidInput("test function length mismatch".into()));
        }
        let mut inside = vec![false; u.len()];
        for &k in &self.region {
            inside[k] = true;
        }
        if let Some(k) = (0..u.len()).find(|&k| !inside[k] && u[k] != T::zero()) {
            return Err(Error::SupportViolation { index: k });
        }
        Ok(())
    }

    /// Symmetric bilinear form `Q_phi(u, v)`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> Result<T> {
        self.check_support(u)?;
        self.check_support(v)?;
        let mut acc = T::zero();
        // Products of u and v are formed first so that swapping them is exact.
        for &(a, b, w) in &self.edges {
            acc += w * ((u[a] - u[b]) * (v[a] - v[b]));
        }
        for &k in &self.region {
            acc -= self.potential_term[k] * (u[k] * v[k]);
        }
        Ok(acc)
    }

    /// `int e^phi u^2`.
    pub fn weighted_norm_sq(&self, u: &[T]) -> T {
        self.region.iter().map(|&k| self.mass[k] * sq(u[k])).sum()
    }

    fn compact(&self) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut map = vec![None; self.mass.len()];
        for (c, &k) in self.region.iter().enumerate() {
            map[k] = Some(c);
        }
        (self.region.clone(), map)
    }

    /// `K - P - shift M` restricted to the region, as a band matrix.
    fn operator(&self, shift: T) -> BandMatrix<T> {
        let (reg, map) = self.compact();
        let m = reg.len();
        let mut bw = 0usize;
        for &(a, b, _) in &self.edges {
            if let (Some(ca), Some(cb)) = (map[a], map[b]) {
                bw = bw.max(ca.abs_diff(cb));
            }
        }
        let mut mat = BandMatrix::zeros(m, bw);
        for &(a, b, w) in &self.edges {
            match (map[a], map[b]) {
                (Some(ca), Some(cb)) => {
                    mat.add_to(ca, ca, w);
                    mat.add_to(cb, cb, w);
                    mat.add_to(ca, cb, -w);
                    mat.add_to(cb, ca, -w);
                }
                (Some(ca), None) => mat.add_to(ca, ca, w),
                (None, Some(cb)) => mat.add_to(cb, cb, w),
                (None, None) => {}
            }
        }
        for (c, &k) in reg.iter().enumerate() {
            mat.add_to(c, c, -self.potential_term[k] - shift * self.mass[k]);
        }
        mat
    }
}

/// Discrete `Q_phi(u, u)`.
///
/// Quadrature: piecewise-linear elements with exact stiffness on each
/// element and lumped mass, as described in the module documentation.
pub fn quadratic_form<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    u: &[T],
    region: &[usize],
) -> Result<T> {
    let asm = assemble(field, spec, region)?;
    asm.bilinear(u, u)
}

/// Smallest eigenvalue of `-L_phi` on `region` with Dirichlet exterior.
///
/// Shifted inverse iteration with shift `-max |P / M| - 1`, which makes
/// the shifted operator positive definite. Stops when the mass-weighted
/// eigen-residual falls below `tol`.
pub fn first_eigenvalue<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    region: &[usize],
    tol: T,
) -> Result<SpectrumResult<T>> {
    let asm = assemble(field, spec, region)?;
    first_eigenvalue_of(&asm, tol)
}

/// As [`first_eigenvalue`] on a prebuilt assembly.
pub fn first_eigenvalue_of<T: Real>(asm: &StabilityAssembly<T>, tol: T) -> Result<SpectrumResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let reg = &asm.region;
    let m = reg.len();
    if let Some(&k) = reg.iter().find(|&&k| !(asm.mass[k] > T::zero())) {
        return Err(Error::InvalidInput(format!("sample {k} has zero mass")));
    }
    let pmax = reg.iter().fold(T::zero(), |acc, &k| {
        acc.max((asm.potential_term[k] / asm.mass[k]).abs())
    });
    let shift = -pmax - T::one();
    let lu = asm.operator(shift).factor()?;
    let a = asm.operator(T::zero());
    let mass: Vec<T> = reg.iter().map(|&k| asm.mass[k]).collect();
    let mnorm = |v: &[T]| -> T { v.iter().zip(&mass).map(|(x, m)| *m * sq(*x)).sum::<T>().sqrt() };

    let mut u: Vec<T> = vec![T::one(); m];
    let nrm = mnorm(&u);
    u.iter_mut().for_each(|x| *x /= nrm);
    let max_iters = 1000;
    let mut residual = T::infinity();
    for it in 1..=max_iters {
        let mut y: Vec<T> = u.iter().zip(&mass).map(|(x, m)| *x * *m).collect();
        lu.solve_in_place(&mut y);
        let nrm = mnorm(&y);
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: f64::NAN,
            });
        }
        u = y.into_iter().map(|x| x / nrm).collect();
        let au = a.mul_vec(&u);
        let lambda: T = u.iter().zip(&au).map(|(x, y)| *x * *y).sum();
        residual = au
            .iter()
            .zip(&u)
            .zip(&mass)
            .map(|((ay, x), mm)| sq(*ay - lambda * *mm * *x) / *mm)
            .sum::<T>()
            .sqrt();
        if residual <= tol {
            let sum: T = u.iter().copied().sum();
            let sign = if sum < T::zero() { -T::one() } else { T::one() };
            let mut full = vec![T::zero(); asm.mass.len()];
            for (c, &k) in reg.iter().enumerate() {
                full[k] = sign * u[c];
            }
            return Ok(SpectrumResult {
                lambda1: lambda,
                eigenfunction: full,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iters,
        residual: residual.to_f64_lossy(),
    })
}

/// Minimum Rayleigh quotient `Q_phi(u, u) / int e^phi u^2` over `trials`
/// random test functions supported on the region.
///
/// Each trial draws uniform values in `[0, 1)` on the region and smooths
/// them with a few passes of edge averaging, so the trials range from
/// rough to smooth.
pub fn rayleigh_trial_min<T: Real>(asm: &StabilityAssembly<T>, trials: usize, seed: u64) -> Result<T> {
    let n = asm.mass.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = vec![false; n];
    for &k in &asm.region {
        inside[k] = true;
    }
    let mut best = T::infinity();
    for t in 0..trials {
        let mut u = vec![T::zero(); n];
        for &k in &asm.region {
            u[k] = T::lit(rng.gen::<f64>());
        }
        for _ in 0..(t % 8) * 4 {
            let mut acc = u.clone();
            let mut cnt = vec![T::one(); n];
            for &(a, b, _) in &asm.edges {
                acc[a] += u[b];
                acc[b] += u[a];
                cnt[a] += T::one();
                cnt[b] += T::one();
            }
            for k in 0..n {
                u[k] = if inside[k] { acc[k] / cnt[k] } else { T::zero() };
            }
        }
        let q = asm.bilinear(&u, &u)?;
        let m = asm.weighted_norm_sq(&u);
        if m > T::zero() {
            best = best.min(q / m);
        }
    }
    Ok(best)
}

/// Residual of a Jacobi-field certificate over interior samples (margin 2).
///
/// * `Killing(V)`: `L_phi nu` with `nu = <V, N>`; `nu` must be positive on
///   every sample.
/// * `LogEta`: the identity for `w = log eta`; `eta` must be positive.
pub fn jacobi_residual<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    certificate: JacobiCertificate<T>,
) -> Result<ResidualReport<T>> {
    let n = field.len();
    let phi = phi_of_height(field, spec)?;
    let evals = field.mu.iter().map(|&z| spec.eval(z)).collect::<Result<Vec<_>>>()?;
    let s2 = field.shape_norm_sq();
    let margin = 2;
    let (name, vals): (&str, Vec<T>) = match certificate {
        JacobiCertificate::Killing(v) => {
            let len = dot3(v, v).sqrt();
            if v[2].abs() > T::lit(1e-12) || (len - T::one()).abs() > T::lit(1e-9) {
                return Err(Error::InvalidInput("V must be a horizontal unit vector".into()));
            }
            if let Surface::Profile(p) = &field.source {
                if p.kind == ProfileKind::Rotational {
                    // <V, N> takes both signs around every parallel with N
                    // not vertical, so no rotational surface is a graph in V.
                    if let Some(k) = (0..n).find(|&k| field.eta[k].abs() < T::one()) {
                        return Err(Error::SignViolation {
                            index: k,
                            value: -dot3(v, field.normal[k]).abs().to_f64_lossy(),
                        });
                    }
                }
            }
            let nu: Vec<T> = field.normal.iter().map(|nn| dot3(v, *nn)).collect();
            if let Some(k) = (0..n).find(|&k| !(nu[k] > T::zero())) {
                return Err(Error::SignViolation {
                    index: k,
                    value: nu[k].to_f64_lossy(),
                });
            }
            let lap = drift_laplacian(field, &nu, &phi)?;
            (
                "L_phi <V, N>",
                (0..n)
                    .map(|k| lap.values[k] + (s2[k] - evals[k].d2 * sq(field.eta[k])) * nu[k])
                    .collect(),
            )
        }
        JacobiCertificate::LogEta => {
            if let Some(k) = (0..n).find(|&k| !(field.eta[k] > T::zero())) {
                return Err(Error::SignViolation {
                    index: k,
                    value: field.eta[k].to_f64_lossy(),
                });
            }
            let w: Vec<T> = field.eta.iter().map(|e| e.ln()).collect();
            let lap = drift_laplacian(field, &w, &phi)?;
            let ge = gradient_norm_sq(field, &field.eta)?;
            (
                "Delta w + <grad phi, grad w> with w = log eta",
                (0..n)
                    .map(|k| {
                        let gm = sq(field.grad_mu[k][0]) + sq(field.grad_mu[k][1]);
                        lap.values[k] + ge[k] / sq(field.eta[k]) + s2[k] + evals[k].d2 * gm
                    })
                    .collect(),
            )
        }
    };
    let masked: Vec<Option<T>> = (0..n)
        .map(|k| field.is_interior(k, margin).then_some(vals[k]))
        .collect();
    Ok(ResidualReport::from_values(name, &masked, field.spacing(), margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{sample_geometry, GraphPatch, Rect};

    fn flat(h: f64) -> GeometryField<f64> {
        let dom = Rect {
            x0: -1.0,
            x1: 1.0,
            y0: -1.0,
            y1: 1.0,
        };
        let g = GraphPatch::from_fn(dom, h, |_, _| 0.0).unwrap();
        sample_geometry(&Surface::Graph(g), &PotentialSpec::<f64>::constant(0.0)).unwrap()
    }

    #[test]
    fn zero_function_has_zero_form() {
        let f = flat(0.25);
        let spec = PotentialSpec::<f64>::constant(0.0);
        let region = region_where(&f, |_, _| true);
        let u = vec![0.0; f.len()];
        assert_eq!(quadratic_form(&f, &spec, &u, &region).unwrap(), 0.0);
    }

    #[test]
    fn support_violation_is_detected() {
        let f = flat(0.25);
        let spec = PotentialSpec::<f64>::constant(0.0);
        let region = region_where(&f, |_, p| p[0] < 0.0);
        let u = vec![1.0; f.len()];
        assert!(matches!(
            quadratic_form(&f, &spec, &u, &region),
            Err(Error::SupportViolation { .. })
        ));
    }

    #[test]
    fn boundary_samples_are_rejected() {
        let f = flat(0.25);
        let spec = PotentialSpec::<f64>::constant(0.0);
        assert!(assemble(&f, &spec, &[0]).is_err());
    }

    #[test]
    fn square_dirichlet_eigenvalue() {
        // Unit-side square [-0.5, 0.5]^2 inside the patch: 2 pi^2.
        let f = flat(1.0 / 32.0);
        let spec = PotentialSpec::<f64>::constant(0.0);
        let eps = 1e-9;
        let region = region_where(&f, |_, p| p[0].abs() < 0.5 - eps && p[1].abs() < 0.5 - eps);
        let r = first_eigenvalue(&f, &spec, &region, 1e-8).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((r.lambda1 - exact).abs() / exact < 0.01, "{}", r.lambda1);
    }
}
