//! Intrinsic disk areas and distance-weighted curvature in the conformal metric.

use serde::{Deserialize, Serialize};

use super::{dijkstra, norm3, sub3, sublevel_fraction, tri_area, AuditRecord};
use crate::error::{Error, Result};
use crate::ilmanen::{curvature_sups, to_ilmanen_shape};
use crate::potential::PotentialSpec;
use crate::scalar::{sq, Real};
use crate::surface::{GeometryField, GraphPatch, ProfileCurve, ProfileKind, Surface};

/// Area of an intrinsic disk compared with `4 pi rho^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaReport<T> {
    pub center: usize,
    pub rho: T,
    /// `2 rho phi'(rho + mu(p)) < log 2` and `sqrt(|gamma|) rho < 1`.
    pub hypothesis_ok: bool,
    /// `2 rho phi'(rho + mu(p))`.
    pub phi_term: T,
    /// `sqrt(|gamma|) rho`.
    pub gamma_term: T,
    pub disk_area: T,
    pub bound: T,
    /// `disk_area < bound`.
    pub passed: bool,
}

impl<T: Real> AreaReport<T> {
    pub fn audit_record(&self) -> AuditRecord {
        AuditRecord::new("intrinsic disk area")
            .hypothesis("2 rho phi'(rho + mu(p)) < log 2", self.phi_term < T::LN_2())
            .hypothesis("sqrt(|gamma|) rho < 1", self.gamma_term < T::one())
            .value("center", T::from_usize_lossy(self.center))
            .value("rho", self.rho)
            .value("phi_term", self.phi_term)
            .value("gamma_term", self.gamma_term)
            .value(
                "rho phi'(rho + mu(p)) / (sqrt(2) pi)",
                self.phi_term / (T::lit(2.0) * T::SQRT_2() * T::PI()),
            )
            .value("disk_area", self.disk_area)
            .value("bound", self.bound)
            .conclude(self.passed)
    }
}

/// Supremum over samples of `|S^phi| min(d_phi(p, boundary), c)` for two cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlmanenEstimateReport<T> {
    /// Cutoff `R = (sup |K^phi| + sup |grad K^phi|^(1/2))^(-1)`.
    pub sup_with_r: T,
    /// Cutoff `pi / (2 sqrt(A))` with `A = sup |K^phi|`.
    pub sup_with_a: T,
    pub r_const: T,
    pub a_const: T,
    /// `sup |S^phi|` alone.
    pub sup_s_phi: T,
}

impl<T: Real> IlmanenEstimateReport<T> {
    pub fn audit_record(&self) -> AuditRecord {
        AuditRecord::new("conformal curvature times distance")
            .value("sup_with_r", self.sup_with_r)
            .value("sup_with_a", self.sup_with_a)
            .value("r_const", self.r_const)
            .value("a_const", self.a_const)
            .value("sup_s_phi", self.sup_s_phi)
    }
}

/// Grid at half spacing with bilinear heights.
struct Refined<T> {
    nx: usize,
    ny: usize,
    pos: Vec<[T; 3]>,
}

impl<T: Real> Refined<T> {
    fn of(g: &GraphPatch<T>) -> Self {
        let nx = 2 * g.nx - 1;
        let ny = 2 * g.ny - 1;
        let half = T::lit(0.5);
        let hh = g.h * half;
        let mut pos = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (i0, j0) = (i / 2, j / 2);
                let (i1, j1) = (i.div_ceil(2), j.div_ceil(2));
                let z = (g.at(i0, j0) + g.at(i1, j0) + g.at(i0, j1) + g.at(i1, j1)) * half * half;
                pos.push([
                    g.domain.x0 + hh * T::from_usize_lossy(i),
                    g.domain.y0 + hh * T::from_usize_lossy(j),
                    z,
                ]);
            }
        }
        Self { nx, ny, pos }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = (k % self.nx, k / self.nx);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Joins every pair of the nine nodes of each original cell.
    fn adjacency(&self, mut len: impl FnMut([T; 3], [T; 3]) -> T) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.pos.len()];
        for cj in 0..(self.ny - 1) / 2 {
            for ci in 0..(self.nx - 1) / 2 {
                let nodes: Vec<usize> = (0..9).map(|m| self.idx(2 * ci + m % 3, 2 * cj + m / 3)).collect();
                for a in 0..9 {
                    for b in (a + 1)..9 {
                        let (p, q) = (nodes[a], nodes[b]);
                        let w = len(self.pos[p], self.pos[q]);
                        adj[p].push((q, w));
                        adj[q].push((p, w));
                    }
                }
            }
        }
        adj
    }

    /// Triangles of the refined grid, split along `(i, j)-(i+1, j+1)`.
    fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.ny - 1).flat_map(move |j| {
            (0..self.nx - 1).flat_map(move |i| {
                let a = self.idx(i, j);
                let b = self.idx(i + 1, j);
                let c = self.idx(i + 1, j + 1);
                let d = self.idx(i, j + 1);
                [[a, b, c], [a, c, d]]
            })
        })
    }
}

fn euclid<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    norm3(sub3(a, b))
}

/// Arclength from sample `p` along the chain of chords of a profile.
fn chain_distance<T: Real>(c: &ProfileCurve<T>, p: usize, len: impl Fn(usize) -> T) -> Vec<T> {
    let n = c.len();
    let mut d = vec![T::zero(); n];
    for k in (p + 1)..n {
        d[k] = d[k - 1] + len(k - 1);
    }
    for k in (0..p).rev() {
        d[k] = d[k + 1] + len(k);
    }
    d
}

fn chord<T: Real>(c: &ProfileCurve<T>, k: usize) -> T {
    let (a, b) = (&c.samples[k], &c.samples[k + 1]);
    (sq(b.x - a.x) + sq(b.z - a.z)).sqrt()
}

/// Checks the area of the intrinsic disk of radius `rho` about sample `p`
/// against `4 pi rho^2`.
///
/// `gamma` is the constant `sup (2 phi'' - phi'^2)` of the potential. On
/// surfaces of revolution the center must be the axis sample.
pub fn geodesic_disk_area_check<T: Real>(
    field: &GeometryField<T>,
    p: usize,
    rho: T,
    spec: &PotentialSpec<T>,
    gamma: T,
) -> Result<AreaReport<T>> {
    if p >= field.len() {
        return Err(Error::InvalidInput(format!("center {p} is not a sample")));
    }
    if !(rho > T::zero()) {
        return Err(Error::InvalidInput("rho must be positive".into()));
    }
    let phi_term = T::lit(2.0) * rho * spec.d1(rho + field.mu[p])?;
    let gamma_term = gamma.abs().sqrt() * rho;
    let disk_area = match &field.source {
        Surface::Graph(g) => graph_disk_area(g, p, rho)?,
        Surface::Profile(c) => profile_disk_area(c, p, rho)?,
    };
    let bound = T::lit(4.0) * T::PI() * sq(rho);
    Ok(AreaReport {
        center: p,
        rho,
        hypothesis_ok: phi_term < T::LN_2() && gamma_term < T::one(),
        phi_term,
        gamma_term,
        disk_area,
        bound,
        passed: disk_area < bound,
    })
}

fn graph_disk_area<T: Real>(g: &GraphPatch<T>, p: usize, rho: T) -> Result<T> {
    let mesh = Refined::of(g);
    let adj = mesh.adjacency(euclid);
    let d = dijkstra(&adj, &[mesh.idx(2 * (p % g.nx), 2 * (p / g.nx))]);
    if let Some(k) = (0..d.len()).find(|&k| mesh.is_boundary(k) && d[k] < rho) {
        return Err(Error::PatchExceeded(format!(
            "the disk of radius {} reaches the boundary node {}",
            rho, k
        )));
    }
    Ok(mesh
        .triangles()
        .map(|[a, b, c]| {
            let f = sublevel_fraction([d[a], d[b], d[c]], rho);
            if f > T::zero() {
                f * tri_area(mesh.pos[a], mesh.pos[b], mesh.pos[c])
            } else {
                T::zero()
            }
        })
        .sum())
}

fn profile_disk_area<T: Real>(c: &ProfileCurve<T>, p: usize, rho: T) -> Result<T> {
    let d = chain_distance(c, p, |k| chord(c, k));
    let n = c.len();
    let exceeded = || Error::PatchExceeded(format!("the disk of radius {} reaches the end of the profile", rho));
    match c.kind {
        ProfileKind::TranslationInvariant => {
            if d[0] < rho || d[n - 1] < rho {
                return Err(exceeded());
            }
            // Each point at chain distance t carries a ruling segment of
            // length 2 sqrt(rho^2 - t^2); F is its antiderivative.
            let f = |t: T| {
                let t = t.min(rho);
                t * (sq(rho) - sq(t)).max(T::zero()).sqrt() + sq(rho) * (t / rho).asin()
            };
            let mut area = T::zero();
            for k in 0..n - 1 {
                let (lo, hi) = (d[k].min(d[k + 1]), d[k].max(d[k + 1]));
                if lo < rho {
                    area += f(hi) - f(lo);
                }
            }
            Ok(area)
        }
        ProfileKind::Rotational => {
            if c.samples[p].x > T::lit(1e-12) {
                return Err(Error::UnsupportedCombination(
                    "intrinsic disks on surfaces of revolution are centered on the axis".into(),
                ));
            }
            let far = if p == 0 { n - 1 } else { 0 };
            if d[far] < rho {
                return Err(exceeded());
            }
            let two_pi = T::lit(2.0) * T::PI();
            let mut area = T::zero();
            for k in 0..n - 1 {
                let (d0, d1) = (d[k], d[k + 1]);
                let (x0, x1) = (c.samples[k].x, c.samples[k + 1].x);
                let len = (d1 - d0).abs();
                let (near, far, xn, xf) = if d0 <= d1 { (d0, d1, x0, x1) } else { (d1, d0, x1, x0) };
                if near >= rho {
                    continue;
                }
                let t = if far <= rho {
                    T::one()
                } else {
                    (rho - near) / (far - near)
                };
                let x_cut = xn + (xf - xn) * t;
                area += two_pi * (xn + x_cut) * T::lit(0.5) * len * t;
            }
            Ok(area)
        }
    }
}

/// Weighs the conformal shape norm `|S^phi|` by the conformal distance to
/// the `boundary` samples and reports the suprema.
///
/// The constants come from the sectional curvature of the conformal metric
/// over the sampled height range. The report carries no assertion.
pub fn ilmanen_estimate_report<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    boundary: &[usize],
) -> Result<IlmanenEstimateReport<T>> {
    if boundary.is_empty() {
        return Err(Error::InvalidInput("boundary sample set is empty".into()));
    }
    if let Some(&k) = boundary.iter().find(|&&k| k >= field.len()) {
        return Err(Error::InvalidInput(format!("boundary sample {k} does not exist")));
    }
    let half = T::lit(0.5);
    let conformal = |a: [T; 3], b: [T; 3]| -> Result<T> {
        let e = spec.eval((a[2] + b[2]) * half)?;
        Ok((e.phi * half).exp() * euclid(a, b))
    };
    let dist: Vec<T> = match &field.source {
        Surface::Graph(g) => {
            let mesh = Refined::of(g);
            let mut err = None;
            let adj = mesh.adjacency(|a, b| {
                conformal(a, b).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    T::nan()
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            let node = |k: usize| mesh.idx(2 * (k % g.nx), 2 * (k / g.nx));
            let sources: Vec<usize> = boundary.iter().map(|&k| node(k)).collect();
            let d = dijkstra(&adj, &sources);
            (0..field.len()).map(|k| d[node(k)]).collect()
        }
        Surface::Profile(c) => {
            let n = c.len();
            let mut w = Vec::with_capacity(n - 1);
            for k in 0..n - 1 {
                let (a, b) = (&c.samples[k], &c.samples[k + 1]);
                w.push(conformal([a.x, T::zero(), a.z], [b.x, T::zero(), b.z])?);
            }
            let mut adj = vec![Vec::new(); n];
            for k in 0..n - 1 {
                adj[k].push((k + 1, w[k]));
                adj[k + 1].push((k, w[k]));
            }
            dijkstra(&adj, boundary)
        }
    };
    let (z_lo, z_hi) = field
        .mu
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &z| (a.min(z), b.max(z)));
    let (k_sup, g_sup) = curvature_sups(spec, z_lo, z_hi, 257)?;
    let r_const = (k_sup + g_sup.sqrt()).recip();
    let a_const = k_sup;
    let a_cut = if a_const > T::zero() {
        T::PI() / (T::lit(2.0) * a_const.sqrt())
    } else {
        T::infinity()
    };
    let mut report = IlmanenEstimateReport {
        sup_with_r: T::zero(),
        sup_with_a: T::zero(),
        r_const,
        a_const,
        sup_s_phi: T::zero(),
    };
    for k in 0..field.len() {
        let cs = to_ilmanen_shape(spec, field.mu[k], field.shape[k], field.eta[k])?;
        let s = (sq(cs.k1_phi) + sq(cs.k2_phi)).sqrt();
        report.sup_s_phi = report.sup_s_phi.max(s);
        report.sup_with_r = report.sup_with_r.max(s * dist[k].min(r_const));
        report.sup_with_a = report.sup_with_a.max(s * dist[k].min(a_cut));
    }
    Ok(report)
}
