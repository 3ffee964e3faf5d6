//! Numerical audits of quantitative estimates for `phi`-minimal surfaces.
//!
//! Each audit separates its hypotheses from its conclusion. A report only
//! counts as failed when every hypothesis holds and the conclusion does
//! not; see [`AuditRecord`].
//!
//! Intrinsic distances on graphs come from Dijkstra's algorithm on the
//! grid refined once at half spacing, with every pair of the nine refined
//! nodes of an original cell joined by a chord. Profiles use their chain of
//! samples.

mod area;
mod blowup;
mod curvature;
mod density;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub use area::{geodesic_disk_area_check, ilmanen_estimate_report, AreaReport, IlmanenEstimateReport};
pub use blowup::{blowup_rescale, rescale_surface, BlowupModel, BlowupResult, BlowupStage};
pub use curvature::{
    convexity_report, curvature_ratio_sup, omori_gamma_check, ConvexityHypotheses, ConvexityReport, ConvexityVerdict,
    OmoriReport,
};
pub use density::{density_monotonicity, DensityReport};

/// Serializable summary shared by every audit.
///
/// `passed` is false exactly when all entries of `hypotheses` hold and the
/// conclusion fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub name: String,
    pub hypotheses: BTreeMap<String, bool>,
    pub values: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub passed: bool,
}

impl AuditRecord {
    /// Record with no entries that passes.
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            hypotheses: BTreeMap::new(),
            values: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn hypothesis(mut self, key: &str, holds: bool) -> Self {
        self.hypotheses.insert(key.into(), holds);
        self
    }

    pub fn value<T: Real>(mut self, key: &str, v: T) -> Self {
        self.values.insert(key.into(), v.to_f64_lossy());
        self
    }

    pub fn tolerance<T: Real>(mut self, key: &str, v: T) -> Self {
        self.tolerances.insert(key.into(), v.to_f64_lossy());
        self
    }

    /// Sets `passed` from the conclusion, gated by the recorded hypotheses.
    pub fn conclude(mut self, conclusion: bool) -> Self {
        let gated = self.hypotheses.values().all(|&h| h);
        self.passed = !gated || conclusion;
        self
    }
}

/// Heap entry ordered by distance, ties broken by the smaller index.
struct Entry<T> {
    d: T,
    k: usize,
}

impl<T: Real> PartialEq for Entry<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl<T: Real> Eq for Entry<T> {}

impl<T: Real> PartialOrd for Entry<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<T: Real> Ord for Entry<T> {
    // Reversed so that `BinaryHeap` pops the closest node first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.partial_cmp(&self.d)
            .unwrap_or(Ordering::Equal)
            .then_with(|| o.k.cmp(&self.k))
    }
}

/// Shortest-path distances from a set of sources. Unreached nodes get `inf`.
pub(crate) fn dijkstra<T: Real>(adj: &[Vec<(usize, T)>], sources: &[usize]) -> Vec<T> {
    let mut dist = vec![T::infinity(); adj.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = T::zero();
        heap.push(Entry { d: T::zero(), k: s });
    }
    while let Some(Entry { d, k }) = heap.pop() {
        if d > dist[k] {
            continue;
        }
        for &(m, w) in &adj[k] {
            let nd = d + w;
            if nd < dist[m] {
                dist[m] = nd;
                heap.push(Entry { d: nd, k: m });
            }
        }
    }
    dist
}

/// Fraction of a triangle where the linear interpolant of the vertex
/// values `f` stays below `t`.
pub(crate) fn sublevel_fraction<T: Real>(f: [T; 3], t: T) -> T {
    let mut v = f;
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let [a, b, c] = v;
    if t <= a {
        T::zero()
    } else if t >= c {
        T::one()
    } else if t <= b {
        (t - a) * (t - a) / ((b - a) * (c - a))
    } else {
        T::one() - (c - t) * (c - t) / ((c - a) * (c - b))
    }
}

pub(crate) fn norm3<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Area of the triangle with the given vertices.
pub(crate) fn tri_area<T: Real>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T {
    let u = sub3(b, a);
    let v = sub3(c, a);
    let w = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    norm3(w) * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sublevel_fraction_endpoints_and_midpoint() {
        assert_eq!(sublevel_fraction([0.0, 1.0, 2.0], -1.0), 0.0);
        assert_eq!(sublevel_fraction([0.0, 1.0, 2.0], 3.0), 1.0);
        assert!((sublevel_fraction([0.0f64, 1.0, 2.0], 1.0) - 0.5).abs() < 1e-15);
        assert!((sublevel_fraction([0.0f64, 0.0, 1.0], 0.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dijkstra_on_a_path() {
        let adj = vec![vec![(1, 1.0f64)], vec![(0, 1.0), (2, 2.0)], vec![(1, 2.0)], vec![]];
        let d = dijkstra(&adj, &[0]);
        assert_eq!(&d[..3], &[0.0, 1.0, 3.0]);
        assert!(d[3].is_infinite());
    }

    #[test]
    fn record_gating() {
        let r = AuditRecord::new("x").hypothesis("h", false).conclude(false);
        assert!(r.passed);
        let r = AuditRecord::new("x").hypothesis("h", true).conclude(false);
        assert!(!r.passed);
    }
}
