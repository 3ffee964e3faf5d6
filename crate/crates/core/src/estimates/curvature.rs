//! Curvature bounds, convexity and the test function `gamma = 2 log |p|`.

use serde::{Deserialize, Serialize};

use super::{dot3, AuditRecord};
use crate::error::{Error, Result};
use crate::potential::{check_conditions, PotentialSpec};
use crate::scalar::{sq, Real};
use crate::surface::{GeometryField, ResidualReport, Surface};

/// Boundary ring excluded from curvature extrema on graphs, where the
/// second differences are one-sided.
fn margin<T: Real>(field: &GeometryField<T>) -> usize {
    match field.source {
        Surface::Graph(_) => 1,
        Surface::Profile(_) => 0,
    }
}

fn height_range<T: Real>(field: &GeometryField<T>) -> (T, T) {
    let (lo, hi) = field
        .mu
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &z| (a.min(z), b.max(z)));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = T::lit(1e-6) * (T::one() + lo.abs());
        (lo - pad, hi + pad)
    }
}

/// Supremum over samples of `|S| / phi'(mu)` with `|S| = sqrt(H^2 - 2K)`.
pub fn curvature_ratio_sup<T: Real>(field: &GeometryField<T>, spec: &PotentialSpec<T>) -> Result<T> {
    let m = margin(field);
    let mut sup = T::zero();
    for k in 0..field.len() {
        if !field.is_interior(k, m) {
            continue;
        }
        let d1 = spec.d1(field.mu[k])?;
        if !(d1 > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "phi' = {} is not positive at height {}",
                d1, field.mu[k]
            )));
        }
        let s = (sq(field.mean[k]) - T::lit(2.0) * field.gauss[k]).max(T::zero()).sqrt();
        sup = sup.max(s / d1);
    }
    Ok(sup)
}

/// Hypotheses of the convexity criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityHypotheses {
    /// `phi' > 0` and `phi'' >= 0` over the sampled heights.
    pub c1: bool,
    /// The expansion `phi' = lambda z + beta + O(1/z)` is admissible.
    pub cc3: bool,
    /// `phi''' <= 0` over the sampled heights.
    pub d3_nonpositive: bool,
    /// `H <= tol` at every sample.
    pub mean_convex: bool,
}

impl ConvexityHypotheses {
    pub fn all(&self) -> bool {
        self.c1 && self.cc3 && self.d3_nonpositive && self.mean_convex
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexityVerdict {
    ConvexWithinTol,
    NotConvex,
    HypothesesFail,
}

/// Convexity data of a sampled surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport<T> {
    pub min_k: T,
    pub min_k2: T,
    /// `sup k2 / eta` over samples with `eta > 0`, if there are any.
    pub theta_sup: Option<T>,
    /// `inf lambda K`, when the expansion coefficient `lambda` exists.
    pub lambda_k_inf: Option<T>,
    pub hypotheses: ConvexityHypotheses,
    pub verdict: ConvexityVerdict,
    pub tol: T,
}

impl<T: Real> ConvexityReport<T> {
    pub fn audit_record(&self) -> AuditRecord {
        let mut r = AuditRecord::new("convexity")
            .hypothesis("c1", self.hypotheses.c1)
            .hypothesis("cc3", self.hypotheses.cc3)
            .hypothesis("phi''' <= 0", self.hypotheses.d3_nonpositive)
            .hypothesis("H <= 0", self.hypotheses.mean_convex)
            .hypothesis(
                "lambda K bounded below",
                self.lambda_k_inf.is_some_and(|v| v.is_finite()),
            )
            .value("min_K", self.min_k)
            .value("min_k2", self.min_k2)
            .tolerance("tol", self.tol);
        if let Some(t) = self.theta_sup {
            r = r.value("theta_sup", t);
        }
        if let Some(l) = self.lambda_k_inf {
            r = r.value("lambda_K_inf", l);
        }
        r.conclude(self.min_k >= -self.tol)
    }

    /// Per-sample plot data with header `sample,K,k2_over_eta`; the last
    /// column is empty where `eta <= 0`.
    pub fn samples_csv(field: &GeometryField<T>) -> String {
        let mut s = String::from("sample,K,k2_over_eta\n");
        for k in 0..field.len() {
            let ratio = if field.eta[k] > T::zero() {
                format!("{}", field.k2[k] / field.eta[k])
            } else {
                String::new()
            };
            s.push_str(&format!("{},{},{}\n", k, field.gauss[k], ratio));
        }
        s
    }
}

/// Evaluates the convexity criterion on a sampled surface.
///
/// The verdict is `HypothesesFail` unless every hypothesis holds; then it is
/// `ConvexWithinTol` exactly when `min K >= -tol`.
pub fn convexity_report<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    tol: T,
) -> Result<ConvexityReport<T>> {
    let (lo, hi) = height_range(field);
    let cond = check_conditions(spec, lo, hi, 257)?;
    let m = margin(field);
    let mut min_k = T::infinity();
    let mut max_k = T::neg_infinity();
    let mut min_k2 = T::infinity();
    let mut theta_sup: Option<T> = None;
    let mut mean_convex = true;
    for k in 0..field.len() {
        if !field.is_interior(k, m) {
            continue;
        }
        min_k = min_k.min(field.gauss[k]);
        max_k = max_k.max(field.gauss[k]);
        min_k2 = min_k2.min(field.k2[k]);
        if field.mean[k] > tol {
            mean_convex = false;
        }
        if field.eta[k] > T::zero() {
            let r = field.k2[k] / field.eta[k];
            theta_sup = Some(theta_sup.map_or(r, |t| t.max(r)));
        }
    }
    let lambda_k_inf = cond.lambda.map(|l| if l >= T::zero() { l * min_k } else { l * max_k });
    let hypotheses = ConvexityHypotheses {
        c1: cond.c1_holds,
        cc3: cond.cc3_holds,
        d3_nonpositive: cond.d3_nonpositive,
        mean_convex,
    };
    let verdict = if !hypotheses.all() {
        ConvexityVerdict::HypothesesFail
    } else if min_k >= -tol {
        ConvexityVerdict::ConvexWithinTol
    } else {
        ConvexityVerdict::NotConvex
    };
    Ok(ConvexityReport {
        min_k,
        min_k2,
        theta_sup,
        lambda_k_inf,
        hypotheses,
        verdict,
        tol,
    })
}

/// Pointwise check of `|grad gamma| <= 2` and `Delta^phi gamma <= 2A + 1`
/// for `gamma = 2 log |p|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmoriReport<T> {
    /// Excess of `|grad gamma|` over `2`, clipped at zero.
    pub gradient: ResidualReport<T>,
    /// Excess of `Delta^phi gamma` over `2A + 1`, clipped at zero.
    pub laplacian: ResidualReport<T>,
    /// `max(0, sup mu phi'(mu))` over the patch.
    pub a_const: T,
    /// Samples with `|p|` below this value are skipped.
    pub threshold: T,
    /// `min (2 - |grad gamma|)` over checked samples.
    pub gradient_margin: T,
    /// `min (2A + 1 - Delta^phi gamma)` over checked samples.
    pub laplacian_margin: T,
}

impl<T: Real> OmoriReport<T> {
    pub fn audit_record(&self) -> AuditRecord {
        AuditRecord::new("log distance test function")
            .value("a_const", self.a_const)
            .value("threshold", self.threshold)
            .value("gradient_margin", self.gradient_margin)
            .value("laplacian_margin", self.laplacian_margin)
            .value("samples", T::from_usize_lossy(self.gradient.samples))
            .conclude(self.gradient_margin >= T::zero() && self.laplacian_margin >= T::zero())
    }
}

/// Checks the two inequalities for `gamma = 2 log |p|` at every sample with
/// `|p| >= threshold` (default `2`).
///
/// With `p^T` the tangential part of the position and `H` the sampled mean
/// curvature, `|grad gamma| = 2 |p^T| / |p|^2` and
/// `Delta^phi gamma = (4 - 2 H <p, N> + 2 phi' (mu - eta <p, N>)) / |p|^2 - 4 |p^T|^2 / |p|^4`.
/// Profiles are evaluated on their meridian, where `|p|` is the value
/// along the whole orbit on surfaces of revolution.
pub fn omori_gamma_check<T: Real>(
    field: &GeometryField<T>,
    spec: &PotentialSpec<T>,
    threshold: Option<T>,
) -> Result<OmoriReport<T>> {
    let threshold = threshold.unwrap_or(T::lit(2.0));
    let mut a_const = T::zero();
    for &z in &field.mu {
        a_const = a_const.max(z * spec.d1(z)?);
    }
    let bound = T::lit(2.0) * a_const + T::one();
    let n = field.len();
    let mut grad = vec![None; n];
    let mut lap = vec![None; n];
    let mut gradient_margin = T::infinity();
    let mut laplacian_margin = T::infinity();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    for k in 0..n {
        let p = field.position[k];
        let r2 = dot3(p, p);
        let r = r2.sqrt();
        if r < T::lit(1e-6) {
            return Err(Error::OriginProximity {
                index: k,
                norm: r.to_f64_lossy(),
            });
        }
        if r < threshold {
            continue;
        }
        let pn = dot3(p, field.normal[k]);
        let pt2 = (r2 - sq(pn)).max(T::zero());
        let d1 = spec.d1(field.mu[k])?;
        let g = two * pt2.sqrt() / r2;
        let l =
            (four - two * field.mean[k] * pn + two * d1 * (field.mu[k] - field.eta[k] * pn)) / r2 - four * pt2 / sq(r2);
        gradient_margin = gradient_margin.min(two - g);
        laplacian_margin = laplacian_margin.min(bound - l);
        grad[k] = Some((g - two).max(T::zero()));
        lap[k] = Some((l - bound).max(T::zero()));
    }
    let h = field.spacing();
    Ok(OmoriReport {
        gradient: ResidualReport::from_values("|grad gamma| - 2", &grad, h, 0),
        laplacian: ResidualReport::from_values("Delta^phi gamma - (2A + 1)", &lap, h, 0),
        a_const,
        threshold,
        gradient_margin,
        laplacian_margin,
    })
}
