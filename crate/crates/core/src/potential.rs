//! Height potentials `phi` and the structural hypotheses imposed on them.
//!
//! A potential is a function of the height `z` on the open half-line
//! `]alpha, inf[`. It is evaluated together with its first three
//! derivatives, written `d1`, `d2`, `d3` below. Families are a closed
//! registry so every derivative is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sq, Real};

/// Parametrized family of the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family<T> {
    /// `phi = c0`.
    Constant { c0: T },
    /// `phi = slope * z`.
    Linear { slope: T },
    /// `d1 = lambda * z + beta`.
    Quadratic { lambda: T, beta: T },
    /// `d1 = a / z`, defined for `z > 0`.
    LogPower { a: T },
    /// `d1 = lambda * z + beta + sum_i c_i z^(-i)` for `z >= u0`.
    ///
    /// Below `u0` the derivative `d1` continues as its second-order Taylor
    /// polynomial at `u0`, which keeps `phi` three times continuously
    /// differentiable on the whole domain.
    Series {
        lambda: T,
        beta: T,
        coefficients: Vec<T>,
        u0: T,
    },
}

impl<T> Family<T> {
    /// Family name as used in configuration files.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "Constant",
            Family::Linear { .. } => "Linear",
            Family::Quadratic { .. } => "Quadratic",
            Family::LogPower { .. } => "LogPower",
            Family::Series { .. } => "Series",
        }
    }
}

/// A potential on `]alpha, inf[`, stored up to the additive `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec<T> {
    pub family: Family<T>,
    /// Left endpoint of the open domain. May be `-inf`.
    pub alpha: T,
    pub label: String,
    /// Constant added to `phi`. Derivatives are unaffected.
    pub offset: T,
}

/// Values of `phi` and its first three derivatives at one height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialEval<T> {
    pub phi: T,
    pub d1: T,
    pub d2: T,
    pub d3: T,
}

/// Outcome of [`check_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport<T> {
    /// `d1 > 0` and `d2 >= 0` on the query interval.
    pub c1_holds: bool,
    /// Supremum of `2 d2 - d1^2` over the query interval.
    pub gamma: T,
    /// True when `gamma` came from sampling rather than a closed form.
    pub gamma_approximate: bool,
    /// `2 d2 - d1^2` is bounded above on the whole domain.
    pub c2_holds: bool,
    /// The asymptotic expansion exists with `lambda >= 0`, and `beta > 0` when `lambda = 0`.
    pub cc3_holds: bool,
    /// `d3 <= 0` on the query interval.
    pub d3_nonpositive: bool,
    /// Linear coefficient of the expansion of `d1`, when the family has one.
    pub lambda: Option<T>,
    /// Constant coefficient of the expansion of `d1`, when the family has one.
    pub beta: Option<T>,
    pub sample_count: usize,
}

/// Asymptotic data `(lambda, beta)` with the admissibility flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics<T> {
    pub lambda: T,
    pub beta: T,
    /// Set when `lambda < 0`, or `lambda = 0` and `beta <= 0`.
    pub violation: bool,
}

impl<T: Real> PotentialSpec<T> {
    fn with_family(family: Family<T>, alpha: T) -> Self {
        Self {
            family,
            alpha,
            label: String::new(),
            offset: T::zero(),
        }
    }

    /// `phi = c0` on the whole line.
    pub fn constant(c0: T) -> Self {
        Self::with_family(Family::Constant { c0 }, T::neg_infinity())
    }

    /// `phi = slope * z` on the whole line.
    pub fn linear(slope: T) -> Self {
        Self::with_family(Family::Linear { slope }, T::neg_infinity())
    }

    /// `phi = lambda z^2 / 2 + beta z` on the whole line.
    pub fn quadratic(lambda: T, beta: T) -> Self {
        Self::with_family(Family::Quadratic { lambda, beta }, T::neg_infinity())
    }

    /// `phi = a log z` on `]0, inf[`.
    pub fn log_power(a: T) -> Self {
        Self::with_family(Family::LogPower { a }, T::zero())
    }

    /// Truncated inverse-power expansion valid from `u0` on.
    pub fn series(lambda: T, beta: T, coefficients: Vec<T>, u0: T) -> Self {
        Self::with_family(
            Family::Series {
                lambda,
                beta,
                coefficients,
                u0,
            },
            T::neg_infinity(),
        )
    }

    /// Replaces the left endpoint of the domain.
    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    /// Replaces the additive constant.
    pub fn with_offset(mut self, offset: T) -> Self {
        self.offset = offset;
        self
    }

    /// Replaces the label.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Checks the family invariants.
    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha == T::infinity() {
            return Err(Error::InvalidSpec("alpha must be a number below +inf".into()));
        }
        if !self.offset.is_finite() {
            return Err(Error::InvalidSpec("offset must be finite".into()));
        }
        let finite = |name: &str, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be finite")))
            }
        };
        match &self.family {
            Family::Constant { c0 } => finite("c0", *c0),
            Family::Linear { slope } => finite("slope", *slope),
            Family::Quadratic { lambda, beta } => {
                finite("lambda", *lambda)?;
                finite("beta", *beta)
            }
            Family::LogPower { a } => {
                finite("a", *a)?;
                if self.alpha < T::zero() {
                    return Err(Error::InvalidSpec("LogPower requires alpha >= 0".into()));
                }
                Ok(())
            }
            Family::Series {
                lambda,
                beta,
                coefficients,
                u0,
            } => {
                finite("lambda", *lambda)?;
                finite("beta", *beta)?;
                finite("u0", *u0)?;
                for (i, c) in coefficients.iter().enumerate() {
                    finite(&format!("c{}", i + 1), *c)?;
                }
                if *u0 <= self.alpha.max(T::zero()) {
                    return Err(Error::InvalidSpec("Series requires u0 > max(alpha, 0)".into()));
                }
                Ok(())
            }
        }
    }

    /// Evaluates `phi` and its derivatives at `z`.
    pub fn eval(&self, z: T) -> Result<PotentialEval<T>> {
        if !(z > self.alpha) || !z.is_finite() {
            return Err(Error::Domain {
                z: z.to_f64_lossy(),
                alpha: self.alpha.to_f64_lossy(),
            });
        }
        let mut e = match &self.family {
            Family::Constant { c0 } => PotentialEval {
                phi: *c0,
                d1: T::zero(),
                d2: T::zero(),
                d3: T::zero(),
            },
            Family::Linear { slope } => PotentialEval {
                phi: *slope * z,
                d1: *slope,
                d2: T::zero(),
                d3: T::zero(),
            },
            Family::Quadratic { lambda, beta } => PotentialEval {
                phi: *lambda * z * z * T::lit(0.5) + *beta * z,
                d1: *lambda * z + *beta,
                d2: *lambda,
                d3: T::zero(),
            },
            Family::LogPower { a } => {
                if z <= T::zero() {
                    return Err(Error::Family(format!("LogPower is defined only for z > 0, got {}", z)));
                }
                let r = z.recip();
                PotentialEval {
                    phi: *a * z.ln(),
                    d1: *a * r,
                    d2: -*a * r * r,
                    d3: T::lit(2.0) * *a * r * r * r,
                }
            }
            Family::Series {
                lambda,
                beta,
                coefficients,
                u0,
            } => {
                if z >= *u0 {
                    series_tail(*lambda, *beta, coefficients, z)
                } else {
                    let base = series_tail(*lambda, *beta, coefficients, *u0);
                    let t = z - *u0;
                    let half = T::lit(0.5);
                    let sixth = T::lit(1.0 / 6.0);
                    PotentialEval {
                        phi: base.phi + base.d1 * t + base.d2 * t * t * half + base.d3 * t * t * t * sixth,
                        d1: base.d1 + base.d2 * t + base.d3 * t * t * half,
                        d2: base.d2 + base.d3 * t,
                        d3: base.d3,
                    }
                }
            }
        };
        e.phi += self.offset;
        Ok(e)
    }

    /// Shorthand for `eval(z)?.d1`.
    pub fn d1(&self, z: T) -> Result<T> {
        Ok(self.eval(z)?.d1)
    }

    /// True for families whose derivatives have closed-form extrema.
    pub fn is_closed_form(&self) -> bool {
        matches!(
            self.family,
            Family::Constant { .. } | Family::Linear { .. } | Family::Quadratic { .. }
        )
    }
}

fn series_tail<T: Real>(lambda: T, beta: T, coefficients: &[T], z: T) -> PotentialEval<T> {
    let half = T::lit(0.5);
    let mut phi = lambda * z * z * half + beta * z;
    let mut d1 = lambda * z + beta;
    let mut d2 = lambda;
    let mut d3 = T::zero();
    let r = z.recip();
    let mut rp = r; // z^(-i)
    for (k, &c) in coefficients.iter().enumerate() {
        let i = T::from_usize_lossy(k + 1);
        if k == 0 {
            phi += c * z.ln();
        } else {
            phi += c * rp * z / (T::one() - i);
        }
        d1 += c * rp;
        d2 -= i * c * rp * r;
        d3 += i * (i + T::one()) * c * rp * r * r;
        rp *= r;
    }
    PotentialEval { phi, d1, d2, d3 }
}

/// Evaluates `spec` at `z`. See [`PotentialSpec::eval`].
pub fn eval_potential<T: Real>(spec: &PotentialSpec<T>, z: T) -> Result<PotentialEval<T>> {
    spec.eval(z)
}

/// Returns the coefficients `(lambda, beta)` of the expansion
/// `d1 = lambda z + beta + O(1/z)` with the admissibility flag.
pub fn asymptotics<T: Real>(spec: &PotentialSpec<T>) -> Result<Asymptotics<T>> {
    let (lambda, beta) = match &spec.family {
        Family::Constant { .. } => (T::zero(), T::zero()),
        Family::Linear { slope } => (T::zero(), *slope),
        Family::Quadratic { lambda, beta } => (*lambda, *beta),
        Family::Series { lambda, beta, .. } => (*lambda, *beta),
        Family::LogPower { .. } => {
            return Err(Error::UnsupportedFamily(
                "LogPower has no expansion of the form lambda z + beta + O(1/z)".into(),
            ))
        }
    };
    let violation = lambda < T::zero() || (lambda == T::zero() && beta <= T::zero());
    Ok(Asymptotics {
        lambda,
        beta,
        violation,
    })
}

fn check_interval<T: Real>(spec: &PotentialSpec<T>, z_lo: T, z_hi: T, n: usize) -> Result<()> {
    spec.validate()?;
    if !(spec.alpha < z_lo && z_lo < z_hi) || !z_hi.is_finite() {
        return Err(Error::Domain {
            z: z_lo.to_f64_lossy(),
            alpha: spec.alpha.to_f64_lossy(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("n_samples must be at least 2".into()));
    }
    Ok(())
}

/// Uniform grid of `n` heights on `[z_lo, z_hi]`.
pub(crate) fn uniform<T: Real>(z_lo: T, z_hi: T, n: usize) -> impl Iterator<Item = T> {
    let dz = (z_hi - z_lo) / T::from_usize_lossy(n - 1);
    (0..n).map(move |k| {
        if k + 1 == n {
            z_hi
        } else {
            z_lo + dz * T::from_usize_lossy(k)
        }
    })
}

/// Supremum of `f` on `[z_lo, z_hi]` from `n` uniform samples followed by
/// golden-section refinement around the best sample.
pub fn sampled_sup<T: Real, F>(f: F, z_lo: T, z_hi: T, n: usize) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    let zs: Vec<T> = uniform(z_lo, z_hi, n).collect();
    let mut best = T::neg_infinity();
    let mut best_k = 0;
    for (k, &z) in zs.iter().enumerate() {
        let v = f(z)?;
        if v > best || k == 0 {
            best = v;
            best_k = k;
        }
    }
    let mut a = zs[best_k.saturating_sub(1)];
    let mut b = zs[(best_k + 1).min(n - 1)];
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(best.max(fc).max(fd))
}

/// Checks the hypotheses on the potential over `[z_lo, z_hi]`.
///
/// `c1` and `d3 <= 0` are decided in closed form for the Constant, Linear
/// and Quadratic families and by sampling otherwise. `gamma` is the exact
/// supremum for those families and a refined sampled supremum otherwise.
pub fn check_conditions<T: Real>(
    spec: &PotentialSpec<T>,
    z_lo: T,
    z_hi: T,
    n_samples: usize,
) -> Result<ConditionReport<T>> {
    check_interval(spec, z_lo, z_hi, n_samples)?;
    let two = T::lit(2.0);
    let gamma_fn = |z: T| -> Result<T> {
        let e = spec.eval(z)?;
        Ok(two * e.d2 - e.d1 * e.d1)
    };

    let (c1_holds, d3_nonpositive, gamma, gamma_approximate) = match &spec.family {
        Family::Constant { .. } => (false, true, T::zero(), false),
        Family::Linear { slope } => (*slope > T::zero(), true, -sq(*slope), false),
        Family::Quadratic { lambda, beta } => {
            let d1_lo = *lambda * z_lo + *beta;
            let d1_hi = *lambda * z_hi + *beta;
            let c1 = *lambda >= T::zero() && d1_lo > T::zero() && d1_hi > T::zero();
            let gamma = if *lambda == T::zero() {
                -sq(*beta)
            } else {
                let z_star = -*beta / *lambda;
                if z_star >= z_lo && z_star <= z_hi {
                    two * *lambda
                } else {
                    (two * *lambda - sq(d1_lo)).max(two * *lambda - sq(d1_hi))
                }
            };
            (c1, true, gamma, false)
        }
        _ => {
            let mut c1 = true;
            let mut d3 = true;
            for z in uniform(z_lo, z_hi, n_samples) {
                let e = spec.eval(z)?;
                if !(e.d1 > T::zero() && e.d2 >= T::zero()) {
                    c1 = false;
                }
                if e.d3 > T::zero() {
                    d3 = false;
                }
            }
            let gamma = sampled_sup(gamma_fn, z_lo, z_hi, n_samples)?;
            (c1, d3, gamma, true)
        }
    };

    let c2_global = match &spec.family {
        Family::LogPower { a } => {
            // 2 d2 - d1^2 = -(2a + a^2) / z^2 blows up at z = 0 when -2 < a < 0.
            let coeff = -(two * *a + *a * *a);
            !(spec.alpha == T::zero() && coeff > T::zero())
        }
        _ => true,
    };
    let (lambda, beta, cc3_holds) = match asymptotics(spec) {
        Ok(a) => (Some(a.lambda), Some(a.beta), !a.violation),
        Err(_) => (None, None, false),
    };

    Ok(ConditionReport {
        c1_holds,
        gamma,
        gamma_approximate,
        c2_holds: c2_global && gamma.is_finite(),
        cc3_holds,
        d3_nonpositive,
        lambda,
        beta,
        sample_count: n_samples,
    })
}

/// Finds the offset that makes `0 <= phi(r) < 1` for `r` in `]0, epsilon]`.
///
/// Keeps the current offset when it already works, otherwise shifts `phi`
/// so that `phi(0) = 0`. Requires `phi` nondecreasing on the window.
pub fn normalize_on_window<T: Real>(spec: &PotentialSpec<T>, epsilon: T) -> Result<PotentialSpec<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::Normalization("window must have positive length".into()));
    }
    if !(spec.alpha < T::zero()) {
        return Err(Error::Normalization(format!(
            "the window ]0, {}] needs alpha < 0, got alpha = {}",
            epsilon, spec.alpha
        )));
    }
    let n = 257;
    let zs: Vec<T> = uniform(T::zero(), epsilon, n).collect();
    let mut vals = Vec::with_capacity(n);
    for &z in &zs {
        let e = spec.eval(z)?;
        if e.d1 < T::zero() {
            return Err(Error::Normalization(format!(
                "phi decreases at height {} inside the window",
                z
            )));
        }
        vals.push(e.phi);
    }
    let lo = vals[0];
    let hi = vals[n - 1];
    if lo >= T::zero() && hi < T::one() {
        return Ok(spec.clone());
    }
    if hi - lo >= T::one() {
        return Err(Error::Normalization(format!(
            "phi rises by {} over ]0, {}], no constant keeps it in [0, 1)",
            hi - lo,
            epsilon
        )));
    }
    let shift = -lo;
    Ok(spec.clone().with_offset(spec.offset + shift))
}
