//! Calibration of the rate η to a tail-probability target, normalization
//! audits and Kolmogorov–Smirnov checks of the distance pushforward.

use crate::quad::{integrate, DeOptions, Interval, QuadError};
use crate::univariate::{DistanceFamily, UnivariatePrior};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("target probability {alpha} unreachable: eta in [{eta_lo:e}, {eta_hi:e}] gives probabilities between {p_lo} and {p_hi}")]
    Infeasible { alpha: f64, eta_lo: f64, eta_hi: f64, p_lo: f64, p_hi: f64 },
    #[error("calibration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("integral diverged: {0}")]
    Divergent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

/// P(θ > U) = α (or P(θ < U) = α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationTarget {
    pub u: f64,
    pub alpha: f64,
    pub direction: Direction,
}

/// Which law of W the tail probability is computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailLaw {
    /// Exponential truncated to [0, c]; the prior's own law.
    Truncated,
    /// Plain Exp(η), ignoring a finite supremum.
    Untruncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub eta: f64,
    pub probability: f64,
    pub residual: f64,
}

fn with_law(family: &DistanceFamily, law: TailLaw) -> DistanceFamily {
    let mut f = family.clone();
    if law == TailLaw::Untruncated {
        for side in [&mut f.minus, &mut f.plus].into_iter().flatten() {
            side.c = f64::INFINITY;
        }
    }
    f
}

/// Tail probability of the target event at rate η (same rate on both sides).
pub fn tail_probability(family: &DistanceFamily, target: &CalibrationTarget, eta: f64, law: TailLaw) -> f64 {
    let prior = UnivariatePrior::unchecked(with_law(family, law), eta, eta);
    match target.direction {
        Direction::Above => prior.prob_above(target.u),
        Direction::Below => prior.cdf(target.u),
    }
}

pub const ETA_BRACKET: (f64, f64) = (1e-6, 1e6);

/// Bisection in log η until the tail probability matches α to 1e-6.
pub fn calibrate_eta(family: &DistanceFamily, target: &CalibrationTarget, law: TailLaw) -> Result<Calibration, ValidationError> {
    if !(target.alpha > 0.0 && target.alpha < 1.0) {
        return Err(ValidationError::Domain(format!("alpha = {} outside (0, 1)", target.alpha)));
    }
    let inside = [&family.minus, &family.plus].into_iter().flatten().any(|s| s.contains(target.u));
    if !inside {
        return Err(ValidationError::Domain(format!("U = {} outside the family's domain", target.u)));
    }
    let f = |ln_eta: f64| tail_probability(family, target, ln_eta.exp(), law) - target.alpha;
    let (mut a, mut b) = (ETA_BRACKET.0.ln(), ETA_BRACKET.1.ln());
    let (fa, fb) = (f(a), f(b));
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(ValidationError::Infeasible {
            alpha: target.alpha,
            eta_lo: ETA_BRACKET.0,
            eta_hi: ETA_BRACKET.1,
            p_lo: fa + target.alpha,
            p_hi: fb + target.alpha,
        });
    }
    let increasing = fb > fa;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) < 0.0) == increasing {
            a = m;
        } else {
            b = m;
        }
    }
    let eta = (0.5 * (a + b)).exp();
    let probability = tail_probability(family, target, eta, law);
    let residual = (probability - target.alpha).abs();
    if residual >= 1e-6 {
        return Err(ValidationError::NoConvergence { residual });
    }
    Ok(Calibration { eta, probability, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub integral: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub method: String,
}

/// ∫ density over (lo, hi) by double-exponential quadrature; infinite ends allowed.
pub fn normalization_audit_1d<F: Fn(f64) -> f64>(density: F, lo: f64, hi: f64, tolerance: f64) -> Result<AuditReport, ValidationError> {
    let interval = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => Interval::Finite(lo, hi),
        (true, false) => Interval::Upper(lo),
        (false, true) => Interval::Lower(hi),
        (false, false) => Interval::Whole,
    };
    // Stopping tolerance well below the audit tolerance, but loose enough for densities
    // whose own evaluation carries ~1e-11 relative noise.
    let rel_tol = (tolerance * 1e-4).clamp(1e-13, 1e-9);
    let opts = DeOptions { rel_tol, abs_tol: 1e-15, min_level: 3, max_level: 14 };
    let integral = integrate(&density, interval, opts).map_err(|e| ValidationError::Divergent(e.to_string()))?;
    Ok(AuditReport { integral, tolerance, pass: (integral - 1.0).abs() <= tolerance, method: "tanh-sinh".into() })
}

/// Nested double-exponential quadrature over a product of intervals.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(density: F, x: Interval, y: Interval, opts: DeOptions) -> Result<f64, QuadError> {
    let inner_err = std::cell::Cell::new(None);
    let outer = integrate(
        |xv| match integrate(|yv| density(xv, yv), y, opts) {
            Ok(v) => v,
            Err(e) => {
                inner_err.set(Some(e));
                0.0
            }
        },
        x,
        opts,
    )?;
    match inner_err.take() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

pub fn normalization_audit_2d<F: Fn(f64, f64) -> f64>(density: F, x: Interval, y: Interval, tolerance: f64) -> Result<AuditReport, ValidationError> {
    let opts = DeOptions { rel_tol: 1e-10, abs_tol: 1e-13, min_level: 3, max_level: 10 };
    let integral = integrate_2d(density, x, y, opts).map_err(|e| ValidationError::Divergent(e.to_string()))?;
    Ok(AuditReport { integral, tolerance, pass: (integral - 1.0).abs() <= tolerance, method: "nested tanh-sinh".into() })
}

/// Stratified Monte Carlo over a chart of the unit square.
///
/// `chart(u, v)` returns a point and the Jacobian |∂(x, y)/∂(u, v)|; one
/// jittered sample is drawn in each of `n_side²` cells.
pub fn normalization_audit_mc<F, C, R>(density: F, chart: C, n_side: usize, rng: &mut R, tolerance: f64) -> AuditReport
where
    F: Fn(f64, f64) -> f64,
    C: Fn(f64, f64) -> ([f64; 2], f64),
    R: Rng + ?Sized,
{
    let mut sum = 0.0;
    let h = 1.0 / n_side as f64;
    for i in 0..n_side {
        for j in 0..n_side {
            let u = (i as f64 + rng.random::<f64>()) * h;
            let v = (j as f64 + rng.random::<f64>()) * h;
            let (p, jac) = chart(u, v);
            let d = density(p[0], p[1]);
            if d > 0.0 {
                sum += d * jac;
            }
        }
    }
    let integral = sum / (n_side * n_side) as f64;
    AuditReport {
        integral,
        tolerance,
        pass: (integral - 1.0).abs() <= tolerance,
        method: format!("stratified Monte Carlo ({} points)", n_side * n_side),
    }
}

/// Two-sided Kolmogorov–Smirnov statistic of a sample against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub enum KsOutcome {
    Statistic(f64),
    Skipped(String),
}

pub const KS_MIN_SAMPLES: usize = 100;

/// KS statistic of W(θ) for θ drawn from the prior, against the truncated
/// exponential law of W.
pub fn pushforward_check<R: Rng + ?Sized>(prior: &UnivariatePrior, n: usize, rng: &mut R) -> Result<KsOutcome, ValidationError> {
    if n < KS_MIN_SAMPLES {
        return Ok(KsOutcome::Skipped(format!("{n} samples is too few for a KS check (need {KS_MIN_SAMPLES})")));
    }
    let thetas = prior.sample(rng, n).map_err(|e| ValidationError::Domain(e.to_string()))?;
    let ws: Vec<f64> = thetas.iter().map(|&t| prior.distance(t).unwrap_or(f64::NAN)).collect();
    Ok(KsOutcome::Statistic(ks_statistic(&ws, |w| prior.distance_cdf(w))))
}
