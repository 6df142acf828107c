//! Univariate WCP priors: a two-sided distance family with a truncated
//! exponential on each side, the closed-form catalog, reparameterization
//! and inverse-transform sampling.

use crate::wasserstein::{ar1_sup, w2_ar1, w2_ar1_derivative};
use rand::Rng;
use std::sync::Arc;
use thiserror::Error;

pub type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PriorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// One side of a distance family: W on the open interval (lo, hi), which
/// grows as θ moves away from the base point, with supremum `c`.
#[derive(Clone)]
pub struct Side {
    pub lo: f64,
    pub hi: f64,
    pub w: Eval,
    pub dw: Option<Eval>,
    pub c: f64,
}

impl Side {
    pub fn new(lo: f64, hi: f64, w: impl Fn(f64) -> f64 + Send + Sync + 'static, c: f64) -> Self {
        Self { lo, hi, w: Arc::new(w), dw: None, c }
    }

    pub fn with_derivative(mut self, dw: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dw = Some(Arc::new(dw));
        self
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.lo && theta < self.hi
    }

    /// Map t ∈ (0, 1) onto the interval.
    pub fn map(&self, t: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + t * (self.hi - self.lo),
            (true, false) => self.lo + t / (1.0 - t),
            (false, true) => self.hi - (1.0 - t) / t,
            (false, false) => (t - 0.5) / (t * (1.0 - t)),
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        if let Some(d) = &self.dw {
            return d(theta);
        }
        let h = 1e-6 * (theta.abs() + 1.0);
        let a = if theta - h > self.lo { theta - h } else { theta };
        let b = if theta + h < self.hi { theta + h } else { theta };
        ((self.w)(b) - (self.w)(a)) / (b - a)
    }
}

/// A distance family around the base point θ₀ (which may be ±∞).
#[derive(Clone)]
pub struct DistanceFamily {
    pub theta0: f64,
    pub minus: Option<Side>,
    pub plus: Option<Side>,
}

fn trunc_factor(eta: f64, c: f64) -> f64 {
    if c.is_infinite() {
        1.0
    } else {
        -(-eta * c).exp_m1()
    }
}

#[derive(Clone)]
pub struct UnivariatePrior {
    pub family: DistanceFamily,
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub w_minus: f64,
    pub w_plus: f64,
}

const CHECK_POINTS: usize = 256;

fn check_side(side: &Side, increasing: bool, theta0: f64, label: &str) -> Result<(), PriorError> {
    if !(side.lo < side.hi) {
        return Err(PriorError::Domain(format!("{label} interval ({}, {}) is empty", side.lo, side.hi)));
    }
    if !(side.c > 0.0) {
        return Err(PriorError::Domain(format!("{label} supremum c = {} must be positive", side.c)));
    }
    let mut prev: Option<f64> = None;
    let mut mid = 0.0;
    for i in 0..CHECK_POINTS {
        let t = (i as f64 + 0.5) / CHECK_POINTS as f64;
        let theta = side.map(t);
        let w = (side.w)(theta);
        if !w.is_finite() || w < 0.0 {
            return Err(PriorError::Assumption(format!("{label}: W({theta}) = {w}")));
        }
        if w > side.c + 1e-9 {
            return Err(PriorError::Assumption(format!("{label}: W({theta}) = {w} exceeds c = {}", side.c)));
        }
        if let Some(p) = prev {
            let tol = 1e-12 * (1.0 + p.abs());
            if (increasing && w < p - tol) || (!increasing && w > p + tol) {
                return Err(PriorError::Assumption(format!("{label}: W is not monotone near theta = {theta}")));
            }
        }
        if i == CHECK_POINTS / 2 {
            mid = w;
        }
        prev = Some(w);
    }
    // W must vanish at the base point.
    let near = if theta0.is_finite() {
        let off = 1e-12 * theta0.abs().max(1.0);
        if increasing {
            theta0 + off
        } else {
            theta0 - off
        }
    } else {
        side.map(if increasing { 1e-12 } else { 1.0 - 1e-12 })
    };
    let w0 = (side.w)(near);
    if !(w0 < 1e-3 * mid.max(1.0)) {
        return Err(PriorError::Assumption(format!("{label}: W does not vanish at the base point (W = {w0})")));
    }
    Ok(())
}

/// Build the prior of a two-sided family with rates η₋ and η₊.
pub fn build_prior(family: DistanceFamily, eta_minus: f64, eta_plus: f64) -> Result<UnivariatePrior, PriorError> {
    if family.minus.is_none() && family.plus.is_none() {
        return Err(PriorError::Domain("family has no sides".into()));
    }
    if let Some(s) = &family.minus {
        if !(eta_minus > 0.0) {
            return Err(PriorError::Domain(format!("eta_minus = {eta_minus} must be positive")));
        }
        check_side(s, false, family.theta0, "minus side")?;
    }
    if let Some(s) = &family.plus {
        if !(eta_plus > 0.0) {
            return Err(PriorError::Domain(format!("eta_plus = {eta_plus} must be positive")));
        }
        check_side(s, true, family.theta0, "plus side")?;
    }
    Ok(UnivariatePrior::unchecked(family, eta_minus, eta_plus))
}

impl UnivariatePrior {
    /// Assemble without the grid checks; for callers that evaluate many rates
    /// on an already validated family.
    pub fn unchecked(family: DistanceFamily, eta_minus: f64, eta_plus: f64) -> Self {
        let a = family.minus.as_ref().map_or(0.0, |s| trunc_factor(eta_minus, s.c));
        let b = family.plus.as_ref().map_or(0.0, |s| trunc_factor(eta_plus, s.c));
        Self { family, eta_minus, eta_plus, w_minus: a / (a + b), w_plus: b / (a + b) }
    }

    /// Distance of θ to the base point, or None outside both sides.
    pub fn distance(&self, theta: f64) -> Option<f64> {
        self.sides().find(|s| s.0.contains(theta)).map(|s| (s.0.w)(theta))
    }

    /// CDF of W(Θ) under the prior.
    pub fn distance_cdf(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        self.sides()
            .map(|(side, eta, weight)| {
                if w >= side.c {
                    weight
                } else {
                    weight * -(-eta * w).exp_m1() / trunc_factor(eta, side.c)
                }
            })
            .sum()
    }

    fn sides(&self) -> impl Iterator<Item = (&Side, f64, f64)> {
        self.family
            .minus
            .iter()
            .map(|s| (s, self.eta_minus, self.w_minus))
            .chain(self.family.plus.iter().map(|s| (s, self.eta_plus, self.w_plus)))
    }

    pub fn density(&self, theta: f64) -> f64 {
        for (side, eta, weight) in self.sides() {
            if side.contains(theta) {
                let w = (side.w)(theta);
                return weight * eta * (-eta * w).exp() / trunc_factor(eta, side.c) * side.derivative(theta).abs();
            }
        }
        0.0
    }

    /// Support of the prior as the hull of both sides.
    pub fn domain(&self) -> (f64, f64) {
        let lo = self.sides().map(|s| s.0.lo).fold(f64::INFINITY, f64::min);
        let hi = self.sides().map(|s| s.0.hi).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// P(Θ ≤ θ).
    pub fn cdf(&self, theta: f64) -> f64 {
        let mut total = 0.0;
        if let Some(s) = &self.family.minus {
            let eta = self.eta_minus;
            total += if theta >= s.hi {
                self.w_minus
            } else if theta <= s.lo {
                0.0
            } else {
                let w = (s.w)(theta);
                let tail = if s.c.is_infinite() { (-eta * w).exp() } else { (-eta * w).exp() - (-eta * s.c).exp() };
                self.w_minus * tail / trunc_factor(eta, s.c)
            };
        }
        if let Some(s) = &self.family.plus {
            let eta = self.eta_plus;
            total += if theta >= s.hi {
                self.w_plus
            } else if theta <= s.lo {
                0.0
            } else {
                self.w_plus * -(-eta * (s.w)(theta)).exp_m1() / trunc_factor(eta, s.c)
            };
        }
        total
    }

    /// P(Θ > θ).
    pub fn prob_above(&self, theta: f64) -> f64 {
        1.0 - self.cdf(theta)
    }

    /// Draw `n` values by inverse transform on W.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>, PriorError> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let pick_minus = match (&self.family.minus, &self.family.plus) {
                (Some(_), Some(_)) => rng.random::<f64>() < self.w_minus,
                (Some(_), None) => true,
                _ => false,
            };
            let (side, eta) = if pick_minus {
                (self.family.minus.as_ref().unwrap(), self.eta_minus)
            } else {
                (self.family.plus.as_ref().unwrap(), self.eta_plus)
            };
            let u: f64 = rng.random();
            let w = -(-u * trunc_factor(eta, side.c)).ln_1p() / eta;
            out.push(invert_side(side, !pick_minus, w)?);
        }
        Ok(out)
    }
}

/// Solve W(θ) = w on one side by bisection in the mapped variable.
pub fn invert_side(side: &Side, increasing: bool, w: f64) -> Result<f64, PriorError> {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let wm = (side.w)(side.map(m));
        if (wm < w) == increasing {
            a = m;
        } else {
            b = m;
        }
    }
    let theta = side.map(0.5 * (a + b));
    let got = (side.w)(theta);
    if !((got - w).abs() <= 1e-6 * (1.0 + w)) {
        return Err(PriorError::Numerical(format!(
            "could not invert W = {w} on ({}, {}): reached theta = {theta} with W = {got}",
            side.lo, side.hi
        )));
    }
    Ok(theta)
}

/// Density in φ = g(θ) induced by a prior in θ: π(g⁻¹(φ)) / |g′(g⁻¹(φ))|.
pub struct Reparameterized<'a> {
    pub prior: &'a UnivariatePrior,
    pub g_inv: Eval,
    pub g_prime: Eval,
}

impl Reparameterized<'_> {
    pub fn density(&self, phi: f64) -> f64 {
        let theta = (self.g_inv)(phi);
        self.prior.density(theta) / (self.g_prime)(theta).abs()
    }
}

/// Change of variables φ = g(θ); fails if g′ vanishes on the check grid.
pub fn reparameterize(prior: &UnivariatePrior, g_inv: Eval, g_prime: Eval) -> Result<Reparameterized<'_>, PriorError> {
    for (side, _, _) in prior.sides() {
        for i in 0..CHECK_POINTS {
            let theta = side.map((i as f64 + 0.5) / CHECK_POINTS as f64);
            let d = g_prime(theta);
            if !(d.abs() > 0.0) || !d.is_finite() {
                return Err(PriorError::Domain(format!("g'({theta}) = {d}")));
            }
        }
    }
    Ok(Reparameterized { prior, g_inv, g_prime })
}

/// WCP₂ prior on a Gaussian precision τ, base model τ = ∞.
pub fn gaussian_precision_prior(eta: f64) -> Result<UnivariatePrior, PriorError> {
    let side = Side::new(0.0, f64::INFINITY, |t: f64| 1.0 / t.sqrt(), f64::INFINITY)
        .with_derivative(|t: f64| -0.5 * t.powf(-1.5));
    build_prior(DistanceFamily { theta0: f64::INFINITY, minus: Some(side), plus: None }, eta, eta)
}

/// ½ τ^{−3/2} η exp(−η τ^{−1/2}).
pub fn gumbel2_density(tau: f64, eta: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    0.5 * tau.powf(-1.5) * eta * (-eta / tau.sqrt()).exp()
}

/// WCP₂ prior on a Gaussian standard deviation: Exp(η).
pub fn gaussian_sd_prior(eta: f64) -> Result<UnivariatePrior, PriorError> {
    let side = Side::new(0.0, f64::INFINITY, |s| s, f64::INFINITY).with_derivative(|_| 1.0);
    build_prior(DistanceFamily { theta0: 0.0, minus: None, plus: Some(side) }, eta, eta)
}

/// WCP₂ prior on a Gaussian mean around 0 with separate rates per side.
pub fn gaussian_mean_prior(eta_minus: f64, eta_plus: f64) -> Result<UnivariatePrior, PriorError> {
    let minus = Side::new(f64::NEG_INFINITY, 0.0, |m: f64| -m, f64::INFINITY).with_derivative(|_| -1.0);
    let plus = Side::new(0.0, f64::INFINITY, |m| m, f64::INFINITY).with_derivative(|_| 1.0);
    build_prior(DistanceFamily { theta0: 0.0, minus: Some(minus), plus: Some(plus) }, eta_minus, eta_plus)
}

/// Distance family of the stationary AR(1) coefficient, base model φ = 1.
pub fn ar1_family(n: usize, sigma: f64) -> Result<DistanceFamily, PriorError> {
    w2_ar1(0.0, n, sigma).map_err(|e| PriorError::Domain(e.to_string()))?;
    let side = Side::new(-1.0, 1.0, move |phi| w2_ar1(phi.clamp(-1.0, 1.0), n, sigma).unwrap_or(f64::NAN), ar1_sup(n, sigma))
        .with_derivative(move |phi| w2_ar1_derivative(phi.clamp(-1.0, 1.0), n, sigma).unwrap_or(f64::NAN));
    Ok(DistanceFamily { theta0: 1.0, minus: Some(side), plus: None })
}

pub fn ar1_phi_prior(eta: f64, n: usize, sigma: f64) -> Result<UnivariatePrior, PriorError> {
    build_prior(ar1_family(n, sigma)?, eta, eta)
}

pub fn gpd_tail_family() -> DistanceFamily {
    let side = Side::new(0.0, 1.0, |xi: f64| xi / (1.0 - xi), f64::INFINITY).with_derivative(|xi: f64| 1.0 / ((1.0 - xi) * (1.0 - xi)));
    DistanceFamily { theta0: 0.0, minus: None, plus: Some(side) }
}

/// WCP₁ prior on the GPD tail index ξ ∈ (0, 1), base model ξ = 0.
pub fn gpd_tail_prior(eta: f64) -> Result<UnivariatePrior, PriorError> {
    build_prior(gpd_tail_family(), eta, eta)
}

/// η/(1 − ξ)² exp(−η ξ/(1 − ξ)).
pub fn gpd_tail_density(xi: f64, eta: f64) -> f64 {
    if !(0.0..1.0).contains(&xi) {
        return 0.0;
    }
    eta / ((1.0 - xi) * (1.0 - xi)) * (-eta * xi / (1.0 - xi)).exp()
}
