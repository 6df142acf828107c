//! Wasserstein-p distances: 1D quantile and CDF integrals, the Gaussian
//! trace formula, Dirac shortcuts and model-specific closed forms.

use crate::quad::{trapezoid, QuadError};
use crate::special::{norm_cdf, norm_pdf, norm_quantile, norm_sf, student_t_cdf, student_t_quantile};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistanceError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergent integral: non-finite quantile near z = {at}")]
    Divergent { at: f64 },
    #[error("covariance is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NonPsd { eigenvalue: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported measure: {0}")]
    Unsupported(String),
    #[error("distance is infinite: {0}")]
    Infinite(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A probability measure on the real line, described through its quantile
/// function and optionally its CDF and absolute moments.
pub trait Measure1D: Send + Sync {
    fn quantile(&self, u: f64) -> f64;

    /// Quantile at level 1 − s; override when the upper tail needs precision.
    fn upper_quantile(&self, s: f64) -> f64 {
        self.quantile(1.0 - s)
    }

    fn cdf(&self, _x: f64) -> Option<f64> {
        None
    }

    fn sf(&self, x: f64) -> Option<f64> {
        self.cdf(x).map(|c| 1.0 - c)
    }

    /// E|X − s|^p when available in closed form.
    fn abs_moment(&self, _s: f64, _p: f64) -> Option<f64> {
        None
    }

    fn label(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mean: f64,
    pub sd: f64,
}

impl Normal {
    pub fn standard() -> Self {
        Self { mean: 0.0, sd: 1.0 }
    }
}

impl Measure1D for Normal {
    fn quantile(&self, u: f64) -> f64 {
        self.mean + self.sd * norm_quantile(u)
    }
    fn upper_quantile(&self, s: f64) -> f64 {
        self.mean - self.sd * norm_quantile(s)
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        Some(norm_cdf((x - self.mean) / self.sd))
    }
    fn sf(&self, x: f64) -> Option<f64> {
        Some(norm_sf((x - self.mean) / self.sd))
    }
    fn abs_moment(&self, s: f64, p: f64) -> Option<f64> {
        (p == 2.0).then(|| (self.mean - s).powi(2) + self.sd * self.sd)
    }
    fn label(&self) -> String {
        format!("N({}, {}^2)", self.mean, self.sd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub rate: f64,
}

impl Measure1D for Exponential {
    fn quantile(&self, u: f64) -> f64 {
        -(-u).ln_1p() / self.rate
    }
    fn upper_quantile(&self, s: f64) -> f64 {
        -s.ln() / self.rate
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        Some(if x <= 0.0 { 0.0 } else { -(-self.rate * x).exp_m1() })
    }
    fn sf(&self, x: f64) -> Option<f64> {
        Some(if x <= 0.0 { 1.0 } else { (-self.rate * x).exp() })
    }
    fn abs_moment(&self, s: f64, p: f64) -> Option<f64> {
        if s != 0.0 {
            return None;
        }
        match p {
            1.0 => Some(1.0 / self.rate),
            2.0 => Some(2.0 / (self.rate * self.rate)),
            _ => None,
        }
    }
    fn label(&self) -> String {
        format!("Exp({})", self.rate)
    }
}

/// Generalized Pareto with shape ξ ≥ 0 and scale σ; ξ = 0 is Exp(1/σ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gpd {
    pub xi: f64,
    pub sigma: f64,
}

impl Gpd {
    fn from_tail(&self, s: f64) -> f64 {
        if self.xi == 0.0 {
            -self.sigma * s.ln()
        } else {
            self.sigma * ((-self.xi * s.ln()).exp_m1()) / self.xi
        }
    }
}

impl Measure1D for Gpd {
    fn quantile(&self, u: f64) -> f64 {
        if self.xi == 0.0 {
            -self.sigma * (-u).ln_1p()
        } else {
            self.sigma * ((-self.xi * (-u).ln_1p()).exp_m1()) / self.xi
        }
    }
    fn upper_quantile(&self, s: f64) -> f64 {
        self.from_tail(s)
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        self.sf(x).map(|s| 1.0 - s)
    }
    fn sf(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return Some(1.0);
        }
        Some(if self.xi == 0.0 {
            (-x / self.sigma).exp()
        } else {
            (-(self.xi * x / self.sigma).ln_1p() / self.xi).exp()
        })
    }
    fn label(&self) -> String {
        format!("GPD(xi={}, sigma={})", self.xi, self.sigma)
    }
}

/// Student t with ν degrees of freedom; ν = ∞ is the standard normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentT {
    pub nu: f64,
}

impl Measure1D for StudentT {
    fn quantile(&self, u: f64) -> f64 {
        student_t_quantile(u, self.nu)
    }
    fn upper_quantile(&self, s: f64) -> f64 {
        -student_t_quantile(s, self.nu)
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        Some(student_t_cdf(x, self.nu))
    }
    fn sf(&self, x: f64) -> Option<f64> {
        Some(student_t_cdf(-x, self.nu))
    }
    fn label(&self) -> String {
        format!("t({})", self.nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl Measure1D for Uniform {
    fn quantile(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }
    fn upper_quantile(&self, s: f64) -> f64 {
        self.hi - s * (self.hi - self.lo)
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        Some(((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0))
    }
    fn sf(&self, x: f64) -> Option<f64> {
        Some(((self.hi - x) / (self.hi - self.lo)).clamp(0.0, 1.0))
    }
    fn label(&self) -> String {
        format!("U[{}, {}]", self.lo, self.hi)
    }
}

/// Dirac mass on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub at: f64,
}

impl Measure1D for PointMass {
    fn quantile(&self, _u: f64) -> f64 {
        self.at
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        Some(if x < self.at { 0.0 } else { 1.0 })
    }
    fn abs_moment(&self, s: f64, p: f64) -> Option<f64> {
        Some((self.at - s).abs().powf(p))
    }
    fn label(&self) -> String {
        format!("delta({})", self.at)
    }
}

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A measure given by user-supplied closures.
pub struct FnMeasure {
    pub quantile: RealFn,
    pub cdf: Option<RealFn>,
    pub label: String,
}

impl Measure1D for FnMeasure {
    fn quantile(&self, u: f64) -> f64 {
        (self.quantile)(u)
    }
    fn cdf(&self, x: f64) -> Option<f64> {
        self.cdf.as_ref().map(|f| f(x))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailMode {
    /// Integrate only over [q, 1 − q].
    Truncate,
    /// Continue past the cutoff until the integrand is negligible.
    Extend,
}

/// Settings for the quantile and CDF integrals.
///
/// The quantile integral is a composite trapezoid rule on [q, 1 − q] taken in
/// the probit variable z = Φ⁻¹(t), which keeps the panel layout smooth near
/// the diverging ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub q: f64,
    pub tol: f64,
    pub tails: TailMode,
    pub max_halvings: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { q: 1e-7, tol: 1e-8, tails: TailMode::Extend, max_halvings: 16 }
    }
}

const Z_LIMIT: f64 = 37.5;

fn extend_range<F: Fn(f64) -> f64>(g: &F, start: f64, dir: f64, negligible: f64) -> f64 {
    let mut z = start;
    while z.abs() < Z_LIMIT {
        let v = g(z);
        if v.is_finite() && v.abs() * (1.0 + z.abs()) < negligible {
            break;
        }
        z = (z + 0.5 * dir).clamp(-Z_LIMIT, Z_LIMIT);
    }
    z
}

/// (∫₀¹ |F_μ⁻¹(t) − F_ν⁻¹(t)|^p dt)^{1/p}.
pub fn wp_quantile_1d(mu: &dyn Measure1D, nu: &dyn Measure1D, p: f64, quad: &QuadConfig) -> Result<f64, DistanceError> {
    if !(p >= 1.0) {
        return Err(DistanceError::Domain(format!("order p = {p} < 1")));
    }
    let integrand = |z: f64| -> f64 {
        let (a, b) = if z <= 0.0 {
            let u = norm_cdf(z);
            (mu.quantile(u), nu.quantile(u))
        } else {
            let s = norm_sf(z);
            (mu.upper_quantile(s), nu.upper_quantile(s))
        };
        let d = (a - b).abs();
        if d == 0.0 {
            0.0
        } else {
            d.powf(p) * norm_pdf(z)
        }
    };
    let zq = norm_quantile(quad.q).min(-1e-3);
    let (mut za, mut zb) = (zq, -zq);
    for i in 0..=64 {
        let z = za + (zb - za) * i as f64 / 64.0;
        if !integrand(z).is_finite() {
            return Err(DistanceError::Divergent { at: z });
        }
    }
    if quad.tails == TailMode::Extend {
        let negligible = quad.tol * 1e-3;
        za = extend_range(&integrand, za, -1.0, negligible);
        zb = extend_range(&integrand, zb, 1.0, negligible);
    }
    let panels = (((zb - za) / 0.25).ceil() as usize).max(8);
    let value = trapezoid(
        |z| {
            let v = integrand(z);
            if v.is_finite() {
                v
            } else {
                f64::NAN
            }
        },
        za,
        zb,
        panels,
        quad.tol,
        quad.max_halvings,
    )
    .map_err(|e| match e {
        QuadError::NonFinite { at } => DistanceError::Divergent { at },
        other => DistanceError::Quad(other),
    })?;
    Ok(value.max(0.0).powf(1.0 / p))
}

/// ∫ |F_μ(x) − F_ν(x)| dx.
pub fn w1_cdf_1d(mu: &dyn Measure1D, nu: &dyn Measure1D, quad: &QuadConfig) -> Result<f64, DistanceError> {
    for m in [mu, nu] {
        if m.cdf(0.0).is_none() {
            return Err(DistanceError::Unsupported(format!("{} has no CDF", m.label())));
        }
    }
    let med = 0.5 * (mu.quantile(0.5) + nu.quantile(0.5));
    let spread = [mu, nu]
        .iter()
        .map(|m| m.quantile(0.75) - m.quantile(0.25))
        .fold(0.0, f64::max)
        .max(1e-6);
    let x_of = |y: f64| med + spread * y.sinh();
    let integrand = |y: f64| -> f64 {
        let x = x_of(y);
        let d = if x <= med {
            (mu.cdf(x).unwrap() - nu.cdf(x).unwrap()).abs()
        } else {
            (mu.sf(x).unwrap() - nu.sf(x).unwrap()).abs()
        };
        d * spread * y.cosh()
    };
    let negligible = quad.tol * 1e-3;
    let ya = extend_range(&integrand, -2.0, -1.0, negligible);
    let yb = extend_range(&integrand, 2.0, 1.0, negligible);
    let panels = (((yb - ya) / 0.25).ceil() as usize).max(8);
    Ok(trapezoid(integrand, ya, yb, panels, quad.tol, quad.max_halvings.max(20))?)
}

/// Gaussian measure on ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianMeasure {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self, DistanceError> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(DistanceError::DimensionMismatch(d, cov.nrows()));
        }
        let asym = (&cov - cov.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(DistanceError::Domain(format!("covariance asymmetric by {asym:e}")));
        }
        Ok(Self { mean: DVector::from_vec(mean), cov })
    }

    /// Degenerate Gaussian (zero covariance), i.e. a Dirac mass.
    pub fn dirac(point: Vec<f64>) -> Self {
        let d = point.len();
        Self { mean: DVector::from_vec(point), cov: DMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Dirac mass in ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMeasure {
    pub support_point: Vec<f64>,
}

fn psd_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>, DistanceError> {
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.amax().max(1.0);
    // Eigenvalues at rounding level are zeros of a singular matrix.
    let floor = 64.0 * f64::EPSILON * eig.eigenvalues.amax() * a.nrows() as f64;
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -1e-8 * scale {
            return Err(DistanceError::NonPsd { eigenvalue: *v });
        }
        *v = if *v <= floor { 0.0 } else { v.sqrt() };
    }
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose())
}

/// W₂ between Gaussians via the trace formula.
pub fn w2_gaussian(mu: &GaussianMeasure, nu: &GaussianMeasure) -> Result<f64, DistanceError> {
    if mu.dim() != nu.dim() {
        return Err(DistanceError::DimensionMismatch(mu.dim(), nu.dim()));
    }
    let root_mu = psd_sqrt(&mu.cov)?;
    psd_sqrt(&nu.cov)?;
    if mu == nu {
        return Ok(0.0);
    }
    let dm = (&mu.mean - &nu.mean).norm_squared();
    // tr(M^{1/2}) is the sum of square roots of the eigenvalues of M.
    let m = &root_mu * &nu.cov * &root_mu;
    let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5).eigenvalues;
    let floor = 64.0 * f64::EPSILON * eig.amax() * m.nrows() as f64;
    let cross: f64 = eig.iter().map(|&v| if v <= floor { 0.0 } else { v.sqrt() }).sum();
    let scale = dm + mu.cov.trace() + nu.cov.trace();
    let w2 = scale - 2.0 * cross;
    if w2 <= 1e-13 * scale {
        return Ok(0.0);
    }
    Ok(w2.sqrt())
}

/// W_p(δ_s, μ) = (E|X − s|^p)^{1/p} for a 1D measure.
pub fn wp_dirac(s: f64, mu: &dyn Measure1D, p: f64, quad: &QuadConfig) -> Result<f64, DistanceError> {
    if !(p >= 1.0) {
        return Err(DistanceError::Domain(format!("order p = {p} < 1")));
    }
    match mu.abs_moment(s, p) {
        Some(m) if m.is_finite() => Ok(m.powf(1.0 / p)),
        Some(_) => Err(DistanceError::Infinite(format!("E|X - {s}|^{p} diverges"))),
        None => wp_quantile_1d(&PointMass { at: s }, mu, p, quad),
    }
}

/// W₂(δ_s, N(m, Σ)) = (‖m − s‖² + tr Σ)^{1/2}.
pub fn w2_dirac_gaussian(s: &DiracMeasure, mu: &GaussianMeasure) -> Result<f64, DistanceError> {
    if s.support_point.len() != mu.dim() {
        return Err(DistanceError::DimensionMismatch(s.support_point.len(), mu.dim()));
    }
    let d2: f64 = s.support_point.iter().zip(mu.mean.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    Ok((d2 + mu.cov.trace()).sqrt())
}

fn ar1_check(phi: f64, n: usize, sigma: f64) -> Result<(), DistanceError> {
    if n < 2 {
        return Err(DistanceError::Domain(format!("AR(1) length n = {n} < 2")));
    }
    if !(sigma > 0.0) {
        return Err(DistanceError::Domain(format!("sigma = {sigma} must be positive")));
    }
    if !(-1.0..=1.0).contains(&phi) {
        return Err(DistanceError::Domain(format!("phi = {phi} outside [-1, 1]")));
    }
    Ok(())
}

/// Sum of all entries of the unit-variance AR(1) correlation matrix.
fn ar1_total_correlation(phi: f64, n: usize) -> f64 {
    let nf = n as f64;
    if phi >= 0.5 {
        nf * nf - ar1_gap(phi, n)
    } else {
        let f2 = nf * (1.0 - phi * phi) - 2.0 * phi * (1.0 - phi.powi(n as i32));
        f2 / ((1.0 - phi) * (1.0 - phi))
    }
}

/// n² − Σ_{ij} φ^{|i−j|}, summed without cancellation for φ near 1.
fn ar1_gap(phi: f64, n: usize) -> f64 {
    let ln_phi = phi.ln();
    let nf = n as f64;
    2.0 * (1..n).map(|k| (nf - k as f64) * -(k as f64 * ln_phi).exp_m1()).sum::<f64>()
}

/// W₂ between the stationary AR(1) law of length n (marginal sd σ) and the
/// fully correlated base model φ = 1.
pub fn w2_ar1(phi: f64, n: usize, sigma: f64) -> Result<f64, DistanceError> {
    ar1_check(phi, n, sigma)?;
    if phi == 1.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let gap = if phi >= 0.5 {
        let d = ar1_gap(phi, n);
        d / (nf + (nf * nf - d).max(0.0).sqrt())
    } else {
        let f2 = nf * (1.0 - phi * phi) - 2.0 * phi * (1.0 - phi.powi(n as i32));
        nf - f2.max(0.0).sqrt() / (1.0 - phi)
    };
    Ok(sigma * (2.0 * gap.max(0.0)).sqrt())
}

/// dW/dφ for [`w2_ar1`]; tends to −∞ as φ → 1.
pub fn w2_ar1_derivative(phi: f64, n: usize, sigma: f64) -> Result<f64, DistanceError> {
    ar1_check(phi, n, sigma)?;
    if phi == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let nf = n as f64;
    let ds: f64 = 2.0 * (1..n).map(|k| (nf - k as f64) * k as f64 * phi.powi(k as i32 - 1)).sum::<f64>();
    let s = ar1_total_correlation(phi, n);
    let w = w2_ar1(phi, n, sigma)?;
    Ok(-sigma * sigma * ds / (2.0 * s.sqrt() * w))
}

/// Supremum of [`w2_ar1`], attained at φ = −1.
pub fn ar1_sup(n: usize, sigma: f64) -> f64 {
    let parity = 1.0 - (-1f64).powi(n as i32);
    sigma * (2.0 * n as f64 - 2f64.sqrt() * parity.sqrt()).sqrt()
}

/// W₁ between GPD(ξ, 1) and Exp(1): ξ/(1 − ξ).
pub fn w1_gpd_tail(xi: f64) -> Result<f64, DistanceError> {
    if !(0.0..1.0).contains(&xi) {
        return Err(DistanceError::Domain(format!("xi = {xi} outside [0, 1)")));
    }
    Ok(xi / (1.0 - xi))
}

/// W₂ between the Student t with ν = 1/ξ and the standard normal.
pub fn w2_t_distribution(xi: f64, quad: &QuadConfig) -> Result<f64, DistanceError> {
    if xi < 0.0 || xi.is_nan() {
        return Err(DistanceError::Domain(format!("xi = {xi} < 0")));
    }
    if xi >= 0.5 {
        return Err(DistanceError::Infinite(format!("t with nu = {} has no finite variance", 1.0 / xi)));
    }
    if xi == 0.0 {
        return Ok(0.0);
    }
    wp_quantile_1d(&StudentT { nu: 1.0 / xi }, &Normal::standard(), 2.0, quad)
}
