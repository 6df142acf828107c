//! Multivariate WCP priors: exponential law on W, uniform law on each level
//! set. Bivariate construction from level curves that are graphs, changes of
//! variables onto conic regions, the generic n = 3 surface construction and
//! two-step products.

use crate::quad::{integrate, DeOptions, Interval, QuadError};
use crate::univariate::{build_prior, gaussian_mean_prior, gaussian_sd_prior, gpd_tail_density, DistanceFamily, Side, UnivariatePrior};
use nalgebra::{Matrix3, Matrix3x2};
use rand::Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("step one of the two-step prior is identically zero; derive the other parameter first")]
    DegenerateOrder,
    #[error(transparent)]
    Quad(#[from] QuadError),
}

pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A density on the plane.
pub trait Density2D: Send + Sync {
    fn density(&self, x: f64, y: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64 + Send + Sync> Density2D for F {
    fn density(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

fn trunc_factor(eta: f64, c: f64) -> f64 {
    if c.is_infinite() {
        1.0
    } else {
        -(-eta * c).exp_m1()
    }
}

/// ηe^{−ηr}/(πr) with r = (m² + σ²)^{1/2}, on ℝ × (0, ∞).
pub fn gaussian_2d_density(m: f64, sigma: f64, eta: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let r = m.hypot(sigma);
    eta * (-eta * r).exp() / (PI * r)
}

/// η/(1 − ξ) · exp(−ησ/(1 − ξ)), on (0, ∞) × [0, 1).
pub fn gpd_2d_density(sigma: f64, xi: f64, eta: f64) -> f64 {
    if sigma <= 0.0 || !(0.0..1.0).contains(&xi) {
        return 0.0;
    }
    eta / (1.0 - xi) * (-eta * sigma / (1.0 - xi)).exp()
}

/// ηe^{−ηr}/(πr) with r = (σ₁² + σ₂²)^{1/2}, on σ₁, σ₂ > 0, ρ ∈ (−1, 1).
pub fn gaussian_cov_3d_density(s1: f64, s2: f64, rho: f64, eta: f64) -> f64 {
    if s1 <= 0.0 || s2 <= 0.0 || !(-1.0..=1.0).contains(&rho) {
        return 0.0;
    }
    let r = s1.hypot(s2);
    eta * (-eta * r).exp() / (PI * r)
}

/// Two-step Gaussian prior ½η₁η₂ exp(−η₁|m| − η₂σ).
pub fn gaussian_two_step_density(m: f64, sigma: f64, eta1: f64, eta2: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    0.5 * eta1 * eta2 * (-eta1 * m.abs() - eta2 * sigma).exp()
}

/// Two-step GPD prior η₁η₂ exp(−η₁σ − η₂ξ/(1 − ξ))/(1 − ξ)², σ derived first.
pub fn gpd_two_step_density(sigma: f64, xi: f64, eta1: f64, eta2: f64) -> f64 {
    if sigma <= 0.0 || !(0.0..1.0).contains(&xi) {
        return 0.0;
    }
    eta1 * eta2 * (-eta1 * sigma - eta2 * xi / (1.0 - xi)).exp() / ((1.0 - xi) * (1.0 - xi))
}

/// A point on the graph variable's range, with its distances to both ends
/// computed without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub x: f64,
    pub from_lo: f64,
    pub from_hi: f64,
}

/// Level curves S_w written as graphs b = f(a; w) for a ∈ range(w).
///
/// With `swapped` the graph variable a is θ₂ and b is θ₁.
#[derive(Clone)]
pub struct LevelCurveFamily {
    pub graph: Fn2,
    pub graph_dx: Arc<dyn Fn(CurvePoint, f64) -> f64 + Send + Sync>,
    pub range: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
    pub swapped: bool,
}

/// Distance to the base model on a planar parameter domain.
#[derive(Clone)]
pub struct DistanceMap2D {
    pub w: Fn2,
    pub c: f64,
}

/// Density of the form |det ∂(W, u)/∂θ| · ηe^{−ηW}/(1 − e^{−ηc}) / l(W), for
/// any coordinate u along the level curves with total length l.
#[derive(Clone)]
pub struct LevelCurvePrior {
    pub distance: DistanceMap2D,
    pub u: Fn2,
    pub length: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub eta: f64,
    pub step: f64,
}

impl LevelCurvePrior {
    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let h = self.step;
        let d = |f: &Fn2| [(f(x + h, y) - f(x - h, y)) / (2.0 * h), (f(x, y + h) - f(x, y - h)) / (2.0 * h)];
        [d(&self.distance.w), d(&self.u)]
    }
}

impl Density2D for LevelCurvePrior {
    fn density(&self, x: f64, y: f64) -> f64 {
        let w = (self.distance.w)(x, y);
        if !w.is_finite() || w <= 0.0 {
            return 0.0;
        }
        let j = self.jacobian(x, y);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        det.abs() * self.eta * (-self.eta * w).exp() / trunc_factor(self.eta, self.distance.c) / (self.length)(w)
    }
}

fn arc_opts() -> DeOptions {
    DeOptions { rel_tol: 1e-14, abs_tol: 1e-15, min_level: 4, max_level: 14 }
}

/// Partial arc length from the start of the curve to a, and the total length.
///
/// Integrates in s with x = mid − half·cos s, which absorbs inverse square
/// root singularities of the slope at both ends.
pub fn arc_lengths(curves: &LevelCurveFamily, a: f64, w: f64) -> Result<(f64, f64), QuadError> {
    let (lo, hi) = (curves.range)(w);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let g = |s: f64| {
        let (sh, ch) = (0.5 * s).sin_cos();
        let p = CurvePoint { x: mid - half * s.cos(), from_lo: 2.0 * half * sh * sh, from_hi: 2.0 * half * ch * ch };
        let jac = half * s.sin();
        let slope = (curves.graph_dx)(p, w) * jac;
        jac.hypot(slope)
    };
    let total = integrate(g, Interval::Finite(0.0, PI), arc_opts())?;
    let a = a.clamp(lo, hi);
    let s_a = ((mid - a) / half).clamp(-1.0, 1.0).acos();
    let part = if s_a <= 0.0 { 0.0 } else { integrate(g, Interval::Finite(0.0, s_a), arc_opts())? };
    Ok((part, total))
}

/// Curves must lie on their level sets and W must have a nonvanishing
/// gradient there; both checked on sampled (a, w).
pub fn check_curves(distance: &DistanceMap2D, curves: &LevelCurveFamily) -> Result<(), MultiError> {
    let ws = [0.05, 0.2, 0.5, 1.0, 2.0, 5.0];
    for &w in ws.iter().filter(|&&w| w < distance.c) {
        let (lo, hi) = (curves.range)(w);
        if !(lo < hi) {
            return Err(MultiError::Domain(format!("empty curve range at w = {w}")));
        }
        for i in 1..16 {
            let a = lo + (hi - lo) * i as f64 / 16.0;
            let b = (curves.graph)(a, w);
            let (x, y) = if curves.swapped { (b, a) } else { (a, b) };
            let wv = (distance.w)(x, y);
            if !((wv - w).abs() <= 1e-8 * w.max(1.0)) {
                return Err(MultiError::Assumption(format!("curve point ({x}, {y}) has W = {wv}, expected {w}")));
            }
            let h = 1e-6 * (1.0 + x.abs().max(y.abs()));
            let gx = ((distance.w)(x + h, y) - (distance.w)(x - h, y)) / (2.0 * h);
            let gy = ((distance.w)(x, y + h) - (distance.w)(x, y - h)) / (2.0 * h);
            if !(gx.hypot(gy) > 1e-10) {
                return Err(MultiError::Assumption(format!("gradient of W vanishes at ({x}, {y})")));
            }
        }
    }
    Ok(())
}

/// Bivariate prior from level curves that are graphs of functions.
pub fn recipe1_bivariate(distance: DistanceMap2D, curves: LevelCurveFamily, eta: f64) -> Result<LevelCurvePrior, MultiError> {
    if !(eta > 0.0) {
        return Err(MultiError::Domain(format!("eta = {eta} must be positive")));
    }
    check_curves(&distance, &curves)?;
    let cu = curves.clone();
    let dw = distance.w.clone();
    let u: Fn2 = Arc::new(move |x, y| {
        let a = if cu.swapped { y } else { x };
        match arc_lengths(&cu, a, dw(x, y)) {
            Ok((part, _)) => part,
            Err(_) => f64::NAN,
        }
    });
    let cl = curves.clone();
    let length = Arc::new(move |w: f64| arc_lengths(&cl, (cl.range)(w).0, w).map(|(_, t)| t).unwrap_or(f64::NAN));
    Ok(LevelCurvePrior { distance, u, length, eta, step: 1e-5 })
}

/// Gaussian (m, σ) distance and its semicircular level curves.
pub fn gaussian_2d_family() -> (DistanceMap2D, LevelCurveFamily) {
    let distance = DistanceMap2D { w: Arc::new(|m: f64, s: f64| if s > 0.0 { m.hypot(s) } else { f64::NAN }), c: f64::INFINITY };
    let curves = LevelCurveFamily {
        graph: Arc::new(|m: f64, w: f64| ((w - m) * (w + m)).sqrt()),
        graph_dx: Arc::new(|p: CurvePoint, _w: f64| -p.x / (p.from_lo * p.from_hi).sqrt()),
        range: Arc::new(|w| (-w, w)),
        swapped: false,
    };
    (distance, curves)
}

/// GPD (σ, ξ) distance σ/(1 − ξ); level curves ξ = 1 − σ/w for σ ∈ (0, w).
pub fn gpd_2d_family() -> (DistanceMap2D, LevelCurveFamily) {
    let distance = DistanceMap2D {
        w: Arc::new(|s: f64, xi: f64| if s > 0.0 && xi < 1.0 { s / (1.0 - xi) } else { f64::NAN }),
        c: f64::INFINITY,
    };
    let curves = LevelCurveFamily {
        graph: Arc::new(|s: f64, w: f64| 1.0 - s / w),
        graph_dx: Arc::new(|_p: CurvePoint, w: f64| -1.0 / w),
        range: Arc::new(|w| (0.0, w)),
        swapped: false,
    };
    (distance, curves)
}

/// A catalog density with its rate.
#[derive(Clone, Copy)]
pub struct ClosedForm2D {
    pub eta: f64,
    pub formula: fn(f64, f64, f64) -> f64,
}

impl Density2D for ClosedForm2D {
    fn density(&self, x: f64, y: f64) -> f64 {
        (self.formula)(x, y, self.eta)
    }
}

pub fn bivariate_gaussian_prior(eta: f64) -> Result<ClosedForm2D, MultiError> {
    if !(eta > 0.0) {
        return Err(MultiError::Domain(format!("eta = {eta} must be positive")));
    }
    Ok(ClosedForm2D { eta, formula: gaussian_2d_density })
}

pub fn bivariate_gpd_prior(eta: f64) -> Result<ClosedForm2D, MultiError> {
    if !(eta > 0.0) {
        return Err(MultiError::Domain(format!("eta = {eta} must be positive")));
    }
    Ok(ClosedForm2D { eta, formula: gpd_2d_density })
}

/// Draw (m, σ) from the Gaussian bivariate prior: w ~ Exp(η), angle ~ U(0, π).
pub fn sample_gaussian_2d<R: Rng + ?Sized>(eta: f64, rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| {
            let w = -(1.0 - rng.random::<f64>()).ln() / eta;
            let a = PI * rng.random::<f64>();
            [w * a.cos(), w * a.sin()]
        })
        .collect()
}

/// Draw (σ, ξ) from the GPD bivariate prior: w ~ Exp(η), uniform along the level line.
pub fn sample_gpd_2d<R: Rng + ?Sized>(eta: f64, rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| {
            let w = -(1.0 - rng.random::<f64>()).ln() / eta;
            let s = w * rng.random::<f64>();
            [s, 1.0 - s / w]
        })
        .collect()
}

/// Density pulled back through an invertible map ψ: π̂(θ) = |det J_ψ(θ)| π(ψ(θ)).
#[derive(Clone)]
pub struct PulledBack {
    pub psi: Arc<dyn Fn(f64, f64) -> Option<[f64; 2]> + Send + Sync>,
    pub jac_det: Fn2,
    pub base: Arc<dyn Density2D>,
}

impl Density2D for PulledBack {
    fn density(&self, x: f64, y: f64) -> f64 {
        match (self.psi)(x, y) {
            Some(p) => (self.jac_det)(x, y).abs() * self.base.density(p[0], p[1]),
            None => 0.0,
        }
    }
}

/// Build a pulled-back density after checking det J_ψ ≠ 0 on sample points.
pub fn conic_transform_prior(
    base: Arc<dyn Density2D>,
    psi: Arc<dyn Fn(f64, f64) -> Option<[f64; 2]> + Send + Sync>,
    jac_det: Fn2,
    check_points: &[[f64; 2]],
) -> Result<PulledBack, MultiError> {
    for p in check_points {
        if psi(p[0], p[1]).is_some() {
            let d = jac_det(p[0], p[1]);
            if !(d.abs() > 0.0) || !d.is_finite() {
                return Err(MultiError::Domain(format!("map is not invertible at ({}, {}): det J = {d}", p[0], p[1])));
            }
        }
    }
    Ok(PulledBack { psi, jac_det, base })
}

/// Polar angle in [0, 2π).
fn angle_of(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// One angular piece [start, end] of a cone, mapped linearly onto
/// [target_start, target_end] at fixed radius.
#[derive(Clone)]
pub struct ConePiece {
    pub start: f64,
    pub end: f64,
    pub target_start: f64,
    pub target_end: f64,
    pub base: Arc<dyn Density2D>,
}

impl ConePiece {
    fn scale(&self) -> f64 {
        (self.target_end - self.target_start) / (self.end - self.start)
    }

    fn map(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        let a = angle_of(x, y);
        if a < self.start || a >= self.end {
            return None;
        }
        let r = x.hypot(y);
        let t = self.target_start + (a - self.start) * self.scale();
        Some([r * t.cos(), r * t.sin()])
    }
}

/// Prior on a cone {θ ∈ [0, φ)} obtained by rescaling angles onto the domain
/// of a base prior; one piece is the plain conic map, several pieces give the
/// union form.
#[derive(Clone)]
pub struct ConicPrior {
    pub pieces: Vec<ConePiece>,
}

impl ConicPrior {
    /// Single cone [0, φ) mapped onto angles [0, target).
    pub fn single(phi: f64, target: f64, base: Arc<dyn Density2D>) -> Result<Self, MultiError> {
        if !(phi > 0.0 && phi < 2.0 * PI) {
            return Err(MultiError::Domain(format!("cone angle {phi} outside (0, 2π)")));
        }
        Ok(Self { pieces: vec![ConePiece { start: 0.0, end: phi, target_start: 0.0, target_end: target, base }] })
    }

    pub fn union(pieces: Vec<ConePiece>) -> Result<Self, MultiError> {
        for (i, a) in pieces.iter().enumerate() {
            if !(a.end > a.start) || !(a.target_end > a.target_start) {
                return Err(MultiError::Domain(format!("piece {i} has an empty angular range")));
            }
            for b in pieces.iter().skip(i + 1) {
                if a.start < b.end && b.start < a.end {
                    return Err(MultiError::Domain("cone pieces overlap".into()));
                }
            }
        }
        Ok(Self { pieces })
    }
}

impl Density2D for ConicPrior {
    fn density(&self, x: f64, y: f64) -> f64 {
        self.pieces
            .iter()
            .filter_map(|p| p.map(x, y).map(|q| p.scale() * p.base.density(q[0], q[1])))
            .sum()
    }
}

/// Parameterized level surfaces in three dimensions: α(t₁, t₂; w) with
/// t₁ ∈ range1, t₂ ∈ range2(t₁, w), and the inverse chart θ ↦ (t₁, t₂).
/// The Jacobian of α receives t₂ as a `CurvePoint` on range2.
#[derive(Clone)]
pub struct SurfaceFamily {
    pub alpha_jacobian: Arc<dyn Fn(f64, CurvePoint, f64) -> Matrix3x2<f64> + Send + Sync>,
    pub range1: (f64, f64),
    pub range2: Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>,
    pub chart: Arc<dyn Fn([f64; 3]) -> [f64; 2] + Send + Sync>,
    pub distance: Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>,
    pub c: f64,
}

/// Trivariate prior: uniform coordinates u₁, u₂ on each level surface built
/// from the area element |dα| = (det JᵀJ)^{1/2}, exponential law on W.
#[derive(Clone)]
pub struct SurfacePrior {
    pub family: SurfaceFamily,
    pub eta: f64,
    pub step: f64,
}

fn surface_opts() -> DeOptions {
    DeOptions { rel_tol: 1e-12, abs_tol: 1e-15, min_level: 3, max_level: 10 }
}

impl SurfacePrior {
    pub fn area_element(&self, t1: f64, t2: CurvePoint, w: f64) -> f64 {
        let j = (self.family.alpha_jacobian)(t1, t2, w);
        (j.transpose() * j).determinant().max(0.0).sqrt()
    }

    /// ∫ |dα| dt₂ from the start of range2 to `upper`, in s with
    /// t₂ = mid − half·cos s.
    fn inner(&self, t1: f64, upper: f64, w: f64) -> f64 {
        let (lo, hi) = (self.family.range2)(t1, w);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let upper = upper.clamp(lo, hi);
        let s_up = ((mid - upper) / half).clamp(-1.0, 1.0).acos();
        if s_up <= 0.0 {
            return 0.0;
        }
        let g = |s: f64| {
            let (sh, ch) = (0.5 * s).sin_cos();
            let p = CurvePoint { x: mid - half * s.cos(), from_lo: 2.0 * half * sh * sh, from_hi: 2.0 * half * ch * ch };
            self.area_element(t1, p, w) * half * s.sin()
        };
        integrate(g, Interval::Finite(0.0, s_up), surface_opts()).unwrap_or(f64::NAN)
    }

    /// u₁(t₁; w).
    pub fn u1(&self, t1: f64, w: f64) -> f64 {
        let (a, b) = self.family.range1;
        let inner_full = |x: f64| self.inner(x, f64::INFINITY, w);
        let total = integrate(inner_full, Interval::Finite(a, b), surface_opts()).unwrap_or(f64::NAN);
        let t1 = t1.clamp(a, b);
        if t1 <= a {
            return 0.0;
        }
        integrate(inner_full, Interval::Finite(a, t1), surface_opts()).unwrap_or(f64::NAN) / total
    }

    /// u₂(t₂; t₁, w).
    pub fn u2(&self, t2: f64, t1: f64, w: f64) -> f64 {
        self.inner(t1, t2, w) / self.inner(t1, f64::INFINITY, w)
    }

    fn coords(&self, th: [f64; 3]) -> [f64; 3] {
        let w = (self.family.distance)(th);
        let [t1, t2] = (self.family.chart)(th);
        [w, self.u1(t1, w), self.u2(t2, t1, w)]
    }

    pub fn density(&self, th: [f64; 3]) -> f64 {
        let w = (self.family.distance)(th);
        if !w.is_finite() || w <= 0.0 {
            return 0.0;
        }
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            let h = self.step * (1.0 + th[k].abs());
            let (mut a, mut b) = (th, th);
            a[k] += h;
            b[k] -= h;
            let (fa, fb) = (self.coords(a), self.coords(b));
            for r in 0..3 {
                jac[(r, k)] = (fa[r] - fb[r]) / (2.0 * h);
            }
        }
        jac.determinant().abs() * self.eta * (-self.eta * w).exp() / trunc_factor(self.eta, self.family.c)
    }
}

/// The (σ₁, σ₂, ρ) covariance family of a centred bivariate Gaussian:
/// W = (σ₁² + σ₂²)^{1/2}, surfaces α(ρ, σ₁) = (σ₁, (w² − σ₁²)^{1/2}, ρ).
pub fn gaussian_cov_3d_family() -> SurfaceFamily {
    SurfaceFamily {
        alpha_jacobian: Arc::new(|_rho, s1: CurvePoint, w| {
            let s2 = (s1.from_hi * (w + s1.x)).sqrt();
            Matrix3x2::new(0.0, 1.0, 0.0, -s1.x / s2, 1.0, 0.0)
        }),
        range1: (-1.0, 1.0),
        range2: Arc::new(|_rho, w| (0.0, w)),
        chart: Arc::new(|th: [f64; 3]| [th[2], th[0]]),
        distance: Arc::new(|th: [f64; 3]| if th[0] > 0.0 && th[1] > 0.0 { th[0].hypot(th[1]) } else { f64::NAN }),
        c: f64::INFINITY,
    }
}

pub fn recipe2_trivariate_gaussian_cov(eta: f64) -> Result<SurfacePrior, MultiError> {
    if !(eta > 0.0) {
        return Err(MultiError::Domain(format!("eta = {eta} must be positive")));
    }
    Ok(SurfacePrior { family: gaussian_cov_3d_family(), eta, step: 1e-5 })
}

/// π(θ₁) π(θ₂ | θ₁), with the first step a univariate prior at θ₂ = θ₂₀.
#[derive(Clone)]
pub struct TwoStepPrior {
    pub step1: UnivariatePrior,
    pub step2: Fn2,
}

impl TwoStepPrior {
    pub fn density(&self, t1: f64, t2: f64) -> f64 {
        self.step1.density(t1) * (self.step2)(t2, t1)
    }
}

/// Checks that step one is not identically zero on a grid over its domain.
pub fn two_step_prior(step1: UnivariatePrior, step2: Fn2) -> Result<TwoStepPrior, MultiError> {
    let (lo, hi) = step1.domain();
    let map = |t: f64| match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + t * (hi - lo),
        (true, false) => lo + t / (1.0 - t),
        (false, true) => hi - (1.0 - t) / t,
        (false, false) => (t - 0.5) / (t * (1.0 - t)),
    };
    let alive = (0..256).any(|i| step1.density(map((i as f64 + 0.5) / 256.0)) > 0.0);
    if !alive {
        return Err(MultiError::DegenerateOrder);
    }
    Ok(TwoStepPrior { step1, step2 })
}

/// Gaussian (m, σ): m at σ = 0 first, then σ given m.
pub fn gaussian_two_step(eta1: f64, eta2: f64) -> Result<TwoStepPrior, MultiError> {
    if !(eta2 > 0.0) {
        return Err(MultiError::Domain(format!("eta2 = {eta2} must be positive")));
    }
    let step1 = gaussian_mean_prior(eta1, eta1).map_err(|e| MultiError::Domain(e.to_string()))?;
    two_step_prior(step1, Arc::new(move |s: f64, _m: f64| if s > 0.0 { eta2 * (-eta2 * s).exp() } else { 0.0 }))
}

/// GPD (σ, ξ): σ at ξ = 0 first, then ξ given σ through the unit-scale tail prior.
pub fn gpd_two_step(eta1: f64, eta2: f64) -> Result<TwoStepPrior, MultiError> {
    if !(eta2 > 0.0) {
        return Err(MultiError::Domain(format!("eta2 = {eta2} must be positive")));
    }
    let step1 = gaussian_sd_prior(eta1).map_err(|e| MultiError::Domain(e.to_string()))?;
    two_step_prior(step1, Arc::new(move |xi: f64, _s: f64| gpd_tail_density(xi, eta2)))
}

/// GPD with ξ derived first at σ = 0, where W(ξ) = σξ/(1 − ξ) vanishes
/// identically; always fails with `DegenerateOrder`.
pub fn gpd_two_step_xi_first(eta1: f64, eta2: f64) -> Result<TwoStepPrior, MultiError> {
    let sigma0 = 0.0;
    let side = Side::new(0.0, 1.0, move |xi: f64| sigma0 * xi / (1.0 - xi), f64::INFINITY)
        .with_derivative(move |xi: f64| sigma0 / ((1.0 - xi) * (1.0 - xi)));
    let family = DistanceFamily { theta0: 0.0, minus: None, plus: Some(side) };
    let step1 = build_prior(family, eta1, eta1).map_err(|e| MultiError::Domain(e.to_string()))?;
    two_step_prior(step1, Arc::new(move |s: f64, xi: f64| if s > 0.0 && xi < 1.0 { eta2 / (1.0 - xi) * (-eta2 * s / (1.0 - xi)).exp() } else { 0.0 }))
}
