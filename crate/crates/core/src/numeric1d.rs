//! Grid approximation of a one-sided univariate prior from a black-box
//! distance evaluator.

use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("integer scan reached {cap} without W ≥ {w_star} although W looks bounded (max {max_w})")]
    InconsistentC { cap: u64, w_star: f64, max_w: f64 },
    #[error("degenerate level curve: {0}")]
    DegenerateLevelCurve(String),
    #[error("non-monotone field: {0}")]
    NonMonotone(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("io error: {0}")]
    Io(String),
}

/// Which side of θ₀ the parameter lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Θ = (θ₀, ∞) with W increasing.
    Plus,
    /// Θ = (−∞, θ₀) with W decreasing; handled by reflecting about θ₀.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recipe3Config {
    pub eta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub scan_cap: u64,
    pub orientation: Orientation,
}

impl Recipe3Config {
    pub fn new(eta: f64, delta: f64, epsilon: f64) -> Self {
        Self { eta, delta, epsilon, scan_cap: 1_000_000, orientation: Orientation::Plus }
    }
}

/// Density values on a regular grid with spacing ε, zero off the grid's span.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity1D {
    pub theta0: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub eta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub c_hat: f64,
    pub z_star: f64,
    pub w_star: f64,
    pub n_star: u64,
}

impl GridDensity1D {
    pub fn support(&self) -> (f64, f64) {
        let (a, b) = (self.grid[0], self.grid[self.grid.len() - 1]);
        (a.min(b), a.max(b))
    }

    /// Linear interpolation on the grid, zero outside.
    pub fn evaluate(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(theta >= lo && theta <= hi) {
            return 0.0;
        }
        let n = self.grid.len();
        if n == 1 {
            return self.values[0];
        }
        let step = self.grid[1] - self.grid[0];
        let x = (theta - self.grid[0]) / step;
        let i = (x.floor() as usize).min(n - 2);
        let f = (x - i as f64).clamp(0.0, 1.0);
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// Integral of the interpolant.
    pub fn mass(&self) -> f64 {
        let h = (self.grid[1] - self.grid[0]).abs();
        self.values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum()
    }

    /// Integral of the interpolant over [a, b].
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if a >= b {
            return 0.0;
        }
        let mut pts: Vec<f64> = self.grid.iter().cloned().filter(|&x| x > a && x < b).collect();
        pts.push(a);
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (self.evaluate(w[0]) + self.evaluate(w[1]))).sum()
    }

    /// Two-column CSV with a header line and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), NumericError> {
        let io = |e: std::io::Error| NumericError::Io(e.to_string());
        writeln!(out, "theta,density").map_err(io)?;
        let mut order: Vec<usize> = (0..self.grid.len()).collect();
        order.sort_by(|&a, &b| self.grid[a].total_cmp(&self.grid[b]));
        for i in order {
            writeln!(out, "{:.16e},{:.16e}", self.grid[i], self.values[i]).map_err(io)?;
        }
        Ok(())
    }
}

/// Interior base point: one grid per side, mixed with weights w₋ + w₊ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedGrid {
    pub minus: GridDensity1D,
    pub plus: GridDensity1D,
    pub w_minus: f64,
}

impl TwoSidedGrid {
    pub fn new(minus: GridDensity1D, plus: GridDensity1D, w_minus: f64) -> Result<Self, NumericError> {
        if !(0.0..=1.0).contains(&w_minus) {
            return Err(NumericError::Domain(format!("side weight {w_minus} outside [0, 1]")));
        }
        if minus.theta0 != plus.theta0 {
            return Err(NumericError::Domain("sides have different base points".into()));
        }
        Ok(Self { minus, plus, w_minus })
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        let t0 = self.plus.theta0;
        if theta > t0 {
            (1.0 - self.w_minus) * self.plus.evaluate(theta)
        } else if theta < t0 {
            self.w_minus * self.minus.evaluate(theta)
        } else {
            0.5 * ((1.0 - self.w_minus) * self.plus.evaluate(theta) + self.w_minus * self.minus.evaluate(theta))
        }
    }
}

pub fn density_eval_1d(d: &GridDensity1D, theta: f64) -> f64 {
    d.evaluate(theta)
}

fn validate(cfg: &Recipe3Config, need_delta: bool) -> Result<(), NumericError> {
    if !(cfg.eta > 0.0) {
        return Err(NumericError::Domain(format!("eta = {} must be positive", cfg.eta)));
    }
    if need_delta && !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(NumericError::Domain(format!("delta = {} outside (0, 1)", cfg.delta)));
    }
    if !(cfg.epsilon > 0.0) {
        return Err(NumericError::Domain(format!("epsilon = {} must be positive", cfg.epsilon)));
    }
    Ok(())
}

/// Forward differences, backward where the forward point leaves the domain;
/// density η e^{−ηŴ}|D̂Ŵ|/(1 − e^{−ηĉ}) with zero where Ŵ is infinite.
fn assemble(xs: &[f64], ws: &[f64], w_next: &[f64], eps: f64, eta: f64, c_hat: f64) -> Vec<f64> {
    let norm = if c_hat.is_infinite() { 1.0 } else { -(-eta * c_hat).exp_m1() };
    (0..xs.len())
        .map(|i| {
            let w = ws[i];
            if !w.is_finite() {
                return 0.0;
            }
            let d = if w_next[i].is_finite() {
                (w_next[i] - w) / eps
            } else if i > 0 && ws[i - 1].is_finite() {
                (w - ws[i - 1]) / eps
            } else {
                0.0
            };
            d.abs() * eta * (-eta * w).exp() / norm
        })
        .collect()
}

/// Grid approximation on the one-sided unbounded domain.
///
/// The integer scan visits θ₀ + k for k = 1, 2, …; values of W that are not
/// finite (points outside the parameter domain) count as +∞.
pub fn approximate_prior_1d<F: Fn(f64) -> f64>(w: F, theta0: f64, cfg: Recipe3Config) -> Result<GridDensity1D, NumericError> {
    validate(&cfg, true)?;
    let sign = if cfg.orientation == Orientation::Plus { 1.0 } else { -1.0 };
    let wx = |x: f64| {
        let v = w(theta0 + sign * x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (eta, eps) = (cfg.eta, cfg.epsilon);
    let w_star = -cfg.delta.ln() / eta;
    let c_threshold = -(eps * eps / (1.0 + eps * eps)).ln() / eta;

    let mut prev = wx(0.0).max(0.0);
    let mut n_star = None;
    let mut c_hat = None;
    let mut max_w = prev;
    for k in 1..=cfg.scan_cap {
        let v = wx(k as f64);
        if v < prev - 1e-12 * (1.0 + prev.abs()) {
            return Err(NumericError::Assumption(format!("W decreases between θ₀ + {} and θ₀ + {k}", k - 1)));
        }
        prev = v;
        max_w = max_w.max(v);
        if n_star.is_none() && v >= w_star {
            n_star = Some(k);
        }
        if v > c_threshold {
            c_hat = Some(f64::INFINITY);
        }
        if n_star.is_some() && c_hat.is_some() {
            break;
        }
    }
    let n_star = n_star.ok_or(NumericError::InconsistentC { cap: cfg.scan_cap, w_star, max_w })?;
    let c_hat = c_hat.unwrap_or(max_w);

    let (mut lo, mut hi) = ((n_star - 1) as f64, n_star as f64);
    while hi - lo >= eps {
        let mid = 0.5 * (lo + hi);
        if wx(mid) >= w_star {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let z_star = hi;

    let m = (z_star / eps).ceil() as usize;
    let xs: Vec<f64> = (0..=m).map(|i| i as f64 * eps).collect();
    let ws: Vec<f64> = xs.iter().map(|&x| wx(x)).collect();
    for i in 1..ws.len() {
        if ws[i] < ws[i - 1] - 1e-12 * (1.0 + ws[i - 1].abs()) {
            return Err(NumericError::Assumption(format!("W decreases near offset {}", xs[i])));
        }
    }
    let mut w_next: Vec<f64> = ws[1..].to_vec();
    w_next.push(wx((m + 1) as f64 * eps));
    let values = assemble(&xs, &ws, &w_next, eps, eta, c_hat);
    Ok(GridDensity1D {
        theta0,
        grid: xs.iter().map(|&x| theta0 + sign * x).collect(),
        values,
        eta,
        delta: cfg.delta,
        epsilon: eps,
        c_hat,
        z_star: theta0 + sign * z_star,
        w_star,
        n_star,
    })
}

/// Bounded domain: mesh all of [θ₀, θ₀ ± length] with δ = 0. `c` is the
/// supremum of W when known, else the largest grid value.
pub fn bounded_domain_variant<F: Fn(f64) -> f64>(
    w: F,
    theta0: f64,
    length: f64,
    eta: f64,
    epsilon: f64,
    orientation: Orientation,
    c: Option<f64>,
) -> Result<GridDensity1D, NumericError> {
    let cfg = Recipe3Config { eta, delta: 0.0, epsilon, scan_cap: 0, orientation };
    validate(&cfg, false)?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(NumericError::Domain(format!("domain length {length} must be positive and finite")));
    }
    let sign = if orientation == Orientation::Plus { 1.0 } else { -1.0 };
    let wx = |x: f64| if x <= length { w(theta0 + sign * x) } else { f64::INFINITY };
    let m = (length / epsilon).round().max(1.0) as usize;
    let h = length / m as f64;
    let xs: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let ws: Vec<f64> = xs.iter().map(|&x| wx(x)).collect();
    for i in 1..ws.len() {
        if !(ws[i] >= ws[i - 1] - 1e-12 * (1.0 + ws[i - 1].abs())) {
            return Err(NumericError::Assumption(format!("W is not increasing away from θ₀ near offset {}", xs[i])));
        }
    }
    let c_hat = c.unwrap_or_else(|| ws.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max));
    let mut w_next: Vec<f64> = ws[1..].to_vec();
    w_next.push(f64::INFINITY);
    let values = assemble(&xs, &ws, &w_next, h, eta, c_hat);
    Ok(GridDensity1D {
        theta0,
        grid: xs.iter().map(|&x| theta0 + sign * x).collect(),
        values,
        eta,
        delta: 0.0,
        epsilon: h,
        c_hat,
        z_star: theta0 + sign * length,
        w_star: f64::INFINITY,
        n_star: 0,
    })
}
