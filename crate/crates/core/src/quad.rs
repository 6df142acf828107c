//! One-dimensional quadrature: double-exponential (tanh-sinh) rules on
//! finite and infinite intervals, and composite trapezoid with halving.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand not finite at interior point {at}")]
    NonFinite { at: f64 },
    #[error("no convergence after {levels} refinements (last change {change:e})")]
    NoConvergence { levels: u32, change: f64 },
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Finite(f64, f64),
    /// [a, ∞)
    Upper(f64),
    /// (−∞, b]
    Lower(f64),
    Whole,
}

#[derive(Debug, Clone, Copy)]
pub struct DeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_level: u32,
    pub max_level: u32,
}

impl Default for DeOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, min_level: 3, max_level: 12 }
    }
}

const T_MAX: f64 = 4.0;

/// Tanh-sinh rule on (−1, 1). `g(s, 1 + s, 1 − s)` must return the
/// integrand including any change-of-variables factor; both distances to
/// the endpoints are supplied accurately.
pub fn tanh_sinh<G>(mut g: G, opts: DeOptions) -> Result<f64, QuadError>
where
    G: FnMut(f64, f64, f64) -> f64,
{
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut eval = |t: f64| -> Result<f64, QuadError> {
        let u = half_pi * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let near = 2.0 * e / (1.0 + e); // distance to the closer endpoint
        let (s, ps, ms) = if u >= 0.0 { (1.0 - near, 2.0 - near, near) } else { (near - 1.0, near, 2.0 - near) };
        let ch = u.cosh();
        let w = half_pi * t.cosh() / (ch * ch);
        if w == 0.0 || near == 0.0 {
            return Ok(0.0);
        }
        let v = g(s, ps, ms);
        if v.is_finite() {
            Ok(v * w)
        } else if near > 1e-6 {
            Err(QuadError::NonFinite { at: s })
        } else {
            Ok(0.0)
        }
    };

    let mut h = 1.0;
    let mut sum = eval(0.0)?;
    let mut k = 1.0;
    while k * h <= T_MAX {
        sum += eval(k * h)? + eval(-k * h)?;
        k += 1.0;
    }
    let mut estimate = h * sum;
    let mut change = f64::INFINITY;
    for level in 1..=opts.max_level {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum += eval(t)? + eval(-t)?;
            t += 2.0 * h;
        }
        let next = h * sum;
        change = (next - estimate).abs();
        estimate = next;
        if level >= opts.min_level && change <= opts.abs_tol.max(opts.rel_tol * estimate.abs()) {
            return Ok(estimate);
        }
    }
    Err(QuadError::NoConvergence { levels: opts.max_level, change })
}

/// ∫ f over the interval with a double-exponential rule.
pub fn integrate<F>(f: F, interval: Interval, opts: DeOptions) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    match interval {
        Interval::Finite(a, b) => {
            let half = 0.5 * (b - a);
            tanh_sinh(
                |s, ps, ms| {
                    let x = if s < 0.0 { a + half * ps } else { b - half * ms };
                    half * f(x)
                },
                opts,
            )
        }
        Interval::Upper(a) => tanh_sinh(
            |_, ps, ms| {
                let x = a + ps / ms;
                f(x) * 2.0 / (ms * ms)
            },
            opts,
        ),
        Interval::Lower(b) => tanh_sinh(
            |_, ps, ms| {
                let x = b - ps / ms;
                f(x) * 2.0 / (ms * ms)
            },
            opts,
        ),
        Interval::Whole => {
            let left = tanh_sinh(|_, ps, ms| f(-ps / ms) * 2.0 / (ms * ms), opts)?;
            let right = tanh_sinh(|_, ps, ms| f(ps / ms) * 2.0 / (ms * ms), opts)?;
            Ok(left + right)
        }
    }
}

/// Composite trapezoid on [a, b] starting from `n0` panels and halving the
/// panel width until two successive changes are both below `tol` (a single
/// small change can be a coincidence when the integrand has kinks).
pub fn trapezoid<F>(f: F, a: f64, b: f64, n0: usize, tol: f64, max_halvings: u32) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    let mut n = n0.max(1);
    let mut h = (b - a) / n as f64;
    let mut sum = 0.5 * (f(a) + f(b)) + (1..n).map(|i| f(a + i as f64 * h)).sum::<f64>();
    if !sum.is_finite() {
        return Err(QuadError::NonFinite { at: a });
    }
    let mut estimate = h * sum;
    let mut change = f64::INFINITY;
    for _ in 0..max_halvings {
        let mids: f64 = (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum();
        if !mids.is_finite() {
            return Err(QuadError::NonFinite { at: a });
        }
        sum += mids;
        n *= 2;
        h *= 0.5;
        let next = h * sum;
        let previous_change = change;
        change = (next - estimate).abs();
        estimate = next;
        if change < tol && previous_change < tol {
            return Ok(estimate);
        }
    }
    Err(QuadError::NoConvergence { levels: max_halvings, change })
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
