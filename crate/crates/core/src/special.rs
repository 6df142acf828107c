//! Normal and Student-t distribution functions with accurate tails.

use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{PI, SQRT_2};

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Φ(z), accurate in the lower tail.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// 1 − Φ(z), accurate in the upper tail.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

pub fn norm_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * erfc_inv(2.0 * u)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta I_x(a, b), with `y = 1 − x` passed separately
/// so callers can keep precision when x is close to 1.
pub fn beta_reg(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_front.exp() * beta_cf(a, b, x, y)) / a
    } else {
        1.0 - (ln_front.exp() * beta_cf(b, a, y, x)) / b
    }
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64, _y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..20_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// P(T ≤ t) for T ~ t_ν; ν = ∞ gives the normal.
pub fn student_t_cdf(t: f64, nu: f64) -> f64 {
    if nu.is_infinite() {
        return norm_cdf(t);
    }
    if t == 0.0 {
        return 0.5;
    }
    let t2 = t * t;
    let x = nu / (nu + t2);
    let y = t2 / (nu + t2);
    let lower = 0.5 * beta_reg(0.5 * nu, 0.5, x, y);
    if t < 0.0 {
        lower
    } else {
        1.0 - lower
    }
}

/// Density of t_ν.
pub fn student_t_pdf(t: f64, nu: f64) -> f64 {
    if nu.is_infinite() {
        return norm_pdf(t);
    }
    let ln_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
    (ln_norm - 0.5 * (nu + 1.0) * (t * t / nu).ln_1p()).exp()
}

/// Lower-tail quantile of t_ν.
///
/// Works in y = asinh(t): the bracket is expanded from the normal quantile
/// (which the t quantile always exceeds in magnitude), then Newton steps on
/// log F are taken, falling back to bisection when a step leaves the bracket.
pub fn student_t_quantile(u: f64, nu: f64) -> f64 {
    if nu.is_infinite() {
        return norm_quantile(u);
    }
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    if u > 0.5 {
        return -student_t_quantile(1.0 - u, nu);
    }
    if u == 0.5 {
        return 0.0;
    }
    let mut hi = norm_quantile(u).asinh();
    let mut width = 1.0;
    let mut lo = hi - width;
    while student_t_cdf(lo.sinh(), nu) > u {
        hi = lo;
        width *= 2.0;
        lo = hi - width;
        if lo < -800.0 {
            return f64::NEG_INFINITY;
        }
    }
    let ln_u = u.ln();
    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        let x = y.sinh();
        let cdf = student_t_cdf(x, nu);
        let g = cdf.ln() - ln_u;
        if g > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let slope = student_t_pdf(x, nu) / cdf * y.cosh();
        let mut next = y - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-15 * (1.0 + y.abs()) || hi - lo <= 1e-15 * (1.0 + y.abs()) {
            y = next;
            break;
        }
        y = next;
    }
    y.sinh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_round_trip() {
        for &z in &[-30.0, -8.0, -1.5, 0.0, 0.3, 4.0] {
            let u = norm_cdf(z);
            assert!((norm_quantile(u) - z).abs() < 1e-9 * (1.0 + z.abs()), "z={z}");
        }
        assert!((norm_sf(2.0) - norm_cdf(-2.0)).abs() < 1e-18);
    }

    #[test]
    fn beta_reg_known_values() {
        // I_x(1, 1) = x and I_x(2, 1) = x^2.
        assert!((beta_reg(1.0, 1.0, 0.3, 0.7) - 0.3).abs() < 1e-14);
        assert!((beta_reg(2.0, 1.0, 0.4, 0.6) - 0.16).abs() < 1e-14);
        assert!((beta_reg(0.5, 0.5, 0.5, 0.5) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn t_with_one_dof_is_cauchy() {
        for &t in &[-50.0, -3.0, -0.2, 0.7, 12.0] {
            let exact = 0.5 + (t as f64).atan() / PI;
            assert!((student_t_cdf(t, 1.0) - exact).abs() < 1e-13, "t={t}");
        }
        let q = student_t_quantile(1e-12, 1.0);
        let exact = -1.0 / (PI * 1e-12f64).tan();
        assert!(((q - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn t_density_integrates_to_cdf() {
        let (a, b) = (-1.3, 2.1);
        let n = 20_000;
        let h = (b - a) / n as f64;
        let s: f64 = (0..n).map(|i| student_t_pdf(a + (i as f64 + 0.5) * h, 3.5)).sum::<f64>() * h;
        assert!((s - (student_t_cdf(b, 3.5) - student_t_cdf(a, 3.5))).abs() < 1e-9);
    }

    #[test]
    fn t_with_two_dof_closed_form() {
        // F⁻¹(u) = (2u − 1) / sqrt(2u(1 − u)) for ν = 2.
        for &u in &[1e-200f64, 1e-9, 0.01, 0.3, 0.5, 0.8] {
            let exact = (2.0 * u - 1.0) / (2.0 * u * (1.0 - u)).sqrt();
            let q = student_t_quantile(u, 2.0);
            assert!(((q - exact) / exact.abs().max(1.0)).abs() < 1e-12, "u={u}");
        }
    }
}
