//! Bracketed root finding and derivative-free maximization.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("root not bracketed on [{lo}, {hi}] (f(lo) = {flo}, f(hi) = {fhi})")]
    NotBracketed { lo: f64, hi: f64, flo: f64, fhi: f64 },
}

/// Bisection for a sign change of `f` on [lo, hi]; stops once the bracket is
/// narrower than `xtol`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(RootError::NotBracketed { lo, hi, flo, fhi });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a maximum of a unimodal `f` on [a, b].
pub fn golden_max<F>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    let mut best = (x, fx);
    for (xv, fv) in [(c, fc), (d, fd)] {
        if fv > best.1 {
            best = (xv, fv);
        }
    }
    best
}

/// Nelder–Mead maximization in two dimensions.
pub fn nelder_mead_max<F>(f: F, x0: [f64; 2], step: [f64; 2], xtol: f64, max_iter: usize) -> ([f64; 2], f64)
where
    F: Fn([f64; 2]) -> f64,
{
    let neg = |x: [f64; 2]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };
    let mut s = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut v = [neg(s[0]), neg(s[1]), neg(s[2])];
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        s = [s[idx[0]], s[idx[1]], s[idx[2]]];
        v = [v[idx[0]], v[idx[1]], v[idx[2]]];
        let size = (0..2)
            .map(|k| (s[1][k] - s[0][k]).abs().max((s[2][k] - s[0][k]).abs()))
            .fold(0.0, f64::max);
        if size < xtol {
            break;
        }
        let centroid = lerp(s[0], s[1], 0.5);
        let xr = lerp(centroid, s[2], -1.0);
        let fr = neg(xr);
        if fr < v[0] {
            let xe = lerp(centroid, s[2], -2.0);
            let fe = neg(xe);
            if fe < fr {
                s[2] = xe;
                v[2] = fe;
            } else {
                s[2] = xr;
                v[2] = fr;
            }
        } else if fr < v[1] {
            s[2] = xr;
            v[2] = fr;
        } else {
            let (xc, fc) = if fr < v[2] {
                let xc = lerp(centroid, xr, 0.5);
                (xc, neg(xc))
            } else {
                let xc = lerp(centroid, s[2], 0.5);
                (xc, neg(xc))
            };
            if fc < v[2].min(fr) {
                s[2] = xc;
                v[2] = fc;
            } else {
                for i in 1..3 {
                    s[i] = lerp(s[0], s[i], 0.5);
                    v[i] = neg(s[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap();
    (s[best], -v[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9, 100).is_err());
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, -1.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-7 && (fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let f = |x: [f64; 2]| -((x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + x[0] * x[1]);
        let (x, _) = nelder_mead_max(f, [0.0, 0.0], [0.5, 0.5], 1e-10, 2000);
        // Stationary point solved by hand: (15/11, −8/11).
        assert!((x[0] - 15.0 / 11.0).abs() < 1e-6);
        assert!((x[1] + 8.0 / 11.0).abs() < 1e-6);
    }
}
