//! Total variation distance ½∫|p₁ − p₂| between densities.

use crate::geometry::TriMesh;
use crate::numeric1d::GridDensity1D;
use crate::quad::{integrate, DeOptions, Interval, QuadError};
use rayon::prelude::*;

fn piece(f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: DeOptions) -> Result<f64, QuadError> {
    if a >= b {
        return Ok(0.0);
    }
    let iv = match (a.is_finite(), b.is_finite()) {
        (true, true) => Interval::Finite(a, b),
        (true, false) => Interval::Upper(a),
        (false, true) => Interval::Lower(b),
        (false, false) => Interval::Whole,
    };
    integrate(f, iv, opts)
}

// Interior sample points of (a, b): uniform when finite, geometrically
// spreading out toward an infinite end.
fn probe_points(a: f64, b: f64) -> Vec<f64> {
    let spread = |j: usize| 2f64.powf(j as f64 / 8.0) - 1.0;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => (1..32).map(|i| a + (b - a) * i as f64 / 32.0).collect(),
        (true, false) => (1..400).map(|j| a + spread(j) / 16.0).collect(),
        (false, true) => (1..400).rev().map(|j| b - spread(j) / 16.0).collect(),
        (false, false) => {
            let mut v: Vec<f64> = (1..400).rev().map(|j| -spread(j) / 16.0).collect();
            v.push(0.0);
            v.extend((1..400).map(|j| spread(j) / 16.0));
            v
        }
    }
}

/// ½∫|f − g| over (lo, hi). The range is split at `knots` and at sign changes
/// of f − g found by sampling each piece, so each integral is over a
/// piece where the integrand is smooth.
pub fn tv_1d<F, G>(f: F, g: G, lo: f64, hi: f64, knots: &[f64]) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let d = |x: f64| f(x) - g(x);
    let mut cuts: Vec<f64> = knots.iter().cloned().filter(|&k| k > lo && k < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut breaks = vec![cuts[0]];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        for p in probe_points(a, b).windows(2) {
            let (mut u, mut v) = (p[0], p[1]);
            let (du, dv) = (d(u), d(v));
            if du == 0.0 || du.is_nan() || dv.is_nan() || du.signum() == dv.signum() {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (u + v);
                if m <= u || m >= v {
                    break;
                }
                if d(m).signum() == du.signum() {
                    u = m;
                } else {
                    v = m;
                }
            }
            breaks.push(0.5 * (u + v));
        }
        breaks.push(b);
    }
    let opts = DeOptions { rel_tol: 1e-9, abs_tol: 1e-9, min_level: 3, max_level: 12 };
    let absd = |x: f64| d(x).abs();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += piece(&absd, w[0], w[1], opts)?;
    }
    Ok(0.5 * total)
}

/// TV between a grid density and a density p supported on (p_lo, p_hi).
pub fn tv_grid_1d<P: Fn(f64) -> f64>(grid: &GridDensity1D, p: P, p_lo: f64, p_hi: f64) -> Result<f64, QuadError> {
    let (a, b) = grid.support();
    let (lo, hi) = (a.min(p_lo), b.max(p_hi));
    tv_1d(|x| grid.evaluate(x), p, lo, hi, &grid.grid)
}

/// ½ × midpoint rule of |f − g| over a box, doubling the resolution until two
/// successive estimates differ by less than `tol`.
pub fn tv_2d_box<F, G>(f: F, g: G, lo: [f64; 2], hi: [f64; 2], tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    let est = |n: usize| {
        let (hx, hy) = ((hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64);
        let s: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = lo[0] + (i as f64 + 0.5) * hx;
                (0..n).map(|j| (f(x, lo[1] + (j as f64 + 0.5) * hy) - g(x, lo[1] + (j as f64 + 0.5) * hy)).abs()).sum::<f64>()
            })
            .sum();
        0.5 * s * hx * hy
    };
    let mut n = 64;
    let mut prev = est(n);
    while n < 8192 {
        n *= 2;
        let next = est(n);
        if (next - prev).abs() < tol {
            return next;
        }
        prev = next;
    }
    prev
}

// Symmetric 7-point rule on the reference triangle, exact for degree 5.
const DUNAVANT7: [(f64, f64, f64, f64); 7] = {
    const A1: f64 = 0.059_715_871_789_770;
    const B1: f64 = 0.470_142_064_105_115;
    const A2: f64 = 0.797_426_985_353_087;
    const B2: f64 = 0.101_286_507_323_456;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132_394_152_788_506;
    const W2: f64 = 0.125_939_180_544_827;
    [
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, W0),
        (A1, B1, B1, W1),
        (B1, A1, B1, W1),
        (B1, B1, A1, W1),
        (A2, B2, B2, W2),
        (B2, A2, B2, W2),
        (B2, B2, A2, W2),
    ]
};

fn triangle_integral(p: [[f64; 2]; 3], level: u32, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs();
    if level == 0 {
        return area
            * DUNAVANT7
                .iter()
                .map(|&(a, b, c, w)| w * f(a * p[0][0] + b * p[1][0] + c * p[2][0], a * p[0][1] + b * p[1][1] + c * p[2][1]))
                .sum::<f64>();
    }
    let mid = |i: usize, j: usize| [(p[i][0] + p[j][0]) / 2.0, (p[i][1] + p[j][1]) / 2.0];
    let (m01, m12, m20) = (mid(0, 1), mid(1, 2), mid(2, 0));
    [[p[0], m01, m20], [m01, p[1], m12], [m20, m12, p[2]], [m01, m12, m20]]
        .iter()
        .map(|&q| triangle_integral(q, level - 1, f))
        .sum()
}

/// TV between a density `f` that vanishes off the mesh and a probability
/// density `g`: ½(∫_mesh |f − g| + 1 − ∫_mesh g). Triangles are subdivided
/// uniformly until the estimate changes by less than `tol`.
pub fn tv_mesh<F, G>(mesh: &TriMesh, f: F, g: G, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    let est = |level: u32| {
        let (diff, mass): (f64, f64) = mesh
            .triangles
            .par_iter()
            .map(|tri| {
                let p = tri.map(|k| mesh.nodes[k]);
                let d = triangle_integral(p, level, &|x, y| (f(x, y) - g(x, y)).abs());
                let m = triangle_integral(p, level, &|x, y| g(x, y));
                (d, m)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        0.5 * (diff + (1.0 - mass).max(0.0))
    };
    let mut prev = est(0);
    for level in 1..=5 {
        let next = est(level);
        if (next - prev).abs() < tol {
            return next;
        }
        prev = next;
    }
    prev
}
