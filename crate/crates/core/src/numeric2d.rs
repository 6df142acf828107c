//! Grid approximation of bivariate priors from a black-box distance
//! evaluator: ray line search, level-curve tracing, cutoff regions and
//! density assembly on a triangular mesh.

use crate::geometry::{
    clip_convex, convex_hull, polygon_area, shift_region, simplify_polygon, triangulate_anchored, ArcLengthRule, PiecewiseLinearField, Point, PolygonalRegion, Polyline,
    TriMesh,
};
use crate::numeric1d::NumericError;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

/// Parameter domain with its base point. Searches run along rays: from the
/// origin in a cone, parallel to the first axis in a strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain2D {
    /// {r(cos α, sin α): r > 0, α ∈ [0, φ]}, base point at the origin.
    Cone { phi: f64 },
    /// (0, ∞) × [lo, hi] with the base edge θ₁ = 0.
    Strip { lo: f64, hi: f64 },
}

impl Domain2D {
    fn validate(&self) -> Result<(), NumericError> {
        match *self {
            Domain2D::Cone { phi } if phi > 0.0 && phi <= PI => Ok(()),
            Domain2D::Cone { phi } => Err(NumericError::Configuration(format!("cone angle {phi} outside (0, π]; the convex cutoff region needs a convex cone"))),
            Domain2D::Strip { lo, hi } if lo < hi => Ok(()),
            Domain2D::Strip { lo, hi } => Err(NumericError::Configuration(format!("strip [{lo}, {hi}] is empty"))),
        }
    }

    /// Range of the ray parameter (angle or second coordinate).
    pub fn param_range(&self) -> (f64, f64) {
        match *self {
            Domain2D::Cone { phi } => (0.0, phi),
            Domain2D::Strip { lo, hi } => (lo, hi),
        }
    }

    pub fn param_of(&self, p: Point) -> f64 {
        match self {
            Domain2D::Cone { .. } => p[1].atan2(p[0]),
            Domain2D::Strip { .. } => p[1],
        }
    }

    /// Distance along the ray from its start.
    pub fn t_of(&self, p: Point) -> f64 {
        match self {
            Domain2D::Cone { .. } => p[0].hypot(p[1]),
            Domain2D::Strip { .. } => p[0],
        }
    }

    fn ray(&self, param: f64) -> (Point, Point) {
        match self {
            Domain2D::Cone { .. } => ([0.0, 0.0], [param.cos(), param.sin()]),
            Domain2D::Strip { .. } => ([0.0, param], [1.0, 0.0]),
        }
    }

    pub fn point(&self, param: f64, t: f64) -> Point {
        let (o, d) = self.ray(param);
        [o[0] + t * d[0], o[1] + t * d[1]]
    }

    /// θ₀ + t·v with v the bisecting search direction.
    pub fn interior_point(&self, t: f64) -> Point {
        let (a, b) = self.param_range();
        self.point(0.5 * (a + b), t)
    }

    /// Direction of the τ-shift applied to the outer region.
    pub fn shift_angle(&self) -> f64 {
        match *self {
            Domain2D::Cone { phi } => 0.5 * phi,
            Domain2D::Strip { .. } => 0.0,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Domain2D::Cone { phi } => {
                let a = p[1].atan2(p[0]);
                let a = if a < 0.0 && a > -1e-15 { 0.0 } else { a };
                (p[0] != 0.0 || p[1] != 0.0) && a >= 0.0 && a <= phi
            }
            Domain2D::Strip { lo, hi } => p[0] > 0.0 && p[1] >= lo && p[1] < hi,
        }
    }

    /// Grid anchor for meshing Δ: the corner of the τ-interior at the base
    /// point, so the node pattern around θ₀ scales with the mesh width.
    pub fn mesh_anchor(&self, tau: f64) -> Point {
        match *self {
            Domain2D::Cone { phi } => {
                let s = tau / (0.5 * phi).sin();
                [s * (0.5 * phi).cos(), s * (0.5 * phi).sin()]
            }
            Domain2D::Strip { lo, .. } => [tau, lo + tau],
        }
    }

    /// Convex polygon of points at distance ≥ τ from the domain boundary,
    /// truncated at radius `reach`.
    fn tau_interior(&self, tau: f64, reach: f64) -> Vec<Point> {
        match *self {
            Domain2D::Cone { phi } => {
                let s = tau / (0.5 * phi).sin();
                let apex = [s * (0.5 * phi).cos(), s * (0.5 * phi).sin()];
                let mut poly: Vec<Point> =
                    (0..=8).map(|k| phi * k as f64 / 8.0).map(|a| [apex[0] + reach * a.cos(), apex[1] + reach * a.sin()]).collect();
                if phi < PI - 1e-12 {
                    poly.push(apex);
                }
                poly
            }
            Domain2D::Strip { lo, hi } => vec![[tau, lo + tau], [reach, lo + tau], [reach, hi - tau], [tau, hi - tau]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recipe4Config {
    pub eta: f64,
    pub tau: f64,
    pub delta: f64,
    pub eps_tilde: f64,
    pub eps: f64,
    pub domain: Domain2D,
    /// Distance N of the far point used for ĉ when `c` is unknown.
    pub n_cap: f64,
    /// Initial line-search step; `None` means max(1, target).
    pub s0: Option<f64>,
    /// Line-search tolerance on |W − target|.
    pub ls_tol: f64,
    /// Ray-parameter offset of the level-curve end points from the domain edges.
    pub edge_offset: f64,
    pub c: Option<f64>,
    pub arc_rule: ArcLengthRule,
}

impl Recipe4Config {
    /// Defaults τ = ε/1000, ε̃ = ε.
    pub fn new(eta: f64, delta: f64, eps: f64, domain: Domain2D) -> Self {
        let tau = eps / 1000.0;
        Self {
            eta,
            tau,
            delta,
            eps_tilde: eps,
            eps,
            domain,
            n_cap: 1e3,
            s0: None,
            ls_tol: 1e-9,
            edge_offset: tau,
            c: None,
            arc_rule: ArcLengthRule::Trapezoid,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self.edge_offset = tau;
        self
    }

    pub fn validate(&self) -> Result<(), NumericError> {
        let pos = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(NumericError::Domain(format!("{name} = {v} must be positive"))) };
        pos("eta", self.eta)?;
        pos("tau", self.tau)?;
        pos("eps", self.eps)?;
        pos("eps_tilde", self.eps_tilde)?;
        pos("ls_tol", self.ls_tol)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(NumericError::Domain(format!("delta = {} outside (0, 1)", self.delta)));
        }
        if self.eps_tilde > self.eps {
            return Err(NumericError::Configuration(format!("eps_tilde {} exceeds eps {}", self.eps_tilde, self.eps)));
        }
        self.domain.validate()
    }

    pub fn w_upper(&self) -> f64 {
        -(0.5 * self.delta).ln() / self.eta
    }

    fn step_for(&self, target: f64) -> f64 {
        self.s0.unwrap_or(target.max(1.0))
    }
}

const MAX_MARCH: usize = 10_000;
const MAX_POINTS: usize = 1 << 20;

/// Move along the ray through `start` until |W − target| ≤ tol: march by ±s
/// until the target is crossed, halve s, repeat. Steps toward the ray's
/// origin never go past half the remaining distance, and s doubles after
/// every 32 moves in one direction.
pub fn line_search<W: Fn(f64, f64) -> f64>(domain: &Domain2D, start: Point, step: f64, target_w: f64, tol: f64, w: &W) -> Result<Point, NumericError> {
    let t0 = domain.t_of(start);
    if !(t0 > 0.0) {
        return Err(NumericError::Domain(format!("line search start {start:?} has no direction")));
    }
    if !(step > 0.0) {
        return Err(NumericError::Domain(format!("line search step {step} must be positive")));
    }
    let param = domain.param_of(start);
    let f = |t: f64| {
        let p = domain.point(param, t);
        let v = w(p[0], p[1]);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut t, mut s) = (t0, step);
    let mut v = f(t);
    while (v - target_w).abs() > tol {
        let mut n = 0;
        if v > target_w {
            while v > target_w {
                t = (t - s).max(0.5 * t);
                v = f(t);
                n += 1;
                if n % 32 == 0 {
                    s *= 2.0;
                }
                if n > MAX_MARCH || t < 1e-300 {
                    return Err(NumericError::NonMonotone(format!("W stays above {target_w} toward the base point at parameter {param}")));
                }
            }
        } else {
            while v < target_w {
                t += s;
                v = f(t);
                n += 1;
                if n % 32 == 0 {
                    s *= 2.0;
                }
                if !t.is_finite() {
                    n = MAX_MARCH + 1;
                }
                if n > MAX_MARCH {
                    return Err(NumericError::NonMonotone(format!("W stays below {target_w} along the ray at parameter {param}")));
                }
            }
        }
        s *= 0.5;
        if s < 1e-15 * t.max(1.0) && (v - target_w).abs() > tol {
            return Err(NumericError::NonMonotone(format!("step underflow at parameter {param}, t = {t}, |W − w| = {}", (v - target_w).abs())));
        }
    }
    Ok(domain.point(param, t))
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Piecewise-linear level curve at `target_w`. End points come from line
/// searches at ray parameters `phi_l + tol` (first) and `phi_r − tol`
/// (last); each pass inserts a point on the mid-parameter ray of every
/// segment longer than `stop_eps`, starting where that ray meets the chord, with the step halved
/// per pass. Stops when every segment is at most `stop_eps` long.
pub fn pathfind<W: Fn(f64, f64) -> f64>(
    domain: &Domain2D,
    phi_r: f64,
    phi_l: f64,
    step: f64,
    tol: f64,
    target_w: f64,
    stop_eps: f64,
    w: &W,
) -> Result<Polyline, NumericError> {
    let start = |param: f64, t: f64| domain.point(param, t);
    let first = line_search(domain, start(phi_l + tol, step), step, target_w, tol, w)?;
    let last = line_search(domain, start(phi_r - tol, step), step, target_w, tol, w)?;
    let mut pts = vec![first, last];
    let mut params = vec![phi_l + tol, phi_r - tol];
    let mut k = 0;
    while pts.windows(2).any(|s| dist(s[0], s[1]) > stop_eps) {
        k += 1;
        if k > 30 {
            return Err(NumericError::Resolution(format!("level curve at w = {target_w} not resolved to {stop_eps} after 30 subdivisions")));
        }
        let s_k = step / 2f64.powi(k);
        let mut next = Vec::with_capacity(2 * pts.len() - 1);
        let mut next_params = Vec::with_capacity(2 * pts.len() - 1);
        for i in 0..pts.len() - 1 {
            let (a, b) = (pts[i], pts[i + 1]);
            next.push(a);
            next_params.push(params[i]);
            if dist(a, b) <= stop_eps {
                continue;
            }
            let mid = 0.5 * (params[i] + params[i + 1]);
            let (o, d) = domain.ray(mid);
            let ab = [b[0] - a[0], b[1] - a[1]];
            let t = cross([a[0] - o[0], a[1] - o[1]], ab) / cross(d, ab);
            let t = if t.is_finite() && t > 0.0 { t } else { 0.5 * (domain.t_of(a) + domain.t_of(b)) };
            next.push(line_search(domain, start(mid, t), s_k, target_w, tol, w)?);
            next_params.push(mid);
        }
        next.push(*pts.last().unwrap());
        next_params.push(*params.last().unwrap());
        if next.len() > MAX_POINTS {
            return Err(NumericError::Resolution(format!("level curve at w = {target_w} needs more than {MAX_POINTS} points at spacing {stop_eps}")));
        }
        pts = next;
        params = next_params;
    }
    Ok(Polyline::new(pts))
}

/// The cutoff region Π and its τ-interior Δ with the curves that bound them.
#[derive(Debug, Clone)]
pub struct CutoffRegion {
    pub pi: PolygonalRegion,
    pub delta: PolygonalRegion,
    pub w_upper: f64,
    pub w_lower: f64,
    pub outer: Polyline,
    pub inner: Polyline,
}

fn level_curve<W: Fn(f64, f64) -> f64>(cfg: &Recipe4Config, target: f64, stop_eps: f64, w: &W) -> Result<Polyline, NumericError> {
    let (a, b) = cfg.domain.param_range();
    let off = cfg.edge_offset + cfg.ls_tol;
    pathfind(&cfg.domain, a + off, b - off, cfg.step_for(target), cfg.ls_tol, target, stop_eps, w)
}

fn base_points(domain: &Domain2D, curve: &Polyline) -> Vec<Point> {
    match domain {
        Domain2D::Cone { .. } => vec![[0.0, 0.0]],
        Domain2D::Strip { .. } => {
            let (p, q) = (curve.points[0], curve.points[curve.points.len() - 1]);
            vec![[0.0, p[1]], [0.0, q[1]]]
        }
    }
}

fn hull_with_base(domain: &Domain2D, curve: &Polyline) -> Vec<Point> {
    let mut pts = base_points(domain, curve);
    pts.extend(curve.points.iter().copied());
    simplify_polygon(&convex_hull(&pts), 1e-9)
}

/// Outer region from the level curve at w* = −log(δ/2)/η and inner region
/// from w_* = Ŵ(θ₀ + τv) − log(1 − (δ+τ)/2)/η, each the convex hull of the
/// curve and the base point (base edge for strips). Returns
/// (Π ∩ T_τ(Π)) \ Π* and its clip to the τ-interior of the domain.
pub fn region_construct<W: Fn(f64, f64) -> f64>(cfg: &Recipe4Config, w: &W) -> Result<CutoffRegion, NumericError> {
    cfg.validate()?;
    let w_upper = cfg.w_upper();
    let p = cfg.domain.interior_point(cfg.tau);
    let w_lower = w(p[0], p[1]) - (1.0 - 0.5 * (cfg.delta + cfg.tau)).ln() / cfg.eta;
    if !(w_lower < w_upper) {
        return Err(NumericError::Configuration(format!("inner level {w_lower} is not below outer level {w_upper}; δ or τ too large")));
    }
    let outer = level_curve(cfg, w_upper, cfg.eps_tilde, w)?;
    let chord = dist(outer.points[0], outer.points[outer.points.len() - 1]);
    let inner_probe = level_curve(cfg, w_lower, f64::INFINITY, w)?;
    let inner_chord = dist(inner_probe.points[0], inner_probe.points[1]);
    let inner = level_curve(cfg, w_lower, cfg.eps_tilde.min(inner_chord / 8.0), w)?;

    let pi_outer = hull_with_base(&cfg.domain, &outer);
    let shifted = shift_region(&PolygonalRegion { boundary: pi_outer.clone(), holes: vec![] }, cfg.tau, cfg.domain.shift_angle()).boundary;
    let pi_shift = simplify_polygon(&clip_convex(&pi_outer, &shifted)?, 1e-9);
    let pi_inner = hull_with_base(&cfg.domain, &inner);
    let reach = 2.0 * (chord + outer.points.iter().map(|q| q[0].hypot(q[1])).fold(0.0, f64::max)) + 1.0;
    let delta_poly = simplify_polygon(&clip_convex(&pi_shift, &cfg.domain.tau_interior(cfg.tau, reach))?, 1e-9);
    if pi_shift.len() < 3 || delta_poly.len() < 3 || polygon_area(&delta_poly) <= polygon_area(&pi_inner) {
        return Err(NumericError::Configuration("cutoff region is empty".into()));
    }
    let pi = PolygonalRegion::new(pi_shift, vec![pi_inner.clone()])?;
    let delta = PolygonalRegion::new(delta_poly, vec![pi_inner])?;
    Ok(CutoffRegion { pi, delta, w_upper, w_lower, outer, inner })
}

/// Node densities on the ε-mesh of Δ with the intermediate quantities.
#[derive(Debug, Clone)]
pub struct GridDensity2D {
    pub mesh: Arc<TriMesh>,
    pub node_densities: Vec<f64>,
    pub config: Recipe4Config,
    pub region: CutoffRegion,
    pub w_nodes: Vec<f64>,
    pub u_nodes: Vec<f64>,
    pub lengths: Vec<f64>,
    pub det_j: Vec<f64>,
    pub c_hat: f64,
}

impl GridDensity2D {
    /// Linear interpolation on the mesh, zero off it.
    pub fn evaluate(&self, p: Point) -> f64 {
        match self.mesh.locate(p) {
            Some((t, l)) => {
                let tri = self.mesh.triangles[t];
                l[0] * self.node_densities[tri[0]] + l[1] * self.node_densities[tri[1]] + l[2] * self.node_densities[tri[2]]
            }
            None => 0.0,
        }
    }

    /// Integral of the interpolant (exact for piecewise-linear fields).
    pub fn mass(&self) -> f64 {
        self.mesh
            .triangles
            .iter()
            .enumerate()
            .map(|(t, tri)| self.mesh.triangle_area(t) * tri.iter().map(|&k| self.node_densities[k]).sum::<f64>() / 3.0)
            .sum()
    }

    /// CSV with columns theta1, theta2, density, one row per mesh node.
    pub fn write_csv<O: Write>(&self, mut out: O) -> Result<(), NumericError> {
        let io = |e: std::io::Error| NumericError::Io(e.to_string());
        writeln!(out, "theta1,theta2,density").map_err(io)?;
        for (p, d) in self.mesh.nodes.iter().zip(&self.node_densities) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p[0], p[1], d).map_err(io)?;
        }
        Ok(())
    }
}

pub const LENGTH_FLOOR: f64 = 1e-10;

fn checked_length(l: f64, p: Point) -> Result<f64, NumericError> {
    if l >= LENGTH_FLOOR {
        Ok(l)
    } else {
        Err(NumericError::DegenerateLevelCurve(format!("level curve through {p:?} has length {l}")))
    }
}

/// Full pipeline: cutoff region, ε̃-mesh carrying Ŵ and its hat gradients,
/// ε-mesh carrying û₁ and the density nodes, one traced level curve per
/// density node, then |det Ĵ| η e^{−ηŴ} / ((1 − e^{−ηĉ}) l̂) at each node.
pub fn approximate_density_2d<W: Fn(f64, f64) -> f64 + Sync>(cfg: &Recipe4Config, w: &W) -> Result<GridDensity2D, NumericError> {
    let region = region_construct(cfg, w)?;
    let anchor = cfg.domain.mesh_anchor(cfg.tau);
    let fine = Arc::new(triangulate_anchored(&region.delta, cfg.eps_tilde, anchor)?);
    let coarse = if cfg.eps == cfg.eps_tilde { fine.clone() } else { Arc::new(triangulate_anchored(&region.delta, cfg.eps, anchor)?) };

    let w_at = |p: Point| {
        let v = w(p[0], p[1]);
        if v.is_finite() {
            v
        } else {
            region.w_upper
        }
    };
    let w_fine: Vec<f64> = fine.nodes.par_iter().map(|&p| w_at(p)).collect();
    let w_field = PiecewiseLinearField::new(fine.clone(), w_fine)?;
    let w_nodal = w_field.nodal_gradients()?;

    let w_nodes: Vec<f64> = if Arc::ptr_eq(&fine, &coarse) { w_field.values.clone() } else { coarse.nodes.par_iter().map(|&p| w_at(p)).collect() };
    let curves: Vec<(f64, f64)> = coarse
        .nodes
        .par_iter()
        .zip(w_nodes.par_iter())
        .map(|(&p, &wv)| {
            let curve = level_curve(cfg, wv, cfg.eps_tilde, w)?;
            let l = checked_length(curve.total_length(cfg.arc_rule), p)?;
            Ok((curve.arc_length_to_x(p[0], cfg.arc_rule), l))
        })
        .collect::<Result<_, NumericError>>()?;
    let (u_nodes, lengths): (Vec<f64>, Vec<f64>) = curves.into_iter().unzip();
    let u_field = PiecewiseLinearField::new(coarse.clone(), u_nodes.clone())?;
    let u_nodal = u_field.nodal_gradients()?;

    let c_hat = match cfg.c {
        Some(c) => c,
        None => {
            let (a, b) = cfg.domain.param_range();
            let p = cfg.domain.point(0.5 * (a + b), cfg.n_cap);
            w(p[0], p[1])
        }
    };
    let norm = if c_hat.is_infinite() { 1.0 } else { -(-cfg.eta * c_hat).exp_m1() };
    let mut det_j = Vec::with_capacity(coarse.nodes.len());
    let mut dens = Vec::with_capacity(coarse.nodes.len());
    for (k, &p) in coarse.nodes.iter().enumerate() {
        let gw = w_field.gradient_at(p, &w_nodal).unwrap_or([f64::NAN; 2]);
        let gu = u_nodal[k];
        let det = gw[0] * gu[1] - gw[1] * gu[0];
        det_j.push(det);
        let value = if cfg.domain.contains(p) && det.is_finite() {
            det.abs() * cfg.eta * (-cfg.eta * w_nodes[k]).exp() / (norm * lengths[k])
        } else {
            0.0
        };
        dens.push(value);
    }
    Ok(GridDensity2D { mesh: coarse, node_densities: dens, config: *cfg, region, w_nodes, u_nodes, lengths, det_j, c_hat })
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRecord {
    pub epsilon: f64,
    pub tv: f64,
    pub runtime_ms: f64,
}

/// TV to `oracle` for each ε; `make` builds the configuration for an ε.
pub fn convergence_study<W, M, O>(eps: &[f64], make: M, w: &W, oracle: O) -> Result<Vec<StudyRecord>, NumericError>
where
    W: Fn(f64, f64) -> f64 + Sync,
    M: Fn(f64) -> Recipe4Config,
    O: Fn(f64, f64) -> f64 + Sync,
{
    eps.iter()
        .map(|&e| {
            let start = Instant::now();
            let d = approximate_density_2d(&make(e), w)?;
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let tv = crate::tv::tv_mesh(&d.mesh, |x, y| d.evaluate([x, y]), &oracle, 1e-4);
            Ok(StudyRecord { epsilon: e, tv, runtime_ms })
        })
        .collect()
}

/// Least-squares fit tv ≈ a·ε + b with a, b ≥ 0; returns (a, b, rms residual).
pub fn fit_linear_bound(records: &[StudyRecord]) -> (f64, f64, f64) {
    let n = records.len() as f64;
    let (sx, sy) = records.iter().fold((0.0, 0.0), |acc, r| (acc.0 + r.epsilon, acc.1 + r.tv));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = records.iter().map(|r| (r.epsilon - mx).powi(2)).sum();
    let sxy: f64 = records.iter().map(|r| (r.epsilon - mx) * (r.tv - my)).sum();
    let (mut a, mut b) = (sxy / sxx, my - sxy / sxx * mx);
    if a < 0.0 {
        a = 0.0;
        b = my;
    } else if b < 0.0 {
        b = 0.0;
        a = records.iter().map(|r| r.epsilon * r.tv).sum::<f64>() / records.iter().map(|r| r.epsilon * r.epsilon).sum::<f64>();
    }
    let rms = (records.iter().map(|r| (r.tv - a * r.epsilon - b).powi(2)).sum::<f64>() / n).sqrt();
    (a, b, rms)
}

/// W₂ from N(m, σ²) to the Dirac at 0, on the upper half plane.
pub fn gaussian_distance(m: f64, s: f64) -> f64 {
    m.hypot(s)
}

/// W₁ from GPD(σ, ξ) to the Dirac at 0 on (0, ∞) × [0, 1).
pub fn gpd_distance(s: f64, xi: f64) -> f64 {
    if xi < 1.0 {
        s / (1.0 - xi)
    } else {
        f64::INFINITY
    }
}

/// η = 1, δ = 0.01, ε̃ = ε, τ = ε/1000 on the half plane.
pub fn gaussian_study_config(eps: f64) -> Recipe4Config {
    Recipe4Config::new(1.0, 0.01, eps, Domain2D::Cone { phi: PI })
}

/// η = 20, δ = 0.01, ε̃ = ε, τ = 0.001 on (0, ∞) × [0, 1).
pub fn gpd_study_config(eps: f64) -> Recipe4Config {
    Recipe4Config::new(20.0, 0.01, eps, Domain2D::Strip { lo: 0.0, hi: 1.0 }).with_tau(0.001)
}
