use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use wcp::geometry::{trapezoid_arc_length, ArcLengthRule};
use wcp::multivariate::gaussian_2d_density;
use wcp::numeric1d::NumericError;
use wcp::numeric2d::*;

const QUARTER: Domain2D = Domain2D::Cone { phi: FRAC_PI_2 };
const HALF: Domain2D = Domain2D::Cone { phi: PI };

fn radius(x: f64, y: f64) -> f64 {
    x.hypot(y)
}

fn norm(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

#[test]
fn line_search_on_radial_field() {
    let p = line_search(&QUARTER, [2.0, 0.0], 1.0, 1.0, 1e-6, &radius).unwrap();
    assert!((norm(p) - 1.0).abs() <= 1e-6);
    assert_eq!(p[1], 0.0);
    assert!(p[0] > 0.0);
}

#[test]
fn line_search_start_on_target() {
    let calls = std::cell::Cell::new(0);
    let w = |x: f64, y: f64| {
        calls.set(calls.get() + 1);
        x.hypot(y)
    };
    let p = line_search(&QUARTER, [0.6, 0.8], 1.0, 1.0, 1e-9, &w).unwrap();
    assert_eq!(p, [0.6, 0.8]);
    assert_eq!(calls.get(), 1);
}

#[test]
fn line_search_gaussian_diagonal() {
    let tol = 1e-8;
    let start = [FRAC_PI_4.cos() * 3.0, FRAC_PI_4.sin() * 3.0];
    let p = line_search(&HALF, start, 1.0, 0.7, tol, &gaussian_distance).unwrap();
    assert!((norm(p) - 0.7).abs() <= tol);
    assert!((p[1].atan2(p[0]) - FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn line_search_errors() {
    assert!(matches!(line_search(&QUARTER, [0.0, 0.0], 1.0, 1.0, 1e-6, &radius), Err(NumericError::Domain(_))));
    // Bounded field never reaches the target.
    let bounded = |x: f64, y: f64| 1.0 - (-x.hypot(y)).exp();
    assert!(matches!(line_search(&QUARTER, [1.0, 1.0], 1.0, 2.0, 1e-6, &bounded), Err(NumericError::NonMonotone(_))));
    // Field above the target everywhere on the ray.
    let high = |x: f64, y: f64| 5.0 + x.hypot(y);
    assert!(matches!(line_search(&QUARTER, [1.0, 1.0], 1.0, 2.0, 1e-6, &high), Err(NumericError::NonMonotone(_))));
}

#[test]
fn strip_line_search_moves_along_first_axis() {
    let strip = Domain2D::Strip { lo: 0.0, hi: 1.0 };
    let p = line_search(&strip, [0.3, 0.25], 1.0, 2.0, 1e-10, &gpd_distance).unwrap();
    assert_eq!(p[1], 0.25);
    assert!((p[0] - 1.5).abs() < 1e-9);
}

#[test]
fn quarter_circle_arc_length() {
    let tol = 1e-10;
    for stop in [0.2, 0.05, 0.01] {
        let curve = pathfind(&QUARTER, tol, FRAC_PI_2 - tol, 1.0, tol, 1.0, stop, &radius).unwrap();
        let l = trapezoid_arc_length(&curve, curve.points.len() - 1);
        assert!((l - FRAC_PI_2).abs() <= stop, "stop {stop}: {l}");
        let chord = curve.total_length(ArcLengthRule::Chord);
        assert!((chord - FRAC_PI_2).abs() <= stop * stop, "stop {stop}: {chord}");
    }
}

#[test]
fn two_levels_give_equal_angles() {
    let tol = 1e-10;
    // Initial chord is √2; two halvings give chords 2 sin(π/16) ≈ 0.39.
    let curve = pathfind(&QUARTER, 0.01, FRAC_PI_2 - 0.01, 1.0, tol, 1.0, 0.5, &radius).unwrap();
    assert_eq!(curve.points.len(), 5);
    let (a0, a4) = (FRAC_PI_2 - 0.01 + tol, 0.01 - tol);
    for (k, p) in curve.points.iter().enumerate() {
        let expected = a0 + (a4 - a0) * k as f64 / 4.0;
        assert!((p[1].atan2(p[0]) - expected).abs() < 1e-9, "{k}: {p:?}");
    }
}

#[test]
fn loose_stop_keeps_end_points() {
    let curve = pathfind(&QUARTER, 0.1, 1.4, 1.0, 1e-10, 1.0, 10.0, &radius).unwrap();
    assert_eq!(curve.points.len(), 2);
}

#[test]
fn subdivision_depth_limit() {
    // The level set at 1 jumps from radius 1 to radius 1/2 across angle 0.7.
    let w = |x: f64, y: f64| if y.atan2(x) < 0.7 { x.hypot(y) } else { 2.0 * x.hypot(y) };
    let r = pathfind(&QUARTER, 0.1, 1.4, 1.0, 1e-10, 1.0, 0.1, &w);
    assert!(matches!(r, Err(NumericError::Resolution(_))), "{r:?}");
}

#[test]
fn level_curve_fidelity_on_fields() {
    let fields: Vec<(Domain2D, Box<dyn Fn(f64, f64) -> f64>, f64)> = vec![
        (QUARTER, Box::new(radius), 2.0),
        (HALF, Box::new(|x: f64, y: f64| (x * x + 4.0 * y * y).sqrt()), 1.5),
        (Domain2D::Strip { lo: 0.0, hi: 1.0 }, Box::new(gpd_distance), 0.1),
    ];
    for (domain, w, target) in &fields {
        let (a, b) = domain.param_range();
        let (tol, stop) = (1e-9, 0.05);
        let curve = pathfind(domain, a + 1e-3, b - 1e-3, 1.0, tol, *target, stop, w).unwrap();
        for p in &curve.points {
            assert!((w(p[0], p[1]) - target).abs() <= tol);
        }
        for s in curve.points.windows(2) {
            assert!(norm([s[0][0] - s[1][0], s[0][1] - s[1][1]]) <= stop);
        }
    }
}

fn quarter_config(delta: f64, eps: f64) -> Recipe4Config {
    Recipe4Config::new(1.0, delta, eps, QUARTER).with_tau(1e-4)
}

#[test]
fn radial_region_outer_radius() {
    let cfg = quarter_config(0.01, 0.1);
    let r = region_construct(&cfg, &radius).unwrap();
    assert!((r.w_upper - 5.298317366548036).abs() < 1e-12);
    for p in &r.outer.points {
        assert!((norm(p.to_owned()) - 5.2983).abs() < 1e-4);
    }
    let inner = r.inner.points.iter().map(|&p| norm(p)).fold(0.0, f64::max);
    assert!(inner < 0.01, "{inner}");
    // Annular sector minus the shift and τ strips.
    let sector = PI / 4.0 * (r.w_upper * r.w_upper);
    assert!(r.delta.area() < sector && r.delta.area() > 0.97 * sector, "{}", r.delta.area());
}

#[test]
fn smaller_delta_grows_region() {
    let mut prev = 0.0;
    for delta in [0.2, 0.1, 0.05, 0.01, 0.001] {
        let r = region_construct(&quarter_config(delta, 0.2), &radius).unwrap();
        assert!(r.w_upper > prev);
        let out = r.outer.points.iter().map(|&p| norm(p)).fold(f64::INFINITY, f64::min);
        assert!(out > prev);
        prev = out;
    }
}

#[test]
fn nodes_lie_between_cutoff_levels() {
    let cfg = gaussian_study_config(0.2);
    let d = approximate_density_2d(&cfg, &gaussian_distance).unwrap();
    // Δ sits inside the chord polygon of the outer curve, so W ≤ w* at nodes;
    // the inner curve bounds W from below up to the chord sag ε̃²/(8 w_*).
    let sag = cfg.eps_tilde * cfg.eps_tilde;
    for &w in &d.w_nodes {
        assert!(w <= d.region.w_upper + 1e-9, "{w}");
        assert!(w >= d.region.w_lower - sag, "{w}");
    }
}

#[test]
fn empty_region_is_configuration_error() {
    // τ so large that the inner level passes the outer one.
    let cfg = Recipe4Config::new(1.0, 0.9, 0.1, QUARTER).with_tau(1.0);
    assert!(matches!(region_construct(&cfg, &radius), Err(NumericError::Configuration(_))));
}

#[test]
fn config_validation() {
    let base = quarter_config(0.01, 0.1);
    let bad = [
        Recipe4Config { eta: 0.0, ..base },
        Recipe4Config { delta: 1.0, ..base },
        Recipe4Config { tau: -1.0, ..base },
        Recipe4Config { eps_tilde: 0.2, ..base },
        Recipe4Config { domain: Domain2D::Cone { phi: 4.0 }, ..base },
        Recipe4Config { domain: Domain2D::Strip { lo: 1.0, hi: 1.0 }, ..base },
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
    assert!(base.validate().is_ok());
    let d = Recipe4Config::new(1.0, 0.01, 0.3, HALF);
    assert_eq!((d.tau, d.eps_tilde, d.n_cap), (0.3 / 1000.0, 0.3, 1e3));
}

#[test]
fn radial_density_matches_hand_construction() {
    // W = r on a cone of angle φ: the level set at r is an arc of length φr, so
    // the prior is ηe^{−ηr}/(φr).
    let eta = 1.0;
    let cfg = Recipe4Config { eta, ..quarter_config(0.2, 0.05) };
    let d = approximate_density_2d(&cfg, &radius).unwrap();
    let mut checked = 0;
    for (p, &v) in d.mesh.nodes.iter().zip(&d.node_densities) {
        let (r, a) = (norm(*p), p[1].atan2(p[0]));
        if (0.5..3.0).contains(&r) && (0.2..FRAC_PI_2 - 0.2).contains(&a) {
            let exact = eta * (-eta * r).exp() / (FRAC_PI_2 * r);
            assert!((v / exact - 1.0).abs() < 0.1, "node {p:?}: {v} vs {exact}");
            checked += 1;
        }
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn jacobian_nonzero_at_interior_nodes() {
    let d = approximate_density_2d(&gaussian_study_config(0.2), &gaussian_distance).unwrap();
    let mut interior = 0;
    for (k, p) in d.mesh.nodes.iter().enumerate() {
        if d.region.delta.nearest_boundary(*p).0 > 2.0 * d.config.eps {
            assert!(d.det_j[k].abs() > 1e-10, "{p:?}: {}", d.det_j[k]);
            interior += 1;
        }
    }
    assert!(interior > 100);
    assert!(d.node_densities.iter().all(|&v| v >= 0.0 && v.is_finite()));
}

#[test]
fn mass_loss_shrinks_with_delta() {
    let mut prev = f64::INFINITY;
    for delta in [0.05, 0.02, 0.01] {
        let cfg = Recipe4Config { delta, ..gaussian_study_config(0.1) };
        let d = approximate_density_2d(&cfg, &gaussian_distance).unwrap();
        let loss = (1.0 - d.mass()).abs();
        assert!(loss < prev, "delta {delta}: loss {loss}");
        prev = loss;
    }
}

#[test]
fn arc_parameter_is_uniform_on_level_curve() {
    // Sample by length along a traced Gaussian level curve and map through û/l̂.
    let tol = 1e-10;
    let curve = pathfind(&HALF, 1e-4, PI - 1e-4, 1.0, tol, 2.0, 0.01, &gaussian_distance).unwrap();
    let rule = ArcLengthRule::Chord;
    let cum = curve.cumulative(rule);
    let total = *cum.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut u: Vec<f64> = (0..1000)
        .map(|_| {
            let s = rng.random::<f64>() * total;
            let i = cum.partition_point(|&c| c <= s).clamp(1, cum.len() - 1) - 1;
            let f = (s - cum[i]) / (cum[i + 1] - cum[i]);
            let x = curve.points[i][0] + f * (curve.points[i + 1][0] - curve.points[i][0]);
            curve.arc_length_to_x(x, rule) / total
        })
        .collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let ks = u.iter().enumerate().map(|(i, &v)| ((i + 1) as f64 / n - v).max(v - i as f64 / n)).fold(0.0, f64::max);
    assert!(ks < 0.05, "{ks}");
}

#[test]
fn density_csv_and_evaluation() {
    let d = approximate_density_2d(&gaussian_study_config(0.5), &gaussian_distance).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta1,theta2,density"));
    assert_eq!(lines.count(), d.mesh.nodes.len());
    let k = d.node_densities.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(d.evaluate(d.mesh.nodes[k]), d.node_densities[k]);
    assert_eq!(d.evaluate([0.0, -1.0]), 0.0);
    assert_eq!(d.evaluate([100.0, 1.0]), 0.0);
    assert!(d.c_hat == 1e3);
}

#[test]
fn flat_sector_is_rejected() {
    // W barely grows for angles above 0.5, so the outer level curve runs off
    // to an unmeshable distance there.
    let w = |x: f64, y: f64| if y.atan2(x) < 0.5 { x.hypot(y) } else { 1e-9 * x.hypot(y) };
    let r = approximate_density_2d(&Recipe4Config::new(1.0, 0.1, 0.5, QUARTER), &w);
    assert!(matches!(r, Err(NumericError::Resolution(_) | NumericError::Geometry(_))), "{r:?}");
}

#[test]
fn gaussian_study_small() {
    let oracle = |m: f64, s: f64| if s > 0.0 { gaussian_2d_density(m, s, 1.0) } else { 0.0 };
    let recs = convergence_study(&[0.5, 0.3], gaussian_study_config, &gaussian_distance, oracle).unwrap();
    assert!(recs[1].tv < recs[0].tv);
    assert!((recs[0].tv - 0.2233).abs() < 5e-3, "{}", recs[0].tv);
    let json = serde_json::to_string(&recs[0]).unwrap();
    assert!(json.contains("\"epsilon\":0.5") && json.contains("runtime_ms"));
}
