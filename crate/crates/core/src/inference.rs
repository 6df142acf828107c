//! Simulated-data MAP studies comparing priors: AR(1) coefficient, Gaussian
//! (m, σ) and generalized Pareto (σ, ξ).

use crate::multivariate::{gaussian_2d_density, gaussian_two_step_density, gpd_2d_density, gpd_two_step_density};
use crate::roots::{golden_max, nelder_mead_max};
use crate::univariate::{ar1_family, ar1_phi_prior, UnivariatePrior};
use crate::validation::{calibrate_eta, CalibrationTarget, Direction, TailLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("prior construction failed: {0}")]
    Prior(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// X₀ ~ N(0, σ²), Xₜ = φXₜ₋₁ + εₜ with εₜ ~ N(0, σ²(1 − φ²)).
pub fn simulate_ar1<R: Rng + ?Sized>(phi: f64, sigma: f64, n: usize, rng: &mut R) -> Result<Vec<f64>, InferenceError> {
    if !(phi.abs() <= 1.0) || !(sigma > 0.0) {
        return Err(InferenceError::Configuration(format!("AR(1) needs |phi| <= 1 and sigma > 0, got phi = {phi}, sigma = {sigma}")));
    }
    let innov = sigma * (1.0 - phi * phi).max(0.0).sqrt();
    let mut x = Vec::with_capacity(n);
    let mut prev = sigma * rng.sample::<f64, _>(StandardNormal);
    for t in 0..n {
        if t > 0 {
            prev = phi * prev + innov * rng.sample::<f64, _>(StandardNormal);
        }
        x.push(prev);
    }
    Ok(x)
}

pub fn simulate_gaussian<R: Rng + ?Sized>(m: f64, sigma: f64, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| m + sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Inverse transform from the GPD quantile σ((1 − u)^{−ξ} − 1)/ξ.
pub fn simulate_gpd<R: Rng + ?Sized>(sigma: f64, xi: f64, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| gpd_quantile(rng.random::<f64>(), sigma, xi)).collect()
}

pub fn gpd_quantile(u: f64, sigma: f64, xi: f64) -> f64 {
    let l = -(-u).ln_1p();
    if xi == 0.0 {
        sigma * l
    } else {
        sigma * (xi * l).exp_m1() / xi
    }
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Exact log-likelihood of a stationary AR(1) series with marginal sd σ.
pub fn ar1_loglik(x: &[f64], phi: f64, sigma: f64) -> f64 {
    if !(phi.abs() < 1.0) || x.is_empty() {
        return f64::NEG_INFINITY;
    }
    let v = 1.0 - phi * phi;
    let s2 = sigma * sigma;
    let ss: f64 = x.windows(2).map(|w| (w[1] - phi * w[0]).powi(2)).sum();
    let n = x.len() as f64;
    -0.5 * n * (LN_2PI + s2.ln()) - 0.5 * (n - 1.0) * v.ln() - 0.5 * (x[0] * x[0] + ss / v) / s2
}

pub fn gaussian_loglik(x: &[f64], m: f64, sigma: f64) -> f64 {
    if !(sigma > 0.0) {
        return f64::NEG_INFINITY;
    }
    let n = x.len() as f64;
    let ss: f64 = x.iter().map(|&v| (v - m).powi(2)).sum();
    -0.5 * n * (LN_2PI + 2.0 * sigma.ln()) - 0.5 * ss / (sigma * sigma)
}

/// Log-likelihood of GPD(σ, ξ) with density σ⁻¹(1 + ξx/σ)^{−1/ξ − 1}.
pub fn gpd_loglik(x: &[f64], sigma: f64, xi: f64) -> f64 {
    if !(sigma > 0.0) || !xi.is_finite() {
        return f64::NEG_INFINITY;
    }
    let n = x.len() as f64;
    if xi.abs() < 1e-12 {
        return -n * sigma.ln() - x.iter().sum::<f64>() / sigma;
    }
    let mut s = 0.0;
    for &v in x {
        let z = xi * v / sigma;
        if !(v >= 0.0) || !(z > -1.0) {
            return f64::NEG_INFINITY;
        }
        s += z.ln_1p();
    }
    -n * sigma.ln() - (1.0 / xi + 1.0) * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    /// Coarse grid points per axis before local refinement.
    pub grid_1d: usize,
    pub grid_2d: usize,
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { grid_1d: 200, grid_2d: 64, xtol: 1e-6, max_iter: 2000 }
    }
}

/// Maximizer of `f` on (lo, hi): best of a midpoint grid, then golden section
/// on the two cells around it.
pub fn map_estimate_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opt: &OptimizerSettings) -> Result<(f64, f64), InferenceError> {
    if !(lo < hi) || opt.grid_1d < 2 {
        return Err(InferenceError::Configuration(format!("bad search interval ({lo}, {hi}) or grid {}", opt.grid_1d)));
    }
    let h = (hi - lo) / opt.grid_1d as f64;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in 0..opt.grid_1d {
        let x = lo + (i as f64 + 0.5) * h;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    if !(best.1 > f64::NEG_INFINITY) {
        return Err(InferenceError::DegenerateData("objective is -inf on the whole search grid".into()));
    }
    let guarded = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let (a, b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let refined = golden_max(guarded, a, b, opt.xtol);
    Ok(if refined.1 >= best.1 { refined } else { best })
}

/// Maximizer of `f` on a box: best of a midpoint grid, then Nelder–Mead
/// started there with a half-cell simplex.
pub fn map_estimate_2d<F: Fn(f64, f64) -> f64>(f: F, lo: [f64; 2], hi: [f64; 2], opt: &OptimizerSettings) -> Result<([f64; 2], f64), InferenceError> {
    if !(lo[0] < hi[0] && lo[1] < hi[1]) || opt.grid_2d < 2 {
        return Err(InferenceError::Configuration(format!("bad search box {lo:?}..{hi:?} or grid {}", opt.grid_2d)));
    }
    let n = opt.grid_2d;
    let h = [(hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64];
    let mut best = ([f64::NAN; 2], f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            let p = [lo[0] + (i as f64 + 0.5) * h[0], lo[1] + (j as f64 + 0.5) * h[1]];
            let v = f(p[0], p[1]);
            if v > best.1 {
                best = (p, v);
            }
        }
    }
    if !(best.1 > f64::NEG_INFINITY) {
        return Err(InferenceError::DegenerateData("objective is -inf on the whole search grid".into()));
    }
    let inside = |p: [f64; 2]| {
        if p[0] < lo[0] || p[0] > hi[0] || p[1] < lo[1] || p[1] > hi[1] {
            f64::NEG_INFINITY
        } else {
            f(p[0], p[1])
        }
    };
    let refined = nelder_mead_max(inside, best.0, [0.5 * h[0], 0.5 * h[1]], opt.xtol, opt.max_iter);
    Ok(if refined.1 >= best.1 { refined } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Coefficient φ of a stationary AR(1) series with known marginal sd.
    Ar1 { sigma: f64 },
    /// (m, σ) of i.i.d. normal data.
    Gaussian2d,
    /// (σ, ξ) of i.i.d. generalized Pareto data, ξ ∈ [0, 1).
    Gpd2d,
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Ar1 { .. } => 1,
            _ => 2,
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Model::Ar1 { .. } => &["phi"],
            Model::Gaussian2d => &["m", "sigma"],
            Model::Gpd2d => &["sigma", "xi"],
        }
    }

    /// Box searched by the optimizer.
    pub fn search_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Model::Ar1 { .. } => ([-1.0, 0.0], [1.0, 0.0]),
            Model::Gaussian2d => ([-2.0, 1e-3], [2.0, 2.0]),
            Model::Gpd2d => ([1e-3, 0.0], [1.0, 0.999]),
        }
    }

    fn simulate<R: Rng + ?Sized>(&self, theta: &[f64], n: usize, rng: &mut R) -> Result<Vec<f64>, InferenceError> {
        match *self {
            Model::Ar1 { sigma } => simulate_ar1(theta[0], sigma, n, rng),
            Model::Gaussian2d => Ok(simulate_gaussian(theta[0], theta[1], n, rng)),
            Model::Gpd2d => Ok(simulate_gpd(theta[0], theta[1], n, rng)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    /// Flat over the search box.
    Uniform,
    Wcp { eta: f64 },
    /// Product of one-parameter priors, first coordinate's distance first.
    TwoStep { eta1: f64, eta2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPrior {
    pub name: String,
    pub spec: PriorSpec,
}

impl NamedPrior {
    pub fn new(name: &str, spec: PriorSpec) -> Self {
        Self { name: name.into(), spec }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    #[serde(flatten)]
    pub model: Model,
    pub true_params: Vec<f64>,
    pub n_obs: usize,
    pub replicates: usize,
    pub priors: Vec<NamedPrior>,
    pub seed: u64,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), InferenceError> {
        let bad = |m: String| Err(InferenceError::Configuration(m));
        if self.replicates < 1 {
            return bad("replicates must be at least 1".into());
        }
        if self.n_obs < 2 {
            return bad(format!("n_obs = {} must be at least 2", self.n_obs));
        }
        if self.true_params.len() != self.model.dim() {
            return bad(format!("{} true parameters given, model has {}", self.true_params.len(), self.model.dim()));
        }
        if self.priors.is_empty() {
            return bad("no priors given".into());
        }
        for p in &self.priors {
            match (self.model, p.spec) {
                (Model::Ar1 { .. }, PriorSpec::TwoStep { .. }) => return bad(format!("prior '{}': two-step priors need two parameters", p.name)),
                (_, PriorSpec::Wcp { eta }) if !(eta > 0.0) => return bad(format!("prior '{}': eta must be positive", p.name)),
                (_, PriorSpec::TwoStep { eta1, eta2 }) if !(eta1 > 0.0 && eta2 > 0.0) => return bad(format!("prior '{}': etas must be positive", p.name)),
                _ => {}
            }
        }
        Ok(())
    }
}

enum LogPrior {
    Flat,
    Univariate(UnivariatePrior),
    Bivariate(Box<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl LogPrior {
    fn build(model: Model, spec: PriorSpec, n_obs: usize) -> Result<Self, InferenceError> {
        let ln = |d: f64| if d > 0.0 { d.ln() } else { f64::NEG_INFINITY };
        Ok(match (model, spec) {
            (_, PriorSpec::Uniform) => LogPrior::Flat,
            (Model::Ar1 { sigma }, PriorSpec::Wcp { eta }) => LogPrior::Univariate(ar1_phi_prior(eta, n_obs, sigma).map_err(|e| InferenceError::Prior(e.to_string()))?),
            (Model::Ar1 { .. }, PriorSpec::TwoStep { .. }) => return Err(InferenceError::Configuration("two-step prior on a one-parameter model".into())),
            (Model::Gaussian2d, PriorSpec::Wcp { eta }) => LogPrior::Bivariate(Box::new(move |m, s| ln(gaussian_2d_density(m, s, eta)))),
            (Model::Gaussian2d, PriorSpec::TwoStep { eta1, eta2 }) => LogPrior::Bivariate(Box::new(move |m, s| ln(gaussian_two_step_density(m, s, eta1, eta2)))),
            (Model::Gpd2d, PriorSpec::Wcp { eta }) => LogPrior::Bivariate(Box::new(move |s, xi| ln(gpd_2d_density(s, xi, eta)))),
            (Model::Gpd2d, PriorSpec::TwoStep { eta1, eta2 }) => LogPrior::Bivariate(Box::new(move |s, xi| ln(gpd_two_step_density(s, xi, eta1, eta2)))),
        })
    }

    fn eval(&self, theta: [f64; 2]) -> f64 {
        match self {
            LogPrior::Flat => 0.0,
            LogPrior::Univariate(p) => {
                let d = p.density(theta[0]);
                if d > 0.0 {
                    d.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            LogPrior::Bivariate(f) => f(theta[0], theta[1]),
        }
    }
}

fn map_for(model: Model, data: &[f64], prior: &LogPrior, opt: &OptimizerSettings) -> Result<Vec<f64>, InferenceError> {
    let (lo, hi) = model.search_box();
    match model {
        Model::Ar1 { sigma } => {
            let f = |phi: f64| ar1_loglik(data, phi, sigma) + prior.eval([phi, 0.0]);
            Ok(vec![map_estimate_1d(f, lo[0], hi[0], opt)?.0])
        }
        Model::Gaussian2d => {
            let f = |m: f64, s: f64| gaussian_loglik(data, m, s) + prior.eval([m, s]);
            Ok(map_estimate_2d(f, lo, hi, opt)?.0.to_vec())
        }
        Model::Gpd2d => {
            let f = |s: f64, xi: f64| gpd_loglik(data, s, xi) + prior.eval([s, xi]);
            Ok(map_estimate_2d(f, lo, hi, opt)?.0.to_vec())
        }
    }
}

/// Generator for one replicate: ChaCha8 seeded with the study seed, on the
/// stream numbered by the replicate index.
pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub replicate: usize,
    pub prior: String,
    pub estimate: Vec<f64>,
}

/// Eigen-structure of a 2D point cloud's sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloudShape {
    pub covariance: [[f64; 2]; 2],
    /// Larger eigenvalue first.
    pub eigenvalues: [f64; 2],
    /// Larger over smaller eigenvalue.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorSummary {
    pub prior: String,
    pub median: Vec<f64>,
    pub iqr: Vec<f64>,
    pub cloud: Option<CloudShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResults {
    pub config: StudyConfig,
    pub rows: Vec<EstimateRow>,
    pub summaries: Vec<PriorSummary>,
}

/// Type-7 sample quantile.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (i, f) = (h.floor() as usize, h - h.floor());
    if i + 1 < sorted.len() {
        sorted[i] + f * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn cloud_shape(points: &[[f64; 2]]) -> CloudShape {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let d = (n - 1.0).max(1.0);
    let (a, b, c) = (sxx / d, sxy / d, syy / d);
    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l1, l2) = (mid + rad, mid - rad);
    CloudShape { covariance: [[a, b], [b, c]], eigenvalues: [l1, l2], ratio: l1 / l2 }
}

/// Largest over smallest of a set of cloud ratios, minus one.
pub fn shape_spread(ratios: &[f64]) -> f64 {
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo - 1.0
}

/// Simulates `replicates` data sets and computes every prior's MAP on each.
/// Replicates run in parallel; output order is by replicate, then prior.
pub fn run_study(config: &StudyConfig) -> Result<StudyResults, InferenceError> {
    config.validate()?;
    let priors: Vec<LogPrior> = config.priors.iter().map(|p| LogPrior::build(config.model, p.spec, config.n_obs)).collect::<Result<_, _>>()?;
    let per_rep: Vec<Vec<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(config.seed, r);
            let data = config.model.simulate(&config.true_params, config.n_obs, &mut rng)?;
            priors.iter().map(|p| map_for(config.model, &data, p, &config.optimizer)).collect()
        })
        .collect::<Result<_, InferenceError>>()?;
    let mut rows = Vec::with_capacity(config.replicates * priors.len());
    for (r, ests) in per_rep.iter().enumerate() {
        for (p, est) in config.priors.iter().zip(ests) {
            rows.push(EstimateRow { replicate: r, prior: p.name.clone(), estimate: est.clone() });
        }
    }
    let dim = config.model.dim();
    let summaries = config
        .priors
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let col = |j: usize| {
                let mut v: Vec<f64> = per_rep.iter().map(|e| e[k][j]).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            let median = (0..dim).map(|j| quantile(&col(j), 0.5)).collect();
            let iqr = (0..dim)
                .map(|j| {
                    let c = col(j);
                    quantile(&c, 0.75) - quantile(&c, 0.25)
                })
                .collect();
            let cloud = (dim == 2 && config.replicates >= 3).then(|| cloud_shape(&per_rep.iter().map(|e| [e[k][0], e[k][1]]).collect::<Vec<_>>()));
            PriorSummary { prior: p.name.clone(), median, iqr, cloud }
        })
        .collect();
    Ok(StudyResults { config: config.clone(), rows, summaries })
}

impl StudyResults {
    pub fn summary(&self, prior: &str) -> Option<&PriorSummary> {
        self.summaries.iter().find(|s| s.prior == prior)
    }

    /// CSV with columns replicate, prior and one per parameter.
    pub fn write_csv<O: Write>(&self, mut out: O) -> Result<(), InferenceError> {
        let io = |e: std::io::Error| InferenceError::Io(e.to_string());
        writeln!(out, "replicate,prior,{}", self.config.model.param_names().join(",")).map_err(io)?;
        for r in &self.rows {
            let vals: Vec<String> = r.estimate.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{},{},{}", r.replicate, r.prior, vals.join(",")).map_err(io)?;
        }
        Ok(())
    }
}

/// Replicate count for quick runs; the full studies use 5000.
pub const FAST_REPLICATES: usize = 500;
pub const FULL_REPLICATES: usize = 5000;

/// η for the AR(1) prior from 1 − e^{−ηW(0.9)} = 0.9, i.e. P(φ > 0.9) = 0.9
/// under the untruncated law.
pub fn ar1_calibrated_eta(n: usize, sigma: f64) -> Result<f64, InferenceError> {
    let family = ar1_family(n, sigma).map_err(|e| InferenceError::Prior(e.to_string()))?;
    let target = CalibrationTarget { u: 0.9, alpha: 0.9, direction: Direction::Above };
    calibrate_eta(&family, &target, TailLaw::Untruncated).map(|c| c.eta).map_err(|e| InferenceError::Prior(e.to_string()))
}

/// Uniform and calibrated WCP priors on φ, σ = 0.1.
pub fn ar1_study(n: usize, phi: f64, replicates: usize, seed: u64) -> Result<StudyConfig, InferenceError> {
    let sigma = 0.1;
    let eta = ar1_calibrated_eta(n, sigma)?;
    Ok(StudyConfig {
        model: Model::Ar1 { sigma },
        true_params: vec![phi],
        n_obs: n,
        replicates,
        priors: vec![NamedPrior::new("uniform", PriorSpec::Uniform), NamedPrior::new("wcp", PriorSpec::Wcp { eta })],
        seed,
        optimizer: OptimizerSettings::default(),
    })
}

/// −log(0.01)/0.1: P(W > 0.1) = 0.01 under Exp(η).
pub const GAUSSIAN_STUDY_ETA: f64 = 46.051_701_859_880_914;

/// Truths on the level set W = 0.5.
pub const GAUSSIAN_TRUTHS: [[f64; 2]; 3] = [[0.0, 0.5], [0.25, 0.433], [0.433, 0.25]];
pub const GPD_TRUTHS: [[f64; 2]; 2] = [[0.2, 1.0 / 3.0], [0.1, 2.0 / 3.0]];

/// Uniform, WCP and two-step priors with equal rates, 100 observations.
pub fn gaussian_cloud_study(truth: [f64; 2], replicates: usize, seed: u64) -> StudyConfig {
    let eta = GAUSSIAN_STUDY_ETA;
    StudyConfig {
        model: Model::Gaussian2d,
        true_params: truth.to_vec(),
        n_obs: 100,
        replicates,
        priors: vec![
            NamedPrior::new("uniform", PriorSpec::Uniform),
            NamedPrior::new("wcp", PriorSpec::Wcp { eta }),
            NamedPrior::new("two_step", PriorSpec::TwoStep { eta1: eta, eta2: eta }),
        ],
        seed,
        optimizer: OptimizerSettings::default(),
    }
}

/// Uniform, WCP (η = 10) and two-step (10, 10) priors, 100 observations.
pub fn gpd_cloud_study(truth: [f64; 2], replicates: usize, seed: u64) -> StudyConfig {
    StudyConfig {
        model: Model::Gpd2d,
        true_params: truth.to_vec(),
        n_obs: 100,
        replicates,
        priors: vec![
            NamedPrior::new("uniform", PriorSpec::Uniform),
            NamedPrior::new("wcp", PriorSpec::Wcp { eta: 10.0 }),
            NamedPrior::new("two_step", PriorSpec::TwoStep { eta1: 10.0, eta2: 10.0 }),
        ],
        seed,
        optimizer: OptimizerSettings::default(),
    }
}

/// The three two-step rate pairs compared on each family.
pub fn two_step_variants(model: Model) -> Vec<NamedPrior> {
    let pairs: [(f64, f64); 3] = match model {
        Model::Gpd2d => [(10.0, 10.0), (10.0, 80.0), (80.0, 10.0)],
        _ => [(GAUSSIAN_STUDY_ETA, GAUSSIAN_STUDY_ETA), (0.1 * GAUSSIAN_STUDY_ETA, GAUSSIAN_STUDY_ETA), (GAUSSIAN_STUDY_ETA, 0.1 * GAUSSIAN_STUDY_ETA)],
    };
    pairs.iter().enumerate().map(|(i, &(eta1, eta2))| NamedPrior::new(&format!("two_step_{}", i + 1), PriorSpec::TwoStep { eta1, eta2 })).collect()
}

/// Cloud-shape statistics across truths that share a distance to the base
/// model: WCP clouds keep their eigenvalue ratio, two-step clouds do not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeComparison {
    pub wcp_ratios: Vec<f64>,
    pub two_step_ratios: Vec<f64>,
    pub wcp_spread: f64,
    pub two_step_spread: f64,
}

/// Pilot-fixed thresholds on the spread of eigenvalue ratios across truths.
pub const WCP_SPREAD_MAX: f64 = 0.25;
pub const TWO_STEP_SPREAD_MIN: f64 = 0.25;

pub fn compare_shapes(studies: &[StudyResults]) -> Option<ShapeComparison> {
    let ratio = |s: &StudyResults, name: &str| s.summary(name).and_then(|p| p.cloud).map(|c| c.ratio);
    let wcp_ratios: Vec<f64> = studies.iter().map(|s| ratio(s, "wcp")).collect::<Option<_>>()?;
    let two_step_ratios: Vec<f64> = studies.iter().map(|s| ratio(s, "two_step")).collect::<Option<_>>()?;
    Some(ShapeComparison { wcp_spread: shape_spread(&wcp_ratios), two_step_spread: shape_spread(&two_step_ratios), wcp_ratios, two_step_ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn cloud_of_axis_aligned_points() {
        let pts = [[-2.0, 0.0], [2.0, 0.0], [0.0, -1.0], [0.0, 1.0]];
        let c = cloud_shape(&pts);
        assert!((c.ratio - 4.0).abs() < 1e-12);
        assert_eq!(c.covariance[0][1], 0.0);
    }

    #[test]
    fn gpd_quantile_limits() {
        assert!((gpd_quantile(0.5, 2.0, 0.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((gpd_quantile(0.5, 1.0, 1e-12) - 2f64.ln()).abs() < 1e-9);
        assert!((gpd_quantile(0.75, 1.0, 0.5) - 2.0).abs() < 1e-12);
    }
}
