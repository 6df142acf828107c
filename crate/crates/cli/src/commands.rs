use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;
use thiserror::Error;

use wcp::catalog::{build_table, check_hyperparameters, distance, distance_family, grid_description, mesh_integral, CatalogError, Family, Hyperparameters, Sidecar};
use wcp::golden::{check_goldens, regenerate_goldens};
use wcp::inference::{run_study, InferenceError, StudyConfig};
use wcp::multivariate::{gaussian_2d_density, gpd_2d_density};
use wcp::numeric1d::NumericError;
use wcp::numeric2d::{approximate_density_2d, convergence_study, gaussian_distance, gaussian_study_config, gpd_distance, gpd_study_config, Recipe4Config};
use wcp::tv::tv_mesh;
use wcp::validation::{calibrate_eta, CalibrationTarget, Direction, TailLaw, ValidationError};

use crate::{CalibrateArgs, DirectionArg, Format, HyperArgs, LawArg, PriorArgs, TvStudyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::Domain(_) | NumericError::Configuration(_) => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::Configuration(_) => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Domain(_) | ValidationError::Infeasible { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Compute(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

impl HyperArgs {
    fn to_map(&self) -> Hyperparameters {
        let pairs = [
            ("eta", self.eta),
            ("eta_minus", self.eta_minus),
            ("eta_plus", self.eta_plus),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("n", self.n),
            ("sigma", self.sigma),
            ("rho", self.rho),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
    }
}

pub fn dist(family: &str, theta: &[f64], hyper: &HyperArgs) -> Result<(), CliError> {
    let family: Family = family.parse()?;
    let w = distance(family, theta, &hyper.to_map())?;
    print!("{}", pretty(&json!({ "family": family, "theta": theta, "distance": w })));
    Ok(())
}

fn metadata() -> BTreeMap<String, serde_json::Value> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    BTreeMap::from([
        ("created_unix_seconds".to_string(), json!(secs)),
        ("version".to_string(), json!(env!("CARGO_PKG_VERSION"))),
    ])
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("sidecar.json")
}

pub fn prior(a: &PriorArgs) -> Result<(), CliError> {
    let family: Family = a.family.parse()?;
    if a.numeric && matches!(family, Family::Gaussian2d | Family::Gpd2d) {
        return numeric_prior_2d(family, a);
    }
    if a.numeric && family != Family::TXiNumeric {
        return Err(CliError::Usage(format!("family `{family}` has no numerical construction; drop --numeric")));
    }
    let mut h = a.hyper.to_map();
    if family == Family::TXiNumeric {
        h.extend(a.eps.map(|v| ("eps".to_string(), v)));
        h.extend(a.delta.map(|v| ("delta".to_string(), v)));
    } else if a.eps.is_some() || a.delta.is_some() {
        return Err(CliError::Usage("--eps and --delta apply only to numerical constructions".into()));
    }
    if a.tau.is_some() || a.eps_tilde.is_some() {
        return Err(CliError::Usage("--tau and --eps-tilde apply only to mesh constructions".into()));
    }
    check_hyperparameters(family, &h)?;
    let points = a.points.unwrap_or(if family.table_dim() == 1 { 1000 } else { 50 });
    let table = build_table(family, &h, points)?;
    let ext = if a.format == Format::Csv { "csv" } else { "json" };
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.{ext}", family.name())));
    let body = match a.format {
        Format::Csv => table.to_csv(),
        Format::Json => pretty(&table.to_json()),
    };
    write_file(&out, body.as_bytes())?;
    let sidecar = Sidecar {
        family,
        construction: if family == Family::TXiNumeric { "grid recipe".into() } else { "closed form".into() },
        eta: h.get("eta").copied(),
        eps: h.get("eps").copied(),
        delta: h.get("delta").copied(),
        tau: None,
        eps_tilde: None,
        hyperparameters: h,
        grid: grid_description(family).into(),
        rows: table.rows(),
        normalization: table.normalization(),
        tv_to_analytic: None,
        mesh_file: None,
        command: format!("wcp {}", command_line()),
        metadata: metadata(),
    };
    finish_prior(&out, &sidecar)
}

fn finish_prior(out: &Path, sidecar: &Sidecar) -> Result<(), CliError> {
    let side = sidecar_path(out);
    write_file(&side, pretty(sidecar).as_bytes())?;
    print!("{}", pretty(&json!({ "table": out, "sidecar": side, "rows": sidecar.rows, "normalization": sidecar.normalization })));
    Ok(())
}

/// Study conventions fill in η and τ when they are not given.
fn mesh_config(family: Family, eps: f64, eta: Option<f64>, delta: Option<f64>, tau: Option<f64>) -> Recipe4Config {
    let mut cfg = match family {
        Family::Gaussian2d => gaussian_study_config(eps),
        _ => gpd_study_config(eps),
    };
    if let Some(eta) = eta {
        cfg.eta = eta;
    }
    if let Some(delta) = delta {
        cfg.delta = delta;
    }
    if let Some(tau) = tau {
        cfg = cfg.with_tau(tau);
    }
    cfg
}

fn distance_2d(family: Family) -> fn(f64, f64) -> f64 {
    if family == Family::Gaussian2d {
        gaussian_distance
    } else {
        gpd_distance
    }
}

fn analytic_2d(family: Family, eta: f64) -> impl Fn(f64, f64) -> f64 + Sync {
    move |x, y| if family == Family::Gaussian2d { gaussian_2d_density(x, y, eta) } else { gpd_2d_density(x, y, eta) }
}

fn numeric_prior_2d(family: Family, a: &PriorArgs) -> Result<(), CliError> {
    let h = a.hyper.to_map();
    if let Some(name) = h.keys().find(|k| k.as_str() != "eta") {
        return Err(CliError::Usage(format!("family `{family}` does not take hyperparameter `{name}`")));
    }
    if a.format != Format::Csv {
        return Err(CliError::Usage("mesh tables are written as CSV only".into()));
    }
    if a.points.is_some() {
        return Err(CliError::Usage("--points does not apply to mesh tables; use --eps".into()));
    }
    let eps = a.eps.ok_or_else(|| CliError::Usage("--numeric requires --eps".into()))?;
    let delta = a.delta.ok_or_else(|| CliError::Usage("--numeric requires --delta".into()))?;
    let mut cfg = mesh_config(family, eps, a.hyper.eta, Some(delta), a.tau);
    if let Some(e) = a.eps_tilde {
        cfg.eps_tilde = e;
    }
    cfg.validate()?;
    let d = approximate_density_2d(&cfg, &distance_2d(family))?;
    let tv = tv_mesh(&d.mesh, |x, y| d.evaluate([x, y]), analytic_2d(family, cfg.eta), 1e-4);
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}-numeric.csv", family.name())));
    let mut csv = Vec::new();
    d.write_csv(&mut csv)?;
    write_file(&out, &csv)?;
    let mesh_path = out.with_extension("mesh");
    write_file(&mesh_path, d.mesh.to_text().as_bytes())?;
    let hyperparameters = Hyperparameters::from([("eta".to_string(), cfg.eta)]);
    let sidecar = Sidecar {
        family,
        construction: "mesh recipe".into(),
        hyperparameters,
        eta: Some(cfg.eta),
        eps: Some(cfg.eps),
        delta: Some(cfg.delta),
        tau: Some(cfg.tau),
        eps_tilde: Some(cfg.eps_tilde),
        grid: "mesh nodes; triangles in the mesh file".into(),
        rows: d.node_densities.len(),
        normalization: mesh_integral(&d.mesh, &d.node_densities),
        tv_to_analytic: Some(tv),
        mesh_file: mesh_path.file_name().map(|f| f.to_string_lossy().into_owned()),
        command: format!("wcp {}", command_line()),
        metadata: metadata(),
    };
    finish_prior(&out, &sidecar)
}

pub fn calibrate(a: &CalibrateArgs) -> Result<(), CliError> {
    let family: Family = a.family.parse()?;
    let mut h = a.hyper.to_map();
    h.remove("eta");
    let fam = distance_family(family, &h)?;
    let direction = match a.direction {
        DirectionArg::Above => Direction::Above,
        DirectionArg::Below => Direction::Below,
    };
    let law = match a.law {
        LawArg::Truncated => TailLaw::Truncated,
        LawArg::Untruncated => TailLaw::Untruncated,
    };
    let target = CalibrationTarget { u: a.u, alpha: a.alpha, direction };
    let c = calibrate_eta(&fam, &target, law)?;
    print!(
        "{}",
        pretty(&json!({
            "family": family, "u": a.u, "alpha": a.alpha, "direction": direction, "law": law,
            "eta": c.eta, "probability": c.probability, "residual": c.residual,
        }))
    );
    Ok(())
}

pub fn tv_study(a: &TvStudyArgs) -> Result<(), CliError> {
    let family: Family = a.family.parse()?;
    if !matches!(family, Family::Gaussian2d | Family::Gpd2d) {
        return Err(CliError::Usage(format!("family `{family}` has no mesh recipe with an analytic oracle; use gaussian-2d or gpd-2d")));
    }
    if a.eps.is_empty() {
        return Err(CliError::Usage("empty epsilon list".into()));
    }
    let mut eps = a.eps.clone();
    eps.sort_by(|x, y| y.total_cmp(x));
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Usage("epsilon list has duplicates".into()));
    }
    let make = |e: f64| mesh_config(family, e, a.eta, a.delta, a.tau);
    for &e in &eps {
        make(e).validate()?;
    }
    let eta = make(eps[0]).eta;
    let records = convergence_study(&eps, make, &distance_2d(family), analytic_2d(family, eta))?;
    let text = pretty(&records);
    match &a.out {
        Some(p) => {
            write_file(p, text.as_bytes())?;
            print!("{}", pretty(&json!({ "records": records.len(), "out": p })));
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses a study config, naming the offending field on failure.
pub fn parse_study_config(text: &str) -> Result<StudyConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: StudyConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "config".to_string() } else { path };
        CliError::Usage(format!("invalid study config at `{field}`: {}", e.inner()))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn simulate(config: &Path, out: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config).map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
    let config = parse_study_config(&text)?;
    let results = run_study(&config)?;
    let csv_path = PathBuf::from(format!("{}.csv", out.display()));
    let mut csv = Vec::new();
    results.write_csv(&mut csv)?;
    write_file(&csv_path, &csv)?;
    let summary_path = PathBuf::from(format!("{}.summary.json", out.display()));
    write_file(&summary_path, pretty(&json!({ "config": results.config, "summaries": results.summaries })).as_bytes())?;
    let medians: BTreeMap<&str, &Vec<f64>> = results.summaries.iter().map(|s| (s.prior.as_str(), &s.median)).collect();
    print!("{}", pretty(&json!({ "csv": csv_path, "summary": summary_path, "medians": medians })));
    Ok(())
}

pub fn regen_goldens(dir: &Path, check: bool) -> Result<(), CliError> {
    let err = |e: wcp::golden::GoldenError| CliError::Compute(e.to_string());
    if check {
        let problems = check_goldens(dir).map_err(err)?;
        if problems.is_empty() {
            println!("goldens up to date");
            return Ok(());
        }
        let list: Vec<String> = problems.iter().map(|p| format!("{p:?}")).collect();
        return Err(CliError::Compute(format!("golden check failed: {}", list.join(", "))));
    }
    let records = regenerate_goldens(dir).map_err(err)?;
    print!("{}", pretty(&records));
    Ok(())
}
