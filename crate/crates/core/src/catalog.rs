//! Named prior families, their density tables and table I/O.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::TriMesh;
use crate::multivariate::{gaussian_2d_density, gaussian_cov_3d_density, gaussian_two_step_density, gpd_2d_density, gpd_two_step_density};
use crate::roots::bisect;
use crate::numeric1d::{approximate_prior_1d, Recipe3Config};
use crate::univariate::{ar1_family, ar1_phi_prior, gaussian_mean_prior, gaussian_precision_prior, gaussian_sd_prior, gpd_tail_family, gpd_tail_prior, DistanceFamily, Side, UnivariatePrior};
use crate::wasserstein::{w1_gpd_tail, w2_ar1, w2_t_distribution, QuadConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown family `{0}`; known families: {known}", known = Family::names().join(", "))]
    UnknownFamily(String),
    #[error("family `{family}` requires hyperparameter `{name}`")]
    MissingHyperparameter { family: &'static str, name: &'static str },
    #[error("family `{family}` does not take hyperparameter `{name}`")]
    UnexpectedHyperparameter { family: &'static str, name: String },
    #[error("hyperparameter `{name}` = {value}: {reason}")]
    InvalidHyperparameter { name: String, value: f64, reason: &'static str },
    #[error("{0}")]
    Unsupported(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("malformed table: {0}")]
    Parse(String),
}

impl CatalogError {
    /// Errors caused by the request rather than by the computation.
    pub fn is_usage(&self) -> bool {
        !matches!(self, CatalogError::Construction(_))
    }
}

/// Every prior the crate ships in closed form or by a fixed numerical recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Family {
    Precision,
    Mean,
    Sd,
    Ar1,
    GpdTail,
    TXiNumeric,
    Gaussian2d,
    Gpd2d,
    GaussianCov3d,
    GaussianTwoStep,
    GpdTwoStep,
}

pub type Hyperparameters = BTreeMap<String, f64>;

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Precision,
        Family::Mean,
        Family::Sd,
        Family::Ar1,
        Family::GpdTail,
        Family::TXiNumeric,
        Family::Gaussian2d,
        Family::Gpd2d,
        Family::GaussianCov3d,
        Family::GaussianTwoStep,
        Family::GpdTwoStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Precision => "precision",
            Family::Mean => "mean",
            Family::Sd => "sd",
            Family::Ar1 => "ar1",
            Family::GpdTail => "gpd-tail",
            Family::TXiNumeric => "t-xi-numeric",
            Family::Gaussian2d => "gaussian-2d",
            Family::Gpd2d => "gpd-2d",
            Family::GaussianCov3d => "gaussian-cov-3d",
            Family::GaussianTwoStep => "gaussian-two-step",
            Family::GpdTwoStep => "gpd-two-step",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|f| f.name()).collect()
    }

    /// Number of coordinates in the density table.
    pub fn table_dim(self) -> usize {
        match self {
            Family::Precision | Family::Mean | Family::Sd | Family::Ar1 | Family::GpdTail | Family::TXiNumeric => 1,
            _ => 2,
        }
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            Family::Ar1 => &["eta", "n", "sigma"],
            Family::TXiNumeric => &["eta", "delta", "eps"],
            Family::GaussianCov3d => &["eta", "rho"],
            Family::GaussianTwoStep | Family::GpdTwoStep => &["eta1", "eta2"],
            _ => &["eta"],
        }
    }

    pub fn optional(self) -> &'static [&'static str] {
        match self {
            Family::Mean => &["eta_minus", "eta_plus"],
            _ => &[],
        }
    }

    /// Hyperparameters pinned for the golden tables.
    pub fn golden_hyperparameters(self) -> Hyperparameters {
        let pairs: Vec<(&str, f64)> = match self {
            Family::Precision | Family::Sd | Family::Mean | Family::Gaussian2d => vec![("eta", 1.0)],
            Family::Ar1 => vec![("eta", 13.44), ("n", 10.0), ("sigma", 0.1)],
            Family::GpdTail => vec![("eta", 100f64.ln())],
            Family::TXiNumeric => vec![("eta", t_xi_golden_eta()), ("delta", 1e-3), ("eps", 0.005)],
            Family::Gpd2d => vec![("eta", 20.0)],
            Family::GaussianCov3d => vec![("eta", 1.0), ("rho", 0.3)],
            Family::GaussianTwoStep => vec![("eta1", 1.0), ("eta2", 1.0)],
            Family::GpdTwoStep => vec![("eta1", 10.0), ("eta2", 10.0)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.name().to_string()
    }
}

impl TryFrom<String> for Family {
    type Error = CatalogError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl FromStr for Family {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.iter().copied().find(|f| f.name() == s).ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

/// Rate putting probability 0.1 above ξ = 0.2 for the t tail index.
pub fn t_xi_golden_eta() -> f64 {
    10f64.ln() / t_xi_distance(0.2)
}

fn t_xi_distance(xi: f64) -> f64 {
    w2_t_distribution(xi, &QuadConfig::default()).unwrap_or(f64::INFINITY)
}

/// Rejects unknown or missing names and values outside their domain.
pub fn check_hyperparameters(family: Family, h: &Hyperparameters) -> Result<(), CatalogError> {
    for &name in family.required() {
        if !h.contains_key(name) {
            return Err(CatalogError::MissingHyperparameter { family: family.name(), name });
        }
    }
    for (name, &value) in h {
        if !family.required().contains(&name.as_str()) && !family.optional().contains(&name.as_str()) {
            return Err(CatalogError::UnexpectedHyperparameter { family: family.name(), name: name.clone() });
        }
        let bad = |reason| Err(CatalogError::InvalidHyperparameter { name: name.clone(), value, reason });
        match name.as_str() {
            "rho" if !(value > -1.0 && value < 1.0) => return bad("must lie in (-1, 1)"),
            "rho" => {}
            "n" if !(value >= 1.0 && value.fract() == 0.0 && value < 1e9) => return bad("must be a positive integer"),
            "eps" | "delta" if !(value > 0.0 && value < 1.0) => return bad("must lie in (0, 1)"),
            _ if !(value > 0.0 && value.is_finite()) => return bad("must be positive and finite"),
            _ => {}
        }
    }
    Ok(())
}

fn get(h: &Hyperparameters, name: &str) -> f64 {
    h[name]
}

/// Distance to the base model of a univariate family, as used by calibration.
pub fn distance_family(family: Family, h: &Hyperparameters) -> Result<DistanceFamily, CatalogError> {
    check_hyperparameters(family, &without_eta(family, h))?;
    let plus = |side| DistanceFamily { theta0: 0.0, minus: None, plus: Some(side) };
    Ok(match family {
        Family::Precision => DistanceFamily {
            theta0: f64::INFINITY,
            minus: Some(Side::new(0.0, f64::INFINITY, |t: f64| 1.0 / t.sqrt(), f64::INFINITY).with_derivative(|t: f64| -0.5 * t.powf(-1.5))),
            plus: None,
        },
        Family::Sd => plus(Side::new(0.0, f64::INFINITY, |s| s, f64::INFINITY).with_derivative(|_| 1.0)),
        Family::Ar1 => ar1_family(get(h, "n") as usize, get(h, "sigma")).map_err(|e| CatalogError::Construction(e.to_string()))?,
        Family::GpdTail => gpd_tail_family(),
        Family::TXiNumeric => plus(Side::new(0.0, 0.5, t_xi_distance, f64::INFINITY)),
        _ => return Err(CatalogError::Unsupported(format!("family `{family}` has no one-sided univariate distance for calibration"))),
    })
}

// Calibration solves for η, so it is not a required input there.
fn without_eta(family: Family, h: &Hyperparameters) -> Hyperparameters {
    let mut h = h.clone();
    for name in family.required() {
        if name.starts_with("eta") {
            h.entry(name.to_string()).or_insert(1.0);
        }
    }
    if family == Family::TXiNumeric {
        h.entry("delta".into()).or_insert(1e-3);
        h.entry("eps".into()).or_insert(0.005);
    }
    h
}

/// Distance of a parameter value to the family's base model.
pub fn distance(family: Family, theta: &[f64], h: &Hyperparameters) -> Result<f64, CatalogError> {
    let want = match family {
        Family::GaussianCov3d => 3,
        f => f.table_dim(),
    };
    if theta.len() != want {
        return Err(CatalogError::Unsupported(format!("family `{family}` takes {want} parameter value(s), got {}", theta.len())));
    }
    let err = |e: crate::wasserstein::DistanceError| CatalogError::Construction(e.to_string());
    let domain = |ok: bool| if ok { Ok(()) } else { Err(CatalogError::Construction(format!("{theta:?} is outside the domain of `{family}`"))) };
    Ok(match family {
        Family::Precision => {
            domain(theta[0] > 0.0)?;
            1.0 / theta[0].sqrt()
        }
        Family::Sd => {
            domain(theta[0] >= 0.0)?;
            theta[0]
        }
        Family::Mean => theta[0].abs(),
        Family::Ar1 => {
            let hh = without_eta(family, h);
            check_hyperparameters(family, &hh)?;
            w2_ar1(theta[0], get(&hh, "n") as usize, get(&hh, "sigma")).map_err(err)?
        }
        Family::GpdTail => w1_gpd_tail(theta[0]).map_err(err)?,
        Family::TXiNumeric => w2_t_distribution(theta[0], &QuadConfig::default()).map_err(err)?,
        Family::Gaussian2d | Family::GaussianTwoStep => {
            domain(theta[1] >= 0.0)?;
            theta[0].hypot(theta[1])
        }
        Family::Gpd2d | Family::GpdTwoStep => {
            domain(theta[0] >= 0.0 && (0.0..1.0).contains(&theta[1]))?;
            theta[0] / (1.0 - theta[1])
        }
        Family::GaussianCov3d => {
            domain(theta[0] >= 0.0 && theta[1] >= 0.0 && theta[2].abs() < 1.0)?;
            theta[0].hypot(theta[1])
        }
    })
}

/// Grid of a density table.
#[derive(Debug, Clone, PartialEq)]
pub enum TableGrid {
    Line(Vec<f64>),
    /// Rows run over the first coordinate, then the second.
    Tensor(Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub grid: TableGrid,
    pub density: Vec<f64>,
}

/// Sidecar describing how a table was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub family: Family,
    pub construction: String,
    pub hyperparameters: Hyperparameters,
    pub eta: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub eps_tilde: Option<f64>,
    pub grid: String,
    pub rows: usize,
    /// Trapezoid integral of the table, or the mesh integral for mesh tables.
    pub normalization: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tv_to_analytic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_file: Option<String>,
    pub command: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn build_err<E: fmt::Display>(e: E) -> CatalogError {
    CatalogError::Construction(e.to_string())
}

// Zero on an open end of the support is replaced by the one-sided limit.
fn with_limits(p: &UnivariatePrior, t: f64) -> f64 {
    let d = p.density(t);
    if d != 0.0 {
        return d;
    }
    let (a, b) = (p.density(t.next_down()), p.density(t.next_up()));
    match (a > 0.0, b > 0.0) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a,
        (false, true) => b,
        (false, false) => 0.0,
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

fn midpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

/// Description of the grid each family uses, stored in sidecars.
pub fn grid_description(family: Family) -> &'static str {
    match family {
        Family::Precision => "log-spaced tau in [1e-2 eta^2, 1e8 eta^2]",
        Family::Mean => "uniform m in [-30/eta_minus, 30/eta_plus], end rows hold one-sided limits",
        Family::Sd => "uniform sigma in [0, 30/eta], end rows hold one-sided limits",
        Family::Ar1 => "prior quantiles at probabilities (i + 0.5)/n",
        Family::GpdTail => "uniform xi in [0, 1], end rows hold one-sided limits",
        Family::TXiNumeric => "uniform xi over the numerical support, linear interpolation of the recipe grid",
        Family::Gaussian2d | Family::GaussianTwoStep => "cell midpoints, m in [-8/eta, 8/eta] by sigma in [0, 8/eta]",
        Family::Gpd2d | Family::GpdTwoStep => "cell midpoints, sigma in [0, 8/eta] by xi in [0, 1]",
        Family::GaussianCov3d => "cell midpoints, sigma1 and sigma2 in [0, 8/eta], slice at fixed rho",
    }
}

/// Density table of a catalog prior: `points` rows in 1D, `points`² in 2D.
pub fn build_table(family: Family, h: &Hyperparameters, points: usize) -> Result<DensityTable, CatalogError> {
    check_hyperparameters(family, h)?;
    if points < 2 {
        return Err(CatalogError::Unsupported(format!("need at least 2 points per axis, got {points}")));
    }
    let n = points;
    let line = |grid: Vec<f64>, p: UnivariatePrior| {
        let density = grid.iter().map(|&t| with_limits(&p, t)).collect();
        DensityTable { grid: TableGrid::Line(grid), density }
    };
    let tensor = |xs: Vec<f64>, ys: Vec<f64>, f: &dyn Fn(f64, f64) -> f64| {
        let density = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
        DensityTable { grid: TableGrid::Tensor(xs, ys), density }
    };
    Ok(match family {
        Family::Precision => {
            let eta = get(h, "eta");
            let grid = (0..n).map(|i| eta * eta * 10f64.powf(-2.0 + 10.0 * i as f64 / (n - 1) as f64)).collect();
            line(grid, gaussian_precision_prior(eta).map_err(build_err)?)
        }
        Family::Mean => {
            let eta = get(h, "eta");
            let (em, ep) = (h.get("eta_minus").copied().unwrap_or(eta), h.get("eta_plus").copied().unwrap_or(eta));
            line(uniform(-30.0 / em, 30.0 / ep, n), gaussian_mean_prior(em, ep).map_err(build_err)?)
        }
        Family::Sd => {
            let eta = get(h, "eta");
            line(uniform(0.0, 30.0 / eta, n), gaussian_sd_prior(eta).map_err(build_err)?)
        }
        Family::Ar1 => {
            // Both ends carry inverse square root singularities; prior quantiles
            // at cell midpoints put equal mass in every cell.
            let prior = ar1_phi_prior(get(h, "eta"), get(h, "n") as usize, get(h, "sigma")).map_err(build_err)?;
            let grid = midpoints(0.0, 1.0, n)
                .into_iter()
                .map(|p| bisect(|t| prior.cdf(t) - p, -1.0, 1.0, 1e-15, 200).map_err(build_err))
                .collect::<Result<Vec<f64>, _>>()?;
            line(grid, prior)
        }
        Family::GpdTail => line(uniform(0.0, 1.0, n), gpd_tail_prior(get(h, "eta")).map_err(build_err)?),
        Family::TXiNumeric => {
            let cfg = Recipe3Config::new(get(h, "eta"), get(h, "delta"), get(h, "eps"));
            let d = approximate_prior_1d(t_xi_distance, 0.0, cfg).map_err(build_err)?;
            let (lo, hi) = d.support();
            let grid = uniform(lo, hi, n);
            let density = grid.iter().map(|&t| d.evaluate(t)).collect();
            DensityTable { grid: TableGrid::Line(grid), density }
        }
        Family::Gaussian2d => {
            let eta = get(h, "eta");
            tensor(midpoints(-8.0 / eta, 8.0 / eta, n), midpoints(0.0, 8.0 / eta, n), &|m, s| gaussian_2d_density(m, s, eta))
        }
        Family::Gpd2d => {
            let eta = get(h, "eta");
            tensor(midpoints(0.0, 8.0 / eta, n), midpoints(0.0, 1.0, n), &|s, xi| gpd_2d_density(s, xi, eta))
        }
        Family::GaussianCov3d => {
            let (eta, rho) = (get(h, "eta"), get(h, "rho"));
            tensor(midpoints(0.0, 8.0 / eta, n), midpoints(0.0, 8.0 / eta, n), &|a, b| gaussian_cov_3d_density(a, b, rho, eta))
        }
        Family::GaussianTwoStep => {
            let (e1, e2) = (get(h, "eta1"), get(h, "eta2"));
            tensor(midpoints(-8.0 / e1, 8.0 / e1, n), midpoints(0.0, 8.0 / e2, n), &|m, s| gaussian_two_step_density(m, s, e1, e2))
        }
        Family::GpdTwoStep => {
            let (e1, e2) = (get(h, "eta1"), get(h, "eta2"));
            tensor(midpoints(0.0, 8.0 / e1, n), midpoints(0.0, 1.0, n), &|s, xi| gpd_two_step_density(s, xi, e1, e2))
        }
    })
}

/// Seventeen significant digits, so a parsed value equals the written one.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

impl DensityTable {
    pub fn rows(&self) -> usize {
        self.density.len()
    }

    /// Trapezoid rule on the grid (tensor-product rule in 2D).
    pub fn normalization(&self) -> f64 {
        match &self.grid {
            TableGrid::Line(xs) => trapezoid(xs, &self.density),
            TableGrid::Tensor(xs, ys) => {
                let inner: Vec<f64> = self.density.chunks(ys.len()).map(|row| trapezoid(ys, row)).collect();
                trapezoid(xs, &inner)
            }
        }
    }

    /// Trapezoid mass of a 1D table above `t`, interpolating at the cut.
    pub fn mass_above(&self, t: f64) -> Option<f64> {
        let TableGrid::Line(xs) = &self.grid else { return None };
        let mut total = 0.0;
        for i in 0..xs.len() - 1 {
            let (a, b, fa, fb) = (xs[i], xs[i + 1], self.density[i], self.density[i + 1]);
            if b <= t {
                continue;
            }
            if a >= t {
                total += 0.5 * (b - a) * (fa + fb);
            } else {
                let ft = fa + (fb - fa) * (t - a) / (b - a);
                total += 0.5 * (b - t) * (ft + fb);
            }
        }
        Some(total)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match &self.grid {
            TableGrid::Line(xs) => {
                s.push_str("theta,density\n");
                for (x, d) in xs.iter().zip(&self.density) {
                    s.push_str(&format!("{},{}\n", format_value(*x), format_value(*d)));
                }
            }
            TableGrid::Tensor(xs, ys) => {
                s.push_str("theta1,theta2,density\n");
                let mut k = 0;
                for x in xs {
                    for y in ys {
                        s.push_str(&format!("{},{},{}\n", format_value(*x), format_value(*y), format_value(self.density[k])));
                        k += 1;
                    }
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (columns, rows): (Vec<&str>, Vec<Vec<f64>>) = match &self.grid {
            TableGrid::Line(xs) => (vec!["theta", "density"], xs.iter().zip(&self.density).map(|(x, d)| vec![*x, *d]).collect()),
            TableGrid::Tensor(xs, ys) => {
                let pts = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y)));
                (vec!["theta1", "theta2", "density"], pts.zip(&self.density).map(|((x, y), d)| vec![x, y, *d]).collect())
            }
        };
        serde_json::json!({ "columns": columns, "rows": rows })
    }

    /// Parses a table written by [`DensityTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, CatalogError> {
        let rows = parse_rows(text)?;
        let width = rows.first().map(|r| r.len()).ok_or_else(|| CatalogError::Parse("no data rows".into()))?;
        match width {
            2 => Ok(DensityTable { grid: TableGrid::Line(rows.iter().map(|r| r[0]).collect()), density: rows.iter().map(|r| r[1]).collect() }),
            3 => {
                let ny = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
                if rows.len() % ny != 0 {
                    return Err(CatalogError::Parse(format!("{} rows do not form blocks of {ny}", rows.len())));
                }
                let ys: Vec<f64> = rows[..ny].iter().map(|r| r[1]).collect();
                let xs: Vec<f64> = rows.iter().step_by(ny).map(|r| r[0]).collect();
                for (k, r) in rows.iter().enumerate() {
                    if r[0] != xs[k / ny] || r[1] != ys[k % ny] {
                        return Err(CatalogError::Parse(format!("row {} is off the tensor grid", k + 2)));
                    }
                }
                Ok(DensityTable { grid: TableGrid::Tensor(xs, ys), density: rows.iter().map(|r| r[2]).collect() })
            }
            w => Err(CatalogError::Parse(format!("expected 2 or 3 columns, found {w}"))),
        }
    }
}

/// Numeric rows of a CSV with one header line.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>, CatalogError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CatalogError::Parse("empty file".into()))?;
    let width = header.split(',').count();
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let row: Vec<f64> = l.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| CatalogError::Parse(format!("line {}: {e}", i + 2)))?;
            if row.len() != width {
                return Err(CatalogError::Parse(format!("line {}: {} fields, header has {width}", i + 2, row.len())));
            }
            Ok(row)
        })
        .collect()
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Integral of the piecewise-linear interpolant of nodal values.
pub fn mesh_integral(mesh: &TriMesh, values: &[f64]) -> f64 {
    mesh.triangles.iter().enumerate().map(|(t, tri)| mesh.triangle_area(t) * tri.iter().map(|&k| values[k]).sum::<f64>() / 3.0).sum()
}
