//! Experiment configuration: command-line parameters, TOML files and the
//! geometric grid syntax `start:stop:count`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::RunError;

/// The fifteen experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CatalanCheck,
    SvTails,
    SvPressure,
    FibTails,
    FibPressure,
    PmModel,
    FlatModel,
    EigenAsym,
    Relation,
    PiScaling,
    Renewal,
    Correlation,
    Arcsine,
    EtauScaling,
    MeasureDistance,
}

impl Experiment {
    pub const ALL: [Experiment; 15] = [
        Experiment::CatalanCheck,
        Experiment::SvTails,
        Experiment::SvPressure,
        Experiment::FibTails,
        Experiment::FibPressure,
        Experiment::PmModel,
        Experiment::FlatModel,
        Experiment::EigenAsym,
        Experiment::Relation,
        Experiment::PiScaling,
        Experiment::Renewal,
        Experiment::Correlation,
        Experiment::Arcsine,
        Experiment::EtauScaling,
        Experiment::MeasureDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CatalanCheck => "catalan-check",
            Experiment::SvTails => "sv-tails",
            Experiment::SvPressure => "sv-pressure",
            Experiment::FibTails => "fib-tails",
            Experiment::FibPressure => "fib-pressure",
            Experiment::PmModel => "pm-model",
            Experiment::FlatModel => "flat-model",
            Experiment::EigenAsym => "eigen-asym",
            Experiment::Relation => "relation",
            Experiment::PiScaling => "pi-scaling",
            Experiment::Renewal => "renewal",
            Experiment::Correlation => "correlation",
            Experiment::Arcsine => "arcsine",
            Experiment::EtauScaling => "etau-scaling",
            Experiment::MeasureDistance => "measure-distance",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sorted list of grid values. Parsed from `start:stop:count` (geometric,
/// both ends included) or a comma-separated list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "Vec<f64>")]
pub struct Grid(pub Vec<f64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Text(String),
    List(Vec<f64>),
}

impl TryFrom<GridSpec> for Grid {
    type Error = String;

    fn try_from(spec: GridSpec) -> Result<Self, String> {
        match spec {
            GridSpec::Text(s) => s.parse(),
            GridSpec::List(v) => Grid::from_values(v),
        }
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.0
    }
}

impl Grid {
    pub fn geometric(start: f64, stop: f64, count: usize) -> Result<Self, String> {
        if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
            return Err(format!("geometric grid ends must be positive, got {start}:{stop}"));
        }
        if count == 0 {
            return Err("grid needs at least one point".into());
        }
        Grid::from_values(plab_core::numerics::geometric_grid(start, stop, count))
    }

    fn from_values(mut v: Vec<f64>) -> Result<Self, String> {
        if v.is_empty() {
            return Err("empty grid".into());
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err("grid values must be finite".into());
        }
        v.sort_by(f64::total_cmp);
        Ok(Grid(v))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| p.parse::<f64>().map_err(|e| format!("bad grid value {p:?}: {e}"));
        match parts.as_slice() {
            [a, b, n] => {
                let count = n.parse::<usize>().map_err(|e| format!("bad grid count {n:?}: {e}"))?;
                Grid::geometric(num(a)?, num(b)?, count)
            }
            [list] => Grid::from_values(list.split(',').map(|p| num(p.trim())).collect::<Result<_, _>>()?),
            _ => Err(format!("grid {s:?} is neither start:stop:count nor a list")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiKind {
    /// `ψ̄(n) = κ·log n`.
    Log,
    /// `ψ̄(n) = C′ − C·n^γ`.
    Poly,
    /// `ψ̄(n) = K` for every class.
    Const,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Exact-power scalar model, `μ̄(τ > n) = (n+1)^{−β}`.
    Gw,
    /// Scalar model with an explicit `n^{−1−β}` correction.
    GwCorrected,
    /// Stratmann-Vogt first-return model (β = ½ at λ = ½).
    Sv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Convergence abscissa / root of the first-return series.
    Abscissa,
    /// Leading eigenvalue of the truncated transition matrix.
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Skeleton,
    Orbit,
}

/// Every tunable of every experiment. Unset fields take the experiment's
/// default; see the README for which experiment reads which field.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Largest inducing time / horizon enumerated.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Lower end of a fit window in n.
    #[arg(long)]
    pub fit_lo: Option<u64>,
    /// Upper end of a fit window in n.
    #[arg(long)]
    pub fit_hi: Option<u64>,
    /// Branch parameter λ (comma-separated list).
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Inverse temperature t (comma-separated list).
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Grid of `1 − t` values.
    #[arg(long)]
    pub one_minus_t: Option<Grid>,
    /// Tail index β (comma-separated list).
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Pomeau-Manneville exponent α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Flatness parameter of the critical point.
    #[arg(long)]
    pub b: Option<f64>,
    /// Potential family for ψ̄.
    #[arg(long, value_enum)]
    pub psi: Option<PsiKind>,
    /// Coefficient of the log potential.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Constant C′ of the polynomial potential.
    #[arg(long)]
    pub c_prime: Option<f64>,
    /// Scale C of the polynomial potential.
    #[arg(long)]
    pub c: Option<f64>,
    /// Exponent γ of the polynomial potential (comma-separated list).
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    /// Value of a constant potential.
    #[arg(long)]
    pub value: Option<f64>,
    /// Drift parameter s.
    #[arg(long)]
    pub s: Option<f64>,
    /// Grid of s values, `a:b:n` (geometric) or a list.
    #[arg(long)]
    pub s_grid: Option<Grid>,
    /// Spectral parameter u.
    #[arg(long)]
    pub u: Option<f64>,
    /// Grid of u values, `a:b:n` (geometric) or a list.
    #[arg(long)]
    pub u_grid: Option<Grid>,
    /// Matrix truncation size.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Time horizon.
    #[arg(long)]
    pub n: Option<u64>,
    /// Number of simulated orbits.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation mode.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Underlying induced model.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Pressure method for sv-pressure.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Class values of the observable `v` (last value repeats).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub v: Option<Vec<f64>>,
    /// Class values of the observable `w` (last value repeats).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub w: Option<Vec<f64>>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl Params {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: Params) -> Params {
        overlay!(self, top; n_max, fit_lo, fit_hi, lambda, t, one_minus_t, beta, alpha, b, psi, kappa,
            c_prime, c, gamma, value, s, s_grid, u, u_grid, truncation, n, trials, seed, mode,
            model, method, v, w);
        self
    }
}

/// A fully resolved run request.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, params: Params::default(), threads: None, out_dir: None }
    }

    pub fn with(mut self, params: Params) -> Self {
        self.params = self.params.overlay(params);
        self
    }
}

/// Contents of a `--config` file. Top-level keys apply to every experiment; a
/// table named after an experiment (`[relation]`) overrides them for it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub shared: Params,
    pub sections: Vec<(Experiment, Params)>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let mut table: toml::Table = text.parse().map_err(|e| RunError::config(format!("TOML: {e}")))?;
        let threads = match table.remove("threads") {
            Some(v) => Some(
                v.as_integer()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| RunError::config("threads must be a positive integer"))? as usize,
            ),
            None => None,
        };
        let out_dir = match table.remove("out_dir") {
            Some(v) => Some(PathBuf::from(
                v.as_str().ok_or_else(|| RunError::config("out_dir must be a string"))?,
            )),
            None => None,
        };
        let mut sections = Vec::new();
        for e in Experiment::ALL {
            if let Some(v) = table.remove(e.name()) {
                let params: Params = v
                    .try_into()
                    .map_err(|err| RunError::config(format!("[{}]: {err}", e.name())))?;
                sections.push((e, params));
            }
        }
        let shared: Params = toml::Value::Table(table)
            .try_into()
            .map_err(|e| RunError::config(format!("TOML: {e}")))?;
        Ok(Self { threads, out_dir, shared, sections })
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parameters for `experiment`: shared keys, then its own section.
    pub fn params_for(&self, experiment: Experiment) -> Params {
        let mut p = self.shared.clone();
        for (e, section) in &self.sections {
            if *e == experiment {
                p = p.overlay(section.clone());
            }
        }
        p
    }
}
