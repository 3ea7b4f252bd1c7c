//! The experiments. Each takes the merged [`Params`], fills in its own
//! defaults, range-checks everything before computing and returns a
//! [`Report`].

mod combinatorial;
mod families;
mod spectral;
mod stochastic;

use plab_core::maps::{gaspard_wang_model, TailKind};
use plab_core::{combinatorics, Model, Potential};

use crate::config::{Experiment, Grid, ModelKind, Params, PsiKind};
use crate::RunError;
use crate::Report;

pub fn dispatch(experiment: Experiment, p: &Params) -> Result<Report, RunError> {
    match experiment {
        Experiment::CatalanCheck => combinatorial::catalan_check(p),
        Experiment::SvTails => combinatorial::sv_tails(p),
        Experiment::SvPressure => combinatorial::sv_pressure(p),
        Experiment::FibTails => combinatorial::fib_tails(p),
        Experiment::FibPressure => combinatorial::fib_pressure(p),
        Experiment::PmModel => families::pm_model(p),
        Experiment::FlatModel => families::flat_model(p),
        Experiment::EigenAsym => spectral::eigen_asym(p),
        Experiment::Relation => spectral::relation(p),
        Experiment::PiScaling => spectral::pi_scaling(p),
        Experiment::EtauScaling => spectral::etau_scaling(p),
        Experiment::MeasureDistance => spectral::measure_distance(p),
        Experiment::Renewal => stochastic::renewal(p),
        Experiment::Correlation => stochastic::correlation(p),
        Experiment::Arcsine => stochastic::arcsine(p),
    }
}

fn require(ok: bool, reason: impl FnOnce() -> String) -> Result<(), RunError> {
    if ok {
        Ok(())
    } else {
        Err(RunError::config(reason()))
    }
}

fn list_or(v: &Option<Vec<f64>>, default: &[f64]) -> Result<Vec<f64>, RunError> {
    let out = v.clone().unwrap_or_else(|| default.to_vec());
    require(!out.is_empty(), || "empty parameter list".into())?;
    require(out.iter().all(|x| x.is_finite()), || "parameter lists must be finite".into())?;
    Ok(out)
}

fn grid_or(g: &Option<Grid>, start: f64, stop: f64, count: usize) -> Result<Vec<f64>, RunError> {
    match g {
        Some(g) => Ok(g.0.clone()),
        None => Grid::geometric(start, stop, count).map(|g| g.0).map_err(RunError::config),
    }
}

fn scalar_model(kind: ModelKind, beta: f64, lambda: f64, n_max: u64) -> Result<Model, RunError> {
    Ok(match kind {
        ModelKind::Gw => gaspard_wang_model(beta, TailKind::ExactPower, n_max)?,
        ModelKind::GwCorrected => gaspard_wang_model(beta, TailKind::WithCorrections, n_max)?,
        ModelKind::Sv => combinatorics::sv_model(lambda, 1.0, n_max)?,
    })
}

/// Potential from `psi`, `kappa`, `c_prime`, `c`, `value` and one `gamma`.
fn potential(p: &Params, default: PsiKind, gamma: f64, default_c_prime: f64) -> Result<Potential, RunError> {
    Ok(match p.psi.unwrap_or(default) {
        PsiKind::Log => Potential::Log { kappa: p.kappa.unwrap_or(1.0), constant: 0.0 },
        PsiKind::Poly => Potential::polynomial(p.c_prime.unwrap_or(default_c_prime), p.c.unwrap_or(1.0), gamma)?,
        PsiKind::Const => Potential::constant(p.value.unwrap_or(1.0)),
    })
}

fn psi_label(pot: &Potential) -> String {
    match pot {
        Potential::Log { kappa, constant } => format!("{kappa}*log(n)+{constant}"),
        Potential::Polynomial { c_prime, c, gamma } => format!("{c_prime}-{c}*n^{gamma}"),
        Potential::Table { values } => format!("table[{}]", values.len()),
    }
}

fn beta_check(beta: f64) -> Result<(), RunError> {
    require(beta > 0.0 && beta < 1.0, || format!("β = {beta} outside (0,1)"))
}
