//! Numerical laboratory for induced Markov models of null-recurrent
//! equilibrium states: branch-class models, exact path counting, pressure
//! solvers, eigenvalue asymptotics and renewal statistics.
//!
//! Every routine is generic over a [`Real`] scalar; the aliases below fix
//! `f64`, which is what the command-line driver uses.

pub mod combinatorics;
pub mod error;
pub mod maps;
pub mod model;
pub mod numerics;
pub mod pressure;
pub mod renewal;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{
    ch_constant, BranchClass, GibbsWeights, InducedModel, Moment, Multiplicity, PotentialFamily,
    TailCorrection, TailLaw,
};
pub use scalar::Real;

pub type Model = InducedModel<f64>;
pub type Tail = TailLaw<f64>;
pub type Potential = PotentialFamily<f64>;
