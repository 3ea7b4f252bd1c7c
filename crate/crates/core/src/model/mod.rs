//! Induced models, tails and perturbations.

pub mod induced;
pub mod multiplicity;
pub mod potential;
pub mod tail_law;

pub use induced::{AbscissaEstimate, BranchClass, GibbsWeights, InducedModel, Moment};
pub use multiplicity::Multiplicity;
pub use potential::PotentialFamily;
pub use tail_law::{ch_constant, ch_constant_with, Bracket, PowerTerm, TailCorrection, TailLaw};
