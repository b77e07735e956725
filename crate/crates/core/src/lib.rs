//! Tight-binding energy of Kekulé-distorted honeycomb lattices.
//!
//! The crate covers the Bloch operators on the 6-atom cell, Brillouin-zone
//! quadrature of the trace per atom, minimization of the total energy with
//! an elastic penalty, and the integrals that locate the transition between
//! distorted and pristine minimizers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod energy;
pub mod error;
pub mod kagome;
pub mod lattice;
pub mod linalg;
pub mod minimize;
pub mod perturbation;
pub mod simplex;
pub mod sympoly;
pub mod verify;

pub use bloch::{BandSet, BlochMatrix, HoppingTriple};
pub use energy::{ElasticModel, EnergyBreakdown};
pub use error::{Error, Result};
pub use kagome::KagomeBands;
pub use lattice::{basis, build_basis, make_grid, Estimate, LatticeBasis, QuadratureGrid, Vec2, Zone};
pub use minimize::{MinimizeOptions, MinimizerResult, Phase, PhasePoint, SymClass};
pub use perturbation::PerturbationIntegrand;
pub use sympoly::{CharPolyCoeffs, KekuleProjection};
