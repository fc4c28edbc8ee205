//! Numerical solver for the matrix-valued Boltzmann equation of the weakly
//! interacting Hubbard chain.
//!
//! The state is a field of 2×2 Hermitian matrices `W(k)` on a uniform grid of
//! the Brillouin zone. It evolves under a conservative collision operator
//! (commutator with a mollified effective Hamiltonian) and a dissipative one
//! (integrated along the collision manifold), stepped with a Strang
//! splitting. Stationary states, including non-thermal ones, can be predicted
//! from the conserved quantities of an initial field.
//!
//! The crate is `no_std` with `alloc` when built without the default `std`
//! feature.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod collision;
pub mod error;
pub mod field;
pub mod initial;
pub mod integrator;
pub mod lattice;
pub mod observables;
pub mod spin2;
pub mod stationary;

#[cfg(test)]
mod testutil;

pub use collision::{CollisionKernel, CollisionKernelConfig};
pub use error::{Error, Result};
pub use field::WignerField;
pub use integrator::{evolve, step, Evolution, RecordOptions, TimeStepConfig};
pub use lattice::{BrillouinGrid, Dispersion};
pub use observables::{
    bloch_curve, charges, entropy, entropy_production, fit_decay_rate, hs_distance,
    ConservedCharges, DistancePart, TrajectoryRecord,
};
pub use spin2::{BlochVector, HermitianMatrix2, Mat2, C64};
pub use stationary::{
    build_stationary, fermi_dirac, predict_stationary, FermiDiracParams, Prediction, SpinBasis,
    StationaryState,
};
