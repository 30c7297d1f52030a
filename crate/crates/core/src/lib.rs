//! Araki relative entropy of unitary excitations on finite-dimensional
//! self-dual CAR algebras, cross-checked against von Neumann relative
//! entropy on the Fock space.
//!
//! The one-particle layer ([`hilbert`], [`quasifree`]) feeds an exact
//! Jordan-Wigner Fock representation ([`fock`]); [`entropy`] evaluates the
//! Araki formula and the density-matrix routes side by side. [`modular`]
//! holds the type-I Tomita-Takesaki machinery and [`majorana`] the 1+1
//! dimensional worked example.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod entropy;
pub mod error;
pub mod fock;
pub mod hilbert;
pub mod linalg;
pub mod majorana;
pub mod modular;
pub mod quasifree;
pub mod random;
pub mod serde_ext;
pub mod sweep;

pub use entropy::{
    araki_unitary_excitation, exponential_excitation_entropy, full_report, multi_excitation_entropy,
    standard_subspace_excitation_entropy, vn_route, ArakiValues, EntropyReport, RouteOptions, Verdict, VnValues,
};
pub use error::{Error, Result};
pub use fock::{FockOperator, FockSpace};
pub use hilbert::{DynamicsGenerator, FieldVector, OneParticleSpace};
pub use linalg::{CMatrix, CVector, C64};
pub use majorana::{closed_form_entropy, truncated_matrix_entropy, MajoranaConfig};
pub use modular::{araki_entropy_bipartite, schmidt, vn_relative_entropy, BipartiteVector, DensityMatrix};
pub use quasifree::{kms_polarization, BasisPolarization, BasisProjection};
pub use sweep::{run_sweep, SweepConfig, SweepRow};
