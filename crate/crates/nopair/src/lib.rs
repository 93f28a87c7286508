//! Relativistic no-pair Hartree-Fock and Mueller density-matrix functionals
//! on a periodic spinor lattice.
//!
//! The crate discretizes four-component spinor fields on a cubic box with
//! periodic boundary conditions. In the plane-wave basis the free Dirac
//! operator and the positive-energy projector are exact 4x4 blocks per
//! momentum, which makes the free-picture constraint `0 <= gamma <= P0`
//! cheap to enforce and the no-pair functionals cheap to evaluate.
//!
//! Layers, bottom up:
//!
//! * [`lattice`] - box geometry, spinor/scalar fields, unitary transforms,
//!   the periodic Coulomb kernel.
//! * [`dirac`] - Dirac matrices, momentum symbols, the positive-energy
//!   projector, nuclear configurations and the external potential.
//! * [`density`] - density matrices in natural-orbital form, feasibility
//!   projection, reproducible random generators.
//! * [`energy`] - direct/exchange energies, screening potential, exchange
//!   operator, the Hartree-Fock and Mueller functionals, the mean field.
//! * [`pair`] - the two-particle no-pair operator, the renormalization
//!   constant `lambda0`, and the kernel-space recast of the Mueller energy.
//! * [`scf`] - constrained minimization over density matrices with an
//!   optimal-damping line search, plus the experimental Mittleman update.
//! * [`verify`] - numerical certification of the operator inequalities the
//!   functionals rely on, with signed margins and machine-readable reports.

pub mod density;
pub mod dirac;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod lattice;
pub mod pair;
pub mod scf;
pub mod verify;

pub use error::NopairError;

/// Crate result type.
pub type Result<T> = std::result::Result<T, NopairError>;
