//! Critical structure of the norm-square of the momentum map for linear
//! Hamiltonian torus actions on ℂⁿ.
//!
//! * [`exactlin`]: exact rational vectors, feet of perpendiculars, rank, cone
//!   membership by exact simplex.
//! * [`weights`]: the action data and the momentum map.
//! * [`critical`]: exact enumeration of critical components, Morse indices,
//!   minimizing manifolds and the four criticality predicates.
//! * [`poincare`]: equivariant Poincaré series of level sets and Betti numbers
//!   of symplectic quotients.
//! * [`degeneracy`]: floating-point certification of minimal degeneracy:
//!   Hessians, negative eigenspaces, fibrewise critical loci, gradient flow.

pub mod critical;
pub mod degeneracy;
pub mod error;
pub mod exactlin;
pub mod poincare;
pub mod weights;

pub use error::{Error, Result};
