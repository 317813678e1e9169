//! Exact simulation of multi-boson interference under nonlinear mode couplers.
//!
//! A coupler is a sum of ladder monomials c·∏ₘ(âₘ†)^pₘ(âₘ)^qₘ, closed under
//! Hermitian conjugation. Each monomial maps a Fock basis state to at most one
//! other, so any initial occupation generates a finite invariant block and the
//! dynamics reduce to exact diagonalization of a small dense Hermitian matrix.

pub mod analysis;
pub mod dicke;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod hamiltonian;
pub mod scenario;
pub mod tol;

pub use error::{Error, Result};
