//! Exact site and flow representations of the Bose–Hubbard ring
//! Hamiltonian.
//!
//! The crate is layered bottom-up:
//!
//! - [`cyclo`]: exact arithmetic in Q(σ), σ = exp(2πi/n).
//! - [`boson`]: normal-ordered polynomials in bosonic modes over Q(σ).
//! - [`xmatrix`]: exact matrices (Σ₁, Σ₃, the Fourier matrix, W²).
//! - [`hamiltonian`]: site and flow Hamiltonians and exact verifiers.
//! - [`fock`]: fixed-N Fock sectors, sparse matrices and a Jacobi eigensolver
//!   for numerical cross-checks.

pub mod boson;
pub mod cyclo;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod xmatrix;

pub use boson::{monomial_product, normal_order_product, total_number, BosonPolynomial, ModeMonomial};
pub use cyclo::{cyclotomic_polynomial, parse_rational, sigma_power, CycloField, CycloScalar, Rational};
pub use error::{Error, Result};
pub use fock::{
    enumerate_basis, hermitian_eigenvalues, operator_matrix, spectra_match, FockBasis, FockState, SparseOperator,
};
pub use hamiltonian::{
    build_flow, build_flow_hopping, build_flow_interaction, build_site, flow_to_site, transcribed_special_case,
    verify_flow_representation, verify_fundamental_formula, Hamiltonian, HamiltonianParams, Representation,
    VerificationReport,
};
pub use xmatrix::ExactMatrix;
