//! Polynomial harmonic-oscillator Hamiltonians with a prescribed point spectrum.
//!
//! A Hamiltonian `Ĥ = P(ĥ) = Σ_{j≥1} a_j ĥ^j` built from the oscillator
//! `ĥ = p̂²/2 + x̂²/2` shares its eigenfunctions with `ĥ` and has levels
//! `E_n = P(n + 1/2)`. Choosing the first `N` energies fixes the coefficients
//! through an exact linear solve ([`exactalg::dial`]); the resulting energies
//! generally no longer increase with node count ([`spectrum::ordering_report`]),
//! which [`gridverify`] confirms on a discretized `P(ĥ)` independently of the
//! analytic shortcut.

pub mod cli;
pub mod error;
pub mod exactalg;
pub mod gridverify;
pub mod oscillator;
pub mod spectrum;

pub use error::{AlgebraError, GridError, OscillatorError, ParseError};
pub use exactalg::{
    build_energy_matrix, determinant, determinant_closed_form, dial, dial_partial, parse_rational, solve_linear_exact,
    EnergyMatrix, PolynomialHamiltonian, Rational, SpectrumTarget,
};
pub use gridverify::{
    build_oscillator_grid, count_nodes, diagonalize, matrix_polynomial, verify_dialled, GridEigenSolution,
    GridOperator, GridSpec, Stencil, VerificationReport,
};
pub use oscillator::{analytic_node_count, eigenfunction_value, hermite, oscillator_energy, HermitePoly, LevelIndex};
pub use spectrum::{
    classical_cross_section, evaluate_polynomial, evaluate_spectrum, ordering_report, LevelRecord, OrderingReport,
};
