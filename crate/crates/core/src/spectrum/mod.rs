//! Bell operators, their spectra and the maximal quantum value of a functional.

mod canonical;
mod moments;
mod operator;
mod optimize;

pub use canonical::{canonicalize_complex, canonicalize_realization, canonicalize_state};
pub use moments::{moment_verify, MomentCheck};
pub use operator::{
    bell_matrix, build_bell_operator, build_bell_operator_in, kron, observable, observable_derivative, top_eigenpair,
    top_eigenvalue, BellOperator, EigenPair, Frame,
};
pub use optimize::{maximize_quantum_value, maximize_with, MaximizeOptions, QuantumMaximum};
