//! Finitely additive measures on the projection lattice of a finite-dimensional
//! von Neumann algebra `M_{n_1} ⊕ … ⊕ M_{n_k}`, and their extension to linear
//! functionals and operators.
//!
//! * [`algebra`]: block-diagonal elements, projections, spectral calculus.
//! * [`measures`]: measure representations, additivity sampling, `V(p)`, `α(p)`.
//! * [`extension`]: reconstruction of the representing matrix, the spectral
//!   extension `ω`, linearity audits and the vector-valued lift.
//! * [`counterexamples`]: qubit frame measures that are additive but not linear.

pub mod algebra;
pub mod counterexamples;
pub mod error;
pub mod extension;
pub mod json;
pub mod measures;
pub mod minimax;
pub mod random;

pub use algebra::{
    central_projections, dyadic_projections, is_projection, matrix_functionals, relation, spectral_decompose,
    AlgebraShape, CMat, Element, MatrixFunctionals, Projection, Relation, SpectralDecomposition,
};
pub use counterexamples::{
    bloch_projection, nonlinearity_residual, qubit_frame_measure, BlochVector, NonlinearityCertificate,
};
pub use error::{Error, Result};
pub use extension::{
    extend_vector_measure, functional_norm_bound, linearity_audit, omega, omega_dyadic, reconstruct,
    reconstruct_with, spanning_projections, ExtensionResult, ExtensionStatus, FamilyOrder, LinearityAudit,
    NormBound, OperatorRep, ReconstructOptions, SpanningFamily, VectorMeasure,
};
pub use measures::{
    additivity_check, centre_normalize, positivity_shift, variation_and_alpha, AdditivityReport,
    CentreNormalization, OddFunction, ScalarMeasure, Table, TableOracle, VariationAlpha,
};
pub use num_complex::Complex64;
pub use random::random_projection;
