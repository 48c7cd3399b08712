//! Forward and inverse resonance scattering for Jacobi operators
//! `(Jf)_n = a_{n-1} f_{n-1} + a_n f_{n+1} + b_n f_n` with compactly
//! supported coefficient perturbations.
//!
//! The forward direction maps a coefficient window to the Wronskian
//! polynomials `w` and `s`, the bound states and resonances (zeros of `w`
//! inside and outside the unit disk in the uniformizing variable
//! `lambda = z + 1/z`), and the norming constants. The inverse direction
//! solves the functional equation
//! `w(z) w(1/z) + eta^2(z) = s(z) s(1/z)`, `eta = z - 1/z`,
//! to recover `w` from `(s, E_N)` or `s` from `(w, sigma)`, and runs the
//! Marchenko reconstruction back to the coefficients. The sign sequences
//! `sigma` parametrize the iso-resonance family: all perturbations sharing
//! the same `w`, which `iso_enumerate` lists exhaustively.
//!
//! With the default `parallel` feature the circle sweeps, sign-family
//! candidates, and Marchenko systems run on rayon; `_seq` variants of the
//! swept operations are always available and the `par_vs_seq` criterion
//! bench compares the two.

pub mod error;
pub mod exec;
pub mod files;
pub mod inverse;
pub mod lattice;
pub mod marchenko;
pub mod poly;
pub mod report;
pub mod scattering;

pub use error::{Error, Result};
pub use inverse::{
    boundary_identities, canonical_zero_list, enumerate_sigma, enumerate_sigma_seq,
    lambda_consistency, recover_s, recover_s_any_m, recover_w, recover_w_any_m, sigma_of,
    ScatteringData, SigmaFamily, SignSequence,
};
pub use lattice::{
    asymptotic_diagnostics, classify, unitarity_coefficient_residual, wronskian_pair,
    ClassParams, JacobiSequence, JostTable, WronskianPair,
};
pub use marchenko::{
    glm_solve, inverse_scattering, inverse_scattering_with_guards, iso_enumerate,
    iso_enumerate_seq, kernel, kernel_dft_oracle, reconstruct, GlmSystem, InverseOutcome,
    IsoMember, MarchenkoKernel,
};
pub use poly::{
    find_roots, pair_reciprocal, symmetric_product, to_lambda_polynomial, EtaSign, PairedZero,
    RealPolynomial, ReciprocalPairing, SymmetricLaurent,
};
pub use report::{CheckItem, Diagnostics};
pub use scattering::{
    coefficient_identities, norming_constants, norming_direct, smatrix, spectrum,
    unitarity_residual, unitarity_residual_seq, validate_resonance_class,
    validate_scattering_class, BoundState, BoundStateSet, NormingConstants, Resonance,
    ResonanceSet, SMatrixSample, TraceIdentityReport, UnitarityReport,
};
