//! Projective linear algebra in two regimes: exact rationals and `f64`.

mod expm;
mod json;
mod matrix;
mod poly;
mod scalar;
mod spectrum;

pub use expm::{exp_nilpotent, is_nilpotent, log_unipotent, mat_exp, mat_log, spectral_log, SpectralLog};
pub use json::{matrix_from_json, matrix_to_json, AnyMatrix};
pub use matrix::{proj_equal, projective_residual, Mat4, ProjMap, ProjPoint, Vec4};
pub use poly::{characteristic_polynomial, Polynomial};
pub use scalar::{format_rational, parse_rational, rational_approx, rational_to_f64, Rational, Regime, Scalar};
pub use spectrum::{is_projectively_unipotent, minimal_polynomial, real_spectrum, Eigen};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinAlgError {
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector does not define a projective point")]
    ZeroVector,
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("non-real spectrum: eigenvalue {0}")]
    NonRealSpectrum(String),
    #[error("spectrum not rational: {0}")]
    IrrationalSpectrum(String),
    #[error("eigenvalue {0} is not positive")]
    NonPositiveSpectrum(f64),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}
