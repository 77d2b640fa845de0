use num_complex::Complex64;
use thiserror::Error;

use crate::poly::Group;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },

    #[error("expected 27 coefficients, got {0}")]
    WrongLength(usize),

    #[error("local operator on leg {leg} is singular (|det| = {det:e})")]
    SingularMatrix { leg: usize, det: f64 },

    #[error("local operator on leg {leg} is not in SL(3) (det = {det})")]
    NotSpecialLinear { leg: usize, det: Complex64 },

    #[error("the zero tensor has no normalized invariants")]
    ZeroTensor,

    #[error("omega evaluation left degree {degree} in group {group} on copy {copy}")]
    NonScalarResidue { group: Group, copy: u8, degree: u32 },

    #[error("factor {factor} does not live on a single copy")]
    MixedCopies { factor: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("no real root found; roots are {roots:?}")]
    NoRealRoot { roots: Vec<Complex64> },

    #[error("block solution is singular: {denominator} = {value:e}")]
    SingularBlock { denominator: &'static str, value: f64 },

    #[error("renormalized transverse factor vanishes (X_ren = {0:e})")]
    VanishingXren(f64),

    #[error("flow stopped after step {last_step}: {cause}")]
    TruncatedFlow { last_step: usize, cause: String },

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    NoBracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("classification window around {delta} leaves the scan grid")]
    WindowOutOfGrid { delta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed tensor JSON: {0}")]
    Json(#[from] serde_json::Error),
}
