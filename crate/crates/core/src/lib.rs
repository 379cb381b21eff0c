//! Tree-based Chase-type soft-decision decoding of Reed-Solomon codes.
//!
//! The decoder tests flipping patterns in the order induced by an ordered
//! rooted tree whose vertices carry lower bounds on the soft weight of any
//! codeword they can generate. Each trial runs a multiplicity-one
//! Guruswami-Sudan decoder that is updated incrementally: one interpolation
//! point is removed from the parent's Gröbner basis and one new point is
//! added. Two sufficient conditions for maximum-likelihood optimality allow
//! early, certified exits.
//!
//! Module map:
//!
//! - [`galois`]: GF(p) and GF(2^m) arithmetic, univariate polynomials
//! - [`rscode`]: code parameters and evaluation-map encoding
//! - [`channel`]: BPSK/AWGN simulation, likelihood and soft-weight matrices
//! - [`interp`]: Gröbner-basis interpolation (forward/backward) and factorization
//! - [`chase`]: atoms, atom chain, flipping patterns, tree bounds
//! - [`decoder`]: the tree-based decoder, brute-force ML oracle, traces
//! - [`eval`]: LCC baseline and ML-bound bookkeeping
//! - [`sim`]: Monte-Carlo FER sweeps, χ² sphere thresholds, Wilson intervals

pub mod channel;
pub mod chase;
pub mod decoder;
pub mod eval;
pub mod galois;
pub mod interp;
pub mod rscode;
pub mod sim;

pub use channel::{LikelihoodMatrix, SoftWeights};
pub use chase::{Atom, AtomChain, FlippingPattern};
pub use decoder::{tcgs_decode, DecodeResult, DecoderConfig, ExitReason, Mode};
pub use galois::{Fe, Field, Poly};
pub use interp::{BivarPoly, GroebnerBasis};
pub use rscode::Code;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unsupported field GF({p}^{m})")]
    UnsupportedField { p: u32, m: u32 },
    #[error("modulus {modulus:#x} is not primitive for m = {m}")]
    NotPrimitive { m: u32, modulus: u32 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    PolyDivByZero,

    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("BPSK modulation requires a characteristic-2 field, got GF({0})")]
    NotBinary(usize),
    #[error("likelihood matrix parse error: {0}")]
    Parse(String),

    #[error("interpolation point x = {0} already present")]
    DuplicatePoint(Fe),
    #[error("interpolation point ({0}, {1}) not present")]
    MissingPoint(Fe, Fe),
    #[error("interpolation basis inconsistent: {0}")]
    BasisInconsistent(&'static str),

    #[error("pattern has no parent: the root has no siblings")]
    RootHasNoSibling,
    #[error("error pattern weight {weight} is below t_min = {t_min}")]
    WeightBelowTmin { weight: usize, t_min: usize },

    #[error("code too large for exhaustive search ({0} codewords)")]
    CodeTooLarge(u128),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trace file is empty")]
    EmptyTrace,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
