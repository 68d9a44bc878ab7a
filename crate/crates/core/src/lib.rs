//! Closed-form raw, central, absolute and truncated moments of generalized
//! Student's t-distributions in one and several dimensions, with independent
//! numerical oracles (quadrature, mixture sampling, Monte Carlo) to check them.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, which is what the oracles and the
//! command-line front end use.
//!
//! Scale parameters follow the precision convention: for the 1-D family the
//! density is proportional to `(1 + σ (t - μ)² / ν)^(-(ν+1)/2)`, so a larger
//! `σ` means a tighter distribution, and in `n` dimensions the matrix `Σ`
//! enters the quadratic form `(t - μ)ᵀ Σ (t - μ)` directly.

pub mod error;
pub mod linalg;
pub mod moment;
pub mod normal_moments;
pub mod oracle;
pub mod real;
pub mod specfun;
pub mod t1d;
pub mod tnd;
pub mod truncated;

pub use error::{MomentError, Result};
pub use moment::{Diagnostics, Mode, MomentKind, MomentResult, UNDEFINED_ORDER_REASON};
pub use real::Real;
pub use tnd::MultiIndex;

pub type TParams1D = t1d::TParams1D<f64>;
pub type TParamsND = tnd::TParamsND<f64>;
pub type NormalParams = normal_moments::NormalParams<f64>;
pub type GammaParams = normal_moments::GammaParams<f64>;
pub type Rectangle = truncated::Rectangle<f64>;
pub type SquareMatrix = linalg::SquareMatrix<f64>;
pub type MixturePoly = tnd::MixturePoly<f64>;
pub type Moment = MomentResult<f64>;

pub type TParams1DF32 = t1d::TParams1D<f32>;
pub type TParamsNDF32 = tnd::TParamsND<f32>;
