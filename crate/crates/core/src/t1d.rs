//! One-dimensional generalized Student's t: density and closed-form moments.
//!
//! `T ~ St(μ, σ, ν)` is the marginal of `T | λ ~ N(μ, 1/(σλ))` with
//! `λ ~ Gamma(ν/2, ν/2)`, so `σ` acts as a precision: the variance (for ν > 2)
//! is `ν / (σ (ν - 2))`. Use [`TParams1D::from_scale`] to build from the
//! usual scale `s`, which maps to `σ = 1/s²`.
//!
//! Every moment is defined only for order `k < ν`; `k = 0` is always defined.

use crate::error::{MomentError, Result};
use crate::moment::{order_is_defined, Diagnostics, Mode, MomentResult};
use crate::real::Real;
use crate::specfun::{gamma_ratio, hyp2f1, HypergeomEval};

pub const FORMULA_RAW_STANDARD: &str = "t1d.raw.standard";
pub const FORMULA_ABS_STANDARD: &str = "t1d.abs.standard";
pub const FORMULA_RAW: &str = "t1d.raw";
pub const FORMULA_CENTRAL: &str = "t1d.central";
pub const FORMULA_ABS: &str = "t1d.abs";
pub const FORMULA_CENTRAL_ABS: &str = "t1d.central-abs";
pub const FORMULA_RAW_FROM_CENTRAL: &str = "t1d.raw-from-central";

/// Location `mu`, precision-like `sigma`, degrees of freedom `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TParams1D<T> {
    pub mu: T,
    pub sigma: T,
    pub nu: T,
}

impl<T: Real> TParams1D<T> {
    pub fn new(mu: T, sigma: T, nu: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(MomentError::domain("location mu", mu.as_f64()));
        }
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(MomentError::domain("sigma", sigma.as_f64()));
        }
        if !(nu > T::zero()) || !nu.is_finite() {
            return Err(MomentError::domain("degrees of freedom nu", nu.as_f64()));
        }
        Ok(Self { mu, sigma, nu })
    }

    /// Standard t with `ν` degrees of freedom.
    pub fn standard(nu: T) -> Result<Self> {
        Self::new(T::zero(), T::one(), nu)
    }

    /// From the conventional scale `s` (density in `(t - μ)/s`): `σ = 1/s²`.
    pub fn from_scale(mu: T, scale: T, nu: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(MomentError::domain("scale", scale.as_f64()));
        }
        Self::new(mu, T::one() / (scale * scale), nu)
    }

    /// The conventional scale `1/√σ`.
    pub fn scale(&self) -> T {
        T::one() / self.sigma.sqrt()
    }
}

/// `ln St(t | μ, σ, ν)`.
pub fn log_t_pdf<T: Real>(t: T, p: &TParams1D<T>) -> T {
    let half = T::lit(0.5);
    let nu = p.nu;
    let d = t - p.mu;
    let log_norm = gamma_ratio((nu + T::one()) * half, nu * half).map(|r| r.ln()).unwrap_or(T::nan())
        + half * (p.sigma / (nu * T::PI())).ln();
    log_norm - (nu + T::one()) * half * ln_1p_square(d * (p.sigma / nu).sqrt())
}

/// `ln(1 + z²)` without overflowing `z²` far in the tails, where the
/// density underflows but `|t|^k` times it need not.
fn ln_1p_square<T: Real>(z: T) -> T {
    let z = z.abs();
    if z > T::one() {
        T::lit(2.0) * z.ln() + (z * z).recip().ln_1p()
    } else {
        (z * z).ln_1p()
    }
}

/// Density `Γ((ν+1)/2)/Γ(ν/2) (σ/(νπ))^(1/2) (1 + σ(t-μ)²/ν)^(-(ν+1)/2)`.
pub fn t_pdf<T: Real>(t: T, p: &TParams1D<T>) -> T {
    log_t_pdf(t, p).exp()
}

fn check_nu<T: Real>(nu: T) -> Result<()> {
    if !(nu > T::zero()) || !nu.is_finite() {
        return Err(MomentError::domain("degrees of freedom nu", nu.as_f64()));
    }
    Ok(())
}

fn order<T: Real>(k: u32) -> T {
    T::from_count(k as usize)
}

fn series_diagnostics<T: Real>(f: &HypergeomEval<T>) -> Diagnostics<T> {
    Diagnostics { series_terms: Some(f.terms_used), series_error: Some(f.est_error), ..Diagnostics::default() }
}

/// `Γ((k+1)/2)/√π`.
fn half_gamma_over_sqrt_pi<T: Real>(k: T) -> Result<T> {
    gamma_ratio((k + T::one()) * T::lit(0.5), T::lit(0.5))
}

/// Raw moment of the standard t: zero for odd `k`, and
/// `Γ((k+1)/2)/√π · ν^(k/2) / ∏_{i=1}^{k/2} (ν/2 - i)` for even `k`.
pub fn raw_moment_standard<T: Real>(k: u32, nu: T) -> Result<MomentResult<T>> {
    check_nu(nu)?;
    if !order_is_defined(order(k), nu) {
        return Ok(MomentResult::undefined(FORMULA_RAW_STANDARD, Mode::ClosedForm));
    }
    if k % 2 == 1 {
        return Ok(MomentResult::defined(T::zero(), FORMULA_RAW_STANDARD, Mode::ClosedForm));
    }
    let half_nu = nu * T::lit(0.5);
    let mut denom = T::one();
    for i in 1..=(k / 2) {
        denom = denom * (half_nu - order::<T>(i));
    }
    let value = half_gamma_over_sqrt_pi(order::<T>(k))? * nu.powi(k as i32 / 2) / denom;
    Ok(MomentResult::defined(value, FORMULA_RAW_STANDARD, Mode::ClosedForm))
}

/// `E|T|^k = ν^(k/2) Γ((k+1)/2) Γ((ν-k)/2) / (√π Γ(ν/2))` for the standard t.
pub fn abs_moment_standard<T: Real>(k: u32, nu: T) -> Result<MomentResult<T>> {
    abs_moment_standard_real(order(k), nu)
}

/// [`abs_moment_standard`] at real order `k ∈ [0, ν)`.
pub fn abs_moment_standard_real<T: Real>(k: T, nu: T) -> Result<MomentResult<T>> {
    check_nu(nu)?;
    check_real_order(k)?;
    if !order_is_defined(k, nu) {
        return Ok(MomentResult::undefined(FORMULA_ABS_STANDARD, Mode::ClosedForm));
    }
    if k == T::zero() {
        return Ok(MomentResult::defined(T::one(), FORMULA_ABS_STANDARD, Mode::ClosedForm));
    }
    let half = T::lit(0.5);
    let value = nu.powf(k * half) * half_gamma_over_sqrt_pi(k)? * gamma_ratio((nu - k) * half, nu * half)?;
    Ok(MomentResult::defined(value, FORMULA_ABS_STANDARD, Mode::ClosedForm))
}

fn check_real_order<T: Real>(k: T) -> Result<()> {
    if !(k >= T::zero()) || !k.is_finite() {
        return Err(MomentError::domain("moment order k", k.as_f64()));
    }
    Ok(())
}

/// `-μ²σ/ν`, the argument of every `2F1` below.
fn hyp_argument<T: Real>(p: &TParams1D<T>) -> T {
    -(p.mu * p.mu) * p.sigma / p.nu
}

/// Shared even-order expression
/// `(ν/σ)^(k/2) Γ((k+1)/2)/√π Γ(ν/2-k/2)/Γ(ν/2) 2F1(-k/2, ν/2-k/2; 1/2; -μ²σ/ν)`.
fn even_form<T: Real>(k: T, p: &TParams1D<T>, formula: &'static str) -> Result<MomentResult<T>> {
    let half = T::lit(0.5);
    let (nu, sigma) = (p.nu, p.sigma);
    let f = hyp2f1(-k * half, (nu - k) * half, half, hyp_argument(p))?;
    let value =
        (nu / sigma).powf(k * half) * half_gamma_over_sqrt_pi(k)? * gamma_ratio((nu - k) * half, nu * half)? * f.value;
    Ok(MomentResult::defined(value, formula, Mode::ClosedForm).with_diagnostics(series_diagnostics(&f)))
}

/// Raw moment `E[T^k]` of the generalized t.
///
/// Even `k` uses the shared even form; odd `k` uses
/// `2μ (ν/σ)^((k-1)/2) Γ(k/2+1)/√π Γ(ν/2-(k-1)/2)/Γ(ν/2) 2F1((1-k)/2, ν/2-(k-1)/2; 3/2; -μ²σ/ν)`.
/// Both hypergeometric series terminate for integer `k`.
pub fn raw_moment<T: Real>(k: u32, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    let kk: T = order(k);
    if !order_is_defined(kk, p.nu) {
        return Ok(MomentResult::undefined(FORMULA_RAW, Mode::ClosedForm));
    }
    if k == 0 {
        return Ok(MomentResult::defined(T::one(), FORMULA_RAW, Mode::ClosedForm));
    }
    if k.is_multiple_of(2) {
        return even_form(kk, p, FORMULA_RAW);
    }
    let half = T::lit(0.5);
    let (nu, sigma) = (p.nu, p.sigma);
    let km1 = kk - T::one();
    let f = hyp2f1(-km1 * half, (nu - km1) * half, T::lit(1.5), hyp_argument(p))?;
    let value = T::lit(2.0)
        * p.mu
        * (nu / sigma).powi((k as i32 - 1) / 2)
        * gamma_ratio(kk * half + T::one(), half)?
        * gamma_ratio((nu - km1) * half, nu * half)?
        * f.value;
    Ok(MomentResult::defined(value, FORMULA_RAW, Mode::ClosedForm).with_diagnostics(series_diagnostics(&f)))
}

/// `(ν/σ)^(k/2) Γ((k+1)/2)/√π Γ((ν-k)/2)/Γ(ν/2)`: the central absolute moment,
/// also the even central moment.
fn central_abs_value<T: Real>(k: T, p: &TParams1D<T>) -> Result<T> {
    let half = T::lit(0.5);
    Ok((p.nu / p.sigma).powf(k * half) * half_gamma_over_sqrt_pi(k)? * gamma_ratio((p.nu - k) * half, p.nu * half)?)
}

/// Central moment `E[(T-μ)^k]`: zero for odd `k`, independent of `μ`.
pub fn central_moment<T: Real>(k: u32, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    let kk: T = order(k);
    if !order_is_defined(kk, p.nu) {
        return Ok(MomentResult::undefined(FORMULA_CENTRAL, Mode::ClosedForm));
    }
    let value = if k % 2 == 1 { T::zero() } else { central_abs_value(kk, p)? };
    Ok(MomentResult::defined(value, FORMULA_CENTRAL, Mode::ClosedForm))
}

/// Absolute moment `E|T|^k`. Odd orders need the non-terminating `2F1`,
/// evaluated through the Pfaff transform.
pub fn abs_moment<T: Real>(k: u32, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    abs_moment_real(order(k), p)
}

/// [`abs_moment`] at real order `k ∈ [0, ν)`.
pub fn abs_moment_real<T: Real>(k: T, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    check_real_order(k)?;
    if !order_is_defined(k, p.nu) {
        return Ok(MomentResult::undefined(FORMULA_ABS, Mode::ClosedForm));
    }
    if k == T::zero() {
        return Ok(MomentResult::defined(T::one(), FORMULA_ABS, Mode::ClosedForm));
    }
    even_form(k, p, FORMULA_ABS)
}

/// Central absolute moment `E|T-μ|^k`.
pub fn central_abs_moment<T: Real>(k: u32, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    central_abs_moment_real(order(k), p)
}

/// [`central_abs_moment`] at real order `k ∈ [0, ν)`.
pub fn central_abs_moment_real<T: Real>(k: T, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    check_real_order(k)?;
    if !order_is_defined(k, p.nu) {
        return Ok(MomentResult::undefined(FORMULA_CENTRAL_ABS, Mode::ClosedForm));
    }
    if k == T::zero() {
        return Ok(MomentResult::defined(T::one(), FORMULA_CENTRAL_ABS, Mode::ClosedForm));
    }
    Ok(MomentResult::defined(central_abs_value(k, p)?, FORMULA_CENTRAL_ABS, Mode::ClosedForm))
}

/// `E[T^k] = Σ_i C(k, i) μ^(k-i) E[(T-μ)^i]`.
pub fn raw_from_central<T: Real>(k: u32, p: &TParams1D<T>) -> Result<MomentResult<T>> {
    if !order_is_defined(order(k), p.nu) {
        return Ok(MomentResult::undefined(FORMULA_RAW_FROM_CENTRAL, Mode::ClosedForm));
    }
    let mut acc = crate::real::CompensatedSum::new();
    let mut binom = T::one();
    for i in 0..=k {
        if i > 0 {
            binom = binom * order::<T>(k - i + 1) / order::<T>(i);
        }
        let c = central_moment(i, p)?.value;
        if c != T::zero() {
            acc.add(binom * p.mu.powi((k - i) as i32) * c);
        }
    }
    Ok(MomentResult::defined(acc.value(), FORMULA_RAW_FROM_CENTRAL, Mode::ClosedForm))
}
