//! Brute-force ground truth for the closed forms: direct quadrature of the
//! defining integrals, the normal/gamma mixture sampler, and seeded Monte
//! Carlo with standard errors.

pub mod quad;
pub mod sampling;

pub use quad::{Integrator, QuadResult};
pub use sampling::{
    mc_abs_moment_nd, mc_expectation_nd, mc_moment_nd, sample_t_1d, sample_t_nd, McEstimate, NdSampler,
};

use crate::error::{MomentError, Result};
use crate::moment::{order_is_defined, MomentKind};
use crate::real::Real;
use crate::specfun::log_gamma;
use crate::t1d::{log_t_pdf, TParams1D};

/// `∫ g(t) St(t | μ, σ, ν) dt` over `[lower, upper]` where `g` is `t^k`,
/// `(t-μ)^k`, `|t|^k` or `|t-μ|^k` according to `kind`.
///
/// `tol` is used as both the relative target and the absolute floor, so a
/// value near zero (odd moments of a symmetric law) still terminates.
/// An infinite bound with `k ≥ ν` is rejected as [`MomentError::Undefined`]
/// since the integral diverges; non-convergence comes back as
/// [`MomentError::QuadratureNoConvergence`].
pub fn quad_moment_1d<T: Real>(
    kind: MomentKind,
    k: u32,
    p: &TParams1D<T>,
    lower: T,
    upper: T,
    tol: T,
) -> Result<QuadResult<T>> {
    let kk = T::from_count(k as usize);
    integrate_power(kk, kind.is_central(), !kind.is_absolute() && k % 2 == 1, p, lower, upper, tol)
}

/// `∫ |t|^k` or `∫ |t-μ|^k` against the density for real `k ≥ 0`.
pub fn quad_abs_moment_real_1d<T: Real>(
    k: T,
    central: bool,
    p: &TParams1D<T>,
    lower: T,
    upper: T,
    tol: T,
) -> Result<QuadResult<T>> {
    if !(k >= T::zero()) || !k.is_finite() {
        return Err(MomentError::domain("moment order k", k.as_f64()));
    }
    integrate_power(k, central, false, p, lower, upper, tol)
}

/// `∫ s(x) |x|^k St(t) dt` with `x = t - shift`, `s` the sign of `x` when
/// `signed`.
fn integrate_power<T: Real>(
    kk: T,
    central: bool,
    signed: bool,
    p: &TParams1D<T>,
    lower: T,
    upper: T,
    tol: T,
) -> Result<QuadResult<T>> {
    if lower.is_nan() || upper.is_nan() || !(lower < upper) {
        return Err(MomentError::InvalidRectangle { coord: 0, lower: lower.as_f64(), upper: upper.as_f64() });
    }
    if (!lower.is_finite() || !upper.is_finite()) && !order_is_defined(kk, p.nu) {
        return Err(MomentError::Undefined { order: kk.as_f64(), limit: p.nu.as_f64() });
    }
    let shift = if central { p.mu } else { T::zero() };
    let integrand = |t: T| {
        let x = t - shift;
        let log_pdf = log_t_pdf(t, p);
        if kk == T::zero() {
            return log_pdf.exp();
        }
        if x == T::zero() {
            return T::zero();
        }
        let mag = (kk * x.abs().ln() + log_pdf).exp();
        if signed && x < T::zero() {
            -mag
        } else {
            mag
        }
    };
    let scale = p.scale();
    let breaks = [p.mu - scale, p.mu, p.mu + scale, T::zero()];
    let res = Integrator::new(tol, tol).with_tail_width(scale).integrate_with_breaks(integrand, lower, upper, &breaks);
    check(res, tol)
}

/// Lemma-1 integrand integrated numerically:
/// `∫₀^∞ N(t | μ, 1/(σλ)) Gamma(λ | ν/2, ν/2) dλ`, which must reproduce
/// [`crate::t1d::t_pdf`].
pub fn mixture_density_1d<T: Real>(t: T, p: &TParams1D<T>, tol: T) -> Result<QuadResult<T>> {
    let half = T::lit(0.5);
    let shape = p.nu * half;
    let log_norm_gamma = shape * shape.ln() - log_gamma(shape)?;
    let d2 = (t - p.mu) * (t - p.mu);
    let integrand = |lambda: T| {
        if !(lambda > T::zero()) {
            return T::zero();
        }
        let prec = p.sigma * lambda;
        let log_normal = half * (prec / (T::lit(2.0) * T::PI())).ln() - half * prec * d2;
        let log_gamma_pdf = log_norm_gamma + (shape - T::one()) * lambda.ln() - shape * lambda;
        (log_normal + log_gamma_pdf).exp()
    };
    // λ | t is Gamma((ν+1)/2, (ν + σ(t-μ)²)/2); centre the panels on its mean
    let center = (p.nu + T::one()) / (p.nu + p.sigma * d2);
    let breaks = [center * T::lit(0.25), center, center * T::lit(4.0)];
    let res = Integrator::new(tol, tol).with_tail_width(center).integrate_with_breaks(
        integrand,
        T::zero(),
        T::infinity(),
        &breaks,
    );
    check(res, tol)
}

fn check<T: Real>(res: QuadResult<T>, tol: T) -> Result<QuadResult<T>> {
    if res.converged {
        Ok(res)
    } else {
        Err(MomentError::QuadratureNoConvergence {
            achieved: res.est_abs_error.as_f64(),
            requested: tol.max(tol * res.value.abs()).as_f64(),
        })
    }
}
