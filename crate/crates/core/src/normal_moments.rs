//! Moments of the univariate normal and gamma distributions.
//!
//! The normal kernels here are the conditional moments that the t-moment
//! derivations integrate over the gamma mixing variable; the gamma moments
//! (including negative orders) perform that integration.

use crate::error::{MomentError, Result};
use crate::real::Real;
use crate::specfun::{gamma_ratio, hyp1f1};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams<T> {
    pub mean: T,
    pub variance: T,
}

impl<T: Real> NormalParams<T> {
    pub fn new(mean: T, variance: T) -> Result<Self> {
        if !mean.is_finite() {
            return Err(MomentError::domain("normal mean", mean.as_f64()));
        }
        if !(variance > T::zero()) || !variance.is_finite() {
            return Err(MomentError::domain("normal variance", variance.as_f64()));
        }
        Ok(Self { mean, variance })
    }

    pub fn density(&self, x: T) -> T {
        let d = x - self.mean;
        (-(d * d) / (T::lit(2.0) * self.variance)).exp() / (T::lit(2.0) * T::PI() * self.variance).sqrt()
    }
}

/// Gamma distribution with shape `alpha` and rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> GammaParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(MomentError::domain("gamma shape alpha", alpha.as_f64()));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(MomentError::domain("gamma rate beta", beta.as_f64()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn density(&self, x: T) -> T {
        if !(x > T::zero()) {
            return T::zero();
        }
        let log = self.alpha * self.beta.ln() - crate::specfun::log_gamma(self.alpha).unwrap_or(T::nan())
            + (self.alpha - T::one()) * x.ln()
            - self.beta * x;
        log.exp()
    }
}

/// `E[(X - mean)^m]`: zero for odd `m`, `σ^m m! / (2^(m/2) (m/2)!)` for even `m`.
pub fn normal_central_moment<T: Real>(p: &NormalParams<T>, m: u32) -> T {
    if m % 2 == 1 {
        return T::zero();
    }
    // m! / (2^(m/2) (m/2)!) = (m-1)!!
    let mut double_fact = T::one();
    let mut i = 1;
    while i < m {
        double_fact = double_fact * T::from_count(i as usize);
        i += 2;
    }
    p.variance.powi(m as i32 / 2) * double_fact
}

/// `E|X|^k = (2v)^(k/2) Γ((k+1)/2)/√π · 1F1(-k/2; 1/2; -mean²/(2v))`.
pub fn normal_abs_moment<T: Real>(p: &NormalParams<T>, k: u32) -> Result<T> {
    normal_abs_moment_real(p, T::from_count(k as usize))
}

/// Absolute moment of real order `k >= 0`.
pub fn normal_abs_moment_real<T: Real>(p: &NormalParams<T>, k: T) -> Result<T> {
    if !(k >= T::zero()) || !k.is_finite() {
        return Err(MomentError::domain("absolute moment order k", k.as_f64()));
    }
    if k == T::zero() {
        return Ok(T::one());
    }
    let half = T::lit(0.5);
    let two_v = T::lit(2.0) * p.variance;
    let z = -(p.mean * p.mean) / two_v;
    let f = hyp1f1(-k * half, half, z)?;
    Ok(two_v.powf(k * half) * gamma_ratio((k + T::one()) * half, half)? * f.value)
}

/// `E[X^k]` by the even/odd confluent-hypergeometric kernels.
///
/// Even orders share [`normal_abs_moment`] exactly; odd orders use
/// `mean (2v)^((k-1)/2) 2 Γ(k/2+1)/√π · 1F1((1-k)/2; 3/2; -mean²/(2v))`.
pub fn normal_raw_moment<T: Real>(p: &NormalParams<T>, k: u32) -> Result<T> {
    if k.is_multiple_of(2) {
        return normal_abs_moment(p, k);
    }
    let half = T::lit(0.5);
    let kk = T::from_count(k as usize);
    let two_v = T::lit(2.0) * p.variance;
    let z = -(p.mean * p.mean) / two_v;
    let f = hyp1f1((T::one() - kk) * half, T::lit(1.5), z)?;
    Ok(p.mean * two_v.powi((k as i32 - 1) / 2) * T::lit(2.0) * gamma_ratio(kk * half + T::one(), half)? * f.value)
}

/// `E[X^k] = β^(-k) Γ(k+α)/Γ(α)` for real `k > -α`.
pub fn gamma_moment<T: Real>(p: &GammaParams<T>, k: T) -> Result<T> {
    if !(k > -p.alpha) {
        return Err(MomentError::Undefined { order: k.as_f64(), limit: -p.alpha.as_f64() });
    }
    Ok(p.beta.powf(-k) * gamma_ratio(k + p.alpha, p.alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal() -> NormalParams<f64> {
        NormalParams::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn central_moment_examples() {
        assert_eq!(normal_central_moment(&std_normal(), 4), 3.0);
        assert_eq!(normal_central_moment(&NormalParams::new(5.0, 2.0).unwrap(), 3), 0.0);
        assert_eq!(normal_central_moment(&std_normal(), 0), 1.0);
        assert_eq!(normal_central_moment(&NormalParams::new(0.0, 2.0).unwrap(), 6), 15.0 * 8.0);
    }

    #[test]
    fn abs_and_raw_examples() {
        let a1 = normal_abs_moment(&std_normal(), 1).unwrap();
        assert!((a1 - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!((normal_abs_moment(&std_normal(), 2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(normal_abs_moment(&NormalParams::new(3.3, 0.4).unwrap(), 0).unwrap(), 1.0);
        let p = NormalParams::new(1.7, 0.3).unwrap();
        assert!((normal_raw_moment(&p, 1).unwrap() - 1.7_f64).abs() < 1e-15);
        assert!((normal_raw_moment(&std_normal(), 6).unwrap() - 15.0).abs() < 1e-13);
        let q = NormalParams::new(2.0, 1.0).unwrap();
        assert!((normal_raw_moment(&q, 2).unwrap() - 5.0_f64).abs() < 1e-14);
        // mu^3 + 3 mu v
        let r = NormalParams::new(-0.8, 2.5).unwrap();
        let want: f64 = -0.512 + 3.0 * -0.8 * 2.5;
        assert!((normal_raw_moment(&r, 3).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn gamma_moment_examples() {
        let g = GammaParams::new(3.0, 3.0).unwrap();
        assert!((gamma_moment(&g, -1.0).unwrap() - 1.5_f64).abs() < 1e-15);
        assert_eq!(gamma_moment(&GammaParams::new(2.0, 5.0).unwrap(), 0.0).unwrap(), 1.0);
        assert!((gamma_moment(&GammaParams::new(2.0, 1.0).unwrap(), 1.0).unwrap() - 2.0_f64).abs() < 1e-15);
        assert!(matches!(gamma_moment(&g, -3.0), Err(MomentError::Undefined { .. })));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(NormalParams::new(0.0, 0.0).is_err());
        assert!(NormalParams::new(f64::NAN, 1.0).is_err());
        assert!(GammaParams::new(0.0, 1.0).is_err());
        assert!(GammaParams::new(1.0, -1.0).is_err());
    }
}
