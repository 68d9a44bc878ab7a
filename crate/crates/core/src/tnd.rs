//! Multivariate Student's t: density, standardized closed forms, and the
//! moment recursion in two flavours.
//!
//! The matrix `Σ` is in precision convention: the density depends on
//! `(t - μ)ᵀ Σ (t - μ)`, and conditionally on the mixing variable `η`,
//! `T | η ~ N(μ, (ηΣ)⁻¹)` with `η ~ Gamma(ν/2, ν/2)`.
//!
//! Given `η`, normal moments obey
//! `E[X^(k+eᵢ)] = μᵢ E[X^k] + (1/η) Σⱼ (Σ⁻¹)ᵢⱼ kⱼ E[X^(k-eⱼ)]`.
//! [`raw_moment_nd`] carries each conditional moment as a polynomial in `1/η`
//! ([`MixturePoly`]) and integrates it term by term against the gamma density.
//! [`raw_moment_nd_literal`] instead replaces `1/η` by its expectation
//! `ν/(ν-2)` at every step, which is exact only up to total degree 2: from
//! degree 3 on, products of `1/η` factors appear whose expectation is not the
//! product of expectations (e.g. `E[T⁴] = 3ν²/((ν-2)(ν-4))` versus
//! `3ν²/(ν-2)²`).

use std::collections::HashMap;
use std::fmt;

use crate::error::{MomentError, Result};
use crate::linalg::{Cholesky, SquareMatrix};
use crate::moment::{order_is_defined, Mode, MomentResult};
use crate::real::Real;
use crate::specfun::gamma_ratio;

pub const FORMULA_STD_RAW: &str = "tnd.raw.standard";
pub const FORMULA_STD_ABS: &str = "tnd.abs.standard";
pub const FORMULA_RECURSION: &str = "tnd.raw.mixture-recursion";
pub const FORMULA_RECURSION_LITERAL: &str = "tnd.raw.literal-recursion";

/// Exponent vector `k = (k₁, …, kₙ)` of a mixed moment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Self {
        Self(k)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut k = vec![0; n];
        k[i] = 1;
        Self(k)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn any_odd(&self) -> bool {
        self.0.iter().any(|&k| k % 2 == 1)
    }

    /// `k - eᵢ`, or `None` when `kᵢ = 0`.
    pub fn decrement(&self, i: usize) -> Option<Self> {
        let mut k = self.0.clone();
        k[i] = k[i].checked_sub(1)?;
        Some(Self(k))
    }

    pub fn increment(&self, i: usize) -> Self {
        let mut k = self.0.clone();
        k[i] += 1;
        Self(k)
    }

    /// `k` with entry `j` deleted.
    pub fn without(&self, j: usize) -> Self {
        Self(self.0.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &k)| k).collect())
    }

    /// Every multi-index of length `n` with total degree at most `max_total`.
    pub fn all_up_to(n: usize, max_total: u32) -> Vec<MultiIndex> {
        fn rec(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<MultiIndex>) {
            if prefix.len() == n {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for v in 0..=left {
                prefix.push(v);
                rec(prefix, n, left - v, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(n), n, max_total, &mut out);
        out.sort_by_key(|k| k.total());
        out
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(k: Vec<u32>) -> Self {
        Self(k)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Polynomial `Σ_m c_m η^(-m)` in the reciprocal mixing variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePoly<T> {
    coeffs: Vec<T>,
}

impl<T: Real> MixturePoly<T> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// Coefficient of `η^(-m)`.
    pub fn coeff(&self, m: usize) -> T {
        self.coeffs.get(m).copied().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Highest power of `1/η` with a nonzero coefficient.
    pub fn max_power(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != T::zero())
    }

    /// `self += a * other`.
    pub fn add_scaled(&mut self, a: T, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), T::zero());
        }
        for (c, &o) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *c = *c + a * o;
        }
    }

    /// Multiplies by `1/η`.
    pub fn divide_by_mixing(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Value at a fixed mixing variable `η`.
    pub fn eval(&self, eta: T) -> T {
        let inv = T::one() / eta;
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * inv + c)
    }

    /// `∫ p(η) Gamma(η | ν/2, ν/2) dη`, using
    /// `E[η^(-m)] = (ν/2)^m Γ(ν/2 - m)/Γ(ν/2)`.
    pub fn integrate_gamma(&self, nu: T) -> Result<T> {
        let half_nu = nu * T::lit(0.5);
        let mut acc = crate::real::CompensatedSum::new();
        for (m, &c) in self.coeffs.iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            let mm = T::from_count(m);
            if !(mm < half_nu) {
                return Err(MomentError::Undefined { order: (mm * T::lit(2.0)).as_f64(), limit: nu.as_f64() });
            }
            acc.add(c * half_nu.powi(m as i32) * gamma_ratio(half_nu - mm, half_nu)?);
        }
        Ok(acc.value())
    }
}

/// Location vector, SPD precision-convention matrix, degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct TParamsND<T> {
    mu: Vec<T>,
    sigma_mat: SquareMatrix<T>,
    nu: T,
    chol: Cholesky<T>,
    sigma_inv: SquareMatrix<T>,
}

impl<T: Real> TParamsND<T> {
    pub fn new(mu: Vec<T>, sigma_mat: SquareMatrix<T>, nu: T) -> Result<Self> {
        if mu.len() != sigma_mat.dim() {
            return Err(MomentError::DimensionMismatch { expected: sigma_mat.dim(), got: mu.len() });
        }
        if mu.is_empty() {
            return Err(MomentError::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(bad) = mu.iter().find(|m| !m.is_finite()) {
            return Err(MomentError::domain("location mu entry", bad.as_f64()));
        }
        if !(nu > T::zero()) || !nu.is_finite() {
            return Err(MomentError::domain("degrees of freedom nu", nu.as_f64()));
        }
        let chol = sigma_mat.validate_spd()?;
        let sigma_inv = chol.inverse();
        Ok(Self { mu, sigma_mat, nu, chol, sigma_inv })
    }

    /// `μ = 0`, `Σ = I`.
    pub fn standard(n: usize, nu: T) -> Result<Self> {
        Self::new(vec![T::zero(); n], SquareMatrix::identity(n), nu)
    }

    /// From a scale (covariance-like) matrix `S`; the stored precision is `S⁻¹`.
    pub fn from_scale_matrix(mu: Vec<T>, scale: SquareMatrix<T>, nu: T) -> Result<Self> {
        let precision = scale.validate_spd()?.inverse();
        Self::new(mu, precision, nu)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    /// The precision-convention matrix `Σ`.
    pub fn sigma_mat(&self) -> &SquareMatrix<T> {
        &self.sigma_mat
    }

    /// `Σ⁻¹`, whose entries drive the moment recursion.
    pub fn sigma_inv(&self) -> &SquareMatrix<T> {
        &self.sigma_inv
    }

    pub fn cholesky(&self) -> &Cholesky<T> {
        &self.chol
    }

    pub fn is_standard(&self) -> bool {
        let n = self.dim();
        self.mu.iter().all(|&m| m == T::zero()) && self.sigma_mat == SquareMatrix::identity(n)
    }

    /// Same shape with the location moved to the origin.
    pub fn centered(&self) -> Self {
        Self { mu: vec![T::zero(); self.dim()], ..self.clone() }
    }
}

/// `Γ((ν+n)/2)/Γ(ν/2) |Σ|^(1/2)/(νπ)^(n/2) (1 + (t-μ)ᵀΣ(t-μ)/ν)^(-(ν+n)/2)`.
pub fn t_pdf_nd<T: Real>(t: &[T], p: &TParamsND<T>) -> Result<T> {
    let n = p.dim();
    if t.len() != n {
        return Err(MomentError::DimensionMismatch { expected: n, got: t.len() });
    }
    let half = T::lit(0.5);
    let nn = T::from_count(n);
    let nu = p.nu;
    let d: Vec<T> = t.iter().zip(p.mu.iter()).map(|(&x, &m)| x - m).collect();
    let q = p.sigma_mat.quad_form(&d);
    let log = gamma_ratio((nu + nn) * half, nu * half)?.ln() + half * p.chol.log_det()
        - nn * half * (nu * T::PI()).ln()
        - (nu + nn) * half * (q / nu).ln_1p();
    Ok(log.exp())
}

fn factorial<T: Real>(n: u32) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_count(i as usize))
}

fn check_nu<T: Real>(nu: T) -> Result<()> {
    if !(nu > T::zero()) || !nu.is_finite() {
        return Err(MomentError::domain("degrees of freedom nu", nu.as_f64()));
    }
    Ok(())
}

/// `ν^(K/2) Γ((ν-K)/2)/Γ(ν/2)` with `K = Σkᵢ`: the common mixing factor of the
/// standardized closed forms.
fn standardized_mixing_factor<T: Real>(total: u32, nu: T) -> Result<T> {
    let kk = T::from_count(total as usize);
    let half = T::lit(0.5);
    Ok(nu.powf(kk * half) * gamma_ratio((nu - kk) * half, nu * half)?)
}

/// Raw moment of `St(0, I, ν)`: zero if any `kᵢ` is odd, otherwise
/// `ν^(K/2) Γ((ν-K)/2)/Γ(ν/2) ∏ kᵢ! / (2^K ∏ (kᵢ/2)!)`.
pub fn std_raw_moment_nd<T: Real>(k: &MultiIndex, nu: T) -> Result<MomentResult<T>> {
    check_nu(nu)?;
    let total = k.total();
    if !order_is_defined(T::from_count(total as usize), nu) {
        return Ok(MomentResult::undefined(FORMULA_STD_RAW, Mode::ClosedForm));
    }
    if k.any_odd() {
        return Ok(MomentResult::defined(T::zero(), FORMULA_STD_RAW, Mode::ClosedForm));
    }
    let mut combinatorial = T::one();
    for &ki in k.entries() {
        combinatorial = combinatorial * factorial::<T>(ki) / factorial::<T>(ki / 2);
    }
    combinatorial = combinatorial / T::lit(2.0).powi(total as i32);
    let value = standardized_mixing_factor(total, nu)? * combinatorial;
    Ok(MomentResult::defined(value, FORMULA_STD_RAW, Mode::ClosedForm))
}

/// `E ∏|Tᵢ|^kᵢ` for `St(0, I, ν)`: `ν^(K/2) Γ((ν-K)/2)/Γ(ν/2) ∏ Γ((kᵢ+1)/2)/√π`.
pub fn std_abs_moment_nd<T: Real>(k: &MultiIndex, nu: T) -> Result<MomentResult<T>> {
    check_nu(nu)?;
    let total = k.total();
    if !order_is_defined(T::from_count(total as usize), nu) {
        return Ok(MomentResult::undefined(FORMULA_STD_ABS, Mode::ClosedForm));
    }
    let half = T::lit(0.5);
    let mut product = T::one();
    for &ki in k.entries() {
        product = product * gamma_ratio((T::from_count(ki as usize) + T::one()) * half, half)?;
    }
    let value = standardized_mixing_factor(total, nu)? * product;
    Ok(MomentResult::defined(value, FORMULA_STD_ABS, Mode::ClosedForm))
}

/// Runs the conditional normal recursion
/// `V[k+eᵢ] = μᵢ V[k] + mix(Σⱼ Cᵢⱼ kⱼ V[k-eⱼ])` over every multi-index below
/// `target` componentwise, in order of increasing total degree, and returns
/// `V[target]`.
pub(crate) fn normal_moment_recursion<T, V>(
    target: &MultiIndex,
    mu: &[T],
    cov: &SquareMatrix<T>,
    one: V,
    zero: V,
    add_scaled: impl Fn(&mut V, T, &V),
    mix: impl Fn(&V) -> V,
) -> V
where
    T: Real,
    V: Clone,
{
    let n = target.dim();
    let mut table: HashMap<MultiIndex, V> = HashMap::new();
    table.insert(MultiIndex::zeros(n), one);
    let mut pending: Vec<MultiIndex> = MultiIndex::all_up_to(n, target.total())
        .into_iter()
        .filter(|m| m.entries().iter().zip(target.entries()).all(|(a, b)| a <= b))
        .collect();
    pending.sort_by_key(|m| m.total());
    for m in pending.into_iter().filter(|m| m.total() > 0) {
        let i = m.entries().iter().position(|&x| x > 0).expect("nonzero index");
        let prev = m.decrement(i).expect("positive entry");
        let mut value = zero.clone();
        add_scaled(&mut value, mu[i], &table[&prev]);
        let mut spread = zero.clone();
        for j in 0..n {
            if let Some(prev_j) = prev.decrement(j) {
                let c = cov[(i, j)] * T::from_count(prev.get(j) as usize);
                if c != T::zero() {
                    add_scaled(&mut spread, c, &table[&prev_j]);
                }
            }
        }
        add_scaled(&mut value, T::one(), &mix(&spread));
        table.insert(m, value);
    }
    table.remove(target).expect("target filled")
}

/// Conditional normal moment `E[X^k | η]` as a polynomial in `1/η`, for
/// `X | η ~ N(μ, Σ⁻¹/η)`.
pub fn conditional_moment_poly<T: Real>(k: &MultiIndex, p: &TParamsND<T>) -> Result<MixturePoly<T>> {
    check_dim(k, p)?;
    Ok(normal_moment_recursion(
        k,
        &p.mu,
        &p.sigma_inv,
        MixturePoly::constant(T::one()),
        MixturePoly::zero(),
        |acc, a, x| acc.add_scaled(a, x),
        |x| x.divide_by_mixing(),
    ))
}

fn check_dim<T: Real>(k: &MultiIndex, p: &TParamsND<T>) -> Result<()> {
    if k.dim() != p.dim() {
        return Err(MomentError::DimensionMismatch { expected: p.dim(), got: k.dim() });
    }
    Ok(())
}

/// Raw moment `E[T^k]` by the mixture-integrated recursion (default mode).
pub fn raw_moment_nd<T: Real>(k: &MultiIndex, p: &TParamsND<T>) -> Result<MomentResult<T>> {
    check_dim(k, p)?;
    if !order_is_defined(T::from_count(k.total() as usize), p.nu) {
        return Ok(MomentResult::undefined(FORMULA_RECURSION, Mode::Corrected));
    }
    let poly = conditional_moment_poly(k, p)?;
    let value = poly.integrate_gamma(p.nu)?;
    Ok(MomentResult::defined(value, FORMULA_RECURSION, Mode::Corrected))
}

/// Central moment `E[(T-μ)^k]`.
pub fn central_moment_nd<T: Real>(k: &MultiIndex, p: &TParamsND<T>) -> Result<MomentResult<T>> {
    raw_moment_nd(k, &p.centered())
}

/// Raw moment by the recursion with `1/η` replaced by its mean
/// `(ν/2) Γ(ν/2-1)/Γ(ν/2) = ν/(ν-2)` at every step. Agrees with
/// [`raw_moment_nd`] up to total degree 2 only.
pub fn raw_moment_nd_literal<T: Real>(k: &MultiIndex, p: &TParamsND<T>) -> Result<MomentResult<T>> {
    check_dim(k, p)?;
    let nu = p.nu;
    let two = T::lit(2.0);
    if !(nu > two) {
        return Err(MomentError::domain("degrees of freedom nu (literal recursion needs nu > 2)", nu.as_f64()));
    }
    if !order_is_defined(T::from_count(k.total() as usize), nu) {
        return Ok(MomentResult::undefined(FORMULA_RECURSION_LITERAL, Mode::Literal));
    }
    let half_nu = nu / two;
    let factor = half_nu * gamma_ratio(half_nu - T::one(), half_nu)?;
    let value = normal_moment_recursion(
        k,
        &p.mu,
        &p.sigma_inv,
        T::one(),
        T::zero(),
        |acc: &mut T, a, x: &T| *acc = *acc + a * *x,
        |x: &T| *x * factor,
    );
    Ok(MomentResult::defined(value, FORMULA_RECURSION_LITERAL, Mode::Literal))
}
