//! Un-normalized moments `E[Tᵏ 1{a ≤ T ≤ b}]` of the multivariate t over a
//! rectangle.
//!
//! The normal building block is the truncated-normal recursion (covariance
//! form `C`):
//!
//! ```text
//! F_{k+eᵢ} = μᵢ F_k + Σⱼ Cᵢⱼ c_{k,j}
//! c_{k,j}  = kⱼ F_{k-eⱼ}
//!          + aⱼ^kⱼ φ(aⱼ; μⱼ, Cⱼⱼ) F_{k(j)}(a(j), b(j); μ̂ᵃ, Ĉ)
//!          - bⱼ^kⱼ φ(bⱼ; μⱼ, Cⱼⱼ) F_{k(j)}(a(j), b(j); μ̂ᵇ, Ĉ)
//! ```
//!
//! where `μ̂ˣ = μ(j) + C(j),j (x - μⱼ)/Cⱼⱼ` and `Ĉ` is the Schur complement of
//! `Cⱼⱼ`. The t moment integrates this against the gamma mixing density with
//! `C = Σ⁻¹/η`. The literal variant instead keeps `C = Σ⁻¹`, multiplies the
//! covariance term by `ν/(ν-2)` and uses t probabilities as the base case.

use std::collections::HashMap;

use crate::error::{MomentError, Result};
use crate::linalg::SquareMatrix;
use crate::moment::{order_is_defined, Diagnostics, Mode, MomentResult};
use crate::oracle::quad::{Integrator, QuadResult};
use crate::real::Real;
use crate::specfun::log_gamma;
use crate::tnd::{MultiIndex, TParamsND};

pub const FORMULA_TRUNC: &str = "trunc.mixture";
pub const FORMULA_TRUNC_LITERAL: &str = "trunc.literal";

/// Largest dimension for which rectangle probabilities are integrated.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Axis-aligned box `[lower, upper]`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectangle<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Real> Rectangle<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(MomentError::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (i, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !(a < b) || a == T::infinity() || b == T::neg_infinity() {
                return Err(MomentError::InvalidRectangle { coord: i, lower: a.as_f64(), upper: b.as_f64() });
            }
        }
        Ok(Self { lower, upper })
    }

    /// All of `ℝⁿ`.
    pub fn full(n: usize) -> Self {
        Self { lower: vec![T::neg_infinity(); n], upper: vec![T::infinity(); n] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.iter().zip(&self.lower).zip(&self.upper).all(|((&v, &a), &b)| a <= v && v <= b)
    }

    /// Every bound finite.
    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|x| x.is_finite())
    }

    pub fn is_full(&self) -> bool {
        self.lower.iter().all(|&a| a == T::neg_infinity()) && self.upper.iter().all(|&b| b == T::infinity())
    }
}

fn normal_density<T: Real>(x: T, mean: T, var: T) -> T {
    let d = x - mean;
    (-(d * d) / (T::lit(2.0) * var)).exp() / (T::lit(2.0) * T::PI() * var).sqrt()
}

/// `P(a ≤ X ≤ b)` for `X ~ N(mean, var)`: `erf` differences near the mean,
/// tail differences away from it, so neither side cancels.
fn normal_interval_probability<T: Real>(a: T, b: T, mean: T, var: T) -> T {
    let s = (T::lit(2.0) * var).sqrt();
    let za = (a - mean) / s;
    let zb = (b - mean) / s;
    let half = T::lit(0.5);
    if za >= T::one() {
        half * (za.erfc() - zb.erfc())
    } else if zb <= -T::one() {
        half * ((-zb).erfc() - (-za).erfc())
    } else {
        half * (zb.erf() - za.erf())
    }
}

fn submatrix<T: Real>(m: &SquareMatrix<T>, idx: &[usize]) -> SquareMatrix<T> {
    let mut out = SquareMatrix::zeros(idx.len());
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out[(r, c)] = m[(i, j)];
        }
    }
    out
}

fn pick<T: Copy>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

fn without<T: Copy>(v: &[T], j: usize) -> Vec<T> {
    v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect()
}

/// Relative target for a nested probability of dimension `n`; outer levels
/// are looser than the levels they integrate.
fn box_tolerance<T: Real>(n: usize) -> T {
    let base = T::lit(1e-12).max(T::lit(64.0) * T::epsilon());
    base * T::lit(100.0).powi(n as i32 - 2)
}

/// Normal box probability in covariance form. Coordinates unbounded on both
/// sides are marginalized out first; what remains is integrated one
/// coordinate at a time against the conditional law of the rest.
fn normal_box_probability<T: Real>(lower: &[T], upper: &[T], mean: &[T], cov: &SquareMatrix<T>) -> Result<T> {
    let keep: Vec<usize> = (0..lower.len()).filter(|&i| lower[i].is_finite() || upper[i].is_finite()).collect();
    match keep.len() {
        0 => return Ok(T::one()),
        1 => {
            let i = keep[0];
            return Ok(normal_interval_probability(lower[i], upper[i], mean[i], cov[(i, i)]));
        }
        n if n > MAX_QUADRATURE_DIM => {
            return Err(MomentError::Unsupported(format!(
                "rectangle probability in {n} bounded dimensions (at most {MAX_QUADRATURE_DIM})"
            )))
        }
        _ => {}
    }
    let (lower, upper, mean) = (pick(lower, &keep), pick(upper, &keep), pick(mean, &keep));
    let cov = submatrix(cov, &keep);
    let n = keep.len();
    let (m0, c00) = (mean[0], cov[(0, 0)]);
    let s = c00.sqrt();
    let reach = T::lit(12.0) * s;
    let lo = lower[0].max(m0 - reach);
    let hi = upper[0].min(m0 + reach);
    if !(lo < hi) {
        return Ok(T::zero());
    }
    let child_cov = cov.schur_complement(0);
    let col = cov.column_without(0);
    let (child_lower, child_upper, child_mean) = (without(&lower, 0), without(&upper, 0), without(&mean, 0));
    let mut failure = None;
    let mut shifted = child_mean.clone();
    let integrand = |x: T| {
        let w = (x - m0) / c00;
        for ((s, &m), &c) in shifted.iter_mut().zip(&child_mean).zip(&col) {
            *s = m + c * w;
        }
        match normal_box_probability(&child_lower, &child_upper, &shifted, &child_cov) {
            Ok(p) => normal_density(x, m0, c00) * p,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        }
    };
    let tol = box_tolerance::<T>(n);
    let res = Integrator::new(tol * T::lit(0.01), tol).integrate_with_breaks(integrand, lo, hi, &[m0]);
    if let Some(e) = failure {
        return Err(e);
    }
    converged(res, tol)
}

fn converged<T: Real>(res: QuadResult<T>, tol: T) -> Result<T> {
    if res.converged {
        Ok(res.value)
    } else {
        Err(MomentError::QuadratureNoConvergence {
            achieved: res.est_abs_error.as_f64(),
            requested: (tol * res.value.abs()).as_f64(),
        })
    }
}

fn check_dims<T: Real>(r: &Rectangle<T>, mean: &[T], m: &SquareMatrix<T>) -> Result<()> {
    if mean.len() != m.dim() {
        return Err(MomentError::DimensionMismatch { expected: m.dim(), got: mean.len() });
    }
    if r.dim() != m.dim() {
        return Err(MomentError::DimensionMismatch { expected: m.dim(), got: r.dim() });
    }
    Ok(())
}

/// `P(a ≤ X ≤ b)` for `X ~ N(mean, precision⁻¹)`.
///
/// Closed form in one dimension; nested adaptive quadrature for up to
/// [`MAX_QUADRATURE_DIM`] coordinates with at least one finite bound.
pub fn rectangle_probability<T: Real>(r: &Rectangle<T>, mean: &[T], precision: &SquareMatrix<T>) -> Result<T> {
    check_dims(r, mean, precision)?;
    let cov = precision.validate_spd()?.inverse();
    normal_box_probability(&r.lower, &r.upper, mean, &cov)
}

/// `∫₀^∞ g(η) Gamma(η | ν/2, ν/2) dη`.
///
/// `g` may grow like `η^(-order/2)` at the origin, so the integral is taken
/// in `s` with `η = s^p` and `p` chosen to make the transformed integrand
/// bounded there.
fn mix_over_gamma<T: Real, G: FnMut(T) -> Result<T>>(nu: T, order: T, mut g: G) -> Result<QuadResult<T>> {
    let half = T::lit(0.5);
    let shape = nu * half;
    let p = (T::lit(2.0) / (nu - order)).max(T::one()).min(T::lit(16.0));
    let log_norm = shape * shape.ln() - log_gamma(shape)? + p.ln();
    let mut failure = None;
    let integrand = |s: T| {
        if !(s > T::zero()) {
            return T::zero();
        }
        let ln_s = s.ln();
        let eta = (p * ln_s).exp();
        if eta == T::zero() || !eta.is_finite() {
            return T::zero();
        }
        let weight = (log_norm + ((shape - T::one()) * p + p - T::one()) * ln_s - shape * eta).exp();
        if weight == T::zero() {
            return T::zero();
        }
        match g(eta) {
            Ok(v) => v * weight,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        }
    };
    let sd = (T::lit(2.0) / nu).sqrt();
    let inv_p = T::one() / p;
    let breaks: Vec<T> = [T::one() - T::lit(3.0) * sd, T::one(), T::one() + T::lit(3.0) * sd]
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| x.powf(inv_p))
        .collect();
    let abs_tol = T::lit(1e-12).max(T::lit(16.0) * T::epsilon());
    let rel_tol = T::lit(1e-10).max(T::lit(64.0) * T::epsilon());
    let res = Integrator::new(abs_tol, rel_tol).integrate_with_breaks(integrand, T::zero(), T::infinity(), &breaks);
    if let Some(e) = failure {
        return Err(e);
    }
    if !res.converged {
        return Err(MomentError::QuadratureNoConvergence {
            achieved: res.est_abs_error.as_f64(),
            requested: abs_tol.max(rel_tol * res.value.abs()).as_f64(),
        });
    }
    Ok(res)
}

fn t_box_probability<T: Real>(lower: &[T], upper: &[T], mean: &[T], scale: &SquareMatrix<T>, nu: T) -> Result<T> {
    if lower.iter().all(|&a| a == T::neg_infinity()) && upper.iter().all(|&b| b == T::infinity()) {
        return Ok(T::one());
    }
    let res =
        mix_over_gamma(nu, T::zero(), |eta| normal_box_probability(lower, upper, mean, &scale.scaled(T::one() / eta)))?;
    Ok(res.value)
}

/// `P(a ≤ T ≤ b)` for `T ~ St(μ, Σ, ν)`.
pub fn t_rectangle_probability<T: Real>(r: &Rectangle<T>, p: &TParamsND<T>) -> Result<T> {
    check_dims(r, p.mu(), p.sigma_mat())?;
    t_box_probability(&r.lower, &r.upper, p.mu(), p.sigma_inv(), p.nu())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Base<T> {
    Normal,
    StudentT(T),
}

/// The three parts of one boundary-vector entry `c_{k,j}`:
/// `decrement + lower - upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEntry<T> {
    /// `kⱼ F_{k-eⱼ}`; zero when `kⱼ = 0`.
    pub decrement: T,
    /// Lower-boundary density term; zero when `aⱼ = -∞`.
    pub lower: T,
    /// Upper-boundary density term; zero when `bⱼ = +∞`.
    pub upper: T,
}

impl<T: Real> BoundaryEntry<T> {
    pub fn total(&self) -> T {
        self.decrement + self.lower - self.upper
    }
}

#[derive(Debug, Clone)]
struct Node<T> {
    lower: Vec<T>,
    upper: Vec<T>,
    mean: Vec<T>,
    cov: SquareMatrix<T>,
    factor: T,
    base: Base<T>,
    memo: HashMap<Vec<u32>, T>,
    lower_children: Vec<Option<Box<Node<T>>>>,
    upper_children: Vec<Option<Box<Node<T>>>>,
}

impl<T: Real> Node<T> {
    fn new(lower: Vec<T>, upper: Vec<T>, mean: Vec<T>, cov: SquareMatrix<T>, factor: T, base: Base<T>) -> Self {
        let n = mean.len();
        Self {
            lower,
            upper,
            mean,
            cov,
            factor,
            base,
            memo: HashMap::new(),
            lower_children: vec![None; n],
            upper_children: vec![None; n],
        }
    }

    /// Node for coordinates other than `j`, conditioned on `X_j = x`.
    fn child(&self, j: usize, x: T) -> Node<T> {
        let w = (x - self.mean[j]) / self.cov[(j, j)];
        let mean = without(&self.mean, j).into_iter().zip(self.cov.column_without(j)).map(|(m, c)| m + c * w).collect();
        Node::new(
            without(&self.lower, j),
            without(&self.upper, j),
            mean,
            self.cov.schur_complement(j),
            self.factor,
            self.base,
        )
    }

    fn probability(&self) -> Result<T> {
        match self.base {
            Base::Normal => normal_box_probability(&self.lower, &self.upper, &self.mean, &self.cov),
            Base::StudentT(nu) => t_box_probability(&self.lower, &self.upper, &self.mean, &self.cov, nu),
        }
    }

    fn moment(&mut self, k: &[u32]) -> Result<T> {
        if self.mean.is_empty() {
            return Ok(T::one());
        }
        if let Some(&v) = self.memo.get(k) {
            return Ok(v);
        }
        if let Some(j) = self.diffuse_coordinate() {
            let value = self.integrate_out(j, k)?;
            self.memo.insert(k.to_vec(), value);
            return Ok(value);
        }
        let value = match k.iter().position(|&e| e > 0) {
            None => self.probability()?,
            Some(i) => {
                let mut km = k.to_vec();
                km[i] -= 1;
                let mut acc = self.mean[i] * self.moment(&km)?;
                let mut spread = T::zero();
                for j in 0..self.mean.len() {
                    let cij = self.cov[(i, j)];
                    if cij == T::zero() {
                        continue;
                    }
                    spread = spread + cij * self.boundary_entry(&km, j)?.total();
                }
                acc = acc + self.factor * spread;
                acc
            }
        };
        self.memo.insert(k.to_vec(), value);
        Ok(value)
    }

    /// A coordinate bounded on both sides by less than one standard
    /// deviation. There the boundary terms of the recursion nearly cancel
    /// and the recursion loses all accuracy, so that coordinate is
    /// integrated out directly instead.
    fn diffuse_coordinate(&self) -> Option<usize> {
        if self.base != Base::Normal {
            return None;
        }
        (0..self.mean.len()).find(|&j| {
            let (a, b) = (self.lower[j], self.upper[j]);
            a.is_finite() && b.is_finite() && (b - a) < self.cov[(j, j)].sqrt()
        })
    }

    /// `∫_{aⱼ}^{bⱼ} x^kⱼ φ(x; μⱼ, Cⱼⱼ) F_{k(j)}(· | Xⱼ = x) dx`.
    fn integrate_out(&self, j: usize, k: &[u32]) -> Result<T> {
        let (mj, vj) = (self.mean[j], self.cov[(j, j)]);
        let kj = k[j] as i32;
        let rest = without(k, j);
        let mut failure = None;
        let integrand = |x: T| {
            let weight = x.powi(kj) * normal_density(x, mj, vj);
            match self.child(j, x).moment(&rest) {
                Ok(v) => weight * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    T::zero()
                }
            }
        };
        let tol = box_tolerance::<T>(2) * T::lit(0.1);
        let res = Integrator::new(T::min_positive_value(), tol).integrate(integrand, self.lower[j], self.upper[j]);
        if let Some(e) = failure {
            return Err(e);
        }
        converged(res, tol)
    }

    fn boundary_entry(&mut self, k: &[u32], j: usize) -> Result<BoundaryEntry<T>> {
        let kj = k[j];
        let decrement = if kj > 0 {
            let mut km = k.to_vec();
            km[j] -= 1;
            T::from_count(kj as usize) * self.moment(&km)?
        } else {
            T::zero()
        };
        let rest = without(k, j);
        let (mj, vj) = (self.mean[j], self.cov[(j, j)]);
        let a = self.lower[j];
        let lower = if a.is_finite() {
            let weight = a.powi(kj as i32) * normal_density(a, mj, vj);
            if self.lower_children[j].is_none() {
                self.lower_children[j] = Some(Box::new(self.child(j, a)));
            }
            weight * self.lower_children[j].as_mut().expect("child built").moment(&rest)?
        } else {
            T::zero()
        };
        let b = self.upper[j];
        let upper = if b.is_finite() {
            let weight = b.powi(kj as i32) * normal_density(b, mj, vj);
            if self.upper_children[j].is_none() {
                self.upper_children[j] = Some(Box::new(self.child(j, b)));
            }
            weight * self.upper_children[j].as_mut().expect("child built").moment(&rest)?
        } else {
            T::zero()
        };
        Ok(BoundaryEntry { decrement, lower, upper })
    }
}

/// Memoized truncated-normal moments for one rectangle and one normal law.
#[derive(Debug, Clone)]
pub struct TruncatedNormalMoments<T> {
    node: Node<T>,
}

impl<T: Real> TruncatedNormalMoments<T> {
    /// `X ~ N(mean, precision⁻¹)`.
    pub fn new(r: &Rectangle<T>, mean: &[T], precision: &SquareMatrix<T>) -> Result<Self> {
        check_dims(r, mean, precision)?;
        let cov = precision.validate_spd()?.inverse();
        Ok(Self::from_covariance(r, mean, cov))
    }

    fn from_covariance(r: &Rectangle<T>, mean: &[T], cov: SquareMatrix<T>) -> Self {
        let node = Node::new(r.lower.clone(), r.upper.clone(), mean.to_vec(), cov, T::one(), Base::Normal);
        Self { node }
    }

    /// `E[Xᵏ 1{a ≤ X ≤ b}]`.
    pub fn moment(&mut self, k: &MultiIndex) -> Result<T> {
        self.check(k)?;
        self.node.moment(k.entries())
    }

    /// The boundary vector `c_k`, entry by entry.
    pub fn boundary_vector(&mut self, k: &MultiIndex) -> Result<Vec<BoundaryEntry<T>>> {
        self.check(k)?;
        (0..k.dim()).map(|j| self.node.boundary_entry(k.entries(), j)).collect()
    }

    fn check(&self, k: &MultiIndex) -> Result<()> {
        if k.dim() != self.node.mean.len() {
            return Err(MomentError::DimensionMismatch { expected: self.node.mean.len(), got: k.dim() });
        }
        Ok(())
    }
}

/// `E[Xᵏ 1{a ≤ X ≤ b}]` for `X ~ N(mean, precision⁻¹)`.
pub fn trunc_normal_moment<T: Real>(
    k: &MultiIndex,
    r: &Rectangle<T>,
    mean: &[T],
    precision: &SquareMatrix<T>,
) -> Result<T> {
    TruncatedNormalMoments::new(r, mean, precision)?.moment(k)
}

fn check_request<T: Real>(k: &MultiIndex, r: &Rectangle<T>, p: &TParamsND<T>) -> Result<()> {
    check_dims(r, p.mu(), p.sigma_mat())?;
    if k.dim() != p.dim() {
        return Err(MomentError::DimensionMismatch { expected: p.dim(), got: k.dim() });
    }
    Ok(())
}

/// On a bounded rectangle every moment exists; otherwise the untruncated
/// rule applies.
fn truncated_order_defined<T: Real>(k: &MultiIndex, r: &Rectangle<T>, nu: T) -> bool {
    r.is_bounded() || order_is_defined(T::from_count(k.total() as usize), nu)
}

/// `∫₀^∞ E[Xᵏ 1{a ≤ X ≤ b} | X ~ N(μ, Σ⁻¹/η)] Gamma(η | ν/2, ν/2) dη`.
pub fn trunc_t_moment<T: Real>(k: &MultiIndex, r: &Rectangle<T>, p: &TParamsND<T>) -> Result<MomentResult<T>> {
    check_request(k, r, p)?;
    let nu = p.nu();
    if !truncated_order_defined(k, r, nu) {
        return Ok(MomentResult::undefined(FORMULA_TRUNC, Mode::Corrected));
    }
    let order = if r.is_bounded() { T::zero() } else { T::from_count(k.total() as usize) };
    let res = mix_over_gamma(nu, order, |eta| {
        TruncatedNormalMoments::from_covariance(r, p.mu(), p.sigma_inv().scaled(T::one() / eta)).moment(k)
    })?;
    let diagnostics =
        Diagnostics { quad_error: Some(res.est_abs_error), evaluations: Some(res.evaluations), ..Default::default() };
    Ok(MomentResult::defined(res.value, FORMULA_TRUNC, Mode::Corrected).with_diagnostics(diagnostics))
}

/// The published truncated-t recursion applied verbatim:
/// `F_{k+eᵢ} = μᵢ F_k + ν/(ν-2) eᵢᵀ Σ⁻¹ d_k`, with `d_k` built like `c_k`
/// above from `Σ⁻¹` (boundary variances its diagonal, reduced matrices its
/// Schur complements) and t rectangle probabilities as the base case.
pub fn trunc_t_moment_literal<T: Real>(k: &MultiIndex, r: &Rectangle<T>, p: &TParamsND<T>) -> Result<MomentResult<T>> {
    check_request(k, r, p)?;
    let nu = p.nu();
    if !(nu > T::lit(2.0)) {
        return Err(MomentError::domain(
            "degrees of freedom nu (literal truncated recursion needs nu > 2)",
            nu.as_f64(),
        ));
    }
    if !truncated_order_defined(k, r, nu) {
        return Ok(MomentResult::undefined(FORMULA_TRUNC_LITERAL, Mode::Literal));
    }
    let factor = nu / (nu - T::lit(2.0));
    let mut node =
        Node::new(r.lower.clone(), r.upper.clone(), p.mu().to_vec(), p.sigma_inv().clone(), factor, Base::StudentT(nu));
    let value = node.moment(k.entries())?;
    Ok(MomentResult::defined(value, FORMULA_TRUNC_LITERAL, Mode::Literal))
}
