//! Mixture sampler and seeded Monte Carlo estimators (f64 only).
//!
//! Each call owns a `ChaCha8Rng` seeded from the explicit `seed`; nothing
//! is drawn from a global generator, so results are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, StandardNormal};

use crate::error::{MomentError, Result};
use crate::t1d::TParams1D;
use crate::tnd::{MultiIndex, TParamsND};
use crate::truncated::Rectangle;

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    /// Sample standard deviation over `√n_samples`.
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Draws that landed inside the region (all of them for the full space).
    pub accepted: usize,
    /// Set when `2·order ≥ ν`: the estimator then has infinite variance and
    /// `std_error` is not trustworthy.
    pub heavy_tail_warning: bool,
}

/// Welford accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Running {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

fn mixing_gamma(nu: f64) -> Result<Gamma<f64>> {
    // shape ν/2, rate ν/2
    Gamma::new(nu / 2.0, 2.0 / nu).map_err(|_| MomentError::domain("degrees of freedom nu", nu))
}

/// `n` draws of `St(μ, σ, ν)`: `λ ~ Gamma(ν/2, ν/2)`, then `N(μ, 1/(σλ))`.
pub fn sample_t_1d(p: &TParams1D<f64>, n: usize, seed: u64) -> Result<Vec<f64>> {
    let gamma = mixing_gamma(p.nu)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let lambda: f64 = rng.sample(gamma);
            let z: f64 = rng.sample(StandardNormal);
            p.mu + z / (p.sigma * lambda).sqrt()
        })
        .collect())
}

/// Streaming sampler for `St(μ, Σ, ν)` in `n` dimensions.
///
/// With `Σ = L Lᵀ`, solving `Lᵀ x = z` for standard normal `z` gives
/// `x ~ N(0, Σ⁻¹)`, and `μ + x/√η` with `η ~ Gamma(ν/2, ν/2)` is a t draw.
pub struct NdSampler<'a> {
    p: &'a TParamsND<f64>,
    gamma: Gamma<f64>,
    rng: ChaCha8Rng,
    z: Vec<f64>,
}

impl<'a> NdSampler<'a> {
    pub fn new(p: &'a TParamsND<f64>, seed: u64) -> Result<Self> {
        Ok(Self { p, gamma: mixing_gamma(p.nu())?, rng: ChaCha8Rng::seed_from_u64(seed), z: vec![0.0; p.dim()] })
    }

    /// Writes the next draw into `out`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        let eta: f64 = self.rng.sample(self.gamma);
        for z in self.z.iter_mut() {
            *z = self.rng.sample(StandardNormal);
        }
        let x = self.p.cholesky().solve_upper(&self.z);
        let s = eta.sqrt();
        for ((o, &m), xi) in out.iter_mut().zip(self.p.mu()).zip(x) {
            *o = m + xi / s;
        }
    }
}

/// `n` draws, one row per draw.
pub fn sample_t_nd(p: &TParamsND<f64>, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut s = NdSampler::new(p, seed)?;
    Ok((0..n)
        .map(|_| {
            let mut row = vec![0.0; p.dim()];
            s.next_into(&mut row);
            row
        })
        .collect())
}

/// Mean of `f(T)·1{T ∈ region}` over `n` draws. `order` is the polynomial
/// degree of `f`, used only for the heavy-tail warning.
pub fn mc_expectation_nd<F: FnMut(&[f64]) -> f64>(
    p: &TParamsND<f64>,
    region: Option<&Rectangle<f64>>,
    order: u32,
    n: usize,
    seed: u64,
    mut f: F,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(MomentError::domain("number of samples", 0.0));
    }
    if let Some(r) = region {
        if r.dim() != p.dim() {
            return Err(MomentError::DimensionMismatch { expected: p.dim(), got: r.dim() });
        }
    }
    let mut sampler = NdSampler::new(p, seed)?;
    let mut t = vec![0.0; p.dim()];
    let mut acc = Running::default();
    let mut accepted = 0;
    for _ in 0..n {
        sampler.next_into(&mut t);
        let inside = region.is_none_or(|r| r.contains(&t));
        if inside {
            accepted += 1;
            acc.push(f(&t));
        } else {
            acc.push(0.0);
        }
    }
    if accepted == 0 {
        return Err(MomentError::NoAcceptedSamples { samples: n });
    }
    Ok(McEstimate {
        value: acc.mean,
        std_error: acc.std_error(),
        n_samples: n,
        seed,
        accepted,
        heavy_tail_warning: 2.0 * order as f64 >= p.nu(),
    })
}

fn monomial(k: &MultiIndex, t: &[f64], absolute: bool) -> f64 {
    t.iter().zip(k.entries()).map(|(&x, &e)| if absolute { x.abs().powi(e as i32) } else { x.powi(e as i32) }).product()
}

/// Estimate of `E[∏ Tᵢ^kᵢ · 1{T ∈ region}]` (un-normalized on a rectangle).
pub fn mc_moment_nd(
    k: &MultiIndex,
    p: &TParamsND<f64>,
    region: Option<&Rectangle<f64>>,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_dim(k, p)?;
    mc_expectation_nd(p, region, k.total(), n, seed, |t| monomial(k, t, false))
}

/// Estimate of `E[∏ |Tᵢ|^kᵢ]`.
pub fn mc_abs_moment_nd(k: &MultiIndex, p: &TParamsND<f64>, n: usize, seed: u64) -> Result<McEstimate> {
    check_dim(k, p)?;
    mc_expectation_nd(p, None, k.total(), n, seed, |t| monomial(k, t, true))
}

fn check_dim(k: &MultiIndex, p: &TParamsND<f64>) -> Result<()> {
    if k.dim() != p.dim() {
        return Err(MomentError::DimensionMismatch { expected: p.dim(), got: k.dim() });
    }
    Ok(())
}
