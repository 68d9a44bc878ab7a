//! Special-function kernel: log-gamma, gamma ratios, rising factorials and the
//! hypergeometric series `1F1` and `2F1`.
//!
//! The argument regimes are the ones the moment formulas produce: positive
//! gamma arguments, terminating series with nonpositive-integer upper
//! parameters, and `2F1` at nonpositive `z`, where a Pfaff transform moves the
//! argument into `[0, 1)`.

use crate::error::{MomentError, Result};
use crate::real::{is_nonpositive_integer, CompensatedSum, Real};

/// Term cap for non-terminating series.
pub const MAX_SERIES_TERMS: usize = 10_000;

/// Differences `num - den` up to this size are evaluated as exact products in
/// [`gamma_ratio`].
const MAX_PRODUCT_SHIFT: usize = 64;

// Lanczos approximation, g = 671/128, 14 terms.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// zeta(2), zeta(3), ..., zeta(31)
const ZETA: [f64; 30] = [
    1.644_934_066_848_226_436_5,
    1.202_056_903_159_594_285_4,
    1.082_323_233_711_138_191_5,
    1.036_927_755_143_369_926_3,
    1.017_343_061_984_449_139_7,
    1.008_349_277_381_922_826_8,
    1.004_077_356_197_944_339_4,
    1.002_008_392_826_082_214_4,
    1.000_994_575_127_818_085_3,
    1.000_494_188_604_119_464_6,
    1.000_246_086_553_308_048_3,
    1.000_122_713_347_578_489_1,
    1.000_061_248_135_058_704_8,
    1.000_030_588_236_307_020_5,
    1.000_015_282_259_408_651_9,
    1.000_007_637_197_637_899_8,
    1.000_003_817_293_264_999_8,
    1.000_001_908_212_716_553_9,
    1.000_000_953_962_033_872_8,
    1.000_000_476_932_986_787_8,
    1.000_000_238_450_502_727_7,
    1.000_000_119_219_925_965_3,
    1.000_000_059_608_189_051_3,
    1.000_000_029_803_503_514_7,
    1.000_000_014_901_554_828_4,
    1.000_000_007_450_711_789_8,
    1.000_000_003_725_334_024_8,
    1.000_000_001_862_659_723_5,
    1.000_000_000_931_327_432_4,
    1.000_000_000_465_662_906_5,
];

/// Half-width of the windows around 1 and 2 where the Taylor expansion of
/// `ln Γ(1 + ε)` replaces the Lanczos sum.
const TAYLOR_WINDOW: f64 = 0.2;

/// `ln Γ(1 + eps)` for `|eps| <= 0.2`.
fn ln_gamma_1p<T: Real>(eps: T) -> T {
    let mut acc = CompensatedSum::new();
    let mut power = -eps;
    acc.add(-T::lit(EULER_GAMMA) * eps);
    for (i, &z) in ZETA.iter().enumerate() {
        let k = i + 2;
        power = power * (-eps);
        let term = T::lit(z) * power / T::from_count(k);
        acc.add(term);
        if term.abs() <= T::epsilon() * T::lit(1e-3) * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

fn ln_gamma_unchecked<T: Real>(x: T) -> T {
    let w = T::lit(TAYLOR_WINDOW);
    let one = T::one();
    let two = T::lit(2.0);
    if (x - one).abs() <= w {
        return ln_gamma_1p(x - one);
    }
    if (x - two).abs() <= w {
        let eps = x - two;
        return eps.ln_1p() + ln_gamma_1p(eps);
    }
    let g = T::lit(LANCZOS_G);
    let mut y = x;
    let tmp = x + g;
    let head = (x + T::lit(0.5)) * tmp.ln() - tmp;
    let mut ser = T::lit(LANCZOS_C0);
    for &c in LANCZOS_COEFFS.iter() {
        y = y + one;
        ser = ser + T::lit(c) / y;
    }
    head + (T::lit(2.506_628_274_631_000_5) * ser / x).ln()
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(MomentError::domain("log_gamma argument", x.as_f64()));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `Γ(num) / Γ(den)` for positive arguments, evaluated in log space or as an
/// exact product when the arguments differ by a small integer.
pub fn gamma_ratio<T: Real>(num: T, den: T) -> Result<T> {
    if !(num > T::zero()) || !num.is_finite() {
        return Err(MomentError::domain("gamma_ratio numerator argument", num.as_f64()));
    }
    if !(den > T::zero()) || !den.is_finite() {
        return Err(MomentError::domain("gamma_ratio denominator argument", den.as_f64()));
    }
    let shift = num - den;
    if shift == shift.round() && shift.abs() <= T::from_count(MAX_PRODUCT_SHIFT) {
        let n = shift.abs().to_usize().unwrap_or(0);
        return Ok(if shift >= T::zero() { rising_factorial(den, n) } else { T::one() / rising_factorial(num, n) });
    }
    Ok((ln_gamma_unchecked(num) - ln_gamma_unchecked(den)).exp())
}

/// Rising factorial (Pochhammer symbol) `a (a+1) ... (a+n-1)`, `1` for `n = 0`.
pub fn rising_factorial<T: Real>(a: T, n: usize) -> T {
    if is_nonpositive_integer(a) {
        let m = (-a).to_usize().unwrap_or(usize::MAX);
        if n > m {
            return T::zero();
        }
    }
    let mut prod = T::one();
    let mut x = a;
    for _ in 0..n {
        prod = prod * x;
        x = x + T::one();
    }
    prod
}

/// Result of a hypergeometric series evaluation, with bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomEval<T> {
    pub a: T,
    /// Second upper parameter; `None` for `1F1`.
    pub b: Option<T>,
    pub c: T,
    pub z: T,
    pub value: T,
    /// Whether the series is a finite polynomial (an upper parameter is a
    /// nonpositive integer).
    pub terminating: bool,
    pub terms_used: usize,
    /// Magnitude of the first neglected term; zero for terminating series.
    pub est_error: T,
}

/// Outcome of summing a series from its term-ratio recurrence.
struct SeriesSum<T> {
    value: T,
    terms: usize,
    est_error: T,
}

/// Number of nonzero terms when some upper parameter is a nonpositive integer.
fn termination_length<T: Real>(uppers: &[T]) -> Option<usize> {
    uppers.iter().filter(|&&p| is_nonpositive_integer(p)).map(|&p| (-p).to_usize().unwrap_or(0) + 1).min()
}

fn check_lower_parameter<T: Real>(c: T, needed: Option<usize>, what: &str) -> Result<()> {
    if is_nonpositive_integer(c) {
        let pole = (-c).to_usize().unwrap_or(0);
        // term n+1 divides by (c + n)
        let reached = match needed {
            Some(len) => pole + 1 < len,
            None => true,
        };
        if reached {
            return Err(MomentError::domain(format!("{what} lower parameter c (pole)"), c.as_f64()));
        }
    }
    Ok(())
}

/// Generic hypergeometric series `Σ (∏ uppers)_n / (c)_n z^n / n!`.
fn sum_series<T: Real>(uppers: &[T], c: T, z: T, what: &'static str) -> Result<SeriesSum<T>> {
    let length = termination_length(uppers);
    check_lower_parameter(c, length, what)?;
    let mut acc = CompensatedSum::new();
    let mut term = T::one();
    acc.add(term);
    let cap = length.unwrap_or(MAX_SERIES_TERMS);
    let mut n = 0usize;
    loop {
        if n + 1 >= cap {
            if length.is_some() {
                return Ok(SeriesSum { value: acc.value(), terms: n + 1, est_error: T::zero() });
            }
            return Err(MomentError::SeriesNoConvergence { what, terms: n + 1, last_term: term.as_f64() });
        }
        let nn = T::from_count(n);
        let mut ratio = z / (c + nn) / (nn + T::one());
        for &u in uppers {
            ratio = ratio * (u + nn);
        }
        term = term * ratio;
        n += 1;
        if length.is_none() && term.abs() <= T::epsilon() * T::lit(0.5) * acc.value().abs() {
            return Ok(SeriesSum { value: acc.value(), terms: n, est_error: term.abs() });
        }
        acc.add(term);
        if length.is_none() && !acc.value().is_finite() {
            return Err(MomentError::SeriesNoConvergence { what, terms: n, last_term: term.as_f64() });
        }
    }
}

/// Kummer's confluent hypergeometric function `1F1(a; c; z)`.
///
/// Negative `z` goes through Kummer's transform `e^z 1F1(c-a; c; -z)` unless the
/// series terminates as given.
pub fn hyp1f1<T: Real>(a: T, c: T, z: T) -> Result<HypergeomEval<T>> {
    let terminating = is_nonpositive_integer(a);
    let mut out = HypergeomEval { a, b: None, c, z, value: T::one(), terminating, terms_used: 1, est_error: T::zero() };
    if z == T::zero() {
        check_lower_parameter(c, Some(1), "1F1")?;
        return Ok(out);
    }
    if terminating || z > T::zero() {
        let s = sum_series(&[a], c, z, "1F1")?;
        out.value = s.value;
        out.terms_used = s.terms;
        out.est_error = s.est_error;
        return Ok(out);
    }
    let s = sum_series(&[c - a], c, -z, "1F1")?;
    let scale = z.exp();
    out.value = scale * s.value;
    out.terms_used = s.terms;
    out.est_error = scale * s.est_error;
    Ok(out)
}

/// Plain power series of `1F1`, without transforms.
pub fn hyp1f1_series<T: Real>(a: T, c: T, z: T) -> Result<HypergeomEval<T>> {
    let s = sum_series(&[a], c, z, "1F1")?;
    Ok(HypergeomEval {
        a,
        b: None,
        c,
        z,
        value: s.value,
        terminating: is_nonpositive_integer(a),
        terms_used: s.terms,
        est_error: s.est_error,
    })
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for `z < 1`.
///
/// Terminating series are summed exactly. Otherwise negative `z` is mapped into
/// `(0, 1)` by the Pfaff transform `(1-z)^(-a) 2F1(a, c-b; c; z/(z-1))`.
pub fn hyp2f1<T: Real>(a: T, b: T, c: T, z: T) -> Result<HypergeomEval<T>> {
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    let mut out =
        HypergeomEval { a, b: Some(b), c, z, value: T::one(), terminating, terms_used: 1, est_error: T::zero() };
    if !(z < T::one()) {
        return Err(MomentError::domain("2F1 argument z (requires z < 1)", z.as_f64()));
    }
    if z == T::zero() {
        check_lower_parameter(c, Some(1), "2F1")?;
        return Ok(out);
    }
    if terminating || z > T::zero() {
        let s = sum_series(&[a, b], c, z, "2F1")?;
        out.value = s.value;
        out.terms_used = s.terms;
        out.est_error = s.est_error;
        return Ok(out);
    }
    let w = z / (z - T::one());
    // Pick the Pfaff variant whose transformed series terminates, if any.
    let (lead, kept, other) =
        if is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b) { (b, b, c - a) } else { (a, a, c - b) };
    let s = sum_series(&[kept, other], c, w, "2F1")?;
    let scale = (T::one() - z).powf(-lead);
    out.value = scale * s.value;
    out.terms_used = s.terms;
    out.est_error = scale * s.est_error;
    Ok(out)
}

/// Plain power series of `2F1` for `|z| < 1` (or any `z` when terminating),
/// without transforms.
pub fn hyp2f1_series<T: Real>(a: T, b: T, c: T, z: T) -> Result<HypergeomEval<T>> {
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if !terminating && !(z.abs() < T::one()) {
        return Err(MomentError::domain("2F1 series argument |z| (requires |z| < 1)", z.as_f64()));
    }
    let s = sum_series(&[a, b], c, z, "2F1")?;
    Ok(HypergeomEval { a, b: Some(b), c, z, value: s.value, terminating, terms_used: s.terms, est_error: s.est_error })
}
