//! Globally adaptive Gauss–Kronrod (7/15) quadrature with semi-infinite
//! ranges handled by geometrically widening panels.

use crate::real::{compensated_sum, Real};

// Kronrod abscissae, descending; odd positions are the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Panels on a semi-infinite range stop after this many doublings.
const MAX_TAIL_PANELS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub est_abs_error: T,
    pub evaluations: usize,
    /// False when the error target was not met; `est_abs_error` then holds
    /// what was achieved.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs_value: T,
    splittable: bool,
}

/// Partial result with the integral of `|f|`, used for tail control.
#[derive(Debug, Clone, Copy)]
struct Piece<T> {
    value: T,
    error: T,
    abs_value: T,
    evaluations: usize,
    converged: bool,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let half_len = (b - a) * half;
    let fc = guard(f(center));
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = guard(f(center - dx));
        let f2 = guard(f(center + dx));
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        error = res_asc * T::one().min((T::lit(200.0) * error / res_asc).powf(T::lit(1.5)));
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(floor);
    }
    let mid = center;
    let splittable = mid > a && mid < b;
    Segment { a, b, value, error, abs_value: res_abs, splittable }
}

/// Non-finite integrand values (overflow far in a tail) count as zero.
#[inline]
fn guard<T: Real>(v: T) -> T {
    if v.is_finite() {
        v
    } else {
        T::zero()
    }
}

/// Adaptive quadrature driver with absolute/relative targets.
#[derive(Debug, Clone, Copy)]
pub struct Integrator<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Width of the first panel on a semi-infinite range.
    pub tail_width: T,
}

impl<T: Real> Integrator<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self { abs_tol, rel_tol, max_subdivisions: 2000, tail_width: T::one() }
    }

    pub fn with_tail_width(mut self, width: T) -> Self {
        self.tail_width = width;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn target(&self, magnitude: T) -> T {
        self.abs_tol.max(self.rel_tol * magnitude)
    }

    fn finite<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T, abs_tol: T) -> Piece<T> {
        let first = gk15(f, a, b);
        let mut evaluations = 15;
        let mut segments = vec![first];
        let mut total = first.value;
        let mut error = first.error;
        let mut abs_total = first.abs_value;
        // never ask for less than the round-off floor of the rule itself
        let floor = T::lit(100.0) * T::epsilon();
        let target = |total: T, abs_total: T| abs_tol.max(self.rel_tol * total.abs()).max(floor * abs_total);
        while error > target(total, abs_total) && segments.len() < self.max_subdivisions {
            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| s.splittable)
                .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i);
            let Some(i) = worst else { break };
            let s = segments.swap_remove(i);
            let mid = (s.a + s.b) * T::lit(0.5);
            let left = gk15(f, s.a, mid);
            let right = gk15(f, mid, s.b);
            evaluations += 30;
            total = total - s.value + left.value + right.value;
            abs_total = abs_total - s.abs_value + left.abs_value + right.abs_value;
            segments.push(left);
            segments.push(right);
            error = segments.iter().map(|s| s.error).sum();
        }
        total = compensated_sum(segments.iter().map(|s| s.value));
        let converged = error <= target(total, abs_total);
        Piece { value: total, error, abs_value: abs_total, evaluations, converged }
    }

    /// `∫_a^∞ f`, panels `[a + w(2^j - 1), a + w(2^(j+1) - 1)]`.
    fn upper_tail<F: FnMut(T) -> T>(&self, f: &mut F, a: T, abs_tol: T) -> Piece<T> {
        let mut acc = crate::real::CompensatedSum::new();
        let mut abs_acc = T::zero();
        let mut error = T::zero();
        let mut evaluations = 0;
        let mut converged = true;
        let mut prev_abs: Option<T> = None;
        let mut lo = a;
        let mut width = self.tail_width;
        for _ in 0..MAX_TAIL_PANELS {
            let hi = lo + width;
            if !hi.is_finite() {
                break;
            }
            let panel_tol = T::lit(0.1) * abs_tol.max(self.rel_tol * abs_acc);
            let piece = self.finite(f, lo, hi, panel_tol);
            evaluations += piece.evaluations;
            converged &= piece.converged;
            acc.add(piece.value);
            abs_acc = abs_acc + piece.abs_value;
            error = error + piece.error;
            let budget = T::lit(0.1) * self.target(abs_acc).max(abs_tol);
            if let Some(p) = prev_abs {
                if piece.abs_value == T::zero() && p == T::zero() {
                    return Piece { value: acc.value(), error, abs_value: abs_acc, evaluations, converged };
                }
                if p > T::zero() {
                    let r = piece.abs_value / p;
                    if r < T::lit(0.9) {
                        let tail = piece.abs_value * r / (T::one() - r);
                        if tail <= budget {
                            error = error + tail;
                            return Piece { value: acc.value(), error, abs_value: abs_acc, evaluations, converged };
                        }
                    }
                }
            }
            prev_abs = Some(piece.abs_value);
            lo = hi;
            width = width * T::lit(2.0);
        }
        // the neglected tail is at least as heavy as the last panel
        error = error + prev_abs.unwrap_or(T::zero());
        Piece { value: acc.value(), error, abs_value: abs_acc, evaluations, converged: false }
    }

    fn piece<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T, abs_tol: T) -> Piece<T> {
        match (a.is_finite(), b.is_finite()) {
            (true, true) => self.finite(f, a, b, abs_tol),
            (true, false) => self.upper_tail(f, a, abs_tol),
            (false, true) => {
                let mut g = |x: T| f(-x);
                self.upper_tail(&mut g, -b, abs_tol)
            }
            (false, false) => {
                let left = self.piece(f, a, T::zero(), abs_tol * T::lit(0.5));
                let right = self.piece(f, T::zero(), b, abs_tol * T::lit(0.5));
                combine(&[left, right])
            }
        }
    }

    /// `∫_a^b f` for `a < b`, either end possibly infinite.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> QuadResult<T> {
        self.integrate_with_breaks(&mut f, a, b, &[])
    }

    /// As [`Integrator::integrate`], splitting at the interior `breaks` first
    /// (kinks, peaks). Each piece meets the relative target on its own, so
    /// cancellation between pieces does not force extra refinement.
    pub fn integrate_with_breaks<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T, breaks: &[T]) -> QuadResult<T> {
        if a == b {
            return QuadResult { value: T::zero(), est_abs_error: T::zero(), evaluations: 0, converged: true };
        }
        let (lo, hi, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
        let mut points: Vec<T> = breaks.iter().copied().filter(|&x| x > lo && x < hi && x.is_finite()).collect();
        points.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        points.dedup();
        if points.is_empty() && !lo.is_finite() && !hi.is_finite() {
            points.push(T::zero());
        }
        let mut edges = Vec::with_capacity(points.len() + 2);
        edges.push(lo);
        edges.extend(points);
        edges.push(hi);
        let share = self.abs_tol / T::from_count(edges.len() - 1);
        let pieces: Vec<Piece<T>> = edges.windows(2).map(|w| self.piece(&mut f, w[0], w[1], share)).collect();
        let total = combine(&pieces);
        QuadResult {
            value: sign * total.value,
            est_abs_error: total.error,
            evaluations: total.evaluations,
            converged: total.converged,
        }
    }
}

fn combine<T: Real>(pieces: &[Piece<T>]) -> Piece<T> {
    let mut acc = crate::real::CompensatedSum::new();
    let mut out = Piece { value: T::zero(), error: T::zero(), abs_value: T::zero(), evaluations: 0, converged: true };
    for p in pieces {
        acc.add(p.value);
        out.error = out.error + p.error;
        out.abs_value = out.abs_value + p.abs_value;
        out.evaluations += p.evaluations;
        out.converged &= p.converged;
    }
    out.value = acc.value();
    out
}
