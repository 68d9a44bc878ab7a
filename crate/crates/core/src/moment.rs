//! Result type shared by every moment operation.

use std::fmt;

use crate::real::Real;

/// Reason attached to moments whose order reaches the degrees of freedom.
pub const UNDEFINED_ORDER_REASON: &str = "order ≥ degrees of freedom";

/// How a value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Direct evaluation of a closed-form expression.
    ClosedForm,
    /// Mixture-integrated recursion (conditional identity integrated term-wise
    /// or by quadrature over the mixing variable).
    Corrected,
    /// The published recursion applied verbatim, mixing factor pulled out of
    /// the expectation.
    Literal,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ClosedForm => "closed-form",
            Mode::Corrected => "corrected",
            Mode::Literal => "literal",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numerical side information for a computed moment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics<T> {
    /// Terms summed by the hypergeometric series, when one was used.
    pub series_terms: Option<usize>,
    /// First-neglected-term bound of that series.
    pub series_error: Option<T>,
    /// Estimated absolute error of the outer quadrature, when one was used.
    pub quad_error: Option<T>,
    /// Integrand evaluations of the outer quadrature.
    pub evaluations: Option<usize>,
}

/// A moment value together with its definedness flag.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult<T> {
    /// Meaningful only when `defined` is true; NaN otherwise.
    pub value: T,
    pub defined: bool,
    /// Empty when defined.
    pub reason: String,
    /// Tag naming the formula that produced the value.
    pub formula: &'static str,
    pub mode: Mode,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> MomentResult<T> {
    pub fn defined(value: T, formula: &'static str, mode: Mode) -> Self {
        Self { value, defined: true, reason: String::new(), formula, mode, diagnostics: Diagnostics::default() }
    }

    pub fn undefined(formula: &'static str, mode: Mode) -> Self {
        Self {
            value: T::nan(),
            defined: false,
            reason: UNDEFINED_ORDER_REASON.to_string(),
            formula,
            mode,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn with_diagnostics(mut self, diagnostics: Diagnostics<T>) -> Self {
        self.diagnostics = diagnostics;
        self
    }

    /// The value if defined.
    pub fn get(&self) -> Option<T> {
        self.defined.then_some(self.value)
    }
}

/// Moments exist only for orders strictly below the degrees of freedom; the
/// zeroth moment always exists.
pub fn order_is_defined<T: Real>(order: T, nu: T) -> bool {
    order == T::zero() || order < nu
}

/// Which expectation of a 1-D variable is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentKind {
    /// `E[T^k]`
    Raw,
    /// `E[(T-μ)^k]`
    Central,
    /// `E|T|^k`
    Abs,
    /// `E|T-μ|^k`
    CentralAbs,
}

impl MomentKind {
    pub const ALL: [MomentKind; 4] = [MomentKind::Raw, MomentKind::Central, MomentKind::Abs, MomentKind::CentralAbs];

    pub fn as_str(self) -> &'static str {
        match self {
            MomentKind::Raw => "raw",
            MomentKind::Central => "central",
            MomentKind::Abs => "abs",
            MomentKind::CentralAbs => "central-abs",
        }
    }

    pub fn is_absolute(self) -> bool {
        matches!(self, MomentKind::Abs | MomentKind::CentralAbs)
    }

    pub fn is_central(self) -> bool {
        matches!(self, MomentKind::Central | MomentKind::CentralAbs)
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MomentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(MomentKind::Raw),
            "central" => Ok(MomentKind::Central),
            "abs" => Ok(MomentKind::Abs),
            "central-abs" => Ok(MomentKind::CentralAbs),
            other => Err(format!("unknown moment kind `{other}` (expected raw, central, abs, central-abs)")),
        }
    }
}
