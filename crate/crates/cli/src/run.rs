//! Dispatch from parsed arguments to the moment engine and the oracles.

use tmoment::oracle::{
    mc_abs_moment_nd, mc_moment_nd, quad_abs_moment_real_1d, quad_moment_1d, McEstimate, QuadResult,
};
use tmoment::{t1d, tnd, truncated};
use tmoment::{Moment, MomentError, MomentKind, MultiIndex, Rectangle, TParams1D, TParamsND};

use crate::args::{Kind, ModeArg, MultiArgs, OneDArgs, OracleArgs, Target, TruncArgs};
use crate::error::{CliError, EXIT_DOMAIN, EXIT_OK, EXIT_VERIFY_FAILED};
use crate::input::{params_1d, params_nd, parse_multi_index, parse_order, rectangle, Order};
use crate::response::{finite, DiagnosticsOut, OracleOut, OrderOut, Response, Verification, SCHEMA_ID};

pub const LITERAL_DIVERGENCE_NOTE: &str = "documented divergence of the literal recursion";

/// A rendered response and the process exit status that goes with it.
pub struct Outcome {
    pub response: Response,
    pub exit: i32,
}

/// What the oracle stage does after the formula is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Formula,
    Oracle,
    Verify,
}

impl Stage {
    fn command(self, target: &'static str) -> &'static str {
        match self {
            Stage::Formula => target,
            Stage::Oracle => "oracle",
            Stage::Verify => "verify",
        }
    }
}

/// Everything the oracle needs to recompute the same quantity.
enum Problem {
    OneD { kind: MomentKind, order: Order, p: TParams1D },
    Multi { kind: MomentKind, k: MultiIndex, p: TParamsND, literal: bool },
    Truncated { k: MultiIndex, r: Rectangle, p: TParamsND, literal: bool },
}

impl Problem {
    fn target(&self) -> &'static str {
        match self {
            Problem::OneD { .. } => "one-d",
            Problem::Multi { .. } => "multi",
            Problem::Truncated { .. } => "truncated",
        }
    }

    fn kind(&self) -> MomentKind {
        match self {
            Problem::OneD { kind, .. } | Problem::Multi { kind, .. } => *kind,
            Problem::Truncated { .. } => MomentKind::Raw,
        }
    }

    fn orders(&self) -> Vec<OrderOut> {
        match self {
            Problem::OneD { order: Order::Int(k), .. } => vec![OrderOut::Int(*k)],
            Problem::OneD { order: Order::Real(k), .. } => vec![OrderOut::Real(*k)],
            Problem::Multi { k, .. } | Problem::Truncated { k, .. } => {
                k.entries().iter().map(|&e| OrderOut::Int(e)).collect()
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Problem::OneD { .. } => 1,
            Problem::Multi { k, .. } | Problem::Truncated { k, .. } => k.dim(),
        }
    }

    fn literal_total(&self) -> Option<u32> {
        match self {
            Problem::Multi { k, literal: true, .. } | Problem::Truncated { k, literal: true, .. } => Some(k.total()),
            _ => None,
        }
    }

    /// Quadrature compares to `rtol`; truncated values carry an inner
    /// mixing quadrature and get a looser default.
    fn default_rtol(&self) -> f64 {
        match self {
            Problem::Truncated { .. } => 1e-7,
            _ => 1e-9,
        }
    }
}

pub fn run_one_d(a: &OneDArgs, stage: Stage, oracle: Option<&OracleArgs>) -> Result<Outcome, CliError> {
    let problem = one_d_problem(a)?;
    finish(problem, stage, oracle)
}

pub fn run_multi(a: &MultiArgs, stage: Stage, oracle: Option<&OracleArgs>) -> Result<Outcome, CliError> {
    let problem = multi_problem(a)?;
    finish(problem, stage, oracle)
}

pub fn run_truncated(a: &TruncArgs, stage: Stage, oracle: Option<&OracleArgs>) -> Result<Outcome, CliError> {
    let problem = truncated_problem(a)?;
    finish(problem, stage, oracle)
}

pub fn run_target(target: &Target, stage: Stage) -> Result<Outcome, CliError> {
    let o = match target {
        Target::OneD { oracle, .. } | Target::Multi { oracle, .. } | Target::Truncated { oracle, .. } => oracle,
    };
    if o.samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    if !(o.tol > 0.0) || o.rtol.is_some_and(|r| !(r > 0.0)) || !(o.n_se > 0.0) {
        return Err(CliError::usage("--tol, --rtol and --n-se must be positive"));
    }
    match target {
        Target::OneD { args, oracle } => run_one_d(args, stage, Some(oracle)),
        Target::Multi { args, oracle } => run_multi(args, stage, Some(oracle)),
        Target::Truncated { args, oracle } => run_truncated(args, stage, Some(oracle)),
    }
}

fn one_d_problem(a: &OneDArgs) -> Result<Problem, CliError> {
    let kind: MomentKind = a.kind.into();
    let order = parse_order(&a.k, a.real_order)?;
    if matches!(order, Order::Real(_)) && !kind.is_absolute() {
        return Err(CliError::usage("--real-order applies to --kind abs and central-abs only"));
    }
    Ok(Problem::OneD { kind, order, p: params_1d(a)? })
}

fn multi_problem(a: &MultiArgs) -> Result<Problem, CliError> {
    let k = parse_multi_index(&a.k)?;
    let p = params_nd(&a.params, k.dim())?;
    let literal = a.mode == ModeArg::Literal;
    if literal && matches!(a.kind, Kind::Abs | Kind::CentralAbs) {
        return Err(CliError::usage("--mode literal applies to --kind raw and central only"));
    }
    Ok(Problem::Multi { kind: a.kind.into(), k, p, literal })
}

fn truncated_problem(a: &TruncArgs) -> Result<Problem, CliError> {
    let k = parse_multi_index(&a.k)?;
    let p = params_nd(&a.params, k.dim())?;
    let r = rectangle(a.lower.as_deref(), a.upper.as_deref(), k.dim())?;
    Ok(Problem::Truncated { k, r, p, literal: a.mode == ModeArg::Literal })
}

fn formula(problem: &Problem) -> Result<Moment, MomentError> {
    match problem {
        Problem::OneD { kind, order: Order::Int(k), p } => match kind {
            MomentKind::Raw => t1d::raw_moment(*k, p),
            MomentKind::Central => t1d::central_moment(*k, p),
            MomentKind::Abs => t1d::abs_moment(*k, p),
            MomentKind::CentralAbs => t1d::central_abs_moment(*k, p),
        },
        Problem::OneD { kind, order: Order::Real(k), p } => {
            if kind.is_central() {
                t1d::central_abs_moment_real(*k, p)
            } else {
                t1d::abs_moment_real(*k, p)
            }
        }
        Problem::Multi { kind, k, p, literal } => {
            let unit_matrix = p.centered().is_standard();
            match (kind, literal) {
                (MomentKind::Raw, true) => tnd::raw_moment_nd_literal(k, p),
                (MomentKind::Central, true) => tnd::raw_moment_nd_literal(k, &p.centered()),
                (MomentKind::Raw, false) if p.is_standard() => tnd::std_raw_moment_nd(k, p.nu()),
                (MomentKind::Raw, false) => tnd::raw_moment_nd(k, p),
                (MomentKind::Central, false) if unit_matrix => tnd::std_raw_moment_nd(k, p.nu()),
                (MomentKind::Central, false) => tnd::central_moment_nd(k, p),
                (MomentKind::Abs, _) if p.is_standard() => tnd::std_abs_moment_nd(k, p.nu()),
                (MomentKind::CentralAbs, _) if unit_matrix => tnd::std_abs_moment_nd(k, p.nu()),
                (MomentKind::Abs, _) if k.dim() == 1 => t1d::abs_moment(k.get(0), &one_d_view(p)?),
                (MomentKind::CentralAbs, _) if k.dim() == 1 => t1d::central_abs_moment(k.get(0), &one_d_view(p)?),
                (MomentKind::Abs, _) => Err(MomentError::Unsupported(
                    "multivariate absolute moments need mu = 0 and the identity matrix".into(),
                )),
                (MomentKind::CentralAbs, _) => Err(MomentError::Unsupported(
                    "multivariate central absolute moments need the identity matrix".into(),
                )),
            }
        }
        Problem::Truncated { k, r, p, literal: false } => truncated::trunc_t_moment(k, r, p),
        Problem::Truncated { k, r, p, literal: true } => truncated::trunc_t_moment_literal(k, r, p),
    }
}

fn one_d_view(p: &TParamsND) -> Result<TParams1D, MomentError> {
    TParams1D::new(p.mu()[0], p.sigma_mat()[(0, 0)], p.nu())
}

enum OracleValue {
    Quad(QuadResult<f64>),
    Mc(McEstimate),
}

fn oracle(problem: &Problem, o: &OracleArgs) -> Result<OracleValue, MomentError> {
    let (lo, hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let quad = match problem {
        Problem::OneD { kind, order: Order::Int(k), p } => quad_moment_1d(*kind, *k, p, lo, hi, o.tol)?,
        Problem::OneD { kind, order: Order::Real(k), p } => {
            quad_abs_moment_real_1d(*k, kind.is_central(), p, lo, hi, o.tol)?
        }
        Problem::Multi { kind, k, p, .. } if k.dim() == 1 => {
            quad_moment_1d(*kind, k.get(0), &one_d_view(p)?, lo, hi, o.tol)?
        }
        Problem::Truncated { k, r, p, .. } if k.dim() == 1 => {
            quad_moment_1d(MomentKind::Raw, k.get(0), &one_d_view(p)?, r.lower()[0], r.upper()[0], o.tol)?
        }
        Problem::Multi { kind, k, p, .. } => {
            let est = match kind {
                MomentKind::Raw => mc_moment_nd(k, p, None, o.samples, o.seed)?,
                MomentKind::Central => mc_moment_nd(k, &p.centered(), None, o.samples, o.seed)?,
                MomentKind::Abs => mc_abs_moment_nd(k, p, o.samples, o.seed)?,
                MomentKind::CentralAbs => mc_abs_moment_nd(k, &p.centered(), o.samples, o.seed)?,
            };
            return Ok(OracleValue::Mc(est));
        }
        Problem::Truncated { k, r, p, .. } => {
            return Ok(OracleValue::Mc(mc_moment_nd(k, p, Some(r), o.samples, o.seed)?));
        }
    };
    Ok(OracleValue::Quad(quad))
}

fn oracle_out(v: &OracleValue) -> OracleOut {
    match v {
        OracleValue::Quad(q) => OracleOut {
            method: "quadrature",
            value: finite(q.value),
            error: finite(q.est_abs_error),
            evaluations: Some(q.evaluations),
            n_samples: None,
            accepted: None,
            seed: None,
            heavy_tail_warning: false,
        },
        OracleValue::Mc(e) => OracleOut {
            method: "monte-carlo",
            value: finite(e.value),
            error: finite(e.std_error),
            evaluations: None,
            n_samples: Some(e.n_samples),
            accepted: Some(e.accepted),
            seed: Some(e.seed),
            heavy_tail_warning: e.heavy_tail_warning,
        },
    }
}

fn verification(problem: &Problem, formula_value: f64, v: &OracleValue, o: &OracleArgs) -> Verification {
    let (value, err, tolerance) = match v {
        OracleValue::Quad(q) => {
            let rtol = o.rtol.unwrap_or(problem.default_rtol());
            let tol = (rtol * q.value.abs()).max(10.0 * q.est_abs_error).max(o.tol);
            (q.value, q.est_abs_error, tol)
        }
        OracleValue::Mc(e) => (e.value, e.std_error, (o.n_se * e.std_error).max(1e-12)),
    };
    let difference = formula_value - value;
    let pass = difference.abs() <= tolerance;
    let mut notes = Vec::new();
    if !pass && problem.literal_total().is_some_and(|t| t >= 3) {
        notes.push(LITERAL_DIVERGENCE_NOTE.to_string());
    }
    if let OracleValue::Mc(e) = v {
        if e.heavy_tail_warning {
            notes.push("Monte Carlo variance is infinite (2·order ≥ nu); the standard error is unreliable".into());
        }
    }
    Verification {
        formula_value: finite(formula_value),
        oracle_value: finite(value),
        oracle_error: finite(err),
        difference: finite(difference),
        tolerance: finite(tolerance),
        pass,
        ratio: finite(value / formula_value),
        note: (!notes.is_empty()).then(|| notes.join("; ")),
    }
}

fn finish(problem: Problem, stage: Stage, oracle_args: Option<&OracleArgs>) -> Result<Outcome, CliError> {
    let m = formula(&problem)?;
    let mut response = Response {
        schema: SCHEMA_ID,
        command: stage.command(problem.target()),
        target: problem.target(),
        kind: problem.kind().as_str(),
        k: problem.orders(),
        dim: problem.dim(),
        value: if m.defined { finite(m.value) } else { None },
        defined: m.defined,
        reason: m.reason.clone(),
        formula: m.formula,
        mode: m.mode.as_str(),
        diagnostics: DiagnosticsOut {
            series_terms: m.diagnostics.series_terms,
            series_error: m.diagnostics.series_error.and_then(finite),
            quad_error: m.diagnostics.quad_error.and_then(finite),
            evaluations: m.diagnostics.evaluations,
        },
        oracle: None,
        verification: None,
    };
    if !m.defined {
        return Ok(Outcome { response, exit: EXIT_DOMAIN });
    }
    let (Some(o), Stage::Oracle | Stage::Verify) = (oracle_args, stage) else {
        return Ok(Outcome { response, exit: EXIT_OK });
    };
    let v = oracle(&problem, o).map_err(CliError::Oracle)?;
    if let OracleValue::Mc(e) = &v {
        if e.heavy_tail_warning {
            eprintln!("warning: 2·order ≥ nu, the Monte Carlo estimator has infinite variance");
        }
    }
    response.oracle = Some(oracle_out(&v));
    let mut exit = EXIT_OK;
    if stage == Stage::Verify {
        let ver = verification(&problem, m.value, &v, o);
        if !ver.pass {
            exit = EXIT_VERIFY_FAILED;
        }
        response.verification = Some(ver);
    }
    Ok(Outcome { response, exit })
}
