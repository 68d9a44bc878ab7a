//! Turning argument strings into parameter objects.

use std::fs;

use tmoment::{MultiIndex, Rectangle, SquareMatrix, TParams1D, TParamsND};

use crate::args::{Convention, MatrixArgs, OneDArgs};
use crate::error::CliError;

/// Order given to `one-d`: integer, or real with `--real-order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Int(u32),
    Real(f64),
}

pub fn parse_order(s: &str, real: bool) -> Result<Order, CliError> {
    let s = s.trim();
    if real {
        let k: f64 = s.parse().map_err(|_| CliError::usage(format!("--k: `{s}` is not a number")))?;
        if !(k >= 0.0) || !k.is_finite() {
            return Err(CliError::usage(format!("--k must be a finite nonnegative number, got {s}")));
        }
        Ok(Order::Real(k))
    } else {
        s.parse().map(Order::Int).map_err(|_| {
            CliError::usage(format!("--k: `{s}` is not a nonnegative integer (use --real-order for real orders)"))
        })
    }
}

pub fn parse_multi_index(s: &str) -> Result<MultiIndex, CliError> {
    let k = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| CliError::usage(format!("--k: `{}` is not a nonnegative integer", part.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiIndex::new(k))
}

/// A single number, accepting `inf`, `+inf` and `-inf`.
pub fn parse_number(s: &str, flag: &str) -> Result<f64, CliError> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => match t.parse::<f64>() {
            Ok(v) if !v.is_nan() => Ok(v),
            _ => Err(CliError::usage(format!("{flag}: `{t}` is not a number"))),
        },
    }
}

pub fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|p| parse_number(p, flag)).collect()
}

fn expect_len(v: &[f64], n: usize, flag: &str) -> Result<(), CliError> {
    if v.len() != n {
        return Err(CliError::usage(format!("{flag} has {} entries but the moment has dimension {n}", v.len())));
    }
    Ok(())
}

pub fn params_1d(a: &OneDArgs) -> Result<TParams1D, CliError> {
    let p = match (a.sigma, a.scale) {
        (_, Some(s)) => TParams1D::from_scale(a.mu, s, a.nu)?,
        (sigma, None) => TParams1D::new(a.mu, sigma.unwrap_or(1.0), a.nu)?,
    };
    Ok(p)
}

/// Parse a JSON array of rows. Errors carry the line and column of the
/// offending character.
pub fn parse_matrix_json(text: &str, source: &str) -> Result<SquareMatrix, CliError> {
    // serde_json reports "... at line L column C"
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("malformed matrix in {source}: {e}")))?;
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(CliError::usage(format!(
            "matrix in {source} is not square: row {i} has {} entries, expected {n}",
            r.len()
        )));
    }
    if n == 0 {
        return Err(CliError::usage(format!("matrix in {source} is empty")));
    }
    Ok(SquareMatrix::from_rows(&rows)?)
}

fn matrix(a: &MatrixArgs, n: usize) -> Result<SquareMatrix, CliError> {
    let m = match (&a.sigma_mat, &a.sigma_file) {
        (Some(s), _) if s.trim() == "identity" => SquareMatrix::identity(n),
        (Some(s), _) => parse_matrix_json(s, "--sigma-mat")?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            parse_matrix_json(&text, &path.display().to_string())?
        }
        (None, None) => SquareMatrix::identity(n),
    };
    if m.dim() != n {
        return Err(CliError::usage(format!("matrix is {0}×{0} but the moment has dimension {n}", m.dim())));
    }
    Ok(m)
}

pub fn params_nd(a: &MatrixArgs, n: usize) -> Result<TParamsND, CliError> {
    let mu = match &a.mu {
        Some(s) => {
            let mu = parse_list(s, "--mu")?;
            expect_len(&mu, n, "--mu")?;
            mu
        }
        None => vec![0.0; n],
    };
    let m = matrix(a, n)?;
    let p = match a.matrix_convention {
        Convention::Precision => TParamsND::new(mu, m, a.nu)?,
        Convention::Scale => TParamsND::from_scale_matrix(mu, m, a.nu)?,
    };
    Ok(p)
}

pub fn rectangle(lower: Option<&str>, upper: Option<&str>, n: usize) -> Result<Rectangle, CliError> {
    let lower = match lower {
        Some(s) => parse_list(s, "--lower")?,
        None => vec![f64::NEG_INFINITY; n],
    };
    let upper = match upper {
        Some(s) => parse_list(s, "--upper")?,
        None => vec![f64::INFINITY; n],
    };
    expect_len(&lower, n, "--lower")?;
    expect_len(&upper, n, "--upper")?;
    Ok(Rectangle::new(lower, upper)?)
}
