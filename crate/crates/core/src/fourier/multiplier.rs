use num_complex::Complex64;

use super::field::FourierField;
use crate::error::{Error, Result};

/// `<j> = sqrt(1 + |j|^2)`.
pub fn jap(j: &[i64]) -> f64 {
    (1.0 + norm_sq(j) as f64).sqrt()
}

/// `<<j>> = max(R, |j|)`.
pub fn jjap(j: &[i64], r: f64) -> f64 {
    (norm_sq(j) as f64).sqrt().max(r)
}

pub fn norm_sq(j: &[i64]) -> i64 {
    j.iter().map(|c| c * c).sum()
}

/// Euclidean `|j|`.
pub fn norm(j: &[i64]) -> f64 {
    (norm_sq(j) as f64).sqrt()
}

/// Built-in Fourier multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    /// `-|j|^2`
    Laplacian,
    /// `<j>^m`
    Jap(f64),
    /// `max(R, |j|)^s`
    JJap { s: f64, r: f64 },
    /// `|j|^s`, with the value 0 at `j = 0`
    HalfWave(f64),
}

impl Symbol {
    pub fn eval(&self, j: &[i64]) -> Complex64 {
        let v = match *self {
            Symbol::Laplacian => -(norm_sq(j) as f64),
            Symbol::Jap(m) => (1.0 + norm_sq(j) as f64).powf(m / 2.0),
            Symbol::JJap { s, r } => jjap(j, r).powf(s),
            Symbol::HalfWave(s) => {
                if norm_sq(j) == 0 {
                    0.0
                } else {
                    norm(j).powf(s)
                }
            }
        };
        Complex64::new(v, 0.0)
    }
}

/// Multiplies every coefficient by `symbol(j)`.
pub fn apply_fn(
    u: &FourierField,
    mut symbol: impl FnMut(&[i64]) -> Complex64,
) -> Result<FourierField> {
    let mut bad = None;
    let out = u.map(|j, c| {
        let m = symbol(j);
        if !(m.re.is_finite() && m.im.is_finite()) && bad.is_none() {
            bad = Some(j.to_vec());
        }
        c * m
    });
    match bad {
        Some(index) => Err(Error::NonFiniteSymbol { index }),
        None => Ok(out),
    }
}

pub fn apply_multiplier(u: &FourierField, symbol: Symbol) -> Result<FourierField> {
    apply_fn(u, |j| symbol.eval(j))
}

/// Which half of the Euclidean split `|j| <= N` / `|j| > N` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Low,
    High,
}

/// `Pi_N u` (low) or `u - Pi_N u` (high).
pub fn project(u: &FourierField, n: f64, side: Side) -> FourierField {
    let n_sq = n * n;
    u.map(|j, c| {
        let low = (norm_sq(j) as f64) <= n_sq;
        if low == (side == Side::Low) {
            c
        } else {
            Complex64::default()
        }
    })
}
