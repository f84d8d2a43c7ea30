use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::FourierField;
use super::multiplier::{jjap, norm_sq};
use crate::error::{Error, Result};

/// Regularity `s` and weight floor `R` of the weighted norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub s: f64,
    pub r: f64,
}

impl NormParams {
    pub fn new(s: f64, r: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidParameter(format!("s must be finite and >= 0, got {s}")));
        }
        if !(r.is_finite() && r > 1.0) {
            return Err(Error::InvalidParameter(format!("R must exceed 1, got {r}")));
        }
        Ok(Self { s, r })
    }

    pub fn with_s(&self, s: f64) -> Self {
        Self { s, r: self.r }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    HsSum,
    Weighted,
}

/// `sum_j max(R, |j|)^{2s} |c(j)|^2`.
pub fn weighted_sq(u: &FourierField, s: f64, r: f64) -> f64 {
    let shape = u.shape();
    let mut p = vec![0i64; u.dim()];
    u.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::default())
        .map(|(i, c)| {
            shape.point_into(i, &mut p);
            jjap(&p, r).powf(2.0 * s) * c.norm_sqr()
        })
        .sum()
}

pub fn weighted(u: &FourierField, s: f64, r: f64) -> f64 {
    weighted_sq(u, s, r).sqrt()
}

/// `|| |D|^s u ||_{L2}` with the zero mode dropped.
pub fn homogeneous(u: &FourierField, s: f64) -> f64 {
    let shape = u.shape();
    let mut p = vec![0i64; u.dim()];
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            shape.point_into(i, &mut p);
            let n2 = norm_sq(&p);
            if n2 == 0 {
                0.0
            } else {
                (n2 as f64).powf(s) * c.norm_sqr()
            }
        })
        .sum::<f64>()
        .sqrt()
}

pub fn l2(u: &FourierField) -> f64 {
    u.l2_sq().sqrt()
}

/// `||u||_{L2} + || |D|^s u ||_{L2}`.
pub fn hs_sum(u: &FourierField, s: f64) -> f64 {
    l2(u) + homogeneous(u, s)
}

pub fn norm(u: &FourierField, kind: NormKind, params: NormParams) -> f64 {
    match kind {
        NormKind::L2 => l2(u),
        NormKind::HsSum => hs_sum(u, params.s),
        NormKind::Weighted => weighted(u, params.s, params.r),
    }
}

/// `sum_j u(j) conj(v(j))`.
pub fn inner_l2(u: &FourierField, v: &FourierField) -> Result<Complex64> {
    u.ensure_same_spec(v)?;
    let extent = u.extent().max(v.extent());
    let a = u.with_extent(extent);
    let b = v.with_extent(extent);
    Ok(a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x * y.conj())
        .sum())
}
