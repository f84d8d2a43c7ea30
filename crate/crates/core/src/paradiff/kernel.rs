//! Bilinear frequency kernels `out(m + k) = sum w(m, k) a(m) h(k)`.
//!
//! `bilinear_bruteforce` is the literal double sum and serves as the
//! reference for every faster path. `paraproduct_binned` exploits that the
//! paraproduct weight depends on `k` only through `|k|^2`: frequencies `k`
//! are grouped by that exact integer, and each group shares one list of
//! `(m, weight)` pairs restricted to the cutoff support.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::cutoff::CutoffSpec;
use crate::fourier::field::FourierField;
use crate::fourier::lattice::BoxShape;
use crate::fourier::multiplier::norm_sq;

/// Nonzero coefficients as `(point, |point|^2, value)`.
fn support(u: &FourierField) -> Vec<(Vec<i64>, i64, Complex64)> {
    u.nonzero()
        .map(|(j, c)| {
            let n = norm_sq(&j);
            (j, n, c)
        })
        .collect()
}

/// Literal double sum over all coefficient pairs; output extent `E_a + E_h`.
pub fn bilinear_bruteforce(
    a: &FourierField,
    h: &FourierField,
    mut weight: impl FnMut(&[i64], &[i64]) -> f64,
) -> FourierField {
    let extent = a.extent() + h.extent();
    let shape = BoxShape::new(a.dim(), extent);
    let mut out = vec![Complex64::default(); shape.len()];
    let sa = support(a);
    let sh = support(h);
    let mut j = vec![0i64; a.dim()];
    for (m, _, am) in &sa {
        for (k, _, hk) in &sh {
            let w = weight(m, k);
            if w == 0.0 {
                continue;
            }
            for ((x, y), z) in j.iter_mut().zip(m).zip(k) {
                *x = y + z;
            }
            out[shape.index_of(&j).unwrap()] += am * hk * w;
        }
    }
    FourierField::from_coeffs(*a.spec(), extent, out)
}

/// Literal conjugate transpose of the kernel: `out(k) = sum_j conj(w(j - k, k) a(j - k)) v(j)`.
pub fn bilinear_adjoint_bruteforce(
    a: &FourierField,
    v: &FourierField,
    mut weight: impl FnMut(&[i64], &[i64]) -> f64,
) -> FourierField {
    let extent = a.extent() + v.extent();
    let shape = BoxShape::new(a.dim(), extent);
    let mut out = vec![Complex64::default(); shape.len()];
    let sa = support(a);
    let sv = support(v);
    let mut k = vec![0i64; a.dim()];
    for (m, _, am) in &sa {
        for (j, _, vj) in &sv {
            for ((x, y), z) in k.iter_mut().zip(j).zip(m) {
                *x = y - z;
            }
            let w = weight(m, &k);
            if w == 0.0 {
                continue;
            }
            out[shape.index_of(&k).unwrap()] += (am * w).conj() * vj;
        }
    }
    FourierField::from_coeffs(*a.spec(), extent, out)
}

/// Output extent of `T_a h`: the cutoff confines `|m| < 1.6 eps <k>`.
pub fn paraproduct_extent(a: &FourierField, h: &FourierField, cutoff: &CutoffSpec) -> usize {
    let e_h = h.extent() as f64;
    let reach = cutoff.support_radius(h.dim() as f64 * e_h * e_h).floor() as usize;
    h.extent() + a.extent().min(reach)
}

/// Linear offset of a point inside a cube of side `side`, relative to the origin.
fn offset(p: &[i64], side: i64) -> i64 {
    p.iter().fold(0i64, |acc, &c| acc * side + c)
}

/// `T_a h` by shell binning. Agrees with the literal double sum up to
/// summation order.
pub fn paraproduct_binned(a: &FourierField, h: &FourierField, cutoff: &CutoffSpec) -> FourierField {
    let dim = a.dim();
    let extent = paraproduct_extent(a, h, cutoff);
    let shape = BoxShape::new(dim, extent);
    let side = shape.side() as i64;
    let origin = offset(&vec![extent as i64; dim], side);
    let reach = extent - h.extent();

    let mut sa = support(a);
    sa.sort_by_key(|(_, n, _)| *n);
    let a_norms: Vec<i64> = sa.iter().map(|(_, n, _)| *n).collect();
    let a_off: Vec<i64> = sa.iter().map(|(m, _, _)| offset(m, side)).collect();

    let mut bins: BTreeMap<i64, Vec<(Vec<i64>, Complex64)>> = BTreeMap::new();
    for (k, n, c) in support(h) {
        bins.entry(n).or_default().push((k, c));
    }
    let bins: Vec<_> = bins.into_iter().collect();

    let out = bins
        .par_iter()
        .fold(
            || vec![Complex64::default(); shape.len()],
            |mut acc, (ksq, members)| {
                let radius = cutoff.support_radius(*ksq as f64);
                let limit = (radius * radius).ceil() as i64 + 1;
                let count = a_norms.partition_point(|n| *n <= limit);
                let rep = &members[0].0;
                let list: Vec<(i64, Complex64)> = (0..count)
                    .filter_map(|i| {
                        // guards against weights of order 1e-48 right at the support edge
                        if sa[i].0.iter().any(|c| c.unsigned_abs() as usize > reach) {
                            return None;
                        }
                        let w = cutoff.weight(&sa[i].0, rep);
                        (w != 0.0).then(|| (a_off[i], sa[i].2 * w))
                    })
                    .collect();
                if list.is_empty() {
                    return acc;
                }
                for (k, hk) in members {
                    let base = origin + offset(k, side);
                    for (mo, aw) in &list {
                        acc[(base + mo) as usize] += aw * hk;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![Complex64::default(); shape.len()],
            |mut x, y| {
                for (p, q) in x.iter_mut().zip(&y) {
                    *p += q;
                }
                x
            },
        );
    FourierField::from_coeffs(*a.spec(), extent, out)
}
