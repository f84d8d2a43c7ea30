//! Discrete Bony calculus: paraproducts, remainders, truncations, commutators.
//!
//! Conventions: `T_a h(j) = sum_k chi_eps(|j - k| / <k>) a(j - k) h(k)`, so in
//! every kernel `m = j - k` is the frequency of the symbol and `k` the
//! frequency of the argument.

pub mod cutoff;
pub mod kernel;

pub use cutoff::{profile, CutoffSpec};

use crate::error::{Error, Result};
use crate::fourier::field::FourierField;
use crate::fourier::multiplier::{apply_multiplier, jjap, norm, project, Side, Symbol};
use crate::fourier::product::multiply;
use kernel::{bilinear_adjoint_bruteforce, bilinear_bruteforce, paraproduct_binned};

/// `T_a h`.
pub fn paraproduct(a: &FourierField, h: &FourierField, cutoff: &CutoffSpec) -> Result<FourierField> {
    a.ensure_same_spec(h)?;
    Ok(paraproduct_binned(a, h, cutoff))
}

/// `T_a h` by the literal double sum.
pub fn paraproduct_bruteforce(
    a: &FourierField,
    h: &FourierField,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    a.ensure_same_spec(h)?;
    Ok(bilinear_bruteforce(a, h, |m, k| cutoff.weight(m, k)))
}

/// Literal adjoint `(T_a)^*` under `inner_l2`. It differs from `T_{conj a}`
/// in which bracket normalizes the cutoff argument.
pub fn paraproduct_adjoint(
    a: &FourierField,
    v: &FourierField,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    a.ensure_same_spec(v)?;
    Ok(bilinear_adjoint_bruteforce(a, v, |m, k| cutoff.weight(m, k)))
}

fn check_eps_order(eps1: f64, eps2: f64) -> Result<(CutoffSpec, CutoffSpec)> {
    if !(eps2 > 0.0 && eps2 <= eps1 && eps1 < 0.25) {
        return Err(Error::InvalidCutoff(format!(
            "need 0 < eps2 <= eps1 < 1/4, got eps1 = {eps1}, eps2 = {eps2}"
        )));
    }
    Ok((CutoffSpec::new(eps1)?, CutoffSpec::new(eps2)?))
}

/// `T^{eps1}_a h - T^{eps2}_a h`.
pub fn regularizing_remainder(
    a: &FourierField,
    h: &FourierField,
    eps1: f64,
    eps2: f64,
) -> Result<FourierField> {
    let (c1, c2) = check_eps_order(eps1, eps2)?;
    let t1 = paraproduct(a, h, &c1)?;
    let t2 = paraproduct(a, h, &c2)?;
    Ok(&t1 - &t2)
}

/// Same operator through the difference-of-cutoffs kernel.
pub fn regularizing_remainder_bruteforce(
    a: &FourierField,
    h: &FourierField,
    eps1: f64,
    eps2: f64,
) -> Result<FourierField> {
    let (c1, c2) = check_eps_order(eps1, eps2)?;
    a.ensure_same_spec(h)?;
    Ok(bilinear_bruteforce(a, h, |m, k| {
        c1.weight(m, k) - c2.weight(m, k)
    }))
}

/// `a b = T_a b + T_b a + remainder`.
#[derive(Clone, Debug)]
pub struct BonyParts {
    pub ta_b: FourierField,
    pub tb_a: FourierField,
    pub remainder: FourierField,
}

impl BonyParts {
    pub fn sum(&self) -> FourierField {
        &(&self.ta_b + &self.tb_a) + &self.remainder
    }
}

/// Splits the exact product; the remainder is the product minus both paraproducts.
pub fn bony_decompose(a: &FourierField, b: &FourierField, cutoff: &CutoffSpec) -> Result<BonyParts> {
    let product = multiply(a, b, None)?;
    let ta_b = paraproduct(a, b, cutoff)?;
    let tb_a = paraproduct(b, a, cutoff)?;
    let remainder = &(&product - &ta_b) - &tb_a;
    Ok(BonyParts {
        ta_b,
        tb_a,
        remainder: remainder.with_extent(product.extent()),
    })
}

/// Remainder through the symmetric kernel `psi(m, k)` with `m` the frequency of `a`.
pub fn bony_remainder_bruteforce(
    a: &FourierField,
    b: &FourierField,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    a.ensure_same_spec(b)?;
    Ok(bilinear_bruteforce(a, b, |m, k| cutoff.psi(m, k)))
}

/// `T_a (Pi_N h)` or `T_a (Pi_N^perp h)`.
pub fn paraproduct_truncated(
    a: &FourierField,
    h: &FourierField,
    n: f64,
    side: Side,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    paraproduct(a, &project(h, n, side), cutoff)
}

pub fn paraproduct_truncated_bruteforce(
    a: &FourierField,
    h: &FourierField,
    n: f64,
    side: Side,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    a.ensure_same_spec(h)?;
    Ok(bilinear_bruteforce(a, h, |m, k| {
        let low = norm(k) <= n;
        if low == (side == Side::Low) {
            cutoff.weight(m, k)
        } else {
            0.0
        }
    }))
}

/// `[<<D>>^p, T_a] h = <<D>>^p T_a h - T_a <<D>>^p h`.
pub fn commutator_jjap(
    p_exp: f64,
    a: &FourierField,
    h: &FourierField,
    r: f64,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    let symbol = Symbol::JJap { s: p_exp, r };
    let left = apply_multiplier(&paraproduct(a, h, cutoff)?, symbol)?;
    let right = paraproduct(a, &apply_multiplier(h, symbol)?, cutoff)?;
    Ok(&left - &right)
}

pub fn commutator_jjap_bruteforce(
    p_exp: f64,
    a: &FourierField,
    h: &FourierField,
    r: f64,
    cutoff: &CutoffSpec,
) -> Result<FourierField> {
    a.ensure_same_spec(h)?;
    let mut j = vec![0i64; a.dim()];
    Ok(bilinear_bruteforce(a, h, |m, k| {
        let w = cutoff.weight(m, k);
        if w == 0.0 {
            return 0.0;
        }
        for ((x, y), z) in j.iter_mut().zip(m).zip(k) {
            *x = y + z;
        }
        (jjap(&j, r).powf(p_exp) - jjap(k, r).powf(p_exp)) * w
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::field::relative_error;
    use crate::fourier::lattice::LatticeSpec;
    use crate::fourier::norm::inner_l2;
    use num_complex::Complex64;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(spec: LatticeSpec, seed: u64) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FourierField::from_fn(spec, |j| {
            let decay = 1.0 / (1.0 + crate::fourier::multiplier::norm_sq(j) as f64);
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * decay
        })
    }

    #[test]
    fn constant_symbol_acts_as_scalar() {
        let spec = LatticeSpec::new(2, 6, 2).unwrap();
        let a = FourierField::mode(spec, &[0, 0], c(2.0, -1.0)).unwrap();
        let h = random_field(spec, 3);
        let t = paraproduct(&a, &h, &CutoffSpec::default()).unwrap();
        assert!(relative_error(&t, &h.scale(c(2.0, -1.0))) < 1e-15);
    }

    #[test]
    fn high_symbol_mode_is_cut() {
        let spec = LatticeSpec::new(1, 12, 2).unwrap();
        let a = FourierField::mode(spec, &[10], c(1.0, 0.0)).unwrap();
        let h = FourierField::mode(spec, &[2], c(1.0, 0.0)).unwrap();
        let cut = CutoffSpec::default();
        assert_eq!(paraproduct(&a, &h, &cut).unwrap().l2_sq(), 0.0);
        assert_eq!(paraproduct_bruteforce(&a, &h, &cut).unwrap().l2_sq(), 0.0);
    }

    #[test]
    fn binned_matches_bruteforce() {
        for (dim, k, eps) in [(1, 16, 0.1), (2, 8, 0.2), (2, 16, 0.1), (3, 4, 0.24)] {
            let spec = LatticeSpec::new(dim, k, 2).unwrap();
            let cut = CutoffSpec::new(eps).unwrap();
            let a = random_field(spec, 10 + k as u64);
            let h = random_field(spec, 20 + k as u64);
            let fast = paraproduct(&a, &h, &cut).unwrap();
            let slow = paraproduct_bruteforce(&a, &h, &cut).unwrap();
            assert!(relative_error(&fast, &slow) < 1e-12, "d={dim} K={k}");
            // the brute force uses the full product cube; nothing may leak past the fast extent
            assert!(slow.with_extent(fast.extent()).l2_sq() == slow.l2_sq());
        }
    }

    #[test]
    fn symbol_with_larger_extent() {
        let spec = LatticeSpec::new(1, 8, 4).unwrap();
        let u = random_field(spec, 5);
        let a = multiply(&u, &u, None).unwrap();
        let cut = CutoffSpec::new(0.24).unwrap();
        let fast = paraproduct(&a, &u, &cut).unwrap();
        let slow = paraproduct_bruteforce(&a, &u, &cut).unwrap();
        assert!(relative_error(&fast, &slow) < 1e-12);
    }

    #[test]
    fn regularizing_examples() {
        let spec = LatticeSpec::new(1, 12, 2).unwrap();
        let a = FourierField::mode(spec, &[1], c(0.5, 0.0)).unwrap();
        let h = FourierField::mode(spec, &[10], c(0.0, 2.0)).unwrap();
        let r = regularizing_remainder(&a, &h, 0.2, 0.05).unwrap();
        assert!((r.get(&[11]) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((r.l2_sq() - 1.0).abs() < 1e-14);
        let zero = regularizing_remainder(&a, &h, 0.1, 0.1).unwrap();
        assert_eq!(zero.l2_sq(), 0.0);
        assert!(regularizing_remainder(&a, &h, 0.05, 0.1).is_err());
        let x = random_field(spec, 1);
        let y = random_field(spec, 2);
        let fast = regularizing_remainder(&x, &y, 0.2, 0.07).unwrap();
        let slow = regularizing_remainder_bruteforce(&x, &y, 0.2, 0.07).unwrap();
        assert!(relative_error(&fast, &slow) < 1e-12);
    }

    #[test]
    fn bony_reassembles_product() {
        let spec = LatticeSpec::new(2, 8, 2).unwrap();
        let a = random_field(spec, 31);
        let b = random_field(spec, 32);
        let cut = CutoffSpec::default();
        let parts = bony_decompose(&a, &b, &cut).unwrap();
        let product = multiply(&a, &b, None).unwrap();
        assert!(relative_error(&parts.sum(), &product) < 1e-13);
        let slow = bony_remainder_bruteforce(&a, &b, &cut).unwrap();
        assert!(relative_error(&parts.remainder, &slow) < 1e-11);
    }

    #[test]
    fn bony_high_low_pair_is_all_remainder() {
        let spec = LatticeSpec::new(1, 12, 2).unwrap();
        let a = FourierField::mode(spec, &[10], c(1.0, 0.0)).unwrap();
        let b = FourierField::mode(spec, &[2], c(1.0, 0.0)).unwrap();
        let parts = bony_decompose(&a, &b, &CutoffSpec::default()).unwrap();
        assert_eq!(parts.ta_b.l2_sq(), 0.0);
        assert_eq!(parts.tb_a.l2_sq(), 0.0);
        assert!((parts.remainder.get(&[12]) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn truncated_sides_sum_to_full() {
        let spec = LatticeSpec::new(2, 8, 2).unwrap();
        let a = random_field(spec, 41);
        let h = random_field(spec, 42);
        let cut = CutoffSpec::default();
        let lo = paraproduct_truncated(&a, &h, 4.5, Side::Low, &cut).unwrap();
        let hi = paraproduct_truncated(&a, &h, 4.5, Side::High, &cut).unwrap();
        let full = paraproduct(&a, &h, &cut).unwrap();
        assert!(relative_error(&(&lo + &hi), &full) < 1e-14);
        let hi_slow = paraproduct_truncated_bruteforce(&a, &h, 4.5, Side::High, &cut).unwrap();
        assert!(relative_error(&hi, &hi_slow) < 1e-12);
        let low_h = project(&h, 4.5, Side::Low);
        let none = paraproduct_truncated(&a, &low_h, 4.5, Side::High, &cut).unwrap();
        assert_eq!(none.l2_sq(), 0.0);
    }

    #[test]
    fn commutator_examples() {
        let spec = LatticeSpec::new(1, 12, 2).unwrap();
        let cut = CutoffSpec::new(0.2).unwrap();
        let a = FourierField::mode(spec, &[1], c(0.5, 0.5)).unwrap();
        let h = FourierField::mode(spec, &[10], c(2.0, 0.0)).unwrap();
        let k = commutator_jjap(1.0, &a, &h, 2.0, &cut).unwrap();
        assert!((k.get(&[11]) - c(1.0, 1.0)).norm() < 1e-13);
        let k_slow = commutator_jjap_bruteforce(1.0, &a, &h, 2.0, &cut).unwrap();
        assert!((k_slow.get(&[11]) - c(1.0, 1.0)).norm() < 1e-13);

        let constant = FourierField::mode(spec, &[0], c(3.0, 0.0)).unwrap();
        let x = random_field(spec, 9);
        let z = commutator_jjap(1.5, &constant, &x, 2.0, &cut).unwrap();
        assert!(z.max_abs() < 1e-14);

        let y = random_field(spec, 8);
        let fast = commutator_jjap(1.5, &y, &x, 3.0, &cut).unwrap();
        let slow = commutator_jjap_bruteforce(1.5, &y, &x, 3.0, &cut).unwrap();
        assert!(relative_error(&fast, &slow) < 1e-11);
    }

    #[test]
    fn conjugation_identity() {
        let spec = LatticeSpec::new(2, 8, 2).unwrap();
        let a = random_field(spec, 51);
        let h = random_field(spec, 52);
        let cut = CutoffSpec::new(0.2).unwrap();
        let lhs = paraproduct(&a, &h.conj(), &cut).unwrap().conj();
        let rhs = paraproduct(&a.conj(), &h, &cut).unwrap();
        assert!(relative_error(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn adjoint_identity_holds_for_transposed_kernel() {
        let spec = LatticeSpec::new(1, 16, 2).unwrap();
        let cut = CutoffSpec::new(0.2).unwrap();
        for seed in 0..5 {
            let a = random_field(spec, 60 + seed);
            let h = random_field(spec, 70 + seed);
            let v = random_field(spec, 80 + seed);
            let lhs = inner_l2(&paraproduct(&a, &h, &cut).unwrap(), &v).unwrap();
            let rhs = inner_l2(&h, &paraproduct_adjoint(&a, &v, &cut).unwrap()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + lhs.norm()));
        }
    }
}
