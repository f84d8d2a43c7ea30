//! Deterministic random fields for the estimators and the registry.
//!
//! Every coefficient is drawn from its own generator seeded by `(seed, j)`,
//! so fields built with the same seed on nested lattices agree on the
//! common modes. Refinement studies across `K` then see one fixed function
//! with more of its tail resolved.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::field::FourierField;
use crate::fourier::lattice::LatticeSpec;
use crate::fourier::multiplier::{jap, norm};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// Modes with `|j| <= 1`.
    Low,
    /// Every mode, amplitude `<j>^{-decay}`.
    Decaying { decay: f64 },
    /// Flat amplitudes on `lo <= |j| <= hi`.
    Annulus { lo: f64, hi: f64 },
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mode_seed(seed: u64, j: &[i64]) -> u64 {
    j.iter().fold(splitmix(seed), |h, &c| splitmix(h ^ c as u64))
}

/// Coefficient with independent uniform parts in `[-1/2, 1/2)`.
pub fn mode_value(seed: u64, j: &[i64]) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, j));
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

pub fn sample_field(spec: LatticeSpec, family: Family, seed: u64) -> FourierField {
    FourierField::from_fn(spec, |j| {
        let r = norm(j);
        let amp = match family {
            Family::Low => (r <= 1.0) as u8 as f64,
            Family::Decaying { decay } => jap(j).powf(-decay),
            Family::Annulus { lo, hi } => (r >= lo && r <= hi) as u8 as f64,
        };
        if amp == 0.0 {
            Complex64::default()
        } else {
            mode_value(seed, j) * amp
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lattices_agree() {
        let small = LatticeSpec::new(2, 4, 2).unwrap();
        let large = LatticeSpec::new(2, 8, 2).unwrap();
        let fam = Family::Decaying { decay: 2.0 };
        let a = sample_field(small, fam, 9);
        let b = sample_field(large, fam, 9);
        for (j, c) in a.nonzero() {
            assert_eq!(b.get(&j), c);
        }
    }

    #[test]
    fn annulus_support() {
        let spec = LatticeSpec::new(1, 16, 2).unwrap();
        let u = sample_field(spec, Family::Annulus { lo: 8.0, hi: 16.0 }, 1);
        assert!(u.nonzero().all(|(j, _)| j[0].abs() >= 8));
        assert_eq!(u.nonzero().count(), 18);
    }
}
