use num_complex::Complex64;

use super::fft::{analyze, synthesize};
use super::field::FourierField;
use super::lattice::BoxShape;
use crate::error::{Error, Result};

/// Smallest transform size that represents a product of extent `extent`
/// without wrap-around.
fn product_grid(extent: usize) -> usize {
    (2 * extent + 1).next_power_of_two()
}

fn check_budget(u: &FourierField, extent: usize) -> Result<()> {
    let spec = u.spec();
    if extent > spec.budget() {
        return Err(Error::PaddingShortfall {
            extent,
            budget: spec.budget(),
            required_pad: extent.div_ceil(spec.k_max),
        });
    }
    Ok(())
}

/// Coefficients of the pointwise product `u * v`.
///
/// The exact product lives on extent `E_u + E_v`; `target` restricts the
/// result to a smaller cube (or widens it), `None` keeps the exact extent.
pub fn multiply(u: &FourierField, v: &FourierField, target: Option<usize>) -> Result<FourierField> {
    u.ensure_same_spec(v)?;
    let extent = u.extent() + v.extent();
    check_budget(u, extent)?;
    let n = product_grid(extent);
    let dim = u.dim();
    let gu = synthesize(u.coeffs(), &u.shape(), n);
    let gv = synthesize(v.coeffs(), &v.shape(), n);
    let grid: Vec<Complex64> = gu.iter().zip(&gv).map(|(a, b)| a * b).collect();
    let shape = BoxShape::new(dim, extent);
    let out = FourierField::from_coeffs(*u.spec(), extent, analyze(grid, n, &shape));
    Ok(match target {
        Some(t) => out.with_extent(t),
        None => out,
    })
}

/// Plain double-sum convolution. Quadratic cost; used as a reference.
pub fn convolve_direct(u: &FourierField, v: &FourierField) -> Result<FourierField> {
    u.ensure_same_spec(v)?;
    let extent = u.extent() + v.extent();
    let out_shape = BoxShape::new(u.dim(), extent);
    let su = u.shape();
    let sv = v.shape();
    let mut out = vec![Complex64::default(); out_shape.len()];
    let mut a = vec![0i64; u.dim()];
    let mut b = vec![0i64; u.dim()];
    let mut sum = vec![0i64; u.dim()];
    for (i, cu) in u.coeffs().iter().enumerate() {
        if *cu == Complex64::default() {
            continue;
        }
        su.point_into(i, &mut a);
        for (k, cv) in v.coeffs().iter().enumerate() {
            sv.point_into(k, &mut b);
            for ((s, x), y) in sum.iter_mut().zip(&a).zip(&b) {
                *s = x + y;
            }
            out[out_shape.index_of(&sum).unwrap()] += cu * cv;
        }
    }
    Ok(FourierField::from_coeffs(*u.spec(), extent, out))
}

/// Coefficients of `u^a * conj(u)^b`, exact on extent `(a + b) E_u`.
pub fn monomial(u: &FourierField, a: u32, b: u32) -> Result<FourierField> {
    let degree = (a + b) as usize;
    let extent = degree * u.extent();
    check_budget(u, extent)?;
    let n = product_grid(extent);
    let mut grid = synthesize(u.coeffs(), &u.shape(), n);
    for z in grid.iter_mut() {
        *z = z.powu(a) * z.conj().powu(b);
    }
    let shape = BoxShape::new(u.dim(), extent);
    Ok(FourierField::from_coeffs(
        *u.spec(),
        extent,
        analyze(grid, n, &shape),
    ))
}

/// `sign * |u|^{2p} u`, computed alias-free as `u^{p+1} conj(u)^p`.
pub fn power_nonlinearity(u: &FourierField, p: u32, sign: i32) -> Result<FourierField> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be positive".into()));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {sign}")));
    }
    let out = monomial(u, p + 1, p)?;
    Ok(if sign < 0 { -&out } else { out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::field::relative_error;
    use crate::fourier::lattice::LatticeSpec;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(spec: LatticeSpec, seed: u64) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FourierField::from_fn(spec, |_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn deltas_convolve() {
        let spec = LatticeSpec::new(1, 4, 4).unwrap();
        let u = FourierField::mode(spec, &[3], c(1.0, 0.0)).unwrap();
        let v = FourierField::mode(spec, &[2], c(1.0, 0.0)).unwrap();
        let w = multiply(&u, &v, None).unwrap();
        assert!((w.get(&[5]) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(w.l2_sq() - 1.0 < 1e-14);
    }

    #[test]
    fn constants_square() {
        let spec = LatticeSpec::new(2, 3, 2).unwrap();
        let u = FourierField::mode(spec, &[0, 0], c(0.5, -1.5)).unwrap();
        let w = multiply(&u, &u, None).unwrap();
        assert!((w.get(&[0, 0]) - c(0.5, -1.5) * c(0.5, -1.5)).norm() < 1e-14);
    }

    #[test]
    fn fft_matches_direct_convolution() {
        for (dim, k) in [(1, 16), (1, 5), (2, 6)] {
            let spec = LatticeSpec::new(dim, k, 2).unwrap();
            let u = random_field(spec, 1);
            let v = random_field(spec, 2);
            let fast = multiply(&u, &v, None).unwrap();
            let slow = convolve_direct(&u, &v).unwrap();
            assert!(relative_error(&fast, &slow) < 1e-12);
        }
    }

    #[test]
    fn mismatched_specs_rejected() {
        let u = FourierField::zeros(LatticeSpec::new(1, 4, 2).unwrap());
        let v = FourierField::zeros(LatticeSpec::new(1, 5, 2).unwrap());
        assert!(matches!(multiply(&u, &v, None), Err(Error::SpecMismatch { .. })));
    }

    #[test]
    fn plane_wave_is_unimodular() {
        let spec = LatticeSpec::new(1, 4, 6).unwrap();
        let u = FourierField::mode(spec, &[3], c(1.0, 0.0)).unwrap();
        for sign in [1, -1] {
            let w = power_nonlinearity(&u, 2, sign).unwrap();
            assert!((w.get(&[3]) - c(sign as f64, 0.0)).norm() < 1e-13);
            assert!((w.l2_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_power() {
        let spec = LatticeSpec::new(1, 2, 4).unwrap();
        let z = c(0.3, 0.4);
        let u = FourierField::mode(spec, &[0], z).unwrap();
        let w = power_nonlinearity(&u, 1, -1).unwrap();
        assert!((w.get(&[0]) + z * z.norm_sqr()).norm() < 1e-15);
    }

    #[test]
    fn power_matches_dense_grid_evaluation() {
        let spec = LatticeSpec::new(1, 8, 6).unwrap();
        let u = random_field(spec, 7);
        let w = power_nonlinearity(&u, 2, 1).unwrap();
        // evaluate u on a dense grid with explicit exponentials
        let n = 2 * w.extent() + 1;
        let shape = u.shape();
        let grid: Vec<Complex64> = (0..n)
            .map(|g| {
                let x = 2.0 * std::f64::consts::PI * g as f64 / n as f64;
                let val: Complex64 = (0..shape.len())
                    .map(|i| u.coeffs()[i] * Complex64::from_polar(1.0, shape.point(i)[0] as f64 * x))
                    .sum();
                val * val.norm_sqr().powi(2)
            })
            .collect();
        let reference = FourierField::from_fn_with_extent(spec, w.extent(), |j| {
            grid.iter()
                .enumerate()
                .map(|(g, val)| {
                    let x = 2.0 * std::f64::consts::PI * g as f64 / n as f64;
                    val * Complex64::from_polar(1.0, -(j[0] as f64) * x)
                })
                .sum::<Complex64>()
                / n as f64
        });
        assert!(relative_error(&w, &reference) < 1e-11);
    }

    #[test]
    fn insufficient_padding_names_required_pad() {
        let spec = LatticeSpec::new(1, 4, 2).unwrap();
        let u = FourierField::mode(spec, &[1], c(1.0, 0.0)).unwrap();
        let err = power_nonlinearity(&u, 1, 1).unwrap_err();
        assert_eq!(
            err,
            Error::PaddingShortfall {
                extent: 12,
                budget: 8,
                required_pad: 3
            }
        );
    }
}
