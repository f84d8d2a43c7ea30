//! Change of variables `Phi(u) = I + G^{>N}(u)` acting on pairs `(v, v~)`.
//!
//! `G^{>N}(u)` is off-diagonal with entries `T_c^{>N} <D>^{-2}` and its
//! conjugate, where `c = sign * u^{p+1} conj(u)^{p-1} / 2` carries the sign of
//! the nonlinearity so that `G` cancels the off-diagonal term for either sign.
//!
//! All pair operators truncate their outputs to the working cube
//! `|j|_inf <= pad_factor * K`. For fields on the base lattice the forward map
//! is unaffected by this; the inverse is the exact inverse of the truncated
//! map.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::field::FourierField;
use crate::fourier::multiplier::{apply_multiplier, project, Side, Symbol};
use crate::fourier::norm::weighted;
use crate::paradiff::{paraproduct, CutoffSpec};
use crate::paralin::{symbol_a, symbol_c};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalizerParams {
    /// Truncation threshold, `N > R`.
    pub n: f64,
    /// Weight floor `R` of the norms the map is measured in.
    pub r: f64,
    pub cutoff: CutoffSpec,
    pub p: u32,
    pub sign: i32,
    pub neumann_tol: f64,
    pub neumann_max_terms: usize,
}

impl DiagonalizerParams {
    pub fn new(n: f64, r: f64, cutoff: CutoffSpec, p: u32, sign: i32) -> Result<Self> {
        let out = Self {
            n,
            r,
            cutoff,
            p,
            sign,
            neumann_tol: 1e-13,
            neumann_max_terms: 200,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 1.0) {
            return Err(Error::InvalidParameter(format!("R must exceed 1, got {}", self.r)));
        }
        if !(self.n > self.r) {
            return Err(Error::InvalidParameter(format!(
                "N = {} must exceed R = {}",
                self.n, self.r
            )));
        }
        if self.p == 0 {
            return Err(Error::InvalidParameter("p must be at least 1".into()));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::InvalidParameter("sign must be +1 or -1".into()));
        }
        if !(self.neumann_tol > 0.0) || self.neumann_max_terms == 0 {
            return Err(Error::InvalidParameter("Neumann tolerance and term budget must be positive".into()));
        }
        Ok(())
    }
}

/// `(plus, minus)`; a real-to-real pair has `minus = conj(plus)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairField {
    pub plus: FourierField,
    pub minus: FourierField,
}

impl PairField {
    pub fn new(plus: FourierField, minus: FourierField) -> Self {
        Self { plus, minus }
    }

    /// `U = (u, conj(u))`.
    pub fn real(u: &FourierField) -> Self {
        Self {
            plus: u.clone(),
            minus: u.conj(),
        }
    }

    pub fn is_real_to_real(&self, tol: f64) -> bool {
        let diff = &self.minus - &self.plus.conj();
        diff.max_abs() <= tol
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.plus + &other.plus, &self.minus + &other.minus)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.plus - &other.plus, &self.minus - &other.minus)
    }

    pub fn scale(&self, f: f64) -> Self {
        Self::new(&self.plus * f, &self.minus * f)
    }

    pub fn with_extent(&self, extent: usize) -> Self {
        Self::new(self.plus.with_extent(extent), self.minus.with_extent(extent))
    }

    pub fn l2_sq(&self) -> f64 {
        self.plus.l2_sq() + self.minus.l2_sq()
    }

    /// `(|plus|^2_{s,R} + |minus|^2_{s,R})^{1/2}`.
    pub fn weighted(&self, s: f64, r: f64) -> f64 {
        (weighted(&self.plus, s, r).powi(2) + weighted(&self.minus, s, r).powi(2)).sqrt()
    }
}

/// `sign * c(u)`.
pub fn signed_c(u: &FourierField, params: &DiagonalizerParams) -> Result<FourierField> {
    let c = symbol_c(u, params.p)?;
    Ok(if params.sign < 0 { -&c } else { c })
}

/// `T_c^{>N} <D>^{-2} h`.
pub fn truncated_smoothing(
    c: &FourierField,
    h: &FourierField,
    params: &DiagonalizerParams,
) -> Result<FourierField> {
    let smoothed = apply_multiplier(h, Symbol::Jap(-2.0))?;
    paraproduct(c, &project(&smoothed, params.n, Side::High), &params.cutoff)
}

fn working_extent(u: &FourierField) -> usize {
    u.spec().budget()
}

/// `G^{>N}` with a precomputed symbol, truncated to the working cube.
fn gmap_with(c: &FourierField, v: &PairField, params: &DiagonalizerParams, cap: usize) -> Result<PairField> {
    let plus = truncated_smoothing(c, &v.minus, params)?;
    let minus = truncated_smoothing(&c.conj(), &v.plus, params)?;
    Ok(PairField::new(plus.with_extent(cap), minus.with_extent(cap)))
}

/// `G^{>N}(u) V`.
pub fn gmap_apply(u: &FourierField, v: &PairField, params: &DiagonalizerParams) -> Result<PairField> {
    let c = signed_c(u, params)?;
    gmap_with(&c, v, params, working_extent(u))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `I + G`
    Forward,
    /// `I - G`
    Gamma,
}

pub fn phi_apply(
    u: &FourierField,
    v: &PairField,
    params: &DiagonalizerParams,
    direction: Direction,
) -> Result<PairField> {
    let g = gmap_apply(u, v, params)?;
    let base = v.with_extent(working_extent(u));
    Ok(match direction {
        Direction::Forward => base.add(&g),
        Direction::Gamma => base.sub(&g),
    })
}

/// Outcome of a Neumann inversion.
#[derive(Clone, Debug)]
pub struct InverseReport {
    pub value: PairField,
    /// Estimated contraction factor of `Q = Gamma Phi - I`.
    pub contraction: f64,
    pub terms: usize,
}

/// `Phi(u)^{-1} V = (I + Q)^{-1} Gamma V` with `Q = Gamma Phi - I = -G^2`,
/// summed as a Neumann series after checking that `Q` contracts.
pub fn phi_inverse_apply(
    u: &FourierField,
    v: &PairField,
    params: &DiagonalizerParams,
) -> Result<InverseReport> {
    params.validate()?;
    let cap = working_extent(u);
    let c = signed_c(u, params)?;
    let q = |x: &PairField| -> Result<PairField> {
        let g1 = gmap_with(&c, x, params, cap)?;
        Ok(gmap_with(&c, &g1, params, cap)?.scale(-1.0))
    };
    let gv = gmap_with(&c, v, params, cap)?;
    let rhs = v.with_extent(cap).sub(&gv);

    // power iteration on the right-hand side for the contraction estimate
    let mut probe = rhs.clone();
    let mut contraction = 0.0;
    for _ in 0..6 {
        let before = probe.l2_sq().sqrt();
        if before == 0.0 {
            break;
        }
        probe = q(&probe)?.scale(1.0 / before);
        contraction = probe.l2_sq().sqrt();
    }
    if contraction >= 1.0 {
        return Err(Error::NonContractive {
            factor: contraction,
            threshold: params.n,
        });
    }

    let mut sum = rhs.clone();
    let mut term = rhs;
    let mut last_ratio = 0.0;
    for n in 1..=params.neumann_max_terms {
        let next = q(&term)?.scale(-1.0);
        let size = next.l2_sq().sqrt();
        let prev = term.l2_sq().sqrt();
        if prev > 0.0 {
            last_ratio = size / prev;
        }
        sum = sum.add(&next);
        term = next;
        if size <= params.neumann_tol * sum.l2_sq().sqrt() {
            return Ok(InverseReport {
                value: sum,
                contraction,
                terms: n,
            });
        }
    }
    Err(Error::NeumannNotConverged {
        tol: params.neumann_tol,
        terms: params.neumann_max_terms,
        ratio: last_ratio,
    })
}

/// `w = u + T_c^{>N} <D>^{-2} conj(u)`, the first component of `Phi(u) U`.
pub fn w_transform(u: &FourierField, params: &DiagonalizerParams) -> Result<FourierField> {
    let c = signed_c(u, params)?;
    let corr = truncated_smoothing(&c, &u.conj(), params)?;
    Ok(u + &corr)
}

/// Modified energy `E_s = |w|^2_{s,R}`.
pub fn modified_energy(u: &FourierField, s: f64, params: &DiagonalizerParams) -> Result<f64> {
    Ok(weighted(&w_transform(u, params)?, s, params.r).powi(2))
}

/// `(T_b + G(u)) h` with `G(u) = T_c^{>N}<D>^{-2} Delta + Delta T_c^{>N}<D>^{-2}`
/// and `b = 2c`, both carrying the sign of the nonlinearity.
pub fn cancellation_residual(
    u: &FourierField,
    h: &FourierField,
    params: &DiagonalizerParams,
) -> Result<FourierField> {
    let c = signed_c(u, params)?;
    let b = &c * 2.0;
    let tb = paraproduct(&b, h, &params.cutoff)?;
    let inner = truncated_smoothing(&c, &apply_multiplier(h, Symbol::Laplacian)?, params)?;
    let outer = apply_multiplier(&truncated_smoothing(&c, h, params)?, Symbol::Laplacian)?;
    Ok(&(&tb + &inner) + &outer)
}

/// The uncancelled off-diagonal term `T_b h` for comparison.
pub fn offdiagonal_term(
    u: &FourierField,
    h: &FourierField,
    params: &DiagonalizerParams,
) -> Result<FourierField> {
    let b = &signed_c(u, params)? * 2.0;
    paraproduct(&b, h, &params.cutoff)
}

/// `D_t w - (-i Delta w + sign i T_a w)` with a centered difference in time.
pub fn w_equation_residual(
    u_prev: &FourierField,
    u_now: &FourierField,
    u_next: &FourierField,
    dt: f64,
    params: &DiagonalizerParams,
) -> Result<FourierField> {
    let i = Complex64::i();
    let w_prev = w_transform(u_prev, params)?;
    let w_next = w_transform(u_next, params)?;
    let w = w_transform(u_now, params)?;
    let dtw = &(&w_next - &w_prev) * (0.5 / dt);
    let a = symbol_a(u_now, params.p)?;
    let ta_w = paraproduct(&a, &w, &params.cutoff)?;
    let lap = apply_multiplier(&w, Symbol::Laplacian)?;
    let rhs = &lap.scale(-i) + &ta_w.scale(i * params.sign as f64);
    Ok(&dtw - &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::field::relative_error;
    use crate::fourier::lattice::LatticeSpec;
    use crate::fourier::multiplier::{jap, norm_sq};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(spec: LatticeSpec, seed: u64, amp: f64) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FourierField::from_fn(spec, |j| {
            let decay = amp / (1.0 + norm_sq(j) as f64);
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * decay
        })
    }

    fn params(n: f64) -> DiagonalizerParams {
        DiagonalizerParams::new(n, 2.0, CutoffSpec::new(0.2).unwrap(), 1, 1).unwrap()
    }

    #[test]
    fn params_require_n_above_r() {
        assert!(DiagonalizerParams::new(2.0, 2.0, CutoffSpec::default(), 1, 1).is_err());
    }

    #[test]
    fn zero_state_is_identity() {
        let spec = LatticeSpec::new(1, 8, 4).unwrap();
        let u = FourierField::zeros(spec);
        let v = PairField::real(&random_field(spec, 1, 1.0));
        let p = params(3.0);
        assert_eq!(gmap_apply(&u, &v, &p).unwrap().l2_sq(), 0.0);
        let fwd = phi_apply(&u, &v, &p, Direction::Forward).unwrap();
        assert!(relative_error(&fwd.plus, &v.plus) == 0.0);
        let inv = phi_inverse_apply(&u, &v, &p).unwrap();
        assert!(relative_error(&inv.value.plus, &v.plus) == 0.0);
        assert_eq!(w_transform(&u, &p).unwrap().l2_sq(), 0.0);
        let h = random_field(spec, 2, 1.0);
        assert_eq!(cancellation_residual(&u, &h, &p).unwrap().l2_sq(), 0.0);
    }

    #[test]
    fn low_minus_component_gives_zero_plus_output() {
        let spec = LatticeSpec::new(1, 16, 4).unwrap();
        let u = random_field(spec, 3, 1.0);
        let p = params(5.0);
        let low = project(&random_field(spec, 4, 1.0), 5.0, Side::Low);
        let v = PairField::new(random_field(spec, 5, 1.0), low);
        let g = gmap_apply(&u, &v, &p).unwrap();
        assert_eq!(g.plus.l2_sq(), 0.0);
        // u supported below N leaves w = u
        let u_low = project(&u, 5.0, Side::Low);
        assert_eq!(w_transform(&u_low, &p).unwrap(), u_low.with_extent(w_transform(&u_low, &p).unwrap().extent()));
    }

    #[test]
    fn real_to_real_preserved() {
        let spec = LatticeSpec::new(2, 6, 4).unwrap();
        let u = random_field(spec, 6, 2.0);
        let v = PairField::real(&random_field(spec, 7, 1.0));
        let p = params(2.5);
        for dir in [Direction::Forward, Direction::Gamma] {
            assert!(phi_apply(&u, &v, &p, dir).unwrap().is_real_to_real(1e-15));
        }
        assert!(phi_inverse_apply(&u, &v, &p).unwrap().value.is_real_to_real(1e-14));
    }

    #[test]
    fn inverse_round_trip() {
        let spec = LatticeSpec::new(1, 16, 4).unwrap();
        for sign in [1, -1] {
            let u = random_field(spec, 8, 4.0);
            let v = PairField::new(random_field(spec, 9, 1.0), random_field(spec, 10, 1.0));
            let mut p = params(2.5);
            p.sign = sign;
            let fwd = phi_apply(&u, &v, &p, Direction::Forward).unwrap();
            let back = phi_inverse_apply(&u, &fwd, &p).unwrap();
            let err = back.value.sub(&v.with_extent(back.value.plus.extent()));
            assert!(err.weighted(2.0, 2.0) <= 1e-10 * v.weighted(2.0, 2.0));
            assert!(back.contraction < 1.0);
        }
    }

    #[test]
    fn large_state_is_not_contractive() {
        let spec = LatticeSpec::new(1, 16, 4).unwrap();
        let u = FourierField::mode(spec, &[0], c(40.0, 0.0)).unwrap();
        let v = PairField::real(&random_field(spec, 11, 1.0));
        let mut n = 16.0;
        let err = loop {
            match phi_inverse_apply(&u, &v, &params(n)) {
                Ok(_) => n /= 2.0,
                Err(e) => break e,
            }
            assert!(n > 2.0, "never failed");
        };
        match err {
            Error::NonContractive { factor, .. } => assert!(factor >= 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_mode_cancellation_kernel() {
        // c at m, h at k with |k| > N
        let spec = LatticeSpec::new(1, 24, 4).unwrap();
        let p = params(5.0);
        let (m, k) = (1i64, 12i64);
        // u = alpha e^{i x}/... : for p = 1, c = u^2 / 2, so u at m/2 is not a lattice
        // point; build c directly instead and compare against the kernel formula
        let c_field = FourierField::mode(spec, &[m], c(0.3, 0.1)).unwrap();
        let h = FourierField::mode(spec, &[k], c(0.0, 1.0)).unwrap();
        let b = &c_field * 2.0;
        let tb = paraproduct(&b, &h, &p.cutoff).unwrap();
        let inner = truncated_smoothing(&c_field, &apply_multiplier(&h, Symbol::Laplacian).unwrap(), &p).unwrap();
        let outer = apply_multiplier(&truncated_smoothing(&c_field, &h, &p).unwrap(), Symbol::Laplacian).unwrap();
        let total = &(&tb + &inner) + &outer;
        let chi = p.cutoff.weight(&[m], &[k]);
        let jk = jap(&[k]).powi(2);
        let expected = c(0.3, 0.1) * c(0.0, 1.0) * chi * (2.0 - ((k * k + (m + k) * (m + k)) as f64) / jk);
        assert!((total.get(&[m + k]) - expected).norm() < 1e-14);
    }

    #[test]
    fn plane_wave_w_residual() {
        let spec = LatticeSpec::new(1, 8, 4).unwrap();
        let c0 = c(0.2, 0.1);
        let j = 6i64;
        let p = params(3.0);
        let omega = (j * j) as f64 + c0.norm_sqr();
        let at = |t: f64| FourierField::mode(spec, &[j], c0 * Complex64::from_polar(1.0, omega * t)).unwrap();
        let limit = at(0.0).scale(c(0.0, -c0.norm_sqr()));
        let mut dt_part = Vec::new();
        for dt in [1e-3, 5e-4] {
            let r = w_equation_residual(&at(-dt), &at(0.0), &at(dt), dt, &p).unwrap();
            dt_part.push((&r - &limit).l2_sq().sqrt());
        }
        assert!(dt_part[0] < 1e-2);
        assert!((dt_part[0] / dt_part[1] - 4.0).abs() < 0.05);
    }
}
