//! Paralinearization of `|u|^{2p} u` and the symbols `a`, `b`, `c`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::field::FourierField;
use crate::fourier::multiplier::{apply_multiplier, Symbol};
use crate::fourier::product::{monomial, multiply, power_nonlinearity};
use crate::paradiff::{paraproduct, CutoffSpec};

/// `|u|^{2p} u = T_a u + T_b conj(u) + remainder`.
#[derive(Clone, Debug)]
pub struct ParalinParts {
    /// `a = (p + 1) |u|^{2p}`
    pub sym_a: FourierField,
    /// `b = p |u|^{2(p-1)} u^2`
    pub sym_b: FourierField,
    pub para_u: FourierField,
    pub para_ubar: FourierField,
    pub remainder: FourierField,
}

impl ParalinParts {
    pub fn sum(&self) -> FourierField {
        &(&self.para_u + &self.para_ubar) + &self.remainder
    }
}

fn check_p(p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    Ok(())
}

/// `a(u) = (p + 1)(u conj(u))^p`.
pub fn symbol_a(u: &FourierField, p: u32) -> Result<FourierField> {
    check_p(p)?;
    Ok(&monomial(u, p, p)? * (p as f64 + 1.0))
}

/// `b(u) = p u^{p+1} conj(u)^{p-1}`.
pub fn symbol_b(u: &FourierField, p: u32) -> Result<FourierField> {
    check_p(p)?;
    Ok(&monomial(u, p + 1, p - 1)? * p as f64)
}

pub fn paralinearize_power(u: &FourierField, p: u32, cutoff: &CutoffSpec) -> Result<ParalinParts> {
    let power = power_nonlinearity(u, p, 1)?;
    let sym_a = symbol_a(u, p)?;
    let sym_b = symbol_b(u, p)?;
    let para_u = paraproduct(&sym_a, u, cutoff)?;
    let para_ubar = paraproduct(&sym_b, &u.conj(), cutoff)?;
    let remainder = (&(&power - &para_u) - &para_ubar).with_extent(power.extent());
    Ok(ParalinParts {
        sym_a,
        sym_b,
        para_u,
        para_ubar,
        remainder,
    })
}

/// `c(u) = b(u) / (2p) = u^{p+1} conj(u)^{p-1} / 2`.
pub fn symbol_c(u: &FourierField, p: u32) -> Result<FourierField> {
    check_p(p)?;
    Ok(&monomial(u, p + 1, p - 1)? * 0.5)
}

/// Right-hand side `-i Delta u + sign i |u|^{2p} u`.
pub fn nls_rhs(u: &FourierField, p: u32, sign: i32) -> Result<FourierField> {
    let i = Complex64::i();
    let lap = apply_multiplier(u, Symbol::Laplacian)?;
    let nonlin = power_nonlinearity(u, p, sign)?;
    Ok(&lap.scale(-i) + &nonlin.scale(i))
}

/// `d/dt c(u(t))` along the flow, by the chain rule on `u^{p+1} conj(u)^{p-1} / 2`.
pub fn dt_symbol_c(u: &FourierField, p: u32, sign: i32) -> Result<FourierField> {
    check_p(p)?;
    let ut = nls_rhs(u, p, sign)?;
    let first = multiply(&monomial(u, p, p - 1)?, &ut, None)?;
    let mut out = &first * (0.5 * (p as f64 + 1.0));
    if p >= 2 {
        let second = multiply(&monomial(u, p + 1, p - 2)?, &ut.conj(), None)?;
        out = &out + &(&second * (0.5 * (p as f64 - 1.0)));
    }
    Ok(out)
}
