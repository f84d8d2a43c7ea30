//! Empirical certification of the operator inequalities.
//!
//! Every id evaluates `LHS / RHS` (without the unknown absolute constant) on
//! a fixed family of sample fields at several lattice sizes. Exact
//! inequalities must hold with ratio at most `1 + 1e-12`; the others must
//! show a normalized constant that does not grow with `K` and stays under
//! a ceiling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Resolved};
use super::sample::{sample_field, Family};
use crate::diagonalizer::{
    cancellation_residual, gmap_apply, offdiagonal_term, phi_inverse_apply, w_transform, DiagonalizerParams, PairField,
};
use crate::error::{Error, Result};
use crate::fourier::field::FourierField;
use crate::fourier::lattice::LatticeSpec;
use crate::fourier::multiplier::{apply_multiplier, Side, Symbol};
use crate::fourier::norm::{hs_sum, l2, weighted};
use crate::fourier::product::{multiply, power_nonlinearity};
use crate::paradiff::{
    bony_decompose, commutator_jjap, paraproduct, paraproduct_truncated, regularizing_remainder, CutoffSpec,
};
use crate::paralin::paralinearize_power;

pub const REGISTRY: [&str; 18] = [
    "EQNORM", "INTERP", "SCALE", "ACTION", "REGREM", "PROD", "TAME", "COMM", "COMP1", "COMP2", "COMP3", "TRUNC",
    "POWER", "PARALIN", "GMAP", "PHIINV", "WEQUIV", "CANCEL",
];

/// Exact ids tolerate this much rounding above ratio 1.
pub const EXACT_TOL: f64 = 1e-12;
/// Largest admissible log-log slope of a bounded constant.
pub const MAX_SLOPE: f64 = 0.1;
/// Accepted slope window for the `N^{-1}` decay of `TRUNC`.
pub const TRUNC_SLOPE: (f64, f64) = (-1.2, -0.8);
/// Smallest slope of the uncancelled term `T_b` for `CANCEL`.
pub const CONTRAST_SLOPE: f64 = 0.8;

/// Smoothing gain used by `REGREM`, `PROD`, `COMP3` and `PARALIN`.
const RHO: f64 = 2.0;
/// `|u|_{s0,R}` of the fields fed to the change of variables.
const DIAG_SIZE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegistryOptions {
    pub d: usize,
    pub p: u32,
    pub sign: i32,
    pub s0: f64,
    /// Regularity `s` at which the inequalities are probed.
    pub s: f64,
    pub r: f64,
    /// Diagonalizer threshold.
    pub n: f64,
    pub cutoff: CutoffSpec,
    /// Lattice sizes for the trend.
    pub ks: Vec<usize>,
    /// Thresholds for `TRUNC`.
    pub truncation_ns: Vec<f64>,
    /// Samples per field family.
    pub samples: usize,
    pub seed: u64,
}

impl RegistryOptions {
    pub fn from_config(cfg: &ExperimentConfig, res: &Resolved) -> Self {
        Self {
            d: cfg.d,
            p: cfg.p,
            sign: cfg.sign,
            s0: cfg.s0,
            s: cfg.s1,
            r: res.r,
            n: 2.0 * res.r,
            cutoff: cfg.cutoff,
            ks: vec![16, 32, 64],
            truncation_ns: vec![8.0, 16.0, 32.0, 64.0],
            samples: 4,
            seed: cfg.seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ks.len() < 3 || self.truncation_ns.len() < 3 {
            return Err(Error::InvalidParameter("trends need at least 3 lattice sizes".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("at least one sample per family required".into()));
        }
        if !(self.s >= self.s0 + RHO) {
            return Err(Error::InvalidParameter(format!("probe regularity s must be at least s0 + {RHO}")));
        }
        Ok(())
    }

    fn lattice(&self, k: usize) -> Result<LatticeSpec> {
        LatticeSpec::new(self.d, k, 2 * self.p as usize + 2)
    }

    fn diagonalizer(&self) -> Result<DiagonalizerParams> {
        DiagonalizerParams::new(self.n, self.r, self.cutoff, self.p, self.sign)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Criterion {
    /// Every ratio at most `1 + EXACT_TOL`.
    Exact,
    /// Slope at most `MAX_SLOPE` and normalized constant at most `ceiling`.
    Bounded { ceiling: f64 },
    /// Slope inside `[lo, hi]`.
    Decay { lo: f64, hi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub id: String,
    /// Samples per scale.
    pub samples: usize,
    /// `K`, or `N` for `TRUNC`.
    pub scales: Vec<f64>,
    /// Largest raw ratio per scale.
    pub max_ratio: Vec<f64>,
    /// Largest raw ratio to the power `1 / exponent`.
    pub normalized: Vec<f64>,
    pub exponent: f64,
    pub max_normalized: f64,
    /// Least-squares slope of `log normalized` against `log scale`.
    pub slope: f64,
    pub criterion: Criterion,
    /// `CANCEL` only: slope of the uncancelled `T_b` ratio.
    pub contrast_slope: Option<f64>,
    pub contrast_ratio: Option<Vec<f64>>,
    pub pass: bool,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Criterion and normalization exponent per id.
fn rule(id: &str, opts: &RegistryOptions) -> (Criterion, f64) {
    let two_ps = 2.0 * opts.p as f64 * opts.s;
    let bounded = |c| Criterion::Bounded { ceiling: c };
    match id {
        "EQNORM" | "INTERP" | "SCALE" => (Criterion::Exact, 1.0),
        "TRUNC" => (
            Criterion::Decay {
                lo: TRUNC_SLOPE.0,
                hi: TRUNC_SLOPE.1,
            },
            1.0,
        ),
        "TAME" => (bounded(10.0), opts.s),
        "POWER" | "PARALIN" | "GMAP" => (bounded(10.0), two_ps),
        "WEQUIV" => (bounded(10.0), opts.p as f64 * opts.s),
        _ => (bounded(100.0), 1.0),
    }
}

struct Sample {
    a: FourierField,
    h: FourierField,
}

fn samples_at(opts: &RegistryOptions, spec: LatticeSpec) -> Vec<Sample> {
    let k = spec.k_max as f64;
    let decay = opts.s + opts.d as f64 / 2.0 + 1.0;
    let smooth = Family::Decaying { decay };
    let high = Family::Annulus { lo: k / 2.0, hi: k };
    let pairs = [(Family::Low, high), (smooth, smooth), (Family::Low, smooth), (smooth, high)];
    let mut out = Vec::new();
    for (f, (fa, fh)) in pairs.iter().enumerate() {
        for i in 0..opts.samples {
            let seed = opts.seed.wrapping_mul(7919).wrapping_add((100 * f + i) as u64);
            out.push(Sample {
                a: sample_field(spec, *fa, 2 * seed),
                h: sample_field(spec, *fh, 2 * seed + 1),
            });
        }
    }
    out
}

fn jap(u: &FourierField, m: f64) -> Result<FourierField> {
    apply_multiplier(u, Symbol::Jap(m))
}

/// `(ratio, contrast)` for one sample; `contrast` is only set for `CANCEL`.
fn evaluate(id: &str, opts: &RegistryOptions, smp: &Sample) -> Result<(f64, Option<f64>)> {
    let (s0, s, r) = (opts.s0, opts.s, opts.r);
    let w = |u: &FourierField, q: f64| weighted(u, q, r);
    let (a, h) = (&smp.a, &smp.h);
    let cut = &opts.cutoff;
    let p2 = 2 * opts.p as i32;
    let ratio = match id {
        "EQNORM" => {
            let mut worst = 0.0f64;
            for u in [a, h] {
                for q in [s0, s] {
                    let lit = hs_sum(u, q) + r.powf(q) * l2(u);
                    let wq = w(u, q);
                    worst = worst.max(lit / (3.0 * wq)).max(wq / lit);
                }
            }
            worst
        }
        "INTERP" => {
            let (lo, hi) = (s0, s + 1.0);
            let mid = 0.5 * (lo + hi);
            [a, h]
                .iter()
                .map(|u| w(u, mid) / (2.0 * w(u, lo).sqrt() * w(u, hi).sqrt()))
                .fold(0.0, f64::max)
        }
        "SCALE" => [a, h]
            .iter()
            .map(|u| w(u, s0) * r.powf(s - s0) / w(u, s))
            .fold(0.0, f64::max),
        "ACTION" => w(&paraproduct(a, h, cut)?, s) / (w(a, s0) * w(h, s)),
        "REGREM" => {
            let rem = regularizing_remainder(a, h, 0.2, 0.1)?;
            w(&rem, s + RHO) / (w(h, s) * w(a, s0 + RHO))
        }
        "PROD" => {
            let parts = bony_decompose(a, h, cut)?;
            w(&parts.remainder, s + RHO) / (w(a, s0 + RHO) * w(h, s))
        }
        "TAME" => {
            let ab = multiply(a, h, None)?;
            w(&ab, s) / (w(a, s) * w(h, s0) + w(a, s0) * w(h, s))
        }
        "COMM" => {
            let m = 2.0;
            let left = w(&jap(&paraproduct(a, h, cut)?, -m)?, s + m) + w(&paraproduct(a, &jap(h, -m)?, cut)?, s + m);
            let first = left / (r.powf(m) * w(a, s0) * w(h, s));
            let comm = commutator_jjap(m, a, h, r, cut)?;
            let second = w(&comm, s + 1.0 - m) / (r.powf(m) * w(a, s0 + 1.0) * w(h, s));
            first.max(second)
        }
        "COMP1" => {
            let b = a.conj();
            let inner = jap(&paraproduct(&b, &jap(h, -1.0)?, cut)?, -1.0)?;
            let out = paraproduct(a, &inner, cut)?;
            w(&out, s + 2.0) / (r * r * w(a, s0) * w(&b, s0) * w(h, s))
        }
        "COMP2" => {
            let b = a.conj();
            let ab = multiply(a, &b, None)?;
            let diff = &paraproduct(a, &paraproduct(&b, h, cut)?, cut)? - &paraproduct(&ab, h, cut)?;
            let rho = 1.0;
            w(&diff, s + rho) / (w(a, s0 + rho) * w(&b, s0 + rho) * w(h, s))
        }
        "COMP3" => {
            let b = a.conj();
            let q_of = |x: &FourierField| -> Result<FourierField> { Ok(bony_decompose(&b, x, cut)?.remainder) };
            let left = paraproduct(a, &q_of(h)?, cut)?;
            let right = q_of(&paraproduct(a, h, cut)?)?;
            (w(&left, s + RHO) + w(&right, s + RHO)) / (w(&b, s0 + RHO) * w(a, s0) * w(h, s))
        }
        "POWER" => {
            let u = a + h;
            let pw = power_nonlinearity(&u, opts.p, 1)?;
            w(&pw, s) / (w(&u, s0).powi(p2) * w(&u, s))
        }
        "PARALIN" => {
            let u = a + h;
            let parts = paralinearize_power(&u, opts.p, cut)?;
            w(&parts.remainder, s + RHO) / (w(&u, s0 + RHO).powi(p2) * w(&u, s))
        }
        "GMAP" => {
            let params = opts.diagonalizer()?;
            let u = a * (DIAG_SIZE / w(a, s0));
            let v = PairField::new(h.clone(), h.conj());
            let g = gmap_apply(&u, &v, &params)?;
            g.weighted(s + 2.0, r) / (w(&u, s0).powi(p2) * v.weighted(s, r))
        }
        "PHIINV" => {
            let params = opts.diagonalizer()?;
            let u = a * (DIAG_SIZE / w(a, s0));
            let v = PairField::new(h.clone(), h.conj());
            let inv = phi_inverse_apply(&u, &v, &params)?;
            inv.value.weighted(s, r) / (v.weighted(s, r) * (1.0 + w(&u, s0).powi(p2)))
        }
        "WEQUIV" => {
            let params = opts.diagonalizer()?;
            let mix = a + h;
            let u = &mix * (DIAG_SIZE / w(&mix, s0));
            let wt = w_transform(&u, &params)?;
            let (x, y) = (w(&wt, s), w(&u, s));
            (x / y).max(y / x)
        }
        "CANCEL" => {
            let params = opts.diagonalizer()?;
            let u = a * (DIAG_SIZE / w(a, s0 + 1.0));
            let den = w(&u, s0 + 1.0).powi(p2) * w(h, s);
            let res = cancellation_residual(&u, h, &params)?;
            let tb = offdiagonal_term(&u, h, &params)?;
            return Ok((w(&res, s + 1.0) / den, Some(w(&tb, s + 1.0) / den)));
        }
        other => return Err(Error::UnknownId(other.into())),
    };
    Ok((ratio, None))
}

/// `|T_a^{>N} <D>^{-2} h|_{s+1} / (R^2 |a|_{s0} |h|_s)` with `h` just above `N`.
fn truncation_ratio(opts: &RegistryOptions, n: f64, index: usize) -> Result<f64> {
    let nmax = opts.truncation_ns.iter().cloned().fold(0.0, f64::max);
    let spec = opts.lattice((2.0 * nmax).ceil() as usize)?;
    let seed = opts.seed.wrapping_mul(104_729).wrapping_add(index as u64);
    let family = if index % 2 == 0 {
        Family::Low
    } else {
        Family::Decaying {
            decay: opts.s + opts.d as f64 / 2.0 + 1.0,
        }
    };
    let a = sample_field(spec, family, 2 * seed);
    let h = sample_field(spec, Family::Annulus { lo: n, hi: 2.0 * n }, 2 * seed + 1);
    let out = paraproduct_truncated(&a, &jap(&h, -2.0)?, n, Side::High, &opts.cutoff)?;
    let (s0, s, r) = (opts.s0, opts.s, opts.r);
    Ok(weighted(&out, s + 1.0, r) / (r * r * weighted(&a, s0, r) * weighted(&h, s, r)))
}

fn max_finite(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

pub fn inequality_check(id: &str, opts: &RegistryOptions) -> Result<RatioReport> {
    if !REGISTRY.contains(&id) {
        return Err(Error::UnknownId(id.into()));
    }
    opts.validate()?;
    let (criterion, exponent) = rule(id, opts);

    let (scales, per_scale, contrast): (Vec<f64>, Vec<Vec<f64>>, Option<Vec<f64>>) = if id == "TRUNC" {
        let count = 2 * opts.samples;
        let rows: Vec<Vec<f64>> = opts
            .truncation_ns
            .par_iter()
            .map(|&n| (0..count).map(|i| truncation_ratio(opts, n, i)).collect::<Result<Vec<f64>>>())
            .collect::<Result<_>>()?;
        (opts.truncation_ns.clone(), rows, None)
    } else {
        let rows: Vec<Vec<(f64, Option<f64>)>> = opts
            .ks
            .par_iter()
            .map(|&k| {
                let spec = opts.lattice(k)?;
                samples_at(opts, spec)
                    .par_iter()
                    .map(|smp| evaluate(id, opts, smp))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let ratios = rows.iter().map(|r| r.iter().map(|x| x.0).collect()).collect();
        let contrast = (id == "CANCEL").then(|| {
            rows.iter()
                .map(|r| max_finite(&r.iter().filter_map(|x| x.1).collect::<Vec<_>>()))
                .collect()
        });
        (opts.ks.iter().map(|&k| k as f64).collect(), ratios, contrast)
    };

    if per_scale.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{id}: non-finite ratio")));
    }
    let max_ratio: Vec<f64> = per_scale.iter().map(|v| max_finite(v)).collect();
    let normalized: Vec<f64> = max_ratio.iter().map(|x| x.powf(1.0 / exponent)).collect();
    let max_normalized = max_finite(&normalized);
    let slope = loglog_slope(&scales, &normalized);
    let contrast_slope = contrast.as_ref().map(|c| loglog_slope(&scales, c));
    let mut pass = match criterion {
        Criterion::Exact => max_ratio.iter().all(|x| *x <= 1.0 + EXACT_TOL),
        Criterion::Bounded { ceiling } => slope <= MAX_SLOPE && max_normalized <= ceiling,
        Criterion::Decay { lo, hi } => slope >= lo && slope <= hi,
    };
    if let Some(cs) = contrast_slope {
        pass &= cs >= CONTRAST_SLOPE;
    }
    Ok(RatioReport {
        id: id.into(),
        samples: per_scale.first().map(|v| v.len()).unwrap_or(0),
        scales,
        max_ratio,
        normalized,
        exponent,
        max_normalized,
        slope,
        criterion,
        contrast_slope,
        contrast_ratio: contrast,
        pass,
    })
}
