//! Empirical constants: the tame constant `M` and the equivalence constant
//! `C` of `C^{-ps}|u|_s <= |w|_s <= C^{ps}|u|_s`.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::sample::{sample_field, Family};
use crate::diagonalizer::{w_transform, DiagonalizerParams};
use crate::error::{Error, Result};
use crate::fourier::field::FourierField;
use crate::fourier::lattice::LatticeSpec;
use crate::fourier::norm::{hs_sum, weighted};
use crate::fourier::product::monomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TameEstimate {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Largest root per `(q1, q2)`.
    pub per_pair: Vec<(u32, u32, f64)>,
}

/// Exponent pairs `(q1, q2)` probed for a nonlinearity of degree `2p + 1`.
pub fn q_pairs(p: u32) -> Vec<(u32, u32)> {
    let mut v = vec![(p + 1, p), (p, p), (p + 1, p - 1)];
    v.dedup();
    v.retain(|(a, b)| a + b >= 2);
    v
}

/// Lattice with room for monomials of degree `2p + 1`.
pub(crate) fn estimator_lattice(cfg: &ExperimentConfig) -> Result<LatticeSpec> {
    LatticeSpec::new(cfg.d, cfg.k, cfg.pad_factor.max(2 * cfg.p as usize + 1))
}

pub(crate) fn smooth_samples(cfg: &ExperimentConfig, spec: LatticeSpec, count: usize) -> Vec<FourierField> {
    let decay = cfg.s + cfg.d as f64 / 2.0 + 1.0;
    (0..count)
        .map(|i| {
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let family = if i % 2 == 0 { Family::Decaying { decay } } else { Family::Low };
            sample_field(spec, family, seed)
        })
        .collect()
}

struct Probe {
    q: (u32, u32),
    u: usize,
    mono: FourierField,
}

fn m_hat(cfg: &ExperimentConfig, fields: &[FourierField], probes: &[Probe], r: f64) -> Vec<f64> {
    let mut best = vec![0.0f64; probes.len()];
    for (k, pr) in probes.iter().enumerate() {
        let u = &fields[pr.u];
        let deg = (pr.q.0 + pr.q.1 - 1) as f64;
        let us = weighted(u, cfg.s, r);
        let ratio = weighted(&pr.mono, cfg.s, r) / (weighted(u, cfg.s0, r).powf(deg) * us);
        best[k] = ratio.powf(1.0 / (deg * cfg.s));
    }
    best
}

/// `M = max (|u^{q1} conj(u)^{q2}|_{s,R} / (|u|^{q1+q2-1}_{s0,R} |u|_{s,R}))^{1/((q1+q2-1)s)}`
/// over the samples and the pairs of [`q_pairs`]. With `r = None` the weight
/// floor is the fixed point `R = 2M(R)`, found by bisection.
pub fn estimate_tame_constant(cfg: &ExperimentConfig, samples: usize, r: Option<f64>) -> Result<TameEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample required".into()));
    }
    let spec = estimator_lattice(cfg)?;
    let fields = smooth_samples(cfg, spec, samples);
    let mut probes = Vec::new();
    for (i, u) in fields.iter().enumerate() {
        for q in q_pairs(cfg.p) {
            probes.push(Probe {
                q,
                u: i,
                mono: monomial(u, q.0, q.1)?,
            });
        }
    }
    let max_of = |r: f64| m_hat(cfg, &fields, &probes, r).into_iter().fold(0.0, f64::max);
    let r = match r {
        Some(r) => r,
        None => {
            let g = |r: f64| r - 2.0 * max_of(r);
            let mut lo = 1.0 + 1e-9;
            if g(lo) >= 0.0 {
                lo
            } else {
                let mut hi = 2.0;
                while g(hi) < 0.0 {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e9 {
                        return Err(Error::InvalidParameter("no fixed point R = 2M(R) below 1e9".into()));
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-13 * hi {
                        break;
                    }
                }
                hi
            }
        }
    };
    let roots = m_hat(cfg, &fields, &probes, r);
    let mut per_pair: Vec<(u32, u32, f64)> = q_pairs(cfg.p).into_iter().map(|q| (q.0, q.1, 0.0)).collect();
    for (pr, v) in probes.iter().zip(&roots) {
        let slot = per_pair.iter_mut().find(|e| (e.0, e.1) == pr.q).unwrap();
        slot.2 = slot.2.max(*v);
    }
    let m = roots.into_iter().fold(0.0, f64::max);
    Ok(TameEstimate { m, r, per_pair })
}

/// `C = max (max(|w|_q/|u|_q, |u|_q/|w|_q))^{1/(pq)}` over `q in {s0, s1, s}`,
/// on samples scaled to `||u||_{H^{s1}} = eps`.
pub fn estimate_w_constant(cfg: &ExperimentConfig, r: f64, n: f64, samples: usize) -> Result<f64> {
    let spec = estimator_lattice(cfg)?;
    let params = DiagonalizerParams::new(n, r, cfg.cutoff, cfg.p, cfg.sign)?;
    let mut c = 1.0f64;
    for u in smooth_samples(cfg, spec, samples) {
        let u = &u * (cfg.eps / hs_sum(&u, cfg.s1));
        let w = w_transform(&u, &params)?;
        for q in [cfg.s0, cfg.s1, cfg.s] {
            let (a, b) = (weighted(&w, q, r), weighted(&u, q, r));
            let ratio = (a / b).max(b / a);
            c = c.max(ratio.powf(1.0 / (cfg.p as f64 * q)));
        }
    }
    Ok(c)
}
