//! Initial data under the smallness conditions
//! `||u0||_{H^{s1}} <= eps` and `(2M)^{s1} ||u0||_{L^2} <= eps`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitialData, Resolved};
use crate::error::{Error, Result};
use crate::fourier::field::FourierField;
use crate::fourier::multiplier::norm;
use crate::fourier::norm::{hs_sum, l2};

/// Relative slack for data normalized exactly onto a limit.
const ROUNDING: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Flat,
    /// Amplitude `|j|^{-exponent}`.
    Decaying { exponent: f64 },
}

fn default_fraction() -> f64 {
    0.5
}

/// Random phases on the annulus `j_min <= |j| <= j_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub j_min: f64,
    pub j_max: f64,
    #[serde(default)]
    pub profile: Profile,
    /// `||u0||_{H^{s1}}` as a fraction of `eps`.
    #[serde(default = "default_fraction")]
    pub target_fraction: f64,
    /// Overrides the experiment seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl DataSpec {
    pub fn validate(&self, k: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.j_min >= 1.0) {
            return bad(format!("data.j_min must be at least 1, got {}", self.j_min));
        }
        if !(self.j_max >= self.j_min && self.j_max <= k as f64) {
            return bad(format!("data.j_max = {} must lie in [j_min, K = {k}]", self.j_max));
        }
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return bad(format!("data.target_fraction must lie in (0, 1], got {}", self.target_fraction));
        }
        if let Profile::Decaying { exponent } = self.profile {
            if !exponent.is_finite() {
                return bad("data.profile exponent must be finite".into());
            }
        }
        Ok(())
    }
}

/// Both smallness conditions and `delta = ||u0||_{H^{s1}} + (2M)^{s1} ||u0||_{L^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub eps: f64,
    pub hs1: f64,
    pub l2: f64,
    /// `(2M)^{s1} ||u0||_{L^2}`
    pub weighted_l2: f64,
    pub delta: f64,
    pub hs1_ok: bool,
    pub l2_ok: bool,
    /// `(2M)^{s1} ||u0||_{L^2}` above half of `eps`.
    pub l2_tight: bool,
}

impl Admissibility {
    pub fn evaluate(u: &FourierField, eps: f64, s1: f64, m: f64) -> Self {
        let hs1 = hs_sum(u, s1);
        let l2 = l2(u);
        let weighted_l2 = (2.0 * m).powf(s1) * l2;
        Self {
            eps,
            hs1,
            l2,
            weighted_l2,
            delta: hs1 + weighted_l2,
            hs1_ok: hs1 <= eps * (1.0 + ROUNDING),
            l2_ok: weighted_l2 <= eps * (1.0 + ROUNDING),
            l2_tight: weighted_l2 > 0.5 * eps,
        }
    }

    pub fn admissible(&self) -> bool {
        self.hs1_ok && self.l2_ok
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "||u0||_H^s1 = {:.6e} (limit {:.6e}, {}), (2M)^s1 ||u0||_L2 = {:.6e} (limit {:.6e}, {}), delta = {:.6e}",
            self.hs1,
            self.eps,
            if self.hs1_ok { "ok" } else { "violated" },
            self.weighted_l2,
            self.eps,
            if self.l2_ok { "ok" } else { "violated" },
            self.delta
        )
    }
}

/// Draws `u0` and rejects it if either smallness condition fails.
pub fn gen_initial_data(
    spec: &DataSpec,
    cfg: &ExperimentConfig,
    m: f64,
) -> Result<(FourierField, Admissibility)> {
    spec.validate(cfg.k)?;
    let lattice = cfg.lattice()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(cfg.seed));
    let raw = FourierField::from_fn(lattice, |j| {
        let r = norm(j);
        if r < spec.j_min || r > spec.j_max {
            return Complex64::default();
        }
        let amp = match spec.profile {
            Profile::Flat => 1.0,
            Profile::Decaying { exponent } => r.powf(-exponent),
        };
        Complex64::from_polar(amp, 2.0 * PI * rng.random::<f64>())
    });
    let h = hs_sum(&raw, cfg.s1);
    if h == 0.0 {
        return Err(Error::Inadmissible(format!(
            "annulus {} <= |j| <= {} holds no lattice points",
            spec.j_min, spec.j_max
        )));
    }
    let u = &raw * (spec.target_fraction * cfg.eps / h);
    let report = Admissibility::evaluate(&u, cfg.eps, cfg.s1, m);
    if !report.admissible() {
        return Err(Error::Inadmissible(report.to_string()));
    }
    Ok((u, report))
}

/// The configured initial datum with its admissibility report. Plane waves
/// are reported but never rejected.
pub fn initial_state(cfg: &ExperimentConfig, res: &Resolved) -> Result<(FourierField, Admissibility)> {
    match &cfg.data {
        InitialData::Random(spec) => gen_initial_data(spec, cfg, res.m),
        InitialData::PlaneWave { mode, amplitude } => {
            let u = FourierField::mode(cfg.lattice()?, mode, Complex64::new(*amplitude, 0.0))?;
            let report = Admissibility::evaluate(&u, cfg.eps, cfg.s1, res.m);
            Ok((u, report))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::preset;
    use crate::fourier::multiplier::jap;

    fn cfg_with(j_min: f64, j_max: f64, profile: Profile) -> (ExperimentConfig, DataSpec) {
        let mut cfg = preset("admissible_1d").unwrap();
        cfg.m = Some(2.0);
        let spec = DataSpec {
            j_min,
            j_max,
            profile,
            target_fraction: 1.0,
            seed: Some(5),
        };
        cfg.data = InitialData::Random(spec);
        (cfg, spec)
    }

    #[test]
    fn high_annulus_is_admissible() {
        let (cfg, spec) = cfg_with(8.0, 16.0, Profile::Flat);
        let (u, rep) = gen_initial_data(&spec, &cfg, 2.0).unwrap();
        assert!((rep.hs1 - 0.1).abs() < 1e-15);
        // independent oracle: ||u||_{L2} <= |j_min|^{-3} || |D|^3 u ||
        let mut top = 0.0;
        let mut low = 0.0;
        for (j, c) in u.nonzero() {
            top += (j[0] as f64).powi(6) * c.norm_sqr();
            low += c.norm_sqr();
        }
        assert!(low.sqrt() <= top.sqrt() / 512.0);
        assert!(64.0 * low.sqrt() <= 0.1 * 64.0 / 512.0 + 1e-15);
        assert!(rep.admissible() && !rep.l2_tight);
        assert!((rep.delta - (rep.hs1 + 64.0 * rep.l2)).abs() < 1e-15);
    }

    #[test]
    fn low_modes_violate_the_l2_condition() {
        let (cfg, spec) = cfg_with(1.0, 16.0, Profile::Decaying { exponent: 4.0 });
        match gen_initial_data(&spec, &cfg, 2.0) {
            Err(Error::Inadmissible(msg)) => assert!(msg.contains("violated")),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn flat_data_from_one_is_flagged_tight_or_rejected() {
        let (cfg, spec) = cfg_with(1.0, 4.0, Profile::Flat);
        match gen_initial_data(&spec, &cfg, 2.0) {
            Ok((_, rep)) => assert!(rep.l2_tight),
            Err(e) => assert!(matches!(e, Error::Inadmissible(_))),
        }
    }

    #[test]
    fn zero_j_min_is_a_config_error() {
        let (cfg, mut spec) = cfg_with(1.0, 4.0, Profile::Flat);
        spec.j_min = 0.0;
        assert!(matches!(gen_initial_data(&spec, &cfg, 2.0), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic_under_seed() {
        let (cfg, spec) = cfg_with(8.0, 16.0, Profile::Decaying { exponent: 1.0 });
        let a = gen_initial_data(&spec, &cfg, 2.0).unwrap().0;
        let b = gen_initial_data(&spec, &cfg, 2.0).unwrap().0;
        assert_eq!(a, b);
        assert!(a.nonzero().all(|(j, _)| jap(&j) > 8.0));
    }
}
