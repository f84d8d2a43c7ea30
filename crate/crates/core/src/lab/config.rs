//! Experiment configuration, validation and presets.
//!
//! Configurations are JSON objects; unknown keys are rejected. Keys:
//!
//! * `d`, `K`, `pad_factor`: lattice dimension, cutoff `|j|_inf <= K`, padding.
//! * `p`, `sign`: nonlinearity `sign |u|^{2p} u` (`sign = +1` is the equation
//!   with `+|u|^{2p}u` on the right of `u_t = -i Delta u + ...`).
//! * `s0`, `s1`, `s`: regularity ladder, dimensionless Sobolev indices.
//! * `eps`: smallness of the data, in the `H^{s1}` norm.
//! * `M`, `R`, `N`: tame constant, weight floor and diagonalizer threshold.
//!   Omitted values are estimated (`M`), set to `2M` (`R`) or to
//!   `max(C^{2ps}, 2R)` (`N`).
//! * `seed`: root of all randomness.
//! * `cutoff.eps`: paraproduct cutoff width.
//! * `data`: initial datum, `{"kind": "random", ...}` or `{"kind": "plane_wave", ...}`.
//! * `solver`: time step and horizon in units of the torus time variable.

use serde::{Deserialize, Serialize};

use super::bounds::t_good;
use super::data::DataSpec;
use super::estimate::{estimate_tame_constant, estimate_w_constant};
use crate::diagonalizer::DiagonalizerParams;
use crate::error::{Error, Result};
use crate::fourier::lattice::LatticeSpec;
use crate::paradiff::CutoffSpec;
use crate::solver::{Dealias, Guard, NormSet, Scheme, SolverConfig};

/// Smallest admissible lattice cutoff.
pub const MIN_K: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Random(DataSpec),
    PlaneWave { mode: Vec<i64>, amplitude: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub dt: f64,
    /// Final time; `None` integrates up to `T_good`.
    pub t_end: Option<f64>,
    pub scheme: Scheme,
    pub observe_every: usize,
    pub dealias: Dealias,
    /// Escape level for `|u|_{s1,R}`; `None` uses `2 delta`.
    pub guard_level: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: None,
            scheme: Scheme::Strang,
            observe_every: 10,
            dealias: Dealias::Project,
            guard_level: None,
        }
    }
}

fn default_sign() -> i32 {
    1
}

fn default_samples() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub p: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub pad_factor: usize,
    pub s0: f64,
    pub s1: f64,
    pub s: f64,
    pub eps: f64,
    #[serde(rename = "M", default)]
    pub m: Option<f64>,
    #[serde(rename = "R", default)]
    pub r: Option<f64>,
    #[serde(rename = "N", default)]
    pub n: Option<f64>,
    #[serde(default = "default_sign")]
    pub sign: i32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cutoff: CutoffSpec,
    pub data: InitialData,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Random fields per estimator.
    #[serde(default = "default_samples")]
    pub estimator_samples: usize,
}

/// Constants pinned before any run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub t_good: f64,
    pub m_estimated: bool,
}

fn bad(msg: String) -> Error {
    Error::Config(msg)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 3 {
            return Err(bad(format!("d must be 1, 2 or 3, got {}", self.d)));
        }
        if self.p == 0 {
            return Err(bad("p must be at least 1".into()));
        }
        if self.k < MIN_K {
            return Err(bad(format!("K = {} is below the minimum {MIN_K}", self.k)));
        }
        if self.pad_factor < 2 {
            return Err(bad(format!("pad_factor must be at least 2, got {}", self.pad_factor)));
        }
        if !(self.s0 > self.d as f64 / 2.0) {
            return Err(bad(format!("s0 = {} must exceed d/2 = {}", self.s0, self.d as f64 / 2.0)));
        }
        if !(self.s1 >= self.s0 + 2.0) {
            return Err(bad(format!("s1 = {} must be at least s0 + 2 = {}", self.s1, self.s0 + 2.0)));
        }
        if !(self.s >= self.s1 + 1.0) {
            return Err(bad(format!("s = {} must be at least s1 + 1 = {}", self.s, self.s1 + 1.0)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(bad(format!("eps must be positive, got {}", self.eps)));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(bad(format!("sign must be +1 or -1, got {}", self.sign)));
        }
        if let Some(m) = self.m {
            if !(m > 0.0 && m.is_finite()) {
                return Err(bad(format!("M must be positive, got {m}")));
            }
        }
        if let Some(r) = self.r {
            if !(r > 1.0 && r.is_finite()) {
                return Err(bad(format!("R must exceed 1, got {r}")));
            }
        }
        if let Some(n) = self.n {
            if !(n > 1.0 && n.is_finite()) {
                return Err(bad(format!("N must exceed 1, got {n}")));
            }
        }
        CutoffSpec::new(self.cutoff.eps).map_err(|e| bad(e.to_string()))?;
        match &self.data {
            InitialData::Random(spec) => spec.validate(self.k)?,
            InitialData::PlaneWave { mode, amplitude } => {
                if mode.len() != self.d {
                    return Err(bad(format!("plane wave mode {mode:?} does not have dimension {}", self.d)));
                }
                if mode.iter().any(|c| c.unsigned_abs() as usize > self.k) {
                    return Err(bad(format!("plane wave mode {mode:?} lies outside |j|_inf <= {}", self.k)));
                }
                if !amplitude.is_finite() {
                    return Err(bad("plane wave amplitude must be finite".into()));
                }
            }
        }
        let sv = &self.solver;
        if !(sv.dt > 0.0 && sv.dt.is_finite()) {
            return Err(bad(format!("solver.dt must be positive, got {}", sv.dt)));
        }
        if let Some(t) = sv.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad(format!("solver.t_end must be >= 0, got {t}")));
            }
        }
        if sv.observe_every == 0 {
            return Err(bad("solver.observe_every must be positive".into()));
        }
        if self.estimator_samples == 0 {
            return Err(bad("estimator_samples must be positive".into()));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.d, self.k, self.pad_factor)
    }

    /// Pins `M`, `R`, `C`, `N` and `T_good`, estimating what is not given.
    pub fn resolve(&self) -> Result<Resolved> {
        self.validate()?;
        let (m, r, m_estimated) = match (self.m, self.r) {
            (Some(m), Some(r)) => (m, r, false),
            (Some(m), None) => (m, 2.0 * m, false),
            (None, r) => {
                let est = estimate_tame_constant(self, self.estimator_samples, r)?;
                (est.m, est.r, true)
            }
        };
        if !(r > 1.0) {
            return Err(bad(format!("R = 2M = {r} must exceed 1; pin R explicitly")));
        }
        let c = estimate_w_constant(self, r, 2.0 * r, self.estimator_samples)?;
        let n = match self.n {
            Some(n) => n,
            None => c.powf(2.0 * self.p as f64 * self.s).max(2.0 * r),
        };
        if !(n > r) {
            return Err(bad(format!("N = {n} must exceed R = {r}")));
        }
        Ok(Resolved {
            m,
            r,
            n,
            c,
            t_good: t_good(self.eps, self.p, self.s0, self.s1, m),
            m_estimated,
        })
    }

    pub fn diagonalizer(&self, res: &Resolved) -> Result<DiagonalizerParams> {
        DiagonalizerParams::new(res.n, res.r, self.cutoff, self.p, self.sign)
    }

    pub fn norm_set(&self, res: &Resolved) -> Result<NormSet> {
        Ok(NormSet {
            s0: self.s0,
            s1: self.s1,
            s: self.s,
            r: res.r,
            diagonalizer: Some(self.diagonalizer(res)?),
        })
    }

    /// Solver settings with the escape guard at `2 delta` unless overridden.
    pub fn solver_config(&self, res: &Resolved, delta: f64) -> SolverConfig {
        let sv = &self.solver;
        SolverConfig {
            dt: sv.dt,
            t_end: sv.t_end.unwrap_or(res.t_good),
            scheme: sv.scheme,
            sign: self.sign,
            p: self.p,
            observe_every: sv.observe_every,
            dealias: sv.dealias,
            guard: Some(Guard {
                s: self.s1,
                r: res.r,
                level: sv.guard_level.unwrap_or(2.0 * delta),
            }),
        }
    }
}

/// Named configurations: `plane_wave`, `admissible_1d`, `admissible_2d`.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    use super::data::Profile;
    let random = |j_min, j_max| {
        InitialData::Random(DataSpec {
            j_min,
            j_max,
            profile: Profile::Flat,
            target_fraction: 0.5,
            seed: None,
        })
    };
    let cfg = match name {
        "plane_wave" => ExperimentConfig {
            d: 1,
            p: 1,
            k: 16,
            pad_factor: 4,
            s0: 1.0,
            s1: 3.0,
            s: 4.0,
            eps: 0.1,
            m: Some(2.0),
            r: None,
            n: None,
            sign: 1,
            seed: 0,
            cutoff: CutoffSpec::default(),
            data: InitialData::PlaneWave {
                mode: vec![3],
                amplitude: 0.5,
            },
            solver: SolverSettings {
                t_end: Some(1.0),
                ..SolverSettings::default()
            },
            estimator_samples: default_samples(),
        },
        "admissible_1d" => ExperimentConfig {
            d: 1,
            p: 1,
            k: 64,
            pad_factor: 4,
            s0: 1.0,
            s1: 3.0,
            s: 4.0,
            eps: 0.1,
            m: None,
            r: None,
            n: None,
            sign: 1,
            seed: 1,
            cutoff: CutoffSpec::default(),
            data: random(16.0, 32.0),
            solver: SolverSettings::default(),
            estimator_samples: default_samples(),
        },
        "admissible_2d" => ExperimentConfig {
            d: 2,
            p: 1,
            k: 16,
            pad_factor: 4,
            s0: 2.0,
            s1: 4.0,
            s: 5.0,
            eps: 0.1,
            m: None,
            r: None,
            n: None,
            sign: 1,
            seed: 2,
            cutoff: CutoffSpec::default(),
            data: random(6.0, 12.0),
            solver: SolverSettings::default(),
            estimator_samples: default_samples(),
        },
        other => {
            return Err(bad(format!(
                "unknown preset {other:?}; expected plane_wave, admissible_1d or admissible_2d"
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
