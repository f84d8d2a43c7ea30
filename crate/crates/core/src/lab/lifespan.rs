//! Escape-time scans against `T_good`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitialData, SolverSettings};
use super::data::{gen_initial_data, DataSpec, Profile};
use crate::error::{Error, Result};
use crate::fourier::multiplier::{project, Side};
use crate::paradiff::CutoffSpec;
use crate::solver::{integrate, NormSet, Termination};

/// Tail mass `||Pi^perp_{K/2} u||^2 / ||u||^2` above which a cell is flagged.
pub const TAIL_FLAG: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifespanGrid {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub pad_factor: usize,
    pub p: u32,
    pub sign: i32,
    pub s0: f64,
    pub eps: Vec<f64>,
    pub s1: Vec<f64>,
    pub j_min: f64,
    pub j_max: f64,
    pub target_fraction: f64,
    /// Horizon as a multiple of `T_good`.
    pub horizon_factor: f64,
    pub dt: f64,
    pub observe_every: usize,
    pub seed: u64,
    /// Pinned tame constant; estimated per cell when absent.
    #[serde(rename = "M", default)]
    pub m: Option<f64>,
    pub estimator_samples: usize,
}

impl Default for LifespanGrid {
    fn default() -> Self {
        Self {
            d: 1,
            k: 128,
            pad_factor: 4,
            p: 1,
            sign: 1,
            s0: 1.0,
            eps: vec![0.05, 0.1],
            s1: vec![3.0, 4.0, 5.0],
            j_min: 16.0,
            j_max: 32.0,
            target_fraction: 0.5,
            horizon_factor: 2.0,
            dt: 1e-3,
            observe_every: 10,
            seed: 0,
            m: None,
            estimator_samples: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanCell {
    pub index: usize,
    pub eps: f64,
    pub s1: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub t_good: f64,
    pub delta: f64,
    pub horizon: f64,
    /// First observed time with `|u|_{s1,R} > 2 delta`.
    pub escape_time: Option<f64>,
    /// Escape time, or the horizon when no escape happened.
    pub observed: f64,
    pub tail_fraction: f64,
    pub tail_flag: bool,
    pub feasible: bool,
    pub note: String,
    pub pass: bool,
}

impl LifespanGrid {
    /// Experiment configuration of one cell.
    pub fn cell_config(&self, eps: f64, s1: f64, index: usize) -> ExperimentConfig {
        ExperimentConfig {
            d: self.d,
            p: self.p,
            k: self.k,
            pad_factor: self.pad_factor,
            s0: self.s0,
            s1,
            s: s1 + 1.0,
            eps,
            m: self.m,
            r: None,
            n: None,
            sign: self.sign,
            seed: self.seed.wrapping_add(index as u64),
            cutoff: CutoffSpec::default(),
            data: InitialData::Random(DataSpec {
                j_min: self.j_min,
                j_max: self.j_max,
                profile: Profile::Flat,
                target_fraction: self.target_fraction,
                seed: None,
            }),
            solver: SolverSettings {
                dt: self.dt,
                observe_every: self.observe_every,
                ..SolverSettings::default()
            },
            estimator_samples: self.estimator_samples,
        }
    }

    fn cells(&self) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        for &e in &self.eps {
            for &s1 in &self.s1 {
                out.push((out.len(), e, s1));
            }
        }
        out
    }
}

fn run_cell(grid: &LifespanGrid, index: usize, eps: f64, s1: f64) -> Result<LifespanCell> {
    let mut cfg = grid.cell_config(eps, s1, index);
    cfg.validate()?;
    let res = cfg.resolve()?;
    let horizon = grid.horizon_factor * res.t_good;
    let mut cell = LifespanCell {
        index,
        eps,
        s1,
        s: cfg.s,
        m: res.m,
        r: res.r,
        t_good: res.t_good,
        delta: f64::NAN,
        horizon,
        escape_time: None,
        observed: f64::NAN,
        tail_fraction: f64::NAN,
        tail_flag: false,
        feasible: false,
        note: String::new(),
        pass: false,
    };
    let InitialData::Random(spec) = &cfg.data else {
        unreachable!("lifespan cells use random data")
    };
    let (u0, report) = match gen_initial_data(spec, &cfg, res.m) {
        Ok(v) => v,
        Err(Error::Inadmissible(msg)) => {
            cell.note = format!("infeasible: {msg}");
            return Ok(cell);
        }
        Err(e) => return Err(e),
    };
    cell.feasible = true;
    cell.delta = report.delta;
    cfg.solver.t_end = Some(horizon);
    let solver = cfg.solver_config(&res, report.delta);
    let norms = NormSet {
        s0: cfg.s0,
        s1: cfg.s1,
        s: cfg.s,
        r: res.r,
        diagonalizer: None,
    };
    let traj = integrate(&u0, &solver, &norms)?;
    match traj.termination {
        Termination::Completed => cell.observed = horizon,
        Termination::Escaped { t } => {
            cell.escape_time = Some(t);
            cell.observed = t;
        }
        Termination::NumericAbort { t } => {
            cell.observed = t;
            cell.note = format!("numeric abort at t = {t}");
        }
    }
    let last = traj.last_state();
    let tail = project(last, cfg.k as f64 / 2.0, Side::High).l2_sq();
    cell.tail_fraction = tail / last.l2_sq();
    cell.tail_flag = cell.tail_fraction > TAIL_FLAG;
    cell.pass = cell.note.is_empty() && cell.observed >= cell.t_good;
    Ok(cell)
}

/// Every `(eps, s1)` cell, run in parallel and returned in grid order.
pub fn lifespan_scan(grid: &LifespanGrid) -> Result<Vec<LifespanCell>> {
    if !(grid.horizon_factor >= 1.0) {
        return Err(Error::Config(format!(
            "horizon_factor must be at least 1, got {}",
            grid.horizon_factor
        )));
    }
    grid.cells()
        .into_par_iter()
        .map(|(i, e, s1)| run_cell(grid, i, e, s1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scan_outlives_t_good() {
        let grid = LifespanGrid {
            k: 32,
            eps: vec![0.1],
            s1: vec![3.0],
            j_min: 8.0,
            j_max: 16.0,
            m: Some(2.0),
            estimator_samples: 2,
            ..LifespanGrid::default()
        };
        let cells = lifespan_scan(&grid).unwrap();
        assert_eq!(cells.len(), 1);
        let c = &cells[0];
        assert!(c.feasible && c.pass, "{c:?}");
        assert_eq!(c.t_good, 0.006103515625);
    }

    #[test]
    fn infeasible_cells_are_reported() {
        let grid = LifespanGrid {
            k: 16,
            eps: vec![0.1],
            s1: vec![3.0],
            j_min: 1.0,
            j_max: 2.0,
            target_fraction: 1.0,
            m: Some(4.0),
            estimator_samples: 2,
            ..LifespanGrid::default()
        };
        let cells = lifespan_scan(&grid).unwrap();
        assert!(!cells[0].feasible && !cells[0].pass);
        assert!(cells[0].note.starts_with("infeasible"));
    }
}
