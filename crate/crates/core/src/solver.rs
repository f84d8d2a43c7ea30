//! Time integration of `u_t = -i Delta u + sign i |u|^{2p} u`.
//!
//! Two state layouts are supported:
//!
//! * `Dealias::Project` keeps the state on the base lattice and truncates
//!   back to it after every nonlinear evaluation (Galerkin truncation).
//! * `Dealias::PaddedExact` keeps the state on every mode of the synthesis
//!   grid, `|j|_inf <= (n - 1) / 2`. Synthesis and analysis are then
//!   inverse bijections, so each sub-step of the splitting is exactly
//!   unitary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagonalizer::{modified_energy, DiagonalizerParams};
use crate::error::{Error, Result};
use crate::fourier::fft::{analyze, synthesize};
use crate::fourier::field::FourierField;
use crate::fourier::lattice::{BoxShape, LatticeSpec};
use crate::fourier::multiplier::norm_sq;
use crate::fourier::norm::{hs_sum, weighted};
use crate::fourier::product::monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Strang,
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    Project,
    PaddedExact,
}

/// Stop when `|u|_{s,R}` exceeds `level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub s: f64,
    pub r: f64,
    pub level: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub sign: i32,
    pub p: u32,
    pub observe_every: usize,
    pub dealias: Dealias,
    pub guard: Option<Guard>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 0.1,
            scheme: Scheme::Strang,
            sign: 1,
            p: 1,
            observe_every: 10,
            dealias: Dealias::Project,
            guard: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::InvalidParameter("sign must be +1 or -1".into()));
        }
        if self.p == 0 {
            return Err(Error::InvalidParameter("p must be at least 1".into()));
        }
        if self.observe_every == 0 {
            return Err(Error::InvalidParameter("observe_every must be positive".into()));
        }
        Ok(())
    }
}

/// Extent of the state in the given layout.
pub fn working_extent(spec: &LatticeSpec, dealias: Dealias) -> usize {
    match dealias {
        Dealias::Project => spec.k_max,
        Dealias::PaddedExact => (spec.synthesis_grid() - 1) / 2,
    }
}

/// Precomputed phases and grid for one step size.
pub struct Stepper {
    shape: BoxShape,
    grid: usize,
    dt: f64,
    p: u32,
    sign: f64,
    scheme: Scheme,
    dealias: Dealias,
    norms_sq: Vec<f64>,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Stepper {
    pub fn new(spec: &LatticeSpec, dt: f64, p: u32, sign: i32, scheme: Scheme, dealias: Dealias) -> Self {
        let extent = working_extent(spec, dealias);
        let shape = BoxShape::new(spec.dim, extent);
        let grid = match dealias {
            Dealias::Project => spec.synthesis_grid(),
            Dealias::PaddedExact => 2 * extent + 1,
        };
        let norms_sq: Vec<f64> = shape.norms_sq().into_iter().map(|n| n as f64).collect();
        let phase = |t: f64| -> Vec<Complex64> {
            norms_sq.iter().map(|n| Complex64::from_polar(1.0, n * t)).collect()
        };
        Self {
            grid,
            dt,
            p,
            sign: sign as f64,
            scheme,
            dealias,
            half: phase(0.5 * dt),
            full: phase(dt),
            norms_sq,
            shape,
        }
    }

    pub fn extent(&self) -> usize {
        self.shape.extent
    }

    fn linear(&self, u: &mut [Complex64], phase: &[Complex64]) {
        for (c, e) in u.iter_mut().zip(phase) {
            *c *= e;
        }
    }

    /// Exact nonlinear sub-flow `u -> u exp(sign i |u|^{2p} dt)` on the grid.
    fn nonlinear_flow(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut g = synthesize(u, &self.shape, self.grid);
        let theta = self.sign * self.dt;
        for z in g.iter_mut() {
            let a = z.norm_sqr().powi(self.p as i32);
            *z *= Complex64::from_polar(1.0, theta * a);
        }
        analyze(g, self.grid, &self.shape)
    }

    /// `sign i |u|^{2p} u` in the current layout.
    fn nonlinear_rhs(&self, spec: &LatticeSpec, u: &[Complex64]) -> Result<Vec<Complex64>> {
        let factor = Complex64::new(0.0, self.sign);
        match self.dealias {
            Dealias::Project => {
                let f = FourierField::from_coeffs(*spec, self.shape.extent, u.to_vec());
                let power = monomial(&f, self.p + 1, self.p)?.with_extent(self.shape.extent);
                Ok(power.coeffs().iter().map(|c| c * factor).collect())
            }
            Dealias::PaddedExact => {
                let mut g = synthesize(u, &self.shape, self.grid);
                for z in g.iter_mut() {
                    *z *= z.norm_sqr().powi(self.p as i32) * factor;
                }
                Ok(analyze(g, self.grid, &self.shape))
            }
        }
    }

    pub fn step(&self, u: &FourierField) -> Result<FourierField> {
        assert_eq!(u.extent(), self.shape.extent, "state not in the stepper layout");
        let spec = *u.spec();
        let out = match self.scheme {
            Scheme::Strang => {
                let mut c = u.coeffs().to_vec();
                self.linear(&mut c, &self.half);
                let mut c = self.nonlinear_flow(&c);
                self.linear(&mut c, &self.half);
                c
            }
            Scheme::Rk4 => self.lawson_rk4(&spec, u.coeffs())?,
        };
        Ok(FourierField::from_coeffs(spec, self.shape.extent, out))
    }

    /// Integrating-factor RK4 in the interaction picture of the linear flow.
    fn lawson_rk4(&self, spec: &LatticeSpec, u: &[Complex64]) -> Result<Vec<Complex64>> {
        let h = self.dt;
        let e2 = &self.half;
        let e = &self.full;
        let n = u.len();
        let lin = |x: &[Complex64], ph: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(ph).map(|(a, b)| a * b).collect()
        };
        let axpy = |x: &[Complex64], a: f64, y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(p, q)| p + q * a).collect()
        };
        let k1 = self.nonlinear_rhs(spec, u)?;
        let e2u = lin(u, e2);
        let k2 = self.nonlinear_rhs(spec, &axpy(&e2u, 0.5 * h, &lin(&k1, e2)))?;
        let k3 = self.nonlinear_rhs(spec, &axpy(&e2u, 0.5 * h, &k2))?;
        let eu = lin(u, e);
        let k4 = self.nonlinear_rhs(spec, &axpy(&eu, h, &lin(&k3, e2)))?;
        Ok((0..n)
            .map(|i| eu[i] + (k1[i] * e[i] + (k2[i] + k3[i]) * e2[i] * 2.0 + k4[i]) * (h / 6.0))
            .collect())
    }

    /// Conserved energy of the discrete flow in this layout.
    pub fn hamiltonian(&self, u: &FourierField) -> Result<f64> {
        match self.dealias {
            Dealias::Project => hamiltonian(u, self.p, self.sign as i32),
            Dealias::PaddedExact => Ok(hamiltonian_collocation(u, self.p, self.sign as i32, self.grid)),
        }
    }

    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }
}

/// One Strang step `L(dt/2) N(dt) L(dt/2)` of the given layout.
pub fn strang_step(u: &FourierField, dt: f64, p: u32, sign: i32, dealias: Dealias) -> Result<FourierField> {
    let stepper = Stepper::new(u.spec(), dt, p, sign, Scheme::Strang, dealias);
    stepper.step(&u.with_extent(stepper.extent()))
}

pub fn mass(u: &FourierField) -> f64 {
    u.l2_sq()
}

/// `sum |j|^2 |u(j)|^2 + sign / (p + 1) * mean |u|^{2p+2}`, the mean taken
/// exactly through the coefficients of `u^{p+1}`.
pub fn hamiltonian(u: &FourierField, p: u32, sign: i32) -> Result<f64> {
    let kinetic = kinetic(u);
    let potential = monomial(u, p + 1, 0)?.l2_sq();
    Ok(kinetic + sign as f64 * potential / (p as f64 + 1.0))
}

/// Same functional with the mean replaced by the average over an `n^d` grid.
pub fn hamiltonian_collocation(u: &FourierField, p: u32, sign: i32, n: usize) -> f64 {
    let g = synthesize(u.coeffs(), &u.shape(), n);
    let mean = g.iter().map(|z| z.norm_sqr().powi(p as i32 + 1)).sum::<f64>() / g.len() as f64;
    kinetic(u) + sign as f64 * mean / (p as f64 + 1.0)
}

fn kinetic(u: &FourierField) -> f64 {
    u.nonzero()
        .map(|(j, c)| norm_sq(&j) as f64 * c.norm_sqr())
        .sum()
}

/// Exact plane-wave solution `c exp(i j x) exp(i (|j|^2 + sign |c|^{2p}) t)`.
pub fn plane_wave(spec: LatticeSpec, j: &[i64], c: Complex64, t: f64, p: u32, sign: i32) -> Result<FourierField> {
    let omega = norm_sq(j) as f64 + sign as f64 * c.norm().powi(2 * p as i32);
    FourierField::mode(spec, j, c * Complex64::from_polar(1.0, omega * t))
}

/// Regularity ladder and weight floor for telemetry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSet {
    pub s0: f64,
    pub s1: f64,
    pub s: f64,
    pub r: f64,
    /// When present, the modified energy `E_s` is recorded.
    pub diagonalizer: Option<DiagonalizerParams>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRow {
    pub t: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    pub l2: f64,
    pub w_s0: f64,
    pub w_s1: f64,
    pub w_s: f64,
    pub hs1: f64,
    pub hs: f64,
    #[serde(rename = "E_s")]
    pub e_s: f64,
    pub escape_flag: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Escaped { t: f64 },
    NumericAbort { t: f64 },
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FourierField>,
    pub telemetry: Vec<TelemetryRow>,
    pub termination: Termination,
    /// Step size actually used (t_end divided into whole steps).
    pub dt: f64,
}

impl Trajectory {
    pub fn last_state(&self) -> &FourierField {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn observe(stepper: &Stepper, u: &FourierField, t: f64, norms: &NormSet, escaped: bool) -> Result<TelemetryRow> {
    let e_s = match &norms.diagonalizer {
        Some(dp) => modified_energy(u, norms.s, dp).unwrap_or(f64::NAN),
        None => f64::NAN,
    };
    Ok(TelemetryRow {
        t,
        mass: mass(u),
        hamiltonian: stepper.hamiltonian(u)?,
        l2: mass(u).sqrt(),
        w_s0: weighted(u, norms.s0, norms.r),
        w_s1: weighted(u, norms.s1, norms.r),
        w_s: weighted(u, norms.s, norms.r),
        hs1: hs_sum(u, norms.s1),
        hs: hs_sum(u, norms.s),
        e_s,
        escape_flag: escaped as u8,
    })
}

fn finite(u: &FourierField) -> bool {
    u.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Integrates from `u0` to `t_end`, observing every `observe_every` steps and
/// at the final time. `dt` is shrunk so that a whole number of steps lands on
/// `t_end`.
pub fn integrate(u0: &FourierField, config: &SolverConfig, norms: &NormSet) -> Result<Trajectory> {
    config.validate()?;
    let spec = *u0.spec();
    let steps = if config.t_end == 0.0 {
        0
    } else {
        (config.t_end / config.dt - 1e-9).ceil().max(1.0) as usize
    };
    let dt = if steps == 0 { config.dt } else { config.t_end / steps as f64 };
    let stepper = Stepper::new(&spec, dt, config.p, config.sign, config.scheme, config.dealias);
    let mut u = u0.with_extent(stepper.extent());
    let guard_hit = |u: &FourierField| {
        config
            .guard
            .map(|g| weighted(u, g.s, g.r) > g.level)
            .unwrap_or(false)
    };

    let mut times = vec![0.0];
    let escaped0 = guard_hit(&u);
    let mut telemetry = vec![observe(&stepper, &u, 0.0, norms, escaped0)?];
    let mut states = vec![u.clone()];
    if escaped0 {
        return Ok(Trajectory {
            times,
            states,
            telemetry,
            termination: Termination::Escaped { t: 0.0 },
            dt,
        });
    }
    let mut termination = Termination::Completed;
    for n in 1..=steps {
        let t = n as f64 * dt;
        let next = stepper.step(&u)?;
        if !finite(&next) {
            termination = Termination::NumericAbort { t: (n - 1) as f64 * dt };
            break;
        }
        u = next;
        let escaped = guard_hit(&u);
        if escaped || n % config.observe_every == 0 || n == steps {
            times.push(t);
            telemetry.push(observe(&stepper, &u, t, norms, escaped)?);
            states.push(u.clone());
        }
        if escaped {
            termination = Termination::Escaped { t };
            break;
        }
    }
    Ok(Trajectory {
        times,
        states,
        telemetry,
        termination,
        dt,
    })
}
