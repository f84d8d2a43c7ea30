//! Closed-form lifespan, Grönwall bounds and energy certificates.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Resolved};
use crate::error::{Error, Result};
use crate::solver::TelemetryRow;

/// `T_good = eps^{-2p} 2^{-4(2p+2)} 2^{2p(s1-s0)} / M^{2p s0}`.
pub fn t_good(eps: f64, p: u32, s0: f64, s1: f64, m: f64) -> f64 {
    let q = 2.0 * p as f64;
    let num = (1.0 / eps).powf(q) * 2f64.powf(q * (s1 - s0));
    num / (2f64.powf(4.0 * (q + 2.0)) * m.powf(q * s0))
}

/// Cumulative trapezoid `int_{t_0}^{t_i} f`.
pub fn cumulative_trapezoid(times: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (f[i] + f[i - 1]);
        }
        out.push(acc);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GronwallKind {
    /// `x <= M + int f x` gives `x <= M exp(int f)`.
    I,
    /// `x <= M + (1 - alpha)^{-1} int f x^alpha` gives
    /// `x^{1-alpha} <= M^{1-alpha} + int f`.
    Ii,
}

/// The bound on `x(t)` at each sample time, by trapezoid quadrature of `f`.
pub fn gronwall_bound(kind: GronwallKind, m: f64, alpha: f64, f: &[f64], times: &[f64]) -> Result<Vec<f64>> {
    if f.len() != times.len() {
        return Err(Error::InvalidParameter(format!(
            "{} samples of f for {} times",
            f.len(),
            times.len()
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidParameter(format!("M must be >= 0, got {m}")));
    }
    let int_f = cumulative_trapezoid(times, f);
    match kind {
        GronwallKind::I => Ok(int_f.iter().map(|i| m * i.exp()).collect()),
        GronwallKind::Ii => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
            }
            let e = 1.0 - alpha;
            Ok(int_f.iter().map(|i| (m.powf(e) + i).powf(1.0 / e)).collect())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    /// `|u|^2_{s1} <= |u0|^2_{s1} + M^{2ps0} 2^{-2p(s1-s0)} int |u|^{2p+2}_{s1}`
    Basic,
    /// `|u|^2_s <= |u0|^2_s exp(2 M^{2p(s-s1+s0)} 2^{-2p(s1-s0)} int |u|^{2p}_{s1})`
    High,
    /// `|u|^2_s <= C^{2ps(s-s1)} [|u0|^2_s + (M^{2p(s-s1+s0)} 2^{-2p(s1-s0)} int |u|^{2p+1/(s-s1)}_{s1})^{2(s-s1)}]`
    Improved,
    /// `||u||_{H^s} <= 3 C^{ps(s-s1)} (||u0||_{H^s} + (2M)^s ||u0||_{L2}) [1 + (M^{2p(s-s1)} 2^{4p} M^{2ps0} 2^{-2p(s1-s0)} eps^{2p} t)^{s-s1}]`
    Growth,
}

impl CertificateKind {
    pub const ALL: [CertificateKind; 4] = [Self::Basic, Self::High, Self::Improved, Self::Growth];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Basic => "basic",
            Self::High => "high",
            Self::Improved => "improved",
            Self::Growth => "growth",
        }
    }
}

/// `RHS(t) - LHS(t)` on the observation times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margin: Vec<f64>,
    /// Smallest factor on `M` that makes every margin nonnegative; 1 when
    /// the bound holds as stated, infinite when no factor does.
    pub inflation: f64,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.margin.iter().all(|m| *m >= 0.0)
    }
}

fn column(rows: &[TelemetryRow], name: &str, get: impl Fn(&TelemetryRow) -> f64) -> Result<Vec<f64>> {
    let v: Vec<f64> = rows.iter().map(get).collect();
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::MissingTelemetry(name.into()));
    }
    Ok(v)
}

struct Ladder {
    p: f64,
    s0: f64,
    s1: f64,
    s: f64,
    eps: f64,
    m: f64,
    c: f64,
}

fn rhs_curve(kind: CertificateKind, l: &Ladder, lambda: f64, times: &[f64], rows: &[TelemetryRow]) -> Vec<f64> {
    let m = lambda * l.m;
    let (p, s0, s1, s) = (l.p, l.s0, l.s1, l.s);
    let gain = 2f64.powf(-2.0 * p * (s1 - s0));
    let w1: Vec<f64> = rows.iter().map(|r| r.w_s1).collect();
    let pow = |e: f64| -> Vec<f64> { cumulative_trapezoid(times, &w1.iter().map(|x| x.powf(e)).collect::<Vec<_>>()) };
    match kind {
        CertificateKind::Basic => {
            let k = m.powf(2.0 * p * s0) * gain;
            let w0 = rows[0].w_s1.powi(2);
            pow(2.0 * p + 2.0).iter().map(|i| w0 + k * i).collect()
        }
        CertificateKind::High => {
            let k = 2.0 * m.powf(2.0 * p * (s - s1 + s0)) * gain;
            let w0 = rows[0].w_s.powi(2);
            pow(2.0 * p).iter().map(|i| w0 * (k * i).exp()).collect()
        }
        CertificateKind::Improved => {
            let k = m.powf(2.0 * p * (s - s1 + s0)) * gain;
            let pre = l.c.powf(2.0 * p * s * (s - s1));
            let w0 = rows[0].w_s.powi(2);
            pow(2.0 * p + 1.0 / (s - s1))
                .iter()
                .map(|i| pre * (w0 + (k * i).powf(2.0 * (s - s1))))
                .collect()
        }
        CertificateKind::Growth => {
            let pre = 3.0 * l.c.powf(p * s * (s - s1)) * (rows[0].hs + (2.0 * m).powf(s) * rows[0].l2);
            let rate = m.powf(2.0 * p * (s - s1)) * 2f64.powf(4.0 * p) * m.powf(2.0 * p * s0) * gain * l.eps.powf(2.0 * p);
            times.iter().map(|t| pre * (1.0 + (rate * t).powf(s - s1))).collect()
        }
    }
}

fn lhs_curve(kind: CertificateKind, rows: &[TelemetryRow]) -> Result<Vec<f64>> {
    match kind {
        CertificateKind::Basic => Ok(column(rows, "w_s1", |r| r.w_s1)?.iter().map(|x| x * x).collect()),
        CertificateKind::High | CertificateKind::Improved => {
            column(rows, "w_s1", |r| r.w_s1)?;
            Ok(column(rows, "w_s", |r| r.w_s)?.iter().map(|x| x * x).collect())
        }
        CertificateKind::Growth => {
            column(rows, "l2", |r| r.l2)?;
            column(rows, "hs", |r| r.hs)
        }
    }
}

fn all_nonneg(lhs: &[f64], rhs: &[f64]) -> bool {
    lhs.iter().zip(rhs).all(|(l, r)| r - l >= 0.0)
}

/// Margin series of one certificate on a trajectory's telemetry, with the
/// integrals taken by trapezoid quadrature on the observation times.
pub fn energy_certificate(
    telemetry: &[TelemetryRow],
    cfg: &ExperimentConfig,
    res: &Resolved,
    kind: CertificateKind,
) -> Result<Certificate> {
    let lhs = lhs_curve(kind, telemetry)?;
    let times: Vec<f64> = telemetry.iter().map(|r| r.t).collect();
    let ladder = Ladder {
        p: cfg.p as f64,
        s0: cfg.s0,
        s1: cfg.s1,
        s: cfg.s,
        eps: cfg.eps,
        m: res.m,
        c: res.c,
    };
    let rhs = rhs_curve(kind, &ladder, 1.0, &times, telemetry);
    let margin: Vec<f64> = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
    let inflation = if all_nonneg(&lhs, &rhs) {
        1.0
    } else {
        let holds = |lam: f64| all_nonneg(&lhs, &rhs_curve(kind, &ladder, lam, &times, telemetry));
        let mut hi = 2.0;
        while !holds(hi) && hi < 1e12 {
            hi *= 2.0;
        }
        if !holds(hi) {
            f64::INFINITY
        } else {
            let mut lo = 1.0;
            while hi - lo > 1e-12 * hi {
                let mid = 0.5 * (lo + hi);
                if holds(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    Ok(Certificate {
        kind,
        times,
        lhs,
        rhs,
        margin,
        inflation,
    })
}

/// Least-squares fit of `y(t) / y(0) ~ (1 + beta t)^gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub beta: f64,
    pub gamma: f64,
    pub residual: f64,
}

/// `gamma` is solved exactly for each `beta` on a logarithmic grid over
/// `[1e-3, 1e4] / t_max`; the pair with the smallest residual wins.
pub fn fit_growth_degree(times: &[f64], values: &[f64]) -> Result<GrowthFit> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::InvalidParameter("growth fit needs at least 3 matched samples".into()));
    }
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    if !(t_max > 0.0) || values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("growth fit needs positive values and times".into()));
    }
    let logy: Vec<f64> = values.iter().map(|v| (v / values[0]).ln()).collect();
    let mut best = GrowthFit {
        beta: f64::NAN,
        gamma: f64::NAN,
        residual: f64::INFINITY,
    };
    let steps = 2000;
    for i in 0..=steps {
        let beta = 10f64.powf(-3.0 + 7.0 * i as f64 / steps as f64) / t_max;
        let x: Vec<f64> = times.iter().map(|t| (beta * t).ln_1p()).collect();
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let gamma = x.iter().zip(&logy).map(|(a, b)| a * b).sum::<f64>() / xx;
        let residual: f64 = x.iter().zip(&logy).map(|(a, b)| (b - gamma * a).powi(2)).sum();
        if residual < best.residual {
            best = GrowthFit { beta, gamma, residual };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_good_reference_value() {
        assert_eq!(t_good(0.1, 1, 1.0, 3.0, 2.0), 0.006103515625);
        let base = t_good(0.1, 1, 1.0, 3.0, 2.0);
        assert!((t_good(0.1, 1, 1.0, 5.0, 2.0) / base - 16.0).abs() < 1e-12);
        assert!((t_good(0.05, 1, 1.0, 3.0, 2.0) / base - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gronwall_kind_i_with_zero_f_is_constant() {
        let t: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let b = gronwall_bound(GronwallKind::I, 2.5, 0.5, &vec![0.0; 10], &t).unwrap();
        assert!(b.iter().all(|x| *x == 2.5));
    }

    #[test]
    fn gronwall_kind_ii_saturated_case() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let b = gronwall_bound(GronwallKind::Ii, 1.0, 0.5, &vec![1.0; t.len()], &t).unwrap();
        for (x, t) in b.iter().zip(&t) {
            assert!((x - (1.0 + t).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn gronwall_rejects_bad_alpha() {
        for a in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(gronwall_bound(GronwallKind::Ii, 1.0, a, &[1.0], &[0.0]).is_err());
        }
    }

    #[test]
    fn trapezoid_is_exact_on_linear_functions() {
        let t = [0.0, 0.3, 1.0, 1.7];
        let f: Vec<f64> = t.iter().map(|x| 2.0 * x + 1.0).collect();
        let i = cumulative_trapezoid(&t, &f);
        for (ti, ii) in t.iter().zip(&i) {
            assert!((ii - (ti * ti + ti)).abs() < 1e-14);
        }
    }

    #[test]
    fn growth_fit_recovers_exponent() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (1.0 + 0.7 * t).powf(1.5)).collect();
        let fit = fit_growth_degree(&t, &y).unwrap();
        assert!((fit.gamma - 1.5).abs() < 0.01, "{fit:?}");
    }
}
