use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::multiplier::{jap, norm};

/// Inner edge of the transition band: `chi = 1` below.
pub const INNER: f64 = 1.25;
/// Outer edge of the transition band: `chi = 0` above.
pub const OUTER: f64 = 1.6;

/// Smooth frequency cutoff `chi_eps(xi) = chi(|xi| / eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub eps: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { eps: 0.1 }
    }
}

impl CutoffSpec {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(Error::InvalidCutoff(format!("eps must lie in (0, 1/4), got {eps}")));
        }
        Ok(Self { eps })
    }

    /// `chi_eps(xi)`.
    pub fn chi(&self, xi: f64) -> f64 {
        profile(xi.abs() / self.eps)
    }

    /// `chi_eps(|v| / <w>)`, the weight a low-frequency factor `v` gets
    /// against a high-frequency factor `w`.
    pub fn weight(&self, v: &[i64], w: &[i64]) -> f64 {
        self.chi(norm(v) / jap(w))
    }

    /// Symmetric Bony cutoff `1 - chi_eps(|v|/<w>) - chi_eps(|w|/<v>)`.
    pub fn psi(&self, v: &[i64], w: &[i64]) -> f64 {
        1.0 - self.weight(v, w) - self.weight(w, v)
    }

    /// `|v|` above which `chi_eps(|v| / <w>)` vanishes for `|w|^2 = w_sq`.
    pub fn support_radius(&self, w_sq: f64) -> f64 {
        OUTER * self.eps * (1.0 + w_sq).sqrt()
    }
}

/// Profile `chi(r)`: 1 on `[0, 5/4]`, 0 on `[8/5, inf)`, quintic smoothstep between.
pub fn profile(r: f64) -> f64 {
    let r = r.abs();
    if r <= INNER {
        1.0
    } else if r >= OUTER {
        0.0
    } else {
        let t = (OUTER - r) / (OUTER - INNER);
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plateau_and_tail() {
        let c = CutoffSpec::default();
        assert_eq!(c.chi(0.12), 1.0);
        assert_eq!(c.chi(0.2), 0.0);
        assert_eq!(c.chi(-0.12), 1.0);
    }

    #[test]
    fn regression_value_in_band() {
        // t = 3/7, smoothstep(3/7) = 6183 / 16807
        let v = CutoffSpec::default().chi(0.145);
        assert!((v - 6183.0 / 16807.0).abs() < 1e-14);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn eps_range() {
        assert!(CutoffSpec::new(0.25).is_err());
        assert!(CutoffSpec::new(0.0).is_err());
        assert!(CutoffSpec::new(0.2).is_ok());
    }

    #[test]
    fn psi_examples() {
        let c = CutoffSpec::default();
        assert_eq!(c.psi(&[10], &[2]), 1.0);
        assert_eq!(c.psi(&[1], &[100]), 0.0);
        assert_eq!(c.psi(&[0], &[0]), -1.0);
    }

    proptest! {
        #[test]
        fn profile_monotone(a in 0.0f64..3.0, b in 0.0f64..3.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(profile(lo) >= profile(hi));
            prop_assert!((0.0..=1.0).contains(&profile(a)));
        }

        #[test]
        fn psi_symmetric_and_partition(v in prop::collection::vec(-30i64..30, 2),
                                       w in prop::collection::vec(-30i64..30, 2),
                                       eps in 0.01f64..0.249) {
            let c = CutoffSpec::new(eps).unwrap();
            prop_assert_eq!(c.psi(&v, &w), c.psi(&w, &v));
            let total = c.weight(&v, &w) + c.weight(&w, &v) + c.psi(&v, &w);
            prop_assert!((total - 1.0).abs() < 1e-15);
        }

        #[test]
        fn weight_vanishes_beyond_support(v in prop::collection::vec(-40i64..40, 2),
                                          w in prop::collection::vec(-40i64..40, 2),
                                          eps in 0.01f64..0.249) {
            let c = CutoffSpec::new(eps).unwrap();
            let wsq = (w[0] * w[0] + w[1] * w[1]) as f64;
            if norm(&v) >= c.support_radius(wsq) {
                prop_assert!(c.weight(&v, &w) < 1e-40);
            }
        }
    }
}
