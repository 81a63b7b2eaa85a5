use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::angle::wrap_raw;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Sine,
    GProfile,
}

/// A 2π-periodic odd coupling function together with its potential.
///
/// The continuous-time law moves agent `k` with
/// `alpha * sum_j a_jk * force(theta_j - theta_k)`, where `force` is the
/// derivative of the pair potential. For the sine profile the potential is
/// `(2 sin(theta/2))^2`, so `force = 2 sin`; for the g-profile the potential
/// integrates `g` and `force = g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingProfile {
    Sine,
    GProfile {
        a: f64,
        n: usize,
        /// Half-width of the quadratic blends around the kinks at `±pi/n`.
        smoothing: f64,
    },
}

impl Default for CouplingProfile {
    fn default() -> Self {
        CouplingProfile::Sine
    }
}

/// Builds a profile; `smoothing = None` selects the default `pi / (20 n)`.
pub fn make_profile(kind: ProfileKind, a: f64, n: usize, smoothing: Option<f64>) -> Result<CouplingProfile> {
    match kind {
        ProfileKind::Sine => Ok(CouplingProfile::Sine),
        ProfileKind::GProfile => CouplingProfile::g_profile(a, n, smoothing),
    }
}

impl CouplingProfile {
    pub fn sine() -> Self {
        CouplingProfile::Sine
    }

    pub fn g_profile(a: f64, n: usize, smoothing: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("the g-profile needs n >= 2, got {n}")));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid(format!("the g-profile needs a > 0, got {a}")));
        }
        let limit = PI / (2.0 * n as f64);
        let eps = smoothing.unwrap_or(PI / (20.0 * n as f64));
        if !(eps.is_finite() && (0.0..limit).contains(&eps)) {
            return Err(Error::invalid(format!(
                "smoothing half-width must lie in [0, {limit}), got {eps}"
            )));
        }
        Ok(CouplingProfile::GProfile { a, n, smoothing: eps })
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            CouplingProfile::Sine => ProfileKind::Sine,
            CouplingProfile::GProfile { .. } => ProfileKind::GProfile,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CouplingProfile::Sine => "sine",
            CouplingProfile::GProfile { .. } => "g_profile",
        }
    }

    /// Ratio `force / f`: 2 for the sine profile, 1 for the g-profile.
    pub fn force_factor(&self) -> f64 {
        match self {
            CouplingProfile::Sine => 2.0,
            CouplingProfile::GProfile { .. } => 1.0,
        }
    }

    /// The coupling function itself.
    pub fn f(&self, theta: f64) -> f64 {
        self.force(theta) / self.force_factor()
    }

    /// Derivative of [`potential`](Self::potential).
    #[inline]
    pub fn force(&self, theta: f64) -> f64 {
        match *self {
            CouplingProfile::Sine => 2.0 * theta.sin(),
            CouplingProfile::GProfile { a, n, smoothing } => {
                let t = wrap_raw(theta);
                t.signum() * GPieces::new(a, n, smoothing).value(t.abs())
            }
        }
    }

    /// Derivative of [`force`](Self::force), i.e. the second derivative of
    /// the potential.
    pub fn force_slope(&self, theta: f64) -> f64 {
        match *self {
            CouplingProfile::Sine => 2.0 * theta.cos(),
            CouplingProfile::GProfile { a, n, smoothing } => {
                GPieces::new(a, n, smoothing).slope(wrap_raw(theta).abs())
            }
        }
    }

    /// Even, 2π-periodic pair potential vanishing at 0.
    pub fn potential(&self, theta: f64) -> f64 {
        match *self {
            CouplingProfile::Sine => {
                let s = 2.0 * (0.5 * theta).sin();
                s * s
            }
            CouplingProfile::GProfile { a, n, smoothing } => {
                GPieces::new(a, n, smoothing).integral(wrap_raw(theta).abs())
            }
        }
    }
}

/// The g-profile on `[0, pi]`: slope `a` up to the joint `c = pi/n`, then
/// slope `-a/(n-1)` down to zero at `pi`, with a quadratic blend over
/// `[c - eps, c + eps]`.
struct GPieces {
    a: f64,
    c: f64,
    eps: f64,
    s2: f64,
}

impl GPieces {
    fn new(a: f64, n: usize, eps: f64) -> Self {
        Self {
            a,
            c: PI / n as f64,
            eps,
            s2: -a / (n as f64 - 1.0),
        }
    }

    fn value(&self, t: f64) -> f64 {
        let (lo, hi) = (self.c - self.eps, self.c + self.eps);
        if t <= lo {
            self.a * t
        } else if t < hi {
            let u = t - lo;
            self.a * lo + self.a * u + (self.s2 - self.a) * u * u / (4.0 * self.eps)
        } else {
            -self.s2 * (PI - t)
        }
    }

    fn slope(&self, t: f64) -> f64 {
        let (lo, hi) = (self.c - self.eps, self.c + self.eps);
        if t <= lo {
            self.a
        } else if t < hi {
            self.a + (self.s2 - self.a) * (t - lo) / (2.0 * self.eps)
        } else {
            self.s2
        }
    }

    fn integral(&self, t: f64) -> f64 {
        let (lo, hi) = (self.c - self.eps, self.c + self.eps);
        let a = self.a;
        let blend = |u: f64| {
            0.5 * a * lo * lo
                + a * lo * u
                + 0.5 * a * u * u
                + if self.eps > 0.0 {
                    (self.s2 - a) * u * u * u / (12.0 * self.eps)
                } else {
                    0.0
                }
        };
        if t <= lo {
            0.5 * a * t * t
        } else if t < hi {
            blend(t - lo)
        } else {
            let at_hi = blend(hi - lo);
            at_hi - 0.5 * self.s2 * ((PI - hi).powi(2) - (PI - t).powi(2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid() -> Vec<f64> {
        (0..=400).map(|i| -7.0 + 14.0 * i as f64 / 400.0).collect()
    }

    fn profiles() -> Vec<CouplingProfile> {
        vec![
            CouplingProfile::sine(),
            CouplingProfile::g_profile(1.0, 5, Some(0.0)).unwrap(),
            CouplingProfile::g_profile(1.0, 5, None).unwrap(),
            CouplingProfile::g_profile(2.5, 8, None).unwrap(),
        ]
    }

    #[test]
    fn g_profile_values() {
        let g = CouplingProfile::g_profile(1.0, 5, Some(0.0)).unwrap();
        assert_eq!(g.f(0.0), 0.0);
        assert!((g.f(PI / 5.0) - PI / 5.0).abs() < 1e-15);
        assert!(g.f(PI).abs() < 1e-15);
        assert!((g.f(-PI / 5.0) + PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CouplingProfile::g_profile(1.0, 1, None).is_err());
        assert!(CouplingProfile::g_profile(0.0, 5, None).is_err());
        assert!(CouplingProfile::g_profile(1.0, 5, Some(PI / 10.0)).is_err());
        assert!(CouplingProfile::g_profile(1.0, 5, Some(-0.1)).is_err());
    }

    #[test]
    fn odd_periodic_and_zero_at_origin() {
        for p in profiles() {
            assert_eq!(p.f(0.0), 0.0);
            for t in grid() {
                assert!((p.f(-t) + p.f(t)).abs() < 1e-9, "{p:?} at {t}");
                assert!((p.f(t + TAU) - p.f(t)).abs() < 1e-9, "{p:?} at {t}");
                assert!((p.potential(-t) - p.potential(t)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn potential_derivative_is_force() {
        let h = 1e-6;
        for p in profiles() {
            for t in grid() {
                let fd = (p.potential(t + h) - p.potential(t - h)) / (2.0 * h);
                assert!((fd - p.force(t)).abs() < 1e-6, "{p:?} at {t}: {fd} vs {}", p.force(t));
                assert!((p.force(t) - p.force_factor() * p.f(t)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn slope_is_derivative_of_force_away_from_joints() {
        let h = 1e-6;
        for p in profiles() {
            let joints: Vec<f64> = match p {
                CouplingProfile::GProfile { n, smoothing, .. } => {
                    let c = PI / n as f64;
                    vec![c - smoothing, c + smoothing, PI]
                }
                CouplingProfile::Sine => vec![],
            };
            for t in grid() {
                let r = wrap_raw(t).abs();
                if r < 1e-3 || joints.iter().any(|j| (r - j).abs() < 1e-3) {
                    continue;
                }
                let fd = (p.force(t + h) - p.force(t - h)) / (2.0 * h);
                assert!((fd - p.force_slope(t)).abs() < 1e-5, "{p:?} at {t}");
            }
        }
    }

    #[test]
    fn smoothing_keeps_force_continuous() {
        let p = CouplingProfile::g_profile(1.0, 5, None).unwrap();
        let CouplingProfile::GProfile { smoothing, .. } = p else { unreachable!() };
        for joint in [PI / 5.0 - smoothing, PI / 5.0 + smoothing] {
            assert!((p.force(joint - 1e-12) - p.force(joint + 1e-12)).abs() < 1e-10);
            assert!((p.force_slope(joint - 1e-9) - p.force_slope(joint + 1e-9)).abs() < 1e-6);
        }
    }
}
