use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Wraps a finite angle into `(-pi, pi]` without validation.
#[inline]
pub fn wrap_raw(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// An angle in radians, canonically wrapped to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Wraps `theta` into `(-pi, pi]`; `wrap(-pi) = pi`.
pub fn wrap(theta: f64) -> Result<Angle> {
    if !theta.is_finite() {
        return Err(Error::invalid(format!("angle {theta} is not finite")));
    }
    Ok(Angle(wrap_raw(theta)))
}

/// Geodesic distance on the circle, in `[0, pi]`.
#[inline]
pub fn arc_distance(a: f64, b: f64) -> f64 {
    wrap_raw(a - b).abs()
}

/// Largest pairwise geodesic distance.
pub fn max_arc_spread(angles: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in angles.iter().enumerate() {
        for &b in &angles[i + 1..] {
            best = best.max(arc_distance(a, b));
        }
    }
    best
}

/// Modulus of the mean phasor, `|sum_k e^{i theta_k}| / N`.
pub fn order_parameter(s: &CircleSwarm) -> f64 {
    let sum: Complex64 = s.angles().iter().map(|&t| Complex64::from_polar(1.0, t)).sum();
    sum.norm() / s.n() as f64
}

/// Positions of `N >= 1` agents on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CircleSwarm {
    angles: Vec<f64>,
}

impl TryFrom<Vec<f64>> for CircleSwarm {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CircleSwarm> for Vec<f64> {
    fn from(s: CircleSwarm) -> Self {
        s.angles
    }
}

impl CircleSwarm {
    /// Wraps every angle; fails on an empty or non-finite input.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("a swarm needs at least one agent"));
        }
        let angles = angles
            .into_iter()
            .map(|t| wrap(t).map(Angle::value))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { angles })
    }

    /// Uniform spacing: agent `k` at `offset + k * spacing`.
    pub fn splay(n: usize, spacing: f64, offset: f64) -> Result<Self> {
        Self::new((0..n).map(|k| offset + k as f64 * spacing).collect())
    }

    pub fn synchronized(n: usize, at: f64) -> Result<Self> {
        Self::new(vec![at; n])
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, k: usize) -> Angle {
        Angle(self.angles[k])
    }

    /// Uniform rotation by `offset`.
    pub fn rotated(&self, offset: f64) -> Self {
        Self {
            angles: self.angles.iter().map(|t| wrap_raw(t + offset)).collect(),
        }
    }

    /// Unit vectors `e^{i theta_k}`.
    pub fn phasors(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
    }

    /// Largest pairwise geodesic distance.
    pub fn spread(&self) -> f64 {
        max_arc_spread(&self.angles)
    }

    /// Largest distance between the two swarms, agent by agent.
    pub fn distance_to(&self, other: &CircleSwarm) -> f64 {
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(&a, &b)| arc_distance(a, b))
            .fold(0.0, f64::max)
    }

    /// Largest distance between the two configurations, i.e. after removing
    /// the best common rotation aligning agent 0.
    pub fn configuration_distance(&self, other: &CircleSwarm) -> f64 {
        let shift = other.angles[0] - self.angles[0];
        self.rotated(shift).distance_to(other)
    }

    /// All agents lie strictly within `half_width` of `center`.
    pub fn within_arc(&self, center: f64, half_width: f64) -> bool {
        self.angles.iter().all(|&t| arc_distance(t, center) < half_width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_examples() {
        assert!(arc_distance(wrap(3.0 * PI).unwrap().value(), PI) < 1e-12);
        assert_eq!(wrap(-PI).unwrap().value(), PI);
        assert_eq!(wrap(0.5).unwrap().value(), 0.5);
        assert_eq!(wrap(PI).unwrap().value(), PI);
        assert!(wrap(f64::NAN).is_err());
        assert!(wrap(f64::INFINITY).is_err());
    }

    #[test]
    fn order_parameter_examples() {
        assert!((order_parameter(&CircleSwarm::synchronized(4, 1.0).unwrap()) - 1.0).abs() < 1e-15);
        let splay = CircleSwarm::splay(5, TAU / 5.0, 0.3).unwrap();
        assert!(order_parameter(&splay) < 1e-15);
        let two = CircleSwarm::new(vec![0.0, PI / 2.0]).unwrap();
        assert!((order_parameter(&two) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spread_and_arcs() {
        let s = CircleSwarm::new(vec![3.0, -3.0]).unwrap();
        assert!((s.spread() - (TAU - 6.0)).abs() < 1e-12);
        assert!(s.within_arc(PI, 0.3));
        assert!(!s.within_arc(0.0, 3.0));
        assert!(CircleSwarm::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn wrap_is_canonical(theta in -1e3f64..1e3) {
            let w = wrap(theta).unwrap().value();
            prop_assert!(w > -PI && w <= PI);
            prop_assert_eq!(wrap(w).unwrap().value(), w);
            prop_assert_eq!(wrap(theta * 1e-18).unwrap().value(), theta * 1e-18);
            prop_assert!(arc_distance(wrap(theta + TAU).unwrap().value(), w) < 1e-9);
            prop_assert!(((theta - w) / TAU - ((theta - w) / TAU).round()).abs() < 1e-9);
        }
    }
}
