//! Fixed-step classical Runge–Kutta integration on flat state vectors.

use crate::{Error, Result};

/// Reusable RK4 stage buffers for a state of fixed dimension.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `y` from `t` to `t + h` for `dy/dt = f(t, y)`.
    ///
    /// `f(t, y, out)` must overwrite `out` with the derivative.
    pub fn step<F>(&mut self, f: &mut F, t: f64, h: f64, y: &mut [f64])
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let half = 0.5 * h;
        f(t, y, &mut self.k1);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + half * self.k1[i];
        }
        f(t + half, &self.tmp, &mut self.k2);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + half * self.k2[i];
        }
        f(t + half, &self.tmp, &mut self.k3);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        f(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for i in 0..y.len() {
            y[i] += sixth * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Step grid `0 = t_0 < t_1 < ... < t_m = t_end` with `t_i = i h` except for
/// a possibly shorter final step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGrid {
    pub h: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl StepGrid {
    pub fn new(h: f64, t_end: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("step size must be positive, got {h}")));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid(format!("t_end must be positive, got {t_end}")));
        }
        let steps = ((t_end / h) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self { h, t_end, steps })
    }

    /// Start time of step `i`.
    pub fn time(&self, i: usize) -> f64 {
        if i >= self.steps {
            self.t_end
        } else {
            i as f64 * self.h
        }
    }

    /// Length of step `i`.
    pub fn step_len(&self, i: usize) -> f64 {
        self.time(i + 1) - self.time(i)
    }
}
