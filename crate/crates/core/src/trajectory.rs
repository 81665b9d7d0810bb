use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Bulk and surface fields at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub bulk: Vec<f64>,
    pub bulk_velocity: Vec<f64>,
    /// `p` for kinetic, `δ` for acoustic problems.
    pub surface: Vec<f64>,
    pub surface_velocity: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// Number of steps of size `step` covering `span`, rejecting non-integral ratios.
pub fn step_count(step: f64, span: f64) -> Result<usize> {
    if !(step > 0.0) || !(span >= 0.0) {
        return Err(Error::InvalidArgument("step and span must be positive"));
    }
    let n = libm::round(span / step);
    if libm::fabs(n * step - span) > 1e-9 * step.max(span) {
        return Err(Error::IncommensurateStep { step, span });
    }
    Ok(n as usize)
}

/// Integration output: sampled fields, per-step energies and the constraint record.
#[derive(Debug, Clone, Default)]
pub struct Run {
    pub trajectory: Trajectory,
    /// Energy at `t = nτ` for every step `n`, starting with the initial state.
    pub energies: Vec<f64>,
    /// Steps after which a constraint was not satisfied exactly (kinetic problems only).
    pub constraint_violations: usize,
    pub max_constraint_deviation: f64,
}
