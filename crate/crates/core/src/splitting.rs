//! Scheme selection shared by the kinetic and acoustic splittings.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Result;
use crate::linalg::LinearSolveOptions;
use crate::timestep::{CrankNicolson, ImplicitEuler, SecondOrderSystem, StepState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Composition {
    /// Bulk over the full step, then boundary over the full step.
    Lie,
    /// Half bulk step, full boundary step, half bulk step.
    Strang,
}

/// Integrator applied to each subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Substepper {
    Euler,
    Cn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SplittingScheme {
    pub composition: Composition,
    pub substepper: Substepper,
}

impl SplittingScheme {
    pub const LIE_EULER: Self = Self { composition: Composition::Lie, substepper: Substepper::Euler };
    pub const LIE_CN: Self = Self { composition: Composition::Lie, substepper: Substepper::Cn };
    pub const STRANG_EULER: Self = Self { composition: Composition::Strang, substepper: Substepper::Euler };
    pub const STRANG_CN: Self = Self { composition: Composition::Strang, substepper: Substepper::Cn };
    pub const ALL: [Self; 4] = [Self::LIE_EULER, Self::LIE_CN, Self::STRANG_EULER, Self::STRANG_CN];

    pub fn name(&self) -> &'static str {
        match (self.composition, self.substepper) {
            (Composition::Lie, Substepper::Euler) => "lie-euler",
            (Composition::Lie, Substepper::Cn) => "lie-cn",
            (Composition::Strang, Substepper::Euler) => "strang-euler",
            (Composition::Strang, Substepper::Cn) => "strang-cn",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for SplittingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subsystem integrator prepared for one step size.
pub(crate) enum Substep<'a> {
    Euler(ImplicitEuler<'a>),
    Cn(CrankNicolson<'a>),
}

impl<'a> Substep<'a> {
    pub(crate) fn new(kind: Substepper, sys: &'a SecondOrderSystem, tau: f64, opts: &LinearSolveOptions) -> Result<Self> {
        Ok(match kind {
            Substepper::Euler => Substep::Euler(ImplicitEuler::new(sys, tau, opts)?),
            Substepper::Cn => Substep::Cn(CrankNicolson::new(sys, tau, opts)?),
        })
    }

    /// Advances `(u, w)` from `t` over one substep with load `reaction(t, u) + coupling`.
    ///
    /// Euler evaluates the reaction explicitly at the new time and the old
    /// state. Crank-Nicolson uses `reaction(t, u)` (or `left_reaction` when
    /// given) on the left and the updated state on the right. Returns the new
    /// position, velocity and the right reaction value.
    pub(crate) fn advance<R>(
        &self,
        u: &[f64],
        w: &[f64],
        t: f64,
        coupling: &[f64],
        reaction: R,
        left_reaction: Option<&[f64]>,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)>
    where
        R: Fn(f64, &[f64]) -> Result<Vec<f64>>,
    {
        let state = StepState::new(u.to_vec(), w.to_vec(), t);
        let plus = |a: &[f64]| -> Vec<f64> { a.iter().zip(coupling).map(|(x, c)| x + c).collect() };
        match self {
            Substep::Euler(st) => {
                let g = reaction(t + st.tau(), u)?;
                let next = st.step(&state, &plus(&g))?;
                Ok((next.u, next.w, g))
            }
            Substep::Cn(st) => {
                let left = match left_reaction {
                    Some(l) => l.to_vec(),
                    None => reaction(t, u)?,
                };
                let t_right = t + st.tau();
                let mut right: Result<Vec<f64>> = Ok(Vec::new());
                let next = st.step(&state, &plus(&left), |u_new| {
                    right = reaction(t_right, u_new);
                    match &right {
                        Ok(g) => plus(g),
                        Err(_) => coupling.to_vec(),
                    }
                })?;
                Ok((next.u, next.w, right?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in SplittingScheme::ALL {
            assert_eq!(SplittingScheme::parse(s.name()), Some(s));
        }
        assert_eq!(SplittingScheme::parse("reference-cn"), None);
    }
}
