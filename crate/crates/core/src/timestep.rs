//! One-step integrators for `M u'' + D u' + A u = f` in first-order form with `w = u'`.
//!
//! Both steppers factor their system matrix once per step size. With `D`
//! absent the matrices are SPD and use the configured SPD solver; a present
//! `D` is expected to be skew, giving a positive-real matrix solved by LU.

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::{add_scaled, LinearSolveOptions, PreparedSolver, SparseMatrix};

#[derive(Debug, Clone)]
pub struct SecondOrderSystem {
    pub m: SparseMatrix,
    pub d: Option<SparseMatrix>,
    pub a: SparseMatrix,
}

impl SecondOrderSystem {
    pub fn new(m: SparseMatrix, d: Option<SparseMatrix>, a: SparseMatrix) -> Result<Self> {
        let n = m.nrows();
        check_len("mass matrix columns", n, m.ncols())?;
        check_len("stiffness rows", n, a.nrows())?;
        check_len("stiffness columns", n, a.ncols())?;
        if let Some(d) = &d {
            check_len("damping rows", n, d.nrows())?;
            check_len("damping columns", n, d.ncols())?;
        }
        Ok(Self { m, d, a })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// `M + c_d D + c_a A`, prepared for solves.
    fn prepare(&self, c_d: f64, c_a: f64, opts: &LinearSolveOptions) -> Result<PreparedSolver> {
        let k = add_scaled(&self.m, &self.a, 1.0, c_a)?;
        match &self.d {
            None => PreparedSolver::spd(&k, opts),
            Some(d) => PreparedSolver::positive_real(&add_scaled(&k, d, 1.0, c_d)?),
        }
    }

    /// `½ (wᵀ M w + uᵀ A u)`.
    pub fn energy(&self, s: &StepState) -> Result<f64> {
        Ok(0.5 * (self.m.quad_form(&s.w)? + self.a.quad_form(&s.u)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
}

impl StepState {
    pub fn new(u: Vec<f64>, w: Vec<f64>, t: f64) -> Self {
        Self { u, w, t }
    }

    fn check(&self, n: usize) -> Result<()> {
        check_len("state position", n, self.u.len())?;
        check_len("state velocity", n, self.w.len())
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("step size must be positive"))
    }
}

/// Implicit Euler prepared for one `(system, τ)` pair.
#[derive(Debug, Clone)]
pub struct ImplicitEuler<'a> {
    sys: &'a SecondOrderSystem,
    tau: f64,
    solver: PreparedSolver,
}

impl<'a> ImplicitEuler<'a> {
    pub fn new(sys: &'a SecondOrderSystem, tau: f64, opts: &LinearSolveOptions) -> Result<Self> {
        check_tau(tau)?;
        let solver = sys.prepare(tau, tau * tau, opts)?;
        Ok(Self { sys, tau, solver })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `(M + τD + τ²A) w' = M w − τ A u + τ f`, then `u' = u + τ w'`.
    /// `f_next` is the load at the new time level (explicit in the state for semi-linear problems).
    pub fn step(&self, s: &StepState, f_next: &[f64]) -> Result<StepState> {
        let n = self.sys.dim();
        s.check(n)?;
        check_len("implicit Euler load", n, f_next.len())?;
        let tau = self.tau;
        let mut rhs = self.sys.m.spmv(&s.w)?;
        self.sys.a.spmv_acc(-tau, &s.u, &mut rhs)?;
        rhs.iter_mut().zip(f_next).for_each(|(r, f)| *r += tau * f);
        let w = self.solver.solve(&rhs)?;
        let u = s.u.iter().zip(&w).map(|(u, w)| u + tau * w).collect();
        Ok(StepState { u, w, t: s.t + tau })
    }
}

/// Implicit-explicit Crank-Nicolson prepared for one `(system, τ)` pair.
#[derive(Debug, Clone)]
pub struct CrankNicolson<'a> {
    sys: &'a SecondOrderSystem,
    tau: f64,
    stage: PreparedSolver,
    mass: PreparedSolver,
}

impl<'a> CrankNicolson<'a> {
    pub fn new(sys: &'a SecondOrderSystem, tau: f64, opts: &LinearSolveOptions) -> Result<Self> {
        check_tau(tau)?;
        let stage = sys.prepare(0.5 * tau, 0.25 * tau * tau, opts)?;
        let mass = PreparedSolver::spd(&sys.m, opts)?;
        Ok(Self { sys, tau, stage, mass })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Three-stage update:
    ///
    /// ```text
    /// (M + τ/2 D + τ²/4 A) w½ = M w − τ/2 A u + τ/2 f_left
    /// u' = u + τ w½
    /// M w' = 2 M w½ − M w + τ/2 (f_right − f_left)
    /// ```
    ///
    /// `f_right` receives the updated position `u'`.
    pub fn step<F>(&self, s: &StepState, f_left: &[f64], f_right: F) -> Result<StepState>
    where
        F: FnOnce(&[f64]) -> Vec<f64>,
    {
        let n = self.sys.dim();
        s.check(n)?;
        check_len("Crank-Nicolson left load", n, f_left.len())?;
        let half = 0.5 * self.tau;
        let mw = self.sys.m.spmv(&s.w)?;
        let mut rhs = mw.clone();
        self.sys.a.spmv_acc(-half, &s.u, &mut rhs)?;
        rhs.iter_mut().zip(f_left).for_each(|(r, f)| *r += half * f);
        let w_mid = self.stage.solve(&rhs)?;
        let u: Vec<f64> = s.u.iter().zip(&w_mid).map(|(u, w)| u + self.tau * w).collect();

        let f_r = f_right(&u);
        check_len("Crank-Nicolson right load", n, f_r.len())?;
        let mw_mid = self.sys.m.spmv(&w_mid)?;
        let correction: Vec<f64> =
            (0..n).map(|i| 2.0 * mw_mid[i] - mw[i] + half * (f_r[i] - f_left[i])).collect();
        let w = self.mass.solve(&correction)?;
        Ok(StepState { u, w, t: s.t + self.tau })
    }
}

/// One implicit Euler step with a freshly factored system.
pub fn implicit_euler_step(sys: &SecondOrderSystem, s: &StepState, tau: f64, f_eval: &[f64]) -> Result<StepState> {
    ImplicitEuler::new(sys, tau, &LinearSolveOptions::default())?.step(s, f_eval)
}

/// One IMEX Crank-Nicolson step with freshly factored systems.
pub fn cn_imex_step<F>(sys: &SecondOrderSystem, s: &StepState, tau: f64, f_left: &[f64], f_right_eval: F) -> Result<StepState>
where
    F: FnOnce(&[f64]) -> Vec<f64>,
{
    CrankNicolson::new(sys, tau, &LinearSolveOptions::default())?.step(s, f_left, f_right_eval)
}
