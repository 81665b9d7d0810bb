//! Wave equation with kinetic boundary conditions.
//!
//! The semi-discrete problem is the index-3 DAE
//!
//! ```text
//! [M_Ω    ] [u'']   [A_Ω    ] [u]         [f_Ω(t, u)]
//! [    M_Γ] [p''] + [    A_Γ] [p] + Bᵀλ = [f_Γ(t, p)],    B (u; p) = 0,
//! ```
//!
//! with `B = [0 M_Γ −M_Γ]`, i.e. the trace `u2` of `u` equals `p`. The
//! splitting schemes never form `λ`: the bulk subproblem sees `p` (and an
//! approximation of `p''`) as Dirichlet data, the boundary subproblem sees
//! the freshly updated interior values. The monolithic reference eliminates
//! `p` and `λ` by substituting `p = u2`.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{BilinearParams, BlockSystem, CouplingKind};
use crate::error::{check_len, Error, Result};
use crate::linalg::{add_scaled, concat, LinearSolveOptions, PreparedSolver};
use crate::mesh::Mesh;
use crate::reaction::Reaction;
use crate::splitting::{Composition, SplittingScheme, Substep};
use crate::timestep::{CrankNicolson, SecondOrderSystem, StepState};
use crate::trajectory::{step_count, Run, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct KineticState {
    /// Interior bulk dofs.
    pub u1: Vec<f64>,
    /// Bulk trace dofs.
    pub u2: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    /// Approximation of `p''`.
    pub pdd: Vec<f64>,
    pub t: f64,
}

impl KineticState {
    pub fn u(&self) -> Vec<f64> {
        concat(&self.u1, &self.u2)
    }

    pub fn w(&self) -> Vec<f64> {
        concat(&self.w1, &self.w2)
    }

    /// `max |u2 − p|`.
    pub fn constraint_deviation(&self) -> f64 {
        self.u2.iter().zip(&self.p).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max)
    }

    fn sample(&self) -> Sample {
        Sample {
            t: self.t,
            bulk: self.u(),
            bulk_velocity: self.w(),
            surface: self.p.clone(),
            surface_velocity: self.r.clone(),
        }
    }
}

/// Second derivatives and multiplier consistent with the constraint at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Accelerations {
    pub udd: Vec<f64>,
    pub pdd: Vec<f64>,
    pub lambda: Vec<f64>,
}

pub struct KineticProblem {
    pub blocks: BlockSystem,
    pub params: BilinearParams,
    pub f_bulk: Reaction,
    pub f_surf: Reaction,
    pub final_time: f64,
    pub solver: LinearSolveOptions,
    bulk_sys: SecondOrderSystem,
    surf_sys: SecondOrderSystem,
    full_sys: SecondOrderSystem,
}

impl KineticProblem {
    pub fn new(mesh: &Mesh, params: BilinearParams, f_bulk: Reaction, f_surf: Reaction, final_time: f64) -> Result<Self> {
        let blocks = BlockSystem::assemble(mesh, &params, CouplingKind::Kinetic)?;
        Self::from_blocks(blocks, params, f_bulk, f_surf, final_time)
    }

    pub fn from_blocks(
        blocks: BlockSystem,
        params: BilinearParams,
        f_bulk: Reaction,
        f_surf: Reaction,
        final_time: f64,
    ) -> Result<Self> {
        if !(final_time > 0.0) {
            return Err(Error::InvalidArgument("final time must be positive"));
        }
        let (n, n1) = (blocks.n_bulk, blocks.n_inner());
        let bulk_sys = SecondOrderSystem::new(blocks.m11.clone(), None, blocks.a11.clone())?;
        let surf_sys = SecondOrderSystem::new(blocks.m_surf.clone(), None, blocks.a_surf.clone())?;
        let full_m = add_scaled(&blocks.m_bulk, &blocks.m_surf.embed(n, n, n1, n1)?, 1.0, 1.0)?;
        let full_a = add_scaled(&blocks.a_bulk, &blocks.a_surf.embed(n, n, n1, n1)?, 1.0, 1.0)?;
        let full_sys = SecondOrderSystem::new(full_m, None, full_a)?;
        Ok(Self {
            blocks,
            params,
            f_bulk,
            f_surf,
            final_time,
            solver: LinearSolveOptions::default(),
            bulk_sys,
            surf_sys,
            full_sys,
        })
    }

    pub fn n_inner(&self) -> usize {
        self.blocks.n_inner()
    }

    /// System with `p` and `λ` eliminated: mass `M_Ω + embed(M_Γ)`, stiffness `A_Ω + embed(A_Γ)`.
    pub fn eliminated_system(&self) -> &SecondOrderSystem {
        &self.full_sys
    }

    /// `f_Ω(t, u)` as a bulk vector (`f1` leading, `f2` trailing).
    pub fn bulk_load(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        self.f_bulk.load(&self.blocks.m_bulk, t, u)
    }

    pub fn surface_load(&self, t: f64, p: &[f64]) -> Result<Vec<f64>> {
        self.f_surf.load(&self.blocks.m_surf, t, p)
    }

    fn eliminated_load(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        let n1 = self.n_inner();
        let mut f = self.bulk_load(t, u)?;
        let fs = self.surface_load(t, &u[n1..])?;
        f[n1..].iter_mut().zip(&fs).for_each(|(a, b)| *a += b);
        Ok(f)
    }

    /// Solves the saddle-point system for `(u'', p'', λ)` at time `t`, given positions
    /// satisfying `u2 = p`. The constraint row `B (u''; p'') = 0` is enforced by
    /// eliminating `p'' = u2''`; `λ` then follows from the surface rows.
    pub fn accelerations(&self, t: f64, u: &[f64], p: &[f64]) -> Result<Accelerations> {
        let (n, n1) = (self.blocks.n_bulk, self.n_inner());
        check_len("kinetic bulk position", n, u.len())?;
        check_len("kinetic surface position", self.blocks.n_surf, p.len())?;
        let fb = self.bulk_load(t, u)?;
        let fs = self.surface_load(t, p)?;
        let mut rhs = fb;
        self.blocks.a_bulk.spmv_acc(-1.0, u, &mut rhs)?;
        let ap = self.blocks.a_surf.spmv(p)?;
        for (j, r) in rhs[n1..].iter_mut().enumerate() {
            *r += fs[j] - ap[j];
        }
        let mass = PreparedSolver::spd(&self.full_sys.m, &self.solver)?;
        let udd = mass.solve(&rhs)?;
        let pdd = udd[n1..].to_vec();
        // M_Γ λ = M_Γ p'' + A_Γ p − f_Γ
        let surf_mass = PreparedSolver::spd(&self.blocks.m_surf, &self.solver)?;
        let rest: Vec<f64> = ap.iter().zip(&fs).map(|(a, f)| a - f).collect();
        let corr = surf_mass.solve(&rest)?;
        let lambda = pdd.iter().zip(&corr).map(|(a, b)| a + b).collect();
        Ok(Accelerations { udd, pdd, lambda })
    }
}

/// Builds the initial state from bulk data: `p = u2`, `r = w2`, and `p''` from the saddle-point solve.
pub fn consistent_init(prob: &KineticProblem, u0: &[f64], w0: &[f64]) -> Result<KineticState> {
    let (n, n1) = (prob.blocks.n_bulk, prob.n_inner());
    check_len("initial position", n, u0.len())?;
    check_len("initial velocity", n, w0.len())?;
    let p = u0[n1..].to_vec();
    let acc = prob.accelerations(0.0, u0, &p)?;
    Ok(KineticState {
        u1: u0[..n1].to_vec(),
        u2: p.clone(),
        w1: w0[..n1].to_vec(),
        w2: w0[n1..].to_vec(),
        r: w0[n1..].to_vec(),
        p,
        pdd: acc.pdd,
        t: 0.0,
    })
}

/// `½ (uᵀA_Ω u + pᵀA_Γ p + wᵀM_Ω w + rᵀM_Γ r)`.
pub fn energy_kinetic(prob: &KineticProblem, s: &KineticState) -> Result<f64> {
    prob.blocks.energy(&s.u(), &s.w(), &s.p, &s.r)
}

/// Splitting integrator prepared for one `(problem, scheme, τ)` triple.
pub struct KineticSplitting<'a> {
    prob: &'a KineticProblem,
    scheme: SplittingScheme,
    tau: f64,
    bulk: Substep<'a>,
    surf: Substep<'a>,
}

impl<'a> KineticSplitting<'a> {
    pub fn new(prob: &'a KineticProblem, scheme: SplittingScheme, tau: f64) -> Result<Self> {
        let bulk_tau = match scheme.composition {
            Composition::Lie => tau,
            Composition::Strang => 0.5 * tau,
        };
        Ok(Self {
            prob,
            scheme,
            tau,
            bulk: Substep::new(scheme.substepper, &prob.bulk_sys, bulk_tau, &prob.solver)?,
            surf: Substep::new(scheme.substepper, &prob.surf_sys, tau, &prob.solver)?,
        })
    }

    pub fn scheme(&self) -> SplittingScheme {
        self.scheme
    }

    /// `f1(t, [u1; p])`.
    fn f1(&self, t: f64, u1: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let mut f = self.prob.bulk_load(t, &concat(u1, p))?;
        f.truncate(u1.len());
        Ok(f)
    }

    /// `f_Γ(t, p) + f2(t, [u1; p])`.
    fn boundary_reaction(&self, t: f64, u1: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let fb = self.prob.bulk_load(t, &concat(u1, p))?;
        let mut fs = self.prob.surface_load(t, p)?;
        fs.iter_mut().zip(&fb[u1.len()..]).for_each(|(a, b)| *a += b);
        Ok(fs)
    }

    /// `−M12 p'' − A12 p`.
    fn bulk_coupling(&self, pdd: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let b = &self.prob.blocks;
        let mut c = vec![0.0; b.n_inner()];
        b.m12.spmv_acc(-1.0, pdd, &mut c)?;
        b.a12.spmv_acc(-1.0, p, &mut c)?;
        Ok(c)
    }

    /// `−M22 p'' − A22 p − M21 u1'' − A21 u1`.
    fn boundary_coupling(&self, pdd: &[f64], p: &[f64], u1dd: &[f64], u1: &[f64]) -> Result<Vec<f64>> {
        let b = &self.prob.blocks;
        let mut c = vec![0.0; b.n_surf];
        b.m22.spmv_acc(-1.0, pdd, &mut c)?;
        b.a22.spmv_acc(-1.0, p, &mut c)?;
        b.m21.spmv_acc(-1.0, u1dd, &mut c)?;
        b.a21.spmv_acc(-1.0, u1, &mut c)?;
        Ok(c)
    }

    pub fn step(&self, s: &KineticState) -> Result<KineticState> {
        match self.scheme.composition {
            Composition::Lie => self.lie(s),
            Composition::Strang => self.strang(s),
        }
    }

    fn lie(&self, s: &KineticState) -> Result<KineticState> {
        let (t, tau) = (s.t, self.tau);
        let c1 = self.bulk_coupling(&s.pdd, &s.p)?;
        let (u1, w1, _) = self.bulk.advance(&s.u1, &s.w1, t, &c1, |t, u1| self.f1(t, u1, &s.p), None)?;
        let u1dd: Vec<f64> = w1.iter().zip(&s.w1).map(|(a, b)| (a - b) / tau).collect();

        let c2 = self.boundary_coupling(&s.pdd, &s.p, &u1dd, &u1)?;
        let (p, r, _) = self.surf.advance(&s.p, &s.r, t, &c2, |t, p| self.boundary_reaction(t, &u1, p), None)?;
        let pdd = r.iter().zip(&s.r).map(|(a, b)| (a - b) / tau).collect();
        Ok(KineticState { u1, u2: p.clone(), w1, w2: r.clone(), p, r, pdd, t: t + tau })
    }

    fn strang(&self, s: &KineticState) -> Result<KineticState> {
        let (t, tau) = (s.t, self.tau);
        let c1 = self.bulk_coupling(&s.pdd, &s.p)?;
        let (u1h, w1h, f1h) = self.bulk.advance(&s.u1, &s.w1, t, &c1, |t, u1| self.f1(t, u1, &s.p), None)?;
        let u1dd: Vec<f64> = w1h.iter().zip(&s.w1).map(|(a, b)| 2.0 * (a - b) / tau).collect();

        let c2 = self.boundary_coupling(&s.pdd, &s.p, &u1dd, &u1h)?;
        let (p, r, _) = self.surf.advance(&s.p, &s.r, t, &c2, |t, p| self.boundary_reaction(t, &u1h, p), None)?;
        let pdd: Vec<f64> = r.iter().zip(&s.r).map(|(a, b)| (a - b) / tau).collect();

        let c3 = self.bulk_coupling(&pdd, &p)?;
        let (u1, w1, _) =
            self.bulk.advance(&u1h, &w1h, t + 0.5 * tau, &c3, |t, u1| self.f1(t, u1, &p), Some(&f1h))?;
        Ok(KineticState { u1, u2: p.clone(), w1, w2: r.clone(), p, r, pdd, t: t + tau })
    }

    /// Integrates `steps` steps, sampling every `sample_every` steps (and at the start).
    pub fn run(&self, init: &KineticState, steps: usize, sample_every: usize) -> Result<Run> {
        if sample_every == 0 {
            return Err(Error::InvalidArgument("sample interval must be positive"));
        }
        let mut run = Run::default();
        let mut s = init.clone();
        run.trajectory.samples.push(s.sample());
        run.energies.push(energy_kinetic(self.prob, &s)?);
        for n in 1..=steps {
            s = self.step(&s)?;
            let dev = s.constraint_deviation();
            if dev != 0.0 {
                run.constraint_violations += 1;
            }
            run.max_constraint_deviation = run.max_constraint_deviation.max(dev);
            run.energies.push(energy_kinetic(self.prob, &s)?);
            if n % sample_every == 0 {
                run.trajectory.samples.push(s.sample());
            }
        }
        Ok(run)
    }
}

/// One Lie step (`substepper` chosen by `scheme`) with freshly prepared solvers.
pub fn lie_step(prob: &KineticProblem, s: &KineticState, tau: f64, substepper: crate::splitting::Substepper) -> Result<KineticState> {
    let scheme = SplittingScheme { composition: Composition::Lie, substepper };
    KineticSplitting::new(prob, scheme, tau)?.step(s)
}

pub fn strang_step(prob: &KineticProblem, s: &KineticState, tau: f64, substepper: crate::splitting::Substepper) -> Result<KineticState> {
    let scheme = SplittingScheme { composition: Composition::Strang, substepper };
    KineticSplitting::new(prob, scheme, tau)?.step(s)
}

/// Monolithic IMEX Crank-Nicolson on the eliminated system (`p = u2`), sampled every `sample_dt`.
pub fn reference_solve(prob: &KineticProblem, u0: &[f64], w0: &[f64], tau_ref: f64, sample_dt: f64) -> Result<Run> {
    let n1 = prob.n_inner();
    check_len("initial position", prob.blocks.n_bulk, u0.len())?;
    check_len("initial velocity", prob.blocks.n_bulk, w0.len())?;
    let steps = step_count(tau_ref, prob.final_time)?;
    let every = step_count(tau_ref, sample_dt)?;
    step_count(sample_dt, prob.final_time)?;
    let cn = CrankNicolson::new(&prob.full_sys, tau_ref, &prob.solver)?;
    let sample = |s: &StepState| Sample {
        t: s.t,
        bulk: s.u.clone(),
        bulk_velocity: s.w.clone(),
        surface: s.u[n1..].to_vec(),
        surface_velocity: s.w[n1..].to_vec(),
    };
    let mut run = Run::default();
    let mut s = StepState::new(u0.to_vec(), w0.to_vec(), 0.0);
    run.trajectory.samples.push(sample(&s));
    run.energies.push(prob.full_sys.energy(&s)?);
    let mut f_left = prob.eliminated_load(0.0, &s.u)?;
    for n in 1..=steps {
        let t_right = n as f64 * tau_ref;
        let mut f_right = Ok(Vec::new());
        s = cn.step(&s, &f_left, |u| {
            f_right = prob.eliminated_load(t_right, u);
            f_right.clone().unwrap_or_else(|_| vec![0.0; u.len()])
        })?;
        s.t = t_right;
        f_left = f_right?;
        run.energies.push(prob.full_sys.energy(&s)?);
        if n % every == 0 {
            run.trajectory.samples.push(sample(&s));
        }
    }
    Ok(run)
}

/// Runs a splitting scheme from bulk initial data over `[0, T]`.
pub fn run_scheme(
    prob: &KineticProblem,
    scheme: SplittingScheme,
    u0: &[f64],
    w0: &[f64],
    tau: f64,
    sample_dt: f64,
) -> Result<Run> {
    let steps = step_count(tau, prob.final_time)?;
    let every = step_count(tau, sample_dt)?;
    step_count(sample_dt, prob.final_time)?;
    let init = consistent_init(prob, u0, w0)?;
    KineticSplitting::new(prob, scheme, tau)?.run(&init, steps, every)
}
