//! Wave equation with acoustic boundary conditions.
//!
//! Semi-discrete form, with `B = [0 M_Γ]`:
//!
//! ```text
//! M_Ω u'' + A_Ω u = f_Ω(t, u) + Bᵀ δ'
//! M_Γ δ'' + A_Γ δ = f_Γ(t, δ) − B u'
//! ```
//!
//! Written as one system the velocity coupling is `D = [[0, −Bᵀ], [B, 0]]`,
//! which is skew. The splittings treat the coupling velocity of the other
//! subsystem as frozen data.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{BilinearParams, BlockSystem, CouplingKind};
use crate::error::{check_len, Error, Result};
use crate::linalg::{concat, LinearSolveOptions, SparseMatrix};
use crate::mesh::Mesh;
use crate::reaction::Reaction;
use crate::splitting::{Composition, SplittingScheme, Substep, Substepper};
use crate::timestep::{CrankNicolson, SecondOrderSystem, StepState};
use crate::trajectory::{step_count, Run, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticState {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub delta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub t: f64,
}

impl AcousticState {
    pub fn zeros(n_bulk: usize, n_surf: usize) -> Self {
        Self { u: vec![0.0; n_bulk], w: vec![0.0; n_bulk], delta: vec![0.0; n_surf], zeta: vec![0.0; n_surf], t: 0.0 }
    }

    fn sample(&self) -> Sample {
        Sample {
            t: self.t,
            bulk: self.u.clone(),
            bulk_velocity: self.w.clone(),
            surface: self.delta.clone(),
            surface_velocity: self.zeta.clone(),
        }
    }
}

pub struct AcousticProblem {
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

impl AcousticProblem {
    pub fn new(mesh: &Mesh, params: BilinearParams, f_bulk: Reaction, f_surf: Reaction, final_time: f64) -> Result<Self> {
        let blocks = BlockSystem::assemble(mesh, &params, CouplingKind::Acoustic)?;
        Self::from_blocks(blocks, params, f_bulk, f_surf, final_time)
    }

    /// The coupling is read from `blocks.coupling`, so zeroing it decouples the subsystems.
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
        let (n, ns) = (blocks.n_bulk, blocks.n_surf);
        check_len("acoustic coupling rows", ns, blocks.coupling.nrows())?;
        check_len("acoustic coupling columns", n, blocks.coupling.ncols())?;
        let bulk_sys = SecondOrderSystem::new(blocks.m_bulk.clone(), None, blocks.a_bulk.clone())?;
        let surf_sys = SecondOrderSystem::new(blocks.m_surf.clone(), None, blocks.a_surf.clone())?;
        let bt = blocks.coupling.transpose().scaled(-1.0);
        let d = SparseMatrix::from_blocks(n + ns, n + ns, &[(0, n, &bt), (n, 0, &blocks.coupling)])?;
        let m = SparseMatrix::from_blocks(n + ns, n + ns, &[(0, 0, &blocks.m_bulk), (n, n, &blocks.m_surf)])?;
        let a = SparseMatrix::from_blocks(n + ns, n + ns, &[(0, 0, &blocks.a_bulk), (n, n, &blocks.a_surf)])?;
        let full_sys = SecondOrderSystem::new(m, Some(d), a)?;
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

    /// `blkdiag(M_Ω, M_Γ)`, `[[0, −Bᵀ], [B, 0]]`, `blkdiag(A_Ω, A_Γ)`.
    pub fn full_system(&self) -> &SecondOrderSystem {
        &self.full_sys
    }

    pub fn bulk_load(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        self.f_bulk.load(&self.blocks.m_bulk, t, u)
    }

    pub fn surface_load(&self, t: f64, delta: &[f64]) -> Result<Vec<f64>> {
        self.f_surf.load(&self.blocks.m_surf, t, delta)
    }

    fn full_load(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.blocks.n_bulk;
        Ok(concat(&self.bulk_load(t, &x[..n])?, &self.surface_load(t, &x[n..])?))
    }
}

/// `½ (uᵀA_Ω u + δᵀA_Γ δ + wᵀM_Ω w + ζᵀM_Γ ζ)`.
pub fn energy_acoustic(prob: &AcousticProblem, s: &AcousticState) -> Result<f64> {
    prob.blocks.energy(&s.u, &s.w, &s.delta, &s.zeta)
}

pub struct AcousticSplitting<'a> {
    prob: &'a AcousticProblem,
    scheme: SplittingScheme,
    tau: f64,
    bulk: Substep<'a>,
    surf: Substep<'a>,
}

impl<'a> AcousticSplitting<'a> {
    pub fn new(prob: &'a AcousticProblem, scheme: SplittingScheme, tau: f64) -> Result<Self> {
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

    pub fn step(&self, s: &AcousticState) -> Result<AcousticState> {
        let (t, tau) = (s.t, self.tau);
        let b = &self.prob.blocks.coupling;
        let bulk_reaction = |t: f64, u: &[f64]| self.prob.bulk_load(t, u);
        let surf_reaction = |t: f64, d: &[f64]| self.prob.surface_load(t, d);
        match self.scheme.composition {
            Composition::Lie => {
                let c1 = b.transpose_spmv(&s.zeta)?;
                let (u, w, _) = self.bulk.advance(&s.u, &s.w, t, &c1, bulk_reaction, None)?;
                let c2 = b.spmv(&w)?.into_iter().map(|v| -v).collect::<Vec<_>>();
                let (delta, zeta, _) = self.surf.advance(&s.delta, &s.zeta, t, &c2, surf_reaction, None)?;
                Ok(AcousticState { u, w, delta, zeta, t: t + tau })
            }
            Composition::Strang => {
                let c1 = b.transpose_spmv(&s.zeta)?;
                let (uh, wh, fh) = self.bulk.advance(&s.u, &s.w, t, &c1, bulk_reaction, None)?;
                let c2 = b.spmv(&wh)?.into_iter().map(|v| -v).collect::<Vec<_>>();
                let (delta, zeta, _) = self.surf.advance(&s.delta, &s.zeta, t, &c2, surf_reaction, None)?;
                let c3 = b.transpose_spmv(&zeta)?;
                let left = match self.scheme.substepper {
                    Substepper::Cn => Some(fh.as_slice()),
                    Substepper::Euler => None,
                };
                let (u, w, _) = self.bulk.advance(&uh, &wh, t + 0.5 * tau, &c3, bulk_reaction, left)?;
                Ok(AcousticState { u, w, delta, zeta, t: t + tau })
            }
        }
    }

    pub fn run(&self, init: &AcousticState, steps: usize, sample_every: usize) -> Result<Run> {
        if sample_every == 0 {
            return Err(Error::InvalidArgument("sample interval must be positive"));
        }
        let mut run = Run::default();
        let mut s = init.clone();
        run.trajectory.samples.push(s.sample());
        run.energies.push(energy_acoustic(self.prob, &s)?);
        for n in 1..=steps {
            s = self.step(&s)?;
            run.energies.push(energy_acoustic(self.prob, &s)?);
            if n % sample_every == 0 {
                run.trajectory.samples.push(s.sample());
            }
        }
        Ok(run)
    }
}

pub fn lie_euler_step(prob: &AcousticProblem, s: &AcousticState, tau: f64) -> Result<AcousticState> {
    AcousticSplitting::new(prob, SplittingScheme::LIE_EULER, tau)?.step(s)
}

pub fn strang_cn_step(prob: &AcousticProblem, s: &AcousticState, tau: f64) -> Result<AcousticState> {
    AcousticSplitting::new(prob, SplittingScheme::STRANG_CN, tau)?.step(s)
}

fn check_state(prob: &AcousticProblem, s: &AcousticState) -> Result<()> {
    let (n, ns) = (prob.blocks.n_bulk, prob.blocks.n_surf);
    check_len("acoustic u", n, s.u.len())?;
    check_len("acoustic w", n, s.w.len())?;
    check_len("acoustic delta", ns, s.delta.len())?;
    check_len("acoustic zeta", ns, s.zeta.len())
}

pub fn run_scheme(prob: &AcousticProblem, scheme: SplittingScheme, init: &AcousticState, tau: f64, sample_dt: f64) -> Result<Run> {
    check_state(prob, init)?;
    let steps = step_count(tau, prob.final_time)?;
    let every = step_count(tau, sample_dt)?;
    step_count(sample_dt, prob.final_time)?;
    AcousticSplitting::new(prob, scheme, tau)?.run(init, steps, every)
}

/// IMEX Crank-Nicolson on the full coupled system, sampled every `sample_dt`.
pub fn reference_solve(prob: &AcousticProblem, init: &AcousticState, tau_ref: f64, sample_dt: f64) -> Result<Run> {
    check_state(prob, init)?;
    let n = prob.blocks.n_bulk;
    let steps = step_count(tau_ref, prob.final_time)?;
    let every = step_count(tau_ref, sample_dt)?;
    step_count(sample_dt, prob.final_time)?;
    let cn = CrankNicolson::new(&prob.full_sys, tau_ref, &prob.solver)?;
    let state = |s: &StepState| AcousticState {
        u: s.u[..n].to_vec(),
        w: s.w[..n].to_vec(),
        delta: s.u[n..].to_vec(),
        zeta: s.w[n..].to_vec(),
        t: s.t,
    };
    let mut run = Run::default();
    let mut s = StepState::new(concat(&init.u, &init.delta), concat(&init.w, &init.zeta), init.t);
    run.trajectory.samples.push(init.sample());
    run.energies.push(energy_acoustic(prob, init)?);
    let mut f_left = prob.full_load(init.t, &s.u)?;
    for k in 1..=steps {
        let t_right = init.t + k as f64 * tau_ref;
        let mut f_right = Ok(Vec::new());
        s = cn.step(&s, &f_left, |x| {
            f_right = prob.full_load(t_right, x);
            f_right.clone().unwrap_or_else(|_| vec![0.0; x.len()])
        })?;
        s.t = t_right;
        f_left = f_right?;
        let st = state(&s);
        run.energies.push(energy_acoustic(prob, &st)?);
        if k % every == 0 {
            run.trajectory.samples.push(st.sample());
        }
    }
    Ok(run)
}
