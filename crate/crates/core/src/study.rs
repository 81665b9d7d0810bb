//! Convergence-study building blocks: initial data, error norms, order fits
//! and a per-point runner. Parallel orchestration and output live in `dynbc`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::acoustic::{self, AcousticProblem, AcousticState};
use crate::assembly::BilinearParams;
use crate::error::{Error, Result};
use crate::kinetic::{self, KineticProblem};
use crate::linalg::{add_scaled, SparseMatrix};
use crate::mesh::{generate_disc_mesh, Mesh};
use crate::reaction::Reaction;
use crate::splitting::SplittingScheme;
use crate::trajectory::{step_count, Run, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Kinetic,
    Acoustic,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Kinetic => "kinetic",
            Problem::Acoustic => "acoustic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "kinetic" => Some(Problem::Kinetic),
            "acoustic" => Some(Problem::Acoustic),
            _ => None,
        }
    }

    /// Name of the surface variable in output tables.
    pub fn surface_variable(&self) -> &'static str {
        match self {
            Problem::Kinetic => "p",
            Problem::Acoustic => "delta",
        }
    }
}

/// A splitting scheme, or monolithic Crank-Nicolson at the study step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Splitting(SplittingScheme),
    ReferenceCn,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Splitting(s) => s.name(),
            Scheme::ReferenceCn => "reference-cn",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "reference-cn" {
            return Some(Scheme::ReferenceCn);
        }
        SplittingScheme::parse(s).map(Scheme::Splitting)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Nonlinearity {
    #[default]
    None,
    /// `f_Ω(u) = −u³ + u`.
    AllenCahnBulk,
    /// `f_Γ(v) = −v³ + v`.
    AllenCahnSurface,
}

impl Nonlinearity {
    pub fn name(&self) -> &'static str {
        match self {
            Nonlinearity::None => "none",
            Nonlinearity::AllenCahnBulk => "allen-cahn-bulk",
            Nonlinearity::AllenCahnSurface => "allen-cahn-surface",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Nonlinearity::None, Nonlinearity::AllenCahnBulk, Nonlinearity::AllenCahnSurface].into_iter().find(|n| n.name() == s)
    }

    pub fn reactions(&self) -> (Reaction, Reaction) {
        match self {
            Nonlinearity::None => (Reaction::Zero, Reaction::Zero),
            Nonlinearity::AllenCahnBulk => (Reaction::AllenCahn, Reaction::Zero),
            Nonlinearity::AllenCahnSurface => (Reaction::Zero, Reaction::AllenCahn),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    LinfL2,
    LinfH1,
    L2L2,
    L2H1,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::LinfL2, Norm::LinfH1, Norm::L2L2, Norm::L2H1];

    pub fn name(&self) -> &'static str {
        match self {
            Norm::LinfL2 => "LinfL2",
            Norm::LinfH1 => "LinfH1",
            Norm::L2L2 => "L2L2",
            Norm::L2H1 => "L2H1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    Bulk,
    Surface,
}

/// Space-time errors of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormSet {
    pub linf_l2: f64,
    pub linf_h1: f64,
    pub l2_l2: f64,
    pub l2_h1: f64,
}

impl NormSet {
    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::LinfL2 => self.linf_l2,
            Norm::LinfH1 => self.linf_h1,
            Norm::L2L2 => self.l2_l2,
            Norm::L2H1 => self.l2_h1,
        }
    }
}

/// Mass and `H¹` Gram matrices used for spatial norms.
#[derive(Debug, Clone)]
pub struct NormMatrices {
    pub bulk_l2: SparseMatrix,
    pub bulk_h1: SparseMatrix,
    pub surf_l2: SparseMatrix,
    pub surf_h1: SparseMatrix,
}

impl NormMatrices {
    /// `H¹` uses the plain Laplacians (`β = 1`, no `κ` term).
    pub fn new(m_bulk: &SparseMatrix, a_bulk: &SparseMatrix, m_surf: &SparseMatrix, s_surf: &SparseMatrix) -> Result<Self> {
        Ok(Self {
            bulk_l2: m_bulk.clone(),
            bulk_h1: add_scaled(m_bulk, a_bulk, 1.0, 1.0)?,
            surf_l2: m_surf.clone(),
            surf_h1: add_scaled(m_surf, s_surf, 1.0, 1.0)?,
        })
    }
}

/// Errors of `traj` against `reference` on a common uniform grid with spacing `dt`.
///
/// `L∞` in time is the maximum over samples, `L²` in time the left rectangle
/// rule over all samples but the last.
pub fn error_norms(traj: &Trajectory, reference: &Trajectory, mats: &NormMatrices, dt: f64) -> Result<(NormSet, NormSet)> {
    if traj.len() != reference.len() || traj.is_empty() {
        return Err(Error::InvalidErrorData("trajectories must have the same nonzero number of samples"));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("sample spacing must be positive"));
    }
    let mut bulk = NormSet::default();
    let mut surf = NormSet::default();
    let last = traj.len() - 1;
    for (k, (a, b)) in traj.samples.iter().zip(&reference.samples).enumerate() {
        if libm::fabs(a.t - b.t) > 1e-9 * dt {
            return Err(Error::InvalidErrorData("sample times differ"));
        }
        let eb: Vec<f64> = a.bulk.iter().zip(&b.bulk).map(|(x, y)| x - y).collect();
        let es: Vec<f64> = a.surface.iter().zip(&b.surface).map(|(x, y)| x - y).collect();
        let vals = [
            (&mut bulk, mats.bulk_l2.quad_form(&eb)?, mats.bulk_h1.quad_form(&eb)?),
            (&mut surf, mats.surf_l2.quad_form(&es)?, mats.surf_h1.quad_form(&es)?),
        ];
        for (set, l2sq, h1sq) in vals {
            let (l2sq, h1sq) = (l2sq.max(0.0), h1sq.max(0.0));
            set.linf_l2 = set.linf_l2.max(libm::sqrt(l2sq));
            set.linf_h1 = set.linf_h1.max(libm::sqrt(h1sq));
            if k < last {
                set.l2_l2 += dt * l2sq;
                set.l2_h1 += dt * h1sq;
            }
        }
    }
    for set in [&mut bulk, &mut surf] {
        set.l2_l2 = libm::sqrt(set.l2_l2);
        set.l2_h1 = libm::sqrt(set.l2_h1);
    }
    Ok((bulk, surf))
}

/// Every `stride`-th sample, starting with the first.
pub fn subsample(traj: &Trajectory, stride: usize) -> Trajectory {
    Trajectory { samples: traj.samples.iter().step_by(stride.max(1)).cloned().collect() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orders {
    /// `log(e_i / e_{i+1}) / log(τ_i / τ_{i+1})` for neighbouring step sizes.
    pub pairwise: Vec<f64>,
    /// Mean of the pairwise orders.
    pub averaged: f64,
    /// Least-squares slope of `log e` against `log τ`.
    pub least_squares: f64,
}

pub fn fit_orders(taus: &[f64], errors: &[f64]) -> Result<Orders> {
    if taus.len() != errors.len() {
        return Err(Error::InvalidErrorData("step sizes and errors differ in length"));
    }
    if taus.len() < 3 {
        return Err(Error::InvalidErrorData("at least three step sizes are needed"));
    }
    if errors.iter().chain(taus).any(|e| !e.is_finite() || *e <= 0.0) {
        return Err(Error::InvalidErrorData("errors and step sizes must be positive and finite"));
    }
    let pairwise: Vec<f64> = (0..taus.len() - 1)
        .map(|i| libm::log(errors[i] / errors[i + 1]) / libm::log(taus[i] / taus[i + 1]))
        .collect();
    if pairwise.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidErrorData("repeated step size"));
    }
    let averaged = pairwise.iter().sum::<f64>() / pairwise.len() as f64;
    let xs: Vec<f64> = taus.iter().map(|t| libm::log(*t)).collect();
    let ys: Vec<f64> = errors.iter().map(|e| libm::log(*e)).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(Orders { pairwise, averaged, least_squares: sxy / sxx })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: Problem,
    pub schemes: Vec<Scheme>,
    pub h: f64,
    pub tau_list: Vec<f64>,
    pub tau_ref: f64,
    pub final_time: f64,
    pub beta: f64,
    pub kappa: f64,
    pub nonlinearity: Nonlinearity,
    pub norms: Vec<Norm>,
    /// Scale `k` of the acoustic displacement datum `(k/2π) (x² + y²)^0.6`.
    pub acoustic_k: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Kinetic,
            schemes: vec![Scheme::Splitting(SplittingScheme::LIE_EULER), Scheme::Splitting(SplittingScheme::STRANG_CN)],
            h: 0.09,
            tau_list: (4..=9).map(|k| libm::exp2(-(k as f64))).collect(),
            tau_ref: libm::exp2(-11.0),
            final_time: 1.0,
            beta: 1.0,
            kappa: 1.0,
            nonlinearity: Nonlinearity::None,
            norms: Norm::ALL.to_vec(),
            acoustic_k: 2.0 * PI,
        }
    }
}

impl StudyConfig {
    /// Finer mesh and reference step of the original experiments.
    pub fn paper_scale(mut self) -> Self {
        self.h = 0.02;
        self.tau_ref = libm::exp2(-12.0);
        self
    }

    /// Step sizes sorted from coarse to fine.
    pub fn sorted_taus(&self) -> Vec<f64> {
        let mut t = self.tau_list.clone();
        t.sort_by(|a, b| b.total_cmp(a));
        t
    }

    pub fn finest_tau(&self) -> f64 {
        self.tau_list.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.final_time > 0.0) {
            return Err(Error::InvalidArgument("final time must be positive"));
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            return Err(Error::InvalidArgument("mesh size must lie in (0, 1]"));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidArgument("no scheme selected"));
        }
        if self.norms.is_empty() {
            return Err(Error::InvalidArgument("no norm selected"));
        }
        BilinearParams::new(self.beta, self.kappa)?;
        if self.tau_list.is_empty() {
            return Err(Error::InvalidArgument("empty step-size list"));
        }
        let finest = self.finest_tau();
        for &tau in &self.tau_list {
            step_count(tau, self.final_time)?;
            step_count(finest, tau)?;
        }
        step_count(self.tau_ref, self.final_time)?;
        step_count(self.tau_ref, finest)?;
        if !(self.tau_ref <= finest / 4.0) {
            return Err(Error::InvalidArgument("reference step must be at most a quarter of the finest step"));
        }
        let mut sorted = self.sorted_taus();
        sorted.dedup();
        if sorted.len() != self.tau_list.len() {
            return Err(Error::InvalidArgument("repeated step size"));
        }
        if !(self.acoustic_k.is_finite()) {
            return Err(Error::InvalidArgument("acoustic datum scale must be finite"));
        }
        Ok(())
    }
}

/// Gaussian bump `exp(−20((x−1)² + y²))` at the vertices.
pub fn kinetic_initial_position(mesh: &Mesh) -> Vec<f64> {
    mesh.vertices.iter().map(|[x, y]| libm::exp(-20.0 * ((x - 1.0) * (x - 1.0) + y * y))).collect()
}

/// `u = 0`, `w = 2π (x² + y²)^0.6`, `δ = (k/2π) (x² + y²)^0.6` on boundary vertices, `ζ = 0`.
pub fn acoustic_initial_state(mesh: &Mesh, k: f64) -> AcousticState {
    let radial = |[x, y]: [f64; 2]| libm::pow(x * x + y * y, 0.6);
    let n = mesh.n_vertices();
    let mut s = AcousticState::zeros(n, mesh.n_boundary);
    for (i, v) in mesh.vertices.iter().enumerate() {
        s.w[i] = 2.0 * PI * radial(*v);
    }
    for (j, d) in s.delta.iter_mut().enumerate() {
        *d = k / (2.0 * PI) * radial(mesh.vertices[mesh.n_interior + j]);
    }
    s
}

pub enum StudyProblem {
    Kinetic { problem: KineticProblem, u0: Vec<f64>, w0: Vec<f64> },
    Acoustic { problem: AcousticProblem, init: AcousticState },
}

/// Mesh, assembled problem and initial data shared by all points of a study.
pub struct StudySetup {
    pub config: StudyConfig,
    pub mesh: Mesh,
    pub problem: StudyProblem,
    pub norms: NormMatrices,
}

impl StudySetup {
    pub fn new(config: StudyConfig) -> Result<Self> {
        config.validate()?;
        let mesh = generate_disc_mesh(config.h)?;
        let params = BilinearParams::new(config.beta, config.kappa)?;
        let (fb, fs) = config.nonlinearity.reactions();
        let problem = match config.problem {
            Problem::Kinetic => {
                let problem = KineticProblem::new(&mesh, params, fb, fs, config.final_time)?;
                let u0 = kinetic_initial_position(&mesh);
                let w0 = vec![0.0; u0.len()];
                StudyProblem::Kinetic { problem, u0, w0 }
            }
            Problem::Acoustic => {
                let problem = AcousticProblem::new(&mesh, params, fb, fs, config.final_time)?;
                let init = acoustic_initial_state(&mesh, config.acoustic_k);
                StudyProblem::Acoustic { problem, init }
            }
        };
        let b = match &problem {
            StudyProblem::Kinetic { problem, .. } => &problem.blocks,
            StudyProblem::Acoustic { problem, .. } => &problem.blocks,
        };
        let norms = NormMatrices::new(&b.m_bulk, &b.a_bulk, &b.m_surf, &b.surf_laplace)?;
        Ok(Self { config, mesh, problem, norms })
    }

    /// Monolithic Crank-Nicolson with step `tau`, sampled every `sample_dt`.
    pub fn reference(&self, tau: f64, sample_dt: f64) -> Result<Run> {
        match &self.problem {
            StudyProblem::Kinetic { problem, u0, w0 } => kinetic::reference_solve(problem, u0, w0, tau, sample_dt),
            StudyProblem::Acoustic { problem, init } => acoustic::reference_solve(problem, init, tau, sample_dt),
        }
    }

    pub fn run(&self, scheme: Scheme, tau: f64, sample_dt: f64) -> Result<Run> {
        match (scheme, &self.problem) {
            (Scheme::ReferenceCn, _) => self.reference(tau, sample_dt),
            (Scheme::Splitting(s), StudyProblem::Kinetic { problem, u0, w0 }) => {
                kinetic::run_scheme(problem, s, u0, w0, tau, sample_dt)
            }
            (Scheme::Splitting(s), StudyProblem::Acoustic { problem, init }) => {
                acoustic::run_scheme(problem, s, init, tau, sample_dt)
            }
        }
    }

    /// Errors of a run sampled every `tau` against a reference sampled every `finest_tau`.
    pub fn errors(&self, run: &Run, reference: &Run, tau: f64) -> Result<(NormSet, NormSet)> {
        let stride = step_count(self.config.finest_tau(), tau)?;
        let reference = subsample(&reference.trajectory, stride);
        error_norms(&run.trajectory, &reference, &self.norms, tau)
    }
}

/// Outcome of one `(scheme, τ)` point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub scheme: Scheme,
    pub tau: f64,
    pub outcome: core::result::Result<PointData, String>,
}

#[derive(Debug, Clone)]
pub struct PointData {
    pub bulk: NormSet,
    pub surface: NormSet,
    pub energies: Vec<f64>,
    pub constraint_violations: usize,
}

impl PointData {
    pub fn get(&self, variable: Variable, norm: Norm) -> f64 {
        match variable {
            Variable::Bulk => self.bulk.get(norm),
            Variable::Surface => self.surface.get(norm),
        }
    }
}

/// Runs one study point against a reference sampled every finest step.
pub fn run_point(setup: &StudySetup, reference: &Run, scheme: Scheme, tau: f64) -> PointResult {
    let data = setup.run(scheme, tau, tau).and_then(|run| {
        let (bulk, surface) = setup.errors(&run, reference, tau)?;
        Ok(PointData { bulk, surface, energies: run.energies, constraint_violations: run.constraint_violations })
    });
    PointResult { scheme, tau, outcome: data.map_err(|e| alloc::format!("{e}")) }
}
