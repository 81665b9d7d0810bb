use rayon::prelude::*;

use dynbc_core::study::{fit_orders, run_point, Norm, Orders, PointResult, Scheme, StudyConfig, StudySetup, Variable};
use dynbc_core::trajectory::Run;

/// Fitted orders of one `(scheme, variable, norm)` series.
#[derive(Debug, Clone)]
pub struct OrderRow {
    pub scheme: Scheme,
    pub variable: Variable,
    pub norm: Norm,
    pub orders: Result<Orders, String>,
}

/// Difference between the reference at `τ_ref` and at `2τ_ref`, compared with the
/// smallest scheme error, per variable and norm.
#[derive(Debug, Clone)]
pub struct ReferenceCheck {
    pub worst_ratio: f64,
    pub passed: bool,
}

pub struct StudyReport {
    pub setup: StudySetup,
    /// Ordered by scheme (as configured), then by decreasing step size.
    pub points: Vec<PointResult>,
    pub orders: Vec<OrderRow>,
    pub reference_check: Option<ReferenceCheck>,
}

impl StudyReport {
    pub fn variable_name(&self, v: Variable) -> &'static str {
        match v {
            Variable::Bulk => "u",
            Variable::Surface => self.setup.config.problem.surface_variable(),
        }
    }

    pub fn error(&self, scheme: Scheme, tau: f64, variable: Variable, norm: Norm) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.scheme == scheme && p.tau == tau)
            .and_then(|p| p.outcome.as_ref().ok())
            .map(|d| d.get(variable, norm))
    }

    pub fn order(&self, scheme: Scheme, variable: Variable, norm: Norm) -> Option<&Orders> {
        self.orders
            .iter()
            .find(|o| o.scheme == scheme && o.variable == variable && o.norm == norm)
            .and_then(|o| o.orders.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&PointResult, &str)> {
        self.points.iter().filter_map(|p| p.outcome.as_ref().err().map(|e| (p, e.as_str())))
    }
}

/// Options beyond the study configuration.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Also integrate the reference with `2τ_ref` to validate it.
    pub check_reference: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { check_reference: true }
    }
}

/// Builds the mesh and problem once, computes the reference, then runs every
/// `(scheme, τ)` point in parallel. Failed points are recorded, not fatal.
pub fn run_study(config: &StudyConfig, opts: RunOptions) -> anyhow::Result<StudyReport> {
    let setup = StudySetup::new(config.clone())?;
    let finest = config.finest_tau();
    let taus = config.sorted_taus();
    let (reference, coarse_reference) = rayon::join(
        || setup.reference(config.tau_ref, finest),
        || opts.check_reference.then(|| setup.reference(2.0 * config.tau_ref, finest)),
    );
    let reference = reference?;
    let coarse_reference = coarse_reference.transpose()?;

    let jobs: Vec<(Scheme, f64)> = config.schemes.iter().flat_map(|&s| taus.iter().map(move |&t| (s, t))).collect();
    let points: Vec<PointResult> = jobs.par_iter().map(|&(s, t)| run_point(&setup, &reference, s, t)).collect();

    let mut orders = Vec::new();
    for &scheme in &config.schemes {
        for variable in [Variable::Bulk, Variable::Surface] {
            for &norm in &config.norms {
                let errs: Result<Vec<f64>, String> = points
                    .iter()
                    .filter(|p| p.scheme == scheme)
                    .map(|p| p.outcome.as_ref().map(|d| d.get(variable, norm)).map_err(Clone::clone))
                    .collect();
                let fitted = errs.and_then(|e| fit_orders(&taus, &e).map_err(|e| e.to_string()));
                orders.push(OrderRow { scheme, variable, norm, orders: fitted });
            }
        }
    }

    let reference_check = match coarse_reference {
        Some(coarse) => Some(check_reference(&setup, &reference, &coarse, &points)?),
        None => None,
    };
    Ok(StudyReport { setup, points, orders, reference_check })
}

fn check_reference(setup: &StudySetup, fine: &Run, coarse: &Run, points: &[PointResult]) -> anyhow::Result<ReferenceCheck> {
    let finest = setup.config.finest_tau();
    let (rb, rs) = setup.errors(coarse, fine, finest)?;
    let mut worst: f64 = 0.0;
    for &norm in &setup.config.norms {
        for (variable, self_err) in [(Variable::Bulk, rb.get(norm)), (Variable::Surface, rs.get(norm))] {
            let smallest = points
                .iter()
                .filter(|p| p.scheme != Scheme::ReferenceCn)
                .filter_map(|p| p.outcome.as_ref().ok())
                .map(|d| d.get(variable, norm))
                .fold(f64::INFINITY, f64::min);
            if smallest.is_finite() && smallest > 0.0 {
                worst = worst.max(self_err / smallest);
            }
        }
    }
    Ok(ReferenceCheck { worst_ratio: worst, passed: worst <= 0.25 })
}
