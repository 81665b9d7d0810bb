//! Sparse matrices and the linear solvers behind every implicit substep.

mod cg;
mod factor;
mod sparse;

use alloc::vec::Vec;

pub use cg::conjugate_gradient;
pub use factor::{reverse_cuthill_mckee, Cholesky, ProfileLu};
pub use sparse::{add_scaled, spmv, SparseMatrix};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Envelope Cholesky, factored once and reused.
    Direct,
    /// Jacobi-preconditioned CG.
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveOptions {
    pub method: SolveMethod,
    pub rel_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LinearSolveOptions {
    fn default() -> Self {
        Self { method: SolveMethod::Direct, rel_tolerance: 1e-12, max_iterations: 10_000 }
    }
}

impl LinearSolveOptions {
    pub fn conjugate_gradient(rel_tolerance: f64, max_iterations: usize) -> Self {
        Self { method: SolveMethod::ConjugateGradient, rel_tolerance, max_iterations }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::InvalidArgument("rel_tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// A system matrix prepared for repeated solves.
#[derive(Debug, Clone)]
pub enum PreparedSolver {
    Cholesky(Cholesky),
    Lu(ProfileLu),
    ConjugateGradient { matrix: SparseMatrix, rel_tolerance: f64, max_iterations: usize },
}

impl PreparedSolver {
    /// Symmetric positive definite system.
    pub fn spd(a: &SparseMatrix, opts: &LinearSolveOptions) -> Result<Self> {
        opts.validate()?;
        match opts.method {
            SolveMethod::Direct => Ok(Self::Cholesky(Cholesky::new(a)?)),
            SolveMethod::ConjugateGradient => Ok(Self::ConjugateGradient {
                matrix: a.clone(),
                rel_tolerance: opts.rel_tolerance,
                max_iterations: opts.max_iterations,
            }),
        }
    }

    /// Structurally symmetric system with positive definite symmetric part.
    pub fn positive_real(a: &SparseMatrix) -> Result<Self> {
        Ok(Self::Lu(ProfileLu::new(a)?))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Cholesky(f) => f.solve(b),
            Self::Lu(f) => f.solve(b),
            Self::ConjugateGradient { matrix, rel_tolerance, max_iterations } => {
                conjugate_gradient(matrix, b, None, *rel_tolerance, *max_iterations)
            }
        }
    }
}

/// One-off SPD solve.
pub fn solve_spd(a: &SparseMatrix, b: &[f64], opts: &LinearSolveOptions) -> Result<Vec<f64>> {
    PreparedSolver::spd(a, opts)?.solve(b)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max)
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `alpha * x + beta * y`.
pub fn lincomb(alpha: f64, x: &[f64], beta: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + beta * b).collect()
}

pub fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn solve_identity_and_diagonal() {
        let opts = LinearSolveOptions::default();
        let b = [3.0, -1.0, 2.5];
        assert_eq!(solve_spd(&SparseMatrix::identity(3), &b, &opts).unwrap(), b.to_vec());
        let a = SparseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let x = solve_spd(&a, &[1.0; 5], &opts).unwrap();
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - 1.0 / (i + 1) as f64).abs() < 1e-15);
        }
        let cg = LinearSolveOptions::conjugate_gradient(1e-12, 100);
        let x = solve_spd(&a, &[1.0; 5], &cg).unwrap();
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - 1.0 / (i + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn options_are_validated() {
        let mut opts = LinearSolveOptions::default();
        opts.rel_tolerance = 0.0;
        assert!(solve_spd(&SparseMatrix::identity(2), &[1.0, 1.0], &opts).is_err());
        let opts = LinearSolveOptions::conjugate_gradient(1e-12, 0);
        assert!(opts.validate().is_err());
    }

    #[test]
    fn cg_reports_non_convergence() {
        let mut t = vec![];
        for i in 0..50 {
            t.push((i, i, 2.0));
            if i + 1 < 50 {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(50, 50, &t).unwrap();
        let opts = LinearSolveOptions::conjugate_gradient(1e-14, 3);
        assert!(matches!(solve_spd(&a, &[1.0; 50], &opts), Err(Error::NotConverged { .. })));
    }
}
