use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::SparseMatrix;

/// Pointwise nonlinearity `g(t, v)`, discretized as `M · g(t, v_nodes)`.
#[derive(Debug, Clone, Copy, Default)]
pub enum Reaction {
    #[default]
    Zero,
    /// Allen-Cahn type `-v³ + v`.
    AllenCahn,
    Pointwise(fn(f64, f64) -> f64),
}

impl Reaction {
    pub fn value(&self, t: f64, v: f64) -> f64 {
        match self {
            Reaction::Zero => 0.0,
            Reaction::AllenCahn => v - v * v * v,
            Reaction::Pointwise(g) => g(t, v),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Reaction::Zero)
    }

    /// Nodal interpolation of `g(t, ·)` paired with the mass matrix.
    pub fn load(&self, mass: &SparseMatrix, t: f64, values: &[f64]) -> Result<Vec<f64>> {
        if self.is_zero() {
            return Ok(vec![0.0; mass.nrows()]);
        }
        let g: Vec<f64> = values.iter().map(|&v| self.value(t, v)).collect();
        crate::assembly::nodal_load(mass, &g)
    }
}
