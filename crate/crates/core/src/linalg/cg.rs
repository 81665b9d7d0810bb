use alloc::vec;
use alloc::vec::Vec;

use super::sparse::SparseMatrix;
use super::{axpy, dot, norm2};
use crate::error::{check_len, Error, Result};

/// Jacobi-preconditioned conjugate gradients, stopping at `‖b - A x‖ ≤ rel_tol · ‖b‖`.
pub fn conjugate_gradient(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    rel_tol: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    let n = a.nrows();
    check_len("cg rhs", n, b.len())?;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let inv_diag: Vec<f64> = a.diag().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();

    let mut x = match x0 {
        Some(x0) => {
            check_len("cg initial guess", n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };
    let mut r = b.to_vec();
    a.spmv_acc(-1.0, &x, &mut r)?;
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let target = rel_tol * bnorm;

    for _ in 0..max_iterations {
        if norm2(&r) <= target {
            return Ok(x);
        }
        a.spmv_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: 0, value: pap });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        for ((zi, ri), di) in z.iter_mut().zip(&r).zip(&inv_diag) {
            *zi = ri * di;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let res = norm2(&r);
    if res <= target {
        Ok(x)
    } else {
        Err(Error::NotConverged { iterations: max_iterations, relative_residual: res / bnorm })
    }
}
