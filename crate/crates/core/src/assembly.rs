//! P1 bulk-surface finite element matrices.
//!
//! Surface dof `j` is the boundary vertex `n_interior + j`, so the trace of a
//! bulk vector `u` is `u[n_interior..]`.

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::{add_scaled, SparseMatrix};
use crate::mesh::Mesh;

/// Coefficients of the surface operator `β (∇_Γ p, ∇_Γ q) + κ (p, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearParams {
    pub beta: f64,
    pub kappa: f64,
}

impl Default for BilinearParams {
    fn default() -> Self {
        Self { beta: 1.0, kappa: 1.0 }
    }
}

impl BilinearParams {
    pub fn new(beta: f64, kappa: f64) -> Result<Self> {
        if !(beta >= 0.0) || !(kappa >= 0.0) {
            return Err(Error::InvalidArgument("beta and kappa must be non-negative"));
        }
        Ok(Self { beta, kappa })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    /// `B = [0  M_Γ  -M_Γ]` acting on `(u1, u2, p)`.
    Kinetic,
    /// `B = [0  M_Γ]` acting on `(u1, u2)`.
    Acoustic,
}

/// P1 mass and stiffness matrices on the triangulated disc.
pub fn assemble_bulk(mesh: &Mesh) -> Result<(SparseMatrix, SparseMatrix)> {
    let n = mesh.n_vertices();
    let mut mass = Vec::with_capacity(9 * mesh.triangles.len());
    let mut stiff = Vec::with_capacity(9 * mesh.triangles.len());
    for (k, tri) in mesh.triangles.iter().enumerate() {
        let [p0, p1, p2] = tri.map(|i| mesh.vertices[i]);
        let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
        if !(area > 1e-14) {
            return Err(Error::DegenerateTriangle { triangle: k, area });
        }
        // Gradients of the barycentric coordinates, scaled by 2·area.
        let grads = [
            [p1[1] - p2[1], p2[0] - p1[0]],
            [p2[1] - p0[1], p0[0] - p2[0]],
            [p0[1] - p1[1], p1[0] - p0[0]],
        ];
        for a in 0..3 {
            for b in 0..3 {
                let m = if a == b { area / 6.0 } else { area / 12.0 };
                let s = (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]) / (4.0 * area);
                mass.push((tri[a], tri[b], m));
                stiff.push((tri[a], tri[b], s));
            }
        }
    }
    Ok((SparseMatrix::from_triplets(n, n, &mass)?, SparseMatrix::from_triplets(n, n, &stiff)?))
}

/// 1D P1 mass and (unit-coefficient) tangential stiffness on the boundary polygon.
pub fn assemble_surface_parts(mesh: &Mesh) -> Result<(SparseMatrix, SparseMatrix)> {
    let n = mesh.n_boundary;
    let off = mesh.n_interior;
    let mut mass = Vec::with_capacity(4 * n);
    let mut stiff = Vec::with_capacity(4 * n);
    for (e, (a, b)) in mesh.boundary_edges().enumerate() {
        if a < off || b < off {
            return Err(Error::InvalidArgument("boundary loop references an interior vertex"));
        }
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = libm::hypot(pb[0] - pa[0], pb[1] - pa[1]);
        if !(len > 0.0) {
            return Err(Error::DegenerateEdge { edge: e });
        }
        let (i, j) = (a - off, b - off);
        for (r, c, m, s) in [
            (i, i, len / 3.0, 1.0 / len),
            (j, j, len / 3.0, 1.0 / len),
            (i, j, len / 6.0, -1.0 / len),
            (j, i, len / 6.0, -1.0 / len),
        ] {
            mass.push((r, c, m));
            stiff.push((r, c, s));
        }
    }
    Ok((SparseMatrix::from_triplets(n, n, &mass)?, SparseMatrix::from_triplets(n, n, &stiff)?))
}

/// Surface mass `M_Γ` and `A_Γ = β·S + κ·M_Γ`.
pub fn assemble_surface(mesh: &Mesh, params: &BilinearParams) -> Result<(SparseMatrix, SparseMatrix)> {
    let (mass, laplace) = assemble_surface_parts(mesh)?;
    let stiff = add_scaled(&laplace, &mass, params.beta, params.kappa)?;
    Ok((mass, stiff))
}

fn coupling_from_surface_mass(n_interior: usize, m_surf: &SparseMatrix, kind: CouplingKind) -> Result<SparseMatrix> {
    let ns = m_surf.nrows();
    let n_bulk = n_interior + ns;
    match kind {
        CouplingKind::Kinetic => {
            let neg = m_surf.scaled(-1.0);
            SparseMatrix::from_blocks(ns, n_bulk + ns, &[(0, n_interior, m_surf), (0, n_bulk, &neg)])
        }
        CouplingKind::Acoustic => SparseMatrix::from_blocks(ns, n_bulk, &[(0, n_interior, m_surf)]),
    }
}

pub fn assemble_coupling(mesh: &Mesh, kind: CouplingKind) -> Result<SparseMatrix> {
    let (m_surf, _) = assemble_surface_parts(mesh)?;
    coupling_from_surface_mass(mesh.n_interior, &m_surf, kind)
}

/// `M · g`, the mass pairing of a nodally interpolated load.
pub fn nodal_load(m: &SparseMatrix, g: &[f64]) -> Result<Vec<f64>> {
    check_len("nodal load", m.ncols(), g.len())?;
    m.spmv(g)
}

/// All matrices of the semi-discrete system plus the interior/trace block split of the bulk ones.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub n_bulk: usize,
    pub n_surf: usize,
    pub m_bulk: SparseMatrix,
    pub a_bulk: SparseMatrix,
    pub m_surf: SparseMatrix,
    /// Carries `β` and `κ`.
    pub a_surf: SparseMatrix,
    /// Unit tangential stiffness (`β = 1`, `κ = 0`), used for surface H¹ norms.
    pub surf_laplace: SparseMatrix,
    pub kind: CouplingKind,
    pub coupling: SparseMatrix,
    pub m11: SparseMatrix,
    pub m12: SparseMatrix,
    pub m21: SparseMatrix,
    pub m22: SparseMatrix,
    pub a11: SparseMatrix,
    pub a12: SparseMatrix,
    pub a21: SparseMatrix,
    pub a22: SparseMatrix,
}

impl BlockSystem {
    pub fn assemble(mesh: &Mesh, params: &BilinearParams, kind: CouplingKind) -> Result<Self> {
        let (m_bulk, a_bulk) = assemble_bulk(mesh)?;
        let (m_surf, surf_laplace) = assemble_surface_parts(mesh)?;
        let a_surf = add_scaled(&surf_laplace, &m_surf, params.beta, params.kappa)?;
        let coupling = coupling_from_surface_mass(mesh.n_interior, &m_surf, kind)?;
        let (n1, n) = (mesh.n_interior, mesh.n_vertices());
        Ok(Self {
            n_bulk: n,
            n_surf: mesh.n_boundary,
            m11: m_bulk.block(0..n1, 0..n1),
            m12: m_bulk.block(0..n1, n1..n),
            m21: m_bulk.block(n1..n, 0..n1),
            m22: m_bulk.block(n1..n, n1..n),
            a11: a_bulk.block(0..n1, 0..n1),
            a12: a_bulk.block(0..n1, n1..n),
            a21: a_bulk.block(n1..n, 0..n1),
            a22: a_bulk.block(n1..n, n1..n),
            m_bulk,
            a_bulk,
            m_surf,
            a_surf,
            surf_laplace,
            kind,
            coupling,
        })
    }

    /// Number of interior (non-trace) bulk dofs.
    pub fn n_inner(&self) -> usize {
        self.n_bulk - self.n_surf
    }

    /// Kinetic constraint residual `B (u; p) = M_Γ u2 - M_Γ p`, evaluated blockwise so that it
    /// vanishes exactly when the trace of `u` equals `p`.
    pub fn kinetic_constraint(&self, u: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        check_len("kinetic constraint bulk", self.n_bulk, u.len())?;
        let a = self.m_surf.spmv(&u[self.n_inner()..])?;
        let b = self.m_surf.spmv(p)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
    }

    /// `½ (uᵀA_Ω u + sᵀA_Γ s + wᵀM_Ω w + vᵀM_Γ v)` for bulk position/velocity `(u, w)`
    /// and surface position/velocity `(s, v)`.
    pub fn energy(&self, u: &[f64], w: &[f64], s: &[f64], v: &[f64]) -> Result<f64> {
        Ok(0.5
            * (self.a_bulk.quad_form(u)?
                + self.a_surf.quad_form(s)?
                + self.m_bulk.quad_form(w)?
                + self.m_surf.quad_form(v)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Cholesky;
    use crate::mesh::generate_disc_mesh;
    use alloc::vec;
    use core::f64::consts::PI;

    fn unit_right_triangle() -> Mesh {
        Mesh {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2]],
            boundary_loop: vec![0, 1, 2],
            n_interior: 0,
            n_boundary: 3,
        }
    }

    #[test]
    fn local_p1_matrices() {
        let (m, a) = assemble_bulk(&unit_right_triangle()).unwrap();
        let area = 0.5;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { 1.0 } * area / 12.0;
                assert!((m.get(i, j) - expect).abs() < 1e-16);
            }
        }
        let expect_a = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(i, j) - expect_a[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let mut mesh = unit_right_triangle();
        mesh.vertices[2] = [2.0, 0.0];
        assert!(matches!(assemble_bulk(&mesh), Err(Error::DegenerateTriangle { .. })));
        let mut mesh = unit_right_triangle();
        mesh.vertices[1] = [0.0, 0.0];
        assert!(matches!(assemble_surface_parts(&mesh), Err(Error::DegenerateEdge { .. })));
    }

    #[test]
    fn constants_and_areas() {
        let mesh = generate_disc_mesh(0.09).unwrap();
        let (m, a) = assemble_bulk(&mesh).unwrap();
        let ones = vec![1.0; mesh.n_vertices()];
        assert!(a.spmv(&ones).unwrap().iter().all(|v| v.abs() <= 1e-12));
        let total = m.quad_form(&ones).unwrap();
        assert!((total - mesh.total_area()).abs() < 1e-12);
        assert!((total - PI).abs() < 0.01 * PI);

        let (ms, s) = assemble_surface(&mesh, &BilinearParams::new(1.0, 0.0).unwrap()).unwrap();
        let ones = vec![1.0; mesh.n_boundary];
        assert!(s.spmv(&ones).unwrap().iter().all(|v| v.abs() <= 1e-12));
        let perimeter = ms.quad_form(&ones).unwrap();
        assert!((perimeter - mesh.boundary_length()).abs() < 1e-12);
        assert!((perimeter - 2.0 * PI).abs() < 0.01 * 2.0 * PI);
    }

    #[test]
    fn pure_reaction_surface_operator_is_mass() {
        let mesh = generate_disc_mesh(0.3).unwrap();
        let (ms, a) = assemble_surface(&mesh, &BilinearParams::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(ms.to_dense(), a.to_dense());
    }

    #[test]
    fn symmetry_and_block_reconstruction() {
        let mesh = generate_disc_mesh(0.2).unwrap();
        let sys = BlockSystem::assemble(&mesh, &BilinearParams::default(), CouplingKind::Kinetic).unwrap();
        for m in [&sys.m_bulk, &sys.a_bulk, &sys.m_surf, &sys.a_surf] {
            assert_eq!(m.asymmetry(), 0.0);
        }
        let n1 = sys.n_inner();
        let back = SparseMatrix::from_blocks(
            sys.n_bulk,
            sys.n_bulk,
            &[(0, 0, &sys.m11), (0, n1, &sys.m12), (n1, 0, &sys.m21), (n1, n1, &sys.m22)],
        )
        .unwrap();
        assert_eq!(back.to_dense(), sys.m_bulk.to_dense());
        assert!(Cholesky::new(&sys.m_bulk).is_ok());
        assert!(Cholesky::new(&sys.m_surf).is_ok());
    }

    #[test]
    fn coupling_shapes() {
        let mesh = generate_disc_mesh(0.3).unwrap();
        let (ms, _) = assemble_surface_parts(&mesh).unwrap();
        let n1 = mesh.n_interior;
        let n = mesh.n_vertices();

        let bk = assemble_coupling(&mesh, CouplingKind::Kinetic).unwrap();
        assert_eq!((bk.nrows(), bk.ncols()), (mesh.n_boundary, n + mesh.n_boundary));
        let mut up: Vec<f64> = (0..n).map(|i| libm::cos(i as f64)).collect();
        let trace: Vec<f64> = up[n1..].to_vec();
        up.extend_from_slice(&trace);
        assert!(bk.spmv(&up).unwrap().iter().all(|v| v.abs() < 1e-15));
        let sys = BlockSystem::assemble(&mesh, &BilinearParams::default(), CouplingKind::Kinetic).unwrap();
        assert!(sys.kinetic_constraint(&up[..n], &trace).unwrap().iter().all(|v| *v == 0.0));

        let ba = assemble_coupling(&mesh, CouplingKind::Acoustic).unwrap();
        let u: Vec<f64> = (0..n).map(|i| libm::sin(i as f64)).collect();
        assert_eq!(ba.spmv(&u).unwrap(), ms.spmv(&u[n1..]).unwrap());

        // Full row rank: B Bᵀ is SPD.
        let bbt = {
            let bt = bk.transpose();
            let dense_b = bk.to_dense();
            let dense_bt = bt.to_dense();
            let ns = mesh.n_boundary;
            let mut out = vec![vec![0.0; ns]; ns];
            for i in 0..ns {
                for j in 0..ns {
                    out[i][j] = (0..dense_bt.len()).map(|k| dense_b[i][k] * dense_bt[k][j]).sum();
                }
            }
            SparseMatrix::from_dense(&out).unwrap()
        };
        assert!(Cholesky::new(&bbt).is_ok());
    }

    #[test]
    fn nodal_load_cases() {
        let mesh = generate_disc_mesh(0.3).unwrap();
        let (m, _) = assemble_bulk(&mesh).unwrap();
        let n = mesh.n_vertices();
        assert!(nodal_load(&m, &vec![0.0; n]).unwrap().iter().all(|v| *v == 0.0));
        let rowsums: Vec<f64> = (0..n).map(|i| m.row(i).1.iter().sum()).collect();
        assert_eq!(nodal_load(&m, &vec![1.0; n]).unwrap(), rowsums);
        assert!(nodal_load(&m, &[1.0]).is_err());
    }
}
