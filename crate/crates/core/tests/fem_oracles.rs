use dynbc_core::assembly::{BilinearParams, BlockSystem, CouplingKind};
use dynbc_core::mesh::{generate_disc_mesh, mesh_width, Mesh};
use nalgebra::{DMatrix, Matrix3, Vector3};

/// Element-by-element P1 matrices from barycentric gradients.
fn reference_bulk(mesh: &Mesh) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = mesh.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    let mut a = DMatrix::zeros(n, n);
    for tri in &mesh.triangles {
        let p = tri.map(|i| mesh.vertices[i]);
        let c = Matrix3::from_fn(|i, j| if j == 0 { 1.0 } else { p[i][j - 1] });
        let area = c.determinant().abs() / 2.0;
        let inv = c.try_inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let gi = Vector3::new(0.0, inv[(1, i)], inv[(2, i)]);
                let gj = Vector3::new(0.0, inv[(1, j)], inv[(2, j)]);
                a[(tri[i], tri[j])] += area * gi.dot(&gj);
                m[(tri[i], tri[j])] += area * if i == j { 1.0 / 6.0 } else { 1.0 / 12.0 };
            }
        }
    }
    (m, a)
}

fn dense(m: &dynbc_core::linalg::SparseMatrix) -> DMatrix<f64> {
    let d = m.to_dense();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| d[i][j])
}

#[test]
fn bulk_matrices_match_element_formulas() {
    let mesh = generate_disc_mesh(0.25).unwrap();
    let b = BlockSystem::assemble(&mesh, &BilinearParams::default(), CouplingKind::Kinetic).unwrap();
    let (m, a) = reference_bulk(&mesh);
    assert!((dense(&b.m_bulk) - m).amax() <= 1e-14);
    assert!((dense(&b.a_bulk) - a).amax() <= 1e-13);
}

#[test]
fn surface_matrices_match_edge_formulas() {
    let mesh = generate_disc_mesh(0.25).unwrap();
    let (beta, kappa) = (0.6, 2.5);
    let b = BlockSystem::assemble(&mesh, &BilinearParams::new(beta, kappa).unwrap(), CouplingKind::Acoustic).unwrap();
    let ns = mesh.n_boundary;
    let n1 = mesh.n_interior;
    let mut m = DMatrix::zeros(ns, ns);
    let mut s = DMatrix::zeros(ns, ns);
    for k in 0..ns {
        let (i, j) = (k, (k + 1) % ns);
        let (pi, pj) = (mesh.vertices[mesh.boundary_loop[i]], mesh.vertices[mesh.boundary_loop[j]]);
        let len = ((pi[0] - pj[0]).powi(2) + (pi[1] - pj[1]).powi(2)).sqrt();
        for (x, y, mv, sv) in [(i, i, 1.0 / 3.0, 1.0), (j, j, 1.0 / 3.0, 1.0), (i, j, 1.0 / 6.0, -1.0), (j, i, 1.0 / 6.0, -1.0)] {
            m[(x, y)] += len * mv;
            s[(x, y)] += sv / len;
        }
    }
    // Boundary vertices come last and follow the loop order.
    assert!(mesh.boundary_loop.iter().enumerate().all(|(k, &v)| v == n1 + k));
    assert!((dense(&b.m_surf) - &m).amax() <= 1e-14);
    assert!((dense(&b.surf_laplace) - &s).amax() <= 1e-12);
    assert!((dense(&b.a_surf) - (&s * beta + &m * kappa)).amax() <= 1e-12);
    let coupling = dense(&b.coupling);
    assert_eq!(coupling.shape(), (ns, n1 + ns));
    assert_eq!(coupling.columns(0, n1).amax(), 0.0);
    assert!((coupling.columns(n1, ns) - &m).amax() <= 1e-14);
}

#[test]
fn kinetic_coupling_and_blocks() {
    let mesh = generate_disc_mesh(0.3).unwrap();
    let b = BlockSystem::assemble(&mesh, &BilinearParams::default(), CouplingKind::Kinetic).unwrap();
    let (n1, ns) = (mesh.n_interior, mesh.n_boundary);
    let c = dense(&b.coupling);
    assert_eq!(c.shape(), (ns, n1 + 2 * ns));
    assert!((c.columns(n1, ns) + c.columns(n1 + ns, ns)).amax() <= 1e-15);
    let m = dense(&b.m_bulk);
    assert_eq!(dense(&b.m12), m.view((0, n1), (n1, ns)));
    assert_eq!(dense(&b.a21), dense(&b.a_bulk).view((n1, 0), (ns, n1)));
}

#[test]
fn quadratic_forms_converge() {
    // ∫ x² = π/4 and ∫ |∇x|² = π on the disc, ∫_Γ x² = π on the circle.
    let mut prev = f64::INFINITY;
    for h in [0.3, 0.15, 0.075] {
        let mesh = generate_disc_mesh(h).unwrap();
        mesh.validate().unwrap();
        assert!(mesh_width(&mesh) <= 1.5 * h);
        let b = BlockSystem::assemble(&mesh, &BilinearParams::default(), CouplingKind::Acoustic).unwrap();
        let x: Vec<f64> = mesh.vertices.iter().map(|v| v[0]).collect();
        let xs = &x[mesh.n_interior..];
        let pi = std::f64::consts::PI;
        let err = [
            (b.m_bulk.quad_form(&x).unwrap() - pi / 4.0).abs(),
            (b.a_bulk.quad_form(&x).unwrap() - pi).abs(),
            (b.m_surf.quad_form(xs).unwrap() - pi).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        assert!(err < 0.6 * prev, "h = {h}: {err} vs {prev}");
        prev = err;
    }
    assert!(prev < 0.02);
}

#[test]
fn mesh_quality() {
    for h in [0.45, 0.09, 0.03] {
        let mesh = generate_disc_mesh(h).unwrap();
        mesh.validate().unwrap();
        assert!(mesh.min_angle_degrees() > 20.0, "h = {h}: {}", mesh.min_angle_degrees());
        assert_eq!(mesh.n_interior + mesh.n_boundary, mesh.n_vertices());
        assert!(mesh.vertices[mesh.n_interior..].iter().all(|v| (v[0].hypot(v[1]) - 1.0).abs() < 1e-14));
    }
}
