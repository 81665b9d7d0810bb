use dynbc_core::linalg::{
    conjugate_gradient, solve_spd, Cholesky, LinearSolveOptions, PreparedSolver, ProfileLu, SparseMatrix,
};
use proptest::prelude::*;

/// Random sparse SPD matrix: `GᵀG + n I` with a banded-ish sparse `G`.
fn spd(n: usize, entries: &[(usize, usize, f64)]) -> SparseMatrix {
    let mut g = vec![vec![0.0; n]; n];
    for &(i, j, v) in entries {
        g[i % n][j % n] += v;
    }
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = (0..n).map(|k| g[k][i] * g[k][j]).sum::<f64>();
        }
        a[i][i] += n as f64;
    }
    SparseMatrix::from_dense(&a).unwrap()
}

fn dense_mv(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    a.to_dense().iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn system() -> impl Strategy<Value = (SparseMatrix, Vec<f64>)> {
    (2usize..25).prop_flat_map(|n| {
        (
            prop::collection::vec((0..n, 0..n, -2.0..2.0f64), 0..3 * n),
            prop::collection::vec(-5.0..5.0f64, n),
        )
            .prop_map(move |(e, b)| (spd(n, &e), b))
    })
}

proptest! {
    #[test]
    fn cholesky_solves_spd((a, b) in system()) {
        let x = Cholesky::new(&a).unwrap().solve(&b).unwrap();
        prop_assert!(max_diff(&dense_mv(&a, &x), &b) <= 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn direct_and_cg_agree((a, b) in system()) {
        let direct = solve_spd(&a, &b, &LinearSolveOptions::default()).unwrap();
        let cg = conjugate_gradient(&a, &b, None, 1e-13, 1000).unwrap();
        prop_assert!(max_diff(&direct, &cg) <= 1e-8);
    }

    #[test]
    fn lu_solves_shifted_skew((a, b) in system(), s in -3.0..3.0f64) {
        // SPD plus a skew part keeps the symmetric part positive definite.
        let n = a.nrows();
        let mut d = a.to_dense();
        for i in 0..n {
            for j in (i + 1)..n {
                let k = s * ((i + 2 * j) % 3) as f64;
                d[i][j] += k;
                d[j][i] -= k;
            }
        }
        let m = SparseMatrix::from_dense(&d).unwrap();
        let x = ProfileLu::new(&m).unwrap().solve(&b).unwrap();
        prop_assert!(max_diff(&dense_mv(&m, &x), &b) <= 1e-10 * (1.0 + m.max_abs()));
        let y = PreparedSolver::positive_real(&m).unwrap().solve(&b).unwrap();
        prop_assert!(max_diff(&x, &y) <= 1e-12);
    }

    #[test]
    fn sparse_products_match_dense(
        rows in 1usize..12,
        cols in 1usize..12,
        seed in prop::collection::vec((0usize..144, -3.0..3.0f64), 0..40),
        x in prop::collection::vec(-4.0..4.0f64, 12),
    ) {
        let trip: Vec<(usize, usize, f64)> = seed.iter().map(|&(k, v)| ((k / 12) % rows, k % cols, v)).collect();
        let a = SparseMatrix::from_triplets(rows, cols, &trip).unwrap();
        let xs = &x[..cols];
        prop_assert!(max_diff(&a.spmv(xs).unwrap(), &dense_mv(&a, xs)) <= 1e-12);
        let xt = &x[..rows];
        prop_assert!(max_diff(&a.transpose_spmv(xt).unwrap(), &a.transpose().spmv(xt).unwrap()) <= 1e-12);
        let dense = a.to_dense();
        for &(i, j, _) in &trip {
            prop_assert_eq!(a.get(i, j), dense[i][j]);
        }
    }
}
