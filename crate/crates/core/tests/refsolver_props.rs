use fracinfo::momentum_state;
use fracinfo::refsolver::{diagonalize_n, eigen_residual, overlaps, ResidualGrid};

#[test]
fn doubling_the_grid_changes_little() {
    for alpha in [1.3, 1.7] {
        let a = diagonalize_n(alpha, 20.0, 2048, 6).unwrap();
        let b = diagonalize_n(alpha, 20.0, 4096, 6).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-7 * y, "α={alpha}: {x} vs {y}");
        }
        assert!(a.refinement_change < 1e-6);
    }
}

#[test]
fn eigenvalues_are_ordered_and_positive() {
    let r = diagonalize_n(1.5, 20.0, 2048, 8).unwrap();
    assert!(r.eigenvalues[0] > 0.0);
    assert!(r.eigenvalues.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn harmonic_overlaps_and_residuals() {
    let r = diagonalize_n(2.0, 12.0, 2048, 5).unwrap();
    let o = overlaps(&r, 4).unwrap();
    for (n, row) in o.iter().enumerate() {
        assert!((row[n].abs() - 1.0).abs() < 1e-6, "n={n}: {}", row[n]);
    }
    for n in 0..=4 {
        let s = momentum_state(n, 2.0).unwrap();
        let (rayleigh, residual) = eigen_residual(&s, 2.0, &ResidualGrid::for_state(&s)).unwrap();
        assert!((rayleigh - (2 * n + 1) as f64).abs() < 1e-7);
        assert!(residual < 1e-6);
    }
}

#[test]
fn fractional_ground_state_is_close_but_not_exact() {
    // the factorization ground state is near, not equal to, the lowest eigenvector
    let r = diagonalize_n(1.5, 20.0, 4096, 3).unwrap();
    let o = overlaps(&r, 0).unwrap();
    assert!(o[0][0].abs() > 0.99 && o[0][0].abs() < 1.0 - 1e-6, "{}", o[0][0]);
}
