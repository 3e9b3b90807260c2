//! Dense helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

const POWER_STEPS: usize = 40;

/// Estimate of `cond_2` for a symmetric positive definite matrix: power iteration
/// for the largest eigenvalue and inverse iteration (through the Cholesky factor)
/// for the smallest.
pub(crate) fn spd_condition(matrix: &DMatrix<f64>, chol: &Cholesky<f64, Dyn>) -> f64 {
    let n = matrix.nrows();
    if n == 1 {
        return 1.0;
    }
    // deterministic, not orthogonal to any eigenvector in practice
    let start = DVector::from_fn(n, |i, _| 1.0 + 0.37 * ((i as f64) * 0.71).sin());

    let mut x = start.normalize();
    let mut largest = 0.0;
    for _ in 0..POWER_STEPS {
        let y = matrix * &x;
        largest = x.dot(&y);
        let norm = y.norm();
        if norm == 0.0 {
            return f64::INFINITY;
        }
        x = y / norm;
    }

    let mut x = start.normalize();
    let mut inv_largest = 0.0;
    for _ in 0..POWER_STEPS {
        let y = chol.solve(&x);
        inv_largest = x.dot(&y);
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            return f64::INFINITY;
        }
        x = y / norm;
    }
    if inv_largest <= 0.0 {
        return f64::INFINITY;
    }
    largest * inv_largest
}

/// Solve the SPD system `matrix x = rhs`, returning the solution and a condition
/// estimate (infinite when the factorisation breaks down).
pub(crate) fn spd_solve(matrix: DMatrix<f64>, rhs: &DVector<f64>) -> (Option<DVector<f64>>, f64) {
    match Cholesky::new(matrix.clone()) {
        Some(chol) => {
            let cond = spd_condition(&matrix, &chol);
            (Some(chol.solve(rhs)), cond)
        }
        None => (None, f64::INFINITY),
    }
}
