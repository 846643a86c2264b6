//! Direct solution of the assembled saddle-point system.

use faer::linalg::solvers::{Solve, SolveCore};
use faer::{Conj, Mat};

use crate::assembly::SaddleSystem;
use crate::linalg::SparseMatrix;
use crate::error::{Error, Result};

/// Relative residual accepted from the direct solver: `‖r‖ < tol (1 + ‖b‖)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub stress: Vec<f64>,
    pub displacement: Vec<f64>,
    /// Rigid-motion multipliers; empty unless the system has constraint rows.
    pub multipliers: Vec<f64>,
    /// `‖K x - b‖` of the returned solution.
    pub residual: f64,
}

type SparseLu = faer::sparse::linalg::solvers::Lu<usize, f64>;

fn factor(matrix: &SparseMatrix) -> Result<SparseLu> {
    matrix.to_faer()?.sp_lu().map_err(|e| Error::Solver {
        reason: format!("sparse LU failed: {e:?}"),
        residual: f64::NAN,
    })
}

fn solve_columns(lu: &SparseLu, n: usize, columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut x = Mat::from_fn(n, columns.len(), |i, j| columns[j][i]);
    lu.solve_in_place_with_conj(Conj::No, x.as_mut());
    (0..columns.len()).map(|j| (0..n).map(|i| x[(i, j)]).collect()).collect()
}

fn check_residual(matrix: &SparseMatrix, x: &[f64], rhs: &[f64]) -> Result<f64> {
    let r = matrix.mul_vec(x);
    let residual = r.iter().zip(rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let bnorm = rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
    if !(residual < RESIDUAL_TOLERANCE * (1.0 + bnorm)) {
        return Err(Error::Solver {
            reason: "residual too large (singular or ill-conditioned system)".into(),
            residual,
        });
    }
    Ok(residual)
}

/// Solve a general square sparse system by LU and check the residual.
pub fn solve_sparse(matrix: &SparseMatrix, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let lu = factor(matrix)?;
    let x = solve_columns(&lu, matrix.nrows(), &[rhs.to_vec()]).remove(0);
    let residual = check_residual(matrix, &x, rhs)?;
    Ok((x, residual))
}

/// Solve with the sparse anchor rows in place of the dense constraint rows.
///
/// With a compatible load both systems share the stress and differ in the
/// displacement by a kernel element `N a`. The kernel comes from the same
/// factorization (`K0 n = 0`, `anchor n = e_j`), and `a` is fixed by `C u = 0`.
fn solve_anchored(system: &SaddleSystem, c: &SparseMatrix, anchor: &SparseMatrix) -> Result<(Vec<f64>, f64)> {
    let matrix = system.matrix_with(Some(anchor));
    let size = matrix.nrows();
    let base = size - anchor.nrows();
    let lu = factor(&matrix)?;
    let mut columns = vec![system.rhs()];
    for j in 0..anchor.nrows() {
        let mut e = vec![0.0; size];
        e[base + j] = 1.0;
        columns.push(e);
    }
    let mut sols = solve_columns(&lu, size, &columns);
    let mut x = sols.remove(0);
    let ns = system.n_stress();
    let disp = |v: &[f64]| v[ns..base].to_vec();
    let cn: Vec<Vec<f64>> = sols.iter().map(|n| c.mul_vec(&disp(n))).collect();
    let cu = c.mul_vec(&disp(&x));
    let m = Mat::from_fn(cn.len(), cn.len(), |r, j| cn[j][r]);
    let rhs = Mat::from_fn(cu.len(), 1, |r, _| -cu[r]);
    let a = m.full_piv_lu().solve(&rhs);
    for (j, n) in sols.iter().enumerate() {
        for (xi, ni) in x.iter_mut().zip(n) {
            *xi += a[(j, 0)] * ni;
        }
    }
    let residual = check_residual(&system.matrix(), &x, &system.rhs())?;
    Ok((x, residual))
}

pub fn solve(system: &SaddleSystem) -> Result<DiscreteSolution> {
    let anchored = match (&system.c, &system.anchor) {
        (Some(c), Some(anchor)) if anchor.nrows() == c.nrows() => solve_anchored(system, c, anchor).ok(),
        _ => None,
    };
    let (x, residual) = match anchored {
        Some(found) => found,
        None => solve_sparse(&system.matrix(), &system.rhs())?,
    };
    let ns = system.n_stress();
    let nu = system.n_disp();
    Ok(DiscreteSolution {
        stress: x[..ns].to_vec(),
        displacement: x[ns..ns + nu].to_vec(),
        multipliers: x[ns + nu..].to_vec(),
        residual,
    })
}
