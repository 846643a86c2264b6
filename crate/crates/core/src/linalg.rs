//! Thin helpers over faer: a merged coordinate-format sparse matrix and the few
//! dense factorizations the diagnostics need.

use std::io::Write;

use faer::linalg::solvers::DenseSolveCore;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Sparse matrix in coordinate form with duplicates summed and entries sorted row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != 0.0);
        Self {
            nrows,
            ncols,
            entries,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(r, c)))
            .map(|i| self.entries[i].2)
            .unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        )
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let t = self.transpose();
        let mut worst: f64 = 0.0;
        for &(r, c, v) in &self.entries {
            worst = worst.max((v - t.get(r, c)).abs());
        }
        for &(r, c, v) in &t.entries {
            worst = worst.max((v - self.get(r, c)).abs());
        }
        worst
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trip: Vec<Triplet<usize, usize, f64>> = self
            .entries
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trip).map_err(|e| Error::Solver {
            reason: format!("sparse matrix creation failed: {e:?}"),
            residual: f64::NAN,
        })
    }

    /// Coordinate text export: a `% rows cols nnz` header, then one `row col value` line per entry.
    pub fn write_coordinate(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "% {} {} {}", self.nrows, self.ncols, self.entries.len())?;
        for &(r, c, v) in &self.entries {
            writeln!(out, "{r} {c} {v:.17e}")?;
        }
        Ok(())
    }
}

pub fn mat_from_rows(rows: &[Vec<f64>]) -> Mat<f64> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(nr, nc, |i, j| rows[i][j])
}

pub fn mat_from_cols(cols: &[Vec<f64>]) -> Mat<f64> {
    let nc = cols.len();
    let nr = cols.first().map_or(0, |c| c.len());
    Mat::from_fn(nr, nc, |i, j| cols[j][i])
}

pub fn singular_values(m: &Mat<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values()
        .map_err(|e| Error::Eigen(format!("svd: {e:?}")))
}

/// Ratio of extreme singular values; infinite for a singular matrix.
pub fn condition_number(m: &Mat<f64>) -> Result<f64> {
    let s = singular_values(m)?;
    let (max, min) = match (s.first(), s.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Ok(1.0),
    };
    if min <= max * f64::EPSILON || min == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(max / min)
    }
}

pub fn inverse(m: &Mat<f64>) -> Mat<f64> {
    m.partial_piv_lu().inverse()
}

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// Singular values below `rel_tol · σ_max` count as zero.
pub fn null_space(m: &Mat<f64>, rel_tol: f64) -> Result<Mat<f64>> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return Ok(Mat::identity(n, n));
    }
    let svd = m.svd().map_err(|e| Error::Eigen(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let smax = if s.nrows() > 0 { s[0] } else { 0.0 };
    let rank = (0..s.nrows()).filter(|&i| s[i] > rel_tol * smax).count();
    let v = svd.V();
    Ok(Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]))
}

pub fn rank(m: &Mat<f64>, rel_tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&x| x > rel_tol * smax).count())
}

/// Residual `‖b - A x‖` of the least-squares fit of `b` by the columns of `a`.
pub fn lstsq_residual(a: &Mat<f64>, b: &[f64]) -> Result<f64> {
    let basis = orthonormal_columns(a, 1e-12)?;
    let mut r = b.to_vec();
    for j in 0..basis.ncols() {
        let dot: f64 = (0..r.len()).map(|i| basis[(i, j)] * b[i]).sum();
        for (i, ri) in r.iter_mut().enumerate() {
            *ri -= dot * basis[(i, j)];
        }
    }
    Ok(r.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Orthonormal basis of the column space of `a`.
pub fn orthonormal_columns(a: &Mat<f64>, rel_tol: f64) -> Result<Mat<f64>> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(Mat::zeros(a.nrows(), 0));
    }
    let svd = a.svd().map_err(|e| Error::Eigen(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let smax = s[0];
    let r = (0..s.nrows()).filter(|&i| s[i] > rel_tol * smax).count();
    let u = svd.U();
    Ok(Mat::from_fn(a.nrows(), r, |i, j| u[(i, j)]))
}

/// Eigenvalues of a symmetric matrix, nondecreasing.
pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky_lower(m: &Mat<f64>) -> Result<Mat<f64>> {
    let llt = m
        .llt(Side::Lower)
        .map_err(|e| Error::Eigen(format!("cholesky: {e:?}")))?;
    Ok(llt.L().to_owned())
}

/// Solve `L X = B` for lower-triangular `L`.
pub fn solve_lower(l: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut x = b.clone();
    l.solve_lower_triangular_in_place(&mut x);
    x
}

/// Smallest eigenvalues of the pencil `(a, b)` with `b` symmetric positive definite.
pub fn generalized_eigenvalues(a: &Mat<f64>, b: &Mat<f64>) -> Result<Vec<f64>> {
    let l = cholesky_lower(b)?;
    let y = solve_lower(&l, a);
    let z = solve_lower(&l, &y.transpose().to_owned());
    let sym = Mat::from_fn(z.nrows(), z.ncols(), |i, j| 0.5 * (z[(i, j)] + z[(j, i)]));
    symmetric_eigenvalues(&sym)
}
