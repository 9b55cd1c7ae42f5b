//! Minimum-norm linear least squares.
//!
//! For a tall system (`rows >= cols`) `A x ≈ b` is first reduced with
//! Householder QR to the square `R x ≈ c`, `c = (Qᵀb)[..cols]`. `R` is then
//! diagonalized with one-sided (Hestenes) Jacobi rotations, `R V = W` with
//! mutually orthogonal columns `w_j`, so the singular values are
//! `σ_j = ‖w_j‖`. The solution is
//!
//! ```text
//! x = Σ_{σ_j > tol} v_j (w_jᵀ c) / σ_j²
//! ```
//!
//! A wide system is handled the same way on `Aᵀ`, whose columns are few
//! enough to be made orthogonal. In both cases the cutoff is
//! `tol = max(rows, cols) · ε · σ_max`. Directions below the tolerance are
//! dropped, which yields the minimum-norm solution for rank-deficient
//! systems.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Outcome of [`lstsq`].
#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// Number of singular values above the cutoff.
    pub rank: usize,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
}

/// Solves `min ‖A x − b‖₂` for the `rows × cols` row-major matrix `a`,
/// returning the minimum-norm minimizer.
pub fn lstsq(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<LstsqSolution> {
    if a.len() != rows * cols {
        return Err(Error::Dimension {
            expected: rows * cols,
            found: a.len(),
        });
    }
    if b.len() != rows {
        return Err(Error::Dimension {
            expected: rows,
            found: b.len(),
        });
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Empty("least-squares system has no rows or columns".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares input".into()));
    }

    let (x, sigma, rank) = if rows >= cols {
        solve_tall(a, rows, cols, b)?
    } else {
        solve_wide(a, rows, cols, b)?
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("solution is not finite".into()));
    }
    let mut singular_values = sigma;
    singular_values.sort_by(|p, q| q.total_cmp(p));
    Ok(LstsqSolution {
        x,
        rank,
        singular_values,
    })
}

fn cutoff(rows: usize, cols: usize, sigma: &[f64]) -> f64 {
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

fn identity_columns(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect()
}

/// `rows >= cols`: QR first, then Jacobi on the square factor `R`.
fn solve_tall(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut columns: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j]).collect())
        .collect();
    let mut rhs = b.to_vec();
    householder_reduce(&mut columns, &mut rhs, cols);

    let mut w: Vec<Vec<f64>> = columns.iter().map(|c| c[..cols].to_vec()).collect();
    let c = &rhs[..cols];
    let mut v = identity_columns(cols);
    jacobi_orthogonalize(&mut w, &mut v)?;

    let sigma: Vec<f64> = w.iter().map(|col| norm(col)).collect();
    let tol = cutoff(rows, cols, &sigma);
    let mut x = vec![0.0; cols];
    let mut rank = 0;
    for j in 0..cols {
        if sigma[j] <= tol || sigma[j] == 0.0 {
            continue;
        }
        rank += 1;
        let coeff = dot(&w[j], c) / (sigma[j] * sigma[j]);
        for (xi, vi) in x.iter_mut().zip(&v[j]) {
            *xi += coeff * vi;
        }
    }
    Ok((x, sigma, rank))
}

/// `rows < cols`: Jacobi on the rows of `A`. With `Aᵀ V = W`,
/// `A = Σ v_j w_jᵀ` and `x = Σ w_j (v_jᵀ b) / σ_j²`.
fn solve_wide(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut w: Vec<Vec<f64>> = a.chunks_exact(cols).map(<[f64]>::to_vec).collect();
    let mut v = identity_columns(rows);
    jacobi_orthogonalize(&mut w, &mut v)?;

    let sigma: Vec<f64> = w.iter().map(|row| norm(row)).collect();
    let tol = cutoff(rows, cols, &sigma);
    let mut x = vec![0.0; cols];
    let mut rank = 0;
    for j in 0..rows {
        if sigma[j] <= tol || sigma[j] == 0.0 {
            continue;
        }
        rank += 1;
        let coeff = dot(&v[j], b) / (sigma[j] * sigma[j]);
        for (xi, wi) in x.iter_mut().zip(&w[j]) {
            *xi += coeff * wi;
        }
    }
    Ok((x, sigma, rank))
}

/// In-place Householder QR on `columns`, applying the same reflections to
/// `rhs`. After return the leading `steps` entries of each column hold `R`.
fn householder_reduce(columns: &mut [Vec<f64>], rhs: &mut [f64], steps: usize) {
    let rows = rhs.len();
    for k in 0..steps {
        let alpha = norm(&columns[k][k..]);
        if alpha == 0.0 {
            continue;
        }
        // v = x + sign(x_k)·‖x‖·e_k avoids cancellation.
        let x0 = columns[k][k];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        let mut reflector: Vec<f64> = columns[k][k..].to_vec();
        reflector[0] -= beta;
        let vnorm_sq = dot(&reflector, &reflector);
        if vnorm_sq == 0.0 {
            continue;
        }
        let apply = |target: &mut [f64]| {
            let s = 2.0 * dot(&reflector, target) / vnorm_sq;
            for (t, r) in target.iter_mut().zip(&reflector) {
                *t -= s * r;
            }
        };
        for col in columns.iter_mut().skip(k + 1) {
            apply(&mut col[k..rows]);
        }
        apply(&mut rhs[k..rows]);
        columns[k][k] = beta;
        for entry in &mut columns[k][k + 1..] {
            *entry = 0.0;
        }
    }
}

/// Rotates pairs of columns of `w` until all are mutually orthogonal,
/// accumulating the rotations in `v`.
fn jacobi_orthogonalize(w: &mut [Vec<f64>], v: &mut [Vec<f64>]) -> Result<()> {
    let n = w.len();
    let len = w.first().map_or(1, Vec::len).max(1);
    let threshold = len as f64 * f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = cos * t;
                rotate(w, p, q, cos, sin);
                rotate(v, p, q, cos, sin);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::Solver(format!(
        "Jacobi rotations did not converge in {MAX_SWEEPS} sweeps"
    )))
}

fn rotate(m: &mut [Vec<f64>], p: usize, q: usize, cos: f64, sin: f64) {
    let (left, right) = m.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = cos * x - sin * y;
        *b = sin * x + cos * y;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    // Scaled to stay clear of overflow for large entries.
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * a.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn square_system() {
        // [2 1; 1 3] x = [3; 5] → x = [0.8, 1.4]
        let s = lstsq(&[2.0, 1.0, 1.0, 3.0], 2, 2, &[3.0, 5.0]).unwrap();
        assert_close(&s.x, &[0.8, 1.4], 1e-12);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn overdetermined_line() {
        // Points (0,1),(1,3),(2,5) with an intercept column.
        let a = [0.0, 1.0, 1.0, 1.0, 2.0, 1.0];
        let s = lstsq(&a, 3, 2, &[1.0, 3.0, 5.0]).unwrap();
        assert_close(&s.x, &[2.0, 1.0], 1e-12);
    }

    #[test]
    fn underdetermined_min_norm() {
        // x + y = 2 → minimum norm (1, 1)
        let s = lstsq(&[1.0, 1.0], 1, 2, &[2.0]).unwrap();
        assert_close(&s.x, &[1.0, 1.0], 1e-12);
        assert_eq!(s.rank, 1);
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let s = lstsq(&[0.0; 6], 3, 2, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.x, vec![0.0, 0.0]);
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let s = lstsq(&[3.0, 0.0, 0.0, 4.0, 0.0, 0.0], 3, 2, &[0.0; 3]).unwrap();
        assert_close(&s.singular_values, &[4.0, 3.0], 1e-14);
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(lstsq(&[1.0], 1, 2, &[1.0]).is_err());
        assert!(lstsq(&[1.0, 1.0], 1, 2, &[1.0, 2.0]).is_err());
        assert!(lstsq(&[], 0, 2, &[]).is_err());
        assert!(matches!(
            lstsq(&[f64::NAN, 1.0], 1, 2, &[1.0]),
            Err(Error::NonFinite(_))
        ));
    }
}
