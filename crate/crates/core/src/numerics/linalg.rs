//! Minimal dense linear algebra for small systems: the ambient dimensions
//! here are 2..=5 and the polynomial fits have at most a few dozen rows, so
//! a compact row-major matrix with Householder QR and Jacobi eigenvalues
//! covers everything without pulling in a full linear-algebra stack.

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DMat<S: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Real> DMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Solve the square system `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            let mut piv_val = a[col * n + col].abs();
            for r in (col + 1)..n {
                let v = a[r * n + col].abs();
                if v > piv_val {
                    piv = r;
                    piv_val = v;
                }
            }
            if piv_val == S::zero() {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] / d;
                if factor != S::zero() {
                    for c in col..n {
                        let v = a[col * n + c];
                        a[r * n + c] = a[r * n + c] - factor * v;
                    }
                    x[r] = x[r] - factor * x[col];
                }
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for c in (col + 1)..n {
                acc = acc - a[col * n + c] * x[c];
            }
            x[col] = acc / a[col * n + col];
        }
        Some(x)
    }

    /// Inverse of a small square matrix.
    pub fn inverse(&self) -> Option<DMat<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut inv = DMat::zeros(n, n);
        for j in 0..n {
            let mut e = vec![S::zero(); n];
            e[j] = S::one();
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Some(inv)
    }
}

impl<S: Real> std::ops::Index<(usize, usize)> for DMat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S: Real> std::ops::IndexMut<(usize, usize)> for DMat<S> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

/// Least-squares solution of an overdetermined system by Householder QR.
///
/// Returns `None` when the system is rank-deficient to working precision.
pub fn least_squares<S: Real>(a: &DMat<S>, b: &[S]) -> Option<Vec<S>> {
    let m = a.rows;
    let n = a.cols;
    assert!(m >= n);
    assert_eq!(b.len(), m);
    let mut r = a.data.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        // Householder vector for column k.
        let mut norm_sq = S::zero();
        for i in k..m {
            let v = r[i * n + k];
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        if norm <= S::epsilon() * S::of_usize(m) * column_scale(a, k) {
            return None;
        }
        let alpha = if r[k * n + k] >= S::zero() { -norm } else { norm };
        let mut v = vec![S::zero(); m - k];
        v[0] = r[k * n + k] - alpha;
        for i in (k + 1)..m {
            v[i - k] = r[i * n + k];
        }
        let v_norm_sq: S = v.iter().map(|x| *x * *x).sum();
        if v_norm_sq == S::zero() {
            continue;
        }
        r[k * n + k] = alpha;
        for i in (k + 1)..m {
            r[i * n + k] = S::zero();
        }
        // Apply the reflector to remaining columns and to the rhs.
        for c in (k + 1)..n {
            let mut dot = S::zero();
            for i in k..m {
                dot += v[i - k] * r[i * n + c];
            }
            let factor = S::two() * dot / v_norm_sq;
            for i in k..m {
                let vi = v[i - k];
                r[i * n + c] = r[i * n + c] - factor * vi;
            }
        }
        let mut dot = S::zero();
        for i in k..m {
            dot += v[i - k] * rhs[i];
        }
        let factor = S::two() * dot / v_norm_sq;
        for i in k..m {
            rhs[i] = rhs[i] - factor * v[i - k];
        }
    }
    // Back substitution on the upper-triangular factor.
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..n {
            acc = acc - r[row * n + c] * x[c];
        }
        let d = r[row * n + row];
        if d.abs() <= S::epsilon() * S::of_usize(m) * column_scale(a, row) {
            return None;
        }
        x[row] = acc / d;
    }
    Some(x)
}

fn column_scale<S: Real>(a: &DMat<S>, k: usize) -> S {
    let mut s = S::zero();
    for i in 0..a.rows {
        s = s.max(a[(i, k)].abs());
    }
    if s == S::zero() {
        S::one()
    } else {
        s
    }
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues sorted in
/// decreasing order; eigenvectors are the columns of the returned matrix in
/// the matching order.
pub fn symmetric_eigen<S: Real>(a: &DMat<S>) -> (Vec<S>, DMat<S>) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut v = DMat::identity(n);
    for _sweep in 0..64 {
        let mut off = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= S::epsilon() * S::of_usize(n * n) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= S::epsilon() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (S::two() * apq);
                let t = if theta >= S::zero() {
                    S::one() / (theta + (S::one() + theta * theta).sqrt())
                } else {
                    -S::one() / (-theta + (S::one() + theta * theta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .partial_cmp(&m[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<S> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = DMat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solve_small_system() {
        let a = DMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = a.solve(&[5.0, 10.0]).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(x[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_system_is_rejected() {
        let a = DMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.solve(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn least_squares_recovers_quadratic() {
        // Fit y = 1 + 2x + 3x^2 from noisy-free samples.
        let xs: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x, x * x]).collect();
        let b: Vec<f64> = xs.iter().map(|&x| 1.0 + 2.0 * x + 3.0 * x * x).collect();
        let a = DMat::from_rows(&rows);
        let c = least_squares(&a, &b).unwrap();
        assert_relative_eq!(c[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(c[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(c[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn least_squares_rejects_rank_deficient() {
        let rows = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let a = DMat::from_rows(&rows);
        assert!(least_squares(&a, &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn jacobi_eigen_diagonalizes() {
        let a = DMat::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ]);
        let (vals, vecs) = symmetric_eigen(&a);
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        // A v = lambda v for each pair
        for k in 0..3 {
            for i in 0..3 {
                let mut av = 0.0;
                for j in 0..3 {
                    av += a[(i, j)] * vecs[(j, k)];
                }
                assert_relative_eq!(av, vals[k] * vecs[(i, k)], epsilon = 1e-10);
            }
        }
    }
}
