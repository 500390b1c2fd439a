//! Banded LU factorization with partial pivoting, in LAPACK band storage.
//!
//! The Newton linearizations on masked grids produce band matrices whose
//! bandwidth is a few grid rows; a direct band solve keeps those iterations
//! fast and deterministic.

use crate::scalar::Real;

/// Square band matrix with `kl` subdiagonals and `ku` superdiagonals.
///
/// Storage follows the LAPACK `gb` convention with room for pivot fill-in:
/// entry `(i, j)` lives at `ab[kl + ku + i - j][j]` and the factored upper
/// bandwidth grows to `kl + ku`.
#[derive(Debug, Clone)]
pub struct BandMatrix<S: Real> {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ab: Vec<S>,
}

impl<S: Real> BandMatrix<S> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ab: vec![S::zero(); ldab * n],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.ku + self.kl >= j && j + self.kl >= i);
        (self.kl + self.ku + i - j) * self.n + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        if i + self.ku + self.kl >= j && j + self.kl >= i {
            self.ab[self.slot(i, j)]
        } else {
            S::zero()
        }
    }

    /// Set entry `(i, j)`; panics if it falls outside the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        assert!(
            i + self.ku >= j && j + self.kl >= i,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j);
        self.ab[s] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: S) {
        assert!(i + self.ku >= j && j + self.kl >= i);
        let s = self.slot(i, j);
        self.ab[s] += v;
    }

    /// Factor in place with partial pivoting. Returns the pivot vector, or
    /// `None` on an exactly singular pivot.
    pub fn factor(&mut self) -> Option<Vec<usize>> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            // Pivot search in column j.
            let mut jp = 0usize;
            let mut best = self.ab[self.slot(j, j)].abs();
            for p in 1..=km {
                let v = self.ab[self.slot(j + p, j)].abs();
                if v > best {
                    best = v;
                    jp = p;
                }
            }
            ipiv[j] = j + jp;
            if best == S::zero() {
                return None;
            }
            ju = ju.max((j + ku + kl).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = self.slot(j, c);
                    let b = self.slot(j + jp, c);
                    self.ab.swap(a, b);
                }
            }
            let piv = self.ab[self.slot(j, j)];
            for p in 1..=km {
                let s = self.slot(j + p, j);
                self.ab[s] = self.ab[s] / piv;
            }
            for c in (j + 1)..=ju.max(j) {
                if c > ju {
                    break;
                }
                let ujc = self.ab[self.slot(j, c)];
                if ujc != S::zero() {
                    for p in 1..=km {
                        let lij = self.ab[self.slot(j + p, j)];
                        let s = self.slot(j + p, c);
                        self.ab[s] = self.ab[s] - lij * ujc;
                    }
                }
            }
        }
        Some(ipiv)
    }

    /// Solve with factors produced by [`BandMatrix::factor`].
    pub fn solve_factored(&self, ipiv: &[usize], b: &mut [S]) {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        for j in 0..n {
            let p = ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != S::zero() {
                let last = (j + kl).min(n - 1);
                for i in (j + 1)..=last.max(j) {
                    if i > last {
                        break;
                    }
                    b[i] = b[i] - self.ab[self.slot(i, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let bj = b[j] / self.ab[self.slot(j, j)];
            b[j] = bj;
            if bj != S::zero() {
                let first = j.saturating_sub(ku + kl);
                for i in first..j {
                    b[i] = b[i] - self.ab[self.slot(i, j)] * bj;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::DMat;
    use approx::assert_relative_eq;

    fn fill_pair(n: usize, kl: usize, ku: usize, seed: u64) -> (BandMatrix<f64>, DMat<f64>) {
        let mut band = BandMatrix::zeros(n, kl, ku);
        let mut dense = DMat::zeros(n, n);
        let mut state = seed;
        let mut next = move || {
            // splitmix64
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z = z ^ (z >> 31);
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                if i + ku >= j && j + kl >= i {
                    let mut v = next();
                    if i == j {
                        v += 4.0; // keep it comfortably nonsingular
                    }
                    band.set(i, j, v);
                    dense[(i, j)] = v;
                }
            }
        }
        (band, dense)
    }

    #[test]
    fn matches_dense_solve() {
        for (n, kl, ku, seed) in [(12, 2, 3, 1u64), (25, 4, 4, 7), (9, 1, 1, 3)] {
            let (mut band, dense) = fill_pair(n, kl, ku, seed);
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
            let expect = dense.solve(&b).unwrap();
            let ipiv = band.factor().unwrap();
            let mut x = b.clone();
            band.solve_factored(&ipiv, &mut x);
            for i in 0..n {
                assert_relative_eq!(x[i], expect[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn singular_matrix_reports_none() {
        let mut band = BandMatrix::<f64>::zeros(3, 1, 1);
        band.set(0, 0, 1.0);
        band.set(1, 1, 0.0);
        band.set(2, 2, 1.0);
        assert!(band.factor().is_none());
    }
}
