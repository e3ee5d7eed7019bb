//! Banded matrices with LU factorization and partial pivoting.
//!
//! Storage follows the LAPACK band convention: entry `(i, j)` with
//! `|i - j| <= bandwidth` lives at `data[row_offset + i - j][j]` where the
//! leading `kl` rows hold pivoting fill. Factorization and solves are O(n)
//! for fixed bandwidth, which keeps the Newton and reduction linear algebra
//! linear in the grid size.

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // (2*kl + ku + 1) x n, row-major by diagonal; top kl rows are fill space.
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let rows = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; rows * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i + self.ku >= j && j + self.kl >= i, "out of band");
        (self.kl + self.ku + i - j) * self.n + j
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.idx(i, j);
        self.data[k] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let k = self.idx(i, j);
        self.data[k] += value;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku < j || j + self.kl < i {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.data[(self.kl + self.ku + i - j) * self.n + j] * x[j];
            }
            y[i] = acc;
        }
    }

    /// LU factorization with partial pivoting, consuming the matrix.
    ///
    /// Fails when a pivot column is entirely below `pivot_floor` in absolute
    /// value, which signals a numerically singular operator.
    pub fn factor(mut self, pivot_floor: f64) -> Result<BandedLu, SingularMatrix> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let kv = kl + ku; // width of the upper part after pivoting fill
        let mut pivots = vec![0usize; n];

        for col in 0..n {
            // pivot search in column `col`, rows col..=col+kl
            let last = (col + kl).min(n - 1);
            let mut p = col;
            let mut pmax = self.get_f(col, col, kv).abs();
            for r in (col + 1)..=last {
                let v = self.get_f(r, col, kv).abs();
                if v > pmax {
                    pmax = v;
                    p = r;
                }
            }
            if pmax <= pivot_floor {
                return Err(SingularMatrix { column: col });
            }
            pivots[col] = p;
            if p != col {
                // swap rows col and p within the band
                let jhi = (col + kv).min(n - 1);
                for j in col..=jhi {
                    let a = self.get_f(col, j, kv);
                    let b = self.get_f(p, j, kv);
                    self.set_f(col, j, b, kv);
                    self.set_f(p, j, a, kv);
                }
            }
            let diag = self.get_f(col, col, kv);
            for r in (col + 1)..=last {
                let m = self.get_f(r, col, kv) / diag;
                self.set_f(r, col, m, kv);
                if m != 0.0 {
                    let jhi = (col + kv).min(n - 1);
                    for j in (col + 1)..=jhi {
                        let v = self.get_f(r, j, kv) - m * self.get_f(col, j, kv);
                        self.set_f(r, j, v, kv);
                    }
                }
            }
        }

        Ok(BandedLu {
            n,
            kl,
            kv,
            data: self.data,
            pivots,
        })
    }

    // Accessors that allow the widened upper band used during factorization.
    #[inline]
    fn get_f(&self, i: usize, j: usize, kv: usize) -> f64 {
        if j > i + kv || i > j + self.kl {
            return 0.0;
        }
        self.data[(self.kl + self.ku + i - j) * self.n + j]
    }

    #[inline]
    fn set_f(&mut self, i: usize, j: usize, v: f64, kv: usize) {
        debug_assert!(j <= i + kv && i <= j + self.kl);
        self.data[(self.kl + self.ku + i - j) * self.n + j] = v;
    }
}

/// Factored form of a [`BandedMatrix`]; solves in O(n) per right-hand side.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    kv: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

/// Pivot breakdown during banded LU factorization.
#[derive(Debug, Clone, thiserror::Error)]
#[error("numerically singular matrix: no admissible pivot in column {column}")]
pub struct SingularMatrix {
    pub column: usize,
}

impl BandedLu {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[(self.kv + i - j) * self.n + j]
    }

    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        // forward substitution with the stored multipliers
        for col in 0..n {
            let p = self.pivots[col];
            if p != col {
                b.swap(col, p);
            }
            let last = (col + self.kl).min(n - 1);
            let bc = b[col];
            if bc != 0.0 {
                for r in (col + 1)..=last {
                    b[r] -= self.at(r, col) * bc;
                }
            }
        }
        // back substitution
        for col in (0..n).rev() {
            let jhi = (col + self.kv).min(n - 1);
            let mut acc = b[col];
            for j in (col + 1)..=jhi {
                acc -= self.at(col, j) * b[j];
            }
            b[col] = acc / self.at(col, col);
        }
    }

    /// Convenience: solve into a fresh vector.
    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve(&mut x);
        x
    }
}
