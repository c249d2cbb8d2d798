//! Minimal exact linear algebra over ℚ and ℤ: just what the lattice and
//! quadratic-form engines need. Row vectors act on the left, matching the
//! convention that lattice bases are stored as rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A dense matrix over ℚ, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::MalformedGram("ragged rows".into()));
        }
        Ok(QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * &other[(k, j)];
                    let cur = &out[(i, j)] + term;
                    out[(i, j)] = cur;
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "det of nonsquare matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[(r, col)].is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => return BigRational::zero(),
            };
            if pivot != col {
                m.swap_rows(pivot, col);
                det = -det;
            }
            let pv = m[(col, col)].clone();
            det *= &pv;
            for r in (col + 1)..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] / &pv;
                for c in col..n {
                    let delta = &factor * &m[(col, c)];
                    let cur = &m[(r, c)] - delta;
                    m[(r, c)] = cur;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<QMat> {
        assert_eq!(self.rows, self.cols, "inverse of nonsquare matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !m[(r, col)].is_zero())
                .ok_or(Error::DegenerateForm)?;
            if pivot != col {
                m.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let pv = m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] /= &pv;
                inv[(col, c)] /= &pv;
            }
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in 0..n {
                    let dm = &factor * &m[(col, c)];
                    let di = &factor * &inv[(col, c)];
                    let nm = &m[(r, c)] - dm;
                    let ni = &inv[(r, c)] - di;
                    m[(r, c)] = nm;
                    inv[(r, c)] = ni;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Row-vector image: `v · self` for a row vector `v` of length `nrows`.
    pub fn act_on_row(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigRational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let t = vi * &self[(i, j)];
                let cur = &out[j] + t;
                out[j] = cur;
            }
        }
        out
    }

    /// A basis (as rows) of `{v : v · self = 0}`, the left kernel.
    pub fn left_kernel(&self) -> QMat {
        // Gaussian elimination on the transpose, tracking row combinations.
        let n = self.rows;
        let mut m = self.clone();
        let mut u = QMat::identity(n);
        let mut pivot_rows: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let pivot = (r..n).find(|&i| !m[(i, c)].is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => continue,
            };
            m.swap_rows(pivot, r);
            u.swap_rows(pivot, r);
            let pv = m[(r, c)].clone();
            for i in (r + 1)..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] / &pv;
                for cc in 0..self.cols {
                    let d = &factor * &m[(r, cc)];
                    let cur = &m[(i, cc)] - d;
                    m[(i, cc)] = cur;
                }
                for cc in 0..n {
                    let d = &factor * &u[(r, cc)];
                    let cur = &u[(i, cc)] - d;
                    u[(i, cc)] = cur;
                }
            }
            pivot_rows.push(r);
            r += 1;
            if r == n {
                break;
            }
        }
        let kernel_rows: Vec<Vec<BigRational>> = (r..n).map(|i| u.row(i).to_vec()).collect();
        QMat::from_rows(kernel_rows).unwrap_or_else(|_| QMat::zero(0, n))
    }

    /// All denominators cleared: returns `(M, d)` with `d·self = M` integral.
    pub fn scale_to_integer(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut den = BigInt::one();
        for x in &self.data {
            den = den.lcm(x.denom());
        }
        let m = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.numer() * (&den / x.denom()))
                    .collect()
            })
            .collect();
        (m, den)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

// ---------------------------------------------------------------------------
// Integer matrices
// ---------------------------------------------------------------------------

/// Row Hermite normal form. Returns the nonzero rows: pivots positive,
/// entries above each pivot reduced to `[0, pivot)`. The result is the
/// canonical basis of the row lattice.
pub fn hermite_normal_form(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let rows = m.len();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // gcd out the column below r
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !m[i][c].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if m[i][c].abs() < m[b][c].abs() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let b = match best {
                Some(b) => b,
                None => break,
            };
            m.swap(r, b);
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let mut done = true;
            let pivot = m[r][c].clone();
            for i in (r + 1)..rows {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&pivot);
                for cc in 0..cols {
                    let d = &q * &m[r][cc];
                    m[i][cc] -= d;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        // reduce entries above the pivot
        let pivot = m[r][c].clone();
        for i in 0..r {
            let q = m[i][c].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            for cc in 0..cols {
                let d = &q * &m[r][cc];
                m[i][cc] -= d;
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// A basis of `{y ∈ ℤ^k : y · w = 0}` for an integer vector `w`, returned in
/// Hermite normal form (k−1 rows when w ≠ 0).
pub fn integer_kernel_of_functional(w: &[BigInt]) -> Vec<Vec<BigInt>> {
    let k = w.len();
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut v: Vec<BigInt> = w.to_vec();
    // fold every nonzero v[i] (i>0) into v[0] by unimodular row operations
    for i in 1..k {
        if v[i].is_zero() {
            continue;
        }
        if v[0].is_zero() {
            u.swap(0, i);
            v.swap(0, i);
            continue;
        }
        let e = v[0].extended_gcd(&v[i]);
        let (g, s, t) = (e.gcd, e.x, e.y);
        let a = &v[0] / &g;
        let b = &v[i] / &g;
        let row0: Vec<BigInt> = (0..k).map(|c| &s * &u[0][c] + &t * &u[i][c]).collect();
        let rowi: Vec<BigInt> = (0..k).map(|c| &b * &u[0][c] - &a * &u[i][c]).collect();
        u[0] = row0;
        u[i] = rowi;
        v[i] = BigInt::zero();
        v[0] = g;
    }
    let kernel: Vec<Vec<BigInt>> = u.into_iter().skip(1).collect();
    hermite_normal_form(kernel)
}
