//! Constructive ℤ-lattice engine: duals, index ideals, Smith normal form,
//! p-maximal enlargement, hyperplane sections, and exact short-vector
//! enumeration. Everything here is built from scratch so it can serve as an
//! independent oracle for the formula engines.
//!
//! Bases are stored as rows and kept in Hermite normal form, so equal
//! lattices have identical bases and every run is reproducible bit for bit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor, int, FractionalIdeal};
use crate::ideals::{section_ideal, SectionReport};
use crate::linalg::{hermite_normal_form, integer_kernel_of_functional, QMat};
use crate::qspace::QuadraticSpace;
use crate::{Error, Result};

/// A full-rank ℤ-lattice of rank k inside an ambient quadratic space,
/// spanned by the rows of `basis` (k×n, rational entries).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZLattice {
    ambient: QuadraticSpace,
    basis: QMat,
    gram: QMat,
}

impl ZLattice {
    pub fn new(ambient: QuadraticSpace, basis: QMat) -> Result<Self> {
        if basis.ncols() != ambient.n() {
            return Err(Error::DimensionMismatch {
                expected: ambient.n(),
                got: basis.ncols(),
            });
        }
        if basis.nrows() == 0 || basis.nrows() > ambient.n() {
            return Err(Error::RankDeficient);
        }
        canonicalize(ambient, basis, None)
    }

    /// The standard lattice ℤⁿ.
    pub fn standard(ambient: QuadraticSpace) -> Self {
        let n = ambient.n();
        ZLattice {
            basis: QMat::identity(n),
            gram: ambient.gram().clone(),
            ambient,
        }
    }

    pub fn ambient(&self) -> &QuadraticSpace {
        &self.ambient
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    /// The Gram matrix of the basis: B·G·Bᵀ (precomputed).
    pub fn gram(&self) -> &QMat {
        &self.gram
    }

    /// The integral matrix 2·gram; defined exactly when the lattice is
    /// integral.
    pub(crate) fn two_gram_int(&self) -> Result<Vec<Vec<BigInt>>> {
        let k = self.rank();
        let two = BigRational::from_integer(int(2));
        let mut out = vec![vec![BigInt::zero(); k]; k];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let v = &self.gram[(i, j)] * &two;
                if !v.denom().is_one() {
                    return Err(Error::NotIntegral);
                }
                *entry = v.numer().clone();
            }
        }
        Ok(out)
    }

    /// φ\[L\] ⊆ ℤ, equivalently integral norms on the diagonal and
    /// half-integral pairings everywhere.
    pub fn is_integral(&self) -> bool {
        let g = &self.gram;
        let two = BigRational::from_integer(int(2));
        for i in 0..g.nrows() {
            if !g[(i, i)].denom().is_one() {
                return false;
            }
            for j in 0..g.ncols() {
                if !(&g[(i, j)] * &two).denom().is_one() {
                    return false;
                }
            }
        }
        true
    }

    /// The ambient vector with the given coordinates in this basis.
    pub fn vector(&self, coords: &[BigInt]) -> Vec<BigRational> {
        let row: Vec<BigRational> = coords
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        self.basis.act_on_row(&row)
    }

    /// Coordinates of an ambient vector in this basis, if it lies in the
    /// rational span.
    pub fn span_coords(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        let bt = self.basis.transpose();
        let bbt = self.basis.mul(&bt);
        let inv = bbt.inverse().map_err(|_| Error::RankDeficient)?;
        let coords = inv.mul(&QMat::from_rows(vec![bt.act_on_row(v)])?.transpose());
        let coords: Vec<BigRational> = (0..self.rank()).map(|i| coords[(i, 0)].clone()).collect();
        let back = self.basis.act_on_row(&coords);
        if back != v {
            return Err(Error::SpanMismatch);
        }
        Ok(coords)
    }

    pub fn contains_vector(&self, v: &[BigRational]) -> bool {
        match self.span_coords(v) {
            Ok(coords) => coords.iter().all(|c| c.denom().is_one()),
            Err(_) => false,
        }
    }

    /// The dual lattice L̃ = {x in the span : 2φ(x, L) ⊆ ℤ}, with basis
    /// (2·gram)⁻¹·B.
    pub fn dual(&self) -> Result<ZLattice> {
        let two = BigRational::from_integer(int(2));
        let mut g2 = self.gram.clone();
        for i in 0..g2.nrows() {
            for j in 0..g2.ncols() {
                let v = &g2[(i, j)] * &two;
                g2[(i, j)] = v;
            }
        }
        let inv = g2.inverse().map_err(|_| Error::DegenerateForm)?;
        ZLattice::new(self.ambient.clone(), inv.mul(&self.basis))
    }
}

impl std::fmt::Display for ZLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "lattice of rank {} in dim {}",
            self.rank(),
            self.ambient.n()
        )
    }
}

fn canonicalize(ambient: QuadraticSpace, basis: QMat, expect_rank: Option<usize>) -> Result<ZLattice> {
    let rank = expect_rank.unwrap_or(basis.nrows());
    let (rows, den) = basis.scale_to_integer();
    let hnf = hermite_normal_form(rows);
    if hnf.len() != rank {
        return Err(Error::RankDeficient);
    }
    let canonical = QMat::from_rows(
        hnf.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| BigRational::new(x, den.clone()))
                    .collect()
            })
            .collect(),
    )?;
    let gram = canonical.mul(ambient.gram()).mul(&canonical.transpose());
    Ok(ZLattice {
        ambient,
        basis: canonical,
        gram,
    })
}

/// The index ideal [outer/inner]: the ℤ-ideal generated by the determinants
/// of linear maps carrying `outer` into `inner`. For inner ⊆ outer this is
/// the usual integral lattice index; in general it is |det A|·ℤ where
/// inner = A·outer. Both lattices must span the same subspace.
pub fn index_ideal(inner: &ZLattice, outer: &ZLattice) -> Result<FractionalIdeal> {
    let a = change_of_basis(inner, outer)?;
    let det = a.det();
    FractionalIdeal::new(&det).map_err(|_| Error::RankDeficient)
}

fn change_of_basis(inner: &ZLattice, outer: &ZLattice) -> Result<QMat> {
    if inner.rank() != outer.rank() {
        return Err(Error::SpanMismatch);
    }
    let bt = outer.basis().transpose();
    let bbt = outer.basis().mul(&bt);
    let inv = bbt.inverse().map_err(|_| Error::RankDeficient)?;
    let a = inner.basis().mul(&bt).mul(&inv);
    if a.mul(outer.basis()) != *inner.basis() {
        return Err(Error::SpanMismatch);
    }
    Ok(a)
}

/// Elementary divisors ε₁ | ε₂ | …; their product generates the index ideal
/// of the corresponding lattice pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryDivisors(Vec<BigRational>);

impl ElementaryDivisors {
    pub fn divisors(&self) -> &[BigRational] {
        &self.0
    }

    pub fn product(&self) -> BigRational {
        self.0.iter().fold(BigRational::one(), |acc, e| acc * e)
    }
}

/// Smith normal form of a full-rank integer matrix: the divisibility chain
/// ε₁ | ε₂ | …, all positive, with ∏εᵢ = |det| for square input.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> Result<ElementaryDivisors> {
    if m.is_empty() || m[0].is_empty() {
        return Err(Error::RankDeficient);
    }
    let rows = m.len();
    let cols = m[0].len();
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::MalformedGram("ragged rows".into()));
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let k = rows.min(cols);
    let mut divisors: Vec<BigInt> = Vec::with_capacity(k);
    for t in 0..k {
        loop {
            // smallest nonzero entry of the trailing block into (t,t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() {
                        best = match best {
                            None => Some((i, j)),
                            Some((bi, bj)) => {
                                if a[i][j].abs() < a[bi][bj].abs() {
                                    Some((i, j))
                                } else {
                                    Some((bi, bj))
                                }
                            }
                        };
                    }
                }
            }
            let (bi, bj) = match best {
                Some(x) => x,
                None => return Err(Error::RankDeficient),
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            // clear the pivot row and column
            let mut clean = true;
            let pivot = a[t][t].clone();
            for i in (t + 1)..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&pivot);
                for j in t..cols {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&pivot);
                for i in t..rows {
                    let d = &q * &a[i][t];
                    a[i][j] -= d;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility chain: the pivot must divide the trailing block
            let mut offender = None;
            'scan: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !(&a[i][j] % &pivot).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    for j in t..cols {
                        let add = a[i][j].clone();
                        a[t][j] += add;
                    }
                }
                None => break,
            }
        }
        divisors.push(a[t][t].abs());
    }
    Ok(ElementaryDivisors(
        divisors
            .into_iter()
            .map(BigRational::from_integer)
            .collect(),
    ))
}

/// Elementary divisors of a pair inner ⊆ outer: the Smith normal form of
/// the integral change-of-basis matrix expressing inner in outer.
pub fn elementary_divisors(inner: &ZLattice, outer: &ZLattice) -> Result<ElementaryDivisors> {
    let a = change_of_basis(inner, outer)?;
    let (rows, den) = a.scale_to_integer();
    if !den.is_one() {
        return Err(Error::ContractViolation(
            "inner lattice is not contained in outer".into(),
        ));
    }
    smith_normal_form(&rows)
}

// ---------------------------------------------------------------------------
// Maximal lattices
// ---------------------------------------------------------------------------

/// One enlargement candidate at p for a lattice with integral 2·gram `a`:
/// a coefficient vector y (mod p), not all divisible by p, such that
/// x = (1/p)·y·B keeps the lattice integral. Deterministic: the first
/// candidate in a fixed sweep order is returned.
fn enlargement_candidate(a: &[Vec<BigInt>], p: &BigInt) -> Option<Vec<BigInt>> {
    let k = a.len();
    if *p == int(2) {
        // full coset sweep: at 2 the quadratic condition is not determined
        // by the radical of the bilinear form
        let total: u64 = 1 << k;
        for mask in 1..total {
            let y: Vec<BigInt> = (0..k).map(|i| int(((mask >> i) & 1) as i64)).collect();
            if satisfies_enlargement(&y, a, p) {
                return Some(y);
            }
        }
        return None;
    }
    // odd p: candidates must lie in the radical of the bilinear form mod p
    let radical = mod_p_left_kernel(a, p);
    if radical.is_empty() {
        return None;
    }
    let rho = radical.len();
    let mut counter = vec![0u64; rho];
    loop {
        let mut idx = 0;
        loop {
            if idx == rho {
                return None;
            }
            counter[idx] += 1;
            if BigInt::from(counter[idx]) < *p {
                break;
            }
            counter[idx] = 0;
            idx += 1;
        }
        let mut y = vec![BigInt::zero(); k];
        for (ci, row) in counter.iter().zip(&radical) {
            if *ci == 0 {
                continue;
            }
            let c = BigInt::from(*ci);
            for (yj, rj) in y.iter_mut().zip(row) {
                *yj += &c * rj;
            }
        }
        for yj in y.iter_mut() {
            *yj = yj.mod_floor(p);
        }
        if y.iter().all(|v| v.is_zero()) {
            continue;
        }
        if satisfies_enlargement(&y, a, p) {
            return Some(y);
        }
    }
}

/// x = (1/p)·y·B is an integral enlargement iff y·A ≡ 0 (mod p) and
/// y·A·yᵀ ≡ 0 (mod 2p²), with A = 2·gram. The conditions only depend on
/// y mod p because the lattice is integral.
fn satisfies_enlargement(y: &[BigInt], a: &[Vec<BigInt>], p: &BigInt) -> bool {
    let k = y.len();
    let ya: Vec<BigInt> = (0..k)
        .map(|j| (0..k).map(|i| &y[i] * &a[i][j]).sum())
        .collect();
    let two = int(2);
    if *p == two {
        if ya.iter().any(|v| !v.mod_floor(&two).is_zero()) {
            return false;
        }
        let yay: BigInt = ya.iter().zip(y).map(|(v, yi)| v * yi).sum();
        yay.mod_floor(&int(8)).is_zero()
    } else {
        if ya.iter().any(|v| !v.mod_floor(p).is_zero()) {
            return false;
        }
        let yay: BigInt = ya.iter().zip(y).map(|(v, yi)| v * yi).sum();
        yay.mod_floor(&(p * p)).is_zero()
    }
}

/// Basis of {y : y·A ≡ 0 (mod p)} over 𝔽_p, entries lifted to 0..p.
fn mod_p_left_kernel(a: &[Vec<BigInt>], p: &BigInt) -> Vec<Vec<BigInt>> {
    let k = a.len();
    let mut m: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| a[i][j].mod_floor(p)).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut r = 0usize;
    for c in 0..k {
        let pivot = (r..k).find(|&i| !m[i][c].is_zero());
        let pivot = match pivot {
            Some(x) => x,
            None => continue,
        };
        m.swap(pivot, r);
        u.swap(pivot, r);
        let inv = mod_p_inverse(&m[r][c], p);
        for j in 0..k {
            m[r][j] = (&m[r][j] * &inv).mod_floor(p);
            u[r][j] = (&u[r][j] * &inv).mod_floor(p);
        }
        for i in 0..k {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..k {
                let dm = (&f * &m[r][j]).mod_floor(p);
                let du = (&f * &u[r][j]).mod_floor(p);
                m[i][j] = (&m[i][j] - dm).mod_floor(p);
                u[i][j] = (&u[i][j] - du).mod_floor(p);
            }
        }
        r += 1;
        if r == k {
            break;
        }
    }
    u.into_iter().skip(r).collect()
}

fn mod_p_inverse(x: &BigInt, p: &BigInt) -> BigInt {
    let e = x.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

/// Integer-state enlargement: the abstract lattice (1/den)·U relative to a
/// starting basis with integral doubled Gram matrix `b2`. All arithmetic
/// stays in ℤ; the current doubled Gram is U·b2·Uᵀ/den², recomputed by
/// exact division.
struct ScaledBasis {
    u: Vec<Vec<BigInt>>,
    den: BigInt,
}

impl ScaledBasis {
    fn identity(k: usize) -> Self {
        ScaledBasis {
            u: (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect(),
            den: BigInt::one(),
        }
    }

    /// U·b2·Uᵀ/den², exact.
    fn doubled_gram(&self, b2: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let k = self.u.len();
        let mut ub = vec![vec![BigInt::zero(); k]; k];
        for i in 0..k {
            for l2 in 0..k {
                if self.u[i][l2].is_zero() {
                    continue;
                }
                for j in 0..k {
                    let add = &self.u[i][l2] * &b2[l2][j];
                    ub[i][j] += add;
                }
            }
        }
        let d2 = &self.den * &self.den;
        let mut out = vec![vec![BigInt::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let s: BigInt = (0..k).map(|l2| &ub[i][l2] * &self.u[j][l2]).sum();
                let (q, r) = s.div_rem(&d2);
                debug_assert!(r.is_zero(), "non-integral intermediate lattice");
                out[i][j] = q;
            }
        }
        out
    }

    /// Adjoins (1/p)·y·U: stacks p·U and y·U, renormalizes by HNF.
    fn adjoin(&mut self, y: &[BigInt], p: &BigInt) {
        let k = self.u.len();
        let mut rows: Vec<Vec<BigInt>> = self
            .u
            .iter()
            .map(|row| row.iter().map(|x| x * p).collect())
            .collect();
        let extra: Vec<BigInt> = (0..k)
            .map(|j| (0..k).map(|i| &y[i] * &self.u[i][j]).sum())
            .collect();
        rows.push(extra);
        let hnf = hermite_normal_form(rows);
        debug_assert_eq!(hnf.len(), k);
        self.u = hnf;
        self.den = &self.den * p;
    }

    /// All p-enlargements applied: no integral coset of (1/p)·current left.
    fn saturate_at(&mut self, b2: &[Vec<BigInt>], p: &BigInt) {
        loop {
            let current = self.doubled_gram(b2);
            match enlargement_candidate(&current, p) {
                Some(y) => self.adjoin(&y, p),
                None => return,
            }
        }
    }

    /// Saturates at every prime dividing det(b2).
    fn saturate(&mut self, b2: &[Vec<BigInt>]) {
        let det = int_det(b2);
        debug_assert!(!det.is_zero());
        for (p, _) in factor(&det) {
            self.saturate_at(b2, &p);
        }
    }
}

/// Fraction-free integer determinant (Bareiss).
fn int_det(m: &[Vec<BigInt>]) -> BigInt {
    let k = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for t in 0..k {
        if a[t][t].is_zero() {
            match ((t + 1)..k).find(|&i| !a[i][t].is_zero()) {
                Some(i) => {
                    a.swap(t, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (t + 1)..k {
            for j in (t + 1)..k {
                let num = &a[i][j] * &a[t][t] - &a[i][t] * &a[t][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[i][j] = q;
            }
            a[i][t] = BigInt::zero();
        }
        prev = a[t][t].clone();
    }
    if sign < 0 {
        -prev
    } else {
        prev
    }
}

/// Repeatedly adjoins cosets x ∈ (1/p)L with φ\[x\] ∈ ℤ and 2φ(x,L) ⊆ ℤ until
/// no integral enlargement at p remains.
pub fn p_maximal_enlarge(l: &ZLattice, p: &BigInt) -> Result<ZLattice> {
    let b2 = l.two_gram_int()?;
    let mut state = ScaledBasis::identity(l.rank());
    state.saturate_at(&b2, p);
    apply_scaled(l, &state)
}

/// A maximal integral lattice in the span of `l` containing `l`: p-maximal
/// enlargement at every prime dividing det(2·gram). The result does not
/// depend on which maximal lattice is found, as far as every index ideal
/// computed against it is concerned.
pub fn maximalize(l: &ZLattice) -> Result<ZLattice> {
    let b2 = l.two_gram_int()?;
    let mut state = ScaledBasis::identity(l.rank());
    state.saturate(&b2);
    apply_scaled(l, &state)
}

fn apply_scaled(l: &ZLattice, state: &ScaledBasis) -> Result<ZLattice> {
    let k = l.rank();
    let coeff = QMat::from_rows(
        state
            .u
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| BigRational::new(x.clone(), state.den.clone()))
                    .collect()
            })
            .collect(),
    )?;
    let result = canonicalize(l.ambient.clone(), coeff.mul(&l.basis), Some(k))?;
    debug_assert!(result.is_integral());
    Ok(result)
}

/// A ℤ-maximal lattice in the space: the standard lattice is rescaled by
/// the smallest integer making it integral, then enlarged until maximal.
pub fn maximal_lattice(space: &QuadraticSpace) -> Result<ZLattice> {
    let n = space.n();
    // c·ℤⁿ is integral iff c² clears the diagonal denominators and the
    // denominators of the doubled pairings
    let mut need = BigInt::one();
    for i in 0..n {
        need = need.lcm(space.gram()[(i, i)].denom());
        for j in 0..n {
            let v = &space.gram()[(i, j)] * BigRational::from_integer(int(2));
            need = need.lcm(v.denom());
        }
    }
    let mut c = BigInt::one();
    for (p, e) in factor(&need) {
        c *= p.pow(e.div_ceil(2));
    }
    let mut basis = QMat::identity(n);
    for i in 0..n {
        basis[(i, i)] = BigRational::from_integer(c.clone());
    }
    let start = ZLattice::new(space.clone(), basis)?;
    maximalize(&start)
}

/// The sublattice {x ∈ L : φ(x, h) = 0} of rank k−1.
pub fn intersect_hyperplane(l: &ZLattice, h: &[BigRational]) -> Result<ZLattice> {
    if h.len() != l.ambient.n() {
        return Err(Error::DimensionMismatch {
            expected: l.ambient.n(),
            got: h.len(),
        });
    }
    if l.ambient.norm(h).is_zero() {
        return Err(Error::IsotropicVector);
    }
    let gh = l.ambient.gram().act_on_row(h);
    let pairings: Vec<BigRational> = (0..l.rank())
        .map(|i| {
            l.basis
                .row(i)
                .iter()
                .zip(&gh)
                .fold(BigRational::zero(), |acc, (b, w)| acc + b * w)
        })
        .collect();
    let functional = QMat::from_rows(vec![pairings])?;
    let (rows, _) = functional.scale_to_integer();
    let kernel = integer_kernel_of_functional(&rows[0]);
    let coeff = QMat::from_rows(
        kernel
            .into_iter()
            .map(|row| row.into_iter().map(BigRational::from_integer).collect())
            .collect(),
    )?;
    ZLattice::new(l.ambient.clone(), coeff.mul(&l.basis))
}

/// The fractional ideal φ(h, L) generated by the pairings of h against a
/// basis of L.
pub fn pairing_ideal(h: &[BigRational], l: &ZLattice) -> Result<FractionalIdeal> {
    if h.len() != l.ambient.n() {
        return Err(Error::DimensionMismatch {
            expected: l.ambient.n(),
            got: h.len(),
        });
    }
    let gh = l.ambient.gram().act_on_row(h);
    let mut ideal: Option<FractionalIdeal> = None;
    for i in 0..l.rank() {
        let v = l
            .basis
            .row(i)
            .iter()
            .zip(&gh)
            .fold(BigRational::zero(), |acc, (b, w)| acc + b * w);
        if v.is_zero() {
            continue;
        }
        let gen = FractionalIdeal::new(&v)?;
        ideal = Some(match ideal {
            None => gen,
            Some(acc) => acc.sum(&gen),
        });
    }
    ideal.ok_or(Error::ZeroArgument("pairing ideal"))
}

/// Constructive section engine for many vectors of one integral lattice:
/// given coordinates of h in L it produces the pairing ideal 2φ(h,L) and
/// the index [M/L∩W] through scaled integer arithmetic only (kernel, Gram
/// restriction, saturation, determinants).
pub struct SectionOracle<'a> {
    lattice: &'a ZLattice,
    a2: Vec<Vec<BigInt>>,
}

/// The constructive side of the section computation for one vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSection {
    pub two_phi_hl: FractionalIdeal,
    pub index_ideal: FractionalIdeal,
}

impl<'a> SectionOracle<'a> {
    pub fn new(lattice: &'a ZLattice) -> Result<Self> {
        let a2 = lattice.two_gram_int()?;
        Ok(SectionOracle { lattice, a2 })
    }

    pub fn eval(&self, coords: &[BigInt]) -> Result<OracleSection> {
        let k = self.lattice.rank();
        if coords.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: coords.len(),
            });
        }
        // w_j = 2φ(h, b_j); their gcd generates 2φ(h, L)
        let w: Vec<BigInt> = (0..k)
            .map(|j| (0..k).map(|i| &coords[i] * &self.a2[i][j]).sum())
            .collect();
        let mut pairing_gen = BigInt::zero();
        for v in &w {
            pairing_gen = pairing_gen.gcd(v);
            if pairing_gen.is_one() {
                break;
            }
        }
        let norm2: BigInt = w.iter().zip(coords).map(|(a, b)| a * b).sum();
        if norm2.is_zero() || pairing_gen.is_zero() {
            return Err(Error::IsotropicVector);
        }
        let kernel = integer_kernel_of_functional(&w);
        debug_assert_eq!(kernel.len(), k - 1);
        // doubled Gram of L∩W in the kernel basis: K·A2·Kᵀ
        let mut ka = vec![vec![BigInt::zero(); k]; k - 1];
        for i in 0..(k - 1) {
            for (l2, coef) in kernel[i].iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                for j in 0..k {
                    let add = coef * &self.a2[l2][j];
                    ka[i][j] += add;
                }
            }
        }
        let mut b2 = vec![vec![BigInt::zero(); k - 1]; k - 1];
        for i in 0..(k - 1) {
            for j in 0..(k - 1) {
                b2[i][j] = (0..k).map(|l2| &ka[i][l2] * &kernel[j][l2]).sum();
            }
        }
        let mut state = ScaledBasis::identity(k - 1);
        state.saturate(&b2);
        // [M/L∩W] = den^{k−1}/|det U| for M = (1/den)·U·(L∩W)
        let det_u = int_det(&state.u).abs();
        let mut den_pow = BigInt::one();
        for _ in 0..(k - 1) {
            den_pow *= &state.den;
        }
        let index_ideal = FractionalIdeal::new(&BigRational::new(den_pow, det_u))?;
        let two_phi_hl = FractionalIdeal::new(&BigRational::from_integer(pairing_gen))?;
        Ok(OracleSection {
            two_phi_hl,
            index_ideal,
        })
    }
}

// ---------------------------------------------------------------------------
// Short-vector enumeration
// ---------------------------------------------------------------------------

struct Level {
    /// term contributed by this level over the common denominator: coeff·s²
    coeff: BigInt,
    /// s = modulus·x + Σ row[j]·x_j over the later coordinates
    modulus: BigInt,
    row: Vec<BigInt>,
}

struct Enumerator<'a, F: FnMut(&[BigInt])> {
    levels: Vec<Level>,
    acc: Vec<BigInt>,
    xs: Vec<BigInt>,
    visitor: &'a mut F,
    count: u64,
}

impl<F: FnMut(&[BigInt])> Enumerator<'_, F> {
    fn descend(&mut self, level: usize, rem: BigInt) {
        if rem.is_negative() {
            return;
        }
        if level == 0 {
            self.solve_innermost(rem);
            return;
        }
        let i = level;
        let (xlo, xhi) = {
            let lv = &self.levels[i];
            let bound = rem.div_floor(&lv.coeff);
            let smax = bound.sqrt();
            let lo = (-&smax - &self.acc[i]).div_ceil(&lv.modulus);
            let hi = (&smax - &self.acc[i]).div_floor(&lv.modulus);
            (lo, hi)
        };
        let mut x = xlo;
        while x <= xhi {
            let term = {
                let lv = &self.levels[i];
                let s: BigInt = &lv.modulus * &x + &self.acc[i];
                &lv.coeff * (&s * &s)
            };
            debug_assert!(term <= rem);
            self.xs[i] = x.clone();
            for ii in 0..i {
                let add = &self.levels[ii].row[i - ii - 1] * &x;
                self.acc[ii] += add;
            }
            self.descend(i - 1, &rem - &term);
            for ii in 0..i {
                let sub = &self.levels[ii].row[i - ii - 1] * &x;
                self.acc[ii] -= sub;
            }
            x += 1;
        }
    }

    fn solve_innermost(&mut self, rem: BigInt) {
        let (coeff, modulus) = {
            let lv = &self.levels[0];
            (lv.coeff.clone(), lv.modulus.clone())
        };
        let (quot, r) = rem.div_rem(&coeff);
        if !r.is_zero() {
            return;
        }
        let s = quot.sqrt();
        if &s * &s != quot {
            return;
        }
        let roots: Vec<BigInt> = if s.is_zero() {
            vec![BigInt::zero()]
        } else {
            vec![s.clone(), -s]
        };
        for s0 in roots {
            let num = s0 - &self.acc[0];
            let (x, r) = num.div_rem(&modulus);
            if !r.is_zero() {
                continue;
            }
            self.xs[0] = x;
            (self.visitor)(&self.xs);
            self.count += 1;
        }
    }
}

/// Streams the coordinates (w.r.t. the lattice basis) of every lattice
/// vector of norm exactly q through the visitor, returning the count.
/// Requires a positive-definite restricted form and q > 0. The visit order
/// is deterministic; use [`enumerate_vectors`] for a sorted list.
pub fn for_each_vector<F: FnMut(&[BigInt])>(
    l: &ZLattice,
    q: &BigRational,
    visitor: &mut F,
) -> Result<u64> {
    if !q.is_positive() {
        return Err(Error::ContractViolation(
            "enumeration needs a positive target norm".into(),
        ));
    }
    let k = l.rank();
    let g = l.gram();
    // exact LDL decomposition: φ[x] = Σ d_i (x_i + Σ_{j>i} μ_ij x_j)²
    let mut a = g.clone();
    let mut d: Vec<BigRational> = Vec::with_capacity(k);
    let mut mu = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        let di = a[(i, i)].clone();
        if !di.is_positive() {
            return Err(Error::IndefiniteForm);
        }
        for j in (i + 1)..k {
            mu[i][j] = &a[(i, j)] / &di;
        }
        for r in (i + 1)..k {
            for c in r..k {
                let delta = &mu[i][r] * &a[(i, c)];
                let v = &a[(r, c)] - delta;
                a[(r, c)] = v.clone();
                a[(c, r)] = v;
            }
        }
        d.push(di);
    }
    // scale every level to integers over one common denominator
    let mut m_list: Vec<BigInt> = Vec::with_capacity(k);
    let mut common = BigInt::one();
    for i in 0..k {
        let mut m = BigInt::one();
        for j in (i + 1)..k {
            m = m.lcm(mu[i][j].denom());
        }
        common = common.lcm(&(d[i].denom() * (&m * &m)));
        m_list.push(m);
    }
    let mut levels: Vec<Level> = Vec::with_capacity(k);
    for i in 0..k {
        let m = m_list[i].clone();
        let scale = &common / (d[i].denom() * (&m * &m));
        let coeff = d[i].numer() * scale;
        let row: Vec<BigInt> = ((i + 1)..k)
            .map(|j| {
                let r = &mu[i][j] * BigRational::from_integer(m.clone());
                debug_assert!(r.denom().is_one());
                r.numer().clone()
            })
            .collect();
        levels.push(Level {
            coeff,
            modulus: m,
            row,
        });
    }
    let target = q * BigRational::from_integer(common.clone());
    if !target.denom().is_one() {
        return Ok(0); // the scaled norm is never integral: no solutions
    }
    let mut state = Enumerator {
        levels,
        acc: vec![BigInt::zero(); k],
        xs: vec![BigInt::zero(); k],
        visitor,
        count: 0,
    };
    state.descend(k - 1, target.numer().clone());
    Ok(state.count)
}

/// All lattice vectors of norm q as coordinate vectors in the lattice
/// basis, sorted lexicographically.
pub fn enumerate_vectors(l: &ZLattice, q: &BigRational) -> Result<Vec<Vec<BigInt>>> {
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for_each_vector(l, q, &mut |coords| out.push(coords.to_vec()))?;
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Formula vs. oracle
// ---------------------------------------------------------------------------

/// Both sides of the section-index computation for one vector h: the ideal
/// from the discriminant-formula route and the one from the constructive
/// lattice chain, plus the inputs for auditability.
#[derive(Debug, Clone)]
pub struct SectionVerification {
    pub q: BigRational,
    pub two_phi_hl: FractionalIdeal,
    pub formula: FractionalIdeal,
    pub oracle: FractionalIdeal,
    pub matches: bool,
    pub oracle_maximal: bool,
    pub report: SectionReport,
}

/// Computes [M/L∩W] twice — by the formula b(q)·(2φ(h,L))⁻¹ on invariants,
/// and constructively by building L, L∩W, and a maximal M ⊇ L∩W — and
/// returns both with a match flag.
pub fn verify_section_formula(
    space: &QuadraticSpace,
    h: &[BigRational],
) -> Result<SectionVerification> {
    let l = maximal_lattice(space)?;
    verify_section_formula_in(space, &l, h)
}

/// Same as [`verify_section_formula`] with a precomputed maximal lattice,
/// so sweeps do not rebuild L for every h.
pub fn verify_section_formula_in(
    space: &QuadraticSpace,
    l: &ZLattice,
    h: &[BigRational],
) -> Result<SectionVerification> {
    let q = space.norm(h);
    if q.is_zero() {
        return Err(Error::IsotropicVector);
    }
    let lw = intersect_hyperplane(l, h)?;
    let m = maximalize(&lw)?;
    let oracle = index_ideal(&lw, &m)?;
    let two_phi = pairing_ideal(h, l)?.mul(&FractionalIdeal::from_integer(2));
    let report = section_ideal(&space.invariants(), &q, &two_phi)?;
    let formula = report.index_ideal.clone();
    let matches = formula == oracle;
    let oracle_maximal = oracle.is_unit();
    Ok(SectionVerification {
        q,
        two_phi_hl: two_phi,
        formula,
        oracle,
        matches,
        oracle_maximal,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use crate::ideals::discriminant_ideal;
    use crate::linalg::QMat;

    fn ideal(n: i64) -> FractionalIdeal {
        FractionalIdeal::from_integer(n)
    }

    fn rational_vec(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn dual_examples() {
        for n in [2usize, 4, 6] {
            let l = ZLattice::standard(QuadraticSpace::unit_form(n));
            let dual = l.dual().unwrap();
            // (1/2)ℤⁿ, so [L̃/L] = 2ⁿ
            assert_eq!(index_ideal(&l, &dual).unwrap(), ideal(1 << n));
            assert_eq!(dual.dual().unwrap(), l);
        }
        // unimodular with respect to 2φ: the hyperbolic plane
        let h = QuadraticSpace::new(
            QMat::from_rows(vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]])
                .unwrap(),
        )
        .unwrap();
        let l = ZLattice::standard(h);
        assert_eq!(l.dual().unwrap(), l);
    }

    #[test]
    fn smith_normal_form_examples() {
        let id: Vec<Vec<BigInt>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        assert_eq!(
            smith_normal_form(&id).unwrap().divisors(),
            &[rat_int(1), rat_int(1), rat_int(1)]
        );
        let diag = vec![
            vec![crate::arith::int(2), BigInt::zero()],
            vec![BigInt::zero(), crate::arith::int(3)],
        ];
        assert_eq!(
            smith_normal_form(&diag).unwrap().divisors(),
            &[rat_int(1), rat_int(6)]
        );
        let m = vec![
            vec![crate::arith::int(2), crate::arith::int(1)],
            vec![BigInt::zero(), crate::arith::int(2)],
        ];
        assert_eq!(
            smith_normal_form(&m).unwrap().divisors(),
            &[rat_int(1), rat_int(4)]
        );
        let singular = vec![
            vec![crate::arith::int(1), crate::arith::int(2)],
            vec![crate::arith::int(2), crate::arith::int(4)],
        ];
        assert!(smith_normal_form(&singular).is_err());
    }

    #[test]
    fn maximal_lattice_of_unit_forms() {
        // six squares: index 4 enlargement, discriminant ideal 4ℤ
        let s6 = QuadraticSpace::unit_form(6);
        let std6 = ZLattice::standard(s6.clone());
        let l6 = maximal_lattice(&s6).unwrap();
        assert_eq!(index_ideal(&std6, &l6).unwrap(), ideal(4));
        assert_eq!(index_ideal(&l6, &l6.dual().unwrap()).unwrap(), ideal(4));
        assert_eq!(
            index_ideal(&l6, &l6.dual().unwrap()).unwrap(),
            discriminant_ideal(&s6.invariants())
        );

        // eight squares: index 16, unimodular result
        let s8 = QuadraticSpace::unit_form(8);
        let std8 = ZLattice::standard(s8.clone());
        let l8 = maximal_lattice(&s8).unwrap();
        assert_eq!(index_ideal(&std8, &l8).unwrap(), ideal(16));
        assert_eq!(
            index_ideal(&l8, &l8.dual().unwrap()).unwrap(),
            FractionalIdeal::unit()
        );

        // p-maximal enlargement away from the discriminant does nothing
        let untouched = p_maximal_enlarge(&std6, &crate::arith::int(5)).unwrap();
        assert_eq!(untouched, std6);

        // the hyperbolic plane: the standard lattice is already maximal
        let h = QuadraticSpace::new(
            QMat::from_rows(vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]])
                .unwrap(),
        )
        .unwrap();
        let lh = maximal_lattice(&h).unwrap();
        assert_eq!(lh, ZLattice::standard(h));
        assert_eq!(
            index_ideal(&lh, &lh.dual().unwrap()).unwrap(),
            FractionalIdeal::unit()
        );

        // indefinite diagonal space: the certificate still closes
        let ind = QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(-6), rat_int(10)]).unwrap();
        let li = maximal_lattice(&ind).unwrap();
        assert_eq!(
            index_ideal(&li, &li.dual().unwrap()).unwrap(),
            discriminant_ideal(&ind.invariants())
        );
    }

    #[test]
    fn maximal_lattices_admit_no_further_enlargement() {
        for n in [6usize, 8] {
            let space = QuadraticSpace::unit_form(n);
            let l = maximal_lattice(&space).unwrap();
            assert!(l.is_integral());
            for p in [2i64, 3, 5] {
                let p = crate::arith::int(p);
                assert_eq!(p_maximal_enlarge(&l, &p).unwrap(), l, "p = {p}");
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let s2 = ZLattice::standard(QuadraticSpace::unit_form(2));
        let vectors = enumerate_vectors(&s2, &rat_int(1)).unwrap();
        assert_eq!(vectors.len(), 4);
        assert!(vectors.is_sorted());

        // the maximal lattice of the sum of eight squares has 240 vectors
        // of norm 1 (they double to the minimal vectors of an even
        // unimodular lattice)
        let l8 = maximal_lattice(&QuadraticSpace::unit_form(8)).unwrap();
        let n1 = enumerate_vectors(&l8, &rat_int(1)).unwrap();
        assert_eq!(n1.len(), 240);
        for coords in n1.iter().take(10) {
            let v = l8.vector(coords);
            assert_eq!(l8.ambient().norm(&v), rat_int(1));
        }

        // no solutions for a norm the scaled form cannot take
        assert_eq!(enumerate_vectors(&s2, &rat(1, 3)).unwrap().len(), 0);
        assert!(enumerate_vectors(&s2, &rat_int(-1)).is_err());
        let indefinite = ZLattice::standard(
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(-1)]).unwrap(),
        );
        assert!(matches!(
            enumerate_vectors(&indefinite, &rat_int(1)),
            Err(Error::IndefiniteForm)
        ));
    }

    #[test]
    fn enumeration_matches_theta_series() {
        // r_n(q) for the standard lattice agrees with the coefficient of
        // x^q in (Σ_k x^{k²})ⁿ, computed by direct convolution
        let bound = 10usize;
        let mut theta1 = vec![0u64; bound + 1];
        theta1[0] = 1;
        let mut k = 1usize;
        while k * k <= bound {
            theta1[k * k] = 2;
            k += 1;
        }
        for n in [2usize, 3, 4] {
            let mut theta = vec![0u64; bound + 1];
            theta[0] = 1;
            for _ in 0..n {
                let mut next = vec![0u64; bound + 1];
                for (i, a) in theta.iter().enumerate() {
                    if *a == 0 {
                        continue;
                    }
                    for (j, b) in theta1.iter().enumerate() {
                        if i + j <= bound {
                            next[i + j] += a * b;
                        }
                    }
                }
                theta = next;
            }
            // the loop above convolves one extra time starting from δ_0;
            // fix by dividing out nothing: we built θ₁ⁿ directly
            let l = ZLattice::standard(QuadraticSpace::unit_form(n));
            for q in 1..=bound {
                let count = for_each_vector(&l, &rat_int(q as i64), &mut |_| {}).unwrap();
                assert_eq!(count, theta[q], "n = {n}, q = {q}");
            }
        }
    }

    #[test]
    fn hyperplane_section_examples() {
        let s3 = QuadraticSpace::unit_form(3);
        let l3 = ZLattice::standard(s3);
        let w = intersect_hyperplane(&l3, &rational_vec(&[0, 0, 1])).unwrap();
        assert_eq!(w.rank(), 2);
        assert_eq!(*w.gram(), QMat::identity(2));

        // norm-5 vector in the maximal lattice of six squares: the section
        // is maximal ([M/L∩W] = ℤ)
        let s6 = QuadraticSpace::unit_form(6);
        let l6 = maximal_lattice(&s6).unwrap();
        let h = rational_vec(&[2, 1, 0, 0, 0, 0]);
        let lw = intersect_hyperplane(&l6, &h).unwrap();
        let m = maximalize(&lw).unwrap();
        assert_eq!(index_ideal(&lw, &m).unwrap(), FractionalIdeal::unit());
    }

    #[test]
    fn pairing_ideal_examples() {
        let s8 = QuadraticSpace::unit_form(8);
        let l8 = maximal_lattice(&s8).unwrap();
        for q in [1i64, 2, 3, 5] {
            // every norm-q vector pairs to φ(h,L) = ½ℤ
            let coords = enumerate_vectors(&l8, &rat_int(q)).unwrap();
            let h = l8.vector(&coords[0]);
            assert_eq!(
                pairing_ideal(&h, &l8).unwrap(),
                FractionalIdeal::new(&rat(1, 2)).unwrap(),
                "q = {q}"
            );
            // linearity under scaling h
            let h2: Vec<BigRational> = h.iter().map(|x| x * rat_int(2)).collect();
            assert_eq!(
                pairing_ideal(&h2, &l8).unwrap(),
                FractionalIdeal::unit()
            );
        }
    }

    #[test]
    fn index_chain_identities() {
        // [L̃/L] = [M/L]²·[M̃/M] and [L̃/M̃] = [M/L] for integral L ⊆ M
        let s6 = QuadraticSpace::unit_form(6);
        let small = ZLattice::standard(s6.clone());
        let big = maximal_lattice(&s6).unwrap();
        let idx = index_ideal(&small, &big).unwrap();
        let dual_small = small.dual().unwrap();
        let dual_big = big.dual().unwrap();
        let disc_small = index_ideal(&small, &dual_small).unwrap();
        let disc_big = index_ideal(&big, &dual_big).unwrap();
        assert_eq!(disc_small, idx.pow(2).mul(&disc_big));
        assert_eq!(index_ideal(&dual_big, &dual_small).unwrap(), idx);
        // Smith chain for the same pair
        let divisors = elementary_divisors(&small, &big).unwrap();
        assert_eq!(divisors.product(), *idx.generator());
        for w in divisors.divisors().windows(2) {
            assert!((&w[1] / &w[0]).denom().is_one());
        }
    }

    #[test]
    fn section_oracle_agrees_with_lattice_route() {
        let s6 = QuadraticSpace::unit_form(6);
        let l = maximal_lattice(&s6).unwrap();
        let oracle = SectionOracle::new(&l).unwrap();
        for q in [2i64, 3, 5, 7] {
            for coords in enumerate_vectors(&l, &rat_int(q)).unwrap().iter().take(12) {
                let fast = oracle.eval(coords).unwrap();
                let h = l.vector(coords);
                let lw = intersect_hyperplane(&l, &h).unwrap();
                let m = maximalize(&lw).unwrap();
                assert_eq!(fast.index_ideal, index_ideal(&lw, &m).unwrap(), "q = {q}");
                assert_eq!(
                    fast.two_phi_hl,
                    pairing_ideal(&h, &l).unwrap().mul(&ideal(2)),
                    "q = {q}"
                );
            }
        }
    }

    #[test]
    fn section_formula_spot_checks() {
        let s8 = QuadraticSpace::unit_form(8);
        let l8 = maximal_lattice(&s8).unwrap();
        for q in [1i64, 2, 5, 7] {
            let coords = enumerate_vectors(&l8, &rat_int(q)).unwrap();
            let h = l8.vector(&coords[0]);
            let v = verify_section_formula_in(&s8, &l8, &h).unwrap();
            assert!(v.matches, "q = {q}");
            assert!(v.oracle.is_unit());
            assert!(v.oracle_maximal);
        }
        // a fractional h outside L still verifies
        let s4 = QuadraticSpace::unit_form(4);
        let h: Vec<BigRational> = vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)];
        let v = verify_section_formula(&s4, &h).unwrap();
        assert!(v.matches);
    }
}
