//! Invariants of the orthogonal complement W = (ℚh)^⊥ computed two ways:
//! from the invariants of V and the square class of q = φ\[h\] (the case-table
//! engine), and by direct restriction of the form to the kernel of
//! x ↦ φ(x, h) (the oracle). The two must always agree on represented q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

use crate::arith::{hilbert, xi, Place};
use crate::linalg::{integer_kernel_of_functional, QMat};
use crate::qspace::{real_place_is_division, Invariants, QuadraticSpace};
use crate::{Error, Result};

/// The invariants of W plus a flag marking results for q that V does not
/// represent. The case tables are well-defined functions of the invariants
/// of V and the square class of q, so they are still evaluated for such q,
/// but no space (W, ψ) realizes a formal result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementInvariants {
    pub invariants: Invariants,
    pub formal: bool,
}

/// Invariants of the orthogonal complement of a vector of norm q, from the
/// invariants of the ambient space.
///
/// The dimension drops by one, the discriminant class becomes
/// (−1)^{n−1}·δ·q, the real index moves by one against the sign of q, and
/// the ramified set of Q(ψ) is assembled place by place: at a finite prime
/// the verdict depends on ξ of the governing discriminant class, on whether
/// Q(φ) is division there, and on a local norm condition decided by a
/// Hilbert symbol.
pub fn complement_invariants(inv: &Invariants, q: &BigRational) -> Result<ComplementInvariants> {
    if inv.n() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: inv.n(),
        });
    }
    if q.is_zero() {
        return Err(Error::ZeroArgument("norm q"));
    }
    let n = inv.n();
    let s_w = if q.is_positive() {
        inv.s_inf() - 1
    } else {
        inv.s_inf() + 1
    };
    if s_w.unsigned_abs() as usize > n - 1 {
        // q has the wrong sign for a definite space: there is no complement
        // even over ℝ, and no invariant tuple to evaluate formally.
        return Err(Error::NotRepresented(crate::arith::format_rational(q)));
    }

    let d = BigRational::from_integer(inv.d().clone());
    let delta_q = &d * q;
    let d_w = crate::arith::squarefree_part(
        &(if n % 2 == 0 { -delta_q.clone() } else { delta_q.clone() }),
    );

    let mut ram_w: BTreeSet<Place> = BTreeSet::new();
    for p in finite_candidates(inv, q) {
        let place = Place::Finite(p.clone());
        let div_b = inv.is_ramified_at(&place);
        let split = if n % 2 == 0 {
            if n == 2 {
                true
            } else {
                // K = ℚ(√δ); q is a local norm from K_p iff (δ, q)_p = 1
                let xi_delta = xi(&d, &p)?;
                let q_norm = hilbert(&d, q, &place)? == 1;
                (xi_delta.is_square() && !div_b)
                    || (!xi_delta.is_square() && !div_b && q_norm)
                    || (!xi_delta.is_square() && div_b && !q_norm)
            }
        } else {
            // K = ℚ(√(δq)); δ is a local norm from K_p iff (δq, δ)_p = 1
            let xi_dq = xi(&delta_q, &p)?;
            let delta_norm = hilbert(&delta_q, &d, &place)? == 1;
            if n == 3 {
                (xi_dq.is_square() && !div_b)
                    || (!xi_dq.is_square() && !div_b && delta_norm)
                    || (div_b && !delta_norm)
            } else {
                (xi_dq.is_square() && !div_b)
                    || (!xi_dq.is_square() && !div_b && delta_norm)
                    || (!xi_dq.is_square() && div_b && !delta_norm)
            }
        };
        if !split {
            ram_w.insert(place);
        }
    }
    if n > 2 && real_place_is_division(s_w) {
        ram_w.insert(Place::Real);
    }

    let formal = !inv.represents(q)?;
    let invariants = Invariants::new(n - 1, d_w, ram_w, s_w).map_err(|e| {
        Error::ContractViolation(format!("complement tables produced {e} for q = {q}"))
    })?;
    Ok(ComplementInvariants { invariants, formal })
}

/// The finite primes where Q(ψ) can ramify: 2, the primes of d and q, and
/// the primes already ramified in Q(φ). Everywhere else every symbol in the
/// case tables is trivially +1.
fn finite_candidates(inv: &Invariants, q: &BigRational) -> Vec<BigInt> {
    let mut set: BTreeSet<BigInt> = BTreeSet::new();
    set.insert(crate::arith::int(2));
    for (p, _) in crate::arith::factor(inv.d()) {
        set.insert(p);
    }
    for part in [q.numer(), q.denom()] {
        for (p, _) in crate::arith::factor(part) {
            set.insert(p);
        }
    }
    for place in inv.ram() {
        if let Place::Finite(p) = place {
            set.insert(p.clone());
        }
    }
    set.into_iter().collect()
}

/// The restriction of φ to the hyperplane (ℚh)^⊥: computes a canonical
/// kernel basis of x ↦ φ(x, h) and returns the restricted space of
/// dimension n−1. This is the direct oracle against the table engine.
pub fn complement_space(space: &QuadraticSpace, h: &[BigRational]) -> Result<QuadraticSpace> {
    let n = space.n();
    if h.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.len(),
        });
    }
    if space.norm(h).is_zero() {
        return Err(Error::IsotropicVector);
    }
    let w = space.gram().act_on_row(h); // φ(e_i, h) up to symmetry
    let functional = QMat::from_rows(vec![w])?;
    let (rows, _) = functional.scale_to_integer();
    let kernel = integer_kernel_of_functional(&rows[0]);
    let basis: Vec<Vec<BigRational>> = kernel
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let b = QMat::from_rows(basis)?;
    QuadraticSpace::new(b.mul(space.gram()).mul(&b.transpose()))
}
