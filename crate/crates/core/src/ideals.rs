//! Discriminant ideals of maximal lattices, the ideal b(q), the local
//! exponents λ_p(q) in the anisotropic case, and the section-index formula
//! [M/L∩W] = b(q)·(2φ(h,L))⁻¹ together with the maximality criterion.
//!
//! b(q) is computed globally from 2q·[L̃/L] = b(q)²·[M̃/M] by an exact ideal
//! square root; the per-prime λ tables are kept only as a cross-check for
//! anisotropic localizations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{format_rational, int, FractionalIdeal, Place, SquareClassSymbol};
use crate::complement::complement_invariants;
use crate::qspace::{CoreDimension, Invariants};
use crate::{Error, Result};

/// The ideal generated by the discriminant of ℚ(√d)/ℚ for squarefree d:
/// |d| when d ≡ 1 (mod 4), 4|d| otherwise, and ℤ when d = 1.
pub fn discriminant_field_ideal(d: &BigInt) -> FractionalIdeal {
    if *d == BigInt::from(1) {
        return FractionalIdeal::unit();
    }
    let abs = BigRational::from_integer(d.abs());
    let gen = if d.mod_floor(&int(4)).to_i64() == Some(1) {
        abs
    } else {
        abs * BigRational::from_integer(int(4))
    };
    FractionalIdeal::new(&gen).expect("nonzero discriminant")
}

/// The discriminant ideal [L̃/L] of a maximal lattice, from the invariants.
///
/// Even dimension: D_K·e₁² with K = ℚ(√d) and e₁ the product of the finite
/// ramified primes of Q(φ) not dividing D_K. Odd dimension: with δℤ = a·b²
/// (a squarefree) and e the product of the finite ramified primes, the ideal
/// is 2a⁻¹e² ∩ 2a.
pub fn discriminant_ideal(inv: &Invariants) -> FractionalIdeal {
    let finite_ram: Vec<&BigInt> = inv
        .ram()
        .iter()
        .filter_map(|place| match place {
            Place::Finite(p) => Some(p),
            Place::Real => None,
        })
        .collect();
    if inv.n() % 2 == 0 {
        let dk = discriminant_field_ideal(inv.d());
        let mut e1 = FractionalIdeal::unit();
        for p in finite_ram {
            if dk.ord_p(p) == 0 {
                e1 = e1.mul(&FractionalIdeal::new(&BigRational::from_integer(p.clone())).unwrap());
            }
        }
        dk.mul(&e1.pow(2))
    } else {
        let a = FractionalIdeal::new(&BigRational::from_integer(inv.d().abs())).unwrap();
        let mut e = FractionalIdeal::unit();
        for p in finite_ram {
            e = e.mul(&FractionalIdeal::new(&BigRational::from_integer(p.clone())).unwrap());
        }
        let two = FractionalIdeal::from_integer(2);
        let left = two.mul(&a.inverse()).mul(&e.pow(2));
        let right = two.mul(&a);
        left.intersect(&right)
    }
}

/// The three ideals tied together by 2q·[L̃/L] = b(q)²·[M̃/M].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantData {
    /// [L̃/L], the discriminant ideal of the ambient space.
    pub disc_v: FractionalIdeal,
    /// [M̃/M], the discriminant ideal of the complement.
    pub disc_w: FractionalIdeal,
    /// b(q), the exact square root of 2q·disc_v/disc_w.
    pub b_q: FractionalIdeal,
}

/// Computes [L̃/L], [M̃/M], and b(q) for a represented q.
pub fn discriminant_data(inv: &Invariants, q: &BigRational) -> Result<DiscriminantData> {
    let w = complement_invariants(inv, q)?;
    if w.formal {
        return Err(Error::NotRepresented(format_rational(q)));
    }
    let disc_v = discriminant_ideal(inv);
    let disc_w = discriminant_ideal(&w.invariants);
    let two_q = FractionalIdeal::new(&(q * BigRational::from_integer(int(2))))?;
    let ratio = two_q.mul(&disc_v).div(&disc_w);
    let b_q = ratio.sqrt_exact().map_err(|_| {
        Error::ContractViolation(format!(
            "q = {} is represented but 2q[L~/L][M~/M]^-1 = {} is not a square ideal",
            format_rational(q),
            ratio
        ))
    })?;
    Ok(DiscriminantData { disc_v, disc_w, b_q })
}

/// The ideal b(q) defined by 2q·[L̃/L] = b(q)²·[M̃/M].
/// Errors when q is not represented by the space.
pub fn b_of_q(inv: &Invariants, q: &BigRational) -> Result<FractionalIdeal> {
    Ok(discriminant_data(inv, q)?.b_q)
}

/// Self-test of the scaling law c·b(q) = b(c²q); true on every valid input
/// when the implementation is correct.
pub fn b_scaling_check(inv: &Invariants, q: &BigRational, c: &BigRational) -> Result<bool> {
    if c.is_zero() {
        return Err(Error::ZeroArgument("scaling factor"));
    }
    let scaled_q = q * c * c;
    let lhs = b_of_q(inv, &scaled_q)?;
    let rhs = b_of_q(inv, q)?.mul(&FractionalIdeal::new(c)?);
    Ok(lhs == rhs)
}

/// Local data at a prime p for the anisotropic λ and discriminant tables.
///
/// `ord_delta` is the valuation (0 or 1) of the squarefree discriminant
/// class, `nu` = ord_p q, `kappa` = ord_p 2, `d` the valuation of the
/// relative discriminant of the governing quadratic extension K (with d = 1
/// when K/ℚ_p is unramified), and `xi` the symbol of the governing class:
/// ξ(δ) for t = 2, ξ(δq) for t = 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCoreData {
    pub p: BigInt,
    pub ord_delta: i64,
    pub nu: i64,
    pub kappa: i64,
    pub d: i64,
    pub xi: SquareClassSymbol,
}

impl LocalCoreData {
    fn validate(&self) -> Result<()> {
        let expect_kappa = if self.p == int(2) { 1 } else { 0 };
        if self.kappa != expect_kappa {
            return Err(Error::InvalidLocalData(format!(
                "kappa = {} but ord_{}(2) = {expect_kappa}",
                self.kappa, self.p
            )));
        }
        if self.ord_delta != 0 && self.ord_delta != 1 {
            return Err(Error::InvalidLocalData(
                "normalized δ has valuation 0 or 1".into(),
            ));
        }
        if self.nu < 0 {
            return Err(Error::InvalidLocalData("q must be integral (ν ≥ 0)".into()));
        }
        if self.d < 1 {
            return Err(Error::InvalidLocalData("discriminant exponent d ≥ 1".into()));
        }
        Ok(())
    }

    /// Assembles the local data for a space with the given invariants at p,
    /// returning the core dimension alongside. q must be a p-integer.
    pub fn from_invariants(
        inv: &Invariants,
        q: &BigRational,
        p: &BigInt,
    ) -> Result<(CoreDimension, LocalCoreData)> {
        let t = inv.core_dimension_at(p);
        let nu = crate::arith::valuation(q, p)?;
        let ord_delta = crate::arith::valuation(&BigRational::from_integer(inv.d().clone()), p)?;
        let kappa = if *p == int(2) { 1 } else { 0 };
        // the governing quadratic class: δ for even core, δq for odd core
        let class = if t.value() % 2 == 0 {
            BigRational::from_integer(inv.d().clone())
        } else {
            BigRational::from_integer(inv.d().clone()) * q
        };
        let xi = crate::arith::xi(&class, p)?;
        let d = match xi {
            SquareClassSymbol::Unramified | SquareClassSymbol::Square => 1,
            SquareClassSymbol::Ramified => {
                let dk = discriminant_field_ideal(&crate::arith::squarefree_part(&class));
                dk.ord_p(p)
            }
        };
        let data = LocalCoreData {
            p: p.clone(),
            ord_delta,
            nu,
            kappa,
            d,
            xi,
        };
        Ok((t, data))
    }
}

/// The exponent λ_p(q) for an anisotropic local space of core dimension t,
/// evaluated from the case table. λ is the largest m such that
/// L[q, 2⁻¹p^m] is nonempty, and ord_p b(q) = λ_p(q).
pub fn lambda_p_anisotropic(t: CoreDimension, data: &LocalCoreData) -> Result<i64> {
    data.validate()?;
    let nu = data.nu;
    let od = data.ord_delta;
    let kappa = data.kappa;
    let lambda = match t.value() {
        1 => {
            // q represented by a line of discriminant δ: δq must be square
            if (nu + od) % 2 != 0 {
                return Err(Error::InvalidLocalData(
                    "t = 1 requires ord(δq) even".into(),
                ));
            }
            kappa + (nu + od) / 2
        }
        2 => {
            if data.xi.is_square() {
                return Err(Error::InvalidLocalData("t = 2 requires ξ(δ) ≠ 1".into()));
            }
            (nu + data.d).div_euclid(2)
        }
        3 => {
            if data.xi.is_square() {
                return Err(Error::InvalidLocalData("t = 3 requires ξ(δq) ≠ 1".into()));
            }
            let ord_dq = nu + od;
            if ord_dq % 2 != 0 {
                if data.xi != SquareClassSymbol::Ramified {
                    return Err(Error::InvalidLocalData(
                        "odd ord(δq) is always ramified".into(),
                    ));
                }
                (nu - od + 1) / 2
            } else if data.xi == SquareClassSymbol::Ramified {
                if (nu - od - data.d) % 2 != 0 {
                    return Err(Error::InvalidLocalData(
                        "t = 3, ξ = 0 requires ord(δ⁻¹q) ≡ d (mod 2)".into(),
                    ));
                }
                kappa + 1 + (nu - od - data.d) / 2
            } else {
                kappa + ord_dq / 2
            }
        }
        4 => (nu + 1).div_euclid(2),
        other => {
            return Err(Error::InvalidLocalData(format!(
                "core dimension {other} outside 1..=4"
            )))
        }
    };
    if lambda < 0 {
        return Err(Error::InvalidLocalData(format!(
            "table produced negative exponent {lambda}"
        )));
    }
    Ok(lambda)
}

/// The local discriminant ideals ([L̃/L]_p, [M̃/M]_p) of an anisotropic
/// space of core dimension t and its complement, by verbatim table lookup.
/// Used only as a test cross-check against the constructive valuations.
pub fn local_disc_tables_check(
    t: CoreDimension,
    data: &LocalCoreData,
) -> Result<(FractionalIdeal, FractionalIdeal)> {
    data.validate()?;
    let nu_even = data.nu % 2 == 0;
    let od = data.ord_delta;
    let kappa = data.kappa;
    let xi = data.xi;
    let (dl, dm) = match t.value() {
        2 => {
            if xi.is_square() {
                return Err(Error::InvalidLocalData("t = 2 requires ξ(δ) ≠ 1".into()));
            }
            if od == 1 && xi != SquareClassSymbol::Ramified {
                return Err(Error::InvalidLocalData(
                    "ord(δ) odd is always ramified".into(),
                ));
            }
            let dl = if od == 1 {
                2 * kappa + 1
            } else {
                match xi {
                    SquareClassSymbol::Ramified => data.d,
                    SquareClassSymbol::Unramified => {
                        if nu_even {
                            0
                        } else {
                            2
                        }
                    }
                    SquareClassSymbol::Square => unreachable!(),
                }
            };
            let dm = match (od, nu_even) {
                (1, false) | (0, true) => kappa,
                _ => kappa + 1,
            };
            (dl, dm)
        }
        3 => {
            if xi.is_square() {
                return Err(Error::InvalidLocalData("t = 3 requires ξ(δq) ≠ 1".into()));
            }
            let ord_dq_even = (data.nu + od) % 2 == 0;
            if !ord_dq_even && xi != SquareClassSymbol::Ramified {
                return Err(Error::InvalidLocalData(
                    "odd ord(δq) is always ramified".into(),
                ));
            }
            let dl = if od == 1 { kappa + 1 } else { kappa + 2 };
            let dm = if !ord_dq_even {
                2 * kappa + 1
            } else {
                match xi {
                    SquareClassSymbol::Ramified => data.d,
                    SquareClassSymbol::Unramified => {
                        if od == 1 {
                            0
                        } else {
                            2
                        }
                    }
                    SquareClassSymbol::Square => unreachable!(),
                }
            };
            (dl, dm)
        }
        4 => (2, if nu_even { kappa + 2 } else { kappa + 1 }),
        other => {
            return Err(Error::InvalidLocalData(format!(
                "local discriminant tables cover 2 ≤ t ≤ 4, got {other}"
            )))
        }
    };
    let p_ideal = FractionalIdeal::new(&BigRational::from_integer(data.p.clone()))?;
    Ok((p_ideal.pow(dl as i32), p_ideal.pow(dm as i32)))
}

/// The result of the section-index formula: the ideal [M/L∩W], the input
/// pairing ideal 2φ(h,L), and the maximality verdict by both criteria
/// (index = ℤ, and q·(2φ(h,L))⁻² = [M̃/M]·(2[L̃/L])⁻¹).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionReport {
    pub index_ideal: FractionalIdeal,
    pub two_phi_hl: FractionalIdeal,
    pub maximal: bool,
    pub maximal_by_discriminants: bool,
    pub data: DiscriminantData,
}

/// Evaluates [M/L∩W] = b(q)·(2φ(h,L))⁻¹ and both maximality criteria.
/// The containment b(q) ⊆ 2φ(h,L) always holds for consistent inputs and is
/// validated here; violating it means the pairing ideal does not belong to
/// any vector of norm q.
pub fn section_ideal(
    inv: &Invariants,
    q: &BigRational,
    two_phi_hl: &FractionalIdeal,
) -> Result<SectionReport> {
    let data = discriminant_data(inv, q)?;
    if !two_phi_hl.contains(&data.b_q) {
        return Err(Error::ContractViolation(format!(
            "b(q) = {} is not contained in 2φ(h,L) = {}",
            data.b_q, two_phi_hl
        )));
    }
    let index_ideal = data.b_q.div(two_phi_hl);
    let maximal = index_ideal.is_unit();
    let lhs = FractionalIdeal::new(q)?.div(&two_phi_hl.pow(2));
    let rhs = data
        .disc_w
        .div(&data.disc_v.mul(&FractionalIdeal::from_integer(2)));
    let maximal_by_discriminants = lhs == rhs;
    Ok(SectionReport {
        index_ideal,
        two_phi_hl: two_phi_hl.clone(),
        maximal,
        maximal_by_discriminants,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use crate::qspace::QuadraticSpace;

    fn unit_inv(n: usize) -> Invariants {
        QuadraticSpace::unit_form(n).invariants()
    }

    fn ideal(n: i64) -> FractionalIdeal {
        FractionalIdeal::from_integer(n)
    }

    #[test]
    fn discriminant_ideal_fixtures() {
        assert_eq!(discriminant_ideal(&unit_inv(6)), ideal(4));
        assert_eq!(discriminant_ideal(&unit_inv(8)), FractionalIdeal::unit());
        // complements of the sum of eight squares: [M̃/M] = 2q
        for q in [1i64, 2, 3, 5, 7, 30] {
            let w = complement_invariants(&unit_inv(8), &rat_int(q)).unwrap();
            assert_eq!(discriminant_ideal(&w.invariants), ideal(2 * q), "q = {q}");
        }
        // complements of the sum of six squares: 8q or 2q by q mod 4
        for q in [5i64, 13, 17, 29] {
            let w = complement_invariants(&unit_inv(6), &rat_int(q)).unwrap();
            assert_eq!(discriminant_ideal(&w.invariants), ideal(8 * q), "q = {q}");
        }
        for q in [2i64, 3, 7, 11, 19] {
            let w = complement_invariants(&unit_inv(6), &rat_int(q)).unwrap();
            assert_eq!(discriminant_ideal(&w.invariants), ideal(2 * q), "q = {q}");
        }
    }

    #[test]
    fn b_of_q_fixtures() {
        let inv6 = unit_inv(6);
        let inv8 = unit_inv(8);
        for q in [5i64, 13, 17, 29, 37, 41] {
            assert_eq!(b_of_q(&inv6, &rat_int(q)).unwrap(), FractionalIdeal::unit());
        }
        for q in [2i64, 3, 7, 11, 19, 23, 31, 43, 47] {
            assert_eq!(b_of_q(&inv6, &rat_int(q)).unwrap(), ideal(2), "q = {q}");
        }
        for q in [1i64, 2, 3, 5, 6, 7, 10, 30] {
            assert_eq!(b_of_q(&inv8, &rat_int(q)).unwrap(), FractionalIdeal::unit());
        }
        assert!(matches!(
            b_of_q(&inv6, &rat_int(-5)),
            Err(Error::NotRepresented(_))
        ));
    }

    #[test]
    fn b_scaling_examples() {
        assert!(b_scaling_check(&unit_inv(6), &rat_int(5), &rat_int(3)).unwrap());
        assert!(b_scaling_check(&unit_inv(8), &rat_int(1), &rat_int(2)).unwrap());
        assert!(b_scaling_check(&unit_inv(6), &rat_int(7), &rat_int(1)).unwrap());
        assert!(b_scaling_check(&unit_inv(6), &rat_int(7), &rat(1, 2)).unwrap());
    }

    #[test]
    fn factorization_identity_against_complement_chain() {
        // disc_V = b(q)²·disc_W·(2q)⁻¹, restated from the defining relation
        let inv6 = unit_inv(6);
        for q in [2i64, 3, 5, 7, 13] {
            let data = discriminant_data(&inv6, &rat_int(q)).unwrap();
            let two_q = FractionalIdeal::new(&rat_int(2 * q)).unwrap();
            assert_eq!(data.disc_v, data.b_q.pow(2).mul(&data.disc_w).div(&two_q));
            assert!(data.b_q.is_integral());
        }
    }

    #[test]
    fn lambda_examples() {
        // t = 4, ν = 0
        let t4 = CoreDimension::new(4).unwrap();
        let data = LocalCoreData {
            p: int(2),
            ord_delta: 0,
            nu: 0,
            kappa: 1,
            d: 1,
            xi: SquareClassSymbol::Unramified,
        };
        assert_eq!(lambda_p_anisotropic(t4, &data).unwrap(), 0);
        // t = 2 at an odd ramified prime: d = 1, ν = 0
        let t2 = CoreDimension::new(2).unwrap();
        let data = LocalCoreData {
            p: int(3),
            ord_delta: 0,
            nu: 0,
            kappa: 0,
            d: 1,
            xi: SquareClassSymbol::Ramified,
        };
        assert_eq!(lambda_p_anisotropic(t2, &data).unwrap(), 0);
        // t = 1 at an odd prime, δ a unit, ν = 2
        let t1 = CoreDimension::new(1).unwrap();
        let data = LocalCoreData {
            p: int(5),
            ord_delta: 0,
            nu: 2,
            kappa: 0,
            d: 1,
            xi: SquareClassSymbol::Square,
        };
        assert_eq!(lambda_p_anisotropic(t1, &data).unwrap(), 1);
        // parity violations are rejected
        let bad = LocalCoreData {
            p: int(5),
            ord_delta: 1,
            nu: 2,
            kappa: 0,
            d: 1,
            xi: SquareClassSymbol::Ramified,
        };
        assert!(lambda_p_anisotropic(t1, &bad).is_err());
    }

    #[test]
    fn lambda_matches_b_valuation_at_anisotropic_primes() {
        // spaces whose localization at 2 is anisotropic (t = n)
        let four = QuadraticSpace::unit_form(4).invariants();
        for q in 1i64..=10 {
            let (t, data) = LocalCoreData::from_invariants(&four, &rat_int(q), &int(2)).unwrap();
            assert_eq!(t.value(), 4);
            let lambda = lambda_p_anisotropic(t, &data).unwrap();
            let b = b_of_q(&four, &rat_int(q)).unwrap();
            assert_eq!(b.ord_p(&int(2)), lambda, "q = {q}");
        }
        let three = QuadraticSpace::unit_form(3).invariants();
        for q in [1i64, 2, 3, 5, 6, 10, 11] {
            // skip values not represented by three squares
            if !three.represents(&rat_int(q)).unwrap() {
                continue;
            }
            let (t, data) = LocalCoreData::from_invariants(&three, &rat_int(q), &int(2)).unwrap();
            assert_eq!(t.value(), 3);
            let lambda = lambda_p_anisotropic(t, &data).unwrap();
            let b = b_of_q(&three, &rat_int(q)).unwrap();
            assert_eq!(b.ord_p(&int(2)), lambda, "q = {q}");
        }
    }

    #[test]
    fn lambda_matches_b_valuation_at_isotropic_primes_too() {
        // ord_p b(q) equals the table exponent whenever the local core
        // represents q, also at isotropic primes; whether it does is decided
        // by the core-dimension drop of φ ⊥ ⟨−q⟩. For a split core (t = 0),
        // ord_p b(q) = [ν/2].
        use crate::qspace::anisotropic_core;
        let spaces = [
            QuadraticSpace::unit_form(3),
            QuadraticSpace::unit_form(5),
            QuadraticSpace::unit_form(6),
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(1), rat_int(3)]).unwrap(),
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(2), rat_int(3), rat_int(6)])
                .unwrap(),
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(1), rat_int(5), rat_int(5)])
                .unwrap(),
        ];
        let mut core_cases = 0;
        let mut split_cases = 0;
        for space in &spaces {
            let inv = space.invariants();
            for q in 1i64..=18 {
                let q = rat_int(q);
                if !inv.represents(&q).unwrap() {
                    continue;
                }
                let b = b_of_q(&inv, &q).unwrap();
                for p in [2i64, 3, 5, 7] {
                    let p = int(p);
                    let t = inv.core_dimension_at(&p);
                    if (t.value() as usize) == inv.n() {
                        continue; // the anisotropic case is covered elsewhere
                    }
                    if t.value() == 0 {
                        let nu = crate::arith::valuation(&q, &p).unwrap();
                        assert_eq!(b.ord_p(&p), nu.div_euclid(2), "{space} q={q} p={p}");
                        split_cases += 1;
                        continue;
                    }
                    // q lies in the core exactly when the extended form has
                    // a smaller anisotropic kernel
                    let det = inv.det_class();
                    let eps = inv.hasse_at(&p);
                    let det_ext = &det * &(-q.clone());
                    let eps_ext = eps
                        * crate::arith::hilbert(&det, &(-q.clone()), &Place::Finite(p.clone()))
                            .unwrap();
                    let (t_ext, _, _) =
                        anisotropic_core(inv.n() + 1, det_ext, eps_ext, &p);
                    let in_core = t_ext + 1 == t.value() as usize;
                    if !in_core {
                        continue;
                    }
                    let (_, data) = LocalCoreData::from_invariants(&inv, &q, &p).unwrap();
                    let lambda = lambda_p_anisotropic(t, &data).unwrap();
                    assert_eq!(b.ord_p(&p), lambda, "{space} q={q} p={p} t={t}");
                    core_cases += 1;
                }
            }
        }
        assert!(core_cases >= 25, "only {core_cases} core-represented cases");
        assert!(split_cases >= 25, "only {split_cases} split cases");
    }

    #[test]
    fn local_disc_table_fixtures() {
        let t4 = CoreDimension::new(4).unwrap();
        let even = LocalCoreData {
            p: int(2),
            ord_delta: 0,
            nu: 0,
            kappa: 1,
            d: 1,
            xi: SquareClassSymbol::Unramified,
        };
        let (dl, dm) = local_disc_tables_check(t4, &even).unwrap();
        assert_eq!(dl, ideal(4));
        assert_eq!(dm, ideal(8)); // p^{κ+2} for even ν
        let odd = LocalCoreData {
            nu: 1,
            ..even.clone()
        };
        let (_, dm) = local_disc_tables_check(t4, &odd).unwrap();
        assert_eq!(dm, ideal(4)); // p^{κ+1} for odd ν

        // t = 3 with ord(δq) odd: [M̃/M] = p^{2κ+1}
        let t3 = CoreDimension::new(3).unwrap();
        let data = LocalCoreData {
            p: int(2),
            ord_delta: 0,
            nu: 1,
            kappa: 1,
            d: 3,
            xi: SquareClassSymbol::Ramified,
        };
        let (_, dm) = local_disc_tables_check(t3, &data).unwrap();
        assert_eq!(dm, ideal(8));

        assert!(local_disc_tables_check(CoreDimension::new(1).unwrap(), &even).is_err());
    }

    #[test]
    fn local_tables_match_global_formulas() {
        // at an anisotropic prime the (dl, dm) rows must reproduce the
        // valuations of the global discriminant ideals, and p^{2λ} must
        // equal 2q·[L̃/L]_p·[M̃/M]_p⁻¹
        let spaces = [
            QuadraticSpace::unit_form(3),
            QuadraticSpace::unit_form(4),
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(1)]).unwrap(),
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(3)]).unwrap(),
            QuadraticSpace::from_diagonal(&[rat_int(2), rat_int(3)]).unwrap(),
            QuadraticSpace::from_diagonal(&[rat_int(1), rat_int(1), rat_int(2)]).unwrap(),
        ];
        let mut exercised = 0;
        for space in &spaces {
            let inv = space.invariants();
            for q in 1i64..=12 {
                let q = rat_int(q);
                if !inv.represents(&q).unwrap() {
                    continue;
                }
                for p in [2i64, 3, 5, 7] {
                    let p = int(p);
                    let t = inv.core_dimension_at(&p);
                    if (t.value() as usize) != inv.n() || t.value() < 2 {
                        continue;
                    }
                    let (_, data) = LocalCoreData::from_invariants(&inv, &q, &p).unwrap();
                    let (dl, dm) = local_disc_tables_check(t, &data).unwrap();
                    let global = discriminant_data(&inv, &q).unwrap();
                    assert_eq!(dl.ord_p(&p), global.disc_v.ord_p(&p), "{space} q={q} p={p}");
                    assert_eq!(dm.ord_p(&p), global.disc_w.ord_p(&p), "{space} q={q} p={p}");
                    let lambda = lambda_p_anisotropic(t, &data).unwrap();
                    let two_q = FractionalIdeal::new(&(q.clone() * rat_int(2))).unwrap();
                    assert_eq!(
                        2 * lambda,
                        two_q.ord_p(&p) + dl.ord_p(&p) - dm.ord_p(&p),
                        "{space} q={q} p={p}"
                    );
                    exercised += 1;
                }
            }
        }
        assert!(exercised >= 20, "only {exercised} anisotropic cases");
    }

    #[test]
    fn section_report_fixtures() {
        let inv6 = unit_inv(6);
        // q ≡ 3 (mod 4): pairing ideal ℤ gives index 2ℤ, not maximal
        let r = section_ideal(&inv6, &rat_int(7), &FractionalIdeal::unit()).unwrap();
        assert_eq!(r.index_ideal, ideal(2));
        assert!(!r.maximal);
        assert!(!r.maximal_by_discriminants);
        // pairing ideal 2ℤ gives index ℤ, maximal
        let r = section_ideal(&inv6, &rat_int(7), &ideal(2)).unwrap();
        assert!(r.maximal && r.maximal_by_discriminants);
        assert!(r.index_ideal.is_unit());
        // sum of eight squares: always maximal at pairing ideal ℤ
        let r = section_ideal(&unit_inv(8), &rat_int(10), &FractionalIdeal::unit()).unwrap();
        assert!(r.maximal && r.maximal_by_discriminants);
        // 2φ(h,L) smaller than b(q) violates the containment
        assert!(matches!(
            section_ideal(&inv6, &rat_int(7), &ideal(4)),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn two_maximality_criteria_agree() {
        for (n, qs) in [(6usize, vec![2i64, 3, 5, 7, 13]), (8, vec![1, 2, 5, 7, 30])] {
            let inv = unit_inv(n);
            for q in qs {
                let b = b_of_q(&inv, &rat_int(q)).unwrap();
                for denom_power in 0..=2i32 {
                    let two_phi = b.mul(&ideal(2).pow(denom_power));
                    if let Ok(report) = section_ideal(&inv, &rat_int(q), &two_phi) {
                        assert_eq!(report.maximal, report.maximal_by_discriminants);
                    }
                }
            }
        }
    }
}
