//! Exact rational and p-adic primitives: valuations, square classes, the
//! three-valued symbol ξ_p, Hilbert symbols, and fractional-ideal algebra
//! over ℤ.
//!
//! Fractional ideals of ℚ are represented by their unique positive rational
//! generator, so ideal arithmetic is plain rational arithmetic on generators
//! and all comparisons are decidable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::{Error, Result};

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `num/den`, omitting the denominator when it is 1.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

// ---------------------------------------------------------------------------
// Integer factorization (trial division + Miller-Rabin + Pollard rho).
// Inputs are desk scale; this is a utility, not a performance claim.
// ---------------------------------------------------------------------------

fn miller_rabin_witness(n: &BigInt, a: &BigInt) -> bool {
    // true = a witnesses that n is composite
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut r = 0u32;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    let mut x = a.modpow(&d, n);
    if x == one || x == nm1 {
        return false;
    }
    for _ in 1..r {
        x = (&x * &x) % n;
        if x == nm1 {
            return false;
        }
    }
    true
}

/// Primality test; deterministic for everything a desk-scale input produces.
pub fn is_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    for small in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = int(small);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // These bases are a deterministic certificate below 3.3·10^24.
    ![2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .any(|a| miller_rabin_witness(n, &int(*a)))
}

fn pollard_rho(n: &BigInt) -> BigInt {
    // n odd composite, not a prime power of a tiny prime
    let one = BigInt::one();
    let mut c = one.clone();
    loop {
        let mut x = int(2);
        let mut y = int(2);
        let mut d = one.clone();
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x >= y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && d != *n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(&n);
    let q = &n / &d;
    factor_into(d, out);
    factor_into(q, out);
}

/// Prime factorization of a nonzero integer, ignoring sign.
/// Returns ascending `(prime, exponent)` pairs; `factor(±1)` is empty.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero(), "factor(0)");
    let mut m = n.abs();
    let mut primes: Vec<BigInt> = Vec::new();
    for small in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let p = int(small);
        while (&m % &p).is_zero() {
            m /= &p;
            primes.push(p.clone());
        }
    }
    let mut d = int(53);
    while &d * &d <= m && d < int(100_000) {
        while (&m % &d).is_zero() {
            m = &m / &d;
            primes.push(d.clone());
        }
        d += 2;
    }
    if !m.is_one() {
        factor_into(m, &mut primes);
    }
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Valuations and square classes
// ---------------------------------------------------------------------------

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut m = n.abs();
    let mut v = 0;
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// The p-adic valuation of a nonzero rational: `x = p^m·u` with `u` a p-adic
/// unit.
pub fn valuation(x: &BigRational, p: &BigInt) -> Result<i64> {
    debug_assert!(*p >= int(2), "valuation at a non-prime");
    if x.is_zero() {
        return Err(Error::ZeroArgument("valuation argument"));
    }
    Ok(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// The p-free unit part of `x`: `x / p^{ord_p x}`.
pub fn unit_part(x: &BigRational, p: &BigInt) -> Result<BigRational> {
    let v = valuation(x, p)?;
    let pr = BigRational::from_integer(p.clone());
    let mut u = x.clone();
    if v > 0 {
        u /= pr.pow(v as i32);
    } else if v < 0 {
        u *= pr.pow((-v) as i32);
    }
    Ok(u)
}

/// Reduces a rational with denominator coprime to `m` modulo `m`,
/// returning a representative in `[0, m)`.
pub fn unit_mod(x: &BigRational, m: &BigInt) -> BigInt {
    let num = x.numer().mod_floor(m);
    let den = x.denom().mod_floor(m);
    let inv = mod_inverse(&den, m).expect("denominator not coprime to modulus");
    (num * inv).mod_floor(m)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Legendre symbol of a p-adic unit `u` modulo an odd prime `p` (±1).
pub fn legendre(u: &BigInt, p: &BigInt) -> i32 {
    let e = (p - BigInt::one()) >> 1;
    let r = u.mod_floor(p).modpow(&e, p);
    if r.is_one() {
        1
    } else if r.is_zero() {
        0
    } else {
        -1
    }
}

/// Whether `x` is a square in ℚ_p.
pub fn is_local_square(x: &BigRational, p: &BigInt) -> Result<bool> {
    let v = valuation(x, p)?;
    if v % 2 != 0 {
        return Ok(false);
    }
    let u = unit_part(x, p)?;
    if *p == int(2) {
        Ok(unit_mod(&u, &int(8)) == BigInt::one())
    } else {
        Ok(legendre(&unit_mod(&u, p), p) == 1)
    }
}

/// Whether `x` is a square in ℝ (i.e. positive).
pub fn is_real_square(x: &BigRational) -> bool {
    x.is_positive()
}

/// The signed squarefree integer in the square class of a nonzero rational.
pub fn squarefree_part(x: &BigRational) -> BigInt {
    assert!(!x.is_zero(), "squarefree_part(0)");
    let mut d = BigInt::one();
    for (p, e) in factor(x.numer()) {
        if e % 2 == 1 {
            d *= p;
        }
    }
    for (p, e) in factor(x.denom()) {
        if e % 2 == 1 {
            d *= p;
        }
    }
    if x.is_negative() {
        -d
    } else {
        d
    }
}

/// The three-valued square-class symbol ξ_p(b): `Square` when b ∈ ℚ_p^×²,
/// `Unramified` when ℚ_p(√b)/ℚ_p is the unramified quadratic extension,
/// `Ramified` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareClassSymbol {
    Square,
    Unramified,
    Ramified,
}

impl SquareClassSymbol {
    pub fn value(self) -> i32 {
        match self {
            SquareClassSymbol::Square => 1,
            SquareClassSymbol::Unramified => -1,
            SquareClassSymbol::Ramified => 0,
        }
    }

    pub fn is_square(self) -> bool {
        self == SquareClassSymbol::Square
    }
}

impl fmt::Display for SquareClassSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// ξ_p(b) for a nonzero rational b and a prime p.
///
/// For odd p with `b = p^e·u`: a square iff e is even and u is a square mod
/// p; unramified iff e is even and u is a nonsquare; ramified otherwise.
/// At p = 2 the unit classes mod 8 decide: 1 square, 5 unramified, 3 and 7
/// ramified; odd valuation is always ramified.
pub fn xi(b: &BigRational, p: &BigInt) -> Result<SquareClassSymbol> {
    debug_assert!(is_prime(p), "ξ at a non-prime");
    let v = valuation(b, p)?;
    if v % 2 != 0 {
        return Ok(SquareClassSymbol::Ramified);
    }
    let u = unit_part(b, p)?;
    if *p == int(2) {
        let r = unit_mod(&u, &int(8)).to_i64().unwrap();
        Ok(match r {
            1 => SquareClassSymbol::Square,
            5 => SquareClassSymbol::Unramified,
            _ => SquareClassSymbol::Ramified,
        })
    } else if legendre(&unit_mod(&u, p), p) == 1 {
        Ok(SquareClassSymbol::Square)
    } else {
        Ok(SquareClassSymbol::Unramified)
    }
}

// ---------------------------------------------------------------------------
// Places and Hilbert symbols
// ---------------------------------------------------------------------------

/// A place of ℚ: a finite prime or the real place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Finite(BigInt),
    Real,
}

impl Place {
    pub fn finite(p: i64) -> Self {
        Place::Finite(int(p))
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Place::Real)
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Place {
    // finite primes ascending, the real place last
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Place::Finite(p), Place::Finite(q)) => p.cmp(q),
            (Place::Finite(_), Place::Real) => std::cmp::Ordering::Less,
            (Place::Real, Place::Finite(_)) => std::cmp::Ordering::Greater,
            (Place::Real, Place::Real) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Real => write!(f, "inf"),
        }
    }
}

fn eps_mod2(u_mod8: i64) -> i64 {
    // (u-1)/2 mod 2 for odd u
    if u_mod8 % 4 == 3 {
        1
    } else {
        0
    }
}

fn omega_mod2(u_mod8: i64) -> i64 {
    // (u²-1)/8 mod 2 for odd u
    if u_mod8 == 3 || u_mod8 == 5 {
        1
    } else {
        0
    }
}

/// The Hilbert symbol (a,b)_v ∈ {±1} for nonzero rationals.
pub fn hilbert(a: &BigRational, b: &BigRational, place: &Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument("Hilbert symbol argument"));
    }
    match place {
        Place::Real => Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        }),
        Place::Finite(p) => {
            debug_assert!(is_prime(p), "Hilbert symbol at a non-prime");
            let alpha = valuation(a, p)?;
            let beta = valuation(b, p)?;
            let u = unit_part(a, p)?;
            let v = unit_part(b, p)?;
            if *p == int(2) {
                let u8 = unit_mod(&u, &int(8)).to_i64().unwrap();
                let v8 = unit_mod(&v, &int(8)).to_i64().unwrap();
                let e = eps_mod2(u8) * eps_mod2(v8) + alpha * omega_mod2(v8) + beta * omega_mod2(u8);
                Ok(if e % 2 == 0 { 1 } else { -1 })
            } else {
                let pm1_half: BigInt = (p - BigInt::one()) >> 1;
                let pm1_half_parity = pm1_half.mod_floor(&int(2));
                let mut sign = 1i32;
                if (alpha * beta) % 2 != 0 && pm1_half_parity.is_one() {
                    sign = -sign;
                }
                if beta % 2 != 0 {
                    sign *= legendre(&unit_mod(&u, p), p);
                }
                if alpha % 2 != 0 {
                    sign *= legendre(&unit_mod(&v, p), p);
                }
                Ok(sign)
            }
        }
    }
}

/// The places over which Hilbert reciprocity for (a,b) is checked:
/// the real place and the primes dividing 2ab.
pub fn reciprocity_places(a: &BigRational, b: &BigRational) -> Vec<Place> {
    let mut primes: Vec<BigInt> = vec![int(2)];
    for x in [a, b] {
        for part in [x.numer(), x.denom()] {
            for (p, _) in factor(part) {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
    }
    primes.sort();
    let mut places: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    places.push(Place::Real);
    places
}

// ---------------------------------------------------------------------------
// Fractional ideals of ℤ
// ---------------------------------------------------------------------------

/// A nonzero fractional ℤ-ideal, stored as its positive rational generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalIdeal {
    generator: BigRational,
}

impl FractionalIdeal {
    pub fn new(x: &BigRational) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroArgument("ideal generator"));
        }
        Ok(FractionalIdeal { generator: x.abs() })
    }

    /// The unit ideal ℤ.
    pub fn unit() -> Self {
        FractionalIdeal {
            generator: BigRational::one(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        assert!(n != 0);
        FractionalIdeal {
            generator: rat_int(n).abs(),
        }
    }

    pub fn generator(&self) -> &BigRational {
        &self.generator
    }

    pub fn is_unit(&self) -> bool {
        self.generator.is_one()
    }

    /// Whether the ideal is contained in ℤ.
    pub fn is_integral(&self) -> bool {
        self.generator.denom().is_one()
    }

    /// Whether `other ⊆ self` (the generator of self divides that of other).
    pub fn contains(&self, other: &FractionalIdeal) -> bool {
        let q = &other.generator / &self.generator;
        q.denom().is_one()
    }

    pub fn mul(&self, other: &FractionalIdeal) -> FractionalIdeal {
        FractionalIdeal {
            generator: &self.generator * &other.generator,
        }
    }

    pub fn div(&self, other: &FractionalIdeal) -> FractionalIdeal {
        FractionalIdeal {
            generator: &self.generator / &other.generator,
        }
    }

    pub fn inverse(&self) -> FractionalIdeal {
        FractionalIdeal {
            generator: self.generator.recip(),
        }
    }

    pub fn pow(&self, e: i32) -> FractionalIdeal {
        FractionalIdeal {
            generator: self.generator.pow(e),
        }
    }

    /// Ideal sum aℤ + bℤ (gcd of the generators).
    pub fn sum(&self, other: &FractionalIdeal) -> FractionalIdeal {
        let (a, b) = (&self.generator, &other.generator);
        let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
        let den = a.denom() * b.denom();
        FractionalIdeal {
            generator: BigRational::new(num, den),
        }
    }

    /// Ideal intersection aℤ ∩ bℤ (lcm of the generators).
    pub fn intersect(&self, other: &FractionalIdeal) -> FractionalIdeal {
        let prod = self.mul(other);
        prod.div(&self.sum(other))
    }

    pub fn ord_p(&self, p: &BigInt) -> i64 {
        valuation(&self.generator, p).expect("nonzero generator")
    }

    /// The exact ideal square root: every prime valuation is halved.
    /// Errors when some valuation is odd.
    pub fn sqrt_exact(&self) -> Result<FractionalIdeal> {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (p, e) in factor(self.generator.numer()) {
            if e % 2 != 0 {
                return Err(Error::NonSquareIdeal(format_rational(&self.generator)));
            }
            num *= p.pow(e / 2);
        }
        for (p, e) in factor(self.generator.denom()) {
            if e % 2 != 0 {
                return Err(Error::NonSquareIdeal(format_rational(&self.generator)));
            }
            den *= p.pow(e / 2);
        }
        Ok(FractionalIdeal {
            generator: BigRational::new(num, den),
        })
    }

    /// Sorted list of primes at which the ideal has nonzero valuation.
    pub fn support(&self) -> Vec<(BigInt, i64)> {
        let mut map: Vec<(BigInt, i64)> = Vec::new();
        for (p, e) in factor(self.generator.numer()) {
            map.push((p, e as i64));
        }
        for (p, e) in factor(self.generator.denom()) {
            match map.iter_mut().find(|(q, _)| *q == p) {
                Some((_, v)) => *v -= e as i64,
                None => map.push((p, -(e as i64))),
            }
        }
        map.retain(|(_, v)| *v != 0);
        map.sort();
        map
    }
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.generator))
    }
}
