//! JSON and string formats for the CLI boundary. Rationals cross as
//! `num/den` strings (plain `num` when the denominator is 1), never as
//! floats; ideals as their positive generator in the same format; ramified
//! sets as arrays with primes ascending and `"inf"` last.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;
use std::str::FromStr;

use crate::arith::{format_rational, FractionalIdeal, Place};
use crate::lattice::ZLattice;
use crate::linalg::QMat;
use crate::qspace::{Invariants, QuadraticSpace};
use crate::{Error, Result};

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let den =
        BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_string(x: &BigRational) -> String {
    format_rational(x)
}

/// Parses a comma-separated vector of rationals, e.g. `1,-2,3/4`.
pub fn parse_vector(s: &str) -> Result<Vec<BigRational>> {
    let v: Vec<BigRational> = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty vector".into()));
    }
    Ok(v)
}

fn rational_of_value(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                Err(Error::Parse(format!("non-integer number {n}")))
            }
        }
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

fn matrix_to_json(m: &QMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    m.row(i)
                        .iter()
                        .map(|x| Value::String(format_rational(x)))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn matrix_from_json(v: &Value) -> Result<QMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let parsed: Result<Vec<Vec<BigRational>>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(rational_of_value)
                .collect()
        })
        .collect();
    QMat::from_rows(parsed?)
}

pub fn space_to_json(space: &QuadraticSpace) -> Value {
    json!({
        "n": space.n(),
        "gram": matrix_to_json(space.gram()),
    })
}

pub fn space_from_json(v: &Value) -> Result<QuadraticSpace> {
    let gram = v
        .get("gram")
        .ok_or_else(|| Error::Parse("missing \"gram\"".into()))?;
    let m = matrix_from_json(gram)?;
    if let Some(n) = v.get("n") {
        let n = n
            .as_u64()
            .ok_or_else(|| Error::Parse("\"n\" must be a positive integer".into()))?;
        if n as usize != m.nrows() {
            return Err(Error::Parse(format!(
                "\"n\" = {n} does not match a {}x{} Gram matrix",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    QuadraticSpace::new(m)
}

pub fn space_from_str(s: &str) -> Result<QuadraticSpace> {
    let v: Value =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    space_from_json(&v)
}

fn place_to_json(place: &Place) -> Value {
    match place {
        Place::Finite(p) => match p.to_i64() {
            Some(small) => json!(small),
            None => Value::String(p.to_string()),
        },
        Place::Real => Value::String("inf".into()),
    }
}

fn place_from_json(v: &Value) -> Result<Place> {
    match v {
        Value::String(s) if s == "inf" => Ok(Place::Real),
        Value::String(s) => BigInt::from_str(s)
            .map(Place::Finite)
            .map_err(|_| Error::Parse(format!("bad place {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(|p| Place::Finite(BigInt::from(p)))
            .ok_or_else(|| Error::Parse(format!("bad place {n}"))),
        other => Err(Error::Parse(format!("bad place {other}"))),
    }
}

fn bigint_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(small) => json!(small),
        None => Value::String(x.to_string()),
    }
}

pub fn invariants_to_json(inv: &Invariants) -> Value {
    json!({
        "n": inv.n(),
        "d": bigint_to_json(inv.d()),
        "ram": Value::Array(inv.ram().iter().map(place_to_json).collect()),
        "s_inf": inv.s_inf(),
    })
}

pub fn invariants_from_json(v: &Value) -> Result<Invariants> {
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"n\"".into()))? as usize;
    let d = match v.get("d") {
        Some(Value::Number(x)) => BigInt::from(
            x.as_i64()
                .ok_or_else(|| Error::Parse("\"d\" must be an integer".into()))?,
        ),
        Some(Value::String(s)) => {
            BigInt::from_str(s).map_err(|_| Error::Parse(format!("bad \"d\" {s:?}")))?
        }
        _ => return Err(Error::Parse("missing \"d\"".into())),
    };
    let ram: BTreeSet<Place> = v
        .get("ram")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"ram\"".into()))?
        .iter()
        .map(place_from_json)
        .collect::<Result<_>>()?;
    let s_inf = v
        .get("s_inf")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Parse("missing \"s_inf\"".into()))?;
    Invariants::new(n, d, ram, s_inf)
}

pub fn ideal_to_json(ideal: &FractionalIdeal) -> Value {
    Value::String(format_rational(ideal.generator()))
}

pub fn parse_ideal(s: &str) -> Result<FractionalIdeal> {
    FractionalIdeal::new(&parse_rational(s)?)
}

pub fn lattice_to_json(l: &ZLattice) -> Value {
    json!({
        "ambient": space_to_json(l.ambient()),
        "basis": matrix_to_json(l.basis()),
    })
}

pub fn lattice_from_json(v: &Value) -> Result<ZLattice> {
    let ambient = space_from_json(
        v.get("ambient")
            .ok_or_else(|| Error::Parse("missing \"ambient\"".into()))?,
    )?;
    let basis = matrix_from_json(
        v.get("basis")
            .ok_or_else(|| Error::Parse("missing \"basis\"".into()))?,
    )?;
    ZLattice::new(ambient, basis)
}

/// Stable key ordering for every emitted object, so identical invocations
/// produce byte-identical output.
pub fn sorted_object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
