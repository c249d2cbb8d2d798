//! The built-in fixture table: classical invariants, discriminant ideals,
//! b(q) values, and section indices for the six- and eight-square spaces,
//! each checked against the engines.

use std::process::ExitCode;

use serde_json::{json, Value};

use qflat::complement::complement_invariants;
use qflat::ideals::{b_of_q, discriminant_ideal, section_ideal};
use qflat::io;
use qflat::{Error, Result};

const EMBEDDED: &str = include_str!("../fixtures/classical.json");

struct Outcome {
    name: String,
    passed: bool,
    detail: String,
}

pub fn run(json_out: bool, list: bool, file: Option<String>) -> Result<ExitCode> {
    let text = match &file {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?,
        None => EMBEDDED.to_string(),
    };
    let fixtures: Vec<Value> =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad fixture file: {e}")))?;

    if list {
        if json_out {
            let names: Vec<Value> = fixtures
                .iter()
                .map(|f| {
                    json!({
                        "name": f["name"],
                        "description": f["description"],
                        "kind": f["kind"],
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&Value::Array(names)).unwrap());
        } else {
            for f in &fixtures {
                println!(
                    "{:<45} {}",
                    f["name"].as_str().unwrap_or("?"),
                    f["description"].as_str().unwrap_or("")
                );
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let mut outcomes: Vec<Outcome> = Vec::new();
    for f in &fixtures {
        let name = f["name"].as_str().unwrap_or("<unnamed>").to_string();
        let outcome = match evaluate(f) {
            Ok(None) => Outcome {
                name,
                passed: true,
                detail: String::new(),
            },
            Ok(Some(diff)) => Outcome {
                name,
                passed: false,
                detail: diff,
            },
            Err(e) => Outcome {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        };
        outcomes.push(outcome);
    }

    let passed = outcomes.iter().filter(|o| o.passed).count();
    let total = outcomes.len();
    if json_out {
        let rows: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "name": o.name,
                    "passed": o.passed,
                    "detail": o.detail,
                })
            })
            .collect();
        let out = json!({
            "passed": passed,
            "total": total,
            "fixtures": rows,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        for o in &outcomes {
            if !o.passed {
                println!("FAIL {}: {}", o.name, o.detail);
            }
        }
        println!("{passed}/{total} fixtures pass");
    }
    Ok(if passed == total {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Ok(None) on success, Ok(Some(diff)) on value mismatch.
fn evaluate(f: &Value) -> Result<Option<String>> {
    let kind = f["kind"]
        .as_str()
        .ok_or_else(|| Error::Parse("fixture without kind".into()))?;
    let space = io::space_from_json(
        f.get("space")
            .ok_or_else(|| Error::Parse("fixture without space".into()))?,
    )?;
    let inv = space.invariants();
    let q = || -> Result<_> {
        io::parse_rational(
            f.get("q")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("fixture without q".into()))?,
        )
    };
    match kind {
        "invariants" => {
            let expect = io::invariants_from_json(&f["expect"])?;
            if inv == expect {
                Ok(None)
            } else {
                Ok(Some(format!("got {inv}, expected {expect}")))
            }
        }
        "complement_invariants" => {
            let got = complement_invariants(&inv, &q()?)?.invariants;
            let expect = io::invariants_from_json(&f["expect"])?;
            if got == expect {
                Ok(None)
            } else {
                Ok(Some(format!("got {got}, expected {expect}")))
            }
        }
        "disc_ideal" => {
            let got = discriminant_ideal(&inv);
            let expect = io::parse_ideal(f["expect"].as_str().unwrap_or(""))?;
            if got == expect {
                Ok(None)
            } else {
                Ok(Some(format!("got {got}, expected {expect}")))
            }
        }
        "complement_disc_ideal" => {
            let w = complement_invariants(&inv, &q()?)?.invariants;
            let got = discriminant_ideal(&w);
            let expect = io::parse_ideal(f["expect"].as_str().unwrap_or(""))?;
            if got == expect {
                Ok(None)
            } else {
                Ok(Some(format!("got {got}, expected {expect}")))
            }
        }
        "bq" => {
            let got = b_of_q(&inv, &q()?)?;
            let expect = io::parse_ideal(f["expect"].as_str().unwrap_or(""))?;
            if got == expect {
                Ok(None)
            } else {
                Ok(Some(format!("got {got}, expected {expect}")))
            }
        }
        "section" => {
            let two_phi = io::parse_ideal(
                f.get("two_phi")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("section fixture without two_phi".into()))?,
            )?;
            let report = section_ideal(&inv, &q()?, &two_phi)?;
            let expect_index = io::parse_ideal(f["expect"]["index_ideal"].as_str().unwrap_or(""))?;
            let expect_maximal = f["expect"]["maximal"].as_bool().unwrap_or(false);
            if report.index_ideal == expect_index && report.maximal == expect_maximal {
                Ok(None)
            } else {
                Ok(Some(format!(
                    "got index {} (maximal {}), expected {} (maximal {})",
                    report.index_ideal, report.maximal, expect_index, expect_maximal
                )))
            }
        }
        other => Err(Error::Parse(format!("unknown fixture kind {other:?}"))),
    }
}
