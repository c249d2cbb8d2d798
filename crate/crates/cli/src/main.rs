//! Command-line front end: parses spaces and vectors, dispatches to the
//! engines, and emits audited JSON (or plain tables). Exit codes: 0 when
//! every check passed, 1 on a failed check or engine error, 2 on bad input.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use qflat::arith::{factor, int, is_prime, rat_int, squarefree_part, FractionalIdeal};
use qflat::complement::{complement_invariants, complement_space};
use qflat::ideals::{b_of_q, discriminant_data, discriminant_ideal, section_ideal};
use qflat::io;
use qflat::lattice::{
    enumerate_vectors, index_ideal, maximal_lattice, pairing_ideal, SectionOracle,
};
use qflat::qspace::QuadraticSpace;

mod fixtures;

#[derive(Parser)]
#[command(
    name = "qflat",
    version,
    about = "Exact arithmetic for rational quadratic spaces, orthogonal complements, and maximal lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Classifying invariants (n, d, ram, s_inf) with a per-prime core-dimension audit.
    Invariants {
        /// Path to a space JSON file, or inline JSON.
        #[arg(long)]
        space: String,
    },
    /// Invariants of the orthogonal complement of a norm-q vector.
    Complement {
        #[arg(long)]
        space: String,
        /// The norm q (table engine; result may be formal).
        #[arg(long)]
        q: Option<String>,
        /// An explicit vector h as comma-separated rationals (direct
        /// restriction, cross-checked against the table engine).
        #[arg(long)]
        h: Option<String>,
    },
    /// Discriminant ideal [L~/L] of a maximal lattice, from the invariants.
    DiscIdeal {
        #[arg(long)]
        space: String,
    },
    /// The ideal b(q) defined by 2q[L~/L] = b(q)^2 [M~/M].
    Bq {
        #[arg(long)]
        space: String,
        #[arg(long)]
        q: String,
    },
    /// The index ideal [M/L∩W] = b(q)(2φ(h,L))^-1 and the maximality verdicts.
    Section {
        #[arg(long)]
        space: String,
        /// The norm q; required with --two-phi, inferred from --h.
        #[arg(long)]
        q: Option<String>,
        /// The pairing ideal 2φ(h,L) as a rational generator.
        #[arg(long = "two-phi")]
        two_phi: Option<String>,
        /// An explicit vector h; q and 2φ(h,L) are computed from it.
        #[arg(long)]
        h: Option<String>,
    },
    /// A maximal lattice, its basis, and the discriminant-ideal certificate.
    Maximal {
        #[arg(long)]
        space: String,
    },
    /// All vectors of norm q in the maximal lattice (positive-definite spaces).
    Enumerate {
        #[arg(long)]
        space: String,
        #[arg(long)]
        q: String,
    },
    /// Formula vs. constructive oracle for [M/L∩W] over vectors of given norms.
    Verify {
        #[arg(long)]
        space: String,
        /// Verify a single norm q.
        #[arg(long)]
        q: Option<String>,
        /// Sweep all primes (default) or squarefree integers up to this
        /// bound (30 when given without a value).
        #[arg(long, num_args = 0..=1, default_missing_value = "30")]
        sweep: Option<i64>,
        /// With --sweep: use squarefree integers instead of primes.
        #[arg(long)]
        squarefree: bool,
        /// Check every enumerated vector (default: a deterministic sample).
        #[arg(long = "all-h")]
        all_h: bool,
    },
    /// Run the built-in fixture table of classical values.
    Fixtures {
        /// List fixture names and what each checks, without running them.
        #[arg(long)]
        list: bool,
        /// Override the embedded fixture file (mainly for testing the runner).
        #[arg(long)]
        file: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                qflat::Error::Parse(_) | qflat::Error::MalformedGram(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> qflat::Result<ExitCode> {
    match cli.command {
        Command::Invariants { space } => cmd_invariants(cli.format, &space),
        Command::Complement { space, q, h } => cmd_complement(cli.format, &space, q, h),
        Command::DiscIdeal { space } => cmd_disc_ideal(cli.format, &space),
        Command::Bq { space, q } => cmd_bq(cli.format, &space, &q),
        Command::Section {
            space,
            q,
            two_phi,
            h,
        } => cmd_section(cli.format, &space, q, two_phi, h),
        Command::Maximal { space } => cmd_maximal(cli.format, &space),
        Command::Enumerate { space, q } => cmd_enumerate(cli.format, &space, &q),
        Command::Verify {
            space,
            q,
            sweep,
            squarefree,
            all_h,
        } => cmd_verify(cli.format, &space, q, sweep, squarefree, all_h),
        Command::Fixtures { list, file } => fixtures::run(cli.format == Format::Json, list, file),
    }
}

fn load_space(arg: &str) -> qflat::Result<QuadraticSpace> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| qflat::Error::Parse(format!("cannot read {arg}: {e}")))?
    };
    io::space_from_str(&text)
}

fn emit(format: Format, value: &Value, table: impl FnOnce() -> String) {
    match format {
        // serde_json objects iterate in sorted key order, so identical
        // invocations produce byte-identical output
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Format::Table => println!("{}", table()),
    }
}

fn cmd_invariants(format: Format, space_arg: &str) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let inv = space.invariants();
    // audit: core dimensions at every prime where they can be nontrivial
    let mut det2 = space.det();
    for _ in 0..space.n() {
        det2 *= rat_int(2);
    }
    let mut primes: Vec<BigInt> = factor(&(det2.numer() * det2.denom()))
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    if !primes.contains(&int(2)) {
        primes.insert(0, int(2));
    }
    primes.sort();
    primes.dedup();
    let audit: Vec<Value> = primes
        .iter()
        .map(|p| {
            json!({
                "p": p.to_i64().map(Value::from).unwrap_or_else(|| Value::String(p.to_string())),
                "t": space.core_dimension_local(p).value(),
            })
        })
        .collect();
    let out = json!({
        "invariants": io::invariants_to_json(&inv),
        "core_dimensions": audit,
    });
    emit(format, &out, || {
        let mut s = format!("invariants: {inv}\n");
        for p in &primes {
            s.push_str(&format!(
                "  t_{} = {}\n",
                p,
                space.core_dimension_local(p).value()
            ));
        }
        s.trim_end().to_string()
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_complement(
    format: Format,
    space_arg: &str,
    q: Option<String>,
    h: Option<String>,
) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let inv = space.invariants();
    match (q, h) {
        (Some(q), None) => {
            let q = io::parse_rational(&q)?;
            let w = complement_invariants(&inv, &q)?;
            let out = json!({
                "ambient": io::invariants_to_json(&inv),
                "q": io::rational_string(&q),
                "complement": io::invariants_to_json(&w.invariants),
                "formal": w.formal,
            });
            emit(format, &out, || {
                format!(
                    "complement at q = {}: {}{}",
                    io::rational_string(&q),
                    w.invariants,
                    if w.formal {
                        "  (formal: q is not represented)"
                    } else {
                        ""
                    }
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        (None, Some(h)) => {
            let h = io::parse_vector(&h)?;
            let q = space.norm(&h);
            let w_space = complement_space(&space, &h)?;
            let direct = w_space.invariants();
            let via_tables = complement_invariants(&inv, &q)?;
            let matches = direct == via_tables.invariants;
            let out = json!({
                "ambient": io::invariants_to_json(&inv),
                "q": io::rational_string(&q),
                "complement_space": io::space_to_json(&w_space),
                "direct_invariants": io::invariants_to_json(&direct),
                "table_invariants": io::invariants_to_json(&via_tables.invariants),
                "match": matches,
            });
            emit(format, &out, || {
                format!(
                    "q = {}\n  direct: {}\n  tables: {}\n  match: {}",
                    io::rational_string(&q),
                    direct,
                    via_tables.invariants,
                    matches
                )
            });
            Ok(if matches {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        _ => Err(qflat::Error::Parse(
            "complement needs exactly one of --q or --h".into(),
        )),
    }
}

fn cmd_disc_ideal(format: Format, space_arg: &str) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let inv = space.invariants();
    let ideal = discriminant_ideal(&inv);
    let out = json!({
        "invariants": io::invariants_to_json(&inv),
        "disc_ideal": io::ideal_to_json(&ideal),
    });
    emit(format, &out, || format!("[L~/L] = {ideal}·Z"));
    Ok(ExitCode::SUCCESS)
}

fn cmd_bq(format: Format, space_arg: &str, q: &str) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let inv = space.invariants();
    let q = io::parse_rational(q)?;
    let data = discriminant_data(&inv, &q)?;
    let out = json!({
        "invariants": io::invariants_to_json(&inv),
        "q": io::rational_string(&q),
        "disc_v": io::ideal_to_json(&data.disc_v),
        "disc_w": io::ideal_to_json(&data.disc_w),
        "b_q": io::ideal_to_json(&data.b_q),
    });
    emit(format, &out, || {
        format!(
            "[L~/L] = {}·Z   [M~/M] = {}·Z   b(q) = {}·Z",
            data.disc_v, data.disc_w, data.b_q
        )
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_section(
    format: Format,
    space_arg: &str,
    q: Option<String>,
    two_phi: Option<String>,
    h: Option<String>,
) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let inv = space.invariants();
    let (q, two_phi) = match (q, two_phi, h) {
        (Some(q), Some(tp), None) => (io::parse_rational(&q)?, io::parse_ideal(&tp)?),
        (maybe_q, None, Some(h)) => {
            let h = io::parse_vector(&h)?;
            let q = space.norm(&h);
            if let Some(given) = maybe_q {
                let given = io::parse_rational(&given)?;
                if given != q {
                    return Err(qflat::Error::Parse(format!(
                        "--q {} does not match φ[h] = {}",
                        io::rational_string(&given),
                        io::rational_string(&q)
                    )));
                }
            }
            let l = maximal_lattice(&space)?;
            let tp = pairing_ideal(&h, &l)?.mul(&FractionalIdeal::from_integer(2));
            (q, tp)
        }
        _ => {
            return Err(qflat::Error::Parse(
                "section needs (--q and --two-phi) or --h".into(),
            ))
        }
    };
    let report = section_ideal(&inv, &q, &two_phi)?;
    let out = json!({
        "q": io::rational_string(&q),
        "two_phi_hl": io::ideal_to_json(&report.two_phi_hl),
        "b_q": io::ideal_to_json(&report.data.b_q),
        "disc_v": io::ideal_to_json(&report.data.disc_v),
        "disc_w": io::ideal_to_json(&report.data.disc_w),
        "index_ideal": io::ideal_to_json(&report.index_ideal),
        "maximal": report.maximal,
        "maximal_by_discriminants": report.maximal_by_discriminants,
    });
    emit(format, &out, || {
        format!(
            "[M/L∩W] = {}·Z   (b(q) = {}·Z, 2φ(h,L) = {}·Z)   maximal: {}",
            report.index_ideal, report.data.b_q, report.two_phi_hl, report.maximal
        )
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_maximal(format: Format, space_arg: &str) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let l = maximal_lattice(&space)?;
    let dual = l.dual()?;
    let disc_constructive = index_ideal(&l, &dual)?;
    let disc_formula = discriminant_ideal(&space.invariants());
    let certified = disc_constructive == disc_formula;
    let out = json!({
        "lattice": io::lattice_to_json(&l),
        "disc_constructive": io::ideal_to_json(&disc_constructive),
        "disc_formula": io::ideal_to_json(&disc_formula),
        "certified": certified,
    });
    emit(format, &out, || {
        format!(
            "maximal lattice with [L~/L] = {disc_constructive}·Z (formula {disc_formula}·Z, certified: {certified})"
        )
    });
    Ok(if certified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_enumerate(format: Format, space_arg: &str, q: &str) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let q = io::parse_rational(q)?;
    let l = maximal_lattice(&space)?;
    let coords = enumerate_vectors(&l, &q)?;
    let vectors: Vec<Value> = coords
        .iter()
        .map(|y| {
            Value::Array(
                l.vector(y)
                    .iter()
                    .map(|x| Value::String(io::rational_string(x)))
                    .collect(),
            )
        })
        .collect();
    let out = json!({
        "q": io::rational_string(&q),
        "lattice": io::lattice_to_json(&l),
        "count": coords.len(),
        "vectors": vectors,
    });
    emit(format, &out, || {
        let mut s = format!(
            "{} vectors of norm {}\n",
            coords.len(),
            io::rational_string(&q)
        );
        for y in coords.iter().take(50) {
            let v: Vec<String> = l.vector(y).iter().map(io::rational_string).collect();
            s.push_str(&format!("  ({})\n", v.join(", ")));
        }
        if coords.len() > 50 {
            s.push_str("  ...\n");
        }
        s.trim_end().to_string()
    });
    Ok(ExitCode::SUCCESS)
}

#[derive(Default, Clone)]
struct VerifyBucket {
    count: u64,
    mismatches: u64,
    formula: Option<FractionalIdeal>,
    oracle: Option<FractionalIdeal>,
}

fn thread_cap() -> usize {
    std::env::var("QFLAT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn cmd_verify(
    format: Format,
    space_arg: &str,
    q: Option<String>,
    sweep: Option<i64>,
    squarefree: bool,
    all_h: bool,
) -> qflat::Result<ExitCode> {
    let space = load_space(space_arg)?;
    let inv = space.invariants();
    let l = maximal_lattice(&space)?;
    let qs: Vec<BigRational> = match (q, sweep) {
        (Some(q), None) => vec![io::parse_rational(&q)?],
        (None, Some(bound)) => (1..=bound)
            .filter(|&n| {
                if squarefree {
                    squarefree_part(&rat_int(n)) == int(n)
                } else {
                    is_prime(&int(n))
                }
            })
            .map(rat_int)
            .collect(),
        _ => {
            return Err(qflat::Error::Parse(
                "verify needs exactly one of --q or --sweep".into(),
            ))
        }
    };

    let mut rows: Vec<Value> = Vec::new();
    let mut all_match = true;
    for q in &qs {
        if !inv.represents(q)? {
            // nothing to verify: the shell must be empty, which is itself
            // a constructive check of the local obstruction
            let empty = enumerate_vectors(&l, q)?.is_empty();
            if !empty {
                all_match = false;
            }
            rows.push(json!({
                "q": io::rational_string(q),
                "represented": false,
                "vectors": 0,
                "enumerated": if empty { 0 } else { 1 },
                "match": empty,
            }));
            continue;
        }
        let coords = enumerate_vectors(&l, q)?;
        let selected: Vec<&Vec<BigInt>> = if all_h {
            coords.iter().collect()
        } else {
            // deterministic sample: an even spread of at most 25 vectors
            let step = (coords.len() / 25).max(1);
            coords.iter().step_by(step).collect()
        };
        let b = b_of_q(&inv, q)?;
        let oracle = SectionOracle::new(&l)?;
        // fan out over worker threads, capped by QFLAT_THREADS; the per
        // pairing-class aggregation is order-independent, so the merged
        // output is deterministic
        let workers = thread_cap().min(selected.len().max(1));
        let chunk = selected.len().div_ceil(workers).max(1);
        let buckets: Vec<BTreeMap<BigRational, VerifyBucket>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for part in selected.chunks(chunk) {
                let oracle = &oracle;
                let b = &b;
                handles.push(scope.spawn(move || {
                    let mut local: BTreeMap<BigRational, VerifyBucket> = BTreeMap::new();
                    for y in part {
                        let section = oracle.eval(y).expect("anisotropic lattice vector");
                        let formula = b.div(&section.two_phi_hl);
                        let entry = local
                            .entry(section.two_phi_hl.generator().clone())
                            .or_default();
                        entry.count += 1;
                        if formula != section.index_ideal {
                            entry.mismatches += 1;
                        }
                        entry.formula = Some(formula);
                        entry.oracle = Some(section.index_ideal);
                    }
                    local
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut merged: BTreeMap<BigRational, VerifyBucket> = BTreeMap::new();
        for map in buckets {
            for (k, v) in map {
                let entry = merged.entry(k).or_default();
                entry.count += v.count;
                entry.mismatches += v.mismatches;
                entry.formula = v.formula.or(entry.formula.take());
                entry.oracle = v.oracle.or(entry.oracle.take());
            }
        }
        for (two_phi_gen, bucket) in merged {
            if bucket.mismatches > 0 {
                all_match = false;
            }
            rows.push(json!({
                "q": io::rational_string(q),
                "two_phi_hl": io::rational_string(&two_phi_gen),
                "formula": bucket.formula.map(|i| io::ideal_to_json(&i)).unwrap_or(Value::Null),
                "oracle": bucket.oracle.map(|i| io::ideal_to_json(&i)).unwrap_or(Value::Null),
                "vectors": bucket.count,
                "enumerated": coords.len(),
                "match": bucket.mismatches == 0,
            }));
        }
    }
    let out = json!({
        "invariants": io::invariants_to_json(&inv),
        "rows": rows,
        "all_match": all_match,
    });
    emit(format, &out, || {
        let mut s = String::new();
        s.push_str("q      2phi(h,L)  formula  oracle  vectors  match\n");
        for row in out["rows"].as_array().unwrap() {
            s.push_str(&format!(
                "{:<6} {:<10} {:<8} {:<7} {:<8} {}\n",
                row["q"].as_str().unwrap_or("?"),
                row["two_phi_hl"].as_str().unwrap_or("?"),
                row["formula"].as_str().unwrap_or("?"),
                row["oracle"].as_str().unwrap_or("?"),
                row["vectors"].as_u64().unwrap_or(0),
                row["match"]
            ));
        }
        s.push_str(&format!("all match: {all_match}"));
        s
    });
    Ok(if all_match {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
