//! Batch front end: slope tables, verification reports, and Hecke matrix
//! dumps for Drinfeld cuspforms over F_q\[t\].
//!
//! Results go to stdout (or `--out`); logs go to stderr. Exit codes:
//! 0 success, 2 configuration or hypothesis error, 3 budget exhaustion,
//! 4 theorem falsification (a FAIL verdict in a verification report — the
//! verified statements are proved, so FAIL indicates a build bug).

mod encode;
mod parse;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use drinfeld_core::algebra::poly::Poly;
use drinfeld_core::hecke::{chi_part_matrix, hecke_matrix, u_matrix, HeckeCache, HeckeError};
use drinfeld_core::level::{build_quotient, default_depth, LevelError, QuotientData};
use drinfeld_core::slopes::{
    check_constancy, check_eldiv_bound, check_window, check_window_chi, family_congruence,
    hida_check, perturb_trial, slope_decomposition, Report, SlopeError,
};
use drinfeld_core::FieldSpec;
use parse::{parse_level, parse_poly, parse_rational, parse_weights, ParsedLevel};

#[derive(Parser)]
#[command(name = "drinfeld")]
#[command(about = "Hecke slopes of Drinfeld cuspforms via harmonic cocycles", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field size q = p^e (p prime)
    #[arg(long, default_value_t = 3)]
    q: u64,
    /// Modulus for non-prime q: ascending coefficients over F_p, e.g. "1,0,1"
    #[arg(long)]
    field_modulus: Option<String>,
    /// Level: `gamma1:<wp>^r` | `gamma1:<n>,<wp>^r` | `gamma0p:<wp>^r` |
    /// `theta:<wp>^r:<gens>`
    #[arg(long, default_value = "gamma1:t")]
    level: String,
}

#[derive(Subcommand)]
enum Command {
    /// Slope tables d(k, a) per weight (and character, if requested)
    Slopes {
        #[command(flatten)]
        field: FieldArgs,
        /// Weights: `10`, `2..12`, or `4,7`
        #[arg(long, default_value = "")]
        k: String,
        /// Character exponent: χ(λ) = λ^c
        #[arg(long)]
        chi: Option<usize>,
        /// Output format: json | csv
        #[arg(long, default_value = "json")]
        format: String,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<String>,
        /// Worker threads over independent weights (never changes output)
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Verification reports: eldiv | window | constancy | hida | perturb | family
    Verify {
        /// Which checker to run
        which: String,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "")]
        k: String,
        /// Second weight of a constancy pair
        #[arg(long)]
        kprime: Option<usize>,
        /// First weight of a family pair
        #[arg(long)]
        k1: Option<usize>,
        /// Second weight of a family pair
        #[arg(long)]
        k2: Option<usize>,
        /// Slope a (rational, e.g. 1 or 3/2)
        #[arg(long)]
        a: Option<String>,
        /// Hecke polynomial(s) Q
        #[arg(long = "Q")]
        q_polys: Vec<String>,
        /// Congruence exponent n
        #[arg(long)]
        n: Option<u32>,
        /// Second congruence exponent n'
        #[arg(long)]
        nprime: Option<u32>,
        /// Level exponent r (hida)
        #[arg(long)]
        r: Option<usize>,
        /// Second level exponent r' (hida)
        #[arg(long)]
        rprime: Option<usize>,
        /// Character exponent
        #[arg(long)]
        chi: Option<usize>,
        /// Seed for randomized trials
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of randomized trials
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Matrix dimension for perturbation trials
        #[arg(long, default_value_t = 6)]
        dim: usize,
        /// Divisor-floor parameter d0 for perturbation trials
        #[arg(long, default_value_t = 1)]
        d0: u64,
        /// Working precision for series computations
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<String>,
        /// Accepted for interface stability; verification runs are serial
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Dump the quotient-graph data (coset index, Steinberg rank, stable
    /// edge representatives) as JSON for inspection
    DumpQuotient {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Dump the matrix of T_Q on V_k as bit-exact JSON
    DumpMatrix {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[arg(long = "Q", default_value = "t")]
        q_poly: String,
        /// Emit det(I − T_Q·X) (an array of polynomials, ascending in X)
        /// instead of the matrix
        #[arg(long, default_value_t = false)]
        charpoly: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

/// Process-level outcome mapped to the documented exit codes.
enum Outcome {
    Ok,
    Config(String),
    Budget(String),
    Falsified,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Outcome::Ok => ExitCode::SUCCESS,
        Outcome::Config(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Outcome::Budget(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(3)
        }
        Outcome::Falsified => {
            eprintln!("error: verification FAILED (theorem falsification: build bug)");
            ExitCode::from(4)
        }
    }
}

fn build_field(args: &FieldArgs) -> Result<FieldSpec, String> {
    match &args.field_modulus {
        None => {
            let p = u16::try_from(args.q).map_err(|_| "q too large".to_string())?;
            FieldSpec::prime(p).map_err(|e| format!("{}", e))
        }
        Some(modulus) => {
            let coeffs: Result<Vec<u16>, _> =
                modulus.split(',').map(|c| c.trim().parse()).collect();
            let coeffs = coeffs.map_err(|_| "bad --field-modulus".to_string())?;
            let e = coeffs.len().saturating_sub(1).max(1) as u32;
            // p is the e-th root of q
            let mut p = 2u16;
            while (p as u64).pow(e) < args.q {
                p += 1;
            }
            let f = FieldSpec::new(p, &coeffs).map_err(|e| format!("{}", e))?;
            if f.q() != args.q {
                return Err(format!("q = {} does not match p^e = {}", args.q, f.q()));
            }
            Ok(f)
        }
    }
}

fn build_level(args: &FieldArgs, f: &FieldSpec) -> Result<(ParsedLevel, QuotientData), Outcome> {
    let parsed = parse_level(&args.level, f).map_err(|e| Outcome::Config(format!("{}", e)))?;
    let depth = default_depth(&parsed.level);
    let qd = build_quotient(&parsed.level, depth).map_err(|e| match e {
        LevelError::BudgetExceeded(msg) => Outcome::Budget(msg),
        other => Outcome::Config(format!("{}", other)),
    })?;
    Ok((parsed, qd))
}

fn emit(out: &Option<String>, body: &str) -> Result<(), Outcome> {
    match out {
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Outcome::Config(format!("{}", e))),
        Some(path) => std::fs::write(path, body).map_err(|e| Outcome::Config(format!("{}", e))),
    }
}

fn slope_error_outcome(e: SlopeError) -> Outcome {
    match e {
        SlopeError::Hypothesis(msg) => Outcome::Config(format!("hypothesis: {}", msg)),
        SlopeError::Precision(msg) => Outcome::Budget(msg),
        SlopeError::Hecke(HeckeError::ExtensionBudget) => {
            Outcome::Budget("cocycle extension budget".into())
        }
        other => Outcome::Config(format!("{}", other)),
    }
}

fn hecke_error_outcome(e: HeckeError) -> Outcome {
    match e {
        HeckeError::ExtensionBudget => Outcome::Budget("cocycle extension budget".into()),
        other => Outcome::Config(format!("{}", other)),
    }
}

fn shift_note(parsed: &ParsedLevel) -> Option<Value> {
    parsed.shift.map(|c| {
        json!({
            "variable_shift": format!("t -> t + {}", Poly::constant(c).render()),
            "note": "all polynomials are in the shifted coordinate where the distinguished prime is t",
        })
    })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Slopes {
            field,
            k,
            chi,
            format,
            out,
            threads,
        } => {
            let f = match build_field(&field) {
                Ok(f) => f,
                Err(e) => return Outcome::Config(e),
            };
            let weights = if k.trim().is_empty() {
                Vec::new()
            } else {
                match parse_weights(&k) {
                    Ok(w) => w,
                    Err(e) => return Outcome::Config(format!("{}", e)),
                }
            };
            let (parsed, qd) = match build_level(&field, &f) {
                Ok(x) => x,
                Err(o) => return o,
            };
            // Independent weights fan out over a bounded worker pool; tables
            // are reassembled in weight order, so the emitted numbers never
            // depend on the thread count.
            let nthreads = threads.max(1).min(weights.len().max(1));
            let mut slots: Vec<Option<Result<_, SlopeError>>> = Vec::new();
            slots.resize_with(weights.len(), || None);
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for worker in 0..nthreads {
                    let weights = &weights;
                    let qd = &qd;
                    handles.push(scope.spawn(move || {
                        let mut cache = HeckeCache::new(qd);
                        let mut results = Vec::new();
                        for idx in (worker..weights.len()).step_by(nthreads) {
                            results.push((idx, slope_decomposition(&mut cache, weights[idx], chi)));
                        }
                        results
                    }));
                }
                for h in handles {
                    for (idx, table) in h.join().expect("worker panicked") {
                        slots[idx] = Some(table);
                    }
                }
            });
            let mut tables = Vec::new();
            for slot in slots {
                match slot.expect("all slots filled") {
                    Ok(t) => tables.push(t),
                    Err(e) => return slope_error_outcome(e),
                }
            }
            let body = match format.as_str() {
                "csv" => {
                    let mut s = String::from("k,chi,slope_num,slope_den,mult\n");
                    for t in &tables {
                        encode::slope_table_to_csv(t, &mut s);
                    }
                    s
                }
                "json" => {
                    let mut obj = serde_json::Map::new();
                    obj.insert(
                        "tables".into(),
                        Value::Array(tables.iter().map(encode::slope_table_to_json).collect()),
                    );
                    if let Some(note) = shift_note(&parsed) {
                        obj.insert("shift".into(), note);
                    }
                    serde_json::to_string_pretty(&Value::Object(obj)).unwrap() + "\n"
                }
                other => return Outcome::Config(format!("unknown format {:?}", other)),
            };
            match emit(&out, &body) {
                Ok(()) => Outcome::Ok,
                Err(o) => o,
            }
        }
        Command::Verify {
            which,
            field,
            k,
            kprime,
            k1,
            k2,
            a,
            q_polys,
            n,
            nprime,
            r,
            rprime,
            chi,
            seed,
            trials,
            dim,
            d0,
            precision,
            format,
            out,
            threads: _,
        } => {
            let f = match build_field(&field) {
                Ok(f) => f,
                Err(e) => return Outcome::Config(e),
            };
            let reports: Result<Vec<Report>, Outcome> = (|| match which.as_str() {
                "eldiv" => {
                    let (_, qd) = build_level(&field, &f)?;
                    let weights =
                        parse_weights(&k).map_err(|e| Outcome::Config(format!("{}", e)))?;
                    let mut cache = HeckeCache::new(&qd);
                    let mut reports = Vec::new();
                    for kk in weights {
                        let u = u_matrix(&mut cache, kk).map_err(hecke_error_outcome)?;
                        let m = match chi {
                            None => u,
                            Some(c) => chi_part_matrix(&mut cache, kk, c, &u)
                                .map_err(hecke_error_outcome)?,
                        };
                        let mut rep = check_eldiv_bound(&m, &f, qd.d);
                        rep.param("k", kk);
                        if let Some(c) = chi {
                            rep.param("chi", c);
                        }
                        reports.push(rep);
                    }
                    Ok(reports)
                }
                "window" => {
                    let (_, qd) = build_level(&field, &f)?;
                    let weights =
                        parse_weights(&k).map_err(|e| Outcome::Config(format!("{}", e)))?;
                    let n = n.ok_or_else(|| Outcome::Config("window needs --n".into()))?;
                    let mut cache = HeckeCache::new(&qd);
                    let mut reports = Vec::new();
                    for kk in weights {
                        let rep = match chi {
                            None => check_window(&mut cache, kk, n),
                            Some(c) => check_window_chi(&mut cache, kk, n, c),
                        }
                        .map_err(slope_error_outcome)?;
                        reports.push(rep);
                    }
                    Ok(reports)
                }
                "constancy" => {
                    let (_, qd) = build_level(&field, &f)?;
                    let weights =
                        parse_weights(&k).map_err(|e| Outcome::Config(format!("{}", e)))?;
                    let kk = *weights
                        .first()
                        .ok_or_else(|| Outcome::Config("constancy needs --k".into()))?;
                    let kp = kprime
                        .or_else(|| weights.get(1).copied())
                        .ok_or_else(|| Outcome::Config("constancy needs --kprime".into()))?;
                    let n = n.ok_or_else(|| Outcome::Config("constancy needs --n".into()))?;
                    let a_max = match a {
                        None => None,
                        Some(s) => Some(
                            parse_rational(&s).map_err(|e| Outcome::Config(format!("{}", e)))?,
                        ),
                    };
                    let mut cache = HeckeCache::new(&qd);
                    let rep = check_constancy(&mut cache, kk, kp, n, a_max, chi)
                        .map_err(slope_error_outcome)?;
                    Ok(vec![rep])
                }
                "hida" => {
                    let weights =
                        parse_weights(&k).map_err(|e| Outcome::Config(format!("{}", e)))?;
                    let r1 = r.unwrap_or(1);
                    let r2 = rprime.unwrap_or(r1 + 1);
                    let prec = precision.unwrap_or(16);
                    let mut reports = Vec::new();
                    for kk in weights {
                        let rep = hida_check(&f, &Poly::one(&f), kk, r1, r2, prec)
                            .map_err(slope_error_outcome)?;
                        reports.push(rep);
                    }
                    Ok(reports)
                }
                "perturb" => {
                    let n = n.unwrap_or(1);
                    let rep =
                        perturb_trial(&f, seed, dim, d0, n, trials).map_err(slope_error_outcome)?;
                    Ok(vec![rep])
                }
                "family" => {
                    let (parsed, qd) = build_level(&field, &f)?;
                    let k1 = k1.ok_or_else(|| Outcome::Config("family needs --k1".into()))?;
                    let k2 = k2.ok_or_else(|| Outcome::Config("family needs --k2".into()))?;
                    let a_str = a.ok_or_else(|| Outcome::Config("family needs --a".into()))?;
                    let a = parse_rational(&a_str)
                        .map_err(|e| Outcome::Config(format!("{}", e)))?;
                    let n = n.ok_or_else(|| Outcome::Config("family needs --n".into()))?;
                    let np =
                        nprime.ok_or_else(|| Outcome::Config("family needs --nprime".into()))?;
                    let mut cache = HeckeCache::new(&qd);
                    let mut reports = Vec::new();
                    let qs = if q_polys.is_empty() {
                        vec!["t".to_string()]
                    } else {
                        q_polys.clone()
                    };
                    for qs_str in qs {
                        let mut q_poly = parse_poly(&qs_str, &f)
                            .map_err(|e| Outcome::Config(format!("{}", e)))?;
                        if let Some(c) = parsed.shift {
                            q_poly = q_poly.shift_var(c, &f);
                        }
                        let rep = family_congruence(&mut cache, k1, k2, a, &q_poly, n, np)
                            .map_err(slope_error_outcome)?;
                        reports.push(rep);
                    }
                    Ok(reports)
                }
                other => Err(Outcome::Config(format!("unknown verifier {:?}", other))),
            })();
            let reports = match reports {
                Ok(r) => r,
                Err(o) => return o,
            };
            let all_pass = reports.iter().all(|r| r.pass());
            let body = match format.as_str() {
                "json" => {
                    let arr = Value::Array(reports.iter().map(encode::report_to_json).collect());
                    serde_json::to_string_pretty(&arr).unwrap() + "\n"
                }
                other => return Outcome::Config(format!("unknown format {:?}", other)),
            };
            if let Err(o) = emit(&out, &body) {
                return o;
            }
            if all_pass {
                Outcome::Ok
            } else {
                Outcome::Falsified
            }
        }
        Command::DumpQuotient { field, out } => {
            let f = match build_field(&field) {
                Ok(f) => f,
                Err(e) => return Outcome::Config(e),
            };
            let (parsed, qd) = match build_level(&field, &f) {
                Ok(x) => x,
                Err(o) => return o,
            };
            let lambda1: Vec<Value> = qd
                .lambda1
                .iter()
                .map(|rep| {
                    json!({
                        "level": rep.level_i,
                        "label": rep.label,
                        "edge": rep.edge.render(),
                    })
                })
                .collect();
            let mut obj = serde_json::Map::new();
            obj.insert("index".into(), json!(qd.index));
            obj.insert("d".into(), json!(qd.d));
            obj.insert("stable_vertices".into(), json!(qd.stable_vertex_count));
            obj.insert("depth".into(), json!(qd.depth()));
            obj.insert("lambda1".into(), Value::Array(lambda1));
            obj.insert(
                "steinberg_term_counts".into(),
                Value::Array(qd.steinberg.iter().map(|s| json!(s.len())).collect()),
            );
            if let Some(note) = shift_note(&parsed) {
                obj.insert("shift".into(), note);
            }
            let body = serde_json::to_string_pretty(&Value::Object(obj)).unwrap() + "\n";
            match emit(&out, &body) {
                Ok(()) => Outcome::Ok,
                Err(o) => o,
            }
        }
        Command::DumpMatrix {
            field,
            k,
            q_poly,
            charpoly,
            out,
        } => {
            let f = match build_field(&field) {
                Ok(f) => f,
                Err(e) => return Outcome::Config(e),
            };
            let (parsed, qd) = match build_level(&field, &f) {
                Ok(x) => x,
                Err(o) => return o,
            };
            let mut q = match parse_poly(&q_poly, &f) {
                Ok(q) => q,
                Err(e) => return Outcome::Config(format!("{}", e)),
            };
            if let Some(c) = parsed.shift {
                q = q.shift_var(c, &f);
            }
            let mut cache = HeckeCache::new(&qd);
            let m = match hecke_matrix(&mut cache, k, &q) {
                Ok(m) => m,
                Err(e) => return hecke_error_outcome(e),
            };
            let payload = if charpoly {
                match drinfeld_core::algebra::berkowitz::charpoly_reciprocal(&m, &f) {
                    Ok(cp) => encode::xpoly_to_json(&cp, &f),
                    Err(e) => return Outcome::Config(format!("{}", e)),
                }
            } else {
                encode::matrix_to_json(&m, &f)
            };
            let body = serde_json::to_string(&payload).unwrap() + "\n";
            match emit(&out, &body) {
                Ok(()) => Outcome::Ok,
                Err(o) => o,
            }
        }
    }
}
