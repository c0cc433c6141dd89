//! Command-line frontend for the global-store calculus toolkit.
//!
//! Exit codes: 0 success / true / converged; 1 false / blocked / not found;
//! 2 fuel or budget exhausted; 3 input error. The default small-step fuel
//! is 10000, overridable with `--fuel` or the `LAMGS_FUEL` environment
//! variable.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lamgs_core::eval::{run, Configuration, RunOutcome, DEFAULT_FUEL};
use lamgs_core::realize::{member, Budget, Entity, MembershipVerdict, Probe};
use lamgs_core::store::{normal_form, store_eq, StoreTerm};
use lamgs_core::suites;
use lamgs_core::types::{subtype, AnyType};
use lamgs_core::typing::{
    certify_convergence, check_derivation, search_typing, CertifyFailure, Context,
};

use lamgs_cli::parse::{parse_computation, parse_derivation, parse_store, parse_type, parse_value};
use lamgs_cli::render::{
    self, render_comp, render_derivation, render_store, render_type, render_value, Style, ASCII,
    UNICODE,
};

#[derive(Parser)]
#[command(
    name = "lamgs",
    about = "An untyped computational lambda-calculus with global store: evaluator, store algebra, intersection types, and convergence certification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EvalOpts {
    /// The program to evaluate; omit when using --batch.
    term: Option<String>,
    /// Initial store term (defaults to emp).
    #[arg(long)]
    store: Option<String>,
    /// Small-step fuel.
    #[arg(long)]
    fuel: Option<usize>,
    /// Emit structured JSON.
    #[arg(long)]
    json: bool,
    /// Render with unicode symbols.
    #[arg(long)]
    unicode: bool,
    /// Read newline-separated programs from a file.
    #[arg(long)]
    batch: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program and print its result.
    Eval(EvalOpts),
    /// Evaluate and print the whole reduction trace.
    Trace(EvalOpts),
    /// Print the canonical normal form of a store term.
    StoreNf {
        store: String,
        #[arg(long)]
        unicode: bool,
    },
    /// Decide derivable equality of two store terms.
    StoreEq { left: String, right: String },
    /// Decide the subtyping preorder on two types of the same sort.
    Subtype { left: String, right: String },
    /// Check a derivation file rule by rule.
    Typecheck { file: String },
    /// Run a closed program and certify its convergence with a typing
    /// derivation at wS -> wD x wS.
    Certify {
        term: String,
        #[arg(long)]
        fuel: Option<usize>,
        /// Write the derivation to this file.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        unicode: bool,
    },
    /// Search for a typing derivation up to a nesting depth.
    Search {
        term: String,
        /// Target computation type.
        #[arg(long = "type")]
        ty: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        unicode: bool,
    },
    /// Test membership of a term, computation, or store in a type's
    /// interpretation.
    Member {
        entity: String,
        /// Entity sort: value, comp, or store.
        #[arg(long, default_value = "comp")]
        sort: String,
        #[arg(long = "type")]
        ty: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 500)]
        fuel: usize,
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run the property suites.
    Proptest {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0xACCE)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn default_fuel() -> usize {
    std::env::var("LAMGS_FUEL")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_FUEL)
}

fn style(unicode: bool) -> Style {
    if unicode {
        UNICODE
    } else {
        ASCII
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::Eval(opts) => eval_cmd(opts, false),
        Command::Trace(opts) => eval_cmd(opts, true),
        Command::StoreNf { store, unicode } => {
            let s = parse_store(&store).map_err(|e| e.to_string())?;
            println!("{}", render_store(&normal_form(&s), &style(unicode)));
            Ok(ExitCode::SUCCESS)
        }
        Command::StoreEq { left, right } => {
            let a = parse_store(&left).map_err(|e| e.to_string())?;
            let b = parse_store(&right).map_err(|e| e.to_string())?;
            let eq = store_eq(&a, &b);
            println!("{eq}");
            Ok(if eq {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Subtype { left, right } => {
            let a = parse_type(&left).map_err(|e| e.to_string())?;
            let b = parse_type(&right).map_err(|e| e.to_string())?;
            let sub = subtype(&a, &b).map_err(|e| e.to_string())?;
            println!("{sub}");
            Ok(if sub {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Typecheck { file } => {
            let text = fs::read_to_string(&file).map_err(|e| format!("{file}: {e}"))?;
            let d = parse_derivation(&text).map_err(|e| e.to_string())?;
            match check_derivation(&d) {
                Ok(()) => {
                    println!("Ok");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("Err: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Certify {
            term,
            fuel,
            out,
            json,
            unicode,
        } => {
            let m = parse_computation(&term).map_err(|e| e.to_string())?;
            let fuel = fuel.unwrap_or_else(default_fuel);
            match certify_convergence(&m, fuel) {
                Ok(cert) => {
                    let text = render_derivation(&cert.derivation, &ASCII);
                    if let Some(path) = &out {
                        fs::write(path, &text).map_err(|e| format!("{path}: {e}"))?;
                    }
                    if json {
                        let payload = serde_json::json!({
                            "outcome": "converged",
                            "steps": cert.trace.len() - 1,
                            "derivation": render::derivation_json(&cert.derivation),
                        });
                        println!("{payload}");
                    } else {
                        println!(
                            "converged in {} steps; derivation of {} checks",
                            cert.trace.len() - 1,
                            render_type(&cert.derivation.conclusion.ty, &style(unicode))
                        );
                        if out.is_none() {
                            print!("{}", render_derivation(&cert.derivation, &style(unicode)));
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(CertifyFailure::Blocked(cfg, steps)) => {
                    println!(
                        "blocked after {steps} steps at {}",
                        render_comp(&cfg.comp, &style(unicode))
                    );
                    Ok(ExitCode::from(1))
                }
                Err(CertifyFailure::FuelExhausted(steps)) => {
                    println!("fuel exhausted after {steps} steps");
                    Ok(ExitCode::from(2))
                }
                Err(CertifyFailure::Open) => Err("the term is not closed".into()),
            }
        }
        Command::Search {
            term,
            ty,
            depth,
            unicode,
        } => {
            let m = parse_computation(&term).map_err(|e| e.to_string())?;
            let t = parse_type(&ty).map_err(|e| e.to_string())?;
            let AnyType::T(tau) = t else {
                return Err("the search target must be a computation type".into());
            };
            match search_typing(&Context::empty(), &m, &tau, depth) {
                Some(d) => {
                    print!("{}", render_derivation(&d, &style(unicode)));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not found at depth {depth}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Member {
            entity,
            sort,
            ty,
            samples,
            fuel,
            size,
            seed,
            json,
        } => {
            let t = parse_type(&ty).map_err(|e| e.to_string())?;
            let e = match sort.as_str() {
                "value" => Entity::Val(parse_value(&entity).map_err(|e| e.to_string())?),
                "comp" => Entity::Comp(parse_computation(&entity).map_err(|e| e.to_string())?),
                "store" => Entity::Store(parse_store(&entity).map_err(|e| e.to_string())?),
                other => return Err(format!("unknown sort `{other}`")),
            };
            let budget = Budget {
                max_samples: samples,
                fuel,
                max_term_size: size,
            };
            let verdict = member(&e, &t, &budget, seed);
            if json {
                println!("{}", verdict_json(&verdict, &budget, seed));
            } else {
                match &verdict {
                    MembershipVerdict::Yes { exhaustive } => {
                        println!("yes (exhaustive: {exhaustive})")
                    }
                    MembershipVerdict::No(c) => {
                        println!("no: {}", c.reason);
                        for p in &c.steps {
                            match p {
                                Probe::AppliedValue(v) => {
                                    println!("  applied to {}", render_value(v, &ASCII))
                                }
                                Probe::RanOnStore(s) => {
                                    println!("  ran on {}", render_store(s, &ASCII))
                                }
                                Probe::AtLocation(l) => println!("  at location l{}", l.0),
                            }
                        }
                    }
                    MembershipVerdict::Unknown => println!("unknown (budget exhausted)"),
                }
            }
            Ok(match verdict {
                MembershipVerdict::Yes { .. } => ExitCode::SUCCESS,
                MembershipVerdict::No(_) => ExitCode::from(1),
                MembershipVerdict::Unknown => ExitCode::from(2),
            })
        }
        Command::Proptest { suite, seed } => {
            let reports = if suite == "all" {
                suites::all_suites(seed)
            } else {
                match suites::run_suite(&suite, seed) {
                    Some(r) => vec![r],
                    None => {
                        return Err(format!(
                            "unknown suite `{suite}`; known: {}",
                            suites::SUITE_NAMES.join(", ")
                        ))
                    }
                }
            };
            let mut all_passed = true;
            for r in &reports {
                println!("{}", r.line());
                all_passed &= r.passed;
            }
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn eval_cmd(opts: EvalOpts, with_trace: bool) -> Result<ExitCode, String> {
    let st = style(opts.unicode);
    let fuel = opts.fuel.unwrap_or_else(default_fuel);
    let store = match &opts.store {
        Some(s) => parse_store(s).map_err(|e| e.to_string())?,
        None => StoreTerm::Emp,
    };
    let programs: Vec<String> = match (&opts.batch, &opts.term) {
        (Some(path), None) => fs::read_to_string(path)
            .map_err(|e| format!("{path}: {e}"))?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect(),
        (None, Some(t)) => vec![t.clone()],
        _ => return Err("provide exactly one of a term or --batch".into()),
    };
    let mut worst = ExitCode::SUCCESS;
    for text in &programs {
        let m = parse_computation(text).map_err(|e| e.to_string())?;
        let c = Configuration::new(m, store.clone());
        if !c.is_closed() {
            return Err("the configuration is not closed".into());
        }
        let (outcome, trace) = run(&c, fuel).map_err(|e| e.to_string())?;
        if opts.json {
            let steps: Vec<serde_json::Value> = trace
                .iter()
                .enumerate()
                .map(|(i, cfg)| {
                    serde_json::json!({
                        "step": i,
                        "computation": render_comp(&cfg.comp, &ASCII),
                        "store": render_store(&cfg.store, &ASCII),
                    })
                })
                .collect();
            let payload = serde_json::json!({
                "outcome": outcome_tag(&outcome),
                "steps": trace.len() - 1,
                "result": outcome_result(&outcome),
                "trace": if with_trace { serde_json::Value::Array(steps) } else { serde_json::Value::Null },
            });
            println!("{payload}");
        } else {
            if with_trace {
                for (i, cfg) in trace.iter().enumerate() {
                    println!(
                        "{i:4}  {}  -|  {}",
                        render_comp(&cfg.comp, &st),
                        render_store(&cfg.store, &st)
                    );
                }
            }
            match &outcome {
                RunOutcome::Converged {
                    value,
                    store,
                    steps,
                    ..
                } => println!(
                    "converged in {steps} steps: {}  -|  {}",
                    render_value(value, &st),
                    render_store(store, &st)
                ),
                RunOutcome::Blocked { config, steps } => println!(
                    "blocked after {steps} steps at {}",
                    render_comp(&config.comp, &st)
                ),
                RunOutcome::FuelExhausted { steps, .. } => {
                    println!("fuel exhausted after {steps} steps")
                }
            }
        }
        let code = match outcome {
            RunOutcome::Converged { .. } => ExitCode::SUCCESS,
            RunOutcome::Blocked { .. } => ExitCode::from(1),
            RunOutcome::FuelExhausted { .. } => ExitCode::from(2),
        };
        if code != ExitCode::SUCCESS {
            worst = code;
        }
    }
    Ok(worst)
}

fn outcome_tag(o: &RunOutcome) -> &'static str {
    match o {
        RunOutcome::Converged { .. } => "converged",
        RunOutcome::Blocked { .. } => "blocked",
        RunOutcome::FuelExhausted { .. } => "fuel-exhausted",
    }
}

fn outcome_result(o: &RunOutcome) -> serde_json::Value {
    match o {
        RunOutcome::Converged { value, store, .. } => serde_json::json!({
            "value": render_value(value, &ASCII),
            "store": render_store(store, &ASCII),
        }),
        _ => serde_json::Value::Null,
    }
}

fn verdict_json(v: &MembershipVerdict, budget: &Budget, seed: u64) -> serde_json::Value {
    let (tag, exhaustive, witness) = match v {
        MembershipVerdict::Yes { exhaustive } => {
            ("yes", Some(*exhaustive), serde_json::Value::Null)
        }
        MembershipVerdict::Unknown => ("unknown", None, serde_json::Value::Null),
        MembershipVerdict::No(c) => {
            let steps: Vec<serde_json::Value> = c
                .steps
                .iter()
                .map(|p| match p {
                    Probe::AppliedValue(v) => serde_json::json!({
                        "applied": render_value(v, &ASCII)
                    }),
                    Probe::RanOnStore(s) => serde_json::json!({
                        "store": render_store(s, &ASCII)
                    }),
                    Probe::AtLocation(l) => serde_json::json!({ "location": format!("l{}", l.0) }),
                })
                .collect();
            (
                "no",
                None,
                serde_json::json!({ "reason": c.reason, "trail": steps }),
            )
        }
    };
    serde_json::json!({
        "verdict": tag,
        "exhaustive": exhaustive,
        "witness": witness,
        "budget": {
            "samples": budget.max_samples,
            "fuel": budget.fuel,
            "term_size": budget.max_term_size,
        },
        "seed": seed,
    })
}
