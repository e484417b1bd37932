//! Batch front door: builds algebras, runs analyses and pipelines, and
//! emits reports. Exit codes: 0 success, 1 analysis failure, 2 usage
//! error.

use std::collections::HashMap;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jt_core::algebra::axiom_check;
use jt_core::analysis::{
    closure_bounded, coverage_check, encode_delta, generator_word, jonsson_check,
    noniso_certificate, steps_string, typeb_certificate, TypeBCertificate,
};
use jt_core::combinat::{
    distributive_check, greedy_free, lattice_dot, mask_elems, max_free, partition_free,
    proper_subalgebra_pipeline, union_cover_pipeline, FinAlgebra, SetMapping, SubChain,
};
use jt_core::layers::{describe_layer, JtAlgebra, Letter, SigmaWord};
use jt_core::ordinal::Ordinal;
use jt_core::terms::{
    distributivity_witness, evaluate, normalize, parse_term, sigma_equiv,
};

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Parser)]
#[command(name = "jt", version, about = "Jonsson-Tarski algebra toolbox", disable_help_subcommand = true)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Base algebra specifier: cantor | layer0 | perm(<base>;<cycles>).
    #[arg(long, global = true, default_value = "cantor")]
    base: String,
    /// Layer word over {A, B}.
    #[arg(long, global = true, default_value = "")]
    sigma: String,
    /// Window bound as an ordinal, e.g. "w*2+16".
    #[arg(long, global = true, default_value = "w+32")]
    bound: String,
    /// Search/closure budget.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: usize,
    /// Seed for randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Input file for finite structures.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a term to its normal form.
    Normalize { term: String },
    /// Decide whether two terms denote the same operation.
    Equiv { term1: String, term2: String },
    /// Evaluate a term in an algebra; bindings like "x=3,y=w+1".
    Eval {
        term: String,
        #[arg(long, default_value = "")]
        env: String,
    },
    /// Produce the distributivity witness for a term under a split.
    Witness {
        term: String,
        #[arg(long, value_delimiter = ',', default_value = "")]
        x_vars: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "")]
        y_vars: Vec<String>,
    },
    /// Dump rows (z, l z, r z) of one layer.
    BuildTable {
        #[arg(long, default_value_t = 1)]
        layer: u32,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Bounded closure of a seed set.
    Closure {
        #[arg(required = true)]
        seeds: Vec<String>,
    },
    /// Shortest unary word between two elements.
    Genword { from: String, to: String },
    /// Coverage of l(r^n g) (mode A) or r(l^n g) (mode B).
    Coverage {
        g: String,
        #[arg(long, default_value = "A")]
        mode: String,
        #[arg(long, default_value_t = 600)]
        nmax: u64,
    },
    /// Certify whether the top layer admits a type B generator.
    CertifyTypeb {
        #[arg(long, default_value_t = 600)]
        nmax: u64,
    },
    /// Certify non-isomorphism for a pair of admissible sigma words.
    CertifyNoniso { sigma1: String, sigma2: String },
    /// Encode a bit string into an admissible sigma word.
    Encode { bits: String },
    /// Windowed single-element generation check.
    Jonsson,
    /// Subalgebra lattice of a finite algebra (--in, text format).
    FinLattice,
    /// Free sets of a set-mapping (--in, JSON).
    Freeset {
        #[arg(long, default_value = "exact")]
        method: String,
    },
    /// Run a proof pipeline on a subalgebra chain (--in, JSON).
    Pipeline {
        #[arg(long, default_value = "proper")]
        kind: String,
    },
    /// Check the defining identities on a window.
    Axioms {
        #[arg(long, default_value_t = 128)]
        samples: u64,
    },
}

struct Failure {
    message: String,
    usage: bool,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure { message: msg.into(), usage: true }
    }
    fn analysis(msg: impl Into<String>) -> Failure {
        Failure { message: msg.into(), usage: false }
    }
}

macro_rules! usage {
    ($e:expr, $what:expr) => {
        $e.map_err(|err| Failure::usage(format!("{}: {}", $what, err)))?
    };
}

fn report(kind: &str, inputs: Value, result: Value, witnesses: Vec<Value>, exhausted: bool) -> Value {
    json!({
        "kind": kind,
        "inputs": inputs,
        "result": result,
        "witnesses": witnesses,
        "budgetExhausted": exhausted,
    })
}

fn emit(format: Format, rep: &Value, text: String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(rep).unwrap()),
        _ => println!("{text}"),
    }
}

fn parse_env(s: &str) -> Result<HashMap<String, Ordinal>, Failure> {
    let mut env = HashMap::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (var, val) = part
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("binding {part:?} is not var=ordinal")))?;
        let val: Ordinal = usage!(val.trim().parse(), format!("binding {var}"));
        env.insert(var.trim().to_string(), val);
    }
    Ok(env)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let format = cli.format;
    let bound: Ordinal = usage!(cli.bound.parse(), "--bound");
    let algebra = || -> Result<JtAlgebra, Failure> {
        Ok(usage!(JtAlgebra::build(&cli.base, &cli.sigma), "algebra"))
    };
    let read_input = || -> Result<String, Failure> {
        let path = cli
            .input
            .as_ref()
            .ok_or_else(|| Failure::usage("this subcommand requires --in FILE"))?;
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("--in {path}: {e}")))
    };

    match &cli.command {
        Command::Normalize { term } => {
            let t = usage!(parse_term(term), "term");
            let n = normalize(&t);
            let rep = report(
                "normalize",
                json!({ "term": term }),
                json!(n.to_string()),
                vec![],
                false,
            );
            emit(format, &rep, n.to_string());
            Ok(true)
        }
        Command::Equiv { term1, term2 } => {
            let t1 = usage!(parse_term(term1), "term1");
            let t2 = usage!(parse_term(term2), "term2");
            let eq = sigma_equiv(&t1, &t2);
            let rep = report(
                "equiv",
                json!({ "term1": term1, "term2": term2 }),
                json!(eq),
                vec![json!({
                    "normal1": normalize(&t1).to_string(),
                    "normal2": normalize(&t2).to_string(),
                })],
                false,
            );
            emit(format, &rep, eq.to_string());
            Ok(true)
        }
        Command::Eval { term, env } => {
            let t = usage!(parse_term(term), "term");
            let env = parse_env(env)?;
            let alg = algebra()?;
            let v = evaluate(&t, &env, &alg)
                .map_err(|e| Failure::analysis(format!("evaluation failed: {e}")))?;
            let rep = report(
                "eval",
                json!({ "term": term, "base": cli.base, "sigma": cli.sigma }),
                json!(v.to_string()),
                vec![],
                false,
            );
            emit(format, &rep, v.to_string());
            Ok(true)
        }
        Command::Witness { term, x_vars, y_vars } => {
            let t = usage!(parse_term(term), "term");
            let x: Vec<String> = x_vars.iter().filter(|v| !v.is_empty()).cloned().collect();
            let y: Vec<String> = y_vars.iter().filter(|v| !v.is_empty()).cloned().collect();
            let w = usage!(distributivity_witness(&t, &x, &y), "split");
            let witnesses: Vec<Value> = w
                .extracted
                .iter()
                .map(|(word, side)| json!({ "word": word.to_string(), "side": side }))
                .collect();
            let text = {
                let mut lines = vec![format!("s = {}", w.skeleton)];
                for (word, side) in &w.extracted {
                    lines.push(format!("t = {} ({:?}-side)", word, side));
                }
                lines.join("\n")
            };
            let rep = report(
                "witness",
                json!({ "term": term, "xVars": x, "yVars": y }),
                json!({ "skeleton": w.skeleton.to_string(), "normal": w.normal.to_string() }),
                witnesses,
                false,
            );
            emit(format, &rep, text);
            Ok(true)
        }
        Command::BuildTable { layer, count } => {
            let alg = algebra()?;
            let rows = describe_layer(&alg, *layer, *count)
                .map_err(|e| Failure::usage(format!("table: {e}")))?;
            let witnesses: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "z": r.z.to_string(),
                        "l": r.l.to_string(),
                        "r": r.r.to_string(),
                    })
                })
                .collect();
            let lines: Vec<String> = match format {
                Format::Csv => std::iter::once("z,l,r".to_string())
                    .chain(rows.iter().map(|r| format!("{},{},{}", r.z, r.l, r.r)))
                    .collect(),
                _ => rows
                    .iter()
                    .map(|r| format!("{}\tl={}\tr={}", r.z, r.l, r.r))
                    .collect(),
            };
            let rep = report(
                "build-table",
                json!({ "base": cli.base, "sigma": cli.sigma, "layer": layer, "count": count }),
                json!(rows.len()),
                witnesses,
                false,
            );
            emit(format, &rep, lines.join("\n"));
            Ok(true)
        }
        Command::Closure { seeds } => {
            let alg = algebra()?;
            let seeds: Vec<Ordinal> = seeds
                .iter()
                .map(|s| s.parse().map_err(|e| Failure::usage(format!("seed {s:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            let rep = closure_bounded(&alg, &seeds, bound, cli.budget);
            let out = report(
                "closure",
                json!({
                    "base": cli.base, "sigma": cli.sigma,
                    "seeds": rep.requested, "bound": bound.to_string(),
                    "budget": cli.budget,
                }),
                serde_json::to_value(&rep).unwrap(),
                vec![],
                rep.budget_exhausted,
            );
            let found: Vec<String> = rep.found.iter().map(|z| z.to_string()).collect();
            let text = format!(
                "found {} elements below {}: {}\nsaturated: {} predicted: {}",
                rep.found.len(),
                bound,
                found.join(" "),
                rep.saturated,
                rep.predicted,
            );
            emit(format, &out, text);
            Ok(true)
        }
        Command::Genword { from, to } => {
            let alg = algebra()?;
            let from: Ordinal = usage!(from.parse(), "from");
            let to: Ordinal = usage!(to.parse(), "to");
            let w = generator_word(&alg, from, to, cli.budget)
                .map_err(|e| Failure::analysis(e.to_string()))?;
            let rep = report(
                "genword",
                json!({
                    "base": cli.base, "sigma": cli.sigma,
                    "from": from.to_string(), "to": to.to_string(),
                }),
                serde_json::to_value(&w).unwrap(),
                vec![],
                false,
            );
            emit(format, &rep, steps_string(&w.steps));
            Ok(true)
        }
        Command::Coverage { g, mode, nmax } => {
            let alg = algebra()?;
            let g: Ordinal = usage!(g.parse(), "g");
            let mode = match mode.as_str() {
                "A" => Letter::A,
                "B" => Letter::B,
                other => return Err(Failure::usage(format!("mode must be A or B, got {other:?}"))),
            };
            let rep = coverage_check(&alg, g, mode, bound, *nmax)
                .map_err(|e| Failure::analysis(e.to_string()))?;
            let out = report(
                "coverage",
                json!({
                    "base": cli.base, "sigma": cli.sigma, "g": g.to_string(),
                    "mode": mode.to_string(), "bound": bound.to_string(), "nmax": nmax,
                }),
                serde_json::to_value(&rep).unwrap(),
                vec![],
                false,
            );
            let lines: Vec<String> = rep
                .covered
                .iter()
                .map(|(z, n)| format!("{z} at n={n}"))
                .collect();
            emit(format, &out, lines.join("\n"));
            Ok(true)
        }
        Command::CertifyTypeb { nmax } => {
            let alg = algebra()?;
            let cert = typeb_certificate(&alg, bound, *nmax)
                .map_err(|e| Failure::analysis(e.to_string()))?;
            let (ok, text) = match &cert {
                TypeBCertificate::Generator { g, complete, .. } => {
                    (*complete, format!("Generator({g}) complete={complete}"))
                }
                TypeBCertificate::Refutation { top, all_bounded, .. } => {
                    (*all_bounded, format!("Refutation(top layer {top}) bounded={all_bounded}"))
                }
            };
            let rep = report(
                "certify-typeb",
                json!({ "base": cli.base, "sigma": cli.sigma, "bound": bound.to_string(), "nmax": nmax }),
                serde_json::to_value(&cert).unwrap(),
                vec![],
                false,
            );
            emit(format, &rep, text);
            Ok(ok)
        }
        Command::CertifyNoniso { sigma1, sigma2 } => {
            let s1: SigmaWord = usage!(sigma1.parse(), "sigma1");
            let s2: SigmaWord = usage!(sigma2.parse(), "sigma2");
            match noniso_certificate(&s1, &s2) {
                Ok(cert) => {
                    let rep = report(
                        "certify-noniso",
                        json!({ "sigma1": sigma1, "sigma2": sigma2 }),
                        serde_json::to_value(&cert).unwrap(),
                        vec![],
                        false,
                    );
                    emit(
                        format,
                        &rep,
                        format!("non-isomorphic, first difference at index {}", cert.first_difference),
                    );
                    Ok(true)
                }
                Err(violation) => {
                    let rep = report(
                        "certify-noniso",
                        json!({ "sigma1": sigma1, "sigma2": sigma2 }),
                        serde_json::to_value(&violation).unwrap(),
                        vec![],
                        false,
                    );
                    emit(format, &rep, format!("no certificate: {violation}"));
                    Ok(false)
                }
            }
        }
        Command::Encode { bits } => {
            let delta: Vec<bool> = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Failure::usage(format!("bit string contains {other:?}"))),
                })
                .collect::<Result<_, _>>()?;
            let word = encode_delta(&delta);
            let rep = report(
                "encode",
                json!({ "bits": bits }),
                json!(word.to_string()),
                vec![],
                false,
            );
            emit(format, &rep, word.to_string());
            Ok(true)
        }
        Command::Jonsson => {
            let alg = algebra()?;
            let rep = jonsson_check(&alg, bound, cli.budget);
            let exhausted = rep.failures.iter().any(|f| f.budget_exhausted);
            let out = report(
                "jonsson",
                json!({
                    "base": cli.base, "sigma": cli.sigma,
                    "bound": bound.to_string(), "budget": cli.budget,
                }),
                serde_json::to_value(&rep).unwrap(),
                vec![],
                exhausted,
            );
            emit(
                format,
                &out,
                format!("checked {} elements: {}", rep.checked, if rep.pass { "pass" } else { "FAIL" }),
            );
            Ok(rep.pass)
        }
        Command::FinLattice => {
            let text = read_input()?;
            let alg = usage!(FinAlgebra::parse_text(&text), "--in");
            let subs = usage!(alg.subalgebras(), "lattice");
            let dist = usage!(distributive_check(&alg), "lattice");
            if format == Format::Dot {
                println!("{}", lattice_dot(&subs));
                return Ok(true);
            }
            let members: Vec<Vec<usize>> = subs.iter().map(|&m| mask_elems(m)).collect();
            let rep = report(
                "fin-lattice",
                json!({ "size": alg.size, "operations": alg.operations.len() }),
                json!({ "latticeSize": subs.len(), "distributive": dist.distributive }),
                members.iter().map(|m| json!(m)).collect(),
                false,
            );
            let mut lines: Vec<String> = members
                .iter()
                .map(|m| {
                    let elems: Vec<String> = m.iter().map(|e| e.to_string()).collect();
                    format!("{{{}}}", elems.join(","))
                })
                .collect();
            lines.push(format!("distributive: {}", dist.distributive));
            emit(format, &rep, lines.join("\n"));
            Ok(true)
        }
        Command::Freeset { method } => {
            let text = read_input()?;
            let f: SetMapping = usage!(serde_json::from_str(&text), "--in");
            let (result, witnesses): (Value, Vec<Value>) = match method.as_str() {
                "exact" => {
                    let set = usage!(max_free(&f), "exact search");
                    (json!({ "size": set.len() }), vec![json!(set)])
                }
                "greedy" => {
                    let set = greedy_free(&f);
                    (json!({ "size": set.len() }), vec![json!(set)])
                }
                "partition" => {
                    let classes = partition_free(&f);
                    (
                        json!({ "classes": classes.len() }),
                        classes.iter().map(|c| json!(c)).collect(),
                    )
                }
                other => {
                    return Err(Failure::usage(format!(
                        "method must be exact, greedy, or partition, got {other:?}"
                    )))
                }
            };
            let rep = report(
                "freeset",
                json!({ "size": f.size, "method": method }),
                result.clone(),
                witnesses.clone(),
                false,
            );
            let text: Vec<String> = witnesses.iter().map(|w| w.to_string()).collect();
            emit(format, &rep, text.join("\n"));
            Ok(true)
        }
        Command::Pipeline { kind } => {
            let text = read_input()?;
            let sc: SubChain = usage!(serde_json::from_str(&text), "--in");
            match kind.as_str() {
                "proper" => {
                    let w = proper_subalgebra_pipeline(&sc)
                        .map_err(|e| Failure::analysis(e.to_string()))?;
                    let ok = w.proper && w.gap_disjoint;
                    let rep = report(
                        "pipeline",
                        json!({ "kind": "proper", "size": sc.algebra.size }),
                        serde_json::to_value(&w).unwrap(),
                        vec![],
                        false,
                    );
                    emit(
                        format,
                        &rep,
                        format!(
                            "free set {:?}, xi={}, generated {:?}, proper={}",
                            w.free_set, w.xi, w.generated, w.proper
                        ),
                    );
                    Ok(ok)
                }
                "union" => {
                    let cover = union_cover_pipeline(&sc)
                        .map_err(|e| Failure::analysis(e.to_string()))?;
                    let ok = cover.covers;
                    let rep = report(
                        "pipeline",
                        json!({ "kind": "union", "size": sc.algebra.size }),
                        serde_json::to_value(&cover).unwrap(),
                        vec![],
                        false,
                    );
                    emit(
                        format,
                        &rep,
                        format!(
                            "{} members over {} classes, covers={}, all proper={}",
                            cover.members.len(),
                            cover.classes.len(),
                            cover.covers,
                            cover.all_proper
                        ),
                    );
                    Ok(ok)
                }
                other => Err(Failure::usage(format!(
                    "kind must be proper or union, got {other:?}"
                ))),
            }
        }
        Command::Axioms { samples } => {
            let alg = algebra()?;
            let rep = axiom_check(&alg, bound.offset, *samples, cli.seed);
            let out = report(
                "axioms",
                json!({
                    "base": cli.base, "sigma": cli.sigma,
                    "bound": bound.to_string(), "samples": samples, "seed": cli.seed,
                }),
                serde_json::to_value(&rep).unwrap(),
                vec![],
                false,
            );
            emit(
                format,
                &out,
                format!("{} checks: {}", rep.checks, if rep.passed { "pass" } else { "FAIL" }),
            );
            Ok(rep.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(if f.usage { 2 } else { 1 })
        }
    }
}
