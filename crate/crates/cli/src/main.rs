//! `hankel`: exact generalized Hankel transforms from the command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 bad input,
//! 3 singular closed form with `--method closed`, 4 detector found no
//! product form likely, 5 detector inconclusive.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use hankel_core::arith::{format_rational, parse_rational, BigInt, BigRational};
use hankel_core::catalog::{self, CatalogParams, ENTRY_KINDS};
use hankel_core::closedform::{self, cross_check, d_reciprocal, CrossCheck, EvalOutcome, Strategy};
use hankel_core::detector::{
    analyze_with_budget, default_bound, render_text, transform_sequence, Verdict,
};
use hankel_core::hankel::TransformValue;
use hankel_core::recurrence::{
    make_spec, random_small_spec, reciprocal_spec, window, RecurrenceSpec, SequenceWindow,
};
use hankel_core::{arith, Error};

use config::{CliConfig, Format};

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SINGULAR: u8 = 3;
const EXIT_NO_PRODUCT_FORM: u8 = 4;
const EXIT_INCONCLUSIVE: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "hankel",
    version,
    about = "Exact generalized Hankel transforms of hypergeometric-type sequences"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key=value file with defaults for format, bound, budget, jobs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Pollard-rho iterations per composite before giving up.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads for grid commands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    #[arg(short = 'a', long, allow_hyphen_values = true, value_parser = rational)]
    alpha: BigRational,
    #[arg(short = 'b', long, allow_hyphen_values = true, value_parser = rational)]
    beta: BigRational,
    #[arg(short = 'g', long, allow_hyphen_values = true, value_parser = rational)]
    gamma: BigRational,
    #[arg(long, allow_hyphen_values = true, value_parser = rational, default_value = "1")]
    a0: BigRational,
}

impl SpecArgs {
    fn spec(&self) -> Result<RecurrenceSpec, Error> {
        make_spec(
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.a0.clone(),
        )
    }
}

#[derive(Args, Debug, Clone)]
struct OptionalSpecArgs {
    #[arg(short = 'a', long, allow_hyphen_values = true, value_parser = rational)]
    alpha: Option<BigRational>,
    #[arg(short = 'b', long, allow_hyphen_values = true, value_parser = rational)]
    beta: Option<BigRational>,
    #[arg(short = 'g', long, allow_hyphen_values = true, value_parser = rational)]
    gamma: Option<BigRational>,
    #[arg(long, allow_hyphen_values = true, value_parser = rational)]
    a0: Option<BigRational>,
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = rational)]
    lambda: Option<BigRational>,
    #[arg(long, allow_hyphen_values = true, value_parser = rational)]
    mu: Option<BigRational>,
    #[arg(long)]
    m: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> CatalogParams {
        CatalogParams {
            lambda: self.lambda.clone(),
            mu: self.mu.clone(),
            m: self.m,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MethodArg {
    Closed,
    Bareiss,
    Condensation,
    Auto,
}

impl From<MethodArg> for Strategy {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Closed => Strategy::Closed,
            MethodArg::Bareiss => Strategy::Bareiss,
            MethodArg::Condensation => Strategy::Condensation,
            MethodArg::Auto => Strategy::Auto,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a_0 … a_{count-1}.
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short = 'c', long)]
        count: usize,
    },
    /// Evaluate d_n^(k).
    Transform {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'k', default_value_t = 0)]
        k: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Compare the closed form with both determinant oracles over a grid.
    Verify {
        #[command(flatten)]
        spec: OptionalSpecArgs,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// Check this many random specs instead of the one given.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Named sequences with simplified transform formulas.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// d_n^(k) of the sequence of reciprocals 1/a_n.
    Reciprocal {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'k', default_value_t = 0)]
        k: usize,
    },
    /// Factor d_1^(k) … d_{n_max}^(k) and look for large primes.
    Detect {
        /// JSON array of "p/q" terms starting at a_0.
        #[arg(long, conflicts_with_all = ["alpha", "beta", "gamma", "a0"])]
        terms_file: Option<PathBuf>,
        #[command(flatten)]
        spec: OptionalSpecArgs,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(short = 'k', default_value_t = 0)]
        k: usize,
        /// Smoothness bound; defaults to 1000*(2*n_max+k+2)^2.
        #[arg(long)]
        bound: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// List entry names.
    List,
    /// Evaluate an entry's simplified formula and the principal identity.
    Eval {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'k', default_value_t = 0)]
        k: usize,
    },
    /// Check an entry against the determinant oracle over a grid.
    Verify {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
    },
}

fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularDenominator { .. } => EXIT_SINGULAR,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

struct Ctx {
    format: Format,
    budget: u64,
    bound: Option<BigInt>,
}

impl Ctx {
    fn json(&self) -> bool {
        self.format == Format::Json
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match &cli.config {
        Some(path) => CliConfig::load(path).map_err(input_error)?,
        None => CliConfig::default(),
    };
    let detect_bound = match &cli.command {
        Command::Detect { bound: Some(b), .. } => Some(
            BigInt::from_str(b.trim()).map_err(|_| input_error(format!("invalid bound {b:?}")))?,
        ),
        _ => None,
    };
    let cfg = file.merged_with(CliConfig {
        format: cli.format,
        bound: detect_bound,
        budget: cli.budget,
        jobs: cli.jobs,
    });
    if let Some(jobs) = cfg.jobs {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let ctx = Ctx {
        format: cfg.format.unwrap_or_default(),
        budget: cfg.budget.unwrap_or(arith::DEFAULT_FACTOR_BUDGET),
        bound: cfg.bound,
    };

    match cli.command {
        Command::Gen { spec, count } => cmd_gen(&ctx, &spec.spec()?, count),
        Command::Transform { spec, n, k, method } => {
            cmd_transform(&ctx, &spec.spec()?, n, k, method.into())
        }
        Command::Verify {
            spec,
            n_max,
            k_max,
            random,
            seed,
        } => cmd_verify(&ctx, &spec, n_max, k_max, random, seed),
        Command::Catalog { action } => cmd_catalog(&ctx, action),
        Command::Reciprocal { spec, n, k } => cmd_reciprocal(&ctx, &spec.spec()?, n, k),
        Command::Detect {
            terms_file,
            spec,
            n_max,
            k,
            ..
        } => cmd_detect(&ctx, terms_file, &spec, n_max, k),
    }
}

fn outcome_json(o: &EvalOutcome) -> serde_json::Value {
    match o {
        EvalOutcome::Value(v) => json!(format_rational(v)),
        EvalOutcome::Singular(s) => json!({ "singular": s.to_string() }),
    }
}

fn outcome_text(o: &EvalOutcome) -> String {
    match o {
        EvalOutcome::Value(v) => format_rational(v),
        EvalOutcome::Singular(s) => format!("singular ({s})"),
    }
}

fn print_value(ctx: &Ctx, v: &TransformValue) {
    if ctx.json() {
        println!("{}", serde_json::to_string(v).expect("serializes"));
    } else {
        let note = if v.fallback { " (fallback)" } else { "" };
        println!("{}  [{}{}]", format_rational(&v.value), v.method, note);
    }
}

fn cmd_gen(ctx: &Ctx, spec: &RecurrenceSpec, count: usize) -> Result<u8, Failure> {
    let w = window(spec, 0, count);
    if ctx.json() {
        println!("{}", w.to_json());
    } else {
        let terms: Vec<String> = w.terms.iter().map(format_rational).collect();
        println!("{}", terms.join(" "));
    }
    Ok(0)
}

fn cmd_transform(
    ctx: &Ctx,
    spec: &RecurrenceSpec,
    n: usize,
    k: usize,
    strategy: Strategy,
) -> Result<u8, Failure> {
    let v = closedform::transform(spec, n, k, strategy)?;
    print_value(ctx, &v);
    Ok(0)
}

fn cross_check_json(spec: &RecurrenceSpec, cells: &[CrossCheck]) -> serde_json::Value {
    json!({
        "spec": serde_json::to_value(spec).expect("serializes"),
        "cells": cells.iter().map(|c| json!({
            "n": c.n,
            "k": c.k,
            "closed": outcome_json(&c.closed),
            "bareiss": format_rational(&c.bareiss),
            "condensation": format_rational(&c.condensation),
            "agree": c.agrees(),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_verify(
    ctx: &Ctx,
    spec: &OptionalSpecArgs,
    n_max: usize,
    k_max: usize,
    random: Option<usize>,
    seed: u64,
) -> Result<u8, Failure> {
    let specs: Vec<RecurrenceSpec> = match random {
        Some(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| random_small_spec(&mut rng)).collect()
        }
        None => vec![required_spec(spec)?
            .ok_or_else(|| input_error("verify needs --alpha/--beta/--gamma or --random"))?],
    };
    let mut all_agree = true;
    let mut docs = Vec::new();
    for s in &specs {
        let cells = cross_check(s, n_max, k_max);
        let bad = cells.iter().filter(|c| !c.agrees()).count();
        let singular = cells.iter().filter(|c| c.closed.is_singular()).count();
        all_agree &= bad == 0;
        if ctx.json() {
            docs.push(cross_check_json(s, &cells));
        } else if random.is_some() {
            println!(
                "{s}: {} cells, {bad} mismatches, {singular} singular",
                cells.len()
            );
        } else {
            for c in &cells {
                println!(
                    "{}  {}",
                    c.describe(),
                    if c.agrees() { "ok" } else { "MISMATCH" }
                );
            }
        }
    }
    if ctx.json() {
        let doc = json!({ "all_agree": all_agree, "specs": docs });
        println!("{doc}");
    } else {
        println!(
            "{}",
            if all_agree {
                "all agree"
            } else {
                "MISMATCH FOUND"
            }
        );
    }
    Ok(if all_agree { 0 } else { EXIT_MISMATCH })
}

/// `Some(spec)` when α, β, γ are all given, `None` when none are.
fn required_spec(args: &OptionalSpecArgs) -> Result<Option<RecurrenceSpec>, Failure> {
    match (&args.alpha, &args.beta, &args.gamma) {
        (None, None, None) if args.a0.is_none() => Ok(None),
        (Some(a), Some(b), Some(g)) => {
            let a0 = args.a0.clone().unwrap_or_else(|| arith::int(1));
            Ok(Some(make_spec(a.clone(), b.clone(), g.clone(), a0)?))
        }
        _ => Err(input_error(
            "--alpha, --beta and --gamma must be given together",
        )),
    }
}

fn cmd_catalog(ctx: &Ctx, action: CatalogAction) -> Result<u8, Failure> {
    match action {
        CatalogAction::List => {
            if ctx.json() {
                let names: Vec<_> = ENTRY_KINDS
                    .iter()
                    .map(|k| json!({"name": k.name(), "sequence": k.sequence(), "params": k.required_params()}))
                    .collect();
                println!("{}", json!(names));
            } else {
                for kind in ENTRY_KINDS {
                    let params = kind.required_params();
                    let params = if params.is_empty() {
                        String::new()
                    } else {
                        format!("  (params: {})", params.join(", "))
                    };
                    println!("{:<28} {}{}", kind.name(), kind.sequence(), params);
                }
            }
            Ok(0)
        }
        CatalogAction::Eval { name, params, n, k } => {
            let e = catalog::entry(&name, params.params())?;
            let simplified = e.eval_simplified(n, k);
            let principal = e.eval_principal(n, k);
            let reciprocal = e.base.as_ref().map(|b| d_reciprocal(b, n, k)).transpose()?;
            if ctx.json() {
                let mut doc = json!({
                    "entry": e.name(),
                    "n": n,
                    "k": k,
                    "spec": serde_json::to_value(&e.spec).expect("serializes"),
                    "simplified": outcome_json(&simplified),
                    "principal": outcome_json(&principal),
                });
                if let Some(r) = &reciprocal {
                    doc["reciprocal"] = outcome_json(r);
                }
                println!("{doc}");
            } else {
                println!("simplified: {}", outcome_text(&simplified));
                println!("principal:  {}", outcome_text(&principal));
                if let Some(r) = &reciprocal {
                    println!("reciprocal: {}", outcome_text(r));
                }
                println!("spec:       {}", e.spec);
            }
            Ok(0)
        }
        CatalogAction::Verify {
            name,
            params,
            n_max,
            k_max,
        } => {
            let e = catalog::entry(&name, params.params())?;
            let report = catalog::verify_entry(&e, n_max, k_max);
            let ok = report.all_agree();
            if ctx.json() {
                let cells: Vec<_> = report
                    .cells
                    .iter()
                    .map(|c| {
                        json!({
                            "n": c.n,
                            "k": c.k,
                            "simplified": outcome_json(&c.simplified),
                            "principal": outcome_json(&c.principal),
                            "reciprocal": c.reciprocal.as_ref().map(outcome_json),
                            "oracle": format_rational(&c.oracle),
                            "agree": c.agrees(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({"entry": e.name(), "all_agree": ok, "cells": cells})
                );
            } else {
                for c in &report.cells {
                    println!(
                        "n={} k={} simplified={} principal={} oracle={}  {}",
                        c.n,
                        c.k,
                        outcome_text(&c.simplified),
                        outcome_text(&c.principal),
                        format_rational(&c.oracle),
                        if c.agrees() { "ok" } else { "MISMATCH" }
                    );
                }
                println!("{}", if ok { "all agree" } else { "MISMATCH FOUND" });
            }
            Ok(if ok { 0 } else { EXIT_MISMATCH })
        }
    }
}

fn cmd_reciprocal(ctx: &Ctx, spec: &RecurrenceSpec, n: usize, k: usize) -> Result<u8, Failure> {
    let derived = if spec.alpha() == &arith::int(0) {
        None
    } else {
        Some(reciprocal_spec(spec)?)
    };
    let value = d_reciprocal(spec, n, k)?;
    if ctx.json() {
        let doc = json!({
            "n": n,
            "k": k,
            "reciprocal_spec": derived.as_ref().map(|s| serde_json::to_value(s).expect("serializes")),
            "value": outcome_json(&value),
        });
        println!("{doc}");
    } else {
        if let Some(s) = &derived {
            println!("reciprocal spec: {s}");
        }
        println!("{}", outcome_text(&value));
    }
    Ok(if value.is_singular() {
        EXIT_SINGULAR
    } else {
        0
    })
}

fn cmd_detect(
    ctx: &Ctx,
    terms_file: Option<PathBuf>,
    spec: &OptionalSpecArgs,
    n_max: usize,
    k: usize,
) -> Result<u8, Failure> {
    let terms = match terms_file {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            SequenceWindow::from_json(&text)?
        }
        None => {
            let spec = required_spec(spec)?.ok_or_else(|| {
                input_error("detect needs --terms-file or --alpha/--beta/--gamma")
            })?;
            window(&spec, 0, k + 2 * n_max - 1)
        }
    };
    let values = transform_sequence(&terms, n_max, k)?;
    let bound = ctx.bound.clone().unwrap_or_else(|| default_bound(n_max, k));
    let verdict = analyze_with_budget(&values, &bound, ctx.budget);
    if ctx.json() {
        println!("{}", serde_json::to_string(&verdict).expect("serializes"));
    } else {
        print!("{}", render_text(&verdict));
    }
    Ok(match verdict.verdict {
        Verdict::ProductFormPlausible => 0,
        Verdict::NoProductFormLikely => EXIT_NO_PRODUCT_FORM,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}
