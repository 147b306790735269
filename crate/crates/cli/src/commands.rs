use std::fs;
use std::time::Duration;

use serde_json::{json, Value};

use rainbowlab::bounds::threshold_report;
use rainbowlab::family::hyperplane;
use rainbowlab::io::{format_system, read_system, write_system};
use rainbowlab::nullsatz::{
    coeff_mod_p, sequence_from_perms, squared_coeff, sz_check, vandermonde_coeff, verify_polynomial_sequence,
    PermutationPair,
};
use rainbowlab::randmatch::{matching_count, mc_tail, random_family, sample_matching, substream, uniformity_test};
use rainbowlab::registry::Registry;
use rainbowlab::search::{find_rainbow, saturate_with, strategies, SearchOutcome};
use rainbowlab::sequence::{
    falsify_random, is_satisfying, minimal_c_search, validate_witness, SequenceSpec, Status, Verdict, VerifyOptions,
};
use rainbowlab::shift::{check_low_degree, hyperplane_core, is_compressed, normalize, shift_schedule, shift_system};
use rainbowlab::spread::{selectors, spread_system, verify_spread};
use rainbowlab::{Error, FamilySystem, SearchBudget, Universe};

use crate::args::Args;

pub const COMMAND_HELP: &str = "Commands:
  verify           exhaustive verdict for --n --k --seq
  falsify          random counterexample search for --n --k --seq [--iterations]
  minimal-c        least c with f_i = (i-1) n^(k-1) + c satisfying, for --n --k --s
  bounds           closed-form thresholds for --n --k --s
  shift            [schedule|normalize|check] on --input; --j --a --b for one shift
  saturate         grow --input to an inclusion-maximal system
  spread           spread approximation of every family of --input
  sample-matching  one random perfect matching; with --samples, a uniformity test
  concentration    tail experiment for |G ∩ M| (--alpha, --samples, --lambdas)
  nullsatz         coeff | coeff-mod | sequence | degree | verify";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CmdResult = Result<Outcome, CliError>;

pub struct Outcome {
    pub result: Value,
    /// False when a budget ran out or a random search came up empty.
    pub definitive: bool,
}

impl Outcome {
    fn done(result: Value) -> Self {
        Outcome { result, definitive: true }
    }
}

pub struct Ctx {
    pub budget: SearchBudget,
    pub workers: usize,
}

impl Ctx {
    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        let mut budget = args.max_nodes.map_or_else(SearchBudget::default, SearchBudget::nodes);
        if let Some(secs) = args.time_limit {
            let limit = Duration::try_from_secs_f64(secs).map_err(|_| {
                CliError::Usage(format!("--time-limit must be a nonnegative number of seconds, got {secs}"))
            })?;
            budget = budget.with_time_limit(limit);
        }
        Ok(Ctx { budget, workers: args.workers.max(1) })
    }
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;

    fn verbs(&self) -> &'static [&'static str] {
        &[]
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult;
}

pub fn commands() -> Registry<dyn Command> {
    let mut r: Registry<dyn Command> = Registry::new("command");
    r.register("verify", Box::new(Verify))
        .register("falsify", Box::new(Falsify))
        .register("minimal-c", Box::new(MinimalC))
        .register("bounds", Box::new(Bounds))
        .register("shift", Box::new(Shift))
        .register("saturate", Box::new(Saturate))
        .register("spread", Box::new(Spread))
        .register("sample-matching", Box::new(SampleMatching))
        .register("concentration", Box::new(Concentration))
        .register("nullsatz", Box::new(Nullsatz));
    r
}

fn need<T: Clone>(value: &Option<T>, flag: &str) -> Result<T, CliError> {
    value.clone().ok_or_else(|| CliError::Usage(format!("missing required flag {flag}")))
}

fn need_list<T: Clone>(values: &[T], flag: &str) -> Result<Vec<T>, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage(format!("missing required flag {flag}")));
    }
    Ok(values.to_vec())
}

fn universe(args: &Args) -> Result<Universe, CliError> {
    Ok(Universe::new(need(&args.n, "--n")?, need(&args.k, "--k")?)?)
}

fn input_system(args: &Args) -> Result<FamilySystem, CliError> {
    Ok(read_system(need(&args.input, "--input")?)?)
}

fn sequence(args: &Args) -> Result<SequenceSpec, CliError> {
    let u = universe(args)?;
    let seq = need_list(&args.seq, "--seq")?;
    if let Some(s) = args.s {
        if s != seq.len() {
            return Err(CliError::Usage(format!("--s {s} disagrees with {} values in --seq", seq.len())));
        }
    }
    Ok(SequenceSpec::new(u, seq)?)
}

fn verify_options(ctx: &Ctx, args: &Args) -> VerifyOptions {
    VerifyOptions {
        strategy: args.strategy.clone().unwrap_or_else(|| "backtrack".into()),
        workers: ctx.workers,
        symmetry: !args.no_symmetry,
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "status": v.status,
        "systems": v.systems,
        "nodes": v.nodes,
        "witness": v.witness.as_ref().map(format_system),
    })
}

fn write_output(args: &Args, system: &FamilySystem) -> Result<(), CliError> {
    if let Some(path) = &args.output {
        write_system(system, path)?;
    }
    Ok(())
}

fn pair(args: &Args) -> Result<PermutationPair, CliError> {
    Ok(PermutationPair::new(need_list(&args.perm_a, "--perm-a")?, need_list(&args.perm_b, "--perm-b")?)?)
}

struct Verify;

impl Command for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let spec = sequence(args)?;
        let v = is_satisfying(&spec, &ctx.budget, &verify_options(ctx, args))?;
        if let Some(w) = &v.witness {
            validate_witness(&spec, w)?;
        }
        let mut result = verdict_json(&v);
        result["vacuous"] = json!(spec.is_vacuous());
        Ok(Outcome { result, definitive: v.status != Status::Unknown })
    }
}

struct Falsify;

impl Command for Falsify {
    fn name(&self) -> &'static str {
        "falsify"
    }

    fn run(&self, _: &Ctx, args: &Args) -> CmdResult {
        let spec = sequence(args)?;
        let iterations = args.iterations.unwrap_or(1000);
        match falsify_random(&spec, args.seed, iterations) {
            Some(w) => {
                validate_witness(&spec, &w)?;
                Ok(Outcome::done(json!({
                    "status": Status::NotSatisfying,
                    "iterations": iterations,
                    "witness": format_system(&w),
                })))
            }
            None => Ok(Outcome {
                result: json!({ "status": Status::Unknown, "iterations": iterations, "witness": null }),
                definitive: false,
            }),
        }
    }
}

struct MinimalC;

impl Command for MinimalC {
    fn name(&self) -> &'static str {
        "minimal-c"
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let u = universe(args)?;
        let s = need(&args.s, "--s")?;
        let m = minimal_c_search(u, s, &ctx.budget, &verify_options(ctx, args))?;
        Ok(Outcome {
            definitive: m.c.is_some(),
            result: json!({
                "c": m.c,
                "scanned": m.scanned,
                "nodes": m.nodes,
                "witness_below": m.witness_below.as_ref().map(format_system),
            }),
        })
    }
}

struct Bounds;

impl Command for Bounds {
    fn name(&self) -> &'static str {
        "bounds"
    }

    fn run(&self, _: &Ctx, args: &Args) -> CmdResult {
        let (n, k, s) = (need(&args.n, "--n")?, need(&args.k, "--k")?, need(&args.s, "--s")?);
        if n == 0 || k == 0 || s == 0 {
            return Err(CliError::Usage("bounds needs n, k, s >= 1".into()));
        }
        let report = threshold_report(n as u64, s as u64, k as u64);
        Ok(Outcome::done(serde_json::to_value(report).expect("report serializes")))
    }
}

struct Shift;

fn system_summary(system: &FamilySystem) -> Value {
    let k = system.universe().k();
    json!({
        "sizes": system.sizes(),
        "compressed": system
            .families()
            .iter()
            .map(|f| (1..=k).all(|j| is_compressed(f, j)))
            .collect::<Vec<_>>(),
        "system": format_system(system),
    })
}

impl Command for Shift {
    fn name(&self) -> &'static str {
        "shift"
    }

    fn verbs(&self) -> &'static [&'static str] {
        &["schedule", "normalize", "check"]
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let system = input_system(args)?;
        match args.verb.as_deref().unwrap_or("schedule") {
            "schedule" => {
                let out = match (args.j, args.a, args.b) {
                    (None, None, None) => shift_schedule(&system),
                    (Some(j), Some(a), Some(b)) => shift_system(&system, j, a, b)?,
                    _ => return Err(CliError::Usage("a single shift needs all of --j, --a, --b".into())),
                };
                write_output(args, &out)?;
                Ok(Outcome::done(system_summary(&out)))
            }
            "normalize" => {
                let out = normalize(&system, &ctx.budget)?;
                write_output(args, &out)?;
                Ok(Outcome::done(system_summary(&out)))
            }
            "check" => {
                let report = check_low_degree(&system, &ctx.budget)?;
                let cores: Vec<Value> = system
                    .families()
                    .iter()
                    .map(|f| {
                        let core = hyperplane_core(f, system.s());
                        json!({
                            "t_set": core.t_set,
                            "covered": core.covered.len(),
                            "leftover": core.leftover.to_vec(),
                            "b_total": core.b_multiset.total(),
                            "leftover_bound": core.leftover_bound,
                        })
                    })
                    .collect();
                Ok(Outcome::done(json!({ "report": report, "cores": cores })))
            }
            other => Err(unknown_verb(self, other)),
        }
    }
}

fn unknown_verb(cmd: &dyn Command, verb: &str) -> CliError {
    CliError::Usage(format!("unknown verb `{verb}` for {}; expected one of: {}", cmd.name(), cmd.verbs().join(", ")))
}

struct Saturate;

impl Command for Saturate {
    fn name(&self) -> &'static str {
        "saturate"
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let system = input_system(args)?;
        let registry = strategies();
        let search = registry.resolve(args.strategy.as_deref())?;
        let mut meter = ctx.budget.meter();
        let out = saturate_with(search, &system, &mut meter)?;
        write_output(args, &out)?;
        let added: Vec<usize> = out.sizes().iter().zip(system.sizes()).map(|(a, b)| a - b).collect();
        let mut result = system_summary(&out);
        result["added"] = json!(added);
        result["nodes"] = json!(meter.local());
        Ok(Outcome::done(result))
    }
}

struct Spread;

impl Command for Spread {
    fn name(&self) -> &'static str {
        "spread"
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let system = input_system(args)?;
        let registry = selectors();
        let selector = registry.resolve(args.selector.as_deref())?;
        let results = spread_system(&system, args.r_override, selector)?;
        let no_rainbow = match find_rainbow(&system, &ctx.budget) {
            SearchOutcome::Found(_) => Some(false),
            SearchOutcome::NoneExists => Some(true),
            SearchOutcome::BudgetExhausted => None,
        };
        let peers = (no_rainbow == Some(true)).then_some(results.as_slice());
        let checks: Vec<Value> = system
            .families()
            .iter()
            .zip(&results)
            .map(|(f, r)| {
                let c = verify_spread(f, r, system.s(), peers);
                let mut v = serde_json::to_value(&c).expect("check serializes");
                v["passed"] = json!(c.passed());
                v
            })
            .collect();
        Ok(Outcome::done(json!({
            "selector": selector.name(),
            "system_has_no_rainbow_matching": no_rainbow,
            "results": results,
            "checks": checks,
        })))
    }
}

struct SampleMatching;

impl Command for SampleMatching {
    fn name(&self) -> &'static str {
        "sample-matching"
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let u = universe(args)?;
        let m = sample_matching(u, &mut substream(args.seed, 0));
        let mut result = json!({
            "perms": m.perms(),
            "members": m.members(),
            "rank": m.rank(),
            "matching_count": matching_count(u.n(), u.k()).to_string(),
        });
        if let Some(samples) = args.samples {
            let report = uniformity_test(u, samples, args.seed, ctx.workers)?;
            result["uniformity"] = serde_json::to_value(report).expect("report serializes");
        }
        Ok(Outcome::done(result))
    }
}

struct Concentration;

impl Command for Concentration {
    fn name(&self) -> &'static str {
        "concentration"
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let samples = args.samples.unwrap_or(20_000);
        let lambdas = if args.lambdas.is_empty() { vec![2.0, 4.0, 6.0, 8.0] } else { args.lambdas.clone() };
        let g = match &args.input {
            Some(path) => read_system(path)?.family(0).clone(),
            None => {
                let alpha = args.alpha.unwrap_or(0.2);
                random_family(universe(args)?, alpha, &mut substream(args.seed, u64::MAX))?
            }
        };
        let u = g.universe();
        let report = mc_tail(&g, samples, &lambdas, args.seed, ctx.workers)?;
        let h = mc_tail(&hyperplane(u, 1, 1)?, samples, &lambdas, args.seed, ctx.workers)?;
        if let Some(path) = &args.output {
            fs::write(path, report.to_csv())
                .map_err(|source| CliError::Core(Error::Io { path: path.clone(), source }))?;
        }
        Ok(Outcome::done(json!({
            "within_bound_3se": report.within_bound(3.0),
            "hyperplane_count_min": h.count_min,
            "hyperplane_count_max": h.count_max,
            "tail": report,
        })))
    }
}

struct Nullsatz;

impl Command for Nullsatz {
    fn name(&self) -> &'static str {
        "nullsatz"
    }

    fn verbs(&self) -> &'static [&'static str] {
        &["coeff", "coeff-mod", "sequence", "degree", "verify"]
    }

    fn run(&self, ctx: &Ctx, args: &Args) -> CmdResult {
        let verb = args.verb.as_deref().ok_or_else(|| unknown_verb(self, "<none>"))?;
        match verb {
            "coeff" => {
                let e = need_list(&args.exponents, "--exponents")?;
                let c = squared_coeff(&e);
                Ok(Outcome::done(json!({
                    "exponents": e,
                    "squared_coeff": c.value.to_string(),
                    "witness": c.witness.map(|(a, b)| json!({ "a": a, "b": b })),
                    "vandermonde_coeff": vandermonde_coeff(&e),
                })))
            }
            "coeff-mod" => {
                let e = need_list(&args.exponents, "--exponents")?;
                let p = need(&args.mod_p, "--mod-p")?;
                let r = coeff_mod_p(&e, p)?;
                Ok(Outcome::done(json!({ "exponents": e, "p": p, "residue": r, "nonzero": r != 0 })))
            }
            "sequence" => {
                let (spec, provenance) = sequence_from_perms(need(&args.n, "--n")?, &pair(args)?)?;
                Ok(Outcome::done(json!({ "thresholds": spec.thresholds(), "provenance": provenance })))
            }
            "degree" => {
                let system = input_system(args)?;
                let rows = system
                    .families()
                    .iter()
                    .map(|f| sz_check(f).map(|r| serde_json::to_value(r).expect("report serializes")))
                    .collect::<Result<Vec<_>, Error>>()?;
                Ok(Outcome::done(json!({ "families": rows })))
            }
            "verify" => {
                let n = need(&args.n, "--n")?;
                let (v, provenance) =
                    verify_polynomial_sequence(n, &pair(args)?, &ctx.budget, &verify_options(ctx, args))?;
                let mut result = verdict_json(&v);
                result["provenance"] = serde_json::to_value(provenance).expect("provenance serializes");
                Ok(Outcome { result, definitive: v.status != Status::Unknown })
            }
            other => Err(unknown_verb(self, other)),
        }
    }
}
