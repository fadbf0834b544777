use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ksupplier::generate::InstanceGenerator;
use ksupplier::graph::{SeparationMode, EXACT_SEPARATION_CAP};
use ksupplier::hardness::{self, Formula, GadgetInstance};
use ksupplier::instance::APPROX_RATIO;
use ksupplier::outliers::{self, OutlierOptions, RoundOrCut};
use ksupplier::priority::{self, build_supplier_graph, select_representatives};
use ksupplier::{baseline, oracle, Error, Instance, ScaledInstance, Tolerance};

#[derive(Parser)]
#[command(name = "ksupplier", version, about = "Euclidean k-supplier approximation, oracles and hardness gadgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Priority k-supplier, (1+√3)-approximation.
    Priority(SolveArgs),
    /// k-supplier with outliers by round-or-cut, (1+√3)-approximation.
    Outliers(OutlierArgs),
    /// Classical greedy 3-approximation (priorities respected, outliers ignored).
    Baseline(SolveArgs),
    /// Exhaustive optimum.
    Oracle(OracleArgs),
    /// 1-in-3-SAT hardness gadgets.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Seeded random instance.
    Gen(GenArgs),
    /// Validate an instance, run every solver and check their guarantees.
    Check(CheckArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Also run the exhaustive oracle and report the ratio.
    #[arg(long)]
    compare: bool,
    /// Write the final edge-cover graph in DOT format.
    #[arg(long)]
    debug_graph: Option<PathBuf>,
}

#[derive(Args)]
struct OutlierArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long, default_value = "exact")]
    mode: SeparationMode,
    /// Round-or-cut iterations per radius guess.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Separation cap on the number of representatives in exact mode.
    #[arg(long, default_value_t = EXACT_SEPARATION_CAP)]
    separation_cap: usize,
    /// Write one JSON line per round-or-cut iteration.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Priority,
    Outliers,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "priority")]
    problem: Problem,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Build the gadget of a DIMACS-like formula (three literals per clause).
    Build {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
    },
    /// Objective and matroid feasibility of a supplier selection.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        chosen: Vec<usize>,
    },
    /// Decode the assignment of an objective-1 selection.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        chosen: Vec<usize>,
    },
    /// Exhaustive optimum over all independent selections.
    Brute {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    suppliers: usize,
    #[arg(long, default_value_t = 8)]
    clients: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    ell: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 10.0)]
    side: f64,
    /// Priority range `LO,HI`; omitted means all priorities are 1.
    #[arg(long, value_delimiter = ',')]
    priorities: Option<Vec<f64>>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// A JSON result of `priority`, `outliers` or `baseline` to re-verify.
    #[arg(long)]
    solution: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

enum Failure {
    Error(Error),
    /// Certified FAIL with a JSON payload for stdout.
    Certified(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CliResult = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Error> {
    Instance::from_json(&read(path)?)
}

fn tolerance(x: f64) -> Result<Tolerance, Error> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Input(format!("tolerance must be a finite nonnegative number, got {x}")));
    }
    Ok(Tolerance(x))
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn with_ratio(mut out: Value, objective: f64, opt: Option<f64>) -> Value {
    if let Some(opt) = opt {
        out["opt"] = json!(opt);
        out["ratio"] = json!(if opt > 0.0 { objective / opt } else if objective == 0.0 { 1.0 } else { f64::INFINITY });
        out["ratio_bound"] = json!(APPROX_RATIO);
    }
    out
}

fn run_priority(args: &SolveArgs) -> CliResult {
    let inst = load_instance(&args.input)?;
    let tol = tolerance(args.tolerance)?;
    let guess = priority::approximate(&inst, tol)?;
    let sol = &guess.solution;
    if let Some(path) = &args.debug_graph {
        let scaled = ScaledInstance::new(&inst, guess.radius, tol)?;
        let graph = build_supplier_graph(&scaled, &select_representatives(&scaled)).graph;
        write(path, &graph.to_dot())?;
    }
    let objective = inst.priority_objective(&sol.suppliers);
    let out = json!({
        "problem": "priority",
        "objective": objective,
        "radius": guess.radius,
        "suppliers": sol.suppliers,
        "representatives": sol.reps.reps,
        "crowded_suppliers": sol.crowded_suppliers,
        "probes": guess.probes,
    });
    let opt = args.compare.then(|| oracle::opt_priority(&inst)).transpose()?.map(|o| o.value);
    Ok(with_ratio(out, objective, opt))
}

fn run_outliers(args: &OutlierArgs) -> CliResult {
    let inst = load_instance(&args.solve.input)?;
    let opts = OutlierOptions {
        mode: args.mode,
        separation_cap: args.separation_cap,
        max_iters: args.max_iters,
        tol: tolerance(args.solve.tolerance)?,
    };
    let report = outliers::approximate(&inst, &opts)?;
    if let Some(path) = &args.transcript {
        let mut buf = Vec::new();
        report.write_transcript(&mut buf).expect("writing to memory");
        write(path, &String::from_utf8(buf).expect("JSON is UTF-8"))?;
    }
    let probes: Vec<(f64, bool)> = report.runs.iter().map(|r| (r.radius, r.solution().is_some())).collect();
    let (Some(radius), Some(sol)) = (report.radius, &report.solution) else {
        let last = report.runs.last().expect("at least one probe");
        let certificate = match &last.outcome {
            RoundOrCut::Infeasible { certificate } => to_value(certificate),
            RoundOrCut::Solved(_) => Value::Null,
        };
        return Err(Failure::Certified(json!({
            "problem": "outliers",
            "status": "infeasible",
            "radius": last.radius,
            "certificate": certificate,
            "cuts": to_value(last.pool.cuts()),
            "probes": probes,
        })));
    };
    if let Some(path) = &args.solve.debug_graph {
        let scaled = ScaledInstance::new(&inst, radius, opts.tol)?;
        write(path, &outliers::build_outlier_graph(&scaled, &sol.reps).to_dot())?;
    }
    let objective = inst.outlier_objective(&sol.suppliers, &sol.outliers);
    let out = json!({
        "problem": "outliers",
        "objective": objective,
        "radius": radius,
        "suppliers": sol.suppliers,
        "outliers": sol.outliers,
        "iterations": report.total_iterations(),
        "duplicate_cuts": report.runs.iter().map(|r| r.duplicate_cuts).sum::<usize>(),
        "probes": probes,
    });
    let opt = args.solve.compare.then(|| oracle::opt_outliers(&inst)).transpose()?.map(|o| o.value);
    Ok(with_ratio(out, objective, opt))
}

fn run_baseline(args: &SolveArgs) -> CliResult {
    let inst = load_instance(&args.input)?;
    let guess = baseline::approximate(&inst, tolerance(args.tolerance)?)?;
    let objective = inst.priority_objective(&guess.solution.suppliers);
    let out = json!({
        "problem": "baseline",
        "objective": objective,
        "radius": guess.radius,
        "suppliers": guess.solution.suppliers,
        "probes": guess.probes,
    });
    let opt = args.compare.then(|| oracle::opt_priority(&inst)).transpose()?.map(|o| o.value);
    let mut out = with_ratio(out, objective, opt);
    if opt.is_some() {
        out["ratio_bound"] = json!(3.0);
    }
    Ok(out)
}

fn run_oracle(args: &OracleArgs) -> CliResult {
    let inst = load_instance(&args.input)?;
    let (name, opt) = match args.problem {
        Problem::Priority => ("priority", oracle::opt_priority(&inst)?),
        Problem::Outliers => ("outliers", oracle::opt_outliers(&inst)?),
    };
    Ok(json!({
        "problem": name,
        "objective": opt.value,
        "suppliers": opt.suppliers,
        "outliers": opt.outliers,
    }))
}

fn run_gadget(cmd: &GadgetCommand) -> CliResult {
    match cmd {
        GadgetCommand::Build { formula, epsilon } => {
            let f = Formula::parse_dimacs(&read(formula)?)?;
            Ok(to_value(&hardness::build_gadget(&f, *epsilon)?))
        }
        GadgetCommand::Eval { input, chosen } => {
            let g = GadgetInstance::from_json(&read(input)?)?;
            Ok(to_value(&hardness::eval_solution(&g, chosen)?))
        }
        GadgetCommand::Extract { input, chosen } => {
            let g = GadgetInstance::from_json(&read(input)?)?;
            Ok(to_value(&hardness::extract_assignment(&g, chosen)?))
        }
        GadgetCommand::Brute { input } => {
            let g = GadgetInstance::from_json(&read(input)?)?;
            let bf = hardness::brute_force_optimum(&g)?;
            Ok(json!({
                "optimum": bf.optimum,
                "best": bf.best,
                "unit_solutions": bf.unit_solutions.len(),
                "satisfiable": g.formula.solve().is_some(),
            }))
        }
    }
}

fn run_gen(args: &GenArgs) -> CliResult {
    let mut gen = InstanceGenerator::new(args.suppliers, args.clients)
        .with_k(args.k)
        .with_ell(args.ell)
        .with_dim(args.dim)
        .with_side(args.side);
    if let Some(p) = &args.priorities {
        let [lo, hi] = p[..] else {
            return Err(Error::Input("--priorities takes LO,HI".into()).into());
        };
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::Input(format!("priority range {lo},{hi} must satisfy 0 < LO <= HI")).into());
        }
        gen = gen.with_priorities(lo, hi);
    }
    let inst = gen.generate_seeded(args.seed);
    inst.validate()?;
    Ok(to_value(&inst))
}

#[derive(Serialize)]
struct CheckItem {
    name: String,
    pass: bool,
    detail: String,
}

fn run_check(args: &CheckArgs) -> CliResult {
    let inst = load_instance(&args.input)?;
    let tol = tolerance(args.tolerance)?;
    let mut items = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        items.push(CheckItem {
            name: name.to_string(),
            pass,
            detail,
        })
    };
    push("instance_valid", true, inst.to_string());

    let small_priority = oracle::binomial(inst.num_suppliers(), inst.k) <= oracle::ENUMERATION_LIMIT;
    let small_outliers = small_priority
        && oracle::binomial(inst.num_suppliers(), inst.k) * oracle::binomial(inst.num_clients(), inst.ell)
            <= oracle::ENUMERATION_LIMIT;
    let has_points = inst.num_suppliers() > 0 && inst.num_clients() > 0;

    if inst.k >= 1 && has_points {
        let g = priority::approximate(&inst, tol)?;
        let obj = inst.priority_objective(&g.solution.suppliers);
        push("priority_budget", g.solution.suppliers.len() <= inst.k, format!("{} suppliers", g.solution.suppliers.len()));
        push("priority_radius_bound", obj <= APPROX_RATIO * g.radius * (1.0 + 1e-9) + 1e-12, format!("objective {obj}, radius {}", g.radius));
        if small_priority {
            let opt = oracle::opt_priority(&inst)?.value;
            push("priority_ratio", obj <= APPROX_RATIO * opt + 1e-6, format!("objective {obj}, opt {opt}"));
        }
        let b = baseline::approximate(&inst, tol)?;
        let bobj = inst.priority_objective(&b.solution.suppliers);
        push("baseline_radius_bound", bobj <= 3.0 * b.radius * (1.0 + 1e-9) + 1e-12, format!("objective {bobj}, radius {}", b.radius));
    }

    let report = outliers::approximate(&inst, &OutlierOptions { tol, ..OutlierOptions::default() })?;
    match &report.solution {
        Some(sol) => {
            let obj = inst.outlier_objective(&sol.suppliers, &sol.outliers);
            push(
                "outliers_budgets",
                sol.suppliers.len() <= inst.k && sol.outliers.len() <= inst.ell,
                format!("{} suppliers, {} outliers", sol.suppliers.len(), sol.outliers.len()),
            );
            if small_outliers {
                let opt = oracle::opt_outliers(&inst)?.value;
                push("outliers_ratio", obj <= APPROX_RATIO * opt + 1e-6, format!("objective {obj}, opt {opt}"));
            }
        }
        None => {
            let feasible = small_outliers && oracle::opt_outliers(&inst)?.value.is_finite();
            push("outliers_infeasible_certified", !feasible, "round-or-cut rejected every radius".into());
        }
    }

    if let Some(path) = &args.solution {
        let claimed: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Input(format!("bad solution JSON: {e}")))?;
        let ids = |key: &str| -> Result<Vec<usize>, Error> {
            match claimed.get(key) {
                None | Some(Value::Null) => Ok(Vec::new()),
                Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("bad `{key}`: {e}"))),
            }
        };
        let suppliers = ids("suppliers")?;
        let outliers = ids("outliers")?;
        if let Some(&bad) = suppliers.iter().find(|&&i| i >= inst.num_suppliers()) {
            return Err(Error::Input(format!("solution names supplier {bad}")).into());
        }
        if let Some(&bad) = outliers.iter().find(|&&j| j >= inst.num_clients()) {
            return Err(Error::Input(format!("solution names client {bad}")).into());
        }
        let problem = claimed.get("problem").and_then(Value::as_str).unwrap_or("priority");
        let recomputed = if problem == "outliers" {
            inst.outlier_objective(&suppliers, &outliers)
        } else {
            inst.priority_objective(&suppliers)
        };
        let stated = claimed.get("objective").and_then(Value::as_f64).unwrap_or(f64::NAN);
        push(
            "solution_objective",
            (recomputed - stated).abs() <= 1e-9 * (1.0 + recomputed.abs()),
            format!("stated {stated}, recomputed {recomputed}"),
        );
        push(
            "solution_budgets",
            suppliers.len() <= inst.k && outliers.len() <= inst.ell,
            format!("{} suppliers, {} outliers", suppliers.len(), outliers.len()),
        );
    }

    let all_pass = items.iter().all(|c| c.pass);
    let out = json!({ "pass": all_pass, "checks": items });
    if all_pass {
        Ok(out)
    } else {
        Err(Failure::Error(Error::Invariant(serde_json::to_string(&out).expect("serializes"))))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) => 2,
        Error::Infeasible(_) => 3,
        Error::Capacity(_) => 4,
        Error::Invariant(_) | Error::Lp(_) => 5,
    }
}

fn emit(v: &Value) {
    // A closed pipe downstream is not our failure.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("serializes"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Priority(a) => run_priority(a),
        Command::Outliers(a) => run_outliers(a),
        Command::Baseline(a) => run_baseline(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Gadget(c) => run_gadget(c),
        Command::Gen(a) => run_gen(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Certified(v)) => {
            emit(&v);
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("ksupplier: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
