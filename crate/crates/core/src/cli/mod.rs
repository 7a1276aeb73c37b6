//! The `hamrc` command-line front end.

pub mod format;

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{BoundKind, ErrorPlan, StepCount, StepModel, DEFAULT_GLOBAL_C};
use crate::dense::{dense_of_expansion, distance, evaluate_schedule, expm_hermitian, DenseConfig, DenseOp, DEFAULT_DENSE_CAP};
use crate::error::Error;
use crate::local::LocalLayer;
use crate::pauli::{is_entangling, CouplingGraph, HamExpansion};
use crate::program::Program;
use crate::route::{compile_remote, RemotePlan, SegmentKind};
use crate::schedule::{Schedule, ScheduleBuilder};
use crate::synth::{cnot_generator, Order};

use format::{parse_hamiltonian, parse_schedule, write_schedule, Report};

/// Environment variable overriding the dense verification cap.
pub const DENSE_CAP_ENV: &str = "HAMRC_DENSE_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_CONNECTED: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "hamrc", version, about = "Simulate two-body Hamiltonians with a fixed drift and local unitaries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a Hamiltonian file and report its coupling graph.
    Check {
        hamfile: PathBuf,
    },
    /// Compile a target evolution into a schedule.
    Compile(CompileArgs),
    /// Measure the error of a schedule against its target.
    Verify(VerifyArgs),
    /// Tabulate the analytic bounds for a step size.
    Bound(BoundArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Gate {
    Cnot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Auto,
    FirstOrderCnot,
    SecondOrderCnot,
    Global,
    Chained,
    Empirical,
}

#[derive(Args, Debug, Clone)]
pub struct TargetArgs {
    /// Two-qubit target Hamiltonian file.
    #[arg(long, conflicts_with = "gate", required_unless_present = "gate")]
    pub target: Option<PathBuf>,
    /// Built-in gate target.
    #[arg(long, value_enum)]
    pub gate: Option<Gate>,
    /// Evolution time (defaults to π/4 for gates, 1 otherwise).
    #[arg(long)]
    pub t: Option<f64>,
    /// Qubits the target acts on; routed through SWAPs when not coupled.
    #[arg(long, num_args = 2, value_names = ["K", "L"], conflicts_with = "principal")]
    pub pair: Option<Vec<usize>>,
    /// Principal pair for a direct (unrouted) compilation; must be coupled.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub principal: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    pub hamfile: PathBuf,
    #[command(flatten)]
    pub target: TargetArgs,
    /// Accuracy target; the step count is planned from `--bound`.
    #[arg(long, conflicts_with = "steps", required_unless_present = "steps")]
    pub epsilon: Option<f64>,
    /// Fixed Trotter step count.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
    #[arg(long, value_enum, default_value_t = BoundArg::Auto)]
    pub bound: BoundArg,
    /// Constant of the global bound.
    #[arg(long = "C", default_value_t = DEFAULT_GLOBAL_C)]
    pub c: f64,
    /// Write the schedule here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Skip dense measurement of the compiled schedule.
    #[arg(long)]
    pub no_measure: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub hamfile: PathBuf,
    pub schedule: PathBuf,
    #[command(flatten)]
    pub target: TargetArgs,
    /// Judge the phase-aligned distance instead of the strict one.
    #[arg(long)]
    pub phase_align: bool,
    /// Exit with a verification failure when the judged distance exceeds this.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    pub hamfile: PathBuf,
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
    #[arg(long = "C", default_value_t = DEFAULT_GLOBAL_C)]
    pub c: f64,
}

/// Failures carry their exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::NotTwoBody(_) => EXIT_PARSE,
            Error::NotCoupled(..) | Error::NotConnected(..) => EXIT_NOT_CONNECTED,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn other(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_OTHER, message: message.into() }
}

/// Dense cap from `HAMRC_DENSE_CAP`, or the default.
pub fn dense_config_from_env() -> CliResult<DenseConfig> {
    match std::env::var(DENSE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|cap| DenseConfig { cap })
            .map_err(|_| other(format!("{DENSE_CAP_ENV} must be a non-negative integer, got '{v}'"))),
        Err(_) => Ok(DenseConfig { cap: DEFAULT_DENSE_CAP }),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| other(format!("{}: {e}", path.display())))
}

fn load_hamiltonian(path: &Path) -> CliResult<HamExpansion> {
    parse_hamiltonian(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// Output of a command: text for standard output plus an exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Outcome {
    let config = match dense_config_from_env() {
        Ok(c) => c,
        Err(f) => return Outcome { stderr: format!("error: {}\n", f.message), code: f.code, ..Default::default() },
    };
    let result = match cli.command {
        Command::Check { hamfile } => cmd_check(&hamfile),
        Command::Compile(a) => cmd_compile(&a, &config),
        Command::Verify(a) => cmd_verify(&a, &config),
        Command::Bound(a) => cmd_bound(&a, &config),
    };
    match result {
        Ok(o) => o,
        Err(f) => Outcome { stderr: format!("error: {}\n", f.message), code: f.code, ..Default::default() },
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out = run(cli);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    out.code
}

pub fn cmd_check(hamfile: &Path) -> CliResult<Outcome> {
    let h = load_hamiltonian(hamfile)?;
    let graph = CouplingGraph::new(&h)?;
    let verdict = is_entangling(&h)?;
    let mut r = Report::new();
    r.push("qubits", h.n());
    r.push("terms", h.len());
    r.push("two_body", true);
    let edges: Vec<String> = graph.edges().map(|(a, b)| format!("{a}-{b}")).collect();
    r.push("edges", if edges.is_empty() { "none".to_string() } else { edges.join(" ") });
    r.push("entangling", verdict.entangling);
    let comps: Vec<String> = verdict
        .components
        .iter()
        .map(|c| format!("{{{}}}", c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    r.push("components", comps.join(" | "));
    Ok(Outcome {
        stdout: r.to_string(),
        code: if verdict.entangling { EXIT_OK } else { EXIT_NOT_CONNECTED },
        ..Default::default()
    })
}

/// What to simulate: the generator, time and any exact local tail.
struct Target {
    /// Two-qubit Hamiltonian simulated by the drift.
    k: HamExpansion,
    t: f64,
    /// `exp(-i t · tail)` applied exactly afterwards, with its own phase.
    tail: Option<HamExpansion>,
    /// Full generator whose exponential is the intended unitary.
    generator: HamExpansion,
    is_cnot: bool,
}

fn load_target(args: &TargetArgs) -> CliResult<Target> {
    match (&args.target, args.gate) {
        (_, Some(Gate::Cnot)) => {
            if args.t.is_some_and(|t| t != FRAC_PI_4) {
                return Err(other("--gate cnot fixes t = π/4"));
            }
            Ok(Target {
                k: HamExpansion::from_labels(&[("ZX", -1.0)])?,
                t: FRAC_PI_4,
                tail: Some(HamExpansion::from_labels(&[("IX", 1.0), ("ZI", 1.0)])?),
                generator: cnot_generator(),
                is_cnot: true,
            })
        }
        (Some(path), None) => {
            let k = load_hamiltonian(path)?;
            if k.n() != 2 {
                return Err(Error::InvalidTerm(format!("target must act on two qubits, got {}", k.n())).into());
            }
            Ok(Target { generator: k.clone(), k, t: args.t.unwrap_or(1.0), tail: None, is_cnot: false })
        }
        (None, None) => Err(other("one of --target or --gate is required")),
    }
}

enum Placement {
    Direct([usize; 2]),
    Routed([usize; 2]),
}

fn placement(args: &TargetArgs, n: usize) -> CliResult<Placement> {
    let pair = |v: &Vec<usize>| -> CliResult<[usize; 2]> {
        match v[..] {
            [a, b] if a != b && a < n && b < n => Ok([a, b]),
            _ => Err(other(format!("invalid qubit pair {v:?} for {n} qubits"))),
        }
    };
    match (&args.principal, &args.pair) {
        (Some(p), _) => Ok(Placement::Direct(pair(p)?)),
        (None, Some(p)) => Ok(Placement::Routed(pair(p)?)),
        (None, None) if n == 2 => Ok(Placement::Direct([0, 1])),
        (None, None) => Err(other("registers of more than two qubits need --pair or --principal")),
    }
}

fn bound_kind(arg: BoundArg, c: f64, order: Order, target: &Target, routed: bool) -> CliResult<BoundKind> {
    let kind = match arg {
        BoundArg::Auto if target.is_cnot && !routed => match order {
            Order::First => BoundKind::FirstOrderCnot,
            Order::Second => BoundKind::SecondOrderCnot,
        },
        BoundArg::Auto => BoundKind::Chained,
        BoundArg::FirstOrderCnot => BoundKind::FirstOrderCnot,
        BoundArg::SecondOrderCnot => BoundKind::SecondOrderCnot,
        BoundArg::Global => BoundKind::Global { c },
        BoundArg::Chained => BoundKind::Chained,
        BoundArg::Empirical => BoundKind::Empirical,
    };
    if matches!(kind, BoundKind::FirstOrderCnot | BoundKind::SecondOrderCnot) && (!target.is_cnot || routed) {
        return Err(other(format!("bound {kind} applies only to a directly compiled CNOT")));
    }
    Ok(kind)
}

fn with_tail(core: &Schedule, target: &Target, pair: [usize; 2]) -> Schedule {
    match &target.tail {
        None => core.clone(),
        Some(tail) => {
            let mut b = ScheduleBuilder::new(core.n());
            b.append(core);
            b.push_layer(&LocalLayer::from_local_hamiltonian(tail, target.t).embed(core.n(), &pair));
            if target.is_cnot {
                b.add_phase(-FRAC_PI_4);
            }
            b.finish()
        }
    }
}

/// `exp(-i t G)` on the full register, and for gates the gate itself.
fn exact_unitary(h: &HamExpansion, target: &Target, pair: [usize; 2], config: &DenseConfig) -> CliResult<DenseOp> {
    config.check(h.n())?;
    let g = target.generator.embed(h.n(), &pair)?;
    let mut u = expm_hermitian(&dense_of_expansion(&g), target.t)?;
    if target.is_cnot {
        // exp(-i(π/4)G) = e^{-iπ/4} CNOT
        u = u.scaled(crate::local::C64::from_polar(1.0, FRAC_PI_4));
    }
    Ok(u)
}

fn push_plan(r: &mut Report, prefix: &str, plan: &ErrorPlan) {
    r.push(format!("{prefix}bound"), plan.bound.map_or("fixed", |b| b.name()));
    r.push(format!("{prefix}steps"), plan.steps);
    r.real(format!("{prefix}delta"), plan.delta);
    r.real(format!("{prefix}predicted_error"), plan.predicted_error);
    r.real(format!("{prefix}chained_bound"), plan.chained_bound);
    r.real(format!("{prefix}per_step_coefficient"), plan.per_step_coefficient);
}

fn push_constants(r: &mut Report, plan: &ErrorPlan) {
    if let Some(g) = plan.constants {
        r.real("constant_C", g.c);
        r.real("constant_D", g.d);
        r.real("constant_h", g.h);
        r.real("constant_k", g.k);
        r.real("constant_h_rs", g.h_rs);
        r.real("global_bound", g.c * g.d * g.d * plan.t * plan.delta);
    }
}

fn push_schedule_stats(r: &mut Report, s: &Schedule) {
    r.push("drift_period_count_raw", s.raw_drift_periods());
    r.push("drift_period_count_merged", s.drift_periods());
    r.push("local_layer_count", s.local_layer_count());
    r.push("distinct_layers", s.layers().len());
    r.real("total_drift_time", s.total_drift_time());
    r.real("global_phase", s.global_phase());
}

fn push_measurement(r: &mut Report, exact: &DenseOp, got: &DenseOp) -> CliResult<(f64, f64)> {
    let aligned = distance(exact, got, true)?;
    let strict = distance(exact, got, false)?;
    r.real("measured_error_phase_aligned", aligned);
    r.real("measured_error_strict", strict);
    Ok((aligned, strict))
}

pub fn cmd_compile(a: &CompileArgs, config: &DenseConfig) -> CliResult<Outcome> {
    let h = load_hamiltonian(&a.hamfile)?;
    let target = load_target(&a.target)?;
    let order = Order::from_u8(a.order)?;
    let place = placement(&a.target, h.n())?;
    let routed = matches!(place, Placement::Routed(_));
    let steps = match (a.epsilon, a.steps) {
        (Some(epsilon), _) => StepCount::Accuracy { epsilon, bound: bound_kind(a.bound, a.c, order, &target, routed)? },
        (None, Some(n)) => StepCount::Fixed(n),
        (None, None) => return Err(other("one of --epsilon or --steps is required")),
    };

    let mut r = Report::new();
    r.push("qubits", h.n());
    r.push("order", order.as_u8());
    r.real("t", target.t);
    let (core, pair) = match place {
        Placement::Direct(pair) => {
            let program = Program::new(&h, pair, &target.k, target.t, order)?;
            let (s, plan) = program.compile(steps, config)?;
            r.push("pair", format!("{} {}", pair[0], pair[1]));
            r.push("frames", program.frames().len());
            r.push("decoupling_rounds", program.frames().rounds());
            r.push("decoupling_formula_rounds", program.frames().formula_rounds());
            push_plan(&mut r, "", &plan);
            push_constants(&mut r, &plan);
            (s, pair)
        }
        Placement::Routed(pair) => {
            let (s, plan) = compile_remote(&h, pair[0], pair[1], &target.k, target.t, steps, order, config)?;
            r.push("pair", format!("{} {}", pair[0], pair[1]));
            push_remote(&mut r, &plan);
            // the swaps are undone by the end, so any tail acts on the endpoints
            (s, pair)
        }
    };
    let schedule = with_tail(&core, &target, pair);
    push_schedule_stats(&mut r, &schedule);

    if !a.no_measure && config.check(h.n()).is_ok() {
        let exact = exact_unitary(&h, &target, pair, config)?;
        let got = evaluate_schedule(&schedule, &h, config)?;
        push_measurement(&mut r, &exact, &got)?;
    }

    let text = write_schedule(&schedule);
    let mut out = Outcome::default();
    match &a.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| other(format!("{}: {e}", path.display())))?;
            out.stdout = r.to_string();
        }
        None => {
            out.stdout = text;
            out.stderr = r.to_string();
        }
    }
    Ok(out)
}

fn push_remote(r: &mut Report, plan: &RemotePlan) {
    r.push("path", plan.path.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    r.push("swap_segments", plan.swap_count());
    r.push("segments", plan.segments.len());
    for (i, s) in plan.segments.iter().enumerate() {
        let kind = match s.kind {
            SegmentKind::Swap => "swap",
            SegmentKind::Interaction => "interaction",
        };
        r.push(format!("segment_{i}"), format!("{kind} {} {}", s.pair[0], s.pair[1]));
        push_plan(r, &format!("segment_{i}_"), &s.plan);
    }
    r.real("predicted_error", plan.predicted_error());
    r.real("chained_bound", plan.chained_bound());
}

pub fn cmd_verify(a: &VerifyArgs, config: &DenseConfig) -> CliResult<Outcome> {
    let h = load_hamiltonian(&a.hamfile)?;
    let schedule = parse_schedule(&read(&a.schedule)?)?;
    if schedule.n() != h.n() {
        return Err(Error::DimMismatch(schedule.n(), h.n()).into());
    }
    let target = load_target(&a.target)?;
    let pair = match placement(&a.target, h.n())? {
        Placement::Direct(p) | Placement::Routed(p) => p,
    };
    let exact = exact_unitary(&h, &target, pair, config)?;
    let got = evaluate_schedule(&schedule, &h, config)?;
    let mut r = Report::new();
    r.push("qubits", h.n());
    r.push("pair", format!("{} {}", pair[0], pair[1]));
    let (aligned, strict) = push_measurement(&mut r, &exact, &got)?;
    let judged = if a.phase_align { aligned } else { strict };
    let mut code = EXIT_OK;
    if let Some(tol) = a.tolerance {
        r.real("tolerance", tol);
        let pass = judged <= tol;
        r.push("pass", pass);
        if !pass {
            code = EXIT_VERIFY;
        }
    }
    Ok(Outcome { stdout: r.to_string(), code, ..Default::default() })
}

pub fn cmd_bound(a: &BoundArgs, config: &DenseConfig) -> CliResult<Outcome> {
    let h = load_hamiltonian(&a.hamfile)?;
    let target = load_target(&a.target)?;
    let order = Order::from_u8(a.order)?;
    if !(a.delta > 0.0) || !a.delta.is_finite() {
        return Err(Error::InvalidStep(format!("step size {} must be positive", a.delta)).into());
    }
    let pair = match placement(&a.target, h.n())? {
        Placement::Direct(p) => p,
        Placement::Routed(_) => return Err(other("bound tables need a directly coupled pair (use --principal)")),
    };
    let program = Program::new(&h, pair, &target.k, target.t, order)?;
    let (t, delta) = (target.t, a.delta);
    let mut r = Report::new();
    r.push("qubits", h.n());
    r.push("order", order.as_u8());
    r.real("t", t);
    r.real("delta", delta);
    r.real("steps", t / delta);
    if target.is_cnot {
        match order {
            Order::First => r.real("first_order_cnot", 8.0 * t * delta),
            Order::Second => r.real("second_order_cnot", 0.5 * t * delta * delta),
        };
    }
    let g = program.global_constants(a.c)?;
    r.real("global", g.c * g.d * g.d * t * delta);
    let coef = program.per_step_coefficient(config)?;
    r.real("chained", coef * t * delta.powi(order.as_u8() as i32));
    r.real("per_step", coef * delta.powi(order.as_u8() as i32 + 1));
    r.real("constant_C", g.c);
    r.real("constant_D", g.d);
    r.real("constant_h", g.h);
    r.real("constant_k", g.k);
    r.real("constant_h_rs", g.h_rs);
    Ok(Outcome { stdout: r.to_string(), ..Default::default() })
}
