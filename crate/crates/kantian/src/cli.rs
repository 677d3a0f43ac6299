//! Command-line front end. Loads game and rescaling specs, dispatches
//! to the solvers, and emits deterministic JSON or CSV.
//!
//! Exit codes: 0 success, 1 solver failure, 2 usage or spec error.
//! Errors go to stderr as a single JSON object {kind, message}.

use crate::error::{Error, Result};
use crate::game::{self, Game, SolverConfig, ValidatedGame};
use crate::interaction::{self, KnEquilibrium};
use crate::mke::{self, Branch};
use crate::population;
use crate::rescale::{efficient_rescaling, Rescaling, RescalingSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "kantian",
    version,
    about = "Equilibrium solvers for symmetric two-player games: Nash and Pareto \
             landmarks, Kantian equilibria under strategy rescalings, mixed \
             Kantian-Nasher play, and population dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game against the solver assumptions
    Validate {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Nash and Pareto reference points
    Landmarks {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Kantian best-response roots against a fixed opponent
    Kbr {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        /// Opponent strategy in rescaled units
        #[arg(long, allow_negative_numbers = true)]
        z2: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Symmetric multiplicative Kantian equilibria
    Mke {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Kantian-Nasher equilibria and the focal selection
    Kn {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Type-vs-type payoff matrix
    Matrix {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stage payoffs and type-choice equilibria for a finite group
    Dynamic {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        /// Group size
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evolutionary stability of each type
    Ess {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        /// Invading fraction, in (0, 1/2)
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate the two-type replicator dynamic (CSV)
    Evolve {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        /// Initial Kantian fraction
        #[arg(long)]
        k0: f64,
        /// Integration step size
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Maximum number of steps
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the brute-force equilibrium check on a profile
    Verify {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        /// Player 1 strategy in rescaled units
        #[arg(long, allow_negative_numbers = true)]
        z1: f64,
        /// Player 2 strategy in rescaled units
        #[arg(long, allow_negative_numbers = true)]
        z2: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Best-response curves for both protocols (CSV)
    Curves {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        rescaling: RescalingArgs,
        /// Grid points along the opponent axis
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct GameArgs {
    /// Path to a game spec JSON, or builtin:<name>
    #[arg(long)]
    game: String,
}

#[derive(Args)]
struct RescalingArgs {
    /// "efficient", a parameter-free kind (identity, log, sqrt),
    /// inline JSON, or a path to a rescaling spec
    #[arg(long, default_value = "identity")]
    rescaling: String,
}

#[derive(Args)]
struct SolverArgs {
    /// Root-bisection interval tolerance
    #[arg(long)]
    tol_root: Option<f64>,
    /// Golden-section interval tolerance
    #[arg(long)]
    tol_opt: Option<f64>,
    /// Cells in coarse scans
    #[arg(long)]
    grid_points: Option<usize>,
    /// Stand-in for infinite domain bounds
    #[arg(long)]
    domain_cap: Option<f64>,
    /// Iteration budget for bisection and golden-section loops
    #[arg(long)]
    max_iter: Option<usize>,
    /// Upper end of the oracle's scale-factor grid
    #[arg(long)]
    a_grid_max: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(v) = self.tol_root {
            cfg.tol_root = v;
        }
        if let Some(v) = self.tol_opt {
            cfg.tol_opt = v;
        }
        if let Some(v) = self.grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = self.domain_cap {
            cfg.domain_cap = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.a_grid_max {
            cfg.a_grid_max = v;
        }
        cfg
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format; csv is available for evolve and curves only
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Parses argv and runs one subcommand, returning the process exit
/// code. All output side effects happen here.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.exit_code() == 0 {
                // help or version request
                print!("{}", e.render());
                return 0;
            }
            emit_error("usage", &e.render().to_string());
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            emit_error(error_kind(&e), &e.to_string());
            exit_code(&e)
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    let payload = json!({ "kind": kind, "message": message });
    let mut text = serde_json::to_string_pretty(&payload).expect("error payload serializes");
    text.push('\n');
    let _ = std::io::stderr().write_all(text.as_bytes());
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Eval(_) => "eval",
        Error::BadDomain(_) => "bad_domain",
        Error::OutsideDomain { .. } => "outside_domain",
        Error::ValidationFailed { .. } => "validation_failed",
        Error::NoInteriorNash => "no_interior_nash",
        Error::BoundaryOptimum(_) => "boundary_optimum",
        Error::NoMaximum(_) => "no_maximum",
        Error::BadRescaling(_) => "bad_rescaling",
        Error::NotMonotone => "not_monotone",
        Error::ValueNotAttained(_) => "value_not_attained",
        Error::NoSymmetricEquilibrium => "no_symmetric_equilibrium",
        Error::AmbiguousSymmetricEquilibrium(_) => "ambiguous_symmetric_equilibrium",
        Error::NoEquilibrium => "no_equilibrium",
        Error::NoEfficientMke => "no_efficient_mke",
        Error::UndefinedRole(_) => "undefined_role",
        Error::BadParameter(_) => "bad_parameter",
        Error::UnknownBuiltin(_) => "unknown_builtin",
        Error::BadSpec(_) => "bad_spec",
    }
}

/// Usage and spec problems exit 2; failures inside a solver exit 1.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::BadDomain(_)
        | Error::OutsideDomain { .. }
        | Error::ValidationFailed { .. }
        | Error::BadRescaling(_)
        | Error::NotMonotone
        | Error::UndefinedRole(_)
        | Error::BadParameter(_)
        | Error::UnknownBuiltin(_)
        | Error::BadSpec(_) => 2,
        _ => 1,
    }
}

fn load_game(spec: &str) -> Result<Game> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return game::builtin(name);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::BadSpec(format!("cannot read game spec `{spec}`: {e}")))?;
    Game::from_spec_str(&text)
}

fn load_rescaling(spec: &str, game: &ValidatedGame, cfg: &SolverConfig) -> Result<Rescaling> {
    match spec {
        "efficient" => return efficient_rescaling(game, cfg),
        "identity" => return Ok(Rescaling::identity()),
        "log" => return Ok(Rescaling::log()),
        "sqrt" => return Ok(Rescaling::sqrt()),
        _ => {}
    }
    if spec.trim_start().starts_with('{') {
        return Rescaling::from_spec_str(spec);
    }
    let path = std::path::Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadSpec(format!("cannot read rescaling spec `{spec}`: {e}")))?;
        return Rescaling::from_spec_str(&text);
    }
    Err(Error::BadSpec(format!(
        "unrecognized rescaling `{spec}`: expected `efficient`, a parameter-free kind, \
         inline JSON, or a path to a spec file"
    )))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Validate { game, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?;
            let report = game::validate_assumptions(&g, &cfg);
            let passed = report.passed;
            write_json(&out, &report)?;
            Ok(if passed { 0 } else { 2 })
        }
        Command::Landmarks { game, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let lm = game::landmarks(&g, &cfg)?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                x_nash: f64,
                u_nash: f64,
                x_pareto: f64,
                u_pareto: f64,
            }
            write_json(
                &out,
                &Out {
                    game: g.name(),
                    x_nash: lm.x_nash,
                    u_nash: lm.u_nash,
                    x_pareto: lm.x_pareto,
                    u_pareto: lm.u_pareto,
                },
            )?;
            Ok(0)
        }
        Command::Kbr { game, rescaling, z2, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let roots = mke::kantian_best_response(&g, &r, z2, &cfg)?;
            #[derive(Serialize)]
            struct Row {
                z1: f64,
                x1: f64,
                branch: Branch,
                sufficient: bool,
            }
            let rows = roots
                .iter()
                .map(|k| {
                    Ok(Row {
                        z1: k.z1,
                        x1: r.apply(k.z1)?,
                        branch: k.branch,
                        sufficient: k.sufficient,
                    })
                })
                .collect::<Result<Vec<Row>>>()?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                z2: f64,
                x2: f64,
                roots: Vec<Row>,
            }
            write_json(
                &out,
                &Out {
                    game: g.name(),
                    rescaling: r.to_spec(),
                    z2,
                    x2: r.apply(z2)?,
                    roots: rows,
                },
            )?;
            Ok(0)
        }
        Command::Mke { game, rescaling, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let equilibria = mke::solve_symmetric_mke(&g, &r, &cfg)?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                equilibria: Vec<crate::mke::MkeResult>,
            }
            write_json(
                &out,
                &Out { game: g.name(), rescaling: r.to_spec(), equilibria },
            )?;
            Ok(0)
        }
        Command::Kn { game, rescaling, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let equilibria = interaction::solve_kantian_nasher(&g, &r, &cfg)?;
            let focal = interaction::select_focal(&equilibria).ok();
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                equilibria: Vec<KnEquilibrium>,
                focal: Option<KnEquilibrium>,
            }
            write_json(
                &out,
                &Out { game: g.name(), rescaling: r.to_spec(), equilibria, focal },
            )?;
            Ok(0)
        }
        Command::Matrix { game, rescaling, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let m = interaction::build_type_matrix(&g, &r, &cfg)?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                u_kk: f64,
                u_kn: f64,
                u_nk: f64,
                u_nn: f64,
            }
            write_json(
                &out,
                &Out {
                    game: g.name(),
                    rescaling: r.to_spec(),
                    u_kk: m.u_kk,
                    u_kn: m.u_kn,
                    u_nk: m.u_nk,
                    u_nn: m.u_nn,
                },
            )?;
            Ok(0)
        }
        Command::Dynamic { game, rescaling, n, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let m = interaction::build_type_matrix(&g, &r, &cfg)?;
            let plan = population::equilibrium_stage_plan(&g, &r, &cfg)?;
            let spne = population::check_spne(n, &m)?;
            #[derive(Serialize)]
            struct StageRow {
                n_kantian: u32,
                pi_kantian: Option<f64>,
                pi_nasher: Option<f64>,
            }
            let stage = (0..=n)
                .map(|nk| {
                    let p = population::stage_payoffs(n, nk, &m)?;
                    Ok(StageRow {
                        n_kantian: nk,
                        pi_kantian: p.pi_kantian,
                        pi_nasher: p.pi_nasher,
                    })
                })
                .collect::<Result<Vec<StageRow>>>()?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                n_total: u32,
                matrix: crate::interaction::TypeGameMatrix,
                plan: population::StagePlan,
                stage: Vec<StageRow>,
                spne: population::SpneReport,
            }
            write_json(
                &out,
                &Out {
                    game: g.name(),
                    rescaling: r.to_spec(),
                    n_total: n,
                    matrix: m,
                    plan,
                    stage,
                    spne,
                },
            )?;
            Ok(0)
        }
        Command::Ess { game, rescaling, epsilon, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let m = interaction::build_type_matrix(&g, &r, &cfg)?;
            let rep = population::ess_check(&m, epsilon)?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                epsilon: f64,
                kantian_ess: bool,
                nasher_ess: bool,
                payoff_gap_at_k_high: f64,
                payoff_gap_at_k_low: f64,
            }
            write_json(
                &out,
                &Out {
                    game: g.name(),
                    rescaling: r.to_spec(),
                    epsilon,
                    kantian_ess: rep.kantian_ess,
                    nasher_ess: rep.nasher_ess,
                    payoff_gap_at_k_high: rep.payoff_gap_at_k_high,
                    payoff_gap_at_k_low: rep.payoff_gap_at_k_low,
                },
            )?;
            Ok(0)
        }
        Command::Evolve { game, rescaling, k0, dt, steps, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let m = interaction::build_type_matrix(&g, &r, &cfg)?;
            let tr = population::replicator_simulate(&m, k0, dt, steps)?;
            require_format(&out, Format::Csv)?;
            let mut text = String::new();
            let terminal = serde_json::to_value(tr.terminal).expect("terminal serializes");
            text.push_str(&format!(
                "# terminal: {}\n",
                terminal.as_str().expect("terminal is a string")
            ));
            text.push_str("t,k\n");
            for s in &tr.samples {
                text.push_str(&format!("{},{}\n", csv_num(s.t), csv_num(s.k)));
            }
            write_text(&out, &text)?;
            Ok(0)
        }
        Command::Verify { game, rescaling, z1, z2, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let v = mke::verify_mke(&g, &r, (z1, z2), &cfg)?;
            #[derive(Serialize)]
            struct Out<'a> {
                game: &'a str,
                rescaling: RescalingSpec,
                z1: f64,
                z2: f64,
                branch: Branch,
                verdict: bool,
                worst_violation: f64,
                player1_violation: f64,
                player2_violation: Option<f64>,
            }
            write_json(
                &out,
                &Out {
                    game: g.name(),
                    rescaling: r.to_spec(),
                    z1,
                    z2,
                    branch: mke::branch_of((z1, z2)),
                    verdict: v.verdict,
                    worst_violation: v.worst_violation,
                    player1_violation: v.player1_violation,
                    player2_violation: v.player2_violation,
                },
            )?;
            Ok(0)
        }
        Command::Curves { game, rescaling, points, solver, out } => {
            let cfg = solver.config();
            let g = load_game(&game.game)?.validated(&cfg)?;
            let r = load_rescaling(&rescaling.rescaling, &g, &cfg)?;
            let rows = interaction::best_response_curves(&g, &r, points, &cfg)?;
            require_format(&out, Format::Csv)?;
            let mut text = String::new();
            text.push_str("z,x,br_kantian_z,br_kantian_x,br_nasher_z,br_nasher_x\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    csv_num(row.z),
                    csv_num(row.x),
                    csv_num(row.br_kantian_z),
                    csv_num(row.br_kantian_x),
                    csv_num(row.br_nasher_z),
                    csv_num(row.br_nasher_x),
                ));
            }
            write_text(&out, &text)?;
            Ok(0)
        }
    }
}

/// Rounds to 12 significant digits so identical runs are
/// byte-identical and regressions compare cleanly against analytic
/// values.
fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let prec = digits - 1;
    format!("{v:.prec$e}").parse().expect("rounded float reparses")
}

/// Residual magnitudes are solver noise, not quantities; three digits
/// keeps them readable and stable.
const COARSE_KEYS: [&str; 4] = [
    "foc_residual",
    "worst_violation",
    "player1_violation",
    "player2_violation",
];

fn round_tree(v: &mut Value, key: Option<&str>) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let digits =
                    if key.is_some_and(|k| COARSE_KEYS.contains(&k)) { 3 } else { 12 };
                let rounded = round_sig(n.as_f64().expect("checked f64"), digits);
                if let Some(num) = serde_json::Number::from_f64(rounded) {
                    *v = Value::Number(num);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                round_tree(item, key);
            }
        }
        Value::Object(map) => {
            for (k, item) in map.iter_mut() {
                round_tree(item, Some(k));
            }
        }
        _ => {}
    }
}

fn csv_num(v: f64) -> String {
    if !v.is_finite() {
        return String::new();
    }
    format!("{}", round_sig(v, 12))
}

fn require_format(out: &OutputArgs, required: Format) -> Result<()> {
    let implied = match required {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match out.format {
        None => Ok(()),
        Some(f) if f == required => Ok(()),
        Some(_) => Err(Error::BadParameter(format!(
            "this subcommand only emits {implied}"
        ))),
    }
}

fn write_json<T: Serialize>(out: &OutputArgs, payload: &T) -> Result<()> {
    require_format(out, Format::Json)?;
    let mut value = serde_json::to_value(payload)
        .map_err(|e| Error::BadSpec(format!("serialization failed: {e}")))?;
    round_tree(&mut value, None);
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::BadSpec(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(out, &text)
}

fn write_text(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Error::BadSpec(format!("cannot write `{}`: {e}", path.display()))
        }),
        None => {
            let mut stdout = std::io::stdout();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Ok(()) => Ok(()),
                // The downstream consumer closed the pipe; stop quietly.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(Error::BadSpec(format!("cannot write to stdout: {e}"))),
            }
        }
    }
}
