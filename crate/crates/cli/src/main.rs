//! Command-line front end for the stochastic intermodal freight planner.
//!
//! Subcommands map one-to-one onto the library's workflows: validation,
//! single solves, the three sensitivity sweeps, stochastic-value metrics,
//! cost breakdowns, scenario materialization, and LP-format export. Every
//! run that produces artifacts also writes a `manifest.json` with input
//! digests, the fully resolved configuration, and per-stage timings, so any
//! output can be reproduced bit for bit.
//!
//! Exit codes: 0 on success, 1 when the solver stopped short of a proven
//! optimum (artifacts for the best incumbent are still written), 2 on input
//! errors. Set `PLANNER_LOG` (e.g. `info`, `debug`) for progress logging.

use clap::{Args, Parser, Subcommand};
use planner_core::experiments::{
    run_breakdown, run_capacity_grid, run_emissions_grid, run_risk_grid, SweepKind, SweepSpec,
};
use planner_core::fileio::{load_document, resolve_scenarios, save_document, LoadError};
use planner_core::instance::validate_instance;
use planner_core::model::{build_milp, decode, write_lp, BuildOptions};
use planner_core::report::{
    breakdown_table, capacity_table, emissions_table, risk_table, stochastic_table, ReportTable,
};
use planner_core::risk::{stochastic_values, MetricsError, RiskParams};
use planner_core::scenario::validate_scenarios;
use planner_core::solver::{check_solution, solve_milp, MipStatus, SolverConfig};
use planner_core::{Instance, ScenarioSet};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "planner",
    version,
    about = "Two-stage stochastic planner for road-to-rail container dispatch"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Risk weight on the CVaR term, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// CVaR tail level, in [0, 1).
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    /// Override the instance's emissions cap.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Relative optimality gap at which a solve counts as optimal.
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
    /// Wall-clock limit per solve, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Scenario-sampler seed (overrides the one in the input document).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweep cells (default: logical core count).
    #[arg(long)]
    workers: Option<usize>,
    /// Charge road-to-rail transfer time and cost on every dispatch.
    #[arg(long)]
    use_transfer: bool,
    /// Directory for artifacts (created if missing).
    #[arg(long, default_value = ".")]
    output: PathBuf,
    /// Build without the big-M linking binaries.
    #[arg(long)]
    no_linking: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a problem document, reporting every defect.
    Validate {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the full model once and write the optimal plan.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the (lambda, alpha) grid and tabulate objectives and tail risk.
    SweepRisk {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the emissions cap at a fixed risk weighting.
    SweepEmissions {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep a uniform train capacity, risk-neutral.
    SweepCapacity {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute EEV / SS / WS and the derived VSS / EVPI metrics.
    Metrics {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decompose the optimal objective into cost components.
    Breakdown {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Materialize sampled scenarios into a concrete problem document.
    GenScenarios {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write the model in LP text format for external cross-checks.
    ExportLp {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Input-side failure: bad file, bad schema, bad parameter domain. Exit 2,
/// no manifest.
struct InputError(String);

#[derive(Serialize)]
struct ManifestInput {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct StageTiming {
    stage: String,
    seconds: f64,
}

#[derive(Serialize)]
struct ResolvedConfig {
    lambda: f64,
    alpha: f64,
    epsilon: Option<f64>,
    gap: f64,
    time_limit: Option<f64>,
    seed: Option<u64>,
    workers: usize,
    use_transfer: bool,
    linking: bool,
    output: String,
}

#[derive(Serialize)]
struct RunManifest {
    tool: String,
    version: String,
    command: String,
    inputs: Vec<ManifestInput>,
    config: ResolvedConfig,
    stages: Vec<StageTiming>,
    wall_seconds: f64,
    artifacts: Vec<String>,
}

/// Accumulates manifest data while a command runs.
struct RunContext {
    common: Common,
    command: String,
    started: Instant,
    inputs: Vec<ManifestInput>,
    stages: Vec<StageTiming>,
    artifacts: Vec<String>,
}

impl RunContext {
    fn new(command: &str, common: &Common) -> Self {
        RunContext {
            common: common.clone(),
            command: command.to_string(),
            started: Instant::now(),
            inputs: Vec::new(),
            stages: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn workers(&self) -> usize {
        self.common.workers.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            gap: self.common.gap,
            time_limit: self.common.time_limit,
            ..SolverConfig::default()
        }
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            epsilon_override: self.common.epsilon,
            use_transfer: self.common.use_transfer,
            linking: !self.common.no_linking,
        }
    }

    fn risk(&self) -> Result<RiskParams, InputError> {
        RiskParams::new(self.common.lambda, self.common.alpha)
            .map_err(|e| InputError(e.to_string()))
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        let seconds = t.elapsed().as_secs_f64();
        log::info!("stage {stage}: {seconds:.3}s");
        self.stages.push(StageTiming {
            stage: stage.to_string(),
            seconds,
        });
        out
    }

    /// Load, digest, and fully validate a problem document.
    fn load(&mut self, path: &Path) -> Result<(Instance, ScenarioSet), InputError> {
        let bytes = std::fs::read(path)
            .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(ManifestInput {
            path: path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        });
        let seed = self.common.seed;
        self.time("load", || {
            let mut doc = load_document(path).map_err(|e| InputError(e.to_string()))?;
            if let Some(seed) = seed {
                doc.sampler_seed = Some(seed);
            }
            let scen = resolve_scenarios(&doc).map_err(|e| InputError(e.to_string()))?;
            let mut report = validate_instance(&doc.instance);
            report.extend(validate_scenarios(&scen, &doc.instance));
            if !report.is_ok() {
                return Err(InputError(format!("validation failed:\n{report}")));
            }
            Ok((doc.instance, scen))
        })
    }

    /// Write one artifact under the output directory and record it.
    fn write_artifact(&mut self, name: &str, contents: &str) -> Result<PathBuf, InputError> {
        let dir = self.common.output.clone();
        std::fs::create_dir_all(&dir)
            .map_err(|e| InputError(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(path.display().to_string());
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, InputError> {
        let text = serde_json::to_string_pretty(value).expect("serializable artifact");
        self.write_artifact(name, &text)
    }

    fn write_table(&mut self, name: &str, table: &ReportTable) -> Result<PathBuf, InputError> {
        self.write_artifact(name, &table.to_csv())
    }

    /// Write the manifest; called for every exit 0 / exit 1 path.
    fn finish(&mut self) -> Result<(), InputError> {
        let manifest = RunManifest {
            tool: "planner".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.clone(),
            inputs: std::mem::take(&mut self.inputs),
            config: ResolvedConfig {
                lambda: self.common.lambda,
                alpha: self.common.alpha,
                epsilon: self.common.epsilon,
                gap: self.common.gap,
                time_limit: self.common.time_limit,
                seed: self.common.seed,
                workers: self.workers(),
                use_transfer: self.common.use_transfer,
                linking: !self.common.no_linking,
                output: self.common.output.display().to_string(),
            },
            stages: std::mem::take(&mut self.stages),
            wall_seconds: self.started.elapsed().as_secs_f64(),
            artifacts: self.artifacts.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let dir = self.common.output.clone();
        std::fs::create_dir_all(&dir)
            .map_err(|e| InputError(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join("manifest.json");
        std::fs::write(&path, text)
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLANNER_LOG", "warn")).init();
    let cli = Cli::parse();
    let (name, input, common) = match &cli.command {
        Command::Validate { input, common } => ("validate", input, common),
        Command::Solve { input, common } => ("solve", input, common),
        Command::SweepRisk { input, common } => ("sweep-risk", input, common),
        Command::SweepEmissions { input, common } => ("sweep-emissions", input, common),
        Command::SweepCapacity { input, common } => ("sweep-capacity", input, common),
        Command::Metrics { input, common } => ("metrics", input, common),
        Command::Breakdown { input, common } => ("breakdown", input, common),
        Command::GenScenarios { input, common } => ("gen-scenarios", input, common),
        Command::ExportLp { input, common } => ("export-lp", input, common),
    };
    let mut ctx = RunContext::new(name, common);
    match run(name, input, &mut ctx) {
        Ok(exit) => {
            if let Err(InputError(msg)) = ctx.finish() {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::from(exit)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Dispatch a subcommand. `Ok(code)` means artifacts (and the manifest) are
/// in place; `Err` is an input-side failure reported without a manifest.
fn run(name: &str, input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    match name {
        "validate" => cmd_validate(input, ctx),
        "solve" => cmd_solve(input, ctx),
        "sweep-risk" => cmd_sweep_risk(input, ctx),
        "sweep-emissions" => cmd_sweep_emissions(input, ctx),
        "sweep-capacity" => cmd_sweep_capacity(input, ctx),
        "metrics" => cmd_metrics(input, ctx),
        "breakdown" => cmd_breakdown(input, ctx),
        "gen-scenarios" => cmd_gen_scenarios(input, ctx),
        "export-lp" => cmd_export_lp(input, ctx),
        _ => unreachable!("clap restricts the subcommand set"),
    }
}

fn cmd_validate(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    println!(
        "valid: {} origins, {} hubs, {} trains, {} scenarios, {} periods",
        inst.origins.len(),
        inst.hubs.len(),
        inst.trains.len(),
        scen.len(),
        inst.periods
    );
    Ok(0)
}

fn cmd_solve(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    let risk = ctx.risk()?;
    let opts = ctx.build_options();
    let cfg = ctx.solver_config();
    let model = ctx
        .time("build", || build_milp(&inst, &scen, risk, &opts))
        .map_err(|e| InputError(e.to_string()))?;
    let census = model.census();
    log::info!(
        "model: {} rows, {} columns ({} integer)",
        census.rows,
        census.columns,
        census.integer_columns
    );
    let result = match ctx.time("solve", || solve_milp(&model, &cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("solver failed: {e}");
            return Ok(1);
        }
    };
    println!(
        "status {:?}: objective {}, bound {:.6}, gap {:.2e}, {} nodes, {} LP iterations",
        result.status,
        result
            .objective
            .map_or_else(|| "none".to_string(), |v| format!("{v:.6}")),
        result.best_bound,
        result.gap,
        result.nodes,
        result.lp_iterations
    );
    if let Some(values) = &result.solution {
        let violations = check_solution(&model, values, 1e-6);
        if !violations.is_empty() {
            eprintln!("incumbent failed certification:");
            for v in &violations {
                eprintln!("  {v}");
            }
            return Ok(1);
        }
        let plan = match decode(&model, values) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("plan extraction failed: {e}");
                return Ok(1);
            }
        };
        println!(
            "prepared {:?}, expected second-stage cost {:.3}, cvar {:.3}",
            plan.prepared,
            plan.breakdown.expected_transport + plan.breakdown.expected_unmet,
            plan.cvar
        );
        ctx.write_json("plan.json", &plan)?;
    }
    Ok(if result.status == MipStatus::Optimal {
        0
    } else {
        1
    })
}

fn cmd_sweep_risk(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    let spec = SweepSpec {
        epsilon_override: ctx.common.epsilon,
        use_transfer: ctx.common.use_transfer,
        linking: !ctx.common.no_linking,
        ..SweepSpec::for_kind(SweepKind::RiskGrid)
    };
    let cfg = ctx.solver_config();
    let workers = ctx.workers();
    let cells = ctx.time("sweep", || run_risk_grid(&inst, &scen, &spec, &cfg, workers));
    ctx.write_table("risk_grid.csv", &risk_table(&cells))?;
    ctx.write_json("risk_grid.cells.json", &cells)?;
    Ok(sweep_exit(cells.iter().map(|c| c.status.as_str())))
}

fn cmd_sweep_emissions(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    ctx.risk()?; // domain-check the fixed (lambda, alpha) pair
    let spec = SweepSpec {
        lambda_grid: vec![ctx.common.lambda],
        alpha_grid: vec![ctx.common.alpha],
        use_transfer: ctx.common.use_transfer,
        linking: !ctx.common.no_linking,
        ..SweepSpec::for_kind(SweepKind::EmissionsGrid)
    };
    let cfg = ctx.solver_config();
    let workers = ctx.workers();
    let cells = ctx.time("sweep", || {
        run_emissions_grid(&inst, &scen, &spec, &cfg, workers)
    });
    ctx.write_table("emissions_grid.csv", &emissions_table(&cells))?;
    ctx.write_json("emissions_grid.cells.json", &cells)?;
    Ok(sweep_exit(cells.iter().map(|c| c.status.as_str())))
}

fn cmd_sweep_capacity(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    // Capacity relief is studied risk-neutral: the single total-cost column
    // has no risk parameters attached.
    let spec = SweepSpec {
        lambda_grid: vec![0.0],
        alpha_grid: vec![ctx.common.alpha],
        epsilon_override: ctx.common.epsilon,
        use_transfer: ctx.common.use_transfer,
        linking: !ctx.common.no_linking,
        ..SweepSpec::for_kind(SweepKind::CapacityGrid)
    };
    let cfg = ctx.solver_config();
    let workers = ctx.workers();
    let cells = ctx.time("sweep", || {
        run_capacity_grid(&inst, &scen, &spec, &cfg, workers)
    });
    ctx.write_table("capacity_grid.csv", &capacity_table(&cells))?;
    ctx.write_json("capacity_grid.cells.json", &cells)?;
    Ok(sweep_exit(cells.iter().map(|c| c.status.as_str())))
}

fn cmd_metrics(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    let opts = ctx.build_options();
    let cfg = ctx.solver_config();
    let alpha = ctx.common.alpha;
    let report = match ctx.time("metrics", || {
        stochastic_values(&inst, &scen, &opts, &cfg, alpha)
    }) {
        Ok(r) => r,
        Err(e @ (MetricsError::Build { .. } | MetricsError::Risk(_))) => {
            return Err(InputError(e.to_string()));
        }
        Err(e) => {
            eprintln!("metrics failed: {e}");
            return Ok(1);
        }
    };
    println!(
        "EEV {:.3}  SS {:.3}  WS {:.3}  VSS {:.3}  EVPI {:.3}",
        report.eev, report.ss, report.ws, report.vss, report.evpi
    );
    ctx.write_table(
        "stochastic_values.csv",
        &stochastic_table(&report, inst.trains.len(), scen.len()),
    )?;
    ctx.write_json("stochastic_values.json", &report)?;
    Ok(0)
}

fn cmd_breakdown(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    let risk = ctx.risk()?;
    let opts = ctx.build_options();
    let cfg = ctx.solver_config();
    let report = match ctx.time("breakdown", || {
        run_breakdown(&inst, &scen, risk, &opts, &cfg)
    }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("breakdown failed: {e}");
            return Ok(1);
        }
    };
    for c in &report.components {
        println!("{:>20}: {:>12.3} ({:.1}%)", c.name, c.amount, c.share_pct);
    }
    ctx.write_table("breakdown.csv", &breakdown_table(&report))?;
    ctx.write_json("breakdown.json", &report)?;
    Ok(0)
}

fn cmd_gen_scenarios(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let bytes = std::fs::read(input)
        .map_err(|e| InputError(format!("cannot read {}: {e}", input.display())))?;
    ctx.inputs.push(ManifestInput {
        path: input.display().to_string(),
        sha256: hex(&Sha256::digest(&bytes)),
    });
    let mut doc = load_document(input).map_err(|e| InputError(e.to_string()))?;
    if doc.sampler.is_none() {
        return Err(InputError(
            "document has no sampler section to materialize".to_string(),
        ));
    }
    if let Some(seed) = ctx.common.seed {
        doc.sampler_seed = Some(seed);
    }
    let scen = ctx.time("sample", || resolve_scenarios(&doc));
    let scen = scen.map_err(|e| InputError(e.to_string()))?;
    let mut report = validate_instance(&doc.instance);
    report.extend(validate_scenarios(&scen, &doc.instance));
    if !report.is_ok() {
        return Err(InputError(format!("sampled document invalid:\n{report}")));
    }
    println!(
        "sampled {} scenarios (seed {})",
        scen.len(),
        scen.seed.unwrap_or(0)
    );
    let materialized = planner_core::fileio::ProblemDocument {
        instance: doc.instance,
        scenarios: Some(scen),
        sampler: None,
        sampler_seed: None,
    };
    let dir = ctx.common.output.clone();
    std::fs::create_dir_all(&dir)
        .map_err(|e| InputError(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join("scenarios.json");
    save_document(&materialized, &path).map_err(|e| InputError(e.to_string()))?;
    ctx.artifacts.push(path.display().to_string());
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_export_lp(input: &Path, ctx: &mut RunContext) -> Result<u8, InputError> {
    let (inst, scen) = ctx.load(input)?;
    let risk = ctx.risk()?;
    let opts = ctx.build_options();
    let model = ctx
        .time("build", || build_milp(&inst, &scen, risk, &opts))
        .map_err(|e| InputError(e.to_string()))?;
    let text = ctx.time("export", || write_lp(&model));
    ctx.write_artifact("model.lp", &text)?;
    Ok(0)
}

fn sweep_exit<'a>(statuses: impl Iterator<Item = &'a str>) -> u8 {
    let mut failed = 0usize;
    let mut total = 0usize;
    for s in statuses {
        total += 1;
        if s != "ok" {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {total} sweep cells failed; see the cells sidecar");
        1
    } else {
        0
    }
}

/// `LoadError` is input-side by definition; keep the conversion explicit so
/// new variants force a decision here.
impl From<LoadError> for InputError {
    fn from(e: LoadError) -> Self {
        InputError(e.to_string())
    }
}
