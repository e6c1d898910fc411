//! Sensitivity experiments: parameter sweeps over the full solve pipeline.
//!
//! Each sweep evaluates a grid of model variants (risk weighting, emissions
//! cap, or stop capacity), solving every cell to optimality and summarizing
//! the plans. Cells are independent, run on a configurable worker pool, and
//! are assembled back in deterministic grid order; a failed cell records its
//! error without aborting the rest of the sweep.

use crate::model::{build_milp, decode, BuildOptions, DecodeError, MilpModel, Plan};
use crate::risk::{cvar_primal, RiskError, RiskParams};
use crate::scenario::ScenarioSet;
use crate::solver::{solve_milp, MipResult, MipStatus, SolveError, SolverConfig};
use crate::Instance;
use rayon::prelude::*;
use serde::Serialize;

/// Which experiment a sweep spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    RiskGrid,
    EmissionsGrid,
    CapacityGrid,
    StochasticValues,
    Breakdown,
}

/// Grid definition for the sweeps.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Risk-weight grid (risk sweep crosses this with the alpha grid).
    pub lambda_grid: Vec<f64>,
    /// Tail-level grid.
    pub alpha_grid: Vec<f64>,
    /// Emissions-cap grid, in the instance's emissions units.
    pub epsilon_grid: Vec<f64>,
    /// Per-stop capacity grid (each value overrides every scenario capacity).
    pub capacity_grid: Vec<i64>,
    /// Fixed emissions-cap override for sweeps that do not vary it.
    pub epsilon_override: Option<f64>,
    pub use_transfer: bool,
    pub linking: bool,
}

impl SweepSpec {
    /// Canonical grids: lambda 0..1 by 0.1, alpha {0.25, 0.5, 0.75, 0.9},
    /// epsilon 25..375 by 25, capacity 4..10.
    pub fn for_kind(kind: SweepKind) -> Self {
        SweepSpec {
            kind,
            lambda_grid: (0..=10).map(|k| k as f64 / 10.0).collect(),
            alpha_grid: vec![0.25, 0.5, 0.75, 0.9],
            epsilon_grid: (1..=15).map(|k| 25.0 * k as f64).collect(),
            capacity_grid: (4..=10).collect(),
            epsilon_override: None,
            use_transfer: false,
            linking: true,
        }
    }

    fn build_options(&self, epsilon: Option<f64>) -> BuildOptions {
        BuildOptions {
            epsilon_override: epsilon.or(self.epsilon_override),
            use_transfer: self.use_transfer,
            linking: self.linking,
        }
    }
}

/// Errors from a single experiment cell or a one-shot run.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Build(#[from] crate::model::BuildError),
    #[error("{0}")]
    Solve(#[from] SolveError),
    #[error("solver stopped with status {0:?}")]
    Status(MipStatus),
    #[error("{0}")]
    Decode(#[from] DecodeError),
    #[error("{0}")]
    Risk(#[from] RiskError),
}

/// Build, solve, and decode one model variant.
pub fn solve_once(
    inst: &Instance,
    scen: &ScenarioSet,
    risk: RiskParams,
    opts: &BuildOptions,
    cfg: &SolverConfig,
) -> Result<(MilpModel, MipResult, Plan), RunError> {
    let model = build_milp(inst, scen, risk, opts)?;
    let result = solve_milp(&model, cfg)?;
    if result.status != MipStatus::Optimal {
        return Err(RunError::Status(result.status));
    }
    let values = result
        .solution
        .as_ref()
        .expect("optimal result carries a solution");
    let plan = decode(&model, values)?;
    Ok((model, result, plan))
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool")
}

/// One point of the risk-weighting grid.
#[derive(Debug, Clone, Serialize)]
pub struct RiskCell {
    pub lambda: f64,
    pub alpha: f64,
    /// Optimal objective under the cell's weighting.
    pub objective: f64,
    /// Average stochastic cost: the probability-weighted second-stage cost
    /// (transport plus unmet penalty) of the optimal plan.
    pub expected_second_stage: f64,
    /// Expected total cost: first-stage plus `expected_second_stage` plus
    /// the expected emissions charge, free of any risk weighting.
    pub expected_total: f64,
    /// Quantile and tail mean of the plan's second-stage cost distribution,
    /// recomputed from the plan (well defined even at lambda = 0 where the
    /// model's threshold variable is degenerate).
    pub var: f64,
    pub cvar: f64,
    /// "ok" or the cell's error.
    pub status: String,
}

impl RiskCell {
    fn failed(lambda: f64, alpha: f64, err: String) -> Self {
        RiskCell {
            lambda,
            alpha,
            objective: f64::NAN,
            expected_second_stage: f64::NAN,
            expected_total: f64::NAN,
            var: f64::NAN,
            cvar: f64::NAN,
            status: err,
        }
    }
}

/// Sweep the (lambda, alpha) grid.
pub fn run_risk_grid(
    inst: &Instance,
    scen: &ScenarioSet,
    spec: &SweepSpec,
    cfg: &SolverConfig,
    workers: usize,
) -> Vec<RiskCell> {
    let grid: Vec<(f64, f64)> = spec
        .lambda_grid
        .iter()
        .flat_map(|&l| spec.alpha_grid.iter().map(move |&a| (l, a)))
        .collect();
    let probs: Vec<f64> = scen.scenarios.iter().map(|s| s.probability).collect();
    pool(workers).install(|| {
        grid.par_iter()
            .map(|&(lambda, alpha)| {
                let risk = match RiskParams::new(lambda, alpha) {
                    Ok(r) => r,
                    Err(e) => return RiskCell::failed(lambda, alpha, e.to_string()),
                };
                match solve_once(inst, scen, risk, &spec.build_options(None), cfg) {
                    Ok((_, _, plan)) => {
                        let costs: Vec<f64> = plan
                            .scenarios
                            .iter()
                            .map(|o| o.second_stage_cost)
                            .collect();
                        match cvar_primal(&costs, &probs, alpha) {
                            Ok(est) => {
                                let asc = plan.breakdown.expected_transport
                                    + plan.breakdown.expected_unmet;
                                RiskCell {
                                    lambda,
                                    alpha,
                                    objective: plan.objective,
                                    expected_second_stage: asc,
                                    expected_total: plan.breakdown.first_stage
                                        + asc
                                        + plan.breakdown.expected_emissions_penalty,
                                    var: est.var,
                                    cvar: est.cvar,
                                    status: "ok".to_string(),
                                }
                            }
                            Err(e) => RiskCell::failed(lambda, alpha, e.to_string()),
                        }
                    }
                    Err(e) => RiskCell::failed(lambda, alpha, e.to_string()),
                }
            })
            .collect()
    })
}

/// One point of the emissions-cap grid.
#[derive(Debug, Clone, Serialize)]
pub struct EmissionCell {
    pub epsilon: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub objective: f64,
    /// Probability-weighted emissions of the optimal plan.
    pub expected_emissions: f64,
    /// Probability-weighted emissions above the cap.
    pub expected_excess: f64,
    /// True once the objective has stopped improving along ascending caps.
    pub plateau: bool,
    pub status: String,
}

/// Sweep the emissions cap across every (lambda, alpha) pair in `spec`.
///
/// Cells are emitted grouped by (lambda, alpha) in grid order, with the cap
/// ascending inside each group; the plateau flag marks cells whose objective
/// matches the previous cap's within `1e-6` relative.
pub fn run_emissions_grid(
    inst: &Instance,
    scen: &ScenarioSet,
    spec: &SweepSpec,
    cfg: &SolverConfig,
    workers: usize,
) -> Vec<EmissionCell> {
    let mut eps = spec.epsilon_grid.clone();
    eps.sort_by(f64::total_cmp);
    let grid: Vec<(f64, f64, f64)> = spec
        .lambda_grid
        .iter()
        .flat_map(|&l| {
            let eps = &eps;
            spec.alpha_grid
                .iter()
                .flat_map(move |&a| eps.iter().map(move |&e| (l, a, e)))
        })
        .collect();
    let mut cells: Vec<EmissionCell> = pool(workers).install(|| {
        grid.par_iter()
            .map(|&(lambda, alpha, epsilon)| {
                let fail = |err: String| EmissionCell {
                    epsilon,
                    lambda,
                    alpha,
                    objective: f64::NAN,
                    expected_emissions: f64::NAN,
                    expected_excess: f64::NAN,
                    plateau: false,
                    status: err,
                };
                let risk = match RiskParams::new(lambda, alpha) {
                    Ok(r) => r,
                    Err(e) => return fail(e.to_string()),
                };
                match solve_once(inst, scen, risk, &spec.build_options(Some(epsilon)), cfg) {
                    Ok((_, _, plan)) => {
                        let expected_emissions = plan
                            .scenarios
                            .iter()
                            .map(|o| o.probability * o.emissions)
                            .sum();
                        let expected_excess = plan
                            .scenarios
                            .iter()
                            .map(|o| o.probability * o.excess_emissions)
                            .sum();
                        EmissionCell {
                            epsilon,
                            lambda,
                            alpha,
                            objective: plan.objective,
                            expected_emissions,
                            expected_excess,
                            plateau: false,
                            status: "ok".to_string(),
                        }
                    }
                    Err(e) => fail(e.to_string()),
                }
            })
            .collect()
    });
    // Plateau detection along ascending caps within each (lambda, alpha) run.
    let run = eps.len();
    for group in cells.chunks_mut(run.max(1)) {
        for k in 1..group.len() {
            let (prev, cur) = (group[k - 1].objective, group[k].objective);
            if prev.is_finite() && cur.is_finite() {
                group[k].plateau = (cur - prev).abs() <= 1e-6 * cur.abs().max(1.0);
            }
        }
    }
    cells
}

/// One point of the capacity grid.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityCell {
    /// Capacity applied to every (hub, train) stop in every scenario.
    pub capacity: i64,
    /// Optimal objective (equals expected total cost at lambda = 0).
    pub total_cost: f64,
    /// Probability-weighted unmet containers.
    pub expected_unmet: f64,
    /// Share of expected demand served, in percent.
    pub demand_met_pct: f64,
    /// Extremes and spread of per-scenario unmet totals.
    pub max_unmet: f64,
    pub min_unmet: f64,
    pub std_unmet: f64,
    pub status: String,
}

/// Sweep a uniform stop capacity; risk comes from the first lambda/alpha
/// entries of `spec`.
pub fn run_capacity_grid(
    inst: &Instance,
    scen: &ScenarioSet,
    spec: &SweepSpec,
    cfg: &SolverConfig,
    workers: usize,
) -> Vec<CapacityCell> {
    let lambda = spec.lambda_grid.first().copied().unwrap_or(0.0);
    let alpha = spec.alpha_grid.first().copied().unwrap_or(0.75);
    pool(workers).install(|| {
        spec.capacity_grid
            .par_iter()
            .map(|&cap| {
                let fail = |err: String| CapacityCell {
                    capacity: cap,
                    total_cost: f64::NAN,
                    expected_unmet: f64::NAN,
                    demand_met_pct: f64::NAN,
                    max_unmet: f64::NAN,
                    min_unmet: f64::NAN,
                    std_unmet: f64::NAN,
                    status: err,
                };
                let mut leveled = scen.clone();
                for sc in &mut leveled.scenarios {
                    for per_train in sc.capacity.values_mut() {
                        for v in per_train.values_mut() {
                            *v = cap;
                        }
                    }
                }
                let risk = match RiskParams::new(lambda, alpha) {
                    Ok(r) => r,
                    Err(e) => return fail(e.to_string()),
                };
                match solve_once(inst, &leveled, risk, &spec.build_options(None), cfg) {
                    Ok((_, _, plan)) => {
                        let unmet: Vec<f64> = plan
                            .scenarios
                            .iter()
                            .map(|o| o.unmet.iter().sum::<i64>() as f64)
                            .collect();
                        let probs: Vec<f64> =
                            plan.scenarios.iter().map(|o| o.probability).collect();
                        let expected_unmet: f64 =
                            unmet.iter().zip(&probs).map(|(u, p)| u * p).sum();
                        let expected_demand: f64 = leveled
                            .scenarios
                            .iter()
                            .map(|sc| {
                                sc.probability * sc.demand.values().sum::<i64>() as f64
                            })
                            .sum();
                        let demand_met_pct = if expected_demand > 0.0 {
                            100.0 * (1.0 - expected_unmet / expected_demand)
                        } else {
                            100.0
                        };
                        let variance: f64 = unmet
                            .iter()
                            .zip(&probs)
                            .map(|(u, p)| p * (u - expected_unmet).powi(2))
                            .sum();
                        CapacityCell {
                            capacity: cap,
                            total_cost: plan.objective,
                            expected_unmet,
                            demand_met_pct,
                            max_unmet: unmet.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                            min_unmet: unmet.iter().cloned().fold(f64::INFINITY, f64::min),
                            std_unmet: variance.sqrt(),
                            status: "ok".to_string(),
                        }
                    }
                    Err(e) => fail(e.to_string()),
                }
            })
            .collect()
    })
}

/// One component of the cost-structure breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownComponent {
    pub name: &'static str,
    /// Contribution to the objective under the lambda-weighting.
    pub amount: f64,
    pub share_pct: f64,
}

/// Cost-structure decomposition of one optimal plan.
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownReport {
    pub objective: f64,
    pub components: Vec<BreakdownComponent>,
}

/// Solve once and decompose the objective into its weighted components:
/// preparation, transport, unmet penalty, emissions penalty, and (when
/// lambda > 0) the CVaR term. Components sum to the objective.
pub fn run_breakdown(
    inst: &Instance,
    scen: &ScenarioSet,
    risk: RiskParams,
    opts: &BuildOptions,
    cfg: &SolverConfig,
) -> Result<BreakdownReport, RunError> {
    let (_, _, plan) = solve_once(inst, scen, risk, opts, cfg)?;
    let b = &plan.breakdown;
    let weighted = [
        ("supply", b.first_stage),
        ("transport", (1.0 - b.lambda) * b.expected_transport),
        ("unmet_penalty", (1.0 - b.lambda) * b.expected_unmet),
        ("emissions_penalty", b.expected_emissions_penalty),
        ("risk_term", b.lambda * b.cvar),
    ];
    let objective = plan.objective;
    let denom = if objective.abs() > 1e-12 { objective } else { 1.0 };
    let components = weighted
        .into_iter()
        .map(|(name, amount)| BreakdownComponent {
            name,
            amount,
            share_pct: 100.0 * amount / denom,
        })
        .collect();
    Ok(BreakdownReport {
        objective,
        components,
    })
}
