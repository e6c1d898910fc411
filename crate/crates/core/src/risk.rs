//! Risk measures and stochastic-value metrics.
//!
//! The planner's mean-risk objective weighs expected cost against conditional
//! value-at-risk (CVaR) of the per-scenario second-stage cost. This module
//! provides CVaR over finite distributions in two independent formulations —
//! a quantile scan and its concave dual — plus the classic comparison metrics
//! between the stochastic program and its deterministic simplifications
//! (expected value of perfect information, value of the stochastic solution).

use crate::model::{build_milp, BuildOptions};
use crate::scenario::{mean_value_scenario, ScenarioSet};
use crate::solver::{solve_milp, MipStatus, SolveError, SolverConfig};
use crate::Instance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Mean-risk trade-off parameters.
///
/// `lambda` blends expected cost (0) against CVaR (1); `alpha` is the tail
/// level: CVaR at `alpha` averages the worst `1 - alpha` probability mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskParams {
    pub lambda: f64,
    pub alpha: f64,
}

/// Errors from risk computations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum RiskError {
    #[error("lambda {0} must lie in [0, 1]")]
    BadLambda(f64),
    #[error("alpha {0} must lie in [0, 1)")]
    BadAlpha(f64),
    #[error("empty cost distribution")]
    Empty,
    #[error("costs and probabilities have different lengths ({costs} vs {probs})")]
    LengthMismatch { costs: usize, probs: usize },
    #[error("probabilities must be nonnegative and sum to 1 (sum = {0})")]
    ProbSum(f64),
    #[error("non-finite value in cost distribution")]
    NotFinite,
}

impl RiskParams {
    /// Validated constructor; prefer this over struct literals in user code.
    pub fn new(lambda: f64, alpha: f64) -> Result<Self, RiskError> {
        if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
            return Err(RiskError::BadLambda(lambda));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(RiskError::BadAlpha(alpha));
        }
        Ok(RiskParams { lambda, alpha })
    }

    /// Risk-neutral parameters (all weight on expected cost).
    pub fn neutral() -> Self {
        RiskParams { lambda: 0.0, alpha: 0.75 }
    }
}

/// Value-at-risk and conditional value-at-risk of a finite distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvarEstimate {
    /// The `alpha`-quantile of the distribution.
    pub var: f64,
    /// Mean of the worst `1 - alpha` tail.
    pub cvar: f64,
}

fn check_distribution(costs: &[f64], probs: &[f64], alpha: f64) -> Result<(), RiskError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(RiskError::BadAlpha(alpha));
    }
    if costs.is_empty() {
        return Err(RiskError::Empty);
    }
    if costs.len() != probs.len() {
        return Err(RiskError::LengthMismatch {
            costs: costs.len(),
            probs: probs.len(),
        });
    }
    if costs.iter().chain(probs.iter()).any(|v| !v.is_finite()) {
        return Err(RiskError::NotFinite);
    }
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(RiskError::ProbSum(sum));
    }
    Ok(())
}

/// CVaR by direct tail averaging.
///
/// Sorts the support, walks down from the most expensive outcome, and averages
/// exactly `1 - alpha` of probability mass, splitting the boundary atom if
/// needed. The reported `var` is the cost at which the tail budget runs out,
/// i.e. the `alpha`-quantile.
pub fn cvar_primal(costs: &[f64], probs: &[f64], alpha: f64) -> Result<CvarEstimate, RiskError> {
    check_distribution(costs, probs, alpha)?;
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));

    let tail = 1.0 - alpha;
    let mut remaining = tail;
    let mut acc = 0.0;
    let mut var = costs[order[0]];
    for &idx in order.iter().rev() {
        if remaining <= 1e-15 {
            break;
        }
        let take = probs[idx].min(remaining);
        acc += take * costs[idx];
        remaining -= take;
        var = costs[idx];
    }
    Ok(CvarEstimate {
        var,
        cvar: acc / tail,
    })
}

/// CVaR via its dual representation: the worst reweighting of the scenario
/// probabilities in which no scenario exceeds `p / (1 - alpha)` times its
/// weight. For finite distributions the optimal reweighting loads the most
/// expensive outcomes first, so this is a greedy fill — an independent check
/// of [`cvar_primal`].
pub fn cvar_dual(costs: &[f64], probs: &[f64], alpha: f64) -> Result<f64, RiskError> {
    check_distribution(costs, probs, alpha)?;
    let mut order: Vec<usize> = (0..costs.len()).collect();
    // Descending by cost; ties broken by original position for determinism.
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));

    let budget = 1.0 - alpha;
    let mut remaining = budget;
    let mut value = 0.0;
    for &idx in &order {
        if remaining <= 1e-15 {
            break;
        }
        let q = probs[idx].min(remaining);
        value += q * costs[idx];
        remaining -= q;
    }
    Ok(value / budget)
}

/// Comparison of the stochastic program against its deterministic relatives.
///
/// All values are in the objective's monetary units (not rescaled):
/// * `ss` — optimum of the risk-neutral stochastic program;
/// * `eev` — expected cost of fixing the mean-value scenario's first stage
///   and re-optimizing recourse per scenario;
/// * `ws` — probability-weighted optimum under perfect foresight;
/// * `vss = eev - ss`, `evpi = ss - ws` (both nonnegative for complete
///   recourse);
/// * `cvar_ss` — CVaR of the stochastic solution's second-stage cost
///   distribution at the reporting tail level.
#[derive(Debug, Clone, Serialize)]
pub struct StochasticValueReport {
    pub ss: f64,
    pub eev: f64,
    pub ws: f64,
    pub vss: f64,
    pub evpi: f64,
    pub vss_pct: f64,
    pub cvar_ss: f64,
    /// First-stage decision of the mean-value problem.
    pub ev_first_stage: Vec<i64>,
    /// Per-scenario optima under perfect foresight.
    pub per_scenario_ws: Vec<f64>,
    /// Per-scenario cost of the mean-value first stage.
    pub per_scenario_eev: Vec<f64>,
}

/// Errors from the stochastic-value pipeline.
#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("model build failed during {stage}: {source}")]
    Build {
        stage: &'static str,
        #[source]
        source: crate::model::BuildError,
    },
    #[error("solver failed during {stage}: {source}")]
    Solve {
        stage: &'static str,
        #[source]
        source: SolveError,
    },
    #[error("{stage} terminated with status {status:?} instead of an optimum")]
    NotOptimal { stage: &'static str, status: MipStatus },
    #[error("risk parameters: {0}")]
    Risk(#[from] RiskError),
}

fn solve_to_optimum(
    inst: &Instance,
    scen: &ScenarioSet,
    risk: RiskParams,
    opts: &BuildOptions,
    cfg: &SolverConfig,
    fixed_first_stage: Option<&[i64]>,
    stage: &'static str,
) -> Result<(f64, crate::model::Plan), MetricsError> {
    let mut model = build_milp(inst, scen, risk, opts)
        .map_err(|source| MetricsError::Build { stage, source })?;
    if let Some(y) = fixed_first_stage {
        model.fix_first_stage(y);
    }
    let result = solve_milp(&model, cfg).map_err(|source| MetricsError::Solve { stage, source })?;
    if result.status != MipStatus::Optimal {
        return Err(MetricsError::NotOptimal {
            stage,
            status: result.status,
        });
    }
    let values = result.solution.expect("optimal result carries a solution");
    let plan = crate::model::decode(&model, &values).expect("optimal incumbent decodes");
    Ok((result.objective.expect("optimal result carries an objective"), plan))
}

/// Compute SS, EEV, WS and the derived VSS / EVPI metrics.
///
/// `report_alpha` sets the tail level for `cvar_ss`. The per-scenario solves
/// (perfect foresight and fixed-first-stage recourse) are independent and run
/// on the current rayon pool.
pub fn stochastic_values(
    inst: &Instance,
    scen: &ScenarioSet,
    opts: &BuildOptions,
    cfg: &SolverConfig,
    report_alpha: f64,
) -> Result<StochasticValueReport, MetricsError> {
    let neutral = RiskParams::new(0.0, report_alpha)?;

    // Stochastic solution: the full risk-neutral program.
    let (ss, ss_plan) = solve_to_optimum(inst, scen, neutral, opts, cfg, None, "stochastic solution")?;
    let probs: Vec<f64> = scen.scenarios.iter().map(|s| s.probability).collect();
    let ss_costs: Vec<f64> = ss_plan
        .scenarios
        .iter()
        .map(|o| o.second_stage_cost)
        .collect();
    let cvar_ss = cvar_primal(&ss_costs, &probs, report_alpha)?.cvar;

    // Mean-value problem: collapse uncertainty, keep its first stage.
    let mean = mean_value_scenario(scen);
    let mean_set = ScenarioSet {
        scenarios: vec![mean],
        seed: None,
    };
    let (_ev, ev_plan) = solve_to_optimum(inst, &mean_set, neutral, opts, cfg, None, "mean-value problem")?;
    let ev_y = ev_plan.prepared.clone();

    // Per-scenario solves: perfect foresight (free y) and mean-value recourse
    // (y fixed). Each scenario is an independent single-scenario program.
    let per_scenario: Result<Vec<(f64, f64)>, MetricsError> = scen
        .scenarios
        .par_iter()
        .map(|sc| {
            let mut single = sc.clone();
            single.probability = 1.0;
            let one = ScenarioSet {
                scenarios: vec![single],
                seed: None,
            };
            let (ws_obj, _) =
                solve_to_optimum(inst, &one, neutral, opts, cfg, None, "perfect foresight")?;
            let (eev_obj, _) = solve_to_optimum(
                inst,
                &one,
                neutral,
                opts,
                cfg,
                Some(&ev_y),
                "mean-value recourse",
            )?;
            Ok((ws_obj, eev_obj))
        })
        .collect();
    let per_scenario = per_scenario?;

    let per_scenario_ws: Vec<f64> = per_scenario.iter().map(|(w, _)| *w).collect();
    let per_scenario_eev: Vec<f64> = per_scenario.iter().map(|(_, e)| *e).collect();
    let ws: f64 = probs
        .iter()
        .zip(&per_scenario_ws)
        .map(|(p, v)| p * v)
        .sum();
    let eev: f64 = probs
        .iter()
        .zip(&per_scenario_eev)
        .map(|(p, v)| p * v)
        .sum();

    let vss = eev - ss;
    let evpi = ss - ws;
    let vss_pct = if ss.abs() > 1e-12 { 100.0 * vss / ss } else { 0.0 };

    Ok(StochasticValueReport {
        ss,
        eev,
        ws,
        vss,
        evpi,
        vss_pct,
        cvar_ss,
        ev_first_stage: ev_y,
        per_scenario_ws,
        per_scenario_eev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartile_tail_of_four_point_uniform() {
        let costs = [10.0, 20.0, 30.0, 40.0];
        let probs = [0.25; 4];
        let top_quartile = cvar_primal(&costs, &probs, 0.75).unwrap();
        assert!((top_quartile.cvar - 40.0).abs() < 1e-12);
        assert!((top_quartile.var - 40.0).abs() < 1e-12);
        let top_half = cvar_primal(&costs, &probs, 0.5).unwrap();
        assert!((top_half.cvar - 35.0).abs() < 1e-12);
        assert!((top_half.var - 30.0).abs() < 1e-12);
        let mean = cvar_primal(&costs, &probs, 0.0).unwrap();
        assert!((mean.cvar - 25.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_atom_is_split() {
        // alpha = 0.6 over uniform quarters: tail (0.4) = all of the 40-atom
        // (0.25) plus 0.15 of the 30-atom.
        let costs = [10.0, 20.0, 30.0, 40.0];
        let probs = [0.25; 4];
        let est = cvar_primal(&costs, &probs, 0.6).unwrap();
        let expected = (0.25 * 40.0 + 0.15 * 30.0) / 0.4;
        assert!((est.cvar - expected).abs() < 1e-12);
        assert!((est.var - 30.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_distribution_is_its_own_cvar() {
        let est = cvar_primal(&[136.0], &[1.0], 0.9).unwrap();
        assert!((est.cvar - 136.0).abs() < 1e-12);
        assert!((est.var - 136.0).abs() < 1e-12);
    }

    #[test]
    fn dual_matches_primal_on_spot_values() {
        let costs = [10.0, 20.0, 30.0, 40.0];
        let probs = [0.25; 4];
        for alpha in [0.0, 0.5, 0.6, 0.75, 0.9] {
            let p = cvar_primal(&costs, &probs, alpha).unwrap().cvar;
            let d = cvar_dual(&costs, &probs, alpha).unwrap();
            assert!((p - d).abs() < 1e-12, "alpha {alpha}: {p} vs {d}");
        }
    }

    #[test]
    fn rejects_malformed_distributions() {
        assert!(matches!(
            cvar_primal(&[], &[], 0.5),
            Err(RiskError::Empty)
        ));
        assert!(matches!(
            cvar_primal(&[1.0], &[0.5], 0.5),
            Err(RiskError::ProbSum(_))
        ));
        assert!(matches!(
            cvar_primal(&[1.0], &[1.0], 1.0),
            Err(RiskError::BadAlpha(_))
        ));
        assert!(matches!(
            cvar_primal(&[1.0, 2.0], &[1.0], 0.5),
            Err(RiskError::LengthMismatch { .. })
        ));
        assert!(RiskParams::new(1.1, 0.5).is_err());
        assert!(RiskParams::new(0.5, 1.0).is_err());
        assert!(RiskParams::new(0.5, 0.0).is_ok());
    }

    #[test]
    fn cvar_is_monotone_in_alpha() {
        let costs = [3.0, 8.0, 1.0, 12.0, 5.0];
        let probs = [0.1, 0.3, 0.2, 0.15, 0.25];
        let mut last = f64::NEG_INFINITY;
        for k in 0..20 {
            let alpha = k as f64 / 20.0;
            let est = cvar_primal(&costs, &probs, alpha).unwrap();
            assert!(est.cvar >= last - 1e-12);
            last = est.cvar;
        }
    }

    proptest::proptest! {
        /// CVaR is translation-equivariant and positively homogeneous, and
        /// always sits between the mean and the maximum.
        #[test]
        fn coherence_axioms(
            raw in proptest::collection::vec((0.0f64..500.0, 0.05f64..1.0), 1..12),
            alpha in 0.0f64..0.95,
            shift in -100.0f64..100.0,
            scale in 0.1f64..10.0,
        ) {
            let costs: Vec<f64> = raw.iter().map(|(c, _)| *c).collect();
            let total: f64 = raw.iter().map(|(_, w)| *w).sum();
            let probs: Vec<f64> = raw.iter().map(|(_, w)| w / total).collect();

            let base = cvar_primal(&costs, &probs, alpha).unwrap().cvar;

            let mean: f64 = costs.iter().zip(&probs).map(|(c, p)| c * p).sum();
            let max = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            proptest::prop_assert!(base >= mean - 1e-7);
            proptest::prop_assert!(base <= max + 1e-7);

            let shifted: Vec<f64> = costs.iter().map(|c| c + shift).collect();
            let sh = cvar_primal(&shifted, &probs, alpha).unwrap().cvar;
            proptest::prop_assert!((sh - (base + shift)).abs() < 1e-7);

            let scaled: Vec<f64> = costs.iter().map(|c| c * scale).collect();
            let sc = cvar_primal(&scaled, &probs, alpha).unwrap().cvar;
            proptest::prop_assert!((sc - base * scale).abs() < 1e-6 * (1.0 + base.abs() * scale));
        }
    }
}
