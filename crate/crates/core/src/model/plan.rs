//! Solution decoding: from a raw column vector to a structured plan.

use super::{MilpModel, VarKind};
use serde::Serialize;

/// A positive dispatch in the decoded plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flow {
    pub origin: usize,
    pub hub: usize,
    pub train: usize,
    pub period: usize,
    pub quantity: i64,
}

/// Everything that happens in one scenario under a given plan.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub probability: f64,
    /// Nonzero dispatches, in cell order.
    pub flows: Vec<Flow>,
    /// Unserved demand per train.
    pub unmet: Vec<i64>,
    /// On-board load per flat stop slot (see the layout's stop offsets).
    pub inventory: Vec<i64>,
    pub transport_cost: f64,
    pub unmet_cost: f64,
    /// Transport plus unmet penalty: the scenario's second-stage cost.
    pub second_stage_cost: f64,
    pub emissions: f64,
    /// Emissions above the cap (the eta variable).
    pub excess_emissions: f64,
    /// Second-stage cost above the CVaR threshold (the xi variable).
    pub tail_excess: f64,
}

/// Objective decomposition under the mean-risk weighting.
#[derive(Debug, Clone, Serialize)]
pub struct CostBreakdown {
    pub lambda: f64,
    /// First-stage preparation cost.
    pub first_stage: f64,
    /// Probability-weighted transport cost.
    pub expected_transport: f64,
    /// Probability-weighted unmet-demand penalty.
    pub expected_unmet: f64,
    /// Probability-weighted emissions charge.
    pub expected_emissions_penalty: f64,
    /// CVaR of the second-stage cost as priced by the model
    /// (threshold plus weighted tail excess).
    pub cvar: f64,
}

impl CostBreakdown {
    /// Recombine the components under the lambda-weighting; equals the model
    /// objective for any feasible decoded solution.
    pub fn total(&self) -> f64 {
        self.first_stage
            + (1.0 - self.lambda) * (self.expected_transport + self.expected_unmet)
            + self.lambda * self.cvar
            + self.expected_emissions_penalty
    }
}

/// A decoded solution.
#[derive(Debug, Clone, Serialize)]
pub struct Plan {
    pub objective: f64,
    /// Containers prepared per origin.
    pub prepared: Vec<i64>,
    /// CVaR threshold chosen by the model.
    pub threshold: f64,
    /// CVaR of second-stage cost as priced by the model.
    pub cvar: f64,
    pub scenarios: Vec<ScenarioOutcome>,
    pub breakdown: CostBreakdown,
}

/// Errors from [`decode`].
#[derive(Debug, Clone, thiserror::Error)]
pub enum DecodeError {
    #[error("DECODE_INCONSISTENT: vector has {found} entries, model has {expected} columns")]
    Length { expected: usize, found: usize },
    #[error("DECODE_INCONSISTENT: column {name} = {value} is not integral within {tol}")]
    NonIntegral { name: String, value: f64, tol: f64 },
    #[error(
        "DECODE_INCONSISTENT: breakdown total {breakdown} disagrees with objective {objective}"
    )]
    Mismatch { breakdown: f64, objective: f64 },
}

const INT_TOL: f64 = 1e-6;

/// Interpret a raw solution vector against the model's layout.
///
/// Integer columns must be integral within `1e-6`; the decoded breakdown is
/// cross-checked against the objective value of the vector, so a plan that
/// decodes successfully is internally consistent.
pub fn decode(model: &MilpModel, values: &[f64]) -> Result<Plan, DecodeError> {
    let layout = &model.layout;
    if values.len() != layout.num_vars() {
        return Err(DecodeError::Length {
            expected: layout.num_vars(),
            found: values.len(),
        });
    }
    let as_int = |col: usize| -> Result<i64, DecodeError> {
        let v = values[col];
        let r = v.round();
        if (v - r).abs() > INT_TOL {
            return Err(DecodeError::NonIntegral {
                name: model.columns[col].name.clone(),
                value: v,
                tol: INT_TOL,
            });
        }
        Ok(r as i64)
    };
    // All declared integer columns must be integral, even those the plan
    // summary does not surface (e.g. linking indicators).
    for (col, column) in model.columns.iter().enumerate() {
        if column.kind != VarKind::Continuous {
            as_int(col)?;
        }
    }

    let prepared: Vec<i64> = (0..layout.num_origins)
        .map(|i| as_int(layout.y_index(i)))
        .collect::<Result<_, _>>()?;
    // Preparation-cost coefficients carry no probability or lambda weighting,
    // so the objective row can be read back directly as unit costs.
    let first_stage: f64 = prepared
        .iter()
        .enumerate()
        .map(|(i, y)| model.objective[layout.y_index(i)] * *y as f64)
        .sum();

    let probs = &model.meta.probabilities;
    let mut scenarios = Vec::with_capacity(layout.num_scenarios);
    let mut expected_transport = 0.0;
    let mut expected_unmet = 0.0;
    let mut expected_emissions_penalty = 0.0;
    for w in 0..layout.num_scenarios {
        let mut flows = Vec::new();
        let mut transport_cost = 0.0;
        let mut emissions = 0.0;
        for c in layout.scenario_cells[w].clone() {
            let q = as_int(layout.x_index(c))?;
            let cell = &layout.x_cells[c];
            if q != 0 {
                flows.push(Flow {
                    origin: cell.origin,
                    hub: cell.hub,
                    train: cell.train,
                    period: cell.period,
                    quantity: q,
                });
            }
            transport_cost += cell.cost * q as f64;
            emissions += cell.emission * q as f64;
        }
        let unmet: Vec<i64> = (0..layout.num_trains)
            .map(|n| as_int(layout.u_index(n, w)))
            .collect::<Result<_, _>>()?;
        let inventory: Vec<i64> = (0..layout.total_stops)
            .map(|slot| as_int(layout.i_start() + w * layout.total_stops + slot))
            .collect::<Result<_, _>>()?;
        let unmet_cost =
            model.meta.unmet_penalty[w] * unmet.iter().sum::<i64>() as f64;
        let excess_emissions = values[layout.eta_index(w)];
        let tail_excess = values[layout.xi_index(w)];
        expected_transport += probs[w] * transport_cost;
        expected_unmet += probs[w] * unmet_cost;
        expected_emissions_penalty +=
            probs[w] * model.meta.emissions_price * excess_emissions;
        scenarios.push(ScenarioOutcome {
            probability: probs[w],
            flows,
            unmet,
            inventory,
            transport_cost,
            unmet_cost,
            second_stage_cost: transport_cost + unmet_cost,
            emissions,
            excess_emissions,
            tail_excess,
        });
    }

    let threshold = values[layout.theta()];
    let tail = 1.0 - model.meta.risk.alpha;
    let cvar = threshold
        + probs
            .iter()
            .zip(&scenarios)
            .map(|(p, o)| p * o.tail_excess)
            .sum::<f64>()
            / tail;

    let breakdown = CostBreakdown {
        lambda: model.meta.risk.lambda,
        first_stage,
        expected_transport,
        expected_unmet,
        expected_emissions_penalty,
        cvar,
    };
    let objective = model.objective_value(values);
    let recombined = breakdown.total();
    if (recombined - objective).abs() > 1e-6 * objective.abs().max(1.0) {
        return Err(DecodeError::Mismatch {
            breakdown: recombined,
            objective,
        });
    }

    Ok(Plan {
        objective,
        prepared,
        threshold,
        cvar,
        scenarios,
        breakdown,
    })
}
