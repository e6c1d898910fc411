//! Deterministic-equivalent MILP assembly.
//!
//! [`build_milp`] turns an instance plus a scenario set into one explicit
//! mixed-integer program: first-stage preparation decisions shared across
//! scenarios, per-scenario dispatch/recourse blocks, and the mean-risk
//! objective that blends expected second-stage cost with its CVaR through a
//! threshold variable and per-scenario tail-excess slacks.

mod layout;
mod lp_text;
mod plan;

pub use layout::{VarRef, VariableLayout, XCell};
pub use lp_text::write_lp;
pub use plan::{decode, CostBreakdown, DecodeError, Flow, Plan, ScenarioOutcome};

use crate::instance::{Instance, ResolvedInstance};
use crate::risk::RiskParams;
use crate::scenario::ScenarioSet;
use crate::validation::ValidationReport;
use serde::Serialize;

/// Row comparison sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Column domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

/// One linear constraint, sparse over column indices.
#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// One decision variable with its bounds.
#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

/// Problem data the model carries beyond the matrix, needed to interpret
/// solutions (decode, reporting, repair heuristics).
#[derive(Debug, Clone)]
pub struct ModelMeta {
    pub risk: RiskParams,
    pub probabilities: Vec<f64>,
    /// Effective unmet-demand penalty per scenario.
    pub unmet_penalty: Vec<f64>,
    /// Price per unit of emissions above the cap.
    pub emissions_price: f64,
    /// Effective emissions cap (after any override).
    pub epsilon: f64,
    /// Demand per (scenario, train).
    pub demand: Vec<Vec<i64>>,
    pub use_transfer: bool,
    pub linking: bool,
}

/// A fully assembled mixed-integer linear program.
#[derive(Debug, Clone)]
pub struct MilpModel {
    /// Minimization objective, dense over columns.
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub columns: Vec<Column>,
    pub layout: VariableLayout,
    pub meta: ModelMeta,
    /// Per-scenario second-stage cost expression (transport + unmet penalty),
    /// sparse over columns. Shared by the CVaR rows and by reporting.
    scenario_cost: Vec<Vec<(usize, f64)>>,
}

/// Build-time options beyond the risk parameters.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Replace the instance's emissions cap for this build.
    pub epsilon_override: Option<f64>,
    /// Charge transfer costs and delays at the hubs.
    pub use_transfer: bool,
    /// Emit dispatch indicator columns and their linking rows.
    pub linking: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            epsilon_override: None,
            use_transfer: false,
            linking: true,
        }
    }
}

/// Errors rejecting a model build.
#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("REJECT_ALPHA: tail level {0} must lie in [0, 1)")]
    RejectAlpha(f64),
    #[error("REJECT_LAMBDA: risk weight {0} must lie in [0, 1]")]
    RejectLambda(f64),
    #[error("instance failed validation:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("scenario set failed validation:\n{0}")]
    InvalidScenarios(ValidationReport),
}

/// Size census of a model, derived from its layout in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelCensus {
    pub columns: usize,
    pub rows: usize,
    pub cells: usize,
    pub integer_columns: usize,
}

impl MilpModel {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    /// Expected column/row counts given the layout's shape. The builder
    /// asserts this census against the assembled matrix on every build.
    pub fn census(&self) -> ModelCensus {
        let l = &self.layout;
        let o = l.num_origins;
        let h = l.num_cells();
        let s = l.num_scenarios;
        let n = l.num_trains;
        let r = l.total_stops;
        let z = if l.with_linking { h } else { 0 };
        let columns = o + h + z + s * n + s * r + s + s + 1;
        // Per scenario: supply (O), stop capacity (R), linking (that
        // scenario's cells), emissions (1), inventory (R), demand (N),
        // final inventory (N), CVaR tail (1).
        let link_rows = if l.with_linking { h } else { 0 };
        let rows = s * o + s * r + link_rows + s + s * r + s * n + s * n + s;
        let integer_columns = o + h + z + s * n + s * r;
        ModelCensus {
            columns,
            rows,
            cells: h,
            integer_columns,
        }
    }

    /// Sparse expression of a scenario's second-stage cost
    /// (transport plus unmet-demand penalty).
    pub fn scenario_cost_expr(&self, scenario: usize) -> &[(usize, f64)] {
        &self.scenario_cost[scenario]
    }

    /// Evaluate a sparse expression against a solution vector.
    pub fn eval_expr(expr: &[(usize, f64)], values: &[f64]) -> f64 {
        expr.iter().map(|&(c, a)| a * values[c]).sum()
    }

    /// Objective value of a solution vector.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(values)
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Pin the first-stage preparation columns to a given decision.
    pub fn fix_first_stage(&mut self, prepared: &[i64]) {
        assert_eq!(prepared.len(), self.layout.num_origins);
        for (origin, &value) in prepared.iter().enumerate() {
            let col = self.layout.y_index(origin);
            self.columns[col].lower = value as f64;
            self.columns[col].upper = value as f64;
        }
    }
}

/// Largest useful flow for a dispatch cell: the tightest of the origin's
/// preparation cap, the train's capacity at the hub, and the scenario demand.
pub fn big_m(prepare_cap: i64, stop_capacity: i64, demand: i64) -> i64 {
    prepare_cap.min(stop_capacity).min(demand)
}

/// Assemble the deterministic equivalent for `inst` under `scen`.
///
/// The instance and scenario set are re-validated here; models are only ever
/// built from clean data. Dispatch columns exist exactly for the
/// time-feasible cells (shipment reaches the hub no later than the train's
/// departure, counting transfer delay when enabled), so the schedule gating
/// is enforced by variable elimination rather than by rows.
pub fn build_milp(
    inst: &Instance,
    scen: &ScenarioSet,
    risk: RiskParams,
    opts: &BuildOptions,
) -> Result<MilpModel, BuildError> {
    if !(0.0..1.0).contains(&risk.alpha) {
        return Err(BuildError::RejectAlpha(risk.alpha));
    }
    if !(0.0..=1.0).contains(&risk.lambda) || !risk.lambda.is_finite() {
        return Err(BuildError::RejectLambda(risk.lambda));
    }
    let inst_report = crate::instance::validate_instance(inst);
    if !inst_report.is_ok() {
        return Err(BuildError::InvalidInstance(inst_report));
    }
    let scen_report = crate::scenario::validate_scenarios(scen, inst);
    if !scen_report.is_ok() {
        return Err(BuildError::InvalidScenarios(scen_report));
    }

    let res = ResolvedInstance::new(inst);
    let num_origins = inst.origins.len();
    let num_trains = inst.trains.len();
    let num_scenarios = scen.len();
    let total_stops = inst.total_stops();
    let epsilon = opts.epsilon_override.unwrap_or(inst.emissions.cap);

    // Resolve scenario tables to dense index form.
    let mut demand = vec![vec![0i64; num_trains]; num_scenarios];
    let mut capacity = vec![vec![0i64; total_stops]; num_scenarios];
    let mut unmet_penalty = vec![0f64; num_scenarios];
    let probabilities: Vec<f64> = scen.scenarios.iter().map(|s| s.probability).collect();
    for (w, sc) in scen.scenarios.iter().enumerate() {
        unmet_penalty[w] = sc.unmet_penalty.unwrap_or(inst.cost.unmet_penalty);
        for (n, train) in inst.trains.iter().enumerate() {
            demand[w][n] = sc.demand[&train.id];
            for (pos, &(j, _)) in res.stops[n].iter().enumerate() {
                let hub_id = &inst.hubs[j].id;
                capacity[w][res.stop_offset[n] + pos] = sc.capacity[hub_id][&train.id];
            }
        }
    }

    // Enumerate dispatch cells in (scenario, train, stop, origin, period)
    // order; scenarios form contiguous runs.
    let mut x_cells: Vec<XCell> = Vec::new();
    let mut scenario_cells = Vec::with_capacity(num_scenarios);
    for w in 0..num_scenarios {
        let begin = x_cells.len();
        for n in 0..num_trains {
            for (pos, &(j, departure)) in res.stops[n].iter().enumerate() {
                for i in 0..num_origins {
                    let arc = match res.arcs[i].get(&j) {
                        Some(a) => *a,
                        None => continue,
                    };
                    let lead = if opts.use_transfer {
                        arc.travel_time + arc.transfer_time
                    } else {
                        arc.travel_time
                    };
                    let cost = if opts.use_transfer {
                        arc.cost + arc.transfer_cost
                    } else {
                        arc.cost
                    };
                    for t in 0..inst.periods {
                        if t as i64 + lead > departure {
                            // Departures are fixed; later periods only get
                            // later, so the whole tail is infeasible.
                            break;
                        }
                        let m = big_m(
                            inst.origins[i].max_prepare,
                            capacity[w][res.stop_offset[n] + pos],
                            demand[w][n],
                        );
                        x_cells.push(XCell {
                            origin: i,
                            hub: j,
                            train: n,
                            stop: pos,
                            period: t,
                            scenario: w,
                            cost,
                            emission: inst.emissions.rate.at(t) * arc.travel_time as f64,
                            big_m: m,
                        });
                    }
                }
            }
        }
        scenario_cells.push(begin..x_cells.len());
    }

    let layout = VariableLayout {
        num_origins,
        num_trains,
        num_scenarios,
        stop_offset: res.stop_offset.clone(),
        total_stops,
        x_cells,
        scenario_cells,
        with_linking: opts.linking,
    };

    // Columns and objective.
    let ncols = layout.num_vars();
    let mut columns = Vec::with_capacity(ncols);
    let mut objective = vec![0.0; ncols];
    let lambda = risk.lambda;
    let tail = 1.0 - risk.alpha;

    for (i, origin) in inst.origins.iter().enumerate() {
        columns.push(Column {
            name: format!("y_{}", origin.id),
            lower: 0.0,
            upper: origin.max_prepare as f64,
            kind: VarKind::Integer,
        });
        objective[layout.y_index(i)] = origin.prep_cost;
    }
    for cell in &layout.x_cells {
        columns.push(Column {
            name: format!(
                "x_{}_{}_{}_t{}_s{}",
                inst.origins[cell.origin].id,
                inst.hubs[cell.hub].id,
                inst.trains[cell.train].id,
                cell.period,
                cell.scenario
            ),
            lower: 0.0,
            upper: cell.big_m as f64,
            kind: VarKind::Integer,
        });
    }
    for (c, cell) in layout.x_cells.iter().enumerate() {
        objective[layout.x_index(c)] =
            (1.0 - lambda) * probabilities[cell.scenario] * cell.cost;
    }
    if opts.linking {
        for cell in &layout.x_cells {
            columns.push(Column {
                name: format!(
                    "z_{}_{}_{}_t{}_s{}",
                    inst.origins[cell.origin].id,
                    inst.hubs[cell.hub].id,
                    inst.trains[cell.train].id,
                    cell.period,
                    cell.scenario
                ),
                lower: 0.0,
                upper: 1.0,
                kind: VarKind::Binary,
            });
        }
    }
    for w in 0..num_scenarios {
        for (n, train) in inst.trains.iter().enumerate() {
            columns.push(Column {
                name: format!("u_{}_s{w}", train.id),
                lower: 0.0,
                upper: demand[w][n] as f64,
                kind: VarKind::Integer,
            });
            objective[layout.u_index(n, w)] =
                (1.0 - lambda) * probabilities[w] * unmet_penalty[w];
        }
    }
    for w in 0..num_scenarios {
        for (n, train) in inst.trains.iter().enumerate() {
            for (pos, &(j, _)) in res.stops[n].iter().enumerate() {
                columns.push(Column {
                    name: format!("inv_{}_{}_s{w}", train.id, inst.hubs[j].id),
                    lower: 0.0,
                    upper: f64::INFINITY,
                    kind: VarKind::Integer,
                });
                debug_assert_eq!(columns.len() - 1, layout.i_index(n, pos, w));
            }
        }
    }
    for w in 0..num_scenarios {
        columns.push(Column {
            name: format!("eta_s{w}"),
            lower: 0.0,
            upper: f64::INFINITY,
            kind: VarKind::Continuous,
        });
        objective[layout.eta_index(w)] = inst.cost.emissions_penalty * probabilities[w];
    }
    for w in 0..num_scenarios {
        columns.push(Column {
            name: format!("xi_s{w}"),
            lower: 0.0,
            upper: f64::INFINITY,
            kind: VarKind::Continuous,
        });
        objective[layout.xi_index(w)] = lambda * probabilities[w] / tail;
    }
    columns.push(Column {
        name: "theta".to_string(),
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
        kind: VarKind::Continuous,
    });
    objective[layout.theta()] = lambda;
    debug_assert_eq!(columns.len(), ncols);

    // Second-stage cost expressions, one per scenario.
    let mut scenario_cost: Vec<Vec<(usize, f64)>> = Vec::with_capacity(num_scenarios);
    for w in 0..num_scenarios {
        let mut expr = Vec::new();
        for c in layout.scenario_cells[w].clone() {
            let cost = layout.x_cells[c].cost;
            if cost != 0.0 {
                expr.push((layout.x_index(c), cost));
            }
        }
        for n in 0..num_trains {
            if unmet_penalty[w] != 0.0 {
                expr.push((layout.u_index(n, w), unmet_penalty[w]));
            }
        }
        scenario_cost.push(expr);
    }

    // Rows, grouped per scenario.
    let mut rows: Vec<Row> = Vec::new();
    for w in 0..num_scenarios {
        let cells = layout.scenario_cells[w].clone();

        // Supply: an origin can dispatch at most what it prepared.
        for (i, origin) in inst.origins.iter().enumerate() {
            let mut terms: Vec<(usize, f64)> = cells
                .clone()
                .filter(|&c| layout.x_cells[c].origin == i)
                .map(|c| (layout.x_index(c), 1.0))
                .collect();
            terms.push((layout.y_index(i), -1.0));
            rows.push(Row {
                name: format!("s{w}_supply_{}", origin.id),
                terms,
                sense: Sense::Le,
                rhs: 0.0,
            });
        }

        // Stop capacity: loadings at a call cannot exceed the train's room.
        for n in 0..num_trains {
            for (pos, &(j, _)) in res.stops[n].iter().enumerate() {
                let terms: Vec<(usize, f64)> = cells
                    .clone()
                    .filter(|&c| {
                        let cell = &layout.x_cells[c];
                        cell.train == n && cell.stop == pos
                    })
                    .map(|c| (layout.x_index(c), 1.0))
                    .collect();
                rows.push(Row {
                    name: format!("s{w}_cap_{}_{}", inst.trains[n].id, inst.hubs[j].id),
                    terms,
                    sense: Sense::Le,
                    rhs: capacity[w][res.stop_offset[n] + pos] as f64,
                });
            }
        }

        // Linking: flow only through opened cells.
        if opts.linking {
            for c in cells.clone() {
                let cell = &layout.x_cells[c];
                let mut terms = vec![(layout.x_index(c), 1.0)];
                if cell.big_m != 0 {
                    terms.push((layout.z_index(c), -(cell.big_m as f64)));
                }
                rows.push(Row {
                    name: format!(
                        "s{w}_link_{}_{}_{}_t{}",
                        inst.origins[cell.origin].id,
                        inst.hubs[cell.hub].id,
                        inst.trains[cell.train].id,
                        cell.period
                    ),
                    terms,
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
        }

        // Emissions: total road emissions beyond the cap spill into eta.
        let mut emis_terms: Vec<(usize, f64)> = cells
            .clone()
            .filter(|&c| layout.x_cells[c].emission != 0.0)
            .map(|c| (layout.x_index(c), layout.x_cells[c].emission))
            .collect();
        emis_terms.push((layout.eta_index(w), -1.0));
        rows.push(Row {
            name: format!("s{w}_emis"),
            terms: emis_terms,
            sense: Sense::Le,
            rhs: epsilon,
        });

        // Inventory: on-board load after each call accumulates that call's
        // loadings (trains only take on containers in this network).
        for n in 0..num_trains {
            for (pos, &(j, _)) in res.stops[n].iter().enumerate() {
                let mut terms = vec![(layout.i_index(n, pos, w), 1.0)];
                if pos > 0 {
                    terms.push((layout.i_index(n, pos - 1, w), -1.0));
                }
                for c in cells.clone() {
                    let cell = &layout.x_cells[c];
                    if cell.train == n && cell.stop == pos {
                        terms.push((layout.x_index(c), -1.0));
                    }
                }
                rows.push(Row {
                    name: format!("s{w}_inv_{}_{}", inst.trains[n].id, inst.hubs[j].id),
                    terms,
                    sense: Sense::Eq,
                    rhs: 0.0,
                });
            }
        }

        // Demand balance: delivered plus unmet equals demand.
        for n in 0..num_trains {
            let mut terms: Vec<(usize, f64)> = cells
                .clone()
                .filter(|&c| layout.x_cells[c].train == n)
                .map(|c| (layout.x_index(c), 1.0))
                .collect();
            terms.push((layout.u_index(n, w), 1.0));
            rows.push(Row {
                name: format!("s{w}_dem_{}", inst.trains[n].id),
                terms,
                sense: Sense::Eq,
                rhs: demand[w][n] as f64,
            });
        }

        // Final inventory cannot exceed what the destination ordered.
        for n in 0..num_trains {
            let last = res.stops[n].len() - 1;
            rows.push(Row {
                name: format!("s{w}_invfin_{}", inst.trains[n].id),
                terms: vec![(layout.i_index(n, last, w), 1.0)],
                sense: Sense::Le,
                rhs: demand[w][n] as f64,
            });
        }

        // CVaR tail: second-stage cost above the threshold goes into xi.
        let mut cvar_terms = scenario_cost[w].clone();
        cvar_terms.push((layout.xi_index(w), -1.0));
        cvar_terms.push((layout.theta(), -1.0));
        rows.push(Row {
            name: format!("s{w}_cvar"),
            terms: cvar_terms,
            sense: Sense::Le,
            rhs: 0.0,
        });
    }

    let model = MilpModel {
        objective,
        rows,
        columns,
        layout,
        meta: ModelMeta {
            risk,
            probabilities,
            unmet_penalty,
            emissions_price: inst.cost.emissions_penalty,
            epsilon,
            demand,
            use_transfer: opts.use_transfer,
            linking: opts.linking,
        },
        scenario_cost,
    };

    // Size census: the assembled matrix must match the closed-form counts.
    let census = model.census();
    assert_eq!(
        model.columns.len(),
        census.columns,
        "column census mismatch"
    );
    assert_eq!(model.rows.len(), census.rows, "row census mismatch");
    assert_eq!(
        model
            .columns
            .iter()
            .filter(|c| c.kind != VarKind::Continuous)
            .count(),
        census.integer_columns,
        "integer-column census mismatch"
    );

    Ok(model)
}
