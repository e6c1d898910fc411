//! Round-and-repair: turn an LP-relaxation point into a feasible incumbent.
//!
//! The model's structure makes repair cheap: preparation rounds up (keeping
//! supply rows valid), flows round down (keeping supply, capacity, and demand
//! rows valid), and every other variable is determined from the flows —
//! indicators by sign, unmet demand by the balance rows, inventory by the
//! running loadings, emission excess by the cap, and the CVaR threshold by a
//! quantile scan of the repaired cost distribution. When the relaxation
//! already has integral flows and preparation, the repaired point costs
//! exactly the LP bound, which closes the node on the spot.

use crate::model::MilpModel;
use crate::risk::cvar_primal;
use crate::solver::check_solution;

/// Build a feasible integer point near the LP point, or `None` when the
/// repair fails its own audit.
pub(crate) fn round_and_repair(model: &MilpModel, lp: &[f64]) -> Option<(f64, Vec<f64>)> {
    let layout = &model.layout;
    let meta = &model.meta;
    let mut out = vec![0.0; layout.num_vars()];

    // First stage: round up within the origin's cap (the cap is integral).
    for i in 0..layout.num_origins {
        let col = layout.y_index(i);
        let v = (lp[col] - 1e-9).ceil().max(0.0);
        out[col] = v.clamp(model.columns[col].lower, model.columns[col].upper);
    }

    // Flows: round down; everything downstream is derived from these.
    for c in 0..layout.num_cells() {
        let col = layout.x_index(c);
        let v = (lp[col] + 1e-9).floor().max(0.0);
        out[col] = v.min(model.columns[col].upper);
        if layout.with_linking {
            out[layout.z_index(c)] = if out[col] > 0.0 { 1.0 } else { 0.0 };
        }
    }

    let mut second_stage = vec![0.0; layout.num_scenarios];
    for w in 0..layout.num_scenarios {
        let mut emissions = 0.0;
        let mut delivered = vec![0i64; layout.num_trains];
        let mut loaded_at = vec![0.0; layout.total_stops];
        let mut transport = 0.0;
        for c in layout.scenario_cells[w].clone() {
            let cell = &layout.x_cells[c];
            let q = out[layout.x_index(c)];
            transport += cell.cost * q;
            emissions += cell.emission * q;
            delivered[cell.train] += q as i64;
            loaded_at[layout.stop_offset[cell.train] + cell.stop] += q;
        }
        for n in 0..layout.num_trains {
            let unmet = (meta.demand[w][n] - delivered[n]) as f64;
            debug_assert!(unmet >= 0.0, "flows exceed demand after rounding down");
            out[layout.u_index(n, w)] = unmet;
            let stops = if n + 1 < layout.num_trains {
                layout.stop_offset[n + 1] - layout.stop_offset[n]
            } else {
                layout.total_stops - layout.stop_offset[n]
            };
            let mut on_board = 0.0;
            for pos in 0..stops {
                on_board += loaded_at[layout.stop_offset[n] + pos];
                out[layout.i_index(n, pos, w)] = on_board;
            }
        }
        let unmet_cost: f64 = (0..layout.num_trains)
            .map(|n| out[layout.u_index(n, w)] * meta.unmet_penalty[w])
            .sum();
        out[layout.eta_index(w)] = (emissions - meta.epsilon).max(0.0);
        second_stage[w] = transport + unmet_cost;
    }

    // CVaR block: the threshold that minimizes the tail charge is the
    // alpha-quantile of the repaired cost distribution.
    let threshold = match cvar_primal(&second_stage, &meta.probabilities, meta.risk.alpha) {
        Ok(est) => est.var,
        Err(_) => return None,
    };
    out[layout.theta()] = threshold;
    for w in 0..layout.num_scenarios {
        out[layout.xi_index(w)] = (second_stage[w] - threshold).max(0.0);
    }

    // Refuse to hand back anything that does not audit clean.
    let audit = check_solution(model, &out, 1e-6);
    if !audit.is_empty() {
        debug_assert!(false, "round-and-repair produced an infeasible point: {audit:?}");
        return None;
    }
    Some((model.objective_value(&out), out))
}
