//! Best-bound branch and bound over the simplex relaxation.
//!
//! Node selection is best-bound (lowest parent relaxation value, FIFO on
//! ties) with a depth-first plunge after each new incumbent; branching picks
//! the most fractional integer column (ties to the lowest index). A
//! round-and-repair heuristic runs on the root relaxation so models whose
//! relaxations are nearly integral close without branching. All rules are
//! deterministic: identical models and configs explore identical trees.

use super::heuristic::round_and_repair;
use super::simplex::{solve_lp_form, LpForm, LpStatus};
use crate::model::{MilpModel, Sense, VarKind};
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

/// Integrality tolerance: values this close to an integer count as integral.
pub const INT_TOL: f64 = 1e-6;

/// Search controls.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative optimality gap at which the search may stop.
    pub gap: f64,
    /// Wall-clock budget in seconds.
    pub time_limit: Option<f64>,
    /// Cap on processed nodes.
    pub node_limit: Option<usize>,
    /// Record a per-node log row in the result.
    pub log_nodes: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap: 1e-6,
            time_limit: None,
            node_limit: None,
            log_nodes: false,
        }
    }
}

/// Terminal state of a MILP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MipStatus {
    /// Proven within the configured gap.
    Optimal,
    /// Stopped at the node limit with a residual gap.
    GapLimit,
    /// Stopped at the wall-clock limit.
    TimeLimit,
    Infeasible,
}

/// One row of the node log (enabled via [`SolverConfig::log_nodes`]).
#[derive(Debug, Clone, Serialize)]
pub struct NodeLogRow {
    pub node: usize,
    pub best_bound: f64,
    pub incumbent: Option<f64>,
    pub gap: f64,
    pub elapsed_seconds: f64,
}

/// Outcome of a branch-and-bound run.
#[derive(Debug, Clone)]
pub struct MipResult {
    pub status: MipStatus,
    pub objective: Option<f64>,
    pub solution: Option<Vec<f64>>,
    /// Best proven lower bound on the optimum.
    pub best_bound: f64,
    /// Relative gap between incumbent and bound.
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_seconds: f64,
    pub node_log: Vec<NodeLogRow>,
}

/// Hard failures (numerical breakdown in the LP core).
#[derive(Debug, Clone, thiserror::Error)]
pub enum SolveError {
    #[error("relaxation at node {node} ended with {status:?}")]
    LpFailure { node: usize, status: LpStatus },
}

struct Node {
    bound: f64,
    /// Effective (lower, upper) overrides accumulated along the branch path.
    overrides: Vec<(usize, f64, f64)>,
    open: bool,
}

#[derive(PartialEq)]
struct HeapKey {
    bound: f64,
    id: usize,
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.id.cmp(&other.id))
    }
}

/// Relative MIP gap between an incumbent and a bound.
fn relative_gap(incumbent: Option<f64>, bound: f64) -> f64 {
    match incumbent {
        None => f64::INFINITY,
        Some(inc) => {
            if bound.is_infinite() {
                0.0
            } else {
                (inc - bound).max(0.0) / inc.abs().max(1.0)
            }
        }
    }
}

/// Solve the LP relaxation of a model (integrality dropped, bounds kept).
pub fn solve_lp(model: &MilpModel) -> super::simplex::LpSolution {
    let mats = Matrices::new(model);
    mats.solve_with_bounds(&mats.lower, &mats.upper)
}

/// Column-major matrix data shared by all node solves.
struct Matrices {
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    senses: Vec<Sense>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    integer_cols: Vec<usize>,
}

impl Matrices {
    fn new(model: &MilpModel) -> Self {
        let n = model.columns.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, row) in model.rows.iter().enumerate() {
            for &(c, v) in &row.terms {
                if v != 0.0 {
                    cols[c].push((r, v));
                }
            }
        }
        Matrices {
            cols,
            cost: model.objective.clone(),
            senses: model.rows.iter().map(|r| r.sense).collect(),
            rhs: model.rows.iter().map(|r| r.rhs).collect(),
            lower: model.columns.iter().map(|c| c.lower).collect(),
            upper: model.columns.iter().map(|c| c.upper).collect(),
            integer_cols: model
                .columns
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kind != VarKind::Continuous)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    fn solve_with_bounds(&self, lower: &[f64], upper: &[f64]) -> super::simplex::LpSolution {
        solve_lp_form(&LpForm {
            cols: &self.cols,
            cost: &self.cost,
            lower,
            upper,
            senses: &self.senses,
            rhs: &self.rhs,
        })
    }

    /// Dual fixing: pin any column whose movement toward one of its finite
    /// bounds never worsens the objective and only relaxes the rows it
    /// appears in. Such columns (zero-cost linking binaries being the chief
    /// case) otherwise surface as fractional LP values and draw pointless
    /// branching; fixing them preserves the optimal value of every node LP
    /// and of the integer program, and the pinned value stays inside the
    /// original bounds, so incumbents remain feasible for the input model.
    fn dual_fix(&mut self) {
        for j in 0..self.cost.len() {
            if self.lower[j] >= self.upper[j] {
                continue; // already fixed
            }
            let up_ok = self.upper[j].is_finite()
                && self.cost[j] <= 0.0
                && self.cols[j].iter().all(|&(r, v)| match self.senses[r] {
                    Sense::Le => v <= 0.0,
                    Sense::Ge => v >= 0.0,
                    Sense::Eq => false,
                });
            let down_ok = self.lower[j].is_finite()
                && self.cost[j] >= 0.0
                && self.cols[j].iter().all(|&(r, v)| match self.senses[r] {
                    Sense::Le => v >= 0.0,
                    Sense::Ge => v <= 0.0,
                    Sense::Eq => false,
                });
            if self.cost[j] < 0.0 && up_ok {
                self.lower[j] = self.upper[j];
            } else if down_ok {
                self.upper[j] = self.lower[j];
            } else if up_ok {
                self.lower[j] = self.upper[j];
            }
        }
    }
}

/// Exact branch-and-bound solve of a model.
pub fn solve_milp(model: &MilpModel, cfg: &SolverConfig) -> Result<MipResult, SolveError> {
    let start = Instant::now();
    let mut mats = Matrices::new(model);
    mats.dual_fix();

    let mut arena: Vec<Node> = vec![Node {
        bound: f64::NEG_INFINITY,
        overrides: Vec::new(),
        open: true,
    }];
    let mut heap: BinaryHeap<Reverse<HeapKey>> = BinaryHeap::new();
    heap.push(Reverse(HeapKey {
        bound: f64::NEG_INFINITY,
        id: 0,
    }));
    let mut dfs: Vec<usize> = Vec::new();
    let mut plunging = false;

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut best_bound_seen = f64::NEG_INFINITY;
    let mut nodes = 0usize;
    let mut lp_iterations = 0usize;
    let mut node_log = Vec::new();
    let mut status: Option<MipStatus> = None;

    let mut lower = mats.lower.clone();
    let mut upper = mats.upper.clone();

    'search: loop {
        // Pick the next open node: plunge stack first, then best bound.
        let mut from_plunge = false;
        let mut picked: Option<usize> = None;
        if plunging {
            while let Some(id) = dfs.pop() {
                if arena[id].open {
                    picked = Some(id);
                    from_plunge = true;
                    break;
                }
            }
            if picked.is_none() {
                plunging = false;
            }
        }
        if picked.is_none() {
            while let Some(Reverse(key)) = heap.pop() {
                if arena[key.id].open {
                    picked = Some(key.id);
                    break;
                }
            }
        }
        let id = match picked {
            Some(id) => id,
            None => break 'search,
        };
        arena[id].open = false;

        if let Some(limit) = cfg.time_limit {
            if start.elapsed().as_secs_f64() > limit {
                status = Some(MipStatus::TimeLimit);
                break 'search;
            }
        }
        if let Some(limit) = cfg.node_limit {
            if nodes >= limit {
                status = Some(MipStatus::GapLimit);
                break 'search;
            }
        }

        // Cutoff: a node whose bound cannot strictly improve the incumbent.
        let cutoff = incumbent
            .as_ref()
            .map(|(obj, _)| obj - 1e-9 * obj.abs().max(1.0));
        if let Some(cut) = cutoff {
            if arena[id].bound >= cut {
                if from_plunge {
                    plunging = false;
                }
                continue;
            }
        }

        lower.copy_from_slice(&mats.lower);
        upper.copy_from_slice(&mats.upper);
        for &(col, lo, up) in &arena[id].overrides {
            lower[col] = lo;
            upper[col] = up;
        }
        let lp = mats.solve_with_bounds(&lower, &upper);
        lp_iterations += lp.iterations;
        nodes += 1;

        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                if from_plunge {
                    plunging = false;
                }
                log_node(&mut node_log, cfg, nodes, &arena, &incumbent, best_bound_seen, &start);
                continue;
            }
            other => return Err(SolveError::LpFailure { node: nodes, status: other }),
        }

        let node_bound = lp.objective.max(arena[id].bound);
        if let Some(cut) = cutoff {
            if node_bound >= cut {
                if from_plunge {
                    plunging = false;
                }
                log_node(&mut node_log, cfg, nodes, &arena, &incumbent, best_bound_seen, &start);
                continue;
            }
        }

        // Branching candidate: most fractional integer column.
        let mut branch: Option<(usize, f64, f64)> = None; // (col, value, score)
        for &col in &mats.integer_cols {
            let v = lp.values[col];
            let frac = v - v.floor();
            let dist = frac.min(1.0 - frac);
            if dist > INT_TOL && branch.map_or(true, |(_, _, s)| dist > s) {
                branch = Some((col, v, dist));
            }
        }

        match branch {
            None => {
                // Integral relaxation: repair determines the continuous block
                // and certifies feasibility. Fall back to a plain snap if the
                // repair ever declines.
                let candidate = round_and_repair(model, &lp.values).or_else(|| {
                    let mut snapped = lp.values.clone();
                    for &col in &mats.integer_cols {
                        snapped[col] = snapped[col].round();
                    }
                    super::check_solution(model, &snapped, 1e-6)
                        .is_empty()
                        .then(|| (model.objective_value(&snapped), snapped))
                });
                if let Some((obj, vec)) = candidate {
                    if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                        incumbent = Some((obj, vec));
                        plunging = true;
                    }
                }
            }
            Some((col, v, _)) => {
                if id == 0 {
                    // Root heuristic: often lands exactly on the LP bound.
                    if let Some((obj, vec)) = round_and_repair(model, &lp.values) {
                        if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                            incumbent = Some((obj, vec));
                            plunging = true;
                        }
                    }
                }
                let mut down = arena[id].overrides.clone();
                set_override(&mut down, col, lower[col], v.floor());
                let mut up_ov = arena[id].overrides.clone();
                set_override(&mut up_ov, col, v.ceil(), upper[col]);
                for overrides in [down, up_ov] {
                    let child = Node {
                        bound: node_bound,
                        overrides,
                        open: true,
                    };
                    arena.push(child);
                    let cid = arena.len() - 1;
                    heap.push(Reverse(HeapKey {
                        bound: node_bound,
                        id: cid,
                    }));
                    dfs.push(cid);
                }
            }
        }

        // The proven bound is the worst open node (or the incumbent once the
        // tree is exhausted); it is nondecreasing because children inherit
        // their parent's relaxation value.
        best_bound_seen = best_bound_seen.max(open_bound(&arena, &incumbent));
        log_node(&mut node_log, cfg, nodes, &arena, &incumbent, best_bound_seen, &start);

        if incumbent.is_some() && relative_gap(incumbent.as_ref().map(|(o, _)| *o), best_bound_seen) <= cfg.gap {
            status = Some(MipStatus::Optimal);
            break 'search;
        }
    }

    let status = status.unwrap_or(if incumbent.is_some() {
        MipStatus::Optimal
    } else {
        MipStatus::Infeasible
    });
    let best_bound = match status {
        MipStatus::Optimal => {
            best_bound_seen.max(open_bound(&arena, &incumbent)).min(
                incumbent.as_ref().map(|(o, _)| *o).unwrap_or(f64::INFINITY),
            )
        }
        MipStatus::Infeasible => f64::INFINITY,
        _ => best_bound_seen,
    };
    let objective = incumbent.as_ref().map(|(o, _)| *o);
    let gap = relative_gap(objective, best_bound);
    Ok(MipResult {
        status,
        objective,
        solution: incumbent.map(|(_, v)| v),
        best_bound,
        gap,
        nodes,
        lp_iterations,
        wall_seconds: start.elapsed().as_secs_f64(),
        node_log,
    })
}

fn set_override(overrides: &mut Vec<(usize, f64, f64)>, col: usize, lo: f64, up: f64) {
    if let Some(entry) = overrides.iter_mut().find(|(c, _, _)| *c == col) {
        entry.1 = lo;
        entry.2 = up;
    } else {
        overrides.push((col, lo, up));
    }
}

fn open_bound(arena: &[Node], incumbent: &Option<(f64, Vec<f64>)>) -> f64 {
    let open_min = arena
        .iter()
        .filter(|n| n.open)
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);
    if open_min.is_finite() {
        open_min
    } else if open_min == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        // No open nodes: the tree is exhausted, the incumbent is proven.
        incumbent.as_ref().map(|(o, _)| *o).unwrap_or(f64::INFINITY)
    }
}

#[allow(clippy::too_many_arguments)]
fn log_node(
    log: &mut Vec<NodeLogRow>,
    cfg: &SolverConfig,
    nodes: usize,
    arena: &[Node],
    incumbent: &Option<(f64, Vec<f64>)>,
    best_bound_seen: f64,
    start: &Instant,
) {
    if !cfg.log_nodes {
        return;
    }
    let bound = best_bound_seen.max(open_bound(arena, incumbent));
    let inc = incumbent.as_ref().map(|(o, _)| *o);
    log.push(NodeLogRow {
        node: nodes,
        best_bound: bound,
        incumbent: inc,
        gap: relative_gap(inc, bound),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    });
}
