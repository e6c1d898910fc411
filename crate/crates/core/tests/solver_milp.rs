//! Branch-and-bound behavior: determinism, limit handling, relaxation
//! bounds, and the independent feasibility auditor.

use planner_core::fileio::load_problem;
use planner_core::model::{build_milp, BuildOptions};
use planner_core::risk::RiskParams;
use planner_core::solver::{
    check_solution, solve_lp, solve_milp, LpStatus, MipStatus, SolverConfig,
};
use planner_core::{Instance, ScenarioSet};
use std::path::Path;

fn fixture(name: &str) -> (Instance, ScenarioSet) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    load_problem(&path).expect("fixture loads")
}

#[test]
fn repeated_solves_are_bit_identical() {
    let (inst, scen) = fixture("medium.json");
    let risk = RiskParams::new(0.4, 0.75).unwrap();
    let model = build_milp(&inst, &scen, risk, &BuildOptions::default()).unwrap();
    let cfg = SolverConfig::default();
    let a = solve_milp(&model, &cfg).unwrap();
    let b = solve_milp(&model, &cfg).unwrap();
    assert_eq!(a.status, MipStatus::Optimal);
    assert_eq!(a.objective, b.objective, "objective must not drift");
    assert_eq!(a.solution, b.solution, "incumbent must not drift");
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.lp_iterations, b.lp_iterations);
}

#[test]
fn relaxation_never_exceeds_the_integer_optimum() {
    for name in ["tiny.json", "small.json", "medium.json"] {
        let (inst, scen) = fixture(name);
        let risk = RiskParams::new(0.3, 0.75).unwrap();
        let model = build_milp(&inst, &scen, risk, &BuildOptions::default()).unwrap();
        let lp = solve_lp(&model);
        assert_eq!(lp.status, LpStatus::Optimal, "{name}");
        let mip = solve_milp(&model, &SolverConfig::default()).unwrap();
        assert_eq!(mip.status, MipStatus::Optimal, "{name}");
        let obj = mip.objective.unwrap();
        assert!(
            lp.objective <= obj + 1e-6 * obj.abs().max(1.0),
            "{name}: LP bound {} above MILP optimum {obj}",
            lp.objective
        );
        assert!(
            mip.best_bound <= obj + 1e-9 * obj.abs().max(1.0),
            "{name}: reported bound above optimum"
        );
        assert!(mip.gap <= 1e-6, "{name}: gap {}", mip.gap);
    }
}

#[test]
fn infeasible_first_stage_fixing_is_reported_as_infeasible() {
    let (inst, scen) = fixture("tiny.json");
    let mut model =
        build_milp(&inst, &scen, RiskParams::neutral(), &BuildOptions::default()).unwrap();
    model.fix_first_stage(&[-1]);
    let result = solve_milp(&model, &SolverConfig::default()).unwrap();
    assert_eq!(result.status, MipStatus::Infeasible);
    assert!(result.solution.is_none());
    assert!(result.objective.is_none());
}

#[test]
fn zero_time_limit_stops_before_any_node() {
    let (inst, scen) = fixture("medium.json");
    let model =
        build_milp(&inst, &scen, RiskParams::neutral(), &BuildOptions::default()).unwrap();
    let cfg = SolverConfig {
        time_limit: Some(0.0),
        ..SolverConfig::default()
    };
    let result = solve_milp(&model, &cfg).unwrap();
    assert_eq!(result.status, MipStatus::TimeLimit);
}

#[test]
fn loose_gap_still_returns_a_certified_incumbent() {
    let (inst, scen) = fixture("medium.json");
    let risk = RiskParams::new(0.6, 0.9).unwrap();
    let model = build_milp(&inst, &scen, risk, &BuildOptions::default()).unwrap();
    let tight = solve_milp(&model, &SolverConfig::default()).unwrap();
    let loose = solve_milp(
        &model,
        &SolverConfig {
            gap: 0.25,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    assert_eq!(loose.status, MipStatus::Optimal);
    let exact = tight.objective.unwrap();
    let approx = loose.objective.unwrap();
    assert!(approx >= exact - 1e-9 * exact.abs().max(1.0));
    assert!(
        approx <= exact * 1.25 + 1e-9,
        "gap-limited incumbent {approx} strays past 25% of {exact}"
    );
    let values = loose.solution.as_ref().unwrap();
    assert!(check_solution(&model, values, 1e-6).is_empty());
}

#[test]
fn node_log_records_the_search_when_enabled() {
    let (inst, scen) = fixture("medium.json");
    let model =
        build_milp(&inst, &scen, RiskParams::neutral(), &BuildOptions::default()).unwrap();
    let cfg = SolverConfig {
        log_nodes: true,
        ..SolverConfig::default()
    };
    let result = solve_milp(&model, &cfg).unwrap();
    assert!(!result.node_log.is_empty());
    assert!(result.node_log.len() <= result.nodes.max(1));
    for row in &result.node_log {
        assert!(row.elapsed_seconds >= 0.0);
    }
}

#[test]
fn wall_clock_and_counters_are_populated() {
    let (inst, scen) = fixture("small.json");
    let model =
        build_milp(&inst, &scen, RiskParams::neutral(), &BuildOptions::default()).unwrap();
    let result = solve_milp(&model, &SolverConfig::default()).unwrap();
    assert!(result.nodes >= 1);
    assert!(result.lp_iterations >= 1);
    assert!(result.wall_seconds >= 0.0);
}

#[test]
fn auditor_reports_violations_with_named_locations() {
    let (inst, scen) = fixture("tiny.json");
    let model =
        build_milp(&inst, &scen, RiskParams::neutral(), &BuildOptions::default()).unwrap();
    // All-zero vector: demand row forces U = 4, so zero violates equality.
    let zeros = vec![0.0; model.num_cols()];
    let violations = check_solution(&model, &zeros, 1e-6);
    assert!(!violations.is_empty());
    let text = violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("\n");
    assert!(text.contains("s0_dem_T1"), "{text}");

    // A fractional prepare value trips the integrality audit.
    let mut frac = vec![0.0; model.num_cols()];
    frac[model.layout.y_index(0)] = 0.5;
    let violations = check_solution(&model, &frac, 1e-6);
    assert!(violations.iter().any(|v| v.to_string().contains("integrality")
        || v.to_string().contains("integral")),
        "{violations:?}");

    // Out-of-bounds flow trips the bound audit.
    let mut out = vec![0.0; model.num_cols()];
    out[model.layout.x_index(0)] = 99.0;
    let violations = check_solution(&model, &out, 1e-6);
    assert!(!violations.is_empty());
}

#[test]
fn costless_linking_binaries_do_not_blow_up_the_tree() {
    // Zero-cost binaries that only relax their rows (the big-M linking
    // columns) must be pinned before branching; left loose, their fractional
    // LP values draw the most-fractional rule into an exponential walk.
    // This shape previously needed ~25k nodes; pinned, a handful.
    use planner_core::generate::{synth_problem, SynthSpec};
    let spec = SynthSpec {
        origins: 2,
        hubs: 3,
        trains: 3,
        stops_per_train: 2,
        periods: 3,
        scenarios: 5,
    };
    let (inst, scen) = synth_problem(&spec, 1016);
    let cfg = SolverConfig::default();
    let mut results = Vec::new();
    for linking in [true, false] {
        let opts = BuildOptions {
            linking,
            ..BuildOptions::default()
        };
        let model = build_milp(&inst, &scen, RiskParams::neutral(), &opts).unwrap();
        let result = solve_milp(&model, &cfg).unwrap();
        assert_eq!(result.status, MipStatus::Optimal);
        assert!(
            result.nodes <= 100,
            "linking={linking}: {} nodes for a desk-size model",
            result.nodes
        );
        results.push(result.objective.unwrap());
    }
    assert!(
        (results[0] - results[1]).abs() <= 1e-9 * results[0].abs().max(1.0),
        "linking binaries carry no cost and must not move the optimum"
    );
}
