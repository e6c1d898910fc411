//! End-to-end smoke checks on the shipped fixtures.

use planner_core::fileio::load_problem;
use planner_core::model::{build_milp, decode, BuildOptions};
use planner_core::risk::RiskParams;
use planner_core::solver::{check_solution, solve_milp, MipStatus, SolverConfig};
use std::path::Path;

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[test]
fn tiny_fixture_reaches_known_optimum() {
    let (inst, scen) = load_problem(&fixture("tiny.json")).expect("tiny fixture loads");
    let model = build_milp(&inst, &scen, RiskParams::neutral(), &BuildOptions::default())
        .expect("tiny model builds");
    let result = solve_milp(&model, &SolverConfig::default()).expect("tiny model solves");
    assert_eq!(result.status, MipStatus::Optimal);
    // Prepare 3, ship 3 at cost 10, one container unserved at penalty 100:
    // 3*2 + 3*10 + 100 = 136, emissions 6 within the free cap.
    let obj = result.objective.expect("objective");
    assert!((obj - 136.0).abs() < 1e-6, "objective {obj}");
    let values = result.solution.as_ref().expect("solution");
    assert!(check_solution(&model, values, 1e-6).is_empty());
    let plan = decode(&model, values).expect("plan decodes");
    assert_eq!(plan.prepared, vec![3]);
    assert_eq!(plan.scenarios[0].unmet, vec![1]);
    assert!((plan.scenarios[0].emissions - 6.0).abs() < 1e-9);
}

#[test]
fn medium_fixture_solves_at_a_risky_weighting() {
    let (inst, scen) = load_problem(&fixture("medium.json")).expect("medium fixture loads");
    let risk = RiskParams::new(0.5, 0.75).unwrap();
    let model = build_milp(&inst, &scen, risk, &BuildOptions::default()).expect("model builds");
    let census = model.census();
    assert_eq!(census.rows, 368, "row census");
    assert_eq!(census.columns, 636, "column census");
    let started = std::time::Instant::now();
    let result = solve_milp(&model, &SolverConfig::default()).expect("medium model solves");
    eprintln!(
        "medium: {:?} obj {:?} nodes {} lp_iters {} in {:.2}s",
        result.status,
        result.objective,
        result.nodes,
        result.lp_iterations,
        started.elapsed().as_secs_f64()
    );
    assert_eq!(result.status, MipStatus::Optimal);
    let values = result.solution.as_ref().expect("solution");
    assert!(check_solution(&model, values, 1e-6).is_empty());
    let plan = decode(&model, values).expect("plan decodes");
    assert!(plan.objective > 0.0);
}
