//! Sweep harness and reporting: grid shapes, cost decomposition, CSV
//! rendering, and problem-document handling.

use planner_core::experiments::{
    run_breakdown, run_capacity_grid, run_emissions_grid, run_risk_grid, SweepKind, SweepSpec,
};
use planner_core::fileio::{
    load_document, load_problem, resolve_scenarios, save_document, LoadError, ProblemDocument,
};
use planner_core::report::{
    breakdown_table, capacity_table, emissions_table, fmt_float, risk_table, stochastic_table,
    Cell, ReportTable,
};
use planner_core::risk::{stochastic_values, RiskParams};
use planner_core::model::BuildOptions;
use planner_core::solver::SolverConfig;
use planner_core::{Instance, ScenarioSet};
use std::path::Path;

fn fixture(name: &str) -> (Instance, ScenarioSet) {
    load_problem(&fixture_path(name)).expect("fixture loads")
}

fn fixture_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[test]
fn risk_grid_covers_the_cross_product_in_order() {
    let (inst, scen) = fixture("small.json");
    let spec = SweepSpec {
        lambda_grid: vec![0.0, 0.5],
        alpha_grid: vec![0.5, 0.75],
        ..SweepSpec::for_kind(SweepKind::RiskGrid)
    };
    let cells = run_risk_grid(&inst, &scen, &spec, &SolverConfig::default(), 1);
    assert_eq!(cells.len(), 4);
    let order: Vec<(f64, f64)> = cells.iter().map(|c| (c.lambda, c.alpha)).collect();
    assert_eq!(order, vec![(0.0, 0.5), (0.0, 0.75), (0.5, 0.5), (0.5, 0.75)]);
    for cell in &cells {
        assert_eq!(cell.status, "ok");
        assert!(cell.objective.is_finite());
        assert!(cell.cvar >= cell.var - 1e-9, "tail mean below the quantile");
        assert!(
            cell.cvar >= cell.expected_second_stage - 1e-9,
            "tail mean below the plain mean"
        );
        assert!(cell.expected_total >= cell.expected_second_stage);
        if cell.lambda == 0.0 {
            // With zero tail weight the objective is exactly the risk-free
            // expected total cost.
            assert!(
                (cell.objective - cell.expected_total).abs()
                    <= 1e-9 * cell.objective.abs().max(1.0),
                "obj {} vs expected total {}",
                cell.objective,
                cell.expected_total
            );
        }
    }
    // Identical plans at lambda = 0 regardless of alpha: the objective
    // ignores the tail, and var/cvar are recomputed from the plan itself.
    assert!((cells[0].objective - cells[1].objective).abs() < 1e-9);
}

#[test]
fn emissions_grid_marks_the_plateau_beyond_peak_emissions() {
    let (inst, scen) = fixture("small.json");
    // Max emissions: ship up to capacity {4, 2} with per-period rates {1, 2}
    // and travel time 1: worst case 4*2 = 8 units. Caps at 6 and 9 exceed
    // nothing the plan can emit only at 9+.
    let spec = SweepSpec {
        lambda_grid: vec![0.0],
        alpha_grid: vec![0.75],
        epsilon_grid: vec![0.0, 3.0, 6.0, 9.0, 12.0],
        ..SweepSpec::for_kind(SweepKind::EmissionsGrid)
    };
    let cells = run_emissions_grid(&inst, &scen, &spec, &SolverConfig::default(), 1);
    assert_eq!(cells.len(), 5);
    assert!(!cells[0].plateau, "first cell has no predecessor");
    for pair in cells.windows(2) {
        assert!(
            pair[1].objective <= pair[0].objective + 1e-9,
            "objective must not rise with a looser cap"
        );
    }
    let last = &cells[4];
    assert!(last.plateau, "cap beyond any feasible emissions must plateau");
    assert_eq!(last.expected_excess, 0.0);
}

#[test]
fn capacity_grid_relaxation_reduces_unmet_and_cost() {
    let (inst, scen) = fixture("capacity.json");
    let spec = SweepSpec {
        lambda_grid: vec![0.0],
        alpha_grid: vec![0.75],
        capacity_grid: vec![5, 8],
        ..SweepSpec::for_kind(SweepKind::CapacityGrid)
    };
    let cells = run_capacity_grid(&inst, &scen, &spec, &SolverConfig::default(), 1);
    assert_eq!(cells.len(), 2);
    assert!(cells[0].expected_unmet > cells[1].expected_unmet);
    assert!(cells[0].total_cost > cells[1].total_cost);
    assert!(cells[0].demand_met_pct < cells[1].demand_met_pct);
    for c in &cells {
        assert!(c.min_unmet <= c.expected_unmet && c.expected_unmet <= c.max_unmet);
        assert!(c.std_unmet >= 0.0);
    }
}

#[test]
fn breakdown_components_recombine_into_the_objective() {
    let (inst, scen) = fixture("medium.json");
    let risk = RiskParams::new(0.4, 0.75).unwrap();
    let report = run_breakdown(
        &inst,
        &scen,
        risk,
        &BuildOptions::default(),
        &SolverConfig::default(),
    )
    .unwrap();
    let total: f64 = report.components.iter().map(|c| c.amount).sum();
    assert!(
        (total - report.objective).abs() <= 1e-6 * report.objective.abs().max(1.0),
        "components {total} vs objective {}",
        report.objective
    );
    let shares: f64 = report.components.iter().map(|c| c.share_pct).sum();
    assert!((shares - 100.0).abs() < 0.1, "shares sum to {shares}");
    let names: Vec<&str> = report.components.iter().map(|c| c.name).collect();
    assert_eq!(
        names,
        vec!["supply", "transport", "unmet_penalty", "emissions_penalty", "risk_term"]
    );
}

#[test]
fn failed_cells_carry_errors_without_aborting_the_sweep() {
    let (inst, scen) = fixture("small.json");
    let spec = SweepSpec {
        lambda_grid: vec![0.0, 2.0], // 2.0 is out of range
        alpha_grid: vec![0.5],
        ..SweepSpec::for_kind(SweepKind::RiskGrid)
    };
    let cells = run_risk_grid(&inst, &scen, &spec, &SolverConfig::default(), 1);
    assert_eq!(cells.len(), 2);
    assert_eq!(cells[0].status, "ok");
    assert_ne!(cells[1].status, "ok");
    assert!(cells[1].objective.is_nan());
}

#[test]
fn csv_rendering_quotes_and_formats() {
    let mut t = ReportTable::new(vec!["name", "value"]);
    t.push_row(vec![Cell::Text("plain".into()), Cell::Num(1.5)]);
    t.push_row(vec![Cell::Text("with,comma".into()), Cell::Int(-3)]);
    t.push_row(vec![Cell::Text("with \"quote\"".into()), Cell::Num(2.0)]);
    let csv = t.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "name,value");
    assert_eq!(lines[1], "plain,1.5");
    assert_eq!(lines[2], "\"with,comma\",-3");
    assert_eq!(lines[3], "\"with \"\"quote\"\"\",2");
}

#[test]
fn float_formatting_trims_trailing_zeros() {
    assert_eq!(fmt_float(1.5), "1.5");
    assert_eq!(fmt_float(2.0), "2");
    assert_eq!(fmt_float(0.1234567), "0.123457");
    assert_eq!(fmt_float(-0.25), "-0.25");
    assert_eq!(fmt_float(f64::NAN), "NaN");
}

#[test]
fn report_tables_scale_monetary_columns_to_thousands() {
    let (inst, scen) = fixture("small.json");
    let report = stochastic_values(
        &inst,
        &scen,
        &BuildOptions::default(),
        &SolverConfig::default(),
        0.75,
    )
    .unwrap();
    let table = stochastic_table(&report, inst.trains.len(), scen.len());
    assert_eq!(
        table.columns,
        vec!["Trains", "Scen", "EEV", "SS", "WS", "VSS", "EVPI", "VSS(%)", "CVaR_SS"]
    );
    assert_eq!(table.rows.len(), 1);
    match (&table.rows[0][2], &table.rows[0][3]) {
        (Cell::Num(eev), Cell::Num(ss)) => {
            assert!((eev - report.eev / 1000.0).abs() < 1e-12);
            assert!((ss - report.ss / 1000.0).abs() < 1e-12);
        }
        other => panic!("expected numeric cells, got {other:?}"),
    }

    let spec = SweepSpec {
        lambda_grid: vec![0.0],
        alpha_grid: vec![0.5],
        ..SweepSpec::for_kind(SweepKind::RiskGrid)
    };
    let cells = run_risk_grid(&inst, &scen, &spec, &SolverConfig::default(), 1);
    let table = risk_table(&cells);
    assert_eq!(
        table.columns,
        vec!["lambda", "alpha", "obj", "asc", "etc", "var", "cvar", "status"]
    );
    match &table.rows[0][2] {
        Cell::Num(v) => assert!((v - cells[0].objective / 1000.0).abs() < 1e-12),
        other => panic!("expected numeric objective, got {other:?}"),
    }

    // Capacity stays in plain units.
    let cap_cells = run_capacity_grid(
        &inst,
        &scen,
        &SweepSpec {
            lambda_grid: vec![0.0],
            alpha_grid: vec![0.5],
            capacity_grid: vec![3],
            ..SweepSpec::for_kind(SweepKind::CapacityGrid)
        },
        &SolverConfig::default(),
        1,
    );
    let table = capacity_table(&cap_cells);
    match &table.rows[0][1] {
        Cell::Num(v) => assert!((v - cap_cells[0].total_cost).abs() < 1e-12),
        other => panic!("expected plain-unit cost, got {other:?}"),
    }

    let em_cells = run_emissions_grid(
        &inst,
        &scen,
        &SweepSpec {
            lambda_grid: vec![0.0],
            alpha_grid: vec![0.5],
            epsilon_grid: vec![5.0],
            ..SweepSpec::for_kind(SweepKind::EmissionsGrid)
        },
        &SolverConfig::default(),
        1,
    );
    let table = emissions_table(&em_cells);
    assert_eq!(table.rows.len(), 1);

    let breakdown = run_breakdown(
        &inst,
        &scen,
        RiskParams::neutral(),
        &BuildOptions::default(),
        &SolverConfig::default(),
    )
    .unwrap();
    let table = breakdown_table(&breakdown);
    assert_eq!(table.columns, vec!["component", "amount", "share_pct"]);
    assert_eq!(table.rows.len(), breakdown.components.len() + 1);
}

#[test]
fn document_requires_exactly_one_scenario_source() {
    let (inst, scen) = fixture("tiny.json");
    let doc = ProblemDocument {
        instance: inst.clone(),
        scenarios: Some(scen.clone()),
        sampler: None,
        sampler_seed: None,
    };
    assert!(resolve_scenarios(&doc).is_ok());

    let both = ProblemDocument {
        sampler: Some(planner_core::scenario::SamplerConfig {
            scenario_count: 2,
            demand: Default::default(),
            capacity: Default::default(),
            extreme_fraction: 0.0,
            probabilities: None,
        }),
        ..doc.clone()
    };
    assert!(matches!(
        resolve_scenarios(&both),
        Err(LoadError::ScenarioSource)
    ));

    let neither = ProblemDocument {
        instance: inst,
        scenarios: None,
        sampler: None,
        sampler_seed: None,
    };
    assert!(matches!(
        resolve_scenarios(&neither),
        Err(LoadError::ScenarioSource)
    ));
}

#[test]
fn documents_round_trip_and_sample_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, _) = fixture("tiny.json");
    let mut demand = std::collections::BTreeMap::new();
    demand.insert(
        "T1".to_string(),
        planner_core::scenario::Distribution::Uniform { low: 2, high: 6 },
    );
    let mut capacity: std::collections::BTreeMap<
        String,
        std::collections::BTreeMap<String, planner_core::scenario::Distribution>,
    > = Default::default();
    capacity.entry("H1".to_string()).or_default().insert(
        "T1".to_string(),
        planner_core::scenario::Distribution::Uniform { low: 1, high: 4 },
    );
    let doc = ProblemDocument {
        instance: inst,
        scenarios: None,
        sampler: Some(planner_core::scenario::SamplerConfig {
            scenario_count: 4,
            demand,
            capacity,
            extreme_fraction: 0.5,
            probabilities: None,
        }),
        sampler_seed: Some(11),
    };
    let path = dir.path().join("sampled.json");
    save_document(&doc, &path).unwrap();
    let back = load_document(&path).unwrap();
    let a = resolve_scenarios(&back).unwrap();
    let b = resolve_scenarios(&back).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 4);
    // The sampled problem validates end to end.
    let (_inst, scen) = load_problem(&path).unwrap();
    assert_eq!(scen, a);
}

#[test]
fn load_problem_rejects_invalid_documents_with_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (mut inst, scen) = fixture("tiny.json");
    inst.periods = 0;
    let doc = ProblemDocument {
        instance: inst,
        scenarios: Some(scen),
        sampler: None,
        sampler_seed: None,
    };
    let path = dir.path().join("bad.json");
    save_document(&doc, &path).unwrap();
    match load_problem(&path) {
        Err(LoadError::Invalid(report)) => {
            assert!(!report.is_ok());
        }
        other => panic!("expected validation failure, got {other:?}"),
    }

    let missing = dir.path().join("nope.json");
    assert!(matches!(load_problem(&missing), Err(LoadError::Io { .. })));

    std::fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    assert!(matches!(
        load_problem(&dir.path().join("junk.json")),
        Err(LoadError::Json { .. })
    ));
}
