//! Instance data-model checks: validation codes with stable paths, schedule
//! time gating, and serde round trips.

use planner_core::generate::{synth_problem, SynthSpec};
use planner_core::instance::{
    validate_instance, CostParams, EmissionParams, Hub, Origin, RateSpec, RoadArc, Train,
    TrainStop,
};
use planner_core::scenario::validate_scenarios;
use planner_core::validation::ViolationCode;
use planner_core::Instance;
use std::collections::BTreeMap;

fn base_instance() -> Instance {
    let mut arcs = BTreeMap::new();
    arcs.insert(
        "H1".to_string(),
        RoadArc {
            travel_time: 2,
            cost: 10.0,
            transfer_time: 1,
            transfer_cost: 4.0,
        },
    );
    Instance {
        origins: vec![Origin {
            id: "O1".to_string(),
            prep_cost: 2.0,
            max_prepare: 5,
            arcs,
        }],
        hubs: vec![Hub {
            id: "H1".to_string(),
        }],
        trains: vec![Train {
            id: "T1".to_string(),
            stops: vec![TrainStop {
                hub: "H1".to_string(),
                departure: 2,
            }],
        }],
        periods: 3,
        cost: CostParams {
            unmet_penalty: 100.0,
            emissions_penalty: 2.0,
        },
        emissions: EmissionParams {
            cap: 50.0,
            rate: RateSpec::Constant(1.0),
        },
    }
}

fn codes(inst: &Instance) -> Vec<(ViolationCode, String)> {
    validate_instance(inst)
        .violations
        .into_iter()
        .map(|v| (v.code, v.path))
        .collect()
}

#[test]
fn clean_instance_validates_clean() {
    assert!(validate_instance(&base_instance()).is_ok());
}

#[test]
fn empty_collections_are_flagged() {
    let mut inst = base_instance();
    inst.origins.clear();
    inst.hubs.clear();
    inst.trains.clear();
    let got = codes(&inst);
    for path in ["/origins", "/hubs", "/trains"] {
        assert!(
            got.iter().any(|(c, p)| *c == ViolationCode::EmptySet && p == path),
            "missing EMPTY_SET at {path}: {got:?}"
        );
    }
}

#[test]
fn zero_periods_is_flagged() {
    let mut inst = base_instance();
    inst.periods = 0;
    assert!(codes(&inst)
        .iter()
        .any(|(c, p)| *c == ViolationCode::BadPeriods && p == "/periods"));
}

#[test]
fn negative_quantities_carry_exact_paths() {
    let mut inst = base_instance();
    inst.origins[0].max_prepare = -1;
    inst.origins[0].prep_cost = -2.0;
    inst.origins[0].arcs.get_mut("H1").unwrap().travel_time = -3;
    inst.origins[0].arcs.get_mut("H1").unwrap().cost = -1.0;
    inst.cost.unmet_penalty = -5.0;
    inst.emissions.cap = -1.0;
    let got = codes(&inst);
    let expect = [
        (ViolationCode::NegativeCapacity, "/origins/0/max_prepare"),
        (ViolationCode::NegativeCost, "/origins/0/prep_cost"),
        (ViolationCode::NegativeTime, "/origins/0/arcs/H1/travel_time"),
        (ViolationCode::NegativeCost, "/origins/0/arcs/H1/cost"),
        (ViolationCode::NegativeCost, "/cost/unmet_penalty"),
        (ViolationCode::NegativeEmission, "/emissions/cap"),
    ];
    for (code, path) in expect {
        assert!(
            got.iter().any(|(c, p)| *c == code && p == path),
            "missing {code:?} at {path}: {got:?}"
        );
    }
}

#[test]
fn rate_array_must_match_horizon() {
    let mut inst = base_instance();
    inst.emissions.rate = RateSpec::PerPeriod(vec![1.0, 2.0]); // periods = 3
    assert!(codes(&inst)
        .iter()
        .any(|(c, p)| *c == ViolationCode::RateLength && p == "/emissions/rate"));
}

#[test]
fn dangling_and_duplicate_references_are_flagged() {
    let mut inst = base_instance();
    inst.origins[0].arcs.insert(
        "NOPE".to_string(),
        RoadArc {
            travel_time: 1,
            cost: 1.0,
            transfer_time: 0,
            transfer_cost: 0.0,
        },
    );
    inst.trains[0].stops[0].hub = "GHOST".to_string();
    inst.hubs.push(Hub {
        id: "H1".to_string(),
    });
    let got = codes(&inst);
    assert!(got
        .iter()
        .any(|(c, p)| *c == ViolationCode::DanglingHubRef && p == "/origins/0/arcs/NOPE"));
    assert!(got
        .iter()
        .any(|(c, p)| *c == ViolationCode::DanglingHubRef && p == "/trains/0/stops/0/hub"));
    assert!(got
        .iter()
        .any(|(c, p)| *c == ViolationCode::DuplicateId && p == "/hubs/1/id"));
}

#[test]
fn schedule_ordering_violations_are_flagged() {
    let mut inst = base_instance();
    inst.trains[0].stops = vec![
        TrainStop {
            hub: "H1".to_string(),
            departure: 3,
        },
        TrainStop {
            hub: "H1".to_string(),
            departure: 3,
        },
    ];
    let got = codes(&inst);
    assert!(got
        .iter()
        .any(|(c, _)| *c == ViolationCode::NonincreasingSchedule));
    assert!(got.iter().any(|(c, _)| *c == ViolationCode::DuplicateStopHub));
}

#[test]
fn time_gating_is_inclusive_of_the_departure_period() {
    let inst = base_instance(); // travel 2, transfer 1, departure 2, periods 3
    assert!(inst.time_feasible(0, 0, 0, 0, false).unwrap()); // 0 + 2 <= 2
    assert!(!inst.time_feasible(0, 0, 0, 1, false).unwrap()); // 1 + 2 > 2
    assert!(!inst.time_feasible(0, 0, 0, 0, true).unwrap()); // 0 + 2 + 1 > 2
    assert!(inst.time_feasible(0, 0, 0, 2, false).is_ok()); // period 2 exists
    assert!(inst.time_feasible(0, 0, 0, 3, false).is_err()); // period 3 does not
    assert!(inst.time_feasible(1, 0, 0, 0, false).is_err()); // no second origin
}

#[test]
fn missing_arcs_and_stops_read_as_infeasible_not_errors() {
    let mut inst = base_instance();
    inst.hubs.push(Hub {
        id: "H2".to_string(),
    });
    // No arc O1 -> H2, and T1 does not stop at H2.
    assert_eq!(inst.time_feasible(0, 1, 0, 0, false), Ok(false));
}

#[test]
fn rate_lookup_covers_both_forms() {
    let constant = RateSpec::Constant(1.5);
    assert_eq!(constant.at(0), 1.5);
    assert_eq!(constant.at(7), 1.5);
    let stepped = RateSpec::PerPeriod(vec![1.0, 2.0, 3.0]);
    assert_eq!(stepped.at(0), 1.0);
    assert_eq!(stepped.at(2), 3.0);
}

#[test]
fn rate_spec_serde_accepts_scalar_or_array() {
    let scalar: RateSpec = serde_json::from_str("2.5").unwrap();
    assert_eq!(scalar, RateSpec::Constant(2.5));
    let array: RateSpec = serde_json::from_str("[1.0, 2.0]").unwrap();
    assert_eq!(array, RateSpec::PerPeriod(vec![1.0, 2.0]));
}

#[test]
fn instance_round_trips_through_json() {
    let inst = base_instance();
    let text = serde_json::to_string_pretty(&inst).unwrap();
    let back: Instance = serde_json::from_str(&text).unwrap();
    assert_eq!(inst, back);
}

#[test]
fn unknown_fields_are_rejected() {
    let mut doc = serde_json::to_value(&base_instance()).unwrap();
    doc.as_object_mut()
        .unwrap()
        .insert("surprise".to_string(), serde_json::json!(1));
    let err = serde_json::from_value::<Instance>(doc).unwrap_err();
    assert!(err.to_string().contains("surprise"));
}

#[test]
fn synthetic_problems_validate_clean_across_seeds() {
    for seed in 0..64 {
        let spec = SynthSpec {
            origins: 1 + (seed as usize % 3),
            hubs: 2 + (seed as usize % 3),
            trains: 1 + (seed as usize % 2),
            stops_per_train: 2,
            periods: 6 + (seed as usize % 4),
            scenarios: 2 + (seed as usize % 4),
        };
        let (inst, scen) = synth_problem(&spec, seed);
        let mut report = validate_instance(&inst);
        report.extend(validate_scenarios(&scen, &inst));
        assert!(report.is_ok(), "seed {seed}: {report}");
    }
}
