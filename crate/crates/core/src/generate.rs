//! Seeded synthetic problem generator for tests and benchmarks.
//!
//! Produces structurally valid instances of configurable shape: every train
//! visits distinct hubs with strictly increasing departures, every origin
//! reaches at least one hub, and every scenario carries a demand entry per
//! train and a capacity entry per (hub, train) stop. Identical specs and
//! seeds produce identical problems.

use crate::instance::{CostParams, EmissionParams, Hub, Instance, Origin, RateSpec, RoadArc, Train, TrainStop};
use crate::scenario::{Scenario, ScenarioSet};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Shape of a synthetic problem.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub origins: usize,
    pub hubs: usize,
    pub trains: usize,
    pub stops_per_train: usize,
    pub periods: usize,
    pub scenarios: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            origins: 2,
            hubs: 3,
            trains: 2,
            stops_per_train: 2,
            periods: 8,
            scenarios: 3,
        }
    }
}

/// Generate an instance and scenario set from `spec` and `seed`.
pub fn synth_problem(spec: &SynthSpec, seed: u64) -> (Instance, ScenarioSet) {
    assert!(spec.origins > 0 && spec.hubs > 0 && spec.trains > 0);
    assert!(spec.stops_per_train > 0 && spec.stops_per_train <= spec.hubs);
    assert!(spec.periods > 0 && spec.scenarios > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let hubs: Vec<Hub> = (0..spec.hubs)
        .map(|h| Hub {
            id: format!("H{h}"),
        })
        .collect();

    let origins: Vec<Origin> = (0..spec.origins)
        .map(|o| {
            let mut arcs = BTreeMap::new();
            // Guarantee one arc, then add others with probability 1/2.
            let anchor = rng.random_range(0..spec.hubs);
            for h in 0..spec.hubs {
                if h != anchor && !rng.random::<bool>() {
                    continue;
                }
                arcs.insert(
                    format!("H{h}"),
                    RoadArc {
                        travel_time: rng.random_range(1..=3),
                        cost: rng.random_range(4..=20) as f64,
                        transfer_time: rng.random_range(0..=2),
                        transfer_cost: rng.random_range(0..=4) as f64,
                    },
                );
            }
            Origin {
                id: format!("O{o}"),
                prep_cost: rng.random_range(1..=5) as f64,
                max_prepare: rng.random_range(8..=25),
                arcs,
            }
        })
        .collect();

    let trains: Vec<Train> = (0..spec.trains)
        .map(|t| {
            // Distinct hubs per train: shuffle indices by repeated draws.
            let mut pool: Vec<usize> = (0..spec.hubs).collect();
            let mut picked = Vec::with_capacity(spec.stops_per_train);
            for _ in 0..spec.stops_per_train {
                let k = rng.random_range(0..pool.len());
                picked.push(pool.swap_remove(k));
            }
            let mut departure = rng.random_range(2..=4).min(spec.periods as i64);
            let stops = picked
                .into_iter()
                .map(|h| {
                    let stop = TrainStop {
                        hub: format!("H{h}"),
                        departure,
                    };
                    departure += rng.random_range(2..=4);
                    stop
                })
                .collect();
            Train {
                id: format!("T{t}"),
                stops,
            }
        })
        .collect();

    let instance = Instance {
        origins,
        hubs,
        trains: trains.clone(),
        periods: spec.periods,
        cost: CostParams {
            unmet_penalty: rng.random_range(60..=150) as f64,
            emissions_penalty: rng.random_range(1..=4) as f64,
        },
        emissions: EmissionParams {
            cap: rng.random_range(20..=80) as f64,
            rate: RateSpec::Constant(1.0 + rng.random::<f64>()),
        },
    };

    let p = 1.0 / spec.scenarios as f64;
    let scenarios = (0..spec.scenarios)
        .map(|_| {
            let mut demand = BTreeMap::new();
            for t in &trains {
                demand.insert(t.id.clone(), rng.random_range(2..=18));
            }
            let mut capacity: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
            for t in &trains {
                for stop in &t.stops {
                    capacity
                        .entry(stop.hub.clone())
                        .or_default()
                        .insert(t.id.clone(), rng.random_range(3..=14));
                }
            }
            Scenario {
                probability: p,
                demand,
                capacity,
                unmet_penalty: None,
            }
        })
        .collect();

    (
        instance,
        ScenarioSet {
            scenarios,
            seed: Some(seed),
        },
    )
}
