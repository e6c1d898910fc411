//! Uncertainty model: discrete scenarios and the seeded sampler that builds them.
//!
//! A [`Scenario`] fixes every random quantity for one possible future: train
//! capacity at each scheduled stop and final demand per train, plus an optional
//! override of the unmet-demand penalty. Sets are either listed explicitly in
//! the input document or drawn from per-quantity distributions by
//! [`sample_scenarios`], which is fully deterministic in its seed.

use crate::instance::{Instance, ResolvedInstance};
use crate::validation::{ValidationReport, ViolationCode};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One realization of the uncertain data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub probability: f64,
    /// Final demand per train id (containers).
    pub demand: BTreeMap<String, i64>,
    /// Loading capacity per hub id, then per train id, at the train's stop there.
    pub capacity: BTreeMap<String, BTreeMap<String, i64>>,
    /// Scenario-specific unmet-demand penalty; falls back to the instance value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unmet_penalty: Option<f64>,
}

/// An ordered, probability-weighted collection of scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    /// Seed the set was sampled with, when it came from a sampler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ScenarioSet {
    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }
}

/// Marginal distribution of one integer quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Uniform over the integers `low..=high`.
    Uniform { low: i64, high: i64 },
    /// Finite support with explicit weights (normalized internally).
    Pmf { values: Vec<i64>, weights: Vec<f64> },
}

impl Distribution {
    /// Smallest value the distribution can produce.
    pub fn min(&self) -> i64 {
        match self {
            Distribution::Uniform { low, .. } => *low,
            Distribution::Pmf { values, .. } => values.iter().copied().min().unwrap_or(0),
        }
    }

    /// Largest value the distribution can produce.
    pub fn max(&self) -> i64 {
        match self {
            Distribution::Uniform { high, .. } => *high,
            Distribution::Pmf { values, .. } => values.iter().copied().max().unwrap_or(0),
        }
    }

    /// Expected value.
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Uniform { low, high } => (*low + *high) as f64 / 2.0,
            Distribution::Pmf { values, weights } => {
                let total: f64 = weights.iter().sum();
                values
                    .iter()
                    .zip(weights)
                    .map(|(v, w)| *v as f64 * w / total)
                    .sum()
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> i64 {
        match self {
            Distribution::Uniform { low, high } => rng.random_range(*low..=*high),
            Distribution::Pmf { values, weights } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                for (v, w) in values.iter().zip(weights) {
                    if u < *w {
                        return *v;
                    }
                    u -= w;
                }
                *values.last().expect("pmf has at least one value")
            }
        }
    }
}

/// Recipe for drawing a scenario set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    /// Number of scenarios to produce.
    pub scenario_count: usize,
    /// Demand distribution per train id.
    pub demand: BTreeMap<String, Distribution>,
    /// Capacity distribution per hub id, then per train id stopping there.
    pub capacity: BTreeMap<String, BTreeMap<String, Distribution>>,
    /// Fraction of scenarios pinned to the distribution extremes (alternating
    /// all-minimum / all-maximum), rounded to the nearest whole scenario.
    #[serde(default)]
    pub extreme_fraction: f64,
    /// Explicit probabilities; uniform when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

/// Errors rejecting a malformed sampler configuration.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SamplerError {
    #[error("scenario_count must be at least 1")]
    EmptyCount,
    #[error("extreme_fraction {0} must lie in [0, 1]")]
    BadExtremeFraction(f64),
    #[error("distribution at {path}: {detail}")]
    BadDistribution { path: String, detail: String },
    #[error("probabilities: expected {expected} entries, found {found}")]
    ProbabilityLength { expected: usize, found: usize },
    #[error("probabilities must be nonnegative and sum to 1 (sum = {0})")]
    ProbabilitySum(f64),
}

fn check_distribution(path: &str, dist: &Distribution) -> Result<(), SamplerError> {
    let bad = |detail: String| SamplerError::BadDistribution {
        path: path.to_string(),
        detail,
    };
    match dist {
        Distribution::Uniform { low, high } => {
            if low > high {
                return Err(bad(format!("low {low} exceeds high {high}")));
            }
            if *low < 0 {
                return Err(bad(format!("low {low} must be >= 0")));
            }
        }
        Distribution::Pmf { values, weights } => {
            if values.is_empty() {
                return Err(bad("pmf has no values".into()));
            }
            if values.len() != weights.len() {
                return Err(bad(format!(
                    "{} values but {} weights",
                    values.len(),
                    weights.len()
                )));
            }
            if values.iter().any(|v| *v < 0) {
                return Err(bad("pmf values must be >= 0".into()));
            }
            if weights.iter().any(|w| *w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
                return Err(bad("pmf weights must be >= 0 with positive sum".into()));
            }
        }
    }
    Ok(())
}

fn validate_sampler(cfg: &SamplerConfig) -> Result<(), SamplerError> {
    if cfg.scenario_count == 0 {
        return Err(SamplerError::EmptyCount);
    }
    if !(0.0..=1.0).contains(&cfg.extreme_fraction) {
        return Err(SamplerError::BadExtremeFraction(cfg.extreme_fraction));
    }
    for (train, dist) in &cfg.demand {
        check_distribution(&format!("/sampler/demand/{train}"), dist)?;
    }
    for (hub, per_train) in &cfg.capacity {
        for (train, dist) in per_train {
            check_distribution(&format!("/sampler/capacity/{hub}/{train}"), dist)?;
        }
    }
    if let Some(p) = &cfg.probabilities {
        if p.len() != cfg.scenario_count {
            return Err(SamplerError::ProbabilityLength {
                expected: cfg.scenario_count,
                found: p.len(),
            });
        }
        let sum: f64 = p.iter().sum();
        if p.iter().any(|q| *q < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(SamplerError::ProbabilitySum(sum));
        }
    }
    Ok(())
}

/// Draw a scenario set from the configured distributions.
///
/// The first `round(scenario_count * extreme_fraction)` scenarios alternate
/// between every quantity at its distribution minimum and every quantity at
/// its maximum; the remainder are sampled independently. The stream is a
/// ChaCha generator seeded with `seed`, and quantities are visited in sorted
/// key order, so identical `(cfg, seed)` pairs always produce identical sets.
pub fn sample_scenarios(cfg: &SamplerConfig, seed: u64) -> Result<ScenarioSet, SamplerError> {
    validate_sampler(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = cfg.scenario_count;
    let n_extreme = ((count as f64) * cfg.extreme_fraction).round() as usize;
    let n_extreme = n_extreme.min(count);

    let mut scenarios = Vec::with_capacity(count);
    for k in 0..count {
        let mode = if k < n_extreme {
            if k % 2 == 0 {
                Mode::Min
            } else {
                Mode::Max
            }
        } else {
            Mode::Random
        };
        let mut demand = BTreeMap::new();
        for (train, dist) in &cfg.demand {
            demand.insert(train.clone(), draw(dist, mode, &mut rng));
        }
        let mut capacity: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
        for (hub, per_train) in &cfg.capacity {
            let row = capacity.entry(hub.clone()).or_default();
            for (train, dist) in per_train {
                row.insert(train.clone(), draw(dist, mode, &mut rng));
            }
        }
        let probability = match &cfg.probabilities {
            Some(p) => p[k],
            None => 1.0 / count as f64,
        };
        scenarios.push(Scenario {
            probability,
            demand,
            capacity,
            unmet_penalty: None,
        });
    }
    Ok(ScenarioSet {
        scenarios,
        seed: Some(seed),
    })
}

#[derive(Clone, Copy)]
enum Mode {
    Min,
    Max,
    Random,
}

fn draw(dist: &Distribution, mode: Mode, rng: &mut ChaCha8Rng) -> i64 {
    match mode {
        Mode::Min => dist.min(),
        Mode::Max => dist.max(),
        Mode::Random => dist.sample(rng),
    }
}

/// Collapse a scenario set to its probability-weighted mean scenario.
///
/// Integer quantities are rounded half-up; the probability of the result is 1.
/// The unmet-demand penalty is averaged only if at least one scenario
/// overrides it, and stays `None` otherwise.
pub fn mean_value_scenario(set: &ScenarioSet) -> Scenario {
    let mut demand_acc: BTreeMap<&str, f64> = BTreeMap::new();
    let mut cap_acc: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut penalty_acc = 0.0;
    let mut penalty_count = 0;
    for sc in &set.scenarios {
        for (train, d) in &sc.demand {
            *demand_acc.entry(train).or_insert(0.0) += sc.probability * *d as f64;
        }
        for (hub, per_train) in &sc.capacity {
            let row = cap_acc.entry(hub).or_default();
            for (train, k) in per_train {
                *row.entry(train).or_insert(0.0) += sc.probability * *k as f64;
            }
        }
        if let Some(pi) = sc.unmet_penalty {
            penalty_count += 1;
            penalty_acc += sc.probability * pi;
        }
    }
    let round_half_up = |x: f64| (x + 0.5).floor() as i64;
    Scenario {
        probability: 1.0,
        demand: demand_acc
            .into_iter()
            .map(|(k, v)| (k.to_string(), round_half_up(v)))
            .collect(),
        capacity: cap_acc
            .into_iter()
            .map(|(hub, row)| {
                (
                    hub.to_string(),
                    row.into_iter()
                        .map(|(k, v)| (k.to_string(), round_half_up(v)))
                        .collect(),
                )
            })
            .collect(),
        // The averaged override is only well defined when every scenario
        // supplies one; otherwise defer to the instance-level penalty.
        unmet_penalty: if penalty_count == set.scenarios.len() {
            Some(penalty_acc)
        } else {
            None
        },
    }
}

/// Validate a scenario set against its instance.
///
/// Checks probability coherence, nonnegativity, and referential integrity:
/// demand must cover exactly the declared trains, and capacity must cover
/// exactly the (hub, train) pairs where the train stops.
pub fn validate_scenarios(set: &ScenarioSet, inst: &Instance) -> ValidationReport {
    let mut rep = ValidationReport::new();
    if set.scenarios.is_empty() {
        rep.push(ViolationCode::EmptySet, "/scenarios", "at least one scenario is required");
        return rep;
    }
    let resolved = ResolvedInstance::new(inst);

    let prob_sum: f64 = set.scenarios.iter().map(|s| s.probability).sum();
    if (prob_sum - 1.0).abs() > 1e-9 {
        rep.push(
            ViolationCode::ProbSum,
            "/scenarios",
            format!("probabilities sum to {prob_sum}, expected 1"),
        );
    }

    for (w, sc) in set.scenarios.iter().enumerate() {
        let base = format!("/scenarios/{w}");
        if !(0.0..=1.0).contains(&sc.probability) {
            rep.push(
                ViolationCode::ProbRange,
                format!("{base}/probability"),
                format!("probability {} must lie in [0, 1]", sc.probability),
            );
        }
        if let Some(pi) = sc.unmet_penalty {
            if pi < 0.0 {
                rep.push(
                    ViolationCode::NegativeCost,
                    format!("{base}/unmet_penalty"),
                    format!("unmet-demand penalty {pi} must be >= 0"),
                );
            }
        }

        for (train_id, d) in &sc.demand {
            let path = format!("{base}/demand/{train_id}");
            if !resolved.train_index.contains_key(train_id.as_str()) {
                rep.push(
                    ViolationCode::UnknownTrain,
                    path.clone(),
                    format!("demand references undeclared train {train_id:?}"),
                );
            }
            if *d < 0 {
                rep.push(
                    ViolationCode::NegativeCapacity,
                    path,
                    format!("demand {d} must be >= 0"),
                );
            }
        }
        for train in &inst.trains {
            if !sc.demand.contains_key(&train.id) {
                rep.push(
                    ViolationCode::MissingDemand,
                    format!("{base}/demand"),
                    format!("no demand entry for train {:?}", train.id),
                );
            }
        }

        for (hub_id, per_train) in &sc.capacity {
            let hub_pos = resolved.hub_index.get(hub_id.as_str()).copied();
            if hub_pos.is_none() {
                rep.push(
                    ViolationCode::UnknownHub,
                    format!("{base}/capacity/{hub_id}"),
                    format!("capacity references undeclared hub {hub_id:?}"),
                );
            }
            for (train_id, k) in per_train {
                let path = format!("{base}/capacity/{hub_id}/{train_id}");
                let train_pos = resolved.train_index.get(train_id.as_str()).copied();
                if train_pos.is_none() {
                    rep.push(
                        ViolationCode::UnknownTrain,
                        path.clone(),
                        format!("capacity references undeclared train {train_id:?}"),
                    );
                }
                if let (Some(j), Some(n)) = (hub_pos, train_pos) {
                    if resolved.stop_of(n, j).is_none() {
                        rep.push(
                            ViolationCode::CapacityOffRoute,
                            path.clone(),
                            format!("train {train_id:?} does not stop at hub {hub_id:?}"),
                        );
                    }
                }
                if *k < 0 {
                    rep.push(
                        ViolationCode::NegativeCapacity,
                        path,
                        format!("capacity {k} must be >= 0"),
                    );
                }
            }
        }
        for (n, train) in inst.trains.iter().enumerate() {
            for &(j, _) in &resolved.stops[n] {
                let hub_id = &inst.hubs[j].id;
                let present = sc
                    .capacity
                    .get(hub_id)
                    .map(|row| row.contains_key(&train.id))
                    .unwrap_or(false);
                if !present {
                    rep.push(
                        ViolationCode::MissingCapacity,
                        format!("{base}/capacity/{hub_id}"),
                        format!(
                            "no capacity entry for train {:?} at its stop {hub_id:?}",
                            train.id
                        ),
                    );
                }
            }
        }
    }
    rep
}
