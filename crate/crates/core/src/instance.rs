//! Deterministic problem data: origins, hubs, trains, and cost/emission parameters.
//!
//! An [`Instance`] describes the physical network and the first-stage economics.
//! All times are integer periods (one period = one hour); all container counts
//! are integers. Uncertain quantities (train capacity, final demand) live in
//! scenarios, not here.

use crate::validation::{ValidationReport, ViolationCode};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

/// A rail hub where road shipments can be loaded onto trains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hub {
    pub id: String,
}

/// A directed road connection from an origin to a hub.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadArc {
    /// Door-to-hub drayage time in periods.
    pub travel_time: i64,
    /// Per-container road transport cost for this arc.
    pub cost: f64,
    /// Extra handling delay (periods) incurred when moving a container from
    /// truck to train at the hub. Zero when the terminal transfers in-period.
    #[serde(default)]
    pub transfer_time: i64,
    /// Per-container handling charge for the truck-to-train transfer.
    #[serde(default)]
    pub transfer_cost: f64,
}

/// A shipper location that prepares containers before dispatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Origin {
    pub id: String,
    /// Per-container cost of preparing a container at this origin.
    pub prep_cost: f64,
    /// Upper bound on the containers this origin can prepare.
    pub max_prepare: i64,
    /// Road arcs to reachable hubs, keyed by hub id.
    pub arcs: BTreeMap<String, RoadArc>,
}

/// One scheduled call of a train at a hub.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainStop {
    pub hub: String,
    /// Departure period at this hub; containers must arrive no later than this.
    pub departure: i64,
}

/// A scheduled train service with an ordered stop sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Train {
    pub id: String,
    /// Stops in visiting order; departures must be strictly increasing.
    pub stops: Vec<TrainStop>,
}

/// Horizon-wide monetary parameters that are not origin- or arc-specific.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    /// Penalty per container of demand left unmet (scenarios may override).
    pub unmet_penalty: f64,
    /// Price per unit of emissions above the cap.
    pub emissions_penalty: f64,
}

/// Per-period emissions intensity: either one constant or one value per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateSpec {
    Constant(f64),
    PerPeriod(Vec<f64>),
}

impl RateSpec {
    /// Emissions per container-period of road travel for a dispatch departing
    /// in period `t`.
    pub fn at(&self, t: usize) -> f64 {
        match self {
            RateSpec::Constant(r) => *r,
            RateSpec::PerPeriod(v) => v[t],
        }
    }
}

/// Emissions accounting parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionParams {
    /// Free emissions allowance per scenario; excess is charged at
    /// [`CostParams::emissions_penalty`].
    pub cap: f64,
    /// Emissions per container-hour of road travel, by departure period.
    pub rate: RateSpec,
}

/// The deterministic half of a planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub origins: Vec<Origin>,
    pub hubs: Vec<Hub>,
    pub trains: Vec<Train>,
    /// Number of dispatch periods in the planning horizon (periods 0..periods-1).
    pub periods: usize,
    pub cost: CostParams,
    pub emissions: EmissionParams,
}

/// Index error raised by accessors that take entity positions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{what} index {index} out of range (len {len})")]
pub struct IndexError {
    pub what: &'static str,
    pub index: usize,
    pub len: usize,
}

impl Instance {
    /// Position of the hub with the given id, if declared.
    pub fn hub_position(&self, id: &str) -> Option<usize> {
        self.hubs.iter().position(|h| h.id == id)
    }

    /// Position of the train with the given id, if declared.
    pub fn train_position(&self, id: &str) -> Option<usize> {
        self.trains.iter().position(|t| t.id == id)
    }

    /// Total number of stops across all trains.
    pub fn total_stops(&self) -> usize {
        self.trains.iter().map(|t| t.stops.len()).sum()
    }

    /// Whether a container prepared at origin `origin`, dispatched in period
    /// `period`, can reach train `train` at hub `hub` before that train's
    /// departure from the hub. `use_transfer` adds the arc's transfer delay to
    /// the journey.
    ///
    /// Returns `false` when no road arc joins the origin to the hub or the
    /// train does not call at the hub: no dispatch cell exists there at all.
    /// Index arguments outside the declared entity ranges are an error.
    pub fn time_feasible(
        &self,
        origin: usize,
        hub: usize,
        train: usize,
        period: usize,
        use_transfer: bool,
    ) -> Result<bool, IndexError> {
        let o = self.origins.get(origin).ok_or(IndexError {
            what: "origin",
            index: origin,
            len: self.origins.len(),
        })?;
        let h = self.hubs.get(hub).ok_or(IndexError {
            what: "hub",
            index: hub,
            len: self.hubs.len(),
        })?;
        let tr = self.trains.get(train).ok_or(IndexError {
            what: "train",
            index: train,
            len: self.trains.len(),
        })?;
        if period >= self.periods {
            return Err(IndexError {
                what: "period",
                index: period,
                len: self.periods,
            });
        }
        let arc = match o.arcs.get(&h.id) {
            Some(a) => a,
            None => return Ok(false),
        };
        let stop = match tr.stops.iter().find(|s| s.hub == h.id) {
            Some(s) => s,
            None => return Ok(false),
        };
        let mut arrival = period as i64 + arc.travel_time;
        if use_transfer {
            arrival += arc.transfer_time;
        }
        Ok(arrival <= stop.departure)
    }
}

/// Validate the structural and sign constraints on an instance.
///
/// Collects every violation rather than stopping at the first; an empty report
/// means the instance is safe to build models from.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut rep = ValidationReport::new();

    if inst.origins.is_empty() {
        rep.push(ViolationCode::EmptySet, "/origins", "at least one origin is required");
    }
    if inst.hubs.is_empty() {
        rep.push(ViolationCode::EmptySet, "/hubs", "at least one hub is required");
    }
    if inst.trains.is_empty() {
        rep.push(ViolationCode::EmptySet, "/trains", "at least one train is required");
    }
    if inst.periods == 0 {
        rep.push(ViolationCode::BadPeriods, "/periods", "horizon must have at least one period");
    }

    let mut hub_ids: HashSet<&str> = HashSet::new();
    for (j, hub) in inst.hubs.iter().enumerate() {
        if !hub_ids.insert(hub.id.as_str()) {
            rep.push(
                ViolationCode::DuplicateId,
                format!("/hubs/{j}/id"),
                format!("hub id {:?} declared more than once", hub.id),
            );
        }
    }

    let mut origin_ids: HashSet<&str> = HashSet::new();
    for (i, origin) in inst.origins.iter().enumerate() {
        if !origin_ids.insert(origin.id.as_str()) {
            rep.push(
                ViolationCode::DuplicateId,
                format!("/origins/{i}/id"),
                format!("origin id {:?} declared more than once", origin.id),
            );
        }
        if origin.prep_cost < 0.0 {
            rep.push(
                ViolationCode::NegativeCost,
                format!("/origins/{i}/prep_cost"),
                format!("preparation cost {} must be >= 0", origin.prep_cost),
            );
        }
        if origin.max_prepare < 0 {
            rep.push(
                ViolationCode::NegativeCapacity,
                format!("/origins/{i}/max_prepare"),
                format!("preparation capacity {} must be >= 0", origin.max_prepare),
            );
        }
        for (hub_id, arc) in &origin.arcs {
            let path = format!("/origins/{i}/arcs/{hub_id}");
            if !inst.hubs.iter().any(|h| &h.id == hub_id) {
                rep.push(
                    ViolationCode::DanglingHubRef,
                    path.clone(),
                    format!("arc references undeclared hub {hub_id:?}"),
                );
            }
            if arc.travel_time < 0 {
                rep.push(
                    ViolationCode::NegativeTime,
                    format!("{path}/travel_time"),
                    format!("travel time {} must be >= 0", arc.travel_time),
                );
            }
            if arc.transfer_time < 0 {
                rep.push(
                    ViolationCode::NegativeTime,
                    format!("{path}/transfer_time"),
                    format!("transfer time {} must be >= 0", arc.transfer_time),
                );
            }
            if arc.cost < 0.0 {
                rep.push(
                    ViolationCode::NegativeCost,
                    format!("{path}/cost"),
                    format!("arc cost {} must be >= 0", arc.cost),
                );
            }
            if arc.transfer_cost < 0.0 {
                rep.push(
                    ViolationCode::NegativeCost,
                    format!("{path}/transfer_cost"),
                    format!("transfer cost {} must be >= 0", arc.transfer_cost),
                );
            }
        }
    }

    let mut train_ids: HashSet<&str> = HashSet::new();
    for (n, train) in inst.trains.iter().enumerate() {
        if !train_ids.insert(train.id.as_str()) {
            rep.push(
                ViolationCode::DuplicateId,
                format!("/trains/{n}/id"),
                format!("train id {:?} declared more than once", train.id),
            );
        }
        if train.stops.is_empty() {
            rep.push(
                ViolationCode::EmptySet,
                format!("/trains/{n}/stops"),
                format!("train {:?} has no stops", train.id),
            );
        }
        let mut seen_hubs: HashSet<&str> = HashSet::new();
        let mut prev_departure: Option<i64> = None;
        for (p, stop) in train.stops.iter().enumerate() {
            let path = format!("/trains/{n}/stops/{p}");
            if !inst.hubs.iter().any(|h| h.id == stop.hub) {
                rep.push(
                    ViolationCode::DanglingHubRef,
                    format!("{path}/hub"),
                    format!("stop references undeclared hub {:?}", stop.hub),
                );
            }
            if !seen_hubs.insert(stop.hub.as_str()) {
                rep.push(
                    ViolationCode::DuplicateStopHub,
                    format!("{path}/hub"),
                    format!("train {:?} visits hub {:?} more than once", train.id, stop.hub),
                );
            }
            if stop.departure < 0 {
                rep.push(
                    ViolationCode::NegativeTime,
                    format!("{path}/departure"),
                    format!("departure {} must be >= 0", stop.departure),
                );
            }
            if let Some(prev) = prev_departure {
                if stop.departure <= prev {
                    rep.push(
                        ViolationCode::NonincreasingSchedule,
                        format!("{path}/departure"),
                        format!(
                            "departure {} does not increase over previous stop ({})",
                            stop.departure, prev
                        ),
                    );
                }
            }
            prev_departure = Some(stop.departure);
        }
    }

    if inst.cost.unmet_penalty < 0.0 {
        rep.push(
            ViolationCode::NegativeCost,
            "/cost/unmet_penalty",
            format!("unmet-demand penalty {} must be >= 0", inst.cost.unmet_penalty),
        );
    }
    if inst.cost.emissions_penalty < 0.0 {
        rep.push(
            ViolationCode::NegativeCost,
            "/cost/emissions_penalty",
            format!("emissions penalty {} must be >= 0", inst.cost.emissions_penalty),
        );
    }
    if inst.emissions.cap < 0.0 {
        rep.push(
            ViolationCode::NegativeEmission,
            "/emissions/cap",
            format!("emissions cap {} must be >= 0", inst.emissions.cap),
        );
    }
    match &inst.emissions.rate {
        RateSpec::Constant(r) => {
            if *r < 0.0 {
                rep.push(
                    ViolationCode::NegativeEmission,
                    "/emissions/rate",
                    format!("emissions rate {r} must be >= 0"),
                );
            }
        }
        RateSpec::PerPeriod(v) => {
            if v.len() != inst.periods {
                rep.push(
                    ViolationCode::RateLength,
                    "/emissions/rate",
                    format!("rate array has {} entries but the horizon has {} periods", v.len(), inst.periods),
                );
            }
            for (t, r) in v.iter().enumerate() {
                if *r < 0.0 {
                    rep.push(
                        ViolationCode::NegativeEmission,
                        format!("/emissions/rate/{t}"),
                        format!("emissions rate {r} must be >= 0"),
                    );
                }
            }
        }
    }

    rep
}

/// Index-resolved view of an instance used by the model builder and the
/// scenario validators. Construction assumes [`validate_instance`] passed.
#[derive(Debug)]
pub struct ResolvedInstance<'a> {
    pub inst: &'a Instance,
    /// hub id -> hub position
    pub hub_index: HashMap<&'a str, usize>,
    /// train id -> train position
    pub train_index: HashMap<&'a str, usize>,
    /// per train: (hub position, departure) in stop order
    pub stops: Vec<Vec<(usize, i64)>>,
    /// per train: offset of its first stop in the flat stop numbering
    pub stop_offset: Vec<usize>,
    /// per origin: hub position -> arc, in hub-position order
    pub arcs: Vec<BTreeMap<usize, &'a RoadArc>>,
}

impl<'a> ResolvedInstance<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let hub_index: HashMap<&str, usize> =
            inst.hubs.iter().enumerate().map(|(j, h)| (h.id.as_str(), j)).collect();
        let train_index: HashMap<&str, usize> =
            inst.trains.iter().enumerate().map(|(n, t)| (t.id.as_str(), n)).collect();
        let stops: Vec<Vec<(usize, i64)>> = inst
            .trains
            .iter()
            .map(|t| {
                t.stops
                    .iter()
                    .map(|s| (hub_index[s.hub.as_str()], s.departure))
                    .collect()
            })
            .collect();
        let mut stop_offset = Vec::with_capacity(stops.len());
        let mut acc = 0;
        for s in &stops {
            stop_offset.push(acc);
            acc += s.len();
        }
        let arcs: Vec<BTreeMap<usize, &RoadArc>> = inst
            .origins
            .iter()
            .map(|o| {
                o.arcs
                    .iter()
                    .map(|(hub_id, arc)| (hub_index[hub_id.as_str()], arc))
                    .collect()
            })
            .collect();
        ResolvedInstance {
            inst,
            hub_index,
            train_index,
            stops,
            stop_offset,
            arcs,
        }
    }

    /// Stop position of train `n` at hub position `j`, if the train calls there.
    pub fn stop_of(&self, n: usize, j: usize) -> Option<usize> {
        self.stops[n].iter().position(|&(hub, _)| hub == j)
    }
}
