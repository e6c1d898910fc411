//! Structured validation reports.
//!
//! Validators never panic on bad data: they walk the whole input and return
//! every violation they find, each tagged with a stable machine-readable code
//! and a JSON-pointer-style path to the offending field.

use serde::Serialize;
use std::fmt;

/// Stable identifier for a class of validation failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    /// A required collection (origins, hubs, trains, scenarios, stops) is empty.
    EmptySet,
    /// The planning horizon has zero periods.
    BadPeriods,
    /// A container-count field (preparation cap, train capacity, demand) is negative.
    NegativeCapacity,
    /// A monetary coefficient is negative.
    NegativeCost,
    /// A travel time, transfer time, or departure is negative.
    NegativeTime,
    /// An emissions rate or emissions cap is negative.
    NegativeEmission,
    /// The per-period emissions rate array does not match the horizon length.
    RateLength,
    /// An arc or stop references a hub id that is not declared.
    DanglingHubRef,
    /// Two entities of the same kind share an id.
    DuplicateId,
    /// A train's stop departures are not strictly increasing.
    NonincreasingSchedule,
    /// A train visits the same hub more than once.
    DuplicateStopHub,
    /// Scenario probabilities do not sum to one.
    ProbSum,
    /// A single scenario probability lies outside [0, 1].
    ProbRange,
    /// A scenario references a train id that is not declared.
    UnknownTrain,
    /// A scenario references a hub id that is not declared.
    UnknownHub,
    /// A scenario supplies capacity for a (hub, train) pair the train does not stop at.
    CapacityOffRoute,
    /// A scenario omits the demand entry for a declared train.
    MissingDemand,
    /// A scenario omits the capacity entry for a (hub, train) stop pair.
    MissingCapacity,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::EmptySet => "EMPTY_SET",
            ViolationCode::BadPeriods => "BAD_PERIODS",
            ViolationCode::NegativeCapacity => "NEGATIVE_CAPACITY",
            ViolationCode::NegativeCost => "NEGATIVE_COST",
            ViolationCode::NegativeTime => "NEGATIVE_TIME",
            ViolationCode::NegativeEmission => "NEGATIVE_EMISSION",
            ViolationCode::RateLength => "RATE_LENGTH",
            ViolationCode::DanglingHubRef => "DANGLING_HUB_REF",
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::NonincreasingSchedule => "NONINCREASING_SCHEDULE",
            ViolationCode::DuplicateStopHub => "DUPLICATE_STOP_HUB",
            ViolationCode::ProbSum => "PROB_SUM",
            ViolationCode::ProbRange => "PROB_RANGE",
            ViolationCode::UnknownTrain => "UNKNOWN_TRAIN",
            ViolationCode::UnknownHub => "UNKNOWN_HUB",
            ViolationCode::CapacityOffRoute => "CAPACITY_OFF_ROUTE",
            ViolationCode::MissingDemand => "MISSING_DEMAND",
            ViolationCode::MissingCapacity => "MISSING_CAPACITY",
        };
        f.write_str(s)
    }
}

/// One concrete validation failure.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// JSON-pointer-style location of the offending field, e.g. `/origins/0/max_prepare`.
    pub path: String,
    /// Human-readable description including the offending value.
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            code,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

/// Aggregated result of validating an instance or a scenario set.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, code: ViolationCode, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation::new(code, path, message));
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    /// Merge another report into this one.
    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
