//! Two-stage stochastic planning for intermodal rail-road container freight.
//!
//! The library models a planner who books container preparations at origins
//! before demand is known (first stage) and then, per demand/capacity
//! scenario, trucks containers to rail hubs to meet train demands (second
//! stage). The deterministic equivalent is a mixed-integer linear program
//! whose objective blends expected cost with a conditional value-at-risk
//! term over second-stage costs and a penalty on emissions above a cap.
//!
//! Components:
//!
//! * [`instance`] / [`scenario`] — problem data model, validation, and a
//!   seeded scenario sampler.
//! * [`model`] — deterministic-equivalent MILP builder, plan decoding, and
//!   LP-format export.
//! * [`solver`] — exact mixed-integer solver: bounded-variable revised
//!   simplex inside branch-and-bound, plus an independent solution checker.
//! * [`risk`] — CVaR primitives and stochastic-value metrics (VSS, EVPI).
//! * [`experiments`] / [`report`] — parameter sweeps and CSV table assembly.
//! * [`fileio`] — problem-document loading, resolution, and validation.
//! * [`generate`] — seeded synthetic problems for tests.

pub mod experiments;
pub mod fileio;
pub mod generate;
pub mod instance;
pub mod model;
pub mod report;
pub mod risk;
pub mod scenario;
pub mod solver;
pub mod validation;

pub use instance::Instance;
pub use model::{build_milp, decode, BuildOptions, MilpModel, Plan};
pub use risk::RiskParams;
pub use scenario::ScenarioSet;
pub use solver::{solve_milp, MipResult, MipStatus, SolverConfig};
