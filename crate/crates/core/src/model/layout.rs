//! Column numbering for the deterministic equivalent.
//!
//! Variables are packed into one contiguous vector in a fixed block order:
//! preparation counts, dispatch flows, dispatch indicators, unmet demand,
//! train inventory, excess emissions, tail-excess slack, and the single
//! value-at-risk threshold. The layout is the bridge between solver vectors
//! and the problem's indices and is bijective by construction.

use std::ops::Range;

/// One admissible dispatch: origin -> hub -> train at a departure period,
/// under one scenario. Cells exist only where the shipment reaches the train
/// before its departure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XCell {
    pub origin: usize,
    pub hub: usize,
    pub train: usize,
    /// Position of `hub` in the train's stop sequence.
    pub stop: usize,
    pub period: usize,
    pub scenario: usize,
    /// Per-container transport cost charged in this cell (includes the
    /// transfer charge when the model was built with transfers enabled).
    pub cost: f64,
    /// Emissions per container dispatched in this cell.
    pub emission: f64,
    /// Largest useful flow through this cell (also its upper bound).
    pub big_m: i64,
}

/// Identity of one column in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRef {
    /// Containers prepared at an origin (first stage).
    Prepare { origin: usize },
    /// Dispatch flow through cell `cell` (index into [`VariableLayout::x_cells`]).
    Flow { cell: usize },
    /// Indicator that cell `cell` carries any flow.
    Link { cell: usize },
    /// Containers of a train's demand left unserved in a scenario.
    Unmet { train: usize, scenario: usize },
    /// Containers on board a train when it leaves its `stop`-th call.
    Inventory { train: usize, stop: usize, scenario: usize },
    /// Emissions above the cap in a scenario.
    ExcessEmissions { scenario: usize },
    /// CVaR slack: second-stage cost above the threshold in a scenario.
    TailExcess { scenario: usize },
    /// CVaR threshold (value at risk), shared across scenarios.
    Threshold,
}

/// Block layout of all columns.
#[derive(Debug, Clone)]
pub struct VariableLayout {
    pub num_origins: usize,
    pub num_trains: usize,
    pub num_scenarios: usize,
    /// Stops per train, flattened offsets: stop `p` of train `n` is slot
    /// `stop_offset[n] + p` of a scenario's inventory block.
    pub stop_offset: Vec<usize>,
    pub total_stops: usize,
    /// All dispatch cells, sorted by (scenario, train, stop, origin, period).
    pub x_cells: Vec<XCell>,
    /// Where each scenario's run of cells begins and ends in `x_cells`.
    pub scenario_cells: Vec<Range<usize>>,
    /// Whether linking indicator columns are present.
    pub with_linking: bool,
}

impl VariableLayout {
    pub fn num_cells(&self) -> usize {
        self.x_cells.len()
    }

    pub fn y_start(&self) -> usize {
        0
    }

    pub fn x_start(&self) -> usize {
        self.num_origins
    }

    pub fn z_start(&self) -> usize {
        self.x_start() + self.num_cells()
    }

    pub fn u_start(&self) -> usize {
        if self.with_linking {
            self.z_start() + self.num_cells()
        } else {
            self.z_start()
        }
    }

    pub fn i_start(&self) -> usize {
        self.u_start() + self.num_scenarios * self.num_trains
    }

    pub fn eta_start(&self) -> usize {
        self.i_start() + self.num_scenarios * self.total_stops
    }

    pub fn xi_start(&self) -> usize {
        self.eta_start() + self.num_scenarios
    }

    pub fn theta(&self) -> usize {
        self.xi_start() + self.num_scenarios
    }

    pub fn num_vars(&self) -> usize {
        self.theta() + 1
    }

    pub fn y_index(&self, origin: usize) -> usize {
        debug_assert!(origin < self.num_origins);
        origin
    }

    pub fn x_index(&self, cell: usize) -> usize {
        debug_assert!(cell < self.num_cells());
        self.x_start() + cell
    }

    pub fn z_index(&self, cell: usize) -> usize {
        debug_assert!(self.with_linking && cell < self.num_cells());
        self.z_start() + cell
    }

    pub fn u_index(&self, train: usize, scenario: usize) -> usize {
        debug_assert!(train < self.num_trains && scenario < self.num_scenarios);
        self.u_start() + scenario * self.num_trains + train
    }

    pub fn i_index(&self, train: usize, stop: usize, scenario: usize) -> usize {
        debug_assert!(train < self.num_trains && scenario < self.num_scenarios);
        self.i_start() + scenario * self.total_stops + self.stop_offset[train] + stop
    }

    pub fn eta_index(&self, scenario: usize) -> usize {
        debug_assert!(scenario < self.num_scenarios);
        self.eta_start() + scenario
    }

    pub fn xi_index(&self, scenario: usize) -> usize {
        debug_assert!(scenario < self.num_scenarios);
        self.xi_start() + scenario
    }

    /// Identify the variable behind a column index.
    ///
    /// Panics if `col` is out of range; every in-range column maps to exactly
    /// one [`VarRef`], and [`Self::col_of`] inverts the mapping.
    pub fn var(&self, col: usize) -> VarRef {
        assert!(col < self.num_vars(), "column {col} out of range");
        if col < self.x_start() {
            return VarRef::Prepare { origin: col };
        }
        if col < self.z_start() {
            return VarRef::Flow {
                cell: col - self.x_start(),
            };
        }
        if col < self.u_start() {
            return VarRef::Link {
                cell: col - self.z_start(),
            };
        }
        if col < self.i_start() {
            let k = col - self.u_start();
            return VarRef::Unmet {
                train: k % self.num_trains,
                scenario: k / self.num_trains,
            };
        }
        if col < self.eta_start() {
            let k = col - self.i_start();
            let scenario = k / self.total_stops;
            let slot = k % self.total_stops;
            // stop_offset is nondecreasing; find the train owning this slot.
            let train = match self.stop_offset.binary_search(&slot) {
                Ok(mut n) => {
                    // Equal offsets arise for trains with zero stops (never
                    // after validation, but keep the mapping total).
                    while n + 1 < self.stop_offset.len() && self.stop_offset[n + 1] == slot {
                        n += 1;
                    }
                    n
                }
                Err(n) => n - 1,
            };
            return VarRef::Inventory {
                train,
                stop: slot - self.stop_offset[train],
                scenario,
            };
        }
        if col < self.xi_start() {
            return VarRef::ExcessEmissions {
                scenario: col - self.eta_start(),
            };
        }
        if col < self.theta() {
            return VarRef::TailExcess {
                scenario: col - self.xi_start(),
            };
        }
        VarRef::Threshold
    }

    /// Column index of a variable identity (inverse of [`Self::var`]).
    pub fn col_of(&self, var: &VarRef) -> usize {
        match *var {
            VarRef::Prepare { origin } => self.y_index(origin),
            VarRef::Flow { cell } => self.x_index(cell),
            VarRef::Link { cell } => self.z_index(cell),
            VarRef::Unmet { train, scenario } => self.u_index(train, scenario),
            VarRef::Inventory {
                train,
                stop,
                scenario,
            } => self.i_index(train, stop, scenario),
            VarRef::ExcessEmissions { scenario } => self.eta_index(scenario),
            VarRef::TailExcess { scenario } => self.xi_index(scenario),
            VarRef::Threshold => self.theta(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_layout() -> VariableLayout {
        // 2 origins, 2 trains with 2+1 stops, 3 scenarios, 4 cells total.
        let mut cells = Vec::new();
        let coords = [
            (0, 0, 0, 0, 1, 0),
            (1, 0, 0, 0, 2, 0),
            (0, 1, 1, 0, 0, 1),
            (1, 2, 1, 1, 3, 2),
        ];
        for (origin, hub, train, stop, period, scenario) in coords {
            cells.push(XCell {
                origin,
                hub,
                train,
                stop,
                period,
                scenario,
                cost: 1.0,
                emission: 0.5,
                big_m: 7,
            });
        }
        VariableLayout {
            num_origins: 2,
            num_trains: 2,
            num_scenarios: 3,
            stop_offset: vec![0, 2],
            total_stops: 3,
            x_cells: cells,
            scenario_cells: vec![0..2, 2..3, 3..4],
            with_linking: true,
        }
    }

    #[test]
    fn blocks_are_disjoint_and_exhaustive() {
        let l = sample_layout();
        // 2 y + 4 x + 4 z + 6 U + 9 I + 3 eta + 3 xi + 1 theta
        assert_eq!(l.num_vars(), 2 + 4 + 4 + 6 + 9 + 3 + 3 + 1);
        assert_eq!(l.theta(), l.num_vars() - 1);
    }

    #[test]
    fn var_and_col_of_are_inverse() {
        let l = sample_layout();
        for col in 0..l.num_vars() {
            let var = l.var(col);
            assert_eq!(l.col_of(&var), col, "roundtrip failed for {var:?}");
        }
    }

    #[test]
    fn inventory_slots_map_to_owning_train() {
        let l = sample_layout();
        assert_eq!(
            l.var(l.i_index(1, 0, 2)),
            VarRef::Inventory {
                train: 1,
                stop: 0,
                scenario: 2
            }
        );
        assert_eq!(
            l.var(l.i_index(0, 1, 0)),
            VarRef::Inventory {
                train: 0,
                stop: 1,
                scenario: 0
            }
        );
    }

    #[test]
    fn layout_without_linking_omits_indicator_block() {
        let mut l = sample_layout();
        l.with_linking = false;
        assert_eq!(l.num_vars(), 2 + 4 + 6 + 9 + 3 + 3 + 1);
        for col in 0..l.num_vars() {
            let var = l.var(col);
            assert!(!matches!(var, VarRef::Link { .. }));
            assert_eq!(l.col_of(&var), col);
        }
    }
}
