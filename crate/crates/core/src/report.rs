//! Tabular report assembly and CSV rendering.
//!
//! Experiment results are summarized into small column-ordered tables.
//! Monetary columns in the risk, stochastic-value, and emissions tables are
//! reported in thousands; the capacity table keeps plain cost units because
//! its values are small enough to read directly.

use crate::experiments::{BreakdownReport, CapacityCell, EmissionCell, RiskCell};
use crate::risk::StochasticValueReport;
use serde::Serialize;

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// A column-ordered table with homogeneous string headers.
#[derive(Debug, Clone, Serialize)]
pub struct ReportTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ReportTable {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        ReportTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "ragged report row");
        self.rows.push(row);
    }

    /// Render as RFC-4180-style CSV (quoting only when needed).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_csv_row(&mut out, self.columns.iter().map(String::as_str));
        for row in &self.rows {
            let rendered: Vec<String> = row.iter().map(Cell::render).collect();
            write_csv_row(&mut out, rendered.iter().map(String::as_str));
        }
        out
    }
}

fn write_csv_row<'a>(out: &mut String, fields: impl Iterator<Item = &'a str>) {
    let mut first = true;
    for field in fields {
        if !first {
            out.push(',');
        }
        first = false;
        if field.contains([',', '"', '\n', '\r']) {
            out.push('"');
            out.push_str(&field.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(field);
        }
    }
    out.push('\n');
}

/// Format a float with up to six decimals, trailing zeros trimmed.
pub fn fmt_float(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == v.trunc() && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let mut s = format!("{v:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn thousands(v: f64) -> Cell {
    Cell::Num(v / 1000.0)
}

/// Risk-grid table; monetary columns in thousands.
pub fn risk_table(cells: &[RiskCell]) -> ReportTable {
    let mut t = ReportTable::new(vec![
        "lambda", "alpha", "obj", "asc", "etc", "var", "cvar", "status",
    ]);
    for c in cells {
        t.push_row(vec![
            Cell::Num(c.lambda),
            Cell::Num(c.alpha),
            thousands(c.objective),
            thousands(c.expected_second_stage),
            thousands(c.expected_total),
            thousands(c.var),
            thousands(c.cvar),
            Cell::Text(c.status.clone()),
        ]);
    }
    t
}

/// Stochastic-value table; monetary columns in thousands.
pub fn stochastic_table(
    report: &StochasticValueReport,
    trains: usize,
    scenarios: usize,
) -> ReportTable {
    let mut t = ReportTable::new(vec![
        "Trains", "Scen", "EEV", "SS", "WS", "VSS", "EVPI", "VSS(%)", "CVaR_SS",
    ]);
    t.push_row(vec![
        Cell::Int(trains as i64),
        Cell::Int(scenarios as i64),
        thousands(report.eev),
        thousands(report.ss),
        thousands(report.ws),
        thousands(report.vss),
        thousands(report.evpi),
        Cell::Num(report.vss_pct),
        thousands(report.cvar_ss),
    ]);
    t
}

/// Emissions-grid table; objective in thousands, emissions in raw units.
pub fn emissions_table(cells: &[EmissionCell]) -> ReportTable {
    let mut t = ReportTable::new(vec![
        "epsilon",
        "lambda",
        "alpha",
        "obj",
        "expected_emissions",
        "expected_excess",
        "plateau",
        "status",
    ]);
    for c in cells {
        t.push_row(vec![
            Cell::Num(c.epsilon),
            Cell::Num(c.lambda),
            Cell::Num(c.alpha),
            thousands(c.objective),
            Cell::Num(c.expected_emissions),
            Cell::Num(c.expected_excess),
            Cell::Text(c.plateau.to_string()),
            Cell::Text(c.status.clone()),
        ]);
    }
    t
}

/// Capacity-grid table; costs in plain units.
pub fn capacity_table(cells: &[CapacityCell]) -> ReportTable {
    let mut t = ReportTable::new(vec![
        "capacity",
        "total_cost",
        "expected_unmet",
        "demand_met_pct",
        "max_unmet",
        "min_unmet",
        "std_unmet",
        "status",
    ]);
    for c in cells {
        t.push_row(vec![
            Cell::Int(c.capacity),
            Cell::Num(c.total_cost),
            Cell::Num(c.expected_unmet),
            Cell::Num(c.demand_met_pct),
            Cell::Num(c.max_unmet),
            Cell::Num(c.min_unmet),
            Cell::Num(c.std_unmet),
            Cell::Text(c.status.clone()),
        ]);
    }
    t
}

/// Cost-structure table; amounts in plain units plus percentage shares.
pub fn breakdown_table(report: &BreakdownReport) -> ReportTable {
    let mut t = ReportTable::new(vec!["component", "amount", "share_pct"]);
    for c in &report.components {
        t.push_row(vec![
            Cell::Text(c.name.to_string()),
            Cell::Num(c.amount),
            Cell::Num(c.share_pct),
        ]);
    }
    t.push_row(vec![
        Cell::Text("total".to_string()),
        Cell::Num(report.objective),
        Cell::Num(100.0),
    ]);
    t
}
