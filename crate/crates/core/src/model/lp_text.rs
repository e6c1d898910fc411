//! Plain-text export in LP format, for inspection and cross-checking with
//! external solvers.

use super::{MilpModel, Sense, VarKind};
use std::fmt::Write as _;

/// Render the model in LP format (Minimize / Subject To / Bounds /
/// Generals / Binaries). Variable and row names come straight from the
/// model, so the file is self-describing.
pub fn write_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ intermodal freight plan, deterministic equivalent\n");
    out.push_str("Minimize\n obj:");
    let mut written = 0;
    for (col, &coef) in model.objective.iter().enumerate() {
        if coef == 0.0 {
            continue;
        }
        push_term(&mut out, &mut written, coef, &model.columns[col].name);
    }
    if written == 0 {
        // Degenerate but legal: constant-zero objective.
        let _ = write!(out, " 0 {}", model.columns[0].name);
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        let mut terms = 0;
        for &(col, coef) in &row.terms {
            if coef == 0.0 {
                continue;
            }
            push_term(&mut out, &mut terms, coef, &model.columns[col].name);
        }
        if terms == 0 {
            let _ = write!(out, " 0 {}", model.columns[0].name);
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {} {}", op, fmt_num(row.rhs));
    }

    out.push_str("Bounds\n");
    for col in &model.columns {
        let lo = col.lower;
        let up = col.upper;
        if col.kind == VarKind::Binary && lo == 0.0 && up == 1.0 {
            continue; // implied by the Binaries section
        }
        if lo == up {
            let _ = writeln!(out, " {} = {}", col.name, fmt_num(lo));
        } else if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(out, " {} free", col.name);
        } else if lo == f64::NEG_INFINITY {
            let _ = writeln!(out, " -infinity <= {} <= {}", col.name, fmt_num(up));
        } else if up == f64::INFINITY {
            if lo != 0.0 {
                let _ = writeln!(out, " {} >= {}", col.name, fmt_num(lo));
            }
            // lower bound 0 with free upper bound is the LP-format default
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_num(lo), col.name, fmt_num(up));
        }
    }

    let generals: Vec<&str> = model
        .columns
        .iter()
        .filter(|c| c.kind == VarKind::Integer)
        .map(|c| c.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for chunk in generals.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    let binaries: Vec<&str> = model
        .columns
        .iter()
        .filter(|c| c.kind == VarKind::Binary)
        .map(|c| c.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, count: &mut usize, coef: f64, name: &str) {
    if *count > 0 && *count % 8 == 0 {
        out.push_str("\n   ");
    }
    let sign = if coef < 0.0 {
        "-"
    } else if *count == 0 {
        ""
    } else {
        "+ "
    };
    let _ = write!(out, " {}{} {}", sign, fmt_num_abs(coef.abs()), name);
    *count += 1;
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        return "infinity".to_string();
    }
    if v == f64::NEG_INFINITY {
        return "-infinity".to_string();
    }
    fmt_num_abs(v)
}

fn fmt_num_abs(v: f64) -> String {
    // Shortest representation that round-trips; integers print bare.
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}
