use std::fmt::Write;

use super::{MilpModel, VarKind};

const TERMS_PER_LINE: usize = 8;

fn write_expression(out: &mut String, model: &MilpModel, terms: &[(usize, f64)]) {
    if terms.is_empty() {
        // the format has no empty expressions
        let _ = write!(out, " 0 {}", model.variables()[0].name);
        return;
    }
    for (pos, &(j, c)) in terms.iter().enumerate() {
        if pos > 0 && pos % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let name = &model.variables()[j].name;
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        match (pos, mag == 1.0) {
            (0, true) if c > 0.0 => {
                let _ = write!(out, " {name}");
            }
            (0, false) if c > 0.0 => {
                let _ = write!(out, " {mag} {name}");
            }
            (_, true) => {
                let _ = write!(out, " {sign} {name}");
            }
            (_, false) => {
                let _ = write!(out, " {sign} {mag} {name}");
            }
        }
    }
}

/// Renders `model` in CPLEX LP format. Names are the model's variable and
/// constraint names, so solutions from an external solver map back by name.
pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {} variables, {} constraints", model.variables().len(), model.constraints().len());
    out.push_str("Minimize\n obj:");
    if model.variables().is_empty() {
        out.push_str(" 0\n");
    } else {
        write_expression(&mut out, model, model.objective());
        out.push('\n');
    }
    out.push_str("Subject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        write_expression(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.relation.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.variables() {
        if v.kind == VarKind::Binary {
            continue;
        }
        if v.lower == v.upper {
            let _ = writeln!(out, " {} = {}", v.name, v.lower);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
    }
    for (header, kind) in [("Generals", VarKind::Integer), ("Binaries", VarKind::Binary)] {
        let names: Vec<&str> = model.variables().iter().filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect();
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{header}");
        for chunk in names.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}
