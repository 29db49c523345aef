//! Pretty-printer; its output parses back to a structurally identical
//! script (spans aside).

use crate::ast::{
    LitAst, MagAtomAst, ProofScript, QedMode, Step, StepKind, SuperKind, TermAst, TheoremAst,
    TheoremStatus,
};
use crate::lang::{MetricRel, Pred, Sort};
use std::fmt::Write;

pub fn pretty(script: &ProofScript) -> String {
    let mut s = String::new();
    for i in &script.imports {
        let _ = writeln!(s, "import {i}");
    }
    if !script.imports.is_empty() {
        s.push('\n');
    }
    for t in &script.theorems {
        theorem(&mut s, t);
        s.push('\n');
    }
    s
}

fn sort_kw(s: Sort) -> &'static str {
    match s {
        Sort::Point => "point",
        Sort::Line => "line",
        Sort::Circle => "circle",
    }
}

fn theorem(s: &mut String, t: &TheoremAst) {
    let params = t
        .params
        .iter()
        .map(|(n, so)| format!("{} {n}", sort_kw(*so)))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(s, "theorem {} ({params}) {{", t.name);
    if !t.assumes.is_empty() {
        let _ = writeln!(s, "  assume {}", lits(&t.assumes));
    }
    match &t.concludes {
        None => {
            let _ = writeln!(s, "  conclude contradiction");
        }
        Some(cs) => {
            if t.existentials.is_empty() {
                let _ = writeln!(s, "  conclude {}", lits(cs));
            } else {
                let ex = t
                    .existentials
                    .iter()
                    .map(|(n, so)| format!("{} {n}", sort_kw(*so)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(s, "  conclude exists {ex} : {}", lits(cs));
            }
        }
    }
    match t.status {
        TheoremStatus::Assumed => {
            let _ = writeln!(s, "  assumed");
        }
        TheoremStatus::Proved => {
            let _ = writeln!(s, "  proof {{");
            for st in &t.proof {
                step(s, st, 2);
            }
            let _ = writeln!(s, "  }}");
        }
    }
    let _ = writeln!(s, "}}");
}

fn indent(s: &mut String, level: usize) {
    for _ in 0..level {
        s.push_str("  ");
    }
}

fn step(s: &mut String, st: &Step, level: usize) {
    indent(s, level);
    match &st.kind {
        StepKind::Construct {
            keyword,
            outputs,
            args,
            distinct_from,
        } => {
            let _ = write!(
                s,
                "let {} = {keyword}({})",
                outputs.join(", "),
                args.join(", ")
            );
            if !distinct_from.is_empty() {
                let _ = write!(s, " distinct_from {}", distinct_from.join(", "));
            }
            s.push('\n');
        }
        StepKind::Have {
            lit: LitAst::Falsity,
        } => {
            s.push_str("contradiction\n");
        }
        StepKind::Have { lit: l } => {
            let _ = writeln!(s, "have {}", lit(l));
        }
        StepKind::Apply {
            theorem,
            args,
            outputs,
            selected,
        } => {
            let _ = write!(s, "by {theorem} applied to {}", args.join(", "));
            if !outputs.is_empty() {
                let outs = outputs
                    .iter()
                    .map(|(n, so)| {
                        if n == "_" {
                            "_".to_string()
                        } else {
                            format!("{} {n}", sort_kw(*so))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = write!(s, " let {outs}");
            }
            if let Some(sel) = selected {
                let _ = write!(s, " : {}", lits(sel));
            }
            s.push('\n');
        }
        StepKind::Suppose { assumption, body } => {
            let _ = writeln!(s, "suppose {} {{", lit(assumption));
            for b in body {
                step(s, b, level + 1);
            }
            indent(s, level);
            s.push_str("}\n");
        }
        StepKind::Cases {
            on,
            pos_branch,
            neg_branch,
        } => {
            let _ = writeln!(s, "case {} {{", lit(on));
            for b in pos_branch {
                step(s, b, level + 1);
            }
            indent(s, level);
            let _ = writeln!(s, "}} case {} {{", lit(&on.negated()));
            for b in neg_branch {
                step(s, b, level + 1);
            }
            indent(s, level);
            s.push_str("}\n");
        }
        StepKind::Superpose {
            kind,
            args,
            primed,
            body,
            conclude,
        } => {
            let kw = match kind {
                SuperKind::Sas => "superpose-sas",
                SuperKind::Sss => "superpose-sss",
            };
            let _ = writeln!(s, "{kw}({}) as {} {{", args.join(", "), primed.join(", "));
            for b in body {
                step(s, b, level + 1);
            }
            indent(s, level + 1);
            let _ = writeln!(s, "conclude {}", lits(conclude));
            indent(s, level);
            s.push_str("}\n");
        }
        StepKind::Qed { mode } => {
            let _ = writeln!(
                s,
                "{}",
                match mode {
                    QedMode::Qed => "qed",
                    QedMode::Qef => "qef",
                }
            );
        }
    }
}

fn lits(ls: &[LitAst]) -> String {
    ls.iter().map(lit).collect::<Vec<_>>().join(", ")
}

fn lit(l: &LitAst) -> String {
    match l {
        LitAst::Falsity => "contradiction".to_string(),
        LitAst::Diagram { pos, pred, args } => {
            let base = match pred {
                Pred::OnLine | Pred::OnCircle => format!("on({}, {})", args[0], args[1]),
                Pred::SameSide => {
                    format!("same_side({}, {}, {})", args[0], args[1], args[2])
                }
                Pred::Between => format!("between({}, {}, {})", args[0], args[1], args[2]),
                Pred::Inside => format!("inside({}, {})", args[0], args[1]),
                Pred::Center => format!("center({}, {})", args[0], args[1]),
                Pred::IntersectsLL | Pred::IntersectsLC | Pred::IntersectsCC => {
                    format!("intersects({}, {})", args[0], args[1])
                }
                Pred::EqPoint | Pred::EqLine | Pred::EqCircle => {
                    return if *pos {
                        format!("{} = {}", args[0], args[1])
                    } else {
                        format!("{} != {}", args[0], args[1])
                    }
                }
            };
            if *pos {
                base
            } else {
                format!("!{base}")
            }
        }
        LitAst::Metric { pos, rel, lhs, rhs } => {
            let op = match (rel, pos) {
                (MetricRel::Eq, true) => "=",
                (MetricRel::Eq, false) => "!=",
                (MetricRel::Lt, true) => "<",
                (MetricRel::Lt, false) => {
                    // stored as ¬(rhs' < lhs'), printed as lhs' <= rhs'
                    return format!("{} <= {}", term(rhs), term(lhs));
                }
            };
            format!("{} {op} {}", term(lhs), term(rhs))
        }
    }
}

fn term(t: &TermAst) -> String {
    if t.summands.is_empty() {
        return "0".to_string();
    }
    t.summands
        .iter()
        .map(|a| match a {
            MagAtomAst::Seg(x, y) => format!("seg({x}, {y})"),
            MagAtomAst::Angle(x, y, z) => format!("angle({x}, {y}, {z})"),
            MagAtomAst::Area(x, y, z) => format!("area({x}, {y}, {z})"),
            MagAtomAst::RightAngle => "right_angle".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
