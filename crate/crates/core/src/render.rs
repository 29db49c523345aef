//! Stable textual rendering of literals and terms, shared by diagnostics,
//! traces, and the `closure` dump. The output is re-parseable script syntax.

use crate::lang::{
    DiagramLit, Literal, MagAtom, MagnitudeTerm, MetricLit, MetricRel, Obj, ObjTable, Pred,
};

pub fn obj_str(o: Obj, t: &ObjTable) -> String {
    t.name(o).to_string()
}

pub fn diagram_lit_str(l: &DiagramLit, t: &ObjTable) -> String {
    let args: Vec<String> = l.atom.args().iter().map(|&o| obj_str(o, t)).collect();
    let base = match l.atom.pred {
        Pred::OnLine | Pred::OnCircle => format!("on({}, {})", args[0], args[1]),
        Pred::SameSide => format!("same_side({}, {}, {})", args[0], args[1], args[2]),
        Pred::Between => format!("between({}, {}, {})", args[0], args[1], args[2]),
        Pred::Inside => format!("inside({}, {})", args[0], args[1]),
        Pred::Center => format!("center({}, {})", args[0], args[1]),
        Pred::IntersectsLL | Pred::IntersectsLC | Pred::IntersectsCC => {
            format!("intersects({}, {})", args[0], args[1])
        }
        Pred::EqPoint | Pred::EqLine | Pred::EqCircle => {
            return if l.pos {
                format!("{} = {}", args[0], args[1])
            } else {
                format!("{} != {}", args[0], args[1])
            }
        }
    };
    if l.pos {
        base
    } else {
        format!("!{base}")
    }
}

pub fn mag_atom_str(a: &MagAtom, t: &ObjTable) -> String {
    match a {
        MagAtom::Seg(x, y) => format!("seg({}, {})", obj_str(*x, t), obj_str(*y, t)),
        MagAtom::Angle(x, y, z) => format!(
            "angle({}, {}, {})",
            obj_str(*x, t),
            obj_str(*y, t),
            obj_str(*z, t)
        ),
        MagAtom::Area(x, y, z) => format!(
            "area({}, {}, {})",
            obj_str(*x, t),
            obj_str(*y, t),
            obj_str(*z, t)
        ),
        MagAtom::RightAngle => "right_angle".to_string(),
    }
}

pub fn term_str(term: &MagnitudeTerm, t: &ObjTable) -> String {
    if term.summands.is_empty() {
        return "0".to_string();
    }
    term.summands
        .iter()
        .map(|a| mag_atom_str(a, t))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn metric_lit_str(l: &MetricLit, t: &ObjTable) -> String {
    let lhs = term_str(&l.atom.lhs, t);
    let rhs = term_str(&l.atom.rhs, t);
    match (l.atom.rel, l.pos) {
        (MetricRel::Eq, true) => format!("{lhs} = {rhs}"),
        (MetricRel::Eq, false) => format!("{lhs} != {rhs}"),
        (MetricRel::Lt, true) => format!("{lhs} < {rhs}"),
        // ¬(rhs < lhs) is the definition of ≤.
        (MetricRel::Lt, false) => format!("{rhs} <= {lhs}"),
    }
}

pub fn lit_str(l: &Literal, t: &ObjTable) -> String {
    match l {
        Literal::Diagram(d) => diagram_lit_str(d, t),
        Literal::Metric(m) => metric_lit_str(m, t),
        Literal::Falsity => "contradiction".to_string(),
    }
}
