//! The construction rules: built-in theorems Π ⇒ ∃x⃗. Θ that introduce new
//! objects when their prerequisites are established. The full list is kept
//! verbatim (including the redundant circle-intersection rules 8 and 9),
//! since the corpus proofs use them as stated.
//!
//! Optional "[distinct from …]" clauses are free choices, not obligations:
//! requesting distinctness from a point adds a disequality conclusion, from
//! a line a non-incidence conclusion, from a circle a non-incidence
//! conclusion. For points constructed on a line (rules 2–4) a requested
//! line must be distinct from the carrier, which becomes a prerequisite;
//! likewise for rule 7 and a requested circle.

use crate::diagram::SchematicLit;
use crate::lang::{Pred, Sort};
use std::sync::OnceLock;

/// What kind of carrier the constructed point is confined to, which
/// determines prerequisites induced by distinct-from items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistinctSupport {
    /// No distinct-from clause accepted.
    None,
    /// Point ranges over a two-dimensional region: all items accepted
    /// without prerequisites.
    Free,
    /// Point confined to the line in the given input slot: a requested line
    /// must be distinct from it.
    OnLine(u8),
    /// Point confined to the circle in the given input slot: a requested
    /// circle must be distinct from it.
    OnCircle(u8),
}

#[derive(Debug, Clone)]
pub struct ConstructionRule {
    pub id: &'static str,
    /// Script keyword; several rules share a keyword and are dispatched on
    /// argument sorts.
    pub keyword: &'static str,
    pub inputs: Vec<(&'static str, Sort)>,
    pub outputs: Vec<(&'static str, Sort)>,
    /// Over input slots only.
    pub prereqs: Vec<SchematicLit>,
    /// Over input slots followed by output slots.
    pub conclusions: Vec<SchematicLit>,
    pub distinct_support: DistinctSupport,
}

fn slit(pos: bool, pred: Pred, vars: &[u8]) -> SchematicLit {
    let mut v = [u8::MAX; 3];
    v[..vars.len()].copy_from_slice(vars);
    SchematicLit { pos, pred, vars: v }
}

pub fn construction_catalog() -> &'static [ConstructionRule] {
    static CATALOG: OnceLock<Vec<ConstructionRule>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

fn build_catalog() -> Vec<ConstructionRule> {
    use Pred::*;
    use Sort::{Circle as C, Line as L, Point as P};
    vec![
        // Points.
        ConstructionRule {
            id: "points.1",
            keyword: "point",
            inputs: vec![],
            outputs: vec![("a", P)],
            prereqs: vec![],
            conclusions: vec![],
            distinct_support: DistinctSupport::Free,
        },
        ConstructionRule {
            id: "points.2",
            keyword: "point_on",
            inputs: vec![("L", L)],
            outputs: vec![("a", P)],
            prereqs: vec![],
            conclusions: vec![slit(true, OnLine, &[1, 0])],
            distinct_support: DistinctSupport::OnLine(0),
        },
        ConstructionRule {
            id: "points.3",
            keyword: "point_on_between",
            inputs: vec![("L", L), ("b", P), ("c", P)],
            outputs: vec![("a", P)],
            prereqs: vec![
                slit(true, OnLine, &[1, 0]),
                slit(true, OnLine, &[2, 0]),
                slit(false, EqPoint, &[1, 2]),
            ],
            conclusions: vec![slit(true, OnLine, &[3, 0]), slit(true, Between, &[1, 3, 2])],
            distinct_support: DistinctSupport::OnLine(0),
        },
        ConstructionRule {
            id: "points.4",
            keyword: "point_on_extending",
            inputs: vec![("L", L), ("b", P), ("c", P)],
            outputs: vec![("a", P)],
            prereqs: vec![
                slit(true, OnLine, &[1, 0]),
                slit(true, OnLine, &[2, 0]),
                slit(false, EqPoint, &[1, 2]),
            ],
            conclusions: vec![slit(true, OnLine, &[3, 0]), slit(true, Between, &[1, 2, 3])],
            distinct_support: DistinctSupport::OnLine(0),
        },
        ConstructionRule {
            id: "points.5",
            keyword: "point_same_side",
            inputs: vec![("L", L), ("b", P)],
            outputs: vec![("a", P)],
            prereqs: vec![slit(false, OnLine, &[1, 0])],
            conclusions: vec![slit(true, SameSide, &[2, 1, 0])],
            distinct_support: DistinctSupport::Free,
        },
        ConstructionRule {
            id: "points.6",
            keyword: "point_opposite_side",
            inputs: vec![("L", L), ("b", P)],
            outputs: vec![("a", P)],
            prereqs: vec![slit(false, OnLine, &[1, 0])],
            conclusions: vec![
                slit(false, OnLine, &[2, 0]),
                slit(false, SameSide, &[2, 1, 0]),
            ],
            distinct_support: DistinctSupport::Free,
        },
        ConstructionRule {
            id: "points.7",
            keyword: "point_on_circle",
            inputs: vec![("alpha", C)],
            outputs: vec![("a", P)],
            prereqs: vec![],
            conclusions: vec![slit(true, OnCircle, &[1, 0])],
            distinct_support: DistinctSupport::OnCircle(0),
        },
        ConstructionRule {
            id: "points.8",
            keyword: "point_inside",
            inputs: vec![("alpha", C)],
            outputs: vec![("a", P)],
            prereqs: vec![],
            conclusions: vec![slit(true, Inside, &[1, 0])],
            distinct_support: DistinctSupport::Free,
        },
        ConstructionRule {
            id: "points.9",
            keyword: "point_outside",
            inputs: vec![("alpha", C)],
            outputs: vec![("a", P)],
            prereqs: vec![],
            conclusions: vec![slit(false, Inside, &[1, 0]), slit(false, OnCircle, &[1, 0])],
            distinct_support: DistinctSupport::Free,
        },
        // Lines and circles.
        ConstructionRule {
            id: "lines.1",
            keyword: "line_through",
            inputs: vec![("a", P), ("b", P)],
            outputs: vec![("L", L)],
            prereqs: vec![slit(false, EqPoint, &[0, 1])],
            conclusions: vec![slit(true, OnLine, &[0, 2]), slit(true, OnLine, &[1, 2])],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "circles.1",
            keyword: "circle_through",
            inputs: vec![("a", P), ("b", P)],
            outputs: vec![("alpha", C)],
            prereqs: vec![slit(false, EqPoint, &[0, 1])],
            conclusions: vec![slit(true, Center, &[0, 2]), slit(true, OnCircle, &[1, 2])],
            distinct_support: DistinctSupport::None,
        },
        // Intersections.
        ConstructionRule {
            id: "intersections.1",
            keyword: "intersection_point",
            inputs: vec![("L", L), ("M", L)],
            outputs: vec![("a", P)],
            prereqs: vec![slit(true, IntersectsLL, &[0, 1])],
            conclusions: vec![slit(true, OnLine, &[2, 0]), slit(true, OnLine, &[2, 1])],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.2",
            keyword: "intersection_point",
            inputs: vec![("L", L), ("alpha", C)],
            outputs: vec![("a", P)],
            prereqs: vec![slit(true, IntersectsLC, &[0, 1])],
            conclusions: vec![slit(true, OnCircle, &[2, 1]), slit(true, OnLine, &[2, 0])],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.3",
            keyword: "intersection_points",
            inputs: vec![("L", L), ("alpha", C)],
            outputs: vec![("a", P), ("b", P)],
            prereqs: vec![slit(true, IntersectsLC, &[0, 1])],
            conclusions: vec![
                slit(true, OnCircle, &[2, 1]),
                slit(true, OnLine, &[2, 0]),
                slit(true, OnCircle, &[3, 1]),
                slit(true, OnLine, &[3, 0]),
                slit(false, EqPoint, &[2, 3]),
            ],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.4",
            keyword: "intersection_between",
            inputs: vec![("L", L), ("alpha", C), ("b", P), ("c", P)],
            outputs: vec![("a", P)],
            prereqs: vec![
                slit(true, Inside, &[2, 1]),
                slit(true, OnLine, &[2, 0]),
                slit(false, Inside, &[3, 1]),
                slit(false, OnCircle, &[3, 1]),
                slit(true, OnLine, &[3, 0]),
            ],
            conclusions: vec![
                slit(true, OnCircle, &[4, 1]),
                slit(true, OnLine, &[4, 0]),
                slit(true, Between, &[2, 4, 3]),
            ],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.5",
            keyword: "intersection_extending",
            inputs: vec![("L", L), ("alpha", C), ("c", P), ("b", P)],
            outputs: vec![("a", P)],
            prereqs: vec![
                slit(true, Inside, &[3, 1]),
                slit(true, OnLine, &[3, 0]),
                slit(false, EqPoint, &[2, 3]),
                slit(true, OnLine, &[2, 0]),
            ],
            conclusions: vec![
                slit(true, OnCircle, &[4, 1]),
                slit(true, OnLine, &[4, 0]),
                slit(true, Between, &[2, 3, 4]),
            ],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.6",
            keyword: "intersection_point",
            inputs: vec![("alpha", C), ("beta", C)],
            outputs: vec![("a", P)],
            prereqs: vec![slit(true, IntersectsCC, &[0, 1])],
            conclusions: vec![slit(true, OnCircle, &[2, 0]), slit(true, OnCircle, &[2, 1])],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.7",
            keyword: "intersection_points",
            inputs: vec![("alpha", C), ("beta", C)],
            outputs: vec![("a", P), ("b", P)],
            prereqs: vec![slit(true, IntersectsCC, &[0, 1])],
            conclusions: vec![
                slit(true, OnCircle, &[2, 0]),
                slit(true, OnCircle, &[2, 1]),
                slit(true, OnCircle, &[3, 0]),
                slit(true, OnCircle, &[3, 1]),
                slit(false, EqPoint, &[2, 3]),
            ],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.8",
            keyword: "intersection_same_side",
            inputs: vec![
                ("alpha", C),
                ("beta", C),
                ("c", P),
                ("d", P),
                ("L", L),
                ("b", P),
            ],
            outputs: vec![("a", P)],
            prereqs: vec![
                slit(true, IntersectsCC, &[0, 1]),
                slit(true, Center, &[2, 0]),
                slit(true, Center, &[3, 1]),
                slit(true, OnLine, &[2, 4]),
                slit(true, OnLine, &[3, 4]),
                slit(false, OnLine, &[5, 4]),
            ],
            conclusions: vec![
                slit(true, OnCircle, &[6, 0]),
                slit(true, OnCircle, &[6, 1]),
                slit(true, SameSide, &[6, 5, 4]),
            ],
            distinct_support: DistinctSupport::None,
        },
        ConstructionRule {
            id: "intersections.9",
            keyword: "intersection_opposite_side",
            inputs: vec![
                ("alpha", C),
                ("beta", C),
                ("c", P),
                ("d", P),
                ("L", L),
                ("b", P),
            ],
            outputs: vec![("a", P)],
            prereqs: vec![
                slit(true, IntersectsCC, &[0, 1]),
                slit(true, Center, &[2, 0]),
                slit(true, Center, &[3, 1]),
                slit(true, OnLine, &[2, 4]),
                slit(true, OnLine, &[3, 4]),
                slit(false, OnLine, &[5, 4]),
            ],
            conclusions: vec![
                slit(true, OnCircle, &[6, 0]),
                slit(true, OnCircle, &[6, 1]),
                slit(false, SameSide, &[6, 5, 4]),
                slit(false, OnLine, &[6, 4]),
            ],
            distinct_support: DistinctSupport::None,
        },
    ]
}

/// Resolves a construction keyword and argument sorts to a rule. Shared
/// keywords (`intersection_point`, `intersection_points`) dispatch on the
/// argument sorts; a line/circle pair is accepted in either order.
pub fn resolve_rule(
    keyword: &str,
    arg_sorts: &[Sort],
) -> Option<(&'static ConstructionRule, bool)> {
    for rule in construction_catalog() {
        if rule.keyword != keyword {
            continue;
        }
        let want: Vec<Sort> = rule.inputs.iter().map(|(_, s)| *s).collect();
        if want.len() != arg_sorts.len() {
            continue;
        }
        if want == arg_sorts {
            return Some((rule, false));
        }
        // line/circle pair in flipped order
        if want.len() == 2
            && want[0] == Sort::Line
            && want[1] == Sort::Circle
            && arg_sorts[0] == Sort::Circle
            && arg_sorts[1] == Sort::Line
        {
            return Some((rule, true));
        }
    }
    None
}

pub fn rule_by_id(id: &str) -> Option<&'static ConstructionRule> {
    construction_catalog().iter().find(|r| r.id == id)
}
