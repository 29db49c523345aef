//! Transfer inferences: one-rule bridges between diagram facts and metric
//! facts. Each axiom of the diagram-segment, diagram-angle, and
//! diagram-area groups is stored as one or more directed rules; the
//! iff-form axioms get one rule per direction.
//!
//! The rules marked `auto` have only diagrammatic hypotheses and are applied
//! silently whenever the diagram grows, mirroring Euclid's unstated uses:
//! adjacent segments/angles/areas sum, different descriptions of the same
//! angle coincide, and radii of a circle are equal.

use crate::diagram::{DiagramState, SchematicLit};
use crate::lang::{
    DiagramAtom, DiagramLit, Literal, MagAtom, MagSort, MagnitudeTerm, MetricAtom, MetricLit,
    MetricRel, Obj, Pred, Sort,
};
use crate::metric::MetricContext;
use std::sync::OnceLock;

/// Schematic atomic magnitude over rule variable slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SMagAtom {
    Seg(u8, u8),
    Angle(u8, u8, u8),
    Area(u8, u8, u8),
    RightAngle,
}

impl SMagAtom {
    pub fn instantiate(self, b: &[Obj]) -> MagAtom {
        match self {
            SMagAtom::Seg(x, y) => MagAtom::Seg(b[x as usize], b[y as usize]),
            SMagAtom::Angle(x, y, z) => MagAtom::Angle(b[x as usize], b[y as usize], b[z as usize]),
            SMagAtom::Area(x, y, z) => MagAtom::Area(b[x as usize], b[y as usize], b[z as usize]),
            SMagAtom::RightAngle => MagAtom::RightAngle,
        }
    }

    fn sort(self) -> MagSort {
        match self {
            SMagAtom::Seg(..) => MagSort::Segment,
            SMagAtom::Angle(..) => MagSort::Angle,
            SMagAtom::Area(..) => MagSort::Area,
            SMagAtom::RightAngle => MagSort::Angle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SMetricLit {
    pub pos: bool,
    pub rel: MetricRel,
    pub lhs: Vec<SMagAtom>,
    pub rhs: Vec<SMagAtom>,
}

impl SMetricLit {
    pub fn instantiate(&self, b: &[Obj]) -> MetricLit {
        let sort = self
            .lhs
            .first()
            .or(self.rhs.first())
            .map(|a| a.sort())
            .unwrap_or(MagSort::Segment);
        let term = |atoms: &[SMagAtom]| {
            MagnitudeTerm {
                sort,
                summands: atoms.iter().map(|a| a.instantiate(b)).collect(),
            }
            .normalize()
        };
        MetricLit {
            pos: self.pos,
            atom: MetricAtom {
                rel: self.rel,
                lhs: term(&self.lhs),
                rhs: term(&self.rhs),
            }
            .normalize(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SConclusion {
    Diagram(SchematicLit),
    Metric(SMetricLit),
}

/// A directed transfer rule.
#[derive(Debug, Clone)]
pub struct TransferRule {
    pub id: &'static str,
    pub vars: Vec<(&'static str, Sort)>,
    pub diagram_hyps: Vec<SchematicLit>,
    pub metric_hyps: Vec<SMetricLit>,
    pub conclusion: SConclusion,
    /// Applied silently before any demonstration step.
    pub auto: bool,
}

fn slit(pos: bool, pred: Pred, vars: &[u8]) -> SchematicLit {
    let mut v = [u8::MAX; 3];
    v[..vars.len()].copy_from_slice(vars);
    SchematicLit { pos, pred, vars: v }
}

fn meq(lhs: Vec<SMagAtom>, rhs: Vec<SMagAtom>) -> SMetricLit {
    SMetricLit {
        pos: true,
        rel: MetricRel::Eq,
        lhs,
        rhs,
    }
}

fn mlt(lhs: Vec<SMagAtom>, rhs: Vec<SMagAtom>) -> SMetricLit {
    SMetricLit {
        pos: true,
        rel: MetricRel::Lt,
        lhs,
        rhs,
    }
}

/// The complete transfer catalog; rule ids are a frozen regression surface.
pub fn transfer_catalog() -> &'static [TransferRule] {
    static CATALOG: OnceLock<Vec<TransferRule>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

#[allow(clippy::vec_init_then_push)]
fn build_catalog() -> Vec<TransferRule> {
    use Pred::*;
    use SMagAtom::*;
    use Sort::{Circle as C, Line as L, Point as P};
    let mut out = Vec::new();

    // seg.1: between(a,b,c) ⟹ seg(ab) + seg(bc) = seg(ac).
    out.push(TransferRule {
        id: "seg.1",
        vars: vec![("a", P), ("b", P), ("c", P)],
        diagram_hyps: vec![slit(true, Between, &[0, 1, 2])],
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(meq(vec![Seg(0, 1), Seg(1, 2)], vec![Seg(0, 2)])),
        auto: true,
    });

    // seg.2: a circle is determined by its center and radius.
    out.push(TransferRule {
        id: "seg.2",
        vars: vec![("a", P), ("b", P), ("c", P), ("alpha", C), ("beta", C)],
        diagram_hyps: vec![
            slit(true, Center, &[0, 3]),
            slit(true, Center, &[0, 4]),
            slit(true, OnCircle, &[1, 3]),
            slit(true, OnCircle, &[2, 4]),
        ],
        metric_hyps: vec![meq(vec![Seg(0, 1)], vec![Seg(0, 2)])],
        conclusion: SConclusion::Diagram(slit(true, EqCircle, &[3, 4])),
        auto: false,
    });

    // seg.3: with center a and b on alpha: seg(ac) = seg(ab) iff c on alpha.
    out.push(TransferRule {
        id: "seg.3.md",
        vars: vec![("a", P), ("b", P), ("c", P), ("alpha", C)],
        diagram_hyps: vec![slit(true, Center, &[0, 3]), slit(true, OnCircle, &[1, 3])],
        metric_hyps: vec![meq(vec![Seg(0, 2)], vec![Seg(0, 1)])],
        conclusion: SConclusion::Diagram(slit(true, OnCircle, &[2, 3])),
        auto: false,
    });
    out.push(TransferRule {
        id: "seg.3.dm",
        vars: vec![("a", P), ("b", P), ("c", P), ("alpha", C)],
        diagram_hyps: vec![
            slit(true, Center, &[0, 3]),
            slit(true, OnCircle, &[1, 3]),
            slit(true, OnCircle, &[2, 3]),
        ],
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(meq(vec![Seg(0, 2)], vec![Seg(0, 1)])),
        auto: true,
    });

    // seg.4: with center a and b on alpha: seg(ac) < seg(ab) iff c inside.
    out.push(TransferRule {
        id: "seg.4.md",
        vars: vec![("a", P), ("b", P), ("c", P), ("alpha", C)],
        diagram_hyps: vec![slit(true, Center, &[0, 3]), slit(true, OnCircle, &[1, 3])],
        metric_hyps: vec![mlt(vec![Seg(0, 2)], vec![Seg(0, 1)])],
        conclusion: SConclusion::Diagram(slit(true, Inside, &[2, 3])),
        auto: false,
    });
    out.push(TransferRule {
        id: "seg.4.dm",
        vars: vec![("a", P), ("b", P), ("c", P), ("alpha", C)],
        diagram_hyps: vec![
            slit(true, Center, &[0, 3]),
            slit(true, OnCircle, &[1, 3]),
            slit(true, Inside, &[2, 3]),
        ],
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(mlt(vec![Seg(0, 2)], vec![Seg(0, 1)])),
        auto: false,
    });

    // angle.1: with a ≠ b, a ≠ c, a and b on L: c on L and a not between
    // b and c iff angle(bac) = 0.
    let angle1_ctx = || {
        vec![
            slit(false, EqPoint, &[0, 1]),
            slit(false, EqPoint, &[0, 2]),
            slit(true, OnLine, &[0, 3]),
            slit(true, OnLine, &[1, 3]),
        ]
    };
    let angle1_vars = || vec![("a", P), ("b", P), ("c", P), ("L", L)];
    out.push(TransferRule {
        id: "angle.1.md.on",
        vars: angle1_vars(),
        diagram_hyps: angle1_ctx(),
        metric_hyps: vec![meq(vec![Angle(1, 0, 2)], vec![])],
        conclusion: SConclusion::Diagram(slit(true, OnLine, &[2, 3])),
        auto: false,
    });
    out.push(TransferRule {
        id: "angle.1.md.ray",
        vars: angle1_vars(),
        diagram_hyps: angle1_ctx(),
        metric_hyps: vec![meq(vec![Angle(1, 0, 2)], vec![])],
        conclusion: SConclusion::Diagram(slit(false, Between, &[1, 0, 2])),
        auto: false,
    });
    let mut a1dm = angle1_ctx();
    a1dm.push(slit(true, OnLine, &[2, 3]));
    a1dm.push(slit(false, Between, &[1, 0, 2]));
    out.push(TransferRule {
        id: "angle.1.dm",
        vars: angle1_vars(),
        diagram_hyps: a1dm,
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(meq(vec![Angle(1, 0, 2)], vec![])),
        auto: false,
    });

    // angle.2: angles at a sum through an interior ray. Context: a on L and
    // M, b on L, c on M, a≠b, a≠c, d off both lines, L≠M.
    let angle2_vars = || vec![("a", P), ("b", P), ("c", P), ("d", P), ("L", L), ("M", L)];
    let angle2_ctx = || {
        vec![
            slit(true, OnLine, &[0, 4]),
            slit(true, OnLine, &[0, 5]),
            slit(true, OnLine, &[1, 4]),
            slit(true, OnLine, &[2, 5]),
            slit(false, EqPoint, &[0, 1]),
            slit(false, EqPoint, &[0, 2]),
            slit(false, OnLine, &[3, 4]),
            slit(false, OnLine, &[3, 5]),
            slit(false, EqLine, &[4, 5]),
        ]
    };
    let angle2_eq = || meq(vec![Angle(1, 0, 2)], vec![Angle(1, 0, 3), Angle(3, 0, 2)]);
    let mut a2dm = angle2_ctx();
    a2dm.push(slit(true, SameSide, &[1, 3, 5]));
    a2dm.push(slit(true, SameSide, &[2, 3, 4]));
    out.push(TransferRule {
        id: "angle.2.dm",
        vars: angle2_vars(),
        diagram_hyps: a2dm,
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(angle2_eq()),
        auto: true,
    });
    out.push(TransferRule {
        id: "angle.2.md.side1",
        vars: angle2_vars(),
        diagram_hyps: angle2_ctx(),
        metric_hyps: vec![angle2_eq()],
        conclusion: SConclusion::Diagram(slit(true, SameSide, &[1, 3, 5])),
        auto: false,
    });
    out.push(TransferRule {
        id: "angle.2.md.side2",
        vars: angle2_vars(),
        diagram_hyps: angle2_ctx(),
        metric_hyps: vec![angle2_eq()],
        conclusion: SConclusion::Diagram(slit(true, SameSide, &[2, 3, 4])),
        auto: false,
    });

    // angle.3: a, b on L, c between a and b, d off L: angle(acd) = angle(dcb)
    // iff angle(acd) is right.
    let angle3_vars = || vec![("a", P), ("b", P), ("c", P), ("d", P), ("L", L)];
    let angle3_ctx = || {
        vec![
            slit(true, OnLine, &[0, 4]),
            slit(true, OnLine, &[1, 4]),
            slit(true, Between, &[0, 2, 1]),
            slit(false, OnLine, &[3, 4]),
        ]
    };
    out.push(TransferRule {
        id: "angle.3.eq_to_right",
        vars: angle3_vars(),
        diagram_hyps: angle3_ctx(),
        metric_hyps: vec![meq(vec![Angle(0, 2, 3)], vec![Angle(3, 2, 1)])],
        conclusion: SConclusion::Metric(meq(vec![Angle(0, 2, 3)], vec![RightAngle])),
        auto: false,
    });
    out.push(TransferRule {
        id: "angle.3.right_to_eq",
        vars: angle3_vars(),
        diagram_hyps: angle3_ctx(),
        metric_hyps: vec![meq(vec![Angle(0, 2, 3)], vec![RightAngle])],
        conclusion: SConclusion::Metric(meq(vec![Angle(0, 2, 3)], vec![Angle(3, 2, 1)])),
        auto: false,
    });

    // angle.4: different descriptions of the same angle are equal.
    out.push(TransferRule {
        id: "angle.4",
        vars: vec![
            ("a", P),
            ("b", P),
            ("b2", P),
            ("c", P),
            ("c2", P),
            ("L", L),
            ("M", L),
        ],
        diagram_hyps: vec![
            slit(true, OnLine, &[0, 5]),
            slit(true, OnLine, &[1, 5]),
            slit(true, OnLine, &[2, 5]),
            slit(true, OnLine, &[0, 6]),
            slit(true, OnLine, &[3, 6]),
            slit(true, OnLine, &[4, 6]),
            slit(false, EqPoint, &[1, 0]),
            slit(false, EqPoint, &[2, 0]),
            slit(false, EqPoint, &[3, 0]),
            slit(false, EqPoint, &[4, 0]),
            slit(false, Between, &[1, 0, 2]),
            slit(false, Between, &[3, 0, 4]),
        ],
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(meq(vec![Angle(1, 0, 3)], vec![Angle(2, 0, 4)])),
        auto: true,
    });

    // angle.5: the parallel postulate. a,b on L; b,c on M; c,d on N; b≠c;
    // a and d on the same side of the transversal M; interior angles less
    // than two right angles. Then L and N intersect — and any point on both
    // lies on the same side of M as a.
    let angle5_vars = || {
        vec![
            ("a", P),
            ("b", P),
            ("c", P),
            ("d", P),
            ("L", L),
            ("M", L),
            ("N", L),
        ]
    };
    let angle5_ctx = || {
        vec![
            slit(true, OnLine, &[0, 4]),
            slit(true, OnLine, &[1, 4]),
            slit(true, OnLine, &[1, 5]),
            slit(true, OnLine, &[2, 5]),
            slit(true, OnLine, &[2, 6]),
            slit(true, OnLine, &[3, 6]),
            slit(false, EqPoint, &[1, 2]),
            slit(true, SameSide, &[0, 3, 5]),
        ]
    };
    let angle5_sum = || SMetricLit {
        pos: true,
        rel: MetricRel::Lt,
        lhs: vec![Angle(0, 1, 2), Angle(1, 2, 3)],
        rhs: vec![RightAngle, RightAngle],
    };
    out.push(TransferRule {
        id: "angle.5.intersect",
        vars: angle5_vars(),
        diagram_hyps: angle5_ctx(),
        metric_hyps: vec![angle5_sum()],
        conclusion: SConclusion::Diagram(slit(true, IntersectsLL, &[4, 6])),
        auto: false,
    });
    let mut a5s_vars = angle5_vars();
    a5s_vars.push(("e", P));
    let mut a5s_ctx = angle5_ctx();
    a5s_ctx.push(slit(true, OnLine, &[7, 4]));
    a5s_ctx.push(slit(true, OnLine, &[7, 6]));
    out.push(TransferRule {
        id: "angle.5.side",
        vars: a5s_vars,
        diagram_hyps: a5s_ctx,
        metric_hyps: vec![angle5_sum()],
        conclusion: SConclusion::Diagram(slit(true, SameSide, &[7, 0, 5])),
        auto: false,
    });

    // area.1: a ≠ b on L: area(abc) = 0 iff c on L.
    let area1_vars = || vec![("a", P), ("b", P), ("c", P), ("L", L)];
    let area1_ctx = || {
        vec![
            slit(true, OnLine, &[0, 3]),
            slit(true, OnLine, &[1, 3]),
            slit(false, EqPoint, &[0, 1]),
        ]
    };
    out.push(TransferRule {
        id: "area.1.md",
        vars: area1_vars(),
        diagram_hyps: area1_ctx(),
        metric_hyps: vec![meq(vec![Area(0, 1, 2)], vec![])],
        conclusion: SConclusion::Diagram(slit(true, OnLine, &[2, 3])),
        auto: false,
    });
    let mut ar1dm = area1_ctx();
    ar1dm.push(slit(true, OnLine, &[2, 3]));
    out.push(TransferRule {
        id: "area.1.dm",
        vars: area1_vars(),
        diagram_hyps: ar1dm,
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(meq(vec![Area(0, 1, 2)], vec![])),
        auto: false,
    });

    // area.2: a, b, c distinct on L, d off L: c between a and b iff
    // area(acd) + area(dcb) = area(adb).
    let area2_vars = || vec![("a", P), ("b", P), ("c", P), ("d", P), ("L", L)];
    let area2_ctx = || {
        vec![
            slit(true, OnLine, &[0, 4]),
            slit(true, OnLine, &[1, 4]),
            slit(true, OnLine, &[2, 4]),
            slit(false, EqPoint, &[0, 1]),
            slit(false, EqPoint, &[0, 2]),
            slit(false, EqPoint, &[1, 2]),
            slit(false, OnLine, &[3, 4]),
        ]
    };
    let area2_eq = || meq(vec![Area(0, 2, 3), Area(3, 2, 1)], vec![Area(0, 3, 1)]);
    let mut ar2dm = area2_ctx();
    ar2dm.push(slit(true, Between, &[0, 2, 1]));
    out.push(TransferRule {
        id: "area.2.dm",
        vars: area2_vars(),
        diagram_hyps: ar2dm,
        metric_hyps: vec![],
        conclusion: SConclusion::Metric(area2_eq()),
        auto: true,
    });
    out.push(TransferRule {
        id: "area.2.md",
        vars: area2_vars(),
        diagram_hyps: area2_ctx(),
        metric_hyps: vec![area2_eq()],
        conclusion: SConclusion::Diagram(slit(true, Between, &[0, 2, 1])),
        auto: false,
    });

    out
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum TransferError {
    #[error("hypothesis not established: {0}")]
    HypothesisNotEstablished(String),
    #[error("rule '{0}' not found")]
    UnknownRule(String),
    #[error("instantiation must cover all {0} rule variables")]
    BadInstantiation(usize),
}

fn instantiate_diagram(l: &SchematicLit, b: &[Obj]) -> DiagramLit {
    let mut args = [Obj::NONE; 3];
    for (i, &slot) in l.var_slots().iter().enumerate() {
        args[i] = b[slot as usize];
    }
    DiagramLit {
        pos: l.pos,
        atom: DiagramAtom::new(l.pred, &args[..l.pred.arity()]),
    }
}

pub fn instantiate_conclusion(rule: &TransferRule, b: &[Obj]) -> Literal {
    match &rule.conclusion {
        SConclusion::Diagram(l) => Literal::Diagram(instantiate_diagram(l, b)),
        SConclusion::Metric(m) => Literal::Metric(m.instantiate(b)),
    }
}

/// Applies one transfer rule under a full instantiation: every diagram
/// hypothesis must be a direct diagram consequence and every metric
/// hypothesis a metric entailment. Returns the instantiated conclusion.
pub fn apply_transfer(
    rule: &TransferRule,
    binding: &[Obj],
    diagram: &mut DiagramState,
    metric: &mut MetricContext,
    table: &crate::lang::ObjTable,
) -> Result<Literal, TransferError> {
    if binding.len() != rule.vars.len() || binding.contains(&Obj::NONE) {
        return Err(TransferError::BadInstantiation(rule.vars.len()));
    }
    for h in &rule.diagram_hyps {
        let lit = instantiate_diagram(h, binding);
        if !diagram.is_direct_consequence(lit) {
            return Err(TransferError::HypothesisNotEstablished(format!(
                "{} (rule {})",
                crate::render::diagram_lit_str(&lit, table),
                rule.id
            )));
        }
    }
    for h in &rule.metric_hyps {
        let lit = h.instantiate(binding);
        if !metric.entails(&lit) {
            return Err(TransferError::HypothesisNotEstablished(format!(
                "{} (rule {})",
                crate::render::metric_lit_str(&lit, table),
                rule.id
            )));
        }
    }
    Ok(instantiate_conclusion(rule, binding))
}

pub fn rule_by_id(id: &str) -> Option<&'static TransferRule> {
    transfer_catalog().iter().find(|r| r.id == id)
}

/// All conclusions of the auto rules instantiable over the current diagram.
/// Auto rules have no metric hypotheses, so this reads only the closure.
pub fn auto_transfer_pass(diagram: &mut DiagramState) -> Vec<MetricLit> {
    diagram.saturate();
    if diagram.inconsistent() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rule in transfer_catalog().iter().filter(|r| r.auto) {
        debug_assert!(rule.metric_hyps.is_empty());
        let bindings = diagram.enumerate_matches(&rule.diagram_hyps, rule.vars.len(), &[]);
        for b in bindings {
            if let SConclusion::Metric(m) = &rule.conclusion {
                out.push(m.instantiate(&b));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Searches for a single transfer rule and instantiation whose conclusion
/// is the goal and whose hypotheses are established. Returns the rule id.
pub fn find_transfer_for(
    goal: &Literal,
    diagram: &mut DiagramState,
    metric: &mut MetricContext,
) -> Option<&'static str> {
    diagram.saturate();
    match goal {
        Literal::Diagram(g) => {
            for rule in transfer_catalog() {
                let SConclusion::Diagram(pat) = &rule.conclusion else {
                    continue;
                };
                if pat.pred != g.atom.pred || pat.pos != g.pos {
                    continue;
                }
                // Bind conclusion slots from the goal (try both orders for
                // the symmetric intersects atoms).
                let mut orders: Vec<Vec<Obj>> = vec![g.atom.args().to_vec()];
                if g.atom.pred.args_sorted_on_construction() {
                    orders.push(vec![g.atom.args[1], g.atom.args[0]]);
                }
                for args in orders {
                    let mut fixed: Vec<(u8, Obj)> = Vec::new();
                    let mut ok = true;
                    for (i, &slot) in pat.var_slots().iter().enumerate() {
                        if let Some((_, prev)) = fixed.iter().find(|(s, _)| *s == slot) {
                            if *prev != args[i] {
                                ok = false;
                                break;
                            }
                        } else {
                            fixed.push((slot, args[i]));
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let bindings =
                        diagram.enumerate_matches(&rule.diagram_hyps, rule.vars.len(), &fixed);
                    for b in bindings {
                        if rule
                            .metric_hyps
                            .iter()
                            .all(|h| metric.entails(&h.instantiate(&b)))
                        {
                            return Some(rule.id);
                        }
                    }
                }
            }
            None
        }
        Literal::Metric(g) => {
            let want = MetricLit {
                pos: g.pos,
                atom: g.atom.normalize(),
            };
            for rule in transfer_catalog() {
                let SConclusion::Metric(_) = &rule.conclusion else {
                    continue;
                };
                let bindings = diagram.enumerate_matches(&rule.diagram_hyps, rule.vars.len(), &[]);
                for b in bindings {
                    if instantiate_conclusion(rule, &b) != Literal::Metric(want.clone()) {
                        continue;
                    }
                    if rule
                        .metric_hyps
                        .iter()
                        .all(|h| metric.entails(&h.instantiate(&b)))
                    {
                        return Some(rule.id);
                    }
                }
            }
            None
        }
        Literal::Falsity => None,
    }
}
