//! Direct diagrammatic consequence: forward-chaining closure of a literal
//! set under all contrapositive variants of the diagram axioms.
//!
//! A clause `{l1, …, ln}` licenses the closure rule: whenever the negations
//! of any n−1 literals of a ground instance are present, the remaining
//! literal is added. Clauses with disjunctive conclusions (between.6,
//! sameside.5) stay multi-positive and fire only through that rule — the
//! disjunction itself is never asserted in one step.
//!
//! Grounding is lazy: clauses are instantiated over objects already in the
//! state, driven by per-predicate indexes, so the engine never materializes
//! the full ground clause set.

use crate::lang::{DiagramAtom, DiagramLit, Obj, ObjTable, Pred, Sort, ALL_PREDS};
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

/// A schematic literal: predicate plus variable slots into the clause's
/// variable list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchematicLit {
    pub pos: bool,
    pub pred: Pred,
    pub vars: [u8; 3],
}

impl SchematicLit {
    pub fn new_for_tests(pos: bool, pred: Pred, vars: &[u8]) -> Self {
        Self::new(pos, pred, vars)
    }

    fn new(pos: bool, pred: Pred, vars: &[u8]) -> Self {
        let mut v = [u8::MAX; 3];
        v[..vars.len()].copy_from_slice(vars);
        SchematicLit { pos, pred, vars: v }
    }

    pub fn var_slots(&self) -> &[u8] {
        &self.vars[..self.pred.arity()]
    }
}

/// A rule clause `{l1, …, ln}` over schematic sorted variables.
#[derive(Debug, Clone)]
pub struct RuleClause {
    pub id: &'static str,
    pub vars: Vec<(&'static str, Sort)>,
    pub lits: Vec<SchematicLit>,
}

struct ClauseBuilder {
    id: &'static str,
    vars: Vec<(&'static str, Sort)>,
    lits: Vec<SchematicLit>,
}

impl ClauseBuilder {
    fn new(id: &'static str, vars: &[(&'static str, Sort)]) -> Self {
        ClauseBuilder {
            id,
            vars: vars.to_vec(),
            lits: Vec::new(),
        }
    }

    fn slot(&self, name: &str) -> u8 {
        self.vars
            .iter()
            .position(|(n, _)| *n == name)
            .unwrap_or_else(|| panic!("unknown clause var {name} in {}", self.id)) as u8
    }

    fn lit(mut self, pos: bool, pred: Pred, args: &[&str]) -> Self {
        let slots: Vec<u8> = args.iter().map(|a| self.slot(a)).collect();
        debug_assert_eq!(slots.len(), pred.arity());
        for (i, s) in slots.iter().enumerate() {
            debug_assert_eq!(self.vars[*s as usize].1, pred.signature()[i]);
        }
        self.lits.push(SchematicLit::new(pos, pred, &slots));
        self
    }

    fn build(self) -> RuleClause {
        RuleClause {
            id: self.id,
            vars: self.vars,
            lits: self.lits,
        }
    }
}

fn pred_tag(p: Pred) -> &'static str {
    match p {
        Pred::OnLine => "on_line",
        Pred::SameSide => "same_side",
        Pred::Between => "between",
        Pred::OnCircle => "on_circle",
        Pred::Inside => "inside",
        Pred::Center => "center",
        Pred::IntersectsLL => "intersects_ll",
        Pred::IntersectsLC => "intersects_lc",
        Pred::IntersectsCC => "intersects_cc",
        Pred::EqPoint => "eq_point",
        Pred::EqLine => "eq_line",
        Pred::EqCircle => "eq_circle",
    }
}

/// The complete diagram axiom catalog as clauses, axioms with conjunctive
/// conclusions or disjunctive hypotheses pre-split.
pub fn rule_catalog() -> &'static [RuleClause] {
    static CATALOG: OnceLock<Vec<RuleClause>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

fn build_catalog() -> Vec<RuleClause> {
    use Pred::*;
    use Sort::*;
    let mut out: Vec<RuleClause> = Vec::new();
    let pp = |n| (n, Point);
    let ll = |n| (n, Line);
    let cc = |n| (n, Circle);

    // Generalities: two points determine a line; centers are unique, inside,
    // and not on the circle.
    out.push(
        ClauseBuilder::new("generalities.1", &[pp("a"), pp("b"), ll("L"), ll("M")])
            .lit(true, EqPoint, &["a", "b"])
            .lit(false, OnLine, &["a", "L"])
            .lit(false, OnLine, &["b", "L"])
            .lit(false, OnLine, &["a", "M"])
            .lit(false, OnLine, &["b", "M"])
            .lit(true, EqLine, &["L", "M"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("generalities.2", &[pp("a"), pp("b"), cc("alpha")])
            .lit(false, Center, &["a", "alpha"])
            .lit(false, Center, &["b", "alpha"])
            .lit(true, EqPoint, &["a", "b"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("generalities.3", &[pp("a"), cc("alpha")])
            .lit(false, Center, &["a", "alpha"])
            .lit(true, Inside, &["a", "alpha"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("generalities.4", &[pp("a"), cc("alpha")])
            .lit(false, Inside, &["a", "alpha"])
            .lit(false, OnCircle, &["a", "alpha"])
            .build(),
    );

    // Between axioms. 1 splits into four clauses; 6 is the trichotomy and
    // stays multi-positive; 7 is redundant classically but not for direct
    // consequence.
    for (suffix, concl) in [
        ("a", SchematicLit::new(true, Between, &[2, 1, 0])),
        ("b", SchematicLit::new(false, EqPoint, &[0, 1])),
        ("c", SchematicLit::new(false, EqPoint, &[0, 2])),
        ("d", SchematicLit::new(false, Between, &[1, 0, 2])),
    ] {
        let id: &'static str = match suffix {
            "a" => "between.1a",
            "b" => "between.1b",
            "c" => "between.1c",
            _ => "between.1d",
        };
        let mut c = ClauseBuilder::new(id, &[pp("a"), pp("b"), pp("c")]).lit(
            false,
            Between,
            &["a", "b", "c"],
        );
        c.lits.push(concl);
        out.push(c.build());
    }
    out.push(
        ClauseBuilder::new("between.2", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, OnLine, &["a", "L"])
            .lit(false, OnLine, &["b", "L"])
            .lit(true, OnLine, &["c", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("between.3", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, OnLine, &["a", "L"])
            .lit(false, OnLine, &["c", "L"])
            .lit(true, OnLine, &["b", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("between.4", &[pp("a"), pp("b"), pp("c"), pp("d")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, Between, &["a", "d", "b"])
            .lit(true, Between, &["a", "d", "c"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("between.5", &[pp("a"), pp("b"), pp("c"), pp("d")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, Between, &["b", "c", "d"])
            .lit(true, Between, &["a", "b", "d"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("between.6", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(true, EqPoint, &["a", "b"])
            .lit(true, EqPoint, &["a", "c"])
            .lit(true, EqPoint, &["b", "c"])
            .lit(false, OnLine, &["a", "L"])
            .lit(false, OnLine, &["b", "L"])
            .lit(false, OnLine, &["c", "L"])
            .lit(true, Between, &["a", "b", "c"])
            .lit(true, Between, &["b", "a", "c"])
            .lit(true, Between, &["a", "c", "b"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("between.7", &[pp("a"), pp("b"), pp("c"), pp("d")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, Between, &["a", "b", "d"])
            .lit(false, Between, &["c", "b", "d"])
            .build(),
    );

    // Same side axioms; 5 is the side trichotomy and stays multi-positive.
    out.push(
        ClauseBuilder::new("sameside.1", &[pp("a"), ll("L")])
            .lit(true, OnLine, &["a", "L"])
            .lit(true, SameSide, &["a", "a", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("sameside.2", &[pp("a"), pp("b"), ll("L")])
            .lit(false, SameSide, &["a", "b", "L"])
            .lit(true, SameSide, &["b", "a", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("sameside.3", &[pp("a"), pp("b"), ll("L")])
            .lit(false, SameSide, &["a", "b", "L"])
            .lit(false, OnLine, &["a", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("sameside.4", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(false, SameSide, &["a", "b", "L"])
            .lit(false, SameSide, &["a", "c", "L"])
            .lit(true, SameSide, &["b", "c", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("sameside.5", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(true, OnLine, &["a", "L"])
            .lit(true, OnLine, &["b", "L"])
            .lit(true, OnLine, &["c", "L"])
            .lit(true, SameSide, &["a", "b", "L"])
            .lit(true, SameSide, &["a", "c", "L"])
            .lit(true, SameSide, &["b", "c", "L"])
            .build(),
    );

    // Pasch axioms.
    out.push(
        ClauseBuilder::new("pasch.1", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, SameSide, &["a", "c", "L"])
            .lit(true, SameSide, &["a", "b", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("pasch.2", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, OnLine, &["a", "L"])
            .lit(true, OnLine, &["b", "L"])
            .lit(true, SameSide, &["b", "c", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("pasch.3", &[pp("a"), pp("b"), pp("c"), ll("L")])
            .lit(false, Between, &["a", "b", "c"])
            .lit(false, OnLine, &["b", "L"])
            .lit(false, SameSide, &["a", "c", "L"])
            .build(),
    );
    out.push(
        ClauseBuilder::new("pasch.4", &[pp("a"), pp("b"), pp("c"), ll("L"), ll("M")])
            .lit(true, EqLine, &["L", "M"])
            .lit(false, OnLine, &["b", "L"])
            .lit(false, OnLine, &["b", "M"])
            .lit(false, OnLine, &["a", "M"])
            .lit(false, OnLine, &["c", "M"])
            .lit(true, EqPoint, &["a", "c"])
            .lit(true, EqPoint, &["a", "b"])
            .lit(true, EqPoint, &["c", "b"])
            .lit(true, SameSide, &["a", "c", "L"])
            .lit(true, Between, &["a", "b", "c"])
            .build(),
    );

    // Triple incidence: three lines through one point divide the plane.
    let tri_vars = [
        pp("a"),
        pp("b"),
        pp("c"),
        pp("d"),
        ll("L"),
        ll("M"),
        ll("N"),
    ];
    let tri_base = |id| {
        ClauseBuilder::new(id, &tri_vars)
            .lit(false, OnLine, &["a", "L"])
            .lit(false, OnLine, &["a", "M"])
            .lit(false, OnLine, &["a", "N"])
            .lit(false, OnLine, &["b", "L"])
            .lit(false, OnLine, &["c", "M"])
            .lit(false, OnLine, &["d", "N"])
    };
    out.push(
        tri_base("triple.1")
            .lit(false, SameSide, &["c", "d", "L"])
            .lit(false, SameSide, &["b", "c", "N"])
            .lit(false, SameSide, &["b", "d", "M"])
            .build(),
    );
    out.push(
        tri_base("triple.2")
            .lit(false, SameSide, &["c", "d", "L"])
            .lit(true, SameSide, &["b", "d", "M"])
            .lit(true, OnLine, &["d", "M"])
            .lit(true, EqPoint, &["b", "a"])
            .lit(true, SameSide, &["b", "c", "N"])
            .build(),
    );
    out.push(
        ClauseBuilder::new(
            "triple.3",
            &[
                pp("a"),
                pp("b"),
                pp("c"),
                pp("d"),
                pp("e"),
                ll("L"),
                ll("M"),
                ll("N"),
            ],
        )
        .lit(false, OnLine, &["a", "L"])
        .lit(false, OnLine, &["a", "M"])
        .lit(false, OnLine, &["a", "N"])
        .lit(false, OnLine, &["b", "L"])
        .lit(false, OnLine, &["c", "M"])
        .lit(false, OnLine, &["d", "N"])
        .lit(false, SameSide, &["c", "d", "L"])
        .lit(false, SameSide, &["b", "c", "N"])
        .lit(false, SameSide, &["d", "e", "M"])
        .lit(false, SameSide, &["c", "e", "N"])
        .lit(true, SameSide, &["c", "e", "L"])
        .build(),
    );

    // Circle axioms; "on or inside" hypotheses split.
    out.push(
        ClauseBuilder::new(
            "circle.1",
            &[pp("a"), pp("b"), pp("c"), ll("L"), cc("alpha")],
        )
        .lit(false, OnLine, &["a", "L"])
        .lit(false, OnLine, &["b", "L"])
        .lit(false, OnLine, &["c", "L"])
        .lit(false, Inside, &["a", "alpha"])
        .lit(false, OnCircle, &["b", "alpha"])
        .lit(false, OnCircle, &["c", "alpha"])
        .lit(true, EqPoint, &["b", "c"])
        .lit(true, Between, &["b", "a", "c"])
        .build(),
    );
    let in_or_on = [Inside, OnCircle];
    for (i, &x) in in_or_on.iter().enumerate() {
        for (j, &y) in in_or_on.iter().enumerate() {
            let id: &'static str = match (i, j) {
                (0, 0) => "circle.2a",
                (0, 1) => "circle.2b",
                (1, 0) => "circle.2c",
                _ => "circle.2d",
            };
            out.push(
                ClauseBuilder::new(id, &[pp("a"), pp("b"), pp("c"), cc("alpha")])
                    .lit(false, x, &["a", "alpha"])
                    .lit(false, y, &["b", "alpha"])
                    .lit(false, Between, &["a", "c", "b"])
                    .lit(true, Inside, &["c", "alpha"])
                    .build(),
            );
        }
    }
    for (i, &x) in in_or_on.iter().enumerate() {
        for (j, &concl) in in_or_on.iter().enumerate() {
            let id: &'static str = match (i, j) {
                (0, 0) => "circle.3a",
                (0, 1) => "circle.3b",
                (1, 0) => "circle.3c",
                _ => "circle.3d",
            };
            out.push(
                ClauseBuilder::new(id, &[pp("a"), pp("b"), pp("c"), cc("alpha")])
                    .lit(false, x, &["a", "alpha"])
                    .lit(true, Inside, &["c", "alpha"])
                    .lit(false, Between, &["a", "c", "b"])
                    .lit(false, concl, &["b", "alpha"])
                    .build(),
            );
        }
    }
    out.push(
        ClauseBuilder::new(
            "circle.4",
            &[
                pp("a"),
                pp("b"),
                pp("c"),
                pp("d"),
                ll("L"),
                cc("alpha"),
                cc("beta"),
            ],
        )
        .lit(true, EqCircle, &["alpha", "beta"])
        .lit(false, OnCircle, &["c", "alpha"])
        .lit(false, OnCircle, &["c", "beta"])
        .lit(false, OnCircle, &["d", "alpha"])
        .lit(false, OnCircle, &["d", "beta"])
        .lit(true, EqPoint, &["c", "d"])
        .lit(false, Center, &["a", "alpha"])
        .lit(false, Center, &["b", "beta"])
        .lit(false, OnLine, &["a", "L"])
        .lit(false, OnLine, &["b", "L"])
        .lit(false, SameSide, &["c", "d", "L"])
        .build(),
    );

    // Intersection rules (continuity principles).
    out.push(
        ClauseBuilder::new("intersection.1", &[pp("a"), pp("b"), ll("L"), ll("M")])
            .lit(true, OnLine, &["a", "L"])
            .lit(true, OnLine, &["b", "L"])
            .lit(true, SameSide, &["a", "b", "L"])
            .lit(false, OnLine, &["a", "M"])
            .lit(false, OnLine, &["b", "M"])
            .lit(true, IntersectsLL, &["L", "M"])
            .build(),
    );
    for (i, &x) in in_or_on.iter().enumerate() {
        for (j, &y) in in_or_on.iter().enumerate() {
            let id: &'static str = match (i, j) {
                (0, 0) => "intersection.2a",
                (0, 1) => "intersection.2b",
                (1, 0) => "intersection.2c",
                _ => "intersection.2d",
            };
            out.push(
                ClauseBuilder::new(id, &[pp("a"), pp("b"), ll("L"), cc("alpha")])
                    .lit(false, x, &["a", "alpha"])
                    .lit(false, y, &["b", "alpha"])
                    .lit(true, OnLine, &["a", "L"])
                    .lit(true, OnLine, &["b", "L"])
                    .lit(true, SameSide, &["a", "b", "L"])
                    .lit(true, IntersectsLC, &["L", "alpha"])
                    .build(),
            );
        }
    }
    out.push(
        ClauseBuilder::new("intersection.3", &[pp("a"), ll("L"), cc("alpha")])
            .lit(false, Inside, &["a", "alpha"])
            .lit(false, OnLine, &["a", "L"])
            .lit(true, IntersectsLC, &["L", "alpha"])
            .build(),
    );
    // The straddling points must lie on the circle itself: a bounded curve
    // that merely separates two interior points of the other disk need not
    // meet it.
    out.push(
        ClauseBuilder::new(
            "intersection.4",
            &[pp("a"), pp("b"), cc("alpha"), cc("beta")],
        )
        .lit(false, OnCircle, &["a", "alpha"])
        .lit(false, OnCircle, &["b", "alpha"])
        .lit(false, Inside, &["a", "beta"])
        .lit(true, Inside, &["b", "beta"])
        .lit(true, OnCircle, &["b", "beta"])
        .lit(true, IntersectsCC, &["alpha", "beta"])
        .build(),
    );
    out.push(
        ClauseBuilder::new(
            "intersection.5",
            &[pp("a"), pp("b"), cc("alpha"), cc("beta")],
        )
        .lit(false, OnCircle, &["a", "alpha"])
        .lit(false, Inside, &["b", "alpha"])
        .lit(false, Inside, &["a", "beta"])
        .lit(false, OnCircle, &["b", "beta"])
        .lit(true, IntersectsCC, &["alpha", "beta"])
        .build(),
    );

    // Equality axiom 2 (substitution), one clause per predicate position.
    // Reflexivity (axiom 1) is seeded as facts at object registration.
    for pred in ALL_PREDS {
        let sig = pred.signature();
        for pos in 0..sig.len() {
            let sort = sig[pos];
            let eq = match sort {
                Sort::Point => EqPoint,
                Sort::Line => EqLine,
                Sort::Circle => EqCircle,
            };
            let id: &'static str =
                Box::leak(format!("equality.subst.{}.{}", pred_tag(pred), pos).into_boxed_str());
            // vars: x, y (the equated pair) then the remaining positions.
            let mut vars: Vec<(&'static str, Sort)> = vec![("x", sort), ("y", sort)];
            let mut before: Vec<u8> = Vec::new();
            let names: [&'static str; 3] = ["u", "v", "w"];
            for (i, &s) in sig.iter().enumerate() {
                if i == pos {
                    before.push(0);
                } else {
                    vars.push((names[i], s));
                    before.push(vars.len() as u8 - 1);
                }
            }
            let mut after = before.clone();
            after[pos] = 1;
            let mut c = ClauseBuilder::new(id, &vars);
            c.lits.push(SchematicLit::new(false, eq, &[0, 1]));
            c.lits.push(SchematicLit::new(false, pred, &before));
            c.lits.push(SchematicLit::new(true, pred, &after));
            out.push(c.build());
        }
    }

    out
}

/// Clauses compiled to directed rules plus trigger tables.
#[derive(Debug)]
pub struct CompiledRules {
    pub clauses: Vec<RuleClause>,
    rules: Vec<DirectedRule>,
    /// (pred, sign) -> list of (rule index, hypothesis position)
    triggers: HashMap<(Pred, bool), Vec<(u32, u8)>>,
}

#[derive(Debug, Clone)]
struct DirectedRule {
    clause: u32,
    /// Hypotheses: negations of all clause literals but the conclusion.
    hyps: Vec<SchematicLit>,
    concl: SchematicLit,
}

impl CompiledRules {
    pub fn compile(clauses: Vec<RuleClause>) -> Arc<CompiledRules> {
        let mut rules = Vec::new();
        let mut triggers: HashMap<(Pred, bool), Vec<(u32, u8)>> = HashMap::new();
        for (ci, clause) in clauses.iter().enumerate() {
            for (li, lit) in clause.lits.iter().enumerate() {
                let hyps: Vec<SchematicLit> = clause
                    .lits
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != li)
                    .map(|(_, l)| SchematicLit { pos: !l.pos, ..*l })
                    .collect();
                let ri = rules.len() as u32;
                for (hi, h) in hyps.iter().enumerate() {
                    triggers
                        .entry((h.pred, h.pos))
                        .or_default()
                        .push((ri, hi as u8));
                }
                rules.push(DirectedRule {
                    clause: ci as u32,
                    hyps,
                    concl: *lit,
                });
            }
        }
        Arc::new(CompiledRules {
            clauses,
            rules,
            triggers,
        })
    }

    pub fn standard() -> Arc<CompiledRules> {
        static STD: OnceLock<Arc<CompiledRules>> = OnceLock::new();
        STD.get_or_init(|| CompiledRules::compile(rule_catalog().to_vec()))
            .clone()
    }
}

/// One step of a derivation trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: &'static str,
    /// Instantiation of the rule's schematic variables, in variable order.
    pub binding: Vec<(&'static str, Obj)>,
    pub premises: Vec<DiagramLit>,
    pub produced: DiagramLit,
}

/// The set of diagrammatic literals established so far, closed on demand.
#[derive(Clone)]
pub struct DiagramState {
    rules: Arc<CompiledRules>,
    sorts: Vec<Sort>,
    /// Union-find parent per object; only ever links same-sort objects.
    parent: Vec<u32>,
    facts: Vec<DiagramLit>,
    fact_set: HashSet<DiagramLit>,
    by_pred: HashMap<(Pred, bool), Vec<u32>>,
    by_arg: HashMap<(Pred, bool, u8, Obj), Vec<u32>>,
    queue: VecDeque<u32>,
    trace: HashMap<DiagramLit, TraceStep>,
    inconsistent: bool,
    /// Per-depth candidate buffers for the join, reused across calls.
    scratch: Vec<Vec<u32>>,
}

impl Default for DiagramState {
    fn default() -> Self {
        Self::new()
    }
}

impl DiagramState {
    pub fn new() -> Self {
        Self::with_rules(CompiledRules::standard())
    }

    pub fn with_rules(rules: Arc<CompiledRules>) -> Self {
        DiagramState {
            rules,
            sorts: Vec::new(),
            parent: Vec::new(),
            facts: Vec::new(),
            fact_set: HashSet::new(),
            by_pred: HashMap::new(),
            by_arg: HashMap::new(),
            queue: VecDeque::new(),
            trace: HashMap::new(),
            inconsistent: false,
            scratch: Vec::new(),
        }
    }

    /// Registers the next object (ids must mirror the engine's `ObjTable`)
    /// and seeds its reflexivity fact.
    pub fn register_object(&mut self, sort: Sort) -> Obj {
        let o = Obj(self.sorts.len() as u32);
        self.sorts.push(sort);
        self.parent.push(o.0);
        let eq = match sort {
            Sort::Point => Pred::EqPoint,
            Sort::Line => Pred::EqLine,
            Sort::Circle => Pred::EqCircle,
        };
        self.insert_fact(
            DiagramLit::pos(DiagramAtom::new(eq, &[o, o])),
            Some(TraceStep {
                rule: "equality.1",
                binding: vec![],
                premises: vec![],
                produced: DiagramLit::pos(DiagramAtom::new(eq, &[o, o])),
            }),
        );
        o
    }

    pub fn sync_objects(&mut self, table: &ObjTable) {
        while self.sorts.len() < table.len() {
            let o = Obj(self.sorts.len() as u32);
            self.register_object(table.sort(o));
        }
    }

    pub fn object_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sort_of(&self, o: Obj) -> Sort {
        self.sorts[o.0 as usize]
    }

    pub fn inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Records an externally detected contradiction (for example a ⊥ merged
    /// in from a case split whose branches both closed).
    pub fn mark_inconsistent(&mut self) {
        self.inconsistent = true;
    }

    /// Equivalence-class representative under the equalities derived so far.
    pub fn rep(&self, o: Obj) -> Obj {
        let mut x = o.0;
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        Obj(x)
    }

    fn rep_lit(&self, l: DiagramLit) -> DiagramLit {
        let mut args = [Obj::NONE; 3];
        for (i, &a) in l.atom.args().iter().enumerate() {
            args[i] = self.rep(a);
        }
        DiagramLit {
            pos: l.pos,
            atom: DiagramAtom::new(l.atom.pred, &args[..l.atom.pred.arity()]),
        }
    }

    /// Adds a literal as given (callers have already sort-checked).
    pub fn add(&mut self, lit: DiagramLit) {
        self.insert_fact(lit, None);
    }

    fn insert_fact(&mut self, lit: DiagramLit, how: Option<TraceStep>) -> bool {
        if self.inconsistent || self.fact_set.contains(&lit) {
            return false;
        }
        // eq(x, x) is already true; its negation is a contradiction.
        if matches!(lit.atom.pred, Pred::EqPoint | Pred::EqLine | Pred::EqCircle) {
            let a = self.rep(lit.atom.args[0]);
            let b = self.rep(lit.atom.args[1]);
            if a == b && !lit.pos {
                self.inconsistent = true;
            }
        }
        if self.fact_set.contains(&lit.negated()) {
            self.inconsistent = true;
        }
        let idx = self.facts.len() as u32;
        self.facts.push(lit);
        self.fact_set.insert(lit);
        if let Some(step) = how {
            self.trace.entry(lit).or_insert(step);
        }
        self.by_pred
            .entry((lit.atom.pred, lit.pos))
            .or_default()
            .push(idx);
        for (i, &a) in lit.atom.args().iter().enumerate() {
            self.by_arg
                .entry((lit.atom.pred, lit.pos, i as u8, a))
                .or_default()
                .push(idx);
        }
        self.queue.push_back(idx);

        if lit.pos && matches!(lit.atom.pred, Pred::EqPoint | Pred::EqLine | Pred::EqCircle) {
            let a = lit.atom.args[0];
            let b = lit.atom.args[1];
            if self.rep(a) != self.rep(b) {
                self.merge(a, b, lit);
            }
        }
        true
    }

    /// Union two classes and renormalize every fact touching them. The
    /// canonical representative is the least object id.
    fn merge(&mut self, a: Obj, b: Obj, by: DiagramLit) {
        let ra = self.rep(a);
        let rb = self.rep(b);
        if ra == rb {
            return;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop.0 as usize] = keep.0;
        let snapshot: Vec<DiagramLit> = self.facts.clone();
        for f in snapshot {
            let g = self.rep_lit(f);
            if g != f {
                self.insert_fact(
                    g,
                    Some(TraceStep {
                        rule: "equality.subst",
                        binding: vec![f.atom.args[0], by.atom.args[0]]
                            .into_iter()
                            .map(|o| ("x", o))
                            .collect(),
                        premises: vec![f, by],
                        produced: g,
                    }),
                );
            }
            if self.inconsistent {
                return;
            }
        }
    }

    /// Runs forward chaining to the least fixpoint. Monotone, extensive,
    /// idempotent; resumable after further `add` calls.
    pub fn saturate(&mut self) {
        let rules = self.rules.clone();
        while let Some(fi) = self.queue.pop_front() {
            if self.inconsistent {
                self.queue.clear();
                return;
            }
            let fact = self.facts[fi as usize];
            if let Some(trigs) = rules.triggers.get(&(fact.atom.pred, fact.pos)) {
                for &(ri, hi) in trigs {
                    self.fire(&rules, ri, hi, fact);
                    if self.inconsistent {
                        self.queue.clear();
                        return;
                    }
                }
            }
        }
    }

    fn fire(&mut self, rules: &CompiledRules, ri: u32, seed_hyp: u8, seed: DiagramLit) {
        let rule = &rules.rules[ri as usize];
        let clause = &rules.clauses[rule.clause as usize];
        let nvars = clause.vars.len();
        let mut binding: Vec<Obj> = vec![Obj::NONE; nvars];
        let hyp = rule.hyps[seed_hyp as usize];
        let used: u16 = 1 << seed_hyp;
        let mut orientations: [Option<DiagramLit>; 2] = [Some(seed), None];
        if hyp.pred.args_sorted_on_construction() {
            let swapped = DiagramLit {
                pos: seed.pos,
                atom: DiagramAtom {
                    pred: seed.atom.pred,
                    args: [seed.atom.args[1], seed.atom.args[0], seed.atom.args[2]],
                },
            };
            if swapped != seed {
                orientations[1] = Some(swapped);
            }
        }
        let mut premises = vec![seed];
        for f in orientations.into_iter().flatten() {
            let mut undo = [u8::MAX; 3];
            if unify_in_place(&hyp, f, &mut binding, &mut undo) {
                self.join(rules, ri, used, 0, &mut binding, &mut premises);
                undo_binding(&mut binding, &undo);
                if self.inconsistent {
                    return;
                }
            }
        }
    }

    /// Backtracking join over the remaining hypotheses (bitmask `used`);
    /// picks the most constrained hypothesis next. Candidate lists are
    /// copied into a per-depth scratch buffer; bindings undo in place.
    fn join(
        &mut self,
        rules: &CompiledRules,
        ri: u32,
        used: u16,
        depth: usize,
        binding: &mut Vec<Obj>,
        premises: &mut Vec<DiagramLit>,
    ) {
        if self.inconsistent {
            return;
        }
        let rule = &rules.rules[ri as usize];
        let n_hyps = rule.hyps.len();
        if used.count_ones() as usize == n_hyps {
            let clause = &rules.clauses[rule.clause as usize];
            // All hypothesis variables are bound; conclusion variables are a
            // subset (clauses never introduce conclusion-only variables).
            let concl = rule.concl;
            let mut args = [Obj::NONE; 3];
            for (i, &slot) in concl.var_slots().iter().enumerate() {
                let v = binding[slot as usize];
                if v == Obj::NONE {
                    return;
                }
                args[i] = v;
            }
            let lit = DiagramLit {
                pos: concl.pos,
                atom: DiagramAtom::new(concl.pred, &args[..concl.pred.arity()]),
            };
            if !self.fact_set.contains(&lit) {
                let step = TraceStep {
                    rule: clause.id,
                    binding: clause
                        .vars
                        .iter()
                        .zip(binding.iter())
                        .map(|((n, _), o)| (*n, *o))
                        .collect(),
                    premises: premises.clone(),
                    produced: lit,
                };
                self.insert_fact(lit, Some(step));
            }
            return;
        }
        // Choose the unused hypothesis with the fewest candidates: a fully
        // bound one is a constant-time membership test, otherwise the
        // smallest index list wins (minimum remaining values).
        let mut best: u8 = u8::MAX;
        let mut best_cost = u64::MAX;
        for h in 0..n_hyps as u8 {
            if used & (1 << h) != 0 {
                continue;
            }
            let hyp = &rule.hyps[h as usize];
            let mut bound_any = false;
            let mut fully = true;
            let mut cost = u64::MAX;
            for (i, &slot) in hyp.var_slots().iter().enumerate() {
                let v = binding[slot as usize];
                if v == Obj::NONE {
                    fully = false;
                    continue;
                }
                bound_any = true;
                let len = self
                    .by_arg
                    .get(&(hyp.pred, hyp.pos, i as u8, v))
                    .map(|l| l.len() as u64)
                    .unwrap_or(0);
                cost = cost.min(len);
            }
            let cost = if fully {
                0
            } else if bound_any {
                cost
            } else {
                self.by_pred
                    .get(&(hyp.pred, hyp.pos))
                    .map(|l| l.len() as u64)
                    .unwrap_or(0)
            };
            if cost < best_cost {
                best_cost = cost;
                best = h;
                if cost == 0 {
                    break;
                }
            }
        }
        let h = best;
        let hyp = rule.hyps[h as usize];
        // A fully bound hypothesis is a plain membership test.
        if hyp
            .var_slots()
            .iter()
            .all(|&s| binding[s as usize] != Obj::NONE)
        {
            let mut args = [Obj::NONE; 3];
            for (i, &slot) in hyp.var_slots().iter().enumerate() {
                args[i] = binding[slot as usize];
            }
            let lit = DiagramLit {
                pos: hyp.pos,
                atom: DiagramAtom::new(hyp.pred, &args[..hyp.pred.arity()]),
            };
            if self.fact_set.contains(&lit) {
                premises.push(lit);
                self.join(rules, ri, used | (1 << h), depth, binding, premises);
                premises.pop();
            }
            return;
        }
        let n = self.fill_candidates(&hyp, binding, depth);
        for ci in 0..n {
            let fi = self.scratch[depth][ci];
            let fact = self.facts[fi as usize];
            let mut orientations: [Option<DiagramLit>; 2] = [Some(fact), None];
            if hyp.pred.args_sorted_on_construction() {
                let swapped = DiagramLit {
                    pos: fact.pos,
                    atom: DiagramAtom {
                        pred: fact.atom.pred,
                        args: [fact.atom.args[1], fact.atom.args[0], fact.atom.args[2]],
                    },
                };
                if swapped != fact {
                    orientations[1] = Some(swapped);
                }
            }
            for f in orientations.into_iter().flatten() {
                let mut undo = [u8::MAX; 3];
                if unify_in_place(&hyp, f, binding, &mut undo) {
                    premises.push(fact);
                    self.join(rules, ri, used | (1 << h), depth + 1, binding, premises);
                    premises.pop();
                    undo_binding(binding, &undo);
                    if self.inconsistent {
                        return;
                    }
                }
            }
        }
    }

    /// Copies the smallest applicable index list into the scratch buffer
    /// for `depth`; returns the number of candidates.
    fn fill_candidates(&mut self, hyp: &SchematicLit, binding: &[Obj], depth: usize) -> usize {
        while self.scratch.len() <= depth {
            self.scratch.push(Vec::new());
        }
        let mut best: Option<&Vec<u32>> = None;
        for (i, &slot) in hyp.var_slots().iter().enumerate() {
            let v = binding[slot as usize];
            if v != Obj::NONE {
                if let Some(list) = self.by_arg.get(&(hyp.pred, hyp.pos, i as u8, v)) {
                    if best.is_none_or(|b| list.len() < b.len()) {
                        best = Some(list);
                    }
                } else if !hyp.pred.args_sorted_on_construction() {
                    // A bound argument with no index entry: no match at all.
                    self.scratch[depth].clear();
                    return 0;
                }
            }
        }
        let mut buf = std::mem::take(&mut self.scratch[depth]);
        buf.clear();
        let src: &[u32] = match best {
            Some(list) => list,
            None => self
                .by_pred
                .get(&(hyp.pred, hyp.pos))
                .map(|v| v.as_slice())
                .unwrap_or(&[]),
        };
        buf.extend_from_slice(src);
        let n = buf.len();
        self.scratch[depth] = buf;
        n
    }

    /// True iff the literal is in the closure (or the state is inconsistent,
    /// in which case everything is a consequence).
    pub fn is_direct_consequence(&mut self, goal: DiagramLit) -> bool {
        self.saturate();
        if self.inconsistent {
            return true;
        }
        if self.fact_set.contains(&goal) || self.fact_set.contains(&self.rep_lit(goal)) {
            return true;
        }
        if goal.pos
            && matches!(
                goal.atom.pred,
                Pred::EqPoint | Pred::EqLine | Pred::EqCircle
            )
            && self.rep(goal.atom.args[0]) == self.rep(goal.atom.args[1])
        {
            return true;
        }
        false
    }

    /// Derivation trace for a closure member: an ordered list of steps
    /// ending at the goal. Facts given as inputs have empty traces.
    pub fn explain(&mut self, goal: DiagramLit) -> Option<Vec<TraceStep>> {
        self.saturate();
        let goal = if self.fact_set.contains(&goal) {
            goal
        } else {
            let g = self.rep_lit(goal);
            if !self.fact_set.contains(&g) {
                return None;
            }
            g
        };
        let mut out = Vec::new();
        let mut seen: HashSet<DiagramLit> = HashSet::new();
        self.collect_trace(goal, &mut seen, &mut out);
        Some(out)
    }

    fn collect_trace(
        &self,
        lit: DiagramLit,
        seen: &mut HashSet<DiagramLit>,
        out: &mut Vec<TraceStep>,
    ) {
        if !seen.insert(lit) {
            return;
        }
        if let Some(step) = self.trace.get(&lit) {
            for p in &step.premises {
                self.collect_trace(*p, seen, out);
            }
            out.push(step.clone());
        }
    }

    pub fn facts(&self) -> impl Iterator<Item = &DiagramLit> {
        self.facts.iter()
    }

    pub fn contains(&self, lit: &DiagramLit) -> bool {
        self.fact_set.contains(lit)
    }

    /// Enumerates all bindings of `nvars` schematic variables (extending
    /// `fixed`) such that every schematic literal is a present fact.
    /// Deterministic: candidates are visited in fact insertion order.
    pub fn enumerate_matches(
        &self,
        hyps: &[SchematicLit],
        nvars: usize,
        fixed: &[(u8, Obj)],
    ) -> Vec<Vec<Obj>> {
        let mut binding = vec![Obj::NONE; nvars];
        for &(slot, o) in fixed {
            binding[slot as usize] = o;
        }
        let mut out = Vec::new();
        let order: Vec<u8> = (0..hyps.len() as u8).collect();
        self.enum_rec(hyps, &order, &mut binding, &mut out);
        out
    }

    fn enum_rec(
        &self,
        hyps: &[SchematicLit],
        remaining: &[u8],
        binding: &mut Vec<Obj>,
        out: &mut Vec<Vec<Obj>>,
    ) {
        if remaining.is_empty() {
            if binding.iter().all(|&o| o != Obj::NONE) {
                out.push(binding.clone());
            }
            return;
        }
        // Fewest candidates first.
        let mut best = 0usize;
        let mut best_cost = u64::MAX;
        for (i, &h) in remaining.iter().enumerate() {
            let hyp = &hyps[h as usize];
            let mut bound_any = false;
            let mut fully = true;
            let mut cost = u64::MAX;
            for (j, &slot) in hyp.var_slots().iter().enumerate() {
                let v = binding[slot as usize];
                if v == Obj::NONE {
                    fully = false;
                    continue;
                }
                bound_any = true;
                let len = self
                    .by_arg
                    .get(&(hyp.pred, hyp.pos, j as u8, v))
                    .map(|l| l.len() as u64)
                    .unwrap_or(0);
                cost = cost.min(len);
            }
            let cost = if fully {
                0
            } else if bound_any {
                cost
            } else {
                self.by_pred
                    .get(&(hyp.pred, hyp.pos))
                    .map(|l| l.len() as u64)
                    .unwrap_or(0)
            };
            if cost < best_cost {
                best_cost = cost;
                best = i;
                if cost == 0 {
                    break;
                }
            }
        }
        let h = remaining[best];
        let rest: Vec<u8> = remaining.iter().copied().filter(|&x| x != h).collect();
        let hyp = hyps[h as usize];
        for fi in self.candidate_list(&hyp, binding) {
            let fact = self.facts[fi as usize];
            let mut orientations = vec![fact];
            if hyp.pred.args_sorted_on_construction() {
                orientations.push(DiagramLit {
                    pos: fact.pos,
                    atom: DiagramAtom {
                        pred: fact.atom.pred,
                        args: [fact.atom.args[1], fact.atom.args[0], fact.atom.args[2]],
                    },
                });
            }
            for f in orientations {
                let mut undo = [u8::MAX; 3];
                if unify_in_place(&hyp, f, binding, &mut undo) {
                    self.enum_rec(hyps, &rest, binding, out);
                    undo_binding(binding, &undo);
                }
            }
        }
    }

    fn candidate_list(&self, hyp: &SchematicLit, binding: &[Obj]) -> Vec<u32> {
        let mut best: Option<&Vec<u32>> = None;
        for (i, &slot) in hyp.var_slots().iter().enumerate() {
            let v = binding[slot as usize];
            if v != Obj::NONE {
                if let Some(list) = self.by_arg.get(&(hyp.pred, hyp.pos, i as u8, v)) {
                    if best.is_none_or(|b| list.len() < b.len()) {
                        best = Some(list);
                    }
                } else if !hyp.pred.args_sorted_on_construction() {
                    return Vec::new();
                }
            }
        }
        match best {
            Some(list) => list.clone(),
            None => self
                .by_pred
                .get(&(hyp.pred, hyp.pos))
                .cloned()
                .unwrap_or_default(),
        }
    }

    /// Point equalities and disequalities currently established, for the
    /// metric side.
    #[allow(clippy::type_complexity)]
    pub fn point_facts(&self) -> (Vec<(Obj, Obj)>, Vec<(Obj, Obj)>) {
        let mut eqs = Vec::new();
        let mut diseqs = Vec::new();
        for f in &self.facts {
            if f.atom.pred == Pred::EqPoint {
                let (a, b) = (f.atom.args[0], f.atom.args[1]);
                if a != b {
                    if f.pos {
                        eqs.push((a, b));
                    } else {
                        diseqs.push((a, b));
                    }
                }
            }
        }
        (eqs, diseqs)
    }
}

/// Unifies in place, recording newly bound slots in `undo` (≤ 3). On
/// failure the binding is restored before returning.
fn unify_in_place(
    hyp: &SchematicLit,
    fact: DiagramLit,
    binding: &mut [Obj],
    undo: &mut [u8; 3],
) -> bool {
    if hyp.pred != fact.atom.pred || hyp.pos != fact.pos {
        return false;
    }
    let mut n_undo = 0usize;
    for (i, &slot) in hyp.var_slots().iter().enumerate() {
        let v = fact.atom.args[i];
        let cur = binding[slot as usize];
        if cur == Obj::NONE {
            binding[slot as usize] = v;
            undo[n_undo] = slot;
            n_undo += 1;
        } else if cur != v {
            for &u in undo[..n_undo].iter() {
                binding[u as usize] = Obj::NONE;
            }
            for u in undo.iter_mut() {
                *u = u8::MAX;
            }
            return false;
        }
    }
    true
}

fn undo_binding(binding: &mut [Obj], undo: &[u8; 3]) {
    for &u in undo {
        if u != u8::MAX {
            binding[u as usize] = Obj::NONE;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{DiagramAtom as DA, Pred::*, Sort::*};

    struct Ctx {
        st: DiagramState,
    }

    impl Ctx {
        fn new(points: u32, lines: u32, circles: u32) -> Self {
            let mut st = DiagramState::new();
            for _ in 0..points {
                st.register_object(Point);
            }
            for _ in 0..lines {
                st.register_object(Line);
            }
            for _ in 0..circles {
                st.register_object(Circle);
            }
            Ctx { st }
        }
        fn add(&mut self, pos: bool, pred: Pred, args: &[u32]) {
            let objs: Vec<Obj> = args.iter().map(|&i| Obj(i)).collect();
            self.st.add(DiagramLit {
                pos,
                atom: DA::new(pred, &objs),
            });
        }
        fn holds(&mut self, pos: bool, pred: Pred, args: &[u32]) -> bool {
            let objs: Vec<Obj> = args.iter().map(|&i| Obj(i)).collect();
            self.st.is_direct_consequence(DiagramLit {
                pos,
                atom: DA::new(pred, &objs),
            })
        }
    }

    #[test]
    fn catalog_size_is_frozen() {
        // 44 geometric clauses plus 26 equality substitution clauses.
        assert_eq!(rule_catalog().len(), 70);
        let mut ids: Vec<&str> = rule_catalog().iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 70, "rule ids must be unique");
    }

    #[test]
    fn between_axiom_one_consequences() {
        // {between(a,b,c)} yields between(c,b,a), a≠b, a≠c, ¬between(b,a,c).
        let mut c = Ctx::new(3, 0, 0);
        c.add(true, Between, &[0, 1, 2]);
        assert!(c.holds(true, Between, &[2, 1, 0]));
        assert!(c.holds(false, EqPoint, &[0, 1]));
        assert!(c.holds(false, EqPoint, &[0, 2]));
        assert!(c.holds(false, Between, &[1, 0, 2]));
        // Not everything follows.
        assert!(!c.holds(true, Between, &[0, 2, 1]));
    }

    #[test]
    fn generalities_two_points_determine_a_line() {
        let mut c = Ctx::new(2, 2, 0);
        c.add(true, OnLine, &[0, 2]);
        c.add(true, OnLine, &[1, 2]);
        c.add(true, OnLine, &[0, 3]);
        c.add(true, OnLine, &[1, 3]);
        c.add(false, EqPoint, &[0, 1]);
        assert!(c.holds(true, EqLine, &[2, 3]));
    }

    #[test]
    fn center_is_inside() {
        let mut c = Ctx::new(1, 0, 1);
        c.add(true, Center, &[0, 1]);
        assert!(c.holds(true, Inside, &[0, 1]));
        assert!(c.holds(false, OnCircle, &[0, 1]));
    }

    #[test]
    fn empty_premises_prove_nothing() {
        let mut c = Ctx::new(3, 0, 0);
        assert!(!c.holds(true, Between, &[0, 1, 2]));
    }

    #[test]
    fn contradiction_makes_everything_follow() {
        let mut c = Ctx::new(2, 1, 0);
        c.add(true, SameSide, &[0, 1, 2]);
        c.add(false, SameSide, &[0, 1, 2]);
        c.st.saturate();
        assert!(c.st.inconsistent());
        assert!(c.holds(true, Between, &[0, 0, 0]));
    }

    #[test]
    fn chained_betweenness_from_the_motivating_example() {
        // a, b on L; c between a and b; d between a and c; e between c and b
        // forces d between a and e.
        let mut c = Ctx::new(5, 1, 0);
        let (a, b, cc, d, e, l) = (0, 1, 2, 3, 4, 5);
        c.add(true, OnLine, &[a, l]);
        c.add(true, OnLine, &[b, l]);
        c.add(true, Between, &[a, cc, b]);
        c.add(true, Between, &[a, d, cc]);
        c.add(true, Between, &[cc, e, b]);
        assert!(c.holds(true, Between, &[a, d, e]));
    }

    #[test]
    fn generality_discipline_two_line_configuration() {
        // e is forced between c and d, but its position relative to a and b
        // on L is not determined either way.
        let mut c = Ctx::new(5, 2, 0);
        let (a, b, cc, d, e, l, m) = (0, 1, 2, 3, 4, 5, 6);
        c.add(false, EqPoint, &[a, b]);
        c.add(true, OnLine, &[a, l]);
        c.add(true, OnLine, &[b, l]);
        // diff_side(c, d, L)
        c.add(false, OnLine, &[cc, l]);
        c.add(false, OnLine, &[d, l]);
        c.add(false, SameSide, &[cc, d, l]);
        c.add(true, OnLine, &[cc, m]);
        c.add(true, OnLine, &[d, m]);
        c.add(true, OnLine, &[e, l]);
        c.add(true, OnLine, &[e, m]);
        assert!(c.holds(true, Between, &[cc, e, d]));
        assert!(!c.holds(true, Between, &[a, e, b]));
        assert!(!c.holds(false, Between, &[a, e, b]));
        assert!(!c.st.inconsistent());
    }

    #[test]
    fn direct_consequence_is_strictly_weaker_than_classical() {
        // Rules {A ∧ B → C, A ∧ ¬B → C} with Γ = {A}: C is a classical but
        // not a direct consequence. Encoded with A = on(p,L),
        // B = same_side(p,p,L), C = inside(p,γ).
        let clauses = vec![
            RuleClause {
                id: "test.1",
                vars: vec![("p", Point), ("L", Line), ("g", Circle)],
                lits: vec![
                    SchematicLit::new(false, OnLine, &[0, 1]),
                    SchematicLit::new(false, SameSide, &[0, 0, 1]),
                    SchematicLit::new(true, Inside, &[0, 2]),
                ],
            },
            RuleClause {
                id: "test.2",
                vars: vec![("p", Point), ("L", Line), ("g", Circle)],
                lits: vec![
                    SchematicLit::new(false, OnLine, &[0, 1]),
                    SchematicLit::new(true, SameSide, &[0, 0, 1]),
                    SchematicLit::new(true, Inside, &[0, 2]),
                ],
            },
        ];
        let rules = CompiledRules::compile(clauses);
        let mut st = DiagramState::with_rules(rules);
        let p = st.register_object(Point);
        let l = st.register_object(Line);
        let g = st.register_object(Circle);
        st.add(DiagramLit::pos(DA::new(OnLine, &[p, l])));
        st.saturate();
        assert!(!st.inconsistent());
        assert!(!st.contains(&DiagramLit::pos(DA::new(Inside, &[p, g]))));
    }

    #[test]
    fn explain_produces_replayable_traces() {
        let mut c = Ctx::new(3, 0, 0);
        c.add(true, Between, &[0, 1, 2]);
        let goal = DiagramLit::pos(DA::new(Between, &[Obj(2), Obj(1), Obj(0)]));
        assert!(c.st.is_direct_consequence(goal));
        let steps = c.st.explain(goal).unwrap();
        assert!(!steps.is_empty());
        assert_eq!(steps.last().unwrap().produced, goal);
        assert_eq!(steps.last().unwrap().rule, "between.1a");
        // Replay: each step's premises precede it.
        let mut have: HashSet<DiagramLit> = HashSet::new();
        have.insert(DiagramLit::pos(DA::new(Between, &[Obj(0), Obj(1), Obj(2)])));
        for (o, _, _) in [(Obj(0), 0, 0), (Obj(1), 0, 0), (Obj(2), 0, 0)] {
            have.insert(DiagramLit::pos(DA::new(EqPoint, &[o, o])));
        }
        for s in &steps {
            for p in &s.premises {
                assert!(have.contains(p), "premise {:?} not yet derived", p);
            }
            have.insert(s.produced);
        }
    }

    #[test]
    fn equality_merges_rewrite_facts() {
        let mut c = Ctx::new(3, 1, 0);
        c.add(true, OnLine, &[0, 3]);
        c.add(true, EqPoint, &[0, 1]);
        assert!(c.holds(true, OnLine, &[1, 3]));
        // And the symmetric / transitive equalities come out.
        c.add(true, EqPoint, &[1, 2]);
        assert!(c.holds(true, EqPoint, &[2, 0]));
        assert!(c.holds(true, OnLine, &[2, 3]));
    }

    #[test]
    fn saturation_is_idempotent_and_monotone() {
        let mut c1 = Ctx::new(4, 1, 0);
        c1.add(true, OnLine, &[0, 4]);
        c1.add(true, Between, &[0, 1, 2]);
        c1.st.saturate();
        let n1 = c1.st.facts().count();
        c1.st.saturate();
        assert_eq!(n1, c1.st.facts().count());

        // Superset of inputs: superset of closure.
        let mut c2 = Ctx::new(4, 1, 0);
        c2.add(true, OnLine, &[0, 4]);
        c2.add(true, Between, &[0, 1, 2]);
        c2.add(true, Between, &[1, 2, 3]);
        c2.st.saturate();
        let set1: HashSet<DiagramLit> = c1.st.facts().copied().collect();
        let set2: HashSet<DiagramLit> = c2.st.facts().copied().collect();
        assert!(set1.is_subset(&set2));
    }
}
