//! Independent brute-force checkers backing the test suite and the `decide`
//! command: propositional grounding with exhaustive search, the exponential
//! full decision procedure (split on every diagrammatic atom, then decide
//! the residual linear arithmetic), and exact evaluation of diagrammatic
//! literals in rational coordinate models.

use crate::diagram::{rule_catalog, RuleClause};
use crate::lang::{
    DiagramAtom, DiagramLit, Literal, MagnitudeTerm, MetricAtom, MetricLit, MetricRel, Obj, Pred,
    Sort,
};
use crate::metric::MetricContext;
use crate::transfer::{transfer_catalog, SConclusion};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

// ---------------------------------------------------------------------
// Propositional grounding and classical consequence
// ---------------------------------------------------------------------

/// A ground theory: the canonical diagrammatic atoms over a universe of
/// objects, plus the ground instances of a clause catalog.
pub struct GroundTheory {
    pub atoms: Vec<DiagramAtom>,
    index: HashMap<DiagramAtom, usize>,
    /// Clauses as signed atom indices (positive = atom+1).
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    InstanceTooLarge(String),
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::InstanceTooLarge(m) => write!(f, "instance too large: {m}"),
        }
    }
}

fn canon_atom(a: DiagramAtom) -> DiagramAtom {
    // Between and same-side have explicit symmetry axioms; the ground
    // universe keys atoms as written, with only the intersects relations
    // (which DiagramAtom::new already sorts) collapsed.
    a
}

impl GroundTheory {
    /// Grounds the diagram catalog over the given objects.
    pub fn new(sorts: &[Sort], clauses: &[RuleClause]) -> GroundTheory {
        let mut t = GroundTheory {
            atoms: Vec::new(),
            index: HashMap::new(),
            clauses: Vec::new(),
        };
        let by_sort: [Vec<Obj>; 3] = {
            let mut v = [Vec::new(), Vec::new(), Vec::new()];
            for (i, s) in sorts.iter().enumerate() {
                let k = match s {
                    Sort::Point => 0,
                    Sort::Line => 1,
                    Sort::Circle => 2,
                };
                v[k].push(Obj(i as u32));
            }
            v
        };
        for clause in clauses {
            let domains: Vec<&[Obj]> = clause
                .vars
                .iter()
                .map(|(_, s)| {
                    by_sort[match s {
                        Sort::Point => 0,
                        Sort::Line => 1,
                        Sort::Circle => 2,
                    }]
                    .as_slice()
                })
                .collect();
            let mut binding: Vec<Obj> = vec![Obj::NONE; clause.vars.len()];
            t.ground_clause(clause, &domains, 0, &mut binding);
        }
        // Reflexivity units.
        for (i, s) in sorts.iter().enumerate() {
            let eq = match s {
                Sort::Point => Pred::EqPoint,
                Sort::Line => Pred::EqLine,
                Sort::Circle => Pred::EqCircle,
            };
            let a = t.atom_id(DiagramAtom::new(eq, &[Obj(i as u32), Obj(i as u32)]));
            t.clauses.push(vec![a as i32 + 1]);
        }
        t
    }

    fn ground_clause(
        &mut self,
        clause: &RuleClause,
        domains: &[&[Obj]],
        var: usize,
        binding: &mut Vec<Obj>,
    ) {
        if var == clause.vars.len() {
            let mut lits = Vec::with_capacity(clause.lits.len());
            for l in &clause.lits {
                let mut args = [Obj::NONE; 3];
                for (i, &slot) in l.var_slots().iter().enumerate() {
                    args[i] = binding[slot as usize];
                }
                let atom = canon_atom(DiagramAtom::new(l.pred, &args[..l.pred.arity()]));
                let id = self.atom_id(atom) as i32 + 1;
                lits.push(if l.pos { id } else { -id });
            }
            lits.sort_unstable();
            lits.dedup();
            // A clause with a complementary pair is a tautology.
            if lits.windows(2).any(|w| w[0] == -w[1])
                || lits.iter().any(|&l| lits.binary_search(&-l).is_ok())
            {
                return;
            }
            self.clauses.push(lits);
            return;
        }
        for &o in domains[var] {
            binding[var] = o;
            self.ground_clause(clause, domains, var + 1, binding);
        }
        binding[var] = Obj::NONE;
    }

    pub fn atom_id(&mut self, a: DiagramAtom) -> usize {
        if let Some(&i) = self.index.get(&a) {
            return i;
        }
        let i = self.atoms.len();
        self.atoms.push(a);
        self.index.insert(a, i);
        i
    }

    pub fn lit_code(&mut self, l: &DiagramLit) -> i32 {
        let id = self.atom_id(canon_atom(l.atom)) as i32 + 1;
        if l.pos {
            id
        } else {
            -id
        }
    }
}

/// DPLL satisfiability with unit propagation. `assumptions` are unit
/// literals. Returns a satisfying total assignment if one exists.
fn dpll(n_atoms: usize, clauses: &[Vec<i32>], assumptions: &[i32]) -> Option<Vec<bool>> {
    let mut assign: Vec<i8> = vec![0; n_atoms + 1];
    let mut trail: Vec<i32> = Vec::new();
    for &a in assumptions {
        if !assign_lit(&mut assign, &mut trail, a) {
            return None;
        }
    }
    solve(&mut assign, &mut trail, clauses)
}

fn assign_lit(assign: &mut [i8], trail: &mut Vec<i32>, lit: i32) -> bool {
    let v = lit.unsigned_abs() as usize;
    let want: i8 = if lit > 0 { 1 } else { -1 };
    if assign[v] == -want {
        return false;
    }
    if assign[v] == 0 {
        assign[v] = want;
        trail.push(lit);
    }
    true
}

fn solve(assign: &mut Vec<i8>, trail: &mut Vec<i32>, clauses: &[Vec<i32>]) -> Option<Vec<bool>> {
    // Unit propagation to fixpoint.
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut n_unassigned = 0;
            let mut satisfied = false;
            for &l in c {
                let v = l.unsigned_abs() as usize;
                let s = assign[v];
                if s == 0 {
                    n_unassigned += 1;
                    unassigned = Some(l);
                } else if (s == 1) == (l > 0) {
                    satisfied = true;
                    break;
                }
            }
            if satisfied {
                continue;
            }
            match n_unassigned {
                0 => return None,
                1 => {
                    if !assign_lit(assign, trail, unassigned.unwrap()) {
                        return None;
                    }
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    // Branch on the first unassigned variable.
    let var = (1..assign.len()).find(|&v| assign[v] == 0);
    let Some(var) = var else {
        return Some(assign.iter().skip(1).map(|&s| s == 1).collect());
    };
    for phase in [1i32, -1] {
        let mark = trail.len();
        if assign_lit(assign, trail, phase * var as i32) {
            if let Some(model) = solve(assign, trail, clauses) {
                return Some(model);
            }
        }
        while trail.len() > mark {
            let l = trail.pop().unwrap();
            assign[l.unsigned_abs() as usize] = 0;
        }
    }
    None
}

/// Raw satisfiability entry point for the test suite: true iff the clause
/// set together with the assumption units is satisfiable.
pub fn dpll_for_tests(n_atoms: usize, clauses: &[Vec<i32>], assumptions: &[i32]) -> bool {
    dpll(n_atoms, clauses, assumptions).is_some()
}

/// Classical propositional consequence over the ground theory: true iff
/// every assignment satisfying Γ and all clauses satisfies the goal.
pub fn classical_entails(
    sorts: &[Sort],
    gamma: &[DiagramLit],
    clauses: &[RuleClause],
    goal: &DiagramLit,
) -> Result<bool, OracleError> {
    let mut t = GroundTheory::new(sorts, clauses);
    if t.atoms.len() > 200_000 {
        return Err(OracleError::InstanceTooLarge(format!(
            "{} ground atoms",
            t.atoms.len()
        )));
    }
    let mut assumptions: Vec<i32> = gamma.iter().map(|l| t.lit_code(l)).collect();
    assumptions.push(-t.lit_code(goal));
    let n = t.atoms.len();
    Ok(dpll(n, &t.clauses, &assumptions).is_none())
}

/// Convenience wrapper over the standard geometry catalog.
pub fn classical_entails_geometry(
    sorts: &[Sort],
    gamma: &[DiagramLit],
    goal: &DiagramLit,
) -> Result<bool, OracleError> {
    classical_entails(sorts, gamma, rule_catalog(), goal)
}

// ---------------------------------------------------------------------
// The exponential full decision procedure
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Consistent,
    Inconsistent,
}

/// Decides whether a mixed literal set is consistent with all diagrammatic,
/// metric, and transfer axioms, by splitting on every diagrammatic atom and
/// handing each total diagram to the linear-arithmetic side.
pub fn full_decide(sorts: &[Sort], literals: &[Literal]) -> Result<Decision, OracleError> {
    if sorts.len() > 7 {
        return Err(OracleError::InstanceTooLarge(format!(
            "{} objects (limit 7)",
            sorts.len()
        )));
    }
    let mut t = GroundTheory::new(sorts, rule_catalog());
    let mut assumptions = Vec::new();
    let mut metric_facts: Vec<MetricLit> = Vec::new();
    for l in literals {
        match l {
            Literal::Diagram(d) => assumptions.push(t.lit_code(d)),
            Literal::Metric(m) => metric_facts.push(m.clone()),
            Literal::Falsity => return Ok(Decision::Inconsistent),
        }
    }
    let n = t.atoms.len();
    let mut assign: Vec<i8> = vec![0; n + 1];
    let mut trail: Vec<i32> = Vec::new();
    for &a in &assumptions {
        if !assign_lit(&mut assign, &mut trail, a) {
            return Ok(Decision::Inconsistent);
        }
    }
    let mut budget: u64 = 500_000;
    let found = search_total(
        &mut assign,
        &mut trail,
        &t.clauses,
        &t.atoms,
        sorts,
        &metric_facts,
        &mut budget,
    )?;
    Ok(if found {
        Decision::Consistent
    } else {
        Decision::Inconsistent
    })
}

#[allow(clippy::too_many_arguments)]
fn search_total(
    assign: &mut Vec<i8>,
    trail: &mut Vec<i32>,
    clauses: &[Vec<i32>],
    atoms: &[DiagramAtom],
    sorts: &[Sort],
    metric_facts: &[MetricLit],
    budget: &mut u64,
) -> Result<bool, OracleError> {
    if *budget == 0 {
        return Err(OracleError::InstanceTooLarge(
            "search budget exhausted".to_string(),
        ));
    }
    *budget -= 1;
    // Unit propagation.
    let mark0 = trail.len();
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut n_unassigned = 0;
            let mut satisfied = false;
            for &l in c {
                let v = l.unsigned_abs() as usize;
                let s = assign[v];
                if s == 0 {
                    n_unassigned += 1;
                    unassigned = Some(l);
                } else if (s == 1) == (l > 0) {
                    satisfied = true;
                    break;
                }
            }
            if satisfied {
                continue;
            }
            match n_unassigned {
                0 => {
                    unwind(assign, trail, mark0);
                    return Ok(false);
                }
                1 => {
                    if !assign_lit(assign, trail, unassigned.unwrap()) {
                        unwind(assign, trail, mark0);
                        return Ok(false);
                    }
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(var) = (1..assign.len()).find(|&v| assign[v] == 0) {
        for phase in [-1i32, 1] {
            let mark = trail.len();
            if assign_lit(assign, trail, phase * var as i32)
                && search_total(assign, trail, clauses, atoms, sorts, metric_facts, budget)?
            {
                return Ok(true);
            }
            unwind(assign, trail, mark);
        }
        unwind(assign, trail, mark0);
        return Ok(false);
    }
    // Total diagram assignment: decide the metric residue.
    let ok = metric_residue_feasible(assign, atoms, sorts, metric_facts);
    if !ok {
        unwind(assign, trail, mark0);
    }
    Ok(ok)
}

fn unwind(assign: &mut [i8], trail: &mut Vec<i32>, mark: usize) {
    while trail.len() > mark {
        let l = trail.pop().unwrap();
        assign[l.unsigned_abs() as usize] = 0;
    }
}

/// Given a total diagram assignment, reduces every transfer-axiom instance
/// to metric constraints and checks feasibility. Implication residues whose
/// negation is non-convex are split recursively.
fn metric_residue_feasible(
    assign: &[i8],
    atoms: &[DiagramAtom],
    sorts: &[Sort],
    metric_facts: &[MetricLit],
) -> bool {
    let index: HashMap<DiagramAtom, usize> =
        atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let holds = |l: &DiagramLit| -> bool {
        match index.get(&canon_atom(l.atom)) {
            Some(&i) => (assign[i + 1] == 1) == l.pos,
            // An atom never mentioned by clauses or assumptions is
            // unconstrained; treat as false (the search assigns all atoms
            // from the ground universe, which covers every catalog atom).
            None => false,
        }
    };
    // Point equivalence classes from the assignment.
    let mut ctx = MetricContext::new();
    ctx.sync_object_count(sorts.len());
    for (i, a) in atoms.iter().enumerate() {
        if a.pred == Pred::EqPoint {
            if assign[i + 1] == 1 {
                ctx.merge_points(a.args[0], a.args[1]);
            } else {
                ctx.add_diseq(a.args[0], a.args[1]);
            }
        }
    }
    for m in metric_facts {
        ctx.add_fact(m.clone());
    }
    // Transfer instances over the assignment.
    let objs: Vec<Obj> = (0..sorts.len() as u32).map(Obj).collect();
    let by_sort = |s: Sort| -> Vec<Obj> {
        objs.iter()
            .copied()
            .filter(|o| sorts[o.0 as usize] == s)
            .collect()
    };
    // Disjunctions of metric literals, one of which must hold per entry.
    let mut splits: Vec<Vec<MetricLit>> = Vec::new();
    for rule in transfer_catalog() {
        let domains: Vec<Vec<Obj>> = rule.vars.iter().map(|(_, s)| by_sort(*s)).collect();
        let mut binding: Vec<Obj> = vec![Obj::NONE; rule.vars.len()];
        collect_transfer_residues(
            rule,
            &domains,
            0,
            &mut binding,
            &holds,
            &mut ctx,
            &mut splits,
        );
    }
    if ctx.inconsistent() {
        return false;
    }
    // Branch over the recorded disjunctions.
    fn try_splits(ctx: &mut MetricContext, splits: &[Vec<MetricLit>]) -> bool {
        match splits.split_first() {
            None => !ctx.inconsistent(),
            Some((disjuncts, rest)) => {
                for d in disjuncts {
                    let mut c = ctx.clone();
                    c.add_fact(d.clone());
                    if c.inconsistent() {
                        continue;
                    }
                    if try_splits(&mut c, rest) {
                        return true;
                    }
                }
                false
            }
        }
    }
    try_splits(&mut ctx, &splits)
}

fn collect_transfer_residues(
    rule: &crate::transfer::TransferRule,
    domains: &[Vec<Obj>],
    var: usize,
    binding: &mut Vec<Obj>,
    holds: &dyn Fn(&DiagramLit) -> bool,
    ctx: &mut MetricContext,
    splits: &mut Vec<Vec<MetricLit>>,
) {
    if var == rule.vars.len() {
        let diag_ok = rule.diagram_hyps.iter().all(|h| {
            let mut args = [Obj::NONE; 3];
            for (i, &slot) in h.var_slots().iter().enumerate() {
                args[i] = binding[slot as usize];
            }
            holds(&DiagramLit {
                pos: h.pos,
                atom: DiagramAtom::new(h.pred, &args[..h.pred.arity()]),
            })
        });
        if !diag_ok {
            return;
        }
        match &rule.conclusion {
            SConclusion::Metric(m) => {
                if rule.metric_hyps.is_empty() {
                    // Purely diagrammatic hypotheses: conclusion holds.
                    ctx.add_fact(m.instantiate(binding));
                } else {
                    // hyps → concl, recorded as ¬hyp ∨ concl (the catalog
                    // has single metric hypotheses only).
                    let h = rule.metric_hyps[0].instantiate(binding);
                    splits.push(vec![h.negated(), m.instantiate(binding)]);
                }
            }
            SConclusion::Diagram(d) => {
                let mut args = [Obj::NONE; 3];
                for (i, &slot) in d.var_slots().iter().enumerate() {
                    args[i] = binding[slot as usize];
                }
                let lit = DiagramLit {
                    pos: d.pos,
                    atom: DiagramAtom::new(d.pred, &args[..d.pred.arity()]),
                };
                if !holds(&lit) {
                    // Conclusion is false: the metric hypotheses cannot all
                    // hold. A single Lt hypothesis negates convexly; an Eq
                    // hypothesis becomes a disequality fact; several
                    // hypotheses need a disjunctive split, recorded for the
                    // recursive search.
                    let hyps: Vec<MetricLit> = rule
                        .metric_hyps
                        .iter()
                        .map(|h| h.instantiate(binding))
                        .collect();
                    match hyps.len() {
                        0 => {
                            // Pure diagram rule violated: mark infeasible.
                            ctx.add_fact(contradiction_fact());
                        }
                        1 => {
                            // The hypothesis must fail.
                            ctx.add_fact(hyps[0].negated());
                        }
                        _ => {
                            // No catalog rule has more than one metric
                            // hypothesis.
                            debug_assert!(false, "unexpected multi-hypothesis rule");
                        }
                    }
                }
            }
        }
        return;
    }
    for &o in &domains[var] {
        binding[var] = o;
        collect_transfer_residues(rule, domains, var + 1, binding, holds, ctx, splits);
    }
    binding[var] = Obj::NONE;
}

/// 0 < 0, the canonical infeasible fact.
fn contradiction_fact() -> MetricLit {
    MetricLit {
        pos: true,
        atom: MetricAtom {
            rel: MetricRel::Lt,
            lhs: MagnitudeTerm::zero(crate::lang::MagSort::Segment),
            rhs: MagnitudeTerm::zero(crate::lang::MagSort::Segment),
        },
    }
}

// ---------------------------------------------------------------------
// Rational coordinate models
// ---------------------------------------------------------------------

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatPoint {
    pub x: Rat,
    pub y: Rat,
}

/// A line as coefficients (a, b, c) of ax + by + c = 0, up to scale.
#[derive(Debug, Clone, PartialEq)]
pub struct RatLine {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

/// A circle as a rational center and a rational squared radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RatCircle {
    pub cx: Rat,
    pub cy: Rat,
    pub r2: Rat,
}

#[derive(Debug, Clone)]
pub enum RatObject {
    Point(RatPoint),
    Line(RatLine),
    Circle(RatCircle),
}

#[derive(Debug, Clone, Default)]
pub struct Model {
    pub objects: Vec<RatObject>,
}

impl Model {
    pub fn sorts(&self) -> Vec<Sort> {
        self.objects
            .iter()
            .map(|o| match o {
                RatObject::Point(_) => Sort::Point,
                RatObject::Line(_) => Sort::Line,
                RatObject::Circle(_) => Sort::Circle,
            })
            .collect()
    }

    fn point(&self, o: Obj) -> &RatPoint {
        match &self.objects[o.0 as usize] {
            RatObject::Point(p) => p,
            _ => panic!("not a point"),
        }
    }

    fn line(&self, o: Obj) -> &RatLine {
        match &self.objects[o.0 as usize] {
            RatObject::Line(l) => l,
            _ => panic!("not a line"),
        }
    }

    fn circle(&self, o: Obj) -> &RatCircle {
        match &self.objects[o.0 as usize] {
            RatObject::Circle(c) => c,
            _ => panic!("not a circle"),
        }
    }

    fn line_value(&self, l: &RatLine, p: &RatPoint) -> Rat {
        &l.a * &p.x + &l.b * &p.y + &l.c
    }

    fn dist2(&self, p: &RatPoint, q: &RatPoint) -> Rat {
        let dx = &p.x - &q.x;
        let dy = &p.y - &q.y;
        &dx * &dx + &dy * &dy
    }

    /// Evaluates a diagrammatic atom under the cartesian reading:
    /// betweenness via collinearity and strict order, same-sidedness via
    /// the sign of the line form, intersection via the transversality
    /// conditions. Exact rational arithmetic throughout.
    pub fn eval_atom(&self, a: &DiagramAtom) -> bool {
        match a.pred {
            Pred::OnLine => {
                let (p, l) = (self.point(a.args[0]), self.line(a.args[1]));
                self.line_value(l, p).is_zero()
            }
            Pred::SameSide => {
                let (p, q, l) = (
                    self.point(a.args[0]),
                    self.point(a.args[1]),
                    self.line(a.args[2]),
                );
                let vp = self.line_value(l, p);
                let vq = self.line_value(l, q);
                !vp.is_zero() && !vq.is_zero() && (vp.is_positive() == vq.is_positive())
            }
            Pred::Between => {
                let (p, q, r) = (
                    self.point(a.args[0]),
                    self.point(a.args[1]),
                    self.point(a.args[2]),
                );
                // Distinct, collinear, q strictly inside the segment pr.
                if p == q || q == r || p == r {
                    return false;
                }
                let cross = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
                if !cross.is_zero() {
                    return false;
                }
                let dot = (&q.x - &p.x) * (&q.x - &r.x) + (&q.y - &p.y) * (&q.y - &r.y);
                dot.is_negative()
            }
            Pred::OnCircle => {
                let (p, c) = (self.point(a.args[0]), self.circle(a.args[1]));
                let center = RatPoint {
                    x: c.cx.clone(),
                    y: c.cy.clone(),
                };
                self.dist2(p, &center) == c.r2
            }
            Pred::Inside => {
                let (p, c) = (self.point(a.args[0]), self.circle(a.args[1]));
                let center = RatPoint {
                    x: c.cx.clone(),
                    y: c.cy.clone(),
                };
                self.dist2(p, &center) < c.r2
            }
            Pred::Center => {
                let (p, c) = (self.point(a.args[0]), self.circle(a.args[1]));
                p.x == c.cx && p.y == c.cy
            }
            Pred::IntersectsLL => {
                let (l, m) = (self.line(a.args[0]), self.line(a.args[1]));
                // Transversal: not parallel (hence exactly one common point).
                !(&l.a * &m.b - &l.b * &m.a).is_zero()
            }
            Pred::IntersectsLC => {
                let (l, c) = (self.line(a.args[0]), self.circle(a.args[1]));
                // dist(center, line)² < r²  ⟺  (a·cx + b·cy + c)² < r²(a²+b²)
                let v = &l.a * &c.cx + &l.b * &c.cy + &l.c;
                let n2 = &l.a * &l.a + &l.b * &l.b;
                &v * &v < &c.r2 * n2
            }
            Pred::IntersectsCC => {
                let (c1, c2) = (self.circle(a.args[0]), self.circle(a.args[1]));
                let dx = &c1.cx - &c2.cx;
                let dy = &c1.cy - &c2.cy;
                let d2 = &dx * &dx + &dy * &dy;
                // (r1−r2)² < d² < (r1+r2)², squared-radius form:
                // |d² − r1² − r2²| < 2·r1·r2  ⟺  (d² − r1² − r2²)² < 4·r1²·r2²
                let gap = &d2 - &c1.r2 - &c2.r2;
                &gap * &gap < rat(4, 1) * &c1.r2 * &c2.r2
            }
            Pred::EqPoint => self.point(a.args[0]) == self.point(a.args[1]),
            Pred::EqLine => {
                let (l, m) = (self.line(a.args[0]), self.line(a.args[1]));
                (&l.a * &m.b - &l.b * &m.a).is_zero()
                    && (&l.a * &m.c - &l.c * &m.a).is_zero()
                    && (&l.b * &m.c - &l.c * &m.b).is_zero()
            }
            Pred::EqCircle => self.circle(a.args[0]) == self.circle(a.args[1]),
        }
    }

    pub fn eval_lit(&self, l: &DiagramLit) -> bool {
        self.eval_atom(&l.atom) == l.pos
    }

    /// Squared length of a segment (for exact segment comparisons).
    pub fn seg2(&self, a: Obj, b: Obj) -> Rat {
        self.dist2(self.point(a), self.point(b))
    }

    /// Twice the signed area of a triangle; |this|/2 is the area magnitude.
    pub fn signed_area2(&self, a: Obj, b: Obj, c: Obj) -> Rat {
        let (p, q, r) = (self.point(a), self.point(b), self.point(c));
        (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
    }

    /// The complete true literal set over the model's objects (positive and
    /// negative), canonical atoms only.
    pub fn true_literals(&self) -> Vec<DiagramLit> {
        let sorts = self.sorts();
        let mut out = Vec::new();
        let objs = |s: Sort| -> Vec<Obj> {
            (0..sorts.len() as u32)
                .map(Obj)
                .filter(|o| sorts[o.0 as usize] == s)
                .collect()
        };
        let (pts, lns, crs) = (objs(Sort::Point), objs(Sort::Line), objs(Sort::Circle));
        let mut push = |atom: DiagramAtom, s: &Self| {
            let val = s.eval_atom(&atom);
            out.push(DiagramLit { pos: val, atom });
        };
        for &p in &pts {
            for &l in &lns {
                push(DiagramAtom::new(Pred::OnLine, &[p, l]), self);
            }
            for &c in &crs {
                push(DiagramAtom::new(Pred::OnCircle, &[p, c]), self);
                push(DiagramAtom::new(Pred::Inside, &[p, c]), self);
                push(DiagramAtom::new(Pred::Center, &[p, c]), self);
            }
        }
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i + 1..] {
                push(DiagramAtom::new(Pred::EqPoint, &[p, q]), self);
            }
        }
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i..] {
                for &l in &lns {
                    push(DiagramAtom::new(Pred::SameSide, &[p, q, l]), self);
                }
            }
        }
        for &p in &pts {
            for (j, &q) in pts.iter().enumerate() {
                if p == q {
                    continue;
                }
                for &r in &pts[j + 1..] {
                    if r == p {
                        continue;
                    }
                    push(DiagramAtom::new(Pred::Between, &[q, p, r]), self);
                }
            }
        }
        for (i, &l) in lns.iter().enumerate() {
            for &m in &lns[i + 1..] {
                push(DiagramAtom::new(Pred::IntersectsLL, &[l, m]), self);
                push(DiagramAtom::new(Pred::EqLine, &[l, m]), self);
            }
            for &c in &crs {
                push(DiagramAtom::new(Pred::IntersectsLC, &[l, c]), self);
            }
        }
        for (i, &c) in crs.iter().enumerate() {
            for &d in &crs[i + 1..] {
                push(DiagramAtom::new(Pred::IntersectsCC, &[c, d]), self);
                push(DiagramAtom::new(Pred::EqCircle, &[c, d]), self);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------
// Deterministic random model generation
// ---------------------------------------------------------------------

/// SplitMix64; the oracle sweeps need reproducible streams, not quality.
#[derive(Debug, Clone)]
pub struct Rng(pub u64);

impl Rng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    /// A small rational in [−8, 8] with denominator ≤ 4.
    pub fn coord(&mut self) -> Rat {
        let n = self.below(65) as i64 - 32;
        let d = self.below(4) as i64 + 1;
        rat(n, d)
    }
}

/// Samples a model: points with small rational coordinates, lines through
/// sampled point pairs, circles with sampled centers passing through
/// sampled points.
pub fn random_model(rng: &mut Rng, n_points: usize, n_lines: usize, n_circles: usize) -> Model {
    let mut m = Model::default();
    let mut pts: Vec<RatPoint> = Vec::new();
    for _ in 0..n_points.max(2) {
        let p = RatPoint {
            x: rng.coord(),
            y: rng.coord(),
        };
        pts.push(p.clone());
        m.objects.push(RatObject::Point(p));
    }
    for _ in 0..n_lines {
        // A line through two distinct sampled anchors (not necessarily
        // model points, half the time).
        let (p, q) = loop {
            let p = if rng.below(2) == 0 {
                pts[rng.below(pts.len() as u64) as usize].clone()
            } else {
                RatPoint {
                    x: rng.coord(),
                    y: rng.coord(),
                }
            };
            let q = if rng.below(2) == 0 {
                pts[rng.below(pts.len() as u64) as usize].clone()
            } else {
                RatPoint {
                    x: rng.coord(),
                    y: rng.coord(),
                }
            };
            if p != q {
                break (p, q);
            }
        };
        let a = &q.y - &p.y;
        let b = &p.x - &q.x;
        let c = -(&a * &p.x + &b * &p.y);
        m.objects.push(RatObject::Line(RatLine { a, b, c }));
    }
    for _ in 0..n_circles {
        let center = if rng.below(2) == 0 {
            pts[rng.below(pts.len() as u64) as usize].clone()
        } else {
            RatPoint {
                x: rng.coord(),
                y: rng.coord(),
            }
        };
        let through = loop {
            let t = pts[rng.below(pts.len() as u64) as usize].clone();
            if t != center {
                break t;
            }
        };
        let dx = &through.x - &center.x;
        let dy = &through.y - &center.y;
        let r2 = &dx * &dx + &dy * &dy;
        m.objects.push(RatObject::Circle(RatCircle {
            cx: center.x,
            cy: center.y,
            r2,
        }));
    }
    m
}

pub mod witness;
