//! The sequent-level checker: executes a proof body against a theorem
//! statement, maintaining the diagram closure and the metric context side
//! by side.
//!
//! Γ ∪ Δ only grows within a supposition level; case splits and reductio
//! run on snapshots and export back per the three-premise rule: a reductio
//! block ending in a contradiction yields the negated assumption, a case
//! pair yields the conclusions common to both branches plus witnesses
//! constructed in both branches under the same names.

use crate::ast::{
    LitAst, MagAtomAst, ProofScript, QedMode, Span, Step, StepKind, SuperKind, TheoremAst,
    TheoremStatus,
};
use crate::constructions::{resolve_rule, DistinctSupport};
use crate::diagram::{DiagramState, SchematicLit};
use crate::lang::{
    DiagramAtom, DiagramLit, Literal, MagAtom, MagSort, MagnitudeTerm, MetricAtom, MetricLit, Obj,
    ObjTable, Pred, Sort,
};
use crate::library::{EntryStatus, Library};
use crate::metric::MetricContext;
use crate::render;
use crate::transfer;

#[derive(Debug, Clone)]
pub struct CheckError {
    pub span: Span,
    pub msg: String,
}

impl CheckError {
    fn new(span: Span, msg: impl Into<String>) -> Self {
        CheckError {
            span,
            msg: msg.into(),
        }
    }
}

impl std::fmt::Display for CheckError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.span, self.msg)
    }
}

/// Which channel accepted a demonstration step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Channel {
    Diagram,
    Metric,
    Transfer(&'static str),
    Contradictory,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Channel::Diagram => write!(f, "direct diagram consequence"),
            Channel::Metric => write!(f, "metric entailment"),
            Channel::Transfer(id) => write!(f, "transfer rule {id}"),
            Channel::Contradictory => write!(f, "ex falso (state is contradictory)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepTrace {
    pub span: Span,
    pub what: String,
}

/// A sequent-in-progress.
#[derive(Clone)]
pub struct ProofState {
    pub table: ObjTable,
    pub diagram: DiagramState,
    pub metric: MetricContext,
    /// Established additions, in order.
    pub delta: Vec<Literal>,
    pub inconsistent: bool,
    pub trace: Vec<StepTrace>,
}

impl ProofState {
    pub fn empty() -> Self {
        ProofState {
            table: ObjTable::new(),
            diagram: DiagramState::new(),
            metric: MetricContext::new(),
            delta: Vec::new(),
            inconsistent: false,
            trace: Vec::new(),
        }
    }

    /// Sets up the initial state of a theorem: parameters registered,
    /// hypotheses loaded (defined predicates already expanded by the
    /// parser), and the auto-transfer pass run.
    pub fn begin(thm: &TheoremAst) -> Result<ProofState, CheckError> {
        let mut st = ProofState::empty();
        for (n, s) in &thm.params {
            st.register(n, *s, thm.span)?;
        }
        for (n, _) in &thm.existentials {
            if thm.params.iter().any(|(p, _)| p == n) {
                return Err(CheckError::new(
                    thm.span,
                    format!("existential variable '{n}' occurs among the hypothesis variables"),
                ));
            }
        }
        let mut hyps = Vec::new();
        for l in &thm.assumes {
            hyps.push(st.resolve_lit(l, thm.span)?);
        }
        st.assimilate(&hyps);
        Ok(st)
    }

    pub fn register(&mut self, name: &str, sort: Sort, span: Span) -> Result<Obj, CheckError> {
        let o = self
            .table
            .insert(name, sort)
            .map_err(|e| CheckError::new(span, e))?;
        self.diagram.sync_objects(&self.table);
        self.metric.sync_object_count(self.table.len());
        Ok(o)
    }

    fn resolve_sorted(&self, name: &str, sort: Sort, span: Span) -> Result<Obj, CheckError> {
        self.table
            .lookup_sorted(name, sort)
            .ok_or_else(|| CheckError::new(span, format!("unknown {sort} variable '{name}'")))
    }

    fn resolve_any(&self, name: &str, span: Span) -> Result<Obj, CheckError> {
        self.table
            .lookup(name)
            .ok_or_else(|| CheckError::new(span, format!("unknown variable '{name}'")))
    }

    fn resolve_mag_atom(&self, a: &MagAtomAst, span: Span) -> Result<MagAtom, CheckError> {
        let p = |n: &String| self.resolve_sorted(n, Sort::Point, span);
        Ok(match a {
            MagAtomAst::Seg(x, y) => MagAtom::Seg(p(x)?, p(y)?),
            MagAtomAst::Angle(x, y, z) => MagAtom::Angle(p(x)?, p(y)?, p(z)?),
            MagAtomAst::Area(x, y, z) => MagAtom::Area(p(x)?, p(y)?, p(z)?),
            MagAtomAst::RightAngle => MagAtom::RightAngle,
        })
    }

    pub fn resolve_lit(&self, l: &LitAst, span: Span) -> Result<Literal, CheckError> {
        match l {
            LitAst::Falsity => Ok(Literal::Falsity),
            LitAst::Diagram { pos, pred, args } => {
                let sig = pred.signature();
                if args.len() != sig.len() {
                    return Err(CheckError::new(
                        span,
                        format!("'{pred:?}' expects {} arguments", sig.len()),
                    ));
                }
                let mut objs = Vec::with_capacity(args.len());
                for (n, s) in args.iter().zip(sig) {
                    objs.push(self.resolve_sorted(n, *s, span)?);
                }
                Ok(Literal::diagram(*pos, DiagramAtom::new(*pred, &objs)))
            }
            LitAst::Metric { pos, rel, lhs, rhs } => {
                let conv = |t: &crate::ast::TermAst,
                            other: &crate::ast::TermAst|
                 -> Result<MagnitudeTerm, CheckError> {
                    let sort = t
                        .summands
                        .first()
                        .or(other.summands.first())
                        .map(|a| match a {
                            MagAtomAst::Seg(..) => MagSort::Segment,
                            MagAtomAst::Angle(..) | MagAtomAst::RightAngle => MagSort::Angle,
                            MagAtomAst::Area(..) => MagSort::Area,
                        })
                        .unwrap_or(MagSort::Segment);
                    let mut atoms = Vec::new();
                    for a in &t.summands {
                        atoms.push(self.resolve_mag_atom(a, span)?);
                    }
                    MagnitudeTerm::sum(sort, atoms).map_err(|e| CheckError::new(span, e))
                };
                let lhs_t = conv(lhs, rhs)?;
                let rhs_t = conv(rhs, lhs)?;
                let atom =
                    MetricAtom::new(*rel, lhs_t, rhs_t).map_err(|e| CheckError::new(span, e))?;
                Ok(Literal::metric(*pos, atom))
            }
        }
    }

    /// Adds literals to the state and recomputes the joint fixpoint:
    /// diagram closure, diagram→metric identities, auto transfer facts,
    /// metric→diagram point identities, until nothing changes.
    pub fn assimilate(&mut self, lits: &[Literal]) {
        for l in lits {
            match l {
                Literal::Diagram(d) => self.diagram.add(*d),
                Literal::Metric(m) => self.metric.add_fact(m.clone()),
                Literal::Falsity => self.diagram.mark_inconsistent(),
            }
        }
        self.sync();
    }

    fn sync(&mut self) {
        loop {
            self.diagram.saturate();
            if self.diagram.inconsistent() {
                self.inconsistent = true;
                return;
            }
            let (eqs, diseqs) = self.diagram.point_facts();
            for (a, b) in eqs {
                self.metric.merge_points(a, b);
            }
            for (a, b) in diseqs {
                self.metric.add_diseq(a, b);
            }
            for m in transfer::auto_transfer_pass(&mut self.diagram) {
                self.metric.add_fact(m);
            }
            if self.metric.inconsistent() {
                self.inconsistent = true;
                return;
            }
            let mut changed = false;
            for (a, b, eq) in self.metric.derive_point_facts() {
                let lit = DiagramLit {
                    pos: eq,
                    atom: DiagramAtom::new(Pred::EqPoint, &[a, b]),
                };
                if !self.diagram.contains(&lit) {
                    self.diagram.add(lit);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// The three demonstration channels of a `have` step.
    pub fn established(&mut self, lit: &Literal, allow_transfer: bool) -> Option<Channel> {
        if self.inconsistent {
            return Some(Channel::Contradictory);
        }
        match lit {
            Literal::Falsity => None,
            Literal::Diagram(d) => {
                if self.diagram.is_direct_consequence(*d) {
                    return Some(Channel::Diagram);
                }
                if allow_transfer {
                    if let Some(id) =
                        transfer::find_transfer_for(lit, &mut self.diagram, &mut self.metric)
                    {
                        return Some(Channel::Transfer(id));
                    }
                }
                None
            }
            Literal::Metric(m) => {
                if self.metric.entails(m) {
                    return Some(Channel::Metric);
                }
                if allow_transfer {
                    if let Some(id) =
                        transfer::find_transfer_for(lit, &mut self.diagram, &mut self.metric)
                    {
                        return Some(Channel::Transfer(id));
                    }
                }
                None
            }
        }
    }

    fn lit_str(&self, l: &Literal) -> String {
        render::lit_str(l, &self.table)
    }
}

/// Verdict for one theorem.
#[derive(Debug, Clone)]
pub struct TheoremVerdict {
    pub name: String,
    pub passed: bool,
    pub assumed: bool,
    pub error: Option<CheckError>,
    pub millis: u128,
    pub trace: Vec<StepTrace>,
}

/// Checks one theorem body against the library (earlier entries only).
pub fn check_theorem(
    lib: &Library,
    self_index: usize,
    thm: &TheoremAst,
) -> Result<Vec<StepTrace>, CheckError> {
    let mut st = ProofState::begin(thm)?;
    if thm.proof.is_empty() {
        return Err(CheckError::new(thm.span, "proof body is empty"));
    }
    conclude_proof(&mut st, &thm.proof, thm, lib, self_index)?;
    Ok(st.trace)
}

/// Runs a proof (or one branch of a final case split) to its conclusion.
///
/// A proof normally ends with `qed`/`qef`. It may instead end with a case
/// split whose branches each conclude the theorem on their own — the
/// three-premise rule with the theorem's conclusion as the common Δ′, which
/// is how witnesses that depend on the case are merged. A branch whose
/// state is contradictory concludes vacuously.
fn conclude_proof(
    st: &mut ProofState,
    steps: &[Step],
    thm: &TheoremAst,
    lib: &Library,
    self_index: usize,
) -> Result<(), CheckError> {
    let Some((last, body)) = steps.split_last() else {
        return Err(CheckError::new(
            thm.span,
            "proof branch is empty: expected qed or qef",
        ));
    };
    match &last.kind {
        StepKind::Qed { mode } => {
            check_steps(st, body, lib, self_index)?;
            qed_check(st, thm, *mode, last.span)
        }
        StepKind::Cases {
            on,
            pos_branch,
            neg_branch,
        } if branch_is_terminal(pos_branch) || branch_is_terminal(neg_branch) => {
            check_steps(st, body, lib, self_index)?;
            let lit = st.resolve_lit(on, last.span)?;
            for (assumption, branch) in [(lit.clone(), pos_branch), (lit.negated(), neg_branch)] {
                let mut inner = st.clone();
                inner.assimilate(std::slice::from_ref(&assumption));
                if branch.is_empty() {
                    if inner.inconsistent {
                        continue;
                    }
                    return Err(CheckError::new(
                        last.span,
                        "empty case branch with a consistent assumption",
                    ));
                }
                if branch_is_terminal(branch) {
                    conclude_proof(&mut inner, branch, thm, lib, self_index)?;
                } else {
                    // A branch that just derives a contradiction closes
                    // without its own qed.
                    check_steps(&mut inner, branch, lib, self_index)?;
                    if !inner.inconsistent {
                        return Err(CheckError::new(
                            last.span,
                            "branch of a final case split must end with qed/qef or a contradiction",
                        ));
                    }
                }
                st.trace
                    .extend(inner.trace.into_iter().skip(st.trace.len()));
            }
            Ok(())
        }
        _ => {
            // No qed: acceptable only if the steps close the state.
            check_steps(st, steps, lib, self_index)?;
            if st.inconsistent {
                return Ok(());
            }
            Err(CheckError::new(last.span, "proof must end with qed or qef"))
        }
    }
}

/// A branch is "terminal" if it ends in qed/qef or in a nested terminal
/// case split.
fn branch_is_terminal(steps: &[Step]) -> bool {
    match steps.last() {
        Some(Step {
            kind: StepKind::Qed { .. },
            ..
        }) => true,
        Some(Step {
            kind:
                StepKind::Cases {
                    pos_branch,
                    neg_branch,
                    ..
                },
            ..
        }) => branch_is_terminal(pos_branch) || branch_is_terminal(neg_branch),
        _ => false,
    }
}

fn check_steps(
    st: &mut ProofState,
    steps: &[Step],
    lib: &Library,
    self_index: usize,
) -> Result<(), CheckError> {
    for step in steps {
        match &step.kind {
            StepKind::Qed { .. } => {
                return Err(CheckError::new(
                    step.span,
                    "qed/qef may only appear as the final top-level step",
                ))
            }
            _ => check_step(st, step, lib, self_index)?,
        }
    }
    Ok(())
}

fn check_step(
    st: &mut ProofState,
    step: &Step,
    lib: &Library,
    self_index: usize,
) -> Result<(), CheckError> {
    let span = step.span;
    match &step.kind {
        StepKind::Have { lit } => {
            let l = st.resolve_lit(lit, span)?;
            match st.established(&l, true) {
                Some(ch) => {
                    st.trace.push(StepTrace {
                        span,
                        what: format!("have {}: {}", st.lit_str(&l), ch),
                    });
                    if l != Literal::Falsity {
                        st.assimilate(std::slice::from_ref(&l));
                        st.delta.push(l);
                    }
                    Ok(())
                }
                None => {
                    if l == Literal::Falsity {
                        return Err(CheckError::new(
                            span,
                            "contradiction: the state is consistent".to_string(),
                        ));
                    }
                    Err(CheckError::new(
                        span,
                        format!(
                            "'{}' is not a consequence: not a direct diagram consequence, \
                             not a metric entailment, and not the conclusion of a single \
                             transfer rule",
                            st.lit_str(&l)
                        ),
                    ))
                }
            }
        }
        StepKind::Construct {
            keyword,
            outputs,
            args,
            distinct_from,
        } => check_construct(st, span, keyword, outputs, args, distinct_from),
        StepKind::Apply {
            theorem,
            args,
            outputs,
            selected,
        } => check_apply(st, span, lib, self_index, theorem, args, outputs, selected),
        StepKind::Suppose { assumption, body } => {
            let assum = st.resolve_lit(assumption, span)?;
            if assum == Literal::Falsity {
                return Err(CheckError::new(span, "cannot suppose a contradiction"));
            }
            let mut inner = st.clone();
            inner.assimilate(std::slice::from_ref(&assum));
            check_steps(&mut inner, body, lib, self_index)?;
            if !inner.inconsistent {
                return Err(CheckError::new(
                    span,
                    format!(
                        "suppose block for '{}' does not end in a contradiction",
                        st.lit_str(&assum)
                    ),
                ));
            }
            st.trace = inner.trace;
            let neg = assum.negated();
            st.trace.push(StepTrace {
                span,
                what: format!("reductio: {}", st.lit_str(&neg)),
            });
            st.assimilate(std::slice::from_ref(&neg));
            st.delta.push(neg);
            Ok(())
        }
        StepKind::Cases {
            on,
            pos_branch,
            neg_branch,
        } => check_cases(st, span, on, pos_branch, neg_branch, lib, self_index),
        StepKind::Superpose {
            kind,
            args,
            primed,
            body,
            conclude,
        } => check_superpose(
            st, span, *kind, args, primed, body, conclude, lib, self_index,
        ),
        StepKind::Qed { .. } => unreachable!("filtered by check_steps"),
    }
}

fn check_construct(
    st: &mut ProofState,
    span: Span,
    keyword: &str,
    outputs: &[String],
    args: &[String],
    distinct_from: &[String],
) -> Result<(), CheckError> {
    let mut arg_objs = Vec::with_capacity(args.len());
    for a in args {
        arg_objs.push(st.resolve_any(a, span)?);
    }
    let sorts: Vec<Sort> = arg_objs.iter().map(|&o| st.table.sort(o)).collect();
    let Some((rule, flipped)) = resolve_rule(keyword, &sorts) else {
        return Err(CheckError::new(
            span,
            format!(
                "construction '{keyword}' does not accept arguments of sorts {:?}",
                sorts
            ),
        ));
    };
    if flipped {
        arg_objs.swap(0, 1);
    }
    if rule.outputs.len() != outputs.len() {
        return Err(CheckError::new(
            span,
            format!(
                "construction '{}' produces {} object(s), {} name(s) given",
                rule.id,
                rule.outputs.len(),
                outputs.len()
            ),
        ));
    }
    let distinct_objs: Vec<Obj> = {
        let mut v = Vec::new();
        for d in distinct_from {
            v.push(st.resolve_any(d, span)?);
        }
        v
    };
    if !distinct_objs.is_empty() && rule.distinct_support == DistinctSupport::None {
        return Err(CheckError::new(
            span,
            format!("construction '{}' does not support distinct_from", rule.id),
        ));
    }

    // Prerequisites from the rule itself.
    let mut prereqs: Vec<Literal> = rule
        .prereqs
        .iter()
        .map(|p| Literal::Diagram(instantiate_slit(p, &arg_objs)))
        .collect();
    // Induced prerequisites from distinct_from items on a carrier.
    match rule.distinct_support {
        DistinctSupport::OnLine(slot) => {
            for &d in &distinct_objs {
                if st.table.sort(d) == Sort::Line {
                    prereqs.push(Literal::diagram(
                        false,
                        DiagramAtom::new(Pred::EqLine, &[arg_objs[slot as usize], d]),
                    ));
                }
            }
        }
        DistinctSupport::OnCircle(slot) => {
            for &d in &distinct_objs {
                if st.table.sort(d) == Sort::Circle {
                    prereqs.push(Literal::diagram(
                        false,
                        DiagramAtom::new(Pred::EqCircle, &[arg_objs[slot as usize], d]),
                    ));
                }
            }
        }
        _ => {}
    }
    // Prerequisites must be direct diagram or metric consequences; a
    // transfer conclusion has to be asserted as an explicit step first.
    for p in &prereqs {
        if st.established(p, false).is_none() {
            return Err(CheckError::new(
                span,
                format!(
                    "construction '{}' requires {}: not established",
                    rule.id,
                    st.lit_str(p)
                ),
            ));
        }
    }

    // Fresh outputs.
    let mut all = arg_objs.clone();
    for (name, (_, sort)) in outputs.iter().zip(&rule.outputs) {
        let o = st.register(name, *sort, span)?;
        all.push(o);
    }
    let mut concl: Vec<Literal> = rule
        .conclusions
        .iter()
        .map(|c| Literal::Diagram(instantiate_slit(c, &all)))
        .collect();
    // Distinctness conclusions are free choices attached to the new point.
    if rule.distinct_support != DistinctSupport::None {
        let out = *all.last().unwrap();
        for &d in &distinct_objs {
            let lit = match st.table.sort(d) {
                Sort::Point => Literal::diagram(false, DiagramAtom::new(Pred::EqPoint, &[out, d])),
                Sort::Line => Literal::diagram(false, DiagramAtom::new(Pred::OnLine, &[out, d])),
                Sort::Circle => {
                    Literal::diagram(false, DiagramAtom::new(Pred::OnCircle, &[out, d]))
                }
            };
            concl.push(lit);
        }
    }
    st.trace.push(StepTrace {
        span,
        what: format!("construction {} introduces {}", rule.id, outputs.join(", ")),
    });
    st.assimilate(&concl);
    st.delta.extend(concl);
    Ok(())
}

fn instantiate_slit(l: &SchematicLit, binding: &[Obj]) -> DiagramLit {
    let mut args = [Obj::NONE; 3];
    for (i, &slot) in l.var_slots().iter().enumerate() {
        args[i] = binding[slot as usize];
    }
    DiagramLit {
        pos: l.pos,
        atom: DiagramAtom::new(l.pred, &args[..l.pred.arity()]),
    }
}

#[allow(clippy::too_many_arguments)]
fn check_apply(
    st: &mut ProofState,
    span: Span,
    lib: &Library,
    self_index: usize,
    theorem: &str,
    args: &[String],
    outputs: &[(String, Sort)],
    selected: &Option<Vec<LitAst>>,
) -> Result<(), CheckError> {
    let (idx, entry) = lib
        .lookup(theorem)
        .map_err(|e| CheckError::new(span, e.to_string()))?;
    if idx >= self_index {
        return Err(CheckError::new(
            span,
            format!("theorem '{theorem}' is declared later and cannot be applied yet"),
        ));
    }
    match entry.status {
        EntryStatus::Assumed | EntryStatus::Proved { .. } => {}
        EntryStatus::Failed => {
            return Err(CheckError::new(
                span,
                format!("theorem '{theorem}' failed to check and cannot be applied"),
            ))
        }
        EntryStatus::Declared => {
            return Err(CheckError::new(
                span,
                format!("theorem '{theorem}' has not been checked yet"),
            ))
        }
    }
    let target = &entry.theorem;
    if args.len() != target.params.len() {
        return Err(CheckError::new(
            span,
            format!(
                "'{theorem}' takes {} argument(s), got {}",
                target.params.len(),
                args.len()
            ),
        ));
    }
    // Renaming of the theorem's free variables into the current scope.
    let mut map: std::collections::HashMap<String, Obj> = Default::default();
    for ((pname, psort), aname) in target.params.iter().zip(args) {
        let o = st.resolve_sorted(aname, *psort, span)?;
        map.insert(pname.clone(), o);
    }
    // Hypotheses must be direct diagram or metric consequences.
    for h in &target.assumes {
        let lit = instantiate_lit(st, h, &map, span)?;
        if st.established(&lit, false).is_none() {
            return Err(CheckError::new(
                span,
                format!(
                    "hypothesis of '{theorem}' not established: {}",
                    st.lit_str(&lit)
                ),
            ));
        }
    }
    // Witnesses: named positionally, `_` skips one.
    if outputs.len() != target.existentials.len() {
        return Err(CheckError::new(
            span,
            format!(
                "'{theorem}' constructs {} object(s), {} name(s) given",
                target.existentials.len(),
                outputs.len()
            ),
        ));
    }
    let mut skipped: Vec<&str> = Vec::new();
    for ((name, sort), (ename, esort)) in outputs.iter().zip(&target.existentials) {
        if name == "_" {
            skipped.push(ename);
            continue;
        }
        if sort != esort {
            return Err(CheckError::new(
                span,
                format!("witness '{name}' should be a {esort}, declared {sort}"),
            ));
        }
        let o = st.register(name, *sort, span)?;
        map.insert(ename.clone(), o);
    }
    let Some(concls) = &target.concludes else {
        // Applying an impossibility theorem refutes the configuration.
        st.trace.push(StepTrace {
            span,
            what: format!("apply {theorem}: contradiction"),
        });
        st.assimilate(&[Literal::Falsity]);
        return Ok(());
    };
    let mut addable: Vec<Literal> = Vec::new();
    'next: for c in concls {
        if let LitAst::Diagram { args, .. } = c {
            for a in args {
                if skipped.iter().any(|s| s == a) {
                    continue 'next;
                }
            }
        }
        if let LitAst::Metric { lhs, rhs, .. } = c {
            for t in [lhs, rhs] {
                for m in &t.summands {
                    let names: Vec<&String> = match m {
                        MagAtomAst::Seg(x, y) => vec![x, y],
                        MagAtomAst::Angle(x, y, z) | MagAtomAst::Area(x, y, z) => {
                            vec![x, y, z]
                        }
                        MagAtomAst::RightAngle => vec![],
                    };
                    if names.iter().any(|n| skipped.iter().any(|s| s == *n)) {
                        continue 'next;
                    }
                }
            }
        }
        addable.push(instantiate_lit(st, c, &map, span)?);
    }
    let additions: Vec<Literal> = match selected {
        None => addable,
        Some(sel) => {
            let normalized: Vec<Literal> = addable.iter().map(normalize_literal).collect();
            let mut picked = Vec::new();
            for s in sel {
                let lit = st.resolve_lit(s, span)?;
                let norm = normalize_literal(&lit);
                if !normalized.contains(&norm) {
                    return Err(CheckError::new(
                        span,
                        format!(
                            "'{}' is not among the conclusions of '{theorem}' under this \
                             instantiation",
                            st.lit_str(&lit)
                        ),
                    ));
                }
                picked.push(lit);
            }
            picked
        }
    };
    st.trace.push(StepTrace {
        span,
        what: format!("apply {theorem}"),
    });
    st.assimilate(&additions);
    st.delta.extend(additions);
    Ok(())
}

fn normalize_literal(l: &Literal) -> Literal {
    match l {
        Literal::Metric(m) => Literal::Metric(MetricLit {
            pos: m.pos,
            atom: m.atom.normalize(),
        }),
        other => other.clone(),
    }
}

fn instantiate_lit(
    _st: &ProofState,
    l: &LitAst,
    map: &std::collections::HashMap<String, Obj>,
    span: Span,
) -> Result<Literal, CheckError> {
    let get = |n: &String| -> Result<Obj, CheckError> {
        map.get(n)
            .copied()
            .ok_or_else(|| CheckError::new(span, format!("unbound theorem variable '{n}'")))
    };
    match l {
        LitAst::Falsity => Ok(Literal::Falsity),
        LitAst::Diagram { pos, pred, args } => {
            let mut objs = Vec::with_capacity(args.len());
            for a in args {
                objs.push(get(a)?);
            }
            Ok(Literal::diagram(*pos, DiagramAtom::new(*pred, &objs)))
        }
        LitAst::Metric { pos, rel, lhs, rhs } => {
            let conv = |t: &crate::ast::TermAst,
                        other: &crate::ast::TermAst|
             -> Result<MagnitudeTerm, CheckError> {
                let sort = t
                    .summands
                    .first()
                    .or(other.summands.first())
                    .map(|a| match a {
                        MagAtomAst::Seg(..) => MagSort::Segment,
                        MagAtomAst::Angle(..) | MagAtomAst::RightAngle => MagSort::Angle,
                        MagAtomAst::Area(..) => MagSort::Area,
                    })
                    .unwrap_or(MagSort::Segment);
                let mut atoms = Vec::new();
                for a in &t.summands {
                    atoms.push(match a {
                        MagAtomAst::Seg(x, y) => MagAtom::Seg(get(x)?, get(y)?),
                        MagAtomAst::Angle(x, y, z) => MagAtom::Angle(get(x)?, get(y)?, get(z)?),
                        MagAtomAst::Area(x, y, z) => MagAtom::Area(get(x)?, get(y)?, get(z)?),
                        MagAtomAst::RightAngle => MagAtom::RightAngle,
                    });
                }
                MagnitudeTerm::sum(sort, atoms).map_err(|e| CheckError::new(span, e))
            };
            let lhs_t = conv(lhs, rhs)?;
            let rhs_t = conv(rhs, lhs)?;
            let atom = MetricAtom::new(*rel, lhs_t, rhs_t).map_err(|e| CheckError::new(span, e))?;
            Ok(Literal::metric(*pos, atom))
        }
    }
}

fn check_cases(
    st: &mut ProofState,
    span: Span,
    on: &LitAst,
    pos_branch: &[Step],
    neg_branch: &[Step],
    lib: &Library,
    self_index: usize,
) -> Result<(), CheckError> {
    let lit = st.resolve_lit(on, span)?;
    if lit == Literal::Falsity {
        return Err(CheckError::new(
            span,
            "cannot case split on a contradiction",
        ));
    }
    let base_objs = st.table.len();
    let base_delta = st.delta.len();

    let mut b1 = st.clone();
    b1.assimilate(std::slice::from_ref(&lit));
    check_steps(&mut b1, pos_branch, lib, self_index)?;

    let mut b2 = st.clone();
    let neg = lit.negated();
    b2.assimilate(std::slice::from_ref(&neg));
    check_steps(&mut b2, neg_branch, lib, self_index)?;

    st.trace = b1.trace.clone();
    st.trace.extend(
        b2.trace
            .iter()
            .skip(st.trace.len().min(b2.trace.len()))
            .cloned(),
    );
    st.trace.push(StepTrace {
        span,
        what: format!("case split on {}", st.lit_str(&lit)),
    });

    match (b1.inconsistent, b2.inconsistent) {
        (true, true) => {
            st.assimilate(&[Literal::Falsity]);
            Ok(())
        }
        (true, false) => export_whole_branch(st, &b2, base_objs, base_delta, span),
        (false, true) => export_whole_branch(st, &b1, base_objs, base_delta, span),
        (false, false) => export_common(st, &b1, &b2, base_objs, base_delta, span),
    }
}

/// The other branch is contradictory: this branch's additions hold
/// outright. Object ids line up because the branch started as a clone.
fn export_whole_branch(
    st: &mut ProofState,
    branch: &ProofState,
    base_objs: usize,
    base_delta: usize,
    span: Span,
) -> Result<(), CheckError> {
    for (o, name, sort) in branch.table.iter() {
        if (o.0 as usize) >= base_objs {
            st.register(name, sort, span)?;
        }
    }
    let additions: Vec<Literal> = branch.delta[base_delta..].to_vec();
    st.assimilate(&additions);
    st.delta.extend(additions);
    Ok(())
}

/// Both branches are live: export witnesses constructed in both branches
/// under the same names, plus every addition established in both.
fn export_common(
    st: &mut ProofState,
    b1: &ProofState,
    b2: &ProofState,
    base_objs: usize,
    base_delta: usize,
    span: Span,
) -> Result<(), CheckError> {
    use std::collections::HashMap;
    let mut b2_new: HashMap<(String, Sort), Obj> = HashMap::new();
    for (o, name, sort) in b2.table.iter() {
        if (o.0 as usize) >= base_objs {
            b2_new.insert((name.to_string(), sort), o);
        }
    }
    // Common witnesses in b1 registration order; map both branches' ids to
    // the outer ids.
    let mut b1_to_outer: HashMap<Obj, Obj> = HashMap::new();
    let mut outer_to_b2: HashMap<Obj, Obj> = HashMap::new();
    for (o, name, sort) in b1.table.iter() {
        if (o.0 as usize) < base_objs {
            b1_to_outer.insert(o, o);
            outer_to_b2.insert(o, o);
            continue;
        }
        if let Some(&o2) = b2_new.get(&(name.to_string(), sort)) {
            let outer = st.register(name, sort, span)?;
            b1_to_outer.insert(o, outer);
            outer_to_b2.insert(outer, o2);
        }
    }
    let mut additions: Vec<Literal> = Vec::new();
    let mut b2_check = b2.clone();
    for cand in &b1.delta[base_delta..] {
        let Some(outer_lit) = remap_literal(cand, &b1_to_outer) else {
            continue;
        };
        let Some(b2_lit) = remap_literal(&outer_lit, &outer_to_b2) else {
            continue;
        };
        let ok = match &b2_lit {
            Literal::Diagram(d) => b2_check.diagram.is_direct_consequence(*d),
            Literal::Metric(m) => b2_check.metric.entails(m),
            Literal::Falsity => false,
        };
        if ok {
            additions.push(outer_lit);
        }
    }
    st.assimilate(&additions);
    st.delta.extend(additions);
    Ok(())
}

fn remap_literal(l: &Literal, map: &std::collections::HashMap<Obj, Obj>) -> Option<Literal> {
    let m = |o: Obj| map.get(&o).copied();
    match l {
        Literal::Falsity => Some(Literal::Falsity),
        Literal::Diagram(d) => {
            let mut args = Vec::new();
            for &a in d.atom.args() {
                args.push(m(a)?);
            }
            Some(Literal::diagram(
                d.pos,
                DiagramAtom::new(d.atom.pred, &args),
            ))
        }
        Literal::Metric(mt) => {
            let conv = |t: &MagnitudeTerm| -> Option<MagnitudeTerm> {
                let mut atoms = Vec::new();
                for a in &t.summands {
                    atoms.push(match *a {
                        MagAtom::Seg(x, y) => MagAtom::Seg(m(x)?, m(y)?),
                        MagAtom::Angle(x, y, z) => MagAtom::Angle(m(x)?, m(y)?, m(z)?),
                        MagAtom::Area(x, y, z) => MagAtom::Area(m(x)?, m(y)?, m(z)?),
                        MagAtom::RightAngle => MagAtom::RightAngle,
                    });
                }
                Some(MagnitudeTerm {
                    sort: t.sort,
                    summands: atoms,
                })
            };
            Some(Literal::Metric(MetricLit {
                pos: mt.pos,
                atom: MetricAtom {
                    rel: mt.atom.rel,
                    lhs: conv(&mt.atom.lhs)?,
                    rhs: conv(&mt.atom.rhs)?,
                },
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_superpose(
    st: &mut ProofState,
    span: Span,
    kind: SuperKind,
    args: &[String],
    primed: &[String],
    body: &[Step],
    conclude: &[LitAst],
    lib: &Library,
    self_index: usize,
) -> Result<(), CheckError> {
    if args.len() != 7 || primed.len() != 3 {
        return Err(CheckError::new(
            span,
            "superposition takes seven arguments (a, b, c, d, g, L, h) and three primed names",
        ));
    }
    let p = |st: &ProofState, n: &String| st.resolve_sorted(n, Sort::Point, span);
    let a = p(st, &args[0])?;
    let b = p(st, &args[1])?;
    let c = p(st, &args[2])?;
    let d = p(st, &args[3])?;
    let g = p(st, &args[4])?;
    let l = st.resolve_sorted(&args[5], Sort::Line, span)?;
    let h = p(st, &args[6])?;

    // Prerequisites: abc distinct and noncollinear, g gives the direction
    // on L, h picks the side.
    let mut prereqs = vec![
        Literal::diagram(false, DiagramAtom::new(Pred::EqPoint, &[a, b])),
        Literal::diagram(false, DiagramAtom::new(Pred::EqPoint, &[a, c])),
        Literal::diagram(false, DiagramAtom::new(Pred::EqPoint, &[b, c])),
        Literal::diagram(false, DiagramAtom::new(Pred::EqPoint, &[d, g])),
        Literal::diagram(true, DiagramAtom::new(Pred::OnLine, &[d, l])),
        Literal::diagram(true, DiagramAtom::new(Pred::OnLine, &[g, l])),
        Literal::diagram(false, DiagramAtom::new(Pred::OnLine, &[h, l])),
    ];
    for pre in prereqs.drain(..) {
        if st.established(&pre, false).is_none() {
            return Err(CheckError::new(
                span,
                format!(
                    "superposition requires {}: not established",
                    st.lit_str(&pre)
                ),
            ));
        }
    }
    let mut noncollinear = false;
    'nc: for (lo, _, sort) in st.table.iter() {
        if sort != Sort::Line {
            continue;
        }
        for (x, y, z) in [(a, b, c), (b, c, a), (a, c, b)] {
            let on1 = DiagramLit::pos(DiagramAtom::new(Pred::OnLine, &[x, lo]));
            let on2 = DiagramLit::pos(DiagramAtom::new(Pred::OnLine, &[y, lo]));
            let off = DiagramLit::neg(DiagramAtom::new(Pred::OnLine, &[z, lo]));
            if st.diagram.contains(&on1) && st.diagram.contains(&on2) && st.diagram.contains(&off) {
                noncollinear = true;
                break 'nc;
            }
        }
    }
    if !noncollinear && !st.inconsistent {
        return Err(CheckError::new(
            span,
            "superposition requires a line witnessing that the triangle is noncollinear",
        ));
    }

    let base_objs = st.table.len();
    let mut inner = st.clone();
    let ap = inner.register(&primed[0], Sort::Point, span)?;
    let bp = inner.register(&primed[1], Sort::Point, span)?;
    let cp = inner.register(&primed[2], Sort::Point, span)?;
    let seg_eq = |x: Obj, y: Obj, u: Obj, v: Obj| {
        Literal::metric(
            true,
            MetricAtom {
                rel: crate::lang::MetricRel::Eq,
                lhs: MagnitudeTerm::atom(MagAtom::Seg(x, y)),
                rhs: MagnitudeTerm::atom(MagAtom::Seg(u, v)),
            }
            .normalize(),
        )
    };
    let mut pi = vec![
        Literal::diagram(true, DiagramAtom::new(Pred::EqPoint, &[ap, d])),
        Literal::diagram(true, DiagramAtom::new(Pred::OnLine, &[bp, l])),
        Literal::diagram(false, DiagramAtom::new(Pred::Between, &[bp, d, g])),
        Literal::diagram(true, DiagramAtom::new(Pred::SameSide, &[cp, h, l])),
    ];
    match kind {
        SuperKind::Sas => {
            pi.push(Literal::metric(
                true,
                MetricAtom {
                    rel: crate::lang::MetricRel::Eq,
                    lhs: MagnitudeTerm::atom(MagAtom::Angle(ap, bp, cp)),
                    rhs: MagnitudeTerm::atom(MagAtom::Angle(a, b, c)),
                }
                .normalize(),
            ));
        }
        SuperKind::Sss => {
            pi.push(seg_eq(a, b, ap, bp));
            pi.push(seg_eq(b, c, bp, cp));
            pi.push(seg_eq(c, a, cp, ap));
        }
    }
    inner.assimilate(&pi);
    check_steps(&mut inner, body, lib, self_index)?;

    let mut exports = Vec::new();
    for lit_ast in conclude {
        let lit = inner.resolve_lit(lit_ast, span)?;
        if lit.objects().iter().any(|o| (o.0 as usize) >= base_objs) {
            return Err(CheckError::new(
                span,
                format!(
                    "superposition may only conclude facts about pre-existing objects: {}",
                    render::lit_str(&lit, &inner.table)
                ),
            ));
        }
        let ok = match &lit {
            Literal::Diagram(dl) => inner.diagram.is_direct_consequence(*dl) || inner.inconsistent,
            Literal::Metric(m) => inner.inconsistent || inner.metric.entails(m),
            Literal::Falsity => inner.inconsistent,
        };
        if !ok {
            return Err(CheckError::new(
                span,
                format!(
                    "superposition conclusion not established: {}",
                    render::lit_str(&lit, &inner.table)
                ),
            ));
        }
        exports.push(lit);
    }
    st.trace = inner.trace.clone();
    st.trace.push(StepTrace {
        span,
        what: format!(
            "superpose-{} exports {} conclusion(s)",
            match kind {
                SuperKind::Sas => "sas",
                SuperKind::Sss => "sss",
            },
            exports.len()
        ),
    });
    st.assimilate(&exports);
    st.delta.extend(exports);
    Ok(())
}

/// The final check: find a map from the existential variables to in-scope
/// objects under which every conclusion is contained in, or a direct
/// diagrammatic consequence of, the established facts.
fn qed_check(
    st: &mut ProofState,
    thm: &TheoremAst,
    _mode: QedMode,
    span: Span,
) -> Result<(), CheckError> {
    let Some(concls) = &thm.concludes else {
        if st.inconsistent {
            return Ok(());
        }
        return Err(CheckError::new(
            span,
            "the theorem concludes a contradiction but the state is consistent",
        ));
    };
    if st.inconsistent {
        // Everything follows from an inconsistent hypothesis set.
        return Ok(());
    }
    let mut map: std::collections::HashMap<String, Obj> = Default::default();
    for (n, s) in &thm.params {
        map.insert(n.clone(), st.resolve_sorted(n, *s, span)?);
    }
    let exis = &thm.existentials;
    let mut failure: Option<String> = None;
    if search_mapping(st, exis, 0, concls, &mut map, span, &mut failure)? {
        return Ok(());
    }
    Err(CheckError::new(
        span,
        match failure {
            Some(f) => {
                format!("no witness mapping satisfies the conclusions; first unsatisfied: {f}")
            }
            None => "no witness mapping satisfies the conclusions".to_string(),
        },
    ))
}

fn search_mapping(
    st: &mut ProofState,
    exis: &[(String, Sort)],
    i: usize,
    concls: &[LitAst],
    map: &mut std::collections::HashMap<String, Obj>,
    span: Span,
    failure: &mut Option<String>,
) -> Result<bool, CheckError> {
    if i == exis.len() {
        for c in concls {
            let lit = instantiate_lit(st, c, map, span)?;
            let ok = match &lit {
                Literal::Diagram(d) => st.diagram.is_direct_consequence(*d),
                Literal::Metric(m) => st.metric.contains_fact(m),
                Literal::Falsity => st.inconsistent,
            };
            if !ok {
                if failure.is_none() {
                    *failure = Some(st.lit_str(&lit));
                }
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let (name, sort) = &exis[i];
    let candidates: Vec<Obj> = st.table.objects_of(*sort).collect();
    for o in candidates {
        map.insert(name.clone(), o);
        if search_mapping(st, exis, i + 1, concls, map, span, failure)? {
            return Ok(true);
        }
    }
    map.remove(name);
    Ok(false)
}

/// Result of checking a whole script against a pre-loaded library.
#[derive(Debug, Clone)]
pub struct ScriptReport {
    pub verdicts: Vec<TheoremVerdict>,
}

impl ScriptReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Registers and checks every theorem of a script in order. Assumed
/// statements are registered without proof; proved theorems become
/// applicable to later ones. Returns one verdict per theorem, in script
/// order.
///
/// After the sequential registration pass, theorems whose dependencies are
/// settled check independently; with the `parallel` feature they run in
/// waves on the rayon pool. Verdicts are identical either way.
pub fn check_script(script: &ProofScript, lib: &mut Library, source: &str) -> ScriptReport {
    let mut verdicts: Vec<Option<TheoremVerdict>> = vec![None; script.theorems.len()];
    let mut indices = Vec::new();
    for (vi, thm) in script.theorems.iter().enumerate() {
        let status = match thm.status {
            TheoremStatus::Assumed => EntryStatus::Assumed,
            TheoremStatus::Proved => EntryStatus::Declared,
        };
        match lib.register(crate::library::LibraryEntry {
            theorem: thm.clone(),
            status,
            provenance: source.to_string(),
        }) {
            Ok(idx) => indices.push(Some(idx)),
            Err(e) => {
                indices.push(None);
                verdicts[vi] = Some(TheoremVerdict {
                    name: thm.name.clone(),
                    passed: false,
                    assumed: false,
                    error: Some(CheckError::new(thm.span, e.to_string())),
                    millis: 0,
                    trace: Vec::new(),
                });
            }
        }
        if thm.status == TheoremStatus::Assumed && verdicts[vi].is_none() {
            verdicts[vi] = Some(TheoremVerdict {
                name: thm.name.clone(),
                passed: true,
                assumed: true,
                error: None,
                millis: 0,
                trace: Vec::new(),
            });
        }
    }
    // Dependency names used by each theorem's proof.
    let mut deps: Vec<Vec<String>> = Vec::with_capacity(script.theorems.len());
    for thm in &script.theorems {
        let mut names = Vec::new();
        collect_applied(&thm.proof, &mut names);
        deps.push(names);
    }
    let mut done: Vec<bool> = verdicts.iter().map(|v| v.is_some()).collect();
    loop {
        let wave: Vec<usize> = (0..script.theorems.len())
            .filter(|&i| {
                !done[i]
                    && indices[i].is_some()
                    && deps[i].iter().all(|d| {
                        // A dependency registered by this script must have
                        // been checked already; everything else is settled.
                        match script.theorems.iter().position(|t| t.name == *d) {
                            Some(j) => done[j],
                            None => true,
                        }
                    })
            })
            .collect();
        if wave.is_empty() {
            break;
        }
        let results: Vec<(usize, TheoremVerdict, bool)> = run_wave(script, lib, &wave, &indices);
        for (i, v, passed) in results {
            let idx = indices[i].unwrap();
            lib.set_status(
                idx,
                if passed {
                    EntryStatus::Proved {
                        check_hash: crate::library::source_hash(&format!(
                            "{:?}",
                            script.theorems[i]
                        )),
                    }
                } else {
                    EntryStatus::Failed
                },
            );
            verdicts[i] = Some(v);
            done[i] = true;
        }
    }
    // Anything left is stuck on a cyclic or failed-to-register dependency.
    for (i, thm) in script.theorems.iter().enumerate() {
        if verdicts[i].is_none() {
            verdicts[i] = Some(TheoremVerdict {
                name: thm.name.clone(),
                passed: false,
                assumed: false,
                error: Some(CheckError::new(
                    thm.span,
                    "unresolvable dependencies (cycle or unregistered theorem)",
                )),
                millis: 0,
                trace: Vec::new(),
            });
        }
    }
    ScriptReport {
        verdicts: verdicts.into_iter().map(Option::unwrap).collect(),
    }
}

fn check_one(
    script: &ProofScript,
    lib: &Library,
    i: usize,
    idx: usize,
) -> (usize, TheoremVerdict, bool) {
    let thm = &script.theorems[i];
    let start = std::time::Instant::now();
    let res = check_theorem(lib, idx, thm);
    let millis = start.elapsed().as_millis();
    match res {
        Ok(trace) => (
            i,
            TheoremVerdict {
                name: thm.name.clone(),
                passed: true,
                assumed: false,
                error: None,
                millis,
                trace,
            },
            true,
        ),
        Err(e) => (
            i,
            TheoremVerdict {
                name: thm.name.clone(),
                passed: false,
                assumed: false,
                error: Some(e),
                millis,
                trace: Vec::new(),
            },
            false,
        ),
    }
}

#[cfg(feature = "parallel")]
fn run_wave(
    script: &ProofScript,
    lib: &Library,
    wave: &[usize],
    indices: &[Option<usize>],
) -> Vec<(usize, TheoremVerdict, bool)> {
    use rayon::prelude::*;
    wave.par_iter()
        .map(|&i| check_one(script, lib, i, indices[i].unwrap()))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_wave(
    script: &ProofScript,
    lib: &Library,
    wave: &[usize],
    indices: &[Option<usize>],
) -> Vec<(usize, TheoremVerdict, bool)> {
    wave.iter()
        .map(|&i| check_one(script, lib, i, indices[i].unwrap()))
        .collect()
}

fn collect_applied(steps: &[Step], out: &mut Vec<String>) {
    for s in steps {
        match &s.kind {
            StepKind::Apply { theorem, .. } => out.push(theorem.clone()),
            StepKind::Suppose { body, .. } => collect_applied(body, out),
            StepKind::Cases {
                pos_branch,
                neg_branch,
                ..
            } => {
                collect_applied(pos_branch, out);
                collect_applied(neg_branch, out);
            }
            StepKind::Superpose { body, .. } => collect_applied(body, out),
            _ => {}
        }
    }
}
