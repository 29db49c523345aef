//! Direct metric consequence: quantifier-free entailment over the
//! nonnegative part of a linearly ordered abelian group, extended with the
//! axioms linking magnitudes to point identities.
//!
//! Each canonical atomic magnitude becomes one nonnegative unknown and
//! entailment is decided refutationally: the context plus the negated goal
//! is checked for infeasibility by Fourier–Motzkin elimination with exact
//! rational arithmetic, strict and non-strict inequalities tracked
//! separately. Negated equality facts are non-convex and split into the
//! two strict orderings.

use crate::lang::{MagAtom, MagnitudeTerm, MetricAtom, MetricLit, MetricRel, Obj};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Exact rational coefficients. The solver runs on machine-word rationals
/// and falls back to arbitrary precision if anything overflows.
pub(crate) trait Coef: Clone + PartialEq + Sized {
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn recip_abs(&self) -> Option<Self>;
    fn from_small(s: &SmallRat) -> Self;
}

impl Coef for BigRational {
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn recip_abs(&self) -> Option<Self> {
        Some(self.abs().recip())
    }
    fn from_small(s: &SmallRat) -> Self {
        BigRational::new(BigInt::from(s.n), BigInt::from(s.d))
    }
}

/// Reduced fraction over i128 with overflow-checked arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct SmallRat {
    n: i128,
    d: i128, // always > 0
}

impl SmallRat {
    fn int(n: i64) -> SmallRat {
        SmallRat { n: n as i128, d: 1 }
    }
}

impl SmallRat {
    fn reduce(n: i128, d: i128) -> Option<SmallRat> {
        if d == 0 {
            return None;
        }
        let g = gcd_i128(n.unsigned_abs(), d.unsigned_abs()) as i128;
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(SmallRat { n, d })
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl Coef for SmallRat {
    fn one() -> Self {
        SmallRat { n: 1, d: 1 }
    }
    fn is_zero(&self) -> bool {
        self.n == 0
    }
    fn is_positive(&self) -> bool {
        self.n > 0
    }
    fn is_negative(&self) -> bool {
        self.n < 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        let n = self
            .n
            .checked_mul(o.d)?
            .checked_add(o.n.checked_mul(self.d)?)?;
        let d = self.d.checked_mul(o.d)?;
        SmallRat::reduce(n, d)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        SmallRat::reduce(self.n.checked_mul(o.n)?, self.d.checked_mul(o.d)?)
    }
    fn neg(&self) -> Self {
        SmallRat {
            n: -self.n,
            d: self.d,
        }
    }
    fn recip_abs(&self) -> Option<Self> {
        if self.n == 0 {
            None
        } else {
            SmallRat::reduce(self.d, self.n.abs())
        }
    }
    fn from_small(s: &SmallRat) -> Self {
        *s
    }
}

/// A linear expression over magnitude unknowns. Construction-time
/// coefficients are tiny (sums of ±1), so machine rationals suffice here;
/// only elimination can overflow, and that path falls back to bignums.
#[derive(Debug, Clone, PartialEq, Eq)]
struct LinExpr {
    coeffs: BTreeMap<MagAtom, SmallRat>,
    constant: SmallRat,
}

impl LinExpr {
    fn zero() -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: SmallRat::int(0),
        }
    }

    fn var(a: MagAtom) -> Self {
        let mut e = Self::zero();
        e.coeffs.insert(a, SmallRat::int(1));
        e
    }

    fn constant(c: SmallRat) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    fn add_term(&mut self, a: &MagAtom, c: &SmallRat) {
        let entry = self.coeffs.entry(*a).or_insert(SmallRat { n: 0, d: 1 });
        *entry = entry.add(c).expect("tiny build-time coefficients");
        if entry.is_zero() {
            self.coeffs.remove(a);
        }
    }

    fn sub(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a, &c.neg());
        }
        out.constant = out
            .constant
            .add(&other.constant.neg())
            .expect("tiny build-time coefficients");
        out
    }

    fn scale(&self, k: &SmallRat) -> LinExpr {
        let mut out = Self::zero();
        for (a, c) in &self.coeffs {
            out.coeffs
                .insert(*a, c.mul(k).expect("tiny build-time coefficients"));
        }
        out.constant = self.constant.mul(k).expect("tiny build-time coefficients");
        out
    }

    fn of_term(t: &MagnitudeTerm) -> LinExpr {
        let mut e = Self::zero();
        for a in &t.summands {
            e.add_term(a, &SmallRat::int(1));
        }
        e
    }
}

/// expr ⋈ 0 with ⋈ ∈ {=, ≥, >}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ConOp {
    Eq0,
    Ge0,
    Gt0,
}

#[derive(Debug, Clone)]
struct Constraint {
    expr: LinExpr,
    op: ConOp,
}

impl Constraint {
    fn key(&self) -> (Vec<(MagAtom, SmallRat)>, SmallRat, ConOp) {
        (
            self.expr.coeffs.iter().map(|(a, c)| (*a, *c)).collect(),
            self.expr.constant,
            self.op,
        )
    }
}

/// Feasibility of a rational constraint system by Fourier–Motzkin.
///
/// The nominal elimination order is over the unknowns (ascending
/// canonical-atom order in the main solver; the test oracle reimplements
/// this with the reverse order); among the not-yet-eliminated variables the
/// cheapest (fewest bound pairs) is taken first, which changes nothing
/// about the answer and keeps intermediate systems small. Runs on
/// machine-word rationals first and falls back to arbitrary precision on
/// overflow.
fn feasible(cons: Vec<Constraint>, mut order: Vec<MagAtom>, ascending: bool) -> bool {
    order.sort();
    if !ascending {
        order.reverse();
    }
    let small: Vec<GCons<SmallRat>> = cons.iter().map(gcons_from).collect();
    if let Some(ans) = feasible_core(small, &order) {
        return ans;
    }
    let big: Vec<GCons<BigRational>> = cons.iter().map(gcons_from).collect();
    feasible_core(big, &order).expect("bignum arithmetic does not overflow")
}

/// One constraint with coefficients in sorted (atom, coefficient) form.
#[derive(Clone, PartialEq)]
struct GCons<T> {
    coeffs: Vec<(MagAtom, T)>,
    constant: T,
    op: ConOp,
}

fn gcons_from<T: Coef>(c: &Constraint) -> GCons<T> {
    let coeffs = c
        .expr
        .coeffs
        .iter()
        .map(|(a, v)| (*a, T::from_small(v)))
        .collect();
    GCons {
        coeffs,
        constant: T::from_small(&c.expr.constant),
        op: c.op,
    }
}

fn gcoeff<'a, T: Coef>(c: &'a GCons<T>, var: &MagAtom) -> Option<&'a T> {
    c.coeffs
        .binary_search_by(|(a, _)| a.cmp(var))
        .ok()
        .map(|i| &c.coeffs[i].1)
}

/// c1 + c2 * k, dropping var (known to cancel).
fn gcombine<T: Coef>(
    c1: &GCons<T>,
    c2: &GCons<T>,
    k1: &T,
    k2: &T,
    var: &MagAtom,
    op: ConOp,
) -> Option<GCons<T>> {
    let mut coeffs: Vec<(MagAtom, T)> = Vec::with_capacity(c1.coeffs.len() + c2.coeffs.len());
    let (mut i, mut j) = (0, 0);
    while i < c1.coeffs.len() || j < c2.coeffs.len() {
        let pick1 =
            j >= c2.coeffs.len() || (i < c1.coeffs.len() && c1.coeffs[i].0 <= c2.coeffs[j].0);
        let pick2 =
            i >= c1.coeffs.len() || (j < c2.coeffs.len() && c2.coeffs[j].0 <= c1.coeffs[i].0);
        if pick1 && pick2 {
            let a = c1.coeffs[i].0;
            let v = c1.coeffs[i].1.mul(k1)?.add(&c2.coeffs[j].1.mul(k2)?)?;
            if !v.is_zero() && a != *var {
                coeffs.push((a, v));
            }
            i += 1;
            j += 1;
        } else if pick1 {
            let a = c1.coeffs[i].0;
            let v = c1.coeffs[i].1.mul(k1)?;
            if !v.is_zero() && a != *var {
                coeffs.push((a, v));
            }
            i += 1;
        } else {
            let a = c2.coeffs[j].0;
            let v = c2.coeffs[j].1.mul(k2)?;
            if !v.is_zero() && a != *var {
                coeffs.push((a, v));
            }
            j += 1;
        }
    }
    Some(GCons {
        coeffs,
        constant: c1.constant.mul(k1)?.add(&c2.constant.mul(k2)?)?,
        op,
    })
}

/// Canonical scaling (leading coefficient ±1) for deduplication.
fn gcanon<T: Coef>(mut c: GCons<T>) -> Option<GCons<T>> {
    if let Some((_, k)) = c.coeffs.first() {
        let r = k.recip_abs()?;
        for (_, v) in c.coeffs.iter_mut() {
            *v = v.mul(&r)?;
        }
        c.constant = c.constant.mul(&r)?;
    }
    Some(c)
}

fn gdedup<T: Coef>(cons: Vec<GCons<T>>) -> Option<Vec<GCons<T>>> {
    let mut out: Vec<GCons<T>> = Vec::with_capacity(cons.len());
    'outer: for c in cons {
        if c.coeffs.is_empty() {
            let ok = match c.op {
                ConOp::Eq0 => c.constant.is_zero(),
                ConOp::Ge0 => !c.constant.is_negative(),
                ConOp::Gt0 => c.constant.is_positive(),
            };
            if ok {
                continue;
            }
        }
        let c = gcanon(c)?;
        for prev in &out {
            if prev.op == c.op && prev.coeffs == c.coeffs && prev.constant == c.constant {
                continue 'outer;
            }
        }
        out.push(c);
    }
    Some(out)
}

/// Returns None on arithmetic overflow (small-rational path only).
fn feasible_core<T: Coef>(mut cons: Vec<GCons<T>>, order: &[MagAtom]) -> Option<bool> {
    cons = gdedup(cons)?;
    let mut remaining: Vec<MagAtom> = order.to_vec();
    while !remaining.is_empty() {
        // Pick the cheapest variable to eliminate next: one in an equality
        // if possible, else the one minimizing the lower×upper product.
        let mut best_idx = 0usize;
        let mut best_cost = u64::MAX;
        for (i, var) in remaining.iter().enumerate() {
            let mut eq = false;
            let (mut lo, mut hi) = (0u64, 0u64);
            for c in &cons {
                if let Some(k) = gcoeff(c, var) {
                    if c.op == ConOp::Eq0 {
                        eq = true;
                        break;
                    }
                    if k.is_positive() {
                        lo += 1;
                    } else {
                        hi += 1;
                    }
                }
            }
            let cost = if eq { 0 } else { lo * hi };
            if cost < best_cost {
                best_cost = cost;
                best_idx = i;
                if cost == 0 && eq {
                    break;
                }
            }
        }
        let var = remaining.remove(best_idx);
        if let Some(pos) = cons
            .iter()
            .position(|c| c.op == ConOp::Eq0 && gcoeff(c, &var).is_some())
        {
            let eq = cons.swap_remove(pos);
            let cv = gcoeff(&eq, &var).unwrap().clone();
            let mut next = Vec::with_capacity(cons.len());
            for c in cons {
                if let Some(k) = gcoeff(&c, &var) {
                    // c - (k/cv) * eq
                    let factor = k.mul(&cv.recip_abs()?)?;
                    let factor = if cv.is_negative() {
                        factor
                    } else {
                        factor.neg()
                    };
                    let combined = gcombine(&c, &eq, &T::one(), &factor, &var, c.op)?;
                    next.push(combined);
                } else {
                    next.push(c);
                }
            }
            cons = gdedup(next)?;
            continue;
        }
        let mut lower: Vec<GCons<T>> = Vec::new();
        let mut upper: Vec<GCons<T>> = Vec::new();
        let mut rest: Vec<GCons<T>> = Vec::new();
        for c in cons {
            match gcoeff(&c, &var) {
                Some(k) if k.is_positive() => lower.push(c),
                Some(_) => upper.push(c),
                None => rest.push(c),
            }
        }
        for lo in &lower {
            for hi in &upper {
                let kl = gcoeff(lo, &var).unwrap().clone();
                let kh = gcoeff(hi, &var).unwrap().neg();
                let op = if lo.op == ConOp::Gt0 || hi.op == ConOp::Gt0 {
                    ConOp::Gt0
                } else {
                    ConOp::Ge0
                };
                rest.push(gcombine(lo, hi, &kh, &kl, &var, op)?);
            }
        }
        cons = gdedup(rest)?;
    }
    Some(cons.iter().all(|c| {
        let k = &c.constant;
        match c.op {
            ConOp::Eq0 => k.is_zero(),
            ConOp::Ge0 => !k.is_negative(),
            ConOp::Gt0 => k.is_positive(),
        }
    }))
}

fn dedup(cons: Vec<Constraint>) -> Vec<Constraint> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(cons.len());
    for c in cons {
        // Drop trivially true ground constraints early.
        if c.expr.coeffs.is_empty() {
            let ok = match c.op {
                ConOp::Eq0 => c.expr.constant.is_zero(),
                ConOp::Ge0 => !c.expr.constant.is_negative(),
                ConOp::Gt0 => c.expr.constant.is_positive(),
            };
            if ok {
                continue;
            }
        }
        let k = c.key();
        if seen.insert(k) {
            out.push(c);
        }
    }
    out
}

/// The metric fact store for one proof check.
#[derive(Debug, Clone, Default)]
pub struct MetricContext {
    /// Union-find over points, kept in sync with the diagram side.
    parent: Vec<u32>,
    facts: Vec<MetricLit>,
    /// Rep-canonical unordered point pairs known distinct.
    diseqs: HashSet<(Obj, Obj)>,
    /// Area equalities added by the triangle-congruence trigger.
    congruence_cache: Vec<MetricAtom>,
    /// Bumped on any change; lets the point-identity sweep and the
    /// consistency check skip recomputation.
    version: u64,
    derive_done_at: u64,
    inconsistent_at: Option<(u64, bool)>,
    /// Version-stamped cache of rep-normalized facts.
    norm_facts: std::cell::RefCell<(u64, HashSet<MetricLit>)>,
    /// Version up to which the congruence trigger has searched.
    congruence_searched_at: std::cell::Cell<u64>,
}

impl MetricContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_point(&mut self) {
        self.parent.push(self.parent.len() as u32);
    }

    pub fn sync_object_count(&mut self, n: usize) {
        while self.parent.len() < n {
            self.register_point();
        }
    }

    pub fn rep(&self, o: Obj) -> Obj {
        if o.0 as usize >= self.parent.len() {
            return o;
        }
        let mut x = o.0;
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        Obj(x)
    }

    pub fn merge_points(&mut self, a: Obj, b: Obj) {
        self.sync_object_count(a.0.max(b.0) as usize + 1);
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[drop.0 as usize] = keep.0;
            self.version += 1;
        }
    }

    pub fn add_diseq(&mut self, a: Obj, b: Obj) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        let key = if ra < rb { (ra, rb) } else { (rb, ra) };
        if self.diseqs.insert(key) {
            self.version += 1;
        }
    }

    pub fn has_diseq(&self, a: Obj, b: Obj) -> bool {
        let (ra, rb) = (self.rep(a), self.rep(b));
        let key = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.diseqs.contains(&key)
    }

    /// Adds a normalized metric literal as a fact.
    pub fn add_fact(&mut self, lit: MetricLit) {
        let lit = MetricLit {
            pos: lit.pos,
            atom: lit.atom.normalize(),
        };
        if !self.facts.contains(&lit) {
            self.facts.push(lit);
            self.version += 1;
        }
    }

    pub fn facts(&self) -> &[MetricLit] {
        &self.facts
    }

    fn norm_term(&self, t: &MagnitudeTerm) -> MagnitudeTerm {
        t.normalize_under(&|o| self.rep(o))
    }

    /// Rep-normalized fact set, rebuilt when the context changes.
    fn normalized_fact_set(&self) -> std::cell::Ref<'_, (u64, HashSet<MetricLit>)> {
        {
            let mut cache = self.norm_facts.borrow_mut();
            if cache.0 != self.version || (cache.1.is_empty() && !self.facts.is_empty()) {
                let set: HashSet<MetricLit> = self
                    .facts
                    .iter()
                    .map(|f| MetricLit {
                        pos: f.pos,
                        atom: self.norm_atom(&f.atom),
                    })
                    .collect();
                *cache = (self.version, set);
            }
        }
        self.norm_facts.borrow()
    }

    fn norm_atom(&self, a: &MetricAtom) -> MetricAtom {
        MetricAtom {
            rel: a.rel,
            lhs: self.norm_term(&a.lhs),
            rhs: self.norm_term(&a.rhs),
        }
        .normalize()
    }

    /// Membership up to normalization: used by the Q.E.D. check, which
    /// requires metric conclusions to have been asserted, not merely to be
    /// entailed.
    pub fn contains_fact(&self, lit: &MetricLit) -> bool {
        let want = MetricLit {
            pos: lit.pos,
            atom: self.norm_atom(&lit.atom),
        };
        self.normalized_fact_set().1.contains(&want)
    }

    /// All canonical atoms appearing in the given normalized atoms.
    fn registered_atoms(&self, extra: &[MetricAtom]) -> BTreeSet<MagAtom> {
        let mut vars = BTreeSet::new();
        let mut visit = |a: &MetricAtom| {
            for t in [&a.lhs, &a.rhs] {
                for s in &t.summands {
                    vars.insert(*s);
                }
            }
        };
        for f in &self.facts {
            visit(&self.norm_atom(&f.atom));
        }
        for a in &self.congruence_cache {
            visit(a);
        }
        for a in extra {
            visit(a);
        }
        vars
    }

    /// Background constraints: nonnegativity, a positive right angle, the
    /// two-right-angles upper bound for angles with apex-distinctness
    /// guards, and positivity of segments between known-distinct points.
    fn background(&self, vars: &BTreeSet<MagAtom>) -> Vec<Constraint> {
        let mut out = Vec::new();
        for v in vars {
            out.push(Constraint {
                expr: LinExpr::var(*v),
                op: if *v == MagAtom::RightAngle {
                    ConOp::Gt0
                } else {
                    ConOp::Ge0
                },
            });
            match *v {
                MagAtom::Seg(a, b) => {
                    if self.has_diseq(a, b) {
                        out.push(Constraint {
                            expr: LinExpr::var(*v),
                            op: ConOp::Gt0,
                        });
                    }
                }
                MagAtom::Angle(a, b, c) if self.has_diseq(a, b) && self.has_diseq(c, b) => {
                    // angle ≤ right_angle + right_angle
                    let two_ra = LinExpr::var(MagAtom::RightAngle).scale(&SmallRat::int(2));
                    out.push(Constraint {
                        expr: two_ra.sub(&LinExpr::var(*v)),
                        op: ConOp::Ge0,
                    });
                }
                _ => {}
            }
        }
        if !vars.contains(&MagAtom::RightAngle) {
            // Keep the constant's positivity available even if unused.
            out.push(Constraint {
                expr: LinExpr::var(MagAtom::RightAngle),
                op: ConOp::Gt0,
            });
        }
        out
    }

    fn fact_constraints(&self) -> (Vec<Constraint>, Vec<MetricAtom>) {
        let mut convex = Vec::new();
        let mut eq_negs = Vec::new();
        for f in &self.facts {
            let a = self.norm_atom(&f.atom);
            let lhs = LinExpr::of_term(&a.lhs);
            let rhs = LinExpr::of_term(&a.rhs);
            match (a.rel, f.pos) {
                (MetricRel::Eq, true) => convex.push(Constraint {
                    expr: lhs.sub(&rhs),
                    op: ConOp::Eq0,
                }),
                (MetricRel::Lt, true) => convex.push(Constraint {
                    expr: rhs.sub(&lhs),
                    op: ConOp::Gt0,
                }),
                (MetricRel::Lt, false) => convex.push(Constraint {
                    expr: lhs.sub(&rhs),
                    op: ConOp::Ge0,
                }),
                (MetricRel::Eq, false) => eq_negs.push(a),
            }
        }
        for a in &self.congruence_cache {
            let a = self.norm_atom(a);
            let lhs = LinExpr::of_term(&a.lhs);
            let rhs = LinExpr::of_term(&a.rhs);
            convex.push(Constraint {
                expr: lhs.sub(&rhs),
                op: ConOp::Eq0,
            });
        }
        (convex, eq_negs)
    }

    /// Checks infeasibility of the context extended with `extra`, splitting
    /// over negated-equality facts. When the extras name any variables, the
    /// system is restricted to their connected component: feasibility
    /// decomposes across components, so constraints sharing no unknown with
    /// the goal cannot contribute to a refutation unless the rest of the
    /// context is itself infeasible — which the caller checks separately.
    fn refutes(&self, extra: &[Constraint], extra_atoms: &[MetricAtom]) -> bool {
        let (convex, eq_negs) = self.fact_constraints();
        let vars = self.registered_atoms(extra_atoms);
        let mut base = self.background(&vars);
        base.extend(convex);
        base.extend_from_slice(extra);
        // Collect every atom actually mentioned (extras may add some).
        let mut all_vars: BTreeSet<MagAtom> = vars;
        for c in &base {
            all_vars.extend(c.expr.coeffs.keys().copied());
        }
        for a in &eq_negs {
            for t in [&a.lhs, &a.rhs] {
                all_vars.extend(t.summands.iter().copied());
            }
        }
        // Restrict to the goal's connected component when there is a goal.
        let mut seed: BTreeSet<MagAtom> = BTreeSet::new();
        for c in extra {
            seed.extend(c.expr.coeffs.keys().copied());
        }
        if !seed.is_empty() {
            loop {
                let before = seed.len();
                for c in &base {
                    if c.expr.coeffs.keys().any(|k| seed.contains(k)) {
                        seed.extend(c.expr.coeffs.keys().copied());
                    }
                }
                for a in &eq_negs {
                    let touches = [&a.lhs, &a.rhs]
                        .iter()
                        .any(|t| t.summands.iter().any(|s| seed.contains(s)));
                    if touches {
                        for t in [&a.lhs, &a.rhs] {
                            seed.extend(t.summands.iter().copied());
                        }
                    }
                }
                if seed.len() == before {
                    break;
                }
            }
            base.retain(|c| {
                c.expr.coeffs.is_empty() || c.expr.coeffs.keys().any(|k| seed.contains(k))
            });
            let eq_negs: Vec<MetricAtom> = eq_negs
                .into_iter()
                .filter(|a| {
                    [&a.lhs, &a.rhs]
                        .iter()
                        .any(|t| t.summands.iter().any(|s| seed.contains(s)))
                })
                .collect();
            let order: Vec<MagAtom> = seed.into_iter().collect();
            return self.split_refute(&base, &eq_negs, &order);
        }
        // No goal: check the whole context, component by component, so
        // disequality splits only multiply within a component.
        let mut vars_left: BTreeSet<MagAtom> = all_vars;
        while let Some(&start) = vars_left.iter().next() {
            let mut comp: BTreeSet<MagAtom> = BTreeSet::new();
            comp.insert(start);
            loop {
                let before = comp.len();
                for c in &base {
                    if c.expr.coeffs.keys().any(|k| comp.contains(k)) {
                        comp.extend(c.expr.coeffs.keys().copied());
                    }
                }
                for a in &eq_negs {
                    let touches = [&a.lhs, &a.rhs]
                        .iter()
                        .any(|t| t.summands.iter().any(|s| comp.contains(s)));
                    if touches {
                        for t in [&a.lhs, &a.rhs] {
                            comp.extend(t.summands.iter().copied());
                        }
                    }
                }
                if comp.len() == before {
                    break;
                }
            }
            let comp_cons: Vec<Constraint> = base
                .iter()
                .filter(|c| {
                    c.expr.coeffs.is_empty() || c.expr.coeffs.keys().any(|k| comp.contains(k))
                })
                .cloned()
                .collect();
            let comp_negs: Vec<MetricAtom> = eq_negs
                .iter()
                .filter(|a| {
                    [&a.lhs, &a.rhs]
                        .iter()
                        .any(|t| t.summands.iter().any(|s| comp.contains(s)))
                })
                .cloned()
                .collect();
            let order: Vec<MagAtom> = comp.iter().copied().collect();
            if self.split_refute(&comp_cons, &comp_negs, &order) {
                return true;
            }
            for v in comp {
                vars_left.remove(&v);
            }
        }
        false
    }

    fn split_refute(&self, base: &[Constraint], eq_negs: &[MetricAtom], order: &[MagAtom]) -> bool {
        match eq_negs.split_first() {
            None => !feasible(dedup(base.to_vec()), order.to_vec(), true),
            Some((a, rest)) => {
                let lhs = LinExpr::of_term(&a.lhs);
                let rhs = LinExpr::of_term(&a.rhs);
                // lhs ≠ rhs: split into lhs < rhs and rhs < lhs.
                for diff in [rhs.sub(&lhs), lhs.sub(&rhs)] {
                    let mut b = base.to_vec();
                    b.push(Constraint {
                        expr: diff,
                        op: ConOp::Gt0,
                    });
                    if !self.split_refute(&b, rest, order) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// True iff the goal holds in every model of the ordered-group axioms,
    /// the magnitude axioms, and the context.
    pub fn entails(&mut self, goal: &MetricLit) -> bool {
        // Fast path: the goal is a stored fact up to normalization, or a
        // trivial identity.
        let norm = self.norm_atom(&goal.atom);
        if goal.pos && norm.rel == MetricRel::Eq && norm.lhs == norm.rhs {
            return true;
        }
        if self.normalized_fact_set().1.contains(&MetricLit {
            pos: goal.pos,
            atom: norm.clone(),
        }) {
            return true;
        }
        // Constraints never mix magnitude sorts, so the area-congruence
        // trigger can only matter for goals that mention an area term.
        let area_goal = [&norm.lhs, &norm.rhs]
            .iter()
            .any(|t| t.summands.iter().any(|s| matches!(s, MagAtom::Area(..))));
        if area_goal {
            self.run_congruence_trigger(std::slice::from_ref(&norm));
        }
        let a = self.norm_atom(&goal.atom);
        let lhs = LinExpr::of_term(&a.lhs);
        let rhs = LinExpr::of_term(&a.rhs);
        let negation_branches: Vec<Vec<Constraint>> = match (a.rel, goal.pos) {
            (MetricRel::Eq, true) => vec![
                vec![Constraint {
                    expr: rhs.sub(&lhs),
                    op: ConOp::Gt0,
                }],
                vec![Constraint {
                    expr: lhs.sub(&rhs),
                    op: ConOp::Gt0,
                }],
            ],
            (MetricRel::Lt, true) => vec![vec![Constraint {
                expr: lhs.sub(&rhs),
                op: ConOp::Ge0,
            }]],
            (MetricRel::Eq, false) => vec![vec![Constraint {
                expr: lhs.sub(&rhs),
                op: ConOp::Eq0,
            }]],
            (MetricRel::Lt, false) => vec![vec![Constraint {
                expr: rhs.sub(&lhs),
                op: ConOp::Gt0,
            }]],
        };
        if negation_branches
            .into_iter()
            .all(|extra| self.refutes(&extra, std::slice::from_ref(&a)))
        {
            return true;
        }
        // An infeasible context entails everything; the component
        // restriction above cannot see an inconsistency elsewhere.
        self.inconsistent()
    }

    /// An infeasible context entails everything, including ⊥.
    pub fn inconsistent(&mut self) -> bool {
        if let Some((v, r)) = self.inconsistent_at {
            if v == self.version {
                return r;
            }
        }
        let areas = self
            .registered_atoms(&[])
            .into_iter()
            .filter(|a| matches!(a, MagAtom::Area(..)))
            .count();
        if areas >= 2 {
            self.run_congruence_trigger(&[]);
        }
        let r = self.refutes(&[], &[]);
        self.inconsistent_at = Some((self.version, r));
        r
    }

    /// Triangle-congruence trigger: whenever all six side/angle equalities
    /// between two registered triangles are entailed, their areas are equal.
    /// Runs to a fixpoint over the registered area atoms.
    fn run_congruence_trigger(&mut self, extra: &[MetricAtom]) {
        if self.congruence_searched_at.get() == self.version && self.version != 0 {
            return;
        }
        let areas: Vec<(Obj, Obj, Obj)> = self
            .registered_atoms(extra)
            .into_iter()
            .filter_map(|a| match a {
                MagAtom::Area(x, y, z) if x != y && y != z && x != z => Some((x, y, z)),
                _ => None,
            })
            .collect();
        self.congruence_searched_at.set(self.version);
        if areas.len() < 2 {
            return;
        }
        let mut memo: HashMap<MetricAtom, bool> = HashMap::new();
        loop {
            let mut added = false;
            for i in 0..areas.len() {
                for j in (i + 1)..areas.len() {
                    let t1 = areas[i];
                    let t2 = areas[j];
                    let lhs = MagnitudeTerm::atom(MagAtom::Area(t1.0, t1.1, t1.2)).normalize();
                    let rhs = MagnitudeTerm::atom(MagAtom::Area(t2.0, t2.1, t2.2)).normalize();
                    let fact = MetricAtom {
                        rel: MetricRel::Eq,
                        lhs,
                        rhs,
                    }
                    .normalize();
                    if self.congruence_cache.contains(&fact)
                        || self.normalized_fact_set().1.contains(&MetricLit {
                            pos: true,
                            atom: fact.clone(),
                        })
                    {
                        continue;
                    }
                    if self.some_correspondence_congruent(t1, t2, &mut memo) {
                        self.congruence_cache.push(fact);
                        added = true;
                    }
                }
            }
            if !added {
                return;
            }
            // New area equalities can unlock further entailments.
            memo.clear();
        }
    }

    fn some_correspondence_congruent(
        &self,
        (a, b, c): (Obj, Obj, Obj),
        t2: (Obj, Obj, Obj),
        memo: &mut HashMap<MetricAtom, bool>,
    ) -> bool {
        let perms = [
            (t2.0, t2.1, t2.2),
            (t2.1, t2.2, t2.0),
            (t2.2, t2.0, t2.1),
            (t2.0, t2.2, t2.1),
            (t2.2, t2.1, t2.0),
            (t2.1, t2.0, t2.2),
        ];
        'outer: for (x, y, z) in perms {
            let hyps = [
                (MagAtom::Seg(a, b), MagAtom::Seg(x, y)),
                (MagAtom::Seg(b, c), MagAtom::Seg(y, z)),
                (MagAtom::Seg(c, a), MagAtom::Seg(z, x)),
                (MagAtom::Angle(a, b, c), MagAtom::Angle(x, y, z)),
                (MagAtom::Angle(b, c, a), MagAtom::Angle(y, z, x)),
                (MagAtom::Angle(c, a, b), MagAtom::Angle(z, x, y)),
            ];
            for (l, r) in hyps {
                let atom = MetricAtom {
                    rel: MetricRel::Eq,
                    lhs: MagnitudeTerm::atom(l).normalize(),
                    rhs: MagnitudeTerm::atom(r).normalize(),
                }
                .normalize();
                let atom = self.norm_atom(&atom);
                if atom.lhs == atom.rhs {
                    continue;
                }
                if let Some(&cached) = memo.get(&atom) {
                    if cached {
                        continue;
                    }
                    continue 'outer;
                }
                // Cheap check first: the equality is a stored fact.
                if self.normalized_fact_set().1.contains(&MetricLit {
                    pos: true,
                    atom: atom.clone(),
                }) {
                    memo.insert(atom, true);
                    continue;
                }
                let lhs = LinExpr::of_term(&atom.lhs);
                let rhs = LinExpr::of_term(&atom.rhs);
                // Entailment of each hypothesis, without re-triggering.
                let branches = [
                    Constraint {
                        expr: rhs.sub(&lhs),
                        op: ConOp::Gt0,
                    },
                    Constraint {
                        expr: lhs.sub(&rhs),
                        op: ConOp::Gt0,
                    },
                ];
                let holds = branches.into_iter().all(|extra| {
                    self.refutes(std::slice::from_ref(&extra), std::slice::from_ref(&atom))
                });
                memo.insert(atom, holds);
                if !holds {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }

    /// Point identities certified by the metric side: eq when seg(a,b) = 0
    /// is entailed, diseq when 0 < seg(a,b) is entailed.
    pub fn derive_point_facts(&mut self) -> Vec<(Obj, Obj, bool)> {
        if self.derive_done_at == self.version && self.version != 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let segs: Vec<(Obj, Obj)> = self
            .registered_atoms(&[])
            .into_iter()
            .filter_map(|a| match a {
                MagAtom::Seg(x, y) if x != y => Some((x, y)),
                _ => None,
            })
            .collect();
        for (a, b) in segs {
            let seg = MagnitudeTerm::atom(MagAtom::Seg(a, b));
            let zero = MagnitudeTerm::zero(crate::lang::MagSort::Segment);
            if !self.has_diseq(a, b) {
                // Points already known distinct cannot be proved equal
                // unless the context is infeasible, which the caller
                // detects separately.
                let eq_goal = MetricLit {
                    pos: true,
                    atom: MetricAtom {
                        rel: MetricRel::Eq,
                        lhs: seg.clone(),
                        rhs: zero.clone(),
                    },
                };
                if self.entails(&eq_goal) {
                    out.push((a, b, true));
                    continue;
                }
                let lt_goal = MetricLit {
                    pos: true,
                    atom: MetricAtom {
                        rel: MetricRel::Lt,
                        lhs: zero.clone(),
                        rhs: seg,
                    },
                };
                if self.entails(&lt_goal) {
                    out.push((a, b, false));
                }
            }
        }
        self.derive_done_at = self.version;
        out
    }
}

/// Independent Fourier–Motzkin feasibility check used as a test oracle:
/// descending elimination order and no equality substitution (equalities
/// are handled as inequality pairs).
pub fn oracle_feasible(
    eqs: &[(Vec<(MagAtom, i64)>, i64)],
    ges: &[(Vec<(MagAtom, i64)>, i64)],
    gts: &[(Vec<(MagAtom, i64)>, i64)],
) -> bool {
    let build = |terms: &[(MagAtom, i64)], k: i64| {
        let mut e = LinExpr::constant(SmallRat::int(k));
        for (a, c) in terms {
            e.add_term(a, &SmallRat::int(*c));
        }
        e
    };
    let mut cons = Vec::new();
    let mut vars = BTreeSet::new();
    for (t, k) in eqs {
        let e = build(t, *k);
        vars.extend(e.coeffs.keys().copied());
        cons.push(Constraint {
            expr: e.clone(),
            op: ConOp::Ge0,
        });
        cons.push(Constraint {
            expr: e.scale(&SmallRat::int(-1)),
            op: ConOp::Ge0,
        });
    }
    for (t, k) in ges {
        let e = build(t, *k);
        vars.extend(e.coeffs.keys().copied());
        cons.push(Constraint {
            expr: e,
            op: ConOp::Ge0,
        });
    }
    for (t, k) in gts {
        let e = build(t, *k);
        vars.extend(e.coeffs.keys().copied());
        cons.push(Constraint {
            expr: e,
            op: ConOp::Gt0,
        });
    }
    feasible(cons, vars.into_iter().collect(), false)
}

/// Main-path feasibility over the same plain representation, for
/// oracle-agreement tests.
pub fn main_feasible(
    eqs: &[(Vec<(MagAtom, i64)>, i64)],
    ges: &[(Vec<(MagAtom, i64)>, i64)],
    gts: &[(Vec<(MagAtom, i64)>, i64)],
) -> bool {
    let build = |terms: &[(MagAtom, i64)], k: i64| {
        let mut e = LinExpr::constant(SmallRat::int(k));
        for (a, c) in terms {
            e.add_term(a, &SmallRat::int(*c));
        }
        e
    };
    let mut cons = Vec::new();
    let mut vars = BTreeSet::new();
    for (t, k) in eqs {
        let e = build(t, *k);
        vars.extend(e.coeffs.keys().copied());
        cons.push(Constraint {
            expr: e,
            op: ConOp::Eq0,
        });
    }
    for (t, k) in ges {
        let e = build(t, *k);
        vars.extend(e.coeffs.keys().copied());
        cons.push(Constraint {
            expr: e,
            op: ConOp::Ge0,
        });
    }
    for (t, k) in gts {
        let e = build(t, *k);
        vars.extend(e.coeffs.keys().copied());
        cons.push(Constraint {
            expr: e,
            op: ConOp::Gt0,
        });
    }
    feasible(cons, vars.into_iter().collect(), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::MagSort;

    fn seg(a: u32, b: u32) -> MagnitudeTerm {
        MagnitudeTerm::atom(MagAtom::Seg(Obj(a), Obj(b)))
    }

    fn eq_lit(lhs: MagnitudeTerm, rhs: MagnitudeTerm) -> MetricLit {
        MetricLit {
            pos: true,
            atom: MetricAtom {
                rel: MetricRel::Eq,
                lhs,
                rhs,
            },
        }
    }

    fn lt_lit(lhs: MagnitudeTerm, rhs: MagnitudeTerm) -> MetricLit {
        MetricLit {
            pos: true,
            atom: MetricAtom {
                rel: MetricRel::Lt,
                lhs,
                rhs,
            },
        }
    }

    fn plus(a: MagnitudeTerm, b: MagnitudeTerm) -> MagnitudeTerm {
        let mut s = a.summands.clone();
        s.extend(b.summands.iter().copied());
        MagnitudeTerm {
            sort: a.sort,
            summands: s,
        }
        .normalize()
    }

    #[test]
    fn segment_symmetry_is_free() {
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(2);
        assert!(ctx.entails(&eq_lit(seg(0, 1), seg(1, 0))));
    }

    #[test]
    fn cancellation() {
        // x + z = y + z entails x = y.
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(6);
        let x = seg(0, 1);
        let y = seg(2, 3);
        let z = seg(4, 5);
        ctx.add_fact(eq_lit(plus(x.clone(), z.clone()), plus(y.clone(), z)));
        assert!(ctx.entails(&eq_lit(x, y)));
    }

    #[test]
    fn whole_greater_than_part() {
        // 0 < y entails z < y + z.
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(4);
        let y = seg(0, 1);
        let z = seg(2, 3);
        ctx.add_fact(lt_lit(MagnitudeTerm::zero(MagSort::Segment), y.clone()));
        assert!(ctx.entails(&lt_lit(z.clone(), plus(y, z))));
    }

    #[test]
    fn underdetermined_comparison_is_not_entailed() {
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(4);
        assert!(!ctx.entails(&lt_lit(seg(0, 1), seg(2, 3))));
    }

    #[test]
    fn equilateral_with_coincident_corner_collapses() {
        // seg(ab) = seg(bc), seg(bc) = seg(ca), c = a entail a = b.
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(3);
        let (a, b, c) = (Obj(0), Obj(1), Obj(2));
        ctx.add_fact(eq_lit(seg(0, 1), seg(1, 2)));
        ctx.add_fact(eq_lit(seg(1, 2), seg(2, 0)));
        ctx.merge_points(c, a);
        let facts = ctx.derive_point_facts();
        assert!(facts.contains(&(a, b, true)) || facts.contains(&(b, a, true)));
    }

    #[test]
    fn infeasible_context_entails_everything() {
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(2);
        ctx.add_fact(eq_lit(seg(0, 1), MagnitudeTerm::zero(MagSort::Segment)));
        ctx.add_diseq(Obj(0), Obj(1));
        assert!(ctx.inconsistent());
        assert!(ctx.entails(&lt_lit(seg(0, 1), seg(0, 1))));
    }

    #[test]
    fn angle_upper_bound_requires_guards() {
        use crate::lang::MagAtom::{Angle, RightAngle};
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(3);
        let ang = MagnitudeTerm::atom(Angle(Obj(0), Obj(1), Obj(2)));
        let two_ra = MagnitudeTerm {
            sort: MagSort::Angle,
            summands: vec![RightAngle, RightAngle],
        };
        let leq = MetricLit {
            pos: false,
            atom: MetricAtom {
                rel: MetricRel::Lt,
                lhs: two_ra.clone(),
                rhs: ang.clone(),
            },
        };
        // Without the apex-distinctness guards the bound is absent.
        ctx.add_fact(eq_lit(ang.clone(), ang.clone()));
        assert!(!ctx.entails(&leq));
        ctx.add_diseq(Obj(0), Obj(1));
        ctx.add_diseq(Obj(2), Obj(1));
        assert!(ctx.entails(&leq));
    }

    #[test]
    fn normalization_invariance_of_goals() {
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(4);
        ctx.add_fact(eq_lit(seg(0, 1), seg(2, 3)));
        // Same goal under segment symmetry and equality symmetry.
        assert!(ctx.entails(&eq_lit(seg(1, 0), seg(3, 2))));
        assert!(ctx.entails(&eq_lit(seg(3, 2), seg(0, 1))));
    }

    #[test]
    fn congruent_triangles_have_equal_areas() {
        use crate::lang::MagAtom::{Angle, Area};
        let mut ctx = MetricContext::new();
        ctx.sync_object_count(6);
        let (a, b, c, d, e, f) = (0, 1, 2, 3, 4, 5);
        let ar = |x: u32, y: u32, z: u32| MagnitudeTerm::atom(Area(Obj(x), Obj(y), Obj(z)));
        let an = |x: u32, y: u32, z: u32| MagnitudeTerm::atom(Angle(Obj(x), Obj(y), Obj(z)));
        ctx.add_fact(eq_lit(seg(a, b), seg(d, e)));
        ctx.add_fact(eq_lit(seg(b, c), seg(e, f)));
        ctx.add_fact(eq_lit(seg(c, a), seg(f, d)));
        ctx.add_fact(eq_lit(an(a, b, c), an(d, e, f)));
        ctx.add_fact(eq_lit(an(b, c, a), an(e, f, d)));
        ctx.add_fact(eq_lit(an(c, a, b), an(f, d, e)));
        // Mention the two areas so their unknowns are registered.
        ctx.add_fact(eq_lit(ar(a, b, c), ar(a, b, c)));
        ctx.add_fact(eq_lit(ar(d, e, f), ar(d, e, f)));
        assert!(ctx.entails(&eq_lit(ar(a, b, c), ar(d, e, f))));
    }

    #[test]
    fn oracle_and_main_agree_on_simple_systems() {
        let v0 = MagAtom::Seg(Obj(0), Obj(1));
        let v1 = MagAtom::Seg(Obj(1), Obj(2));
        // v0 + v1 = 3, v0 - v1 > 0, v1 >= 1 is feasible.
        let eqs = vec![(vec![(v0, 1), (v1, 1)], -3)];
        let gts = vec![(vec![(v0, 1), (v1, -1)], 0)];
        let ges = vec![(vec![(v1, 1)], -1)];
        assert!(main_feasible(&eqs, &ges, &gts));
        assert!(oracle_feasible(&eqs, &ges, &gts));
        // Adding v0 < 1 makes it infeasible.
        let mut gts2 = gts.clone();
        gts2.push((vec![(v0, -1)], 1));
        assert!(!main_feasible(&eqs, &ges, &gts2));
        assert!(!oracle_feasible(&eqs, &ges, &gts2));
    }
}
