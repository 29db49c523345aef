//! The object language: sorted variables, diagrammatic atoms, magnitude
//! terms, metric atoms, literals, and theorem statements.
//!
//! Everything here is an immutable value. Magnitude terms carry a canonical
//! form (see [`MagnitudeTerm::normalize`]) so that terms equal under
//! associativity/commutativity of `+` and the symmetry laws (segment
//! reversal, angle reversal, area rotation/reflection) compare equal.

use std::fmt;

/// Sort of a diagram object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Point,
    Line,
    Circle,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Point => write!(f, "point"),
            Sort::Line => write!(f, "line"),
            Sort::Circle => write!(f, "circle"),
        }
    }
}

/// Handle for an object variable; resolves to a name and sort in an [`ObjTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obj(pub u32);

impl Obj {
    pub const NONE: Obj = Obj(u32::MAX);
}

/// Registry of object variables for one proof context.
///
/// Names are unique per sort namespace; an object's sort never changes.
#[derive(Debug, Clone, Default)]
pub struct ObjTable {
    entries: Vec<(String, Sort)>,
}

impl ObjTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a fresh variable. Fails on a name already bound in the same
    /// sort namespace (shadowing is rejected, never alpha-renamed).
    pub fn insert(&mut self, name: &str, sort: Sort) -> Result<Obj, String> {
        if self.entries.iter().any(|(n, s)| n == name && *s == sort) {
            return Err(format!("{sort} variable '{name}' is already bound"));
        }
        self.entries.push((name.to_string(), sort));
        Ok(Obj(self.entries.len() as u32 - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<Obj> {
        self.entries
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| Obj(i as u32))
    }

    pub fn lookup_sorted(&self, name: &str, sort: Sort) -> Option<Obj> {
        self.entries
            .iter()
            .position(|(n, s)| n == name && *s == sort)
            .map(|i| Obj(i as u32))
    }

    pub fn name(&self, o: Obj) -> &str {
        &self.entries[o.0 as usize].0
    }

    pub fn sort(&self, o: Obj) -> Sort {
        self.entries[o.0 as usize].1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Obj, &str, Sort)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, (n, s))| (Obj(i as u32), n.as_str(), *s))
    }

    pub fn objects_of(&self, sort: Sort) -> impl Iterator<Item = Obj> + '_ {
        self.iter()
            .filter(move |(_, _, s)| *s == sort)
            .map(|(o, _, _)| o)
    }
}

/// Diagrammatic relation symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pred {
    /// on(point, line)
    OnLine,
    /// same_side(point, point, line)
    SameSide,
    /// between(point, point, point) — strict betweenness
    Between,
    /// on(point, circle)
    OnCircle,
    /// inside(point, circle)
    Inside,
    /// center(point, circle)
    Center,
    /// intersects(line, line) — transversal
    IntersectsLL,
    /// intersects(line, circle) — transversal
    IntersectsLC,
    /// intersects(circle, circle) — transversal
    IntersectsCC,
    EqPoint,
    EqLine,
    EqCircle,
}

pub const ALL_PREDS: [Pred; 12] = [
    Pred::OnLine,
    Pred::SameSide,
    Pred::Between,
    Pred::OnCircle,
    Pred::Inside,
    Pred::Center,
    Pred::IntersectsLL,
    Pred::IntersectsLC,
    Pred::IntersectsCC,
    Pred::EqPoint,
    Pred::EqLine,
    Pred::EqCircle,
];

impl Pred {
    pub fn signature(self) -> &'static [Sort] {
        use Sort::*;
        match self {
            Pred::OnLine => &[Point, Line],
            Pred::SameSide => &[Point, Point, Line],
            Pred::Between => &[Point, Point, Point],
            Pred::OnCircle => &[Point, Circle],
            Pred::Inside => &[Point, Circle],
            Pred::Center => &[Point, Circle],
            Pred::IntersectsLL => &[Line, Line],
            Pred::IntersectsLC => &[Line, Circle],
            Pred::IntersectsCC => &[Circle, Circle],
            Pred::EqPoint => &[Point, Point],
            Pred::EqLine => &[Line, Line],
            Pred::EqCircle => &[Circle, Circle],
        }
    }

    pub fn arity(self) -> usize {
        self.signature().len()
    }

    /// The `intersects` relations are symmetric by definition and have no
    /// symmetry axioms in the rule catalog, so their atoms are stored with
    /// sorted arguments.
    pub fn args_sorted_on_construction(self) -> bool {
        matches!(self, Pred::IntersectsLL | Pred::IntersectsCC)
    }
}

/// A ground diagrammatic atom. Fixed-size argument array; unused slots are
/// `Obj::NONE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiagramAtom {
    pub pred: Pred,
    pub args: [Obj; 3],
}

impl DiagramAtom {
    pub fn new(pred: Pred, args: &[Obj]) -> Self {
        assert_eq!(args.len(), pred.arity(), "arity mismatch for {pred:?}");
        let mut a = [Obj::NONE; 3];
        a[..args.len()].copy_from_slice(args);
        if pred.args_sorted_on_construction() && a[0] > a[1] {
            a.swap(0, 1);
        }
        DiagramAtom { pred, args: a }
    }

    /// Sort-checked construction; rejects argument sorts that do not match
    /// the predicate signature.
    pub fn checked(pred: Pred, args: &[Obj], table: &ObjTable) -> Result<Self, String> {
        let sig = pred.signature();
        if args.len() != sig.len() {
            return Err(format!(
                "'{pred:?}' expects {} arguments, got {}",
                sig.len(),
                args.len()
            ));
        }
        for (i, (&o, &s)) in args.iter().zip(sig).enumerate() {
            if table.sort(o) != s {
                return Err(format!(
                    "argument {} of '{pred:?}' must be a {s}, got {} '{}'",
                    i + 1,
                    table.sort(o),
                    table.name(o)
                ));
            }
        }
        Ok(Self::new(pred, args))
    }

    pub fn args(&self) -> &[Obj] {
        &self.args[..self.pred.arity()]
    }
}

/// A signed diagrammatic atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiagramLit {
    pub pos: bool,
    pub atom: DiagramAtom,
}

impl DiagramLit {
    pub fn pos(atom: DiagramAtom) -> Self {
        DiagramLit { pos: true, atom }
    }
    pub fn neg(atom: DiagramAtom) -> Self {
        DiagramLit { pos: false, atom }
    }
    pub fn negated(self) -> Self {
        DiagramLit {
            pos: !self.pos,
            ..self
        }
    }
}

/// Magnitude sorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MagSort {
    Segment,
    Angle,
    Area,
}

impl fmt::Display for MagSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MagSort::Segment => write!(f, "segment"),
            MagSort::Angle => write!(f, "angle"),
            MagSort::Area => write!(f, "area"),
        }
    }
}

/// An atomic magnitude: one summand of a magnitude term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MagAtom {
    /// seg(a, b): length of the segment from a to b.
    Seg(Obj, Obj),
    /// angle(a, b, c): magnitude of the angle at apex b.
    Angle(Obj, Obj, Obj),
    /// area(a, b, c): area of the triangle abc.
    Area(Obj, Obj, Obj),
    /// The distinguished right-angle constant (angle sort).
    RightAngle,
}

impl MagAtom {
    pub fn sort(&self) -> MagSort {
        match self {
            MagAtom::Seg(..) => MagSort::Segment,
            MagAtom::Angle(..) => MagSort::Angle,
            MagAtom::Area(..) => MagSort::Area,
            MagAtom::RightAngle => MagSort::Angle,
        }
    }

    /// Canonical variable order within the symmetry class:
    /// seg(a,b) = seg(b,a); angle(a,b,c) = angle(c,b,a); area under the
    /// cyclic-and-reflection group of its arguments.
    pub fn normalize(self) -> MagAtom {
        match self {
            MagAtom::Seg(a, b) => {
                if a <= b {
                    MagAtom::Seg(a, b)
                } else {
                    MagAtom::Seg(b, a)
                }
            }
            MagAtom::Angle(a, b, c) => {
                if a <= c {
                    MagAtom::Angle(a, b, c)
                } else {
                    MagAtom::Angle(c, b, a)
                }
            }
            MagAtom::Area(a, b, c) => {
                let mut best = (a, b, c);
                for cand in [
                    (a, b, c),
                    (b, c, a),
                    (c, a, b),
                    (a, c, b),
                    (c, b, a),
                    (b, a, c),
                ] {
                    if cand < best {
                        best = cand;
                    }
                }
                MagAtom::Area(best.0, best.1, best.2)
            }
            MagAtom::RightAngle => MagAtom::RightAngle,
        }
    }

    /// A degenerate summand denotes zero: seg(a,a) = 0 and area with a
    /// repeated point is 0.
    pub fn is_zero(&self) -> bool {
        match *self {
            MagAtom::Seg(a, b) => a == b,
            MagAtom::Area(a, b, c) => a == b || b == c || a == c,
            _ => false,
        }
    }

    pub fn points(&self) -> Vec<Obj> {
        match *self {
            MagAtom::Seg(a, b) => vec![a, b],
            MagAtom::Angle(a, b, c) | MagAtom::Area(a, b, c) => vec![a, b, c],
            MagAtom::RightAngle => vec![],
        }
    }
}

/// A sum of atomic magnitudes; the empty sum is 0.
///
/// Invariant: all summands share `sort`, each summand is normalized, and
/// the summand list is sorted (multiset canonical form).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MagnitudeTerm {
    pub sort: MagSort,
    pub summands: Vec<MagAtom>,
}

impl MagnitudeTerm {
    pub fn zero(sort: MagSort) -> Self {
        MagnitudeTerm {
            sort,
            summands: Vec::new(),
        }
    }

    pub fn atom(a: MagAtom) -> Self {
        MagnitudeTerm {
            sort: a.sort(),
            summands: vec![a],
        }
    }

    pub fn sum(sort: MagSort, atoms: Vec<MagAtom>) -> Result<Self, String> {
        for a in &atoms {
            if a.sort() != sort {
                return Err(format!("magnitude sort mismatch: {:?} in a {sort} sum", a));
            }
        }
        Ok(MagnitudeTerm {
            sort,
            summands: atoms,
        }
        .normalize())
    }

    /// Canonical form: normalize each summand, drop degenerate (zero)
    /// summands, sort the multiset.
    pub fn normalize(&self) -> MagnitudeTerm {
        let mut s: Vec<MagAtom> = self
            .summands
            .iter()
            .map(|a| a.normalize())
            .filter(|a| !a.is_zero())
            .collect();
        s.sort();
        MagnitudeTerm {
            sort: self.sort,
            summands: s,
        }
    }

    /// Normalization after substituting each point by its equivalence-class
    /// representative (used once point equalities are known).
    pub fn normalize_under(&self, rep: &impl Fn(Obj) -> Obj) -> MagnitudeTerm {
        let mapped: Vec<MagAtom> = self
            .summands
            .iter()
            .map(|a| match *a {
                MagAtom::Seg(x, y) => MagAtom::Seg(rep(x), rep(y)),
                MagAtom::Angle(x, y, z) => MagAtom::Angle(rep(x), rep(y), rep(z)),
                MagAtom::Area(x, y, z) => MagAtom::Area(rep(x), rep(y), rep(z)),
                MagAtom::RightAngle => MagAtom::RightAngle,
            })
            .collect();
        MagnitudeTerm {
            sort: self.sort,
            summands: mapped,
        }
        .normalize()
    }
}

/// Metric relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricRel {
    Eq,
    Lt,
}

/// A metric atom `lhs rel rhs`; both sides share a magnitude sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricAtom {
    pub rel: MetricRel,
    pub lhs: MagnitudeTerm,
    pub rhs: MagnitudeTerm,
}

impl MetricAtom {
    pub fn new(rel: MetricRel, lhs: MagnitudeTerm, rhs: MagnitudeTerm) -> Result<Self, String> {
        if lhs.sort != rhs.sort {
            return Err(format!(
                "metric atom relates a {} to a {}",
                lhs.sort, rhs.sort
            ));
        }
        Ok(MetricAtom { rel, lhs, rhs })
    }

    pub fn normalize(&self) -> MetricAtom {
        let mut lhs = self.lhs.normalize();
        let mut rhs = self.rhs.normalize();
        // Equality is symmetric: order the sides for a canonical atom.
        if self.rel == MetricRel::Eq && rhs < lhs {
            std::mem::swap(&mut lhs, &mut rhs);
        }
        MetricAtom {
            rel: self.rel,
            lhs,
            rhs,
        }
    }
}

/// A signed metric atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricLit {
    pub pos: bool,
    pub atom: MetricAtom,
}

impl MetricLit {
    pub fn negated(&self) -> MetricLit {
        MetricLit {
            pos: !self.pos,
            atom: self.atom.clone(),
        }
    }
}

/// The universal currency: a diagrammatic literal, a metric literal, or ⊥.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Diagram(DiagramLit),
    Metric(MetricLit),
    Falsity,
}

impl Literal {
    pub fn diagram(pos: bool, atom: DiagramAtom) -> Self {
        Literal::Diagram(DiagramLit { pos, atom })
    }

    pub fn metric(pos: bool, atom: MetricAtom) -> Self {
        Literal::Metric(MetricLit { pos, atom })
    }

    /// Flips the sign; involutive. ⊥ only appears positively and is its own
    /// negation for the purposes of this operation.
    pub fn negated(&self) -> Literal {
        match self {
            Literal::Diagram(l) => Literal::Diagram(l.negated()),
            Literal::Metric(l) => Literal::Metric(l.negated()),
            Literal::Falsity => Literal::Falsity,
        }
    }

    pub fn objects(&self) -> Vec<Obj> {
        let mut v = Vec::new();
        match self {
            Literal::Diagram(l) => v.extend_from_slice(l.atom.args()),
            Literal::Metric(l) => {
                for t in [&l.atom.lhs, &l.atom.rhs] {
                    for a in &t.summands {
                        match *a {
                            MagAtom::Seg(x, y) => v.extend([x, y]),
                            MagAtom::Angle(x, y, z) | MagAtom::Area(x, y, z) => v.extend([x, y, z]),
                            MagAtom::RightAngle => {}
                        }
                    }
                }
            }
            Literal::Falsity => {}
        }
        v.sort();
        v.dedup();
        v
    }
}

/// Expansion of the defined predicates into basic literal sequences.
pub fn expand_diff_side(a: Obj, b: Obj, l: Obj) -> Vec<Literal> {
    vec![
        Literal::diagram(false, DiagramAtom::new(Pred::OnLine, &[a, l])),
        Literal::diagram(false, DiagramAtom::new(Pred::OnLine, &[b, l])),
        Literal::diagram(false, DiagramAtom::new(Pred::SameSide, &[a, b, l])),
    ]
}

pub fn expand_outside(a: Obj, c: Obj) -> Vec<Literal> {
    vec![
        Literal::diagram(false, DiagramAtom::new(Pred::Inside, &[a, c])),
        Literal::diagram(false, DiagramAtom::new(Pred::OnCircle, &[a, c])),
    ]
}

/// x ≤ y is shorthand for ¬(y < x).
pub fn expand_leq(lhs: MagnitudeTerm, rhs: MagnitudeTerm) -> Result<Literal, String> {
    Ok(Literal::metric(
        false,
        MetricAtom::new(MetricRel::Lt, rhs, lhs)?,
    ))
}

/// A theorem: Γ ⇒ ∃ x⃗. Δ, with free variables implicitly universal.
#[derive(Debug, Clone)]
pub struct TheoremStatement {
    pub name: String,
    /// Universally quantified parameters, in declaration order.
    pub params: Vec<(String, Sort)>,
    /// Hypotheses over the parameters.
    pub hypotheses: Vec<Literal>,
    /// Existential witnesses, in declaration order.
    pub existentials: Vec<(String, Sort)>,
    /// Conclusions; `None` means the conclusion is ⊥ (an impossibility
    /// theorem).
    pub conclusions: Option<Vec<Literal>>,
}

impl TheoremStatement {
    pub fn concludes_falsity(&self) -> bool {
        self.conclusions.is_none()
    }
}
