//! Analytic witnesses for the construction rules: given a rational model
//! satisfying a rule's prerequisites, build coordinates for the introduced
//! objects and evaluate the rule's conclusions exactly.
//!
//! Intersection points of lines with circles live in a quadratic extension
//! Q(√d); all the predicates reduce to sign tests there, which stay exact.

use super::{Model, Rat, RatCircle, RatLine, RatObject, RatPoint};
use crate::constructions::ConstructionRule;
use crate::diagram::SchematicLit;
use crate::lang::{Obj, Pred};
use num_traits::{Signed, Zero};

/// a + b·√d with a fixed nonnegative rational radicand d.
#[derive(Debug, Clone, PartialEq)]
pub struct Ext {
    pub a: Rat,
    pub b: Rat,
    pub d: Rat,
}

impl Ext {
    pub fn rational(a: Rat, d: &Rat) -> Ext {
        Ext {
            a,
            b: Rat::zero(),
            d: d.clone(),
        }
    }

    pub fn root(d: &Rat) -> Ext {
        Ext {
            a: Rat::zero(),
            b: num_traits::One::one(),
            d: d.clone(),
        }
    }

    pub fn add(&self, o: &Ext) -> Ext {
        Ext {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            d: self.d.clone(),
        }
    }

    pub fn sub(&self, o: &Ext) -> Ext {
        Ext {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            d: self.d.clone(),
        }
    }

    pub fn mul(&self, o: &Ext) -> Ext {
        Ext {
            a: &self.a * &o.a + &self.b * &o.b * &self.d,
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Ext {
        Ext {
            a: &self.a * k,
            b: &self.b * k,
            d: self.d.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        if self.d.is_zero() {
            return self.a.is_zero();
        }
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of a + b√d (d ≥ 0), exactly.
    pub fn sign(&self) -> i32 {
        let sa = rat_sign(&self.a);
        let sb = if self.d.is_zero() {
            0
        } else {
            rat_sign(&self.b)
        };
        match (sa, sb) {
            (0, s) | (s, 0) => s,
            (x, y) if x == y => x,
            _ => {
                // Compare a² with b²·d; the larger magnitude wins.
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * &self.d;
                match a2.cmp(&b2d) {
                    std::cmp::Ordering::Greater => sa,
                    std::cmp::Ordering::Less => sb,
                    std::cmp::Ordering::Equal => 0,
                }
            }
        }
    }
}

fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// A point with coordinates in Q(√d).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtPoint {
    pub x: Ext,
    pub y: Ext,
}

impl ExtPoint {
    pub fn rational(p: &RatPoint, d: &Rat) -> ExtPoint {
        ExtPoint {
            x: Ext::rational(p.x.clone(), d),
            y: Ext::rational(p.y.clone(), d),
        }
    }
}

/// The witness universe: the base model's objects plus extension points.
pub struct ExtModel<'m> {
    pub base: &'m Model,
    pub extra: Vec<ExtPoint>,
    pub d: Rat,
}

/// Handle into an `ExtModel`: a base object or an extension point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wit {
    Base(Obj),
    New(usize),
}

impl<'m> ExtModel<'m> {
    pub fn new(base: &'m Model, d: Rat) -> ExtModel<'m> {
        ExtModel {
            base,
            extra: Vec::new(),
            d,
        }
    }

    pub fn push(&mut self, p: ExtPoint) -> Wit {
        self.extra.push(p);
        Wit::New(self.extra.len() - 1)
    }

    fn point(&self, w: Wit) -> ExtPoint {
        match w {
            Wit::New(i) => self.extra[i].clone(),
            Wit::Base(o) => match &self.base.objects[o.0 as usize] {
                RatObject::Point(p) => ExtPoint::rational(p, &self.d),
                _ => panic!("not a point"),
            },
        }
    }

    fn line(&self, w: Wit) -> &RatLine {
        match w {
            Wit::Base(o) => match &self.base.objects[o.0 as usize] {
                RatObject::Line(l) => l,
                _ => panic!("not a line"),
            },
            _ => panic!("extension lines are not needed"),
        }
    }

    fn circle(&self, w: Wit) -> &RatCircle {
        match w {
            Wit::Base(o) => match &self.base.objects[o.0 as usize] {
                RatObject::Circle(c) => c,
                _ => panic!("not a circle"),
            },
            _ => panic!("extension circles are not needed"),
        }
    }

    fn line_value(&self, l: &RatLine, p: &ExtPoint) -> Ext {
        p.x.scale(&l.a)
            .add(&p.y.scale(&l.b))
            .add(&Ext::rational(l.c.clone(), &self.d))
    }

    fn dist2(&self, p: &ExtPoint, q: &ExtPoint) -> Ext {
        let dx = p.x.sub(&q.x);
        let dy = p.y.sub(&q.y);
        dx.mul(&dx).add(&dy.mul(&dy))
    }

    /// Evaluates a diagrammatic atom over witnesses. Only the predicate
    /// shapes produced by construction conclusions are needed.
    pub fn eval(&self, pred: Pred, args: &[Wit]) -> bool {
        match pred {
            Pred::OnLine => {
                let p = self.point(args[0]);
                self.line_value(self.line(args[1]), &p).is_zero()
            }
            Pred::OnCircle => {
                let p = self.point(args[0]);
                let c = self.circle(args[1]);
                let center = ExtPoint {
                    x: Ext::rational(c.cx.clone(), &self.d),
                    y: Ext::rational(c.cy.clone(), &self.d),
                };
                self.dist2(&p, &center)
                    .sub(&Ext::rational(c.r2.clone(), &self.d))
                    .is_zero()
            }
            Pred::Inside => {
                let p = self.point(args[0]);
                let c = self.circle(args[1]);
                let center = ExtPoint {
                    x: Ext::rational(c.cx.clone(), &self.d),
                    y: Ext::rational(c.cy.clone(), &self.d),
                };
                self.dist2(&p, &center)
                    .sub(&Ext::rational(c.r2.clone(), &self.d))
                    .sign()
                    < 0
            }
            Pred::Center => {
                let p = self.point(args[0]);
                let c = self.circle(args[1]);
                p.x.sub(&Ext::rational(c.cx.clone(), &self.d)).is_zero()
                    && p.y.sub(&Ext::rational(c.cy.clone(), &self.d)).is_zero()
            }
            Pred::Between => {
                let p = self.point(args[0]);
                let q = self.point(args[1]);
                let r = self.point(args[2]);
                let cross =
                    q.x.sub(&p.x)
                        .mul(&r.y.sub(&p.y))
                        .sub(&q.y.sub(&p.y).mul(&r.x.sub(&p.x)));
                if !cross.is_zero() {
                    return false;
                }
                if self.eq_point(args[0], args[1])
                    || self.eq_point(args[1], args[2])
                    || self.eq_point(args[0], args[2])
                {
                    return false;
                }
                let dot =
                    q.x.sub(&p.x)
                        .mul(&q.x.sub(&r.x))
                        .add(&q.y.sub(&p.y).mul(&q.y.sub(&r.y)));
                dot.sign() < 0
            }
            Pred::SameSide => {
                let p = self.point(args[0]);
                let q = self.point(args[1]);
                let l = self.line(args[2]);
                let vp = self.line_value(l, &p).sign();
                let vq = self.line_value(l, &q).sign();
                vp != 0 && vp == vq
            }
            Pred::EqPoint => self.eq_point(args[0], args[1]),
            Pred::EqLine | Pred::EqCircle => match (args[0], args[1]) {
                (Wit::Base(a), Wit::Base(b)) => self
                    .base
                    .eval_atom(&crate::lang::DiagramAtom::new(pred, &[a, b])),
                _ => false,
            },
            Pred::IntersectsLL | Pred::IntersectsLC | Pred::IntersectsCC => {
                match (args[0], args[1]) {
                    (Wit::Base(a), Wit::Base(b)) => self
                        .base
                        .eval_atom(&crate::lang::DiagramAtom::new(pred, &[a, b])),
                    _ => false,
                }
            }
        }
    }

    fn eq_point(&self, a: Wit, b: Wit) -> bool {
        let p = self.point(a);
        let q = self.point(b);
        p.x.sub(&q.x).is_zero() && p.y.sub(&q.y).is_zero()
    }
}

/// Builds witnesses for a construction rule instance over a model whose
/// prerequisites hold, then checks every conclusion. Returns `None` when
/// the builder does not cover the configuration (never for valid inputs of
/// the shipped rules) and `Some(result)` otherwise.
pub fn witness_conclusions(model: &Model, rule: &ConstructionRule, args: &[Obj]) -> Option<bool> {
    let line = |o: Obj| match &model.objects[o.0 as usize] {
        RatObject::Line(l) => Some(l.clone()),
        _ => None,
    };
    let circle = |o: Obj| match &model.objects[o.0 as usize] {
        RatObject::Circle(c) => Some(c.clone()),
        _ => None,
    };
    let point = |o: Obj| match &model.objects[o.0 as usize] {
        RatObject::Point(p) => Some(p.clone()),
        _ => None,
    };
    let one = Rat::from_integer(1.into());
    let zero = Rat::zero();

    // Produce the new points (in the rule's output order) and the radicand.
    let (outs, d): (Vec<ExtPoint>, Rat) = match rule.id {
        "points.1" | "points.2" | "points.3" | "points.4" | "points.5" | "points.6"
        | "points.8" | "points.9" => {
            // Rational candidates searched over a small grid; the first one
            // satisfying every conclusion wins. Construed below via the
            // generic search.
            return Some(rational_point_search(model, rule, args));
        }
        "points.7" => {
            // A point on the circle: x = cx + t, y = cy + √(r² − t²).
            let c = circle(args[0])?;
            let t = pick_t_inside(&c.r2);
            let d = &c.r2 - &t * &t;
            let p = ExtPoint {
                x: Ext::rational(&c.cx + t, &d),
                y: Ext::rational(c.cy.clone(), &d).add(&Ext::root(&d)),
            };
            (vec![p], d)
        }
        "lines.1" | "circles.1" => {
            // The introduced object is a line or circle; conclusions only
            // mention it with rational data, so evaluate directly.
            let a = point(args[0])?;
            let b = point(args[1])?;
            if a == b {
                return None;
            }
            return Some(check_line_circle_intro(model, rule, args, &a, &b));
        }
        "intersections.1" => {
            let l = line(args[0])?;
            let m = line(args[1])?;
            let det = &l.a * &m.b - &l.b * &m.a;
            if det.is_zero() {
                return Some(false);
            }
            let x = (&l.b * &m.c - &l.c * &m.b) / det.clone();
            let y = (&l.c * &m.a - &l.a * &m.c) / det;
            (
                vec![ExtPoint {
                    x: Ext::rational(x, &zero),
                    y: Ext::rational(y, &zero),
                }],
                zero.clone(),
            )
        }
        "intersections.2" | "intersections.3" | "intersections.4" | "intersections.5" => {
            let l = line(args[0])?;
            let c = circle(args[1])?;
            let (p1, p2, d) = line_circle_points(&l, &c)?;
            match rule.id {
                "intersections.2" => (vec![p1], d),
                "intersections.3" => (vec![p1, p2], d),
                _ => {
                    // Pick whichever root satisfies the betweenness
                    // conclusion; try both.
                    return Some(try_roots(model, rule, args, &[p1, p2], &d));
                }
            }
        }
        "intersections.6" | "intersections.7" | "intersections.8" | "intersections.9" => {
            let c1 = circle(args[0])?;
            let c2 = circle(args[1])?;
            // Radical line of the two circles.
            let l = RatLine {
                a: &c2.cx - &c1.cx,
                b: &c2.cy - &c1.cy,
                c: (&c1.cx * &c1.cx + &c1.cy * &c1.cy - &c2.cx * &c2.cx - &c2.cy * &c2.cy + &c2.r2
                    - &c1.r2)
                    / Rat::from_integer(2.into()),
            };
            let (p1, p2, d) = line_circle_points(&l, &c1)?;
            match rule.id {
                "intersections.6" => (vec![p1], d),
                "intersections.7" => (vec![p1, p2], d),
                _ => return Some(try_roots(model, rule, args, &[p1, p2], &d)),
            }
        }
        _ => return None,
    };
    let _ = one;
    Some(check_conclusions(model, rule, args, &outs, &d))
}

/// t strictly inside (−r, r): r² > t² with t = min(1, something small).
fn pick_t_inside(r2: &Rat) -> Rat {
    let mut t = Rat::from_integer(1.into());
    let two = Rat::from_integer(2.into());
    while &(&t * &t) >= r2 {
        t /= &two;
    }
    t
}

/// The two intersection points of a line and a circle, coordinates in
/// Q(√d); `None` if the line misses the circle transversally.
fn line_circle_points(l: &RatLine, c: &RatCircle) -> Option<(ExtPoint, ExtPoint, Rat)> {
    // Foot of the perpendicular from the center, then ± the half-chord.
    let n2 = &l.a * &l.a + &l.b * &l.b;
    if n2.is_zero() {
        return None;
    }
    let v = &l.a * &c.cx + &l.b * &c.cy + &l.c;
    let fx = &c.cx - &l.a * &v / &n2;
    let fy = &c.cy - &l.b * &v / &n2;
    // Half-chord squared: r² − v²/n2; direction (−b, a)/√n2.
    let h2 = &c.r2 - &v * &v / &n2;
    if !h2.is_positive() {
        return None;
    }
    // point = foot ± √(h2/n2) · (−b, a)
    let d = &h2 / &n2;
    if d.is_zero() {
        return None;
    }
    let root = Ext::root(&d);
    let p1 = ExtPoint {
        x: Ext::rational(fx.clone(), &d).add(&root.scale(&-l.b.clone())),
        y: Ext::rational(fy.clone(), &d).add(&root.scale(&l.a)),
    };
    let p2 = ExtPoint {
        x: Ext::rational(fx, &d).sub(&root.scale(&-l.b.clone())),
        y: Ext::rational(fy, &d).sub(&root.scale(&l.a)),
    };
    Some((p1, p2, d))
}

fn check_conclusions(
    model: &Model,
    rule: &ConstructionRule,
    args: &[Obj],
    outs: &[ExtPoint],
    d: &Rat,
) -> bool {
    let mut em = ExtModel::new(model, d.clone());
    let mut wit: Vec<Wit> = args.iter().map(|&o| Wit::Base(o)).collect();
    for p in outs {
        let w = em.push(p.clone());
        wit.push(w);
    }
    eval_schematics(&em, &rule.conclusions, &wit)
}

fn eval_schematics(em: &ExtModel, lits: &[SchematicLit], wit: &[Wit]) -> bool {
    lits.iter().all(|l| {
        let args: Vec<Wit> = l.var_slots().iter().map(|&s| wit[s as usize]).collect();
        em.eval(l.pred, &args) == l.pos
    })
}

fn try_roots(
    model: &Model,
    rule: &ConstructionRule,
    args: &[Obj],
    roots: &[ExtPoint],
    d: &Rat,
) -> bool {
    roots
        .iter()
        .any(|p| check_conclusions(model, rule, args, std::slice::from_ref(p), d))
}

/// Free-point rules: search a small rational grid for a point meeting the
/// conclusions (a witness exists in every open region они describe).
fn rational_point_search(model: &Model, rule: &ConstructionRule, args: &[Obj]) -> bool {
    let zero = Rat::zero();
    let mut candidates: Vec<RatPoint> = Vec::new();
    match rule.id {
        "points.2" | "points.3" | "points.4" => {
            // On the carrier line: parametrize rationally.
            let RatObject::Line(l) = &model.objects[args[0].0 as usize] else {
                return false;
            };
            // A rational point on the line and its direction.
            let (px, py) = if !l.b.is_zero() {
                (zero.clone(), -&l.c / &l.b)
            } else {
                (-&l.c / &l.a, zero.clone())
            };
            let (dx, dy) = (-l.b.clone(), l.a.clone());
            match rule.id {
                "points.3" | "points.4" => {
                    // Between b and c, or beyond c from b: rational combos
                    // of the two endpoint parameters.
                    let RatObject::Point(b) = &model.objects[args[1].0 as usize] else {
                        return false;
                    };
                    let RatObject::Point(c) = &model.objects[args[2].0 as usize] else {
                        return false;
                    };
                    let mids: Vec<Rat> = if rule.id == "points.3" {
                        // interior: (2b+c)/3, (b+c)/2, (b+2c)/3
                        vec![
                            super::rat(1, 2),
                            super::rat(1, 3),
                            super::rat(2, 3),
                            super::rat(1, 4),
                            super::rat(3, 4),
                        ]
                    } else {
                        // beyond c: parameters > 1
                        vec![
                            super::rat(2, 1),
                            super::rat(3, 2),
                            super::rat(3, 1),
                            super::rat(5, 2),
                            super::rat(4, 1),
                        ]
                    };
                    for t in mids {
                        candidates.push(RatPoint {
                            x: &b.x + (&c.x - &b.x) * &t,
                            y: &b.y + (&c.y - &b.y) * &t,
                        });
                    }
                }
                _ => {
                    for i in -12..=12i64 {
                        let t = super::rat(i, 1) / super::rat(2, 1);
                        candidates.push(RatPoint {
                            x: &px + &dx * &t,
                            y: &py + &dy * &t,
                        });
                    }
                }
            }
        }
        "points.5" | "points.6" => {
            // Same side of L as b: b itself works. Opposite side: the
            // mirror image of b across L.
            let RatObject::Line(l) = &model.objects[args[0].0 as usize] else {
                return false;
            };
            let RatObject::Point(b) = &model.objects[args[1].0 as usize] else {
                return false;
            };
            if rule.id == "points.5" {
                candidates.push(b.clone());
            } else {
                let v = &l.a * &b.x + &l.b * &b.y + &l.c;
                let n2 = &l.a * &l.a + &l.b * &l.b;
                let two = super::rat(2, 1);
                candidates.push(RatPoint {
                    x: &b.x - &l.a * &v * &two / &n2,
                    y: &b.y - &l.b * &v * &two / &n2,
                });
            }
        }
        "points.8" => {
            let RatObject::Circle(c) = &model.objects[args[0].0 as usize] else {
                return false;
            };
            candidates.push(RatPoint {
                x: c.cx.clone(),
                y: c.cy.clone(),
            });
            for k in [4i64, 8, 16] {
                let t = pick_t_inside(&c.r2) / super::rat(k, 2);
                candidates.push(RatPoint {
                    x: &c.cx + &t,
                    y: c.cy.clone(),
                });
            }
        }
        "points.9" => {
            let RatObject::Circle(c) = &model.objects[args[0].0 as usize] else {
                return false;
            };
            // Far away along the x axis: (cx + r2 + 1, cy) is outside since
            // (r2+1)² > r2 for every r2 ≥ 0.
            for k in [1i64, 2, 3] {
                candidates.push(RatPoint {
                    x: &c.cx + &c.r2 + super::rat(k, 1),
                    y: c.cy.clone(),
                });
            }
        }
        "points.1" => {
            for i in -6..=6i64 {
                for j in -6..=6i64 {
                    if candidates.len() > 160 {
                        break;
                    }
                    candidates.push(RatPoint {
                        x: super::rat(i, 1) + super::rat(1, 7),
                        y: super::rat(j, 1) + super::rat(2, 7),
                    });
                }
            }
        }
        _ => return false,
    }
    for cand in candidates {
        let mut em = ExtModel::new(model, zero.clone());
        let w = em.push(ExtPoint::rational(&cand, &zero));
        let mut wit: Vec<Wit> = args.iter().map(|&o| Wit::Base(o)).collect();
        wit.push(w);
        if eval_schematics(&em, &rule.conclusions, &wit) {
            return true;
        }
    }
    false
}

/// lines.1 / circles.1: the new object's data is rational; evaluate the
/// conclusions against the synthesized object.
fn check_line_circle_intro(
    model: &Model,
    rule: &ConstructionRule,
    args: &[Obj],
    a: &RatPoint,
    b: &RatPoint,
) -> bool {
    let mut extended = model.clone();
    let new_obj = Obj(extended.objects.len() as u32);
    if rule.id == "lines.1" {
        let la = &b.y - &a.y;
        let lb = &a.x - &b.x;
        let lc = -(&la * &a.x + &lb * &a.y);
        extended.objects.push(RatObject::Line(RatLine {
            a: la,
            b: lb,
            c: lc,
        }));
    } else {
        let dx = &b.x - &a.x;
        let dy = &b.y - &a.y;
        extended.objects.push(RatObject::Circle(RatCircle {
            cx: a.x.clone(),
            cy: a.y.clone(),
            r2: &dx * &dx + &dy * &dy,
        }));
    }
    rule.conclusions.iter().all(|l| {
        let mut atom_args = Vec::new();
        for &s in l.var_slots() {
            atom_args.push(if (s as usize) < args.len() {
                args[s as usize]
            } else {
                new_obj
            });
        }
        extended.eval_lit(&crate::lang::DiagramLit {
            pos: l.pos,
            atom: crate::lang::DiagramAtom::new(l.pred, &atom_args),
        })
    })
}
