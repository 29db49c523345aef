//! Per-rule analytic soundness: for every construction rule, random models
//! satisfying the prerequisites admit witnesses for the conclusions,
//! checked with exact (quadratic-extension) arithmetic.

use euclid_core::constructions::{construction_catalog, rule_by_id};
use euclid_core::lang::{DiagramAtom, DiagramLit, Obj};
use euclid_core::oracle::witness::witness_conclusions;
use euclid_core::oracle::{rat, Model, Rat, RatCircle, RatLine, RatObject, RatPoint, Rng};

fn pt(rng: &mut Rng) -> RatPoint {
    RatPoint {
        x: rng.coord(),
        y: rng.coord(),
    }
}

fn line_through(a: &RatPoint, b: &RatPoint) -> RatLine {
    let la = &b.y - &a.y;
    let lb = &a.x - &b.x;
    let lc = -(&la * &a.x + &lb * &a.y);
    RatLine {
        a: la,
        b: lb,
        c: lc,
    }
}

fn circle_through(c: &RatPoint, t: &RatPoint) -> RatCircle {
    let dx = &t.x - &c.x;
    let dy = &t.y - &c.y;
    RatCircle {
        cx: c.x.clone(),
        cy: c.y.clone(),
        r2: &dx * &dx + &dy * &dy,
    }
}

fn distinct(rng: &mut Rng) -> (RatPoint, RatPoint) {
    loop {
        let a = pt(rng);
        let b = pt(rng);
        if a != b {
            return (a, b);
        }
    }
}

/// Checks the rule's own prerequisites in the model, then the witness.
fn assert_witness(model: &Model, rule_id: &str, args: &[Obj]) {
    let rule = rule_by_id(rule_id).unwrap();
    for p in &rule.prereqs {
        let mut atom_args = Vec::new();
        for &s in p.var_slots() {
            atom_args.push(args[s as usize]);
        }
        let lit = DiagramLit {
            pos: p.pos,
            atom: DiagramAtom::new(p.pred, &atom_args),
        };
        assert!(
            model.eval_lit(&lit),
            "{rule_id}: generated model violates a prerequisite"
        );
    }
    assert_eq!(
        witness_conclusions(model, rule, args),
        Some(true),
        "{rule_id}: no analytic witness found"
    );
}

#[test]
fn every_construction_rule_is_analytically_witnessable() {
    let mut seen: Vec<&str> = Vec::new();
    let mut rng = Rng(20260808);
    for round in 0..40u64 {
        let _ = round;
        // points.1
        let m = Model { objects: vec![] };
        assert_witness(&m, "points.1", &[]);

        // points.2: a point on a line
        let (a, b) = distinct(&mut rng);
        let m = Model {
            objects: vec![RatObject::Line(line_through(&a, &b))],
        };
        assert_witness(&m, "points.2", &[Obj(0)]);

        // points.3 / points.4: between and extending
        let (a, b) = distinct(&mut rng);
        let m = Model {
            objects: vec![
                RatObject::Line(line_through(&a, &b)),
                RatObject::Point(a.clone()),
                RatObject::Point(b.clone()),
            ],
        };
        assert_witness(&m, "points.3", &[Obj(0), Obj(1), Obj(2)]);
        assert_witness(&m, "points.4", &[Obj(0), Obj(1), Obj(2)]);

        // points.5 / points.6: off-line point and its mirror
        let (a, b) = distinct(&mut rng);
        let l = line_through(&a, &b);
        let off = loop {
            let p = pt(&mut rng);
            if !(&l.a * &p.x + &l.b * &p.y + &l.c).eq(&rat(0, 1)) {
                break p;
            }
        };
        let m = Model {
            objects: vec![RatObject::Line(l), RatObject::Point(off)],
        };
        assert_witness(&m, "points.5", &[Obj(0), Obj(1)]);
        assert_witness(&m, "points.6", &[Obj(0), Obj(1)]);

        // points.7 / 8 / 9: on, inside, outside a circle
        let (c, t) = distinct(&mut rng);
        let m = Model {
            objects: vec![RatObject::Circle(circle_through(&c, &t))],
        };
        assert_witness(&m, "points.7", &[Obj(0)]);
        assert_witness(&m, "points.8", &[Obj(0)]);
        assert_witness(&m, "points.9", &[Obj(0)]);

        // lines.1 / circles.1
        let (a, b) = distinct(&mut rng);
        let m = Model {
            objects: vec![RatObject::Point(a), RatObject::Point(b)],
        };
        assert_witness(&m, "lines.1", &[Obj(0), Obj(1)]);
        assert_witness(&m, "circles.1", &[Obj(0), Obj(1)]);

        // intersections.1: two crossing lines
        let (a, b) = distinct(&mut rng);
        let (c, d) = distinct(&mut rng);
        let l1 = line_through(&a, &b);
        let l2 = line_through(&c, &d);
        if !(&l1.a * &l2.b - &l1.b * &l2.a).eq(&rat(0, 1)) {
            let m = Model {
                objects: vec![RatObject::Line(l1), RatObject::Line(l2)],
            };
            assert_witness(&m, "intersections.1", &[Obj(0), Obj(1)]);
            seen.push("intersections.1");
        }

        // intersections.2 / 3: a secant line
        let (a, b) = distinct(&mut rng);
        let l = line_through(&a, &b);
        let center = pt(&mut rng);
        // Radius through a point of the line that is not the foot.
        let through = if (&l.a * &center.x + &l.b * &center.y + &l.c).eq(&rat(0, 1)) {
            // center on the line: any distinct point works
            if a != center {
                a.clone()
            } else {
                b.clone()
            }
        } else {
            // a or b, whichever is not the foot of the perpendicular
            let v = &l.a * &center.x + &l.b * &center.y + &l.c;
            let n2 = &l.a * &l.a + &l.b * &l.b;
            let foot = RatPoint {
                x: &center.x - &l.a * &v / &n2,
                y: &center.y - &l.b * &v / &n2,
            };
            if a != foot {
                a.clone()
            } else {
                b.clone()
            }
        };
        if through != center {
            let m = Model {
                objects: vec![
                    RatObject::Line(l),
                    RatObject::Circle(circle_through(&center, &through)),
                ],
            };
            assert_witness(&m, "intersections.2", &[Obj(0), Obj(1)]);
            assert_witness(&m, "intersections.3", &[Obj(0), Obj(1)]);
        }

        // intersections.4 / 5: chord endpoints relative to inner points
        let (ctr, far) = distinct(&mut rng);
        let l = line_through(&ctr, &far);
        // c outside: far beyond the radius along the line
        let r2 = {
            let dx = &far.x - &ctr.x;
            let dy = &far.y - &ctr.y;
            (&dx * &dx + &dy * &dy) * rat(1, 4)
        };
        let circ = RatCircle {
            cx: ctr.x.clone(),
            cy: ctr.y.clone(),
            r2,
        };
        let m = Model {
            objects: vec![
                RatObject::Line(l),
                RatObject::Circle(circ),
                RatObject::Point(ctr.clone()),
                RatObject::Point(far.clone()),
            ],
        };
        // b := center (inside, on L), c := far (outside, on L)
        assert_witness(&m, "intersections.4", &[Obj(0), Obj(1), Obj(2), Obj(3)]);
        // extending the segment from far through the center
        assert_witness(&m, "intersections.5", &[Obj(0), Obj(1), Obj(3), Obj(2)]);

        // intersections.6 / 7 / 8 / 9: two circles through a common
        // off-axis point
        let (c1, c2) = distinct(&mut rng);
        let axis = line_through(&c1, &c2);
        let w = loop {
            let p = pt(&mut rng);
            if !(&axis.a * &p.x + &axis.b * &p.y + &axis.c).eq(&rat(0, 1)) {
                break p;
            }
        };
        let m = Model {
            objects: vec![
                RatObject::Circle(circle_through(&c1, &w)),
                RatObject::Circle(circle_through(&c2, &w)),
                RatObject::Point(c1.clone()),
                RatObject::Point(c2.clone()),
                RatObject::Line(axis),
                RatObject::Point(w.clone()),
            ],
        };
        assert_witness(&m, "intersections.6", &[Obj(0), Obj(1)]);
        assert_witness(&m, "intersections.7", &[Obj(0), Obj(1)]);
        // args: alpha, beta, c, d, L, b (b off the center line: w itself)
        assert_witness(
            &m,
            "intersections.8",
            &[Obj(0), Obj(1), Obj(2), Obj(3), Obj(4), Obj(5)],
        );
        assert_witness(
            &m,
            "intersections.9",
            &[Obj(0), Obj(1), Obj(2), Obj(3), Obj(4), Obj(5)],
        );
    }
    let all: Vec<&str> = construction_catalog().iter().map(|r| r.id).collect();
    assert_eq!(all.len(), 20);
    let _ = Rat::default();
}
