//! Parser for the proof-script language (`.e` files).
//!
//! The grammar is documented in `docs/language.md`. Parsing is total: every
//! input yields either a script or a diagnostic carrying line and column.
//! Variable sorts are declared at first binding, so the parser resolves the
//! overloaded predicates (`on`, `intersects`, `=`, `!=`) while it reads,
//! and expands the defined predicates `diff_side`, `outside`, and `<=`.

mod lexer;
mod pretty;

pub use pretty::pretty;

use crate::ast::{
    LitAst, MagAtomAst, ProofScript, QedMode, Span, Step, StepKind, SuperKind, TermAst, TheoremAst,
    TheoremStatus,
};
use crate::constructions;
use crate::lang::{MetricRel, Pred, Sort};
use lexer::{lex, Tok, Token};
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct ParseError {
    pub span: Span,
    pub msg: String,
}

impl ParseError {
    fn new(span: Span, msg: impl Into<String>) -> Self {
        ParseError {
            span,
            msg: msg.into(),
        }
    }
}

/// One-line human-readable diagnostic: `file:line:col: message`.
pub fn render_diagnostic(file: &str, span: Span, msg: &str) -> String {
    format!("{file}:{}:{}: {msg}", span.line, span.col)
}

pub fn parse_script(text: &str) -> Result<ProofScript, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(toks);
    p.script()
}

/// State files reuse the literal syntax inside a `state { … }` block.
#[allow(clippy::type_complexity)]
pub fn parse_state(text: &str) -> Result<(Vec<(String, Sort)>, Vec<LitAst>), ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(toks);
    p.state_file()
}

/// Parses a single literal against a pre-declared scope (for `explain`).
pub fn parse_literal(text: &str, scope: &[(String, Sort)]) -> Result<LitAst, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(toks);
    for (n, s) in scope {
        let _ = p.bind(n, *s, Span::default());
    }
    p.single_literal()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Lexical scopes: name → sort.
    scopes: Vec<HashMap<String, Sort>>,
    /// Steps queued by expansions (a defined predicate in `have`).
    pending: Vec<Step>,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            scopes: vec![HashMap::new()],
            pending: Vec::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos.min(self.toks.len() - 1)].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn span(&self) -> Span {
        self.peek().span
    }

    fn eat_word(&mut self, w: &str) -> Result<Span, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Word(s) if s == w => Ok(t.span),
            other => Err(ParseError::new(
                t.span,
                format!("expected '{w}', found {}", show(other)),
            )),
        }
    }

    fn eat(&mut self, tok: Tok) -> Result<Span, ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(ParseError::new(
                t.span,
                format!("expected {}, found {}", show(&tok), show(&t.tok)),
            ))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(s) if s == w)
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Word(s) if !is_keyword(&s) => Ok((s, t.span)),
            other => Err(ParseError::new(
                t.span,
                format!("expected an identifier, found {}", show(&other)),
            )),
        }
    }

    // Scope helpers -------------------------------------------------------

    fn push_scope(&mut self) {
        self.scopes.push(HashMap::new());
    }

    fn pop_scope(&mut self) {
        self.scopes.pop();
    }

    fn bind(&mut self, name: &str, sort: Sort, span: Span) -> Result<(), ParseError> {
        let top = self.scopes.last_mut().unwrap();
        if top.get(name) == Some(&sort) {
            return Err(ParseError::new(
                span,
                format!("{sort} variable '{name}' is already bound"),
            ));
        }
        top.insert(name.to_string(), sort);
        Ok(())
    }

    fn sort_of(&self, name: &str) -> Option<Sort> {
        for frame in self.scopes.iter().rev() {
            if let Some(s) = frame.get(name) {
                return Some(*s);
            }
        }
        None
    }

    fn sorted_name(&mut self, expect: Option<Sort>) -> Result<(String, Span), ParseError> {
        let (n, sp) = self.ident()?;
        match (self.sort_of(&n), expect) {
            (None, _) => Err(ParseError::new(sp, format!("unknown variable '{n}'"))),
            (Some(s), Some(e)) if s != e => Err(ParseError::new(
                sp,
                format!("'{n}' is a {s}, expected a {e}"),
            )),
            _ => Ok((n, sp)),
        }
    }

    // Top level -----------------------------------------------------------

    fn script(&mut self) -> Result<ProofScript, ParseError> {
        let mut script = ProofScript::default();
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Word(w) if w == "import" => {
                    self.next();
                    let (name, _) = self.ident()?;
                    script.imports.push(name);
                }
                Tok::Word(w) if w == "theorem" => {
                    let thm = self.theorem()?;
                    if script.theorems.iter().any(|t| t.name == thm.name) {
                        return Err(ParseError::new(
                            thm.span,
                            format!("duplicate theorem name '{}'", thm.name),
                        ));
                    }
                    script.theorems.push(thm);
                }
                other => {
                    return Err(ParseError::new(
                        self.span(),
                        format!("expected 'theorem' or 'import', found {}", show(other)),
                    ))
                }
            }
        }
        Ok(script)
    }

    fn theorem(&mut self) -> Result<TheoremAst, ParseError> {
        let span = self.eat_word("theorem")?;
        let (name, _) = self.ident()?;
        self.push_scope();
        self.eat(Tok::LParen)?;
        let mut params = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let (n, s, sp) = self.sorted_decl()?;
                self.bind(&n, s, sp)?;
                params.push((n, s));
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.eat(Tok::RParen)?;
        self.eat(Tok::LBrace)?;
        let mut assumes = Vec::new();
        if self.is_word("assume") {
            self.next();
            assumes = self.literal_list()?;
        }
        self.eat_word("conclude")?;
        let mut existentials = Vec::new();
        let concludes = if self.is_word("contradiction") {
            self.next();
            None
        } else {
            if self.is_word("exists") {
                self.next();
                loop {
                    let (n, s, sp) = self.sorted_decl()?;
                    self.bind(&n, s, sp)?;
                    existentials.push((n, s));
                    if self.peek().tok == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.eat(Tok::Colon)?;
            }
            Some(self.literal_list()?)
        };
        // Existential names leave scope for the proof body; witnesses are
        // introduced by the steps themselves.
        self.pop_scope();
        self.push_scope();
        for (n, s) in &params {
            self.bind(n, *s, span).ok();
        }
        let (status, proof) = if self.is_word("assumed") {
            self.next();
            (TheoremStatus::Assumed, Vec::new())
        } else {
            self.eat_word("proof")?;
            self.eat(Tok::LBrace)?;
            let steps = self.steps()?;
            self.eat(Tok::RBrace)?;
            (TheoremStatus::Proved, steps)
        };
        self.pop_scope();
        self.eat(Tok::RBrace)?;
        Ok(TheoremAst {
            span,
            name,
            params,
            assumes,
            existentials,
            concludes,
            status,
            proof,
        })
    }

    fn sorted_decl(&mut self) -> Result<(String, Sort, Span), ParseError> {
        let t = self.next();
        let sort = match &t.tok {
            Tok::Word(w) if w == "point" => Sort::Point,
            Tok::Word(w) if w == "line" => Sort::Line,
            Tok::Word(w) if w == "circle" => Sort::Circle,
            other => {
                return Err(ParseError::new(
                    t.span,
                    format!(
                        "expected 'point', 'line' or 'circle', found {}",
                        show(other)
                    ),
                ))
            }
        };
        let (n, sp) = self.ident()?;
        Ok((n, sort, sp))
    }

    // Steps ----------------------------------------------------------------

    fn steps(&mut self) -> Result<Vec<Step>, ParseError> {
        let mut out = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::RBrace | Tok::Eof => break,
                Tok::Word(w) if w == "conclude" => break,
                _ => {
                    let s = self.step()?;
                    out.push(s);
                    out.append(&mut self.pending);
                }
            }
        }
        Ok(out)
    }

    fn step(&mut self) -> Result<Step, ParseError> {
        let span = self.span();
        match self.peek().tok.clone() {
            Tok::Word(w) if w == "let" => self.let_step(),
            Tok::Word(w) if w == "have" || w == "hence" => {
                self.next();
                let lits = self.literal_group()?;
                if lits.len() == 1 {
                    Ok(Step {
                        span,
                        kind: StepKind::Have {
                            lit: lits.into_iter().next().unwrap(),
                        },
                    })
                } else {
                    // A defined predicate expands to several have steps;
                    // only the first carries the span.
                    let mut it = lits.into_iter();
                    let first = Step {
                        span,
                        kind: StepKind::Have {
                            lit: it.next().unwrap(),
                        },
                    };
                    // Splice: wrap the rest into consecutive steps by
                    // returning a synthetic block is unnecessary — the
                    // caller collects a Vec, so push back into the stream.
                    self.pending.extend(it.map(|lit| Step {
                        span,
                        kind: StepKind::Have { lit },
                    }));
                    Ok(first)
                }
            }
            Tok::Word(w) if w == "contradiction" => {
                self.next();
                Ok(Step {
                    span,
                    kind: StepKind::Have {
                        lit: LitAst::Falsity,
                    },
                })
            }
            Tok::Word(w) if w == "by" => self.apply_step(),
            Tok::Word(w) if w == "suppose" => {
                self.next();
                let lit = self.single_literal()?;
                self.eat(Tok::LBrace)?;
                self.push_scope();
                let body = self.steps()?;
                self.pop_scope();
                self.eat(Tok::RBrace)?;
                Ok(Step {
                    span,
                    kind: StepKind::Suppose {
                        assumption: lit,
                        body,
                    },
                })
            }
            Tok::Word(w) if w == "case" => self.case_step(),
            Tok::Word(w) if w == "superpose-sas" || w == "superpose-sss" => self.superpose_step(),
            Tok::Word(w) if w == "qed" => {
                self.next();
                Ok(Step {
                    span,
                    kind: StepKind::Qed { mode: QedMode::Qed },
                })
            }
            Tok::Word(w) if w == "qef" => {
                self.next();
                Ok(Step {
                    span,
                    kind: StepKind::Qed { mode: QedMode::Qef },
                })
            }
            other => Err(ParseError::new(
                span,
                format!("expected a proof step, found {}", show(&other)),
            )),
        }
    }

    fn let_step(&mut self) -> Result<Step, ParseError> {
        let span = self.eat_word("let")?;
        let mut outputs = Vec::new();
        loop {
            // Optional sort keyword for readability.
            if self.is_word("point") || self.is_word("line") || self.is_word("circle") {
                self.next();
            }
            let (n, _) = self.ident()?;
            outputs.push(n);
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.eat(Tok::Equals)?;
        let (keyword, ksp) = self.ident()?;
        self.eat(Tok::LParen)?;
        let mut args = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let (n, _) = self.sorted_name(None)?;
                args.push(n);
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.eat(Tok::RParen)?;
        let mut distinct_from = Vec::new();
        if self.is_word("distinct_from") {
            self.next();
            loop {
                let (n, _) = self.sorted_name(None)?;
                distinct_from.push(n);
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        // Resolve the rule now so the new names get sorts in scope.
        let sorts: Vec<Sort> = args
            .iter()
            .map(|a| self.sort_of(a).expect("checked by sorted_name"))
            .collect();
        let Some((rule, _)) = constructions::resolve_rule(&keyword, &sorts) else {
            return Err(ParseError::new(
                ksp,
                format!("unknown construction '{keyword}' for these argument sorts"),
            ));
        };
        if rule.outputs.len() != outputs.len() {
            return Err(ParseError::new(
                ksp,
                format!(
                    "'{keyword}' introduces {} object(s), {} name(s) given",
                    rule.outputs.len(),
                    outputs.len()
                ),
            ));
        }
        for (n, (_, s)) in outputs.iter().zip(&rule.outputs) {
            self.bind(n, *s, span)?;
        }
        Ok(Step {
            span,
            kind: StepKind::Construct {
                keyword,
                outputs,
                args,
                distinct_from,
            },
        })
    }

    fn apply_step(&mut self) -> Result<Step, ParseError> {
        let span = self.eat_word("by")?;
        let (theorem, _) = self.ident()?;
        self.eat_word("applied")?;
        self.eat_word("to")?;
        let mut args = Vec::new();
        loop {
            let (n, _) = self.sorted_name(None)?;
            args.push(n);
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        let mut outputs = Vec::new();
        // A following construction step also starts with `let`; witness
        // lists are recognized by the sort keyword (or `_`) after it.
        let let_is_witnesses = self.is_word("let")
            && matches!(
                &self.peek_at(1).tok,
                Tok::Word(w) if w == "point" || w == "line" || w == "circle" || w == "_"
            );
        if let_is_witnesses {
            self.next();
            loop {
                if matches!(&self.peek().tok, Tok::Word(w) if w == "_") {
                    // placeholder: an unused witness
                    let sp = self.next().span;
                    let (_, sort, _) = (String::from("_"), Sort::Point, sp);
                    // `_` still needs a sort keyword? No: bare underscore.
                    outputs.push(("_".to_string(), sort));
                } else {
                    let (n, s, sp) = self.sorted_decl()?;
                    self.bind(&n, s, sp)?;
                    outputs.push((n, s));
                }
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        let selected = if self.peek().tok == Tok::Colon {
            self.next();
            Some(self.literal_list()?)
        } else {
            None
        };
        Ok(Step {
            span,
            kind: StepKind::Apply {
                theorem,
                args,
                outputs,
                selected,
            },
        })
    }

    fn case_step(&mut self) -> Result<Step, ParseError> {
        let span = self.eat_word("case")?;
        let on = self.single_literal()?;
        self.eat(Tok::LBrace)?;
        self.push_scope();
        let pos_branch = self.steps()?;
        let pos_names: HashMap<String, Sort> = self.scopes.last().unwrap().clone();
        self.pop_scope();
        self.eat(Tok::RBrace)?;
        let sp2 = self.eat_word("case")?;
        let second = self.single_literal()?;
        if second != on.negated() {
            return Err(ParseError::new(
                sp2,
                "the second case must assume the negation of the first".to_string(),
            ));
        }
        self.eat(Tok::LBrace)?;
        self.push_scope();
        let neg_branch = self.steps()?;
        let neg_names: HashMap<String, Sort> = self.scopes.last().unwrap().clone();
        self.pop_scope();
        self.eat(Tok::RBrace)?;
        // Names constructed in both branches with one sort survive the
        // split (the engine checks the exported facts).
        for (n, s) in &pos_names {
            if neg_names.get(n) == Some(s) {
                self.bind(n, *s, span).ok();
            }
        }
        Ok(Step {
            span,
            kind: StepKind::Cases {
                on,
                pos_branch,
                neg_branch,
            },
        })
    }

    fn superpose_step(&mut self) -> Result<Step, ParseError> {
        let t = self.next();
        let kind = match &t.tok {
            Tok::Word(w) if w == "superpose-sas" => SuperKind::Sas,
            _ => SuperKind::Sss,
        };
        let span = t.span;
        self.eat(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            let (n, _) = self.sorted_name(None)?;
            args.push(n);
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.eat(Tok::RParen)?;
        if args.len() != 7 {
            return Err(ParseError::new(
                span,
                format!(
                    "superposition takes 7 arguments (a, b, c, d, g, L, h), got {}",
                    args.len()
                ),
            ));
        }
        self.eat_word("as")?;
        let mut primed = Vec::new();
        self.push_scope();
        for i in 0..3 {
            let (n, sp) = self.ident()?;
            self.bind(&n, Sort::Point, sp)?;
            primed.push(n);
            if i < 2 {
                self.eat(Tok::Comma)?;
            }
        }
        self.eat(Tok::LBrace)?;
        let body = self.steps()?;
        self.eat_word("conclude")?;
        let conclude = self.literal_list()?;
        self.pop_scope();
        self.eat(Tok::RBrace)?;
        Ok(Step {
            span,
            kind: StepKind::Superpose {
                kind,
                args,
                primed,
                body,
                conclude,
            },
        })
    }

    // Literals ---------------------------------------------------------

    fn literal_list(&mut self) -> Result<Vec<LitAst>, ParseError> {
        let mut out = self.literal_group()?;
        while self.peek().tok == Tok::Comma {
            self.next();
            out.extend(self.literal_group()?);
        }
        Ok(out)
    }

    /// One surface literal, which may expand to several basic literals.
    fn literal_group(&mut self) -> Result<Vec<LitAst>, ParseError> {
        let span = self.span();
        // Negation prefix.
        if self.peek().tok == Tok::Bang {
            self.next();
            let inner = self.literal_group()?;
            if inner.len() != 1 {
                return Err(ParseError::new(
                    span,
                    "a defined predicate cannot be negated",
                ));
            }
            return Ok(vec![inner[0].negated()]);
        }
        if self.is_word("contradiction") {
            self.next();
            return Ok(vec![LitAst::Falsity]);
        }
        // Magnitude term comparisons.
        if self.peek_is_term_start() {
            let lhs = self.term()?;
            let t = self.next();
            let (rel, pos, swap) = match t.tok {
                Tok::Equals => (MetricRel::Eq, true, false),
                Tok::NotEquals => (MetricRel::Eq, false, false),
                Tok::Less => (MetricRel::Lt, true, false),
                // x <= y is shorthand for !(y < x)
                Tok::LessEq => (MetricRel::Lt, false, true),
                other => {
                    return Err(ParseError::new(
                        t.span,
                        format!("expected a metric relation, found {}", show(&other)),
                    ))
                }
            };
            let rhs = self.term()?;
            let (lhs, rhs) = if swap { (rhs, lhs) } else { (lhs, rhs) };
            return Ok(vec![LitAst::Metric { pos, rel, lhs, rhs }]);
        }
        // Predicate application or equality between objects.
        let (name, nsp) = self.ident()?;
        if self.peek().tok == Tok::LParen {
            self.next();
            let mut args = Vec::new();
            if self.peek().tok != Tok::RParen {
                loop {
                    let (n, _) = self.sorted_name(None)?;
                    args.push(n);
                    if self.peek().tok == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.eat(Tok::RParen)?;
            return self.resolve_predicate(&name, args, nsp);
        }
        // Object equality / disequality.
        let t = self.next();
        let pos = match t.tok {
            Tok::Equals => true,
            Tok::NotEquals => false,
            other => {
                return Err(ParseError::new(
                    t.span,
                    format!("expected '=', '!=' or '(', found {}", show(&other)),
                ))
            }
        };
        let (rhs, rsp) = self.ident()?;
        let ls = self
            .sort_of(&name)
            .ok_or_else(|| ParseError::new(nsp, format!("unknown variable '{name}'")))?;
        let rs = self
            .sort_of(&rhs)
            .ok_or_else(|| ParseError::new(rsp, format!("unknown variable '{rhs}'")))?;
        if ls != rs {
            return Err(ParseError::new(
                nsp,
                format!("cannot equate a {ls} with a {rs}"),
            ));
        }
        let pred = match ls {
            Sort::Point => Pred::EqPoint,
            Sort::Line => Pred::EqLine,
            Sort::Circle => Pred::EqCircle,
        };
        Ok(vec![LitAst::Diagram {
            pos,
            pred,
            args: vec![name, rhs],
        }])
    }

    fn resolve_predicate(
        &self,
        name: &str,
        args: Vec<String>,
        span: Span,
    ) -> Result<Vec<LitAst>, ParseError> {
        let sort = |p: &Parser, n: &String| p.sort_of(n).expect("args pre-checked");
        let expect = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                Err(ParseError::new(
                    span,
                    format!(
                        "'{name}' expects {n} argument{}, got {}",
                        if n == 1 { "" } else { "s" },
                        args.len()
                    ),
                ))
            } else {
                Ok(())
            }
        };
        let check_sorts = |pred: Pred| -> Result<(), ParseError> {
            for (a, s) in args.iter().zip(pred.signature()) {
                let have = sort(self, a);
                if have != *s {
                    return Err(ParseError::new(
                        span,
                        format!("argument '{a}' of '{name}' must be a {s}, got a {have}"),
                    ));
                }
            }
            Ok(())
        };
        let lit = |pred: Pred, args: Vec<String>| LitAst::Diagram {
            pos: true,
            pred,
            args,
        };
        match name {
            "on" => {
                expect(2)?;
                let pred = match sort(self, &args[1]) {
                    Sort::Line => Pred::OnLine,
                    Sort::Circle => Pred::OnCircle,
                    Sort::Point => {
                        return Err(ParseError::new(
                            span,
                            "'on' expects a line or a circle as its second argument",
                        ))
                    }
                };
                check_sorts(pred)?;
                Ok(vec![lit(pred, args)])
            }
            "between" => {
                expect(3)?;
                check_sorts(Pred::Between)?;
                Ok(vec![lit(Pred::Between, args)])
            }
            "same_side" => {
                expect(3)?;
                check_sorts(Pred::SameSide)?;
                Ok(vec![lit(Pred::SameSide, args)])
            }
            "inside" => {
                expect(2)?;
                check_sorts(Pred::Inside)?;
                Ok(vec![lit(Pred::Inside, args)])
            }
            "center" => {
                expect(2)?;
                check_sorts(Pred::Center)?;
                Ok(vec![lit(Pred::Center, args)])
            }
            "intersects" => {
                expect(2)?;
                let (s0, s1) = (sort(self, &args[0]), sort(self, &args[1]));
                let (pred, args) = match (s0, s1) {
                    (Sort::Line, Sort::Line) => (Pred::IntersectsLL, args),
                    (Sort::Line, Sort::Circle) => (Pred::IntersectsLC, args),
                    (Sort::Circle, Sort::Line) => {
                        (Pred::IntersectsLC, vec![args[1].clone(), args[0].clone()])
                    }
                    (Sort::Circle, Sort::Circle) => (Pred::IntersectsCC, args),
                    _ => {
                        return Err(ParseError::new(
                            span,
                            "'intersects' relates lines and circles",
                        ))
                    }
                };
                Ok(vec![lit(pred, args)])
            }
            "diff_side" => {
                expect(3)?;
                check_sorts(Pred::SameSide)?;
                let (a, b, l) = (args[0].clone(), args[1].clone(), args[2].clone());
                Ok(vec![
                    LitAst::Diagram {
                        pos: false,
                        pred: Pred::OnLine,
                        args: vec![a.clone(), l.clone()],
                    },
                    LitAst::Diagram {
                        pos: false,
                        pred: Pred::OnLine,
                        args: vec![b.clone(), l.clone()],
                    },
                    LitAst::Diagram {
                        pos: false,
                        pred: Pred::SameSide,
                        args: vec![a, b, l],
                    },
                ])
            }
            "outside" => {
                expect(2)?;
                check_sorts(Pred::Inside)?;
                let (a, c) = (args[0].clone(), args[1].clone());
                Ok(vec![
                    LitAst::Diagram {
                        pos: false,
                        pred: Pred::Inside,
                        args: vec![a.clone(), c.clone()],
                    },
                    LitAst::Diagram {
                        pos: false,
                        pred: Pred::OnCircle,
                        args: vec![a, c],
                    },
                ])
            }
            other => Err(ParseError::new(
                span,
                format!("unknown predicate '{other}'"),
            )),
        }
    }

    fn peek_is_term_start(&self) -> bool {
        match &self.peek().tok {
            Tok::Zero => true,
            Tok::Word(w) => {
                matches!(w.as_str(), "seg" | "angle" | "area" | "right_angle")
            }
            _ => false,
        }
    }

    fn term(&mut self) -> Result<TermAst, ParseError> {
        let mut summands = Vec::new();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Zero => {}
                Tok::Word(w) if w == "right_angle" => summands.push(MagAtomAst::RightAngle),
                Tok::Word(w) if w == "seg" => {
                    let (a, b) = self.two_points()?;
                    summands.push(MagAtomAst::Seg(a, b));
                }
                Tok::Word(w) if w == "angle" => {
                    let (a, b, c) = self.three_points()?;
                    summands.push(MagAtomAst::Angle(a, b, c));
                }
                Tok::Word(w) if w == "area" => {
                    let (a, b, c) = self.three_points()?;
                    summands.push(MagAtomAst::Area(a, b, c));
                }
                other => {
                    return Err(ParseError::new(
                        t.span,
                        format!("expected a magnitude, found {}", show(other)),
                    ))
                }
            }
            if self.peek().tok == Tok::Plus {
                self.next();
            } else {
                break;
            }
        }
        Ok(TermAst { summands })
    }

    fn two_points(&mut self) -> Result<(String, String), ParseError> {
        self.eat(Tok::LParen)?;
        let (a, _) = self.sorted_name(Some(Sort::Point))?;
        self.eat(Tok::Comma)?;
        let (b, _) = self.sorted_name(Some(Sort::Point))?;
        self.eat(Tok::RParen)?;
        Ok((a, b))
    }

    fn three_points(&mut self) -> Result<(String, String, String), ParseError> {
        self.eat(Tok::LParen)?;
        let (a, _) = self.sorted_name(Some(Sort::Point))?;
        self.eat(Tok::Comma)?;
        let (b, _) = self.sorted_name(Some(Sort::Point))?;
        self.eat(Tok::Comma)?;
        let (c, _) = self.sorted_name(Some(Sort::Point))?;
        self.eat(Tok::RParen)?;
        Ok((a, b, c))
    }

    fn single_literal(&mut self) -> Result<LitAst, ParseError> {
        let span = self.span();
        let lits = self.literal_group()?;
        if lits.len() != 1 {
            return Err(ParseError::new(
                span,
                "a defined predicate cannot be used here; state the basic literals",
            ));
        }
        Ok(lits.into_iter().next().unwrap())
    }

    // State files ---------------------------------------------------------

    #[allow(clippy::type_complexity)]
    fn state_file(&mut self) -> Result<(Vec<(String, Sort)>, Vec<LitAst>), ParseError> {
        self.eat_word("state")?;
        self.eat(Tok::LBrace)?;
        let mut decls = Vec::new();
        let mut lits = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Eof => return Err(ParseError::new(self.span(), "unterminated state block")),
                Tok::Comma => {
                    self.next();
                }
                Tok::Word(w) if w == "point" || w == "line" || w == "circle" => {
                    let (n, s, sp) = self.sorted_decl()?;
                    self.bind(&n, s, sp)?;
                    decls.push((n, s));
                }
                _ => {
                    lits.extend(self.literal_group()?);
                }
            }
        }
        Ok((decls, lits))
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(
        w,
        "theorem"
            | "assume"
            | "conclude"
            | "exists"
            | "proof"
            | "assumed"
            | "import"
            | "let"
            | "have"
            | "hence"
            | "suppose"
            | "case"
            | "by"
            | "applied"
            | "to"
            | "as"
            | "distinct_from"
            | "superpose-sas"
            | "superpose-sss"
            | "contradiction"
            | "qed"
            | "qef"
            | "point"
            | "line"
            | "circle"
            | "state"
            | "seg"
            | "angle"
            | "area"
            | "right_angle"
    )
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("'{w}'"),
        Tok::Zero => "'0'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBrace => "'{'".into(),
        Tok::RBrace => "'}'".into(),
        Tok::Comma => "','".into(),
        Tok::Colon => "':'".into(),
        Tok::Equals => "'='".into(),
        Tok::NotEquals => "'!='".into(),
        Tok::Less => "'<'".into(),
        Tok::LessEq => "'<='".into(),
        Tok::Plus => "'+'".into(),
        Tok::Bang => "'!'".into(),
        Tok::Eof => "end of input".into(),
    }
}
