//! Surface syntax tree for proof scripts. Predicates are already resolved
//! (the parser disambiguates `on` and `intersects` by sort), but arguments
//! stay name-based until the engine binds them against a live scope.

use crate::lang::{MetricRel, Pred, Sort};

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// One summand of a magnitude term, name-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MagAtomAst {
    Seg(String, String),
    Angle(String, String, String),
    Area(String, String, String),
    RightAngle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermAst {
    pub summands: Vec<MagAtomAst>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LitAst {
    Diagram {
        pos: bool,
        pred: Pred,
        args: Vec<String>,
    },
    Metric {
        pos: bool,
        rel: MetricRel,
        lhs: TermAst,
        rhs: TermAst,
    },
    Falsity,
}

impl LitAst {
    pub fn negated(&self) -> LitAst {
        match self {
            LitAst::Diagram { pos, pred, args } => LitAst::Diagram {
                pos: !pos,
                pred: *pred,
                args: args.clone(),
            },
            LitAst::Metric { pos, rel, lhs, rhs } => LitAst::Metric {
                pos: !pos,
                rel: *rel,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            },
            LitAst::Falsity => LitAst::Falsity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperKind {
    Sas,
    Sss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QedMode {
    Qed,
    Qef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub span: Span,
    pub kind: StepKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepKind {
    /// `let <names> = keyword(args) [distinct_from items]`
    Construct {
        keyword: String,
        outputs: Vec<String>,
        args: Vec<String>,
        distinct_from: Vec<String>,
    },
    /// `have`/`hence`/`contradiction`
    Have {
        lit: LitAst,
    },
    /// `by <name> applied to <args> [let <sorted outs>] [: <selected>]`
    Apply {
        theorem: String,
        args: Vec<String>,
        outputs: Vec<(String, Sort)>,
        selected: Option<Vec<LitAst>>,
    },
    /// A reductio block: must end inconsistent, exports the negation.
    Suppose {
        assumption: LitAst,
        body: Vec<Step>,
    },
    /// A two-branch case split on an atomic literal.
    Cases {
        on: LitAst,
        pos_branch: Vec<Step>,
        neg_branch: Vec<Step>,
    },
    /// Superposition as an elimination rule.
    Superpose {
        kind: SuperKind,
        /// a, b, c, d, g, L, h
        args: Vec<String>,
        /// a', b', c'
        primed: Vec<String>,
        body: Vec<Step>,
        conclude: Vec<LitAst>,
    },
    Qed {
        mode: QedMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremStatus {
    Proved,
    Assumed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremAst {
    pub span: Span,
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub assumes: Vec<LitAst>,
    pub existentials: Vec<(String, Sort)>,
    /// `None` encodes a ⊥ conclusion (impossibility theorem).
    pub concludes: Option<Vec<LitAst>>,
    pub status: TheoremStatus,
    pub proof: Vec<Step>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProofScript {
    pub imports: Vec<String>,
    pub theorems: Vec<TheoremAst>,
}

/// Zeroes all spans, for span-insensitive structural comparison.
pub fn strip_spans(script: &mut ProofScript) {
    fn steps(v: &mut [Step]) {
        for s in v {
            s.span = Span::default();
            match &mut s.kind {
                StepKind::Suppose { body, .. } => steps(body),
                StepKind::Cases {
                    pos_branch,
                    neg_branch,
                    ..
                } => {
                    steps(pos_branch);
                    steps(neg_branch);
                }
                StepKind::Superpose { body, .. } => steps(body),
                _ => {}
            }
        }
    }
    for t in &mut script.theorems {
        t.span = Span::default();
        steps(&mut t.proof);
    }
}
