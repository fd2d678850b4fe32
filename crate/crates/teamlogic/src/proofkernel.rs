//! Fitch-style proof scripts for independence logic with weak negation
//! elimination, and a checker for them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::entailment::RuleInstance;
use crate::formula::{alpha_eq, expand_sugar, free_vars, is_quantifier_free_fo, Formula, Term, Var};
use crate::genatom::{builtin_registry, AtomRegistry};
use crate::negation::{wneg_with, NegationError};
use crate::parser::{parse_formula_with, print_formula, ParseOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Hyp,
    Refl,
    AndI,
    AndE,
    OrI,
    ExistsI,
    ExistsE,
    WnegE,
    IncPro,
    IncTrs,
    IncCmp,
    IncExt,
    IndE,
    Fo,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::Hyp,
        Rule::Refl,
        Rule::AndI,
        Rule::AndE,
        Rule::OrI,
        Rule::ExistsI,
        Rule::ExistsE,
        Rule::WnegE,
        Rule::IncPro,
        Rule::IncTrs,
        Rule::IncCmp,
        Rule::IncExt,
        Rule::IndE,
        Rule::Fo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Hyp => "hyp",
            Rule::Refl => "refl",
            Rule::AndI => "andI",
            Rule::AndE => "andE",
            Rule::OrI => "orI",
            Rule::ExistsI => "existsI",
            Rule::ExistsE => "existsE",
            Rule::WnegE => "wnegE",
            Rule::IncPro => "incPro",
            Rule::IncTrs => "incTrs",
            Rule::IncCmp => "incCmp",
            Rule::IncExt => "incExt",
            Rule::IndE => "indE",
            Rule::Fo => "fo",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cite {
    Line(usize),
    Block(usize),
}

impl fmt::Display for Cite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cite::Line(n) => write!(f, "{n}"),
            Cite::Block(n) => write!(f, "[{n}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofLine {
    Step { number: usize, formula: Formula, rule: Rule, cites: Vec<Cite> },
    Assume { number: usize, formula: Formula },
    Qed { block: usize },
}

impl ProofLine {
    pub fn number(&self) -> Option<usize> {
        match self {
            ProofLine::Step { number, .. } | ProofLine::Assume { number, .. } => Some(*number),
            ProofLine::Qed { .. } => None,
        }
    }

    pub fn formula(&self) -> Option<&Formula> {
        match self {
            ProofLine::Step { formula, .. } | ProofLine::Assume { formula, .. } => Some(formula),
            ProofLine::Qed { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub lines: Vec<ProofLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub hyps: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("script line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("bounded first-order step needs quantifier-free first-order formulas")]
    NotQuantifierFree,
    #[error("variable {0} is free both in the formula to close and in the context")]
    NotDisjoint(Var),
    #[error(transparent)]
    Negation(#[from] NegationError),
    #[error(transparent)]
    Rejected(#[from] Rejection),
    #[error("derivation hypothesis {0} is not part of the context")]
    UnknownHypothesis(String),
}

fn split_justification(text: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut cut = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => cut = Some(i),
            _ => {}
        }
    }
    cut.map(|i| (&text[..i], &text[i + 1..]))
}

pub fn parse_proof(text: &str) -> Result<ProofScript, KernelError> {
    parse_proof_with(text, builtin_registry())
}

pub fn parse_proof_with(text: &str, registry: &AtomRegistry) -> Result<ProofScript, KernelError> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |message: String| KernelError::Syntax { line: idx + 1, message };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let formula =
            |s: &str| parse_formula_with(s.trim(), &ParseOptions::raw(), registry).map_err(|e| err(e.to_string()));
        if let Some(rest) = line.strip_prefix("qed") {
            let block = rest.trim().parse().map_err(|_| err("expected 'qed N'".into()))?;
            lines.push(ProofLine::Qed { block });
            continue;
        }
        let (num, rest) = line.split_once('.').ok_or_else(|| err("expected a line number".into()))?;
        let number: usize = num.trim().parse().map_err(|_| err(format!("bad line number '{num}'")))?;
        let rest = rest.trim();
        if let Some(body) = rest.strip_prefix("assume ") {
            lines.push(ProofLine::Assume { number, formula: formula(body)? });
            continue;
        }
        let (ftext, just) = split_justification(rest).ok_or_else(|| err("expected '; RULE cites'".into()))?;
        let mut words = just.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty());
        let rname = words.next().ok_or_else(|| err("missing rule name".into()))?;
        let rule = Rule::from_name(rname).ok_or_else(|| err(format!("unknown rule '{rname}'")))?;
        let cites = words
            .map(|w| {
                let (inner, block) = match w.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                    Some(s) => (s, true),
                    None => (w, false),
                };
                let n: usize = inner.parse().map_err(|_| err(format!("bad citation '{w}'")))?;
                Ok(if block { Cite::Block(n) } else { Cite::Line(n) })
            })
            .collect::<Result<Vec<_>, KernelError>>()?;
        lines.push(ProofLine::Step { number, formula: formula(ftext)?, rule, cites });
    }
    Ok(ProofScript { lines })
}

pub fn print_proof(script: &ProofScript) -> String {
    let mut out = String::new();
    let mut depth = 0;
    for line in &script.lines {
        match line {
            ProofLine::Step { number, formula, rule, cites } => {
                out.push_str(&"  ".repeat(depth));
                out.push_str(&format!("{number}. {} ; {}", print_formula(formula), rule.name()));
                for c in cites {
                    out.push_str(&format!(" {c}"));
                }
            }
            ProofLine::Assume { number, formula } => {
                out.push_str(&"  ".repeat(depth));
                out.push_str(&format!("{number}. assume {}", print_formula(formula)));
                depth += 1;
            }
            ProofLine::Qed { block } => {
                depth = depth.saturating_sub(1);
                out.push_str(&"  ".repeat(depth));
                out.push_str(&format!("qed {block}"));
            }
        }
        out.push('\n');
    }
    out
}

struct Entry<'s> {
    formula: &'s Formula,
    scope: Vec<usize>,
    pos: usize,
}

struct BlockInfo {
    parent: Vec<usize>,
    last: usize,
    closed_at: usize,
}

struct Layout<'s> {
    entries: BTreeMap<usize, Entry<'s>>,
    blocks: BTreeMap<usize, BlockInfo>,
    hyps: Vec<&'s Formula>,
    conclusion: usize,
}

fn reject<T>(line: usize, reason: impl Into<String>) -> Result<T, Rejection> {
    Err(Rejection { line, reason: reason.into() })
}

fn layout(script: &ProofScript) -> Result<Layout<'_>, Rejection> {
    let mut entries = BTreeMap::new();
    let mut blocks: BTreeMap<usize, BlockInfo> = BTreeMap::new();
    let mut open: Vec<usize> = Vec::new();
    let mut last_in: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut hyps = Vec::new();
    let mut expected = 1;
    let mut conclusion = None;
    for (pos, line) in script.lines.iter().enumerate() {
        match line {
            ProofLine::Qed { block } => {
                let Some(&top) = open.last() else {
                    return reject(expected, format!("qed {block} without an open subproof"));
                };
                if top != *block {
                    return reject(expected, format!("qed {block} closes out of order; {top} is innermost"));
                }
                let inner = open.clone();
                open.pop();
                let last = last_in.get(&inner).copied().unwrap_or(top);
                blocks.insert(top, BlockInfo { parent: open.clone(), last, closed_at: pos });
            }
            ProofLine::Step { number, formula, .. } | ProofLine::Assume { number, formula } => {
                if *number != expected {
                    return reject(*number, format!("expected line number {expected}"));
                }
                expected += 1;
                if let ProofLine::Assume { .. } = line {
                    open.push(*number);
                } else {
                    last_in.insert(open.clone(), *number);
                    if open.is_empty() {
                        conclusion = Some(*number);
                    }
                }
                if let ProofLine::Step { rule: Rule::Hyp, .. } = line {
                    if !open.is_empty() {
                        return reject(*number, "hypotheses must stand outside every subproof");
                    }
                    hyps.push(formula);
                }
                entries.insert(*number, Entry { formula, scope: open.clone(), pos });
            }
        }
    }
    if let Some(b) = open.last() {
        return reject(*b, "subproof is never closed");
    }
    let Some(conclusion) = conclusion else {
        return reject(expected, "script has no conclusion outside subproofs");
    };
    Ok(Layout { entries, blocks, hyps, conclusion })
}

fn is_prefix(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && a == &b[..a.len()]
}

enum Cited<'s> {
    Line(&'s Formula),
    Block { assumption: &'s Formula, conclusion: &'s Formula },
}

impl<'s> Layout<'s> {
    fn cited(&self, at: usize, c: Cite) -> Result<Cited<'s>, Rejection> {
        let here = &self.entries[&at];
        match c {
            Cite::Line(n) => {
                let Some(e) = self.entries.get(&n) else { return reject(at, format!("no line {n}")) };
                if n >= at {
                    return reject(at, format!("line {n} is not earlier"));
                }
                if !is_prefix(&e.scope, &here.scope) {
                    return reject(at, format!("line {n} is inside a closed subproof"));
                }
                Ok(Cited::Line(e.formula))
            }
            Cite::Block(n) => {
                let Some(b) = self.blocks.get(&n) else { return reject(at, format!("no subproof opened at {n}")) };
                if b.closed_at >= here.pos || !is_prefix(&b.parent, &here.scope) {
                    return reject(at, format!("subproof {n} is not available here"));
                }
                Ok(Cited::Block { assumption: self.entries[&n].formula, conclusion: self.entries[&b.last].formula })
            }
        }
    }

    fn open_assumptions(&self, at: usize) -> Vec<&'s Formula> {
        let mut out: Vec<&Formula> = self.hyps.clone();
        out.extend(self.entries[&at].scope.iter().map(|k| self.entries[k].formula));
        out
    }
}

/// Matches `pat` against `target` where the `holes` of `pat` may stand for terms.
fn match_formula(pat: &Formula, target: &Formula, holes: &BTreeSet<Var>, bind: &mut BTreeMap<Var, Term>) -> bool {
    Matcher { holes, bind, env: Vec::new() }.formula(pat, target)
}

struct Matcher<'a> {
    holes: &'a BTreeSet<Var>,
    bind: &'a mut BTreeMap<Var, Term>,
    env: Vec<(Var, Var)>,
}

impl Matcher<'_> {
    fn term(&mut self, p: &Term, t: &Term) -> bool {
        let bound_t = |u: &Var, env: &[(Var, Var)]| env.iter().rposition(|(_, b)| b == u);
        match p {
            Term::Var(v) => {
                if let Some(pos) = self.env.iter().rposition(|(a, _)| a == v) {
                    return matches!(t, Term::Var(u) if bound_t(u, &self.env) == Some(pos));
                }
                if let Term::Var(u) = t {
                    if bound_t(u, &self.env).is_some() {
                        return false;
                    }
                }
                if self.holes.contains(v) {
                    match self.bind.get(v) {
                        Some(b) => b == t,
                        None => {
                            self.bind.insert(v.clone(), t.clone());
                            true
                        }
                    }
                } else {
                    p == t
                }
            }
            Term::Const(_) => p == t,
        }
    }

    fn terms(&mut self, p: &[Term], t: &[Term]) -> bool {
        p.len() == t.len() && p.iter().zip(t).all(|(a, b)| self.term(a, b))
    }

    fn vars(&mut self, p: &[Var], t: &[Var]) -> bool {
        p.len() == t.len()
            && p.iter().zip(t).all(|(a, b)| {
                self.term(&Term::Var(a.clone()), &Term::Var(b.clone()))
                    && self.bind.get(a).is_none_or(|x| matches!(x, Term::Var(_)))
            })
    }

    fn formula(&mut self, p: &Formula, t: &Formula) -> bool {
        use Formula as F;
        match (p, t) {
            (F::Rel(a, x), F::Rel(b, y)) | (F::NegRel(a, x), F::NegRel(b, y)) => a == b && self.terms(x, y),
            (F::Eq(a, b), F::Eq(c, d)) | (F::NegEq(a, b), F::NegEq(c, d)) => self.term(a, c) && self.term(b, d),
            (F::SeqEq(a, b), F::SeqEq(c, d)) | (F::SeqNeq(a, b), F::SeqNeq(c, d)) => {
                self.terms(a, c) && self.terms(b, d)
            }
            (F::Bot, F::Bot) | (F::Top, F::Top) => true,
            (F::Dep { det: a, dep: b }, F::Dep { det: c, dep: d }) => self.vars(a, c) && self.vars(b, d),
            (F::Ind { xs: a, zs: b, ys: c }, F::Ind { xs: d, zs: e, ys: g }) => {
                self.vars(a, d) && self.vars(b, e) && self.vars(c, g)
            }
            (F::Inc { xs: a, ys: b }, F::Inc { xs: c, ys: d }) => self.vars(a, c) && self.vars(b, d),
            (F::Gen { name: a, args: x }, F::Gen { name: b, args: y }) => a == b && self.vars(x, y),
            (F::And(a, b), F::And(c, d))
            | (F::SplitOr(a, b), F::SplitOr(c, d))
            | (F::BoolOr(a, b), F::BoolOr(c, d))
            | (F::Implies(a, b), F::Implies(c, d)) => self.formula(a, c) && self.formula(b, d),
            (F::WNeg(a), F::WNeg(b)) => self.formula(a, b),
            (F::Exists(v, a), F::Exists(w, b))
            | (F::Forall(v, a), F::Forall(w, b))
            | (F::Exists1(v, a), F::Exists1(w, b))
            | (F::Forall1(v, a), F::Forall1(w, b)) => {
                self.env.push((v.clone(), w.clone()));
                let r = self.formula(a, b);
                self.env.pop();
                r
            }
            _ => false,
        }
    }
}

fn exists_prefix(f: &Formula) -> (Vec<Var>, &Formula) {
    let mut vs = Vec::new();
    let mut cur = f;
    while let Formula::Exists(v, b) = cur {
        vs.push(v.clone());
        cur = b;
    }
    (vs, cur)
}

/// Pairs up the terms of two quantifier-free formulas of the same shape.
fn zip_terms(a: &Formula, b: &Formula, f: &mut impl FnMut(&Term, &Term) -> bool) -> bool {
    use Formula as F;
    let all = |x: &[Term], y: &[Term], f: &mut dyn FnMut(&Term, &Term) -> bool| {
        x.len() == y.len() && x.iter().zip(y).all(|(s, t)| f(s, t))
    };
    match (a, b) {
        (F::Rel(r, x), F::Rel(s, y)) | (F::NegRel(r, x), F::NegRel(s, y)) => r == s && all(x, y, f),
        (F::Eq(p, q), F::Eq(r, s)) | (F::NegEq(p, q), F::NegEq(r, s)) => f(p, r) && f(q, s),
        (F::SeqEq(p, q), F::SeqEq(r, s)) | (F::SeqNeq(p, q), F::SeqNeq(r, s)) => all(p, r, f) && all(q, s, f),
        (F::Top, F::Top) | (F::Bot, F::Bot) => true,
        (F::And(p, q), F::And(r, s)) | (F::SplitOr(p, q), F::SplitOr(r, s)) | (F::Implies(p, q), F::Implies(r, s)) => {
            zip_terms(p, r, f) && zip_terms(q, s, f)
        }
        _ => false,
    }
}

fn tvars(vs: &[Var]) -> Vec<Term> {
    vs.iter().cloned().map(Term::Var).collect()
}

struct Checker<'s, 'r> {
    lay: Layout<'s>,
    registry: &'r AtomRegistry,
}

impl<'s> Checker<'s, '_> {
    fn step(&self, at: usize, formula: &Formula, rule: Rule, cites: &[Cite]) -> Result<(), Rejection> {
        let cited = cites.iter().map(|c| self.lay.cited(at, *c)).collect::<Result<Vec<_>, _>>()?;
        let lines: Vec<&Formula> =
            cited.iter().filter_map(|c| if let Cited::Line(f) = c { Some(*f) } else { None }).collect();
        let blocks: Vec<(&Formula, &Formula)> = cited
            .iter()
            .filter_map(|c| {
                if let Cited::Block { assumption, conclusion } = c {
                    Some((*assumption, *conclusion))
                } else {
                    None
                }
            })
            .collect();
        let arity = |n: usize, b: usize| -> Result<(), Rejection> {
            if lines.len() != n || blocks.len() != b {
                return reject(at, format!("{} cites {n} line(s) and {b} subproof(s)", rule.name()));
            }
            Ok(())
        };
        match rule {
            Rule::Hyp => arity(0, 0),
            Rule::Refl => {
                arity(0, 0)?;
                match formula {
                    Formula::Eq(a, b) if a == b => Ok(()),
                    Formula::SeqEq(a, b) if a == b => Ok(()),
                    _ => reject(at, "refl proves only t = t"),
                }
            }
            Rule::AndI => {
                arity(2, 0)?;
                match formula {
                    Formula::And(a, b) if alpha_eq(a, lines[0]) && alpha_eq(b, lines[1]) => Ok(()),
                    _ => reject(at, "conclusion is not the conjunction of the cited lines"),
                }
            }
            Rule::AndE => {
                arity(1, 0)?;
                let Formula::And(a, b) = lines[0] else { return reject(at, "cited line is not a conjunction") };
                if alpha_eq(formula, a)
                    || alpha_eq(formula, b)
                    || lines[0].conjuncts().iter().any(|c| alpha_eq(formula, c))
                {
                    Ok(())
                } else {
                    reject(at, "conclusion is not a conjunct of the cited line")
                }
            }
            Rule::OrI => {
                arity(1, 0)?;
                match formula {
                    Formula::SplitOr(a, b) | Formula::BoolOr(a, b)
                        if alpha_eq(a, lines[0]) || alpha_eq(b, lines[0]) =>
                    {
                        Ok(())
                    }
                    _ => reject(at, "conclusion is not a disjunction with the cited line as a disjunct"),
                }
            }
            Rule::ExistsI => {
                arity(1, 0)?;
                let (vs, _) = exists_prefix(formula);
                for k in (1..=vs.len()).rev() {
                    let body = (0..k).fold(formula, |f, _| match f {
                        Formula::Exists(_, b) => b,
                        _ => unreachable!(),
                    });
                    let holes: BTreeSet<Var> = vs[..k].iter().cloned().collect();
                    if holes.len() == k && match_formula(body, lines[0], &holes, &mut BTreeMap::new()) {
                        return Ok(());
                    }
                }
                reject(at, "cited line is no instance of the quantified body")
            }
            Rule::ExistsE => {
                arity(1, 1)?;
                let ex = lines[0];
                let (assumption, concl) = blocks[0];
                if !alpha_eq(formula, concl) {
                    return reject(at, "conclusion differs from the subproof's last line");
                }
                let (vs, _) = exists_prefix(ex);
                for k in (1..=vs.len()).rev() {
                    let body = (0..k).fold(ex, |f, _| match f {
                        Formula::Exists(_, b) => b,
                        _ => unreachable!(),
                    });
                    let holes: BTreeSet<Var> = vs[..k].iter().cloned().collect();
                    if holes.len() != k {
                        continue;
                    }
                    let mut bind = BTreeMap::new();
                    if !match_formula(body, assumption, &holes, &mut bind) {
                        continue;
                    }
                    let mut eigen = Vec::new();
                    for v in &vs[..k] {
                        match bind.get(v) {
                            Some(Term::Var(y)) => eigen.push(y.clone()),
                            Some(Term::Const(_)) => return reject(at, "eigenvariable replaced by a constant"),
                            None => eigen.push(v.clone()),
                        }
                    }
                    if eigen.iter().collect::<BTreeSet<_>>().len() != eigen.len() {
                        return reject(at, "eigenvariables are not distinct");
                    }
                    let mut blocked: Vec<(&str, BTreeSet<Var>)> =
                        vec![("the existential premise", free_vars(ex)), ("the conclusion", free_vars(formula))];
                    for a in self.lay.open_assumptions(at) {
                        blocked.push(("an open assumption", free_vars(a)));
                    }
                    for y in &eigen {
                        if let Some((what, _)) = blocked.iter().find(|(_, fv)| fv.contains(y)) {
                            return reject(at, format!("eigenvariable {y} is free in {what}"));
                        }
                    }
                    return Ok(());
                }
                reject(at, "subproof assumption is no instance of the existential premise")
            }
            Rule::WnegE => {
                arity(0, 1)?;
                let (assumption, concl) = blocks[0];
                if *concl != Formula::Bot {
                    return reject(at, "subproof does not end in bot");
                }
                if *assumption == Formula::wneg(formula.clone()) {
                    return Ok(());
                }
                let target =
                    wneg_with(formula, self.registry).map_err(|e| Rejection { line: at, reason: e.to_string() })?;
                if alpha_eq(assumption, &target) {
                    Ok(())
                } else {
                    reject(at, "subproof assumption is not the weak negation of the conclusion")
                }
            }
            Rule::IncPro => {
                arity(1, 0)?;
                let (Formula::Inc { xs, ys }, Formula::Inc { xs: xs2, ys: ys2 }) = (lines[0], formula) else {
                    return reject(at, "incPro relates two inclusion atoms");
                };
                let ok = !xs2.is_empty()
                    && xs2.iter().zip(ys2).all(|(a, b)| xs.iter().zip(ys).any(|(c, d)| a == c && b == d));
                if ok {
                    Ok(())
                } else {
                    reject(at, "conclusion is no projection of the cited inclusion")
                }
            }
            Rule::IncTrs => {
                arity(2, 0)?;
                let (Formula::Inc { xs: a, ys: b }, Formula::Inc { xs: c, ys: d }, Formula::Inc { xs: e, ys: g }) =
                    (lines[0], lines[1], formula)
                else {
                    return reject(at, "incTrs relates inclusion atoms");
                };
                if (b == c && e == a && g == d) || (d == a && e == c && g == b) {
                    Ok(())
                } else {
                    reject(at, "inclusions do not chain to the conclusion")
                }
            }
            Rule::IncExt => {
                arity(1, 0)?;
                let Formula::Inc { xs, ys } = lines[0] else { return reject(at, "incExt extends an inclusion atom") };
                let (vs, body) = exists_prefix(formula);
                let Formula::Inc { xs: xs2, ys: ys2 } = body else {
                    return reject(at, "conclusion is not an extended inclusion");
                };
                let k = vs.len();
                if k == 0 || xs2.len() != xs.len() + k || xs2[..xs.len()] != xs[..] || xs2[xs.len()..] != vs[..] {
                    return reject(at, "left side must be the cited left side followed by the new variables");
                }
                if ys2[..ys.len()] != ys[..] {
                    return reject(at, "right side must extend the cited right side");
                }
                let used: BTreeSet<&Var> = xs.iter().chain(ys2.iter()).collect();
                if vs.iter().collect::<BTreeSet<_>>().len() != k || vs.iter().any(|v| used.contains(v)) {
                    return reject(at, "new variables must be distinct and fresh");
                }
                Ok(())
            }
            Rule::IncCmp => {
                if !blocks.is_empty() || !(lines.len() == 2 || lines.len() == 3) {
                    return reject(at, "incCmp cites an inclusion, a formula and optionally an independence atom");
                }
                let Formula::Inc { xs: ys, ys: xs } = lines[0] else {
                    return reject(at, "first citation must be an inclusion");
                };
                let alpha = lines[1];
                if !is_quantifier_free_fo(alpha) || !is_quantifier_free_fo(formula) {
                    return reject(at, "compressed formula must be quantifier-free first-order");
                }
                let mut side: BTreeSet<Var> = BTreeSet::new();
                if let Some(ind) = lines.get(2) {
                    match ind {
                        Formula::Ind { xs: g, zs, ys: x2 } if zs.is_empty() && x2 == xs => {
                            side.extend(g.iter().cloned())
                        }
                        _ => {
                            return reject(at, "third citation must be an independence atom G ⊥ x on the included side")
                        }
                    }
                }
                if let Some(v) = free_vars(alpha).into_iter().find(|v| !xs.contains(v) && !side.contains(v)) {
                    return reject(at, format!("{v} is not among the compressed variables"));
                }
                let ok = zip_terms(alpha, formula, &mut |a, b| match a {
                    Term::Var(v) => {
                        let via = xs.iter().zip(ys).any(|(x, y)| x == v && b == &Term::Var(y.clone()));
                        via || (side.contains(v) && b == a)
                    }
                    Term::Const(_) => a == b,
                });
                if ok {
                    Ok(())
                } else {
                    reject(at, "conclusion is not the compressed formula")
                }
            }
            Rule::IndE => {
                arity(3, 0)?;
                let (xs, zs, ys) = match lines[0] {
                    Formula::Ind { xs, zs, ys } => (xs, zs, ys),
                    Formula::Dep { det, dep } => (dep, det, dep),
                    _ => return reject(at, "first citation must be an independence or dependence atom"),
                };
                let (Formula::Inc { xs: a1, ys: r1 }, Formula::Inc { xs: a2, ys: r2 }) = (lines[1], lines[2]) else {
                    return reject(at, "second and third citations must be inclusion atoms");
                };
                let head: Vec<Var> = xs.iter().chain(ys).chain(zs).cloned().collect();
                if r1 != r2 || r1.len() < head.len() || r1[..head.len()] != head[..] {
                    return reject(at, "inclusions must share the right side x y z s");
                }
                let (kx, ky, kz) = (xs.len(), ys.len(), zs.len());
                let (q, body) = exists_prefix(formula);
                if q.len() != r1.len() {
                    return reject(at, "conclusion must quantify one variable per right-side position");
                }
                let mentioned: BTreeSet<&Var> = a1.iter().chain(a2).chain(r1).collect();
                if q.iter().collect::<BTreeSet<_>>().len() != q.len() || q.iter().any(|v| mentioned.contains(v)) {
                    return reject(at, "quantified variables must be distinct and fresh");
                }
                let lhs: Vec<Term> = tvars(&q[..kx + ky + kz]);
                let rhs: Vec<Term> = tvars(&a1[..kx]).into_iter().chain(tvars(&a2[kx..kx + ky + kz])).collect();
                let eq = Formula::seq_eq(lhs, rhs);
                let cons = if kz == 0 {
                    eq
                } else {
                    let v1 = tvars(&a1[kx + ky..kx + ky + kz]);
                    let v2 = tvars(&a2[kx + ky..kx + ky + kz]);
                    Formula::implies(Formula::seq_eq(v1, v2), eq)
                };
                let expected = Formula::and(Formula::inc(q.clone(), r1.clone()), cons);
                if alpha_eq(body, &expected) {
                    Ok(())
                } else {
                    reject(at, format!("expected {}", print_formula(&expected)))
                }
            }
            Rule::Fo => {
                if !blocks.is_empty() {
                    return reject(at, "fo cites lines only");
                }
                let owned: Vec<Formula> = lines.iter().map(|f| (*f).clone()).collect();
                match bounded_fo_step(&owned, formula) {
                    Ok(true) => Ok(()),
                    Ok(false) => reject(at, "conclusion does not follow in first-order logic"),
                    Err(e) => reject(at, e.to_string()),
                }
            }
        }
    }
}

/// Checks every step; on success returns the proven sequent.
pub fn check_proof(script: &ProofScript) -> Result<Sequent, Rejection> {
    check_proof_with(script, builtin_registry())
}

pub fn check_proof_with(script: &ProofScript, registry: &AtomRegistry) -> Result<Sequent, Rejection> {
    let lay = layout(script)?;
    let checker = Checker { lay, registry };
    for line in &script.lines {
        if let ProofLine::Step { number, formula, rule, cites } = line {
            checker.step(*number, formula, *rule, cites)?;
        }
    }
    Ok(Sequent {
        hyps: checker.lay.hyps.iter().map(|f| (*f).clone()).collect(),
        conclusion: checker.lay.entries[&checker.lay.conclusion].formula.clone(),
    })
}

/// Each non-hypothesis step of an accepted script as a local inference.
/// Steps that discharge a subproof also carry the open hypotheses and assumptions.
pub fn rule_instances(script: &ProofScript) -> Result<Vec<(usize, Rule, RuleInstance)>, Rejection> {
    check_proof(script)?;
    let lay = layout(script)?;
    let mut out = Vec::new();
    for line in &script.lines {
        let ProofLine::Step { number, formula, rule, cites } = line else { continue };
        if *rule == Rule::Hyp {
            continue;
        }
        let mut premises = Vec::new();
        let mut subproofs = Vec::new();
        for c in cites {
            match lay.cited(*number, *c)? {
                Cited::Line(f) => premises.push(f.clone()),
                Cited::Block { assumption, conclusion } => subproofs.push((assumption.clone(), conclusion.clone())),
            }
        }
        if !subproofs.is_empty() {
            for a in lay.open_assumptions(*number) {
                if !premises.contains(a) {
                    premises.push(a.clone());
                }
            }
        }
        out.push((*number, *rule, RuleInstance { premises, conclusion: formula.clone(), subproofs }));
    }
    Ok(out)
}

fn qf_terms(f: &Formula, out: &mut BTreeSet<Term>) {
    f.visit(&mut |g| match g {
        Formula::Rel(_, ts) | Formula::NegRel(_, ts) => out.extend(ts.iter().cloned()),
        Formula::Eq(a, b) | Formula::NegEq(a, b) => {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        _ => {}
    });
}

fn qf_eval(f: &Formula, class: &BTreeMap<Term, usize>, props: &BTreeMap<(String, Vec<usize>), bool>) -> bool {
    let key = |r: &str, ts: &[Term]| (r.to_string(), ts.iter().map(|t| class[t]).collect::<Vec<_>>());
    match f {
        Formula::Rel(r, ts) => props[&key(r, ts)],
        Formula::NegRel(r, ts) => !props[&key(r, ts)],
        Formula::Eq(a, b) => class[a] == class[b],
        Formula::NegEq(a, b) => class[a] != class[b],
        Formula::Top => true,
        Formula::Bot => false,
        Formula::And(a, b) => qf_eval(a, class, props) && qf_eval(b, class, props),
        Formula::SplitOr(a, b) => qf_eval(a, class, props) || qf_eval(b, class, props),
        _ => unreachable!("sugar expanded and quantifier-free"),
    }
}

/// Whether the quantifier-free premises classically entail the conclusion.
/// Decided over every equality pattern of the terms involved, with relational
/// atoms as propositional letters up to congruence.
pub fn bounded_fo_step(premises: &[Formula], conclusion: &Formula) -> Result<bool, KernelError> {
    let mut all = Vec::new();
    for f in premises.iter().chain(std::iter::once(conclusion)) {
        if !is_quantifier_free_fo(f) {
            return Err(KernelError::NotQuantifierFree);
        }
        all.push(expand_sugar(f).map_err(|_| KernelError::NotQuantifierFree)?);
    }
    let (concl, prem) = all.split_last().expect("conclusion present");
    let mut terms = BTreeSet::new();
    for f in &all {
        qf_terms(f, &mut terms);
    }
    let terms: Vec<Term> = terms.into_iter().collect();
    let n = terms.len();
    let mut rgs = vec![0usize; n];
    loop {
        let class: BTreeMap<Term, usize> = terms.iter().cloned().zip(rgs.iter().copied()).collect();
        let mut keys = BTreeSet::new();
        for f in &all {
            f.visit(&mut |g| {
                if let Formula::Rel(r, ts) | Formula::NegRel(r, ts) = g {
                    keys.insert((r.to_string(), ts.iter().map(|t| class[t]).collect::<Vec<_>>()));
                }
            });
        }
        let keys: Vec<_> = keys.into_iter().collect();
        if keys.len() > 20 {
            return Err(KernelError::NotQuantifierFree);
        }
        for bits in 0u32..1 << keys.len() {
            let props = keys.iter().cloned().enumerate().map(|(i, k)| (k, bits >> i & 1 == 1)).collect();
            if prem.iter().all(|p| qf_eval(p, &class, &props)) && !qf_eval(concl, &class, &props) {
                return Ok(false);
            }
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(true);
            }
            i -= 1;
            let max = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max {
                rgs[i] += 1;
                for r in &mut rgs[i + 1..] {
                    *r = 0;
                }
                break;
            }
        }
    }
}

/// The assumption a weak negation elimination for `goal` must open with.
pub fn wneg_elim_target(goal: &Formula) -> Result<Formula, KernelError> {
    Ok(wneg_with(goal, builtin_registry())?)
}

/// `∃x⃗χ` for the free variables of `χ`, with the two derivation transforms
/// between `Δ, χ ⊢ θ` and `Δ, ∃x⃗χ ⊢ θ`.
#[derive(Clone, Debug)]
pub struct Closure {
    pub delta: Vec<Formula>,
    pub chi: Formula,
    pub vars: Vec<Var>,
    pub closed: Formula,
}

pub fn close_formula(delta: &[Formula], chi: &Formula) -> Result<Closure, KernelError> {
    let vars: Vec<Var> = free_vars(chi).into_iter().collect();
    for d in delta {
        if let Some(v) = free_vars(d).into_iter().find(|v| vars.contains(v)) {
            return Err(KernelError::NotDisjoint(v));
        }
    }
    let closure = Closure {
        delta: delta.to_vec(),
        chi: chi.clone(),
        vars: vars.clone(),
        closed: Formula::exists_block(&vars, chi.clone()),
    };
    closure.self_check()?;
    Ok(closure)
}

fn renumber(c: Cite, map: &BTreeMap<usize, usize>) -> Cite {
    match c {
        Cite::Line(n) => Cite::Line(map.get(&n).copied().unwrap_or(n)),
        Cite::Block(n) => Cite::Block(map.get(&n).copied().unwrap_or(n)),
    }
}

impl Closure {
    /// Copies the non-hypothesis lines of `d`, sending each hypothesis to the
    /// line `hyp_line` assigns it. Returns the new number of `d`'s conclusion.
    fn splice(
        &self,
        d: &ProofScript,
        hyp_line: &dyn Fn(&Formula) -> Option<usize>,
        next: &mut usize,
        out: &mut Vec<ProofLine>,
    ) -> Result<usize, KernelError> {
        let seq = check_proof(d)?;
        let mut map = BTreeMap::new();
        let mut concl = 0;
        for line in &d.lines {
            match line {
                ProofLine::Step { number, formula, rule: Rule::Hyp, .. } => {
                    let target =
                        hyp_line(formula).ok_or_else(|| KernelError::UnknownHypothesis(print_formula(formula)))?;
                    map.insert(*number, target);
                }
                ProofLine::Step { number, formula, rule, cites } => {
                    map.insert(*number, *next);
                    let cites = cites.iter().map(|c| renumber(*c, &map)).collect();
                    out.push(ProofLine::Step { number: *next, formula: formula.clone(), rule: *rule, cites });
                    if alpha_eq(formula, &seq.conclusion) {
                        concl = *next;
                    }
                    *next += 1;
                }
                ProofLine::Assume { number, formula } => {
                    map.insert(*number, *next);
                    out.push(ProofLine::Assume { number: *next, formula: formula.clone() });
                    *next += 1;
                }
                ProofLine::Qed { block } => out.push(ProofLine::Qed { block: map[block] }),
            }
        }
        Ok(concl)
    }

    fn hyps(&self, extra: &Formula) -> (Vec<ProofLine>, usize) {
        let mut lines = Vec::new();
        for (i, f) in self.delta.iter().chain(std::iter::once(extra)).enumerate() {
            lines.push(ProofLine::Step { number: i + 1, formula: f.clone(), rule: Rule::Hyp, cites: vec![] });
        }
        let n = lines.len();
        (lines, n + 1)
    }

    fn delta_line(&self, f: &Formula) -> Option<usize> {
        self.delta.iter().position(|d| alpha_eq(d, f)).map(|i| i + 1)
    }

    /// From a derivation of `Δ, χ ⊢ θ` to one of `Δ, ∃x⃗χ ⊢ θ`.
    pub fn forward(&self, d: &ProofScript) -> Result<ProofScript, KernelError> {
        if self.vars.is_empty() {
            return Ok(d.clone());
        }
        let (mut lines, mut next) = self.hyps(&self.closed);
        let closed_line = next - 1;
        let assume = next;
        lines.push(ProofLine::Assume { number: assume, formula: self.chi.clone() });
        next += 1;
        let chi = self.chi.clone();
        let lookup = |f: &Formula| if alpha_eq(f, &chi) { Some(assume) } else { self.delta_line(f) };
        let concl = self.splice(d, &lookup, &mut next, &mut lines)?;
        let theta = check_proof(d)?.conclusion;
        if concl == 0 {
            return Err(KernelError::UnknownHypothesis(print_formula(&theta)));
        }
        lines.push(ProofLine::Qed { block: assume });
        lines.push(ProofLine::Step {
            number: next,
            formula: theta,
            rule: Rule::ExistsE,
            cites: vec![Cite::Line(closed_line), Cite::Block(assume)],
        });
        Ok(ProofScript { lines })
    }

    /// From a derivation of `Δ, ∃x⃗χ ⊢ θ` to one of `Δ, χ ⊢ θ`.
    pub fn backward(&self, d: &ProofScript) -> Result<ProofScript, KernelError> {
        if self.vars.is_empty() {
            return Ok(d.clone());
        }
        let (mut lines, mut next) = self.hyps(&self.chi);
        let chi_line = next - 1;
        let closed_at = next;
        lines.push(ProofLine::Step {
            number: closed_at,
            formula: self.closed.clone(),
            rule: Rule::ExistsI,
            cites: vec![Cite::Line(chi_line)],
        });
        next += 1;
        let closed = self.closed.clone();
        let lookup = |f: &Formula| if alpha_eq(f, &closed) { Some(closed_at) } else { self.delta_line(f) };
        self.splice(d, &lookup, &mut next, &mut lines)?;
        Ok(ProofScript { lines })
    }

    /// Runs both transforms on a trivial derivation and checks the results.
    pub fn self_check(&self) -> Result<(), KernelError> {
        let mut avoid: BTreeSet<Var> = self.chi.all_vars();
        for d in &self.delta {
            avoid.extend(d.all_vars());
        }
        let v = crate::formula::fresh_var(&Var::new("v"), &avoid);
        let theta = Formula::Eq(Term::Var(v.clone()), Term::Var(v));
        let trivial = |extra: &Formula| {
            let (mut lines, next) = self.hyps(extra);
            lines.push(ProofLine::Step { number: next, formula: theta.clone(), rule: Rule::Refl, cites: vec![] });
            ProofScript { lines }
        };
        for (d, out) in [
            (trivial(&self.chi), self.forward(&trivial(&self.chi))?),
            (trivial(&self.closed), self.backward(&trivial(&self.closed))?),
        ] {
            let before = check_proof(&d)?;
            let after = check_proof(&out)?;
            if !alpha_eq(&before.conclusion, &after.conclusion) {
                return Err(KernelError::Rejected(Rejection {
                    line: 0,
                    reason: "transform changed the conclusion".into(),
                }));
            }
        }
        Ok(())
    }
}

/// Every script obtained by redirecting one citation of one step.
/// The replacement is the nearest other line number before the citing step.
pub fn citation_mutants(script: &ProofScript) -> Vec<(usize, ProofScript)> {
    let mut out = Vec::new();
    for (i, line) in script.lines.iter().enumerate() {
        let ProofLine::Step { number, cites, .. } = line else { continue };
        for j in 0..cites.len() {
            let (n, block) = match cites[j] {
                Cite::Line(n) => (n, false),
                Cite::Block(n) => (n, true),
            };
            let replacement = (1..n).next_back().or_else(|| (n + 1..*number).next());
            let Some(r) = replacement else { continue };
            let mut m = script.clone();
            if let ProofLine::Step { cites, .. } = &mut m.lines[i] {
                cites[j] = if block { Cite::Block(r) } else { Cite::Line(r) };
            }
            out.push((*number, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula_raw;

    fn f(s: &str) -> Formula {
        parse_formula_raw(s).unwrap()
    }

    fn accepts(text: &str) -> Sequent {
        let script = parse_proof(text).unwrap();
        check_proof(&script).unwrap_or_else(|r| panic!("{r}\n{text}"))
    }

    fn rejects(text: &str) -> Rejection {
        check_proof(&parse_proof(text).unwrap()).unwrap_err()
    }

    #[test]
    fn round_trip() {
        let text = "1. inc(a, b; x, y) ; hyp\n2. assume x = y\n  3. x = y ; andE 2\nqed 2\n4. x = x ; refl\n";
        let s = parse_proof(text).unwrap();
        assert_eq!(parse_proof(&print_proof(&s)).unwrap(), s);
        assert!(parse_proof("1. x = x ; frob").is_err());
        assert!(parse_proof("1. x = x").is_err());
    }

    #[test]
    fn structural_rules() {
        let s = accepts(
            "1. x = y ; hyp\n2. P(x) ; hyp\n3. x = y /\\ P(x) ; andI 1 2\n4. P(x) ; andE 3\n5. P(x) \\/ Q(y) ; orI 4\n",
        );
        assert_eq!(s.hyps.len(), 2);
        assert_eq!(s.conclusion, f("P(x) \\/ Q(y)"));
        assert!(rejects("1. x = y ; hyp\n2. y = x ; refl\n").reason.contains("refl"));
        assert!(rejects("1. x = y ; hyp\n2. x = y ; andE 1\n").reason.contains("conjunction"));
        assert!(rejects("1. x = y ; hyp\n2. x = y ; andI 3 1\n3. x = x ; refl\n").reason.contains("earlier"));
    }

    #[test]
    fn scoping() {
        assert!(rejects("1. assume x = y\n2. x = y ; hyp\nqed 1\n3. x = x ; refl\n").reason.contains("outside"));
        let closed = "1. x = y ; hyp\n2. assume P(x)\n3. x = x ; refl\nqed 2\n4. P(x) /\\ x = y ; andI 2 1\n";
        assert!(rejects(closed).reason.contains("closed"));
        assert!(rejects("1. assume P(x)\n2. x = x ; refl\n").reason.contains("never closed"));
        assert!(rejects("1. x = x ; refl\nqed 1\n").reason.contains("without"));
    }

    #[test]
    fn existential_rules() {
        accepts("1. inc(a; x) /\\ a = b ; hyp\n2. E c. (inc(c; x) /\\ c = b) ; existsI 1\n");
        accepts("1. P(a, a) ; hyp\n2. E u. E v. P(u, v) ; existsI 1\n");
        assert!(rejects("1. A a. P(a) ; hyp\n2. E b. A a. P(b) ; existsI 1\n").reason.contains("instance"));
        let good = "1. E u. P(u) ; hyp\n2. assume P(w)\n3. w = w ; refl\n4. E u. u = u ; existsI 3\nqed 2\n5. E u. u = u ; existsE 1 [2]\n";
        accepts(good);
        let leak = "1. E u. P(u) ; hyp\n2. assume P(w)\n3. w = w ; refl\nqed 2\n4. w = w ; existsE 1 [2]\n";
        assert!(rejects(leak).reason.contains("eigenvariable w is free in the conclusion"));
        let clash =
            "1. E u. P(u) ; hyp\n2. Q(w) ; hyp\n3. assume P(w)\n4. x = x ; refl\nqed 3\n5. x = x ; existsE 1 [3]\n";
        assert!(rejects(clash).reason.contains("open assumption"));
    }

    #[test]
    fn inclusion_rules() {
        accepts("1. inc(a, b; x, y) ; hyp\n2. inc(b, a, a; y, x, x) ; incPro 1\n");
        assert!(rejects("1. inc(a, b; x, y) ; hyp\n2. inc(b; x) ; incPro 1\n").reason.contains("projection"));
        accepts("1. inc(a; b) ; hyp\n2. inc(b; c) ; hyp\n3. inc(a; c) ; incTrs 1 2\n4. inc(a; c) ; incTrs 2 1\n");
        accepts("1. inc(a, b, c; x, y, y) ; hyp\n2. y = y ; refl\n3. b = c ; incCmp 1 2\n");
        accepts("1. inc(a; x) ; hyp\n2. x = 'k ; hyp\n3. a = 'k ; incCmp 1 2\n");
        assert!(rejects("1. inc(p; q) ; hyp\n2. q != r ; hyp\n3. p != r ; incCmp 1 2\n").reason.contains("r is not"));
        accepts("1. inc(p; q) ; hyp\n2. q != r ; hyp\n3. ind(r; ; q) ; hyp\n4. p != r ; incCmp 1 2 3\n");
        accepts("1. inc(a; x) ; hyp\n2. E v. inc(a, v; x, y) ; incExt 1\n");
        assert!(rejects("1. inc(a; x) ; hyp\n2. E a. inc(a, a; x, y) ; incExt 1\n").reason.contains("fresh"));
    }

    #[test]
    fn independence_elimination() {
        let text = "1. ind(x; ; y) ; hyp\n2. inc(a1, b1, c1; x, y, z) ; hyp\n3. inc(a2, b2, c2; x, y, z) ; hyp\n\
                    4. E p. E q. E r. (inc(p, q, r; x, y, z) /\\ p q = a1 b2) ; indE 1 2 3\n";
        accepts(text);
        let cond = "1. ind(x; z; y) ; hyp\n2. inc(a1, b1, c1; x, y, z) ; hyp\n3. inc(a2, b2, c2; x, y, z) ; hyp\n\
                    4. E p. E q. E r. (inc(p, q, r; x, y, z) /\\ (c1 = c2 -> p q r = a1 b2 c2)) ; indE 1 2 3\n";
        accepts(cond);
        let dep = "1. =(w; u) ; hyp\n2. inc(t1, t1, s1; u, u, w) ; hyp\n3. inc(t2, t2, s2; u, u, w) ; hyp\n\
                   4. E p. E q. E r. (inc(p, q, r; u, u, w) /\\ (s1 = s2 -> p q r = t1 t2 s2)) ; indE 1 2 3\n";
        accepts(dep);
        let swapped = "1. ind(x; ; y) ; hyp\n2. inc(a1, b1; x, y) ; hyp\n3. inc(a2, b2; x, y) ; hyp\n\
                       4. E p. E q. (inc(p, q; x, y) /\\ p q = a2 b1) ; indE 1 2 3\n";
        assert!(rejects(swapped).reason.contains("expected"));
    }

    #[test]
    fn weak_negation_elimination() {
        let text = "1. x = y ; hyp\n2. assume E w1. E w2. (inc(w1, w2; x, y) /\\ w1 != w2)\n\
                    3. assume inc(a, b; x, y) /\\ a != b\n4. inc(a, b; x, y) ; andE 3\n5. a != b ; andE 3\n\
                    6. a = b ; incCmp 4 1\n7. bot ; fo 5 6\nqed 3\n8. bot ; existsE 2 [3]\nqed 2\n9. x = y ; wnegE [2]\n";
        let s = accepts(text);
        assert_eq!(s.conclusion, f("x = y"));
        let wrong = text.replace("9. x = y ;", "9. y = x ;");
        assert!(rejects(&wrong).reason.contains("weak negation"));
    }

    #[test]
    fn first_order_steps() {
        assert!(bounded_fo_step(&[f("x = y"), f("y = z")], &f("x = z")).unwrap());
        assert!(bounded_fo_step(&[f("x y = u v")], &f("x = u")).unwrap());
        assert!(!bounded_fo_step(&[f("x != y")], &f("x = y")).unwrap());
        assert!(bounded_fo_step(&[f("x = y"), f("P(x)")], &f("P(y)")).unwrap());
        assert!(!bounded_fo_step(&[f("P(x)")], &f("P(y)")).unwrap());
        assert!(bounded_fo_step(&[f("a = b -> c = d"), f("a = b")], &f("c = d")).unwrap());
        assert!(bounded_fo_step(&[f("x != x")], &f("bot")).unwrap());
        assert!(bounded_fo_step(&[], &f("'c = 'c")).unwrap());
        assert!(!bounded_fo_step(&[], &f("'c = 'd")).unwrap());
        assert!(bounded_fo_step(&[f("E x. x = y")], &f("top")).is_err());
    }

    #[test]
    fn closing() {
        let c = close_formula(&[f("P(a)")], &f("Q(x, y)")).unwrap();
        assert_eq!(c.closed, f("E x. E y. Q(x, y)"));
        let s = close_formula(&[], &f("E x. Q(x, x)")).unwrap();
        assert_eq!(s.closed, f("E x. Q(x, x)"));
        assert!(matches!(close_formula(&[f("P(x)")], &f("Q(x)")), Err(KernelError::NotDisjoint(_))));
    }

    #[test]
    fn targets() {
        let t = wneg_elim_target(&f("x = y")).unwrap();
        assert!(alpha_eq(&t, &f("E a. E b. (inc(a, b; x, y) /\\ a != b)")));
        assert!(wneg_elim_target(&f("E x. =(x; y)")).is_err());
    }

    #[test]
    fn mutants_are_generated() {
        let script = parse_proof("1. inc(a; b) ; hyp\n2. inc(b; c) ; hyp\n3. inc(a; c) ; incTrs 1 2\n").unwrap();
        let ms = citation_mutants(&script);
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|(_, m)| check_proof(m).is_err()));
    }
}
