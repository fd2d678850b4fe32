//! Abstract syntax of the extended independence language.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Var {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Names containing `$` are reserved for variables introduced by translations.
    pub fn is_reserved(&self) -> bool {
        self.0.contains('$')
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(Var::new).collect()
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Var),
    Const(Arc<str>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Arc::from(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

/// Formulas in negation normal form. `Implies`, `SeqEq` and `SeqNeq` are
/// first-order sugar kept only by the raw parser and proof scripts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Rel(Arc<str>, Vec<Term>),
    NegRel(Arc<str>, Vec<Term>),
    Eq(Term, Term),
    NegEq(Term, Term),
    Bot,
    Top,
    Dep { det: Vec<Var>, dep: Vec<Var> },
    Ind { xs: Vec<Var>, zs: Vec<Var>, ys: Vec<Var> },
    Inc { xs: Vec<Var>, ys: Vec<Var> },
    Gen { name: Arc<str>, args: Vec<Var> },
    And(Box<Formula>, Box<Formula>),
    SplitOr(Box<Formula>, Box<Formula>),
    BoolOr(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists1(Var, Box<Formula>),
    Forall1(Var, Box<Formula>),
    WNeg(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    SeqEq(Vec<Term>, Vec<Term>),
    SeqNeq(Vec<Term>, Vec<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("formula is not first-order: {0}")]
    NotFirstOrder(String),
    #[error("cannot substitute constant {constant} for {var} in atom argument position")]
    ConstantInAtom { var: Var, constant: String },
    #[error("implication with non-first-order antecedent")]
    NonFoAntecedent,
    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

impl Formula {
    pub fn rel(sym: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(Arc::from(sym), args)
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::NegEq(a.into(), b.into())
    }

    pub fn dep(det: Vec<Var>, dep: Vec<Var>) -> Formula {
        Formula::Dep { det, dep }
    }

    pub fn ind(xs: Vec<Var>, zs: Vec<Var>, ys: Vec<Var>) -> Formula {
        Formula::Ind { xs, zs, ys }
    }

    pub fn inc(xs: Vec<Var>, ys: Vec<Var>) -> Formula {
        Formula::Inc { xs, ys }
    }

    pub fn gen(name: &str, args: Vec<Var>) -> Formula {
        Formula::Gen { name: Arc::from(name), args }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::SplitOr(Box::new(a), Box::new(b))
    }

    pub fn bor(a: Formula, b: Formula) -> Formula {
        Formula::BoolOr(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists1(v: Var, body: Formula) -> Formula {
        Formula::Exists1(v, Box::new(body))
    }

    pub fn forall1(v: Var, body: Formula) -> Formula {
        Formula::Forall1(v, Box::new(body))
    }

    pub fn wneg(body: Formula) -> Formula {
        Formula::WNeg(Box::new(body))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Sequence equality; length one collapses to `Eq`, length zero to `Top`.
    pub fn seq_eq(a: Vec<Term>, b: Vec<Term>) -> Formula {
        assert_eq!(a.len(), b.len(), "sequence equality needs equal lengths");
        match a.len() {
            0 => Formula::Top,
            1 => Formula::Eq(a[0].clone(), b[0].clone()),
            _ => Formula::SeqEq(a, b),
        }
    }

    pub fn seq_neq(a: Vec<Term>, b: Vec<Term>) -> Formula {
        assert_eq!(a.len(), b.len(), "sequence inequality needs equal lengths");
        match a.len() {
            0 => Formula::Bot,
            1 => Formula::NegEq(a[0].clone(), b[0].clone()),
            _ => Formula::SeqNeq(a, b),
        }
    }

    /// Existential block, outermost variable first.
    pub fn exists_block(vs: &[Var], body: Formula) -> Formula {
        vs.iter().rev().fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_block(vs: &[Var], body: Formula) -> Formula {
        vs.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    /// Left-folded conjunction; the empty list is `Top`.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-folded split disjunction; the empty list is `Bot`.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Bot,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Dep { .. } | Formula::Ind { .. } | Formula::Inc { .. } | Formula::Gen { .. })
    }

    /// Flattens nested `And` nodes into a list of conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::BoolOr(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::Exists1(_, b)
            | Formula::Forall1(_, b)
            | Formula::WNeg(b) => 1 + b.size(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::BoolOr(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::Exists1(_, b)
            | Formula::Forall1(_, b)
            | Formula::WNeg(b) => 1 + b.depth(),
            _ => 0,
        }
    }

    pub fn contains_wneg(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::WNeg(_)));
        found
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::BoolOr(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::Exists1(_, b)
            | Formula::Forall1(_, b)
            | Formula::WNeg(b) => b.visit(f),
            _ => {}
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel(_, ts) | Formula::NegRel(_, ts) => out.extend(ts.iter().filter_map(Term::as_var).cloned()),
            Formula::Eq(a, b) | Formula::NegEq(a, b) => {
                out.extend([a, b].into_iter().filter_map(Term::as_var).cloned())
            }
            Formula::SeqEq(a, b) | Formula::SeqNeq(a, b) => {
                out.extend(a.iter().chain(b).filter_map(Term::as_var).cloned())
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) | Formula::Exists1(v, _) | Formula::Forall1(v, _) => {
                out.insert(v.clone());
            }
            other => {
                if let Some(args) = atom_vars(other) {
                    out.extend(args.into_iter().cloned());
                }
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        let mut add = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        self.visit(&mut |f| match f {
            Formula::Rel(_, ts) | Formula::NegRel(_, ts) => ts.iter().for_each(&mut add),
            Formula::Eq(a, b) | Formula::NegEq(a, b) => {
                add(a);
                add(b);
            }
            Formula::SeqEq(a, b) | Formula::SeqNeq(a, b) => a.iter().chain(b).for_each(&mut add),
            _ => {}
        });
        out
    }

    /// Relation symbols with the arities at which they occur.
    pub fn relations(&self) -> BTreeSet<(Arc<str>, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Rel(r, ts) | Formula::NegRel(r, ts) = f {
                out.insert((r.clone(), ts.len()));
            }
        });
        out
    }
}

/// Argument variables of a dependency-style atom in their stored order.
pub fn atom_vars(f: &Formula) -> Option<Vec<&Var>> {
    match f {
        Formula::Dep { det, dep } => Some(det.iter().chain(dep).collect()),
        Formula::Ind { xs, zs, ys } => Some(xs.iter().chain(zs).chain(ys).collect()),
        Formula::Inc { xs, ys } => Some(xs.iter().chain(ys).collect()),
        Formula::Gen { args, .. } => Some(args.iter().collect()),
        _ => None,
    }
}

fn term_vars<'a>(ts: impl IntoIterator<Item = &'a Term>, out: &mut BTreeSet<Var>) {
    out.extend(ts.into_iter().filter_map(Term::as_var).cloned());
}

pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    match f {
        Formula::Rel(_, ts) | Formula::NegRel(_, ts) => term_vars(ts, &mut out),
        Formula::Eq(a, b) | Formula::NegEq(a, b) => term_vars([a, b], &mut out),
        Formula::SeqEq(a, b) | Formula::SeqNeq(a, b) => term_vars(a.iter().chain(b), &mut out),
        Formula::Bot | Formula::Top => {}
        Formula::Dep { .. } | Formula::Ind { .. } | Formula::Inc { .. } | Formula::Gen { .. } => {
            out.extend(atom_vars(f).unwrap().into_iter().cloned())
        }
        Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::BoolOr(a, b) | Formula::Implies(a, b) => {
            out = free_vars(a);
            out.extend(free_vars(b));
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::Exists1(v, b) | Formula::Forall1(v, b) => {
            out = free_vars(b);
            out.remove(v);
        }
        Formula::WNeg(b) => out = free_vars(b),
    }
    out
}

pub fn is_first_order(f: &Formula) -> bool {
    match f {
        Formula::Rel(..)
        | Formula::NegRel(..)
        | Formula::Eq(..)
        | Formula::NegEq(..)
        | Formula::Bot
        | Formula::Top
        | Formula::SeqEq(..)
        | Formula::SeqNeq(..) => true,
        Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::Implies(a, b) => is_first_order(a) && is_first_order(b),
        Formula::Exists(_, b) | Formula::Forall(_, b) => is_first_order(b),
        _ => false,
    }
}

pub fn is_quantifier_free_fo(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => false,
        Formula::And(a, b) | Formula::SplitOr(a, b) | Formula::Implies(a, b) => {
            is_quantifier_free_fo(a) && is_quantifier_free_fo(b)
        }
        other => is_first_order(other),
    }
}

pub fn fo_negate(f: &Formula) -> Result<Formula, FormulaError> {
    let bin = |a: &Formula, b: &Formula| -> Result<(Box<Formula>, Box<Formula>), FormulaError> {
        Ok((Box::new(fo_negate(a)?), Box::new(fo_negate(b)?)))
    };
    Ok(match f {
        Formula::Rel(r, ts) => Formula::NegRel(r.clone(), ts.clone()),
        Formula::NegRel(r, ts) => Formula::Rel(r.clone(), ts.clone()),
        Formula::Eq(a, b) => Formula::NegEq(a.clone(), b.clone()),
        Formula::NegEq(a, b) => Formula::Eq(a.clone(), b.clone()),
        Formula::SeqEq(a, b) => Formula::SeqNeq(a.clone(), b.clone()),
        Formula::SeqNeq(a, b) => Formula::SeqEq(a.clone(), b.clone()),
        Formula::Bot => Formula::Top,
        Formula::Top => Formula::Bot,
        Formula::And(a, b) => {
            let (a, b) = bin(a, b)?;
            Formula::SplitOr(a, b)
        }
        Formula::SplitOr(a, b) => {
            let (a, b) = bin(a, b)?;
            Formula::And(a, b)
        }
        Formula::Implies(a, b) => {
            if !is_first_order(a) {
                return Err(FormulaError::NonFoAntecedent);
            }
            Formula::and((**a).clone(), fo_negate(b)?)
        }
        Formula::Exists(v, b) => Formula::Forall(v.clone(), Box::new(fo_negate(b)?)),
        Formula::Forall(v, b) => Formula::Exists(v.clone(), Box::new(fo_negate(b)?)),
        other => return Err(FormulaError::NotFirstOrder(format!("{other:?}"))),
    })
}

fn pairwise(a: &[Term], b: &[Term]) -> Result<Vec<(Term, Term)>, FormulaError> {
    if a.len() != b.len() {
        return Err(FormulaError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().cloned().zip(b.iter().cloned()).collect())
}

/// Removes `Implies`, `SeqEq` and `SeqNeq` everywhere.
pub fn expand_sugar(f: &Formula) -> Result<Formula, FormulaError> {
    let un = |v: &Var, b: &Formula, k: fn(Var, Box<Formula>) -> Formula| -> Result<Formula, FormulaError> {
        Ok(k(v.clone(), Box::new(expand_sugar(b)?)))
    };
    Ok(match f {
        Formula::Implies(a, b) => {
            if !is_first_order(a) {
                return Err(FormulaError::NonFoAntecedent);
            }
            Formula::or(fo_negate(&expand_sugar(a)?)?, expand_sugar(b)?)
        }
        Formula::SeqEq(a, b) => Formula::conj(pairwise(a, b)?.into_iter().map(|(x, y)| Formula::Eq(x, y))),
        Formula::SeqNeq(a, b) => Formula::disj(pairwise(a, b)?.into_iter().map(|(x, y)| Formula::NegEq(x, y))),
        Formula::And(a, b) => Formula::and(expand_sugar(a)?, expand_sugar(b)?),
        Formula::SplitOr(a, b) => Formula::or(expand_sugar(a)?, expand_sugar(b)?),
        Formula::BoolOr(a, b) => Formula::bor(expand_sugar(a)?, expand_sugar(b)?),
        Formula::Exists(v, b) => un(v, b, Formula::Exists)?,
        Formula::Forall(v, b) => un(v, b, Formula::Forall)?,
        Formula::Exists1(v, b) => un(v, b, Formula::Exists1)?,
        Formula::Forall1(v, b) => un(v, b, Formula::Forall1)?,
        Formula::WNeg(b) => Formula::wneg(expand_sugar(b)?),
        other => other.clone(),
    })
}

pub fn has_sugar(f: &Formula) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g, Formula::Implies(..) | Formula::SeqEq(..) | Formula::SeqNeq(..)));
    found
}

/// A name based on `base` that is not in `avoid`, priming as needed.
pub fn fresh_var(base: &Var, avoid: &BTreeSet<Var>) -> Var {
    let mut name = format!("{}'", base.name());
    while avoid.contains(&Var::new(&name)) {
        name.push('\'');
    }
    Var::new(name)
}

pub type Substitution = BTreeMap<Var, Term>;

/// Capture-avoiding simultaneous substitution on free occurrences.
pub fn substitute(f: &Formula, sigma: &Substitution) -> Result<Formula, FormulaError> {
    let sigma: Substitution = {
        let fv = free_vars(f);
        sigma.iter().filter(|(v, _)| fv.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect()
    };
    if sigma.is_empty() {
        return Ok(f.clone());
    }
    let term = |t: &Term| match t {
        Term::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| t.clone()),
        c => c.clone(),
    };
    let terms = |ts: &[Term]| ts.iter().map(term).collect::<Vec<_>>();
    let atom_var = |v: &Var| -> Result<Var, FormulaError> {
        match sigma.get(v) {
            None => Ok(v.clone()),
            Some(Term::Var(w)) => Ok(w.clone()),
            Some(Term::Const(c)) => Err(FormulaError::ConstantInAtom { var: v.clone(), constant: c.to_string() }),
        }
    };
    let atom_list = |vs: &[Var]| vs.iter().map(atom_var).collect::<Result<Vec<_>, _>>();
    let binder = |v: &Var, b: &Formula, k: fn(Var, Box<Formula>) -> Formula| -> Result<Formula, FormulaError> {
        let mut inner = sigma.clone();
        inner.remove(v);
        let range_vars: BTreeSet<Var> =
            inner.iter().filter(|(w, _)| free_vars(b).contains(*w)).filter_map(|(_, t)| t.as_var().cloned()).collect();
        if range_vars.contains(v) {
            let mut avoid = b.all_vars();
            avoid.extend(range_vars);
            avoid.extend(inner.keys().cloned());
            avoid.extend(inner.values().filter_map(Term::as_var).cloned());
            let nv = fresh_var(v, &avoid);
            inner.insert(v.clone(), Term::Var(nv.clone()));
            Ok(k(nv, Box::new(substitute(b, &inner)?)))
        } else {
            Ok(k(v.clone(), Box::new(substitute(b, &inner)?)))
        }
    };
    Ok(match f {
        Formula::Rel(r, ts) => Formula::Rel(r.clone(), terms(ts)),
        Formula::NegRel(r, ts) => Formula::NegRel(r.clone(), terms(ts)),
        Formula::Eq(a, b) => Formula::Eq(term(a), term(b)),
        Formula::NegEq(a, b) => Formula::NegEq(term(a), term(b)),
        Formula::SeqEq(a, b) => Formula::SeqEq(terms(a), terms(b)),
        Formula::SeqNeq(a, b) => Formula::SeqNeq(terms(a), terms(b)),
        Formula::Bot => Formula::Bot,
        Formula::Top => Formula::Top,
        Formula::Dep { det, dep } => Formula::Dep { det: atom_list(det)?, dep: atom_list(dep)? },
        Formula::Ind { xs, zs, ys } => Formula::Ind { xs: atom_list(xs)?, zs: atom_list(zs)?, ys: atom_list(ys)? },
        Formula::Inc { xs, ys } => Formula::Inc { xs: atom_list(xs)?, ys: atom_list(ys)? },
        Formula::Gen { name, args } => Formula::Gen { name: name.clone(), args: atom_list(args)? },
        Formula::And(a, b) => Formula::and(substitute(a, &sigma)?, substitute(b, &sigma)?),
        Formula::SplitOr(a, b) => Formula::or(substitute(a, &sigma)?, substitute(b, &sigma)?),
        Formula::BoolOr(a, b) => Formula::bor(substitute(a, &sigma)?, substitute(b, &sigma)?),
        Formula::Implies(a, b) => Formula::implies(substitute(a, &sigma)?, substitute(b, &sigma)?),
        Formula::Exists(v, b) => binder(v, b, Formula::Exists)?,
        Formula::Forall(v, b) => binder(v, b, Formula::Forall)?,
        Formula::Exists1(v, b) => binder(v, b, Formula::Exists1)?,
        Formula::Forall1(v, b) => binder(v, b, Formula::Forall1)?,
        Formula::WNeg(b) => Formula::wneg(substitute(b, &sigma)?),
    })
}

/// Renames variables to variables; convenience wrapper over [`substitute`].
pub fn rename(f: &Formula, map: &BTreeMap<Var, Var>) -> Result<Formula, FormulaError> {
    let sigma = map.iter().map(|(a, b)| (a.clone(), Term::Var(b.clone()))).collect();
    substitute(f, &sigma)
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn alpha(a: &Formula, b: &Formula, env: &mut Vec<(Var, Var)>) -> bool {
    let var_eq = |x: &Var, y: &Var, env: &Vec<(Var, Var)>| {
        for (l, r) in env.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    };
    let term_eq = |x: &Term, y: &Term, env: &Vec<(Var, Var)>| match (x, y) {
        (Term::Var(p), Term::Var(q)) => var_eq(p, q, env),
        (Term::Const(p), Term::Const(q)) => p == q,
        _ => false,
    };
    let terms_eq = |x: &[Term], y: &[Term], env: &Vec<(Var, Var)>| {
        x.len() == y.len() && x.iter().zip(y).all(|(p, q)| term_eq(p, q, env))
    };
    let vars_eq = |x: &[Var], y: &[Var], env: &Vec<(Var, Var)>| {
        x.len() == y.len() && x.iter().zip(y).all(|(p, q)| var_eq(p, q, env))
    };
    match (a, b) {
        (Formula::Rel(r, x), Formula::Rel(s, y)) | (Formula::NegRel(r, x), Formula::NegRel(s, y)) => {
            r == s && terms_eq(x, y, env)
        }
        (Formula::Eq(p, q), Formula::Eq(r, s)) | (Formula::NegEq(p, q), Formula::NegEq(r, s)) => {
            term_eq(p, r, env) && term_eq(q, s, env)
        }
        (Formula::SeqEq(p, q), Formula::SeqEq(r, s)) | (Formula::SeqNeq(p, q), Formula::SeqNeq(r, s)) => {
            terms_eq(p, r, env) && terms_eq(q, s, env)
        }
        (Formula::Bot, Formula::Bot) | (Formula::Top, Formula::Top) => true,
        (Formula::Dep { det: d1, dep: e1 }, Formula::Dep { det: d2, dep: e2 }) => {
            vars_eq(d1, d2, env) && vars_eq(e1, e2, env)
        }
        (Formula::Ind { xs: x1, zs: z1, ys: y1 }, Formula::Ind { xs: x2, zs: z2, ys: y2 }) => {
            vars_eq(x1, x2, env) && vars_eq(z1, z2, env) && vars_eq(y1, y2, env)
        }
        (Formula::Inc { xs: x1, ys: y1 }, Formula::Inc { xs: x2, ys: y2 }) => {
            vars_eq(x1, x2, env) && vars_eq(y1, y2, env)
        }
        (Formula::Gen { name: n1, args: a1 }, Formula::Gen { name: n2, args: a2 }) => n1 == n2 && vars_eq(a1, a2, env),
        (Formula::And(p, q), Formula::And(r, s))
        | (Formula::SplitOr(p, q), Formula::SplitOr(r, s))
        | (Formula::BoolOr(p, q), Formula::BoolOr(r, s))
        | (Formula::Implies(p, q), Formula::Implies(r, s)) => alpha(p, r, env) && alpha(q, s, env),
        (Formula::Exists(x, p), Formula::Exists(y, q))
        | (Formula::Forall(x, p), Formula::Forall(y, q))
        | (Formula::Exists1(x, p), Formula::Exists1(y, q))
        | (Formula::Forall1(x, p), Formula::Forall1(y, q)) => {
            env.push((x.clone(), y.clone()));
            let r = alpha(p, q, env);
            env.pop();
            r
        }
        (Formula::WNeg(p), Formula::WNeg(q)) => alpha(p, q, env),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    #[test]
    fn free_vars_of_atoms_and_binders() {
        let ind = Formula::ind(vars(&["x"]), vars(&["z"]), vars(&["y"]));
        assert_eq!(free_vars(&ind), vars(&["x", "y", "z"]).into_iter().collect());
        let ex = Formula::exists(v("x"), Formula::dep(vars(&["x"]), vars(&["y"])));
        assert_eq!(free_vars(&ex), [v("y")].into_iter().collect());
        assert!(free_vars(&Formula::Bot).is_empty());
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::eq(v("x"), v("y"));
        let s: Substitution = [(v("x"), Term::constant("c"))].into_iter().collect();
        assert_eq!(substitute(&f, &s).unwrap(), Formula::eq(Term::constant("c"), v("y")));

        let f = Formula::exists(v("y"), Formula::eq(v("x"), v("y")));
        let s: Substitution = [(v("x"), Term::var("y"))].into_iter().collect();
        assert_eq!(substitute(&f, &s).unwrap(), Formula::exists(v("y'"), Formula::eq(v("y"), v("y'"))));

        let d = Formula::dep(vars(&["x"]), vars(&["y"]));
        let s: Substitution = [(v("x"), Term::constant("c"))].into_iter().collect();
        assert!(substitute(&d, &s).is_err());
    }

    #[test]
    fn substitution_leaves_bound_occurrences() {
        let f = Formula::and(Formula::eq(v("x"), v("z")), Formula::forall(v("x"), Formula::eq(v("x"), v("z"))));
        let s: Substitution = [(v("x"), Term::var("u"))].into_iter().collect();
        let g = substitute(&f, &s).unwrap();
        assert_eq!(g, Formula::and(Formula::eq(v("u"), v("z")), Formula::forall(v("x"), Formula::eq(v("x"), v("z")))));
    }

    #[test]
    fn negation_is_de_morgan() {
        let f = Formula::and(Formula::eq(v("x"), v("y")), Formula::rel("R", vec![Term::var("x")]));
        assert_eq!(
            fo_negate(&f).unwrap(),
            Formula::or(Formula::neq(v("x"), v("y")), Formula::NegRel("R".into(), vec![Term::var("x")]))
        );
        let g = Formula::forall(v("x"), Formula::eq(v("x"), v("x")));
        assert_eq!(fo_negate(&g).unwrap(), Formula::exists(v("x"), Formula::neq(v("x"), v("x"))));
        assert!(fo_negate(&Formula::dep(vars(&["x"]), vars(&["y"]))).is_err());
        assert_eq!(fo_negate(&Formula::Bot).unwrap(), Formula::Top);
    }

    #[test]
    fn first_order_recognition() {
        assert!(is_first_order(&Formula::eq(v("x"), v("y"))));
        assert!(!is_first_order(&Formula::dep(vars(&["x"]), vars(&["y"]))));
        assert!(!is_first_order(&Formula::bor(Formula::eq(v("x"), v("y")), Formula::Bot)));
    }

    #[test]
    fn sugar_expansion() {
        let imp = Formula::implies(Formula::eq(v("x"), v("y")), Formula::eq(v("u"), v("v")));
        assert_eq!(expand_sugar(&imp).unwrap(), Formula::or(Formula::neq(v("x"), v("y")), Formula::eq(v("u"), v("v"))));
        let xy: Vec<Term> = vec![Term::var("x"), Term::var("y")];
        let uv: Vec<Term> = vec![Term::var("u"), Term::var("v")];
        assert_eq!(
            expand_sugar(&Formula::seq_eq(xy.clone(), uv.clone())).unwrap(),
            Formula::and(Formula::eq(v("x"), v("u")), Formula::eq(v("y"), v("v")))
        );
        assert_eq!(
            expand_sugar(&Formula::seq_neq(xy, uv)).unwrap(),
            Formula::or(Formula::neq(v("x"), v("u")), Formula::neq(v("y"), v("v")))
        );
        let bad = Formula::implies(Formula::dep(vec![], vars(&["x"])), Formula::Top);
        assert_eq!(expand_sugar(&bad), Err(FormulaError::NonFoAntecedent));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Formula::exists(v("a"), Formula::eq(v("a"), v("x")));
        let b = Formula::exists(v("b"), Formula::eq(v("b"), v("x")));
        let c = Formula::exists(v("x"), Formula::eq(v("x"), v("x")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }
}
