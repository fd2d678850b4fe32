//! Existential second-order translation of team formulas and a checker for
//! the resulting sentences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{
    expand_sugar, fo_negate, free_vars, is_first_order, substitute, Formula, FormulaError, Term, Var,
};
use crate::genatom::{atom_def, atom_sentence, builtin_registry, AtomRegistry};
use crate::model::{expand_with_relation, Elem, Model, ModelError};
use crate::parser::print_formula;
use crate::semantics::{EvalError, Evaluator};
use crate::team::{Team, TeamError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsoFormula {
    pub so_vars: Vec<(Arc<str>, usize)>,
    pub matrix: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EsoError {
    #[error("weak negation has no direct translation; synthesize it first")]
    WNeg,
    #[error("variable {0} is not bound")]
    FreeVar(Var),
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("relation {sym} ranges over {size} tuples, above the cap of {cap}")]
    Cap { sym: String, size: usize, cap: usize },
    #[error("matrix is not first-order")]
    NotFirstOrder,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

pub const DEFAULT_SO_CAP: usize = 16;

pub fn print_eso(psi: &EsoFormula) -> String {
    let mut out = String::new();
    for (s, a) in &psi.so_vars {
        out.push_str(&format!("E2 {s}/{a}. "));
    }
    out.push_str(&print_formula(&psi.matrix));
    out
}

#[derive(Clone, Debug)]
enum Arg {
    Param(Var),
    Slot(usize),
    Hidden,
}

/// Membership in the current team: `t⃗ ∈ rel` iff `∃h⃗ sym(args[t⃗/slots, h⃗/hidden])`.
#[derive(Clone, Debug)]
struct Member {
    sym: Arc<str>,
    args: Vec<Arg>,
}

impl Member {
    fn apply(&self, t: &[Term], tag: &str) -> Formula {
        let mut hidden = Vec::new();
        let args = self
            .args
            .iter()
            .map(|a| match a {
                Arg::Param(p) => Term::Var(p.clone()),
                Arg::Slot(i) => t[*i].clone(),
                Arg::Hidden => {
                    let h = Var::new(format!("h${tag}_{}", hidden.len()));
                    hidden.push(h.clone());
                    Term::Var(h)
                }
            })
            .collect();
        Formula::exists_block(&hidden, Formula::Rel(self.sym.clone(), args))
    }

    /// The same team seen over `new_v`; the column of `drop` is forgotten.
    fn reindex(&self, old_v: &[Var], new_v: &[Var], drop: Option<&Var>) -> Member {
        let args = self
            .args
            .iter()
            .map(|a| match a {
                Arg::Slot(i) => {
                    let v = &old_v[*i];
                    if Some(v) == drop {
                        return Arg::Hidden;
                    }
                    match new_v.iter().position(|w| w == v) {
                        Some(j) => Arg::Slot(j),
                        None => Arg::Hidden,
                    }
                }
                other => other.clone(),
            })
            .collect();
        Member { sym: self.sym.clone(), args }
    }
}

fn terms(vs: &[Var]) -> Vec<Term> {
    vs.iter().cloned().map(Term::Var).collect()
}

struct Translator<'r> {
    registry: &'r AtomRegistry,
    so_vars: Vec<(Arc<str>, usize)>,
    counter: usize,
    params: BTreeSet<Var>,
}

impl Translator<'_> {
    fn tag(&mut self) -> String {
        self.counter += 1;
        self.counter.to_string()
    }

    fn fresh_so(&mut self, arity: usize) -> Arc<str> {
        let s: Arc<str> = Arc::from(format!("S${}", self.so_vars.len() + 1));
        self.so_vars.push((s.clone(), arity));
        s
    }

    fn fresh_param(&mut self) -> Var {
        Var::new(format!("p${}", self.tag()))
    }

    fn not_member(&mut self, mem: &Member, t: &[Term]) -> Formula {
        let tag = self.tag();
        fo_negate(&mem.apply(t, &tag)).expect("membership is first-order")
    }

    fn so_member(&mut self, p: &[Var], v: &[Var]) -> Member {
        let sym = self.fresh_so(p.len() + v.len());
        let args = p.iter().cloned().map(Arg::Param).chain((0..v.len()).map(Arg::Slot)).collect();
        Member { sym, args }
    }

    fn tr(&mut self, f: &Formula, mem: &Member, v: &[Var], p: &[Var]) -> Result<Formula, EsoError> {
        if let Some(x) = free_vars(f).into_iter().find(|x| !v.contains(x) && !p.contains(x) && !self.params.contains(x))
        {
            return Err(EsoError::FreeVar(x));
        }
        if is_first_order(f) {
            let guard = self.not_member(mem, &terms(v));
            return Ok(Formula::forall_block(v, Formula::or(guard, f.clone())));
        }
        Ok(match f {
            Formula::And(a, b) => Formula::and(self.tr(a, mem, v, p)?, self.tr(b, mem, v, p)?),
            Formula::BoolOr(a, b) => Formula::or(self.tr(a, mem, v, p)?, self.tr(b, mem, v, p)?),
            Formula::SplitOr(a, b) => {
                let s1 = self.so_member(p, v);
                let s2 = self.so_member(p, v);
                let ta = self.tr(a, &s1, v, p)?;
                let tb = self.tr(b, &s2, v, p)?;
                let vt = terms(v);
                let cover = Formula::or(self.not_member(mem, &vt), Formula::or(s1.apply(&vt, ""), s2.apply(&vt, "")));
                let tag = self.tag();
                let in1 = Formula::or(self.not_member(&s1, &vt), mem.apply(&vt, &tag));
                let in2 = Formula::or(self.not_member(&s2, &vt), mem.apply(&vt, &tag));
                Formula::conj([
                    ta,
                    tb,
                    Formula::forall_block(v, cover),
                    Formula::forall_block(v, in1),
                    Formula::forall_block(v, in2),
                ])
            }
            Formula::Exists(x, b) => {
                let rest: Vec<Var> = v.iter().filter(|w| *w != x).cloned().collect();
                let nv: Vec<Var> = std::iter::once(x.clone()).chain(rest.iter().cloned()).collect();
                let proj = mem.reindex(v, &rest, Some(x));
                let s = self.so_member(p, &nv);
                let tb = self.tr(b, &s, &nv, p)?;
                let rt = terms(&rest);
                let nt = terms(&nv);
                let some = Formula::or(self.not_member(&proj, &rt), Formula::exists(x.clone(), s.apply(&nt, "")));
                let tag = self.tag();
                let back = Formula::or(self.not_member(&s, &nt), proj.apply(&rt, &tag));
                Formula::conj([tb, Formula::forall_block(&rest, some), Formula::forall_block(&nv, back)])
            }
            Formula::Forall(x, b) => {
                let rest = v.iter().filter(|w| *w != x).cloned();
                let nv: Vec<Var> = std::iter::once(x.clone()).chain(rest).collect();
                let all = mem.reindex(v, &nv, Some(x));
                self.tr(b, &all, &nv, p)?
            }
            Formula::Exists1(x, b) | Formula::Forall1(x, b) => {
                let q = self.fresh_param();
                let body = substitute(b, &BTreeMap::from([(x.clone(), Term::Var(q.clone()))]))?;
                let rest: Vec<Var> = v.iter().filter(|w| *w != x).cloned().collect();
                let proj = mem.reindex(v, &rest, Some(x));
                self.params.insert(q.clone());
                if matches!(f, Formula::Exists1(..)) {
                    Formula::exists(q, self.tr(&body, &proj, &rest, p)?)
                } else {
                    let np: Vec<Var> = p.iter().cloned().chain(std::iter::once(q.clone())).collect();
                    Formula::forall(q, self.tr(&body, &proj, &rest, &np)?)
                }
            }
            Formula::WNeg(_) => return Err(EsoError::WNeg),
            atom => {
                let (def, args) = atom_def(atom, self.registry).ok_or_else(|| match atom {
                    Formula::Gen { name, .. } => EsoError::UnknownAtom(name.to_string()),
                    _ => EsoError::NotFirstOrder,
                })?;
                if args.is_empty() {
                    return Ok(Formula::Top);
                }
                let tag = self.tag();
                let hidden: Vec<Var> = (0..v.len()).map(|i| Var::new(format!("h${tag}r{i}"))).collect();
                let inner = format!("{tag}i");
                let member = |w: &[Var]| -> Formula {
                    let eqs = args.iter().zip(w).map(|(a, wl)| {
                        let rhs = match v.iter().position(|x| x == a) {
                            Some(i) => Term::Var(hidden[i].clone()),
                            None => Term::Var(a.clone()),
                        };
                        Formula::Eq(Term::Var(wl.clone()), rhs)
                    });
                    let body = Formula::conj(std::iter::once(mem.apply(&terms(&hidden), &inner)).chain(eqs));
                    Formula::exists_block(&hidden, body)
                };
                atom_sentence(&def, &member)
            }
        })
    }
}

/// τ_φ(R): `R` ranges over the sorted free variables of `phi`.
pub fn tau(phi: &Formula, r: &str) -> Result<EsoFormula, EsoError> {
    tau_with(phi, r, builtin_registry())
}

pub fn tau_with(phi: &Formula, r: &str, registry: &AtomRegistry) -> Result<EsoFormula, EsoError> {
    let phi = expand_sugar(phi)?;
    let v: Vec<Var> = free_vars(&phi).into_iter().collect();
    let mem = Member { sym: Arc::from(r), args: (0..v.len()).map(Arg::Slot).collect() };
    let mut t = Translator { registry, so_vars: Vec::new(), counter: 0, params: BTreeSet::new() };
    let matrix = t.tr(&phi, &mem, &v, &[])?;
    Ok(EsoFormula { so_vars: t.so_vars, matrix })
}

enum Node {
    Lit(Formula),
    And(Vec<Node>),
    Or(Vec<Node>),
    Ex(Var, Box<Node>),
    All(Var, Box<Node>),
    So(Box<SoBlock>),
}

struct SoBlock {
    id: usize,
    vars: Vec<(Arc<str>, usize)>,
    /// Each child is checked once the variables up to its stage are fixed.
    children: Vec<(usize, Node)>,
    fv: Vec<Var>,
    fso: Vec<Arc<str>>,
}

fn so_names(f: &Formula, names: &BTreeSet<Arc<str>>) -> BTreeSet<Arc<str>> {
    f.relations().into_iter().map(|(s, _)| s).filter(|s| names.contains(s)).collect()
}

fn drop_arg(f: &Formula, sym: &str, i: usize) -> Formula {
    let cut =
        |ts: &[Term]| -> Vec<Term> { ts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t.clone()).collect() };
    match f {
        Formula::Rel(s, ts) if &**s == sym => Formula::Rel(s.clone(), cut(ts)),
        Formula::NegRel(s, ts) if &**s == sym => Formula::NegRel(s.clone(), cut(ts)),
        Formula::And(a, b) => Formula::and(drop_arg(a, sym, i), drop_arg(b, sym, i)),
        Formula::SplitOr(a, b) => Formula::or(drop_arg(a, sym, i), drop_arg(b, sym, i)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), drop_arg(b, sym, i)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), drop_arg(b, sym, i)),
        other => other.clone(),
    }
}

/// Position at which every occurrence of `sym` carries `x`, if any.
fn skolem_position(f: &Formula, sym: &str, arity: usize, x: &Var) -> Option<usize> {
    let mut binds = false;
    let mut ok = vec![true; arity];
    f.visit(&mut |g| match g {
        Formula::Rel(s, ts) | Formula::NegRel(s, ts) if &**s == sym => {
            for (j, t) in ts.iter().enumerate() {
                if t.as_var() != Some(x) {
                    ok[j] = false;
                }
            }
        }
        Formula::Exists(v, _) | Formula::Forall(v, _) if v == x => binds = true,
        _ => {}
    });
    if binds {
        return None;
    }
    ok.iter().position(|&b| b)
}

struct Builder {
    names: BTreeSet<Arc<str>>,
    next: usize,
}

impl Builder {
    fn so_block(&mut self, vars: Vec<(Arc<str>, usize)>, children: Vec<Node>) -> Node {
        let (mut fv, mut fso) = (BTreeSet::new(), BTreeSet::new());
        for c in &children {
            free_of(c, &mut fv, &mut fso);
        }
        for (s, _) in &vars {
            fso.remove(s);
        }
        let children = children
            .into_iter()
            .map(|c| {
                let (mut cv, mut cs) = (BTreeSet::new(), BTreeSet::new());
                free_of(&c, &mut cv, &mut cs);
                let stage = vars.iter().rposition(|(s, _)| cs.contains(s)).map_or(0, |i| i + 1);
                (stage, c)
            })
            .collect();
        self.next += 1;
        Node::So(Box::new(SoBlock {
            id: self.next,
            vars,
            children,
            fv: fv.into_iter().collect(),
            fso: fso.into_iter().collect(),
        }))
    }

    fn build(&mut self, f: &Formula, pending: &[(Arc<str>, usize)]) -> Result<Node, EsoError> {
        let here = so_names(f, &self.names);
        let pending: Vec<(Arc<str>, usize)> = pending.iter().filter(|(s, _)| here.contains(s)).cloned().collect();
        Ok(match f {
            Formula::And(..) => {
                let parts = f.conjuncts();
                let uses: Vec<BTreeSet<Arc<str>>> = parts.iter().map(|p| so_names(p, &self.names)).collect();
                let mut own: Vec<Vec<(Arc<str>, usize)>> = vec![Vec::new(); parts.len()];
                let mut shared = Vec::new();
                for sv in &pending {
                    let at: Vec<usize> = (0..parts.len()).filter(|&i| uses[i].contains(&sv.0)).collect();
                    if at.len() == 1 {
                        own[at[0]].push(sv.clone());
                    } else {
                        shared.push(sv.clone());
                    }
                }
                let mut comp: Vec<usize> = (0..parts.len()).collect();
                fn root(c: &mut [usize], i: usize) -> usize {
                    let mut r = i;
                    while c[r] != r {
                        r = c[r];
                    }
                    c[i] = r;
                    r
                }
                for (s, _) in &shared {
                    let at: Vec<usize> = (0..parts.len()).filter(|&i| uses[i].contains(s)).collect();
                    for w in at.windows(2) {
                        let (a, b) = (root(&mut comp, w[0]), root(&mut comp, w[1]));
                        comp[a] = b;
                    }
                }
                let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for i in 0..parts.len() {
                    let r = root(&mut comp, i);
                    groups.entry(r).or_default().push(i);
                }
                let mut out = Vec::new();
                for members in groups.values() {
                    let vars: Vec<(Arc<str>, usize)> =
                        shared.iter().filter(|(s, _)| members.iter().any(|&i| uses[i].contains(s))).cloned().collect();
                    let mut nodes = Vec::new();
                    for &i in members {
                        nodes.push(self.build(parts[i], &own[i])?);
                    }
                    if vars.is_empty() {
                        out.extend(nodes);
                    } else {
                        out.push(self.so_block(vars, nodes));
                    }
                }
                Node::And(out)
            }
            Formula::SplitOr(a, b) | Formula::BoolOr(a, b) => {
                Node::Or(vec![self.build(a, &pending)?, self.build(b, &pending)?])
            }
            Formula::Exists(x, b) => Node::Ex(x.clone(), Box::new(self.build(b, &pending)?)),
            Formula::Forall(x, b) => {
                let mut body = (**b).clone();
                let mut inner = Vec::new();
                let mut outer = Vec::new();
                for (s, a) in &pending {
                    match skolem_position(&body, s, *a, x) {
                        Some(i) => {
                            body = drop_arg(&body, s, i);
                            inner.push((s.clone(), a - 1));
                        }
                        None => outer.push((s.clone(), *a)),
                    }
                }
                let node = Node::All(x.clone(), Box::new(self.build(&body, &inner)?));
                if outer.is_empty() {
                    node
                } else {
                    self.so_block(outer, vec![node])
                }
            }
            Formula::Rel(..)
            | Formula::NegRel(..)
            | Formula::Eq(..)
            | Formula::NegEq(..)
            | Formula::Top
            | Formula::Bot => {
                let node = Node::Lit(f.clone());
                if pending.is_empty() {
                    node
                } else {
                    self.so_block(pending, vec![node])
                }
            }
            _ => return Err(EsoError::NotFirstOrder),
        })
    }
}

fn free_of(n: &Node, fv: &mut BTreeSet<Var>, fso: &mut BTreeSet<Arc<str>>) {
    match n {
        Node::Lit(f) => {
            fv.extend(free_vars(f));
            fso.extend(f.relations().into_iter().map(|(s, _)| s));
        }
        Node::And(cs) | Node::Or(cs) => cs.iter().for_each(|c| free_of(c, fv, fso)),
        Node::Ex(x, b) | Node::All(x, b) => {
            let mut inner = BTreeSet::new();
            free_of(b, &mut inner, fso);
            inner.remove(x);
            fv.extend(inner);
        }
        Node::So(block) => {
            fv.extend(block.fv.iter().cloned());
            fso.extend(block.fso.iter().cloned());
        }
    }
}

struct Checker<'m> {
    m: &'m Model,
    cap: usize,
    fo: Vec<(Var, Elem)>,
    so: Vec<(Arc<str>, usize, u64)>,
    memo: HashMap<(usize, Vec<Elem>, Vec<u64>), bool>,
}

impl Checker<'_> {
    fn value(&self, t: &Term) -> Result<Elem, EsoError> {
        match t {
            Term::Var(v) => {
                self.fo.iter().rev().find(|(w, _)| w == v).map(|(_, e)| *e).ok_or_else(|| EsoError::FreeVar(v.clone()))
            }
            Term::Const(c) => self.m.constant(c).ok_or_else(|| EvalError::UnknownConstant(c.to_string()).into()),
        }
    }

    fn rel(&self, sym: &Arc<str>, ts: &[Term]) -> Result<bool, EsoError> {
        let vals = ts.iter().map(|t| self.value(t)).collect::<Result<Vec<_>, _>>()?;
        if let Some((_, arity, mask)) = self.so.iter().rev().find(|(s, ..)| s == sym) {
            if *arity != vals.len() {
                return Err(EvalError::Arity { sym: sym.to_string(), expected: *arity, got: vals.len() }.into());
            }
            let n = self.m.size() as u64;
            let idx = vals.iter().fold(0u64, |acc, e| acc * n + e.0 as u64);
            return Ok(mask >> idx & 1 == 1);
        }
        let rel = self.m.relation(sym).ok_or_else(|| EvalError::UnknownRelation(sym.to_string()))?;
        let arity = self.m.arity(sym).unwrap_or(0);
        if arity != vals.len() {
            return Err(EvalError::Arity { sym: sym.to_string(), expected: arity, got: vals.len() }.into());
        }
        Ok(rel.contains(&vals))
    }

    fn eval(&mut self, n: &Node) -> Result<bool, EsoError> {
        Ok(match n {
            Node::Lit(f) => match f {
                Formula::Rel(s, ts) => self.rel(s, ts)?,
                Formula::NegRel(s, ts) => !self.rel(s, ts)?,
                Formula::Eq(a, b) => self.value(a)? == self.value(b)?,
                Formula::NegEq(a, b) => self.value(a)? != self.value(b)?,
                Formula::Top => true,
                _ => false,
            },
            Node::And(cs) => {
                for c in cs {
                    if !self.eval(c)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::Or(cs) => {
                for c in cs {
                    if self.eval(c)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::Ex(x, b) | Node::All(x, b) => {
                let want = matches!(n, Node::Ex(..));
                for e in 0..self.m.size() {
                    self.fo.push((x.clone(), Elem(e as u16)));
                    let r = self.eval(b);
                    self.fo.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                !want
            }
            Node::So(block) => {
                let fo = block.fv.iter().map(|v| self.value(&Term::Var(v.clone()))).collect::<Result<Vec<_>, _>>()?;
                let so = block
                    .fso
                    .iter()
                    .filter_map(|s| self.so.iter().rev().find(|(t, ..)| t == s).map(|(.., m)| *m))
                    .collect();
                let key = (block.id, fo, so);
                if let Some(&r) = self.memo.get(&key) {
                    return Ok(r);
                }
                let r = self.block(block, 0)?;
                self.memo.insert(key, r);
                r
            }
        })
    }

    fn stage(&mut self, block: &SoBlock, stage: usize) -> Result<bool, EsoError> {
        for (s, c) in &block.children {
            if *s == stage && !self.eval(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn block(&mut self, block: &SoBlock, i: usize) -> Result<bool, EsoError> {
        if i == 0 && !self.stage(block, 0)? {
            return Ok(false);
        }
        if i == block.vars.len() {
            return Ok(true);
        }
        let (sym, arity) = &block.vars[i];
        let size = self.m.size().checked_pow(*arity as u32).unwrap_or(usize::MAX);
        if size > self.cap || size > 63 {
            return Err(EsoError::Cap { sym: sym.to_string(), size, cap: self.cap });
        }
        for mask in 0..1u64 << size {
            self.so.push((sym.clone(), *arity, mask));
            let r = match self.stage(block, i + 1) {
                Ok(true) => self.block(block, i + 1),
                other => other,
            };
            self.so.pop();
            if r? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Truth of `∃S⃗ matrix` in `m`, enumerating each relation variable's interpretations.
pub fn eval_eso(m: &Model, psi: &EsoFormula) -> Result<bool, EsoError> {
    eval_eso_capped(m, psi, DEFAULT_SO_CAP)
}

/// As [`eval_eso`], with `cap` bounding `|M|^arity` for every relation variable.
pub fn eval_eso_capped(m: &Model, psi: &EsoFormula, cap: usize) -> Result<bool, EsoError> {
    let matrix = expand_sugar(&psi.matrix)?;
    if !is_first_order(&matrix) {
        return Err(EsoError::NotFirstOrder);
    }
    let names: BTreeSet<Arc<str>> = psi.so_vars.iter().map(|(s, _)| s.clone()).collect();
    let mut b = Builder { names, next: 0 };
    let root = b.build(&matrix, &psi.so_vars)?;
    let mut c = Checker { m, cap, fo: Vec::new(), so: Vec::new(), memo: HashMap::new() };
    c.eval(&root)
}

/// Whether `X ⊨ φ` agrees with `(M, rel(X)) ⊨ τ_φ(R)`.
pub fn check_correspondence(m: &Model, team: &Team, phi: &Formula) -> Result<bool, EsoError> {
    check_correspondence_with(m, team, phi, builtin_registry())
}

pub fn check_correspondence_with(
    m: &Model,
    team: &Team,
    phi: &Formula,
    registry: &AtomRegistry,
) -> Result<bool, EsoError> {
    const R: &str = "R$0";
    let lhs = Evaluator::new(m, registry).eval(team, phi)?;
    let xs: Vec<Var> = free_vars(phi).into_iter().collect();
    let rel = team.rel(&xs)?;
    let expanded = expand_with_relation(m, R, xs.len(), rel)?;
    let rhs = eval_eso(&expanded, &tau_with(phi, R, registry)?)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::vars;
    use crate::parser::parse_formula;
    use crate::team::all_teams;

    fn sentence(so: &[(&str, usize)], text: &str) -> EsoFormula {
        EsoFormula {
            so_vars: so.iter().map(|(s, a)| (Arc::from(*s), *a)).collect(),
            matrix: crate::parser::parse_formula_with(
                text,
                &crate::parser::ParseOptions::reserved(),
                builtin_registry(),
            )
            .unwrap(),
        }
    }

    fn with_p(m: Model) -> Model {
        m.with_relation("P", 1, [vec![Elem(0)]].into_iter().collect()).unwrap()
    }

    #[test]
    fn plain_checks() {
        let one = Model::standard(1);
        assert!(eval_eso(&one, &sentence(&[("S$1", 1)], "A x. S$1(x)")).unwrap());
        let two = Model::standard(2);
        assert!(!eval_eso(&two, &sentence(&[("S$1", 1)], "A x. S$1(x) /\\ E x. !S$1(x)")).unwrap());
        assert!(eval_eso(&with_p(two.clone()), &sentence(&[], "E x. P(x)")).unwrap());
        assert!(!eval_eso(&with_p(two.clone()), &sentence(&[], "A x. P(x)")).unwrap());
        assert!(
            eval_eso(&two, &sentence(&[("S$1", 2)], "A x. E y. (S$1(x, y) /\\ A z. (!S$1(x, z) \\/ z = y))")).unwrap()
        );
    }

    #[test]
    fn cap_is_enforced() {
        let m = Model::standard(3);
        let psi = sentence(&[("S$1", 3)], "E x. S$1(x, x, x)");
        assert!(matches!(eval_eso(&m, &psi), Err(EsoError::Cap { .. })));
    }

    #[test]
    fn shapes() {
        let psi = tau(&parse_formula("x = y").unwrap(), "R").unwrap();
        assert!(psi.so_vars.is_empty());
        assert_eq!(print_eso(&psi), "A x. A y. (!R(x, y) \\/ x = y)");
        let psi = tau(&parse_formula("=(x; y) \\/ =(y; x)").unwrap(), "R").unwrap();
        assert_eq!(psi.so_vars.len(), 2);
        assert!(print_eso(&psi).starts_with("E2 S$1/2. E2 S$2/2. "));
        assert_eq!(tau(&parse_formula("wneg x = y").unwrap(), "R"), Err(EsoError::WNeg));
    }

    #[test]
    fn correspondence_on_small_teams() {
        let m = Model::standard(2);
        let xy = vars(&["x", "y"]);
        let cases = [
            "=(x; y)",
            "inc(x; y)",
            "ind(x; ; y)",
            "=(x; y) \\/ =(y; x)",
            "inc(x; y) \\/ inc(y; x)",
            "E x. (inc(x; y) /\\ x != y)",
            "A x. =(y; x)",
            "E1 x. (x = y)",
            "A1 x. (=(y; x) || x = y)",
            "x = y || =(x; y)",
        ];
        for text in cases {
            let phi = parse_formula(text).unwrap();
            for t in all_teams(&m, &xy, 16).unwrap() {
                assert!(check_correspondence(&m, &t, &phi).unwrap(), "{text} on {t:?}");
            }
        }
    }

    #[test]
    fn sentences_use_nullary_relation() {
        let m = Model::standard(2);
        let phi = parse_formula("E x. A y. =(x; y)").unwrap();
        assert!(check_correspondence(&m, &Team::unit(), &phi).unwrap());
        assert!(check_correspondence(&m, &Team::empty(vec![]), &phi).unwrap());
    }
}
