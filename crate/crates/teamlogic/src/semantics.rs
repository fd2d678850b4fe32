//! Lax team semantics and Tarskian evaluation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;
use varisat::{ExtendFormula, Lit, Solver};

use crate::formula::{free_vars, is_first_order, Formula, Term, Var};
use crate::genatom::{builtin_registry, eval_direct, AtomRegistry};
use crate::model::{Elem, Model, Tuple};
use crate::team::{Assignment, Team};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    /// Largest team on which a split disjunction is decided.
    pub max_split_rows: usize,
    /// Largest (compacted) team on which an existential enumerates value sets.
    pub max_supplement_rows: usize,
    /// Cap on the number of value-set combinations one existential may try.
    pub max_supplement_choices: u64,
    /// Cap on candidate rows for the existential-block solver.
    pub max_block_rows: usize,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            max_split_rows: 16,
            max_supplement_rows: 16,
            max_supplement_choices: 5_000_000,
            max_block_rows: 1 << 16,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable {0} is not in the team domain")]
    FreeVar(Var),
    #[error("unknown relation symbol {0}")]
    UnknownRelation(String),
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("relation {sym} has arity {expected}, used with {got} arguments")]
    Arity { sym: String, expected: usize, got: usize },
    #[error("unknown generalized atom {0}")]
    UnknownAtom(String),
    #[error("formula is not first-order")]
    NotFirstOrder,
    #[error("evaluation budget exceeded: {0}")]
    Budget(String),
}

pub(crate) struct Scope<'a> {
    vars: &'a [Var],
    vals: &'a [Elem],
    stack: Vec<(Var, Elem)>,
}

impl<'a> Scope<'a> {
    pub(crate) fn new(vars: &'a [Var], vals: &'a [Elem]) -> Scope<'a> {
        Scope { vars, vals, stack: Vec::new() }
    }

    fn get(&self, v: &Var) -> Option<Elem> {
        if let Some((_, e)) = self.stack.iter().rev().find(|(w, _)| w == v) {
            return Some(*e);
        }
        self.vars.iter().position(|w| w == v).map(|i| self.vals[i])
    }
}

fn term_value(m: &Model, t: &Term, s: &Scope) -> Result<Elem, EvalError> {
    match t {
        Term::Var(v) => s.get(v).ok_or_else(|| EvalError::FreeVar(v.clone())),
        Term::Const(c) => m.constant(c).ok_or_else(|| EvalError::UnknownConstant(c.to_string())),
    }
}

fn rel_holds(m: &Model, r: &str, ts: &[Term], s: &Scope) -> Result<bool, EvalError> {
    let rel = m.relation(r).ok_or_else(|| EvalError::UnknownRelation(r.to_string()))?;
    let arity = m.arity(r).unwrap_or(0);
    if arity != ts.len() {
        return Err(EvalError::Arity { sym: r.to_string(), expected: arity, got: ts.len() });
    }
    let tuple = ts.iter().map(|t| term_value(m, t, s)).collect::<Result<Tuple, _>>()?;
    Ok(rel.contains(&tuple))
}

pub(crate) fn tarski(m: &Model, f: &Formula, s: &mut Scope) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Rel(r, ts) => rel_holds(m, r, ts, s)?,
        Formula::NegRel(r, ts) => !rel_holds(m, r, ts, s)?,
        Formula::Eq(a, b) => term_value(m, a, s)? == term_value(m, b, s)?,
        Formula::NegEq(a, b) => term_value(m, a, s)? != term_value(m, b, s)?,
        Formula::SeqEq(a, b) | Formula::SeqNeq(a, b) => {
            let mut all = true;
            for (x, y) in a.iter().zip(b) {
                all &= term_value(m, x, s)? == term_value(m, y, s)?;
            }
            all == matches!(f, Formula::SeqEq(..))
        }
        Formula::Bot => false,
        Formula::Top => true,
        Formula::And(a, b) => tarski(m, a, s)? && tarski(m, b, s)?,
        Formula::SplitOr(a, b) => tarski(m, a, s)? || tarski(m, b, s)?,
        Formula::Implies(a, b) => !tarski(m, a, s)? || tarski(m, b, s)?,
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let want = matches!(f, Formula::Exists(..));
            for e in m.elements() {
                s.stack.push((v.clone(), e));
                let r = tarski(m, b, s);
                s.stack.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
        _ => return Err(EvalError::NotFirstOrder),
    })
}

/// Tarskian truth of a first-order formula under one assignment.
pub fn eval_single(m: &Model, s: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    if !is_first_order(f) {
        return Err(EvalError::NotFirstOrder);
    }
    let vars: Vec<Var> = s.keys().cloned().collect();
    let vals: Vec<Elem> = s.values().copied().collect();
    tarski(m, f, &mut Scope::new(&vars, &vals))
}

pub struct Evaluator<'a> {
    model: &'a Model,
    registry: &'a AtomRegistry,
    budget: EvalBudget,
    block_solver: bool,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a Model, registry: &'a AtomRegistry) -> Evaluator<'a> {
        Evaluator { model, registry, budget: EvalBudget::default(), block_solver: true }
    }

    pub fn with_budget(mut self, budget: EvalBudget) -> Self {
        self.budget = budget;
        self
    }

    /// Disables the existential-block solver so every existential goes through value-set search.
    pub fn without_block_solver(mut self) -> Self {
        self.block_solver = false;
        self
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn eval(&self, team: &Team, f: &Formula) -> Result<bool, EvalError> {
        for v in free_vars(f) {
            if team.index_of(&v).is_none() {
                return Err(EvalError::FreeVar(v));
            }
        }
        let mut run = Run { ev: self, memo: HashMap::new(), fv: HashMap::new() };
        run.eval(team, f)
    }
}

/// Evaluates with the builtin atom registry and the default budget.
pub fn eval(m: &Model, team: &Team, f: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(m, builtin_registry()).eval(team, f)
}

struct Run<'e, 'a> {
    ev: &'e Evaluator<'a>,
    memo: HashMap<(usize, Team), bool>,
    fv: HashMap<usize, BTreeSet<Var>>,
}

fn key(f: &Formula) -> usize {
    f as *const Formula as usize
}

fn project(row: &[Elem], idx: &[usize]) -> Tuple {
    idx.iter().map(|&i| row[i]).collect()
}

pub(crate) fn eval_dep(team: &Team, det: &[Var], dep: &[Var]) -> Result<bool, EvalError> {
    let di = team.indices(det).map_err(team_err)?;
    let ei = team.indices(dep).map_err(team_err)?;
    let mut seen: HashMap<Tuple, Tuple> = HashMap::new();
    for r in team.rows() {
        let e = project(r, &ei);
        if let Some(prev) = seen.insert(project(r, &di), e.clone()) {
            if prev != e {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub(crate) fn eval_ind(team: &Team, xs: &[Var], zs: &[Var], ys: &[Var]) -> Result<bool, EvalError> {
    let xi = team.indices(xs).map_err(team_err)?;
    let zi = team.indices(zs).map_err(team_err)?;
    let yi = team.indices(ys).map_err(team_err)?;
    let mut triples = BTreeSet::new();
    let mut classes: BTreeMap<Tuple, (BTreeSet<Tuple>, BTreeSet<Tuple>)> = BTreeMap::new();
    for r in team.rows() {
        let (x, y, z) = (project(r, &xi), project(r, &yi), project(r, &zi));
        let entry = classes.entry(z.clone()).or_default();
        entry.0.insert(x.clone());
        entry.1.insert(y.clone());
        triples.insert((x, y, z));
    }
    for (z, (xset, yset)) in &classes {
        for x in xset {
            for y in yset {
                if !triples.contains(&(x.clone(), y.clone(), z.clone())) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub(crate) fn eval_inc(team: &Team, xs: &[Var], ys: &[Var]) -> Result<bool, EvalError> {
    let xr = team.rel(xs).map_err(team_err)?;
    let yr = team.rel(ys).map_err(team_err)?;
    Ok(xr.is_subset(&yr))
}

fn team_err(e: crate::team::TeamError) -> EvalError {
    match e {
        crate::team::TeamError::UnknownVar(v) => EvalError::FreeVar(v),
        other => EvalError::Budget(other.to_string()),
    }
}

fn literal(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Rel(..)
            | Formula::NegRel(..)
            | Formula::Eq(..)
            | Formula::NegEq(..)
            | Formula::SeqEq(..)
            | Formula::SeqNeq(..)
            | Formula::Implies(..)
    )
}

impl Run<'_, '_> {
    fn model(&self) -> &Model {
        self.ev.model
    }

    fn free(&mut self, f: &Formula) -> BTreeSet<Var> {
        self.fv.entry(key(f)).or_insert_with(|| free_vars(f)).clone()
    }

    fn rowwise(&self, team: &Team, f: &Formula) -> Result<bool, EvalError> {
        for r in team.rows() {
            if !tarski(self.model(), f, &mut Scope::new(team.vars(), r))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn eval(&mut self, team: &Team, f: &Formula) -> Result<bool, EvalError> {
        if literal(f) {
            return self.rowwise(team, f);
        }
        match f {
            Formula::Bot => return Ok(team.is_empty()),
            Formula::Top => return Ok(true),
            Formula::Dep { det, dep } => return eval_dep(team, det, dep),
            Formula::Ind { xs, zs, ys } => return eval_ind(team, xs, zs, ys),
            Formula::Inc { xs, ys } => return eval_inc(team, xs, ys),
            Formula::Gen { name, args } => {
                let def = self.ev.registry.get(name).ok_or_else(|| EvalError::UnknownAtom(name.to_string()))?;
                return eval_direct(self.model(), team, def, args);
            }
            Formula::And(a, b) => return Ok(self.eval(team, a)? && self.eval(team, b)?),
            _ => {}
        }
        let k = (key(f), team.clone());
        if let Some(&r) = self.memo.get(&k) {
            return Ok(r);
        }
        let r = match f {
            Formula::SplitOr(a, b) => self.split_or(team, a, b)?,
            Formula::BoolOr(a, b) => self.eval(team, a)? || self.eval(team, b)?,
            Formula::Exists(v, b) => self.exists(team, f, v, b)?,
            Formula::Forall(v, b) => {
                let t = team.duplicate(self.ev.model, v);
                self.eval(&t, b)?
            }
            Formula::Exists1(v, b) | Formula::Forall1(v, b) => {
                let want = matches!(f, Formula::Exists1(..));
                let mut result = !want;
                let m = self.ev.model;
                for e in m.elements() {
                    let t = team.duplicate_over(&[e], v);
                    if self.eval(&t, b)? == want {
                        result = want;
                        break;
                    }
                }
                result
            }
            Formula::WNeg(b) => team.is_empty() || !self.eval(team, b)?,
            _ => unreachable!("handled above"),
        };
        self.memo.insert(k, r);
        Ok(r)
    }

    fn split_or(&mut self, team: &Team, a: &Formula, b: &Formula) -> Result<bool, EvalError> {
        if team.is_empty() || self.eval(team, a)? || self.eval(team, b)? {
            return Ok(true);
        }
        let rows: Vec<&Tuple> = team.rows().iter().collect();
        let n = rows.len();
        if n > self.ev.budget.max_split_rows {
            return Err(EvalError::Budget(format!(
                "split disjunction over {n} rows exceeds {}",
                self.ev.budget.max_split_rows
            )));
        }
        let full = (1usize << n) - 1;
        let sub = |mask: usize| {
            team.with_rows(
                rows.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| (*r).clone()).collect(),
            )
        };
        // up[m]: some superset of m satisfies b
        let mut up = vec![false; full + 1];
        for (mask, slot) in up.iter_mut().enumerate() {
            *slot = self.eval(&sub(mask), b)?;
        }
        for i in 0..n {
            for mask in 0..=full {
                if mask >> i & 1 == 0 && up[mask | 1 << i] {
                    up[mask] = true;
                }
            }
        }
        for mask in 0..=full {
            if up[full ^ mask] && self.eval(&sub(mask), a)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn exists(&mut self, team: &Team, whole: &Formula, v: &Var, body: &Formula) -> Result<bool, EvalError> {
        let keep = self.free(whole);
        let base = team.restrict(&keep).map_err(team_err)?;
        if base.is_empty() {
            return self.eval(&base.duplicate_over(&[], v), body);
        }
        if self.ev.block_solver {
            if let Some(r) = self.block(&base, whole)? {
                return Ok(r);
            }
        }
        self.supplements(&base, v, body)
    }

    fn supplements(&mut self, base: &Team, v: &Var, body: &Formula) -> Result<bool, EvalError> {
        let rows: Vec<Tuple> = base.rows().iter().cloned().collect();
        let n = rows.len();
        if n > self.ev.budget.max_supplement_rows {
            return Err(EvalError::Budget(format!(
                "existential over {n} rows exceeds {}",
                self.ev.budget.max_supplement_rows
            )));
        }
        let probe = base.duplicate_over(&[Elem(0)], v);
        let pos = probe.index_of(v).expect("inserted");
        let filters: Vec<&Formula> =
            body.conjuncts().into_iter().filter(|c| is_first_order(c) && free_vars(c).contains(v)).collect();
        let mut choices: Vec<Vec<Vec<Elem>>> = Vec::with_capacity(n);
        let mut total: u64 = 1;
        for r in &rows {
            let mut ok = Vec::new();
            for e in self.model().elements() {
                let mut row = r.clone();
                row.insert(pos, e);
                let mut pass = true;
                for c in &filters {
                    if !tarski(self.model(), c, &mut Scope::new(probe.vars(), &row))? {
                        pass = false;
                        break;
                    }
                }
                if pass {
                    ok.push(e);
                }
            }
            if ok.is_empty() {
                return Ok(false);
            }
            let mut subsets: Vec<Vec<Elem>> = (1u32..1 << ok.len())
                .map(|mask| ok.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect())
                .collect();
            subsets.sort_by_key(Vec::len);
            total = total.saturating_mul(subsets.len() as u64);
            choices.push(subsets);
        }
        if total > self.ev.budget.max_supplement_choices {
            return Err(EvalError::Budget(format!(
                "existential needs {total} value-set combinations, cap is {}",
                self.ev.budget.max_supplement_choices
            )));
        }
        let mut pick = vec![0usize; n];
        loop {
            let mut out = probe.with_rows(BTreeSet::new());
            for (i, r) in rows.iter().enumerate() {
                for &e in &choices[i][pick[i]] {
                    let mut row = r.clone();
                    row.insert(pos, e);
                    out.insert_row(row).expect("row length");
                }
            }
            if self.eval(&out, body)? {
                return Ok(true);
            }
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(false);
                }
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    /// Decides `∃v⃗(α₁ ∧ … ∧ αₖ)` with first-order and dependency conjuncts by SAT.
    /// Returns `None` when the formula does not have that shape.
    fn block(&mut self, base: &Team, whole: &Formula) -> Result<Option<bool>, EvalError> {
        let mut bvars = Vec::new();
        let mut conj = Vec::new();
        if !flatten_block(whole, &mut bvars, &mut conj) {
            return Ok(None);
        }
        if !conj.iter().any(|c| matches!(c, Formula::Dep { .. } | Formula::Ind { .. } | Formula::Inc { .. })) {
            return Ok(None);
        }
        let m = self.ev.model;
        let mut cols: Vec<Var> = base.vars().to_vec();
        cols.extend(bvars.iter().cloned());
        let Some((universe, owner)) = candidate_rows(m, base, &cols, &conj, self.ev.budget.max_block_rows)? else {
            return Ok(None);
        };
        if conj.iter().any(|c| matches!(c, Formula::Bot)) {
            return Ok(Some(false));
        }
        let col = |v: &Var| cols.iter().position(|w| w == v).expect("column");
        let cols_of = |vs: &[Var]| vs.iter().map(col).collect::<Vec<_>>();

        let mut solver = Solver::new();
        let r: Vec<Lit> = (0..universe.len()).map(|_| solver.new_lit()).collect();
        for si in 0..base.len() {
            let cover: Vec<Lit> = (0..universe.len()).filter(|&u| owner[u] == si).map(|u| r[u]).collect();
            if cover.is_empty() {
                return Ok(Some(false));
            }
            solver.add_clause(&cover);
        }
        for c in &conj {
            match c {
                Formula::Dep { det, dep } => {
                    let (di, ei) = (cols_of(det), cols_of(dep));
                    let mut lits: BTreeMap<Tuple, BTreeMap<Tuple, Lit>> = BTreeMap::new();
                    for (u, row) in universe.iter().enumerate() {
                        let l = *lits
                            .entry(project(row, &di))
                            .or_default()
                            .entry(project(row, &ei))
                            .or_insert_with(|| solver.new_lit());
                        solver.add_clause(&[!r[u], l]);
                    }
                    for vals in lits.values() {
                        let ls: Vec<Lit> = vals.values().copied().collect();
                        for i in 0..ls.len() {
                            for j in i + 1..ls.len() {
                                solver.add_clause(&[!ls[i], !ls[j]]);
                            }
                        }
                    }
                }
                Formula::Inc { xs, ys } => {
                    let (xi, yi) = (cols_of(xs), cols_of(ys));
                    let mut providers: HashMap<Tuple, Vec<Lit>> = HashMap::new();
                    for (u, row) in universe.iter().enumerate() {
                        providers.entry(project(row, &yi)).or_default().push(r[u]);
                    }
                    let mut present: HashMap<Tuple, Lit> = HashMap::new();
                    for (u, row) in universe.iter().enumerate() {
                        let want = project(row, &xi);
                        let l = match present.get(&want) {
                            Some(l) => *l,
                            None => {
                                let l = solver.new_lit();
                                let mut clause = vec![!l];
                                clause.extend(providers.get(&want).into_iter().flatten().copied());
                                solver.add_clause(&clause);
                                present.insert(want, l);
                                l
                            }
                        };
                        solver.add_clause(&[!r[u], l]);
                    }
                }
                Formula::Ind { xs, zs, ys } => {
                    let (xi, zi, yi) = (cols_of(xs), cols_of(zs), cols_of(ys));
                    let mut rows_of: HashMap<(Tuple, Tuple, Tuple), Vec<Lit>> = HashMap::new();
                    let mut a: BTreeMap<Tuple, BTreeMap<Tuple, Lit>> = BTreeMap::new();
                    let mut b: BTreeMap<Tuple, BTreeMap<Tuple, Lit>> = BTreeMap::new();
                    for (u, row) in universe.iter().enumerate() {
                        let (x, y, z) = (project(row, &xi), project(row, &yi), project(row, &zi));
                        rows_of.entry((x.clone(), y.clone(), z.clone())).or_default().push(r[u]);
                        let la = *a.entry(z.clone()).or_default().entry(x).or_insert_with(|| solver.new_lit());
                        let lb = *b.entry(z).or_default().entry(y).or_insert_with(|| solver.new_lit());
                        solver.add_clause(&[!r[u], la]);
                        solver.add_clause(&[!r[u], lb]);
                    }
                    for (z, xa) in &a {
                        let Some(yb) = b.get(z) else { continue };
                        for (x, &la) in xa {
                            for (y, &lb) in yb {
                                let mut clause = vec![!la, !lb];
                                clause.extend(
                                    rows_of.get(&(x.clone(), y.clone(), z.clone())).into_iter().flatten().copied(),
                                );
                                solver.add_clause(&clause);
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        let sat = solver.solve().map_err(|e| EvalError::Budget(format!("solver failure: {e}")))?;
        Ok(Some(sat))
    }
}

/// Candidate rows with the index of the base row each extends.
type Candidates = (Vec<Tuple>, Vec<usize>);

/// Rows over `cols` extending `base` that pass every first-order conjunct and
/// every inclusion into base columns, found depth-first so each check runs
/// as soon as its columns are filled. `None` once more than `cap` rows survive.
fn candidate_rows(
    m: &Model,
    base: &Team,
    cols: &[Var],
    conj: &[&Formula],
    cap: usize,
) -> Result<Option<Candidates>, EvalError> {
    enum Check<'f> {
        Fo(&'f Formula),
        Within(Vec<usize>, HashSet<Tuple>),
    }
    let nb = base.vars().len();
    let col = |v: &Var| cols.iter().position(|w| w == v).expect("column");
    let mut checks: Vec<(Vec<usize>, Check)> = Vec::new();
    for c in conj {
        match c {
            Formula::Inc { xs, ys } if ys.iter().all(|v| col(v) < nb) => {
                let yi: Vec<usize> = ys.iter().map(col).collect();
                let allowed = base.rows().iter().map(|r| project(r, &yi)).collect();
                let xi: Vec<usize> = xs.iter().map(col).collect();
                checks.push((xi.clone(), Check::Within(xi, allowed)));
            }
            f if is_first_order(f) => checks.push((free_vars(f).iter().map(col).collect(), Check::Fo(f))),
            _ => {}
        }
    }
    let full = base.len().saturating_mul(m.size().saturating_pow((cols.len() - nb) as u32));
    if full > cap && !checks.iter().any(|(_, c)| matches!(c, Check::Within(..))) {
        return Ok(None);
    }
    let mut order: Vec<usize> = Vec::new();
    for (cs, _) in &checks {
        for &c in cs {
            if c >= nb && !order.contains(&c) {
                order.push(c);
            }
        }
    }
    let rest: Vec<usize> = (nb..cols.len()).filter(|c| !order.contains(c)).collect();
    order.extend(rest);
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); order.len() + 1];
    for (i, (cs, _)) in checks.iter().enumerate() {
        let depth = cs
            .iter()
            .filter(|&&c| c >= nb)
            .map(|c| order.iter().position(|o| o == c).expect("ordered") + 1)
            .max()
            .unwrap_or(0);
        due[depth].push(i);
    }
    let passes = |row: &[Elem], depth: usize| -> Result<bool, EvalError> {
        for &i in &due[depth] {
            let ok = match &checks[i].1 {
                Check::Fo(f) => tarski(m, f, &mut Scope::new(cols, row))?,
                Check::Within(xi, allowed) => allowed.contains(&project(row, xi)),
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let d = m.size() as u16;
    let mut universe = Vec::new();
    let mut owner = Vec::new();
    for (si, s) in base.rows().iter().enumerate() {
        let mut row = s.clone();
        row.resize(cols.len(), Elem(0));
        if !passes(&row, 0)? {
            continue;
        }
        let mut next = vec![0u16; order.len()];
        let mut depth = 0;
        loop {
            if depth == order.len() {
                if universe.len() == cap {
                    return Ok(None);
                }
                universe.push(row.clone());
                owner.push(si);
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            if next[depth] == d {
                next[depth] = 0;
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            row[order[depth]] = Elem(next[depth]);
            next[depth] += 1;
            if passes(&row, depth + 1)? {
                depth += 1;
            }
        }
    }
    Ok(Some((universe, owner)))
}

/// Pulls a prefix of existentials out of a conjunction when no capture can occur.
fn flatten_block<'f>(f: &'f Formula, bvars: &mut Vec<Var>, conj: &mut Vec<&'f Formula>) -> bool {
    match f {
        Formula::Exists(u, b) => {
            if bvars.contains(u) {
                return false;
            }
            bvars.push(u.clone());
            flatten_block(b, bvars, conj)
        }
        Formula::And(a, b) => {
            let start = bvars.len();
            if !flatten_block(a, bvars, conj) {
                return false;
            }
            let fb = free_vars(b);
            if bvars[start..].iter().any(|v| fb.contains(v)) {
                return false;
            }
            let mid = bvars.len();
            if !flatten_block(b, bvars, conj) {
                return false;
            }
            let fa = free_vars(a);
            !bvars[mid..].iter().any(|v| fa.contains(v))
        }
        Formula::Dep { .. } | Formula::Ind { .. } | Formula::Inc { .. } | Formula::Top | Formula::Bot => {
            conj.push(f);
            true
        }
        other if is_first_order(other) => {
            conj.push(f);
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::vars;
    use crate::parser::{parse_formula, parse_formula_with, ParseOptions};
    use crate::team::all_teams;

    fn e(i: u16) -> Elem {
        Elem(i)
    }

    fn team(vs: &[&str], rows: &[&[u16]]) -> Team {
        Team::from_rows(&vars(vs), rows.iter().map(|r| r.iter().map(|&i| e(i)).collect())).unwrap()
    }

    #[test]
    fn atom_clauses() {
        let m = Model::standard(2);
        let t = team(&["x", "y"], &[&[0, 0], &[0, 1]]);
        assert!(!eval(&m, &t, &parse_formula("=(x,y)").unwrap()).unwrap());
        let t = team(&["x", "y"], &[&[0, 1], &[1, 1]]);
        assert!(!eval(&m, &t, &parse_formula("inc(x ; y)").unwrap()).unwrap());
        let t = team(&["x", "y"], &[&[0, 0], &[1, 1]]);
        assert!(!eval(&m, &t, &parse_formula("ind(x ; ; y)").unwrap()).unwrap());
        assert!(eval(&m, &team(&["x", "y"], &[]), &parse_formula("bot").unwrap()).unwrap());
    }

    #[test]
    fn constants_and_flat_disjunction() {
        let m = Model::new(&["a", "b"]).with_constant("a", e(0)).unwrap().with_constant("b", e(1)).unwrap();
        let opts = ParseOptions { constants: ["a", "b"].iter().map(|s| s.to_string()).collect(), ..Default::default() };
        let f = parse_formula_with("x = a \\/ x = b", &opts, builtin_registry()).unwrap();
        assert!(eval(&m, &team(&["x"], &[&[0], &[1]]), &f).unwrap());
        let g = parse_formula_with("x = a || x = b", &opts, builtin_registry()).unwrap();
        assert!(!eval(&m, &team(&["x"], &[&[0], &[1]]), &g).unwrap());
    }

    #[test]
    fn free_variable_error() {
        let m = Model::standard(2);
        assert_eq!(
            eval(&m, &team(&["x"], &[&[0]]), &parse_formula("x = y").unwrap()),
            Err(EvalError::FreeVar(Var::new("y")))
        );
    }

    #[test]
    fn single_assignment_evaluation() {
        let m = Model::standard(2);
        let s: Assignment = [(Var::new("x"), e(1))].into_iter().collect();
        assert!(eval_single(&m, &s, &parse_formula("x = x").unwrap()).unwrap());
        assert!(!eval_single(&m, &s, &Formula::Bot).unwrap());
        assert!(eval_single(&m, &s, &parse_formula("E y. y != x").unwrap()).unwrap());
        assert!(eval_single(&m, &s, &parse_formula("=(x)").unwrap()).is_err());
    }

    #[test]
    fn quantifier_clauses() {
        let m = Model::standard(2);
        let unit = Team::unit();
        assert!(eval(&m, &unit, &parse_formula("E x. =(x)").unwrap()).unwrap());
        assert!(!eval(&m, &unit, &parse_formula("A x. =(x)").unwrap()).unwrap());
        assert!(eval(&m, &unit, &parse_formula("A x. E y. (=(x; y) /\\ x != y)").unwrap()).unwrap());
        assert!(!eval(&m, &unit, &parse_formula("A x. E y. (=(; y) /\\ x != y)").unwrap()).unwrap());
        assert!(eval(&m, &unit, &parse_formula("A1 x. =(x)").unwrap()).unwrap());
        assert!(eval(&m, &unit, &parse_formula("A x. E1 y. (x = y \\/ x != y)").unwrap()).unwrap());
        assert!(!eval(&m, &unit, &parse_formula("A x. E1 y. x = y").unwrap()).unwrap());
    }

    #[test]
    fn weak_negation_clause() {
        let m = Model::standard(2);
        let f = parse_formula("wneg =(x, y)").unwrap();
        assert!(eval(&m, &team(&["x", "y"], &[]), &f).unwrap());
        assert!(eval(&m, &team(&["x", "y"], &[&[0, 0], &[0, 1]]), &f).unwrap());
        assert!(!eval(&m, &team(&["x", "y"], &[&[0, 0]]), &f).unwrap());
    }

    #[test]
    fn block_solver_agrees_with_value_set_search() {
        let m = Model::standard(2);
        let formulas = [
            "E u. (inc(u; x) /\\ u != x)",
            "E u. E v. (inc(u v; x y) /\\ u = v)",
            "E u. (=(x; u) /\\ ind(u; ; y))",
            "E u. (ind(x; u; y) /\\ inc(y; u))",
            "E u. (=(; u) /\\ inc(x; u))",
            "E u. (inc(x; u) /\\ E v. (inc(v; u) /\\ v != x))",
        ];
        let reg = builtin_registry();
        let fast = Evaluator::new(&m, reg);
        let slow = Evaluator::new(&m, reg).without_block_solver();
        for text in formulas {
            let f = parse_formula(text).unwrap();
            for t in all_teams(&m, &vars(&["x", "y"]), 16).unwrap() {
                assert_eq!(fast.eval(&t, &f).unwrap(), slow.eval(&t, &f).unwrap(), "{text} on {t:?}");
            }
        }
    }

    #[test]
    fn split_budget_is_reported() {
        let m = Model::standard(2);
        let ev = Evaluator::new(&m, builtin_registry())
            .with_budget(EvalBudget { max_split_rows: 2, ..EvalBudget::default() });
        let t = team(&["x", "y"], &[&[0, 0], &[0, 1], &[1, 0]]);
        let f = parse_formula("=(x; y) \\/ =(y; x)").unwrap();
        assert!(matches!(ev.eval(&t, &f), Err(EvalError::Budget(_))));
    }
}
