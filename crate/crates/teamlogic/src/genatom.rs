//! Generalized Σ/Π atoms: definitions, direct evaluation, complements,
//! translations into inclusion/independence logic and the team constructions
//! behind them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::eso::EsoFormula;
use crate::formula::{fo_negate, free_vars, is_first_order, Formula, Term, Var};
use crate::model::{Elem, Model, Tuple};
use crate::parser::{parse_formula_with, ParseOptions};
use crate::semantics::{tarski, EvalError, Evaluator, Scope};
use crate::team::{SupplementFunction, Team};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Sigma,
    Pi,
}

impl Polarity {
    pub fn dual(self) -> Polarity {
        match self {
            Polarity::Sigma => Polarity::Pi,
            Polarity::Pi => Polarity::Sigma,
        }
    }

    /// Whether round `i` (1-based) quantifies existentially.
    pub fn existential_round(self, i: usize) -> bool {
        (i % 2 == 1) == (self == Polarity::Sigma)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedAtomDef {
    pub name: String,
    pub polarity: Polarity,
    pub n: usize,
    pub k: Vec<usize>,
    pub m: usize,
    pub phi: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenAtomError {
    #[error("atom {name} expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("invalid atom definition: {0}")]
    Invalid(String),
    #[error("argument {0} clashes with the reserved variable grid")]
    GridClash(Var),
    #[error("length mismatch: {0}")]
    Length(String),
    #[error("team must be nonempty")]
    EmptyTeam,
    #[error("variable {0} is already in the team domain")]
    NotFresh(Var),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// The reserved variable `w$i$j$l`.
pub fn grid_var(i: usize, j: usize, l: usize) -> Var {
    Var::new(format!("w${i}${j}${l}"))
}

impl GeneralizedAtomDef {
    pub fn new(name: &str, polarity: Polarity, k: Vec<usize>, m: usize, phi: Formula) -> Result<Self, GenAtomError> {
        let def = GeneralizedAtomDef { name: name.to_string(), polarity, n: k.len(), k, m, phi };
        def.validate()?;
        Ok(def)
    }

    pub fn validate(&self) -> Result<(), GenAtomError> {
        if self.n == 0 || self.k.len() != self.n || self.k.contains(&0) {
            return Err(GenAtomError::Invalid(format!("{}: k must list n positive entries", self.name)));
        }
        if !is_first_order(&self.phi) {
            return Err(GenAtomError::Invalid(format!("{}: defining formula is not first-order", self.name)));
        }
        let grid: BTreeSet<Var> = self.grid().into_iter().flatten().flatten().collect();
        if let Some(v) = free_vars(&self.phi).into_iter().find(|v| !grid.contains(v)) {
            return Err(GenAtomError::Invalid(format!("{}: {v} is outside the variable grid", self.name)));
        }
        Ok(())
    }

    /// `grid()[i][j]` is the vector `w_{i+1,j+1}`.
    pub fn grid(&self) -> Vec<Vec<Vec<Var>>> {
        (1..=self.n)
            .map(|i| (1..=self.k[i - 1]).map(|j| (1..=self.m).map(|l| grid_var(i, j, l)).collect()).collect())
            .collect()
    }

    pub fn relation_arity(&self) -> usize {
        self.k.iter().sum::<usize>() * self.m
    }
}

fn w(i: usize, j: usize, l: usize) -> Term {
    Term::Var(grid_var(i, j, l))
}

fn implication(ant: Vec<Formula>, cons: Formula) -> Formula {
    if ant.is_empty() {
        cons
    } else {
        Formula::or(fo_negate(&Formula::conj(ant)).expect("equalities"), cons)
    }
}

/// `=(x₁…x_k; y₁…y_l)` as a Π_{1,⟨2⟩} atom over `(x⃗, y⃗)`.
pub fn dep_def(k: usize, l: usize) -> GeneralizedAtomDef {
    let ant = (1..=k).map(|p| Formula::Eq(w(1, 1, p), w(1, 2, p))).collect();
    let cons = Formula::conj((k + 1..=k + l).map(|p| Formula::Eq(w(1, 1, p), w(1, 2, p))));
    let name = if l == 1 { format!("dep{k}") } else { format!("dep{k}_{l}") };
    GeneralizedAtomDef { name, polarity: Polarity::Pi, n: 1, k: vec![2], m: k + l, phi: implication(ant, cons) }
}

/// `x⃗ ⊥_z⃗ y⃗` as a Π_{2,⟨2,1⟩} atom over `(x⃗, y⃗, z⃗)` with lengths `k`, `m`, `n`.
pub fn ind_def(k: usize, m: usize, n: usize) -> GeneralizedAtomDef {
    let zs: Vec<usize> = (k + m + 1..=k + m + n).collect();
    let ant: Vec<Formula> = zs.iter().map(|&p| Formula::Eq(w(1, 1, p), w(1, 2, p))).collect();
    let cons = Formula::conj(
        (1..=k)
            .map(|p| Formula::Eq(w(2, 1, p), w(1, 1, p)))
            .chain((k + 1..=k + m).map(|p| Formula::Eq(w(2, 1, p), w(1, 2, p))))
            .chain(zs.iter().map(|&p| Formula::Eq(w(2, 1, p), w(1, 2, p)))),
    );
    GeneralizedAtomDef {
        name: format!("ind{k}{m}{n}"),
        polarity: Polarity::Pi,
        n: 2,
        k: vec![2, 1],
        m: k + m + n,
        phi: implication(ant, cons),
    }
}

/// `x⃗ ⊆ y⃗` as a Π_{2,⟨1,1⟩} atom over `(x⃗, y⃗)`.
pub fn inc_def(k: usize) -> GeneralizedAtomDef {
    let phi = Formula::conj((1..=k).map(|p| Formula::Eq(w(1, 1, p), w(2, 1, k + p))));
    GeneralizedAtomDef { name: format!("inc{k}"), polarity: Polarity::Pi, n: 2, k: vec![1, 1], m: 2 * k, phi }
}

/// A first-order formula over `vars` as a Π_{1,⟨1⟩} atom.
pub fn fo_def(name: &str, phi: &Formula, vars: &[Var]) -> Result<GeneralizedAtomDef, GenAtomError> {
    let sigma = vars.iter().enumerate().map(|(l, v)| (v.clone(), w(1, 1, l + 1))).collect();
    let phi = crate::formula::substitute(phi, &sigma).map_err(|e| GenAtomError::Invalid(e.to_string()))?;
    GeneralizedAtomDef::new(name, Polarity::Pi, vec![1], vars.len(), phi)
}

/// Definition and argument list behind a dependency atom.
pub fn atom_def(f: &Formula, registry: &AtomRegistry) -> Option<(GeneralizedAtomDef, Vec<Var>)> {
    match f {
        Formula::Dep { det, dep } => Some((dep_def(det.len(), dep.len()), det.iter().chain(dep).cloned().collect())),
        Formula::Ind { xs, zs, ys } => {
            Some((ind_def(xs.len(), ys.len(), zs.len()), xs.iter().chain(ys).chain(zs).cloned().collect()))
        }
        Formula::Inc { xs, ys } => Some((inc_def(xs.len()), xs.iter().chain(ys).cloned().collect())),
        Formula::Gen { name, args } => registry.get(name).map(|d| (d.clone(), args.clone())),
        _ => None,
    }
}

pub fn complement(def: &GeneralizedAtomDef) -> GeneralizedAtomDef {
    let name = match def.name.strip_prefix("not_") {
        Some(base) => base.to_string(),
        None => format!("not_{}", def.name),
    };
    GeneralizedAtomDef {
        name,
        polarity: def.polarity.dual(),
        n: def.n,
        k: def.k.clone(),
        m: def.m,
        phi: fo_negate(&def.phi).expect("defining formulas are first-order"),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomRegistry {
    defs: BTreeMap<String, GeneralizedAtomDef>,
}

impl AtomRegistry {
    pub fn new() -> AtomRegistry {
        AtomRegistry::default()
    }

    pub fn insert(&mut self, def: GeneralizedAtomDef) -> Result<(), GenAtomError> {
        def.validate()?;
        self.defs.insert(def.name.clone(), def);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&GeneralizedAtomDef> {
        self.defs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GeneralizedAtomDef> {
        self.defs.values()
    }
}

/// Small instances of the dependence, independence and inclusion atoms.
pub fn register_builtin_atoms() -> AtomRegistry {
    let mut reg = AtomRegistry::new();
    for k in 0..=3 {
        reg.insert(dep_def(k, 1)).expect("valid");
    }
    for k in 1..=2 {
        for m in 1..=2 {
            for n in 0..=2 {
                reg.insert(ind_def(k, m, n)).expect("valid");
            }
        }
    }
    for k in 1..=3 {
        reg.insert(inc_def(k)).expect("valid");
    }
    reg
}

pub fn builtin_registry() -> &'static AtomRegistry {
    static REG: OnceLock<AtomRegistry> = OnceLock::new();
    REG.get_or_init(register_builtin_atoms)
}

/// Parses `genatom NAME POLARITY n=N k=[k1,…] m=M` headers each followed by a `phi:` line.
pub fn parse_atom_defs(text: &str) -> Result<Vec<GeneralizedAtomDef>, GenAtomError> {
    let mut out = Vec::new();
    let mut header: Option<(usize, String, Polarity, usize, Vec<usize>, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let lineno = idx + 1;
        let syntax = |message: String| GenAtomError::Syntax { line: lineno, message };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("genatom") {
            if header.is_some() {
                return Err(syntax("header without phi line".into()));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.len() != 5 {
                return Err(syntax("expected 'genatom NAME POLARITY n=N k=[..] m=M'".into()));
            }
            let polarity = match words[1].to_ascii_lowercase().as_str() {
                "sigma" => Polarity::Sigma,
                "pi" => Polarity::Pi,
                other => return Err(syntax(format!("unknown polarity {other}"))),
            };
            let field = |w: &str, key: &str| -> Result<String, GenAtomError> {
                w.strip_prefix(key).map(str::to_string).ok_or_else(|| syntax(format!("expected {key}")))
            };
            let n: usize = field(words[2], "n=")?.parse().map_err(|_| syntax("bad n".into()))?;
            let klist = field(words[3], "k=")?;
            let klist = klist.trim_start_matches('[').trim_end_matches(']');
            let k = klist
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| syntax("bad k list".into()))?;
            let m: usize = field(words[4], "m=")?.parse().map_err(|_| syntax("bad m".into()))?;
            if k.len() != n {
                return Err(syntax(format!("k lists {} entries but n={n}", k.len())));
            }
            header = Some((lineno, words[0].to_string(), polarity, n, k, m));
        } else if let Some(body) = line.strip_prefix("phi:") {
            let (_, name, polarity, _, k, m) = header.take().ok_or_else(|| syntax("phi line without header".into()))?;
            let phi = parse_formula_with(body, &ParseOptions::reserved(), builtin_registry())
                .map_err(|e| syntax(e.to_string()))?;
            out.push(GeneralizedAtomDef::new(&name, polarity, k, m, phi)?);
        } else {
            return Err(syntax("expected a genatom header or phi line".into()));
        }
    }
    if let Some((line, ..)) = header {
        return Err(GenAtomError::Syntax { line, message: "header without phi line".into() });
    }
    Ok(out)
}

/// Evaluates the n-round alternation over rows of the team directly.
pub fn eval_direct(m: &Model, team: &Team, def: &GeneralizedAtomDef, args: &[Var]) -> Result<bool, EvalError> {
    if args.len() != def.m {
        return Err(EvalError::Arity { sym: def.name.clone(), expected: def.m, got: args.len() });
    }
    if team.is_empty() {
        return Ok(true);
    }
    let tuples: Vec<Tuple> = team
        .rel(args)
        .map_err(|e| match e {
            crate::team::TeamError::UnknownVar(v) => EvalError::FreeVar(v),
            other => EvalError::Budget(other.to_string()),
        })?
        .into_iter()
        .collect();
    let grid: Vec<Var> = def.grid().into_iter().flatten().flatten().collect();
    let mut vals: Vec<Elem> = Vec::with_capacity(grid.len());
    round(m, def, &tuples, &grid, 1, &mut vals)
}

fn round(
    m: &Model,
    def: &GeneralizedAtomDef,
    tuples: &[Tuple],
    grid: &[Var],
    i: usize,
    vals: &mut Vec<Elem>,
) -> Result<bool, EvalError> {
    if i > def.n {
        return tarski(m, &def.phi, &mut Scope::new(grid, vals));
    }
    let want = def.polarity.existential_round(i);
    let k = def.k[i - 1];
    let mut pick = vec![0usize; k];
    loop {
        let mark = vals.len();
        for &p in &pick {
            vals.extend_from_slice(&tuples[p]);
        }
        let r = round(m, def, tuples, grid, i + 1, vals);
        vals.truncate(mark);
        if r? == want {
            return Ok(want);
        }
        let mut j = 0;
        loop {
            if j == k {
                return Ok(!want);
            }
            pick[j] += 1;
            if pick[j] < tuples.len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

fn check_lengths(group: &[Vec<Var>], x: &[Var]) -> Result<(), GenAtomError> {
    for v in group {
        if v.len() != x.len() {
            return Err(GenAtomError::Length(format!("vector of length {} against {} variables", v.len(), x.len())));
        }
    }
    Ok(())
}

/// `⋀ⱼ (w_{i,j} ⊆ x⃗)`.
pub fn build_inc(group: &[Vec<Var>], x: &[Var]) -> Result<Formula, GenAtomError> {
    check_lengths(group, x)?;
    Ok(Formula::conj(group.iter().map(|wj| Formula::inc(wj.clone(), x.to_vec()))))
}

/// `(⋀ⱼ x⃗ ⊆ w_{i,j}) ∧ (⋀ⱼ ⟨w_{i,j'} | j' ≠ j⟩ ⊥ w_{i,j}) ∧ (prefix ⊥ w_{i,1}…w_{i,kᵢ})`,
/// with `⟨⟩ ⊥ y⃗` written as `Top`.
pub fn build_pro(prefix: &[Var], x: &[Var], group: &[Vec<Var>]) -> Result<Formula, GenAtomError> {
    check_lengths(group, x)?;
    let covers = Formula::conj(group.iter().map(|wj| Formula::inc(x.to_vec(), wj.clone())));
    let spread = Formula::conj((0..group.len()).map(|j| {
        let others: Vec<Var> = group.iter().enumerate().filter(|(i, _)| *i != j).flat_map(|(_, v)| v.clone()).collect();
        if others.is_empty() {
            Formula::Top
        } else {
            Formula::ind(others, vec![], group[j].clone())
        }
    }));
    let fresh = if prefix.is_empty() {
        Formula::Top
    } else {
        Formula::ind(prefix.to_vec(), vec![], group.iter().flatten().cloned().collect())
    };
    Ok(Formula::and(Formula::and(covers, spread), fresh))
}

/// The σₙ (Σ atoms) or πₙ (Π atoms) formula defining the atom applied to `x`.
pub fn sigma_pi_translate(def: &GeneralizedAtomDef, x: &[Var]) -> Result<Formula, GenAtomError> {
    if x.len() != def.m {
        return Err(GenAtomError::Arity { name: def.name.clone(), expected: def.m, got: x.len() });
    }
    let grid = def.grid();
    let reserved: BTreeSet<&Var> = grid.iter().flatten().flatten().collect();
    if let Some(v) = x.iter().find(|v| reserved.contains(v)) {
        return Err(GenAtomError::GridClash(v.clone()));
    }
    let mut f = def.phi.clone();
    for i in (1..=def.n).rev() {
        let group = &grid[i - 1];
        let guard = if def.polarity.existential_round(i) {
            build_inc(group, x)?
        } else {
            let prefix: Vec<Var> = grid[..i - 1].iter().flatten().flatten().cloned().collect();
            build_pro(&prefix, x, group)?
        };
        let block: Vec<Var> = group.iter().flatten().cloned().collect();
        f = Formula::exists_block(&block, Formula::and(guard, f));
    }
    Ok(f)
}

/// The first-order sentence expressing the atom in terms of a membership test.
pub(crate) fn atom_sentence(def: &GeneralizedAtomDef, member: &dyn Fn(&[Var]) -> Formula) -> Formula {
    let grid = def.grid();
    let mut f = def.phi.clone();
    for i in (1..=def.n).rev() {
        let group = &grid[i - 1];
        let guards = Formula::conj(group.iter().map(|v| member(v)));
        let block: Vec<Var> = group.iter().flatten().cloned().collect();
        f = if def.polarity.existential_round(i) {
            Formula::exists_block(&block, Formula::and(guards, f))
        } else {
            Formula::forall_block(&block, Formula::or(fo_negate(&guards).expect("first-order guard"), f))
        };
    }
    if def.polarity == Polarity::Sigma {
        let first = &grid[0][0];
        let none = Formula::forall_block(first, fo_negate(&member(first)).expect("first-order guard"));
        f = Formula::or(f, none);
    }
    f
}

/// The atom as a sentence about a relation `S` standing for `rel(X, x⃗)`.
pub fn eso_translate_atom(def: &GeneralizedAtomDef, x: &[Var]) -> Result<EsoFormula, GenAtomError> {
    if x.len() != def.m {
        return Err(GenAtomError::Arity { name: def.name.clone(), expected: def.m, got: x.len() });
    }
    let member = |v: &[Var]| Formula::rel("S", v.iter().cloned().map(Term::Var).collect());
    Ok(EsoFormula { so_vars: vec![], matrix: atom_sentence(def, &member) })
}

fn fresh_vectors(team: &Team, x: &[Var], w: &[Vec<Var>]) -> Result<(), GenAtomError> {
    if team.is_empty() {
        return Err(GenAtomError::EmptyTeam);
    }
    check_lengths(w, x)?;
    let mut seen = BTreeSet::new();
    for v in w.iter().flatten() {
        if team.index_of(v).is_some() || !seen.insert(v.clone()) {
            return Err(GenAtomError::NotFresh(v.clone()));
        }
    }
    team.indices(x).map_err(|_| GenAtomError::Length("x⃗ must lie in the team domain".into()))?;
    Ok(())
}

/// Supplements each `w_i` rowwise with the `x⃗`-values of the row chosen by `gammas[i]`.
/// `gammas[i][r]` is the index (in row order) of the row of `team` picked for row `r`.
pub fn simulating_team(
    m: &Model,
    team: &Team,
    gammas: &[Vec<usize>],
    x: &[Var],
    w: &[Vec<Var>],
) -> Result<Team, GenAtomError> {
    fresh_vectors(team, x, w)?;
    if gammas.len() != w.len() {
        return Err(GenAtomError::Length(format!("{} choice functions for {} vectors", gammas.len(), w.len())));
    }
    let rows: Vec<&Tuple> = team.rows().iter().collect();
    for g in gammas {
        if g.len() != rows.len() || g.iter().any(|&r| r >= rows.len()) {
            return Err(GenAtomError::Length("choice table must map every row to a row".into()));
        }
    }
    let xi = team.indices(x).expect("checked");
    let index: BTreeMap<&Tuple, usize> = rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let chosen = |g: &[usize], r: usize| -> Tuple { xi.iter().map(|&c| rows[g[r]][c]).collect() };
    let mut y = team.clone();
    for (g, wv) in gammas.iter().zip(w) {
        for (l, wl) in wv.iter().enumerate() {
            let base = y.indices(team.vars()).expect("columns persist");
            let f: SupplementFunction = y
                .rows()
                .iter()
                .map(|t| {
                    let src: Tuple = base.iter().map(|&c| t[c]).collect();
                    let r = index[&src];
                    (t.clone(), [chosen(g, r)[l]].into_iter().collect())
                })
                .collect();
            y = y.supplement(&f, wl).map_err(|e| GenAtomError::Postcondition(e.to_string()))?;
        }
    }
    let base = y.indices(team.vars()).expect("columns persist");
    for t in y.rows() {
        let src: Tuple = base.iter().map(|&c| t[c]).collect();
        let r = index[&src];
        for (g, wv) in gammas.iter().zip(w) {
            let got: Tuple = y.indices(wv).expect("added").iter().map(|&c| t[c]).collect();
            if got != chosen(g, r) {
                return Err(GenAtomError::Postcondition("w-values differ from the chosen row".into()));
            }
        }
    }
    let inc = build_inc(w, x)?;
    if !Evaluator::new(m, builtin_registry()).eval(&y, &inc)? {
        return Err(GenAtomError::Postcondition("inclusion guard fails".into()));
    }
    Ok(y)
}

/// Supplements each `w_i` variable by variable with every `x⃗`-pattern of the team
/// that is consistent with the values already chosen.
pub fn duplicating_team(m: &Model, team: &Team, x: &[Var], w: &[Vec<Var>]) -> Result<Team, GenAtomError> {
    fresh_vectors(team, x, w)?;
    let patterns = team.rel(x).expect("checked");
    let mut y = team.clone();
    for wv in w {
        for (l, wl) in wv.iter().enumerate() {
            let prev = y.indices(&wv[..l]).expect("added");
            let f: SupplementFunction = y
                .rows()
                .iter()
                .map(|t| {
                    let sofar: Vec<Elem> = prev.iter().map(|&c| t[c]).collect();
                    let vals: BTreeSet<Elem> = patterns.iter().filter(|p| p[..l] == sofar[..]).map(|p| p[l]).collect();
                    (t.clone(), vals)
                })
                .collect();
            y = y.supplement(&f, wl).map_err(|e| GenAtomError::Postcondition(e.to_string()))?;
        }
    }
    for t in y.rows() {
        for wv in w {
            let got: Tuple = y.indices(wv).expect("added").iter().map(|&c| t[c]).collect();
            if !patterns.contains(&got) {
                return Err(GenAtomError::Postcondition("w-values are not an x-pattern of the team".into()));
            }
        }
    }
    let rest: Vec<Var> = team.vars().iter().filter(|v| !x.contains(v)).cloned().collect();
    let pro = build_pro(&rest, x, w)?;
    if !Evaluator::new(m, builtin_registry()).eval(&y, &pro)? {
        return Err(GenAtomError::Postcondition("projection guard fails".into()));
    }
    Ok(y)
}

pub fn symbol(s: &str) -> Arc<str> {
    Arc::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::vars;
    use crate::parser::{parse_formula, print_formula};
    use crate::semantics::eval;
    use crate::team::all_teams;

    #[test]
    fn builtin_arities() {
        let reg = register_builtin_atoms();
        assert_eq!(reg.get("dep1").unwrap().relation_arity(), 4);
        assert_eq!(reg.get("inc2").unwrap().relation_arity(), 8);
        assert_eq!(reg.get("ind111").unwrap().relation_arity(), 9);
    }

    #[test]
    fn dep_formula_shape() {
        let d = dep_def(1, 1);
        assert_eq!(print_formula(&d.phi), "w$1$1$1 != w$1$2$1 \\/ w$1$1$2 = w$1$2$2");
        let c = complement(&d);
        assert_eq!(c.polarity, Polarity::Sigma);
        assert_eq!(print_formula(&c.phi), "w$1$1$1 = w$1$2$1 /\\ w$1$1$2 != w$1$2$2");
        assert_eq!(complement(&c), d);
    }

    #[test]
    fn direct_evaluation_matches_native_atoms() {
        let m = Model::standard(2);
        let xy = vars(&["x", "y"]);
        for t in all_teams(&m, &xy, 16).unwrap() {
            let dep = Formula::dep(vars(&["x"]), vars(&["y"]));
            assert_eq!(eval_direct(&m, &t, &dep_def(1, 1), &xy).unwrap(), eval(&m, &t, &dep).unwrap());
            let inc = Formula::inc(vars(&["x"]), vars(&["y"]));
            assert_eq!(eval_direct(&m, &t, &inc_def(1), &xy).unwrap(), eval(&m, &t, &inc).unwrap());
            let ind = Formula::ind(vars(&["x"]), vec![], vars(&["y"]));
            assert_eq!(eval_direct(&m, &t, &ind_def(1, 1, 0), &xy).unwrap(), eval(&m, &t, &ind).unwrap());
        }
        let xyz = vars(&["x", "y", "z"]);
        let cond = Formula::ind(vars(&["x"]), vars(&["z"]), vars(&["y"]));
        for t in all_teams(&m, &xyz, 8).unwrap() {
            assert_eq!(eval_direct(&m, &t, &ind_def(1, 1, 1), &xyz).unwrap(), eval(&m, &t, &cond).unwrap(), "{t:?}");
        }
        assert!(eval_direct(&m, &Team::empty(xy.clone()), &complement(&dep_def(1, 1)), &xy).unwrap());
        assert!(eval_direct(&m, &Team::empty(xy.clone()), &dep_def(1, 1), &vars(&["x"])).is_err());
    }

    #[test]
    fn builders() {
        let x = vars(&["x"]);
        let g1 = vec![vars(&["a"])];
        let g2 = vec![vars(&["a"]), vars(&["b"])];
        assert_eq!(build_inc(&g1, &x).unwrap(), Formula::inc(vars(&["a"]), x.clone()));
        assert_eq!(print_formula(&build_inc(&g2, &x).unwrap()), "inc(a; x) /\\ inc(b; x)");
        assert_eq!(print_formula(&build_pro(&[], &x, &g1).unwrap()), "inc(x; a) /\\ top /\\ top");
        assert_eq!(
            print_formula(&build_pro(&vars(&["p"]), &x, &g2).unwrap()),
            "inc(x; a) /\\ inc(x; b) /\\ (ind(b; ; a) /\\ ind(a; ; b)) /\\ ind(p; ; a, b)"
        );
        assert!(build_inc(&[vars(&["a", "b"])], &x).is_err());
    }

    #[test]
    fn translation_shapes() {
        let d = dep_def(1, 1);
        let f = sigma_pi_translate(&d, &vars(&["x", "y"])).unwrap();
        assert_eq!(
            print_formula(&f),
            "E w$1$1$1. E w$1$1$2. E w$1$2$1. E w$1$2$2. (inc(x, y; w$1$1$1, w$1$1$2) /\\ inc(x, y; w$1$2$1, w$1$2$2) \
             /\\ (ind(w$1$2$1, w$1$2$2; ; w$1$1$1, w$1$1$2) /\\ ind(w$1$1$1, w$1$1$2; ; w$1$2$1, w$1$2$2)) /\\ top \
             /\\ (w$1$1$1 != w$1$2$1 \\/ w$1$1$2 = w$1$2$2))"
        );
        let back = crate::parser::parse_formula_with(&print_formula(&f), &ParseOptions::reserved(), builtin_registry())
            .unwrap();
        assert_eq!(back, f);
        let i = sigma_pi_translate(&inc_def(1), &vars(&["x", "y"])).unwrap();
        let Formula::Exists(_, body) = &i else { panic!() };
        assert!(print_formula(body).contains("E w$2$1$1."));
        assert!(matches!(sigma_pi_translate(&d, &[grid_var(1, 1, 1), Var::new("y")]), Err(GenAtomError::GridClash(_))));
    }

    #[test]
    fn translation_agrees_on_small_teams() {
        let m = Model::standard(2);
        let xy = vars(&["x", "y"]);
        for def in [dep_def(1, 1), inc_def(1), ind_def(1, 1, 0), complement(&dep_def(1, 1))] {
            let f = sigma_pi_translate(&def, &xy).unwrap();
            for t in all_teams(&m, &xy, 16).unwrap() {
                assert_eq!(eval(&m, &t, &f).unwrap(), eval_direct(&m, &t, &def, &xy).unwrap(), "{} {t:?}", def.name);
            }
        }
    }

    #[test]
    fn atom_files() {
        let text = "# constancy\ngenatom const1 Pi n=1 k=[2] m=1\nphi: w$1$1$1 = w$1$2$1\n";
        let defs = parse_atom_defs(text).unwrap();
        assert_eq!(defs[0], dep_def(0, 1).clone_named("const1"));
        assert!(parse_atom_defs("genatom bad Pi n=2 k=[1] m=1\nphi: top\n").is_err());
        assert!(parse_atom_defs("genatom bad Pi n=1 k=[1] m=1\nphi: w$2$1$1 = w$1$1$1\n").is_err());
    }

    impl GeneralizedAtomDef {
        fn clone_named(&self, name: &str) -> GeneralizedAtomDef {
            GeneralizedAtomDef { name: name.to_string(), ..self.clone() }
        }
    }

    #[test]
    fn simulating_and_duplicating_sizes() {
        let m = Model::standard(2);
        let t = Team::from_rows(&vars(&["x", "y"]), [vec![Elem(0), Elem(0)], vec![Elem(1), Elem(0)]]).unwrap();
        let x = vars(&["x"]);
        let y = duplicating_team(&m, &t, &x, &[vars(&["a"])]).unwrap();
        assert_eq!(y.len(), 4);
        let y2 = duplicating_team(&m, &t, &x, &[vars(&["a"]), vars(&["b"])]).unwrap();
        assert_eq!(y2.len(), 8);
        let konst = simulating_team(&m, &t, &[vec![1, 1]], &x, &[vars(&["a"])]).unwrap();
        assert_eq!(konst.rel(&vars(&["a"])).unwrap().len(), 1);
        let ident = simulating_team(&m, &t, &[vec![0, 1]], &x, &[vars(&["a"])]).unwrap();
        assert!(eval(&m, &ident, &parse_formula("a = x").unwrap()).unwrap());
        assert!(matches!(
            duplicating_team(&m, &Team::empty(x.clone()), &x, &[vars(&["a"])]),
            Err(GenAtomError::EmptyTeam)
        ));
        assert!(matches!(duplicating_team(&m, &t, &x, &[vars(&["y"])]), Err(GenAtomError::NotFresh(_))));
    }
}
