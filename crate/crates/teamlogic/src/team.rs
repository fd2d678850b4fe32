//! Teams and the team algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::Var;
use crate::model::{Elem, Model, Tuple};

pub type Assignment = BTreeMap<Var, Elem>;

/// A set of rows over a sorted variable domain; `rows` hold values in `vars` order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Team {
    vars: Vec<Var>,
    rows: BTreeSet<Tuple>,
}

/// Per-row value sets, keyed by the row's values in the source team's variable order.
pub type SupplementFunction = BTreeMap<Tuple, BTreeSet<Elem>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TeamError {
    #[error("variable {0} is not in the team domain")]
    UnknownVar(Var),
    #[error("supplement function is undefined on a row")]
    MissingRow,
    #[error("supplement function has an empty value set")]
    EmptyValueSet,
    #[error("tuple length {got} does not match {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate variable {0}")]
    DuplicateVar(Var),
    #[error("{assignments} assignments exceed the exhaustive cap of {cap}; sample teams instead")]
    OverCap { assignments: usize, cap: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub const DEFAULT_TEAM_CAP: usize = 16;

impl Team {
    pub fn empty(vars: impl IntoIterator<Item = Var>) -> Team {
        let mut vars: Vec<Var> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        Team { vars, rows: BTreeSet::new() }
    }

    /// The team `{∅}` over the empty domain.
    pub fn unit() -> Team {
        Team { vars: Vec::new(), rows: [Vec::new()].into_iter().collect() }
    }

    /// Builds a team from rows given in the order of `vars`.
    pub fn from_rows(vars: &[Var], rows: impl IntoIterator<Item = Tuple>) -> Result<Team, TeamError> {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        for w in order.windows(2) {
            if vars[w[0]] == vars[w[1]] {
                return Err(TeamError::DuplicateVar(vars[w[0]].clone()));
            }
        }
        let sorted: Vec<Var> = order.iter().map(|&i| vars[i].clone()).collect();
        let mut out = BTreeSet::new();
        for r in rows {
            if r.len() != vars.len() {
                return Err(TeamError::LengthMismatch { expected: vars.len(), got: r.len() });
            }
            out.insert(order.iter().map(|&i| r[i]).collect());
        }
        Ok(Team { vars: sorted, rows: out })
    }

    pub fn from_assignments(vars: &[Var], rows: impl IntoIterator<Item = Assignment>) -> Result<Team, TeamError> {
        let mut t = Team::empty(vars.iter().cloned());
        for a in rows {
            let row = t
                .vars
                .iter()
                .map(|v| a.get(v).copied().ok_or_else(|| TeamError::UnknownVar(v.clone())))
                .collect::<Result<Tuple, _>>()?;
            if a.len() != t.vars.len() {
                return Err(TeamError::LengthMismatch { expected: t.vars.len(), got: a.len() });
            }
            t.rows.insert(row);
        }
        Ok(t)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &BTreeSet<Tuple> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.vars.binary_search(v).ok()
    }

    pub fn indices(&self, vs: &[Var]) -> Result<Vec<usize>, TeamError> {
        vs.iter().map(|v| self.index_of(v).ok_or_else(|| TeamError::UnknownVar(v.clone()))).collect()
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(|r| self.vars.iter().cloned().zip(r.iter().copied()).collect())
    }

    /// Same domain, the given subset of rows.
    pub fn with_rows(&self, rows: BTreeSet<Tuple>) -> Team {
        Team { vars: self.vars.clone(), rows }
    }

    pub fn insert_row(&mut self, row: Tuple) -> Result<(), TeamError> {
        if row.len() != self.vars.len() {
            return Err(TeamError::LengthMismatch { expected: self.vars.len(), got: row.len() });
        }
        self.rows.insert(row);
        Ok(())
    }

    /// Positions of `x` in the extended domain and whether it is new.
    fn extended(&self, x: &Var) -> (Vec<Var>, usize, bool) {
        match self.vars.binary_search(x) {
            Ok(i) => (self.vars.clone(), i, false),
            Err(i) => {
                let mut vs = self.vars.clone();
                vs.insert(i, x.clone());
                (vs, i, true)
            }
        }
    }

    fn put(row: &[Elem], pos: usize, fresh: bool, a: Elem) -> Tuple {
        let mut r = row.to_vec();
        if fresh {
            r.insert(pos, a);
        } else {
            r[pos] = a;
        }
        r
    }

    /// `X(N/x)` for `N ⊆ M` given as a list of elements.
    pub fn duplicate_over(&self, values: &[Elem], x: &Var) -> Team {
        let (vars, pos, fresh) = self.extended(x);
        let mut rows = BTreeSet::new();
        for r in &self.rows {
            for &a in values {
                rows.insert(Team::put(r, pos, fresh, a));
            }
        }
        Team { vars, rows }
    }

    pub fn duplicate(&self, m: &Model, x: &Var) -> Team {
        let all: Vec<Elem> = m.elements().collect();
        self.duplicate_over(&all, x)
    }

    pub fn supplement(&self, f: &SupplementFunction, x: &Var) -> Result<Team, TeamError> {
        let (vars, pos, fresh) = self.extended(x);
        let mut rows = BTreeSet::new();
        for r in &self.rows {
            let values = f.get(r).ok_or(TeamError::MissingRow)?;
            if values.is_empty() {
                return Err(TeamError::EmptyValueSet);
            }
            for &a in values {
                rows.insert(Team::put(r, pos, fresh, a));
            }
        }
        Ok(Team { vars, rows })
    }

    pub fn rel(&self, xs: &[Var]) -> Result<BTreeSet<Tuple>, TeamError> {
        let idx = self.indices(xs)?;
        Ok(self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect())
    }

    pub fn restrict(&self, keep: &BTreeSet<Var>) -> Result<Team, TeamError> {
        for v in keep {
            if self.index_of(v).is_none() {
                return Err(TeamError::UnknownVar(v.clone()));
            }
        }
        let idx: Vec<usize> = (0..self.vars.len()).filter(|&i| keep.contains(&self.vars[i])).collect();
        Ok(Team {
            vars: idx.iter().map(|&i| self.vars[i].clone()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect(),
        })
    }
}

/// `X_R`: one row per tuple, columns named by `xs`.
pub fn team_of_relation(r: &BTreeSet<Tuple>, xs: &[Var]) -> Result<Team, TeamError> {
    Team::from_rows(xs, r.iter().cloned())
}

fn all_rows(m: &Model, n: usize) -> Vec<Tuple> {
    let d = m.size();
    let total = d.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut row = vec![Elem(0); n];
            for slot in row.iter_mut().rev() {
                *slot = Elem((code % d) as u16);
                code /= d;
            }
            row
        })
        .collect()
}

/// Every team over `vars`, ordered by the bitmask of included assignments.
pub fn all_teams(m: &Model, vars: &[Var], cap: usize) -> Result<impl Iterator<Item = Team>, TeamError> {
    let base = Team::empty(vars.iter().cloned());
    if base.vars.len() != vars.len() {
        return Err(TeamError::DuplicateVar(vars[0].clone()));
    }
    let n = base.vars.len();
    let assignments = m.size().checked_pow(n as u32).unwrap_or(usize::MAX);
    if assignments > cap || assignments >= 64 {
        return Err(TeamError::OverCap { assignments, cap });
    }
    let rows = all_rows(m, n);
    Ok((0u64..1u64 << assignments).map(move |mask| {
        base.with_rows(rows.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| r.clone()).collect())
    }))
}

/// Seeded random teams; each assignment is included with probability 1/2.
pub fn sample_teams(m: &Model, vars: &[Var], count: usize, seed: u64) -> impl Iterator<Item = Team> {
    let base = Team::empty(vars.iter().cloned());
    let rows = all_rows(m, base.vars.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| base.with_rows(rows.iter().filter(|_| rng.gen::<bool>()).cloned().collect()))
}

/// Seeded random teams with between 1 and `max_rows` rows.
pub fn sample_small_teams(
    m: &Model,
    vars: &[Var],
    max_rows: usize,
    count: usize,
    seed: u64,
) -> impl Iterator<Item = Team> {
    let base = Team::empty(vars.iter().cloned());
    let rows = all_rows(m, base.vars.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| {
        let k = rng.gen_range(1..=max_rows.max(1));
        base.with_rows((0..k).map(|_| rows[rng.gen_range(0..rows.len())].clone()).collect())
    })
}

pub fn parse_team(text: &str, m: &Model) -> Result<Team, TeamError> {
    let mut vars: Option<Vec<Var>> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some((&head, rest)) = words.split_first() else { continue };
        let syntax = |message: String| TeamError::Syntax { line: idx + 1, message };
        match head {
            "vars" => {
                if vars.is_some() {
                    return Err(syntax("second vars line".into()));
                }
                vars = Some(rest.iter().map(Var::new).collect());
            }
            "row" => {
                let vs = vars.as_ref().ok_or_else(|| syntax("row before vars line".into()))?;
                if rest.len() != vs.len() {
                    return Err(TeamError::LengthMismatch { expected: vs.len(), got: rest.len() });
                }
                let row = rest
                    .iter()
                    .map(|w| m.elem(w).ok_or_else(|| syntax(format!("element {w} is not in the domain"))))
                    .collect::<Result<Tuple, _>>()?;
                rows.push(row);
            }
            other => return Err(syntax(format!("unknown directive {other}"))),
        }
    }
    let vars = vars.ok_or(TeamError::Syntax { line: 0, message: "missing vars line".into() })?;
    Team::from_rows(&vars, rows)
}

pub fn print_team(t: &Team, m: &Model) -> String {
    let mut out = String::from("vars");
    for v in &t.vars {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    for r in &t.rows {
        out.push_str("row");
        for e in r {
            let _ = write!(out, " {}", m.name(*e));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::vars;

    fn e(i: u16) -> Elem {
        Elem(i)
    }

    #[test]
    fn duplicate_cases() {
        let m = Model::standard(2);
        let x = Var::new("x");
        let d = Team::unit().duplicate(&m, &x);
        assert_eq!(d.len(), 2);
        assert_eq!(d.vars(), std::slice::from_ref(&x));
        assert!(Team::empty(vars(&["y"])).duplicate(&m, &x).is_empty());
        let t = Team::from_rows(&vars(&["y"]), [vec![e(0)], vec![e(1)]]).unwrap();
        assert_eq!(t.duplicate(&m, &x).len(), 4);
        assert_eq!(t.duplicate(&m, &x).restrict(&vars(&["y"]).into_iter().collect()).unwrap(), t);
    }

    #[test]
    fn supplement_cases() {
        let m = Model::standard(2);
        let x = Var::new("x");
        let t = Team::from_rows(&vars(&["y", "z"]), [vec![e(0), e(0)], vec![e(0), e(1)], vec![e(1), e(1)]]).unwrap();
        let konst: SupplementFunction = t.rows().iter().map(|r| (r.clone(), [e(0)].into_iter().collect())).collect();
        let s = t.supplement(&konst, &x).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.rel(std::slice::from_ref(&x)).unwrap().len() == 1);
        let full: SupplementFunction = t.rows().iter().map(|r| (r.clone(), m.elements().collect())).collect();
        assert_eq!(t.supplement(&full, &x).unwrap(), t.duplicate(&m, &x));
        let mut bad = konst.clone();
        bad.insert(vec![e(0), e(0)], BTreeSet::new());
        assert_eq!(t.supplement(&bad, &x), Err(TeamError::EmptyValueSet));
        let mut missing = konst;
        missing.remove(&vec![e(1), e(1)]);
        assert_eq!(t.supplement(&missing, &x), Err(TeamError::MissingRow));
    }

    #[test]
    fn supplement_overwrites_existing_column() {
        let t = Team::from_rows(&vars(&["x"]), [vec![e(0)], vec![e(1)]]).unwrap();
        let f: SupplementFunction = t.rows().iter().map(|r| (r.clone(), [e(1)].into_iter().collect())).collect();
        let s = t.supplement(&f, &Var::new("x")).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn relation_round_trip() {
        let m = Model::standard(2);
        let xs = vars(&["b", "a"]);
        let all: Vec<Tuple> = all_rows(&m, 2);
        for mask in 0u32..16 {
            let r: BTreeSet<Tuple> =
                all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
            let t = team_of_relation(&r, &xs).unwrap();
            assert_eq!(t.len(), r.len());
            assert_eq!(t.rel(&xs).unwrap(), r);
        }
        assert!(team_of_relation(&[vec![e(0)]].into_iter().collect(), &xs).is_err());
    }

    #[test]
    fn restrict_collapses() {
        let t = Team::from_rows(&vars(&["x", "y"]), [vec![e(0), e(0)], vec![e(0), e(1)]]).unwrap();
        assert_eq!(t.restrict(&vars(&["x"]).into_iter().collect()).unwrap().len(), 1);
        assert_eq!(t.restrict(&vars(&["x", "y"]).into_iter().collect()).unwrap(), t);
        assert!(t.restrict(&vars(&["q"]).into_iter().collect()).is_err());
    }

    #[test]
    fn exhaustive_generation() {
        let m = Model::standard(2);
        assert_eq!(all_teams(&m, &vars(&["x"]), 16).unwrap().count(), 4);
        assert_eq!(all_teams(&m, &vars(&["x", "y"]), 16).unwrap().count(), 16);
        assert_eq!(all_teams(&m, &[], 16).unwrap().count(), 2);
        assert!(matches!(all_teams(&Model::standard(3), &vars(&["x", "y", "z"]), 16), Err(TeamError::OverCap { .. })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let m = Model::standard(2);
        let vs = vars(&["x"]);
        let a: Vec<Team> = sample_teams(&m, &vs, 50, 7).collect();
        let b: Vec<Team> = sample_teams(&m, &vs, 50, 7).collect();
        assert_eq!(a, b);
        assert_eq!(sample_teams(&m, &vs, 0, 7).count(), 0);
        let draws = 16_000;
        let empties = sample_teams(&m, &vars(&["x", "y"]), draws, 11).filter(Team::is_empty).count();
        let freq = empties as f64 / draws as f64;
        assert!((freq - 1.0 / 16.0).abs() < 0.01, "{freq}");
    }

    #[test]
    fn team_files() {
        let m = Model::new(&["a", "b"]);
        let t = parse_team("vars y x\nrow a b\nrow b b # c\n", &m).unwrap();
        assert_eq!(t.vars(), &vars(&["x", "y"])[..]);
        assert_eq!(parse_team(&print_team(&t, &m), &m).unwrap(), t);
        assert!(parse_team("vars x\nrow c\n", &m).is_err());
    }
}
