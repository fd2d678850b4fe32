//! Seeded random formulas and teams for property suites.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Term, Var};
use crate::model::{Elem, Model, Tuple};
use crate::team::Team;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    /// Equality, `P` and the constant `c`; `∧`, `∨`, `∃`, `∀`.
    FirstOrder,
    /// First-order literals and dependence atoms.
    Dependence,
    /// Every connective; `with_wneg` adds weak negation.
    Full { with_wneg: bool },
}

/// A two-element model interpreting the symbols random formulas may use.
pub fn test_model() -> Model {
    Model::standard(2)
        .with_relation("P", 1, [vec![Elem(0)]].into_iter().collect())
        .and_then(|m| m.with_constant("c", Elem(1)))
        .expect("fresh symbols")
}

pub struct FormulaGen<'r> {
    pub rng: &'r mut ChaCha8Rng,
    pub fragment: Fragment,
    /// Variables that may occur free.
    pub free: Vec<Var>,
    /// Variables quantifiers may bind.
    pub bound: Vec<Var>,
    /// Whether first-order literals may mention `P` and `c`.
    pub symbols: bool,
}

impl FormulaGen<'_> {
    pub fn formula(&mut self, depth: usize) -> Formula {
        let scope = self.free.clone();
        self.go(depth, &scope)
    }

    fn pick_vars(&mut self, scope: &[Var], lo: usize, hi: usize) -> Vec<Var> {
        let n = self.rng.gen_range(lo..=hi);
        (0..n).map(|_| scope.choose(self.rng).expect("nonempty scope").clone()).collect()
    }

    fn term(&mut self, scope: &[Var]) -> Term {
        if self.symbols && self.rng.gen_ratio(1, 6) {
            Term::constant("c")
        } else {
            Term::Var(scope.choose(self.rng).expect("nonempty scope").clone())
        }
    }

    fn literal(&mut self, scope: &[Var]) -> Formula {
        let top = if self.symbols { 6 } else { 4 };
        match self.rng.gen_range(0..top) {
            0 | 1 => Formula::Eq(self.term(scope), self.term(scope)),
            2 => Formula::NegEq(self.term(scope), self.term(scope)),
            3 => {
                if self.rng.gen() {
                    Formula::Top
                } else {
                    Formula::Bot
                }
            }
            4 => Formula::Rel("P".into(), vec![self.term(scope)]),
            _ => Formula::NegRel("P".into(), vec![self.term(scope)]),
        }
    }

    fn atom(&mut self, scope: &[Var]) -> Formula {
        let dep_only = self.fragment == Fragment::Dependence;
        match if dep_only { 0 } else { self.rng.gen_range(0..3) } {
            0 => {
                let det = self.pick_vars(scope, 0, 2);
                Formula::dep(det, self.pick_vars(scope, 1, 1))
            }
            1 => {
                let xs = self.pick_vars(scope, 1, 2);
                let zs = self.pick_vars(scope, 0, 1);
                Formula::ind(xs, zs, self.pick_vars(scope, 1, 2))
            }
            _ => {
                let k = self.rng.gen_range(1..=2);
                Formula::inc(self.pick_vars(scope, k, k), self.pick_vars(scope, k, k))
            }
        }
    }

    fn go(&mut self, depth: usize, scope: &[Var]) -> Formula {
        let leaf = depth == 0 || self.rng.gen_ratio(1, 4);
        if leaf {
            if self.fragment != Fragment::FirstOrder && self.rng.gen_ratio(1, 2) {
                return self.atom(scope);
            }
            return self.literal(scope);
        }
        let connectives = match self.fragment {
            Fragment::FirstOrder | Fragment::Dependence => 4,
            Fragment::Full { with_wneg: false } => 7,
            Fragment::Full { with_wneg: true } => 8,
        };
        let bind = |g: &mut Self| -> (Var, Vec<Var>) {
            let v = g.bound.choose(g.rng).expect("bound pool").clone();
            let mut inner: Vec<Var> = scope.to_vec();
            if !inner.contains(&v) {
                inner.push(v.clone());
            }
            (v, inner)
        };
        match self.rng.gen_range(0..connectives) {
            0 => Formula::and(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            1 => Formula::or(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            2 => {
                let (v, inner) = bind(self);
                Formula::exists(v, self.go(depth - 1, &inner))
            }
            3 => {
                let (v, inner) = bind(self);
                Formula::forall(v, self.go(depth - 1, &inner))
            }
            4 => Formula::bor(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            5 => {
                let (v, inner) = bind(self);
                Formula::exists1(v, self.go(depth - 1, &inner))
            }
            6 => {
                let (v, inner) = bind(self);
                Formula::forall1(v, self.go(depth - 1, &inner))
            }
            _ => Formula::wneg(self.go(depth - 1, scope)),
        }
    }
}

/// A random nonempty team over `vars` with at most `max_rows` rows.
pub fn random_team(rng: &mut ChaCha8Rng, m: &Model, vars: &[Var], max_rows: usize) -> Team {
    let k = rng.gen_range(1..=max_rows.max(1));
    let rows: BTreeSet<Tuple> =
        (0..k).map(|_| vars.iter().map(|_| Elem(rng.gen_range(0..m.size()) as u16)).collect()).collect();
    Team::from_rows(vars, rows).expect("distinct variables")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{free_vars, is_first_order, vars};
    use rand::SeedableRng;

    #[test]
    fn generated_formulas_respect_the_pools() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let free = vars(&["x", "y"]);
        let mut g = FormulaGen {
            rng: &mut rng,
            fragment: Fragment::FirstOrder,
            free: free.clone(),
            bound: vars(&["x", "y", "z"]),
            symbols: true,
        };
        for _ in 0..200 {
            let f = g.formula(3);
            assert!(is_first_order(&f));
            assert!(f.depth() <= 3);
            assert!(free_vars(&f).iter().all(|v| free.contains(v)));
        }
    }

    #[test]
    fn seeds_reproduce() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = FormulaGen {
                rng: &mut rng,
                fragment: Fragment::Full { with_wneg: true },
                free: vars(&["x"]),
                bound: vars(&["x", "y"]),
                symbols: false,
            };
            (0..20).map(|_| g.formula(3)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn teams_are_small_and_nonempty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = test_model();
        for _ in 0..50 {
            let t = random_team(&mut rng, &m, &vars(&["x", "y", "z"]), 4);
            assert!((1..=4).contains(&t.len()));
        }
    }
}
