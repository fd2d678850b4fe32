//! Bounded semantic consequence: search small models and teams for a
//! counterexample.

use std::collections::BTreeSet;

use crate::formula::{free_vars, is_first_order, Formula, Var};
use crate::genatom::{builtin_registry, AtomRegistry};
use crate::model::{enumerate_models_from, Model, Signature};
use crate::semantics::Evaluator;
use crate::team::{all_teams, sample_small_teams, sample_teams, Team};

/// Above this many assignments, half-density random teams are replaced by
/// teams of at most `MEDIUM_ROWS` rows.
pub const DENSE_LIMIT: usize = 4096;
pub const MEDIUM_ROWS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentConfig {
    pub max_domain: usize,
    pub min_domain: usize,
    /// Exhaustive team enumeration is used while `|M|^|vars|` stays at or below this.
    pub team_cap: usize,
    /// Teams drawn per model when enumeration is over the cap.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EntailmentConfig {
    fn default() -> Self {
        EntailmentConfig { max_domain: 2, min_domain: 2, team_cap: 16, samples: 10_000, seed: 0 }
    }
}

impl EntailmentConfig {
    pub fn up_to(max_domain: usize) -> Self {
        EntailmentConfig { max_domain, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntailmentStatus {
    ValidUpToBound,
    Counterexample,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub models: usize,
    pub teams: usize,
    pub sampled_models: usize,
    pub budget_errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentVerdict {
    pub status: EntailmentStatus,
    pub witness: Option<(Model, Team)>,
    pub searched: SearchStats,
}

impl EntailmentVerdict {
    pub fn is_valid(&self) -> bool {
        self.status == EntailmentStatus::ValidUpToBound
    }
}

/// Relations and constants mentioned anywhere in the formulas.
pub fn signature_of(formulas: &[&Formula]) -> Signature {
    let mut sig = Signature::default();
    for f in formulas {
        for (r, a) in f.relations() {
            let _ = sig.add_relation(r, a);
        }
        for c in f.constants() {
            let _ = sig.add_constant(c);
        }
    }
    sig
}

pub fn entails_bounded(gamma: &[Formula], phi: &Formula, cfg: &EntailmentConfig) -> EntailmentVerdict {
    entails_bounded_with(gamma, phi, cfg, builtin_registry())
}

pub fn entails_bounded_with(
    gamma: &[Formula],
    phi: &Formula,
    cfg: &EntailmentConfig,
    registry: &AtomRegistry,
) -> EntailmentVerdict {
    let all: Vec<&Formula> = gamma.iter().chain(std::iter::once(phi)).collect();
    let sig = signature_of(&all);
    let vars: Vec<Var> = all.iter().flat_map(|f| free_vars(f)).collect::<BTreeSet<_>>().into_iter().collect();
    let mut premises: Vec<&Formula> = gamma.iter().collect();
    premises.sort_by_key(|f| (!is_first_order(f), f.size()));
    let mut stats = SearchStats::default();
    for (mi, m) in enumerate_models_from(&sig, cfg.min_domain.max(1), cfg.max_domain).enumerate() {
        stats.models += 1;
        let ev = Evaluator::new(&m, registry);
        let check = |t: &Team, stats: &mut SearchStats| -> bool {
            stats.teams += 1;
            for p in &premises {
                match ev.eval(t, p) {
                    Ok(true) => {}
                    Ok(false) => return false,
                    Err(_) => {
                        stats.budget_errors += 1;
                        return false;
                    }
                }
            }
            match ev.eval(t, phi) {
                Ok(v) => !v,
                Err(_) => {
                    stats.budget_errors += 1;
                    false
                }
            }
        };
        let mut found = None;
        match all_teams(&m, &vars, cfg.team_cap) {
            Ok(teams) => {
                for t in teams {
                    if check(&t, &mut stats) {
                        found = Some(t);
                        break;
                    }
                }
            }
            Err(_) => {
                stats.sampled_models += 1;
                let seed = cfg.seed ^ (mi as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                let half = cfg.samples / 2;
                let assignments = m.size().checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
                let sparse = sample_small_teams(&m, &vars, 4, half, seed.wrapping_add(1));
                let wide: Box<dyn Iterator<Item = Team>> = if assignments <= DENSE_LIMIT {
                    Box::new(sample_teams(&m, &vars, cfg.samples - half, seed))
                } else {
                    Box::new(sample_small_teams(&m, &vars, MEDIUM_ROWS, cfg.samples - half, seed))
                };
                for t in sparse.chain(wide) {
                    if check(&t, &mut stats) {
                        found = Some(t);
                        break;
                    }
                }
            }
        }
        if let Some(t) = found {
            return EntailmentVerdict {
                status: EntailmentStatus::Counterexample,
                witness: Some((m, t)),
                searched: stats,
            };
        }
    }
    EntailmentVerdict { status: EntailmentStatus::ValidUpToBound, witness: None, searched: stats }
}

/// A local inference: the premises yield the conclusion, given that each
/// subproof's assumption (added to the premises) yields its conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub subproofs: Vec<(Formula, Formula)>,
}

/// Checks every subproof sequent, then the main one; reports the first failure.
pub fn rule_soundness_check(rule: &RuleInstance, cfg: &EntailmentConfig) -> EntailmentVerdict {
    let mut total = SearchStats::default();
    let absorb = |v: EntailmentVerdict, total: &mut SearchStats| -> Option<EntailmentVerdict> {
        total.models += v.searched.models;
        total.teams += v.searched.teams;
        total.sampled_models += v.searched.sampled_models;
        total.budget_errors += v.searched.budget_errors;
        (!v.is_valid()).then(|| EntailmentVerdict { searched: total.clone(), ..v })
    };
    for (assumption, sub) in &rule.subproofs {
        let mut gamma = rule.premises.clone();
        gamma.push(assumption.clone());
        if let Some(v) = absorb(entails_bounded(&gamma, sub, cfg), &mut total) {
            return v;
        }
    }
    if let Some(v) = absorb(entails_bounded(&rule.premises, &rule.conclusion, cfg), &mut total) {
        return v;
    }
    EntailmentVerdict { status: EntailmentStatus::ValidUpToBound, witness: None, searched: total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::semantics::eval;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn dependence_transitivity() {
        let v = entails_bounded(&[f("=(x; y)"), f("=(y; z)")], &f("=(x; z)"), &EntailmentConfig::default());
        assert!(v.is_valid());
        assert!(v.searched.teams > 0);
    }

    #[test]
    fn dependence_symmetry_fails() {
        let v = entails_bounded(&[f("=(x; y)")], &f("=(y; x)"), &EntailmentConfig::default());
        assert_eq!(v.status, EntailmentStatus::Counterexample);
        let (m, t) = v.witness.unwrap();
        assert!(eval(&m, &t, &f("=(x; y)")).unwrap());
        assert!(!eval(&m, &t, &f("=(y; x)")).unwrap());
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn independence_exchange() {
        let v =
            entails_bounded(&[f("ind(x; ; y)"), f("ind(x y; ; z)")], &f("ind(x; ; y z)"), &EntailmentConfig::default());
        assert!(v.is_valid());
    }

    #[test]
    fn relations_enter_the_signature() {
        let v = entails_bounded(&[f("P(x)")], &f("A y. P(y)"), &EntailmentConfig::default());
        assert_eq!(v.status, EntailmentStatus::Counterexample);
    }

    #[test]
    fn rule_instances() {
        let cfg = EntailmentConfig::default();
        let trs = RuleInstance {
            premises: vec![f("inc(x; y)"), f("inc(y; z)")],
            conclusion: f("inc(x; z)"),
            subproofs: vec![],
        };
        assert!(rule_soundness_check(&trs, &cfg).is_valid());
        let cmp =
            RuleInstance { premises: vec![f("inc(y; x)"), f("x = 'c")], conclusion: f("y = 'c"), subproofs: vec![] };
        assert!(rule_soundness_check(&cmp, &cfg).is_valid());
        let broken = RuleInstance { premises: vec![f("inc(x; y)")], conclusion: f("inc(y; x)"), subproofs: vec![] };
        assert_eq!(rule_soundness_check(&broken, &cfg).status, EntailmentStatus::Counterexample);
    }
}
