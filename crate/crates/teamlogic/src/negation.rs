//! Weak classical negation inside independence logic for a syntactic
//! fragment of negatable formulas.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{fo_negate, free_vars, is_first_order, substitute, Formula, Term, Var};
use crate::genatom::{atom_def, builtin_registry, complement, sigma_pi_translate, AtomRegistry, GenAtomError};
use crate::parser::print_formula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegatableReport {
    pub in_fragment: bool,
    /// Closure rules applied, outermost first.
    pub trace: Vec<String>,
    pub offending: Option<Formula>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NegationError {
    #[error("outside the negatable fragment: {}", .0.offending.as_ref().map(print_formula).unwrap_or_default())]
    OutOfFragment(NegatableReport),
    #[error(transparent)]
    Atom(#[from] GenAtomError),
}

pub fn is_negatable_fragment(phi: &Formula) -> NegatableReport {
    is_negatable_fragment_with(phi, builtin_registry())
}

pub fn is_negatable_fragment_with(phi: &Formula, registry: &AtomRegistry) -> NegatableReport {
    let mut report = NegatableReport { in_fragment: true, trace: Vec::new(), offending: None };
    walk(phi, registry, &mut report);
    report
}

fn walk(f: &Formula, reg: &AtomRegistry, r: &mut NegatableReport) {
    if !r.in_fragment {
        return;
    }
    let fail = |r: &mut NegatableReport, why: &str| {
        r.in_fragment = false;
        r.trace.push(why.to_string());
        r.offending = Some(f.clone());
    };
    if is_first_order(f) {
        r.trace.push(format!("first-order: {}", print_formula(f)));
        return;
    }
    match f {
        Formula::Gen { name, .. } if reg.get(name).is_none() => fail(r, "unregistered atom"),
        Formula::Dep { .. } | Formula::Ind { .. } | Formula::Inc { .. } | Formula::Gen { .. } => {
            r.trace.push(format!("atom: {}", print_formula(f)));
        }
        Formula::And(a, b) | Formula::BoolOr(a, b) => {
            r.trace.push(if matches!(f, Formula::And(..)) { "conjunction" } else { "boolean disjunction" }.into());
            walk(a, reg, r);
            walk(b, reg, r);
        }
        Formula::Exists1(_, b) | Formula::Forall1(_, b) => {
            r.trace.push(if matches!(f, Formula::Exists1(..)) { "constant exists" } else { "constant forall" }.into());
            walk(b, reg, r);
        }
        Formula::WNeg(b) => {
            r.trace.push("weak negation".into());
            walk(b, reg, r);
        }
        Formula::SplitOr(..) => fail(r, "split disjunction over a non-first-order formula"),
        Formula::Exists(..) | Formula::Forall(..) => fail(r, "team quantifier over a non-first-order formula"),
        _ => fail(r, "implication with a non-first-order antecedent"),
    }
}

/// A formula of independence logic equivalent to `wneg phi`.
pub fn wneg(phi: &Formula) -> Result<Formula, NegationError> {
    wneg_with(phi, builtin_registry())
}

pub fn wneg_with(phi: &Formula, registry: &AtomRegistry) -> Result<Formula, NegationError> {
    let report = is_negatable_fragment_with(phi, registry);
    if !report.in_fragment {
        return Err(NegationError::OutOfFragment(report));
    }
    synth(phi, registry)
}

fn synth(f: &Formula, reg: &AtomRegistry) -> Result<Formula, NegationError> {
    if is_first_order(f) {
        return Ok(fo_wneg(f));
    }
    Ok(match f {
        Formula::And(a, b) => Formula::bor(synth(a, reg)?, synth(b, reg)?),
        Formula::BoolOr(a, b) => Formula::and(synth(a, reg)?, synth(b, reg)?),
        Formula::Exists1(x, b) => Formula::forall1(x.clone(), synth(b, reg)?),
        Formula::Forall1(x, b) => Formula::exists1(x.clone(), synth(b, reg)?),
        Formula::WNeg(b) => (**b).clone(),
        atom => {
            let (def, args) = atom_def(atom, reg).expect("fragment check admits registered atoms only");
            if args.is_empty() {
                return Ok(Formula::Bot);
            }
            sigma_pi_translate(&complement(&def), &args)?
        }
    })
}

/// `∃w⃗(w⃗ ⊆ x⃗ ∧ ¬φ(w⃗/x⃗))` over the sorted free variables `x⃗`.
fn fo_wneg(f: &Formula) -> Formula {
    let neg = fo_negate(f).expect("first-order");
    let xs: Vec<Var> = free_vars(f).into_iter().collect();
    if xs.is_empty() {
        return neg;
    }
    let avoid = f.all_vars();
    let mut ws = Vec::new();
    let mut l = 0;
    while ws.len() < xs.len() {
        l += 1;
        let w = Var::new(format!("w{l}"));
        if !avoid.contains(&w) {
            ws.push(w);
        }
    }
    let sigma: BTreeMap<Var, Term> = xs.iter().cloned().zip(ws.iter().cloned().map(Term::Var)).collect();
    let body = substitute(&neg, &sigma).expect("variables only");
    Formula::exists_block(&ws, Formula::and(Formula::inc(ws.clone(), xs), body))
}

/// `∃x(=(x) ∧ φ)`, the definition of `∃¹xφ` by team quantification.
pub fn exists1_definition(x: &Var, phi: &Formula) -> Formula {
    Formula::exists(x.clone(), Formula::and(Formula::dep(vec![], vec![x.clone()]), phi.clone()))
}

/// `∃w∃u(=(w) ∧ =(u) ∧ (w = u ∨ φ) ∧ (w ≠ u ∨ ψ))` with `w`, `u` fresh.
pub fn bool_or_definition(phi: &Formula, psi: &Formula) -> Formula {
    let mut avoid = phi.all_vars();
    avoid.extend(psi.all_vars());
    let pick = |base: &str, avoid: &std::collections::BTreeSet<Var>| crate::formula::fresh_var(&Var::new(base), avoid);
    let w = pick("w", &avoid);
    avoid.insert(w.clone());
    let u = pick("u", &avoid);
    let (tw, tu) = (Term::Var(w.clone()), Term::Var(u.clone()));
    let body = Formula::conj([
        Formula::dep(vec![], vec![w.clone()]),
        Formula::dep(vec![], vec![u.clone()]),
        Formula::or(Formula::Eq(tw.clone(), tu.clone()), phi.clone()),
        Formula::or(Formula::NegEq(tw, tu), psi.clone()),
    ]);
    Formula::exists(w, Formula::exists(u, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::vars;
    use crate::model::Model;
    use crate::parser::parse_formula;
    use crate::semantics::eval;
    use crate::team::all_teams;

    #[test]
    fn fragment_membership() {
        assert!(is_negatable_fragment(&parse_formula("=(x; y)").unwrap()).in_fragment);
        let r = is_negatable_fragment(&parse_formula("E x. =(x; y)").unwrap());
        assert!(!r.in_fragment);
        assert!(r.offending.is_some());
        assert!(is_negatable_fragment(&parse_formula("x = y || ind(x; ; y)").unwrap()).in_fragment);
        assert!(is_negatable_fragment(&parse_formula("E x. x = y").unwrap()).in_fragment);
        assert!(!is_negatable_fragment(&parse_formula("=(x; y) \\/ x = y").unwrap()).in_fragment);
        assert!(wneg(&parse_formula("E x. =(x; y)").unwrap()).is_err());
    }

    #[test]
    fn first_order_instance() {
        let f = wneg(&parse_formula("x = y").unwrap()).unwrap();
        assert_eq!(print_formula(&f), "E w1. E w2. (inc(w1, w2; x, y) /\\ w1 != w2)");
        let g = wneg(&parse_formula("w1 = y").unwrap()).unwrap();
        assert_eq!(print_formula(&g), "E w2. E w3. (inc(w2, w3; w1, y) /\\ w2 != w3)");
        assert_eq!(wneg(&parse_formula("E x. x = x").unwrap()).unwrap(), parse_formula("A x. x != x").unwrap());
    }

    #[test]
    fn dualities() {
        let a = parse_formula("x = y").unwrap();
        let b = parse_formula("=(x; y)").unwrap();
        assert_eq!(
            wneg(&Formula::bor(a.clone(), b.clone())).unwrap(),
            Formula::and(wneg(&a).unwrap(), wneg(&b).unwrap())
        );
        assert_eq!(wneg(&Formula::wneg(b.clone())).unwrap(), b);
    }

    #[test]
    fn synthesis_matches_weak_negation() {
        let m = Model::standard(2);
        let xy = vars(&["x", "y"]);
        for text in [
            "x = y",
            "=(x; y)",
            "inc(x; y)",
            "ind(x; ; y)",
            "=(x; y) /\\ inc(y; x)",
            "E1 x. =(y; x)",
            "A1 x. x = y || inc(x; y)",
        ] {
            let phi = parse_formula(text).unwrap();
            let neg = wneg(&phi).unwrap();
            for t in all_teams(&m, &xy, 16).unwrap() {
                assert_eq!(
                    eval(&m, &t, &neg).unwrap(),
                    eval(&m, &t, &Formula::wneg(phi.clone())).unwrap(),
                    "{text} {t:?}"
                );
            }
        }
    }

    #[test]
    fn defining_formulas() {
        let m = Model::standard(2);
        let xy = vars(&["x", "y"]);
        let phi = parse_formula("inc(x; y)").unwrap();
        let psi = parse_formula("=(x; y)").unwrap();
        let x = Var::new("x");
        for t in all_teams(&m, &xy, 16).unwrap() {
            let e1 = Formula::exists1(x.clone(), phi.clone());
            assert_eq!(eval(&m, &t, &e1).unwrap(), eval(&m, &t, &exists1_definition(&x, &phi)).unwrap());
            let bo = Formula::bor(phi.clone(), psi.clone());
            assert_eq!(eval(&m, &t, &bo).unwrap(), eval(&m, &t, &bool_or_definition(&phi, &psi)).unwrap());
        }
    }
}
