use std::fs;
use std::path::PathBuf;

use teamlogic::entailment::{entails_bounded, rule_soundness_check, EntailmentConfig, EntailmentStatus};
use teamlogic::formula::vars;
use teamlogic::model::{Elem, Model};
use teamlogic::parser::parse_formula;
use teamlogic::proofkernel::{check_proof, citation_mutants, parse_proof, rule_instances, ProofScript};
use teamlogic::semantics::eval;
use teamlogic::team::Team;

fn corpus() -> Vec<(String, ProofScript)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "proof"))
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let script = parse_proof(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, script)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn every_script_is_accepted() {
    let scripts = corpus();
    assert_eq!(scripts.len(), 9);
    for (name, s) in &scripts {
        if let Err(r) = check_proof(s) {
            panic!("{name}: {r}");
        }
    }
}

#[test]
fn every_corrupted_citation_is_rejected() {
    for (name, s) in corpus() {
        let mutants = citation_mutants(&s);
        assert!(!mutants.is_empty());
        for (line, m) in mutants {
            assert!(check_proof(&m).is_err(), "{name}: mutant at line {line} accepted");
        }
    }
}

#[test]
fn end_sequents_hold_semantically() {
    let cfg = EntailmentConfig { samples: 2000, ..EntailmentConfig::default() };
    for (name, s) in corpus() {
        let seq = check_proof(&s).unwrap();
        let v = entails_bounded(&seq.hyps, &seq.conclusion, &cfg);
        assert!(v.is_valid(), "{name}: {:?}", v.witness);
    }
}

#[test]
fn every_rule_application_is_locally_sound() {
    let cfg = EntailmentConfig { samples: 400, ..EntailmentConfig::default() };
    for (name, s) in corpus() {
        for (line, rule, inst) in rule_instances(&s).unwrap() {
            let v = rule_soundness_check(&inst, &cfg);
            assert!(v.is_valid(), "{name} line {line} ({}): {:?}", rule.name(), v.witness);
        }
    }
}

#[test]
fn contraction_core_fails_without_the_independence_hypothesis() {
    let m = Model::standard(2);
    let vs = vars(&["x", "y", "z", "w1", "u1", "v1", "w2", "u2", "v2", "w3", "u3", "v3"]);
    let row = |bits: [u16; 12]| bits.iter().map(|b| Elem(*b)).collect::<Vec<_>>();
    let team =
        Team::from_rows(&vs, [row([0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0]), row([0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1])])
            .unwrap();
    for h in [
        "ind(x; ; y)",
        "ind(x, y; ; z)",
        "inc(w1, u1, v1; x, y, z)",
        "inc(w2, u2, v2; x, y, z)",
        "inc(x, y, z; w3, u3, v3)",
        "w3 u3 v3 != w1 u2 v2",
    ] {
        assert!(eval(&m, &team, &parse_formula(h).unwrap()).unwrap(), "{h}");
    }
    let extra = parse_formula("ind(w1, u1, v1, w2, u2, v2; ; w3, u3, v3)").unwrap();
    assert!(!eval(&m, &team, &extra).unwrap());
}

#[test]
fn unrestricted_compression_is_unsound() {
    let hyps = vec![parse_formula("inc(p; q)").unwrap(), parse_formula("q != r").unwrap()];
    let v = entails_bounded(&hyps, &parse_formula("p != r").unwrap(), &EntailmentConfig::default());
    assert_eq!(v.status, EntailmentStatus::Counterexample);
}
