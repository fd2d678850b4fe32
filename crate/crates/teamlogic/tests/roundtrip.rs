use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use teamlogic::formula::vars;
use teamlogic::parser::{parse_formula, print_formula};
use teamlogic::random::{random_team, test_model, FormulaGen, Fragment};
use teamlogic::semantics::eval;

fn fragment(k: u8) -> Fragment {
    match k % 3 {
        0 => Fragment::FirstOrder,
        1 => Fragment::Dependence,
        _ => Fragment::Full { with_wneg: true },
    }
}

proptest! {
    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>(), k in any::<u8>(), depth in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = FormulaGen {
            rng: &mut rng,
            fragment: fragment(k),
            free: vars(&["x", "y"]),
            bound: vars(&["x", "y", "z"]),
            symbols: true,
        };
        let f = g.formula(depth);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn reparsed_formulas_evaluate_alike(seed in any::<u64>(), k in any::<u8>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = test_model();
        let xy = vars(&["x", "y"]);
        let f = FormulaGen { rng: &mut rng, fragment: fragment(k), free: xy.clone(), bound: vars(&["x", "y", "z"]), symbols: true }.formula(3);
        let g = parse_formula(&print_formula(&f)).unwrap();
        let t = random_team(&mut rng, &m, &xy, 4);
        prop_assert_eq!(eval(&m, &t, &f), eval(&m, &t, &g));
    }
}
