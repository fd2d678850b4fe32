//! Named property suites over small models, shared by the CLI and the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eso::check_correspondence;
use crate::formula::{fo_negate, free_vars, vars, Formula, Var};
use crate::genatom::{
    atom_def, build_inc, build_pro, builtin_registry, complement, duplicating_team, eval_direct, grid_var,
    sigma_pi_translate, simulating_team,
};
use crate::model::{Model, Tuple};
use crate::negation::{bool_or_definition, exists1_definition, wneg};
use crate::parser::print_formula;
use crate::random::{random_team, test_model, FormulaGen, Fragment};
use crate::semantics::Evaluator;
use crate::team::{all_teams, Team};

pub const SUITES: [&str; 11] = [
    "flatness",
    "downward",
    "locality",
    "empty-team",
    "lem",
    "sigma-pi",
    "complement",
    "fo-wneg",
    "simulation",
    "eso",
    "definability",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn check_eq<E: std::fmt::Debug>(&mut self, a: Result<bool, E>, b: Result<bool, E>, what: impl FnOnce() -> String) {
        match (a, b) {
            (Ok(a), Ok(b)) => self.check(a == b, || format!("{} ({a} vs {b})", what())),
            (a, b) => self.check(false, || format!("{}: {a:?} / {b:?}", what())),
        }
    }
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    Some(match name {
        "flatness" => flatness(seed),
        "downward" => downward(seed),
        "locality" => locality(seed),
        "empty-team" => empty_team(seed),
        "lem" => excluded_middle(seed),
        "sigma-pi" => sigma_pi(seed),
        "complement" => complements(seed),
        "fo-wneg" => fo_wneg(seed),
        "simulation" => simulation(seed),
        "eso" => eso(seed),
        "definability" => definability(seed),
        _ => return None,
    })
}

/// All teams over `vars` with at most `max_rows` rows, the empty team included.
pub fn teams_up_to(m: &Model, vars: &[Var], max_rows: usize) -> Vec<Team> {
    let mut rows: Vec<Tuple> = vec![vec![]];
    for _ in vars {
        rows = rows.into_iter().flat_map(|r| m.elements().map(move |e| [r.clone(), vec![e]].concat())).collect();
    }
    let mut out = Vec::new();
    let mut pick: Vec<usize> = Vec::new();
    fn rec(rows: &[Tuple], start: usize, left: usize, pick: &mut Vec<usize>, vars: &[Var], out: &mut Vec<Team>) {
        out.push(Team::from_rows(vars, pick.iter().map(|&i| rows[i].clone())).expect("distinct vars"));
        if left == 0 {
            return;
        }
        for i in start..rows.len() {
            pick.push(i);
            rec(rows, i + 1, left - 1, pick, vars, out);
            pick.pop();
        }
    }
    rec(&rows, 0, max_rows, &mut pick, vars, &mut out);
    out
}

fn formulas(seed: u64, count: usize, fragment: Fragment, free: &[&str], bound: &[&str], symbols: bool) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = FormulaGen { rng: &mut rng, fragment, free: vars(free), bound: vars(bound), symbols };
    (0..count).map(|_| g.formula(3)).collect()
}

fn singleton(t: &Team, row: &Tuple) -> Team {
    t.with_rows([row.clone()].into_iter().collect())
}

/// Flatness and union closure of first-order formulas on every team over three variables.
pub fn flatness(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("flatness");
    let m = test_model();
    let ev = Evaluator::new(&m, builtin_registry());
    let xs = vars(&["x", "y", "z"]);
    let teams: Vec<Team> = all_teams(&m, &xs, 8).expect("8 assignments").collect();
    for phi in formulas(seed, 100, Fragment::FirstOrder, &["x", "y", "z"], &["x", "y", "z"], true) {
        let sat: Vec<bool> = teams.iter().map(|t| ev.eval(t, &phi).unwrap_or(false)).collect();
        for (mask, t) in teams.iter().enumerate() {
            let rows_ok = t.rows().iter().all(|row| ev.eval(&singleton(t, row), &phi).unwrap_or(false));
            r.check(sat[mask] == rows_ok, || format!("flatness of {} on {t:?}", print_formula(&phi)));
        }
        for a in (0..teams.len()).filter(|&a| sat[a]) {
            for b in (a + 1..teams.len()).filter(|&b| sat[b]) {
                r.check(sat[a | b], || format!("union closure of {} at masks {a}, {b}", print_formula(&phi)));
            }
        }
    }
    r
}

pub fn excluded_middle(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("lem");
    let m = test_model();
    let ev = Evaluator::new(&m, builtin_registry());
    let xs = vars(&["x", "y", "z"]);
    let teams: Vec<Team> = all_teams(&m, &xs, 8).expect("8 assignments").collect();
    for phi in formulas(seed, 100, Fragment::FirstOrder, &["x", "y", "z"], &["x", "y", "z"], true) {
        let lem = Formula::or(phi.clone(), fo_negate(&phi).expect("first-order"));
        for t in &teams {
            r.check(ev.eval(t, &lem).unwrap_or(false), || format!("{} on {t:?}", print_formula(&lem)));
        }
    }
    r
}

/// Dependence formulas stay true on every subteam missing one row.
pub fn downward(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("downward");
    let m = test_model();
    let ev = Evaluator::new(&m, builtin_registry());
    let xs = vars(&["x", "y", "z"]);
    let teams: Vec<Team> = all_teams(&m, &xs, 8).expect("8 assignments").collect();
    for phi in formulas(seed, 100, Fragment::Dependence, &["x", "y", "z"], &["x", "y", "z"], false) {
        let sat: Vec<Result<bool, _>> = teams.iter().map(|t| ev.eval(t, &phi)).collect();
        for (mask, s) in sat.iter().enumerate() {
            match s {
                Ok(true) => {
                    for bit in (0..8).filter(|b| mask >> b & 1 == 1) {
                        let sub = mask & !(1 << bit);
                        r.check(matches!(sat[sub], Ok(true)), || {
                            format!("{} true on mask {mask}, not on {sub}", print_formula(&phi))
                        });
                    }
                }
                Ok(false) => {}
                Err(e) => r.check(false, || format!("{}: {e}", print_formula(&phi))),
            }
        }
    }
    r
}

/// Truth depends only on the columns of the free variables.
pub fn locality(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("locality");
    let m = test_model();
    let ev = Evaluator::new(&m, builtin_registry());
    let xs = vars(&["x", "y", "z"]);
    let teams: Vec<Team> = all_teams(&m, &xs, 8).expect("8 assignments").collect();
    for phi in formulas(seed, 100, Fragment::Full { with_wneg: true }, &["x", "y"], &["x", "y", "z"], false) {
        let keep = free_vars(&phi);
        for t in &teams {
            let small = t.restrict(&keep).expect("subset of domain");
            r.check_eq(ev.eval(t, &phi), ev.eval(&small, &phi), || format!("{} on {t:?}", print_formula(&phi)));
        }
    }
    r
}

pub fn empty_team(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("empty-team");
    let m = test_model();
    let ev = Evaluator::new(&m, builtin_registry());
    let empty = Team::empty(vars(&["x", "y", "z"]));
    for phi in formulas(seed, 100, Fragment::Full { with_wneg: true }, &["x", "y", "z"], &["x", "y", "z"], true) {
        r.check(matches!(ev.eval(&empty, &phi), Ok(true)), || print_formula(&phi));
    }
    r
}

/// Every builtin native atom shape, with arguments drawn from `pool`.
fn native_atoms(rng: &mut ChaCha8Rng, pool: &[Var]) -> Vec<Formula> {
    let mut pick = |n: usize| -> Vec<Var> { (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect() };
    let mut out = Vec::new();
    for _ in 0..2 {
        for k in 0..=3 {
            out.push(Formula::dep(pick(k), pick(1)));
        }
        out.push(Formula::dep(pick(1), pick(2)));
        for a in 1..=2 {
            for b in 1..=2 {
                for c in 0..=2 {
                    out.push(Formula::ind(pick(a), pick(c), pick(b)));
                }
            }
        }
        for k in 1..=3 {
            out.push(Formula::inc(pick(k), pick(k)));
        }
    }
    out
}

fn atom_grid(seed: u64) -> (Model, Vec<(Formula, Vec<Team>)>) {
    let m = Model::standard(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = vars(&["x", "y", "z"]);
    let wide = vars(&["x", "y", "z", "w"]);
    let exhaustive = teams_up_to(&m, &small, 3);
    let mut out = Vec::new();
    for atom in native_atoms(&mut rng, &small) {
        let mut teams = exhaustive.clone();
        teams.extend((0..50).map(|_| random_team(&mut rng, &m, &wide, 4)));
        out.push((atom, teams));
    }
    (m, out)
}

/// Native atom, its generalized-quantifier translation and direct evaluation agree.
pub fn sigma_pi(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("sigma-pi");
    let (m, grid) = atom_grid(seed);
    let ev = Evaluator::new(&m, builtin_registry());
    for (atom, teams) in grid {
        let (def, args) = atom_def(&atom, builtin_registry()).expect("native atom");
        let translated = match sigma_pi_translate(&def, &args) {
            Ok(f) => f,
            Err(e) => {
                r.check(false, || format!("{}: {e}", print_formula(&atom)));
                continue;
            }
        };
        for t in &teams {
            let native = ev.eval(t, &atom);
            r.check_eq(native.clone(), ev.eval(t, &translated), || {
                format!("translation of {} on {t:?}", print_formula(&atom))
            });
            r.check_eq(native, eval_direct(&m, t, &def, &args), || format!("direct {} on {t:?}", print_formula(&atom)));
        }
    }
    r
}

/// Weak negation of an atom is the complementary atom.
pub fn complements(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("complement");
    let (m, grid) = atom_grid(seed);
    let ev = Evaluator::new(&m, builtin_registry());
    for (atom, teams) in grid {
        let (def, args) = atom_def(&atom, builtin_registry()).expect("native atom");
        let comp = complement(&def);
        let negated = Formula::wneg(atom.clone());
        let translated = sigma_pi_translate(&comp, &args);
        for t in &teams {
            let want = ev.eval(t, &negated);
            r.check_eq(want.clone(), eval_direct(&m, t, &comp, &args), || {
                format!("complement of {} on {t:?}", print_formula(&atom))
            });
            match &translated {
                Ok(f) => r.check_eq(want, ev.eval(t, f), || {
                    format!("translated complement of {} on {t:?}", print_formula(&atom))
                }),
                Err(e) => r.check(false, || format!("complement of {}: {e}", print_formula(&atom))),
            }
        }
    }
    r
}

/// The inclusion-based formula for the weak negation of a first-order formula.
pub fn fo_wneg(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("fo-wneg");
    let m = test_model();
    let ev = Evaluator::new(&m, builtin_registry());
    let xs = vars(&["x", "y"]);
    let teams: Vec<Team> = all_teams(&m, &xs, 4).expect("4 assignments").collect();
    for phi in formulas(seed, 50, Fragment::FirstOrder, &["x", "y"], &["x", "y", "z"], true) {
        let synthesized = match wneg(&phi) {
            Ok(f) => f,
            Err(e) => {
                r.check(false, || format!("{}: {e}", print_formula(&phi)));
                continue;
            }
        };
        let direct = Formula::wneg(phi.clone());
        for t in &teams {
            r.check_eq(ev.eval(t, &synthesized), ev.eval(t, &direct), || format!("{} on {t:?}", print_formula(&phi)));
        }
    }
    r
}

/// Postconditions of the simulating and duplicating teams, checked by evaluation.
pub fn simulation(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("simulation");
    let m = Model::standard(2);
    let ev = Evaluator::new(&m, builtin_registry());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = vars(&["x", "y", "z", "v"]);
    for _ in 0..100 {
        let width = rng.gen_range(1..=pool.len());
        let domain = pool[..width].to_vec();
        let team = random_team(&mut rng, &m, &domain, 4);
        let xlen = rng.gen_range(1..=width);
        let x: Vec<Var> = (0..xlen).map(|_| domain[rng.gen_range(0..width)].clone()).collect();
        let count = rng.gen_range(1..=2);
        let w: Vec<Vec<Var>> = (1..=count).map(|j| (1..=xlen).map(|l| grid_var(1, j, l)).collect()).collect();
        let gammas: Vec<Vec<usize>> =
            (0..count).map(|_| (0..team.len()).map(|_| rng.gen_range(0..team.len())).collect()).collect();
        let rest: Vec<Var> = domain.iter().filter(|v| !x.contains(v)).cloned().collect();
        match simulating_team(&m, &team, &gammas, &x, &w) {
            Ok(y) => {
                let inc = build_inc(&w, &x).expect("lengths match");
                r.check(matches!(ev.eval(&y, &inc), Ok(true)), || format!("inclusion guard on {y:?}"));
            }
            Err(e) => r.check(false, || format!("simulating team for {team:?}: {e}")),
        }
        match duplicating_team(&m, &team, &x, &w) {
            Ok(y) => {
                let pro = build_pro(&rest, &x, &w).expect("lengths match");
                r.check(matches!(ev.eval(&y, &pro), Ok(true)), || format!("projection guard on {y:?}"));
            }
            Err(e) => r.check(false, || format!("duplicating team for {team:?}: {e}")),
        }
    }
    r
}

/// Team satisfaction agrees with the second-order translation on the relation of the team.
pub fn eso(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("eso");
    let m = Model::standard(2);
    let xyz = vars(&["x", "y", "z"]);
    let atoms = [
        "=(x; y)",
        "=(x y; z)",
        "=(; x)",
        "ind(x; ; y)",
        "ind(x; z; y)",
        "ind(x y; ; z)",
        "inc(x; y)",
        "inc(x y; y z)",
        "x = y",
        "x != y",
    ];
    let grid = teams_up_to(&m, &xyz, 4);
    for text in atoms {
        let phi = crate::parser::parse_formula(text).expect("fixed atom");
        for t in &grid {
            let small = t.restrict(&free_vars(&phi)).expect("subset");
            r.check(matches!(check_correspondence(&m, &small, &phi), Ok(true)), || format!("{text} on {small:?}"));
        }
    }
    let xy = vars(&["x", "y"]);
    let teams = teams_up_to(&m, &xy, 4);
    for phi in formulas(seed, 100, Fragment::Full { with_wneg: false }, &["x", "y"], &["x", "y"], false) {
        for t in &teams {
            let small = t.restrict(&free_vars(&phi)).expect("subset");
            match check_correspondence(&m, &small, &phi) {
                Ok(ok) => r.check(ok, || format!("{} on {small:?}", print_formula(&phi))),
                Err(e) => r.check(false, || format!("{}: {e}", print_formula(&phi))),
            }
        }
    }
    r
}

/// The defining formulas of the constant quantifier and boolean disjunction.
pub fn definability(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("definability");
    let m = Model::standard(2);
    let ev = Evaluator::new(&m, builtin_registry());
    let xyz = vars(&["x", "y", "z"]);
    let teams = teams_up_to(&m, &xyz, 4);
    let fs = formulas(seed, 40, Fragment::Full { with_wneg: true }, &["x", "y", "z"], &["x", "y", "z"], false);
    for pair in fs.chunks(2) {
        let (phi, psi) = (&pair[0], &pair[1]);
        for x in &xyz {
            let prim = Formula::exists1(x.clone(), phi.clone());
            let def = exists1_definition(x, phi);
            for t in &teams {
                r.check_eq(ev.eval(t, &prim), ev.eval(t, &def), || format!("{} on {t:?}", print_formula(&prim)));
            }
        }
        let prim = Formula::bor(phi.clone(), psi.clone());
        let def = bool_or_definition(phi, psi);
        for t in &teams {
            r.check_eq(ev.eval(t, &prim), ev.eval(t, &def), || format!("{} on {t:?}", print_formula(&prim)));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_team_grid() {
        let m = Model::standard(2);
        assert_eq!(teams_up_to(&m, &vars(&["x", "y"]), 4).len(), 16);
        assert_eq!(teams_up_to(&m, &vars(&["x", "y", "z"]), 3).len(), 1 + 8 + 28 + 56);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nonsense", 0).is_none());
    }

    #[test]
    fn empty_team_suite_passes() {
        let r = run_suite("empty-team", 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.checks, 100);
    }
}
