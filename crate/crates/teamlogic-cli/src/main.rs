use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use teamlogic::entailment::{entails_bounded, EntailmentConfig};
use teamlogic::eso::{print_eso, tau};
use teamlogic::formula::Formula;
use teamlogic::genatom::{atom_def, builtin_registry, sigma_pi_translate};
use teamlogic::model::{parse_model, print_model};
use teamlogic::negation::{wneg, NegationError};
use teamlogic::parser::{parse_formula, print_formula};
use teamlogic::proofkernel::{check_proof, parse_proof};
use teamlogic::props::{run_suite, SUITES};
use teamlogic::semantics::eval;
use teamlogic::team::{parse_team, print_team};

#[derive(Parser)]
#[command(name = "teamlogic", version, about = "Team semantics workbench for dependence and independence logic")]
struct Cli {
    /// One key=value record per line.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a formula on a team.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        team: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Search small models and teams for a counterexample.
    Entail(EntailArgs),
    /// Print the weak negation of a formula as an independence-logic formula.
    Negate {
        #[arg(long)]
        formula: String,
    },
    /// Print the second-order translation, and the quantifier translation of an atom.
    Translate {
        #[arg(long)]
        formula: String,
    },
    /// Check a proof script.
    Prove {
        #[arg(long)]
        script: PathBuf,
    },
    /// Run property suites.
    Props {
        /// Suite to run; repeatable. All suites when absent.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct EntailArgs {
    #[arg(long)]
    hyp: Vec<String>,
    #[arg(long)]
    concl: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    max_domain: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    team_cap: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write a counterexample to PREFIX.model and PREFIX.team.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
}

enum Outcome {
    Yes,
    No,
}

struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Out {
    machine: bool,
}

impl Out {
    fn verdict(&self, text: &str, key: &str) {
        if self.machine {
            println!("verdict={key}");
        } else {
            println!("{text}");
        }
    }

    fn field(&self, key: &str, value: impl Display) {
        if self.machine {
            println!("{key}={value}");
        } else {
            println!("{key}: {value}");
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| Failure(format!("cannot parse {text:?}: {e}")))
}

fn check(out: &Out, model: &Path, team: &Path, text: &str) -> Result<Outcome, Failure> {
    let m = parse_model(&read(model)?)?;
    let t = parse_team(&read(team)?, &m)?;
    let f = formula(text)?;
    Ok(if eval(&m, &t, &f)? {
        out.verdict("SAT", "sat");
        Outcome::Yes
    } else {
        out.verdict("UNSAT", "unsat");
        Outcome::No
    })
}

fn entail(out: &Out, a: &EntailArgs) -> Result<Outcome, Failure> {
    let gamma = a.hyp.iter().map(|h| formula(h)).collect::<Result<Vec<_>, _>>()?;
    let phi = formula(&a.concl)?;
    let cfg = EntailmentConfig {
        max_domain: a.max_domain as usize,
        team_cap: a.team_cap as usize,
        samples: a.samples as usize,
        seed: a.seed,
        ..EntailmentConfig::default()
    };
    let v = entails_bounded(&gamma, &phi, &cfg);
    let (m, t) = match v.witness {
        None => {
            out.verdict(&format!("VALID-UP-TO {}", a.max_domain), "valid-up-to");
            if out.machine {
                out.field("max_domain", a.max_domain);
            }
            out.field("models", v.searched.models);
            out.field("teams", v.searched.teams);
            out.field("sampled_models", v.searched.sampled_models);
            out.field("budget_errors", v.searched.budget_errors);
            return Ok(Outcome::Yes);
        }
        Some(w) => w,
    };
    out.verdict("COUNTEREXAMPLE", "counterexample");
    let (mtext, ttext) = (print_model(&m), print_team(&t, &m));
    match &a.out {
        Some(prefix) => {
            let mp = prefix.with_extension("model");
            let tp = prefix.with_extension("team");
            std::fs::write(&mp, &mtext).map_err(|e| Failure(format!("{}: {e}", mp.display())))?;
            std::fs::write(&tp, &ttext).map_err(|e| Failure(format!("{}: {e}", tp.display())))?;
            out.field("model_file", mp.display());
            out.field("team_file", tp.display());
        }
        None if !out.machine => {
            print!("{mtext}");
            print!("{ttext}");
        }
        None => {}
    }
    Ok(Outcome::No)
}

fn negate(out: &Out, text: &str) -> Result<Outcome, Failure> {
    match wneg(&formula(text)?) {
        Ok(f) => {
            if out.machine {
                out.field("negation", print_formula(&f));
            } else {
                println!("{}", print_formula(&f));
            }
            Ok(Outcome::Yes)
        }
        Err(NegationError::OutOfFragment(r)) => {
            out.verdict("OUTSIDE-FRAGMENT", "outside-fragment");
            if let Some(f) = r.offending {
                out.field("offending", print_formula(&f));
            }
            Ok(Outcome::No)
        }
        Err(e) => Err(e.into()),
    }
}

fn translate(out: &Out, text: &str) -> Result<Outcome, Failure> {
    let f = formula(text)?;
    out.field("eso", print_eso(&tau(&f, "R")?));
    if let Some((def, args)) = atom_def(&f, builtin_registry()) {
        out.field("sigma-pi", print_formula(&sigma_pi_translate(&def, &args)?));
    }
    Ok(Outcome::Yes)
}

fn prove(out: &Out, path: &Path) -> Result<Outcome, Failure> {
    let script = parse_proof(&read(path)?)?;
    match check_proof(&script) {
        Ok(seq) => {
            out.verdict("ACCEPTED", "accepted");
            let hyps: Vec<String> = seq.hyps.iter().map(print_formula).collect();
            out.field("sequent", format!("{} |- {}", hyps.join(", "), print_formula(&seq.conclusion)));
            Ok(Outcome::Yes)
        }
        Err(r) => {
            out.verdict("REJECTED", "rejected");
            out.field("line", r.line);
            out.field("reason", r.reason);
            Ok(Outcome::No)
        }
    }
}

fn props(out: &Out, suites: &[String], seed: u64) -> Result<Outcome, Failure> {
    let names: Vec<String> =
        if suites.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { suites.to_vec() };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        return Err(Failure(format!("unknown suite {bad}; known suites: {}", SUITES.join(", "))));
    }
    let mut all = true;
    for name in &names {
        let r = run_suite(name, seed).expect("known suite");
        all &= r.passed();
        let status = if r.passed() { "pass" } else { "fail" };
        if out.machine {
            println!("suite={} status={status} checks={} failures={}", r.name, r.checks, r.failures.len());
        } else {
            println!("{}: {} ({} checks, {} failures)", r.name, status.to_uppercase(), r.checks, r.failures.len());
            for f in &r.failures {
                println!("  {f}");
            }
        }
    }
    Ok(if all { Outcome::Yes } else { Outcome::No })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { machine: cli.machine };
    let result = match &cli.cmd {
        Cmd::Check { model, team, formula } => check(&out, model, team, formula),
        Cmd::Entail(a) => entail(&out, a),
        Cmd::Negate { formula } => negate(&out, formula),
        Cmd::Translate { formula } => translate(&out, formula),
        Cmd::Prove { script } => prove(&out, script),
        Cmd::Props { suite, seed } => props(&out, suite, *seed),
    };
    match result {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(Failure(msg)) => {
            if out.machine {
                println!("error={msg}");
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}
