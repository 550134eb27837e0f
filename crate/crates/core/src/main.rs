use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use relativize::formula::brute_force_sat;
use relativize::harness::{
    crafted_d_corpus, gen_corpus, load_corpus, run_suite, save_corpus, ExperimentConfig,
};
use relativize::lambda::{gen_instances, lambda_report, load_instances};
use relativize::machine::{
    solve_conp_with_budget, solve_conp_with_c_bar, solve_with_a, solve_with_b, solve_with_c,
    Budget, RunResult, TaggedView,
};
use relativize::oracles::{
    build_a, build_b, build_c, build_c_bar, build_d, build_e, build_f, load_oracle, save_oracle,
    OracleKind,
};
use relativize::{Error, Result};

#[derive(Parser)]
#[command(
    name = "relativize",
    version,
    about = "Oracle relativization experiments over small CNF corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct BudgetArgs {
    /// Budget coefficient c in p(n) = c·n^d.
    #[arg(long, default_value_t = 2)]
    coefficient: u64,
    /// Budget exponent d in p(n) = c·n^d.
    #[arg(long, default_value_t = 2)]
    exponent: u32,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget::new(self.coefficient, self.exponent)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded corpus and write it as JSON.
    GenCorpus {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the crafted D-stage corpus instead.
        #[arg(long)]
        d_stages: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Build one oracle set over a corpus file.
    BuildOracle {
        #[arg(long)]
        kind: OracleKind,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the solver matching an oracle file on one corpus problem.
    Solve {
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        formula: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the full experiment suite; exits nonzero if any check fails.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the set-sum battery.
    Lambda {
        /// JSON list of {"S": [ints], "M": int}. Without it, instances are
        /// generated from --seed.
        #[arg(long)]
        instances: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn print_run(run: &RunResult) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(run)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenCorpus {
            config,
            d_stages,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let corpus = if d_stages {
                crafted_d_corpus(cfg.d_budget)?
            } else {
                gen_corpus(&cfg)?
            };
            save_corpus(&corpus, &out)?;
            eprintln!("{} formulas, hash {}", corpus.len(), corpus.hash());
        }
        Command::BuildOracle {
            kind,
            corpus,
            out,
            budget,
        } => {
            let corpus = load_corpus(&corpus, budget.budget())?;
            let set = match kind {
                OracleKind::A => build_a(&corpus)?,
                OracleKind::B => build_b(&corpus)?,
                OracleKind::C => build_c(&corpus)?,
                OracleKind::CBar => build_c_bar(&corpus)?,
                OracleKind::D => build_d(&corpus)?.0,
                OracleKind::DBar => build_d(&corpus)?.1,
                OracleKind::E => build_e(&corpus, &build_a(&corpus)?)?,
                OracleKind::F => build_f(&corpus)?,
            };
            save_oracle(&set, &out)?;
            eprintln!("{kind}: {} members", set.len());
        }
        Command::Solve {
            oracle,
            corpus,
            formula,
            budget,
        } => {
            let budget = budget.budget();
            let corpus = load_corpus(&corpus, budget)?;
            let set = load_oracle(&oracle, &corpus, None)?;
            let (f, _) = corpus
                .get(formula)
                .ok_or_else(|| Error::Config(format!("no formula {formula} in corpus")))?;
            let sat = brute_force_sat(f)?.satisfiable;
            match set.kind() {
                OracleKind::A | OracleKind::E => print_run(
                    &solve_with_a(f, &set)?
                        .labeled(set.kind().as_str())
                        .with_ground_truth(sat),
                )?,
                OracleKind::B => print_run(&solve_with_b(f, &set, budget)?.with_ground_truth(sat))?,
                OracleKind::D => print_run(
                    &solve_with_b(f, &set, budget)?
                        .labeled("D")
                        .with_ground_truth(sat),
                )?,
                OracleKind::C => print_run(&solve_with_c(f, &set)?.with_ground_truth(sat))?,
                OracleKind::CBar => {
                    print_run(&solve_conp_with_c_bar(f, &set)?.with_ground_truth(!sat))?
                }
                OracleKind::DBar => print_run(
                    &solve_conp_with_budget(f, &set, budget)?
                        .labeled("D_bar")
                        .with_ground_truth(!sat),
                )?,
                OracleKind::F => {
                    print_run(
                        &solve_with_a(f, &TaggedView::new(&set, false))?
                            .labeled("F:np")
                            .with_ground_truth(sat),
                    )?;
                    print_run(
                        &solve_conp_with_c_bar(f, &TaggedView::new(&set, true))?
                            .labeled("F:conp")
                            .with_ground_truth(!sat),
                    )?;
                }
            }
        }
        Command::Suite { config } => {
            let cfg = load_config(config.as_deref())?;
            let report = run_suite(&cfg)?;
            print!("{}", report.summary_text());
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Lambda {
            instances,
            seed,
            count,
            csv,
        } => {
            let list = match instances {
                Some(path) => load_instances(&fs::read_to_string(path)?)?,
                None => gen_instances(seed, count, 12),
            };
            let report = lambda_report(
                &list,
                Budget::default(),
                relativize::harness::DEFAULT_D_BUDGET,
            )?;
            print!("{}", report.to_table());
            if let Some(path) = csv {
                report.write_csv(fs::File::create(path)?)?;
            }
            if !report.all_demonstrated() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
