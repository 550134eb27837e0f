//! Experiment plumbing: configuration, seeded corpus generation, corpus
//! files, and the suite runner.

mod suite;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::godel_number;
use crate::error::{Error, Result};
use crate::formula::{default_names, enumeration_cap, negate, Formula, Lit};
use crate::machine::Budget;
use crate::oracles::{Corpus, OracleKind};

pub use suite::{run_suite, Check, Conclusion, SuiteReport};

/// Budget of the D corpus. `p(k)^2 < 2^(k-1)` must hold at the odd
/// late-witness stages, which rules out the quadratic default at k ≤ 12.
pub const DEFAULT_D_BUDGET: Budget = Budget::new(1, 1);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub k_range: (usize, usize),
    pub formulas_per_k: usize,
    pub clause_density: f64,
    pub budget: Budget,
    pub d_budget: Budget,
    pub kinds: Vec<OracleKind>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            k_range: (6, 12),
            formulas_per_k: 10,
            clause_density: 4.0,
            budget: Budget::default(),
            d_budget: DEFAULT_D_BUDGET,
            kinds: OracleKind::ALL.to_vec(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.k_range;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!("invalid k range ({lo}, {hi})")));
        }
        if hi > enumeration_cap() {
            return Err(Error::Config(format!(
                "k range tops out at {hi}, above the enumeration cap {}",
                enumeration_cap()
            )));
        }
        if !(self.clause_density.is_finite() && self.clause_density >= 0.0) {
            return Err(Error::Config(format!(
                "clause density {} is not a non-negative number",
                self.clause_density
            )));
        }
        if self.budget.coefficient == 0 || self.d_budget.coefficient == 0 {
            return Err(Error::Config("budget coefficients must be positive".into()));
        }
        Ok(())
    }
}

fn build(k: usize, clauses: Vec<Vec<Lit>>) -> Formula {
    Formula::new(0, default_names(k), clauses).expect("generated clauses stay within k")
}

/// `(a) ∧ (¬a)` over `k` literals.
pub fn crafted_unsat(k: usize) -> Formula {
    build(k, vec![vec![Lit::pos(0)], vec![Lit::neg(0)]])
}

/// One unit clause per literal: the all-true input set, last in canonical
/// order, is the only witness.
pub fn crafted_late_witness(k: usize) -> Formula {
    build(k, (0..k).map(|v| vec![Lit::pos(v)]).collect())
}

fn random_clause(rng: &mut ChaCha8Rng, k: usize) -> Vec<Lit> {
    let width = k.min(3);
    let mut vars: Vec<usize> = sample(rng, k, width).into_vec();
    vars.sort_unstable();
    vars.into_iter()
        .map(|var| Lit {
            var,
            positive: rng.gen_bool(0.5),
        })
        .collect()
}

fn random_formula(rng: &mut ChaCha8Rng, k: usize, clauses: usize) -> Formula {
    build(k, (0..clauses).map(|_| random_clause(rng, k)).collect())
}

/// Renumbers `1..=n`, dropping later copies of a canonical form.
fn dedupe_and_number(formulas: Vec<Formula>) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    formulas
        .into_iter()
        .filter(|f| seen.insert(godel_number(f)))
        .enumerate()
        .map(|(i, f)| f.with_id(i as u64 + 1))
        .collect()
}

/// Seeded random 3-CNF formulas plus, for each width, an unsatisfiable
/// entry, a late-witness entry and a formula/negation pair.
pub fn gen_corpus(config: &ExperimentConfig) -> Result<Corpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi) = config.k_range;
    let mut formulas = Vec::new();
    for k in lo..=hi {
        let clauses = (config.clause_density * k as f64).round() as usize;
        for _ in 0..config.formulas_per_k {
            formulas.push(random_formula(&mut rng, k, clauses));
        }
    }
    for k in lo..=hi {
        formulas.push(crafted_unsat(k));
        formulas.push(crafted_late_witness(k));
        let small = random_formula(&mut rng, k, 2);
        let complement = negate(&small)?;
        formulas.push(small);
        formulas.push(complement);
    }
    Corpus::uniform(dedupe_and_number(formulas), config.budget)
}

/// The corpus the D construction runs on: widths `1..=12` in stage order,
/// unsatisfiable entries everywhere except late-witness entries at widths 7,
/// 9 and 11, where the odd-stage gate opens under [`DEFAULT_D_BUDGET`].
pub fn crafted_d_corpus(budget: Budget) -> Result<Corpus> {
    let formulas = (1..=12)
        .map(|k| match k {
            7 | 9 | 11 => crafted_late_witness(k),
            _ => crafted_unsat(k),
        })
        .collect();
    Corpus::uniform(dedupe_and_number(formulas), budget)
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(corpus.problems())?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_corpus(path: &Path, budget: Budget) -> Result<Corpus> {
    let text = fs::read_to_string(path)?;
    let formulas: Vec<Formula> =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    Corpus::uniform(formulas, budget)
}
