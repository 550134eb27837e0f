use std::fs;
use std::io::BufWriter;

use rayon::prelude::*;
use serde::Serialize;

use super::{crafted_d_corpus, crafted_unsat, gen_corpus, ExperimentConfig};
use crate::encoding::godel_number;
use crate::error::Result;
use crate::formula::{brute_force_sat, Formula};
use crate::machine::{
    nd_solve, run_report, solve_conp_with_budget, solve_conp_with_c_bar, solve_with_a,
    solve_with_b, solve_with_c, write_runs_jsonl, AggregateReport, Budget, RunResult, TaggedView,
};
use crate::oracles::{
    build_a, build_b, build_c, build_c_bar, build_d, build_e_traced, build_f, kappa, Corpus,
    GateRecord, OracleKind, OracleSet, DEFAULT_TOWER_STAGE_CAP, STEP_B,
};

/// One asserted invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One conclusion about an oracle, with the runs that bear it out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub oracle: String,
    pub claim: String,
    /// `functional` or `dysfunctional`.
    pub character: String,
    pub observed: bool,
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub corpus_hash: String,
    pub d_corpus_hash: String,
    pub corpus_size: usize,
    /// Problems left out of budgeted runs because `p(k) ≥ 2^k`.
    pub budget_skipped: Vec<u64>,
    pub checks: Vec<Check>,
    pub conclusions: Vec<Conclusion>,
    pub e_gates: Vec<GateRecord>,
    #[serde(skip)]
    pub runs: Vec<RunResult>,
    #[serde(skip)]
    pub aggregate: AggregateReport,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn conclusion(&self, oracle: &str) -> Option<&Conclusion> {
        self.conclusions.iter().find(|b| b.oracle == oracle)
    }

    pub fn summary_text(&self) -> String {
        let mut out = format!(
            "corpus {} ({} problems), {} runs\n",
            &self.corpus_hash[..16],
            self.corpus_size,
            self.runs.len()
        );
        for b in &self.conclusions {
            out.push_str(&format!(
                "[{}] {:<6} {:<14} {} ({} runs)\n",
                if b.observed { "yes" } else { "no " },
                b.oracle,
                b.character,
                b.claim,
                b.evidence.len()
            ));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "{} {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out
    }
}

fn run_id(r: &RunResult) -> String {
    format!("{}:{}", r.oracle, r.formula_id)
}

/// Ground truth for every corpus problem, in corpus order.
fn truths(corpus: &Corpus) -> Result<Vec<bool>> {
    corpus
        .problems()
        .par_iter()
        .map(|f| Ok(brute_force_sat(f)?.satisfiable))
        .collect()
}

fn over<F>(corpus: &Corpus, truth: &[bool], mask: &[bool], solve: F) -> Result<Vec<RunResult>>
where
    F: Fn(&Formula, Budget, bool) -> Result<RunResult> + Sync,
{
    corpus
        .problems()
        .par_iter()
        .zip(corpus.budgets().par_iter())
        .zip(truth.par_iter().zip(mask.par_iter()))
        .filter(|(_, (_, &keep))| keep)
        .map(|((f, &b), (&t, _))| solve(f, b, t))
        .collect()
}

struct Ctx {
    checks: Vec<Check>,
    conclusions: Vec<Conclusion>,
    runs: Vec<RunResult>,
}

impl Ctx {
    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn conclusion(
        &mut self,
        oracle: &str,
        claim: &str,
        character: &str,
        observed: bool,
        evidence: Vec<String>,
    ) {
        self.conclusions.push(Conclusion {
            oracle: oracle.into(),
            claim: claim.into(),
            character: character.into(),
            observed,
            evidence,
        });
    }
}

/// `steps + queries ≤ p(k) + k + 1` for every run in `runs`.
fn step_bound_violations(runs: &[RunResult], budget_of: impl Fn(u64) -> Budget) -> Vec<String> {
    runs.iter()
        .filter(|r| {
            let bound = budget_of(r.formula_id).allowance(r.k as u64) + r.k as u128 + 1;
            (r.steps + r.queries) as u128 > bound
        })
        .map(|r| format!("{} (steps {}, queries {})", run_id(r), r.steps, r.queries))
        .collect()
}

fn describe_failures(runs: &[&RunResult]) -> String {
    runs.iter()
        .take(3)
        .map(|r| format!("{} transcript {:?}", run_id(r), r.transcript))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Builds the requested oracles, runs the matching machines over the
/// generated corpus, checks every verdict against exhaustive search, and
/// writes `runs.jsonl`, `runs.csv`, `summary.json` and `summary.txt` to the
/// configured output directory.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    let report = execute(config)?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    write_runs_jsonl(
        &report.runs,
        BufWriter::new(fs::File::create(dir.join("runs.jsonl"))?),
    )?;
    report
        .aggregate
        .write_csv(BufWriter::new(fs::File::create(dir.join("runs.csv"))?))?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    fs::write(dir.join("summary.txt"), report.summary_text())?;
    Ok(report)
}

fn execute(config: &ExperimentConfig) -> Result<SuiteReport> {
    let corpus = gen_corpus(config)?;
    let truth = truths(&corpus)?;
    let all = vec![true; corpus.len()];
    let budgeted: Vec<bool> = corpus
        .iter()
        .map(|(f, b)| b.below_exhaustive(f.k()))
        .collect();
    let budget_skipped: Vec<u64> = corpus
        .problems()
        .iter()
        .zip(&budgeted)
        .filter(|(_, &ok)| !ok)
        .map(|(f, _)| f.id)
        .collect();
    let budget_of = |id: u64| corpus.budgets()[id as usize - 1];
    let wants = |k: OracleKind| config.kinds.contains(&k);
    let mut cx = Ctx {
        checks: Vec::new(),
        conclusions: Vec::new(),
        runs: Vec::new(),
    };

    let nd = over(&corpus, &truth, &all, |f, b, t| {
        Ok(nd_solve(f, b)?.with_ground_truth(t))
    })?;
    let nd_ok = nd.iter().all(|r| r.correct == Some(true) && r.queries == 0);
    cx.check(
        "ND machine agrees with exhaustive search",
        nd_ok,
        format!("{} runs, all with 0 queries", nd.len()),
    );
    cx.runs.extend(nd);

    let a = build_a(&corpus)?;
    if wants(OracleKind::A) {
        let runs = over(&corpus, &truth, &all, |f, _, t| {
            Ok(solve_with_a(f, &a)?.with_ground_truth(t))
        })?;
        let wrong: Vec<&RunResult> = runs.iter().filter(|r| r.is_wrong()).collect();
        let over_queries: Vec<String> = runs
            .iter()
            .filter(|r| r.queries > r.k as u64 + 1)
            .map(run_id)
            .collect();
        cx.check(
            "A: every verdict correct",
            wrong.is_empty(),
            describe_failures(&wrong),
        );
        cx.check(
            "A: at most k+1 queries",
            over_queries.is_empty(),
            over_queries.join(", "),
        );
        let accepting: Vec<RunResult> = runs
            .iter()
            .filter(|r| r.verdict.accepted())
            .cloned()
            .collect();
        let bound = step_bound_violations(&accepting, budget_of);
        cx.check(
            "A: steps + queries within p(k) + k + 1 on accepting runs",
            bound.is_empty(),
            format!("{} accepting runs; {}", accepting.len(), bound.join(", ")),
        );
        cx.conclusion(
            "A",
            "the deterministic partition solver decides every problem with at most k+1 queries",
            "functional",
            wrong.is_empty() && over_queries.is_empty(),
            runs.iter().map(run_id).collect(),
        );
        cx.runs.extend(runs);
    }

    if wants(OracleKind::B) {
        let b = build_b(&corpus)?;
        let runs = over(&corpus, &truth, &budgeted, |f, bud, t| {
            Ok(solve_with_b(f, &b, bud)?.with_ground_truth(t))
        })?;
        let misled: Vec<String> = runs
            .iter()
            .filter(|r| {
                r.is_wrong()
                    && r.accepted_codes()
                        .any(|c| b.provenance(c).is_some_and(|p| p.step == STEP_B))
            })
            .map(run_id)
            .collect();
        let bound = step_bound_violations(&runs, budget_of);
        cx.check(
            "B: some deterministic verdict is wrong, traced to the staged insertion",
            !misled.is_empty(),
            format!("{} misled of {} budgeted runs", misled.len(), runs.len()),
        );
        cx.check(
            "B: steps + queries within p(k) + k + 1",
            bound.is_empty(),
            bound.join(", "),
        );
        cx.conclusion(
            "B",
            "the budgeted deterministic solver is misled while the nondeterministic machine stays correct",
            "dysfunctional",
            !misled.is_empty() && nd_ok,
            misled,
        );
        cx.runs.extend(runs);
    }

    if wants(OracleKind::C) || wants(OracleKind::CBar) {
        let c = build_c(&corpus)?;
        let c_bar = build_c_bar(&corpus)?;
        let c_runs = over(&corpus, &truth, &all, |f, _, t| {
            Ok(solve_with_c(f, &c)?.with_ground_truth(t))
        })?;
        let conp = over(&corpus, &truth, &all, |f, _, t| {
            Ok(solve_conp_with_c_bar(f, &c_bar)?.with_ground_truth(!t))
        })?;
        let conp_wrong: Vec<&RunResult> = conp
            .iter()
            .filter(|r| r.correct != Some(true) || r.queries != 1)
            .collect();
        cx.check(
            "C_bar: complement solver correct with exactly one query",
            conp_wrong.is_empty(),
            describe_failures(&conp_wrong),
        );
        let (lo, hi) = config.k_range;
        let mut growth = Vec::new();
        for k in lo..=hi {
            let g = godel_number(&crafted_unsat(k));
            let q = c_runs
                .iter()
                .find(|r| {
                    r.k == k && godel_number(&corpus.problems()[r.formula_id as usize - 1]) == g
                })
                .map(|r| r.queries);
            growth.push((k, q));
        }
        let exact = growth.iter().all(|&(k, q)| q == Some(1u64 << k));
        let doubling = growth
            .windows(2)
            .all(|w| matches!((w[0].1, w[1].1), (Some(x), Some(y)) if y == 2 * x));
        cx.check(
            "C: 2^k queries on crafted unsatisfiable entries, doubling per k",
            exact && doubling,
            format!("{growth:?}"),
        );
        let c_wrong: Vec<&RunResult> = c_runs.iter().filter(|r| r.is_wrong()).collect();
        cx.check(
            "C: every verdict correct",
            c_wrong.is_empty(),
            describe_failures(&c_wrong),
        );
        let exponential: Vec<String> = c_runs
            .iter()
            .filter(|r| r.queries == 1 << r.k && budget_of(r.formula_id).below_exhaustive(r.k))
            .map(run_id)
            .collect();
        let mut evidence = exponential;
        evidence.extend(conp.iter().map(run_id));
        cx.conclusion(
            "C",
            "the complement is decided with one query while the problem itself needs 2^k",
            "dysfunctional",
            exact && conp_wrong.is_empty(),
            evidence,
        );
        cx.runs.extend(c_runs);
        cx.runs.extend(conp);
    }

    let d_corpus = crafted_d_corpus(config.d_budget)?;
    if wants(OracleKind::D) || wants(OracleKind::DBar) {
        let (d, d_bar) = build_d(&d_corpus)?;
        let d_truth = truths(&d_corpus)?;
        let d_mask: Vec<bool> = d_corpus
            .iter()
            .map(|(f, b)| b.below_exhaustive(f.k()))
            .collect();
        let np = over(&d_corpus, &d_truth, &d_mask, |f, bud, t| {
            Ok(solve_with_b(f, &d, bud)?.labeled("D").with_ground_truth(t))
        })?;
        let co = over(&d_corpus, &d_truth, &d_mask, |f, bud, t| {
            Ok(solve_conp_with_budget(f, &d_bar, bud)?
                .labeled("D_bar")
                .with_ground_truth(!t))
        })?;
        let traced = |runs: &[RunResult], o: &OracleSet| -> Vec<String> {
            runs.iter()
                .filter(|r| r.is_wrong() && r.accepted_codes().any(|c| o.provenance(c).is_some()))
                .map(|r| {
                    let step = r
                        .accepted_codes()
                        .find_map(|c| o.provenance(c))
                        .map(|p| p.step.clone());
                    format!("{} <- {}", run_id(r), step.unwrap_or_default())
                })
                .collect()
        };
        // A wrong rejection under D is traced through the code it asked
        // about, which D̄ recorded.
        let mut np_misled = traced(&np, &d);
        np_misled.extend(
            np.iter()
                .filter(|r| r.is_wrong() && !r.verdict.accepted())
                .filter_map(|r| {
                    let q = r.transcript.first()?;
                    d_bar
                        .provenance(&q.code)
                        .map(|p| format!("{} <- {}", run_id(r), p.step))
                }),
        );
        let co_misled = traced(&co, &d_bar);
        let nd_d = over(
            &d_corpus,
            &d_truth,
            &vec![true; d_corpus.len()],
            |f, b, t| Ok(nd_solve(f, b)?.labeled("ND:D").with_ground_truth(t)),
        )?;
        let nd_d_ok = nd_d.iter().all(|r| r.correct == Some(true));
        cx.check(
            "D: some deterministic verdict is wrong, with provenance",
            !np_misled.is_empty(),
            np_misled.join(", "),
        );
        cx.check(
            "D_bar: some complement verdict is wrong, with provenance",
            !co_misled.is_empty(),
            co_misled.join(", "),
        );
        cx.check(
            "D: ND machine correct on the D corpus",
            nd_d_ok,
            format!("{} runs", nd_d.len()),
        );
        let mut evidence = np_misled;
        evidence.extend(co_misled);
        cx.conclusion(
            "D",
            "both the problem and its complement mislead the budgeted solvers",
            "dysfunctional",
            cx.checks.iter().rev().take(3).all(|c| c.passed),
            evidence,
        );
        cx.runs.extend(np);
        cx.runs.extend(co);
        cx.runs.extend(nd_d);
    }

    let mut e_gates = Vec::new();
    if wants(OracleKind::E) {
        let built = build_e_traced(&corpus, &a, DEFAULT_TOWER_STAGE_CAP)?;
        let e = &built.oracle;
        let kap = kappa(&corpus)?;
        let restricted = |o: &OracleSet| -> Vec<_> {
            o.members()
                .iter()
                .filter(|c| o.provenance(c).is_some_and(|p| kap.contains(&p.problem_id)))
                .cloned()
                .collect()
        };
        let same_on_kappa = restricted(e) == restricted(&a);
        cx.check(
            "E: equals A on codes of kappa problems",
            same_on_kappa,
            format!("{} kappa problems", kap.len()),
        );
        let injected: Vec<&GateRecord> = built
            .gates
            .iter()
            .filter(|g| g.injected.is_some())
            .collect();
        cx.check(
            "E: some problem outside kappa receives an injected code",
            injected.iter().any(|g| !g.in_kappa),
            format!(
                "injected for {:?}",
                injected.iter().map(|g| g.problem_id).collect::<Vec<_>>()
            ),
        );
        let in_kappa: Vec<bool> = corpus
            .problems()
            .iter()
            .map(|f| kap.contains(&f.id))
            .collect();
        let runs = over(&corpus, &truth, &all, |f, _, t| {
            Ok(solve_with_a(f, e)?.labeled("E").with_ground_truth(t))
        })?;
        let kappa_wrong: Vec<&RunResult> = runs
            .iter()
            .filter(|r| in_kappa[r.formula_id as usize - 1] && r.is_wrong())
            .collect();
        cx.check(
            "E: deterministic verdicts on kappa problems all correct",
            kappa_wrong.is_empty(),
            describe_failures(&kappa_wrong),
        );
        let misled: Vec<String> = runs.iter().filter(|r| r.is_wrong()).map(run_id).collect();
        cx.conclusion(
            "E",
            "behaves as A on kappa and misleads the deterministic solver elsewhere",
            "dysfunctional",
            same_on_kappa && kappa_wrong.is_empty() && !misled.is_empty(),
            misled,
        );
        e_gates = built.gates;
        cx.runs.extend(runs);
    }

    if wants(OracleKind::F) {
        let f_set = build_f(&corpus)?;
        let np = over(&corpus, &truth, &all, |f, _, t| {
            Ok(solve_with_a(f, &TaggedView::new(&f_set, false))?
                .labeled("F:np")
                .with_ground_truth(t))
        })?;
        let co = over(&corpus, &truth, &all, |f, _, t| {
            Ok(solve_conp_with_c_bar(f, &TaggedView::new(&f_set, true))?
                .labeled("F:conp")
                .with_ground_truth(!t))
        })?;
        let np_bad: Vec<&RunResult> = np
            .iter()
            .filter(|r| r.correct != Some(true) || r.queries > r.k as u64 + 1)
            .collect();
        let co_bad: Vec<&RunResult> = co
            .iter()
            .filter(|r| r.correct != Some(true) || r.queries != 1)
            .collect();
        cx.check(
            "F: NP side correct within k+1 queries",
            np_bad.is_empty(),
            describe_failures(&np_bad),
        );
        cx.check(
            "F: co-NP side correct with one query",
            co_bad.is_empty(),
            describe_failures(&co_bad),
        );
        let mut evidence: Vec<String> = np.iter().map(run_id).collect();
        evidence.extend(co.iter().map(run_id));
        cx.conclusion(
            "F",
            "both the problem and its complement are decided in polynomially many queries",
            "functional",
            np_bad.is_empty() && co_bad.is_empty(),
            evidence,
        );
        cx.runs.extend(np);
        cx.runs.extend(co);
    }

    for b in &cx.conclusions {
        if b.evidence.is_empty() {
            cx.checks.push(Check {
                name: format!("{}: conclusion has evidence", b.oracle),
                passed: false,
                detail: "no supporting runs".into(),
            });
        }
    }

    let aggregate = run_report(&cx.runs);
    Ok(SuiteReport {
        corpus_hash: corpus.hash(),
        d_corpus_hash: d_corpus.hash(),
        corpus_size: corpus.len(),
        budget_skipped,
        checks: cx.checks,
        conclusions: cx.conclusions,
        e_gates,
        runs: cx.runs,
        aggregate,
    })
}
