//! Oracle machines.
//!
//! A machine passes codes to an oracle through an [`OracleSession`], which
//! answers membership and records every query. Steps count input sets
//! examined (or loop iterations for the partition solver), never tape moves;
//! a query costs one step of its own and is reported separately.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::encoding::{self, godel_number, input_code, partition_code_with, GodelNumber};
use crate::error::{Error, Result};
use crate::formula::{enumeration_cap, exhaustive_search, true_count, Assignment, Problem};

/// Polynomial step allowance `p(n) = coefficient · n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub coefficient: u64,
    pub exponent: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            coefficient: 2,
            exponent: 2,
        }
    }
}

impl Budget {
    pub const fn new(coefficient: u64, exponent: u32) -> Self {
        Budget {
            coefficient,
            exponent,
        }
    }

    /// `p(n)`, saturating at `u128::MAX`.
    pub fn allowance(&self, n: u64) -> u128 {
        (n as u128)
            .checked_pow(self.exponent)
            .and_then(|v| v.checked_mul(self.coefficient as u128))
            .unwrap_or(u128::MAX)
    }

    /// Exact `p(n)` for arguments too large for [`Budget::allowance`].
    pub fn allowance_big(&self, n: &BigUint) -> BigUint {
        n.pow(self.exponent) * self.coefficient
    }

    /// `p(k) < 2^k`: exhaustive search does not fit in the budget.
    pub fn below_exhaustive(&self, k: usize) -> bool {
        match 1u128.checked_shl(k as u32) {
            Some(space) if k < 128 => self.allowance(k as u64) < space,
            _ => true,
        }
    }

    /// Number of input sets a budgeted search over width `k` examines.
    pub fn examinable(&self, k: usize) -> usize {
        let space = 1u128 << k;
        self.allowance(k as u64).min(space) as usize
    }
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}·n^{}", self.coefficient, self.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    #[serde(with = "encoding::decimal")]
    pub code: BigUint,
    pub answer: bool,
}

/// One solver run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    /// Which oracle (or machine) the run used, e.g. `A`, `B`, `ND`, `F:conp`.
    pub oracle: String,
    pub formula_id: u64,
    pub k: usize,
    pub verdict: Verdict,
    /// Model-level cost: input sets examined, or loop iterations.
    pub steps: u64,
    pub queries: u64,
    /// Work actually spent simulating the run (differs from `steps` only
    /// for the nondeterministic machine).
    pub simulated_work: u64,
    pub transcript: Vec<QueryRecord>,
    pub ground_truth: Option<bool>,
    pub correct: Option<bool>,
}

impl RunResult {
    fn new<P: Problem + ?Sized>(
        oracle: &str,
        p: &P,
        verdict: Verdict,
        steps: u64,
        session: OracleSession<'_>,
    ) -> Self {
        let transcript = session.into_transcript();
        RunResult {
            oracle: oracle.to_string(),
            formula_id: p.id(),
            k: p.width(),
            verdict,
            steps,
            queries: transcript.len() as u64,
            simulated_work: steps,
            transcript,
            ground_truth: None,
            correct: None,
        }
    }

    /// Records the true answer to the question this run decides.
    pub fn with_ground_truth(mut self, truth: bool) -> Self {
        self.ground_truth = Some(truth);
        self.correct = Some(self.verdict.accepted() == truth);
        self
    }

    pub fn labeled(mut self, oracle: impl Into<String>) -> Self {
        self.oracle = oracle.into();
        self
    }

    /// Codes in the transcript the oracle answered yes to.
    pub fn accepted_codes(&self) -> impl Iterator<Item = &BigUint> {
        self.transcript.iter().filter(|q| q.answer).map(|q| &q.code)
    }

    pub fn is_wrong(&self) -> bool {
        self.correct == Some(false)
    }
}

/// Membership interface of an oracle set.
pub trait Membership {
    fn contains(&self, code: &BigUint) -> bool;

    /// Whether the set was built over a corpus containing this problem.
    fn covers(&self, _problem_id: u64, _godel: &GodelNumber) -> bool {
        true
    }
}

impl Membership for BTreeSet<BigUint> {
    fn contains(&self, code: &BigUint) -> bool {
        BTreeSet::contains(self, code)
    }
}

impl<M: Membership + ?Sized> Membership for &M {
    fn contains(&self, code: &BigUint) -> bool {
        (**self).contains(code)
    }

    fn covers(&self, problem_id: u64, godel: &GodelNumber) -> bool {
        (**self).covers(problem_id, godel)
    }
}

/// The half of a tagged union selected by `tag`: a query for `c` is
/// answered by asking the underlying set about `pair(tag, c)`.
pub struct TaggedView<'a, M: ?Sized> {
    inner: &'a M,
    tag: bool,
}

impl<'a, M: Membership + ?Sized> TaggedView<'a, M> {
    pub fn new(inner: &'a M, tag: bool) -> Self {
        TaggedView { inner, tag }
    }
}

impl<M: Membership + ?Sized> Membership for TaggedView<'_, M> {
    fn contains(&self, code: &BigUint) -> bool {
        self.inner.contains(&encoding::tag(self.tag, code))
    }

    fn covers(&self, problem_id: u64, godel: &GodelNumber) -> bool {
        self.inner.covers(problem_id, godel)
    }
}

/// The query state: passes codes to the oracle and keeps the transcript.
pub struct OracleSession<'a> {
    oracle: Option<&'a dyn Membership>,
    transcript: Vec<QueryRecord>,
}

impl<'a> OracleSession<'a> {
    pub fn new(oracle: &'a dyn Membership) -> Self {
        OracleSession {
            oracle: Some(oracle),
            transcript: Vec::new(),
        }
    }

    /// A session with no oracle attached; any query is a logic error.
    pub fn detached() -> Self {
        OracleSession {
            oracle: None,
            transcript: Vec::new(),
        }
    }

    pub fn query(&mut self, code: BigUint) -> bool {
        let answer = self
            .oracle
            .expect("query issued by a machine without an oracle")
            .contains(&code);
        self.transcript.push(QueryRecord { code, answer });
        answer
    }

    pub fn queries(&self) -> usize {
        self.transcript.len()
    }

    pub fn into_transcript(self) -> Vec<QueryRecord> {
        self.transcript
    }
}

fn require_coverage<P: Problem + ?Sized>(oracle: &dyn Membership, p: &P) -> Result<GodelNumber> {
    let godel = godel_number(p);
    if !oracle.covers(p.id(), &godel) {
        return Err(Error::Config(format!(
            "oracle was not built over a corpus containing problem {}",
            p.id()
        )));
    }
    Ok(godel)
}

/// Nondeterministic machine: explores every branch at once, so its model
/// cost is one step; the exhaustive simulation effort goes in
/// `simulated_work`. It never enters the query state.
pub fn nd_solve<P: Problem + ?Sized>(p: &P, _budget: Budget) -> Result<RunResult> {
    let verdict = exhaustive_search(p, enumeration_cap())?;
    let work = match &verdict.witness {
        Some(w) => w.index() as u64 + 1,
        None => verdict.assignments_examined,
    };
    let mut run = RunResult::new(
        "ND",
        p,
        Verdict::from_bool(verdict.satisfiable),
        1,
        OracleSession::detached(),
    );
    run.simulated_work = work;
    Ok(run)
}

/// Partition-query solver: asks for `⟨e, g⟩` with `e = 0, 1, …, k` and
/// accepts on the first yes. At most `k + 1` queries.
pub fn solve_with_a<P: Problem + ?Sized>(p: &P, oracle: &dyn Membership) -> Result<RunResult> {
    let godel = require_coverage(oracle, p)?;
    let mut session = OracleSession::new(oracle);
    let mut steps = 0;
    let mut accepted = false;
    for e in 0..=p.width() {
        steps += 1;
        if session.query(partition_code_with(&godel, e).code) {
            accepted = true;
            break;
        }
    }
    Ok(RunResult::new(
        "A",
        p,
        Verdict::from_bool(accepted),
        steps,
        session,
    ))
}

/// Outcome of the budgeted local search shared by several machines.
enum Search {
    Found { examined: usize },
    Exhausted { examined: usize },
    OutOfBudget { examined: usize, next: Assignment },
}

fn budgeted_search<P: Problem + ?Sized>(p: &P, budget: Budget) -> Result<Search> {
    let limit = budget.examinable(p.width());
    let mut inputs = p.inputs(enumeration_cap())?;
    let mut examined = 0;
    while examined < limit {
        let a = inputs.next().expect("limit never exceeds 2^k");
        examined += 1;
        if p.accepts(&a) {
            return Ok(Search::Found { examined });
        }
    }
    Ok(match inputs.next() {
        Some(next) => Search::OutOfBudget { examined, next },
        None => Search::Exhausted { examined },
    })
}

/// Padding used for every input code: the input-set length.
pub fn padding_for<P: Problem + ?Sized>(p: &P) -> u64 {
    p.width() as u64
}

/// The input code a machine passes for `a` when working on `p`.
pub fn input_code_for<P: Problem + ?Sized>(p: &P, a: &Assignment) -> BigUint {
    input_code(p.id(), a, padding_for(p)).code
}

/// Budgeted deterministic search. Examines input sets in canonical order up
/// to `p(k)`; if that runs out before the space does, passes the next
/// unexamined input set to the oracle and adopts its answer.
pub fn solve_with_b<P: Problem + ?Sized>(
    p: &P,
    oracle: &dyn Membership,
    budget: Budget,
) -> Result<RunResult> {
    let mut session = OracleSession::new(oracle);
    let (verdict, steps) = match budgeted_search(p, budget)? {
        Search::Found { examined } => (true, examined),
        Search::Exhausted { examined } => (false, examined),
        Search::OutOfBudget { examined, next } => {
            (session.query(input_code_for(p, &next)), examined)
        }
    };
    Ok(RunResult::new(
        "B",
        p,
        Verdict::from_bool(verdict),
        steps as u64,
        session,
    ))
}

/// Passes every input set to the oracle in canonical order and accepts on
/// the first yes. Up to `2^k` queries.
pub fn solve_with_c<P: Problem + ?Sized>(p: &P, oracle: &dyn Membership) -> Result<RunResult> {
    require_coverage(oracle, p)?;
    let mut session = OracleSession::new(oracle);
    let mut steps = 0;
    let mut accepted = false;
    for a in p.inputs(enumeration_cap())? {
        steps += 1;
        if session.query(input_code_for(p, &a)) {
            accepted = true;
            break;
        }
    }
    Ok(RunResult::new(
        "C",
        p,
        Verdict::from_bool(accepted),
        steps,
        session,
    ))
}

/// Decides the complement problem (accept ⇔ `p` has no accepting input
/// set) with exactly one query: the code of the first canonical input set.
pub fn solve_conp_with_c_bar<P: Problem + ?Sized>(
    p: &P,
    oracle: &dyn Membership,
) -> Result<RunResult> {
    require_coverage(oracle, p)?;
    let mut session = OracleSession::new(oracle);
    let first = Assignment::from_index(0, p.width());
    let accepted = session.query(input_code_for(p, &first));
    Ok(RunResult::new(
        "C_bar",
        p,
        Verdict::from_bool(accepted),
        1,
        session,
    ))
}

/// Budgeted deterministic machine for the complement problem: a witness
/// found within `p(k)` refutes it, a fully searched space confirms it,
/// otherwise the oracle decides on the next unexamined input set.
pub fn solve_conp_with_budget<P: Problem + ?Sized>(
    p: &P,
    oracle: &dyn Membership,
    budget: Budget,
) -> Result<RunResult> {
    let mut session = OracleSession::new(oracle);
    let (verdict, steps) = match budgeted_search(p, budget)? {
        Search::Found { examined } => (false, examined),
        Search::Exhausted { examined } => (true, examined),
        Search::OutOfBudget { examined, next } => {
            (session.query(input_code_for(p, &next)), examined)
        }
    };
    Ok(RunResult::new(
        "conp",
        p,
        Verdict::from_bool(verdict),
        steps as u64,
        session,
    ))
}

/// Budgeted search that falls back on a partition query: after `p(k)`
/// input sets, asks the oracle about the partition of the next unexamined
/// one. The returned code is that partition code, when a query was made.
pub fn solve_with_partition_probe<P: Problem + ?Sized>(
    p: &P,
    oracle: &dyn Membership,
    budget: Budget,
) -> Result<(RunResult, Option<BigUint>)> {
    let godel = godel_number(p);
    let mut session = OracleSession::new(oracle);
    let mut probed = None;
    let (verdict, steps) = match budgeted_search(p, budget)? {
        Search::Found { examined } => (true, examined),
        Search::Exhausted { examined } => (false, examined),
        Search::OutOfBudget { examined, next } => {
            let code = partition_code_with(&godel, true_count(&next)).code;
            probed = Some(code.clone());
            (session.query(code), examined)
        }
    };
    Ok((
        RunResult::new(
            "probe",
            p,
            Verdict::from_bool(verdict),
            steps as u64,
            session,
        ),
        probed,
    ))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleStats {
    pub runs: usize,
    pub checked: usize,
    pub correct: usize,
    pub incorrect: usize,
    pub total_queries: u64,
    pub max_queries_by_k: BTreeMap<usize, u64>,
}

impl OracleStats {
    /// Fraction of checked runs that were correct; `None` if nothing was
    /// checked.
    pub fn correctness_rate(&self) -> Option<f64> {
        (self.checked > 0).then(|| self.correct as f64 / self.checked as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub oracle: String,
    pub formula_id: u64,
    pub k: usize,
    pub verdict: Verdict,
    pub steps: u64,
    pub queries: u64,
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub total_runs: usize,
    pub checked: usize,
    pub incorrect: usize,
    pub total_queries: u64,
    pub max_queries_by_k: BTreeMap<usize, u64>,
    pub per_oracle: BTreeMap<String, OracleStats>,
    pub rows: Vec<ReportRow>,
}

impl AggregateReport {
    /// CSV with columns oracle, formula_id, k, verdict, steps, queries,
    /// correct. Unchecked runs leave `correct` empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "oracle",
            "formula_id",
            "k",
            "verdict",
            "steps",
            "queries",
            "correct",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.oracle.clone(),
                r.formula_id.to_string(),
                r.k.to_string(),
                r.verdict.to_string(),
                r.steps.to_string(),
                r.queries.to_string(),
                r.correct.map(|c| c.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_report(results: &[RunResult]) -> AggregateReport {
    let mut report = AggregateReport::default();
    for r in results {
        report.total_runs += 1;
        report.total_queries += r.queries;
        let stats = report.per_oracle.entry(r.oracle.clone()).or_default();
        stats.runs += 1;
        stats.total_queries += r.queries;
        if let Some(ok) = r.correct {
            report.checked += 1;
            stats.checked += 1;
            if ok {
                stats.correct += 1;
            } else {
                stats.incorrect += 1;
                report.incorrect += 1;
            }
        }
        for map in [&mut stats.max_queries_by_k, &mut report.max_queries_by_k] {
            let slot = map.entry(r.k).or_insert(0);
            *slot = (*slot).max(r.queries);
        }
        report.rows.push(ReportRow {
            oracle: r.oracle.clone(),
            formula_id: r.formula_id,
            k: r.k,
            verdict: r.verdict,
            steps: r.steps,
            queries: r.queries,
            correct: r.correct,
        });
    }
    report
}

/// One JSON object per line.
pub fn write_runs_jsonl<W: Write>(results: &[RunResult], mut out: W) -> Result<()> {
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
