//! The set-sum analog: a problem that is plainly polynomial, treated as if
//! its only known algorithm were the exponential subset enumeration, plus
//! the oracle battery run over it with the same constructions used for SAT.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::pair_u64;
use crate::error::{Error, Result};
use crate::formula::{enumeration_cap, Assignment, Problem};
use crate::machine::{
    nd_solve, solve_conp_with_budget, solve_conp_with_c_bar, solve_with_a, solve_with_b,
    solve_with_c, Budget, Membership, OracleSession, RunResult, TaggedView, Verdict,
};
use crate::oracles::{
    build_b, build_c, build_c_bar, build_d, build_f, Corpus, OracleKind, OracleSet,
};

/// Does `Σ S_i = M`? Values are exact integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct SetSumInstance {
    /// Position in the instance list, from 1. Not serialized.
    #[serde(skip)]
    pub id: u64,
    #[serde(rename = "S")]
    pub values: Vec<i64>,
    #[serde(rename = "M")]
    pub target: i64,
}

#[derive(Deserialize)]
struct RawInstance {
    #[serde(rename = "S")]
    values: Vec<i64>,
    #[serde(rename = "M")]
    target: i64,
}

impl TryFrom<RawInstance> for SetSumInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        SetSumInstance::new(0, raw.values, raw.target)
    }
}

impl SetSumInstance {
    pub fn new(id: u64, values: Vec<i64>, target: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain(
                "a set-sum instance needs at least one value".into(),
            ));
        }
        Ok(SetSumInstance { id, values, target })
    }

    pub fn r(&self) -> usize {
        self.values.len()
    }

    fn full_sum(&self) -> i128 {
        self.values.iter().map(|&v| v as i128).sum()
    }

    /// Work of the direct algorithm: one addition per element.
    pub fn direct_work(&self) -> u64 {
        self.r() as u64
    }
}

impl Problem for SetSumInstance {
    fn id(&self) -> u64 {
        self.id
    }

    fn width(&self) -> usize {
        self.r()
    }

    /// Only the subset containing every element can evaluate true.
    fn accepts(&self, subset: &Assignment) -> bool {
        subset.values.iter().all(|&b| b) && self.full_sum() == self.target as i128
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        let body: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("setsum:{}={}", body.join(","), self.target).into_bytes()
    }
}

pub fn set_sum_direct(inst: &SetSumInstance) -> bool {
    inst.full_sum() == inst.target as i128
}

/// Sums every subset in canonical order and answers from the full one.
/// Returns the verdict and the number of subsets examined (always `2^r`).
pub fn set_sum_naive(inst: &SetSumInstance) -> Result<(bool, u64)> {
    let mut verdict = false;
    let mut examined = 0u64;
    for subset in inst.inputs(enumeration_cap())? {
        examined += 1;
        let sum: i128 = subset
            .values
            .iter()
            .zip(&inst.values)
            .filter(|(&chosen, _)| chosen)
            .map(|(_, &v)| v as i128)
            .sum();
        if subset.values.iter().all(|&b| b) {
            verdict = sum == inst.target as i128;
        }
    }
    Ok((verdict, examined))
}

/// Renumbers instances `1..=n` in list order.
pub fn with_ids(instances: &[SetSumInstance]) -> Vec<SetSumInstance> {
    instances
        .iter()
        .enumerate()
        .map(|(i, inst)| SetSumInstance {
            id: i as u64 + 1,
            ..inst.clone()
        })
        .collect()
}

pub fn load_instances(text: &str) -> Result<Vec<SetSumInstance>> {
    let raw: Vec<SetSumInstance> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(with_ids(&raw))
}

/// Seeded instances with `r` in `1..=max_r`; roughly half have `M` equal to
/// the full sum.
pub fn gen_instances(seed: u64, count: usize, max_r: usize) -> Vec<SetSumInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<SetSumInstance> = (0..count)
        .map(|_| {
            let r = rng.gen_range(1..=max_r.max(1));
            let values: Vec<i64> = (0..r).map(|_| rng.gen_range(-50..=50)).collect();
            let sum: i64 = values.iter().sum();
            let target = if rng.gen_bool(0.5) {
                sum
            } else {
                sum + if rng.gen_bool(0.5) { 1 } else { -1 } * rng.gen_range(1..=20)
            };
            SetSumInstance {
                id: 0,
                values,
                target,
            }
        })
        .collect();
    with_ids(&raw)
}

/// The analog class registries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRegistry {
    pub np_lambda: BTreeSet<String>,
    pub p_lambda: BTreeSet<String>,
}

pub const SET_SUM: &str = "set-sum";

impl ClassRegistry {
    /// NP_Λ holds a sample of problems known to be in P; P_Λ holds all of
    /// them except set-sum.
    pub fn analog() -> Self {
        let np_lambda: BTreeSet<String> = [
            SET_SUM,
            "2-sat",
            "graph-connectivity",
            "primality",
            "shortest-path",
            "sorting",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        let p_lambda = np_lambda
            .iter()
            .filter(|p| *p != SET_SUM)
            .cloned()
            .collect();
        ClassRegistry {
            np_lambda,
            p_lambda,
        }
    }

    /// Admits a problem of NP_Λ to P_Λ once a polynomial algorithm is in
    /// hand. Returns whether it was newly admitted.
    pub fn admit(&mut self, problem: &str) -> bool {
        self.np_lambda.contains(problem) && self.p_lambda.insert(problem.to_string())
    }

    pub fn classes_equal(&self) -> bool {
        self.np_lambda == self.p_lambda
    }
}

/// Members `pair(id, 1)` for every instance whose equality holds.
pub fn build_lambda_oracle(corpus: &Corpus<SetSumInstance>) -> OracleSet {
    let mut set = OracleSet::empty(OracleKind::A, corpus);
    for inst in corpus.problems() {
        if set_sum_direct(inst) {
            set.insert(pair_u64(inst.id, 1), inst.id, "lambda oracle");
        }
    }
    set
}

/// The one-query solver against [`build_lambda_oracle`].
pub fn solve_with_lambda_oracle(inst: &SetSumInstance, oracle: &dyn Membership) -> RunResult {
    let mut session = OracleSession::new(oracle);
    let accept = session.query(pair_u64(inst.id, 1));
    RunResult {
        oracle: "lambda:A".into(),
        formula_id: inst.id,
        k: inst.r(),
        verdict: Verdict::from_bool(accept),
        steps: 1,
        queries: 1,
        simulated_work: 1,
        transcript: session.into_transcript(),
        ground_truth: None,
        correct: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRow {
    pub question: String,
    pub oracle: String,
    pub demonstrated: bool,
    /// Ids (`oracle:instance`) of the runs backing the row.
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    /// Every instance solved directly with work `≤ r`.
    pub direct_within_r: bool,
    /// Direct and naive verdicts agree on every instance.
    pub naive_agrees: bool,
    pub max_naive_work: u64,
    pub registry: ClassRegistry,
    pub p_equals_np: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaReport {
    pub rows: Vec<LambdaRow>,
    pub resolution: Resolution,
    /// Instances left out of the D run because they could not be placed at
    /// a stage of matching parity.
    pub d_dropped: usize,
    pub note: String,
    #[serde(skip)]
    pub runs: Vec<RunResult>,
}

fn run_id(r: &RunResult) -> String {
    format!("{}:{}", r.oracle, r.formula_id)
}

/// Orders instances so that every even stage has even width: widths
/// ascending, odd stages prefer odd widths. Instances that cannot be placed
/// are dropped and counted.
pub fn arrange_for_d(instances: &[SetSumInstance]) -> (Vec<SetSumInstance>, usize) {
    let mut odd: Vec<_> = instances
        .iter()
        .filter(|i| i.r() % 2 == 1)
        .cloned()
        .collect();
    let mut even: Vec<_> = instances
        .iter()
        .filter(|i| i.r() % 2 == 0)
        .cloned()
        .collect();
    odd.sort_by_key(|i| i.r());
    even.sort_by_key(|i| i.r());
    let (mut odd, mut even) = (odd.into_iter().peekable(), even.into_iter().peekable());
    let mut out = Vec::new();
    loop {
        let stage = out.len() + 1;
        let next = if stage % 2 == 0 {
            even.next()
        } else {
            odd.next().or_else(|| even.next())
        };
        match next {
            Some(i) => out.push(i),
            None => break,
        }
    }
    let dropped = instances.len() - out.len();
    (with_ids(&out), dropped)
}

/// Runs the five-question battery over the analog classes.
pub fn lambda_report(
    instances: &[SetSumInstance],
    budget: Budget,
    d_budget: Budget,
) -> Result<LambdaReport> {
    let note = "the analog battery covers the A, B, C, D and F questions; no E analog is posed"
        .to_string();
    let instances = with_ids(instances);
    let mut registry = ClassRegistry::analog();
    if instances.is_empty() {
        return Ok(LambdaReport {
            rows: Vec::new(),
            resolution: Resolution {
                direct_within_r: true,
                naive_agrees: true,
                max_naive_work: 0,
                registry,
                p_equals_np: false,
            },
            d_dropped: 0,
            note,
            runs: Vec::new(),
        });
    }
    let corpus = Corpus::uniform(instances.clone(), budget)?;
    let mut runs = Vec::new();
    let mut rows = Vec::new();

    let nd: Vec<RunResult> = instances
        .iter()
        .map(|i| nd_solve(i, budget).map(|r| r.with_ground_truth(set_sum_direct(i))))
        .collect::<Result<_>>()?;
    let nd_ok = nd.iter().all(|r| r.correct == Some(true) && r.queries == 0);
    runs.extend(nd.iter().cloned());

    // A: functional oracle, one query per instance.
    let lambda_a = build_lambda_oracle(&corpus);
    let a_runs: Vec<RunResult> = instances
        .iter()
        .map(|i| solve_with_lambda_oracle(i, &lambda_a).with_ground_truth(set_sum_direct(i)))
        .collect();
    rows.push(LambdaRow {
        question: "P_Λ^A = NP_Λ^A".into(),
        oracle: "A".into(),
        demonstrated: nd_ok
            && a_runs
                .iter()
                .all(|r| r.correct == Some(true) && r.queries == 1),
        evidence: a_runs.iter().map(run_id).collect(),
    });
    runs.extend(a_runs);

    // B: the staged dysfunctional construction.
    let b = build_b(&corpus)?;
    let b_runs: Vec<RunResult> = instances
        .iter()
        .zip(corpus.budgets())
        .map(|(i, &bud)| {
            solve_with_b(i, &b, bud)
                .map(|r| r.labeled("lambda:B").with_ground_truth(set_sum_direct(i)))
        })
        .collect::<Result<_>>()?;
    let b_wrong: Vec<String> = b_runs.iter().filter(|r| r.is_wrong()).map(run_id).collect();
    rows.push(LambdaRow {
        question: "P_Λ^B ≠ NP_Λ^B".into(),
        oracle: "B".into(),
        demonstrated: nd_ok && !b_wrong.is_empty(),
        evidence: b_wrong,
    });
    runs.extend(b_runs);

    // C / C̄: exponential NP side, one-query complement side.
    let c = build_c(&corpus)?;
    let c_bar = build_c_bar(&corpus)?;
    let mut c_evidence = Vec::new();
    let mut exponential = false;
    let mut conp_ok = true;
    for (inst, &bud) in instances.iter().zip(corpus.budgets()) {
        let truth = set_sum_direct(inst);
        let rc = solve_with_c(inst, &c)?
            .labeled("lambda:C")
            .with_ground_truth(truth);
        if rc.queries == 1u64 << inst.r() && bud.below_exhaustive(inst.r()) {
            exponential = true;
            c_evidence.push(run_id(&rc));
        }
        let rbar = solve_conp_with_c_bar(inst, &c_bar)?
            .labeled("lambda:C_bar")
            .with_ground_truth(!truth);
        conp_ok &= rbar.correct == Some(true) && rbar.queries == 1;
        runs.push(rc);
        runs.push(rbar);
    }
    rows.push(LambdaRow {
        question: "NP_Λ^C not closed under complementation".into(),
        oracle: "C".into(),
        demonstrated: exponential && conp_ok,
        evidence: c_evidence,
    });

    // D / D̄: both sides mislead the deterministic machines while the
    // nondeterministic machine decides the problem and its complement.
    let (arranged, d_dropped) = arrange_for_d(&instances);
    let d_corpus = Corpus::uniform(arranged.clone(), d_budget)?;
    let (d, d_bar) = build_d(&d_corpus)?;
    let mut d_evidence = Vec::new();
    let (mut d_wrong, mut dbar_wrong) = (false, false);
    for inst in &arranged {
        let truth = set_sum_direct(inst);
        let rd = solve_with_b(inst, &d, d_budget)?
            .labeled("lambda:D")
            .with_ground_truth(truth);
        if rd.is_wrong() && rd.accepted_codes().any(|c| d.provenance(c).is_some()) {
            d_wrong = true;
            d_evidence.push(run_id(&rd));
        }
        let rbar = solve_conp_with_budget(inst, &d_bar, d_budget)?
            .labeled("lambda:D_bar")
            .with_ground_truth(!truth);
        if rbar.is_wrong() && rbar.accepted_codes().any(|c| d_bar.provenance(c).is_some()) {
            dbar_wrong = true;
            d_evidence.push(run_id(&rbar));
        }
        runs.push(rd);
        runs.push(rbar);
    }
    rows.push(LambdaRow {
        question: "P_Λ^D ≠ NP_Λ^D, NP_Λ^D closed under complementation".into(),
        oracle: "D".into(),
        demonstrated: nd_ok && d_wrong && dbar_wrong,
        evidence: d_evidence,
    });

    // F: both sides polynomial and correct.
    let f = build_f(&corpus)?;
    let mut f_ok = true;
    let mut f_evidence = Vec::new();
    for inst in &instances {
        let truth = set_sum_direct(inst);
        let np = solve_with_a(inst, &TaggedView::new(&f, false))?
            .labeled("lambda:F:np")
            .with_ground_truth(truth);
        let co = solve_conp_with_c_bar(inst, &TaggedView::new(&f, true))?
            .labeled("lambda:F:conp")
            .with_ground_truth(!truth);
        f_ok &= np.correct == Some(true) && np.queries as usize <= inst.r() + 1;
        f_ok &= co.correct == Some(true) && co.queries == 1;
        f_evidence.push(run_id(&np));
        f_evidence.push(run_id(&co));
        runs.push(np);
        runs.push(co);
    }
    rows.push(LambdaRow {
        question: "P_Λ^F ⊆ NP_Λ^F ∩ co-NP_Λ^F ⊆ NP_Λ".into(),
        oracle: "F".into(),
        demonstrated: f_ok,
        evidence: f_evidence,
    });

    // Resolution without any oracle.
    let mut direct_within_r = true;
    let mut naive_agrees = true;
    let mut max_naive_work = 0;
    for inst in &instances {
        direct_within_r &= inst.direct_work() <= inst.r() as u64;
        let (naive, work) = set_sum_naive(inst)?;
        naive_agrees &= naive == set_sum_direct(inst);
        max_naive_work = max_naive_work.max(work);
    }
    if direct_within_r && naive_agrees {
        registry.admit(SET_SUM);
    }
    let p_equals_np = registry.classes_equal();

    Ok(LambdaReport {
        rows,
        resolution: Resolution {
            direct_within_r,
            naive_agrees,
            max_naive_work,
            registry,
            p_equals_np,
        },
        d_dropped,
        note,
        runs,
    })
}

impl LambdaReport {
    pub fn all_demonstrated(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.demonstrated)
    }

    /// CSV with columns question, oracle, demonstrated, evidence (run ids
    /// joined by `;`).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["question", "oracle", "demonstrated", "evidence"])?;
        for row in &self.rows {
            w.write_record([
                row.question.as_str(),
                row.oracle.as_str(),
                if row.demonstrated { "yes" } else { "no" },
                row.evidence.join(";").as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .rows
            .iter()
            .map(|r| r.question.chars().count())
            .max()
            .unwrap_or(8)
            .max(8);
        out.push_str(&format!(
            "{:<width$}  {:<6}  {:<12}  {}\n",
            "question", "oracle", "demonstrated", "runs"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:<6}  {:<12}  {}\n",
                row.question,
                row.oracle,
                if row.demonstrated { "yes" } else { "no" },
                row.evidence.len()
            ));
        }
        let res = &self.resolution;
        out.push_str(&format!(
            "direct solver within r steps: {}; naive agrees: {}; P_Λ = NP_Λ: {}\n",
            res.direct_within_r, res.naive_agrees, res.p_equals_np
        ));
        out.push_str(&format!("note: {}\n", self.note));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(values: &[i64], target: i64) -> SetSumInstance {
        SetSumInstance::new(1, values.to_vec(), target).unwrap()
    }

    #[test]
    fn direct_examples() {
        assert!(set_sum_direct(&inst(&[1, 2, 3], 6)));
        assert!(!set_sum_direct(&inst(&[1, 2, 3], 5)));
        assert!(set_sum_direct(&inst(&[0], 0)));
        assert!(SetSumInstance::new(1, vec![], 0).is_err());
    }

    #[test]
    fn naive_examples() {
        assert_eq!(set_sum_naive(&inst(&[1, 2, 3], 6)).unwrap(), (true, 8));
        assert_eq!(set_sum_naive(&inst(&[1, 2, 3], 5)).unwrap(), (false, 8));
    }

    #[test]
    fn large_values_do_not_overflow() {
        let i = inst(&[i64::MAX, i64::MAX, i64::MIN], i64::MAX - 1);
        assert!(set_sum_direct(&i));
        assert!(set_sum_naive(&i).unwrap().0);
    }

    #[test]
    fn json_shape() {
        let list = load_instances(r#"[{"S":[1,2,3],"M":6},{"S":[4],"M":1}]"#).unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list[1].id, 2);
        assert_eq!(
            serde_json::to_string(&list[0]).unwrap(),
            r#"{"S":[1,2,3],"M":6}"#
        );
        assert!(load_instances(r#"[{"S":[],"M":0}]"#).is_err());
    }

    #[test]
    fn lambda_oracle_examples() {
        let empty = Corpus::uniform(Vec::<SetSumInstance>::new(), Budget::default()).unwrap();
        assert!(build_lambda_oracle(&empty).is_empty());
        let c = Corpus::uniform(vec![inst(&[1, 2, 3], 6)], Budget::default()).unwrap();
        let o = build_lambda_oracle(&c);
        assert_eq!(o.len(), 1);
        let r = solve_with_lambda_oracle(&c.problems()[0], &o);
        assert_eq!((r.verdict, r.queries), (Verdict::Accept, 1));
    }

    #[test]
    fn registry() {
        let mut reg = ClassRegistry::analog();
        assert!(!reg.p_lambda.contains(SET_SUM));
        assert_eq!(reg.np_lambda.len(), reg.p_lambda.len() + 1);
        assert!(!reg.admit("knapsack"));
        assert!(reg.admit(SET_SUM));
        assert!(reg.classes_equal());
    }

    #[test]
    fn empty_battery() {
        let report = lambda_report(&[], Budget::default(), Budget::new(1, 1)).unwrap();
        assert!(report.rows.is_empty());
        assert!(!report.all_demonstrated());
    }

    #[test]
    fn arrangement_respects_parity() {
        let list = gen_instances(7, 30, 12);
        let (arranged, dropped) = arrange_for_d(&list);
        assert_eq!(arranged.len() + dropped, 30);
        for (pos, i) in arranged.iter().enumerate() {
            assert_eq!(i.id, pos as u64 + 1);
            if (pos + 1) % 2 == 0 {
                assert_eq!(i.r() % 2, 0);
            }
        }
    }

    #[test]
    fn table_and_csv() {
        let report = lambda_report(
            &gen_instances(3, 12, 8),
            Budget::default(),
            Budget::new(1, 1),
        )
        .unwrap();
        let table = report.to_table();
        assert!(table.starts_with("question"));
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 6);
    }
}
