use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{tagged, Corpus, OracleKind, OracleSet};
use crate::encoding::{decode_input, godel_number, partition_code_with};
use crate::error::{Error, Result};
use crate::formula::{enumeration_cap, exhaustive_search, true_count, Assignment, Problem};
use crate::machine::{
    input_code_for, nd_solve, solve_with_b, solve_with_partition_probe, Budget, Verdict,
};

pub const STEP_A: &str = "build_A step 3";
pub const STEP_B: &str = "build_B step 2";
pub const STEP_C: &str = "build_C step 2";
pub const STEP_C_BAR: &str = "build_C_bar step 2";
pub const STEP_D_PREFIX: &str = "build_D step 5";
pub const STEP_D_QUERIED: &str = "build_D step 8 (queried)";
pub const STEP_D_UNQUERIED: &str = "build_D step 8 (next unqueried)";
pub const STEP_E_INJECT: &str = "build_E step 7";
pub const STEP_F_NP: &str = "build_F np side";
pub const STEP_F_CONP: &str = "build_F conp side";

fn nd_rejects<P: Problem + ?Sized>(p: &P) -> Result<bool> {
    Ok(nd_solve(p, Budget::default())?.verdict == Verdict::Reject)
}

/// Every partition `⟨t, g⟩` of every problem that holds at least one
/// accepting input set.
pub fn build_a<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<OracleSet> {
    let mut set = OracleSet::empty(OracleKind::A, corpus);
    for p in corpus.problems() {
        let godel = godel_number(p);
        let mut found = vec![false; p.width() + 1];
        for a in p.inputs(enumeration_cap())? {
            let t = true_count(&a);
            if !found[t] && p.accepts(&a) {
                found[t] = true;
                set.insert(partition_code_with(&godel, t).code, p.id(), STEP_A);
            }
        }
    }
    Ok(set)
}

/// Staged: problem `i` is run through the budgeted machine against the
/// members placed so far; on rejection the next unexamined input set joins
/// the oracle whether or not it is accepting.
pub fn build_b<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<OracleSet> {
    let mut set = OracleSet::empty(OracleKind::B, corpus);
    for (p, budget) in corpus.iter() {
        let run = solve_with_b(p, &set, budget)?;
        if run.verdict == Verdict::Reject {
            let next = run.steps as usize;
            if next < 1usize << p.width() {
                let code = input_code_for(p, &Assignment::from_index(next, p.width()));
                set.insert(code, p.id(), STEP_B);
            }
        }
    }
    Ok(set)
}

/// One accepting input set (the first in canonical order) per problem the
/// nondeterministic machine accepts.
pub fn build_c<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<OracleSet> {
    let mut set = OracleSet::empty(OracleKind::C, corpus);
    for p in corpus.problems() {
        if let Some(w) = exhaustive_search(p, enumeration_cap())?.witness {
            set.insert(input_code_for(p, &w), p.id(), STEP_C);
        }
    }
    Ok(set)
}

/// Every input set of every problem the nondeterministic machine rejects.
pub fn build_c_bar<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<OracleSet> {
    let mut set = OracleSet::empty(OracleKind::CBar, corpus);
    for p in corpus.problems() {
        if nd_rejects(p)? {
            for a in p.inputs(enumeration_cap())? {
                set.insert(input_code_for(p, &a), p.id(), STEP_C_BAR);
            }
        }
    }
    Ok(set)
}

/// The interleaved D / D̄ construction.
///
/// Even stages `n` (width must be even) put an input set into D when its
/// half-length prefix is an input set of the first corpus problem of that
/// width and the nondeterministic machine rejects that problem. Odd stages,
/// gated on every D̄ member being shorter than the stage width and on
/// `p(k) < 2^((k-1)/2)`, copy the budgeted machine's queries into D̄ and, on
/// rejection, put the next input set it neither examined nor queried into D.
pub fn build_d<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<(OracleSet, OracleSet)> {
    for (pos, p) in corpus.problems().iter().enumerate() {
        if (pos + 1) % 2 == 0 && p.width() % 2 != 0 {
            return Err(Error::Config(format!(
                "stage {} (problem {}) is even but has odd width {}",
                pos + 1,
                p.id(),
                p.width()
            )));
        }
    }
    let mut d = OracleSet::empty(OracleKind::D, corpus);
    let mut dbar = OracleSet::empty(OracleKind::DBar, corpus);
    for (pos, (p, budget)) in corpus.iter().enumerate() {
        let k = p.width();
        if (pos + 1) % 2 == 0 {
            let half = k / 2;
            let feeder = corpus.problems().iter().find(|q| q.width() == half);
            let feeder_rejected = match feeder {
                Some(q) => nd_rejects(q)?,
                None => false,
            };
            if !feeder_rejected {
                continue;
            }
            for a in p.inputs(enumeration_cap())? {
                let code = input_code_for(p, &a);
                if dbar.members().contains(&code) {
                    continue;
                }
                d.insert(code, p.id(), STEP_D_PREFIX);
            }
        } else {
            let short = dbar.members().iter().all(|c| {
                decode_input(c)
                    .map(|ic| ic.assignment_bits.len() < k)
                    .unwrap_or(false)
            });
            // p(k) < 2^((k-1)/2)  ⇔  p(k)^2 < 2^(k-1)
            let pk = BigUint::from(budget.allowance(k as u64));
            let sparse = &pk * &pk < BigUint::one() << (k - 1);
            if !(short && sparse) {
                continue;
            }
            let run = solve_with_b(p, &d, budget)?;
            for q in &run.transcript {
                dbar.insert(q.code.clone(), p.id(), STEP_D_QUERIED);
            }
            if run.verdict == Verdict::Reject {
                let next = (run.steps + run.queries) as usize;
                if next < 1usize << k {
                    let code = input_code_for(p, &Assignment::from_index(next, k));
                    d.insert(code, p.id(), STEP_D_UNQUERIED);
                }
            }
        }
    }
    Ok((d, dbar))
}

/// Largest exponent for which `2^e` is materialized when testing gates.
const MAX_MATERIALIZED_EXPONENT: u64 = 1 << 16;

/// Stage cap used by [`build_e`].
pub const DEFAULT_TOWER_STAGE_CAP: u32 = 3;

/// `e(0) = 0`, `e(n) = 2^(2·e(n-1))`; `None` once the value no longer fits
/// in memory (from `n = 5`).
pub fn tower(n: u32) -> Option<BigUint> {
    let mut e = BigUint::zero();
    for _ in 0..n {
        let exp = &e * 2u32;
        if exp > BigUint::from(MAX_MATERIALIZED_EXPONENT) {
            return None;
        }
        e = BigUint::one() << u64::try_from(&exp).expect("bounded above");
    }
    Some(e)
}

fn pow2(e: &BigUint) -> Option<BigUint> {
    let e = u64::try_from(e)
        .ok()
        .filter(|&e| e <= MAX_MATERIALIZED_EXPONENT)?;
    Some(BigUint::one() << e)
}

/// Gate evaluation for one problem of the E construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateRecord {
    pub problem_id: u64,
    pub width: usize,
    /// Tower stage whose window `e(t-1) < log2 k ≤ e(t)` is checked.
    pub stage: u32,
    pub in_kappa: bool,
    pub window: bool,
    pub budget_floor: bool,
    pub budget_ceiling: bool,
    pub step5: bool,
    /// First clause that failed, in the order listed above.
    pub failed_clause: Option<&'static str>,
    pub machine_rejected: Option<bool>,
    #[serde(with = "opt_decimal")]
    pub injected: Option<BigUint>,
}

mod opt_decimal {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(n) => s.serialize_some(&n.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EConstruction {
    pub oracle: OracleSet,
    pub gates: Vec<GateRecord>,
    pub stages_completed: u32,
    /// Problem at which construction stopped because its stage exceeded the
    /// cap.
    pub halted_at: Option<u64>,
}

/// Problems whose complement (same width, negated truth table) is also in
/// the corpus.
pub fn kappa<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<BTreeSet<u64>> {
    let mut tables: HashMap<(usize, Vec<u64>), Vec<u64>> = HashMap::new();
    let mut per_problem = Vec::with_capacity(corpus.len());
    for p in corpus.problems() {
        let k = p.width();
        let mut table = vec![0u64; (1usize << k).div_ceil(64)];
        for a in p.inputs(enumeration_cap())? {
            if p.accepts(&a) {
                let e = a.index();
                table[e / 64] |= 1 << (e % 64);
            }
        }
        tables.entry((k, table.clone())).or_default().push(p.id());
        per_problem.push((p.id(), k, table));
    }
    let mut out = BTreeSet::new();
    for (id, k, table) in per_problem {
        let total = 1usize << k;
        let mut complement: Vec<u64> = table.iter().map(|w| !w).collect();
        if !total.is_multiple_of(64) {
            *complement.last_mut().expect("nonempty table") &= (1u64 << (total % 64)) - 1;
        }
        if tables.contains_key(&(k, complement)) {
            out.insert(id);
        }
    }
    Ok(out)
}

pub fn build_e<P: Problem + Serialize>(corpus: &Corpus<P>, a: &OracleSet) -> Result<OracleSet> {
    Ok(build_e_traced(corpus, a, DEFAULT_TOWER_STAGE_CAP)?.oracle)
}

/// E starts as a copy of A. For each problem the tower stage of its width
/// is located and the step 4/5 gate evaluated; a problem outside κ whose
/// gate fires is run through the budgeted partition-probe machine, and if
/// that rejects, the probed partition code is added.
pub fn build_e_traced<P: Problem + Serialize>(
    corpus: &Corpus<P>,
    a: &OracleSet,
    stage_cap: u32,
) -> Result<EConstruction> {
    if a.kind() != OracleKind::A || a.corpus_hash() != corpus.hash() {
        return Err(Error::Config(
            "E must start from an A oracle built on the same corpus".into(),
        ));
    }
    let mut e_set = a.clone();
    e_set.kind = OracleKind::E;
    let kappa = kappa(corpus)?;
    let mut gates = Vec::new();
    let mut stages_completed = 0;
    let mut halted_at = None;

    for (p, budget) in corpus.iter() {
        let k = p.width();
        let kk = BigUint::from(k);
        let stage = (1..=stage_cap).find(|&t| match tower(t).as_ref().and_then(pow2) {
            Some(bound) => kk <= bound,
            None => true,
        });
        let Some(stage) = stage else {
            halted_at = Some(p.id());
            break;
        };
        stages_completed = stages_completed.max(stage);

        let lower = tower(stage - 1).expect("stage below cap is representable");
        let upper = tower(stage).expect("stage below cap is representable");
        let window = pow2(&lower).is_some_and(|b| b < kk);
        let pk = BigUint::from(budget.allowance(k as u64));
        let budget_floor = upper <= pk;
        let budget_ceiling = match tower(stage + 1) {
            Some(next) => pk < next,
            None => true,
        };
        let step5 = match pow2(&upper) {
            Some(space) => budget.allowance_big(&upper) >= space,
            None => false,
        };
        let in_kappa = kappa.contains(&p.id());
        let failed_clause = [
            ("window", window),
            ("budget floor", budget_floor),
            ("budget ceiling", budget_ceiling),
            ("step 5", step5),
            ("kappa", !in_kappa),
        ]
        .into_iter()
        .find(|(_, ok)| !ok)
        .map(|(name, _)| name);

        let mut record = GateRecord {
            problem_id: p.id(),
            width: k,
            stage,
            in_kappa,
            window,
            budget_floor,
            budget_ceiling,
            step5,
            failed_clause,
            machine_rejected: None,
            injected: None,
        };
        if failed_clause.is_none() {
            let (run, probed) = solve_with_partition_probe(p, &e_set, budget)?;
            let rejected = run.verdict == Verdict::Reject;
            record.machine_rejected = Some(rejected);
            if let (true, Some(code)) = (rejected, probed) {
                e_set.insert(code.clone(), p.id(), STEP_E_INJECT);
                record.injected = Some(code);
            }
        }
        gates.push(record);
    }

    Ok(EConstruction {
        oracle: e_set,
        gates,
        stages_completed,
        halted_at,
    })
}

/// Tagged union: `pair(0, c)` for every A member (queried by the partition
/// solver) and `pair(1, s)` with `s` the first input code of every problem
/// the nondeterministic machine rejects (queried by the one-query
/// complement solver).
pub fn build_f<P: Problem + Serialize>(corpus: &Corpus<P>) -> Result<OracleSet> {
    let a = build_a(corpus)?;
    let mut set = OracleSet::empty(OracleKind::F, corpus);
    for code in a.members() {
        let owner = a
            .provenance(code)
            .expect("A members carry provenance")
            .problem_id;
        set.insert(tagged(false, code), owner, STEP_F_NP);
    }
    for p in corpus.problems() {
        if nd_rejects(p)? {
            let sentinel = input_code_for(p, &Assignment::from_index(0, p.width()));
            set.insert(tagged(true, &sentinel), p.id(), STEP_F_CONP);
        }
    }
    Ok(set)
}
