//! CNF formulas, truth assignments and the exhaustive satisfiability check
//! that every experiment treats as ground truth.
//!
//! Assignments are always enumerated in one canonical order: assignment
//! index `e` in `0..2^k` read as a little-endian `k`-bit integer, so bit `j`
//! of `e` is the value of literal `j`. Oracle builders and solvers both rely
//! on this order when they talk about "the next unexamined input set".

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the number of literals that may be enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Default upper bound on the clause count produced by [`negate`].
pub const DEFAULT_NEGATION_CAP: usize = 100_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_CAP`].
pub const CAP_ENV_VAR: &str = "RELATIVIZE_CAP";

/// The enumeration cap in effect for this process.
///
/// Reads `RELATIVIZE_CAP` once; unparsable values fall back to the default.
pub fn enumeration_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(CAP_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_ENUMERATION_CAP)
    })
}

/// A literal occurrence inside a clause: literal index plus polarity
/// (`true` = positive). Serialized as the pair `[index, polarity]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, bool)", into = "(usize, bool)")]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Lit {
            var,
            positive: false,
        }
    }

    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    fn holds(self, values: &[bool]) -> bool {
        values[self.var] == self.positive
    }
}

impl From<(usize, bool)> for Lit {
    fn from((var, positive): (usize, bool)) -> Self {
        Lit { var, positive }
    }
}

impl From<Lit> for (usize, bool) {
    fn from(l: Lit) -> Self {
        (l.var, l.positive)
    }
}

pub type Clause = Vec<Lit>;

/// Default literal names: `a`..`z`, then `x26`, `x27`, ...
pub fn literal_name(index: usize) -> String {
    if index < 26 {
        char::from(b'a' + index as u8).to_string()
    } else {
        format!("x{index}")
    }
}

pub fn default_names(k: usize) -> Vec<String> {
    (0..k).map(literal_name).collect()
}

/// A boolean formula in conjunctive normal form.
///
/// The clause list may be empty (the constant-true formula, which is what
/// negating an unsatisfiable formula produces). Individual clauses may not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFormula")]
pub struct Formula {
    pub id: u64,
    pub literals: Vec<String>,
    pub clauses: Vec<Clause>,
}

#[derive(Deserialize)]
struct RawFormula {
    id: u64,
    literals: Vec<String>,
    clauses: Vec<Clause>,
}

impl TryFrom<RawFormula> for Formula {
    type Error = Error;

    fn try_from(raw: RawFormula) -> Result<Self> {
        Formula::new(raw.id, raw.literals, raw.clauses)
    }
}

impl Formula {
    pub fn new(id: u64, literals: Vec<String>, clauses: Vec<Clause>) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::InvalidFormula(
                "a formula needs at least one literal".into(),
            ));
        }
        let distinct: BTreeSet<&String> = literals.iter().collect();
        if distinct.len() != literals.len() {
            return Err(Error::InvalidFormula(
                "literal names must be distinct".into(),
            ));
        }
        let k = literals.len();
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidFormula(format!("clause {ci} is empty")));
            }
            let mut seen = BTreeSet::new();
            for lit in clause {
                if lit.var >= k {
                    return Err(Error::InvalidFormula(format!(
                        "clause {ci} references literal {} but k = {k}",
                        lit.var
                    )));
                }
                if !seen.insert(*lit) {
                    return Err(Error::InvalidFormula(format!(
                        "clause {ci} repeats literal ({}, {})",
                        lit.var, lit.positive
                    )));
                }
            }
        }
        Ok(Formula {
            id,
            literals,
            clauses,
        })
    }

    /// Builds a formula from DIMACS-style signed, 1-based literal numbers,
    /// naming the literals `a`, `b`, `c`, ...
    ///
    /// ```
    /// use relativize::formula::Formula;
    /// // (a ∨ b) ∧ (¬a ∨ ¬b)
    /// let f = Formula::from_dimacs(1, 2, &[&[1, 2], &[-1, -2]]).unwrap();
    /// assert_eq!(f.k(), 2);
    /// ```
    pub fn from_dimacs(id: u64, k: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&n| {
                        if n == 0 {
                            return Err(Error::InvalidFormula("literal number 0".into()));
                        }
                        Ok(Lit {
                            var: (n.unsigned_abs() - 1) as usize,
                            positive: n > 0,
                        })
                    })
                    .collect::<Result<Clause>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Formula::new(id, default_names(k), clauses)
    }

    /// Number of literals.
    pub fn k(&self) -> usize {
        self.literals.len()
    }

    pub fn with_id(mut self, id: u64) -> Self {
        self.id = id;
        self
    }

    fn holds(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|clause| clause.iter().any(|lit| lit.holds(values)))
    }

    /// Truth table in canonical order, packed 64 assignments per word.
    pub fn truth_table(&self, cap: usize) -> Result<Vec<u64>> {
        let k = self.k();
        check_cap(k, cap)?;
        let total = 1usize << k;
        let mut table = vec![0u64; total.div_ceil(64)];
        for a in Assignments::new(k) {
            if self.holds(&a.values) {
                let e = a.index();
                table[e / 64] |= 1 << (e % 64);
            }
        }
        Ok(table)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        for (ci, clause) in self.clauses.iter().enumerate() {
            if ci > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "(")?;
            for (li, lit) in clause.iter().enumerate() {
                if li > 0 {
                    write!(f, " ∨ ")?;
                }
                if !lit.positive {
                    write!(f, "¬")?;
                }
                write!(f, "{}", self.literals[lit.var])?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// One input set: a total truth assignment, position-aligned with the
/// formula's literal list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// The assignment at canonical position `index` over `k` literals.
    pub fn from_index(index: usize, k: usize) -> Self {
        Assignment {
            values: (0..k).map(|j| (index >> j) & 1 == 1).collect(),
        }
    }

    /// Canonical position (little-endian bits). Only meaningful for k < 64.
    pub fn index(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .fold(0, |acc, (j, _)| acc | (1 << j))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A fixed-length prefix of the assignment.
    pub fn prefix(&self, len: usize) -> Assignment {
        Assignment {
            values: self.values[..len.min(self.values.len())].to_vec(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", if *v { 'T' } else { 'F' })?;
        }
        write!(f, ")")
    }
}

/// Canonical-order iterator over all `2^k` assignments.
#[derive(Debug, Clone)]
pub struct Assignments {
    k: usize,
    next: usize,
    end: usize,
}

impl Assignments {
    fn new(k: usize) -> Self {
        Assignments {
            k,
            next: 0,
            end: 1usize << k,
        }
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.next >= self.end {
            return None;
        }
        let a = Assignment::from_index(self.next, self.k);
        self.next += 1;
        Some(a)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.end - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Assignments {}

fn check_cap(k: usize, cap: usize) -> Result<()> {
    if k > cap || k >= usize::BITS as usize - 1 {
        return Err(Error::Capacity {
            what: "literal count",
            requested: k,
            cap,
        });
    }
    Ok(())
}

/// Anything whose input sets are fixed-width boolean vectors, enumerated in
/// canonical order. CNF formulas and set-sum instances both qualify, which
/// lets every oracle construction and solver run over either family.
pub trait Problem {
    /// Index of the problem within its corpus.
    fn id(&self) -> u64;

    /// Length of one input set.
    fn width(&self) -> usize;

    /// Whether the problem evaluates true on `input`. `input.len()` equals
    /// `width()`.
    fn accepts(&self, input: &Assignment) -> bool;

    /// Canonical byte serialization; the Gödel number is derived from it.
    fn canonical_bytes(&self) -> Vec<u8>;

    /// Canonical-order enumeration of input sets, guarded by `cap`.
    fn inputs(&self, cap: usize) -> Result<Assignments> {
        check_cap(self.width(), cap)?;
        Ok(Assignments::new(self.width()))
    }
}

impl Problem for Formula {
    fn id(&self) -> u64 {
        self.id
    }

    fn width(&self) -> usize {
        self.k()
    }

    fn accepts(&self, input: &Assignment) -> bool {
        self.holds(&input.values)
    }

    /// Clauses (each sorted, then the list sorted) followed by the literal
    /// names. Names are JSON-quoted so the rendering stays uniquely decodable.
    fn canonical_bytes(&self) -> Vec<u8> {
        let mut clauses: Vec<Vec<Lit>> = self
            .clauses
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort();
                c
            })
            .collect();
        clauses.sort();
        let mut out = String::from("cnf:");
        for (ci, clause) in clauses.iter().enumerate() {
            if ci > 0 {
                out.push(';');
            }
            for (li, lit) in clause.iter().enumerate() {
                if li > 0 {
                    out.push(',');
                }
                out.push(if lit.positive { '+' } else { '-' });
                out.push_str(&lit.var.to_string());
            }
        }
        out.push('|');
        for (i, name) in self.literals.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(name).expect("string serialization"));
        }
        out.into_bytes()
    }
}

/// Ground-truth record produced by [`brute_force_sat`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatVerdict {
    pub satisfiable: bool,
    pub witness: Option<Assignment>,
    pub satisfying_count: u64,
    pub assignments_examined: u64,
}

pub fn evaluate(f: &Formula, a: &Assignment) -> Result<bool> {
    if a.len() != f.k() {
        return Err(Error::Dimension {
            expected: f.k(),
            found: a.len(),
        });
    }
    Ok(f.holds(&a.values))
}

/// All `2^k` assignments in canonical order, under the process-wide cap.
pub fn enumerate_assignments(f: &Formula) -> Result<Assignments> {
    f.inputs(enumeration_cap())
}

pub fn true_count(a: &Assignment) -> usize {
    a.values.iter().filter(|&&v| v).count()
}

/// The assignments with exactly `t` true literals, in canonical order.
pub fn partition(f: &Formula, t: usize) -> Result<Vec<Assignment>> {
    if t > f.k() {
        return Err(Error::Domain(format!(
            "partition index {t} outside 0..={}",
            f.k()
        )));
    }
    Ok(enumerate_assignments(f)?
        .filter(|a| true_count(a) == t)
        .collect())
}

/// Exhaustive search over every input set of any [`Problem`].
pub fn exhaustive_search<P: Problem + ?Sized>(p: &P, cap: usize) -> Result<SatVerdict> {
    let mut witness = None;
    let mut count = 0u64;
    let mut examined = 0u64;
    for a in p.inputs(cap)? {
        examined += 1;
        if p.accepts(&a) {
            count += 1;
            if witness.is_none() {
                witness = Some(a);
            }
        }
    }
    Ok(SatVerdict {
        satisfiable: witness.is_some(),
        witness,
        satisfying_count: count,
        assignments_examined: examined,
    })
}

pub fn brute_force_sat(f: &Formula) -> Result<SatVerdict> {
    exhaustive_search(f, enumeration_cap())
}

/// CNF equivalent of `¬f` by De Morgan product expansion, capped at
/// [`DEFAULT_NEGATION_CAP`] clauses.
pub fn negate(f: &Formula) -> Result<Formula> {
    negate_capped(f, DEFAULT_NEGATION_CAP)
}

/// `¬(C1 ∧ … ∧ Cm)` is `∨_j ∧_{l ∈ Cj} ¬l`; distributing gives one clause per
/// choice of a literal from every `Cj`. Tautological clauses are dropped and
/// duplicates merged after each factor, and the cap is checked on the running
/// product.
pub fn negate_capped(f: &Formula, cap: usize) -> Result<Formula> {
    if f.clauses.is_empty() {
        // ¬⊤ is unsatisfiable.
        return Formula::new(
            f.id,
            f.literals.clone(),
            vec![vec![Lit::pos(0)], vec![Lit::neg(0)]],
        );
    }
    let mut product: BTreeSet<Vec<Lit>> = BTreeSet::new();
    product.insert(Vec::new());
    for clause in &f.clauses {
        let mut next = BTreeSet::new();
        for partial in &product {
            for lit in clause {
                if partial.contains(lit) {
                    // ¬lit alongside lit: tautological clause.
                    continue;
                }
                let neg = lit.negated();
                let mut grown = partial.clone();
                if !grown.contains(&neg) {
                    grown.push(neg);
                    grown.sort();
                }
                next.insert(grown);
                if next.len() > cap {
                    return Err(Error::Capacity {
                        what: "negated clause count",
                        requested: next.len(),
                        cap,
                    });
                }
            }
        }
        product = next;
    }
    // Subsumption is not applied; clause count is bounded by the cap above.
    Formula::new(f.id, f.literals.clone(), product.into_iter().collect())
}

/// CNF conjunction. Literals of `g` missing from `f` (by name) are appended
/// to the literal list and left unconstrained by `f`'s clauses.
pub fn conjoin(f: &Formula, g: &Formula) -> Formula {
    let mut literals = f.literals.clone();
    let remap: Vec<usize> = g
        .literals
        .iter()
        .map(|name| match literals.iter().position(|l| l == name) {
            Some(i) => i,
            None => {
                literals.push(name.clone());
                literals.len() - 1
            }
        })
        .collect();
    let mut clauses = f.clauses.clone();
    clauses.extend(g.clauses.iter().map(|c| {
        c.iter()
            .map(|lit| Lit {
                var: remap[lit.var],
                positive: lit.positive,
            })
            .collect()
    }));
    Formula {
        id: f.id,
        literals,
        clauses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> Formula {
        Formula::from_dimacs(1, 3, &[&[1, 2, 3]]).unwrap()
    }

    fn xor2() -> Formula {
        Formula::from_dimacs(2, 2, &[&[1, 2], &[-1, -2]]).unwrap()
    }

    fn contradiction() -> Formula {
        Formula::from_dimacs(3, 1, &[&[1], &[-1]]).unwrap()
    }

    fn asg(bits: &[bool]) -> Assignment {
        Assignment::new(bits.to_vec())
    }

    #[test]
    fn evaluate_examples() {
        assert!(!evaluate(&abc(), &asg(&[false, false, false])).unwrap());
        let nabc = Formula::from_dimacs(4, 3, &[&[-1, 2, 3]]).unwrap();
        assert!(!evaluate(&nabc, &asg(&[true, false, false])).unwrap());
        assert!(evaluate(&xor2(), &asg(&[true, false])).unwrap());
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let err = evaluate(&abc(), &asg(&[true])).unwrap_err();
        assert!(matches!(
            err,
            Error::Dimension {
                expected: 3,
                found: 1
            }
        ));
    }

    #[test]
    fn invalid_formulas() {
        assert!(Formula::new(0, vec![], vec![]).is_err());
        assert!(Formula::from_dimacs(0, 2, &[&[3]]).is_err());
        assert!(Formula::from_dimacs(0, 2, &[&[1, 1]]).is_err());
        assert!(Formula::from_dimacs(0, 2, &[&[]]).is_err());
        assert!(Formula::new(0, vec!["a".into(), "a".into()], vec![]).is_err());
    }

    #[test]
    fn enumeration_order() {
        let one = Formula::from_dimacs(1, 1, &[&[1]]).unwrap();
        let v: Vec<_> = enumerate_assignments(&one).unwrap().collect();
        assert_eq!(v, vec![asg(&[false]), asg(&[true])]);

        let v: Vec<_> = enumerate_assignments(&abc()).unwrap().collect();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], asg(&[false, false, false]));
        assert_eq!(v[1], asg(&[true, false, false]));
        assert_eq!(v[7], asg(&[true, true, true]));

        let twelve = Formula::new(1, default_names(12), vec![]).unwrap();
        assert_eq!(enumerate_assignments(&twelve).unwrap().count(), 4096);
    }

    #[test]
    fn enumeration_cap_enforced() {
        let big = Formula::new(1, default_names(21), vec![]).unwrap();
        assert!(matches!(
            big.inputs(20),
            Err(Error::Capacity { requested: 21, .. })
        ));
        assert!(big.inputs(21).is_ok());
    }

    #[test]
    fn true_counts() {
        assert_eq!(true_count(&asg(&[false, false, false])), 0);
        assert_eq!(true_count(&asg(&[true, true, true])), 3);
        assert_eq!(true_count(&asg(&[true, false, true])), 2);
    }

    #[test]
    fn partitions() {
        assert_eq!(
            partition(&abc(), 0).unwrap(),
            vec![asg(&[false, false, false])]
        );
        let sizes: Vec<usize> = (0..=3)
            .map(|t| partition(&abc(), t).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![1, 3, 3, 1]);
        let four = Formula::new(1, default_names(4), vec![]).unwrap();
        assert_eq!(partition(&four, 2).unwrap().len(), 6);
        assert!(matches!(partition(&abc(), 4), Err(Error::Domain(_))));
    }

    #[test]
    fn brute_force_examples() {
        let v = brute_force_sat(&abc()).unwrap();
        assert!(v.satisfiable);
        assert_eq!(v.satisfying_count, 7);
        assert_eq!(v.assignments_examined, 8);
        assert_eq!(v.witness, Some(asg(&[true, false, false])));

        let v = brute_force_sat(&contradiction()).unwrap();
        assert!(!v.satisfiable);
        assert_eq!(v.satisfying_count, 0);
        assert!(v.witness.is_none());

        let v = brute_force_sat(&xor2()).unwrap();
        assert_eq!(v.satisfying_count, 2);
    }

    #[test]
    fn negate_examples() {
        let a = Formula::from_dimacs(1, 1, &[&[1]]).unwrap();
        assert_eq!(negate(&a).unwrap().clauses, vec![vec![Lit::neg(0)]]);

        let ab = Formula::from_dimacs(1, 2, &[&[1], &[2]]).unwrap();
        assert_eq!(
            negate(&ab).unwrap().clauses,
            vec![vec![Lit::neg(0), Lit::neg(1)]]
        );

        // ¬((a) ∧ (¬a)) is a tautology: every product clause is dropped.
        let t = negate(&contradiction()).unwrap();
        assert!(t.clauses.is_empty());
        assert!(!brute_force_sat(&negate(&t).unwrap()).unwrap().satisfiable);
    }

    #[test]
    fn negate_cap() {
        // 12 clauses of width 3 expand to up to 3^12 products.
        let clauses: Vec<Vec<i64>> = (0..12).map(|i| vec![i + 1, i + 2, i + 3]).collect();
        let refs: Vec<&[i64]> = clauses.iter().map(|c| c.as_slice()).collect();
        let f = Formula::from_dimacs(1, 14, &refs).unwrap();
        assert!(matches!(
            negate_capped(&f, 1000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn conjoin_examples() {
        let a = Formula::from_dimacs(1, 1, &[&[1]]).unwrap();
        let b = Formula::new(2, vec!["b".into()], vec![vec![Lit::pos(0)]]).unwrap();
        let ab = conjoin(&a, &b);
        assert_eq!(ab.literals, vec!["a", "b"]);
        let v = brute_force_sat(&ab).unwrap();
        assert_eq!(v.satisfying_count, 1);
        assert_eq!(v.witness, Some(asg(&[true, true])));

        assert!(
            !brute_force_sat(&conjoin(&contradiction(), &abc()))
                .unwrap()
                .satisfiable
        );
        assert!(
            brute_force_sat(&conjoin(&abc(), &abc()))
                .unwrap()
                .satisfiable
        );
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&xor2()).unwrap();
        assert_eq!(
            json,
            r#"{"id":2,"literals":["a","b"],"clauses":[[[0,true],[1,true]],[[0,false],[1,false]]]}"#
        );
        let back: Formula = serde_json::from_str(&json).unwrap();
        assert_eq!(back, xor2());
        let bad = r#"{"id":1,"literals":["a"],"clauses":[[[4,true]]]}"#;
        assert!(serde_json::from_str::<Formula>(bad).is_err());
    }

    fn arb_formula(max_k: usize) -> impl Strategy<Value = Formula> {
        (1..=max_k).prop_flat_map(|k| {
            let clause = proptest::collection::btree_set((0..k, any::<bool>()), 1..=3.min(k))
                .prop_map(|s| s.into_iter().map(Lit::from).collect::<Clause>());
            proptest::collection::vec(clause, 0..5)
                .prop_map(move |clauses| Formula::new(0, default_names(k), clauses).unwrap())
        })
    }

    proptest! {
        #[test]
        fn negation_is_complement(f in arb_formula(10)) {
            let g = negate(&f).unwrap();
            for a in enumerate_assignments(&f).unwrap() {
                prop_assert_eq!(evaluate(&g, &a).unwrap(), !evaluate(&f, &a).unwrap());
            }
        }

        #[test]
        fn partitions_cover_the_space(f in arb_formula(10)) {
            let k = f.k();
            let mut seen = BTreeSet::new();
            for t in 0..=k {
                for a in partition(&f, t).unwrap() {
                    prop_assert!(seen.insert(a));
                }
            }
            prop_assert_eq!(seen.len(), 1 << k);
        }

        #[test]
        fn unsat_absorbs(f in arb_formula(6), g in arb_formula(6)) {
            if !brute_force_sat(&f).unwrap().satisfiable {
                prop_assert!(!brute_force_sat(&conjoin(&f, &g)).unwrap().satisfiable);
            }
        }

        #[test]
        fn enumeration_is_deterministic(f in arb_formula(8)) {
            let a: Vec<_> = enumerate_assignments(&f).unwrap().collect();
            let b: Vec<_> = enumerate_assignments(&f).unwrap().collect();
            prop_assert_eq!(a, b);
        }
    }
}
