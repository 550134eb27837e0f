//! Oracle sets over a finite corpus and their on-disk format.
//!
//! An [`OracleSet`] is immutable once built. Each member remembers which
//! problem and which construction step put it there, so a misleading answer
//! can be traced back to the step responsible.

mod build;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoding::{
    self, decode_input, godel_number, unpair, Decimal, GodelNumber, PartitionCode,
};
use crate::error::{Error, Result};
use crate::formula::{Formula, Problem};
use crate::machine::{Budget, Membership};

pub use build::{
    build_a, build_b, build_c, build_c_bar, build_d, build_e, build_e_traced, build_f, kappa,
    tower, EConstruction, GateRecord, DEFAULT_TOWER_STAGE_CAP, STEP_A, STEP_B, STEP_C, STEP_C_BAR,
    STEP_D_PREFIX, STEP_D_QUERIED, STEP_D_UNQUERIED, STEP_E_INJECT, STEP_F_CONP, STEP_F_NP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OracleKind {
    A,
    B,
    C,
    #[serde(rename = "C_bar")]
    CBar,
    D,
    #[serde(rename = "D_bar")]
    DBar,
    E,
    F,
}

impl OracleKind {
    pub const ALL: [OracleKind; 8] = [
        OracleKind::A,
        OracleKind::B,
        OracleKind::C,
        OracleKind::CBar,
        OracleKind::D,
        OracleKind::DBar,
        OracleKind::E,
        OracleKind::F,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::A => "A",
            OracleKind::B => "B",
            OracleKind::C => "C",
            OracleKind::CBar => "C_bar",
            OracleKind::D => "D",
            OracleKind::DBar => "D_bar",
            OracleKind::E => "E",
            OracleKind::F => "F",
        }
    }

    /// Whether members are partition codes (as opposed to input codes).
    fn partition_coded(self) -> bool {
        matches!(self, OracleKind::A | OracleKind::E)
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OracleKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown oracle kind {s:?}")))
    }
}

/// Why a code is in a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub problem_id: u64,
    pub step: String,
}

/// A finite problem corpus with a step budget per problem. Ids are dense,
/// `1..=len` in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus<P = Formula> {
    problems: Vec<P>,
    budgets: Vec<Budget>,
}

impl<P: Problem + Serialize> Corpus<P> {
    pub fn new(problems: Vec<P>, budgets: Vec<Budget>) -> Result<Self> {
        if problems.len() != budgets.len() {
            return Err(Error::Config(format!(
                "{} problems but {} budgets",
                problems.len(),
                budgets.len()
            )));
        }
        for (i, p) in problems.iter().enumerate() {
            if p.id() != i as u64 + 1 {
                return Err(Error::Config(format!(
                    "corpus ids must be dense from 1; position {} has id {}",
                    i + 1,
                    p.id()
                )));
            }
        }
        Ok(Corpus { problems, budgets })
    }

    pub fn uniform(problems: Vec<P>, budget: Budget) -> Result<Self> {
        let budgets = vec![budget; problems.len()];
        Corpus::new(problems, budgets)
    }

    pub fn problems(&self) -> &[P] {
        &self.problems
    }

    pub fn budgets(&self) -> &[Budget] {
        &self.budgets
    }

    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, Budget)> {
        self.problems.iter().zip(self.budgets.iter().copied())
    }

    pub fn get(&self, id: u64) -> Option<(&P, Budget)> {
        let i = usize::try_from(id).ok()?.checked_sub(1)?;
        Some((self.problems.get(i)?, *self.budgets.get(i)?))
    }

    /// SHA-256 over the JSON serialization of problems and budgets.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.problems).expect("corpus serializes"));
        h.update(b"\n");
        h.update(serde_json::to_vec(&self.budgets).expect("budgets serialize"));
        hex::encode(h.finalize())
    }

    fn coverage(&self) -> BTreeMap<u64, GodelNumber> {
        self.problems
            .iter()
            .map(|p| (p.id(), godel_number(p)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSet {
    kind: OracleKind,
    members: BTreeSet<BigUint>,
    provenance: BTreeMap<BigUint, Provenance>,
    corpus_hash: String,
    coverage: BTreeMap<u64, GodelNumber>,
}

impl OracleSet {
    pub(crate) fn empty<P: Problem + Serialize>(kind: OracleKind, corpus: &Corpus<P>) -> Self {
        OracleSet {
            kind,
            members: BTreeSet::new(),
            provenance: BTreeMap::new(),
            corpus_hash: corpus.hash(),
            coverage: corpus.coverage(),
        }
    }

    /// Adds a member; the first provenance recorded for a code is kept.
    pub(crate) fn insert(&mut self, code: BigUint, problem_id: u64, step: &str) -> bool {
        if self.members.contains(&code) {
            return false;
        }
        self.provenance.insert(
            code.clone(),
            Provenance {
                problem_id,
                step: step.to_string(),
            },
        );
        self.members.insert(code)
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn members(&self) -> &BTreeSet<BigUint> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn provenance(&self, code: &BigUint) -> Option<&Provenance> {
        self.provenance.get(code)
    }

    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    /// Members whose provenance names `problem_id`.
    pub fn members_for(&self, problem_id: u64) -> impl Iterator<Item = &BigUint> {
        self.provenance
            .iter()
            .filter(move |(_, p)| p.problem_id == problem_id)
            .map(|(c, _)| c)
    }

    /// Checks that every member decodes under the scheme of this set's kind
    /// and names a problem of `corpus`.
    pub fn validate<P: Problem + Serialize>(&self, corpus: &Corpus<P>) -> Result<()> {
        let by_godel: BTreeMap<&GodelNumber, u64> =
            self.coverage.iter().map(|(id, g)| (g, *id)).collect();
        let check_partition = |code: &BigUint| -> Result<()> {
            let pc = PartitionCode::decode(code);
            let id = by_godel.get(&pc.godel).ok_or_else(|| {
                Error::Parse(format!(
                    "{code} is not a partition code of a corpus problem"
                ))
            })?;
            let (p, _) = corpus.get(*id).expect("coverage mirrors corpus");
            if pc.true_count > p.width() {
                return Err(Error::Parse(format!(
                    "{code} names partition {} of a width-{} problem",
                    pc.true_count,
                    p.width()
                )));
            }
            Ok(())
        };
        let check_input = |code: &BigUint| -> Result<()> {
            let ic = decode_input(code)?;
            let (p, _) = corpus.get(ic.machine_index).ok_or_else(|| {
                Error::Parse(format!("{code} names unknown problem {}", ic.machine_index))
            })?;
            if ic.assignment_bits.len() != p.width() || ic.padding_length != p.width() as u64 {
                return Err(Error::Parse(format!(
                    "{code} does not fit problem {}",
                    ic.machine_index
                )));
            }
            Ok(())
        };
        for code in &self.members {
            match self.kind {
                OracleKind::F => {
                    let (tag, inner) = unpair(code);
                    match tag.to_u8() {
                        Some(0) => check_partition(&inner)?,
                        Some(1) => check_input(&inner)?,
                        _ => return Err(Error::Parse(format!("{code} carries no F tag"))),
                    }
                }
                k if k.partition_coded() => check_partition(code)?,
                _ => check_input(code)?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = OracleFile {
            kind: self.kind,
            members: self.members.iter().cloned().map(Decimal).collect(),
            corpus_hash: self.corpus_hash.clone(),
            provenance: self
                .provenance
                .iter()
                .map(|(code, p)| ProvenanceEntry {
                    code: Decimal(code.clone()),
                    problem_id: p.problem_id,
                    step: p.step.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// Parses an oracle file for `corpus`. Fails without returning a partial
    /// set on malformed input, a corpus hash mismatch, a kind mismatch (when
    /// `expected` is given) or a member that does not decode.
    pub fn from_json<P: Problem + Serialize>(
        text: &str,
        corpus: &Corpus<P>,
        expected: Option<OracleKind>,
    ) -> Result<Self> {
        let file: OracleFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(kind) = expected {
            if kind != file.kind {
                return Err(Error::Config(format!(
                    "expected an oracle of kind {kind}, file holds {}",
                    file.kind
                )));
            }
        }
        let hash = corpus.hash();
        if file.corpus_hash != hash {
            return Err(Error::Config(format!(
                "oracle was built for corpus {} but the supplied corpus hashes to {hash}",
                file.corpus_hash
            )));
        }
        let members: BTreeSet<BigUint> = file.members.into_iter().map(|d| d.0).collect();
        let mut provenance = BTreeMap::new();
        for entry in file.provenance {
            if !members.contains(&entry.code.0) {
                return Err(Error::Parse(format!(
                    "provenance for non-member {}",
                    entry.code.0
                )));
            }
            provenance.insert(
                entry.code.0,
                Provenance {
                    problem_id: entry.problem_id,
                    step: entry.step,
                },
            );
        }
        let set = OracleSet {
            kind: file.kind,
            members,
            provenance,
            corpus_hash: hash,
            coverage: corpus.coverage(),
        };
        set.validate(corpus)?;
        Ok(set)
    }
}

impl Membership for OracleSet {
    fn contains(&self, code: &BigUint) -> bool {
        self.members.contains(code)
    }

    fn covers(&self, problem_id: u64, godel: &GodelNumber) -> bool {
        self.coverage.get(&problem_id) == Some(godel)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleFile {
    kind: OracleKind,
    members: Vec<Decimal>,
    corpus_hash: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<ProvenanceEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceEntry {
    code: Decimal,
    problem_id: u64,
    step: String,
}

/// Writes the set to `path` through a temporary file and a rename.
pub fn save_oracle(o: &OracleSet, path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(o.to_json()?.as_bytes())?;
    tmp.write_all(b"\n")?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn load_oracle<P: Problem + Serialize>(
    path: &Path,
    corpus: &Corpus<P>,
    expected: Option<OracleKind>,
) -> Result<OracleSet> {
    let text = fs::read_to_string(path)?;
    OracleSet::from_json(&text, corpus, expected)
}

/// Decodes a member of a partition-coded set to the corpus problem it
/// belongs to.
pub fn partition_owner<P: Problem + Serialize>(corpus: &Corpus<P>, code: &BigUint) -> Option<u64> {
    let pc = PartitionCode::decode(code);
    corpus
        .problems()
        .iter()
        .find(|p| godel_number(*p) == pc.godel)
        .map(|p| p.id())
}

pub(crate) fn tagged(tag: bool, code: &BigUint) -> BigUint {
    encoding::tag(tag, code)
}
