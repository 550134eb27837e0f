//! Pairing, Gödel numbering and the two code families oracles are built from.
//!
//! * Partition codes `⟨t, g⟩` name the block of input sets with exactly `t`
//!   true positions for the problem with Gödel number `g`.
//! * Input codes name a single input set as the triple `⟨i, x, 0^n⟩`, nested
//!   as `pair(i, pair(bits(x), n))` where `bits(x)` carries a leading 1
//!   sentinel so the length of `x` survives the round trip.
//!
//! All codes are arbitrary-precision naturals; nothing here wraps.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Problem};

/// Cantor pairing `(a+b)(a+b+1)/2 + b`.
pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    ((&s * (&s + 1u32)) >> 1u32) + b
}

pub fn pair_u64(a: u64, b: u64) -> BigUint {
    pair(&BigUint::from(a), &BigUint::from(b))
}

/// Inverse of [`pair`].
pub fn unpair(n: &BigUint) -> (BigUint, BigUint) {
    if let Some(small) = n.to_u64() {
        let (a, b) = unpair_small(small);
        return (BigUint::from(a), BigUint::from(b));
    }
    // w = floor((sqrt(8n + 1) - 1) / 2) is the diagonal index a + b.
    let w = ((n * 8u32 + 1u32).sqrt() - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1u32;
    let b = n - t;
    let a = w - &b;
    (a, b)
}

fn unpair_small(n: u64) -> (u64, u64) {
    let n = n as u128;
    let w = ((8 * n + 1).sqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = n - t;
    ((w - b) as u64, b as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GodelNumber(pub BigUint);

impl fmt::Display for GodelNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The canonical serialization of `p`, read as a base-256 natural.
///
/// Canonical forms never start with a zero byte, so distinct forms give
/// distinct numbers.
pub fn godel_number<P: Problem + ?Sized>(p: &P) -> GodelNumber {
    GodelNumber(BigUint::from_bytes_be(&p.canonical_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionCode {
    pub true_count: usize,
    pub godel: GodelNumber,
    pub code: BigUint,
}

impl PartitionCode {
    pub fn decode(code: &BigUint) -> Self {
        let (t, g) = unpair(code);
        PartitionCode {
            // Partition indices far beyond any enumerable width saturate;
            // such codes never match a corpus problem anyway.
            true_count: t.to_usize().unwrap_or(usize::MAX),
            godel: GodelNumber(g),
            code: code.clone(),
        }
    }
}

/// Code of the block of `p`'s input sets having exactly `t` true positions.
pub fn partition_code<P: Problem + ?Sized>(p: &P, t: usize) -> Result<PartitionCode> {
    if t > p.width() {
        return Err(Error::Domain(format!(
            "true count {t} outside 0..={}",
            p.width()
        )));
    }
    Ok(partition_code_with(&godel_number(p), t))
}

/// Same as [`partition_code`] with a precomputed Gödel number.
pub fn partition_code_with(godel: &GodelNumber, t: usize) -> PartitionCode {
    PartitionCode {
        true_count: t,
        godel: godel.clone(),
        code: pair(&BigUint::from(t), &godel.0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputCode {
    pub machine_index: u64,
    pub assignment_bits: Vec<bool>,
    pub padding_length: u64,
    pub code: BigUint,
}

fn bits_to_natural(bits: &[bool]) -> BigUint {
    let mut n = BigUint::zero();
    n.set_bit(bits.len() as u64, true);
    for (j, &b) in bits.iter().enumerate() {
        if b {
            n.set_bit(j as u64, true);
        }
    }
    n
}

pub fn input_code(machine_index: u64, a: &Assignment, padding_length: u64) -> InputCode {
    let inner = pair(&bits_to_natural(&a.values), &BigUint::from(padding_length));
    InputCode {
        machine_index,
        assignment_bits: a.values.clone(),
        padding_length,
        code: pair(&BigUint::from(machine_index), &inner),
    }
}

/// Decodes an input code; fails on naturals no input code maps to.
pub fn decode_input(code: &BigUint) -> Result<InputCode> {
    let (i, inner) = unpair(code);
    let (bits, n) = unpair(&inner);
    if bits.is_zero() {
        return Err(Error::Parse(format!(
            "{code} is not an input code (empty bit field)"
        )));
    }
    let machine_index = i
        .to_u64()
        .ok_or_else(|| Error::Parse(format!("machine index of {code} exceeds 64 bits")))?;
    let padding_length = n
        .to_u64()
        .ok_or_else(|| Error::Parse(format!("padding of {code} exceeds 64 bits")))?;
    let len = bits.bits() - 1;
    let assignment_bits = (0..len).map(|j| bits.bit(j)).collect();
    Ok(InputCode {
        machine_index,
        assignment_bits,
        padding_length,
        code: code.clone(),
    })
}

/// Pairs `code` with a one-bit tag, for unions of two oracle sets.
pub fn tag(tag: bool, code: &BigUint) -> BigUint {
    let t = if tag { BigUint::one() } else { BigUint::zero() };
    pair(&t, code)
}

/// Serde adapter writing naturals as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }

    pub fn parse(s: &str) -> Result<BigUint, String> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("not a decimal natural: {s:?}"));
        }
        BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| format!("not a decimal natural: {s:?}"))
    }
}

/// A decimal-string natural, for places that need an owned serde value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decimal(#[serde(with = "decimal")] pub BigUint);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{default_names, Formula};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair(&n(0), &n(0)), n(0));
        assert_eq!(pair(&n(1), &n(2)), n(8));
        assert_eq!(unpair(&n(0)), (n(0), n(0)));
        assert_eq!(unpair(&n(8)), (n(1), n(2)));
    }

    #[test]
    fn unpair_large_values() {
        let a = BigUint::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        let b = BigUint::parse_bytes(b"98765432109876543210", 10).unwrap();
        assert_eq!(unpair(&pair(&a, &b)), (a.clone(), b.clone()));
        assert_eq!(unpair(&pair(&b, &a)), (b, a));
    }

    #[test]
    fn godel_distinguishes_polarity() {
        let f = Formula::from_dimacs(1, 3, &[&[1, 2, 3]]).unwrap();
        let g = Formula::from_dimacs(1, 3, &[&[-1, 2, 3]]).unwrap();
        assert_eq!(godel_number(&f), godel_number(&f));
        assert_ne!(godel_number(&f), godel_number(&g));
    }

    #[test]
    fn godel_ignores_id_and_clause_order() {
        let f = Formula::from_dimacs(1, 3, &[&[1, 2], &[3, -1]]).unwrap();
        let g = Formula::from_dimacs(9, 3, &[&[-1, 3], &[2, 1]]).unwrap();
        assert_eq!(godel_number(&f), godel_number(&g));
    }

    #[test]
    fn godel_sees_literal_names() {
        let f = Formula::new(1, vec!["p".into()], vec![]).unwrap();
        let g = Formula::new(1, vec!["q".into()], vec![]).unwrap();
        assert_ne!(godel_number(&f), godel_number(&g));
    }

    #[test]
    fn partition_codes() {
        let f = Formula::from_dimacs(1, 3, &[&[1, 2, 3]]).unwrap();
        let g = godel_number(&f);
        let c0 = partition_code(&f, 0).unwrap();
        assert_eq!(c0.code, pair(&n(0), &g.0));
        let codes: BTreeSet<_> = (0..=3)
            .map(|t| partition_code(&f, t).unwrap().code)
            .collect();
        assert_eq!(codes.len(), 4);
        assert!(matches!(partition_code(&f, 4), Err(Error::Domain(_))));
        let back = PartitionCode::decode(&c0.code);
        assert_eq!(back.true_count, 0);
        assert_eq!(back.godel, g);
    }

    #[test]
    fn input_code_zero_case() {
        let a = Assignment::new(vec![false]);
        let c = input_code(0, &a, 0);
        let d = decode_input(&c.code).unwrap();
        assert_eq!(d.machine_index, 0);
        assert_eq!(d.assignment_bits, vec![false]);
        assert_eq!(d.padding_length, 0);
    }

    #[test]
    fn input_codes_distinct_per_assignment() {
        for k in 1..=10 {
            let f = Formula::new(1, default_names(k), vec![]).unwrap();
            let codes: BTreeSet<_> = f
                .inputs(20)
                .unwrap()
                .map(|a| input_code(3, &a, 7).code)
                .collect();
            assert_eq!(codes.len(), 1 << k);
        }
    }

    #[test]
    fn non_input_code_rejected() {
        // pair(i, pair(0, n)) has an empty bit field.
        let bogus = pair(&n(2), &pair(&n(0), &n(5)));
        assert!(decode_input(&bogus).is_err());
    }

    #[test]
    fn decimal_parse() {
        assert_eq!(decimal::parse("0").unwrap(), n(0));
        assert!(decimal::parse("").is_err());
        assert!(decimal::parse("-3").is_err());
        assert!(decimal::parse("1e3").is_err());
    }

    proptest! {
        #[test]
        fn pair_round_trip(a in any::<u64>(), b in any::<u64>()) {
            let (x, y) = unpair(&pair_u64(a, b));
            prop_assert_eq!((x, y), (n(a), n(b)));
        }

        #[test]
        fn input_code_round_trip(i in any::<u64>(), bits in proptest::collection::vec(any::<bool>(), 0..40), pad in any::<u64>()) {
            let a = Assignment::new(bits.clone());
            let c = input_code(i, &a, pad);
            let d = decode_input(&c.code).unwrap();
            prop_assert_eq!(d.machine_index, i);
            prop_assert_eq!(d.assignment_bits, bits);
            prop_assert_eq!(d.padding_length, pad);
        }
    }
}
