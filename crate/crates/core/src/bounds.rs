//! The counting side: the matching-pairs inequality, the signature bound,
//! the `32 m^4 / s^4` lower bound and exhaustive oracles for small `n`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bentsquare::{classify_vector, is_bent_square, truth_table_from_square, BentSquare, VectorClass};
use crate::boolfn::{is_bent, TruthTable};
use crate::error::{Error, Result};
use crate::tworegular::{self, vertical_signature, DEFAULT_ENUMERATION_CAP};

/// Largest `n` accepted by [`bound_report`].
pub const MAX_REPORT_VARS: u32 = 20;

/// Number of ordered pairs `(x1, x2)` with equal labels: `sum_y u(y)^2`.
pub fn matching_pair_count<T: Hash + Eq>(labels: &[T]) -> u128 {
    let mut mult: HashMap<&T, u128> = HashMap::new();
    for l in labels {
        *mult.entry(l).or_default() += 1;
    }
    mult.values().map(|u| u * u).sum()
}

/// `pairs >= |X|^2 / |Y|`, compared exactly as `pairs * |Y| >= |X|^2`.
pub fn meets_pair_bound(pairs: u128, domain: usize, codomain: usize) -> bool {
    let x = domain as u128;
    pairs * codomain as u128 >= x * x
}

/// `(N-1)^(N-1)`: the first `N-1` signature entries are nonzero and the last
/// is their XOR.
pub fn signature_upper_bound(n: usize) -> Result<BigUint> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n < 2 {
        return Err(Error::BadShape(format!("signature bound needs N >= 2, got {n}")));
    }
    Ok(BigUint::from(n - 1).pow((n - 1) as u32))
}

/// Base-2 logarithm of a positive big integer, to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

/// Exact lower-bound data for one even `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u32,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(with = "big_json")]
    pub m: BigUint,
    #[serde(with = "big_json")]
    pub s_bound: BigUint,
    #[serde(with = "big_json::option")]
    pub s_exact: Option<BigUint>,
    #[serde(with = "big_json")]
    pub lower_bound: BigUint,
    pub log2_lower: f64,
    pub normalized: f64,
}

/// Fills a [`BoundReport`]: `m` from the counting DP, `s_exact` by
/// enumeration when `N` is within the enumeration cap, and
/// `lower_bound = floor(32 m^4 / s_bound^4)`.
pub fn bound_report(n: u32) -> Result<BoundReport> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::OddOrSmallN(n));
    }
    if n > MAX_REPORT_VARS {
        return Err(Error::TooLarge {
            what: "n for bound report",
            value: n as usize,
            max: MAX_REPORT_VARS as usize,
        });
    }
    let size = 1usize << (n / 2 - 1);
    let m = tworegular::count(size);
    let s_bound = signature_upper_bound(size)?;
    let s_exact = if size <= DEFAULT_ENUMERATION_CAP {
        let sigs: BTreeSet<_> = tworegular::enumerate(size)?
            .map(|mat| vertical_signature(&mat))
            .collect::<Result<_>>()?;
        Some(BigUint::from(sigs.len()))
    } else {
        None
    };
    let m4 = m.pow(4u32);
    let s4 = s_bound.pow(4u32);
    let lower_bound = BigUint::from(32u32) * &m4 / &s4;
    // log2 of the exact ratio, not of the floor
    let log2_lower = 5.0 + 4.0 * (log2_big(&m) - log2_big(&s_bound));
    let normalized = log2_lower / (n as f64 * (1u64 << (n / 2)) as f64);
    Ok(BoundReport {
        n,
        size,
        m,
        s_bound,
        s_exact,
        lower_bound,
        log2_lower,
        normalized,
    })
}

/// Aligned plain-text table of reports.
pub fn bound_table_text(reports: &[BoundReport]) -> String {
    let header = ["n", "N", "m", "s_bound", "s_exact", "lower_bound", "log2_lower", "normalized"];
    let rows: Vec<[String; 8]> = reports
        .iter()
        .map(|r| {
            [
                r.n.to_string(),
                r.size.to_string(),
                r.m.to_string(),
                r.s_bound.to_string(),
                r.s_exact.as_ref().map_or("-".into(), |s| s.to_string()),
                r.lower_bound.to_string(),
                format!("{:.4}", r.log2_lower),
                format!("{:.6}", r.normalized),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap()
        })
        .collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec());
    for r in &rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn bound_table_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("n,N,m,s_bound,s_exact,lower_bound,log2_lower,normalized\n");
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.size,
            r.m,
            r.s_bound,
            r.s_exact.as_ref().map_or(String::new(), |s| s.to_string()),
            r.lower_bound,
            r.log2_lower,
            r.normalized
        )
        .unwrap();
    }
    out
}

fn census_range(n: u32) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddVariableCount(n));
    }
    if n > 4 {
        return Err(Error::TooLarge {
            what: "n for exhaustive census",
            value: n as usize,
            max: 4,
        });
    }
    if n == 0 {
        return Err(Error::OddOrSmallN(n));
    }
    Ok(())
}

/// Every bent function in `n <= 4` variables, by exhaustive search, sorted.
pub fn bent_census(n: u32) -> Result<Vec<TruthTable>> {
    census_range(n)?;
    let total = 1u64 << (1u64 << n);
    let mut found: Vec<TruthTable> = (0..total)
        .into_par_iter()
        .filter_map(|w| {
            let f = TruthTable::from_word(n, w).expect("n <= 4");
            (is_bent(&f) == Ok(true)).then_some(f)
        })
        .collect();
    found.sort();
    Ok(found)
}

/// `b_n` for `n <= 4`, by checking all `2^(2^n)` functions.
pub fn brute_force_bent_count(n: u32) -> Result<u64> {
    bent_census(n).map(|v| v.len() as u64)
}

/// `2^(2^k) (2^k)!`, the number of Type 1 bent squares of side `2^k`.
pub fn type1_formula(k: u32) -> BigUint {
    let side = 1u64 << k;
    let fact = (1..=side).fold(BigUint::one(), |acc, i| acc * i);
    (BigUint::one() << side) * fact
}

fn permutations(len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(len - 1) {
        for pos in 0..len {
            let mut q = p.clone();
            q.insert(pos, len - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// The distinct bent functions of all signed permutation matrices with
/// entries `+-2^k`, checking every square and every line on the way.
pub fn type1_functions(k: u32) -> Result<BTreeSet<TruthTable>> {
    if !(1..=2).contains(&k) {
        return Err(Error::TooLarge {
            what: "k for type 1 enumeration",
            value: k as usize,
            max: 2,
        });
    }
    let side = 1usize << k;
    let mag = 1i64 << k;
    let mut out = BTreeSet::new();
    let mut squares = 0u64;
    for perm in permutations(side) {
        for signs in 0u32..(1 << side) {
            let mut rows = vec![vec![0i64; side]; side];
            for (r, &c) in perm.iter().enumerate() {
                rows[r][c] = if (signs >> r) & 1 == 1 { -mag } else { mag };
            }
            let sq = BentSquare::from_rows(&rows)?;
            assert!(is_bent_square(&sq), "{rows:?}");
            let type1 = |v: &[i64]| classify_vector(v) == Ok(VectorClass::Type1);
            assert!(sq.rows().all(type1) && sq.columns().all(|c| type1(&c)));
            let f = truth_table_from_square(&sq)?;
            assert_eq!(is_bent(&f), Ok(true));
            assert!(out.insert(f), "two type 1 squares gave the same function");
            squares += 1;
        }
    }
    debug_assert_eq!(BigUint::from(squares), type1_formula(k));
    Ok(out)
}

/// Count of Type 1 bent squares of side `2^k`, enumerated and checked.
pub fn type1_square_count_check(k: u32) -> Result<u64> {
    let fs = type1_functions(k)?;
    let count = fs.len() as u64;
    assert_eq!(BigUint::from(count), type1_formula(k));
    Ok(count)
}

/// Serializes big integers as JSON numbers while they fit in `u64` and as
/// decimal strings beyond that; both forms are accepted on input.
pub mod big_json {
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match v.to_u64() {
            Some(x) => s.serialize_u64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(BigUint::from(x)),
            Repr::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }

    pub mod option {
        use super::*;
        use serde::Serialize;

        pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
            struct W<'a>(&'a BigUint);
            impl Serialize for W<'_> {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(self.0, s)
                }
            }
            match v {
                Some(x) => s.serialize_some(&W(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
            match Option::<Repr>::deserialize(d)? {
                None => Ok(None),
                Some(Repr::Num(x)) => Ok(Some(BigUint::from(x))),
                Some(Repr::Str(s)) => s.parse().map(Some).map_err(de::Error::custom),
            }
        }
    }
}
