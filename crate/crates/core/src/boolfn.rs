//! Boolean functions as truth tables, the fast Walsh–Hadamard transform,
//! the bent test and the algebraic normal form.
//!
//! Inputs are indexed lexicographically with the first variable as the most
//! significant bit: for `n = 3`, index `0b100` is `x1 = 1, x2 = 0, x3 = 0`.
//! The Hadamard matrices are Sylvester ordered, so `H[x][y] = (-1)^<x,y>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count accepted by [`TruthTable`].
pub const MAX_VARIABLES: u32 = 24;

/// A Boolean function in `n` variables, stored as its `2^n` output bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: u32,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: u32, bits: Vec<bool>) -> Result<Self> {
        check_vars(n)?;
        if bits.len() != 1usize << n {
            return Err(Error::BadTruthTable(format!(
                "{} bits given for {} variables (need {})",
                bits.len(),
                n,
                1usize << n
            )));
        }
        Ok(Self { n, bits })
    }

    /// The constant-zero function.
    pub fn zero(n: u32) -> Result<Self> {
        check_vars(n)?;
        Ok(Self {
            n,
            bits: vec![false; 1 << n],
        })
    }

    /// Tabulates `f` over all inputs in lexicographic order.
    pub fn from_fn(n: u32, f: impl Fn(usize) -> bool) -> Result<Self> {
        check_vars(n)?;
        Ok(Self {
            n,
            bits: (0..1usize << n).map(f).collect(),
        })
    }

    /// Low `2^n` bits of `word`, input `x` at bit position `2^n - 1 - x`.
    ///
    /// This is the same MSB-first layout as the hex encoding, so
    /// `from_word(4, 0x6996)` parses like `"6996"`.
    pub fn from_word(n: u32, word: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::TooLarge {
                what: "variables in a u64 word",
                value: n as usize,
                max: 6,
            });
        }
        let len = 1usize << n;
        Self::from_fn(n, |x| (word >> (len - 1 - x)) & 1 == 1)
    }

    /// Builds the function whose sign vector is `signs` (`+1 -> 0`, `-1 -> 1`).
    pub fn from_signs(signs: &[i64]) -> Result<Self> {
        let n = log2_exact(signs.len())?;
        let mut bits = Vec::with_capacity(signs.len());
        for &s in signs {
            match s {
                1 => bits.push(false),
                -1 => bits.push(true),
                _ => return Err(Error::NotASpectrum),
            }
        }
        Self::new(n, bits)
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize) -> bool {
        self.bits[x]
    }

    /// `(-1)^f(x)` for every input.
    pub fn signs(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| if b { -1 } else { 1 }).collect()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Hex encoding, input 0 in the most significant bit of the first digit.
    ///
    /// Only defined for `n >= 2`; smaller tables do not fill a hex digit.
    pub fn to_hex(&self) -> String {
        assert!(self.n >= 2, "hex encoding needs at least 2 variables");
        self.bits
            .chunks(4)
            .map(|nibble| {
                let v = nibble.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    /// Parses a hex truth table, inferring `n` from the length.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let bit_len = s.len() * 4;
        if s.is_empty() || !bit_len.is_power_of_two() {
            return Err(Error::BadTruthTable(format!(
                "{} hex digits is not a power-of-two number of bits",
                s.len()
            )));
        }
        let n = bit_len.trailing_zeros();
        Self::from_hex_vars(s, n)
    }

    /// Parses a hex truth table that must describe exactly `n` variables.
    pub fn from_hex_vars(s: &str, n: u32) -> Result<Self> {
        check_vars(n)?;
        if n < 2 {
            return Err(Error::BadTruthTable(
                "hex encoding needs at least 2 variables".into(),
            ));
        }
        let s = s.trim();
        let want = (1usize << n) / 4;
        if s.len() != want {
            return Err(Error::BadTruthTable(format!(
                "{} hex digits given, {} variables need {}",
                s.len(),
                n,
                want
            )));
        }
        let mut bits = Vec::with_capacity(1 << n);
        for c in s.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::BadTruthTable(format!("'{c}' is not a hex digit")))?;
            bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        Ok(Self { n, bits })
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, ", self.n)?;
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for TruthTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_hex(s)
    }
}

/// Walsh spectrum `W_f(y)` for every `y`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    n: u32,
    values: Vec<i64>,
}

impl WalshSpectrum {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        let n = log2_exact(values.len())?;
        Ok(Self { n, values })
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<i64> {
        self.values
    }

    /// `sum_y W(y)^2`; equals `2^(2n)` for every real spectrum.
    pub fn energy(&self) -> i128 {
        self.values.iter().map(|&v| (v as i128) * (v as i128)).sum()
    }
}

/// In-place Sylvester-ordered Walsh–Hadamard butterfly: `v <- v * H_k`.
///
/// `v.len()` must be a power of two. Exact integer arithmetic.
pub fn fwht(v: &mut [i64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h <<= 1;
    }
}

/// `[(-1)^f(x)] * H_n`, computed with the fast transform.
pub fn walsh_transform(f: &TruthTable) -> WalshSpectrum {
    let mut values = f.signs();
    fwht(&mut values);
    WalshSpectrum { n: f.n, values }
}

/// Recovers the function whose spectrum is `s`, i.e. `s * H_n / 2^n`.
pub fn inverse_walsh(s: &WalshSpectrum) -> Result<TruthTable> {
    let mut v = s.values.clone();
    fwht(&mut v);
    let scale = 1i64 << s.n;
    let bits = v
        .iter()
        .map(|&x| {
            if x == scale {
                Ok(false)
            } else if x == -scale {
                Ok(true)
            } else {
                Err(Error::NotASpectrum)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TruthTable::new(s.n, bits)
}

/// `true` iff every spectrum value is `+-2^(n/2)`.
pub fn is_bent(f: &TruthTable) -> Result<bool> {
    if !f.n.is_multiple_of(2) {
        return Err(Error::OddVariableCount(f.n));
    }
    let target = 1i64 << (f.n / 2);
    Ok(walsh_transform(f)
        .values
        .iter()
        .all(|&v| v == target || v == -target))
}

/// Coefficients of the algebraic normal form.
///
/// Position `u` holds the coefficient of the monomial made of the variables
/// whose bits are set in `u` (same MSB-first convention as the inputs).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicNormalForm {
    n: u32,
    coefficients: Vec<bool>,
}

impl AlgebraicNormalForm {
    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &[bool] {
        &self.coefficients
    }

    /// Monomials with a nonzero coefficient, as variable masks.
    pub fn monomials(&self) -> impl Iterator<Item = usize> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .filter_map(|(u, &c)| c.then_some(u))
    }

    /// Largest monomial size; 0 for the zero function.
    pub fn degree(&self) -> u32 {
        self.monomials().map(|u| u.count_ones()).max().unwrap_or(0)
    }

    /// Evaluates the polynomial back into a truth table.
    pub fn to_truth_table(&self) -> TruthTable {
        let mut bits = self.coefficients.clone();
        moebius(&mut bits);
        TruthTable { n: self.n, bits }
    }
}

impl fmt::Debug for AlgebraicNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .monomials()
            .map(|u| {
                if u == 0 {
                    return "1".to_string();
                }
                (0..self.n)
                    .filter(|&i| u >> (self.n - 1 - i) & 1 == 1)
                    .map(|i| format!("x{}", i + 1))
                    .collect()
            })
            .collect();
        if terms.is_empty() {
            write!(f, "ANF(0)")
        } else {
            write!(f, "ANF({})", terms.join(" + "))
        }
    }
}

// Binary Moebius transform; an involution over GF(2).
fn moebius(v: &mut [bool]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter().zip(hi.iter_mut()) {
                *b ^= *a;
            }
        }
        h <<= 1;
    }
}

pub fn algebraic_normal_form(f: &TruthTable) -> AlgebraicNormalForm {
    let mut coefficients = f.bits.clone();
    moebius(&mut coefficients);
    AlgebraicNormalForm {
        n: f.n,
        coefficients,
    }
}

pub fn algebraic_degree(f: &TruthTable) -> u32 {
    algebraic_normal_form(f).degree()
}

fn check_vars(n: u32) -> Result<()> {
    if n == 0 || n > MAX_VARIABLES {
        return Err(Error::TooLarge {
            what: "variables",
            value: n as usize,
            max: MAX_VARIABLES as usize,
        });
    }
    Ok(())
}

pub(crate) fn log2_exact(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::BadShape(format!(
            "length {len} is not a power of two >= 2"
        )));
    }
    Ok(len.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Direct O(4^n) evaluation of sum_x (-1)^(f(x) + <x,y>).
    fn naive_walsh(f: &TruthTable) -> Vec<i64> {
        let len = 1usize << f.num_vars();
        (0..len)
            .map(|y| {
                (0..len)
                    .map(|x| {
                        let e = f.get(x) as u32 + (x & y).count_ones();
                        if e.is_multiple_of(2) { 1 } else { -1 }
                    })
                    .sum()
            })
            .collect()
    }

    fn tt(n: u32, bits: &str) -> TruthTable {
        TruthTable::new(n, bits.chars().map(|c| c == '1').collect()).unwrap()
    }

    fn arb_table(max_n: u32) -> impl Strategy<Value = TruthTable> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), 1usize << n)
                .prop_map(move |bits| TruthTable::new(n, bits).unwrap())
        })
    }

    #[test]
    fn spectrum_of_constant_zero() {
        let f = tt(2, "0000");
        assert_eq!(walsh_transform(&f).values(), &[4, 0, 0, 0]);
        assert_eq!(is_bent(&f), Ok(false));
    }

    #[test]
    fn spectrum_of_x1x2() {
        let f = tt(2, "0001");
        assert_eq!(naive_walsh(&f), vec![2, 2, 2, -2]);
        assert_eq!(walsh_transform(&f).values(), &[2, 2, 2, -2]);
        assert_eq!(is_bent(&f), Ok(true));
    }

    #[test]
    fn x1x2_plus_x3x4_is_bent() {
        let f = TruthTable::from_fn(4, |x| {
            let b = |i: u32| (x >> (3 - i)) & 1 == 1;
            (b(0) & b(1)) ^ (b(2) & b(3))
        })
        .unwrap();
        let naive = naive_walsh(&f);
        assert!(naive.iter().all(|&v| v == 4 || v == -4));
        assert_eq!(walsh_transform(&f).values(), naive.as_slice());
        assert_eq!(is_bent(&f), Ok(true));
    }

    #[test]
    fn odd_variable_count_is_rejected() {
        assert_eq!(is_bent(&tt(1, "01")), Err(Error::OddVariableCount(1)));
        assert_eq!(
            is_bent(&TruthTable::zero(3).unwrap()).unwrap_err().name(),
            "OddVariableCount"
        );
    }

    #[test]
    fn inverse_walsh_examples() {
        let s = WalshSpectrum::new(vec![4, 0, 0, 0]).unwrap();
        assert_eq!(inverse_walsh(&s).unwrap(), tt(2, "0000"));
        let s = WalshSpectrum::new(vec![2, 2, 2, -2]).unwrap();
        assert_eq!(inverse_walsh(&s).unwrap(), tt(2, "0001"));
        let s = WalshSpectrum::new(vec![2, 2, 2, 2]).unwrap();
        assert_eq!(inverse_walsh(&s), Err(Error::NotASpectrum));
    }

    #[test]
    fn anf_examples() {
        let anf = algebraic_normal_form(&tt(2, "0001"));
        assert_eq!(anf.monomials().collect::<Vec<_>>(), vec![0b11]);
        assert_eq!(anf.degree(), 2);

        let anf = algebraic_normal_form(&tt(2, "0000"));
        assert_eq!(anf.monomials().count(), 0);
        assert_eq!(anf.degree(), 0);

        let anf = algebraic_normal_form(&tt(2, "0101"));
        assert_eq!(anf.monomials().collect::<Vec<_>>(), vec![0b01]);
        assert_eq!(anf.degree(), 1);
        assert_eq!(format!("{anf:?}"), "ANF(x2)");
    }

    #[test]
    fn hex_layout() {
        let f = tt(2, "0001");
        assert_eq!(f.to_hex(), "1");
        assert_eq!(TruthTable::from_hex("1").unwrap(), f);
        let g = TruthTable::from_hex("6996").unwrap();
        assert_eq!(g.num_vars(), 4);
        assert_eq!(g, TruthTable::from_word(4, 0x6996).unwrap());
        // x1 xor x2 xor x3 xor x4
        assert!((0..16).all(|x| g.get(x) == (x.count_ones() % 2 == 1)));
        assert_eq!(TruthTable::from_hex("80").unwrap().num_vars(), 3);
        assert!(TruthTable::from_hex("80").unwrap().bits()[0]);
    }

    #[test]
    fn hex_rejects_wrong_length() {
        assert!(TruthTable::from_hex("").is_err());
        assert!(TruthTable::from_hex("123").is_err());
        assert!(TruthTable::from_hex("12g4").is_err());
        assert!(TruthTable::from_hex_vars("12", 4).is_err());
        assert!(TruthTable::from_hex_vars("1234", 4).is_ok());
    }

    proptest! {
        #[test]
        fn fast_transform_matches_naive(f in arb_table(6)) {
            prop_assert_eq!(walsh_transform(&f).into_values(), naive_walsh(&f));
        }

        #[test]
        fn parseval(f in arb_table(10)) {
            let n = f.num_vars();
            let s = walsh_transform(&f);
            prop_assert_eq!(s.energy(), 1i128 << (2 * n));
            prop_assert!(s.values().iter().all(|v| v % 2 == 0));
        }

        #[test]
        fn inverse_round_trip(f in arb_table(10)) {
            prop_assert_eq!(inverse_walsh(&walsh_transform(&f)).unwrap(), f);
        }

        #[test]
        fn moebius_is_involution(f in arb_table(10)) {
            prop_assert_eq!(algebraic_normal_form(&f).to_truth_table(), f);
        }

        #[test]
        fn affine_functions_have_one_peak(n in 1u32..=8, a in any::<u32>(), c in any::<bool>()) {
            let a = (a as usize) & ((1 << n) - 1);
            let f = TruthTable::from_fn(n, |x| c ^ ((x & a).count_ones() % 2 == 1)).unwrap();
            prop_assert!(algebraic_degree(&f) <= 1);
            let s = walsh_transform(&f);
            let nonzero: Vec<_> = s.values().iter().enumerate().filter(|(_, &v)| v != 0).collect();
            prop_assert_eq!(nonzero.len(), 1);
            prop_assert_eq!(nonzero[0].0, a);
            prop_assert_eq!(nonzero[0].1.abs(), 1i64 << n);
        }

        #[test]
        fn hex_round_trip(f in arb_table(8).prop_filter("hex needs n >= 2", |f| f.num_vars() >= 2)) {
            prop_assert_eq!(TruthTable::from_hex(&f.to_hex()).unwrap(), f);
        }
    }
}
