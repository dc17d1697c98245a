//! Bent squares: the `2^k x 2^k` matrix `A_f * H_k` obtained by reshaping the
//! sign vector of a function in `2k` variables row-major and transforming each
//! row.
//!
//! A matrix is a bent square iff every row and every column is the Walsh
//! spectrum of some function in `k` variables.

use serde::{Deserialize, Serialize};

use crate::boolfn::{fwht, inverse_walsh, log2_exact, TruthTable, WalshSpectrum};
use crate::error::{Error, Result};

/// Square integer matrix with side `2^k`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SquareWire", into = "SquareWire")]
pub struct BentSquare {
    k: u32,
    entries: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct SquareWire {
    k: u32,
    entries: Vec<Vec<i64>>,
}

impl TryFrom<SquareWire> for BentSquare {
    type Error = Error;

    fn try_from(w: SquareWire) -> Result<Self> {
        let sq = BentSquare::from_rows(&w.entries)?;
        if sq.k != w.k {
            return Err(Error::BadShape(format!(
                "k = {} but rows describe k = {}",
                w.k, sq.k
            )));
        }
        Ok(sq)
    }
}

impl From<BentSquare> for SquareWire {
    fn from(sq: BentSquare) -> Self {
        SquareWire {
            k: sq.k,
            entries: sq.rows().map(<[i64]>::to_vec).collect(),
        }
    }
}

impl BentSquare {
    /// Wraps a row-major matrix; the side must be a power of two `>= 2`.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let side = rows.len();
        let k = log2_exact(side)?;
        let mut entries = Vec::with_capacity(side * side);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != side {
                return Err(Error::BadShape(format!(
                    "row {i} has {} entries, expected {side}",
                    r.len()
                )));
            }
            entries.extend_from_slice(r);
        }
        Ok(Self { k, entries })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn side(&self) -> usize {
        1 << self.k
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.side() + col]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        let s = self.side();
        &self.entries[i * s..(i + 1) * s]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.entries.chunks_exact(self.side())
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.side()).map(|j| self.column(j))
    }
}

/// Builds `A_f * H_{n/2}` for a function in an even number of variables.
pub fn square_from_truth_table(f: &TruthTable) -> Result<BentSquare> {
    let n = f.num_vars();
    if !n.is_multiple_of(2) {
        return Err(Error::OddVariableCount(n));
    }
    let k = n / 2;
    let mut entries = f.signs();
    for row in entries.chunks_exact_mut(1 << k) {
        fwht(row);
    }
    Ok(BentSquare { k, entries })
}

/// Inverts [`square_from_truth_table`]: `B * H_k / 2^k`, flattened row-major.
pub fn truth_table_from_square(b: &BentSquare) -> Result<TruthTable> {
    let scale = 1i64 << b.k;
    let mut signs = b.entries.clone();
    for row in signs.chunks_exact_mut(b.side()) {
        fwht(row);
        for v in row.iter_mut() {
            if v.abs() != scale {
                return Err(Error::NotABentSquareImage);
            }
            *v /= scale;
        }
    }
    TruthTable::from_signs(&signs)
}

// Whether `v * H / len` is a +-1 vector.
fn is_spectrum(v: &[i64]) -> bool {
    let scale = v.len() as i64;
    let mut w = v.to_vec();
    fwht(&mut w);
    w.iter().all(|x| x.abs() == scale)
}

/// Every row and every transposed column is a Walsh spectrum in `k` variables.
pub fn is_bent_square(b: &BentSquare) -> bool {
    b.rows().all(is_spectrum) && b.columns().all(|c| is_spectrum(&c))
}

/// [`is_bent_square`] on raw rows; fails with `BadShape` for non-square or
/// non-power-of-two input.
pub fn is_bent_square_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<bool> {
    BentSquare::from_rows(rows).map(|b| is_bent_square(&b))
}

/// Shape class of a candidate row or column of a bent square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorClass {
    /// One nonzero entry `+-2^k`: the spectrum of an affine function.
    Type1,
    /// Four nonzero entries `+-2^(k-1)` on a 2-flat with an odd number of
    /// positive entries.
    Type2,
    /// Some other Walsh spectrum.
    OtherAdmissible,
    /// Not a Walsh spectrum at all.
    Inadmissible,
}

impl VectorClass {
    pub fn is_admissible(self) -> bool {
        self != VectorClass::Inadmissible
    }
}

pub fn classify_vector(v: &[i64]) -> Result<VectorClass> {
    let k = log2_exact(v.len()).or_else(|_| {
        if v.len() == 1 {
            Ok(0)
        } else {
            Err(Error::BadShape(format!(
                "vector length {} is not a power of two",
                v.len()
            )))
        }
    })?;
    let class = structural_class(k, v);
    if let Some(c) = class {
        debug_assert!(
            is_spectrum(v),
            "{c:?} verdict for a vector that is not a spectrum: {v:?}"
        );
        return Ok(c);
    }
    Ok(if is_spectrum(v) {
        VectorClass::OtherAdmissible
    } else {
        VectorClass::Inadmissible
    })
}

fn structural_class(k: u32, v: &[i64]) -> Option<VectorClass> {
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
    match support.len() {
        1 if v[support[0]].abs() == 1i64 << k => Some(VectorClass::Type1),
        4 if k >= 2 => {
            let half = 1i64 << (k - 1);
            let magnitudes_ok = support.iter().all(|&i| v[i].abs() == half);
            let positives = support.iter().filter(|&&i| v[i] > 0).count();
            let flat = support.iter().fold(0, |acc, &i| acc ^ i) == 0;
            (magnitudes_ok && flat && positives % 2 == 1).then_some(VectorClass::Type2)
        }
        _ => None,
    }
}

/// Whether four distinct points of `F_2^k` form a 2-dimensional affine
/// subspace; for a 4-set this is exactly "their XOR is zero".
pub fn affine_subspace_test(indices: &[usize]) -> Result<bool> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if indices.len() != 4 || sorted.len() != 4 {
        return Err(Error::BadCardinality(sorted.len()));
    }
    Ok(indices.iter().fold(0, |acc, &i| acc ^ i) == 0)
}

/// Spectrum view of one row, for callers that want the boolfn API.
pub fn row_spectrum(b: &BentSquare, i: usize) -> WalshSpectrum {
    WalshSpectrum::new(b.row(i).to_vec()).expect("side is a power of two")
}

/// The function in `k` variables whose spectrum is row `i`, if any.
pub fn row_function(b: &BentSquare, i: usize) -> Result<TruthTable> {
    inverse_walsh(&row_spectrum(b, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{algebraic_degree, is_bent, walsh_transform};

    fn x1x2_x3x4() -> TruthTable {
        TruthTable::from_fn(4, |x| {
            let b = |i: u32| (x >> (3 - i)) & 1 == 1;
            (b(0) & b(1)) ^ (b(2) & b(3))
        })
        .unwrap()
    }

    // A_f * H_k by the definition, one entry at a time.
    fn naive_square(f: &TruthTable) -> Vec<Vec<i64>> {
        let k = f.num_vars() / 2;
        let side = 1usize << k;
        let signs = f.signs();
        (0..side)
            .map(|i| {
                (0..side)
                    .map(|j| {
                        (0..side)
                            .map(|t| {
                                let h = if (t & j).count_ones() % 2 == 0 { 1 } else { -1 };
                                signs[i * side + t] * h
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constant_zero_square() {
        let f = TruthTable::zero(2).unwrap();
        let sq = square_from_truth_table(&f).unwrap();
        assert_eq!(sq, BentSquare::from_rows(&[[2, 0], [2, 0]]).unwrap());
        assert!(!is_bent_square(&sq));
    }

    #[test]
    fn x1x2_square() {
        let f = TruthTable::from_hex("1").unwrap();
        let sq = square_from_truth_table(&f).unwrap();
        assert_eq!(sq, BentSquare::from_rows(&[[2, 0], [0, 2]]).unwrap());
        assert!(is_bent_square(&sq));
        assert_eq!(truth_table_from_square(&sq).unwrap(), f);
    }

    #[test]
    fn x1x2_x3x4_square_has_type2_rows() {
        // each row is the spectrum of x3x4 + const
        let f = x1x2_x3x4();
        let sq = square_from_truth_table(&f).unwrap();
        let naive = naive_square(&f);
        assert_eq!(sq, BentSquare::from_rows(&naive).unwrap());
        assert_eq!(
            naive,
            vec![
                vec![2, 2, 2, -2],
                vec![2, 2, 2, -2],
                vec![2, 2, 2, -2],
                vec![-2, -2, -2, 2]
            ]
        );
        assert!(is_bent_square(&sq));
        assert_eq!(truth_table_from_square(&sq).unwrap(), f);
    }

    #[test]
    fn inner_product_square_is_a_signed_permutation() {
        // x1x3 + x2x4: row x is the linear function <x, y>
        let f = TruthTable::from_fn(4, |x| ((x >> 2) & x & 0b11).count_ones() % 2 == 1).unwrap();
        let sq = square_from_truth_table(&f).unwrap();
        assert_eq!(sq, BentSquare::from_rows(&naive_square(&f)).unwrap());
        for (i, r) in sq.rows().enumerate() {
            let nz: Vec<_> = (0..4).filter(|&j| r[j] != 0).collect();
            assert_eq!(nz, vec![i]);
            assert_eq!(r[i], 4);
        }
        assert!(is_bent_square(&sq));
        assert_eq!(truth_table_from_square(&sq).unwrap(), f);
    }

    #[test]
    fn square_rejects_odd_n() {
        let f = TruthTable::zero(3).unwrap();
        assert_eq!(square_from_truth_table(&f), Err(Error::OddVariableCount(3)));
    }

    #[test]
    fn zero_matrix_is_not_an_image() {
        let z = BentSquare::from_rows(&[[0i64; 4]; 4]).unwrap();
        assert_eq!(truth_table_from_square(&z), Err(Error::NotABentSquareImage));
    }

    #[test]
    fn bent_square_predicate_examples() {
        assert_eq!(is_bent_square_rows(&[[2, 0], [0, 2]]), Ok(true));
        assert_eq!(is_bent_square_rows(&[[2, 0], [2, 0]]), Ok(false));
        assert!(matches!(
            is_bent_square_rows(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
            Err(Error::BadShape(_))
        ));
        assert!(matches!(
            is_bent_square_rows(&[vec![2, 0], vec![0]]),
            Err(Error::BadShape(_))
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_vector(&[0, 0, 4, 0]), Ok(VectorClass::Type1));
        assert_eq!(classify_vector(&[2, 2, 2, -2]), Ok(VectorClass::Type2));
        assert_eq!(classify_vector(&[2, 2, 2, 2]), Ok(VectorClass::Inadmissible));
        assert_eq!(classify_vector(&[-2, 0]), Ok(VectorClass::Type1));
        // (1,1) * H_1 / 2 = (1,0)
        assert_eq!(classify_vector(&[1, 1]), Ok(VectorClass::Inadmissible));
        assert!(matches!(classify_vector(&[1, 2, 3]), Err(Error::BadShape(_))));
    }

    #[test]
    fn classify_other_admissible() {
        // bent function in 4 variables: spectrum is all +-4, neither type
        let s = walsh_transform(&x1x2_x3x4());
        assert_eq!(classify_vector(s.values()), Ok(VectorClass::OtherAdmissible));
    }

    #[test]
    fn affine_subspace_examples() {
        assert_eq!(affine_subspace_test(&[0b000, 0b001, 0b100, 0b101]), Ok(true));
        assert_eq!(affine_subspace_test(&[0, 1, 2, 3]), Ok(true));
        assert_eq!(affine_subspace_test(&[0b000, 0b001, 0b010, 0b100]), Ok(false));
        assert_eq!(affine_subspace_test(&[1, 1, 2, 3]), Err(Error::BadCardinality(3)));
        assert_eq!(affine_subspace_test(&[1, 2, 3]), Err(Error::BadCardinality(3)));
    }

    // A 4-set is a 2-flat iff it is {a, a+u, a+v, a+u+v} for independent u, v.
    #[test]
    fn xor_test_matches_flat_enumeration() {
        for k in 2..=4usize {
            let size = 1usize << k;
            let mut flats = std::collections::BTreeSet::new();
            for a in 0..size {
                for u in 1..size {
                    for v in 1..size {
                        if u == v {
                            continue;
                        }
                        let mut s = [a, a ^ u, a ^ v, a ^ u ^ v];
                        s.sort_unstable();
                        flats.insert(s);
                    }
                }
            }
            for a in 0..size {
                for b in a + 1..size {
                    for c in b + 1..size {
                        for d in c + 1..size {
                            let set = [a, b, c, d];
                            assert_eq!(
                                affine_subspace_test(&set).unwrap(),
                                flats.contains(&set),
                                "{set:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn all_four_variable_functions() {
        for word in 0..=u16::MAX {
            let f = TruthTable::from_word(4, word as u64).unwrap();
            let sq = square_from_truth_table(&f).unwrap();
            assert_eq!(is_bent_square(&sq), is_bent(&f).unwrap(), "{f:?}");
            assert_eq!(truth_table_from_square(&sq).unwrap(), f);
        }
        for word in 0..16u64 {
            let f = TruthTable::from_word(2, word).unwrap();
            let sq = square_from_truth_table(&f).unwrap();
            assert_eq!(is_bent_square(&sq), is_bent(&f).unwrap());
        }
    }

    #[test]
    fn sampled_six_variable_functions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let bent = TruthTable::from_fn(6, |x| {
            let b = |i: u32| (x >> (5 - i)) & 1 == 1;
            (b(0) & b(1)) ^ (b(2) & b(3)) ^ (b(4) & b(5))
        })
        .unwrap();
        let mut samples = vec![bent];
        samples.extend((0..500).map(|_| TruthTable::from_word(6, rng.gen()).unwrap()));
        for f in samples {
            let sq = square_from_truth_table(&f).unwrap();
            assert_eq!(is_bent_square(&sq), is_bent(&f).unwrap());
            assert_eq!(truth_table_from_square(&sq).unwrap(), f);
        }
    }

    // Every vector over {-2^k..2^k} in the sparse shapes, k = 2 and 3.
    #[test]
    fn structural_verdicts_are_spectra() {
        for k in 2..=3u32 {
            let len = 1usize << k;
            let vals = [-(1i64 << k), -(1 << (k - 1)), 0, 1 << (k - 1), 1 << k];
            let mut v = vec![0i64; len];
            // all vectors with at most four nonzeros drawn from `vals`
            fn rec(v: &mut Vec<i64>, pos: usize, nz: usize, vals: &[i64]) {
                if pos == v.len() {
                    let c = classify_vector(v).unwrap();
                    let admissible = inverse_walsh(&WalshSpectrum::new(v.clone()).unwrap()).is_ok();
                    assert_eq!(c.is_admissible(), admissible, "{v:?}");
                    if c == VectorClass::Type2 {
                        let f = inverse_walsh(&WalshSpectrum::new(v.clone()).unwrap()).unwrap();
                        assert_eq!(algebraic_degree(&f), 2, "{v:?}");
                    }
                    return;
                }
                for &x in vals {
                    let nz2 = nz + (x != 0) as usize;
                    if nz2 > 4 {
                        continue;
                    }
                    v[pos] = x;
                    rec(v, pos + 1, nz2, vals);
                }
                v[pos] = 0;
            }
            rec(&mut v, 0, 0, &vals);
        }
    }

    #[test]
    fn type2_spectra_have_degree_two() {
        for k in 2..=3u32 {
            for word in 0..(1u64 << (1 << k)) {
                let f = TruthTable::from_word(k, word).unwrap();
                let s = walsh_transform(&f);
                if classify_vector(s.values()).unwrap() == VectorClass::Type2 {
                    assert_eq!(algebraic_degree(&f), 2, "{f:?}");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let sq = BentSquare::from_rows(&[[2, 0], [0, 2]]).unwrap();
        let js = serde_json::to_string(&sq).unwrap();
        assert_eq!(js, r#"{"k":1,"entries":[[2,0],[0,2]]}"#);
        let back: BentSquare = serde_json::from_str(&js).unwrap();
        assert_eq!(back, sq);
        assert!(serde_json::from_str::<BentSquare>(r#"{"k":2,"entries":[[2,0],[0,2]]}"#).is_err());
    }
}
