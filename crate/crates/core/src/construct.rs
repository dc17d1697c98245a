//! Bent functions from quadruples of 2-regular matrices.
//!
//! Four `N x N` matrices `A, B, C, D` with
//! `V(A) = V(B)`, `V(C) = V(D)`, `H(A) = H(C)`, `H(B) = H(D)`
//! (`V`, `H` the vertical and horizontal signatures) are laid out as
//! `[[A, B], [C, D]]`. Every row and column of that `2N x 2N` support then
//! holds four ones on a 2-flat of `F_2^k`, `2^k = 2N`. Filling the ones with
//! `+-2^(k-1)` so that each line has an odd number of positive entries gives
//! a bent square whose lines are all Type 2 spectra.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bentsquare::{
    affine_subspace_test, classify_vector, is_bent_square, truth_table_from_square, BentSquare,
    VectorClass,
};
use crate::boolfn::{is_bent, TruthTable};
use crate::error::{Error, Result};
use crate::tworegular::{
    bipartition_signs, horizontal_signature, vertical_signature, Signature, TwoRegularMatrix,
};

/// Number of canonical sign patterns per quadruple.
pub const PATTERN_COUNT: usize = 32;

fn common_size(matrices: &[TwoRegularMatrix]) -> Result<usize> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::BadShape("no matrices given".into()))?
        .size();
    if let Some(m) = matrices.iter().find(|m| m.size() != first) {
        return Err(Error::MixedSizes(first, m.size()));
    }
    if !first.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(first));
    }
    Ok(first)
}

/// Partitions `matrices` by `(vertical, horizontal)` signature.
///
/// Groups and their members are in canonical order.
pub fn group_by_signatures(
    matrices: &[TwoRegularMatrix],
) -> Result<BTreeMap<(Signature, Signature), Vec<TwoRegularMatrix>>> {
    common_size(matrices)?;
    let mut groups: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for m in matrices {
        let key = (vertical_signature(m)?, horizontal_signature(m)?);
        groups.entry(key).or_default().push(m.clone());
    }
    for g in groups.values_mut() {
        g.sort();
    }
    Ok(groups)
}

/// Four matrices laid out as `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quadruple {
    pub a: TwoRegularMatrix,
    pub b: TwoRegularMatrix,
    pub c: TwoRegularMatrix,
    pub d: TwoRegularMatrix,
}

impl Quadruple {
    /// Checks the four signature equalities.
    pub fn new(
        a: TwoRegularMatrix,
        b: TwoRegularMatrix,
        c: TwoRegularMatrix,
        d: TwoRegularMatrix,
    ) -> Result<Self> {
        let q = Self { a, b, c, d };
        if !q.signatures_match()? {
            return Err(Error::InvalidMatrix(
                "quadruple signatures do not match".into(),
            ));
        }
        Ok(q)
    }

    pub fn size(&self) -> usize {
        self.a.size()
    }

    pub fn blocks(&self) -> [&TwoRegularMatrix; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn signatures_match(&self) -> Result<bool> {
        let n = self.size();
        for m in self.blocks() {
            if m.size() != n {
                return Err(Error::MixedSizes(n, m.size()));
            }
        }
        let v = |m| vertical_signature(m);
        let h = |m| horizontal_signature(m);
        Ok(v(&self.a)? == v(&self.b)?
            && v(&self.c)? == v(&self.d)?
            && h(&self.a)? == h(&self.c)?
            && h(&self.b)? == h(&self.d)?)
    }
}

/// The `2N x 2N` block support, as the four nonzero columns of each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSupport {
    rows: Vec<[usize; 4]>,
}

impl BlockSupport {
    pub fn side(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> [usize; 4] {
        self.rows[i]
    }

    /// Rows holding a one in column `j`, ascending.
    pub fn column(&self, j: usize) -> Vec<usize> {
        (0..self.side())
            .filter(|&i| self.rows[i].contains(&j))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let s = self.side();
        self.rows
            .iter()
            .map(|r| (0..s).map(|c| r.contains(&c) as u8).collect())
            .collect()
    }

    /// Every row and column support is a 2-dimensional affine subspace.
    pub fn is_affine(&self) -> bool {
        let lines_ok = |line: &[usize]| affine_subspace_test(line).unwrap_or(false);
        self.rows.iter().all(|r| lines_ok(r))
            && (0..self.side()).all(|j| lines_ok(&self.column(j)))
    }
}

pub fn block_support(q: &Quadruple) -> BlockSupport {
    let n = q.size();
    let mut rows = Vec::with_capacity(2 * n);
    for (left, right) in [(&q.a, &q.b), (&q.c, &q.d)] {
        for i in 0..n {
            let (a1, a2) = left.row(i);
            let (b1, b2) = right.row(i);
            rows.push([a1, a2, n + b1, n + b2]);
        }
    }
    BlockSupport { rows }
}

/// How the two nonzeros of each line of one block are signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockSign {
    Positive,
    Negative,
    /// One `+` and one `-` per line, following the block's bipartition;
    /// `flipped` takes the opposite class as positive.
    Alternating { flipped: bool },
}

impl BlockSign {
    fn constant(negative: bool) -> Self {
        if negative {
            BlockSign::Negative
        } else {
            BlockSign::Positive
        }
    }

    fn alternating(flipped: bool) -> Self {
        BlockSign::Alternating { flipped }
    }
}

/// One of the 32 canonical sign patterns.
///
/// Ids `0..16`: `A`, `D` constant, `B`, `C` alternating.
/// Ids `16..32`: `A`, `D` alternating, `B`, `C` constant.
/// Bit `i` of `id mod 16` picks the variant of block `i` (`A`, `B`, `C`, `D`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPattern {
    pub id: usize,
    pub blocks: [BlockSign; 4],
}

impl SignPattern {
    pub fn from_id(id: usize) -> Option<Self> {
        if id >= PATTERN_COUNT {
            return None;
        }
        let bit = |i: usize| (id >> i) & 1 == 1;
        let blocks = if id < 16 {
            [
                BlockSign::constant(bit(0)),
                BlockSign::alternating(bit(1)),
                BlockSign::alternating(bit(2)),
                BlockSign::constant(bit(3)),
            ]
        } else {
            [
                BlockSign::alternating(bit(0)),
                BlockSign::constant(bit(1)),
                BlockSign::constant(bit(2)),
                BlockSign::alternating(bit(3)),
            ]
        };
        Some(Self { id, blocks })
    }
}

pub fn canonical_sign_patterns() -> Vec<SignPattern> {
    (0..PATTERN_COUNT)
        .map(|id| SignPattern::from_id(id).unwrap())
        .collect()
}

/// `+-1` at every nonzero of the block support, zeros elsewhere.
pub fn sign_matrix(q: &Quadruple, p: &SignPattern) -> Vec<Vec<i64>> {
    let n = q.size();
    let mut out = vec![vec![0i64; 2 * n]; 2 * n];
    for (idx, (m, mode)) in q.blocks().into_iter().zip(p.blocks).enumerate() {
        let (r0, c0) = ((idx / 2) * n, (idx % 2) * n);
        let alt = match mode {
            BlockSign::Alternating { .. } => Some(bipartition_signs(m)),
            _ => None,
        };
        for r in 0..n {
            let (c1, c2) = m.row(r);
            let [s1, s2] = match mode {
                BlockSign::Positive => [1, 1],
                BlockSign::Negative => [-1, -1],
                BlockSign::Alternating { flipped } => {
                    let [x, y] = alt.as_ref().unwrap().row_signs(r);
                    if flipped {
                        [-x, -y]
                    } else {
                        [x, y]
                    }
                }
            };
            out[r0 + r][c0 + c1] = s1 as i64;
            out[r0 + r][c0 + c2] = s2 as i64;
        }
    }
    out
}

/// Scales the sign matrix of `(q, p)` by `2^(k-1) = N` and checks the result.
///
/// Panics if the square is not bent: the construction guarantees it.
pub fn build_bent_square(q: &Quadruple, p: &SignPattern) -> BentSquare {
    let n = q.size() as i64;
    let rows: Vec<Vec<i64>> = sign_matrix(q, p)
        .into_iter()
        .map(|r| r.into_iter().map(|s| s * n).collect())
        .collect();
    let sq = BentSquare::from_rows(&rows).expect("side 2N is a power of two");
    assert!(
        is_bent_square(&sq),
        "pattern {} on {q:?} is not a bent square",
        p.id
    );
    sq
}

/// The bent function of `build_bent_square(q, p)`, verified by a full
/// Walsh–Hadamard transform.
pub fn build_bent_function(q: &Quadruple, p: &SignPattern) -> TruthTable {
    let f = truth_table_from_square(&build_bent_square(q, p))
        .expect("bent squares are images of truth tables");
    assert_eq!(is_bent(&f), Ok(true), "pattern {} on {q:?}", p.id);
    f
}

/// Whether every row and transposed column of `sq` is a Type 2 vector.
pub fn all_lines_type2(sq: &BentSquare) -> bool {
    let is_t2 = |v: &[i64]| classify_vector(v) == Ok(VectorClass::Type2);
    sq.rows().all(is_t2) && sq.columns().all(|c| is_t2(&c))
}

/// Signature-indexed view of a matrix list for joining quadruples.
pub struct QuadrupleIndex {
    matrices: Vec<TwoRegularMatrix>,
    // matrix ids per vertical signature, per horizontal signature and per pair
    by_v: HashMap<usize, Vec<usize>>,
    by_h: HashMap<usize, Vec<usize>>,
    by_vh: HashMap<(usize, usize), Vec<usize>>,
    v_of: Vec<usize>,
    h_of: Vec<usize>,
    distinct_v: usize,
    sampling: OnceLock<Vec<((usize, usize), u128)>>,
}

impl QuadrupleIndex {
    /// Sorts `matrices` canonically and indexes them. Duplicates are kept.
    pub fn new(matrices: &[TwoRegularMatrix]) -> Result<Self> {
        common_size(matrices)?;
        let mut matrices = matrices.to_vec();
        matrices.sort();
        let mut v_ids: HashMap<Signature, usize> = HashMap::new();
        let mut h_ids: HashMap<Signature, usize> = HashMap::new();
        let mut v_of = Vec::with_capacity(matrices.len());
        let mut h_of = Vec::with_capacity(matrices.len());
        let mut by_v: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut by_h: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut by_vh: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, m) in matrices.iter().enumerate() {
            let next = v_ids.len();
            let v = *v_ids.entry(vertical_signature(m)?).or_insert(next);
            let next = h_ids.len();
            let h = *h_ids.entry(horizontal_signature(m)?).or_insert(next);
            v_of.push(v);
            h_of.push(h);
            by_v.entry(v).or_default().push(i);
            by_h.entry(h).or_default().push(i);
            by_vh.entry((v, h)).or_default().push(i);
        }
        Ok(Self {
            matrices,
            by_v,
            by_h,
            by_vh,
            v_of,
            h_of,
            distinct_v: v_ids.len(),
            sampling: OnceLock::new(),
        })
    }

    pub fn matrices(&self) -> &[TwoRegularMatrix] {
        &self.matrices
    }

    pub fn size(&self) -> usize {
        self.matrices[0].size()
    }

    /// Number of distinct vertical signatures among the matrices.
    pub fn distinct_vertical_signatures(&self) -> usize {
        self.distinct_v
    }

    // P[(h1, h2)] = sum_v g(v, h1) g(v, h2): the (A, B) pairs with V(A) = V(B),
    // H(A) = h1, H(B) = h2. A quadruple is two such pairs sharing (h1, h2).
    fn pair_weights(&self) -> HashMap<(usize, usize), u128> {
        let mut per_v: HashMap<usize, Vec<(usize, u128)>> = HashMap::new();
        for (&(v, h), ids) in &self.by_vh {
            per_v.entry(v).or_default().push((h, ids.len() as u128));
        }
        let mut weights: HashMap<(usize, usize), u128> = HashMap::new();
        for hs in per_v.values() {
            for &(h1, g1) in hs {
                for &(h2, g2) in hs {
                    *weights.entry((h1, h2)).or_default() += g1 * g2;
                }
            }
        }
        weights
    }

    /// Exact number of quadruples, `sum_{h1,h2} P(h1,h2)^2`.
    pub fn count(&self) -> u128 {
        self.pair_weights().values().map(|p| p * p).sum()
    }

    /// Quadruples by id, lexicographic in `(A, B, C, D)`.
    pub fn iter_ids(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        (0..self.matrices.len()).flat_map(move |a| {
            let (va, ha) = (self.v_of[a], self.h_of[a]);
            self.by_v[&va].iter().flat_map(move |&b| {
                let hb = self.h_of[b];
                self.by_h[&ha].iter().flat_map(move |&c| {
                    let vc = self.v_of[c];
                    self.by_vh
                        .get(&(vc, hb))
                        .map(|ds| ds.as_slice())
                        .unwrap_or(&[])
                        .iter()
                        .map(move |&d| [a, b, c, d])
                })
            })
        })
    }

    pub fn quadruple(&self, [a, b, c, d]: [usize; 4]) -> Quadruple {
        let m = |i: usize| self.matrices[i].clone();
        Quadruple {
            a: m(a),
            b: m(b),
            c: m(c),
            d: m(d),
        }
    }

    /// Streams every quadruple in canonical order.
    pub fn quadruples(&self) -> impl Iterator<Item = Quadruple> + '_ {
        self.iter_ids().map(move |ids| self.quadruple(ids))
    }

    /// Uniform random quadruple.
    ///
    /// `(H(A), H(B))` is drawn with weight `P^2`; then `V(A)` and `V(C)` are
    /// drawn independently with weight `g(v, H(A)) g(v, H(B))`, and each
    /// block uniformly from its `(V, H)` group.
    pub fn sample_ids<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<[usize; 4]> {
        let weights = self.sampling.get_or_init(|| {
            let mut w: Vec<_> = self
                .pair_weights()
                .into_iter()
                .map(|(k, p)| (k, p * p))
                .collect();
            w.sort_unstable();
            w
        });
        let (h1, h2) = pick_weighted(rng, weights.iter().copied())?;
        let mut vs: Vec<(usize, u128)> = self
            .by_v
            .keys()
            .filter_map(|&v| {
                let g1 = self.by_vh.get(&(v, h1))?.len() as u128;
                let g2 = self.by_vh.get(&(v, h2))?.len() as u128;
                Some((v, g1 * g2))
            })
            .collect();
        vs.sort_unstable();
        let va = pick_weighted(rng, vs.iter().copied())?;
        let vc = pick_weighted(rng, vs.iter().copied())?;
        let mut member = |v, h| {
            let g = &self.by_vh[&(v, h)];
            g[rng.gen_range(0..g.len())]
        };
        Some([member(va, h1), member(va, h2), member(vc, h1), member(vc, h2)])
    }
}

fn pick_weighted<T: Copy, R: Rng + ?Sized>(
    rng: &mut R,
    items: impl Iterator<Item = (T, u128)> + Clone,
) -> Option<T> {
    let total: u128 = items.clone().map(|(_, w)| w).sum();
    if total == 0 {
        return None;
    }
    let mut r = rng.gen_range(0..total);
    for (t, w) in items {
        if r < w {
            return Some(t);
        }
        r -= w;
    }
    unreachable!()
}

/// Every quadruple of `matrices`, canonical order.
pub fn assemble_quadruples(matrices: &[TwoRegularMatrix]) -> Result<Vec<Quadruple>> {
    let index = QuadrupleIndex::new(matrices)?;
    Ok(index.quadruples().collect())
}

/// Distinct verified bent functions from all quadruples times all 32 patterns,
/// stopping once `limit` distinct functions are collected.
pub fn emit_bent_functions(
    matrices: &[TwoRegularMatrix],
    limit: Option<usize>,
) -> Result<BTreeSet<TruthTable>> {
    let index = QuadrupleIndex::new(matrices)?;
    let patterns = canonical_sign_patterns();
    let mut out = BTreeSet::new();
    for q in index.quadruples() {
        for p in &patterns {
            if limit.is_some_and(|l| out.len() >= l) {
                return Ok(out);
            }
            out.insert(build_bent_function(&q, p));
        }
    }
    Ok(out)
}

/// Which emitted functions to rebuild and verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    /// Every `(quadruple, pattern)` pair.
    All,
    /// This many uniform `(quadruple, pattern)` draws.
    Sample { count: usize, seed: u64 },
}

/// Summary of a construction run, in the CLI's JSON shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionReport {
    #[serde(rename = "N")]
    pub size: usize,
    pub n: u32,
    pub quadruples: u64,
    pub patterns: usize,
    pub emitted: u64,
    pub verified_bent: u64,
    pub sampled_verifications: u64,
}

/// Counts the construction's output without storing it and verifies the
/// requested subset (rebuild, bent-square test, full WHT, Type 2 lines).
///
/// `emitted` is `32 x quadruples`: distinct pairs give distinct squares.
/// Verification runs on the current rayon pool; results do not depend on it.
pub fn construction_report(
    matrices: &[TwoRegularMatrix],
    verify: Verification,
) -> Result<ConstructionReport> {
    use rand::SeedableRng;

    let index = QuadrupleIndex::new(matrices)?;
    let size = index.size();
    let quadruples = u64::try_from(index.count()).map_err(|_| Error::TooLarge {
        what: "quadruple count",
        value: usize::MAX,
        max: u64::MAX as usize,
    })?;
    let jobs: Vec<([usize; 4], usize)> = match verify {
        Verification::All => index
            .iter_ids()
            .flat_map(|ids| (0..PATTERN_COUNT).map(move |p| (ids, p)))
            .collect(),
        Verification::Sample { count, seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map_while(|_| {
                    let ids = index.sample_ids(&mut rng)?;
                    Some((ids, rng.gen_range(0..PATTERN_COUNT)))
                })
                .collect()
        }
    };
    let verified = jobs
        .par_iter()
        .filter(|&&(ids, p)| {
            let q = index.quadruple(ids);
            let sq = build_bent_square(&q, &SignPattern::from_id(p).unwrap());
            let f = truth_table_from_square(&sq).expect("bent square");
            is_bent(&f) == Ok(true) && all_lines_type2(&sq)
        })
        .count() as u64;
    assert_eq!(verified, jobs.len() as u64, "construction produced a non-bent function");
    Ok(ConstructionReport {
        size,
        n: 2 * (size.trailing_zeros() + 1),
        quadruples,
        patterns: PATTERN_COUNT,
        emitted: quadruples * PATTERN_COUNT as u64,
        verified_bent: verified,
        sampled_verifications: jobs.len() as u64,
    })
}

/// Number of `+-1` fillings of the support of `q` that give a bent square.
///
/// Exhaustive over `2^(8N)` fillings, so only `N = 2` is allowed.
pub fn count_valid_fillings(q: &Quadruple) -> Result<u64> {
    let n = q.size();
    if n > 2 {
        return Err(Error::TooLarge {
            what: "N for exhaustive sign search",
            value: n,
            max: 2,
        });
    }
    let support = block_support(q);
    let cells: Vec<(usize, usize)> = (0..support.side())
        .flat_map(|i| support.row(i).map(|j| (i, j)))
        .collect();
    let side = support.side();
    let mag = n as i64;
    let mut valid = 0;
    for mask in 0u64..(1 << cells.len()) {
        let mut rows = vec![vec![0i64; side]; side];
        for (t, &(i, j)) in cells.iter().enumerate() {
            rows[i][j] = if (mask >> t) & 1 == 1 { -mag } else { mag };
        }
        if is_bent_square(&BentSquare::from_rows(&rows).unwrap()) {
            valid += 1;
        }
    }
    Ok(valid)
}
