//! `N x N` binary matrices with exactly two ones in every row and column.
//!
//! A matrix is stored as one sorted column pair per row. Ordering matrices by
//! their row-pair sequence gives the canonical order used by enumeration,
//! grouping and quadruple streaming.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default largest `N` that [`enumerate`] accepts.
pub const DEFAULT_ENUMERATION_CAP: usize = 6;

/// A 2-regular `N x N` binary matrix, one sorted column pair per row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MatrixWire", into = "MatrixWire")]
pub struct TwoRegularMatrix {
    rows: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    #[serde(rename = "N")]
    size: usize,
    rows: Vec<[usize; 2]>,
}

impl TryFrom<MatrixWire> for TwoRegularMatrix {
    type Error = Error;

    fn try_from(w: MatrixWire) -> Result<Self> {
        if w.rows.len() != w.size {
            return Err(Error::InvalidMatrix(format!(
                "N = {} but {} rows given",
                w.size,
                w.rows.len()
            )));
        }
        Self::new(w.rows.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<TwoRegularMatrix> for MatrixWire {
    fn from(m: TwoRegularMatrix) -> Self {
        MatrixWire {
            size: m.size(),
            rows: m.rows.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TwoRegularMatrix {
    /// Validates and canonicalizes: each pair is sorted, its entries are
    /// distinct and in range, and every column is used exactly twice.
    pub fn new(rows: Vec<(usize, usize)>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "N = {n}: a row needs two distinct columns"
            )));
        }
        let mut uses = vec![0u8; n];
        let mut canon = Vec::with_capacity(n);
        for (i, &(a, b)) in rows.iter().enumerate() {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || b >= n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has columns ({a}, {b})"
                )));
            }
            uses[a] += 1;
            uses[b] += 1;
            canon.push((a, b));
        }
        if let Some(c) = uses.iter().position(|&u| u != 2) {
            return Err(Error::InvalidMatrix(format!(
                "column {c} holds {} ones",
                uses[c]
            )));
        }
        Ok(Self { rows: canon })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[(usize, usize)] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> (usize, usize) {
        self.rows[i]
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        let (a, b) = self.rows[row];
        a == col || b == col
    }

    /// For each column, the two rows holding a one, ascending.
    pub fn column_rows(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut cols = vec![(usize::MAX, usize::MAX); n];
        for (i, &(a, b)) in self.rows.iter().enumerate() {
            for c in [a, b] {
                let slot = &mut cols[c];
                if slot.0 == usize::MAX {
                    slot.0 = i;
                } else {
                    slot.1 = i;
                }
            }
        }
        cols
    }

    /// The transposed matrix, also 2-regular.
    pub fn transpose(&self) -> Self {
        Self {
            rows: self.column_rows(),
        }
    }

    /// Dense 0/1 rows.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.size();
        self.rows
            .iter()
            .map(|&(a, b)| (0..n).map(|c| (c == a || c == b) as u8).collect())
            .collect()
    }
}

impl fmt::Debug for TwoRegularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter()).finish()
    }
}

/// Streams every `N x N` 2-regular matrix in canonical order.
///
/// Fails with `TooLarge` above [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate(n: usize) -> Result<Enumerate> {
    enumerate_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<Enumerate> {
    if n > cap {
        return Err(Error::TooLarge {
            what: "N for enumeration",
            value: n,
            max: cap,
        });
    }
    if n < 2 {
        return Err(Error::BadShape(format!("enumeration needs N >= 2, got {n}")));
    }
    Ok(Enumerate {
        n,
        slots: vec![2; n],
        stack: Vec::with_capacity(n),
        started: false,
        done: false,
    })
}

/// Backtracking iterator behind [`enumerate`].
///
/// Placing a pair is allowed when no column then needs more ones than rows
/// remain; with row sums fixed at two that condition is also sufficient, so
/// the search never dead-ends.
pub struct Enumerate {
    n: usize,
    slots: Vec<u8>,
    stack: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

impl Enumerate {
    fn successor(&self, (a, b): (usize, usize)) -> Option<(usize, usize)> {
        if b + 1 < self.n {
            Some((a, b + 1))
        } else if a + 2 < self.n {
            Some((a + 1, a + 2))
        } else {
            None
        }
    }

    fn fits(&self, (a, b): (usize, usize)) -> bool {
        if self.slots[a] == 0 || self.slots[b] == 0 {
            return false;
        }
        let rows_left = (self.n - self.stack.len() - 1) as u8;
        self.slots.iter().enumerate().all(|(c, &s)| {
            let after = if c == a || c == b { s - 1 } else { s };
            after <= rows_left
        })
    }

    fn push(&mut self, p: (usize, usize)) {
        self.slots[p.0] -= 1;
        self.slots[p.1] -= 1;
        self.stack.push(p);
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        let p = self.stack.pop()?;
        self.slots[p.0] += 1;
        self.slots[p.1] += 1;
        Some(p)
    }
}

impl Iterator for Enumerate {
    type Item = TwoRegularMatrix;

    fn next(&mut self) -> Option<TwoRegularMatrix> {
        if self.done {
            return None;
        }
        let mut start = if self.started {
            match self.pop() {
                Some(p) => self.successor(p),
                None => None,
            }
        } else {
            self.started = true;
            Some((0, 1))
        };
        loop {
            if self.stack.len() == self.n {
                return Some(TwoRegularMatrix {
                    rows: self.stack.clone(),
                });
            }
            let mut cand = start;
            while let Some(p) = cand {
                if self.fits(p) {
                    break;
                }
                cand = self.successor(p);
            }
            match cand {
                Some(p) => {
                    self.push(p);
                    start = Some((0, 1));
                }
                None => match self.pop() {
                    Some(p) => start = self.successor(p),
                    None => {
                        self.done = true;
                        return None;
                    }
                },
            }
        }
    }
}

/// Completion counts for the row-by-row column-state process.
///
/// State `(a, b)`: `a` columns still need two ones, `b` need one; the number
/// of rows left is `(2a + b) / 2`. A row picks two columns among the `a`
/// (`C(a,2)` ways, to `(a-2, b+2)`), one from each group (`a*b` ways, to
/// `(a-1, b)`), or two among the `b` (`C(b,2)` ways, to `(a, b-2)`).
pub struct CompletionTable {
    n: usize,
    // ways[a][b], b in 0..=2n
    ways: Vec<Vec<BigUint>>,
}

impl CompletionTable {
    pub fn new(n: usize) -> Self {
        let width = 2 * n + 1;
        let mut ways = vec![vec![BigUint::zero(); width]; n + 1];
        ways[0][0] = BigUint::one();
        // every transition lowers 2a + b by 2
        for total in (2..=2 * n).step_by(2) {
            for a in 0..=n.min(total / 2) {
                let b = total - 2 * a;
                if b >= width {
                    continue;
                }
                let mut w = BigUint::zero();
                if a >= 2 && b + 2 < width {
                    w += choose2(a) * &ways[a - 2][b + 2];
                }
                if a >= 1 && b >= 1 {
                    w += BigUint::from(a * b) * &ways[a - 1][b];
                }
                if b >= 2 {
                    w += choose2(b) * &ways[a][b - 2];
                }
                ways[a][b] = w;
            }
        }
        Self { n, ways }
    }

    pub fn ways(&self, a: usize, b: usize) -> &BigUint {
        &self.ways[a][b]
    }

    /// Number of `N x N` 2-regular matrices.
    pub fn total(&self) -> &BigUint {
        &self.ways[self.n][0]
    }
}

fn choose2(x: usize) -> BigUint {
    BigUint::from(x * x.saturating_sub(1) / 2)
}

/// Exact `|M|` for side `N`; zero for `N = 1`.
pub fn count(n: usize) -> BigUint {
    CompletionTable::new(n).total().clone()
}

/// Uniform draw from the `N x N` 2-regular matrices, deterministic in `seed`.
pub fn sample_uniform(n: usize, seed: u64) -> Result<TwoRegularMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sampler::new(n)?.sample(&mut rng)
}

/// `count` independent uniform draws from one seeded stream.
pub fn sample_many(n: usize, count: usize, seed: u64) -> Result<Vec<TwoRegularMatrix>> {
    let sampler = Sampler::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}

/// Reusable uniform sampler; builds the completion table once.
pub struct Sampler {
    table: CompletionTable,
}

impl Sampler {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadShape(format!("sampling needs N >= 2, got {n}")));
        }
        Ok(Self {
            table: CompletionTable::new(n),
        })
    }

    pub fn size(&self) -> usize {
        self.table.n
    }

    /// One matrix. A single rank below the remaining completion count is
    /// drawn per row and decoded into the row's pair, so every completion
    /// is equally likely.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<TwoRegularMatrix> {
        let n = self.table.n;
        let mut slots = vec![2u8; n];
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let two: Vec<usize> = (0..n).filter(|&c| slots[c] == 2).collect();
            let one: Vec<usize> = (0..n).filter(|&c| slots[c] == 1).collect();
            let (a, b) = (two.len(), one.len());
            let mut rank = rng.gen_biguint_below(self.table.ways(a, b));

            let mut pick = None;
            if a >= 2 {
                let sub = self.table.ways(a - 2, b + 2);
                let w = choose2(a) * sub;
                if rank < w {
                    let t = (&rank / sub).to_usize().unwrap();
                    let (i, j) = unrank_pair(t, a);
                    pick = Some((two[i], two[j]));
                } else {
                    rank -= w;
                }
            }
            if pick.is_none() && a >= 1 && b >= 1 {
                let sub = self.table.ways(a - 1, b);
                let w = BigUint::from(a * b) * sub;
                if rank < w {
                    let t = (&rank / sub).to_usize().unwrap();
                    pick = Some((two[t / b], one[t % b]));
                } else {
                    rank -= w;
                }
            }
            if pick.is_none() {
                let sub = self.table.ways(a, b - 2);
                let t = (&rank / sub).to_usize().unwrap();
                let (i, j) = unrank_pair(t, b);
                pick = Some((one[i], one[j]));
            }
            let (x, y) = pick.unwrap();
            slots[x] -= 1;
            slots[y] -= 1;
            rows.push((x.min(y), x.max(y)));
        }
        TwoRegularMatrix::new(rows)
    }
}

// t-th pair (i < j) of 0..m in lexicographic order
fn unrank_pair(mut t: usize, m: usize) -> (usize, usize) {
    for i in 0..m {
        let run = m - 1 - i;
        if t < run {
            return (i, i + 1 + t);
        }
        t -= run;
    }
    unreachable!("pair rank out of range")
}

/// Per-line XOR sums of the two indices holding a one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signature(Vec<usize>);

impl Signature {
    pub fn sums(&self) -> &[usize] {
        &self.0
    }

    /// XOR of all entries; zero for every real signature.
    pub fn total(&self) -> usize {
        self.0.iter().fold(0, |acc, &s| acc ^ s)
    }

    /// Entries as `bits`-wide binary strings, e.g. `100`.
    pub fn to_binary(&self, bits: usize) -> Vec<String> {
        self.0.iter().map(|s| format!("{s:0bits$b}")).collect()
    }
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

/// XOR of the two column indices in each row.
pub fn vertical_signature(m: &TwoRegularMatrix) -> Result<Signature> {
    check_power_of_two(m.size())?;
    Ok(Signature(m.rows.iter().map(|&(a, b)| a ^ b).collect()))
}

/// XOR of the two row indices in each column.
pub fn horizontal_signature(m: &TwoRegularMatrix) -> Result<Signature> {
    check_power_of_two(m.size())?;
    Ok(Signature(
        m.column_rows().iter().map(|&(a, b)| a ^ b).collect(),
    ))
}

/// A nonzero entry, as `(row, column)`.
pub type Position = (usize, usize);

/// Cycles of the graph joining nonzero entries that share a row or column.
///
/// Each cycle starts at its smallest position and steps to the row partner
/// first, so consecutive positions alternate row and column edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<Position>>,
}

impl CycleDecomposition {
    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }
}

pub fn cycle_decomposition(m: &TwoRegularMatrix) -> CycleDecomposition {
    let n = m.size();
    let cols = m.column_rows();
    let row_partner = |(r, c): Position| {
        let (a, b) = m.rows[r];
        (r, if c == a { b } else { a })
    };
    let col_partner = |(r, c): Position| {
        let (x, y) = cols[c];
        (if r == x { y } else { x }, c)
    };
    // visited[r][0 | 1] for the first and second entry of row r
    let mut visited = vec![[false; 2]; n];
    let mark = |visited: &mut Vec<[bool; 2]>, (r, c): Position| {
        visited[r][(c != m.rows[r].0) as usize] = true;
    };
    let mut cycles = Vec::new();
    for r in 0..n {
        for slot in 0..2 {
            if visited[r][slot] {
                continue;
            }
            let start = (r, if slot == 0 { m.rows[r].0 } else { m.rows[r].1 });
            let mut cycle = Vec::new();
            let mut p = start;
            loop {
                cycle.push(p);
                mark(&mut visited, p);
                let q = row_partner(p);
                cycle.push(q);
                mark(&mut visited, q);
                p = col_partner(q);
                if p == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
    }
    CycleDecomposition { cycles }
}

/// A sign for each nonzero entry, aligned with the matrix's row pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignAssignment {
    signs: Vec<[i8; 2]>,
}

impl SignAssignment {
    /// Sign at `(row, col)`; `None` if the entry is zero.
    pub fn get(&self, m: &TwoRegularMatrix, row: usize, col: usize) -> Option<i8> {
        let (a, b) = m.rows[row];
        if col == a {
            Some(self.signs[row][0])
        } else if col == b {
            Some(self.signs[row][1])
        } else {
            None
        }
    }

    /// Signs of the row's (smaller, larger) column entries.
    pub fn row_signs(&self, row: usize) -> [i8; 2] {
        self.signs[row]
    }

    pub fn negated(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|&[x, y]| [-x, -y]).collect(),
        }
    }

    /// One `+1` and one `-1` in every row and every column of `m`.
    pub fn is_balanced(&self, m: &TwoRegularMatrix) -> bool {
        let n = m.size();
        let mut col_sum = vec![0i32; n];
        let mut col_count = vec![0u8; n];
        for (r, &(a, b)) in m.rows.iter().enumerate() {
            let [x, y] = self.signs[r];
            if x + y != 0 || x.abs() != 1 {
                return false;
            }
            col_sum[a] += x as i32;
            col_sum[b] += y as i32;
            col_count[a] += 1;
            col_count[b] += 1;
        }
        col_sum.iter().all(|&s| s == 0) && col_count.iter().all(|&c| c == 2)
    }
}

/// Two-colors every cycle alternately, `+` on its first position.
pub fn bipartition_signs(m: &TwoRegularMatrix) -> SignAssignment {
    let mut signs = vec![[0i8; 2]; m.size()];
    for cycle in cycle_decomposition(m).cycles {
        for (i, &(r, c)) in cycle.iter().enumerate() {
            let slot = (c != m.rows[r].0) as usize;
            signs[r][slot] = if i % 2 == 0 { 1 } else { -1 };
        }
    }
    SignAssignment { signs }
}

/// `2 sqrt(pi) (N/e)^(2N + 1/2)`, the leading-order estimate of `|M|`.
pub fn knuth_asymptotic(n: usize) -> f64 {
    let n = n as f64;
    2.0 * std::f64::consts::PI.sqrt() * ((2.0 * n + 0.5) * (n / std::f64::consts::E).ln()).exp()
}

/// The 8 x 8 example matrix whose signatures are tabulated in the fixture.
pub fn table1_matrix() -> TwoRegularMatrix {
    serde_json::from_str(include_str!("../fixtures/table1.json")).expect("valid fixture")
}
