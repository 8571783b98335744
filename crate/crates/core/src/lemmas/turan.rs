//! Independent index sets for 0/1 matrices with at most one 1 per column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest size accepted by the exhaustive search.
pub const BRUTE_FORCE_LIMIT: usize = 22;

/// Square 0/1 matrix with a zero diagonal and at most one 1 in each column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroOneMatrix {
    n: usize,
    /// row-major
    entries: Vec<bool>,
}

impl ZeroOneMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix size must be at least 1"));
        }
        Ok(Self {
            n,
            entries: vec![false; n * n],
        })
    }

    /// Builds the matrix from the positions `(i, j)` of its ones.
    pub fn from_ones(n: usize, ones: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for &(i, j) in ones {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("entry ({i}, {j}) outside a {n}x{n} matrix")));
            }
            if i == j {
                return Err(Error::invalid(format!("diagonal entry ({i}, {i}) must be 0")));
            }
            if m.entries[i * n + j] {
                continue;
            }
            if (0..n).any(|r| m.entries[r * n + j]) {
                return Err(Error::invalid(format!("column {j} already holds a 1")));
            }
            m.entries[i * n + j] = true;
        }
        Ok(m)
    }

    /// The matrix with `λ_{parent[j], j} = 1`; `None` leaves column j empty.
    pub fn from_column_parents(parents: &[Option<usize>]) -> Result<Self> {
        let ones: Vec<_> = parents
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.map(|i| (i, j)))
            .collect();
        Self::from_ones(parents.len(), &ones)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    fn row_sum(&self, i: usize) -> usize {
        self.entries[i * self.n..(i + 1) * self.n].iter().filter(|b| **b).count()
    }

    /// True when `λ_{ij} = 0` for all `i, j` in the set.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().all(|&i| set.iter().all(|&j| !self.get(i, j)))
    }
}

/// Constructive selection of an index set of size at least `⌈N/4⌉` on which
/// the matrix vanishes.
///
/// When at least a quarter of the rows have two or more ones, every zero
/// row is returned (there are at least as many zero rows as such rows).
/// Otherwise a maximal valid subset of the rows with at most one 1 is grown
/// greedily in increasing index order.
pub fn turan_select(l: &ZeroOneMatrix) -> Vec<usize> {
    let n = l.size();
    let light: Vec<usize> = (0..n).filter(|&i| l.row_sum(i) <= 1).collect();
    let heavy = n - light.len();
    if 4 * heavy >= n {
        return (0..n).filter(|&i| l.row_sum(i) == 0).collect();
    }
    let mut chosen: Vec<usize> = Vec::new();
    for &i in &light {
        if chosen.iter().all(|&j| !l.get(i, j) && !l.get(j, i)) {
            chosen.push(i);
        }
    }
    chosen
}

/// A maximum valid index set by exhaustive branch and bound (N ≤ 22).
/// Among maximum sets the lexicographically smallest is returned.
pub fn turan_brute(l: &ZeroOneMatrix) -> Result<Vec<usize>> {
    let n = l.size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::invalid(format!(
            "exhaustive search supports N ≤ {BRUTE_FORCE_LIMIT}, got {n}"
        )));
    }
    let adj: Vec<u32> = (0..n)
        .map(|i| {
            (0..n).fold(0u32, |acc, j| {
                if l.get(i, j) || l.get(j, i) {
                    acc | 1 << j
                } else {
                    acc
                }
            })
        })
        .collect();
    let mut best = 0u32;
    search(&adj, (1u32 << n) - 1, 0, &mut best);
    Ok((0..n).filter(|&i| best >> i & 1 == 1).collect())
}

fn search(adj: &[u32], candidates: u32, current: u32, best: &mut u32) {
    if candidates == 0 {
        let (c, b) = (current.count_ones(), best.count_ones());
        if c > b || c == b && lex_smaller(current, *best) {
            *best = current;
        }
        return;
    }
    if current.count_ones() + candidates.count_ones() < best.count_ones() {
        return;
    }
    let v = candidates.trailing_zeros();
    let bit = 1u32 << v;
    search(adj, candidates & !bit & !adj[v as usize], current | bit, best);
    if adj[v as usize] & candidates != 0 {
        search(adj, candidates & !bit, current, best);
    }
}

/// Lexicographic order of the sorted index lists of two equal-size sets.
fn lex_smaller(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}
