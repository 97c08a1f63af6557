//! Column matrices, vote matrices and the matching-based conversion between
//! them.
//!
//! The greedy and exact searches only decide which multiset of points each
//! candidate receives from the coalition. [`convert_to_votes`] turns such a
//! column matrix back into concrete ballots: as long as every value
//! `0..m` appears exactly `n` times and every column holds `n` entries, the
//! value/column occurrence graph is `n`-regular, so it has a perfect
//! matching, and peeling one matching per round yields `n` permutation rows
//! with unchanged column multisets.

use crate::election::{Candidate, ScoreProfile, Vote};
use crate::error::{Error, Result};
use crate::scalar::Score;

/// Per-candidate multisets of points assigned by an `n`-strong coalition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMatrix {
    n: usize,
    distinguished: Candidate,
    columns: Vec<Vec<usize>>,
}

impl ColumnMatrix {
    /// Validates the structural invariants: `n` entries per column, each
    /// value `0..m` exactly `n` times overall, and `d`'s column all `m - 1`.
    pub fn new(distinguished: Candidate, n: usize, columns: Vec<Vec<usize>>) -> Result<Self> {
        let b = ColumnMatrix {
            n,
            distinguished,
            columns,
        };
        b.check_structure()?;
        Ok(b)
    }

    pub(crate) fn new_unchecked(distinguished: Candidate, n: usize, columns: Vec<Vec<usize>>) -> Self {
        ColumnMatrix {
            n,
            distinguished,
            columns,
        }
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distinguished(&self) -> Candidate {
        self.distinguished
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn column(&self, c: Candidate) -> &[usize] {
        &self.columns[c.zero_based()]
    }

    pub fn column_sums<S: Score>(&self) -> Vec<S> {
        self.columns.iter().map(|col| S::from_usize(col.iter().sum())).collect()
    }

    /// Each column as a sorted multiset.
    pub fn sorted_columns(&self) -> Vec<Vec<usize>> {
        self.columns
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect()
    }

    pub fn check_structure(&self) -> Result<()> {
        let m = self.m();
        let n = self.n;
        let d = self.distinguished.zero_based();
        if d >= m {
            return Err(Error::InvalidMatrix(format!(
                "distinguished candidate {} outside 1..={m}",
                d + 1
            )));
        }
        let mut counts = vec![0usize; m];
        for (i, col) in self.columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "column {} holds {} entries, expected {n}",
                    i + 1,
                    col.len()
                )));
            }
            for &v in col {
                if v >= m {
                    return Err(Error::InvalidMatrix(format!(
                        "column {} holds value {v} outside 0..{m}",
                        i + 1
                    )));
                }
                counts[v] += 1;
            }
        }
        if let Some(v) = counts.iter().position(|&c| c != n) {
            return Err(Error::InvalidMatrix(format!(
                "value {v} appears {} times, expected {n}",
                counts[v]
            )));
        }
        if self.columns[d].iter().any(|&v| v != m - 1) {
            return Err(Error::InvalidMatrix(format!(
                "column {} (distinguished) must hold only {}",
                d + 1,
                m - 1
            )));
        }
        Ok(())
    }

    pub fn to_votes(&self) -> Result<VoteMatrix> {
        convert_to_votes(self)
    }
}

/// `n` manipulator ballots as rows of points, indexed by zero-based candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteMatrix {
    m: usize,
    rows: Vec<Vec<usize>>,
}

impl VoteMatrix {
    pub fn empty(m: usize) -> Self {
        VoteMatrix { m, rows: Vec::new() }
    }

    /// Every row must be a permutation of `0..m`.
    pub fn from_rows(m: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let vm = VoteMatrix { m, rows };
        vm.check_rows()?;
        Ok(vm)
    }

    pub(crate) fn from_rows_unchecked(m: usize, rows: Vec<Vec<usize>>) -> Self {
        VoteMatrix { m, rows }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub(crate) fn check_rows(&self) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.m {
                return Err(Error::InvalidVote {
                    index: r,
                    reason: format!("row has {} entries, expected {}", row.len(), self.m),
                });
            }
            let mut seen = vec![false; self.m];
            for &p in row {
                if p >= self.m || std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidVote {
                        index: r,
                        reason: format!("row is not a permutation of 0..{}", self.m),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn column_sums<S: Score>(&self) -> Vec<S> {
        let mut sums = vec![S::zero(); self.m];
        for row in &self.rows {
            for (s, &p) in sums.iter_mut().zip(row) {
                *s = *s + S::from_usize(p);
            }
        }
        sums
    }

    /// Rows as ballots: highest points first.
    pub fn ballots(&self) -> Vec<Vote> {
        self.rows
            .iter()
            .map(|row| {
                let mut order: Vec<usize> = (0..self.m).collect();
                order.sort_by_key(|&c| (std::cmp::Reverse(row[c]), c));
                Vote::from_candidates_unchecked(order.into_iter().map(Candidate::from_zero_based).collect())
            })
            .collect()
    }
}

/// Bipartite multigraph between point values (left) and candidates (right),
/// one edge per occurrence of a value in a column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceGraph {
    /// `counts[value][column]`
    counts: Vec<Vec<u32>>,
}

impl OccurrenceGraph {
    pub fn from_columns(b: &ColumnMatrix) -> Self {
        let m = b.m();
        let mut counts = vec![vec![0u32; m]; m];
        for (c, col) in b.columns().iter().enumerate() {
            for &v in col {
                counts[v][c] += 1;
            }
        }
        OccurrenceGraph { counts }
    }

    pub fn from_counts(counts: Vec<Vec<u32>>) -> Result<Self> {
        let m = counts.len();
        if counts.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidMatrix("occurrence counts must be square".into()));
        }
        Ok(OccurrenceGraph { counts })
    }

    pub fn m(&self) -> usize {
        self.counts.len()
    }

    pub fn multiplicity(&self, value: usize, column: usize) -> u32 {
        self.counts[value][column]
    }

    pub fn value_degree(&self, value: usize) -> u32 {
        self.counts[value].iter().sum()
    }

    pub fn column_degree(&self, column: usize) -> u32 {
        self.counts.iter().map(|row| row[column]).sum()
    }

    /// Whether every vertex on both sides has degree `k`.
    pub fn is_regular(&self, k: u32) -> bool {
        (0..self.m()).all(|i| self.value_degree(i) == k && self.column_degree(i) == k)
    }

    /// Drops one occurrence per matched pair.
    fn remove(&mut self, column_of_value: &[usize]) {
        for (v, &c) in column_of_value.iter().enumerate() {
            debug_assert!(self.counts[v][c] > 0);
            self.counts[v][c] -= 1;
        }
    }
}

/// A perfect matching of values to columns, as `column_of_value[v]`.
/// Uses augmenting paths from each value in turn.
pub fn perfect_matching(g: &OccurrenceGraph) -> Result<Vec<usize>> {
    let m = g.m();
    let mut value_of_column: Vec<Option<usize>> = vec![None; m];
    let mut visited = vec![false; m];
    for v in 0..m {
        visited.iter_mut().for_each(|x| *x = false);
        if !augment(g, v, &mut value_of_column, &mut visited) {
            return Err(Error::Internal(format!(
                "no augmenting path for value {v}; occurrence graph is not regular"
            )));
        }
    }
    let mut column_of_value = vec![usize::MAX; m];
    for (c, v) in value_of_column.into_iter().enumerate() {
        column_of_value[v.expect("all columns matched")] = c;
    }
    Ok(column_of_value)
}

fn augment(g: &OccurrenceGraph, v: usize, value_of_column: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for c in 0..g.m() {
        if g.counts[v][c] == 0 || visited[c] {
            continue;
        }
        visited[c] = true;
        let free = match value_of_column[c] {
            None => true,
            Some(w) => augment(g, w, value_of_column, visited),
        };
        if free {
            value_of_column[c] = Some(v);
            return true;
        }
    }
    false
}

/// Rebuilds ballots from a column matrix, one perfect matching per row.
pub fn convert_to_votes(b: &ColumnMatrix) -> Result<VoteMatrix> {
    b.check_structure()?;
    let m = b.m();
    let mut graph = OccurrenceGraph::from_columns(b);
    let mut rows = Vec::with_capacity(b.n());
    for _ in 0..b.n() {
        let column_of_value = perfect_matching(&graph)?;
        let mut row = vec![0; m];
        for (v, &c) in column_of_value.iter().enumerate() {
            row[c] = v;
        }
        graph.remove(&column_of_value);
        rows.push(row);
    }
    Ok(VoteMatrix::from_rows_unchecked(m, rows))
}

/// Structural invariants plus every column sum within its gap for `n`.
pub fn validate_column_matrix<S: Score>(b: &ColumnMatrix, profile: &ScoreProfile<S>, n: usize) -> bool {
    if b.m() != profile.m() || b.n() != n || b.distinguished() != profile.distinguished() {
        return false;
    }
    if b.check_structure().is_err() {
        return false;
    }
    let gaps = profile.gaps(n);
    b.column_sums::<S>().iter().zip(gaps.as_slice()).all(|(s, g)| s <= g)
}
