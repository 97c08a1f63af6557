//! Greedy manipulation heuristics.
//!
//! * [`reverse`] adds whole ballots, each ranking `d` first and the other
//!   candidates from weakest to strongest, until `d` wins. It never needs
//!   more than one ballot beyond the optimum.
//! * [`lslg`] ("largest score, largest gap") fixes the coalition size and
//!   hands out points one at a time, largest first, to the competing
//!   candidate with the lowest running total (highest index on ties).
//! * [`lsla`] ("largest score, largest average") picks the candidate whose
//!   remaining gap per open slot is largest and gives it the largest point
//!   value that still fits in that gap.
//!
//! All ties are broken deterministically so that traces are reproducible.

use std::cell::Cell;
use std::cmp::{Ordering, Reverse};
use std::fmt;

use crate::election::{Candidate, ScoreProfile};
use crate::error::{Error, Result};
use crate::matrix::{ColumnMatrix, VoteMatrix};
use crate::scalar::Score;

/// The points a coalition of `n` must hand to competing candidates: `n`
/// copies of each value in `0..=m-2`.
///
/// Values are never added back, so "largest value not above `x`" is a
/// union-find over emptied values with path compression.
#[derive(Clone, Debug)]
pub struct ScorePool {
    counts: Vec<usize>,
    // link[v + 1] leads towards the largest non-empty value <= v; 0 means none.
    link: Vec<Cell<usize>>,
    len: usize,
}

impl ScorePool {
    pub fn new(m: usize, n: usize) -> Self {
        let values = m.saturating_sub(1);
        let counts = vec![n; values];
        let link = (0..=values)
            .map(|i| Cell::new(if i == 0 || n > 0 { i } else { 0 }))
            .collect();
        ScorePool {
            counts,
            link,
            len: n * values,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count(&self, value: usize) -> usize {
        self.counts.get(value).copied().unwrap_or(0)
    }

    /// Sum of the remaining values.
    pub fn total(&self) -> usize {
        self.counts.iter().enumerate().map(|(v, &c)| v * c).sum()
    }

    /// Remaining values, largest first.
    pub fn values_desc(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .enumerate()
            .rev()
            .flat_map(|(v, &c)| std::iter::repeat_n(v, c))
    }

    pub fn largest(&self) -> Option<usize> {
        self.at_most(self.counts.len().checked_sub(1)?)
    }

    /// Largest remaining value `<= limit`.
    pub fn at_most(&self, limit: usize) -> Option<usize> {
        if self.counts.is_empty() {
            return None;
        }
        let start = limit.min(self.counts.len() - 1) + 1;
        let root = self.find(start);
        (root > 0).then(|| root - 1)
    }

    fn find(&self, mut i: usize) -> usize {
        let mut root = i;
        while self.link[root].get() != root {
            root = self.link[root].get();
        }
        while self.link[i].get() != root {
            let next = self.link[i].get();
            self.link[i].set(root);
            i = next;
        }
        root
    }

    /// Removes one copy of `value`. Panics if none is left.
    pub fn take(&mut self, value: usize) {
        assert!(self.count(value) > 0, "value {value} not in pool");
        self.counts[value] -= 1;
        self.len -= 1;
        if self.counts[value] == 0 {
            self.link[value + 1].set(value);
        }
    }
}

/// Largest pool value that fits in `remaining_gap`; the pool's largest value
/// if nothing fits. The caller removes the returned value.
pub fn choose_score<S: Score>(remaining_gap: S, pool: &ScorePool) -> Result<usize> {
    let largest = pool
        .largest()
        .ok_or_else(|| Error::Contract("choose_score on an empty pool".into()))?;
    if remaining_gap.is_negative() {
        return Ok(largest);
    }
    let limit = <usize as num_traits::NumCast>::from(remaining_gap).unwrap_or(usize::MAX);
    Ok(pool.at_most(limit).unwrap_or(largest))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Success,
    Failure,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Success => "Success",
            Status::Failure => "Failure",
        })
    }
}

/// How [`lsla`] breaks ties between columns with the same average desired
/// score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    /// Fewest placed entries first, then lowest index.
    #[default]
    MinFill,
    /// Lowest index first.
    IndexOrder,
}

/// One step of a greedy run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement<S> {
    /// 1-based step number.
    pub iter: usize,
    pub column: Candidate,
    pub score: usize,
    /// Sum of the column after this placement, excluding the candidate's
    /// original score.
    pub column_sum: S,
}

impl<S: Score> Placement<S> {
    pub fn csv_line(&self) -> String {
        format!("{},{},{},{}", self.iter, self.column, self.score, self.column_sum)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyOutcome<S> {
    pub status: Status,
    /// Present iff `status` is `Success`.
    pub matrix: Option<ColumnMatrix>,
    /// Totals (original score plus placed points) when the run finished.
    pub final_totals: Vec<S>,
    pub trace: Option<Vec<Placement<S>>>,
}

impl<S: Score> GreedyOutcome<S> {
    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReverseOutcome<S> {
    pub n: usize,
    pub votes: VoteMatrix,
    /// `score_trace[t]` holds every candidate's total after `t` ballots.
    pub score_trace: Vec<Vec<S>>,
}

pub fn reverse<S: Score>(profile: &ScoreProfile<S>) -> ReverseOutcome<S> {
    let m = profile.m();
    let d = profile.d();
    let mut totals = profile.scores().to_vec();
    let mut rows = Vec::new();
    let mut score_trace = vec![totals.clone()];
    let leads = |t: &[S]| t.iter().all(|&s| s <= t[d]);
    while !leads(&totals) {
        let mut order: Vec<usize> = profile.competing().collect();
        order.sort_by_key(|&i| (totals[i], i));
        let mut row = vec![0; m];
        row[d] = m - 1;
        // Weakest competitor gets m-2, strongest gets 0.
        for (rank, &i) in order.iter().enumerate() {
            row[i] = m - 2 - rank;
        }
        for (t, &p) in totals.iter_mut().zip(&row) {
            *t = *t + S::from_usize(p);
        }
        rows.push(row);
        score_trace.push(totals.clone());
    }
    ReverseOutcome {
        n: rows.len(),
        votes: VoteMatrix::from_rows_unchecked(m, rows),
        score_trace,
    }
}

pub fn lslg<S: Score>(profile: &ScoreProfile<S>, n: usize) -> GreedyOutcome<S> {
    run_lslg(profile, n, false)
}

pub fn lslg_traced<S: Score>(profile: &ScoreProfile<S>, n: usize) -> GreedyOutcome<S> {
    run_lslg(profile, n, true)
}

pub fn lsla<S: Score>(profile: &ScoreProfile<S>, n: usize, tie_policy: TiePolicy) -> GreedyOutcome<S> {
    run_lsla(profile, n, tie_policy, false)
}

pub fn lsla_traced<S: Score>(profile: &ScoreProfile<S>, n: usize, tie_policy: TiePolicy) -> GreedyOutcome<S> {
    run_lsla(profile, n, tie_policy, true)
}

/// Column state shared by both column-filling heuristics.
struct Fill<'a, S> {
    profile: &'a ScoreProfile<S>,
    n: usize,
    columns: Vec<Vec<usize>>,
    sums: Vec<S>,
    pool: ScorePool,
    trace: Option<Vec<Placement<S>>>,
}

impl<'a, S: Score> Fill<'a, S> {
    fn new(profile: &'a ScoreProfile<S>, n: usize, traced: bool) -> Self {
        let m = profile.m();
        let mut columns = vec![Vec::with_capacity(n); m];
        columns[profile.d()] = vec![m - 1; n];
        let mut sums = vec![S::zero(); m];
        sums[profile.d()] = S::from_usize(n * (m - 1));
        Fill {
            profile,
            n,
            columns,
            sums,
            pool: ScorePool::new(m, n),
            trace: traced.then(Vec::new),
        }
    }

    fn open_columns(&self) -> impl Iterator<Item = usize> + '_ {
        let d = self.profile.d();
        (0..self.columns.len()).filter(move |&i| i != d && self.columns[i].len() < self.n)
    }

    fn place(&mut self, column: usize, score: usize) {
        self.pool.take(score);
        self.columns[column].push(score);
        self.sums[column] = self.sums[column] + S::from_usize(score);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(Placement {
                iter: trace.len() + 1,
                column: Candidate::from_zero_based(column),
                score,
                column_sum: self.sums[column],
            });
        }
    }

    fn finish(self) -> GreedyOutcome<S> {
        let d = self.profile.d();
        let final_totals: Vec<S> = self
            .profile
            .scores()
            .iter()
            .zip(&self.sums)
            .map(|(&s, &b)| s + b)
            .collect();
        let wins = final_totals.iter().all(|&t| t <= final_totals[d]);
        let (status, matrix) = if wins {
            let b = ColumnMatrix::new_unchecked(self.profile.distinguished(), self.n, self.columns);
            (Status::Success, Some(b))
        } else {
            (Status::Failure, None)
        };
        GreedyOutcome {
            status,
            matrix,
            final_totals,
            trace: self.trace,
        }
    }
}

fn run_lslg<S: Score>(profile: &ScoreProfile<S>, n: usize, traced: bool) -> GreedyOutcome<S> {
    let mut fill = Fill::new(profile, n, traced);
    let scores = profile.scores();
    while let Some(score) = fill.pool.largest() {
        let column = fill
            .open_columns()
            .min_by_key(|&i| (fill.sums[i] + scores[i], Reverse(i)))
            .expect("pool size matches open slots");
        fill.place(column, score);
    }
    fill.finish()
}

fn run_lsla<S: Score>(profile: &ScoreProfile<S>, n: usize, tie_policy: TiePolicy, traced: bool) -> GreedyOutcome<S> {
    let gaps = profile.gaps(n);
    let gaps = gaps.as_slice();
    let mut fill = Fill::new(profile, n, traced);
    while !fill.pool.is_empty() {
        let remaining = |i: usize| (gaps[i] - fill.sums[i]).to_i128();
        let slots = |i: usize| (n - fill.columns[i].len()) as i128;
        let column = fill
            .open_columns()
            .max_by(|&a, &b| {
                // Compare remaining/slots exactly; slots are positive.
                let by_average = (remaining(a) * slots(b)).cmp(&(remaining(b) * slots(a)));
                let by_fill = match tie_policy {
                    TiePolicy::MinFill => fill.columns[b].len().cmp(&fill.columns[a].len()),
                    TiePolicy::IndexOrder => Ordering::Equal,
                };
                by_average.then(by_fill).then(b.cmp(&a))
            })
            .expect("pool size matches open slots");
        let score = choose_score(gaps[column] - fill.sums[column], &fill.pool).expect("pool is non-empty");
        fill.place(column, score);
    }
    fill.finish()
}
