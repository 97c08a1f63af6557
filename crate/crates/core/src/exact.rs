//! Lower bounds, an exact feasibility search and the pipeline that pins down
//! the minimum coalition size.
//!
//! Because a column matrix always converts to ballots (see
//! [`crate::matrix`]), the search never has to reason about individual
//! rows. It decides a count table `c[i][k]`, the number of copies of value
//! `k` that competing candidate `i` receives, subject to
//!
//! * `sum_i c[i][k] = n` for every value,
//! * `sum_k c[i][k] = n` for every candidate,
//! * `sum_k k * c[i][k] <= g_i`.
//!
//! Columns are filled in ascending gap order, values from largest to
//! smallest, larger counts first. Pruning uses, at every column boundary,
//! the fact that the `t` tightest remaining columns must absorb at least the
//! `t * n` smallest remaining values; inside a column, the unfilled slots
//! must fit the smallest values still available. Columns with equal gaps
//! are interchangeable, so their count rows are forced into lexicographic
//! order, and subproblems already proven infeasible are cached by the
//! remaining pool.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::election::{Candidate, ScoreProfile};
use crate::error::{Error, Result};
use crate::greedy::{lsla, lslg, reverse, TiePolicy};
use crate::matrix::ColumnMatrix;
use crate::scalar::Score;

/// Per-call search limits. At least one limit must be set and neither may
/// be zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: Some(10_000_000),
            max_time: Some(Duration::from_secs(60)),
        }
    }
}

impl Budget {
    /// A node limit only. Runs under it are fully deterministic.
    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.max_nodes, self.max_time) {
            (None, None) => Err(Error::InvalidConfig("budget needs a node or time limit".into())),
            (Some(0), _) => Err(Error::InvalidConfig("node budget must be positive".into())),
            (_, Some(t)) if t.is_zero() => Err(Error::InvalidConfig("time budget must be positive".into())),
            _ => Ok(()),
        }
    }
}

/// Number of copies of each value per competing candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    /// Zero-based candidate index of each row.
    candidates: Vec<usize>,
    /// `counts[row][value]` for values `0..m-1`.
    counts: Vec<Vec<usize>>,
}

impl CountMatrix {
    pub fn count(&self, candidate: Candidate, value: usize) -> usize {
        self.candidates
            .iter()
            .position(|&c| c == candidate.zero_based())
            .map_or(0, |row| self.counts[row][value])
    }

    /// Checks the row, value and gap constraints.
    pub fn is_feasible<S: Score>(&self, profile: &ScoreProfile<S>, n: usize) -> bool {
        let gaps = profile.gaps(n);
        let values = profile.m() - 1;
        let rows_ok = self.counts.iter().zip(&self.candidates).all(|(row, &c)| {
            let sum: usize = row.iter().enumerate().map(|(k, &x)| k * x).sum();
            row.iter().sum::<usize>() == n && S::from_usize(sum) <= gaps.as_slice()[c]
        });
        let values_ok = (0..values).all(|k| self.counts.iter().map(|r| r[k]).sum::<usize>() == n);
        rows_ok && values_ok
    }

    pub fn to_column_matrix(&self, distinguished: Candidate, m: usize, n: usize) -> ColumnMatrix {
        let mut columns = vec![Vec::with_capacity(n); m];
        columns[distinguished.zero_based()] = vec![m - 1; n];
        for (row, &c) in self.counts.iter().zip(&self.candidates) {
            for (k, &x) in row.iter().enumerate().rev() {
                columns[c].extend(std::iter::repeat_n(k, x));
            }
        }
        ColumnMatrix::new_unchecked(distinguished, n, columns)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Feasibility {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct FeasibilityResult {
    pub status: Feasibility,
    /// Present iff `status` is `Sat`.
    pub witness: Option<ColumnMatrix>,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Smallest coalition size not ruled out by a negative competing gap or by
/// the competing gaps being too small in total to absorb the points the
/// coalition hands out. Both conditions only get easier as `n` grows.
pub fn lower_bound<S: Score>(profile: &ScoreProfile<S>) -> usize {
    let m = profile.m();
    if m < 2 {
        return 0;
    }
    let sd = profile.score(profile.distinguished()).to_i128();
    let comp: Vec<i128> = profile.competing().map(|i| profile.scores()[i].to_i128()).collect();
    let mm = m as i128;
    let ceil_div = |a: i128, b: i128| if a <= 0 { 0 } else { (a + b - 1) / b };
    // g_i >= 0  <=>  n(m-1) >= s_i - s_d
    let max_other = comp.iter().copied().max().unwrap_or(0);
    let by_gap = ceil_div(max_other - sd, mm - 1);
    // sum_i g_i >= n(m-1)(m-2)/2  <=>  n*m*(m-1) >= 2*(sum_i s_i - (m-1)*s_d)
    let excess = comp.iter().sum::<i128>() - (mm - 1) * sd;
    let by_sum = ceil_div(2 * excess, mm * (mm - 1));
    by_gap.max(by_sum) as usize
}

/// Whether some competing gap is negative at size `n`.
pub fn has_negative_gap<S: Score>(profile: &ScoreProfile<S>, n: usize) -> bool {
    let gaps = profile.gaps(n);
    profile.competing().any(|i| gaps.as_slice()[i].is_negative())
}

/// Decides whether `n` manipulators suffice.
pub fn exists_manipulation<S: Score>(profile: &ScoreProfile<S>, n: usize, budget: Budget) -> Result<FeasibilityResult> {
    budget.validate()?;
    let start = Instant::now();
    let mut search = Search::new(profile, n, budget, start);
    let status = search.run();
    let witness = (status == Feasibility::Sat).then(|| {
        let counts = CountMatrix {
            candidates: search.order.clone(),
            counts: search.rows.clone(),
        };
        counts.to_column_matrix(profile.distinguished(), profile.m(), n)
    });
    Ok(FeasibilityResult {
        status,
        witness,
        nodes: search.nodes,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

// Cap on cached nogoods, to bound memory on long searches.
const MAX_NOGOODS: usize = 1 << 21;

struct Search {
    n: usize,
    /// Competing candidates, ascending gap then index.
    order: Vec<usize>,
    caps: Vec<i128>,
    /// Remaining copies per value `0..m-1`.
    pool: Vec<usize>,
    rows: Vec<Vec<usize>>,
    nogoods: HashSet<Vec<u32>>,
    nodes: u64,
    budget: Budget,
    start: Instant,
}

impl Search {
    fn new<S: Score>(profile: &ScoreProfile<S>, n: usize, budget: Budget, start: Instant) -> Self {
        let m = profile.m();
        let gaps = profile.gaps(n);
        let mut order: Vec<usize> = profile.competing().collect();
        order.sort_by_key(|&i| (gaps.as_slice()[i], i));
        let caps = order.iter().map(|&i| gaps.as_slice()[i].to_i128()).collect();
        let values = m.saturating_sub(1);
        Search {
            n,
            rows: vec![vec![0; values]; order.len()],
            order,
            caps,
            pool: vec![n; values],
            nogoods: HashSet::new(),
            nodes: 0,
            budget,
            start,
        }
    }

    fn run(&mut self) -> Feasibility {
        if self.caps.iter().any(|&c| c < 0) {
            return Feasibility::Unsat;
        }
        match self.column(0) {
            Step::Found => Feasibility::Sat,
            Step::Exhausted => Feasibility::Unsat,
            Step::OutOfBudget => Feasibility::Timeout,
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.budget.max_nodes.is_some_and(|max| self.nodes > max) {
            return false;
        }
        if self.nodes.is_multiple_of(4096) {
            if let Some(t) = self.budget.max_time {
                if self.start.elapsed() >= t {
                    return false;
                }
            }
        }
        true
    }

    fn tied_with_previous(&self, pos: usize) -> bool {
        pos > 0 && self.caps[pos] == self.caps[pos - 1]
    }

    /// The `t` tightest remaining columns must fit the `t * n` smallest
    /// remaining values, for every `t`.
    fn prefix_bound_holds(&self, pos: usize) -> bool {
        let mut value = 0;
        let mut left_at_value = self.pool.first().copied().unwrap_or(0);
        let mut min_sum: i128 = 0;
        let mut cap_sum: i128 = 0;
        for &cap in &self.caps[pos..] {
            cap_sum += cap;
            let mut need = self.n;
            while need > 0 {
                while left_at_value == 0 {
                    value += 1;
                    left_at_value = self.pool[value];
                }
                let take = need.min(left_at_value);
                min_sum += (take * value) as i128;
                left_at_value -= take;
                need -= take;
            }
            if min_sum > cap_sum {
                return false;
            }
        }
        true
    }

    /// Sum of the `slots` smallest remaining values below `below`, or `None`
    /// if there are not enough of them.
    fn min_sum_below(&self, below: usize, mut slots: usize) -> Option<i128> {
        let mut sum = 0i128;
        for v in 0..below {
            if slots == 0 {
                break;
            }
            let take = slots.min(self.pool[v]);
            sum += (take * v) as i128;
            slots -= take;
        }
        (slots == 0).then_some(sum)
    }

    fn nogood_key(&self, pos: usize) -> Vec<u32> {
        let mut key = Vec::with_capacity(1 + self.pool.len() * 2);
        key.push(pos as u32);
        key.extend(self.pool.iter().map(|&c| c as u32));
        if pos < self.order.len() && self.tied_with_previous(pos) {
            key.extend(self.rows[pos - 1].iter().map(|&c| c as u32));
        }
        key
    }

    fn column(&mut self, pos: usize) -> Step {
        if pos == self.order.len() {
            return Step::Found;
        }
        if !self.prefix_bound_holds(pos) {
            return Step::Exhausted;
        }
        let key = self.nogood_key(pos);
        if self.nogoods.contains(&key) {
            return Step::Exhausted;
        }
        let top = self.pool.len() - 1;
        let step = self.fill(pos, top, self.n, self.caps[pos], self.tied_with_previous(pos));
        if step == Step::Exhausted && self.nogoods.len() < MAX_NOGOODS {
            self.nogoods.insert(key);
        }
        step
    }

    /// Chooses how many copies of `value` go into column `pos`, then recurses
    /// on smaller values. `tied` means the row so far equals the previous
    /// equal-gap row, which it may not fall below.
    fn fill(&mut self, pos: usize, value: usize, slots: usize, cap: i128, tied: bool) -> Step {
        if !self.tick() {
            return Step::OutOfBudget;
        }
        if slots == 0 {
            return self.column(pos + 1);
        }
        let below: usize = self.pool[..value].iter().sum();
        let mut lo = slots.saturating_sub(below);
        let floor = if tied { self.rows[pos - 1][value] } else { 0 };
        lo = lo.max(floor);
        let mut hi = self.pool[value].min(slots);
        if value > 0 {
            hi = hi.min((cap / value as i128).max(0) as usize);
        }
        for count in (lo..=hi).rev() {
            let rest_slots = slots - count;
            let rest_cap = cap - (count * value) as i128;
            match self.min_sum_below(value, rest_slots) {
                Some(s) if s <= rest_cap => {}
                _ => continue,
            }
            self.rows[pos][value] = count;
            self.pool[value] -= count;
            let step = if rest_slots == 0 {
                self.column(pos + 1)
            } else {
                self.fill(pos, value - 1, rest_slots, rest_cap, tied && count == floor)
            };
            if step == Step::Found {
                return step;
            }
            self.pool[value] += count;
            self.rows[pos][value] = 0;
            if step == Step::OutOfBudget {
                return step;
            }
        }
        Step::Exhausted
    }
}

/// How the optimum was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Proof {
    /// `d` already wins without manipulators.
    Trivial,
    /// A greedy heuristic found a manipulation one smaller than REVERSE's.
    GreedyWitness,
    /// The competing gaps cannot absorb the coalition's points.
    Observation1,
    /// Some competing gap is negative.
    NegativeGap,
    ExactUnsat,
    ExactSat,
    Timeout,
}

impl Proof {
    pub fn as_str(self) -> &'static str {
        match self {
            Proof::Trivial => "trivial",
            Proof::GreedyWitness => "greedy",
            Proof::Observation1 => "observation1",
            Proof::NegativeGap => "negative_gap",
            Proof::ExactUnsat => "exact_unsat",
            Proof::ExactSat => "exact_sat",
            Proof::Timeout => "timeout",
        }
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Proof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "trivial" => Proof::Trivial,
            "greedy" => Proof::GreedyWitness,
            "observation1" => Proof::Observation1,
            "negative_gap" => Proof::NegativeGap,
            "exact_unsat" => Proof::ExactUnsat,
            "exact_sat" => Proof::ExactSat,
            "timeout" => Proof::Timeout,
            other => return Err(Error::Schema(format!("unknown proof kind {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalityReport {
    pub n_reverse: usize,
    pub n_optimal: Option<usize>,
    pub proof: Proof,
    /// Whether each heuristic succeeds at the optimum; `None` if unknown.
    pub reverse_optimal: Option<bool>,
    pub lslg_optimal: Option<bool>,
    pub lsla_minfill_optimal: Option<bool>,
    pub lsla_index_optimal: Option<bool>,
    /// LSLA (either tie policy) fails both at REVERSE's size and one below.
    pub lsla_dominance_violation: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

impl OptimalityReport {
    /// LSLA counts as optimal if either tie policy is.
    pub fn lsla_optimal(&self) -> Option<bool> {
        Some(self.lsla_minfill_optimal? || self.lsla_index_optimal?)
    }
}

impl fmt::Display for OptimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |b: Option<bool>| match b {
            Some(true) => "yes",
            Some(false) => "no",
            None => "unknown",
        };
        writeln!(f, "n_reverse: {}", self.n_reverse)?;
        match self.n_optimal {
            Some(n) => writeln!(f, "n_optimal: {n}")?,
            None => writeln!(f, "n_optimal: unknown")?,
        }
        writeln!(f, "proof: {}", self.proof)?;
        writeln!(f, "reverse optimal: {}", flag(self.reverse_optimal))?;
        writeln!(f, "lslg optimal: {}", flag(self.lslg_optimal))?;
        writeln!(f, "lsla optimal (min-fill): {}", flag(self.lsla_minfill_optimal))?;
        writeln!(f, "lsla optimal (index order): {}", flag(self.lsla_index_optimal))?;
        writeln!(f, "search nodes: {}", self.nodes)?;
        write!(f, "elapsed: {} ms", self.elapsed.as_millis())
    }
}

/// Finds the smallest coalition: REVERSE gives an upper bound `N_r` and the
/// optimum is `N_r` or `N_r - 1`. The heuristics, the lower bound and
/// finally the exact search settle which.
pub fn minimum_manipulators<S: Score>(profile: &ScoreProfile<S>, budget: Budget) -> Result<OptimalityReport> {
    budget.validate()?;
    let start = Instant::now();
    let n_reverse = reverse(profile).n;
    let succeeds = |n: usize| {
        (
            lslg(profile, n).is_success(),
            lsla(profile, n, TiePolicy::MinFill).is_success(),
            lsla(profile, n, TiePolicy::IndexOrder).is_success(),
        )
    };
    let at_reverse = succeeds(n_reverse);

    if n_reverse == 0 {
        return Ok(OptimalityReport {
            n_reverse,
            n_optimal: Some(0),
            proof: Proof::Trivial,
            reverse_optimal: Some(true),
            lslg_optimal: Some(at_reverse.0),
            lsla_minfill_optimal: Some(at_reverse.1),
            lsla_index_optimal: Some(at_reverse.2),
            lsla_dominance_violation: !(at_reverse.1 || at_reverse.2),
            nodes: 0,
            elapsed: start.elapsed(),
        });
    }

    let target = n_reverse - 1;
    let below = succeeds(target);
    let mut nodes = 0;
    let (n_optimal, proof) = if below.0 || below.1 || below.2 {
        (Some(target), Proof::GreedyWitness)
    } else if lower_bound(profile) > target {
        let proof = if has_negative_gap(profile, target) {
            Proof::NegativeGap
        } else {
            Proof::Observation1
        };
        (Some(n_reverse), proof)
    } else {
        let res = exists_manipulation(profile, target, budget)?;
        nodes = res.nodes;
        match res.status {
            Feasibility::Sat => (Some(target), Proof::ExactSat),
            Feasibility::Unsat => (Some(n_reverse), Proof::ExactUnsat),
            Feasibility::Timeout => (None, Proof::Timeout),
        }
    };

    let at_optimum = n_optimal.map(|n| if n == target { below } else { at_reverse });
    Ok(OptimalityReport {
        n_reverse,
        n_optimal,
        proof,
        reverse_optimal: n_optimal.map(|n| n == n_reverse),
        lslg_optimal: at_optimum.map(|t| t.0),
        lsla_minfill_optimal: at_optimum.map(|t| t.1),
        lsla_index_optimal: at_optimum.map(|t| t.2),
        lsla_dominance_violation: !(at_reverse.1 || at_reverse.2 || below.1 || below.2),
        nodes,
        elapsed: start.elapsed(),
    })
}
