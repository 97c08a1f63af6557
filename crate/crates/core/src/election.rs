//! Elections, Borda tallies, gaps and manipulation checks.
//!
//! Candidates are numbered `1..=m` at every public boundary. Internally
//! vectors are indexed from zero, so candidate `c` lives at `c.zero_based()`.

use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::VoteMatrix;
use crate::scalar::Score;

/// A candidate, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate(usize);

impl Candidate {
    /// Checks `1 <= index <= m`.
    pub fn new(index: usize, m: usize) -> Result<Self> {
        if index == 0 || index > m {
            return Err(Error::InvalidElection(format!("candidate {index} outside 1..={m}")));
        }
        Ok(Candidate(index))
    }

    pub(crate) fn from_zero_based(i: usize) -> Self {
        Candidate(i + 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A strict ranking of all candidates, best first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vote {
    ranking: Vec<Candidate>,
}

impl Vote {
    /// Builds a vote from 1-based candidate indices. `index` is only used to
    /// label the error.
    pub fn from_indices(ranking: &[usize], m: usize, index: usize) -> Result<Self> {
        if ranking.len() != m {
            return Err(Error::InvalidVote {
                index,
                reason: format!("expected {m} candidates, found {}", ranking.len()),
            });
        }
        let mut seen = vec![false; m];
        let mut out = Vec::with_capacity(m);
        for &c in ranking {
            if c == 0 || c > m {
                return Err(Error::InvalidVote {
                    index,
                    reason: format!("candidate {c} outside 1..={m}"),
                });
            }
            if std::mem::replace(&mut seen[c - 1], true) {
                return Err(Error::InvalidVote {
                    index,
                    reason: format!("candidate {c} ranked twice"),
                });
            }
            out.push(Candidate(c));
        }
        Ok(Vote { ranking: out })
    }

    pub(crate) fn from_candidates_unchecked(ranking: Vec<Candidate>) -> Self {
        Vote { ranking }
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Borda points this vote gives each candidate, indexed from zero.
    pub fn points(&self) -> Vec<usize> {
        let m = self.ranking.len();
        let mut pts = vec![0; m];
        for (pos, c) in self.ranking.iter().enumerate() {
            pts[c.zero_based()] = m - 1 - pos;
        }
        pts
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.ranking.iter().map(|c| c.index()).collect()
    }
}

/// Non-manipulator votes plus the candidate the coalition wants to win.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    m: usize,
    votes: Vec<Vote>,
    distinguished: Candidate,
}

impl Election {
    pub fn new(m: usize, distinguished: usize, votes: &[Vec<usize>]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidElection(
                "an election needs at least one candidate".into(),
            ));
        }
        let distinguished = Candidate::new(distinguished, m)?;
        let votes = votes
            .iter()
            .enumerate()
            .map(|(i, v)| Vote::from_indices(v, m, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Election {
            m,
            votes,
            distinguished,
        })
    }

    pub(crate) fn from_parts(m: usize, distinguished: Candidate, votes: Vec<Vote>) -> Self {
        Election {
            m,
            votes,
            distinguished,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn distinguished(&self) -> Candidate {
        self.distinguished
    }

    /// Same votes, different target.
    pub fn with_distinguished(&self, d: Candidate) -> Result<Self> {
        let d = Candidate::new(d.index(), self.m)?;
        Ok(Election {
            distinguished: d,
            ..self.clone()
        })
    }

    pub fn tally<S: Score>(&self) -> ScoreProfile<S> {
        tally(self)
    }

    /// Canonical JSON: sorted keys, no insignificant whitespace.
    pub fn to_json(&self) -> String {
        let file = ElectionFile {
            distinguished: self.distinguished.index(),
            m: self.m,
            votes: self.votes.iter().map(Vote::to_indices).collect(),
        };
        serde_json::to_string(&file).expect("election serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ElectionFile = serde_json::from_str(text)?;
        Election::new(file.m, file.distinguished, &file.votes)
    }
}

// Field order is alphabetical so serde_json emits sorted keys.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ElectionFile {
    pub distinguished: usize,
    pub m: usize,
    pub votes: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ProfileFile<S> {
    pub distinguished: usize,
    pub m: usize,
    pub scores: Vec<S>,
}

/// Borda totals of the non-manipulator votes. This is all any of the
/// manipulation algorithms need to see.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreProfile<S> {
    scores: Vec<S>,
    distinguished: Candidate,
    voter_count: Option<usize>,
    consistent: bool,
}

impl<S: Score> ScoreProfile<S> {
    /// Builds a profile directly from totals. A total that is not a multiple
    /// of `m(m-1)/2` cannot come from real ballots; it is accepted with a
    /// warning and [`is_consistent`](Self::is_consistent) reports it.
    pub fn new(distinguished: usize, scores: Vec<S>) -> Result<Self> {
        let m = scores.len();
        if m == 0 {
            return Err(Error::InvalidProfile("no candidates".into()));
        }
        let distinguished = Candidate::new(distinguished, m)
            .map_err(|_| Error::InvalidProfile(format!("distinguished {distinguished} outside 1..={m}")))?;
        if let Some(i) = scores.iter().position(|s| s.is_negative()) {
            return Err(Error::InvalidProfile(format!(
                "candidate {} has negative score {}",
                i + 1,
                scores[i]
            )));
        }
        let per_vote = m * (m - 1) / 2;
        let total = scores.iter().fold(S::zero(), |a, &b| a + b);
        let consistent = per_vote == 0 || (total % S::from_usize(per_vote)).is_zero();
        if !consistent {
            warn!("score total {total} is not a multiple of {per_vote}; no ballot set produces it");
        }
        Ok(ScoreProfile {
            scores,
            distinguished,
            voter_count: None,
            consistent,
        })
    }

    pub fn with_voter_count(mut self, voters: usize) -> Self {
        self.voter_count = Some(voters);
        self
    }

    pub fn m(&self) -> usize {
        self.scores.len()
    }

    pub fn scores(&self) -> &[S] {
        &self.scores
    }

    pub fn score(&self, c: Candidate) -> S {
        self.scores[c.zero_based()]
    }

    pub fn distinguished(&self) -> Candidate {
        self.distinguished
    }

    pub(crate) fn d(&self) -> usize {
        self.distinguished.zero_based()
    }

    pub fn voter_count(&self) -> Option<usize> {
        self.voter_count
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Zero-based indices of every candidate except the distinguished one.
    pub fn competing(&self) -> impl Iterator<Item = usize> + '_ {
        let d = self.d();
        (0..self.m()).filter(move |&i| i != d)
    }

    pub fn with_distinguished(&self, d: Candidate) -> Result<Self> {
        let mut p = ScoreProfile::new(d.index(), self.scores.clone())?;
        p.voter_count = self.voter_count;
        Ok(p)
    }

    /// The lowest-scoring candidate, lowest index on ties.
    pub fn worst_off(&self) -> Candidate {
        let (i, _) = self
            .scores
            .iter()
            .enumerate()
            .min_by_key(|&(i, s)| (*s, i))
            .expect("profile is non-empty");
        Candidate::from_zero_based(i)
    }

    pub fn gaps(&self, n: usize) -> GapVector<S> {
        gaps(self, n)
    }

    pub fn winners(&self) -> Vec<Candidate> {
        winners(self)
    }

    pub fn to_json(&self) -> String {
        let file = ProfileFile {
            distinguished: self.distinguished.index(),
            m: self.m(),
            scores: self.scores.clone(),
        };
        serde_json::to_string(&file).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProfileFile<S> = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub(crate) fn from_file(file: ProfileFile<S>) -> Result<Self> {
        if file.scores.len() != file.m {
            return Err(Error::InvalidProfile(format!(
                "m = {} but {} scores given",
                file.m,
                file.scores.len()
            )));
        }
        ScoreProfile::new(file.distinguished, file.scores)
    }
}

/// Per-candidate slack for a coalition of `n`: how many more points each
/// candidate may receive before overtaking `d`'s best achievable total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapVector<S> {
    n: usize,
    gaps: Vec<S>,
}

impl<S: Score> GapVector<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[S] {
        &self.gaps
    }

    pub fn get(&self, c: Candidate) -> S {
        self.gaps[c.zero_based()]
    }

    /// Sum of the gaps of every candidate except `d`.
    pub fn competing_sum(&self, d: Candidate) -> S {
        self.gaps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != d.zero_based())
            .fold(S::zero(), |a, (_, &g)| a + g)
    }
}

pub fn tally<S: Score>(election: &Election) -> ScoreProfile<S> {
    let m = election.m();
    let mut scores = vec![S::zero(); m];
    for v in election.votes() {
        for (i, p) in v.points().into_iter().enumerate() {
            scores[i] = scores[i] + S::from_usize(p);
        }
    }
    let mut profile = ScoreProfile::new(election.distinguished().index(), scores)
        .expect("tally of a validated election is a valid profile");
    profile.voter_count = Some(election.votes().len());
    profile
}

pub fn gaps<S: Score>(profile: &ScoreProfile<S>, n: usize) -> GapVector<S> {
    let m = profile.m();
    let top = profile.score(profile.distinguished()) + S::from_usize(n * (m - 1));
    GapVector {
        n,
        gaps: profile.scores().iter().map(|&s| top - s).collect(),
    }
}

/// Every candidate with the maximum score.
pub fn winners<S: Score>(profile: &ScoreProfile<S>) -> Vec<Candidate> {
    let best = *profile.scores().iter().max().expect("profile is non-empty");
    profile
        .scores()
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s == best)
        .map(|(i, _)| Candidate::from_zero_based(i))
        .collect()
}

/// Whether adding the manipulator ballots makes `d` a (possibly tied)
/// winner. Every ballot must rank `d` first.
pub fn verify_manipulation<S: Score>(profile: &ScoreProfile<S>, votes: &VoteMatrix) -> Result<bool> {
    let m = profile.m();
    if votes.m() != m {
        return Err(Error::InvalidMatrix(format!(
            "vote matrix has {} columns for a {m}-candidate profile",
            votes.m()
        )));
    }
    votes.check_rows()?;
    let d = profile.d();
    if let Some(r) = votes.rows().iter().position(|row| row[d] != m - 1) {
        return Err(Error::InvalidVote {
            index: r,
            reason: format!("manipulator vote does not rank candidate {} first", d + 1),
        });
    }
    let totals = final_totals(profile, votes);
    Ok(totals.iter().all(|&t| t <= totals[d]))
}

/// Totals after adding the manipulator ballots.
pub fn final_totals<S: Score>(profile: &ScoreProfile<S>, votes: &VoteMatrix) -> Vec<S> {
    let mut totals = profile.scores().to_vec();
    for row in votes.rows() {
        for (t, &p) in totals.iter_mut().zip(row) {
            *t = *t + S::from_usize(p);
        }
    }
    totals
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn four_voter() -> Election {
        Election::new(
            5,
            5,
            &[
                vec![1, 2, 3, 4, 5],
                vec![2, 3, 4, 1, 5],
                vec![3, 4, 1, 2, 5],
                vec![4, 1, 2, 3, 5],
            ],
        )
        .unwrap()
    }

    #[test]
    fn tally_four_voter() {
        let p: ScoreProfile<i64> = four_voter().tally();
        assert_eq!(p.scores(), &[10, 10, 10, 10, 0]);
        assert_eq!(p.voter_count(), Some(4));
        assert!(p.is_consistent());
    }

    #[test]
    fn tally_small() {
        let e = Election::new(3, 3, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(e.tally::<i32>().scores(), &[2, 1, 0]);
        let e = Election::new(3, 3, &[vec![1, 2, 3], vec![3, 2, 1]]).unwrap();
        assert_eq!(e.tally::<i32>().scores(), &[2, 2, 2]);
    }

    #[test]
    fn malformed_vote_names_index() {
        let err = Election::new(3, 1, &[vec![1, 2, 3], vec![1, 1, 3]]).unwrap_err();
        match err {
            Error::InvalidVote { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Election::new(3, 1, &[vec![1, 2]]),
            Err(Error::InvalidVote { index: 0, .. })
        ));
        assert!(matches!(
            Election::new(3, 1, &[vec![1, 2, 4]]),
            Err(Error::InvalidVote { index: 0, .. })
        ));
        assert!(Election::new(3, 4, &[]).is_err());
    }

    #[test]
    fn gaps_four_voter() {
        let p: ScoreProfile<i64> = four_voter().tally();
        let g3 = p.gaps(3);
        assert_eq!(g3.as_slice(), &[2, 2, 2, 2, 12]);
        assert_eq!(g3.competing_sum(p.distinguished()), 8);
        assert_eq!(p.gaps(4).as_slice(), &[6, 6, 6, 6, 16]);
    }

    #[test]
    fn gaps_zero_when_d_leads() {
        let p = ScoreProfile::<i64>::new(1, vec![9, 3, 5]).unwrap();
        assert!(p.gaps(0).as_slice().iter().all(|&g| g >= 0));
    }

    #[test]
    fn winners_sets() {
        let w = |s: Vec<i64>| -> Vec<usize> {
            ScoreProfile::new(1, s)
                .unwrap()
                .winners()
                .iter()
                .map(|c| c.index())
                .collect()
        };
        assert_eq!(w(vec![10, 10, 10, 10, 0]), vec![1, 2, 3, 4]);
        assert_eq!(w(vec![5, 3, 1]), vec![1]);
        assert_eq!(w(vec![7, 7, 7]), vec![1, 2, 3]);
    }

    #[test]
    fn inconsistent_profile_is_flagged() {
        let p = ScoreProfile::<i64>::new(3, vec![1, 0, 0]).unwrap();
        assert!(!p.is_consistent());
        assert!(ScoreProfile::<i64>::new(3, vec![1, -1, 0]).is_err());
        assert!(ScoreProfile::<i64>::new(4, vec![1, 1, 1]).is_err());
    }

    #[test]
    fn verify_rejects_d_not_first() {
        let p = ScoreProfile::<i64>::new(3, vec![2, 1, 0]).unwrap();
        let bad = VoteMatrix::from_rows(3, vec![vec![2, 0, 1]]).unwrap();
        assert!(matches!(
            verify_manipulation(&p, &bad),
            Err(Error::InvalidVote { index: 0, .. })
        ));
        let good = VoteMatrix::from_rows(3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert!(verify_manipulation(&p, &good).unwrap());
    }

    #[test]
    fn verify_empty_when_already_winning() {
        let p = ScoreProfile::<i64>::new(1, vec![5, 3, 1]).unwrap();
        assert!(verify_manipulation(&p, &VoteMatrix::empty(3)).unwrap());
    }

    #[test]
    fn json_is_canonical() {
        let e = four_voter();
        let text = e.to_json();
        assert_eq!(
            text,
            r#"{"distinguished":5,"m":5,"votes":[[1,2,3,4,5],[2,3,4,1,5],[3,4,1,2,5],[4,1,2,3,5]]}"#
        );
        assert_eq!(Election::from_json(&text).unwrap().to_json(), text);
        let p: ScoreProfile<i64> = e.tally();
        let text = p.to_json();
        assert_eq!(text, r#"{"distinguished":5,"m":5,"scores":[10,10,10,10,0]}"#);
        assert_eq!(ScoreProfile::<i64>::from_json(&text).unwrap().to_json(), text);
    }
}
