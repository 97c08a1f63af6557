//! Election generators.
//!
//! Random models draw from ChaCha8 seeded with a 64-bit value, so a given
//! `(model, m, p, seed)` always produces the same ballots.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::election::{Candidate, Election, ScoreProfile, Vote};
use crate::error::{Error, Result};
use crate::scalar::Score;

/// Generator stream for a seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Urn replacement count: the number of extra copies of a drawn ranking put
/// back into the urn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UrnWeight {
    /// `a = m!`: the second ballot repeats the first half of the time.
    Factorial,
    Fixed(u64),
}

impl UrnWeight {
    /// `a / m!`, the only quantity the sampler needs.
    fn ratio(self, m: usize) -> f64 {
        match self {
            UrnWeight::Factorial => 1.0,
            UrnWeight::Fixed(0) => 0.0,
            UrnWeight::Fixed(a) => {
                let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
                ((a as f64).ln() - ln_fact).exp()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Uniform,
    Urn(UrnWeight),
    Prop1,
    Thm2 { k: usize },
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Uniform => f.write_str("uniform"),
            Model::Urn(UrnWeight::Factorial) => f.write_str("urn"),
            Model::Urn(UrnWeight::Fixed(a)) => write!(f, "urn-a{a}"),
            Model::Prop1 => f.write_str("prop1"),
            Model::Thm2 { k } => write!(f, "thm2-k{k}"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown model {s:?}"));
        Ok(match s {
            "uniform" => Model::Uniform,
            "urn" => Model::Urn(UrnWeight::Factorial),
            "prop1" => Model::Prop1,
            _ => {
                if let Some(a) = s.strip_prefix("urn-a") {
                    Model::Urn(UrnWeight::Fixed(a.parse().map_err(|_| bad())?))
                } else if let Some(k) = s.strip_prefix("thm2-k") {
                    Model::Thm2 {
                        k: k.parse().map_err(|_| bad())?,
                    }
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenConfig {
    pub m: usize,
    pub p: usize,
    pub model: Model,
    pub seed: u64,
}

impl GenConfig {
    /// Builds the election this configuration describes. `p` and `seed` are
    /// ignored by the deterministic families.
    pub fn generate(&self) -> Result<Election> {
        match self.model {
            Model::Uniform => uniform_election(self.m, self.p, self.seed),
            Model::Urn(a) => urn_election(self.m, self.p, a, self.seed),
            Model::Prop1 => prop1_instance(self.m),
            Model::Thm2 { k } => thm2_election(k),
        }
    }
}

fn check_random_args(m: usize, p: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidConfig(format!("need m >= 2, got {m}")));
    }
    if p < 1 {
        return Err(Error::InvalidConfig("need p >= 1".into()));
    }
    Ok(())
}

fn uniform_vote<R: Rng>(m: usize, rng: &mut R) -> Vote {
    let mut ranking: Vec<Candidate> = (0..m).map(Candidate::from_zero_based).collect();
    ranking.shuffle(rng);
    Vote::from_candidates_unchecked(ranking)
}

fn last(m: usize) -> Candidate {
    Candidate::from_zero_based(m - 1)
}

/// `p` independent uniformly random rankings; candidate `m` is the target.
pub fn uniform_election(m: usize, p: usize, seed: u64) -> Result<Election> {
    check_random_args(m, p)?;
    let mut rng = rng_for(seed);
    let votes = (0..p).map(|_| uniform_vote(m, &mut rng)).collect();
    Ok(Election::from_parts(m, last(m), votes))
}

/// Pólya–Eggenberger urn. The urn starts with one copy of every ranking;
/// each draw is returned together with `a` extra copies.
///
/// Only drawn rankings ever gain weight, so after `t` draws the next ballot
/// is a fresh uniform ranking with probability `m! / (m! + t*a)` and
/// otherwise a copy of one of the earlier `t` ballots chosen uniformly.
/// This never enumerates the `m!` rankings. With `a = 0` the stream is
/// identical to [`uniform_election`] for the same seed.
pub fn urn_election(m: usize, p: usize, a: UrnWeight, seed: u64) -> Result<Election> {
    check_random_args(m, p)?;
    let ratio = a.ratio(m);
    let mut rng = rng_for(seed);
    let mut votes: Vec<Vote> = Vec::with_capacity(p);
    for t in 0..p {
        let fresh = ratio == 0.0 || t == 0 || rng.gen::<f64>() < 1.0 / (1.0 + t as f64 * ratio);
        let vote = if fresh {
            uniform_vote(m, &mut rng)
        } else {
            votes[rng.gen_range(0..t)].clone()
        };
        votes.push(vote);
    }
    Ok(Election::from_parts(m, last(m), votes))
}

/// Two ballots giving candidate `i` exactly `m/2 + i` points and the target
/// `d = m` none, for even `m > 2`.
///
/// Position `j` (1-based, among the first `m - 1` places counted from the
/// bottom) receives `j` points in the first ballot and `j'` in the second,
/// where the second ballot rotates the upper half of `1..m-1` to the front.
/// The slot sums are a permutation of `m/2 + 1 ..= m/2 + m - 1`; each slot
/// is then labelled with the candidate whose closed-form score it carries.
pub fn prop1_instance(m: usize) -> Result<Election> {
    if m <= 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("prop1 needs even m > 2, got {m}")));
    }
    let half = m / 2;
    let first: Vec<usize> = (1..m).collect();
    let second: Vec<usize> = (half + 1..m).chain(1..=half).collect();
    // slot j (0-based) belongs to candidate sum - m/2 (1-based)
    let owner: Vec<usize> = first.iter().zip(&second).map(|(a, b)| a + b - half).collect();
    let ballot = |points: &[usize]| {
        let mut ranking = vec![Candidate::from_zero_based(0); m];
        ranking[m - 1] = last(m);
        for (slot, &pts) in points.iter().enumerate() {
            ranking[m - 1 - pts] = Candidate::from_zero_based(owner[slot] - 1);
        }
        Vote::from_candidates_unchecked(ranking)
    };
    let votes = vec![ballot(&first), ballot(&second)];
    let election = Election::from_parts(m, last(m), votes);
    let tally: ScoreProfile<i64> = election.tally();
    let expected: Vec<i64> = (1..m).map(|i| (half + i) as i64).chain([0]).collect();
    if tally.scores() != expected.as_slice() {
        return Err(Error::Internal(format!(
            "prop1 construction tallied to {:?}",
            tally.scores()
        )));
    }
    Ok(election)
}

fn check_thm2(k: usize) -> Result<()> {
    if k == 0 || !k.is_multiple_of(36) {
        return Err(Error::InvalidConfig(format!(
            "thm2 needs k > 0 divisible by 36, got {k}"
        )));
    }
    Ok(())
}

/// Scores `(6k, 4k, 2k, 0)` with `d = 4`, from `2k` identical ballots.
pub fn thm2_instance<S: Score>(k: usize) -> Result<ScoreProfile<S>> {
    check_thm2(k)?;
    let scores = [6 * k, 4 * k, 2 * k, 0].map(S::from_usize).to_vec();
    Ok(ScoreProfile::new(4, scores)?.with_voter_count(2 * k))
}

/// The `2k` copies of `1 > 2 > 3 > 4` realising [`thm2_instance`].
pub fn thm2_election(k: usize) -> Result<Election> {
    check_thm2(k)?;
    Election::new(4, 4, &vec![vec![1, 2, 3, 4]; 2 * k])
}
