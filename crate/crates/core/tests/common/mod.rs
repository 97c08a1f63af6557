#![allow(dead_code)]

use borda_manip::{Candidate, ColumnMatrix, Profile};
use rand::seq::SliceRandom;
use rand::Rng;

/// All permutations of `items`.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Whether some multiset of `n` ballots ranking `d` first makes `d` a
/// winner, by enumerating every such multiset.
pub fn brute_force_exists(profile: &Profile, n: usize) -> bool {
    let m = profile.m();
    let d = profile.distinguished().zero_based();
    let competing: Vec<usize> = (0..m).filter(|&i| i != d).collect();
    // Each ballot type: points per candidate.
    let types: Vec<Vec<i64>> = permutations(&competing)
        .into_iter()
        .map(|order| {
            let mut pts = vec![0i64; m];
            pts[d] = (m - 1) as i64;
            for (rank, &c) in order.iter().enumerate() {
                pts[c] = (m - 2 - rank) as i64;
            }
            pts
        })
        .collect();
    fn go(types: &[Vec<i64>], from: usize, left: usize, totals: &mut Vec<i64>, d: usize) -> bool {
        if left == 0 {
            return totals.iter().all(|&t| t <= totals[d]);
        }
        for t in from..types.len() {
            for (x, p) in totals.iter_mut().zip(&types[t]) {
                *x += p;
            }
            let ok = go(types, t, left - 1, totals, d);
            for (x, p) in totals.iter_mut().zip(&types[t]) {
                *x -= p;
            }
            if ok {
                return true;
            }
        }
        false
    }
    let mut totals = profile.scores().to_vec();
    go(&types, 0, n, &mut totals, d)
}

/// Smallest coalition found by enumeration, if it is at most `max_n`.
pub fn brute_force_minimum(profile: &Profile, max_n: usize) -> Option<usize> {
    (0..=max_n).find(|&n| brute_force_exists(profile, n))
}

/// A random column matrix satisfying the count invariants: every value
/// `0..=m-2` dealt `n` times at random over the competing columns.
pub fn random_column_matrix<R: Rng>(rng: &mut R, m: usize, n: usize, d: usize) -> ColumnMatrix {
    let mut values: Vec<usize> = (0..m - 1).flat_map(|v| std::iter::repeat_n(v, n)).collect();
    values.shuffle(rng);
    let mut chunks = values.chunks(n.max(1));
    let columns = (0..m)
        .map(|i| {
            if i == d {
                vec![m - 1; n]
            } else if n == 0 {
                vec![]
            } else {
                chunks.next().unwrap().to_vec()
            }
        })
        .collect();
    ColumnMatrix::new(Candidate::new(d + 1, m).unwrap(), n, columns).unwrap()
}

/// Random tally of `p` uniform ballots over `m` candidates, backing the
/// zero-based candidate `d`.
pub fn random_profile<R: Rng>(rng: &mut R, m: usize, p: usize, d: usize) -> Profile {
    let mut scores = vec![0i64; m];
    let mut order: Vec<usize> = (0..m).collect();
    for _ in 0..p {
        order.shuffle(rng);
        for (pos, &c) in order.iter().enumerate() {
            scores[c] += (m - 1 - pos) as i64;
        }
    }
    Profile::new(d + 1, scores).unwrap()
}

pub const LSLG_WINS_1: [i64; 8] = [67, 60, 59, 58, 58, 52, 52, 42];
pub const LSLG_WINS_2: [i64; 8] = [41, 34, 30, 27, 27, 26, 25, 14];
