use borda_manip::gen::{rng_for, uniform_election};
use borda_manip::{tally, verify_manipulation, winners, Candidate, Election, Profile, VoteMatrix};
use proptest::prelude::*;
use rand::seq::SliceRandom;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tally_conserves_points(m in 2usize..=9, p in 1usize..=30, seed in any::<u64>()) {
        let e = uniform_election(m, p, seed).unwrap();
        let s: Profile = tally(&e);
        let total: i64 = s.scores().iter().sum();
        prop_assert_eq!(total as usize, p * m * (m - 1) / 2);
        prop_assert!(s.is_consistent());
        let back = Election::from_json(&e.to_json()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn gaps_shift_by_m_minus_one(m in 2usize..=9, p in 1usize..=20, seed in any::<u64>(), n in 0usize..10) {
        let s: Profile = tally(&uniform_election(m, p, seed).unwrap());
        let g0 = s.gaps(0);
        let gn = s.gaps(n);
        let d = s.distinguished();
        for i in 0..m {
            prop_assert_eq!(gn.as_slice()[i] - g0.as_slice()[i], (n * (m - 1)) as i64);
            prop_assert_eq!(g0.as_slice()[i], s.score(d) - s.scores()[i]);
        }
    }

    #[test]
    fn verify_matches_direct_recount(m in 2usize..=7, p in 1usize..=15, n in 0usize..6, seed in any::<u64>()) {
        let e = uniform_election(m, p, seed).unwrap();
        let s: Profile = tally(&e);
        let d = m - 1;
        let mut rng = rng_for(seed ^ 0x5eed);
        let mut rows = Vec::new();
        let mut extra = e.votes().iter().map(|v| v.to_indices()).collect::<Vec<_>>();
        for _ in 0..n {
            let mut rest: Vec<usize> = (0..m - 1).collect();
            rest.shuffle(&mut rng);
            let mut row = rest;
            row.push(m - 1);
            rows.push(row.clone());
            let mut ranking: Vec<usize> = (0..m).collect();
            ranking.sort_by_key(|&c| std::cmp::Reverse(row[c]));
            extra.push(ranking.into_iter().map(|c| c + 1).collect());
        }
        let votes = VoteMatrix::from_rows(m, rows).unwrap();
        let combined: Profile = tally(&Election::new(m, d + 1, &extra).unwrap());
        let expect = winners(&combined).contains(&Candidate::new(d + 1, m).unwrap());
        prop_assert_eq!(verify_manipulation(&s, &votes).unwrap(), expect);
    }
}

#[test]
fn rows_not_backing_d_are_errors() {
    let s = Profile::new(3, vec![2, 1, 0]).unwrap();
    let votes = VoteMatrix::from_rows(3, vec![vec![2, 1, 0]]).unwrap();
    assert!(verify_manipulation(&s, &votes).is_err());
}

#[test]
fn malformed_votes_name_the_ballot() {
    let err = Election::new(3, 1, &[vec![1, 2, 3], vec![1, 1, 3]]).unwrap_err();
    assert!(err.to_string().contains('1'), "{err}");
    assert!(Election::new(3, 4, &[vec![1, 2, 3]]).is_err());
    assert!(Election::new(3, 1, &[vec![1, 2]]).is_err());
    assert!(Election::new(3, 1, &[vec![0, 1, 2]]).is_err());
}
