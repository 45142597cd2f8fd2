//! Property tests for the order-theoretic core.

use proptest::prelude::*;

use manip_core::prefs::{LinearVote, PartialVote};
use manip_core::rules::{unique_winner, Rule, Tally};
use manip_core::{CandidateSet, Profile};

/// A random transitively-closed partial vote: a random linear order with a
/// random subset of candidates forgotten.
fn arb_partial_vote(max_m: usize) -> impl Strategy<Value = PartialVote> {
    (2..=max_m).prop_flat_map(|m| {
        (
            Just(m),
            proptest::collection::vec(any::<u32>(), m),
            proptest::bits::u8::masked(0x3f),
        )
            .prop_map(|(m, keys, forget_bits)| {
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by_key(|&i| keys[i]);
                let complete =
                    PartialVote::from_linear(&LinearVote::new(order, m).expect("permutation"));
                let pairs: Vec<(usize, usize)> = complete
                    .pairs()
                    .into_iter()
                    .filter(|&(a, b)| {
                        (forget_bits >> (a % 6)) & 1 == 0 && (forget_bits >> (b % 6)) & 1 == 0
                    })
                    .collect();
                PartialVote::transitive_close(&pairs, m).expect("subset of closed order")
            })
    })
}

proptest! {
    #[test]
    fn closure_is_idempotent(v in arb_partial_vote(6)) {
        let again = PartialVote::transitive_close(&v.pairs(), v.m()).unwrap();
        prop_assert_eq!(v, again);
    }

    #[test]
    fn extensions_contain_all_forced_pairs_exactly_once(v in arb_partial_vote(5)) {
        let exts = v.extensions().unwrap();
        let pairs = v.pairs();
        for e in &exts {
            for &(a, b) in &pairs {
                prop_assert!(e.prefers(a, b));
            }
        }
        // No duplicates and lexicographically sorted.
        for w in exts.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        prop_assert_eq!(exts.len() as u64, v.count_extensions().unwrap());
    }

    #[test]
    fn extreme_extension_is_an_extension(v in arb_partial_vote(5)) {
        let m = v.m();
        let exts = v.extensions().unwrap();
        for hi in 0..m {
            for lo in 0..m {
                if hi != lo {
                    prop_assert!(exts.contains(&v.extend_extreme(hi, lo)));
                }
            }
        }
    }

    #[test]
    fn placement_feasibility_matches_enumeration(v in arb_partial_vote(5)) {
        let m = v.m();
        let exts = v.extensions().unwrap();
        for inc in 0..m {
            for exc in 0..m {
                if inc == exc { continue; }
                for k in 0..=m {
                    let brute = exts.iter().any(|e| {
                        e.position(inc) <= k && e.position(exc) > k
                    });
                    prop_assert_eq!(v.placement_feasible(&[inc], &[exc], k), brute);
                }
            }
        }
    }

    #[test]
    fn winner_is_invariant_under_vote_permutation(
        keys in proptest::collection::vec(0u8..4, 2..5),
        swap in any::<proptest::sample::Index>(),
    ) {
        // Small profiles over three candidates from a fixed vote menu.
        let menu: [&[usize; 3]; 4] = [&[0, 1, 2], &[1, 2, 0], &[2, 0, 1], &[2, 1, 0]];
        let votes: Vec<LinearVote> = keys
            .iter()
            .map(|&k| LinearVote::new(menu[k as usize].to_vec(), 3).unwrap())
            .collect();
        let mut shuffled = votes.clone();
        let i = swap.index(shuffled.len());
        shuffled.swap(0, i);
        let cands = CandidateSet::from_names(&["a", "b", "c"]).unwrap();
        for rule in [Rule::Plurality, Rule::Borda, Rule::Bucklin, Rule::Maximin, Rule::Copeland] {
            let a = unique_winner(&rule, &Profile::new(cands.clone(), votes.clone()).unwrap()).unwrap();
            let b = unique_winner(&rule, &Profile::new(cands.clone(), shuffled.clone()).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn incremental_tally_matches_batch(
        keys in proptest::collection::vec(0u8..4, 0..6),
    ) {
        let menu: [&[usize; 3]; 4] = [&[0, 1, 2], &[1, 2, 0], &[2, 0, 1], &[2, 1, 0]];
        let votes: Vec<LinearVote> = keys
            .iter()
            .map(|&k| LinearVote::new(menu[k as usize].to_vec(), 3).unwrap())
            .collect();
        let mut incremental = Tally::new(3);
        for v in &votes {
            incremental.add_vote(v);
        }
        let batch = Tally::from_votes(3, &votes);
        prop_assert_eq!(incremental.margins(), batch.margins());
        prop_assert_eq!(incremental.bucklin_scores(), batch.bucklin_scores());
    }
}
