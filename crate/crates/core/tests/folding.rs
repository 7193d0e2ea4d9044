mod common;

use ec_core::{fold, member, surjective, Letter, Word};
use proptest::prelude::*;

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 1..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect()).reduced())
}

fn generating_set() -> impl Strategy<Value = (usize, Vec<Word>)> {
    (1usize..=3).prop_flat_map(|rank| (Just(rank), prop::collection::vec(word(rank, 5), 1..=4)))
}

#[test]
fn folding_is_confluent() {
    common::runner(0xf01d_0001, 256)
        .run(&generating_set(), |(rank, words)| {
            let a = fold(&words, rank);
            let mut reversed = words.clone();
            reversed.reverse();
            let b = fold(&reversed, rank);
            // Inverses and duplicates span the same subgroup.
            let mut padded: Vec<Word> = words.iter().map(Word::inverse).collect();
            padded.extend(words.iter().cloned());
            let c = fold(&padded, rank);
            prop_assert_eq!(a.transitions(), b.transitions());
            prop_assert_eq!(a.transitions(), c.transitions());
            prop_assert!(a.is_folded() && a.is_core());
            prop_assert!(a.rank() <= words.len());
            Ok(())
        })
        .unwrap();
}

#[test]
fn members_are_closed_under_products() {
    let strategy = generating_set().prop_flat_map(|(rank, words)| {
        let n = words.len();
        (Just(rank), Just(words), prop::collection::vec(prop::collection::vec((0..n, any::<bool>()), 0..6), 100))
    });
    common::runner(0xf01d_0002, 32)
        .run(&strategy, |(rank, words, products)| {
            let g = fold(&words, rank);
            for w in &words {
                prop_assert!(member(&g, w));
                prop_assert!(member(&g, &w.inverse()));
            }
            for p in products {
                let w = p.iter().fold(Word::empty(), |acc, &(i, inv)| {
                    acc.mul(&if inv { words[i].inverse() } else { words[i].clone() })
                });
                prop_assert!(member(&g, &w), "{} not recognized", w);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn surjectivity_means_every_generator_is_a_member() {
    common::runner(0xf01d_0003, 256)
        .run(&generating_set(), |(rank, words)| {
            let g = fold(&words, rank);
            let all = (0..rank).all(|i| member(&g, &Word::generator(i)));
            prop_assert_eq!(surjective(&g), all);
            Ok(())
        })
        .unwrap();
}

#[test]
fn full_generator_set_has_ambient_rank() {
    for rank in 0..6 {
        let gens: Vec<Word> = (0..rank).map(Word::generator).collect();
        let g = fold(&gens, rank);
        assert_eq!(g.rank(), rank);
        assert!(surjective(&g));
        assert_eq!(g.states(), 1);
    }
    // A Nielsen-equivalent basis folds to the same rose.
    let basis = vec![Word::from_signed(&[1, 2]).unwrap(), Word::generator(1)];
    assert!(surjective(&fold(&basis, 2)));
    assert_eq!(fold(&basis, 2).rank(), 2);
}
