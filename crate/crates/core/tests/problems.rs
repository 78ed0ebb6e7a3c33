use convlab::convergence::random::random_problem;
use convlab::convergence::simulated_truth;
use convlab::problem::{Symbol, World};
use convlab::rng;
use proptest::prelude::*;

fn symbols(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..2, 0..=max_len)
}

fn world(prefix: &[usize], cycle: &[usize]) -> World {
    let s = |v: &[usize]| v.iter().map(|&i| Symbol(i)).collect::<Vec<_>>();
    World::new(s(prefix), s(cycle)).unwrap()
}

proptest! {
    #[test]
    fn truth_is_invariant_under_unrolling(
        seed in any::<u64>(),
        prefix in symbols(6),
        cycle in prop::collection::vec(0usize..2, 1..=3),
    ) {
        let p = random_problem(&mut rng::stream(seed, 0), 4, 2);
        let w = world(&prefix, &cycle);
        let t = p.truth_of_world(&w).unwrap();
        prop_assert_eq!(p.truth_of_world(&w.unrolled()).unwrap(), t);
        prop_assert_eq!(p.truth_of_world(&w.unrolled().unrolled()).unwrap(), t);
    }

    #[test]
    fn truth_matches_plain_simulation(
        seed in any::<u64>(),
        prefix in symbols(6),
        cycle in prop::collection::vec(0usize..2, 1..=3),
    ) {
        let p = random_problem(&mut rng::stream(seed, 0), 4, 2);
        let w = world(&prefix, &cycle);
        prop_assert_eq!(p.truth_of_world(&w).unwrap(), simulated_truth(&p, &w));
    }

    #[test]
    fn possible_truths_shrink_and_contain_every_extension(
        seed in any::<u64>(),
        evidence in symbols(6),
        next in 0usize..2,
        cycle in prop::collection::vec(0usize..2, 1..=3),
    ) {
        let p = random_problem(&mut rng::stream(seed, 0), 4, 2);
        let e: Vec<Symbol> = evidence.iter().map(|&i| Symbol(i)).collect();
        let before = p.possible_truths(&e).unwrap();
        let mut longer = e.clone();
        longer.push(Symbol(next));
        let after = p.possible_truths(&longer).unwrap();
        prop_assert!(after.is_subset(&before));
        prop_assert!(!after.is_empty());
        let w = world(&evidence, &cycle);
        prop_assert!(before.contains(&p.truth_of_world(&w).unwrap()));
    }
}
