use convlab::bayes::{bayes_consistency_sim, conditionalize, consistency_verdict, DiscretePrior};
use convlab::problem::{Symbol, World, BLACK, NONBLACK};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn evidence(bits: &[bool]) -> Vec<Symbol> {
    bits.iter().map(|&b| if b { NONBLACK } else { BLACK }).collect()
}

/// Mostly black ravens, so long all-black stretches occur.
fn raven_bits(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(prop::bool::weighted(0.15), 0..=max)
}

proptest! {
    #[test]
    fn conditioning_is_associative(bits in raven_bits(14), split in 0usize..15, k in 1usize..12) {
        let prior = DiscretePrior::geometric(k);
        let e = evidence(&bits);
        let split = split.min(e.len());
        let whole = conditionalize(&prior, &e);
        let stepwise = conditionalize(&prior, &e[..split]).and_then(|p| conditionalize(&p, &e[split..]));
        match (whole, stepwise) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a, &b);
                prop_assert!(a.total().is_one());
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn credence_in_all_black_never_falls(k in 1usize..20, horizon in 0usize..30) {
        let w = World::constant(vec![BLACK]).unwrap();
        let tr = bayes_consistency_sim(&DiscretePrior::geometric(k), &w, horizon).unwrap();
        for pair in tr.points.windows(2) {
            prop_assert!(pair[1].mass() >= pair[0].mass());
        }
    }

    #[test]
    fn truncation_moves_traces_by_at_most_the_posterior_tail(prefix in raven_bits(10), cycle in raven_bits(3), k in 1usize..12) {
        prop_assume!(!cycle.is_empty());
        let w = World::new(evidence(&prefix), evidence(&cycle)).unwrap();
        let prior = DiscretePrior::geometric(k);
        let short = bayes_consistency_sim(&prior, &w, 20).unwrap();
        let long = bayes_consistency_sim(&DiscretePrior::geometric(k + 10), &w, 20).unwrap();
        let observed: Vec<Symbol> = (0..20).map(|t| w.symbol_at(t)).collect();
        for (a, b) in short.points.iter().zip(&long.points) {
            if a.length <= k {
                prop_assert_eq!(a.mass(), b.mass());
            }
            let bound = conditionalize(&prior, &observed[..a.length]).map(|p| p.tail).unwrap_or_else(|_| BigRational::one());
            let d = a.mass() - b.mass();
            let d = if d < BigRational::zero() { -d } else { d };
            prop_assert!(d <= bound, "length {}: {d} > {bound}", a.length);
        }
    }
}

#[test]
fn counterexample_worlds_reach_certainty_on_time() {
    let prior = DiscretePrior::geometric(64);
    for k in 1..=8 {
        let mut prefix = vec![BLACK; k - 1];
        prefix.push(NONBLACK);
        let w = World::new(prefix, vec![BLACK]).unwrap();
        let tr = bayes_consistency_sim(&prior, &w, 12).unwrap();
        assert!(tr.points[k].mass().is_one(), "k={k}");
        assert!(tr.points[k - 1].mass() < BigRational::one());
        assert!(tr.points[k..].iter().all(|p| p.mass().is_one()));
    }
}

#[test]
fn zero_prior_on_the_truth_is_a_failure() {
    let mut prior = DiscretePrior::geometric(8);
    prior.tail += &prior.all_black;
    prior.all_black = BigRational::zero();
    let w = World::constant(vec![BLACK]).unwrap();
    let tr = bayes_consistency_sim(&prior, &w, 12).unwrap();
    assert!(tr.points.iter().all(|p| p.mass().is_zero()));
    let v = consistency_verdict(&prior, 12, &"99/100".parse().unwrap(), 4, 2).unwrap();
    assert!(!v.pass);
    assert!(v.failures.iter().any(|f| f.world.cycle == ["black"] && f.world.prefix.is_empty()));
}
