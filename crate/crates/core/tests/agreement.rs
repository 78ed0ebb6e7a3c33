use convlab::convergence::{checker_oracle_agreement, OracleConfig};

#[test]
fn checker_and_oracle_agree_on_random_pairs() {
    let r = checker_oracle_agreement(1000, 1, OracleConfig::new(8, 3)).unwrap();
    assert_eq!(r.partial_oracle_runs, 0);
    assert!(r.contradictions.is_empty(), "{:#?}", r.contradictions.first());
    assert!(r.replay_failures.is_empty(), "{:#?}", r.replay_failures.first());
    assert!(r.stable_pointwise_not_pointwise.is_empty());
}
