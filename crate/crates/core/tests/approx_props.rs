mod common;

use common::*;
use proptest::prelude::*;
use renyirate::approx::{lift_perron, markov_approximation, renyi_rate_approx};
use renyirate::processes::{estimate_constants, ProcessModel};
use renyirate::spectral::eigenvector_ratio_bound;

fn order_one() -> impl Strategy<Value = ProcessModel> {
    (2usize..=3).prop_flat_map(|a| {
        prop::collection::vec(positive_dist(a), a).prop_map(move |t| ProcessModel::markov(a, 1, t, None).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn upscaling_keeps_the_rate(p in order_one(), alpha in prop_oneof![Just(0.5), Just(2.0), Just(4.0)]) {
        let r: Vec<f64> = (1..=3)
            .map(|m| renyi_rate_approx(&markov_approximation(&p, m).unwrap(), alpha, 2.0).unwrap().value)
            .collect();
        prop_assert!((r[0] - r[1]).abs() < 1e-9 && (r[0] - r[2]).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn marginals_are_consistent(p in any_model(), m in 1usize..=3) {
        let a = markov_approximation(&p, m).unwrap();
        prop_assert!(a.max_marginal_error(&p).unwrap() < 1e-12);
    }

    #[test]
    fn lift_eigenvector_spread_is_bounded(p in hmm_model(), alpha in prop_oneof![Just(0.5), Just(2.0)], m in 1usize..=3) {
        let a = markov_approximation(&p, m).unwrap();
        let c = estimate_constants(&p, m + 1, alpha).unwrap();
        let ratio = lift_perron(&a, alpha).unwrap().eigenvector_ratio();
        let bound = eigenvector_ratio_bound(c.c_lower, c.c_upper, alpha, m);
        prop_assert!(ratio <= bound * (1.0 + 1e-9), "{ratio} > {bound}");
    }

    #[test]
    fn shannon_rate_of_approximations_decreases(p in hmm_model()) {
        let r: Vec<f64> = (1..=4)
            .map(|m| renyi_rate_approx(&markov_approximation(&p, m).unwrap(), 1.0, 2.0).unwrap().value)
            .collect();
        for w in r.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10, "{r:?}");
        }
    }
}
