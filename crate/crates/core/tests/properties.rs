use proptest::prelude::*;

use ldp_minimax::channels::{hellinger_distance, tv_distance, DiscreteChannel, DiscreteDist, PrivacyLevel, Pushforward};
use ldp_minimax::estimators::critical_value_g;

fn weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, k).prop_filter_map("all zero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| w.iter().map(|v| v / s).collect())
    })
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..8).prop_flat_map(|k| (weights(k), weights(k)))
}

fn dist(p: &[f64]) -> DiscreteDist {
    let atoms: Vec<f64> = (0..p.len()).map(|i| i as f64).collect();
    DiscreteDist::scalar(&atoms, p).unwrap()
}

proptest! {
    #[test]
    fn distances_are_symmetric_and_bounded((p, q) in pair()) {
        let (a, b) = (dist(&p), dist(&q));
        let tv = tv_distance(&a, &b);
        let h = hellinger_distance(&a, &b);
        prop_assert!((tv - tv_distance(&b, &a)).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&tv));
        prop_assert!(h <= 2f64.sqrt() + 1e-12);
        prop_assert!(tv <= h + 1e-12 && h <= (2.0 * tv).sqrt() + 1e-12);
    }

    #[test]
    fn randomized_response_contracts((p, q) in pair(), alpha in 0.01f64..5.0) {
        let rr = DiscreteChannel::randomized_response(p.len(), PrivacyLevel::new(alpha).unwrap()).unwrap();
        let (a, b) = (dist(&p), dist(&q));
        let (qa, qb) = (rr.pushforward(&a).unwrap(), rr.pushforward(&b).unwrap());
        prop_assert!(tv_distance(&qa, &qb) <= tv_distance(&a, &b) + 1e-12);
        prop_assert!(hellinger_distance(&qa, &qb) <= hellinger_distance(&a, &b) + 1e-12);
    }

    #[test]
    fn g_lies_between_its_arguments(s in 1e-6f64..0.999, t in 1e-6f64..0.999) {
        let g = critical_value_g(s, t).unwrap();
        prop_assert!(s.min(t) <= g && g <= s.max(t));
        prop_assert_eq!(g, critical_value_g(t, s).unwrap());
    }
}
