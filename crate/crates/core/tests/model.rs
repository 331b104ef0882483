use hierperc_core::model::{
    connectivity_coefficient, edge_prob, er_connected_prob, er_disconnected_prob,
    pair_connect_prob,
};
use hierperc_core::ConnectivityProfile;
use proptest::prelude::*;

/// Probability that `G(n, 1 - q)` is connected, summed over all labelled
/// graphs on `n` vertices.
fn connected_by_enumeration(n: usize, q: f64) -> f64 {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut total = 0.0;
    for mask in 0u32..1 << pairs.len() {
        let mut comp: Vec<usize> = (0..n).collect();
        let mut weight = 1.0;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight *= 1.0 - q;
                let (ca, cb) = (comp[a], comp[b]);
                for c in comp.iter_mut() {
                    if *c == cb {
                        *c = ca;
                    }
                }
            } else {
                weight *= q;
            }
        }
        if comp.iter().all(|&c| c == comp[0]) {
            total += weight;
        }
    }
    total
}

#[test]
fn gilbert_recursion_matches_enumeration() {
    for n in 1..=5 {
        for q in [0.1, 0.25, 0.5, 0.9] {
            let exact = connected_by_enumeration(n, q);
            let rec = er_connected_prob(n, q).unwrap();
            assert!((exact - rec).abs() < 1e-12, "n={n} q={q}: {exact} vs {rec}");
        }
    }
}

#[test]
fn failure_probability_is_bounded_by_coefficient() {
    for order in 2..=8usize {
        let c = connectivity_coefficient(order as u32);
        let mut last_ratio = 0.0;
        for q in [1e-2, 1e-3, 1e-4] {
            let ratio = er_disconnected_prob(order, q).unwrap() / f64::powi(q, order as i32 - 1);
            assert!(ratio <= c, "N={order} q={q}: ratio {ratio} exceeds {c}");
            last_ratio = ratio;
        }
        // The margin is a factor two over the leading coefficient.
        assert!((c / last_ratio - 2.0).abs() < 0.01, "N={order}: {last_ratio}");
    }
}

#[test]
fn connection_probability_is_monotone_in_q() {
    for n in 2..=9 {
        let mut last = 1.0;
        for i in 0..=50 {
            let p = er_connected_prob(n, i as f64 / 50.0).unwrap();
            assert!(p <= last + 1e-15);
            last = p;
        }
    }
}

fn profile(c0: f64, c1: f64, c2: f64, alpha: f64) -> ConnectivityProfile {
    ConnectivityProfile::new(2, 1.0, c0, c1, c2, alpha).unwrap()
}

proptest! {
    #[test]
    fn edge_prob_monotone_in_constants(
        c0 in 0.0f64..5.0, c1 in 0.0f64..5.0, c2 in 0.01f64..50.0, alpha in 0.1f64..6.0,
        bump in 0.0f64..3.0, k in 1u32..30,
    ) {
        let base = profile(c0, c1, c2, alpha);
        let p = edge_prob(&base, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        for other in [
            profile(c0 + bump, c1, c2, alpha),
            profile(c0, c1 + bump, c2, alpha),
            profile(c0, c1, c2 + bump, alpha),
            profile(c0, c1, c2, alpha + bump),
        ] {
            prop_assert!(edge_prob(&other, k).unwrap() >= p);
        }
    }

    #[test]
    fn pair_connect_monotone(
        x1 in 0.0f64..=1.0, x2 in 0.0f64..=1.0, dx in 0.0f64..=1.0,
        c2 in 0.01f64..50.0, alpha in 0.1f64..4.0, k in 1u32..40,
    ) {
        let pr = profile(0.0, 0.0, c2, alpha);
        let p = pair_connect_prob(x1, x2, k, &pr).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let y1 = (x1 + dx).min(1.0);
        prop_assert!(pair_connect_prob(y1, x2, k, &pr).unwrap() >= p);
        prop_assert!(pair_connect_prob(x1, y1, k, &pr).unwrap() >= pair_connect_prob(x1, x1, k, &pr).unwrap());
        prop_assert!(pair_connect_prob(x1, x2, k, &profile(0.0, 0.0, c2 + dx, alpha)).unwrap() >= p);
        prop_assert!(pair_connect_prob(x1, x2, k, &profile(0.0, 0.0, c2, alpha + dx)).unwrap() >= p);
    }
}
