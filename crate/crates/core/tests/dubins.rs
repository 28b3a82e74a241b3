mod common;

use std::f64::consts::PI;

use common::{endpoint_error, random_config, transform};
use dubins_coverage::dubins::{dubins_shortest, dubins_word, Configuration, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> impl Strategy<Value = Configuration> {
    (-60.0..60.0f64, -60.0..60.0f64, 0.0..2.0 * PI)
        .prop_map(|(x, y, t)| Configuration::new(x, y, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn shortest_reaches_goal(q0 in config(), q1 in config(), r in 0.5..15.0f64) {
        let p = dubins_shortest(q0, q1, r).unwrap();
        prop_assert!(endpoint_error(&p) < 1e-6);
    }

    #[test]
    fn never_shorter_than_straight_line(q0 in config(), q1 in config(), r in 0.5..15.0f64) {
        let p = dubins_shortest(q0, q1, r).unwrap();
        prop_assert!(p.total_length() >= q0.position().distance(&q1.position()) - 1e-9);
    }

    #[test]
    fn shortest_is_minimum_over_words(q0 in config(), q1 in config(), r in 0.5..15.0f64) {
        let best = dubins_shortest(q0, q1, r).unwrap().total_length();
        for word in Word::ALL {
            if let Some(p) = dubins_word(q0, q1, r, word).unwrap() {
                prop_assert!(endpoint_error(&p) < 1e-6, "{word} misses goal");
                prop_assert!(best <= p.total_length() + 1e-9);
            }
        }
    }

    #[test]
    fn rigid_transform_invariance(
        q0 in config(), q1 in config(), r in 0.5..15.0f64,
        phi in 0.0..2.0 * PI, dx in -100.0..100.0f64, dy in -100.0..100.0f64,
    ) {
        let a = dubins_shortest(q0, q1, r).unwrap().total_length();
        let b = dubins_shortest(transform(q0, phi, dx, dy), transform(q1, phi, dx, dy), r)
            .unwrap()
            .total_length();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn scaling(q0 in config(), q1 in config(), r in 0.5..15.0f64, k in 0.1..10.0f64) {
        let a = dubins_shortest(q0, q1, r).unwrap().total_length();
        let s = |q: Configuration| Configuration::new(k * q.x, k * q.y, q.theta);
        let b = dubins_shortest(s(q0), s(q1), k * r).unwrap().total_length();
        prop_assert!((k * a - b).abs() <= 1e-8 * b.max(1.0));
    }

    #[test]
    fn samples_are_spaced_and_on_path(q0 in config(), q1 in config(), r in 0.5..15.0f64) {
        let p = dubins_shortest(q0, q1, r).unwrap();
        let pts = p.sample(0.5).unwrap();
        let first = pts[0];
        let last = *pts.last().unwrap();
        prop_assert!(first.position().distance(&q0.position()) < 1e-9);
        prop_assert!(last.position().distance(&q1.position()) < 1e-6);
        for w in pts.windows(2) {
            prop_assert!(w[0].position().distance(&w[1].position()) <= 0.5 + 1e-9);
        }
    }
}

#[test]
fn about_turn_matches_every_word() {
    let q0 = Configuration::new(0.0, 0.0, 0.0);
    let q1 = Configuration::new(0.0, 0.0, PI);
    let r = 1.0;
    let best = dubins_shortest(q0, q1, r).unwrap();
    let lengths: Vec<f64> = Word::ALL
        .iter()
        .filter_map(|&w| dubins_word(q0, q1, r, w).unwrap())
        .map(|p| p.total_length())
        .collect();
    assert!(!lengths.is_empty());
    let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((best.total_length() - min).abs() < 1e-12);
    assert!(endpoint_error(&best) < 1e-6);
}

#[test]
fn polyline_length_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let q0 = random_config(&mut rng, 30.0);
        let q1 = random_config(&mut rng, 30.0);
        let p = dubins_shortest(q0, q1, 3.0).unwrap();
        let chord = |step: f64| -> f64 {
            p.sample(step)
                .unwrap()
                .windows(2)
                .map(|w| w[0].position().distance(&w[1].position()))
                .sum()
        };
        let coarse = p.total_length() - chord(1.0);
        let fine = p.total_length() - chord(0.05);
        assert!(coarse >= -1e-9 && fine >= -1e-9);
        assert!(fine <= coarse + 1e-9);
        assert!(fine < 1e-3 * p.total_length().max(1.0));
    }
}

#[test]
fn segments_chain_end_to_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let p = dubins_shortest(
            random_config(&mut rng, 40.0),
            random_config(&mut rng, 40.0),
            4.0,
        )
        .unwrap();
        let segs = p.segments();
        assert!(segs[0].start().distance(&p.start.position()) < 1e-9);
        assert!(segs.last().unwrap().end().distance(&p.end.position()) < 1e-6);
        for w in segs.windows(2) {
            assert!(w[0].end().distance(&w[1].start()) < 1e-6);
        }
        let total: f64 = segs.iter().map(|s| s.length()).sum();
        assert!((total - p.total_length()).abs() < 1e-6);
    }
}
