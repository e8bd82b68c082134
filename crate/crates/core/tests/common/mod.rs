#![allow(dead_code)]

use maxlab_core::constructions::{random_space, RandomParams};
use maxlab_core::maximal::TestFunction;
use maxlab_core::rational::{int, rat};
use maxlab_core::{MetricMeasureSpace, Rational};
use proptest::prelude::*;

pub fn ks() -> Vec<Rational> {
    vec![int(1), rat(5, 4), rat(3, 2), int(2), rat(5, 2), int(3)]
}

pub fn k_strategy() -> impl Strategy<Value = Rational> {
    proptest::sample::select(ks())
}

pub fn value_strategy() -> impl Strategy<Value = Rational> {
    (0i64..=12, 1i64..=6).prop_map(|(a, b)| rat(a, b))
}

/// A random space together with a nonzero function on it.
pub fn space_and_f(max_points: usize) -> impl Strategy<Value = (MetricMeasureSpace, TestFunction)> {
    (1..=max_points, any::<u64>())
        .prop_map(|(points, seed)| random_space(&RandomParams { points, seed }).unwrap())
        .prop_flat_map(|space| {
            let n = space.len();
            (Just(space), proptest::collection::vec(value_strategy(), n))
        })
        .prop_filter_map("nonzero function", |(space, mut values)| {
            if values.iter().all(|v| *v == int(0)) {
                values[0] = int(1);
            }
            Some((space, TestFunction::new(values).ok()?))
        })
}

pub fn positive_scalar() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=9).prop_map(|(a, b)| rat(a, b))
}
