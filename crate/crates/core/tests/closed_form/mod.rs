//! Closed-form ball lists of the star and two-layer spaces, and the
//! `(B(c,r), B(c,kr))` sets they predict for `ball_table`.
#![allow(dead_code)]

use std::collections::BTreeSet;

use maxlab_core::constructions::basic::{t_role, TRole};
use maxlab_core::maximal::BallPair;
use maxlab_core::rational::{int, rat};
use maxlab_core::Rational;

pub type Pair = (Vec<usize>, Vec<usize>);

pub fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Closed-form `B(x, r)` on `S_{τ,d,m}`; index 0 is `x_0`.
pub fn star_ball(tau: usize, d: &Rational, c: usize, r: &Rational) -> Vec<usize> {
    let one = int(1);
    if *r <= one {
        vec![c]
    } else if c == 0 || r > d {
        all(tau + 1)
    } else {
        vec![0, c]
    }
}

/// Closed-form `B(y, r)` on `T_{τ,d,m}` in the `basic_t` index layout.
pub fn two_layer_ball(tau: usize, d: &Rational, c: usize, r: &Rational) -> Vec<usize> {
    let half = (d + int(1)) / int(2);
    let inner: Vec<usize> = (1..=tau).collect();
    let outer: Vec<usize> = (tau + 1..=2 * tau).collect();
    let mut set: Vec<usize> = if *r <= int(1) {
        vec![c]
    } else if r > d {
        all(2 * tau + 1)
    } else {
        match t_role(c, tau) {
            TRole::Root if *r <= half => std::iter::once(0).chain(inner).collect(),
            TRole::Root => all(2 * tau + 1),
            TRole::Inner(i) if *r <= half => vec![0, i, tau + i],
            TRole::Inner(i) => std::iter::once(0).chain(inner).chain([tau + i]).collect(),
            TRole::Outer(i) if *r <= half => vec![i, tau + i],
            TRole::Outer(i) => [0, i].into_iter().chain(outer).collect(),
        }
    };
    set.sort_unstable();
    set
}

/// Pairs `(B(c,r), B(c,kr))` at midpoints between the closed-form
/// breakpoints and their `1/k` multiples, plus one radius past the last.
pub fn expected<F: Fn(usize, &Rational) -> Vec<usize>>(
    len: usize,
    breaks: &[Rational],
    k: &Rational,
    ball: F,
) -> BTreeSet<Pair> {
    let mut cuts: Vec<Rational> = breaks.iter().flat_map(|b| [b.clone(), b / k]).collect();
    cuts.sort();
    cuts.dedup();
    let mut radii = vec![&cuts[0] / int(2)];
    radii.extend(cuts.windows(2).map(|w| (&w[0] + &w[1]) / int(2)));
    radii.push(cuts.last().unwrap() + int(1));
    let mut out = BTreeSet::new();
    for c in 0..len {
        for r in &radii {
            out.insert((ball(c, r), ball(c, &(k * r))));
        }
    }
    out
}

pub fn actual(table: Vec<BallPair>) -> BTreeSet<Pair> {
    table.into_iter().map(|b| (b.members, b.k_members)).collect()
}

pub fn grid(ds: &[Rational]) -> Vec<(usize, Rational, Rational)> {
    let mut out = Vec::new();
    for tau in [1usize, 2, 3, 5] {
        for d in ds {
            for m in [rat(3, 2), int(4)] {
                out.push((tau, d.clone(), m));
            }
        }
    }
    out
}

pub fn ks() -> Vec<Rational> {
    vec![int(1), rat(5, 4), rat(3, 2), int(2), int(3)]
}
