//! Critical-radius enumeration.
//!
//! For a fixed center, `B(x,r)` and `B(x,kr)` change only when `r` crosses
//! a distance `ρ(x,y)` or `ρ(x,y)/k`. One radius strictly inside each gap
//! between consecutive breakpoints therefore realizes every ball pair.
//! [`BallIndex`] precomputes those pairs once per `(space, k)` so that each
//! test function costs one pass of integer prefix sums per center.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::Result;
use crate::maximal::{check_k, MaximalValues, OpKind, TestFunction, BallPair, Witness};
use crate::rational::{int, lcm_of_denominators, rat, Rational};
use crate::space::MetricMeasureSpace;

fn representatives(mut breakpoints: Vec<Rational>) -> Vec<Rational> {
    breakpoints.sort();
    breakpoints.dedup();
    let Some(last) = breakpoints.last().cloned() else {
        return vec![int(1)];
    };
    let half = rat(1, 2);
    let mut reps = Vec::with_capacity(breakpoints.len() + 1);
    reps.push(&breakpoints[0] * &half);
    reps.extend(breakpoints.windows(2).map(|w| (&w[0] + &w[1]) * &half));
    reps.push(last + int(1));
    reps
}

fn breakpoints<'a>(row: impl Iterator<Item = &'a Rational>, k: &Rational) -> Vec<Rational> {
    row.filter(|d| !d.is_zero())
        .flat_map(|d| [d.clone(), d / k])
        .collect()
}

/// Representative radii for `center`: half the smallest breakpoint, the
/// midpoint of each gap, and the largest breakpoint plus one.
pub fn critical_radii(space: &MetricMeasureSpace, k: &Rational, center: usize) -> Vec<Rational> {
    representatives(breakpoints(space.row(center).iter(), k))
}

#[derive(Clone, Debug)]
struct Rep {
    radius: Rational,
    n_b: u32,
    n_kb: u32,
    kb_weight: BigUint,
    kb_small: u128,
}

#[derive(Clone, Debug)]
struct CenterBalls {
    /// Points sorted by distance from the center, ties by index.
    order: Vec<u32>,
    /// Distinct `(B, kB)` pairs by increasing radius.
    reps: Vec<Rep>,
}

/// Ball pairs of every center for one `(space, k)`.
#[derive(Clone, Debug)]
pub struct BallIndex {
    k: Rational,
    weight_scale: BigUint,
    scaled_weight: Vec<BigUint>,
    weight_bits: u64,
    centers: Vec<CenterBalls>,
}

trait Acc: Clone + Ord {
    fn zero() -> Self;
    fn add(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn into_big(self) -> BigInt;
}

impl Acc for u128 {
    fn zero() -> Self {
        0
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Acc for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
}

#[derive(Clone)]
struct Best<T> {
    top: T,
    bottom: T,
    center: usize,
    rep: usize,
}

fn greater<T: Acc>(a_top: &T, a_bottom: &T, b_top: &T, b_bottom: &T) -> bool {
    a_top.mul(b_bottom) > b_top.mul(a_bottom)
}

impl BallIndex {
    pub fn new(space: &MetricMeasureSpace, k: &Rational) -> Result<Self> {
        check_k(k)?;
        let n = space.len();
        let w_scale = lcm_of_denominators(space.weights());
        let scaled_weight: Vec<BigUint> = space
            .weights()
            .iter()
            .map(|w| (w.numer() * (&w_scale / w.denom())).to_biguint().expect("positive weights"))
            .collect();
        let total: BigUint = scaled_weight.iter().sum();
        let weight_bits = total.bits();
        let small = weight_bits <= 100;
        let centers = (0..n)
            .map(|c| {
                let row = space.row(c);
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_by(|&a, &b| row[a as usize].cmp(&row[b as usize]).then(a.cmp(&b)));
                let radii = representatives(breakpoints(row.iter(), k));
                let mut reps: Vec<Rep> = Vec::with_capacity(radii.len());
                let (mut n_b, mut n_kb) = (0usize, 0usize);
                let mut kb_weight = <BigUint as Zero>::zero();
                for radius in radii {
                    let kr = k * &radius;
                    while n_b < n && row[order[n_b] as usize] < radius {
                        n_b += 1;
                    }
                    while n_kb < n && row[order[n_kb] as usize] < kr {
                        kb_weight += &scaled_weight[order[n_kb] as usize];
                        n_kb += 1;
                    }
                    if let Some(last) = reps.last() {
                        if last.n_b as usize == n_b && last.n_kb as usize == n_kb {
                            continue;
                        }
                    }
                    let kb_small = if small { kb_weight.to_u128().unwrap() } else { 0 };
                    reps.push(Rep {
                        radius,
                        n_b: n_b as u32,
                        n_kb: n_kb as u32,
                        kb_weight: kb_weight.clone(),
                        kb_small,
                    });
                }
                CenterBalls { order, reps }
            })
            .collect();
        Ok(Self {
            k: k.clone(),
            weight_scale: w_scale.to_biguint().expect("positive"),
            scaled_weight,
            weight_bits,
            centers,
        })
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Number of distinct ball pairs per center.
    pub fn pair_counts(&self) -> Vec<usize> {
        self.centers.iter().map(|c| c.reps.len()).collect()
    }

    /// Every distinct `(B, kB)` pair, in (center, radius) order.
    pub fn ball_pairs(&self) -> Vec<BallPair> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (c, balls) in self.centers.iter().enumerate() {
            for rep in &balls.reps {
                let mut members: Vec<usize> =
                    balls.order[..rep.n_b as usize].iter().map(|&i| i as usize).collect();
                let mut k_members: Vec<usize> =
                    balls.order[..rep.n_kb as usize].iter().map(|&i| i as usize).collect();
                members.sort_unstable();
                k_members.sort_unstable();
                if seen.insert((members.clone(), k_members.clone())) {
                    out.push(BallPair {
                        center: c,
                        radius: rep.radius.clone(),
                        members,
                        k_members,
                    });
                }
            }
        }
        out
    }

    /// Integer tops `f_i·Q·w_i·W` and the scale `Q` (lcm of f's denominators).
    fn tops(&self, f: &TestFunction) -> (Vec<BigUint>, BigUint) {
        let q = lcm_of_denominators(f.values());
        let tops = f
            .values()
            .iter()
            .zip(&self.scaled_weight)
            .map(|(v, w)| (v.numer() * (&q / v.denom())).to_biguint().expect("nonnegative") * w)
            .collect();
        (tops, q.to_biguint().expect("positive"))
    }

    pub fn centered(&self, f: &TestFunction) -> MaximalValues {
        self.evaluate(f, OpKind::Centered)
    }

    pub fn noncentered(&self, f: &TestFunction) -> MaximalValues {
        self.evaluate(f, OpKind::Noncentered)
    }

    pub fn evaluate(&self, f: &TestFunction, op: OpKind) -> MaximalValues {
        assert_eq!(f.len(), self.len(), "function length must match the space");
        let (tops, q) = self.tops(f);
        let total: BigUint = tops.iter().sum();
        let best = if self.weight_bits <= 100 && total.bits() + self.weight_bits <= 126 {
            let small: Vec<u128> = tops.iter().map(|t| t.to_u128().unwrap()).collect();
            self.finish(self.sweep(&small, op, |r| r.kb_small), &q)
        } else {
            self.finish(self.sweep(&tops, op, |r| r.kb_weight.clone()), &q)
        };
        let (values, witnesses) = best;
        MaximalValues {
            op_kind: op,
            k: self.k.clone(),
            values,
            witnesses,
        }
    }

    fn finish<T: Acc>(&self, best: Vec<Best<T>>, q: &BigUint) -> (Vec<Rational>, Vec<Witness>) {
        let q = BigInt::from(q.clone());
        best.into_iter()
            .map(|b| {
                let radius = self.centers[b.center].reps[b.rep].radius.clone();
                let value = Rational::new(b.top.into_big(), b.bottom.into_big() * &q);
                (
                    value,
                    Witness {
                        center: b.center,
                        radius,
                    },
                )
            })
            .unzip()
    }

    /// `(top, bottom)` of every ball pair of one center.
    fn ratios<T: Acc>(&self, balls: &CenterBalls, tops: &[T], bottom: &impl Fn(&Rep) -> T) -> Vec<(T, T)> {
        let mut acc = T::zero();
        let mut seen = 0usize;
        balls
            .reps
            .iter()
            .map(|rep| {
                while seen < rep.n_b as usize {
                    acc.add(&tops[balls.order[seen] as usize]);
                    seen += 1;
                }
                (acc.clone(), bottom(rep))
            })
            .collect()
    }

    fn sweep<T: Acc>(&self, tops: &[T], op: OpKind, bottom: impl Fn(&Rep) -> T) -> Vec<Best<T>> {
        match op {
            OpKind::Centered => self
                .centers
                .iter()
                .enumerate()
                .map(|(c, balls)| {
                    let ratios = self.ratios(balls, tops, &bottom);
                    let mut best = 0;
                    for j in 1..ratios.len() {
                        if greater(&ratios[j].0, &ratios[j].1, &ratios[best].0, &ratios[best].1) {
                            best = j;
                        }
                    }
                    let (top, bottom) = ratios[best].clone();
                    Best {
                        top,
                        bottom,
                        center: c,
                        rep: best,
                    }
                })
                .collect(),
            OpKind::Noncentered => {
                let mut best: Vec<Option<Best<T>>> = vec![None; self.len()];
                for (z, balls) in self.centers.iter().enumerate() {
                    let ratios = self.ratios(balls, tops, &bottom);
                    // suffix[j]: best pair among j.. with the smallest index on ties.
                    let mut suffix = vec![0usize; ratios.len()];
                    let last = ratios.len() - 1;
                    suffix[last] = last;
                    for j in (0..last).rev() {
                        let s = suffix[j + 1];
                        suffix[j] = if greater(&ratios[s].0, &ratios[s].1, &ratios[j].0, &ratios[j].1) {
                            s
                        } else {
                            j
                        };
                    }
                    let mut entered = 0usize;
                    for (j, rep) in balls.reps.iter().enumerate() {
                        let s = suffix[j];
                        let (top, bottom) = &ratios[s];
                        for &x in &balls.order[entered..rep.n_b as usize] {
                            let slot = &mut best[x as usize];
                            let better = match slot {
                                None => true,
                                Some(b) => greater(top, bottom, &b.top, &b.bottom),
                            };
                            if better {
                                *slot = Some(Best {
                                    top: top.clone(),
                                    bottom: bottom.clone(),
                                    center: z,
                                    rep: s,
                                });
                            }
                        }
                        entered = rep.n_b as usize;
                    }
                }
                best.into_iter()
                    .map(|b| b.expect("every point lies in the largest ball"))
                    .collect()
            }
        }
    }

    /// Scale of the integer weights used internally.
    pub fn weight_scale(&self) -> &BigUint {
        &self.weight_scale
    }
}

pub fn m_centered(space: &MetricMeasureSpace, k: &Rational, f: &TestFunction) -> Result<MaximalValues> {
    f.check_len(space)?;
    Ok(BallIndex::new(space, k)?.centered(f))
}

pub fn m_noncentered(
    space: &MetricMeasureSpace,
    k: &Rational,
    f: &TestFunction,
) -> Result<MaximalValues> {
    f.check_len(space)?;
    Ok(BallIndex::new(space, k)?.noncentered(f))
}

/// All distinct `(B, kB)` pairs over every center and representative radius.
pub fn ball_table(space: &MetricMeasureSpace, k: &Rational) -> Result<Vec<BallPair>> {
    Ok(BallIndex::new(space, k)?.ball_pairs())
}
