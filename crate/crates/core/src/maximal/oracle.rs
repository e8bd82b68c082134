//! Brute-force reference evaluation: sample several radii in every gap
//! between breakpoints and scan ball membership directly. Shares no code
//! with [`crate::maximal::enumerate`].

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::maximal::{check_k, MaximalValues, OpKind, TestFunction, Witness};
use crate::rational::{int, Rational};
use crate::space::MetricMeasureSpace;

/// `samples` radii per gap at fractions `j/(samples+1)`; the unbounded
/// last gap is sampled at `max + j`.
fn sampled_radii(space: &MetricMeasureSpace, k: &Rational, center: usize, samples: usize) -> Vec<Rational> {
    let mut cuts: Vec<Rational> = Vec::new();
    for y in 0..space.len() {
        let d = space.dist(center, y);
        if d.is_zero() {
            continue;
        }
        for cut in [d.clone(), d / k] {
            if !cuts.contains(&cut) {
                cuts.push(cut);
            }
        }
    }
    cuts.sort();
    let mut out = Vec::new();
    let mut lo = Rational::zero();
    let denom = int(samples as i64 + 1);
    for hi in &cuts {
        for j in 1..=samples {
            out.push(&lo + (hi - &lo) * int(j as i64) / &denom);
        }
        lo = hi.clone();
    }
    for j in 1..=samples {
        out.push(&lo + int(j as i64));
    }
    out
}

fn ratio(space: &MetricMeasureSpace, f: &TestFunction, k: &Rational, center: usize, r: &Rational) -> Rational {
    let kr = k * r;
    let mut top = Rational::zero();
    let mut bottom = Rational::zero();
    for y in 0..space.len() {
        let d = space.dist(center, y);
        if d < r {
            top += &f.values()[y] * space.weight(y);
        }
        if *d < kr {
            bottom += space.weight(y);
        }
    }
    top / bottom
}

fn check(space: &MetricMeasureSpace, k: &Rational, f: &TestFunction, samples: usize) -> Result<()> {
    check_k(k)?;
    f.check_len(space)?;
    if samples == 0 {
        return Err(Error::InvalidParams("samples_per_gap must be at least 1".into()));
    }
    Ok(())
}

pub fn m_centered_oracle(
    space: &MetricMeasureSpace,
    k: &Rational,
    f: &TestFunction,
    samples_per_gap: usize,
) -> Result<MaximalValues> {
    check(space, k, f, samples_per_gap)?;
    let mut values = Vec::new();
    let mut witnesses = Vec::new();
    for x in 0..space.len() {
        let mut best: Option<(Rational, Rational)> = None;
        for r in sampled_radii(space, k, x, samples_per_gap) {
            let v = ratio(space, f, k, x, &r);
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, r));
            }
        }
        let (v, r) = best.expect("at least one radius");
        values.push(v);
        witnesses.push(Witness { center: x, radius: r });
    }
    Ok(MaximalValues {
        op_kind: OpKind::Centered,
        k: k.clone(),
        values,
        witnesses,
    })
}

pub fn m_noncentered_oracle(
    space: &MetricMeasureSpace,
    k: &Rational,
    f: &TestFunction,
    samples_per_gap: usize,
) -> Result<MaximalValues> {
    check(space, k, f, samples_per_gap)?;
    let n = space.len();
    let mut best: Vec<Option<(Rational, Witness)>> = vec![None; n];
    for z in 0..n {
        for r in sampled_radii(space, k, z, samples_per_gap) {
            let v = ratio(space, f, k, z, &r);
            for (x, slot) in best.iter_mut().enumerate() {
                if *space.dist(z, x) >= r {
                    continue;
                }
                if slot.as_ref().map_or(true, |(b, _)| v > *b) {
                    *slot = Some((
                        v.clone(),
                        Witness {
                            center: z,
                            radius: r.clone(),
                        },
                    ));
                }
            }
        }
    }
    let (values, witnesses) = best
        .into_iter()
        .map(|b| b.expect("every point lies in some ball"))
        .unzip();
    Ok(MaximalValues {
        op_kind: OpKind::Noncentered,
        k: k.clone(),
        values,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::basic::{basic_t, BasicParams};
    use crate::maximal::{m_centered, m_noncentered};
    use crate::rational::rat;

    #[test]
    fn matches_enumeration_on_t() {
        let t = basic_t(&BasicParams::new(3, int(2), int(3))).unwrap();
        let f = TestFunction::new((0..t.len()).map(|i| rat(i as i64 % 4, 3)).collect()).unwrap();
        for k in [int(1), rat(3, 2)] {
            for s in [1, 3] {
                assert_eq!(
                    m_centered_oracle(&t, &k, &f, s).unwrap().values,
                    m_centered(&t, &k, &f).unwrap().values
                );
                assert_eq!(
                    m_noncentered_oracle(&t, &k, &f, s).unwrap().values,
                    m_noncentered(&t, &k, &f).unwrap().values
                );
            }
        }
        assert!(m_centered_oracle(&t, &int(1), &f, 0).is_err());
    }
}
