//! Segment-type spaces: branches of collinear atoms `x[n,0..n]` with
//! prescribed gaps, at mutual distance 1 across branches.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constructions::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, rat, serde_q, Rational};
use crate::space::{indexed_label, MetricMeasureSpace};

/// `d[n-1][i-1] = d_{n,i}` for `i = 1..n`; `f[n-1][i] = F(n,i)` for `i = 0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentParams {
    #[serde(with = "serde_q::vec2")]
    pub d: Vec<Vec<Rational>>,
    #[serde(rename = "F", with = "serde_q::vec2")]
    pub f: Vec<Vec<Rational>>,
}

impl SegmentParams {
    pub fn n_max(&self) -> usize {
        self.d.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.d.is_empty() {
            return Err(Error::InvalidParams("segment space needs at least one branch".into()));
        }
        if self.f.len() != self.d.len() {
            return Err(Error::Dimension(format!(
                "{} gap rows but {} weight rows",
                self.d.len(),
                self.f.len()
            )));
        }
        for (row, (d, f)) in self.d.iter().zip(&self.f).enumerate() {
            let n = row + 1;
            if d.len() != n || f.len() != n + 1 {
                return Err(Error::Dimension(format!(
                    "branch {n} needs {n} gaps and {} weights",
                    n + 1
                )));
            }
            if d.iter().chain(f).any(|v| !v.is_positive()) {
                return Err(Error::InvalidParams(format!(
                    "branch {n} has a nonpositive gap or weight"
                )));
            }
            let gaps: Rational = d.iter().sum();
            if gaps > Rational::one() {
                return Err(Error::InvalidParams(format!(
                    "branch {n}: gaps sum to {} > 1",
                    format_rational(&gaps)
                )));
            }
            let mass: Rational = f.iter().sum();
            let cap = Rational::new(BigInt::one(), BigInt::one() << n);
            if mass > cap {
                return Err(Error::InvalidParams(format!(
                    "branch {n}: weights sum to {} > 2^-{n}",
                    format_rational(&mass)
                )));
            }
        }
        Ok(())
    }
}

pub fn segment_type(params: &SegmentParams) -> Result<MetricMeasureSpace> {
    build(params, Descriptor::Segment(params.clone()))
}

fn build(params: &SegmentParams, descriptor: Descriptor) -> Result<MetricMeasureSpace> {
    params.check()?;
    let mut labels = Vec::new();
    let mut weight = Vec::new();
    // (branch, position along the branch from x[n,0]).
    let mut at = Vec::new();
    let mut offsets = Vec::new();
    for (row, f) in params.f.iter().enumerate() {
        let n = row + 1;
        let mut pos = vec![Rational::zero()];
        for g in &params.d[row] {
            let next = pos.last().unwrap() + g;
            pos.push(next);
        }
        offsets.push(pos);
        for (i, w) in f.iter().enumerate() {
            labels.push(indexed_label("x", &[n as u64, i as u64]));
            weight.push(w.clone());
            at.push((row, i));
        }
    }
    MetricMeasureSpace::from_fn(labels, weight, descriptor.to_json(), |a, b| {
        let ((ra, ia), (rb, ib)) = (at[a], at[b]);
        if ra == rb {
            (&offsets[ra][ia] - &offsets[ra][ib]).abs()
        } else {
            int(1)
        }
    })
}

fn rational_pow(base: &Rational, exponent: i64) -> Rational {
    let p = base.pow(exponent.unsigned_abs() as i32);
    if exponent < 0 {
        p.recip()
    } else {
        p
    }
}

/// `d_{n,i} = (k+1)^{i-n-1}` and `F(n,i) = 2^{-n}/(n+1)` for `i = 0..n`.
pub fn lemma2_params(k: &Rational, n_max: usize) -> Result<SegmentParams> {
    if *k < int(2) {
        return Err(Error::InvalidParams(format!(
            "k = {} must be at least 2",
            format_rational(k)
        )));
    }
    let base = k + int(1);
    let mut d = Vec::new();
    let mut f = Vec::new();
    for n in 1..=n_max as i64 {
        d.push((1..=n).map(|i| rational_pow(&base, i - n - 1)).collect());
        let each = Rational::new(BigInt::one(), (BigInt::one() << n as usize) * (n + 1));
        f.push(vec![each; n as usize + 1]);
    }
    Ok(SegmentParams { d, f })
}

/// `d_{n,i} = (k-1/2)^{i-n-1}`, `F(n,n) = 2^{-n-1}` and
/// `F(n,i) = F(n,i+1)/2^{i+1}` down to `i = 0`.
pub fn lemma3_params(k: &Rational, n_max: usize) -> Result<SegmentParams> {
    if *k < int(3) {
        return Err(Error::InvalidParams(format!(
            "k = {} must be at least 3",
            format_rational(k)
        )));
    }
    let base = k - rat(1, 2);
    let mut d = Vec::new();
    let mut f = Vec::new();
    for n in 1..=n_max as i64 {
        d.push((1..=n).map(|i| rational_pow(&base, i - n - 1)).collect());
        let mut row = vec![Rational::zero(); n as usize + 1];
        row[n as usize] = Rational::new(BigInt::one(), BigInt::one() << (n as usize + 1));
        for i in (0..n as usize).rev() {
            row[i] = &row[i + 1] / Rational::from_integer(BigInt::one() << (i + 1));
        }
        f.push(row);
    }
    Ok(SegmentParams { d, f })
}

pub fn segment_preset_lemma2(k: &Rational, n_max: usize) -> Result<MetricMeasureSpace> {
    let params = lemma2_params(k, n_max)?;
    build(
        &params,
        Descriptor::SegmentLemma2 {
            k: k.clone(),
            n_max,
        },
    )
}

pub fn segment_preset_lemma3(k: &Rational, n_max: usize) -> Result<MetricMeasureSpace> {
    let params = lemma3_params(k, n_max)?;
    build(
        &params,
        Descriptor::SegmentLemma3 {
            k: k.clone(),
            n_max,
        },
    )
}
