//! Weak and strong `(p,p)` ratios of a maximal function against its input,
//! and lower-bound searches for the best constants.

pub mod search;
pub mod upper;

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::maximal::{maximal, OpKind, TestFunction};
use crate::rational::{format_rational, to_f64, Exponent, Rational};
use crate::space::MetricMeasureSpace;

pub use search::{
    ascent_search, delta_scan, orbit_ascent_search, orbit_delta_scan, random_function,
    AscentOptions, ConstantEstimate, SearchLog,
};
pub use upper::{analytic_upper, AnalyticUpper, UpperTarget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Weak,
    Strong,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Weak => "weak",
            Kind::Strong => "strong",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" | "w" => Ok(Kind::Weak),
            "strong" | "s" => Ok(Kind::Strong),
            other => Err(Error::InvalidParams(format!("unknown kind `{other}`"))),
        }
    }
}

/// The exact quantities behind a ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactCore {
    /// Weak ratio: the maximizing level `λ*` and `μ({g ≥ λ*})`.
    Level { level: Rational, measure: Rational },
    /// Strong ratio with integer `p`: `Σ g^p μ` and `Σ f^p μ`.
    PowerSums { g: Rational, f: Rational },
    /// `p = ∞`: `max g` and `max f`.
    Sup { g: Rational, f: Rational },
    /// Strong ratio with non-integer `p`, evaluated in floating point.
    Float,
}

impl ExactCore {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ExactCore::Level { level, measure } => json!({
                "level": format_rational(level),
                "measure": format_rational(measure),
            }),
            ExactCore::PowerSums { g, f } => json!({
                "g_power_sum": format_rational(g),
                "f_power_sum": format_rational(f),
            }),
            ExactCore::Sup { g, f } => json!({
                "g_max": format_rational(g),
                "f_max": format_rational(f),
            }),
            ExactCore::Float => serde_json::Value::Null,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioResult {
    pub p: Exponent,
    pub kind: Kind,
    pub op_kind: OpKind,
    pub k: Rational,
    pub value: f64,
    pub exact_core: ExactCore,
}

/// `(1/μ(E)) Σ_{i∈E} f_i μ_i`.
pub fn average_on_set(space: &MetricMeasureSpace, f: &TestFunction, set: &[usize]) -> Result<Rational> {
    f.check_len(space)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let top = set
        .iter()
        .fold(Rational::zero(), |acc, &i| acc + &f.values()[i] * space.weight(i));
    Ok(top / space.measure_of(set))
}

fn power_sum(values: &[Rational], mass: &[Rational], p: u32) -> Rational {
    values
        .iter()
        .zip(mass)
        .filter(|(v, _)| !v.is_zero())
        .fold(Rational::zero(), |acc, (v, m)| acc + v.pow(p as i32) * m)
}

fn power_sum_f64(values: &[Rational], mass: &[Rational], p: f64) -> f64 {
    values
        .iter()
        .zip(mass)
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, m)| to_f64(v).powf(p) * to_f64(m))
        .sum()
}

/// Levels of `g` in decreasing order with `μ({g ≥ v})`.
fn level_masses(g: &[Rational], mass: &[Rational]) -> Vec<(Rational, Rational)> {
    let mut pairs: Vec<(&Rational, &Rational)> = g.iter().zip(mass).filter(|(v, _)| v.is_positive()).collect();
    pairs.sort_by(|a, b| b.0.cmp(a.0));
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    let mut acc = Rational::zero();
    for (v, m) in pairs {
        acc += m;
        match out.last_mut() {
            Some((last, total)) if last == v => *total = acc.clone(),
            _ => out.push((v.clone(), acc.clone())),
        }
    }
    out
}

/// `‖g‖_{p,∞}/‖f‖_p` (weak) or `‖g‖_p/‖f‖_p` (strong) on atoms with the
/// given masses. `p = ∞` is the sup-norm ratio for both kinds.
pub fn lp_ratio(
    f: &[Rational],
    g: &[Rational],
    mass: &[Rational],
    p: &Exponent,
    kind: Kind,
) -> Result<(f64, ExactCore)> {
    if f.len() != g.len() || f.len() != mass.len() {
        return Err(Error::Dimension("f, g and masses must have equal length".into()));
    }
    if f.iter().all(Zero::is_zero) {
        return Err(Error::ZeroFunction);
    }
    let p_val = match p {
        Exponent::Infinite => {
            let gm = g.iter().max().cloned().unwrap_or_else(Rational::zero);
            let fm = f.iter().max().cloned().unwrap_or_else(Rational::zero);
            let value = to_f64(&(&gm / &fm));
            return Ok((value, ExactCore::Sup { g: gm, f: fm }));
        }
        Exponent::Finite(p_val) => p_val,
    };
    let pf = to_f64(p_val);
    match (kind, p.as_integer()) {
        (Kind::Weak, Some(pi)) => {
            let denom = power_sum(f, mass, pi);
            let mut best: Option<(Rational, Rational, Rational)> = None;
            for (v, m) in level_masses(g, mass) {
                let score = v.pow(pi as i32) * &m;
                if best.as_ref().map_or(true, |(s, _, _)| score > *s) {
                    best = Some((score, v, m));
                }
            }
            let (score, level, measure) = best.expect("g ≥ f is nonzero somewhere");
            let value = to_f64(&(score / denom)).powf(1.0 / pf);
            Ok((value, ExactCore::Level { level, measure }))
        }
        (Kind::Weak, None) => {
            let denom = power_sum_f64(f, mass, pf).powf(1.0 / pf);
            let mut best: Option<(f64, Rational, Rational)> = None;
            for (v, m) in level_masses(g, mass) {
                let score = to_f64(&v) * to_f64(&m).powf(1.0 / pf);
                if best.as_ref().map_or(true, |(s, _, _)| score > *s) {
                    best = Some((score, v, m));
                }
            }
            let (score, level, measure) = best.expect("g ≥ f is nonzero somewhere");
            Ok((score / denom, ExactCore::Level { level, measure }))
        }
        (Kind::Strong, Some(pi)) => {
            let gs = power_sum(g, mass, pi);
            let fs = power_sum(f, mass, pi);
            let value = to_f64(&(&gs / &fs)).powf(1.0 / pf);
            Ok((value, ExactCore::PowerSums { g: gs, f: fs }))
        }
        (Kind::Strong, None) => {
            let value = (power_sum_f64(g, mass, pf) / power_sum_f64(f, mass, pf)).powf(1.0 / pf);
            Ok((value, ExactCore::Float))
        }
    }
}

pub fn ratio(
    space: &MetricMeasureSpace,
    k: &Rational,
    p: &Exponent,
    kind: Kind,
    op: OpKind,
    f: &TestFunction,
) -> Result<RatioResult> {
    f.check_len(space)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let g = maximal(space, k, op, f)?;
    let (value, exact_core) = lp_ratio(f.values(), &g.values, space.weights(), p, kind)?;
    Ok(RatioResult {
        p: p.clone(),
        kind,
        op_kind: op,
        k: k.clone(),
        value,
        exact_core,
    })
}

pub fn weak_ratio(
    space: &MetricMeasureSpace,
    k: &Rational,
    p: &Exponent,
    op: OpKind,
    f: &TestFunction,
) -> Result<RatioResult> {
    ratio(space, k, p, Kind::Weak, op, f)
}

pub fn strong_ratio(
    space: &MetricMeasureSpace,
    k: &Rational,
    p: &Exponent,
    op: OpKind,
    f: &TestFunction,
) -> Result<RatioResult> {
    ratio(space, k, p, Kind::Strong, op, f)
}
