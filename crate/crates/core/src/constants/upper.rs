//! Closed-form upper bounds for the best constants on the basic and
//! segment spaces.

use serde::Serialize;

use crate::constants::Kind;
use crate::constructions::basic::BasicParams;
use crate::constructions::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::maximal::OpKind;
use crate::rational::{format_rational, int, to_f64, Exponent, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum UpperTarget {
    BasicS(BasicParams),
    BasicT(BasicParams),
    /// Segment space with `d_{n,i} = (k+1)^{i-n-1}`, built for `k_space`.
    SegmentLemma2 { k_space: Rational },
    /// Segment space with `d_{n,i} = (k-1/2)^{i-n-1}`, built for `k_space`.
    SegmentLemma3 { k_space: Rational },
    /// A single atom, where `M f = f`.
    OnePoint,
}

impl UpperTarget {
    /// The bound target of a space built from `descriptor`, if any.
    pub fn from_descriptor(descriptor: &Descriptor) -> Option<Self> {
        match descriptor {
            Descriptor::BasicS(p) => Some(UpperTarget::BasicS(p.clone())),
            Descriptor::BasicT(p) => Some(UpperTarget::BasicT(p.clone())),
            Descriptor::SegmentLemma2 { k, .. } => Some(UpperTarget::SegmentLemma2 { k_space: k.clone() }),
            Descriptor::SegmentLemma3 { k, .. } => Some(UpperTarget::SegmentLemma3 { k_space: k.clone() }),
            Descriptor::OnePoint { .. } => Some(UpperTarget::OnePoint),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticUpper {
    pub value: f64,
    pub formula: &'static str,
}

fn upper(value: f64, formula: &'static str) -> Option<AnalyticUpper> {
    Some(AnalyticUpper { value, formula })
}

/// `M_k f ≤ f + ‖f‖₁/μ(X)` when every ball with two or more atoms has
/// `kB = X`; Minkowski and Hölder then give `‖M_k f‖_p ≤ 2‖f‖_p`.
const LARGE_K: f64 = 2.0;

/// Upper bound on the best weak or strong constant, or `None` where no
/// closed form is known for that regime.
pub fn analytic_upper(
    target: &UpperTarget,
    k: &Rational,
    p: &Exponent,
    kind: Kind,
    op: OpKind,
) -> Result<Option<AnalyticUpper>> {
    if *k < int(1) {
        return Err(Error::InvalidParams(format!(
            "k = {} below 1",
            format_rational(k)
        )));
    }
    match target {
        UpperTarget::OnePoint => Ok(upper(1.0, "one_point")),
        UpperTarget::BasicS(params) | UpperTarget::BasicT(params) => {
            let is_s = matches!(target, UpperTarget::BasicS(_));
            if is_s {
                params.check_s()?;
            } else {
                params.check_t()?;
            }
            let Exponent::Finite(p) = p else {
                return Ok(upper(1.0, "sup_norm"));
            };
            let p = to_f64(p);
            if *k >= params.d {
                return Ok(upper(LARGE_K, "large_k"));
            }
            let tau = to_f64(&crate::rational::from_biguint(&params.tau));
            let spread = tau * to_f64(&params.m).powf(1.0 - p);
            let value = match (is_s, op) {
                (true, _) => {
                    let a = 2f64.powf(p - 1.0);
                    (a * (a + 1.0 + spread)).powf(1.0 / p)
                }
                (false, OpKind::Centered) => {
                    (2f64.powf(2.0 * p - 1.0) * (3f64.powf(p) + 3.0)).powf(1.0 / p)
                }
                (false, OpKind::Noncentered) => (3.0
                    * 5f64.powf(p - 1.0)
                    * (2.0
                        + 3f64.powf(p)
                        + 6f64.powf(p)
                        + 3f64.powf(p) * 2f64.powf(2.0 * p - 1.0) * spread))
                    .powf(1.0 / p),
            };
            let formula = match (is_s, op) {
                (true, _) => "star_small_k",
                (false, OpKind::Centered) => "two_layer_centered",
                (false, OpKind::Noncentered) => "two_layer_small_k",
            };
            Ok(upper(value, formula))
        }
        UpperTarget::SegmentLemma2 { k_space } => {
            if *k_space < int(2) || k < k_space {
                return Err(Error::InvalidParams(
                    "segment bound needs k ≥ the construction's k ≥ 2".into(),
                ));
            }
            let one = *p == Exponent::integer(1);
            Ok((one && kind == Kind::Weak).then_some(AnalyticUpper {
                value: 2.0,
                formula: "segment_weak_covering",
            }))
        }
        UpperTarget::SegmentLemma3 { k_space } => {
            if *k_space < int(3) || k < k_space {
                return Err(Error::InvalidParams(
                    "segment bound needs k ≥ the construction's k ≥ 3".into(),
                ));
            }
            let one = *p == Exponent::integer(1);
            Ok((one && op == OpKind::Centered).then_some(AnalyticUpper {
                value: 4.0,
                formula: "segment_centered_strong",
            }))
        }
    }
}
