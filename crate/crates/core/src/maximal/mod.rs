//! Exact evaluation of the modified maximal operators
//!
//! ```text
//! M_k^c f(x) = sup_r  ∫_{B(x,r)} f dμ / μ(B(x,kr))
//! M_k f(x)   = sup_{B ∋ x} ∫_B f dμ / μ(kB)
//! ```
//!
//! over open balls `B(x,r) = {y : ρ(x,y) < r}`.

pub mod enumerate;
pub mod oracle;
pub mod orbit;

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, serde_q, Rational};
use crate::space::MetricMeasureSpace;

pub use enumerate::{ball_table, critical_radii, m_centered, m_noncentered, BallIndex};
pub use oracle::{m_centered_oracle, m_noncentered_oracle};
pub use orbit::{Orbit, OrbitSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    #[serde(alias = "c")]
    Centered,
    #[serde(alias = "nc")]
    Noncentered,
}

impl OpKind {
    pub fn short(self) -> &'static str {
        match self {
            OpKind::Centered => "c",
            OpKind::Noncentered => "nc",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c" | "centered" => Ok(OpKind::Centered),
            "nc" | "noncentered" | "non-centered" => Ok(OpKind::Noncentered),
            other => Err(Error::InvalidParams(format!("unknown operator `{other}`"))),
        }
    }
}

/// Nonnegative rational values, one per atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct TestFunction {
    values: Vec<Rational>,
}

impl TestFunction {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidParams(format!(
                "test function is negative at index {i}"
            )));
        }
        Ok(Self { values })
    }

    pub fn delta(len: usize, at: usize) -> Self {
        let mut values = vec![Rational::zero(); len];
        values[at] = int(1);
        Self { values }
    }

    pub fn constant(len: usize, c: Rational) -> Self {
        Self::new(vec![c; len]).expect("nonnegative constant")
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension("adding functions of different length".into()));
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn check_len(&self, space: &MetricMeasureSpace) -> Result<()> {
        if self.len() != space.len() {
            return Err(Error::Dimension(format!(
                "function has {} values, space has {} points",
                self.len(),
                space.len()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("functions serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl TryFrom<Vec<String>> for TestFunction {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v.iter().map(|t| parse_rational(t)).collect::<Result<_>>()?)
    }
}

impl From<TestFunction> for Vec<String> {
    fn from(f: TestFunction) -> Self {
        f.values.iter().map(format_rational).collect()
    }
}

/// A ball kept with its center and radius, plus its concentric dilate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BallPair {
    pub center: usize,
    #[serde(with = "serde_q")]
    pub radius: Rational,
    pub members: Vec<usize>,
    pub k_members: Vec<usize>,
}

impl BallPair {
    pub fn new(space: &MetricMeasureSpace, k: &Rational, center: usize, radius: Rational) -> Self {
        let members = space.ball(center, &radius);
        let k_members = space.ball(center, &(k * &radius));
        Self {
            center,
            radius,
            members,
            k_members,
        }
    }

    /// `∫_B f dμ / μ(kB)`.
    pub fn ratio(&self, space: &MetricMeasureSpace, f: &TestFunction) -> Rational {
        let top = self
            .members
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &f.values()[i] * space.weight(i));
        top / space.measure_of(&self.k_members)
    }
}

/// Center and representative radius of an optimal ball.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub center: usize,
    #[serde(with = "serde_q")]
    pub radius: Rational,
}

impl Witness {
    pub fn ball(&self, space: &MetricMeasureSpace, k: &Rational) -> BallPair {
        BallPair::new(space, k, self.center, self.radius.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalValues {
    pub op_kind: OpKind,
    pub k: Rational,
    pub values: Vec<Rational>,
    pub witnesses: Vec<Witness>,
}

impl MaximalValues {
    pub fn to_json(&self, space: &MetricMeasureSpace) -> serde_json::Value {
        json!({
            "op": self.op_kind,
            "k": format_rational(&self.k),
            "values": self.values.iter().map(format_rational).collect::<Vec<_>>(),
            "witnesses": self.witnesses.iter().map(|w| json!({
                "center": space.label(w.center),
                "radius": format_rational(&w.radius),
            })).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn check_k(k: &Rational) -> Result<()> {
    if *k < int(1) {
        return Err(Error::InvalidParams(format!(
            "dilation k = {} must be at least 1",
            format_rational(k)
        )));
    }
    Ok(())
}

/// `M_k^c f` or `M_k f` depending on `op`.
pub fn maximal(
    space: &MetricMeasureSpace,
    k: &Rational,
    op: OpKind,
    f: &TestFunction,
) -> Result<MaximalValues> {
    match op {
        OpKind::Centered => m_centered(space, k, f),
        OpKind::Noncentered => m_noncentered(space, k, f),
    }
}
