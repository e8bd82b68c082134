//! Finite atomic metric measure spaces with exact rational data.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, serde_q, Rational};

/// A point of a space: its position in the matrices and a label naming
/// its construction role, e.g. `x[2,1]`, `y0`, `yp[3]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointId {
    pub index: usize,
    pub label: String,
}

impl PointId {
    /// Splits a `tag[a,b,...]` label into its tag and indices.
    pub fn parts(&self) -> (&str, Vec<u64>) {
        split_label(&self.label)
    }
}

pub fn split_label(label: &str) -> (&str, Vec<u64>) {
    match label.split_once('[') {
        Some((tag, rest)) => {
            let inner = rest.trim_end_matches(']');
            let idx = inner
                .split(',')
                .filter_map(|s| s.trim().parse().ok())
                .collect();
            (tag, idx)
        }
        None => (label, Vec::new()),
    }
}

pub fn indexed_label(tag: &str, idx: &[u64]) -> String {
    if idx.is_empty() {
        return tag.to_string();
    }
    let inner: Vec<String> = idx.iter().map(u64::to_string).collect();
    format!("{tag}[{}]", inner.join(","))
}

/// Finite set of atoms with a dense rational distance matrix and positive
/// rational weights. Immutable once built.
#[derive(Clone, PartialEq)]
pub struct MetricMeasureSpace {
    points: Vec<PointId>,
    dist: Vec<Rational>,
    weight: Vec<Rational>,
    provenance: String,
    by_label: HashMap<String, usize>,
}

impl fmt::Debug for MetricMeasureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricMeasureSpace")
            .field("len", &self.len())
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl MetricMeasureSpace {
    /// Assembles a space from row-major distances. Only shapes are checked
    /// here; metric axioms are reported by [`validate_metric`].
    pub fn new(
        labels: Vec<String>,
        dist: Vec<Vec<Rational>>,
        weight: Vec<Rational>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let n = labels.len();
        if weight.len() != n || dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(format!(
                "{} labels, {} weights, {} distance rows",
                n,
                weight.len(),
                dist.len()
            )));
        }
        if n == 0 {
            return Err(Error::Dimension("a space needs at least one point".into()));
        }
        let mut by_label = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if by_label.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidParams(format!("duplicate label `{label}`")));
            }
        }
        let points = labels
            .into_iter()
            .enumerate()
            .map(|(index, label)| PointId { index, label })
            .collect();
        Ok(Self {
            points,
            dist: dist.into_iter().flatten().collect(),
            weight,
            provenance: provenance.into(),
            by_label,
        })
    }

    /// Builds the distance matrix from a symmetric function of indices.
    pub fn from_fn(
        labels: Vec<String>,
        weight: Vec<Rational>,
        provenance: impl Into<String>,
        mut distance: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self> {
        let n = labels.len();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distance(i, j);
                rows[j][i] = d.clone();
                rows[i][j] = d;
            }
        }
        Self::new(labels, rows, weight, provenance)
    }

    pub fn one_point(weight: Rational) -> Self {
        let provenance = crate::constructions::descriptor::Descriptor::OnePoint {
            weight: (!weight.is_one()).then(|| weight.clone()),
        }
        .to_json();
        Self::new(
            vec!["a".into()],
            vec![vec![Rational::zero()]],
            vec![weight],
            provenance,
        )
        .expect("one-point space is well formed")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i].label
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weight[i]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weight
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Open ball `{i : dist(center, i) < radius}` as sorted indices.
    pub fn ball(&self, center: usize, radius: &Rational) -> Vec<usize> {
        self.row(center)
            .iter()
            .enumerate()
            .filter(|(_, d)| *d < radius)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn measure_of(&self, set: &[usize]) -> Rational {
        set.iter()
            .fold(Rational::zero(), |acc, &i| acc + &self.weight[i])
    }

    pub fn to_json(&self) -> Result<String> {
        let n = self.len();
        let doc = SpaceJson {
            points: self.points.iter().map(|p| p.label.clone()).collect(),
            dist: (0..n).map(|i| self.row(i).to_vec()).collect(),
            weight: self.weight.clone(),
            provenance: self.provenance.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceJson = serde_json::from_str(text)?;
        Self::new(doc.points, doc.dist, doc.weight, doc.provenance)
    }
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    points: Vec<String>,
    #[serde(with = "serde_q::vec2")]
    dist: Vec<Vec<Rational>>,
    #[serde(with = "serde_q::vec")]
    weight: Vec<Rational>,
    provenance: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonzeroDiagonal,
    Asymmetric,
    NonpositiveDistance,
    Triangle,
    NonpositiveWeight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Reports every diagonal, symmetry, positivity and triangle violation.
/// Triangle witnesses `(i, j, l)` mean `dist(i, j) > dist(i, l) + dist(l, j)`.
pub fn validate_metric(space: &MetricMeasureSpace) -> ValidationReport {
    let n = space.len();
    let mut violations = Vec::new();
    let mut push = |kind, witness: Vec<usize>| violations.push(Violation { kind, witness });

    for i in 0..n {
        if !space.dist(i, i).is_zero() {
            push(ViolationKind::NonzeroDiagonal, vec![i]);
        }
        if !space.weight(i).is_positive() {
            push(ViolationKind::NonpositiveWeight, vec![i]);
        }
        for j in (i + 1)..n {
            if space.dist(i, j) != space.dist(j, i) {
                push(ViolationKind::Asymmetric, vec![i, j]);
            }
            if !space.dist(i, j).is_positive() || !space.dist(j, i).is_positive() {
                push(ViolationKind::NonpositiveDistance, vec![i, j]);
            }
        }
    }

    // Triangle checks on a common integer scale.
    let scale = lcm_of_denominators(space.dist.iter());
    let scaled: Vec<BigInt> = space
        .dist
        .iter()
        .map(|d| d.numer() * (&scale / d.denom()))
        .collect();
    let at = |i: usize, j: usize| &scaled[i * n + j];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for l in 0..n {
                if l == i || l == j {
                    continue;
                }
                if at(i, j) > &(at(i, l) + at(l, j)) {
                    push(ViolationKind::Triangle, vec![i, j, l]);
                }
            }
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

pub fn total_measure(space: &MetricMeasureSpace) -> Rational {
    space
        .weight
        .iter()
        .fold(Rational::zero(), |acc, w| acc + w)
}

pub fn diameter(space: &MetricMeasureSpace) -> Rational {
    space
        .dist
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero)
}

fn require_positive(c: &Rational) -> Result<()> {
    if c.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidParams("scale factor must be positive".into()))
    }
}

fn scaled_provenance(space: &MetricMeasureSpace, metric: &Rational, measure: &Rational) -> String {
    let base: serde_json::Value = serde_json::from_str(&space.provenance)
        .unwrap_or_else(|_| serde_json::Value::String(space.provenance.clone()));
    serde_json::json!({
        "kind": "scaled",
        "params": {
            "metric": crate::rational::format_rational(metric),
            "measure": crate::rational::format_rational(measure),
            "base": base,
        }
    })
    .to_string()
}

pub fn scale_metric(space: &MetricMeasureSpace, c: &Rational) -> Result<MetricMeasureSpace> {
    require_positive(c)?;
    let mut out = space.clone();
    for d in &mut out.dist {
        *d *= c;
    }
    out.provenance = scaled_provenance(space, c, &Rational::one());
    Ok(out)
}

pub fn scale_measure(space: &MetricMeasureSpace, c: &Rational) -> Result<MetricMeasureSpace> {
    require_positive(c)?;
    let mut out = space.clone();
    for w in &mut out.weight {
        *w *= c;
    }
    out.provenance = scaled_provenance(space, &Rational::one(), c);
    Ok(out)
}
