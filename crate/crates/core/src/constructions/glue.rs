//! Disjoint union of rescaled components at mutual distance `k0 + 1`.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::constructions::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};
use crate::space::{diameter, total_measure, MetricMeasureSpace};

#[derive(Clone, Debug)]
pub struct GluedComponent {
    /// 1-based index `n`; the component's measure is at most `2^-n`.
    pub index: usize,
    pub offset: usize,
    pub len: usize,
    pub metric_scale: Rational,
    pub measure_scale: Rational,
    /// The rescaled component as it sits inside the glued space.
    pub space: MetricMeasureSpace,
}

#[derive(Clone, Debug)]
pub struct Glued {
    pub space: MetricMeasureSpace,
    pub components: Vec<GluedComponent>,
}

impl Glued {
    /// Component holding point `i` of the glued space.
    pub fn component_of(&self, i: usize) -> &GluedComponent {
        self.components
            .iter()
            .find(|c| (c.offset..c.offset + c.len).contains(&i))
            .expect("index inside the glued space")
    }
}

/// Metric scale `1/diam` when `diam > 1`, measure scale `min(1, 2^-n/μ)`.
pub fn glue_scales(space: &MetricMeasureSpace, index: usize) -> (Rational, Rational) {
    let diam = diameter(space);
    let metric = if diam > Rational::one() {
        diam.recip()
    } else {
        int(1)
    };
    let cap = Rational::new(BigInt::one(), BigInt::one() << index);
    let mass = total_measure(space);
    let measure = if mass > cap { cap / mass } else { int(1) };
    (metric, measure)
}

pub fn glue_layout(k0: &Rational, components: &[MetricMeasureSpace]) -> Result<Glued> {
    if *k0 < int(1) {
        return Err(Error::InvalidParams(format!(
            "k0 = {} must be at least 1",
            format_rational(k0)
        )));
    }
    if components.is_empty() {
        return Err(Error::InvalidParams("glue needs at least one component".into()));
    }
    let mut labels = Vec::new();
    let mut weight = Vec::new();
    let mut parts = Vec::new();
    let mut scales = Vec::new();
    let mut offset = 0;
    for (pos, component) in components.iter().enumerate() {
        let index = pos + 1;
        let (metric_scale, measure_scale) = glue_scales(component, index);
        let rows: Vec<Vec<Rational>> = (0..component.len())
            .map(|i| component.row(i).iter().map(|d| d * &metric_scale).collect())
            .collect();
        let local_weight: Vec<Rational> = component
            .weights()
            .iter()
            .map(|w| w * &measure_scale)
            .collect();
        let local_labels: Vec<String> =
            component.points().iter().map(|p| p.label.clone()).collect();
        let scaled = MetricMeasureSpace::new(
            local_labels.clone(),
            rows,
            local_weight.clone(),
            component.provenance(),
        )?;
        labels.extend(local_labels.iter().map(|l| format!("g{index}.{l}")));
        weight.extend(local_weight);
        scales.push(json!({
            "metric": format_rational(&metric_scale),
            "measure": format_rational(&measure_scale),
        }));
        parts.push(GluedComponent {
            index,
            offset,
            len: component.len(),
            metric_scale,
            measure_scale,
            space: scaled,
        });
        offset += component.len();
    }
    let owner: Vec<usize> = parts
        .iter()
        .enumerate()
        .flat_map(|(c, p)| std::iter::repeat(c).take(p.len))
        .collect();
    let cross = k0 + int(1);
    let descriptor = Descriptor::Glue {
        k0: k0.clone(),
        components: components
            .iter()
            .map(|c| Descriptor::from_provenance(c.provenance()))
            .collect(),
    };
    let mut provenance: Value = serde_json::to_value(&descriptor)?;
    provenance["scales"] = Value::Array(scales);
    let space = MetricMeasureSpace::from_fn(labels, weight, provenance.to_string(), |i, j| {
        let (ci, cj) = (owner[i], owner[j]);
        if ci == cj {
            let p = &parts[ci];
            p.space.dist(i - p.offset, j - p.offset).clone()
        } else {
            cross.clone()
        }
    })?;
    Ok(Glued {
        space,
        components: parts,
    })
}

pub fn glue(k0: &Rational, components: &[MetricMeasureSpace]) -> Result<MetricMeasureSpace> {
    glue_layout(k0, components).map(|g| g.space)
}
