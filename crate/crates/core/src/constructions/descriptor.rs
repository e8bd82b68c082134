//! JSON construction descriptors `{"kind": ..., "params": {...}}`.
//!
//! Every constructor stores its descriptor as the space's provenance, so
//! a space can be rebuilt from its own provenance string.

use serde::{Deserialize, Serialize};

use crate::constructions::basic::{basic_s, basic_t, BasicParams};
use crate::constructions::family::{
    family_lemma6, family_lemma6p, family_lemma7, family_lemma7p, FamilyParams, Lemma7Params,
};
use crate::constructions::generations::{
    first_generation, lemma1_modify, second_generation, FirstGenParams, SecondGenParams,
};
use crate::constructions::glue::glue;
use crate::constructions::random::{random_space, RandomParams};
use crate::constructions::segment::{
    segment_preset_lemma2, segment_preset_lemma3, segment_type, SegmentParams,
};
use crate::error::{Error, Result};
use crate::rational::{int, serde_q, Rational};
use crate::space::{scale_measure, scale_metric, MetricMeasureSpace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Descriptor {
    OnePoint {
        #[serde(default, with = "serde_q::option", skip_serializing_if = "Option::is_none")]
        weight: Option<Rational>,
    },
    BasicS(BasicParams),
    BasicT(BasicParams),
    FirstGeneration(FirstGenParams),
    SecondGeneration(SecondGenParams),
    Lemma1Modify {
        base: Box<Descriptor>,
    },
    Segment(SegmentParams),
    SegmentLemma2 {
        #[serde(with = "serde_q")]
        k: Rational,
        n_max: usize,
    },
    SegmentLemma3 {
        #[serde(with = "serde_q")]
        k: Rational,
        n_max: usize,
    },
    Glue {
        #[serde(with = "serde_q")]
        k0: Rational,
        components: Vec<Descriptor>,
    },
    Scaled {
        #[serde(with = "serde_q")]
        metric: Rational,
        #[serde(with = "serde_q")]
        measure: Rational,
        base: Box<Descriptor>,
    },
    /// Glue of the S family with `k0 = k + δ`.
    Lemma6(FamilyParams),
    /// Glue of the T family with `k0 = k + δ`.
    Lemma6p(FamilyParams),
    Lemma7(Lemma7Params),
    Lemma7p(Lemma7Params),
    Random(RandomParams),
    /// Provenance text that is not a descriptor; cannot be rebuilt.
    Opaque {
        provenance: String,
    },
}

impl Descriptor {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptors serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        strip_scales(&mut value);
        Ok(serde_json::from_value(value)?)
    }

    /// Parses a provenance string, falling back to [`Descriptor::Opaque`].
    pub fn from_provenance(provenance: &str) -> Self {
        Self::from_json(provenance).unwrap_or_else(|_| Descriptor::Opaque {
            provenance: provenance.to_string(),
        })
    }

    pub fn build(&self) -> Result<MetricMeasureSpace> {
        match self {
            Descriptor::OnePoint { weight } => Ok(MetricMeasureSpace::one_point(
                weight.clone().unwrap_or_else(|| int(1)),
            )),
            Descriptor::BasicS(p) => basic_s(p),
            Descriptor::BasicT(p) => basic_t(p),
            Descriptor::FirstGeneration(p) => first_generation(p),
            Descriptor::SecondGeneration(p) => second_generation(p),
            Descriptor::Lemma1Modify { base } => lemma1_modify(&base.build()?),
            Descriptor::Segment(p) => segment_type(p),
            Descriptor::SegmentLemma2 { k, n_max } => segment_preset_lemma2(k, *n_max),
            Descriptor::SegmentLemma3 { k, n_max } => segment_preset_lemma3(k, *n_max),
            Descriptor::Glue { k0, components } => {
                let parts = components
                    .iter()
                    .map(Descriptor::build)
                    .collect::<Result<Vec<_>>>()?;
                glue(k0, &parts)
            }
            Descriptor::Scaled {
                metric,
                measure,
                base,
            } => {
                let inner = base.build()?;
                let scaled = scale_measure(&scale_metric(&inner, metric)?, measure)?;
                Ok(scaled.with_provenance(self.to_json()))
            }
            Descriptor::Lemma6(p) => Ok(family_lemma6(p)?.glue()?.space),
            Descriptor::Lemma6p(p) => Ok(family_lemma6p(p)?.glue()?.space),
            Descriptor::Lemma7(p) => Ok(family_lemma7(p)?.glue()?.space),
            Descriptor::Lemma7p(p) => Ok(family_lemma7p(p)?.glue()?.space),
            Descriptor::Random(p) => random_space(p),
            Descriptor::Opaque { provenance } => Err(Error::InvalidParams(format!(
                "cannot rebuild a space from provenance `{provenance}`"
            ))),
        }
    }
}

fn strip_scales(value: &mut serde_json::Value) {
    if let serde_json::Value::Object(map) = value {
        map.remove("scales");
        for v in map.values_mut() {
            strip_scales(v);
        }
    } else if let serde_json::Value::Array(items) = value {
        items.iter_mut().for_each(strip_scales);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::generations::WeightRule;
    use crate::rational::rat;

    fn round_trip(d: Descriptor) {
        let space = d.build().unwrap();
        let again = Descriptor::from_json(space.provenance()).unwrap();
        assert_eq!(again.build().unwrap(), space, "{}", d.to_json());
    }

    #[test]
    fn descriptors_round_trip_through_provenance() {
        let s = Descriptor::BasicS(BasicParams::new(3, rat(3, 2), int(2)));
        round_trip(s.clone());
        round_trip(Descriptor::BasicT(BasicParams::new(2, int(2), int(3))));
        round_trip(Descriptor::OnePoint { weight: Some(rat(7, 3)) });
        round_trip(Descriptor::SegmentLemma2 { k: int(2), n_max: 3 });
        round_trip(Descriptor::SegmentLemma3 { k: int(3), n_max: 3 });
        let second = Descriptor::SecondGeneration(SecondGenParams {
            tau_star: vec![1, 2],
            f_star: WeightRule::Constant(int(1)),
            n_max: 2,
        });
        round_trip(Descriptor::Lemma1Modify {
            base: Box::new(second.clone()),
        });
        round_trip(Descriptor::FirstGeneration(FirstGenParams {
            tau: vec![2, 1],
            f: WeightRule::Table(vec![vec![int(1), rat(1, 2)], vec![int(3)]]),
            n_max: 2,
        }));
        round_trip(Descriptor::Glue {
            k0: int(2),
            components: vec![s.clone(), second],
        });
        round_trip(Descriptor::Scaled {
            metric: rat(2, 3),
            measure: rat(1, 5),
            base: Box::new(s),
        });
        round_trip(Descriptor::Lemma7(Lemma7Params {
            k: rat(3, 2),
            mode: crate::constructions::family::Lemma7Mode::Weak,
            n_max: 3,
        }));
    }

    #[test]
    fn wire_format() {
        let json = r#"{"kind":"basic_s","params":{"tau":2,"d":"3/2","m":"2"}}"#;
        let d = Descriptor::from_json(json).unwrap();
        assert_eq!(d, Descriptor::BasicS(BasicParams::new(2, rat(3, 2), int(2))));
        assert_eq!(
            d.to_json(),
            r#"{"kind":"basic_s","params":{"tau":"2","d":"3/2","m":"2/1"}}"#
        );
        assert!(Descriptor::from_json(r#"{"kind":"nope","params":{}}"#).is_err());
        assert!(matches!(
            Descriptor::from_provenance("hand made"),
            Descriptor::Opaque { .. }
        ));
    }

    #[test]
    fn scaling_helpers_emit_rebuildable_provenance() {
        let s = basic_s(&BasicParams::new(2, rat(3, 2), int(2))).unwrap();
        let scaled = scale_metric(&s, &rat(2, 3)).unwrap();
        let rebuilt = Descriptor::from_json(scaled.provenance()).unwrap().build().unwrap();
        assert_eq!(rebuilt.row(1), scaled.row(1));
    }
}
