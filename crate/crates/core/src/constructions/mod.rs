//! Builders for the space families: basic star and two-layer spaces,
//! branch spaces, segment spaces, gluing, and indexed parameter families.

pub mod basic;
pub mod descriptor;
pub mod family;
pub mod generations;
pub mod glue;
pub mod random;
pub mod segment;

pub use basic::{basic_s, basic_t, BasicParams};
pub use descriptor::Descriptor;
pub use family::{
    family_lemma6, family_lemma6p, family_lemma7, family_lemma7p, Family, FamilyMember,
    FamilyParams, Lemma7Mode, Lemma7Params, Variant,
};
pub use generations::{
    first_generation, lemma1_modify, second_generation, FirstGenParams, SecondGenParams,
    WeightRule,
};
pub use glue::{glue, glue_layout, Glued, GluedComponent};
pub use random::{random_space, random_spaces, RandomParams};
pub use segment::{segment_preset_lemma2, segment_preset_lemma3, segment_type, SegmentParams};

/// Big integers as decimal strings; plain JSON numbers are accepted on input.
pub(crate) mod serde_biguint {
    use std::str::FromStr;

    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Number(u64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        match Wire::deserialize(d)? {
            Wire::Number(n) => Ok(BigUint::from(n)),
            Wire::Text(t) => BigUint::from_str(t.trim()).map_err(serde::de::Error::custom),
        }
    }
}
