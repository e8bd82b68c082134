//! One module per experiment family. Every experiment takes a serde
//! parameter struct with defaults and returns a [`Report`].

pub mod basic;
pub mod glue;
pub mod region;
pub mod segments;

use anyhow::{bail, Result};
use maxlab_core::constants::{lp_ratio, random_function, Kind};
use maxlab_core::maximal::{BallIndex, OpKind, TestFunction};
use maxlab_core::rational::Exponent;
use maxlab_core::{MetricMeasureSpace, Rational};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::report::Report;
use crate::sweep::SweepSpec;

pub use basic::{run_lemma4, run_lemma5, BasicGridParams};
pub use glue::{run_prop1_identity, GlueIdentityParams};
pub use region::{
    classify, run_example1, run_lemma6_region, run_lemma7_threshold, CellClass, Example1Params,
    RegionParams, RegionSpec, ThresholdParams,
};
pub use segments::{run_lemma2, run_lemma3, SegmentRunParams};

pub const EXPERIMENTS: &[&str] = &[
    "lemma2",
    "lemma3",
    "lemma4",
    "lemma5",
    "lemma6-region",
    "lemma7-threshold",
    "prop1-identity",
    "example1-family",
    "sweep",
];

/// A space with its ball index, for evaluating many functions at one `k`.
pub struct Evaluator<'a> {
    pub space: &'a MetricMeasureSpace,
    index: BallIndex,
}

impl<'a> Evaluator<'a> {
    pub fn new(space: &'a MetricMeasureSpace, k: &Rational) -> Result<Self> {
        Ok(Self {
            space,
            index: BallIndex::new(space, k)?,
        })
    }

    pub fn maximal(&self, f: &TestFunction, op: OpKind) -> Vec<Rational> {
        self.index.evaluate(f, op).values
    }

    pub fn ratio(&self, f: &TestFunction, p: &Exponent, kind: Kind, op: OpKind) -> f64 {
        let g = self.maximal(f, op);
        lp_ratio(f.values(), &g, self.space.weights(), p, kind)
            .expect("nonzero function of matching length")
            .0
    }
}

/// Trial function `trial` for a run seeded with `seed`: log-uniform
/// values, restricted on two thirds of the trials to a random sparse
/// subset or a random index window.
pub fn trial_function(seed: u64, trial: u64, n: usize) -> TestFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut values = random_function(&mut rng, n);
    match trial % 3 {
        1 => {
            for v in values.iter_mut() {
                if rng.random_bool(0.75) {
                    *v = Rational::zero();
                }
            }
        }
        2 => {
            let start = rng.random_range(0..n);
            let end = (start + rng.random_range(1..=4)).min(n);
            for (i, v) in values.iter_mut().enumerate() {
                if !(start..end).contains(&i) {
                    *v = Rational::zero();
                }
            }
        }
        _ => {}
    }
    if values.iter().all(Zero::is_zero) {
        values[rng.random_range(0..n)] = maxlab_core::rational::int(1);
    }
    TestFunction::new(values).expect("nonnegative values")
}

/// `params` laid over the defaults `base`; unknown keys are rejected by
/// the target type.
pub fn with_defaults<T: Serialize + DeserializeOwned>(base: T, params: Value) -> Result<T> {
    let mut merged = serde_json::to_value(base)?;
    match params {
        Value::Null => {}
        Value::Object(map) => {
            let target = merged.as_object_mut().expect("parameter structs serialize to objects");
            target.extend(map);
        }
        other => bail!("parameters must be a JSON object, got {other}"),
    }
    Ok(serde_json::from_value(merged)?)
}

/// Runs experiment `name` with JSON parameters over its defaults.
pub fn run(name: &str, params: Value) -> Result<Report> {
    match name {
        "lemma2" => run_lemma2(&with_defaults(SegmentRunParams::lemma2(), params)?),
        "lemma3" => run_lemma3(&with_defaults(SegmentRunParams::lemma3(), params)?),
        "lemma4" => run_lemma4(&with_defaults(BasicGridParams::lemma4(), params)?),
        "lemma5" => run_lemma5(&with_defaults(BasicGridParams::lemma5(), params)?),
        "lemma6-region" => run_lemma6_region(&with_defaults(RegionParams::default(), params)?),
        "lemma7-threshold" => run_lemma7_threshold(&with_defaults(ThresholdParams::default(), params)?),
        "prop1-identity" => run_prop1_identity(&with_defaults(GlueIdentityParams::default(), params)?),
        "example1-family" => run_example1(&with_defaults(Example1Params::default(), params)?),
        "sweep" => {
            let spec: SweepSpec = serde_json::from_value(params)?;
            Ok(crate::sweep::run_sweep(&spec)?.report())
        }
        other => bail!("unknown experiment `{other}`; expected one of {}", EXPERIMENTS.join(", ")),
    }
}
