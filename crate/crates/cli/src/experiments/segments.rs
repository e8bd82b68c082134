//! Segment spaces: unbounded strong-(1,1) ratios of point masses against
//! the weak and centered bounds that do hold.

use anyhow::Result;
use maxlab_core::constants::Kind;
use maxlab_core::constructions::{segment_preset_lemma2, segment_preset_lemma3};
use maxlab_core::maximal::{OpKind, TestFunction};
use maxlab_core::rational::{format_rational, int, serde_q, Exponent};
use maxlab_core::{MetricMeasureSpace, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::experiments::{trial_function, Evaluator};
use crate::report::Report;

const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRunParams {
    #[serde(with = "serde_q")]
    pub k: Rational,
    /// Branches used for the point-mass ratios.
    pub n_max: usize,
    /// Branches used for the random functions; defaults to `n_max`.
    #[serde(default)]
    pub random_n_max: Option<usize>,
    pub trials: u64,
    pub seed: u64,
}

impl SegmentRunParams {
    pub fn lemma2() -> Self {
        Self {
            k: int(2),
            n_max: 20,
            random_n_max: None,
            trials: 1000,
            seed: 0,
        }
    }

    pub fn lemma3() -> Self {
        Self { k: int(3), ..Self::lemma2() }
    }
}

struct Shape {
    name: &'static str,
    build: fn(&Rational, usize) -> maxlab_core::Result<MetricMeasureSpace>,
    delta_op: OpKind,
    /// Lower bound for the ratio of `δ_{x[n,0]}`.
    delta_bound: fn(u64) -> f64,
    random_op: OpKind,
    random_kind: Kind,
    random_cap: f64,
}

fn harmonic_tail(n: u64) -> f64 {
    (1..n).map(|j| 1.0 / (j as f64 + 1.0)).sum()
}

fn run(shape: &Shape, params: &SegmentRunParams) -> Result<Report> {
    let mut report = Report::new(shape.name, serde_json::to_value(params)?);
    let one = Exponent::integer(1);
    let space = (shape.build)(&params.k, params.n_max)?;
    let eval = Evaluator::new(&space, &params.k)?;
    let rows: Vec<(u64, f64, f64)> = (1..=params.n_max as u64)
        .into_par_iter()
        .map(|n| {
            let at = space.index_of(&format!("x[{n},0]")).expect("branch start exists");
            let f = TestFunction::delta(space.len(), at);
            let value = eval.ratio(&f, &one, Kind::Strong, shape.delta_op);
            (n, value, (shape.delta_bound)(n))
        })
        .collect();
    let worst = rows
        .iter()
        .filter(|(_, v, b)| *v < b - TOLERANCE || *v < 1.0 - TOLERANCE)
        .map(|(n, _, _)| *n)
        .collect::<Vec<_>>();
    report.check(
        format!("point-mass strong (1,1) ratios under the {} operator reach the lower bound", shape.delta_op),
        worst.is_empty(),
        if worst.is_empty() {
            format!("all n <= {}", params.n_max)
        } else {
            format!("below the bound at n = {worst:?}")
        },
    );

    let random_n = params.random_n_max.unwrap_or(params.n_max);
    let small = if random_n == params.n_max {
        space.clone()
    } else {
        (shape.build)(&params.k, random_n)?
    };
    let small_eval = Evaluator::new(&small, &params.k)?;
    let ratios: Vec<f64> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let f = trial_function(params.seed, t, small.len());
            small_eval.ratio(&f, &one, shape.random_kind, shape.random_op)
        })
        .collect();
    let (arg, max) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    report.check(
        format!(
            "random {} {} (1,1) ratios stay below {}",
            shape.random_op, shape.random_kind, shape.random_cap
        ),
        params.trials == 0 || max <= shape.random_cap + TOLERANCE,
        format!("max {max} at trial {arg} of {}", params.trials),
    );
    report.data = json!({
        "k": format_rational(&params.k),
        "points": space.len(),
        "delta_ratios": rows.iter().map(|(n, v, b)| json!({"n": n, "ratio": v, "bound": b})).collect::<Vec<_>>(),
        "random": {"n_max": random_n, "points": small.len(), "trials": params.trials, "max_ratio": max, "argmax_trial": arg},
    });
    Ok(report)
}

/// Centered point-mass ratios against `Σ_{j<n} 1/(j+1)`, and the
/// noncentered weak-(1,1) covering bound 2 for random functions.
pub fn run_lemma2(params: &SegmentRunParams) -> Result<Report> {
    run(
        &Shape {
            name: "lemma2",
            build: segment_preset_lemma2,
            delta_op: OpKind::Centered,
            delta_bound: harmonic_tail,
            random_op: OpKind::Noncentered,
            random_kind: Kind::Weak,
            random_cap: 2.0,
        },
        params,
    )
}

/// Noncentered point-mass ratios against `(n-1)/2`, and the centered
/// strong-(1,1) bound 4 for random functions.
pub fn run_lemma3(params: &SegmentRunParams) -> Result<Report> {
    run(
        &Shape {
            name: "lemma3",
            build: segment_preset_lemma3,
            delta_op: OpKind::Noncentered,
            delta_bound: |n| (n as f64 - 1.0) / 2.0,
            random_op: OpKind::Centered,
            random_kind: Kind::Strong,
            random_cap: 4.0,
        },
        params,
    )
}
