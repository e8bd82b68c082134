//! Star and two-layer spaces: point-mass lower bounds bracketed against
//! `max{1, τ^{1/p} m^{1/p-1}}` and the closed-form upper bounds.

use anyhow::Result;
use maxlab_core::constants::{ascent_search, delta_scan, AscentOptions, ConstantEstimate, Kind};
use maxlab_core::constructions::{basic_s, basic_t, BasicParams};
use maxlab_core::maximal::OpKind;
use maxlab_core::rational::{format_rational, int, rat, serde_q, to_f64, Exponent};
use maxlab_core::{MetricMeasureSpace, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::Report;

const TOLERANCE: f64 = 1e-9;
const TWO_LAYER_CENTERED_CAP: f64 = 24.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasicGridParams {
    pub taus: Vec<u64>,
    #[serde(with = "serde_q::vec")]
    pub ms: Vec<Rational>,
    pub ps: Vec<Exponent>,
    #[serde(with = "serde_q")]
    pub k: Rational,
    #[serde(with = "serde_q")]
    pub d: Rational,
    /// Restarts of the strong-type ascent run on every cell.
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl BasicGridParams {
    pub fn lemma4() -> Self {
        Self {
            taus: vec![1, 2, 4, 8, 16],
            ms: vec![int(2), int(4), int(16)],
            ps: vec![Exponent::integer(1), Exponent::Finite(rat(3, 2)), Exponent::integer(2)],
            k: int(1),
            d: rat(3, 2),
            restarts: 20,
            iters: 40,
            seed: 0,
        }
    }

    pub fn lemma5() -> Self {
        Self {
            d: int(2),
            restarts: 200,
            ..Self::lemma4()
        }
    }
}

/// `max{1, τ^{1/p} m^{1/p-1}}`.
pub fn target(tau: u64, m: &Rational, p: &Exponent) -> f64 {
    let p = p.as_f64();
    ((tau as f64).powf(1.0 / p) * to_f64(m).powf(1.0 / p - 1.0)).max(1.0)
}

struct Cell {
    tau: u64,
    m: Rational,
    p: Exponent,
}

struct Outcome {
    target: f64,
    /// Weak point-mass bounds that are bracketed, by operator.
    bracketed: Vec<ConstantEstimate>,
    ascents: Vec<ConstantEstimate>,
}

fn cells(params: &BasicGridParams) -> Vec<Cell> {
    let mut out = Vec::new();
    for &tau in &params.taus {
        for m in &params.ms {
            for p in &params.ps {
                out.push(Cell { tau, m: m.clone(), p: p.clone() });
            }
        }
    }
    out
}

fn run_cell(
    params: &BasicGridParams,
    cell: &Cell,
    build: fn(&BasicParams) -> maxlab_core::Result<MetricMeasureSpace>,
    bracket_ops: &[OpKind],
) -> Result<Outcome> {
    let space = build(&BasicParams::new(cell.tau, params.d.clone(), cell.m.clone()))?;
    let bracketed = bracket_ops
        .iter()
        .map(|&op| delta_scan(&space, &params.k, &cell.p, Kind::Weak, op))
        .collect::<maxlab_core::Result<Vec<_>>>()?;
    let opts = AscentOptions::new(params.restarts, params.iters, params.seed);
    let ascents = [OpKind::Centered, OpKind::Noncentered]
        .into_iter()
        .map(|op| ascent_search(&space, &params.k, &cell.p, Kind::Strong, op, &opts))
        .collect::<maxlab_core::Result<Vec<_>>>()?;
    Ok(Outcome {
        target: target(cell.tau, &cell.m, &cell.p),
        bracketed,
        ascents,
    })
}

fn cell_json(cell: &Cell, outcome: &Outcome) -> Value {
    let estimate = |e: &ConstantEstimate| {
        json!({
            "op": e.op_kind,
            "kind": e.kind,
            "lower_bound": e.lower_bound,
            "analytic_upper": e.analytic_upper.as_ref().map(|u| u.value),
            "formula": e.analytic_upper.as_ref().map(|u| u.formula),
        })
    };
    json!({
        "tau": cell.tau,
        "m": format_rational(&cell.m),
        "p": cell.p.to_string(),
        "target": outcome.target,
        "delta_scan": outcome.bracketed.iter().map(estimate).collect::<Vec<_>>(),
        "ascent": outcome.ascents.iter().map(estimate).collect::<Vec<_>>(),
    })
}

fn run(
    name: &str,
    params: &BasicGridParams,
    build: fn(&BasicParams) -> maxlab_core::Result<MetricMeasureSpace>,
    bracket_ops: &[OpKind],
    factor: f64,
) -> Result<Report> {
    let mut report = Report::new(name, serde_json::to_value(params)?);
    if params.k >= params.d {
        anyhow::bail!("the bracket needs k < d");
    }
    let cells = cells(params);
    let outcomes = cells
        .par_iter()
        .map(|c| run_cell(params, c, build, bracket_ops))
        .collect::<Result<Vec<_>>>()?;

    let mut below = Vec::new();
    let mut above_target = Vec::new();
    let mut above_upper = Vec::new();
    let mut centered_max = f64::NEG_INFINITY;
    for (cell, out) in cells.iter().zip(&outcomes) {
        let at = format!("tau={} m={} p={}", cell.tau, format_rational(&cell.m), cell.p);
        for e in &out.bracketed {
            if e.lower_bound < out.target / factor - TOLERANCE {
                below.push(format!("{at} {}: {}", e.op_kind, e.lower_bound));
            }
            if e.lower_bound > out.target + TOLERANCE {
                above_target.push(format!("{at} {}: {}", e.op_kind, e.lower_bound));
            }
        }
        for e in out.bracketed.iter().chain(&out.ascents) {
            if let Some(u) = &e.analytic_upper {
                if e.lower_bound > u.value + TOLERANCE {
                    above_upper.push(format!("{at} {} {}: {} > {}", e.op_kind, e.kind, e.lower_bound, u.value));
                }
            }
        }
        for e in out.ascents.iter().filter(|e| e.op_kind == OpKind::Centered) {
            centered_max = centered_max.max(e.lower_bound);
        }
    }
    let describe = |v: &[String]| if v.is_empty() { format!("{} cells", cells.len()) } else { v.join("; ") };
    report.check(
        format!("point-mass lower bounds reach target/{factor}"),
        below.is_empty(),
        describe(&below),
    );
    report.check("point-mass lower bounds stay below the target", above_target.is_empty(), describe(&above_target));
    report.check(
        "all lower bounds stay below the closed-form upper bounds",
        above_upper.is_empty(),
        describe(&above_upper),
    );
    if name == "lemma5" {
        report.check(
            format!("centered strong ascent stays below {TWO_LAYER_CENTERED_CAP}"),
            centered_max <= TWO_LAYER_CENTERED_CAP + TOLERANCE,
            format!("max {centered_max} over {} restarts per cell", params.restarts),
        );
    }
    report.data = json!({
        "cells": cells.iter().zip(&outcomes).map(|(c, o)| cell_json(c, o)).collect::<Vec<_>>(),
    });
    Ok(report)
}

/// Star spaces: both operators bracketed within `[target/3, target]`.
pub fn run_lemma4(params: &BasicGridParams) -> Result<Report> {
    run("lemma4", params, basic_s, &[OpKind::Centered, OpKind::Noncentered], 3.0)
}

/// Two-layer spaces: the noncentered operator bracketed within
/// `[target/4, target]`, the centered one capped at 24.
pub fn run_lemma5(params: &BasicGridParams) -> Result<Report> {
    run("lemma5", params, basic_t, &[OpKind::Noncentered], 4.0)
}
