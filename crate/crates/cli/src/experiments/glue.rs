//! Gluing identity: on each component the glued maximal function equals
//! `max{component value, ‖f‖₁/μ(X)}`, compared in exact arithmetic.

use anyhow::{bail, Result};
use maxlab_core::constructions::{glue_layout, BasicParams, Descriptor};
use maxlab_core::maximal::{OpKind, TestFunction};
use maxlab_core::rational::{format_rational, int, rat, serde_q};
use maxlab_core::space::total_measure;
use maxlab_core::Rational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::experiments::{trial_function, Evaluator};
use crate::report::Report;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueIdentityParams {
    pub components: Vec<Descriptor>,
    #[serde(with = "serde_q::vec")]
    pub k0s: Vec<Rational>,
    /// Values of `k` checked besides `k = k0`; those above `k0` are skipped.
    #[serde(with = "serde_q::vec")]
    pub extra_ks: Vec<Rational>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for GlueIdentityParams {
    fn default() -> Self {
        Self {
            components: vec![
                Descriptor::BasicS(BasicParams::new(3, rat(3, 2), int(4))),
                Descriptor::BasicT(BasicParams::new(2, int(2), int(3))),
                Descriptor::SegmentLemma2 { k: int(2), n_max: 3 },
            ],
            k0s: vec![rat(3, 2), int(2), int(3)],
            extra_ks: vec![int(1)],
            trials: 100,
            seed: 0,
        }
    }
}

pub fn run_prop1_identity(params: &GlueIdentityParams) -> Result<Report> {
    let mut report = Report::new("prop1-identity", serde_json::to_value(params)?);
    if params.components.is_empty() || params.k0s.is_empty() {
        bail!("need at least one component and one k0");
    }
    let parts = params
        .components
        .iter()
        .map(Descriptor::build)
        .collect::<maxlab_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for k0 in &params.k0s {
        let glued = glue_layout(k0, &parts)?;
        let mass = total_measure(&glued.space);
        let mut ks = vec![k0.clone()];
        ks.extend(params.extra_ks.iter().filter(|k| *k <= k0 && *k != k0).cloned());
        for k in &ks {
            let whole = Evaluator::new(&glued.space, k)?;
            let locals = glued
                .components
                .iter()
                .map(|c| Evaluator::new(&c.space, k))
                .collect::<Result<Vec<_>>>()?;
            for op in [OpKind::Centered, OpKind::Noncentered] {
                let mismatches: Vec<u64> = (0..params.trials)
                    .into_par_iter()
                    .filter(|&t| {
                        let f = trial_function(params.seed, t, glued.space.len());
                        let avg = glued
                            .space
                            .weights()
                            .iter()
                            .zip(f.values())
                            .fold(Rational::zero(), |acc, (w, v)| acc + w * v)
                            / &mass;
                        let g = whole.maximal(&f, op);
                        !glued.components.iter().zip(&locals).all(|(c, local)| {
                            let part = TestFunction::new(f.values()[c.offset..c.offset + c.len].to_vec())
                                .expect("restriction is nonnegative");
                            local
                                .maximal(&part, op)
                                .into_iter()
                                .enumerate()
                                .all(|(i, v)| g[c.offset + i] == v.max(avg.clone()))
                        })
                    })
                    .collect();
                report.check(
                    format!("identity holds for k0 = {}, k = {}, {op}", format_rational(k0), format_rational(k)),
                    mismatches.is_empty(),
                    if mismatches.is_empty() {
                        format!("{} functions, exact", params.trials)
                    } else {
                        format!("fails on trials {mismatches:?}")
                    },
                );
                rows.push(json!({
                    "k0": format_rational(k0),
                    "k": format_rational(k),
                    "op": op,
                    "trials": params.trials,
                    "mismatches": mismatches.len(),
                }));
            }
        }
    }
    report.data = json!({
        "points": parts.iter().map(|p| p.len()).collect::<Vec<_>>(),
        "cells": rows,
    });
    Ok(report)
}
