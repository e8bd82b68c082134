//! Lower-bound sweeps over `(space, k, p, kind, op)` grids with CSV output.
//!
//! CSV columns, in order: `space_id, k, p, op, kind, lower_bound,
//! analytic_upper, upper_formula, witness_id, status, runtime_ms`.
//! Rationals are written `p/q`, `p` may be `inf`, doubles carry 17
//! significant digits and an absent upper bound is an empty field.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use anyhow::{bail, Result};
use maxlab_core::constants::{ascent_search, delta_scan, AscentOptions, ConstantEstimate, Kind};
use maxlab_core::constructions::Descriptor;
use maxlab_core::maximal::OpKind;
use maxlab_core::rational::{format_rational, serde_q, Exponent};
use maxlab_core::{MetricMeasureSpace, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::Report;

const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpace {
    pub id: String,
    pub descriptor: Descriptor,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub spaces: Vec<SweepSpace>,
    #[serde(with = "serde_q::vec")]
    pub k_grid: Vec<Rational>,
    pub p_grid: Vec<Exponent>,
    pub kinds: Vec<Kind>,
    pub ops: Vec<OpKind>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iters")]
    pub iters: usize,
    /// Ratio evaluations allowed per restart.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_restarts() -> usize {
    8
}

fn default_iters() -> usize {
    50
}

mod serde_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::format_f64(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        String::deserialize(d)?.trim().parse().map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => super::serialize(x, s),
                None => s.serialize_str(""),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            let text = String::deserialize(d)?;
            match text.trim() {
                "" => Ok(None),
                t => t.parse().map(Some).map_err(serde::de::Error::custom),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub space_id: String,
    #[serde(with = "serde_q")]
    pub k: Rational,
    pub p: Exponent,
    pub op: OpKind,
    pub kind: Kind,
    #[serde(with = "serde_f64")]
    pub lower_bound: f64,
    #[serde(with = "serde_f64::option")]
    pub analytic_upper: Option<f64>,
    pub upper_formula: String,
    pub witness_id: String,
    /// `ok`, `budget_exhausted` or `error: <message>`.
    pub status: String,
    pub runtime_ms: u64,
}

impl SweepRow {
    fn sort_key(&self) -> (&str, &Rational, f64, Kind, OpKind) {
        (&self.space_id, &self.k, self.p.as_f64(), self.kind, self.op)
    }

    /// Everything except the wall-clock time.
    pub fn same_result(&self, other: &Self) -> bool {
        Self { runtime_ms: 0, ..self.clone() } == Self { runtime_ms: 0, ..other.clone() }
    }

    pub fn consistent(&self) -> bool {
        self.analytic_upper.is_none_or(|u| self.lower_bound <= u + TOLERANCE)
    }
}

pub struct SweepOutput {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    /// Witness functions keyed by `witness_id`.
    pub witnesses: BTreeMap<String, Value>,
}

struct Cell<'a> {
    space_id: &'a str,
    space: Result<&'a MetricMeasureSpace, String>,
    k: &'a Rational,
    p: &'a Exponent,
    kind: Kind,
    op: OpKind,
}

fn search(spec: &SweepSpec, cell: &Cell<'_>) -> Result<ConstantEstimate, String> {
    let space = cell.space.clone()?;
    let found = if spec.restarts == 0 {
        delta_scan(space, cell.k, cell.p, cell.kind, cell.op)
    } else {
        let opts = AscentOptions {
            budget: spec.budget,
            ..AscentOptions::new(spec.restarts, spec.iters, spec.seed)
        };
        ascent_search(space, cell.k, cell.p, cell.kind, cell.op, &opts)
    };
    found.map_err(|e| e.to_string())
}

fn run_cell(spec: &SweepSpec, cell: &Cell<'_>) -> (SweepRow, Option<Value>) {
    let start = Instant::now();
    let found = search(spec, cell);
    let witness_id = format!(
        "{}/k={}/p={}/{}/{}",
        cell.space_id,
        format_rational(cell.k),
        cell.p,
        cell.kind,
        cell.op
    );
    let mut row = SweepRow {
        space_id: cell.space_id.to_string(),
        k: cell.k.clone(),
        p: cell.p.clone(),
        op: cell.op,
        kind: cell.kind,
        lower_bound: f64::NAN,
        analytic_upper: None,
        upper_formula: String::new(),
        witness_id: String::new(),
        status: String::new(),
        runtime_ms: 0,
    };
    let witness = match found {
        Ok(e) => {
            row.lower_bound = e.lower_bound;
            row.analytic_upper = e.analytic_upper.as_ref().map(|u| u.value);
            row.upper_formula = e.analytic_upper.as_ref().map(|u| u.formula.to_string()).unwrap_or_default();
            row.status = if e.search.budget_exhausted { "budget_exhausted" } else { "ok" }.to_string();
            row.witness_id = witness_id;
            Some(e.to_json())
        }
        Err(message) => {
            row.status = format!("error: {message}");
            None
        }
    };
    row.runtime_ms = start.elapsed().as_millis() as u64;
    (row, witness)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    if spec.spaces.is_empty() || spec.k_grid.is_empty() || spec.p_grid.is_empty() || spec.kinds.is_empty() || spec.ops.is_empty()
    {
        bail!("every sweep grid must be nonempty");
    }
    let mut ids: Vec<&str> = spec.spaces.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        bail!("space ids must be unique");
    }
    let built: Vec<Result<MetricMeasureSpace, String>> =
        spec.spaces.iter().map(|s| s.descriptor.build().map_err(|e| e.to_string())).collect();
    let mut cells = Vec::new();
    for (s, space) in spec.spaces.iter().zip(&built) {
        for k in &spec.k_grid {
            for p in &spec.p_grid {
                for &kind in &spec.kinds {
                    for &op in &spec.ops {
                        cells.push(Cell {
                            space_id: &s.id,
                            space: space.as_ref().map_err(Clone::clone),
                            k,
                            p,
                            kind,
                            op,
                        });
                    }
                }
            }
        }
    }
    let results: Vec<(SweepRow, Option<Value>)> = cells.par_iter().map(|c| run_cell(spec, c)).collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut witnesses = BTreeMap::new();
    for (row, witness) in results {
        if let Some(w) = witness {
            witnesses.insert(row.witness_id.clone(), w);
        }
        rows.push(row);
    }
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(kb.0)
            .then_with(|| ka.1.cmp(kb.1))
            .then_with(|| ka.2.total_cmp(&kb.2))
            .then_with(|| ka.3.cmp(&kb.3))
            .then_with(|| ka.4.cmp(&kb.4))
    });
    Ok(SweepOutput {
        spec: spec.clone(),
        rows,
        witnesses,
    })
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

impl SweepOutput {
    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_csv(&self.rows, &mut buf)?;
        Ok(String::from_utf8(buf)?)
    }

    pub fn witnesses_json(&self) -> String {
        serde_json::to_string_pretty(&self.witnesses).expect("witnesses serialize")
    }

    pub fn report(&self) -> Report {
        let mut report = Report::new("sweep", serde_json::to_value(&self.spec).unwrap_or(Value::Null));
        let bad: Vec<&str> = self.rows.iter().filter(|r| !r.consistent()).map(|r| r.witness_id.as_str()).collect();
        report.check(
            "lower bounds stay below the closed-form upper bounds",
            bad.is_empty(),
            if bad.is_empty() { format!("{} rows", self.rows.len()) } else { bad.join(", ") },
        );
        let errors = self.rows.iter().filter(|r| r.status.starts_with("error")).count();
        report.data = json!({
            "rows": self.rows,
            "error_cells": errors,
            "witnesses": self.witnesses,
        });
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxlab_core::constructions::BasicParams;
    use maxlab_core::rational::{int, rat};

    fn spec() -> SweepSpec {
        SweepSpec {
            spaces: vec![
                SweepSpace {
                    id: "star".into(),
                    descriptor: Descriptor::BasicS(BasicParams::new(3, rat(3, 2), int(4))),
                },
                SweepSpace {
                    id: "point".into(),
                    descriptor: Descriptor::OnePoint { weight: None },
                },
            ],
            k_grid: vec![int(1), rat(7, 4)],
            p_grid: vec![Exponent::integer(2), Exponent::integer(1), Exponent::Infinite],
            kinds: vec![Kind::Weak, Kind::Strong],
            ops: vec![OpKind::Centered, OpKind::Noncentered],
            restarts: 3,
            iters: 20,
            budget: None,
            seed: 4,
        }
    }

    #[test]
    fn one_row_per_cell_sorted() {
        let out = run_sweep(&spec()).unwrap();
        assert_eq!(out.rows.len(), 2 * 2 * 3 * 2 * 2);
        assert!(out.rows.windows(2).all(|w| w[0].sort_key() <= w[1].sort_key()));
        assert!(out.rows.iter().all(SweepRow::consistent));
        for r in out.rows.iter().filter(|r| r.space_id == "point") {
            assert_eq!(r.lower_bound, 1.0);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let out = run_sweep(&spec()).unwrap();
        let text = out.to_csv().unwrap();
        assert!(text.starts_with(
            "space_id,k,p,op,kind,lower_bound,analytic_upper,upper_formula,witness_id,status,runtime_ms"
        ));
        assert_eq!(read_csv(text.as_bytes()).unwrap(), out.rows);
    }

    #[test]
    fn bad_space_becomes_an_error_row() {
        let mut s = spec();
        s.spaces.push(SweepSpace {
            id: "broken".into(),
            descriptor: Descriptor::BasicS(BasicParams::new(3, int(5), int(4))),
        });
        let out = run_sweep(&s).unwrap();
        let broken: Vec<_> = out.rows.iter().filter(|r| r.space_id == "broken").collect();
        assert_eq!(broken.len(), 24);
        assert!(broken.iter().all(|r| r.status.starts_with("error")));
        assert_eq!(out.rows.len(), 72);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = SweepSpec { budget: Some(2), ..spec() };
        let out = run_sweep(&s).unwrap();
        assert!(out.rows.iter().any(|r| r.status == "budget_exhausted"));
    }

    #[test]
    fn reruns_agree() {
        let a = run_sweep(&spec()).unwrap();
        let b = run_sweep(&spec()).unwrap();
        assert!(a.rows.iter().zip(&b.rows).all(|(x, y)| x.same_result(y)));
    }
}
