//! `(k', p')` region sweeps over glued families, classified from the
//! per-component lower bounds at each truncation depth.
//!
//! A function supported on one component of a glue with `k' ≤ k0` has
//! glued maximal values at least its component values, so each member's
//! own point-mass bound is a lower bound for the glued space. Members are
//! evaluated through orbit spaces since their `τ` grows polynomially in
//! `n` with large exponents.

use anyhow::{bail, Result};
use maxlab_core::constants::{delta_scan, orbit_delta_scan, Kind};
use maxlab_core::constructions::{
    family_lemma6, family_lemma6p, family_lemma7, family_lemma7p, Family, FamilyParams, Lemma7Mode,
    Lemma7Params, Variant,
};
use maxlab_core::maximal::OpKind;
use maxlab_core::rational::{format_rational, int, rat, serde_q, to_f64, Exponent};
use maxlab_core::{MetricMeasureSpace, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::Report;

/// Relative slack for "non-decreasing" on float ratios.
const MONOTONE_SLACK: f64 = 1e-9;
/// Fitted growth exponents below this count as flat.
const MIN_GROWTH_EXPONENT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellClass {
    /// Non-decreasing in `n` and above `T_div`.
    Diverging,
    /// Non-decreasing with a clearly positive growth exponent, still below `T_div`.
    Growing,
    /// Every value at most `C_bnd`.
    Bounded,
    Undecided,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(with = "serde_q::vec")]
    pub k_grid: Vec<Rational>,
    pub p_grid: Vec<Exponent>,
    pub n_max: u64,
    pub t_div: f64,
    pub c_bnd: f64,
    pub kind: Kind,
    pub op: OpKind,
}

impl RegionSpec {
    fn check(&self) -> Result<()> {
        if self.k_grid.is_empty() || self.p_grid.is_empty() {
            bail!("k_grid and p_grid must be nonempty");
        }
        if !self.k_grid.windows(2).all(|w| w[0] < w[1]) {
            bail!("k_grid must be strictly increasing");
        }
        if !self.p_grid.windows(2).all(|w| w[0].as_f64() < w[1].as_f64()) {
            bail!("p_grid must be strictly increasing");
        }
        if self.k_grid.iter().any(|k| *k < int(1)) {
            bail!("k_grid values must be at least 1");
        }
        if !(self.t_div > 0.0 && self.c_bnd > 0.0) {
            bail!("thresholds must be positive");
        }
        Ok(())
    }
}

/// Least-squares slope of `ln v` against `ln n` over the upper half of
/// the sequence.
pub fn growth_exponent(ns: &[u64], values: &[f64]) -> f64 {
    let start = ns.len() / 2;
    let pts: Vec<(f64, f64)> = ns[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(_, v)| **v > 0.0)
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn is_monotone(values: &[f64]) -> bool {
    values
        .windows(2)
        .all(|w| w[1] >= w[0] - MONOTONE_SLACK * w[0].abs().max(1.0))
}

pub fn classify(ns: &[u64], values: &[f64], t_div: f64, c_bnd: f64) -> CellClass {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let monotone = is_monotone(values);
    if monotone && max > t_div {
        CellClass::Diverging
    } else if monotone && values.len() > 2 && growth_exponent(ns, values) >= MIN_GROWTH_EXPONENT {
        CellClass::Growing
    } else if values.iter().all(|v| *v <= c_bnd) {
        CellClass::Bounded
    } else {
        CellClass::Undecided
    }
}

/// Per-member lower bounds at one `(k', p')` cell.
struct Series {
    k: Rational,
    p: Exponent,
    ns: Vec<u64>,
    values: Vec<f64>,
    class: CellClass,
}

impl Series {
    fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn first_above(&self, threshold: f64) -> Option<u64> {
        self.ns.iter().zip(&self.values).find(|(_, v)| **v > threshold).map(|(n, _)| *n)
    }

    fn to_json(&self, expected: &str) -> Value {
        json!({
            "k": format_rational(&self.k),
            "p": self.p.to_string(),
            "expected": expected,
            "class": self.class,
            "sup": self.sup(),
            "growth_exponent": growth_exponent(&self.ns, &self.values),
            "n": self.ns,
            "values": self.values,
        })
    }
}

fn sweep_family(family: &Family, spec: &RegionSpec) -> Result<Vec<Series>> {
    let orbits = family.orbit_spaces()?;
    let ns: Vec<u64> = family.members.iter().map(|m| m.n).collect();
    let cells: Vec<(Rational, Exponent)> = spec
        .k_grid
        .iter()
        .flat_map(|k| spec.p_grid.iter().map(move |p| (k.clone(), p.clone())))
        .collect();
    cells
        .par_iter()
        .map(|(k, p)| {
            let values = orbits
                .iter()
                .map(|o| orbit_delta_scan(o, k, p, spec.kind, spec.op).map(|e| e.lower_bound))
                .collect::<maxlab_core::Result<Vec<_>>>()?;
            let class = classify(&ns, &values, spec.t_div, spec.c_bnd);
            Ok(Series {
                k: k.clone(),
                p: p.clone(),
                ns: ns.clone(),
                values,
                class,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionParams {
    pub variant: Variant,
    #[serde(with = "serde_q")]
    pub k: Rational,
    #[serde(with = "serde_q")]
    pub p: Rational,
    #[serde(with = "serde_q")]
    pub epsilon: Rational,
    #[serde(with = "serde_q")]
    pub delta: Rational,
    /// One family per value.
    #[serde(rename = "N")]
    pub big_ns: Vec<u64>,
    pub region: RegionSpec,
}

impl Default for RegionParams {
    fn default() -> Self {
        Self {
            variant: Variant::S,
            k: rat(3, 2),
            p: int(2),
            epsilon: rat(1, 4),
            delta: rat(1, 4),
            big_ns: vec![2, 4, 9],
            region: RegionSpec {
                k_grid: vec![rat(5, 4), rat(3, 2), rat(13, 8), rat(7, 4)],
                p_grid: [int(1), rat(3, 2), int(2), rat(9, 4), rat(5, 2), int(3)]
                    .into_iter()
                    .map(Exponent::Finite)
                    .collect(),
                n_max: 40,
                t_div: 100.0,
                c_bnd: 20.0,
                kind: Kind::Weak,
                op: OpKind::Noncentered,
            },
        }
    }
}

/// The behaviour the family is built to show at `(k', p')`.
fn expected_region(params: &RegionParams, k: &Rational, p: &Exponent) -> &'static str {
    let p = match p {
        Exponent::Infinite => return "simeq_one",
        Exponent::Finite(p) => p,
    };
    let eps = &params.epsilon;
    if *k >= &params.k + &params.delta || *p >= &params.p + eps * int(4) {
        "simeq_one"
    } else if *k > params.k {
        "finite_unquantified"
    } else if *p < params.p {
        "infinite"
    } else if *p <= &params.p + eps {
        "bracket"
    } else {
        "at_most_n2"
    }
}

pub fn run_lemma6_region(params: &RegionParams) -> Result<Report> {
    let mut report = Report::new("lemma6-region", serde_json::to_value(params)?);
    let spec = &params.region;
    spec.check()?;
    let mut families = Vec::new();
    for &big_n in &params.big_ns {
        let fp = FamilyParams {
            k: params.k.clone(),
            p: params.p.clone(),
            epsilon: params.epsilon.clone(),
            delta: params.delta.clone(),
            big_n,
            n_from: None,
            n_max: spec.n_max,
        };
        let family = match params.variant {
            Variant::S => family_lemma6(&fp)?,
            Variant::T => family_lemma6p(&fp)?,
        };
        let series = sweep_family(&family, spec)?;
        let n = big_n as f64;
        let mut cells = Vec::new();
        for s in &series {
            let expected = expected_region(params, &s.k, &s.p);
            let at = format!("N = {big_n}, cell ({}, {})", format_rational(&s.k), s.p);
            match expected {
                "infinite" => report.check(
                    format!("{at} diverges"),
                    s.class == CellClass::Diverging,
                    format!(
                        "{:?}, sup {}, first above {} at n = {:?}",
                        s.class,
                        s.sup(),
                        spec.t_div,
                        s.first_above(spec.t_div)
                    ),
                ),
                "simeq_one" => report.check(
                    format!("{at} is bounded"),
                    s.class == CellClass::Bounded,
                    format!("{:?}, sup {} against C_bnd = {}", s.class, s.sup(), spec.c_bnd),
                ),
                "bracket" => report.check(
                    format!("{at} lies in [N^(1/2)/8, 8 N^2]"),
                    s.sup() >= n.sqrt() / 8.0 && s.sup() <= 8.0 * n * n,
                    format!("sup {} in [{}, {}]", s.sup(), n.sqrt() / 8.0, 8.0 * n * n),
                ),
                "at_most_n2" => report.check(
                    format!("{at} stays below 8 N^2"),
                    s.sup() <= 8.0 * n * n,
                    format!("sup {}", s.sup()),
                ),
                _ => {}
            }
            cells.push(s.to_json(expected));
        }
        families.push(json!({"N": big_n, "k0": format_rational(&family.k0), "cells": cells}));
    }
    report.data = json!({ "families": families });
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    pub variant: Variant,
    #[serde(with = "serde_q")]
    pub k: Rational,
    pub mode: Lemma7Mode,
    pub region: RegionSpec,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self {
            variant: Variant::S,
            k: rat(3, 2),
            mode: Lemma7Mode::Strict,
            region: RegionSpec {
                k_grid: vec![rat(5, 4), rat(3, 2), rat(7, 4)],
                p_grid: vec![Exponent::integer(1), Exponent::integer(2), Exponent::Infinite],
                n_max: 200,
                t_div: 100.0,
                c_bnd: 20.0,
                kind: Kind::Weak,
                op: OpKind::Centered,
            },
        }
    }
}

pub fn run_lemma7_threshold(params: &ThresholdParams) -> Result<Report> {
    let mut report = Report::new("lemma7-threshold", serde_json::to_value(params)?);
    let spec = &params.region;
    spec.check()?;
    let fp = Lemma7Params {
        k: params.k.clone(),
        mode: params.mode,
        n_max: spec.n_max,
    };
    let family = match params.variant {
        Variant::S => family_lemma7(&fp)?,
        Variant::T => family_lemma7p(&fp)?,
    };
    let series = sweep_family(&family, spec)?;
    let mut cells = Vec::new();
    for s in &series {
        let at = format!("cell ({}, {})", format_rational(&s.k), s.p);
        let unbounded = match params.mode {
            Lemma7Mode::Strict => s.k < params.k,
            Lemma7Mode::Weak => s.k <= params.k,
        };
        let expected = match (&s.p, unbounded) {
            (Exponent::Infinite, _) => {
                report.check(
                    format!("{at} stays at most 1"),
                    s.values.iter().all(|v| *v <= 1.0 + 1e-9),
                    format!("sup {}", s.sup()),
                );
                "sup_norm"
            }
            (Exponent::Finite(p), true) => {
                let floor = 1.0 / (2.0 * to_f64(p));
                let exponent = growth_exponent(&s.ns, &s.values);
                report.check(
                    format!("{at} grows without bound"),
                    is_monotone(&s.values) && exponent >= floor,
                    format!(
                        "{:?}, growth exponent {exponent} (needs {floor}), sup {}, above T_div = {}: {}",
                        s.class,
                        s.sup(),
                        spec.t_div,
                        s.class == CellClass::Diverging
                    ),
                );
                "infinite"
            }
            (Exponent::Finite(_), false) => {
                report.check(
                    format!("{at} is bounded"),
                    s.class == CellClass::Bounded,
                    format!("{:?}, sup {} against C_bnd = {}", s.class, s.sup(), spec.c_bnd),
                );
                "finite"
            }
        };
        cells.push(s.to_json(expected));
    }
    report.data = json!({ "k0": format_rational(&family.k0), "cells": cells });
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Params {
    /// Breakpoints `(k, h(k))` of a piecewise-linear `h` on `[1, k_last]`.
    pub h: Vec<(String, String)>,
    /// Candidate `(k, p)` points; those outside `{p < h(k)}` are skipped.
    pub samples: Vec<(String, String)>,
    pub n_max: u64,
    pub t_div: f64,
    pub c_bnd: f64,
    /// Gap above `h(k)` for the bounded cell.
    #[serde(with = "serde_q")]
    pub margin: Rational,
}

impl Default for Example1Params {
    fn default() -> Self {
        let s = |a: &str, b: &str| (a.to_string(), b.to_string());
        Self {
            h: vec![s("1", "2"), s("3/2", "2"), s("7/4", "3/2")],
            samples: vec![s("5/4", "3/2"), s("3/2", "5/4"), s("13/8", "3/2"), s("5/4", "5/2")],
            n_max: 40,
            t_div: 100.0,
            c_bnd: 20.0,
            margin: int(1),
        }
    }
}

fn parse_pairs(pairs: &[(String, String)]) -> Result<Vec<(Rational, Rational)>> {
    pairs
        .iter()
        .map(|(a, b)| {
            Ok((
                maxlab_core::rational::parse_rational(a)?,
                maxlab_core::rational::parse_rational(b)?,
            ))
        })
        .collect()
}

/// Piecewise-linear interpolation; `None` outside the breakpoints.
fn interpolate(h: &[(Rational, Rational)], k: &Rational) -> Option<Rational> {
    if h.len() == 1 {
        return (h[0].0 == *k).then(|| h[0].1.clone());
    }
    h.windows(2).find(|w| w[0].0 <= *k && *k <= w[1].0).map(|w| {
        let (k0, h0) = &w[0];
        let (k1, h1) = &w[1];
        h0 + (h1 - h0) * (k - k0) / (k1 - k0)
    })
}

pub fn run_example1(params: &Example1Params) -> Result<Report> {
    let mut report = Report::new("example1-family", serde_json::to_value(params)?);
    let h = parse_pairs(&params.h)?;
    if h.is_empty() || h[0].0 != int(1) {
        bail!("h must start at k = 1");
    }
    if !h.windows(2).all(|w| w[0].0 < w[1].0) {
        bail!("h breakpoints must have increasing k");
    }
    if h.iter().any(|(k, v)| *k >= int(2) || *v < int(1)) {
        bail!("h must take values at least 1 on [1, 2)");
    }
    if h[0].1 == int(1) {
        let point = MetricMeasureSpace::one_point(int(1));
        let mut ok = true;
        for p in [Exponent::integer(1), Exponent::integer(2), Exponent::Infinite] {
            for op in [OpKind::Centered, OpKind::Noncentered] {
                let e = delta_scan(&point, &int(1), &p, Kind::Weak, op)?;
                ok &= e.lower_bound == 1.0;
            }
        }
        report.check("h(1) = 1 leaves only the one-point space, whose ratios are 1", ok, "one atom");
        report.data = json!({ "space": "one_point", "samples": [] });
        return Ok(report);
    }
    let samples = parse_pairs(&params.samples)?;
    let mut rows = Vec::new();
    for (k, p) in &samples {
        let label = format!("({}, {})", format_rational(k), format_rational(p));
        let inside = *k >= int(1) && *p >= int(1) && interpolate(&h, k).is_some_and(|hk| *p < hk);
        if !inside {
            rows.push(json!({"k": format_rational(k), "p": format_rational(p), "in_omega": false}));
            continue;
        }
        // Largest δ = (2-k)/2^j keeping p below h on [k, k+δ].
        let mut delta = (int(2) - k) / int(2);
        let mut halvings = 0;
        while !interpolate(&h, &(k + &delta)).is_some_and(|hk| *p < hk) && halvings < 60 {
            delta /= int(2);
            halvings += 1;
        }
        let family = family_lemma6(&FamilyParams {
            k: k.clone(),
            p: p.clone(),
            epsilon: rat(1, 4),
            delta: delta.clone(),
            big_n: 1,
            n_from: None,
            n_max: params.n_max,
        })?;
        let hk = interpolate(&h, k).expect("inside the domain");
        let bounded_p = Exponent::Finite(&hk + &params.margin);
        let mut p_grid = Vec::new();
        if *p > int(1) {
            p_grid.push(Exponent::integer(1));
        }
        p_grid.push(bounded_p.clone());
        let spec = RegionSpec {
            k_grid: vec![k.clone()],
            p_grid,
            n_max: params.n_max,
            t_div: params.t_div,
            c_bnd: params.c_bnd,
            kind: Kind::Weak,
            op: OpKind::Centered,
        };
        let series = sweep_family(&family, &spec)?;
        let mut cells = Vec::new();
        for s in &series {
            let cell = format!("sample {label}: cell ({}, {})", format_rational(&s.k), s.p);
            let expected = if s.p == bounded_p {
                report.check(
                    format!("{cell} is bounded"),
                    s.class == CellClass::Bounded,
                    format!("{:?}, sup {}", s.class, s.sup()),
                );
                "simeq_one"
            } else {
                // Close to p = 1 the growth is a small power of n and may
                // stay under T_div at this depth.
                report.check(
                    format!("{cell} diverges or grows"),
                    matches!(s.class, CellClass::Diverging | CellClass::Growing),
                    format!(
                        "{:?}, sup {}, growth exponent {}",
                        s.class,
                        s.sup(),
                        growth_exponent(&s.ns, &s.values)
                    ),
                );
                "infinite"
            };
            cells.push(s.to_json(expected));
        }
        rows.push(json!({
            "k": format_rational(k),
            "p": format_rational(p),
            "in_omega": true,
            "delta": format_rational(&delta),
            "h_at_k": format_rational(&hk),
            "cells": cells,
        }));
    }
    report.data = json!({ "samples": rows });
    Ok(report)
}
