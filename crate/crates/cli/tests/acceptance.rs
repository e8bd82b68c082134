//! Acceptance gate: runs each criterion at its stated size and tolerance
//! and prints one PASS/FAIL line per criterion. Exits nonzero on failure.

#[path = "../../core/tests/closed_form/mod.rs"]
mod closed_form;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use maxlab_cli::experiments::{
    run_lemma2, run_lemma3, run_lemma4, run_lemma5, run_lemma6_region, run_prop1_identity,
    trial_function, BasicGridParams, GlueIdentityParams, RegionParams, RegionSpec, SegmentRunParams,
};
use maxlab_cli::Report;
use maxlab_core::constants::{ratio, Kind};
use maxlab_core::constructions::{
    basic_s, basic_t, lemma1_modify, random_space, random_spaces, second_generation, BasicParams,
    RandomParams, SecondGenParams, WeightRule,
};
use maxlab_core::maximal::{
    ball_table, m_centered, m_centered_oracle, m_noncentered, m_noncentered_oracle, maximal, OpKind,
    TestFunction,
};
use maxlab_core::rational::{int, rat, Exponent};
use maxlab_core::space::{scale_measure, scale_metric};
use maxlab_core::MetricMeasureSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, fail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(fail())
    }
}

fn report_outcome(reports: &[Report]) -> Outcome {
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(move |c| format!("[{}] {}: {}", r.experiment, c.name, c.detail)))
        .collect();
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    if failures.is_empty() {
        Ok(format!("{checks} checks"))
    } else {
        Err(failures.join(" | "))
    }
}

fn ball_tables() -> Outcome {
    use closed_form::{actual, expected, grid, ks, star_ball, two_layer_ball};
    let star = grid(&[rat(5, 4), rat(3, 2), int(2)]);
    let layered = grid(&[rat(3, 2), int(2), int(3)]);
    ensure(star.len() >= 20 && layered.len() >= 20, || "grid too small".into())?;
    for (tau, d, m) in &star {
        let s = basic_s(&BasicParams::new(*tau as u64, d.clone(), m.clone())).map_err(|e| e.to_string())?;
        for k in ks() {
            let want = expected(s.len(), &[int(1), d.clone()], &k, |c, r| star_ball(*tau, d, c, r));
            ensure(actual(ball_table(&s, &k).unwrap()) == want, || format!("star tau={tau} d={d} k={k}"))?;
        }
    }
    for (tau, d, m) in &layered {
        let t = basic_t(&BasicParams::new(*tau as u64, d.clone(), m.clone())).map_err(|e| e.to_string())?;
        let half = (d + int(1)) / int(2);
        for k in ks() {
            let want = expected(t.len(), &[int(1), half.clone(), d.clone()], &k, |c, r| {
                two_layer_ball(*tau, d, c, r)
            });
            ensure(actual(ball_table(&t, &k).unwrap()) == want, || format!("two-layer tau={tau} d={d} k={k}"))?;
        }
    }
    Ok(format!("{} star and {} two-layer triples", star.len(), layered.len()))
}

fn star_point_mass_values() -> Outcome {
    let mut cases = 0;
    for tau in [1u64, 2, 4, 8] {
        for (d, k) in [(rat(3, 2), int(1)), (int(2), rat(3, 2)), (rat(5, 4), rat(9, 8))] {
            for m in [int(2), rat(7, 2), int(16)] {
                let s = basic_s(&BasicParams::new(tau, d.clone(), m.clone())).unwrap();
                let g = m_centered(&s, &k, &TestFunction::delta(s.len(), 0)).unwrap().values;
                let leaf = (int(1) + &m).recip();
                ensure(g[0] == int(1) && g[1..].iter().all(|v| *v == leaf), || {
                    format!("tau={tau} d={d} m={m} k={k}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} spaces, exact"))
}

fn segment_harmonic() -> Outcome {
    let mut reports = Vec::new();
    for k in [int(2), rat(5, 2)] {
        let params = SegmentRunParams {
            k,
            n_max: 20,
            random_n_max: Some(12),
            trials: 1000,
            seed: 1,
        };
        reports.push(run_lemma2(&params).map_err(|e| e.to_string())?);
    }
    report_outcome(&reports)
}

fn segment_linear() -> Outcome {
    let params = SegmentRunParams {
        trials: 1000,
        seed: 2,
        ..SegmentRunParams::lemma3()
    };
    report_outcome(&[run_lemma3(&params).map_err(|e| e.to_string())?])
}

fn basic_brackets() -> Outcome {
    let star = run_lemma4(&BasicGridParams::lemma4()).map_err(|e| e.to_string())?;
    let layered = run_lemma5(&BasicGridParams::lemma5()).map_err(|e| e.to_string())?;
    report_outcome(&[star, layered])
}

fn glue_identity() -> Outcome {
    report_outcome(&[run_prop1_identity(&GlueIdentityParams {
        seed: 3,
        ..GlueIdentityParams::default()
    })
    .map_err(|e| e.to_string())?])
}

fn oracle_equivalence() -> Outcome {
    let spaces = random_spaces(50, 10, 5).map_err(|e| e.to_string())?;
    let mut evaluations = 0;
    for (s, space) in spaces.iter().enumerate() {
        for t in 0..10 {
            let f = trial_function(4, (s * 10 + t) as u64, space.len());
            for k in [int(1), rat(3, 2), int(2), int(3)] {
                let c = m_centered(space, &k, &f).unwrap().values;
                let nc = m_noncentered(space, &k, &f).unwrap().values;
                ensure(c == m_centered_oracle(space, &k, &f, 1).unwrap().values, || {
                    format!("centered space {s} trial {t} k={k}")
                })?;
                ensure(nc == m_noncentered_oracle(space, &k, &f, 1).unwrap().values, || {
                    format!("noncentered space {s} trial {t} k={k}")
                })?;
                evaluations += 2;
            }
        }
    }
    Ok(format!("{evaluations} evaluations, exact"))
}

fn region() -> Outcome {
    let mut params = RegionParams::default();
    params.region = RegionSpec {
        k_grid: vec![rat(3, 2), rat(7, 4)],
        p_grid: vec![Exponent::integer(1), Exponent::integer(2), Exponent::integer(3)],
        ..params.region
    };
    report_outcome(&[run_lemma6_region(&params).map_err(|e| e.to_string())?])
}

fn property_case(case: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(case);
    let space = random_space(&RandomParams {
        points: rng.random_range(1..=9),
        seed: rng.random(),
    })
    .map_err(|e| e.to_string())?;
    let n = space.len();
    let ks = [int(1), rat(5, 4), rat(3, 2), int(2), rat(5, 2), int(3)];
    let k = ks[rng.random_range(0..ks.len())].clone();
    let k2 = &k + rat(rng.random_range(1..9), rng.random_range(1..9));
    let c = rat(rng.random_range(1..10), rng.random_range(1..10));
    let f = trial_function(case, 0, n);
    let g = trial_function(case, 1, n);
    let fail = |what: &str| format!("case {case}: {what}");
    let cm = m_centered(&space, &k, &f).unwrap().values;
    let nm = m_noncentered(&space, &k, &f).unwrap().values;
    ensure((0..n).all(|i| f.values()[i] <= cm[i] && cm[i] <= nm[i]), || fail("f <= centered <= noncentered"))?;
    for op in [OpKind::Centered, OpKind::Noncentered] {
        let base = maximal(&space, &k, op, &f).unwrap().values;
        let wider = maximal(&space, &k2, op, &f).unwrap().values;
        ensure(wider.iter().zip(&base).all(|(a, b)| a <= b), || fail("monotone in k"))?;
        let scaled = maximal(&space, &k, op, &f.scaled(&c).unwrap()).unwrap().values;
        ensure(scaled.iter().zip(&base).all(|(a, b)| *a == b * &c), || fail("homogeneity"))?;
        let mg = maximal(&space, &k, op, &g).unwrap().values;
        let sum = maximal(&space, &k, op, &f.sum(&g).unwrap()).unwrap().values;
        ensure((0..n).all(|i| sum[i] <= &base[i] + &mg[i]), || fail("sublinearity"))?;
        let by_metric = maximal(&scale_metric(&space, &c).unwrap(), &k, op, &f).unwrap().values;
        let by_measure = maximal(&scale_measure(&space, &c).unwrap(), &k, op, &f).unwrap().values;
        ensure(by_metric == base && by_measure == base, || fail("scaling invariance"))?;
        let exponents = [Exponent::integer(1), Exponent::Finite(rat(3, 2)), Exponent::integer(2), Exponent::Infinite];
        let p = &exponents[rng.random_range(0..exponents.len())];
        let w = ratio(&space, &k, p, Kind::Weak, op, &f).unwrap().value;
        let s = ratio(&space, &k, p, Kind::Strong, op, &f).unwrap().value;
        ensure(w <= s + 1e-9, || fail("weak <= strong"))?;
    }
    Ok(())
}

fn properties() -> Outcome {
    const CASES: u64 = 1000;
    for case in 0..CASES {
        property_case(case)?;
    }
    Ok(format!("{CASES} cases, 6 invariants each"))
}

fn second_generation_sample(seed: u64) -> MetricMeasureSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_max = rng.random_range(1..5);
    let tau_star: Vec<u64> = (0..n_max).map(|_| rng.random_range(1..5)).collect();
    let table = tau_star
        .iter()
        .map(|&t| (0..t).map(|_| rat(rng.random_range(1..8), rng.random_range(1..5))).collect())
        .collect();
    second_generation(&SecondGenParams {
        tau_star,
        f_star: WeightRule::Table(table),
        n_max,
    })
    .unwrap()
}

fn modified_metric() -> Outcome {
    let mut comparisons = 0;
    for seed in 0..10 {
        let base = second_generation_sample(seed);
        let modified = lemma1_modify(&base).map_err(|e| e.to_string())?;
        for t in 0..100 {
            let f = trial_function(seed, t, base.len());
            for op in [OpKind::Centered, OpKind::Noncentered] {
                let before = maximal(&base, &int(1), op, &f).unwrap().values;
                for k in [int(2), rat(5, 2)] {
                    let after = maximal(&modified, &k, op, &f).unwrap().values;
                    ensure(after.iter().zip(&before).all(|(a, b)| a <= b), || {
                        format!("space {seed} trial {t} {op} k={k}")
                    })?;
                    comparisons += 1;
                }
            }
        }
    }
    Ok(format!("{comparisons} pointwise comparisons, exact"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    maxlab_cli::init_threads().expect("thread pool");
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "ball tables match the closed forms", limit: secs(1), run: ball_tables },
        Criterion { id: 2, name: "star point-mass values", limit: secs(1), run: star_point_mass_values },
        Criterion { id: 3, name: "segment harmonic lower bounds and weak covering bound", limit: secs(30), run: segment_harmonic },
        Criterion { id: 4, name: "segment linear lower bounds and centered strong bound", limit: secs(30), run: segment_linear },
        Criterion { id: 5, name: "star and two-layer brackets", limit: secs(300), run: basic_brackets },
        Criterion { id: 6, name: "gluing identity", limit: secs(60), run: glue_identity },
        Criterion { id: 7, name: "enumeration matches the oracle", limit: secs(120), run: oracle_equivalence },
        Criterion { id: 8, name: "family region classification", limit: secs(300), run: region },
        Criterion { id: 9, name: "randomized invariants", limit: secs(120), run: properties },
        Criterion { id: 10, name: "modified metric comparison", limit: secs(60), run: modified_metric },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (ok, detail) = match outcome {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; over the {:?} limit", c.limit)),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {:>2}: {} ({:.2}s) {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
