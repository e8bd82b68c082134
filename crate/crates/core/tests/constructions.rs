//! Structural guarantees of the builders: validity, halving, partial-sum
//! inequalities, gluing and the three-valued modification.

use maxlab_core::constants::random_function;
use maxlab_core::constructions::generations::branch_measure;
use maxlab_core::constructions::segment::{lemma2_params, lemma3_params};
use maxlab_core::constructions::{
    basic_s, basic_t, family_lemma6, family_lemma7, first_generation, glue_layout, lemma1_modify,
    random_space, second_generation, segment_preset_lemma2, segment_preset_lemma3, BasicParams,
    Descriptor, FamilyParams, FirstGenParams, Lemma7Mode, Lemma7Params, RandomParams,
    SecondGenParams, WeightRule,
};
use maxlab_core::maximal::{maximal, OpKind, TestFunction};
use maxlab_core::rational::{int, rat};
use maxlab_core::space::{total_measure, validate_metric};
use maxlab_core::{MetricMeasureSpace, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn weight_table(rng: &mut ChaCha8Rng, sizes: &[u64]) -> WeightRule {
    WeightRule::Table(
        sizes
            .iter()
            .map(|&t| (0..t).map(|_| rat(rng.random_range(1..8), rng.random_range(1..5))).collect())
            .collect(),
    )
}

fn second_generation_sample(seed: u64) -> MetricMeasureSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_max = rng.random_range(1..5);
    let tau_star: Vec<u64> = (0..n_max).map(|_| rng.random_range(1..5)).collect();
    let f_star = weight_table(&mut rng, &tau_star);
    second_generation(&SecondGenParams { tau_star, f_star, n_max }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basic_spaces_are_valid(tau in 1u64..6, dn in 1i64..9, m in 2i64..9) {
        let d = int(1) + rat(dn, 8);
        prop_assert!(validate_metric(&basic_s(&BasicParams::new(tau, d.clone(), rat(m, 2) + int(1))).unwrap()).ok);
        let d3 = int(1) + rat(dn, 4);
        prop_assert!(validate_metric(&basic_t(&BasicParams::new(tau, d3, rat(m, 2) + int(1))).unwrap()).ok);
    }

    #[test]
    fn generation_spaces_halve_and_are_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_max = rng.random_range(1..6);
        let tau: Vec<u64> = (0..n_max).map(|_| rng.random_range(1..5)).collect();
        let f = weight_table(&mut rng, &tau);
        let first = first_generation(&FirstGenParams { tau, f, n_max }).unwrap();
        let second = second_generation_sample(seed);
        for space in [&first, &second] {
            prop_assert!(validate_metric(space).ok);
            let one = branch_measure(space, 1);
            let mut n = 2;
            while !branch_measure(space, n).is_zero() {
                prop_assert_eq!(branch_measure(space, n), &one / int(1 << (n - 1)));
                n += 1;
            }
        }
        let modified = lemma1_modify(&second).unwrap();
        prop_assert!(validate_metric(&modified).ok);
    }

    #[test]
    fn segment_presets_are_valid(n_max in 1usize..7, extra in 0i64..3) {
        prop_assert!(validate_metric(&segment_preset_lemma2(&(int(2) + rat(extra, 2)), n_max).unwrap()).ok);
        prop_assert!(validate_metric(&segment_preset_lemma3(&(int(3) + rat(extra, 2)), n_max).unwrap()).ok);
    }

    #[test]
    fn glue_is_valid_and_measure_bounded(seeds in proptest::collection::vec(any::<u64>(), 1..4), k0 in 1i64..4) {
        let parts: Vec<MetricMeasureSpace> = seeds
            .iter()
            .map(|&seed| random_space(&RandomParams { points: 1 + (seed % 5) as usize, seed }).unwrap())
            .collect();
        let glued = glue_layout(&int(k0), &parts).unwrap();
        prop_assert!(validate_metric(&glued.space).ok);
        let cap = (1..=parts.len()).fold(Rational::zero(), |acc, n| acc + Rational::new(1.into(), (1u64 << n).into()));
        prop_assert!(total_measure(&glued.space) <= cap);
    }
}

#[test]
fn k_plus_one_gaps_have_small_partial_sums() {
    for k in [int(2), rat(5, 2), int(4)] {
        let params = lemma2_params(&k, 12).unwrap();
        for (row, d) in params.d.iter().enumerate() {
            let n = row + 1;
            for j in 1..n {
                let head: Rational = d[..j].iter().sum();
                assert!(head < &d[j] / &k);
                assert!(&d[j] / &k <= int(1) / &k);
            }
            let mass: Rational = params.f[row].iter().sum();
            assert_eq!(mass, Rational::new(1.into(), (1u64 << n).into()));
        }
    }
}

#[test]
fn k_minus_half_gaps_have_small_partial_sums() {
    for k in [int(3), rat(7, 2)] {
        let params = lemma3_params(&k, 12).unwrap();
        for (row, d) in params.d.iter().enumerate() {
            let n = row + 1;
            let f = &params.f[row];
            assert!(d.iter().sum::<Rational>() < int(1));
            let tail: Rational = f[1..].iter().sum();
            assert!(tail < Rational::new(1.into(), (1u64 << n).into()));
            for j in 0..n {
                let head_d: Rational = d[..j].iter().sum();
                assert!(head_d < d[j]);
                let head_f: Rational = f[1..=j].iter().sum();
                assert!(head_f < f[j + 1]);
            }
            for j in 0..n.saturating_sub(1) {
                assert!(&d[j] * &k > d[j + 1]);
            }
        }
    }
}

#[test]
fn glue_identity_holds_exactly() {
    let parts = vec![
        basic_s(&BasicParams::new(3, rat(3, 2), int(4))).unwrap(),
        basic_t(&BasicParams::new(2, int(2), int(3))).unwrap(),
        segment_preset_lemma2(&int(2), 3).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k0 in [rat(3, 2), int(2), int(3)] {
        let glued = glue_layout(&k0, &parts).unwrap();
        let mass = total_measure(&glued.space);
        for trial in 0..20 {
            let mut values = random_function(&mut rng, glued.space.len());
            if trial % 4 == 0 {
                // Supported on a single component.
                let keep = &glued.components[trial % 3];
                for (i, v) in values.iter_mut().enumerate() {
                    if !(keep.offset..keep.offset + keep.len).contains(&i) {
                        *v = Rational::zero();
                    }
                }
            }
            let f = TestFunction::new(values).unwrap();
            let avg = glued.space.weights().iter().zip(f.values()).map(|(w, v)| w * v).sum::<Rational>() / &mass;
            for k in [int(1), k0.clone()] {
                for op in [OpKind::Centered, OpKind::Noncentered] {
                    let whole = maximal(&glued.space, &k, op, &f).unwrap().values;
                    for c in &glued.components {
                        let part = TestFunction::new(f.values()[c.offset..c.offset + c.len].to_vec()).unwrap();
                        let local = maximal(&c.space, &k, op, &part).unwrap().values;
                        for (i, v) in local.iter().enumerate() {
                            assert_eq!(whole[c.offset + i], v.clone().max(avg.clone()), "{op} k={k}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn single_component_glue_is_the_rescaled_component() {
    let s = basic_s(&BasicParams::new(4, rat(3, 2), int(2))).unwrap();
    let glued = glue_layout(&int(2), std::slice::from_ref(&s)).unwrap();
    let f = TestFunction::new(vec![int(1), int(0), rat(1, 2), int(3), int(0)]).unwrap();
    for op in [OpKind::Centered, OpKind::Noncentered] {
        assert_eq!(
            maximal(&glued.space, &int(2), op, &f).unwrap().values,
            maximal(&s, &int(2), op, &f).unwrap().values
        );
    }
    assert_eq!(total_measure(&glued.space), rat(1, 2));
}

#[test]
fn modified_metric_never_exceeds_the_original_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..4 {
        let base = second_generation_sample(seed);
        let modified = lemma1_modify(&base).unwrap();
        for _ in 0..10 {
            let f = TestFunction::new(random_function(&mut rng, base.len())).unwrap();
            for k in [int(2), rat(5, 2), rat(11, 4)] {
                for op in [OpKind::Centered, OpKind::Noncentered] {
                    let after = maximal(&modified, &k, op, &f).unwrap().values;
                    let before = maximal(&base, &int(1), op, &f).unwrap().values;
                    assert!(after.iter().zip(&before).all(|(a, b)| a <= b));
                }
            }
        }
    }
}

#[test]
fn descriptors_rebuild_their_spaces() {
    let spaces = vec![
        basic_s(&BasicParams::new(3, rat(3, 2), int(4))).unwrap(),
        segment_preset_lemma3(&int(3), 3).unwrap(),
        lemma1_modify(&second_generation_sample(9)).unwrap(),
        family_lemma7(&Lemma7Params { k: rat(3, 2), mode: Lemma7Mode::Weak, n_max: 3 })
            .unwrap()
            .glue()
            .unwrap()
            .space,
    ];
    for s in spaces {
        let rebuilt = Descriptor::from_provenance(s.provenance()).build().unwrap();
        assert_eq!(rebuilt, s);
        let json = s.to_json().unwrap();
        assert_eq!(MetricMeasureSpace::from_json(&json).unwrap(), s);
    }
}

#[test]
fn divergent_family_members_follow_the_formulas() {
    let params = FamilyParams {
        k: rat(3, 2),
        p: int(2),
        epsilon: rat(1, 4),
        delta: rat(1, 4),
        big_n: 2,
        n_from: None,
        n_max: 5,
    };
    let family = family_lemma6(&params).unwrap();
    assert_eq!(family.k0, rat(7, 4));
    assert_eq!(family.members.first().unwrap().n, 3);
    let m3 = &family.members[0].params;
    assert_eq!(m3.tau, num_bigint::BigUint::from(16u64 * 6561));
    assert_eq!(m3.m, int(6561));
    assert_eq!(m3.d, rat(3, 2) + rat(1, 12));
    assert!(family.members.iter().all(|m| m.params.d > params.k && m.params.d <= family.k0));
    assert!(family.members.windows(2).all(|w| w[0].params.tau < w[1].params.tau));
    assert!(Rational::one() < family.k0);
}
