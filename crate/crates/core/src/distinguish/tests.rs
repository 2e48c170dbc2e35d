use std::collections::BTreeMap;

use super::*;
use crate::oracle::{OracleInstance, RoundFunction};
use crate::qsim::DenseState;
use crate::seed;

fn approx(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn budgets_from_the_preambles() {
    assert_eq!(query_budget(Algorithm::Alg1, 1.0 / 27.0).unwrap(), 3);
    assert_eq!(query_budget(Algorithm::Alg2, 1.0 / 3.0).unwrap(), 20);
    assert_eq!(query_budget(Algorithm::Alg1, 0.999).unwrap(), 1);
    assert_eq!(query_budget(Algorithm::Alg1, 1.0 / 3.0).unwrap(), 1);
    assert_eq!(query_budget(Algorithm::Alg1, 1.0 / 9.0).unwrap(), 2);
    assert_eq!(query_budget(Algorithm::Alg1, 0.03).unwrap(), 4);
    assert!(query_budget(Algorithm::Alg1, 0.0).is_err());
    assert!(query_budget(Algorithm::Alg3, 1.0).is_err());
    assert!(query_budget(Algorithm::Alg3, f64::NAN).is_err());
}

#[test]
fn error_bounds() {
    assert!(approx(error_bound(Algorithm::Alg1, 3), 1.0 / 27.0));
    assert!(approx(error_bound(Algorithm::Alg2, 2), 8.0 / 27.0));
    assert!(approx(error_bound(Algorithm::Alg3, 2), 8.0 / 27.0));
    let mut last = 1.0;
    for q in 1..60 {
        let b = error_bound(Algorithm::Alg1, q);
        assert!(b < last);
        last = b;
    }
}

#[test]
fn tie_goes_to_scheme() {
    assert_eq!(majority_label(10, 10), Label::Scheme);
    assert_eq!(majority_label(10, 11), Label::Rp);
    assert_eq!(majority_label(11, 10), Label::Scheme);
}

#[test]
fn config_guards() {
    let b = Budget::Queries(3);
    assert!(AlgorithmConfig::new(Algorithm::KPlus1, 4, Some(3), b).is_err());
    assert!(AlgorithmConfig::new(Algorithm::Alg2, 4, Some(3), b).is_err());
    assert!(AlgorithmConfig::new(Algorithm::Alg1, 4, None, Budget::Queries(0)).is_err());
    let c = AlgorithmConfig::new(Algorithm::Alg1, 4, None, b).unwrap();
    assert!(c.clone().with_measured_register(1).is_err());
    assert!(c.clone().with_measured_register(5).is_err());
    assert!(c.clone().with_measured_register(3).is_ok());
    let c3 = AlgorithmConfig::new(Algorithm::Alg3, 4, None, b).unwrap();
    assert!(c3.clone().with_measured_register(2).is_err());
    assert!(c3.with_measured_register(1).is_ok());
    assert_eq!(Algorithm::parse("gk").unwrap(), Algorithm::KPlus1);
    assert!(Algorithm::parse("alg4").is_err());
    assert_eq!(StatisticMode::parse("per-coset").unwrap(), StatisticMode::PerCoset);
}

#[test]
fn mismatched_oracle_is_rejected() {
    let cfg = AlgorithmConfig::new(Algorithm::Alg3, 3, None, Budget::Queries(1)).unwrap();
    let o = OracleInstance::build(OracleKind::Feistel, BlockParams::balanced(3, 4).unwrap(), 1).unwrap();
    assert!(simon_trial(&o, &cfg, 0, &mut seed::stream(0)).is_err());
    let cfg1 = AlgorithmConfig::new(Algorithm::Alg1, 3, None, Budget::Queries(1)).unwrap();
    assert!(algorithm2(&o, &cfg1, &mut seed::stream(0)).is_err());
}

#[test]
fn per_trial_query_count() {
    for alg in Algorithm::ALL {
        for n in [2, 3, 4] {
            let cfg = AlgorithmConfig::new(alg, n, None, Budget::Queries(3)).unwrap();
            let (kind, p) = alg.scheme(n, cfg.k).unwrap();
            let o = OracleInstance::build(kind, p, 5).unwrap();
            let v = run_distinguisher(&o, &cfg, &mut seed::stream(9)).unwrap();
            for t in &v.trials {
                assert_eq!(t.queries, 2 * (u64::from(n) + 5));
                assert_eq!(t.y_samples.len(), n as usize + 5);
                assert_eq!(t.x_bit, t.nullspace_dim > 0);
                assert_eq!(t.x_bit, t.witness.is_some());
            }
            assert_eq!(v.total_queries(), 2 * 3 * (u64::from(n) + 5));
            assert_eq!(v.n0 + v.n1, v.q);
        }
    }
}

#[test]
fn injective_statistic_gives_full_rank() {
    let cfg = AlgorithmConfig::new(Algorithm::Alg1, 6, None, Budget::Queries(1))
        .unwrap()
        .with_measured_register(3)
        .unwrap();
    let o = OracleInstance::build(OracleKind::Vfs, BlockParams::new(6, 2, 3).unwrap(), 77).unwrap();
    let census = coset_census(&o, &cfg).unwrap();
    assert_eq!(census.histogram, BTreeMap::from([(1, 64)]));
    let mut rng = seed::stream(seed::derive(2024, 1));
    let mut zero = 0;
    for t in 0..200 {
        let out = simon_trial(&o, &cfg, t, &mut rng).unwrap();
        assert!(out.collapse_sizes.iter().all(|&s| s == 1));
        zero += usize::from(!out.x_bit);
    }
    assert!(zero as f64 / 200.0 >= 0.96, "x = 0 in {zero}/200 trials");
}

#[test]
fn planted_period_is_recovered() {
    let n = 8;
    let mut rng = seed::stream(31);
    let mut exact = 0;
    for t in 0..200 {
        let s = 1 + seed::below(&mut rng, 255);
        let g = PlantedPeriod::new(n, s, &mut rng).unwrap();
        let plan = CircuitPlan::simon(n).unwrap();
        let out = simon_trial_with(&g, &plan, 13, StatisticMode::Stacked, t, &mut rng, SparseState::prepare_uniform)
            .unwrap();
        assert!(out.collapse_sizes.iter().all(|&c| c == 2));
        assert!(out.y_samples.iter().all(|y| (y & s).count_ones().is_multiple_of(2)));
        if out.nullspace_dim == 1 {
            assert_eq!(out.witness, Some(s));
            exact += 1;
        }
    }
    assert!(exact >= 192, "exact recovery in {exact}/200");
}

#[test]
fn measurement_follows_the_census_at_n2() {
    for alg in Algorithm::ALL {
        let cfg = AlgorithmConfig::new(alg, 2, None, Budget::Queries(1)).unwrap();
        let (kind, p) = alg.scheme(2, cfg.k).unwrap();
        for (kind, p) in [(kind, p), (OracleKind::RandomPermutation, BlockParams::new(2, cfg.k, 1).unwrap())] {
            let o = OracleInstance::build(kind, p, 3).unwrap();
            let plan = cfg.plan().unwrap();
            let mut fibers: BTreeMap<u64, usize> = BTreeMap::new();
            for i in 0..4 {
                *fibers.entry(plan.statistic(&o, i)).or_default() += 1;
            }
            let mut state = SparseState::prepare_uniform(&plan.layout, plan.input_reg).unwrap();
            for g in &plan.forward {
                plan.apply(&mut state, g, &o).unwrap();
            }
            let marginal = state.marginal(plan.measured_reg).unwrap();
            assert_eq!(marginal.len(), fibers.len());
            for (v, prob, size) in marginal {
                assert_eq!(size, fibers[&v]);
                assert!(approx(prob, fibers[&v] as f64 / 4.0));
            }
            let census = coset_census(&o, &cfg).unwrap();
            assert_eq!(census.fibers(), fibers.len());

            let mut rng = seed::stream(8);
            let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
            let draws = 4000;
            for t in 0..draws / 5 {
                let out = simon_trial(&o, &cfg.clone(), t, &mut rng).unwrap();
                for v in out.measured {
                    *counts.entry(v).or_default() += 1;
                }
            }
            for (v, c) in counts {
                let expected = fibers[&v] as f64 / 4.0;
                assert!((c as f64 / (draws / 5 * 7) as f64 - expected).abs() < 0.05);
            }
        }
    }
}

#[test]
fn per_coset_keeps_one_fiber() {
    let cfg = AlgorithmConfig::new(Algorithm::Alg2, 5, None, Budget::Queries(4))
        .unwrap()
        .with_mode(StatisticMode::PerCoset);
    assert!(!cfg.is_literal());
    let o = OracleInstance::build(OracleKind::RandomPermutation, BlockParams::new(5, 2, 1).unwrap(), 12).unwrap();
    let v = algorithm2(&o, &cfg, &mut seed::stream(4)).unwrap();
    for t in &v.trials {
        assert!(t.measured.iter().all(|&m| m == t.measured[0]));
        assert!(t.collapse_sizes.iter().all(|&m| m == t.collapse_sizes[0]));
        assert_eq!(t.queries, 20);
    }
}

#[test]
fn verdicts_are_deterministic() {
    let cfg = AlgorithmConfig::new(Algorithm::Alg3, 3, None, Budget::Epsilon(0.5)).unwrap();
    let o = OracleInstance::build(OracleKind::Unbalanced, BlockParams::new(3, 3, 4).unwrap(), 6).unwrap();
    let a = algorithm3(&o, &cfg, &mut seed::stream(1)).unwrap();
    let b = algorithm3(&o, &cfg, &mut seed::stream(1)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.q, query_budget(Algorithm::Alg3, 0.5).unwrap());
}

#[test]
fn alg1_all_zero_rule() {
    let cfg = AlgorithmConfig::new(Algorithm::Alg1, 4, None, Budget::Epsilon(1.0 / 27.0)).unwrap();
    let o = OracleInstance::build(OracleKind::Vfs, BlockParams::new(4, 2, 3).unwrap(), 2).unwrap();
    let v = algorithm1(&o, &cfg, &mut seed::stream(3)).unwrap();
    assert_eq!(v.q, 3);
    assert_eq!(v.label == Label::Scheme, v.n1 == 0);
}

#[test]
fn degenerate_k_plus_1_instance_runs() {
    let p = BlockParams::new(3, 4, 5).unwrap();
    let rounds = (0..5).map(|_| RoundFunction::zero(p.round_input_bits(), 3).unwrap()).collect();
    let o = OracleInstance::with_rounds(OracleKind::Unbalanced, p, rounds).unwrap();
    let outs: std::collections::BTreeSet<u64> = (0..1u64 << 12).map(|x| o.evaluate(x)).collect();
    assert_eq!(outs.len(), 1 << 12);
    let cfg = AlgorithmConfig::new(Algorithm::KPlus1, 3, Some(4), Budget::Queries(5)).unwrap();
    let v = algorithm_k_plus_1(&o, &cfg, &mut seed::stream(0)).unwrap();
    assert_eq!(v.n0 + v.n1, 5);
    assert_eq!(v.total_queries(), 5 * 16);
}

#[test]
fn sparse_and_dense_trials_agree_on_samples() {
    // Same RNG stream on both engines gives the same draws when the distributions match.
    let cfg = AlgorithmConfig::new(Algorithm::Alg2, 3, None, Budget::Queries(1)).unwrap();
    let plan = cfg.plan().unwrap();
    let o = OracleInstance::build(OracleKind::Feistel, BlockParams::balanced(3, 4).unwrap(), 8).unwrap();
    for t in 0..20 {
        let a = simon_trial_with(&o, &plan, 8, StatisticMode::Stacked, t, &mut seed::stream(t as u64), SparseState::prepare_uniform)
            .unwrap();
        let b = simon_trial_with(&o, &plan, 8, StatisticMode::Stacked, t, &mut seed::stream(t as u64), DenseState::prepare_uniform)
            .unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn census_helpers() {
    let c = Census::from_fiber_sizes(3, [2, 2, 1, 3]);
    assert_eq!(c.fibers(), 4);
    assert_eq!(c.collision_pairs(), 1 + 1 + 3);
    assert!(approx(c.mean_fiber_size(), 2.0));
    let d = c.collapse_distribution();
    assert!(approx(d[&2], 0.5));
    assert!(approx(d.values().sum::<f64>(), 1.0));
}
