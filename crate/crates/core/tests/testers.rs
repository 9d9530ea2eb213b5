mod common;

use std::sync::Arc;

use common::*;
use hgut::oracle::{DistributionOracle, SignSampler};
use hgut::testers::{
    base_case_tester, base_sample_count, coarse_sample_count, coarse_test, mean_sample_count, mean_tester,
    projected_query_count, projected_test_mean, sub_cond_uni, Decision, TesterConfig,
};
use hgut::{Distribution, Error, GridShape};
use rand::{Rng, RngCore};

fn shape(d: &[usize]) -> GridShape {
    GridShape::new(d.to_vec()).unwrap()
}

fn oracle(p: &Arc<Distribution>, seed: u64) -> DistributionOracle {
    DistributionOracle::new(p.clone(), seed)
}

/// Independent coordinates with `P(+1) = (1 + mu_i) / 2`.
struct Biased(Vec<f64>);

impl SignSampler for Biased {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn next_point(&mut self, rng: &mut dyn RngCore) -> hgut::Result<Vec<i8>> {
        Ok(self
            .0
            .iter()
            .map(|&mu| if rng.random_bool((1.0 + mu) / 2.0) { 1 } else { -1 })
            .collect())
    }
}

fn rate(trials: u64, mut run: impl FnMut(u64) -> Decision) -> f64 {
    (0..trials).filter(|&s| run(s).is_accept()).count() as f64 / trials as f64
}

#[test]
fn mean_tester_on_fair_and_biased_streams() {
    let cfg = TesterConfig {
        mean_mult: 50.0,
        ..TesterConfig::practical()
    };
    let acc = rate(200, |s| {
        mean_tester(&mut Biased(vec![0.0; 64]), 0.5, &cfg.clone().with_seed(s))
            .unwrap()
            .decision
    });
    assert!(acc >= 0.9, "fair stream accept rate {acc}");

    let acc = rate(200, |s| {
        mean_tester(&mut Biased(vec![0.5; 64]), 0.5, &cfg.clone().with_seed(s))
            .unwrap()
            .decision
    });
    assert!(acc <= 0.1, "biased stream accept rate {acc}");

    let v = mean_tester(&mut Biased(vec![1.0; 64]), 0.5, &cfg).unwrap();
    assert_eq!(v.decision, Decision::Reject);
    assert_eq!(v.ledger.total as usize, mean_sample_count(64, 0.5, &cfg).unwrap());
}

#[test]
fn sample_counts_follow_their_formulas() {
    let cfg = TesterConfig::practical();
    let n = 64usize;
    let want = (8.0 * (1.0 / (0.25f64.powi(2) * 8.0)).max(1.0 / 0.25)).ceil() as usize;
    assert_eq!(mean_sample_count(n, 0.25, &cfg).unwrap(), want);
    let s = shape(&[3, 3, 3]);
    assert_eq!(coarse_sample_count(&s, &cfg), (40.0 * 3.0 * 10f64.ln()).ceil() as usize);
    assert_eq!(
        base_sample_count(27, 0.5, &cfg).unwrap(),
        (4.0 * 27f64.sqrt() / 0.25).ceil() as usize
    );
    assert!(base_sample_count(27, 1.5, &cfg).is_err());
}

#[test]
fn coarse_test_completeness_and_soundness() {
    let cfg = TesterConfig::practical();
    let u = Arc::new(Distribution::uniform_product(shape(&[3, 3, 3])));
    let acc = rate(200, |s| coarse_test(&mut oracle(&u, s), &cfg).unwrap().decision);
    assert!(acc >= 1.0 - 1.0 / 3.0, "uniform coarse accept rate {acc}");

    let third = vec![1.0 / 3.0; 3];
    let miss =
        Arc::new(Distribution::product(shape(&[3, 3, 3]), vec![third.clone(), vec![0.0, 0.5, 0.5], third]).unwrap());
    for s in 0..20 {
        assert_eq!(
            coarse_test(&mut oracle(&miss, s), &cfg).unwrap().decision,
            Decision::Reject
        );
    }
}

#[test]
fn projected_mean_completeness_soundness_and_accounting() {
    let cfg = TesterConfig::practical();
    let s = shape(&[3, 3, 3, 3]);
    let u = Arc::new(Distribution::uniform_product(s.clone()));
    let eps = 0.25;
    let want = projected_query_count(&s, eps, &cfg).unwrap();
    let mut accepts = 0;
    for seed in 0..30 {
        let v = projected_test_mean(&mut oracle(&u, seed), eps, &cfg.clone().with_seed(seed)).unwrap();
        if v.is_accept() {
            accepts += 1;
            assert_eq!(v.ledger.total, want);
        }
    }
    assert!(accepts as f64 / 30.0 >= 2.0 / 3.0, "accepts {accepts}/30");

    let third = vec![1.0 / 3.0; 3];
    let miss = Arc::new(
        Distribution::product(
            s.clone(),
            vec![vec![0.0, 0.5, 0.5], third.clone(), third.clone(), third.clone()],
        )
        .unwrap(),
    );
    let skew = Arc::new(Distribution::product(s, vec![vec![0.6, 0.2, 0.2]; 4]).unwrap());
    for seed in 0..10 {
        let c = cfg.clone().with_seed(seed);
        assert_eq!(
            projected_test_mean(&mut oracle(&miss, seed), eps, &c).unwrap().decision,
            Decision::Reject
        );
        assert_eq!(
            projected_test_mean(&mut oracle(&skew, seed), eps, &c).unwrap().decision,
            Decision::Reject
        );
    }
}

#[test]
fn collision_tester_cases() {
    let cfg = TesterConfig::practical();
    let u = Arc::new(Distribution::uniform_product(shape(&[2, 2])));
    let acc = rate(100, |s| {
        base_case_tester(&mut oracle(&u, s), 0.25, &cfg).unwrap().decision
    });
    assert!(acc >= 0.9, "uniform (2,2) accept rate {acc}");
    let v = base_case_tester(&mut oracle(&u, 0), 0.25, &cfg).unwrap();
    assert_eq!(v.ledger.total as usize, base_sample_count(4, 0.25, &cfg).unwrap());

    let pm = Arc::new(Distribution::point_mass(shape(&[2, 2]), &[1, 0]).unwrap());
    assert_eq!(
        base_case_tester(&mut oracle(&pm, 1), 0.25, &cfg).unwrap().decision,
        Decision::Reject
    );
}

#[test]
fn eps_range_is_enforced() {
    let cfg = TesterConfig::practical();
    let u = Arc::new(Distribution::uniform_product(shape(&[3, 3])));
    for eps in [0.0, -0.1, 0.51, 1.0, f64::NAN] {
        assert!(matches!(
            sub_cond_uni(&mut oracle(&u, 0), eps, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }
    assert!(sub_cond_uni(&mut oracle(&u, 0), 0.5, &cfg).is_ok());
}

#[test]
fn full_support_inputs_never_hit_empty_subcubes() {
    let cfg = TesterConfig::practical();
    let mut r = rng(3);
    for (k, d) in [vec![3, 3, 3], vec![2, 3, 2, 3], vec![4, 4]].into_iter().enumerate() {
        let size = d.iter().product();
        for j in 0..5 {
            let p = Arc::new(Distribution::dense(shape(&d), bounded(size, 0.3, 1.7, &mut r)).unwrap());
            let seed = (10 * k + j) as u64;
            let res = sub_cond_uni(&mut oracle(&p, seed), 0.25, &cfg.clone().with_seed(seed));
            assert!(res.is_ok(), "{res:?}");
        }
    }
}

#[test]
fn recursion_depth_and_ledger_on_product_instance() {
    let cfg = TesterConfig::practical();
    let u = Arc::new(Distribution::uniform_product(shape(&[2; 16])));
    assert!(cfg.main_case(16, 0.25));
    let v = sub_cond_uni(&mut oracle(&u, 7), 0.25, &cfg.clone().with_seed(7)).unwrap();
    assert!(v.depth_max >= 1 && v.depth_max <= 4, "depth {}", v.depth_max);
    assert_eq!(v.ledger.by_depth.iter().sum::<u64>(), v.ledger.total);
    assert_eq!(v.ledger.by_phase.values().sum::<u64>(), v.ledger.total);
    assert!(v.trace.iter().all(|e| e.depth <= v.depth_max));
}

#[test]
fn base_path_accounting_is_exact() {
    let cfg = TesterConfig::practical();
    let s = shape(&[3, 3, 3, 3]);
    assert!(!cfg.main_case(4, 0.1));
    let u = Arc::new(Distribution::uniform_product(s));
    let v = sub_cond_uni(&mut oracle(&u, 2), 0.1, &cfg).unwrap();
    assert_eq!(v.depth_max, 0);
    assert_eq!(v.ledger.total as usize, base_sample_count(81, 0.1, &cfg).unwrap());
}

#[test]
fn seeded_runs_are_reproducible() {
    let cfg = TesterConfig::practical().with_seed(11);
    let mut r = rng(4);
    let p = Arc::new(Distribution::dense(shape(&[3, 3, 3]), dirichlet(27, 1.0, &mut r)).unwrap());
    let a = sub_cond_uni(&mut oracle(&p, 5), 0.25, &cfg).unwrap();
    let b = sub_cond_uni(&mut oracle(&p, 5), 0.25, &cfg).unwrap();
    assert_eq!(a, b);
}
