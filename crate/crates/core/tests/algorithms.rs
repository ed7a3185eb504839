use prizeloop::algorithms::{
    classic_gamma, run_alg1, run_alg1_traced, run_exact, run_threshold_classic, run_tree2_pcst, run_tree2_pctsp_with,
    select_threshold_deterministic, Alg1Options, Mode,
};
use prizeloop::instance::{generate_instance, Family, Instance};
use prizeloop::lp::{solve_relaxation, Relaxation};
use prizeloop::oracle::exact_pctsp;
use prizeloop::Rational;

fn metric(seed: u64, n: usize) -> Instance {
    let fam = if seed % 2 == 0 { Family::Euclidean } else { Family::RandomMetric };
    let scale = [Rational::new(1, 4), Rational::one(), Rational::from_integer(3)][seed as usize % 3].clone();
    generate_instance(n, fam, &scale, seed).unwrap()
}

#[test]
fn sweep_is_sandwiched() {
    for seed in 0..10u64 {
        let inst = metric(seed, 6 + seed as usize % 4);
        let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
        let opt = exact_pctsp(&inst).unwrap().value;
        let r = select_threshold_deterministic(&inst, &sol, &Alg1Options::default()).unwrap();
        r.audit(&inst).unwrap();
        assert!(sol.objective <= opt, "seed {seed}");
        assert!(opt <= r.objective(), "seed {seed}");
        assert!(r.ratio <= 1.774, "seed {seed}: {}", r.ratio);
    }
}

#[test]
fn fixed_threshold_meets_bound_pointwise() {
    let inst = metric(4, 8);
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    for g in [Rational::new(1, 2), Rational::new(3, 4), Rational::one()] {
        let (r, t) = run_alg1_traced(&inst, &sol, &g, &Alg1Options::default()).unwrap();
        assert!(r.objective().to_f64() <= t.walk_value.to_f64() + t.join_cost.to_f64() + 1e-12);
        assert!(r.objective().to_f64() <= t.guarantee_bound * (1.0 + 1e-9));
        assert!(t.join_cost <= t.join_bound);
    }
}

#[test]
fn randomized_is_reproducible() {
    let inst = metric(7, 7);
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    let opts = Alg1Options { mode: Mode::Randomized, seed: 11, repeats: 8 };
    let a = run_alg1(&inst, &sol, &Rational::new(7, 10), &opts).unwrap();
    let b = run_alg1(&inst, &sol, &Rational::new(7, 10), &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn baselines_and_exact() {
    for seed in 20..26u64 {
        let inst = metric(seed, 7);
        let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
        let ex = run_exact(&inst, sol.objective.clone()).unwrap();
        let classic = run_threshold_classic(&inst, &sol, &classic_gamma()).unwrap();
        let t2 = run_tree2_pctsp_with(&inst, &sol).unwrap();
        for r in [&classic, &t2] {
            r.audit(&inst).unwrap();
            assert!(ex.objective() <= r.objective());
        }
        assert!(classic.ratio <= 2.5 + 1e-12);
    }
}

#[test]
fn pcst_within_factor_two() {
    for seed in 0..10u64 {
        let inst = generate_instance(6 + seed as usize % 5, Family::SparseGraph, &Rational::new(3, 2), seed).unwrap();
        let r = run_tree2_pcst(&inst).unwrap();
        r.audit(&inst).unwrap();
        let ex = run_exact(&inst, r.lp_value.clone()).unwrap();
        assert!(r.lp_value <= ex.objective());
        assert!(ex.objective() <= r.objective());
        assert!(r.ratio <= 2.0, "seed {seed}");
    }
}

#[test]
fn sweep_with_fractional_y() {
    let inst = generate_instance(12, Family::Euclidean, &Rational::from_integer(3), 139).unwrap();
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    assert!(sol.y.iter().any(|y| !y.is_integer()));
    let opt = exact_pctsp(&inst).unwrap().value;
    let r = select_threshold_deterministic(&inst, &sol, &Alg1Options::default()).unwrap();
    assert!(opt <= r.objective());
    assert!(r.objective() <= Rational::new(1774, 1000) * &sol.objective);
    for g in prizeloop::algorithms::threshold_candidates(&sol) {
        let (res, t) = run_alg1_traced(&inst, &sol, &g, &Alg1Options::default()).unwrap();
        assert!(res.objective().to_f64() <= t.guarantee_bound * (1.0 + 1e-12), "gamma {g}");
    }
}
