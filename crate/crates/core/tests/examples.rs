use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prizeloop::algorithms::constants::{integrate, sample_threshold, ThresholdSampler, DEFAULT_B, QUAD_TOL};
use prizeloop::algorithms::{
    classic_gamma, run_alg1, run_threshold_classic, run_tree2_pcst, run_tree2_pctsp, select_threshold_deterministic,
    threshold_candidates, tree2_bound, Alg1Options, Solution,
};
use prizeloop::instance::{generate_instance, Family, Instance, InstanceKind};
use prizeloop::lp::{solve_relaxation, Relaxation};
use prizeloop::oracle::exact_pcst;
use prizeloop::Rational;

fn with_penalty(inst: &Instance, p: Rational) -> Instance {
    let pen = (0..inst.n()).map(|v| if v == inst.root() { Rational::zero() } else { p.clone() }).collect();
    inst.with_penalties(pen).unwrap()
}

fn unit_triangle(p: i64) -> Instance {
    let n = 3;
    let dist = (0..n * n).map(|i| Some(if i / n == i % n { Rational::zero() } else { Rational::one() })).collect();
    let pen = vec![Rational::zero(), Rational::from_integer(p), Rational::from_integer(p)];
    Instance::new("tri", vec![1, 2, 3], 1, dist, pen, InstanceKind::MetricComplete).unwrap()
}

#[test]
fn huge_penalties_give_christofides_bound() {
    let inst = with_penalty(&generate_instance(9, Family::Euclidean, &Rational::one(), 3).unwrap(), Rational::from_integer(1000));
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    let r = run_alg1(&inst, &sol, &Rational::one(), &Alg1Options::default()).unwrap();
    let Solution::Cycle(c) = &r.solution else { panic!("expected a cycle") };
    assert_eq!(c.order.len(), 9);
    assert!(r.tour_cost <= Rational::new(3, 2) * &sol.objective);
}

#[test]
fn zero_penalties_stay_at_root() {
    let inst = with_penalty(&generate_instance(7, Family::RandomMetric, &Rational::one(), 5).unwrap(), Rational::zero());
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    for g in [Rational::one(), Rational::new(1, 3)] {
        let r = run_alg1(&inst, &sol, &g, &Alg1Options::default()).unwrap();
        assert_eq!(r.solution, Solution::Cycle(prizeloop::tour::Cycle::root_only(inst.root())));
        assert!(r.objective().is_zero());
    }
    let t = run_tree2_pctsp(&inst).unwrap();
    assert!(t.objective().is_zero());
    let g = with_penalty(&generate_instance(7, Family::SparseGraph, &Rational::one(), 5).unwrap(), Rational::zero());
    let p = run_tree2_pcst(&g).unwrap();
    assert_eq!(p.solution, Solution::Tree(vec![]));
    assert!(p.objective().is_zero());
}

#[test]
fn best_y_threshold_on_nine_vertices() {
    let inst = generate_instance(9, Family::Euclidean, &Rational::new(1, 2), 9).unwrap();
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    let best = select_threshold_deterministic(&inst, &sol, &Alg1Options::default()).unwrap();
    let g = Rational::from_f64_snapped(best.gamma.unwrap(), 1_000_000);
    let again = run_alg1(&inst, &sol, &g, &Alg1Options::default()).unwrap();
    assert_eq!(again.objective(), best.objective());
    assert!(best.objective() <= Rational::new(1774, 1000) * &sol.objective);
}

#[test]
fn integral_y_has_one_candidate() {
    let inst = generate_instance(8, Family::Euclidean, &Rational::one(), 2).unwrap();
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    assert!(sol.y.iter().all(|y| y.is_integer()));
    assert_eq!(threshold_candidates(&sol), vec![Rational::one()]);
}

#[test]
fn sweep_beats_classic_guarantee() {
    let inst = generate_instance(12, Family::Euclidean, &Rational::from_integer(3), 139).unwrap();
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    let classic = run_threshold_classic(&inst, &sol, &classic_gamma()).unwrap();
    let best = select_threshold_deterministic(&inst, &sol, &Alg1Options::default()).unwrap();
    assert!(classic.ratio <= 2.5);
    assert!(best.ratio < 1.774);
}

#[test]
fn ten_vertex_batch() {
    let worst = (0..50u64)
        .map(|s| {
            let fam = if s % 2 == 0 { Family::Euclidean } else { Family::RandomMetric };
            let inst = generate_instance(10, fam, &Rational::new(1 + s as i64 % 4, 4), 300 + s).unwrap();
            let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
            select_threshold_deterministic(&inst, &sol, &Alg1Options::default()).unwrap().ratio
        })
        .fold(0.0, f64::max);
    assert!(worst < 1.774, "{worst}");
}

#[test]
fn threshold_samples() {
    let s = ThresholdSampler::new(DEFAULT_B).unwrap();
    assert!((s.cdf(1.0) - 1.0).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    const N: usize = 100_000;
    let xs: Vec<f64> = (0..N).map(|_| s.sample(&mut rng)).collect();
    assert!(xs.iter().all(|&g| (DEFAULT_B..=1.0).contains(&g)));
    let b = DEFAULT_B;
    let (i_b, _) = integrate(&|g| (-b / g).exp(), b, 1.0, QUAD_TOL).unwrap();
    let (m1, _) = integrate(&|g| g * (-b / g).exp(), b, 1.0, QUAD_TOL).unwrap();
    let want = m1 / i_b;
    let mean = xs.iter().sum::<f64>() / N as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (N - 1) as f64).sqrt();
    assert!((mean - want).abs() <= 3.0 * sd / (N as f64).sqrt(), "mean {mean} vs {want}");
    assert!(sample_threshold(0.5, &mut rng).is_err());
}

#[test]
fn tree2_examples() {
    let r = run_tree2_pctsp(&unit_triangle(10)).unwrap();
    assert_eq!(r.tour_cost, Rational::from_integer(3));
    assert!(r.objective() <= Rational::from_integer(6));

    let inst = generate_instance(8, Family::RandomMetric, &Rational::new(1, 2), 8).unwrap();
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
    let r = prizeloop::algorithms::run_tree2_pctsp_with(&inst, &sol).unwrap();
    let bound = &sol.cost_part(&inst) * Rational::from_integer(2) + sol.penalty_part(&inst);
    assert_eq!(bound, tree2_bound(&inst, &sol));
    assert!(r.objective() <= bound);
}

#[test]
fn pcst2_examples() {
    let n = 5;
    let mut dist = vec![None; n * n];
    for v in 0..n {
        dist[v * n + v] = Some(Rational::zero());
    }
    for v in 1..n {
        dist[v] = Some(Rational::from_integer(v as i64));
        dist[v * n] = Some(Rational::from_integer(v as i64));
    }
    let pen = (0..n).map(|v| Rational::from_integer(if v == 0 { 0 } else { 100 })).collect();
    let star = Instance::new("star", vec![1, 2, 3, 4, 5], 1, dist, pen, InstanceKind::GeneralGraph).unwrap();
    let r = run_tree2_pcst(&star).unwrap();
    assert_eq!(r.tour_cost, Rational::from_integer(10));
    assert!(r.penalty_cost.is_zero());

    let g = generate_instance(8, Family::SparseGraph, &Rational::one(), 13).unwrap();
    let r = run_tree2_pcst(&g).unwrap();
    let sol = solve_relaxation(&g, Relaxation::Pcst).unwrap();
    assert!(r.objective() <= tree2_bound(&g, &sol));
    assert!(r.objective() >= exact_pcst(&g).unwrap().value);
}
