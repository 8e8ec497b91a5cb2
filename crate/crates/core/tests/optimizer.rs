use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbath::illumination::{pce_max, transmission_eval, Band, TransmissionProfile};
use qbath::optimizer::{
    bound_violations, de_sweep, dominates, hypervolume, non_dominated, optimize_pareto, select_named_configs, DeConfig,
    EvalContext, Evaluator,
};
use qbath::Error;

fn brute_force_front(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        if pts.iter().any(|q| dominates(*q, *p)) {
            continue;
        }
        // duplicates collapse to one representative
        if pts[..i].contains(p) {
            continue;
        }
        out.push(*p);
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

#[test]
fn non_dominated_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..10_000 {
        let n = rng.random_range(1..40);
        // coarse grid forces ties and duplicates
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0..12) as f64 / 4.0, rng.random_range(0..12) as f64 / 4.0)).collect();
        let keys: Vec<usize> = (0..n).collect();
        let mut got: Vec<(f64, f64)> = non_dominated(&pts, &keys).iter().map(|&i| pts[i]).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert_eq!(got, brute_force_front(&pts), "case {case}: {pts:?}");
    }
}

#[test]
fn surrogate_front_hypervolume() {
    // f1 = x1, f2 = 1 - x1^2, extra coordinates inert; exact HV w.r.t. (0,0) is 2/3
    let lower = vec![0.0; 4];
    let upper = vec![1.0; 4];
    let cfg = DeConfig::new(20, 200, 5);
    let archive = de_sweep(&lower, &upper, &cfg, (1.0, 1.0), |x| Some((x[0], 1.0 - x[0] * x[0]))).unwrap();
    let pts: Vec<(f64, f64)> = archive.iter().map(|a| a.f).collect();
    let keys: Vec<usize> = (0..pts.len()).collect();
    let front: Vec<(f64, f64)> = non_dominated(&pts, &keys).iter().map(|&i| pts[i]).collect();
    let hv = hypervolume(&front, (0.0, 0.0));
    let exact = 2.0 / 3.0;
    assert!((hv - exact).abs() / exact < 0.02, "hv {hv} with {} front points", front.len());
}

#[test]
fn infeasible_points_never_reach_the_archive() {
    let cfg = DeConfig::new(10, 10, 3);
    let archive = de_sweep(&[0.0, 0.0], &[1.0, 1.0], &cfg, (1.0, 1.0), |x| (x[1] < 0.5).then_some((x[0], x[1]))).unwrap();
    assert!(!archive.is_empty());
    assert!(archive.iter().all(|a| a.x[1] < 0.5));
}

fn small_run(seed: u64) -> qbath::optimizer::ParetoFront {
    let ev = Evaluator::new(EvalContext::fmo_default()).unwrap();
    optimize_pareto(&ev, &DeConfig::new(10, 6, seed)).unwrap()
}

#[test]
fn fmo_front_members_are_feasible_and_mutually_non_dominated() {
    let ev = Evaluator::new(EvalContext::fmo_default()).unwrap();
    let front = optimize_pareto(&ev, &DeConfig::new(12, 8, 2)).unwrap();
    assert!(!front.members.is_empty());
    for m in &front.members {
        let o = &m.objectives;
        assert!(o.feasible && o.constraint_violations.is_empty());
        assert!(o.pce >= ev.ctx.pce_min);
        assert!(bound_violations(&m.design, &ev.ctx.bounds).is_empty());
        for k in 0..=3720 {
            let t = transmission_eval(280.0 + k as f64, &m.design);
            assert!((0.0..=1.0).contains(&t));
        }
        let again = ev.evaluate(&m.design).unwrap();
        assert_eq!(again.pce, o.pce);
        assert_eq!(again.etr, o.etr);
    }
    let objs = front.objectives();
    for (i, p) in objs.iter().enumerate() {
        for (j, q) in objs.iter().enumerate() {
            assert!(i == j || !dominates(*q, *p), "{q:?} dominates {p:?}");
        }
    }
    let named = select_named_configs(&front).unwrap();
    assert!(named.energy_focused.objectives.pce >= named.balanced.objectives.pce);
    assert!(named.agriculture_focused.objectives.etr >= named.balanced.objectives.etr);
}

#[test]
fn optimization_is_deterministic_per_seed() {
    let a = small_run(42);
    let b = small_run(42);
    assert_eq!(a, b);
    let c = small_run(43);
    assert_ne!(a.objectives(), c.objectives());
}

#[test]
fn opaque_filter_gives_zero_etr_and_maximal_pce() {
    let ev = Evaluator::new(EvalContext::fmo_default()).unwrap();
    let dark = TransmissionProfile::single(0.0, 700.0, 100.0).unwrap();
    let o = ev.evaluate(&dark).unwrap();
    assert_eq!(o.etr, 0.0);
    let pmax = pce_max(&ev.ctx.solar, &ev.ctx.pv).unwrap();
    assert!((o.pce - pmax).abs() < 1e-12);
}

#[test]
fn linear_response_matches_direct_propagation() {
    let ev = Evaluator::new(EvalContext::fmo_default()).unwrap();
    let d = TransmissionProfile::new(
        0.7,
        vec![Band { center_nm: 800.0, fwhm_nm: 120.0, weight: 0.6 }, Band { center_nm: 450.0, fwhm_nm: 80.0, weight: 0.4 }],
    )
    .unwrap();
    let fast = ev.evaluate(&d).unwrap();
    let direct = qbath::optimizer::evaluate_design(&d, &ev.ctx).unwrap();
    assert!((fast.etr - direct.etr).abs() < 1e-10 * direct.etr.max(1e-12));
}

#[test]
fn unreachable_pce_floor_is_reported() {
    let mut ctx = EvalContext::fmo_default();
    ctx.pce_min = 0.99;
    let ev = Evaluator::new(ctx).unwrap();
    assert!(matches!(optimize_pareto(&ev, &DeConfig::new(8, 2, 1)), Err(Error::EmptyFeasibleSet(_))));
}

#[test]
fn de_config_rejects_tiny_population() {
    assert!(DeConfig::new(4, 10, 0).validate().is_err());
    assert!(DeConfig::new(8, 0, 0).validate().is_err());
}
