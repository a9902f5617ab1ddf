//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if any criterion failed.
//!
//! cargo test -p fiberwise --test acceptance -- --nocapture

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};

use fiberwise::base::{sample_base, BaseEnvironment, BasePoint, EnvKind, RandomInt, RandomScalar};
use fiberwise::disintegration::Disintegration;
use fiberwise::entropy::{brin_katok_estimate, theorem_a_consistency, ClauseStatus, EntropyParams, TheoremAParams};
use fiberwise::exact::{pow2_neg, q, Q};
use fiberwise::expansivity::{
    continuum_wise_check, expansive_diagnostic, implication_chain_test, SampleParams, Verdict,
};
use fiberwise::fiber::{FiberSpace, FiberSystem, Generator};
use fiberwise::invariant::{construct_invariant, pullback_identity_suite, ConstructParams};
use fiberwise::scenario::{builtin, builtin_chain_suite, pl_interval_system, skewed_start};

const LOG_2_3_MEAN: f64 = 0.895_879_734_614_027_5;

type Outcome = (bool, String);

fn fair() -> Arc<BaseEnvironment> {
    BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair coin").unwrap()
}

fn config(name: &str) -> fiberwise::scenario::ScenarioConfig {
    builtin(name).unwrap().config()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_cylinder_masses() -> Outcome {
    let env = fair();
    let sys = FiberSystem::new(FiberSpace::Symbolic { alphabet: RandomInt::Constant(2) }, Generator::Shift, false).unwrap();
    let mu = Disintegration::UniformProduct.measure_at(&sys, &BasePoint::seeded(&env, 1)).unwrap();
    let target = pow2_neg(10);
    let mut total = Q::zero();
    let mut exact = true;
    for bits in 0u32..1024 {
        let word: Vec<u32> = (0..10).map(|i| 1 + ((bits >> i) & 1)).collect();
        let m = mu.cylinder_mass(&word).unwrap();
        exact &= m == target;
        total += m;
    }
    (exact && total.is_one(), format!("1024 masses equal 2^-10: {exact}, sum = {total}"))
}

fn c2_random_shift_decay() -> Outcome {
    let cfg = config("example1_random_shift");
    let env = cfg.environment().unwrap();
    let mut p = SampleParams::new(16, 100, 1, 2024);
    p.adversarial = false;
    let rep = expansive_diagnostic(&env, &cfg.system, &cfg.disintegration, &cfg.delta, &p).unwrap();
    let bound = pow2_neg(12);
    let worst = rep
        .samples
        .iter()
        .filter_map(|s| s.rows.iter().find(|r| r.depth == 16))
        .map(|r| r.upper.as_ref().and_then(|m| m.exact().cloned()).unwrap_or_else(Q::one))
        .max()
        .unwrap_or_else(Q::one);
    let rate = rep.decay_rate.unwrap_or(f64::NAN);
    let ok = rep.samples.len() == 100 && worst <= bound && rel_err(rate, LOG_2_3_MEAN) <= 0.10;
    (ok, format!("max upper at n=16 = {worst}, decay rate {rate:.4} vs {LOG_2_3_MEAN:.4}, verdict {:?}", rep.verdict))
}

fn c3_isometry_refuted() -> Outcome {
    let cfg = config("example2_isometry");
    let env = cfg.environment().unwrap();
    let p = SampleParams::new(50, 10, 3, 7);
    let rep = expansive_diagnostic(&env, &cfg.system, &cfg.disintegration, &cfg.delta, &p).unwrap();
    let masses: Vec<f64> = rep
        .samples
        .iter()
        .filter(|s| s.refutes)
        .flat_map(|s| s.rows.iter())
        .flat_map(|r| [r.lower.as_ref(), r.upper.as_ref()])
        .map(|m| m.map_or(f64::NAN, |m| m.to_f64()))
        .collect();
    let lo = masses.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = masses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let in_band = !masses.is_empty() && masses.iter().all(|m| (0.09..=0.11).contains(m));
    let ok = rep.verdict == Verdict::Refuted && !rep.witnesses.is_empty() && in_band;
    (ok, format!("verdict {:?}, {} witnesses, masses over depths 1..=50 in [{lo:.5}, {hi:.5}]", rep.verdict, rep.witnesses.len()))
}

fn c4_expanding_entropy() -> Outcome {
    let cfg = config("example3_expanding");
    let env = cfg.environment().unwrap();
    let est = brin_katok_estimate(&env, &cfg.system, &cfg.disintegration, &EntropyParams::new(14, 500, 4)).unwrap();
    let ok = !est.failure && rel_err(est.estimate, LOG_2_3_MEAN) <= 0.05;
    (ok, format!("h = {:.4} ± {:.4} at the smallest radius, oracle {LOG_2_3_MEAN:.4}", est.estimate, est.half_width))
}

fn c5_theorem_a() -> Outcome {
    let cfg = config("example3_expanding");
    let env = cfg.environment().unwrap();
    let params = TheoremAParams::new(EntropyParams::new(14, 200, 5), 14, 50);
    let rep = theorem_a_consistency(&env, &cfg.system, &cfg.disintegration, &params).unwrap();
    let all = rep.clauses.iter().all(|c| c.status == ClauseStatus::Pass);
    let detail: Vec<String> = rep.clauses.iter().map(|c| format!("{}: {:?} ({})", c.name, c.status, c.detail)).collect();
    (all && rep.consistent, detail.join("; "))
}

fn c6_pullback_identity() -> Outcome {
    let env = fair();
    let sys = pl_interval_system();
    let delta = RandomScalar::constant(q(1, 10));
    let checks = pullback_identity_suite(&env, &sys, &delta, 6, 50, 6).unwrap();
    let passed = checks.iter().filter(|c| c.pass).count();
    let conflicts: usize = checks.iter().map(|c| c.conflicts).sum();
    (checks.len() == 50 && passed == 50, format!("{passed}/50 samples agree, {conflicts} conflicting cells"))
}

fn c7_construction() -> Outcome {
    let env = fair();
    let cfg = config("example1_random_shift");
    let mut expansive = SampleParams::new(12, 10, 2, 71);
    expansive.adversarial = true;
    let params = ConstructParams {
        n_max: 256,
        probe_depth: 8,
        base_samples: 20,
        seed: 7,
        delta: cfg.delta.clone(),
        expansive,
    };
    let rep = construct_invariant(&env, &cfg.system, &skewed_start(), &params).unwrap();
    let worst = rep
        .rows
        .iter()
        .map(|r| r.defect.to_f64() * r.n as f64)
        .fold(0.0, f64::max);
    let ok = rep.within_envelope && rep.final_verdict == Verdict::EvidenceFor;
    (
        ok,
        format!(
            "orders {:?}, {} defect rows, max n·defect = {worst:.4} (bound 2), order-256 verdict {:?}",
            rep.orders,
            rep.rows.len(),
            rep.final_verdict
        ),
    )
}

fn c8_continuum_escape() -> Outcome {
    let cfg = config("example4_continuum_mix");
    let env = cfg.environment().unwrap();
    let delta = RandomScalar::constant(q(1, 10));
    let mut escaped = 0;
    for (i, w) in sample_base(&env, 100, 8).iter().enumerate() {
        let a = (i as f64 * 0.618_033_988_749_894_9).fract() * 0.99;
        if continuum_wise_check(&cfg.system, w, (a, a + 1e-3), &delta, 200).unwrap().is_some() {
            escaped += 1;
        }
    }
    let ones = BasePoint::pinned(&env, &[1]).unwrap();
    let t = continuum_wise_check(&cfg.system, &ones, (0.3, 0.301), &delta, 200).unwrap();
    let t_dyadic = continuum_wise_check(&cfg.system, &ones, (0.3, 0.3 + 2f64.powi(-10)), &delta, 200).unwrap();
    let ok = escaped == 100 && t == Some(7) && t_dyadic == Some(7);
    (ok, format!("{escaped}/100 segments escape within 200 steps; all-ones escape time {t:?} (length 2^-10: {t_dyadic:?})"))
}

fn c9_implication_chain() -> Outcome {
    let outcomes = implication_chain_test(&builtin_chain_suite(9)).unwrap();
    let violations: Vec<String> = outcomes.iter().flat_map(|o| o.violations.iter().cloned()).collect();
    let summary: Vec<String> = outcomes
        .iter()
        .map(|o| format!("{} {:?}/{:?}/{:?} over {:?}", o.name, o.expansive, o.countable, o.continuum_wise, o.per_disintegration))
        .collect();
    let ok = outcomes.len() == 4 && outcomes.iter().all(|o| o.pass) && violations.is_empty();
    (ok, format!("{}; violations: {violations:?}", summary.join("; ")))
}

fn c10_deterministic_reduction() -> Outcome {
    let env = BaseEnvironment::singleton();
    let sys =
        FiberSystem::new(FiberSpace::Circle, Generator::ExpandingCircle { degree: RandomInt::Constant(2) }, false).unwrap();
    let dis = Disintegration::Lebesgue { resolution: 64 };
    let delta = RandomScalar::constant(q(1, 20));
    let rep = expansive_diagnostic(&env, &sys, &dis, &delta, &SampleParams::new(14, 4, 10, 10)).unwrap();
    let est = brin_katok_estimate(&env, &sys, &dis, &EntropyParams::new(14, 200, 10)).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let ok = rep.verdict == Verdict::EvidenceFor && !est.failure && rel_err(est.estimate, ln2) <= 0.05;
    (ok, format!("verdict {:?}, h = {:.4} vs log 2 = {ln2:.4}", rep.verdict, est.estimate))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 cylinder masses exact", c1_cylinder_masses),
        ("2 random shift decay", c2_random_shift_decay),
        ("3 isometry refuted", c3_isometry_refuted),
        ("4 expanding entropy", c4_expanding_entropy),
        ("5 entropy/expansivity consistency", c5_theorem_a),
        ("6 pullback identity", c6_pullback_identity),
        ("7 invariant construction", c7_construction),
        ("8 continuum-wise escape", c8_continuum_escape),
        ("9 implication chain", c9_implication_chain),
        ("10 deterministic reduction", c10_deterministic_reduction),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let started = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        println!("{} [{name}] ({secs:.1}s) {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
