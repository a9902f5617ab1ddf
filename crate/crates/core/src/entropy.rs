//! Brin–Katok fiber entropy: φ_δ(w,x) = liminf −log μ_w(B_w[x,δ,n]) / n, its estimator,
//! closed-form oracles, and the entropy/expansivity consistency check.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{BaseEnvironment, BasePoint, RandomScalar};
use crate::disintegration::Disintegration;
use crate::error::{Error, Result};
use crate::exact::{from_f64, q, Mass};
use crate::expansivity::{
    expansive_diagnostic, point_label, sample_points, stable_class_mass, strictly_decreasing, SampleParams,
    SamplePoint, Verdict,
};
use crate::fiber::{FiberPoint, FiberSpace, FiberSystem, Generator};
use crate::gamma::{gamma_mass, gamma_sequence, GammaParams, Sided};
use crate::stats::{fit_line, mean, std_dev};

/// Estimates above this are reported as estimation failures.
pub const ENTROPY_CAP: f64 = 50.0;

/// μ_w(B_w[x,δ,n]) for `n = 1..=n_max`, as certified brackets.
pub fn bowen_mass_sequence(
    sys: &FiberSystem,
    dis: &Disintegration,
    w: &BasePoint,
    x: &FiberPoint,
    delta: &RandomScalar,
    n_max: usize,
    params: GammaParams,
) -> Result<Vec<(Mass, Mass)>> {
    let mu = dis.measure_at(sys, w)?;
    gamma_sequence(sys, w, x, delta, n_max, Sided::Forward, params)?
        .iter()
        .map(|g| gamma_mass(&mu, g))
        .collect()
}

/// Five constant radii halving from a quarter of the fiber diameter.
pub fn default_ladder(space: &FiberSpace) -> Vec<RandomScalar> {
    let top = from_f64(space.diameter() / 4.0).unwrap_or_else(|| q(1, 8));
    (0..5).map(|i| RandomScalar::constant(&top / q(1 << i, 1))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyParams {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    /// Constant or random radii; defaults to [`default_ladder`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<RandomScalar>>,
    #[serde(default)]
    pub gamma: GammaParams,
}

impl EntropyParams {
    pub fn new(n_max: usize, samples: usize, seed: u64) -> Self {
        EntropyParams { n_max, samples, seed, ladder: None, gamma: GammaParams::default() }
    }

    pub fn ladder_for(&self, space: &FiberSpace) -> Vec<RandomScalar> {
        self.ladder.clone().unwrap_or_else(|| default_ladder(space))
    }

    /// The tail window `[n_max/2, n_max]`.
    pub fn tail(&self) -> (usize, usize) {
        ((self.n_max / 2).max(1), self.n_max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropySample {
    pub w: String,
    pub x: String,
    /// `−log(upper mass)/n` for `n = 1, 2, …` up to the last representable depth.
    pub values: Vec<f64>,
    /// Minimum of `values` over the tail window.
    pub phi: f64,
    /// Least-squares slope of `−log(upper mass)` over the tail window.
    pub slope: f64,
    pub underflow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderStep {
    pub delta: RandomScalar,
    pub estimate: f64,
    pub half_width: f64,
    pub mean_phi: f64,
    pub samples: Vec<EntropySample>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Estimate at the smallest ladder radius.
    pub estimate: f64,
    /// 95% normal half-width over samples.
    pub half_width: f64,
    pub delta: RandomScalar,
    /// `H = estimate / 2`.
    pub threshold: f64,
    pub tail: (usize, usize),
    pub ladder: Vec<LadderStep>,
    pub underflow: bool,
    pub failure: bool,
}

impl EntropyEstimate {
    /// Fraction of samples with φ_{δ_k} > H, one value per ladder step.
    pub fn e_k_fractions(&self) -> Vec<f64> {
        self.ladder
            .iter()
            .map(|step| {
                let hits = step.samples.iter().filter(|s| s.phi > self.threshold).count();
                hits as f64 / step.samples.len().max(1) as f64
            })
            .collect()
    }
}

fn entropy_sample(
    sys: &FiberSystem,
    dis: &Disintegration,
    sp: &SamplePoint,
    delta: &RandomScalar,
    params: &EntropyParams,
) -> Result<EntropySample> {
    let masses = bowen_mass_sequence(sys, dis, &sp.w, &sp.x, delta, params.n_max, params.gamma)?;
    let mut logs = Vec::with_capacity(masses.len());
    let mut underflow = false;
    for (_, hi) in &masses {
        let l = -hi.ln();
        if !l.is_finite() {
            underflow = true;
            break;
        }
        logs.push(l.max(0.0));
    }
    let values: Vec<f64> = logs.iter().enumerate().map(|(i, l)| l / (i + 1) as f64).collect();
    let (lo, hi) = params.tail();
    let hi = hi.min(values.len());
    let window = if lo <= hi { lo..=hi } else { values.len().max(1)..=values.len().max(1) };
    let phi = window.clone().filter_map(|n| values.get(n - 1)).copied().fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = window.clone().map(|n| n as f64).collect();
    let ys: Vec<f64> = window.filter_map(|n| logs.get(n - 1)).copied().collect();
    let slope = if xs.len() == ys.len() { fit_line(&xs, &ys).map_or(0.0, |f| f.slope) } else { 0.0 };
    Ok(EntropySample {
        w: sp.w.label(),
        x: point_label(&sp.x),
        phi: if phi.is_finite() { phi } else { 0.0 },
        slope,
        values,
        underflow,
    })
}

/// Brin–Katok estimate of h_μ(f) along a δ-ladder, one (w, x) pair per sample.
pub fn brin_katok_estimate(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    dis: &Disintegration,
    params: &EntropyParams,
) -> Result<EntropyEstimate> {
    if params.n_max < 2 || params.samples == 0 {
        return Err(Error::Unsupported("entropy needs n_max ≥ 2 and at least one sample".into()));
    }
    let mut sampling = SampleParams::new(params.n_max, params.samples, 1, params.seed);
    sampling.adversarial = false;
    let points = sample_points(env, sys, dis, &sampling)?;
    let ladder = params.ladder_for(&sys.space);
    if ladder.is_empty() {
        return Err(Error::Unsupported("δ ladder is empty".into()));
    }
    let steps: Vec<LadderStep> = ladder
        .into_iter()
        .map(|delta| {
            let samples: Vec<EntropySample> = points
                .par_iter()
                .map(|sp| entropy_sample(sys, dis, sp, &delta, params))
                .collect::<Result<_>>()?;
            let slopes: Vec<f64> = samples.iter().map(|s| s.slope).collect();
            let phis: Vec<f64> = samples.iter().map(|s| s.phi).collect();
            Ok(LadderStep {
                delta,
                estimate: mean(&slopes),
                half_width: 1.96 * std_dev(&slopes) / (slopes.len() as f64).sqrt(),
                mean_phi: mean(&phis),
                samples,
            })
        })
        .collect::<Result<_>>()?;
    let last = steps.last().expect("ladder is nonempty");
    let underflow = steps.iter().flat_map(|s| &s.samples).any(|s| s.underflow);
    Ok(EntropyEstimate {
        estimate: last.estimate,
        half_width: last.half_width,
        delta: last.delta.clone(),
        threshold: last.estimate / 2.0,
        tail: params.tail(),
        failure: !last.estimate.is_finite() || last.estimate > ENTROPY_CAP,
        underflow,
        ladder: steps,
    })
}

/// Closed-form fiber entropy ∫ log deg(f_w) dℙ (∫ log k dℙ for the full random shift).
pub fn analytic_entropy_oracle(env: &BaseEnvironment, sys: &FiberSystem) -> Option<f64> {
    match (&sys.generator, &sys.space) {
        (Generator::Shift, FiberSpace::Symbolic { alphabet }) => Some(alphabet.integral(env, |k| (k as f64).ln())),
        (Generator::ExpandingCircle { degree }, _) => Some(degree.integral(env, |d| (d as f64).ln())),
        (Generator::Mixed { maps }, FiberSpace::Circle) if maps.iter().any(|m| m.degree().unwrap_or(1) > 1) => {
            Some(env.integrate(|s| maps[s as usize].degree().map_or(0.0, |d| (d as f64).ln())))
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clause {
    pub name: String,
    pub status: ClauseStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremAParams {
    pub entropy: EntropyParams,
    /// Depth of the positive-expansivity diagnostic.
    pub depth: usize,
    /// Base samples for the diagnostic and the stable-class tables.
    pub samples: usize,
    /// Estimates at or below this count as zero entropy.
    #[serde(default = "default_positive")]
    pub positive: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_stable_js")]
    pub stable_js: Vec<usize>,
    #[serde(default = "default_stable_depth")]
    pub stable_depth: usize,
}

fn default_positive() -> f64 {
    0.05
}

fn default_tolerance() -> f64 {
    0.05
}

fn default_stable_js() -> Vec<usize> {
    vec![0, 1, 2]
}

fn default_stable_depth() -> usize {
    8
}

impl TheoremAParams {
    pub fn new(entropy: EntropyParams, depth: usize, samples: usize) -> Self {
        TheoremAParams {
            entropy,
            depth,
            samples,
            positive: default_positive(),
            tolerance: default_tolerance(),
            stable_js: default_stable_js(),
            stable_depth: default_stable_depth(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremAReport {
    pub entropy: f64,
    pub half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
    pub clauses: Vec<Clause>,
    /// Radius at which positive expansivity was accepted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansive_delta: Option<RandomScalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    pub e_k_fractions: Vec<f64>,
    pub e_k_trend: bool,
    /// Base/fiber pairs whose stable-class table failed to decrease.
    pub witnesses: Vec<String>,
    pub consistent: bool,
}

/// Checks jointly: positive entropy, positive expansivity with decay rate at least ĥ/2, and
/// decaying stable-class tables.
pub fn theorem_a_consistency(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    dis: &Disintegration,
    params: &TheoremAParams,
) -> Result<TheoremAReport> {
    let est = brin_katok_estimate(env, sys, dis, &params.entropy)?;
    let h = est.estimate;
    let fractions = est.e_k_fractions();
    let trend = fractions.windows(2).all(|p| p[1] + 1e-9 >= p[0]);
    let mut clauses = vec![Clause {
        name: "positive_entropy".into(),
        status: if h > params.positive && !est.failure { ClauseStatus::Pass } else { ClauseStatus::Fail },
        detail: format!("h = {h:.6} ± {:.6}", est.half_width),
    }];
    let mut report = TheoremAReport {
        entropy: h,
        half_width: est.half_width,
        oracle: analytic_entropy_oracle(env, sys),
        clauses: Vec::new(),
        expansive_delta: None,
        decay_rate: None,
        e_k_fractions: fractions,
        e_k_trend: trend,
        witnesses: Vec::new(),
        consistent: true,
    };
    if clauses[0].status != ClauseStatus::Pass {
        for name in ["positive_expansive", "stable_classes"] {
            clauses.push(Clause {
                name: name.into(),
                status: ClauseStatus::NotApplicable,
                detail: "entropy is not positive".into(),
            });
        }
        report.clauses = clauses;
        return Ok(report);
    }

    let ladder = params.entropy.ladder_for(&sys.space);
    let mut diag = SampleParams::new(params.depth, params.samples, 1, params.entropy.seed);
    diag.sided = Some(Sided::Forward);
    diag.gamma = params.entropy.gamma;
    let mut found = None;
    let mut tried = Vec::new();
    for delta in &ladder {
        let rep = expansive_diagnostic(env, sys, dis, delta, &diag)?;
        let rate = rep.decay_rate.unwrap_or(f64::INFINITY);
        tried.push(format!("{:?}/{rate:.4}", rep.verdict));
        if rep.verdict == Verdict::EvidenceFor && rate >= h / 2.0 - params.tolerance {
            found = Some((delta.clone(), rate));
            break;
        }
    }
    clauses.push(match &found {
        Some((_, rate)) => Clause {
            name: "positive_expansive".into(),
            status: ClauseStatus::Pass,
            detail: format!("decay rate {rate:.6} ≥ h/2 - {}", params.tolerance),
        },
        None => Clause {
            name: "positive_expansive".into(),
            status: ClauseStatus::Fail,
            detail: format!("no ladder radius passed: {}", tried.join(", ")),
        },
    });
    if let Some((d, r)) = found {
        report.expansive_delta = Some(d);
        report.decay_rate = Some(r);
    }

    let mut sampling = SampleParams::new(params.stable_depth, params.samples, 1, params.entropy.seed ^ 0x5a5a);
    sampling.adversarial = false;
    let points = sample_points(env, sys, dis, &sampling)?;
    let gammas: Vec<RandomScalar> = ladder.iter().take(3).cloned().collect();
    let failed: Vec<String> = points
        .par_iter()
        .map(|sp| {
            let rows = stable_class_mass(
                sys,
                dis,
                &sp.w,
                &sp.x,
                &gammas,
                &params.stable_js,
                params.stable_depth,
                params.entropy.gamma,
            )?;
            Ok((!strictly_decreasing(&rows)).then(|| format!("w={} x={}", sp.w.label(), point_label(&sp.x))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    clauses.push(Clause {
        name: "stable_classes".into(),
        status: if failed.is_empty() { ClauseStatus::Pass } else { ClauseStatus::Fail },
        detail: format!("{} of {} tables strictly decreasing", points.len() - failed.len(), points.len()),
    });
    report.consistent = clauses.iter().all(|c| c.status != ClauseStatus::Fail);
    report.witnesses = failed;
    report.clauses = clauses;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EnvKind, RandomInt};
    use crate::measure::Atom;

    fn doubling() -> FiberSystem {
        FiberSystem::new(FiberSpace::Circle, Generator::ExpandingCircle { degree: RandomInt::Constant(2) }, false)
            .unwrap()
    }

    #[test]
    fn doubling_ball_masses_halve() {
        let env = BaseEnvironment::singleton();
        let w = BasePoint::seeded(&env, 0);
        let seq = bowen_mass_sequence(
            &doubling(),
            &Disintegration::Lebesgue { resolution: 1 },
            &w,
            &FiberPoint::Real(0.3),
            &RandomScalar::constant(q(1, 20)),
            10,
            GammaParams::default(),
        )
        .unwrap();
        for (n, (lo, hi)) in seq.iter().enumerate() {
            let expect = 0.1 * 2f64.powi(-(n as i32));
            assert!((hi.to_f64() - expect).abs() < 1e-9 && lo.to_f64() <= hi.to_f64());
        }
    }

    #[test]
    fn oracle_values() {
        let env = BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair").unwrap();
        let sys = FiberSystem::new(
            FiberSpace::Circle,
            Generator::ExpandingCircle { degree: RandomInt::SymbolTable(vec![2, 3]) },
            false,
        )
        .unwrap();
        let h = analytic_entropy_oracle(&env, &sys).unwrap();
        assert!((h - (2f64.ln() + 3f64.ln()) / 2.0).abs() < 1e-12);
        let rot = FiberSystem::new(FiberSpace::Circle, Generator::Rotation { angle: RandomScalar::constant(q(1, 3)) }, true)
            .unwrap();
        assert_eq!(analytic_entropy_oracle(&env, &rot), None);
    }

    #[test]
    fn atom_has_zero_entropy() {
        let env = BaseEnvironment::singleton();
        let dis = Disintegration::Atomic { atoms: vec![Atom { point: FiberPoint::Real(0.0), weight: 1.0 }] };
        let est = brin_katok_estimate(&env, &doubling(), &dis, &EntropyParams::new(10, 5, 2)).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert!(!est.failure);
    }

    #[test]
    fn doubling_entropy_is_log_two() {
        let env = BaseEnvironment::singleton();
        let est =
            brin_katok_estimate(&env, &doubling(), &Disintegration::Lebesgue { resolution: 1 }, &EntropyParams::new(12, 20, 9))
                .unwrap();
        assert!((est.estimate - 2f64.ln()).abs() < 1e-9, "{}", est.estimate);
    }

    #[test]
    fn isometry_entropy_not_applicable() {
        let env = BaseEnvironment::singleton();
        let rot = FiberSystem::new(FiberSpace::Circle, Generator::Rotation { angle: RandomScalar::constant(q(1, 7)) }, true)
            .unwrap();
        let p = TheoremAParams::new(EntropyParams::new(10, 8, 1), 10, 4);
        let rep = theorem_a_consistency(&env, &rot, &Disintegration::Lebesgue { resolution: 1 }, &p).unwrap();
        assert_eq!(rep.clauses[0].status, ClauseStatus::Fail);
        assert!(rep.clauses[1..].iter().all(|c| c.status == ClauseStatus::NotApplicable));
    }
}
