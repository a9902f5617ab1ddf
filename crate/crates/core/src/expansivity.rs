//! The expansivity diagnostics: random (positively) expansive measures, countable
//! expansivity, continuum-wise expansivity, w-stable class masses, and the implication chain.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{derive_seed, sample_base, BaseEnvironment, BasePoint, RandomScalar};
use crate::disintegration::Disintegration;
use crate::error::{Error, Result};
use crate::exact::Mass;
use crate::fiber::{frac, FiberMap, FiberPoint, FiberSpace, FiberSystem, SymbolWord};
use crate::gamma::{gamma_mass, gamma_sequence, gamma_windows, GammaParams, GammaSetApprox, Sided};
use crate::measure::sample_fiber;
use crate::stats::{fit_line, mean};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    RandomExpansive,
    PositivelyRandomExpansive,
    CountablyExpansive,
    ContinuumWise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EvidenceFor,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// A fitted log-mass slope at or below this counts as geometric decay.
    pub slope: f64,
    /// Bound on `1 - R²` of the pooled log-mass curve.
    pub residual: f64,
    /// Certified lower bounds at or above this count toward refutation.
    pub floor: f64,
    /// Number of final depths over which a lower bound must persist.
    pub persist: usize,
    /// Largest piece count still treated as bounded.
    pub count_cap: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { slope: -0.05, residual: 0.1, floor: 1e-6, persist: 5, count_cap: 64 }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleParams {
    pub depth: usize,
    pub base_samples: usize,
    pub fiber_samples: usize,
    pub seed: u64,
    /// Defaults to two-sided for invertible systems and forward otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sided: Option<Sided>,
    #[serde(default = "default_true")]
    pub adversarial: bool,
    #[serde(default)]
    pub gamma: GammaParams,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl SampleParams {
    pub fn new(depth: usize, base_samples: usize, fiber_samples: usize, seed: u64) -> Self {
        SampleParams {
            depth,
            base_samples,
            fiber_samples,
            seed,
            sided: None,
            adversarial: true,
            gamma: GammaParams::default(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn sided_for(&self, sys: &FiberSystem) -> Sided {
        self.sided.unwrap_or(if sys.invertible { Sided::TwoSided } else { Sided::Forward })
    }

    /// Depths used for fitting: the second half of `1..=depth`.
    pub fn fit_range(&self) -> (usize, usize) {
        let lo = if self.depth < 4 { 1 } else { self.depth.div_ceil(2) };
        (lo, self.depth)
    }
}

/// One sampled pair (w, x).
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub index: usize,
    pub w: BasePoint,
    pub x: FiberPoint,
    pub adversarial: bool,
}

/// Fixed points, dyadic points and constant sequences that random sampling would miss.
pub fn adversarial_points(space: &FiberSpace) -> Vec<FiberPoint> {
    match space {
        FiberSpace::Symbolic { .. } => vec![
            FiberPoint::Symbolic(SymbolWord::constant(1)),
            FiberPoint::Symbolic(SymbolWord::constant(2)),
        ],
        FiberSpace::Circle | FiberSpace::Interval => {
            vec![FiberPoint::Real(0.0), FiberPoint::Real(0.5), FiberPoint::Real(0.25)]
        }
    }
}

/// `base_samples` base points, each with `fiber_samples` points drawn from μ_w (plus the
/// adversarial set when requested).
pub fn sample_points(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    dis: &Disintegration,
    params: &SampleParams,
) -> Result<Vec<SamplePoint>> {
    let mut out = Vec::new();
    for (i, w) in sample_base(env, params.base_samples, params.seed).into_iter().enumerate() {
        let mu = dis.measure_at(sys, &w)?;
        let seed = derive_seed(derive_seed(params.seed, i as u64), 1);
        for x in sample_fiber(&mu, params.fiber_samples, seed)? {
            out.push(SamplePoint { index: out.len(), w: w.clone(), x, adversarial: false });
        }
        if params.adversarial {
            for x in adversarial_points(&sys.space) {
                out.push(SamplePoint { index: out.len(), w: w.clone(), x, adversarial: true });
            }
        }
    }
    Ok(out)
}

/// Short human-readable label for a fiber point.
pub fn point_label(x: &FiberPoint) -> String {
    match x {
        FiberPoint::Real(v) => format!("{v}"),
        FiberPoint::Symbolic(word) => {
            let shown: Vec<String> = word.take(word.tail_start().min(12)).iter().map(|s| s.to_string()).collect();
            let period: Vec<String> = word.period().iter().map(|s| s.to_string()).collect();
            let dots = if word.tail_start() > 12 { "…" } else { "" };
            format!("{}{dots}({})^inf", shown.join(""), period.join(""))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthRow {
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Mass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Mass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub largest_piece: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_piece: Option<f64>,
}

impl DepthRow {
    fn masses(depth: usize, lower: Mass, upper: Mass) -> Self {
        DepthRow { depth, lower: Some(lower), upper: Some(upper), pieces: None, largest_piece: None, certified_piece: None }
    }

    fn pieces(depth: usize, g: &GammaSetApprox) -> Self {
        DepthRow {
            depth,
            lower: None,
            upper: None,
            pieces: Some(g.piece_count()),
            largest_piece: Some(g.largest_piece()),
            certified_piece: Some(g.largest_certified_piece()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub w: String,
    pub x: String,
    pub adversarial: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<DepthRow>,
    /// Fitted slope of the log quantity over the fit depths (absent once it reaches zero).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    pub reached_zero: bool,
    pub decays: bool,
    pub refutes: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_time: Option<i64>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub w: String,
    pub x: FiberPoint,
    /// Certified lower bounds over the final depths.
    pub lower_bounds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansivityReport {
    pub notion: Notion,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sided: Option<Sided>,
    pub depth: usize,
    pub fit_depths: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pooled_one_minus_r2: Option<f64>,
    pub samples: Vec<SampleRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExpansivityReport {
    pub fn witness_masses(&self) -> Vec<f64> {
        self.witnesses.iter().flat_map(|w| w.lower_bounds.iter().copied()).collect()
    }
}

struct Curve {
    slope: Option<f64>,
    reached_zero: bool,
    decays: bool,
}

/// Decay analysis of a positive quantity over the fit depths.
fn analyse_decay(depths: &[usize], values: &[f64], fit: (usize, usize), th: &Thresholds) -> Curve {
    let (xs, ys): (Vec<f64>, Vec<f64>) = depths
        .iter()
        .zip(values)
        .filter(|(d, _)| **d >= fit.0 && **d <= fit.1)
        .map(|(d, v)| (*d as f64, *v))
        .unzip();
    if ys.iter().any(|v| *v <= 0.0) {
        return Curve { slope: None, reached_zero: true, decays: true };
    }
    let logs: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let slope = fit_line(&xs, &logs).map(|f| f.slope);
    Curve { slope, reached_zero: false, decays: slope.is_some_and(|s| s <= th.slope) }
}

/// A certified quantity persists if it stays above the floor over the final depths without
/// geometric decay.
fn persists(values: &[f64], th: &Thresholds) -> bool {
    if values.len() < th.persist || th.persist == 0 {
        return false;
    }
    let tail = &values[values.len() - th.persist..];
    if tail.iter().any(|v| *v < th.floor) {
        return false;
    }
    let xs: Vec<f64> = (0..tail.len()).map(|i| i as f64).collect();
    let logs: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    fit_line(&xs, &logs).is_none_or(|f| f.slope > th.slope)
}

fn pooled_residual(samples: &[(Vec<usize>, Vec<f64>)], fit: (usize, usize)) -> Option<f64> {
    let live: Vec<&(Vec<usize>, Vec<f64>)> = samples
        .iter()
        .filter(|(d, v)| d.iter().zip(v).all(|(d, v)| *d < fit.0 || *d > fit.1 || *v > 0.0))
        .collect();
    if live.is_empty() {
        return None;
    }
    let depths: Vec<usize> = (fit.0..=fit.1).collect();
    let curve: Vec<f64> = depths
        .iter()
        .map(|d| {
            mean(
                &live
                    .iter()
                    .filter_map(|(ds, vs)| ds.iter().position(|x| x == d).map(|i| vs[i].ln()))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let xs: Vec<f64> = depths.iter().map(|d| *d as f64).collect();
    fit_line(&xs, &curve).map(|f| 1.0 - f.r2)
}

/// Expansive-measure diagnostic: μ_w(Γ_δ(x,w)) (two-sided) or μ_w(Γ_δ^+(x,w)) (forward).
pub fn expansive_diagnostic(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    dis: &Disintegration,
    delta: &RandomScalar,
    params: &SampleParams,
) -> Result<ExpansivityReport> {
    let sided = params.sided_for(sys);
    if sided == Sided::TwoSided && !sys.invertible {
        return Err(Error::NotInvertible(-1));
    }
    let points = sample_points(env, sys, dis, params)?;
    let th = params.thresholds;
    let fit = params.fit_range();
    let per_sample: Vec<(SampleRecord, Vec<usize>, Vec<f64>, Vec<f64>)> = points
        .par_iter()
        .map(|sp| {
            let mu = dis.measure_at(sys, &sp.w)?;
            let seq = gamma_sequence(sys, &sp.w, &sp.x, delta, params.depth, sided, params.gamma)?;
            let mut rows = Vec::with_capacity(seq.len());
            let (mut lows, mut ups) = (Vec::new(), Vec::new());
            for (i, g) in seq.iter().enumerate() {
                let (lo, hi) = gamma_mass(&mu, g)?;
                lows.push(lo.to_f64());
                ups.push(hi.to_f64());
                rows.push(DepthRow::masses(i + 1, lo, hi));
            }
            let depths: Vec<usize> = (1..=params.depth).collect();
            let curve = analyse_decay(&depths, &ups, fit, &th);
            let record = SampleRecord {
                w: sp.w.label(),
                x: point_label(&sp.x),
                adversarial: sp.adversarial,
                rows,
                slope: curve.slope,
                reached_zero: curve.reached_zero,
                decays: curve.decays,
                refutes: persists(&lows, &th),
                escape_time: None,
                truncated: seq.iter().any(|g| g.truncated),
            };
            Ok((record, depths, ups, lows))
        })
        .collect::<Result<_>>()?;

    let pooled = pooled_residual(
        &per_sample.iter().map(|(_, d, u, _)| (d.clone(), u.clone())).collect::<Vec<_>>(),
        fit,
    );
    let witnesses: Vec<Witness> = per_sample
        .iter()
        .zip(&points)
        .filter(|((r, ..), _)| r.refutes)
        .map(|((r, _, _, lows), sp)| Witness {
            w: r.w.clone(),
            x: sp.x.clone(),
            lower_bounds: lows.clone(),
        })
        .collect();
    let samples: Vec<SampleRecord> = per_sample.into_iter().map(|(r, ..)| r).collect();
    let rates: Vec<f64> = samples.iter().filter_map(|r| r.slope).map(|s| -s).collect();
    let all_decay = samples.iter().all(|r| r.decays);
    let verdict = if !witnesses.is_empty() {
        Verdict::Refuted
    } else if all_decay && pooled.is_none_or(|p| p <= th.residual) {
        Verdict::EvidenceFor
    } else {
        Verdict::Inconclusive
    };
    let mut notes = Vec::new();
    if !sys.invertible && params.sided.is_none() {
        notes.push("system is not invertible: forward Γ sets used".to_string());
    }
    Ok(ExpansivityReport {
        notion: if sided == Sided::Forward { Notion::PositivelyRandomExpansive } else { Notion::RandomExpansive },
        verdict,
        sided: Some(sided),
        depth: params.depth,
        fit_depths: fit,
        decay_rate: (!rates.is_empty()).then(|| mean(&rates)),
        pooled_one_minus_r2: pooled,
        truncated: samples.iter().any(|r| r.truncated),
        samples,
        witnesses,
        notes,
    })
}

/// Countable-expansivity diagnostic: growth of the piece count and size of Γ^{(n)}.
pub fn countable_diagnostic(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    sampling: &Disintegration,
    delta: &RandomScalar,
    params: &SampleParams,
) -> Result<ExpansivityReport> {
    let sided = params.sided_for(sys);
    let points = sample_points(env, sys, sampling, params)?;
    let th = params.thresholds;
    let fit = params.fit_range();
    let per_sample: Vec<(SampleRecord, Vec<f64>)> = points
        .par_iter()
        .map(|sp| {
            let seq = gamma_sequence(sys, &sp.w, &sp.x, delta, params.depth, sided, params.gamma)?;
            let rows: Vec<DepthRow> = seq.iter().enumerate().map(|(i, g)| DepthRow::pieces(i + 1, g)).collect();
            let depths: Vec<usize> = (1..=params.depth).collect();
            let scale: Vec<f64> = seq.iter().map(GammaSetApprox::largest_piece).collect();
            let certified: Vec<f64> = seq.iter().map(GammaSetApprox::largest_certified_piece).collect();
            let bounded = seq
                .iter()
                .enumerate()
                .filter(|(i, _)| i + 1 >= fit.0)
                .all(|(_, g)| g.piece_count() <= th.count_cap);
            let curve = analyse_decay(&depths, &scale, fit, &th);
            let record = SampleRecord {
                w: sp.w.label(),
                x: point_label(&sp.x),
                adversarial: sp.adversarial,
                rows,
                slope: curve.slope,
                reached_zero: curve.reached_zero,
                decays: bounded && curve.decays,
                refutes: persists(&certified, &th),
                escape_time: None,
                truncated: seq.iter().any(|g| g.truncated),
            };
            Ok((record, certified))
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<Witness> = per_sample
        .iter()
        .zip(&points)
        .filter(|((r, _), _)| r.refutes)
        .map(|((r, c), sp)| Witness { w: r.w.clone(), x: sp.x.clone(), lower_bounds: c.clone() })
        .collect();
    let samples: Vec<SampleRecord> = per_sample.into_iter().map(|(r, _)| r).collect();
    let rates: Vec<f64> = samples.iter().filter_map(|r| r.slope).map(|s| -s).collect();
    let verdict = if !witnesses.is_empty() {
        Verdict::Refuted
    } else if samples.iter().all(|r| r.decays) {
        Verdict::EvidenceFor
    } else {
        Verdict::Inconclusive
    };
    Ok(ExpansivityReport {
        notion: Notion::CountablyExpansive,
        verdict,
        sided: Some(sided),
        depth: params.depth,
        fit_depths: fit,
        decay_rate: (!rates.is_empty()).then(|| mean(&rates)),
        pooled_one_minus_r2: None,
        truncated: samples.iter().any(|r| r.truncated),
        samples,
        witnesses,
        notes: Vec::new(),
    })
}

/// An arc (circle) or interval tracked under the cocycle.
#[derive(Clone, Copy, Debug)]
struct Segment {
    start: f64,
    len: f64,
}

fn push_segment(f: FiberMap, s: Segment, circle: bool) -> Segment {
    if circle {
        if s.len >= 1.0 {
            return s;
        }
        let (a, len) = match f {
            FiberMap::Rotation { angle } => (s.start + angle, s.len),
            FiberMap::Expanding { degree } => (s.start * degree as f64, s.len * degree as f64),
            _ => (s.start, s.len),
        };
        Segment { start: frac(a), len: len.min(1.0) }
    } else {
        let image = |v: f64| match f.apply(&FiberPoint::Real(v)) {
            Ok(FiberPoint::Real(r)) => r,
            _ => v,
        };
        let (a, b) = (image(s.start), image(s.start + s.len));
        Segment { start: a.min(b), len: (b - a).abs() }
    }
}

fn diameter(s: Segment, circle: bool) -> f64 {
    if circle {
        s.len.min(0.5)
    } else {
        s.len
    }
}

/// Smallest |n| ≤ `max_n` with diam(f_w^n(D)) > δ(θ^n w), searching 0, 1, -1, 2, -2, …
/// (forward only for non-invertible systems).
pub fn continuum_wise_check(
    sys: &FiberSystem,
    w: &BasePoint,
    segment: (f64, f64),
    delta: &RandomScalar,
    max_n: usize,
) -> Result<Option<i64>> {
    if sys.space.is_symbolic() {
        return Err(Error::Incompatible("symbolic fibers contain no nontrivial continua".into()));
    }
    let (a, b) = segment;
    if b <= a {
        return Err(Error::InvalidSystem("segment must have positive length".into()));
    }
    let circle = sys.space.is_circle();
    let mut fwd = Segment { start: a, len: b - a };
    let mut bwd = fwd;
    if diameter(fwd, circle) > delta.at_f64(w, 0) {
        return Ok(Some(0));
    }
    for n in 1..=max_n as i64 {
        fwd = push_segment(sys.map_at(w, n - 1), fwd, circle);
        if diameter(fwd, circle) > delta.at_f64(w, n) {
            return Ok(Some(n));
        }
        if sys.invertible {
            let g = sys.map_at(w, -n).inverse().ok_or(Error::NotInvertible(-n))?;
            bwd = push_segment(g, bwd, circle);
            if diameter(bwd, circle) > delta.at_f64(w, -n) {
                return Ok(Some(-n));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumParams {
    pub segment: f64,
    pub max_n: usize,
    pub base_samples: usize,
    pub fiber_samples: usize,
    pub seed: u64,
}

/// Continuum-wise diagnostic over sampled base points and segments.
pub fn continuum_wise_diagnostic(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    delta: &RandomScalar,
    params: &ContinuumParams,
) -> Result<ExpansivityReport> {
    let mode = if sys.invertible { "two-sided search (n = 0, 1, -1, 2, -2, ...)" } else { "forward search" };
    if sys.space.is_symbolic() {
        return Ok(ExpansivityReport {
            notion: Notion::ContinuumWise,
            verdict: Verdict::EvidenceFor,
            sided: None,
            depth: params.max_n,
            fit_depths: (0, params.max_n),
            decay_rate: None,
            pooled_one_minus_r2: None,
            samples: Vec::new(),
            witnesses: Vec::new(),
            truncated: false,
            notes: vec!["symbolic fibers are totally disconnected: no nontrivial continua".into()],
        });
    }
    let sampling = SampleParams {
        adversarial: true,
        ..SampleParams::new(params.max_n, params.base_samples, params.fiber_samples, params.seed)
    };
    let reference = Disintegration::Lebesgue { resolution: 1 };
    let points = sample_points(env, sys, &reference, &sampling)?;
    let samples: Vec<SampleRecord> = points
        .par_iter()
        .map(|sp| {
            let x = sp.x.real().unwrap_or(0.0);
            let (a, b) = if sys.space.is_circle() {
                (x, x + params.segment)
            } else {
                let a = x.min(1.0 - params.segment).max(0.0);
                (a, a + params.segment)
            };
            let escape = continuum_wise_check(sys, &sp.w, (a, b), delta, params.max_n)?;
            Ok(SampleRecord {
                w: sp.w.label(),
                x: point_label(&sp.x),
                adversarial: sp.adversarial,
                rows: Vec::new(),
                slope: None,
                reached_zero: false,
                decays: escape.is_some(),
                refutes: escape.is_none(),
                escape_time: escape,
                truncated: false,
            })
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<Witness> = samples
        .iter()
        .zip(&points)
        .filter(|(r, _)| r.refutes)
        .map(|(r, sp)| Witness { w: r.w.clone(), x: sp.x.clone(), lower_bounds: vec![params.segment] })
        .collect();
    let verdict = if witnesses.is_empty() { Verdict::EvidenceFor } else { Verdict::Refuted };
    Ok(ExpansivityReport {
        notion: Notion::ContinuumWise,
        verdict,
        sided: None,
        depth: params.max_n,
        fit_depths: (0, params.max_n),
        decay_rate: None,
        pooled_one_minus_r2: None,
        samples,
        witnesses,
        truncated: false,
        notes: vec![format!("{mode}; refutation is limited to the horizon {}", params.max_n)],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableRow {
    pub i: usize,
    pub j: usize,
    pub depth: usize,
    pub upper: Mass,
}

/// Certified upper bounds for μ_w(⋂_{j≤k≤depth} f_w^{-k} B[f_w^k(p), γ_i]).
#[allow(clippy::too_many_arguments)]
pub fn stable_class_mass(
    sys: &FiberSystem,
    dis: &Disintegration,
    w: &BasePoint,
    p: &FiberPoint,
    gammas: &[RandomScalar],
    js: &[usize],
    depth: usize,
    params: GammaParams,
) -> Result<Vec<StableRow>> {
    let mu = dis.measure_at(sys, w)?;
    let mut rows = Vec::new();
    for (i, gamma) in gammas.iter().enumerate() {
        for &j in js.iter().filter(|j| **j <= depth) {
            for (step, g) in gamma_windows(sys, w, p, gamma, j, depth, params)?.iter().enumerate() {
                let (_, hi) = gamma_mass(&mu, g)?;
                rows.push(StableRow { i, j, depth: j + step, upper: hi });
            }
        }
    }
    Ok(rows)
}

/// Whether every `(i, j)` column of a stable-class table is strictly decreasing in depth.
pub fn strictly_decreasing(rows: &[StableRow]) -> bool {
    rows.windows(2)
        .filter(|p| p[0].i == p[1].i && p[0].j == p[1].j)
        .all(|p| p[1].upper.to_f64() < p[0].upper.to_f64())
}

/// One system of the implication-chain suite.
#[derive(Clone, Debug)]
pub struct ChainEntry {
    pub name: String,
    pub env: Arc<BaseEnvironment>,
    pub sys: FiberSystem,
    pub delta: RandomScalar,
    /// Non-atomic disintegrations of this fiber space; the first one drives the sampling.
    pub disintegrations: Vec<Disintegration>,
    pub expansive: SampleParams,
    pub continuum: ContinuumParams,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainOutcome {
    pub name: String,
    pub expansive: Verdict,
    pub countable: Verdict,
    pub continuum_wise: Verdict,
    /// Expansive verdict under each listed disintegration.
    pub per_disintegration: Vec<Verdict>,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// "expansive ⟹ countably-expansive ⟹ continuum-wise", and countable evidence ⟹ expansive
/// evidence for every non-atomic disintegration.
pub fn implication_chain_test(suite: &[ChainEntry]) -> Result<Vec<ChainOutcome>> {
    suite
        .iter()
        .map(|e| {
            if e.disintegrations.is_empty() || e.disintegrations.iter().any(Disintegration::is_atomic) {
                return Err(Error::InvalidMeasure(format!("{}: chain test needs non-atomic measures", e.name)));
            }
            let per: Vec<Verdict> = e
                .disintegrations
                .iter()
                .map(|d| expansive_diagnostic(&e.env, &e.sys, d, &e.delta, &e.expansive).map(|r| r.verdict))
                .collect::<Result<_>>()?;
            let expansive = per[0];
            let countable = countable_diagnostic(&e.env, &e.sys, &e.disintegrations[0], &e.delta, &e.expansive)?.verdict;
            let continuum = continuum_wise_diagnostic(&e.env, &e.sys, &e.delta, &e.continuum)?.verdict;
            let mut violations = Vec::new();
            if expansive == Verdict::EvidenceFor && countable != Verdict::EvidenceFor {
                violations.push(format!("expansive evidence but countable verdict {countable:?}"));
            }
            if countable == Verdict::EvidenceFor && continuum != Verdict::EvidenceFor {
                violations.push(format!("countable evidence but continuum-wise verdict {continuum:?}"));
            }
            if countable == Verdict::EvidenceFor {
                for (k, v) in per.iter().enumerate() {
                    if *v != Verdict::EvidenceFor {
                        violations.push(format!("countable evidence but disintegration {k} gives {v:?}"));
                    }
                }
            }
            Ok(ChainOutcome {
                name: e.name.clone(),
                expansive,
                countable,
                continuum_wise: continuum,
                per_disintegration: per,
                pass: violations.is_empty(),
                violations,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EnvKind, RandomInt};
    use crate::exact::q;
    use crate::fiber::Generator;
    use crate::measure::Atom;

    fn fair() -> Arc<BaseEnvironment> {
        BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair").unwrap()
    }

    fn mix() -> FiberSystem {
        FiberSystem::new(
            FiberSpace::Circle,
            Generator::Mixed {
                maps: vec![FiberMap::Rotation { angle: 0.6180339887498949 }, FiberMap::Expanding { degree: 2 }],
            },
            false,
        )
        .unwrap()
    }

    #[test]
    fn escape_time_on_all_ones() {
        let w = BasePoint::pinned(&fair(), &[1]).unwrap();
        let d = RandomScalar::constant(q(1, 10));
        let n = continuum_wise_check(&mix(), &w, (0.3, 0.3 + 2f64.powi(-10)), &d, 200).unwrap();
        assert_eq!(n, Some(7));
        let n = continuum_wise_check(&mix(), &w, (0.3, 0.45), &d, 200).unwrap();
        assert_eq!(n, Some(0));
    }

    #[test]
    fn rotations_never_escape() {
        let sys = FiberSystem::new(
            FiberSpace::Circle,
            Generator::Rotation { angle: RandomScalar::table(vec![q(618, 1000), q(414, 1000)]) },
            true,
        )
        .unwrap();
        let w = BasePoint::seeded(&fair(), 4);
        let d = RandomScalar::constant(q(1, 10));
        assert_eq!(continuum_wise_check(&sys, &w, (0.2, 0.25), &d, 500).unwrap(), None);
    }

    #[test]
    fn atom_at_fixed_point_refutes() {
        let env = BaseEnvironment::singleton();
        let sys = FiberSystem::new(FiberSpace::Circle, Generator::ExpandingCircle { degree: RandomInt::Constant(2) }, false)
            .unwrap();
        let dis = Disintegration::Atomic { atoms: vec![Atom { point: FiberPoint::Real(0.0), weight: 1.0 }] };
        let mut params = SampleParams::new(10, 2, 3, 1);
        params.adversarial = false;
        let rep = expansive_diagnostic(&env, &sys, &dis, &RandomScalar::constant(q(1, 20)), &params).unwrap();
        assert_eq!(rep.verdict, Verdict::Refuted);
        assert!(rep.witness_masses().iter().all(|m| *m == 1.0));
    }

    #[test]
    fn vacuous_delta_refutes_countable_on_two_symbols() {
        let env = fair();
        let sys =
            FiberSystem::new(FiberSpace::Symbolic { alphabet: RandomInt::Constant(2) }, Generator::Shift, false).unwrap();
        let params = SampleParams::new(8, 2, 2, 3);
        let rep =
            countable_diagnostic(&env, &sys, &Disintegration::UniformProduct, &RandomScalar::constant(q(2, 1)), &params)
                .unwrap();
        assert_eq!(rep.verdict, Verdict::Refuted);
    }

    #[test]
    fn stable_class_single_constraint() {
        let env = fair();
        let sys = FiberSystem::new(FiberSpace::Circle, Generator::ExpandingCircle { degree: RandomInt::Constant(2) }, false)
            .unwrap();
        let w = BasePoint::seeded(&env, 1);
        let dis = Disintegration::Lebesgue { resolution: 64 };
        let rows = stable_class_mass(
            &sys,
            &dis,
            &w,
            &FiberPoint::Real(0.3),
            &[RandomScalar::constant(q(1, 20))],
            &[0, 1, 2],
            8,
            GammaParams::default(),
        )
        .unwrap();
        // depth = j: a single ball pulled back j times still has Lebesgue mass 0.1
        for r in rows.iter().filter(|r| r.depth == r.j) {
            assert!((r.upper.to_f64() - 0.1).abs() < 1e-9, "{r:?}");
        }
        assert!(strictly_decreasing(&rows));
    }
}
