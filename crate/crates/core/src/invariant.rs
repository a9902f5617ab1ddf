//! Invariant disintegrations by pullback Cesàro averaging, invariance defects, and the
//! Γ-set pullback identity.

use std::collections::HashSet;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{derive_seed, sample_base, BaseEnvironment, BasePoint, RandomScalar, Symbol};
use crate::disintegration::{cesaro_components, Disintegration};
use crate::error::{Error, Result};
use crate::exact::{q, Mass, Q};
use crate::expansivity::{expansive_diagnostic, point_label, ExpansivityReport, SampleParams, Verdict};
use crate::fiber::{frac, FiberMap, FiberPoint, FiberSpace, FiberSystem, Generator};
use crate::gamma::{gamma_approx, GammaCells, GammaParams, GammaSetApprox, Window};
use crate::measure::{
    average, measure_distance, pushforward, sample_fiber, tv_cylinder_by_depth, Distance, DistanceMode, FiberMeasure,
};

/// μ_{n,w} with its components.
#[derive(Clone, Debug)]
pub struct CesaroState {
    pub w: BasePoint,
    pub order: usize,
    /// Component `i` is `(f_{w_{-1}}∘⋯∘f_{w_{-i}})∗μ_{w_{-i}}`.
    pub components: Vec<FiberMeasure>,
    pub average: FiberMeasure,
    /// The component budget stopped the construction early.
    pub partial: bool,
}

impl CesaroState {
    /// Adds component `order` and re-averages.
    pub fn extend(&mut self, sys: &FiberSystem, dis: &Disintegration) -> Result<()> {
        let i = self.order as i64;
        let start = self.w.advance(-i);
        let mut mu = dis.measure_at(sys, &start)?;
        for s in 0..i {
            mu = pushforward(sys, &start.advance(s), &mu)?;
        }
        self.components.push(mu);
        self.order += 1;
        self.average = average(self.components.clone())?;
        Ok(())
    }
}

/// μ_{n,w}; at most `budget` components are built.
pub fn cesaro_average(
    sys: &FiberSystem,
    dis: &Disintegration,
    w: &BasePoint,
    n: usize,
    budget: usize,
) -> Result<CesaroState> {
    if n == 0 {
        return Err(Error::InvalidMeasure("Cesàro order must be at least 1".into()));
    }
    let take = n.min(budget.max(1));
    let components = cesaro_components(sys, dis, w, take)?;
    Ok(CesaroState {
        w: w.clone(),
        order: take,
        average: average(components.clone())?,
        components,
        partial: take < n,
    })
}

/// measure_distance(f_w∗μ_w, μ_{θ(w)}).
pub fn invariance_defect(
    sys: &FiberSystem,
    w: &BasePoint,
    mu_w: &FiberMeasure,
    mu_next: &FiberMeasure,
    mode: DistanceMode,
) -> Result<Distance> {
    measure_distance(&pushforward(sys, w, mu_w)?, mu_next, mode)
}

/// w ↦ f_{w_{-1}}∗μ_{w_{-1}}.
pub fn pullback_disintegration(dis: &Disintegration) -> Disintegration {
    Disintegration::Pullback { inner: Box::new(dis.clone()) }
}

fn default_probe() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructParams {
    pub n_max: usize,
    /// Largest cylinder depth compared in tv-cylinder mode.
    #[serde(default = "default_probe")]
    pub probe_depth: usize,
    pub base_samples: usize,
    pub seed: u64,
    pub delta: RandomScalar,
    /// Sampling for the expansivity verdicts of the start and of the final average.
    pub expansive: SampleParams,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectRow {
    pub w_id: usize,
    pub n: usize,
    /// Cylinder depth, or 0 for whole-space modes.
    pub depth: usize,
    pub defect: Distance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructReport {
    pub orders: Vec<usize>,
    pub rows: Vec<DefectRow>,
    /// Every defect is at most 2/n.
    pub within_envelope: bool,
    pub start_verdict: Verdict,
    pub hypothesis_met: bool,
    pub final_verdict: Verdict,
    pub final_report: ExpansivityReport,
    /// Order-`n_max` measures at the first few sampled base points.
    pub final_measures: Vec<FiberMeasure>,
}

impl ConstructReport {
    pub fn defect_csv(&self) -> String {
        let mut out = String::from("w_id,n,depth,defect\n");
        for r in &self.rows {
            let d = match &r.defect {
                Distance::Exact(v) => crate::exact::format_q(v),
                Distance::Approx(v) => v.to_string(),
            };
            out.push_str(&format!("{},{},{},{}\n", r.w_id, r.n, r.depth, d));
        }
        out
    }
}

/// Orders 1, 2, 4, … up to `n_max` (always including `n_max`).
pub fn doubling_orders(n_max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |n| n.checked_mul(2)).take_while(|n| *n <= n_max).collect();
    if v.last() != Some(&n_max) && n_max > 0 {
        v.push(n_max);
    }
    v
}

fn defect_rows(
    sys: &FiberSystem,
    dis: &Disintegration,
    w_id: usize,
    w: &BasePoint,
    orders: &[usize],
    probe: usize,
) -> Result<Vec<DefectRow>> {
    let n_max = *orders.last().unwrap_or(&1);
    // components at w, pushed once: the components of order i+1 at θ(w)
    let comps = cesaro_components(sys, dis, w, n_max)?;
    let pushed: Vec<FiberMeasure> = comps.iter().map(|m| pushforward(sys, w, m)).collect::<Result<_>>()?;
    let next = w.advance(1);
    let head = dis.measure_at(sys, &next)?;
    let mut rows = Vec::new();
    for &n in orders {
        let lhs = average(pushed[..n].to_vec())?;
        let mut parts = vec![head.clone()];
        parts.extend(pushed[..n - 1].iter().cloned());
        let rhs = average(parts)?;
        match (&lhs, &rhs) {
            (FiberMeasure::Cylinder(_), FiberMeasure::Cylinder(_)) => {
                for (d, v) in tv_cylinder_by_depth(&lhs, &rhs, probe)?.into_iter().enumerate().skip(1) {
                    rows.push(DefectRow { w_id, n, depth: d, defect: Distance::Exact(v) });
                }
            }
            (FiberMeasure::Grid(_), _) => {
                rows.push(DefectRow { w_id, n, depth: 0, defect: measure_distance(&lhs, &rhs, DistanceMode::TvGrid)? })
            }
            _ => rows.push(DefectRow {
                w_id,
                n,
                depth: 0,
                defect: measure_distance(&lhs, &rhs, DistanceMode::Wasserstein1d)?,
            }),
        }
    }
    Ok(rows)
}

fn within(row: &DefectRow) -> bool {
    match &row.defect {
        Distance::Exact(v) => *v <= q(2, row.n as i64),
        Distance::Approx(v) => *v <= 2.0 / row.n as f64 + 1e-12,
    }
}

/// Cesàro construction with defect curves and the expansivity verdict of the result.
pub fn construct_invariant(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    dis: &Disintegration,
    params: &ConstructParams,
) -> Result<ConstructReport> {
    if params.n_max == 0 {
        return Err(Error::InvalidMeasure("n_max must be at least 1".into()));
    }
    let orders = doubling_orders(params.n_max);
    let ws = sample_base(env, params.base_samples, params.seed);
    let rows: Vec<DefectRow> = ws
        .par_iter()
        .enumerate()
        .map(|(i, w)| defect_rows(sys, dis, i, w, &orders, params.probe_depth))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let start = expansive_diagnostic(env, sys, dis, &params.delta, &params.expansive)?;
    let averaged = Disintegration::Cesaro { inner: Box::new(dis.clone()), order: params.n_max };
    let final_report = expansive_diagnostic(env, sys, &averaged, &params.delta, &params.expansive)?;
    let final_measures = ws
        .iter()
        .take(3)
        .map(|w| averaged.measure_at(sys, w))
        .collect::<Result<_>>()?;
    Ok(ConstructReport {
        orders,
        within_envelope: rows.iter().all(within),
        rows,
        start_verdict: start.verdict,
        hypothesis_met: start.verdict == Verdict::EvidenceFor,
        final_verdict: final_report.verdict,
        final_report,
        final_measures,
    })
}

/// Γ-set masses under μ_{n,w} next to the mean of the component masses.
pub fn convexity_check(state: &CesaroState, g: &GammaSetApprox) -> Result<(Mass, Mass)> {
    let avg = crate::gamma::gamma_mass(&state.average, g)?.1;
    let parts: Vec<Mass> = state
        .components
        .iter()
        .map(|m| crate::gamma::gamma_mass(m, g).map(|b| b.1))
        .collect::<Result<_>>()?;
    let n = parts.len() as i64;
    let mean = match parts.iter().map(|m| m.exact().cloned()).collect::<Option<Vec<Q>>>() {
        Some(v) => Mass::Exact(v.into_iter().fold(Q::zero(), |a, b| a + b) / Q::from_integer(n.into())),
        None => Mass::Approx(parts.iter().map(Mass::to_f64).sum::<f64>() / n as f64),
    };
    Ok((avg, mean))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PullbackCheck {
    pub w: String,
    pub x: String,
    pub pass: bool,
    /// Cells certified inside one side and outside the other.
    pub conflicts: usize,
    /// Largest endpoint discrepancy when both sides have the same number of arcs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub convention: &'static str,
}

/// Resolution of the cell grid used to compare arc unions.
pub const IDENTITY_GRID: usize = 1 << 14;

/// Checks (f_{w_{-1}})^{-1}(Γ(x,w)) = Γ((f_{w_{-1}})^{-1}(x), w_{-1}) at finite depth.
///
/// Invertible systems compare the two-sided window `[-(n-1), n-1]` at `w` with `[-(n-2), n]`
/// at `w_{-1}`. The shift uses forward windows and the one-step convention
/// σ^{-1}(Γ⁺(x,w)) ∩ B[a·x, δ(w_{-1})] = Γ⁺(a·x, w_{-1}) for every preimage letter `a`.
pub fn gamma_pullback_identity_check(
    sys: &FiberSystem,
    w: &BasePoint,
    x: &FiberPoint,
    delta: &RandomScalar,
    depth: usize,
    params: GammaParams,
) -> Result<PullbackCheck> {
    if depth == 0 {
        return Err(Error::Unsupported("depth must be positive".into()));
    }
    let prev = w.advance(-1);
    let n = depth as i64;
    match (&sys.space, x) {
        (FiberSpace::Symbolic { alphabet }, FiberPoint::Symbolic(word)) => {
            let ks = |i: usize| alphabet.at(&prev, i as i64);
            match &sys.generator {
                Generator::Shift => {
                    let lhs_gamma = gamma_approx(sys, w, x, delta, Window { start: 0, end: n - 1 }, params)?;
                    let mut conflicts = 0;
                    let mut witness = None;
                    for a in 1..=ks(0) {
                        let ax = FiberPoint::Symbolic(word.prepended(a));
                        let ball = gamma_approx(sys, &prev, &ax, delta, Window { start: 0, end: 0 }, params)?;
                        let lhs = intersect_cells(&preimage_cells(&lhs_gamma, ks(0)), &cells(&ball));
                        let rhs = cells(&gamma_approx(sys, &prev, &ax, delta, Window { start: 0, end: n }, params)?);
                        let c = cylinder_conflicts(&lhs, &rhs, &ks) + cylinder_conflicts(&rhs, &lhs, &ks);
                        if c > 0 && witness.is_none() {
                            witness = Some(format!("preimage letter {a}"));
                        }
                        conflicts += c;
                    }
                    Ok(PullbackCheck {
                        w: w.label(),
                        x: point_label(x),
                        pass: conflicts == 0,
                        conflicts,
                        endpoint_gap: None,
                        witness,
                        convention: "forward one-step preimage letters",
                    })
                }
                Generator::Identity => {
                    let lhs = cells(&gamma_approx(sys, w, x, delta, Window { start: 0, end: n - 1 }, params)?);
                    let rhs = cells(&gamma_approx(sys, &prev, x, delta, Window { start: 1, end: n }, params)?);
                    let conflicts = cylinder_conflicts(&lhs, &rhs, &ks) + cylinder_conflicts(&rhs, &lhs, &ks);
                    Ok(PullbackCheck {
                        w: w.label(),
                        x: point_label(x),
                        pass: conflicts == 0,
                        conflicts,
                        endpoint_gap: None,
                        witness: None,
                        convention: "forward windows",
                    })
                }
                _ => Err(Error::Unsupported("symbolic generator without a preimage convention".into())),
            }
        }
        (FiberSpace::Circle | FiberSpace::Interval, FiberPoint::Real(v)) => {
            if !sys.invertible {
                return Err(Error::NotInvertible(-1));
            }
            let g = sys.map_at(w, -1).inverse().ok_or(Error::NotInvertible(-1))?;
            let circle = sys.space.is_circle();
            let left = gamma_approx(sys, w, x, delta, Window { start: -(n - 1), end: n - 1 }, params)?;
            let y = g.apply(&FiberPoint::Real(*v))?;
            let right = gamma_approx(sys, &prev, &y, delta, Window { start: -(n - 2), end: n }, params)?;
            let (GammaCells::Arcs { arcs: la, err: le, .. }, GammaCells::Arcs { arcs: ra, err: re, .. }) =
                (&left.cells, &right.cells)
            else {
                unreachable!("real fibers carry arcs")
            };
            let (pa, pe) = pull_arcs(g, la, *le, circle);
            let conflicts = arc_conflicts(&pa, pe, ra, *re, IDENTITY_GRID);
            let gap = (pa.len() == ra.len()).then(|| {
                pa.iter().zip(ra).map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs())).fold(0.0, f64::max)
            });
            Ok(PullbackCheck {
                w: w.label(),
                x: point_label(x),
                pass: conflicts == 0,
                conflicts,
                endpoint_gap: gap,
                witness: (conflicts > 0).then(|| format!("{conflicts} cells of 1/{IDENTITY_GRID} disagree")),
                convention: "two-sided windows",
            })
        }
        _ => Err(Error::Incompatible("point does not lie in the fiber space".into())),
    }
}

/// The pullback identity over sampled (w, x) with x drawn uniformly (grid) or from the uniform product.
pub fn pullback_identity_suite(
    env: &Arc<BaseEnvironment>,
    sys: &FiberSystem,
    delta: &RandomScalar,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<PullbackCheck>> {
    let reference = if sys.space.is_symbolic() {
        Disintegration::UniformProduct
    } else {
        Disintegration::Lebesgue { resolution: 1 }
    };
    sample_base(env, samples, seed)
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let mu = reference.measure_at(sys, w)?;
            let x = sample_fiber(&mu, 1, derive_seed(seed ^ 0x4c31, i as u64))?.remove(0);
            gamma_pullback_identity_check(sys, w, &x, delta, depth, GammaParams::default())
        })
        .collect()
}

type CellSet = (Vec<Vec<Symbol>>, Vec<Vec<Symbol>>);

fn cells(g: &GammaSetApprox) -> CellSet {
    match &g.cells {
        GammaCells::Cylinders { inside, boundary, .. } => (inside.clone(), boundary.clone()),
        GammaCells::Arcs { .. } => (Vec::new(), Vec::new()),
    }
}

/// σ^{-1} of a cylinder union: every first letter `1..=k` in front of every cell.
fn preimage_cells(g: &GammaSetApprox, k: u32) -> CellSet {
    let (i, b) = cells(g);
    let pre = |v: Vec<Vec<Symbol>>| {
        (1..=k)
            .flat_map(|a| v.iter().map(move |c| std::iter::once(a).chain(c.iter().copied()).collect()))
            .collect()
    };
    (pre(i), pre(b))
}

fn is_prefix(a: &[Symbol], b: &[Symbol]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

/// Cell-wise intersection of two cylinder unions; a cell is inside only if inside on both sides.
fn intersect_cells(a: &CellSet, b: &CellSet) -> CellSet {
    let mut inside = Vec::new();
    let mut boundary = Vec::new();
    let tagged = |s: &CellSet| -> Vec<(Vec<Symbol>, bool)> {
        s.0.iter().map(|c| (c.clone(), true)).chain(s.1.iter().map(|c| (c.clone(), false))).collect()
    };
    let tb = tagged(b);
    for (ca, ia) in tagged(a) {
        for (cb, ib) in &tb {
            let meet = if is_prefix(&ca, cb) {
                cb.clone()
            } else if is_prefix(cb, &ca) {
                ca.clone()
            } else {
                continue;
            };
            if ia && *ib {
                inside.push(meet);
            } else {
                boundary.push(meet);
            }
        }
    }
    (inside, boundary)
}

/// Number of `a`-inside cells not covered by `b`'s inside and boundary cells.
fn cylinder_conflicts(a: &CellSet, b: &CellSet, alphabet: &dyn Fn(usize) -> u32) -> usize {
    let cover: HashSet<&[Symbol]> = b.0.iter().chain(&b.1).map(Vec::as_slice).collect();
    let nodes: HashSet<&[Symbol]> = b.0.iter().chain(&b.1).flat_map(|c| (0..=c.len()).map(move |l| &c[..l])).collect();
    fn covered(
        c: &mut Vec<Symbol>,
        cover: &HashSet<&[Symbol]>,
        nodes: &HashSet<&[Symbol]>,
        alphabet: &dyn Fn(usize) -> u32,
    ) -> bool {
        if (0..=c.len()).any(|l| cover.contains(&c[..l])) {
            return true;
        }
        if !nodes.contains(c.as_slice()) {
            return false;
        }
        let k = alphabet(c.len());
        (1..=k).all(|s| {
            c.push(s);
            let ok = covered(c, cover, nodes, alphabet);
            c.pop();
            ok
        })
    }
    a.0.iter().filter(|c| !covered(&mut (*c).clone(), &cover, &nodes, alphabet)).count()
}

/// Pulls arcs back through an invertible map; returns the new arcs and endpoint error.
fn pull_arcs(g: FiberMap, arcs: &[(f64, f64)], err: f64, circle: bool) -> (Vec<(f64, f64)>, f64) {
    let lip = g.branches().iter().map(|b| b.slope.abs()).fold(1.0, f64::max);
    let image = |v: f64| match g {
        FiberMap::Rotation { angle } => v + angle,
        _ => g.apply(&FiberPoint::Real(v)).ok().and_then(|p| p.real()).unwrap_or(v),
    };
    let mut out = Vec::new();
    for &(a, b) in arcs {
        let (ia, ib) = (image(a), image(b));
        if circle {
            if b - a >= 1.0 {
                out.push((0.0, 1.0));
                continue;
            }
            let s = frac(ia);
            let e = s + (b - a);
            if e > 1.0 {
                out.push((s, 1.0));
                out.push((0.0, e - 1.0));
            } else {
                out.push((s, e));
            }
        } else {
            out.push((ia.min(ib), ia.max(ib)));
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in out {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    (merged, err * lip + 1e-12)
}

fn arc_conflicts(a: &[(f64, f64)], ae: f64, b: &[(f64, f64)], be: f64, res: usize) -> usize {
    let status = |arcs: &[(f64, f64)], err: f64, lo: f64, hi: f64| -> (bool, bool) {
        let inside = arcs.iter().any(|&(s, e)| s + err <= lo && hi <= e - err)
            || arcs.iter().any(|&(s, e)| s <= 0.0 && lo == 0.0 && hi <= e - err)
            || arcs.iter().any(|&(s, e)| e >= 1.0 && hi == 1.0 && s + err <= lo);
        let outside = arcs.iter().all(|&(s, e)| e + err <= lo || s - err >= hi);
        (inside, outside)
    };
    (0..res)
        .filter(|j| {
            let lo = *j as f64 / res as f64;
            let hi = (*j + 1) as f64 / res as f64;
            let (ia, oa) = status(a, ae, lo, hi);
            let (ib, ob) = status(b, be, lo, hi);
            (ia && ob) || (ib && oa)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EnvKind, RandomInt};
    use crate::exact::Fraction;
    use crate::measure::VectorRule;

    fn fair() -> Arc<BaseEnvironment> {
        BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair").unwrap()
    }

    fn shift23() -> FiberSystem {
        FiberSystem::new(FiberSpace::Symbolic { alphabet: RandomInt::SymbolTable(vec![2, 3]) }, Generator::Shift, false)
            .unwrap()
    }

    fn skewed() -> Disintegration {
        Disintegration::Product { head: vec![VectorRule::Lead(Fraction(q(3, 4)))], tail: VectorRule::Uniform }
    }

    #[test]
    fn orders() {
        assert_eq!(doubling_orders(256), vec![1, 2, 4, 8, 16, 32, 64, 128, 256]);
        assert_eq!(doubling_orders(6), vec![1, 2, 4, 6]);
    }

    #[test]
    fn skewed_defect_is_exactly_one_over_n_at_depth_one() {
        let w = BasePoint::seeded(&fair(), 5);
        let rows = defect_rows(&shift23(), &skewed(), 0, &w, &[1, 2, 4, 8], 3).unwrap();
        assert!(rows.iter().all(within));
        // only the skewed head differs: (1/n)·tv(skewed, uniform) at the first coordinate
        let k = RandomInt::SymbolTable(vec![2, 3]).at(&w, 1) as i64;
        let tv1 = q(3, 4) - q(1, k);
        for r in rows.iter().filter(|r| r.depth == 1) {
            assert_eq!(r.defect, Distance::Exact(&tv1 / q(r.n as i64, 1)), "{r:?}");
        }
    }

    #[test]
    fn invariant_start_has_zero_defect() {
        let w = BasePoint::seeded(&fair(), 2);
        let rows = defect_rows(&shift23(), &Disintegration::UniformProduct, 0, &w, &[1, 2, 4], 4).unwrap();
        assert!(rows.iter().all(|r| r.defect == Distance::Exact(Q::zero())));
    }

    #[test]
    fn incremental_matches_direct() {
        let w = BasePoint::seeded(&fair(), 8);
        let mut st = cesaro_average(&shift23(), &skewed(), &w, 3, 100).unwrap();
        st.extend(&shift23(), &skewed()).unwrap();
        let direct = cesaro_average(&shift23(), &skewed(), &w, 4, 100).unwrap();
        assert_eq!(st.average, direct.average);
        assert!(cesaro_average(&shift23(), &skewed(), &w, 10, 4).unwrap().partial);
    }

    #[test]
    fn rotation_identity_holds() {
        let env = fair();
        let sys = FiberSystem::new(
            FiberSpace::Circle,
            Generator::Rotation { angle: RandomScalar::table(vec![q(1, 3), q(2, 7)]) },
            true,
        )
        .unwrap();
        let checks = pullback_identity_suite(&env, &sys, &RandomScalar::constant(q(1, 20)), 4, 10, 1).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn shift_identity_holds() {
        let env = fair();
        let checks = pullback_identity_suite(&env, &shift23(), &RandomScalar::constant(q(1, 4)), 4, 10, 3).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn mismatched_arcs_conflict() {
        assert!(arc_conflicts(&[(0.2, 0.4)], 0.0, &[(0.2, 0.3)], 0.0, 1024) > 0);
        assert_eq!(arc_conflicts(&[(0.2, 0.4)], 1e-9, &[(0.2, 0.4 + 1e-10)], 0.0, 1024), 0);
    }

    #[test]
    fn pullback_of_grid_under_doubling() {
        let sys = FiberSystem::new(FiberSpace::Circle, Generator::ExpandingCircle { degree: RandomInt::Constant(2) }, false)
            .unwrap();
        let w = BasePoint::seeded(&fair(), 0);
        let dis = Disintegration::Grid { weights: vec![0.5, 0.25, 0.125, 0.125] };
        let FiberMeasure::Grid(g) = pullback_disintegration(&dis).measure_at(&sys, &w).unwrap() else { panic!() };
        // cell j receives half of cells j/2 mod-wrapped: (w0 + w2)/2, (w0 + w2)/2, (w1 + w3)/2, (w1 + w3)/2
        assert_eq!(g.weights, vec![0.3125, 0.3125, 0.1875, 0.1875]);
    }
}
