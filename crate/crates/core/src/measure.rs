//! Per-fiber measures μ_w: cylinder products (exact), piecewise-constant grid densities, and
//! atomic measures. Pushforward along f_w, set masses, distances and sampling.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::base::{BasePoint, RandomInt, Symbol};
use crate::error::{Error, Result};
use crate::exact::{format_q, q_int, to_f64, Fraction, Q};
use crate::fiber::{frac, FiberMap, FiberPoint, FiberSpace, FiberSystem, SymbolWord};

/// Coordinates materialized when sampling a symbolic point; the rest is the constant tail 1.
pub const SAMPLE_PREFIX: usize = 64;

/// Rule producing the probability vector at one coordinate of a cylinder product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorRule {
    /// `1/k` on each of the `k` admissible symbols.
    Uniform,
    /// Mass `lead` on symbol 1, the remainder split evenly among the others.
    Lead(Fraction),
    /// One vector per base symbol at that coordinate.
    Table(Vec<Vec<Fraction>>),
}

impl VectorRule {
    /// The vector for an alphabet of size `k` over base symbol `s`.
    pub fn vector(&self, k: u32, s: Symbol) -> Result<Vec<Q>> {
        match self {
            VectorRule::Uniform => Ok(vec![Q::new(1.into(), k.into()); k as usize]),
            VectorRule::Lead(p) => {
                let p = p.0.clone();
                if p <= Q::zero() || p >= Q::one() {
                    return Err(Error::InvalidMeasure("lead mass must lie in (0,1)".into()));
                }
                let rest = (Q::one() - &p) / q_int(k as i64 - 1);
                let mut v = vec![rest; k as usize];
                v[0] = p;
                Ok(v)
            }
            VectorRule::Table(t) => {
                let row = t.get(s as usize).ok_or_else(|| {
                    Error::InvalidMeasure(format!("vector table has no row for base symbol {s}"))
                })?;
                if row.len() != k as usize {
                    return Err(Error::InvalidMeasure(format!(
                        "vector for base symbol {s} has {} entries, alphabet has {k}",
                        row.len()
                    )));
                }
                let v: Vec<Q> = row.iter().map(|f| f.0.clone()).collect();
                if v.iter().any(|p| p.is_negative()) || v.iter().sum::<Q>() != Q::one() {
                    return Err(Error::InvalidMeasure(format!(
                        "vector for base symbol {s} is not a probability vector"
                    )));
                }
                Ok(v)
            }
        }
    }
}

/// A product measure on Σ_k^+(w): explicit vectors for the first coordinates, then a rule.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductMeasure {
    pub base: BasePoint,
    pub alphabet: RandomInt,
    pub head: Vec<Vec<Q>>,
    pub tail: VectorRule,
}

impl ProductMeasure {
    pub fn new(base: BasePoint, alphabet: RandomInt, head: Vec<Vec<Q>>, tail: VectorRule) -> Result<Self> {
        let m = ProductMeasure { base, alphabet, head, tail };
        for (i, v) in m.head.iter().enumerate() {
            let k = m.alphabet.at(&m.base, i as i64) as usize;
            if v.len() != k || v.iter().any(|p| p.is_negative()) || v.iter().sum::<Q>() != Q::one() {
                return Err(Error::InvalidMeasure(format!(
                    "head vector {i} is not a probability vector on {k} symbols"
                )));
            }
        }
        Ok(m)
    }

    pub fn vector(&self, i: usize) -> Result<Vec<Q>> {
        match self.head.get(i) {
            Some(v) => Ok(v.clone()),
            None => {
                let k = self.alphabet.at(&self.base, i as i64);
                self.tail.vector(k, self.base.symbol(i as i64))
            }
        }
    }

    pub fn vectors(&self, n: usize) -> Result<Vec<Vec<Q>>> {
        (0..n).map(|i| self.vector(i)).collect()
    }

    /// μ_w(C_w(word)) as an exact product; zero for words violating the alphabet bound.
    pub fn cylinder_mass(&self, word: &[Symbol]) -> Result<Q> {
        let mut m = Q::one();
        for (i, &s) in word.iter().enumerate() {
            let v = self.vector(i)?;
            match s.checked_sub(1).and_then(|j| v.get(j as usize)) {
                Some(p) => m *= p,
                None => return Ok(Q::zero()),
            }
            if m.is_zero() {
                break;
            }
        }
        Ok(m)
    }

    fn max_entry(&self, n: usize) -> Result<Q> {
        let mut best = Q::zero();
        for v in self.vectors(n)? {
            for p in v {
                if p > best {
                    best = p;
                }
            }
        }
        Ok(best)
    }
}

/// A piecewise-constant density on the circle or `[0,1]`: `weights[j]` on `[j/R, (j+1)/R)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDensity {
    pub circle: bool,
    pub weights: Vec<f64>,
}

impl GridDensity {
    pub fn uniform(circle: bool, resolution: usize) -> Self {
        GridDensity { circle, weights: vec![1.0 / resolution as f64; resolution] }
    }

    pub fn resolution(&self) -> usize {
        self.weights.len()
    }

    /// μ([0, t]).
    pub fn cdf(&self, t: f64) -> f64 {
        let r = self.resolution();
        let pos = (t.clamp(0.0, 1.0) * r as f64).min(r as f64);
        let cell = (pos.floor() as usize).min(r);
        let full: f64 = self.weights[..cell].iter().sum();
        if cell == r {
            full
        } else {
            full + self.weights[cell] * (pos - cell as f64)
        }
    }

    /// Mass of a union of disjoint intervals inside `[0,1]`.
    pub fn mass_of(&self, arcs: &[(f64, f64)]) -> f64 {
        arcs.iter()
            .map(|&(a, b)| (self.cdf(b) - self.cdf(a)).max(0.0))
            .sum::<f64>()
            .min(1.0)
    }

    pub fn refine(&self, factor: usize) -> GridDensity {
        let weights = self
            .weights
            .iter()
            .flat_map(|w| std::iter::repeat_n(w / factor as f64, factor))
            .collect();
        GridDensity { circle: self.circle, weights }
    }

    fn at_resolution(&self, r: usize) -> Result<GridDensity> {
        if !r.is_multiple_of(self.resolution()) {
            return Err(Error::Incompatible(format!(
                "grid resolution {} does not divide {r}",
                self.resolution()
            )));
        }
        Ok(self.refine(r / self.resolution()))
    }

    fn is_uniform(&self) -> bool {
        let u = 1.0 / self.resolution() as f64;
        self.weights.iter().all(|w| (w - u).abs() <= 1e-15)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub point: FiberPoint,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiberMeasure {
    /// Convex combination of product measures; weights are exact and sum to 1.
    Cylinder(Vec<(Q, ProductMeasure)>),
    Grid(GridDensity),
    Atomic(Vec<Atom>),
}

impl FiberMeasure {
    pub fn product(p: ProductMeasure) -> Self {
        FiberMeasure::Cylinder(vec![(Q::one(), p)])
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, FiberMeasure::Atomic(_))
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            FiberMeasure::Cylinder(c) => to_f64(&c.iter().map(|(w, _)| w).sum::<Q>()),
            FiberMeasure::Grid(g) => g.weights.iter().sum(),
            FiberMeasure::Atomic(a) => a.iter().map(|a| a.weight).sum(),
        }
    }

    pub fn cylinder_mass(&self, word: &[Symbol]) -> Result<Q> {
        match self {
            FiberMeasure::Cylinder(c) => {
                let mut m = Q::zero();
                for (w, p) in c {
                    m += w * p.cylinder_mass(word)?;
                }
                Ok(m)
            }
            FiberMeasure::Atomic(_) | FiberMeasure::Grid(_) => {
                Err(Error::Incompatible("cylinder masses need a cylinder-product measure".into()))
            }
        }
    }

    /// Largest depth-`n` cylinder mass bound `(max entry)^n`, summed over components.
    pub fn max_cylinder_mass_bound(&self, n: usize) -> Result<Q> {
        match self {
            FiberMeasure::Cylinder(c) => {
                let mut best = Q::zero();
                for (_, p) in c {
                    let e = p.max_entry(n)?;
                    let b = num_traits::pow(e, n);
                    if b > best {
                        best = b;
                    }
                }
                Ok(best)
            }
            _ => Err(Error::Incompatible("not a cylinder-product measure".into())),
        }
    }
}

/// Merges equal mixture components.
pub fn normalize_mixture(parts: Vec<(Q, ProductMeasure)>) -> Vec<(Q, ProductMeasure)> {
    let mut out: Vec<(Q, ProductMeasure)> = Vec::new();
    for (w, p) in parts {
        if w.is_zero() {
            continue;
        }
        match out.iter_mut().find(|(_, o)| *o == p) {
            Some((acc, _)) => *acc += w,
            None => out.push((w, p)),
        }
    }
    out
}

/// `(1/n) Σ μ_i` of measures of one representation kind.
pub fn average(measures: Vec<FiberMeasure>) -> Result<FiberMeasure> {
    let n = measures.len();
    if n == 0 {
        return Err(Error::InvalidMeasure("empty average".into()));
    }
    let scale = Q::new(1.into(), (n as i64).into());
    match &measures[0] {
        FiberMeasure::Cylinder(_) => {
            let mut parts = Vec::new();
            for m in measures {
                let FiberMeasure::Cylinder(c) = m else {
                    return Err(Error::Incompatible("mixed measure representations".into()));
                };
                parts.extend(c.into_iter().map(|(w, p)| (w * &scale, p)));
            }
            Ok(FiberMeasure::Cylinder(normalize_mixture(parts)))
        }
        FiberMeasure::Grid(first) => {
            let circle = first.circle;
            let mut r = 1usize;
            for m in &measures {
                let FiberMeasure::Grid(g) = m else {
                    return Err(Error::Incompatible("mixed measure representations".into()));
                };
                r = r.lcm(&g.resolution());
            }
            let mut weights = vec![0.0; r];
            for m in &measures {
                let FiberMeasure::Grid(g) = m else { unreachable!() };
                for (acc, w) in weights.iter_mut().zip(g.at_resolution(r)?.weights) {
                    *acc += w / n as f64;
                }
            }
            Ok(FiberMeasure::Grid(GridDensity { circle, weights }))
        }
        FiberMeasure::Atomic(_) => {
            let mut atoms: Vec<Atom> = Vec::new();
            for m in measures {
                let FiberMeasure::Atomic(a) = m else {
                    return Err(Error::Incompatible("mixed measure representations".into()));
                };
                for atom in a {
                    let weight = atom.weight / n as f64;
                    match atoms.iter_mut().find(|o| o.point == atom.point) {
                        Some(o) => o.weight += weight,
                        None => atoms.push(Atom { point: atom.point, weight }),
                    }
                }
            }
            Ok(FiberMeasure::Atomic(atoms))
        }
    }
}

/// f_w∗μ_w, a measure on E_{θ(w)}.
pub fn pushforward(sys: &FiberSystem, w: &BasePoint, mu: &FiberMeasure) -> Result<FiberMeasure> {
    let map = sys.map_at(w, 0);
    match mu {
        FiberMeasure::Atomic(atoms) => Ok(FiberMeasure::Atomic(
            atoms
                .iter()
                .map(|a| Ok(Atom { point: map.apply(&a.point)?, weight: a.weight }))
                .collect::<Result<_>>()?,
        )),
        FiberMeasure::Cylinder(parts) => {
            let pushed = parts
                .iter()
                .map(|(wt, p)| Ok((wt.clone(), push_product(map, p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(FiberMeasure::Cylinder(normalize_mixture(pushed)))
        }
        FiberMeasure::Grid(g) => Ok(FiberMeasure::Grid(push_grid(map, g)?)),
    }
}

fn push_product(map: FiberMap, p: &ProductMeasure) -> Result<ProductMeasure> {
    match map {
        FiberMap::Shift => {
            let head = p.head.iter().skip(1).cloned().collect();
            Ok(ProductMeasure {
                base: p.base.advance(1),
                alphabet: p.alphabet.clone(),
                head,
                tail: p.tail.clone(),
            })
        }
        FiberMap::Identity if matches!(p.alphabet, RandomInt::Constant(_)) && p.tail == VectorRule::Uniform => {
            Ok(ProductMeasure { base: p.base.advance(1), ..p.clone() })
        }
        _ => Err(Error::NotClosed(format!("{map:?} on a cylinder-product measure"))),
    }
}

fn push_grid(map: FiberMap, g: &GridDensity) -> Result<GridDensity> {
    let r = g.resolution();
    match map {
        FiberMap::Identity => Ok(g.clone()),
        FiberMap::Expanding { degree } => {
            // [j/R, (j+1)/R) wraps onto d consecutive cells, each receiving w_j / d
            let d = degree as usize;
            let mut out = vec![0.0; r];
            for (j, w) in g.weights.iter().enumerate() {
                for t in 0..d {
                    out[(d * j + t) % r] += w / d as f64;
                }
            }
            Ok(GridDensity { circle: g.circle, weights: out })
        }
        FiberMap::Rotation { angle } => {
            if g.is_uniform() {
                return Ok(g.clone());
            }
            let steps = angle * r as f64;
            if (steps - steps.round()).abs() > 1e-9 {
                return Err(Error::NotClosed(format!(
                    "rotation by {angle} does not preserve the resolution-{r} grid"
                )));
            }
            let s = steps.round() as usize % r;
            let mut out = vec![0.0; r];
            for (j, w) in g.weights.iter().enumerate() {
                out[(j + s) % r] = *w;
            }
            Ok(GridDensity { circle: g.circle, weights: out })
        }
        FiberMap::PlHomeo { .. } => push_grid_pl(map, g),
        FiberMap::Shift => Err(Error::Incompatible("shift on a grid density".into())),
    }
}

fn aligned(v: f64, r: usize) -> Option<usize> {
    let s = v * r as f64;
    ((s - s.round()).abs() < 1e-9).then_some(s.round() as usize)
}

fn push_grid_pl(map: FiberMap, g: &GridDensity) -> Result<GridDensity> {
    let r = g.resolution();
    let branches = map.branches();
    if aligned(branches[0].hi, r).is_none() {
        return Err(Error::NotClosed(format!("breakpoint is not a cell edge of the resolution-{r} grid")));
    }
    let image = |x: f64| {
        let b = if x <= branches[0].hi { branches[0] } else { branches[1] };
        b.slope * x + b.intercept
    };
    let factor = (1..=16)
        .find(|m| (0..=r).all(|j| aligned(image(j as f64 / r as f64), r * m).is_some()))
        .ok_or_else(|| Error::NotClosed("image cells do not align with any refinement".into()))?;
    let rr = r * factor;
    let mut out = vec![0.0; rr];
    for (j, w) in g.weights.iter().enumerate() {
        let a = aligned(image(j as f64 / r as f64), rr).unwrap();
        let b = aligned(image((j + 1) as f64 / r as f64), rr).unwrap();
        for cell in out.iter_mut().take(b).skip(a) {
            *cell += w / (b - a) as f64;
        }
    }
    Ok(GridDensity { circle: g.circle, weights: out })
}

/// Distance modes for [`measure_distance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistanceMode {
    TvCylinder { depth: usize },
    Wasserstein1d,
    TvGrid,
}

/// A distance value: exact for cylinder total variation.
#[derive(Clone, Debug, PartialEq)]
pub enum Distance {
    Exact(Q),
    Approx(f64),
}

impl Distance {
    pub fn to_f64(&self) -> f64 {
        match self {
            Distance::Exact(v) => to_f64(v),
            Distance::Approx(v) => *v,
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Exact(v) => s.serialize_str(&format_q(v)),
            Distance::Approx(v) => s.serialize_f64(*v),
        }
    }
}

pub fn measure_distance(mu: &FiberMeasure, nu: &FiberMeasure, mode: DistanceMode) -> Result<Distance> {
    match mode {
        DistanceMode::TvCylinder { depth } => {
            let tv = tv_cylinder_by_depth(mu, nu, depth)?;
            Ok(Distance::Exact(tv.last().cloned().unwrap_or_else(Q::zero)))
        }
        DistanceMode::TvGrid => match (mu, nu) {
            (FiberMeasure::Grid(a), FiberMeasure::Grid(b)) => {
                let r = a.resolution().lcm(&b.resolution());
                let (a, b) = (a.at_resolution(r)?, b.at_resolution(r)?);
                let s: f64 = a.weights.iter().zip(&b.weights).map(|(x, y)| (x - y).abs()).sum();
                Ok(Distance::Approx(s / 2.0))
            }
            _ => Err(Error::Incompatible("tv-grid compares two grid densities".into())),
        },
        DistanceMode::Wasserstein1d => wasserstein(mu, nu).map(Distance::Approx),
    }
}

/// Total variation on the depth-`d` cylinder algebra for every `d` in `0..=depth`.
pub fn tv_cylinder_by_depth(mu: &FiberMeasure, nu: &FiberMeasure, depth: usize) -> Result<Vec<Q>> {
    let (FiberMeasure::Cylinder(a), FiberMeasure::Cylinder(b)) = (mu, nu) else {
        return Err(Error::Incompatible("tv-cylinder compares two cylinder-product measures".into()));
    };
    let first = a.first().or(b.first()).ok_or_else(|| Error::InvalidMeasure("empty mixture".into()))?;
    for (_, p) in a.iter().chain(b) {
        for i in 0..depth {
            if p.alphabet.at(&p.base, i as i64) != first.1.alphabet.at(&first.1.base, i as i64) {
                return Err(Error::Incompatible("measures live on different fibers".into()));
            }
        }
    }
    // signed components: +w for μ, -w for ν
    let comps: Vec<(Q, Vec<Vec<Q>>)> = a
        .iter()
        .map(|(w, p)| Ok((w.clone(), p.vectors(depth)?)))
        .chain(b.iter().map(|(w, p)| Ok((-w.clone(), p.vectors(depth)?))))
        .collect::<Result<_>>()?;
    let mut sums = vec![Q::zero(); depth + 1];
    let mut masses: Vec<Q> = comps.iter().map(|(w, _)| w.clone()).collect();
    tv_walk(&comps, 0, &mut masses, &mut sums);
    Ok(sums.into_iter().map(|s| s / q_int(2)).collect())
}

fn tv_walk(comps: &[(Q, Vec<Vec<Q>>)], level: usize, masses: &mut [Q], sums: &mut [Q]) {
    let diff: Q = masses.iter().sum();
    sums[level] += diff.abs();
    if level + 1 == sums.len() || masses.iter().all(Zero::is_zero) {
        return;
    }
    let k = comps[0].1[level].len();
    for s in 0..k {
        let mut next: Vec<Q> = masses.iter().zip(comps).map(|(m, (_, v))| m * &v[level][s]).collect();
        tv_walk(comps, level + 1, &mut next, sums);
    }
}

fn wasserstein(mu: &FiberMeasure, nu: &FiberMeasure) -> Result<f64> {
    let circle = |m: &FiberMeasure| match m {
        FiberMeasure::Grid(g) => Ok(Some(g.circle)),
        FiberMeasure::Atomic(a) => {
            if a.iter().all(|x| x.point.real().is_some()) {
                Ok(None)
            } else {
                Err(Error::Incompatible("wasserstein-1d needs real fibers".into()))
            }
        }
        FiberMeasure::Cylinder(_) => Err(Error::Incompatible("wasserstein-1d needs real fibers".into())),
    };
    let is_circle = circle(mu)?.or(circle(nu)?).unwrap_or(true);
    let mut knots = vec![0.0, 1.0];
    for m in [mu, nu] {
        match m {
            FiberMeasure::Grid(g) => {
                let r = g.resolution();
                knots.extend((1..r).map(|j| j as f64 / r as f64));
            }
            FiberMeasure::Atomic(a) => knots.extend(a.iter().filter_map(|x| x.point.real())),
            FiberMeasure::Cylinder(_) => unreachable!(),
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    // right-continuous cdf values at knots and linear pieces between them
    let cdf = |m: &FiberMeasure, t: f64| match m {
        FiberMeasure::Grid(g) => g.cdf(t),
        FiberMeasure::Atomic(a) => a.iter().filter(|x| x.point.real().unwrap() <= t).map(|x| x.weight).sum(),
        FiberMeasure::Cylinder(_) => unreachable!(),
    };
    let atomic = |m: &FiberMeasure| matches!(m, FiberMeasure::Atomic(_));
    let left = |m: &FiberMeasure, t: f64| {
        if atomic(m) {
            match m {
                FiberMeasure::Atomic(a) => a.iter().filter(|x| x.point.real().unwrap() < t).map(|x| x.weight).sum(),
                _ => unreachable!(),
            }
        } else {
            cdf(m, t)
        }
    };
    let segments: Vec<(f64, f64, f64)> = knots
        .windows(2)
        .map(|p| {
            let (a, b) = (p[0], p[1]);
            let da = cdf(mu, a) - cdf(nu, a);
            let db = left(mu, b) - left(nu, b);
            (b - a, da, db)
        })
        .collect();
    let cost = |c: f64| -> f64 { segments.iter().map(|&(len, da, db)| abs_linear_integral(len, da - c, db - c)).sum() };
    if !is_circle {
        return Ok(cost(0.0));
    }
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(cost((lo + hi) / 2.0).min(cost(0.0)))
}

/// ∫_0^len |linear from a to b|.
fn abs_linear_integral(len: f64, a: f64, b: f64) -> f64 {
    if a * b >= 0.0 {
        len * (a.abs() + b.abs()) / 2.0
    } else {
        len * (a * a + b * b) / (2.0 * (a.abs() + b.abs()))
    }
}

/// `count` points drawn from μ_w, deterministic in `seed`.
pub fn sample_fiber(mu: &FiberMeasure, count: usize, seed: u64) -> Result<Vec<FiberPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, weights: &[f64]| -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                return i;
            }
            u -= w;
        }
        weights.len() - 1
    };
    match mu {
        FiberMeasure::Atomic(atoms) => {
            let w: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
            Ok((0..count).map(|_| atoms[pick(&mut rng, &w)].point.clone()).collect())
        }
        FiberMeasure::Grid(g) => Ok((0..count)
            .map(|_| {
                let j = pick(&mut rng, &g.weights);
                let x = (j as f64 + rng.random::<f64>()) / g.resolution() as f64;
                FiberPoint::Real(if g.circle { frac(x) } else { x.min(1.0) })
            })
            .collect()),
        FiberMeasure::Cylinder(parts) => {
            let cw: Vec<f64> = parts.iter().map(|(w, _)| to_f64(w)).collect();
            let tables: Vec<Vec<Vec<f64>>> = parts
                .iter()
                .map(|(_, p)| Ok(p.vectors(SAMPLE_PREFIX)?.iter().map(|v| v.iter().map(to_f64).collect()).collect()))
                .collect::<Result<_>>()?;
            (0..count)
                .map(|_| {
                    let c = pick(&mut rng, &cw);
                    let word = tables[c].iter().map(|v| pick(&mut rng, v) as Symbol + 1).collect();
                    Ok(FiberPoint::Symbolic(SymbolWord::with_ones_tail(word)?))
                })
                .collect()
        }
    }
}

/// Serialized view of a fiber measure.
impl Serialize for FiberMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Component<'a> {
            weight: String,
            base: String,
            head: Vec<Vec<String>>,
            tail: &'a VectorRule,
        }
        match self {
            FiberMeasure::Cylinder(parts) => {
                let comps: Vec<Component> = parts
                    .iter()
                    .map(|(w, p)| Component {
                        weight: format_q(w),
                        base: p.base.label(),
                        head: p.head.iter().map(|v| v.iter().map(format_q).collect()).collect(),
                        tail: &p.tail,
                    })
                    .collect();
                let mut st = s.serialize_struct("FiberMeasure", 2)?;
                st.serialize_field("representation", "cylinder_product")?;
                st.serialize_field("components", &comps)?;
                st.end()
            }
            FiberMeasure::Grid(g) => {
                let mut st = s.serialize_struct("FiberMeasure", 3)?;
                st.serialize_field("representation", "grid_density")?;
                st.serialize_field("circle", &g.circle)?;
                st.serialize_field("weights", &g.weights)?;
                st.end()
            }
            FiberMeasure::Atomic(a) => {
                let mut st = s.serialize_struct("FiberMeasure", 2)?;
                st.serialize_field("representation", "atomic")?;
                st.serialize_field("atoms", a)?;
                st.end()
            }
        }
    }
}

/// Whether a measure lives on the given fiber space kind.
pub fn fits_space(mu: &FiberMeasure, space: &FiberSpace) -> bool {
    match (mu, space) {
        (FiberMeasure::Cylinder(_), FiberSpace::Symbolic { .. }) => true,
        (FiberMeasure::Grid(g), FiberSpace::Circle) => g.circle,
        (FiberMeasure::Grid(g), FiberSpace::Interval) => !g.circle,
        (FiberMeasure::Atomic(a), _) => a.iter().all(|x| x.point.real().is_some() != space.is_symbolic()),
        _ => false,
    }
}
