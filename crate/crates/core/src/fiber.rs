//! Fiber spaces E_w, fiber points, the generators f_w and the cocycle f_w^n.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base::{BaseEnvironment, BasePoint, RandomInt, RandomScalar, Symbol};
use crate::error::{Error, Result};
use crate::exact::{pow2_neg, q, to_f64, Fraction, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiberSpace {
    /// One-sided sequences with `x_i ≤ k(θ^i(w))`, metric `Σ 2^{-i} |1/x_i − 1/y_i|`.
    Symbolic { alphabet: RandomInt },
    /// Unit-circumference circle with arc-length metric.
    Circle,
    /// `[0, 1]` with the euclidean metric.
    Interval,
}

impl FiberSpace {
    pub fn is_symbolic(&self) -> bool {
        matches!(self, FiberSpace::Symbolic { .. })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, FiberSpace::Circle)
    }

    pub fn alphabet(&self) -> Option<&RandomInt> {
        match self {
            FiberSpace::Symbolic { alphabet } => Some(alphabet),
            _ => None,
        }
    }

    /// Diameter of a fiber (an upper bound for symbolic fibers with varying alphabets).
    pub fn diameter(&self) -> f64 {
        match self {
            FiberSpace::Symbolic { alphabet } => 2.0 * (1.0 - 1.0 / alphabet.max() as f64),
            FiberSpace::Circle => 0.5,
            FiberSpace::Interval => 1.0,
        }
    }

    pub fn contains(&self, w: &BasePoint, x: &FiberPoint) -> bool {
        match (self, x) {
            (FiberSpace::Symbolic { alphabet }, FiberPoint::Symbolic(word)) => {
                let horizon = word.prefix.len() + 4 * word.period.len() + 64;
                (0..horizon).all(|i| {
                    let s = word.get(i);
                    s >= 1 && s <= alphabet.at(w, i as i64)
                })
            }
            (FiberSpace::Circle, FiberPoint::Real(v)) | (FiberSpace::Interval, FiberPoint::Real(v)) => {
                (0.0..=1.0).contains(v) && !(self.is_circle() && *v >= 1.0)
            }
            _ => false,
        }
    }
}

/// An eventually periodic one-sided symbol sequence: `prefix` followed by `period` repeated.
/// Symbols are 1-based. Stored in canonical form (shortest period, shortest prefix).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolWord {
    prefix: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl SymbolWord {
    pub fn new(prefix: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::PointOutsideFiber("symbolic tail period is empty".into()));
        }
        if prefix.iter().chain(&period).any(|s| *s == 0) {
            return Err(Error::PointOutsideFiber("symbols are 1-based".into()));
        }
        Ok(SymbolWord { prefix, period }.canonical())
    }

    /// `prefix` followed by the constant tail `1, 1, 1, ...`.
    pub fn with_ones_tail(prefix: Vec<Symbol>) -> Result<Self> {
        Self::new(prefix, vec![1])
    }

    pub fn constant(s: Symbol) -> Self {
        Self::new(Vec::new(), vec![s]).expect("nonzero symbol")
    }

    fn canonical(mut self) -> Self {
        let n = self.period.len();
        if let Some(p) = (1..=n).find(|p| n.is_multiple_of(*p) && (0..n).all(|i| self.period[i] == self.period[i % p])) {
            self.period.truncate(p);
        }
        while let Some(&last) = self.prefix.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
        self
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    pub fn get(&self, i: usize) -> Symbol {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn take(&self, n: usize) -> Vec<Symbol> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// σ(x).
    pub fn shifted(&self) -> SymbolWord {
        let mut out = self.clone();
        if out.prefix.is_empty() {
            out.period.rotate_left(1);
        } else {
            out.prefix.remove(0);
        }
        out
    }

    /// `a·x`, one preimage of `x` under the shift.
    pub fn prepended(&self, a: Symbol) -> SymbolWord {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(a);
        prefix.extend_from_slice(&self.prefix);
        SymbolWord { prefix, period: self.period.clone() }.canonical()
    }

    /// Replace the first `word.len()` coordinates.
    pub fn with_prefix(&self, word: &[Symbol]) -> SymbolWord {
        let keep = word.len().max(self.prefix.len());
        let mut prefix: Vec<Symbol> = (0..keep).map(|i| self.get(i)).collect();
        prefix[..word.len()].copy_from_slice(word);
        SymbolWord { prefix, period: self.period.clone() }.canonical()
    }

    /// Index from which the sequence is purely periodic.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FiberPoint {
    Real(f64),
    Symbolic(SymbolWord),
}

impl FiberPoint {
    pub fn real(&self) -> Option<f64> {
        match self {
            FiberPoint::Real(v) => Some(*v),
            FiberPoint::Symbolic(_) => None,
        }
    }

    pub fn word(&self) -> Option<&SymbolWord> {
        match self {
            FiberPoint::Symbolic(w) => Some(w),
            FiberPoint::Real(_) => None,
        }
    }
}

/// Reduction mod 1 into `[0, 1)`.
pub fn frac(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// A single deterministic fiber map, i.e. the generator read off at one base point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiberMap {
    Identity,
    Shift,
    /// `x ↦ x + angle mod 1`.
    Rotation { angle: f64 },
    /// `x ↦ degree·x mod 1`.
    Expanding { degree: u32 },
    /// Increasing piecewise-linear homeomorphism of `[0,1]` through `(break_x, break_y)`.
    PlHomeo { break_x: f64, break_y: f64 },
}

/// One affine branch `y = slope·x + intercept` on `[lo, hi]` (lifted coordinates for circle maps).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineBranch {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl FiberMap {
    pub fn is_invertible(&self) -> bool {
        matches!(
            self,
            FiberMap::Identity | FiberMap::Rotation { .. } | FiberMap::PlHomeo { .. }
        )
    }

    pub fn is_isometry(&self) -> bool {
        matches!(self, FiberMap::Identity | FiberMap::Rotation { .. })
    }

    /// Integer expansion degree of a circle map, 1 for isometries.
    pub fn degree(&self) -> Option<u32> {
        match self {
            FiberMap::Identity | FiberMap::Rotation { .. } => Some(1),
            FiberMap::Expanding { degree } => Some(*degree),
            _ => None,
        }
    }

    pub fn inverse(&self) -> Option<FiberMap> {
        match *self {
            FiberMap::Identity => Some(FiberMap::Identity),
            FiberMap::Rotation { angle } => Some(FiberMap::Rotation { angle: frac(-angle) }),
            FiberMap::PlHomeo { break_x, break_y } => Some(FiberMap::PlHomeo {
                break_x: break_y,
                break_y: break_x,
            }),
            FiberMap::Shift | FiberMap::Expanding { .. } => None,
        }
    }

    /// Affine branches of the lifted map. Circle maps have a single branch over the whole line.
    pub fn branches(&self) -> Vec<AffineBranch> {
        let whole = |slope, intercept| {
            vec![AffineBranch { lo: f64::NEG_INFINITY, hi: f64::INFINITY, slope, intercept }]
        };
        match *self {
            FiberMap::Identity => whole(1.0, 0.0),
            FiberMap::Rotation { angle } => whole(1.0, angle),
            FiberMap::Expanding { degree } => whole(degree as f64, 0.0),
            FiberMap::PlHomeo { break_x, break_y } => {
                let s1 = break_y / break_x;
                let s2 = (1.0 - break_y) / (1.0 - break_x);
                vec![
                    AffineBranch { lo: 0.0, hi: break_x, slope: s1, intercept: 0.0 },
                    AffineBranch { lo: break_x, hi: 1.0, slope: s2, intercept: break_y - s2 * break_x },
                ]
            }
            FiberMap::Shift => Vec::new(),
        }
    }

    pub fn apply(&self, x: &FiberPoint) -> Result<FiberPoint> {
        match (self, x) {
            (FiberMap::Identity, _) => Ok(x.clone()),
            (FiberMap::Shift, FiberPoint::Symbolic(word)) => Ok(FiberPoint::Symbolic(word.shifted())),
            (FiberMap::Rotation { angle }, FiberPoint::Real(v)) => Ok(FiberPoint::Real(frac(v + angle))),
            (FiberMap::Expanding { degree }, FiberPoint::Real(v)) => {
                Ok(FiberPoint::Real(frac(*degree as f64 * v)))
            }
            (FiberMap::PlHomeo { .. }, FiberPoint::Real(v)) => {
                let b = self.branches();
                let br = if *v <= b[0].hi { b[0] } else { b[1] };
                Ok(FiberPoint::Real((br.slope * v + br.intercept).clamp(0.0, 1.0)))
            }
            _ => Err(Error::Incompatible(format!("map {self:?} cannot act on {x:?}"))),
        }
    }
}

/// The random generator, resolved to a [`FiberMap`] at each base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Identity,
    Shift,
    ExpandingCircle { degree: RandomInt },
    Rotation { angle: RandomScalar },
    /// One map per base symbol, `f_w = maps[w_0]`.
    Mixed { maps: Vec<FiberMap> },
    PlHomeo { break_x: Fraction, break_y: Fraction },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSystem {
    pub space: FiberSpace,
    pub generator: Generator,
    pub invertible: bool,
}

impl FiberSystem {
    pub fn new(space: FiberSpace, generator: Generator, invertible: bool) -> Result<Self> {
        let sys = FiberSystem { space, generator, invertible };
        sys.check_shape()?;
        Ok(sys)
    }

    fn check_shape(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSystem(msg.to_string()));
        match (&self.space, &self.generator) {
            (_, Generator::Identity) => {}
            (FiberSpace::Symbolic { .. }, Generator::Shift) => {}
            (FiberSpace::Symbolic { .. }, _) => return bad("symbolic fibers only support the shift"),
            (_, Generator::Shift) => return bad("the shift acts on symbolic fibers only"),
            (FiberSpace::Circle, Generator::ExpandingCircle { .. } | Generator::Rotation { .. }) => {}
            (FiberSpace::Circle, Generator::Mixed { maps }) => {
                if maps.is_empty() {
                    return bad("mixed generator needs at least one map");
                }
                if maps.iter().any(|m| m.degree().is_none()) {
                    return bad("mixed circle generator allows identity, rotation and expanding maps");
                }
            }
            (FiberSpace::Interval, Generator::PlHomeo { break_x, break_y }) => {
                let zero = Q::zero();
                let one = Q::one();
                let inside = |v: &Q| *v > zero && *v < one;
                if !inside(&break_x.0) || !inside(&break_y.0) {
                    return bad("piecewise-linear breakpoint must lie in (0,1)^2");
                }
            }
            (FiberSpace::Interval, Generator::Mixed { maps }) => {
                if maps.iter().any(|m| !matches!(m, FiberMap::Identity | FiberMap::PlHomeo { .. })) {
                    return bad("mixed interval generator allows identity and piecewise-linear maps");
                }
            }
            _ => return bad("generator does not act on this fiber space"),
        }
        if self.invertible && !self.generator_invertible() {
            return bad("generator is not invertible");
        }
        Ok(())
    }

    fn generator_invertible(&self) -> bool {
        match &self.generator {
            Generator::Identity | Generator::Rotation { .. } | Generator::PlHomeo { .. } => true,
            Generator::Shift | Generator::ExpandingCircle { .. } => false,
            Generator::Mixed { maps } => maps.iter().all(FiberMap::is_invertible),
        }
    }

    /// Checks table sizes and value ranges against a base environment.
    pub fn validate(&self, env: &BaseEnvironment) -> Result<()> {
        self.check_shape()?;
        if let FiberSpace::Symbolic { alphabet } = &self.space {
            alphabet.validate(env, 2, "alphabet bound")?;
        }
        match &self.generator {
            Generator::ExpandingCircle { degree } => degree.validate(env, 2, "degree"),
            Generator::Rotation { angle } => angle.validate(env),
            Generator::Mixed { maps } if (maps.len() as u32) < env.alphabet_size() => {
                Err(Error::InvalidSystem(format!(
                    "mixed generator has {} maps for an alphabet of {}",
                    maps.len(),
                    env.alphabet_size()
                )))
            }
            _ => Ok(()),
        }
    }

    /// f at θ^k(w).
    pub fn map_at(&self, w: &BasePoint, k: i64) -> FiberMap {
        match &self.generator {
            Generator::Identity => FiberMap::Identity,
            Generator::Shift => FiberMap::Shift,
            Generator::ExpandingCircle { degree } => FiberMap::Expanding { degree: degree.at(w, k) },
            Generator::Rotation { angle } => FiberMap::Rotation { angle: frac(angle.at_f64(w, k)) },
            Generator::Mixed { maps } => maps[w.symbol(k) as usize],
            Generator::PlHomeo { break_x, break_y } => FiberMap::PlHomeo {
                break_x: to_f64(&break_x.0),
                break_y: to_f64(&break_y.0),
            },
        }
    }

    pub fn is_isometric(&self) -> bool {
        match &self.generator {
            Generator::Identity | Generator::Rotation { .. } => true,
            Generator::Mixed { maps } => maps.iter().all(FiberMap::is_isometry),
            _ => false,
        }
    }
}

/// f_w^n(x): forward composition for `n ≥ 0`, inverse branches for `n < 0`.
pub fn cocycle_apply(sys: &FiberSystem, w: &BasePoint, x: &FiberPoint, n: i64) -> Result<FiberPoint> {
    if n < 0 && !sys.invertible {
        return Err(Error::NotInvertible(n));
    }
    let mut y = x.clone();
    if n >= 0 {
        for k in 0..n {
            y = sys.map_at(w, k).apply(&y)?;
        }
    } else {
        for k in (n..0).rev() {
            let inv = sys.map_at(w, k).inverse().ok_or(Error::NotInvertible(n))?;
            y = inv.apply(&y)?;
        }
    }
    Ok(y)
}

/// The orbit `f_w^k(x)` for `k` in `0..n`.
pub fn forward_orbit(sys: &FiberSystem, w: &BasePoint, x: &FiberPoint, n: usize) -> Result<Vec<FiberPoint>> {
    let mut out = Vec::with_capacity(n);
    let mut y = x.clone();
    for k in 0..n {
        if k > 0 {
            y = sys.map_at(w, k as i64 - 1).apply(&y)?;
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn term(a: Symbol, b: Symbol) -> Q {
    // |1/a - 1/b|
    if a == b {
        Q::zero()
    } else {
        let (a, b) = (a as i64, b as i64);
        q((a - b).abs(), a * b)
    }
}

/// Exact symbolic distance between eventually periodic sequences.
pub fn symbolic_distance_exact(x: &SymbolWord, y: &SymbolWord) -> Q {
    let start = x.tail_start().max(y.tail_start());
    let period = x.period().len().lcm(&y.period().len());
    let mut head = Q::zero();
    for i in 0..start {
        head += term(x.get(i), y.get(i)) * pow2_neg(i as u32);
    }
    let mut cycle = Q::zero();
    for r in 0..period {
        cycle += term(x.get(start + r), y.get(start + r)) * pow2_neg(r as u32);
    }
    // Σ_{j≥0} 2^{-j·period} = 1 / (1 - 2^{-period})
    let geometric = Q::one() / (Q::one() - pow2_neg(period as u32));
    head + cycle * pow2_neg(start as u32) * geometric
}

/// Certified bracket from the first `tail_depth` terms plus the geometric tail `2^{-(tail_depth-1)}`.
pub fn symbolic_distance_bracket(x: &SymbolWord, y: &SymbolWord, tail_depth: usize) -> (Q, Q) {
    let mut lower = Q::zero();
    for i in 0..tail_depth {
        lower += term(x.get(i), y.get(i)) * pow2_neg(i as u32);
    }
    let upper = &lower + pow2_neg(tail_depth as u32 - 1);
    (lower, upper)
}

/// Certified distance interval `(lower, upper)`.
pub fn fiber_distance(space: &FiberSpace, x: &FiberPoint, y: &FiberPoint, tail_depth: usize) -> Result<(f64, f64)> {
    match (space, x, y) {
        (FiberSpace::Symbolic { .. }, FiberPoint::Symbolic(a), FiberPoint::Symbolic(b)) => {
            let (lo, hi) = symbolic_distance_bracket(a, b, tail_depth.max(1));
            Ok((to_f64(&lo), to_f64(&hi)))
        }
        (FiberSpace::Circle, FiberPoint::Real(a), FiberPoint::Real(b)) => {
            let d = circle_distance(*a, *b);
            Ok((d, d))
        }
        (FiberSpace::Interval, FiberPoint::Real(a), FiberPoint::Real(b)) => {
            let d = (a - b).abs();
            Ok((d, d))
        }
        _ => Err(Error::Incompatible("points are not in this fiber space".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{BaseEnvironment, EnvKind};
    use std::sync::Arc;

    fn fair() -> Arc<BaseEnvironment> {
        BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair").unwrap()
    }

    fn doubling() -> FiberSystem {
        FiberSystem::new(
            FiberSpace::Circle,
            Generator::ExpandingCircle { degree: RandomInt::Constant(2) },
            false,
        )
        .unwrap()
    }

    #[test]
    fn canonical_words_compare_equal() {
        let a = SymbolWord::new(vec![2, 1, 1], vec![1]).unwrap();
        let b = SymbolWord::new(vec![2], vec![1, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.prefix(), &[2]);
        let c = SymbolWord::new(vec![1, 2], vec![1, 2]).unwrap();
        assert_eq!(c, SymbolWord::new(vec![], vec![1, 2]).unwrap());
    }

    #[test]
    fn cocycle_zero_is_identity() {
        let w = BasePoint::seeded(&fair(), 3);
        let x = FiberPoint::Real(0.3);
        assert_eq!(cocycle_apply(&doubling(), &w, &x, 0).unwrap(), x);
    }

    #[test]
    fn shift_drops_first_coordinate() {
        let sys = FiberSystem::new(
            FiberSpace::Symbolic { alphabet: RandomInt::Constant(3) },
            Generator::Shift,
            false,
        )
        .unwrap();
        let w = BasePoint::seeded(&fair(), 1);
        let x = FiberPoint::Symbolic(SymbolWord::new(vec![3, 1, 2], vec![1]).unwrap());
        let y = cocycle_apply(&sys, &w, &x, 1).unwrap();
        assert_eq!(y.word().unwrap().take(3), vec![1, 2, 1]);
    }

    #[test]
    fn doubling_three_steps() {
        let w = BasePoint::seeded(&fair(), 3);
        let y = cocycle_apply(&doubling(), &w, &FiberPoint::Real(0.3), 3).unwrap();
        // 0.3 -> 0.6 -> 0.2 -> 0.4
        assert!((y.real().unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn negative_time_needs_invertibility() {
        let w = BasePoint::seeded(&fair(), 3);
        let err = cocycle_apply(&doubling(), &w, &FiberPoint::Real(0.3), -1);
        assert!(matches!(err, Err(Error::NotInvertible(-1))));
    }

    #[test]
    fn rotation_inverse_round_trip() {
        let sys = FiberSystem::new(
            FiberSpace::Circle,
            Generator::Rotation { angle: RandomScalar::table(vec![q(1, 3), q(2, 7)]) },
            true,
        )
        .unwrap();
        let w = BasePoint::seeded(&fair(), 8);
        let x = FiberPoint::Real(0.123);
        let y = cocycle_apply(&sys, &w, &x, 5).unwrap();
        let back = cocycle_apply(&sys, &w.advance(5), &y, -5).unwrap();
        assert!(circle_distance(back.real().unwrap(), 0.123) < 1e-12);
    }

    #[test]
    fn pl_homeo_inverse_round_trip() {
        let sys = FiberSystem::new(
            FiberSpace::Interval,
            Generator::PlHomeo { break_x: Fraction(q(1, 3)), break_y: Fraction(q(2, 3)) },
            true,
        )
        .unwrap();
        let w = BasePoint::seeded(&fair(), 8);
        for v in [0.0, 0.1, 1.0 / 3.0, 0.5, 0.9, 1.0] {
            let x = FiberPoint::Real(v);
            let y = cocycle_apply(&sys, &w, &x, 3).unwrap();
            let back = cocycle_apply(&sys, &w.advance(3), &y, -3).unwrap();
            assert!((back.real().unwrap() - v).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn shift_rejects_real_space() {
        assert!(FiberSystem::new(FiberSpace::Circle, Generator::Shift, false).is_err());
        assert!(FiberSystem::new(
            FiberSpace::Circle,
            Generator::ExpandingCircle { degree: RandomInt::Constant(2) },
            true
        )
        .is_err());
    }

    #[test]
    fn distance_examples() {
        let space = FiberSpace::Symbolic { alphabet: RandomInt::Constant(2) };
        let x = FiberPoint::Symbolic(SymbolWord::constant(1));
        let y = FiberPoint::Symbolic(SymbolWord::new(vec![2], vec![1]).unwrap());
        let (lo, hi) = fiber_distance(&space, &x, &x, 10).unwrap();
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 2f64.powi(-9));
        let (lo, hi) = fiber_distance(&space, &x, &y, 10).unwrap();
        assert!(lo <= 0.5 && 0.5 <= hi);
        assert_eq!(symbolic_distance_exact(x.word().unwrap(), y.word().unwrap()), q(1, 2));
        let (lo, hi) = fiber_distance(&FiberSpace::Circle, &FiberPoint::Real(0.1), &FiberPoint::Real(0.9), 1).unwrap();
        assert!((lo - 0.2).abs() < 1e-15 && lo == hi);
    }

    #[test]
    fn exact_distance_of_periodic_tails() {
        // x = 1111..., y = 2121...: terms 1/2 at even indices: (1/2) Σ 4^{-j} = 2/3
        let x = SymbolWord::constant(1);
        let y = SymbolWord::new(vec![], vec![2, 1]).unwrap();
        assert_eq!(symbolic_distance_exact(&x, &y), q(2, 3));
    }

    #[test]
    fn symbolic_membership_respects_bounds() {
        let env = fair();
        let space = FiberSpace::Symbolic { alphabet: RandomInt::SymbolTable(vec![2, 3]) };
        let w = BasePoint::pinned(&env, &[0, 1]).unwrap();
        let ok = FiberPoint::Symbolic(SymbolWord::new(vec![2, 3], vec![1]).unwrap());
        let bad = FiberPoint::Symbolic(SymbolWord::new(vec![3], vec![1]).unwrap());
        assert!(space.contains(&w, &ok));
        assert!(!space.contains(&w, &bad));
    }
}
