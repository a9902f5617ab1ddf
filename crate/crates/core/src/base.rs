//! The driving system: an invertible, probability-preserving map θ on Ω, base points along
//! its orbits, and random variables over Ω.
//!
//! Ω is never materialized. A base point is a seed plus an offset along the θ-orbit; the symbol
//! at any orbit index is a pure function of `(seed, index)`, so advancing is offset arithmetic
//! and θ is exactly invertible.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{to_f64, Fraction, Q};

pub type Symbol = u32;

const SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvKind {
    Singleton,
    FiniteRotation { m: u32 },
    Bernoulli { weights: Vec<f64> },
    Markov { matrix: Vec<Vec<f64>>, stationary: Vec<f64> },
}

#[derive(Debug)]
pub struct BaseEnvironment {
    kind: EnvKind,
    description: String,
    /// Cumulative rows: one row for Bernoulli, forward rows then reversed-chain rows for Markov.
    cdf: Vec<Vec<f64>>,
    reverse_cdf: Vec<Vec<f64>>,
}

fn cumulative(row: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    row.iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> Symbol {
    let scaled = u * cdf.last().copied().unwrap_or(1.0);
    cdf.iter().position(|&c| scaled < c).unwrap_or(cdf.len() - 1) as Symbol
}

fn check_probability_vector(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidEnvironment(format!("{what} is empty")));
    }
    if let Some(p) = v.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::InvalidEnvironment(format!(
            "{what} has a non-positive entry {p}"
        )));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidEnvironment(format!(
            "{what} sums to {sum}, not 1"
        )));
    }
    Ok(())
}

impl BaseEnvironment {
    pub fn new(kind: EnvKind, description: impl Into<String>) -> Result<Arc<Self>> {
        let mut cdf = Vec::new();
        let mut reverse_cdf = Vec::new();
        match &kind {
            EnvKind::Singleton => {}
            EnvKind::FiniteRotation { m } => {
                if *m == 0 {
                    return Err(Error::InvalidEnvironment("rotation period must be positive".into()));
                }
            }
            EnvKind::Bernoulli { weights } => {
                check_probability_vector(weights, "bernoulli weights")?;
                cdf.push(cumulative(weights));
            }
            EnvKind::Markov { matrix, stationary } => {
                let n = stationary.len();
                check_probability_vector(stationary, "stationary vector")?;
                if matrix.len() != n {
                    return Err(Error::InvalidEnvironment(format!(
                        "markov matrix has {} rows, stationary vector has {n} entries",
                        matrix.len()
                    )));
                }
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidEnvironment(format!("markov row {i} has wrong length")));
                    }
                    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                        return Err(Error::InvalidEnvironment(format!("markov row {i} has a negative entry")));
                    }
                    let s: f64 = row.iter().sum();
                    if (s - 1.0).abs() > SUM_TOL {
                        return Err(Error::InvalidEnvironment(format!("markov row {i} sums to {s}")));
                    }
                }
                for j in 0..n {
                    let pj: f64 = (0..n).map(|i| stationary[i] * matrix[i][j]).sum();
                    if (pj - stationary[j]).abs() > STATIONARY_TOL {
                        return Err(Error::InvalidEnvironment(format!(
                            "stationary vector is not stationary at symbol {j}"
                        )));
                    }
                }
                cdf = matrix.iter().map(|r| cumulative(r)).collect();
                // time reversal: P*(j -> i) = π_i P(i -> j) / π_j
                reverse_cdf = (0..n)
                    .map(|j| {
                        let row: Vec<f64> = (0..n)
                            .map(|i| stationary[i] * matrix[i][j] / stationary[j])
                            .collect();
                        cumulative(&row)
                    })
                    .collect();
            }
        }
        Ok(Arc::new(BaseEnvironment {
            kind,
            description: description.into(),
            cdf,
            reverse_cdf,
        }))
    }

    pub fn singleton() -> Arc<Self> {
        Self::new(EnvKind::Singleton, "singleton").expect("singleton is always valid")
    }

    pub fn kind(&self) -> &EnvKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn alphabet_size(&self) -> u32 {
        match &self.kind {
            EnvKind::Singleton => 1,
            EnvKind::FiniteRotation { m } => *m,
            EnvKind::Bernoulli { weights } => weights.len() as u32,
            EnvKind::Markov { stationary, .. } => stationary.len() as u32,
        }
    }

    /// The one-dimensional marginal of ℙ on the symbol at index 0.
    pub fn marginal(&self) -> Vec<f64> {
        match &self.kind {
            EnvKind::Singleton => vec![1.0],
            EnvKind::FiniteRotation { m } => vec![1.0 / *m as f64; *m as usize],
            EnvKind::Bernoulli { weights } => weights.clone(),
            EnvKind::Markov { stationary, .. } => stationary.clone(),
        }
    }

    /// `∫ g(w_0) dℙ(w)` for a function of the current symbol.
    pub fn integrate(&self, g: impl Fn(Symbol) -> f64) -> f64 {
        self.marginal()
            .iter()
            .enumerate()
            .map(|(s, p)| p * g(s as Symbol))
            .sum()
    }
}

/// Counter-based seed derivation: item `index` of a run seeded by `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

fn uniform_at(seed: u64, index: i64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.random::<f64>()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Source {
    Seeded(u64),
    /// Explicit periodic symbol sequence, index 0 at `word[0]`.
    Pinned(Arc<[Symbol]>),
}

/// A point w of Ω together with its position on the θ-orbit.
#[derive(Clone)]
pub struct BasePoint {
    env: Arc<BaseEnvironment>,
    source: Source,
    offset: i64,
}

impl BasePoint {
    pub fn seeded(env: &Arc<BaseEnvironment>, seed: u64) -> Self {
        let offset = match env.kind {
            EnvKind::FiniteRotation { m } => (seed % m as u64) as i64,
            _ => 0,
        };
        BasePoint {
            env: Arc::clone(env),
            source: Source::Seeded(seed),
            offset,
        }
    }

    /// A base point whose symbol sequence is the two-sided periodic repetition of `word`.
    pub fn pinned(env: &Arc<BaseEnvironment>, word: &[Symbol]) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidEnvironment("pinned word is empty".into()));
        }
        let n = env.alphabet_size();
        if let Some(s) = word.iter().find(|s| **s >= n) {
            return Err(Error::InvalidEnvironment(format!(
                "symbol {s} outside alphabet of size {n}"
            )));
        }
        Ok(BasePoint {
            env: Arc::clone(env),
            source: Source::Pinned(word.into()),
            offset: 0,
        })
    }

    pub fn env(&self) -> &Arc<BaseEnvironment> {
        &self.env
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Stable label used in reports.
    pub fn label(&self) -> String {
        match &self.source {
            Source::Seeded(s) => format!("seed:{s}@{}", self.offset),
            Source::Pinned(w) => format!("pinned:{:?}@{}", w, self.offset),
        }
    }

    /// θ^k(w).
    pub fn advance(&self, k: i64) -> BasePoint {
        let mut offset = self.offset + k;
        if let EnvKind::FiniteRotation { m } = self.env.kind {
            offset = offset.rem_euclid(m as i64);
        }
        BasePoint {
            env: Arc::clone(&self.env),
            source: self.source.clone(),
            offset,
        }
    }

    /// The symbol of θ^k(w).
    pub fn symbol(&self, k: i64) -> Symbol {
        self.symbol_abs(self.offset + k)
    }

    /// Symbols of θ^k(w) for `k` in `lo..hi`.
    pub fn symbols(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        if hi <= lo {
            return Vec::new();
        }
        match (&self.env.kind, &self.source) {
            (EnvKind::Markov { stationary, .. }, Source::Seeded(seed)) => {
                // one path anchored at absolute index 0, walked outwards in both directions
                let (a, b) = (self.offset + lo, self.offset + hi);
                let first = a.min(0);
                let last = (b - 1).max(0);
                let mut path = vec![0 as Symbol; (last - first + 1) as usize];
                let at = |i: i64| (i - first) as usize;
                path[at(0)] = pick(&cumulative(stationary), uniform_at(*seed, 0));
                for i in 1..=last {
                    path[at(i)] = pick(&self.env.cdf[path[at(i - 1)] as usize], uniform_at(*seed, i));
                }
                for i in (first..0).rev() {
                    path[at(i)] = pick(&self.env.reverse_cdf[path[at(i + 1)] as usize], uniform_at(*seed, i));
                }
                path[at(a)..at(b)].to_vec()
            }
            _ => (lo..hi).map(|k| self.symbol(k)).collect(),
        }
    }

    fn symbol_abs(&self, idx: i64) -> Symbol {
        if let Source::Pinned(word) = &self.source {
            return word[idx.rem_euclid(word.len() as i64) as usize];
        }
        let Source::Seeded(seed) = self.source else { unreachable!() };
        match &self.env.kind {
            EnvKind::Singleton => 0,
            EnvKind::FiniteRotation { m } => idx.rem_euclid(*m as i64) as Symbol,
            EnvKind::Bernoulli { .. } => pick(&self.env.cdf[0], uniform_at(seed, idx)),
            EnvKind::Markov { stationary, .. } => {
                let anchor = cumulative(stationary);
                let mut s = pick(&anchor, uniform_at(seed, 0));
                if idx >= 0 {
                    for i in 1..=idx {
                        s = pick(&self.env.cdf[s as usize], uniform_at(seed, i));
                    }
                } else {
                    for i in (idx..0).rev() {
                        s = pick(&self.env.reverse_cdf[s as usize], uniform_at(seed, i));
                    }
                }
                s
            }
        }
    }
}

impl PartialEq for BasePoint {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.env, &other.env) || self.env.kind == other.env.kind)
            && self.source == other.source
            && self.offset == other.offset
    }
}

impl fmt::Debug for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasePoint({})", self.label())
    }
}

/// `count` ℙ-distributed base points, deterministic in `master_seed`.
pub fn sample_base(env: &Arc<BaseEnvironment>, count: usize, master_seed: u64) -> Vec<BasePoint> {
    (0..count as u64)
        .map(|i| match env.kind {
            EnvKind::Singleton => BasePoint::seeded(env, 0),
            _ => BasePoint::seeded(env, derive_seed(master_seed, i)),
        })
        .collect()
}

mod window_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        table: &BTreeMap<Vec<Symbol>, Fraction>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let text: BTreeMap<String, &Fraction> = table
            .iter()
            .map(|(k, v)| {
                let key = k.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
                (key, v)
            })
            .collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<Symbol>, Fraction>, D::Error> {
        let text = BTreeMap::<String, Fraction>::deserialize(d)?;
        text.into_iter()
            .map(|(k, v)| {
                let key = k
                    .split(',')
                    .map(|s| s.trim().parse::<Symbol>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| serde::de::Error::custom(format!("bad window key {k:?}: {e}")))?;
                Ok((key, v))
            })
            .collect()
    }
}

/// A random variable δ: Ω → (0, ∞), evaluated along orbits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RandomScalar {
    Constant(Fraction),
    /// Value indexed by the current base symbol.
    SymbolTable(Vec<Fraction>),
    /// Value indexed by the symbol window `[k-radius, k+radius]` around θ^k(w).
    Window {
        radius: u32,
        #[serde(with = "window_table")]
        table: BTreeMap<Vec<Symbol>, Fraction>,
        default: Fraction,
    },
}

impl RandomScalar {
    pub fn constant(v: Q) -> Self {
        RandomScalar::Constant(Fraction(v))
    }

    pub fn table(values: Vec<Q>) -> Self {
        RandomScalar::SymbolTable(values.into_iter().map(Fraction).collect())
    }

    fn values(&self) -> Vec<&Q> {
        match self {
            RandomScalar::Constant(c) => vec![&c.0],
            RandomScalar::SymbolTable(t) => t.iter().map(|f| &f.0).collect(),
            RandomScalar::Window { table, default, .. } => {
                table.values().map(|f| &f.0).chain(std::iter::once(&default.0)).collect()
            }
        }
    }

    pub fn validate(&self, env: &BaseEnvironment) -> Result<()> {
        if self.values().iter().any(|v| **v <= Q::from_integer(0.into())) {
            return Err(Error::InvalidScalar("values must be strictly positive".into()));
        }
        match self {
            RandomScalar::SymbolTable(t) if (t.len() as u32) < env.alphabet_size() => {
                Err(Error::InvalidScalar(format!(
                    "symbol table has {} entries for an alphabet of {}",
                    t.len(),
                    env.alphabet_size()
                )))
            }
            RandomScalar::Window { radius, table, .. } => {
                let len = 2 * *radius as usize + 1;
                match table.keys().find(|k| k.len() != len) {
                    Some(k) => Err(Error::InvalidScalar(format!(
                        "window key {k:?} does not have length {len}"
                    ))),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Exact value at θ^k(w).
    pub fn at(&self, w: &BasePoint, k: i64) -> Q {
        match self {
            RandomScalar::Constant(c) => c.0.clone(),
            RandomScalar::SymbolTable(t) => t[w.symbol(k) as usize].0.clone(),
            RandomScalar::Window { radius, table, default } => {
                let r = *radius as i64;
                let key = w.symbols(k - r, k + r + 1);
                table.get(&key).unwrap_or(default).0.clone()
            }
        }
    }

    pub fn at_f64(&self, w: &BasePoint, k: i64) -> f64 {
        to_f64(&self.at(w, k))
    }

    pub fn eval(&self, w: &BasePoint) -> f64 {
        self.at_f64(w, 0)
    }

    /// `δ/2`, the radius used when passing from continuum-wise expansivity to Γ-set form.
    pub fn halved(&self) -> RandomScalar {
        self.scaled(&(Q::from_integer(1.into()) / Q::from_integer(2.into())))
    }

    pub fn scaled(&self, factor: &Q) -> RandomScalar {
        let f = |v: &Fraction| Fraction(&v.0 * factor);
        match self {
            RandomScalar::Constant(c) => RandomScalar::Constant(f(c)),
            RandomScalar::SymbolTable(t) => RandomScalar::SymbolTable(t.iter().map(f).collect()),
            RandomScalar::Window { radius, table, default } => RandomScalar::Window {
                radius: *radius,
                table: table.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
                default: f(default),
            },
        }
    }

    /// Closed-form `∫ δ dℙ` for the constant and symbol-table forms.
    pub fn integral(&self, env: &BaseEnvironment) -> Option<f64> {
        match self {
            RandomScalar::Constant(c) => Some(to_f64(&c.0)),
            RandomScalar::SymbolTable(t) => Some(env.integrate(|s| to_f64(&t[s as usize].0))),
            RandomScalar::Window { .. } => None,
        }
    }

    pub fn max_value(&self) -> Q {
        self.values().into_iter().max().cloned().expect("at least one value")
    }

    pub fn min_value(&self) -> Q {
        self.values().into_iter().min().cloned().expect("at least one value")
    }
}

/// An integer-valued random variable (alphabet bounds, map degrees).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RandomInt {
    Constant(u32),
    SymbolTable(Vec<u32>),
}

impl RandomInt {
    pub fn at(&self, w: &BasePoint, k: i64) -> u32 {
        match self {
            RandomInt::Constant(c) => *c,
            RandomInt::SymbolTable(t) => t[w.symbol(k) as usize],
        }
    }

    pub fn max(&self) -> u32 {
        match self {
            RandomInt::Constant(c) => *c,
            RandomInt::SymbolTable(t) => t.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn min(&self) -> u32 {
        match self {
            RandomInt::Constant(c) => *c,
            RandomInt::SymbolTable(t) => t.iter().copied().min().unwrap_or(0),
        }
    }

    pub fn validate(&self, env: &BaseEnvironment, lower: u32, what: &str) -> Result<()> {
        if let RandomInt::SymbolTable(t) = self {
            if (t.len() as u32) < env.alphabet_size() {
                return Err(Error::InvalidScalar(format!(
                    "{what}: table has {} entries for an alphabet of {}",
                    t.len(),
                    env.alphabet_size()
                )));
            }
        }
        if self.min() < lower {
            return Err(Error::InvalidScalar(format!("{what}: values must be at least {lower}")));
        }
        Ok(())
    }

    pub fn integral(&self, env: &BaseEnvironment, g: impl Fn(u32) -> f64) -> f64 {
        match self {
            RandomInt::Constant(c) => g(*c),
            RandomInt::SymbolTable(t) => env.integrate(|s| g(t[s as usize])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn fair() -> Arc<BaseEnvironment> {
        BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.5, 0.5] }, "fair coin").unwrap()
    }

    #[test]
    fn advance_zero_is_identity() {
        let w = BasePoint::seeded(&fair(), 9);
        assert_eq!(w.advance(0), w);
    }

    #[test]
    fn rotation_wraps() {
        let env = BaseEnvironment::new(EnvKind::FiniteRotation { m: 4 }, "rot4").unwrap();
        let w = BasePoint::seeded(&env, 3);
        assert_eq!(w.offset(), 3);
        assert_eq!(w.advance(1).offset(), 0);
        assert_eq!(w.advance(-5).offset(), 2);
    }

    #[test]
    fn shifted_window_matches_brute_index_shift() {
        let w = BasePoint::seeded(&fair(), 1234);
        let window: Vec<Symbol> = (-20..20).map(|k| w.symbol(k)).collect();
        let v = w.advance(2);
        assert_eq!(v.symbol(5), w.symbol(7));
        for k in -20..18 {
            assert_eq!(v.symbol(k), window[(k + 2 + 20) as usize]);
        }
    }

    #[test]
    fn singleton_is_constant() {
        let env = BaseEnvironment::singleton();
        let pts = sample_base(&env, 3, 77);
        assert!(pts.iter().all(|p| *p == pts[0]));
        assert!((-10..10).all(|k| pts[0].symbol(k) == 0));
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let env = fair();
        let a = sample_base(&env, 10_000, 5);
        let b = sample_base(&env, 10_000, 5);
        assert_eq!(a, b);
        let zeros = a.iter().filter(|w| w.symbol(0) == 0).count();
        let freq = zeros as f64 / a.len() as f64;
        assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn markov_window_is_consistent_with_pointwise_symbols() {
        let env = BaseEnvironment::new(
            EnvKind::Markov {
                matrix: vec![vec![0.9, 0.1], vec![0.3, 0.7]],
                stationary: vec![0.75, 0.25],
            },
            "sticky",
        )
        .unwrap();
        let w = BasePoint::seeded(&env, 42);
        let bulk = w.symbols(-15, 15);
        let single: Vec<Symbol> = (-15..15).map(|k| w.symbol(k)).collect();
        assert_eq!(bulk, single);
        assert_eq!(w.advance(3).symbol(-1), w.symbol(2));
    }

    #[test]
    fn markov_rejects_non_stationary_vector() {
        let err = BaseEnvironment::new(
            EnvKind::Markov {
                matrix: vec![vec![0.9, 0.1], vec![0.3, 0.7]],
                stationary: vec![0.5, 0.5],
            },
            "bad",
        );
        assert!(err.is_err());
    }

    #[test]
    fn weights_must_be_positive_and_normalized() {
        assert!(BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![0.6, 0.6] }, "").is_err());
        assert!(BaseEnvironment::new(EnvKind::Bernoulli { weights: vec![1.0, 0.0] }, "").is_err());
    }

    #[test]
    fn symbol_table_scalar() {
        let env = fair();
        let delta = RandomScalar::table(vec![q(1, 4), q(1, 9)]);
        delta.validate(&env).unwrap();
        let w = BasePoint::pinned(&env, &[1, 0, 0, 1]).unwrap();
        assert_eq!(delta.at(&w, 0), q(1, 9));
        assert_eq!(delta.at(&w, 3), q(1, 9));
        assert_eq!(delta.at(&w, 1), q(1, 4));
        assert_eq!(delta.at(&w.advance(3), 0), delta.at(&w, 3));
        assert_eq!(RandomScalar::constant(q(1, 20)).eval(&w), 0.05);
    }

    #[test]
    fn window_scalar_reads_neighbourhood() {
        let env = fair();
        let mut table = BTreeMap::new();
        table.insert(vec![1, 0, 1], Fraction(q(1, 2)));
        let delta = RandomScalar::Window { radius: 1, table, default: Fraction(q(1, 10)) };
        delta.validate(&env).unwrap();
        let w = BasePoint::pinned(&env, &[0, 1]).unwrap();
        // window around index 0 is (1, 0, 1)
        assert_eq!(delta.at(&w, 0), q(1, 2));
        assert_eq!(delta.at(&w, 1), q(1, 10));
    }

    #[test]
    fn closed_form_integral() {
        let env = fair();
        let k = RandomInt::SymbolTable(vec![2, 3]);
        let mean_log = k.integral(&env, |v| (v as f64).ln());
        assert!((mean_log - (2f64.ln() + 3f64.ln()) / 2.0).abs() < 1e-15);
        let delta = RandomScalar::table(vec![q(1, 4), q(1, 8)]);
        assert_eq!(delta.integral(&env), Some(0.1875));
    }

    #[test]
    fn non_positive_scalar_is_rejected() {
        let env = fair();
        assert!(RandomScalar::table(vec![q(1, 4), q(0, 1)]).validate(&env).is_err());
        assert!(RandomScalar::table(vec![q(1, 4)]).validate(&env).is_err());
    }

    #[test]
    fn halving() {
        let h = RandomScalar::table(vec![q(1, 4), q(1, 9)]).halved();
        assert_eq!(h, RandomScalar::table(vec![q(1, 8), q(1, 18)]));
    }
}
