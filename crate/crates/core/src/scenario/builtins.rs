use std::sync::Arc;

use crate::base::{BaseEnvironment, EnvKind, RandomInt, RandomScalar};
use crate::disintegration::Disintegration;
use crate::entropy::{EntropyParams, TheoremAParams};
use crate::exact::{from_f64, q, Fraction};
use crate::expansivity::{ChainEntry, ContinuumParams, Notion, SampleParams, Verdict};
use crate::fiber::{FiberMap, FiberSpace, FiberSystem, Generator};
use crate::measure::VectorRule;

use super::{ConstructConfig, Diagnostic, OutputSpec, ScenarioConfig, CONFIG_SCHEMA};

const GOLDEN: f64 = 0.6180339887498949;
const SILVER: f64 = 0.41421356237309503;

/// A named preset with the verdicts it is expected to produce.
#[derive(Clone, Copy, Debug)]
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    pub expected: &'static [(Notion, Verdict)],
    build: fn() -> ScenarioConfig,
}

impl Builtin {
    pub fn config(&self) -> ScenarioConfig {
        (self.build)()
    }
}

const REGISTRY: [Builtin; 4] = [
    Builtin {
        name: "example1_random_shift",
        summary: "random full shift over k in {2,3}, uniform cylinder product, delta = k^-2",
        expected: &[
            (Notion::PositivelyRandomExpansive, Verdict::EvidenceFor),
            (Notion::CountablyExpansive, Verdict::EvidenceFor),
            (Notion::ContinuumWise, Verdict::EvidenceFor),
        ],
        build: example1,
    },
    Builtin {
        name: "example2_isometry",
        summary: "random circle rotations with Lebesgue fibers, delta = 0.05",
        expected: &[
            (Notion::RandomExpansive, Verdict::Refuted),
            (Notion::CountablyExpansive, Verdict::Refuted),
            (Notion::ContinuumWise, Verdict::Refuted),
        ],
        build: example2,
    },
    Builtin {
        name: "example3_expanding",
        summary: "random expanding circle maps of degree 2 or 3, Lebesgue fibers",
        expected: &[
            (Notion::PositivelyRandomExpansive, Verdict::EvidenceFor),
            (Notion::CountablyExpansive, Verdict::EvidenceFor),
            (Notion::ContinuumWise, Verdict::EvidenceFor),
        ],
        build: example3,
    },
    Builtin {
        name: "example4_continuum_mix",
        summary: "symbol 0 rotates by the golden angle, symbol 1 doubles; delta = 0.1",
        expected: &[
            (Notion::PositivelyRandomExpansive, Verdict::EvidenceFor),
            (Notion::CountablyExpansive, Verdict::EvidenceFor),
            (Notion::ContinuumWise, Verdict::EvidenceFor),
        ],
        build: example4,
    },
];

pub fn builtin_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|b| b.name).collect()
}

pub fn builtin(name: &str) -> Option<Builtin> {
    REGISTRY.iter().find(|b| b.name == name).copied()
}

fn fair() -> EnvKind {
    EnvKind::Bernoulli { weights: vec![0.5, 0.5] }
}

fn scalar(v: f64) -> RandomScalar {
    RandomScalar::constant(from_f64(v).expect("finite"))
}

fn sample(depth: usize, base: usize, fiber: usize, seed: u64) -> SampleParams {
    SampleParams::new(depth, base, fiber, seed)
}

fn continuum(base: usize, seed: u64) -> ContinuumParams {
    ContinuumParams { segment: 1e-3, max_n: 200, base_samples: base, fiber_samples: 1, seed }
}

fn config(
    name: &str,
    system: FiberSystem,
    disintegration: Disintegration,
    delta: RandomScalar,
    diagnostics: Vec<Diagnostic>,
) -> ScenarioConfig {
    ScenarioConfig {
        schema: CONFIG_SCHEMA.to_string(),
        name: name.to_string(),
        environment: fair(),
        system,
        disintegration,
        delta,
        diagnostics,
        output: OutputSpec::default(),
    }
}

pub fn random_shift() -> FiberSystem {
    FiberSystem::new(FiberSpace::Symbolic { alphabet: RandomInt::SymbolTable(vec![2, 3]) }, Generator::Shift, false)
        .expect("valid")
}

pub fn isometry() -> FiberSystem {
    FiberSystem::new(
        FiberSpace::Circle,
        Generator::Rotation { angle: RandomScalar::table(vec![from_f64(GOLDEN).unwrap(), from_f64(SILVER).unwrap()]) },
        true,
    )
    .expect("valid")
}

pub fn expanding() -> FiberSystem {
    FiberSystem::new(FiberSpace::Circle, Generator::ExpandingCircle { degree: RandomInt::SymbolTable(vec![2, 3]) }, false)
        .expect("valid")
}

pub fn continuum_mix() -> FiberSystem {
    FiberSystem::new(
        FiberSpace::Circle,
        Generator::Mixed { maps: vec![FiberMap::Rotation { angle: GOLDEN }, FiberMap::Expanding { degree: 2 }] },
        false,
    )
    .expect("valid")
}

/// Invertible piecewise-linear homeomorphism of `[0,1]` with slopes 2 and 1/2.
pub fn pl_interval_system() -> FiberSystem {
    FiberSystem::new(
        FiberSpace::Interval,
        Generator::PlHomeo { break_x: Fraction(q(1, 3)), break_y: Fraction(q(2, 3)) },
        true,
    )
    .expect("valid")
}

/// Product rule with `3/4` on symbol 1 at the first coordinate, uniform afterwards.
pub fn skewed_start() -> Disintegration {
    Disintegration::Product { head: vec![VectorRule::Lead(Fraction(q(3, 4)))], tail: VectorRule::Uniform }
}

fn k_minus_two() -> RandomScalar {
    RandomScalar::table(vec![q(1, 4), q(1, 9)])
}

fn example1() -> ScenarioConfig {
    config(
        "example1_random_shift",
        random_shift(),
        Disintegration::UniformProduct,
        k_minus_two(),
        vec![
            Diagnostic::Expansive(sample(16, 20, 4, 101)),
            Diagnostic::Countable(sample(12, 10, 2, 102)),
            Diagnostic::ContinuumWise(continuum(10, 103)),
            Diagnostic::Entropy(EntropyParams::new(12, 40, 104)),
        ],
    )
}

fn example2() -> ScenarioConfig {
    config(
        "example2_isometry",
        isometry(),
        Disintegration::Lebesgue { resolution: 64 },
        RandomScalar::constant(q(1, 20)),
        vec![
            Diagnostic::Expansive(sample(50, 10, 3, 201)),
            Diagnostic::Countable(sample(20, 10, 2, 202)),
            Diagnostic::ContinuumWise(continuum(20, 203)),
            Diagnostic::TheoremA(TheoremAParams::new(EntropyParams::new(14, 50, 204), 14, 10)),
            Diagnostic::ConstructInvariant(ConstructConfig {
                n_max: 16,
                probe_depth: 8,
                base_samples: 5,
                seed: 205,
                expansive: sample(20, 5, 2, 206),
            }),
        ],
    )
}

fn example3() -> ScenarioConfig {
    config(
        "example3_expanding",
        expanding(),
        Disintegration::Lebesgue { resolution: 64 },
        RandomScalar::constant(q(1, 20)),
        vec![
            Diagnostic::Expansive(sample(14, 20, 4, 301)),
            Diagnostic::Countable(sample(14, 10, 2, 302)),
            Diagnostic::ContinuumWise(continuum(20, 303)),
            Diagnostic::Entropy(EntropyParams::new(14, 500, 304)),
            Diagnostic::TheoremA(TheoremAParams::new(EntropyParams::new(14, 200, 305), 14, 50)),
        ],
    )
}

fn example4() -> ScenarioConfig {
    config(
        "example4_continuum_mix",
        continuum_mix(),
        Disintegration::Lebesgue { resolution: 64 },
        scalar(0.1),
        vec![
            Diagnostic::ContinuumWise(continuum(100, 401)),
            Diagnostic::Expansive(sample(24, 20, 3, 402)),
            Diagnostic::Countable(sample(24, 10, 2, 403)),
        ],
    )
}

/// Non-atomic disintegrations available on a fiber space.
pub fn non_atomic_disintegrations(space: &FiberSpace) -> Vec<Disintegration> {
    if space.is_symbolic() {
        vec![
            Disintegration::UniformProduct,
            skewed_start(),
            Disintegration::Cesaro { inner: Box::new(skewed_start()), order: 8 },
        ]
    } else {
        vec![Disintegration::Lebesgue { resolution: 64 }, Disintegration::Grid { weights: vec![0.4, 0.3, 0.2, 0.1] }]
    }
}

/// The four built-ins as implication-chain entries.
pub fn builtin_chain_suite(seed: u64) -> Vec<ChainEntry> {
    REGISTRY
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let cfg = b.config();
            let env: Arc<BaseEnvironment> = cfg.environment().expect("built-in environments are valid");
            let depth = if cfg.system.space.is_symbolic() { 12 } else { 20 };
            ChainEntry {
                name: b.name.to_string(),
                env,
                disintegrations: non_atomic_disintegrations(&cfg.system.space),
                sys: cfg.system,
                delta: cfg.delta,
                expansive: sample(depth, 8, 2, seed.wrapping_add(i as u64)),
                continuum: continuum(20, seed.wrapping_add(100 + i as u64)),
            }
        })
        .collect()
}
