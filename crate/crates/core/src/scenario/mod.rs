//! Scenario configuration: one JSON document naming an environment, a fiber system, a
//! disintegration rule, a radius and a list of diagnostics.

mod builtins;
mod report;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::base::{BaseEnvironment, EnvKind, RandomScalar};
use crate::disintegration::Disintegration;
use crate::entropy::{EntropyParams, TheoremAParams};
use crate::error::{Error, Result};
use crate::expansivity::{ContinuumParams, SampleParams};
use crate::fiber::{FiberSystem, Generator};
use crate::gamma::Sided;

pub use builtins::{builtin, builtin_chain_suite, builtin_names, pl_interval_system, skewed_start, Builtin};
pub use report::{emit_report, run_scenario, DiagnosticOutcome, OutputFile, RunReport, REPORT_SCHEMA};

pub const CONFIG_SCHEMA: &str = "fiberwise.scenario/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableClassConfig {
    pub gammas: Vec<RandomScalar>,
    pub js: Vec<usize>,
    pub depth: usize,
    pub base_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    pub n_max: usize,
    #[serde(default = "default_probe")]
    pub probe_depth: usize,
    pub base_samples: usize,
    pub seed: u64,
    pub expansive: SampleParams,
}

fn default_probe() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackConfig {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    /// Further non-atomic disintegrations checked alongside the scenario's own.
    #[serde(default)]
    pub alternatives: Vec<Disintegration>,
    pub expansive: SampleParams,
    pub continuum: ContinuumParams,
}

/// One diagnostic with its parameters, written `{"expansive": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Diagnostic {
    Expansive(SampleParams),
    Countable(SampleParams),
    ContinuumWise(ContinuumParams),
    StableClass(StableClassConfig),
    Entropy(EntropyParams),
    TheoremA(TheoremAParams),
    ConstructInvariant(ConstructConfig),
    PullbackIdentity(PullbackConfig),
    ImplicationChain(ChainConfig),
}

impl Diagnostic {
    pub fn name(&self) -> &'static str {
        match self {
            Diagnostic::Expansive(_) => "expansive",
            Diagnostic::Countable(_) => "countable",
            Diagnostic::ContinuumWise(_) => "continuum_wise",
            Diagnostic::StableClass(_) => "stable_class",
            Diagnostic::Entropy(_) => "entropy",
            Diagnostic::TheoremA(_) => "theorem_a",
            Diagnostic::ConstructInvariant(_) => "construct_invariant",
            Diagnostic::PullbackIdentity(_) => "pullback_identity",
            Diagnostic::ImplicationChain(_) => "implication_chain",
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Diagnostic::Expansive(p) | Diagnostic::Countable(p) => p.seed = seed,
            Diagnostic::ContinuumWise(p) => p.seed = seed,
            Diagnostic::StableClass(p) => p.seed = seed,
            Diagnostic::Entropy(p) => p.seed = seed,
            Diagnostic::TheoremA(p) => p.entropy.seed = seed,
            Diagnostic::ConstructInvariant(p) => {
                p.seed = seed;
                p.expansive.seed = seed;
            }
            Diagnostic::PullbackIdentity(p) => p.seed = seed,
            Diagnostic::ImplicationChain(p) => {
                p.expansive.seed = seed;
                p.continuum.seed = seed;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub name: String,
    pub environment: EnvKind,
    pub system: FiberSystem,
    pub disintegration: Disintegration,
    pub delta: RandomScalar,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

impl ScenarioConfig {
    pub fn environment(&self) -> Result<Arc<BaseEnvironment>> {
        BaseEnvironment::new(self.environment.clone(), self.name.clone())
    }

    /// Replaces every diagnostic seed.
    pub fn override_seed(&mut self, seed: u64) {
        for d in &mut self.diagnostics {
            d.set_seed(seed);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Semantic checks; every problem is reported, each prefixed by its field path.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.schema != CONFIG_SCHEMA {
            errs.push(format!("schema: expected {CONFIG_SCHEMA:?}, found {:?}", self.schema));
        }
        let env = match self.environment() {
            Ok(env) => Some(env),
            Err(e) => {
                errs.push(format!("environment: {e}"));
                None
            }
        };
        let mut system_ok = true;
        if let Some(env) = &env {
            if let Err(e) = self.system.validate(env) {
                errs.push(format!("system: {e}"));
                system_ok = false;
            }
            if let Err(e) = self.delta.validate(env) {
                errs.push(format!("delta: {e}"));
            }
        }
        if system_ok {
            if let Err(e) = self.disintegration.validate(&self.system) {
                errs.push(format!("disintegration: {e}"));
            }
        }
        if self.diagnostics.is_empty() {
            errs.push("diagnostics: at least one diagnostic is required".into());
        }
        for (i, d) in self.diagnostics.iter().enumerate() {
            let at = format!("diagnostics[{i}].{}", d.name());
            self.check_diagnostic(d, &at, &mut errs);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn check_diagnostic(&self, d: &Diagnostic, at: &str, errs: &mut Vec<String>) {
        fn positive(errs: &mut Vec<String>, at: &str, field: &str, v: usize) {
            if v == 0 {
                errs.push(format!("{at}.{field}: must be at least 1"));
            }
        }
        let sample = |p: &SampleParams, at: &str, errs: &mut Vec<String>| {
            for (field, v) in [("depth", p.depth), ("base_samples", p.base_samples)] {
                if v == 0 {
                    errs.push(format!("{at}.{field}: must be at least 1"));
                }
            }
            if p.sided == Some(Sided::TwoSided) && !self.system.invertible {
                errs.push(format!("{at}.sided: two-sided Γ sets need an invertible system"));
            }
        };
        match d {
            Diagnostic::Expansive(p) | Diagnostic::Countable(p) => sample(p, at, errs),
            Diagnostic::ContinuumWise(p) => {
                positive(errs, at, "max_n", p.max_n);
                positive(errs, at, "base_samples", p.base_samples);
                if !(p.segment > 0.0 && p.segment < 1.0) {
                    errs.push(format!("{at}.segment: must lie in (0, 1)"));
                }
            }
            Diagnostic::StableClass(p) => {
                positive(errs, at, "depth", p.depth);
                positive(errs, at, "base_samples", p.base_samples);
                if p.gammas.is_empty() {
                    errs.push(format!("{at}.gammas: at least one radius is required"));
                }
            }
            Diagnostic::Entropy(p) => {
                if p.n_max < 2 {
                    errs.push(format!("{at}.n_max: must be at least 2"));
                }
                positive(errs, at, "samples", p.samples);
                if p.ladder.as_ref().is_some_and(Vec::is_empty) {
                    errs.push(format!("{at}.ladder: must not be empty"));
                }
            }
            Diagnostic::TheoremA(p) => {
                if p.entropy.n_max < 2 {
                    errs.push(format!("{at}.entropy.n_max: must be at least 2"));
                }
                positive(errs, at, "depth", p.depth);
                positive(errs, at, "samples", p.samples);
            }
            Diagnostic::ConstructInvariant(p) => {
                positive(errs, at, "n_max", p.n_max);
                positive(errs, at, "base_samples", p.base_samples);
                sample(&p.expansive, &format!("{at}.expansive"), errs);
            }
            Diagnostic::PullbackIdentity(p) => {
                positive(errs, at, "depth", p.depth);
                positive(errs, at, "samples", p.samples);
                let convention = matches!(self.system.generator, Generator::Shift | Generator::Identity);
                if !self.system.invertible && !convention {
                    errs.push(format!("{at}: the system is not invertible and has no preimage convention"));
                }
            }
            Diagnostic::ImplicationChain(p) => {
                sample(&p.expansive, &format!("{at}.expansive"), errs);
                if p.alternatives.iter().chain([&self.disintegration]).any(Disintegration::is_atomic) {
                    errs.push(format!("{at}.alternatives: the chain test needs non-atomic disintegrations"));
                }
            }
        }
    }
}

const TAGS: [&str; 2] = ["rule", "kind"];

fn same_variant(b: &serde_json::Map<String, Value>, p: &serde_json::Map<String, Value>) -> bool {
    TAGS.iter().all(|t| match (b.get(*t), p.get(*t)) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    })
}

/// Recursively overlays `patch` on `base`: objects merge key by key, everything else replaces.
/// An object whose `rule` or `kind` tag differs from the base replaces it whole.
pub fn deep_merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) if same_variant(b, &p) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => deep_merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Parses a config document. A `"preset"` key names a built-in whose fields are overridden
/// by the rest of the document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("json: {e}")]))?;
    if let Some(name) = doc.as_object_mut().and_then(|o| o.remove("preset")) {
        let name = name.as_str().ok_or_else(|| Error::Config(vec!["preset: must be a string".into()]))?;
        let b = builtin(name).ok_or_else(|| Error::Config(vec![format!("preset: unknown built-in {name:?}")]))?;
        let mut base = serde_json::to_value(b.config()).expect("config serializes");
        deep_merge(&mut base, doc);
        doc = base;
    }
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(vec![format!("{path}: {}", e.into_inner())])
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// A built-in name, a path to a JSON file, or inline JSON text.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    if let Some(b) = builtin(source) {
        return Ok(b.config());
    }
    let trimmed = source.trim_start();
    if trimmed.starts_with('{') {
        return parse_config(source);
    }
    let text = std::fs::read_to_string(source)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_overrides_leaves() {
        let mut a = serde_json::json!({"x": {"y": 1, "z": [1, 2]}, "k": 0});
        deep_merge(&mut a, serde_json::json!({"x": {"y": 5, "z": [3]}}));
        assert_eq!(a, serde_json::json!({"x": {"y": 5, "z": [3]}, "k": 0}));
    }

    #[test]
    fn merge_replaces_other_variant() {
        let mut a = serde_json::json!({"d": {"rule": "lebesgue", "resolution": 64}});
        deep_merge(&mut a, serde_json::json!({"d": {"rule": "grid", "weights": [1.0]}}));
        assert_eq!(a, serde_json::json!({"d": {"rule": "grid", "weights": [1.0]}}));
    }

    #[test]
    fn negative_depth_names_the_field() {
        let text = r#"{"preset": "example1_random_shift",
            "diagnostics": [{"expansive": {"depth": -3, "base_samples": 2, "fiber_samples": 1, "seed": 1}}]}"#;
        let Err(Error::Config(errs)) = parse_config(text) else { panic!("accepted") };
        assert!(errs[0].starts_with("diagnostics[0].expansive.depth"), "{errs:?}");
    }

    #[test]
    fn semantic_errors_are_all_listed() {
        let text = r#"{"preset": "example2_isometry", "delta": {"constant": "-1"},
            "diagnostics": [{"expansive": {"depth": 0, "base_samples": 0, "fiber_samples": 1, "seed": 1}}]}"#;
        let Err(Error::Config(errs)) = parse_config(text) else { panic!("accepted") };
        assert_eq!(errs.len(), 3, "{errs:?}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = r#"{"preset": "example1_random_shift", "colour": 3}"#;
        let Err(Error::Config(errs)) = parse_config(text) else { panic!("accepted") };
        assert!(errs[0].contains("colour"), "{errs:?}");
    }
}
