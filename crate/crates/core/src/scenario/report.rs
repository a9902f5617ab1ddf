use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::base::{derive_seed, sample_base, BaseEnvironment};
use crate::disintegration::Disintegration;
use crate::entropy::{brin_katok_estimate, theorem_a_consistency, EntropyEstimate, TheoremAReport};
use crate::error::Result;
use crate::exact::Mass;
use crate::expansivity::{
    continuum_wise_diagnostic, countable_diagnostic, expansive_diagnostic, implication_chain_test, point_label,
    stable_class_mass, strictly_decreasing, ChainEntry, ChainOutcome, ExpansivityReport, StableRow, Verdict,
};
use crate::invariant::{construct_invariant, pullback_identity_suite, ConstructParams, ConstructReport, PullbackCheck};
use crate::measure::sample_fiber;

use super::{Diagnostic, OutputFormat, ScenarioConfig, StableClassConfig};

pub const REPORT_SCHEMA: &str = "fiberwise.report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableTable {
    pub w: String,
    pub p: String,
    pub rows: Vec<StableRow>,
    pub strictly_decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Expansivity(ExpansivityReport),
    StableClass(Vec<StableTable>),
    Entropy(EntropyEstimate),
    TheoremA(TheoremAReport),
    Construct(ConstructReport),
    Pullback(Vec<PullbackCheck>),
    Chain(Vec<ChainOutcome>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticOutcome {
    pub diagnostic: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Payload>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub wall_clock_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub config: ScenarioConfig,
    pub results: Vec<DiagnosticOutcome>,
    /// The only field that varies between identical runs.
    pub timing: Timing,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.results.iter().any(|r| r.error.is_some())
    }

    pub fn outcome(&self, diagnostic: &str) -> Option<&DiagnosticOutcome> {
        self.results.iter().find(|r| r.diagnostic == diagnostic)
    }
}

fn stable_tables(
    env: &std::sync::Arc<BaseEnvironment>,
    cfg: &ScenarioConfig,
    p: &StableClassConfig,
) -> Result<Vec<StableTable>> {
    sample_base(env, p.base_samples, p.seed)
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let mu = cfg.disintegration.measure_at(&cfg.system, w)?;
            let x = sample_fiber(&mu, 1, derive_seed(p.seed, i as u64))?.remove(0);
            let rows = stable_class_mass(
                &cfg.system,
                &cfg.disintegration,
                w,
                &x,
                &p.gammas,
                &p.js,
                p.depth,
                Default::default(),
            )?;
            Ok(StableTable { w: w.label(), p: point_label(&x), strictly_decreasing: strictly_decreasing(&rows), rows })
        })
        .collect()
}

fn run_one(env: &std::sync::Arc<BaseEnvironment>, cfg: &ScenarioConfig, d: &Diagnostic) -> Result<Payload> {
    let (sys, dis, delta) = (&cfg.system, &cfg.disintegration, &cfg.delta);
    Ok(match d {
        Diagnostic::Expansive(p) => Payload::Expansivity(expansive_diagnostic(env, sys, dis, delta, p)?),
        Diagnostic::Countable(p) => Payload::Expansivity(countable_diagnostic(env, sys, dis, delta, p)?),
        Diagnostic::ContinuumWise(p) => Payload::Expansivity(continuum_wise_diagnostic(env, sys, delta, p)?),
        Diagnostic::StableClass(p) => Payload::StableClass(stable_tables(env, cfg, p)?),
        Diagnostic::Entropy(p) => Payload::Entropy(brin_katok_estimate(env, sys, dis, p)?),
        Diagnostic::TheoremA(p) => Payload::TheoremA(theorem_a_consistency(env, sys, dis, p)?),
        Diagnostic::ConstructInvariant(c) => {
            let params = ConstructParams {
                n_max: c.n_max,
                probe_depth: c.probe_depth,
                base_samples: c.base_samples,
                seed: c.seed,
                delta: delta.clone(),
                expansive: c.expansive.clone(),
            };
            Payload::Construct(construct_invariant(env, sys, dis, &params)?)
        }
        Diagnostic::PullbackIdentity(p) => {
            Payload::Pullback(pullback_identity_suite(env, sys, delta, p.depth, p.samples, p.seed)?)
        }
        Diagnostic::ImplicationChain(p) => {
            let mut dis_list: Vec<Disintegration> = vec![dis.clone()];
            dis_list.extend(p.alternatives.iter().cloned());
            let entry = ChainEntry {
                name: cfg.name.clone(),
                env: env.clone(),
                sys: sys.clone(),
                delta: delta.clone(),
                disintegrations: dis_list,
                expansive: p.expansive.clone(),
                continuum: p.continuum.clone(),
            };
            Payload::Chain(implication_chain_test(&[entry])?)
        }
    })
}

/// Runs every diagnostic in order; a failing diagnostic is recorded and the run continues.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let started = Instant::now();
    let env = cfg.environment()?;
    let results = cfg
        .diagnostics
        .iter()
        .map(|d| match run_one(&env, cfg, d) {
            Ok(payload) => DiagnosticOutcome {
                diagnostic: d.name(),
                status: "ok",
                verdict: match &payload {
                    Payload::Expansivity(r) => Some(r.verdict),
                    _ => None,
                },
                error: None,
                result: Some(payload),
            },
            Err(e) => DiagnosticOutcome {
                diagnostic: d.name(),
                status: "error",
                verdict: None,
                error: Some(e.to_string()),
                result: None,
            },
        })
        .collect();
    Ok(RunReport {
        schema: REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        scenario: cfg.name.clone(),
        config: cfg.clone(),
        results,
        timing: Timing { wall_clock_ms: started.elapsed().as_millis() },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

fn mass_text(m: &Option<Mass>) -> String {
    m.as_ref().map(|m| m.to_string()).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn csv_payload(p: &Payload) -> String {
    match p {
        Payload::Expansivity(r) => table(
            &["w", "x", "adversarial", "depth", "lower", "upper", "pieces", "largest_piece", "certified_piece", "escape_time"],
            r.samples
                .iter()
                .flat_map(|s| {
                    if s.rows.is_empty() {
                        vec![vec![
                            s.w.clone(),
                            s.x.clone(),
                            s.adversarial.to_string(),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                            opt(s.escape_time),
                        ]]
                    } else {
                        s.rows
                            .iter()
                            .map(|row| {
                                vec![
                                    s.w.clone(),
                                    s.x.clone(),
                                    s.adversarial.to_string(),
                                    row.depth.to_string(),
                                    mass_text(&row.lower),
                                    mass_text(&row.upper),
                                    opt(row.pieces),
                                    opt(row.largest_piece),
                                    opt(row.certified_piece),
                                    opt(s.escape_time),
                                ]
                            })
                            .collect()
                    }
                })
                .collect(),
        ),
        Payload::StableClass(tables) => table(
            &["w", "p", "i", "j", "depth", "upper"],
            tables
                .iter()
                .flat_map(|t| {
                    t.rows.iter().map(|r| {
                        vec![t.w.clone(), t.p.clone(), r.i.to_string(), r.j.to_string(), r.depth.to_string(), r.upper.to_string()]
                    })
                })
                .collect(),
        ),
        Payload::Entropy(e) => table(
            &["delta", "w", "x", "n", "value"],
            e.ladder
                .iter()
                .enumerate()
                .flat_map(|(k, step)| {
                    step.samples.iter().flat_map(move |s| {
                        s.values.iter().enumerate().map(move |(n, v)| {
                            vec![k.to_string(), s.w.clone(), s.x.clone(), (n + 1).to_string(), v.to_string()]
                        })
                    })
                })
                .collect(),
        ),
        Payload::TheoremA(t) => table(
            &["clause", "status", "detail"],
            t.clauses
                .iter()
                .map(|c| {
                    let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(str::to_string));
                    vec![c.name.clone(), status.unwrap_or_default(), c.detail.clone()]
                })
                .collect(),
        ),
        Payload::Construct(c) => c.defect_csv(),
        Payload::Pullback(checks) => table(
            &["w", "x", "pass", "conflicts", "endpoint_gap"],
            checks
                .iter()
                .map(|c| vec![c.w.clone(), c.x.clone(), c.pass.to_string(), c.conflicts.to_string(), opt(c.endpoint_gap)])
                .collect(),
        ),
        Payload::Chain(outcomes) => table(
            &["name", "expansive", "countable", "continuum_wise", "pass"],
            outcomes
                .iter()
                .map(|o| {
                    let v = |v: Verdict| serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                    vec![o.name.clone(), v(o.expansive), v(o.countable), v(o.continuum_wise), o.pass.to_string()]
                })
                .collect(),
        ),
    }
}

/// Serialized report: one JSON document, or one CSV table per successful diagnostic.
pub fn emit_report(report: &RunReport, format: OutputFormat) -> Vec<OutputFile> {
    match format {
        OutputFormat::Json => vec![OutputFile {
            name: format!("{}.json", report.scenario),
            contents: serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        }],
        OutputFormat::Csv => report
            .results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                r.result.as_ref().map(|p| OutputFile {
                    name: format!("{}_{i:02}_{}.csv", report.scenario, r.diagnostic),
                    contents: csv_payload(p),
                })
            })
            .collect(),
    }
}
