//! Experiment campaign: repeated zero-trace attacks against PLWE and
//! uniform oracles, with failure rates and timings.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::attack::{algorithm2, plan_attack, VerdictKind};
use crate::error::{Error, Result};
use crate::files::{format_err, ParamsFile};
use crate::forge::ParameterSet;
use crate::region::{RegionMode, SmallnessRegion, DEFAULT_TABLE_CAP};
use crate::sampler::{stream_rng, GaussianParams, Oracle, Sample};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "PLWE_WORKERS";

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: ParameterSet,
    pub ntests: u64,
    /// Samples per run.
    pub m: usize,
    pub seed: u64,
    pub theta: Option<f64>,
    /// Worker count; falls back to `PLWE_WORKERS`, then to the rayon default.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(params: ParameterSet, ntests: u64, m: usize, seed: u64) -> Result<Self> {
        let cfg = Self { params, ntests, m, seed, theta: None, workers: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ntests == 0 {
            return Err(Error::InvalidParameter("ntests must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("M must be at least 1".into()));
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {t}")));
            }
        }
        Ok(())
    }
}

/// JSON shape of an experiment configuration. Parameters come either
/// inline or from a separate params file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params_file: Option<String>,
    pub ntests: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_err("config", e.to_string()))
    }

    /// Resolves the parameters; `load` reads a referenced params file.
    pub fn resolve(&self, load: impl FnOnce(&str) -> Result<String>) -> Result<ExperimentConfig> {
        let params = match (&self.params, &self.params_file) {
            (Some(p), None) => p.clone(),
            (None, Some(path)) => ParamsFile::parse(&load(path)?)?,
            _ => return Err(format_err("config", "give exactly one of params and params_file".into())),
        };
        let cfg = ExperimentConfig {
            params: params.to_set()?,
            ntests: self.ntests,
            m: self.m,
            seed: self.seed,
            theta: self.theta,
            workers: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: u64,
    pub verdict: VerdictKind,
    pub surviving: u64,
    pub failed: bool,
    /// PLWE runs only: whether a lone survivor equals `Tr(s(alpha))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_correct: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub failures: u64,
    pub failure_rate: f64,
    /// Seconds, 3 decimals.
    pub mean_sampling_secs: f64,
    /// Seconds, 3 decimals.
    pub mean_attack_secs: f64,
    pub runs: Vec<RunRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub mode: RegionMode,
    pub size: u64,
    pub analytic_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub params: ParamsFile,
    pub ntests: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub region: RegionSummary,
    /// `1 - P[half-trace of the error lies in the region]^M`, the chance
    /// that a PLWE run loses the true guess.
    pub predicted_plwe_failure_rate: f64,
    /// Sample count suggested by the planner for `theta`, when one is set.
    pub planned_samples: Option<u64>,
    pub plwe: DistributionSummary,
    pub uniform: DistributionSummary,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_err("report", e.to_string()))
    }

    /// Verdict sequences `(plwe, uniform)`, the timing-free part of a report.
    pub fn verdicts(&self) -> (Vec<VerdictKind>, Vec<VerdictKind>) {
        let v = |d: &DistributionSummary| d.runs.iter().map(|r| r.verdict).collect();
        (v(&self.plwe), v(&self.uniform))
    }
}

struct RunOutcome {
    record: RunRecord,
    sampling: f64,
    attack: f64,
}

fn plwe_run(ring: &Arc<crate::ring::Ring>, g: GaussianParams, region: &SmallnessRegion, m: usize, seed: u64, i: u64) -> Result<RunOutcome> {
    let t = Instant::now();
    let mut oracle = Oracle::plwe_from_rng(ring.clone(), g, stream_rng(seed, 2 * i));
    let samples: Vec<Sample> = (0..m).map(|_| oracle.next_rq0_sample()).collect();
    let sampling = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let verdict = algorithm2(ring, &samples, region)?;
    let attack = t.elapsed().as_secs_f64();
    let params = ring.zero_trace().expect("zero-trace ring");
    let truth = params.trace(ring.eval_at_alpha(oracle.secret().expect("plwe secret")));
    let record = RunRecord {
        index: i,
        verdict: verdict.kind,
        surviving: verdict.surviving.len() as u64,
        failed: verdict.kind != VerdictKind::Plwe,
        trace_correct: verdict.trace_guess().map(|g| g == truth),
    };
    Ok(RunOutcome { record, sampling, attack })
}

fn uniform_run(ring: &Arc<crate::ring::Ring>, region: &SmallnessRegion, m: usize, seed: u64, i: u64) -> Result<RunOutcome> {
    let t = Instant::now();
    let mut oracle = Oracle::uniform_from_rng(ring.clone(), stream_rng(seed, 2 * i + 1));
    let samples: Vec<Sample> = (0..m).map(|_| oracle.next_rq0_sample()).collect();
    let sampling = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let verdict = algorithm2(ring, &samples, region)?;
    let attack = t.elapsed().as_secs_f64();
    let record = RunRecord {
        index: i,
        verdict: verdict.kind,
        surviving: verdict.surviving.len() as u64,
        failed: verdict.kind != VerdictKind::NotPlwe,
        trace_correct: None,
    };
    Ok(RunOutcome { record, sampling, attack })
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn summarize(outcomes: Vec<RunOutcome>) -> DistributionSummary {
    let n = outcomes.len() as f64;
    let failures = outcomes.iter().filter(|o| o.record.failed).count() as u64;
    let mean_sampling_secs = round3(outcomes.iter().map(|o| o.sampling).sum::<f64>() / n);
    let mean_attack_secs = round3(outcomes.iter().map(|o| o.attack).sum::<f64>() / n);
    DistributionSummary {
        failures,
        failure_rate: failures as f64 / n,
        mean_sampling_secs,
        mean_attack_secs,
        runs: outcomes.into_iter().map(|o| o.record).collect(),
    }
}

fn worker_count(cfg: &ExperimentConfig) -> Option<usize> {
    cfg.workers.or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok()).filter(|&n| n > 0)
}

/// Runs `ntests` PLWE runs and `ntests` uniform runs. Run `i` draws from
/// stream `2i` (PLWE) or `2i + 1` (uniform) of the configured seed, so the
/// verdicts do not depend on the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let ps = &cfg.params;
    let region = ps.region(DEFAULT_TABLE_CAP)?;
    let ring = Arc::new(ps.ring()?);
    let g = GaussianParams::new(ps.sigma)?;
    let work = || -> Result<(Vec<RunOutcome>, Vec<RunOutcome>)> {
        let plwe = (0..cfg.ntests)
            .into_par_iter()
            .map(|i| plwe_run(&ring, g, &region, cfg.m, cfg.seed, i))
            .collect::<Result<Vec<_>>>()?;
        let uniform = (0..cfg.ntests)
            .into_par_iter()
            .map(|i| uniform_run(&ring, &region, cfg.m, cfg.seed, i))
            .collect::<Result<Vec<_>>>()?;
        Ok((plwe, uniform))
    };
    let (plwe, uniform) = match worker_count(cfg) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let coverage = region_coverage(ps, &region)?;
    let planned_samples = match cfg.theta {
        Some(theta) => Some(plan_attack(theta, ps.q(), region.exact_size(), 1.0)?.k),
        None => None,
    };
    Ok(ExperimentReport {
        version: VERSION.to_string(),
        seed: cfg.seed,
        config: ConfigEcho { params: ParamsFile::from_set(ps), ntests: cfg.ntests, m: cfg.m, theta: cfg.theta },
        region: RegionSummary { mode: region.mode(), size: region.exact_size(), analytic_bound: region.analytic_bound() },
        predicted_plwe_failure_rate: 1.0 - coverage.powi(cfg.m as i32),
        planned_samples,
        plwe: summarize(plwe),
        uniform: summarize(uniform),
    })
}

/// Probability mass of one error coefficient on `[-T, T]`: a normal value
/// rounded to the nearest integer, conditioned on `|k| <= T`.
pub fn error_coeff_pmf(g: &GaussianParams) -> Vec<f64> {
    let t = g.truncation();
    let normal = Normal::new(0.0, g.sigma()).expect("sigma validated");
    let raw: Vec<f64> = (-t..=t)
        .map(|k| normal.cdf(k as f64 + 0.5) - normal.cdf(k as f64 - 0.5))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Exact probability that the half-trace of a sampled error, i.e.
/// `sum_j (-rho)^j e_{2j}` over `2j <= N-1`, lands in `region`. The
/// distribution is convolved over `F_q` one coefficient at a time.
pub fn region_coverage(ps: &ParameterSet, region: &SmallnessRegion) -> Result<f64> {
    if region.q() != ps.q() {
        return Err(Error::RegionModulusMismatch { region_q: region.q(), q: ps.q() });
    }
    let field = ps.params.field();
    let g = GaussianParams::new(ps.sigma)?;
    let pmf = error_coeff_pmf(&g);
    let t = g.truncation();
    let q = ps.q() as usize;
    let mut dist = vec![0.0f64; q];
    dist[0] = 1.0;
    let mut weight = crate::field::FieldElement::ONE;
    for _ in 0..=(ps.degree() - 1) / 2 {
        let shifts: Vec<usize> = (-t..=t)
            .map(|k| field.mul(field.from_i64(k), weight).value() as usize)
            .collect();
        let mut next = vec![0.0f64; q];
        for (v, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (&s, &w) in shifts.iter().zip(&pmf) {
                next[(v + s) % q] += p * w;
            }
        }
        dist = next;
        weight = field.mul(weight, ps.params.neg_rho());
    }
    Ok(region.members().iter().map(|m| dist[m.value() as usize]).sum())
}
