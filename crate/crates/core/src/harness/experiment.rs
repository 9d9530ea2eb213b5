//! Seeded tester runs, aggregate result rows and scaling summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{exact_tv, Generator};
use super::{mix_seed, thread_pool};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::oracle::DistributionOracle;
use crate::testers::{sub_cond_uni, Decision, Mode, TesterConfig};

pub const RESULTS_SCHEMA: &str = "hgut-results/1";
pub const TRIALS_SCHEMA: &str = "hgut-trials/1";

/// One tester invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub verdict: Decision,
    pub queries_total: u64,
    pub queries_by_phase: BTreeMap<String, u64>,
    pub depth_max: usize,
    pub wall_ms: f64,
}

/// Runs `trials` independent seeded invocations of the subcube tester.
/// Trial `k` draws its oracle and tester seeds from `(seed, k)` alone, so
/// rows do not depend on scheduling.
pub fn run_trials(
    p: Arc<Distribution>,
    eps: f64,
    cfg: &TesterConfig,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRow>> {
    let pool = thread_pool()?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let start = Instant::now();
                let mut oracle = DistributionOracle::new(p.clone(), mix_seed(seed, k as u64, 1));
                let cfg = cfg.clone().with_seed(mix_seed(seed, k as u64, 2));
                let v = sub_cond_uni(&mut oracle, eps, &cfg)?;
                Ok(TrialRow {
                    trial: k,
                    verdict: v.decision,
                    queries_total: v.ledger.total,
                    queries_by_phase: v.ledger.by_phase,
                    depth_max: v.depth_max,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                })
            })
            .collect()
    })
}

pub fn trials_csv(rows: &[TrialRow]) -> String {
    let phases: Vec<String> = rows
        .first()
        .map(|r| r.queries_by_phase.keys().cloned().collect())
        .unwrap_or_default();
    let mut out = format!("# {TRIALS_SCHEMA}\ntrial,verdict,queries_total");
    for p in &phases {
        let _ = write!(out, ",queries_{p}");
    }
    out.push_str(",depth_max,wall_ms\n");
    for r in rows {
        let verdict = if r.verdict.is_accept() { "accept" } else { "reject" };
        let _ = write!(out, "{},{verdict},{}", r.trial, r.queries_total);
        for p in &phases {
            let _ = write!(out, ",{}", r.queries_by_phase.get(p).copied().unwrap_or(0));
        }
        let _ = writeln!(out, ",{},{:.3}", r.depth_max, r.wall_ms);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub generator: Generator,
    pub shapes: Vec<Vec<usize>>,
    pub eps: Vec<f64>,
    pub trials: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Overrides the constants of `mode` when present.
    #[serde(default)]
    pub config: Option<TesterConfig>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Assertion: every cell accepts at least this fraction of trials.
    #[serde(default)]
    pub min_accept_rate: Option<f64>,
    /// Assertion: every cell accepts at most this fraction of trials.
    #[serde(default)]
    pub max_accept_rate: Option<f64>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.shapes.is_empty() || self.eps.is_empty() {
            return Err(Error::Config("shape and eps grids must be nonempty".into()));
        }
        for s in &self.shapes {
            GridShape::new(s.clone())?;
        }
        for &e in &self.eps {
            if !(e > 0.0 && e <= 0.5) {
                return Err(Error::Config(format!("eps = {e} outside (0, 1/2]")));
            }
        }
        self.tester_config().validate()
    }

    pub fn tester_config(&self) -> TesterConfig {
        self.config.clone().unwrap_or_else(|| TesterConfig::for_mode(self.mode))
    }
}

/// Aggregate over one `(shape, eps)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub shape: Vec<usize>,
    pub n: usize,
    pub eps: f64,
    pub tv: f64,
    pub accept_count: usize,
    pub trials: usize,
    pub mean_queries: f64,
    pub p95_queries: u64,
    /// Kept out of the reproducible outputs; written to the sidecar.
    #[serde(skip)]
    pub wall_ms: f64,
}

impl ResultRow {
    pub fn accept_rate(&self) -> f64 {
        self.accept_count as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub assertions_passed: bool,
}

fn p95(mut q: Vec<u64>) -> u64 {
    q.sort_unstable();
    let k = ((0.95 * q.len() as f64).ceil() as usize).clamp(1, q.len());
    q[k - 1]
}

/// Runs every cell of `spec`, writes outputs when `spec.output` is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let cfg = spec.tester_config();
    let mut rows = Vec::new();
    for (si, dims) in spec.shapes.iter().enumerate() {
        let shape = GridShape::new(dims.clone())?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, si as u64, 0));
        let dist = Arc::new(spec.generator.generate(&shape, &mut rng)?);
        let tv = exact_tv(&dist)?;
        for (ei, &eps) in spec.eps.iter().enumerate() {
            let start = Instant::now();
            let cell_seed = mix_seed(spec.seed, si as u64, 1 + ei as u64);
            let trials = run_trials(dist.clone(), eps, &cfg, spec.trials, cell_seed)?;
            let queries: Vec<u64> = trials.iter().map(|t| t.queries_total).collect();
            rows.push(ResultRow {
                experiment: spec.name.clone(),
                shape: dims.clone(),
                n: shape.n(),
                eps,
                tv,
                accept_count: trials.iter().filter(|t| t.verdict.is_accept()).count(),
                trials: spec.trials,
                mean_queries: queries.iter().sum::<u64>() as f64 / queries.len() as f64,
                p95_queries: p95(queries),
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    let assertions_passed = rows.iter().all(|r| {
        spec.min_accept_rate.is_none_or(|lo| r.accept_rate() >= lo)
            && spec.max_accept_rate.is_none_or(|hi| r.accept_rate() <= hi)
    });
    if let Some(path) = &spec.output {
        write_results(path, &rows)?;
    }
    Ok(ExperimentOutcome {
        rows,
        assertions_passed,
    })
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out =
        format!("# {RESULTS_SCHEMA}\nexperiment,shape,n,eps,tv,accept_count,trials,mean_queries,p95_queries\n");
    for r in rows {
        let shape: Vec<String> = r.shape.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{:.12},{},{},{:.3},{}",
            r.experiment,
            shape.join("x"),
            r.n,
            r.eps,
            r.tv,
            r.accept_count,
            r.trials,
            r.mean_queries,
            r.p95_queries
        );
    }
    out
}

pub fn results_json(rows: &[ResultRow]) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        rows: &'a [ResultRow],
    }
    Ok(serde_json::to_string_pretty(&Doc {
        schema: RESULTS_SCHEMA,
        rows,
    })? + "\n")
}

/// Writes CSV or JSON by extension, plus `<path>.meta.json` with wall times.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let body = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => results_json(rows)?,
        _ => results_csv(rows),
    };
    fs::write(path, body)?;
    let meta = serde_json::json!({
        "schema": RESULTS_SCHEMA,
        "written_unix_s": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "wall_ms": rows.iter().map(|r| r.wall_ms).collect::<Vec<_>>(),
    });
    let mut side = path.as_os_str().to_owned();
    side.push(".meta.json");
    fs::write(PathBuf::from(side), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

/// Growth of mean query counts against `sqrt(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub points: Vec<(usize, f64)>,
    /// Least-squares slope of `log(mean queries)` on `log n`.
    pub exponent: f64,
    /// `(q_{k+1}/q_k) / sqrt(n_{k+1}/n_k)` for consecutive sizes.
    pub normalized_ratios: Vec<f64>,
    pub factor: f64,
    pub within_factor: bool,
}

pub fn scaling_report(rows: &[ResultRow], factor: f64) -> ScalingReport {
    let mut points: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.mean_queries)).collect();
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(n, q)| ((n as f64).ln(), q.ln()))
        .collect();
    let k = logs.len() as f64;
    let exponent = if logs.len() >= 2 {
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };
    let normalized_ratios: Vec<f64> = points
        .windows(2)
        .map(|w| (w[1].1 / w[0].1) / (w[1].0 as f64 / w[0].0 as f64).sqrt())
        .collect();
    let within_factor = normalized_ratios.iter().all(|&r| r <= factor && r >= 1.0 / factor);
    ScalingReport {
        points,
        exponent,
        normalized_ratios,
        factor,
        within_factor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            name: "t".into(),
            generator: Generator::Uniform,
            shapes: vec![vec![2, 2]],
            eps: vec![0.25],
            trials: 4,
            mode: Mode::Practical,
            seed: 3,
            config: None,
            output: None,
            min_accept_rate: None,
            max_accept_rate: None,
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let s = ExperimentSpec { trials: 0, ..spec() };
        assert!(matches!(run_experiment(&s), Err(Error::Config(_))));
    }

    #[test]
    fn rows_are_reproducible() {
        let a = run_experiment(&spec()).unwrap();
        let b = run_experiment(&spec()).unwrap();
        assert_eq!(results_csv(&a.rows), results_csv(&b.rows));
        assert!(a.rows[0].accept_count <= a.rows[0].trials);
    }

    #[test]
    fn p95_picks_upper_tail() {
        assert_eq!(p95((1..=100).collect()), 95);
        assert_eq!(p95(vec![7]), 7);
    }

    #[test]
    fn sqrt_growth_is_within_factor() {
        let row = |n: usize, q: f64| ResultRow {
            experiment: "s".into(),
            shape: vec![2; n],
            n,
            eps: 0.25,
            tv: 0.3,
            accept_count: 0,
            trials: 1,
            mean_queries: q,
            p95_queries: q as u64,
            wall_ms: 0.0,
        };
        let r = scaling_report(&[row(16, 100.0), row(64, 200.0), row(256, 400.0)], 2.5);
        assert!((r.exponent - 0.5).abs() < 1e-12);
        assert!(r.within_factor);
        let r = scaling_report(&[row(16, 100.0), row(256, 100.0)], 2.5);
        assert!(!r.within_factor);
    }
}
