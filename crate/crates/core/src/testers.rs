//! The uniformity testers: the hypercube mean tester, the coarse marginal
//! test, the projected mean test and the recursive subcube tester, with a
//! collision tester for the small-dimension base case.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::oracle::{
    draw_restriction_sigma, LedgerSnapshot, Phase, ProjectedStream, RestrictedView, SignSampler, SubcubeOracle, Tag,
};

/// Trace events kept per verdict; later events are counted but dropped.
pub const TRACE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Theory,
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }

    fn from_rejects(rejects: usize, runs: usize) -> Self {
        if 2 * rejects > runs {
            Decision::Reject
        } else {
            Decision::Accept
        }
    }
}

/// Every constant of the testing stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TesterConfig {
    pub mode: Mode,
    /// `sigma(eps) = 1 / (c0 * log2^4(16/eps))`.
    pub c0: f64,
    /// Main case runs iff `exp(-sigma n / eq_divisor) <= eps/8`.
    pub eq_divisor: f64,
    /// `L = l_const * m^l_m_exp * sqrt(n) / eps`.
    pub l_const: f64,
    pub l_m_exp: f64,
    /// Multiplier on `s_j = 8 L log2(2L) 2^-j`.
    pub s_mult: f64,
    /// Multiplier on `s'_j = (32/eps) log2(4/eps) 2^-j`.
    pub s_prime_mult: f64,
    /// `r = r_mult * ceil(log2(n m / eps))`, made odd.
    pub r_mult: f64,
    /// `t = t_rep_mult * log2(16/eps)`, made odd.
    pub t_rep_mult: f64,
    /// Mean tester sample multiplier `c_mt`.
    pub mean_mult: f64,
    /// Mean tester threshold fraction `tau`.
    pub mean_tau: f64,
    /// Coarse test sample multiplier `c_ct`.
    pub coarse_mult: f64,
    /// Mean tester repetitions per projection: `c_pr * ln(m + 1)`, made odd.
    pub projected_reps_mult: f64,
    /// Collision tester sample multiplier `c_bc`.
    pub base_mult: f64,
    /// Largest flattened domain handed to the collision tester.
    pub base_case_cap: usize,
    pub max_depth: usize,
    pub seed: u64,
}

impl TesterConfig {
    /// Calibrated desk-scale constants.
    pub fn practical() -> Self {
        Self {
            mode: Mode::Practical,
            c0: 0.0064,
            eq_divisor: 0.2,
            l_const: 0.25,
            l_m_exp: 1.0,
            s_mult: 1.0 / 16.0,
            s_prime_mult: 1.0 / 32.0,
            r_mult: 0.4,
            t_rep_mult: 0.5,
            mean_mult: 8.0,
            mean_tau: 0.5,
            coarse_mult: 40.0,
            projected_reps_mult: 1.0,
            base_mult: 4.0,
            base_case_cap: 1 << 20,
            max_depth: 10,
            seed: 0,
        }
    }

    /// The analysis constants: `C0 = 2 (32^2 100)^2`, divisor 10, `L ~ m^8.5 sqrt(n)/eps`,
    /// full loop counts, `r = 9 ceil(log2(nm/eps))` and `t = 100 log2(16/eps)`.
    pub fn theory() -> Self {
        Self {
            mode: Mode::Theory,
            c0: 2.0 * (32.0f64 * 32.0 * 100.0).powi(2),
            eq_divisor: 10.0,
            l_const: 1.0,
            l_m_exp: 8.5,
            s_mult: 1.0,
            s_prime_mult: 1.0,
            r_mult: 9.0,
            t_rep_mult: 100.0,
            ..Self::practical()
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Theory => Self::theory(),
            Mode::Practical => Self::practical(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c0", self.c0),
            ("eq_divisor", self.eq_divisor),
            ("l_const", self.l_const),
            ("s_mult", self.s_mult),
            ("s_prime_mult", self.s_prime_mult),
            ("r_mult", self.r_mult),
            ("t_rep_mult", self.t_rep_mult),
            ("mean_mult", self.mean_mult),
            ("mean_tau", self.mean_tau),
            ("coarse_mult", self.coarse_mult),
            ("projected_reps_mult", self.projected_reps_mult),
            ("base_mult", self.base_mult),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive and finite")));
            }
        }
        if !(self.l_m_exp >= 0.0) {
            return Err(Error::Config(format!(
                "l_m_exp = {} must be non-negative",
                self.l_m_exp
            )));
        }
        if self.base_case_cap < 2 {
            return Err(Error::Config("base_case_cap below 2".into()));
        }
        Ok(())
    }

    /// `sigma(eps)`, clamped to 1.
    pub fn sigma(&self, eps: f64) -> f64 {
        (1.0 / (self.c0 * (16.0 / eps).log2().powi(4))).min(1.0)
    }

    /// Whether `(n, eps)` satisfies the main-case condition.
    pub fn main_case(&self, n: usize, eps: f64) -> bool {
        (-self.sigma(eps) * n as f64 / self.eq_divisor).exp() <= eps / 8.0
    }

    pub fn l_param(&self, n: usize, m: usize, eps: f64) -> f64 {
        self.l_const * (m as f64).powf(self.l_m_exp) * (n as f64).sqrt() / eps
    }

    pub fn r_reps(&self, n: usize, m: usize, eps: f64) -> usize {
        odd((self.r_mult * (n as f64 * m as f64 / eps).log2().ceil()).ceil())
    }

    pub fn t_reps(&self, eps: f64) -> usize {
        odd((self.t_rep_mult * (16.0 / eps).log2()).ceil())
    }

    pub fn projected_reps(&self, m: usize) -> usize {
        odd((self.projected_reps_mult * ((m + 1) as f64).ln()).ceil())
    }
}

impl Default for TesterConfig {
    fn default() -> Self {
        Self::practical()
    }
}

/// Smallest odd integer at least `x` (and at least 1).
fn odd(x: f64) -> usize {
    let k = (x.max(1.0)) as usize;
    if k.is_multiple_of(2) {
        k + 1
    } else {
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub depth: usize,
    pub step: String,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub ledger: LedgerSnapshot,
    pub trace: Vec<TraceEvent>,
    pub dropped_events: u64,
    /// Deepest recursion level entered.
    pub depth_max: usize,
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        self.decision.is_accept()
    }
}

struct Ctx<'c> {
    cfg: &'c TesterConfig,
    rng: ChaCha8Rng,
    trace: Vec<TraceEvent>,
    dropped: u64,
    depth_max: usize,
}

impl<'c> Ctx<'c> {
    fn new(cfg: &'c TesterConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            trace: Vec::new(),
            dropped: 0,
            depth_max: 0,
        })
    }

    fn log(&mut self, depth: usize, step: impl FnOnce() -> String, decision: Decision) {
        if self.trace.len() < TRACE_CAP {
            self.trace.push(TraceEvent {
                depth,
                step: step(),
                decision,
            });
        } else {
            self.dropped += 1;
        }
    }

    fn finish(self, decision: Decision, ledger: LedgerSnapshot) -> Verdict {
        Verdict {
            decision,
            ledger,
            trace: self.trace,
            dropped_events: self.dropped,
            depth_max: self.depth_max,
        }
    }
}

fn check_eps(eps: f64, hi: f64) -> Result<()> {
    if eps > 0.0 && eps <= hi {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps = {eps} outside (0, {hi}]")))
    }
}

/// `N = ceil(c_mt * max(1/(eps^2 sqrt n), 1/eps))`.
pub fn mean_sample_count(n: usize, eps: f64, cfg: &TesterConfig) -> Result<usize> {
    check_eps(eps, 1.0)?;
    if n == 0 {
        return Err(Error::InvalidArgument("mean tester needs n >= 1".into()));
    }
    let raw = cfg.mean_mult * (1.0 / (eps * eps * (n as f64).sqrt())).max(1.0 / eps);
    let count = raw.ceil() as usize;
    if count < 2 {
        return Err(Error::Config(format!("mean tester would draw {count} < 2 samples")));
    }
    Ok(count)
}

/// `N = ceil(c_ct * m * ln(m n + 1))`.
pub fn coarse_sample_count(shape: &GridShape, cfg: &TesterConfig) -> usize {
    let m = shape.max_side() as f64;
    (cfg.coarse_mult * m * (m * shape.n() as f64 + 1.0).ln()).ceil() as usize
}

/// `N = ceil(c_bc * sqrt(D) / eps^2)`.
pub fn base_sample_count(domain: usize, eps: f64, cfg: &TesterConfig) -> Result<usize> {
    check_eps(eps, 1.0)?;
    let count = (cfg.base_mult * (domain as f64).sqrt() / (eps * eps)).ceil() as usize;
    if count < 2 {
        return Err(Error::Config(format!(
            "collision tester would draw {count} < 2 samples"
        )));
    }
    Ok(count)
}

/// Queries of a projected mean test that passes its coarse stage.
pub fn projected_query_count(shape: &GridShape, eps: f64, cfg: &TesterConfig) -> Result<u64> {
    let m = shape.max_side();
    let per = mean_sample_count(shape.n(), eps / (2.0 * m as f64), cfg)? as u64;
    Ok(coarse_sample_count(shape, cfg) as u64 + (m * m * cfg.projected_reps(m)) as u64 * per)
}

fn mean_decision(
    stream: &mut dyn SignSampler,
    eps: f64,
    cfg: &TesterConfig,
    rng: &mut dyn RngCore,
) -> Result<(Decision, usize)> {
    let n = stream.dim();
    let count = mean_sample_count(n, eps, cfg)?;
    let mut sum = vec![0i64; n];
    for _ in 0..count {
        for (s, v) in sum.iter_mut().zip(stream.next_point(rng)?) {
            *s += i64::from(v);
        }
    }
    // sum_{j<k} <x_j, x_k> = (|S|^2 - N n) / 2
    let sq: i64 = sum.iter().map(|s| s * s).sum();
    let pairs = (sq - (count * n) as i64) as f64 / 2.0;
    let z = 2.0 * pairs / (count as f64 * (count as f64 - 1.0));
    let decision = if z <= cfg.mean_tau * eps * eps * n as f64 {
        Decision::Accept
    } else {
        Decision::Reject
    };
    Ok((decision, count))
}

/// The pairwise inner-product statistic on `{-1,1}^n` samples; rejects when it
/// exceeds `tau eps^2 n`. The ledger counts the samples drawn.
pub fn mean_tester(stream: &mut dyn SignSampler, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    let mut ctx = Ctx::new(cfg)?;
    let (decision, count) = mean_decision(stream, eps, cfg, &mut ctx.rng)?;
    ctx.log(0, || format!("mean n={} eps={eps}", stream.dim()), decision);
    let mut ledger = LedgerSnapshot {
        total: count as u64,
        by_depth: vec![count as u64],
        ..Default::default()
    };
    ledger.by_phase.insert(Phase::Mean.name().to_string(), count as u64);
    Ok(ctx.finish(decision, ledger))
}

fn coarse_decision(oracle: &mut dyn SubcubeOracle, cfg: &TesterConfig, depth: usize) -> Result<Decision> {
    let shape = oracle.shape().clone();
    let count = coarse_sample_count(&shape, cfg);
    let mut counts: Vec<Vec<usize>> = shape.dims().iter().map(|&m| vec![0; m]).collect();
    for _ in 0..count {
        let x = oracle.sample_all(Tag::new(Phase::Coarse, depth))?;
        for (c, &xi) in counts.iter_mut().zip(&x) {
            c[xi] += 1;
        }
    }
    let n = count as f64;
    let bad = counts.iter().any(|c| {
        let m = c.len() as f64;
        c.iter()
            .any(|&k| (k as f64) < n / (2.0 * m) || (k as f64) > 2.0 * n / m)
    });
    Ok(if bad { Decision::Reject } else { Decision::Accept })
}

/// Rejects iff some symbol frequency leaves `[N/(2 m_i), 2N/m_i]`.
pub fn coarse_test(oracle: &mut dyn SubcubeOracle, cfg: &TesterConfig) -> Result<Verdict> {
    let ctx = Ctx::new(cfg)?;
    let decision = coarse_decision(oracle, cfg, 0)?;
    let mut ctx = ctx;
    ctx.log(0, || "coarse".into(), decision);
    Ok(ctx.finish(decision, oracle.ledger().snapshot()))
}

fn projected_decision(oracle: &mut dyn SubcubeOracle, eps: f64, ctx: &mut Ctx, depth: usize) -> Result<Decision> {
    if coarse_decision(oracle, ctx.cfg, depth)? == Decision::Reject {
        return Ok(Decision::Reject);
    }
    let m = oracle.shape().max_side();
    let reps = ctx.cfg.projected_reps(m);
    let inner = eps / (2.0 * m as f64);
    for k in 1..=m * m {
        let mut rejects = 0;
        for _ in 0..reps {
            let mut stream = ProjectedStream::new(oracle, k, Tag::new(Phase::Mean, depth))?;
            let (d, _) = mean_decision(&mut stream, inner, ctx.cfg, &mut ctx.rng)?;
            rejects += usize::from(d == Decision::Reject);
        }
        if Decision::from_rejects(rejects, reps) == Decision::Reject {
            return Ok(Decision::Reject);
        }
    }
    Ok(Decision::Accept)
}

/// Coarse test, then the mean tester at `eps/(2m)` on every hypercube
/// projection `p^(k)`, `k in [m^2]`, with a majority vote per projection.
pub fn projected_test_mean(oracle: &mut dyn SubcubeOracle, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    check_eps(eps, 1.0)?;
    let mut ctx = Ctx::new(cfg)?;
    let decision = projected_decision(oracle, eps, &mut ctx, 0)?;
    ctx.log(0, || format!("projected eps={eps}"), decision);
    Ok(ctx.finish(decision, oracle.ledger().snapshot()))
}

fn base_decision(oracle: &mut dyn SubcubeOracle, eps: f64, cfg: &TesterConfig, depth: usize) -> Result<Decision> {
    let shape = oracle.shape().clone();
    let domain = shape.size().filter(|&d| d <= cfg.base_case_cap).ok_or_else(|| {
        Error::Config(format!(
            "collision tester domain {shape} exceeds cap {}",
            cfg.base_case_cap
        ))
    })?;
    let count = base_sample_count(domain, eps, cfg)?;
    let mut seen: HashMap<usize, u64> = HashMap::new();
    for _ in 0..count {
        let x = oracle.sample_all(Tag::new(Phase::Base, depth))?;
        *seen.entry(shape.index_of(&x)).or_default() += 1;
    }
    let collisions: f64 = seen.values().map(|&c| (c * c.saturating_sub(1)) as f64 / 2.0).sum();
    let pairs = count as f64 * (count as f64 - 1.0) / 2.0;
    let threshold = (1.0 + 2.0 * eps * eps) / domain as f64;
    Ok(if collisions / pairs <= threshold {
        Decision::Accept
    } else {
        Decision::Reject
    })
}

/// Collision tester over the flattened domain: accepts iff the pairwise
/// collision rate is at most `(1 + 2 eps^2)/D`.
pub fn base_case_tester(oracle: &mut dyn SubcubeOracle, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    let mut ctx = Ctx::new(cfg)?;
    let decision = base_decision(oracle, eps, cfg, 0)?;
    ctx.log(0, || format!("base eps={eps}"), decision);
    Ok(ctx.finish(decision, oracle.ledger().snapshot()))
}

fn sub_cond_decision(oracle: &mut dyn SubcubeOracle, eps: f64, ctx: &mut Ctx, depth: usize) -> Result<Decision> {
    check_eps(eps, 0.5)?;
    if depth > ctx.cfg.max_depth {
        return Err(Error::DepthExceeded {
            depth,
            max: ctx.cfg.max_depth,
        });
    }
    ctx.depth_max = ctx.depth_max.max(depth);
    let cfg = ctx.cfg;
    let shape = oracle.shape().clone();
    let n = shape.n();
    if !cfg.main_case(n, eps) {
        let d = base_decision(oracle, eps, cfg, depth)?;
        ctx.log(depth, || format!("base n={n} eps={eps}"), d);
        return Ok(d);
    }
    let m = shape.max_side();
    let sigma = cfg.sigma(eps);
    let l = cfg.l_param(n, m, eps);
    let r = cfg.r_reps(n, m, eps);
    let restrict_tag = Tag::new(Phase::Recurse, depth);

    let loops = (2.0 * l).log2().ceil().max(1.0) as i32;
    for j in 1..=loops {
        let s_j = (cfg.s_mult * 8.0 * l * (2.0 * l).log2().max(1.0) * 0.5f64.powi(j)).ceil() as usize;
        let eps_j = 0.5f64.powi(j);
        for _ in 0..s_j {
            let rho = draw_restriction_sigma(oracle, sigma, &mut ctx.rng, restrict_tag)?;
            if rho.num_stars() == 0 {
                continue;
            }
            let mut view = RestrictedView::new(oracle, rho)?;
            let mut rejects = 0;
            for _ in 0..r {
                rejects += usize::from(projected_decision(&mut view, eps_j, ctx, depth)? == Decision::Reject);
            }
            let d = Decision::from_rejects(rejects, r);
            ctx.log(depth, || format!("projected j={j} stars={}", view.shape().n()), d);
            if d == Decision::Reject {
                return Ok(d);
            }
        }
    }

    let loops = (4.0 / eps).log2().ceil() as i32;
    let star_cap = 2.0 * sigma * n as f64;
    for j in 1..=loops {
        let s_j = (cfg.s_prime_mult * (32.0 / eps) * (4.0 / eps).log2() * 0.5f64.powi(j)).ceil() as usize;
        let eps_j = 0.5f64.powi(j);
        let t = cfg.t_reps(eps_j);
        for _ in 0..s_j {
            let rho = draw_restriction_sigma(oracle, sigma, &mut ctx.rng, restrict_tag)?;
            let stars = rho.num_stars();
            if stars == 0 || stars as f64 > star_cap {
                continue;
            }
            let mut view = RestrictedView::new(oracle, rho)?;
            let mut rejects = 0;
            for _ in 0..t {
                rejects += usize::from(sub_cond_decision(&mut view, eps_j, ctx, depth + 1)? == Decision::Reject);
            }
            let d = Decision::from_rejects(rejects, t);
            ctx.log(depth, || format!("recurse j={j} stars={stars}"), d);
            if d == Decision::Reject {
                return Ok(d);
            }
        }
    }
    ctx.log(depth, || format!("main n={n} eps={eps}"), Decision::Accept);
    Ok(Decision::Accept)
}

/// The recursive subcube tester: the collision tester when the main-case
/// condition fails, otherwise the projected-mean loop over restrictions from
/// `D_sigma(p)` followed by recursion on low-dimensional restrictions.
pub fn sub_cond_uni(oracle: &mut dyn SubcubeOracle, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    let mut ctx = Ctx::new(cfg)?;
    let decision = sub_cond_decision(oracle, eps, &mut ctx, 0)?;
    Ok(ctx.finish(decision, oracle.ledger().snapshot()))
}
