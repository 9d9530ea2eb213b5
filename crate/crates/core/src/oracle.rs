//! Subcube conditional sampling oracles and query accounting.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{projection_pair, Distribution};
use crate::error::{Error, Result};
use crate::grid::{GridShape, Point, Restriction};

/// Which part of a tester issued a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Coarse,
    Mean,
    Recurse,
    Base,
    /// Queries issued outside any tester phase.
    Direct,
}

impl Phase {
    pub const ALL: [Phase; 5] = [Phase::Coarse, Phase::Mean, Phase::Recurse, Phase::Base, Phase::Direct];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Coarse => "coarse",
            Phase::Mean => "mean",
            Phase::Recurse => "recurse",
            Phase::Base => "base",
            Phase::Direct => "direct",
        }
    }
}

/// Billing tag attached to a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tag {
    pub phase: Phase,
    pub depth: usize,
}

impl Tag {
    pub fn new(phase: Phase, depth: usize) -> Self {
        Self { phase, depth }
    }

    pub fn direct() -> Self {
        Self::new(Phase::Direct, 0)
    }
}

/// Thread-safe query counters.
#[derive(Debug, Default)]
pub struct QueryLedger {
    total: AtomicU64,
    by_phase: [AtomicU64; 5],
    by_depth: Mutex<Vec<u64>>,
}

/// Plain copy of a ledger, also its JSON export format.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub total: u64,
    pub by_depth: Vec<u64>,
    pub by_phase: BTreeMap<String, u64>,
}

impl LedgerSnapshot {
    pub fn phase(&self, phase: Phase) -> u64 {
        self.by_phase.get(phase.name()).copied().unwrap_or(0)
    }

    pub fn max_depth(&self) -> usize {
        self.by_depth.iter().rposition(|&c| c > 0).unwrap_or(0)
    }
}

impl QueryLedger {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn record(&self, tag: Tag) {
        self.total.fetch_add(1, Ordering::Relaxed);
        self.by_phase[tag.phase.slot()].fetch_add(1, Ordering::Relaxed);
        let mut depths = self.by_depth.lock().expect("ledger lock");
        if depths.len() <= tag.depth {
            depths.resize(tag.depth + 1, 0);
        }
        depths[tag.depth] += 1;
    }

    pub fn total(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        let by_phase = Phase::ALL
            .iter()
            .map(|&p| (p.name().to_string(), self.by_phase[p.slot()].load(Ordering::Relaxed)))
            .collect();
        LedgerSnapshot {
            total: self.total(),
            by_depth: self.by_depth.lock().expect("ledger lock").clone(),
            by_phase,
        }
    }
}

/// Access to `p` through subcube conditional samples.
pub trait SubcubeOracle {
    fn shape(&self) -> &GridShape;

    /// One sample of `p` conditioned on the subcube of `rho`, billed under `tag`.
    /// The returned point is full-dimensional with fixed coordinates echoed.
    fn sample_tagged(&mut self, rho: &Restriction, tag: Tag) -> Result<Point>;

    fn ledger(&self) -> Arc<QueryLedger>;

    fn sample(&mut self, rho: &Restriction) -> Result<Point> {
        self.sample_tagged(rho, Tag::direct())
    }

    /// One unconditioned sample.
    fn sample_all(&mut self, tag: Tag) -> Result<Point> {
        let rho = Restriction::all_stars(self.shape().n());
        self.sample_tagged(&rho, tag)
    }
}

/// Exact simulator backed by a dense or product-form distribution.
pub struct DistributionOracle {
    dist: Arc<Distribution>,
    rng: ChaCha8Rng,
    ledger: Arc<QueryLedger>,
}

impl DistributionOracle {
    pub fn new(dist: Arc<Distribution>, seed: u64) -> Self {
        Self::with_ledger(dist, seed, QueryLedger::new())
    }

    pub fn with_ledger(dist: Arc<Distribution>, seed: u64, ledger: Arc<QueryLedger>) -> Self {
        Self {
            dist,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ledger,
        }
    }

    pub fn distribution(&self) -> &Arc<Distribution> {
        &self.dist
    }
}

impl SubcubeOracle for DistributionOracle {
    fn shape(&self) -> &GridShape {
        self.dist.shape()
    }

    fn sample_tagged(&mut self, rho: &Restriction, tag: Tag) -> Result<Point> {
        self.ledger.record(tag);
        self.dist.sample_conditional(rho, &mut self.rng)
    }

    fn ledger(&self) -> Arc<QueryLedger> {
        self.ledger.clone()
    }
}

/// Oracle for `p_{|rho}` built on a parent oracle for `p`.
pub struct RestrictedView<'a> {
    parent: &'a mut dyn SubcubeOracle,
    base: Restriction,
    stars: Vec<usize>,
    shape: GridShape,
}

impl<'a> RestrictedView<'a> {
    pub fn new(parent: &'a mut dyn SubcubeOracle, base: Restriction) -> Result<Self> {
        base.validate(parent.shape())?;
        let stars = base.stars();
        let shape = parent
            .shape()
            .sub_shape(&stars)
            .ok_or_else(|| Error::InvalidArgument("restricted view needs at least one star".into()))?;
        Ok(Self {
            parent,
            base,
            stars,
            shape,
        })
    }

    pub fn base(&self) -> &Restriction {
        &self.base
    }
}

impl SubcubeOracle for RestrictedView<'_> {
    fn shape(&self) -> &GridShape {
        &self.shape
    }

    fn sample_tagged(&mut self, rho: &Restriction, tag: Tag) -> Result<Point> {
        rho.validate(&self.shape)?;
        let full = self.base.compose(rho)?;
        let x = self.parent.sample_tagged(&full, tag)?;
        Ok(self.stars.iter().map(|&i| x[i]).collect())
    }

    fn ledger(&self) -> Arc<QueryLedger> {
        self.parent.ledger()
    }
}

/// Counts calls independently of the ledger; used to audit billing.
pub struct CountingOracle<O> {
    pub inner: O,
    pub calls: u64,
}

impl<O: SubcubeOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, calls: 0 }
    }
}

impl<O: SubcubeOracle> SubcubeOracle for CountingOracle<O> {
    fn shape(&self) -> &GridShape {
        self.inner.shape()
    }

    fn sample_tagged(&mut self, rho: &Restriction, tag: Tag) -> Result<Point> {
        self.calls += 1;
        self.inner.sample_tagged(rho, tag)
    }

    fn ledger(&self) -> Arc<QueryLedger> {
        self.inner.ledger()
    }
}

/// Sampler for `p^(k)` over `{-1,1}^n`, one oracle query per point.
pub struct ProjectedStream<'a> {
    oracle: &'a mut dyn SubcubeOracle,
    pairs: Vec<(usize, usize)>,
    tag: Tag,
}

impl<'a> ProjectedStream<'a> {
    pub fn new(oracle: &'a mut dyn SubcubeOracle, k: usize, tag: Tag) -> Result<Self> {
        let m = oracle.shape().max_side();
        if k == 0 || k > m * m {
            return Err(Error::InvalidArgument(format!("k = {k} outside [1, {}]", m * m)));
        }
        let pairs = oracle.shape().dims().iter().map(|&mi| projection_pair(k, mi)).collect();
        Ok(Self { oracle, pairs, tag })
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// Next point; bits for symbols outside the pair come from `rng`.
    pub fn next_point(&mut self, rng: &mut dyn RngCore) -> Result<Vec<i8>> {
        let x = self.oracle.sample_all(self.tag)?;
        Ok(x.iter()
            .zip(&self.pairs)
            .map(|(&xi, &(c, d))| {
                if c != d && xi == c {
                    1
                } else if c != d && xi == d {
                    -1
                } else if rng.random_bool(0.5) {
                    1
                } else {
                    -1
                }
            })
            .collect())
    }
}

/// Source of `{-1,1}^n` samples for the mean tester.
pub trait SignSampler {
    fn dim(&self) -> usize;
    fn next_point(&mut self, rng: &mut dyn RngCore) -> Result<Vec<i8>>;
}

impl SignSampler for ProjectedStream<'_> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn next_point(&mut self, rng: &mut dyn RngCore) -> Result<Vec<i8>> {
        ProjectedStream::next_point(self, rng)
    }
}

/// `rho ~ D_sigma(p)` drawn with one oracle query; star coins come from `rng`.
pub fn draw_restriction_sigma(
    oracle: &mut dyn SubcubeOracle,
    sigma: f64,
    rng: &mut dyn RngCore,
    tag: Tag,
) -> Result<Restriction> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::InvalidArgument(format!("sigma = {sigma} outside [0,1]")));
    }
    let x = oracle.sample_all(tag)?;
    let stars: Vec<usize> = (0..x.len()).filter(|_| rng.random_bool(sigma)).collect();
    Ok(Restriction::from_point_and_stars(&x, &stars))
}
