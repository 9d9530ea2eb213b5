//! Probability distributions over a hypergrid and the exact operations on them:
//! total variation to uniform, marginals, conditionals, bias vectors, random
//! restrictions and the hypercube projections `p^(k)`.

use std::sync::{Arc, OnceLock};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{GridShape, Point, Restriction};
use crate::report::VerificationReport;
use crate::tensor;

/// Largest dense table accepted unless a caller passes its own cap.
pub const DEFAULT_DENSE_CAP: usize = 1_000_000;

/// Enumeration budget (subsets times cells) for the exhaustive restriction checks.
const ENUMERATION_CAP: usize = 20_000_000;

/// Total-mass tolerance. Summing many floats loses a few ulps per cell, so the
/// bound grows with the table length once it exceeds 1e-12.
fn mass_tolerance(cells: usize) -> f64 {
    1e-12_f64.max(4.0 * cells as f64 * f64::EPSILON)
}

#[derive(Debug, Clone)]
pub enum Body {
    /// One mass per point, row-major.
    Dense(Arc<Vec<f64>>),
    /// One categorical weight vector per coordinate.
    Product(Arc<Vec<Vec<f64>>>),
}

/// A probability distribution `p` over `Z_M`.
#[derive(Debug, Clone)]
pub struct Distribution {
    shape: GridShape,
    body: Body,
    sampler: OnceLock<Arc<WeightedIndex<f64>>>,
}

fn check_masses(values: &[f64], what: &str) -> Result<f64> {
    let mut total = 0.0;
    for &v in values {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidDistribution(format!("{what} has mass {v}")));
        }
        total += v;
    }
    Ok(total)
}

/// `mu^{c,d}` from the two marginal masses, with the zero conventions.
pub fn bias_from_masses(pc: f64, pd: f64) -> f64 {
    let s = pc + pd;
    if s == 0.0 {
        0.0
    } else {
        (pc - pd) / s
    }
}

/// The `(c, d)` pair selected by projection index `k` (1-based) on a side `m_i`.
pub fn projection_pair(k: usize, m_i: usize) -> (usize, usize) {
    let q = k.min(m_i * m_i) - 1;
    ((q / m_i) % m_i, q % m_i)
}

/// Enumerates the row-major indices of the subcube selected by `rho`, in
/// row-major order of its star coordinates.
pub fn subcube_indices(shape: &GridShape, rho: &Restriction) -> Vec<usize> {
    let strides = shape.strides();
    let mut base = 0usize;
    let mut stars = Vec::new();
    for (i, &stride) in strides.iter().enumerate() {
        match rho.get(i) {
            Some(v) => base += v * stride,
            None => stars.push(i),
        }
    }
    let count: usize = stars.iter().map(|&i| shape.side(i)).product();
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; stars.len()];
    for _ in 0..count {
        let ix = base + stars.iter().zip(&digits).map(|(&i, &d)| d * strides[i]).sum::<usize>();
        out.push(ix);
        for k in (0..stars.len()).rev() {
            digits[k] += 1;
            if digits[k] < shape.side(stars[k]) {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

impl Distribution {
    /// Dense table; masses must be non-negative and sum to 1.
    pub fn dense(shape: GridShape, probs: Vec<f64>) -> Result<Self> {
        Self::dense_capped(shape, probs, DEFAULT_DENSE_CAP)
    }

    pub fn dense_capped(shape: GridShape, probs: Vec<f64>, cap: usize) -> Result<Self> {
        let size = shape.size_capped("dense table", cap)?;
        if probs.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "table has {} entries, shape {shape} has {size} points",
                probs.len()
            )));
        }
        let total = check_masses(&probs, "dense table")?;
        if (total - 1.0).abs() > mass_tolerance(size) {
            return Err(Error::InvalidDistribution(format!("total mass {total} is not 1")));
        }
        Ok(Self::from_body(shape, Body::Dense(Arc::new(probs))))
    }

    /// Dense table from non-negative weights, normalized to total mass 1.
    pub fn dense_from_weights(shape: GridShape, weights: Vec<f64>) -> Result<Self> {
        let total = check_masses(&weights, "weight table")?;
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self::dense(shape, probs)
    }

    /// Product of per-coordinate categorical distributions.
    pub fn product(shape: GridShape, marginals: Vec<Vec<f64>>) -> Result<Self> {
        if marginals.len() != shape.n() {
            return Err(Error::InvalidDistribution(format!(
                "{} marginals for {} coordinates",
                marginals.len(),
                shape.n()
            )));
        }
        for (i, q) in marginals.iter().enumerate() {
            if q.len() != shape.side(i) {
                return Err(Error::InvalidDistribution(format!(
                    "marginal {i} has {} entries, side is {}",
                    q.len(),
                    shape.side(i)
                )));
            }
            let total = check_masses(q, "marginal")?;
            if (total - 1.0).abs() > mass_tolerance(q.len()) {
                return Err(Error::InvalidDistribution(format!("marginal {i} sums to {total}")));
            }
        }
        Ok(Self::from_body(shape, Body::Product(Arc::new(marginals))))
    }

    pub fn uniform_dense(shape: GridShape) -> Result<Self> {
        let size = shape.size_capped("dense table", DEFAULT_DENSE_CAP)?;
        Self::dense(shape, vec![1.0 / size as f64; size])
    }

    pub fn uniform_product(shape: GridShape) -> Self {
        let marginals = shape.dims().iter().map(|&m| vec![1.0 / m as f64; m]).collect();
        Self::from_body(shape, Body::Product(Arc::new(marginals)))
    }

    pub fn point_mass(shape: GridShape, x: &[usize]) -> Result<Self> {
        shape.check_point(x)?;
        let size = shape.size_capped("dense table", DEFAULT_DENSE_CAP)?;
        let mut probs = vec![0.0; size];
        probs[shape.index_of(x)] = 1.0;
        Self::dense(shape, probs)
    }

    fn from_body(shape: GridShape, body: Body) -> Self {
        Self {
            shape,
            body,
            sampler: OnceLock::new(),
        }
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.body, Body::Dense(_))
    }

    /// `p(x)`.
    pub fn mass(&self, x: &[usize]) -> f64 {
        match &self.body {
            Body::Dense(t) => t[self.shape.index_of(x)],
            Body::Product(q) => x.iter().zip(q.iter()).map(|(&xi, qi)| qi[xi]).product(),
        }
    }

    /// The full probability table, expanding a product form if needed.
    pub fn to_dense_table(&self) -> Result<Vec<f64>> {
        self.to_dense_table_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_table_capped(&self, cap: usize) -> Result<Vec<f64>> {
        match &self.body {
            Body::Dense(t) => Ok(t.as_ref().clone()),
            Body::Product(q) => {
                let size = self.shape.size_capped("dense expansion", cap)?;
                let mut table = vec![1.0];
                for qi in q.iter() {
                    let mut next = Vec::with_capacity(table.len() * qi.len());
                    for &v in &table {
                        next.extend(qi.iter().map(|&w| v * w));
                    }
                    table = next;
                }
                debug_assert_eq!(table.len(), size);
                Ok(table)
            }
        }
    }

    /// Dense copy of this distribution.
    pub fn to_dense(&self) -> Result<Distribution> {
        match &self.body {
            Body::Dense(_) => Ok(self.clone()),
            Body::Product(_) => Ok(Self::from_body(
                self.shape.clone(),
                Body::Dense(Arc::new(self.to_dense_table()?)),
            )),
        }
    }

    /// `Pr[x_i = a]` for every coordinate and symbol.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        match &self.body {
            Body::Product(q) => q.as_ref().clone(),
            Body::Dense(t) => {
                let dims = self.shape.dims();
                let mut out: Vec<Vec<f64>> = dims.iter().map(|&m| vec![0.0; m]).collect();
                let mut x = vec![0usize; dims.len()];
                for &v in t.iter() {
                    for (i, &xi) in x.iter().enumerate() {
                        out[i][xi] += v;
                    }
                    for i in (0..dims.len()).rev() {
                        x[i] += 1;
                        if x[i] < dims[i] {
                            break;
                        }
                        x[i] = 0;
                    }
                }
                out
            }
        }
    }

    pub fn marginal(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.shape.n() {
            return Err(Error::OutOfRange(format!("coordinate {i}")));
        }
        match &self.body {
            Body::Product(q) => Ok(q[i].clone()),
            Body::Dense(t) => Ok(tensor::marginalize(t, self.shape.dims(), &[i])),
        }
    }

    /// `d_TV(p, U)`.
    pub fn tv_to_uniform(&self) -> Result<f64> {
        let table = self.to_dense_table()?;
        Ok(tv_of_table(&table))
    }

    /// Marginal on the coordinates `s` (ascending order of coordinates).
    pub fn project(&self, s: &[usize]) -> Result<Distribution> {
        let mut s: Vec<usize> = s.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::InvalidArgument("projection onto an empty coordinate set".into()));
        }
        if let Some(&bad) = s.iter().find(|&&i| i >= self.shape.n()) {
            return Err(Error::OutOfRange(format!("coordinate {bad}")));
        }
        let shape = self.shape.sub_shape(&s).expect("non-empty");
        let body = match &self.body {
            Body::Product(q) => Body::Product(Arc::new(s.iter().map(|&i| q[i].clone()).collect())),
            Body::Dense(t) => Body::Dense(Arc::new(tensor::marginalize(t, self.shape.dims(), &s))),
        };
        Ok(Self::from_body(shape, body))
    }

    /// Conditional law `p_{|rho}` on the star coordinates of `rho`.
    pub fn restrict(&self, rho: &Restriction) -> Result<Distribution> {
        rho.validate(&self.shape)?;
        let stars = rho.stars();
        if stars.is_empty() {
            return Err(Error::InvalidArgument("restriction has no stars".into()));
        }
        let shape = self.shape.sub_shape(&stars).expect("non-empty");
        match &self.body {
            Body::Product(q) => {
                for i in 0..self.shape.n() {
                    if let Some(v) = rho.get(i) {
                        if q[i][v] <= 0.0 {
                            return Err(Error::ZeroMassSubcube);
                        }
                    }
                }
                let marginals = stars.iter().map(|&i| q[i].clone()).collect();
                Ok(Self::from_body(shape, Body::Product(Arc::new(marginals))))
            }
            Body::Dense(t) => {
                let idx = subcube_indices(&self.shape, rho);
                let mut sub: Vec<f64> = idx.iter().map(|&ix| t[ix]).collect();
                let total: f64 = sub.iter().sum();
                if total <= 0.0 {
                    return Err(Error::ZeroMassSubcube);
                }
                for v in &mut sub {
                    *v /= total;
                }
                Ok(Self::from_body(shape, Body::Dense(Arc::new(sub))))
            }
        }
    }

    /// Mass of the subcube selected by `rho`.
    pub fn subcube_mass(&self, rho: &Restriction) -> Result<f64> {
        rho.validate(&self.shape)?;
        Ok(match &self.body {
            Body::Product(q) => (0..self.shape.n())
                .filter_map(|i| rho.get(i).map(|v| q[i][v]))
                .product(),
            Body::Dense(t) => subcube_indices(&self.shape, rho).iter().map(|&ix| t[ix]).sum(),
        })
    }

    /// `mu_i^{c,d}(p)`.
    pub fn bias(&self, i: usize, c: usize, d: usize) -> Result<f64> {
        if i >= self.shape.n() {
            return Err(Error::OutOfRange(format!("coordinate {i}")));
        }
        let m = self.shape.side(i);
        if c >= m || d >= m {
            return Err(Error::OutOfRange(format!("symbols ({c},{d}) on side {m}")));
        }
        if c == d {
            return Ok(0.0);
        }
        let q = self.marginal(i)?;
        Ok(bias_from_masses(q[c], q[d]))
    }

    pub fn bias_vector(&self) -> BiasVector {
        BiasVector::from_marginals(&self.marginals())
    }

    /// `||mu(p)||_2`.
    pub fn bias_norm(&self) -> f64 {
        self.bias_vector().norm()
    }

    /// One sample from `p`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match &self.body {
            Body::Product(q) => q.iter().map(|qi| sample_categorical(qi, rng)).collect(),
            Body::Dense(t) => {
                let sampler = self
                    .sampler
                    .get_or_init(|| Arc::new(WeightedIndex::new(t.iter().copied()).expect("validated table")));
                self.shape.point_of(sampler.sample(rng))
            }
        }
    }

    /// One sample from `p` conditioned on the subcube of `rho`; fixed
    /// coordinates are echoed.
    pub fn sample_conditional<R: Rng + ?Sized>(&self, rho: &Restriction, rng: &mut R) -> Result<Point> {
        rho.validate(&self.shape)?;
        if rho.num_stars() == rho.n() {
            return Ok(self.sample(rng));
        }
        match &self.body {
            Body::Product(q) => {
                let mut x = Vec::with_capacity(self.shape.n());
                for (i, qi) in q.iter().enumerate() {
                    match rho.get(i) {
                        Some(v) if qi[v] > 0.0 => x.push(v),
                        Some(_) => return Err(Error::ZeroMassSubcube),
                        None => x.push(sample_categorical(qi, rng)),
                    }
                }
                Ok(x)
            }
            Body::Dense(t) => {
                let idx = subcube_indices(&self.shape, rho);
                let weights: Vec<f64> = idx.iter().map(|&ix| t[ix]).collect();
                let w = WeightedIndex::new(&weights).map_err(|_| Error::ZeroMassSubcube)?;
                Ok(self.shape.point_of(idx[w.sample(rng)]))
            }
        }
    }

    /// `rho ~ D_sigma(p)`: each coordinate is a star independently with
    /// probability `sigma`, the rest are fixed to one sample of `p`.
    pub fn draw_restriction_sigma<R: Rng + ?Sized>(&self, sigma: f64, rng: &mut R) -> Result<Restriction> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::InvalidArgument(format!("sigma = {sigma} outside [0,1]")));
        }
        let x = self.sample(rng);
        let stars: Vec<usize> = (0..self.shape.n()).filter(|_| rng.random_bool(sigma)).collect();
        Ok(Restriction::from_point_and_stars(&x, &stars))
    }

    /// `rho ~ D(t, p)`: a uniform `t`-subset of stars, the rest fixed to one sample of `p`.
    pub fn draw_restriction_t<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Result<Restriction> {
        let n = self.shape.n();
        if t > n {
            return Err(Error::InvalidArgument(format!("t = {t} exceeds n = {n}")));
        }
        let y = self.sample(rng);
        let stars = rand::seq::index::sample(rng, n, t).into_vec();
        Ok(Restriction::from_point_and_stars(&y, &stars))
    }

    /// The projection `p^(k)` onto `{-1,1}^n`, represented over shape `(2,...,2)`
    /// with symbol 0 standing for `+1` and symbol 1 for `-1`.
    ///
    /// Diagonal pairs `(c, c)` map every symbol to a fresh uniform bit.
    pub fn hypercube_projection(&self, k: usize) -> Result<Distribution> {
        let m = self.shape.max_side();
        if k == 0 || k > m * m {
            return Err(Error::InvalidArgument(format!("k = {k} outside [1, {}]", m * m)));
        }
        let n = self.shape.n();
        let shape = GridShape::uniform(n, 2)?;
        let kernels: Vec<Vec<f64>> = self.shape.dims().iter().map(|&mi| projection_kernel(k, mi)).collect();
        match &self.body {
            Body::Product(q) => {
                let marginals = q
                    .iter()
                    .zip(&kernels)
                    .map(|(qi, ker)| tensor::contract_axis(qi, &[qi.len()], 0, ker, 2))
                    .collect();
                Ok(Self::from_body(shape, Body::Product(Arc::new(marginals))))
            }
            Body::Dense(t) => {
                shape.size_capped("hypercube projection", DEFAULT_DENSE_CAP)?;
                let mut dims = self.shape.dims().to_vec();
                let mut table = t.as_ref().clone();
                for axis in 0..n {
                    table = tensor::contract_axis(&table, &dims, axis, &kernels[axis], 2);
                    dims[axis] = 2;
                }
                Ok(Self::from_body(shape, Body::Dense(Arc::new(table))))
            }
        }
    }

    /// Whether every marginal lies in `[1/(4 m_i), 4/m_i]`.
    pub fn in_coarse_band(&self) -> bool {
        self.marginals().iter().all(|q| {
            let m = q.len() as f64;
            q.iter().all(|&v| v >= 1.0 / (4.0 * m) && v <= 4.0 / m)
        })
    }

    /// Evaluates both sides of
    /// `d_TV(p,U) <= E_S[d_TV(p_{S-bar},U)] + E_rho[d_TV(p_{|rho},U)]`
    /// exactly, for `S ~ S_sigma` and `rho ~ D_sigma(p)`.
    pub fn verify_lemma_1_4(&self, sigma: f64) -> Result<VerificationReport> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::InvalidArgument(format!("sigma = {sigma} outside [0,1]")));
        }
        let n = self.shape.n();
        let table = self.to_dense_table()?;
        let cost = (table.len() as u128) << n.min(100);
        if n > 30 || cost > ENUMERATION_CAP as u128 {
            return Err(Error::Capacity {
                what: "restriction enumeration",
                needed: cost,
                cap: ENUMERATION_CAP as u128,
            });
        }
        let dims = self.shape.dims();
        let lhs = tv_of_table(&table);
        let mut first = 0.0;
        let mut second = 0.0;
        for mask in 0u64..(1u64 << n) {
            let stars: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let fixed: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
            let weight = sigma.powi(stars.len() as i32) * (1.0 - sigma).powi(fixed.len() as i32);
            if weight == 0.0 {
                continue;
            }
            if !fixed.is_empty() {
                first += weight * tv_of_table(&tensor::marginalize(&table, dims, &fixed));
            }
            if !stars.is_empty() {
                second += weight * weighted_conditional_tv(&table, dims, &fixed, &stars);
            }
        }
        let rhs = first + second;
        Ok(VerificationReport::inequality(
            "restriction_tv_bound",
            format!("shape={} sigma={sigma}", self.shape),
            lhs,
            rhs,
            1e-9,
        ))
    }

    /// Compares `sum_k ||mu(p^(k))||^2` with `||mu(p)||^2 / (4 m^2)`. Reports
    /// a vacuous pass when the marginals leave the coarse band.
    pub fn check_projection_bias_bound(&self) -> Result<VerificationReport> {
        let m = self.shape.max_side();
        let full = self.bias_vector().norm_sq();
        let rhs = full / (4.0 * (m * m) as f64);
        let mut lhs = 0.0;
        for k in 1..=m * m {
            let q = self.hypercube_projection(k)?;
            lhs += hypercube_mean(&q)?.iter().map(|v| v * v).sum::<f64>();
        }
        let mut r =
            VerificationReport::inequality("projection_bias_bound", format!("shape={}", self.shape), rhs, lhs, 1e-9);
        if !self.in_coarse_band() {
            r.vacuous = true;
            r.holds = true;
            r.counterexamples = 0;
        }
        Ok(r)
    }
}

fn sample_categorical<R: Rng + ?Sized>(q: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (a, &w) in q.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = a;
            if u < acc {
                return a;
            }
        }
    }
    last
}

/// Column-stochastic `2 x m_i` kernel pushing symbols to bits for index `k`.
fn projection_kernel(k: usize, m_i: usize) -> Vec<f64> {
    let (c, d) = projection_pair(k, m_i);
    let mut ker = vec![0.5; 2 * m_i];
    if c != d {
        ker[c] = 1.0;
        ker[m_i + c] = 0.0;
        ker[d] = 0.0;
        ker[m_i + d] = 1.0;
    }
    ker
}

/// Hypercube mean vector `Pr[z_i = +1] - Pr[z_i = -1]` of a distribution over `(2,...,2)`.
pub fn hypercube_mean(q: &Distribution) -> Result<Vec<f64>> {
    if q.shape().dims().iter().any(|&m| m != 2) {
        return Err(Error::InvalidArgument(
            "hypercube mean needs every side equal to 2".into(),
        ));
    }
    Ok(q.marginals().iter().map(|qi| qi[0] - qi[1]).collect())
}

/// `(1/2) sum |t(x) - 1/N|` for a normalized table.
pub fn tv_of_table(table: &[f64]) -> f64 {
    let u = 1.0 / table.len() as f64;
    0.5 * table.iter().map(|&v| (v - u).abs()).sum::<f64>()
}

/// `sum_u p_fixed(u) * d_TV(p_{|rho(stars,u)}, U)` computed on the raw table.
fn weighted_conditional_tv(table: &[f64], dims: &[usize], fixed: &[usize], stars: &[usize]) -> f64 {
    let rows: usize = fixed.iter().map(|&i| dims[i]).product();
    let cols: usize = stars.iter().map(|&i| dims[i]).product();
    let mut grid = vec![0.0; rows * cols];
    let mut x = vec![0usize; dims.len()];
    for &v in table {
        let r = fixed.iter().fold(0, |acc, &i| acc * dims[i] + x[i]);
        let c = stars.iter().fold(0, |acc, &i| acc * dims[i] + x[i]);
        grid[r * cols + c] += v;
        for i in (0..dims.len()).rev() {
            x[i] += 1;
            if x[i] < dims[i] {
                break;
            }
            x[i] = 0;
        }
    }
    let mut total = 0.0;
    for row in grid.chunks(cols) {
        let mass: f64 = row.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        let u = mass / cols as f64;
        total += 0.5 * row.iter().map(|&v| (v - u).abs()).sum::<f64>();
    }
    total
}

/// The bias vector `mu(p)`: one antisymmetric `m_i x m_i` matrix per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVector {
    sides: Vec<usize>,
    mats: Vec<Vec<f64>>,
}

impl BiasVector {
    pub fn from_marginals(marginals: &[Vec<f64>]) -> Self {
        let sides: Vec<usize> = marginals.iter().map(|q| q.len()).collect();
        let mats = marginals
            .iter()
            .map(|q| {
                let m = q.len();
                let mut mat = vec![0.0; m * m];
                for c in 0..m {
                    for d in 0..m {
                        if c != d {
                            mat[c * m + d] = bias_from_masses(q[c], q[d]);
                        }
                    }
                }
                mat
            })
            .collect();
        Self { sides, mats }
    }

    pub fn n(&self) -> usize {
        self.sides.len()
    }

    pub fn get(&self, i: usize, c: usize, d: usize) -> f64 {
        self.mats[i][c * self.sides[i] + d]
    }

    /// Row-major `m_i x m_i` matrix for coordinate `i`.
    pub fn matrix(&self, i: usize) -> &[f64] {
        &self.mats[i]
    }

    pub fn norm_sq(&self) -> f64 {
        self.mats.iter().flatten().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Squared norm restricted to the listed coordinates.
    pub fn norm_sq_on(&self, coords: &[usize]) -> f64 {
        coords.iter().flat_map(|&i| self.mats[i].iter()).map(|v| v * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(d: &[usize]) -> GridShape {
        GridShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn tv_examples() {
        let u = Distribution::uniform_dense(shape(&[2, 3])).unwrap();
        assert!(u.tv_to_uniform().unwrap().abs() < 1e-15);
        let pm = Distribution::point_mass(shape(&[2, 2]), &[0, 0]).unwrap();
        assert!((pm.tv_to_uniform().unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Distribution::dense(shape(&[2]), vec![0.5, 0.6]).is_err());
        assert!(Distribution::dense(shape(&[2]), vec![1.5, -0.5]).is_err());
        assert!(Distribution::dense(shape(&[2]), vec![1.0]).is_err());
        assert!(Distribution::product(shape(&[2]), vec![vec![0.3, 0.3]]).is_err());
        assert!(Distribution::dense_capped(shape(&[10, 10]), vec![0.01; 100], 50).is_err());
    }

    #[test]
    fn bias_examples() {
        let pm = Distribution::point_mass(shape(&[2, 2]), &[0, 0]).unwrap();
        assert_eq!(pm.bias(0, 0, 1).unwrap(), 1.0);
        assert_eq!(pm.bias(0, 1, 1).unwrap(), 0.0);
        assert!((pm.bias_norm() - 2.0).abs() < 1e-15);
        let p = Distribution::product(shape(&[3]), vec![vec![0.5, 0.25, 0.25]]).unwrap();
        assert!((p.bias(0, 0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(p.bias(1, 0, 0).is_err());
        assert!(p.bias(0, 0, 3).is_err());
    }

    #[test]
    fn zero_convention_for_empty_symbols() {
        let p = Distribution::product(shape(&[3]), vec![vec![1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(p.bias(0, 1, 2).unwrap(), 0.0);
        assert_eq!(p.bias(0, 0, 2).unwrap(), 1.0);
    }

    #[test]
    fn projection_pairs_are_row_major_and_clamped() {
        assert_eq!(projection_pair(1, 3), (0, 0));
        assert_eq!(projection_pair(2, 3), (0, 1));
        assert_eq!(projection_pair(4, 3), (1, 0));
        assert_eq!(projection_pair(9, 3), (2, 2));
        assert_eq!(projection_pair(16, 2), (1, 1));
        assert_eq!(projection_pair(3, 2), (1, 0));
    }

    #[test]
    fn single_coordinate_projection() {
        let p = Distribution::dense(shape(&[2]), vec![0.7, 0.3]).unwrap();
        // k = 2 selects (0, 1)
        let q = p.hypercube_projection(2).unwrap();
        let mu = hypercube_mean(&q).unwrap();
        assert!((mu[0] - 0.4).abs() < 1e-15);
        assert!(p.hypercube_projection(0).is_err());
        assert!(p.hypercube_projection(5).is_err());
    }

    #[test]
    fn restriction_draws_at_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Distribution::uniform_product(shape(&[2, 3, 2]));
        assert_eq!(p.draw_restriction_sigma(1.0, &mut rng).unwrap().num_stars(), 3);
        assert_eq!(p.draw_restriction_sigma(0.0, &mut rng).unwrap().num_stars(), 0);
        assert_eq!(p.draw_restriction_t(3, &mut rng).unwrap().num_stars(), 3);
        assert_eq!(p.draw_restriction_t(0, &mut rng).unwrap().num_stars(), 0);
        assert!(p.draw_restriction_t(4, &mut rng).is_err());
        assert!(p.draw_restriction_sigma(1.5, &mut rng).is_err());
    }

    #[test]
    fn restrict_errors() {
        let p = Distribution::point_mass(shape(&[2, 2]), &[0, 0]).unwrap();
        let rho = Restriction::new(vec![Some(1), None]);
        assert_eq!(p.restrict(&rho).unwrap_err(), Error::ZeroMassSubcube);
        assert!(p.restrict(&Restriction::fixed(&[0, 0])).is_err());
        assert!(p.project(&[]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            p.sample_conditional(&rho, &mut rng).unwrap_err(),
            Error::ZeroMassSubcube
        );
    }

    #[test]
    fn lemma_bound_equality_at_sigma_zero_and_one() {
        let p = Distribution::dense(shape(&[2, 3]), vec![0.3, 0.1, 0.05, 0.2, 0.15, 0.2]).unwrap();
        for sigma in [0.0, 1.0] {
            let r = p.verify_lemma_1_4(sigma).unwrap();
            assert!(r.holds);
            assert!((r.lhs - r.rhs).abs() < 1e-12, "sigma {sigma}: {r:?}");
        }
    }
}
