//! Exhaustive checks of the Fourier identities behind the (robust) Pisier
//! inequality, and of the explicit-constant facts linking edge orientations
//! to biases of restricted distributions.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::distribution::Distribution;
use crate::edges::{build_orientation, build_orientation_with_m, OrientedEdgeSet, Subgraph};
use crate::error::{Error, Result};
use crate::fourier::{delta_gamma, dft, laplacian, root, support_size, ComplexField, SmoothTable};
use crate::grid::{GridShape, Restriction};
use crate::report::{Tightest, VerificationReport};

/// Largest grid for the `O(N^2)` double expectations.
pub const PISIER_CAP: usize = 200;

/// Largest dense `p` for the restriction enumerations.
pub const LEMMA_CAP: usize = 4096;

fn check_mean_zero(f: &ComplexField) -> Result<()> {
    let scale = f.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
    if f.mean().norm() > 1e-9 * scale {
        return Err(Error::InvalidArgument("function must have mean zero".into()));
    }
    Ok(())
}

fn check_open_unit(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t = {t} outside (0,1)")))
    }
}

fn complex_identity(name: &str, instance: String, lhs: Complex64, rhs: Complex64, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::identity(name, instance, lhs.re, rhs.re, tol);
    let ok = (lhs - rhs).norm() <= tol;
    r.holds = ok;
    r.counterexamples = u64::from(!ok);
    r
}

/// Checks
/// `sum_{u != 0} t^{#u-1} (#u)^{gamma+1} f_hat(u) conj(g_hat(u))
///  = 1/(1-t) E_{x,y}[conj(g_t(x,y)) sum_i sum_{a != 0} omega^{-a y_i} omega^{a x_i} L_i Delta^gamma f(x)]`.
pub fn check_lemma_pisier_subpart(
    f: &ComplexField,
    g: &ComplexField,
    t: f64,
    gamma: f64,
) -> Result<VerificationReport> {
    let shape = f.shape().clone();
    if g.shape() != &shape {
        return Err(Error::InvalidArgument("f and g live on different grids".into()));
    }
    let size = shape.size_capped("pisier double expectation", PISIER_CAP)?;
    check_mean_zero(f)?;
    check_open_unit(t)?;
    let fh = dft(f);
    let gh = dft(g);
    let mut lhs = Complex64::new(0.0, 0.0);
    for (ix, (a, b)) in fh.coeffs().iter().zip(gh.coeffs()).enumerate() {
        let w = support_size(&shape.point_of(ix));
        if w > 0 {
            lhs += a * b.conj() * t.powi(w as i32 - 1) * (w as f64).powf(gamma + 1.0);
        }
    }
    let h = delta_gamma(f, gamma)?;
    let lh: Vec<ComplexField> = (0..shape.n()).map(|i| laplacian(&h, i)).collect::<Result<_>>()?;
    let smooth = SmoothTable::new(g, t)?;
    let points: Vec<Vec<usize>> = shape.points().collect();
    let dims = shape.dims();
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, x) in points.iter().enumerate() {
        for y in &points {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..dims.len() {
                let mut ch = Complex64::new(0.0, 0.0);
                for a in 1..dims[i] {
                    ch += root(dims[i], -((a * y[i]) as i64)) * root(dims[i], (a * x[i]) as i64);
                }
                s += ch * lh[i].values()[xi];
            }
            acc += smooth.get(x, y).conj() * s;
        }
    }
    let rhs = acc / (size * size) as f64 / (1.0 - t);
    Ok(complex_identity(
        "pisier_subpart",
        format!("shape={shape} t={t} gamma={gamma}"),
        lhs,
        rhs,
        1e-8,
    ))
}

/// Values of `L_i^b h(x)` for all `x, i, b`, laid out as `[x][i][b]`.
struct PartialLaplacians {
    offsets: Vec<usize>,
    width: usize,
    values: Vec<Complex64>,
}

impl PartialLaplacians {
    fn new(h: &ComplexField) -> Self {
        let shape = h.shape();
        let strides = shape.strides();
        let mut offsets = Vec::new();
        let mut width = 0;
        for &m in shape.dims() {
            offsets.push(width);
            width += m;
        }
        let size = h.values().len();
        let mut values = vec![Complex64::new(0.0, 0.0); size * width];
        let mut x = vec![0; shape.n()];
        for ix in 0..size {
            shape.point_into(ix, &mut x);
            for i in 0..shape.n() {
                let m = shape.side(i);
                for b in 0..m {
                    let other = ix - x[i] * strides[i] + b * strides[i];
                    values[ix * width + offsets[i] + b] = (h.values()[ix] - h.values()[other]) / m as f64;
                }
            }
        }
        Self { offsets, width, values }
    }

    fn get(&self, x: usize, i: usize, b: usize) -> Complex64 {
        self.values[x * self.width + self.offsets[i] + b]
    }
}

/// Per-point tables `C[x][i][c] = sum_a omega^{-a c} B[x][i][a]`, so that the
/// inner sum at `(x, y)` is `sum_i C[x][i][y_i]`.
fn y_tables(shape: &GridShape, b: impl Fn(usize, usize, usize) -> Complex64) -> Vec<Vec<Vec<Complex64>>> {
    let size = shape.size().expect("capped");
    (0..size)
        .map(|x| {
            (0..shape.n())
                .map(|i| {
                    let m = shape.side(i);
                    (0..m)
                        .map(|c| (1..m).map(|a| root(m, -((a * c) as i64)) * b(x, i, a)).sum())
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn grouped_coefficients<'a>(
    shape: &GridShape,
    pl: &'a PartialLaplacians,
    e: &'a OrientedEdgeSet,
) -> impl Fn(usize, usize, usize) -> Complex64 + 'a {
    let shape = shape.clone();
    move |x, i, a| {
        let m = shape.side(i);
        let xi = e.symbol(x, i);
        let mut s = Complex64::new(0.0, 0.0);
        for d in 1..m {
            let b = (xi + d) % m;
            if e.directed(x, i, b).is_some() {
                s += (Complex64::new(1.0, 0.0) - root(m, (a * d) as i64)) * root(m, (a * xi) as i64) * pl.get(x, i, b);
            }
        }
        s
    }
}

fn check_orientation_shape(f: &ComplexField, e: &OrientedEdgeSet) -> Result<()> {
    if e.shape() != f.shape() {
        return Err(Error::InvalidArgument(
            "orientation and function live on different grids".into(),
        ));
    }
    Ok(())
}

fn s_mean(shape: &GridShape, tables: &[Vec<Vec<Complex64>>], s: f64) -> f64 {
    let points: Vec<Vec<usize>> = shape.points().collect();
    let mut total = 0.0;
    for tx in tables {
        for y in &points {
            let v: Complex64 = y.iter().enumerate().map(|(i, &yi)| tx[i][yi]).sum();
            total += v.norm().powf(s);
        }
    }
    let n = points.len() as f64;
    (total / (n * n)).powf(1.0 / s)
}

/// `(E_{x,y} |sum_i sum_a sum_{d: (x, x^{(i)->x_i+d}) in G} (1 - omega^{ad}) omega^{-a y_i} omega^{a x_i} L_i^{x_i+d} f(x)|^s)^{1/s}`.
pub fn robust_pisier_rhs(f: &ComplexField, s: f64, e: &OrientedEdgeSet) -> Result<f64> {
    let shape = f.shape().clone();
    shape.size_capped("pisier double expectation", PISIER_CAP)?;
    check_mean_zero(f)?;
    check_orientation_shape(f, e)?;
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} below 1")));
    }
    let pl = PartialLaplacians::new(f);
    let coef = grouped_coefficients(&shape, &pl, e);
    let tables = y_tables(&shape, coef);
    Ok(s_mean(&shape, &tables, s))
}

/// `(E_{x,y} |sum_i L_i f(x) sum_a omega^{-a y_i} omega^{a x_i}|^s)^{1/s}`.
pub fn pisier_rhs(f: &ComplexField, s: f64) -> Result<f64> {
    let shape = f.shape().clone();
    shape.size_capped("pisier double expectation", PISIER_CAP)?;
    check_mean_zero(f)?;
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} below 1")));
    }
    let lf: Vec<ComplexField> = (0..shape.n()).map(|i| laplacian(f, i)).collect::<Result<_>>()?;
    let tables = y_tables(&shape, |x, i, a| {
        let xi = shape.point_of(x)[i];
        root(shape.side(i), (a * xi) as i64) * lf[i].values()[x]
    });
    Ok(s_mean(&shape, &tables, s))
}

/// Checks that summing `L_i^b Delta^gamma f` over every `b` equals the sum
/// grouped by the orientation with `(1 - omega^{ad})` factors, both weighted
/// by `conj(g_t(x, y))` and averaged over `x, y`.
pub fn check_orientation_identity(
    f: &ComplexField,
    g: &ComplexField,
    t: f64,
    gamma: f64,
    e: &OrientedEdgeSet,
) -> Result<VerificationReport> {
    let shape = f.shape().clone();
    if g.shape() != &shape {
        return Err(Error::InvalidArgument("f and g live on different grids".into()));
    }
    let size = shape.size_capped("pisier double expectation", PISIER_CAP)?;
    check_mean_zero(f)?;
    check_open_unit(t)?;
    check_orientation_shape(f, e)?;
    let h = delta_gamma(f, gamma)?;
    let pl = PartialLaplacians::new(&h);
    let ungrouped = y_tables(&shape, |x, i, a| {
        let m = shape.side(i);
        let xi = e.symbol(x, i);
        (0..m).map(|b| pl.get(x, i, b)).sum::<Complex64>() * root(m, (a * xi) as i64)
    });
    let grouped = y_tables(&shape, grouped_coefficients(&shape, &pl, e));
    let smooth = SmoothTable::new(g, t)?;
    let points: Vec<Vec<usize>> = shape.points().collect();
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for (xi, x) in points.iter().enumerate() {
        for y in &points {
            let w = smooth.get(x, y).conj();
            let u: Complex64 = y.iter().enumerate().map(|(i, &yi)| ungrouped[xi][i][yi]).sum();
            let v: Complex64 = y.iter().enumerate().map(|(i, &yi)| grouped[xi][i][yi]).sum();
            lhs += w * u;
            rhs += w * v;
        }
    }
    let norm = (size * size) as f64;
    Ok(complex_identity(
        "orientation_grouping",
        format!("shape={shape} t={t} gamma={gamma}"),
        lhs / norm,
        rhs / norm,
        1e-8,
    ))
}

/// `log^2(n + 2)`; the shift keeps the factor positive for `n = 1`.
pub fn log_sq_factor(n: usize) -> f64 {
    let l = ((n + 2) as f64).ln();
    l * l
}

/// Both sides of the Bernstein-chain bound for `l`, as a monitored ratio
/// `lhs / rhs` with `lhs = d_TV(l,U) / (m^1.5 log^2(n+2))` and
/// `rhs = E_x sqrt(sum over out-edges (x, x^{(i)->b}) of (L_i^b f(x))^2)`,
/// `f = N l - 1`.
pub fn check_bernstein_chain(l: &Distribution) -> Result<VerificationReport> {
    l.shape().size_capped("bernstein chain", 1000)?;
    let e = build_orientation(l)?;
    let table = l.to_dense_table()?;
    let size = table.len();
    let shape = l.shape();
    let m = shape.max_side() as f64;
    let f: Vec<f64> = table.iter().map(|&v| size as f64 * v - 1.0).collect();
    let mut rhs = 0.0;
    for x in 0..size {
        let mut s = 0.0;
        for i in 0..shape.n() {
            for b in 0..shape.side(i) {
                if e.directed(x, i, b).is_some() {
                    let y = e.neighbor(x, i, b);
                    let d = (f[x] - f[y]) / shape.side(i) as f64;
                    s += d * d;
                }
            }
        }
        rhs += s.sqrt();
    }
    rhs /= size as f64;
    let lhs = l.tv_to_uniform()? / (m.powf(1.5) * log_sq_factor(shape.n()));
    Ok(VerificationReport::monitored(
        "bernstein_chain",
        format!("shape={shape}"),
        lhs,
        rhs,
    ))
}

/// Which alternative of the outdegree dichotomy is best supported by `l`,
/// as the largest normalized ratio over the uneven graph and each scale.
/// The report holds iff `l` is uniform or some alternative has positive mass.
pub fn outdegree_case_witness(l: &Distribution) -> Result<VerificationReport> {
    let e = build_orientation(l)?;
    let table = l.to_dense_table()?;
    let beta = l.tv_to_uniform()?;
    let shape = l.shape();
    let n = shape.n();
    let m = shape.max_side() as f64;
    let mean_sqrt = |sub: Subgraph| -> f64 {
        table
            .iter()
            .enumerate()
            .map(|(x, &px)| px * (e.outdegree(x, sub) as f64).sqrt())
            .sum()
    };
    let instance = format!("shape={shape}");
    if beta <= 0.0 {
        return Ok(VerificationReport::monitored(
            "outdegree_case_witness",
            instance,
            0.0,
            0.0,
        ));
    }
    let lg = log_sq_factor(n);
    let mut best = mean_sqrt(Subgraph::Uneven) / (beta / (m.powi(3) * lg));
    let log_term = (n as f64 * m / beta).ln().max(1.0);
    let kmax = (10.0 * log_term).ceil() as u32;
    for k in 1..=kmax {
        let scale = m.powi(k as i32) * beta / (m.powf(3.5) * lg * log_term);
        best = best.max(mean_sqrt(Subgraph::Scale(k)) / scale);
    }
    let mut r = VerificationReport::monitored("outdegree_case_witness", instance, best, 1.0);
    r.holds = best > 0.0;
    r.counterexamples = u64::from(!r.holds);
    Ok(r)
}

/// All `k`-subsets of `0..n`, ascending.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Shared state for the restriction enumerations over a dense `p`.
struct RestrictionLab<'a> {
    p: &'a Distribution,
    table: Vec<f64>,
    m: usize,
    orientations: HashMap<Vec<usize>, (Vec<usize>, OrientedEdgeSet)>,
}

impl<'a> RestrictionLab<'a> {
    fn new(p: &'a Distribution, t: usize) -> Result<Self> {
        let n = p.shape().n();
        p.shape().size_capped("lemma enumeration", LEMMA_CAP)?;
        if t == 0 || t + 1 > n {
            return Err(Error::InvalidArgument(format!(
                "t = {t} needs 1 <= t <= n - 1 = {}",
                n - 1
            )));
        }
        Ok(Self {
            p,
            table: p.to_dense_table()?,
            m: p.shape().max_side(),
            orientations: HashMap::new(),
        })
    }

    fn support(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&ix| self.table[ix] > 0.0).collect()
    }

    /// Orientation of `p` projected off `t_set`, with the global `m`, plus the
    /// ascending complement coordinates.
    fn orientation(&mut self, t_set: &[usize]) -> Result<&(Vec<usize>, OrientedEdgeSet)> {
        if !self.orientations.contains_key(t_set) {
            let comp: Vec<usize> = (0..self.p.shape().n()).filter(|i| !t_set.contains(i)).collect();
            let proj = self.p.project(&comp)?;
            let e = build_orientation_with_m(&proj, self.m)?;
            self.orientations.insert(t_set.to_vec(), (comp, e));
        }
        Ok(&self.orientations[t_set])
    }

    /// The directed edge `(y_{T-bar}, j, b)` in the orientation for `T`.
    fn edge(&mut self, t_set: &[usize], y: &[usize], j: usize, b: usize) -> Result<Option<Subgraph>> {
        let (comp, e) = self.orientation(t_set)?;
        let z: Vec<usize> = comp.iter().map(|&c| y[c]).collect();
        let pos = comp.iter().position(|&c| c == j).expect("j outside T");
        if z[pos] == b {
            return Ok(None);
        }
        let zi = e.shape().index_of(&z);
        Ok(e.directed(zi, pos, b))
    }

    /// `p_{|rho}` for stars `stars` and fixed values from `y`.
    fn restricted(&self, y: &[usize], stars: &[usize]) -> Result<Distribution> {
        self.p.restrict(&Restriction::from_point_and_stars(y, stars))
    }
}

fn position(stars: &[usize], j: usize) -> usize {
    stars.iter().position(|&s| s == j).expect("coordinate among stars")
}

/// Lower bound on `|mu^{b, y_j}_j(p_{|rho(pi,y)})|` from the class of the
/// directed edge `(y_{T-bar}, j, b)`, `T = S(pi) - {j}`, at every enumerated
/// configuration with `y` in the support.
pub fn check_lemma_3_7(p: &Distribution, t: usize) -> Result<VerificationReport> {
    let mut lab = RestrictionLab::new(p, t)?;
    let shape = p.shape().clone();
    let m = lab.m as f64;
    let mut configs = 0u64;
    let mut bad = 0u64;
    let mut tight = Tightest::default();
    for s in subsets(shape.n(), t + 1) {
        for &y_ix in &lab.support() {
            let y = shape.point_of(y_ix);
            let cond = lab.restricted(&y, &s)?;
            let bias = cond.bias_vector();
            for &j in &s {
                let t_set: Vec<usize> = s.iter().copied().filter(|&v| v != j).collect();
                for b in 0..shape.side(j) {
                    if b == y[j] {
                        continue;
                    }
                    let rhs = match lab.edge(&t_set, &y, j, b)? {
                        Some(Subgraph::Uneven) => m / (2.0 * (m + 1.0)),
                        Some(Subgraph::Scale(k)) => 0.5 * m.powi(-(k as i32)),
                        _ => 0.0,
                    };
                    let lhs = bias.get(position(&s, j), b, y[j]).abs();
                    configs += 1;
                    // stored as (bound, value) so that "bound <= value" is the statement
                    tight.offer(rhs, lhs);
                    if lhs < rhs - 1e-12 {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok(VerificationReport::enumeration(
        "edge_bias_lower_bound",
        format!("shape={shape} t={t}"),
        configs,
        bad,
        tight.best,
        1e-12,
    ))
}

/// Whenever `y` has uneven out-edges along two coordinates `i, j` of `S`
/// (each in the orientation with the other coordinate's set removed), some
/// symbol reaches bias `1/(4m)` in one of the two restrictions.
pub fn check_claim_3_10(p: &Distribution, t: usize) -> Result<VerificationReport> {
    let mut lab = RestrictionLab::new(p, t)?;
    let shape = p.shape().clone();
    let threshold = 1.0 / (4.0 * lab.m as f64);
    let mut configs = 0u64;
    let mut bad = 0u64;
    let mut tight = Tightest::default();
    for s in subsets(shape.n(), t + 1) {
        for &y_ix in &lab.support() {
            let y = shape.point_of(y_ix);
            for (ai, &i) in s.iter().enumerate() {
                for &j in &s[ai + 1..] {
                    let without_i: Vec<usize> = s.iter().copied().filter(|&v| v != i).collect();
                    let without_j: Vec<usize> = s.iter().copied().filter(|&v| v != j).collect();
                    let mut has_i = false;
                    for b in 0..shape.side(i) {
                        has_i |= lab.edge(&without_i, &y, i, b)? == Some(Subgraph::Uneven);
                    }
                    let mut has_j = false;
                    for b in 0..shape.side(j) {
                        has_j |= lab.edge(&without_j, &y, j, b)? == Some(Subgraph::Uneven);
                    }
                    if !(has_i && has_j) {
                        continue;
                    }
                    configs += 1;
                    // coordinate i is a star of rho(pi_{-j}, y), j of rho(pi_{-i}, y)
                    let bi = lab.restricted(&y, &without_j)?.bias_vector();
                    let bj = lab.restricted(&y, &without_i)?.bias_vector();
                    let pi = position(&without_j, i);
                    let pj = position(&without_i, j);
                    let best_i = (0..shape.side(i))
                        .map(|c| bi.get(pi, c, y[i]).abs())
                        .fold(0.0, f64::max);
                    let best_j = (0..shape.side(j))
                        .map(|c| bj.get(pj, c, y[j]).abs())
                        .fold(0.0, f64::max);
                    let best = best_i.max(best_j);
                    tight.offer(threshold, best);
                    if best < threshold - 1e-12 {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok(VerificationReport::enumeration(
        "paired_uneven_bias",
        format!("shape={shape} t={t}"),
        configs,
        bad,
        tight.best,
        1e-12,
    ))
}

/// If every fiber `rho(pi_{-i}, y^{(i)->a})` has `||mu|| < sqrt(gamma)/m^{kappa+1}`,
/// then the bias mass of `p_{|rho(pi,y)}` off coordinate `i` is below
/// `gamma/m^{2 kappa + 2}`. Zero-mass fibers count as satisfying the premise.
pub fn check_lemma_3_12(p: &Distribution, t: usize, kappa: u32, gamma: f64) -> Result<VerificationReport> {
    let lab = RestrictionLab::new(p, t)?;
    if !(gamma >= 1.0) || kappa == 0 {
        return Err(Error::InvalidArgument(format!(
            "need gamma >= 1 and kappa >= 1, got {gamma}, {kappa}"
        )));
    }
    let shape = p.shape().clone();
    let m = lab.m as f64;
    let bound = gamma / m.powi(2 * kappa as i32 + 2);
    let mut configs = 0u64;
    let mut bad = 0u64;
    let mut tight = Tightest::default();
    for s in subsets(shape.n(), t + 1) {
        for &y_ix in &lab.support() {
            let y = shape.point_of(y_ix);
            for &i in &s {
                let fiber_stars: Vec<usize> = s.iter().copied().filter(|&v| v != i).collect();
                let mut premise = true;
                for a in 0..shape.side(i) {
                    let mut ya = y.clone();
                    ya[i] = a;
                    match lab.restricted(&ya, &fiber_stars) {
                        Ok(d) => {
                            if d.bias_vector().norm_sq() >= bound {
                                premise = false;
                                break;
                            }
                        }
                        Err(Error::ZeroMassSubcube) => {}
                        Err(e) => return Err(e),
                    }
                }
                if !premise {
                    continue;
                }
                configs += 1;
                let full = lab.restricted(&y, &s)?.bias_vector();
                let others: Vec<usize> = (0..s.len()).filter(|&k| s[k] != i).collect();
                let lhs = full.norm_sq_on(&others);
                tight.offer(lhs, bound);
                if lhs >= bound {
                    bad += 1;
                }
            }
        }
    }
    Ok(VerificationReport::enumeration(
        "contributing_fiber_bound",
        format!("shape={shape} t={t} kappa={kappa} gamma={gamma}"),
        configs,
        bad,
        tight.best,
        0.0,
    ))
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
    fn subsets_count() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn single_character_subpart() {
        let s = shape(&[3, 2]);
        let f = ComplexField::character(s, &[1, 0]).unwrap();
        for gamma in [0.0, 0.5, 1.0] {
            let r = check_lemma_pisier_subpart(&f, &f, 0.4, gamma).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-12);
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn constant_g_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = shape(&[3, 2]);
        let f = ComplexField::random_mean_zero(s.clone(), &mut rng).unwrap();
        let g = ComplexField::constant(s, Complex64::new(1.0, 0.0)).unwrap();
        let r = check_lemma_pisier_subpart(&f, &g, 0.7, 1.0).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12 && r.holds);
    }

    #[test]
    fn rejects_nonzero_mean_and_bad_t() {
        let s = shape(&[2, 2]);
        let f = ComplexField::constant(s, Complex64::new(1.0, 0.0)).unwrap();
        assert!(check_lemma_pisier_subpart(&f, &f, 0.5, 1.0).is_err());
        let z = f.centered();
        assert!(check_lemma_pisier_subpart(&z, &f, 1.0, 1.0).is_err());
        assert!(pisier_rhs(&f, 1.0).is_err());
    }

    #[test]
    fn single_edge_robust_rhs_closed_form() {
        let s = shape(&[2]);
        let f = ComplexField::from_real(s.clone(), &[1.0, -1.0]).unwrap();
        for masses in [[0.9, 0.1], [0.1, 0.9]] {
            let l = Distribution::dense(s.clone(), masses.to_vec()).unwrap();
            let e = build_orientation(&l).unwrap();
            for sexp in [1.0, 2.0, 3.0] {
                let v = robust_pisier_rhs(&f, sexp, &e).unwrap();
                let expect = 2f64.powf((sexp - 1.0) / sexp);
                assert!((v - expect).abs() < 1e-12, "s={sexp}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn zero_function_rhs_is_zero() {
        let s = shape(&[3, 2]);
        let f = ComplexField::constant(s.clone(), Complex64::new(0.0, 0.0)).unwrap();
        let l = Distribution::uniform_dense(s).unwrap();
        let e = build_orientation(&l).unwrap();
        assert_eq!(robust_pisier_rhs(&f, 1.0, &e).unwrap(), 0.0);
        assert_eq!(pisier_rhs(&f, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn plain_rhs_single_character_closed_form() {
        let s = shape(&[3, 2]);
        let f = ComplexField::character(s, &[2, 0]).unwrap();
        for sexp in [1.0, 2.0] {
            let v = pisier_rhs(&f, sexp).unwrap();
            // |value| = m-1 when x_1 = y_1, else 1
            let expect = ((2f64.powf(sexp) + 2.0) / 3.0).powf(1.0 / sexp);
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn orientation_identity_single_edge() {
        let s = shape(&[2]);
        let f = ComplexField::from_real(s.clone(), &[1.0, -1.0]).unwrap();
        let g = ComplexField::from_real(s.clone(), &[0.3, 2.0]).unwrap();
        let l = Distribution::dense(s, vec![0.8, 0.2]).unwrap();
        let e = build_orientation(&l).unwrap();
        let r = check_orientation_identity(&f, &g, 0.6, 0.0, &e).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn uniform_bernstein_chain_is_zero() {
        let l = Distribution::uniform_dense(shape(&[2, 2])).unwrap();
        let r = check_bernstein_chain(&l).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn lemmas_vacuous_on_uniform() {
        let p = Distribution::uniform_dense(shape(&[2, 2, 2])).unwrap();
        let r = check_lemma_3_7(&p, 1).unwrap();
        assert!(r.holds && r.configurations > 0);
        let r = check_claim_3_10(&p, 1).unwrap();
        assert!(r.holds && r.vacuous);
        let r = check_lemma_3_12(&p, 1, 1, 1.0).unwrap();
        assert!(r.holds && r.configurations > 0);
        assert!(check_lemma_3_7(&p, 0).is_err());
        assert!(check_lemma_3_7(&p, 3).is_err());
    }
}
