//! Verification suites over seeded instance corpora.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::Generator;
use super::mix_seed;
use crate::distribution::Distribution;
use crate::edges::{build_orientation, check_lemma_3_4, check_lemma_3_5, OrientedEdgeSet, Subgraph};
use crate::error::{Error, Result};
use crate::fourier::{
    dft, dft_naive, idft, laplacian, laplacian_spectral, lp_norm, noise_operator, noise_operator_definitional,
    two_point_smooth, two_point_smooth_spectral, ComplexField, SmoothTable,
};
use crate::grid::GridShape;
use crate::pisier::{
    check_bernstein_chain, check_claim_3_10, check_lemma_3_12, check_lemma_3_7, check_lemma_pisier_subpart,
    check_orientation_identity, outdegree_case_witness, robust_pisier_rhs,
};
use crate::report::{merge, CheckKind, Tightest, VerificationReport};

pub const FOURIER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Inequalities,
    Lemmas,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "inequalities" => Ok(Suite::Inequalities),
            "lemmas" => Ok(Suite::Lemmas),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Instances per check (per shape where shapes are listed); each check
    /// has its own default.
    pub corpus_size: Option<usize>,
    /// Shapes with more cells are skipped.
    pub max_cells: usize,
    /// Corrupts every orientation in the lemma suite by reversing one uneven edge.
    pub fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            corpus_size: None,
            max_cells: 64,
            fault: false,
        }
    }
}

impl VerifyOptions {
    fn count(&self, default: usize) -> usize {
        self.corpus_size.unwrap_or(default)
    }

    fn shapes(&self, dims: &[&[usize]]) -> Vec<GridShape> {
        dims.iter()
            .map(|d| GridShape::new(d.to_vec()).expect("static shape"))
            .filter(|s| s.size().is_some_and(|c| c <= self.max_cells))
            .collect()
    }

    fn rng(&self, check: u64, instance: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix_seed(self.seed, check, instance))
    }
}

/// True iff every hard (non-monitored) report holds.
pub fn suite_passed(reports: &[VerificationReport]) -> bool {
    reports
        .iter()
        .filter(|r| r.kind != CheckKind::Monitored)
        .all(|r| r.holds)
}

pub fn run_verification(suite: Suite, opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        out.extend(fourier_identities(opts)?);
        out.push(pisier_subpart_suite(opts)?);
        out.push(orientation_identity_suite(opts)?);
    }
    if matches!(suite, Suite::Inequalities | Suite::All) {
        out.extend(restriction_tv_suite(opts)?);
        out.push(projection_bias_suite(opts)?);
        out.extend(robust_pisier_suite(opts)?.reports);
        out.extend(bernstein_suite(opts)?);
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        out.extend(lemma_suite(opts)?);
    }
    Ok(out)
}

fn diff_report(name: &str, instance: String, diffs: &[f64], tol: f64) -> VerificationReport {
    let parts: Vec<VerificationReport> = diffs
        .iter()
        .map(|&d| VerificationReport::identity(name, "", d, 0.0, tol))
        .collect();
    merge(name, instance, &parts)
}

fn random_point<R: Rng + ?Sized>(shape: &GridShape, rng: &mut R) -> Vec<usize> {
    shape.dims().iter().map(|&m| rng.random_range(0..m)).collect()
}

/// Round trip, Parseval, transform-vs-double-sum, and spectral-vs-definitional
/// forms of `L_i`, `T_rho` and `g_{t,1-t}`.
pub fn fourier_identities(opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    let count = opts.count(50);
    let mut out = Vec::new();
    for shape in opts.shapes(&[&[3, 2], &[2, 2, 2], &[3, 3], &[4, 3]]) {
        let mut d: [Vec<f64>; 6] = Default::default();
        for k in 0..count {
            let mut rng = opts.rng(1, k as u64 ^ (shape.size().unwrap_or(0) as u64) << 32);
            let f = ComplexField::random(shape.clone(), &mut rng)?;
            let fh = dft(&f);
            d[0].push(idft(&fh).max_abs_diff(&f));
            d[1].push((fh.energy() - lp_norm(&f, 2.0)?.powi(2)).abs());
            let naive = dft_naive(&f);
            d[2].push(
                fh.coeffs()
                    .iter()
                    .zip(naive.coeffs())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max),
            );
            let mut lap = 0.0f64;
            for i in 0..shape.n() {
                lap = lap.max(laplacian(&f, i)?.max_abs_diff(&laplacian_spectral(&f, i)?));
            }
            d[3].push(lap);
            let rho: f64 = rng.random();
            d[4].push(noise_operator(&f, rho)?.max_abs_diff(&noise_operator_definitional(&f, rho)?));
            let t: f64 = rng.random();
            let table = SmoothTable::new(&f, t)?;
            let mut smooth = 0.0f64;
            for _ in 0..4 {
                let x = random_point(&shape, &mut rng);
                let y = random_point(&shape, &mut rng);
                let direct = two_point_smooth(&f, t, &x, &y)?;
                smooth = smooth
                    .max((direct - two_point_smooth_spectral(&fh, t, &x, &y)?).norm())
                    .max((direct - table.get(&x, &y)).norm());
            }
            d[5].push(smooth);
        }
        let names = [
            "fourier_round_trip",
            "parseval",
            "transform_vs_double_sum",
            "laplacian_spectral_form",
            "noise_operator_spectral_form",
            "two_point_smooth_spectral_form",
        ];
        for (name, diffs) in names.iter().zip(&d) {
            out.push(diff_report(
                name,
                format!("shape={shape} instances={count}"),
                diffs,
                FOURIER_TOL,
            ));
        }
    }
    Ok(out)
}

const SMALL_SHAPES: &[&[usize]] = &[
    &[3, 2],
    &[2, 2, 2],
    &[3, 3],
    &[4, 3],
    &[2, 3, 2],
    &[3, 3, 2],
    &[2, 2, 2, 2],
    &[4, 4],
];

pub fn pisier_subpart_suite(opts: &VerifyOptions) -> Result<VerificationReport> {
    let shapes = opts.shapes(SMALL_SHAPES);
    let shapes: Vec<GridShape> = shapes.into_iter().filter(|s| s.size().unwrap_or(0) <= 36).collect();
    let count = opts.count(50);
    let mut parts = Vec::new();
    for k in 0..count {
        let mut rng = opts.rng(2, k as u64);
        let shape = shapes
            .choose(&mut rng)
            .ok_or_else(|| Error::Config("no shape within max_cells".into()))?;
        let f = ComplexField::random_mean_zero(shape.clone(), &mut rng)?;
        let g = ComplexField::random(shape.clone(), &mut rng)?;
        let t = rng.random_range(0.05..0.95);
        let gamma = rng.random_range(0.0..3.0);
        parts.push(check_lemma_pisier_subpart(&f, &g, t, gamma)?);
    }
    Ok(merge("pisier_subpart", format!("instances={count}"), &parts))
}

/// A Dirichlet mass function for orientations.
fn random_masses<R: Rng + ?Sized>(shape: &GridShape, rng: &mut R) -> Result<Distribution> {
    let alpha = *[0.3, 1.0, 3.0].choose(rng).expect("nonempty");
    Generator::Dirichlet { alpha }.generate(shape, rng)
}

pub fn orientation_identity_suite(opts: &VerifyOptions) -> Result<VerificationReport> {
    let shapes = opts.shapes(SMALL_SHAPES);
    let count = opts.count(50);
    let mut parts = Vec::new();
    for k in 0..count {
        let mut rng = opts.rng(3, k as u64);
        let shape = shapes
            .choose(&mut rng)
            .ok_or_else(|| Error::Config("no shape within max_cells".into()))?;
        let l = random_masses(shape, &mut rng)?;
        let mut e = build_orientation(&l)?;
        if k % 2 == 1 {
            e = e.randomized(&mut rng);
        }
        let f = ComplexField::random_mean_zero(shape.clone(), &mut rng)?;
        let g = ComplexField::random(shape.clone(), &mut rng)?;
        let t = rng.random_range(0.05..0.95);
        let gamma = rng.random_range(0.0..3.0);
        parts.push(check_orientation_identity(&f, &g, t, gamma, &e)?);
    }
    Ok(merge("orientation_grouping", format!("instances={count}"), &parts))
}

pub fn restriction_tv_suite(opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    let shapes = opts.shapes(&[&[2, 2, 2], &[3, 3], &[2, 3, 2], &[3, 2, 2, 2], &[4, 3]]);
    let count = opts.count(50);
    let mut out = Vec::new();
    for sigma in [0.25, 0.5, 0.75] {
        let mut parts = Vec::new();
        for k in 0..count {
            let mut rng = opts.rng(4, k as u64);
            let shape = shapes
                .choose(&mut rng)
                .ok_or_else(|| Error::Config("no shape within max_cells".into()))?;
            let p = random_masses(shape, &mut rng)?;
            parts.push(p.verify_lemma_1_4(sigma)?);
        }
        out.push(merge(
            "restriction_tv_bound",
            format!("sigma={sigma} instances={count}"),
            &parts,
        ));
    }
    Ok(out)
}

/// Instances are drawn until `count` of them satisfy the marginal band.
pub fn projection_bias_suite(opts: &VerifyOptions) -> Result<VerificationReport> {
    let shapes = opts.shapes(&[&[3, 3], &[2, 2, 2], &[3, 3, 3], &[4, 3], &[2, 3, 2]]);
    let count = opts.count(30);
    let mut parts = Vec::new();
    let mut k = 0u64;
    while parts.len() < count {
        if k > 100 * count as u64 + 100 {
            return Err(Error::Config("too few instances inside the marginal band".into()));
        }
        let mut rng = opts.rng(5, k);
        k += 1;
        let shape = shapes
            .choose(&mut rng)
            .ok_or_else(|| Error::Config("no shape within max_cells".into()))?;
        let p = if k.is_multiple_of(2) {
            Generator::PerturbedUniform {
                amplitude: rng.random_range(0.2..1.0),
            }
            .generate(shape, &mut rng)?
        } else {
            let marginals = shape
                .dims()
                .iter()
                .map(|&m| {
                    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.3..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / s).collect()
                })
                .collect();
            Distribution::product(shape.clone(), marginals)?
        };
        if !p.in_coarse_band() {
            continue;
        }
        parts.push(p.check_projection_bias_bound()?);
    }
    Ok(merge("projection_bias_bound", format!("instances={count}"), &parts))
}

const PISIER_SHAPES: &[&[usize]] = &[
    &[3, 3],
    &[4, 4],
    &[6, 8],
    &[2, 3, 2],
    &[3, 3, 3],
    &[2, 2, 2, 2],
    &[2, 2, 3, 2],
    &[2, 2, 2, 2, 2],
    &[2, 2, 2, 2, 3],
];

/// `||f||_1 / (ln(n+2) * RHS)` for `f = N l - 1` under the adversarial
/// orientation of `l` and `randomized` copies of it.
fn robust_ratios(opts: &VerifyOptions, check: u64, count: usize, randomized: usize) -> Result<Vec<(usize, f64)>> {
    let shapes: Vec<GridShape> = opts
        .shapes(PISIER_SHAPES)
        .into_iter()
        .filter(|s| s.size().unwrap_or(0) <= 48)
        .collect();
    let mut out = Vec::new();
    for k in 0..count {
        let mut rng = opts.rng(check, k as u64);
        let shape = shapes
            .choose(&mut rng)
            .ok_or_else(|| Error::Config("no shape within max_cells".into()))?;
        let l = random_masses(shape, &mut rng)?;
        let size = shape.size().expect("capped") as f64;
        let vals: Vec<f64> = l.to_dense_table()?.iter().map(|&v| size * v - 1.0).collect();
        let f = ComplexField::from_real(shape.clone(), &vals)?.centered();
        let lhs = lp_norm(&f, 1.0)?;
        let base = build_orientation(&l)?;
        let log = ((shape.n() + 2) as f64).ln();
        let mut orientations = vec![base.clone()];
        for _ in 0..randomized {
            orientations.push(base.randomized(&mut rng));
        }
        for e in &orientations {
            let rhs = robust_pisier_rhs(&f, 1.0, e)?;
            let ratio = if rhs > 0.0 {
                lhs / (log * rhs)
            } else if lhs > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            out.push((shape.n(), ratio));
        }
    }
    Ok(out)
}

pub struct RobustPisierOutcome {
    pub c_emp: f64,
    pub reports: Vec<VerificationReport>,
}

/// Freezes `C_emp = 2 * max ratio` on a calibration corpus, then checks
/// `||f||_1 <= C_emp ln(n+2) RHS` on a disjoint corpus and reports the
/// per-dimension trend.
pub fn robust_pisier_suite(opts: &VerifyOptions) -> Result<RobustPisierOutcome> {
    let count = opts.count(100);
    let calib = robust_ratios(opts, 6, count, 10)?;
    let c_emp = 2.0 * calib.iter().map(|r| r.1).fold(0.0, f64::max);
    let eval = robust_ratios(opts, 7, count, 10)?;
    let mut tight = Tightest::default();
    let mut bad = 0;
    for &(_, r) in &eval {
        tight.offer(r, c_emp);
        bad += u64::from(!(r <= c_emp));
    }
    let mut reports = vec![VerificationReport::enumeration(
        "robust_pisier_calibrated",
        format!("instances={count} c_emp={c_emp:.6}"),
        eval.len() as u64,
        bad,
        tight.best,
        0.0,
    )];
    for n in 2..=5 {
        let rs: Vec<f64> = eval.iter().filter(|r| r.0 == n).map(|r| r.1).collect();
        if rs.is_empty() {
            continue;
        }
        let mean = rs.iter().sum::<f64>() / rs.len() as f64;
        let max = rs.iter().copied().fold(0.0, f64::max);
        reports.push(VerificationReport::monitored(
            "robust_pisier_trend",
            format!("n={n} configurations={} mean={mean:.6}", rs.len()),
            max,
            c_emp,
        ));
    }
    Ok(RobustPisierOutcome { c_emp, reports })
}

/// Monitored ratios for the Bernstein chain and the outdegree dichotomy.
pub fn bernstein_suite(opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    let shapes = opts.shapes(PISIER_SHAPES);
    let count = opts.count(30);
    let mut chain = Vec::new();
    let mut witness = Vec::new();
    for k in 0..count {
        let mut rng = opts.rng(8, k as u64);
        let shape = shapes
            .choose(&mut rng)
            .ok_or_else(|| Error::Config("no shape within max_cells".into()))?;
        let l = random_masses(shape, &mut rng)?;
        chain.push(check_bernstein_chain(&l)?);
        witness.push(outdegree_case_witness(&l)?);
    }
    Ok(vec![
        merge("bernstein_chain", format!("instances={count}"), &chain),
        merge("outdegree_case_witness", format!("instances={count}"), &witness),
    ])
}

/// Probes the in-degree bound of the degeneracy orientation with random
/// `(U, v)`, `g` the largest scale-`kappa` outdegree in `U`.
pub fn degeneracy_probes<R: Rng + ?Sized>(e: &OrientedEdgeSet, probes: usize, rng: &mut R) -> VerificationReport {
    let scales = e.scales();
    let n_vertices = e.num_vertices();
    let shape = e.shape().clone();
    let mut configs = 0;
    let mut bad = 0;
    let mut tight = Tightest::default();
    for _ in 0..probes {
        let Some(&kappa) = scales.choose(rng) else { break };
        let sub = Subgraph::Scale(kappa);
        let v = rng.random_range(0..n_vertices);
        let mut u_set = Vec::new();
        for i in 0..shape.n() {
            for b in 0..shape.side(i) {
                if b == e.symbol(v, i) {
                    continue;
                }
                let w = e.neighbor(v, i, b);
                let in_scale = e.directed(v, i, b) == Some(sub) || e.directed(w, i, e.symbol(v, i)) == Some(sub);
                if in_scale && rng.random_bool(0.5) {
                    u_set.push(w);
                }
            }
        }
        for w in 0..n_vertices {
            if w != v && !u_set.contains(&w) && rng.random_bool(0.1) {
                u_set.push(w);
            }
        }
        let g = u_set.iter().map(|&u| e.outdegree(u, sub)).max().unwrap_or(0).max(1);
        if let Some((count, ok)) = check_lemma_3_4(e, kappa, &u_set, v, g) {
            configs += 1;
            tight.offer(count as f64, g as f64);
            bad += u64::from(!ok);
        }
    }
    VerificationReport::enumeration(
        "degeneracy_in_degree",
        format!("shape={shape}"),
        configs,
        bad,
        tight.best,
        0.0,
    )
}

pub fn lemma_suite(opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    let count = opts.count(20);
    let mut out = Vec::new();
    for shape in opts.shapes(&[&[2, 2, 2], &[3, 3], &[2, 3, 2]]) {
        let mut rules = Vec::new();
        let mut point = Vec::new();
        let mut degeneracy = Vec::new();
        let mut edge_bias = Vec::new();
        let mut paired = Vec::new();
        let mut fiber = Vec::new();
        for k in 0..count {
            let mut rng = opts.rng(9, k as u64 ^ (shape.size().unwrap_or(0) as u64) << 32);
            let alpha = [0.3, 1.0, 3.0][k % 3];
            let p = Generator::Dirichlet { alpha }.generate(&shape, &mut rng)?;
            let mut e = build_orientation(&p)?;
            if opts.fault {
                e.flip_one_uneven_edge();
            }
            let violations = e.rule_violations();
            rules.push(VerificationReport::identity(
                "orientation_rules",
                "",
                violations.len() as f64,
                0.0,
                0.0,
            ));
            point.push(check_lemma_3_5(&e));
            degeneracy.push(degeneracy_probes(&e, 100, &mut rng));
            for t in [1, 2] {
                if t + 1 > shape.n() {
                    continue;
                }
                edge_bias.push(check_lemma_3_7(&p, t)?);
                paired.push(check_claim_3_10(&p, t)?);
                for kappa in [1, 2] {
                    for gamma in [1.0, 2.0] {
                        fiber.push(check_lemma_3_12(&p, t, kappa, gamma)?);
                    }
                }
            }
        }
        let inst = format!("shape={shape} instances={count}");
        out.push(merge("orientation_rules", inst.clone(), &rules));
        out.push(merge("outdegree_point_bound", inst.clone(), &point));
        out.push(merge("degeneracy_in_degree", inst.clone(), &degeneracy));
        out.push(merge("edge_bias_lower_bound", inst.clone(), &edge_bias));
        out.push(merge("paired_uneven_bias", inst.clone(), &paired));
        out.push(merge("contributing_fiber_bound", inst, &fiber));
    }
    Ok(out)
}
