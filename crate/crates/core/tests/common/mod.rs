//! Brute-force helpers shared by the integration tests. These deliberately
//! avoid the library's own indexing and summation code paths.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All points of the grid in lexicographic order (last coordinate fastest).
pub fn points(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &m in dims {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn index(dims: &[usize], x: &[usize]) -> usize {
    x.iter().zip(dims).fold(0, |acc, (&xi, &m)| acc * m + xi)
}

pub fn dirichlet<R: Rng + ?Sized>(size: usize, alpha: f64, rng: &mut R) -> Vec<f64> {
    let g = Gamma::new(alpha, 1.0).unwrap();
    let w: Vec<f64> = (0..size).map(|_| g.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Weights in `[lo, hi]`, normalized.
pub fn bounded<R: Rng + ?Sized>(size: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..size).map(|_| rng.random_range(lo..=hi)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn marginal(dims: &[usize], table: &[f64], i: usize) -> Vec<f64> {
    let mut q = vec![0.0; dims[i]];
    for x in points(dims) {
        q[x[i]] += table[index(dims, &x)];
    }
    q
}

pub fn tv(table: &[f64]) -> f64 {
    let u = 1.0 / table.len() as f64;
    table.iter().map(|p| (p - u).abs()).sum::<f64>() / 2.0
}

pub fn bias(q: &[f64], c: usize, d: usize) -> f64 {
    if c == d || q[c] + q[d] == 0.0 {
        0.0
    } else {
        (q[c] - q[d]) / (q[c] + q[d])
    }
}

pub fn bias_norm_sq(dims: &[usize], table: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..dims.len() {
        let q = marginal(dims, table, i);
        for c in 0..dims[i] {
            for d in 0..dims[i] {
                s += bias(&q, c, d).powi(2);
            }
        }
    }
    s
}

/// Chi-square statistic of observed counts against expected probabilities;
/// cells with zero expectation must have zero counts.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> (f64, usize) {
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(o, 0, "sample landed on a zero-probability cell");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

/// 99% chi-square critical value (Wilson-Hilferty).
pub fn chi_square_99(df: usize) -> f64 {
    let k = df as f64;
    let z = 2.326_347_874;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

use num_complex::Complex64;

pub fn omega(m: usize, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64)
}

pub fn chi(dims: &[usize], u: &[usize], x: &[usize]) -> Complex64 {
    dims.iter()
        .zip(u.iter().zip(x))
        .map(|(&m, (&ui, &xi))| omega(m, (ui * xi) as i64))
        .product()
}

/// Double-sum transform, indexed like the library (lexicographic `u`).
pub fn dft_oracle(dims: &[usize], f: &[Complex64]) -> Vec<Complex64> {
    let pts = points(dims);
    let n = pts.len() as f64;
    pts.iter()
        .map(|u| {
            pts.iter()
                .map(|x| f[index(dims, x)] * chi(dims, u, x).conj())
                .sum::<Complex64>()
                / n
        })
        .collect()
}

pub fn weight(u: &[usize]) -> usize {
    u.iter().filter(|&&v| v != 0).count()
}

/// Synthesis `sum_u c(u) chi_u`.
pub fn synth(dims: &[usize], c: &[Complex64]) -> Vec<Complex64> {
    let pts = points(dims);
    pts.iter()
        .map(|x| pts.iter().map(|u| c[index(dims, u)] * chi(dims, u, x)).sum())
        .collect()
}

/// `Delta^gamma` through the oracle transform; the zero frequency maps to 0.
pub fn delta_gamma_oracle(dims: &[usize], f: &[Complex64], gamma: f64) -> Vec<Complex64> {
    let fh = dft_oracle(dims, f);
    let c: Vec<Complex64> = points(dims)
        .iter()
        .map(|u| {
            let w = weight(u);
            if w == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                fh[index(dims, u)] * (w as f64).powf(gamma)
            }
        })
        .collect();
    synth(dims, &c)
}

/// `L_i f(x) = f(x) - mean_a f(x^{(i)->a})`.
pub fn laplacian_oracle(dims: &[usize], f: &[Complex64], i: usize) -> Vec<Complex64> {
    points(dims)
        .iter()
        .map(|x| {
            let mut avg = Complex64::new(0.0, 0.0);
            for a in 0..dims[i] {
                let mut y = x.clone();
                y[i] = a;
                avg += f[index(dims, &y)];
            }
            f[index(dims, x)] - avg / dims[i] as f64
        })
        .collect()
}

/// `E_{z ~ N_{t,1-t}(x,y)} g(z)` by enumerating which coordinates follow `x`.
pub fn smooth_oracle(dims: &[usize], g: &[Complex64], t: f64, x: &[usize], y: &[usize]) -> Complex64 {
    let n = dims.len();
    let mut s = Complex64::new(0.0, 0.0);
    for mask in 0..(1u32 << n) {
        let mut z = y.to_vec();
        let mut w = 1.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                z[i] = x[i];
                w *= t;
            } else {
                w *= 1.0 - t;
            }
        }
        s += g[index(dims, &z)] * w;
    }
    s
}

pub fn random_field<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<Complex64> {
    (0..size)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn centered(f: Vec<Complex64>) -> Vec<Complex64> {
    let mean = f.iter().sum::<Complex64>() / f.len() as f64;
    f.into_iter().map(|v| v - mean).collect()
}
