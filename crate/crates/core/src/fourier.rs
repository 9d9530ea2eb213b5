//! Fourier analysis over `Z_M`.
//!
//! Coefficients use the normalization
//! `f_hat(u) = (prod 1/m_i) sum_x f(x) prod omega_i^{-u_i x_i}` with
//! `omega_i = exp(2 pi i / m_i)`, so `f(x) = sum_u f_hat(u) prod omega_i^{u_i x_i}`.
//! The transform is applied one axis at a time; [`dft_naive`] is the full
//! `O(N^2)` sum kept as a reference.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::tensor;

/// Largest grid accepted by the transforms.
pub const FOURIER_CAP: usize = 100_000;

/// `exp(2 pi i k / m)`.
pub fn root(m: usize, k: i64) -> Complex64 {
    let r = k.rem_euclid(m as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / m as f64)
}

/// `#u`, the number of non-zero entries.
pub fn support_size(u: &[usize]) -> usize {
    u.iter().filter(|&&v| v != 0).count()
}

/// A complex-valued function on `Z_M`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    shape: GridShape,
    values: Vec<Complex64>,
}

/// Coefficients `f_hat(u)`, stored row-major in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    shape: GridShape,
    coeffs: Vec<Complex64>,
}

fn check_size(shape: &GridShape) -> Result<usize> {
    shape.size_capped("fourier table", FOURIER_CAP)
}

impl ComplexField {
    pub fn new(shape: GridShape, values: Vec<Complex64>) -> Result<Self> {
        let size = check_size(&shape)?;
        if values.len() != size {
            return Err(Error::InvalidArgument(format!(
                "{} values for {size} points",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite field value".into()));
        }
        Ok(Self { shape, values })
    }

    pub fn from_real(shape: GridShape, values: &[f64]) -> Result<Self> {
        Self::new(shape, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(shape: GridShape, f: impl Fn(&[usize]) -> Complex64) -> Result<Self> {
        check_size(&shape)?;
        let values = shape.points().map(|x| f(&x)).collect();
        Self::new(shape, values)
    }

    pub fn constant(shape: GridShape, c: Complex64) -> Result<Self> {
        let size = check_size(&shape)?;
        Self::new(shape, vec![c; size])
    }

    /// The character `x -> prod omega_i^{u_i x_i}`.
    pub fn character(shape: GridShape, u: &[usize]) -> Result<Self> {
        shape.check_point(u)?;
        let dims = shape.dims().to_vec();
        Self::from_fn(shape, |x| {
            x.iter()
                .zip(u)
                .zip(&dims)
                .map(|((&xi, &ui), &m)| root(m, (ui * xi) as i64))
                .product()
        })
    }

    /// Independent standard complex Gaussian values.
    pub fn random<R: Rng + ?Sized>(shape: GridShape, rng: &mut R) -> Result<Self> {
        let size = check_size(&shape)?;
        let values = (0..size)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::new(shape, values)
    }

    /// Random field with its mean removed.
    pub fn random_mean_zero<R: Rng + ?Sized>(shape: GridShape, rng: &mut R) -> Result<Self> {
        Ok(Self::random(shape, rng)?.centered())
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: &[usize]) -> Complex64 {
        self.values[self.shape.index_of(x)]
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn centered(&self) -> Self {
        let mu = self.mean();
        self.map(|v| v - mu)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        Self {
            shape: self.shape.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest pointwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl FourierCoefficients {
    pub fn new(shape: GridShape, coeffs: Vec<Complex64>) -> Result<Self> {
        let size = check_size(&shape)?;
        if coeffs.len() != size {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {size} frequencies",
                coeffs.len()
            )));
        }
        Ok(Self { shape, coeffs })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn at(&self, u: &[usize]) -> Complex64 {
        self.coeffs[self.shape.index_of(u)]
    }

    /// `sum_u |f_hat(u)|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Multiplies every coefficient by `mult(u)`.
    pub fn multiply(&self, mult: impl Fn(&[usize]) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(ix, &c)| c * mult(&self.shape.point_of(ix)))
            .collect();
        Self {
            shape: self.shape.clone(),
            coeffs,
        }
    }

    /// CSV rows `u, |f_hat(u)|` for debugging.
    pub fn magnitudes_csv(&self) -> String {
        let mut out = String::from("u,magnitude\n");
        for (ix, c) in self.coeffs.iter().enumerate() {
            let u = self.shape.point_of(ix);
            let label: Vec<String> = u.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{},{:.12e}", label.join(" "), c.norm());
        }
        out
    }
}

fn axis_kernel(m: usize, sign: i64, scale: f64) -> Vec<Complex64> {
    let mut ker = Vec::with_capacity(m * m);
    for u in 0..m {
        for x in 0..m {
            ker.push(root(m, sign * (u * x) as i64) * scale);
        }
    }
    ker
}

/// Forward transform.
pub fn dft(f: &ComplexField) -> FourierCoefficients {
    let dims = f.shape.dims();
    let mut data = f.values.clone();
    for (axis, &m) in dims.iter().enumerate() {
        data = tensor::contract_axis(&data, dims, axis, &axis_kernel(m, -1, 1.0 / m as f64), m);
    }
    FourierCoefficients {
        shape: f.shape.clone(),
        coeffs: data,
    }
}

/// Inverse transform.
pub fn idft(c: &FourierCoefficients) -> ComplexField {
    let dims = c.shape.dims();
    let mut data = c.coeffs.clone();
    for (axis, &m) in dims.iter().enumerate() {
        data = tensor::contract_axis(&data, dims, axis, &axis_kernel(m, 1, 1.0), m);
    }
    ComplexField {
        shape: c.shape.clone(),
        values: data,
    }
}

/// Forward transform by the full double sum over `(u, x)`.
pub fn dft_naive(f: &ComplexField) -> FourierCoefficients {
    let shape = &f.shape;
    let dims = shape.dims();
    let n_pts = f.values.len();
    let norm: f64 = dims.iter().map(|&m| 1.0 / m as f64).product();
    let points: Vec<Vec<usize>> = shape.points().collect();
    let coeffs = points
        .iter()
        .map(|u| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ix, x) in points.iter().enumerate().take(n_pts) {
                let phase: Complex64 = (0..dims.len())
                    .map(|i| root(dims[i], -((u[i] * x[i]) as i64)))
                    .product();
                acc += f.values[ix] * phase;
            }
            acc * norm
        })
        .collect();
    FourierCoefficients {
        shape: shape.clone(),
        coeffs,
    }
}

fn apply_spectral(f: &ComplexField, mult: impl Fn(&[usize]) -> Complex64) -> ComplexField {
    idft(&dft(f).multiply(mult))
}

/// `L_i f(x) = f(x) - E_a f(x^{(i)->a})`.
pub fn laplacian(f: &ComplexField, i: usize) -> Result<ComplexField> {
    let shape = &f.shape;
    if i >= shape.n() {
        return Err(Error::OutOfRange(format!("coordinate {i}")));
    }
    let m = shape.side(i);
    let stride = shape.strides()[i];
    let mut x = vec![0; shape.n()];
    let values = (0..f.values.len())
        .map(|ix| {
            shape.point_into(ix, &mut x);
            let base = ix - x[i] * stride;
            let avg: Complex64 = (0..m).map(|a| f.values[base + a * stride]).sum::<Complex64>() / m as f64;
            f.values[ix] - avg
        })
        .collect();
    Ok(ComplexField {
        shape: shape.clone(),
        values,
    })
}

/// `L_i f` as the sum of the coefficients with `u_i != 0`.
pub fn laplacian_spectral(f: &ComplexField, i: usize) -> Result<ComplexField> {
    if i >= f.shape.n() {
        return Err(Error::OutOfRange(format!("coordinate {i}")));
    }
    Ok(apply_spectral(f, |u| {
        Complex64::new(if u[i] != 0 { 1.0 } else { 0.0 }, 0.0)
    }))
}

/// `L_i^a f(x) = (f(x) - f(x^{(i)->a})) / m_i`.
pub fn partial_laplacian(f: &ComplexField, i: usize, a: usize) -> Result<ComplexField> {
    let shape = &f.shape;
    if i >= shape.n() || a >= shape.side(i) {
        return Err(Error::OutOfRange(format!("coordinate {i}, symbol {a}")));
    }
    let m = shape.side(i) as f64;
    let stride = shape.strides()[i];
    let mut x = vec![0; shape.n()];
    let values = (0..f.values.len())
        .map(|ix| {
            shape.point_into(ix, &mut x);
            let other = ix - x[i] * stride + a * stride;
            (f.values[ix] - f.values[other]) / m
        })
        .collect();
    Ok(ComplexField {
        shape: shape.clone(),
        values,
    })
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} outside [0,1]")))
    }
}

/// `T_rho f` via the multiplier `rho^{#u}`.
pub fn noise_operator(f: &ComplexField, rho: f64) -> Result<ComplexField> {
    check_unit("rho", rho)?;
    Ok(apply_spectral(f, |u| {
        Complex64::new(rho.powi(support_size(u) as i32), 0.0)
    }))
}

/// `T_rho f(x) = E_{y ~ N_rho(x)} f(y)`, summing over every `y`.
pub fn noise_operator_definitional(f: &ComplexField, rho: f64) -> Result<ComplexField> {
    check_unit("rho", rho)?;
    let shape = &f.shape;
    let dims = shape.dims();
    let points: Vec<Vec<usize>> = shape.points().collect();
    let values = points
        .iter()
        .map(|x| {
            points
                .iter()
                .zip(&f.values)
                .map(|(y, &fy)| {
                    let w: f64 = (0..dims.len())
                        .map(|i| {
                            let keep = if x[i] == y[i] { rho } else { 0.0 };
                            keep + (1.0 - rho) / dims[i] as f64
                        })
                        .product();
                    fy * w
                })
                .sum()
        })
        .collect();
    Ok(ComplexField {
        shape: shape.clone(),
        values,
    })
}

/// `g_{t,1-t}(x, y)` as an explicit average over the `2^n` choices of `z`.
pub fn two_point_smooth(g: &ComplexField, t: f64, x: &[usize], y: &[usize]) -> Result<Complex64> {
    check_unit("t", t)?;
    g.shape.check_point(x)?;
    g.shape.check_point(y)?;
    let n = g.shape.n();
    if n > 30 {
        return Err(Error::Capacity {
            what: "two-point mixture",
            needed: 1u128 << n.min(127),
            cap: 1 << 30,
        });
    }
    let mut z = vec![0; n];
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u64..(1u64 << n) {
        let mut w = 1.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                z[i] = x[i];
                w *= t;
            } else {
                z[i] = y[i];
                w *= 1.0 - t;
            }
        }
        if w != 0.0 {
            acc += g.at(&z) * w;
        }
    }
    Ok(acc)
}

/// `g_{t,1-t}(x, y) = sum_u g_hat(u) prod (t omega^{u_i x_i} + (1-t) omega^{u_i y_i})`.
pub fn two_point_smooth_spectral(ghat: &FourierCoefficients, t: f64, x: &[usize], y: &[usize]) -> Result<Complex64> {
    check_unit("t", t)?;
    let shape = &ghat.shape;
    shape.check_point(x)?;
    shape.check_point(y)?;
    let dims = shape.dims();
    let mut u = vec![0; shape.n()];
    let mut acc = Complex64::new(0.0, 0.0);
    for (ix, &c) in ghat.coeffs.iter().enumerate() {
        shape.point_into(ix, &mut u);
        let prod: Complex64 = (0..dims.len())
            .map(|i| root(dims[i], (u[i] * x[i]) as i64) * t + root(dims[i], (u[i] * y[i]) as i64) * (1.0 - t))
            .product();
        acc += c * prod;
    }
    Ok(acc)
}

/// All values `g_{t,1-t}(x, y)`, indexed by [`SmoothTable::get`].
pub struct SmoothTable {
    shape: GridShape,
    values: Vec<Complex64>,
}

impl SmoothTable {
    /// Built axis by axis: each coordinate `z_i` is replaced by the pair `(x_i, y_i)`.
    pub fn new(g: &ComplexField, t: f64) -> Result<Self> {
        check_unit("t", t)?;
        let shape = g.shape.clone();
        let mut dims = shape.dims().to_vec();
        let mut data = g.values.clone();
        for axis in 0..dims.len() {
            let m = shape.side(axis);
            let mut ker = vec![0.0; m * m * m];
            for xi in 0..m {
                for yi in 0..m {
                    let row = (xi * m + yi) * m;
                    ker[row + xi] += t;
                    ker[row + yi] += 1.0 - t;
                }
            }
            data = tensor::contract_axis(&data, &dims, axis, &ker, m * m);
            dims[axis] = m * m;
        }
        Ok(Self { shape, values: data })
    }

    pub fn get(&self, x: &[usize], y: &[usize]) -> Complex64 {
        let ix = x
            .iter()
            .zip(y)
            .zip(self.shape.dims())
            .fold(0, |acc, ((&xi, &yi), &m)| acc * m * m + xi * m + yi);
        self.values[ix]
    }

    /// Value at row-major point indices.
    pub fn get_index(&self, x_ix: usize, y_ix: usize) -> Complex64 {
        let x = self.shape.point_of(x_ix);
        let y = self.shape.point_of(y_ix);
        self.get(&x, &y)
    }
}

/// `Delta^gamma f`: multiplier `(#u)^gamma`, with `u = 0` sent to 0.
pub fn delta_gamma(f: &ComplexField, gamma: f64) -> Result<ComplexField> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} is negative")));
    }
    Ok(apply_spectral(f, |u| {
        let w = support_size(u);
        Complex64::new(if w == 0 { 0.0 } else { (w as f64).powf(gamma) }, 0.0)
    }))
}

/// `(E_x |f(x)|^s)^{1/s}` under the uniform measure.
pub fn lp_norm(f: &ComplexField, s: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} below 1")));
    }
    let mean = f.values.iter().map(|v| v.norm().powf(s)).sum::<f64>() / f.values.len() as f64;
    Ok(mean.powf(1.0 / s))
}
