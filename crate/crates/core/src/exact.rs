//! Exact-rational dense distributions for small identity checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grid::GridShape;

/// Largest table accepted in exact mode.
pub const EXACT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactDense {
    shape: GridShape,
    probs: Vec<BigRational>,
}

impl ExactDense {
    pub fn new(shape: GridShape, probs: Vec<BigRational>) -> Result<Self> {
        let size = shape.size_capped("exact table", EXACT_CAP)?;
        if probs.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "table has {} entries, expected {size}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution("negative mass".into()));
        }
        let total: BigRational = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("total mass {total} is not 1")));
        }
        Ok(Self { shape, probs })
    }

    /// Normalizes integer weights into an exact distribution.
    pub fn from_weights(shape: GridShape, weights: &[u64]) -> Result<Self> {
        let total: u128 = weights.iter().map(|&w| w as u128).sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        let den = BigInt::from(total);
        let probs = weights
            .iter()
            .map(|&w| BigRational::new(BigInt::from(w), den.clone()))
            .collect();
        Self::new(shape, probs)
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn marginal(&self, i: usize) -> Vec<BigRational> {
        let m = self.shape.side(i);
        let mut out = vec![BigRational::zero(); m];
        for (ix, p) in self.probs.iter().enumerate() {
            out[self.shape.point_of(ix)[i]] += p;
        }
        out
    }

    pub fn tv_to_uniform(&self) -> BigRational {
        let u = BigRational::new(BigInt::one(), BigInt::from(self.probs.len()));
        let sum: BigRational = self.probs.iter().map(|p| (p - &u).abs()).sum();
        sum / BigRational::from_integer(BigInt::from(2))
    }

    pub fn bias(&self, i: usize, c: usize, d: usize) -> BigRational {
        if c == d {
            return BigRational::zero();
        }
        let q = self.marginal(i);
        let s = &q[c] + &q[d];
        if s.is_zero() {
            BigRational::zero()
        } else {
            (&q[c] - &q[d]) / s
        }
    }

    pub fn bias_norm_sq(&self) -> BigRational {
        let mut total = BigRational::zero();
        for i in 0..self.shape.n() {
            let q = self.marginal(i);
            for c in 0..q.len() {
                for d in 0..q.len() {
                    let s = &q[c] + &q[d];
                    if c != d && !s.is_zero() {
                        let b = (&q[c] - &q[d]) / s;
                        total += &b * &b;
                    }
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Distribution;

    #[test]
    fn exact_matches_float_path() {
        let shape = GridShape::new(vec![2, 3]).unwrap();
        let w = [5, 1, 2, 7, 3, 2];
        let e = ExactDense::from_weights(shape.clone(), &w).unwrap();
        let f = Distribution::dense(shape, e.to_f64()).unwrap();
        let tv = e.tv_to_uniform().to_f64().unwrap();
        assert!((tv - f.tv_to_uniform().unwrap()).abs() < 1e-15);
        let b = e.bias(1, 0, 2).to_f64().unwrap();
        assert!((b - f.bias(1, 0, 2).unwrap()).abs() < 1e-15);
        let nsq = e.bias_norm_sq().to_f64().unwrap();
        assert!((nsq - f.bias_vector().norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn exact_antisymmetry() {
        let shape = GridShape::new(vec![3]).unwrap();
        let e = ExactDense::from_weights(shape, &[1, 2, 0]).unwrap();
        assert_eq!(e.bias(0, 0, 1), -e.bias(0, 1, 0));
        assert_eq!(e.bias(0, 2, 2), BigRational::zero());
    }

    #[test]
    fn point_mass_tv_is_three_quarters() {
        let shape = GridShape::new(vec![2, 2]).unwrap();
        let e = ExactDense::from_weights(shape, &[1, 0, 0, 0]).unwrap();
        assert_eq!(e.tv_to_uniform(), BigRational::new(3.into(), 4.into()));
    }
}
