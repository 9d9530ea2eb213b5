//! Hypergrid shapes, points and restrictions.
//!
//! Symbols of coordinate `i` are `0..m_i`. Points are linearized row-major:
//! the first coordinate is the most significant digit, so index order and
//! lexicographic order on points coincide.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the hypergrid, one symbol per coordinate.
pub type Point = Vec<usize>;

/// The side lengths `(m_1, ..., m_n)` of a hypergrid `Z_M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GridShape {
    dims: Vec<usize>,
}

impl GridShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("a grid needs at least one coordinate".into()));
        }
        if let Some(bad) = dims.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidShape(format!("side {bad} is below 2")));
        }
        Ok(Self { dims })
    }

    /// `n` copies of the same side `m`.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        Self::new(vec![m; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn side(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// `m = max_i m_i`.
    pub fn max_side(&self) -> usize {
        *self.dims.iter().max().expect("non-empty shape")
    }

    /// Number of points, or `None` when it does not fit in `usize`.
    pub fn size(&self) -> Option<usize> {
        self.dims.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m))
    }

    /// Number of points as `f64` (never overflows to an error, may be large).
    pub fn size_f64(&self) -> f64 {
        self.dims.iter().map(|&m| m as f64).product()
    }

    /// Number of points, failing with a capacity error above `cap`.
    pub fn size_capped(&self, what: &'static str, cap: usize) -> Result<usize> {
        match self.size() {
            Some(s) if s <= cap => Ok(s),
            other => Err(Error::Capacity {
                what,
                needed: other.map(|s| s as u128).unwrap_or(u128::MAX),
                cap: cap as u128,
            }),
        }
    }

    /// Sum of sides; the per-point width of edge slot tables.
    pub fn side_sum(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Row-major strides. Panics if the grid does not fit in memory indices.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.n()];
        for i in (0..self.n().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1]
                .checked_mul(self.dims[i + 1])
                .expect("grid too large to index");
        }
        strides
    }

    pub fn check_point(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::OutOfRange(format!(
                "point has {} coordinates, grid has {}",
                x.len(),
                self.n()
            )));
        }
        for (i, (&xi, &m)) in x.iter().zip(&self.dims).enumerate() {
            if xi >= m {
                return Err(Error::OutOfRange(format!("coordinate {i} = {xi} not below {m}")));
            }
        }
        Ok(())
    }

    /// Row-major index of a point. The point is assumed valid.
    pub fn index_of(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.dims).fold(0usize, |acc, (&xi, &m)| acc * m + xi)
    }

    /// Inverse of [`GridShape::index_of`].
    pub fn point_of(&self, mut index: usize) -> Point {
        let mut x = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            x[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        x
    }

    /// Writes the point for `index` into `out` without allocating.
    pub fn point_into(&self, mut index: usize, out: &mut [usize]) {
        for i in (0..self.n()).rev() {
            out[i] = index % self.dims[i];
            index /= self.dims[i];
        }
    }

    /// All points in index order. Intended for enumerable grids only.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let size = self.size().expect("grid too large to enumerate");
        (0..size).map(move |ix| self.point_of(ix))
    }

    /// Shape of the sub-grid on the listed coordinates (in the given order).
    /// Returns `None` for an empty coordinate list (the 0-dimensional grid).
    pub fn sub_shape(&self, coords: &[usize]) -> Option<GridShape> {
        if coords.is_empty() {
            None
        } else {
            Some(GridShape {
                dims: coords.iter().map(|&i| self.dims[i]).collect(),
            })
        }
    }

    /// Undirected edge count of the Hamming-type graph `H` on this grid.
    pub fn edge_count(&self) -> usize {
        let size = self.size().expect("grid too large to enumerate");
        self.dims.iter().map(|&m| size / m * (m * (m - 1) / 2)).sum()
    }
}

impl TryFrom<Vec<usize>> for GridShape {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        GridShape::new(dims)
    }
}

impl From<GridShape> for Vec<usize> {
    fn from(s: GridShape) -> Self {
        s.dims
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_(")?;
        for (k, m) in self.dims.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// A partial assignment `rho` with `rho_i` either a symbol or a star.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Restriction {
    entries: Vec<Option<usize>>,
}

impl Restriction {
    pub fn new(entries: Vec<Option<usize>>) -> Self {
        Self { entries }
    }

    pub fn all_stars(n: usize) -> Self {
        Self { entries: vec![None; n] }
    }

    /// Restriction fixing every coordinate to the given point.
    pub fn fixed(x: &[usize]) -> Self {
        Self {
            entries: x.iter().map(|&v| Some(v)).collect(),
        }
    }

    /// Stars on `star_set`, every other coordinate fixed to `y`.
    pub fn from_point_and_stars(y: &[usize], star_set: &[usize]) -> Self {
        let mut entries: Vec<Option<usize>> = y.iter().map(|&v| Some(v)).collect();
        for &i in star_set {
            entries[i] = None;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.entries[i]
    }

    pub fn is_star(&self, i: usize) -> bool {
        self.entries[i].is_none()
    }

    /// Indices of the star coordinates, ascending.
    pub fn stars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_star(i)).collect()
    }

    pub fn num_stars(&self) -> usize {
        self.entries.iter().filter(|e| e.is_none()).count()
    }

    pub fn validate(&self, shape: &GridShape) -> Result<()> {
        if self.n() != shape.n() {
            return Err(Error::OutOfRange(format!(
                "restriction has {} entries, grid has {}",
                self.n(),
                shape.n()
            )));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if let Some(v) = e {
                if *v >= shape.side(i) {
                    return Err(Error::OutOfRange(format!(
                        "restriction fixes coordinate {i} to {v}, side is {}",
                        shape.side(i)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `x` lies in the subcube selected by this restriction.
    pub fn contains(&self, x: &[usize]) -> bool {
        self.entries.iter().zip(x).all(|(e, &xi)| e.is_none_or(|v| v == xi))
    }

    /// Refines this restriction by a restriction on its star coordinates.
    ///
    /// `inner` has one entry per star of `self`, in ascending star order.
    pub fn compose(&self, inner: &Restriction) -> Result<Restriction> {
        let stars = self.stars();
        if inner.n() != stars.len() {
            return Err(Error::OutOfRange(format!(
                "inner restriction has {} entries, outer has {} stars",
                inner.n(),
                stars.len()
            )));
        }
        let mut entries = self.entries.clone();
        for (k, &i) in stars.iter().enumerate() {
            entries[i] = inner.entries[k];
        }
        Ok(Restriction { entries })
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            match e {
                Some(v) => write!(f, "{v}")?,
                None => write!(f, "*")?,
            }
        }
        write!(f, ")")
    }
}
