//! Distribution files, instance generators and annotated corpora.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma};
use serde::{Deserialize, Serialize};

use crate::distribution::{Body, Distribution, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::grid::GridShape;

pub const FILE_FORMAT: &str = "hgut-dist/1";

/// Parametric instance families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Uniform,
    /// Dense `Dirichlet(alpha, ..., alpha)` draw.
    Dirichlet {
        alpha: f64,
    },
    /// Uniform product except for one coordinate's marginal.
    BiasedCoord {
        coord: usize,
        marginal: Vec<f64>,
    },
    /// Product whose first `count` coordinates put mass `p0` on symbol 0 and
    /// split the rest evenly.
    ProductBiased {
        count: usize,
        p0: f64,
    },
    /// `(1 - mass) U + mass * delta_a` with the atom `a` drawn uniformly.
    HeavyAtom {
        mass: f64,
    },
    /// Dense weights `1 + amplitude * u(x)`, `u(x)` uniform on `[-1, 1]`.
    PerturbedUniform {
        amplitude: f64,
    },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Uniform => "uniform",
            Generator::Dirichlet { .. } => "dirichlet",
            Generator::BiasedCoord { .. } => "biased_coord",
            Generator::ProductBiased { .. } => "product_biased",
            Generator::HeavyAtom { .. } => "heavy_atom",
            Generator::PerturbedUniform { .. } => "perturbed_uniform",
        }
    }

    pub fn is_far(&self) -> bool {
        !matches!(self, Generator::Uniform)
    }

    pub fn generate<R: Rng + ?Sized>(&self, shape: &GridShape, rng: &mut R) -> Result<Distribution> {
        match self {
            Generator::Uniform => Ok(Distribution::uniform_product(shape.clone())),
            Generator::Dirichlet { alpha } => {
                let gamma = Gamma::new(*alpha, 1.0)
                    .map_err(|e| Error::InvalidArgument(format!("dirichlet alpha {alpha}: {e}")))?;
                let size = shape.size_capped("dirichlet draw", DEFAULT_DENSE_CAP)?;
                let weights: Vec<f64> = (0..size).map(|_| gamma.sample(rng)).collect();
                Distribution::dense_from_weights(shape.clone(), weights)
            }
            Generator::BiasedCoord { coord, marginal } => {
                if *coord >= shape.n() {
                    return Err(Error::OutOfRange(format!("coordinate {coord}")));
                }
                let mut q: Vec<Vec<f64>> = shape.dims().iter().map(|&m| vec![1.0 / m as f64; m]).collect();
                q[*coord] = marginal.clone();
                Distribution::product(shape.clone(), q)
            }
            Generator::ProductBiased { count, p0 } => {
                if *count > shape.n() {
                    return Err(Error::InvalidArgument(format!(
                        "{count} biased coordinates, n = {}",
                        shape.n()
                    )));
                }
                if !(0.0..=1.0).contains(p0) {
                    return Err(Error::InvalidArgument(format!("p0 = {p0} outside [0,1]")));
                }
                let q = shape
                    .dims()
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        if i < *count {
                            let rest = (1.0 - p0) / (m - 1) as f64;
                            (0..m).map(|a| if a == 0 { *p0 } else { rest }).collect()
                        } else {
                            vec![1.0 / m as f64; m]
                        }
                    })
                    .collect();
                Distribution::product(shape.clone(), q)
            }
            Generator::HeavyAtom { mass } => {
                if !(0.0..=1.0).contains(mass) {
                    return Err(Error::InvalidArgument(format!("atom mass {mass} outside [0,1]")));
                }
                let size = shape.size_capped("heavy atom", DEFAULT_DENSE_CAP)?;
                let atom = rng.random_range(0..size);
                let mut probs = vec![(1.0 - mass) / size as f64; size];
                probs[atom] += mass;
                Distribution::dense_from_weights(shape.clone(), probs)
            }
            Generator::PerturbedUniform { amplitude } => {
                if !(0.0..=1.0).contains(amplitude) {
                    return Err(Error::InvalidArgument(format!("amplitude {amplitude} outside [0,1]")));
                }
                let size = shape.size_capped("perturbed uniform", DEFAULT_DENSE_CAP)?;
                let weights = (0..size)
                    .map(|_| 1.0 + amplitude * rng.random_range(-1.0..=1.0))
                    .collect();
                Distribution::dense_from_weights(shape.clone(), weights)
            }
        }
    }
}

/// Exact `d_TV(p, U)`. Product inputs are reduced to their non-uniform
/// coordinates, whose block carries the whole distance.
pub fn exact_tv(p: &Distribution) -> Result<f64> {
    match p.body() {
        Body::Dense(_) => p.tv_to_uniform(),
        Body::Product(q) => {
            let block: Vec<usize> = q
                .iter()
                .enumerate()
                .filter(|(_, qi)| qi.iter().any(|&v| v != 1.0 / qi.len() as f64))
                .map(|(i, _)| i)
                .collect();
            if block.is_empty() {
                return Ok(0.0);
            }
            let sub = p.project(&block)?;
            sub.shape().size_capped("exact tv block", DEFAULT_DENSE_CAP)?;
            sub.tv_to_uniform()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum FileBody {
    Dense { probs: Vec<f64> },
    Product { marginals: Vec<Vec<f64>> },
}

/// On-disk JSON form of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub format: String,
    pub shape: Vec<usize>,
    #[serde(flatten)]
    pub body: FileBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DistributionFile {
    pub fn from_distribution(p: &Distribution) -> Self {
        let body = match p.body() {
            Body::Dense(t) => FileBody::Dense { probs: t.to_vec() },
            Body::Product(q) => FileBody::Product { marginals: q.to_vec() },
        };
        Self {
            format: FILE_FORMAT.into(),
            shape: p.shape().dims().to_vec(),
            body,
            tv: None,
            generator: None,
            seed: None,
        }
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        if self.format != FILE_FORMAT {
            return Err(Error::InvalidArgument(format!("unknown file format {:?}", self.format)));
        }
        let shape = GridShape::new(self.shape.clone())?;
        match &self.body {
            FileBody::Dense { probs } => Distribution::dense(shape, probs.clone()),
            FileBody::Product { marginals } => Distribution::product(shape, marginals.clone()),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Reads a distribution file.
pub fn load_distribution(path: &Path) -> Result<Distribution> {
    DistributionFile::read(path)?.to_distribution()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub generator: Generator,
    pub shape: Vec<usize>,
    pub count: usize,
    /// Far instances below this exact distance are discarded and redrawn.
    #[serde(default)]
    pub floor: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub dist: Distribution,
    pub tv: f64,
    pub seed: u64,
}

impl CorpusEntry {
    pub fn to_file(&self, generator: &Generator) -> DistributionFile {
        let mut f = DistributionFile::from_distribution(&self.dist);
        f.tv = Some(self.tv);
        f.generator = Some(generator.clone());
        f.seed = Some(self.seed);
        f
    }
}

/// Draws `count` instances with exact distance annotations.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusEntry>> {
    let shape = GridShape::new(spec.shape.clone())?;
    let floor = if spec.generator.is_far() { spec.floor } else { None };
    let max_attempts = 50 * spec.count.max(1);
    let mut out = Vec::with_capacity(spec.count);
    let mut attempt = 0u64;
    while out.len() < spec.count {
        if attempt as usize >= max_attempts {
            return Err(Error::InvalidArgument(format!(
                "only {} of {} {} instances reach distance {:?} after {max_attempts} draws",
                out.len(),
                spec.count,
                spec.generator.name(),
                floor
            )));
        }
        let seed = super::mix_seed(spec.seed, attempt, 0);
        attempt += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = spec.generator.generate(&shape, &mut rng)?;
        let tv = exact_tv(&dist)?;
        if floor.is_some_and(|f| tv < f) {
            continue;
        }
        out.push(CorpusEntry {
            name: format!("{}_{:04}", spec.generator.name(), out.len()),
            dist,
            tv,
            seed,
        });
    }
    Ok(out)
}

/// Writes one JSON file per entry; returns the paths in corpus order.
pub fn write_corpus(dir: &Path, spec: &CorpusSpec, entries: &[CorpusEntry]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    entries
        .iter()
        .map(|e| {
            let path = dir.join(format!("{}.json", e.name));
            e.to_file(&spec.generator).write(&path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(generator: Generator, shape: &[usize], floor: Option<f64>) -> CorpusSpec {
        CorpusSpec {
            generator,
            shape: shape.to_vec(),
            count: 5,
            floor,
            seed: 11,
        }
    }

    #[test]
    fn uniform_annotation_is_zero() {
        for e in generate_corpus(&spec(Generator::Uniform, &[3, 2], None)).unwrap() {
            assert_eq!(e.tv, 0.0);
        }
    }

    #[test]
    fn full_atom_on_two_by_two() {
        let c = generate_corpus(&spec(Generator::HeavyAtom { mass: 1.0 }, &[2, 2], None)).unwrap();
        for e in c {
            assert!((e.tv - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn floor_is_respected_and_deterministic() {
        let s = spec(Generator::Dirichlet { alpha: 0.2 }, &[3, 3], Some(0.2));
        let a = generate_corpus(&s).unwrap();
        let b = generate_corpus(&s).unwrap();
        assert!(a.iter().all(|e| e.tv >= 0.2));
        let ta: Vec<f64> = a.iter().map(|e| e.tv).collect();
        let tb: Vec<f64> = b.iter().map(|e| e.tv).collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn infeasible_floor_errors() {
        let s = spec(Generator::PerturbedUniform { amplitude: 0.01 }, &[2, 2], Some(0.5));
        assert!(generate_corpus(&s).is_err());
    }

    #[test]
    fn product_tv_uses_biased_block() {
        let g = Generator::ProductBiased { count: 2, p0: 0.75 };
        let shape = GridShape::new(vec![2; 20]).unwrap();
        let p = g.generate(&shape, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        // two coordinates at (3/4, 1/4): (|9-4| + 2|3-4| + |1-4|) / 32 = 5/16
        assert!((exact_tv(&p).unwrap() - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn file_round_trip() {
        let shape = GridShape::new(vec![2, 3]).unwrap();
        let p = Generator::Dirichlet { alpha: 1.0 }
            .generate(&shape, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        let f = DistributionFile::from_distribution(&p);
        let text = serde_json::to_string(&f).unwrap();
        let back: DistributionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let q = back.to_distribution().unwrap();
        assert_eq!(q.to_dense_table().unwrap(), p.to_dense_table().unwrap());
    }
}
