//! Edge weights of the hypergrid graph `H` and the orientation
//! `G = G[z] + G[u] + sum_k G[k] + G[r]` built from a distribution `l`.
//!
//! Vertices are row-major point indices. A directed edge is written
//! `(x, i, b)`, meaning `x -> x^{(i)->b}`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::report::{Tightest, VerificationReport};

/// Largest grid accepted by the edge construction.
pub const EDGE_CAP: usize = 10_000;

/// Relative mass difference below which an edge counts as zero.
pub const ZERO_EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeClass {
    Zero,
    Uneven,
    /// Even edge at scale `kappa >= 1`.
    Even(u32),
}

/// Which subgraph of the orientation an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subgraph {
    Zero,
    Uneven,
    Scale(u32),
    Remaining,
}

/// One undirected edge `{x, x^{(i)->b}}` with `b > x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedEdge {
    pub x: usize,
    pub i: usize,
    pub b: usize,
    pub class: EdgeClass,
    /// `|l(x) - l(y)| / max(l(x), l(y))`, 0 for zero edges.
    pub weight: f64,
}

/// `kappa_max = ceil(10 log_m(N * 1e6))`.
pub fn kappa_cap(size: usize, m: usize) -> u32 {
    (10.0 * ((size as f64) * 1e6).ln() / (m as f64).ln()).ceil() as u32
}

/// Classifies a pair of endpoint masses under side bound `m`.
pub fn classify_pair(lx: f64, ly: f64, m: usize, kappa_max: u32) -> (EdgeClass, f64) {
    let hi = lx.max(ly);
    let diff = (lx - ly).abs();
    if hi <= 0.0 || diff <= ZERO_EDGE_TOL * hi {
        return (EdgeClass::Zero, 0.0);
    }
    let w = diff / hi;
    let mf = m as f64;
    if w >= mf / (mf + 1.0) {
        return (EdgeClass::Uneven, w);
    }
    let mut kappa = 1u32;
    let mut lower = 1.0 / mf;
    while w <= lower && kappa < kappa_max {
        kappa += 1;
        lower /= mf;
    }
    (EdgeClass::Even(kappa), w)
}

#[derive(Debug, Clone)]
struct Layout {
    shape: GridShape,
    strides: Vec<usize>,
    offsets: Vec<usize>,
    width: usize,
}

impl Layout {
    fn new(shape: &GridShape) -> Self {
        let mut offsets = Vec::with_capacity(shape.n());
        let mut acc = 0;
        for &m in shape.dims() {
            offsets.push(acc);
            acc += m;
        }
        Self {
            shape: shape.clone(),
            strides: shape.strides(),
            offsets,
            width: acc,
        }
    }

    fn slot(&self, x: usize, i: usize, b: usize) -> usize {
        x * self.width + self.offsets[i] + b
    }

    fn symbol(&self, x: usize, i: usize) -> usize {
        (x / self.strides[i]) % self.shape.side(i)
    }

    fn neighbor(&self, x: usize, i: usize, b: usize) -> usize {
        x - self.symbol(x, i) * self.strides[i] + b * self.strides[i]
    }
}

/// A full orientation of `H` built from a distribution `l`.
#[derive(Debug, Clone)]
pub struct OrientedEdgeSet {
    layout: Layout,
    m: usize,
    kappa_max: u32,
    masses: Vec<f64>,
    /// Per directed slot: the subgraph containing `(x, i, b)`, if oriented that way.
    out: Vec<Option<Subgraph>>,
    /// Per slot, the class of the undirected edge (set for both directions).
    class: Vec<Option<(EdgeClass, f64)>>,
    /// `rho_kappa` ranks (0-based) for every scale that has edges in `H[kappa]`.
    ranks: BTreeMap<u32, Vec<usize>>,
    /// Deletion order used to derive each ranking.
    orders: BTreeMap<u32, Vec<usize>>,
}

/// Every undirected edge of `l`'s grid with its class, using `m = max side`.
pub fn classify_edges(l: &Distribution) -> Result<Vec<ClassifiedEdge>> {
    let m = l.shape().max_side();
    classify_edges_with_m(l, m)
}

pub fn classify_edges_with_m(l: &Distribution, m: usize) -> Result<Vec<ClassifiedEdge>> {
    let size = l.shape().size_capped("edge classification", EDGE_CAP)?;
    let masses = l.to_dense_table()?;
    let layout = Layout::new(l.shape());
    let kmax = kappa_cap(size, m);
    let mut out = Vec::new();
    for x in 0..size {
        for i in 0..layout.shape.n() {
            for b in layout.symbol(x, i) + 1..layout.shape.side(i) {
                let y = layout.neighbor(x, i, b);
                let (class, weight) = classify_pair(masses[x], masses[y], m, kmax);
                out.push(ClassifiedEdge { x, i, b, class, weight });
            }
        }
    }
    Ok(out)
}

/// Orientation with `m = max side of l`.
pub fn build_orientation(l: &Distribution) -> Result<OrientedEdgeSet> {
    build_orientation_with_m(l, l.shape().max_side())
}

/// Orientation with an explicit side bound `m`, used when `l` is a marginal
/// of a larger grid.
pub fn build_orientation_with_m(l: &Distribution, m: usize) -> Result<OrientedEdgeSet> {
    l.shape().size_capped("orientation", EDGE_CAP)?;
    let masses = l.to_dense_table()?;
    OrientedEdgeSet::from_masses(l.shape(), masses, m)
}

impl OrientedEdgeSet {
    pub fn from_masses(shape: &GridShape, masses: Vec<f64>, m: usize) -> Result<Self> {
        let size = shape.size_capped("orientation", EDGE_CAP)?;
        if masses.len() != size {
            return Err(Error::InvalidArgument(format!(
                "{} masses for {size} points",
                masses.len()
            )));
        }
        if m < shape.max_side() {
            return Err(Error::InvalidArgument(format!("m = {m} below the largest side")));
        }
        let layout = Layout::new(shape);
        let kappa_max = kappa_cap(size, m);
        let slots = size * layout.width;
        let mut set = Self {
            layout,
            m,
            kappa_max,
            masses,
            out: vec![None; slots],
            class: vec![None; slots],
            ranks: BTreeMap::new(),
            orders: BTreeMap::new(),
        };
        set.orient();
        Ok(set)
    }

    fn orient(&mut self) {
        let lay = &self.layout;
        let size = self.masses.len();
        let n = lay.shape.n();
        let mut even: Vec<(usize, usize, usize, u32)> = Vec::new();
        // uneven and zero edges
        for x in 0..size {
            for i in 0..n {
                for b in lay.symbol(x, i) + 1..lay.shape.side(i) {
                    let y = lay.neighbor(x, i, b);
                    let a = lay.symbol(x, i);
                    let c = classify_pair(self.masses[x], self.masses[y], self.m, self.kappa_max);
                    self.class[lay.slot(x, i, b)] = Some(c);
                    self.class[lay.slot(y, i, a)] = Some(c);
                    match c.0 {
                        EdgeClass::Uneven => {
                            if self.masses[x] > self.masses[y] {
                                self.out[lay.slot(x, i, b)] = Some(Subgraph::Uneven);
                            } else {
                                self.out[lay.slot(y, i, a)] = Some(Subgraph::Uneven);
                            }
                        }
                        // x < y always holds here since b > x_i
                        EdgeClass::Zero => self.out[lay.slot(x, i, b)] = Some(Subgraph::Zero),
                        EdgeClass::Even(k) => even.push((x, i, b, k)),
                    }
                }
            }
        }
        let has_u_out = |out: &Vec<Option<Subgraph>>, v: usize, i: usize| {
            (0..lay.shape.side(i)).any(|b| out[lay.slot(v, i, b)] == Some(Subgraph::Uneven))
        };
        let mut h_kappa: BTreeMap<u32, Vec<(usize, usize, usize)>> = BTreeMap::new();
        for &(x, i, b, k) in &even {
            let y = lay.neighbor(x, i, b);
            let xu = has_u_out(&self.out, x, i);
            let yu = has_u_out(&self.out, y, i);
            if !xu && !yu {
                h_kappa.entry(k).or_default().push((x, i, b));
            } else if xu {
                // both sides ties go to x, the lexicographically smaller endpoint
                self.out[lay.slot(x, i, b)] = Some(Subgraph::Remaining);
            } else {
                let a = lay.symbol(x, i);
                self.out[lay.slot(y, i, a)] = Some(Subgraph::Remaining);
            }
        }
        for (k, edges) in h_kappa {
            let order = peel_order(size, &edges, lay);
            let mut rank = vec![0; size];
            for (r, &v) in order.iter().enumerate() {
                rank[v] = r;
            }
            for &(x, i, b) in &edges {
                let y = lay.neighbor(x, i, b);
                if rank[x] < rank[y] {
                    self.out[lay.slot(x, i, b)] = Some(Subgraph::Scale(k));
                } else {
                    let a = lay.symbol(x, i);
                    self.out[lay.slot(y, i, a)] = Some(Subgraph::Scale(k));
                }
            }
            self.ranks.insert(k, rank);
            self.orders.insert(k, order);
        }
    }

    pub fn shape(&self) -> &GridShape {
        &self.layout.shape
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kappa_max(&self) -> u32 {
        self.kappa_max
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn num_vertices(&self) -> usize {
        self.masses.len()
    }

    /// `x^{(i)->b}` as a point index.
    pub fn neighbor(&self, x: usize, i: usize, b: usize) -> usize {
        self.layout.neighbor(x, i, b)
    }

    pub fn symbol(&self, x: usize, i: usize) -> usize {
        self.layout.symbol(x, i)
    }

    /// Subgraph holding the directed edge `(x, i, b)`, or `None` if the edge
    /// is oriented the other way (or `b = x_i`).
    pub fn directed(&self, x: usize, i: usize, b: usize) -> Option<Subgraph> {
        self.out[self.layout.slot(x, i, b)]
    }

    /// Class and weight of the undirected edge `{x, x^{(i)->b}}`.
    pub fn edge_class(&self, x: usize, i: usize, b: usize) -> Option<(EdgeClass, f64)> {
        self.class[self.layout.slot(x, i, b)]
    }

    /// Scales that have a ranking `rho_kappa`.
    pub fn scales(&self) -> Vec<u32> {
        self.ranks.keys().copied().collect()
    }

    /// `rho_kappa(x)` as a 0-based rank.
    pub fn rank(&self, kappa: u32, x: usize) -> Option<usize> {
        self.ranks.get(&kappa).map(|r| r[x])
    }

    pub fn outdegree(&self, x: usize, sub: Subgraph) -> usize {
        let lay = &self.layout;
        (0..lay.shape.n())
            .flat_map(|i| (0..lay.shape.side(i)).map(move |b| (i, b)))
            .filter(|&(i, b)| self.out[lay.slot(x, i, b)] == Some(sub))
            .count()
    }

    /// Out-degree counted over every subgraph.
    pub fn total_outdegree(&self, x: usize) -> usize {
        let w = self.layout.width;
        self.out[x * w..(x + 1) * w].iter().filter(|s| s.is_some()).count()
    }

    /// All directed edges `(x, i, b)` of one subgraph.
    pub fn edges(&self, sub: Subgraph) -> Vec<(usize, usize, usize)> {
        self.all_edges()
            .into_iter()
            .filter(|e| e.3 == sub)
            .map(|e| (e.0, e.1, e.2))
            .collect()
    }

    /// Every directed edge with its subgraph.
    pub fn all_edges(&self) -> Vec<(usize, usize, usize, Subgraph)> {
        let lay = &self.layout;
        let mut v = Vec::new();
        for x in 0..self.masses.len() {
            for i in 0..lay.shape.n() {
                for b in 0..lay.shape.side(i) {
                    if let Some(s) = self.out[lay.slot(x, i, b)] {
                        v.push((x, i, b, s));
                    }
                }
            }
        }
        v
    }

    /// Edge counts per subgraph.
    pub fn counts(&self) -> BTreeMap<Subgraph, usize> {
        let mut c = BTreeMap::new();
        for s in self.out.iter().flatten() {
            *c.entry(*s).or_insert(0) += 1;
        }
        c
    }

    /// Reverses one uneven edge. Used only to inject a fault into rule checks.
    pub fn flip_one_uneven_edge(&mut self) -> bool {
        let Some(&(x, i, b)) = self.edges(Subgraph::Uneven).first() else {
            return false;
        };
        let y = self.neighbor(x, i, b);
        let a = self.symbol(x, i);
        let sx = self.layout.slot(x, i, b);
        let sy = self.layout.slot(y, i, a);
        self.out[sx] = None;
        self.out[sy] = Some(Subgraph::Uneven);
        true
    }

    /// Replaces every orientation by a uniformly random direction per edge,
    /// keeping the subgraph labels. Used for adversarial-orientation sweeps.
    pub fn randomized<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let lay = &self.layout;
        let mut out = vec![None; self.out.len()];
        for (x, i, b, s) in self.all_edges() {
            if rng.random_bool(0.5) {
                out[lay.slot(x, i, b)] = Some(s);
            } else {
                let y = lay.neighbor(x, i, b);
                out[lay.slot(y, i, lay.symbol(x, i))] = Some(s);
            }
        }
        Self {
            layout: Layout::new(&lay.shape),
            m: self.m,
            kappa_max: self.kappa_max,
            masses: self.masses.clone(),
            out,
            class: self.class.clone(),
            ranks: self.ranks.clone(),
            orders: self.orders.clone(),
        }
    }

    /// Graphviz rendering for small grids.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for x in 0..self.masses.len() {
            let p = self.layout.shape.point_of(x);
            let _ = writeln!(s, "  v{x} [label=\"{:?} {:.4}\"];", p, self.masses[x]);
        }
        for (x, i, b, sub) in self.all_edges() {
            let y = self.neighbor(x, i, b);
            let _ = writeln!(s, "  v{x} -> v{y} [label=\"{sub:?}\"];");
        }
        s.push_str("}\n");
        s
    }

    /// Re-derives every construction rule from the masses and lists violations.
    pub fn rule_violations(&self) -> Vec<String> {
        let lay = &self.layout;
        let size = self.masses.len();
        let n = lay.shape.n();
        let mut bad = Vec::new();
        let mut h_kappa: BTreeMap<u32, Vec<(usize, usize, usize)>> = BTreeMap::new();
        for x in 0..size {
            for i in 0..n {
                let a = lay.symbol(x, i);
                for b in a + 1..lay.shape.side(i) {
                    let y = lay.neighbor(x, i, b);
                    let fwd = self.out[lay.slot(x, i, b)];
                    let bwd = self.out[lay.slot(y, i, a)];
                    let (src, dst, sub) = match (fwd, bwd) {
                        (Some(s), None) => (x, y, s),
                        (None, Some(s)) => (y, x, s),
                        (None, None) => {
                            bad.push(format!("edge {x}-{y} missing"));
                            continue;
                        }
                        (Some(_), Some(_)) => {
                            bad.push(format!("edge {x}-{y} oriented twice"));
                            continue;
                        }
                    };
                    let (lx, ly) = (self.masses[x], self.masses[y]);
                    let hi = lx.max(ly);
                    let zero = hi <= 0.0 || (lx - ly).abs() <= ZERO_EDGE_TOL * hi;
                    let w = if zero { 0.0 } else { (lx - ly).abs() / hi };
                    let uneven = !zero && w >= self.m as f64 / (self.m as f64 + 1.0);
                    match sub {
                        Subgraph::Zero => {
                            if !zero || src != x {
                                bad.push(format!("zero edge {src}->{dst} misfiled"));
                            }
                        }
                        Subgraph::Uneven => {
                            if !uneven || self.masses[src] <= self.masses[dst] {
                                bad.push(format!("uneven edge {src}->{dst} misoriented"));
                            }
                        }
                        Subgraph::Scale(_) | Subgraph::Remaining => {
                            if zero || uneven {
                                bad.push(format!("even edge {src}->{dst} has wrong class"));
                            }
                            if let Subgraph::Scale(k) = sub {
                                let lo = (self.m as f64).powi(-(k as i32));
                                let top = lo * self.m as f64;
                                if !(w <= top && (w > lo || k == self.kappa_max)) {
                                    bad.push(format!("edge {src}->{dst} weight {w} outside scale {k}"));
                                }
                            }
                            let su = self.has_uneven_out(src, i);
                            let du = self.has_uneven_out(dst, i);
                            match sub {
                                Subgraph::Scale(k) => {
                                    if su || du {
                                        bad.push(format!("scale edge {src}->{dst} touches uneven direction"));
                                    }
                                    h_kappa.entry(k).or_default().push((x, i, b));
                                    let r = &self.ranks[&k];
                                    if r[src] >= r[dst] {
                                        bad.push(format!("scale edge {src}->{dst} against ranking"));
                                    }
                                }
                                _ => {
                                    if !su {
                                        bad.push(format!("remaining edge {src}->{dst} source lacks uneven out-edge"));
                                    } else if du && src > dst {
                                        bad.push(format!("remaining edge {src}->{dst} tie not broken to smaller"));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for (k, edges) in &h_kappa {
            match self.orders.get(k) {
                Some(order) => bad.extend(check_peel_order(size, edges, lay, order, *k)),
                None => bad.push(format!("scale {k} has no ranking")),
            }
        }
        bad
    }

    fn has_uneven_out(&self, v: usize, i: usize) -> bool {
        (0..self.layout.shape.side(i)).any(|b| self.out[self.layout.slot(v, i, b)] == Some(Subgraph::Uneven))
    }

    /// Total number of undirected edges of `H`.
    pub fn undirected_edge_count(&self) -> usize {
        self.layout.shape.edge_count()
    }
}

fn adjacency(size: usize, edges: &[(usize, usize, usize)], lay: &Layout) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); size];
    for &(x, i, b) in edges {
        let y = lay.neighbor(x, i, b);
        adj[x].push(y);
        adj[y].push(x);
    }
    adj
}

/// Repeatedly deletes the vertex of largest remaining degree, ties to the
/// smaller index.
fn peel_order(size: usize, edges: &[(usize, usize, usize)], lay: &Layout) -> Vec<usize> {
    let adj = adjacency(size, edges, lay);
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut alive = vec![true; size];
    let mut heap: BTreeSet<(Reverse<usize>, usize)> = (0..size).map(|v| (Reverse(deg[v]), v)).collect();
    let mut order = Vec::with_capacity(size);
    while let Some(entry) = heap.pop_first() {
        let v = entry.1;
        alive[v] = false;
        order.push(v);
        for &u in &adj[v] {
            if alive[u] {
                heap.remove(&(Reverse(deg[u]), u));
                deg[u] -= 1;
                heap.insert((Reverse(deg[u]), u));
            }
        }
    }
    order
}

/// Checks that each vertex of `order` had maximum degree in the subgraph
/// induced by itself and the vertices after it.
fn check_peel_order(
    size: usize,
    edges: &[(usize, usize, usize)],
    lay: &Layout,
    order: &[usize],
    k: u32,
) -> Vec<String> {
    let mut bad = Vec::new();
    if order.len() != size {
        bad.push(format!("scale {k} ranking is not a bijection"));
        return bad;
    }
    let mut seen = vec![false; size];
    for &v in order {
        if std::mem::replace(&mut seen[v], true) {
            bad.push(format!("scale {k} ranking repeats vertex {v}"));
            return bad;
        }
    }
    let adj = adjacency(size, edges, lay);
    let mut alive = vec![true; size];
    for &v in order {
        let d = |u: usize| adj[u].iter().filter(|&&w| alive[w]).count();
        let dv = d(v);
        let max = (0..size).filter(|&u| alive[u]).map(d).max().unwrap_or(0);
        if dv < max {
            bad.push(format!("scale {k}: vertex {v} deleted with degree {dv} below {max}"));
        }
        alive[v] = false;
    }
    bad
}

/// In-edges of `v` in `G[kappa]` coming from `u_set`, when every vertex of
/// `u_set` has out-degree at most `g` there. Returns `None` if the premise fails.
pub fn check_lemma_3_4(e: &OrientedEdgeSet, kappa: u32, u_set: &[usize], v: usize, g: usize) -> Option<(usize, bool)> {
    if g == 0 || u_set.contains(&v) {
        return None;
    }
    let sub = Subgraph::Scale(kappa);
    if u_set.iter().any(|&u| e.outdegree(u, sub) > g) {
        return None;
    }
    let count = u_set
        .iter()
        .filter(|&&u| {
            (0..e.shape().n()).any(|i| {
                let b = e.symbol(v, i);
                e.symbol(u, i) != b && e.neighbor(u, i, b) == v && e.directed(u, i, b) == Some(sub)
            })
        })
        .count();
    Some((count, count <= g))
}

/// Per-point bound on squared relative differences along out-edges outside
/// `G[z]`, checked at every vertex.
pub fn check_lemma_3_5(e: &OrientedEdgeSet) -> VerificationReport {
    let m = e.m() as f64;
    let mut tight = Tightest::default();
    let mut bad = 0;
    let n = e.shape().n();
    for x in 0..e.num_vertices() {
        let lx = e.masses()[x];
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..n {
            for b in 0..e.shape().side(i) {
                match e.directed(x, i, b) {
                    None | Some(Subgraph::Zero) => {}
                    Some(sub) => {
                        let ly = e.masses()[e.neighbor(x, i, b)];
                        let r = (lx - ly) / lx;
                        lhs += r * r;
                        match sub {
                            Subgraph::Uneven => rhs += m.powi(3),
                            Subgraph::Scale(k) => rhs += 4.0 * m.powi(4 - 2 * k as i32),
                            _ => {}
                        }
                    }
                }
            }
        }
        tight.offer(lhs, rhs);
        if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
            bad += 1;
        }
    }
    VerificationReport::enumeration(
        "outdegree_point_bound",
        format!("shape={} m={}", e.shape(), e.m()),
        e.num_vertices() as u64,
        bad,
        tight.best,
        1e-9,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(d: &[usize]) -> GridShape {
        GridShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn classification_examples() {
        let k = kappa_cap(4, 2);
        assert_eq!(classify_pair(0.8, 0.2, 2, k).0, EdgeClass::Uneven);
        let (c, w) = classify_pair(0.5, 0.4, 3, k);
        assert_eq!(c, EdgeClass::Even(2));
        assert!((w - 0.2).abs() < 1e-15);
        assert_eq!(classify_pair(0.3, 0.3, 3, k).0, EdgeClass::Zero);
        assert_eq!(classify_pair(0.0, 0.0, 3, k).0, EdgeClass::Zero);
        assert_eq!(classify_pair(0.3, 0.0, 3, k).0, EdgeClass::Uneven);
    }

    #[test]
    fn tiny_weights_fall_into_last_bucket() {
        let k = kappa_cap(4, 2);
        let (c, _) = classify_pair(1.0, 1.0 - 1e-11, 2, k);
        let EdgeClass::Even(s) = c else { panic!("{c:?}") };
        assert!(s <= k);
    }

    #[test]
    fn uniform_is_all_zero() {
        let l = Distribution::uniform_dense(shape(&[2, 3])).unwrap();
        let e = build_orientation(&l).unwrap();
        let c = e.counts();
        assert_eq!(c.len(), 1);
        assert_eq!(c[&Subgraph::Zero], e.undirected_edge_count());
        assert!(e.rule_violations().is_empty());
    }

    #[test]
    fn point_mass_edges_leave_the_atom() {
        let l = Distribution::point_mass(shape(&[2, 3]), &[0, 0]).unwrap();
        let e = build_orientation(&l).unwrap();
        assert_eq!(e.outdegree(0, Subgraph::Uneven), 3);
        assert!(e.rule_violations().is_empty());
        let l = Distribution::point_mass(shape(&[2, 2]), &[0, 0]).unwrap();
        let e = build_orientation(&l).unwrap();
        assert_eq!(e.edges(Subgraph::Uneven).len(), 2);
        assert_eq!(e.edges(Subgraph::Zero).len(), 2);
    }

    #[test]
    fn fault_injection_is_detected() {
        let l = Distribution::point_mass(shape(&[2, 2]), &[1, 1]).unwrap();
        let mut e = build_orientation(&l).unwrap();
        assert!(e.flip_one_uneven_edge());
        assert!(!e.rule_violations().is_empty());
    }

    #[test]
    fn peel_order_on_a_path() {
        // star centred at 0 inside Z_(3): edges 0-1 and 0-2
        let s = shape(&[3]);
        let lay = Layout::new(&s);
        let edges = vec![(0, 0, 1), (0, 0, 2)];
        let order = peel_order(3, &edges, &lay);
        assert_eq!(order, vec![0, 1, 2]);
        assert!(check_peel_order(3, &edges, &lay, &order, 1).is_empty());
        assert!(!check_peel_order(3, &edges, &lay, &[1, 0, 2], 1).is_empty());
    }

    #[test]
    fn lemma_3_4_vacuous_cases() {
        let l = Distribution::uniform_dense(shape(&[3, 3])).unwrap();
        let e = build_orientation(&l).unwrap();
        assert_eq!(check_lemma_3_4(&e, 1, &[], 0, 1), Some((0, true)));
        assert_eq!(check_lemma_3_4(&e, 1, &[0], 0, 1), None);
    }

    #[test]
    fn dot_dump_mentions_all_edges() {
        let l = Distribution::point_mass(shape(&[2, 2]), &[0, 0]).unwrap();
        let e = build_orientation(&l).unwrap();
        assert_eq!(e.to_dot().matches("->").count(), 4);
    }
}
