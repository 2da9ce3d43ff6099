//! Synthetic graph families: configuration graphs over Lognormal, Poisson
//! and Exponential degree laws, Barabási-Albert and Erdős-Rényi graphs, plus
//! a degree-preserving rewiring that raises clustering.
//!
//! Every generator is a pure function of its parameters and the supplied RNG.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Poisson};

use crate::clustering;
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, Vertex};

/// Degree law of a configuration graph. The parametric kinds draw
/// `1 + X` with `E[X] = lambda - 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum DegreeDistribution {
    /// `X` lognormal with mean `lambda - 1` and standard deviation 1.
    Lognormal {
        lambda: f64,
    },
    /// `X ~ Poisson(lambda - 1)`.
    Poisson {
        lambda: f64,
    },
    /// `X` exponential with mean `lambda - 1`.
    Exponential {
        lambda: f64,
    },
    Explicit(Vec<usize>),
}

impl DegreeDistribution {
    /// Draws `n` degrees. Continuous draws are rounded half-up and clamped to 1.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>> {
        let lambda = match self {
            DegreeDistribution::Explicit(degrees) => return Ok(degrees.clone()),
            DegreeDistribution::Lognormal { lambda }
            | DegreeDistribution::Poisson { lambda }
            | DegreeDistribution::Exponential { lambda } => *lambda,
        };
        if !(lambda >= 1.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("mean degree {lambda} < 1")));
        }
        let excess = lambda - 1.0;
        if excess == 0.0 {
            return Ok(vec![1; n]);
        }
        let draws: Vec<f64> = match self {
            DegreeDistribution::Lognormal { .. } => {
                // moments of X fixed at (excess, 1)
                let sigma2 = (1.0 + 1.0 / (excess * excess)).ln();
                let mu = excess.ln() - sigma2 / 2.0;
                let dist = LogNormal::new(mu, sigma2.sqrt())
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                dist.sample_iter(&mut *rng).take(n).collect()
            }
            DegreeDistribution::Poisson { .. } => {
                let dist =
                    Poisson::new(excess).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                dist.sample_iter(&mut *rng).take(n).collect()
            }
            DegreeDistribution::Exponential { .. } => {
                let dist =
                    Exp::new(1.0 / excess).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                dist.sample_iter(&mut *rng).take(n).collect()
            }
            DegreeDistribution::Explicit(_) => unreachable!(),
        };
        Ok(draws
            .into_iter()
            .map(|x| ((1.0 + x + 0.5).floor() as usize).max(1))
            .collect())
    }
}

/// Random multigraph realizing `degrees` by a uniform perfect matching of
/// half-edge stubs. An odd stub total is fixed by giving one uniformly chosen
/// vertex an extra stub.
pub fn configuration_graph<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<MultiGraph> {
    if degrees.is_empty() {
        return Err(Error::EmptyDegreeSequence);
    }
    let mut degrees = degrees.to_vec();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let v = rng.random_range(0..degrees.len());
        degrees[v] += 1;
    }
    let mut stubs: Vec<Vertex> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    stubs.shuffle(rng);
    let mut g = MultiGraph::new(degrees.len());
    for pair in stubs.chunks_exact(2) {
        g.add_edge(pair[0], pair[1])?;
    }
    Ok(g)
}

/// Preferential attachment graph. Starts from the complete graph on
/// `ceil(lambda)` vertices; each arriving vertex links to `floor(lambda/2)`
/// or `floor(lambda/2) + 1` distinct earlier vertices (mean `lambda/2`),
/// drawn sequentially without replacement with weight `1 + degree`.
pub fn barabasi_albert<R: Rng + ?Sized>(lambda: f64, n: usize, rng: &mut R) -> Result<MultiGraph> {
    if !(lambda >= 2.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "preferential attachment needs lambda >= 2, got {lambda}"
        )));
    }
    if (n as f64) <= lambda {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must exceed lambda = {lambda}"
        )));
    }
    let core = lambda.ceil() as usize;
    let mut g = MultiGraph::new(n);
    for u in 0..core {
        for v in u + 1..core {
            g.add_edge(u, v)?;
        }
    }
    let mut weights = FenwickTree::new(n);
    let mut degree = vec![0u64; n];
    for (v, d) in degree.iter_mut().enumerate().take(core) {
        *d = core as u64 - 1;
        weights.set(v, 1 + *d);
    }
    let half = (lambda / 2.0).floor();
    let p_low = 1.0 + half - lambda / 2.0;
    let half = half as usize;
    let mut chosen = Vec::with_capacity(half + 1);
    for i in core..n {
        let links = if rng.random::<f64>() < p_low {
            half
        } else {
            half + 1
        };
        let links = links.min(i);
        chosen.clear();
        for _ in 0..links {
            let target = rng.random_range(0..weights.total());
            let w = weights.find(target);
            chosen.push(w);
            weights.set(w, 0);
        }
        for &w in &chosen {
            g.add_edge(i, w)?;
            degree[w] += 1;
            weights.set(w, 1 + degree[w]);
        }
        degree[i] = links as u64;
        weights.set(i, 1 + degree[i]);
    }
    Ok(g)
}

/// G(n, p) with `p = lambda / (n - 1)`, no loops. Uses geometric skipping,
/// so the cost is linear in the number of edges.
pub fn erdos_renyi<R: Rng + ?Sized>(lambda: f64, n: usize, rng: &mut R) -> Result<MultiGraph> {
    let max = n.saturating_sub(1) as f64;
    if !(0.0..=max).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} outside [0, {max}]"
        )));
    }
    let mut g = MultiGraph::new(n);
    if lambda == 0.0 {
        return Ok(g);
    }
    let p = lambda / max;
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v)?;
            }
        }
        return Ok(g);
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            g.add_edge(v, w as usize)?;
        }
    }
    Ok(g)
}

/// The five synthetic families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphFamily {
    ConfigLognormal,
    ConfigPoisson,
    ConfigExponential,
    BarabasiAlbert,
    ErdosRenyi,
}

impl GraphFamily {
    pub const ALL: [GraphFamily; 5] = [
        GraphFamily::ConfigLognormal,
        GraphFamily::ConfigPoisson,
        GraphFamily::ConfigExponential,
        GraphFamily::BarabasiAlbert,
        GraphFamily::ErdosRenyi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::ConfigLognormal => "lognormal",
            GraphFamily::ConfigPoisson => "poisson",
            GraphFamily::ConfigExponential => "exponential",
            GraphFamily::BarabasiAlbert => "ba",
            GraphFamily::ErdosRenyi => "er",
        }
    }

    /// Stable small integer used when deriving RNG streams.
    pub fn code(self) -> u64 {
        self as u64
    }

    pub fn generate<R: Rng + ?Sized>(
        self,
        lambda: f64,
        n: usize,
        rng: &mut R,
    ) -> Result<MultiGraph> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "graph families need n >= 2, got {n}"
            )));
        }
        let config = |dist: DegreeDistribution, rng: &mut R| {
            let degrees = dist.sample(n, rng)?;
            configuration_graph(&degrees, rng)
        };
        match self {
            GraphFamily::ConfigLognormal => config(DegreeDistribution::Lognormal { lambda }, rng),
            GraphFamily::ConfigPoisson => config(DegreeDistribution::Poisson { lambda }, rng),
            GraphFamily::ConfigExponential => {
                config(DegreeDistribution::Exponential { lambda }, rng)
            }
            GraphFamily::BarabasiAlbert => barabasi_albert(lambda, n, rng),
            GraphFamily::ErdosRenyi => erdos_renyi(lambda, n, rng),
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "lognormal" | "l" => GraphFamily::ConfigLognormal,
            "poisson" | "p" => GraphFamily::ConfigPoisson,
            "exponential" | "x" => GraphFamily::ConfigExponential,
            "ba" | "barabasi-albert" | "b" => GraphFamily::BarabasiAlbert,
            "er" | "erdos-renyi" | "e" => GraphFamily::ErdosRenyi,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown graph family {other:?}"
                )))
            }
        })
    }
}

/// Reduces `g` to a simple graph and applies degree-preserving double-edge
/// swaps that close open triads (`v-u-w` gains `v-w`), accepting a swap only
/// when the triangle count strictly increases. Stops once average clustering
/// reaches `target` or after `max_attempts` proposals.
pub fn rewire_for_clustering<R: Rng + ?Sized>(
    g: &MultiGraph,
    target: f64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<MultiGraph> {
    let mut adj = clustering::simple_adjacency(g);
    let n = adj.len();
    let mut edge_set: HashSet<(Vertex, Vertex)> = HashSet::new();
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs {
            edge_set.insert(key(u, v));
        }
    }
    let hubs: Vec<Vertex> = (0..n).filter(|&v| adj[v].len() >= 2).collect();
    let check_every = (n / 20).max(100);
    let mut accepted = 0usize;
    let mut reached = clustering::stats_from_adjacency(&adj).average_clustering >= target;

    for _ in 0..max_attempts {
        if reached || hubs.is_empty() {
            break;
        }
        let u = hubs[rng.random_range(0..hubs.len())];
        let du = adj[u].len();
        let i = rng.random_range(0..du);
        let mut j = rng.random_range(0..du - 1);
        if j >= i {
            j += 1;
        }
        let (v, w) = (adj[u][i], adj[u][j]);
        if edge_set.contains(&key(v, w)) || adj[v].len() < 2 || adj[w].len() < 2 {
            continue;
        }
        let x = adj[v][rng.random_range(0..adj[v].len())];
        let y = adj[w][rng.random_range(0..adj[w].len())];
        let distinct = x != u && y != u && x != w && y != v && x != y;
        if !distinct || edge_set.contains(&key(x, y)) {
            continue;
        }
        let lost = common(&adj, &edge_set, v, x) + common(&adj, &edge_set, w, y);
        remove(&mut adj, &mut edge_set, v, x);
        remove(&mut adj, &mut edge_set, w, y);
        let gained = common(&adj, &edge_set, v, w) + common(&adj, &edge_set, x, y);
        if gained > lost {
            insert(&mut adj, &mut edge_set, v, w);
            insert(&mut adj, &mut edge_set, x, y);
            accepted += 1;
            if accepted.is_multiple_of(check_every) {
                reached = clustering_of(&adj) >= target;
            }
        } else {
            insert(&mut adj, &mut edge_set, v, x);
            insert(&mut adj, &mut edge_set, w, y);
        }
    }

    let mut edges: Vec<(Vertex, Vertex)> = edge_set.into_iter().collect();
    edges.sort_unstable();
    MultiGraph::from_edges(n, edges)
}

fn clustering_of(adj: &[Vec<Vertex>]) -> f64 {
    let sorted: Vec<Vec<Vertex>> = adj
        .iter()
        .map(|nbrs| {
            let mut s = nbrs.clone();
            s.sort_unstable();
            s
        })
        .collect();
    clustering::stats_from_adjacency(&sorted).average_clustering
}

fn key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    (u.min(v), u.max(v))
}

fn common(adj: &[Vec<Vertex>], edges: &HashSet<(Vertex, Vertex)>, a: Vertex, b: Vertex) -> usize {
    let (small, other) = if adj[a].len() <= adj[b].len() {
        (a, b)
    } else {
        (b, a)
    };
    adj[small]
        .iter()
        .filter(|&&z| z != other && edges.contains(&key(z, other)))
        .count()
}

fn remove(adj: &mut [Vec<Vertex>], edges: &mut HashSet<(Vertex, Vertex)>, a: Vertex, b: Vertex) {
    edges.remove(&key(a, b));
    for (p, q) in [(a, b), (b, a)] {
        let pos = adj[p].iter().position(|&z| z == q).expect("edge present");
        adj[p].swap_remove(pos);
    }
}

fn insert(adj: &mut [Vec<Vertex>], edges: &mut HashSet<(Vertex, Vertex)>, a: Vertex, b: Vertex) {
    edges.insert(key(a, b));
    adj[a].push(b);
    adj[b].push(a);
}

/// Binary indexed tree over non-negative integer weights.
struct FenwickTree {
    tree: Vec<u64>,
    values: Vec<u64>,
    total: u64,
}

impl FenwickTree {
    fn new(n: usize) -> Self {
        FenwickTree {
            tree: vec![0; n + 1],
            values: vec![0; n],
            total: 0,
        }
    }

    fn total(&self) -> u64 {
        self.total
    }

    fn set(&mut self, i: usize, value: u64) {
        let delta = value.wrapping_sub(self.values[i]);
        self.values[i] = value;
        self.total = self.total.wrapping_add(delta);
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] = self.tree[k].wrapping_add(delta);
            k += k & k.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}
