//! Undirected multigraphs, referral forests, and the neighborhood quantities
//! (free neighborhoods, free ends, matches, cross-seed matches) the
//! estimators are built from.
//!
//! Conventions: a self-loop at `v` lists `v` twice in `v`'s neighbor
//! multiset and contributes 2 to `d(v)`. Removing a forest edge from a
//! neighborhood removes exactly one adjacency occurrence, so parallel copies
//! of a referral tie remain free.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::scalar::Scalar;

pub type Vertex = usize;

/// Undirected graph on vertices `0..n` permitting parallel edges and loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl MultiGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        MultiGraph {
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = MultiGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        self.edges.push((u, v));
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Neighbor occurrences of `v` (a loop appears twice).
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> Result<usize> {
        self.check(v)?;
        Ok(self.adjacency[v].len())
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn neighbor_multiset(&self, v: Vertex) -> Multiset<Vertex> {
        self.adjacency[v].iter().copied().collect()
    }

    /// True when the graph has no loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .all(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
    }

    /// Edges as `(min, max)` pairs, sorted. Useful for comparing graphs.
    pub fn sorted_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Arithmetic mean degree over `set`.
    pub fn mean_degree<T: Scalar>(&self, set: &[Vertex]) -> Result<T> {
        let degrees = self.degrees_of(set)?;
        arithmetic_mean(&degrees)
    }

    /// Harmonic mean degree over `set`; every member must have `d >= 1`.
    pub fn harmonic_mean_degree<T: Scalar>(&self, set: &[Vertex]) -> Result<T> {
        let degrees = self.degrees_of(set)?;
        if let Some(pos) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::ZeroDegree(set[pos]));
        }
        harmonic_mean(&degrees)
    }

    /// Free neighborhood `N(u, F)`: neighbors of `u` through edges not in
    /// `forest`. Each forest edge incident to `u` removes one occurrence.
    pub fn free_neighborhood(
        &self,
        u: Vertex,
        forest: &[(Vertex, Vertex)],
    ) -> Result<Multiset<Vertex>> {
        self.check(u)?;
        let mut out = self.neighbor_multiset(u);
        for &(a, b) in forest {
            let other = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !out.remove_one(&other) {
                return Err(Error::MissingEdge(a, b));
            }
        }
        Ok(out)
    }

    /// Free ends `R(S, F)`: disjoint union of free neighborhoods over `set`.
    pub fn free_ends(
        &self,
        set: &[Vertex],
        forest: &[(Vertex, Vertex)],
    ) -> Result<Multiset<Vertex>> {
        let free = self.free_neighborhoods(set, forest)?;
        Ok(free.iter().fold(Multiset::new(), |acc, n| acc.sum(n)))
    }

    /// Matches `M(S, F)`: for each `u` in `set`, the free neighbors of `u`
    /// that lie in `set`, with `set` taken as a multiplicity-one multiset.
    pub fn matches(&self, set: &[Vertex], forest: &[(Vertex, Vertex)]) -> Result<Multiset<Vertex>> {
        let members: Multiset<Vertex> = distinct(set).into_iter().collect();
        let free = self.free_neighborhoods(set, forest)?;
        Ok(free
            .iter()
            .fold(Multiset::new(), |acc, n| acc.sum(&n.intersection(&members))))
    }

    /// Cross-seed matches `X(s, F, γ)`: free neighbors of members of seed
    /// `s`'s component that lie in some other component of the forest.
    pub fn cross_seed_matches(
        &self,
        forest: &ReferralForest,
        s: Vertex,
    ) -> Result<Multiset<Vertex>> {
        if forest.seed_of(s) != Some(s) {
            return Err(Error::NotASeed(s));
        }
        let component = forest.component(s);
        let complement: Multiset<Vertex> = forest
            .members()
            .iter()
            .copied()
            .filter(|&v| forest.seed_of(v) != Some(s))
            .collect();
        let free = self.free_neighborhoods(&component, forest.edges())?;
        Ok(free.iter().fold(Multiset::new(), |acc, n| {
            acc.sum(&n.intersection(&complement))
        }))
    }

    fn free_neighborhoods(
        &self,
        set: &[Vertex],
        forest: &[(Vertex, Vertex)],
    ) -> Result<Vec<Multiset<Vertex>>> {
        let mut incident: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
        for &(a, b) in forest {
            self.check(a)?;
            self.check(b)?;
            incident.entry(a).or_default().push(b);
            if a != b {
                incident.entry(b).or_default().push(a);
            }
        }
        set.iter()
            .map(|&u| {
                self.check(u)?;
                let mut n = self.neighbor_multiset(u);
                for &other in incident.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if !n.remove_one(&other) {
                        return Err(Error::MissingEdge(u, other));
                    }
                }
                Ok(n)
            })
            .collect()
    }

    fn degrees_of(&self, set: &[Vertex]) -> Result<Vec<u64>> {
        if set.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        set.iter()
            .map(|&v| self.degree(v).map(|d| d as u64))
            .collect()
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }
}

fn distinct(set: &[Vertex]) -> Vec<Vertex> {
    let mut seen = HashSet::with_capacity(set.len());
    set.iter().copied().filter(|v| seen.insert(*v)).collect()
}

/// `(1/|A|) Σ d`.
pub fn arithmetic_mean<T: Scalar>(degrees: &[u64]) -> Result<T> {
    if degrees.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    Ok(T::from_count(degrees.iter().sum()) / T::from_count(degrees.len() as u64))
}

/// `|A| / Σ 1/d`. Zero degrees are rejected.
pub fn harmonic_mean<T: Scalar>(degrees: &[u64]) -> Result<T> {
    if degrees.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let mut reciprocal_sum = T::zero();
    for &d in degrees {
        if d == 0 {
            return Err(Error::Precondition("harmonic mean of a zero degree"));
        }
        reciprocal_sum = reciprocal_sum + T::one() / T::from_count(d);
    }
    Ok(T::from_count(degrees.len() as u64) / reciprocal_sum)
}

/// Referral forest of an RDS sample: recruiter→recruit edges, the seeds in
/// the order they entered, and the seed each sampled vertex descends from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferralForest {
    edges: Vec<(Vertex, Vertex)>,
    seeds: Vec<Vertex>,
    members: Vec<Vertex>,
    seed_of: HashMap<Vertex, Vertex>,
    recruiter_of: HashMap<Vertex, Vertex>,
}

impl ReferralForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_seed(&mut self, s: Vertex) -> Result<()> {
        if self.seed_of.contains_key(&s) {
            return Err(Error::InvalidReferral(format!(
                "vertex {s} already sampled"
            )));
        }
        self.seeds.push(s);
        self.members.push(s);
        self.seed_of.insert(s, s);
        Ok(())
    }

    pub fn add_referral(&mut self, recruiter: Vertex, recruit: Vertex) -> Result<()> {
        let Some(&seed) = self.seed_of.get(&recruiter) else {
            return Err(Error::InvalidReferral(format!(
                "recruiter {recruiter} is not sampled"
            )));
        };
        if self.seed_of.contains_key(&recruit) {
            return Err(Error::InvalidReferral(format!(
                "vertex {recruit} already sampled"
            )));
        }
        self.edges.push((recruiter, recruit));
        self.members.push(recruit);
        self.seed_of.insert(recruit, seed);
        self.recruiter_of.insert(recruit, recruiter);
        Ok(())
    }

    /// Referral edges `(recruiter, recruit)` in recruitment order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn seeds(&self) -> &[Vertex] {
        &self.seeds
    }

    /// Sampled vertices in discovery order.
    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn seed_of(&self, v: Vertex) -> Option<Vertex> {
        self.seed_of.get(&v).copied()
    }

    pub fn recruiter_of(&self, v: Vertex) -> Option<Vertex> {
        self.recruiter_of.get(&v).copied()
    }

    /// Members descending from seed `s`, in discovery order.
    pub fn component(&self, s: Vertex) -> Vec<Vertex> {
        self.members
            .iter()
            .copied()
            .filter(|&v| self.seed_of(v) == Some(s))
            .collect()
    }
}
