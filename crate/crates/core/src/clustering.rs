//! Average local clustering and transitivity.
//!
//! Both statistics are defined on simple graphs; a multigraph is reduced to
//! its simple projection (distinct neighbors, loops ignored) first.

use crate::graph::{MultiGraph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusteringStats {
    /// Mean of local clustering over all vertices; vertices with fewer than
    /// two neighbors contribute 0.
    pub average_clustering: f64,
    /// `3 * triangles / connected triples`.
    pub transitivity: f64,
    pub triangles: u64,
}

pub fn clustering_stats(g: &MultiGraph) -> ClusteringStats {
    stats_from_adjacency(&simple_adjacency(g))
}

/// Sorted distinct neighbor lists without self-loops.
pub(crate) fn simple_adjacency(g: &MultiGraph) -> Vec<Vec<Vertex>> {
    (0..g.n())
        .map(|v| {
            let mut nbrs: Vec<Vertex> =
                g.neighbors(v).iter().copied().filter(|&w| w != v).collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            nbrs
        })
        .collect()
}

/// Per-vertex triangle counts over sorted, deduplicated adjacency lists.
pub(crate) fn local_triangles(adj: &[Vec<Vertex>]) -> Vec<u64> {
    let mut tri = vec![0u64; adj.len()];
    for (u, nu) in adj.iter().enumerate() {
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = &adj[v];
            // common neighbours w > v, by sorted merge
            let (mut i, mut j) = (
                nu.partition_point(|&x| x <= v),
                nv.partition_point(|&x| x <= v),
            );
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nu[i];
                        tri[u] += 1;
                        tri[v] += 1;
                        tri[w] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    tri
}

pub(crate) fn stats_from_adjacency(adj: &[Vec<Vertex>]) -> ClusteringStats {
    let tri = local_triangles(adj);
    let mut local_sum = 0.0;
    let mut triples = 0u64;
    for (v, nbrs) in adj.iter().enumerate() {
        let d = nbrs.len() as u64;
        if d >= 2 {
            let pairs = d * (d - 1) / 2;
            triples += pairs;
            local_sum += tri[v] as f64 / pairs as f64;
        }
    }
    let triangles = tri.iter().sum::<u64>() / 3;
    ClusteringStats {
        average_clustering: if adj.is_empty() {
            0.0
        } else {
            local_sum / adj.len() as f64
        },
        transitivity: if triples == 0 {
            0.0
        } else {
            3.0 * triangles as f64 / triples as f64
        },
        triangles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// O(n^3) enumeration of triangles and triples.
    fn brute_force(g: &MultiGraph) -> (f64, f64) {
        let n = g.n();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in g.edges() {
            if u != v {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
        let mut local_sum = 0.0;
        let (mut closed, mut triples) = (0u64, 0u64);
        for v in 0..n {
            let nbrs: Vec<_> = (0..n).filter(|&w| adj[v][w]).collect();
            let d = nbrs.len();
            if d < 2 {
                continue;
            }
            let mut links = 0u64;
            for a in 0..d {
                for b in a + 1..d {
                    if adj[nbrs[a]][nbrs[b]] {
                        links += 1;
                    }
                }
            }
            let pairs = (d * (d - 1) / 2) as u64;
            closed += links;
            triples += pairs;
            local_sum += links as f64 / pairs as f64;
        }
        let avg = if n == 0 { 0.0 } else { local_sum / n as f64 };
        let trans = if triples == 0 {
            0.0
        } else {
            closed as f64 / triples as f64
        };
        (avg, trans)
    }

    #[test]
    fn triangle_is_fully_clustered() {
        let g = MultiGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = clustering_stats(&g);
        assert_eq!(
            (s.average_clustering, s.transitivity, s.triangles),
            (1.0, 1.0, 1)
        );
    }

    #[test]
    fn star_has_no_clustering() {
        let g = MultiGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = clustering_stats(&g);
        assert_eq!((s.average_clustering, s.transitivity), (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..40, edges in prop::collection::vec((0usize..40, 0usize..40), 0..200)) {
            let edges: Vec<_> = edges.into_iter().filter(|&(u, v)| u < n && v < n).collect();
            let g = MultiGraph::from_edges(n, edges).unwrap();
            let s = clustering_stats(&g);
            let (avg, trans) = brute_force(&g);
            prop_assert!((s.average_clustering - avg).abs() < 1e-12);
            prop_assert!((s.transitivity - trans).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_brute_force_on_dense_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [50usize, 120, 200] {
            let mut g = MultiGraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.08) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let s = clustering_stats(&g);
            let (avg, trans) = brute_force(&g);
            assert!((s.average_clustering - avg).abs() < 1e-12);
            assert!((s.transitivity - trans).abs() < 1e-12);
        }
    }
}
