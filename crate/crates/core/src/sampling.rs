//! Uniform vertex sampling and the respondent-driven sampling simulator.
//!
//! The RDS process: `num_seeds` distinct seeds are drawn uniformly, by
//! default among vertices with at least one edge (see
//! [`RdsConfig::connected_seeds`]). While fewer than `target` subjects are
//! sampled, a uniformly chosen member of the frontier is interviewed and
//! recruits `k ~ recruit_law` of its undiscovered neighbors (fewer if it has
//! fewer), who join the frontier. If the frontier empties first, a fresh seed
//! is drawn the same way from the unsampled vertices. Nobody is recruited
//! twice, so the referrals form a forest rooted at the seeds.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, ReferralForest, Vertex};
use crate::survey::{Respondent, Survey};

/// Uniformly random `r`-subset of the vertices, in draw order.
pub fn uniform_sample<R: Rng + ?Sized>(
    g: &MultiGraph,
    r: usize,
    rng: &mut R,
) -> Result<Vec<Vertex>> {
    if r > g.n() {
        return Err(Error::SampleTooLarge { r, n: g.n() });
    }
    Ok(index::sample(rng, g.n(), r).into_vec())
}

/// Number of coupons a subject manages to pass on.
#[derive(Clone, Debug, PartialEq)]
pub enum RecruitLaw {
    /// Recruit every undiscovered neighbor.
    All,
    Fixed(usize),
    /// `(count, probability)` pairs; probabilities must sum to 1.
    Weighted(Vec<(usize, f64)>),
}

impl Default for RecruitLaw {
    /// Two recruits with probability 0.9, one with probability 0.1.
    fn default() -> Self {
        RecruitLaw::Weighted(vec![(2, 0.9), (1, 0.1)])
    }
}

impl RecruitLaw {
    fn validate(&self) -> Result<()> {
        if let RecruitLaw::Weighted(table) = self {
            let total: f64 = table.iter().map(|&(_, p)| p).sum();
            if table.is_empty()
                || table.iter().any(|&(_, p)| p.is_nan() || p < 0.0)
                || (total - 1.0).abs() > 1e-9
            {
                return Err(Error::InvalidParameter(format!(
                    "recruit law {table:?} is not a distribution"
                )));
            }
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            RecruitLaw::All => usize::MAX,
            RecruitLaw::Fixed(k) => *k,
            RecruitLaw::Weighted(table) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(k, p) in table {
                    acc += p;
                    if u < acc {
                        return k;
                    }
                }
                table.last().map(|&(k, _)| k).unwrap_or(0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RdsConfig {
    pub num_seeds: usize,
    /// Target sample size; sampling stops as soon as it is reached or passed.
    pub target: usize,
    pub recruit_law: RecruitLaw,
    /// Fixed initial seeds instead of uniform draws.
    pub initial_seeds: Option<Vec<Vertex>>,
    /// Draw seeds among vertices with at least one edge, falling back to
    /// isolated vertices only once no connected one is left. An isolated
    /// seed reports degree 0, for which the degree-corrected estimators are
    /// undefined.
    pub connected_seeds: bool,
}

impl RdsConfig {
    /// Seven seeds and the default recruitment law.
    pub fn new(target: usize) -> Self {
        RdsConfig {
            num_seeds: 7,
            target,
            recruit_law: RecruitLaw::default(),
            initial_seeds: None,
            connected_seeds: true,
        }
    }
}

/// An RDS sample together with what each subject reported.
#[derive(Clone, Debug, PartialEq)]
pub struct RdsSample {
    forest: ReferralForest,
    degrees: Vec<usize>,
    alters: Vec<Vec<Vertex>>,
}

impl RdsSample {
    /// Sampled vertices in discovery order.
    pub fn order(&self) -> &[Vertex] {
        self.forest.members()
    }

    pub fn forest(&self) -> &ReferralForest {
        &self.forest
    }

    /// Reported degree of each subject, aligned with [`order`](Self::order).
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Full alter list `N(u, ∅)` of each subject, aligned with `order`.
    pub fn alters(&self) -> &[Vec<Vertex>] {
        &self.alters
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// What the estimators see: per subject its ID, recruiter, component
    /// (index of its seed), reported degree and free alters `N(u, F)`.
    pub fn to_survey(&self) -> Survey<Vertex> {
        let members = self.forest.members();
        let seed_index: std::collections::HashMap<Vertex, usize> = self
            .forest
            .seeds()
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();
        let mut children: std::collections::HashMap<Vertex, Vec<Vertex>> = Default::default();
        for &(recruiter, recruit) in self.forest.edges() {
            children.entry(recruiter).or_default().push(recruit);
        }
        let respondents = members
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let mut free: crate::Multiset<Vertex> = self.alters[i].iter().copied().collect();
                let recruiter = self.forest.recruiter_of(u);
                for tie in recruiter
                    .iter()
                    .chain(children.get(&u).into_iter().flatten())
                {
                    let removed = free.remove_one(tie);
                    debug_assert!(removed, "referral tie missing from alter list");
                }
                Respondent {
                    id: u,
                    recruiter,
                    component: seed_index[&self.forest.seed_of(u).expect("member has a seed")],
                    degree: self.degrees[i] as u64,
                    free_alters: free,
                }
            })
            .collect();
        Survey::new(respondents)
    }
}

/// Simulates respondent-driven sampling on `g`.
pub fn rds_capture<R: Rng + ?Sized>(
    g: &MultiGraph,
    cfg: &RdsConfig,
    rng: &mut R,
) -> Result<RdsSample> {
    let n = g.n();
    if cfg.target > n {
        return Err(Error::SampleTooLarge { r: cfg.target, n });
    }
    let num_seeds = cfg.initial_seeds.as_ref().map_or(cfg.num_seeds, Vec::len);
    if num_seeds == 0 || num_seeds > cfg.target {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= seeds ({num_seeds}) <= target ({})",
            cfg.target
        )));
    }
    cfg.recruit_law.validate()?;

    let mut sampled = vec![false; n];
    let mut forest = ReferralForest::new();
    let mut frontier: Vec<Vertex> = Vec::new();
    let seeds = match &cfg.initial_seeds {
        Some(seeds) => seeds.clone(),
        None if cfg.connected_seeds => Vec::new(),
        None => index::sample(rng, n, num_seeds).into_vec(),
    };
    for s in seeds {
        if s >= n {
            return Err(Error::VertexOutOfRange { vertex: s, n });
        }
        forest.add_seed(s)?;
        sampled[s] = true;
        frontier.push(s);
    }
    while forest.seeds().len() < num_seeds {
        let s = fresh_vertex(g, &sampled, cfg.connected_seeds, rng);
        forest.add_seed(s)?;
        sampled[s] = true;
        frontier.push(s);
    }

    let mut candidates = Vec::new();
    while forest.members().len() < cfg.target {
        if frontier.is_empty() {
            let s = fresh_vertex(g, &sampled, cfg.connected_seeds, rng);
            forest.add_seed(s)?;
            sampled[s] = true;
            frontier.push(s);
            continue;
        }
        let x = frontier.swap_remove(rng.random_range(0..frontier.len()));
        candidates.clear();
        candidates.extend(g.neighbors(x).iter().copied().filter(|&v| !sampled[v]));
        candidates.sort_unstable();
        candidates.dedup();
        let k = cfg.recruit_law.draw(rng).min(candidates.len());
        let picks: Vec<Vertex> = if k == candidates.len() {
            candidates.clone()
        } else {
            index::sample(rng, candidates.len(), k)
                .into_iter()
                .map(|i| candidates[i])
                .collect()
        };
        for v in picks {
            forest.add_referral(x, v)?;
            sampled[v] = true;
            frontier.push(v);
        }
    }

    let degrees = forest
        .members()
        .iter()
        .map(|&v| g.neighbors(v).len())
        .collect();
    let alters = forest
        .members()
        .iter()
        .map(|&v| g.neighbors(v).to_vec())
        .collect();
    Ok(RdsSample {
        forest,
        degrees,
        alters,
    })
}

/// Uniform unsampled vertex, restricted to non-isolated ones when
/// `connected` and any remain. Caller guarantees an unsampled vertex exists.
fn fresh_vertex<R: Rng + ?Sized>(
    g: &MultiGraph,
    sampled: &[bool],
    connected: bool,
    rng: &mut R,
) -> Vertex {
    let n = sampled.len();
    let eligible = |v: Vertex| !sampled[v] && (!connected || !g.neighbors(v).is_empty());
    for _ in 0..64 {
        let v = rng.random_range(0..n);
        if eligible(v) {
            return v;
        }
    }
    let mut pool: Vec<Vertex> = (0..n).filter(|&v| eligible(v)).collect();
    if pool.is_empty() {
        pool = (0..n).filter(|&v| !sampled[v]).collect();
    }
    pool[rng.random_range(0..pool.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn square() -> MultiGraph {
        MultiGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn uniform_extremes() {
        let g = square();
        let mut all = uniform_sample(&g, 4, &mut rng(1)).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert!(uniform_sample(&g, 0, &mut rng(1)).unwrap().is_empty());
        assert!(matches!(
            uniform_sample(&g, 5, &mut rng(1)),
            Err(Error::SampleTooLarge { .. })
        ));
    }

    #[test]
    fn uniform_single_draw_frequencies() {
        let g = MultiGraph::new(10);
        let mut counts = [0usize; 10];
        let mut r = rng(2);
        for _ in 0..100_000 {
            counts[uniform_sample(&g, 1, &mut r).unwrap()[0]] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1e5 - 0.1).abs() < 0.01);
        }
    }

    #[test]
    fn square_forced_trace() {
        let cfg = RdsConfig {
            num_seeds: 1,
            target: 4,
            recruit_law: RecruitLaw::All,
            initial_seeds: Some(vec![0]),
            connected_seeds: true,
        };
        for seed in 0..20 {
            let s = rds_capture(&square(), &cfg, &mut rng(seed)).unwrap();
            let order = s.order();
            assert!(order == [0, 1, 3, 2] || order == [0, 3, 1, 2], "{order:?}");
            assert_eq!(s.forest().edges().len(), 3);
            assert_eq!(s.forest().seeds(), &[0]);
        }
    }

    #[test]
    fn isolated_vertices_force_reseeding() {
        let g = MultiGraph::new(5);
        let cfg = RdsConfig {
            num_seeds: 2,
            target: 3,
            recruit_law: RecruitLaw::default(),
            initial_seeds: None,
            connected_seeds: true,
        };
        let s = rds_capture(&g, &cfg, &mut rng(3)).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.forest().edges().is_empty());
        assert_eq!(s.forest().seeds().len(), 3);
    }

    #[test]
    fn connected_seeds_skip_isolated_vertices_while_possible() {
        // path 0-1-2 plus isolated 3..9
        let g = MultiGraph::from_edges(10, [(0, 1), (1, 2)]).unwrap();
        let cfg = RdsConfig {
            num_seeds: 2,
            recruit_law: RecruitLaw::Fixed(0),
            ..RdsConfig::new(4)
        };
        let mut isolated_seen = false;
        for seed in 0..50 {
            let s = rds_capture(&g, &cfg, &mut rng(seed)).unwrap();
            let seeds = s.forest().seeds();
            assert!(
                seeds[..3.min(seeds.len())].iter().all(|&v| v <= 2),
                "{seeds:?}"
            );
            assert!(seeds[3..].iter().all(|&v| v > 2));
            let loose = RdsConfig {
                connected_seeds: false,
                ..cfg.clone()
            };
            isolated_seen |= rds_capture(&g, &loose, &mut rng(seed))
                .unwrap()
                .forest()
                .seeds()[..2]
                .iter()
                .any(|&v| v > 2);
        }
        assert!(isolated_seen);
    }

    #[test]
    fn rejects_impossible_targets() {
        let g = square();
        assert!(rds_capture(&g, &RdsConfig::new(5), &mut rng(0)).is_err());
        let cfg = RdsConfig {
            num_seeds: 3,
            target: 2,
            ..RdsConfig::new(2)
        };
        assert!(rds_capture(&g, &cfg, &mut rng(0)).is_err());
        let cfg = RdsConfig {
            recruit_law: RecruitLaw::Weighted(vec![(2, 0.5)]),
            ..RdsConfig::new(2)
        };
        let cfg = RdsConfig {
            num_seeds: 1,
            ..cfg
        };
        assert!(rds_capture(&g, &cfg, &mut rng(0)).is_err());
    }

    #[test]
    fn parallel_edges_yield_one_recruitment() {
        let g = MultiGraph::from_edges(3, [(0, 1), (0, 1), (0, 1), (1, 2)]).unwrap();
        let cfg = RdsConfig {
            num_seeds: 1,
            target: 3,
            recruit_law: RecruitLaw::All,
            initial_seeds: Some(vec![0]),
            connected_seeds: true,
        };
        let s = rds_capture(&g, &cfg, &mut rng(0)).unwrap();
        assert_eq!(s.forest().edges(), &[(0, 1), (1, 2)]);
        let survey = s.to_survey();
        // two of the three parallel ties stay free
        assert_eq!(survey.respondents()[0].free_alters.count(&1), 2);
    }

    #[test]
    fn deterministic_under_seed() {
        let degrees = crate::generate::DegreeDistribution::Poisson { lambda: 4.0 }
            .sample(500, &mut rng(4))
            .unwrap();
        let g = crate::generate::configuration_graph(&degrees, &mut rng(5)).unwrap();
        let a = rds_capture(&g, &RdsConfig::new(100), &mut rng(6)).unwrap();
        let b = rds_capture(&g, &RdsConfig::new(100), &mut rng(6)).unwrap();
        assert_eq!(a, b);
    }
}
