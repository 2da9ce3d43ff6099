//! Monte-Carlo checks of generator moments and estimator behaviour at
//! reduced replicate counts.

use netsize::estimators::{n2, n3};
use netsize::generate::{configuration_graph, rewire_for_clustering, DegreeDistribution};
use netsize::harness::{failure_curve, run_plan, stream_rng, PlanHashing};
use netsize::{
    clustering_stats, rds_capture, summarize, EstimateResult, EstimatorKind, ExperimentPlan,
    GraphFamily, RdsConfig, SummaryRow,
};
use rayon::prelude::*;

fn plan(
    families: &[GraphFamily],
    lambdas: &[f64],
    sizes: &[usize],
    r: &[usize],
    estimators: &[EstimatorKind],
    replicates: (usize, usize),
    seed: u64,
) -> ExperimentPlan {
    ExperimentPlan {
        families: families.to_vec(),
        lambdas: lambdas.to_vec(),
        sizes: sizes.to_vec(),
        sample_sizes: r.to_vec(),
        omegas: Vec::new(),
        estimators: estimators.to_vec(),
        graph_replicates: replicates.0,
        sample_replicates: replicates.1,
        seed,
        num_seeds: 7,
        hashing: PlanHashing::Random,
    }
}

fn median_of(rows: &[SummaryRow], estimator: EstimatorKind) -> f64 {
    rows.iter()
        .find(|r| r.estimator == estimator)
        .unwrap()
        .summary
        .median
        .unwrap()
}

#[test]
fn every_family_hits_its_mean_degree() {
    let cells: Vec<(GraphFamily, f64)> = GraphFamily::ALL
        .iter()
        .flat_map(|&f| [3.0, 5.0, 10.0].map(move |l| (f, l)))
        .collect();
    cells.par_iter().for_each(|&(family, lambda)| {
        let total: f64 = (0..30u64)
            .map(|g| {
                let graph = family
                    .generate(lambda, 5000, &mut stream_rng(1, &[family.code(), g]))
                    .unwrap();
                2.0 * graph.edge_count() as f64 / graph.n() as f64
            })
            .sum();
        let mean = total / 30.0;
        assert!(
            (mean - lambda).abs() <= 0.05 * lambda,
            "{family} λ={lambda}: mean degree {mean}"
        );
    });
}

#[test]
fn erdos_renyi_mean_degree_concentrates() {
    for g in 0..30u64 {
        let graph = GraphFamily::ErdosRenyi
            .generate(10.0, 5000, &mut stream_rng(2, &[g]))
            .unwrap();
        let mean = 2.0 * graph.edge_count() as f64 / 5000.0;
        assert!((mean - 10.0).abs() <= 0.2, "graph {g}: {mean}");
    }
}

#[test]
fn rds_estimators_are_consistent_on_poisson_graphs() {
    let p = plan(
        &[GraphFamily::ConfigPoisson],
        &[10.0],
        &[5000],
        &[750],
        &[EstimatorKind::N2, EstimatorKind::N3],
        (10, 10),
        3,
    );
    let rows = run_plan(&p).unwrap().summary;
    for kind in [EstimatorKind::N2, EstimatorKind::N3] {
        let m = median_of(&rows, kind);
        assert!((m - 5000.0).abs() <= 500.0, "{kind}: median {m}");
    }
}

#[test]
fn cross_component_matches_resist_clustering() {
    const N: usize = 10_000;
    let graphs: Vec<_> = (0..3u64)
        .into_par_iter()
        .map(|g| {
            let mut rng = stream_rng(4, &[g]);
            let degrees = DegreeDistribution::Poisson { lambda: 6.0 }
                .sample(N, &mut rng)
                .unwrap();
            let base = configuration_graph(&degrees, &mut rng).unwrap();
            rewire_for_clustering(&base, 0.15, 400 * N, &mut rng).unwrap()
        })
        .collect();
    for g in &graphs {
        assert!(clustering_stats(g).average_clustering >= 0.15);
    }
    let runs: Vec<(usize, u64)> = (0..3)
        .flat_map(|g| (0..40u64).map(move |s| (g, s)))
        .collect();
    let results: Vec<(EstimateResult<f64>, EstimateResult<f64>)> = runs
        .par_iter()
        .map(|&(g, s)| {
            let survey = rds_capture(
                &graphs[g],
                &RdsConfig::new(500),
                &mut stream_rng(4, &[10 + g as u64, s]),
            )
            .unwrap()
            .to_survey();
            (n2(&survey).unwrap(), n3(&survey).unwrap())
        })
        .collect();
    let m2 = summarize(&results.iter().map(|r| r.0).collect::<Vec<_>>())
        .unwrap()
        .median
        .unwrap();
    let m3 = summarize(&results.iter().map(|r| r.1).collect::<Vec<_>>())
        .unwrap()
        .median
        .unwrap();
    assert!(m2 < m3, "n2 {m2} vs n3 {m3}");
    assert!(m3 <= 1.1 * N as f64, "n3 {m3}");
}

/// Failure rates at n = 40 000 over the 15 family × λ cells.
#[test]
fn failure_rates_at_the_largest_population() {
    let p = plan(
        &GraphFamily::ALL,
        &[3.0, 5.0, 10.0],
        &[40_000],
        &[250, 750],
        &[EstimatorKind::N1, EstimatorKind::N2],
        (4, 10),
        5,
    );
    let curve = failure_curve(&run_plan(&p).unwrap().summary);
    let rate = |kind: EstimatorKind, r: usize| {
        curve
            .iter()
            .find(|pt| pt.estimator == kind && pt.r == r)
            .unwrap()
            .mean_failure_rate
    };
    let n1 = rate(EstimatorKind::N1, 250);
    let n2 = rate(EstimatorKind::N2, 250);
    assert!((n1 - 0.039).abs() <= 0.02, "n1 r=250: {n1}");
    assert!((n2 - 0.06).abs() <= 0.03, "n2 r=250: {n2}");
    for kind in [EstimatorKind::N1, EstimatorKind::N2] {
        assert!(rate(kind, 750) < 0.005, "{kind} r=750: {}", rate(kind, 750));
    }
}
