//! Monte-Carlo experiment driver.
//!
//! A plan is a grid of graph families, mean degrees `λ`, population sizes `n`
//! and sample sizes `r`. For every `(family, λ, n)` it generates
//! `graph_replicates` graphs; on each graph and for every `r` it draws
//! `sample_replicates` samples (uniform for `n1`, RDS for the rest) and
//! applies every requested estimator, the hashed ones once per `|Ω|`.
//!
//! Every random draw comes from its own ChaCha8 stream whose seed is mixed
//! from the master seed and the run coordinates, so results do not depend on
//! the thread schedule. Rows are emitted sorted by cell, then graph, then
//! sample.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::anonymity::{assign_hashes, estimate_n2_psi, estimate_n3_psi, hash_survey, HashSpace};
use crate::error::{Error, Result};
use crate::estimators::{n1, n2, n3, EstimateResult, EstimatorKind, FailureCause};
use crate::generate::GraphFamily;
use crate::graph::MultiGraph;
use crate::sampling::{rds_capture, uniform_sample, RdsConfig};
use crate::survey::Survey;

/// How hashed estimators assign codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanHashing {
    Random,
    Injective,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub families: Vec<GraphFamily>,
    pub lambdas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub sample_sizes: Vec<usize>,
    /// Hash-space sizes; required when a hashed estimator is requested.
    pub omegas: Vec<u64>,
    pub estimators: Vec<EstimatorKind>,
    pub graph_replicates: usize,
    pub sample_replicates: usize,
    pub seed: u64,
    /// RDS seeds per sample.
    pub num_seeds: usize,
    pub hashing: PlanHashing,
}

impl ExperimentPlan {
    /// Parses the `key = value` plan format. Lists are comma separated,
    /// `#` starts a comment.
    ///
    /// ```text
    /// families = lognormal, poisson
    /// lambdas = 3, 10
    /// sizes = 5000
    /// r = 250, 750
    /// estimators = n2, n3psi
    /// omegas = 2000, 256000
    /// graphs = 2
    /// samples = 10
    /// seed = 1
    /// ```
    ///
    /// Optional keys: `omegas`, `seeds` (RDS seeds per sample, default 7),
    /// `hashing` (`random` or `injective`, default `random`).
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(i + 1, format!("expected key = value, found {line:?}")))?;
            let key = key.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(err(i + 1, format!("unknown key {key:?}")));
            }
            if entries
                .insert(key.clone(), (i + 1, value.trim().to_owned()))
                .is_some()
            {
                return Err(err(i + 1, format!("duplicate key {key:?}")));
            }
        }
        let list = |key: &str| -> Result<Option<(usize, Vec<String>)>> {
            Ok(entries.get(key).map(|(line, v)| {
                (
                    *line,
                    v.split(',')
                        .map(|x| x.trim().to_owned())
                        .filter(|x| !x.is_empty())
                        .collect(),
                )
            }))
        };
        fn parsed<T: std::str::FromStr>(
            entry: Option<(usize, Vec<String>)>,
            key: &str,
            err: &dyn Fn(usize, String) -> Error,
        ) -> Result<Vec<T>> {
            let (line, items) = entry.ok_or_else(|| err(0, format!("missing key {key:?}")))?;
            items
                .iter()
                .map(|x| {
                    x.parse::<T>()
                        .map_err(|_| err(line, format!("bad {key} value {x:?}")))
                })
                .collect()
        }
        let single = |key: &str, default: Option<u64>| -> Result<u64> {
            match entries.get(key) {
                Some((line, v)) => v
                    .parse()
                    .map_err(|_| err(*line, format!("bad {key} value {v:?}"))),
                None => default.ok_or_else(|| err(0, format!("missing key {key:?}"))),
            }
        };
        let hashing = match entries.get("hashing") {
            None => PlanHashing::Random,
            Some((_, v)) if v == "random" => PlanHashing::Random,
            Some((_, v)) if v == "injective" => PlanHashing::Injective,
            Some((line, v)) => return Err(err(*line, format!("bad hashing value {v:?}"))),
        };
        let plan = ExperimentPlan {
            families: parsed(list("families")?, "families", &err)?,
            lambdas: parsed(list("lambdas")?, "lambdas", &err)?,
            sizes: parsed(list("sizes")?, "sizes", &err)?,
            sample_sizes: parsed(list("r")?, "r", &err)?,
            omegas: match list("omegas")? {
                Some(entry) => parsed(Some(entry), "omegas", &err)?,
                None => Vec::new(),
            },
            estimators: parsed(list("estimators")?, "estimators", &err)?,
            graph_replicates: single("graphs", None)? as usize,
            sample_replicates: single("samples", None)? as usize,
            seed: single("seed", None)?,
            num_seeds: single("seeds", Some(7))? as usize,
            hashing,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, path)
    }

    /// Canonical plan text; parsing it gives back the same plan.
    pub fn to_plan_string(&self) -> String {
        fn join<T: ToString>(xs: &[T]) -> String {
            xs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        }
        let mut out = String::new();
        let _ = writeln!(out, "families = {}", join(&self.families));
        let _ = writeln!(out, "lambdas = {}", join(&self.lambdas));
        let _ = writeln!(out, "sizes = {}", join(&self.sizes));
        let _ = writeln!(out, "r = {}", join(&self.sample_sizes));
        if !self.omegas.is_empty() {
            let _ = writeln!(out, "omegas = {}", join(&self.omegas));
        }
        let _ = writeln!(out, "estimators = {}", join(&self.estimators));
        let _ = writeln!(out, "graphs = {}", self.graph_replicates);
        let _ = writeln!(out, "samples = {}", self.sample_replicates);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "seeds = {}", self.num_seeds);
        let hashing = match self.hashing {
            PlanHashing::Random => "random",
            PlanHashing::Injective => "injective",
        };
        let _ = writeln!(out, "hashing = {hashing}");
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, empty) in [
            ("families", self.families.is_empty()),
            ("lambdas", self.lambdas.is_empty()),
            ("sizes", self.sizes.is_empty()),
            ("r", self.sample_sizes.is_empty()),
            ("estimators", self.estimators.is_empty()),
        ] {
            if empty {
                return bad(format!("plan lists no {name}"));
            }
        }
        if self.graph_replicates == 0 || self.sample_replicates == 0 {
            return bad("replicate counts must be at least 1".into());
        }
        if let Some(l) = self.lambdas.iter().find(|&&l| !l.is_finite() || l < 1.0) {
            return bad(format!("lambda {l} must be a finite value >= 1"));
        }
        let min_n = *self.sizes.iter().min().expect("non-empty");
        let max_r = *self.sample_sizes.iter().max().expect("non-empty");
        if min_n < 2 || max_r > min_n {
            return bad(format!(
                "need 2 <= n and r <= n; got min n {min_n}, max r {max_r}"
            ));
        }
        if self.sample_sizes.contains(&0) {
            return bad("sample sizes must be positive".into());
        }
        let rds = self.estimators.iter().any(|&e| e != EstimatorKind::N1);
        if rds
            && (self.num_seeds == 0
                || self.num_seeds > *self.sample_sizes.iter().min().expect("non-empty"))
        {
            return bad(format!("need 1 <= seeds ({}) <= every r", self.num_seeds));
        }
        let multi_seed = self
            .estimators
            .iter()
            .any(|e| matches!(e, EstimatorKind::N3 | EstimatorKind::N3Psi));
        if multi_seed && self.num_seeds < 2 {
            return bad("n3 estimators need at least two seeds".into());
        }
        let hashed = self.estimators.iter().any(|e| e.is_hashed());
        if hashed && self.omegas.is_empty() {
            return bad("hashed estimators need omegas".into());
        }
        if self.omegas.contains(&0) {
            return bad("omegas must be positive".into());
        }
        if hashed && self.hashing == PlanHashing::Injective {
            let max_n = *self.sizes.iter().max().expect("non-empty") as u64;
            if let Some(o) = self.omegas.iter().find(|&&o| o < max_n) {
                return bad(format!("injective hashing needs omega >= n, got {o}"));
            }
        }
        Ok(())
    }

    /// Number of raw rows [`run_plan`] emits.
    pub fn run_count(&self) -> usize {
        let per_sample: usize = self
            .estimators
            .iter()
            .map(|e| if e.is_hashed() { self.omegas.len() } else { 1 })
            .sum();
        self.families.len()
            * self.lambdas.len()
            * self.sizes.len()
            * self.graph_replicates
            * self.sample_sizes.len()
            * self.sample_replicates
            * per_sample
    }
}

const KEYS: [&str; 11] = [
    "families",
    "lambdas",
    "sizes",
    "r",
    "omegas",
    "estimators",
    "graphs",
    "samples",
    "seed",
    "seeds",
    "hashing",
];

/// Stream tags keeping graph, sample and hash draws independent.
const TAG_GRAPH: u64 = 1;
const TAG_UNIFORM: u64 = 2;
const TAG_RDS: u64 = 3;
const TAG_HASH: u64 = 4;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream identified by `coords` under `master`.
pub fn stream_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |h, &c| splitmix64(h ^ splitmix64(c)))
}

pub fn stream_rng(master: u64, coords: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, coords))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRow {
    pub family: GraphFamily,
    pub lambda: f64,
    pub n: usize,
    pub r: usize,
    pub omega: Option<u64>,
    pub estimator: EstimatorKind,
    pub graph_idx: usize,
    pub sample_idx: usize,
    pub result: EstimateResult<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    /// All runs, failed ones included.
    pub count: usize,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub failure_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub family: GraphFamily,
    pub lambda: f64,
    pub n: usize,
    pub r: usize,
    pub omega: Option<u64>,
    pub estimator: EstimatorKind,
    pub summary: Summary,
}

fn median_of_sorted(xs: &[f64]) -> f64 {
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Median, Tukey hinges and extremes of the successful estimates, plus the
/// failure rate over all of them.
pub fn summarize(estimates: &[EstimateResult<f64>]) -> Result<Summary> {
    if estimates.is_empty() {
        return Err(Error::Precondition("summary of no estimates"));
    }
    let mut values: Vec<f64> = estimates
        .iter()
        .filter_map(|e| e.value().copied())
        .collect();
    values.sort_by(f64::total_cmp);
    let failure_rate = (estimates.len() - values.len()) as f64 / estimates.len() as f64;
    if values.is_empty() {
        return Ok(Summary {
            count: estimates.len(),
            median: None,
            q1: None,
            q3: None,
            min: None,
            max: None,
            failure_rate,
        });
    }
    let k = values.len();
    let (q1, q3) = if k == 1 {
        (values[0], values[0])
    } else {
        (
            median_of_sorted(&values[..k / 2]),
            median_of_sorted(&values[k - k / 2..]),
        )
    };
    Ok(Summary {
        count: estimates.len(),
        median: Some(median_of_sorted(&values)),
        q1: Some(q1),
        q3: Some(q3),
        min: values.first().copied(),
        max: values.last().copied(),
        failure_rate,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResults {
    pub raw: Vec<RawRow>,
    pub summary: Vec<SummaryRow>,
}

/// Sort key of a raw row: indices into the plan lists, then replicates.
type RowKey = (usize, usize, usize, usize, usize, usize, usize, usize);

/// Runs every cell of `plan` on the current rayon pool.
pub fn run_plan(plan: &ExperimentPlan) -> Result<ExperimentResults> {
    plan.validate()?;
    let mut graph_tasks = Vec::new();
    for fi in 0..plan.families.len() {
        for li in 0..plan.lambdas.len() {
            for ni in 0..plan.sizes.len() {
                for g in 0..plan.graph_replicates {
                    graph_tasks.push((fi, li, ni, g));
                }
            }
        }
    }
    let chunks: Vec<Vec<(RowKey, RawRow)>> = graph_tasks
        .par_iter()
        .map(|&(fi, li, ni, g)| run_graph(plan, fi, li, ni, g))
        .collect::<Result<_>>()?;
    let mut keyed: Vec<(RowKey, RawRow)> = chunks.into_iter().flatten().collect();
    keyed.sort_by_key(|(k, _)| *k);
    let raw: Vec<RawRow> = keyed.into_iter().map(|(_, row)| row).collect();
    let summary = summarize_rows(&raw)?;
    Ok(ExperimentResults { raw, summary })
}

fn run_graph(
    plan: &ExperimentPlan,
    fi: usize,
    li: usize,
    ni: usize,
    g: usize,
) -> Result<Vec<(RowKey, RawRow)>> {
    let (family, lambda, n) = (plan.families[fi], plan.lambdas[li], plan.sizes[ni]);
    let cell = [family.code(), lambda.to_bits(), n as u64, g as u64];
    let graph = family.generate(
        lambda,
        n,
        &mut stream_rng(plan.seed, &[&[TAG_GRAPH][..], &cell].concat()),
    )?;
    let mut jobs = Vec::new();
    for ri in 0..plan.sample_sizes.len() {
        for s in 0..plan.sample_replicates {
            jobs.push((ri, s));
        }
    }
    let rows: Vec<Vec<(RowKey, RawRow)>> = jobs
        .par_iter()
        .map(|&(ri, s)| {
            let r = plan.sample_sizes[ri];
            let coords = [&cell[..], &[r as u64, s as u64]].concat();
            let outcomes = run_sample(plan, &graph, r, &coords)?;
            Ok(outcomes
                .into_iter()
                .map(|(ei, oi, result)| {
                    let row = RawRow {
                        family,
                        lambda,
                        n,
                        r,
                        omega: oi.map(|oi| plan.omegas[oi]),
                        estimator: plan.estimators[ei],
                        graph_idx: g,
                        sample_idx: s,
                        result,
                    };
                    ((fi, li, ni, ri, ei, oi.map_or(0, |o| o + 1), g, s), row)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// `(estimator index, omega index, result)`.
type Outcome = (usize, Option<usize>, EstimateResult<f64>);

/// All estimator outcomes on one sample.
fn run_sample(
    plan: &ExperimentPlan,
    graph: &MultiGraph,
    r: usize,
    coords: &[u64],
) -> Result<Vec<Outcome>> {
    let tagged =
        |tag: u64, extra: &[u64]| stream_rng(plan.seed, &[&[tag][..], coords, extra].concat());
    let mut out = Vec::new();
    if let Some(ei) = plan.estimators.iter().position(|&e| e == EstimatorKind::N1) {
        let t = uniform_sample(graph, r, &mut tagged(TAG_UNIFORM, &[]))?;
        out.push((ei, None, n1(&Survey::uniform(graph, &t)?)?));
    }
    if plan.estimators.iter().all(|&e| e == EstimatorKind::N1) {
        return Ok(out);
    }
    let cfg = RdsConfig {
        num_seeds: plan.num_seeds,
        ..RdsConfig::new(r)
    };
    let sample = rds_capture(graph, &cfg, &mut tagged(TAG_RDS, &[]))?;
    let survey = sample.to_survey();
    let mut hashed = Vec::new();
    for (ei, &kind) in plan.estimators.iter().enumerate() {
        match kind {
            EstimatorKind::N1 => {}
            EstimatorKind::N2 => out.push((ei, None, n2(&survey)?)),
            EstimatorKind::N3 => out.push((ei, None, n3(&survey)?)),
            EstimatorKind::N2Psi | EstimatorKind::N3Psi => hashed.push((ei, kind)),
        }
    }
    if hashed.is_empty() {
        return Ok(out);
    }
    for (oi, &omega) in plan.omegas.iter().enumerate() {
        let space = match plan.hashing {
            PlanHashing::Random => HashSpace::random_function(omega)?,
            PlanHashing::Injective => HashSpace::injective(omega)?,
        };
        let codes = assign_hashes(graph.n(), &space, &mut tagged(TAG_HASH, &[omega]))?;
        let hs = hash_survey(&survey, &codes)?;
        for &(ei, kind) in &hashed {
            let result = if kind == EstimatorKind::N2Psi {
                estimate_n2_psi(&hs, omega)?
            } else {
                estimate_n3_psi(&hs, omega)?
            };
            out.push((ei, Some(oi), result));
        }
    }
    Ok(out)
}

/// One summary per contiguous run of rows sharing
/// `(family, lambda, n, r, omega, estimator)`.
pub fn summarize_rows(rows: &[RawRow]) -> Result<Vec<SummaryRow>> {
    let same_cell = |a: &RawRow, b: &RawRow| {
        a.family == b.family
            && a.lambda.to_bits() == b.lambda.to_bits()
            && a.n == b.n
            && a.r == b.r
            && a.omega == b.omega
            && a.estimator == b.estimator
    };
    rows.chunk_by(same_cell)
        .map(|cell| {
            let first = &cell[0];
            let results: Vec<_> = cell.iter().map(|row| row.result).collect();
            Ok(SummaryRow {
                family: first.family,
                lambda: first.lambda,
                n: first.n,
                r: first.r,
                omega: first.omega,
                estimator: first.estimator,
                summary: summarize(&results)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailurePoint {
    pub estimator: EstimatorKind,
    pub r: usize,
    pub n: usize,
    /// Mean of the per-cell failure rates over families, `λ` and `|Ω|`.
    pub mean_failure_rate: f64,
    pub cells: usize,
}

/// Mean failure rate per `(estimator, r, n)`, sorted by those keys.
pub fn failure_curve(summary: &[SummaryRow]) -> Vec<FailurePoint> {
    let mut groups: BTreeMap<(EstimatorKind, usize, usize), Vec<f64>> = BTreeMap::new();
    for row in summary {
        groups
            .entry((row.estimator, row.r, row.n))
            .or_default()
            .push(row.summary.failure_rate);
    }
    groups
        .into_iter()
        .map(|((estimator, r, n), rates)| FailurePoint {
            estimator,
            r,
            n,
            mean_failure_rate: rates.iter().sum::<f64>() / rates.len() as f64,
            cells: rates.len(),
        })
        .collect()
}

pub const RAW_HEADER: [&str; 11] = [
    "family",
    "lambda",
    "n",
    "r",
    "omega",
    "estimator",
    "graph_idx",
    "sample_idx",
    "estimate",
    "failed",
    "failure_cause",
];

pub const SUMMARY_HEADER: [&str; 13] = [
    "family",
    "lambda",
    "n",
    "r",
    "omega",
    "estimator",
    "count",
    "median",
    "q1",
    "q3",
    "min",
    "max",
    "failure_rate",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub fn write_raw_csv<W: Write>(rows: &[RawRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RAW_HEADER)?;
    for row in rows {
        w.write_record([
            row.family.to_string(),
            row.lambda.to_string(),
            row.n.to_string(),
            row.r.to_string(),
            opt(row.omega),
            row.estimator.to_string(),
            row.graph_idx.to_string(),
            row.sample_idx.to_string(),
            opt(row.result.value()),
            row.result.is_failed().to_string(),
            opt(row.result.failure_cause()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        let s = &row.summary;
        w.write_record([
            row.family.to_string(),
            row.lambda.to_string(),
            row.n.to_string(),
            row.r.to_string(),
            opt(row.omega),
            row.estimator.to_string(),
            s.count.to_string(),
            opt(s.median),
            opt(s.q1),
            opt(s.q3),
            opt(s.min),
            opt(s.max),
            s.failure_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_raw_csv<Rd: Read>(reader: Rd, path: &Path) -> Result<Vec<RawRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    if rdr.headers()?.iter().ne(RAW_HEADER) {
        return Err(err(1, "unexpected raw CSV header".into()));
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let field = |j: usize| record.get(j).unwrap_or("");
        fn num<T: std::str::FromStr>(
            s: &str,
            what: &str,
            line: usize,
            err: &dyn Fn(usize, String) -> Error,
        ) -> Result<T> {
            s.parse()
                .map_err(|_| err(line, format!("bad {what} {s:?}")))
        }
        let omega = match field(4) {
            "" => None,
            s => Some(num(s, "omega", line, &err)?),
        };
        let result = match field(9) {
            "false" => EstimateResult::Estimate(num(field(8), "estimate", line, &err)?),
            "true" => {
                EstimateResult::Failed(num::<FailureCause>(field(10), "failure cause", line, &err)?)
            }
            s => return Err(err(line, format!("bad failed flag {s:?}"))),
        };
        rows.push(RawRow {
            family: num(field(0), "family", line, &err)?,
            lambda: num(field(1), "lambda", line, &err)?,
            n: num(field(2), "n", line, &err)?,
            r: num(field(3), "r", line, &err)?,
            omega,
            estimator: num(field(5), "estimator", line, &err)?,
            graph_idx: num(field(6), "graph_idx", line, &err)?,
            sample_idx: num(field(7), "sample_idx", line, &err)?,
            result,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(v: f64) -> EstimateResult<f64> {
        EstimateResult::Estimate(v)
    }

    #[test]
    fn tukey_hinges() {
        let s = summarize(&[5.0, 1.0, 4.0, 2.0, 3.0].map(est)).unwrap();
        assert_eq!((s.median, s.q1, s.q3), (Some(3.0), Some(1.5), Some(4.5)));
        assert_eq!((s.min, s.max, s.count), (Some(1.0), Some(5.0), 5));
        let s = summarize(&[1.0, 2.0, 3.0, 4.0].map(est)).unwrap();
        assert_eq!((s.median, s.q1, s.q3), (Some(2.5), Some(1.5), Some(3.5)));
        let s = summarize(&[est(7.0)]).unwrap();
        assert_eq!((s.median, s.q1, s.q3), (Some(7.0), Some(7.0), Some(7.0)));
    }

    #[test]
    fn failures_counted_but_not_ranked() {
        let mut results: Vec<_> = (1..=7).map(|v| est(v as f64)).collect();
        results.extend([EstimateResult::Failed(FailureCause::ZeroMatches); 3]);
        let s = summarize(&results).unwrap();
        assert_eq!(s.failure_rate, 0.3);
        assert_eq!(s.median, Some(4.0));
        assert_eq!(s.count, 10);
        let s = summarize(&[EstimateResult::Failed(FailureCause::NoRoot)]).unwrap();
        assert_eq!((s.failure_rate, s.median), (1.0, None));
        assert!(summarize(&[]).is_err());
    }

    fn tiny_plan() -> ExperimentPlan {
        ExperimentPlan::parse(
            "families = poisson\nlambdas = 4\nsizes = 300\nr = 60\nestimators = n2\ngraphs = 2\nsamples = 3\nseed = 5\n",
            Path::new("tiny.plan"),
        )
        .unwrap()
    }

    #[test]
    fn tiny_plan_counts() {
        let plan = tiny_plan();
        assert_eq!(plan.run_count(), 6);
        let res = run_plan(&plan).unwrap();
        assert_eq!(res.raw.len(), 6);
        assert_eq!(res.summary.len(), 1);
        assert_eq!(res.summary[0].summary.count, 6);
    }

    #[test]
    fn full_grid_run_count() {
        let plan = ExperimentPlan {
            families: GraphFamily::ALL.to_vec(),
            lambdas: vec![3.0, 10.0, 30.0],
            sizes: vec![5000, 10_000, 20_000, 40_000],
            sample_sizes: vec![250, 500, 750],
            omegas: vec![],
            estimators: vec![EstimatorKind::N1, EstimatorKind::N2],
            graph_replicates: 30,
            sample_replicates: 30,
            seed: 0,
            num_seeds: 7,
            hashing: PlanHashing::Random,
        };
        plan.validate().unwrap();
        assert_eq!(plan.run_count(), 324_000);
    }

    #[test]
    fn plan_text_round_trips() {
        let text = "families = lognormal, ba\nlambdas = 3, 10.5\nsizes = 1000\nr = 100, 200\n\
                    omegas = 2000\nestimators = n1, n3psi\ngraphs = 1\nsamples = 2\nseed = 9\nseeds = 5 # comment\n";
        let plan = ExperimentPlan::parse(text, Path::new("p")).unwrap();
        assert_eq!(plan.num_seeds, 5);
        assert_eq!(
            ExperimentPlan::parse(&plan.to_plan_string(), Path::new("q")).unwrap(),
            plan
        );
    }

    #[test]
    fn plan_errors() {
        let base = "families = poisson\nlambdas = 4\nsizes = 300\nr = 60\nestimators = n2\ngraphs = 1\nsamples = 1\nseed = 1\n";
        for (extra, needle) in [
            ("bogus = 1\n", "unknown key"),
            ("seed = 2\n", "duplicate key"),
            ("estimators2\n", "expected key = value"),
        ] {
            let e = ExperimentPlan::parse(&format!("{base}{extra}"), Path::new("p")).unwrap_err();
            assert!(e.to_string().contains(needle), "{e}");
        }
        let e =
            ExperimentPlan::parse(&base.replace("r = 60", "r = 600"), Path::new("p")).unwrap_err();
        assert!(e.to_string().contains("r <= n"), "{e}");
        let e = ExperimentPlan::parse(&base.replace("n2", "n2psi"), Path::new("p")).unwrap_err();
        assert!(e.to_string().contains("omegas"), "{e}");
        let e = ExperimentPlan::parse(
            &base.replace("lambdas = 4", "lambdas = four"),
            Path::new("p"),
        )
        .unwrap_err();
        assert!(e.to_string().contains("p:2"), "{e}");
    }

    #[test]
    fn raw_csv_round_trip_and_resummary() {
        let mut plan = tiny_plan();
        plan.estimators = EstimatorKind::ALL.to_vec();
        plan.omegas = vec![500, 5000];
        let res = run_plan(&plan).unwrap();
        assert_eq!(res.raw.len(), plan.run_count());
        let mut buf = Vec::new();
        write_raw_csv(&res.raw, &mut buf).unwrap();
        let back = read_raw_csv(&buf[..], Path::new("raw.csv")).unwrap();
        assert_eq!(back, res.raw);
        assert_eq!(summarize_rows(&back).unwrap(), res.summary);
    }

    #[test]
    fn failure_curve_means_cells() {
        let row = |n: usize, rate: f64| SummaryRow {
            family: GraphFamily::ConfigPoisson,
            lambda: 3.0,
            n,
            r: 250,
            omega: None,
            estimator: EstimatorKind::N2,
            summary: Summary {
                count: 10,
                median: None,
                q1: None,
                q3: None,
                min: None,
                max: None,
                failure_rate: rate,
            },
        };
        let curve = failure_curve(&[row(5000, 0.0), row(5000, 0.2), row(40_000, 0.5)]);
        assert_eq!(curve.len(), 2);
        assert!((curve[0].mean_failure_rate - 0.1).abs() < 1e-15);
        assert_eq!(
            (curve[1].n, curve[1].mean_failure_rate, curve[1].cells),
            (40_000, 0.5, 1)
        );
    }

    #[test]
    fn streams_differ_by_coordinate() {
        assert_ne!(stream_seed(1, &[1, 2]), stream_seed(1, &[2, 1]));
        assert_ne!(stream_seed(1, &[1]), stream_seed(2, &[1]));
        assert_eq!(stream_seed(7, &[3, 4]), stream_seed(7, &[3, 4]));
    }
}
