//! Plaintext size estimators.
//!
//! * `n1`: uniform sample `T`, `|T| · ⟨R(T,∅)⟩ / ⟨M(T,∅)⟩`.
//! * `n2`: RDS sample `S`, the same ratio over free ends, scaled by
//!   `(d(S) − 1) / d̃(S)` to undo the degree bias of referral sampling.
//! * `n3`: like `n2` but counts only matches that cross between referral
//!   components, which keeps clustered recruitment chains from inflating the
//!   match count.
//!
//! Every estimator reads a [`Survey`] only and is generic over [`Scalar`], so
//! the same formula can be evaluated in floating point or exactly.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{arithmetic_mean, harmonic_mean, MultiGraph, Vertex};
use crate::sampling::RdsSample;
use crate::scalar::Scalar;
use crate::survey::Survey;

/// Why an estimate is undefined for a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailureCause {
    ZeroMatches,
    ZeroCrossMatches,
    DegenerateDegrees,
    NoRoot,
}

impl FailureCause {
    pub fn name(self) -> &'static str {
        match self {
            FailureCause::ZeroMatches => "ZeroMatches",
            FailureCause::ZeroCrossMatches => "ZeroCrossMatches",
            FailureCause::DegenerateDegrees => "DegenerateDegrees",
            FailureCause::NoRoot => "NoRoot",
        }
    }
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FailureCause {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            FailureCause::ZeroMatches,
            FailureCause::ZeroCrossMatches,
            FailureCause::DegenerateDegrees,
            FailureCause::NoRoot,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown failure cause {s:?}")))
    }
}

/// Outcome of one estimator on one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimateResult<T> {
    Estimate(T),
    Failed(FailureCause),
}

impl<T> EstimateResult<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            EstimateResult::Estimate(v) => Some(v),
            EstimateResult::Failed(_) => None,
        }
    }

    pub fn failure_cause(&self) -> Option<FailureCause> {
        match self {
            EstimateResult::Estimate(_) => None,
            EstimateResult::Failed(c) => Some(*c),
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, EstimateResult::Failed(_))
    }

    pub fn map<U, F: FnOnce(T) -> U>(self, f: F) -> EstimateResult<U> {
        match self {
            EstimateResult::Estimate(v) => EstimateResult::Estimate(f(v)),
            EstimateResult::Failed(c) => EstimateResult::Failed(c),
        }
    }
}

impl<T: fmt::Display> fmt::Display for EstimateResult<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimateResult::Estimate(v) => write!(f, "{v}"),
            EstimateResult::Failed(c) => write!(f, "failed ({c})"),
        }
    }
}

/// The five estimators the harness and CLI can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    N1,
    N2,
    N3,
    N2Psi,
    N3Psi,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 5] = [
        EstimatorKind::N1,
        EstimatorKind::N2,
        EstimatorKind::N3,
        EstimatorKind::N2Psi,
        EstimatorKind::N3Psi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::N1 => "n1",
            EstimatorKind::N2 => "n2",
            EstimatorKind::N3 => "n3",
            EstimatorKind::N2Psi => "n2psi",
            EstimatorKind::N3Psi => "n3psi",
        }
    }

    /// Whether the estimator works on hashed codes.
    pub fn is_hashed(self) -> bool {
        matches!(self, EstimatorKind::N2Psi | EstimatorKind::N3Psi)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-'], "");
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator {s:?}")))
    }
}

/// `(d(S), d̃(S))`, or `None` when some reported degree is zero or
/// `d(S) <= 1`.
pub(crate) fn degree_guard<T: Scalar>(degrees: &[u64]) -> Result<Option<(T, T)>> {
    if degrees.is_empty() {
        return Err(Error::Precondition("empty sample"));
    }
    if degrees.contains(&0) {
        return Ok(None);
    }
    let mean: T = arithmetic_mean(degrees)?;
    if mean <= T::one() {
        return Ok(None);
    }
    Ok(Some((mean, harmonic_mean(degrees)?)))
}

fn positive<T: Scalar>(value: T) -> EstimateResult<T> {
    if value > T::zero() {
        EstimateResult::Estimate(value)
    } else {
        EstimateResult::Failed(FailureCause::DegenerateDegrees)
    }
}

/// `|T| · ⟨R(T,∅)⟩ / ⟨M(T,∅)⟩` on a survey of a uniform sample.
pub fn n1<T: Scalar, K: Ord + Clone>(survey: &Survey<K>) -> Result<EstimateResult<T>> {
    if survey.is_empty() {
        return Err(Error::Precondition("empty sample"));
    }
    let m = survey.match_count();
    if m == 0 {
        return Ok(EstimateResult::Failed(FailureCause::ZeroMatches));
    }
    let size = T::from_count(survey.len() as u64);
    Ok(EstimateResult::Estimate(
        size * T::from_count(survey.free_end_count()) / T::from_count(m),
    ))
}

/// `[(d(S) − 1) / d̃(S)] · |S| · ⟨R(S,F)⟩ / ⟨M(S,F)⟩`.
pub fn n2<T: Scalar, K: Ord + Clone>(survey: &Survey<K>) -> Result<EstimateResult<T>> {
    let Some((mean, harmonic)) = degree_guard::<T>(&survey.degrees())? else {
        return Ok(EstimateResult::Failed(FailureCause::DegenerateDegrees));
    };
    let m = survey.match_count();
    if m == 0 {
        return Ok(EstimateResult::Failed(FailureCause::ZeroMatches));
    }
    let prefactor = (mean - T::one()) / harmonic;
    let size = T::from_count(survey.len() as u64);
    Ok(positive(
        prefactor * size * T::from_count(survey.free_end_count()) / T::from_count(m),
    ))
}

/// `Σ_s [(d(C̃(s)) − 1) / d̃(S)] · |C̃(s)| · ⟨R(C(s),F)⟩  /  Σ_s ⟨X(s,F,γ)⟩`
/// where `C(s)` is the referral component of seed `s` and `C̃(s)` the rest of
/// the sample. Needs at least two components.
pub fn n3<T: Scalar, K: Ord + Clone>(survey: &Survey<K>) -> Result<EstimateResult<T>> {
    let components = survey.components();
    if components.len() < 2 {
        return Err(Error::Precondition("n3 needs at least two seeds"));
    }
    let degrees = survey.degrees();
    let Some((_, harmonic)) = degree_guard::<T>(&degrees)? else {
        return Ok(EstimateResult::Failed(FailureCause::DegenerateDegrees));
    };
    let numerator = n3_numerator(survey, &harmonic)?;
    let cross: u64 = components
        .keys()
        .map(|&c| survey.cross_matches(c).cardinality())
        .sum();
    if cross == 0 {
        return Ok(EstimateResult::Failed(FailureCause::ZeroCrossMatches));
    }
    Ok(positive(numerator / T::from_count(cross)))
}

/// `Σ_s [(d(C̃(s)) − 1) / d̃(S)] · |C̃(s)| · ⟨R(C(s),F)⟩`; shared with the
/// hashed variant, where `⟨C̃^ψ(s)⟩ = |C̃(s)|` and `⟨R^ψ⟩ = ⟨R⟩`.
pub(crate) fn n3_numerator<T: Scalar, K: Ord + Clone>(
    survey: &Survey<K>,
    harmonic: &T,
) -> Result<T> {
    let mut numerator = T::zero();
    for (&c, members) in &survey.components() {
        let outside: Vec<u64> = survey
            .respondents()
            .iter()
            .filter(|r| r.component != c)
            .map(|r| r.degree)
            .collect();
        let outside_mean: T = arithmetic_mean(&outside)?;
        numerator = numerator
            + (outside_mean - T::one()) / harmonic.clone()
                * T::from_count(outside.len() as u64)
                * T::from_count(survey.free_end_count_of(members));
    }
    Ok(numerator)
}

/// `n1` on the uniform sample `t` of `g`.
pub fn estimate_n1(g: &MultiGraph, t: &[Vertex]) -> Result<EstimateResult<f64>> {
    let mut sorted = t.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(
            "uniform sample contains a vertex twice".into(),
        ));
    }
    n1(&Survey::uniform(g, t)?)
}

pub fn estimate_n2(sample: &RdsSample) -> Result<EstimateResult<f64>> {
    n2(&sample.to_survey())
}

pub fn estimate_n3(sample: &RdsSample) -> Result<EstimateResult<f64>> {
    n3(&sample.to_survey())
}
