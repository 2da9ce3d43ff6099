//! Hashed identities and the collision-corrected estimators `n2^ψ`, `n3^ψ`.
//!
//! Subjects report a code `ψ(v) ∈ Ω` for themselves and each alter instead of
//! an identity. Codes collide, so an observed code match is a true match only
//! with some probability. For a candidate population size `n'` the expected
//! number of true matches among the observed ones is
//!
//! ```text
//! m̂(n') = Σ_{y ∈ M^ψ} Σ_{w ∈ ψ⁻¹(y) ∩ S} 1 / ((n'−1)/|Ω| · d̃(S)/(d(w)−1) + 1)
//! ```
//!
//! and the estimate is the fixed point `n' = f(n')` of the plaintext formula
//! with `⟨M⟩` replaced by `m̂(n')` (cross-component matches and `x̂` for
//! `n3^ψ`). `m̂` decreases in `n'`, so the fixed point is found by bisection.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{degree_guard, n3_numerator, EstimateResult, FailureCause};
use crate::graph::Vertex;
use crate::sampling::RdsSample;
use crate::scalar::{real, RealScalar};
use crate::survey::Survey;

pub type Code = u64;

/// A survey whose identities are codes.
pub type HashedSample = Survey<Code>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashMode {
    /// Independent uniform codes; collisions allowed.
    RandomFunction,
    /// Distinct codes.
    Injective,
    /// Codes derived from the last `k` digits of random phone numbers.
    Telefunken(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HashSpace {
    size: u64,
    mode: HashMode,
}

impl HashSpace {
    pub fn random_function(size: u64) -> Result<Self> {
        Self::checked(size, HashMode::RandomFunction)
    }

    pub fn injective(size: u64) -> Result<Self> {
        Self::checked(size, HashMode::Injective)
    }

    /// `4^k` codes of `2k` bits each.
    pub fn telefunken(k: u32) -> Result<Self> {
        if k == 0 || k > 31 {
            return Err(Error::InvalidParameter(format!(
                "telefunken digit count {k} outside 1..=31"
            )));
        }
        Self::checked(1 << (2 * k), HashMode::Telefunken(k))
    }

    fn checked(size: u64, mode: HashMode) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter(
                "hash space must be non-empty".into(),
            ));
        }
        Ok(HashSpace { size, mode })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn mode(&self) -> HashMode {
        self.mode
    }
}

/// Draws a code for each of the `n` vertices.
pub fn assign_hashes<R: Rng + ?Sized>(
    n: usize,
    space: &HashSpace,
    rng: &mut R,
) -> Result<Vec<Code>> {
    match space.mode {
        HashMode::RandomFunction => Ok((0..n).map(|_| rng.random_range(0..space.size)).collect()),
        HashMode::Injective => {
            if space.size < n as u64 {
                return Err(Error::HashSpaceTooSmall {
                    omega: space.size,
                    n,
                });
            }
            let size = usize::try_from(space.size).unwrap_or(usize::MAX);
            Ok(rand::seq::index::sample(rng, size, n)
                .into_iter()
                .map(|c| c as Code)
                .collect())
        }
        HashMode::Telefunken(k) => {
            let mut digits = String::with_capacity(k as usize);
            (0..n)
                .map(|_| {
                    digits.clear();
                    digits.extend((0..k).map(|_| char::from(b'0' + rng.random_range(0..10u8))));
                    telefunken_encode(&digits, k)
                })
                .collect()
        }
    }
}

/// Encodes the last `k` digits of `digits`, last digit first, as bit pairs
/// `(odd, 5..=9)`. `"27"` with `k = 2` gives `0b1100`.
pub fn telefunken_encode(digits: &str, k: u32) -> Result<Code> {
    if k > 31 {
        return Err(Error::InvalidDigits(format!(
            "{k} digits do not fit a 64-bit code"
        )));
    }
    if let Some(c) = digits.chars().find(|c| !c.is_ascii_digit()) {
        return Err(Error::InvalidDigits(format!("{digits:?} contains {c:?}")));
    }
    if digits.len() < k as usize {
        return Err(Error::InvalidDigits(format!(
            "{digits:?} has fewer than {k} digits"
        )));
    }
    Ok(digits.bytes().rev().take(k as usize).fold(0, |code, b| {
        let d = b - b'0';
        (code << 2) | (Code::from(d % 2) << 1) | Code::from(d >= 5)
    }))
}

/// Replaces identities in an RDS survey by their codes.
pub fn hashed_view(sample: &RdsSample, codes: &[Code]) -> Result<HashedSample> {
    hash_survey(&sample.to_survey(), codes)
}

pub fn hash_survey(survey: &Survey<Vertex>, codes: &[Code]) -> Result<HashedSample> {
    for r in survey.respondents() {
        if let Some(&v) = std::iter::once(&r.id)
            .chain(r.free_alters.iter().map(|(v, _)| v))
            .find(|&&v| v >= codes.len())
        {
            return Err(Error::MissingCode(v));
        }
    }
    Ok(survey.map_ids(|&v| codes[v]))
}

/// Probability that a code match on sampled subject `w` is a true tie:
/// `1 / ((n'−1)/|Ω| · d̃(S)/(d(w)−1) + 1)`, and 0 when `d(w) <= 1`.
pub fn collision_prob<T: RealScalar>(n_prime: T, omega: u64, d_tilde: T, d_w: u64) -> T {
    if d_w <= 1 {
        return T::zero();
    }
    let collisions =
        (n_prime - T::one()) / real::<T>(omega as f64) * d_tilde / real::<T>((d_w - 1) as f64);
    T::one() / (collisions + T::one())
}

/// `m̂(n')`, evaluated term by term.
pub fn m_hat<T: RealScalar>(hs: &HashedSample, n_prime: T, omega: u64) -> Result<T> {
    let d_tilde = harmonic(hs)?;
    let ids = hs.subject_ids();
    let mut total = T::zero();
    for r in hs.respondents() {
        for (y, &a) in r.free_alters.iter() {
            let occurrences = a.min(ids.count(y));
            for w in hs.respondents().iter().filter(|w| w.id == *y) {
                total = total
                    + real::<T>(occurrences as f64)
                        * collision_prob(n_prime, omega, d_tilde, w.degree);
            }
        }
    }
    Ok(total)
}

/// `x̂(s, n')` for the component of seed index `component`, term by term.
pub fn x_hat<T: RealScalar>(
    hs: &HashedSample,
    component: usize,
    n_prime: T,
    omega: u64,
) -> Result<T> {
    let d_tilde = harmonic(hs)?;
    let outside = hs.complement_ids(component);
    let mut total = T::zero();
    for r in hs.respondents().iter().filter(|r| r.component == component) {
        for (y, &a) in r.free_alters.iter() {
            let occurrences = a.min(outside.count(y));
            for w in hs
                .respondents()
                .iter()
                .filter(|w| w.component != component && w.id == *y)
            {
                total = total
                    + real::<T>(occurrences as f64)
                        * collision_prob(n_prime, omega, d_tilde, w.degree);
            }
        }
    }
    Ok(total)
}

fn harmonic<T: RealScalar>(hs: &HashedSample) -> Result<T> {
    crate::graph::harmonic_mean(&hs.degrees())
}

/// Degree histogram of the (match occurrence, candidate subject) pairs that
/// `m̂` or `Σ_s x̂(s)` sums over: entry `d` counts pairs whose candidate has
/// reported degree `d`.
type PairWeights = BTreeMap<u64, u64>;

/// code -> (degree -> subjects with that code and degree)
fn code_degrees<'a, I: Iterator<Item = &'a crate::survey::Respondent<Code>>>(
    respondents: I,
) -> HashMap<Code, BTreeMap<u64, u64>> {
    let mut out: HashMap<Code, BTreeMap<u64, u64>> = HashMap::new();
    for r in respondents {
        *out.entry(r.id).or_default().entry(r.degree).or_default() += 1;
    }
    out
}

fn match_weights(hs: &HashedSample) -> PairWeights {
    let by_code = code_degrees(hs.respondents().iter());
    let mut weights = PairWeights::new();
    for r in hs.respondents() {
        for (y, &a) in r.free_alters.iter() {
            let Some(candidates) = by_code.get(y) else {
                continue;
            };
            let occurrences = a.min(candidates.values().sum());
            for (&d, &count) in candidates {
                *weights.entry(d).or_default() += occurrences * count;
            }
        }
    }
    weights
}

fn cross_weights(hs: &HashedSample) -> PairWeights {
    let mut weights = PairWeights::new();
    for c in hs.components().into_keys() {
        let outside = code_degrees(hs.respondents().iter().filter(|r| r.component != c));
        for r in hs.respondents().iter().filter(|r| r.component == c) {
            for (y, &a) in r.free_alters.iter() {
                let Some(candidates) = outside.get(y) else {
                    continue;
                };
                let occurrences = a.min(candidates.values().sum());
                for (&d, &count) in candidates {
                    *weights.entry(d).or_default() += occurrences * count;
                }
            }
        }
    }
    weights
}

fn expected_true<T: RealScalar>(weights: &PairWeights, n_prime: T, omega: u64, d_tilde: T) -> T {
    weights.iter().fold(T::zero(), |acc, (&d, &w)| {
        acc + real::<T>(w as f64) * collision_prob(n_prime, omega, d_tilde, d)
    })
}

/// Root of `f(n') − n'` above `lower`, where `f` is increasing and concave.
///
/// The bracket starts at `[lower, 10·lower]` and doubles its upper end until
/// the sign changes or it passes `10^12`; bisection then runs until the
/// bracket cannot be split further in `T`.
pub fn solve_fixed_point<T: RealScalar, F: Fn(T) -> T>(f: F, lower: T) -> Option<T> {
    bisect(&f, lower).map(|(x, _)| x)
}

/// Float bisection for [`solve_fixed_point`]. The flag tells whether
/// `f(n') − n'` is positive below the root.
fn bisect<T: RealScalar, F: Fn(T) -> T>(f: &F, lower: T) -> Option<(T, bool)> {
    let g = |x: T| f(x) - x;
    let mut lo = lower.max(T::one());
    let mut g_lo = g(lo);
    if !g_lo.is_finite() {
        return None;
    }
    let lo_positive = g_lo > T::zero();
    if g_lo == T::zero() {
        return Some((lo, lo_positive));
    }
    let limit = real::<T>(1e12);
    let mut hi = lo * real::<T>(10.0);
    let mut g_hi = g(hi);
    while g_hi.is_finite() && g_hi != T::zero() && (g_hi > T::zero()) == lo_positive {
        (lo, g_lo) = (hi, g_hi);
        hi = hi + hi;
        if hi > limit {
            return None;
        }
        g_hi = g(hi);
    }
    if !g_hi.is_finite() {
        return None;
    }
    if g_hi == T::zero() {
        return Some((hi, lo_positive));
    }
    let two = real::<T>(2.0);
    loop {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if !g_mid.is_finite() {
            return None;
        }
        if g_mid == T::zero() {
            return Some((mid, lo_positive));
        }
        if (g_mid > T::zero()) == lo_positive {
            (lo, g_lo) = (mid, g_mid);
        } else {
            (hi, g_hi) = (mid, g_mid);
        }
    }
    Some((if g_lo.abs() <= g_hi.abs() { lo } else { hi }, lo_positive))
}

fn to_exact<T: RealScalar>(x: T) -> BigRational {
    BigRational::from_float(x.to_f64().expect("finite root")).expect("finite root")
}

/// Rounding makes the float `g` vanish or flip sign on several neighbouring
/// floats around the root. This re-brackets `x` using the exact sign of `g`
/// at float points and returns the bracket end with the smaller exact `|g|`,
/// so a root representable in `T` comes back exactly.
fn refine<T: RealScalar, G: Fn(&BigRational) -> BigRational>(
    x: T,
    lo_positive: bool,
    exact_g: G,
) -> T {
    let g_x = exact_g(&to_exact(x));
    if g_x.is_zero() {
        return x;
    }
    let root_above = g_x.is_positive() == lo_positive;
    let mut near = (x, g_x);
    let mut step = (x.abs() * T::epsilon()).max(T::min_positive_value());
    let mut far = None;
    for _ in 0..64 {
        let y = if root_above { x + step } else { x - step };
        let g_y = exact_g(&to_exact(y));
        if g_y.is_zero() {
            return y;
        }
        if g_y.is_positive() != near.1.is_positive() {
            far = Some((y, g_y));
            break;
        }
        near = (y, g_y);
        step = step + step;
    }
    let Some(mut far) = far else { return x };
    let two = real::<T>(2.0);
    loop {
        let mid = near.0 + (far.0 - near.0) / two;
        if mid == near.0 || mid == far.0 {
            break;
        }
        let g_mid = exact_g(&to_exact(mid));
        if g_mid.is_zero() {
            return mid;
        }
        if g_mid.is_positive() == near.1.is_positive() {
            near = (mid, g_mid);
        } else {
            far = (mid, g_mid);
        }
    }
    if near.1.abs() <= far.1.abs() {
        near.0
    } else {
        far.0
    }
}

/// `f(n') − n'` in exact arithmetic.
struct ExactGap {
    numerator: BigRational,
    /// `(W_d, d̃(S) / (|Ω| (d − 1)))` for every weight with `d >= 2`.
    terms: Vec<(BigRational, BigRational)>,
}

impl ExactGap {
    fn new(
        numerator: BigRational,
        d_tilde: &BigRational,
        weights: &PairWeights,
        omega: u64,
    ) -> Self {
        let omega = BigRational::from_integer(omega.into());
        let terms = weights
            .iter()
            .filter(|&(&d, _)| d >= 2)
            .map(|(&d, &w)| {
                let scale = d_tilde / (&omega * BigRational::from_integer((d - 1).into()));
                (BigRational::from_integer(w.into()), scale)
            })
            .collect();
        ExactGap { numerator, terms }
    }

    fn eval(&self, n: &BigRational) -> BigRational {
        let shifted = n - BigRational::one();
        let expected = self
            .terms
            .iter()
            .fold(BigRational::zero(), |acc, (w, scale)| {
                acc + w / (&shifted * scale + BigRational::one())
            });
        &self.numerator / expected - n
    }
}

/// `|A| / Σ 1/d`, exactly.
fn exact_harmonic(degrees: &[u64]) -> BigRational {
    let mut counts = BTreeMap::<u64, u64>::new();
    for &d in degrees {
        *counts.entry(d).or_default() += 1;
    }
    let reciprocal_sum = counts.iter().fold(BigRational::zero(), |acc, (&d, &c)| {
        acc + BigRational::new(c.into(), d.into())
    });
    BigRational::from_integer(degrees.len().into()) / reciprocal_sum
}

fn solved<T: RealScalar>(root: Option<T>) -> EstimateResult<T> {
    match root {
        Some(v) if v.is_finite() && v > T::zero() => EstimateResult::Estimate(v),
        _ => EstimateResult::Failed(FailureCause::NoRoot),
    }
}

/// `n2^ψ`: fixed point of `[(d(S)−1)/d̃(S)] · |S| · ⟨R^ψ(S,F)⟩ / m̂(n')`.
pub fn estimate_n2_psi<T: RealScalar>(hs: &HashedSample, omega: u64) -> Result<EstimateResult<T>> {
    let degrees = hs.degrees();
    let Some((mean, d_tilde)) = degree_guard::<T>(&degrees)? else {
        return Ok(EstimateResult::Failed(FailureCause::DegenerateDegrees));
    };
    let weights = match_weights(hs);
    if weights.is_empty() {
        return Ok(EstimateResult::Failed(FailureCause::ZeroMatches));
    }
    let scale = |n: u64| real::<T>(n as f64);
    let numerator =
        (mean - T::one()) / d_tilde * scale(hs.len() as u64) * scale(hs.free_end_count());
    let f = |n: T| numerator / expected_true(&weights, n, omega, d_tilde);
    let root = bisect(&f, scale(hs.len() as u64)).map(|(x, lo_positive)| {
        let d_tilde = exact_harmonic(&degrees);
        let mean = BigRational::new(degrees.iter().sum::<u64>().into(), degrees.len().into());
        let size = BigRational::from_integer((hs.len() as u64 * hs.free_end_count()).into());
        let gap = ExactGap::new(
            (mean - BigRational::one()) / &d_tilde * size,
            &d_tilde,
            &weights,
            omega,
        );
        refine(x, lo_positive, |n| gap.eval(n))
    });
    Ok(solved(root))
}

/// `n3^ψ`: fixed point of the `n3` numerator over `Σ_s x̂(s, n')`.
pub fn estimate_n3_psi<T: RealScalar>(hs: &HashedSample, omega: u64) -> Result<EstimateResult<T>> {
    if hs.components().len() < 2 {
        return Err(Error::Precondition("n3 needs at least two seeds"));
    }
    let degrees = hs.degrees();
    let Some((_, d_tilde)) = degree_guard::<T>(&degrees)? else {
        return Ok(EstimateResult::Failed(FailureCause::DegenerateDegrees));
    };
    let weights = cross_weights(hs);
    if weights.is_empty() {
        return Ok(EstimateResult::Failed(FailureCause::ZeroCrossMatches));
    }
    let numerator: T = n3_numerator(hs, &d_tilde)?;
    let f = |n: T| numerator / expected_true(&weights, n, omega, d_tilde);
    let Some((x, lo_positive)) = bisect(&f, real::<T>(hs.len() as f64)) else {
        return Ok(EstimateResult::Failed(FailureCause::NoRoot));
    };
    let d_tilde = exact_harmonic(&degrees);
    let gap = ExactGap::new(n3_numerator(hs, &d_tilde)?, &d_tilde, &weights, omega);
    Ok(solved(Some(refine(x, lo_positive, |n| gap.eval(n)))))
}
