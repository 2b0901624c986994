//! Algebra of fixed point index sequences.
//!
//! An index sequence `I = (I_1, I_2, ...)` is admissible when it is an integer
//! combination `Σ a_k σ^k` of the normalized sequences `σ^k` (equal to `k` at
//! multiples of `k` and `0` elsewhere). The coefficients are recovered by
//! Möbius inversion, which is exact in the integers precisely when every
//! congruence `n | Σ_{d|n} μ(n/d) I_d` holds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DoldError {
    #[error("period must be at least 1, got {0}")]
    InvalidPeriod(i64),
    #[error("sequence length must be at least 1")]
    EmptySequence,
    #[error("congruence fails at n = {n}: residue {residue} mod {n}")]
    CongruenceViolation { n: u64, residue: i64 },
    #[error("duplicate period {0} in coefficient literal")]
    DuplicatePeriod(u64),
    #[error("malformed literal {literal:?}: {reason}")]
    Malformed { literal: String, reason: String },
}

/// Finitely supported coefficients `a_k`; zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DoldCoefficients {
    entries: BTreeMap<u64, i64>,
}

impl DoldCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds coefficients from `(k, a_k)` pairs. Zero values are dropped;
    /// repeated periods are rejected.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, DoldError>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut seen = BTreeSet::new();
        let mut coeffs = Self::new();
        for (k, a) in pairs {
            if k < 1 {
                return Err(DoldError::InvalidPeriod(k));
            }
            let k = k as u64;
            if !seen.insert(k) {
                return Err(DoldError::DuplicatePeriod(k));
            }
            coeffs.set(k, a);
        }
        Ok(coeffs)
    }

    /// Sets `a_k`, removing the entry when `a` is zero.
    ///
    /// Panics if `k` is zero.
    pub fn set(&mut self, k: u64, a: i64) {
        assert!(k >= 1, "periods start at 1");
        if a == 0 {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, a);
        }
    }

    /// `a_k`, zero outside the support.
    pub fn get(&self, k: u64) -> i64 {
        self.entries.get(&k).copied().unwrap_or(0)
    }

    /// Nonzero entries in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.entries.iter().map(|(&k, &a)| (k, a))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_period(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    /// The coefficients with support cut down to `1..=n`.
    pub fn truncated(&self, n: u64) -> Self {
        Self {
            entries: self.entries.range(..=n).map(|(&k, &a)| (k, a)).collect(),
        }
    }
}

impl fmt::Display for DoldCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{k}:{a}")?;
        }
        Ok(())
    }
}

/// Parses `k:a_k` pairs separated by commas, e.g. `1:-1,2:3,5:-2`. The empty
/// string is the empty combination.
impl FromStr for DoldCoefficients {
    type Err = DoldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = |reason: &str| DoldError::Malformed {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Ok(Self::new());
        }
        let mut pairs = Vec::new();
        for item in trimmed.split(',') {
            let (k, a) = item
                .split_once(':')
                .ok_or_else(|| malformed("expected k:a pairs"))?;
            let k: i64 = k.trim().parse().map_err(|_| malformed("period is not an integer"))?;
            let a: i64 = a.trim().parse().map_err(|_| malformed("coefficient is not an integer"))?;
            pairs.push((k, a));
        }
        Self::from_pairs(pairs)
    }
}

/// A finite prefix `I_1..I_N` of an index sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IndexSequence {
    values: Vec<i64>,
}

impl IndexSequence {
    pub fn new(values: Vec<i64>) -> Result<Self, DoldError> {
        if values.is_empty() {
            return Err(DoldError::EmptySequence);
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `I_n` for `1 <= n <= len`.
    pub fn get(&self, n: usize) -> Option<i64> {
        n.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Pointwise sum of two sequences of equal length.
    pub fn add(&self, other: &Self) -> Option<Self> {
        (self.len() == other.len()).then(|| Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

impl TryFrom<Vec<i64>> for IndexSequence {
    type Error = DoldError;

    fn try_from(values: Vec<i64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<IndexSequence> for Vec<i64> {
    fn from(seq: IndexSequence) -> Self {
        seq.values
    }
}

impl fmt::Display for IndexSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for IndexSequence {
    type Err = DoldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|item| {
                item.trim().parse::<i64>().map_err(|_| DoldError::Malformed {
                    literal: s.to_string(),
                    reason: format!("{:?} is not an integer", item.trim()),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(values)
    }
}

/// Periods at which the construction has to place sectors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeriodSet {
    periods: BTreeSet<u64>,
}

impl PeriodSet {
    pub fn contains(&self, k: u64) -> bool {
        self.periods.contains(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.periods.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.periods.iter().next_back().copied()
    }
}

impl FromIterator<u64> for PeriodSet {
    fn from_iter<T: IntoIterator<Item = u64>>(iter: T) -> Self {
        Self {
            periods: iter.into_iter().collect(),
        }
    }
}

/// Outcome of [`check_congruences`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CongruenceVerdict {
    Pass,
    Fail { n: u64, residue: i64 },
}

impl CongruenceVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, CongruenceVerdict::Pass)
    }
}

/// Möbius function by trial division.
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1);
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn divisors(n: u64) -> impl Iterator<Item = u64> {
    (1..=n).filter(move |d| n.is_multiple_of(*d))
}

/// `σ^k` truncated to `len` terms.
pub fn normalized_sequence(k: i64, len: i64) -> Result<IndexSequence, DoldError> {
    if k < 1 {
        return Err(DoldError::InvalidPeriod(k));
    }
    if len < 1 {
        return Err(DoldError::EmptySequence);
    }
    let values = (1..=len).map(|n| if n % k == 0 { k } else { 0 }).collect();
    IndexSequence::new(values)
}

/// `I_n = Σ_{k|n} k a_k` for `n = 1..=len`.
pub fn expand(coeffs: &DoldCoefficients, len: usize) -> Result<IndexSequence, DoldError> {
    if len == 0 {
        return Err(DoldError::EmptySequence);
    }
    let values = (1..=len as u64)
        .map(|n| {
            coeffs
                .iter()
                .take_while(|&(k, _)| k <= n)
                .filter(|&(k, _)| n % k == 0)
                .map(|(k, a)| k as i64 * a)
                .sum()
        })
        .collect();
    IndexSequence::new(values)
}

fn mobius_sum(seq: &IndexSequence, n: u64) -> i64 {
    divisors(n)
        .map(|d| mobius(n / d) * seq.get(d as usize).expect("divisor within range"))
        .sum()
}

pub fn check_congruences(seq: &IndexSequence) -> CongruenceVerdict {
    for n in 1..=seq.len() as u64 {
        let residue = mobius_sum(seq, n).rem_euclid(n as i64);
        if residue != 0 {
            return CongruenceVerdict::Fail { n, residue };
        }
    }
    CongruenceVerdict::Pass
}

/// Möbius inversion of [`expand`]. Division by `k` must be exact; the first
/// `k` where it is not is reported as a congruence violation.
pub fn invert(seq: &IndexSequence) -> Result<DoldCoefficients, DoldError> {
    let mut coeffs = DoldCoefficients::new();
    for k in 1..=seq.len() as u64 {
        let sum = mobius_sum(seq, k);
        let ki = k as i64;
        if sum % ki != 0 {
            return Err(DoldError::CongruenceViolation {
                n: k,
                residue: sum.rem_euclid(ki),
            });
        }
        coeffs.set(k, sum / ki);
    }
    Ok(coeffs)
}

/// `1 ∈ P` iff `a_1 != 1`; `k ∈ P` iff `a_k != 0` for `k >= 2`.
pub fn support_periods(coeffs: &DoldCoefficients) -> PeriodSet {
    let mut periods: BTreeSet<u64> = coeffs.iter().map(|(k, _)| k).filter(|&k| k > 1).collect();
    if coeffs.get(1) != 1 {
        periods.insert(1);
    }
    PeriodSet { periods }
}
