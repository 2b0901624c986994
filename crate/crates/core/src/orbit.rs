//! Exact arithmetic on the circle `[0, 1)`: the doubling map, its periodic
//! orbits, the binary-expansion projection from periodic streams, and the
//! finite set of orbits that gets blown up.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dold::PeriodSet;
use crate::rational;
use crate::words::{self, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("angle {0} has even denominator and is not periodic under doubling")]
    NotPeriodic(Angle),
    #[error("period {period} exceeds the truncation bound {n_max}")]
    PeriodTooLarge { period: u64, n_max: u64 },
    #[error("orbits of periods {0} and {1} overlap")]
    Overlap(u64, u64),
    #[error("the orbit set is empty")]
    EmptyLambda,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A point of the circle as an exact reduced rational in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

impl Angle {
    /// Reduces `value` mod 1.
    pub fn new(value: BigRational) -> Self {
        let frac = &value - value.floor();
        Angle(frac)
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }

    pub fn is_periodic(&self) -> bool {
        self.0.denom().is_odd()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::to_string(&self.0))
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({self})")
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rational::serde_rational::deserialize(d).map(Angle::new)
    }
}

/// The angle whose binary expansion is the periodic stream generated by `w`:
/// `value(w) / (2^n - 1)`.
pub fn word_to_angle(w: &Word) -> Angle {
    assert!(!w.is_empty(), "empty word has no angle");
    let numer = w
        .bits()
        .iter()
        .fold(BigInt::zero(), |acc, &b| (acc << 1u32) + BigInt::from(b));
    let denom = (BigInt::one() << w.len()) - BigInt::one();
    Angle::new(BigRational::new(numer, denom))
}

/// `e2(a) = 2a mod 1`.
pub fn doubling(a: &Angle) -> Angle {
    Angle::new(a.value() * BigInt::from(2))
}

/// Circular distance, at most 1/2.
pub fn circular_distance(a: &Angle, b: &Angle) -> BigRational {
    let d = (a.value() - b.value()).abs();
    let other = BigRational::one() - &d;
    if other < d {
        other
    } else {
        d
    }
}

/// One periodic orbit of the doubling map, listed along the dynamics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    points: Vec<Angle>,
}

impl PeriodicOrbit {
    pub fn points(&self) -> &[Angle] {
        &self.points
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// Position of `a` along the orbit.
    pub fn position(&self, a: &Angle) -> Option<usize> {
        self.points.iter().position(|p| p == a)
    }
}

pub fn orbit_of(a: &Angle) -> Result<PeriodicOrbit, OrbitError> {
    if !a.is_periodic() {
        return Err(OrbitError::NotPeriodic(a.clone()));
    }
    let mut points = vec![a.clone()];
    let mut next = doubling(a);
    while &next != a {
        points.push(next.clone());
        next = doubling(&next);
    }
    Ok(PeriodicOrbit { points })
}

/// One orbit per period: the finite truncation of the blown-up set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSet {
    orbits: BTreeMap<u64, PeriodicOrbit>,
}

impl LambdaSet {
    pub fn orbits(&self) -> impl Iterator<Item = (u64, &PeriodicOrbit)> {
        self.orbits.iter().map(|(&k, o)| (k, o))
    }

    pub fn orbit(&self, period: u64) -> Option<&PeriodicOrbit> {
        self.orbits.get(&period)
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.orbits.values().map(|o| o.period()).sum()
    }

    /// All points in increasing order, each with its period and orbit position.
    pub fn sorted_points(&self) -> Vec<(Angle, u64, usize)> {
        let mut pts: Vec<_> = self
            .orbits
            .iter()
            .flat_map(|(&k, o)| o.points.iter().enumerate().map(move |(i, p)| (p.clone(), k, i)))
            .collect();
        pts.sort();
        pts
    }
}

/// The orbit of `word_to_angle(ptm_prefix(k))` for every `k` in `periods`.
pub fn build_lambda(periods: &PeriodSet, n_max: u64) -> Result<LambdaSet, OrbitError> {
    if let Some(period) = periods.max().filter(|&p| p > n_max) {
        return Err(OrbitError::PeriodTooLarge { period, n_max });
    }
    let mut orbits = BTreeMap::new();
    let mut owner: BTreeMap<Angle, u64> = BTreeMap::new();
    for k in periods.iter() {
        let orbit = ptm_orbit(k as usize)?;
        assert_eq!(orbit.period(), k as usize, "primitive prefix has least period k");
        for p in &orbit.points {
            if let Some(&other) = owner.get(p) {
                return Err(OrbitError::Overlap(other, k));
            }
            owner.insert(p.clone(), k);
        }
        orbits.insert(k, orbit);
    }
    Ok(LambdaSet { orbits })
}

/// Orbit of the angle coded by the Thue–Morse prefix of length `n`.
fn ptm_orbit(n: usize) -> Result<PeriodicOrbit, OrbitError> {
    let s_n = words::ptm_prefix(n)?;
    if !words::is_primitive(&s_n) {
        return Err(WordError::NotPrimitive { n, word: s_n }.into());
    }
    orbit_of(&word_to_angle(&s_n))
}

/// Minimum circular distance between distinct points; a single point is at
/// distance 1 from itself around the circle.
pub fn min_gap(lambda: &LambdaSet) -> Result<BigRational, OrbitError> {
    let pts: Vec<Angle> = lambda.sorted_points().into_iter().map(|(a, _, _)| a).collect();
    min_gap_of_sorted(&pts).ok_or(OrbitError::EmptyLambda)
}

fn min_gap_of_sorted(pts: &[Angle]) -> Option<BigRational> {
    let first = pts.first()?;
    let last = pts.last()?;
    let wrap = BigRational::one() - last.value() + first.value();
    Some(
        pts.windows(2)
            .map(|w| w[1].value() - w[0].value())
            .fold(wrap, |acc, g| if g < acc { g } else { acc }),
    )
}

/// All angles of least period exactly `p` under doubling.
pub fn periodic_angles(p: usize) -> Vec<Angle> {
    assert!(p >= 1);
    let denom = (1i64 << p) - 1;
    let mut seen = BTreeSet::new();
    (0..denom.max(1))
        .map(|j| Angle::from_ratio(j, denom))
        .filter(|a| orbit_of(a).map(|o| o.period() == p).unwrap_or(false))
        .filter(|a| seen.insert(a.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub probe: Angle,
    pub probe_period: usize,
    /// `(n, distance to the period-n orbit)`; the orbit containing the probe,
    /// if any, is skipped.
    pub distances: Vec<(usize, f64)>,
    pub member_of: Option<usize>,
    /// Minimum over all listed distances.
    pub floor: f64,
    pub floor_positive: bool,
    /// Minimum over the upper half of the range of `n`.
    pub tail_floor: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub n_max: usize,
    pub probe_period: usize,
    pub threshold: f64,
    pub rows: Vec<SeparationRow>,
    pub pass: bool,
}

/// Default threshold below which a probe's tail distances are flagged.
pub const SEPARATION_THRESHOLD: f64 = 1.0 / 4096.0;

/// Heuristic probe of the separation between the blown orbits and periodic
/// angles of small period: for each periodic probe `β` of period at most
/// `probe_period`, the distance from `β` to the orbit of period `n` for every
/// `n <= n_max`. A probe is flagged when its distances over the upper half of
/// the range fall below `threshold`.
pub fn separation_proxy(
    n_max: usize,
    probe_period: usize,
    threshold: f64,
) -> Result<SeparationReport, OrbitError> {
    let orbits: Vec<(usize, Vec<Angle>)> = (1..=n_max)
        .map(|n| {
            let mut pts = ptm_orbit(n)?.points;
            pts.sort();
            Ok((n, pts))
        })
        .collect::<Result<_, OrbitError>>()?;

    let mut rows = Vec::new();
    for p in 1..=probe_period {
        for probe in periodic_angles(p) {
            let mut distances = Vec::new();
            let mut member_of = None;
            let mut exact_floor: Option<BigRational> = None;
            let mut tail = f64::INFINITY;
            for (n, pts) in &orbits {
                if pts.binary_search(&probe).is_ok() {
                    member_of = Some(*n);
                    continue;
                }
                let d = nearest_distance(pts, &probe);
                let df = rational::to_f64(&d);
                if 2 * n > n_max {
                    tail = tail.min(df);
                }
                distances.push((*n, df));
                exact_floor = Some(match exact_floor {
                    Some(f) if f <= d => f,
                    _ => d,
                });
            }
            let floor = exact_floor.as_ref().map(rational::to_f64).unwrap_or(f64::INFINITY);
            let floor_positive = exact_floor.map(|f| f.is_positive()).unwrap_or(true);
            rows.push(SeparationRow {
                probe,
                probe_period: p,
                distances,
                member_of,
                floor,
                floor_positive,
                tail_floor: tail,
                flagged: tail < threshold,
            });
        }
    }
    let pass = rows.iter().all(|r| r.floor_positive && !r.flagged);
    Ok(SeparationReport {
        n_max,
        probe_period,
        threshold,
        rows,
        pass,
    })
}

/// Distance from `a` to the nearest of the sorted points `pts`.
fn nearest_distance(pts: &[Angle], a: &Angle) -> BigRational {
    let i = pts.partition_point(|p| p < a);
    let below = &pts[(i + pts.len() - 1) % pts.len()];
    let above = &pts[i % pts.len()];
    let d1 = circular_distance(below, a);
    let d2 = circular_distance(above, a);
    if d1 < d2 {
        d1
    } else {
        d2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: i64, q: i64) -> Angle {
        Angle::from_ratio(p, q)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn periods(ps: &[u64]) -> PeriodSet {
        ps.iter().copied().collect()
    }

    /// Partial sums of the binary expansion converge to the angle.
    fn expansion_sum(word: &Word, terms: usize) -> f64 {
        (0..terms)
            .map(|i| word.bits()[i % word.len()] as f64 * 0.5f64.powi(i as i32 + 1))
            .sum()
    }

    #[test]
    fn word_to_angle_examples() {
        assert_eq!(word_to_angle(&w("100")), a(4, 7));
        assert_eq!(word_to_angle(&w("0")), Angle::zero());
        assert_eq!(word_to_angle(&w("01")), a(1, 3));
        assert!((expansion_sum(&w("100"), 60) - 4.0 / 7.0).abs() < 1e-15);
        assert_eq!(word_to_angle(&w("1")), Angle::zero());
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(doubling(&a(4, 7)), a(1, 7));
        assert_eq!(doubling(&Angle::zero()), Angle::zero());
        assert_eq!(doubling(&a(1, 3)), a(2, 3));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit_of(&a(1, 3)).unwrap().points(), &[a(1, 3), a(2, 3)]);
        assert_eq!(orbit_of(&Angle::zero()).unwrap().period(), 1);
        assert_eq!(orbit_of(&a(3, 7)).unwrap().points(), &[a(3, 7), a(6, 7), a(5, 7)]);
        assert!(matches!(orbit_of(&a(1, 4)), Err(OrbitError::NotPeriodic(_))));
    }

    #[test]
    fn angles_display_as_fractions() {
        assert_eq!(a(4, 7).to_string(), "4/7");
        assert_eq!(Angle::zero().to_string(), "0/1");
        assert_eq!(a(9, 7), a(2, 7));
        let json = serde_json::to_string(&a(2, 3)).unwrap();
        assert_eq!(json, "\"2/3\"");
        assert_eq!(serde_json::from_str::<Angle>(&json).unwrap(), a(2, 3));
    }

    #[test]
    fn build_lambda_examples() {
        let l = build_lambda(&periods(&[1]), 1).unwrap();
        assert_eq!(l.orbit(1).unwrap().points(), &[Angle::zero()]);
        let l = build_lambda(&periods(&[1, 2]), 2).unwrap();
        assert_eq!(l.orbit(2).unwrap().points(), &[a(1, 3), a(2, 3)]);
        assert!(build_lambda(&periods(&[]), 0).unwrap().is_empty());
        assert_eq!(
            build_lambda(&periods(&[5]), 4),
            Err(OrbitError::PeriodTooLarge { period: 5, n_max: 4 })
        );
    }

    #[test]
    fn lambda_points_have_their_orbit_period() {
        let l = build_lambda(&periods(&[1, 2, 3, 4, 5, 6, 7, 8]), 8).unwrap();
        for (k, orbit) in l.orbits() {
            for p in orbit.points() {
                assert_eq!(orbit_of(p).unwrap().period() as u64, k);
            }
        }
        assert_eq!(l.len(), 36);
    }

    #[test]
    fn min_gap_examples() {
        let l = build_lambda(&periods(&[1, 2]), 2).unwrap();
        assert_eq!(min_gap(&l).unwrap(), BigRational::new(1.into(), 3.into()));
        let l = build_lambda(&periods(&[1]), 1).unwrap();
        assert_eq!(min_gap(&l).unwrap(), BigRational::one());
        let l = build_lambda(&periods(&[1, 2, 3]), 3).unwrap();
        // 5/7 - 2/3 is the closest pair
        assert_eq!(min_gap(&l).unwrap(), BigRational::new(1.into(), 21.into()));
        assert_eq!(min_gap(&LambdaSet::default()), Err(OrbitError::EmptyLambda));
    }

    #[test]
    fn min_gap_matches_pairwise_minimum() {
        let l = build_lambda(&periods(&[1, 2, 3, 4, 5, 6]), 6).unwrap();
        let pts: Vec<Angle> = l.sorted_points().into_iter().map(|(p, _, _)| p).collect();
        let mut brute = BigRational::one();
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                let d = circular_distance(p, q);
                if d < brute {
                    brute = d;
                }
            }
        }
        assert_eq!(min_gap(&l).unwrap(), brute);
        let mut reversed = pts.clone();
        reversed.reverse();
        reversed.sort();
        assert_eq!(min_gap_of_sorted(&reversed).unwrap(), brute);
    }

    #[test]
    fn semiconjugacy_on_short_words() {
        for len in 1..=8usize {
            for x in 0u32..1 << len {
                let word = Word::from_bits((0..len).map(|i| ((x >> i) & 1) as u8).collect());
                let mut angle = word_to_angle(&word);
                for k in 1..=len {
                    angle = doubling(&angle);
                    assert_eq!(angle, word_to_angle(&word.rotate(k)));
                }
                let orbit = orbit_of(&word_to_angle(&word)).unwrap();
                assert_eq!(orbit.period(), word.primitive_root_len());
            }
        }
    }

    #[test]
    fn periodic_angle_counts() {
        // number of points of least period p under doubling
        let counts: Vec<usize> = (1..=6).map(|p| periodic_angles(p).len()).collect();
        assert_eq!(counts, vec![1, 2, 6, 12, 30, 54]);
    }

    #[test]
    fn separation_examples() {
        let r = separation_proxy(64, 0, SEPARATION_THRESHOLD).unwrap();
        assert!(r.rows.is_empty() && r.pass);

        let r = separation_proxy(1, 1, SEPARATION_THRESHOLD).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].member_of, Some(1));
        assert!(r.rows[0].distances.is_empty());

        let r = separation_proxy(64, 1, SEPARATION_THRESHOLD).unwrap();
        let zero = &r.rows[0];
        assert_eq!(zero.probe, Angle::zero());
        assert_eq!(zero.distances.len(), 63);
        assert!(zero.floor_positive && !zero.flagged, "{zero:?}");
    }
}
