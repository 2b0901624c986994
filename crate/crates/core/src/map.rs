//! The planar skew product `f(θ, r) = (h(θ), r - g(θ))`.
//!
//! The angular map `h` is a degree-2 circle map on the *blown* circle: every
//! point `α` of the chosen periodic orbits is replaced by an interval `J_α`.
//! Inside `J_α` the map is `m` side-by-side copies of the model sector map
//! `θ̂ ↦ θ̂ c(θ̂)` carried affinely onto `J_{e2(α)}`; between intervals it is the
//! affine interpolation of the lift. Geometry is exact (rational breakpoints);
//! point evaluation is in `f64`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dold::{self, DoldCoefficients, PeriodSet};
use crate::orbit::{self, Angle, LambdaSet, OrbitError};
use crate::rational::{self, serde_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("map dump does not match a fresh build: {0}")]
    DumpMismatch(String),
    #[error("unsupported map dump schema {0}")]
    Schema(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Number of model copies and their orientation for one sector cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub m: u64,
    pub sign: Sign,
}

impl SectorSpec {
    /// Turns contributed to the index by one sector of the cycle.
    pub fn contribution(&self) -> i64 {
        self.sign.as_i64() * self.m as i64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SectorParams {
    by_period: BTreeMap<u64, SectorSpec>,
}

impl SectorParams {
    pub fn get(&self, period: u64) -> Option<SectorSpec> {
        self.by_period.get(&period).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, SectorSpec)> + '_ {
        self.by_period.iter().map(|(&k, &s)| (k, s))
    }

    pub fn periods(&self) -> PeriodSet {
        self.by_period.keys().copied().collect()
    }
}

pub fn assign_sector_params(coeffs: &DoldCoefficients) -> SectorParams {
    let mut by_period = BTreeMap::new();
    let a1 = coeffs.get(1);
    if a1 >= 2 {
        by_period.insert(1, SectorSpec { m: (a1 - 1) as u64, sign: Sign::Plus });
    } else if a1 <= 0 {
        by_period.insert(1, SectorSpec { m: (1 - a1) as u64, sign: Sign::Minus });
    }
    for (k, a) in coeffs.iter().filter(|&(k, _)| k >= 2) {
        let sign = if a > 0 { Sign::Plus } else { Sign::Minus };
        by_period.insert(k, SectorSpec { m: a.unsigned_abs(), sign });
    }
    SectorParams { by_period }
}

/// `θ̂ c(θ̂)` for the model sector: `c₋ = 1 - θ̂²(1-θ̂²)/2`, `c₊ = 1 + θ̂²(1-θ̂²)/2`.
/// Fixes exactly -1, 0 and 1.
pub fn model_angle(sign: Sign, x: f64) -> f64 {
    let bump = x * x * x * (1.0 - x * x) / 2.0;
    match sign {
        Sign::Plus => x + bump,
        Sign::Minus => x - bump,
    }
}

pub fn model_angle_exact(sign: Sign, x: &BigRational) -> BigRational {
    let x2 = x * x;
    let bump = x * &x2 * (BigRational::one() - &x2) / BigRational::from_integer(BigInt::from(2));
    match sign {
        Sign::Plus => x + bump,
        Sign::Minus => x - bump,
    }
}

/// Coefficients of `c_∗` in increasing degree.
pub fn model_polynomial(sign: Sign) -> [BigRational; 5] {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let s = BigRational::from_integer(BigInt::from(sign.as_i64()));
    [
        BigRational::one(),
        BigRational::zero(),
        &s * &half,
        BigRational::zero(),
        -(&s * &half),
    ]
}

/// Radial update `1 - 2θ̂²` inside a sub-sector.
fn model_radial(x: f64) -> f64 {
    1.0 - 2.0 * x * x
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Blown interval `J_α = [left, right]` on the blown unit circle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlownInterval {
    pub alpha: Angle,
    pub period: u64,
    /// Index of `alpha` along its orbit.
    pub position: usize,
    #[serde(with = "serde_rational")]
    pub left: BigRational,
    #[serde(with = "serde_rational")]
    pub right: BigRational,
}

/// Placement of the blown intervals. In unnormalized units every point of
/// `Λ` is widened by `base_width`; the circle is then rescaled by
/// `circumference = 1 + |Λ| base_width` back to length 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupSchedule {
    base_points: LambdaSet,
    base_width: BigRational,
    circumference: BigRational,
    intervals: Vec<BlownInterval>,
}

impl BlowupSchedule {
    /// Uniform widths of `min_gap(Λ) / 4` before renormalization.
    pub fn new(lambda: LambdaSet) -> Self {
        let base_width = match orbit::min_gap(&lambda) {
            Ok(gap) => gap / BigRational::from_integer(BigInt::from(4)),
            Err(_) => BigRational::zero(),
        };
        let count = BigRational::from_integer(BigInt::from(lambda.len()));
        let circumference = BigRational::one() + &count * &base_width;
        let intervals = lambda
            .sorted_points()
            .into_iter()
            .enumerate()
            .map(|(i, (alpha, period, position))| {
                let shift = BigRational::from_integer(BigInt::from(i)) * &base_width;
                let left = (alpha.value() + &shift) / &circumference;
                let right = (alpha.value() + &shift + &base_width) / &circumference;
                BlownInterval { alpha, period, position, left, right }
            })
            .collect();
        Self {
            base_points: lambda,
            base_width,
            circumference,
            intervals,
        }
    }

    pub fn base_points(&self) -> &LambdaSet {
        &self.base_points
    }

    pub fn intervals(&self) -> &[BlownInterval] {
        &self.intervals
    }

    /// Common width of the blown intervals in blown-circle units.
    pub fn width(&self) -> BigRational {
        &self.base_width / &self.circumference
    }

    pub fn base_width(&self) -> &BigRational {
        &self.base_width
    }

    pub fn circumference(&self) -> &BigRational {
        &self.circumference
    }

    pub fn interval_of(&self, alpha: &Angle) -> Option<&BlownInterval> {
        self.intervals.iter().find(|j| &j.alpha == alpha)
    }

    /// The collapsing projection `π`: each `J_α` goes to `α`, gap arcs go
    /// isometrically (up to the global rescale) onto base arcs.
    pub fn project(&self, t: &BigRational) -> Angle {
        let t = Angle::new(t.clone());
        let t = t.value();
        let mut before = 0usize;
        for j in &self.intervals {
            if t < &j.left {
                break;
            }
            if t <= &j.right {
                return j.alpha.clone();
            }
            before += 1;
        }
        let unnormalized = t * &self.circumference
            - BigRational::from_integer(BigInt::from(before)) * &self.base_width;
        Angle::new(unnormalized)
    }

    /// Left (or right) end of `J_α` for the lift `y = α + q` of a point of `Λ`,
    /// shifted by the same integer `q`.
    fn lifted_end(&self, alpha: &Angle, q: &BigInt, right: bool) -> BigRational {
        let j = self.interval_of(alpha).expect("image of a Λ point lies in Λ");
        let end = if right { &j.right } else { &j.left };
        end + BigRational::from_integer(q.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceKind {
    /// Sub-sector `sub` of `m` inside the interval of the orbit point at
    /// `position` in the cycle of length `period`.
    Sector {
        period: u64,
        position: usize,
        sub: u64,
        m: u64,
        sign: Sign,
    },
    Gap,
}

/// One piece of the lift: `domain` (inside `[start, start + 1)`) maps onto
/// `image` in lift coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub kind: PieceKind,
    pub domain: (BigRational, BigRational),
    pub image: (BigRational, BigRational),
    fdomain: (f64, f64),
    fimage: (f64, f64),
}

impl Piece {
    fn new(kind: PieceKind, domain: (BigRational, BigRational), image: (BigRational, BigRational)) -> Self {
        let fdomain = (rational::to_f64(&domain.0), rational::to_f64(&domain.1));
        let fimage = (rational::to_f64(&image.0), rational::to_f64(&image.1));
        Self { kind, domain, image, fdomain, fimage }
    }

    /// Lifted image and radial displacement at `t` in the domain.
    pub fn eval_exact(&self, t: &BigRational) -> (BigRational, BigRational) {
        let (a, b) = &self.domain;
        let (c, d) = &self.image;
        match self.kind {
            PieceKind::Gap => (c + (t - a) * (d - c) / (b - a), -BigRational::one()),
            PieceKind::Sector { sign, .. } => {
                let local = two() * (t - a) / (b - a) - BigRational::one();
                let phi = model_angle_exact(sign, &local);
                let image = c + (phi + BigRational::one()) * (d - c) / two();
                let dr = BigRational::one() - two() * &local * &local;
                (image, dr)
            }
        }
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let (a, b) = self.fdomain;
        let (c, d) = self.fimage;
        match self.kind {
            PieceKind::Gap => (c + (t - a) * (d - c) / (b - a), -1.0),
            PieceKind::Sector { sign, .. } => {
                let local = (2.0 * (t - a) / (b - a) - 1.0).clamp(-1.0, 1.0);
                let phi = model_angle(sign, local);
                (c + (phi + 1.0) * 0.5 * (d - c), model_radial(local))
            }
        }
    }
}

/// The lift of `h` on one fundamental domain `[start, start + 1)`; extended by
/// `H(t + 1) = H(t) + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMap {
    start: BigRational,
    fstart: f64,
    pieces: Vec<Piece>,
    fbreaks: Vec<f64>,
}

impl AngularMap {
    fn new(start: BigRational, pieces: Vec<Piece>) -> Self {
        let fbreaks = pieces.iter().map(|p| p.fdomain.0).collect();
        Self {
            fstart: rational::to_f64(&start),
            start,
            pieces,
            fbreaks,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> &BigRational {
        &self.start
    }

    /// Domain breakpoints, starting at `start` and ending at `start + 1`.
    pub fn breakpoints(&self) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = self.pieces.iter().map(|p| p.domain.0.clone()).collect();
        out.push(&self.start + BigRational::one());
        out
    }

    fn locate_exact(&self, t: &BigRational) -> (usize, BigInt) {
        let turns = (t - &self.start).floor().to_integer();
        let s = t - BigRational::from_integer(turns.clone());
        let idx = self.pieces.partition_point(|p| p.domain.0 <= s) - 1;
        (idx, turns)
    }

    /// Lifted image and radial displacement at any real `t`, exactly.
    pub fn eval_exact(&self, t: &BigRational) -> (BigRational, BigRational) {
        let (idx, turns) = self.locate_exact(t);
        let s = t - BigRational::from_integer(turns.clone());
        let (image, dr) = self.pieces[idx].eval_exact(&s);
        (image + BigRational::from_integer(turns * 2), dr)
    }

    pub fn piece_at(&self, t: &BigRational) -> &Piece {
        &self.pieces[self.locate_exact(t).0]
    }

    /// Lifted image and radial displacement at any real `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let mut turns = (t - self.fstart).floor();
        let mut s = t - turns;
        if s >= self.fstart + 1.0 {
            turns += 1.0;
            s = self.fstart;
        }
        let idx = self.fbreaks.partition_point(|&b| b <= s).max(1) - 1;
        let (image, dr) = self.pieces[idx].eval(s);
        (image + 2.0 * turns, dr)
    }
}

/// A point of the punctured plane as (blown angle mod 1, log-radius).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub theta: f64,
    pub r: f64,
}

impl PlanePoint {
    pub fn new(theta: f64, r: f64) -> Self {
        Self {
            theta: theta.rem_euclid(1.0),
            r,
        }
    }
}

/// A sector taking part in a cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorInfo {
    pub interval: BlownInterval,
    pub spec: SectorSpec,
}

/// Sectors of one orbit, in dynamical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorCycle {
    pub period: u64,
    pub sectors: Vec<SectorInfo>,
}

/// The constructed map.
#[derive(Debug, Clone)]
pub struct SkewProductMap {
    coefficients: DoldCoefficients,
    params: SectorParams,
    blowup: BlowupSchedule,
    angular: AngularMap,
}

pub fn build_map(coeffs: &DoldCoefficients) -> Result<SkewProductMap, BuildError> {
    let periods = dold::support_periods(coeffs);
    let lambda = orbit::build_lambda(&periods, periods.max().unwrap_or(0))?;
    let params = assign_sector_params(coeffs);
    let blowup = BlowupSchedule::new(lambda);
    let angular = build_angular(&blowup, &params);
    Ok(SkewProductMap {
        coefficients: coeffs.clone(),
        params,
        blowup,
        angular,
    })
}

fn build_angular(blowup: &BlowupSchedule, params: &SectorParams) -> AngularMap {
    let intervals = blowup.intervals();
    if intervals.is_empty() {
        let gap = Piece::new(
            PieceKind::Gap,
            (BigRational::zero(), BigRational::one()),
            (BigRational::zero(), two()),
        );
        return AngularMap::new(BigRational::zero(), vec![gap]);
    }

    // Image of each interval in lift coordinates: J_{e2(α)} + floor(2α).
    let images: Vec<(BigRational, BigRational)> = intervals
        .iter()
        .map(|j| {
            let doubled = j.alpha.value() * two();
            let q = doubled.floor().to_integer();
            let target = orbit::doubling(&j.alpha);
            (
                blowup.lifted_end(&target, &q, false),
                blowup.lifted_end(&target, &q, true),
            )
        })
        .collect();

    let start = intervals[0].left.clone();
    let mut pieces = Vec::new();
    for (i, j) in intervals.iter().enumerate() {
        let spec = params.get(j.period).expect("every blown orbit has sector parameters");
        let (c, d) = &images[i];
        let m = BigRational::from_integer(BigInt::from(spec.m));
        for sub in 0..spec.m {
            let lo = BigRational::from_integer(BigInt::from(sub)) / &m;
            let hi = BigRational::from_integer(BigInt::from(sub + 1)) / &m;
            let along = |x: &BigRational, y: &BigRational, f: &BigRational| x + (y - x) * f;
            pieces.push(Piece::new(
                PieceKind::Sector {
                    period: j.period,
                    position: j.position,
                    sub,
                    m: spec.m,
                    sign: spec.sign,
                },
                (along(&j.left, &j.right, &lo), along(&j.left, &j.right, &hi)),
                (along(c, d, &lo), along(c, d, &hi)),
            ));
        }
        let (next_left, next_image) = match intervals.get(i + 1) {
            Some(next) => (next.left.clone(), images[i + 1].0.clone()),
            None => (&start + BigRational::one(), &images[0].0 + two()),
        };
        pieces.push(Piece::new(
            PieceKind::Gap,
            (j.right.clone(), next_left),
            (d.clone(), next_image),
        ));
    }
    AngularMap::new(start, pieces)
}

impl SkewProductMap {
    pub fn coefficients(&self) -> &DoldCoefficients {
        &self.coefficients
    }

    pub fn params(&self) -> &SectorParams {
        &self.params
    }

    pub fn blowup(&self) -> &BlowupSchedule {
        &self.blowup
    }

    pub fn angular(&self) -> &AngularMap {
        &self.angular
    }

    /// Total number of sub-sectors over all blown intervals.
    pub fn sub_sector_count(&self) -> usize {
        self.angular
            .pieces
            .iter()
            .filter(|p| matches!(p.kind, PieceKind::Sector { .. }))
            .count()
    }

    pub fn evaluate(&self, p: PlanePoint) -> PlanePoint {
        let (image, dr) = self.angular.eval(p.theta);
        PlanePoint::new(image, p.r + dr)
    }

    pub fn iterate(&self, p: PlanePoint, n: usize) -> PlanePoint {
        (0..n).fold(p, |q, _| self.evaluate(q))
    }

    /// Iterates keeping the angle lifted to the real line, so the number of
    /// turns made by the image is retained.
    pub fn iterate_lifted(&self, theta: f64, r: f64, n: usize) -> (f64, f64) {
        (0..n).fold((theta, r), |(t, r), _| {
            let (image, dr) = self.angular.eval(t);
            (image, r + dr)
        })
    }

    /// Exact lifted orbit step on rational points.
    pub fn evaluate_exact(&self, theta: &BigRational, r: &BigRational) -> (BigRational, BigRational) {
        let (image, dr) = self.angular.eval_exact(theta);
        (image, r + dr)
    }

    /// Sector cycles whose period divides `n`, i.e. sectors mapped onto
    /// themselves by `h^n`.
    pub fn sector_cycles_fixed_by(&self, n: u64) -> Vec<SectorCycle> {
        assert!(n >= 1);
        self.blowup
            .base_points
            .orbits()
            .filter(|&(k, _)| n.is_multiple_of(k))
            .map(|(k, orbit)| {
                let spec = self.params.get(k).expect("blown orbit has parameters");
                let sectors = orbit
                    .points()
                    .iter()
                    .map(|alpha| SectorInfo {
                        interval: self.blowup.interval_of(alpha).expect("blown").clone(),
                        spec,
                    })
                    .collect();
                SectorCycle { period: k, sectors }
            })
            .collect()
    }

    /// Diagnostic for the absence of periodic orbits off the origin, starting
    /// from `samples` quasi-random angles on `r = 0`.
    pub fn escape_scan(&self, samples: usize, steps: usize, band: f64) -> EscapeReport {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let starts: Vec<PlanePoint> = (0..samples)
            .map(|i| PlanePoint::new(0.5 + i as f64 * golden, 0.0))
            .collect();
        self.escape_scan_from(&starts, steps, band)
    }

    /// A sample counts as escaped in the direction it first leaves the band
    /// `|r| <= band`. Samples already past the origin's basin may re-enter the
    /// band on their way to the other end, so `outside_at_end` is reported too.
    pub fn escape_scan_from(&self, starts: &[PlanePoint], steps: usize, band: f64) -> EscapeReport {
        let mut report = EscapeReport {
            samples: starts.len(),
            steps,
            band,
            escaped_up: 0,
            escaped_down: 0,
            fraction_escaped: 0.0,
            outside_at_end: 0,
            suspects: Vec::new(),
        };
        for &start in starts {
            let mut p = start;
            let mut exit = None;
            for step in 1..=steps {
                p = self.evaluate(p);
                if exit.is_none() && p.r.abs() > band {
                    exit = Some(p.r > 0.0);
                }
                let dtheta = (p.theta - start.theta).abs();
                if dtheta.min(1.0 - dtheta) < 1e-9 && (p.r - start.r).abs() < 1e-9 {
                    report.suspects.push(Suspect { start, step });
                    break;
                }
            }
            match exit {
                Some(true) => report.escaped_up += 1,
                Some(false) => report.escaped_down += 1,
                None => {}
            }
            if p.r.abs() > band {
                report.outside_at_end += 1;
            }
        }
        if !starts.is_empty() {
            report.fraction_escaped = (report.escaped_up + report.escaped_down) as f64 / starts.len() as f64;
        }
        report
    }

    pub fn dump(&self) -> MapDump {
        MapDump {
            schema: 1,
            coefficients: self.coefficients.clone(),
            periods: self.params.periods().iter().collect(),
            lambda: self
                .blowup
                .base_points
                .orbits()
                .map(|(period, o)| OrbitDump {
                    period,
                    points: o.points().to_vec(),
                })
                .collect(),
            base_width: self.blowup.base_width.clone(),
            circumference: self.blowup.circumference.clone(),
            width: self.blowup.width(),
            intervals: self.blowup.intervals.clone(),
            sectors: self.params.clone(),
            start: self.angular.start.clone(),
            pieces: self
                .angular
                .pieces
                .iter()
                .map(|p| PieceDump {
                    kind: p.kind,
                    domain: [p.domain.0.clone(), p.domain.1.clone()],
                    image: [p.image.0.clone(), p.image.1.clone()],
                })
                .collect(),
            c_minus: model_polynomial(Sign::Minus).to_vec(),
            c_plus: model_polynomial(Sign::Plus).to_vec(),
        }
    }

    /// Rebuilds from the coefficients stored in a dump and checks that every
    /// recorded breakpoint and parameter is reproduced exactly.
    pub fn from_dump(dump: &MapDump) -> Result<Self, BuildError> {
        if dump.schema != 1 {
            return Err(BuildError::Schema(dump.schema));
        }
        let map = build_map(&dump.coefficients)?;
        let fresh = map.dump();
        let checks: [(&str, bool); 6] = [
            ("periods", fresh.periods == dump.periods),
            ("lambda", fresh.lambda == dump.lambda),
            ("widths", fresh.base_width == dump.base_width && fresh.width == dump.width),
            ("intervals", fresh.intervals == dump.intervals),
            ("sectors", fresh.sectors == dump.sectors),
            ("pieces", fresh.start == dump.start && fresh.pieces == dump.pieces),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((what, _)) => Err(BuildError::DumpMismatch(what.to_string())),
            None => Ok(map),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Suspect {
    pub start: PlanePoint,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub samples: usize,
    pub steps: usize,
    pub band: f64,
    pub escaped_up: usize,
    pub escaped_down: usize,
    pub fraction_escaped: f64,
    pub outside_at_end: usize,
    pub suspects: Vec<Suspect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDump {
    pub period: u64,
    pub points: Vec<Angle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDump {
    #[serde(flatten)]
    pub kind: PieceKind,
    #[serde(with = "rational_pair")]
    pub domain: [BigRational; 2],
    #[serde(with = "rational_pair")]
    pub image: [BigRational; 2],
}

/// JSON form of a built map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDump {
    pub schema: u32,
    pub coefficients: DoldCoefficients,
    pub periods: Vec<u64>,
    pub lambda: Vec<OrbitDump>,
    #[serde(with = "serde_rational")]
    pub base_width: BigRational,
    #[serde(with = "serde_rational")]
    pub circumference: BigRational,
    #[serde(with = "serde_rational")]
    pub width: BigRational,
    pub intervals: Vec<BlownInterval>,
    pub sectors: SectorParams,
    #[serde(with = "serde_rational")]
    pub start: BigRational,
    pub pieces: Vec<PieceDump>,
    #[serde(with = "rational_list")]
    pub c_minus: Vec<BigRational>,
    #[serde(with = "rational_list")]
    pub c_plus: Vec<BigRational>,
}

mod rational_pair {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[BigRational; 2], s: S) -> Result<S::Ok, S::Error> {
        [crate::rational::to_string(&x[0]), crate::rational::to_string(&x[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigRational; 2], D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let parse = |t: &str| crate::rational::parse(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}")));
        Ok([parse(&a)?, parse(&b)?])
    }
}

mod rational_list {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(crate::rational::to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| crate::rational::parse(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
            .collect()
    }
}
