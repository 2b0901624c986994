//! Fixed point index of `f^n` at the origin, computed two ways: as the
//! winding number of `x - f^n(x)` along a circle around the origin, and by
//! counting the turns contributed by the sectors that `h^n` maps to themselves.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dold::{self, DoldCoefficients};
use crate::map::{self, BuildError, PieceKind, PlanePoint, SkewProductMap};

/// Log-radius clamp applied by [`embed`].
pub const RADIAL_CLAMP: f64 = 50.0;

/// Uniform samples per sub-sector, and per `1 + sub-sectors` on the circle.
pub const SAMPLES_PER_SECTOR: usize = 64;

/// Image turns allowed between neighbouring samples when the image point is
/// not negligible.
const MAX_IMAGE_TURN: f64 = 1.0 / 8.0;
const MAX_RADIAL_STEP: f64 = 0.5;
/// Below this log-radius relative to the curve, `f^n(x)` cannot turn `x - f^n(x)`
/// by more than `e^-4` radians.
const NEGLIGIBLE_LOG_RADIUS: f64 = -4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WindingError {
    #[error("refinement failed for n = {n} on [{theta_lo}, {theta_hi}]: increment {increment} rad after max depth")]
    Refinement {
        n: usize,
        theta_lo: f64,
        theta_hi: f64,
        increment: f64,
    },
    #[error("winding for n = {n} is not integral: {turns} turns")]
    NonIntegral { n: usize, turns: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Winding(#[from] WindingError),
}

/// Cartesian position of a plane point, with the log-radius clamped to
/// `±RADIAL_CLAMP`.
pub fn embed(p: PlanePoint) -> (f64, f64) {
    embed_with_clamp(p, Some(RADIAL_CLAMP))
}

pub fn embed_with_clamp(p: PlanePoint, clamp: Option<f64>) -> (f64, f64) {
    let r = match clamp {
        Some(c) => p.r.clamp(-c, c),
        None => p.r,
    };
    let rho = r.exp();
    let (s, c) = (TAU * p.theta).sin_cos();
    (rho * c, rho * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingOptions {
    /// Lower bound on the uniform part of the initial grid.
    pub initial_samples: usize,
    pub max_depth: u32,
    /// Log-radius of the circle the winding is taken along.
    pub curve_r: f64,
    pub clamp: Option<f64>,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            initial_samples: 0,
            max_depth: 20,
            curve_r: 0.0,
            clamp: Some(RADIAL_CLAMP),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub theta: f64,
    /// `x - f^n(x)` in Cartesian coordinates.
    pub v: [f64; 2],
    #[serde(skip)]
    lifted: f64,
    #[serde(skip)]
    log_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingComputation {
    pub n: usize,
    /// Ordered samples over one turn; the last one closes the loop.
    pub samples: Vec<CurveSample>,
    /// Signed turning angle between consecutive samples, each below `π/2`.
    pub increments: Vec<f64>,
    pub total_turns: f64,
    pub result: i64,
}

fn turning(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.atan2(dot)
}

struct Sampler<'a> {
    map: &'a SkewProductMap,
    n: usize,
    opts: WindingOptions,
}

impl Sampler<'_> {
    fn sample(&self, theta: f64) -> CurveSample {
        let r0 = self.opts.curve_r;
        let (lifted, log_r) = self.map.iterate_lifted(theta, r0, self.n);
        let (x0, y0) = embed_with_clamp(PlanePoint::new(theta, r0), self.opts.clamp);
        let (x1, y1) = embed_with_clamp(PlanePoint::new(lifted, log_r), self.opts.clamp);
        CurveSample {
            theta,
            v: [x0 - x1, y0 - y1],
            lifted,
            log_r,
        }
    }

    fn needs_split(&self, a: &CurveSample, b: &CurveSample, increment: f64) -> bool {
        if increment.abs() >= FRAC_PI_2 {
            return true;
        }
        let r0 = self.opts.curve_r;
        let negligible = a.log_r - r0 < NEGLIGIBLE_LOG_RADIUS && b.log_r - r0 < NEGLIGIBLE_LOG_RADIUS;
        !negligible
            && ((b.lifted - a.lifted).abs() > MAX_IMAGE_TURN || (b.log_r - a.log_r).abs() > MAX_RADIAL_STEP)
    }

    /// Samples strictly after `a` up to and including `b`.
    fn refine(&self, a: &CurveSample, b: &CurveSample, depth: u32, out: &mut Vec<CurveSample>) -> Result<(), WindingError> {
        let increment = turning(a.v, b.v);
        if self.needs_split(a, b, increment) {
            if depth < self.opts.max_depth {
                let mid = self.sample(0.5 * (a.theta + b.theta));
                self.refine(a, &mid, depth + 1, out)?;
                return self.refine(&mid, b, depth + 1, out);
            }
            if increment.abs() >= FRAC_PI_2 {
                return Err(WindingError::Refinement {
                    n: self.n,
                    theta_lo: a.theta,
                    theta_hi: b.theta,
                    increment,
                });
            }
        }
        out.push(*b);
        Ok(())
    }
}

/// Starting grid: uniform over the circle with at least
/// `SAMPLES_PER_SECTOR · (1 + sub-sectors)` points, plus `SAMPLES_PER_SECTOR`
/// uniform points inside every sub-sector.
fn initial_grid(map: &SkewProductMap, opts: &WindingOptions) -> Vec<f64> {
    let uniform = opts
        .initial_samples
        .max(SAMPLES_PER_SECTOR * (1 + map.sub_sector_count()));
    let mut grid: Vec<f64> = (0..uniform).map(|i| i as f64 / uniform as f64).collect();
    for piece in map.angular().pieces() {
        if let PieceKind::Sector { .. } = piece.kind {
            let a = crate::rational::to_f64(&piece.domain.0);
            let b = crate::rational::to_f64(&piece.domain.1);
            grid.extend((0..SAMPLES_PER_SECTOR).map(|i| (a + (b - a) * i as f64 / SAMPLES_PER_SECTOR as f64).rem_euclid(1.0)));
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Winding number of `v(θ) = x(θ) - f^n(x(θ))` for `x` running once around
/// the circle of log-radius `opts.curve_r`.
pub fn winding_computation(map: &SkewProductMap, n: usize, opts: WindingOptions) -> Result<WindingComputation, WindingError> {
    assert!(n >= 1, "iterate must be positive");
    let sampler = Sampler { map, n, opts };
    let mut thetas = initial_grid(map, &opts);
    thetas.push(thetas[0] + 1.0);
    let coarse: Vec<CurveSample> = thetas.par_iter().map(|&t| sampler.sample(t)).collect();

    let pieces: Vec<Vec<CurveSample>> = coarse
        .par_windows(2)
        .map(|w| {
            let mut out = Vec::new();
            sampler.refine(&w[0], &w[1], 0, &mut out).map(|_| out)
        })
        .collect::<Result<_, _>>()?;

    let mut samples = Vec::with_capacity(coarse.len() + pieces.iter().map(Vec::len).sum::<usize>());
    samples.push(coarse[0]);
    for p in pieces {
        samples.extend(p);
    }
    let increments: Vec<f64> = samples.windows(2).map(|w| turning(w[0].v, w[1].v)).collect();
    let total_turns = increments.iter().sum::<f64>() / TAU;
    let result = total_turns.round();
    if (total_turns - result).abs() > 1e-6 {
        return Err(WindingError::NonIntegral { n, turns: total_turns });
    }
    Ok(WindingComputation {
        n,
        samples,
        increments,
        total_turns,
        result: result as i64,
    })
}

/// Fixed point index of `f^n` at the origin along the unit circle.
pub fn winding_index(map: &SkewProductMap, n: usize, max_depth: u32) -> Result<i64, WindingError> {
    let opts = WindingOptions {
        max_depth,
        ..WindingOptions::default()
    };
    winding_computation(map, n, opts).map(|w| w.result)
}

/// `1` from the curve plus the signed turn count of every sector that `h^n`
/// maps onto itself.
pub fn combinatorial_index(map: &SkewProductMap, n: usize) -> i64 {
    1 + map
        .sector_cycles_fixed_by(n as u64)
        .iter()
        .flat_map(|c| c.sectors.iter())
        .map(|s| s.spec.contribution())
        .sum::<i64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub n: usize,
    pub numeric: i64,
    pub combinatorial: i64,
    pub target: i64,
    pub agree: bool,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurveSample>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub coefficients: DoldCoefficients,
    pub max_n: usize,
    pub rows: Vec<IndexRow>,
    pub all_agree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub winding: WindingOptions,
    /// Keep the sampled curves in the report.
    pub keep_curves: bool,
}

pub fn verify(coeffs: &DoldCoefficients, max_n: usize) -> Result<IndexReport, VerifyError> {
    verify_with(coeffs, max_n, VerifyOptions::default())
}

pub fn verify_with(coeffs: &DoldCoefficients, max_n: usize, opts: VerifyOptions) -> Result<IndexReport, VerifyError> {
    assert!(max_n >= 1, "need at least one iterate");
    let map = map::build_map(coeffs)?;
    let targets = dold::expand(coeffs, max_n).expect("max_n >= 1");
    let rows = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let winding = winding_computation(&map, n, opts.winding)?;
            let combinatorial = combinatorial_index(&map, n);
            let target = targets.get(n).expect("n within range");
            Ok(IndexRow {
                n,
                numeric: winding.result,
                combinatorial,
                target,
                agree: winding.result == combinatorial && combinatorial == target,
                samples: winding.samples.len(),
                curve: opts.keep_curves.then_some(winding.samples),
            })
        })
        .collect::<Result<Vec<_>, WindingError>>()?;
    Ok(IndexReport {
        coefficients: coeffs.clone(),
        max_n,
        all_agree: rows.iter().all(|r| r.agree),
        rows,
    })
}
