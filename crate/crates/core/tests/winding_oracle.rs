//! Brute-force check of the adaptive winding computation: a dense uniform
//! sample of the displacement curve, no refinement, summed with atan2.

use std::f64::consts::TAU;

use fpindex::index::{embed_with_clamp, winding_index};
use fpindex::{build_map, DoldCoefficients, PlanePoint, SkewProductMap};

const DENSE_SAMPLES: usize = 1 << 18;

fn dense_winding(map: &SkewProductMap, n: usize) -> f64 {
    let displacement = |theta: f64| {
        let x = PlanePoint::new(theta, 0.0);
        let (ax, ay) = embed_with_clamp(x, None);
        let (bx, by) = embed_with_clamp(map.iterate(x, n), None);
        (ay - by).atan2(ax - bx)
    };
    let first = displacement(0.0);
    let mut prev = first;
    let mut total = 0.0;
    for i in 1..=DENSE_SAMPLES {
        let angle = if i == DENSE_SAMPLES { first } else { displacement(i as f64 / DENSE_SAMPLES as f64) };
        let mut d = angle - prev;
        d -= TAU * (d / TAU).round();
        total += d;
        prev = angle;
    }
    total / TAU
}

#[test]
fn adaptive_winding_matches_dense_sampling() {
    for lit in ["1:0", "1:2", "1:-2", "1:1,2:-1", "1:0,3:1", "2:1,3:-1", "1:-1,2:2,4:1"] {
        let coeffs: DoldCoefficients = lit.parse().unwrap();
        let map = build_map(&coeffs).unwrap();
        for n in 1..=5 {
            let dense = dense_winding(&map, n);
            assert!((dense - dense.round()).abs() < 1e-6, "{lit} n={n}: dense winding {dense}");
            let adaptive = winding_index(&map, n, 20).unwrap();
            assert_eq!(adaptive, dense.round() as i64, "{lit} n={n}");
        }
    }
}
