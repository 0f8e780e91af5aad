#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use theta_quartic::random::random_tau;
use theta_quartic::theta::CVec3;
use theta_quartic::{Complex64, PeriodMatrix, ThetaTable, TruncationPolicy};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn tau(seed: u64) -> PeriodMatrix {
    random_tau(seed, &TruncationPolicy::default()).unwrap()
}

pub fn table(seed: u64) -> ThetaTable {
    ThetaTable::new(&tau(seed), &TruncationPolicy::default()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_vec(rng: &mut ChaCha8Rng, size: f64) -> CVec3 {
    std::array::from_fn(|_| c(rng.random_range(-size..size), rng.random_range(-size..size)))
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Genus-1 theta with characteristic (a, b) ∈ {0,1}², summed over |n| ≤ 40
/// straight from the definition.
pub fn theta_genus1(a: i32, b: i32, t: Complex64, z: Complex64) -> Complex64 {
    let mut s = c(0.0, 0.0);
    for n in -40..=40 {
        let p = n as f64 + a as f64 / 2.0;
        let arg = t * (p * p) + (z + b as f64 / 2.0) * (2.0 * p);
        s += (c(0.0, PI) * arg).exp();
    }
    s
}
