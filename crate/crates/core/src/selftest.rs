//! Named invariant checks at seeded random period matrices, plus the exact
//! combinatorial facts. Backs the `selftest` command.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chars::{char_sum, enumerate_aronhold, parse_bracket, AronholdSystem, Characteristic, QuadForm};
use crate::error::Result;
use crate::linalg::cross_residual;
use crate::pipeline::{run_with_table, PipelineConfig};
use crate::random::random_tau;
use crate::theta::{addition_formula_residual_with, theta, theta_series, CVec3, PeriodMatrix, ThetaTable, ZERO3};
use crate::weber::{aronhold_coeffs_dets, jacobi_ratio, solve_k, solve_lambda, weber_symbolic};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckOutcome { name: name.to_string(), pass, detail }
    }

    fn bound(name: &str, value: f64, limit: f64) -> Self {
        CheckOutcome::new(name, value < limit, format!("max {value:.3e} (limit {limit:.0e})"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub samples: usize,
    pub seed: u64,
    pub pipeline: PipelineConfig,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { samples: 5, seed: 0, pipeline: PipelineConfig::default() }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

fn small_vec(rng: &mut ChaCha8Rng, size: f64) -> CVec3 {
    std::array::from_fn(|_| Complex64::new(rng.random_range(-size..size), rng.random_range(-size..size)))
}

pub fn combinatorial_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let even = QuadForm::even().len();
    let odd = QuadForm::odd().len();
    out.push(CheckOutcome::new("form-counts", even == 36 && odd == 28, format!("{even} even, {odd} odd")));
    let n = enumerate_aronhold().len();
    out.push(CheckOutcome::new("aronhold-count", n == 288, format!("{n} systems")));

    let sys = AronholdSystem::reference();
    let rho: Vec<i8> = (1..=3).flat_map(|i| (1..=3).map(move |j| (i, j))).map(|(i, j)| weber_symbolic(&sys, i, j).map(|t| t.rho).unwrap_or(0)).collect();
    let want_rho = [1, 1, 1, 1, 1, -1, 1, 1, -1];
    out.push(CheckOutcome::new("reference-rho-table", rho == want_rho, format!("{rho:?}")));

    let ch = |s: &str| parse_bracket(s).map(|q| q.characteristic());
    let golden_ok = weber_symbolic(&sys, 2, 2).is_ok_and(|t| {
        Some(t.numerator.to_vec()) == [ch("[000|010]"), ch("[110|001]")].into_iter().collect()
            && Some(t.denominator.to_vec()) == [ch("[011|100]"), ch("[101|111]")].into_iter().collect()
    });
    out.push(CheckOutcome::new("reference-a22-characteristics", golden_ok, String::new()));
    out
}

struct Sample {
    tau: PeriodMatrix,
    table: ThetaTable,
}

fn numeric_checks(samples: &[Sample], rng: &mut ChaCha8Rng, config: &PipelineConfig) -> Result<Vec<CheckOutcome>> {
    let pol = &config.policy;
    let sys = AronholdSystem::reference();
    let all: Vec<Characteristic> = QuadForm::all().map(|q| q.characteristic()).collect();
    let mut reduction = 0.0f64;
    let mut odd_const = 0.0f64;
    let mut even_grad = 0.0f64;
    let mut fd = 0.0f64;
    let mut addition = 0.0f64;
    let mut jacobi = 0.0f64;
    let mut k_dev = 0.0f64;
    let mut cross = 0.0f64;
    let mut bitangent_fail = 0usize;
    let mut bitangent_max = 0.0f64;

    for s in samples {
        let z = small_vec(rng, 0.3);
        for m in &all {
            let n: [i32; 6] = std::array::from_fn(|_| rng.random_range(-2..=2));
            let shifted = *m + 2 * Characteristic::new([n[0], n[1], n[2]], [n[3], n[4], n[5]]);
            let literal = theta_series(&shifted, &s.tau, &z, pol)?;
            reduction = reduction.max(rel(literal, theta(&shifted, &s.tau, &z, pol)?));
            let g = s.table.gradient(m);
            let gnorm = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if m.is_odd() {
                odd_const = odd_const.max(s.table.constant(m).norm() / s.table.scale());
            } else {
                even_grad = even_grad.max(gnorm / s.table.scale());
            }
        }

        let h = 1e-5;
        for q in QuadForm::odd() {
            let m = q.characteristic();
            let g = s.table.gradient(&m);
            let gnorm = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
            for i in 0..3 {
                let mut zp = ZERO3;
                let mut zm = ZERO3;
                zp[i] = Complex64::new(h, 0.0);
                zm[i] = Complex64::new(-h, 0.0);
                let d = (theta(&m, &s.tau, &zp, pol)? - theta(&m, &s.tau, &zm, pol)?) / (2.0 * h);
                fd = fd.max((d - g[i]).norm() / gnorm);
            }
        }

        let q = |i: usize| sys.q(i);
        let ms = [char_sum(&[q(5), q(6), q(7)]), q(5).characteristic(), q(6).characteristic(), -q(7).characteristic()];
        let v = small_vec(rng, 0.3);
        addition = addition.max(addition_formula_residual_with(&ms, &ZERO3, &v, &s.tau, pol, config.exec)?);

        let quad = [q(1), q(2), q(3), q(4)];
        for completion in crate::chars::complete_4tuple(quad)? {
            let (l, r) = jacobi_ratio(quad, completion, &s.table)?;
            jacobi = jacobi.max(rel(l, r));
        }

        let out = run_with_table(s.table.clone(), &sys, config)?;
        let lambda = solve_lambda(&out.frame.a)?;
        let k = solve_k(&out.frame.a, &lambda)?;
        k_dev = k.iter().map(|x| (x - 1.0).norm()).fold(k_dev, f64::max);
        let dets = aronhold_coeffs_dets(&sys, &s.table)?;
        cross = (0..3).map(|i| cross_residual(&dets[i], &out.frame.a[i])).fold(cross, f64::max);
        bitangent_fail += out.reports.iter().filter(|r| !r.is_bitangent).count();
        bitangent_max = out.reports.iter().map(|r| r.residual).fold(bitangent_max, f64::max);
    }

    Ok(vec![
        CheckOutcome::bound("reduction-sign", reduction, 1e-10),
        CheckOutcome::bound("odd-constants-vanish", odd_const, 1e-10),
        CheckOutcome::bound("even-gradients-vanish", even_grad, 1e-10),
        CheckOutcome::bound("gradient-finite-difference", fd, 1e-7),
        CheckOutcome::bound("addition-formula", addition, 1e-9),
        CheckOutcome::bound("jacobi-identity", jacobi, 1e-8),
        CheckOutcome::bound("normalization-k", k_dev, 1e-8),
        CheckOutcome::bound("determinant-rows-match", cross, 1e-8),
        CheckOutcome::new(
            "bitangents-28",
            bitangent_fail == 0,
            format!("{} failures over {} samples, max residual {bitangent_max:.3e}", bitangent_fail, samples.len()),
        ),
    ])
}

/// Runs every check; numeric ones use `samples` period matrices drawn from
/// consecutive seeds starting at `seed`.
pub fn run_selftest(config: &SelftestConfig) -> Vec<CheckOutcome> {
    let mut out = combinatorial_checks();
    let pol = &config.pipeline.policy;
    let samples: Result<Vec<Sample>> = (0..config.samples as u64)
        .map(|i| {
            let tau = random_tau(config.seed.wrapping_add(i), pol)?;
            let table = ThetaTable::new_with(&tau, pol, config.pipeline.exec)?;
            Ok(Sample { tau, table })
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    match samples.and_then(|s| numeric_checks(&s, &mut rng, &config.pipeline)) {
        Ok(checks) => out.extend(checks),
        Err(e) => out.push(CheckOutcome::new("numeric-suite", false, e.to_string())),
    }
    out
}
