//! End-to-end acceptance run. Each criterion prints one line to the real
//! stderr (bypassing the test harness capture) and the test fails if any
//! criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use theta_quartic::chars::{char_sum, complete_4tuple, enumerate_aronhold, parse_bracket};
use theta_quartic::linalg::cross_residual;
use theta_quartic::pipeline::{run, PipelineConfig};
use theta_quartic::random::random_tau;
use theta_quartic::theta::{addition_formula_residual, theta, theta_series, CVec3};
use theta_quartic::weber::{aronhold_coeffs_dets, jacobi_ratio, solve_k, solve_lambda, weber_coefficients, weber_symbolic};
use theta_quartic::{
    AronholdSystem, Characteristic, Complex64, PeriodMatrix, QuadForm, ThetaTable, TruncationPolicy,
};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
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
    std::array::from_fn(|_| c(rng.random_range(-size..size), rng.random_range(-size..size)))
}

fn sample(seed: u64) -> PeriodMatrix {
    random_tau(seed, &TruncationPolicy::default()).expect("admissible sample")
}

fn within(name: &str, value: f64, limit: f64) -> Outcome {
    let msg = format!("{name} {value:.2e} < {limit:.0e}");
    if value < limit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{out}, {:.1}s", t.as_secs_f64()))
    } else {
        Err(format!("{out}, but took {:.1}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
    }
}

fn genus1(a: i32, b: i32, t: Complex64, z: Complex64) -> Complex64 {
    (-40..=40)
        .map(|n| {
            let p = n as f64 + a as f64 / 2.0;
            (c(0.0, PI) * (t * (p * p) + (z + b as f64 / 2.0) * (2.0 * p))).exp()
        })
        .sum()
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(10), || {
        let even = QuadForm::even().len();
        let odd = QuadForm::odd().len();
        let systems = enumerate_aronhold().len();
        let msg = format!("{even} even, {odd} odd, {systems} Aronhold systems");
        if (even, odd, systems) == (36, 28, 288) {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

fn criterion_2() -> Outcome {
    let golden = [
        [("[100|001]", "[000|101]", "[101|000]", "[001|100]"), ("[010|101]", "[110|001]", "[011|100]", "[111|000]"), ("[000|111]", "[100|011]", "[001|110]", "[101|010]")],
        [("[110|110]", "[000|101]", "[101|000]", "[011|011]"), ("[000|010]", "[110|001]", "[011|100]", "[101|111]"), ("[010|000]", "[100|011]", "[001|110]", "[111|101]")],
        [("[110|110]", "[100|001]", "[001|100]", "[011|011]"), ("[000|010]", "[010|101]", "[111|000]", "[101|111]"), ("[010|000]", "[000|111]", "[101|010]", "[111|101]")],
    ];
    let rho = [[1, 1, 1], [1, 1, -1], [1, 1, -1]];
    let imaginary_rows = [true, true, false];
    let ch = |s: &str| parse_bracket(s).map(|q| q.characteristic()).ok_or_else(|| format!("bad bracket {s}"));
    let sys = AronholdSystem::reference();
    let mut mismatches = Vec::new();
    for i in 1..=3 {
        let turns: Vec<u8> = (1..=3).map(|j| weber_symbolic(&sys, i, j).map(|t| t.quarter_turns).unwrap_or(9)).collect();
        for j in 1..=3 {
            let t = weber_symbolic(&sys, i, j).map_err(|e| e.to_string())?;
            let (n0, n1, d0, d1) = golden[i - 1][j - 1];
            if t.numerator != [ch(n0)?, ch(n1)?] || t.denominator != [ch(d0)?, ch(d1)?] {
                mismatches.push(format!("a{i}{j} characteristics"));
            }
            if t.rho != rho[i - 1][j - 1] {
                mismatches.push(format!("rho{i}{j}"));
            }
            if (t.quarter_turns % 2 == 1) != imaginary_rows[i - 1] {
                mismatches.push(format!("a{i}{j} phase"));
            }
        }
        // rows 1, 2 share one phase; row 3 reads (−, +, +) up to its sign
        let pattern_ok = if i < 3 {
            turns[0] == turns[1] && turns[1] == turns[2]
        } else {
            turns[1] == turns[2] && (turns[0] + 2) % 4 == turns[1]
        };
        if !pattern_ok {
            mismatches.push(format!("row {i} relative signs {turns:?}"));
        }
    }
    if mismatches.is_empty() {
        Ok("9/9 entries: characteristics, phases and rho match".into())
    } else {
        Err(mismatches.join(", "))
    }
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(30), || {
        let pol = TruncationPolicy::default();
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        let all: Vec<Characteristic> = QuadForm::all().map(|q| q.characteristic()).collect();
        let (mut reduction, mut parity, mut fd) = (0.0f64, 0.0f64, 0.0f64);
        for seed in 0..5 {
            let tau = sample(seed);
            let table = ThetaTable::new(&tau, &pol).map_err(|e| e.to_string())?;
            let z = small_vec(&mut rng, 0.3);
            for m in &all {
                let n: [i32; 6] = std::array::from_fn(|_| rng.random_range(-2..=2));
                let lifted = *m + 2 * Characteristic::new([n[0], n[1], n[2]], [n[3], n[4], n[5]]);
                let sign: i32 = (0..3).map(|i| m.m_prime[i] * n[3 + i]).sum();
                let sign = if sign % 2 == 0 { 1.0 } else { -1.0 };
                let literal = theta_series(&lifted, &tau, &z, &pol).map_err(|e| e.to_string())?;
                let base = theta_series(m, &tau, &z, &pol).map_err(|e| e.to_string())?;
                reduction = reduction.max(rel(literal, base * sign));
                let g = table.gradient(m);
                let size = if m.is_odd() { table.constant(m).norm() } else { g.iter().map(|x| x.norm()).fold(0.0, f64::max) };
                parity = parity.max(size / table.scale());
                if m.is_odd() {
                    let gnorm = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
                    let h = 1e-5;
                    for i in 0..3 {
                        let mut zp = [c(0.0, 0.0); 3];
                        let mut zm = zp;
                        zp[i] = c(h, 0.0);
                        zm[i] = c(-h, 0.0);
                        let d = (theta(m, &tau, &zp, &pol).map_err(|e| e.to_string())?
                            - theta(m, &tau, &zm, &pol).map_err(|e| e.to_string())?)
                            / (2.0 * h);
                        fd = fd.max((d - g[i]).norm() / gnorm);
                    }
                }
            }
        }
        let t = [c(0.1, 1.1), c(-0.3, 0.8), c(0.45, 1.6)];
        let diag = PeriodMatrix::diagonal(t).map_err(|e| e.to_string())?;
        let z = [c(0.05, -0.1), c(0.2, 0.03), c(-0.1, 0.07)];
        let mut factor = 0.0f64;
        for m in &all {
            let got = theta(m, &diag, &z, &pol).map_err(|e| e.to_string())?;
            let want: Complex64 = (0..3).map(|i| genus1(m.m_prime[i], m.m_double_prime[i], t[i], z[i])).product();
            factor = factor.max(rel(got, want));
        }
        let parts = [
            within("reduction", reduction, 1e-10),
            within("parity", parity, 1e-10),
            within("finite-difference", fd, 1e-7),
            within("genus-1", factor, 1e-10),
        ];
        let text: Vec<String> = parts.iter().map(|p| p.clone().unwrap_or_else(|e| e)).collect();
        if parts.iter().all(Result::is_ok) {
            Ok(text.join(", "))
        } else {
            Err(text.join(", "))
        }
    })
}

fn criterion_4() -> Outcome {
    let pol = TruncationPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let sys = AronholdSystem::reference();
    let q = |i| sys.q(i);
    let proof = [char_sum(&[q(5), q(6), q(7)]), q(5).characteristic(), q(6).characteristic(), -q(7).characteristic()];
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let v = small_vec(&mut rng, 0.3);
        let r = addition_formula_residual(&proof, &[c(0.0, 0.0); 3], &v, &sample(seed), &pol).map_err(|e| e.to_string())?;
        worst = worst.max(r);
    }
    let tau = sample(5);
    let pick = |rng: &mut ChaCha8Rng| Characteristic::new(std::array::from_fn(|_| rng.random_range(0..2)), std::array::from_fn(|_| rng.random_range(0..2)));
    for _ in 0..10 {
        let (m1, m2, m3) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let s = m1 + m2 + m3;
        let m4 = Characteristic::new(s.m_prime.map(|x| x % 2), s.m_double_prime.map(|x| x % 2)) + 2 * pick(&mut rng);
        let u = small_vec(&mut rng, 0.3);
        let v = small_vec(&mut rng, 0.3);
        worst = worst.max(addition_formula_residual(&[m1, m2, m3, m4], &u, &v, &tau, &pol).map_err(|e| e.to_string())?);
    }
    within("max residual over 15 cases", worst, 1e-9)
}

fn criterion_5() -> Outcome {
    let systems = enumerate_aronhold();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut ident, mut across) = (0.0f64, 0.0f64);
    for n in 0..20u64 {
        let table = ThetaTable::new(&sample(n % 10), &TruncationPolicy::default()).map_err(|e| e.to_string())?;
        let sys = systems[rng.random_range(0..systems.len())];
        let mut idx: Vec<usize> = (1..=7).collect();
        for k in (1..idx.len()).rev() {
            idx.swap(k, rng.random_range(0..=k));
        }
        let quad = [sys.q(idx[0]), sys.q(idx[1]), sys.q(idx[2]), sys.q(idx[3])];
        let completions = complete_4tuple(quad).map_err(|e| e.to_string())?;
        let mut rhs = Vec::new();
        for comp in completions {
            let (l, r) = jacobi_ratio(quad, comp, &table).map_err(|e| e.to_string())?;
            ident = ident.max(rel(l, r));
            rhs.push(r);
        }
        across = across.max(rel(rhs[0], rhs[1]));
    }
    let a = within("identity", ident, 1e-8);
    let b = within("completions", across, 1e-8);
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(format!("20 samples, {x}, {y}")),
        (x, y) => Err(format!("{}, {}", x.unwrap_or_else(|e| e), y.unwrap_or_else(|e| e))),
    }
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let table = ThetaTable::new(&sample(seed), &TruncationPolicy::default()).map_err(|e| e.to_string())?;
        let frame = weber_coefficients(&AronholdSystem::reference(), &table, [1, 1, 1]).map_err(|e| e.to_string())?;
        let lambda = solve_lambda(&frame.a).map_err(|e| e.to_string())?;
        let k = solve_k(&frame.a, &lambda).map_err(|e| e.to_string())?;
        worst = k.iter().map(|x| (x - 1.0).norm()).fold(worst, f64::max);
    }
    within("max |k_i - 1| over 10 samples", worst, 1e-8)
}

fn criterion_7_and_8() -> (Outcome, Outcome) {
    let start = Instant::now();
    let sys = AronholdSystem::reference();
    let (mut pass, mut total, mut worst, mut cross) = (0usize, 0usize, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for seed in 0..10 {
        let tau = sample(seed);
        match run(&tau, &sys, &PipelineConfig::default()) {
            Ok(out) => {
                if out.quartic.is_zero() {
                    failures.push(format!("seed {seed}: zero quartic"));
                }
                let s = out.summary();
                pass += s.pass;
                total += s.pass + s.fail;
                worst = worst.max(s.max_residual);
                match aronhold_coeffs_dets(&sys, &out.table) {
                    Ok(d) => cross = (0..3).map(|i| cross_residual(&d[i], &out.frame.a[i])).fold(cross, f64::max),
                    Err(e) => failures.push(format!("seed {seed}: {e}")),
                }
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let seven = format!("{pass}/{total} lines bitangent over 10 samples, max residual {worst:.2e}, {secs:.1}s");
    let seven = if failures.is_empty() && pass == 280 && total == 280 && worst < 1e-6 && secs < 120.0 {
        Ok(seven)
    } else {
        Err(format!("{seven}; {}", failures.join("; ")))
    };
    let eight = if failures.is_empty() { within("max row cross residual", cross, 1e-8) } else { Err(failures.join("; ")) };
    (seven, eight)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = dir.path().join("identity.json");
    let text = serde_json::to_string(&theta_quartic::json::TauFile::from_matrix(&PeriodMatrix::i_identity())).map_err(|e| e.to_string())?;
    std::fs::write(&path, text).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_theta-quartic"))
        .args(["bitangents", "--json", "--tau"])
        .arg(&path)
        .env_remove("THETA_QUARTIC_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let listed = report["vanishing"].as_array().map_or(0, Vec::len);
    let msg = format!("exit {code:?}, {listed} vanishing even characteristics reported");
    if code == Some(2) && listed > 0 && report["error"] == "special-locus" {
        Ok(msg)
    } else {
        Err(msg)
    }
}

#[test]
fn acceptance() {
    let (seven, eight) = criterion_7_and_8();
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        seven,
        eight,
        criterion_9(),
    ];
    let mut err = std::io::stderr().lock();
    for (n, r) in results.iter().enumerate() {
        let line = match r {
            Ok(detail) => format!("criterion {}: PASS ({detail})", n + 1),
            Err(detail) => format!("criterion {}: FAIL ({detail})", n + 1),
        };
        writeln!(err, "{line}").unwrap();
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| r.is_err()).map(|(n, _)| n + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
