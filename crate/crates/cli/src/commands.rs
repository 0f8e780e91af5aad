use serde_json::{json, Value};
use theta_quartic::chars::{derived_forms, enumerate_aronhold};
use theta_quartic::json::{complex_vec, parse_tau, TauFile};
use theta_quartic::pipeline::{run as run_pipeline, select_system, PipelineConfig, PipelineOutput};
use theta_quartic::random::random_tau;
use theta_quartic::selftest::{run_selftest, SelftestConfig};
use theta_quartic::{Complex64, Error, PeriodMatrix, QuadForm, QuarticCurve, TruncationPolicy};

use crate::{Cli, Command, Failure};

fn fmt_c(c: &Complex64) -> String {
    format!("{:+.6e}{:+.6e}i", c.re, c.im)
}

pub fn parse_eps(text: &str) -> Result<[i8; 3], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Failure::input(format!("--eps expects three signs like +1,+1,-1, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = [0i8; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = match p {
            "+1" | "1" | "+" => 1,
            "-1" | "-" => -1,
            _ => return Err(bad()),
        };
    }
    Ok(out)
}

fn policy(cli: &Cli) -> Result<TruncationPolicy, Failure> {
    if !(cli.tail > 0.0 && cli.tail <= 1e-6) {
        return Err(Failure::input(format!("--tail must lie in (0, 1e-6], got {}", cli.tail)));
    }
    Ok(TruncationPolicy::with_tail(cli.tail))
}

fn pipeline_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    if !(cli.tol > 0.0) {
        return Err(Failure::input(format!("--tol must be positive, got {}", cli.tol)));
    }
    Ok(PipelineConfig { policy: policy(cli)?, eps: parse_eps(&cli.eps)?, tol: cli.tol, ..Default::default() })
}

fn load_tau(cli: &Cli) -> Result<PeriodMatrix, Failure> {
    let path = cli.tau.as_ref().ok_or_else(|| Failure::input("--tau <path> is required for this command"))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(parse_tau(&text)?)
}

fn emit(cli: &Cli, value: &impl serde::Serialize) {
    if cli.json {
        println!("{}", serde_json::to_string(value).expect("serializable report"));
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify => classify(cli),
        Command::Aronhold => aronhold(cli),
        Command::Bitangents => bitangents(cli),
        Command::Quartic => quartic(cli),
        Command::Verify => verify(cli),
        Command::Selftest => selftest(cli),
        Command::RandomTau => emit_random_tau(cli),
    }
}

type CmdResult = Result<(), Failure>;

fn classify(cli: &Cli) -> CmdResult {
    let mut rows = Vec::new();
    eprintln!("{:<10} {:>6} {:>4}", "char", "parity", "arf");
    for q in QuadForm::all() {
        let parity = if q.is_odd() { "odd" } else { "even" };
        eprintln!("{:<10} {:>6} {:>4}", q.characteristic().to_string(), parity, q.arf());
        rows.push(json!({ "q": q.characteristic(), "parity": parity, "arf": q.arf() }));
    }
    let even = QuadForm::even().len();
    let odd = QuadForm::odd().len();
    eprintln!("total: {even} even, {odd} odd; origin {} is even", QuadForm::ORIGIN.characteristic());
    emit(cli, &json!({ "forms": rows, "even": even, "odd": odd }));
    Ok(())
}

fn aronhold(cli: &Cli) -> CmdResult {
    let sys = select_system(cli.system_index)?;
    let count = enumerate_aronhold().len();
    let derived = derived_forms(&sys)?;
    eprintln!("Aronhold system ({} of {count}):", cli.system_index.map_or("reference".to_string(), |i| format!("#{i}")));
    for i in 1..=7 {
        eprintln!("  q{i} = {}", sys.q(i).characteristic());
    }
    eprintln!("  sum = {}", derived.sum.characteristic());
    for ((i, j), q) in &derived.pairs {
        eprintln!("  q{i}{j} = {}", q.characteristic());
    }
    let pairs: Vec<Value> = derived
        .pairs
        .iter()
        .map(|((i, j), q)| json!({ "label": format!("q{i}{j}"), "q": q.characteristic() }))
        .collect();
    let system: Vec<_> = sys.forms().iter().map(|q| q.characteristic()).collect();
    emit(cli, &json!({ "index": cli.system_index, "count": count, "system": system, "pairs": pairs }));
    Ok(())
}

fn compute(cli: &Cli) -> Result<PipelineOutput, Failure> {
    let config = pipeline_config(cli)?;
    let tau = load_tau(cli)?;
    let sys = select_system(cli.system_index)?;
    run_pipeline(&tau, &sys, &config).map_err(|e| {
        if let Error::SpecialLocus(chars) = &e {
            emit(cli, &json!({ "error": "special-locus", "vanishing": chars }));
        }
        e.into()
    })
}

fn require_all_pass(out: &PipelineOutput) -> CmdResult {
    let s = out.summary();
    if s.fail == 0 {
        Ok(())
    } else {
        Err(Failure::invariant(format!("{} of {} lines failed the bitangency check", s.fail, s.pass + s.fail)))
    }
}

fn print_summary(out: &PipelineOutput) {
    let s = out.summary();
    eprintln!("bitangency: {} pass, {} fail, max residual {:.3e}", s.pass, s.fail, s.max_residual);
}

fn bitangents(cli: &Cli) -> CmdResult {
    let out = compute(cli)?;
    eprintln!("{:<5} {:<10} {:<90} {:>10}", "label", "char", "line", "residual");
    for (b, r) in out.bitangents.iter().zip(&out.reports) {
        let c = b.line.coeffs();
        let line = format!("({}, {}, {})", fmt_c(&c[0]), fmt_c(&c[1]), fmt_c(&c[2]));
        eprintln!("{:<5} {:<10} {:<90} {:>10.3e}", b.label, b.q.characteristic().to_string(), line, r.residual);
    }
    print_summary(&out);
    emit(cli, &out.to_json(true));
    require_all_pass(&out)
}

fn quartic(cli: &Cli) -> CmdResult {
    let out = compute(cli)?;
    for (e, c) in QuarticCurve::monomials().iter().zip(&out.quartic.coeffs) {
        eprintln!("X1^{} X2^{} X3^{}  {}", e[0], e[1], e[2], fmt_c(c));
    }
    let xi: Vec<_> = out.frame.xi.iter().map(|l| complex_vec(l.coeffs())).collect();
    emit(
        cli,
        &json!({
            "monomials": QuarticCurve::monomials(),
            "quartic": complex_vec(&out.quartic.coeffs),
            "xi": xi,
            "k": complex_vec(&out.frame.k),
            "lambda": complex_vec(&out.frame.lambda),
        }),
    );
    Ok(())
}

fn verify(cli: &Cli) -> CmdResult {
    let out = compute(cli)?;
    for (b, r) in out.bitangents.iter().zip(&out.reports) {
        let flag = if r.near_flex { " near-flex" } else { "" };
        let verdict = if r.is_bitangent { "ok" } else { "FAIL" };
        eprintln!("{:<5} {:<10} {:<4} residual {:.3e}{flag}", b.label, b.q.characteristic().to_string(), verdict, r.residual);
    }
    print_summary(&out);
    emit(cli, &out.verify_json());
    require_all_pass(&out)
}

fn selftest(cli: &Cli) -> CmdResult {
    let config = SelftestConfig { samples: cli.samples, seed: cli.seed, pipeline: pipeline_config(cli)? };
    let checks = run_selftest(&config);
    for c in &checks {
        eprintln!("{:<4} {:<30} {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    emit(cli, &json!({ "checks": checks, "failed": failed }));
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::invariant(format!("{failed} self-test check(s) failed")))
    }
}

fn emit_random_tau(cli: &Cli) -> CmdResult {
    let tau = random_tau(cli.seed, &policy(cli)?)?;
    println!("{}", serde_json::to_string_pretty(&TauFile::from_matrix(&tau)).expect("serializable matrix"));
    Ok(())
}
