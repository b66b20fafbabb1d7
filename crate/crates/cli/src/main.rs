// Copyright 2026 The unscathed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line driver.

mod config;

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use unscathed::cubature::CubatureSettings;
use unscathed::montecarlo::{estimate_cn_sim, mc_integrate_region, McEstimate};
use unscathed::regions::{compose_cn, compose_p, find_region, region_catalog, CoefficientMode, QuadrantSignature, RegionSpec};
use unscathed::report::{
    assemble_tables, format_uncertainty, parse_records, render_tables, Method, RecordMetadata, ResultRecord,
    TableFormat, UncertaintyKind,
};
use unscathed::verify::{self, AuditInput, VerificationReport};

use config::RunConfig;

const EXIT_VERIFY: u8 = 1;
const EXIT_FAILURE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "unscathed", version, about = "Survival probability of the origin among random snipers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    max_evaluations: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "UNSCATHED_THREADS")]
    threads: Option<usize>,
    /// Results file (JSON lines); new records are appended.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<TableFormat>,
    /// Pentagon weighting used when composing c5.
    #[arg(long, global = true, value_parser = parse_mode)]
    coefficient_mode: Option<CoefficientMode>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Adaptive cubature of one region or all of them.
    Regions {
        #[arg(long)]
        signature: Option<QuadrantSignature>,
    },
    /// Monte Carlo integration of one region or all of them.
    McIntegrate {
        #[arg(long)]
        signature: Option<QuadrantSignature>,
    },
    /// Direct simulation of the point process: P and c2..c5.
    Simulate,
    /// Run the verification suites.
    Verify,
    /// Tables from the stored results.
    Report,
    /// Consistency audit of composed values and the pentagon weighting.
    Audit,
}

fn parse_format(s: &str) -> Result<TableFormat, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown format {s}; expected json, csv or markdown"))
}

fn parse_mode(s: &str) -> Result<CoefficientMode, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown mode {s}; expected as-printed or swapped-pentagon"))
}

fn build_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if common.samples.is_some() {
        cfg.samples = common.samples;
    }
    if common.abs_tol.is_some() {
        cfg.abs_tol = common.abs_tol;
    }
    if common.rel_tol.is_some() {
        cfg.rel_tol = common.rel_tol;
    }
    if common.max_evaluations.is_some() {
        cfg.max_evaluations = common.max_evaluations;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if let Some(p) = &common.output {
        cfg.output = p.clone();
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    if let Some(m) = common.coefficient_mode {
        cfg.coefficient_mode = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn append_records(cfg: &RunConfig, records: &[ResultRecord]) -> Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&cfg.output)
        .with_context(|| format!("opening {}", cfg.output.display()))?;
    for r in records {
        writeln!(f, "{}", r.to_json_line())?;
    }
    Ok(())
}

fn load_records(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    match std::fs::read_to_string(&cfg.output) {
        Ok(text) => Ok(parse_records(&text)?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e).with_context(|| format!("reading {}", cfg.output.display())),
    }
}

fn selected(signature: &Option<QuadrantSignature>) -> Result<Vec<&'static RegionSpec>> {
    match signature {
        Some(s) => Ok(vec![find_region(s).ok_or_else(|| anyhow!("no region with signature {s}"))?]),
        None => Ok(region_catalog().iter().collect()),
    }
}

fn meta(seed: Option<u64>, evaluations: Option<u64>, converged: Option<bool>, start: Instant) -> RecordMetadata {
    RecordMetadata { seed, evaluations, converged, wall_time_s: Some(start.elapsed().as_secs_f64()) }
}

/// c2..c5 and P records when every region has a value.
fn composed_records(
    values: &BTreeMap<QuadrantSignature, (f64, f64)>,
    method: Method,
    kind: UncertaintyKind,
    mode: CoefficientMode,
    metadata: &RecordMetadata,
) -> Result<Vec<ResultRecord>> {
    if values.len() != region_catalog().len() {
        return Ok(Vec::new());
    }
    let v: BTreeMap<_, _> = values.iter().map(|(k, (x, _))| (k.clone(), *x)).collect();
    let c = compose_cn(&v, mode)?;
    let combine = |parts: Vec<f64>| match kind {
        UncertaintyKind::ErrorBound => parts.iter().sum::<f64>(),
        UncertaintyKind::OneSigma => parts.iter().map(|u| u * u).sum::<f64>().sqrt(),
    };
    let mut out = Vec::new();
    let mut uncs = Vec::new();
    for (slot, n) in (2..=5usize).enumerate() {
        let parts = unscathed::regions::composition(n, mode).iter().map(|(s, w)| w * values[s].1).collect();
        let u = combine(parts);
        uncs.push(u);
        out.push(ResultRecord::new(format!("c{n}"), method, c[slot], u, kind, metadata.clone())?);
    }
    out.push(ResultRecord::new("P", method, compose_p(&c), combine(uncs), kind, metadata.clone())?);
    Ok(out)
}

fn print_records(records: &[ResultRecord]) {
    for r in records {
        println!("{:<12} {:<16} {}", r.quantity, r.method.label(), format_uncertainty(r.value, r.uncertainty));
    }
}

fn cmd_regions(cfg: &RunConfig, signature: &Option<QuadrantSignature>) -> Result<u8> {
    let mut records = Vec::new();
    let mut values = BTreeMap::new();
    let mut all_converged = true;
    let mut evaluations = 0;
    let start_all = Instant::now();
    for spec in selected(signature)? {
        let start = Instant::now();
        let (abs, rel) = cfg.tolerance_for(&spec.signature);
        let mut settings = CubatureSettings::new(abs, spec.dim());
        settings.rel_tol = rel;
        if let Some(m) = cfg.max_evaluations {
            settings.max_evaluations = m;
        }
        let est = unscathed::cubature::integrate_region(spec, &settings)?.total;
        all_converged &= est.converged;
        evaluations += est.evaluations;
        if !est.converged {
            eprintln!("{}: budget exhausted with error bound {:.3e}", spec.signature, est.error_bound);
        }
        values.insert(spec.signature.clone(), (est.value, est.error_bound));
        records.push(ResultRecord::new(
            spec.signature.to_string(),
            Method::Cubature,
            est.value,
            est.error_bound,
            UncertaintyKind::ErrorBound,
            meta(None, Some(est.evaluations), Some(est.converged), start),
        )?);
    }
    let m = meta(None, Some(evaluations), Some(all_converged), start_all);
    records.extend(composed_records(&values, Method::Cubature, UncertaintyKind::ErrorBound, cfg.coefficient_mode, &m)?);
    print_records(&records);
    append_records(cfg, &records)?;
    Ok(if all_converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn cmd_mc_integrate(cfg: &RunConfig, signature: &Option<QuadrantSignature>) -> Result<u8> {
    let samples = cfg.samples.unwrap_or(10_000_000);
    let mut records = Vec::new();
    let mut values = BTreeMap::new();
    let start_all = Instant::now();
    for (idx, spec) in region_catalog().iter().enumerate() {
        if selected(signature)?.iter().all(|s| s.signature != spec.signature) {
            continue;
        }
        let start = Instant::now();
        // Each region gets its own seed so single-region runs match full runs.
        let seed = cfg.seed.wrapping_add(idx as u64);
        let est = mc_integrate_region(spec, samples, seed);
        values.insert(spec.signature.clone(), (est.mean, est.stderr));
        records.push(ResultRecord::new(
            spec.signature.to_string(),
            Method::McIntegration,
            est.mean,
            est.stderr,
            UncertaintyKind::OneSigma,
            meta(Some(seed), Some(samples), None, start),
        )?);
    }
    let m = meta(Some(cfg.seed), Some(samples * values.len() as u64), None, start_all);
    records.extend(composed_records(&values, Method::McIntegration, UncertaintyKind::OneSigma, cfg.coefficient_mode, &m)?);
    print_records(&records);
    append_records(cfg, &records)?;
    Ok(0)
}

fn cmd_simulate(cfg: &RunConfig) -> Result<u8> {
    let samples = cfg.samples.unwrap_or(10_000_000);
    let start = Instant::now();
    let s = estimate_cn_sim(samples, cfg.seed)?;
    let m = meta(Some(cfg.seed), Some(samples), None, start);
    let rec = |q: &str, e: &McEstimate| {
        ResultRecord::new(q, Method::McSimulation, e.mean, e.stderr, UncertaintyKind::OneSigma, m.clone())
    };
    let mut records = vec![rec("P", &s.p)?];
    for (slot, e) in s.c.iter().enumerate() {
        records.push(rec(&format!("c{}", slot + 2), e)?);
    }
    records.push(rec("mean-shooters", &s.mean_shooters)?);
    print_records(&records);
    println!("shooter histogram (0..=5): {:?}", s.histogram);
    append_records(cfg, &records)?;
    Ok(0)
}

fn emit(cfg: &RunConfig, reports: &[VerificationReport]) {
    for r in reports {
        if cfg.format == TableFormat::Json {
            println!("{}", serde_json::to_string(r).expect("reports serialize"));
        } else {
            println!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.check);
            for line in &r.summary {
                println!("    {line}");
            }
            for w in &r.witnesses {
                println!("    witness {w}");
            }
        }
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<u8> {
    let n = cfg.samples.unwrap_or(100_000) as usize;
    let seed = cfg.seed;
    let reports = vec![
        verify::verify_w_oracle(n.min(1000), seed),
        verify::verify_region_bidirectional(n, seed),
        verify::verify_nondegenerate(n, seed),
        verify::verify_jacobian(n.min(1000), seed),
        verify::verify_slice_rules(n, seed),
        verify::counterexample_probe(),
    ];
    let start = Instant::now();
    let c2 = verify::c2_cartesian_check(1e-8)?;
    let rec = ResultRecord::new(
        "c2",
        Method::CartesianCheck,
        c2.value,
        c2.error_bound,
        UncertaintyKind::ErrorBound,
        meta(None, Some(c2.evaluations), Some(c2.converged), start),
    )?;
    emit(cfg, &reports);
    print_records(std::slice::from_ref(&rec));
    append_records(cfg, &[rec])?;
    Ok(if reports.iter().all(|r| r.passed) { 0 } else { EXIT_VERIFY })
}

fn cmd_report(cfg: &RunConfig) -> Result<u8> {
    let records = load_records(cfg)?;
    let tables = assemble_tables(&records, cfg.coefficient_mode);
    print!("{}", render_tables(&tables, cfg.format));
    Ok(if tables.inconsistencies.is_empty() { 0 } else { EXIT_VERIFY })
}

fn cmd_audit(cfg: &RunConfig) -> Result<u8> {
    let samples = cfg.samples.unwrap_or(4_000_000);
    let records = load_records(cfg)?;
    let mut region_values = BTreeMap::new();
    for method in [Method::McIntegration, Method::Cubature] {
        for r in records.iter().filter(|r| r.method == method) {
            if let Ok(sig) = r.quantity.parse::<QuadrantSignature>() {
                region_values.insert(sig, r.value);
            }
        }
    }
    // Regions without stored values are estimated by Monte Carlo integration.
    for (idx, spec) in region_catalog().iter().enumerate() {
        if !region_values.contains_key(&spec.signature) {
            let est = mc_integrate_region(spec, samples, cfg.seed.wrapping_add(idx as u64));
            region_values.insert(spec.signature.clone(), est.mean);
        }
    }
    let input = AuditInput { region_values, pentagon_classes: verify::class_integrals(5, samples, cfg.seed) };
    let report = verify::consistency_audit(&input);
    emit(cfg, std::slice::from_ref(&report));
    Ok(if report.passed { 0 } else { EXIT_VERIFY })
}

fn run(cli: Cli, cfg: RunConfig) -> Result<u8> {
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Regions { signature } => cmd_regions(&cfg, signature),
        Command::McIntegrate { signature } => cmd_mc_integrate(&cfg, signature),
        Command::Simulate => cmd_simulate(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Report => cmd_report(&cfg),
        Command::Audit => cmd_audit(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let cfg = match build_config(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli, cfg) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
