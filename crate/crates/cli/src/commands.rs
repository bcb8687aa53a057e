use std::fmt::Write as _;
use std::time::Instant;

use etacoef::asymptotics::{c_p, conjecture_scan, log_grid, series_report, AsymptoticReport};
use etacoef::etaquotient::check_admissible;
use etacoef::oracle::eta_quotient_coeffs;
use etacoef::rademacher::exact_coefficient_with;
use etacoef::{is_prime, EngineOptions, Error, EtaQuotient, SeriesEvaluation, ADMISSIBLE_PRIMES};
use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Cli, Command, Format};

/// Why a command did not succeed; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Inadmissible(String),
    /// Verification found disagreements; the payload is the normal report.
    Mismatch(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Inadmissible(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn engine_failure(spec: &EtaQuotient, err: Error) -> Failure {
    match err {
        Error::Inadmissible(verdict) => Failure::Inadmissible(format!("{spec} is not admissible: {verdict}")),
        Error::ResourceCap { max_k } => usage(format!("--max-K {max_k} is too small for this coefficient")),
        other => usage(other.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
    pub precision: u32,
    #[serde(rename = "max_K")]
    pub max_k: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub source: String,
    #[serde(rename = "K")]
    pub k: Option<u64>,
    pub precision_bits: Option<u32>,
    pub tail_bound: Option<String>,
    pub int_distance: Option<String>,
}

impl Diagnostics {
    fn series(eval: &SeriesEvaluation) -> Self {
        Diagnostics {
            source: "series".into(),
            k: Some(eval.truncation_k),
            precision_bits: Some(eval.precision_bits),
            tail_bound: Some(eval.tail_bound.to_decimal(6)),
            int_distance: Some(eval.int_distance.to_decimal(6)),
        }
    }

    fn oracle() -> Self {
        Diagnostics { source: "oracle".into(), k: None, precision_bits: None, tail_bound: None, int_distance: None }
    }
}

/// The JSON document every command emits with `--format json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    pub inputs: Inputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Envelope {
    fn new(cli: &Cli, target: Option<&Target>) -> Self {
        Envelope {
            command: cli.command.name().into(),
            inputs: Inputs {
                p: cli.p,
                spec: target.map(|t| t.spec.to_string()),
                n: cli.n,
                upper: cli.upper,
                precision: cli.precision,
                max_k: cli.max_k,
            },
            value: None,
            report: None,
            diagnostics: None,
            note: None,
        }
    }

    fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes") + "\n"
    }
}

/// The quotient a command works on, from `--p` or `--spec`.
#[derive(Clone, Debug)]
struct Target {
    spec: EtaQuotient,
    p: Option<u64>,
}

impl Target {
    fn label(&self) -> String {
        match self.p {
            Some(p) => format!("a_{p}"),
            None => "g".into(),
        }
    }
}

fn target(cli: &Cli) -> Result<Option<Target>, Failure> {
    match (cli.p, &cli.spec) {
        (Some(p), _) => {
            if !is_prime(p) {
                return Err(usage(format!("--p {p} is not prime")));
            }
            Ok(Some(Target { spec: EtaQuotient::two_color(p), p: Some(p) }))
        }
        (None, Some(text)) => {
            let spec = text.parse().map_err(|e: Error| usage(format!("--spec: {e}")))?;
            Ok(Some(Target { spec, p: None }))
        }
        (None, None) => Ok(None),
    }
}

fn required_target(cli: &Cli) -> Result<Target, Failure> {
    target(cli)?.ok_or_else(|| usage(format!("{} needs --p or --spec", cli.command.name())))
}

fn engine_options(cli: &Cli) -> EngineOptions {
    EngineOptions { max_k: cli.max_k, min_precision: cli.precision, ..EngineOptions::default() }
}

pub fn run(cli: &Cli) -> Outcome {
    if cli.precision < 32 {
        return Err(usage(format!("--precision must be at least 32, got {}", cli.precision)));
    }
    if cli.max_k == 0 {
        return Err(usage("--max-K must be positive"));
    }
    match cli.command {
        Command::Coeff => coeff(cli),
        Command::Table => table(cli),
        Command::Asympt => asympt(cli),
        Command::Verify => verify(cli),
        Command::Scan => scan(cli),
        Command::Bench => bench(cli),
    }
}

/// A coefficient from the series, or from the oracle where the series does
/// not apply (`24n + Δ2 ≤ 0`).
fn coefficient(spec: &EtaQuotient, n: u64, options: &EngineOptions) -> Result<(Integer, Option<SeriesEvaluation>), Failure> {
    match exact_coefficient_with(spec, n, options) {
        Ok(eval) => {
            let value = eval.certified_integer.clone().expect("driver certifies");
            Ok((value, Some(eval)))
        }
        Err(Error::OutOfRange { .. }) => {
            let table = eta_quotient_coeffs(spec, n);
            Ok((table.coeffs[n as usize].clone(), None))
        }
        Err(e) => Err(engine_failure(spec, e)),
    }
}

fn coeff(cli: &Cli) -> Outcome {
    let target = required_target(cli)?;
    let n = cli.n.ok_or_else(|| usage("coeff needs --n"))?;
    let (value, eval) = coefficient(&target.spec, n, &engine_options(cli))?;
    let diagnostics = eval.as_ref().map(Diagnostics::series).unwrap_or_else(Diagnostics::oracle);

    Ok(match cli.format.unwrap_or(Format::Plain) {
        Format::Json => {
            let mut env = Envelope::new(cli, Some(&target));
            env.value = Some(Value::String(value.to_string()));
            env.diagnostics = Some(diagnostics);
            env.render()
        }
        Format::Csv => {
            let d = &diagnostics;
            let opt = |x: Option<String>| x.unwrap_or_default();
            format!(
                "n,value,source,K,precision_bits,tail_bound,int_distance\n{n},{value},{},{},{},{},{}\n",
                d.source,
                opt(d.k.map(|k| k.to_string())),
                opt(d.precision_bits.map(|b| b.to_string())),
                opt(d.tail_bound.clone()),
                opt(d.int_distance.clone()),
            )
        }
        Format::Plain => {
            let mut out = format!("{}({n}) = {value}\n", target.label());
            match &eval {
                Some(_) => {
                    let d = &diagnostics;
                    writeln!(
                        out,
                        "K = {}, precision_bits = {}, tail_bound = {}, int_distance = {}",
                        d.k.unwrap(),
                        d.precision_bits.unwrap(),
                        d.tail_bound.as_deref().unwrap(),
                        d.int_distance.as_deref().unwrap()
                    )
                    .unwrap();
                }
                None => out.push_str("source = q-series oracle (24n + Δ2 ≤ 0 is outside the series range)\n"),
            }
            out
        }
    })
}

fn table(cli: &Cli) -> Outcome {
    let target = required_target(cli)?;
    let order = cli.upper.ok_or_else(|| usage("table needs --N"))?;
    let table = eta_quotient_coeffs(&target.spec, order);
    Ok(match cli.format.unwrap_or(Format::Plain) {
        Format::Json => {
            let mut env = Envelope::new(cli, Some(&target));
            env.value = Some(Value::Array(table.coeffs.iter().map(|c| Value::String(c.to_string())).collect()));
            env.render()
        }
        Format::Csv => table.to_csv(),
        Format::Plain => {
            let mut out = String::new();
            for (n, c) in table.coeffs.iter().enumerate() {
                writeln!(out, "{n} {c}").unwrap();
            }
            out
        }
    })
}

fn render_report(cli: &Cli, target: &Target, report: &AsymptoticReport, note: Option<String>) -> String {
    match cli.format.unwrap_or(Format::Plain) {
        Format::Json => {
            let mut env = Envelope::new(cli, Some(target));
            env.report = Some(serde_json::to_value(report).expect("report serializes"));
            env.note = note;
            env.render()
        }
        Format::Csv => report.to_csv(),
        Format::Plain => {
            let mut out = format!("p = {}, values from {}\n", report.p, report.source);
            out.push_str("n  log a_p(n)  three-term prediction  residual*sqrt(n)\n");
            for s in &report.samples {
                writeln!(
                    out,
                    "{}  {:.15}  {:.15}  {:.10}",
                    s.n, s.exact_log, s.predicted_log, s.residual_times_sqrt_n
                )
                .unwrap();
            }
            writeln!(out, "fitted coefficient    {:.10}", report.fitted_c_coefficient).unwrap();
            writeln!(out, "predicted -c_p/(24√6) {:.10}", report.predicted_c_coefficient).unwrap();
            writeln!(out, "relative difference   {:+.4}%", 100.0 * report.relative_error()).unwrap();
            writeln!(out, "fit: {}", report.fit_protocol).unwrap();
            if let Some(note) = note {
                writeln!(out, "note: {note}").unwrap();
            }
            out
        }
    }
}

fn prime_arg(cli: &Cli) -> Result<Target, Failure> {
    if cli.spec.is_some() {
        return Err(usage(format!("{} takes --p, not --spec", cli.command.name())));
    }
    let p = cli.p.ok_or_else(|| usage(format!("{} needs --p", cli.command.name())))?;
    if !is_prime(p) {
        return Err(usage(format!("--p {p} is not prime")));
    }
    Ok(Target { spec: EtaQuotient::two_color(p), p: Some(p) })
}

fn asympt(cli: &Cli) -> Outcome {
    let target = prime_arg(cli)?;
    let p = target.p.expect("prime target");
    if !ADMISSIBLE_PRIMES.contains(&p) {
        return Err(usage(format!("--p {p} has no exact series; use scan for primes above 23")));
    }
    let upper = cli.upper.unwrap_or(10_000);
    if upper == 0 {
        return Err(usage("--N must be positive"));
    }
    let grid = log_grid((upper / 100).max(1), upper, 17);
    let report = series_report(p, &grid, cli.precision).map_err(|e| engine_failure(&target.spec, e))?;
    let c = c_p(p, cli.precision).expect("p ≥ 1");
    let note = format!("c_p = {:.20}; samples log-spaced over [N/100, N]", c);
    Ok(render_report(cli, &target, &report, Some(note)))
}

fn scan(cli: &Cli) -> Outcome {
    let target = prime_arg(cli)?;
    let p = target.p.expect("prime target");
    if p <= 23 {
        return Err(usage(format!("--p {p} ≤ 23 has an exact series; use asympt")));
    }
    let upper = cli.upper.unwrap_or(2000);
    if upper == 0 {
        return Err(usage("--N must be positive"));
    }
    let report = conjecture_scan(p, upper, cli.precision).map_err(|e| usage(e.to_string()))?;
    let note = (upper < 2000).then(|| {
        format!("N = {upper} < 2000: O(1/n) corrections are larger here, expect a wider gap to the prediction")
    });
    Ok(render_report(cli, &target, &report, note))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub spec: String,
    pub n: u64,
    pub series: String,
    pub oracle: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
    /// `(spec, n)` pairs outside the series range, checked against nothing.
    pub oracle_only: Vec<(String, u64)>,
}

fn verify_one(spec: &EtaQuotient, upper: u64, options: &EngineOptions, summary: &mut VerifySummary) -> Result<(), Failure> {
    let verdict = check_admissible(spec);
    if !verdict.is_admissible() {
        return Err(Failure::Inadmissible(format!("{spec} is not admissible: {verdict}")));
    }
    if upper == 0 {
        return Ok(());
    }
    let table = eta_quotient_coeffs(spec, upper);
    let results: Vec<(u64, Option<Integer>)> = (1..=upper)
        .into_par_iter()
        .map(|n| match exact_coefficient_with(spec, n, options) {
            Ok(eval) => Ok((n, eval.certified_integer)),
            Err(Error::OutOfRange { .. }) => Ok((n, None)),
            Err(e) => Err(engine_failure(spec, e)),
        })
        .collect::<Result<_, _>>()?;
    for (n, value) in results {
        match value {
            Some(v) => {
                summary.checks += 1;
                let expected = &table.coeffs[n as usize];
                if v != *expected {
                    summary.mismatches.push(Mismatch {
                        spec: spec.to_string(),
                        n,
                        series: v.to_string(),
                        oracle: expected.to_string(),
                    });
                }
            }
            None => summary.oracle_only.push((spec.to_string(), n)),
        }
    }
    Ok(())
}

fn verify(cli: &Cli) -> Outcome {
    let upper = cli.upper.unwrap_or(500);
    let options = engine_options(cli);
    let target = target(cli)?;
    let specs: Vec<EtaQuotient> = match &target {
        Some(t) => vec![t.spec.clone()],
        None => ADMISSIBLE_PRIMES.iter().map(|&p| EtaQuotient::two_color(p)).collect(),
    };
    let mut summary = VerifySummary::default();
    for spec in &specs {
        verify_one(spec, upper, &options, &mut summary)?;
    }

    let out = match cli.format.unwrap_or(Format::Plain) {
        Format::Json => {
            let mut env = Envelope::new(cli, target.as_ref());
            env.report = Some(serde_json::to_value(&summary).expect("summary serializes"));
            env.render()
        }
        Format::Csv => {
            let mut out = String::from("spec,n,series,oracle\n");
            for m in &summary.mismatches {
                writeln!(out, "{},{},{},{}", m.spec, m.n, m.series, m.oracle).unwrap();
            }
            out
        }
        Format::Plain => {
            let mut out = format!("{} checks, {} mismatches\n", summary.checks, summary.mismatches.len());
            for (spec, n) in &summary.oracle_only {
                writeln!(out, "oracle-only: {spec} at n = {n} (24n + Δ2 ≤ 0, no series)").unwrap();
            }
            if !summary.mismatches.is_empty() {
                out.push_str("spec  n  series  oracle\n");
                for m in &summary.mismatches {
                    writeln!(out, "{}  {}  {}  {}", m.spec, m.n, m.series, m.oracle).unwrap();
                }
            }
            out
        }
    };
    if summary.mismatches.is_empty() {
        Ok(out)
    } else {
        Err(Failure::Mismatch(out))
    }
}

/// `N, N/2, N/4, …` down to at most eight points, ascending.
pub fn bench_grid(upper: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (0..8).map(|j| upper >> j).filter(|&n| n > 0).collect();
    grid.reverse();
    grid.dedup();
    grid
}

fn bench(cli: &Cli) -> Outcome {
    let target = required_target(cli)?;
    let verdict = check_admissible(&target.spec);
    if !verdict.is_admissible() {
        return Err(Failure::Inadmissible(format!("{} is not admissible: {verdict}", target.spec)));
    }
    let upper = cli.upper.unwrap_or(1000);
    let options = engine_options(cli);
    let mut rows = Vec::new();
    for n in bench_grid(upper) {
        let start = Instant::now();
        let table = eta_quotient_coeffs(&target.spec, n);
        let oracle_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let (value, eval) = coefficient(&target.spec, n, &options)?;
        let series_seconds = start.elapsed().as_secs_f64();
        let agree = value == table.coeffs[n as usize];
        rows.push(json!({
            "n": n,
            "oracle_seconds": oracle_seconds,
            "series_seconds": series_seconds,
            "source": if eval.is_some() { "series" } else { "oracle" },
            "value": value.to_string(),
            "agree": agree,
        }));
    }
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut env = Envelope::new(cli, Some(&target));
            env.report = Some(Value::Array(rows));
            env.render()
        }
        Format::Csv | Format::Plain => {
            let mut out = String::from("n,oracle_seconds,series_seconds,source,value,agree\n");
            for r in &rows {
                writeln!(
                    out,
                    "{},{:.6},{:.6},{},{},{}",
                    r["n"],
                    r["oracle_seconds"].as_f64().unwrap(),
                    r["series_seconds"].as_f64().unwrap(),
                    r["source"].as_str().unwrap(),
                    r["value"].as_str().unwrap(),
                    r["agree"]
                )
                .unwrap();
            }
            out
        }
    })
}
