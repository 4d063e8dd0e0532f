//! `klooster`: Kloosterman sums, trace distributions of `SL(n, 2^r)`, weight
//! distributions of the associated binary codes, and power moments.

mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use klooster_core::kloosterman::{brute_moments, KloostermanTable};
use klooster_core::moments::{moisio_moments, moments_via_code, salie_counts, MOISIO_MAX_H};
use klooster_core::sl_group::{trace_distribution_closed, trace_distribution_oracle};
use klooster_core::tables::{reproduce, TableId};
use klooster_core::verify::{run_all, VerifyConfig};
use klooster_core::weights::{
    dual_weights, full_length, weight_distribution_direct, weight_distribution_macwilliams,
};
use klooster_core::{Error, FieldSpec, GroupParams};
use serde::Serialize;

use crate::output::{Emitter, Format, Rows};

const THREADS_VAR: &str = "KLOOSTER_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "klooster",
    version,
    about = "Kloosterman sums and codes from SL(n, 2^r)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplication or trace table of a small field, as CSV.
    Field {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = FieldTable::Mul)]
        table: FieldTable,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Kloosterman sums K_m(a) for every nonzero a.
    Ksum {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Trace distribution n_beta of SL(n, q).
    Tracedist {
        #[command(flatten)]
        group: GroupArgs,
        /// Count by enumerating the group instead of the closed form.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Weight distribution C_0..C_W of the code C(SL(n, q)).
    Weights {
        #[command(flatten)]
        group: GroupArgs,
        /// Largest weight W; defaults to min(32, N).
        #[arg(long)]
        max_weight: Option<usize>,
        #[arg(long, value_enum, default_value_t = Algorithm::Direct)]
        algorithm: Algorithm,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Power moments MK_{n-1}^h for h = 0..=H.
    Moments {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 12)]
        max_h: u32,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recompute one of the four reference tables.
    Table {
        /// I, II, III or IV.
        id: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run every check; exits 1 if any fails.
    VerifyAll {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 29)]
        max_h: u32,
        #[arg(long, default_value_t = 32)]
        max_weight: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Extension degree r of GF(2^r).
    #[arg(long, default_value_t = 3)]
    r: u32,
    /// Reduction polynomial as a bitmask (decimal, 0b or 0x).
    #[arg(long, value_parser = parse_poly)]
    poly: Option<u64>,
}

impl FieldArgs {
    fn spec(&self) -> Result<FieldSpec, Failure> {
        Ok(FieldSpec::from_optional(self.r, self.poly)?)
    }
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Matrix size, a power of two.
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[command(flatten)]
    field: FieldArgs,
}

impl GroupArgs {
    fn params(&self) -> Result<GroupParams, Failure> {
        Ok(GroupParams::new(self.n, self.field.spec()?)?)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn emitter(&self) -> Emitter {
        Emitter::new(self.format, self.output.clone())
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FieldTable {
    Mul,
    Trace,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Direct,
    Macwilliams,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Recursion,
    Brute,
    Salie,
    Moisio,
    All,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Verification(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("cannot write output: {e}"))
    }
}

fn parse_poly(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = if let Some(b) = s.strip_prefix("0b").or_else(|| s.strip_prefix("0B")) {
        u64::from_str_radix(&b.replace('_', ""), 2)
    } else if let Some(h) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(&h.replace('_', ""), 16)
    } else {
        s.parse()
    };
    parsed.map_err(|e| format!("invalid polynomial {s:?}: {e}"))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_VAR} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

#[derive(Serialize)]
struct KsumEntry {
    a: u32,
    k: i64,
}

#[derive(Serialize)]
struct HistogramEntry {
    k: i64,
    count: u64,
}

#[derive(Serialize)]
struct KsumReport {
    q: u32,
    r: u32,
    poly: u64,
    m: u32,
    values: Vec<KsumEntry>,
    histogram: Vec<HistogramEntry>,
}

#[derive(Serialize)]
struct TraceEntry {
    beta: u32,
    n_beta: String,
}

#[derive(Serialize)]
struct TraceReport {
    n: u32,
    q: u32,
    #[serde(rename = "N")]
    order: String,
    method: &'static str,
    counts: Vec<TraceEntry>,
}

#[derive(Serialize)]
struct WeightReport {
    n: u32,
    q: u32,
    #[serde(rename = "N")]
    order: String,
    #[serde(rename = "W")]
    max_weight: usize,
    algorithm: &'static str,
    counts: Vec<String>,
}

#[derive(Serialize)]
struct MomentReport {
    n: u32,
    q: u32,
    #[serde(rename = "H")]
    max_h: u32,
    method: &'static str,
    values: Vec<String>,
    cross_checks: BTreeMap<&'static str, String>,
}

#[derive(Serialize)]
struct TableRow {
    index: usize,
    value: String,
}

#[derive(Serialize)]
struct TableReport {
    table: String,
    q: u32,
    index: &'static str,
    value: &'static str,
    rows: Vec<TableRow>,
}

fn decimal<T: ToString>(values: &[T]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

fn indexed(index: &str, value: &str, values: &[String]) -> Rows {
    Rows::new(
        [index, value],
        values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), v.clone()]),
    )
}

fn run_field(field: &FieldArgs, table: FieldTable, output: Option<PathBuf>) -> Result<(), Failure> {
    let spec = field.spec()?;
    if spec.degree() > 4 {
        return Err(Failure::Config(format!(
            "field tables are printed only for r <= 4, got r = {}",
            spec.degree()
        )));
    }
    let rows = match table {
        FieldTable::Mul => {
            let mut header = vec!["*".to_string()];
            header.extend(spec.elements().map(|b| b.to_string()));
            let body = spec.elements().map(|a| {
                let mut row = vec![a.to_string()];
                row.extend(spec.elements().map(|b| spec.mul(a, b).to_string()));
                row
            });
            Rows::new(header, body)
        }
        FieldTable::Trace => Rows::new(
            ["a", "trace"],
            spec.elements()
                .map(|a| vec![a.to_string(), spec.trace(a).to_string()]),
        ),
    };
    Emitter::new(Format::Csv, output).rows(&rows)?;
    Ok(())
}

fn run_ksum(field: &FieldArgs, m: u32, out: &OutputArgs) -> Result<(), Failure> {
    let spec = field.spec()?;
    let table = KloostermanTable::new(&spec, m)?;
    let values: Vec<KsumEntry> = table
        .iter()
        .map(|(a, k)| KsumEntry { a: a.bits(), k })
        .collect();
    let rows = Rows::new(
        ["a", "k"],
        values
            .iter()
            .map(|e| vec![e.a.to_string(), e.k.to_string()]),
    );
    let report = KsumReport {
        q: spec.order(),
        r: spec.degree(),
        poly: spec.poly(),
        m,
        values,
        histogram: table
            .histogram()
            .into_iter()
            .map(|(k, count)| HistogramEntry { k, count })
            .collect(),
    };
    out.emitter().emit(&report, &rows)?;
    Ok(())
}

fn run_tracedist(group: &GroupArgs, oracle: bool, out: &OutputArgs) -> Result<(), Failure> {
    let params = group.params()?;
    let dist = if oracle {
        trace_distribution_oracle(&params)?
    } else {
        trace_distribution_closed(&params)?
    };
    dist.check()?;
    let counts: Vec<TraceEntry> = dist
        .iter()
        .map(|(beta, c)| TraceEntry {
            beta: beta.bits(),
            n_beta: c.to_string(),
        })
        .collect();
    let rows = Rows::new(
        ["beta", "n_beta"],
        counts
            .iter()
            .map(|e| vec![e.beta.to_string(), e.n_beta.clone()]),
    );
    let report = TraceReport {
        n: params.n(),
        q: params.q(),
        order: params.order().to_string(),
        method: if oracle { "enumeration" } else { "closed" },
        counts,
    };
    out.emitter().emit(&report, &rows)?;
    Ok(())
}

fn run_weights(
    group: &GroupArgs,
    max_weight: Option<usize>,
    algorithm: Algorithm,
    out: &OutputArgs,
) -> Result<(), Failure> {
    let params = group.params()?;
    let w = match max_weight {
        Some(w) => w,
        None => full_length(&params)?.min(32),
    };
    let direct = || -> Result<_, Failure> {
        Ok(weight_distribution_direct(
            &trace_distribution_closed(&params)?,
            w,
        )?)
    };
    let macwilliams = || -> Result<_, Failure> {
        Ok(weight_distribution_macwilliams(&dual_weights(&params)?, w)?)
    };
    let (dist, name) = match algorithm {
        Algorithm::Direct => (direct()?, "direct"),
        Algorithm::Macwilliams => (macwilliams()?, "macwilliams"),
        Algorithm::Both => {
            let (d, m) = (direct()?, macwilliams()?);
            if d != m {
                return Err(Failure::Verification(
                    "direct and MacWilliams weight distributions differ".into(),
                ));
            }
            (d, "both")
        }
    };
    dist.check()?;
    let counts = decimal(dist.counts());
    let rows = indexed("w", "frequency", &counts);
    let report = WeightReport {
        n: params.n(),
        q: params.q(),
        order: params.order().to_string(),
        max_weight: w,
        algorithm: name,
        counts,
    };
    out.emitter().emit(&report, &rows)?;
    Ok(())
}

fn salie_values(params: &GroupParams, max_h: u32) -> Result<Vec<num_bigint::BigInt>, Failure> {
    if params.n() != 2 {
        return Err(Failure::Config("the Salie method needs n = 2".into()));
    }
    if max_h == 0 {
        return Ok(vec![(params.q() - 1).into()]);
    }
    Ok(salie_counts(params.spec(), max_h - 1)?.moments())
}

fn moisio_values(params: &GroupParams, max_h: u32) -> Result<Vec<num_bigint::BigInt>, Failure> {
    if params.n() != 2 {
        return Err(Failure::Config("closed forms need n = 2".into()));
    }
    if max_h > MOISIO_MAX_H {
        return Err(Failure::Config(format!(
            "closed forms cover h <= {MOISIO_MAX_H}, got --max-h {max_h}"
        )));
    }
    Ok(moisio_moments(params.spec(), max_h)?)
}

fn run_moments(
    group: &GroupArgs,
    max_h: u32,
    method: Method,
    out: &OutputArgs,
) -> Result<(), Failure> {
    let params = group.params()?;
    let brute =
        || -> Result<_, Failure> { Ok(brute_moments(params.spec(), params.n() - 1, max_h)?) };
    let mut cross_checks = BTreeMap::new();
    let (values, name) = match method {
        Method::Recursion => (moments_via_code(&params, max_h)?.into_values(), "recursion"),
        Method::Brute => (brute()?, "brute"),
        Method::Salie => (salie_values(&params, max_h)?, "salie"),
        Method::Moisio => (moisio_values(&params, max_h)?, "moisio"),
        Method::All => {
            let values = moments_via_code(&params, max_h)?.into_values();
            let verdict = |other: Result<Vec<num_bigint::BigInt>, Failure>| match other {
                Ok(v) if v[..] == values[..v.len()] => "pass".to_string(),
                Ok(_) => "fail".to_string(),
                Err(Failure::Config(reason)) => format!("skipped: {reason}"),
                Err(Failure::Verification(reason)) => format!("fail: {reason}"),
            };
            cross_checks.insert("brute", verdict(brute()));
            cross_checks.insert("salie", verdict(salie_values(&params, max_h)));
            cross_checks.insert(
                "moisio",
                verdict(moisio_values(&params, max_h.min(MOISIO_MAX_H))),
            );
            (values, "all")
        }
    };
    let failed: Vec<&str> = cross_checks
        .iter()
        .filter(|(_, v)| v.starts_with("fail"))
        .map(|(k, _)| *k)
        .collect();
    let values = decimal(&values);
    let rows = indexed("i", "MK", &values);
    let report = MomentReport {
        n: params.n(),
        q: params.q(),
        max_h,
        method: name,
        values,
        cross_checks,
    };
    out.emitter().emit(&report, &rows)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "cross-checks failed: {}",
            failed.join(", ")
        )))
    }
}

fn run_table(id: &str, out: &OutputArgs) -> Result<(), Failure> {
    let id: TableId = id.parse()?;
    let values = decimal(&reproduce(id)?);
    let rows = indexed(id.index_label(), id.value_label(), &values);
    let report = TableReport {
        table: id.to_string(),
        q: 1 << id.degree(),
        index: id.index_label(),
        value: id.value_label(),
        rows: values
            .into_iter()
            .enumerate()
            .map(|(index, value)| TableRow { index, value })
            .collect(),
    };
    out.emitter().emit(&report, &rows)?;
    Ok(())
}

fn run_verify(
    group: &GroupArgs,
    max_h: u32,
    max_weight: usize,
    out: &OutputArgs,
) -> Result<(), Failure> {
    let params = group.params()?;
    let config = VerifyConfig {
        n: params.n(),
        spec: *params.spec(),
        max_h,
        max_weight,
    };
    let report = run_all(&config);
    let rows = Rows::new(
        ["check", "passed", "detail"],
        report
            .checks
            .iter()
            .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]),
    );
    out.emitter().emit(&report, &rows)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} checks failed",
            report.failed
        )))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Field {
            field,
            table,
            output,
        } => run_field(&field, table, output),
        Command::Ksum { field, m, out } => run_ksum(&field, m, &out),
        Command::Tracedist { group, oracle, out } => run_tracedist(&group, oracle, &out),
        Command::Weights {
            group,
            max_weight,
            algorithm,
            out,
        } => run_weights(&group, max_weight, algorithm, &out),
        Command::Moments {
            group,
            max_h,
            method,
            out,
        } => run_moments(&group, max_h, method, &out),
        Command::Table { id, out } => run_table(&id, &out),
        Command::VerifyAll {
            group,
            max_h,
            max_weight,
            out,
        } => run_verify(&group, max_h, max_weight, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_notations() {
        assert_eq!(parse_poly("0b1011"), Ok(11));
        assert_eq!(parse_poly("0x13"), Ok(19));
        assert_eq!(parse_poly("19"), Ok(19));
        assert_eq!(parse_poly("0b1_0011"), Ok(19));
        assert!(parse_poly("0b102").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
