//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification identity fails, 2 on a
//! usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{CacheError, CacheStatus, SeriesCache, SeriesKey};
use crate::diagrams::mu_max;
use crate::laurent::LaurentPoly;
use crate::qseries::{series_hnnr, series_y0, QSeries};
use crate::strata::{
    chi_series, closed_form_b, closed_form_x, verify_tables, ClosedForms, StrataError, StrataTables,
    VerifyOptions,
};

pub const CACHE_DIR_ENV: &str = "HILBERT_STRATA_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hilbert-strata", version, about = "E-polynomials of generator-number strata of punctual Hilbert schemes")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Truncation order: largest number of points n.
    #[arg(long, global = true)]
    max_n: Option<usize>,

    /// Largest number of generators m shown (default: the maximum possible for max-n).
    #[arg(long, global = true)]
    max_m: Option<u32>,

    /// Largest r for nested-scheme tables and fixed-point checks.
    #[arg(long, global = true)]
    max_r: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Directory for cached series.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a table of E-polynomials or Euler characteristics.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
    },
    /// Cross-check both pipelines and all identities.
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Fast)]
        level: VerifyLevel,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// E(B^[n]_m), punctual strata.
    Bm,
    /// E(H^[n]_m), strata of the full Hilbert scheme.
    Hm,
    /// Euler characteristics of B^[n]_m.
    Chi,
    /// E(Y_0^[n]), points on the punctured plane.
    Y0,
    /// E(H^[n,n+r]), nested schemes.
    Hnnr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub max_n: usize,
    pub max_m: u32,
    pub max_r: usize,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub verify_level: VerifyLevel,
}

impl RunConfig {
    pub fn for_table(max_n: usize) -> Self {
        Self {
            max_n,
            max_m: mu_max(max_n as u32),
            max_r: 4,
            format: Format::Json,
            cache_dir: None,
            verify_level: VerifyLevel::Fast,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// A rendered table: rows indexed by `n`, columns by `m` (or `r`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub kind: TableKind,
    pub row_label: String,
    pub col_label: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub cells: Vec<Vec<LaurentPoly>>,
}

impl Table {
    pub fn cell(&self, row: usize, col: usize) -> Option<&LaurentPoly> {
        let i = self.rows.iter().position(|&r| r == row)?;
        let j = self.cols.iter().position(|&c| c == col)?;
        Some(&self.cells[i][j])
    }

    fn header(&self, col: usize) -> String {
        if self.col_label.is_empty() {
            "E".to_string()
        } else {
            format!("{}={col}", self.col_label)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialise")
    }

    /// One row per `n`, one column per `m`; cells in canonical form.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.row_label.clone()];
        header.extend(self.cols.iter().map(|&c| self.header(c)));
        w.write_record(&header)?;
        for (n, row) in self.rows.iter().zip(&self.cells) {
            let mut rec = vec![n.to_string()];
            rec.extend(row.iter().map(LaurentPoly::to_canonical_string));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Parses the output of [`Table::to_csv`] back into a table of `kind`.
    pub fn from_csv(kind: TableKind, text: &str) -> Result<Self, String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().map_err(|e| e.to_string())?.clone();
        let row_label = headers.get(0).ok_or("missing header")?.to_string();
        let mut col_label = String::new();
        let mut cols = Vec::new();
        for h in headers.iter().skip(1) {
            match h.split_once('=') {
                Some((label, c)) => {
                    col_label = label.to_string();
                    cols.push(c.parse().map_err(|_| format!("bad column header {h:?}"))?);
                }
                None => cols.push(0),
            }
        }
        let mut rows = Vec::new();
        let mut cells = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            rows.push(rec.get(0).ok_or("empty record")?.parse().map_err(|_| "bad row label")?);
            cells.push(
                rec.iter()
                    .skip(1)
                    .map(|c| c.parse::<LaurentPoly>().map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(Self { kind, row_label, col_label, rows, cols, cells })
    }

    /// A LaTeX `tabular` with cells in the `t^4+2 t^3-t` style.
    pub fn to_latex(&self) -> String {
        let mut s = format!("\\begin{{tabular}}{{|c|{}}}\\hline\n", "c|".repeat(self.cols.len()));
        let mut header = vec![format!("${}$", self.row_label)];
        header.extend(self.cols.iter().map(|&c| format!("${}$", self.header(c))));
        s.push_str(&header.join(" & "));
        s.push_str(" \\\\\\hline\n");
        for (n, row) in self.rows.iter().zip(&self.cells) {
            let mut line = vec![n.to_string()];
            line.extend(row.iter().map(|c| format!("${}$", c.to_latex())));
            s.push_str(&line.join(" & "));
            s.push_str(" \\\\\\hline\n");
        }
        s.push_str("\\end{tabular}\n");
        s
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => self.to_json() + "\n",
            Format::Csv => self.to_csv()?,
            Format::Latex => self.to_latex(),
        })
    }
}

/// Fetches series through the cache when one is configured.
struct SeriesSource {
    cache: Option<SeriesCache>,
    warnings: Vec<String>,
}

impl SeriesSource {
    fn new(cache_dir: Option<&PathBuf>) -> Result<Self, CliError> {
        Ok(Self {
            cache: cache_dir.map(SeriesCache::open).transpose()?,
            warnings: Vec::new(),
        })
    }

    fn get<F>(&mut self, name: &str, params: &[i64], order: usize, compute: F) -> Result<QSeries, CliError>
    where
        F: Fn(usize) -> Result<QSeries, StrataError>,
    {
        let Some(cache) = &self.cache else {
            return Ok(compute(order)?);
        };
        let key = SeriesKey::new(name, params);
        let (series, status) = cache.get_or_compute(&key, order, compute)?;
        if let CacheStatus::Invalidated(reason) = status {
            self.warnings.push(format!(
                "warning: cache entry {} invalidated ({reason}); recomputed",
                cache.path_for(&key, order).display()
            ));
        }
        Ok(series)
    }
}

/// Builds the requested table; also returns warnings for stderr.
pub fn build_table(kind: TableKind, config: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let mut src = SeriesSource::new(config.cache_dir.as_ref())?;
    let mut warnings = Vec::new();
    let n = config.max_n;
    let bound = mu_max(n as u32);
    if config.max_m > bound && matches!(kind, TableKind::Bm | TableKind::Hm | TableKind::Chi) {
        warnings.push(format!(
            "warning: --max-m {} exceeds {bound}, the largest number of generators for n <= {n}; extra columns are zero",
            config.max_m
        ));
    }
    let (col_label, cols, series): (&str, Vec<usize>, Vec<QSeries>) = match kind {
        TableKind::Bm => {
            let cols: Vec<usize> = (2..=config.max_m as usize).collect();
            let s = cols
                .iter()
                .map(|&m| src.get("closed_b", &[m as i64], n, |k| closed_form_b(m as u32, k)))
                .collect::<Result<_, _>>()?;
            ("m", cols, s)
        }
        TableKind::Hm => {
            let cols: Vec<usize> = (1..=config.max_m as usize).collect();
            let s = cols
                .iter()
                .map(|&m| src.get("closed_x", &[m as i64], n, |k| closed_form_x(m as u32, k)))
                .collect::<Result<_, _>>()?;
            ("m", cols, s)
        }
        TableKind::Chi => {
            let cols: Vec<usize> = (2..=config.max_m as usize).collect();
            let s = cols
                .iter()
                .map(|&m| src.get("chi", &[m as i64], n, |k| Ok(chi_series(m as u32, k))))
                .collect::<Result<_, _>>()?;
            ("m", cols, s)
        }
        TableKind::Y0 => ("", vec![0], vec![src.get("y0", &[], n, |k| Ok(series_y0(k)))?]),
        TableKind::Hnnr => {
            let cols: Vec<usize> = (1..=config.max_r).collect();
            let s = cols
                .iter()
                .map(|&r| src.get("hnnr", &[r as i64], n, |k| Ok(series_hnnr(r, k))))
                .collect::<Result<_, _>>()?;
            ("r", cols, s)
        }
    };
    let rows: Vec<usize> = (0..=n).collect();
    let cells = rows
        .iter()
        .map(|&i| series.iter().map(|s| s.coeff(i)).collect())
        .collect();
    warnings.extend(src.warnings);
    Ok((
        Table {
            kind,
            row_label: "n".to_string(),
            col_label: col_label.to_string(),
            rows,
            cols,
            cells,
        },
        warnings,
    ))
}

/// Verification bounds for a level, with explicit flags taking precedence.
pub fn verify_options(level: VerifyLevel, max_n: Option<usize>, max_r: Option<usize>) -> VerifyOptions {
    let (order, r) = match level {
        VerifyLevel::Fast => (8, 3),
        VerifyLevel::Full => (14, 4),
    };
    let order = max_n.unwrap_or(order);
    let mut opts = VerifyOptions::for_order(order);
    opts.fixed_point_max_r = max_r.unwrap_or(r);
    opts.fixed_point_max_n = order;
    opts
}

#[derive(Serialize)]
struct FailureReport<'a> {
    status: &'static str,
    order: usize,
    failing: Vec<&'a crate::strata::CheckOutcome>,
}

fn run_verify(
    opts: &VerifyOptions,
    cache_dir: Option<&PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut src = SeriesSource::new(cache_dir)?;
    let order = opts.order;
    let tables = StrataTables::compute(order);
    let max_m = tables.max_m() as u32;
    let mut closed = ClosedForms { b: Vec::new(), x: Vec::new(), chi: Vec::new() };
    for m in 1..=max_m {
        closed.b.push(src.get("closed_b", &[i64::from(m)], order, |k| closed_form_b(m, k))?);
        closed.x.push(src.get("closed_x", &[i64::from(m)], order, |k| closed_form_x(m, k))?);
        closed.chi.push(src.get("chi", &[i64::from(m)], order, |k| Ok(chi_series(m, k)))?);
    }
    for w in &src.warnings {
        writeln!(err, "{w}")?;
    }
    let report = verify_tables(&tables, &closed, opts);
    if report.passed() {
        write!(out, "{report}")?;
        writeln!(out, "all {} checks passed at order {order}", report.checks.len())?;
        Ok(EXIT_OK)
    } else {
        let failure = FailureReport {
            status: "mismatch",
            order,
            failing: report.failing().collect(),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&failure).expect("report serialises"))?;
        Ok(EXIT_MISMATCH)
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Table { kind } => {
            let max_n = cli.max_n.unwrap_or(14);
            let config = RunConfig {
                max_n,
                max_m: cli.max_m.unwrap_or_else(|| mu_max(max_n as u32)),
                max_r: cli.max_r.unwrap_or(4),
                format: cli.format,
                cache_dir: cli.cache_dir.clone(),
                verify_level: VerifyLevel::Fast,
            };
            build_table(kind, &config).and_then(|(table, warnings)| {
                for w in warnings {
                    writeln!(err, "{w}")?;
                }
                out.write_all(table.render(config.format)?.as_bytes())?;
                Ok(EXIT_OK)
            })
        }
        Command::Verify { level } => {
            let opts = verify_options(level, cli.max_n, cli.max_r);
            run_verify(&opts, cli.cache_dir.as_ref(), out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(e @ CliError::Strata(_)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_MISMATCH
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
