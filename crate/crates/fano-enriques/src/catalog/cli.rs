//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 fixture mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::golden::{standard_baskets, verify_fixtures};
use super::{bundled_catalog, load_catalog};
use crate::enumeration::{enumerate_all, enumerate_bt, EnumerationOptions};
use crate::exact::{format_rational, parse_rational};
use crate::gradedrings::{action_weights, infer_presentation};
use crate::hilbert::{altinok_series, bigraded_series, FanoData, FanoEnriquesData};
use crate::orbifold::{SingularityType, TypeBasket};
use crate::quotient::{search, SearchOptions};
use crate::series::BigradedSeries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

/// Default truncation for `search`, past the default inference bound so
/// that late relations are seen rather than cut off.
pub const SEARCH_TRUNC: usize = 40;

#[derive(Parser, Debug)]
#[command(
    name = "fano-enriques",
    version,
    about = "Hilbert series, torsion baskets and cyclic quotients of Fano threefolds"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Highest power of t computed (search defaults to 40).
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Give up inference past this t-degree.
    #[arg(long, global = true, default_value_t = 24)]
    pub max_degree: usize,
    /// Require chi(i sigma) = 0 rather than >= 0.
    #[arg(long, global = true)]
    pub strict_r5: bool,
    /// JSON output.
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Plain-text output (the default).
    #[arg(long, global = true)]
    pub table: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hilbert series of a Fano threefold from -K^3 and its basket.
    Hilbert(FanoArgs),
    /// Bigraded series of a Fano threefold with a torsion divisor.
    Bigraded(DataArgs),
    /// Generators and relations read off a series.
    Infer(InferArgs),
    /// Admissible torsion baskets.
    EnumerateBt {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        r: Option<usize>,
        #[arg(long)]
        all: bool,
    },
    /// Quotients of the covers in a catalog (a file or a bundled name such as codim1).
    Search {
        #[arg(long)]
        catalog: String,
        #[arg(long)]
        r: Option<usize>,
    },
    /// Check the bundled golden files.
    VerifyFixtures,
}

#[derive(Args, Debug)]
pub struct FanoArgs {
    /// Basket point such as 1/2(1,1,1) or 3x1/2(1,1,1); repeatable.
    #[arg(long = "basket")]
    pub basket: Vec<String>,
    /// -K^3 as an integer or fraction.
    #[arg(long, allow_hyphen_values = true)]
    pub k3: String,
}

#[derive(Args, Debug)]
pub struct DataArgs {
    /// JSON object {"r", "minusK3", "bt", "be"}.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub data: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InferArgs {
    /// JSON file holding a series {"r", "trunc", "coeffs"}.
    #[arg(long, conflicts_with_all = ["data", "k3"])]
    pub series: Option<PathBuf>,
    /// Bigraded data as for `bigraded`.
    #[arg(long, conflicts_with = "k3")]
    pub data: Option<String>,
    #[arg(long = "basket")]
    pub basket: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k3: Option<String>,
}

/// Parses `[Nx]1/r(a,b,c)`.
pub fn parse_basket(items: &[String]) -> Result<TypeBasket, String> {
    let mut b = TypeBasket::new();
    for item in items {
        let (count, ty) = match item.split_once('x') {
            Some((n, t)) if !n.contains('/') => (
                n.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad multiplicity in {item:?}"))?,
                t,
            ),
            _ => (1, item.as_str()),
        };
        let t: SingularityType = ty.parse().map_err(|e| format!("{item:?}: {e}"))?;
        b.add(t, count);
    }
    Ok(b)
}

fn fano_data(basket: &[String], k3: &str) -> Result<FanoData, String> {
    let k3 = parse_rational(k3).map_err(|e| e.to_string())?;
    FanoData::new(k3, parse_basket(basket)?).map_err(|e| e.to_string())
}

fn fe_data(data: &Option<String>, file: &Option<PathBuf>) -> Result<FanoEnriquesData, String> {
    let text = match (data, file) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) => {
            std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?
        }
        (None, None) => return Err("one of --data or --file is required".to_string()),
    };
    serde_json::from_str(&text).map_err(|e| format!("invalid data: {e}"))
}

fn coefficient_line(row: &[crate::exact::Rational]) -> String {
    row.iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(", ")
}

fn json<T: Serialize>(out: &mut dyn Write, v: &T) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("serializable")
    )
}

#[derive(Serialize)]
struct SeriesOutput<'a> {
    series: &'a BigradedSeries,
    text: String,
}

/// Runs the command line and returns the exit code.
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
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, String> {
    let g = &cli.global;
    let trunc = g.trunc.unwrap_or(20);
    let enumeration = EnumerationOptions {
        strict_r5: g.strict_r5,
    };
    let io = |e: std::io::Error| e.to_string();
    match &cli.command {
        Command::Hilbert(a) => {
            let data = fano_data(&a.basket, &a.k3)?;
            let s = altinok_series(&data, trunc).map_err(|e| e.to_string())?;
            if g.json {
                json(
                    out,
                    &SeriesOutput {
                        series: &s,
                        text: s.to_string(),
                    },
                )
                .map_err(io)?;
            } else {
                writeln!(out, "{}", coefficient_line(s.component(0))).map_err(io)?;
                writeln!(out, "{s}").map_err(io)?;
            }
        }
        Command::Bigraded(a) => {
            let data = fe_data(&a.data, &a.file)?;
            let s = bigraded_series(&data, trunc).map_err(|e| e.to_string())?;
            if g.json {
                json(
                    out,
                    &SeriesOutput {
                        series: &s,
                        text: s.to_string(),
                    },
                )
                .map_err(io)?;
            } else {
                for i in 0..s.r() {
                    writeln!(out, "e^{i}: {}", coefficient_line(s.component(i))).map_err(io)?;
                }
            }
        }
        Command::Infer(a) => {
            let s = if let Some(p) = &a.series {
                let text =
                    std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                serde_json::from_str::<BigradedSeries>(&text)
                    .map_err(|e| format!("invalid series: {e}"))?
            } else if a.data.is_some() {
                bigraded_series(&fe_data(&a.data, &None)?, trunc).map_err(|e| e.to_string())?
            } else if let Some(k3) = &a.k3 {
                altinok_series(&fano_data(&a.basket, k3)?, trunc).map_err(|e| e.to_string())?
            } else {
                return Err("one of --series, --data or --k3 is required".to_string());
            };
            let p = infer_presentation(&s, g.max_degree).map_err(|e| e.to_string())?;
            if g.json {
                json(out, &p).map_err(io)?;
            } else {
                writeln!(out, "{p}").map_err(io)?;
                if let Ok(a) = action_weights(&p) {
                    writeln!(out, "action {a}").map_err(io)?;
                }
            }
        }
        Command::EnumerateBt { r, all } => {
            let lists = if *all {
                enumerate_all(enumeration)
            } else {
                let r = r.ok_or("--r or --all is required")?;
                vec![(r, enumerate_bt(r, enumeration).map_err(|e| e.to_string())?)]
            };
            if g.json {
                let flat: Vec<_> = lists.iter().flat_map(|(_, v)| v.iter()).collect();
                json(out, &flat).map_err(io)?;
            } else {
                for (_, v) in &lists {
                    for c in v {
                        writeln!(out, "{c}").map_err(io)?;
                    }
                }
            }
        }
        Command::Search { catalog, r } => {
            let path = PathBuf::from(catalog);
            let covers = if path.exists() {
                load_catalog(&path).map_err(|e| e.to_string())?
            } else {
                bundled_catalog(catalog).map_err(|e| e.to_string())?
            };
            let opts = SearchOptions {
                r: *r,
                trunc: g.trunc.unwrap_or(SEARCH_TRUNC),
                max_degree: g.max_degree,
            };
            let report = search(&covers, &standard_baskets(enumeration), opts);
            if g.json {
                json(out, &report).map_err(io)?;
            } else {
                for (codim, list) in report.by_codim() {
                    writeln!(out, "codimension {codim}: {} quotient(s)", list.len()).map_err(io)?;
                    for c in list {
                        writeln!(out, "  {c}").map_err(io)?;
                    }
                }
                let counts: Vec<String> = report
                    .rejection_counts()
                    .iter()
                    .map(|(k, v)| format!("{k} {v}"))
                    .collect();
                writeln!(
                    out,
                    "rejected: {}",
                    if counts.is_empty() {
                        "none".to_string()
                    } else {
                        counts.join(", ")
                    }
                )
                .map_err(io)?;
                for d in &report.diagnostics {
                    writeln!(
                        out,
                        "note: {} with Bt {}: {}",
                        d.cover, d.bt_label, d.message
                    )
                    .map_err(io)?;
                }
            }
        }
        Command::VerifyFixtures => {
            let opts = SearchOptions {
                r: None,
                trunc: g.trunc.unwrap_or(SEARCH_TRUNC),
                max_degree: g.max_degree,
            };
            let checks = verify_fixtures(enumeration, opts);
            if g.json {
                json(out, &checks).map_err(io)?;
            } else {
                for c in &checks {
                    writeln!(
                        out,
                        "{} {}: {}",
                        if c.passed { "ok  " } else { "FAIL" },
                        c.name,
                        c.detail
                    )
                    .map_err(io)?;
                }
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(EXIT_MISMATCH);
            }
        }
    }
    Ok(EXIT_OK)
}
