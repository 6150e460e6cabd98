//! The `pchar` command line.
//!
//! Results go to standard output (or `--out`), progress to standard error.
//! Exit codes: 0 when every check passes, 1 when one fails, 2 for usage and
//! internal errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::characters::{char_bosonic, char_fermionic, CharSpec};
use crate::error::{Error, Result};
use crate::fermionic::{fermionic_sum, fermionic_sum_series};
use crate::multivar::{expand_termsum, series_to_json, termsum_to_json, TruncSeries, TruncSpec};
use crate::report::report_json;
use crate::suite::{aggregate_json, matrix, run_rows, summary_table, Profile};
use crate::toda::{j_from, JSource};
use crate::verify::{self, Identity, Params};
use crate::weights::RootVec;

#[derive(Parser, Debug)]
#[command(
    name = "pchar",
    version,
    about = "Exact q-series checks for Whittaker functions and principal subspace characters"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PCHAR_THREADS")]
    pub threads: Option<usize>,
    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The scalar product J_d as a sum of factored terms.
    Jd {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_root)]
        d: RootVec,
        #[arg(long, default_value = "explicit")]
        route: JSource,
        /// Expand into the window `D,vmin,vmax` instead of printing terms.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<TruncSpec>,
        #[arg(long)]
        json: bool,
    },
    /// The fermionic sum over configurations on an interval `r:s` or `r:inf`.
    Fermi {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_root)]
        d: RootVec,
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true, default_value = "0:inf")]
        interval: (i64, Option<i64>),
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<TruncSpec>,
        #[arg(long)]
        json: bool,
    },
    /// Checks that the generating function of J_d is a Hamiltonian eigenfunction.
    TodaVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cutoff: i64,
        #[arg(long, default_value = "explicit")]
        source: JSource,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        trials: usize,
        #[arg(long)]
        json: bool,
    },
    /// The level-k character of the principal subspace in a window.
    Char {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: i64,
        #[arg(long, default_value = "fermionic")]
        method: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "4,-20,60")]
        window: TruncSpec,
        #[arg(long)]
        json: bool,
    },
    /// Runs one named identity check and prints its JSON report.
    Verify(VerifyArgs),
    /// Runs the whole verification matrix.
    Suite {
        #[arg(long, default_value = "quick")]
        profile: Profile,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// closed-form, routes, toda, toda-solve, fermionic-j, characters, positivity,
    /// shift, convolution, sum-j-one-infty, split-tower, tower-decomposition or whittaker.
    #[arg(long)]
    pub identity: Identity,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    /// Degree (also `beta` or `gamma`), e.g. `1,2`.
    #[arg(long, value_parser = parse_root)]
    pub d: Option<RootVec>,
    #[arg(long, default_value_t = 4)]
    pub height: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub r: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<i64>,
    /// Tower boundaries `r_1,...,r_n`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub boundaries: Option<Vec<i64>>,
    #[arg(long, default_value_t = 2)]
    pub cutoff: i64,
    #[arg(long, value_parser = parse_window_raw, allow_hyphen_values = true, default_value = "4,-20,60")]
    pub window: (u32, i64, i64),
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub trials: usize,
    #[arg(long, default_value = "explicit")]
    pub source: String,
}

impl VerifyArgs {
    pub fn params(&self) -> Params {
        Params {
            n: self.n,
            k: self.k,
            d: self.d.clone(),
            height: self.height,
            r: self.r,
            s: self.s,
            boundaries: self.boundaries.clone(),
            cutoff: self.cutoff,
            window: self.window,
            seed: self.seed,
            trials: self.trials,
            source: self.source.clone(),
        }
    }
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("'{x}': {e}")))
        })
        .collect()
}

pub fn parse_root(s: &str) -> Result<RootVec> {
    let v = parse_ints(s)?;
    if v.iter().any(|&x| x < 0) {
        return Err(Error::Parse(format!("degree '{s}' has a negative entry")));
    }
    Ok(RootVec(v))
}

fn parse_window_raw(s: &str) -> Result<(u32, i64, i64)> {
    match parse_ints(s)?.as_slice() {
        &[d, lo, hi] if d >= 0 && lo <= hi => Ok((d as u32, lo, hi)),
        _ => Err(Error::Parse(format!(
            "window '{s}' is not D,vmin,vmax with D >= 0, vmin <= vmax"
        ))),
    }
}

pub fn parse_window(s: &str) -> Result<TruncSpec> {
    let (d, lo, hi) = parse_window_raw(s)?;
    TruncSpec::new(d, lo, hi)
}

pub fn parse_interval(s: &str) -> Result<(i64, Option<i64>)> {
    let (r, t) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("interval '{s}' is not r:s or r:inf")))?;
    let int = |x: &str| {
        x.trim()
            .parse::<i64>()
            .map_err(|e| Error::Parse(format!("'{x}': {e}")))
    };
    let s = match t.trim() {
        "inf" => None,
        t => Some(int(t)?),
    };
    Ok((int(r)?, s))
}

fn check_rank(n: usize, d: &RootVec) -> Result<()> {
    if n == 0 || d.rank() != n {
        return Err(Error::InvalidInput(format!(
            "degree {d} does not have rank n = {n}"
        )));
    }
    Ok(())
}

/// What a command produced: a JSON value, a human rendering, and whether
/// everything it checked passed.
struct Outcome {
    json: Value,
    text: String,
    pass: bool,
}

impl Outcome {
    fn data(json: Value, text: String) -> Self {
        Outcome {
            json,
            text,
            pass: true,
        }
    }
}

fn series_text(s: &TruncSeries) -> String {
    let mut out = String::new();
    for (z, cs) in s.window_terms() {
        let terms: Vec<String> = cs.iter().map(|(e, c)| format!("{c} v^{e}")).collect();
        out += &format!("z^{:?}: {}\n", z.0, terms.join(" + "));
    }
    out
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Jd {
            n,
            d,
            route,
            window,
            json: as_json,
        } => {
            check_rank(*n, d)?;
            let j = j_from(*route, *n, d)?;
            Ok(match window {
                Some(w) => {
                    let s = expand_termsum(&j, *w)?;
                    Outcome::data(series_to_json(&s), series_text(&s))
                }
                None => {
                    let v = termsum_to_json(&j);
                    let text = if *as_json {
                        String::new()
                    } else {
                        format!("J_{d} (n = {n}): {} terms\n{v:#}\n", j.len())
                    };
                    Outcome::data(v, text)
                }
            })
        }
        Command::Fermi {
            n,
            d,
            interval,
            window,
            ..
        } => {
            check_rank(*n, d)?;
            match (interval, window) {
                ((r, Some(s)), None) => {
                    let t = fermionic_sum(*n, d, *r, *s);
                    let v = termsum_to_json(&t);
                    Ok(Outcome::data(
                        v.clone(),
                        format!("{} configurations\n{v:#}\n", t.len()),
                    ))
                }
                ((r, Some(s)), Some(w)) => {
                    let e = expand_termsum(&fermionic_sum(*n, d, *r, *s), *w)?;
                    Ok(Outcome::data(series_to_json(&e), series_text(&e)))
                }
                ((r, None), Some(w)) => {
                    let e = fermionic_sum_series(*n, d, *r, *w)?;
                    Ok(Outcome::data(series_to_json(&e), series_text(&e)))
                }
                ((_, None), None) => Err(Error::InvalidInput(
                    "an infinite interval needs --window".into(),
                )),
            }
        }
        Command::TodaVerify {
            n,
            cutoff,
            source,
            seed,
            trials,
            ..
        } => {
            let p = Params {
                n: *n,
                cutoff: *cutoff,
                seed: *seed,
                trials: *trials,
                source: source_name(*source).into(),
                ..Params::default()
            };
            verify_outcome(Identity::Toda, &p)
        }
        Command::Char {
            n,
            k,
            method,
            window,
            ..
        } => {
            let spec = CharSpec::new(*n, *k, *window)?;
            let s = match method.as_str() {
                "fermionic" => char_fermionic(&spec),
                "bosonic" => char_bosonic(&spec)?.0,
                m => {
                    return Err(Error::Parse(format!(
                        "unknown method '{m}' (fermionic|bosonic)"
                    )))
                }
            };
            Ok(Outcome::data(series_to_json(&s), series_text(&s)))
        }
        Command::Verify(a) => verify_outcome(a.identity, &a.params()),
        Command::Suite { profile } => {
            let results = run_rows(matrix(*profile));
            let table = summary_table(&results);
            eprint!("{table}");
            let v = aggregate_json(*profile, &results);
            let pass = v["pass"].as_bool().unwrap_or(false);
            Ok(Outcome {
                json: v,
                text: table,
                pass,
            })
        }
    }
}

fn source_name(s: JSource) -> &'static str {
    match s {
        JSource::Gz => "gz",
        JSource::Explicit => "explicit",
        JSource::Solve => "solve",
    }
}

fn verify_outcome(id: Identity, p: &Params) -> Result<Outcome> {
    eprintln!("verifying {id} with seed {}", p.seed);
    let check = verify::run(id, p)?;
    let v = report_json(id.name(), p.to_json(), &check);
    let text = format!(
        "{id}: {}\n{v:#}\n",
        if check.pass { "pass" } else { "FAIL" }
    );
    Ok(Outcome {
        json: v,
        text,
        pass: check.pass,
    })
}

fn wants_json(cmd: &Command) -> bool {
    match cmd {
        Command::Jd { json, .. }
        | Command::Fermi { json, .. }
        | Command::TodaVerify { json, .. }
        | Command::Char { json, .. } => *json,
        Command::Verify(_) | Command::Suite { .. } => true,
    }
}

/// Parses `std::env::args`, runs the command and maps the outcome to an
/// exit code.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs a parsed command line; `Ok(false)` means a check failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let out = dispatch(&cli.command)?;
    let body = if wants_json(&cli.command) || cli.out.is_some() {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
        )
    } else {
        out.text
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(out.pass)
}
