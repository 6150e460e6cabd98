//! The verification matrix behind `pchar suite`.

use std::str::FromStr;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::report::Check;
use crate::verify::{run, Identity, Params};
use crate::weights::RootVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(Error::Parse(format!("unknown profile '{s}' (quick|full)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub criterion: u32,
    pub identity: Identity,
    pub params: Params,
}

/// A row's outcome; `error` is set when the check could not run at all.
#[derive(Clone, Debug)]
pub struct RowResult {
    pub row: Row,
    pub check: Option<Check>,
    pub error: Option<String>,
    pub elapsed: Duration,
}

impl RowResult {
    pub fn pass(&self) -> bool {
        self.check.as_ref().is_some_and(|c| c.pass)
    }
}

fn row(criterion: u32, identity: Identity, params: Params) -> Row {
    Row {
        criterion,
        identity,
        params,
    }
}

fn rv(v: &[i64]) -> Option<RootVec> {
    Some(RootVec(v.to_vec()))
}

/// Every row of the matrix; the quick profile keeps those with `n <= 2`.
pub fn matrix(profile: Profile) -> Vec<Row> {
    use Identity::*;
    let mut rows = Vec::new();
    for n in 1..=2 {
        rows.push(row(
            1,
            ClosedForm,
            Params {
                d: rv(&vec![5; n]),
                ..Params::rank(n)
            },
        ));
    }
    for n in 1..=3 {
        rows.push(row(2, Routes, Params::rank(n)));
    }
    for n in 1..=3 {
        let cutoff = if n == 3 { 4 } else { 5 };
        rows.push(row(
            3,
            Toda,
            Params {
                cutoff,
                ..Params::rank(n)
            },
        ));
        rows.push(row(
            3,
            TodaSolve,
            Params {
                cutoff,
                ..Params::rank(n)
            },
        ));
    }
    for n in 1..=3 {
        rows.push(row(4, FermionicJ, Params::rank(n)));
    }
    for (n, k) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)] {
        let window = if n == 3 { (3, -20, 60) } else { (4, -20, 60) };
        rows.push(row(
            5,
            Characters,
            Params {
                k,
                window,
                ..Params::rank(n)
            },
        ));
    }
    let shifts: [(&[i64], i64, i64); 10] = [
        (&[1], 0, 2),
        (&[2], 1, 3),
        (&[3], -1, 1),
        (&[1, 0], 0, 1),
        (&[0, 1], 1, 2),
        (&[1, 1], 0, 2),
        (&[1, 2], -1, 1),
        (&[2, 1], 0, 3),
        (&[2, 2], 1, 2),
        (&[1, 1, 1], 0, 1),
    ];
    for (d, r, s) in shifts {
        rows.push(row(
            6,
            Shift,
            Params {
                d: rv(d),
                r,
                s: Some(s),
                ..Params::rank(d.len())
            },
        ));
    }
    for k in 1..=2 {
        rows.push(row(
            6,
            Convolution,
            Params {
                k,
                d: rv(&[2]),
                ..Params::rank(1)
            },
        ));
        rows.push(row(
            6,
            Convolution,
            Params {
                k,
                d: rv(&[1, 2]),
                ..Params::rank(2)
            },
        ));
    }
    for n in 1..=2 {
        rows.push(row(6, SumJOneInfty, Params::rank(n)));
    }
    let w3 = (3, -20, 60);
    for g in [[0, 1], [1, 1], [1, 2]] {
        for r in [-1, 0] {
            rows.push(row(
                7,
                SplitTower,
                Params {
                    d: rv(&g),
                    r,
                    window: w3,
                    ..Params::rank(2)
                },
            ));
        }
    }
    for r1 in [-2, -1, 0] {
        for r2 in r1..=0 {
            let p = Params {
                d: rv(&[2, 2]),
                boundaries: Some(vec![r1, r2]),
                window: w3,
                ..Params::rank(2)
            };
            rows.push(row(7, TowerDecomposition, p));
        }
    }
    rows.push(row(
        7,
        TowerDecomposition,
        Params {
            d: rv(&[1, 1, 1]),
            boundaries: Some(vec![-1, 0, 0]),
            window: w3,
            ..Params::rank(3)
        },
    ));
    rows.push(row(
        8,
        Whittaker,
        Params {
            n: 4,
            trials: 20,
            ..Params::default()
        },
    ));
    rows.retain(|r| profile == Profile::Full || r.identity == Whittaker || r.params.n <= 2);
    rows
}

/// Runs the rows in order, reporting progress on standard error.
pub fn run_rows(rows: Vec<Row>) -> Vec<RowResult> {
    let total = rows.len();
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            eprintln!(
                "[{}/{total}] {} {}",
                i + 1,
                row.identity,
                row.params.to_json()
            );
            let t0 = Instant::now();
            let (check, error) = match run(row.identity, &row.params) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            RowResult {
                row,
                check,
                error,
                elapsed: t0.elapsed(),
            }
        })
        .collect()
}

/// The aggregate report; timings are left out so the output is reproducible.
pub fn aggregate_json(profile: Profile, results: &[RowResult]) -> Value {
    let rows: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "criterion": r.row.criterion,
                "identity": r.row.identity.name(),
                "params": r.row.params.to_json(),
                "pass": r.pass(),
                "witness": r.check.as_ref().and_then(|c| c.witness.clone()),
                "truncation_bounds": r.check.as_ref().map(|c| Value::Object(c.bounds.clone())),
                "error": r.error,
            })
        })
        .collect();
    json!({
        "profile": match profile { Profile::Quick => "quick", Profile::Full => "full" },
        "pass": results.iter().all(RowResult::pass),
        "rows": rows,
    })
}

/// A fixed-width summary table, one line per row.
pub fn summary_table(results: &[RowResult]) -> String {
    let mut out = format!(
        "{:<4} {:<16} {:<6} {:>9}  params\n",
        "crit", "identity", "result", "seconds"
    );
    for r in results {
        let p = &r.row.params;
        let mut desc = format!("n={} k={} r={}", p.n, p.k, p.r);
        if let Some(d) = &p.d {
            desc += &format!(" d={d}");
        }
        if let Some(b) = &p.boundaries {
            desc += &format!(" boundaries={b:?}");
        }
        let status = match (&r.error, r.pass()) {
            (Some(_), _) => "ERROR",
            (None, true) => "pass",
            (None, false) => "FAIL",
        };
        out += &format!(
            "{:<4} {:<16} {:<6} {:>9.3}  {desc}\n",
            r.row.criterion,
            r.row.identity.name(),
            status,
            r.elapsed.as_secs_f64()
        );
    }
    out
}
