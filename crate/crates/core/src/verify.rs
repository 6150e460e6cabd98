//! Named identity checks with uniform parameters, as run by `pchar verify`
//! and `pchar suite`.
//!
//! Every check returns a [`Check`]; loops over degrees run in parallel but
//! fold their results in enumeration order, so the first witness reported is
//! independent of the thread count.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{
    bos_fixture, char_bosonic, char_fermionic, convolution_check, positivity, product_check,
    quasi_classical_check, sl2_fixture, sl3_fixture, split_tower_check, CharSpec,
};
use crate::error::{Error, Result};
use crate::fermionic::{fermionic_sum_series, shift_check};
use crate::gz::{jd_closed_form, jd_explicit, scalar_product_j, whittaker_identity_sum};
use crate::multivar::{expand_termsum, termsum_witness, TermSum, TruncSpec};
use crate::report::{witness_json, Check};
use crate::scalar::Rational;
use crate::toda::{j_from, toda_solve, verify_eigen, JSource};
use crate::weights::{RootVec, WeightExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    ClosedForm,
    Routes,
    Toda,
    TodaSolve,
    FermionicJ,
    Characters,
    Positivity,
    Shift,
    Convolution,
    SumJOneInfty,
    SplitTower,
    TowerDecomposition,
    Whittaker,
}

const NAMES: [(Identity, &str); 13] = [
    (Identity::ClosedForm, "closed-form"),
    (Identity::Routes, "routes"),
    (Identity::Toda, "toda"),
    (Identity::TodaSolve, "toda-solve"),
    (Identity::FermionicJ, "fermionic-j"),
    (Identity::Characters, "characters"),
    (Identity::Positivity, "positivity"),
    (Identity::Shift, "shift"),
    (Identity::Convolution, "convolution"),
    (Identity::SumJOneInfty, "sum-j-one-infty"),
    (Identity::SplitTower, "split-tower"),
    (Identity::TowerDecomposition, "tower-decomposition"),
    (Identity::Whittaker, "whittaker"),
];

impl Identity {
    pub fn all() -> impl Iterator<Item = Identity> {
        NAMES.iter().map(|(i, _)| *i)
    }

    pub fn name(self) -> &'static str {
        NAMES
            .iter()
            .find(|(i, _)| *i == self)
            .map(|(_, s)| *s)
            .unwrap_or("?")
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NAMES
            .iter()
            .find(|(_, name)| *name == s)
            .map(|(i, _)| *i)
            .ok_or_else(|| {
                let known: Vec<&str> = NAMES.iter().map(|(_, s)| *s).collect();
                Error::Parse(format!("unknown identity '{s}' ({})", known.join("|")))
            })
    }
}

/// Parameters shared by all identities; each identity reads the fields it
/// needs and ignores the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    /// Rank; for `whittaker`, the largest vector length `i`.
    pub n: usize,
    pub k: i64,
    /// Degree, `beta` or `gamma`; identities that loop over degrees use the
    /// box below it.
    pub d: Option<RootVec>,
    /// Largest `|d|` for identities that loop over all degrees of bounded height.
    pub height: i64,
    pub r: i64,
    pub s: Option<i64>,
    pub boundaries: Option<Vec<i64>>,
    pub cutoff: i64,
    /// `(D, v_min, v_max)`.
    pub window: (u32, i64, i64),
    pub seed: u64,
    pub trials: usize,
    pub source: String,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 1,
            k: 1,
            d: None,
            height: 4,
            r: 0,
            s: None,
            boundaries: None,
            cutoff: 2,
            window: (4, -20, 60),
            seed: 1,
            trials: 12,
            source: "explicit".into(),
        }
    }
}

impl Params {
    pub fn rank(n: usize) -> Self {
        Params {
            n,
            ..Default::default()
        }
    }

    pub fn trunc(&self) -> Result<TruncSpec> {
        TruncSpec::new(self.window.0, self.window.1, self.window.2)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    fn degree(&self) -> Result<RootVec> {
        let d = self
            .d
            .clone()
            .ok_or_else(|| Error::InvalidInput("this identity needs --d".into()))?;
        if d.rank() != self.n {
            return Err(Error::InvalidInput(format!(
                "--d {d} does not have rank {}",
                self.n
            )));
        }
        Ok(d)
    }
}

/// Runs one identity.
pub fn run(id: Identity, p: &Params) -> Result<Check> {
    if p.n == 0 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    match id {
        Identity::ClosedForm => closed_form(p),
        Identity::Routes => over_degrees(RootVec::all_up_to_height(p.n, p.height), |d| {
            compare(
                &scalar_product_j(p.n, d)?,
                &jd_explicit(p.n, d),
                p,
                "pattern sum against explicit",
            )
        })
        .map(|c| c.bound("height", p.height)),
        Identity::Toda => toda(p),
        Identity::TodaSolve => over_degrees(RootVec::all_up_to_height(p.n, p.cutoff), |d| {
            compare(
                &toda_solve(p.n, d)?,
                &jd_explicit(p.n, d),
                p,
                "recursion against explicit",
            )
        })
        .map(|c| c.bound("cutoff", p.cutoff)),
        Identity::FermionicJ => {
            let t = p.trunc()?;
            over_degrees(RootVec::all_up_to_height(p.n, p.height), |d| {
                let f = fermionic_sum_series(p.n, d, 0, t)?;
                let e = expand_termsum(&jd_explicit(p.n, d), t)?;
                Ok(Check::from_comparison(
                    &f.compare(&e)?,
                    "fermionic sum against explicit",
                ))
            })
            .map(|c| c.bound("height", p.height).bound("window", json!(p.window)))
        }
        Identity::Characters => characters(p),
        Identity::Positivity => {
            let spec = CharSpec::new(p.n, p.k, p.trunc()?)?;
            Ok(positivity(&char_fermionic(&spec)).bound("window", json!(p.window)))
        }
        Identity::Shift => {
            let d = p.degree()?;
            let s = p.s.unwrap_or(p.r + 2);
            let ok = shift_check(&WeightExpr::lambda(p.n), &d, p.r, s, p.trials, p.seed)?;
            Ok(if ok {
                Check::passed()
            } else {
                Check::failed(json!({"check": "shift", "d": d.0, "r": p.r, "s": s}))
            })
        }
        Identity::Convolution => {
            let t = p.trunc()?;
            let betas: Vec<RootVec> = p
                .degree()?
                .lower_box()
                .into_iter()
                .filter(|b| !b.is_zero())
                .collect();
            over_degrees(betas, |b| {
                convolution_check(p.n, p.k, b, t, p.trials, p.seed)
            })
        }
        Identity::SumJOneInfty => product_check(p.n, p.trunc()?),
        Identity::SplitTower => split_tower_check(
            p.n,
            p.r,
            &p.degree()?,
            p.cutoff,
            p.trunc()?,
            p.trials,
            p.seed,
        ),
        Identity::TowerDecomposition => {
            let t = p.trunc()?;
            let rs = p.boundaries.clone().unwrap_or_else(|| vec![0; p.n]);
            over_degrees(p.degree()?.lower_box(), |b| {
                quasi_classical_check(p.n, &rs, b, t, p.trials, p.seed)
            })
        }
        Identity::Whittaker => whittaker(p),
    }
}

/// Runs `f` on every degree and keeps the first failure, tagged with its degree.
fn over_degrees<F>(ds: Vec<RootVec>, f: F) -> Result<Check>
where
    F: Fn(&RootVec) -> Result<Check> + Sync,
{
    let checks: Vec<Check> = ds
        .par_iter()
        .map(|d| f(d).map(|c| tag(c, "d", json!(d.0))))
        .collect::<Result<_>>()?;
    let n = checks.len();
    Ok(checks
        .into_iter()
        .fold(Check::passed(), Check::and)
        .bound("degrees", n))
}

fn tag(mut c: Check, key: &str, v: Value) -> Check {
    if let Some(Value::Object(m)) = c.witness.as_mut() {
        m.insert(key.into(), v);
    }
    c
}

fn compare(a: &TermSum, b: &TermSum, p: &Params, what: &str) -> Result<Check> {
    let w = termsum_witness(a, b, p.trials, p.seed)?;
    Ok(Check::from_witness(w.as_ref(), what)
        .bound("seed", p.seed)
        .bound("trials", p.trials))
}

fn closed_form(p: &Params) -> Result<Check> {
    if p.n > 2 {
        return Err(Error::InvalidInput(
            "closed forms exist for n <= 2 only".into(),
        ));
    }
    let top = p.d.clone().unwrap_or_else(|| RootVec(vec![5; p.n]));
    over_degrees(top.lower_box(), |d| {
        let want = jd_closed_form(p.n, d).expect("rank checked above");
        compare(
            &jd_explicit(p.n, d),
            &want,
            p,
            "explicit against product formula",
        )
    })
}

fn toda(p: &Params) -> Result<Check> {
    let source: JSource = p.source.parse()?;
    let n = p.n;
    let rep = verify_eigen(
        n,
        p.cutoff,
        &|d: &RootVec| j_from(source, n, d),
        p.trials,
        p.seed,
    )?;
    let c = match rep.entries.iter().find(|e| !e.pass) {
        None => Check::passed(),
        Some(e) => {
            let w = e
                .witness
                .as_ref()
                .map(|w| witness_json(w, "Hamiltonian eigen equation"));
            tag(Check::failed(w.unwrap_or(json!({}))), "d", json!(e.d.0))
        }
    };
    Ok(c.bound("cutoff", p.cutoff)
        .bound("degrees", rep.entries.len())
        .bound("seed", p.seed)
        .bound("trials", p.trials))
}

fn characters(p: &Params) -> Result<Check> {
    let t = p.trunc()?;
    let spec = CharSpec::new(p.n, p.k, t)?;
    let f = char_fermionic(&spec);
    let (b, cb) = char_bosonic(&spec)?;
    let mut c = Check::from_comparison(&f.compare(&b)?, "fermionic against bosonic").and(cb);
    match p.n {
        1 => {
            let s = sl2_fixture(p.k, t)?;
            c = c.and(Check::from_comparison(
                &s.compare(&f)?,
                "sl2 level-k formula",
            ));
        }
        2 => {
            let s = bos_fixture(p.k, t)?;
            c = c.and(Check::from_comparison(
                &s.compare(&f)?,
                "rank-two bosonic formula",
            ));
            let s = sl3_fixture(p.k, t)?;
            c = c.and(Check::from_comparison(
                &s.compare(&f)?,
                "rank-two desingularized formula",
            ));
        }
        _ => {}
    }
    Ok(c.and(positivity(&f)).bound("window", json!(p.window)))
}

/// Random integer specializations of the Whittaker recursion identity for
/// vector lengths `1..=n`, with the perturbed sum as a negative control.
fn whittaker(p: &Params) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut rejected = 0usize;
    for i in 1..=p.n {
        let mut rejected_here = 0;
        for _ in 0..p.trials {
            let a: Vec<i64> = (0..i).map(|_| rng.gen_range(-6..=6)).collect();
            let b: Vec<i64> = sample(&mut rng, 13, i + 1)
                .into_iter()
                .map(|x| x as i64 - 6)
                .collect();
            let v0 = loop {
                let num: i64 = rng.gen_range(-9..=9);
                let den: i64 = rng.gen_range(1..=5);
                if num != 0 && num.abs() != den {
                    break Rational::new(num.into(), den.into());
                }
            };
            let value = whittaker_identity_sum(&a, &b, &v0, false)?;
            if value != Rational::from_integer(1.into()) {
                return Ok(Check::failed(json!({
                    "check": "whittaker identity",
                    "a": a, "b": b, "v0": v0.to_string(), "value": value.to_string(),
                })));
            }
            if whittaker_identity_sum(&a, &b, &v0, true)? != value {
                rejected_here += 1;
            }
        }
        if rejected_here == 0 {
            return Ok(Check::failed(json!({
                "check": "whittaker negative control",
                "i": i,
                "note": "perturbed identity was never rejected",
            })));
        }
        rejected += rejected_here;
    }
    Ok(Check::passed()
        .bound("max_length", p.n)
        .bound("specializations", p.trials)
        .bound("controls_rejected", rejected)
        .bound("seed", p.seed))
}
