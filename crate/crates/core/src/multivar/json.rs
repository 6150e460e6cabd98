//! JSON forms of [`TermSum`] and [`TruncSeries`].
//!
//! A term is `{"coeff": "<scalar>", "z": [..], "num": [[a, [mu], m], ..],
//! "den": [..]}` where each factor is `(q^a z^mu; q)_m` and `m` is an
//! integer or `"inf"`. Terms whose prefactor has half-integral exponents use
//! `"z_half"` (doubled exponents) in place of `"z"`, and terms carrying
//! polynomial denominators list them under `"poly_den"`.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::factored::{FactoredExpr, Len, PochFactor, SparsePoly, TermSum};
use super::series::{Laurent, TruncSeries, TruncSpec};
use super::ZMonomial;
use crate::error::{Error, Result};
use crate::scalar::VScalar;

fn factor_json(f: &PochFactor) -> Value {
    let m = match f.len {
        Len::Finite(m) => json!(m),
        Len::Infinite => json!("inf"),
    };
    json!([f.q_shift, f.z.0, m])
}

fn term_json(e: &FactoredExpr) -> Value {
    let (num, den) = e.poch_factors();
    let mut obj = serde_json::Map::new();
    obj.insert("coeff".into(), json!(e.coeff().to_string()));
    match e.z_monomial() {
        Some(z) => obj.insert("z".into(), json!(z.0)),
        None => obj.insert("z_half".into(), json!(e.z2())),
    };
    obj.insert(
        "num".into(),
        Value::Array(num.iter().map(factor_json).collect()),
    );
    obj.insert(
        "den".into(),
        Value::Array(den.iter().map(factor_json).collect()),
    );
    if !e.poly_denominators().is_empty() {
        let polys: Vec<Value> = e
            .poly_denominators()
            .iter()
            .map(|(p, m)| {
                let terms: Vec<Value> = p
                    .terms
                    .iter()
                    .map(|((v, z), c)| json!([c.to_string(), v, z]))
                    .collect();
                json!({"terms": terms, "m": m})
            })
            .collect();
        obj.insert("poly_den".into(), Value::Array(polys));
    }
    Value::Object(obj)
}

pub fn termsum_to_json(t: &TermSum) -> Value {
    json!({
        "rank": t.rank(),
        "terms": t.terms().iter().map(term_json).collect::<Vec<_>>(),
    })
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn int_vec(v: &Value, n: usize) -> Result<Vec<i64>> {
    let a = v
        .as_array()
        .ok_or_else(|| bad("expected an exponent array"))?;
    if a.len() != n {
        return Err(bad(format!(
            "exponent array of length {}, expected {n}",
            a.len()
        )));
    }
    a.iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| bad("expected an integer exponent"))
        })
        .collect()
}

fn factor_from(v: &Value, n: usize) -> Result<PochFactor> {
    let a = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| bad("factor must be [a, z, m]"))?;
    let q_shift = a[0]
        .as_i64()
        .ok_or_else(|| bad("factor shift must be an integer"))?;
    let z = ZMonomial(int_vec(&a[1], n)?);
    let len = match &a[2] {
        Value::String(s) if s == "inf" => Len::Infinite,
        x => Len::Finite(
            x.as_u64()
                .ok_or_else(|| bad("factor length must be a count or \"inf\""))?,
        ),
    };
    Ok(PochFactor { q_shift, z, len })
}

fn term_from(v: &Value, n: usize) -> Result<FactoredExpr> {
    let coeff = v
        .get("coeff")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("term without \"coeff\""))?;
    let coeff = VScalar::from_str(coeff)?;
    let z2: Vec<i64> = match (v.get("z"), v.get("z_half")) {
        (Some(z), None) => int_vec(z, n)?.iter().map(|x| 2 * x).collect(),
        (None, Some(z)) => int_vec(z, n)?,
        _ => return Err(bad("term needs exactly one of \"z\", \"z_half\"")),
    };
    let mut e = FactoredExpr::constant(n, coeff);
    e.mul_z2(&z2);
    for (key, power) in [("num", 1), ("den", -1)] {
        if let Some(fs) = v.get(key) {
            let fs = fs
                .as_array()
                .ok_or_else(|| bad(format!("\"{key}\" must be an array")))?;
            for f in fs {
                e.mul_poch(&factor_from(f, n)?, power)?;
            }
        }
    }
    if let Some(ps) = v.get("poly_den") {
        for p in ps
            .as_array()
            .ok_or_else(|| bad("\"poly_den\" must be an array"))?
        {
            let m = p
                .get("m")
                .and_then(Value::as_i64)
                .ok_or_else(|| bad("poly without \"m\""))?;
            let mut poly = SparsePoly::default();
            for t in p
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("poly terms"))?
            {
                let t = t
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| bad("poly term"))?;
                let c = t[0]
                    .as_str()
                    .and_then(|s| s.parse::<i64>().ok())
                    .ok_or_else(|| bad("poly coefficient"))?;
                let ve = t[1].as_i64().ok_or_else(|| bad("poly v-exponent"))?;
                poly.add_term(c, ve, &int_vec(&t[2], n)?);
            }
            for _ in 0..m.max(0) {
                e.div_poly(poly.clone())?;
            }
        }
    }
    Ok(e)
}

pub fn termsum_from_json(v: &Value) -> Result<TermSum> {
    let n = v
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing \"rank\""))? as usize;
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"terms\""))?;
    let mut t = TermSum::zero(n);
    for term in terms {
        t.push(term_from(term, n)?);
    }
    Ok(t)
}

#[derive(Serialize, Deserialize)]
struct SeriesTerm {
    z: Vec<i64>,
    v_coeffs: BTreeMap<i64, String>,
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    rank: usize,
    max_z_degree: u32,
    v_window: [i64; 2],
    terms: Vec<SeriesTerm>,
}

/// Serializes the window part of `s`.
pub fn series_to_json(s: &TruncSeries) -> Value {
    let spec = s.spec();
    let doc = SeriesDoc {
        rank: s.rank(),
        max_z_degree: spec.max_z_degree,
        v_window: [spec.v_min, spec.v_max],
        terms: s
            .window_terms()
            .into_iter()
            .map(|(z, cs)| SeriesTerm {
                z: z.0,
                v_coeffs: cs.into_iter().map(|(e, c)| (e, c.to_string())).collect(),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("series document serializes")
}

/// Reads a series back; the result knows its window only.
pub fn series_from_json(v: &Value) -> Result<TruncSeries> {
    let doc: SeriesDoc = serde_json::from_value(v.clone()).map_err(|e| bad(e.to_string()))?;
    let spec = TruncSpec::new(doc.max_z_degree, doc.v_window[0], doc.v_window[1])?;
    let mut coeffs = BTreeMap::new();
    for t in doc.terms {
        if t.z.len() != doc.rank {
            return Err(bad("monomial of the wrong rank"));
        }
        let z = ZMonomial(t.z);
        if !z.all_nonneg() || z.degree() > spec.max_z_degree as i64 {
            return Err(bad(format!("monomial {z} outside the truncation")));
        }
        let mut l = Laurent::zero();
        for (e, c) in t.v_coeffs {
            if e < spec.v_min || e > spec.v_max {
                return Err(bad(format!("v-power {e} outside the window")));
            }
            let c = c.parse::<i128>().map_err(|e| bad(e.to_string()))?;
            l.add_at(e, c);
        }
        if !l.is_zero() {
            coeffs.insert(z, l);
        }
    }
    Ok(TruncSeries::from_parts(
        doc.rank, spec, spec.v_max, false, coeffs,
    ))
}
