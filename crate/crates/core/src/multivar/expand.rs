use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::factored::{FactoredExpr, Len, PochFactor, TermSum};
use super::series::{Laurent, TruncSeries, TruncSpec};
use super::ZMonomial;
use crate::error::{Error, Result};
use crate::scalar::VScalar;

/// All non-negative exponent vectors of total degree `<= d`, by degree.
struct MonoIndex {
    monos: Vec<Vec<i64>>,
    pos: HashMap<Vec<i64>, usize>,
}

impl MonoIndex {
    fn build(n: usize, d: i64) -> MonoIndex {
        let mut monos: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for m in &monos {
                let used: i64 = m.iter().sum();
                for x in 0..=(d - used) {
                    let mut m2 = m.clone();
                    m2.push(x);
                    next.push(m2);
                }
            }
            monos = next;
        }
        monos.sort_by(|a, b| {
            a.iter()
                .sum::<i64>()
                .cmp(&b.iter().sum())
                .then_with(|| a.cmp(b))
        });
        let pos = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MonoIndex { monos, pos }
    }

    fn get(n: usize, d: i64) -> Rc<MonoIndex> {
        thread_local! {
            static CACHE: RefCell<HashMap<(usize, i64), Rc<MonoIndex>>> = RefCell::new(HashMap::new());
        }
        CACHE.with(|c| {
            c.borrow_mut()
                .entry((n, d))
                .or_insert_with(|| Rc::new(MonoIndex::build(n, d)))
                .clone()
        })
    }

    fn minus(&self, i: usize, mu: &[i64]) -> Option<usize> {
        let m: Vec<i64> = self.monos[i].iter().zip(mu).map(|(a, b)| a - b).collect();
        if m.iter().any(|&x| x < 0) {
            return None;
        }
        self.pos.get(&m).copied()
    }
}

/// Dense working series over a [`MonoIndex`], truncated above `cap`.
struct Work {
    idx: Rc<MonoIndex>,
    c: Vec<Laurent>,
    cap: i64,
    exact_to: i64,
}

impl Work {
    fn one(idx: Rc<MonoIndex>, cap: i64) -> Work {
        let mut c = vec![Laurent::zero(); idx.monos.len()];
        c[0] = Laurent::monomial(1, 0);
        Work {
            idx,
            c,
            cap,
            exact_to: cap,
        }
    }

    fn degree_bound(&self) -> i64 {
        self.idx.monos.last().map_or(0, |m| m.iter().sum())
    }

    /// Multiplies by `1 - q^a z^mu`.
    fn mul_unit(&mut self, a: i64, mu: &[i64]) {
        if mu.iter().all(|&x| x == 0) {
            for l in &mut self.c {
                let old = l.clone();
                l.add_scaled(&old, -1, 2 * a, self.cap);
            }
            return;
        }
        for i in (0..self.c.len()).rev() {
            if let Some(j) = self.idx.minus(i, mu) {
                let src = self.c[j].clone();
                self.c[i].add_scaled(&src, -1, 2 * a, self.cap);
            }
        }
        self.exact_to += (2 * a).min(0);
    }

    /// Divides by `1 - q^a z^mu`; for `mu = 0` this needs `a >= 1`.
    fn div_unit(&mut self, a: i64, mu: &[i64]) {
        if mu.iter().all(|&x| x == 0) {
            debug_assert!(a >= 1);
            let step = 2 * a;
            for l in &mut self.c {
                let Some(lo) = l.min_exp() else { continue };
                // extend to the cap, then c[e] += c[e - step] upward
                let mut full = Laurent::zero();
                let mut e = lo;
                while e <= self.cap {
                    let x = l.get(e) + full.get(e - step);
                    full.add_at(e, x);
                    e += 1;
                }
                *l = full;
            }
            return;
        }
        for i in 0..self.c.len() {
            if let Some(j) = self.idx.minus(i, mu) {
                let src = self.c[j].clone();
                self.c[i].add_scaled(&src, 1, 2 * a, self.cap);
            }
        }
        let deg: i64 = mu.iter().sum();
        self.exact_to += (2 * a).min(0) * (self.degree_bound() / deg);
    }

    fn min_v(&self) -> Option<i64> {
        self.c.iter().filter_map(Laurent::min_exp).min()
    }
}

/// Power series in `v` of `num / den` up to `v^top` (both with nonzero
/// constant terms).
fn scalar_series(c: &VScalar, top: i64) -> Result<Laurent> {
    let num = c.numerator().coeffs();
    let den = c.denominator().coeffs();
    let d0 = den[0]
        .to_i128()
        .ok_or_else(|| Error::Integrality("huge scalar".into()))?;
    if d0.abs() != 1 {
        return Err(Error::Integrality(format!(
            "scalar {c} has no integral power series in v"
        )));
    }
    let to_i = |x: &BigInt| {
        x.to_i128()
            .ok_or_else(|| Error::Integrality("coefficient overflow".into()))
    };
    let den: Vec<i128> = den.iter().map(to_i).collect::<Result<_>>()?;
    let mut out = Laurent::zero();
    let mut ser: Vec<i128> = Vec::new();
    for k in 0..=top.max(-1) {
        let k = k as usize;
        let mut x = num.get(k).map_or(Ok(0), to_i)?;
        for (j, dj) in den.iter().enumerate().skip(1).take(k) {
            x -= dj * ser[k - j];
        }
        let x = x * d0;
        ser.push(x);
        out.add_at(k as i64, x);
    }
    Ok(out)
}

enum Op {
    Mul(i64, Vec<i64>),
    Div(i64, Vec<i64>),
}

/// Expands `e` as a power series in the region `|z_i|` small, `|q|` small,
/// exact for every v-power up to the window's top.
pub fn expand(e: &FactoredExpr, spec: TruncSpec) -> Result<TruncSeries> {
    expand_to(e, spec, spec.v_max)
}

/// Like [`expand`], but exact up to `v^top` (`top >= v_max`), which leaves
/// room for later multiplication by series with negative v-powers.
pub fn expand_to(e: &FactoredExpr, spec: TruncSpec, top: i64) -> Result<TruncSeries> {
    let top = top.max(spec.v_max);
    let n = e.rank();
    if e.is_zero() {
        return Ok(TruncSeries::zero(n, spec));
    }
    if !e.poly_denominators().is_empty() {
        return Err(Error::InvalidInput(
            "expression carries polynomial denominators; evaluate it instead".into(),
        ));
    }
    let mu0 = e.z_monomial().ok_or_else(|| {
        Error::Integrality(format!("half-integral z-power {:?} in expansion", e.z2()))
    })?;
    let dp = spec.max_z_degree as i64 - mu0.degree();
    if dp < 0 {
        return Ok(TruncSeries::zero(n, spec));
    }
    let s = e.coeff().shift();

    let kmax = |mu: &ZMonomial| -> i64 {
        let deg = mu.degree();
        if deg > 0 {
            dp / deg
        } else {
            0
        }
    };

    // factor list, lower bound on the minimal v-power, and total precision loss
    let mut ops: Vec<Op> = Vec::new();
    let mut bound = 0i64;
    let mut loss = 0i64;
    for (u, m) in e.units() {
        if !u.mu.all_nonneg() {
            return Err(Error::AmbiguousExpansion(format!(
                "factor (1 - q^{} z^{})",
                u.a, u.mu
            )));
        }
        if u.mu.is_one() && u.a < 1 {
            return Err(Error::NonExpandablePureQ(u.a));
        }
        let neg = (2 * u.a).min(0);
        let k = kmax(&u.mu);
        if *m > 0 {
            bound += neg * (*m).min(k);
            loss += neg * m;
            ops.extend((0..*m).map(|_| Op::Mul(u.a, u.mu.0.clone())));
        } else {
            bound += neg * k;
            loss += neg * k * (-m);
            ops.extend((0..-m).map(|_| Op::Div(u.a, u.mu.0.clone())));
        }
    }
    let mut infs = Vec::new();
    for (u, m) in e.infinite_factors() {
        if !u.mu.all_nonneg() {
            return Err(Error::AmbiguousExpansion(format!(
                "factor (q^{} z^{}; q)_inf",
                u.a, u.mu
            )));
        }
        if u.mu.is_one() && u.a < 1 {
            return Err(Error::NonExpandablePureQ(u.a));
        }
        let k = kmax(&u.mu);
        for b in u.a..0 {
            if *m > 0 {
                bound += 2 * b * m.abs().min(k.max(1));
                loss += 2 * b * m;
            } else {
                bound += 2 * b * k;
                loss += 2 * b * k * (-m);
            }
        }
        infs.push((u.a, u.mu.clone(), *m));
    }
    let target = top - s;
    let cap = target - loss;
    for (a, mu, m) in infs {
        if !mu.is_one() && kmax(&mu) == 0 {
            continue;
        }
        let mut b = a;
        while 2 * b + bound <= cap {
            for _ in 0..m.abs() {
                ops.push(if m > 0 {
                    Op::Mul(b, mu.0.clone())
                } else {
                    Op::Div(b, mu.0.clone())
                });
            }
            b += 1;
        }
    }

    let idx = MonoIndex::get(n, dp);
    let mut w = Work::one(idx.clone(), cap);
    for op in &ops {
        match op {
            Op::Mul(a, mu) => w.mul_unit(*a, mu),
            Op::Div(a, mu) => w.div_unit(*a, mu),
        }
    }
    debug_assert!(w.exact_to >= target, "expansion precision bookkeeping");
    let Some(min_p) = w.min_v() else {
        return Ok(TruncSeries::zero(n, spec));
    };
    let g = scalar_series(e.coeff(), top - s - min_p)?;
    let exact_to = (w.exact_to + s).min(top);
    if exact_to < top {
        return Err(Error::PrecisionLoss {
            exact_to,
            needed: top,
        });
    }

    let mut coeffs: BTreeMap<ZMonomial, Laurent> = BTreeMap::new();
    for (i, l) in w.c.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let mono = ZMonomial(idx.monos[i].clone()).mul(&mu0);
        let mut prod = g.mul(l, exact_to - s);
        if prod.is_zero() {
            continue;
        }
        let mut shifted = Laurent::zero();
        shifted.add_scaled(&prod, 1, s, exact_to);
        prod = shifted;
        if !mono.all_nonneg() {
            return Err(Error::NotPowerSeries(format!(
                "nonzero coefficient at z^{mono} after applying the prefactor"
            )));
        }
        if mono.degree() <= spec.max_z_degree as i64 && !prod.is_zero() {
            coeffs.insert(mono, prod);
        }
    }
    Ok(TruncSeries::from_parts(n, spec, exact_to, true, coeffs))
}

/// Expands every term (in parallel) and adds the results in term order.
pub fn expand_termsum(t: &TermSum, spec: TruncSpec) -> Result<TruncSeries> {
    expand_termsum_to(t, spec, spec.v_max)
}

pub fn expand_termsum_to(t: &TermSum, spec: TruncSpec, top: i64) -> Result<TruncSeries> {
    let parts: Vec<TruncSeries> = t
        .terms()
        .par_iter()
        .map(|e| expand_to(e, spec, top))
        .collect::<Result<_>>()?;
    let mut acc = TruncSeries::zero(t.rank(), spec);
    for p in &parts {
        acc = acc.add(p)?;
    }
    Ok(acc)
}

/// Multiplies out a finite q-Pochhammer symbol into signed monomials.
pub fn poch_finite_expand(f: &PochFactor) -> Result<TermSum> {
    let Len::Finite(m) = f.len else {
        return Err(Error::InfiniteFactor);
    };
    let n = f.z.rank();
    // coefficients of x^k in prod_{i<m} (1 - q^i x)
    let mut c: Vec<VScalar> = vec![VScalar::one()];
    for i in 0..m as i64 {
        let qi = VScalar::v_pow(2 * i).neg();
        let mut next = vec![VScalar::zero(); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k] = next[k].add(ck);
            next[k + 1] = next[k + 1].add(&ck.mul(&qi));
        }
        c = next;
    }
    let mut out = TermSum::zero(n);
    for (k, ck) in c.into_iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        let k = k as i64;
        let coeff = ck.mul(&VScalar::v_pow(2 * f.q_shift * k));
        out.push(FactoredExpr::monomial(coeff, &f.z.pow(k)));
    }
    Ok(out)
}
