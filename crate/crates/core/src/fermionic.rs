//! Fermionic configuration sums.
//!
//! A configuration places `l_{t,i}` particles of color `i` at time `t`; with
//! `gamma_t = sum_i l_{t,i} alpha_i` its weight is
//!
//! ```text
//! q^{(1/2) sum_{t,t'} min(t,t') (gamma_t, gamma_t')} prod_i z_i^{sum_t t l_{t,i}} / prod (q)_{l_{t,i}}
//! ```
//!
//! Finite intervals give a [`TermSum`] directly. Right-infinite intervals
//! are expanded exactly per z-monomial into a [`TruncSeries`], and tower
//! sums (per-color lower boundaries, possibly `-infinity`) are summed in
//! closed form by [`tower_sum`].

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multivar::{
    FactoredExpr, Laurent, PochFactor, TermSum, TruncSeries, TruncSpec, ZMonomial,
};
use crate::scalar::VScalar;
use crate::weights::{RootVec, WeightExpr};

/// Particles per color: `l[i - 1]` maps a time `t` to `l_{t,i} > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub l: Vec<BTreeMap<i64, u64>>,
}

impl Config {
    pub fn empty(n: usize) -> Self {
        Config {
            l: vec![BTreeMap::new(); n],
        }
    }

    pub fn rank(&self) -> usize {
        self.l.len()
    }

    pub fn set(&mut self, t: i64, i: usize, count: u64) {
        if count == 0 {
            self.l[i - 1].remove(&t);
        } else {
            self.l[i - 1].insert(t, count);
        }
    }

    pub fn get(&self, t: i64, i: usize) -> u64 {
        self.l[i - 1].get(&t).copied().unwrap_or(0)
    }

    /// `gamma_t`.
    pub fn gamma(&self, t: i64) -> RootVec {
        RootVec((1..=self.rank()).map(|i| self.get(t, i) as i64).collect())
    }

    /// `sum_t gamma_t`.
    pub fn column_sums(&self) -> RootVec {
        RootVec(
            self.l
                .iter()
                .map(|m| m.values().map(|&c| c as i64).sum())
                .collect(),
        )
    }

    /// `sum_t t l_{t,i}` for each color.
    pub fn moments(&self) -> Vec<i64> {
        self.l
            .iter()
            .map(|m| m.iter().map(|(t, c)| t * *c as i64).sum())
            .collect()
    }

    /// The q-exponent `(1/2) sum min(t,t') (gamma_t, gamma_t')`.
    pub fn quadratic(&self) -> i64 {
        let parts: Vec<(i64, usize, i64)> = self
            .l
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.iter().map(move |(t, c)| (*t, i, *c as i64)))
            .collect();
        let mut twice = 0i64;
        for &(t, i, c) in &parts {
            for &(u, j, d) in &parts {
                let a = if i == j {
                    2
                } else if i.abs_diff(j) == 1 {
                    -1
                } else {
                    continue;
                };
                twice += t.min(u) * a * c * d;
            }
        }
        assert!(twice % 2 == 0, "odd bilinear total {twice}");
        twice / 2
    }

    /// `q^{B}` split as a pure q-exponent and a z-monomial, where the
    /// `-(lambda + rho, sum t gamma_t)` part is read through the substitution
    /// attached to `lambda`.
    pub fn b_form(&self, lambda: &WeightExpr) -> (i64, ZMonomial) {
        let s = lambda.substitution(self.rank());
        let m = self.moments();
        let shift: i64 = m.iter().zip(&s.shifts).map(|(e, a)| e * a).sum();
        (
            self.quadratic() + shift,
            ZMonomial(m.iter().map(|e| s.sign * e).collect()),
        )
    }

    fn weight_expr(&self) -> FactoredExpr {
        let n = self.rank();
        let (qe, z) = self.b_form(&WeightExpr::lambda(n));
        let mut e = FactoredExpr::monomial(VScalar::v_pow(2 * qe), &z);
        for m in &self.l {
            for &c in m.values() {
                e.mul_poch(&PochFactor::q(n, c), -1)
                    .expect("finite (q)_m is always invertible");
            }
        }
        e
    }
}

/// Where particles of one color may sit and what they cost.
#[derive(Clone, Copy, Debug)]
struct Lane {
    start: i64,
    end: Option<i64>,
    /// A particle at `t` costs `t - base` from the z-degree budget.
    base: i64,
    count: Option<u64>,
}

fn fill_lane(
    lane: &Lane,
    t: i64,
    left: Option<u64>,
    budget: i64,
    cur: &mut Vec<(i64, u64)>,
    out: &mut Vec<(Vec<(i64, u64)>, i64)>,
) {
    if left == Some(0) {
        out.push((cur.clone(), budget));
        return;
    }
    let cost = t - lane.base;
    let past_end = lane.end.is_some_and(|e| t > e);
    if past_end || cost > budget {
        if left.is_none() {
            out.push((cur.clone(), budget));
        }
        return;
    }
    let mut l = 0u64;
    loop {
        if left.is_some_and(|c| l > c) || (l as i64) * cost > budget {
            break;
        }
        if l > 0 {
            cur.push((t, l));
        }
        fill_lane(
            lane,
            t + 1,
            left.map(|c| c - l),
            budget - (l as i64) * cost,
            cur,
            out,
        );
        if l > 0 {
            cur.pop();
        }
        l += 1;
    }
}

fn enumerate(lanes: &[Lane], budget: i64) -> Vec<Config> {
    for lane in lanes {
        assert!(
            lane.count.is_some() || lane.end.is_some() || lane.start > lane.base,
            "unbounded lane without a positive cost"
        );
    }
    let mut out = Vec::new();
    let mut cfg = Config::empty(lanes.len());
    enumerate_from(lanes, 0, budget, &mut cfg, &mut out);
    out
}

fn enumerate_from(lanes: &[Lane], i: usize, budget: i64, cfg: &mut Config, out: &mut Vec<Config>) {
    if i == lanes.len() {
        out.push(cfg.clone());
        return;
    }
    let lane = &lanes[i];
    let mut fills = Vec::new();
    fill_lane(
        lane,
        lane.start,
        lane.count,
        budget,
        &mut Vec::new(),
        &mut fills,
    );
    for (fill, rest) in fills {
        cfg.l[i] = fill.into_iter().collect();
        enumerate_from(lanes, i + 1, rest, cfg, out);
    }
    cfg.l[i].clear();
}

/// All configurations on `[r, s]` with column sums `d`.
pub fn configs(d: &RootVec, r: i64, s: i64) -> Vec<Config> {
    let lanes: Vec<Lane> =
        d.0.iter()
            .map(|&c| Lane {
                start: r,
                end: Some(s),
                base: r,
                count: Some(c.max(0) as u64),
            })
            .collect();
    enumerate(&lanes, i64::MAX / 4)
}

/// `I_d[r, s]` for a finite interval.
pub fn fermionic_sum(n: usize, d: &RootVec, r: i64, s: i64) -> TermSum {
    assert_eq!(d.rank(), n);
    if r > s || !d.in_q_plus() {
        return if d.is_zero() {
            TermSum::one(n)
        } else {
            TermSum::zero(n)
        };
    }
    let terms = configs(d, r, s).iter().map(Config::weight_expr).collect();
    TermSum::from_terms(n, terms)
}

/// `1 / (q)_m` for `m = 0..=max_m` as v-series up to `v^cap`.
pub fn inv_qpoch_table(max_m: u64, cap: i64) -> Vec<Laurent> {
    let mut out = vec![Laurent::monomial(1, 0)];
    for m in 1..=max_m {
        let prev = out.last().expect("table starts non-empty");
        let step = 2 * m as i64;
        let mut cur = Laurent::zero();
        let mut e = 0;
        while e <= cap {
            let x = prev.get(e) + cur.get(e - step);
            cur.add_at(e, x);
            e += 1;
        }
        out.push(cur);
    }
    out
}

/// Sums the weights of `cfgs` into a series, with each config's z-monomial
/// divided by `z^shift`.
fn accumulate(n: usize, cfgs: &[Config], shift: &[i64], spec: TruncSpec) -> TruncSeries {
    let top = spec.v_max;
    let max_m = cfgs
        .iter()
        .flat_map(|c| c.l.iter().flat_map(|m| m.values().copied()))
        .max()
        .unwrap_or(0);
    let qmin = cfgs.iter().map(Config::quadratic).min().unwrap_or(0);
    let table = inv_qpoch_table(max_m, top - 2 * qmin.min(0));
    let parts: Vec<(ZMonomial, Laurent)> = cfgs
        .par_iter()
        .filter_map(|c| {
            let qe = c.quadratic();
            let cap = top - 2 * qe;
            if cap < 0 {
                return None;
            }
            let mut w = Laurent::monomial(1, 0);
            for m in &c.l {
                for &k in m.values() {
                    w = w.mul(&table[k as usize], cap);
                }
            }
            let mut l = Laurent::zero();
            l.add_scaled(&w, 1, 2 * qe, top);
            let z = ZMonomial(c.moments().iter().zip(shift).map(|(a, b)| a - b).collect());
            Some((z, l))
        })
        .collect();
    let mut coeffs: BTreeMap<ZMonomial, Laurent> = BTreeMap::new();
    for (z, l) in parts {
        if z.degree() > spec.max_z_degree as i64 {
            continue;
        }
        coeffs.entry(z).or_default().add_scaled(&l, 1, 0, top);
    }
    coeffs.retain(|_, l| !l.is_zero());
    TruncSeries::from_parts(n, spec, top, true, coeffs)
}

/// `I_d[r, infinity)` expanded in the window `spec`, exact per z-monomial.
/// Requires `r >= 0` so that every z-exponent is non-negative.
pub fn fermionic_sum_series(n: usize, d: &RootVec, r: i64, spec: TruncSpec) -> Result<TruncSeries> {
    if r < 0 {
        return Err(Error::InvalidInput(format!(
            "interval [{r}, inf) produces negative z-powers"
        )));
    }
    if !d.in_q_plus() {
        return Ok(TruncSeries::zero(n, spec));
    }
    let lanes: Vec<Lane> =
        d.0.iter()
            .map(|&c| Lane {
                start: r,
                end: None,
                base: 0,
                count: Some(c as u64),
            })
            .collect();
    let cfgs = enumerate(&lanes, spec.max_z_degree as i64);
    Ok(accumulate(n, &cfgs, &vec![0; n], spec))
}

/// Every configuration on `[1, k]` (any column sums) of z-degree within
/// `spec`, summed: the fermionic side of the principal-subspace character.
pub fn fermionic_window_sum(n: usize, k: i64, spec: TruncSpec) -> TruncSeries {
    if k < 1 {
        return TruncSeries::one(n, spec);
    }
    let lanes = vec![
        Lane {
            start: 1,
            end: Some(k),
            base: 0,
            count: None,
        };
        n
    ];
    let cfgs = enumerate(&lanes, spec.max_z_degree as i64);
    accumulate(n, &cfgs, &vec![0; n], spec)
}

/// A tower boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    At(i64),
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::At(r) => write!(f, "{r}"),
        }
    }
}

impl std::str::FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "-infinity" => Ok(Bound::NegInf),
            x => x
                .parse()
                .map(Bound::At)
                .map_err(|_| Error::Parse(format!("bad boundary '{x}'"))),
        }
    }
}

/// Boundaries `r_1 <= ... <= r_m`: `gamma_t` lies in `Q^+_i` for
/// `r_i <= t < r_{i+1}`, so particles of color `i` live on `[r_i, infinity)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub bounds: Vec<Bound>,
}

impl TowerSpec {
    pub fn new(bounds: Vec<Bound>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput(
                "a tower needs at least one boundary".into(),
            ));
        }
        if bounds.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(format!(
                "boundaries must be non-decreasing, got {bounds:?}"
            )));
        }
        Ok(TowerSpec { bounds })
    }

    /// `[r, infinity)` over the full cone `Q^+_m`.
    pub fn flat(m: usize, r: i64) -> Self {
        TowerSpec {
            bounds: vec![Bound::At(r); m],
        }
    }

    /// `(-infinity, r)` over `Q^+_{m-1}` followed by `[r, infinity)` over `Q^+_m`.
    pub fn split(m: usize, r: i64) -> Self {
        let mut bounds = vec![Bound::NegInf; m];
        bounds[m - 1] = Bound::At(r);
        TowerSpec { bounds }
    }

    /// Index `m` of the top cone `Q^+_m`.
    pub fn cone_rank(&self) -> usize {
        self.bounds.len()
    }

    fn lower(&self, gamma: &RootVec) -> Bound {
        let top = gamma.0.iter().rposition(|&x| x != 0).expect("nonzero part");
        self.bounds[top]
    }

    fn check(&self, beta: &RootVec) -> Result<()> {
        if !beta.in_q_plus_i(self.cone_rank()) {
            return Err(Error::InvalidInput(format!(
                "beta = {beta} is not in Q^+_{}",
                self.cone_rank()
            )));
        }
        Ok(())
    }
}

/// A series multiplied by `z^shift`.
#[derive(Clone, Debug)]
pub struct ShiftedSeries {
    pub shift: ZMonomial,
    pub series: TruncSeries,
}

/// The tower sum with finite boundaries, expanded as
/// `z^{shift} * (power series)` where `shift_i = r_i beta_i`, exact per
/// monomial within `spec`.
pub fn tower_series(spec: &TowerSpec, beta: &RootVec, trunc: TruncSpec) -> Result<ShiftedSeries> {
    spec.check(beta)?;
    let n = beta.rank();
    let mut lanes = Vec::with_capacity(n);
    for (i, &c) in beta.0.iter().enumerate() {
        let r = match spec.bounds.get(i) {
            Some(Bound::At(r)) => *r,
            Some(Bound::NegInf) if c > 0 => {
                return Err(Error::InvalidInput(
                    "an infinite boundary has no finite expansion; use tower_sum".into(),
                ))
            }
            _ => 0,
        };
        lanes.push(Lane {
            start: r,
            end: None,
            base: r,
            count: Some(c as u64),
        });
    }
    let shift: Vec<i64> = lanes.iter().zip(&beta.0).map(|(l, c)| l.base * c).collect();
    let cfgs = enumerate(&lanes, trunc.max_z_degree as i64);
    Ok(ShiftedSeries {
        series: accumulate(n, &cfgs, &shift, trunc),
        shift: ZMonomial(shift),
    })
}

/// `q^k z^mu` keyed for grouping.
type Base = (i64, Vec<i64>);

fn base_expr(b: &Base, power: i64) -> FactoredExpr {
    FactoredExpr::monomial(
        VScalar::v_pow(2 * b.0 * power),
        &ZMonomial(b.1.iter().map(|x| x * power).collect()),
    )
}

/// `sum_j C_j Y_j^s` as a function of an integer `s`.
#[derive(Clone, Debug)]
struct ExpPoly {
    n: usize,
    terms: BTreeMap<Base, TermSum>,
}

impl ExpPoly {
    fn constant(c: TermSum) -> Self {
        let n = c.rank();
        let mut terms = BTreeMap::new();
        terms.insert((0, vec![0; n]), c);
        ExpPoly { n, terms }
    }

    fn add(&mut self, b: Base, c: TermSum) {
        match self.terms.get_mut(&b) {
            Some(x) => *x = x.add(&c),
            None => {
                self.terms.insert(b, c);
            }
        }
    }

    fn eval(&self, s: i64) -> TermSum {
        let mut out = TermSum::zero(self.n);
        for (b, c) in &self.terms {
            out = out.add(&c.scale(&base_expr(b, s)));
        }
        out
    }

    fn constant_part(&self) -> TermSum {
        self.terms
            .get(&(0, vec![0; self.n]))
            .cloned()
            .unwrap_or_else(|| TermSum::zero(self.n))
    }
}

/// Pieces `(start, f)`: `f` is valid on `[start, next start)`; the first
/// piece starts at `-infinity`.
type Piecewise = Vec<(Option<i64>, ExpPoly)>;

fn piece_at(p: &Piecewise, s: i64) -> &ExpPoly {
    &p.iter()
        .rev()
        .find(|(st, _)| st.map_or(true, |x| x <= s))
        .expect("first piece covers -infinity")
        .1
}

/// From `S(s) = next(s)` builds `sum_{t >= max(s, lower)} x^t next(t + 1)`.
fn sum_step(next: &Piecewise, x: &Base, lower: Bound) -> Result<Piecewise> {
    let n = x.1.len();
    // g(t) = x^t next(t + 1)
    let g: Vec<(Option<i64>, ExpPoly)> = next
        .iter()
        .map(|(st, f)| {
            let mut h = ExpPoly {
                n,
                terms: BTreeMap::new(),
            };
            for (b, c) in &f.terms {
                let nb = (
                    b.0 + x.0,
                    b.1.iter().zip(&x.1).map(|(a, c)| a + c).collect(),
                );
                h.add(nb, c.scale(&base_expr(b, 1)));
            }
            (st.map(|p| p - 1), h)
        })
        .collect();
    // tail sums T(u) = sum_{t >= u} g(t), last piece first
    let mut tails: Vec<(Option<i64>, ExpPoly)> = Vec::with_capacity(g.len());
    let mut after: Option<(i64, TermSum)> = None;
    for (st, f) in g.iter().rev() {
        let mut t = ExpPoly {
            n,
            terms: BTreeMap::new(),
        };
        let mut konst = after.as_ref().map(|(_, v)| v.clone());
        for (b, c) in &f.terms {
            if b.0 == 0 && b.1.iter().all(|&e| e == 0) {
                return Err(Error::Stabilization(
                    "a geometric ratio equals 1; the sum over times does not converge".into(),
                ));
            }
            let mut inv = FactoredExpr::one(n);
            inv.mul_unit(b.0, &ZMonomial(b.1.clone()), -1)?;
            let cz = c.scale(&inv);
            if let (Some((p, _)), Some(k)) = (&after, konst.as_mut()) {
                *k = k.sub(&cz.scale(&base_expr(b, *p)));
            }
            t.add(b.clone(), cz);
        }
        if let Some(k) = konst {
            t.add((0, vec![0; n]), k);
        }
        after = st.map(|p| (p, t.eval(p)));
        tails.push((*st, t));
    }
    tails.reverse();
    match lower {
        Bound::NegInf => Ok(tails),
        Bound::At(l) => {
            let at_l = piece_at(&tails, l).eval(l);
            let mut out: Piecewise = vec![(None, ExpPoly::constant(at_l))];
            let first = piece_at(&tails, l).clone();
            out.push((Some(l), first));
            for (st, f) in tails {
                if st.is_some_and(|p| p > l) {
                    out.push((st, f));
                }
            }
            Ok(out)
        }
    }
}

/// Ordered sequences of nonzero parts of `beta`.
fn ordered_compositions(beta: &RootVec) -> Vec<Vec<RootVec>> {
    if beta.is_zero() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in beta.lower_box() {
        if first.is_zero() {
            continue;
        }
        for mut rest in ordered_compositions(&beta.sub(&first)) {
            rest.insert(0, first.clone());
            out.push(rest);
        }
    }
    out
}

/// The sum over `t_1 < ... < t_m` for the parts `gammas`, as a rational function.
fn composition_sum(spec: &TowerSpec, gammas: &[RootVec]) -> Result<TermSum> {
    let n = gammas[0].rank();
    let m = gammas.len();
    let mut s: Piecewise = vec![(None, ExpPoly::constant(TermSum::one(n)))];
    let mut tail = RootVec::zero(n);
    for a in (0..m).rev() {
        let g = &gammas[a];
        let k = g.form(g) / 2 + g.form(&tail);
        s = sum_step(&s, &(k, g.0.clone()), spec.lower(g))?;
        tail = tail.add(g);
    }
    let mut w = FactoredExpr::one(n);
    for g in gammas {
        for &c in &g.0 {
            w.mul_poch(&PochFactor::q(n, c as u64), -1)?;
        }
    }
    Ok(s[0].1.constant_part().scale(&w))
}

/// The tower sum for weight `lambda` and total `beta`, summed in closed
/// form. Sums running to `-infinity` are continued from the region where
/// they converge.
pub fn tower_sum(spec: &TowerSpec, lambda: &WeightExpr, beta: &RootVec) -> Result<TermSum> {
    spec.check(beta)?;
    let n = beta.rank();
    let comps = ordered_compositions(beta);
    let parts: Vec<TermSum> = comps
        .par_iter()
        .map(|c| {
            if c.is_empty() {
                Ok(TermSum::one(n))
            } else {
                composition_sum(spec, c)
            }
        })
        .collect::<Result<_>>()?;
    let mut out = TermSum::zero(n);
    for p in parts {
        out = out.add(&p);
    }
    let sub = lambda.substitution(n);
    if sub.is_identity() {
        Ok(out)
    } else {
        out.subst(&sub)
    }
}

/// `J^lambda_beta[r+1, s+1] = q^{(beta,beta)/2 - (lambda+rho, beta)} J^lambda_beta[r, s]`.
pub fn shift_check(
    lambda: &WeightExpr,
    beta: &RootVec,
    r: i64,
    s: i64,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let n = beta.rank();
    let sub = lambda.substitution(n);
    let lhs = fermionic_sum(n, beta, r + 1, s + 1).subst(&sub)?;
    let pre = FactoredExpr::monomial(VScalar::v_pow(beta.form(beta)), &ZMonomial(beta.0.clone()));
    let rhs = fermionic_sum(n, beta, r, s).scale(&pre).subst(&sub)?;
    crate::multivar::termsum_equal(&lhs, &rhs, trials, seed)
}
