use std::collections::BTreeMap;

use super::ZMonomial;
use crate::error::{Error, Result};

/// Truncation window: total z-degree at most `max_z_degree`, v-powers in
/// `v_min..=v_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncSpec {
    pub max_z_degree: u32,
    pub v_min: i64,
    pub v_max: i64,
}

impl TruncSpec {
    pub fn new(max_z_degree: u32, v_min: i64, v_max: i64) -> Result<Self> {
        if v_min > v_max {
            return Err(Error::InvalidInput(format!(
                "empty v-window [{v_min}, {v_max}]"
            )));
        }
        Ok(TruncSpec {
            max_z_degree,
            v_min,
            v_max,
        })
    }
}

/// Exponent used for "exact to every order".
pub(crate) const EXACT: i64 = i64::MAX / 4;

/// A Laurent polynomial in `v` with dense integer coefficients starting at
/// `v^lo`. Zero has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent {
    lo: i64,
    c: Vec<i128>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn monomial(coeff: i128, e: i64) -> Self {
        if coeff == 0 {
            return Laurent::zero();
        }
        Laurent {
            lo: e,
            c: vec![coeff],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn get(&self, e: i64) -> i128 {
        if e < self.lo {
            return 0;
        }
        self.c.get((e - self.lo) as usize).copied().unwrap_or(0)
    }

    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lo + self.c.len() as i64 - 1)
    }

    /// Nonzero `(exponent, coefficient)` pairs in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i128)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(move |(i, c)| (self.lo + i as i64, *c))
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
        let k = self.c.iter().position(|&x| x != 0).unwrap_or(self.c.len());
        if k == self.c.len() {
            self.c.clear();
            self.lo = 0;
        } else if k > 0 {
            self.c.drain(..k);
            self.lo += k as i64;
        }
    }

    fn ensure(&mut self, lo: i64, hi: i64) {
        if self.is_zero() {
            self.lo = lo;
            self.c = vec![0; (hi - lo + 1) as usize];
            return;
        }
        if lo < self.lo {
            let mut v = vec![0; (self.lo - lo) as usize];
            v.append(&mut self.c);
            self.c = v;
            self.lo = lo;
        }
        let top = self.lo + self.c.len() as i64 - 1;
        if hi > top {
            self.c.resize(self.c.len() + (hi - top) as usize, 0);
        }
    }

    pub fn add_at(&mut self, e: i64, x: i128) {
        if x == 0 {
            return;
        }
        self.ensure(e, e);
        self.c[(e - self.lo) as usize] += x;
        self.trim();
    }

    /// `self += factor * v^shift * other`, dropping exponents above `cap`.
    pub fn add_scaled(&mut self, other: &Laurent, factor: i128, shift: i64, cap: i64) {
        if other.is_zero() || factor == 0 {
            return;
        }
        let lo = other.lo + shift;
        let hi = (other.lo + other.c.len() as i64 - 1 + shift).min(cap);
        if hi < lo {
            return;
        }
        self.ensure(lo, hi);
        let base = (lo - self.lo) as usize;
        for (i, x) in other.c.iter().take((hi - lo + 1) as usize).enumerate() {
            self.c[base + i] += factor * x;
        }
        self.trim();
    }

    pub fn truncate_above(&mut self, cap: i64) {
        if let Some(top) = self.max_exp() {
            if top > cap {
                let keep = (cap - self.lo + 1).max(0) as usize;
                self.c.truncate(keep);
                self.trim();
            }
        }
    }

    /// Product with exponents above `cap` dropped.
    pub fn mul(&self, other: &Laurent, cap: i64) -> Laurent {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero();
        }
        let lo = self.lo + other.lo;
        let full_hi = lo + (self.c.len() + other.c.len()) as i64 - 2;
        let hi = full_hi.min(cap);
        if hi < lo {
            return Laurent::zero();
        }
        let mut c = vec![0i128; (hi - lo + 1) as usize];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            if i as i64 + lo > hi {
                break;
            }
            let room = (hi - lo - i as i64 + 1) as usize;
            for (j, b) in other.c.iter().take(room).enumerate() {
                c[i + j] += a * b;
            }
        }
        let mut out = Laurent { lo, c };
        out.trim();
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            lo: self.lo,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }
}

/// Result of comparing two series inside their common window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Differ {
        z: ZMonomial,
        v: i64,
        left: i128,
        right: i128,
    },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

/// A power series in `z_1..z_n` with Laurent coefficients in `v`.
///
/// Coefficients are stored for every v-power up to `exact_to`, including
/// powers below the window, so products stay exact inside the window. A
/// series read back from JSON only knows its window (`complete_below` is
/// false) and can be compared or added but not multiplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    rank: usize,
    spec: TruncSpec,
    exact_to: i64,
    complete_below: bool,
    coeffs: BTreeMap<ZMonomial, Laurent>,
}

impl TruncSeries {
    pub fn zero(n: usize, spec: TruncSpec) -> Self {
        TruncSeries {
            rank: n,
            spec,
            exact_to: EXACT,
            complete_below: true,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, spec: TruncSpec) -> Self {
        Self::monomial(n, spec, &ZMonomial::one(n), 1, 0)
    }

    /// `c * v^e * z^mu` (zero when `mu` lies outside the degree bound).
    pub fn monomial(n: usize, spec: TruncSpec, mu: &ZMonomial, c: i128, e: i64) -> Self {
        let mut s = Self::zero(n, spec);
        s.add_term(mu, &Laurent::monomial(c, e));
        s
    }

    pub(crate) fn from_parts(
        n: usize,
        spec: TruncSpec,
        exact_to: i64,
        complete_below: bool,
        coeffs: BTreeMap<ZMonomial, Laurent>,
    ) -> Self {
        let mut s = TruncSeries {
            rank: n,
            spec,
            exact_to,
            complete_below,
            coeffs,
        };
        let cap = s.exact_to;
        s.coeffs.retain(|_, l| {
            l.truncate_above(cap);
            !l.is_zero()
        });
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn spec(&self) -> TruncSpec {
        self.spec
    }

    /// Every stored coefficient at a v-power `<= exact_to` is exact.
    pub fn exact_to(&self) -> i64 {
        self.exact_to
    }

    pub fn complete_below(&self) -> bool {
        self.complete_below
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, mu: &ZMonomial) -> Option<&Laurent> {
        self.coeffs.get(mu)
    }

    pub fn coeff(&self, mu: &ZMonomial, e: i64) -> i128 {
        self.coeffs.get(mu).map_or(0, |l| l.get(e))
    }

    /// Stored monomials, ordered by total degree and then lexicographically.
    pub fn monomials(&self) -> Vec<&ZMonomial> {
        let mut ms: Vec<&ZMonomial> = self.coeffs.keys().collect();
        ms.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        ms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ZMonomial, &Laurent)> {
        self.coeffs.iter()
    }

    /// Smallest stored v-power.
    pub fn min_v(&self) -> Option<i64> {
        self.coeffs.values().filter_map(Laurent::min_exp).min()
    }

    /// `self += c * v^e * z^mu * l`; monomials with negative exponents or
    /// degree above the bound are rejected or dropped respectively.
    pub fn add_term(&mut self, mu: &ZMonomial, l: &Laurent) {
        assert!(
            mu.all_nonneg(),
            "negative exponent in a power series monomial"
        );
        if mu.degree() > self.spec.max_z_degree as i64 || l.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(mu.clone()).or_default();
        slot.add_scaled(l, 1, 0, self.exact_to);
        if slot.is_zero() {
            self.coeffs.remove(mu);
        }
    }

    fn check_spec(&self, o: &TruncSeries) -> Result<()> {
        if self.spec != o.spec || self.rank != o.rank {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &TruncSeries) -> Result<TruncSeries> {
        self.check_spec(o)?;
        let mut out = self.clone();
        out.exact_to = self.exact_to.min(o.exact_to);
        out.complete_below = self.complete_below && o.complete_below;
        let cap = out.exact_to;
        for l in out.coeffs.values_mut() {
            l.truncate_above(cap);
        }
        for (mu, l) in &o.coeffs {
            let slot = out.coeffs.entry(mu.clone()).or_default();
            slot.add_scaled(l, 1, 0, cap);
        }
        out.coeffs.retain(|_, l| !l.is_zero());
        Ok(out)
    }

    pub fn neg(&self) -> TruncSeries {
        let mut out = self.clone();
        for l in out.coeffs.values_mut() {
            *l = l.neg();
        }
        out
    }

    pub fn sub(&self, o: &TruncSeries) -> Result<TruncSeries> {
        self.add(&o.neg())
    }

    /// Multiplies by `v^e`.
    pub fn shift_v(&self, e: i64) -> TruncSeries {
        let mut out = self.clone();
        if out.exact_to < EXACT {
            out.exact_to += e;
        }
        for l in out.coeffs.values_mut() {
            if !l.is_zero() {
                l.lo += e;
            }
        }
        out
    }

    /// Multiplies by `c * z^mu`, dropping monomials pushed past the degree
    /// bound.
    pub fn mul_monomial(&self, mu: &ZMonomial, c: i128) -> TruncSeries {
        let mut out = TruncSeries {
            coeffs: BTreeMap::new(),
            ..self.clone()
        };
        for (m, l) in &self.coeffs {
            let nm = m.mul(mu);
            let mut nl = Laurent::zero();
            nl.add_scaled(l, c, 0, EXACT);
            out.add_term(&nm, &nl);
        }
        out
    }

    pub fn mul(&self, o: &TruncSeries) -> Result<TruncSeries> {
        self.check_spec(o)?;
        if !self.complete_below || !o.complete_below {
            return Err(Error::InvalidInput(
                "multiplication needs series known below the window".into(),
            ));
        }
        let (Some(ma), Some(mb)) = (self.min_v(), o.min_v()) else {
            return Ok(TruncSeries::zero(self.rank, self.spec));
        };
        let exact_to = sat_add(self.exact_to, mb).min(sat_add(o.exact_to, ma));
        let d = self.spec.max_z_degree as i64;
        let mut coeffs: BTreeMap<ZMonomial, Laurent> = BTreeMap::new();
        for (m1, l1) in &self.coeffs {
            for (m2, l2) in &o.coeffs {
                if m1.degree() + m2.degree() > d {
                    continue;
                }
                let p = l1.mul(l2, exact_to);
                if p.is_zero() {
                    continue;
                }
                coeffs
                    .entry(m1.mul(m2))
                    .or_default()
                    .add_scaled(&p, 1, 0, exact_to);
            }
        }
        coeffs.retain(|_, l| !l.is_zero());
        Ok(TruncSeries {
            rank: self.rank,
            spec: self.spec,
            exact_to,
            complete_below: true,
            coeffs,
        })
    }

    /// First difference inside the window, scanning monomials by degree and
    /// v-powers upward.
    pub fn compare(&self, o: &TruncSeries) -> Result<Comparison> {
        self.check_spec(o)?;
        let needed = self.spec.v_max;
        for s in [self, o] {
            if s.exact_to < needed {
                return Err(Error::PrecisionLoss {
                    exact_to: s.exact_to,
                    needed,
                });
            }
        }
        let mut keys: Vec<&ZMonomial> = self.coeffs.keys().chain(o.coeffs.keys()).collect();
        keys.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        keys.dedup();
        for mu in keys {
            for e in self.spec.v_min..=self.spec.v_max {
                let (a, b) = (self.coeff(mu, e), o.coeff(mu, e));
                if a != b {
                    return Ok(Comparison::Differ {
                        z: mu.clone(),
                        v: e,
                        left: a,
                        right: b,
                    });
                }
            }
        }
        Ok(Comparison::Equal)
    }

    /// Coefficients restricted to the window, dropping empty monomials.
    pub fn window_terms(&self) -> Vec<(ZMonomial, Vec<(i64, i128)>)> {
        self.monomials()
            .into_iter()
            .filter_map(|mu| {
                let l = &self.coeffs[mu];
                let cs: Vec<(i64, i128)> = l
                    .iter()
                    .filter(|(e, _)| *e >= self.spec.v_min && *e <= self.spec.v_max)
                    .collect();
                (!cs.is_empty()).then(|| (mu.clone(), cs))
            })
            .collect()
    }
}

pub(crate) fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT {
        EXACT
    } else {
        a + b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TruncSpec {
        TruncSpec::new(4, -10, 20).unwrap()
    }

    #[test]
    fn product_of_conjugates() {
        let s = spec();
        let z = ZMonomial::var(1, 1);
        let one = TruncSeries::one(1, s);
        let a = one.add(&TruncSeries::monomial(1, s, &z, 1, 2)).unwrap();
        let b = one.add(&TruncSeries::monomial(1, s, &z, -1, 2)).unwrap();
        let p = a.mul(&b).unwrap();
        let want = one
            .add(&TruncSeries::monomial(1, s, &z.pow(2), -1, 4))
            .unwrap();
        assert!(p.compare(&want).unwrap().is_equal());
        assert!(a.mul(&one).unwrap().compare(&a).unwrap().is_equal());
    }

    #[test]
    fn compare_reports_first_difference() {
        let s = spec();
        let a = TruncSeries::monomial(2, s, &ZMonomial(vec![1, 0]), 3, 4);
        let b = TruncSeries::zero(2, s);
        assert_eq!(
            a.compare(&b).unwrap(),
            Comparison::Differ {
                z: ZMonomial(vec![1, 0]),
                v: 4,
                left: 3,
                right: 0
            }
        );
        let other = TruncSeries::zero(2, TruncSpec::new(3, -10, 20).unwrap());
        assert!(matches!(a.compare(&other), Err(Error::SpecMismatch)));
    }

    #[test]
    fn laurent_mul_respects_cap() {
        let a = Laurent {
            lo: -2,
            c: vec![1, 1, 1],
        };
        let p = a.mul(&a, 0);
        assert_eq!(
            p.iter().collect::<Vec<_>>(),
            vec![(-4, 1), (-3, 2), (-2, 3), (-1, 2), (0, 1)]
        );
        let p = a.mul(&a, -2);
        assert_eq!(p.max_exp(), Some(-2));
    }
}
