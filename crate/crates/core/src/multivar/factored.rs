use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::ZMonomial;
use crate::error::{Error, Result};
use crate::scalar::VScalar;
use crate::weights::Subst;

/// Length of a q-Pochhammer symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Len {
    Finite(u64),
    Infinite,
}

/// `(q^{q_shift} z^{z}; q)_{len}` with `(x)_m = prod_{i=1}^{m} (1 - q^{i-1} x)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PochFactor {
    pub q_shift: i64,
    pub z: ZMonomial,
    pub len: Len,
}

impl PochFactor {
    pub fn new(q_shift: i64, z: ZMonomial, len: u64) -> Self {
        PochFactor {
            q_shift,
            z,
            len: Len::Finite(len),
        }
    }

    pub fn infinite(q_shift: i64, z: ZMonomial) -> Self {
        PochFactor {
            q_shift,
            z,
            len: Len::Infinite,
        }
    }

    /// `(q)_m`.
    pub fn q(n: usize, m: u64) -> Self {
        Self::new(1, ZMonomial::one(n), m)
    }
}

/// A single factor `1 - q^a z^mu`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unit {
    pub mu: ZMonomial,
    pub a: i64,
}

/// A polynomial in `v` and `z` kept unexpanded as an extra denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SparsePoly {
    /// `(v-exponent, z-exponents) -> integer coefficient`.
    pub terms: BTreeMap<(i64, Vec<i64>), i64>,
}

impl SparsePoly {
    pub fn add_term(&mut self, c: i64, v: i64, z: &[i64]) {
        let e = self.terms.entry((v, z.to_vec())).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&(v, z.to_vec()));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn subst(&self, s: &Subst) -> SparsePoly {
        let mut out = SparsePoly::default();
        for ((v, z), c) in &self.terms {
            let dv: i64 = z.iter().zip(&s.shifts).map(|(e, a)| 2 * e * a).sum();
            let z2: Vec<i64> = z.iter().map(|e| e * s.sign).collect();
            out.add_term(*c, v + dv, &z2);
        }
        out
    }
}

/// `coeff * z^{z2/2} * prod units^{mult} * prod infinite^{mult} / prod polys`.
///
/// The prefactor z-exponents are stored doubled: intermediate products of
/// q-brackets in a symbolic weight carry half-integral powers, which cancel
/// in every exported quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredExpr {
    rank: usize,
    coeff: VScalar,
    z2: Vec<i64>,
    units: BTreeMap<Unit, i64>,
    infs: BTreeMap<Unit, i64>,
    polys: Vec<(SparsePoly, i64)>,
}

impl FactoredExpr {
    pub fn one(n: usize) -> Self {
        Self::constant(n, VScalar::one())
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, VScalar::zero())
    }

    pub fn constant(n: usize, coeff: VScalar) -> Self {
        FactoredExpr {
            rank: n,
            coeff,
            z2: vec![0; n],
            units: BTreeMap::new(),
            infs: BTreeMap::new(),
            polys: Vec::new(),
        }
    }

    /// `coeff * z^mu`.
    pub fn monomial(coeff: VScalar, z: &ZMonomial) -> Self {
        let mut e = Self::constant(z.rank(), coeff);
        e.z2 = z.0.iter().map(|x| 2 * x).collect();
        e.canon_zero();
        e
    }

    /// `sign * v^{v_exp} * z^{z2/2}`.
    pub fn half_monomial(sign: i64, v_exp: i64, z2: Vec<i64>) -> Self {
        let mut e = Self::constant(z2.len(), VScalar::monomial(BigInt::from(sign), v_exp));
        e.z2 = z2;
        e.canon_zero();
        e
    }

    /// `coeff * z^mu * prod num / prod den`.
    pub fn from_factors(
        coeff: VScalar,
        z: &ZMonomial,
        num: &[PochFactor],
        den: &[PochFactor],
    ) -> Result<Self> {
        let mut e = Self::monomial(coeff, z);
        for f in num {
            e.mul_poch(f, 1)?;
        }
        for f in den {
            e.mul_poch(f, -1)?;
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeff(&self) -> &VScalar {
        &self.coeff
    }

    pub fn z2(&self) -> &[i64] {
        &self.z2
    }

    pub fn units(&self) -> &BTreeMap<Unit, i64> {
        &self.units
    }

    pub fn infinite_factors(&self) -> &BTreeMap<Unit, i64> {
        &self.infs
    }

    pub fn poly_denominators(&self) -> &[(SparsePoly, i64)] {
        &self.polys
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn has_infinite(&self) -> bool {
        !self.infs.is_empty()
    }

    /// The prefactor z-monomial when all its exponents are integral.
    pub fn z_monomial(&self) -> Option<ZMonomial> {
        if self.z2.iter().all(|x| x % 2 == 0) {
            Some(ZMonomial(self.z2.iter().map(|x| x / 2).collect()))
        } else {
            None
        }
    }

    fn canon_zero(&mut self) {
        if self.coeff.is_zero() {
            *self = FactoredExpr {
                rank: self.rank,
                coeff: VScalar::zero(),
                z2: vec![0; self.rank],
                units: BTreeMap::new(),
                infs: BTreeMap::new(),
                polys: Vec::new(),
            };
        }
    }

    pub fn mul_scalar(&mut self, c: &VScalar) {
        self.coeff = self.coeff.mul(c);
        self.canon_zero();
    }

    pub fn mul_v(&mut self, e: i64) {
        if e != 0 {
            self.coeff = self.coeff.mul(&VScalar::v_pow(e));
        }
    }

    pub fn mul_z2(&mut self, z2: &[i64]) {
        if self.is_zero() {
            return;
        }
        for (a, b) in self.z2.iter_mut().zip(z2) {
            *a += b;
        }
    }

    pub fn mul_z(&mut self, z: &ZMonomial) {
        let z2: Vec<i64> = z.0.iter().map(|x| 2 * x).collect();
        self.mul_z2(&z2);
    }

    /// Multiplies by `(1 - q^a z^mu)^mult`, normalizing so that stored
    /// factors have `mu >= 0` (and `a > 0` when `mu = 0`) whenever the sign
    /// pattern allows it.
    pub fn mul_unit(&mut self, a: i64, mu: &ZMonomial, mult: i64) -> Result<()> {
        if mult == 0 || self.is_zero() {
            return Ok(());
        }
        let (a, mu) = if mu.is_one() {
            if a == 0 {
                if mult > 0 {
                    self.coeff = VScalar::zero();
                    self.canon_zero();
                    return Ok(());
                }
                return Err(Error::Pole("factor (1 - q^0) in a denominator".into()));
            }
            if a < 0 {
                // 1 - q^a = -q^a (1 - q^{-a})
                self.flip_factor(a, mu, mult);
                (-a, mu.clone())
            } else {
                (a, mu.clone())
            }
        } else if mu.all_nonpos() {
            // 1 - q^a z^mu = -q^a z^mu (1 - q^{-a} z^{-mu})
            self.flip_factor(a, mu, mult);
            (-a, mu.pow(-1))
        } else {
            (a, mu.clone())
        };
        let key = Unit { mu, a };
        let e = self.units.entry(key.clone()).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.units.remove(&key);
        }
        Ok(())
    }

    fn flip_factor(&mut self, a: i64, mu: &ZMonomial, mult: i64) {
        let sign = if mult % 2 == 0 { 1 } else { -1 };
        self.coeff = self
            .coeff
            .mul(&VScalar::monomial(BigInt::from(sign), 2 * a * mult));
        let z2: Vec<i64> = mu.0.iter().map(|x| 2 * x * mult).collect();
        self.mul_z2(&z2);
    }

    /// Multiplies by `f^power`.
    pub fn mul_poch(&mut self, f: &PochFactor, power: i64) -> Result<()> {
        match f.len {
            Len::Finite(m) => {
                for j in 0..m as i64 {
                    self.mul_unit(f.q_shift + j, &f.z, power)?;
                }
                Ok(())
            }
            Len::Infinite => {
                if f.z.is_one() && f.q_shift < 1 {
                    return Err(Error::NonExpandablePureQ(f.q_shift));
                }
                if self.is_zero() {
                    return Ok(());
                }
                let key = Unit {
                    mu: f.z.clone(),
                    a: f.q_shift,
                };
                let e = self.infs.entry(key.clone()).or_insert(0);
                *e += power;
                if *e == 0 {
                    self.infs.remove(&key);
                }
                Ok(())
            }
        }
    }

    /// Divides by the polynomial `p`.
    pub fn div_poly(&mut self, p: SparsePoly) -> Result<()> {
        if p.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(slot) = self.polys.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += 1;
        } else {
            self.polys.push((p, 1));
            self.polys.sort();
        }
        self.polys.retain(|(_, m)| *m != 0);
        Ok(())
    }

    pub fn mul(&self, o: &FactoredExpr) -> FactoredExpr {
        if self.is_zero() || o.is_zero() {
            return FactoredExpr::zero(self.rank);
        }
        let mut out = self.clone();
        out.coeff = out.coeff.mul(&o.coeff);
        out.mul_z2(&o.z2);
        for (u, m) in &o.units {
            let e = out.units.entry(u.clone()).or_insert(0);
            *e += m;
        }
        out.units.retain(|_, m| *m != 0);
        for (u, m) in &o.infs {
            let e = out.infs.entry(u.clone()).or_insert(0);
            *e += m;
        }
        out.infs.retain(|_, m| *m != 0);
        for (p, m) in &o.polys {
            if let Some(slot) = out.polys.iter_mut().find(|(q, _)| q == p) {
                slot.1 += m;
            } else {
                out.polys.push((p.clone(), *m));
            }
        }
        out.polys.retain(|(_, m)| *m != 0);
        out.polys.sort();
        out
    }

    pub fn inv(&self) -> Result<FactoredExpr> {
        let mut out = self.clone();
        out.coeff = self.coeff.inv()?;
        out.z2.iter_mut().for_each(|x| *x = -*x);
        out.units.values_mut().for_each(|m| *m = -*m);
        out.infs.values_mut().for_each(|m| *m = -*m);
        out.polys.iter_mut().for_each(|(_, m)| *m = -*m);
        Ok(out)
    }

    pub fn pow(&self, k: i64) -> Result<FactoredExpr> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = FactoredExpr::one(self.rank);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn neg(&self) -> FactoredExpr {
        let mut out = self.clone();
        out.coeff = out.coeff.neg();
        out
    }

    /// Applies `z_i -> q^{shift_i} z_i^{sign}`.
    pub fn subst(&self, s: &Subst) -> Result<FactoredExpr> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        // z^{e/2} -> q^{c e / 2} z^{s e / 2} = v^{c e} z^{s e / 2}
        let dv: i64 = self.z2.iter().zip(&s.shifts).map(|(e, c)| e * c).sum();
        let z2: Vec<i64> = self.z2.iter().map(|e| e * s.sign).collect();
        let mut out = FactoredExpr::constant(self.rank, self.coeff.clone());
        out.mul_v(dv);
        out.z2 = z2;
        for (u, m) in &self.units {
            let da: i64 = u.mu.0.iter().zip(&s.shifts).map(|(e, c)| e * c).sum();
            out.mul_unit(u.a + da, &u.mu.pow(s.sign), *m)?;
        }
        for (u, m) in &self.infs {
            let da: i64 = u.mu.0.iter().zip(&s.shifts).map(|(e, c)| e * c).sum();
            out.mul_poch(&PochFactor::infinite(u.a + da, u.mu.pow(s.sign)), *m)?;
        }
        for (p, m) in &self.polys {
            out.polys.push((p.subst(s), *m));
        }
        out.polys.sort();
        Ok(out)
    }

    /// Groups the finite factors back into q-Pochhammer runs:
    /// `(numerator, denominator)`.
    pub fn poch_factors(&self) -> (Vec<PochFactor>, Vec<PochFactor>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        let mut by_mu: BTreeMap<&ZMonomial, BTreeMap<i64, i64>> = BTreeMap::new();
        for (u, m) in &self.units {
            by_mu.entry(&u.mu).or_default().insert(u.a, *m);
        }
        for (mu, mut counts) in by_mu {
            for sign in [1i64, -1] {
                loop {
                    let Some(start) = counts.iter().find(|(_, m)| **m * sign > 0).map(|(a, _)| *a)
                    else {
                        break;
                    };
                    let mut len = 0;
                    while counts.get(&(start + len)).is_some_and(|m| m * sign > 0) {
                        *counts.get_mut(&(start + len)).unwrap() -= sign;
                        len += 1;
                    }
                    let f = PochFactor::new(start, mu.clone(), len as u64);
                    if sign > 0 {
                        num.push(f);
                    } else {
                        den.push(f);
                    }
                }
            }
        }
        for (u, m) in &self.infs {
            let f = PochFactor::infinite(u.a, u.mu.clone());
            for _ in 0..m.unsigned_abs() {
                if *m > 0 {
                    num.push(f.clone());
                } else {
                    den.push(f.clone());
                }
            }
        }
        (num, den)
    }
}

/// A finite sum of [`FactoredExpr`]; equality is mathematical, never
/// positional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSum {
    rank: usize,
    terms: Vec<FactoredExpr>,
}

impl TermSum {
    pub fn zero(n: usize) -> Self {
        TermSum {
            rank: n,
            terms: Vec::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::from_expr(FactoredExpr::one(n))
    }

    pub fn from_expr(e: FactoredExpr) -> Self {
        let mut t = TermSum::zero(e.rank());
        t.push(e);
        t
    }

    pub fn from_terms(n: usize, terms: Vec<FactoredExpr>) -> Self {
        let mut t = TermSum::zero(n);
        for e in terms {
            t.push(e);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &[FactoredExpr] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, e: FactoredExpr) {
        assert_eq!(e.rank(), self.rank, "rank mismatch in TermSum");
        if !e.is_zero() {
            self.terms.push(e);
        }
    }

    pub fn add(&self, o: &TermSum) -> TermSum {
        let mut out = self.clone();
        for e in &o.terms {
            out.push(e.clone());
        }
        out
    }

    pub fn neg(&self) -> TermSum {
        TermSum {
            rank: self.rank,
            terms: self.terms.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn sub(&self, o: &TermSum) -> TermSum {
        self.add(&o.neg())
    }

    pub fn scale(&self, f: &FactoredExpr) -> TermSum {
        let mut out = TermSum::zero(self.rank);
        for e in &self.terms {
            out.push(e.mul(f));
        }
        out
    }

    pub fn mul(&self, o: &TermSum) -> TermSum {
        let mut out = TermSum::zero(self.rank);
        for a in &self.terms {
            for b in &o.terms {
                out.push(a.mul(b));
            }
        }
        out
    }

    pub fn subst(&self, s: &Subst) -> Result<TermSum> {
        let mut out = TermSum::zero(self.rank);
        for e in &self.terms {
            out.push(e.subst(s)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_factors_cancel() {
        let n = 1;
        let z = ZMonomial::var(n, 1);
        let num = [PochFactor::new(1, z.clone(), 3)];
        let den = [PochFactor::new(1, z.clone(), 2)];
        let e = FactoredExpr::from_factors(VScalar::one(), &ZMonomial::one(n), &num, &den).unwrap();
        let (nf, df) = e.poch_factors();
        assert_eq!(nf, vec![PochFactor::new(3, z, 1)]);
        assert!(df.is_empty());
    }

    #[test]
    fn zero_factor_and_pole() {
        let mut e = FactoredExpr::one(1);
        e.mul_unit(0, &ZMonomial::one(1), 1).unwrap();
        assert!(e.is_zero());
        let mut e = FactoredExpr::one(1);
        assert!(e.mul_unit(0, &ZMonomial::one(1), -1).is_err());
    }

    #[test]
    fn negative_monomials_are_flipped() {
        // 1/(1 - q z^{-1}) = -q^{-1} z / (1 - q^{-1} z)
        let mut e = FactoredExpr::one(1);
        e.mul_unit(1, &ZMonomial(vec![-1]), -1).unwrap();
        assert_eq!(e.z_monomial(), Some(ZMonomial(vec![1])));
        assert_eq!(e.coeff(), &VScalar::v_pow(-2).neg());
        assert_eq!(
            e.units().get(&Unit {
                mu: ZMonomial(vec![1]),
                a: -1
            }),
            Some(&-1)
        );
    }

    #[test]
    fn runs_regroup() {
        let n = 2;
        let z = ZMonomial::range(n, 0, 2);
        let f = PochFactor::new(-2, z.clone(), 4);
        let g = PochFactor::new(1, z.clone(), 2);
        let e =
            FactoredExpr::from_factors(VScalar::one(), &ZMonomial::one(n), &[], &[f.clone(), g])
                .unwrap();
        let (_, den) = e.poch_factors();
        // -2..1 and 1..2 overlap at 1
        assert_eq!(
            den,
            vec![PochFactor::new(-2, z.clone(), 5), PochFactor::new(1, z, 1)]
        );
    }
}
