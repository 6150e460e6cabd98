use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::IntPoly;
use super::Rational;
use crate::error::{Error, Result};

/// An element of Q(v), kept as `v^shift * num(v) / den(v)` in canonical form.
///
/// Canonical form: `num` and `den` have nonzero constant terms, share no
/// polynomial factor, the combined integer content is 1, and `den` has a
/// positive leading coefficient. Zero is `0 / 1` with `shift = 0`. Equal
/// values therefore have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VScalar {
    num: IntPoly,
    shift: i64,
    den: IntPoly,
}

impl VScalar {
    pub fn zero() -> Self {
        VScalar {
            num: IntPoly::zero(),
            shift: 0,
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(c: i64) -> Self {
        Self::monomial(BigInt::from(c), 0)
    }

    /// `c * v^e`.
    pub fn monomial(c: BigInt, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        VScalar {
            num: IntPoly::constant(c),
            shift: e,
            den: IntPoly::one(),
        }
    }

    pub fn v_pow(e: i64) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    /// `v^low * (c_0 + c_1 v + ...)`.
    pub fn laurent(low: i64, coeffs: &[i64]) -> Self {
        Self::normalize(IntPoly::from_i64s(coeffs), low, IntPoly::one()).expect("unit denominator")
    }

    /// Builds `v^shift * num / den`, reducing to canonical form.
    pub fn from_parts(num: IntPoly, shift: i64, den: IntPoly) -> Result<Self> {
        Self::normalize(num, shift, den)
    }

    fn normalize(num: IntPoly, mut shift: i64, den: IntPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let tn = num.low_order();
        let td = den.low_order();
        let mut num = num.shift_down(tn);
        let mut den = den.shift_down(td);
        shift += tn as i64 - td as i64;
        if !den.degree().is_some_and(|d| d == 0) {
            let g = num.gcd(&den);
            if g.degree().is_some_and(|d| d > 0) {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        let mut c = num.content().gcd(&den.content());
        if den.lc().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        Ok(VScalar { num, shift, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// `Some((c, e))` when the value is `c * v^e`.
    pub fn as_monomial(&self) -> Option<(BigInt, i64)> {
        if self.den.is_one() && self.num.degree() == Some(0) {
            Some((self.num.lc(), self.shift))
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        VScalar {
            num: -&self.num,
            shift: self.shift,
            den: self.den.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(rhs.shift);
        let a = self.num.shift_up((self.shift - s) as usize);
        let b = rhs.num.shift_up((rhs.shift - s) as usize);
        if self.den == rhs.den {
            return Self::normalize(&a + &b, s, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&a * &rhs.den) + &(&b * &self.den);
        Self::normalize(num, s, &self.den * &rhs.den).expect("nonzero denominator")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let num = &self.num * &rhs.num;
        let shift = self.shift + rhs.shift;
        if self.den.is_one() && rhs.den.is_one() {
            // unit denominators: the product is already canonical
            return VScalar {
                num,
                shift,
                den: IntPoly::one(),
            };
        }
        Self::normalize(num, shift, &self.den * &rhs.den).expect("nonzero denominator")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::normalize(self.den.clone(), -self.shift, self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Sign of the value compared to zero: only zero/nonzero is meaningful in
    /// Q(v), so this returns `Ordering::Equal` exactly for zero.
    pub fn cmp_zero(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.num.lc().is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// The substitution `v -> v^{-1}`.
    pub fn invert_v(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let rev = |p: &IntPoly| {
            let mut c = p.coeffs().to_vec();
            c.reverse();
            IntPoly::from_coeffs(c)
        };
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        Self::normalize(rev(&self.num), dd - dn - self.shift, rev(&self.den))
            .expect("nonzero denominator")
    }

    /// Exact value at `v = v0`.
    pub fn eval_at(&self, v0: &Rational) -> Result<Rational> {
        if self.is_zero() {
            return Ok(Rational::zero());
        }
        if v0.is_zero() && self.shift < 0 {
            return Err(Error::Pole(format!("v^{} at v = 0", self.shift)));
        }
        let d = self.den.eval(v0);
        if d.is_zero() {
            return Err(Error::Pole(format!(
                "denominator of {self} vanishes at v = {v0}"
            )));
        }
        let n = self.num.eval(v0);
        Ok(n * rational_pow(v0, self.shift) / d)
    }
}

/// `x^e` for any integer `e`; `x` must be nonzero when `e < 0`.
pub fn rational_pow(x: &Rational, e: i64) -> Rational {
    let r = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

fn fmt_poly(p: &IntPoly, shift: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first && !c.is_negative() {
            write!(f, "+")?;
        }
        first = false;
        write!(f, "{}*v^{}", c, i as i64 + shift)?;
    }
    Ok(())
}

impl fmt::Display for VScalar {
    /// `(c*v^e+...)/(c*v^e+...)`, both sides with decimal integer coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        fmt_poly(&self.num, self.shift, f)?;
        write!(f, ")/(")?;
        fmt_poly(&self.den, 0, f)?;
        write!(f, ")")
    }
}

fn parse_laurent(s: &str) -> Result<(IntPoly, i64)> {
    let s = s.trim();
    if s == "0" {
        return Ok((IntPoly::zero(), 0));
    }
    let mut terms: Vec<(BigInt, i64)> = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut pieces = Vec::new();
    for i in 1..=bytes.len() {
        // split before '+' or '-' that is not an exponent sign
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
            pieces.push(&s[start..i]);
            start = i;
        }
    }
    for piece in pieces {
        let piece = piece.strip_prefix('+').unwrap_or(piece);
        let (c, e) = piece
            .split_once("*v^")
            .ok_or_else(|| Error::Parse(format!("bad term '{piece}'")))?;
        let c = BigInt::from_str(c).map_err(|e| Error::Parse(e.to_string()))?;
        let e = i64::from_str(e).map_err(|e| Error::Parse(e.to_string()))?;
        terms.push((c, e));
    }
    let lo = terms.iter().map(|t| t.1).min().unwrap_or(0);
    let hi = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
    for (c, e) in terms {
        coeffs[(e - lo) as usize] += c;
    }
    Ok((IntPoly::from_coeffs(coeffs), lo))
}

impl FromStr for VScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = s
            .split_once(")/(")
            .ok_or_else(|| Error::Parse(format!("expected '(num)/(den)', got '{s}'")))?;
        let n = n
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse("missing '('".into()))?;
        let d = d
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse("missing ')'".into()))?;
        let (np, ns) = parse_laurent(n)?;
        let (dp, ds) = parse_laurent(d)?;
        Self::normalize(np, ns - ds, dp)
    }
}

impl From<i64> for VScalar {
    fn from(c: i64) -> Self {
        Self::int(c)
    }
}
