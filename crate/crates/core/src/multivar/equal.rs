use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::factored::{FactoredExpr, TermSum};
use crate::error::{Error, Result};
use crate::scalar::{rational_pow, Rational};

/// A specialization `v = v0`, `z_i = w_i^2`. Squares make half-integral
/// z-powers exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoint {
    pub v: Rational,
    pub w: Vec<Rational>,
}

impl EvalPoint {
    /// Builds a point from `z`-values, taking exact square roots where they
    /// exist; the flag reports whether every `z_i` was a rational square.
    fn from_z(v: Rational, z: &[Rational]) -> (EvalPoint, bool) {
        let mut all = true;
        let w = z
            .iter()
            .map(|x| match rational_sqrt(x) {
                Some(r) => r,
                None => {
                    all = false;
                    x.clone()
                }
            })
            .collect();
        (EvalPoint { v, w }, all)
    }

    /// `z_i = w_i^2`.
    pub fn z(&self) -> Vec<Rational> {
        self.w.iter().map(|w| w * w).collect()
    }
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let sq = |b: &BigInt| {
        let r = b.sqrt();
        (&r * &r == *b).then_some(r)
    };
    Some(Rational::new(sq(x.numer())?, sq(x.denom())?))
}

/// Value of `q^a * prod z^{mu}` at the point, with `mu` given doubled.
fn monomial_value(p: &EvalPoint, v_exp: i64, z2: &[i64]) -> Rational {
    let mut acc = rational_pow(&p.v, v_exp);
    for (w, e) in p.w.iter().zip(z2) {
        if *e != 0 {
            acc *= rational_pow(w, *e);
        }
    }
    acc
}

/// Exact value of one factored term at `p`.
pub(crate) fn eval_expr(e: &FactoredExpr, p: &EvalPoint) -> Result<Rational> {
    if e.is_zero() {
        return Ok(Rational::zero());
    }
    if e.has_infinite() {
        return Err(Error::InfiniteFactor);
    }
    let mut num = e.coeff().eval_at(&p.v)?;
    let mut den = Rational::one();
    num *= monomial_value(p, 0, e.z2());
    for (u, m) in e.units() {
        let z2: Vec<i64> = u.mu.0.iter().map(|x| 2 * x).collect();
        let f = Rational::one() - monomial_value(p, 2 * u.a, &z2);
        if f.is_zero() && *m < 0 {
            return Err(Error::Pole(format!(
                "factor (1 - q^{} z^{}) vanishes",
                u.a, u.mu
            )));
        }
        let fp = num_traits::pow(f, m.unsigned_abs() as usize);
        if *m > 0 {
            num *= fp;
        } else {
            den *= fp;
        }
    }
    for (poly, m) in e.poly_denominators() {
        let mut f = Rational::zero();
        for ((v, z), c) in &poly.terms {
            let z2: Vec<i64> = z.iter().map(|x| 2 * x).collect();
            f += monomial_value(p, *v, &z2) * Rational::from_integer(BigInt::from(*c));
        }
        if f.is_zero() && *m > 0 {
            return Err(Error::Pole("polynomial denominator vanishes".into()));
        }
        let fp = num_traits::pow(f, m.unsigned_abs() as usize);
        if *m > 0 {
            den *= fp;
        } else {
            num *= fp;
        }
    }
    Ok(num / den)
}

pub(crate) fn eval_sum(t: &TermSum, p: &EvalPoint) -> Result<Rational> {
    let mut acc = Rational::zero();
    for e in t.terms() {
        acc += eval_expr(e, p)?;
    }
    Ok(acc)
}

/// Exact value of `t` at `v = v0`, `z = z0`. Half-integral z-powers need
/// every `z0_i` to be a rational square.
pub fn eval_exact(t: &TermSum, v0: &Rational, z0: &[Rational]) -> Result<Rational> {
    if z0.len() != t.rank() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, expression has rank {}",
            z0.len(),
            t.rank()
        )));
    }
    let (p, squares) = EvalPoint::from_z(v0.clone(), z0);
    if squares {
        return eval_sum(t, &p);
    }
    if t.terms().iter().any(|e| e.z_monomial().is_none()) {
        return Err(Error::Integrality(
            "half-integral z-power at a non-square point".into(),
        ));
    }
    let mut acc = Rational::zero();
    for e in t.terms() {
        acc += eval_integral(e, v0, z0)?;
    }
    Ok(acc)
}

fn eval_integral(e: &FactoredExpr, v0: &Rational, z0: &[Rational]) -> Result<Rational> {
    let mu = e.z_monomial().expect("integral prefactor");
    if e.has_infinite() {
        return Err(Error::InfiniteFactor);
    }
    let mut val = Rational::one();
    let mut pref = e.coeff().eval_at(v0)?;
    for (z, k) in z0.iter().zip(&mu.0) {
        pref *= rational_pow(z, *k);
    }
    for (u, m) in e.units() {
        let mut q = rational_pow(v0, 2 * u.a);
        for (z, k) in z0.iter().zip(&u.mu.0) {
            q *= rational_pow(z, *k);
        }
        let f = Rational::one() - q;
        if f.is_zero() && *m < 0 {
            return Err(Error::Pole(format!(
                "factor (1 - q^{} z^{}) vanishes",
                u.a, u.mu
            )));
        }
        let fp = num_traits::pow(f, m.unsigned_abs() as usize);
        if *m > 0 {
            val *= fp;
        } else {
            val /= fp;
        }
    }
    for (poly, m) in e.poly_denominators() {
        let mut f = Rational::zero();
        for ((v, z), c) in &poly.terms {
            let mut t = rational_pow(v0, *v) * Rational::from_integer(BigInt::from(*c));
            for (zz, k) in z0.iter().zip(z) {
                t *= rational_pow(zz, *k);
            }
            f += t;
        }
        if f.is_zero() && *m > 0 {
            return Err(Error::Pole("polynomial denominator vanishes".into()));
        }
        let fp = num_traits::pow(f, m.unsigned_abs() as usize);
        if *m > 0 {
            val /= fp;
        } else {
            val *= fp;
        }
    }
    Ok(pref * val)
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    loop {
        let p: i64 = rng.gen_range(lo..=hi);
        let q: i64 = rng.gen_range(1..=hi);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let r = Rational::new(BigInt::from(sign * p), BigInt::from(q));
        if !r.is_zero() {
            return r;
        }
    }
}

/// Seeded random points: `|v0| != 0, 1` and nonzero `w`.
pub fn sample_points(n: usize, count: usize, seed: u64) -> impl Iterator<Item = EvalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| {
        let v = loop {
            let v = random_rational(&mut rng, 1, 13);
            if v.abs() != Rational::one() {
                break v;
            }
        };
        let w = (0..n).map(|_| random_rational(&mut rng, 1, 11)).collect();
        EvalPoint { v, w }
    })
}

/// A point where two sums differ, with both values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub point: EvalPoint,
    pub left: Rational,
    pub right: Rational,
}

/// Probabilistic-exact equality: `a - b` vanishes at `trials` seeded random
/// points where neither side has a pole. Points hitting a pole are skipped,
/// up to a retry budget of `20 * trials` candidates.
pub fn termsum_equal(a: &TermSum, b: &TermSum, trials: usize, seed: u64) -> Result<bool> {
    Ok(termsum_witness(a, b, trials, seed)?.is_none())
}

/// Like [`termsum_equal`], returning the first differing point.
pub fn termsum_witness(
    a: &TermSum,
    b: &TermSum,
    trials: usize,
    seed: u64,
) -> Result<Option<Witness>> {
    if a.rank() != b.rank() {
        return Err(Error::SpecMismatch);
    }
    let budget = 20 * trials.max(1);
    let mut found = 0;
    for p in sample_points(a.rank(), budget, seed) {
        if found == trials {
            break;
        }
        let (x, y) = match (eval_sum(a, &p), eval_sum(b, &p)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(Error::Pole(_)), _) | (_, Err(Error::Pole(_))) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        if x != y {
            return Ok(Some(Witness {
                point: p,
                left: x,
                right: y,
            }));
        }
        found += 1;
    }
    if found < trials {
        return Err(Error::RetryBudget {
            wanted: trials,
            found,
        });
    }
    Ok(None)
}
