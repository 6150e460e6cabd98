//! The ground field Q(v) and q-bracket combinatorics. The variable is `v`;
//! `q = v^2` is always a derived substitution.

mod poly;
mod vscalar;

pub use poly::IntPoly;
pub use vscalar::{rational_pow, VScalar};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;

/// `[m] = (v^m - v^{-m}) / (v - v^{-1})` as a Laurent polynomial.
pub fn qbracket(m: i64) -> VScalar {
    if m == 0 {
        return VScalar::zero();
    }
    let a = m.unsigned_abs() as usize;
    // v^{-(a-1)} + v^{-(a-3)} + ... + v^{a-1}
    let mut coeffs = vec![0i64; 2 * a - 1];
    for j in (0..coeffs.len()).step_by(2) {
        coeffs[j] = 1;
    }
    let b = VScalar::laurent(1 - a as i64, &coeffs);
    if m < 0 {
        b.neg()
    } else {
        b
    }
}

/// `[m]! = [m][m-1]...[1]`, with `[0]! = 1`.
pub fn qbracket_factorial(m: u64) -> VScalar {
    (1..=m as i64).fold(VScalar::one(), |acc, j| acc.mul(&qbracket(j)))
}

/// `[m]_k = [m][m+1]...[m+k-1]`, with `[m]_0 = 1`.
pub fn qbracket_poch(m: i64, k: u64) -> VScalar {
    (0..k as i64).fold(VScalar::one(), |acc, j| acc.mul(&qbracket(m + j)))
}

/// `q^e = v^{2e}`.
pub fn q_pow(e: i64) -> VScalar {
    VScalar::v_pow(2 * e)
}

/// Evaluates `x` at `v = v0`; see [`VScalar::eval_at`].
pub fn eval_at(x: &VScalar, v0: &Rational) -> crate::Result<Rational> {
    x.eval_at(v0)
}
