//! Gelfand-Zetlin patterns and the two exact formulas for the scalar product
//! `J_d(q, z)` of Whittaker vectors.
//!
//! A pattern is stored through its offsets `m_{k,i} = lambda_k - lambda_{k,i}`
//! for `0 <= k <= i <= n - 1`; row `n` is the highest weight itself.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multivar::{FactoredExpr, PochFactor, TermSum, ZMonomial};
use crate::scalar::{qbracket, Rational, VScalar};
use crate::weights::{LinForm, RootVec, WeightExpr};

/// Offsets `m_{k,i}` of a Gelfand-Zetlin pattern of `gl_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GelfandPattern {
    n: usize,
    /// `rows[i][k] = m_{k,i}` for `0 <= k <= i < n`.
    rows: Vec<Vec<i64>>,
}

impl GelfandPattern {
    pub fn new(n: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.len() != n || rows.iter().enumerate().any(|(i, r)| r.len() != i + 1) {
            return Err(Error::InvalidInput(
                "pattern rows must have lengths 1..n".into(),
            ));
        }
        let p = GelfandPattern { n, rows };
        for k in 0..n {
            for i in k..n {
                if p.m(k, i) < p.m(k, i + 1) {
                    return Err(Error::InvalidInput(format!(
                        "m_({k},{i}) = {} is below m_({k},{})",
                        p.m(k, i),
                        i + 1
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// `m_{k,i}`, with `m_{k,n} = 0`.
    pub fn m(&self, k: usize, i: usize) -> i64 {
        if i >= self.n {
            0
        } else {
            self.rows[i][k]
        }
    }

    /// `d_i = sum_{k < i} m_{k,i-1}`, the weight of the pattern.
    pub fn weight(&self) -> RootVec {
        RootVec(self.rows.iter().map(|r| r.iter().sum()).collect())
    }

    /// The weight `lambda^{(i)}` of row `i`.
    pub fn row_weight(&self, i: usize) -> WeightExpr {
        WeightExpr {
            sign: 1,
            offsets: (0..=i).map(|k| self.m(k, i)).collect(),
        }
    }

    /// `lambda_{k,i} = lambda_k - m_{k,i}` as a form in `lambda`.
    pub fn coord(&self, k: usize, i: usize) -> LinForm {
        LinForm::coord(self.n, k, self.m(k, i))
    }
}

impl std::fmt::Display for GelfandPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| format!("{r:?}")).collect();
        write!(f, "{}", rows.join(" "))
    }
}

/// All patterns of weight `d`, ordered lexicographically in
/// `(m_{0,0}, m_{0,1}, m_{1,1}, m_{0,2}, ...)`.
pub fn enumerate_patterns(n: usize, d: &RootVec) -> Vec<GelfandPattern> {
    assert_eq!(d.rank(), n, "weight of the wrong rank");
    let mut out = Vec::new();
    if !d.in_q_plus() {
        return out;
    }
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n);
    fill_row(n, &d.0, &mut rows, &mut Vec::new(), &mut out);
    out
}

fn fill_row(
    n: usize,
    d: &[i64],
    rows: &mut Vec<Vec<i64>>,
    cur: &mut Vec<i64>,
    out: &mut Vec<GelfandPattern>,
) {
    let i = rows.len();
    if i == n {
        out.push(GelfandPattern {
            n,
            rows: rows.clone(),
        });
        return;
    }
    let k = cur.len();
    let used: i64 = cur.iter().sum();
    let left = d[i] - used;
    if k == i {
        // the diagonal entry takes whatever remains of d_{i+1}
        if left < 0 {
            return;
        }
        cur.push(left);
        rows.push(std::mem::take(cur));
        fill_row(n, d, rows, cur, out);
        *cur = rows.pop().unwrap();
        cur.pop();
        return;
    }
    let upper = rows[i - 1][k].min(left);
    for x in 0..=upper {
        cur.push(x);
        fill_row(n, d, rows, cur, out);
        cur.pop();
    }
}

/// `ht = sum m_{k,i}` over the pattern.
pub fn ht(p: &GelfandPattern) -> i64 {
    p.rows.iter().flatten().sum()
}

/// `sum_i p_i(lambda^{(i)}, lambda^{(i-1)})` at the integral highest weight
/// `lambda = (lambda_0..lambda_n)`. The inner sums of the quadratic term are
/// read as independent totals over each row.
pub fn p_exponent(p: &GelfandPattern, lambda: &[i64]) -> i64 {
    let n = p.n;
    assert_eq!(lambda.len(), n + 1);
    let x = |k: usize, i: usize| lambda[k] - p.m(k, i);
    let total = |i: usize| (0..=i).map(|k| x(k, i)).sum::<i64>();
    let e2 = |i: usize| {
        let mut s = 0;
        for k in 0..=i {
            for l in k + 1..=i {
                s += x(k, i) * x(l, i);
            }
        }
        s
    };
    let mut out = 0;
    for i in 1..=n {
        let ii = i as i64;
        let quad = total(i - 1) * (total(i - 1) - total(i)) - e2(i - 1) + e2(i);
        let lin: i64 = (1..i)
            .map(|k| (k as i64) * (ii - k as i64) * (x(k, i - 1) - x(k, i)))
            .sum();
        out += (ii - 1) * quad - lin;
    }
    out
}

/// `[x]` for a form `x` in `lambda`, as `v^{1 - x} (1 - q^x) / (1 - q)` with
/// `q^{lambda_{i-1} - lambda_i} = q^{-1} z_i^{-1}`.
pub fn bracket_to_factored(n: usize, x: &LinForm) -> Result<FactoredExpr> {
    let mut e = FactoredExpr::one(n);
    mul_bracket(&mut e, x, 1)?;
    Ok(e)
}

/// `e *= [x]^power`.
fn mul_bracket(e: &mut FactoredExpr, x: &LinForm, power: i64) -> Result<()> {
    let (v_exp, z2) = x.v_power()?;
    let (q_exp, qz2) = x.q_power()?;
    let a = q_exp / 2;
    let mu = ZMonomial(qz2.iter().map(|t| t / 2).collect());
    let mut f = FactoredExpr::half_monomial(1, 1 - v_exp, z2.iter().map(|t| -t).collect());
    f.mul_unit(a, &mu, 1)?;
    f.mul_unit(1, &ZMonomial::one(e.rank()), -1)?;
    if power < 0 && f.is_zero() {
        return Err(Error::Pole(format!("bracket [{x:?}] vanishes")));
    }
    *e = e.mul(&f.pow(power)?);
    Ok(())
}

/// `e *= ([x]_len)^power = ([x][x+1]...[x+len-1])^power`.
fn mul_bracket_poch(e: &mut FactoredExpr, x: &LinForm, len: i64, power: i64) -> Result<()> {
    for j in 0..len {
        mul_bracket(e, &x.plus(j), power)?;
    }
    Ok(())
}

/// `A_i(mu, nu)^2` for weights of ranks `i` and `i - 1` inside the ambient
/// rank `n`.
pub fn a_squared(n: usize, mu: &WeightExpr, nu: &WeightExpr) -> Result<FactoredExpr> {
    let i = mu.rank();
    if nu.offsets.len() != i {
        return Err(Error::InvalidInput(
            "nu must have one coordinate fewer than mu".into(),
        ));
    }
    let diff: Vec<i64> = (0..i)
        .map(|k| {
            let d = mu.coord(n, k).sub(&nu.coord(n, k));
            if d.is_constant() && d.c >= 0 {
                Ok(d.c)
            } else {
                Err(Error::Integrality(format!(
                    "mu_{k} - nu_{k} is not a non-negative integer"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let mut e = FactoredExpr::one(n);
    for &len in &diff {
        mul_bracket_poch(&mut e, &LinForm::constant(n, 1), len, -1)?;
    }
    for k in 0..i {
        for l in k + 1..i {
            let x = nu
                .coord(n, k)
                .sub(&nu.coord(n, l))
                .plus(l as i64 - k as i64 + 1);
            mul_bracket_poch(&mut e, &x, diff[k], -1)?;
        }
        for l in k + 1..=i {
            let x = nu
                .coord(n, k)
                .sub(&mu.coord(n, l))
                .plus(l as i64 - k as i64);
            mul_bracket_poch(&mut e, &x, diff[k], -1)?;
        }
    }
    Ok(e)
}

/// `c_{k,i-1}(pattern)^2` for `1 <= i <= n`, `0 <= k <= i - 1`.
pub fn chevalley_c_squared(p: &GelfandPattern, k: usize, i: usize) -> Result<FactoredExpr> {
    let n = p.n;
    if i == 0 || i > n || k >= i {
        return Err(Error::InvalidInput(format!(
            "no coefficient c_({k},{})",
            i as i64 - 1
        )));
    }
    let kk = k as i64;
    let base = p.coord(k, i - 1);
    let mut e = FactoredExpr::monomial(VScalar::int(-1), &ZMonomial::one(n));
    if i >= 2 {
        for l in 0..=i - 2 {
            let x = p.coord(l, i - 2).sub(&base).plus(kk - l as i64 - 1);
            mul_bracket(&mut e, &x, 1)?;
        }
    }
    for l in 0..=i {
        let x = p.coord(l, i).sub(&base).plus(kk - l as i64);
        mul_bracket(&mut e, &x, 1)?;
    }
    for l in (0..i).filter(|&l| l != k) {
        let x = p.coord(l, i - 1).sub(&base).plus(kk - l as i64);
        for shift in [-1, 0] {
            mul_bracket(&mut e, &x.plus(shift), -1)
                .map_err(|_| Error::NonGeneric(format!("pattern {p} at c_({k},{})", i - 1)))?;
        }
    }
    Ok(e)
}

fn pattern_term(n: usize, p: &GelfandPattern) -> Result<FactoredExpr> {
    let h = ht(p);
    // ((1 - v^2)(1 - v^-2))^{-ht} = (-1)^ht q^ht (1 - q)^{-2 ht}
    let sign = if h % 2 == 0 { 1 } else { -1 };
    let mut e = FactoredExpr::half_monomial(sign, 2 * h, vec![0; n]);
    e.mul_unit(1, &ZMonomial::one(n), -2 * h)?;
    for i in 1..=n {
        let mu = if i == n {
            WeightExpr::lambda(n)
        } else {
            p.row_weight(i)
        };
        e = e.mul(&a_squared(n, &mu, &p.row_weight(i - 1))?);
    }
    Ok(e)
}

/// `J_d` from the Gelfand-Zetlin form of the Whittaker vectors:
/// `v^{-(b,b)/2 + (lambda,b)} sum ((1-v^2)(1-v^-2))^{-ht} prod_i A_i^2`.
pub fn scalar_product_j(n: usize, d: &RootVec) -> Result<TermSum> {
    let patterns = enumerate_patterns(n, d);
    let (v_exp, z2) = WeightExpr::lambda(n).pair(n, d).v_power()?;
    let pref = FactoredExpr::half_monomial(1, v_exp - d.form(d) / 2, z2);
    let terms: Vec<FactoredExpr> = patterns
        .par_iter()
        .map(|p| pattern_term(n, p).map(|t| t.mul(&pref)))
        .collect::<Result<_>>()?;
    Ok(TermSum::from_terms(n, terms))
}

/// `p(m)` of the explicit formula.
pub fn p_of_m(p: &GelfandPattern) -> i64 {
    let n = p.n;
    let mut s = 0;
    for i in 0..n {
        for k in 0..=i {
            for l in k + 1..=i {
                s -= p.m(k, i) * p.m(l, i);
            }
            if k < i {
                s += p.m(k, i) * (p.m(k, i) - 1) / 2;
                for l in k + 1..i {
                    s += p.m(k, i) * p.m(l, i - 1);
                }
            }
        }
    }
    s
}

/// The summand of the explicit formula for one pattern.
pub fn jd_term(p: &GelfandPattern) -> FactoredExpr {
    let n = p.n;
    let d = p.weight();
    let diag: i64 = (0..n).map(|i| p.m(i, i)).sum();
    let sign = if (d.height() - diag) % 2 == 0 { 1 } else { -1 };
    let mut z = vec![0i64; n];
    for (j, zj) in z.iter_mut().enumerate().map(|(j, x)| (j + 1, x)) {
        for k in 0..j {
            for i in j + 1..=n {
                *zj += p.m(k, i - 1);
            }
        }
    }
    let mut den = Vec::new();
    for i in 1..=n {
        for k in 0..i {
            let len = (p.m(k, i - 1) - p.m(k, i)) as u64;
            den.push(PochFactor::q(n, len));
            for l in k + 1..i {
                den.push(PochFactor::new(
                    p.m(k, i) - p.m(l, i - 1),
                    ZMonomial::range(n, k, l),
                    len,
                ));
            }
            for l in k + 1..=i {
                den.push(PochFactor::new(
                    p.m(k, i) - p.m(l, i) + 1,
                    ZMonomial::range(n, k, l),
                    len,
                ));
            }
        }
    }
    let coeff = VScalar::monomial(sign.into(), 2 * p_of_m(p));
    FactoredExpr::from_factors(coeff, &ZMonomial(z), &[], &den)
        .expect("finite factors with nonzero z-parts never vanish identically")
}

/// `J_d` from the explicit pattern sum.
pub fn jd_explicit(n: usize, d: &RootVec) -> TermSum {
    let terms: Vec<FactoredExpr> = enumerate_patterns(n, d).par_iter().map(jd_term).collect();
    TermSum::from_terms(n, terms)
}

/// The product formula for `J_d` in ranks 1 and 2; `None` for larger ranks.
///
/// `1/((q)_{d1} (q z1)_{d1})` and
/// `(q z1 z2)_{d1+d2} / ((q)_{d1} (q)_{d2} (q z1)_{d1} (q z2)_{d2} (q z1 z2)_{d1} (q z1 z2)_{d2})`.
pub fn jd_closed_form(n: usize, d: &RootVec) -> Option<TermSum> {
    let len = |i: usize| d.0[i].max(0) as u64;
    let (num, den) = match n {
        1 => (
            vec![],
            vec![
                PochFactor::q(1, len(0)),
                PochFactor::new(1, ZMonomial::var(1, 1), len(0)),
            ],
        ),
        2 => {
            let z12 = ZMonomial(vec![1, 1]);
            (
                vec![PochFactor::new(1, z12.clone(), len(0) + len(1))],
                vec![
                    PochFactor::q(2, len(0)),
                    PochFactor::q(2, len(1)),
                    PochFactor::new(1, ZMonomial::var(2, 1), len(0)),
                    PochFactor::new(1, ZMonomial::var(2, 2), len(1)),
                    PochFactor::new(1, z12.clone(), len(0)),
                    PochFactor::new(1, z12, len(1)),
                ],
            )
        }
        _ => return None,
    };
    if d.0.iter().any(|&x| x < 0) {
        return Some(TermSum::zero(n));
    }
    let e = FactoredExpr::from_factors(VScalar::one(), &ZMonomial::one(n), &num, &den)
        .expect("finite factors with nonzero z-parts never vanish identically");
    Some(TermSum::from_expr(e))
}

/// The rational identity behind the Whittaker recursion:
/// `sum_l prod_k [a_k - b_l] / prod_{k != l} [b_k - b_l] * v^{-sum a + sum_{k != l} b_k}`,
/// whose value is 1. With `perturbed` the exponent sums over all `k`, which
/// breaks the identity.
pub fn whittaker_identity_sum(
    a: &[i64],
    b: &[i64],
    v0: &Rational,
    perturbed: bool,
) -> Result<Rational> {
    if b.len() != a.len() + 1 {
        return Err(Error::InvalidInput("b needs one entry more than a".into()));
    }
    for (x, bx) in b.iter().enumerate() {
        if b[x + 1..].contains(bx) {
            return Err(Error::NonGeneric(format!("coincident b value {bx}")));
        }
    }
    let br = |m: i64| qbracket(m).eval_at(v0);
    let sum_a: i64 = a.iter().sum();
    let sum_b: i64 = b.iter().sum();
    let mut acc = Rational::from_integer(0.into());
    for (l, bl) in b.iter().enumerate() {
        let mut num = Rational::from_integer(1.into());
        for ak in a {
            num *= br(ak - bl)?;
        }
        let mut den = Rational::from_integer(1.into());
        for (k, bk) in b.iter().enumerate() {
            if k != l {
                den *= br(bk - bl)?;
            }
        }
        let e = -sum_a + sum_b - if perturbed { 0 } else { *bl };
        acc += num / den * VScalar::v_pow(e).eval_at(v0)?;
    }
    Ok(acc)
}

/// Checks the identity at `v = v0`.
pub fn verify_whittaker_identity(a: &[i64], b: &[i64], v0: &Rational) -> Result<bool> {
    Ok(whittaker_identity_sum(a, b, v0, false)? == Rational::from_integer(1.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multivar::termsum_equal;

    #[test]
    fn pattern_counts() {
        assert_eq!(enumerate_patterns(1, &RootVec(vec![2])).len(), 1);
        let ps = enumerate_patterns(2, &RootVec(vec![1, 1]));
        assert_eq!(
            ps.iter().map(|p| p.rows().to_vec()).collect::<Vec<_>>(),
            vec![vec![vec![1], vec![0, 1]], vec![vec![1], vec![1, 0]],]
        );
        let zero = enumerate_patterns(3, &RootVec::zero(3));
        assert_eq!(zero.len(), 1);
        assert_eq!(ht(&zero[0]), 0);
        assert!(enumerate_patterns(2, &RootVec(vec![-1, 1])).is_empty());
    }

    #[test]
    fn pattern_counts_match_brute_force() {
        for d in RootVec::all_up_to_height(3, 4) {
            let mut count = 0;
            // entries m00 | m01 m11 | m02 m12 m22, each at most 4
            for code in 0..5i64.pow(6) {
                let e: Vec<i64> = (0..6).map(|j| (code / 5i64.pow(j)) % 5).collect();
                let rows = vec![vec![e[0]], vec![e[1], e[2]], vec![e[3], e[4], e[5]]];
                let Ok(p) = GelfandPattern::new(3, rows) else {
                    continue;
                };
                if p.weight() == d {
                    count += 1;
                }
            }
            assert_eq!(enumerate_patterns(3, &d).len(), count, "d = {d}");
        }
    }

    #[test]
    fn ht_and_p_exponent() {
        let p = GelfandPattern::new(2, vec![vec![2], vec![1, 0]]).unwrap();
        assert_eq!(ht(&p), 3);
        let zero = GelfandPattern::new(2, vec![vec![0], vec![0, 0]]).unwrap();
        assert_eq!(p_exponent(&zero, &[5, 2, -1]), 0);
        let p1 = GelfandPattern::new(1, vec![vec![4]]).unwrap();
        assert_eq!(ht(&p1), 4);
    }

    #[test]
    fn a_squared_small_cases() {
        let n = 1;
        let mu = WeightExpr::lambda(1);
        assert_eq!(
            a_squared(
                n,
                &mu.restrict(0),
                &WeightExpr {
                    sign: 1,
                    offsets: vec![]
                }
            )
            .unwrap(),
            FactoredExpr::one(1)
        );
        // i = 1, mu_0 - nu_0 = 1: 1/[nu_0 - mu_1 + 1]
        let nu = WeightExpr {
            sign: 1,
            offsets: vec![1],
        };
        let a = a_squared(n, &mu, &nu).unwrap();
        let x = nu.coord(1, 0).sub(&mu.coord(1, 1)).plus(1);
        let want = bracket_to_factored(1, &x).unwrap().inv().unwrap();
        assert!(termsum_equal(&TermSum::from_expr(a), &TermSum::from_expr(want), 8, 3).unwrap());
    }

    #[test]
    fn bracket_conversion_matches_qbracket() {
        // [lambda_0 - lambda_1 + 1] at lambda_0 - lambda_1 = t is [t + 1],
        // with z_1 = q^{-t-1}
        let x = LinForm {
            lam: vec![1, -1],
            c: 1,
        };
        let b = TermSum::from_expr(bracket_to_factored(1, &x).unwrap());
        let v0 = Rational::new(3.into(), 2.into());
        for t in 0..=5i64 {
            let z = VScalar::v_pow(-2 * (t + 1)).eval_at(&v0).unwrap();
            let got = crate::multivar::eval_exact(&b, &v0, &[z]).unwrap();
            assert_eq!(got, qbracket(t + 1).eval_at(&v0).unwrap());
        }
        assert!(bracket_to_factored(1, &LinForm::constant(1, 0))
            .unwrap()
            .is_zero());
        let three = bracket_to_factored(1, &LinForm::constant(1, 3)).unwrap();
        let want = FactoredExpr::monomial(qbracket(3), &ZMonomial::one(1));
        assert!(
            termsum_equal(&TermSum::from_expr(three), &TermSum::from_expr(want), 5, 1).unwrap()
        );
    }

    #[test]
    fn c_squared_vanishes_with_zero_numerator() {
        // i = 1, k = 0: -[lambda_{0,1} - lambda_{0,0}][lambda_{1,1} - lambda_{0,0} - 1];
        // lambda_{0,0} = lambda_{0,1} gives [0]
        let p = GelfandPattern::new(1, vec![vec![0]]).unwrap();
        assert!(chevalley_c_squared(&p, 0, 1).unwrap().is_zero());
    }

    #[test]
    fn whittaker_examples() {
        let two = Rational::from_integer(2.into());
        assert!(verify_whittaker_identity(&[5], &[2, 3], &two).unwrap());
        assert!(
            verify_whittaker_identity(&[4, 7], &[1, 2, 9], &Rational::from_integer(3.into()))
                .unwrap()
        );
        assert_ne!(
            whittaker_identity_sum(&[5], &[2, 3], &two, true).unwrap(),
            Rational::from_integer(1.into())
        );
        assert!(verify_whittaker_identity(&[1], &[2, 2], &two).is_err());
    }

    #[test]
    fn rank_one_closed_form() {
        for d1 in 0..=4 {
            let want = FactoredExpr::from_factors(
                VScalar::one(),
                &ZMonomial::one(1),
                &[],
                &[
                    PochFactor::q(1, d1),
                    PochFactor::new(1, ZMonomial::var(1, 1), d1),
                ],
            )
            .unwrap();
            let want = TermSum::from_expr(want);
            let d = RootVec(vec![d1 as i64]);
            assert!(termsum_equal(&jd_explicit(1, &d), &want, 8, 11).unwrap());
            assert!(termsum_equal(&scalar_product_j(1, &d).unwrap(), &want, 8, 12).unwrap());
        }
    }

    #[test]
    fn routes_agree_rank_three() {
        let d = RootVec(vec![1, 1, 1]);
        let a = scalar_product_j(3, &d).unwrap();
        let b = jd_explicit(3, &d);
        assert!(termsum_equal(&a, &b, 6, 5).unwrap());
    }
}
