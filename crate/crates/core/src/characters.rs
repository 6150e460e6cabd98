//! Characters of the principal subspace of the level-`k` vacuum module over
//! affine `sl(n+1)`, by the fermionic and the bosonic route, together with
//! the identities linking them and the tower decompositions.

use serde_json::json;

use crate::error::{Error, Result};
use crate::fermionic::{
    fermionic_sum, fermionic_sum_series, fermionic_window_sum, tower_series, tower_sum, Bound,
    TowerSpec,
};
use crate::gz::{a_squared, jd_explicit};
use crate::multivar::{
    expand, expand_termsum, termsum_witness, FactoredExpr, PochFactor, TermSum, TruncSeries,
    TruncSpec, ZMonomial,
};
use crate::report::Check;
use crate::scalar::VScalar;
use crate::weights::{RootVec, Subst, WeightExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharSpec {
    pub n: usize,
    pub k: i64,
    pub trunc: TruncSpec,
}

impl CharSpec {
    pub fn new(n: usize, k: i64, trunc: TruncSpec) -> Result<Self> {
        if n == 0 || k < 0 {
            return Err(Error::InvalidInput(format!(
                "need n >= 1 and k >= 0, got n = {n}, k = {k}"
            )));
        }
        Ok(CharSpec { n, k, trunc })
    }
}

/// `sum_d I_d(z | 1, k)` within the window.
pub fn char_fermionic(spec: &CharSpec) -> TruncSeries {
    fermionic_window_sum(spec.n, spec.k, spec.trunc)
}

/// `prod_{0 <= i < j <= n} 1 / (q^{1 + s_{i,j}} z_{i,j})_inf` with
/// `s_{i,j} = shifts_{i+1} + ... + shifts_j`.
fn inf_prefactor(n: usize, shifts: &[i64]) -> Result<FactoredExpr> {
    let mut e = FactoredExpr::one(n);
    for i in 0..n {
        for j in i + 1..=n {
            let s: i64 = shifts[i..j].iter().sum();
            e.mul_poch(&PochFactor::infinite(1 + s, ZMonomial::range(n, i, j)), -1)?;
        }
    }
    Ok(e)
}

/// `tilde J_d(z) = J_d(z^{-1}) / prod (q z_{i,j})_inf` as a rational sum.
pub fn tilde_j_termsum(n: usize, d: &RootVec) -> Result<TermSum> {
    let inv = Subst {
        sign: -1,
        shifts: vec![0; n],
    };
    Ok(jd_explicit(n, d)
        .subst(&inv)?
        .scale(&inf_prefactor(n, &vec![0; n])?))
}

/// [`tilde_j_termsum`] expanded in the window.
pub fn tilde_j(n: usize, d: &RootVec, trunc: TruncSpec) -> Result<TruncSeries> {
    expand_termsum(&tilde_j_termsum(n, d)?, trunc)
}

/// `q^{k (d,d)/2} z^{k d} tilde J_d(q^{(d, alpha_1)} z_1, ..., q^{(d, alpha_n)} z_n)`.
pub fn bosonic_term(n: usize, k: i64, d: &RootVec) -> Result<TermSum> {
    bosonic_term_from(n, k, d, &jd_explicit(n, d))
}

/// [`bosonic_term`] with `J_d` supplied by the caller.
pub fn bosonic_term_from(n: usize, k: i64, d: &RootVec, jd: &TermSum) -> Result<TermSum> {
    let inv = Subst {
        sign: -1,
        shifts: vec![0; n],
    };
    let shift = Subst {
        sign: 1,
        shifts: (1..=n).map(|i| d.pair_simple(i)).collect(),
    };
    let tilde = jd.subst(&inv)?.scale(&inf_prefactor(n, &vec![0; n])?);
    let pre = FactoredExpr::monomial(VScalar::v_pow(k * d.form(d)), &ZMonomial(d.scale(k).0));
    Ok(tilde.subst(&shift)?.scale(&pre))
}

/// The bosonic character within the window. Only `d` with `k |d| <= D`
/// can reach z-degree `D`: every term of the shifted `tilde J_d` starts in
/// degree `|d| >= 0`, which is checked as the terms are built.
pub fn char_bosonic(spec: &CharSpec) -> Result<(TruncSeries, Check)> {
    let CharSpec { n, k, trunc } = *spec;
    if k == 0 {
        return Ok((
            TruncSeries::one(n, trunc),
            Check::passed().bound("max_height", 0),
        ));
    }
    let max_h = trunc.max_z_degree as i64 / k;
    let ds = RootVec::all_up_to_height(n, max_h);
    let parts: Vec<TruncSeries> = {
        use rayon::prelude::*;
        ds.par_iter()
            .map(|d| {
                let t = bosonic_term(n, k, d)?;
                for e in t.terms() {
                    let low = e.z_monomial().map(|m| m.degree()).unwrap_or(i64::MIN);
                    if low < k * d.height() {
                        return Err(Error::NotPowerSeries(format!(
                            "bosonic term for d = {d} starts below z-degree {}",
                            k * d.height()
                        )));
                    }
                }
                expand_termsum(&t, trunc)
            })
            .collect::<Result<_>>()?
    };
    let mut out = TruncSeries::zero(n, trunc);
    for p in parts {
        out = out.add(&p)?;
    }
    Ok((
        out,
        Check::passed()
            .bound("max_height", max_h)
            .bound("terms", ds.len()),
    ))
}

/// The level-`k` `sl_2` character `sum_m q^{k m^2} z^{k m} / ((q^{2m+1} z)_inf (q)_m (q^{1-2m} z^{-1})_m)`.
pub fn sl2_fixture(k: i64, trunc: TruncSpec) -> Result<TruncSeries> {
    let mut out = TruncSeries::zero(1, trunc);
    let mut m = 0i64;
    while k * m <= trunc.max_z_degree as i64 {
        let e = FactoredExpr::from_factors(
            VScalar::v_pow(2 * k * m * m),
            &ZMonomial(vec![k * m]),
            &[],
            &[
                PochFactor::infinite(2 * m + 1, ZMonomial(vec![1])),
                PochFactor::q(1, m as u64),
                PochFactor::new(1 - 2 * m, ZMonomial(vec![-1]), m as u64),
            ],
        )?;
        out = out.add(&expand(&e, trunc)?)?;
        m += 1;
        if k == 0 {
            break;
        }
    }
    Ok(out)
}

/// The rank-two `J_{d_1,d_2}` with its infinite prefactor in the closed
/// numerator form, at `z` (no shift).
fn bos_j(d1: i64, d2: i64) -> Result<FactoredExpr> {
    let z = |a, b| ZMonomial(vec![a, b]);
    let (u1, u2) = (d1 as u64, d2 as u64);
    FactoredExpr::from_factors(
        VScalar::one(),
        &z(0, 0),
        &[PochFactor::new(1, z(-1, -1), u1 + u2)],
        &[
            PochFactor::infinite(1, z(1, 0)),
            PochFactor::infinite(1, z(0, 1)),
            PochFactor::infinite(1, z(1, 1)),
            PochFactor::q(2, u1),
            PochFactor::q(2, u2),
            PochFactor::new(1, z(-1, 0), u1),
            PochFactor::new(1, z(0, -1), u2),
            PochFactor::new(1, z(-1, -1), u1),
            PochFactor::new(1, z(-1, -1), u2),
        ],
    )
}

/// The rank-two character written with the closed numerator form of `J`.
pub fn bos_fixture(k: i64, trunc: TruncSpec) -> Result<TruncSeries> {
    let mut out = TruncSeries::zero(2, trunc);
    for d in RootVec::all_up_to_height(2, trunc.max_z_degree as i64 / k.max(1)) {
        let (d1, d2) = (d.0[0], d.0[1]);
        let shift = Subst {
            sign: 1,
            shifts: vec![2 * d1 - d2, 2 * d2 - d1],
        };
        let e = bos_j(d1, d2)?.subst(&shift)?.mul(&FactoredExpr::monomial(
            VScalar::v_pow(2 * k * (d1 * d1 + d2 * d2 - d1 * d2)),
            &ZMonomial(vec![k * d1, k * d2]),
        ));
        out = out.add(&expand(&e, trunc)?)?;
    }
    Ok(out)
}

/// The rank-two desingularized sum for `J_{d_1,d_2}(q, z_1, z_2)`.
pub fn sl3_j(d1: i64, d2: i64) -> Result<TermSum> {
    let z = |a, b| ZMonomial(vec![a, b]);
    let mut out = TermSum::zero(2);
    for m in 0..=d1.min(d2) {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let qe = -m * (d2 - m) + m * (m - 1) / 2;
        let u = |x: i64| x as u64;
        let e = FactoredExpr::from_factors(
            VScalar::monomial(sign.into(), 2 * qe),
            &z(m, 0),
            &[],
            &[
                PochFactor::q(2, u(m)),
                PochFactor::q(2, u(d1 - m)),
                PochFactor::q(2, u(d2 - m)),
                PochFactor::new(1, z(1, 0), u(m)),
                PochFactor::new(1, z(1, 1), u(m)),
                PochFactor::new(1, z(0, 1), u(d2 - m)),
                PochFactor::new(-d2 + m, z(1, 0), u(m)),
                PochFactor::new(-d2 + 2 * m + 1, z(1, 0), u(d1 - m)),
            ],
        )?;
        out.push(e);
    }
    Ok(out)
}

/// The rank-two character built from the desingularized `J`.
pub fn sl3_fixture(k: i64, trunc: TruncSpec) -> Result<TruncSeries> {
    let mut out = TruncSeries::zero(2, trunc);
    for d in RootVec::all_up_to_height(2, trunc.max_z_degree as i64 / k.max(1)) {
        let j = sl3_j(d.0[0], d.0[1])?;
        out = out.add(&expand_termsum(&bosonic_term_from(2, k, &d, &j)?, trunc)?)?;
    }
    Ok(out)
}

/// Character coefficients inside the window are polynomials in `q` with
/// non-negative integer coefficients.
pub fn positivity(s: &TruncSeries) -> Check {
    for (z, cs) in s.window_terms() {
        for (e, c) in cs {
            if c < 0 || e % 2 != 0 {
                return Check::failed(json!({
                    "check": "positivity",
                    "z": z.0,
                    "v_power": e,
                    "coefficient": c.to_string(),
                }));
            }
        }
    }
    Check::passed()
}

/// `sum_gamma J^lambda_gamma[1, inf)` and `1 / prod (q z_{i,j})_inf` in the window.
pub fn sum_j_one_infty(n: usize, trunc: TruncSpec) -> Result<(TruncSeries, TruncSeries)> {
    let mut lhs = TruncSeries::zero(n, trunc);
    for g in RootVec::all_up_to_height(n, trunc.max_z_degree as i64) {
        lhs = lhs.add(&fermionic_sum_series(n, &g, 1, trunc)?)?;
    }
    let rhs = expand(&inf_prefactor(n, &vec![0; n])?, trunc)?;
    Ok((lhs, rhs))
}

pub fn product_check(n: usize, trunc: TruncSpec) -> Result<Check> {
    let (l, r) = sum_j_one_infty(n, trunc)?;
    Ok(
        Check::from_comparison(&l.compare(&r)?, "sum of J[1,inf) against the product")
            .bound("gamma_height_max", trunc.max_z_degree),
    )
}

/// `alpha - lambda - 2 rho` as a weight expression.
pub fn reflected_weight(n: usize, alpha: &RootVec) -> WeightExpr {
    let ae = alpha.eps_coords();
    WeightExpr {
        sign: -1,
        offsets: (0..=n).map(|k| 2 * (n - k) as i64 - ae[k]).collect(),
    }
}

/// `J^lambda_beta[1,k] = sum_alpha J^{alpha-lambda-2rho}_alpha[0,inf) J^{lambda-alpha}_{beta-alpha}[1,inf) q^{k((alpha,alpha)/2 - (lambda+rho,alpha))}`,
/// checked as a rational identity and inside the window.
pub fn convolution_check(
    n: usize,
    k: i64,
    beta: &RootVec,
    trunc: TruncSpec,
    trials: usize,
    seed: u64,
) -> Result<Check> {
    let lam = WeightExpr::lambda(n);
    let lhs = fermionic_sum(n, beta, 1, k);
    let mut rhs = TermSum::zero(n);
    let alphas = beta.lower_box();
    for a in &alphas {
        let j0 = tower_sum(&TowerSpec::flat(n, 0), &reflected_weight(n, a), a)?;
        let j1 = tower_sum(&TowerSpec::flat(n, 1), &lam.sub_root(a), &beta.sub(a))?;
        let pre = FactoredExpr::monomial(VScalar::v_pow(k * a.form(a)), &ZMonomial(a.scale(k).0));
        rhs = rhs.add(&j0.mul(&j1).scale(&pre));
    }
    let exact = Check::from_witness(
        termsum_witness(&lhs, &rhs, trials, seed)?.as_ref(),
        "convolution (rational)",
    );
    let window = Check::from_comparison(
        &expand_termsum(&lhs, trunc)?.compare(&expand_termsum(&rhs, trunc)?)?,
        "convolution (window)",
    );
    Ok(exact.and(window).bound("alpha_terms", alphas.len()))
}

/// `d(mu, nu | r) = v^{-(nu,nu)/2 + (mu,nu)} q^{r((nu,nu)/2 - (mu+rho,nu))} ((1-q)(1-q^{-1}))^{-(rho,nu)}`.
pub fn decomposition_coefficient(
    n: usize,
    mu: &WeightExpr,
    nu: &RootVec,
    r: i64,
) -> Result<FactoredExpr> {
    let f = nu.form(nu);
    let h = nu.height();
    let p = mu.pair(n, nu);
    let (c, z2) = p.v_power()?;
    let mut e = FactoredExpr::half_monomial(1, c - f / 2 + r * f, z2);
    let (qv, qz) = p.plus(h).scale(-r).q_power()?;
    e.mul_v(qv);
    e.mul_z2(&qz);
    // ((1-q)(1-q^{-1}))^{-h} = (-1)^h q^h (1-q)^{-2h}
    let sign = if h % 2 == 0 { 1 } else { -1 };
    e.mul_scalar(&VScalar::monomial(sign.into(), 2 * h));
    e.mul_unit(1, &ZMonomial::one(n), -2 * h)?;
    Ok(e)
}

/// Compares a finite tower's enumeration with the expansion of its closed
/// form, both divided by `z^{shift}`.
fn tower_window(
    spec: &TowerSpec,
    beta: &RootVec,
    rational: &TermSum,
    trunc: TruncSpec,
) -> Result<Check> {
    let s = tower_series(spec, beta, trunc)?;
    let back = FactoredExpr::monomial(
        VScalar::one(),
        &ZMonomial(s.shift.0.iter().map(|x| -x).collect()),
    );
    let e = expand_termsum(&rational.scale(&back), trunc)?;
    Ok(Check::from_comparison(
        &s.series.compare(&e)?,
        "tower enumeration against closed form",
    ))
}

/// The tower with boundaries `(-inf, r)` over `Q^+_{n-1}` and `[r, inf)` over
/// `Q^+_n` equals `d(lambda, gamma | r) A_n(lambda, lambda^{(n-1)})^2`, where
/// `lambda^{(n-1)} = (lambda - gamma)|_{P_{n-1}}`. The same tower cut off at
/// `r - cutoff` is compared against enumeration in the window.
pub fn split_tower_check(
    n: usize,
    r: i64,
    gamma: &RootVec,
    cutoff: i64,
    trunc: TruncSpec,
    trials: usize,
    seed: u64,
) -> Result<Check> {
    if n < 2 || !gamma.in_r_plus_i(n) {
        return Err(Error::InvalidInput(format!(
            "gamma = {gamma} must lie in R^+_{n}, n >= 2"
        )));
    }
    let lam = WeightExpr::lambda(n);
    let lhs = tower_sum(&TowerSpec::split(n, r), &lam, gamma)?;
    let lower = lam.sub_root(gamma).restrict(n - 1);
    let rhs = decomposition_coefficient(n, &lam, gamma, r)?.mul(&a_squared(n, &lam, &lower)?);
    let exact = Check::from_witness(
        termsum_witness(&lhs, &TermSum::from_expr(rhs), trials, seed)?.as_ref(),
        "tower against d A^2",
    );
    let mut bounds = vec![Bound::At(r - cutoff); n];
    bounds[n - 1] = Bound::At(r);
    let cut = TowerSpec::new(bounds)?;
    let window = tower_window(&cut, gamma, &tower_sum(&cut, &lam, gamma)?, trunc)?;
    Ok(exact.and(window).bound("cutoff", r - cutoff))
}

/// Decompositions `beta = gamma^(1) + ... + gamma^(n)` with `gamma^(i)` in `R^+_i`.
pub fn r_plus_decompositions(beta: &RootVec) -> Vec<Vec<RootVec>> {
    fn go(i: usize, rest: &RootVec, cur: &mut Vec<RootVec>, out: &mut Vec<Vec<RootVec>>) {
        if i == 0 {
            if rest.is_zero() {
                out.push(cur.iter().rev().cloned().collect());
            }
            return;
        }
        for g in rest.lower_box() {
            if g.in_r_plus_i(i) {
                cur.push(g.clone());
                go(i - 1, &rest.sub(&g), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(beta.rank(), beta, &mut Vec::new(), &mut out);
    out
}

/// `lambda^{(n)} = lambda` and `lambda^{(i)} = (lambda^{(i+1)} - gamma^{(i+1)})|_{P_i}`,
/// indexed by `i` (entry 0 unused).
pub fn lambda_chain(n: usize, gammas: &[RootVec]) -> Vec<WeightExpr> {
    let mut out = vec![WeightExpr::lambda(n); n + 1];
    for i in (1..n).rev() {
        out[i] = out[i + 1].sub_root(&gammas[i]).restrict(i);
    }
    out
}

/// The tower sum with boundaries `r_1 <= ... <= r_n <= 0` equals the sum
/// over `R^+` decompositions of products of one-boundary and split towers.
pub fn quasi_classical_check(
    n: usize,
    rs: &[i64],
    beta: &RootVec,
    trunc: TruncSpec,
    trials: usize,
    seed: u64,
) -> Result<Check> {
    if rs.len() != n || rs.last().is_some_and(|&r| r > 0) {
        return Err(Error::InvalidInput(format!(
            "need {n} boundaries with r_n <= 0, got {rs:?}"
        )));
    }
    let spec = TowerSpec::new(rs.iter().map(|&r| Bound::At(r)).collect())?;
    let lhs = tower_sum(&spec, &WeightExpr::lambda(n), beta)?;
    let decomps = r_plus_decompositions(beta);
    let mut rhs = TermSum::zero(n);
    for gs in &decomps {
        let lams = lambda_chain(n, gs);
        let mut prod = tower_sum(&TowerSpec::new(vec![Bound::At(rs[0])])?, &lams[1], &gs[0])?;
        for i in 2..=n {
            prod = prod.mul(&tower_sum(
                &TowerSpec::split(i, rs[i - 1]),
                &lams[i],
                &gs[i - 1],
            )?);
        }
        rhs = rhs.add(&prod);
    }
    let exact = Check::from_witness(
        termsum_witness(&lhs, &rhs, trials, seed)?.as_ref(),
        "tower against its decomposition",
    );
    let window = tower_window(&spec, beta, &lhs, trunc)?;
    Ok(exact.and(window).bound("decompositions", decomps.len()))
}
