use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use principal_char::multivar::*;
use principal_char::scalar::{Rational, VScalar};
use principal_char::Error;
use proptest::prelude::*;

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

fn z1() -> ZMonomial {
    ZMonomial::var(1, 1)
}

/// Independent rank-1 oracle: coefficients `[z-degree][v-power]` of a
/// product of `(1 - q^a z^k)^{+-1}` factors, by explicit geometric sums.
struct Dense {
    d: usize,
    hi: i64,
    c: Vec<BTreeMap<i64, i128>>,
}

impl Dense {
    fn one(d: usize, hi: i64) -> Dense {
        let mut c = vec![BTreeMap::new(); d + 1];
        c[0].insert(0, 1);
        Dense { d, hi, c }
    }

    fn mul_poly(&mut self, terms: &[(usize, i64, i128)]) {
        let mut out = vec![BTreeMap::new(); self.d + 1];
        for (k1, m) in self.c.iter().enumerate() {
            for (e1, c1) in m {
                for (k2, e2, c2) in terms {
                    let k = k1 + k2;
                    if k > self.d || e1 + e2 > self.hi + 200 {
                        continue;
                    }
                    *out[k].entry(e1 + e2).or_insert(0) += c1 * c2;
                }
            }
        }
        for m in &mut out {
            m.retain(|_, c| *c != 0);
        }
        self.c = out;
    }

    /// Multiplies by `(1 - q^a z^k)^{mult}`.
    fn factor(&mut self, a: i64, k: usize, mult: i64) {
        for _ in 0..mult.abs() {
            if mult > 0 {
                self.mul_poly(&[(0, 0, 1), (k, 2 * a, -1)]);
            } else {
                let terms: Vec<(usize, i64, i128)> = (0..=self.d / k)
                    .map(|j| (j * k, 2 * a * j as i64, 1))
                    .collect();
                self.mul_poly(&terms);
            }
        }
    }

    fn get(&self, k: usize, e: i64) -> i128 {
        self.c[k].get(&e).copied().unwrap_or(0)
    }
}

fn spec(d: u32, lo: i64, hi: i64) -> TruncSpec {
    TruncSpec::new(d, lo, hi).unwrap()
}

fn series_of(e: &FactoredExpr, s: TruncSpec) -> TruncSeries {
    expand(e, s).unwrap()
}

#[test]
fn finite_poch_multiplies_out() {
    let t0 = poch_finite_expand(&PochFactor::new(0, z1(), 0)).unwrap();
    assert!(termsum_equal(&t0, &TermSum::one(1), 6, 1).unwrap());
    let t1 = poch_finite_expand(&PochFactor::new(1, z1(), 1)).unwrap();
    let want = TermSum::from_terms(
        1,
        vec![
            FactoredExpr::one(1),
            FactoredExpr::monomial(VScalar::v_pow(2).neg(), &z1()),
        ],
    );
    assert_eq!(t1, want);
    // (z)_2 = 1 - (1+q) z + q z^2
    let t2 = poch_finite_expand(&PochFactor::new(0, z1(), 2)).unwrap();
    let want = TermSum::from_terms(
        1,
        vec![
            FactoredExpr::one(1),
            FactoredExpr::monomial(VScalar::laurent(0, &[-1, 0, -1]), &z1()),
            FactoredExpr::monomial(VScalar::v_pow(2), &z1().pow(2)),
        ],
    );
    assert!(termsum_equal(&t2, &want, 10, 2).unwrap());
}

#[test]
fn infinite_product_matches_oracle() {
    let s = spec(2, 0, 8);
    let e = FactoredExpr::from_factors(
        VScalar::one(),
        &ZMonomial::one(1),
        &[],
        &[PochFactor::infinite(1, z1())],
    )
    .unwrap();
    let got = series_of(&e, s);
    let mut oracle = Dense::one(2, 8);
    for j in 1..=8 {
        oracle.factor(j, 1, -1);
    }
    for k in 0..=2 {
        for v in 0..=8 {
            assert_eq!(
                got.coeff(&ZMonomial(vec![k as i64]), v),
                oracle.get(k, v),
                "z^{k} v^{v}"
            );
        }
    }
    // z^1: q + q^2 + q^3 + q^4; z^2: q^2 + q^3 + 2q^4
    assert_eq!(got.coeff(&z1(), 2), 1);
    assert_eq!(got.coeff(&z1().pow(2), 8), 2);
    assert!(series_of(&FactoredExpr::one(1), s)
        .compare(&TruncSeries::one(1, s))
        .unwrap()
        .is_equal());
}

#[test]
fn negative_monomial_is_reflected() {
    let s = spec(3, -10, 10);
    let mut e = FactoredExpr::one(1);
    e.mul_unit(1, &ZMonomial(vec![-1]), -1).unwrap();
    let got = series_of(&e, s);
    let mut want = TruncSeries::zero(1, s);
    for k in 1..=3 {
        want = want
            .add(&TruncSeries::monomial(1, s, &z1().pow(k), -1, -2 * k))
            .unwrap();
    }
    assert!(got.compare(&want).unwrap().is_equal());
    assert_eq!(got.coeff(&ZMonomial::one(1), 0), 0);
}

#[test]
fn geometric_series() {
    let s = spec(5, -4, 30);
    let e = FactoredExpr::from_factors(
        VScalar::one(),
        &ZMonomial::one(1),
        &[],
        &[PochFactor::new(1, z1(), 1)],
    )
    .unwrap();
    let mut want = TruncSeries::zero(1, s);
    for j in 0..=5 {
        want = want
            .add(&TruncSeries::monomial(1, s, &z1().pow(j), 1, 2 * j))
            .unwrap();
    }
    assert!(series_of(&e, s).compare(&want).unwrap().is_equal());
}

#[test]
fn region_errors() {
    let s = spec(3, 0, 10);
    let mut e = FactoredExpr::one(2);
    e.mul_unit(0, &ZMonomial(vec![1, -1]), -1).unwrap();
    assert!(matches!(expand(&e, s), Err(Error::AmbiguousExpansion(_))));
    let bad = PochFactor::infinite(0, ZMonomial::one(1));
    let mut e = FactoredExpr::one(1);
    assert!(matches!(
        e.mul_poch(&bad, -1),
        Err(Error::NonExpandablePureQ(0))
    ));
}

#[test]
fn exact_evaluation() {
    let e = FactoredExpr::from_factors(
        VScalar::one(),
        &ZMonomial::one(1),
        &[PochFactor::new(1, z1(), 2)],
        &[],
    )
    .unwrap();
    let t = TermSum::from_expr(e);
    assert_eq!(
        eval_exact(&t, &rat(2, 1), &[rat(1, 3)]).unwrap(),
        rat(13, 9)
    );
    assert_eq!(
        eval_exact(&TermSum::zero(2), &rat(3, 1), &[rat(1, 2), rat(1, 5)]).unwrap(),
        Rational::zero()
    );
    let inf = FactoredExpr::from_factors(
        VScalar::one(),
        &ZMonomial::one(1),
        &[PochFactor::infinite(1, ZMonomial::one(1))],
        &[],
    )
    .unwrap();
    assert!(matches!(
        eval_exact(&TermSum::from_expr(inf), &rat(1, 2), &[rat(1, 3)]),
        Err(Error::InfiniteFactor)
    ));
    let pole = FactoredExpr::from_factors(
        VScalar::one(),
        &ZMonomial::one(1),
        &[],
        &[PochFactor::new(0, z1(), 1)],
    )
    .unwrap();
    assert!(matches!(
        eval_exact(&TermSum::from_expr(pole), &rat(2, 1), &[rat(1, 1)]),
        Err(Error::Pole(_))
    ));
}

#[test]
fn partial_fractions_agree() {
    // q/(1-q) - qz/(1-qz) = q(1-z)/((1-q)(1-qz))
    let q = PochFactor::new(1, ZMonomial::one(1), 1);
    let qz = PochFactor::new(1, z1(), 1);
    let a = FactoredExpr::from_factors(VScalar::v_pow(2), &ZMonomial::one(1), &[], &[q.clone()])
        .unwrap();
    let b = FactoredExpr::from_factors(VScalar::v_pow(2).neg(), &z1(), &[], &[qz.clone()]).unwrap();
    let lhs = TermSum::from_terms(1, vec![a, b]);
    let rhs = FactoredExpr::from_factors(
        VScalar::v_pow(2),
        &ZMonomial::one(1),
        &[PochFactor::new(0, z1(), 1)],
        &[q, qz],
    )
    .unwrap();
    assert!(termsum_equal(&lhs, &TermSum::from_expr(rhs.clone()), 12, 7).unwrap());
    let wrong =
        TermSum::from_expr(rhs.mul(&FactoredExpr::monomial(VScalar::int(2), &ZMonomial::one(1))));
    assert!(!termsum_equal(&lhs, &wrong, 12, 7).unwrap());
    // zero summands are dropped
    let padded = lhs.add(&TermSum::from_expr(FactoredExpr::zero(1)));
    assert!(termsum_equal(&lhs, &padded, 5, 1).unwrap());
}

#[test]
fn poch_step() {
    let n = 2;
    let mu = ZMonomial(vec![1, 1]);
    for m in 0..=6u64 {
        let lhs = FactoredExpr::from_factors(
            VScalar::one(),
            &ZMonomial::one(n),
            &[PochFactor::new(0, mu.clone(), m + 1)],
            &[],
        )
        .unwrap();
        let mut rhs = FactoredExpr::from_factors(
            VScalar::one(),
            &ZMonomial::one(n),
            &[PochFactor::new(0, mu.clone(), m)],
            &[],
        )
        .unwrap();
        rhs.mul_unit(m as i64, &mu, 1).unwrap();
        assert_eq!(lhs, rhs);
        let a = poch_finite_expand(&PochFactor::new(0, mu.clone(), m + 1)).unwrap();
        let b = poch_finite_expand(&PochFactor::new(0, mu.clone(), m)).unwrap();
        let step = TermSum::from_terms(
            n,
            vec![
                FactoredExpr::one(n),
                FactoredExpr::monomial(VScalar::v_pow(2 * m as i64).neg(), &mu),
            ],
        );
        assert!(termsum_equal(&a, &b.mul(&step), 6, m).unwrap());
    }
}

#[test]
fn json_round_trips() {
    let s = spec(3, -6, 12);
    let mut e = FactoredExpr::from_factors(
        VScalar::from_str("(3*v^-1+1*v^2)/(1*v^0)").unwrap(),
        &ZMonomial(vec![1, 0]),
        &[PochFactor::new(-1, ZMonomial(vec![0, 1]), 2)],
        &[
            PochFactor::q(2, 2),
            PochFactor::infinite(1, ZMonomial(vec![1, 1])),
        ],
    )
    .unwrap();
    e.mul_unit(2, &ZMonomial(vec![1, 0]), -1).unwrap();
    let ser = expand(&e, s).unwrap();
    let j = series_to_json(&ser);
    let text = serde_json::to_string(&j).unwrap();
    let back = series_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&series_to_json(&back)).unwrap(), text);
    assert!(back.compare(&ser).unwrap().is_equal());

    let t = TermSum::from_terms(
        2,
        vec![e.clone(), FactoredExpr::half_monomial(-1, 3, vec![1, -1])],
    );
    let j = termsum_to_json(&t);
    let back = termsum_from_json(&j).unwrap();
    assert_eq!(back, t);
    assert_eq!(termsum_to_json(&back), j);
}

#[test]
fn json_example_shape() {
    let t = TermSum::from_expr(
        FactoredExpr::from_factors(
            VScalar::one(),
            &ZMonomial::one(1),
            &[],
            &[PochFactor::q(1, 2), PochFactor::new(1, z1(), 2)],
        )
        .unwrap(),
    );
    let j = termsum_to_json(&t);
    assert_eq!(
        serde_json::to_string(&j).unwrap(),
        r#"{"rank":1,"terms":[{"coeff":"(1*v^0)/(1*v^0)","den":[[1,[0],2],[1,[1],2]],"num":[],"z":[0]}]}"#
    );
}

/// Random FactoredExpr of rank 2 with factors that admit expansion.
fn arb_expr() -> impl Strategy<Value = FactoredExpr> {
    let factor = (-2i64..3, 0i64..3, 0i64..3, -2i64..3, any::<bool>());
    (
        -3i64..4,
        0i64..2,
        0i64..2,
        prop::collection::vec(factor, 0..4),
    )
        .prop_map(|(vs, m1, m2, fs)| {
            let mut e = FactoredExpr::monomial(VScalar::v_pow(vs), &ZMonomial(vec![m1, m2]));
            for (a, x, y, mult, inf) in fs {
                let mu = ZMonomial(vec![x, y]);
                if mu.is_one() {
                    if a >= 1 {
                        e.mul_unit(a, &mu, mult).unwrap();
                    }
                    continue;
                }
                if inf && mult != 0 {
                    e.mul_poch(&PochFactor::infinite(a, mu), mult.signum())
                        .unwrap();
                } else {
                    e.mul_unit(a, &mu, mult).unwrap();
                }
            }
            e
        })
}

fn series_value(s: &TruncSeries, v: &Rational, z: &[Rational]) -> f64 {
    let mut acc = Rational::zero();
    for (mu, l) in s.iter() {
        let mut zm = Rational::from_integer(1.into());
        for (zi, k) in z.iter().zip(&mu.0) {
            zm *= principal_char::scalar::rational_pow(zi, *k);
        }
        for (e, c) in l.iter() {
            acc +=
                Rational::from_integer(c.into()) * principal_char::scalar::rational_pow(v, e) * &zm;
        }
    }
    acc.to_f64().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn expand_is_multiplicative(a in arb_expr(), b in arb_expr()) {
        let s = spec(3, -6, 14);
        let ea = expand_to(&a, s, 40).unwrap();
        let eb = expand_to(&b, s, 40).unwrap();
        let prod = ea.mul(&eb).unwrap();
        let direct = expand(&a.mul(&b), s).unwrap();
        prop_assert!(prod.compare(&direct).unwrap().is_equal());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn reflected_expansion_converges(a in -2i64..3, k in 1i64..3, extra in 0i64..3) {
        // 1/(1 - q^a z^{-k}) * (q^{extra} z; q)_2
        let mut e = FactoredExpr::from_factors(
            VScalar::one(), &ZMonomial::one(1), &[PochFactor::new(extra, z1(), 2)], &[]).unwrap();
        e.mul_unit(a, &ZMonomial(vec![-k]), -1).unwrap();
        let v = rat(1, 2);
        let z = rat(1, 1000);
        let exact = eval_exact(&TermSum::from_expr(e.clone()), &v, &[z.clone()]);
        prop_assume!(exact.is_ok());
        let exact = exact.unwrap().to_f64().unwrap();
        let s = spec(8, -200, 120);
        let ser = expand(&e, s).unwrap();
        let approx = series_value(&ser, &v, &[z]);
        prop_assert!((approx - exact).abs() < 1e-9, "{approx} vs {exact}");
    }
}
