use proptest::prelude::*;

use principal_char::fermionic::{
    configs, fermionic_sum, fermionic_sum_series, shift_check, tower_series, tower_sum, Bound,
    Config, TowerSpec,
};
use principal_char::gz::jd_explicit;
use principal_char::multivar::{
    expand_termsum, termsum_equal, FactoredExpr, TermSum, TruncSpec, ZMonomial,
};
use principal_char::scalar::VScalar;
use principal_char::weights::{RootVec, Subst, WeightExpr};

fn arb_config() -> impl Strategy<Value = Config> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((-5i64..=5, 1usize..=n, 1u64..=3), 0..8).prop_map(move |parts| {
            let mut c = Config::empty(n);
            for (t, i, m) in parts {
                c.set(t, i, m);
            }
            c
        })
    })
}

/// `B` straight from its definition, summing over ordered pairs of times.
fn b_by_definition(c: &Config) -> (i64, Vec<i64>) {
    let mut times: Vec<i64> = c.l.iter().flat_map(|m| m.keys().copied()).collect();
    times.sort();
    times.dedup();
    let mut twice = 0;
    for &t in &times {
        for &u in &times {
            twice += t.min(u) * c.gamma(t).form(&c.gamma(u));
        }
    }
    assert_eq!(twice % 2, 0, "odd total for {c:?}");
    let moments = (1..=c.rank())
        .map(|i| times.iter().map(|&t| t * c.gamma(t).0[i - 1]).sum())
        .collect();
    (twice / 2, moments)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn b_form_is_integral(c in arb_config()) {
        let (q, z) = c.b_form(&WeightExpr::lambda(c.rank()));
        let (want_q, moments) = b_by_definition(&c);
        // at the generic weight, -(lambda + rho, sum t gamma_t) is carried entirely by z
        prop_assert_eq!(q, want_q);
        prop_assert_eq!(z.0, moments);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fermionic_series_matches_explicit(
        n in 1usize..=3,
        d in prop::collection::vec(0i64..=2, 3),
        hi in 10i64..=40,
    ) {
        let d = RootVec(d[..n].to_vec());
        let w = TruncSpec::new(d.height() as u32 + 1, -10, hi).unwrap();
        let f = fermionic_sum_series(n, &d, 0, w).unwrap();
        let e = expand_termsum(&jd_explicit(n, &d), w).unwrap();
        prop_assert!(f.compare(&e).unwrap().is_equal());
    }

    #[test]
    fn shifting_the_interval(
        n in 1usize..=2,
        d in prop::collection::vec(0i64..=2, 2),
        r in -2i64..=2,
        len in 0i64..=2,
    ) {
        let beta = RootVec(d[..n].to_vec());
        prop_assert!(shift_check(&WeightExpr::lambda(n), &beta, r, r + len, 6, 9).unwrap());
    }
}

/// Splitting `[r, s]` at `m`: the cross terms `min(t, t') = t` turn the left
/// factor's `z_i` into `q^{(alpha_i, d_right)} z_i`.
#[test]
fn interval_additivity() {
    for (n, d, r, m, s) in [
        (1, vec![3], 0, 1, 3),
        (2, vec![2, 1], -1, 0, 1),
        (2, vec![1, 2], 0, 0, 2),
    ] {
        let d = RootVec(d);
        let whole = fermionic_sum(n, &d, r, s);
        let mut split = TermSum::zero(n);
        for d1 in d.lower_box() {
            let d2 = d.sub(&d1);
            let sub = Subst {
                sign: 1,
                shifts: (1..=n).map(|i| d2.pair_simple(i)).collect(),
            };
            let left = fermionic_sum(n, &d1, r, m).subst(&sub).unwrap();
            split = split.add(&left.mul(&fermionic_sum(n, &d2, m + 1, s)));
        }
        assert!(
            termsum_equal(&whole, &split, 10, 4).unwrap(),
            "d = {d}, [{r},{m}]+[{},{s}]",
            m + 1
        );
    }
}

#[test]
fn interval_config_counts() {
    // one color, two particles on three sites: multisets of size two
    assert_eq!(configs(&RootVec(vec![2]), 0, 2).len(), 6);
    assert_eq!(configs(&RootVec(vec![0, 0]), -3, 3).len(), 1);
}

#[test]
fn single_particle() {
    let s = fermionic_sum(1, &RootVec(vec![1]), 0, 2);
    let mut want = TermSum::zero(1);
    for t in 0..=2 {
        let mut e = FactoredExpr::monomial(VScalar::v_pow(2 * t), &ZMonomial(vec![t]));
        e.mul_unit(1, &ZMonomial::one(1), -1).unwrap();
        want.push(e);
    }
    assert!(termsum_equal(&s, &want, 8, 2).unwrap());
}

#[test]
fn flat_tower_from_zero_is_j() {
    for d in RootVec::all_up_to_height(2, 3) {
        let t = tower_sum(&TowerSpec::flat(2, 0), &WeightExpr::lambda(2), &d).unwrap();
        assert!(
            termsum_equal(&t, &jd_explicit(2, &d), 8, 6).unwrap(),
            "d = {d}"
        );
    }
}

#[test]
fn negative_boundary_series_is_shifted() {
    let w = TruncSpec::new(4, -20, 40).unwrap();
    let spec = TowerSpec::new(vec![Bound::At(-1), Bound::At(0)]).unwrap();
    let s = tower_series(&spec, &RootVec(vec![1, 1]), w).unwrap();
    assert_eq!(s.shift.0, vec![-1, 0]);
    assert!("-inf".parse::<Bound>().unwrap() == Bound::NegInf);
    assert!(TowerSpec::new(vec![Bound::At(0), Bound::At(-1)]).is_err());
}
