use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use principal_char::gz::jd_explicit;
use principal_char::multivar::{termsum_equal, FactoredExpr, TermSum, ZMonomial};
use principal_char::scalar::VScalar;
use principal_char::toda::{apply_hamiltonian, eigenvalue, toda_solve, verify_eigen, GenSeries};
use principal_char::weights::RootVec;

fn series(n: usize, cutoff: i64, f: impl Fn(&RootVec) -> TermSum) -> GenSeries {
    let coeffs: BTreeMap<RootVec, TermSum> = RootVec::all_up_to_height(n, cutoff)
        .into_iter()
        .map(|d| {
            let t = f(&d);
            (d, t)
        })
        .collect();
    GenSeries {
        rank: n,
        cutoff,
        coeffs,
        boundary: BTreeSet::new(),
    }
}

fn monomial(c: i64, v: i64, z: &[i64]) -> FactoredExpr {
    FactoredExpr::monomial(
        VScalar::int(c).mul(&VScalar::v_pow(v)),
        &ZMonomial(z.to_vec()),
    )
}

#[test]
fn eigenvalue_is_sum_of_tail_products() {
    for n in 1..=4 {
        let mut want = TermSum::zero(n);
        for i in 0..=n {
            let z: Vec<i64> = (1..=n).map(|j| i64::from(j > i)).collect();
            want.push(monomial(1, 0, &z));
        }
        assert!(termsum_equal(&eigenvalue(n), &want, 6, 1).unwrap());
    }
}

#[test]
fn recursion_reproduces_explicit_up_to_five() {
    for n in 1..=3 {
        for d in RootVec::all_up_to_height(n, 5) {
            assert!(
                termsum_equal(&toda_solve(n, &d).unwrap(), &jd_explicit(n, &d), 8, 13).unwrap(),
                "n = {n}, d = {d}"
            );
        }
    }
}

#[test]
fn perturbed_source_is_rejected() {
    let bad = |d: &RootVec| {
        let j = jd_explicit(2, d);
        Ok(if *d == RootVec(vec![1, 1]) {
            j.add(&TermSum::one(2))
        } else {
            j
        })
    };
    let rep = verify_eigen(2, 3, &bad, 6, 2).unwrap();
    assert!(!rep.pass());
    assert!(rep.entries.iter().any(|e| !e.pass && e.witness.is_some()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hamiltonian_is_linear(
        n in 1usize..=2,
        a in (-3i64..=3, -2i64..=2),
        b in (-3i64..=3, -2i64..=2),
        g in prop::collection::vec((-2i64..=2, -3i64..=3), 1..4),
    ) {
        let cutoff = 2;
        let zeros = vec![0; n];
        let gen = |d: &RootVec| {
            let mut t = TermSum::zero(n);
            for (k, &(c, v)) in g.iter().enumerate() {
                let mut z = d.0.clone();
                z[k % n] += 1;
                t.push(monomial(c, v, &z));
            }
            t
        };
        let fa = monomial(a.0, a.1, &zeros);
        let fb = monomial(b.0, b.1, &zeros);
        let f = series(n, cutoff, |d| jd_explicit(n, d));
        let h = series(n, cutoff, &gen);
        let mix = series(n, cutoff, |d| jd_explicit(n, d).scale(&fa).add(&gen(d).scale(&fb)));
        let (hf, hh, hm) = (apply_hamiltonian(&f), apply_hamiltonian(&h), apply_hamiltonian(&mix));
        for (d, got) in &hm.coeffs {
            let want = hf.get(d).scale(&fa).add(&hh.get(d).scale(&fb));
            prop_assert!(termsum_equal(got, &want, 4, 3).unwrap(), "d = {}", d);
        }
    }
}
