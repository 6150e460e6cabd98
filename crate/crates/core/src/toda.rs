//! The quantum difference Toda Hamiltonian acting on generating series
//! `F = sum_d J_d y^d`, and the recursion for `J_d` it implies.
//!
//! On `y^e` the shift `D_i^{-1} D_{i+1}` acts by `q^{-e_i + e_{i+1}}` (with
//! `e_0 = e_{n+1} = 0`), so the `y^e` coefficient of `H F` is
//!
//! ```text
//! sum_{i=0}^{n} z_{i,n} q^{-e_i + e_{i+1}} (J_e - [i >= 1] J_{e - delta_i}).
//! ```

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gz;
use crate::multivar::{termsum_witness, FactoredExpr, SparsePoly, TermSum, Witness, ZMonomial};
use crate::scalar::VScalar;
use crate::weights::RootVec;

/// A truncated generating series `sum_{|d| <= cutoff} J_d y^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSeries {
    pub rank: usize,
    pub cutoff: i64,
    pub coeffs: BTreeMap<RootVec, TermSum>,
    /// Degrees whose coefficient only sees part of the operator.
    pub boundary: BTreeSet<RootVec>,
}

impl GenSeries {
    /// Collects `source(d)` for all `|d| <= cutoff`.
    pub fn from_source(
        n: usize,
        cutoff: i64,
        source: &(dyn Fn(&RootVec) -> Result<TermSum> + Sync),
    ) -> Result<GenSeries> {
        let ds = RootVec::all_up_to_height(n, cutoff);
        let vals: Vec<TermSum> = ds.par_iter().map(source).collect::<Result<_>>()?;
        Ok(GenSeries {
            rank: n,
            cutoff,
            coeffs: ds.into_iter().zip(vals).collect(),
            boundary: BTreeSet::new(),
        })
    }

    pub fn get(&self, d: &RootVec) -> TermSum {
        self.coeffs
            .get(d)
            .cloned()
            .unwrap_or_else(|| TermSum::zero(self.rank))
    }
}

/// `z_{i,n} q^{e}` as a factored monomial.
fn zq(n: usize, i: usize, q_exp: i64) -> FactoredExpr {
    FactoredExpr::monomial(VScalar::v_pow(2 * q_exp), &ZMonomial::range(n, i, n))
}

fn exps(e: &RootVec) -> impl Fn(usize) -> i64 + '_ {
    move |i| {
        if i == 0 || i > e.rank() {
            0
        } else {
            e.0[i - 1]
        }
    }
}

fn minus_delta(e: &RootVec, i: usize) -> RootVec {
    let mut d = e.clone();
    d.0[i - 1] -= 1;
    d
}

/// `H F`, exact for `|e| <= cutoff`; degree `cutoff + 1` is returned too and
/// marked as boundary.
pub fn apply_hamiltonian(f: &GenSeries) -> GenSeries {
    let n = f.rank;
    let ds = RootVec::all_up_to_height(n, f.cutoff + 1);
    let vals: Vec<TermSum> = ds.par_iter().map(|e| hamiltonian_coeff(f, e)).collect();
    GenSeries {
        rank: n,
        cutoff: f.cutoff + 1,
        boundary: ds
            .iter()
            .filter(|d| d.height() > f.cutoff)
            .cloned()
            .collect(),
        coeffs: ds.into_iter().zip(vals).collect(),
    }
}

fn hamiltonian_coeff(f: &GenSeries, e: &RootVec) -> TermSum {
    let n = f.rank;
    let ex = exps(e);
    let je = f.get(e);
    let mut out = TermSum::zero(n);
    for i in 0..=n {
        let m = zq(n, i, -ex(i) + ex(i + 1));
        let mut inner = je.clone();
        if i >= 1 && ex(i) >= 1 {
            inner = inner.sub(&f.get(&minus_delta(e, i)));
        }
        out = out.add(&inner.scale(&m));
    }
    out
}

/// The eigenvalue `sum_{i=0}^n z_{i,n}`.
pub fn eigenvalue(n: usize) -> TermSum {
    TermSum::from_terms(n, (0..=n).map(|i| zq(n, i, 0)).collect())
}

/// Per-degree outcome of an eigen-equation check.
#[derive(Clone, Debug)]
pub struct EigenEntry {
    pub d: RootVec,
    pub pass: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct EigenReport {
    pub rank: usize,
    pub cutoff: i64,
    pub entries: Vec<EigenEntry>,
}

impl EigenReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Checks `(H - sum z_{i,n}) F = 0` at every `|d| <= cutoff`.
pub fn verify_eigen(
    n: usize,
    cutoff: i64,
    source: &(dyn Fn(&RootVec) -> Result<TermSum> + Sync),
    trials: usize,
    seed: u64,
) -> Result<EigenReport> {
    let f = GenSeries::from_source(n, cutoff, source)?;
    let hf = apply_hamiltonian(&f);
    let ev = eigenvalue(n);
    let ds: Vec<&RootVec> = hf
        .coeffs
        .keys()
        .filter(|d| !hf.boundary.contains(*d))
        .collect();
    let entries: Vec<EigenEntry> = ds
        .par_iter()
        .map(|d| {
            let lhs = &hf.coeffs[*d];
            let rhs = f.get(d).mul(&ev);
            let w = termsum_witness(lhs, &rhs, trials, seed)?;
            Ok(EigenEntry {
                d: (*d).clone(),
                pass: w.is_none(),
                witness: w,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EigenReport {
        rank: n,
        cutoff,
        entries,
    })
}

/// `1 / sum_i z_{i,n} (q^{-e_i + e_{i+1}} - 1)`: a single factored term when
/// the sum has two monomials, otherwise a polynomial denominator.
fn leading_inverse(n: usize, e: &RootVec) -> Result<FactoredExpr> {
    let ex = exps(e);
    let mut poly = SparsePoly::default();
    for i in 0..=n {
        let z = ZMonomial::range(n, i, n).0;
        poly.add_term(1, 2 * (-ex(i) + ex(i + 1)), &z);
        poly.add_term(-1, 0, &z);
    }
    let terms: Vec<(&(i64, Vec<i64>), &i64)> = poly.terms.iter().collect();
    match terms.as_slice() {
        [] => Err(Error::NonGeneric(format!(
            "leading coefficient vanishes at d = {e}"
        ))),
        [((v1, z1), c1), ((v2, z2), c2)] if **c1 == -**c2 => {
            // c1 v^v1 z^z1 (1 - v^{v2 - v1} z^{z2 - z1})
            let mut f = FactoredExpr::monomial(
                VScalar::monomial((**c1).into(), *v1),
                &ZMonomial(z1.clone()),
            );
            let mu = ZMonomial(z2.iter().zip(z1).map(|(a, b)| a - b).collect());
            f.mul_unit((v2 - v1) / 2, &mu, 1)?;
            f.inv()
        }
        _ => {
            let mut f = FactoredExpr::one(n);
            f.div_poly(poly)?;
            Ok(f)
        }
    }
}

/// `J_e` for every `e <= d` componentwise, solved degree by degree from the
/// eigen-equation.
pub fn toda_table(n: usize, d: &RootVec) -> Result<BTreeMap<RootVec, TermSum>> {
    let mut table: BTreeMap<RootVec, TermSum> = BTreeMap::new();
    table.insert(RootVec::zero(n), TermSum::one(n));
    let mut boxes = d.lower_box();
    boxes.sort_by_key(RootVec::height);
    for h in 1..=d.height() {
        let layer: Vec<&RootVec> = boxes.iter().filter(|e| e.height() == h).collect();
        let solved: Vec<TermSum> = layer
            .par_iter()
            .map(|e| {
                let ex = exps(e);
                let mut rhs = TermSum::zero(n);
                for i in 1..=n {
                    if ex(i) >= 1 {
                        let prev = &table[&minus_delta(e, i)];
                        rhs = rhs.add(&prev.scale(&zq(n, i, -ex(i) + ex(i + 1))));
                    }
                }
                Ok(rhs.scale(&leading_inverse(n, e)?))
            })
            .collect::<Result<_>>()?;
        for (e, j) in layer.into_iter().zip(solved) {
            table.insert(e.clone(), j);
        }
    }
    Ok(table)
}

/// `J_d` from the Toda recursion alone.
pub fn toda_solve(n: usize, d: &RootVec) -> Result<TermSum> {
    if !d.in_q_plus() {
        return Ok(TermSum::zero(n));
    }
    let mut t = toda_table(n, d)?;
    Ok(t.remove(d).expect("target degree is in its own box"))
}

/// Where `J_d` comes from in an eigen check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JSource {
    Gz,
    Explicit,
    Solve,
}

impl std::str::FromStr for JSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gz" => Ok(JSource::Gz),
            "explicit" => Ok(JSource::Explicit),
            "solve" => Ok(JSource::Solve),
            _ => Err(Error::Parse(format!(
                "unknown source '{s}' (gz|explicit|solve)"
            ))),
        }
    }
}

/// `J_d` from the chosen route.
pub fn j_from(source: JSource, n: usize, d: &RootVec) -> Result<TermSum> {
    match source {
        JSource::Gz => gz::scalar_product_j(n, d),
        JSource::Explicit => Ok(gz::jd_explicit(n, d)),
        JSource::Solve => toda_solve(n, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multivar::{termsum_equal, PochFactor};

    #[test]
    fn rank_one_first_step() {
        let want = FactoredExpr::from_factors(
            VScalar::one(),
            &ZMonomial::one(1),
            &[],
            &[
                PochFactor::q(1, 1),
                PochFactor::new(1, ZMonomial::var(1, 1), 1),
            ],
        )
        .unwrap();
        let got = toda_solve(1, &RootVec(vec![1])).unwrap();
        assert!(termsum_equal(&got, &TermSum::from_expr(want), 8, 1).unwrap());
        assert!(termsum_equal(
            &toda_solve(2, &RootVec::zero(2)).unwrap(),
            &TermSum::one(2),
            3,
            1
        )
        .unwrap());
    }

    #[test]
    fn hamiltonian_on_constant() {
        // F = 1, n = 1: y^0 gives z_1 + 1, y^1 gives -q^{-1}
        let f = GenSeries {
            rank: 1,
            cutoff: 0,
            coeffs: [(RootVec(vec![0]), TermSum::one(1))].into_iter().collect(),
            boundary: BTreeSet::new(),
        };
        let hf = apply_hamiltonian(&f);
        assert!(termsum_equal(&hf.coeffs[&RootVec(vec![0])], &eigenvalue(1), 5, 1).unwrap());
        let y1 = TermSum::from_expr(FactoredExpr::monomial(
            VScalar::v_pow(-2).neg(),
            &ZMonomial::one(1),
        ));
        assert!(termsum_equal(&hf.coeffs[&RootVec(vec![1])], &y1, 5, 1).unwrap());
        assert!(hf.boundary.contains(&RootVec(vec![1])));
    }

    #[test]
    fn solve_matches_explicit_rank_two() {
        let d = RootVec(vec![2, 1]);
        let a = toda_solve(2, &d).unwrap();
        let b = gz::jd_explicit(2, &d);
        assert!(termsum_equal(&a, &b, 8, 4).unwrap());
    }

    #[test]
    fn eigen_check_catches_perturbation() {
        let src = |d: &RootVec| -> Result<TermSum> {
            let j = gz::jd_explicit(1, d);
            if d.0 == [1] {
                Ok(j.scale(&FactoredExpr::monomial(
                    VScalar::v_pow(2),
                    &ZMonomial::one(1),
                )))
            } else {
                Ok(j)
            }
        };
        let r = verify_eigen(1, 3, &src, 6, 9).unwrap();
        assert!(!r.pass());
        let bad: Vec<_> = r
            .entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.d.clone())
            .collect();
        assert!(bad.contains(&RootVec(vec![1])));
        let good = |d: &RootVec| Ok(gz::jd_explicit(1, d));
        assert!(verify_eigen(1, 3, &good, 6, 9).unwrap().pass());
    }
}
