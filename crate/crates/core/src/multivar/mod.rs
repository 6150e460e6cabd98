//! Factored expressions in `q` and `z_1..z_n` and their expansion into
//! truncated power series.
//!
//! A summand of every formula in this crate has the shape
//!
//! ```text
//! coeff(v) * z^mu * prod (1 - q^a z^nu)^{m} * prod (q^b z^kappa; q)_inf^{k}
//! ```
//!
//! Finite q-Pochhammer symbols are stored factor by factor, so cancellation
//! between numerator and denominator is automatic and two equal products
//! have identical representations. Sums are never brought to a common
//! denominator; equality goes through seeded evaluation
//! ([`termsum_equal`]) or through window-exact series ([`expand`]).

mod equal;
mod expand;
mod factored;
mod json;
mod series;

pub use equal::{eval_exact, sample_points, termsum_equal, termsum_witness, EvalPoint, Witness};
#[allow(unused_imports)]
pub(crate) use equal::{eval_expr, eval_sum};
pub use expand::{expand, expand_termsum, expand_termsum_to, expand_to, poch_finite_expand};
pub use factored::{FactoredExpr, Len, PochFactor, SparsePoly, TermSum, Unit};
pub use json::{series_from_json, series_to_json, termsum_from_json, termsum_to_json};
pub use series::{Comparison, Laurent, TruncSeries, TruncSpec};

use serde::{Deserialize, Serialize};

/// Integer exponent vector `(e_1..e_n)` for `z_1^{e_1}...z_n^{e_n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ZMonomial(pub Vec<i64>);

impl ZMonomial {
    pub fn one(n: usize) -> Self {
        ZMonomial(vec![0; n])
    }

    /// `z_i`, 1-based.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i - 1] = 1;
        ZMonomial(e)
    }

    /// `z_{k,l} = z_{k+1} ... z_l`.
    pub fn range(n: usize, k: usize, l: usize) -> Self {
        let mut e = vec![0; n];
        for x in e.iter_mut().take(l).skip(k) {
            *x = 1;
        }
        ZMonomial(e)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn mul(&self, o: &ZMonomial) -> ZMonomial {
        ZMonomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn pow(&self, k: i64) -> ZMonomial {
        ZMonomial(self.0.iter().map(|a| a * k).collect())
    }

    pub fn all_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn all_nonpos(&self) -> bool {
        self.0.iter().all(|&x| x <= 0)
    }
}

impl std::fmt::Display for ZMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}
