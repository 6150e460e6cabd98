//! Type-A root data: root-lattice vectors, symbolic weights `lambda + offset`,
//! and the conversion of pairings with `lambda` into z-monomials through
//! `z_i = q^{-(lambda + rho, alpha_i)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `d = (d_1, ..., d_n)`, the root-lattice element `sum d_i alpha_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RootVec(pub Vec<i64>);

impl RootVec {
    pub fn zero(n: usize) -> Self {
        RootVec(vec![0; n])
    }

    /// `alpha_i`, 1-based.
    pub fn simple(n: usize, i: usize) -> Self {
        let mut d = vec![0; n];
        d[i - 1] = 1;
        RootVec(d)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Height `sum d_i`, which equals `(rho, d)`.
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn in_q_plus(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// `Q^+_i`: non-negative with `d_j = 0` for `j > i`.
    pub fn in_q_plus_i(&self, i: usize) -> bool {
        self.in_q_plus() && self.0.iter().skip(i).all(|&x| x == 0)
    }

    /// `R^+_i`: non-negative combinations of `alpha_k + ... + alpha_i`,
    /// i.e. `0 <= d_1 <= ... <= d_i` and `d_j = 0` for `j > i`.
    pub fn in_r_plus_i(&self, i: usize) -> bool {
        self.in_q_plus_i(i)
            && self.0[..i.min(self.0.len())]
                .windows(2)
                .all(|w| w[0] <= w[1])
    }

    /// Coordinates in the `epsilon_0..epsilon_n` basis.
    pub fn eps_coords(&self) -> Vec<i64> {
        let n = self.rank();
        (0..=n)
            .map(|k| {
                let next = if k < n { self.0[k] } else { 0 };
                let prev = if k > 0 { self.0[k - 1] } else { 0 };
                next - prev
            })
            .collect()
    }

    /// The type-A form `(alpha_i, alpha_j) = 2 delta_ij - delta_{|i-j|,1}`.
    pub fn form(&self, other: &RootVec) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            s += 2 * self.0[i] * other.0[i];
            if i + 1 < n {
                s -= self.0[i] * other.0[i + 1] + self.0[i + 1] * other.0[i];
            }
        }
        s
    }

    /// `(self, alpha_i)`, 1-based.
    pub fn pair_simple(&self, i: usize) -> i64 {
        let n = self.rank();
        let mut s = 2 * self.0[i - 1];
        if i >= 2 {
            s -= self.0[i - 2];
        }
        if i < n {
            s -= self.0[i];
        }
        s
    }

    pub fn add(&self, o: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> RootVec {
        RootVec(self.0.iter().map(|a| a * k).collect())
    }

    /// All `e` with `0 <= e <= self` componentwise.
    pub fn lower_box(&self) -> Vec<RootVec> {
        let mut out = vec![Vec::new()];
        for &x in &self.0 {
            let mut next = Vec::new();
            for p in &out {
                for v in 0..=x.max(0) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out.into_iter().map(RootVec).collect()
    }

    /// All non-negative `d` of rank `n` with `sum d <= h`, ordered by height
    /// then lexicographically.
    pub fn all_up_to_height(n: usize, h: i64) -> Vec<RootVec> {
        let mut out: Vec<RootVec> = RootVec(vec![h; n])
            .lower_box()
            .into_iter()
            .filter(|d| d.height() <= h)
            .collect();
        out.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.cmp(b)));
        out
    }
}

impl std::fmt::Display for RootVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// An integer-affine form `sum_k lam_k * lambda_k + c` in the symbolic
/// highest weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinForm {
    pub lam: Vec<i64>,
    pub c: i64,
}

impl LinForm {
    pub fn constant(n: usize, c: i64) -> Self {
        LinForm {
            lam: vec![0; n + 1],
            c,
        }
    }

    /// `lambda_k - m`.
    pub fn coord(n: usize, k: usize, m: i64) -> Self {
        let mut lam = vec![0; n + 1];
        lam[k] = 1;
        LinForm { lam, c: -m }
    }

    pub fn is_constant(&self) -> bool {
        self.lam.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &LinForm) -> LinForm {
        LinForm {
            lam: self.lam.iter().zip(&o.lam).map(|(a, b)| a + b).collect(),
            c: self.c + o.c,
        }
    }

    pub fn sub(&self, o: &LinForm) -> LinForm {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i64) -> LinForm {
        LinForm {
            lam: self.lam.iter().map(|a| a * k).collect(),
            c: self.c * k,
        }
    }

    pub fn plus(&self, c: i64) -> LinForm {
        LinForm {
            lam: self.lam.clone(),
            c: self.c + c,
        }
    }

    /// Writes the `lambda` part as `sum_i e_i (lambda_{i-1} - lambda_i)`,
    /// returning `e_1..e_n`. Requires the coefficients to sum to zero.
    pub fn root_coeffs(&self) -> Result<Vec<i64>> {
        if self.lam.iter().sum::<i64>() != 0 {
            return Err(Error::Integrality(format!(
                "weight form {:?} does not pair through the root lattice",
                self.lam
            )));
        }
        let n = self.lam.len() - 1;
        let mut e = Vec::with_capacity(n);
        let mut acc = 0;
        for k in 0..n {
            acc += self.lam[k];
            e.push(acc);
        }
        Ok(e)
    }

    /// `q^{self}` as `(v-exponent, doubled z-exponents)`, using
    /// `q^{lambda_{i-1} - lambda_i} = q^{-1} z_i^{-1}`.
    pub fn q_power(&self) -> Result<(i64, Vec<i64>)> {
        let e = self.root_coeffs()?;
        let s: i64 = e.iter().sum();
        Ok((2 * (self.c - s), e.iter().map(|x| -2 * x).collect()))
    }

    /// `v^{self}` as `(v-exponent, doubled z-exponents)`; z-exponents may be
    /// half-integral.
    pub fn v_power(&self) -> Result<(i64, Vec<i64>)> {
        let e = self.root_coeffs()?;
        let s: i64 = e.iter().sum();
        Ok((self.c - s, e.iter().map(|x| -x).collect()))
    }
}

/// The weight `sum_k (sign * lambda_k - offsets_k) epsilon_k` over the
/// ambient rank `n`, restricted to the first `offsets.len()` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightExpr {
    pub sign: i64,
    pub offsets: Vec<i64>,
}

impl WeightExpr {
    /// The generic highest weight `lambda` of `gl_{n+1}`.
    pub fn lambda(n: usize) -> Self {
        WeightExpr {
            sign: 1,
            offsets: vec![0; n + 1],
        }
    }

    /// Rank of the `gl_{r+1}` this weight lives in.
    pub fn rank(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Coordinate `k` as a form in the ambient `lambda` (of rank `ambient`).
    pub fn coord(&self, ambient: usize, k: usize) -> LinForm {
        let mut lam = vec![0; ambient + 1];
        lam[k] = self.sign;
        LinForm {
            lam,
            c: -self.offsets[k],
        }
    }

    /// `self - beta` with `beta` of the same rank.
    pub fn sub_root(&self, beta: &RootVec) -> Self {
        let e = beta.eps_coords();
        WeightExpr {
            sign: self.sign,
            offsets: self.offsets.iter().zip(&e).map(|(c, x)| c + x).collect(),
        }
    }

    /// Projection onto `P_i` (keep coordinates `0..=i`).
    pub fn restrict(&self, i: usize) -> Self {
        WeightExpr {
            sign: self.sign,
            offsets: self.offsets[..=i].to_vec(),
        }
    }

    /// `(self, beta)` as a form in the ambient `lambda`.
    pub fn pair(&self, ambient: usize, beta: &RootVec) -> LinForm {
        let e = beta.eps_coords();
        let mut out = LinForm::constant(ambient, 0);
        for (k, x) in e.iter().enumerate() {
            out = out.add(&self.coord(ambient, k).scale(*x));
        }
        out
    }

    /// The variable substitution `z_i -> q^{shift_i} z_i^{sign}` realizing
    /// `q^{-(self + rho, alpha_i)}` for `i = 1..rank`, padded with the
    /// identity up to `ambient`.
    pub fn substitution(&self, ambient: usize) -> Subst {
        let r = self.rank();
        let mut shifts = vec![0; ambient];
        for i in 1..=r {
            // q^{-(s lambda - c + rho, alpha_i)} = z_i^s q^{s - 1 + c_{i-1} - c_i}
            shifts[i - 1] = self.sign - 1 + self.offsets[i - 1] - self.offsets[i];
        }
        Subst {
            sign: self.sign,
            shifts,
        }
    }
}

/// `z_i -> q^{shifts_i} z_i^{sign}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subst {
    pub sign: i64,
    pub shifts: Vec<i64>,
}

impl Subst {
    pub fn identity(n: usize) -> Self {
        Subst {
            sign: 1,
            shifts: vec![0; n],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sign == 1 && self.shifts.iter().all(|&s| s == 0)
    }

    /// Applies `self` after `inner`: `z -> self(inner(z))`.
    pub fn compose(&self, inner: &Subst) -> Subst {
        // inner: z_i -> q^{b_i} z_i^{t}; then z_i -> q^{a_i} z_i^{s}
        // gives q^{b_i + t a_i} z_i^{t s}
        Subst {
            sign: self.sign * inner.sign,
            shifts: inner
                .shifts
                .iter()
                .zip(&self.shifts)
                .map(|(b, a)| b + inner.sign * a)
                .collect(),
        }
    }
}
