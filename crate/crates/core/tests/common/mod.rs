//! A deliberately naive oracle: dense power series in `q` and `z_1..z_n`
//! with integer coefficients, truncated by total z-degree and q-degree.
//! It shares no code with the library's expansion engine.

#![allow(dead_code)]

use std::collections::BTreeMap;

use principal_char::multivar::{TruncSeries, ZMonomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    pub max_z: i64,
    pub max_q: i64,
    pub c: BTreeMap<(Vec<i64>, i64), i128>,
}

impl Dense {
    pub fn one(n: usize, max_z: i64, max_q: i64) -> Self {
        let mut c = BTreeMap::new();
        c.insert((vec![0; n], 0), 1);
        Dense { max_z, max_q, c }
    }

    pub fn zero(&self) -> Self {
        Dense {
            c: BTreeMap::new(),
            ..self.clone()
        }
    }

    fn keep(&self, z: &[i64], q: i64) -> bool {
        z.iter().sum::<i64>() <= self.max_z && q <= self.max_q
    }

    pub fn add(&mut self, o: &Dense) {
        for (k, v) in &o.c {
            *self.c.entry(k.clone()).or_default() += v;
        }
        self.c.retain(|_, v| *v != 0);
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let mut out = self.zero();
        for ((za, qa), a) in &self.c {
            for ((zb, qb), b) in &o.c {
                let z: Vec<i64> = za.iter().zip(zb).map(|(x, y)| x + y).collect();
                let q = qa + qb;
                if self.keep(&z, q) {
                    *out.c.entry((z, q)).or_default() += a * b;
                }
            }
        }
        out.c.retain(|_, v| *v != 0);
        out
    }

    /// Multiplies by `c q^a z^mu`.
    pub fn shift(&self, c: i128, a: i64, mu: &[i64]) -> Dense {
        let mut out = self.zero();
        for ((z, q), v) in &self.c {
            let z: Vec<i64> = z.iter().zip(mu).map(|(x, y)| x + y).collect();
            if self.keep(&z, q + a) {
                out.c.insert((z, q + a), c * v);
            }
        }
        out
    }

    /// Multiplies by `1 / (1 - q^a z^mu)` for `a >= 0`, `mu >= 0`, not both zero.
    pub fn div_unit(&self, a: i64, mu: &[i64]) -> Dense {
        assert!(a >= 0 && mu.iter().all(|&x| x >= 0) && (a > 0 || mu.iter().any(|&x| x > 0)));
        let mut out = self.clone();
        let mut term = self.clone();
        loop {
            term = term.shift(1, a, mu);
            if term.c.is_empty() {
                return out;
            }
            out.add(&term);
        }
    }

    /// Multiplies by `(1 - q^a z^mu)`.
    pub fn mul_unit(&self, a: i64, mu: &[i64]) -> Dense {
        let mut out = self.clone();
        out.add(&self.shift(-1, a, mu));
        out
    }

    /// Multiplies by `1 / (q^a z^mu; q)_len`.
    pub fn div_poch(&self, a: i64, mu: &[i64], len: i64) -> Dense {
        (0..len).fold(self.clone(), |s, j| s.div_unit(a + j, mu))
    }

    pub fn mul_poch(&self, a: i64, mu: &[i64], len: i64) -> Dense {
        (0..len).fold(self.clone(), |s, j| s.mul_unit(a + j, mu))
    }
}

/// Compares a library series (in `v = q^{1/2}`) with the oracle on every
/// coefficient both of them can see: z-degree `<= max_z`, `0 <= v <= 2 max_q`.
/// Returns the first mismatch.
pub fn mismatch(s: &TruncSeries, d: &Dense) -> Option<String> {
    for ((z, q), c) in &d.c {
        let got = s.coeff(&ZMonomial(z.clone()), 2 * q);
        if got != *c {
            return Some(format!("z^{z:?} q^{q}: library {got}, oracle {c}"));
        }
    }
    for (z, cs) in s.window_terms() {
        for (e, c) in cs {
            let in_range = z.0.iter().sum::<i64>() <= d.max_z && (0..=2 * d.max_q).contains(&e);
            if !in_range || c == 0 {
                continue;
            }
            let want = if e % 2 == 0 {
                d.c.get(&(z.0.clone(), e / 2)).copied().unwrap_or(0)
            } else {
                0
            };
            if want != c {
                return Some(format!("z^{:?} v^{e}: library {c}, oracle {want}", z.0));
            }
        }
    }
    None
}

/// Compositions of `total` into `parts` non-increasing partial sums
/// `N_1 >= N_2 >= ... >= N_parts >= 0` with `N_1 + ... + N_parts = total`.
pub fn chains(parts: usize, total: i64) -> Vec<Vec<i64>> {
    fn go(left: usize, cap: i64, rest: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=cap.min(rest) {
            cur.push(x);
            go(left - 1, x, rest - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(parts, total, total, &mut Vec::new(), &mut out);
    out
}

/// The level-`k` principal subspace character of `sl_2` in the
/// Feigin-Stoyanovsky form `sum q^{N_1^2 + ... + N_k^2} z^{N_1 + ... + N_k} / prod (q)_{N_i - N_{i+1}}`.
pub fn sl2_principal(k: usize, max_z: i64, max_q: i64) -> Dense {
    let mut out = Dense::one(1, max_z, max_q).zero();
    for m in 0..=max_z {
        for ns in chains(k, m) {
            let qe: i64 = ns.iter().map(|x| x * x).sum();
            let mut t = Dense::one(1, max_z, max_q).shift(1, qe, &[m]);
            for i in 0..k {
                let next = if i + 1 < k { ns[i + 1] } else { 0 };
                t = t.div_poch(1, &[0], ns[i] - next);
            }
            out.add(&t);
        }
    }
    out
}

/// The level-one principal subspace character of `sl_3`:
/// `sum q^{m_1^2 - m_1 m_2 + m_2^2} z_1^{m_1} z_2^{m_2} / ((q)_{m_1} (q)_{m_2})`.
pub fn sl3_level_one(max_z: i64, max_q: i64) -> Dense {
    let mut out = Dense::one(2, max_z, max_q).zero();
    for m1 in 0..=max_z {
        for m2 in 0..=max_z - m1 {
            let qe = m1 * m1 - m1 * m2 + m2 * m2;
            let t = Dense::one(2, max_z, max_q)
                .shift(1, qe, &[m1, m2])
                .div_poch(1, &[0, 0], m1)
                .div_poch(1, &[0, 0], m2);
            out.add(&t);
        }
    }
    out
}

/// `1 / ((q)_d (q z)_d)`.
pub fn j_rank_one(d: i64, max_z: i64, max_q: i64) -> Dense {
    Dense::one(1, max_z, max_q)
        .div_poch(1, &[0], d)
        .div_poch(1, &[1], d)
}

/// The rank-two product formula for `J_{d_1, d_2}`.
pub fn j_rank_two(d1: i64, d2: i64, max_z: i64, max_q: i64) -> Dense {
    Dense::one(2, max_z, max_q)
        .mul_poch(1, &[1, 1], d1 + d2)
        .div_poch(1, &[0, 0], d1)
        .div_poch(1, &[0, 0], d2)
        .div_poch(1, &[1, 0], d1)
        .div_poch(1, &[0, 1], d2)
        .div_poch(1, &[1, 1], d1)
        .div_poch(1, &[1, 1], d2)
}
