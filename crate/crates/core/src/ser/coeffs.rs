//! Rational coefficients of the Q-function expansions of PAM decision
//! probabilities.
//!
//! `a[p][q][u]` expands `P(relay class q | sent class p)` over the
//! superimposed constellation `{0, +-2, ..., +-(2s - 2)}` of two `s`-PAM
//! signals, where class is the sum index modulo `s` and each superimposed
//! point is weighted by the fraction of digit pairs that produce it.
//! `b[p][q][v]` expands the plain `s`-PAM transition `P(q | p)`. Both use
//! odd multiples `u`, `v` of the unit-SNR argument: `Q(u sqrt(gamma))`.

use std::io::Write;

use num_rational::Rational64;

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTables {
    side: usize,
    /// `[p][q][(u - 1) / 2]`
    a: Vec<Rational64>,
    /// `[p][q][(v - 1) / 2]`
    b: Vec<Rational64>,
    a_f64: Vec<f64>,
    b_f64: Vec<f64>,
}

/// Adds the Q-expansion of `P(x + n in region j)` to `acc`, where regions
/// are the nearest-neighbour cells of `levels` (spacing 2, integers).
/// Returns the constant term (1 for the point's own cell, else 0).
fn add_region(levels: &[i64], x: i64, j: usize, weight: Rational64, acc: &mut [Rational64]) -> Rational64 {
    let lo = (j > 0).then(|| levels[j] - 1);
    let hi = (j + 1 < levels.len()).then(|| levels[j] + 1);
    let mut add = |dist: i64, sign: i64| {
        debug_assert!(dist > 0 && dist % 2 == 1);
        acc[(dist as usize - 1) / 2] += weight * Rational64::from_integer(sign);
    };
    if levels[j] == x {
        if let Some(lo) = lo {
            add(x - lo, -1);
        }
        if let Some(hi) = hi {
            add(hi - x, -1);
        }
        weight
    } else if levels[j] > x {
        add(lo.expect("cell above x has a lower edge") - x, 1);
        if let Some(hi) = hi {
            add(hi - x, -1);
        }
        Rational64::from_integer(0)
    } else {
        add(x - hi.expect("cell below x has an upper edge"), 1);
        if let Some(lo) = lo {
            add(x - lo, -1);
        }
        Rational64::from_integer(0)
    }
}

pub fn derive_coeff_tables(side: usize) -> Result<CoeffTables> {
    if !(2..=64).contains(&side) {
        return domain(format!("sqrt(M) must lie in [2, 64], got {side}"));
    }
    let s = side as i64;
    let nu_a = 2 * side - 2;
    let nu_b = side - 1;
    let zero = Rational64::from_integer(0);

    let sum_levels: Vec<i64> = (0..2 * s - 1).map(|k| 2 * k - (2 * s - 2)).collect();
    let mut a = vec![zero; side * side * nu_a];
    for (k, &x) in sum_levels.iter().enumerate() {
        let p = k % side;
        let pairs = k.min(2 * side - 2 - k) + 1;
        let weight = Rational64::new(pairs as i64, s);
        for j in 0..sum_levels.len() {
            let q = j % side;
            let base = (p * side + q) * nu_a;
            let constant = add_region(&sum_levels, x, j, weight, &mut a[base..base + nu_a]);
            debug_assert!(constant == zero || p == q);
        }
    }

    let pam_levels: Vec<i64> = (0..s).map(|v| 2 * v - (s - 1)).collect();
    let mut b = vec![zero; side * side * nu_b];
    for (p, &x) in pam_levels.iter().enumerate() {
        for q in 0..side {
            let base = (p * side + q) * nu_b;
            add_region(&pam_levels, x, q, Rational64::from_integer(1), &mut b[base..base + nu_b]);
        }
    }

    let to_f64 = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
    let a_f64 = a.iter().map(to_f64).collect();
    let b_f64 = b.iter().map(to_f64).collect();
    Ok(CoeffTables { side, a, b, a_f64, b_f64 })
}

impl CoeffTables {
    pub fn side(&self) -> usize {
        self.side
    }

    /// Odd multipliers `u` of the relay table, `1, 3, ..., 2(2s - 2) - 1`.
    pub fn a_multipliers(&self) -> impl Iterator<Item = usize> {
        (0..2 * self.side - 2).map(|k| 2 * k + 1)
    }

    /// Odd multipliers `v` of the downlink table, `1, 3, ..., 2(s - 1) - 1`.
    pub fn b_multipliers(&self) -> impl Iterator<Item = usize> {
        (0..self.side - 1).map(|k| 2 * k + 1)
    }

    /// `a[p][q][u]` for odd `u`.
    pub fn a(&self, p: usize, q: usize, u: usize) -> Rational64 {
        let n = 2 * self.side - 2;
        self.a[(p * self.side + q) * n + (u - 1) / 2]
    }

    /// `b[p][q][v]` for odd `v`.
    pub fn b(&self, p: usize, q: usize, v: usize) -> Rational64 {
        let n = self.side - 1;
        self.b[(p * self.side + q) * n + (v - 1) / 2]
    }

    /// Coefficients of `a[p][q][..]` as floats, indexed by `(u - 1) / 2`.
    pub(crate) fn a_row(&self, p: usize, q: usize) -> &[f64] {
        let n = 2 * self.side - 2;
        &self.a_f64[(p * self.side + q) * n..(p * self.side + q + 1) * n]
    }

    pub(crate) fn b_row(&self, p: usize, q: usize) -> &[f64] {
        let n = self.side - 1;
        &self.b_f64[(p * self.side + q) * n..(p * self.side + q + 1) * n]
    }

    fn write_table(&self, out: impl Write, entry: impl Fn(usize, usize, usize) -> Rational64, mult: Vec<usize>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "q", "u", "num", "den"])?;
        for p in 0..self.side {
            for q in 0..self.side {
                for &u in &mult {
                    let r = entry(p, q, u);
                    w.write_record([p.to_string(), q.to_string(), u.to_string(), r.numer().to_string(), r.denom().to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the relay table as CSV rows `p,q,u,num,den`.
    pub fn write_a_csv(&self, out: impl Write) -> Result<()> {
        self.write_table(out, |p, q, u| self.a(p, q, u), self.a_multipliers().collect())
    }

    /// Writes the downlink table as CSV rows `p,q,u,num,den` (`u` holds `v`).
    pub fn write_b_csv(&self, out: impl Write) -> Result<()> {
        self.write_table(out, |p, q, v| self.b(p, q, v), self.b_multipliers().collect())
    }
}
