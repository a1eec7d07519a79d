//! Relay and downlink transition matrices and the network-coded PAM error
//! probability.
//!
//! Each matrix is stored as its deviation from the identity, i.e. the
//! Q-function sums alone, so small error probabilities keep full relative
//! precision instead of being recovered as `1 - (1 - x)`.

use crate::error::{domain, Result};
use crate::special::q_function;

use super::coeffs::CoeffTables;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrices {
    side: usize,
    /// `C - I`, row-major.
    c_dev: Vec<f64>,
    /// `D - I`, row-major.
    d_dev: Vec<f64>,
}

fn q_terms(gamma: f64, count: usize) -> Vec<f64> {
    let root = gamma.sqrt();
    (0..count).map(|k| q_function((2 * k + 1) as f64 * root)).collect()
}

fn deviation<'t>(side: usize, q: &[f64], row: impl Fn(usize, usize) -> &'t [f64]) -> Vec<f64> {
    let mut out = vec![0.0; side * side];
    for p in 0..side {
        for j in 0..side {
            out[p * side + j] = row(p, j).iter().zip(q).map(|(a, q)| a * q).sum();
        }
    }
    out
}

fn check_snr(gamma: f64, what: &str) -> Result<()> {
    if !(gamma > 0.0) {
        return domain(format!("{what} SNR must be positive, got {gamma}"));
    }
    Ok(())
}

/// `C[p][q] = P(relay decides q | class p)` at relay SNR `gamma_r`,
/// `D[p][q] = P(user decides q | relay sent p)` at user SNR `gamma_user`.
pub fn build_prob_matrices(gamma_r: f64, gamma_user: f64, tables: &CoeffTables) -> Result<ProbMatrices> {
    check_snr(gamma_r, "relay")?;
    check_snr(gamma_user, "user")?;
    let s = tables.side();
    let qa = q_terms(gamma_r, 2 * s - 2);
    let qb = q_terms(gamma_user, s - 1);
    Ok(ProbMatrices {
        side: s,
        c_dev: deviation(s, &qa, |p, q| tables.a_row(p, q)),
        d_dev: deviation(s, &qb, |p, q| tables.b_row(p, q)),
    })
}

impl ProbMatrices {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn c(&self, p: usize, q: usize) -> f64 {
        self.c_dev[p * self.side + q] + if p == q { 1.0 } else { 0.0 }
    }

    pub fn d(&self, p: usize, q: usize) -> f64 {
        self.d_dev[p * self.side + q] + if p == q { 1.0 } else { 0.0 }
    }

    /// Probability that the end-to-end class differs from the true class,
    /// averaged over equally likely classes.
    pub fn end_to_end_error(&self) -> f64 {
        let s = self.side;
        let mut total = 0.0;
        for p in 0..s {
            // P(wrong | p) = sum_q C[p][q] (1 - D[q][p]), using sum_q C[p][q] = 1
            for q in 0..s {
                let miss = if q == p { -self.d_dev[q * s + p] } else { 1.0 - self.d_dev[q * s + p] };
                total += self.c(p, q) * miss;
            }
        }
        (total / s as f64).clamp(0.0, 1.0)
    }
}

/// Probability that a user ends up with the wrong network-coded residue in
/// one PAM dimension.
pub fn p_pam_nc(gamma_r: f64, gamma_user: f64, tables: &CoeffTables) -> Result<f64> {
    Ok(build_prob_matrices(gamma_r, gamma_user, tables)?.end_to_end_error())
}

/// Symbol-level error from the per-dimension error: `1 - (1 - p)^2`.
pub fn p_fdf_from_nc(p_nc: f64) -> f64 {
    p_nc * (2.0 - p_nc)
}

pub fn p_fdf(gamma_r: f64, gamma_user: f64, tables: &CoeffTables) -> Result<f64> {
    Ok(p_fdf_from_nc(p_pam_nc(gamma_r, gamma_user, tables)?))
}
