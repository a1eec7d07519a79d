//! Per-user average SER of one frame, given its channels.

use crate::error::{Error, Result};
use crate::modem::Constellation;
use crate::network::FramePlan;
use crate::pairing::{PairingSchedule, PairingScheme};

use super::coeffs::CoeffTables;
use super::events::{error_event_probs, DecoderRole};
use super::matrices::p_fdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// First-order terms only.
    #[default]
    HighSnr,
    /// Full error-event sums.
    Exact,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::HighSnr => "high_snr",
            Estimator::Exact => "exact",
        }
    }
}

/// `P_FDF` for every `(user, slot)` of a frame at noise power `n0`.
///
/// The relay SNR of a slot is `min(P_a |h_a|^2, P_b |h_b|^2) / (E_av N0)`;
/// the user SNR is `P_r |h_j|^2 / (E_av N0)`.
pub fn pfdf_matrix(plan: &FramePlan, n0: f64, c: &Constellation, tables: &CoeffTables) -> Result<Vec<Vec<f64>>> {
    let scale = c.e_av() * n0;
    let users = plan.users();
    let mut out = vec![Vec::with_capacity(plan.schedule.slots().len()); users];
    for (slot, &(a, b)) in plan.schedule.slots().iter().enumerate() {
        let gamma_r = plan.uplink_power(a, slot).min(plan.uplink_power(b, slot)) / scale;
        for (j, row) in out.iter_mut().enumerate() {
            row.push(p_fdf(gamma_r, plan.downlink_power(j, slot) / scale, tables)?);
        }
    }
    Ok(out)
}

/// Per-user SER under the common-user scheme from `pfdf[user][slot]`.
pub fn avg_ser(pfdf: &[Vec<f64>], schedule: &PairingSchedule, estimator: Estimator) -> Result<Vec<f64>> {
    let common = schedule
        .common()
        .ok_or_else(|| Error::Schedule("the common-user estimator needs a schedule with a common user".into()))?;
    let n = schedule.slots().len() as f64;
    (0..schedule.users())
        .map(|j| {
            let row = &pfdf[j];
            if j == common {
                return Ok(match estimator {
                    Estimator::HighSnr => row.iter().sum::<f64>() / n,
                    Estimator::Exact => error_event_probs(row, DecoderRole::Common).ser(),
                });
            }
            let k = schedule.slot_with_common(j).expect("every other user shares a slot with the common user");
            Ok(match estimator {
                Estimator::HighSnr => (row.iter().sum::<f64>() + (n - 1.0) * row[k]) / n,
                Estimator::Exact => error_event_probs(row, DecoderRole::Other { common_slot: k }).ser(),
            })
        })
        .collect()
}

/// Per-user SER of a chain scheme: `sum_m m P_FDF(j, m) / (L - 1)` over
/// slots in transmission order.
pub fn avg_ser_consecutive(pfdf: &[Vec<f64>]) -> Vec<f64> {
    pfdf.iter()
        .map(|row| {
            let n = row.len() as f64;
            row.iter().enumerate().map(|(m, p)| (m + 1) as f64 * p).sum::<f64>() / n
        })
        .collect()
}

/// Per-user analytic SER of one frame for the frame's scheme.
pub fn frame_ser(plan: &FramePlan, n0: f64, c: &Constellation, tables: &CoeffTables, estimator: Estimator) -> Result<Vec<f64>> {
    let pfdf = pfdf_matrix(plan, n0, c, tables)?;
    match plan.schedule.scheme() {
        PairingScheme::Proposed => avg_ser(&pfdf, &plan.schedule, estimator),
        PairingScheme::Consecutive | PairingScheme::Mirror => Ok(avg_ser_consecutive(&pfdf)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::build_schedule;
    use approx::assert_relative_eq;

    #[test]
    fn equal_probabilities_ratio_identity() {
        for l in [3usize, 5, 10] {
            let p = 1e-3;
            let s = build_schedule(PairingScheme::Proposed, l, Some(1)).unwrap();
            let ser = avg_ser(&vec![vec![p; l - 1]; l], &s, Estimator::HighSnr).unwrap();
            assert_relative_eq!(ser[1], p, max_relative = 1e-14);
            let ratio = ser[0] / ser[1];
            assert_relative_eq!(ratio, 2.0 - 1.0 / (l - 1) as f64, max_relative = 1e-14);
        }
    }

    #[test]
    fn chain_ratio_is_half_l() {
        let p = 2e-4;
        for l in [2usize, 4, 10] {
            let ser = avg_ser_consecutive(&vec![vec![p; l - 1]; l]);
            for x in ser {
                assert_relative_eq!(x / p, l as f64 / 2.0, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn exact_converges_to_high_snr() {
        let l = 6;
        let s = build_schedule(PairingScheme::Proposed, l, Some(0)).unwrap();
        let base: Vec<Vec<f64>> = (0..l).map(|j| (0..l - 1).map(|k| 1.0 + 0.1 * (j + k) as f64).collect()).collect();
        for scale in [1e-2, 1e-3, 1e-4, 1e-5] {
            let pf: Vec<Vec<f64>> = base.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
            let hi = avg_ser(&pf, &s, Estimator::HighSnr).unwrap();
            let ex = avg_ser(&pf, &s, Estimator::Exact).unwrap();
            for (h, e) in hi.iter().zip(&ex) {
                // gap is second order in p
                assert!((h - e).abs() <= 40.0 * scale * scale, "scale {scale}: {h} vs {e}");
            }
        }
    }

    #[test]
    fn proposed_estimator_needs_common_user() {
        let s = build_schedule(PairingScheme::Consecutive, 4, None).unwrap();
        assert!(avg_ser(&vec![vec![0.1; 3]; 4], &s, Estimator::HighSnr).is_err());
    }
}
