//! Frame-averaged analytic SER curves.

use rayon::prelude::*;

use crate::channel::{ScenarioGains, ScenarioKind};
use crate::error::Result;
use crate::modem::Constellation;
use crate::network::{FramePlan, NetworkSetup};
use crate::pairing::PairingScheme;
use crate::rates::n0_from_snr_db;

use super::coeffs::CoeffTables;
use super::estimators::{frame_ser, Estimator};

/// SER averaged over frames, split by role.
#[derive(Debug, Clone, PartialEq)]
pub struct SerSummary {
    /// Mean SER of each user index over all frames.
    pub per_user: Vec<f64>,
    /// Mean SER at each frame's common user; `None` for chain schemes.
    pub common: Option<f64>,
    /// Mean over frames of the mean SER of the non-common users (all users
    /// for chain schemes).
    pub other_mean: f64,
    /// Mean SER of the last user index.
    pub end_user: f64,
}

impl SerSummary {
    /// Averages per-frame, per-user SERs. `common[f]` is frame `f`'s common user.
    pub fn from_frames(per_frame: &[Vec<f64>], common: &[Option<usize>]) -> Self {
        let frames = per_frame.len() as f64;
        let users = per_frame.first().map_or(0, Vec::len);
        let mut per_user = vec![0.0; users];
        let mut common_sum = 0.0;
        let mut other_sum = 0.0;
        for (ser, &c) in per_frame.iter().zip(common) {
            for (acc, x) in per_user.iter_mut().zip(ser) {
                *acc += x / frames;
            }
            match c {
                Some(i) => {
                    common_sum += ser[i];
                    other_sum += (ser.iter().sum::<f64>() - ser[i]) / (users - 1) as f64;
                }
                None => other_sum += ser.iter().sum::<f64>() / users as f64,
            }
        }
        SerSummary {
            end_user: per_user.last().copied().unwrap_or(0.0),
            per_user,
            common: common.iter().all(Option::is_some).then_some(common_sum / frames),
            other_mean: other_sum / frames,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub scheme: PairingScheme,
    pub scenario: ScenarioKind,
    pub estimator: Estimator,
    pub summary: SerSummary,
}

/// Averages the analytic per-frame SER over `plans` at one SNR point.
pub fn ensemble_ser(
    plans: &[FramePlan],
    snr_db: f64,
    c: &Constellation,
    tables: &CoeffTables,
    estimator: Estimator,
) -> Result<SerSummary> {
    let n0 = n0_from_snr_db(snr_db);
    let per_frame: Vec<Vec<f64>> =
        plans.par_iter().map(|p| frame_ser(p, n0, c, tables, estimator)).collect::<Result<_>>()?;
    let common: Vec<Option<usize>> = plans.iter().map(|p| p.schedule.common()).collect();
    Ok(SerSummary::from_frames(&per_frame, &common))
}

/// Analytic SER over an SNR grid; channels are drawn once and reused.
pub fn ser_curve(
    setup: &NetworkSetup,
    gains: &ScenarioGains,
    seed: u64,
    snr_db: &[f64],
    c: &Constellation,
    tables: &CoeffTables,
    estimator: Estimator,
) -> Result<Vec<SerPoint>> {
    let plans = setup.plan_all(gains, seed)?;
    snr_db
        .iter()
        .map(|&x| {
            Ok(SerPoint {
                snr_db: x,
                scheme: setup.scheme,
                scenario: setup.scenario,
                estimator,
                summary: ensemble_ser(&plans, x, c, tables, estimator)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_scenario, ScenarioParams};
    use crate::ser::coeffs::derive_coeff_tables;

    #[test]
    fn summary_roles() {
        let frames = vec![vec![0.1, 0.2, 0.4], vec![0.3, 0.1, 0.2]];
        let s = SerSummary::from_frames(&frames, &[Some(0), Some(1)]);
        assert!((s.common.unwrap() - 0.1).abs() < 1e-15);
        assert!((s.other_mean - (0.3 + 0.25) / 2.0).abs() < 1e-15);
        assert!((s.end_user - 0.3).abs() < 1e-15);
        let chain = SerSummary::from_frames(&frames, &[None, None]);
        assert!(chain.common.is_none());
    }

    #[test]
    fn curves_are_deterministic_and_decreasing() {
        let kind = ScenarioKind::Unequal;
        let gains = build_scenario(&ScenarioParams::new(kind, 5, 20), 9).unwrap();
        let c = Constellation::new(16).unwrap();
        let t = derive_coeff_tables(4).unwrap();
        let grid = [0.0, 10.0, 20.0, 30.0];
        for scheme in PairingScheme::ALL {
            let setup = NetworkSetup::new(scheme, kind);
            let a = ser_curve(&setup, &gains, 9, &grid, &c, &t, Estimator::HighSnr).unwrap();
            let b = ser_curve(&setup, &gains, 9, &grid, &c, &t, Estimator::HighSnr).unwrap();
            assert_eq!(a, b);
            for w in a.windows(2) {
                assert!(w[1].summary.other_mean <= w[0].summary.other_mean);
            }
        }
    }
}
