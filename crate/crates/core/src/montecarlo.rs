//! End-to-end symbol-level simulation of FDF multi-way relay frames.
//!
//! Each slot: the two paired users send co-phased QAM symbols scaled to unit
//! average energy, the relay adds complex AWGN of variance `N0/2` per
//! dimension and decodes the network-coded symbol, then broadcasts it to
//! every user over its downlink. Each user then extracts all messages by
//! walking the pairing tree from its own message and tallies symbol errors.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{build_scenario, ScenarioGains, ScenarioKind, ScenarioParams};
use crate::error::{Error, Result};
use crate::modem::{relay_decode_dim, user_decode_dim, Constellation, ExtractionPlan, RelayMode};
use crate::network::{FramePlan, NetworkSetup};
use crate::pairing::{FairnessPolicy, PairingScheme};
use crate::rates::n0_from_snr_db;
use crate::rng::{self, Domain};

/// Points with fewer error events than this are flagged unreliable.
pub const MIN_RELIABLE_EVENTS: u64 = 20;

const RELAY_RECEIVER: u64 = 0xfff;

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub users: usize,
    pub frames: usize,
    /// Symbols per packet.
    pub symbols: usize,
    pub order: usize,
    pub scheme: PairingScheme,
    pub scenario: ScenarioKind,
    pub snr_db: Vec<f64>,
    pub relay_mode: RelayMode,
    pub seed: u64,
    pub fairness: FairnessPolicy,
    pub nu: f64,
    /// Fraction of users forced near the relay, if any.
    pub near_fraction: Option<f64>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            users: 10,
            frames: 100,
            symbols: 500,
            order: 16,
            scheme: PairingScheme::Proposed,
            scenario: ScenarioKind::Equal,
            snr_db: (0..=6).map(|k| 5.0 * k as f64).collect(),
            relay_mode: RelayMode::AnalysisMatched,
            seed: 1,
            fairness: FairnessPolicy::default(),
            nu: crate::channel::DEFAULT_PATH_LOSS_EXPONENT,
            near_fraction: None,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<Constellation> {
        if self.users < 3 {
            return Err(Error::Config(format!("at least 3 users required, got {}", self.users)));
        }
        if self.frames == 0 || self.symbols == 0 {
            return Err(Error::Config("frames and symbols must be positive".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        Constellation::new(self.order)
    }

    pub fn scenario_params(&self) -> ScenarioParams {
        let mut params = ScenarioParams::new(self.scenario, self.users, self.frames);
        params.nu = self.nu;
        match self.near_fraction {
            Some(rho) => params.with_cap(rho),
            None => params,
        }
    }

    pub fn setup(&self) -> NetworkSetup {
        NetworkSetup::new(self.scheme, self.scenario).with_fairness(self.fairness)
    }

    pub fn gains(&self) -> Result<ScenarioGains> {
        build_scenario(&self.scenario_params(), self.seed)
    }
}

/// Forces the relay's in-phase residue of `symbol` in `slot` off by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub slot: usize,
    pub symbol: usize,
}

/// Symbol-level settings shared by every frame of a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSim {
    pub constellation: Constellation,
    pub symbols: usize,
    pub mode: RelayMode,
    pub seed: u64,
}

/// Symbol errors of one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameTally {
    pub frame: usize,
    pub common: Option<usize>,
    /// Wrongly extracted symbols per decoding user.
    pub wrong: Vec<u64>,
    /// Extracted symbols per decoding user, `(L - 1) T`.
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErrorTally {
    pub wrong: Vec<u64>,
    pub total: Vec<u64>,
    pub frames: Vec<FrameTally>,
}

impl ErrorTally {
    pub fn from_frames(frames: Vec<FrameTally>) -> Self {
        let users = frames.first().map_or(0, |f| f.wrong.len());
        let mut wrong = vec![0; users];
        let mut total = vec![0; users];
        for f in &frames {
            for (j, w) in f.wrong.iter().enumerate() {
                wrong[j] += w;
                total[j] += f.total;
            }
        }
        ErrorTally { wrong, total, frames }
    }
}

fn messages(seed: u64, frame: usize, user: usize, symbols: usize, order: usize) -> Vec<usize> {
    let mut rng = rng::stream(seed, Domain::Symbols, frame as u64, user as u64);
    (0..symbols).map(|_| rng.random_range(0..order)).collect()
}

fn noise(seed: u64, frame: usize, slot: usize, receiver: u64, count: usize, sigma: f64) -> Vec<f64> {
    let mut rng = rng::stream(seed, Domain::Noise, frame as u64, ((slot as u64) << 12) | receiver);
    (0..count).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Simulates one frame at noise power `n0` and tallies extraction errors.
pub fn simulate_frame(plan: &FramePlan, n0: f64, sim: &FrameSim, fault: Option<Fault>) -> Result<FrameTally> {
    let c = &sim.constellation;
    let (side, t_len) = (c.side(), sim.symbols);
    let users = plan.users();
    let slots = plan.schedule.slots().len();
    if !(n0 >= 0.0) {
        return Err(Error::Domain(format!("noise power must be non-negative, got {n0}")));
    }
    if let Some(f) = fault {
        if f.slot >= slots || f.symbol >= t_len {
            return Err(Error::Domain(format!("fault {f:?} outside the frame")));
        }
    }
    let sigma = (n0 / 2.0).sqrt();
    let unit = (2.0 * c.e_av()).sqrt().recip();

    // digits[user] = (in-phase, quadrature) per symbol
    let digits: Vec<Vec<(usize, usize)>> = (0..users)
        .map(|j| messages(sim.seed, plan.frame, j, t_len, c.order()).into_iter().map(|w| (w / side, w % side)).collect())
        .collect();

    // decoded[user][dim][slot * T + t]
    let mut decoded = vec![[vec![0usize; slots * t_len], vec![0usize; slots * t_len]]; users];
    for (slot, &(a, b)) in plan.schedule.slots().iter().enumerate() {
        let mut amp_a = plan.uplink_power(a, slot).sqrt() * unit;
        let mut amp_b = plan.uplink_power(b, slot).sqrt() * unit;
        if sim.mode == RelayMode::AnalysisMatched {
            let weaker = amp_a.min(amp_b);
            amp_a = weaker;
            amp_b = weaker;
        }
        let relay_noise = noise(sim.seed, plan.frame, slot, RELAY_RECEIVER, 2 * t_len, sigma);
        let mut relay = vec![(0usize, 0usize); t_len];
        for t in 0..t_len {
            let (da, db) = (digits[a][t], digits[b][t]);
            let ri = amp_a * c.level(da.0) + amp_b * c.level(db.0) + relay_noise[2 * t];
            let rq = amp_a * c.level(da.1) + amp_b * c.level(db.1) + relay_noise[2 * t + 1];
            let mut v = (
                relay_decode_dim(ri, amp_a, amp_b, c, sim.mode)?,
                relay_decode_dim(rq, amp_a, amp_b, c, sim.mode)?,
            );
            if fault == Some(Fault { slot, symbol: t }) {
                v.0 = (v.0 + 1) % side;
            }
            relay[t] = v;
        }
        for (j, dec) in decoded.iter_mut().enumerate() {
            let amp = plan.downlink_power(j, slot).sqrt() * unit;
            let user_noise = noise(sim.seed, plan.frame, slot, j as u64, 2 * t_len, sigma);
            for (t, &(vi, vq)) in relay.iter().enumerate() {
                let yi = amp * c.level(vi) + user_noise[2 * t];
                let yq = amp * c.level(vq) + user_noise[2 * t + 1];
                dec[0][slot * t_len + t] = user_decode_dim(yi, amp, c);
                dec[1][slot * t_len + t] = user_decode_dim(yq, amp, c);
            }
        }
    }

    let mut wrong = vec![0u64; users];
    let mut est = [vec![0usize; users], vec![0usize; users]];
    let mut slot_digits = vec![0usize; slots];
    for (j, dec) in decoded.iter().enumerate() {
        let extraction = ExtractionPlan::new(&plan.schedule, j)?;
        for t in 0..t_len {
            for dim in 0..2 {
                for (slot, d) in slot_digits.iter_mut().enumerate() {
                    *d = dec[dim][slot * t_len + t];
                }
                let own = if dim == 0 { digits[j][t].0 } else { digits[j][t].1 };
                extraction.apply(own, &slot_digits, side, &mut est[dim]);
            }
            wrong[j] += (0..users)
                .filter(|&m| m != j && (est[0][m], est[1][m]) != digits[m][t])
                .count() as u64;
        }
    }
    Ok(FrameTally { frame: plan.frame, common: plan.schedule.common(), wrong, total: (slots * t_len) as u64 })
}

/// SER estimate with frame-cluster standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleStat {
    pub ser: f64,
    pub stderr: f64,
    pub n_events: u64,
    pub symbols: u64,
}

impl RoleStat {
    /// Pools per-frame `(wrong, total)` counts.
    pub fn from_counts(counts: &[(u64, u64)]) -> Self {
        let n_events: u64 = counts.iter().map(|c| c.0).sum();
        let symbols: u64 = counts.iter().map(|c| c.1).sum();
        let ser = if symbols > 0 { n_events as f64 / symbols as f64 } else { 0.0 };
        let f = counts.len() as f64;
        let stderr = if counts.len() > 1 {
            let rates: Vec<f64> = counts.iter().map(|&(w, t)| w as f64 / t as f64).collect();
            let mean = rates.iter().sum::<f64>() / f;
            let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (f - 1.0);
            (var / f).sqrt()
        } else {
            0.0
        };
        RoleStat { ser, stderr, n_events, symbols }
    }

    pub fn unreliable(&self) -> bool {
        self.n_events < MIN_RELIABLE_EVENTS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub snr_db: f64,
    /// Errors at each frame's common user (common-user scheme only).
    pub common: Option<RoleStat>,
    /// Errors at the non-common users (every user for chain schemes).
    pub other: RoleStat,
    /// Errors at the last user index.
    pub end_user: RoleStat,
    pub per_user: Vec<RoleStat>,
    pub tally: ErrorTally,
}

impl SimPoint {
    pub fn from_tally(snr_db: f64, tally: ErrorTally) -> Self {
        let users = tally.wrong.len();
        let has_common = tally.frames.iter().all(|f| f.common.is_some());
        let common = has_common.then(|| {
            RoleStat::from_counts(&tally.frames.iter().map(|f| (f.wrong[f.common.unwrap()], f.total)).collect::<Vec<_>>())
        });
        let other = RoleStat::from_counts(
            &tally
                .frames
                .iter()
                .map(|f| {
                    let excl = f.common.map_or(0, |i| f.wrong[i]);
                    let n = if f.common.is_some() { users - 1 } else { users } as u64;
                    (f.wrong.iter().sum::<u64>() - excl, n * f.total)
                })
                .collect::<Vec<_>>(),
        );
        let per_user: Vec<RoleStat> = (0..users)
            .map(|j| RoleStat::from_counts(&tally.frames.iter().map(|f| (f.wrong[j], f.total)).collect::<Vec<_>>()))
            .collect();
        SimPoint { snr_db, common, other, end_user: per_user[users - 1], per_user, tally }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub points: Vec<SimPoint>,
}

/// Simulates every frame at every SNR point. Deterministic for a fixed seed
/// regardless of the number of worker threads.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResult> {
    let c = config.validate()?;
    let gains = config.gains()?;
    let plans = config.setup().plan_all(&gains, config.seed)?;
    run_on_plans(config, &plans, &c)
}

/// Simulates a campaign over precomputed frame plans.
pub fn run_on_plans(config: &CampaignConfig, plans: &[FramePlan], c: &Constellation) -> Result<CampaignResult> {
    let sim = FrameSim { constellation: *c, symbols: config.symbols, mode: config.relay_mode, seed: config.seed };
    let points = config
        .snr_db
        .iter()
        .map(|&snr| {
            let n0 = n0_from_snr_db(snr);
            let frames: Vec<FrameTally> =
                plans.par_iter().map(|p| simulate_frame(p, n0, &sim, None)).collect::<Result<_>>()?;
            Ok(SimPoint::from_tally(snr, ErrorTally::from_frames(frames)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CampaignResult { config: config.clone(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ScenarioGains;

    fn sim(order: usize, symbols: usize, mode: RelayMode) -> FrameSim {
        FrameSim { constellation: Constellation::new(order).unwrap(), symbols, mode, seed: 4 }
    }

    fn plan(scheme: PairingScheme, users: usize, kind: ScenarioKind) -> FramePlan {
        let gains = ScenarioGains::constant(&(0..users).map(|j| 1.0 + j as f64).collect::<Vec<_>>(), 1).unwrap();
        NetworkSetup::new(scheme, kind).plan(&gains, 0, 8).unwrap()
    }

    #[test]
    fn noiseless_frames_are_error_free() {
        for scheme in PairingScheme::ALL {
            for mode in [RelayMode::JointMl, RelayMode::AnalysisMatched] {
                for order in [4, 16] {
                    let p = plan(scheme, 3, ScenarioKind::Unequal);
                    let t = simulate_frame(&p, 0.0, &sim(order, 64, mode), None).unwrap();
                    assert!(t.wrong.iter().all(|&w| w == 0), "{scheme} {mode}");
                    assert_eq!(t.total, 2 * 64);
                }
            }
        }
    }

    #[test]
    fn fault_propagates_through_common_slot() {
        let p = plan(PairingScheme::Proposed, 5, ScenarioKind::Unequal);
        let i = p.schedule.common().unwrap();
        for slot in 0..4 {
            let t = simulate_frame(&p, 0.0, &sim(16, 8, RelayMode::AnalysisMatched), Some(Fault { slot, symbol: 0 })).unwrap();
            let (a, b) = p.schedule.pair(slot);
            let paired = if a == i { b } else { a };
            for j in 0..5 {
                let want = if j == paired { 4 } else { 1 };
                assert_eq!(t.wrong[j], want, "slot {slot} user {j}");
            }
        }
    }

    #[test]
    fn modes_coincide_for_equal_amplitudes() {
        let gains = ScenarioGains::constant(&[1.0; 4], 1).unwrap();
        let mut p = NetworkSetup::new(PairingScheme::Consecutive, ScenarioKind::Equal).plan(&gains, 0, 2).unwrap();
        p.channels = crate::channel::FrameChannels::uniform(4, 3, 0.8);
        let a = simulate_frame(&p, 0.2, &sim(16, 400, RelayMode::JointMl), None).unwrap();
        let b = simulate_frame(&p, 0.2, &sim(16, 400, RelayMode::AnalysisMatched), None).unwrap();
        assert_eq!(a, b);
        assert!(a.wrong.iter().sum::<u64>() > 0);
    }

    #[test]
    fn campaign_is_deterministic() {
        let cfg = CampaignConfig { users: 4, frames: 6, symbols: 50, snr_db: vec![10.0], ..CampaignConfig::default() };
        let a = run_campaign(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_campaign(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cluster_stderr() {
        let s = RoleStat::from_counts(&[(1, 10), (3, 10)]);
        assert_eq!(s.n_events, 4);
        assert!((s.ser - 0.2).abs() < 1e-15);
        // rates 0.1, 0.3: sample sd 0.1414, / sqrt 2
        assert!((s.stderr - 0.1).abs() < 1e-12);
        assert!(s.unreliable());
    }
}
