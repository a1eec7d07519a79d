//! Per-frame network plans.
//!
//! A plan fixes everything a frame needs: the average gains, the pairing
//! schedule with its transmit powers, and the fading coefficients. Plans are
//! pure functions of `(setup, gains, frame, seed)`, so rates, analytic SER
//! and simulation all see the same channels for the same seed.

use rayon::prelude::*;

use crate::channel::{self, FrameChannels, ScenarioGains, ScenarioKind};
use crate::error::Result;
use crate::pairing::{self, FairnessPolicy, PairingSchedule, PairingScheme};

/// Scheme-level settings shared by every frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSetup {
    pub scheme: PairingScheme,
    pub scenario: ScenarioKind,
    /// Base user transmit power `P`.
    pub power: f64,
    /// Relay transmit power `P_r`.
    pub relay_power: f64,
    pub fairness: FairnessPolicy,
}

impl NetworkSetup {
    pub fn new(scheme: PairingScheme, scenario: ScenarioKind) -> Self {
        NetworkSetup { scheme, scenario, power: 1.0, relay_power: 1.0, fairness: FairnessPolicy::default() }
    }

    pub fn with_fairness(mut self, fairness: FairnessPolicy) -> Self {
        self.fairness = fairness;
        self
    }

    /// Schedule and powers for `frame`, without drawing channels.
    pub fn schedule(&self, gains: &ScenarioGains, frame: usize, seed: u64) -> Result<PairingSchedule> {
        let frame_gains = gains.frame(frame);
        let users = frame_gains.len();
        let common = pairing::frame_common_user(self.scheme, self.scenario, &frame_gains, frame, seed, &self.fairness)?;
        let powers = pairing::fairness_powers(self.scheme, self.scenario, users, self.power, common, &self.fairness);
        pairing::build_schedule(self.scheme, users, common)?.with_powers(powers)
    }

    pub fn plan(&self, gains: &ScenarioGains, frame: usize, seed: u64) -> Result<FramePlan> {
        Ok(FramePlan {
            frame,
            gains: gains.frame(frame),
            schedule: self.schedule(gains, frame, seed)?,
            channels: channel::draw_frame(gains, frame, seed),
            relay_power: self.relay_power,
        })
    }

    /// Plans for every frame of `gains`, built in parallel.
    pub fn plan_all(&self, gains: &ScenarioGains, seed: u64) -> Result<Vec<FramePlan>> {
        (0..gains.frames()).into_par_iter().map(|f| self.plan(gains, f, seed)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    pub frame: usize,
    /// Average gains `sigma^2` of every user in this frame.
    pub gains: Vec<f64>,
    pub schedule: PairingSchedule,
    pub channels: FrameChannels,
    pub relay_power: f64,
}

impl FramePlan {
    pub fn users(&self) -> usize {
        self.gains.len()
    }

    /// `P_user |h_user|^2` received at the relay in `slot`.
    pub fn uplink_power(&self, user: usize, slot: usize) -> f64 {
        self.schedule.tx_power(user) * self.channels.gain(user, slot)
    }

    /// `P_r |h_user|^2` received by `user` in `slot`.
    pub fn downlink_power(&self, user: usize, slot: usize) -> f64 {
        self.relay_power * self.channels.gain(user, slot)
    }
}
