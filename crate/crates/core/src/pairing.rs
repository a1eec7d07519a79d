//! User pairing schedules and transmission-fairness powers.
//!
//! Users are indexed from 0 internally. A schedule lists the `L - 1` pairs
//! that transmit in the multiple-access slots of one frame; for every scheme
//! the pairs form a spanning tree over the users, which is what makes
//! message extraction by successive self-information cancellation possible.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::channel::ScenarioKind;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairingScheme {
    /// Every slot pairs the common user with one other user.
    Proposed,
    /// Slot `l` pairs users `l` and `l + 1`.
    Consecutive,
    /// Slot `l` pairs users from opposite ends of the index range.
    Mirror,
}

impl PairingScheme {
    pub const ALL: [PairingScheme; 3] = [PairingScheme::Proposed, PairingScheme::Consecutive, PairingScheme::Mirror];

    pub fn name(&self) -> &'static str {
        match self {
            PairingScheme::Proposed => "proposed",
            PairingScheme::Consecutive => "consecutive",
            PairingScheme::Mirror => "mirror",
        }
    }
}

impl fmt::Display for PairingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairingScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "proposed" => Ok(PairingScheme::Proposed),
            "consecutive" => Ok(PairingScheme::Consecutive),
            "mirror" => Ok(PairingScheme::Mirror),
            _ => Err(format!("unknown pairing scheme '{s}' (expected proposed, consecutive or mirror)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingSchedule {
    scheme: PairingScheme,
    users: usize,
    slots: Vec<(usize, usize)>,
    common: Option<usize>,
    tx_power: Vec<f64>,
}

impl PairingSchedule {
    pub fn scheme(&self) -> PairingScheme {
        self.scheme
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn slots(&self) -> &[(usize, usize)] {
        &self.slots
    }

    pub fn pair(&self, slot: usize) -> (usize, usize) {
        self.slots[slot]
    }

    pub fn common(&self) -> Option<usize> {
        self.common
    }

    pub fn tx_power(&self, user: usize) -> f64 {
        self.tx_power[user]
    }

    pub fn tx_powers(&self) -> &[f64] {
        &self.tx_power
    }

    /// The slot in which `user` transmits alongside the common user.
    pub fn slot_with_common(&self, user: usize) -> Option<usize> {
        let common = self.common?;
        if user == common {
            return None;
        }
        self.slots.iter().position(|&(a, b)| (a == common && b == user) || (b == common && a == user))
    }

    /// Replaces the per-user transmit powers.
    pub fn with_powers(mut self, powers: Vec<f64>) -> Result<Self> {
        if powers.len() != self.users {
            return Err(Error::Schedule(format!("expected {} powers, got {}", self.users, powers.len())));
        }
        if powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Schedule("transmit powers must be positive".into()));
        }
        self.tx_power = powers;
        Ok(self)
    }

    /// Checks that the slots form a spanning tree over all users.
    pub fn validate(&self) -> Result<()> {
        let l = self.users;
        if self.slots.len() != l - 1 {
            return Err(Error::Schedule(format!("{} slots for {l} users", self.slots.len())));
        }
        let mut parent: Vec<usize> = (0..l).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &self.slots {
            if a == b || a >= l || b >= l {
                return Err(Error::Schedule(format!("invalid pair ({a}, {b})")));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::Schedule(format!("pair ({a}, {b}) closes a cycle")));
            }
            parent[ra] = rb;
        }
        Ok(())
    }
}

/// Index of the largest average gain; ties go to the lowest index.
pub fn select_common_user(gains: &[f64]) -> Result<usize> {
    if gains.is_empty() {
        return Err(Error::Domain("no users to select a common user from".into()));
    }
    let mut best = 0;
    for (j, &g) in gains.iter().enumerate().skip(1) {
        if g > gains[best] {
            best = j;
        }
    }
    Ok(best)
}

/// Builds the slot list of a scheme with unit transmit powers.
pub fn build_schedule(scheme: PairingScheme, users: usize, common: Option<usize>) -> Result<PairingSchedule> {
    if users < 2 {
        return Err(Error::Config(format!("at least 2 users required, got {users}")));
    }
    let slots: Vec<(usize, usize)> = match scheme {
        PairingScheme::Proposed => {
            let i = common.ok_or_else(|| Error::Schedule("the proposed scheme needs a common user".into()))?;
            if i >= users {
                return Err(Error::Schedule(format!("common user {i} out of range for {users} users")));
            }
            (0..users).filter(|&l| l != i).map(|l| (i, l)).collect()
        }
        PairingScheme::Consecutive => (0..users - 1).map(|l| (l, l + 1)).collect(),
        PairingScheme::Mirror => {
            let half = users / 2;
            (1..users).map(|l| if l <= half { (l - 1, users - l) } else { (l, users - l) }).collect()
        }
    };
    let common = if scheme == PairingScheme::Proposed { common } else { None };
    let schedule = PairingSchedule { scheme, users, slots, common, tx_power: vec![1.0; users] };
    schedule.validate()?;
    Ok(schedule)
}

/// How the equal-gain scenario rotates the common user between frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommonRotation {
    /// Uniformly random user each frame.
    #[default]
    Random,
    /// `frame mod L`.
    RoundRobin,
}

/// Transmission-fairness policy for the proposed scheme.
///
/// With scaling, the common user transmits at `P_eff / (L - 1)` and every
/// other user at `P_eff = (2L - 2) P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairnessPolicy {
    pub scale_unequal: bool,
    pub scale_variable: bool,
    pub rotation: CommonRotation,
}

impl Default for FairnessPolicy {
    fn default() -> Self {
        FairnessPolicy { scale_unequal: true, scale_variable: false, rotation: CommonRotation::Random }
    }
}

impl FairnessPolicy {
    /// No power scaling anywhere; used to check the unscaled formulas.
    pub fn raw() -> Self {
        FairnessPolicy { scale_unequal: false, scale_variable: false, rotation: CommonRotation::Random }
    }

    pub fn scales(&self, kind: ScenarioKind) -> bool {
        match kind {
            ScenarioKind::Equal => false,
            ScenarioKind::Unequal => self.scale_unequal,
            ScenarioKind::Variable { .. } => self.scale_variable,
        }
    }
}

/// Per-user transmit powers for one frame.
pub fn fairness_powers(
    scheme: PairingScheme,
    scenario: ScenarioKind,
    users: usize,
    base_power: f64,
    common: Option<usize>,
    policy: &FairnessPolicy,
) -> Vec<f64> {
    match (scheme, common) {
        (PairingScheme::Proposed, Some(i)) if policy.scales(scenario) => {
            let p_eff = (2 * users - 2) as f64 * base_power;
            let mut powers = vec![p_eff; users];
            powers[i] = p_eff / (users - 1) as f64;
            powers
        }
        _ => vec![base_power; users],
    }
}

/// Common user serving `frame`, or `None` for the chain schemes.
pub fn frame_common_user(
    scheme: PairingScheme,
    scenario: ScenarioKind,
    frame_gains: &[f64],
    frame: usize,
    seed: u64,
    policy: &FairnessPolicy,
) -> Result<Option<usize>> {
    if scheme != PairingScheme::Proposed {
        return Ok(None);
    }
    let users = frame_gains.len();
    let common = match (scenario, policy.rotation) {
        (ScenarioKind::Equal, CommonRotation::Random) => {
            rng::stream(seed, Domain::CommonUser, frame as u64, 0).random_range(0..users)
        }
        (ScenarioKind::Equal, CommonRotation::RoundRobin) => frame % users,
        _ => select_common_user(frame_gains)?,
    };
    Ok(Some(common))
}
