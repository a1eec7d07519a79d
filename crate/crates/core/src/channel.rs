//! Average channel gains and block Rayleigh fading.
//!
//! Gains follow the distance-based path-loss model `sigma^2 = (d0 / d)^nu`
//! with distances expressed as fractions of the reference distance `d0`.
//! Fading coefficients are zero-mean circularly-symmetric complex Gaussians,
//! constant over one packet and independent across slots and frames. The
//! uplink and downlink of a user in a given slot share one coefficient.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::rng::{self, Domain};

/// Smallest distance a user can be placed at, as a fraction of `d0`.
pub const MIN_DISTANCE: f64 = 1e-3;

/// Distance (fraction of `d0`) separating "near" users in the distance-cap policy.
pub const NEAR_DISTANCE: f64 = 0.1;

pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// All users share unit average gain in every frame.
    Equal,
    /// Distances drawn once; gains fixed across frames.
    Unequal,
    /// Distances redrawn every `refresh` frames.
    Variable { refresh: usize },
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Equal => "equal",
            ScenarioKind::Unequal => "unequal",
            ScenarioKind::Variable { .. } => "variable",
        }
    }
}

/// Forces a fraction of the users below [`NEAR_DISTANCE`] and the rest above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCap {
    pub near_fraction: f64,
}

impl DistanceCap {
    /// Number of near users out of `users`, i.e. `ceil(near_fraction * users)`.
    pub fn near_count(&self, users: usize) -> usize {
        let n = (self.near_fraction * users as f64 - 1e-9).ceil();
        (n.max(0.0) as usize).min(users)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub kind: ScenarioKind,
    pub users: usize,
    pub frames: usize,
    pub nu: f64,
    pub cap: Option<DistanceCap>,
}

impl ScenarioParams {
    pub fn new(kind: ScenarioKind, users: usize, frames: usize) -> Self {
        ScenarioParams { kind, users, frames, nu: DEFAULT_PATH_LOSS_EXPONENT, cap: None }
    }

    pub fn with_cap(mut self, near_fraction: f64) -> Self {
        self.cap = Some(DistanceCap { near_fraction });
        self
    }

    fn validate(&self) -> Result<()> {
        if self.users < 3 {
            return Err(Error::Config(format!("at least 3 users required, got {}", self.users)));
        }
        if self.frames < 1 {
            return Err(Error::Config("at least one frame required".into()));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Config(format!("path-loss exponent must be positive, got {}", self.nu)));
        }
        if let ScenarioKind::Variable { refresh } = self.kind {
            if refresh < 1 || refresh > self.frames {
                return Err(Error::Config(format!(
                    "refresh period must lie in [1, {}], got {refresh}",
                    self.frames
                )));
            }
        }
        if let Some(cap) = self.cap {
            if !(0.0..=1.0).contains(&cap.near_fraction) {
                return Err(Error::Config(format!(
                    "near fraction must lie in [0, 1], got {}",
                    cap.near_fraction
                )));
            }
        }
        Ok(())
    }
}

/// Per-user, per-frame average channel gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGains {
    users: usize,
    frames: usize,
    nu: f64,
    /// `[user][frame]`
    sigma2: Vec<Vec<f64>>,
    /// `[user][frame]`, present when gains were generated from distances.
    distances: Option<Vec<Vec<f64>>>,
}

impl ScenarioGains {
    /// Wraps explicit gains, given as `[user][frame]`.
    pub fn from_sigma2(sigma2: Vec<Vec<f64>>) -> Result<Self> {
        let users = sigma2.len();
        let frames = sigma2.first().map_or(0, Vec::len);
        if users == 0 || frames == 0 || sigma2.iter().any(|row| row.len() != frames) {
            return domain("gain matrix must be non-empty and rectangular");
        }
        if sigma2.iter().flatten().any(|&g| !(g > 0.0 && g.is_finite())) {
            return domain("average channel gains must be positive and finite");
        }
        Ok(ScenarioGains { users, frames, nu: DEFAULT_PATH_LOSS_EXPONENT, sigma2, distances: None })
    }

    /// Gains constant across `frames` frames.
    pub fn constant(per_user: &[f64], frames: usize) -> Result<Self> {
        Self::from_sigma2(per_user.iter().map(|&g| vec![g; frames]).collect())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sigma2(&self, user: usize, frame: usize) -> f64 {
        self.sigma2[user][frame]
    }

    /// Gains of every user in one frame.
    pub fn frame(&self, frame: usize) -> Vec<f64> {
        self.sigma2.iter().map(|row| row[frame]).collect()
    }

    pub fn distance(&self, user: usize, frame: usize) -> Option<f64> {
        self.distances.as_ref().map(|d| d[user][frame])
    }
}

/// `(d0 / d)^nu` for a distance given as a fraction of `d0`.
pub fn path_loss_gain(distance: f64, nu: f64) -> Result<f64> {
    if !(distance > 0.0 && distance <= 1.0) {
        return domain(format!("distance must lie in (0, d0], got {distance} d0"));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return domain(format!("path-loss exponent must be positive, got {nu}"));
    }
    Ok(distance.recip().powf(nu))
}

fn uniform_in(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    // (lo, hi]
    hi - rng.random::<f64>() * (hi - lo)
}

fn draw_distances(params: &ScenarioParams, seed: u64, block: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, Domain::Distances, block, 0);
    let users = params.users;
    match params.cap {
        None => (0..users).map(|_| uniform_in(&mut rng, MIN_DISTANCE, 1.0)).collect(),
        Some(cap) => {
            let near = cap.near_count(users);
            let mut order: Vec<usize> = (0..users).collect();
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
            let mut d = vec![0.0; users];
            for (rank, &user) in order.iter().enumerate() {
                d[user] = if rank < near {
                    uniform_in(&mut rng, MIN_DISTANCE, NEAR_DISTANCE)
                } else {
                    // (0.1, 1]; the open end keeps far users strictly below 1000
                    uniform_in(&mut rng, NEAR_DISTANCE, 1.0).max(NEAR_DISTANCE * (1.0 + 1e-12))
                };
            }
            d
        }
    }
}

/// Generates average gains for every user and frame.
pub fn build_scenario(params: &ScenarioParams, seed: u64) -> Result<ScenarioGains> {
    params.validate()?;
    let (users, frames) = (params.users, params.frames);
    let refresh = match params.kind {
        ScenarioKind::Equal => {
            let mut gains = ScenarioGains::constant(&vec![1.0; users], frames)?;
            gains.nu = params.nu;
            return Ok(gains);
        }
        ScenarioKind::Unequal => frames,
        ScenarioKind::Variable { refresh } => refresh,
    };

    let mut distances = vec![vec![0.0; frames]; users];
    for block_start in (0..frames).step_by(refresh) {
        let d = draw_distances(params, seed, (block_start / refresh) as u64);
        let block_end = (block_start + refresh).min(frames);
        for (user, &dj) in d.iter().enumerate() {
            distances[user][block_start..block_end].fill(dj);
        }
    }
    let sigma2 = distances
        .iter()
        .map(|row| row.iter().map(|&d| path_loss_gain(d, params.nu)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioGains { users, frames, nu: params.nu, sigma2, distances: Some(distances) })
}

/// Channel coefficients `h[user][slot][frame]`, shared by uplink and downlink.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingRealization {
    users: usize,
    slots: usize,
    frames: usize,
    /// frame-major: `[frame][slot][user]`
    h: Vec<Complex64>,
}

impl FadingRealization {
    pub fn users(&self) -> usize {
        self.users
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn h(&self, user: usize, slot: usize, frame: usize) -> Complex64 {
        self.h[(frame * self.slots + slot) * self.users + user]
    }

    /// Uplink coefficient `h_{j,r}`.
    pub fn uplink(&self, user: usize, slot: usize, frame: usize) -> Complex64 {
        self.h(user, slot, frame)
    }

    /// Downlink coefficient `h_{r,j}`; identical to the uplink by reciprocity.
    pub fn downlink(&self, user: usize, slot: usize, frame: usize) -> Complex64 {
        self.h(user, slot, frame)
    }

    /// Coefficients of one frame as `[slot][user]`.
    pub fn frame(&self, frame: usize) -> FrameChannels {
        let n = self.slots * self.users;
        FrameChannels { users: self.users, h: self.h[frame * n..(frame + 1) * n].to_vec() }
    }
}

/// Channel coefficients of a single frame, `[slot][user]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameChannels {
    users: usize,
    h: Vec<Complex64>,
}

impl FrameChannels {
    /// Builds a frame from `[slot][user]` coefficients.
    pub fn new(per_slot: Vec<Vec<Complex64>>) -> Result<Self> {
        let users = per_slot.first().map_or(0, Vec::len);
        if users == 0 || per_slot.iter().any(|s| s.len() != users) {
            return domain("frame channels must be non-empty and rectangular");
        }
        Ok(FrameChannels { users, h: per_slot.into_iter().flatten().collect() })
    }

    /// A frame where every user sees the same real coefficient in every slot.
    pub fn uniform(users: usize, slots: usize, h: f64) -> Self {
        FrameChannels { users, h: vec![Complex64::new(h, 0.0); users * slots] }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn slots(&self) -> usize {
        self.h.len() / self.users
    }

    pub fn h(&self, user: usize, slot: usize) -> Complex64 {
        self.h[slot * self.users + user]
    }

    /// `|h|^2` for `user` in `slot`.
    pub fn gain(&self, user: usize, slot: usize) -> f64 {
        self.h(user, slot).norm_sqr()
    }

    /// All users' coefficients in one slot.
    pub fn slot(&self, slot: usize) -> &[Complex64] {
        &self.h[slot * self.users..(slot + 1) * self.users]
    }

    pub fn set(&mut self, user: usize, slot: usize, h: Complex64) {
        self.h[slot * self.users + user] = h;
    }
}

fn rayleigh(seed: u64, frame: usize, slot: usize, user: usize, sigma2: f64) -> Complex64 {
    let mut rng = rng::stream(seed, Domain::Fading, frame as u64, ((slot as u64) << 12) | user as u64);
    let scale = (0.5 * sigma2).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Draws the `L x (L-1)` coefficients of one frame.
pub fn draw_frame(gains: &ScenarioGains, frame: usize, seed: u64) -> FrameChannels {
    let users = gains.users;
    let slots = users - 1;
    let mut h = Vec::with_capacity(users * slots);
    for slot in 0..slots {
        for user in 0..users {
            h.push(rayleigh(seed, frame, slot, user, gains.sigma2[user][frame]));
        }
    }
    FrameChannels { users, h }
}

/// Draws every coefficient of the scenario. Pure in `(gains, seed)`.
pub fn draw_fading(gains: &ScenarioGains, seed: u64) -> Result<FadingRealization> {
    if gains.users < 2 {
        return domain("fading needs at least two users");
    }
    if gains.sigma2.iter().flatten().any(|&g| !(g > 0.0)) {
        return domain("average channel gains must be positive");
    }
    let h = (0..gains.frames).flat_map(|f| draw_frame(gains, f, seed).h).collect();
    Ok(FadingRealization { users: gains.users, slots: gains.users - 1, frames: gains.frames, h })
}
