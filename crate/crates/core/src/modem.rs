//! Square M-QAM mapping, network-coded relay decoding and message extraction.
//!
//! A QAM symbol is treated as two independent `sqrt(M)`-PAM dimensions.
//! Message `w` maps to digits `(w / s, w % s)` with `s = sqrt(M)`, and digit
//! `v` maps to level `2v - (s - 1)`. The relay decodes the per-dimension
//! modulo-`s` sum of the two paired users' digits.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::pairing::PairingSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constellation {
    order: usize,
    side: usize,
}

impl Constellation {
    /// Square constellation of `order` points (4, 16, 64, ...).
    pub fn new(order: usize) -> Result<Self> {
        let side = (order as f64).sqrt().round() as usize;
        if order < 4 || side * side != order {
            return Err(Error::Config(format!("mod_order must be a perfect square >= 4, got {order}")));
        }
        Ok(Constellation { order, side })
    }

    pub fn from_side(side: usize) -> Result<Self> {
        Self::new(side * side)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `sqrt(M)`, the number of PAM levels per dimension.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Average symbol energy per PAM dimension, `(M - 1) / 3`.
    pub fn e_av(&self) -> f64 {
        (self.order as f64 - 1.0) / 3.0
    }

    /// PAM level of digit `v`.
    pub fn level(&self, v: usize) -> f64 {
        2.0 * v as f64 - (self.side as f64 - 1.0)
    }

    pub fn modulate(&self, w: usize) -> QamSymbol {
        debug_assert!(w < self.order);
        QamSymbol { i: w / self.side, q: w % self.side }
    }

    pub fn point(&self, sym: QamSymbol) -> Complex64 {
        Complex64::new(self.level(sym.i), self.level(sym.q))
    }
}

/// Per-dimension digits of a QAM symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QamSymbol {
    pub i: usize,
    pub q: usize,
}

impl QamSymbol {
    pub fn message(&self, side: usize) -> usize {
        self.i * side + self.q
    }
}

/// Network-coded residue of one dimension.
pub fn nc_class(w_a: usize, w_b: usize, side: usize) -> usize {
    (w_a + w_b) % side
}

/// Per-dimension network-coded symbol of two messages.
pub fn nc_symbol(a: QamSymbol, b: QamSymbol, side: usize) -> QamSymbol {
    QamSymbol { i: nc_class(a.i, b.i, side), q: nc_class(a.q, b.q, side) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelayMode {
    /// Minimum distance over every pair of transmitted levels.
    JointMl,
    /// Nearest point of the uniform superimposed constellation scaled by the
    /// weaker amplitude.
    #[default]
    AnalysisMatched,
}

impl RelayMode {
    pub fn name(&self) -> &'static str {
        match self {
            RelayMode::JointMl => "joint-ml",
            RelayMode::AnalysisMatched => "analysis-matched",
        }
    }
}

impl fmt::Display for RelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelayMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "joint-ml" | "jointml" | "ml" => Ok(RelayMode::JointMl),
            "analysis-matched" | "analysismatched" | "matched" => Ok(RelayMode::AnalysisMatched),
            _ => Err(format!("unknown relay mode '{s}' (expected joint-ml or analysis-matched)")),
        }
    }
}

/// Decodes the network-coded residue from one real dimension `r` received
/// with effective amplitudes `amp_a`, `amp_b`.
pub fn relay_decode_dim(r: f64, amp_a: f64, amp_b: f64, c: &Constellation, mode: RelayMode) -> Result<usize> {
    if !(amp_a > 0.0 && amp_b > 0.0) {
        return domain(format!("relay amplitudes must be positive, got {amp_a} and {amp_b}"));
    }
    let s = c.side;
    Ok(match mode {
        RelayMode::JointMl => {
            let mut best = (f64::INFINITY, usize::MAX);
            for va in 0..s {
                let la = amp_a * c.level(va);
                for vb in 0..s {
                    let d = r - la - amp_b * c.level(vb);
                    let cand = (d * d, nc_class(va, vb, s));
                    if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                        best = cand;
                    }
                }
            }
            best.1
        }
        RelayMode::AnalysisMatched => {
            let top = 2 * s - 2;
            let u = (r / amp_a.min(amp_b) + top as f64) / 2.0;
            let below = u.floor();
            let k = if u - below == 0.5 {
                let (lo, hi) = (below as i64, below as i64 + 1);
                let clamp = |k: i64| k.clamp(0, top as i64) as usize;
                let (lo, hi) = (clamp(lo), clamp(hi));
                if lo % s <= hi % s { lo } else { hi }
            } else {
                u.round().clamp(0.0, top as f64) as usize
            };
            k % s
        }
    })
}

/// Symbol-level relay decision on a co-phased complex sample.
pub fn relay_decode_nc(r: Complex64, amp_a: f64, amp_b: f64, c: &Constellation, mode: RelayMode) -> Result<QamSymbol> {
    Ok(QamSymbol { i: relay_decode_dim(r.re, amp_a, amp_b, c, mode)?, q: relay_decode_dim(r.im, amp_a, amp_b, c, mode)? })
}

/// Nearest PAM digit to `y / amp`; midpoints resolve to the smaller level.
pub fn user_decode_dim(y: f64, amp: f64, c: &Constellation) -> usize {
    let t = (y / amp + (c.side as f64 - 1.0)) / 2.0;
    (t - 0.5).ceil().clamp(0.0, (c.side - 1) as f64) as usize
}

pub fn user_decode_pam(y: Complex64, amp: f64, c: &Constellation) -> Result<QamSymbol> {
    if !(amp > 0.0) {
        return domain(format!("user amplitude must be positive, got {amp}"));
    }
    Ok(QamSymbol { i: user_decode_dim(y.re, amp, c), q: user_decode_dim(y.im, amp, c) })
}

/// Order in which one user recovers the other users' messages.
///
/// Each step `(slot, known, target)` recovers `target` from the slot's
/// network-coded symbol and the already known message of `known`. Steps
/// follow a breadth-first walk of the pairing tree from the decoding user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionPlan {
    user: usize,
    steps: Vec<(usize, usize, usize)>,
}

impl ExtractionPlan {
    pub fn new(schedule: &PairingSchedule, user: usize) -> Result<Self> {
        let l = schedule.users();
        if user >= l {
            return Err(Error::Schedule(format!("user {user} out of range for {l} users")));
        }
        let mut known = vec![false; l];
        known[user] = true;
        let mut queue = VecDeque::from([user]);
        let mut steps = Vec::with_capacity(l - 1);
        while let Some(u) = queue.pop_front() {
            for (slot, &(a, b)) in schedule.slots().iter().enumerate() {
                let other = if a == u { b } else if b == u { a } else { continue };
                if !known[other] {
                    known[other] = true;
                    steps.push((slot, u, other));
                    queue.push_back(other);
                }
            }
        }
        if steps.len() != l - 1 {
            return Err(Error::Schedule("pairing does not connect every user".into()));
        }
        Ok(ExtractionPlan { user, steps })
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn steps(&self) -> &[(usize, usize, usize)] {
        &self.steps
    }

    /// Recovers every user's digit in one dimension; `out[user] = own`.
    pub fn apply(&self, own: usize, decoded: &[usize], side: usize, out: &mut [usize]) {
        out[self.user] = own;
        for &(slot, from, to) in &self.steps {
            out[to] = (decoded[slot] + side - out[from]) % side;
        }
    }
}

/// Extracts all messages at `user` from the network-coded symbols it decoded
/// in every slot. Returns one estimate per user, including its own message.
pub fn extract_messages(
    schedule: &PairingSchedule,
    user: usize,
    own: QamSymbol,
    decoded_nc: &[QamSymbol],
    c: &Constellation,
) -> Result<Vec<QamSymbol>> {
    let slots = schedule.slots().len();
    if decoded_nc.len() != slots {
        return Err(Error::Schedule(format!("expected {slots} decoded slots, got {}", decoded_nc.len())));
    }
    let plan = ExtractionPlan::new(schedule, user)?;
    let l = schedule.users();
    let (mut i_out, mut q_out) = (vec![0; l], vec![0; l]);
    let i_dec: Vec<usize> = decoded_nc.iter().map(|s| s.i).collect();
    let q_dec: Vec<usize> = decoded_nc.iter().map(|s| s.q).collect();
    plan.apply(own.i, &i_dec, c.side, &mut i_out);
    plan.apply(own.q, &q_dec, c.side, &mut q_out);
    Ok(i_out.into_iter().zip(q_out).map(|(i, q)| QamSymbol { i, q }).collect())
}
