//! Instantaneous SNRs, rate bounds and their Jensen-averaged closed forms.
//!
//! All logarithms are base 2. Per-user transmit powers enter every formula
//! as `P_user |h_user|^2`, which covers both the unscaled case and the
//! fairness-scaled common user. Raw values may be negative at very low SNR;
//! use [`clamp_rate`] when reporting curves.

use num_complex::Complex64;

use crate::channel::FrameChannels;
use crate::error::{domain, Result};
use crate::pairing::{self, FairnessPolicy, PairingSchedule, PairingScheme};
use crate::channel::ScenarioKind;

/// Powers and noise of one link; all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_a: f64,
    pub p_b: f64,
    pub p_r: f64,
    pub n0: f64,
}

impl LinkBudget {
    pub fn new(p_a: f64, p_b: f64, p_r: f64, n0: f64) -> Result<Self> {
        let budget = LinkBudget { p_a, p_b, p_r, n0 };
        if [p_a, p_b, p_r, n0].iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return domain(format!("link budget entries must be positive: {budget:?}"));
        }
        Ok(budget)
    }
}

/// Noise power for an SNR per bit given in dB, with unit transmit power.
pub fn n0_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn clamp_rate(rate: f64) -> f64 {
    rate.max(0.0)
}

/// Relay scaling factor maximising the lattice SNR.
pub fn optimal_alpha(h_a: Complex64, h_b: Complex64, p_a: f64, p_b: f64, n0: f64) -> f64 {
    let s = p_a * h_a.norm_sqr() + p_b * h_b.norm_sqr();
    s / (s + n0)
}

/// User scaling factor maximising the downlink SNR.
pub fn optimal_beta(h: Complex64, p_r: f64, n0: f64) -> f64 {
    let s = p_r * h.norm_sqr();
    s / (s + n0)
}

pub fn snr_relay_lattice(h_a: Complex64, h_b: Complex64, p_a: f64, p_b: f64, n0: f64, alpha: f64) -> f64 {
    let (ra, rb) = (p_a * h_a.norm_sqr(), p_b * h_b.norm_sqr());
    ra.min(rb) / (alpha * alpha * n0 + (alpha - 1.0).powi(2) * (ra + rb))
}

pub fn snr_user(h: Complex64, p_r: f64, n0: f64, beta: f64) -> f64 {
    let s = p_r * h.norm_sqr();
    s / (beta * beta * n0 + (beta - 1.0).powi(2) * s)
}

/// The two log arguments of the multiple-access bound, from received powers
/// `r_a = P_a |h_a|^2` and `r_b = P_b |h_b|^2`.
fn mac_arguments(r_a: f64, r_b: f64, n0: f64) -> (f64, f64) {
    let total = r_a + r_b;
    (r_a / total + r_a / n0, r_b / total + r_b / n0)
}

fn mac_bound_from_powers(r_a: f64, r_b: f64, n0: f64) -> f64 {
    let (x_a, x_b) = mac_arguments(r_a, r_b, n0);
    0.5 * x_a.min(x_b).log2()
}

/// Upper bound on the multiple-access rate of one pair (bits per channel use).
pub fn rate_mac_bound(h_a: Complex64, h_b: Complex64, p_a: f64, p_b: f64, n0: f64) -> f64 {
    mac_bound_from_powers(p_a * h_a.norm_sqr(), p_b * h_b.norm_sqr(), n0)
}

/// Upper bound on the broadcast rate to all users in one slot.
pub fn rate_bc_bound(h_all: &[Complex64], p_r: f64, n0: f64) -> f64 {
    let min_gain = h_all.iter().map(|h| h.norm_sqr()).fold(f64::INFINITY, f64::min);
    0.5 * (1.0 + p_r * min_gain / n0).log2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub common_rate: f64,
    pub sum_rate: f64,
    pub per_slot_mac: Vec<f64>,
    pub per_slot_bc: Vec<f64>,
}

/// Common rate, sum rate and per-slot bounds of one frame.
pub fn frame_rates(channels: &FrameChannels, schedule: &PairingSchedule, p_r: f64, n0: f64) -> RateResult {
    let slots = schedule.slots().len();
    let mut per_slot_mac = Vec::with_capacity(slots);
    let mut per_slot_bc = Vec::with_capacity(slots);
    let mut log_sum = 0.0;
    for (slot, &(a, b)) in schedule.slots().iter().enumerate() {
        let r_a = schedule.tx_power(a) * channels.gain(a, slot);
        let r_b = schedule.tx_power(b) * channels.gain(b, slot);
        let (x_a, x_b) = mac_arguments(r_a, r_b, n0);
        log_sum += x_a.log2() + x_b.log2();
        per_slot_mac.push(0.5 * x_a.min(x_b).log2());
        per_slot_bc.push(rate_bc_bound(channels.slot(slot), p_r, n0));
    }
    let bottleneck = per_slot_mac.iter().zip(&per_slot_bc).map(|(m, b)| m.min(*b)).fold(f64::INFINITY, f64::min);
    RateResult {
        common_rate: bottleneck / slots as f64,
        sum_rate: log_sum / (2.0 * slots as f64),
        per_slot_mac,
        per_slot_bc,
    }
}

pub fn common_rate(channels: &FrameChannels, schedule: &PairingSchedule, p_r: f64, n0: f64) -> f64 {
    frame_rates(channels, schedule, p_r, n0).common_rate
}

pub fn sum_rate(channels: &FrameChannels, schedule: &PairingSchedule, p_r: f64, n0: f64) -> f64 {
    frame_rates(channels, schedule, p_r, n0).sum_rate
}

/// Closed-form upper bounds on the average common and sum rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub common_rate: f64,
    pub sum_rate: f64,
}

/// Jensen bounds obtained by replacing every `|h|^2` with its mean `sigma^2`.
///
/// The common-user scheme serves the strongest user as common user. With
/// `scaled`, its power becomes `P_eff / (L - 1)` and every other user's
/// `P_eff = (2L - 2) P`.
pub fn avg_rate_bounds(scheme: PairingScheme, sigma2: &[f64], power: f64, n0: f64, scaled: bool) -> Result<RateBounds> {
    let users = sigma2.len();
    if users < 3 {
        return domain(format!("at least 3 users required, got {users}"));
    }
    if sigma2.iter().any(|&g| !(g > 0.0)) || !(power > 0.0) || !(n0 > 0.0) {
        return domain("gains, power and noise must be positive");
    }
    let common = match scheme {
        PairingScheme::Proposed => Some(pairing::select_common_user(sigma2)?),
        _ => None,
    };
    let policy = if scaled { FairnessPolicy { scale_unequal: true, ..FairnessPolicy::raw() } } else { FairnessPolicy::raw() };
    let powers = pairing::fairness_powers(scheme, ScenarioKind::Unequal, users, power, common, &policy);
    let schedule = pairing::build_schedule(scheme, users, common)?;

    let slots = users - 1;
    let mut worst = f64::INFINITY;
    let mut log_sum = 0.0;
    for &(a, b) in schedule.slots() {
        let (x_a, x_b) = mac_arguments(powers[a] * sigma2[a], powers[b] * sigma2[b], n0);
        worst = worst.min(0.5 * x_a.min(x_b).log2());
        log_sum += x_a.log2() + x_b.log2();
    }
    Ok(RateBounds { common_rate: worst / slots as f64, sum_rate: log_sum / (2.0 * slots as f64) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn alpha_and_beta_examples() {
        assert_relative_eq!(optimal_alpha(re(1.0), re(1.0), 1.0, 1.0, 1.0), 2.0 / 3.0);
        assert_relative_eq!(optimal_alpha(re(3f64.sqrt()), re(1.0), 1.0, 1.0, 2.0), 2.0 / 3.0, epsilon = 1e-15);
        assert!(1.0 - optimal_alpha(re(1.0), re(1.0), 1.0, 1.0, 1e-14) < 1e-13);
        assert_relative_eq!(optimal_beta(re(1.0), 1.0, 1.0), 0.5);
        assert_relative_eq!(optimal_beta(re(3f64.sqrt()), 1.0, 1.0), 0.75, epsilon = 1e-15);
        assert!(1.0 - optimal_beta(re(1.0), 1.0, 1e-14) < 1e-13);
    }

    #[test]
    fn snr_examples() {
        let alpha = optimal_alpha(re(1.0), re(1.0), 1.0, 1.0, 1.0);
        assert_relative_eq!(snr_relay_lattice(re(1.0), re(1.0), 1.0, 1.0, 1.0, alpha), 1.5, epsilon = 1e-14);
        assert_relative_eq!(snr_relay_lattice(re(2f64.sqrt()), re(2.0), 1.0, 1.0, 1.0, 1.0), 2.0, epsilon = 1e-14);
        assert_relative_eq!(snr_user(re(5f64.sqrt()), 1.0, 1.0, 1.0), 5.0, epsilon = 1e-14);
        let beta = optimal_beta(re(1.0), 1.0, 1.0);
        assert_relative_eq!(snr_user(re(1.0), 1.0, 1.0, beta), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn user_snr_monotone_at_optimal_beta() {
        let mut last = 0.0;
        for k in 1..2000 {
            let h = re((k as f64 * 0.01).sqrt());
            let g = snr_user(h, 1.0, 0.3, optimal_beta(h, 1.0, 0.3));
            assert!(g > last);
            last = g;
        }
    }

    #[test]
    fn mac_bound_examples() {
        assert_relative_eq!(rate_mac_bound(re(1.0), re(1.0), 1.0, 1.0, 1.0), 0.5 * 1.5f64.log2(), epsilon = 1e-15);
        assert_relative_eq!(rate_mac_bound(re(1.0), re(1.0), 1.0, 1.0, 1.0), 0.292481250360578, epsilon = 1e-12);
        let (a, b) = (Complex64::new(0.3, 1.1), Complex64::new(-0.7, 0.2));
        assert_eq!(rate_mac_bound(a, b, 1.0, 1.0, 0.1), rate_mac_bound(b, a, 1.0, 1.0, 0.1));
        let n0 = 1e-9;
        let dominant = 0.5 * (b.norm_sqr() / n0).log2();
        assert!((rate_mac_bound(a, b, 1.0, 1.0, n0) - dominant).abs() < 1e-6);
    }

    #[test]
    fn bc_bound_examples() {
        let hs = [re(1.0), re(2.0), Complex64::new(0.0, 1.5)];
        assert_relative_eq!(rate_bc_bound(&hs, 1.0, 1.0), 0.5);
        let mut more = hs.to_vec();
        more.push(re(10.0));
        assert_eq!(rate_bc_bound(&more, 1.0, 1.0), rate_bc_bound(&hs, 1.0, 1.0));
        more.reverse();
        assert_eq!(rate_bc_bound(&more, 1.0, 1.0), rate_bc_bound(&hs, 1.0, 1.0));
    }

    #[test]
    fn identical_channels_give_single_slot_rates() {
        let channels = FrameChannels::uniform(3, 2, 1.0);
        let schedule = pairing::build_schedule(PairingScheme::Consecutive, 3, None).unwrap();
        let r = frame_rates(&channels, &schedule, 1.0, 1.0);
        let mac = rate_mac_bound(re(1.0), re(1.0), 1.0, 1.0, 1.0);
        let bc = rate_bc_bound(&[re(1.0); 3], 1.0, 1.0);
        assert_relative_eq!(r.common_rate, mac.min(bc) / 2.0);
        // two identical slots, two identical log terms each
        assert_relative_eq!(r.sum_rate, 2.0 * 2.0 * 1.5f64.log2() / 4.0);
        assert!(r.common_rate <= r.per_slot_mac.iter().zip(&r.per_slot_bc).map(|(m, b)| m.min(*b)).fold(f64::INFINITY, f64::min) / 2.0);
    }

    #[test]
    fn faded_user_kills_common_rate() {
        let mut channels = FrameChannels::uniform(4, 3, 1.0);
        for slot in 0..3 {
            channels.set(2, slot, re(1e-9));
        }
        let schedule = pairing::build_schedule(PairingScheme::Proposed, 4, Some(0)).unwrap();
        assert!(common_rate(&channels, &schedule, 1.0, 0.01) < 1e-12);
    }

    #[test]
    fn sum_rate_grows_with_gain() {
        let schedule = pairing::build_schedule(PairingScheme::Mirror, 5, None).unwrap();
        let base = sum_rate(&FrameChannels::uniform(5, 4, 1.0), &schedule, 1.0, 0.5);
        let boosted = sum_rate(&FrameChannels::uniform(5, 4, 1.3), &schedule, 1.0, 0.5);
        assert!(boosted > base);
    }

    #[test]
    fn jensen_bounds_equal_gains_agree_across_schemes() {
        let sigma2 = vec![1.0; 10];
        let p = avg_rate_bounds(PairingScheme::Proposed, &sigma2, 1.0, 0.1, false).unwrap();
        for scheme in [PairingScheme::Consecutive, PairingScheme::Mirror] {
            let b = avg_rate_bounds(scheme, &sigma2, 1.0, 0.1, false).unwrap();
            assert_relative_eq!(b.common_rate, p.common_rate, epsilon = 1e-14);
            assert_relative_eq!(b.sum_rate, p.sum_rate, epsilon = 1e-14);
        }
    }

    #[test]
    fn jensen_bound_matches_scaled_closed_form() {
        // common user i = 1, other user l = 2, L = 3
        let sigma2 = [0.4, 5.0, 2.0];
        let (l, n0, p) = (3.0, 0.2, 1.0);
        let b = avg_rate_bounds(PairingScheme::Proposed, &sigma2, p, n0, true).unwrap();
        let term = |si: f64, sl: f64| {
            let common = 1.0 / (1.0 + (l - 1.0) * sl / si) + (2.0 * l - 2.0) * p * si / ((l - 1.0) * n0);
            let other = 1.0 / (1.0 + si / ((l - 1.0) * sl)) + (2.0 * l - 2.0) * p * sl / n0;
            (common, other)
        };
        let (c0, o0) = term(5.0, 0.4);
        let (c2, o2) = term(5.0, 2.0);
        let want_common = c0.min(o0).log2().min(c2.min(o2).log2()) / (2.0 * (l - 1.0));
        let want_sum = (c0.log2() + o0.log2() + c2.log2() + o2.log2()) / (2.0 * (l - 1.0));
        assert_relative_eq!(b.common_rate, want_common, epsilon = 1e-14);
        assert_relative_eq!(b.sum_rate, want_sum, epsilon = 1e-14);
    }

    #[test]
    fn scaled_proposed_bound_beats_chains_for_unequal_gains() {
        let sigma2 = [3.0, 40.0, 1.2, 7.0, 15.0, 2.5];
        for snr_db in [0.0, 10.0, 20.0, 30.0] {
            let n0 = n0_from_snr_db(snr_db);
            let p = avg_rate_bounds(PairingScheme::Proposed, &sigma2, 1.0, n0, true).unwrap();
            for scheme in [PairingScheme::Consecutive, PairingScheme::Mirror] {
                let b = avg_rate_bounds(scheme, &sigma2, 1.0, n0, true).unwrap();
                assert!(p.common_rate >= b.common_rate && p.sum_rate >= b.sum_rate, "{scheme} at {snr_db} dB");
            }
        }
    }
}
