//! Statistical properties of simulation campaigns.

use mwrn::channel::ScenarioKind;
use mwrn::montecarlo::{run_campaign, CampaignConfig};
use mwrn::pairing::PairingScheme;

fn cfg(scheme: PairingScheme, frames: usize, snr: &[f64]) -> CampaignConfig {
    CampaignConfig { scheme, frames, snr_db: snr.to_vec(), ..CampaignConfig::default() }
}

#[test]
fn common_user_beats_chain_end_user_fivefold() {
    let p = run_campaign(&cfg(PairingScheme::Proposed, 100, &[25.0])).unwrap();
    let c = run_campaign(&cfg(PairingScheme::Consecutive, 100, &[25.0])).unwrap();
    let ratio = p.points[0].common.unwrap().ser / c.points[0].end_user.ser;
    assert!((ratio - 0.2).abs() <= 0.15 * 0.2, "ratio {ratio}");
}

#[test]
fn other_users_never_beat_the_common_user() {
    let r = run_campaign(&CampaignConfig { frames: 40, symbols: 200, ..CampaignConfig::default() }).unwrap();
    for p in &r.points {
        assert!(p.other.ser >= p.common.unwrap().ser, "{} dB", p.snr_db);
    }
}

#[test]
fn tallies_cover_every_slot_and_symbol() {
    let c = CampaignConfig { users: 5, frames: 7, symbols: 30, scenario: ScenarioKind::Unequal, snr_db: vec![10.0], ..CampaignConfig::default() };
    let r = run_campaign(&c).unwrap();
    let t = &r.points[0].tally;
    for f in &t.frames {
        assert_eq!(f.total, 4 * 30);
        assert!(f.wrong.iter().all(|&w| w <= f.total));
    }
    assert!(t.total.iter().all(|&n| n == 7 * 4 * 30));
}

#[test]
fn doubling_frames_shrinks_stderr_by_root_two() {
    let small = run_campaign(&cfg(PairingScheme::Proposed, 100, &[20.0])).unwrap();
    let large = run_campaign(&CampaignConfig { seed: 2, ..cfg(PairingScheme::Proposed, 200, &[20.0]) }).unwrap();
    let ratio = small.points[0].other.stderr / large.points[0].other.stderr;
    assert!((1.15..1.7).contains(&ratio), "stderr ratio {ratio}");
}
