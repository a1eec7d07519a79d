//! C ABI over the `mwrn` crate.
//!
//! Every fallible function returns an [`MwrnStatus`]. On failure the message
//! is available from [`mwrn_last_error`] on the same thread until the next
//! failing call. Handles are opaque and owned by the caller, who releases
//! them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mwrn::channel::ScenarioKind;
use mwrn::modem::RelayMode;
use mwrn::montecarlo::{run_campaign, CampaignConfig, CampaignResult};
use mwrn::pairing::{build_schedule, FairnessPolicy, PairingScheme};
use mwrn::rates::avg_rate_bounds;
use mwrn::ser::{derive_coeff_tables, p_pam_nc, CoeffTables};
use mwrn::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwrnStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Config = 3,
    Schedule = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwrnScheme {
    Proposed = 0,
    Consecutive = 1,
    Mirror = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwrnScenario {
    Equal = 0,
    Unequal = 1,
    /// Gains redrawn every frame.
    Variable = 2,
}

impl From<MwrnScheme> for PairingScheme {
    fn from(s: MwrnScheme) -> Self {
        match s {
            MwrnScheme::Proposed => PairingScheme::Proposed,
            MwrnScheme::Consecutive => PairingScheme::Consecutive,
            MwrnScheme::Mirror => PairingScheme::Mirror,
        }
    }
}

impl From<MwrnScenario> for ScenarioKind {
    fn from(s: MwrnScenario) -> Self {
        match s {
            MwrnScenario::Equal => ScenarioKind::Equal,
            MwrnScenario::Unequal => ScenarioKind::Unequal,
            MwrnScenario::Variable => ScenarioKind::Variable { refresh: 1 },
        }
    }
}

/// Opaque coefficient tables for one PAM size.
pub struct MwrnCoeffTables(CoeffTables);

/// Opaque simulation campaign result.
pub struct MwrnCampaign(CampaignResult);

/// Campaign settings. `joint_ml` selects the unconstrained relay detector.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MwrnCampaignSpec {
    pub users: usize,
    pub frames: usize,
    pub symbols: usize,
    pub mod_order: usize,
    pub scheme: MwrnScheme,
    pub scenario: MwrnScenario,
    pub seed: u64,
    pub joint_ml: bool,
}

/// Simulated SER at one SNR point. `common_ser` is NaN for chain schemes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MwrnSimPoint {
    pub snr_db: f64,
    pub common_ser: f64,
    pub other_ser: f64,
    pub other_stderr: f64,
    pub other_events: u64,
    pub unreliable: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: MwrnStatus, msg: impl Into<String>) -> MwrnStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> MwrnStatus {
    let status = match &e {
        Error::Domain(_) => MwrnStatus::Domain,
        Error::Config(_) | Error::Parse { .. } => MwrnStatus::Config,
        Error::Schedule(_) => MwrnStatus::Schedule,
        Error::Io(_) | Error::Csv(_) => MwrnStatus::Io,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), MwrnStatus>) -> MwrnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MwrnStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(MwrnStatus::Panic, "internal panic"),
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), MwrnStatus> {
    if p.is_null() {
        Err(fail(MwrnStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mwrn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Gaussian tail probability `Q(x)`.
#[no_mangle]
pub extern "C" fn mwrn_q_function(x: f64) -> f64 {
    mwrn::special::q_function(x)
}

/// Derives the coefficient tables for `side`-PAM (`side` = sqrt(M)).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn mwrn_coeff_tables_new(side: usize, out: *mut *mut MwrnCoeffTables) -> MwrnStatus {
    guard(|| {
        non_null(out, "out")?;
        let t = derive_coeff_tables(side).map_err(from_error)?;
        *out = Box::into_raw(Box::new(MwrnCoeffTables(t)));
        Ok(())
    })
}

/// # Safety
/// `tables` must be null or a handle from [`mwrn_coeff_tables_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mwrn_coeff_tables_free(tables: *mut MwrnCoeffTables) {
    if !tables.is_null() {
        drop(Box::from_raw(tables));
    }
}

/// Relay coefficient `a[p][q][u]` as `num / den`; `u` is odd.
///
/// # Safety
/// `tables` must be a live handle; `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mwrn_coeff_a(
    tables: *const MwrnCoeffTables,
    p: usize,
    q: usize,
    u: usize,
    num: *mut i64,
    den: *mut i64,
) -> MwrnStatus {
    guard(|| {
        non_null(tables, "tables")?;
        non_null(num, "num")?;
        non_null(den, "den")?;
        let t = &(*tables).0;
        let s = t.side();
        if p >= s || q >= s || u.is_multiple_of(2) || u > 2 * (2 * s - 2) - 1 {
            return Err(fail(MwrnStatus::Domain, format!("index ({p}, {q}, {u}) outside the table")));
        }
        let r = t.a(p, q, u);
        *num = *r.numer();
        *den = *r.denom();
        Ok(())
    })
}

/// Probability of a wrong network-coded residue in one PAM dimension.
///
/// # Safety
/// `tables` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mwrn_p_pam_nc(
    tables: *const MwrnCoeffTables,
    gamma_r: f64,
    gamma_user: f64,
    out: *mut f64,
) -> MwrnStatus {
    guard(|| {
        non_null(tables, "tables")?;
        non_null(out, "out")?;
        *out = p_pam_nc(gamma_r, gamma_user, &(*tables).0).map_err(from_error)?;
        Ok(())
    })
}

/// Writes the `users - 1` slot pairs as `pairs[2k], pairs[2k + 1]`.
/// `common` is ignored by chain schemes; pass -1 for none.
///
/// # Safety
/// `pairs` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mwrn_build_schedule(
    scheme: MwrnScheme,
    users: usize,
    common: isize,
    pairs: *mut usize,
    len: usize,
) -> MwrnStatus {
    guard(|| {
        non_null(pairs, "pairs")?;
        let common = usize::try_from(common).ok();
        let s = build_schedule(scheme.into(), users, common).map_err(from_error)?;
        let need = 2 * s.slots().len();
        if len < need {
            return Err(fail(MwrnStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        let out = std::slice::from_raw_parts_mut(pairs, need);
        for (k, &(a, b)) in s.slots().iter().enumerate() {
            out[2 * k] = a;
            out[2 * k + 1] = b;
        }
        Ok(())
    })
}

/// Closed-form average common and sum rate bounds for average gains `sigma2`.
///
/// # Safety
/// `sigma2` must hold `users` values; `common_rate` and `sum_rate` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mwrn_rate_bounds(
    scheme: MwrnScheme,
    sigma2: *const f64,
    users: usize,
    power: f64,
    n0: f64,
    scaled: bool,
    common_rate: *mut f64,
    sum_rate: *mut f64,
) -> MwrnStatus {
    guard(|| {
        non_null(sigma2, "sigma2")?;
        non_null(common_rate, "common_rate")?;
        non_null(sum_rate, "sum_rate")?;
        let g = std::slice::from_raw_parts(sigma2, users);
        let b = avg_rate_bounds(scheme.into(), g, power, n0, scaled).map_err(from_error)?;
        *common_rate = b.common_rate;
        *sum_rate = b.sum_rate;
        Ok(())
    })
}

/// Runs a simulation campaign over `n_snr` SNR points (dB, ascending).
///
/// # Safety
/// `spec` must be valid, `snr_db` must hold `n_snr` values and `out` must be
/// valid for one handle write.
#[no_mangle]
pub unsafe extern "C" fn mwrn_campaign_run(
    spec: *const MwrnCampaignSpec,
    snr_db: *const f64,
    n_snr: usize,
    out: *mut *mut MwrnCampaign,
) -> MwrnStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(snr_db, "snr_db")?;
        non_null(out, "out")?;
        let s = *spec;
        let cfg = CampaignConfig {
            users: s.users,
            frames: s.frames,
            symbols: s.symbols,
            order: s.mod_order,
            scheme: s.scheme.into(),
            scenario: s.scenario.into(),
            snr_db: std::slice::from_raw_parts(snr_db, n_snr).to_vec(),
            relay_mode: if s.joint_ml { RelayMode::JointMl } else { RelayMode::AnalysisMatched },
            seed: s.seed,
            fairness: FairnessPolicy::default(),
            ..CampaignConfig::default()
        };
        let r = run_campaign(&cfg).map_err(from_error)?;
        *out = Box::into_raw(Box::new(MwrnCampaign(r)));
        Ok(())
    })
}

/// Number of SNR points in a campaign result; 0 for null.
///
/// # Safety
/// `campaign` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mwrn_campaign_len(campaign: *const MwrnCampaign) -> usize {
    campaign.as_ref().map_or(0, |c| c.0.points.len())
}

/// # Safety
/// `campaign` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mwrn_campaign_point(campaign: *const MwrnCampaign, index: usize, out: *mut MwrnSimPoint) -> MwrnStatus {
    guard(|| {
        non_null(campaign, "campaign")?;
        non_null(out, "out")?;
        let pts = &(*campaign).0.points;
        let p = pts
            .get(index)
            .ok_or_else(|| fail(MwrnStatus::Domain, format!("point {index} of {}", pts.len())))?;
        *out = MwrnSimPoint {
            snr_db: p.snr_db,
            common_ser: p.common.map_or(f64::NAN, |c| c.ser),
            other_ser: p.other.ser,
            other_stderr: p.other.stderr,
            other_events: p.other.n_events,
            unreliable: p.other.unreliable() || p.common.is_some_and(|c| c.unreliable()),
        };
        Ok(())
    })
}

/// # Safety
/// `campaign` must be null or a handle from [`mwrn_campaign_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mwrn_campaign_free(campaign: *mut MwrnCampaign) {
    if !campaign.is_null() {
        drop(Box::from_raw(campaign));
    }
}
