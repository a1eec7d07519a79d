use std::ffi::CStr;
use std::ptr;

use mwrn_ffi::*;

fn last_error() -> String {
    let p = mwrn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn q_function_reference_value() {
    assert!((mwrn_q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
}

#[test]
fn coefficient_handle_lifecycle() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(mwrn_coeff_tables_new(4, &mut t), MwrnStatus::Ok);
        let (mut num, mut den) = (0i64, 0i64);
        assert_eq!(mwrn_coeff_a(t, 0, 0, 1, &mut num, &mut den), MwrnStatus::Ok);
        assert_eq!((num, den), (-7, 4));
        assert_eq!(mwrn_coeff_a(t, 0, 0, 2, &mut num, &mut den), MwrnStatus::Domain);

        let mut p = 0.0;
        assert_eq!(mwrn_p_pam_nc(t, 10.0, 10.0, &mut p), MwrnStatus::Ok);
        assert!(p > 0.0 && p < 0.1);
        assert_eq!(mwrn_p_pam_nc(t, -1.0, 10.0, &mut p), MwrnStatus::Domain);
        assert!(last_error().contains("relay SNR must be positive"));
        mwrn_coeff_tables_free(t);
        mwrn_coeff_tables_free(ptr::null_mut());
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        assert_eq!(mwrn_coeff_tables_new(4, ptr::null_mut()), MwrnStatus::NullPointer);
        assert!(last_error().contains("out"));
        let mut p = 0.0;
        assert_eq!(mwrn_p_pam_nc(ptr::null(), 1.0, 1.0, &mut p), MwrnStatus::NullPointer);
        assert_eq!(mwrn_campaign_len(ptr::null()), 0);
    }
}

#[test]
fn schedules_through_the_abi() {
    let mut pairs = [0usize; 6];
    unsafe {
        assert_eq!(mwrn_build_schedule(MwrnScheme::Mirror, 4, -1, pairs.as_mut_ptr(), 6), MwrnStatus::Ok);
        assert_eq!(pairs, [0, 3, 1, 2, 3, 1]);
        assert_eq!(mwrn_build_schedule(MwrnScheme::Proposed, 4, 2, pairs.as_mut_ptr(), 6), MwrnStatus::Ok);
        assert!(pairs.chunks(2).all(|p| p.contains(&2)));
        assert_eq!(mwrn_build_schedule(MwrnScheme::Proposed, 4, -1, pairs.as_mut_ptr(), 6), MwrnStatus::Schedule);
        assert_eq!(mwrn_build_schedule(MwrnScheme::Consecutive, 4, -1, pairs.as_mut_ptr(), 5), MwrnStatus::BufferTooSmall);
    }
}

#[test]
fn rate_bounds_match_the_library() {
    let g = [1.0, 0.5, 2.0, 0.25];
    let (mut c, mut s) = (0.0, 0.0);
    unsafe {
        assert_eq!(mwrn_rate_bounds(MwrnScheme::Proposed, g.as_ptr(), 4, 1.0, 0.1, true, &mut c, &mut s), MwrnStatus::Ok);
    }
    let want = mwrn::rates::avg_rate_bounds(mwrn::pairing::PairingScheme::Proposed, &g, 1.0, 0.1, true).unwrap();
    assert_eq!((c, s), (want.common_rate, want.sum_rate));
}

#[test]
fn campaign_handle_reports_points() {
    let spec = MwrnCampaignSpec {
        users: 4,
        frames: 5,
        symbols: 40,
        mod_order: 16,
        scheme: MwrnScheme::Proposed,
        scenario: MwrnScenario::Equal,
        seed: 9,
        joint_ml: false,
    };
    let snr = [10.0, 20.0];
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(mwrn_campaign_run(&spec, snr.as_ptr(), 2, &mut c), MwrnStatus::Ok);
        assert_eq!(mwrn_campaign_len(c), 2);
        let mut p = MwrnSimPoint::default();
        assert_eq!(mwrn_campaign_point(c, 1, &mut p), MwrnStatus::Ok);
        assert_eq!(p.snr_db, 20.0);
        assert!(p.common_ser.is_finite() && p.other_ser >= 0.0);
        assert_eq!(mwrn_campaign_point(c, 2, &mut p), MwrnStatus::Domain);
        mwrn_campaign_free(c);

        let bad = MwrnCampaignSpec { mod_order: 15, ..spec };
        let mut c = ptr::null_mut();
        assert_eq!(mwrn_campaign_run(&bad, snr.as_ptr(), 2, &mut c), MwrnStatus::Config);
        assert!(last_error().contains("mod_order must be a perfect square"));
        assert!(c.is_null());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/mwrn.h");
    for f in [
        "mwrn_last_error",
        "mwrn_q_function",
        "mwrn_coeff_tables_new",
        "mwrn_coeff_tables_free",
        "mwrn_coeff_a",
        "mwrn_p_pam_nc",
        "mwrn_build_schedule",
        "mwrn_rate_bounds",
        "mwrn_campaign_run",
        "mwrn_campaign_len",
        "mwrn_campaign_point",
        "mwrn_campaign_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(&src, "#include \"mwrn.h\"\nint main(void) { return mwrn_q_function(0.0) == 0.5 ? 0 : 1; }\n").unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let o = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
