use std::ffi::{CStr, CString};
use std::ptr;

use tinj_ffi::*;

fn last_error() -> String {
    let p = tinj_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    tinj_string_free(s);
    out
}

fn layout(d: u32, variant: i32) -> *mut TinjLayout {
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { tinj_layout_new(d, variant, &mut l) }, TinjStatus::Ok);
    l
}

#[test]
fn layout_handle_round_trips_through_json() {
    unsafe {
        let l = layout(3, TINJ_VARIANT_ROTATED);
        let (mut n, mut nx, mut nz) = (0, 0, 0);
        assert_eq!(tinj_layout_counts(l, &mut n, &mut nx, &mut nz), TinjStatus::Ok);
        assert_eq!((n, nx, nz), (9, 4, 4));
        let mut s = ptr::null_mut();
        assert_eq!(tinj_layout_to_json(l, &mut s), TinjStatus::Ok);
        let json = CString::new(take(s)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(tinj_layout_from_json(json.as_ptr(), &mut back), TinjStatus::Ok);
        let (mut n2, mut nx2, mut nz2) = (0, 0, 0);
        assert_eq!(tinj_layout_counts(back, &mut n2, &mut nx2, &mut nz2), TinjStatus::Ok);
        assert_eq!((n2, nx2, nz2), (9, 4, 4));
        tinj_layout_free(back);
        tinj_layout_free(l);
    }
}

#[test]
fn derived_form_matches_the_library() {
    let lib_layout = tinj::build_unrotated_layout(3).unwrap();
    let t = tinj::Trajectory::parse_for(&lib_layout, "x=000000 z=000011").unwrap();
    let expected = tinj::derive_state(&lib_layout, &t).unwrap();
    unsafe {
        let l = layout(3, TINJ_VARIANT_UNROTATED);
        let traj = CString::new("x=000000 z=000011").unwrap();
        let mut f = ptr::null_mut();
        assert_eq!(tinj_derive(l, traj.as_ptr(), &mut f), TinjStatus::Ok);
        let mut len = 0;
        assert_eq!(tinj_form_num_coefficients(f, &mut len), TinjStatus::Ok);
        assert_eq!(len, 14);
        let (mut a, mut b) = (vec![0i64; len], vec![0i64; len]);
        assert_eq!(tinj_form_coefficients(f, a.as_mut_ptr(), b.as_mut_ptr(), len), TinjStatus::Ok);
        assert_eq!(a, expected.alpha.coeffs());
        assert_eq!(b, expected.beta.coeffs());
        assert_eq!(
            tinj_form_coefficients(f, a.as_mut_ptr(), b.as_mut_ptr(), len - 1),
            TinjStatus::InvalidArgument
        );

        let rot = tinj::amplitude::PhysicalRotation::new(1.1, 0.4).unwrap();
        let want = tinj::amplitude::to_bloch(&expected, &rot).unwrap();
        let (mut tl, mut pl, mut p) = (0.0, 0.0, 0.0);
        assert_eq!(tinj_form_bloch(f, 1.1, 0.4, &mut tl, &mut pl), TinjStatus::Ok);
        assert_eq!((tl, pl), (want.theta_l, want.phi_l));
        assert_eq!(tinj_form_probability(f, 1.1, 0.4, &mut p), TinjStatus::Ok);
        assert_eq!(p, tinj::amplitude::trajectory_probability(&expected, &rot));

        let mut s = ptr::null_mut();
        assert_eq!(tinj_form_to_json(f, &mut s), TinjStatus::Ok);
        let back: tinj::LogicalStateForm = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(back, expected);
        tinj_form_free(f);
        tinj_layout_free(l);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(tinj_layout_new(0, TINJ_VARIANT_ROTATED, &mut l), TinjStatus::InvalidArgument);
        assert!(l.is_null());
        assert!(last_error().contains("distance"));
        assert_eq!(tinj_layout_new(2, 7, &mut l), TinjStatus::InvalidArgument);
        assert_eq!(tinj_layout_new(2, TINJ_VARIANT_ROTATED, ptr::null_mut()), TinjStatus::NullPointer);

        let l = layout(2, TINJ_VARIANT_ROTATED);
        let mut f = ptr::null_mut();
        let bad = CString::new("x=0 z=1").unwrap();
        assert_eq!(tinj_derive(l, bad.as_ptr(), &mut f), TinjStatus::InvalidArgument);
        assert_eq!(tinj_derive(l, ptr::null(), &mut f), TinjStatus::NullPointer);
        assert_eq!(tinj_derive(ptr::null(), bad.as_ptr(), &mut f), TinjStatus::NullPointer);
        let ok = CString::new("x=00 z=0").unwrap();
        assert_eq!(tinj_derive(l, ok.as_ptr(), &mut f), TinjStatus::Ok);
        assert!(tinj_last_error().is_null());
        let (mut tl, mut pl) = (0.0, 0.0);
        assert_eq!(tinj_form_bloch(f, 9.0, 0.0, &mut tl, &mut pl), TinjStatus::InvalidArgument);
        tinj_form_free(f);
        tinj_layout_free(l);

        let cfg = TinjSimConfig {
            distance: 5,
            theta: 1.0,
            phi: 0.0,
            p1: 0.0,
            p2: 0.0,
            p_meas: 0.0,
            rounds: 0,
            shots: 1,
            seed: 0,
        };
        let mut s = ptr::null_mut();
        assert_eq!(tinj_simulate_json(&cfg, &mut s), TinjStatus::TooLarge);
        assert!(s.is_null());
        tinj_layout_free(ptr::null_mut());
        tinj_form_free(ptr::null_mut());
        tinj_string_free(ptr::null_mut());
    }
}

#[test]
fn simulate_and_postselect_agree_with_the_library() {
    let cfg = TinjSimConfig {
        distance: 2,
        theta: 1.2,
        phi: 0.3,
        p1: 0.005,
        p2: 0.005,
        p_meas: 0.005,
        rounds: 0,
        shots: 2000,
        seed: 31,
    };
    let rot = tinj::amplitude::PhysicalRotation::new(1.2, 0.3).unwrap();
    let noise = tinj::noise_sim::NoiseModel::uniform(0.005).unwrap();
    let lib = tinj::noise_sim::run_experiment(&tinj::noise_sim::ExperimentConfig::new(2, rot, noise, 2000, 31)).unwrap();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(tinj_simulate_json(&cfg, &mut s), TinjStatus::Ok);
        let json = take(s);
        let result: tinj::noise_sim::ExperimentResult = serde_json::from_str(&json).unwrap();
        assert_eq!(result, lib);

        let train = CString::new(json).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(tinj_postselect_json(train.as_ptr(), ptr::null(), 0.25, &mut out), TinjStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        let table: tinj::postselect::LookupTable = serde_json::from_value(v["table"].clone()).unwrap();
        assert_eq!(table, tinj::postselect::build_lookup(&lib.stats, 0.25).unwrap());
        assert!(v["filtered"]["postselected"]["accepted"].as_u64().unwrap() > 0);

        let junk = CString::new("{").unwrap();
        assert_eq!(tinj_postselect_json(junk.as_ptr(), ptr::null(), 0.25, &mut out), TinjStatus::InvalidArgument);
        assert_eq!(tinj_postselect_json(train.as_ptr(), ptr::null(), 1.5, &mut out), TinjStatus::InvalidArgument);
    }
}
