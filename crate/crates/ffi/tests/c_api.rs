use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use eulerphase_ffi::*;

fn parse(spec: &str) -> *mut EpWeights {
    let spec = CString::new(spec).unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { ep_weights_parse(spec.as_ptr(), &mut handle) };
    assert_eq!(status, EpStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let len = unsafe { ep_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(len > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn parse_describe_and_free() {
    let w = parse("scaled:base=ap:a=1,j=2;s=1.5");
    let mut s0 = 0.0;
    assert_eq!(unsafe { ep_weights_s0(w, &mut s0) }, EpStatus::Ok);
    assert!((s0 - 1.5).abs() < 1e-15);
    let text = unsafe { ep_weights_describe(w) };
    assert_eq!(
        unsafe { CStr::from_ptr(text) }.to_str().unwrap(),
        "scaled:base=ap:a=1,j=2;s=1.5"
    );
    unsafe {
        ep_string_free(text);
        ep_weights_free(w);
        ep_weights_free(ptr::null_mut());
    }
}

#[test]
fn status_codes_mirror_exit_codes() {
    let bad = CString::new("power:t=2").unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(
        unsafe { ep_weights_parse(bad.as_ptr(), &mut handle) },
        EpStatus::Config
    );
    assert!(handle.is_null());
    assert!(last_error().contains("unknown key"));

    assert_eq!(
        unsafe { ep_weights_parse(ptr::null(), &mut handle) },
        EpStatus::InvalidArgument
    );

    let w = parse("constant");
    let (mut re, mut im) = (0.0, 0.0);
    let status = unsafe { ep_estimate(w, 1.5, 0.0, 10, 10, &mut re, &mut im, ptr::null_mut()) };
    assert_eq!(status, EpStatus::Domain);
    assert_eq!(unsafe { ep_weights_set_sigma0(w, 0.3) }, EpStatus::Config);
    unsafe { ep_weights_free(w) };

    let irrational = parse("power:s0=1.5");
    let mut out = 0.0;
    assert_eq!(
        unsafe { ep_meinardus_r(irrational, 0, &mut out) },
        EpStatus::Domain
    );
    unsafe { ep_weights_free(irrational) };
}

#[test]
fn exact_and_contour_agree() {
    let w = parse("ap:a=1,j=3");
    let (mut a_re, mut a_im, mut b_re, mut b_im) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            ep_eval_exact(w, 0.2, 0.4, 60, &mut a_re, &mut a_im),
            EpStatus::Ok
        );
        assert_eq!(
            ep_contour_extract(w, 0.2, 0.4, 60, 0.0, 0, &mut b_re, &mut b_im),
            EpStatus::Ok
        );
        ep_weights_free(w);
    }
    let diff = ((a_re - b_re).powi(2) + (a_im - b_im).powi(2)).sqrt();
    assert!(diff < 1e-9 * (a_re.hypot(a_im)));
}

#[test]
fn classify_estimate_meinardus() {
    let w = parse("constant");
    let mut phase = EpPhase::default();
    unsafe {
        assert_eq!(ep_classify(w, 0.5, 0.0, 10, 1e-9, &mut phase), EpStatus::Ok);
    }
    assert_eq!((phase.dominant_h, phase.dominant_k), (1, 1));
    assert_eq!(phase.boundary, 0);

    let (mut re, mut im, mut mu) = (0.0, 0.0, 0.0);
    let (mut ex_re, mut ex_im) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            ep_estimate(w, 0.5, 0.0, 1000, 10, &mut re, &mut im, &mut mu),
            EpStatus::Ok
        );
        assert_eq!(
            ep_eval_exact(w, 0.5, 0.0, 1000, &mut ex_re, &mut ex_im),
            EpStatus::Ok
        );
    }
    assert!((re - ex_re).abs() / ex_re < 0.05);
    assert_eq!(im, 0.0);
    assert!((mu - 0.25).abs() < 1e-15);

    let mut r = 0.0;
    unsafe { assert_eq!(ep_meinardus_r(w, 1000, &mut r), EpStatus::Ok) };
    let p1000 = 2.406_146_786_403_262_2e31;
    assert!((r - p1000).abs() / p1000 < 0.03);
    unsafe { ep_weights_free(w) };
}

#[test]
fn phase_map_handle() {
    let w = parse("power:s0=3");
    let mut map = ptr::null_mut();
    unsafe {
        assert_eq!(
            ep_phase_map_new(w, -0.99, 0.99, -0.99, 0.99, 40, 40, 6, &mut map),
            EpStatus::Ok
        );
    }
    let mut fraction = 0.0;
    unsafe {
        assert_eq!(
            ep_phase_map_fraction(map, 1, 1, &mut fraction),
            EpStatus::Ok
        )
    };
    assert!((fraction - 1.0).abs() < 1e-12);

    let (mut kind, mut h, mut k, mut boundary) = (EpPixelKind::Empty, 0, 0, 0);
    unsafe {
        assert_eq!(
            ep_phase_map_pixel(map, 0, 0, &mut kind, &mut h, &mut k, &mut boundary),
            EpStatus::Ok
        );
        assert_eq!(kind, EpPixelKind::Outside);
        assert_eq!(
            ep_phase_map_pixel(map, 30, 20, &mut kind, &mut h, &mut k, ptr::null_mut()),
            EpStatus::Ok
        );
        assert_eq!((kind, h, k), (EpPixelKind::Labeled, 1, 1));
        assert_eq!(
            ep_phase_map_pixel(map, 40, 0, &mut kind, &mut h, &mut k, ptr::null_mut()),
            EpStatus::Domain
        );
    }

    let dir = std::env::temp_dir().join(format!("eulerphase-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("map.ppm");
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    unsafe { assert_eq!(ep_phase_map_write_ppm(map, c_path.as_ptr()), EpStatus::Ok) };
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P6\n40 40\n255\n"));
    assert_eq!(bytes.len(), b"P6\n40 40\n255\n".len() + 40 * 40 * 3);
    std::fs::remove_dir_all(&dir).unwrap();

    unsafe {
        ep_phase_map_free(map);
        ep_weights_free(w);
    }
}

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("eulerphase.h")
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(header_path()).unwrap();
    for name in [
        "ep_weights_parse",
        "ep_weights_free",
        "ep_eval_exact",
        "ep_contour_extract",
        "ep_classify",
        "ep_estimate",
        "ep_meinardus_r",
        "ep_phase_map_new",
        "ep_phase_map_pixel",
        "ep_phase_map_free",
        "ep_last_error_message",
        "ep_string_free",
        "typedef struct EpWeights EpWeights",
        "EP_STATUS_UNSUPPORTED_FAMILY = 4",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_path())
        .status()
    else {
        eprintln!("no C compiler on PATH; header syntax not checked");
        return;
    };
    assert!(status.success());
}
