//! Exercises the C surface through the exported extern functions.

use std::ffi::{CStr, CString};
use std::ptr;

use burbea_rao_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn quadratic_divergences_through_handles() {
    unsafe {
        let g = br_generator_quadratic_identity(2);
        let p = br_param_new([0.0, 0.0].as_ptr(), 2, ptr::null(), 0);
        let q = br_param_new([2.0, 2.0].as_ptr(), 2, ptr::null(), 0);
        assert!(!g.is_null() && !p.is_null() && !q.is_null());

        let mut v = 0.0f64;
        assert_eq!(br_burbea_rao(g, p, q, &mut v), BrStatus::Ok);
        assert!((v - 2.0).abs() < 1e-12);

        assert_eq!(br_bregman(g, p, q, &mut v), BrStatus::Ok);
        assert!((v - 8.0).abs() < 1e-12);

        assert_eq!(br_skew_burbea_rao(g, p, q, 0.25, &mut v), BrStatus::Ok);
        assert!((v - 1.5).abs() < 1e-12);

        assert_eq!(br_jeffreys_bregman(g, p, q, &mut v), BrStatus::Ok);
        assert!((v - 8.0).abs() < 1e-12);

        br_param_free(p);
        br_param_free(q);
        br_generator_free(g);
    }
}

#[test]
fn skew_weight_outside_unit_interval_is_invalid() {
    unsafe {
        let g = br_generator_quadratic_identity(1);
        let p = br_param_new([0.0].as_ptr(), 1, ptr::null(), 0);
        let q = br_param_new([1.0].as_ptr(), 1, ptr::null(), 0);
        let mut v = 0.0f64;
        assert_eq!(
            br_skew_burbea_rao(g, p, q, 1.5, &mut v),
            BrStatus::InvalidArgument
        );
        let msg = br_last_error_message();
        assert!(!msg.is_null());
        let text = CStr::from_ptr(msg).to_str().unwrap();
        assert!(text.contains("skew"), "unexpected message {text:?}");
        br_param_free(p);
        br_param_free(q);
        br_generator_free(g);
    }
}

#[test]
fn neg_shannon_domain_violation_reports_domain_error() {
    unsafe {
        let g = br_generator_neg_shannon(1);
        let p = br_param_new([-1.0].as_ptr(), 1, ptr::null(), 0);
        let q = br_param_new([1.0].as_ptr(), 1, ptr::null(), 0);
        let mut v = 0.0f64;
        assert_eq!(br_burbea_rao(g, p, q, &mut v), BrStatus::DomainError);
        br_param_free(p);
        br_param_free(q);
        br_generator_free(g);
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut v = 0.0f64;
        assert_eq!(
            br_burbea_rao(ptr::null(), ptr::null(), ptr::null(), &mut v),
            BrStatus::NullPointer
        );
    }
}

#[test]
fn oversized_dimensions_return_null() {
    unsafe {
        assert!(br_generator_quadratic_identity(usize::MAX).is_null());
        assert!(br_family_mv_gaussian(usize::MAX).is_null());
        assert!(!br_last_error_message().is_null());
    }
}

#[test]
fn asymmetric_matrix_param_is_rejected() {
    unsafe {
        let mat = [1.0, 0.5, 0.4, 1.0]; // not symmetric
        let p = br_param_new([0.0, 0.0].as_ptr(), 2, mat.as_ptr(), 2);
        assert!(p.is_null());
        assert!(!br_last_error_message().is_null());
    }
}

#[test]
fn family_divergences_poisson_closed_form() {
    unsafe {
        let fam = br_family_poisson();
        let p = cstr("{\"rate\": 1.0}");
        let q = cstr("{\"rate\": 4.0}");
        let mut out = [0.0f64; 4];
        assert_eq!(
            br_family_divergences(fam, p.as_ptr(), q.as_ptr(), 0.5, out.as_mut_ptr()),
            BrStatus::Ok
        );
        assert!((out[0] - 0.5).abs() < 1e-12); // bhattacharyya
        assert!((out[1] - (1.0 - (-0.5f64).exp()).sqrt()).abs() < 1e-12); // hellinger
        assert!((out[2] - ((0.25f64).ln() + 3.0)).abs() < 1e-12); // kl
        assert!((out[3] - (-0.5f64).exp()).abs() < 1e-12); // chernoff
        br_family_free(fam);
    }
}

#[test]
fn population_diversity_through_handles() {
    unsafe {
        let g = br_generator_quadratic_identity(1);
        let pts: Vec<*mut BrParam> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&x| br_param_new([x].as_ptr(), 1, ptr::null(), 0))
            .collect();
        let handles: Vec<*const BrParam> = pts.iter().map(|&p| p as *const BrParam).collect();
        let w = [1.0 / 3.0; 3];
        let mut v = 0.0f64;
        assert_eq!(
            br_population_diversity(g, handles.as_ptr(), w.as_ptr(), 3, &mut v),
            BrStatus::Ok
        );
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        for p in pts {
            br_param_free(p);
        }
        br_generator_free(g);
    }
}

#[test]
fn generic_centroid_over_json_round_trips() {
    unsafe {
        let fam = br_family_mv_gaussian(2);
        let input = cstr(
            r#"{"points": [
                {"weight": 0.5, "param": {"mean": [0.0, 0.0], "cov": [[1.0, 0.0],[0.0, 1.0]]}},
                {"weight": 0.5, "param": {"mean": [2.0, 0.0], "cov": [[1.0, 0.0],[0.0, 1.0]]}}
            ]}"#,
        );
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        let status = br_centroid_generic(fam, input.as_ptr(), 0.5, 1e-10, 200, &mut out);
        assert_eq!(status, BrStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_string();
        br_string_free(out);
        br_family_free(fam);

        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["converged"], serde_json::Value::Bool(true));
        let mean = parsed["centroid"]["mean"].as_array().unwrap();
        assert!((mean[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
        assert!(mean[1].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn tailored_centroid_matches_generic_on_symmetric_instance() {
    unsafe {
        let input = cstr(
            r#"{"points": [
                {"weight": 0.5, "param": {"mean": [0.0], "cov": [[1.0]]}},
                {"weight": 0.5, "param": {"mean": [2.0], "cov": [[1.0]]}}
            ]}"#,
        );
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        let status = br_centroid_tailored(input.as_ptr(), 1e-10, 200, &mut out);
        assert_eq!(status, BrStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_string();
        br_string_free(out);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mean = parsed["centroid"]["mean"].as_array().unwrap();
        assert!((mean[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn simplify_mixture_reduces_component_count() {
    unsafe {
        let input = cstr(
            r#"{"family":"mvgaussian","d":1,"components":[
                {"weight":0.25,"mean":[0.0],"cov":[[1.0]]},
                {"weight":0.25,"mean":[0.1],"cov":[[1.0]]},
                {"weight":0.5,"mean":[9.0],"cov":[[1.0]]}
            ]}"#,
        );
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            br_simplify_mixture(input.as_ptr(), 2, 1e-10, 200, &mut out),
            BrStatus::Ok
        );
        let text = CStr::from_ptr(out).to_str().unwrap().to_string();
        br_string_free(out);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["components"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn to_natural_flattens_vector_and_matrix_blocks() {
    unsafe {
        let fam = br_family_gaussian();
        let param = cstr("{\"mean\": 1.0, \"variance\": 2.0}");
        let mut out = [0.0f64; 2];
        let mut len = 0usize;
        assert_eq!(
            br_to_natural(fam, param.as_ptr(), out.as_mut_ptr(), &mut len),
            BrStatus::Ok
        );
        assert_eq!(len, 2);
        assert!((out[0] - 0.5).abs() < 1e-15);
        assert!((out[1] + 0.25).abs() < 1e-15);
        br_family_free(fam);
    }
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/burbea_rao.h"
    ))
    .expect("header generated at build time");
    for symbol in [
        "br_burbea_rao",
        "br_skew_burbea_rao",
        "br_bregman",
        "br_family_divergences",
        "br_centroid_generic",
        "br_centroid_tailored",
        "br_simplify_mixture",
        "br_last_error_message",
        "typedef struct BrGenerator BrGenerator",
        "typedef struct BrFamily BrFamily",
        "typedef struct BrParam BrParam",
        "BR_STATUS_NOT_CONVERGED",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
