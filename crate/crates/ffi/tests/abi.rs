use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use drivosc_ffi::*;

fn last_error() -> String {
    let p = drivosc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn constant(f0: f64) -> *mut DrivoscForce {
    let mut force = ptr::null_mut();
    assert_eq!(unsafe { drivosc_force_constant(f0, &mut force) }, DrivoscStatus::Ok);
    force
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(drivosc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn constant_force_drive_integrals() {
    let force = constant(0.5);
    let t: f64 = 1.3;
    let mut d = DrivoscDriveIntegrals::default();
    assert_eq!(unsafe { drivosc_drive_integrals(force, t, &mut d) }, DrivoscStatus::Ok);
    assert!((d.sin_moment - 0.5 * (1.0 - t.cos())).abs() < 1e-12);
    assert!((d.cos_moment - 0.5 * t.sin()).abs() < 1e-12);
    assert!((d.x_rest - 0.5 * (1.0 - t.cos())).abs() < 1e-12);
    assert!((d.p_rest - 0.5 * t.sin()).abs() < 1e-12);

    let mut pt = DrivoscPhasePoint::default();
    assert_eq!(unsafe { drivosc_classical_trajectory(force, 1.0, 0.0, t, &mut pt) }, DrivoscStatus::Ok);
    // displaced oscillator about q = f0
    assert!((pt.q - (0.5 + 0.5 * t.cos())).abs() < 1e-12);
    assert!((pt.p + 0.5 * t.sin()).abs() < 1e-12);
    unsafe { drivosc_force_free(force) };
}

#[test]
fn green_function_modulus() {
    let force = constant(0.3);
    let t: f64 = 0.8;
    let mut g = DrivoscComplex::default();
    assert_eq!(unsafe { drivosc_green_function(force, t, 0.4, -0.2, &mut g) }, DrivoscStatus::Ok);
    let modulus = (g.re * g.re + g.im * g.im).sqrt();
    let expected = 1.0 / (2.0 * std::f64::consts::PI * t.sin()).sqrt();
    assert!((modulus - expected).abs() < 1e-12, "{modulus} vs {expected}");
    unsafe { drivosc_force_free(force) };
}

#[test]
fn propagated_ground_state_keeps_its_norm_and_tomogram() {
    let mut zero = ptr::null_mut();
    assert_eq!(unsafe { drivosc_force_zero(&mut zero) }, DrivoscStatus::Ok);
    let state = DrivoscState {
        kind: DrivoscStateKind::Fock,
        x0: 0.0,
        p0: 0.0,
        n: 0,
    };
    let mut psi = ptr::null_mut();
    let status = unsafe { drivosc_wavefunction_new(&state, -10.0, 10.0, 1024, &mut psi) };
    assert_eq!(status, DrivoscStatus::Ok);
    let mut evolved = ptr::null_mut();
    assert_eq!(unsafe { drivosc_wavefunction_propagate(psi, zero, 1.0, &mut evolved) }, DrivoscStatus::Ok);

    let n = unsafe { drivosc_wavefunction_len(evolved) };
    assert_eq!(n, 1024);
    let mut amps = vec![DrivoscComplex::default(); n];
    assert_eq!(unsafe { drivosc_wavefunction_values(evolved, amps.as_mut_ptr(), n) }, DrivoscStatus::Ok);
    let h = 20.0 / (n - 1) as f64;
    let norm: f64 = amps.iter().map(|a| a.re * a.re + a.im * a.im).sum::<f64>() * h;
    assert!((norm - 1.0).abs() < 1e-6, "{norm}");

    let mut slice = vec![0.0; 201];
    let status = unsafe { drivosc_symplectic_tomogram(evolved, 0.6, 0.8, -5.0, 5.0, 201, slice.as_mut_ptr(), 201) };
    assert_eq!(status, DrivoscStatus::Ok, "{}", last_error());
    let mut closed = vec![0.0; 201];
    let status = unsafe {
        drivosc_closed_form_tomogram(&state, zero, 1.0, 0.6, 0.8, -5.0, 5.0, 201, closed.as_mut_ptr(), 201)
    };
    assert_eq!(status, DrivoscStatus::Ok);
    let sup = slice.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-6, "{sup}");

    unsafe {
        drivosc_wavefunction_free(evolved);
        drivosc_wavefunction_free(psi);
        drivosc_force_free(zero);
    }
}

#[test]
fn errors_are_reported_through_status_and_message() {
    let mut force = ptr::null_mut();
    let status = unsafe { drivosc_force_constant(f64::NAN, &mut force) };
    assert_eq!(status, DrivoscStatus::InvalidArgument);
    assert!(force.is_null());
    assert!(!last_error().is_empty());

    let mut d = DrivoscDriveIntegrals::default();
    assert_eq!(unsafe { drivosc_drive_integrals(ptr::null(), 1.0, &mut d) }, DrivoscStatus::NullPointer);
    assert!(last_error().contains("force"));

    let force = constant(0.0);
    let state = DrivoscState {
        kind: DrivoscStateKind::Coherent,
        x0: 0.0,
        p0: 0.0,
        n: 0,
    };
    let mut small = [0.0; 4];
    let status = unsafe {
        drivosc_closed_form_tomogram(&state, force, 0.0, 1.0, 0.0, -1.0, 1.0, 11, small.as_mut_ptr(), small.len())
    };
    assert_eq!(status, DrivoscStatus::BufferTooSmall);
    let status = unsafe {
        drivosc_closed_form_tomogram(&state, force, 0.0, 0.0, 0.0, -1.0, 1.0, 4, small.as_mut_ptr(), small.len())
    };
    assert_eq!(status, DrivoscStatus::InvalidArgument);
    unsafe { drivosc_force_free(force) };

    let times = [0.0, 1.0];
    let values = [0.0];
    let mut tab = ptr::null_mut();
    let status = unsafe { drivosc_force_tabulated(times.as_ptr(), values.as_ptr(), 0, &mut tab) };
    assert_ne!(status, DrivoscStatus::Ok);
    unsafe { drivosc_force_free(ptr::null_mut()) };
    assert_eq!(unsafe { drivosc_wavefunction_len(ptr::null()) }, 0);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/drivosc.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["drivosc_force_tabulated", "drivosc_wavefunction_free", "DRIVOSC_STATUS_BUFFER_TOO_SMALL"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"drivosc.h\"\n\
         int main(void) {\n\
           DrivoscForce *f = NULL;\n\
           if (drivosc_force_zero(&f) != DRIVOSC_STATUS_OK) return 1;\n\
           DrivoscDriveIntegrals d;\n\
           drivosc_drive_integrals(f, 1.0, &d);\n\
           drivosc_force_free(f);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    else {
        eprintln!("cc not found; header syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
