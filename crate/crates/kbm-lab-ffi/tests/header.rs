//! The generated header declares every exported function and compiles as C.

use std::path::Path;
use std::process::Command;

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kbm_lab.h")).expect("header is generated by the build script")
}

fn exported_functions() -> Vec<String> {
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    src.lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap().trim().to_string())
        .collect()
}

#[test]
fn header_declares_every_exported_function() {
    let h = header();
    let names = exported_functions();
    assert!(names.len() >= 13, "{names:?}");
    for name in names {
        assert!(h.contains(&format!(" {name}(")) || h.contains(&format!("*{name}(")), "`{name}` missing from header");
    }
    for ty in ["typedef struct KbmMetric KbmMetric;", "typedef struct KbmTrajectory KbmTrajectory;", "KBM_STATUS_OK = 0", "KBM_STATUS_DOMAIN_EXIT = 3"] {
        assert!(h.contains(ty), "`{ty}` missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let probe = dir.path().join("probe.c");
    std::fs::write(&probe, "#include \"kbm_lab.h\"\nint main(void) { KbmMetric *m = 0; return (int)kbm_metric_new(KBM_FAMILY_HYPERBOLIC, 0.0, &m) * 0; }\n").unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let Ok(out) = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"]).arg(&include).arg(&probe).output() else {
        eprintln!("no C compiler available; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
