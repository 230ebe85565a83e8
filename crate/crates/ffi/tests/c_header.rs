use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("roadnet.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 15);
    for f in exported {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    for t in ["typedef struct RoadnetGraph RoadnetGraph;", "ROADNET_STATUS_CONFIG = 3", "typedef struct RoadnetEvalSummary"] {
        assert!(h.contains(t), "{t}");
    }
}

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "roadnet.h"

int main(void) {
    RoadnetConfig *cfg = NULL;
    if (roadnet_config_from_json("{\"synth\": {\"blocks_x\": 2, \"blocks_y\": 2, \"margin\": 20}}", &cfg) != ROADNET_STATUS_OK) return 1;
    RoadnetMask *mask = NULL;
    RoadnetGraph *truth = NULL, *pred = NULL;
    if (roadnet_synth(1, cfg, &mask, &truth) != ROADNET_STATUS_OK) return 2;
    if (roadnet_reconstruct(mask, cfg, &pred) != ROADNET_STATUS_OK) return 3;
    RoadnetEvalSummary s;
    if (roadnet_evaluate(pred, truth, 2.0, &s) != ROADNET_STATUS_OK) return 4;
    printf("%zu %zu %zu %.3f %.3f\n", s.true_positives, s.false_positives, s.false_negatives, s.precision, s.recall);
    RoadnetGraph *bad = NULL;
    if (roadnet_graph_from_geojson("{", &bad) != ROADNET_STATUS_INPUT || bad != NULL) return 5;
    if (strstr(roadnet_last_error(), "line 1") == NULL) return 6;
    roadnet_graph_free(pred);
    roadnet_graph_free(truth);
    roadnet_mask_free(mask);
    roadnet_config_free(cfg);
    return s.precision >= 0.9 ? 0 : 7;
}
"#;

#[test]
fn c_program_links_and_runs() {
    // Test binary lives in <target>/<profile>/deps; the shared library one level up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let so = lib_dir.join("libroadnet_ffi.so");
    assert!(so.exists(), "{} not built", so.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg(format!("-I{}", header().parent().unwrap().display()))
        .arg(format!("-L{}", lib_dir.display()))
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lroadnet_ffi")
        .output()
        .expect("C compiler available");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "exit {:?}: {stdout}", run.status.code());
    assert_eq!(stdout.split_whitespace().count(), 5);
}
