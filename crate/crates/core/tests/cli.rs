use std::path::PathBuf;
use std::process::{Command, Output};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn su3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su3"))
        .args(args)
        .env("SU3_DATA_DIR", data_dir())
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn graphs_show_a4() {
    let o = su3(&["graphs", "show", "A4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(v["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn unknown_graph_is_usage_error() {
    assert_eq!(su3(&["graphs", "show", "NOPE"]).status.code(), Some(2));
    assert_eq!(su3(&["nimrep", "--graph", "NOPE"]).status.code(), Some(2));
    assert_eq!(su3(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(su3(&["--data-dir", "/nonexistent", "graphs", "list"]).status.code(), Some(2));
    assert_eq!(su3(&["--tol", "-1", "modular", "--level", "3"]).status.code(), Some(2));
}

#[test]
fn graphs_list_json_covers_catalog() {
    let o = su3(&["graphs", "list", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    for n in ["A4", "A12", "D6", "A5*", "D12*", "E8", "E8*", "E12_1", "E24"] {
        assert!(names.contains(&n), "{n}");
    }
}

#[test]
fn verify_nimrep_e8() {
    let o = su3(&["verify", "nimrep", "--graph", "E8", "--invariant", "E8", "--level", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[nimrep spectrum]"));
}

#[test]
fn verify_nimrep_size_mismatch_fails() {
    let o = su3(&["verify", "nimrep", "--graph", "E8", "--invariant", "A", "--level", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_hilbert_passes() {
    for args in [
        &["verify", "hilbert", "--graph", "A5", "--cells", "cells/A5.json"][..],
        &["verify", "hilbert", "--cells", "cells/A6.json"][..],
        &["verify", "hilbert", "--graph", "E8"][..],
    ] {
        let o = su3(args);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    assert_eq!(su3(&["verify", "hilbert", "--graph", "A6", "--cells", "cells/A5.json"]).status.code(), Some(2));
}

#[test]
fn verify_cells_pass_and_corrupt() {
    for f in ["cells/A4.json", "cells/A5.json", "cells/A6.json", "cells/D6.json"] {
        assert_eq!(su3(&["verify", "cells", f]).status.code(), Some(0), "{f}");
    }
    let o = su3(&["verify", "cells", "cells/corrupt.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    assert_eq!(su3(&["verify", "hecke", "--cells", "cells/corrupt.json"]).status.code(), Some(1));
}

#[test]
fn tampered_pinned_cells_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let src = data_dir();
    copy_tree(&src, dir.path());
    let f = dir.path().join("cells/A4.json");
    let text = std::fs::read_to_string(&f).unwrap().replacen('1', "2", 1);
    std::fs::write(&f, text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_su3"))
        .args(["--data-dir", dir.path().to_str().unwrap(), "verify", "cells", "cells/A4.json"])
        .current_dir(dir.path().join("graphs"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

fn copy_tree(src: &std::path::Path, dst: &std::path::Path) {
    for e in std::fs::read_dir(src).unwrap() {
        let e = e.unwrap();
        let to = dst.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            std::fs::create_dir_all(&to).unwrap();
            copy_tree(&e.path(), &to);
        } else {
            std::fs::copy(e.path(), to).unwrap();
        }
    }
}

#[test]
fn measure_csv_shape_and_determinism() {
    let args = ["measure", "graph", "--graph", "E8", "--moments", "3", "3", "--csv"];
    let a = su3(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n,re,im"));
    assert_eq!(lines.count(), 16);
    assert_eq!(a.stdout, su3(&args).stdout);
}

#[test]
fn hilbert_brute_matches_closed() {
    let o = su3(&["hilbert", "--cells", "cells/A5.json", "--mode", "both", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    let pick = |mode: &str| -> Vec<(u64, String, String, i64)> {
        rows.iter()
            .filter(|r| r["mode"] == mode)
            .map(|r| (r["degree"].as_u64().unwrap(), r["src"].to_string(), r["dst"].to_string(), r["dim"].as_i64().unwrap()))
            .collect()
    };
    assert_eq!(pick("closed"), pick("brute"));
    // A5: h = 5, degrees 0..=2 over 6 vertices
    assert_eq!(pick("closed").len(), 3 * 36);

    let o = su3(&["hilbert", "--graph", "A5", "--csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("degree,src,dst,dim,mode"));
    assert!(text.lines().any(|l| l == "1,\"(0,0)\",\"(1,0)\",1,closed"));
    assert_eq!(text.lines().count(), 1 + 3 * 36);
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("A5.json");
    let o = su3(&["--seed", "7", "cells", "solve", "--graph", "A5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = su3(&["verify", "cells", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = su3(&["hecke", "--cells", out.to_str().unwrap(), "--p-max", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn report_json_carries_tags() {
    let o = su3(&["modular", "--level", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    let tags: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["tag"].as_str().unwrap()).collect();
    assert!(tags.contains(&"verlinde"));
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let o = su3(&["--tol", "1e-30", "modular", "--level", "6"]);
    assert_eq!(o.status.code(), Some(1));
}
