use std::path::Path;
use std::process::{Command, Output};

fn orthoforge(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthoforge"))
        .args(args)
        .current_dir(cwd)
        .env_remove("ORTHOFORGE_CONFIG")
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn render_vectorize_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&orthoforge(&["gen-corpus", "--builtin", "--out", "meshes"], d));
    assert!(d.join("meshes/cylinder.obj").is_file());

    let out = ok(&orthoforge(&["render", "meshes/cylinder.obj", "--view", "all", "--out", "r", "--svg", "--pgm"], d));
    assert_eq!(out.lines().count(), 4);
    for v in ["top", "front", "side", "isometric"] {
        assert!(d.join(format!("r/cylinder_{v}.svg")).is_file());
        assert!(d.join(format!("r/cylinder_{v}.pgm")).is_file());
    }
    ok(&orthoforge(&["render", "meshes/cube.obj", "--view", "iso", "--out", "p", "--png", "--hidden", "off", "--size", "256"], d));
    assert!(d.join("p/cube_isometric.png").is_file());
    assert!(!d.join("p/cube_isometric.svg").exists());

    ok(&orthoforge(&["vectorize", "r/cylinder_top.pgm", "--view", "top", "--out", "v.svg", "--close-dashes"], d));
    assert!(std::fs::read_to_string(d.join("v.svg")).unwrap().contains("<circle"));

    let out = ok(&orthoforge(
        &[
            "reconstruct", "--top", "r/cylinder_top.pgm", "--front", "r/cylinder_front.pgm", "--side", "r/cylinder_side.svg",
            "--out", "c.obj", "--resolution", "64", "--extrusion-json", "e.json", "--voxels-json", "g.json",
        ],
        d,
    ));
    assert!(out.contains("extrusion along Z"), "{out}");
    let prog: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("e.json")).unwrap()).unwrap();
    assert_eq!(prog["axis"], "Z");
    assert!(prog["profile"].as_array().unwrap().len() > 8);
    assert!(std::fs::read_to_string(d.join("c.obj")).unwrap().starts_with("v "));
    assert!(d.join("g.json").is_file());
}

#[test]
fn dataset_evaluate_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&orthoforge(&["gen-corpus", "--out", "corpus", "--count", "3", "--seed", "5"], d));
    std::fs::write(d.join("corpus/bad.obj"), "f 1 2 3\n").unwrap();
    std::fs::write(d.join("cfg.json"), r#"{"workers": 1, "raster_size": 256}"#).unwrap();
    let out = ok(&orthoforge(&["--config", "cfg.json", "dataset", "corpus", "--out", "ds"], d));
    assert!(out.contains("3 of 4"), "{out}");
    let manifest = std::fs::read_to_string(d.join("ds/manifest.json")).unwrap();
    assert!(manifest.contains("\"schema_version\": \"1\""));
    let pgm = std::fs::read(d.join("ds/drawings/mesh_0000_front.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n256 256"));

    std::fs::create_dir(d.join("gen")).unwrap();
    for v in ["top", "front", "side"] {
        std::fs::copy(d.join(format!("ds/drawings/mesh_0001_{v}.pgm")), d.join(format!("gen/mesh_0001_{v}.pgm"))).unwrap();
    }
    let out = ok(&orthoforge(&["evaluate", "--manifest", "ds/manifest.json", "--generated", "gen", "--out", "rep.json"], d));
    let first: Vec<&str> = out.lines().take(5).collect();
    assert!(first[0].starts_with("View") && first[4].starts_with("Mean"), "{out}");
    assert!(out.contains("skipped mesh_0000"));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("rep.json")).unwrap()).unwrap();
    assert_eq!(rep["report"]["mean"]["avg"], 0.0);

    std::fs::write(d.join("bad.json"), r#"{"workers": 0}"#).unwrap();
    let o = orthoforge(&["--config", "bad.json", "gen-corpus", "--builtin", "--out", "x"], d);
    assert!(!o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_orthoforge"))
        .args(["gen-corpus", "--builtin", "--out", "y"])
        .current_dir(d)
        .env("ORTHOFORGE_CONFIG", d.join("bad.json"))
        .output()
        .unwrap();
    assert!(!o.status.success(), "env config is honoured");
}

#[test]
fn roundtrip_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&orthoforge(&["gen-corpus", "--builtin", "--out", "m"], d));
    let out = ok(&orthoforge(&["roundtrip", "m/box_with_hole.obj", "--resolution", "96", "--json", "rt.json"], d));
    assert!(out.contains("Result: PASS"), "{out}");
    assert!(d.join("rt.json").is_file());
    std::fs::write(d.join("strict.json"), r#"{"thresholds": {"iou_min": 1.01}}"#).unwrap();
    let o = orthoforge(&["--config", "strict.json", "roundtrip", "m/cube.obj", "--resolution", "32"], d);
    assert_eq!(o.status.code(), Some(1));
    let o = orthoforge(&["roundtrip", "m/missing.obj"], d);
    assert_eq!(o.status.code(), Some(2));
}
