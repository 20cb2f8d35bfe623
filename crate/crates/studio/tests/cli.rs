use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn breeder(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_breeder"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "breeder {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn evolve(dir: &Path, seed: &str) -> Value {
    let out = breeder(&[
        "evolve",
        "--select",
        "0,2",
        "--steps",
        "4",
        "--seed",
        seed,
        "--image-size",
        "8",
        "--out",
        dir.to_str().unwrap(),
    ]);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn evolve_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    let ra = evolve(&a, "3");
    let rb = evolve(&b, "3");
    let rc = evolve(&c, "4");
    assert_eq!(ra, rb);
    assert_ne!(ra, rc);
    assert_eq!(ra["generation"], 4);
    for k in 0..15 {
        let name = format!("{k:02}.json");
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap()
        );
        assert!(a.join(format!("{k:02}.png")).exists());
    }
}

#[test]
fn render_sweep_and_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let pop = tmp.path().join("pop");
    evolve(&pop, "1");
    let genome = pop.join("05.json");
    let g = genome.to_str().unwrap();

    let png = tmp.path().join("img.png");
    breeder(&[
        "render",
        "--genome",
        g,
        "--size",
        "16",
        "--out",
        png.to_str().unwrap(),
    ]);
    assert!(fs::read(&png).unwrap().starts_with(b"\x89PNG"));

    let text = fs::read_to_string(&genome).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    let conn = parsed["connections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["enabled"] == true)
        .unwrap()["innovation"]
        .to_string();
    let frames = tmp.path().join("frames");
    breeder(&[
        "sweep",
        "--genome",
        g,
        "--connection",
        &conn,
        "--size",
        "4",
        "--out",
        frames.to_str().unwrap(),
    ]);
    let pngs = fs::read_dir(&frames)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "png")
        })
        .count();
    assert_eq!(pngs, 61);
    assert!(frames.join("frame_000.png").exists() && frames.join("frame_060.png").exists());
    let impact: Value =
        serde_json::from_str(&fs::read_to_string(frames.join("impact.json")).unwrap()).unwrap();
    assert_eq!(impact["frames"].as_array().unwrap().len(), 61);

    let run = || breeder(&["metrics", "--genome", g, "--nulls", "3", "--seed", "7"]).stdout;
    let first = run();
    assert_eq!(first, run());
    let m: Value = serde_json::from_slice(&first).unwrap();
    for key in [
        "q_raw",
        "q_null_mean",
        "q_residual",
        "h_raw",
        "h_null_mean",
        "h_residual",
        "partition",
    ] {
        assert!(m.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn corpus_report_from_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let pop = tmp.path().join("pop");
    evolve(&pop, "2");
    for e in fs::read_dir(&pop).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "png") {
            fs::remove_file(p).unwrap();
        }
    }
    // hang every other genome off the first one
    let first: Value =
        serde_json::from_str(&fs::read_to_string(pop.join("00.json")).unwrap()).unwrap();
    for k in (1..15).step_by(2) {
        let path = pop.join(format!("{k:02}.json"));
        let mut g: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        g["parent_id"] = first["id"].clone();
        fs::write(&path, g.to_string()).unwrap();
    }
    let report = tmp.path().join("out.json");
    breeder(&[
        "corpus",
        "--dir",
        pop.to_str().unwrap(),
        "--nulls",
        "2",
        "--seed",
        "1",
        "--resamples",
        "100",
        "--bins",
        "5",
        "--report",
        report.to_str().unwrap(),
    ]);
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["n"], 15);
    assert_eq!(r["modularity"]["bins"].as_array().unwrap().len(), 5);
    let csv = fs::read_to_string(report.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 5);
    assert!(csv.starts_with("metric,bin,lo,hi,count,mean_fitness,ci_lo,ci_hi"));
}

#[test]
fn bad_input_fails_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_breeder"))
        .args([
            "render",
            "--genome",
            "/nonexistent.json",
            "--out",
            "/tmp/x.png",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
