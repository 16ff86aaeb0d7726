use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holobgs::imageio::{save_intensity, save_pattern, save_phase_map, BitDepth, ImageFileFormat};
use holobgs::profiles::{quadratic_aberration, uniform_square};
use holobgs::BinaryPattern;
use holobgs_cli::commands::reconstruct::reconstruct_pattern;
use holobgs_cli::manifest::ReconstructManifest;

const N: usize = 256;

fn holobgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holobgs"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Square of `size` at the (64, 64) quadrant point, written in the centered view.
fn write_square(dir: &Path, name: &str, size: usize) -> PathBuf {
    let path = dir.join(name);
    let t = uniform_square(N, N, size, N / 4, N / 4).unwrap().centered();
    save_intensity(
        &t,
        &path,
        ImageFileFormat::from_path(&path).unwrap(),
        false,
        BitDepth::Eight,
    )
    .unwrap();
    path
}

fn metric(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("{key} missing in {out:?}"))
        .parse()
        .unwrap()
}

#[test]
fn generate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_square(dir.path(), "square17.pgm", 17);
    let out = dir.path().join("out");
    let o = holobgs(&[
        "generate",
        "--algorithm",
        "bgs",
        "--target",
        p(&target),
        "--iters",
        "6",
        "--out-dir",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["pattern.pbm", "recon.png", "trace.csv", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(
        trace.lines().next().unwrap(),
        "iteration,field_change,first_order_std,rms_error"
    );
    assert_eq!(trace.lines().count(), 1 + 6);
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"generate\""));
    assert!(manifest.contains(p(&target)));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_square(dir.path(), "square17.pgm", 17);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = holobgs(&[
            "generate",
            "--algorithm",
            "gs",
            "--target",
            p(&target),
            "--iters",
            "8",
            "--no-early-stop",
            "--out-dir",
            p(out),
        ]);
        assert!(o.status.success());
    }
    for f in ["pattern.pbm", "recon.png", "trace.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn compensation_lowers_rms_error_through_aberration() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_square(dir.path(), "square33.pgm", 33);
    let aberr = dir.path().join("aberr.csv");
    save_phase_map(
        &quadratic_aberration(N, N, std::f64::consts::TAU).unwrap(),
        &aberr,
    )
    .unwrap();
    let run = |sign: &str| {
        let out = dir.path().join(sign);
        let o = holobgs(&[
            "generate",
            "--target",
            p(&target),
            "--iters",
            "6",
            "--phase-map",
            p(&aberr),
            "--comp-sign",
            sign,
            "--out-dir",
            p(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        metric(&stdout(&o), "rms_error")
    };
    let compensated = run("subtract");
    let uncompensated = run("none");
    assert!(
        compensated < uncompensated,
        "{compensated} vs {uncompensated}"
    );
}

#[test]
fn reconstruct_all_ones_is_dc_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("ones.pbm");
    save_pattern(&BinaryPattern::filled(32, 32, true).unwrap(), &pattern).unwrap();
    let report = reconstruct_pattern(&ReconstructManifest {
        pattern: pattern.clone(),
        source: Default::default(),
        phase_map: None,
        target: None,
        output_dir: dir.path().join("out"),
    })
    .unwrap();
    let r = report.recon.data();
    assert!((r[0] - 1024.0).abs() < 1e-9);
    assert!(r[1..].iter().all(|&v| v < 1e-18));

    let o = holobgs(&[
        "reconstruct",
        "--pattern",
        p(&pattern),
        "--out-dir",
        p(&dir.path().join("out")),
    ]);
    assert!(o.status.success());
    assert!(dir.path().join("out/recon.png").is_file());
}

#[test]
fn reconstruct_complement_metrics_match() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_square(dir.path(), "t.pgm", 9);
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    let bits: Vec<u8> = (0..N * N)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 63) as u8
        })
        .collect();
    let pattern = BinaryPattern::new(N, N, bits).unwrap();
    let (pa, pb) = (dir.path().join("p.pbm"), dir.path().join("q.pbm"));
    save_pattern(&pattern, &pa).unwrap();
    save_pattern(&pattern.complement(), &pb).unwrap();
    let metrics = |path: &Path| {
        let o = holobgs(&[
            "reconstruct",
            "--pattern",
            p(path),
            "--target",
            p(&target),
            "--out-dir",
            p(&dir.path().join("o")),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let s = stdout(&o);
        (metric(&s, "first_order_std"), metric(&s, "rms_error"))
    };
    let (a, b) = (metrics(&pa), metrics(&pb));
    assert!(
        (a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10,
        "{a:?} vs {b:?}"
    );
}

#[test]
fn reconstruct_missing_pattern_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = holobgs(&[
        "reconstruct",
        "--pattern",
        p(&dir.path().join("nope.pbm")),
        "--out-dir",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn malformed_target_is_io_error_and_bad_phase_map_size_is_validation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pgm");
    fs::write(&bad, "P7\n").unwrap();
    let o = holobgs(&[
        "generate",
        "--target",
        p(&bad),
        "--out-dir",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let target = write_square(dir.path(), "t.pgm", 5);
    let small = dir.path().join("small.csv");
    fs::write(&small, "0,1\n1,0\n").unwrap();
    let o = holobgs(&[
        "generate",
        "--target",
        p(&target),
        "--phase-map",
        p(&small),
        "--out-dir",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn benchmark_default_rows_and_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = holobgs(&["benchmark", "--out-dir", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("benchmark.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 120);
    let std_at = |alg: &str, size: &str, it: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == alg && r[1] == size && r[2] == it)
            .map(|r| r[3].parse().unwrap())
            .unwrap()
    };
    for size in ["17", "33"] {
        assert!(std_at("bgs", size, "6") <= std_at("gs", size, "6"));
    }
    let dat = fs::read_to_string(out.join("benchmark.dat")).unwrap();
    assert_eq!(dat.lines().count(), 31);
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn benchmark_single_pixel_square() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let o = holobgs(&[
        "benchmark",
        "--size",
        "64",
        "--squares",
        "1",
        "--iters",
        "4",
        "--out-dir",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("benchmark.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(3).unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn benchmark_rejects_bad_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_holobgs"))
        .args([
            "benchmark",
            "--size",
            "32",
            "--squares",
            "3",
            "--iters",
            "1",
            "--out-dir",
            p(&dir.path().join("b")),
        ])
        .env("HOLOBGS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_holobgs"))
        .args([
            "benchmark",
            "--size",
            "32",
            "--squares",
            "3",
            "--iters",
            "1",
            "--out-dir",
            p(&dir.path().join("b")),
        ])
        .env("HOLOBGS_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn compare_one_target() {
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("targets");
    fs::create_dir(&targets).unwrap();
    write_square(&targets, "square17.png", 17);
    let out = dir.path().join("cmp");
    let o = holobgs(&[
        "compare",
        "--targets",
        p(&targets),
        "--iters",
        "6",
        "--out-dir",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("square17_compare.png").is_file());
    let csv = fs::read_to_string(out.join("compare_metrics.csv")).unwrap();
    let rows: Vec<_> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("square17,gs,6,") && rows[1].starts_with("square17,bgs,6,"));
    let rms = |r: &str| r.split(',').nth(4).unwrap().parse::<f64>().unwrap();
    assert!(rms(rows[1]) <= rms(rows[0]));
}

#[test]
fn compare_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = holobgs(&[
        "compare",
        "--targets",
        p(dir.path()),
        "--out-dir",
        p(&dir.path().join("cmp")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no targets found"));
    assert!(!dir.path().join("cmp").exists());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_square(dir.path(), "t.pgm", 17);
    let first = dir.path().join("first");
    let o = holobgs(&[
        "generate",
        "--target",
        p(&target),
        "--iters",
        "4",
        "--random-phase-seed",
        "11",
        "--source",
        "gaussian:90",
        "--out-dir",
        p(&first),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = dir.path().join("second");
    let o = holobgs(&[
        "replay",
        p(&first.join("manifest.json")),
        "--out-dir",
        p(&second),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["pattern.pbm", "recon.png", "trace.csv"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn inputs_are_not_modified() {
    let dir = tempfile::tempdir().unwrap();
    let target = write_square(dir.path(), "t.pgm", 17);
    let before = fs::read(&target).unwrap();
    let o = holobgs(&[
        "generate",
        "--target",
        p(&target),
        "--iters",
        "2",
        "--out-dir",
        p(&dir.path().join("o")),
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read(&target).unwrap(), before);
    let mut names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names, ["o", "t.pgm"]);
}
