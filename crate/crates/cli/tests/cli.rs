use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

fn gmtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmtc"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("failed to launch gmtc")
}

fn ok(args: &[&str]) {
    let out = gmtc(args);
    assert!(
        out.status.success(),
        "gmtc {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn corpus(&self) -> PathBuf {
        self.root.join("corpus")
    }
    fn cache(&self) -> PathBuf {
        self.root.join("feat.cache")
    }
    fn ckpt(&self) -> PathBuf {
        self.root.join("run/fold0/model.gmck")
    }
}

/// Five clips per class, cached features and a one-epoch default-size model.
fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let f = Fixture { _dir: dir, root };
        ok(&["synth", "--seed", "1", "--per-class", "5", "--out", s(&f.corpus())]);
        let manifest = f.corpus().join("manifest.csv");
        ok(&["features", "--corpus", s(&manifest), "--root", s(&f.corpus()), "--out", s(&f.cache())]);
        let cfg = f.root.join("one_epoch.cfg");
        std::fs::write(&cfg, "max_epochs=1\npatience=1\n").unwrap();
        ok(&["train", "--features", s(&f.cache()), "--config", s(&cfg), "--out", s(&f.root.join("run"))]);
        f
    })
}

fn csv_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(str::to_string).collect()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(gmtc(&["ablate", "--study", "depth", "--out", "x", "--no-train"]).status.code(), Some(1));
    assert_eq!(gmtc(&["synth", "--per-class", "0", "--out", "x"]).status.code(), Some(1));
    assert_eq!(gmtc(&["train"]).status.code(), Some(1));
}

#[test]
fn features_rejects_missing_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = gmtc(&[
        "features",
        "--corpus",
        "emodb",
        "--root",
        s(&dir.path().join("absent")),
        "--out",
        s(&dir.path().join("f.cache")),
    ]);
    assert!(!out.status.success());
    assert!(!dir.path().join("f.cache").exists());
}

#[test]
fn train_reports_missing_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = gmtc(&["train", "--features", s(&dir.path().join("nope.cache")), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.cache"));
}

#[test]
fn synth_writes_one_wav_per_clip() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "--seed", "7", "--per-class", "10", "--out", s(dir.path())]);
    let wavs = walk_wavs(dir.path());
    assert_eq!(wavs, 60);
    assert_eq!(csv_rows(&dir.path().join("manifest.csv")).len(), 60);
    assert!(dir.path().join("run.json").exists());
}

fn walk_wavs(dir: &Path) -> usize {
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            n += walk_wavs(&p);
        } else if p.extension().is_some_and(|x| x == "wav") {
            n += 1;
        }
    }
    n
}

#[test]
fn ablate_structure_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["ablate", "--study", "drd", "--no-train", "--out", s(dir.path())]);
    let rows = csv_rows(&dir.path().join("ablation_drd.csv"));
    assert_eq!(
        rows,
        vec![
            "drd,ours-256,260604,256,382",
            "drd,ours-128,223632,128,190",
            "drd,raw-128,260604,128,255",
            "drd,raw-256,297576,256,511",
        ]
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
    );
}

#[test]
fn train_writes_holdout_artifacts() {
    let f = fixture();
    let run = f.root.join("run");
    for file in ["config.txt", "split.json", "summary.json", "run.json", "fold0/history.csv", "fold0/report.json"] {
        assert!(run.join(file).exists(), "{} missing", file);
    }
    assert_eq!(csv_rows(&run.join("fold0/history.csv")).len(), 1);
    let confusion = csv_rows(&run.join("fold0/confusion.csv"));
    assert_eq!(confusion.len(), 6);
}

#[test]
fn cv5_trains_five_folds() {
    let f = fixture();
    let cfg = f.root.join("tiny.cfg");
    std::fs::write(&cfg, "n_gcb=2\nn_gscb=1\nmax_epochs=1\npatience=1\n").unwrap();
    let out = f.root.join("cv5");
    ok(&["train", "--features", s(&f.cache()), "--split", "cv5", "--config", s(&cfg), "--out", s(&out)]);
    for k in 0..5 {
        assert!(out.join(format!("fold{}/model.gmck", k)).exists());
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["fold_war"].as_array().unwrap().len(), 5);
}

#[test]
fn maps_export_every_block() {
    let f = fixture();
    let out = f.root.join("maps");
    ok(&["analyze", "maps", "--ckpt", s(&f.ckpt()), "--features", s(&f.cache()), "--out", s(&out), "--limit", "2"]);
    let clips: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(clips.len(), 2);
    for clip in clips {
        let pgms = std::fs::read_dir(&clip)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "pgm"))
            .count();
        assert_eq!(pgms, 9);
        assert!(std::fs::read(clip.join("00_input.pgm")).unwrap().starts_with(b"P5"));
    }
}

#[test]
fn entropy_table_has_one_row_per_emotion() {
    let f = fixture();
    let out = f.root.join("entropy");
    ok(&["analyze", "entropy", "--ckpt", s(&f.ckpt()), "--features", s(&f.cache()), "--out", s(&out)]);
    let rows = csv_rows(&out.join("entropy.csv"));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.starts_with("synth,") && r.ends_with(",5")));
}

#[test]
fn projection_has_one_point_per_clip() {
    let f = fixture();
    let out = f.root.join("project");
    ok(&["analyze", "project", "--ckpt", s(&f.ckpt()), "--features", s(&f.cache()), "--out", s(&out)]);
    assert_eq!(csv_rows(&out.join("projection.csv")).len(), 30);
}

#[test]
fn analyze_rejects_mismatched_cache() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&["synth", "--seed", "2", "--per-class", "2", "--classes", "3", "--out", s(&corpus)]);
    let cache = dir.path().join("other.cache");
    ok(&["features", "--corpus", s(&corpus.join("manifest.csv")), "--root", s(&corpus), "--out", s(&cache), "--tmax", "40"]);
    let out = gmtc(&["analyze", "entropy", "--ckpt", s(&f.ckpt()), "--features", s(&cache), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
