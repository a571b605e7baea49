use std::path::{Path, PathBuf};
use std::process::Command;

use ice_lab::catalog;
use ice_lab_cli::expect::{evaluate_all, Status};
use ice_lab_cli::gamefile::{parse, serialize};
use ice_lab_cli::{load, run, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};

fn games() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn game(name: &str) -> String {
    games().join(name).to_string_lossy().into_owned()
}

fn ice_lab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["ice-lab"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(games())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "game"))
        .collect();
    v.sort();
    v
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_codes() {
    assert_eq!(ice_lab(&["--help"]).0, EXIT_OK);
    assert_eq!(ice_lab(&["check"]).0, EXIT_USAGE);
    assert_eq!(ice_lab(&["frobnicate", "x"]).0, EXIT_USAGE);
    assert_eq!(ice_lab(&["check", "/nonexistent.game"]).0, EXIT_USAGE);
    let pd = game("prisoners_dilemma_3_4.game");
    assert_eq!(ice_lab(&["check", &pd, "--dist", "cooperate", "--expect", "yes"]).0, EXIT_OK);
    let (code, out, _) = ice_lab(&["check", &pd, "--dist", "cooperate", "--expect", "no"]);
    assert_eq!(code, EXIT_MISMATCH);
    assert!(out.contains("expectation failed"));
    assert_eq!(ice_lab(&["sets", &pd, "--expect", "yes"]).0, EXIT_USAGE);
    // Two distributions and no --dist.
    let (code, _, err) = ice_lab(&["check", &pd]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cooperate, defect"), "{err}");
    assert_eq!(ice_lab(&["check", &pd, "--dist", "nope"]).0, EXIT_USAGE);
    assert_eq!(ice_lab(&["check", &pd, "--dist", "cooperate", "--threats", "nope"]).0, EXIT_USAGE);
    let pd6 = game("prisoners_dilemma_3_6.game");
    assert_eq!(ice_lab(&["classify", &pd6, "--expect", "no"]).0, EXIT_OK);
    assert_eq!(ice_lab(&["oracle", &pd6, "--expect", "yes"]).0, EXIT_MISMATCH);
    assert_eq!(ice_lab(&["oracle", &pd6, "--mode", "minimax"]).0, EXIT_USAGE);
}

#[test]
fn malformed_rows_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(game("prisoners_dilemma_3_4.game")).unwrap();
    let bad = text.replace("D,C : 4 0", "D,C : 4 zero");
    let path = write_temp(&dir, "bad.game", &bad);
    let (code, _, err) = ice_lab(&["check", &path, "--dist", "cooperate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bad.game:9:11: malformed number \"zero\""), "{err}");

    let bad = text.replace("  C,C = 1\n", "  C,C = 1/2\n");
    let path = write_temp(&dir, "sum.game", &bad);
    let (code, _, err) = ice_lab(&["check", &path, "--dist", "cooperate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("sums to 1/2"), "{err}");
}

#[test]
fn bundled_files_round_trip() {
    let files = bundled();
    assert_eq!(files.len(), 5);
    for f in files {
        let g = load(&f).unwrap();
        let again = parse(&serialize(&g)).unwrap();
        assert_eq!(again, g, "{}", f.display());
        assert_eq!(serialize(&again), serialize(&g));
    }
}

#[test]
fn bundled_environments_match_the_catalog() {
    let pd = |name: &str| load(&games().join(name)).unwrap().env;
    let same_payoffs = |a: &ice_lab::Environment, b: &ice_lab::Environment| {
        a.profiles().all(|p| (0..2).all(|i| a.payoff(i, &p) == b.payoff(i, &p)))
    };
    assert!(same_payoffs(&pd("prisoners_dilemma_3_4.game"), &catalog::prisoners_dilemma_int(0, 1, 3, 4)));
    assert!(same_payoffs(&pd("prisoners_dilemma_3_6.game"), &catalog::prisoners_dilemma_int(0, 1, 3, 6)));
    assert!(same_payoffs(&pd("chicken.game"), &catalog::chicken()));
    assert!(same_payoffs(&pd("example2_k2.game"), &catalog::punishment_cycle(2)));
    assert!(same_payoffs(&pd("example3_k5.game"), &catalog::punishment_cycle(5)));
}

#[test]
fn bundled_claims_hold_or_are_marked() {
    let mut divergences = Vec::new();
    for f in bundled() {
        let g = load(&f).unwrap();
        for o in evaluate_all(&g).unwrap() {
            assert!(
                !o.status.is_failure(),
                "{}:{}: {} {} stated {} got {}",
                f.display(),
                o.expectation.line,
                o.expectation.selector.join(" "),
                o.expectation.key,
                o.expectation.value,
                o.actual
            );
            assert_ne!(o.status, Status::DivergenceNotObserved, "{}:{}", f.display(), o.expectation.line);
            if o.status == Status::DocumentedDivergence {
                divergences.push(format!("{}:{}", f.file_name().unwrap().to_string_lossy(), o.expectation.key));
            }
        }
    }
    assert_eq!(divergences, ["chicken.game:vertices", "example2_k2.game:a_infinity.set"]);
}

fn golden(name: &str, args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let out_s = out.to_string_lossy().into_owned();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", &out_s]);
    let (code, _, err) = ice_lab(&full);
    assert_eq!(code, EXIT_OK, "{err}");
    let got = std::fs::read_to_string(&out).unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("ICE_LAB_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "report {name} changed; rerun with ICE_LAB_UPDATE_GOLDEN=1 if intended");
}

#[test]
fn golden_reports() {
    golden("check_pd34_cooperate.json", &["check", &game("prisoners_dilemma_3_4.game"), "--dist", "cooperate"]);
    golden("check_chicken_both_work.json", &["check", &game("chicken.game"), "--dist", "both_work"]);
    golden("classify_pd36.json", &["classify", &game("prisoners_dilemma_3_6.game")]);
    golden("oracle_pd34.json", &["oracle", &game("prisoners_dilemma_3_4.game"), "--dist", "cooperate", "--seed", "9", "--samples", "500"]);
    golden("region_chicken_all.json", &["region", &game("chicken.game"), "--which", "all"]);
    golden("sets_chicken.json", &["sets", &game("chicken.game")]);
}

#[test]
fn command_examples() {
    let (code, out, _) = ice_lab(&["check", &game("chicken.game"), "--dist", "both_work"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("CE:  no") && out.contains("IR:  yes") && out.contains("ICE: yes"), "{out}");

    let (_, out, _) = ice_lab(&["classify", &game("chicken.game"), "--dist", "both_work"]);
    for line in out.lines().filter(|l| l.contains("B = ")) {
        assert!(line.contains(" yes "), "{line}");
    }

    let (_, out, _) = ice_lab(&["oracle", &game("prisoners_dilemma_3_6.game")]);
    assert!(out.contains("LP:        no") && out.contains("Farkas multipliers (verified)"));
    assert!(out.contains("mechanism: no") && out.contains("best deviation C=D D=D"), "{out}");
}

#[test]
fn oracle_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let p = p.to_string_lossy().into_owned();
        let args = ["oracle", &game("chicken.game"), "--dist", "floor", "--seed", "42", "--samples", "3000", "--out", &p];
        assert_eq!(ice_lab(&args).0, EXIT_OK);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(report["simulation"]["seed"], 42);
    assert_eq!(report["agreement"], true);
}

#[test]
fn region_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ir.csv").to_string_lossy().into_owned();
    assert_eq!(ice_lab(&["region", &game("chicken.game"), "--which", "ir", "--out", &csv]).0, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "1,1\n5,1\n4,4\n1,5\n");

    let svg = dir.path().join("all.svg").to_string_lossy().into_owned();
    assert_eq!(ice_lab(&["region", &game("chicken.game"), "--which", "all", "--out", &svg]).0, EXIT_OK);
    let s = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(s.matches("<polygon").count(), 3);
    assert_eq!(s.matches("<polyline").count(), 1);

    let csv_all = dir.path().join("x.csv").to_string_lossy().into_owned();
    assert_eq!(ice_lab(&["region", &game("chicken.game"), "--which", "all", "--out", &csv_all]).0, EXIT_USAGE);

    // Restricted threats need support enumeration, which regions do not do.
    let (code, _, err) = ice_lab(&["region", &game("example2_k2.game"), "--threats", "inner"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("support"), "{err}");
}

#[test]
fn degenerate_games() {
    let dir = tempfile::tempdir().unwrap();
    let flat = "players: a, b\nactions a: x, y\nactions b: u, v\npayoffs:\n  x,u : 2 7\n  x,v : 2 7\n  y,u : 2 7\n  y,v : 2 7\n";
    let path = write_temp(&dir, "flat.game", flat);
    let (code, out, _) = ice_lab(&["region", &path, "--which", "all"]);
    assert_eq!(code, EXIT_OK);
    for line in out.lines() {
        assert!(line.ends_with(": 2,7"), "{line}");
    }

    let single = "players: a, b\nactions a: x\nactions b: u\npayoffs:\n  x,u : 1 -1\n";
    let path = write_temp(&dir, "single.game", single);
    let out_json = dir.path().join("sets.json").to_string_lossy().into_owned();
    assert_eq!(ice_lab(&["sets", &path, "--out", &out_json]).0, EXIT_OK);
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&out_json).unwrap()).unwrap();
    for key in ["r", "cr", "fcr", "a_infinity"] {
        assert_eq!(r[key]["is_full"], true, "{key}");
    }

    let three = "players: a, b, c\nactions a: x, y\nactions b: u\nactions c: p\npayoffs:\n  x,u,p : 0 0 0\n  y,u,p : 1 0 0\n";
    let path = write_temp(&dir, "three.game", three);
    let (code, _, err) = ice_lab(&["region", &path, "--which", "ce"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unsupported"), "{err}");
}

#[test]
fn size_cap_refuses_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ice-lab"))
        .args(["sets", &game("example2_k2.game")])
        .env("ICE_LAB_SIZE_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("too large") && err.contains("cap is 100"), "{err}");
}
