use std::path::Path;
use std::process::{Command, Output};

use haltreg::machine::{enumerate_programs, Alphabet};

fn haltreg(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haltreg")).arg("--cache-dir").arg(cache).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn enumerate_size_zero_is_the_empty_program() {
    let dir = tempfile::tempdir().unwrap();
    let o = haltreg(dir.path(), &["enumerate", "--max-size", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\t(empty)\ncount 1\n");
}

#[test]
fn enumerate_lists_single_instructions() {
    let dir = tempfile::tempdir().unwrap();
    let o = haltreg(dir.path(), &["enumerate", "--max-size", "1", "--registers", "1", "--max-offset", "1"]);
    let listed: Vec<String> = stdout(&o).lines().filter_map(|l| l.split_once('\t')).map(|(_, p)| p.to_string()).collect();
    // a jump at position 0 of a one-instruction program may land on 0 or 1
    assert_eq!(listed, ["(empty)", "INC 1", "DEC 1", "JZ 1 +0", "JZ 1 +1", "JMP +0", "JMP +1"]);
}

#[test]
fn enumerate_count_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = haltreg(dir.path(), &["enumerate", "--max-size", "3", "--json"]);
    let v = json(&o);
    assert_eq!(v["count"].as_u64().unwrap() as usize, enumerate_programs(&Alphabet::new(2, 2), 3).len());
}

#[test]
fn bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(haltreg(dir.path(), &["enumerate", "--max-size", "1", "--registers", "0"]).status.code(), Some(2));
    assert_eq!(haltreg(dir.path(), &["enumerate"]).status.code(), Some(2));
    assert_eq!(haltreg(dir.path(), &["cutoff-scan", "--c", "1", "--inputs", "4..2", "--max-size", "1"]).status.code(), Some(2));
    assert_eq!(haltreg(dir.path(), &["hopf", "antipode", "--program", "JMP 7"]).status.code(), Some(2));
}

fn scan(cache: &Path, out: &Path, c: &str) -> Output {
    let out = out.to_str().unwrap();
    haltreg(cache, &["cutoff-scan", "--c", c, "--inputs", "1..8", "--max-size", "2", "--super-budget", "2000", "--out", out])
}

#[test]
fn scans_are_reproducible_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (a, b, cold, doubled) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("cold"), dir.path().join("d"));
    assert!(scan(&cache, &a, "1").status.success());
    assert!(scan(&cache, &b, "1").status.success());
    assert!(scan(&dir.path().join("fresh"), &cold, "1").status.success());
    for f in ["cutoff_scan.json", "cutoff_scan.csv"] {
        let first = std::fs::read(a.join(f)).unwrap();
        assert_eq!(first, std::fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(first, std::fs::read(cold.join(f)).unwrap(), "{f} after resume");
    }
    assert!(scan(&cache, &doubled, "2").status.success());
    let unknown = |d: &Path| -> Vec<u64> {
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("cutoff_scan.json")).unwrap()).unwrap();
        v["rows"].as_array().unwrap().iter().map(|r| r["unknown"].as_u64().unwrap()).collect()
    };
    let (u1, u2) = (unknown(&a), unknown(&doubled));
    assert_eq!(u1.len(), 8);
    assert!(u1.iter().zip(&u2).all(|(x, y)| y <= x), "{u1:?} vs {u2:?}");
    let csv = std::fs::read_to_string(a.join("cutoff_scan.csv")).unwrap();
    assert!(csv.starts_with("x,budget,halted,proven_divergent,unknown,halted_super,halting_fraction\n"));
}

#[test]
fn empty_program_set_gives_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("none.txt");
    std::fs::write(&list, "# nothing\n").unwrap();
    let out = dir.path().join("out");
    let o = haltreg(dir.path(), &["cutoff-scan", "--c", "1", "--inputs", "1..5", "--programs", list.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("cutoff_scan.json")).unwrap()).unwrap();
    assert_eq!(v["programs"], 0);
    assert!(v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn cache_mismatch_exits_3_until_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["complexity", "--k-max", "200", "--table-steps", "300"];
    assert!(haltreg(dir.path(), &args).status.success());
    let file = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("\"alphabet_hash\":\"", "\"alphabet_hash\":\"00", 1)).unwrap();
    assert_eq!(haltreg(dir.path(), &args).status.code(), Some(3));
    let mut rebuild = args.to_vec();
    rebuild.push("--rebuild");
    assert!(haltreg(dir.path(), &rebuild).status.success());
    assert!(haltreg(dir.path(), &args).status.success());
}

#[test]
fn cache_dir_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_haltreg"))
        .env("HALTREG_CACHE_DIR", dir.path())
        .args(["complexity", "--k-max", "50", "--table-steps", "100"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn psi_of_a_diverger_is_polar() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&haltreg(dir.path(), &["series", "psi", "--program", "JMP 0", "--horizon", "40", "--classify"]));
    assert_eq!(v["classification"]["verdict"]["kind"], "polar_at_one");
}

#[test]
fn psi_of_identity_has_inverse_square_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&haltreg(dir.path(), &["series", "psi", "--program", "", "--k", "3", "--horizon", "6"]));
    let coeffs = v["series"]["coefficients"].as_array().unwrap();
    for (n, c) in coeffs.iter().enumerate() {
        let d = 1 + 3 * n as u64;
        assert_eq!((c["num"].as_str().unwrap(), c["den"].as_str().unwrap()), ("1", (d * d).to_string().as_str()));
    }
    let v = json(&haltreg(dir.path(), &["series", "psi", "--program", "", "--horizon", "0"]));
    assert_eq!(v["series"]["coefficients"], serde_json::json!([{ "num": "1", "den": "1" }]));
}

#[test]
fn uncertified_input_exits_4_with_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = haltreg(dir.path(), &["series", "psi", "--program", "INC 2; JMP -1", "--k", "7", "--steps", "500"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("index 7"));
    let o = haltreg(dir.path(), &["hopf", "birkhoff", "--program", "INC 2; JMP -1", "--steps", "500"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn hopf_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let co = stdout(&haltreg(dir.path(), &["hopf", "coproduct", "--program", "INC 1"]));
    assert_eq!(co.trim().split(" + ").count(), 2);
    let s = stdout(&haltreg(dir.path(), &["hopf", "antipode", "--program", "INC 1; DEC 2"]));
    assert_eq!(s.trim(), "[INC 1]·[DEC 2] - [INC 1; DEC 2]");
    let b = json(&haltreg(dir.path(), &["hopf", "birkhoff", "--program", "JMP 0", "--json"]));
    let g = &b["generators"][0];
    assert_eq!((g["phi_minus"].as_str(), g["phi_plus"].as_str(), g["identity"].as_str()), (Some("-u^-1"), Some("0"), Some("PASS")));
}

#[test]
fn phi_k_reads_the_complexity_table() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&haltreg(dir.path(), &["series", "phi-k", "--translate", "1", "--horizon", "5", "--k-max", "3000"]));
    assert_eq!(v["series"]["terms"].as_object().unwrap().len(), 5);
    let o = haltreg(dir.path(), &["series", "phi-k", "--translate", "1", "--horizon", "5000", "--k-max", "3000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn tolerance_decides_halting_psi() {
    let dir = tempfile::tempdir().unwrap();
    let strict = json(&haltreg(dir.path(), &["series", "psi", "--program", "INC 1", "--horizon", "64", "--classify"]));
    assert!(strict["classification"]["inconclusive"].is_string());
    let loose = json(&haltreg(dir.path(), &["series", "psi", "--program", "INC 1", "--horizon", "64", "--classify", "--tolerance", "0.01"]));
    assert_eq!(loose["classification"]["verdict"]["kind"], "regular_on_disk");
    assert_eq!(haltreg(dir.path(), &["series", "psi", "--program", "INC 1", "--tolerance", "0"]).status.code(), Some(2));
}
