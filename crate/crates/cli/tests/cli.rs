use std::path::Path;
use std::process::{Command, Output};

fn bornlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bornlab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn spectrum_lists_every_subset_by_order() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "s.toml",
        "experiment = \"spectrum\"\n[data]\nmodel = \"tfim\"\nn = 6\nj = 0.7\nh = 0.33\n",
    );
    let out = tmp.path().join("out");
    let o = bornlab(&["run", &cfg, "--out", out.to_str().unwrap(), "--svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out.join("correlations.csv"));
    assert_eq!(r.len(), 64);
    for k in 0..=6 {
        let count = r.iter().filter(|row| row[0] == *k.to_string()).count();
        assert_eq!(count, binom(6, k), "order {k}");
    }
    for row in &r {
        let mask: u64 = row[1].parse().unwrap();
        assert_eq!(mask.count_ones().to_string(), row[0]);
    }
    assert!(out.join("correlations.svg").exists());
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["experiment"], "spectrum");
    assert_eq!(meta["config"]["data"]["n"], 6);
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    assert!(meta["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .any(|a| a == "correlations.csv"));
}

#[test]
fn dla_check_reports_haldane_dimensions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "d.toml",
        "experiment = \"dla_check\"\n[dla]\nalgebra = \"haldane\"\nns = [3, 4, 5]\n",
    );
    let out = tmp.path().join("out");
    assert!(
        bornlab(&["run", &cfg, "--out", out.to_str().unwrap(), "--threads", "2"])
            .status
            .success()
    );
    let r = rows(&out.join("dla.csv"));
    let named: Vec<&str> = r.iter().map(|row| &row[3]).collect();
    assert_eq!(named, ["12", "60", "252"]);
    let closure: Vec<&str> = r.iter().map(|row| &row[2]).collect();
    assert_eq!(closure, ["13", "60", "252"]);
}

#[test]
fn train_deploy_writes_one_history_per_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "t.toml",
        r#"experiment = "train_deploy"
[data]
model = "heisenberg_alt"
n = 4
j_even = 1.0
j_odd = 0.3
[ansatz]
kind = "iqp"
pairs = 4
[loss]
kind = "kl"
[train]
iterations = 5
seeds = [4, 9]
[truncation]
kind = "full"
"#,
    );
    let out = tmp.path().join("out");
    let o = bornlab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for seed in [4, 9] {
        let h = rows(&out.join(format!("loss_history_k4_seed{seed}.csv")));
        assert_eq!(h.len(), 6);
    }
    assert_eq!(rows(&out.join("deployed_kl.csv")).len(), 2);
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.toml",
        "experiment = \"dla_check\"\n[dla]\nalgebra = \"matchgate\"\nns = [3]\nsize = 4\n",
    );
    let o = bornlab(&["validate", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("size"));
}

#[test]
fn unused_and_missing_sections_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let extra = write(
        tmp.path(),
        "extra.toml",
        "experiment = \"dla_check\"\n[dla]\nalgebra = \"matchgate\"\nns = [3]\n[pps]\nn = 3\nbudgets = [1]\n",
    );
    assert_eq!(bornlab(&["validate", &extra]).status.code(), Some(1));
    let missing = write(tmp.path(), "missing.toml", "experiment = \"variance_grid\"\n");
    let o = bornlab(&["validate", &missing]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("variance"));
}

#[test]
fn resource_caps_and_kl_truncation_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let big = write(
        tmp.path(),
        "big.toml",
        "experiment = \"spectrum\"\n[data]\nmodel = \"tfim\"\nn = 20\nj = 1.0\nh = 1.0\n",
    );
    assert_eq!(bornlab(&["validate", &big]).status.code(), Some(1));
    let kl = write(
        tmp.path(),
        "kl.toml",
        r#"experiment = "train_deploy"
[data]
model = "tfim"
n = 4
j = 1.0
h = 0.5
[ansatz]
kind = "strongly_entangling"
layers = 1
[loss]
kind = "kl"
[train]
[truncation]
kind = "k_order"
orders = [2]
"#,
    );
    assert_eq!(bornlab(&["validate", &kl]).status.code(), Some(1));
}

#[test]
fn validate_accepts_a_good_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "ok.toml",
        "experiment = \"rmps_grid\"\n[rmps]\nquantity = \"renyi\"\nns = [8]\nchis = [4]\n",
    );
    let o = bornlab(&["validate", &cfg]);
    assert!(o.status.success());
    assert!(
        std::fs::read_dir(tmp.path()).unwrap().count() == 1,
        "validate must not write artifacts"
    );
}

#[test]
fn runtime_failure_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "csv.toml",
        "experiment = \"spectrum\"\n[data]\nmodel = \"csv\"\npath = \"/nonexistent/data.csv\"\n",
    );
    let o = bornlab(&["run", &cfg, "--out", tmp.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_data_source_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("bits.csv");
    std::fs::write(&data, "a,b,c\n0,0,1\n1,1,0\n0,0,1\n1,0,1\n").unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        &format!(
            "experiment = \"spectrum\"\n[data]\nmodel = \"csv\"\npath = {:?}\n",
            data.to_str().unwrap()
        ),
    );
    let out = tmp.path().join("out");
    let o = bornlab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out.join("correlations.csv"));
    assert_eq!(r.len(), 8);
    // Bit c (least significant) is 1 in three of four rows: |⟨Z⟩| = |1 - 3| / 4.
    let z_c = r.iter().find(|row| &row[1] == "1").unwrap();
    assert_eq!(&z_c[2], "0.5");
}

#[test]
fn lattice_adjacency_is_recorded_for_2d_models() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "h.toml",
        "experiment = \"spectrum\"\n[data]\nmodel = \"haldane_2d\"\nnx = 2\nny = 3\nj = 1.0\nh1 = 0.5\nh2 = 0.2\n",
    );
    let out = tmp.path().join("out");
    assert!(bornlab(&["run", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("metadata.json")).unwrap()).unwrap();
    // 2×3 torus along y: 3 x-bonds plus 2·3 y-bonds, and three y-triplets per column.
    assert_eq!(meta["lattice"]["pairs"].as_array().unwrap().len(), 9);
    assert_eq!(meta["lattice"]["triplets"].as_array().unwrap().len(), 6);
}
