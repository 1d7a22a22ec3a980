use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sfm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfm"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SFM_DATA_DIR")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

const TINY: &str = "dataset = \"parity4\"\nclassifier = \"knn\"\nfolds = 4\n";

#[test]
fn no_command_prints_usage_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = sfm(&[], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn unknown_flag_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.toml", TINY);
    let o = sfm(&["run", "--config", &cfg, "--frobnicate"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sfm(&["--help"], dir.path())), 0);
}

#[test]
fn run_with_seed_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", TINY);
    let o = sfm(&["run", "--config", &cfg, "--seed", "7", "--out", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let results = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 4);
    assert!(results.starts_with("dataset,classifier,family_combo,fold,accuracy\n"));
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("parity4,knn,X,4,"));
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.toml",
        "dataset = \"parity6\"\nfamilies = \"H\"\nfolds = 3\n[params]\ndirections = 60\n",
    );
    for out in ["a", "b"] {
        let o = sfm(&["run", "--config", &cfg, "--seed", "11", "--out", out], dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for file in ["results.csv", "summary.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
}

#[test]
fn gen_parity_writes_every_vector() {
    let dir = tempfile::tempdir().unwrap();
    let o = sfm(&["gen-parity", "--bits", "8", "--out", "parity8.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("parity8.csv")).unwrap();
    assert_eq!(text.lines().count(), 256);
    assert_eq!(text.lines().last().unwrap(), "1,1,1,1,1,1,1,1,even");
}

#[test]
fn gen_parity_rejects_zero_bits() {
    let dir = tempfile::tempdir().unwrap();
    let o = sfm(&["gen-parity", "--bits", "0", "--out", "p.csv"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "a.toml", "datset = \"parity4\"\n");
    assert_eq!(code(&sfm(&["run", "--config", &unknown], dir.path())), 2);
    let one_fold = write_config(dir.path(), "b.toml", "dataset = \"parity4\"\nfolds = 1\n");
    assert_eq!(code(&sfm(&["run", "--config", &one_fold], dir.path())), 2);
    let bad_family = write_config(dir.path(), "c.toml", "dataset = \"parity4\"\nfamilies = \"Q\"\n");
    assert_eq!(code(&sfm(&["run", "--config", &bad_family], dir.path())), 2);
    let cfg = write_config(dir.path(), "d.toml", TINY);
    assert_eq!(code(&sfm(&["run", "--config", &cfg, "--jobs", "0"], dir.path())), 2);
    assert_eq!(code(&sfm(&["sweep", "--config", &cfg], dir.path())), 2);
}

#[test]
fn missing_dataset_file_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.toml", "dataset = \"nowhere.manifest\"\n");
    let o = sfm(&["run", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nowhere"));
}

#[test]
fn data_dir_resolves_bare_names() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("store");
    fs::create_dir(&data).unwrap();
    let o = sfm(&["gen-parity", "--bits", "4", "--out", "store/p4.csv"], dir.path());
    assert_eq!(code(&o), 0);
    fs::write(
        data.join("p4.manifest"),
        "name = p4\npath = p4.csv\nclass_column = last\nhas_header = false\n",
    )
    .unwrap();
    let cfg = write_config(dir.path(), "e.toml", "dataset = \"p4\"\nclassifier = \"knn\"\nfolds = 4\n");
    let o = Command::new(env!("CARGO_BIN_EXE_sfm"))
        .args(["run", "--config", &cfg, "--out", "out"])
        .current_dir(dir.path())
        .env("SFM_DATA_DIR", &data)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert!(summary.contains("\np4,knn,X,4,"));
}

#[test]
fn partial_table_still_writes_rows_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.toml",
        "datasets = [\"parity4\", \"absent.manifest\"]\nclassifier = \"knn\"\ncombos = [\"X\"]\nfolds = 4\n",
    );
    let o = sfm(&["table", "--config", &cfg, "--out", "out"], dir.path());
    assert_eq!(code(&o), 1);
    let table = fs::read_to_string(dir.path().join("out/table.csv")).unwrap();
    assert!(table.contains("parity4"));
    let text = fs::read_to_string(dir.path().join("out/table.txt")).unwrap();
    assert!(text.contains("skipped"));
}

#[test]
fn table_with_no_datasets_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.toml", "combos = [\"X\"]\n");
    assert_eq!(code(&sfm(&["table", "--config", &cfg], dir.path())), 2);
}

#[test]
fn sweep_writes_one_row_per_anchor_and_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "dataset = \"gaussians\"\n[params]\nbeta = 1.0\n[sweep]\nalphas = [0.0, 0.1]\ndeltas = [0.5]\nper_class = 20\n",
    );
    let o = sfm(&["sweep", "--config", &cfg, "--out", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "alpha,delta,anchor_x,anchor_y,class,accepted");
    assert_eq!(lines.count(), 2 * 40);
}

#[test]
fn saved_parity_model_is_led_by_popcount_windows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.toml",
        "dataset = \"parity6\"\nfamilies = \"H\"\nfolds = 3\n[params]\ndirections = 60\n",
    );
    let o = sfm(&["run", "--config", &cfg, "--out", "out", "--save-model"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = sfm(&["inspect-model", "out/model.txt", "out/space.txt"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let listing = String::from_utf8(o.stdout).unwrap();
    let top = listing.lines().nth(2).expect("at least one feature");
    assert!(top.contains("window"), "{listing}");
}

#[test]
fn inspect_rejects_mismatched_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.txt"), "model linear\nc 1\nbias 0\nweights 2\n1\n2\n").unwrap();
    fs::write(dir.path().join("s.txt"), "space 1 1\noriginal 0 0\n").unwrap();
    let o = sfm(&["inspect-model", "m.txt", "s.txt"], dir.path());
    assert_eq!(code(&o), 1);
    let o = sfm(&["inspect-model", "m.txt"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    let cfg = write_config(dir.path(), "t.toml", TINY);
    let o = sfm(&["run", "--config", &cfg, "--out", "blocker/sub"], dir.path());
    assert_eq!(code(&o), 1);
}
