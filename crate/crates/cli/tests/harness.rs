use std::fs;
use std::path::Path;
use std::process::Command;

use vtsfd_cli::experiment::{run_experiment, run_table, Builtin, DataSource, Manifest, RunConfig, Settings};
use vtsfd_cli::{HarnessError, METRIC_COLUMNS, REPORT_COLUMNS};
use vtsfd_core::{fit, FcmConfig, Index, IndexReport};

fn builtin(name: &str, seed: u64, out: &Path) -> RunConfig {
    let which: Builtin = name.parse().unwrap();
    RunConfig::new(DataSource::Builtin { which, seed }, out)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn e1071_three_report_reads_three_in_the_fch_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = builtin("e1071-3", 0, dir.path());
    config.k_max = Some(10);
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.verdict(Index::Fch), 3);
    let (header, rows) = read_csv(&dir.path().join("report.csv"));
    assert_eq!(header, REPORT_COLUMNS);
    let col = header.iter().position(|h| h == "V_FCH").unwrap();
    assert_eq!(rows[0][col], "3");
    assert_eq!(rows[0][2], "3", "true cluster count from labels");
}

#[test]
fn ruspini_report_reads_four_in_the_xb_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = builtin("ruspini", 0, dir.path());
    config.k_max = Some(12);
    run_experiment(&config).unwrap();
    let (header, rows) = read_csv(&dir.path().join("report.csv"));
    let col = header.iter().position(|h| h == "V_XB").unwrap();
    assert_eq!(rows[0][col], "4");
    for file in ["metrics_Ruspini.csv", "report.txt", "visual_tsfd_Ruspini.svg", "elbow_tsfd_Ruspini.svg"] {
        assert!(dir.path().join(file).is_file(), "{file}");
    }
}

#[test]
fn singleton_range_fills_every_column_but_the_elbow() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = builtin("ruspini", 0, dir.path());
    config.k_min = Some(3);
    config.k_max = Some(3);
    let report = run_experiment(&config).unwrap();
    assert!(report.elbow_tsfd.is_err());
    let (header, rows) = read_csv(&dir.path().join("report.csv"));
    for (h, cell) in header.iter().zip(&rows[0]) {
        match h.as_str() {
            "Elbow_TSFD" => assert_eq!(cell, "insufficient range"),
            "dataset" | "n_points" | "n_clusters" => assert!(!cell.is_empty()),
            _ => assert_eq!(cell, "3", "{h}"),
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let mut config = builtin("e1071-3-overlapped", 2, dir.path());
        config.k_max = Some(8);
        run_experiment(&config).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn metrics_csv_serializes_library_values_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = builtin("ruspini", 0, dir.path());
    config.k_max = Some(6);
    config.fcm.seed = 21;
    run_experiment(&config).unwrap();
    let (header, rows) = read_csv(&dir.path().join("metrics_Ruspini.csv"));
    assert_eq!(header, METRIC_COLUMNS);
    let data = vtsfd_core::ruspini_fixture();
    for row in rows {
        let k: usize = row[0].parse().unwrap();
        let model = fit(&data, &FcmConfig { k, ..config.fcm.clone() }).unwrap();
        let r = IndexReport::compute(&data, &model, config.fcm.m).unwrap();
        let expected = [
            r.inertia.fw, r.inertia.fb, r.inertia.fi, r.v_pc, r.v_cl, r.v_fratio, r.v_fch, r.v_fs, r.v_xb, r.sfd,
            r.tsfd, r.psfd,
        ];
        for (cell, want) in row[1..13].iter().zip(expected) {
            assert_eq!(cell.parse::<f64>().unwrap().to_bits(), want.to_bits(), "K={k}");
        }
        assert_eq!(row[14], model.iterations_run.to_string());
        assert_eq!(row[16], model.seed.to_string());
    }
}

#[test]
fn csv_input_with_labels_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let data = vtsfd_core::gen_gaussian_clusters(&vtsfd_core::GaussianSpec::new(3, 5)).unwrap();
    let csv_path = dir.path().join("blobs.csv");
    vtsfd_cli::write_dataset_csv(&data, &csv_path).unwrap();
    let mut config = RunConfig::new(
        DataSource::Csv {
            path: csv_path,
            label_column: Some("label".into()),
        },
        dir.path().join("out"),
    );
    config.k_max = Some(6);
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.dataset, "blobs");
    assert_eq!(report.true_clusters, Some(3));
    assert!(dir.path().join("out/visual_tsfd_blobs.svg").is_file());
}

#[test]
fn table_writes_per_dataset_directories_and_a_combined_report() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = Manifest::parse(
        r#"
        [defaults]
        k_max = 6
        restarts = 3

        [[dataset]]
        builtin = "ruspini"

        [[dataset]]
        builtin = "e1071-3"
        data_seed = 1
        "#,
    )
    .unwrap();
    let out = dir.path().join("table");
    let configs = manifest.run_configs(dir.path(), &out, &Settings::default()).unwrap();
    let reports = run_table(&configs, &out).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(out.join("Ruspini/metrics_Ruspini.csv").is_file());
    assert!(out.join("E1071-3/metrics_E1071-3.csv").is_file());
    let (_, rows) = read_csv(&out.join("report.csv"));
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["Ruspini", "E1071-3"]);
}

#[test]
fn failure_classes_map_to_harness_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = builtin("ruspini", 0, dir.path());
    config.k_max = Some(75);
    assert!(matches!(run_experiment(&config), Err(HarnessError::KRange(_))));
    config.k_max = Some(5);
    config.fcm.m = 0.5;
    assert!(matches!(run_experiment(&config), Err(HarnessError::Config(_))));
}

mod binary {
    use super::*;

    fn vtsfd(args: &[&str]) -> (i32, String, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_vtsfd")).args(args).output().unwrap();
        (
            out.status.code().unwrap(),
            String::from_utf8_lossy(&out.stdout).into_owned(),
            String::from_utf8_lossy(&out.stderr).into_owned(),
        )
    }

    #[test]
    fn generate_then_sweep_succeeds() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("e3.csv");
        let out = dir.path().join("out");
        let (code, _, err) = vtsfd(&["generate", "e1071-3", "--seed", "3", "--out", csv.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let (code, stdout, err) = vtsfd(&[
            "sweep",
            "--input",
            csv.to_str().unwrap(),
            "--label-column",
            "label",
            "--k-max",
            "6",
            "--restarts",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(stdout.starts_with("dataset"));
        assert!(out.join("report.txt").is_file());
    }

    #[test]
    fn exit_codes_follow_failure_class() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let out = d.join("o");
        let out = out.to_str().unwrap();

        let missing = d.join("missing.csv");
        assert_eq!(vtsfd(&["sweep", "--input", missing.to_str().unwrap(), "--out", out]).0, 2);

        let bad = d.join("bad.csv");
        fs::write(&bad, "x,y\n1,2\n3,oops\n").unwrap();
        let (code, _, err) = vtsfd(&["sweep", "--input", bad.to_str().unwrap(), "--out", out]);
        assert_eq!(code, 3);
        assert!(err.contains(":3:"), "{err}");

        let same = d.join("same.csv");
        fs::write(&same, "x,y\n1,2\n1,2\n1,2\n").unwrap();
        assert_eq!(vtsfd(&["sweep", "--input", same.to_str().unwrap(), "--out", out]).0, 4);

        assert_eq!(vtsfd(&["sweep", "--builtin", "ruspini", "--k-max", "99", "--out", out]).0, 5);
        assert_eq!(vtsfd(&["sweep", "--builtin", "ruspini", "--m", "1", "--out", out]).0, 3);
        assert_eq!(vtsfd(&["sweep", "--builtin", "nonsense", "--out", out]).0, 3);
        assert_eq!(vtsfd(&["frobnicate"]).0, 3);
        assert_eq!(vtsfd(&["--help"]).0, 0);

        let manifest = d.join("m.toml");
        fs::write(&manifest, "[[dataset]]\nbuiltin = \"ruspini\"\nunknown = 1\n").unwrap();
        assert_eq!(vtsfd(&["table", "--manifest", manifest.to_str().unwrap(), "--out", out]).0, 3);
    }
}
