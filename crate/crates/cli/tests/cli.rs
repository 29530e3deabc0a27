use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mediasent(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mediasent"))
        .current_dir(dir)
        .env_remove("MEDIASENT_CONFIG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mediasent(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    mediasent(dir, args).status.code().unwrap()
}

fn fixture(dir: &Path) {
    ok(
        dir,
        &["synth", "--out", ".", "--months", "66", "--seed", "5"],
    );
}

#[test]
fn synth_then_run_produces_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fixture(d);
    ok(d, &["run", "--config", "pipeline.toml"]);
    for name in [
        "corpus.csv",
        "model.bin",
        "cv.csv",
        "classified.csv",
        "emsi.csv",
        "macro_prepared.csv",
        "granger.csv",
        "long_run.csv",
        "report.txt",
    ] {
        assert!(d.join("out").join(name).is_file(), "{name} missing");
    }
    let emsi = fs::read_to_string(d.join("out/emsi.csv")).unwrap();
    assert!(emsi.starts_with("# mediasent "));
    assert!(emsi.contains("seed=5"));
}

#[test]
fn config_comes_from_the_environment_and_overrides_apply() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fixture(d);
    let out = Command::new(env!("CARGO_BIN_EXE_mediasent"))
        .current_dir(d)
        .env("MEDIASENT_CONFIG", "pipeline.toml")
        .args([
            "run",
            "--set",
            "output_dir=alt",
            "--seed",
            "9",
            "--set",
            "index.subgroups=[]",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let emsi = fs::read_to_string(d.join("alt/emsi.csv")).unwrap();
    assert!(emsi.contains("seed=9"));
    assert!(!emsi.contains("emsi_print"));
}

#[test]
fn step_commands_match_the_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fixture(d);
    ok(d, &["run", "--config", "pipeline.toml"]);
    // Stepwise with the same settings reproduces the pipeline's classified items.
    ok(
        d,
        &[
            "ingest",
            "--in",
            "batches",
            "--query",
            "query.txt",
            "--out",
            "s/corpus.csv",
        ],
    );
    ok(
        d,
        &[
            "train",
            "--labels",
            "labels.csv",
            "--corpus",
            "s/corpus.csv",
            "--model",
            "s/model.bin",
        ],
    );
    ok(
        d,
        &[
            "classify",
            "--model",
            "s/model.bin",
            "--corpus",
            "s/corpus.csv",
            "--out",
            "s/classified.csv",
        ],
    );
    let body = |p: &str| {
        let t = fs::read_to_string(d.join(p)).unwrap();
        t.lines().skip(1).map(str::to_string).collect::<Vec<_>>()
    };
    assert_eq!(body("s/classified.csv"), body("out/classified.csv"));

    let matched = ok(
        d,
        &["query", "--expr", "economy", "--corpus", "s/corpus.csv"],
    );
    assert!(matched.ends_with("items match\n"), "{matched}");
    let cv = ok(d, &["cv", "--k", "4", "--seed", "2"]);
    assert!(cv.contains("pooled"));
    let top = ok(
        d,
        &[
            "top-words",
            "--model",
            "s/model.bin",
            "--a",
            "negative",
            "--b",
            "positive",
            "--n",
            "5",
        ],
    );
    assert_eq!(
        top.lines()
            .filter(|l| l.starts_with("negative,positive,"))
            .count(),
        5
    );

    ok(
        d,
        &[
            "index",
            "--classified",
            "s/classified.csv",
            "--out",
            "s/emsi.csv",
            "--subgroups",
            "print_online",
        ],
    );
    let header = body("s/emsi.csv")[0].clone();
    assert!(
        header.starts_with("month,emsi,n_positive,n_negative,n_irrelevant,emsi_print,emsi_online")
    );

    let granger = ok(
        d,
        &[
            "granger",
            "--x",
            "s/emsi.csv",
            "--y",
            "survey.csv",
            "--kmax",
            "4",
        ],
    );
    assert!(granger.contains("emsi_print"));
    let contemp = ok(
        d,
        &[
            "contemp",
            "--survey",
            "survey.csv",
            "--emsi",
            "s/emsi.csv",
            "--controls",
            "macro.csv",
        ],
    );
    assert!(contemp.contains("lagged"));
    ok(
        d,
        &[
            "summary",
            "--x",
            "s/emsi.csv",
            "--y",
            "survey.csv",
            "--controls",
            "macro.csv",
            "--out",
            "s/sum.csv",
        ],
    );
    assert!(fs::read_to_string(d.join("s/sum.csv"))
        .unwrap()
        .contains("unemployment"));
    assert!(ok(d, &["qlr", "--series", "survey.csv"]).contains("break_month"));
}

#[test]
fn prep_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fixture(d);
    let gap = ok(
        d,
        &["prep", "gap", "--gdp", "gdp_q.csv", "--lambda", "129600"],
    );
    assert_eq!(gap.lines().nth(1), Some("period,gdp_gap"));
    assert_eq!(gap.lines().count(), 2 + 66);

    let yoy = ok(
        d,
        &["prep", "yoy", "--in", "macro.csv", "--column", "inflation"],
    );
    assert_eq!(yoy.lines().count(), 2 + 66 - 12);

    fs::write(d.join("cpi.csv"), "period,cpi\n2020-01,100\n2020-02,200\n").unwrap();
    fs::write(d.join("wage.csv"), "period,wage\n2020-01,50\n2020-02,50\n").unwrap();
    let real = ok(
        d,
        &["prep", "deflate", "--in", "wage.csv", "--cpi", "cpi.csv"],
    );
    assert!(
        real.ends_with("period,wage\n2020-01,50\n2020-02,25\n"),
        "{real}"
    );

    fs::write(
        d.join("waves.csv"),
        "period,a1,a2,a3,a4,a5,a6\n2020-01,10,20,30,25,10,5\n",
    )
    .unwrap();
    let bal = ok(d, &["prep", "balance", "--waves", "waves.csv"]);
    assert!(bal.ends_with("period,balance\n2020-01,5\n"), "{bal}");

    let dm = ok(
        d,
        &["prep", "demean", "--in", "cpi.csv", "--break", "2020-02"],
    );
    assert!(dm.ends_with("period,cpi\n2020-01,0\n2020-02,0\n"), "{dm}");

    assert!(ok(d, &["prep", "adf", "--in", "survey.csv", "--max-lag", "4"]).contains("survey"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(d, &["no-such-command"]), 1);
    assert_eq!(code(d, &["granger", "--x", "a.csv"]), 1);
    assert_eq!(code(d, &["run"]), 1);
    assert_eq!(code(d, &["--help"]), 0);
    assert_eq!(
        code(
            d,
            &["prep", "demean", "--in", "x.csv", "--break", "1995-13"]
        ),
        1
    );

    // Data errors: a missing file and a corrupted batch file.
    assert_eq!(code(d, &["qlr", "--series", "missing.csv"]), 2);
    fs::create_dir(d.join("b")).unwrap();
    fs::write(d.join("b/bad.txt"), "not a batch file\n").unwrap();
    let out = mediasent(d, &["ingest", "--in", "b", "--out", "c.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.txt") && msg.contains("byte"), "{msg}");

    // A constant series leaves the unit-root regression singular.
    let mut flat = String::from("period,flat\n");
    for i in 0..40 {
        flat.push_str(&format!("{}-{:02},1\n", 2000 + i / 12, i % 12 + 1));
    }
    fs::write(d.join("flat.csv"), flat).unwrap();
    assert_eq!(
        code(d, &["prep", "adf", "--in", "flat.csv", "--max-lag", "1"]),
        3
    );
}
