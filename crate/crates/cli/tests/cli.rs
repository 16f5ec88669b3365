use std::path::Path;
use std::process::{Command, Output};

fn modp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generate_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "d.csv");
    let args = ["generate", "--p", "3", "--seed", "42", "--count", "10"];
    stdout(&modp(
        &[&args[..], &["--train-fraction", "0.8", "--out", &out]].concat(),
    ));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y");
    assert_eq!(lines.len(), 11);
    for l in &lines[1..] {
        let (x, y) = l.split_once(',').unwrap();
        assert_eq!(x.parse::<u64>().unwrap() % 3, y.parse::<u64>().unwrap());
    }
    let meta = std::fs::read_to_string(format!("{out}.meta")).unwrap();
    assert_eq!(meta, "seed=42\ncount=10\np=3\nsplit=8/2\n");
    // stdout output matches the file byte for byte
    assert_eq!(stdout(&modp(&args)), csv);
}

#[test]
fn fourier_fit_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let model = path(dir.path(), "m.txt");
    stdout(&modp(&[
        "fit-fourier",
        "--p",
        "7",
        "--count",
        "30000",
        "--train-fraction",
        "0.8333333333333334",
        "--out",
        &model,
    ]));
    let text = std::fs::read_to_string(&model).unwrap();
    assert!(text.contains("p=7\nJ=3\n"));
    let report = stdout(&modp(&[
        "evaluate", "--model", &model, "--p", "7", "--count", "2000", "--seed", "99",
    ]));
    assert_eq!(
        report,
        "metric,value\nsamples,2000\naccuracy,1.0000000000000000e0\n"
    );
}

#[test]
fn mlp_fit_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let model = path(dir.path(), "net.txt");
    let history = path(dir.path(), "h.csv");
    stdout(&modp(&[
        "fit-mlp",
        "--p",
        "3",
        "--count",
        "2000",
        "--encoder",
        "one_gram_sum_mod3",
        "--epochs",
        "2",
        "--hidden",
        "8,4",
        "--history",
        &history,
        "--out",
        &model,
    ]));
    assert!(std::fs::read_to_string(&model)
        .unwrap()
        .starts_with("encoder=one_gram_sum_mod3\n"));
    let h = std::fs::read_to_string(&history).unwrap();
    assert_eq!(h.lines().count(), 3);
    let report = stdout(&modp(&[
        "evaluate", "--model", &model, "--p", "3", "--count", "500", "--seed", "5",
    ]));
    assert!(report.starts_with("metric,value\nsamples,500\naccuracy,"));
}

#[test]
fn encode_header() {
    let out = stdout(&modp(&[
        "encode",
        "--p",
        "2",
        "--count",
        "3",
        "--encoder",
        "binary",
    ]));
    let header = out.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 34);
    assert!(header.ends_with("f32,y"));
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn run_with_config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(dir.path(), "exp.cfg");
    std::fs::write(&config, "# mod 5\np=5\nmodel=fourier\nseeds=1,2\n").unwrap();
    let out = path(dir.path(), "report.csv");
    let summaries = path(dir.path(), "models.txt");
    let run = |o: &str| {
        stdout(&modp(&[
            "run",
            "--config",
            &config,
            "--count",
            "6000",
            "--out",
            o,
            "--summaries",
            &summaries,
        ]))
    };
    run(&out);
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.contains("# config.p=5\n"));
    assert!(report.contains("# config.count=6000\n"));
    assert!(report.contains("\n1,1,1.0000000000000000e0\n2,2,1.0000000000000000e0\n"));
    assert!(report.contains("\nstd,,0.0000000000000000e0\n"));
    assert_eq!(
        std::fs::read_to_string(&summaries)
            .unwrap()
            .matches("gamma=")
            .count(),
        2
    );
    let again = path(dir.path(), "again.csv");
    run(&again);
    assert_eq!(report, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn reproduce_table5() {
    let out = stdout(&modp(&["reproduce-table", "table5"]));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[1..].iter().all(|r| r.ends_with(",pass")), "{out}");
}

#[test]
fn plot_sawtooth() {
    let out = stdout(&modp(&[
        "emit-plot-data",
        "--kind",
        "sawtooth",
        "--p",
        "7",
        "--start",
        "0",
        "--stop",
        "7",
        "--step",
        "0.01",
    ]));
    assert_eq!(out.lines().count(), 702);
}

fn error_line(out: &Output) -> String {
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    err.trim_end().to_string()
}

#[test]
fn failures_are_one_line() {
    let e = error_line(&modp(&["reproduce-table", "table9"]));
    assert!(e.starts_with("error: unknown_table: "));
    assert!(e.contains("mod7_coeffs"));

    let e = error_line(&modp(&[
        "emit-plot-data",
        "--kind",
        "sawtooth",
        "--p",
        "3",
        "--start",
        "0",
        "--stop",
        "1",
        "--step",
        "0",
    ]));
    assert!(e.starts_with("error: grid: "));

    let e = error_line(&modp(&["generate", "--p", "1", "--count", "3"]));
    assert!(e.starts_with("error: invalid_modulus: "));

    let e = error_line(&modp(&["run", "--p", "3", "--seeds", ""]));
    assert!(e.starts_with("error: config: "));

    let e = error_line(&modp(&[
        "evaluate",
        "--model",
        "/nonexistent/m",
        "--p",
        "3",
        "--count",
        "3",
    ]));
    assert!(e.starts_with("error: io: "));

    let e = error_line(&modp(&["generate", "--p", "3"]));
    assert!(e.starts_with("error: usage: "));
}
