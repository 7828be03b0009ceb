use std::process::Command;

use srcnoise_cli::config::{RunConfig, Settings};
use srcnoise_cli::{run, OutputFormat, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
use srcnoise_core::{ModelKind, Reconciliation};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("srcnoise").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
}

#[test]
fn presets_encode_figure_parameters() {
    for (name, recon, t_a) in [
        ("fig2a", Reconciliation::Reverse, 0.9),
        ("fig2b", Reconciliation::Reverse, 1.1),
        ("fig3a", Reconciliation::Direct, 0.9),
        ("fig3b", Reconciliation::Direct, 1.1),
    ] {
        let flags = Settings { preset: Some(name.into()), ..Settings::default() };
        let cfg = RunConfig::resolve(None, flags, "all").unwrap();
        assert_eq!((cfg.v, cfg.eps, cfg.eps_a, cfg.t_a), (20.0, 0.04, 0.1, t_a), "{name}");
        assert_eq!(cfg.recon, recon);
        assert_eq!(cfg.models, ModelKind::ALL.to_vec());
        let grid = cfg.t_grid();
        assert_eq!(grid.len(), 100);
        assert_eq!((grid[0], grid[29], grid[99]), (0.01, 0.3, 1.0));
    }
}

#[test]
fn flags_override_file_override_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "preset = \"fig2a\"\nV = 30\neps = 0.05\nmodel = \"np,un\"\nt-step = 0.05\n").unwrap();
    let file = Settings::from_file(&path).unwrap();
    let flags = Settings { eps: Some(0.02), ..Settings::default() };
    let cfg = RunConfig::resolve(Some(file), flags, "all").unwrap();
    assert_eq!(cfg.v, 30.0);
    assert_eq!(cfg.eps, 0.02);
    assert_eq!(cfg.t_a, 0.9);
    assert_eq!(cfg.models, vec![ModelKind::NeutralParty, ModelKind::UntrustedSource]);
    assert_eq!(cfg.t_grid().len(), 20);
    assert_eq!(cfg.format, OutputFormat::Csv);

    std::fs::write(&path, "volume = 3\n").unwrap();
    let (code, _, err) = call(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn sweep_csv_layout() {
    let (code, out, _) = call(&["sweep", "--t-min", "0.2", "--t-max", "0.9", "--t-step", "0.35"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.contains('\r'));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "model,recon,T,i_ab,holevo,key_rate,feasible");
    assert_eq!(lines.len(), 1 + 9);
    let keys: Vec<(String, String)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7);
            assert_eq!(f[1], "reverse");
            assert_eq!(f[6], "true");
            (f[0].to_string(), f[2].to_string())
        })
        .collect();
    assert_eq!(keys[0], ("neutral-party".into(), "0.2".into()));
    assert_eq!(keys[1], ("neutral-party".into(), "0.55".into()));
    assert_eq!(keys[8], ("untrusted".into(), "0.9".into()));
}

#[test]
fn infeasible_rows_are_flagged() {
    let (code, out, err) = call(&["sweep", "--preset", "fig2b", "--model", "bs", "--t-step", "0.33"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"));
    for line in out.lines().skip(1) {
        assert!(line.ends_with(",,,,false"), "{line}");
    }
}

#[test]
fn clamp_zero_floors_key_rate() {
    let (_, out, _) = call(&["sweep", "--preset", "fig3a", "--model", "np", "--t-max", "0.3", "--clamp-zero"]);
    for line in out.lines().skip(1) {
        assert_eq!(line.split(',').nth(5).unwrap(), "0", "{line}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["sweep", "--model", ""]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--model", "fred"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--t-max", "1.2"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--t-step", "0"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--beta", "1.5"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--format", "both"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["point"]).0, EXIT_USAGE);
}

#[test]
fn point_examples() {
    let base = ["point", "--V", "20", "--epsA", "0", "--TA", "1", "--eps", "0", "--T", "1"];
    let (code, out, _) = call(&base);
    assert_eq!(code, EXIT_OK);
    let k: f64 = field(&out, "key_rate").parse().unwrap();
    let h: f64 = field(&out, "holevo").parse().unwrap();
    assert!((k - 3.392).abs() < 1e-3);
    assert!(h.abs() < 1e-9);

    let (code, un, _) = call(&[&base[..], &["--model", "untrusted"]].concat());
    assert_eq!(code, EXIT_OK);
    let k_un: f64 = field(&un, "key_rate").parse().unwrap();
    assert!((k - k_un).abs() < 1e-9);

    let (code, _, err) = call(&[&base[..], &["--model", "beam-splitter"]].concat());
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("T_A != 1"), "{err}");

    let (code, _, err) = call(&["point", "--T", "0.5", "--TA", "1.3", "--epsA", "0.1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains(">="), "{err}");
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = call(&["verify"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.trim_end().ends_with("result=pass"));

    let (code, out, _) = call(&["verify", "--lemma-tolerance", "-1"]);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    assert!(out.contains("status=fail"));

    let (code, _, err) = call(&["verify", "--preset", "fig2b"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning: infeasible-source"), "{err}");

    assert_eq!(call(&["verify", "--TA", "1", "--epsA", "0"]).0, EXIT_USAGE);
}

#[test]
fn svg_chart() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("fig");
    let (code, _, _) = call(&["sweep", "--preset", "fig2a", "--format", "both", "--out", stem.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let svg = std::fs::read_to_string(stem.with_extension("svg")).unwrap();
    assert!(svg.contains(r#"width="800" height="600""#));
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert!(svg.contains("Transmittance T"));
    assert!(svg.contains("Key rate (bits"));
    assert!(svg.trim_end().ends_with("</svg>"));
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_srcnoise");
    let out = Command::new(bin).args(["sweep", "--preset", "fig2a"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout.iter().filter(|&&b| b == b'\n').count(), 301);
    let again = Command::new(bin).args(["sweep", "--preset", "fig2a"]).output().unwrap();
    assert_eq!(out.stdout, again.stdout);

    let bad = Command::new(bin).args(["sweep", "--model", ""]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let failed = Command::new(bin).args(["verify", "--lemma-tolerance", "-1"]).output().unwrap();
    assert_eq!(failed.status.code(), Some(1));
}
