//! Command-layer tests: every report validates against the shipped schema's
//! required-keys contract, exit codes follow the 0/1/2 convention, and the
//! binary behaves on files and bad input.

use dkit_cli::{run, Command, Overrides, SystemSpec};
use serde_json::Value;
use std::process::Command as Process;

fn sphere_spec() -> SystemSpec {
    SystemSpec::from_json(
        r#"{
            "variables": ["x", "y", "z"],
            "components": ["y", "1 - x - x^2 - y^2 + z^2", "-2*y*z"],
            "mode": "sphere",
            "candidates": {
                "surfaces": ["z"],
                "exp_factors": [{"g": "0", "h": "1"}]
            }
        }"#,
    )
    .unwrap()
}

fn ambient_spec() -> SystemSpec {
    SystemSpec::from_json(
        r#"{
            "variables": ["x", "y"],
            "components": ["x", "2*y"],
            "mode": "ambient"
        }"#,
    )
    .unwrap()
}

/// Structural validation mirroring docs/report-schema.json: exact top-level
/// key set plus the per-command required result keys.
fn validate_report(report: &Value) {
    let obj = report.as_object().expect("report is an object");
    let keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    let expected = [
        "bounds",
        "command",
        "degenerate_flags",
        "input_echo",
        "results",
        "timings",
    ];
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, expected, "top-level keys are frozen by the schema");

    let command = report["command"].as_str().unwrap();
    assert!(report["timings"]["total_ms"].as_f64().is_some());
    assert!(report["degenerate_flags"].is_array());
    assert!(report["input_echo"].is_object());
    assert!(report["bounds"].is_null() || report["bounds"].is_object());
    if let Some(b) = report["bounds"].as_object() {
        for key in [
            "thm1b", "thm1d", "thm2_total", "thm2_point", "thm3b", "thm3d", "thm4", "thm5",
            "d_of_m",
        ] {
            assert!(b.contains_key(key), "bounds missing {key}");
        }
    }

    let required: &[&str] = match command {
        "check-sphere" => &["tangent", "cofactor"],
        "extactic" => &["extactic", "degree", "degenerate"],
        "parallels" => &[
            "parallels",
            "nonexact",
            "degenerate",
            "bound",
            "total_with_multiplicity",
            "attained",
        ],
        "meridians" => &[
            "meridians",
            "nonexact_real",
            "degenerate",
            "bound",
            "total_with_multiplicity",
            "real_count",
            "attained",
        ],
        "hyperplanes" => &[
            "hyperplanes",
            "nonexact",
            "degenerate",
            "bound",
            "count_with_multiplicity",
        ],
        "cofactor" => &["invariant", "surface"],
        "expfactor" => &["is_exponential_factor", "cofactor"],
        "darboux" => &["surfaces", "exp_factors", "first_integrals", "time_invariant"],
        "bounds" => &["n", "degrees", "degrees_sorted", "bounds"],
        "sample" => &["n", "degrees", "family_dimension", "samples"],
        "verify-numeric" => &["surface_checks", "first_integral_checks", "pass"],
        other => panic!("unknown command {other}"),
    };
    let results = report["results"].as_object().unwrap();
    for key in required {
        assert!(results.contains_key(*key), "{command} results missing {key}");
    }
}

#[test]
fn every_command_report_matches_schema() {
    let sphere = sphere_spec();
    let ambient = ambient_spec();
    let cases: Vec<(Command, &SystemSpec)> = vec![
        (Command::CheckSphere, &sphere),
        (
            Command::Extactic {
                basis: vec!["x".into(), "y".into()],
            },
            &sphere,
        ),
        (Command::Parallels, &sphere),
        (Command::Meridians, &sphere),
        (Command::Hyperplanes, &ambient),
        (
            Command::Cofactor {
                surface: "z".into(),
            },
            &sphere,
        ),
        (
            Command::ExpFactor {
                g: "0".into(),
                h: "1".into(),
            },
            &sphere,
        ),
        (Command::Darboux, &sphere),
        (Command::Bounds, &sphere),
        (Command::Sample, &sphere),
        (Command::VerifyNumeric, &sphere),
    ];
    for (command, spec) in cases {
        let (report, exit) = run(&command, Some(spec), &Overrides::default())
            .unwrap_or_else(|e| panic!("{} failed: {e}", command.name()));
        assert!(exit == 0 || exit == 1, "{}: unexpected exit {exit}", command.name());
        let value = serde_json::to_value(&report).unwrap();
        validate_report(&value);
    }
    // Spec-less bounds/sample driven by flags.
    let overrides = Overrides {
        n: Some(2),
        degrees: Some(vec![2, 2, 2]),
        ..Default::default()
    };
    for command in [Command::Bounds, Command::Sample] {
        let (report, exit) = run(&command, None, &overrides).unwrap();
        assert_eq!(exit, 0);
        validate_report(&serde_json::to_value(&report).unwrap());
        if report.command == "bounds" {
            assert_eq!(report.results["bounds"]["thm4"], 3);
            assert_eq!(report.results["bounds"]["thm5"], 2);
        }
    }
}

#[test]
fn degenerate_analyses_are_flagged_not_errored() {
    // Every meridian of this field is invariant: E vanishes identically.
    let spec = SystemSpec::from_json(
        r#"{"variables": ["x", "y", "z"],
            "components": ["x*z", "y*z", "z^2 - 1"],
            "mode": "sphere"}"#,
    )
    .unwrap();
    let (report, exit) = run(&Command::Meridians, Some(&spec), &Overrides::default()).unwrap();
    assert_eq!(exit, 0);
    assert_eq!(report.results["degenerate"], true);
    assert!(report.degenerate_flags.contains(&"meridians".to_string()));
    let (report, exit) = run(
        &Command::Extactic {
            basis: vec!["x".into(), "y".into()],
        },
        Some(&spec),
        &Overrides::default(),
    )
    .unwrap();
    assert_eq!(exit, 0);
    assert!(report.degenerate_flags.contains(&"extactic".to_string()));
}

#[test]
fn analysis_negative_answers_exit_one() {
    let sphere = sphere_spec();
    // x = 0 is not invariant for the parallel fixture.
    let (_, exit) = run(
        &Command::Cofactor {
            surface: "x".into(),
        },
        Some(&sphere),
        &Overrides::default(),
    )
    .unwrap();
    assert_eq!(exit, 1);

    // A non-tangent ambient system asked about the sphere.
    let spec = SystemSpec::from_json(
        r#"{"variables": ["x", "y", "z"],
            "components": ["x", "y", "1"],
            "mode": "sphere"}"#,
    )
    .unwrap();
    let (report, exit) = run(&Command::CheckSphere, Some(&spec), &Overrides::default()).unwrap();
    assert_eq!(exit, 1);
    assert_eq!(report.results["tangent"], false);
}

#[test]
fn input_errors_are_reported() {
    // Component count mismatch.
    let bad = SystemSpec::from_json(
        r#"{"variables": ["x", "y"], "components": ["x"], "mode": "ambient"}"#,
    )
    .unwrap();
    let err = run(&Command::Hyperplanes, Some(&bad), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("1 components for 2 variables"));

    // Unknown variable inside an expression, with position info.
    let bad = SystemSpec::from_json(
        r#"{"variables": ["x", "y"], "components": ["x", "x + q"], "mode": "ambient"}"#,
    )
    .unwrap();
    let err = run(&Command::Hyperplanes, Some(&bad), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("unknown variable"));

    // Sphere-only command on an ambient spec.
    let ambient = ambient_spec();
    let err = run(&Command::Parallels, Some(&ambient), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("sphere"));

    // i reserved.
    let bad = SystemSpec::from_json(
        r#"{"variables": ["i", "y"], "components": ["i", "y"], "mode": "ambient"}"#,
    )
    .unwrap();
    assert!(bad.parse().is_err());
}

#[test]
fn binary_exit_codes_and_output_file() {
    let bin = env!("CARGO_BIN_EXE_dkit");
    let dir = std::env::temp_dir().join("dkit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("spec.json");
    std::fs::write(
        &spec_path,
        serde_json::to_string(&sphere_spec()).unwrap(),
    )
    .unwrap();
    let out_path = dir.join("report.json");

    // success -> 0, report written to --output
    let status = Process::new(bin)
        .args([
            "parallels",
            "--input",
            spec_path.to_str().unwrap(),
            "--output",
            out_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    validate_report(&report);
    assert_eq!(report["results"]["attained"], true);

    // analysis-negative -> 1
    let status = Process::new(bin)
        .args([
            "cofactor",
            "--surface",
            "x",
            "--input",
            spec_path.to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // input error -> 2
    let status = Process::new(bin)
        .args(["meridians", "--input", "/nonexistent/spec.json"])
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // malformed spec -> 2
    let bad_path = dir.join("bad.json");
    std::fs::write(&bad_path, "{not json").unwrap();
    let status = Process::new(bin)
        .args(["meridians", "--input", bad_path.to_str().unwrap()])
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
