use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const QUARTER_PI: &str = "0.7853981633974483";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_offsetshape"))
        .args(args)
        .env_remove("OFFSETSHAPE_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn offsets(report: &Value) -> Vec<&Value> {
    report["places"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|p| p["offsets"].as_array().unwrap())
        .collect()
}

#[test]
fn cusp_of_x3_y2_is_smoothed() {
    let out = run(&[
        "analyze", "--curve", "x^3-y^2", "--point", "0,0", "--d", "1", "--theta", QUARTER_PI,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["mode"], "float");
    assert_eq!(r["places"][0]["signature"]["p"], 2);
    assert_eq!(r["places"][0]["signature"]["q"], 3);
    let offs = offsets(&r);
    assert_eq!(offs.len(), 2);
    for o in offs {
        assert_eq!(o["prediction"]["case"], "SMOOTHED_QP1");
        assert_eq!(o["series"]["signature"], serde_json::json!([1, 2]));
        assert_eq!(o["agreement"]["predictor_series"], "agree");
    }
}

#[test]
fn exact_thorn_place_reports_the_clause() {
    let out = run(&[
        "analyze",
        "--place",
        "h^2, h^4+h^9",
        "--d",
        "1",
        "--cosab",
        "3/5,4/5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["places"][0]["curvature"]["k"], "2");
    for o in offsets(&r) {
        assert_eq!(o["prediction"]["case"], "Q2P_ZERO_T12_1");
        assert_eq!(o["prediction"]["preserved"], "yes");
        assert_eq!(o["series"]["signature"], serde_json::json!([2, 4]));
    }
}

#[test]
fn classical_parabola_lists_cusp_candidates() {
    let out = run(&[
        "analyze", "--curve", "y-x^2", "--point", "0,0", "--d", "1", "--theta", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["params"]["classical"], true);
    let cands = r["places"][0]["cusp_candidates"].as_array().unwrap();
    assert_eq!(cands.len(), 2);
    // k(h) = 2 / (1 + 4h^2)^(3/2) = 1
    let root = ((2f64.powf(2.0 / 3.0) - 1.0) / 4.0).sqrt();
    for c in cands {
        assert_eq!(c["branch"], "+");
        assert!((c["h"].as_f64().unwrap().abs() - root).abs() < 1e-9);
        assert!((c["k"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

fn plot_summary(args: &[&str], dir: &Path) -> (Value, String, String) {
    let csv = dir.join("out.csv");
    let svg = dir.join("out.svg");
    let mut full = vec!["plot"];
    full.extend_from_slice(args);
    let (c, s) = (csv.to_str().unwrap(), svg.to_str().unwrap());
    full.extend_from_slice(&["--csv", c, "--svg", s]);
    let out = run(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (
        json(&out),
        std::fs::read_to_string(csv).unwrap(),
        std::fs::read_to_string(svg).unwrap(),
    )
}

fn cusps(summary: &Value, id: &str) -> usize {
    let t = summary["traces"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["branch_id"] == id)
        .unwrap();
    t["cusps"]["count"].as_u64().unwrap() as usize
}

#[test]
fn parabola_plots_swallowtail_then_rounds_it() {
    let dir = tempfile::tempdir().unwrap();
    let window = [
        "--place",
        "h, h^2",
        "--d",
        "1",
        "--h-max",
        "1.2",
        "--samples",
        "2001",
    ];
    let mut classical = window.to_vec();
    classical.extend_from_slice(&["--theta", "0"]);
    let (s, csv, svg) = plot_summary(&classical, dir.path());
    assert_eq!(cusps(&s, "gen+"), 2);
    assert_eq!(cusps(&s, "gen-"), 0);
    assert!(csv.starts_with("branch_id,h,x,y\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 2001);
    for id in ["src", "gen+", "gen-"] {
        assert!(svg.contains(&format!("<g id=\"{id}\">")));
    }
    let theta = std::f64::consts::PI / 50.0;
    let t = theta.to_string();
    let mut rotated = window.to_vec();
    rotated.extend_from_slice(&["--theta", &t]);
    let (s, _, _) = plot_summary(&rotated, dir.path());
    assert_eq!(cusps(&s, "gen+"), 0);
    assert_eq!(cusps(&s, "gen-"), 0);
}

#[test]
fn figure_curves_plot_as_described() {
    let dir = tempfile::tempdir().unwrap();
    let (s, _, _) = plot_summary(
        &["--curve", "x^3-y^2", "--d", "1", "--theta", QUARTER_PI],
        dir.path(),
    );
    assert_eq!(cusps(&s, "gen+") + cusps(&s, "gen-"), 0);
    let (s, _, _) = plot_summary(
        &[
            "--curve",
            "x^9-y^2+2*y*x^2-x^4",
            "--d",
            "1",
            "--theta",
            QUARTER_PI,
        ],
        dir.path(),
    );
    assert!(cusps(&s, "gen+") >= 1);
    assert!(cusps(&s, "gen-") >= 1);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--curve",
        "x^9-y^2+2*y*x^2-x^4",
        "--d",
        "5/6",
        "--cosab",
        "3/5,4/5",
    ];
    let mut analyze = vec!["analyze"];
    analyze.extend_from_slice(&args);
    assert_eq!(run(&analyze).stdout, run(&analyze).stdout);
    let a = plot_summary(&args, dir.path());
    let b = plot_summary(&args, dir.path());
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
}

#[test]
fn config_file_env_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("session.json");
    std::fs::write(
        &cfg,
        r#"{"place": "h^2, h^3", "d": "2", "theta": 0.5, "tol": 1e-6, "samples": 51}"#,
    )
    .unwrap();
    let saved = dir.path().join("saved.json");
    let out = Command::new(env!("CARGO_BIN_EXE_offsetshape"))
        .args(["analyze", "--config", cfg.to_str().unwrap(), "--d", "1"])
        .args(["--save-config", saved.to_str().unwrap()])
        .env("OFFSETSHAPE_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let eff: Value = serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(eff["d"], "1");
    assert_eq!(eff["tol"], 1e-9);
    assert_eq!(eff["samples"], 51);
    assert_eq!(eff["theta"], 0.5);

    // the saved config alone reproduces the run
    let replay = run(&["analyze", "--config", saved.to_str().unwrap()]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_offsetshape"))
        .args(["analyze", "--config", cfg.to_str().unwrap(), "--d", "1"])
        .env("OFFSETSHAPE_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(replay.stdout, with_env.stdout);

    let flagged = Command::new(env!("CARGO_BIN_EXE_offsetshape"))
        .args([
            "analyze",
            "--config",
            cfg.to_str().unwrap(),
            "--tol",
            "1e-4",
        ])
        .args(["--save-config", saved.to_str().unwrap()])
        .env("OFFSETSHAPE_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(flagged.status.code(), Some(0));
    let eff: Value = serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(eff["tol"], 1e-4);
}

#[test]
fn errors_map_to_exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(
        code(&["analyze", "--curve", "y-x^2+", "--d", "1", "--theta", "1"]),
        Some(1)
    );
    assert_eq!(code(&["analyze", "--curve", "y-x^2", "--d", "1"]), Some(1));
    assert_eq!(
        code(&["analyze", "--place", "h, h^2", "--d", "1", "--theta", "1", "--cosab", "3/5,4/5"]),
        Some(1)
    );
    assert_eq!(code(&["analyze", "--bogus"]), Some(1));
    assert_eq!(
        code(&["analyze", "--curve", "y-x^2", "--point", "1,0", "--d", "1", "--theta", "1"]),
        Some(2)
    );
    assert_eq!(
        code(&["analyze", "--place", "h, h^2", "--d", "0", "--theta", "1"]),
        Some(2)
    );
    assert_eq!(
        code(&["analyze", "--place", "h, h^2", "--d", "1", "--cosab", "1,1"]),
        Some(2)
    );
    // the second term h^9 lies beyond a cap of 8
    assert_eq!(
        code(&[
            "analyze",
            "--curve",
            "x^9-y^2+2*y*x^2-x^4",
            "--d",
            "1",
            "--cosab",
            "3/5,4/5",
            "--trunc",
            "8"
        ]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "analyze",
            "--curve",
            "x^9-y^2+2*y*x^2-x^4",
            "--d",
            "1",
            "--cosab",
            "3/5,4/5",
            "--trunc",
            "10"
        ]),
        Some(0)
    );
    assert_eq!(
        code(&["verify", "--n", "1", "--force-flex", "--force-smoothing"]),
        Some(1)
    );
}

#[test]
fn exact_curve_with_irrational_branches_falls_back_to_float() {
    // the node y^2 = x^2 (x + 1) has tangents of slope +-1
    let out = run(&[
        "analyze",
        "--curve",
        "y^2-x^2*(x+1)",
        "--d",
        "1",
        "--cosab",
        "3/5,4/5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["mode"], "float");
    assert_eq!(r["places"].as_array().unwrap().len(), 2);
    assert!(r["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d.as_str().unwrap().contains("float mode")));
}

#[test]
fn verify_suite_exits_zero() {
    let out = run(&["verify", "--seed", "1", "--n", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["decisive_disagreements"], 0);
    assert_eq!(r["missing_coverage"].as_array().unwrap().len(), 0);
    for case in [
        "Q2P_ZERO_T11_1",
        "Q2P_ZERO_T11_2",
        "Q2P_ZERO_T11_3",
        "Q2P_ZERO_T12_1",
        "Q2P_ZERO_T12_2",
        "Q2P_ZERO_T12_3",
    ] {
        assert!(r["cases"][case]["hits"].as_u64().unwrap() > 0, "{case}");
    }
    assert_eq!(
        run(&["verify", "--seed", "1", "--n", "200"]).stdout,
        out.stdout
    );
}

#[test]
fn forced_suites() {
    let r = json(&run(&[
        "verify",
        "--seed",
        "1",
        "--n",
        "50",
        "--force-flex",
    ]));
    assert_eq!(r["flex_preserved"], 0);
    assert_eq!(r["flex_offsets"], 0);
    let r = json(&run(&[
        "verify",
        "--seed",
        "1",
        "--n",
        "50",
        "--force-smoothing",
    ]));
    assert_eq!(r["smoothing_exceptions"], 0);
    assert_eq!(r["decisive_disagreements"], 0);
}
