//! End-to-end checks of the command-line pipeline: outputs must agree
//! with direct library calls bit for bit, registration gating must hold,
//! and failures must name the offending part of the input.

use std::process::{Command, Output};

use serde::Deserialize;

use bilasym::features::{absolute_features, signed_features};
use bilasym::io::LandmarkFile;
use bilasym::scores::ScoreSpec;
use bilasym::stats::{run_comparison, Sidedness, TestChoice};

fn bilasym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilasym"))
        .args(args)
        .output()
        .unwrap()
}

fn expect_success(args: &[&str]) -> Output {
    let out = bilasym(args);
    assert!(
        out.status.success(),
        "bilasym {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn register_passes_registered_input_through_and_warns() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.json");
    let reg = dir.path().join("reg.json");
    expect_success(&[
        "simulate",
        "--pairs", "3",
        "--solos", "1",
        "--dim", "2",
        "--n1", "3",
        "--n2", "3",
        "--seed", "4",
        "--output", sim.to_str().unwrap(),
    ]);
    let out = expect_success(&[
        "register",
        "--input", sim.to_str().unwrap(),
        "--output", reg.to_str().unwrap(),
    ]);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("already"),
        "passthrough must warn on stderr"
    );
    let before = LandmarkFile::read(&sim).unwrap();
    let after = LandmarkFile::read(&reg).unwrap();
    assert_eq!(before.registration, after.registration);
    assert_eq!(before.subjects.len(), after.subjects.len());
    for (s, t) in before.subjects.iter().zip(&after.subjects) {
        assert_eq!(s.id, t.id);
        assert_eq!(s.coords, t.coords, "coordinates must pass through bit-exact");
    }
}

#[derive(Deserialize)]
struct FeatureRowOut {
    subject: String,
    value: f64,
}

#[derive(Deserialize)]
struct ScoreRowOut {
    subject: String,
    score: String,
    value: f64,
}

#[derive(Deserialize)]
struct TestRowOut {
    score: String,
    method: String,
    statistic: f64,
    p_value: f64,
}

#[test]
fn feature_score_and_test_outputs_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.json");
    let reg = dir.path().join("reg.json");
    expect_success(&[
        "simulate",
        "--pairs", "4",
        "--solos", "2",
        "--dim", "3",
        "--n1", "6",
        "--n2", "7",
        "--noise-sigma", "0.05",
        "--offset", "1=0.3",
        "--nuisance", "on",
        "--seed", "11",
        "--output", raw.to_str().unwrap(),
    ]);
    expect_success(&[
        "register",
        "--input", raw.to_str().unwrap(),
        "--output", reg.to_str().unwrap(),
    ]);
    let cohort = LandmarkFile::read(&reg).unwrap().parse().unwrap();
    let abs: Vec<_> = cohort
        .configs
        .iter()
        .map(|c| absolute_features(&signed_features(c, &cohort.scheme).unwrap()))
        .collect();
    let j = abs[0].len();

    // per-feature values
    let out = expect_success(&["features", "--input", reg.to_str().unwrap(), "--kind", "absolute"]);
    let rows: Vec<FeatureRowOut> = csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows.len(), cohort.configs.len() * j);
    for (i, fv) in abs.iter().enumerate() {
        for (jj, &want) in fv.values().iter().enumerate() {
            let row = &rows[i * j + jj];
            assert_eq!(row.subject, cohort.ids[i]);
            assert_eq!(row.value, want, "feature value must round-trip bit-exact");
        }
    }

    // per-subject scores
    let out = expect_success(&["score", "--input", reg.to_str().unwrap(), "--score", "l2"]);
    let rows: Vec<ScoreRowOut> = csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    let l2 = ScoreSpec::l2(j).unwrap();
    assert_eq!(rows.len(), cohort.configs.len());
    for (i, fv) in abs.iter().enumerate() {
        assert_eq!(rows[i].subject, cohort.ids[i]);
        assert_eq!(rows[i].score, l2.label);
        assert_eq!(rows[i].value, l2.evaluate(fv).unwrap());
    }

    // group comparison
    let out = expect_success(&[
        "test",
        "--input", reg.to_str().unwrap(),
        "--score", "l2",
        "--test", "pooled-t",
        "--test", "welch-t",
        "--test", "mann-whitney",
        "--sided", "one",
    ]);
    let rows: Vec<TestRowOut> = csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    let (label1, label2, idx1, idx2) = {
        let labels = cohort.group_labels();
        let grp = |l: &str| -> Vec<usize> {
            cohort
                .groups
                .iter()
                .enumerate()
                .filter(|(_, g)| g.as_str() == l)
                .map(|(i, _)| i)
                .collect()
        };
        (
            labels[0].clone(),
            labels[1].clone(),
            grp(&labels[0]),
            grp(&labels[1]),
        )
    };
    let pick = |idx: &[usize]| idx.iter().map(|&i| abs[i].clone()).collect::<Vec<_>>();
    let dataset = bilasym::TwoGroupDataset::new(pick(&idx1), pick(&idx2)).unwrap();
    let expected = run_comparison(
        &dataset,
        (&label1, &label2),
        &[ScoreSpec::l2(j).unwrap()],
        &[
            TestChoice::PooledT,
            TestChoice::WelchT,
            TestChoice::MannWhitney,
        ],
        Sidedness::OneSidedGreater,
    )
    .unwrap();
    assert_eq!(rows.len(), expected.len());
    for (got, want) in rows.iter().zip(&expected) {
        assert_eq!(got.score, want.score);
        assert_eq!(got.method, want.method.to_string());
        assert_eq!(got.statistic, want.statistic);
        assert_eq!(got.p_value, want.p_value);
    }
}

#[test]
fn plot_svg_draws_one_dot_per_subject() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.json");
    expect_success(&[
        "simulate",
        "--pairs", "3",
        "--solos", "0",
        "--dim", "2",
        "--n1", "7",
        "--n2", "6",
        "--seed", "3",
        "--output", sim.to_str().unwrap(),
    ]);
    let out = expect_success(&["plot", "--input", sim.to_str().unwrap(), "--score", "l2"]);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        svg.matches("<circle").count(),
        13,
        "one dot per subject"
    );
    assert!(svg.starts_with("<svg"));
}

#[test]
fn errors_render_as_json_when_requested() {
    let missing = "/nonexistent/input.json";
    let out = bilasym(&["features", "--input", missing, "--error-json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let payload: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(payload["error"].is_string());
    assert!(payload["kind"].is_string());

    let out = bilasym(&["features", "--input", missing]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn csv_input_needs_a_sidecar_and_matches_json_input() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.json");
    expect_success(&[
        "simulate",
        "--pairs", "2",
        "--solos", "1",
        "--dim", "2",
        "--n1", "2",
        "--n2", "2",
        "--seed", "6",
        "--output", sim.to_str().unwrap(),
    ]);
    let file = LandmarkFile::read(&sim).unwrap();

    let csv_path = dir.path().join("cohort.csv");
    let mut text = String::from("subject,group,x1,x2\n");
    for s in &file.subjects {
        for row in &s.coords {
            text.push_str(&format!("{},{},{},{}\n", s.id, s.group, row[0], row[1]));
        }
    }
    std::fs::write(&csv_path, text).unwrap();
    let sidecar_path = dir.path().join("cohort.scheme.json");
    let sidecar = serde_json::json!({
        "dimension": file.dimension,
        "scheme": file.scheme,
        "registration": file.registration,
    });
    std::fs::write(&sidecar_path, sidecar.to_string()).unwrap();

    let from_json = expect_success(&["features", "--input", sim.to_str().unwrap()]);
    let from_csv = expect_success(&[
        "features",
        "--input", csv_path.to_str().unwrap(),
        "--scheme", sidecar_path.to_str().unwrap(),
    ]);
    assert_eq!(
        from_json.stdout, from_csv.stdout,
        "csv and json routes must produce identical feature tables"
    );

    let out = bilasym(&["features", "--input", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("--scheme"),
        "bare csv must point at the missing sidecar"
    );
}

#[test]
fn malformed_subjects_are_named_in_errors() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.json");
    expect_success(&[
        "simulate",
        "--pairs", "2",
        "--solos", "0",
        "--dim", "2",
        "--n1", "2",
        "--n2", "2",
        "--seed", "5",
        "--output", sim.to_str().unwrap(),
    ]);
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sim).unwrap()).unwrap();
    let coords = value["subjects"][1]["coords"][0].as_array_mut().unwrap();
    coords.pop();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, value.to_string()).unwrap();

    let out = bilasym(&["features", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("'s002'"), "must name the subject: {stderr}");
    assert!(stderr.contains("landmark 1"), "must name the landmark: {stderr}");
}

#[test]
fn feature_kinds_are_gated_by_registration() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.json");
    let axis = dir.path().join("axis.json");
    expect_success(&[
        "simulate",
        "--pairs", "3",
        "--solos", "1",
        "--dim", "3",
        "--n1", "3",
        "--n2", "3",
        "--nuisance", "on",
        "--seed", "7",
        "--output", raw.to_str().unwrap(),
    ]);

    // raw coordinates cannot be scored at all
    let out = bilasym(&["score", "--input", raw.to_str().unwrap(), "--score", "l2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run the register command"));

    // axis registration pins the midplane only, so signed coordinatewise
    // features stay undefined while landmark-level ones work
    expect_success(&[
        "register",
        "--input", raw.to_str().unwrap(),
        "--mode", "axis",
        "--output", axis.to_str().unwrap(),
    ]);
    let out = bilasym(&[
        "features",
        "--input", axis.to_str().unwrap(),
        "--kind", "signed",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("basis"));
    expect_success(&[
        "features",
        "--input", axis.to_str().unwrap(),
        "--kind", "landmark",
    ]);
}
