use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SLIT_BOX: &str = r#"{
  "dimension": 2,
  "objective": {
    "base": {"kind": "maxaffine", "pieces": [{"a": ["1", "0"], "b": "0"}]},
    "domain": "full",
    "overrides": []
  },
  "feasible_set": {
    "hull": [
      {"a": ["-1", "0"], "b": "0", "rel": "le"},
      {"a": ["1", "0"], "b": "1", "rel": "le"},
      {"a": ["0", "-1"], "b": "0", "rel": "le"},
      {"a": ["0", "1"], "b": "1", "rel": "le"}
    ],
    "removed": [
      [
        {"a": ["1", "0"], "b": "0", "rel": "eq"},
        {"a": ["0", "-1"], "b": "-1/4", "rel": "le"},
        {"a": ["0", "1"], "b": "3/4", "rel": "le"}
      ]
    ]
  }
}"#;

const SHOWCASE: &str = r#"{
  "dimension": 2,
  "objective": {
    "base": {"kind": "quadratic", "Q": [["1", "0"], ["0", "0"]], "b": ["-1", "0"], "c": "0"},
    "domain": "full",
    "overrides": []
  },
  "geometric_set": {
    "hull": [
      {"a": ["-1", "0"], "b": "0", "rel": "le"},
      {"a": ["1", "0"], "b": "1", "rel": "le"},
      {"a": ["0", "-1"], "b": "0", "rel": "le"},
      {"a": ["0", "1"], "b": "1", "rel": "le"}
    ],
    "removed": [
      [
        {"a": ["1", "0"], "b": "0", "rel": "eq"},
        {"a": ["0", "-1"], "b": "-1/4", "rel": "lt"},
        {"a": ["0", "1"], "b": "2/3", "rel": "lt"}
      ],
      [
        {"a": ["0", "1"], "b": "0", "rel": "eq"},
        {"a": ["-1", "0"], "b": "-1/4", "rel": "lt"},
        {"a": ["1", "0"], "b": "2/3", "rel": "lt"}
      ]
    ]
  },
  "functional_constraints": [
    {
      "base": {"kind": "quadratic", "Q": [["1", "0"], ["0", "0"]], "b": ["-3", "1"], "c": "0"},
      "domain": "full",
      "overrides": []
    }
  ],
  "slater_hint": ["1/2", "1/2"]
}"#;

const DISK_HOLE: &str = r#"{
  "dimension": 2,
  "set": {
    "kind": "intersection",
    "parts": [
      {"kind": "ball", "c": ["0", "0"], "r2": "25", "closed": true},
      {"kind": "complement", "of": {"kind": "ball", "c": ["2", "0"], "r2": "1", "closed": true}}
    ]
  },
  "pairs": [[["-1", "0"], ["5", "0"]]]
}"#;

const IRREGULAR: &str = r#"{
  "dimension": 2,
  "objective": {
    "base": {"kind": "maxaffine", "pieces": [{"a": ["0", "1"], "b": "0"}]},
    "domain": {
      "hull": [{"a": ["1", "0"], "b": "0", "rel": "le"}],
      "removed": []
    },
    "overrides": []
  },
  "feasible_set": {
    "hull": [
      {"a": ["-1", "0"], "b": "0", "rel": "le"},
      {"a": ["1", "0"], "b": "1", "rel": "le"},
      {"a": ["0", "-1"], "b": "0", "rel": "le"},
      {"a": ["0", "1"], "b": "1", "rel": "le"}
    ],
    "removed": []
  }
}"#;

const LINE: &str = r#"{
  "dimension": 1,
  "objective": {
    "base": {"kind": "maxaffine", "pieces": [{"a": ["1"], "b": "0"}]},
    "domain": "full",
    "overrides": []
  },
  "feasible_set": {
    "hull": [{"a": ["-1"], "b": "0", "rel": "le"}],
    "removed": []
  }
}"#;

fn carvex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carvex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).expect("fixture written");
    path.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_is_a_canonicalizing_fixpoint() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "slit_box.json", SLIT_BOX);
    let first = carvex(&["validate", "--json", &file]);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    let canonical = stdout(&first);
    let canonical_file = write(dir.path(), "canonical.json", &canonical);
    let second = carvex(&["validate", "--json", &canonical_file]);
    assert_eq!(code(&second), 0);
    assert_eq!(stdout(&second), canonical);
}

#[test]
fn validate_summarizes_both_file_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let geometric = write(dir.path(), "slit_box.json", SLIT_BOX);
    let out = carvex(&["validate", &geometric]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("kind: geometric"));
    assert!(text.contains("1 removed cell"));
    let constrained = write(dir.path(), "showcase.json", SHOWCASE);
    let out = carvex(&["validate", &constrained]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("kind: constrained"));
    assert!(text.contains("functional constraints: 1"));
    assert!(text.contains("slater hint: (1/2, 1/2)"));
}

#[test]
fn solve_reports_the_slit_box_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "slit_box.json", SLIT_BOX);
    let out = carvex(&["solve", &file]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("regularity: holds"));
    assert!(text.contains("value: 0"));
    assert!(text.contains("minus 1 cell"));
}

#[test]
fn solve_json_carries_exact_values_and_sets() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "showcase.json", SHOWCASE);
    let out = carvex(&["solve", "--json", &file]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["status"], "optimal");
    assert_eq!(doc["value"], "-1/4");
    assert_eq!(doc["slater"]["witness"][0], "1/2");
    assert_eq!(doc["solutions"]["removed"].as_array().unwrap().len(), 1);
}

#[test]
fn kkt_certifies_and_refutes_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "showcase.json", SHOWCASE);
    let certified = carvex(&["kkt", &file, "--point", "1/2,1"]);
    assert_eq!(code(&certified), 0, "stderr: {}", stderr(&certified));
    let text = stdout(&certified);
    assert!(text.contains("kkt: certified"));
    assert!(text.contains("multipliers: [0]"));
    assert!(text.contains("sufficient for the original problem: yes"));
    let refuted = carvex(&["kkt", &file, "--point", "0,0"]);
    assert_eq!(code(&refuted), 1);
    assert!(stdout(&refuted).contains("kkt: refuted"));
}

#[test]
fn slater_verifies_hints_and_flags_bad_ones() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "showcase.json", SHOWCASE);
    let holds = carvex(&["slater", &file]);
    assert_eq!(code(&holds), 0);
    assert!(stdout(&holds).contains("slater: holds, witness (1/2, 1/2)"));
    assert!(stdout(&holds).contains("margins: [3/4]"));
    let bad = carvex(&["slater", &file, "--hint", "0,0"]);
    assert_eq!(code(&bad), 3);
    assert!(stderr(&bad).contains("relative interior"));
}

#[test]
fn regularity_failures_exit_one_and_solve_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "irregular.json", IRREGULAR);
    let reg = carvex(&["regularity", &file]);
    assert_eq!(code(&reg), 1);
    assert!(stdout(&reg).contains("regularity: FAILED"));
    let solve = carvex(&["solve", &file]);
    assert_eq!(code(&solve), 3);
    let associated = carvex(&["solve-associated", &file]);
    assert_eq!(code(&associated), 0, "stderr: {}", stderr(&associated));
    let text = stdout(&associated);
    assert!(text.contains("regularity: FAILED"));
    assert!(text.contains("value: 0"));
}

#[test]
fn fermat_exit_codes_distinguish_refutation_from_violation() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "slit_box.json", SLIT_BOX);
    let certified = carvex(&["fermat", &file, "--point", "0,1"]);
    assert_eq!(code(&certified), 0, "stderr: {}", stderr(&certified));
    assert!(stdout(&certified).contains("fermat: certified"));
    let refuted = carvex(&["fermat", &file, "--point", "1/2,1/2"]);
    assert_eq!(code(&refuted), 1);
    assert!(stdout(&refuted).contains("fermat: refuted"));
    let outside = carvex(&["fermat", &file, "--point", "2,2"]);
    assert_eq!(code(&outside), 3);
}

#[test]
fn parse_errors_exit_two_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "broken.json", "{\n  \"dimension\": 2,\n  oops\n}");
    let out = carvex(&["solve", &file]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "stderr: {}", stderr(&out));
    let missing = carvex(&["solve", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&missing), 2);
    let usage = carvex(&["kkt", &write(dir.path(), "slit2.json", SLIT_BOX), "--point", "0,0"]);
    assert_eq!(code(&usage), 2);
    assert!(stderr(&usage).contains("constrained"));
}

#[test]
fn point_flags_accept_negative_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "slit_box.json", SLIT_BOX);
    let out = carvex(&["lsc-hull", &file, "--point", "-1,0"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("f(point): -1"));
}

#[test]
fn oracle_ho_reports_the_dyadic_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "disk_hole.json", DISK_HOLE);
    let out = carvex(&["oracle", "ho", &file]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("witness at t = 1/4"));
    let json = carvex(&["oracle", "ho", "--json", &file]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("valid json");
    assert_eq!(doc["pairs"][0]["t"], "1/4");
}

#[test]
fn oracle_near_convexity_flags_the_hole_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "disk_hole.json", DISK_HOLE);
    let out = carvex(&[
        "oracle",
        "near-convexity",
        &file,
        "--grid-step",
        "1/2",
        "--grid-box",
        "-5:5,-5:5",
    ]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("refuted"));
}

#[test]
fn oracle_grid_probes_report_exact_rationals() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "slit_box.json", SLIT_BOX);
    let min = carvex(&[
        "oracle", "grid-min", &file, "--grid-step", "1/4", "--grid-box", "0:1,0:1",
    ]);
    assert_eq!(code(&min), 0, "stderr: {}", stderr(&min));
    let text = stdout(&min);
    assert!(text.contains("grid minimum: 0"));
    assert!(text.contains("bracket: [-1/4, 0]"));
    let locals = carvex(&[
        "oracle", "local-minima", &file, "--grid-step", "1/4", "--grid-box", "0:1,0:1",
    ]);
    assert_eq!(code(&locals), 0);
    assert!(stdout(&locals).contains("cluster 1: value 0 at (0, 0)"));
    let liminf = carvex(&[
        "oracle", "liminf", &file, "--point", "0,1/2", "--grid-step", "1/8", "--grid-box",
        "0:1,0:1",
    ]);
    assert_eq!(code(&liminf), 0);
    assert!(stdout(&liminf).contains("liminf bracket at (0, 1/2)"));
}

#[test]
fn plot_writes_svg_and_rejects_other_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "showcase.json", SHOWCASE);
    let svg_path = dir.path().join("out.svg");
    let out = carvex(&[
        "plot",
        &file,
        svg_path.to_str().unwrap(),
        "--point",
        "1/2,1",
        "--point",
        "0,0",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let svg = fs::read_to_string(&svg_path).expect("svg written");
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("(1/2, 1)"));
    let line = write(dir.path(), "line.json", LINE);
    let rejected = carvex(&["plot", &line, dir.path().join("no.svg").to_str().unwrap()]);
    assert_eq!(code(&rejected), 2);
    assert!(stderr(&rejected).contains("dimension 2"));
}

#[test]
fn repro_matches_every_corpus_row() {
    let out = carvex(&["repro"]);
    assert_eq!(code(&out), 0, "stdout: {}\nstderr: {}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("all 14 rows match"));
    let json = carvex(&["repro", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("valid json");
    assert_eq!(doc["all_match"], true);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 14);
}
