use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dic_core::polytope::regions_equal;
use dic_core::{LinearInequality, Region};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn dic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dic"))
        .args(args)
        .env_remove("DIC_SEED")
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn simplex() -> Region {
    Region::from_rows(&["R1", "R2"], &[(&[1, 1], 1.0), (&[-1, 0], 0.0), (&[0, -1], 0.0)]).unwrap()
}

fn square() -> Region {
    Region::from_rows(&["R1", "R2"], &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[-1, 0], 0.0), (&[0, -1], 0.0)]).unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&dic(&["validate", arg(&data("xor.json"))])), 0);

    let parity = dic(&["validate", arg(&data("parity3.json"))]);
    assert_eq!(code(&parity), 1);
    let stdout = String::from_utf8_lossy(&parity.stdout);
    assert!(stdout.contains("\"violations\""));
    assert!(String::from_utf8_lossy(&parity.stderr).contains("receiver 1"));

    assert_eq!(code(&dic(&["validate", arg(&data("truncated.json"))])), 2);
    assert_eq!(code(&dic(&["validate", "/no/such/file.json"])), 2);
}

#[test]
fn xor_region_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["hk-project", "theorem"] {
        let out = dir.path().join(format!("{method}.json"));
        let run = dic(&[
            "region",
            arg(&data("xor.json")),
            arg(&data("uniform2.json")),
            "--method",
            method,
            "--out",
            arg(&out),
        ]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        let r = Region::from_file(&out).unwrap();
        assert!(regions_equal(&r, &simplex(), 1e-9).unwrap());
        assert!(r.inequalities().contains(&LinearInequality::new(vec![1, 1], 1.0)));
    }
    let cmp = dic(&["compare", arg(&dir.path().join("hk-project.json")), arg(&dir.path().join("theorem.json"))]);
    assert_eq!(code(&cmp), 0);
}

#[test]
fn point_mass_gives_origin() {
    let run = dic(&["region", arg(&data("xor.json")), arg(&data("point2.json")), "--method", "theorem"]);
    assert_eq!(code(&run), 0);
    let r = Region::from_json(&String::from_utf8_lossy(&run.stdout)).unwrap();
    assert!(r.contains_point(&[0.0, 0.0], 0.0));
    assert!(!r.contains_point(&[1e-3, 0.0], 1e-9));
    assert!(!r.contains_point(&[0.0, 1e-3], 1e-9));
}

#[test]
fn non_injective_channel_is_refused() {
    let spec = arg(&data("parity3.json")).to_string();
    let dist = arg(&data("uniform3.json")).to_string();
    assert_eq!(code(&dic(&["region", &spec, &dist, "--method", "theorem"])), 1);
    assert_eq!(code(&dic(&["region", &spec, &dist, "--method", "hk-project"])), 1);
    assert_eq!(
        code(&dic(&["region", &spec, &dist, "--method", "theorem", "--allow-non-injective"])),
        1
    );
    let forced = dic(&["region", &spec, &dist, "--method", "hk-project", "--allow-non-injective"]);
    assert_eq!(code(&forced), 0);
    assert!(String::from_utf8_lossy(&forced.stderr).contains("warning"));
}

#[test]
fn three_user_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let hk = dir.path().join("hk.json");
    let th = dir.path().join("th.json");
    let spec = arg(&data("mixed3.json")).to_string();
    let dist = arg(&data("skewed3.json")).to_string();
    let a = dic(&["region", &spec, &dist, "--method", "hk-project", "--out", arg(&hk)]);
    assert_eq!(code(&a), 0);
    let b = dic(&[
        "region",
        &spec,
        &dist,
        "--method",
        "theorem",
        "--facet-cap",
        "300000",
        "--out",
        arg(&th),
    ]);
    assert_eq!(code(&b), 0, "{}", String::from_utf8_lossy(&b.stderr));
    assert!(String::from_utf8_lossy(&b.stderr).contains("a_max = 5: not checked"));
    assert_eq!(code(&dic(&["compare", arg(&hk), arg(&th)])), 0);
}

#[test]
fn facet_cap_overflow_is_an_error() {
    let run = dic(&[
        "region",
        arg(&data("xor.json")),
        arg(&data("uniform2.json")),
        "--method",
        "theorem",
        "--facet-cap",
        "5",
    ]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("facet cap"));
}

#[test]
fn compare_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("simplex.json");
    let b = dir.path().join("square.json");
    std::fs::write(&a, simplex().to_json()).unwrap();
    std::fs::write(&b, square().to_json()).unwrap();
    assert_eq!(code(&dic(&["compare", arg(&a), arg(&a)])), 0);
    let diff = dic(&["compare", arg(&a), arg(&b), "--tol", "1e-9"]);
    assert_eq!(code(&diff), 1);
    let stderr = String::from_utf8_lossy(&diff.stderr);
    assert!(stderr.contains("B is not inside A"), "{stderr}");
    assert!(String::from_utf8_lossy(&diff.stdout).starts_with("different"));
}

#[test]
fn compare_is_deterministic_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("simplex.json");
    let b = dir.path().join("square.json");
    std::fs::write(&a, simplex().to_json()).unwrap();
    std::fs::write(&b, square().to_json()).unwrap();
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_dic"))
            .args(["compare", arg(&a), arg(&b)])
            .env("DIC_SEED", seed)
            .output()
            .unwrap();
        String::from_utf8_lossy(&out.stdout).into_owned()
    };
    assert_eq!(run("7"), run("7"));
    assert!(run("7").contains("seed 7"));
    let bad = Command::new(env!("CARGO_BIN_EXE_dic"))
        .args(["compare", arg(&a), arg(&b)])
        .env("DIC_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn plot_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let region = dir.path().join("simplex.json");
    std::fs::write(&region, simplex().to_json()).unwrap();
    let svg = dir.path().join("simplex.svg");
    assert_eq!(code(&dic(&["plot", arg(&region), "--out", arg(&svg)])), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<polygon"));
    assert_eq!(text.matches("<circle").count(), 3);
    assert!(text.contains(">R1<") && text.contains(">R2<"));

    let sq = dir.path().join("square.json");
    std::fs::write(&sq, square().to_json()).unwrap();
    let sq_svg = dir.path().join("square.svg");
    assert_eq!(code(&dic(&["plot", arg(&sq), "--out", arg(&sq_svg)])), 0);
    assert_eq!(std::fs::read_to_string(&sq_svg).unwrap().matches("<circle").count(), 4);

    let open = dir.path().join("open.json");
    let unbounded = Region::from_rows(&["R1", "R2"], &[(&[1, 0], 1.0), (&[-1, 0], 0.0), (&[0, -1], 0.0)]).unwrap();
    std::fs::write(&open, unbounded.to_json()).unwrap();
    let run = dic(&["plot", arg(&open), "--out", arg(&dir.path().join("open.svg"))]);
    assert_ne!(code(&run), 0);
    assert!(String::from_utf8_lossy(&run.stderr).contains("+R2"));

    let cube = Region::from_rows(
        &["R1", "R2", "R3"],
        &[
            (&[1, 0, 0], 1.0),
            (&[0, 1, 0], 1.0),
            (&[0, 0, 1], 1.0),
            (&[-1, 0, 0], 0.0),
            (&[0, -1, 0], 0.0),
            (&[0, 0, -1], 0.0),
        ],
    )
    .unwrap();
    let cube_file = dir.path().join("cube.json");
    std::fs::write(&cube_file, cube.to_json()).unwrap();
    assert_eq!(code(&dic(&["plot", arg(&cube_file), "--out", arg(&dir.path().join("cube.svg"))])), 0);
    let csv = std::fs::read_to_string(dir.path().join("cube.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert_eq!(csv.lines().next(), Some("R1,R2,R3"));
}

#[test]
fn presets_dump() {
    let two = dic(&["presets", "--k", "2"]);
    assert_eq!(code(&two), 0);
    let parsed: serde_json::Value = serde_json::from_slice(&two.stdout).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 7);

    let three = dic(&["presets", "--k", "3"]);
    let parsed: serde_json::Value = serde_json::from_slice(&three.stdout).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 28);
    assert_eq!(parsed[27]["a"], serde_json::json!([4, 2, 1]));

    let four = dic(&["presets", "--k", "4"]);
    assert_eq!(code(&four), 2);
    assert!(String::from_utf8_lossy(&four.stderr).contains("unsupported"));
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(code(&dic(&["region"])), 2);
    assert_eq!(code(&dic(&["frobnicate"])), 2);
    assert_eq!(
        code(&dic(&["compare", arg(&data("xor.json")), arg(&data("xor.json")), "--tol", "-1"])),
        2
    );
}
