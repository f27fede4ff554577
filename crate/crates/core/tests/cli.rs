use patchscope::gallery;
use patchscope::normal_cycle::to_jsonl;
use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patchscope")).args(args).output().expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gallery_elliptope_facts() {
    let v = json_out(&["gallery", "elliptope", "--what", "facts"]);
    assert_eq!(v["patch_count"]["value"], 4);
    assert_eq!(v["singular_points"]["value"].as_array().unwrap().len(), 4);
}

#[test]
fn lorentz_membership() {
    let v = json_out(&["hyperbolic", "member", "--poly", "lorentz", "--e", "1,0,0", "--x", "1,2,0"]);
    assert_eq!(v, serde_json::json!({"member": false}));
    let v = json_out(&["hyperbolic", "member", "--poly", "lorentz", "--e", "1,0,0", "--x", "5/4,3/4,1", "--exact"]);
    assert_eq!(v["member"], true);
}

#[test]
fn cayley_face_dimension_and_pencil_input() {
    let v = json_out(&["hyperbolic", "facedim", "--poly", "cayley", "--e", "1,0,0,0", "--x", "1,1,0,0", "--exact"]);
    assert_eq!(v["face_dim"], 2);
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (k, m) in gallery::quartic_pencil().iter().enumerate() {
        let path = dir.path().join(format!("m{k}.csv"));
        let text: String = m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",") + "\n").collect();
        std::fs::write(&path, text).unwrap();
        paths.push(path.to_string_lossy().into_owned());
    }
    let mut args = vec!["hyperbolic", "check", "--e", "1,0,0,0", "--seed", "3", "--samples", "100", "--pencil"];
    args.extend(paths.iter().map(String::as_str));
    assert_eq!(json_out(&args)["status"], "certified-on-samples");
}

#[test]
fn bellows_patches_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bellows_seed7.csv");
    let plot = dir.path().join("plot.csv");
    let o = run(&["gallery", "bellows", "--what", "points", "--n", "500", "--seed", "7", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let v = json_out(&["patches", "--points", csv.to_str().unwrap(), "--emit-plot-data", plot.to_str().unwrap()]);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 2);
    let rows = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(rows.lines().next().unwrap(), "b0,b1,b2,n0,n1,n2,candidate");
    assert_eq!(rows.lines().count() - 1, v["n_facets"].as_u64().unwrap() as usize);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("ball.json");
    std::fs::write(&body, gallery::unit_ball(3).to_json()).unwrap();
    let b = body.to_str().unwrap();
    let one = run(&["--threads", "1", "ncycle", "--body", b, "--n", "50", "--seed", "7", "--strategy", "dual-directions"]);
    let four = run(&["--threads", "4", "ncycle", "--body", b, "--n", "50", "--seed", "7", "--strategy", "dual-directions"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(String::from_utf8_lossy(&one.stdout).lines().count(), 50);
}

#[test]
fn hausdorff_helmet_closed_patch() {
    let dir = tempfile::tempdir().unwrap();
    let xs: Vec<f64> = (1..=16).map(|n| 0.2 * 0.6f64.powi(n)).collect();
    let mut all = xs.clone();
    all.push(0.0);
    let pairs = dir.path().join("pairs.jsonl");
    std::fs::write(&pairs, to_jsonl(&gallery::helmet_patch_pairs(&all, 0.01, true))).unwrap();
    let seq: Vec<Vec<f64>> = xs.iter().map(|&x| vec![-x / (0.7 + x * x / 2.0), -1.0 / (0.7 + x * x / 2.0), 0.0]).collect();
    let seq_path = dir.path().join("seq.json");
    std::fs::write(&seq_path, serde_json::to_string(&seq).unwrap()).unwrap();
    let v = json_out(&[
        "hausdorff", "--pairs", pairs.to_str().unwrap(), "--ell-seq", seq_path.to_str().unwrap(),
        "--ell-limit", "0,-1.4285714285714286,0", "--angle-tol", "1e-9", "--mesh", "0.01",
    ]);
    assert_eq!(v["verdict"], "CONVERGES");
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn errors_are_json_with_exit_codes() {
    let o = run(&["patches", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "InvalidInput");
    let o = run(&["hyperbolic", "member", "--poly", "lorentz", "--e", "1,1,0", "--x", "1,0,0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["gallery", "nowhere"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(run(&["hausdorff", "--help"]).status.success());
}
