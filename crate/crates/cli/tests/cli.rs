use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const S1S3: &str = r#"{"lambda":[1.7320508075688772,-0.5773502691896258,-0.5773502691896258,-0.5773502691896258],"parallel":true}"#;
const S2S2: &str = r#"{"lambda":[1,1,-1,-1],"parallel":true}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercurv")).args(args).env_remove("HYPERCURV_TOL").output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypercurv"))
        .args(args)
        .env_remove("HYPERCURV_TOL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn point_at_s2xs2() {
    let o = run(&["point", S2S2]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["cgb"], 32.0);
    assert!((v["norms"]["Wsq"].as_f64().unwrap() - 64.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["spectrum"]["w"], 2);
    assert_eq!(v["spectrum"]["flags"]["einstein"], true);
    assert_eq!(v["curvature"]["scal"], 8.0);
    let bach = v["bach"].as_array().unwrap();
    assert!(bach.iter().flat_map(|r| r.as_array().unwrap()).all(|x| x.as_f64().unwrap().abs() < 1e-12));
    let first = &v["divWeyl"]["components"][0]["index"];
    assert_eq!(first, &serde_json::json!([1, 1, 2]));
}

#[test]
fn point_at_s1xs3_and_geodesic() {
    let v = json(&run(&["point", S1S3]));
    assert_eq!(v["spectrum"]["flags"]["lcf"], true);
    assert!(v["norms"]["Wsq"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["cgb"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["bochner"]["firstBach"].as_f64().unwrap().abs() < 1e-12);

    let v = json(&run(&["classify", r#"{"lambda":[0,0,0,0]}"#]));
    assert_eq!(v["flags"]["lcf"], true);
    assert_eq!(v["m"], 1);
}

#[test]
fn reads_stdin_and_batches() {
    let batch = format!("[{S2S2},{S1S3}]");
    let o = run_stdin(&["classify"], &batch);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let w: Vec<i64> = v.as_array().unwrap().iter().map(|r| r["w"].as_i64().unwrap()).collect();
    assert_eq!(w, vec![2, 1]);
    let o = run_stdin(&["classify", "-"], S2S2);
    assert_eq!(json(&o)["partition"], serde_json::json!([2, 2]));
}

#[test]
fn malformed_input_exits_two_with_a_path() {
    let cases: [&[&str]; 6] = [
        &["point", r#"[{"lambda":[1,1,-1,-1]},{"lambda":[1,"x"]}]"#],
        &["point", "{not json"],
        &["point", r#"{"lambda":[1,-1],"A":[[1,0],[0,-1]]}"#],
        &["point", r#"{"lambda":[1,-1],"bogus":true}"#],
        &["--tol", "-1", "point", S2S2],
        &["verify", "--identity", "no_such_identity"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = run(cases[0]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("$[1].lambda[1]"));
    assert_eq!(code(&run(&["integrate", "--geometry", "torus:9", "--functional", "cgb"])), 2);
    assert_eq!(code(&run(&["bounds", "--chi", "3", "--vol", "1"])), 0);
}

#[test]
fn exit_code_matrix_for_bounds() {
    let ok = ["bounds", "--chi", "4", "--vol", "39.47841760435743", "--S", "4", "--weyl-l2", "842.2062422262918"];
    let o = run(&ok);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["violated"], false);
    assert_eq!(v["predicates"]["corpinch"]["equality"], true);
    assert!((v["predicates"]["corpinch"]["bound"].as_f64().unwrap() - 4.0).abs() < 1e-12);

    let bad = ["bounds", "--chi", "4", "--vol", "39.47841760435743", "--S", "4", "--weyl-l2", "800"];
    let o = run(&bad);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["violated"], true);

    let geodesic = ["bounds", "--chi", "2", "--vol", "26.318945069571623", "--S", "0", "--weyl-l2", "0"];
    assert_eq!(code(&run(&geodesic)), 0);
    assert_eq!(code(&run(&["bounds", "--chi", "2", "--vol", "-1"])), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let batch = format!("[{S2S2},{S1S3},{{\"A\":[[0.3,1,0,0],[1,-0.2,0.5,0],[0,0.5,0.9,0.1],[0,0,0.1,-1]]}}]");
    for args in [
        vec!["point", batch.as_str()],
        vec!["--format", "csv", "point", batch.as_str()],
        vec!["--format", "pretty", "classify", batch.as_str()],
        vec!["verify", "--all"],
        vec!["bounds", "--chi", "0", "--vol", "10", "--S", "4", "--a2avg", "9.3333333"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn integrate_euler_characteristic() {
    let o = run(&["integrate", "--geometry", "clifford:4:2", "--functional", "cgb", "--res", "32"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-8);
    assert_eq!(v["topological"], true);
}

#[test]
fn integrate_dump_is_csv() {
    let path = std::env::temp_dir().join(format!("hypercurv-dump-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let o = run(&["integrate", "--geometry", "sphere:4", "--functional", "volume", "--res", "4", "--dump", p]);
    assert_eq!(code(&o), 0);
    let total = json(&o)["integral"].as_f64().unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "param1,param2,param3,param4,integrand,weight");
    let mut sum = 0.0;
    let mut rows = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 6);
        sum += f[4] * f[5];
        rows += 1;
    }
    assert_eq!(rows, json(&o)["nodes"].as_u64().unwrap());
    assert!((sum - total).abs() < 1e-10 * total);
}

#[test]
fn verify_all_and_negative_control() {
    let o = run(&["verify", "--all"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!((v["passed"].as_u64(), v["total"].as_u64()), (Some(12), Some(12)));

    let o = run(&["verify", "--identity", "negative_control_normWpm"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["identities"][0]["status"], "fail");
    assert!(v["identities"][0]["witness"].is_object());
}

#[test]
fn csv_and_tol_env() {
    let o = run(&["--format", "csv", "classify", S2S2]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,m,partition,w,lcf,einstein,twoTwoSplit,indeterminate");
    assert!(lines.next().unwrap().starts_with("0,2,"));

    // A loose tolerance merges nearby curvatures.
    let near = r#"{"lambda":[1,1.001,-1,-1.001]}"#;
    assert_eq!(json(&run(&["classify", near]))["m"], 4);
    let o = Command::new(env!("CARGO_BIN_EXE_hypercurv")).args(["classify", near]).env("HYPERCURV_TOL", "0.01").output().unwrap();
    assert_eq!(json(&o)["m"], 2);
}
