use seifert_wrt::cli::run;
use serde_json::Value;

const M1: &str = "o;0|-1;(2,1),(3,1),(7,1)";

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("seifert-wrt").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn call_json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--output", "json"]);
    let (code, out, err) = call(&a);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).expect("valid json")
}

#[test]
fn s2xs1_is_one() {
    let (code, out, _) = call(&["invariant", "o;0|0", "--r", "3..10"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 8);
    for (r, line) in (3..=10).zip(&lines) {
        assert_eq!(*line, format!("{r},1.0,0.0"));
    }
}

#[test]
fn invariant_csv_and_json_agree() {
    let (code, csv_out, _) = call(&["invariant", M1, "--r", "5..9", "--output", "csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(csv_out.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["r", "re", "im"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let js = call_json(&["invariant", M1, "--r", "5..9"]);
    let arr = js.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(arr.len(), 5);
    for (row, v) in rows.iter().zip(arr) {
        assert_eq!(row[0].parse::<i64>().unwrap(), v["r"].as_i64().unwrap());
        let re: f64 = row[1].parse().unwrap();
        assert!((re - v["re"].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn h_modes_give_same_values() {
    let a = call_json(&["invariant", M1, "--r", "3..12", "--h-mode", "direct"]);
    let b = call_json(&["invariant", M1, "--r", "3..12", "--h-mode", "factored"]);
    for (x, y) in a.as_array().unwrap().iter().zip(b.as_array().unwrap()) {
        for k in ["re", "im"] {
            assert!((x[k].as_f64().unwrap() - y[k].as_f64().unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn compare_exact_case_passes() {
    let (code, out, _) = call(&["compare", "o;2|-1;(2,1),(2,1)", "--N", "0", "--r", "3..30"]);
    assert_eq!(code, 0, "{out}");
    let js = call_json(&["compare", "o;2|-1;(2,1),(2,1)", "--N", "0", "--r", "3..30"]);
    let res = js["residuals"].as_array().unwrap();
    assert_eq!(res.len(), 28);
    assert!(res.iter().all(|e| e.as_f64().unwrap() < 1e-9));
    assert_eq!(js["exact"], Value::Bool(true));
}

#[test]
fn compare_csv_columns() {
    let (code, out, _) = call(&["compare", "o;0|-1;(2,1),(3,1)", "--N", "1", "--r", "20..40", "--output", "csv"]);
    assert!(code == 0 || code == 2);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let h: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(h, ["r", "re(tau)", "im(tau)", "re(approx)", "im(approx)", "abs_residual"]);
    assert_eq!(rdr.records().count(), 21);
}

#[test]
fn compare_reports_verification_failure() {
    // too few stationary-phase orders for a fit this early
    let (code, _, _) = call(&["compare", "o;0|-2;(2,1),(3,2),(5,3)", "--N", "0", "--r", "3..10"]);
    assert_eq!(code, 2);
}

#[test]
fn cs_spectrum_of_m1() {
    let js = call_json(&["cs", M1]);
    let arr = js.as_array().unwrap();
    assert_eq!(arr.len(), 24);
    let qs: Vec<&str> = arr.iter().map(|e| e["q"].as_str().unwrap()).collect();
    assert!(qs.contains(&"121/168"));
    assert!(qs.contains(&"25/168"));
    for e in arr {
        for k in ["label", "q", "cs", "rep_exists"] {
            assert!(e.get(k).is_some(), "missing {k}");
        }
    }
}

#[test]
fn expand_schema() {
    let js = call_json(&["expand", M1, "--N", "1"]);
    let pre = &js["prefactor"];
    assert!(pre["power"].is_string());
    for k in ["phase_c", "b_re", "b_im"] {
        assert!(pre[k].is_f64(), "{k}");
    }
    let branches = js["branches"].as_array().unwrap();
    assert!(!branches.is_empty());
    for b in branches {
        assert!(b["q"].is_string());
        for t in b["terms"].as_array().unwrap() {
            let e = t["exponent"].as_str().unwrap();
            assert!(e == "0" || e.ends_with("/2") || e.parse::<i64>().is_ok(), "{e}");
            assert!(t["re"].is_f64() && t["im"].is_f64());
        }
    }
    assert!(js.get("polar").is_some());
}

#[test]
fn casson_and_moduli() {
    let (code, out, _) = call(&["casson", M1]);
    assert_eq!(code, 0);
    assert!(out.contains("lambda_CW = 2"), "{out}");
    let (code, out, _) = call(&["moduli", M1]);
    assert_eq!(code, 0);
    assert!(out.contains("I2b: 23 points"));
    let (code, _, _) = call(&["vanish-scan", M1]);
    assert_eq!(code, 0);
}

#[test]
fn input_errors_exit_one() {
    let (code, _, err) = call(&["invariant", "bad"]);
    assert_eq!(code, 1);
    assert!(err.contains("parse error"));
    let (code, _, _) = call(&["invariant", "o;0|-1;(2,4)"]);
    assert_eq!(code, 1);
    let (code, _, _) = call(&["invariant", "o;0|0", "--r", "1..5"]);
    assert_eq!(code, 1);
    let (code, _, _) = call(&["invariant", "o;0|0", "--precision", "10"]);
    assert_eq!(code, 1);
    let (code, _, err) = call(&["expand", "n;1|-1;(2,1)"]);
    assert_eq!(code, 1);
    assert!(err.contains("unsupported"), "{err}");
    let (code, _, _) = call(&["nonsense"]);
    assert_eq!(code, 1);
}

#[test]
fn json_manifold_input() {
    let a = call_json(&["invariant", M1, "--r", "4..6"]);
    let j = r#"{"base":"o","genus":0,"b":-1,"fibers":[[2,1],[3,1],[7,1]]}"#;
    let (code, _, err) = call(&["invariant", j, "--r", "4..6", "--output", "json"]);
    if code == 0 {
        let b = call_json(&["invariant", j, "--r", "4..6"]);
        assert_eq!(a, b);
    } else {
        panic!("json form rejected: {err}");
    }
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["expand", M1, "--N", "2", "--output", "json"],
        vec!["compare", M1, "--N", "1", "--r", "10..30", "--output", "csv"],
        vec!["cs", "o;1|0;(3,1),(5,2)"],
    ] {
        let a = call(&args);
        let b = call(&args);
        assert_eq!(a, b);
    }
}
