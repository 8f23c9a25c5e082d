//! End-to-end tests of the CLI surface: frozen outputs, exit codes,
//! determinism, and schema validation of every JSON document.

use brgk_cli::run;
use serde_json::Value;

fn go(args: &[&str]) -> (i32, String) {
    run(&args.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn ok_json(args: &[&str]) -> Value {
    let (code, out) = go(args);
    assert_eq!(code, 0, "{args:?} failed: {out}");
    serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?} not JSON ({e}): {out}"))
}

// ---- a small JSON Schema checker (the subset the shipped schemas use) ----

fn type_ok(v: &Value, t: &str) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_i64() || v.is_u64(),
        "number" => v.is_number(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => panic!("unknown type {t}"),
    }
}

fn validate(v: &Value, schema: &Value, path: &str) -> std::result::Result<(), String> {
    let obj = schema.as_object().expect("schema node is an object");
    if let Some(t) = obj.get("type") {
        let pass = match t {
            Value::String(s) => type_ok(v, s),
            Value::Array(ts) => ts.iter().any(|s| type_ok(v, s.as_str().unwrap())),
            _ => panic!("bad type clause"),
        };
        if !pass {
            return Err(format!("{path}: {v} does not have type {t}"));
        }
    }
    if let Some(e) = obj.get("enum") {
        if !e.as_array().unwrap().contains(v) {
            return Err(format!("{path}: {v} not in enum {e}"));
        }
    }
    if let (Some(props), Some(map)) = (obj.get("properties"), v.as_object()) {
        for (k, sub) in props.as_object().unwrap() {
            if let Some(val) = map.get(k) {
                validate(val, sub, &format!("{path}/{k}"))?;
            }
        }
        if let Some(req) = obj.get("required") {
            for k in req.as_array().unwrap() {
                let k = k.as_str().unwrap();
                if !map.contains_key(k) {
                    return Err(format!("{path}: missing required key {k:?}"));
                }
            }
        }
        match obj.get("additionalProperties") {
            Some(Value::Bool(false)) => {
                let known = props.as_object().unwrap();
                for k in map.keys() {
                    if !known.contains_key(k) {
                        return Err(format!("{path}: unexpected key {k:?}"));
                    }
                }
            }
            Some(Value::Bool(true)) | None => {}
            Some(sub) => {
                let known = props.as_object().unwrap();
                for (k, val) in map {
                    if !known.contains_key(k) {
                        validate(val, sub, &format!("{path}/{k}"))?;
                    }
                }
            }
        }
    } else if let (Some(sub), Some(map)) = (obj.get("additionalProperties"), v.as_object()) {
        if let Some(sub) = sub.as_object().map(|_| sub) {
            for (k, val) in map {
                validate(val, sub, &format!("{path}/{k}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (obj.get("items"), v.as_array()) {
        for (i, val) in arr.iter().enumerate() {
            validate(val, items, &format!("{path}/{i}"))?;
        }
    }
    Ok(())
}

fn check_schema(doc: &Value, schema_file: &str) {
    let path = format!("{}/../../schemas/{schema_file}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    let schema: Value = serde_json::from_str(&text).unwrap();
    validate(doc, &schema, "").unwrap_or_else(|e| panic!("{schema_file}: {e}"));
}

// ---- frozen examples ----

#[test]
fn frozen_hilbert() {
    assert_eq!(go(&["hilbert", "-a", "-1", "-b", "-1", "-v", "2"]), (0, "-1\n".into()));
    assert_eq!(go(&["hilbert", "-a", "-1", "-b", "-1", "-v", "inf"]), (0, "-1\n".into()));
    assert_eq!(go(&["hilbert", "-a", "-1", "-b", "-1", "-v", "3"]), (0, "1\n".into()));
}

#[test]
fn frozen_ram() {
    assert_eq!(go(&["ram", "-a", "1", "-b", "7"]), (0, "{}\n".into()));
    assert_eq!(go(&["ram", "-a", "-1", "-b", "-1"]), (0, "{2, inf}\n".into()));
}

#[test]
fn frozen_selmer_113() {
    let doc = ok_json(&["descent", "selmer", "-a", "0", "-b", "-113"]);
    let reps: Vec<&str> = doc["selmer_phi"]["reps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(reps, ["1", "2", "113", "226"]);
    let reps: Vec<&str> = doc["selmer_phihat"]["reps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(reps, ["-113", "-1", "1", "113"]);
    assert!(doc["selmer_two"].is_null());
    check_schema(&doc, "selmer.json");
}

#[test]
fn frozen_refine_113() {
    let doc = ok_json(&[
        "descent", "refine", "-a", "0", "-b", "-113", "-m", "-1", "--target", "-1",
        "--rank", "0", "--same-points-over-l",
    ]);
    assert_eq!(doc["verdict"], "refined");
    assert_eq!(doc["genus_bound"], 1);
    assert_eq!(doc["survivors"], serde_json::json!(["[D_-1]"]));
    check_schema(&doc, "refine.json");
}

// ---- exit codes ----

#[test]
fn exit_codes() {
    // unknown subcommand: usage text, exit 2
    let (code, out) = go(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(out.contains("Usage"), "{out}");
    // no subcommand at all: help, exit 2
    let (code, out) = go(&[]);
    assert_eq!(code, 2);
    assert!(out.contains("Usage"), "{out}");
    // help requested explicitly: exit 0
    let (code, out) = go(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"), "{out}");
    // missing required flag
    let (code, _) = go(&["hilbert", "-a", "-1"]);
    assert_eq!(code, 2);
    // malformed place / malformed expression are parse errors
    assert_eq!(go(&["hilbert", "-a", "1", "-b", "2", "-v", "6"]).0, 2);
    assert_eq!(go(&["equiv-q", "[(1", "[(2, 3)]"]).0, 2);
    // degree cap is a budget error
    let (code, out) = go(&["qx", "residues", "[(x^13+2, x)]"]);
    assert_eq!(code, 3, "{out}");
    // inconsistent domain data is an ordinary error
    let (code, out) = go(&["descent", "sha-bound", "-a", "0", "-b", "-113", "--rank", "5"]);
    assert_eq!(code, 1, "{out}");
    // zero symbol entry
    assert_eq!(go(&["hilbert", "-a", "0", "-b", "1", "-v", "2"]).0, 1);
    // laurent height mismatch between the expression and -n
    let (code, _) = go(&["laurent", "genus", "[(2*t1, t1)] @ height 1", "-n", "2"]);
    assert_eq!(code, 2);
}

// ---- output modes, config, determinism ----

#[test]
fn json_mode_flag() {
    let doc = ok_json(&["hilbert", "-a", "-1", "-b", "-1", "-v", "2", "-o", "json"]);
    assert_eq!(doc["value"], -1);
    check_schema(&doc, "hilbert_value.json");
    let doc = ok_json(&["ram", "-a", "-1", "-b", "-1", "--output", "json"]);
    assert_eq!(doc["places"], serde_json::json!(["2", "inf"]));
    check_schema(&doc, "ram.json");
}

#[test]
fn config_file_flag() {
    let dir = std::env::temp_dir().join("brgk-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("json.conf");
    std::fs::write(&path, "# test config\noutput = json\n").unwrap();
    let doc = ok_json(&["--config", path.to_str().unwrap(), "hilbert", "-a", "-1", "-b", "-1", "-v", "2"]);
    assert_eq!(doc["value"], -1);
    // an explicit -o text wins over the file
    let (code, out) = go(&["--config", path.to_str().unwrap(), "-o", "text", "hilbert", "-a", "-1", "-b", "-1", "-v", "2"]);
    assert_eq!((code, out.as_str()), (0, "-1\n"));
    // unknown keys are rejected
    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "factor_bugdet = 10\n").unwrap();
    assert_eq!(go(&["--config", bad.to_str().unwrap(), "ram", "-a", "1", "-b", "7"]).0, 2);
    // a missing file is a parse error, not a crash
    assert_eq!(go(&["--config", "/nonexistent/brgk.conf", "ram", "-a", "1", "-b", "7"]).0, 2);
}

#[test]
fn env_config_through_binary() {
    // BRGK_CONFIG is read by the binary; exercised in a subprocess so the
    // environment of other tests is untouched.
    let dir = std::env::temp_dir().join("brgk-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("env.conf");
    std::fs::write(&path, "output = json\n").unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_brgk"))
        .args(["hilbert", "-a", "-1", "-b", "-1", "-v", "2"])
        .env("BRGK_CONFIG", &path)
        .output()
        .expect("spawn brgk");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["value"], -1);
}

#[test]
fn byte_identical_reruns() {
    for args in [
        &["descent", "selmer", "-a", "0", "-b", "-113"][..],
        &["qx", "faddeev", "[(x, x+1); (2, x^2-2)]", "-o", "json"][..],
        &["laurent", "genus", "[(2*t1, t2)]", "-n", "2"][..],
    ] {
        let first = go(args);
        let second = go(args);
        assert_eq!(first, second, "{args:?} not deterministic");
        assert_eq!(first.0, 0);
    }
}

// ---- schema coverage for the remaining JSON documents ----

#[test]
fn schemas_cover_all_json_outputs() {
    check_schema(
        &ok_json(&["hilbert", "-a", "-6", "-b", "15", "-o", "json"]),
        "hilbert_profile.json",
    );
    check_schema(
        &ok_json(&["equiv-q", "[(-1, -1)]", "[(-1, -2)]", "-o", "json"]),
        "equiv.json",
    );
    check_schema(
        &ok_json(&["qx", "equiv", "[(x, x+1)]", "[(x, x+1)]", "-o", "json"]),
        "equiv.json",
    );
    check_schema(
        &ok_json(&["qx", "residues", "[(x, x+1); (2, x^2-2)]", "-o", "json"]),
        "qx_residues.json",
    );
    check_schema(
        &ok_json(&["qx", "faddeev", "[(x, x+1); (2, x^2-2)]", "-o", "json"]),
        "qx_faddeev.json",
    );
    check_schema(
        &ok_json(&["qx", "genus", "[(x, x+1)]", "-o", "json"]),
        "qx_genus.json",
    );
    check_schema(
        &ok_json(&["qx", "split-point", "[(x, x+1)]", "-p", "3", "-o", "json"]),
        "split_point.json",
    );
    check_schema(
        &ok_json(&["laurent", "genus", "[(2*t1, t2)]", "-n", "2", "-o", "json"]),
        "laurent_genus.json",
    );
    check_schema(
        &ok_json(&["laurent", "normalize", "[(2*t1, t2); (-1, 3)]", "-n", "2", "-o", "json"]),
        "laurent_normalize.json",
    );
    check_schema(
        &ok_json(&["descent", "selmer", "-a", "0", "-b", "1"]),
        "selmer.json",
    );
    check_schema(
        &ok_json(&["descent", "sha-bound", "-a", "0", "-b", "-113", "--rank", "0"]),
        "sha_bound.json",
    );
    check_schema(
        &ok_json(&["descent", "refine", "-a", "0", "-b", "-113", "-m", "-1", "--target", "-1"]),
        "refine.json",
    );
}

#[test]
fn split_curve_selmer_reported() {
    // y^2 = x^3 - x splits; the full 2-descent group rides along
    let doc = ok_json(&["descent", "selmer", "-a", "0", "-b", "-1"]);
    assert_eq!(doc["selmer_two"]["size"], 4);
    assert_eq!(
        doc["selmer_two"]["reps"],
        serde_json::json!(["(-1, 1)", "(-1, 2)", "(1, 1)", "(1, 2)"])
    );
    check_schema(&doc, "selmer.json");
}
