mod common;

use common::*;
use serde_json::Value;
use tempfile::tempdir;

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_and_help() {
    let out = ec(&["--version"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ec "));
    assert_eq!(code(&ec(&["frobnicate"])), 1);
    assert_eq!(code(&ec(&["tower", "--input", "x.json"])), 1);
    assert_eq!(code(&ec(&["help"])), 0);
}

#[test]
fn generate_writes_valid_space_files() {
    let dir = tempdir().unwrap();
    let g2 = dir.path().join("g2.json");
    let out = ec(&["generate", "--family", "gasket", "--level", "2", "--density", "0.03", "--out", s(&g2)]);
    assert_eq!(code(&out), 0);
    let v = read_json(&g2);
    assert_schema("space", &v);
    assert_eq!(v["schema"], "ec-space/1");
    assert!(ec_core::FiniteMetricSpace::load(&g2).unwrap().len() > 100);

    let sq = square(dir.path());
    assert_schema("space", &read_json(&sq));
    for bad in [
        vec!["generate", "--family", "sponge"],
        vec!["generate", "--family", "gasket", "--level", "2", "--density", "0.2"],
        vec!["generate", "--family", "circle", "--density", "-1"],
    ] {
        assert_eq!(code(&ec(&bad)), 1, "{bad:?}");
    }
}

#[test]
fn analyze_square() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let v = stdout_json(&ec(&["analyze", "--input", s(&sq), "--scale", "1.2"]));
    assert_schema("analysis", &v);
    assert_eq!(v["result"]["betti"], 1);
    assert_eq!(v["result"]["certification"], "free_certified");
    assert_eq!(v["universality"]["verdict"], "refuted");

    let v = stdout_json(&ec(&["analyze", "--input", s(&sq), "--scale", "1.5"]));
    assert_schema("analysis", &v);
    assert_eq!(v["result"]["betti"], 0);
    assert_eq!(v["result"]["certification"], "trivial_certified");
    assert_eq!(v["universality"]["verdict"], "certified");
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let missing = dir.path().join("missing.json");
    let out = ec(&["analyze", "--input", s(&missing), "--scale", "1.2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, r#"{"metric": "matrix", "matrix": [[0, 1], [2, 0]], "basepoint": 0}"#).unwrap();
    assert_eq!(code(&ec(&["analyze", "--input", s(&garbage), "--scale", "1"])), 1);
    assert_eq!(code(&ec(&["analyze", "--input", s(&sq), "--scale", "-1"])), 1);
    assert_eq!(code(&ec(&["tower", "--input", s(&sq), "--scales", "1.0,1.2"])), 1);

    // The flat torus is not free at this scale; the exact cover is refused.
    let torus = dir.path().join("torus.json");
    let wrap = |a: usize, b: usize| a.abs_diff(b).min(5 - a.abs_diff(b));
    let matrix: Vec<Vec<f64>> =
        (0..25).map(|i| (0..25).map(|j| wrap(i % 5, j % 5).max(wrap(i / 5, j / 5)) as f64).collect()).collect();
    let file = serde_json::json!({ "schema": "ec-space/1", "metric": "matrix", "matrix": matrix, "basepoint": 0 });
    std::fs::write(&torus, file.to_string()).unwrap();
    assert_schema("space", &file);
    let out = ec(&["cover", "--input", s(&torus), "--scale", "1.5", "--radius", "2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--abelianized"));
    let v = stdout_json(&ec(&["cover", "--input", s(&torus), "--scale", "1.5", "--radius", "2", "--abelianized"]));
    assert_eq!(v["rank"], 2);
}

#[test]
fn graph_dot_has_one_node_per_point() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let dot_path = dir.path().join("g.dot");
    assert_eq!(code(&ec(&["graph", "--input", s(&sq), "--scale", "1.2", "--emit-dot", s(&dot_path)])), 0);
    let dot = parse_dot(&std::fs::read_to_string(&dot_path).unwrap());
    assert_eq!(dot.nodes.len(), 4);
    assert_eq!(dot.edges.len(), 4);
    let dot = parse_dot(&String::from_utf8(ec(&["graph", "--input", s(&sq), "--scale", "1.5"]).stdout).unwrap());
    assert_eq!(dot.edges.len(), 6);
}

#[test]
fn present_writes_signed_words() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let path = dir.path().join("p.json");
    assert_eq!(code(&ec(&["present", "--input", s(&sq), "--scale", "1.5", "--emit-json", s(&path)])), 0);
    let v = read_json(&path);
    assert_schema("presentation", &v);
    // K4: three generators, one relator per triangle.
    assert_eq!(v["generators"].as_array().unwrap().len(), 3);
    assert_eq!(v["relators"].as_array().unwrap().len(), 4);
    assert_eq!(v["rank_upper"], 0);
    let gens = v["generators"].as_array().unwrap().len() as i64;
    for r in v["relators"].as_array().unwrap() {
        for x in r.as_array().unwrap() {
            let x = x.as_i64().unwrap();
            assert!(x != 0 && x.abs() <= gens);
        }
    }
    let v = stdout_json(&ec(&["present", "--input", s(&sq), "--scale", "1.2"]));
    assert_eq!(v["rank_upper"], 1);
    assert_eq!(v["relators"], Value::Array(vec![]));
}

#[test]
fn cover_of_the_square_is_a_path() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let dot_path = dir.path().join("c.dot");
    let v =
        stdout_json(&ec(&["cover", "--input", s(&sq), "--scale", "1.2", "--radius", "9", "--emit-dot", s(&dot_path)]));
    assert_schema("cover", &v);
    assert_eq!(v["vertices"], 19);
    assert_eq!(v["edges"], 18);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["fiber_failures"], 0);
    let dot = parse_dot(&std::fs::read_to_string(&dot_path).unwrap());
    assert_eq!(dot.nodes.len(), 19);
    assert_eq!(dot.edges.len(), 18);
    let labels: Vec<&str> = dot.nodes.iter().map(|(_, a)| attr(a, "label").unwrap()).collect();
    assert_eq!(labels[0], "0:1");
    assert!(labels.iter().all(|l| {
        let (point, word) = l.split_once(':').unwrap();
        point.parse::<usize>().unwrap() < 4 && !word.is_empty()
    }));
    // Lifts of the basepoint are labeled by powers of the generator.
    assert!(labels.contains(&"0:g0") && labels.contains(&"0:g0^-1"));
}

#[test]
fn abelianized_cover_mode() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let v = stdout_json(&ec(&["cover", "--input", s(&sq), "--scale", "1.2", "--radius", "5", "--abelianized"]));
    assert_schema("cover", &v);
    assert_eq!(v["mode"], "abelianized");
    assert!(v.get("fiber_failures").is_none());
}

#[test]
fn certificates_round_trip_with_exit_codes() {
    let dir = tempdir().unwrap();
    let sq = square(dir.path());
    let cert = dir.path().join("cert.json");
    let args = ["certify", "--space", s(&sq), "--scale", "1.2"];
    let out = ec(&[&args[..], &["--from", "0,1,2,1,0", "--to", "0,3,0", "--out", s(&cert)]].concat());
    assert_eq!(code(&out), 0);
    let v = read_json(&cert);
    assert_schema("cert", &v);
    assert_eq!(v["schema"], "ec-cert/1");

    let out = ec(&["certify", "--space", s(&sq), "--verify", s(&cert)]);
    assert_eq!(code(&out), 0);
    let out = ec(&["certify", "--space", s(&sq), "--verify", s(&cert), "--to", "0,1,0"]);
    assert_eq!(code(&out), 2);

    // A move that breaks the chain.
    let mut broken = v.clone();
    broken["moves"][3]["point"] = Value::from(2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&broken).unwrap()).unwrap();
    assert_eq!(code(&ec(&["certify", "--space", s(&sq), "--verify", s(&bad)])), 2);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&ec(&["certify", "--space", s(&sq), "--verify", s(&bad)])), 2);
    let mut wrong_schema = v.clone();
    wrong_schema["schema"] = Value::from("ec-cert/9");
    std::fs::write(&bad, serde_json::to_string(&wrong_schema).unwrap()).unwrap();
    assert_eq!(code(&ec(&["certify", "--space", s(&sq), "--verify", s(&bad)])), 2);

    // The two orientations of the square are not joined within any budget.
    let out = ec(&[&args[..], &["--from", "0,1,2,3,0", "--to", "0,3,2,1,0", "--budget", "5000"]].concat());
    assert_eq!(code(&out), 3);
    // Chains that are not chains at the scale.
    assert_eq!(code(&ec(&[&args[..], &["--from", "0,2,0", "--to", "0"]].concat())), 1);
    assert_eq!(code(&ec(&[&args[..], &["--from", "0,1", "--to", "0,3"]].concat())), 1);
}

#[test]
fn tower_json_and_svg() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("earring3.json");
    assert_eq!(code(&ec(&["generate", "--family", "earring", "--level", "3", "--out", s(&input)])), 0);
    let (json, svg) = (dir.path().join("t.json"), dir.path().join("t.svg"));
    let out = ec(&[
        "tower",
        "--input",
        s(&input),
        "--scales",
        "0.25,0.125,0.0625",
        "--emit-svg",
        s(&svg),
        "--emit-json",
        s(&json),
    ]);
    assert_eq!(code(&out), 0);
    let v = read_json(&json);
    assert_schema("tower", &v);
    let betti: Vec<i64> = v["scales"].as_array().unwrap().iter().map(|s| s["betti"].as_i64().unwrap()).collect();
    assert_eq!(betti, vec![1, 2, 3]);
    for m in v["maps"].as_array().unwrap() {
        assert_eq!(m["surjective"], true);
        assert_eq!(m["kernel_rank"], 1);
    }
    assert_eq!(v["critical"].as_array().unwrap().len(), 2);
    assert_eq!(v["stabilization"]["verdict"], "not_stable");

    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let critical = doc.descendants().filter(|n| n.attribute("class") == Some("critical")).count();
    assert_eq!(critical, 2);
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 3);

    let v = stdout_json(&ec(&["tower", "--input", s(&input), "--auto"]));
    assert_schema("tower", &v);
}

#[test]
fn theta_emits_the_folded_graph() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("earring2.json");
    assert_eq!(code(&ec(&["generate", "--family", "earring", "--level", "2", "--out", s(&input)])), 0);
    let dot_path = dir.path().join("f.dot");
    let v = stdout_json(&ec(&[
        "theta",
        "--input",
        s(&input),
        "--coarse",
        "0.26",
        "--fine",
        "0.13",
        "--emit-dot",
        s(&dot_path),
    ]));
    assert_schema("theta", &v);
    assert_eq!(v["coarse"]["betti"], 1);
    assert_eq!(v["fine"]["betti"], 2);
    assert_eq!(v["map"]["surjective"], true);
    let dot = parse_dot(&std::fs::read_to_string(&dot_path).unwrap());
    assert!(!dot.nodes.is_empty());
    assert!(!dot.edges.is_empty());
    assert_eq!(code(&ec(&["theta", "--input", s(&input), "--coarse", "0.1", "--fine", "0.2"])), 1);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("g1.json");
    assert_eq!(code(&ec(&["generate", "--family", "gasket", "--level", "1", "--out", s(&input)])), 0);
    let args = ["tower", "--input", s(&input), "--scales", "0.5,0.25"];
    let plain = ec(&args);
    let capped =
        std::process::Command::new(env!("CARGO_BIN_EXE_ec")).args(args).env("EC_THREADS", "1").output().unwrap();
    assert_eq!(code(&plain), 0);
    assert_eq!(plain.stdout, capped.stdout);
    let bad =
        std::process::Command::new(env!("CARGO_BIN_EXE_ec")).args(args).env("EC_THREADS", "zero").output().unwrap();
    assert_eq!(code(&bad), 1);
}
