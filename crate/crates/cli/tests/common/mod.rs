#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn ec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ec")).args(args).env_remove("EC_THREADS").output().expect("running ec")
}

pub fn ec_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ec"))
        .current_dir(dir)
        .args(args)
        .env_remove("EC_THREADS")
        .output()
        .expect("running ec")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout_json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Validates against a shipped schema, `name` as in `name.schema.json`.
pub fn assert_schema(name: &str, instance: &Value) {
    let common = read_json(&schema_dir().join("common.schema.json"));
    let schema = read_json(&schema_dir().join(format!("{name}.schema.json")));
    let registry = jsonschema::Registry::new().add("urn:ec:common:1", &common).unwrap().prepare().unwrap();
    let validator = jsonschema::options().with_registry(&registry).build(&schema).expect("schema compiles");
    let errors: Vec<String> =
        validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

pub struct Dot {
    pub nodes: Vec<(String, Vec<(String, String)>)>,
    pub edges: Vec<(String, String)>,
}

/// Parses DOT with a grammar-strict parser.
pub fn parse_dot(text: &str) -> Dot {
    let ast = dot_parser::ast::Graph::try_from(text).unwrap_or_else(|e| panic!("DOT does not parse: {e}\n{text}"));
    let graph = dot_parser::canonical::Graph::from(ast);
    let text = |id: &dot_parser::ast::ID<'_>| -> String { id.clone().into() };
    let mut nodes: Vec<_> = graph
        .nodes
        .set
        .into_values()
        .map(|n| (n.id, n.attr.elems.iter().map(|(k, v)| (text(k), text(v))).collect()))
        .collect();
    nodes.sort_by_key(|(id, _)| id.parse::<usize>().unwrap_or(usize::MAX));
    let edges = graph.edges.set.into_iter().map(|e| (e.from, e.to)).collect();
    Dot { nodes, edges }
}

pub fn attr<'a>(attrs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

/// Writes the unit square corners and returns the path.
pub fn square(dir: &Path) -> PathBuf {
    let path = dir.join("square.json");
    let out = ec(&["generate", "--family", "square", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    path
}
