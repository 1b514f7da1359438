//! Reports and configs validate against the schema files shipped in `schema/`.

use finsler_cli::{run_config, ScanConfig};
use jsonschema::{Registry, Validator};
use serde_json::Value;

fn load(name: &str) -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/");
    serde_json::from_str(&std::fs::read_to_string(format!("{path}{name}")).unwrap()).unwrap()
}

fn validators() -> (Validator, Validator) {
    let config = load("scanconfig.schema.json");
    let report = load("scanreport.schema.json");
    let config_v = jsonschema::validator_for(&config).unwrap();
    let registry = Registry::new()
        .add("urn:finsler:scanconfig", config)
        .unwrap()
        .prepare()
        .unwrap();
    let report_v = jsonschema::options().with_registry(&registry).build(&report).unwrap();
    (config_v, report_v)
}

fn assert_valid(v: &Validator, doc: &Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

const CONFIGS: &[&str] = &[
    r#"{"metric": {"kind": "sphere2"}, "checks": ["einstein", "oracle"], "samples": {"count": 3}}"#,
    r#"{"metric": {"kind": "randers", "params": {"b": [0.2, 0.1, 0]}}, "checks": ["properties", "conformal"],
        "conformal": {"u": "linear:0.1,0,0"}, "samples": {"count": 2}, "output": {"format": "csv"}}"#,
    r#"{"checks": ["cylinder"], "conformal": {"phi": "cos+c", "c": 2, "eps": 3.14}, "samples": {"count": 3, "seed": 5}}"#,
    r#"{"metric": {"kind": "s5_example"}, "checks": ["warped", "einstein"], "expect": {"scal": 6},
        "samples": {"count": 2, "domain": {"lower": [1, 1, 0], "upper": [2, 2, 1]}}, "tolerances": {"scal_error": 1e-5}}"#,
    r#"{"metric": {"kind": "hyperbolic2"}, "checks": ["einstein"], "samples": {"count": 2,
        "domain": {"lower": [0, 0], "upper": [0, 0]}}}"#,
];

#[test]
fn configs_and_reports_match_the_schema() {
    let (config_v, report_v) = validators();
    for text in CONFIGS {
        let cfg = ScanConfig::from_json(text).unwrap();
        assert_valid(&config_v, &serde_json::from_str(text).unwrap());
        let report = serde_json::to_value(run_config(&cfg).unwrap()).unwrap();
        assert_valid(&report_v, &report);
    }
}

#[test]
fn schema_rejects_unknown_keys() {
    let (config_v, _) = validators();
    let bad: Value = serde_json::from_str(r#"{"metric": {"kind": "sphere2"}, "colour": 1}"#).unwrap();
    assert!(!config_v.is_valid(&bad));
}
