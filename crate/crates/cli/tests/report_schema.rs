use std::fs;
use std::path::Path;

use mils_cli::eval::{run_experiment, ExperimentConfig, RunOptions};
use tempfile::TempDir;

fn schema() -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/mils-report-1.schema.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reports_validate_against_published_schema() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("dag.txt"), "directed\n0 1\n1 2\n0 2\n2 3\n").unwrap();
    let text = r#"{
        "inputs": ["dag.txt"],
        "generators": [{"model": "er", "n": 40, "m": 60, "seed": 7}, {"model": "ws", "n": 30, "k": 4, "p": 0.2, "seed": 1}],
        "methods": [{"method": "mils", "mode": "log-target"}, {"method": "mils-seq"}, {"method": "random"},
                    {"method": "spanning-tree"}, {"method": "transitive"}, {"method": "spectral", "epsilon": 0.5}],
        "schedule": {"fractions": [0.8, 0.5]},
        "seeds": [3, 4],
        "output_dir": "out"
    }"#;
    let cfg = ExperimentConfig::from_json(text, dir.path()).unwrap();
    let timed = RunOptions {
        timings: true,
        ..RunOptions::default()
    };
    run_experiment(&cfg, timed).unwrap();
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    assert_eq!(report["schema"], "mils-report/1");
}

#[test]
fn schema_rejects_out_of_range_scores() {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let bad = serde_json::json!({
        "schema": "mils-report/1",
        "estimator": [],
        "binning": {"degree": "", "continuous": ""},
        "inputs": [{
            "name": "g", "nodes": 2, "edges": 1, "directed": false, "schedule": [1], "original": [],
            "results": [{"method": "random", "seed": 1, "target": 1, "final_edges": 1, "steps": null, "trace": null,
                         "coerced_unweighted": false, "spanning_forest": false,
                         "metrics": [{"metric": "degree", "counts": [2], "total_variation": 1.5, "intersection": 0.0}]}]
        }]
    });
    assert!(!validator.is_valid(&bad));
}
