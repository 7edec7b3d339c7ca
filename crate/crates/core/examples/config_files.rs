//! Driving an experiment from a JSON document, the same path the `qwalk`
//! binary takes.

use qwalk::cli::{run_experiment, OutputFormat};
use qwalk::config::{Experiment, ExperimentConfig};

const CONFIG: &str = r#"{
    "steps": 800,
    "noise": {"kind": "binary-pair", "axis": "temporal", "theta1": "pi/3", "theta2": "pi/4", "seed": 9},
    "realizations": 10
}"#;

fn main() {
    let overrides = vec![
        "noise.theta1=4pi/15".to_string(),
        "fit_window=[200, 800]".to_string(),
    ];
    let config = ExperimentConfig::from_json_with_overrides(CONFIG, &overrides)
        .and_then(|c| c.resolve(Experiment::Run))
        .unwrap_or_else(|e| panic!("bad config: {e}"));

    let dir = std::env::temp_dir().join("qwalk-config-example");
    if let Err(e) = run_experiment(&config, &dir, OutputFormat::Both) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
    println!("outputs in {}", dir.display());
    println!("{}", std::fs::read_to_string(dir.join("fit.json")).unwrap());
}
