use proptest::prelude::*;

use phimin_cli::config::{to_json, Command, CommandParams, FamilyName};
use phimin_cli::{parse_config, ConfigError};

fn configs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn schema_paths(e: ConfigError) -> Vec<String> {
    match e {
        ConfigError::Schema(v) => v.into_iter().map(|x| x.path).collect(),
        ConfigError::Parse(m) => panic!("expected a schema error, got parse error {m}"),
    }
}

#[test]
fn linear_rotational_config_is_valid() {
    let text = r#"{
        "potential": {"family": "Linear", "slope": 1, "alpha": -1e9},
        "command": "SolveRotational",
        "params": {"start": {"axis": {"z0": 0}}, "s_max": 4, "step": 1e-3}
    }"#;
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.command, Command::SolveRotational);
    assert_eq!(cfg.potential.family, FamilyName::Linear);
    assert_eq!(cfg.potential.slope, Some(1.0));
    assert_eq!(cfg.seed, 0);
    assert!(matches!(cfg.params, CommandParams::SolveRotational(_)));
}

#[test]
fn negative_lambda_is_a_schema_error() {
    let text = r#"{
        "potential": {"family": "Quadratic", "Lambda": -1, "beta": 1},
        "command": "PotentialCheck",
        "params": {"z_lo": 0, "z_hi": 1}
    }"#;
    assert_eq!(schema_paths(parse_config(text).unwrap_err()), ["potential.Lambda"]);
}

#[test]
fn empty_document_is_a_parse_error() {
    assert!(matches!(parse_config(""), Err(ConfigError::Parse(_))));
    assert!(matches!(parse_config("{\"potential\": "), Err(ConfigError::Parse(_))));
}

#[test]
fn non_object_document_is_a_schema_error() {
    assert_eq!(schema_paths(parse_config("[1, 2]").unwrap_err()), ["."]);
}

#[test]
fn unknown_family_names_its_path() {
    let text = r#"{"potential": {"family": "Cubic"}, "command": "PotentialCheck", "params": {"z_lo": 0, "z_hi": 1}}"#;
    assert_eq!(schema_paths(parse_config(text).unwrap_err()), ["potential.family"]);
}

#[test]
fn missing_and_foreign_parameters_are_reported() {
    let text = r#"{"potential": {"family": "Linear", "beta": 2}, "command": "PotentialCheck", "params": {"z_lo": 0, "z_hi": 1}}"#;
    let paths = schema_paths(parse_config(text).unwrap_err());
    assert!(paths.contains(&"potential.slope".to_string()), "{paths:?}");
    assert!(paths.contains(&"potential.beta".to_string()), "{paths:?}");
}

#[test]
fn missing_command_parameter_names_its_path() {
    let text = r#"{
        "potential": {"family": "Linear", "slope": 1, "alpha": -1e9},
        "command": "AuditArea",
        "params": {"surface": {"rotational": {"start": {"axis": {"z0": 0}}, "s_max": 2, "step": 1e-3}}}
    }"#;
    let paths = schema_paths(parse_config(text).unwrap_err());
    assert_eq!(paths.len(), 1);
    assert!(paths[0].starts_with("params"), "{paths:?}");
}

#[test]
fn out_of_range_values_are_rejected() {
    let text = r#"{
        "potential": {"family": "Linear", "slope": 1, "alpha": -1e9},
        "command": "SolveRotational",
        "params": {"start": {"axis": {"z0": 0}}, "s_max": 4, "step": -1e-3}
    }"#;
    assert_eq!(schema_paths(parse_config(text).unwrap_err()), ["params.step"]);
}

#[test]
fn unknown_top_level_field_is_rejected() {
    let text = r#"{"potential": {"family": "Constant", "c0": 0}, "command": "PotentialCheck",
        "params": {"z_lo": 0, "z_hi": 1}, "colour": "red"}"#;
    assert!(matches!(parse_config(text), Err(ConfigError::Schema(_))));
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = parse_config(&std::fs::read_to_string(&path).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(parse_config(&to_json(&cfg)).unwrap(), cfg, "{}", path.display());
            n += 1;
        }
    }
    assert!(n >= 10);
}

fn potential_json() -> impl Strategy<Value = String> {
    prop_oneof![
        (-5.0..5.0f64).prop_map(|c| format!(r#"{{"family": "Constant", "c0": {c}}}"#)),
        (0.1..3.0f64, -1e9..-1.0f64)
            .prop_map(|(s, a)| format!(r#"{{"family": "Linear", "slope": {s}, "alpha": {a}}}"#)),
        (0.0..3.0f64, 0.1..2.0f64)
            .prop_map(|(l, b)| format!(r#"{{"family": "Quadratic", "Lambda": {l}, "beta": {b}, "alpha": -1}}"#)),
        (-2.0..2.0f64).prop_map(|a| format!(r#"{{"family": "LogPower", "a": {a}}}"#)),
    ]
}

proptest! {
    #[test]
    fn configs_round_trip(
        potential in potential_json(),
        s_max in 0.1..10.0f64,
        step in 1e-5..1e-1f64,
        z0 in -1.0..3.0f64,
        seed in any::<u64>(),
        rotational in any::<bool>(),
    ) {
        let (command, start) = if rotational {
            ("SolveRotational", format!(r#"{{"axis": {{"z0": {z0}}}}}"#))
        } else {
            ("SolveTranslation", format!(r#"{{"point": {{"x0": 0, "z0": {z0}, "theta0": 0}}}}"#))
        };
        let text = format!(
            r#"{{"potential": {potential}, "command": "{command}", "seed": {seed},
                "params": {{"start": {start}, "s_max": {s_max}, "step": {step}}}}}"#
        );
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&to_json(&cfg)).unwrap(), cfg);
    }
}
