use std::path::PathBuf;

use scc_core::harness::{run_experiment, RunOptions, Scheme};
use scc_core::model::fixtures;
use scc_core::ScenarioConfig;

fn config(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn shipped_configs_match_fixtures() {
    assert_eq!(config("t1.toml"), fixtures::t1_config());
    assert_eq!(config("p_default.toml"), fixtures::p_default_config());
    assert_eq!(config("p_f2.toml"), fixtures::p_f2_config());
}

#[test]
fn event_configs_extend_the_default_scenario() {
    for name in ["p_default_join.toml", "p_default_vm_failure.toml"] {
        let mut cfg = config(name);
        assert_eq!(cfg.events.len(), 1);
        assert_eq!(cfg.events[0].time_s, 40.0);
        cfg.events.clear();
        assert_eq!(cfg, fixtures::p_default_config());
    }
}

#[test]
fn event_configs_run() {
    for name in ["p_default_join.toml", "p_default_vm_failure.toml"] {
        let trace = run_experiment(&config(name), &RunOptions::new(Scheme::Mh, 3, 45.0), 0).unwrap();
        let tagged: Vec<_> = trace.records.iter().filter(|r| !r.event.is_empty()).collect();
        assert_eq!(tagged.len(), 1, "{name}");
        assert!((tagged[0].sim_time_s - 40.01).abs() < 1e-9);
    }
}
