use scc_core::game::{is_nash_equilibrium, potential};
use scc_core::harness::{self, Migration, RunOptions, Scheme};
use scc_core::model::config::{EventConfig, EventKindConfig};
use scc_core::model::fixtures;
use scc_core::oracle;
use scc_core::Game;

#[test]
fn uscs_ends_at_an_equilibrium() {
    let cfg = fixtures::p_default_config();
    for seed in 0..5 {
        let trace = harness::run_experiment(&cfg, &RunOptions::new(Scheme::Uscs, seed, 100.0), 0).unwrap();
        let g = Game::from_config(&cfg, seed).unwrap();
        let prof = g.profile_from_choices(&trace.final_choices);
        assert!(is_nash_equilibrium(&prof, &g).is_equilibrium());
        let phi = trace.potentials();
        assert!(phi.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        assert!((potential(&prof, &g) - phi.last().unwrap()).abs() < 1e-6);
    }
}

#[test]
fn mh_on_t1_spends_most_time_at_the_optimum() {
    let cfg = fixtures::t1_config();
    let g = fixtures::t1();
    let (_, best) = oracle::enumerate_optimal(&g).unwrap();
    let trace = harness::run_experiment(&cfg, &RunOptions::new(Scheme::Mh, 9, 200.0), 0).unwrap();
    let at_opt = trace.records.iter().filter(|r| (r.potential - best).abs() < 1e-9).count();
    let pi = oracle::stationary_distribution(&g).unwrap();
    let phi = oracle::all_potentials(&g).unwrap();
    let mass: f64 = pi.iter().zip(&phi).filter(|(_, p)| (**p - best).abs() < 1e-9).map(|(q, _)| q).sum();
    let frac = at_opt as f64 / trace.records.len() as f64;
    assert!((frac - mass).abs() < 0.1, "time at optimum {frac}, stationary mass {mass}");
}

#[test]
fn events_keep_profiles_valid() {
    let mut cfg = fixtures::p_default_config();
    cfg.events = vec![
        EventConfig {
            time_s: 1.0,
            kind: EventKindConfig::VmFailure {
                server: "m2".into(),
                vnf: "LB".into(),
            },
        },
        EventConfig {
            time_s: 2.0,
            kind: EventKindConfig::PlayerJoin {
                rate: 10.0,
                chain: vec!["FW".into(), "IDS".into()],
                ingress: "r".into(),
                egress: "r".into(),
                failure_cost: 500.0,
            },
        },
        EventConfig {
            time_s: 2.5,
            kind: EventKindConfig::VmFailure {
                server: "m3".into(),
                vnf: "FW".into(),
            },
        },
    ];
    for migration in [Migration::PerPlayer, Migration::Shared] {
        for scheme in [Scheme::Ma, Scheme::Mh, Scheme::Uscs] {
            let mut opts = RunOptions::new(scheme, 5, 4.0);
            opts.migration = migration;
            let trace = harness::run_experiment(&cfg, &opts, 0).unwrap();
            assert_eq!(trace.final_choices.len(), 11);
            // events sharing a slot share one record
            let tags: Vec<&str> = trace
                .records
                .iter()
                .flat_map(|r| r.event.split(';'))
                .filter(|e| !e.is_empty())
                .collect();
            assert_eq!(tags.len(), 3, "{scheme}: {tags:?}");
            assert!(trace.records.iter().all(|r| r.potential.is_finite() && r.weighted_avg_cost > 0.0));
        }
    }
}

#[test]
fn output_files_are_reproducible() {
    let cfg = fixtures::p_default_config();
    let opts = RunOptions::new(Scheme::Mh, 21, 3.0);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    harness::write_outputs(a.path(), &harness::run_many(&cfg, &opts, 3).unwrap()).unwrap();
    harness::write_outputs(b.path(), &harness::run_many(&cfg, &opts, 3).unwrap()).unwrap();
    for name in ["mh_run000_seed21.csv", "mh_run002_seed23.csv", "aggregate.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let text = std::fs::read_to_string(a.path().join("mh_run001_seed22.csv")).unwrap();
    // 300 ten-millisecond slots, every 1st recorded, plus the initial state
    assert_eq!(text.lines().count(), 1 + 301);
}

#[test]
fn mcts_beats_random_placement() {
    let cfg = fixtures::p_default_config();
    let mut opts = RunOptions::new(Scheme::Mcts, 0, 0.0);
    opts.mcts.budget = 200;
    let mcts = harness::aggregate(&harness::run_many(&cfg, &opts, 10).unwrap()).unwrap();
    let random = harness::aggregate(&harness::run_many(&cfg, &RunOptions::new(Scheme::Uscs, 0, 0.0), 10).unwrap()).unwrap();
    assert!(mcts.converged_potential < random.converged_potential);
}
