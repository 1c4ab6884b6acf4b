//! Canonical instances.
//!
//! * `t1`: two servers, types `f1`/`f2` on both, one router, two unit-rate
//!   players with chain `f1 -> f2`. Every latency is fixed (cross-server = 2),
//!   so all costs can be checked by hand.
//! * `p_default`: five servers hosting FW, LB and IDS; ten players of 5 Mbps
//!   with chain FW -> LB -> IDS; survival 0.9; beta 0.1.
//! * `p_f2`: `p_default` with the chain shortened to FW -> LB.

use rand::Rng;

use super::{
    Game, GameConfig, GameParams, LatencyRule, Node, PlayerConfig,
    PlayerSpec, ScenarioConfig, ServerConfig, SystemTopology, VmInstance, VnfType,
};
use crate::rng::{stream, Stream};

fn server(name: &str, hosts: &[&str]) -> ServerConfig {
    ServerConfig {
        name: name.to_string(),
        hosts: hosts.iter().map(|h| h.to_string()).collect(),
    }
}

fn players(count: usize, rate: f64, chain: &[&str], failure_cost: f64) -> PlayerConfig {
    PlayerConfig {
        rate,
        chain: chain.iter().map(|c| c.to_string()).collect(),
        ingress: "r".into(),
        egress: "r".into(),
        failure_cost,
        count,
    }
}

pub fn t1_config() -> ScenarioConfig {
    ScenarioConfig {
        seed: 0,
        vnf_types: None,
        servers: vec![server("m1", &["f1", "f2"]), server("m2", &["f1", "f2"])],
        routers: vec!["r".into()],
        latency: LatencyRule {
            router: 1.0,
            intra: 1.0,
            cross_lo: 2.0,
            cross_hi: 2.0,
        },
        game: GameConfig {
            alpha: 1.0,
            beta: 1.0,
            gamma_user: 1.0,
            gamma_vm: 1.0,
        },
        players: vec![players(2, 1.0, &["f1", "f2"], 1000.0)],
        events: Vec::new(),
    }
}

pub fn t1() -> Game {
    Game::from_config(&t1_config(), 0).expect("t1 fixture is valid")
}

/// `t1` with different game parameters.
pub fn t1_with(params: GameParams) -> Game {
    t1().with_params(params).expect("valid parameters")
}

pub fn p_default_config() -> ScenarioConfig {
    let names = ["m1", "m2", "m3", "m4", "m5"];
    ScenarioConfig {
        seed: 1,
        vnf_types: None,
        servers: names.iter().map(|n| server(n, &["FW", "LB", "IDS"])).collect(),
        routers: vec!["r".into()],
        latency: LatencyRule::default(),
        game: GameConfig {
            alpha: 1.0,
            beta: 0.1,
            gamma_user: 0.9,
            gamma_vm: 0.9,
        },
        players: vec![players(10, 5.0, &["FW", "LB", "IDS"], 1000.0)],
        events: Vec::new(),
    }
}

pub fn p_default(seed: u64) -> Game {
    Game::from_config(&p_default_config(), seed).expect("p_default fixture is valid")
}

pub fn p_f2_config() -> ScenarioConfig {
    let mut cfg = p_default_config();
    cfg.players[0].chain = vec!["FW".into(), "LB".into()];
    cfg
}

pub fn p_f2(seed: u64) -> Game {
    Game::from_config(&p_f2_config(), seed).expect("p_f2 fixture is valid")
}

/// Choices placing players `2k` and `2k+1` entirely on server `k`
/// (for the uniform-hosting fixtures above).
pub fn spread_layout(game: &Game) -> Vec<usize> {
    let servers = game.topology().servers();
    (0..game.num_players())
        .map(|i| {
            let target = (i / 2) % servers;
            game.space(i)
                .iter()
                .position(|s| s.vms().iter().all(|&vm| game.topology().vms()[vm].server == target))
                .expect("every server hosts the whole chain")
        })
        .collect()
}

/// Size limits for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_servers: usize,
    pub max_types: usize,
    pub max_players: usize,
    pub max_states: u128,
}

impl RandomShape {
    pub const TINY: Self = Self {
        max_servers: 2,
        max_types: 2,
        max_players: 3,
        max_states: 64,
    };
    pub const SMALL: Self = Self {
        max_servers: 3,
        max_types: 3,
        max_players: 4,
        max_states: 100_000,
    };
}

/// A random instance with heterogeneous rates, chains, hosting, latencies and
/// parameters, drawn until its joint space fits `shape.max_states`.
pub fn random_instance(seed: u64, shape: RandomShape) -> Game {
    let mut rng = stream(seed, Stream::Init);
    loop {
        let servers = rng.random_range(1..=shape.max_servers);
        let types = rng.random_range(1..=shape.max_types);
        let routers = rng.random_range(1..=2);
        let vnf_types: Vec<VnfType> = (0..types)
            .map(|id| VnfType {
                id,
                name: format!("t{id}"),
            })
            .collect();
        let mut vms = Vec::new();
        for m in 0..servers {
            for t in 0..types {
                if rng.random_bool(0.75) {
                    vms.push(VmInstance {
                        id: vms.len(),
                        server: m,
                        vnf_type: t,
                    });
                }
            }
        }
        // make sure every type has a host
        for t in 0..types {
            if !vms.iter().any(|vm| vm.vnf_type == t) {
                let m = rng.random_range(0..servers);
                vms.push(VmInstance {
                    id: vms.len(),
                    server: m,
                    vnf_type: t,
                });
            }
        }
        let v = vms.len();
        let lo = rng.random_range(1.5..3.0);
        let hi = lo + rng.random_range(0.0..4.0);
        let mut lat = vec![0.0; (routers + v) * (routers + v)];
        for a in 0..(routers + v) {
            for b in (a + 1)..(routers + v) {
                let l = rng.random_range(0.5..1.5);
                let l = if a >= routers && b >= routers && vms[a - routers].server != vms[b - routers].server {
                    rng.random_range(lo..=hi)
                } else {
                    l
                };
                lat[a * (routers + v) + b] = l;
            }
        }
        let idx = |n: Node| match n {
            Node::Router(r) => r,
            Node::Vm(x) => routers + x,
        };
        let n = routers + v;
        let topology = SystemTopology::from_parts(
            (0..servers).map(|m| format!("m{m}")).collect(),
            vnf_types,
            vms,
            (0..routers).map(|r| format!("r{r}")).collect(),
            |a, b| {
                let (x, y) = (idx(a).min(idx(b)), idx(a).max(idx(b)));
                lat[x * n + y]
            },
        )
        .expect("random topology is valid");

        let count = rng.random_range(1..=shape.max_players);
        let mut players = Vec::with_capacity(count);
        for id in 0..count {
            let len = rng.random_range(1..=types);
            let mut pool: Vec<usize> = (0..types).collect();
            let mut chain = Vec::with_capacity(len);
            for _ in 0..len {
                chain.push(pool.swap_remove(rng.random_range(0..pool.len())));
            }
            players.push(PlayerSpec {
                id,
                rate: rng.random_range(1.0..10.0),
                chain,
                ingress: rng.random_range(0..routers),
                egress: rng.random_range(0..routers),
                failure_cost: rng.random_range(100.0..1000.0),
            });
        }
        let params = GameParams {
            alpha: rng.random_range(0.5..2.0),
            beta: rng.random_range(0.05..1.0),
            gamma_user: rng.random_range(0.5..=1.0),
            gamma_vm: rng.random_range(0.5..=1.0),
        };
        let game = Game::new(topology, players, params).expect("random instance is valid");
        if game.joint_space_size() <= shape.max_states {
            return game;
        }
    }
}

/// Config-level access used by the CLI and harness.
pub fn named(name: &str) -> Option<ScenarioConfig> {
    match name {
        "t1" => Some(t1_config()),
        "p-default" | "p_default" => Some(p_default_config()),
        "p-f2" | "p_f2" => Some(p_f2_config()),
        _ => None,
    }
}
