use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use scc_core::game::potential;
use scc_core::mcts::{mcts_compose_choices, MctsConfig};
use scc_core::model::fixtures;
use scc_core::oracle::{self, ChainKind};
use scc_core::rng::{stream, Stream};
use scc_core::samplers::{self, ChainState, RoundRobin, SelectionMode};

fn kernels(c: &mut Criterion) {
    let g = fixtures::p_default(1);
    let active: Vec<usize> = (0..g.num_players()).collect();
    let start = g.random_choices(&mut stream(0, Stream::Init));

    c.bench_function("potential/p_default", |b| {
        let prof = g.profile_from_choices(&start);
        b.iter(|| potential(&prof, &g))
    });

    c.bench_function("mh_step/p_default", |b| {
        let mut state = ChainState::new(&g, start.clone());
        let (mut sel, mut prop) = (stream(1, Stream::Selection), stream(1, Stream::Proposal));
        b.iter(|| samplers::mh_step(&g, &mut state, &active, SelectionMode::UniformDraw, &mut sel, &mut prop).unwrap())
    });

    c.bench_function("ma_step/p_default", |b| {
        let mut state = ChainState::new(&g, start.clone());
        let (mut sel, mut prop) = (stream(2, Stream::Selection), stream(2, Stream::Proposal));
        b.iter(|| samplers::ma_step(&g, &mut state, &active, SelectionMode::UniformDraw, &mut sel, &mut prop).unwrap())
    });

    c.bench_function("uscs_step/p_default", |b| {
        let mut order = RoundRobin::default();
        b.iter_batched(
            || ChainState::new(&g, start.clone()),
            |mut state| samplers::uscs_step(&g, &mut state, &active, &mut order).unwrap(),
            BatchSize::SmallInput,
        )
    });

    let mut group = c.benchmark_group("compose");
    group.sample_size(10);
    group.bench_function("mcts/p_default/budget_500", |b| {
        let mut rng = stream(3, Stream::Search);
        b.iter(|| mcts_compose_choices(&g, &MctsConfig::default(), &mut rng).unwrap())
    });
    let t1 = fixtures::t1();
    group.bench_function("chain_matrices/t1", |b| {
        b.iter(|| oracle::build_chain_matrices(ChainKind::Mh, &t1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
