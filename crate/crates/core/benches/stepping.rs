use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hmlab::config::Method;
use hmlab::run::Stepper;
use hmlab::solver::{initial_state, StepContext};
use hmlab::{Exec, SimConfig};

/// Ten steps of each layer method at refinement 2, row-parallel against
/// sequential. Both paths compute bit-identical fields.
fn stepping(c: &mut Criterion) {
    let mut group = c.benchmark_group("ten_steps_r2");
    group.sample_size(20);
    for method in [Method::Maxwell, Method::Berenger, Method::Spml, Method::HmlV3] {
        let cfg = SimConfig::baseline(method).with_refinement(2);
        let grid = cfg.grid();
        let state = initial_state(&cfg, &grid);
        for exec in [Exec::Sequential, Exec::Parallel] {
            let ctx = StepContext::from_config(&cfg).with_exec(exec);
            let label = format!("{exec:?}").to_lowercase();
            group.bench_with_input(BenchmarkId::new(method.name(), label), &state, |b, s| {
                b.iter(|| {
                    let mut st = Stepper::new(method, s.clone());
                    for _ in 0..10 {
                        st.advance(&ctx).unwrap();
                    }
                    st
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, stepping);
criterion_main!(benches);
