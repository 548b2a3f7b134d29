use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pantagruel_bench::{building, motion_script};
use pantagruel_core::rule_eval::eval_rule_block;
use pantagruel_core::{compile, parse_program, run_trace, DualStore, StepConfig, TriggerMode, Value};

const ROOMS: [usize; 3] = [4, 16, 64];

fn front_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("front_end");
    for rooms in ROOMS {
        let text = building(rooms);
        group.bench_with_input(BenchmarkId::new("parse", rooms), &text, |b, t| b.iter(|| parse_program(black_box(t))));
        group.bench_with_input(BenchmarkId::new("compile", rooms), &text, |b, t| b.iter(|| compile(black_box(t))));
    }
    group.finish();
}

fn rule_block(c: &mut Criterion) {
    let mut group = c.benchmark_group("rule_block");
    for rooms in ROOMS {
        let program = compile(&building(rooms)).unwrap();
        let mut current = program.initial.clone();
        for r in 0..rooms {
            current.set_event("detected", &format!("m{r}"), Value::Tr(true)).unwrap();
        }
        for mode in [TriggerMode::Edge, TriggerMode::Level] {
            group.bench_function(BenchmarkId::new(mode.as_str(), rooms), |b| {
                b.iter(|| eval_rule_block(&program.rules, DualStore::new(&program.initial, &current), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn trace(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_trace");
    group.sample_size(20);
    for rooms in &ROOMS[..2] {
        let rooms = *rooms;
        let program = compile(&building(rooms)).unwrap();
        let script = motion_script(rooms, 20);
        group.bench_function(BenchmarkId::from_parameter(rooms), |b| {
            b.iter(|| run_trace(&program, &script, None, StepConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, front_end, rule_block, trace);
criterion_main!(benches);
