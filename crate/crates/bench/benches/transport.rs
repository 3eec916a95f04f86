use criterion::{criterion_group, criterion_main, Criterion};
use cyclo::deformation::{transport, x_squared_family, Method, TransportOptions};
use cyclo::retract::{retract_transport, RetractTransportOptions};
use cyclo::Rational;
use cyclo_bench::ch_e_plus;

fn bench_window(c: &mut Criterion) {
    let f = x_squared_family();
    let w = ch_e_plus(6);
    let mut group = c.benchmark_group("window_transport");
    group.sample_size(10);
    for (name, method) in [("rk4", Method::Rk4), ("dyson", Method::Dyson), ("nilpotent_exp", Method::NilpotentExp)] {
        let mut opts = TransportOptions::new(method, 6);
        opts.cross_check = false;
        group.bench_function(name, |b| {
            b.iter(|| transport(&f, &Rational::integer(1), &Rational::integer(4), &w, &opts).expect("inside").output)
        });
    }
    group.finish();
}

fn bench_retract(c: &mut Criterion) {
    let f = x_squared_family();
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 50));
    let mut input = vec![0.0; 20];
    input[0] = 1.0;
    let mut group = c.benchmark_group("retract_transport");
    group.sample_size(10);
    group.bench_function("x_squared", |b| {
        b.iter(|| retract_transport(&f, &Rational::new(1, 2), &Rational::integer(2), &input, &opts).expect("solvable").hp)
    });
    group.finish();
}

criterion_group!(transport_benches, bench_window, bench_retract);
criterion_main!(transport_benches);
