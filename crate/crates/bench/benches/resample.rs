use std::hint::black_box;

use afsmr_core::benchmark::{forward_warp, image_center};
use afsmr_core::{kernel_warp, resample_mesh, AffineTransform, Image, Method, ResamplerConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn texture(size: usize) -> Image {
    Image::from_fn(size, size, |x, y| {
        let (x, y) = (x as f64, y as f64);
        128.0 + 60.0 * (0.37 * x).sin() * (0.23 * y).cos() + 30.0 * (0.05 * x * y).sin()
    })
    .unwrap()
}

fn rotated_mesh(size: usize) -> afsmr_core::MeshSampleSet {
    let a = AffineTransform::rotation_degrees(30.0).about(image_center(size, size));
    forward_warp(&texture(size), &a)
}

fn model_methods(c: &mut Criterion) {
    let size = 48;
    let mesh = rotated_mesh(size);
    let blocks = (size / 8) * (size / 8);
    let mut group = c.benchmark_group("mesh_resample");
    group.sample_size(10);
    group.throughput(Throughput::Elements(blocks as u64));
    for method in [Method::Afsmr, Method::Fsmr, Method::FsmrNoKeypoints] {
        let cfg = ResamplerConfig {
            threads: Some(1),
            ..ResamplerConfig::with_method(method)
        };
        group.bench_with_input(BenchmarkId::from_parameter(method), &cfg, |b, cfg| {
            b.iter(|| resample_mesh(black_box(&mesh), cfg).unwrap())
        });
    }
    group.finish();
}

fn iteration_budget(c: &mut Criterion) {
    let mesh = rotated_mesh(32);
    let mut group = c.benchmark_group("afsmr_iterations");
    group.sample_size(10);
    for iterations in [100, 300, 1000] {
        let mut cfg = ResamplerConfig {
            threads: Some(1),
            ..ResamplerConfig::default()
        };
        cfg.stopping.max_iterations = iterations;
        group.bench_with_input(BenchmarkId::from_parameter(iterations), &cfg, |b, cfg| {
            b.iter(|| resample_mesh(black_box(&mesh), cfg).unwrap())
        });
    }
    group.finish();
}

fn kernel_baselines(c: &mut Criterion) {
    let size = 256;
    let img = texture(size);
    let inverse = AffineTransform::rotation_degrees(-30.0).about(image_center(size, size));
    let mut group = c.benchmark_group("kernel_warp");
    group.throughput(Throughput::Elements((size * size) as u64));
    for method in [Method::Bilinear, Method::Bicubic, Method::Lanczos] {
        let kernel = method.kernel().unwrap();
        group.bench_function(method.name(), |b| {
            b.iter(|| kernel_warp(black_box(&img), &inverse, kernel))
        });
    }
    group.finish();
}

criterion_group!(benches, model_methods, iteration_budget, kernel_baselines);
criterion_main!(benches);
