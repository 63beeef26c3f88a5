use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use discseg_core::imgproc::{angle_set, otsu_threshold, radon_direction, sobel, Rect};
use discseg_core::phantom::{generate, PhantomConfig, PhantomOptions};
use discseg_core::vessels::segment_vessels;
use discseg_core::{analyze, locate_disk, DiskConfig, LocatorConfig, VesselConfig};

fn primitives(c: &mut Criterion) {
    let p = generate(&PhantomConfig::default(), PhantomOptions::default(), 1).unwrap();
    let img = &p.image;
    c.bench_function("otsu_565x584", |b| b.iter(|| otsu_threshold(black_box(img), None).unwrap()));
    c.bench_function("sobel_565x584", |b| b.iter(|| sobel(black_box(img))));

    let window = img.crop(Rect::new(200, 200, 215, 215)).unwrap();
    let angles = angle_set(36);
    c.bench_function("radon_15x15_36_angles", |b| b.iter(|| radon_direction(black_box(&window), &angles).unwrap()));

    let vcfg = VesselConfig::default();
    let mut group = c.benchmark_group("vessels");
    for side in [70usize, 140, 280] {
        let roi = Rect::new(100, 100, 100 + side, 100 + side);
        group.bench_with_input(BenchmarkId::from_parameter(side), &roi, |b, &roi| {
            b.iter(|| segment_vessels(black_box(img), roi, &vcfg).unwrap())
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let cfg = DiskConfig::default();
    let lcfg = LocatorConfig::default();
    let vcfg = VesselConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(20);
    for (name, options) in [
        ("plain", PhantomOptions::default()),
        ("distractor", PhantomOptions { distractor: true, dim_disk: false }),
        ("dim_disk", PhantomOptions { distractor: false, dim_disk: true }),
    ] {
        let p = generate(&PhantomConfig::default(), options, 3).unwrap();
        group.bench_with_input(BenchmarkId::new("locate", name), &p.image, |b, img| {
            b.iter(|| locate_disk(black_box(img), &lcfg, &vcfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("analyze", name), &p.image, |b, img| {
            b.iter(|| analyze(black_box(img), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, primitives, pipeline);
criterion_main!(benches);
