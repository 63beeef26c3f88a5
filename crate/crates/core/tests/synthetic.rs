use discseg_core::imgproc::{angle_set, connected_components, fill_holes, radon_direction, trace_contour, Rect};
use discseg_core::locator::candidate_regions;
use discseg_core::metrics::{confusion, localization_success, metrics_from_counts};
use discseg_core::phantom::{bar_image, generate, phantom_suite, PhantomConfig, PhantomOptions};
use discseg_core::segmenter::threshold_disk;
use discseg_core::vessels::{average_vessel_width, segment_vessels};
use discseg_core::{
    analyze, locate_disk, segment_disk, DiskConfig, GrayImage, LocatorConfig, PixelCoord, SegmenterConfig, VesselConfig,
};

fn angle_error(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

#[test]
fn radon_recovers_bar_angles() {
    let angles = angle_set(36);
    for k in 0..12 {
        let truth = k as f64 * 15.0;
        let img = bar_image(15, 15, 150, 80.0, &[((7.0, 7.0), truth, 3.0)]);
        let est = radon_direction(&img, &angles).unwrap();
        assert!(angle_error(est.angle, truth) <= 5.0, "truth {truth} got {}", est.angle);
    }
}

#[test]
fn vessel_width_recovery_across_orientations() {
    let cfg = VesselConfig::default();
    let mut misses = Vec::new();
    for w in 3..=12 {
        for angle in [0.0, 45.0, 90.0, 135.0] {
            let img = bar_image(110, 110, 160, 100.0, &[((55.0, 55.0), angle, w as f64)]);
            let est = average_vessel_width(&img, PixelCoord::new(55, 55), 70, &cfg).unwrap();
            if (est - w as f64).abs() > 1.5 {
                misses.push((w, angle, est));
            }
        }
    }
    assert!(misses.len() <= 4, "{misses:?}");
}

#[test]
fn two_parallel_bars_average() {
    let img = bar_image(100, 100, 160, 100.0, &[((50.0, 35.0), 90.0, 3.0), ((50.0, 65.0), 90.0, 7.0)]);
    let res = segment_vessels(&img, Rect::new(15, 15, 85, 85), &VesselConfig::default()).unwrap();
    assert!((4.0..=6.0).contains(&res.average_width), "{}", res.average_width);
}

#[test]
fn crossing_tree_root_average() {
    let img = bar_image(
        120,
        120,
        170,
        100.0,
        &[((60.0, 60.0), 90.0, 8.0), ((60.0, 60.0), 30.0, 6.0), ((60.0, 60.0), 150.0, 4.0)],
    );
    let w = average_vessel_width(&img, PixelCoord::new(60, 60), 70, &VesselConfig::default()).unwrap();
    assert!((5.0..=7.0).contains(&w), "{w}");
}

#[test]
fn vessel_free_blob_has_no_width() {
    let img =
        GrayImage::from_fn(120, 120, |r, c| if (r as f64 - 60.0).hypot(c as f64 - 60.0) < 30.0 { 200 } else { 80 })
            .unwrap();
    let cfg = VesselConfig::default();
    let w = average_vessel_width(&img, PixelCoord::new(60, 60), 70, &cfg).unwrap();
    assert_eq!(w, 0.0);
    assert_eq!(w, average_vessel_width(&img, PixelCoord::new(60, 60), 70, &cfg).unwrap());
}

#[test]
fn disk_window_has_wider_vessels_than_distractor() {
    let cfg = PhantomConfig::default();
    let opts = PhantomOptions { distractor: true, dim_disk: false };
    let vcfg = VesselConfig::default();
    let mut checked = 0;
    for seed in 0..6 {
        let p = generate(&cfg, opts, seed).unwrap();
        let Some((r, c, _)) = p.info.distractor else { continue };
        let disk = PixelCoord::new(p.info.disk_center.0.round() as usize, p.info.trunk_col.round() as usize);
        let blob = PixelCoord::new(r.round() as usize, c.round() as usize);
        let wd = average_vessel_width(&p.image, disk, 70, &vcfg).unwrap();
        let wb = average_vessel_width(&p.image, blob, 70, &vcfg).unwrap();
        assert!(wd > wb, "seed {seed}: disk {wd} vs distractor {wb}");
        checked += 1;
    }
    assert!(checked >= 3);
}

#[test]
fn locator_rejects_distractor_and_iterates_on_dim_disk() {
    let pcfg = PhantomConfig::default();
    let lcfg = LocatorConfig::default();
    let vcfg = VesselConfig::default();

    let p = generate(&pcfg, PhantomOptions { distractor: true, dim_disk: false }, 3).unwrap();
    assert!(p.info.distractor.is_some());
    let out = locate_disk(&p.image, &lcfg, &vcfg).unwrap();
    assert!(localization_success(out.center, &p.disk));
    assert!(!out.low_confidence);
    assert!(out.average_width >= lcfg.vessel_width_min);
    assert!(out.candidate.circularity >= lcfg.circularity_min);

    let p = generate(&pcfg, PhantomOptions { distractor: false, dim_disk: true }, 4).unwrap();
    let out = locate_disk(&p.image, &lcfg, &vcfg).unwrap();
    assert!(localization_success(out.center, &p.disk));
    assert!(out.iterations >= 2, "{}", out.iterations);
    assert!(out.fraction_used > lcfg.initial_fraction);
}

#[test]
fn candidate_count_monotone_in_filters() {
    let p = generate(&PhantomConfig::default(), PhantomOptions::default(), 9).unwrap();
    let base = LocatorConfig::default();
    let mut last = usize::MAX;
    for circ in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let n =
            candidate_regions(&p.image, 0.2, &LocatorConfig { circularity_min: circ, ..base.clone() }).unwrap().len();
        assert!(n <= last);
        last = n;
    }
    let mut last = usize::MAX;
    for area in [1, 30, 300, 3000] {
        let n =
            candidate_regions(&p.image, 0.2, &LocatorConfig { min_region_area: area, ..base.clone() }).unwrap().len();
        assert!(n <= last);
        last = n;
    }
}

#[test]
fn segmentation_invariants_on_phantoms() {
    let cfg = DiskConfig::default();
    for p in phantom_suite(&PhantomConfig::default(), 5, 21).unwrap() {
        let a = analyze(&p.image, &cfg).unwrap();
        let seg = &a.segmentation;
        let rect = seg.disk_box.rect;
        assert!(seg.mask.iter_true().all(|q| rect.contains(q.row, q.col)));
        assert_eq!(connected_components(&seg.mask).len(), 1);
        assert_eq!(fill_holes(&seg.mask), seg.mask);
        let start = seg.mask.iter_true().next().unwrap();
        assert_eq!(seg.boundary, trace_contour(&seg.mask, start));
        assert!(rect.contains(seg.disk_box.center.row, seg.disk_box.center.col));
        assert!(seg.disk_box.split_col > rect.left && seg.disk_box.split_col < rect.right);
        let ratio = rect.height() as f64 / rect.width() as f64;
        assert!((1.0..=1.21).contains(&ratio), "{ratio}");
        let overlap = metrics_from_counts(&confusion(&seg.mask, &p.disk, None).unwrap()).overlap;
        assert!(overlap >= 0.8, "seed {} overlap {overlap}", p.info.seed);
    }
}

#[test]
fn split_lands_on_trunk() {
    let cfg = DiskConfig::default();
    for p in phantom_suite(&PhantomConfig::default(), 5, 5).unwrap() {
        let a = analyze(&p.image, &cfg).unwrap();
        let split = a.segmentation.disk_box.split_col as f64;
        assert!((split - p.info.trunk_col).abs() <= 1.5 + p.info.trunk_width / 2.0, "{split} vs {}", p.info.trunk_col);
    }
}

#[test]
fn equal_halves_make_split_a_no_op() {
    // same statistics on both sides: per-side Otsu == single Otsu
    let img = GrayImage::from_fn(200, 200, |r, c| {
        let inside = ((r as f64 - 100.0) / 48.0).powi(2) + ((c as f64 - 100.0) / 40.0).powi(2) <= 1.0;
        let noise = ((r * 31 + c * 17) % 7) as u8;
        if inside {
            180 + noise
        } else {
            80 + noise
        }
    })
    .unwrap();
    let vessels =
        segment_vessels(&GrayImage::filled(200, 200, 9).unwrap(), Rect::full(200, 200), &VesselConfig::default())
            .unwrap();
    let rect = Rect::new(52, 60, 148, 140);
    let (dual, (tl, tr)) = threshold_disk(&img, &vessels, rect, Some(100), 2);
    let (single, (t, _)) = threshold_disk(&img, &vessels, rect, None, 2);
    assert_eq!(tl, t);
    assert_eq!(tr, t);
    assert_eq!(dual, single);
}

#[test]
fn pipeline_is_deterministic_and_shift_tolerant() {
    let p = generate(&PhantomConfig::default(), PhantomOptions::default(), 77).unwrap();
    let cfg = DiskConfig::default();
    let a = analyze(&p.image, &cfg).unwrap();
    let b = analyze(&p.image, &cfg).unwrap();
    assert_eq!(a, b);
    let base = metrics_from_counts(&confusion(&a.segmentation.mask, &p.disk, None).unwrap()).overlap;
    for k in [-30, -10, 10, 30] {
        let s = analyze(&p.image.shifted(k), &cfg).unwrap();
        let o = metrics_from_counts(&confusion(&s.segmentation.mask, &p.disk, None).unwrap()).overlap;
        assert!((o - base).abs() < 0.05, "shift {k}: {o} vs {base}");
    }
}

#[test]
fn segment_falls_back_when_no_rim() {
    // a flat image: the locator still returns something, the segmenter flags it
    let img = GrayImage::from_fn(300, 300, |r, c| 100 + ((r / 40 + c / 40) % 2) as u8).unwrap();
    let lcfg = LocatorConfig { circularity_min: 0.0, ..LocatorConfig::default() };
    let vcfg = VesselConfig::default();
    let located = locate_disk(&img, &lcfg, &vcfg).unwrap();
    assert!(located.low_confidence);
    let seg = segment_disk(&img, &located, &SegmenterConfig::default(), &vcfg).unwrap();
    assert!(seg.low_confidence);
}
