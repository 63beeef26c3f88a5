//! Runs the full pipeline over a seeded phantom suite and prints per-image scores.
//!
//! `cargo run --release -p discseg-core --example phantom_eval -- [count] [seed] [shift]`

use std::time::Instant;

use discseg_core::metrics::{confusion, localization_success, metrics_from_counts};
use discseg_core::phantom::{phantom_suite, PhantomConfig};
use discseg_core::{analyze, DiskConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let count = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let shift: i32 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = DiskConfig::default();
    let suite = phantom_suite(&PhantomConfig::default(), count, seed).expect("phantoms");
    let (mut located, mut overlap_sum) = (0, 0.0);
    for (i, p) in suite.iter().enumerate() {
        let img = p.image.shifted(shift);
        let start = Instant::now();
        match analyze(&img, &cfg) {
            Ok(a) => {
                let ok = localization_success(a.location.center, &p.disk);
                let m = metrics_from_counts(&confusion(&a.segmentation.mask, &p.disk, None).unwrap());
                located += ok as usize;
                overlap_sum += m.overlap;
                println!(
                    "{i:3} D={:5.1}x{:5.1} distractor={:5} dim={:5} located={ok:5} iterations={} overlap={:.3} low_confidence={} {:.2}s",
                    p.info.horizontal_diameter,
                    p.info.vertical_diameter,
                    p.info.distractor.is_some(),
                    p.info.options.dim_disk,
                    a.location.iterations,
                    m.overlap,
                    a.segmentation.low_confidence,
                    start.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("{i:3} error: {e}"),
        }
    }
    println!("located {located}/{count}, mean overlap {:.3}", overlap_sum / count as f64);
}
