//! Cache behavior of exhaustive planar CSD sweeps.
use csd_core::geom::{Domain, PointSet};
use csd_core::protocols::{ProtocolConfig, ProtocolRunner};
use std::time::Instant;

fn main() {
    let d = Domain::parabola(8).unwrap();
    let runner = ProtocolRunner::new(ProtocolConfig::default());
    let sets: Vec<PointSet> = (1u32..256)
        .map(|m| PointSet::new((0..8).filter(|i| m >> i & 1 == 1).collect()))
        .collect();
    let t0 = Instant::now();
    let mut done = 0u32;
    for (xi, x) in sets.iter().enumerate() {
        for y in &sets {
            let _ = runner.run_csd(&d, x, y).unwrap();
            done += 1;
        }
        if xi % 32 == 0 {
            println!(
                "after {} runs: {:?} ({:.1} ms/run)",
                done,
                t0.elapsed(),
                t0.elapsed().as_millis() as f64 / done as f64
            );
        }
    }
    println!("total {} runs: {:?}", done, t0.elapsed());
}
