//! Per-run cost with hot caches, and cold-mapping cost.
use csd_core::geom::{Domain, PointSet};
use csd_core::protocols::{ProtocolConfig, ProtocolRunner};
use std::time::Instant;

fn main() {
    let d = Domain::parabola(8).unwrap();
    let runner = ProtocolRunner::new(ProtocolConfig::default());
    let x = PointSet::new(vec![0, 3]);
    let y = PointSet::new(vec![5, 7]);
    let _ = runner.run_csd(&d, &x, &y).unwrap();
    let t = Instant::now();
    for _ in 0..200 {
        let _ = runner.run_csd(&d, &x, &y).unwrap();
    }
    println!(
        "hot identical runs: {:.2} ms/run",
        t.elapsed().as_millis() as f64 / 200.0
    );

    let sets: Vec<PointSet> = (1u32..64)
        .map(|m| PointSet::new((0..6).filter(|i| m >> i & 1 == 1).collect()))
        .collect();
    let t = Instant::now();
    let mut c = 0u32;
    for x in &sets {
        for y in &sets {
            let _ = runner.run_csd(&d, x, y).unwrap();
            c += 1;
        }
    }
    println!(
        "first pass {} runs: {:.2} ms/run",
        c,
        t.elapsed().as_millis() as f64 / c as f64
    );
    let t = Instant::now();
    for x in &sets {
        for y in &sets {
            let _ = runner.run_csd(&d, x, y).unwrap();
        }
    }
    println!(
        "second pass: {:.2} ms/run",
        t.elapsed().as_millis() as f64 / c as f64
    );
}
