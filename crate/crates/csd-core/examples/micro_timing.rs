//! Microbenchmarks of the hot per-run pieces.
use csd_core::geom::{Domain, PointSet};
use csd_core::protocols::{ProtocolConfig, ProtocolRunner};
use std::time::Instant;

fn main() {
    let d = Domain::parabola(8).unwrap();
    let runner = ProtocolRunner::new(ProtocolConfig::default());
    let x = PointSet::new(vec![0, 3]);
    let y = PointSet::new(vec![5, 7]);
    let out = runner.run_csd(&d, &x, &y).unwrap();
    println!("rounds in this instance: {}", out.rounds.len());

    let aux = runner.auxiliary_domain(&d).unwrap();
    println!("aux size {}", aux.len());

    let t = Instant::now();
    for _ in 0..1000 {
        let c = aux.clone();
        std::hint::black_box(&c);
    }
    println!("aux domain clone: {:.1} us", t.elapsed().as_micros() as f64 / 1000.0);

    let t = Instant::now();
    for _ in 0..1000 {
        std::hint::black_box(aux.cache_key());
    }
    println!("cache_key: {:.2} us", t.elapsed().as_micros() as f64 / 1000.0);

    // Promise run on the aux domain with hot family caches.
    let ax = PointSet::new(vec![0, 1, 2]);
    let by = PointSet::new(vec![70, 75]);
    let _ = runner.run_promise_csd(&aux, &ax, &by).unwrap();
    let t = Instant::now();
    for _ in 0..200 {
        let _ = runner.run_promise_csd(&aux, &ax, &by).unwrap();
    }
    println!(
        "hot promise run on aux: {:.2} ms",
        t.elapsed().as_millis() as f64 / 200.0
    );

    let t = Instant::now();
    for _ in 0..200 {
        let _ = runner.run_csd(&d, &x, &y).unwrap();
    }
    println!("hot csd run: {:.2} ms", t.elapsed().as_millis() as f64 / 200.0);
}
