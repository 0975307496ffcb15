//! Ad-hoc stage timing for the planar CSD pipeline.
use csd_core::geom::{enumerate_halfspace_traces, restrict_enumeration, Domain, PointSet};
use csd_core::protocols::{build_auxiliary_domain, ProtocolConfig, ProtocolRunner};
use std::time::Instant;

fn main() {
    let d = Domain::parabola(8).unwrap();
    let t0 = Instant::now();
    let aux = build_auxiliary_domain(&d).unwrap();
    println!("aux build ({} pts): {:?}", aux.len(), t0.elapsed());

    let t1 = Instant::now();
    let root = enumerate_halfspace_traces(&aux).unwrap();
    println!("root enumeration ({} traces): {:?}", root.len(), t1.elapsed());

    let t2 = Instant::now();
    let sub: PointSet = (0..aux.len()).filter(|i| i % 4 != 0).collect();
    let r = restrict_enumeration(&root, &aux, &sub).unwrap();
    println!("restriction ({} traces): {:?}", r.len(), t2.elapsed());

    let runner = ProtocolRunner::new(ProtocolConfig::default());
    let t3 = Instant::now();
    let out = runner
        .run_csd(&d, &PointSet::new(vec![0, 3]), &PointSet::new(vec![5, 7]))
        .unwrap();
    println!("first csd run (decision {}): {:?}", out.decision, t3.elapsed());
    let t4 = Instant::now();
    let out2 = runner
        .run_csd(&d, &PointSet::new(vec![1, 2]), &PointSet::new(vec![6]))
        .unwrap();
    println!("second csd run (decision {}): {:?}", out2.decision, t4.elapsed());
}
