use csd_core::geom::{enumerate_halfspace_traces, restrict_enumeration, Domain, PointSet};
use csd_core::protocols::build_auxiliary_domain;
use std::collections::HashMap;
use std::time::Instant;

fn main() {
    let d = Domain::parabola(8).unwrap();
    let aux = build_auxiliary_domain(&d).unwrap();
    let root = enumerate_halfspace_traces(&aux).unwrap();
    let sub: PointSet = (0..aux.len()).filter(|i| i % 4 != 0).collect();
    let sub_idx: Vec<usize> = sub.iter().collect();

    // Isolated cost of the reindex + dedup-probe half of restriction.
    let t = Instant::now();
    let mut count = 0usize;
    for _ in 0..20 {
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        for e in root.entries() {
            let mut word = 0u64;
            for (pos, &orig) in sub_idx.iter().enumerate() {
                if e.members.contains(orig) {
                    word |= 1 << pos;
                }
            }
            if !seen.contains_key([word].as_slice()) {
                seen.insert(vec![word], seen.len());
                count += 1;
            }
        }
    }
    println!(
        "reindex+probe x20: {:?} ({} new)",
        t.elapsed(),
        count / 20
    );

    let _ = restrict_enumeration(&root, &aux, &sub).unwrap();
    let t = Instant::now();
    for _ in 0..20 {
        let r = restrict_enumeration(&root, &aux, &sub).unwrap();
        std::hint::black_box(&r);
    }
    println!("full restrict x20: {:?} ({:?} each)", t.elapsed(), t.elapsed() / 20);
}
