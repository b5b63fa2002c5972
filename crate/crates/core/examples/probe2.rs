// Scratch probe: descent/ascent behavior and G2(4) exhaustive landscape.
use std::time::Instant;

use voromod::labeling::{hamming_density, neighbor_offsets_sheared, neighbor_offsets_standard};
use voromod::lattice::{LatticeId, MarkedLattice};
use voromod::search::{hamming_ascent, hamming_descent, random_seed_unimodulars};
use voromod::unimodular::enumerate_group;

fn main() {
    // G2(4) landscape
    let lat = MarkedLattice::standard(LatticeId::A2);
    let rs = neighbor_offsets_standard(&lat, 4).unwrap();
    let group = enumerate_group(2, 4).unwrap();
    let mut hds: Vec<f64> = Vec::new();
    let mut min = f64::MAX;
    let mut max: f64 = 0.0;
    for u in &group {
        let hd = hamming_density(&neighbor_offsets_sheared(&rs, u).unwrap())
            .unwrap()
            .value();
        min = min.min(hd);
        max = max.max(hd);
        hds.push(hd);
    }
    println!("G2(4): {} elements, HD min {min:.4} max {max:.4}", group.len());

    // descent from every element of G2(4)
    let results = hamming_descent(&lat, 4, &group, 25, 0).unwrap();
    let all_min = results.iter().all(|r| (r.best_hd.value() - min).abs() < 1e-12);
    println!("G2(4) descent from all 48 seeds reaches global min: {all_min}");

    // D4 descent, several rng seeds
    let d4 = MarkedLattice::standard(LatticeId::D4);
    for rng_seed in [1u64, 2, 3] {
        for r in [4u32, 8] {
            let t = Instant::now();
            let seeds = random_seed_unimodulars(4, r, 20, rng_seed).unwrap();
            let results = hamming_descent(&d4, r, &seeds, 25, rng_seed).unwrap();
            let best: Vec<String> = results.iter().map(|x| format!("{:.2}", x.best_hd.value())).collect();
            let reached = results
                .iter()
                .filter(|x| x.best_hd.eq_exact(&voromod::HammingDensity::new(2, 1)))
                .count();
            println!(
                "D4 r={r} seed={rng_seed}: {}/{} reach HD 2 ({:?} in {:.1?})",
                reached,
                results.len(),
                best,
                t.elapsed()
            );
        }
    }

    // D4 ascent
    for rng_seed in [1u64, 2] {
        for r in [4u32, 8] {
            let seeds = random_seed_unimodulars(4, r, 20, rng_seed).unwrap();
            let results = hamming_ascent(&d4, r, &seeds, 25, rng_seed).unwrap();
            let worst = results.iter().map(|x| x.best_hd).max().unwrap();
            println!("D4 r={r} seed={rng_seed} ascent worst: {worst}");
        }
    }

    // E8 descent (fewer seeds to start, time it)
    let e8 = MarkedLattice::standard(LatticeId::E8);
    for (r, nseeds) in [(2u32, 10usize), (4, 20), (8, 20)] {
        let t = Instant::now();
        let seeds = random_seed_unimodulars(8, r, nseeds, 1).unwrap();
        let results = hamming_descent(&e8, r, &seeds, 25, 1).unwrap();
        let mut best: Vec<f64> = results.iter().map(|x| x.best_hd.value()).collect();
        best.sort_by(f64::total_cmp);
        let fracs: Vec<String> = results
            .iter()
            .map(|x| format!("{}/{}", x.best_hd.total_bit_diffs, x.best_hd.neighbor_count))
            .collect();
        println!(
            "E8 r={r}: best per seed {best:.3?} ({fracs:?}) in {:.1?}",
            t.elapsed()
        );
    }

    // E8 ascent r=8
    let t = Instant::now();
    let seeds = random_seed_unimodulars(8, 8, 20, 1).unwrap();
    let results = hamming_ascent(&e8, 8, &seeds, 25, 1).unwrap();
    let worst = results.iter().map(|x| x.best_hd).max().unwrap();
    println!("E8 r=8 ascent worst: {worst} in {:.1?}", t.elapsed());
    let seeds = random_seed_unimodulars(8, 4, 20, 1).unwrap();
    let results = hamming_ascent(&e8, 4, &seeds, 25, 1).unwrap();
    let worst = results.iter().map(|x| x.best_hd).max().unwrap();
    println!("E8 r=4 ascent worst: {worst}");
}
