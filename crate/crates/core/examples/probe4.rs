// Scratch probe: modem timings and BER curve calibration.
use std::time::Instant;

use voromod::lattice::{LatticeId, MarkedLattice};
use voromod::modem::{average_symbol_energy, run_trials, CodecConfig};
use voromod::search::{hamming_ascent, preset_best_unimodular, random_seed_unimodulars};
use voromod::unimodular::UnimodularElement;

fn main() {
    // energies and construction timing
    for (id, n, r) in [
        (LatticeId::A2, 2usize, 4u32),
        (LatticeId::D4, 4, 4),
        (LatticeId::D4, 4, 8),
        (LatticeId::E8, 8, 2),
        (LatticeId::E8, 8, 4),
        (LatticeId::E8, 8, 8),
    ] {
        let lat = MarkedLattice::standard(id);
        let u = UnimodularElement::identity(n, r);
        let t = Instant::now();
        let e = average_symbol_energy(&lat, &u, r).unwrap();
        println!("{id} r={r}: pair energy {e:.6} ({:.2?})", t.elapsed());
    }

    // round-trip timing: E8 r=4 all 65536 labels
    let e8 = MarkedLattice::standard(LatticeId::E8);
    let cfg = CodecConfig::new(&e8, &UnimodularElement::identity(8, 4), 4).unwrap();
    let t = Instant::now();
    let mut ok = 0u32;
    for v in 0u32..65536 {
        let bits: Vec<u8> = (0..16).rev().map(|b| ((v >> b) & 1) as u8).collect();
        let frame = cfg.encode(&bits).unwrap();
        if cfg.decode(&frame).unwrap() == bits {
            ok += 1;
        }
    }
    println!("E8 r=4 round trips: {ok}/65536 ({:.2?})", t.elapsed());

    // BER curve calibration for D4 r=4: best/standard/worst
    let d4 = MarkedLattice::standard(LatticeId::D4);
    let best = preset_best_unimodular(LatticeId::D4, 4).unwrap();
    let std_u = UnimodularElement::identity(4, 4);
    let seeds = random_seed_unimodulars(4, 4, 20, 1).unwrap();
    let ascent = hamming_ascent(&d4, 4, &seeds, 25, 1).unwrap();
    let worst_res = ascent.iter().max_by_key(|x| x.best_hd).unwrap();
    let worst = worst_res.best.sl_lift().unwrap();
    println!(
        "D4 r=4 worst from ascent: HD {} det {}",
        worst_res.best_hd,
        worst.det().unwrap()
    );

    let t = Instant::now();
    for (name, u) in [("best", &best), ("standard", &std_u), ("worst", &worst)] {
        let cfg = CodecConfig::new(&d4, u, 4).unwrap();
        print!("D4 r=4 {name:9}");
        for snr10 in [60u32, 70, 80, 90, 100, 110] {
            let snr = snr10 as f64 / 10.0;
            let stats = run_trials(&cfg, snr, 400_000, 200, 11, 2).unwrap();
            print!("  {snr:.1}dB:{:.2e}", stats.ber());
        }
        println!();
    }
    println!("(D4 sweep {:.1?})", t.elapsed());

    // E8 r=8 curves
    let best8 = preset_best_unimodular(LatticeId::E8, 8).unwrap();
    let std8 = UnimodularElement::identity(8, 8);
    let t = Instant::now();
    for (name, u) in [("best", &best8), ("standard", &std8)] {
        let cfg = CodecConfig::new(&e8, u, 8).unwrap();
        print!("E8 r=8 {name:9}");
        for snr10 in [100u32, 110, 120, 130, 140] {
            let snr = snr10 as f64 / 10.0;
            let stats = run_trials(&cfg, snr, 480_000, 200, 11, 2).unwrap();
            print!("  {snr:.1}dB:{:.2e}", stats.ber());
        }
        println!();
    }
    println!("(E8 sweep {:.1?})", t.elapsed());
}
