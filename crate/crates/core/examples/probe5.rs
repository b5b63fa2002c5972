// Scratch probe: lifted worst labelings through the modem, LER invariance,
// BER/LER vs HD ratio.
use std::time::Instant;

use voromod::labeling::{hamming_density, neighbor_offsets_sheared, neighbor_offsets_standard};
use voromod::lattice::{LatticeId, MarkedLattice};
use voromod::modem::{run_trials, CodecConfig};
use voromod::search::{hamming_ascent, preset_best_unimodular, random_seed_unimodulars};
use voromod::unimodular::UnimodularElement;

fn main() {
    let d4 = MarkedLattice::standard(LatticeId::D4);
    let e8 = MarkedLattice::standard(LatticeId::E8);

    // lifted ascent results: entry sizes and codec sanity
    for (name, lat, n, r) in [
        ("D4 r=4", &d4, 4usize, 4u32),
        ("D4 r=8", &d4, 4, 8),
        ("E8 r=8", &e8, 8, 8),
    ] {
        let seeds = random_seed_unimodulars(n, r, 20, 1).unwrap();
        let asc = hamming_ascent(lat, r, &seeds, 25, 1).unwrap();
        let worst = asc.iter().max_by_key(|x| x.best_hd).unwrap();
        let lift = worst.best.sl_lift().unwrap();
        let max_entry = lift.entries().iter().map(|x| x.abs()).max().unwrap();
        let cfg = CodecConfig::new(lat, &lift, r).unwrap();
        let bits = vec![1u8; cfg.bits_per_point()];
        let frame = cfg.encode(&bits).unwrap();
        let rt = cfg.decode(&frame).unwrap() == bits;
        println!(
            "{name}: worst HD {}, lift det {}, max |entry| {max_entry}, round-trip {rt}",
            worst.best_hd,
            lift.det().unwrap()
        );
    }

    // LER invariance + BER ordering at one mid-curve SNR (D4 r=4, 9 dB)
    let best = preset_best_unimodular(LatticeId::D4, 4).unwrap();
    let std_u = UnimodularElement::identity(4, 4);
    let seeds = random_seed_unimodulars(4, 4, 20, 1).unwrap();
    let asc = hamming_ascent(&d4, 4, &seeds, 25, 1).unwrap();
    let worst = asc.iter().max_by_key(|x| x.best_hd).unwrap().best.sl_lift().unwrap();

    let rs = neighbor_offsets_standard(&d4, 4).unwrap();
    let t = Instant::now();
    for (name, u) in [("best", &best), ("standard", &std_u), ("worst", &worst)] {
        let cfg = CodecConfig::new(&d4, u, 4).unwrap();
        let stats = run_trials(&cfg, 9.0, 8_000_000, 0, 5, 2).unwrap();
        let hd = hamming_density(&neighbor_offsets_sheared(&rs, u).unwrap()).unwrap();
        let points = stats.points_sent as f64;
        let ler_se = (stats.ler() * (1.0 - stats.ler()) / points).sqrt();
        println!(
            "{name:9} HD {:5.2}  BER {:.4e}  LER {:.4e} (se {:.2e})  bit/lat err ratio {:.3}",
            hd.value(),
            stats.ber(),
            stats.ler(),
            ler_se,
            stats.bit_errors as f64 / stats.lattice_errors as f64,
        );
    }
    println!("(LER probe {:.1?})", t.elapsed());
}
