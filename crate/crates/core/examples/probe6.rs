// Scratch probe: exhaustive/bulk round-trips through ill-conditioned lifts.
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use voromod::lattice::{LatticeId, MarkedLattice};
use voromod::modem::CodecConfig;
use voromod::search::{hamming_ascent, random_seed_unimodulars};

fn main() {
    let d4 = MarkedLattice::standard(LatticeId::D4);
    let e8 = MarkedLattice::standard(LatticeId::E8);

    // exhaustive D4 r=8 with worst lift
    let seeds = random_seed_unimodulars(4, 8, 20, 1).unwrap();
    let asc = hamming_ascent(&d4, 8, &seeds, 25, 1).unwrap();
    let worst = asc.iter().max_by_key(|x| x.best_hd).unwrap().best.sl_lift().unwrap();
    let cfg = CodecConfig::new(&d4, &worst, 8).unwrap();
    let mut fails = 0;
    for v in 0u32..4096 {
        let bits: Vec<u8> = (0..12).rev().map(|b| ((v >> b) & 1) as u8).collect();
        if cfg.decode(&cfg.encode(&bits).unwrap()).unwrap() != bits {
            fails += 1;
        }
    }
    println!("D4 r=8 worst-lift exhaustive round-trip failures: {fails}/4096");

    // bulk random E8 r=8 with worst lift
    let seeds = random_seed_unimodulars(8, 8, 20, 1).unwrap();
    let asc = hamming_ascent(&e8, 8, &seeds, 25, 1).unwrap();
    let worst = asc.iter().max_by_key(|x| x.best_hd).unwrap().best.sl_lift().unwrap();
    println!(
        "E8 r=8 worst entries after conditioning: max |u| = {}",
        worst.entries().iter().map(|x| x.abs()).max().unwrap()
    );
    let cfg = CodecConfig::new(&e8, &worst, 8).unwrap();
    println!(
        "  codec-internal max |u| = {}",
        cfg.unimodular().entries().iter().map(|x| x.abs()).max().unwrap()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fails = 0;
    for _ in 0..20_000 {
        let bits: Vec<u8> = (0..24).map(|_| rng.random_range(0..=1)).collect();
        if cfg.decode(&cfg.encode(&bits).unwrap()).unwrap() != bits {
            fails += 1;
        }
    }
    println!("E8 r=8 worst-lift random round-trip failures: {fails}/20000");
}
