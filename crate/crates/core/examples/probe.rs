// Scratch probe for development: prints the frozen-value candidates.
use voromod::labeling::{hamming_density, neighbor_offsets_sheared, neighbor_offsets_standard};
use voromod::lattice::{LatticeId, MarkedLattice};
use voromod::search::preset_best_unimodular;
use voromod::unimodular::UnimodularElement;

fn main() {
    for (id, n, rs_list) in [
        (LatticeId::A2, 2usize, vec![4u32]),
        (LatticeId::D4, 4, vec![4, 8]),
        (LatticeId::E8, 8, vec![2, 4, 8]),
    ] {
        let lat = MarkedLattice::standard(id);
        for r in rs_list {
            let rs = neighbor_offsets_standard(&lat, r).unwrap();
            let hd = hamming_density(&rs).unwrap();
            println!("{id} r={r} standard: {hd}");
            if let Ok(u) = preset_best_unimodular(id, r) {
                let ru = neighbor_offsets_sheared(&rs, &u).unwrap();
                let hd = hamming_density(&ru).unwrap();
                println!("{id} r={r} preset-best: {hd}  (det = {})", u.det().unwrap());
            }
            let _ = n;
        }
    }

    // offset coordinate ranges for E8 (pre-mod), for the record
    let lat = MarkedLattice::standard(LatticeId::E8);
    let inv = lat.basis_inverse();
    let mut lo = 0f64;
    let mut hi = 0f64;
    for v in lat.minimal_vectors() {
        for row in 0..8 {
            let x: f64 = inv[row * 8..row * 8 + 8]
                .iter()
                .zip(&v.coords)
                .map(|(a, b)| a * b)
                .sum();
            lo = lo.min(x.round());
            hi = hi.max(x.round());
        }
    }
    println!("E8 offset coefficient range: [{lo}, {hi}]");

    // B*U for the D4 preset
    let d4 = MarkedLattice::standard(LatticeId::D4);
    let u = preset_best_unimodular(LatticeId::D4, 4).unwrap();
    let labeled = d4.sheared(&u).unwrap();
    println!("D4 BU = {:?}", labeled.basis());

    // B*U for the E8 preset
    let e8 = MarkedLattice::standard(LatticeId::E8);
    let u = preset_best_unimodular(LatticeId::E8, 4).unwrap();
    let labeled = e8.sheared(&u).unwrap();
    for row in 0..8 {
        println!("E8 BU row {row}: {:?}", &labeled.basis()[row * 8..row * 8 + 8]);
    }

    // sanity: an arbitrary non-preset element for the record
    let u = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
    println!("A2 example det = {}", u.det().unwrap());
}
