//! Gray mapping, neighbor offset sets and the Hamming-density metric.
//!
//! A constellation point's bit label is the binary-reflected Gray codeword of
//! its integer coordinates, so integer steps of +/-1 (with wraparound) cost
//! exactly one bit. The Hamming density of a labeling is the average number
//! of bit differences between a point and its nearest neighbors; it only
//! depends on the integer offsets to those neighbors, which this module
//! derives from the minimal vectors and transforms under basis changes.

use std::fmt;

use crate::lattice::{MarkedLattice, TOL};
use crate::unimodular::UnimodularElement;
use crate::{Error, Result};

/// Gray codeword of `k`.
fn gray_code(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Integer whose Gray codeword is `g`.
fn gray_code_inverse(mut g: u64) -> u64 {
    let mut mask = g >> 1;
    while mask != 0 {
        g ^= mask;
        mask >>= 1;
    }
    g
}

/// Bit cost of an integer offset: the weight of its Gray codeword.
fn offset_bit_weight(a: u64) -> u32 {
    gray_code(a).count_ones()
}

/// Map an MSB-first bit vector to the integer labeled by it: the integer
/// whose Gray codeword spells out `bits`.
pub fn gray_encode(bits: &[u8]) -> u64 {
    assert!(bits.len() <= 63, "bit vector too long");
    let mut v = 0u64;
    for &b in bits {
        debug_assert!(b <= 1);
        v = (v << 1) | u64::from(b);
    }
    gray_code_inverse(v)
}

/// Inverse of [`gray_encode`]: the `width`-bit Gray codeword of `k`,
/// MSB first.
pub fn gray_decode(k: u64, width: u32) -> Result<Vec<u8>> {
    if width >= 64 || k >= (1u64 << width) {
        return Err(Error::ValueOutOfRange { value: k, bits: width });
    }
    let g = gray_code(k);
    Ok((0..width)
        .rev()
        .map(|bit| ((g >> bit) & 1) as u8)
        .collect())
}

/// The multiset of integer label offsets (mod `r`) from any constellation
/// point to its nearest neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborOffsetSet {
    offsets: Vec<Vec<u32>>,
    modulus: u32,
    dimension: usize,
}

impl NeighborOffsetSet {
    pub fn offsets(&self) -> &[Vec<u32>] {
        &self.offsets
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Offsets to the nearest neighbors under the lattice's own basis: the basis
/// coordinates of every minimal vector, reduced mod `r`.
pub fn neighbor_offsets_standard(lat: &MarkedLattice, r: u32) -> Result<NeighborOffsetSet> {
    if r < 2 {
        return Err(Error::BadModulus(r));
    }
    let n = lat.dimension();
    let inv = lat.basis_inverse();
    let mut offsets = Vec::with_capacity(lat.id().kissing_number());
    for v in lat.minimal_vectors() {
        let mut offset = Vec::with_capacity(n);
        for row in 0..n {
            let x: f64 = inv[row * n..(row + 1) * n]
                .iter()
                .zip(&v.coords)
                .map(|(a, b)| a * b)
                .sum();
            let rounded = x.round();
            let residual = (x - rounded).abs();
            if residual > TOL {
                return Err(Error::NonIntegralOffset { residual });
            }
            offset.push((rounded as i64).rem_euclid(r as i64) as u32);
        }
        debug_assert!(offset.iter().any(|&x| x != 0));
        offsets.push(offset);
    }
    Ok(NeighborOffsetSet {
        offsets,
        modulus: r,
        dimension: n,
    })
}

/// Offsets after a unimodular basis change: each offset (as a column vector)
/// maps to `U^-1 d` mod `r`.
pub fn neighbor_offsets_sheared(
    rs: &NeighborOffsetSet,
    u: &UnimodularElement,
) -> Result<NeighborOffsetSet> {
    if u.dimension() != rs.dimension {
        return Err(Error::DimensionMismatch {
            expected: rs.dimension,
            got: u.dimension(),
        });
    }
    let n = rs.dimension;
    let r = rs.modulus as i64;
    let inv = u.inverse_mod()?;
    let offsets = rs
        .offsets
        .iter()
        .map(|d| {
            (0..n)
                .map(|row| {
                    let s: i64 = (0..n)
                        .map(|col| inv.entries()[row * n + col] * d[col] as i64)
                        .sum();
                    s.rem_euclid(r) as u32
                })
                .collect()
        })
        .collect();
    Ok(NeighborOffsetSet {
        offsets,
        modulus: rs.modulus,
        dimension: n,
    })
}

/// Average bit differences per nearest neighbor, kept as an exact ratio so
/// search tie-breaking never depends on float rounding.
///
/// Comparisons (including equality) are between the rationals, so 48/24
/// equals 2/1.
#[derive(Debug, Clone, Copy)]
pub struct HammingDensity {
    pub total_bit_diffs: u64,
    pub neighbor_count: u64,
}

impl HammingDensity {
    pub fn new(total_bit_diffs: u64, neighbor_count: u64) -> Self {
        assert!(neighbor_count > 0);
        HammingDensity {
            total_bit_diffs,
            neighbor_count,
        }
    }

    pub fn value(&self) -> f64 {
        self.total_bit_diffs as f64 / self.neighbor_count as f64
    }

    /// Exact comparison of the underlying rationals.
    pub fn cmp_exact(&self, other: &HammingDensity) -> std::cmp::Ordering {
        let lhs = self.total_bit_diffs as u128 * other.neighbor_count as u128;
        let rhs = other.total_bit_diffs as u128 * self.neighbor_count as u128;
        lhs.cmp(&rhs)
    }

    /// Equality as rationals (e.g. 48/24 equals 2/1).
    pub fn eq_exact(&self, other: &HammingDensity) -> bool {
        self.cmp_exact(other).is_eq()
    }
}

impl PartialEq for HammingDensity {
    fn eq(&self, other: &Self) -> bool {
        self.eq_exact(other)
    }
}

impl Eq for HammingDensity {}

impl PartialOrd for HammingDensity {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HammingDensity {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for HammingDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} = {:.4}",
            self.total_bit_diffs,
            self.neighbor_count,
            self.value()
        )
    }
}

/// Hamming density of a labeling from its neighbor offset multiset: Gray bit
/// cost of every offset coordinate, averaged over neighbors.
pub fn hamming_density(ru: &NeighborOffsetSet) -> Result<HammingDensity> {
    if !ru.modulus.is_power_of_two() {
        return Err(Error::ModulusNotPowerOfTwo(ru.modulus));
    }
    let total = ru
        .offsets
        .iter()
        .flat_map(|d| d.iter())
        .map(|&a| offset_bit_weight(a as u64) as u64)
        .sum();
    Ok(HammingDensity::new(total, ru.offsets.len() as u64))
}

/// The greedy lower bound on Hamming density, with its weight decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdBound {
    /// `(bit weight, labels taken at that weight)`, in increasing weight.
    pub per_weight: Vec<(u32, u64)>,
    pub hd: HammingDensity,
}

/// Cheapest conceivable labeling of `kissing` neighbors in dimension `n`:
/// consume label offsets in increasing bit weight `w`, with capacity
/// `C(n, w) * 2^w` at each weight (choose the differing coordinates, each off
/// by +/-1).
pub fn theoretical_hd_bound(n: usize, kissing: u64) -> Result<HdBound> {
    let capacity = 3u64.checked_pow(n as u32).map(|c| c - 1);
    match capacity {
        Some(c) if kissing <= c && kissing > 0 => {}
        _ => {
            return Err(Error::KissingCapacityExceeded {
                kissing,
                capacity: capacity.unwrap_or(u64::MAX),
                dimension: n,
            })
        }
    }
    let mut remaining = kissing;
    let mut total = 0u64;
    let mut per_weight = Vec::new();
    for w in 1..=n as u32 {
        if remaining == 0 {
            break;
        }
        let cap = binomial(n as u64, w as u64) * (1u64 << w);
        let take = remaining.min(cap);
        per_weight.push((w, take));
        total += take * w as u64;
        remaining -= take;
    }
    Ok(HdBound {
        per_weight,
        hd: HammingDensity::new(total, kissing),
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Hard cap on brute-force constellation size (`r^n`).
pub const ORACLE_LIMIT: u64 = 1 << 20;

/// Verify a labeling the slow way: build every constellation point, find its
/// nearest neighbors in the wrapped constellation by exhaustive distance
/// comparison, and count label bit differences directly.
///
/// The wrapped distance between two points is the norm of their difference
/// reduced into the scaled Voronoi region, which the exact quantizer
/// computes. Also checks that the per-point totals are identical across the
/// whole constellation.
///
/// Guarded to `r^n <= 2^20`, and to `r = 2` in dimension 8 (larger cases are
/// quadratic in constellation size).
pub fn hd_brute_force_oracle(
    lat: &MarkedLattice,
    u: &UnimodularElement,
    r: u32,
) -> Result<HammingDensity> {
    let n = lat.dimension();
    if u.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.dimension(),
        });
    }
    if !r.is_power_of_two() {
        return Err(Error::ModulusNotPowerOfTwo(r));
    }
    let points_big = (r as u128).pow(n as u32);
    if points_big > ORACLE_LIMIT as u128 || (n == 8 && r != 2) {
        return Err(Error::OracleTooLarge {
            points: points_big.to_string(),
            limit: ORACLE_LIMIT,
        });
    }
    let count = points_big as usize;
    let uc = u.canonicalize();

    // constellation points and their labels, enumerated in odometer order
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut labels: Vec<Vec<u32>> = Vec::with_capacity(count);
    let basis = lat.basis();
    let shift = lat.shift();
    let mut z = vec![0u32; n];
    for counter in 0..count {
        if counter > 0 {
            for slot in z.iter_mut() {
                *slot += 1;
                if *slot < r {
                    break;
                }
                *slot = 0;
            }
        }
        // c = B (U z)
        let mut uz = vec![0i64; n];
        for row in 0..n {
            uz[row] = (0..n)
                .map(|col| uc.entries()[row * n + col] * z[col] as i64)
                .sum();
        }
        let mut c = vec![0.0; n];
        for row in 0..n {
            c[row] = (0..n).map(|col| basis[row * n + col] * uz[col] as f64).sum::<f64>()
                - shift[row];
        }
        points.push(lat.voronoi_reduce(&c, r)?);
        labels.push(z.clone());
    }

    // per-coordinate label bit distance table
    let bit_dist = |a: u32, b: u32| -> u32 {
        (gray_code(a as u64) ^ gray_code(b as u64)).count_ones()
    };

    let mut first: Option<(u64, u64)> = None;
    for p in 0..count {
        let mut min_d = f64::MAX;
        let mut dists = Vec::with_capacity(count);
        for q in 0..count {
            if q == p {
                dists.push(f64::MAX);
                continue;
            }
            let diff: Vec<f64> = points[p]
                .iter()
                .zip(&points[q])
                .map(|(a, b)| a - b)
                .collect();
            let wrapped = lat.voronoi_reduce(&diff, r)?;
            let d = wrapped.iter().map(|&x| x * x).sum::<f64>();
            if d < min_d {
                min_d = d;
            }
            dists.push(d);
        }
        let mut neighbors = 0u64;
        let mut bits = 0u64;
        for q in 0..count {
            if q == p || dists[q] > min_d + TOL {
                continue;
            }
            neighbors += 1;
            bits += (0..n)
                .map(|i| bit_dist(labels[p][i], labels[q][i]) as u64)
                .sum::<u64>();
        }
        match first {
            None => first = Some((bits, neighbors)),
            Some(expect) => {
                if expect != (bits, neighbors) {
                    return Err(Error::InvalidArgument(format!(
                        "per-point neighbor stats are not constant: point 0 has {expect:?}, \
                         point {p} has {:?}",
                        (bits, neighbors)
                    )));
                }
            }
        }
    }
    let (bits, neighbors) = first.expect("constellation is nonempty");
    Ok(HammingDensity::new(bits, neighbors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeId;

    #[test]
    fn gray_encode_examples() {
        assert_eq!(gray_encode(&[0, 0]), 0);
        assert_eq!(gray_encode(&[1, 0]), 3);
        assert_eq!(gray_encode(&[0, 1]), 1);
    }

    #[test]
    fn gray_decode_examples() {
        assert_eq!(gray_decode(3, 2).unwrap(), vec![1, 0]);
        assert_eq!(gray_decode(1, 2).unwrap(), vec![0, 1]);
        assert_eq!(gray_decode(0, 5).unwrap(), vec![0; 5]);
        assert!(matches!(
            gray_decode(4, 2),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn gray_round_trip_is_identity() {
        for m in 1..=3u32 {
            for k in 0..(1u64 << m) {
                let bits = gray_decode(k, m).unwrap();
                assert_eq!(gray_encode(&bits), k, "m={m} k={k}");
                assert_eq!(bits.len(), m as usize);
            }
        }
    }

    #[test]
    fn gray_adjacent_integers_differ_in_one_bit() {
        for m in 1..=3u32 {
            let r = 1u64 << m;
            for k in 0..r {
                let a = gray_decode(k, m).unwrap();
                let b = gray_decode((k + 1) % r, m).unwrap();
                let diff: u32 = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| u32::from(x != y))
                    .sum();
                assert_eq!(diff, 1, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn a2_standard_offsets_match_published_set() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        let rs = neighbor_offsets_standard(&lat, 4).unwrap();
        let mut got: Vec<Vec<u32>> = rs.offsets().to_vec();
        got.sort();
        let mut want = vec![
            vec![1, 0],
            vec![1, 1],
            vec![0, 1],
            vec![3, 0],
            vec![3, 3],
            vec![0, 3],
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn a2_sheared_offsets_match_hand_computation() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        let rs = neighbor_offsets_standard(&lat, 4).unwrap();
        let u = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
        let ru = neighbor_offsets_sheared(&rs, &u).unwrap();
        let mut got: Vec<Vec<u32>> = ru.offsets().to_vec();
        got.sort();
        let mut want = vec![
            vec![2, 1],
            vec![1, 3],
            vec![3, 2],
            vec![2, 3],
            vec![3, 1],
            vec![1, 2],
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn shearing_by_identity_and_round_trip() {
        let lat = MarkedLattice::standard(LatticeId::D4);
        let rs = neighbor_offsets_standard(&lat, 4).unwrap();
        let id = UnimodularElement::identity(4, 4);
        assert_eq!(neighbor_offsets_sheared(&rs, &id).unwrap(), rs);

        let u = UnimodularElement::new(
            4,
            4,
            vec![1, 0, 0, 0, 2, 1, 0, 0, 0, 1, 1, 0, 3, 0, 2, 1],
        )
        .unwrap();
        let ru = neighbor_offsets_sheared(&rs, &u).unwrap();
        let back = neighbor_offsets_sheared(&ru, &u.inverse_mod().unwrap()).unwrap();
        assert_eq!(back, rs);
    }

    #[test]
    fn a2_example_hamming_densities() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        let rs = neighbor_offsets_standard(&lat, 4).unwrap();
        let hd = hamming_density(&rs).unwrap();
        assert_eq!((hd.total_bit_diffs, hd.neighbor_count), (8, 6));

        let u = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
        let ru = neighbor_offsets_sheared(&rs, &u).unwrap();
        let hd = hamming_density(&ru).unwrap();
        assert_eq!((hd.total_bit_diffs, hd.neighbor_count), (16, 6));
    }

    #[test]
    fn d4_standard_density_is_constant_in_r() {
        let lat = MarkedLattice::standard(LatticeId::D4);
        for r in [4u32, 8] {
            let rs = neighbor_offsets_standard(&lat, r).unwrap();
            let hd = hamming_density(&rs).unwrap();
            assert_eq!(
                (hd.total_bit_diffs, hd.neighbor_count),
                (56, 24),
                "r = {r}"
            );
        }
    }

    #[test]
    fn bound_decompositions() {
        let d4 = theoretical_hd_bound(4, 24).unwrap();
        assert_eq!(d4.per_weight, vec![(1, 8), (2, 16)]);
        assert_eq!((d4.hd.total_bit_diffs, d4.hd.neighbor_count), (40, 24));

        let e8 = theoretical_hd_bound(8, 240).unwrap();
        assert_eq!(e8.per_weight, vec![(1, 16), (2, 112), (3, 112)]);
        assert_eq!((e8.hd.total_bit_diffs, e8.hd.neighbor_count), (576, 240));

        // greedy enumeration for A2: 4 one-bit offsets, then 2 two-bit
        let a2 = theoretical_hd_bound(2, 6).unwrap();
        assert_eq!(a2.per_weight, vec![(1, 4), (2, 2)]);
        assert_eq!((a2.hd.total_bit_diffs, a2.hd.neighbor_count), (8, 6));
    }

    #[test]
    fn bound_rejects_impossible_kissing() {
        assert!(matches!(
            theoretical_hd_bound(2, 9),
            Err(Error::KissingCapacityExceeded { .. })
        ));
    }

    #[test]
    fn hamming_density_ordering_is_exact() {
        let a = HammingDensity::new(8, 6);
        let b = HammingDensity::new(16, 6);
        let c = HammingDensity::new(4, 3);
        assert!(a < b);
        assert!(a.eq_exact(&c));
    }

    #[test]
    fn oracle_guards() {
        let lat = MarkedLattice::standard(LatticeId::E8);
        let u = UnimodularElement::identity(8, 4);
        assert!(matches!(
            hd_brute_force_oracle(&lat, &u, 4),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_matches_a2_example() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        let hd = hd_brute_force_oracle(&lat, &UnimodularElement::identity(2, 4), 4).unwrap();
        assert!(hd.eq_exact(&HammingDensity::new(8, 6)));

        let u = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
        let hd = hd_brute_force_oracle(&lat, &u, 4).unwrap();
        assert!(hd.eq_exact(&HammingDensity::new(16, 6)));
    }
}
