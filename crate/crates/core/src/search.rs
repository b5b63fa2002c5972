//! Hamming descent: restart-based local search over `G_n(r)`.
//!
//! From a starting element the search evaluates every product `G_m G_i^k`
//! over all shear generators `G_i` and powers `k` in `1..r`, moves to the
//! first product attaining the best Hamming density, and repeats for a fixed
//! number of steps, remembering the best element seen. Ascent is the same
//! walk maximizing instead of minimizing, used to produce worst-case
//! baselines.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::labeling::{neighbor_offsets_standard, HammingDensity};
use crate::lattice::{LatticeId, MarkedLattice};
use crate::unimodular::{shear_position, UnimodularElement};
use crate::{Error, Result};

/// One accepted move of a descent/ascent walk.
#[derive(Debug, Clone)]
pub struct DescentStep {
    /// Step index, starting at 0.
    pub step: usize,
    /// Index into the lexicographic shear generator list.
    pub generator: usize,
    /// Power of the generator that was applied.
    pub power: u32,
    /// Hamming density after the move.
    pub hd: HammingDensity,
}

/// Outcome of one walk from one seed.
#[derive(Debug, Clone)]
pub struct DescentResult {
    pub seed: UnimodularElement,
    pub best: UnimodularElement,
    pub best_hd: HammingDensity,
    pub trace: Vec<DescentStep>,
    pub rng_seed: u64,
}

/// Tracks a group element together with its inverse so that shear moves and
/// Hamming-density evaluation stay cheap: right-multiplying by `I + k E_ij`
/// adds `k * col_i` to `col_j` of `U` and subtracts `k * row_j` from `row_i`
/// of `U^-1`.
struct Walker {
    n: usize,
    r: i64,
    u: Vec<i64>,
    inv: Vec<i64>,
}

impl Walker {
    fn from_element(u: &UnimodularElement) -> Result<Walker> {
        let canon = u.canonicalize();
        let inv = canon.inverse_mod()?;
        Ok(Walker {
            n: u.dimension(),
            r: u.modulus() as i64,
            u: canon.entries().to_vec(),
            inv: inv.entries().to_vec(),
        })
    }

    fn apply_shear(&mut self, i: usize, j: usize, k: u32) {
        let n = self.n;
        let k = k as i64;
        for row in 0..n {
            self.u[row * n + j] = (self.u[row * n + j] + k * self.u[row * n + i]).rem_euclid(self.r);
        }
        for col in 0..n {
            self.inv[i * n + col] =
                (self.inv[i * n + col] - k * self.inv[j * n + col]).rem_euclid(self.r);
        }
    }

    fn element(&self) -> UnimodularElement {
        UnimodularElement::from_residues(self.n, self.r as u32, self.u.clone())
            .expect("walker invariant: determinant stays a unit")
    }
}

/// Per-offset products `P = U^-1 d` for the current walker, so that a
/// candidate shear's density is an O(offsets) update instead of a fresh
/// matrix-vector pass.
struct OffsetEval {
    /// Offset columns, flattened: entry `o * n + row`.
    base: Vec<Vec<i64>>,
    weights: Vec<u32>,
    r: i64,
}

impl OffsetEval {
    fn new(offsets: &[Vec<u32>], walker: &Walker) -> OffsetEval {
        let n = walker.n;
        let r = walker.r;
        let base: Vec<Vec<i64>> = offsets
            .iter()
            .map(|d| {
                (0..n)
                    .map(|row| {
                        (0..n)
                            .map(|col| walker.inv[row * n + col] * d[col] as i64)
                            .sum::<i64>()
                            .rem_euclid(r)
                    })
                    .collect()
            })
            .collect();
        let weights = (0..r as u32).map(|a| gray_weight(a)).collect();
        OffsetEval { base, weights, r }
    }

    fn total(&self) -> u64 {
        self.base
            .iter()
            .flat_map(|p| p.iter())
            .map(|&x| self.weights[x as usize] as u64)
            .sum()
    }

    /// Density total if the shear `I + k E_ij` were applied: only component
    /// `i` of each product changes, to `P_i - k P_j`.
    fn total_after_shear(&self, base_total: u64, i: usize, j: usize, k: u32) -> u64 {
        let mut total = base_total;
        for p in &self.base {
            let old = p[i];
            let new = (old - k as i64 * p[j]).rem_euclid(self.r);
            total -= self.weights[old as usize] as u64;
            total += self.weights[new as usize] as u64;
        }
        total
    }
}

fn gray_weight(a: u32) -> u32 {
    (a ^ (a >> 1)).count_ones()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    fn improves(self, candidate: u64, incumbent: u64) -> bool {
        match self {
            Direction::Minimize => candidate < incumbent,
            Direction::Maximize => candidate > incumbent,
        }
    }
}

/// Walk each seed for `iters` steps, greedily minimizing Hamming density.
pub fn hamming_descent(
    lat: &MarkedLattice,
    r: u32,
    seeds: &[UnimodularElement],
    iters: usize,
    rng_seed: u64,
) -> Result<Vec<DescentResult>> {
    directed_walks(lat, r, seeds, iters, rng_seed, Direction::Minimize)
}

/// Identical walk maximizing Hamming density, for worst-case baselines.
pub fn hamming_ascent(
    lat: &MarkedLattice,
    r: u32,
    seeds: &[UnimodularElement],
    iters: usize,
    rng_seed: u64,
) -> Result<Vec<DescentResult>> {
    directed_walks(lat, r, seeds, iters, rng_seed, Direction::Maximize)
}

fn directed_walks(
    lat: &MarkedLattice,
    r: u32,
    seeds: &[UnimodularElement],
    iters: usize,
    rng_seed: u64,
    direction: Direction,
) -> Result<Vec<DescentResult>> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds supplied".into()));
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("iters must be at least 1".into()));
    }
    if !r.is_power_of_two() {
        return Err(Error::ModulusNotPowerOfTwo(r));
    }
    let n = lat.dimension();
    let rs = neighbor_offsets_standard(lat, r)?;
    let neighbor_count = rs.len() as u64;
    let gen_count = n * (n - 1);

    let mut results = Vec::with_capacity(seeds.len());
    for seed in seeds {
        if seed.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: seed.dimension(),
            });
        }
        let mut walker = Walker::from_element(seed)?;
        let mut eval = OffsetEval::new(rs.offsets(), &walker);
        let mut current_total = eval.total();

        let mut best_total = current_total;
        let mut best_entries = walker.u.clone();
        let mut trace = Vec::with_capacity(iters);

        for step in 0..iters {
            // first (generator, power) attaining the extreme value
            let mut chosen: Option<(usize, u32, u64)> = None;
            for g in 0..gen_count {
                let (i, j) = shear_position(n, g);
                for k in 1..r {
                    let total = eval.total_after_shear(current_total, i, j, k);
                    let better = match chosen {
                        None => true,
                        Some((_, _, t)) => direction.improves(total, t),
                    };
                    if better {
                        chosen = Some((g, k, total));
                    }
                }
            }
            let (g, k, total) = chosen.expect("generator list is nonempty");
            let (i, j) = shear_position(n, g);
            walker.apply_shear(i, j, k);
            eval = OffsetEval::new(rs.offsets(), &walker);
            current_total = total;
            debug_assert_eq!(eval.total(), total);
            if direction.improves(total, best_total) {
                best_total = total;
                best_entries = walker.u.clone();
            }
            trace.push(DescentStep {
                step,
                generator: g,
                power: k,
                hd: HammingDensity::new(total, neighbor_count),
            });
        }

        results.push(DescentResult {
            seed: seed.canonicalize(),
            best: UnimodularElement::from_residues(n, r, best_entries)?,
            best_hd: HammingDensity::new(best_total, neighbor_count),
            trace,
            rng_seed,
        });
    }
    Ok(results)
}

/// Random starting points with pairwise distinct Hamming density.
///
/// Candidates are products of 50 random (generator, power) pairs; a candidate
/// is kept only if its density differs from every density already kept.
/// Gives up after `100 * count` attempts, so fewer than `count` seeds can
/// come back when the group is small.
pub fn random_seed_unimodulars(
    n: usize,
    r: u32,
    count: usize,
    rng_seed: u64,
) -> Result<Vec<UnimodularElement>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if !r.is_power_of_two() {
        return Err(Error::ModulusNotPowerOfTwo(r));
    }
    let id = LatticeId::from_dimension(n).ok_or_else(|| {
        Error::InvalidArgument(format!("no supported lattice has dimension {n}"))
    })?;
    let lat = MarkedLattice::standard(id);
    let rs = neighbor_offsets_standard(&lat, r)?;
    let gen_count = n * (n - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut kept: Vec<UnimodularElement> = Vec::with_capacity(count);
    let mut kept_hd: Vec<HammingDensity> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while kept.len() < count && attempts < 100 * count {
        attempts += 1;
        let mut walker = Walker::from_element(&UnimodularElement::identity(n, r))?;
        for _ in 0..50 {
            let g = rng.random_range(0..gen_count);
            let k = rng.random_range(1..r);
            let (i, j) = shear_position(n, g);
            walker.apply_shear(i, j, k);
        }
        let eval = OffsetEval::new(rs.offsets(), &walker);
        let hd = HammingDensity::new(eval.total(), rs.len() as u64);
        if kept_hd.iter().any(|h| h.eq_exact(&hd)) {
            continue;
        }
        kept_hd.push(hd);
        kept.push(walker.element());
    }
    Ok(kept)
}

/// The published best-found labeling matrices for D4 and E8.
pub fn preset_best_unimodular(id: LatticeId, r: u32) -> Result<UnimodularElement> {
    match (id, r) {
        (LatticeId::D4, 4 | 8) => UnimodularElement::new(
            4,
            r,
            vec![
                1, 0, 0, 0, //
                0, 1, 0, 0, //
                -1, 0, 1, 0, //
                0, 0, 0, 1,
            ],
        ),
        (LatticeId::E8, 4 | 8) => UnimodularElement::new(
            8,
            r,
            vec![
                -1, 1, 0, 0, 0, 1, 1, 0, //
                -2, 1, 0, 0, 0, 2, 2, 0, //
                -2, 0, 1, 0, 0, 2, 2, 0, //
                -1, 0, 0, 1, 1, 1, 1, 0, //
                -1, 0, 0, 0, 1, 1, 1, 0, //
                0, 0, 0, 0, 0, 1, 1, 0, //
                0, 0, 0, 0, 0, 0, 1, 0, //
                0, -1, 0, 0, 0, 0, 0, 1,
            ],
        ),
        _ => Err(Error::UnsupportedPreset {
            lattice: id.to_string(),
            r,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::{hamming_density, neighbor_offsets_sheared};

    #[test]
    fn preset_d4_reaches_density_two() {
        let lat = MarkedLattice::standard(LatticeId::D4);
        for r in [4u32, 8] {
            let u = preset_best_unimodular(LatticeId::D4, r).unwrap();
            let rs = neighbor_offsets_standard(&lat, r).unwrap();
            let ru = neighbor_offsets_sheared(&rs, &u).unwrap();
            let hd = hamming_density(&ru).unwrap();
            assert!(hd.eq_exact(&HammingDensity::new(2, 1)), "r = {r}: {hd}");
        }
    }

    #[test]
    fn preset_rejects_unsupported_pairs() {
        assert!(matches!(
            preset_best_unimodular(LatticeId::A2, 4),
            Err(Error::UnsupportedPreset { .. })
        ));
        assert!(matches!(
            preset_best_unimodular(LatticeId::D4, 2),
            Err(Error::UnsupportedPreset { .. })
        ));
    }

    #[test]
    fn walker_matches_matrix_arithmetic() {
        let u = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
        let mut walker = Walker::from_element(&u).unwrap();
        walker.apply_shear(0, 1, 3);
        let expected = u.apply_shear_right(0, 1, 3);
        assert_eq!(walker.element().entries(), expected.entries());
        // tracked inverse really is the inverse
        let inv = UnimodularElement::from_residues(2, 4, walker.inv.clone()).unwrap();
        let prod = walker.element().mul_mod(&inv).unwrap();
        assert!(prod.same_labeling(&UnimodularElement::identity(2, 4)));
    }

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        let a = random_seed_unimodulars(2, 4, 5, 7).unwrap();
        let b = random_seed_unimodulars(2, 4, 5, 7).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.entries(), y.entries());
        }
        let lat = MarkedLattice::standard(LatticeId::A2);
        let rs = neighbor_offsets_standard(&lat, 4).unwrap();
        let hds: Vec<HammingDensity> = a
            .iter()
            .map(|u| hamming_density(&neighbor_offsets_sheared(&rs, u).unwrap()).unwrap())
            .collect();
        for i in 0..hds.len() {
            for j in 0..i {
                assert!(!hds[i].eq_exact(&hds[j]));
            }
        }
    }

    #[test]
    fn descent_record_is_monotone() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        let seeds = random_seed_unimodulars(2, 4, 3, 11).unwrap();
        let results = hamming_descent(&lat, 4, &seeds, 10, 11).unwrap();
        for res in results {
            let mut record = hamming_density(
                &neighbor_offsets_sheared(
                    &neighbor_offsets_standard(&lat, 4).unwrap(),
                    &res.seed,
                )
                .unwrap(),
            )
            .unwrap();
            for step in &res.trace {
                if step.hd < record {
                    record = step.hd;
                }
            }
            assert!(res.best_hd.eq_exact(&record));
        }
    }
}
