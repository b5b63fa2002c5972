//! Root lattices, their standard bases and shift vectors, minimal vectors,
//! exact nearest-point quantizers and Voronoi-region reduction.
//!
//! The three supported lattices are A2 (hexagonal), D4 (checkerboard) and E8.
//! The preset basis matrices and shift vectors are the ones commonly used in
//! the literature for self-similar Voronoi constellations; all quantizers are
//! exact, so Voronoi reduction and labeling are bit-reproducible.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::mat;
use crate::unimodular::UnimodularElement;
use crate::{Error, Result};

/// Tolerance for integrality and distance-tie checks throughout the crate.
pub const TOL: f64 = 1e-9;

/// The supported root lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeId {
    A2,
    D4,
    E8,
}

impl LatticeId {
    pub const ALL: [LatticeId; 3] = [LatticeId::A2, LatticeId::D4, LatticeId::E8];

    pub fn dimension(self) -> usize {
        match self {
            LatticeId::A2 => 2,
            LatticeId::D4 => 4,
            LatticeId::E8 => 8,
        }
    }

    /// Number of nearest neighbors of any lattice point.
    pub fn kissing_number(self) -> usize {
        match self {
            LatticeId::A2 => 6,
            LatticeId::D4 => 24,
            LatticeId::E8 => 240,
        }
    }

    /// The lattice whose dimension is `n`, if any.
    pub fn from_dimension(n: usize) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.dimension() == n)
    }

    fn index(self) -> usize {
        match self {
            LatticeId::A2 => 0,
            LatticeId::D4 => 1,
            LatticeId::E8 => 2,
        }
    }
}

impl fmt::Display for LatticeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeId::A2 => write!(f, "A2"),
            LatticeId::D4 => write!(f, "D4"),
            LatticeId::E8 => write!(f, "E8"),
        }
    }
}

impl FromStr for LatticeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a2" => Ok(LatticeId::A2),
            "d4" => Ok(LatticeId::D4),
            "e8" => Ok(LatticeId::E8),
            other => Err(Error::InvalidArgument(format!(
                "unknown lattice {other:?} (expected a2, d4 or e8)"
            ))),
        }
    }
}

/// A lattice paired with a concrete basis matrix and shift vector.
///
/// Different bases of the same lattice produce the same point set but
/// different integer labelings; the basis is what the labeling search
/// optimizes. The shift vector `h` repositions the scaled Voronoi region so
/// constellation points avoid its boundary.
#[derive(Debug, Clone)]
pub struct MarkedLattice {
    id: LatticeId,
    n: usize,
    basis: Vec<f64>,
    basis_inv: Vec<f64>,
    shift: Vec<f64>,
}

/// A point of the lattice (an integral combination of basis columns).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coords: Vec<f64>,
}

impl MarkedLattice {
    /// The preset (basis, shift) pair for the named lattice.
    pub fn standard(id: LatticeId) -> Self {
        let s3 = 3f64.sqrt();
        let (basis, shift): (Vec<f64>, Vec<f64>) = match id {
            LatticeId::A2 => (
                vec![
                    1.0, -0.5, //
                    0.0, s3 / 2.0,
                ],
                vec![1.0 / 8.0, s3 / 8.0],
            ),
            LatticeId::D4 => (
                vec![
                    1.0, 1.0, 0.0, 0.0, //
                    1.0, -1.0, 1.0, 0.0, //
                    0.0, 0.0, -1.0, 1.0, //
                    0.0, 0.0, 0.0, -1.0,
                ],
                vec![17.0 / 32.0, 6.0 / 32.0, 0.0, -11.0 / 32.0],
            ),
            LatticeId::E8 => (
                vec![
                    2.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, //
                    0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.5, //
                    0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.5, //
                    0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.5, //
                    0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.5, //
                    0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.5, //
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.5, //
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5,
                ],
                vec![0.645, 0.0484, 0.116, 0.214, 0.182, 0.247, 0.317, 0.083],
            ),
        };
        let n = id.dimension();
        let basis_inv = mat::invert(&basis, n).expect("preset basis is invertible");
        MarkedLattice {
            id,
            n,
            basis,
            basis_inv,
            shift,
        }
    }

    /// Same lattice and shift, basis right-multiplied by a unimodular matrix.
    ///
    /// The point set is unchanged; only the integer labeling moves.
    pub fn sheared(&self, u: &UnimodularElement) -> Result<MarkedLattice> {
        if u.dimension() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.dimension(),
            });
        }
        let det = u.det()?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        let uf: Vec<f64> = u.entries().iter().map(|&x| x as f64).collect();
        let basis = mat::mat_mul(&self.basis, &uf, self.n);
        let basis_inv = mat::invert(&basis, self.n)?;
        Ok(MarkedLattice {
            id: self.id,
            n: self.n,
            basis,
            basis_inv,
            shift: self.shift.clone(),
        })
    }

    pub fn id(&self) -> LatticeId {
        self.id
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Row-major basis matrix (columns are basis vectors).
    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &[f64] {
        &self.basis_inv
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// All nonzero lattice vectors of minimal norm, sorted lexicographically
    /// by coordinates.
    ///
    /// The count equals the kissing number (6 / 24 / 240). The result depends
    /// only on the lattice, not on the basis of `self`, and is cached.
    pub fn minimal_vectors(&self) -> &'static [LatticePoint] {
        static CACHE: [OnceLock<Vec<LatticePoint>>; 3] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        CACHE[self.id.index()].get_or_init(|| {
            enumerate_minimal_vectors(self.id).expect("minimal vector enumeration")
        })
    }

    /// The nearest lattice point to `y`, computed exactly per lattice.
    ///
    /// Distance ties (within [`TOL`]) resolve to the candidate with
    /// lexicographically smallest coordinates, so boundary points quantize
    /// deterministically.
    pub fn quantize_nearest(&self, y: &[f64]) -> Result<LatticePoint> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let coords = match self.id {
            LatticeId::A2 => self.quantize_a2(y),
            LatticeId::D4 => quantize_dn(y),
            LatticeId::E8 => quantize_e8(y),
        };
        Ok(LatticePoint { coords })
    }

    fn quantize_a2(&self, y: &[f64]) -> Vec<f64> {
        let pre = mat::mat_vec(&self.basis_inv, y, 2);
        let z0 = [pre[0].round(), pre[1].round()];
        let mut best: Option<(f64, Vec<f64>)> = None;
        for di in -1..=1 {
            for dj in -1..=1 {
                let z = [z0[0] + di as f64, z0[1] + dj as f64];
                let c = mat::mat_vec(&self.basis, &z, 2);
                let d = dist_sq(&c, y);
                best = Some(match best.take() {
                    None => (d, c),
                    Some((bd, bc)) => {
                        if d < bd - TOL || (d < bd + TOL && lex_less(&c, &bc)) {
                            (d, c)
                        } else {
                            (bd, bc)
                        }
                    }
                });
            }
        }
        best.unwrap().1
    }

    /// Reduce `p` into the `r`-scaled Voronoi region of the lattice:
    /// `t = p - r * Q(p / r)`, so `t` is congruent to `p` modulo `r`-scaled
    /// lattice vectors.
    pub fn voronoi_reduce(&self, p: &[f64], r: u32) -> Result<Vec<f64>> {
        if r < 2 {
            return Err(Error::BadModulus(r));
        }
        let rf = r as f64;
        let scaled: Vec<f64> = p.iter().map(|&x| x / rf).collect();
        let q = self.quantize_nearest(&scaled)?;
        Ok(p.iter()
            .zip(&q.coords)
            .map(|(&pi, &qi)| pi - rf * qi)
            .collect())
    }

    /// Basis coordinates of lattice point `c`, reduced into `{0, .., r-1}`.
    ///
    /// Fails if `c` is not on the lattice (residual above [`TOL`]).
    pub fn label_of_point(&self, c: &[f64], r: u32) -> Result<Vec<u32>> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: c.len(),
            });
        }
        if r < 2 {
            return Err(Error::BadModulus(r));
        }
        let pre = mat::mat_vec(&self.basis_inv, c, self.n);
        let mut label = Vec::with_capacity(self.n);
        for &x in &pre {
            let rounded = x.round();
            let residual = (x - rounded).abs();
            if residual > TOL {
                return Err(Error::NonLatticePoint { residual });
            }
            label.push((rounded as i64).rem_euclid(r as i64) as u32);
        }
        Ok(label)
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Round half toward the smaller integer, so exact boundary ties prefer the
/// lexicographically smaller result.
fn round_half_down(x: f64) -> f64 {
    (x - 0.5).ceil()
}

/// Nearest point of D_n (integer vectors with even coordinate sum).
///
/// Round every coordinate; if the sum comes out odd, re-round the coordinate
/// with the largest rounding error in the opposite direction. Among equally
/// bad coordinates the flip producing the lexicographically smallest vector
/// wins.
fn quantize_dn(y: &[f64]) -> Vec<f64> {
    let g: Vec<f64> = y.iter().map(|&x| round_half_down(x)).collect();
    let sum: f64 = g.iter().sum();
    if (sum as i64) % 2 == 0 {
        return g;
    }
    let errs: Vec<f64> = y.iter().zip(&g).map(|(a, b)| (a - b).abs()).collect();
    let max_err = errs.iter().cloned().fold(f64::MIN, f64::max);
    let mut best: Option<Vec<f64>> = None;
    for i in 0..y.len() {
        if errs[i] < max_err - TOL {
            continue;
        }
        let mut cand = g.clone();
        // flip away from the rounded value, toward the input
        cand[i] += if y[i] > g[i] { 1.0 } else { -1.0 };
        best = Some(match best.take() {
            None => cand,
            Some(b) => {
                if lex_less(&cand, &b) {
                    cand
                } else {
                    b
                }
            }
        });
    }
    best.unwrap()
}

/// Nearest point of E8 = D8 union (D8 + 1/2): quantize to both cosets and
/// keep the closer, ties to the lexicographically smaller point.
fn quantize_e8(y: &[f64]) -> Vec<f64> {
    let a = quantize_dn(y);
    let shifted: Vec<f64> = y.iter().map(|&x| x - 0.5).collect();
    let mut b = quantize_dn(&shifted);
    for x in &mut b {
        *x += 0.5;
    }
    let da = dist_sq(&a, y);
    let db = dist_sq(&b, y);
    if da < db - TOL || (da < db + TOL && lex_less(&a, &b)) {
        a
    } else {
        b
    }
}

fn enumerate_minimal_vectors(id: LatticeId) -> Result<Vec<LatticePoint>> {
    let mut found = match id {
        // Coefficient-box enumeration. The A2/D4 minimal vectors have basis
        // coefficients within +/-2, so a half-width of 3 has margin. The E8
        // preset basis is poorly conditioned for this (some minimal vectors
        // need coefficients up to +/-6), so E8 roots are constructed
        // directly instead.
        LatticeId::A2 | LatticeId::D4 => enumerate_by_coefficient_box(id, 3),
        LatticeId::E8 => e8_roots(),
    };
    if found.is_empty() {
        return Err(Error::InvalidArgument(
            "minimal vector enumeration produced no vectors".into(),
        ));
    }
    // every claimed vector must really be on the lattice
    let lat = MarkedLattice::standard(id);
    for v in &found {
        for row in 0..lat.n {
            let x: f64 = lat.basis_inv[row * lat.n..(row + 1) * lat.n]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum();
            if (x - x.round()).abs() > TOL {
                return Err(Error::NonIntegralOffset {
                    residual: (x - x.round()).abs(),
                });
            }
        }
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found.into_iter().map(|coords| LatticePoint { coords }).collect())
}

fn enumerate_by_coefficient_box(id: LatticeId, c: i64) -> Vec<Vec<f64>> {
    let lat = MarkedLattice::standard(id);
    let n = lat.n;
    let width = 2 * c + 1;
    let total = (width as u64).pow(n as u32);

    let mut min_sq = f64::MAX;
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut z = vec![-c; n];
    for counter in 0..total {
        if counter > 0 {
            // odometer increment
            for slot in z.iter_mut() {
                *slot += 1;
                if *slot <= c {
                    break;
                }
                *slot = -c;
            }
        }
        if z.iter().all(|&x| x == 0) {
            continue;
        }
        let zf: Vec<f64> = z.iter().map(|&x| x as f64).collect();
        let v = mat::mat_vec(&lat.basis, &zf, n);
        let d = v.iter().map(|&x| x * x).sum::<f64>();
        if d < min_sq - TOL {
            min_sq = d;
            found.clear();
            found.push(v);
        } else if d < min_sq + TOL {
            found.push(v);
        }
    }
    found
}

/// The 240 E8 roots: 112 integer vectors +/-e_i +/-e_j and 128 half-integer
/// vectors (+/-1/2)^8 with an even number of minus signs, all of squared
/// norm 2.
fn e8_roots() -> Vec<Vec<f64>> {
    let mut roots = Vec::with_capacity(240);
    for i in 0..8 {
        for j in i + 1..8 {
            for signs in 0..4 {
                let mut v = vec![0.0; 8];
                v[i] = if signs & 1 == 0 { 1.0 } else { -1.0 };
                v[j] = if signs & 2 == 0 { 1.0 } else { -1.0 };
                roots.push(v);
            }
        }
    }
    for pattern in 0u32..256 {
        if pattern.count_ones() % 2 != 0 {
            continue;
        }
        let v = (0..8)
            .map(|bit| if pattern & (1 << bit) == 0 { 0.5 } else { -0.5 })
            .collect();
        roots.push(v);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_shapes() {
        for id in LatticeId::ALL {
            let lat = MarkedLattice::standard(id);
            assert_eq!(lat.dimension(), id.dimension());
            assert_eq!(lat.basis().len(), id.dimension() * id.dimension());
            assert_eq!(lat.shift().len(), id.dimension());
        }
    }

    #[test]
    fn preset_entries_match_published_values() {
        let a2 = MarkedLattice::standard(LatticeId::A2);
        // columns (1, 0) and (-1/2, sqrt(3)/2)
        assert_eq!(a2.basis()[0], 1.0);
        assert_eq!(a2.basis()[2], 0.0);
        assert_eq!(a2.basis()[1], -0.5);
        assert_eq!(a2.basis()[3], 3f64.sqrt() / 2.0);
        assert_eq!(a2.shift(), &[0.125, 3f64.sqrt() / 8.0]);

        let d4 = MarkedLattice::standard(LatticeId::D4);
        assert_eq!(d4.shift(), &[17.0 / 32.0, 6.0 / 32.0, 0.0, -11.0 / 32.0]);

        let e8 = MarkedLattice::standard(LatticeId::E8);
        // eighth column is (1/2, ..., 1/2)
        for row in 0..8 {
            assert_eq!(e8.basis()[row * 8 + 7], 0.5);
        }
        assert_eq!(e8.shift()[0], 0.645);
        assert_eq!(e8.shift()[1], 0.0484);
    }

    #[test]
    fn kissing_numbers() {
        for id in LatticeId::ALL {
            let lat = MarkedLattice::standard(id);
            assert_eq!(lat.minimal_vectors().len(), id.kissing_number());
        }
    }

    #[test]
    fn e8_minimal_vectors_have_norm_two() {
        let lat = MarkedLattice::standard(LatticeId::E8);
        for v in lat.minimal_vectors() {
            let d: f64 = v.coords.iter().map(|&x| x * x).sum();
            assert!((d - 2.0).abs() < TOL);
        }
    }

    #[test]
    fn quantize_lattice_point_is_fixed() {
        let lat = MarkedLattice::standard(LatticeId::D4);
        let q = lat.quantize_nearest(&[0.0; 4]).unwrap();
        assert_eq!(q.coords, vec![0.0; 4]);
    }

    #[test]
    fn quantize_d4_parity_correction() {
        let lat = MarkedLattice::standard(LatticeId::D4);
        let q = lat.quantize_nearest(&[0.9, 0.1, 0.1, 0.1]).unwrap();
        // the naive rounding (1,0,0,0) has odd sum; the result must be a
        // parity-corrected lattice point at the same minimal distance
        let sum: f64 = q.coords.iter().sum();
        assert_eq!(sum as i64 % 2, 0);
        let d = dist_sq(&q.coords, &[0.9, 0.1, 0.1, 0.1]);
        assert!((d - 0.84).abs() < 1e-12, "distance^2 {d}");
    }

    #[test]
    fn voronoi_reduce_fixed_points() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        assert_eq!(lat.voronoi_reduce(&[0.0, 0.0], 4).unwrap(), vec![0.0, 0.0]);
        // 4 * b1 is in r Lambda, so it reduces to zero
        let p = [4.0, 0.0];
        let t = lat.voronoi_reduce(&p, 4).unwrap();
        assert!(t.iter().all(|&x| x.abs() < TOL), "{t:?}");
    }

    #[test]
    fn label_round_trips() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        assert_eq!(lat.label_of_point(&[0.0, 0.0], 4).unwrap(), vec![0, 0]);
        let c = mat::mat_vec(lat.basis(), &[1.0, 1.0], 2);
        assert_eq!(lat.label_of_point(&c, 4).unwrap(), vec![1, 1]);
        let c = mat::mat_vec(lat.basis(), &[-1.0, 0.0], 2);
        assert_eq!(lat.label_of_point(&c, 4).unwrap(), vec![3, 0]);
    }

    #[test]
    fn label_rejects_off_lattice_points() {
        let lat = MarkedLattice::standard(LatticeId::A2);
        let err = lat.label_of_point(&[0.3, 0.1], 4).unwrap_err();
        assert!(matches!(err, Error::NonLatticePoint { .. }));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let lat = MarkedLattice::standard(LatticeId::D4);
        assert!(matches!(
            lat.quantize_nearest(&[0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
