//! The finite labeling group `G_n(r)`: integer matrices with unit
//! determinant, considered modulo `r`.
//!
//! Two bases label a constellation identically exactly when their unimodular
//! factors agree entrywise modulo `r`, so group elements compare through
//! their canonical (mod-`r`) form. Elements constructed from raw integer
//! matrices must have determinant +/-1 over the integers; elements produced
//! by group arithmetic keep canonical entries and can be lifted back to a
//! determinant-one integer matrix with [`UnimodularElement::sl_lift`].

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;

use crate::mat;
use crate::{Error, Result};

/// Hard cap on exhaustive group enumeration.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// An `n x n` integer matrix interpreted as an element of `G_n(r)`.
#[derive(Debug, Clone)]
pub struct UnimodularElement {
    n: usize,
    modulus: u32,
    entries: Vec<i64>,
}

impl UnimodularElement {
    /// Wrap a raw integer matrix. The determinant must be exactly +/-1.
    pub fn new(n: usize, modulus: u32, entries: Vec<i64>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::BadModulus(modulus));
        }
        if entries.len() != n * n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        let det = mat::int_det(&entries, n)?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(UnimodularElement {
            n,
            modulus,
            entries,
        })
    }

    pub fn identity(n: usize, modulus: u32) -> Self {
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        UnimodularElement {
            n,
            modulus,
            entries,
        }
    }

    /// Wrap mod-`r` residues produced by group arithmetic. The determinant
    /// must be a unit congruent to +/-1 modulo `r`.
    pub(crate) fn from_residues(n: usize, modulus: u32, entries: Vec<i64>) -> Result<Self> {
        let entries: Vec<i64> = entries
            .iter()
            .map(|&x| x.rem_euclid(modulus as i64))
            .collect();
        let det = mat::int_det(&entries, n)?;
        let dm = det.rem_euclid(modulus as i128);
        if dm != 1 && dm != (modulus as i128) - 1 {
            return Err(Error::NotInvertibleModR {
                det,
                modulus,
            });
        }
        Ok(UnimodularElement {
            n,
            modulus,
            entries,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Row-major entries as stored (not necessarily reduced).
    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Exact integer determinant.
    pub fn det(&self) -> Result<i128> {
        mat::int_det(&self.entries, self.n)
    }

    /// The canonical coset representative: entries reduced into `{0..r-1}`.
    ///
    /// Two elements act as the same labeling exactly when their canonical
    /// forms are entrywise equal.
    pub fn canonicalize(&self) -> UnimodularElement {
        let r = self.modulus as i64;
        UnimodularElement {
            n: self.n,
            modulus: self.modulus,
            entries: self.entries.iter().map(|&x| x.rem_euclid(r)).collect(),
        }
    }

    /// Whether `self` and `other` are the same element of `G_n(r)`.
    pub fn same_labeling(&self, other: &UnimodularElement) -> bool {
        self.n == other.n
            && self.modulus == other.modulus
            && self.canonicalize().entries == other.canonicalize().entries
    }

    /// Exact integer matrix product (no reduction).
    pub fn mul(&self, other: &UnimodularElement) -> Result<UnimodularElement> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let n = self.n;
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k] as i128;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let add = a
                        .checked_mul(other.entries[k * n + j] as i128)
                        .ok_or(Error::Overflow)?;
                    let sum = (entries[i * n + j] as i128)
                        .checked_add(add)
                        .ok_or(Error::Overflow)?;
                    entries[i * n + j] = i64::try_from(sum).map_err(|_| Error::Overflow)?;
                }
            }
        }
        Ok(UnimodularElement {
            n,
            modulus: self.modulus,
            entries,
        })
    }

    /// Product reduced to canonical form.
    pub fn mul_mod(&self, other: &UnimodularElement) -> Result<UnimodularElement> {
        let n = self.n;
        if n != other.n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: other.n,
            });
        }
        let r = self.modulus as i64;
        let a = self.canonicalize();
        let b = other.canonicalize();
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a.entries[i * n + k];
                if aik == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] =
                        (entries[i * n + j] + aik * b.entries[k * n + j]).rem_euclid(r);
                }
            }
        }
        Ok(UnimodularElement {
            n,
            modulus: self.modulus,
            entries,
        })
    }

    /// The inverse in `G_n(r)`: adjugate times the modular inverse of the
    /// determinant, entries canonical.
    pub fn inverse_mod(&self) -> Result<UnimodularElement> {
        let n = self.n;
        let r = self.modulus as i128;
        let det = self.det()?;
        let det_inv = mod_inverse(det.rem_euclid(r), r).ok_or(Error::NotInvertibleModR {
            det,
            modulus: self.modulus,
        })?;
        let adj = mat::int_adjugate(&self.entries, n)?;
        let entries: Vec<i64> = adj
            .iter()
            .map(|&x| ((x.rem_euclid(r) * det_inv).rem_euclid(r)) as i64)
            .collect();
        Ok(UnimodularElement {
            n,
            modulus: self.modulus,
            entries,
        })
    }

    /// Right-multiply by the shear `I + k E_{ij}` and reduce: column `j`
    /// gains `k` times column `i`.
    pub(crate) fn apply_shear_right(&self, i: usize, j: usize, k: u32) -> UnimodularElement {
        let n = self.n;
        let r = self.modulus as i64;
        let mut entries = self.canonicalize().entries;
        for row in 0..n {
            entries[row * n + j] =
                (entries[row * n + j] + k as i64 * entries[row * n + i]).rem_euclid(r);
        }
        UnimodularElement {
            n,
            modulus: self.modulus,
            entries,
        }
    }

    /// An integer matrix congruent to `self` modulo `r` whose determinant is
    /// exactly +/-1, suitable for building a real basis.
    ///
    /// Canonical representatives usually have large determinants; this
    /// reconstructs a true unimodular lift by integer row/column reduction
    /// modulo `r`, then size-reduces the result with kernel column
    /// operations so the entries stay small.
    pub fn sl_lift(&self) -> Result<UnimodularElement> {
        let n = self.n;
        let r = self.modulus as i128;
        let mut state = LiftState {
            n,
            r,
            m: self
                .canonicalize()
                .entries
                .iter()
                .map(|&x| x as i128)
                .collect(),
            pinv: identity_i128(n),
            qinv: identity_i128(n),
        };

        for d in 0..n {
            if d + 1 < n {
                // collect the gcd of column d (rows d..n) at the pivot
                loop {
                    let mut progressed = false;
                    for q in d + 1..n {
                        if state.m[q * n + d] == 0 {
                            continue;
                        }
                        if state.m[d * n + d] == 0 {
                            state.row_op(d, q, 1, d)?;
                        }
                        let t = state.m[q * n + d].div_euclid(state.m[d * n + d]);
                        state.row_op(q, d, -t, d)?;
                        if state.m[q * n + d] != 0 {
                            let t2 = state.m[d * n + d].div_euclid(state.m[q * n + d]);
                            state.row_op(d, q, -t2, d)?;
                        }
                        progressed = true;
                    }
                    if !progressed || (d + 1..n).all(|q| state.m[q * n + d] == 0) {
                        break;
                    }
                }
                // Euclid against r itself forces the pivot to exactly 1; the
                // extra r on the row below is absorbed by the congruence.
                let aux = d + 1;
                state.m[aux * n + d] += r;
                while state.m[aux * n + d] != 0 {
                    let t = state.m[d * n + d].div_euclid(state.m[aux * n + d]);
                    if t != 0 {
                        state.row_op(d, aux, -t, d)?;
                    }
                    if state.m[d * n + d] == 0 {
                        state.row_op(d, aux, 1, d)?;
                    }
                    if state.m[aux * n + d] != 0 {
                        let t2 = state.m[aux * n + d].div_euclid(state.m[d * n + d]);
                        state.row_op(aux, d, -t2, d)?;
                    }
                }
                if state.m[d * n + d] != 1 {
                    return Err(Error::NotInvertibleModR {
                        det: state.m[d * n + d],
                        modulus: self.modulus,
                    });
                }
            } else {
                // last pivot: with unit determinant and every earlier pivot
                // 1, it must be congruent to +/-1
                let g = state.m[d * n + d].rem_euclid(r);
                if g == 1 || (g == r - 1 && r > 2) {
                    state.m[d * n + d] = if g == 1 { 1 } else { -1 };
                } else {
                    return Err(Error::NotInvertibleModR {
                        det: state.m[d * n + d],
                        modulus: self.modulus,
                    });
                }
            }
            let pivot = state.m[d * n + d];
            for q in d + 1..n {
                let t = state.m[q * n + d];
                if t != 0 {
                    state.row_op(q, d, -t * pivot, d)?;
                }
            }
            for c in d + 1..n {
                let t = state.m[d * n + c];
                if t != 0 {
                    state.col_op(c, d, -t * pivot, d)?;
                }
            }
        }

        // m is now diag(1, .., 1, +/-1); fold the sign into qinv
        if state.m[n * n - 1] == -1 {
            for c in 0..n {
                state.qinv[(n - 1) * n + c] = -state.qinv[(n - 1) * n + c];
            }
        }
        let mut wide = vec![0i128; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s: i128 = 0;
                for k in 0..n {
                    s = s
                        .checked_add(
                            state.pinv[i * n + k]
                                .checked_mul(state.qinv[k * n + j])
                                .ok_or(Error::Overflow)?,
                        )
                        .ok_or(Error::Overflow)?;
                }
                wide[i * n + j] = s;
            }
        }
        size_reduce_columns(&mut wide, n, r)?;
        let mut entries = vec![0i64; n * n];
        for (dst, &src) in entries.iter_mut().zip(&wide) {
            *dst = i64::try_from(src).map_err(|_| Error::Overflow)?;
        }
        let lift = UnimodularElement {
            n,
            modulus: self.modulus,
            entries,
        };
        if !lift.same_labeling(self) || lift.det()?.abs() != 1 {
            return Err(Error::InvalidArgument(
                "internal error: unimodular lift failed verification".into(),
            ));
        }
        Ok(lift)
    }
}

fn identity_i128(n: usize) -> Vec<i128> {
    let mut m = vec![0i128; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

/// Working state of [`UnimodularElement::sl_lift`]: the matrix being reduced
/// and the accumulated inverses of the shear operations, so the lift is
/// `pinv * D * qinv`. Entries of `m` only matter modulo `r`, so every
/// operation reduces the touched row/column back into `[0, r)` — except the
/// active pivot column, whose exact integer values drive the Euclid loops.
struct LiftState {
    n: usize,
    r: i128,
    m: Vec<i128>,
    pinv: Vec<i128>,
    qinv: Vec<i128>,
}

impl LiftState {
    /// `row_dst += t * row_src`; records `pinv <- pinv * (I - t E_{dst,src})`.
    fn row_op(&mut self, dst: usize, src: usize, t: i128, pivot_col: usize) -> Result<()> {
        let n = self.n;
        for c in 0..n {
            let v = self.m[dst * n + c] + t.checked_mul(self.m[src * n + c]).ok_or(Error::Overflow)?;
            self.m[dst * n + c] = if c == pivot_col { v } else { v.rem_euclid(self.r) };
        }
        for row in 0..n {
            let delta = t
                .checked_mul(self.pinv[row * n + dst])
                .ok_or(Error::Overflow)?;
            self.pinv[row * n + src] = self.pinv[row * n + src]
                .checked_sub(delta)
                .ok_or(Error::Overflow)?;
        }
        Ok(())
    }

    /// `col_dst += t * col_src`; records `qinv <- (I - t E_{src,dst}) * qinv`.
    fn col_op(&mut self, dst: usize, src: usize, t: i128, pivot_col: usize) -> Result<()> {
        let n = self.n;
        for row in 0..n {
            let v =
                self.m[row * n + dst] + t.checked_mul(self.m[row * n + src]).ok_or(Error::Overflow)?;
            self.m[row * n + dst] = if dst == pivot_col { v } else { v.rem_euclid(self.r) };
        }
        for c in 0..n {
            let delta = t
                .checked_mul(self.qinv[dst * n + c])
                .ok_or(Error::Overflow)?;
            self.qinv[src * n + c] = self.qinv[src * n + c]
                .checked_sub(delta)
                .ok_or(Error::Overflow)?;
        }
        Ok(())
    }
}

/// Shrink a lift's entries with kernel column operations
/// (`col_j -= k r col_i`, determinant and mod-`r` class preserved): standard
/// size reduction against the `r`-scaled columns, iterated to a fixed point.
fn size_reduce_columns(m: &mut [i128], n: usize, r: i128) -> Result<()> {
    loop {
        let mut changed = false;
        for i in 0..n {
            let norm_i: i128 = (0..n)
                .map(|row| m[row * n + i] * m[row * n + i])
                .sum();
            if norm_i == 0 {
                continue;
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dot: i128 = (0..n).map(|row| m[row * n + i] * m[row * n + j]).sum();
                // k = round(dot / (r * norm_i)), halves toward +inf
                let den = r * norm_i;
                let k = (2 * dot + den).div_euclid(2 * den);
                if k == 0 {
                    continue;
                }
                for row in 0..n {
                    let delta = k
                        .checked_mul(r)
                        .and_then(|kr| kr.checked_mul(m[row * n + i]))
                        .ok_or(Error::Overflow)?;
                    m[row * n + j] = m[row * n + j].checked_sub(delta).ok_or(Error::Overflow)?;
                }
                changed = true;
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r == 1 {
        Some(old_s.rem_euclid(m))
    } else {
        None
    }
}

/// The shear generating set of `G_n(r)`: all `I + E_{ij}` with `i != j`,
/// ordered lexicographically by `(i, j)`. There are `n(n-1)` of them
/// (12 for n = 4, 56 for n = 8).
pub fn shear_generators(n: usize, modulus: u32) -> Vec<UnimodularElement> {
    let mut gens = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut entries = UnimodularElement::identity(n, modulus).entries;
            entries[i * n + j] = 1;
            gens.push(UnimodularElement {
                n,
                modulus,
                entries,
            });
        }
    }
    gens
}

/// Row/column index pair of the `idx`-th shear generator.
pub(crate) fn shear_position(n: usize, idx: usize) -> (usize, usize) {
    let i = idx / (n - 1);
    let rem = idx % (n - 1);
    let j = if rem < i { rem } else { rem + 1 };
    (i, j)
}

/// `|G_n(r)| = r^(n^2-1) * prod_p (1 - p^-2)(1 - p^-3)...(1 - p^-n)` over the
/// distinct primes `p` dividing `r`, evaluated exactly.
pub fn group_order(n: usize, r: u32) -> BigUint {
    assert!(n >= 2 && r >= 2);
    let mut order = BigUint::from(r).pow((n * n - 1) as u32);
    for p in unique_primes(r) {
        let p = BigUint::from(p);
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for i in 2..=n as u32 {
            num *= p.pow(i) - 1u32;
            den *= p.pow(i);
        }
        let scaled = order * num;
        debug_assert!((&scaled % &den) == BigUint::from(0u32));
        order = scaled / den;
    }
    order
}

fn unique_primes(mut r: u32) -> Vec<u32> {
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= r {
        if r % p == 0 {
            primes.push(p);
            while r % p == 0 {
                r /= p;
            }
        }
        p += 1;
    }
    if r > 1 {
        primes.push(r);
    }
    primes
}

/// Breadth-first closure of the shear generators: every element of `G_n(r)`,
/// in lexicographic order of canonical entries.
///
/// Guarded: fails if `|G_n(r)|` exceeds [`ENUMERATION_LIMIT`].
pub fn enumerate_group(n: usize, r: u32) -> Result<Vec<UnimodularElement>> {
    let order = group_order(n, r);
    if order > BigUint::from(ENUMERATION_LIMIT) {
        return Err(Error::GroupTooLarge {
            order: order.to_string(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let gen_count = n * (n - 1);
    let identity = UnimodularElement::identity(n, r);
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.entries.clone());
    queue.push_back(identity);
    let mut elements = Vec::new();
    while let Some(u) = queue.pop_front() {
        for idx in 0..gen_count {
            let (i, j) = shear_position(n, idx);
            let next = u.apply_shear_right(i, j, 1);
            if seen.insert(next.entries.clone()) {
                queue.push_back(next.clone());
            }
        }
        elements.push(u);
    }
    elements.sort_by(|a, b| a.entries.cmp(&b.entries));
    Ok(elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        assert_eq!(shear_generators(2, 4).len(), 2);
        assert_eq!(shear_generators(4, 4).len(), 12);
        assert_eq!(shear_generators(8, 2).len(), 56);
    }

    #[test]
    fn shear_positions_are_lexicographic() {
        let n = 4;
        let mut expected = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    expected.push((i, j));
                }
            }
        }
        let got: Vec<_> = (0..n * (n - 1)).map(|idx| shear_position(n, idx)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn group_orders_match_known_values() {
        assert_eq!(group_order(2, 2), BigUint::from(6u32));
        assert_eq!(group_order(2, 4), BigUint::from(48u32));
        assert_eq!(group_order(2, 8), BigUint::from(384u32));
        assert_eq!(group_order(4, 2), BigUint::from(20160u32));
    }

    #[test]
    fn canonicalize_reduces_into_residues() {
        let id = UnimodularElement::identity(2, 4);
        assert_eq!(id.canonicalize().entries(), id.entries());

        // I + 4 E_12 is in the kernel at r = 4
        let u = UnimodularElement::new(2, 4, vec![1, 4, 0, 1]).unwrap();
        assert!(u.same_labeling(&id));

        // right-multiplying by a kernel element does not change the class
        let v = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
        let w = v.mul(&u).unwrap();
        assert!(v.same_labeling(&w));
    }

    #[test]
    fn constructor_rejects_non_unimodular() {
        let err = UnimodularElement::new(2, 4, vec![2, 0, 0, 2]).unwrap_err();
        assert!(matches!(err, crate::Error::NotUnimodular { det: 4 }));
    }

    #[test]
    fn products_of_generators_keep_unit_determinant() {
        let gens = shear_generators(4, 4);
        let mut u = UnimodularElement::identity(4, 4);
        for (step, g) in gens.iter().cycle().take(20).enumerate() {
            u = u.mul(g).unwrap();
            assert_eq!(u.det().unwrap().abs(), 1, "step {step}");
        }
    }

    #[test]
    fn inverse_mod_is_a_group_inverse() {
        let u = UnimodularElement::new(2, 4, vec![2, 3, 1, 2]).unwrap();
        let inv = u.inverse_mod().unwrap();
        let prod = u.mul_mod(&inv).unwrap();
        assert!(prod.same_labeling(&UnimodularElement::identity(2, 4)));
    }

    #[test]
    fn enumerate_small_groups() {
        assert_eq!(enumerate_group(2, 2).unwrap().len(), 6);
        assert_eq!(enumerate_group(2, 4).unwrap().len(), 48);
    }

    #[test]
    fn enumerate_guard_trips() {
        let err = enumerate_group(4, 4).unwrap_err();
        assert!(matches!(err, crate::Error::GroupTooLarge { .. }));
    }

    #[test]
    fn sl_lift_restores_unit_determinant() {
        // walk to an element whose canonical form has a large determinant
        let mut u = UnimodularElement::identity(2, 4);
        for (idx, k) in [(0usize, 1u32), (1, 1), (0, 3), (1, 2), (0, 2), (1, 3)] {
            let (i, j) = shear_position(2, idx);
            u = u.apply_shear_right(i, j, k);
        }
        let lift = u.sl_lift().unwrap();
        assert_eq!(lift.det().unwrap().abs(), 1);
        assert!(lift.same_labeling(&u));
    }
}
