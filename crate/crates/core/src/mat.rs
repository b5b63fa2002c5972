//! Small dense matrix helpers shared by the lattice and group code.
//!
//! Everything here works on row-major `n x n` slices. Dimensions are 2, 4 or
//! 8 in practice, so simple O(n^3) routines are plenty.

use crate::{Error, Result};

/// y = M v for a row-major n x n matrix.
pub fn mat_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, row) in m.chunks_exact(n).enumerate() {
        out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// C = A B for row-major n x n matrices.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn invert(m: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col].abs() < 1e-12 {
            return Err(Error::InvalidArgument("singular matrix".into()));
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
                inv.swap(col * n + j, pivot * n + j);
            }
        }
        let d = a[col * n + col];
        for j in 0..n {
            a[col * n + j] /= d;
            inv[col * n + j] /= d;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[row * n + j] -= f * a[col * n + j];
                inv[row * n + j] -= f * inv[col * n + j];
            }
        }
    }
    Ok(inv)
}

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
pub fn int_det(m: &[i64], n: usize) -> Result<i128> {
    let mut a: Vec<i128> = m.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k * n + k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i * n + k] != 0);
            match swap {
                Some(i) => {
                    for j in 0..n {
                        a.swap(k * n + j, i * n + j);
                    }
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k * n + k]
                    .checked_mul(a[i * n + j])
                    .and_then(|x| a[i * n + k].checked_mul(a[k * n + j]).map(|y| (x, y)))
                    .and_then(|(x, y)| x.checked_sub(y))
                    .ok_or(Error::Overflow)?;
                a[i * n + j] = num / prev;
            }
            a[i * n + k] = 0;
        }
        prev = a[k * n + k];
    }
    Ok(sign * a[n * n - 1])
}

/// Exact adjugate of an integer matrix: adj(M)[i][j] = (-1)^{i+j} det(M with
/// row j and column i removed), so M * adj(M) = det(M) * I.
pub fn int_adjugate(m: &[i64], n: usize) -> Result<Vec<i128>> {
    if n == 1 {
        return Ok(vec![1]);
    }
    let mut adj = vec![0i128; n * n];
    let mut minor = vec![0i64; (n - 1) * (n - 1)];
    for i in 0..n {
        for j in 0..n {
            let mut idx = 0;
            for r in 0..n {
                if r == j {
                    continue;
                }
                for c in 0..n {
                    if c == i {
                        continue;
                    }
                    minor[idx] = m[r * n + c];
                    idx += 1;
                }
            }
            let d = int_det(&minor, n - 1)?;
            adj[i * n + j] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_round_trip() {
        let m = [1.0, -0.5, 0.0, 3f64.sqrt() / 2.0];
        let inv = invert(&m, 2).unwrap();
        let prod = mat_mul(&m, &inv, 2);
        for (i, &x) in prod.iter().enumerate() {
            let want = if i % 3 == 0 { 1.0 } else { 0.0 };
            assert!((x - want).abs() < 1e-12);
        }
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = [2, -1, 3, 0, 5, 1, -2, 4, 7];
        // expansion along the first row: 2*(35-4) +1*(0+2) +3*(0+10)
        assert_eq!(int_det(&m, 3).unwrap(), 2 * 31 + 2 + 30);
    }

    #[test]
    fn adjugate_identity() {
        let m = [3, 1, 0, -2, 1, 4, 5, 0, 1];
        let d = int_det(&m, 3).unwrap();
        let adj = int_adjugate(&m, 3).unwrap();
        // M * adj = det * I
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0i128;
                for k in 0..3 {
                    s += m[i * 3 + k] as i128 * adj[k * 3 + j];
                }
                assert_eq!(s, if i == j { d } else { 0 });
            }
        }
    }
}
