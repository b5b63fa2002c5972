//! End-to-end Voronoi constellation modem and AWGN error-rate harness.
//!
//! Encoding Gray-maps bit groups to integer coordinates, multiplies by the
//! labeled basis `B U`, and reduces into the shifted `r`-scaled Voronoi
//! region; decoding adds the shift back, quantizes to the nearest lattice
//! point and inverts the label map. The transmitted constellation is
//! normalized to unit average energy per IQ pair, and `Eb/N0` is defined
//! against that normalization.
//!
//! [`run_trials`] splits work into fixed-size batches with one ChaCha stream
//! per batch, so counters are identical for any worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::labeling::{gray_decode, gray_encode};
use crate::lattice::MarkedLattice;
use crate::unimodular::UnimodularElement;
use crate::{Error, Result};

/// Constellations up to this size have their energy averaged exhaustively;
/// larger ones fall back to Monte Carlo with a fixed internal seed.
pub const ENERGY_ENUMERATION_LIMIT: u64 = 1 << 24;

const ENERGY_MC_SAMPLES: u64 = 1 << 20;
const ENERGY_MC_SEED: u64 = 0x564f_524f_4d4f_4431;

/// Hard cap on total bits simulated per [`run_trials`] call.
pub const TRIAL_BIT_CAP: u64 = 1_000_000_000;

const BATCH_POINTS: u64 = 1024;
const BATCHES_PER_ROUND: u64 = 16;

/// Everything needed to move bits through one constellation: lattice, basis
/// change, modulus and the energy normalization factor.
#[derive(Debug, Clone)]
pub struct CodecConfig {
    lattice: MarkedLattice,
    labeled: MarkedLattice,
    u: UnimodularElement,
    /// `U^-1 mod r`, so label extraction is exact integer arithmetic even
    /// when `B U` is ill-conditioned.
    u_inv: Vec<i64>,
    r: u32,
    bits_per_coord: u32,
    bits_per_point: usize,
    scale: f64,
}

impl CodecConfig {
    /// Build a codec. `u` must be genuinely unimodular (determinant +/-1
    /// over the integers); lift search results with
    /// [`UnimodularElement::sl_lift`] first.
    ///
    /// `u` is silently replaced by `u * K` for a kernel element `K` (so the
    /// labeling is untouched) when that keeps the labeled basis numerically
    /// sane; search lifts can otherwise produce bases whose inverses exceed
    /// float precision.
    pub fn new(lattice: &MarkedLattice, u: &UnimodularElement, r: u32) -> Result<Self> {
        if !r.is_power_of_two() || r < 2 {
            return Err(Error::ModulusNotPowerOfTwo(r));
        }
        if u.dimension() != lattice.dimension() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dimension(),
                got: u.dimension(),
            });
        }
        let u = condition_for_basis(lattice, u, r)?;
        let labeled = lattice.sheared(&u)?;
        let u_inv = u.inverse_mod()?.entries().to_vec();
        let energy = average_symbol_energy(lattice, &u, r)?;
        let bits_per_coord = r.trailing_zeros();
        Ok(CodecConfig {
            lattice: lattice.clone(),
            labeled,
            u: u.clone(),
            u_inv,
            r,
            bits_per_coord,
            bits_per_point: lattice.dimension() * bits_per_coord as usize,
            scale: 1.0 / energy.sqrt(),
        })
    }

    pub fn lattice(&self) -> &MarkedLattice {
        &self.lattice
    }

    pub fn unimodular(&self) -> &UnimodularElement {
        &self.u
    }

    pub fn modulus(&self) -> u32 {
        self.r
    }

    pub fn bits_per_point(&self) -> usize {
        self.bits_per_point
    }

    /// Bits carried per IQ pair (two real dimensions).
    pub fn bits_per_pair(&self) -> u32 {
        2 * self.bits_per_coord
    }

    /// Multiplier taking raw constellation coordinates to unit average
    /// energy per IQ pair.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Map one block of bits to a transmitted frame.
    pub fn encode(&self, bits: &[u8]) -> Result<IqFrame> {
        if bits.len() != self.bits_per_point {
            return Err(Error::DimensionMismatch {
                expected: self.bits_per_point,
                got: bits.len(),
            });
        }
        let n = self.lattice.dimension();
        let m = self.bits_per_coord as usize;
        let z: Vec<f64> = bits
            .chunks_exact(m)
            .map(|group| gray_encode(group) as f64)
            .collect();
        let basis = self.labeled.basis();
        let shift = self.lattice.shift();
        let mut c = vec![0.0; n];
        for row in 0..n {
            c[row] = (0..n).map(|col| basis[row * n + col] * z[col]).sum::<f64>() - shift[row];
        }
        let t = self.lattice.voronoi_reduce(&c, self.r)?;
        Ok(IqFrame {
            pairs: t
                .chunks_exact(2)
                .map(|p| (p[0] * self.scale, p[1] * self.scale))
                .collect(),
        })
    }

    /// Recover bits from a received frame. Total: any input decodes to the
    /// nearest constellation point's label.
    pub fn decode(&self, frame: &IqFrame) -> Result<Vec<u8>> {
        let n = self.lattice.dimension();
        if frame.pairs.len() != n / 2 {
            return Err(Error::DimensionMismatch {
                expected: n / 2,
                got: frame.pairs.len(),
            });
        }
        let shift = self.lattice.shift();
        let mut y = Vec::with_capacity(n);
        for (i, &(re, im)) in frame.pairs.iter().enumerate() {
            y.push(re / self.scale + shift[2 * i]);
            y.push(im / self.scale + shift[2 * i + 1]);
        }
        let point = self.lattice.quantize_nearest(&y)?;
        // base-lattice coordinates first (the preset basis inverse is well
        // conditioned), then the exact mod-r inverse of U; rounding without
        // an integrality check keeps the decoder total
        let inv = self.lattice.basis_inverse();
        let r = self.r as i64;
        let mut w = Vec::with_capacity(n);
        for row in 0..n {
            let x: f64 = inv[row * n..(row + 1) * n]
                .iter()
                .zip(&point.coords)
                .map(|(a, b)| a * b)
                .sum();
            w.push(x.round() as i64);
        }
        let mut bits = Vec::with_capacity(self.bits_per_point);
        for row in 0..n {
            let coord: i64 = (0..n).map(|col| self.u_inv[row * n + col] * w[col]).sum();
            bits.extend(gray_decode(coord.rem_euclid(r) as u64, self.bits_per_coord)?);
        }
        Ok(bits)
    }
}

/// Transmitted symbols as consecutive IQ (two-real-coordinate) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub pairs: Vec<(f64, f64)>,
}

/// Replace `u` by `u * K` with `K = I mod r` until the real basis `B u` is
/// size-reduced: column `j` sheds multiples of `r *` column `i` whenever that
/// shortens it. Labels and constellation points are invariant under kernel
/// factors; only float conditioning changes.
fn condition_for_basis(
    lattice: &MarkedLattice,
    u: &UnimodularElement,
    r: u32,
) -> Result<UnimodularElement> {
    let det = u.det()?;
    if det.abs() != 1 {
        return Err(Error::NotUnimodular { det });
    }
    let n = lattice.dimension();
    let basis = lattice.basis();
    let mut entries: Vec<i128> = u.entries().iter().map(|&x| x as i128).collect();
    // real geometry of the labeled basis columns
    let mut g = vec![0.0f64; n * n];
    let refresh = |g: &mut [f64], entries: &[i128]| {
        for row in 0..n {
            for col in 0..n {
                g[row * n + col] = (0..n)
                    .map(|k| basis[row * n + k] * entries[k * n + col] as f64)
                    .sum();
            }
        }
    };
    refresh(&mut g, &entries);
    let rf = r as f64;
    for _sweep in 0..64 {
        let mut changed = false;
        for i in 0..n {
            let norm_i: f64 = (0..n).map(|row| g[row * n + i] * g[row * n + i]).sum();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dot: f64 = (0..n).map(|row| g[row * n + i] * g[row * n + j]).sum();
                let k = (dot / (rf * norm_i)).round();
                if k == 0.0 || !k.is_finite() {
                    continue;
                }
                let ki = k as i128 * r as i128;
                for row in 0..n {
                    let delta = ki
                        .checked_mul(entries[row * n + i])
                        .ok_or(Error::Overflow)?;
                    entries[row * n + j] =
                        entries[row * n + j].checked_sub(delta).ok_or(Error::Overflow)?;
                }
                for row in 0..n {
                    g[row * n + j] -= k * rf * g[row * n + i];
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
        refresh(&mut g, &entries);
    }
    let entries: Vec<i64> = entries
        .into_iter()
        .map(i64::try_from)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Overflow)?;
    UnimodularElement::new(n, r, entries)
}

/// Mean squared norm per IQ pair over the whole (unscaled) constellation.
///
/// Exhaustive when `r^n` is at most [`ENERGY_ENUMERATION_LIMIT`], otherwise a
/// fixed-seed Monte Carlo average over 2^20 uniform labels.
pub fn average_symbol_energy(lat: &MarkedLattice, u: &UnimodularElement, r: u32) -> Result<f64> {
    let n = lat.dimension();
    let points = (r as u128).pow(n as u32);
    if points <= ENERGY_ENUMERATION_LIMIT as u128 {
        let labeled = lat.sheared(u)?;
        let basis = labeled.basis();
        let shift = lat.shift();
        // odometer over labels with incremental basis-column updates
        let mut z = vec![0u32; n];
        let mut c: Vec<f64> = shift.iter().map(|&h| -h).collect();
        let mut sum = 0.0f64;
        let mut comp = 0.0f64; // Kahan correction
        for counter in 0..points as u64 {
            if counter > 0 {
                for slot in 0..n {
                    z[slot] += 1;
                    if z[slot] < r {
                        for row in 0..n {
                            c[row] += basis[row * n + slot];
                        }
                        break;
                    }
                    z[slot] = 0;
                    for row in 0..n {
                        c[row] -= (r - 1) as f64 * basis[row * n + slot];
                    }
                }
            }
            let t = lat.voronoi_reduce(&c, r)?;
            let e: f64 = t.iter().map(|&x| x * x).sum();
            let y = e - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        Ok(sum / points as f64 / (n as f64 / 2.0))
    } else {
        let (mean, _) = average_symbol_energy_sampled(lat, u, r, ENERGY_MC_SAMPLES, ENERGY_MC_SEED)?;
        Ok(mean)
    }
}

/// Monte Carlo estimate of the same mean, with its standard error.
pub fn average_symbol_energy_sampled(
    lat: &MarkedLattice,
    u: &UnimodularElement,
    r: u32,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    assert!(samples > 1);
    let n = lat.dimension();
    let labeled = lat.sheared(u)?;
    let basis = labeled.basis();
    let shift = lat.shift();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..samples {
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(0..r) as f64).collect();
        let mut c = vec![0.0; n];
        for row in 0..n {
            c[row] = (0..n).map(|col| basis[row * n + col] * z[col]).sum::<f64>() - shift[row];
        }
        let t = lat.voronoi_reduce(&c, r)?;
        let e: f64 = t.iter().map(|&x| x * x).sum::<f64>() / (n as f64 / 2.0);
        sum += e;
        sum_sq += e * e;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok((mean, (var / samples as f64).sqrt()))
}

/// Add white Gaussian noise for the given `Eb/N0` (dB). With unit energy per
/// pair, `N0 = 1 / (ebn0 * bits_per_pair)` and each real coordinate gets
/// variance `N0 / 2`.
pub fn awgn<R: Rng>(frame: &IqFrame, ebn0_db: f64, cfg: &CodecConfig, rng: &mut R) -> IqFrame {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let n0 = 1.0 / (ebn0 * cfg.bits_per_pair() as f64);
    let sigma = (n0 / 2.0).sqrt();
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    IqFrame {
        pairs: frame
            .pairs
            .iter()
            .map(|&(re, im)| (re + normal.sample(rng), im + normal.sample(rng)))
            .collect(),
    }
}

/// Accumulated error counts at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelStats {
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub points_sent: u64,
    pub lattice_errors: u64,
}

impl ChannelStats {
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits_sent as f64
    }

    pub fn ler(&self) -> f64 {
        self.lattice_errors as f64 / self.points_sent as f64
    }
}

/// Run encode -> AWGN -> decode trials until at least `min_bits` have been
/// sent *and* `min_errors` bit errors observed (or the 10^9-bit cap).
///
/// Results depend only on `(cfg, ebn0_db, min_bits, min_errors, rng_seed)`;
/// `workers = 0` uses all available cores without changing the outcome.
pub fn run_trials(
    cfg: &CodecConfig,
    ebn0_db: f64,
    min_bits: u64,
    min_errors: u64,
    rng_seed: u64,
    workers: usize,
) -> Result<ChannelStats> {
    if min_bits < cfg.bits_per_point as u64 {
        return Err(Error::InvalidArgument(format!(
            "min_bits {min_bits} is below one point ({} bits)",
            cfg.bits_per_point
        )));
    }
    let workers = if workers == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        workers
    };

    let mut totals = ChannelStats {
        bits_sent: 0,
        bit_errors: 0,
        points_sent: 0,
        lattice_errors: 0,
    };
    let mut next_batch = 0u64;
    loop {
        let round: Vec<u64> = (next_batch..next_batch + BATCHES_PER_ROUND).collect();
        next_batch += BATCHES_PER_ROUND;
        let mut results = vec![
            ChannelStats {
                bits_sent: 0,
                bit_errors: 0,
                points_sent: 0,
                lattice_errors: 0,
            };
            round.len()
        ];
        std::thread::scope(|scope| {
            let round = &round[..];
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        let mut local = Vec::new();
                        let mut idx = w;
                        while idx < round.len() {
                            local.push((idx, run_batch(cfg, ebn0_db, rng_seed, round[idx])));
                            idx += workers;
                        }
                        local
                    })
                })
                .collect();
            for handle in handles {
                for (idx, stats) in handle.join().expect("worker panicked") {
                    results[idx] = stats;
                }
            }
        });
        for stats in results {
            totals.bits_sent += stats.bits_sent;
            totals.bit_errors += stats.bit_errors;
            totals.points_sent += stats.points_sent;
            totals.lattice_errors += stats.lattice_errors;
        }
        let done = totals.bits_sent >= min_bits && totals.bit_errors >= min_errors;
        if done || totals.bits_sent >= TRIAL_BIT_CAP {
            break;
        }
    }
    Ok(totals)
}

fn run_batch(cfg: &CodecConfig, ebn0_db: f64, rng_seed: u64, batch: u64) -> ChannelStats {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(batch.wrapping_add(1));
    let bpp = cfg.bits_per_point;
    let mut stats = ChannelStats {
        bits_sent: 0,
        bit_errors: 0,
        points_sent: 0,
        lattice_errors: 0,
    };
    let mut bits = vec![0u8; bpp];
    for _ in 0..BATCH_POINTS {
        for b in bits.iter_mut() {
            *b = rng.random_range(0..=1u8);
        }
        let frame = cfg.encode(&bits).expect("bit block has codec width");
        let noisy = awgn(&frame, ebn0_db, cfg, &mut rng);
        let decoded = cfg.decode(&noisy).expect("decoder is total");
        let errs = bits
            .iter()
            .zip(&decoded)
            .filter(|(a, b)| a != b)
            .count() as u64;
        stats.bits_sent += bpp as u64;
        stats.bit_errors += errs;
        stats.points_sent += 1;
        stats.lattice_errors += u64::from(errs > 0);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeId;

    fn d4_identity_codec() -> CodecConfig {
        let lat = MarkedLattice::standard(LatticeId::D4);
        let u = UnimodularElement::identity(4, 4);
        CodecConfig::new(&lat, &u, 4).unwrap()
    }

    #[test]
    fn encode_zero_bits_is_reduced_negative_shift() {
        let cfg = d4_identity_codec();
        let frame = cfg.encode(&[0; 8]).unwrap();
        let lat = MarkedLattice::standard(LatticeId::D4);
        let minus_h: Vec<f64> = lat.shift().iter().map(|&h| -h).collect();
        let want = lat.voronoi_reduce(&minus_h, 4).unwrap();
        let got: Vec<f64> = frame.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w * cfg.scale()).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_all_d4_labels() {
        let cfg = d4_identity_codec();
        for value in 0u32..256 {
            let bits: Vec<u8> = (0..8).rev().map(|b| ((value >> b) & 1) as u8).collect();
            let frame = cfg.encode(&bits).unwrap();
            assert_eq!(cfg.decode(&frame).unwrap(), bits, "label {value}");
        }
    }

    #[test]
    fn encode_rejects_wrong_width() {
        let cfg = d4_identity_codec();
        assert!(matches!(
            cfg.encode(&[0; 7]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scaled_constellation_has_unit_pair_energy() {
        let cfg = d4_identity_codec();
        let mut total = 0.0;
        for value in 0u32..256 {
            let bits: Vec<u8> = (0..8).rev().map(|b| ((value >> b) & 1) as u8).collect();
            let frame = cfg.encode(&bits).unwrap();
            total += frame
                .pairs
                .iter()
                .map(|&(a, b)| a * a + b * b)
                .sum::<f64>()
                / frame.pairs.len() as f64;
        }
        assert!((total / 256.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn noise_vanishes_at_extreme_snr() {
        let cfg = d4_identity_codec();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let bits: Vec<u8> = (0..8).map(|_| rng.random_range(0..=1)).collect();
            let frame = cfg.encode(&bits).unwrap();
            let noisy = awgn(&frame, 200.0, &cfg, &mut rng);
            assert_eq!(cfg.decode(&noisy).unwrap(), bits);
        }
    }

    #[test]
    fn noise_moments_match_target() {
        let cfg = d4_identity_codec();
        let zero = IqFrame {
            pairs: vec![(0.0, 0.0); 2],
        };
        let ebn0_db = 3.0;
        let ebn0 = 10f64.powf(0.3);
        let n0 = 1.0 / (ebn0 * 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut samples = Vec::with_capacity(1_000_000);
        while samples.len() < 1_000_000 {
            let noisy = awgn(&zero, ebn0_db, &cfg, &mut rng);
            for (a, b) in noisy.pairs {
                samples.push(a);
                samples.push(b);
            }
        }
        let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
        let var: f64 = samples.iter().map(|&x| x * x).sum::<f64>() / samples.len() as f64;
        assert!(mean.abs() < 3.0 * (n0 / 2.0 / samples.len() as f64).sqrt() * 3.0);
        assert!((var / (n0 / 2.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn trials_with_zero_noise_have_no_errors() {
        let cfg = d4_identity_codec();
        let stats = run_trials(&cfg, 200.0, 20_000, 0, 42, 2).unwrap();
        assert_eq!(stats.bit_errors, 0);
        assert_eq!(stats.lattice_errors, 0);
        assert!(stats.bits_sent >= 20_000);
    }

    #[test]
    fn trials_are_worker_count_invariant() {
        let cfg = d4_identity_codec();
        let a = run_trials(&cfg, 6.0, 100_000, 50, 7, 1).unwrap();
        let b = run_trials(&cfg, 6.0, 100_000, 50, 7, 3).unwrap();
        assert_eq!(a, b);
    }
}
