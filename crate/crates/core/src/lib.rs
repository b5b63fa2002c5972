//! Lattice-coded modulation over the A2, D4 and E8 root lattices.
//!
//! The crate builds self-similar Voronoi constellations (a lattice shaped by
//! an `r`-scaled copy of itself), relabels them with unimodular basis changes,
//! scores labelings by Hamming density (average bit differences between
//! nearest neighbors), searches the finite labeling group for good and bad
//! labelings, and measures the effect on bit error rate over an AWGN channel.
//!
//! Modules:
//! - [`lattice`]: standard bases, shift vectors, minimal vectors, exact
//!   nearest-point quantizers and Voronoi-region reduction.
//! - [`labeling`]: Gray mapping, neighbor offset sets, the Hamming-density
//!   metric, its greedy lower bound and a brute-force verification oracle.
//! - [`unimodular`]: the finite labeling group `G_n(r)`, shear generators,
//!   group order, exhaustive enumeration and lifting back to determinant-one
//!   integer matrices.
//! - [`search`]: Hamming descent/ascent over the Cayley graph of `G_n(r)`,
//!   seed generation and the published best-labeling presets.
//! - [`modem`]: the encoder/decoder chain, energy normalization, the AWGN
//!   channel and a deterministic parallel error-rate harness.

pub mod labeling;
pub mod lattice;
mod mat;
pub mod modem;
pub mod search;
pub mod unimodular;

pub use labeling::{HammingDensity, NeighborOffsetSet};
pub use lattice::{LatticeId, MarkedLattice};
pub use modem::{ChannelStats, CodecConfig, IqFrame};
pub use search::{DescentResult, DescentStep};
pub use unimodular::UnimodularElement;

/// Errors reported by lattice, labeling, group and modem operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("modulus {0} is not a power of two")]
    ModulusNotPowerOfTwo(u32),
    #[error("matrix is not unimodular: |det| = {det}, expected 1")]
    NotUnimodular { det: i128 },
    #[error("matrix is not invertible modulo {modulus} (det = {det})")]
    NotInvertibleModR { det: i128, modulus: u32 },
    #[error("point is not on the lattice: residual {residual:.3e} exceeds tolerance")]
    NonLatticePoint { residual: f64 },
    #[error("minimal-vector preimage is not integral: residual {residual:.3e}")]
    NonIntegralOffset { residual: f64 },
    #[error("value {value} out of range for {bits}-bit decode")]
    ValueOutOfRange { value: u64, bits: u32 },
    #[error("group order {order} exceeds enumeration guard {limit}")]
    GroupTooLarge { order: String, limit: u64 },
    #[error("constellation with r^n = {points} exceeds oracle guard {limit}")]
    OracleTooLarge { points: String, limit: u64 },
    #[error("kissing number {kissing} exceeds label capacity {capacity} in dimension {dimension}")]
    KissingCapacityExceeded {
        kissing: u64,
        capacity: u64,
        dimension: usize,
    },
    #[error("no published labeling preset for {lattice} with r = {r}")]
    UnsupportedPreset { lattice: String, r: u32 },
    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
