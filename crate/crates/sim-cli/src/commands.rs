//! Implementations of the CLI subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use num_bigint::BigUint;

use voromod::labeling::{
    hamming_density, neighbor_offsets_sheared, neighbor_offsets_standard, theoretical_hd_bound,
};
use voromod::lattice::{LatticeId, MarkedLattice};
use voromod::modem::{run_trials, ChannelStats, CodecConfig};
use voromod::search::{
    hamming_ascent, hamming_descent, preset_best_unimodular, random_seed_unimodulars,
};
use voromod::unimodular::{enumerate_group, group_order, ENUMERATION_LIMIT};
use voromod::{HammingDensity, UnimodularElement};

use crate::matrix_io;
use crate::plot;
use crate::{usage, CliError, CliResult};

fn parse_lattice(name: &str) -> Result<LatticeId, CliError> {
    name.parse().map_err(|err| usage(format!("{err}")))
}

fn check_modulus(r: u32) -> CliResult {
    if matches!(r, 2 | 4 | 8) {
        Ok(())
    } else {
        Err(usage(format!("unsupported modulus {r} (expected 2, 4 or 8)")))
    }
}

/// `identity`, `preset-best`, inline rows (`"2 3; 1 2"`) or a file path.
fn resolve_unimodular(spec: &str, id: LatticeId, r: u32) -> Result<UnimodularElement, CliError> {
    let n = id.dimension();
    match spec {
        "identity" => Ok(UnimodularElement::identity(n, r)),
        "preset-best" | "best" => {
            preset_best_unimodular(id, r).map_err(|err| usage(format!("{err}")))
        }
        other if other.contains(';') => matrix_io::parse_inline(other, n, r),
        other => matrix_io::read_matrix_file(Path::new(other), n, r),
    }
}

/// Relative outputs land under `$VOROMOD_OUT_DIR` when set.
fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os("VOROMOD_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn fraction(hd: &HammingDensity) -> String {
    format!(
        "{}/{} = {:.4}",
        hd.total_bit_diffs,
        hd.neighbor_count,
        hd.value()
    )
}

#[derive(Args)]
pub struct HdArgs {
    /// Lattice: a2, d4 or e8
    #[arg(long)]
    lattice: String,
    /// Modulus (2, 4 or 8)
    #[arg(long)]
    r: u32,
    /// Labeling matrix: identity, preset-best, a file path or inline rows
    #[arg(long, default_value = "identity")]
    u: String,
}

pub fn run_hd(args: HdArgs) -> CliResult {
    let id = parse_lattice(&args.lattice)?;
    check_modulus(args.r)?;
    let u = resolve_unimodular(&args.u, id, args.r)?;
    let lat = MarkedLattice::standard(id);
    let rs = neighbor_offsets_standard(&lat, args.r).map_err(|err| usage(format!("{err}")))?;
    let ru = neighbor_offsets_sheared(&rs, &u).map_err(|err| usage(format!("{err}")))?;
    let hd = hamming_density(&ru).map_err(|err| usage(format!("{err}")))?;
    let bound = theoretical_hd_bound(lat.dimension(), id.kissing_number() as u64)
        .map_err(|err| usage(format!("{err}")))?;

    println!("lattice {id}, r = {}", args.r);
    println!("HD = {}", fraction(&hd));
    println!("theoretical bound = {}", fraction(&bound.hd));
    println!("neighbor offsets ({}):", ru.len());
    let mut lines: Vec<String> = ru
        .offsets()
        .iter()
        .map(|d| {
            let cells: Vec<String> = d.iter().map(u32::to_string).collect();
            format!("  ({})", cells.join(", "))
        })
        .collect();
    lines.sort();
    for line in lines {
        println!("{line}");
    }
    Ok(())
}

#[derive(Args)]
pub struct DescentArgs {
    /// Lattice: a2, d4 or e8
    #[arg(long)]
    lattice: String,
    /// Modulus (2, 4 or 8)
    #[arg(long)]
    r: u32,
    /// Number of random starting labelings
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Walk length per starting labeling
    #[arg(long, default_value_t = 25)]
    iters: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximize Hamming density instead of minimizing (worst-case baseline)
    #[arg(long)]
    maximize: bool,
    /// Write the best matrix found (determinant +/-1 lift) to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare against exhaustive enumeration (small groups only)
    #[arg(long)]
    exhaustive_check: bool,
}

pub fn run_descent(args: DescentArgs) -> CliResult {
    let id = parse_lattice(&args.lattice)?;
    check_modulus(args.r)?;
    let lat = MarkedLattice::standard(id);
    let n = lat.dimension();
    let started = Instant::now();
    let seeds = random_seed_unimodulars(n, args.r, args.seeds, args.seed)
        .map_err(|err| usage(format!("{err}")))?;
    if seeds.len() < args.seeds {
        println!(
            "note: only {} of {} requested seeds have distinct HD",
            seeds.len(),
            args.seeds
        );
    }
    let results = if args.maximize {
        hamming_ascent(&lat, args.r, &seeds, args.iters, args.seed)
    } else {
        hamming_descent(&lat, args.r, &seeds, args.iters, args.seed)
    }
    .map_err(|err| usage(format!("{err}")))?;

    let goal = if args.maximize { "max" } else { "min" };
    for (idx, res) in results.iter().enumerate() {
        println!(
            "seed {idx:2}: best HD {} after {} moves",
            fraction(&res.best_hd),
            res.trace.len()
        );
    }
    let overall = if args.maximize {
        results.iter().max_by_key(|res| res.best_hd)
    } else {
        results.iter().min_by_key(|res| res.best_hd)
    }
    .expect("at least one seed");
    println!("overall {goal} HD = {}", fraction(&overall.best_hd));
    eprintln!("search time: {:.2?}", started.elapsed());

    if args.exhaustive_check {
        match enumerate_group(n, args.r) {
            Ok(group) => {
                let rs = neighbor_offsets_standard(&lat, args.r)
                    .map_err(|err| usage(format!("{err}")))?;
                let extreme = group
                    .iter()
                    .map(|u| {
                        hamming_density(&neighbor_offsets_sheared(&rs, u).unwrap()).unwrap()
                    })
                    .reduce(|a, b| {
                        if (args.maximize && b > a) || (!args.maximize && b < a) {
                            b
                        } else {
                            a
                        }
                    })
                    .expect("group is nonempty");
                let verdict = if extreme.eq_exact(&overall.best_hd) {
                    "search matches"
                } else {
                    "search differs"
                };
                println!(
                    "exhaustive {goal} over {} elements: {} ({verdict})",
                    group.len(),
                    fraction(&extreme)
                );
            }
            Err(err) => println!("exhaustive check skipped: {err}"),
        }
    }

    if let Some(out) = args.out {
        let lift = overall
            .best
            .sl_lift()
            .map_err(|err| usage(format!("{err}")))?;
        let header = format!(
            "voromod descent result\nlattice = {id}, r = {}, goal = {goal}\nHD = {}\nseed = {}, seeds = {}, iters = {}",
            args.r,
            fraction(&overall.best_hd),
            args.seed,
            args.seeds,
            args.iters,
        );
        let path = resolve_out_path(&out);
        matrix_io::write_matrix_file(&path, &lift, &header)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Args)]
pub struct BerArgs {
    /// Lattice: a2, d4 or e8
    #[arg(long)]
    lattice: String,
    /// Modulus (2, 4 or 8)
    #[arg(long)]
    r: u32,
    /// Labeling matrix (repeat up to 3 times for overlaid curves)
    #[arg(long, num_args = 1, action = clap::ArgAction::Append)]
    u: Vec<String>,
    /// First Eb/N0 in dB
    #[arg(long)]
    snr_start: f64,
    /// Last Eb/N0 in dB
    #[arg(long)]
    snr_stop: f64,
    /// Eb/N0 step in dB
    #[arg(long, default_value_t = 0.5)]
    snr_step: f64,
    /// Minimum bits per SNR point
    #[arg(long, default_value_t = 1_000_000)]
    min_bits: u64,
    /// Minimum bit errors per SNR point
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores); never affects the results
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV output path
    #[arg(long)]
    output: PathBuf,
    /// Also write a log-scale BER plot
    #[arg(long)]
    svg: Option<PathBuf>,
}

pub struct Curve {
    pub label: String,
    pub rows: Vec<(f64, ChannelStats)>,
}

pub fn run_ber(args: BerArgs) -> CliResult {
    let id = parse_lattice(&args.lattice)?;
    check_modulus(args.r)?;
    if args.u.is_empty() {
        return Err(usage("at least one --u is required"));
    }
    if args.u.len() > 3 {
        return Err(usage("at most 3 curves per run"));
    }
    if !(args.snr_start <= args.snr_stop) {
        return Err(usage("snr-start must not exceed snr-stop"));
    }
    if !(args.snr_step > 0.0) {
        return Err(usage("snr-step must be positive"));
    }
    let lat = MarkedLattice::standard(id);
    let rs = neighbor_offsets_standard(&lat, args.r).map_err(|err| usage(format!("{err}")))?;

    let mut snrs = Vec::new();
    let mut snr = args.snr_start;
    while snr <= args.snr_stop + 1e-9 {
        snrs.push(snr);
        snr += args.snr_step;
    }

    let started = Instant::now();
    let mut curves = Vec::new();
    let mut csv = String::new();
    for spec in &args.u {
        let u = resolve_unimodular(spec, id, args.r)?;
        let hd = hamming_density(&neighbor_offsets_sheared(&rs, &u).unwrap())
            .map_err(|err| usage(format!("{err}")))?;
        let cfg = CodecConfig::new(&lat, &u, args.r).map_err(|err| usage(format!("{err}")))?;

        writeln!(csv, "# voromod ber").unwrap();
        writeln!(csv, "# lattice = {}", args.lattice.to_lowercase()).unwrap();
        writeln!(csv, "# r = {}", args.r).unwrap();
        writeln!(csv, "# u = {}", matrix_io::inline_string(&u)).unwrap();
        writeln!(csv, "# u_hash = {}", matrix_io::canonical_hash(&u)).unwrap();
        writeln!(csv, "# hd = {}/{}", hd.total_bit_diffs, hd.neighbor_count).unwrap();
        writeln!(csv, "# scale = {}", cfg.scale()).unwrap();
        writeln!(
            csv,
            "# snr_convention = Eb/N0 dB; Es = 1 per IQ pair; N0 = 1/(ebn0 * {})",
            cfg.bits_per_pair()
        )
        .unwrap();
        writeln!(csv, "# seed = {}", args.seed).unwrap();
        writeln!(csv, "# min_bits = {}", args.min_bits).unwrap();
        writeln!(csv, "# min_errors = {}", args.min_errors).unwrap();
        writeln!(
            csv,
            "ebn0_db,bits_sent,bit_errors,ber,points_sent,lattice_errors,ler"
        )
        .unwrap();

        let mut rows = Vec::new();
        for (snr_idx, &snr) in snrs.iter().enumerate() {
            // one stream family per SNR point, shared by every curve
            let point_seed = mix_seed(args.seed, snr_idx as u64);
            let stats = run_trials(&cfg, snr, args.min_bits, args.min_errors, point_seed, args.workers)
                .map_err(|err| usage(format!("{err}")))?;
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                snr,
                stats.bits_sent,
                stats.bit_errors,
                stats.ber(),
                stats.points_sent,
                stats.lattice_errors,
                stats.ler()
            )
            .unwrap();
            rows.push((snr, stats));
        }
        curves.push(Curve {
            label: format!("{spec} (HD {:.2})", hd.value()),
            hd,
            rows,
        });
    }

    let path = resolve_out_path(&args.output);
    std::fs::write(&path, &csv)
        .map_err(|err| usage(format!("cannot write {}: {err}", path.display())))?;
    println!("wrote {}", path.display());
    if let Some(svg) = args.svg {
        let path = resolve_out_path(&svg);
        std::fs::write(&path, plot::ber_svg(&curves))
            .map_err(|err| usage(format!("cannot write {}: {err}", path.display())))?;
        println!("wrote {}", path.display());
    }
    eprintln!("sweep time: {:.2?}", started.elapsed());
    Ok(())
}

/// SplitMix64 round, used to derive independent per-SNR-point seeds.
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[derive(Args)]
pub struct OrderArgs {
    /// Matrix dimension n
    n: usize,
    /// Modulus r
    r: u32,
}

pub fn run_order(args: OrderArgs) -> CliResult {
    if args.n < 2 || args.r < 2 {
        return Err(usage("order requires n >= 2 and r >= 2"));
    }
    let order = group_order(args.n, args.r);
    println!(
        "|G_{}({})| = {} ({})",
        args.n,
        args.r,
        order,
        scientific(&order, 5)
    );
    Ok(())
}

/// Round a big integer to `sig` significant decimal digits, as `d.dddde+XX`.
pub fn scientific(value: &BigUint, sig: usize) -> String {
    let digits = value.to_string();
    let exponent = digits.len() as i64 - 1;
    if digits.len() <= sig {
        let mantissa: String = digits.chars().chain(std::iter::repeat('0')).take(sig).collect();
        return format_mantissa(&mantissa, exponent);
    }
    // round half away from zero at the cut
    let mut kept: Vec<u8> = digits.as_bytes()[..sig].iter().map(|b| b - b'0').collect();
    if digits.as_bytes()[sig] >= b'5' {
        let mut i = sig;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                return format_mantissa(
                    &kept.iter().map(|d| (d + b'0') as char).collect::<String>(),
                    exponent + 1,
                );
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    format_mantissa(
        &kept.iter().map(|d| (d + b'0') as char).collect::<String>(),
        exponent,
    )
}

fn format_mantissa(mantissa: &str, exponent: i64) -> String {
    format!("{}.{}e{}", &mantissa[..1], &mantissa[1..], exponent)
}

#[derive(Args)]
pub struct BoundArgs {
    /// Lattice: a2, d4 or e8
    lattice: String,
}

pub fn run_bound(args: BoundArgs) -> CliResult {
    let id = parse_lattice(&args.lattice)?;
    let bound = theoretical_hd_bound(id.dimension(), id.kissing_number() as u64)
        .map_err(|err| usage(format!("{err}")))?;
    let parts: Vec<String> = bound
        .per_weight
        .iter()
        .map(|&(w, taken)| {
            let word = match w {
                1 => "one-bit".to_string(),
                2 => "two-bit".to_string(),
                3 => "three-bit".to_string(),
                w => format!("{w}-bit"),
            };
            format!("{taken} {word}")
        })
        .collect();
    println!(
        "{id}: {} differences, HD = {}/{} = {:.2}",
        parts.join(" + "),
        bound.hd.total_bit_diffs,
        bound.hd.neighbor_count,
        bound.hd.value()
    );
    Ok(())
}

#[derive(Args)]
pub struct EnumerateArgs {
    /// Matrix dimension n
    n: usize,
    /// Modulus r
    r: u32,
    /// Also report the min/max Hamming density over the whole group
    #[arg(long)]
    hd_stats: bool,
}

pub fn run_enumerate(args: EnumerateArgs) -> CliResult {
    if args.n < 2 || args.r < 2 {
        return Err(usage("enumerate requires n >= 2 and r >= 2"));
    }
    let order = group_order(args.n, args.r);
    if order > BigUint::from(ENUMERATION_LIMIT) {
        return Err(usage(format!(
            "|G_{}({})| = {} exceeds the enumeration guard {ENUMERATION_LIMIT}",
            args.n, args.r, order
        )));
    }
    let group = enumerate_group(args.n, args.r).map_err(|err| usage(format!("{err}")))?;
    let verdict = if BigUint::from(group.len() as u64) == order {
        "matches the order formula"
    } else {
        "DOES NOT match the order formula"
    };
    println!(
        "G_{}({}) has {} elements ({verdict})",
        args.n,
        args.r,
        group.len()
    );
    if args.hd_stats {
        let id = LatticeId::from_dimension(args.n)
            .ok_or_else(|| usage(format!("no lattice has dimension {}", args.n)))?;
        check_modulus(args.r)?;
        let lat = MarkedLattice::standard(id);
        let rs = neighbor_offsets_standard(&lat, args.r).map_err(|err| usage(format!("{err}")))?;
        let mut min: Option<HammingDensity> = None;
        let mut max: Option<HammingDensity> = None;
        for u in &group {
            let hd = hamming_density(&neighbor_offsets_sheared(&rs, u).unwrap())
                .map_err(|err| usage(format!("{err}")))?;
            min = Some(min.map_or(hd, |m| if hd < m { hd } else { m }));
            max = Some(max.map_or(hd, |m| if hd > m { hd } else { m }));
        }
        println!(
            "HD over the group: min {}, max {}",
            fraction(&min.unwrap()),
            fraction(&max.unwrap())
        );
    }
    Ok(())
}
