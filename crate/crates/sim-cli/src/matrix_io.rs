//! Plain-text matrix files: one row per line, space-separated integers,
//! `#` starts a comment. Chosen for diff-ability and hand editing.

use std::path::Path;

use voromod::UnimodularElement;

use crate::{CliError, CliResult};

pub fn parse_rows(text: &str) -> Result<Vec<Vec<i64>>, String> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        match row {
            Ok(row) => rows.push(row),
            Err(_) => return Err(format!("line {}: expected integers, got {line:?}", lineno + 1)),
        }
    }
    Ok(rows)
}

fn element_from_rows(rows: Vec<Vec<i64>>, n: usize, r: u32, origin: &str) -> Result<UnimodularElement, CliError> {
    if rows.len() != n || rows.iter().any(|row| row.len() != n) {
        return Err(CliError::Matrix(format!(
            "{origin}: expected a {n}x{n} matrix, got {} rows of lengths {:?}",
            rows.len(),
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let entries: Vec<i64> = rows.into_iter().flatten().collect();
    UnimodularElement::new(n, r, entries)
        .map_err(|err| CliError::Matrix(format!("{origin}: {err}")))
}

pub fn read_matrix_file(path: &Path, n: usize, r: u32) -> Result<UnimodularElement, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::Matrix(format!("{}: {err}", path.display())))?;
    let rows = parse_rows(&text)
        .map_err(|err| CliError::Matrix(format!("{}: {err}", path.display())))?;
    element_from_rows(rows, n, r, &path.display().to_string())
}

/// Inline rows like `"2 3; 1 2"`.
pub fn parse_inline(text: &str, n: usize, r: u32) -> Result<UnimodularElement, CliError> {
    let rows = parse_rows(&text.replace(';', "\n"))
        .map_err(|err| CliError::Matrix(format!("inline matrix: {err}")))?;
    element_from_rows(rows, n, r, "inline matrix")
}

pub fn write_matrix_file(path: &Path, u: &UnimodularElement, header: &str) -> CliResult {
    let n = u.dimension();
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for row in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|col| u.entries()[row * n + col].to_string())
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|err| CliError::Usage(format!("cannot write {}: {err}", path.display())))
}

/// Render entries for a CSV metadata line.
pub fn inline_string(u: &UnimodularElement) -> String {
    let n = u.dimension();
    (0..n)
        .map(|row| {
            (0..n)
                .map(|col| u.entries()[row * n + col].to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Stable FNV-1a hash of the canonical entries, for quick curve identity.
pub fn canonical_hash(u: &UnimodularElement) -> String {
    let canon = u.canonicalize();
    let mut hash = 0xcbf29ce484222325u64;
    for &entry in canon.entries() {
        for byte in entry.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    format!("{hash:016x}")
}
