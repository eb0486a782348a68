//! Plain-text matrices: first line `dim`, then `dim` rows of whitespace
//! separated `re,im` pairs. Vectors use the same layout with one pair per row.

use std::path::Path;

use num_complex::Complex64;
use qfirob_core::operator::{CMatrix, CVector, HermitianMatrix, PureState};

fn read_pairs(path: &Path, cols: usize) -> Result<(usize, Vec<Complex64>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_pairs(&text, cols).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses the text layout; `cols = 0` means square (`dim` columns per row).
pub fn parse_pairs(text: &str, cols: usize) -> Result<(usize, Vec<Complex64>), String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, first) = lines.next().ok_or("empty file")?;
    let dim: usize = first.trim().parse().map_err(|_| format!("line 1: expected dimension, found `{}`", first.trim()))?;
    if dim == 0 {
        return Err("dimension must be positive".into());
    }
    let width = if cols == 0 { dim } else { cols };
    let mut out = Vec::with_capacity(dim * width);
    for row in 0..dim {
        let (k, line) = lines.next().ok_or_else(|| format!("expected {dim} rows, found {row}"))?;
        let pairs: Vec<&str> = line.split_whitespace().collect();
        if pairs.len() != width {
            return Err(format!("line {}: expected {width} entries, found {}", k + 1, pairs.len()));
        }
        for p in pairs {
            let (re, im) = p.split_once(',').ok_or_else(|| format!("line {}: `{p}` is not a `re,im` pair", k + 1))?;
            let parse = |x: &str| x.parse::<f64>().map_err(|_| format!("line {}: `{x}` is not a number", k + 1));
            out.push(Complex64::new(parse(re)?, parse(im)?));
        }
    }
    if let Some((k, _)) = lines.next() {
        return Err(format!("line {}: unexpected trailing data", k + 1));
    }
    Ok((dim, out))
}

pub fn read_matrix(path: &Path) -> Result<HermitianMatrix, String> {
    let (dim, data) = read_pairs(path, 0)?;
    HermitianMatrix::new(CMatrix::from_row_slice(dim, dim, &data)).map_err(|e| e.to_string())
}

/// A normalized state vector.
pub fn read_vector(path: &Path) -> Result<PureState, String> {
    let (dim, data) = read_pairs(path, 1)?;
    debug_assert_eq!(data.len(), dim);
    PureState::new(CVector::from_vec(data)).map_err(|e| e.to_string())
}

/// Inverse of [`read_matrix`], with round-trip float formatting.
pub fn format_matrix(m: &CMatrix) -> String {
    let mut s = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?},{:?}", m[(i, j)].re, m[(i, j)].im)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}
