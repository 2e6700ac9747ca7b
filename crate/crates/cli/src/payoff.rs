use std::fs;
use std::path::Path;

use lfp_core::PayoffMatrix;

use crate::error::CliError;
use crate::output::fmt_num;

/// Resolve a payoff source: a builtin name or a CSV path.
///
/// Builtins are `matching-pennies`, `zero:MxN` and `random:MxN:SEED` (the
/// separator may be `x` or `×`). `M` is the row count.
pub fn load_payoff(source: &str) -> Result<PayoffMatrix, CliError> {
    let src = source.trim();
    if src == "matching-pennies" {
        return Ok(PayoffMatrix::matching_pennies());
    }
    if let Some(rest) = src.strip_prefix("zero:") {
        let (m, n) = parse_dims(rest)?;
        return PayoffMatrix::zeros(m, n).map_err(|e| CliError::config(e.to_string()));
    }
    if let Some(rest) = src.strip_prefix("random:") {
        let (dims, seed) = rest
            .rsplit_once(':')
            .ok_or_else(|| CliError::config(format!("expected random:MxN:SEED, got {src:?}")))?;
        let (m, n) = parse_dims(dims)?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| CliError::config(format!("bad seed {seed:?} in {src:?}")))?;
        return PayoffMatrix::random(m, n, seed).map_err(|e| CliError::config(e.to_string()));
    }
    let path = Path::new(src);
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::config(format!("cannot read payoff file {}: {e}", path.display()))
    })?;
    parse_payoff_csv(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn parse_dims(s: &str) -> Result<(usize, usize), CliError> {
    let (m, n) = s
        .split_once(['x', '×'])
        .ok_or_else(|| CliError::config(format!("expected dimensions MxN, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| CliError::config(format!("bad dimension {v:?}")))
    };
    Ok((parse(m)?, parse(n)?))
}

/// Rows of comma-separated decimals. Blank lines are skipped. Errors name
/// 1-based rows and columns.
pub fn parse_payoff_csv(text: &str) -> Result<PayoffMatrix, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("row {}: {e}", r + 1))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        format!(
                            "row {}, column {}: not a finite number: {cell:?}",
                            r + 1,
                            c + 1
                        )
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("empty payoff file".into());
    }
    PayoffMatrix::from_rows(rows).map_err(|e| e.to_string())
}

/// CSV text that [`parse_payoff_csv`] reads back bit-for-bit.
pub fn payoff_to_csv(a: &PayoffMatrix) -> String {
    let mut out = String::new();
    for row in a.to_rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
