//! Corpus file format: one tree per line as a bracketed parent-pointer
//! array, e.g. `[-1,0,0]`. Blank lines and lines starting with `#` are
//! ignored. Parsing and serialization are exact inverses, including
//! child order.

use crate::error::{Error, Result};
use crate::tree::OrderedTree;

/// Parses a corpus from text, one tree per non-comment line.
pub fn parse(input: &str) -> Result<Vec<OrderedTree>> {
    let mut trees = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        trees.push(parse_line(line).map_err(|e| Error::CorpusParse {
            line: idx + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(trees)
}

fn parse_line(line: &str) -> Result<OrderedTree> {
    let body = line
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| {
            Error::InvalidParameter("expected a bracketed array like [-1,0,0]".into())
        })?;
    let mut parents = Vec::new();
    for token in body.split(',') {
        let token = token.trim();
        let value: i64 = token.parse().map_err(|_| {
            Error::InvalidParameter(format!("`{token}` is not an integer"))
        })?;
        parents.push(value);
    }
    OrderedTree::from_parents(&parents)
}

/// Serializes trees to corpus text, one line per tree.
pub fn serialize(trees: &[OrderedTree]) -> String {
    let mut out = String::new();
    for tree in trees {
        out.push('[');
        for (i, p) in tree.parents().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&p.to_string());
        }
        out.push_str("]\n");
    }
    out
}
