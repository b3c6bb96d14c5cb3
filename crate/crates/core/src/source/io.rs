//! Newline-delimited sequence files.

use std::fmt::Write as _;
use std::path::Path;

use super::{ObservationSequence, SymbolSequence};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Symbols,
    Observations,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sequence<T> {
    Symbols(SymbolSequence),
    Observations(ObservationSequence<T>),
}

/// Reads integers (symbols) or decimals (observations), one per line.
///
/// Blank lines are ignored. A symbol file must hold at least one value; its
/// alphabet is taken as `max + 1`.
pub fn load_sequence<T: Real>(path: impl AsRef<Path>, kind: SequenceKind) -> Result<Sequence<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let tokens = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match kind {
        SequenceKind::Symbols => {
            let symbols = tokens
                .map(|(line, tok)| {
                    tok.parse::<usize>().map_err(|_| Error::Format {
                        line,
                        message: format!("expected a non-negative integer, found `{tok}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let alphabet = symbols.iter().max().map(|m| m + 1).ok_or(Error::Format {
                line: 1,
                message: "symbol file is empty".into(),
            })?;
            Ok(Sequence::Symbols(SymbolSequence::new(symbols, alphabet)?))
        }
        SequenceKind::Observations => {
            let values = tokens
                .map(|(line, tok)| {
                    tok.parse::<T>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Format {
                        line,
                        message: format!("expected a finite decimal, found `{tok}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Sequence::Observations(ObservationSequence::new(values)?))
        }
    }
}

/// Writes one value per line. Decimals use the shortest representation that
/// parses back to the identical value.
pub fn save_sequence<T: Real>(path: impl AsRef<Path>, seq: &Sequence<T>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    match seq {
        Sequence::Symbols(s) => s.symbols().iter().for_each(|v| writeln!(out, "{v}").unwrap()),
        Sequence::Observations(o) => o.values().iter().for_each(|v| writeln!(out, "{v}").unwrap()),
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
