//! Plain-text channel descriptor and quantizer files.
//!
//! Channel descriptor: one line per symbol, `gauss <mean> <stddev>` or
//! `kde <samples-file> <bandwidth>`. Blank lines and `#` comments are skipped.
//! Quantizer: one line of whitespace-separated boundaries.

use std::path::Path;

use super::{ChannelModel, Density, Quantizer};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn parse_real<T: Real>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Format {
            line,
            message: format!("expected a number, found `{tok}`"),
        })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses a channel descriptor. `kde` sample files are read through `read_samples`.
pub fn parse_channel<T: Real>(
    text: &str,
    mut read_samples: impl FnMut(&str) -> Result<Vec<T>>,
) -> Result<ChannelModel<T>> {
    let mut densities = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let bad = |message: String| Error::Format { line, message };
        let density = match toks.as_slice() {
            ["gauss", mean, sd] => {
                Density::gaussian(parse_real(mean, line)?, parse_real(sd, line)?).map_err(|e| bad(e.to_string()))?
            }
            ["kde", file, bw] => {
                let bw = parse_real(bw, line)?;
                let samples = read_samples(file)?;
                Density::kde(samples, bw).map_err(|e| bad(e.to_string()))?
            }
            _ => return Err(bad(format!("expected `gauss <mean> <stddev>` or `kde <file> <bandwidth>`, found `{content}`"))),
        };
        densities.push(density);
    }
    ChannelModel::new(densities)
}

/// Loads a channel descriptor; `kde` sample paths are taken relative to the working directory.
pub fn load_channel<T: Real>(path: impl AsRef<Path>) -> Result<ChannelModel<T>> {
    let text = read(path.as_ref())?;
    parse_channel(&text, |file| {
        let body = read(Path::new(file))?;
        body.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| parse_real(l.trim(), i + 1))
            .collect()
    })
}

pub fn parse_quantizer<T: Real>(text: &str) -> Result<Quantizer<T>> {
    let mut boundaries = Vec::new();
    let mut seen_line = false;
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if seen_line {
            return Err(Error::Format {
                line: idx + 1,
                message: "quantizer file holds a single line of boundaries".into(),
            });
        }
        seen_line = true;
        for tok in content.split_whitespace() {
            boundaries.push(parse_real(tok, idx + 1)?);
        }
    }
    Quantizer::new(boundaries)
}

pub fn load_quantizer<T: Real>(path: impl AsRef<Path>) -> Result<Quantizer<T>> {
    parse_quantizer(&read(path.as_ref())?)
}
