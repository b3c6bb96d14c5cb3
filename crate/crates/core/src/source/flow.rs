//! Flow-space representation of DNA under a fixed wash cycle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SymbolSequence;
use crate::error::{Error, Result};

const BASES: [u8; 4] = *b"ACGT";

/// The repeating order in which nucleotides are flowed over the template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WashCycle {
    bases: Vec<u8>,
}

impl WashCycle {
    pub fn new(bases: &str) -> Result<Self> {
        let bases = bases.trim().to_ascii_uppercase().into_bytes();
        if bases.is_empty() {
            return Err(Error::arg("wash cycle must be nonempty"));
        }
        if let Some(&b) = bases.iter().find(|b| !BASES.contains(b)) {
            return Err(Error::Encoding(format!("wash cycle contains `{}`", b as char)));
        }
        Ok(Self { bases })
    }

    /// The 454 cycle `TACG`.
    pub fn tacg() -> Self {
        Self::new("TACG").unwrap()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn base(&self, flow: usize) -> u8 {
        self.bases[flow % self.bases.len()]
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.bases).expect("cycle is ASCII")
    }
}

/// Result of [`dna_to_flow`]: run lengths plus how many runs exceeded the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEncoding {
    pub flows: SymbolSequence,
    pub clipped: usize,
}

/// Converts DNA to per-flow homopolymer lengths, clipped at `max_len`.
///
/// Each flow consumes the maximal run of its base at the current position;
/// encoding stops after the flow that consumes the last base.
pub fn dna_to_flow(dna: &str, cycle: &WashCycle, max_len: usize) -> Result<FlowEncoding> {
    if max_len == 0 || max_len == usize::MAX {
        return Err(Error::arg(format!("maximum homopolymer length {max_len} out of range")));
    }
    let dna = dna.as_bytes();
    if let Some(&b) = dna.iter().find(|b| !cycle.bases.contains(b)) {
        return Err(Error::Encoding(format!(
            "base `{}` does not occur in wash cycle {}",
            b as char,
            cycle.as_str()
        )));
    }
    let mut flows = Vec::with_capacity(dna.len() * 2);
    let mut clipped = 0;
    let mut pos = 0;
    let mut flow = 0;
    while pos < dna.len() {
        let base = cycle.base(flow);
        let run = dna[pos..].iter().take_while(|&&b| b == base).count();
        if run > max_len {
            clipped += 1;
        }
        flows.push(run.min(max_len));
        pos += run;
        flow += 1;
    }
    Ok(FlowEncoding {
        flows: SymbolSequence::new(flows, max_len + 1)?,
        clipped,
    })
}

/// Expands run lengths back to bases.
pub fn flow_to_dna(flows: &[usize], cycle: &WashCycle) -> String {
    let mut out = Vec::with_capacity(flows.iter().sum());
    for (i, &len) in flows.iter().enumerate() {
        out.extend(std::iter::repeat_n(cycle.base(i), len));
    }
    String::from_utf8(out).expect("cycle bases are ASCII")
}

/// Extracts a DNA string from plain text or FASTA: header lines are skipped,
/// whitespace dropped, letters upper-cased.
pub fn read_dna(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('>'))
        .flat_map(|l| l.chars().filter(|c| !c.is_whitespace()))
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

/// Random DNA where each base repeats the previous one with probability
/// `repeat_prob` and otherwise switches uniformly to one of the other three.
pub fn gen_dna(len: usize, repeat_prob: f64, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    let mut cur = rng.random_range(0..4usize);
    for i in 0..len {
        if i > 0 && rng.random::<f64>() >= repeat_prob {
            let r = rng.random_range(0..3usize);
            cur = if r >= cur { r + 1 } else { r };
        }
        out.push(BASES[cur]);
    }
    String::from_utf8(out).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_traced_examples() {
        let c = WashCycle::tacg();
        assert_eq!(dna_to_flow("TTAG", &c, 9).unwrap().flows.symbols(), &[2, 1, 0, 1]);
        assert_eq!(dna_to_flow("ACG", &c, 9).unwrap().flows.symbols(), &[0, 1, 1, 1]);
        assert!(dna_to_flow("", &c, 9).unwrap().flows.is_empty());
        assert_eq!(flow_to_dna(&[2, 1, 0, 1], &c), "TTAG");
        assert_eq!(flow_to_dna(&[0, 0, 0, 0, 0], &c), "");
    }

    #[test]
    fn clipping_is_counted() {
        let c = WashCycle::tacg();
        let enc = dna_to_flow("TTTTTA", &c, 3).unwrap();
        assert_eq!(enc.flows.symbols(), &[3, 1]);
        assert_eq!(enc.clipped, 1);
        assert_eq!(enc.flows.alphabet(), 4);
    }

    #[test]
    fn bases_outside_cycle() {
        let c = WashCycle::new("TA").unwrap();
        assert!(matches!(dna_to_flow("TAG", &c, 9), Err(Error::Encoding(_))));
        assert!(matches!(dna_to_flow("TAN", &WashCycle::tacg(), 9), Err(Error::Encoding(_))));
        assert!(WashCycle::new("").is_err());
        assert!(WashCycle::new("TAX").is_err());
    }

    #[test]
    fn long_cycle() {
        let c = WashCycle::new("TACGTACGTCTGAGCATCGATCGATGTACAGC").unwrap();
        let dna = gen_dna(500, 0.3, 4);
        let enc = dna_to_flow(&dna, &c, 9).unwrap();
        assert_eq!(flow_to_dna(enc.flows.symbols(), &c), dna);
    }

    #[test]
    fn fasta_parsing() {
        assert_eq!(read_dna(">seq1 desc\nacgT\n  TT a\n>seq2\nG\n"), "ACGTTTAG");
    }

    proptest! {
        #[test]
        fn flow_round_trip(start in 0usize..4, runs in prop::collection::vec((0usize..3, 1usize..=9), 0..60)) {
            // consecutive runs use different bases so no homopolymer exceeds 9
            let mut dna = String::new();
            let mut cur = start;
            for (step, len) in runs {
                cur = (cur + 1 + step) % 4;
                dna.extend(std::iter::repeat_n(BASES[cur] as char, len));
            }
            let c = WashCycle::tacg();
            let enc = dna_to_flow(&dna, &c, 9).unwrap();
            prop_assert_eq!(enc.clipped, 0);
            prop_assert_eq!(flow_to_dna(enc.flows.symbols(), &c), dna);
        }
    }
}
