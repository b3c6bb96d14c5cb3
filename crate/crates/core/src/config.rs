//! Experiment configuration: `key = value` lines, `#` comments.
//!
//! Required keys are `mode`, `seed`, and `M` in synthetic mode (in
//! flowspace mode the alphabet is `max_homopolymer + 1`). Every other key
//! has a default; [`ExperimentConfig::to_text`] writes all of them.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::Encoding;
use crate::error::{Error, Result};
use crate::eval::Scheme;
use crate::neural::TrainConfig;
use crate::source::WashCycle;

/// Sequence length used unless overridden.
pub const DESK_N: usize = 100_000;
/// Sequence length of the full-scale synthetic study.
pub const FULL_N: usize = 3_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Symmetric Markov source observed through a memoryless channel.
    Synthetic,
    /// DNA converted to per-flow homopolymer lengths.
    Flowspace,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantizerSpec {
    /// Nearest encoded value.
    AutoRound,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub alphabet: usize,
    pub n: usize,
    pub seed: u64,
    pub stay_prob: f64,
    pub encoding: Encoding,
    /// Channel descriptor file; `None` means Gaussian noise around the encoded values.
    pub channel: Option<PathBuf>,
    pub noise_stddev: f64,
    pub quantizer: QuantizerSpec,
    pub schemes: Vec<Scheme>,
    pub ks: Vec<usize>,
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
    pub tuple_cap: u128,
    pub output: PathBuf,
    pub wash_cycle: Option<String>,
    pub max_homopolymer: usize,
    /// DNA source file (plain or FASTA); `None` generates one.
    pub dna: Option<PathBuf>,
    pub dna_repeat_prob: f64,
}

const KEYS: &[&str] = &[
    "mode",
    "M",
    "n",
    "seed",
    "stay_prob",
    "encoding",
    "channel",
    "noise_stddev",
    "quantizer",
    "schemes",
    "k",
    "hidden",
    "learning_rate",
    "beta1",
    "beta2",
    "adam_epsilon",
    "batch_size",
    "epochs",
    "standardize",
    "tuple_cap",
    "output",
    "wash_cycle",
    "max_homopolymer",
    "dna",
    "dna_repeat_prob",
];

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "synthetic" => Ok(Mode::Synthetic),
            "flowspace" => Ok(Mode::Flowspace),
            _ => Err(format!("unknown mode `{s}` (expected synthetic or flowspace)")),
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Synthetic => "synthetic",
            Mode::Flowspace => "flowspace",
        }
    }
}

fn encoding_name(e: Encoding) -> &'static str {
    match e {
        Encoding::OddIntegers => "odd_integers",
        Encoding::Identity => "identity",
    }
}

fn parse_encoding(s: &str) -> Result<Encoding, String> {
    match s {
        "odd_integers" => Ok(Encoding::OddIntegers),
        "identity" => Ok(Encoding::Identity),
        _ => Err(format!("unknown encoding `{s}` (expected odd_integers or identity)")),
    }
}

fn parse_list<V: FromStr>(s: &str) -> Result<Vec<V>, String>
where
    V::Err: std::fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse::<V>().map_err(|e| format!("`{}`: {e}", t.trim()))).collect()
}

fn join<V: std::fmt::Display>(v: &[V]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

struct Entries(HashMap<&'static str, (usize, String)>);

impl Entries {
    fn take<V>(&mut self, key: &str, parse: impl FnOnce(&str) -> Result<V, String>) -> Result<Option<V>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some((line, raw)) => parse(&raw).map(Some).map_err(|e| Error::Format {
                line,
                message: format!("`{key}`: {e}"),
            }),
        }
    }

    fn scalar<V: FromStr>(&mut self, key: &str) -> Result<Option<V>>
    where
        V::Err: std::fmt::Display,
    {
        self.take(key, |s| s.parse::<V>().map_err(|e| format!("cannot parse `{s}`: {e}")))
    }
}

impl ExperimentConfig {
    /// Parses and validates configuration text. Referenced files are not touched.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Format { line, message: format!("expected `key = value`, found `{content}`") });
            };
            let key = key.trim();
            let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
                return Err(Error::Format { line, message: format!("unknown key `{key}`") });
            };
            if map.insert(known, (line, value.trim().to_string())).is_some() {
                return Err(Error::Format { line, message: format!("duplicate key `{key}`") });
            }
        }
        let mut e = Entries(map);
        let missing = |key: &str| Error::arg(format!("missing required key `{key}`"));

        let mode = e.scalar::<Mode>("mode")?.ok_or_else(|| missing("mode"))?;
        let seed = e.scalar::<u64>("seed")?.ok_or_else(|| missing("seed"))?;
        let alphabet_line = e.0.get("M").map(|(l, _)| *l);
        let alphabet = e.scalar::<usize>("M")?;
        let max_homopolymer = e.scalar("max_homopolymer")?.unwrap_or(9);
        let alphabet = match (mode, alphabet) {
            (Mode::Synthetic, Some(m)) => m,
            (Mode::Synthetic, None) => return Err(missing("M")),
            (Mode::Flowspace, None) => max_homopolymer + 1,
            (Mode::Flowspace, Some(m)) if m == max_homopolymer + 1 => m,
            (Mode::Flowspace, Some(m)) => {
                return Err(Error::Format {
                    line: alphabet_line.unwrap_or(0),
                    message: format!("`M` = {m} but flowspace mode needs max_homopolymer + 1 = {}", max_homopolymer + 1),
                })
            }
        };
        let default_train = TrainConfig { seed, ..TrainConfig::default() };
        let default_encoding = match mode {
            Mode::Synthetic => Encoding::OddIntegers,
            Mode::Flowspace => Encoding::Identity,
        };
        let cfg = ExperimentConfig {
            mode,
            alphabet,
            n: e.scalar("n")?.unwrap_or(DESK_N),
            seed,
            stay_prob: e.scalar("stay_prob")?.unwrap_or(0.9),
            encoding: e.take("encoding", parse_encoding)?.unwrap_or(default_encoding),
            channel: e.take("channel", |s| Ok(PathBuf::from(s)))?,
            noise_stddev: e.scalar("noise_stddev")?.unwrap_or(1.0),
            quantizer: e
                .take("quantizer", |s| {
                    Ok(if s == "auto-round" { QuantizerSpec::AutoRound } else { QuantizerSpec::File(PathBuf::from(s)) })
                })?
                .unwrap_or(QuantizerSpec::AutoRound),
            schemes: e.take("schemes", parse_list)?.unwrap_or_else(Scheme::default_set),
            ks: e.take("k", parse_list)?.unwrap_or_else(|| vec![2, 4]),
            hidden: e.take("hidden", parse_list)?.unwrap_or_else(|| vec![64, 64, 64]),
            train: TrainConfig {
                learning_rate: e.scalar("learning_rate")?.unwrap_or(default_train.learning_rate),
                beta1: e.scalar("beta1")?.unwrap_or(default_train.beta1),
                beta2: e.scalar("beta2")?.unwrap_or(default_train.beta2),
                epsilon: e.scalar("adam_epsilon")?.unwrap_or(default_train.epsilon),
                batch_size: e.scalar("batch_size")?.unwrap_or(default_train.batch_size),
                epochs: e.scalar("epochs")?.unwrap_or(default_train.epochs),
                seed,
                standardize: e.scalar("standardize")?.unwrap_or(default_train.standardize),
            },
            tuple_cap: e.scalar("tuple_cap")?.unwrap_or(crate::denoise::DEFAULT_TUPLE_CAP),
            output: e.take("output", |s| Ok(PathBuf::from(s)))?.unwrap_or_else(|| PathBuf::from("results.csv")),
            wash_cycle: e.take("wash_cycle", |s| Ok(s.to_string()))?,
            max_homopolymer,
            dna: e.take("dna", |s| Ok(PathBuf::from(s)))?,
            dna_repeat_prob: e.scalar("dna_repeat_prob")?.unwrap_or(0.3),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks value ranges and cross-field constraints.
    pub fn validate(&self) -> Result<()> {
        if self.alphabet < 2 {
            return Err(Error::arg("`M` must be at least 2"));
        }
        if self.n == 0 {
            return Err(Error::arg("`n` must be at least 1"));
        }
        if !(self.stay_prob > 0.0 && self.stay_prob < 1.0) {
            return Err(Error::arg(format!("`stay_prob` = {} must lie in (0, 1)", self.stay_prob)));
        }
        if !(self.noise_stddev > 0.0 && self.noise_stddev.is_finite()) {
            return Err(Error::arg("`noise_stddev` must be > 0"));
        }
        if self.schemes.is_empty() {
            return Err(Error::arg("`schemes` must not be empty"));
        }
        if self.ks.is_empty() {
            return Err(Error::arg("`k` must not be empty"));
        }
        if self.hidden.contains(&0) {
            return Err(Error::arg("`hidden` widths must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.dna_repeat_prob) {
            return Err(Error::arg("`dna_repeat_prob` must lie in [0, 1)"));
        }
        if self.max_homopolymer == 0 {
            return Err(Error::arg("`max_homopolymer` must be at least 1"));
        }
        self.train.validate()?;
        if self.mode == Mode::Flowspace {
            let Some(cycle) = &self.wash_cycle else {
                return Err(Error::arg("flowspace mode requires `wash_cycle`"));
            };
            WashCycle::new(cycle)?;
        }
        Ok(())
    }

    /// Fails if any referenced file is missing.
    pub fn check_files(&self) -> Result<()> {
        let mut paths: Vec<(&str, &Path)> = Vec::new();
        if let Some(p) = &self.channel {
            paths.push(("channel", p));
        }
        if let QuantizerSpec::File(p) = &self.quantizer {
            paths.push(("quantizer", p));
        }
        if let Some(p) = &self.dna {
            paths.push(("dna", p));
        }
        for (key, p) in paths {
            if !p.is_file() {
                return Err(Error::arg(format!("`{key}` file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// Every key, one per line, in a form [`ExperimentConfig::parse_str`] reads back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("writing to a String");
        put("mode", self.mode.as_str().into());
        put("M", self.alphabet.to_string());
        put("n", self.n.to_string());
        put("seed", self.seed.to_string());
        put("stay_prob", self.stay_prob.to_string());
        put("encoding", encoding_name(self.encoding).into());
        if let Some(p) = &self.channel {
            put("channel", p.display().to_string());
        }
        put("noise_stddev", self.noise_stddev.to_string());
        put(
            "quantizer",
            match &self.quantizer {
                QuantizerSpec::AutoRound => "auto-round".into(),
                QuantizerSpec::File(p) => p.display().to_string(),
            },
        );
        put("schemes", join(&self.schemes));
        put("k", join(&self.ks));
        put("hidden", join(&self.hidden));
        put("learning_rate", self.train.learning_rate.to_string());
        put("beta1", self.train.beta1.to_string());
        put("beta2", self.train.beta2.to_string());
        put("adam_epsilon", self.train.epsilon.to_string());
        put("batch_size", self.train.batch_size.to_string());
        put("epochs", self.train.epochs.to_string());
        put("standardize", self.train.standardize.to_string());
        put("tuple_cap", self.tuple_cap.to_string());
        put("output", self.output.display().to_string());
        if let Some(c) = &self.wash_cycle {
            put("wash_cycle", c.clone());
        }
        put("max_homopolymer", self.max_homopolymer.to_string());
        if let Some(p) = &self.dna {
            put("dna", p.display().to_string());
        }
        put("dna_repeat_prob", self.dna_repeat_prob.to_string());
        s
    }
}

/// Reads, validates and checks that referenced files exist.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg = ExperimentConfig::parse_str(&text)?;
    cfg.check_files()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "mode = synthetic\nM = 2\nn = 1000\nseed = 7\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::parse_str(MINIMAL).unwrap();
        assert_eq!(c.alphabet, 2);
        assert_eq!(c.n, 1000);
        assert_eq!(c.stay_prob, 0.9);
        assert_eq!(c.encoding, Encoding::OddIntegers);
        assert_eq!(c.quantizer, QuantizerSpec::AutoRound);
        assert_eq!(c.train.seed, 7);
        assert_eq!(c.max_homopolymer, 9);
        let c = ExperimentConfig::parse_str("mode = synthetic\nM = 4\nseed = 0").unwrap();
        assert_eq!(c.n, DESK_N);
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{MINIMAL}schemes = gen_cude, fb, ml_pdf\nk = 1,2,4\nchannel = ch.txt\nquantizer = q.txt\nstandardize = true\n"
        );
        let c = ExperimentConfig::parse_str(&text).unwrap();
        assert_eq!(ExperimentConfig::parse_str(&c.to_text()).unwrap(), c);
        let f = ExperimentConfig::parse_str("mode = flowspace\nseed = 1\nwash_cycle = TACG\ndna = ref.fa").unwrap();
        assert_eq!(f.alphabet, 10);
        assert_eq!(f.encoding, Encoding::Identity);
        assert_eq!(ExperimentConfig::parse_str(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn plan_size() {
        let c = ExperimentConfig::parse_str(&format!("{MINIMAL}schemes = gen_cude, fb, ml_pdf\nk = 1, 2, 4")).unwrap();
        assert_eq!(crate::eval::plan_cells(&c).len(), 7);
    }

    #[test]
    fn errors_name_the_problem() {
        let err = |t: &str| ExperimentConfig::parse_str(t).unwrap_err().to_string();
        assert!(err(&format!("{MINIMAL}stay_prob = 1.5")).contains("stay_prob"));
        let e = err(&format!("{MINIMAL}colour = red"));
        assert!(e.contains("colour") && e.contains("line 5"), "{e}");
        let e = err("mode = synthetic\nseed = 1\nM = two");
        assert!(e.contains("line 3"), "{e}");
        assert!(err("mode = synthetic\nM = 2").contains("`seed`"));
        assert!(err("seed = 1\nM = 2").contains("`mode`"));
        assert!(err(&format!("{MINIMAL}schemes = gen_cude, magic")).contains("magic"));
        assert!(err("mode = flowspace\nseed = 1").contains("wash_cycle"));
        assert!(err("mode = flowspace\nseed = 1\nwash_cycle = TACG\nM = 4").contains("max_homopolymer"));
        assert!(err(&format!("{MINIMAL}n = 5")).contains("duplicate"));
        assert!(err(&format!("{MINIMAL}k =")).contains("`k`"));
    }

    #[test]
    fn missing_files_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, format!("{MINIMAL}channel = /nonexistent/ch.txt")).unwrap();
        assert!(parse_config(&path).unwrap_err().to_string().contains("channel"));
        std::fs::write(&path, MINIMAL).unwrap();
        assert!(parse_config(&path).is_ok());
    }
}
