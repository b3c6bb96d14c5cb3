use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use ndarray::Array2;

use super::{alignment_similarity, hamming_loss, normalized_error};
use crate::channel::{induced_dmc, load_channel, load_quantizer, ChannelModel, Quantizer};
use crate::config::{ExperimentConfig, Mode, QuantizerSpec};
use crate::denoise::{
    baum_welch, cude_denoise, dude_denoise, fb_recursion, gen_cude_denoise, gen_dude_denoise, ml_pdf, BaumWelchConfig,
    LossMatrix,
};
use crate::error::{Error, Result};
use crate::source::{
    corrupt, dna_to_flow, flow_to_dna, gen_dna, gen_markov_source, read_dna, symmetric_transition,
    ObservationSequence, SymbolSequence, WashCycle,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    GenCude,
    GenDude,
    QuantizeCude,
    QuantizeDude,
    /// Forward-backward with the true transition matrix (synthetic mode only).
    Fb,
    /// Forward-backward with a transition matrix estimated from the noisy data.
    BaumWelch,
    MlPdf,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::GenCude,
        Scheme::GenDude,
        Scheme::QuantizeCude,
        Scheme::QuantizeDude,
        Scheme::Fb,
        Scheme::BaumWelch,
        Scheme::MlPdf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::GenCude => "gen_cude",
            Scheme::GenDude => "gen_dude",
            Scheme::QuantizeCude => "quantize_cude",
            Scheme::QuantizeDude => "quantize_dude",
            Scheme::Fb => "fb",
            Scheme::BaumWelch => "baum_welch",
            Scheme::MlPdf => "ml_pdf",
        }
    }

    /// Whether the output depends on the window `k`.
    pub fn uses_window(self) -> bool {
        self != Scheme::MlPdf
    }

    pub fn default_set() -> Vec<Scheme> {
        vec![Scheme::GenCude, Scheme::QuantizeCude, Scheme::QuantizeDude, Scheme::Fb, Scheme::MlPdf]
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Scheme::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Scheme::ALL.iter().map(|x| x.as_str()).collect();
            format!("unknown scheme `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// One (scheme, k) cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseRun {
    pub scheme: Scheme,
    /// `None` for schemes that ignore the window.
    pub k: Option<usize>,
    pub n: usize,
    pub alphabet: usize,
    pub raw_error: Option<f64>,
    pub interior_error: Option<f64>,
    /// Interior error divided by the simple quantizer's interior error.
    pub normalized_error: Option<f64>,
    /// Flowspace mode only.
    pub similarity: Option<f64>,
    pub runtime_seconds: f64,
    pub seed: u64,
    pub error_message: Option<String>,
}

pub const CSV_COLUMNS: [&str; 11] = [
    "scheme",
    "k",
    "n",
    "M",
    "raw_error",
    "interior_error",
    "normalized_error",
    "similarity",
    "runtime_seconds",
    "seed",
    "error_message",
];

/// Cells in execution order: schemes in config order, each over every `k`
/// (once for window-free schemes).
pub fn plan_cells(cfg: &ExperimentConfig) -> Vec<(Scheme, Option<usize>)> {
    let mut cells = Vec::new();
    for &s in &cfg.schemes {
        if s.uses_window() {
            cells.extend(cfg.ks.iter().map(|&k| (s, Some(k))));
        } else {
            cells.push((s, None));
        }
    }
    cells
}

/// Clean and noisy data for one experiment, plus the channel and
/// quantizer they were produced with.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub clean: SymbolSequence,
    pub noisy: ObservationSequence<f64>,
    pub channel: ChannelModel<f64>,
    pub quantizer: Quantizer<f64>,
    /// True transition matrix (synthetic mode).
    pub transition: Option<Array2<f64>>,
    /// Wash cycle (flowspace mode).
    pub cycle: Option<WashCycle>,
}

impl Simulation {
    pub fn quantized(&self) -> Result<SymbolSequence> {
        SymbolSequence::new(self.quantizer.quantize_all(self.noisy.values()), self.quantizer.num_cells())
    }
}

/// The configured channel: the descriptor file if given, otherwise Gaussian
/// noise of `noise_stddev` around the encoded symbol values.
pub fn build_channel(cfg: &ExperimentConfig) -> Result<ChannelModel<f64>> {
    let m = cfg.alphabet;
    let channel = match &cfg.channel {
        Some(p) => load_channel::<f64>(p)?,
        None => ChannelModel::gaussian(&cfg.encoding.values::<f64>(m), cfg.noise_stddev)?,
    };
    if channel.alphabet_size() != m {
        return Err(Error::arg(format!("channel has {} densities but M = {m}", channel.alphabet_size())));
    }
    Ok(channel)
}

pub fn build_quantizer(cfg: &ExperimentConfig) -> Result<Quantizer<f64>> {
    match &cfg.quantizer {
        QuantizerSpec::AutoRound => Ok(cfg.encoding.rounding_quantizer(cfg.alphabet)),
        QuantizerSpec::File(p) => load_quantizer(p),
    }
}

/// The true transition matrix in synthetic mode.
pub fn true_transition(cfg: &ExperimentConfig) -> Option<Array2<f64>> {
    (cfg.mode == Mode::Synthetic).then(|| symmetric_transition(cfg.alphabet, cfg.stay_prob))
}

/// Generates the clean source and its noisy observation. The source uses
/// `seed`, the channel noise `seed + 1`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Simulation> {
    let m = cfg.alphabet;
    let (clean, cycle) = match cfg.mode {
        Mode::Synthetic => (gen_markov_source(m, cfg.n, cfg.stay_prob, cfg.seed)?, None),
        Mode::Flowspace => {
            let cycle = WashCycle::new(cfg.wash_cycle.as_deref().unwrap_or("TACG"))?;
            let flows = match &cfg.dna {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                    dna_to_flow(&read_dna(&text), &cycle, cfg.max_homopolymer)?.flows.into_symbols()
                }
                None => {
                    let mut len = cfg.n;
                    loop {
                        let dna = gen_dna(len, cfg.dna_repeat_prob, cfg.seed);
                        let f = dna_to_flow(&dna, &cycle, cfg.max_homopolymer)?.flows.into_symbols();
                        if f.len() >= cfg.n {
                            break f;
                        }
                        len *= 2;
                    }
                }
            };
            let n = flows.len().min(cfg.n);
            (SymbolSequence::new(flows[..n].to_vec(), m)?, Some(cycle))
        }
    };
    let channel = build_channel(cfg)?;
    let quantizer = build_quantizer(cfg)?;
    let noisy = corrupt(&clean, &channel, cfg.seed.wrapping_add(1))?;
    Ok(Simulation { clean, noisy, channel, quantizer, transition: true_transition(cfg), cycle })
}

/// Runs one scheme on `y`. Training settings, network widths and the
/// tuple cap come from `cfg`; `transition` is required by [`Scheme::Fb`].
pub fn run_scheme(
    scheme: Scheme,
    k: usize,
    y: &ObservationSequence<f64>,
    channel: &ChannelModel<f64>,
    q: &Quantizer<f64>,
    transition: Option<&Array2<f64>>,
    cfg: &ExperimentConfig,
) -> Result<SymbolSequence> {
    let loss = LossMatrix::hamming(channel.alphabet_size());
    let quantized = || -> Result<(SymbolSequence, Array2<f64>)> {
        let z = SymbolSequence::new(q.quantize_all(y.values()), q.num_cells())?;
        Ok((z, induced_dmc(channel, q)?.pi().to_owned()))
    };
    match scheme {
        Scheme::GenCude => gen_cude_denoise(y, k, channel, q, &loss, &cfg.hidden, &cfg.train),
        Scheme::GenDude => gen_dude_denoise(y, k, channel, q, &loss, cfg.tuple_cap),
        Scheme::QuantizeCude => {
            let (z, pi) = quantized()?;
            cude_denoise(&z, k, pi.view(), &loss, &cfg.hidden, &cfg.train)
        }
        Scheme::QuantizeDude => {
            let (z, pi) = quantized()?;
            dude_denoise(&z, k, pi.view(), &loss)
        }
        Scheme::Fb => {
            let t = transition
                .ok_or_else(|| Error::arg("fb needs the true Markov transition; use baum_welch in flowspace mode"))?;
            fb_recursion(y, t.view(), channel, &loss)
        }
        Scheme::BaumWelch => {
            let fit = baum_welch(y, channel, channel.alphabet_size(), &BaumWelchConfig::default())?;
            fb_recursion(y, fit.transition.view(), channel, &loss)
        }
        Scheme::MlPdf => ml_pdf(y, channel),
    }
}

struct Prepared {
    sim: Simulation,
    /// Simple quantizer output (or ML when cells and symbols differ).
    baseline: SymbolSequence,
}

fn score(p: &Prepared, xhat: &SymbolSequence, k: usize) -> Result<(f64, f64, Option<f64>, Option<f64>)> {
    let x = &p.sim.clean;
    let raw = hamming_loss(x, xhat, false, 0)?;
    let interior = hamming_loss(x, xhat, true, k)?;
    let base = hamming_loss(x, &p.baseline, true, k)?;
    let normalized = normalized_error(interior, base).ok();
    let similarity = match &p.sim.cycle {
        Some(c) => Some(alignment_similarity(&flow_to_dna(x.symbols(), c), &flow_to_dna(xhat.symbols(), c))?),
        None => None,
    };
    Ok((raw, interior, normalized, similarity))
}

/// Generates data, runs every planned cell and writes the CSV to
/// `cfg.output`. Scheme failures become rows with `error_message` set;
/// only data preparation and file errors abort.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<DenoiseRun>> {
    cfg.validate()?;
    let sim = simulate(cfg)?;
    let baseline = if sim.quantizer.num_cells() == cfg.alphabet {
        SymbolSequence::new(sim.quantizer.quantize_all(sim.noisy.values()), cfg.alphabet)?
    } else {
        ml_pdf(&sim.noisy, &sim.channel)?
    };
    let prepared = Prepared { sim, baseline };
    let mut runs = Vec::new();
    for (scheme, k) in plan_cells(cfg) {
        let start = Instant::now();
        let sim = &prepared.sim;
        let result = run_scheme(scheme, k.unwrap_or(0), &sim.noisy, &sim.channel, &sim.quantizer, sim.transition.as_ref(), cfg);
        let runtime_seconds = start.elapsed().as_secs_f64();
        let mut run = DenoiseRun {
            scheme,
            k,
            n: prepared.sim.clean.len(),
            alphabet: cfg.alphabet,
            raw_error: None,
            interior_error: None,
            normalized_error: None,
            similarity: None,
            runtime_seconds,
            seed: cfg.seed,
            error_message: None,
        };
        match result.and_then(|xhat| score(&prepared, &xhat, k.unwrap_or(0))) {
            Ok((raw, interior, normalized, similarity)) => {
                run.raw_error = Some(raw);
                run.interior_error = Some(interior);
                run.normalized_error = normalized;
                run.similarity = similarity;
            }
            Err(e) => run.error_message = Some(e.to_string()),
        }
        runs.push(run);
    }
    write_csv_file(&cfg.output, &runs)?;
    Ok(runs)
}

fn write_csv_file(path: &Path, runs: &[DenoiseRun]) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, runs)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Writes the header and one row per run.
pub fn write_csv<W: Write>(out: W, runs: &[DenoiseRun]) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in runs {
        w.write_record([
            r.scheme.to_string(),
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.n.to_string(),
            r.alphabet.to_string(),
            opt(r.raw_error),
            opt(r.interior_error),
            opt(r.normalized_error),
            opt(r.similarity),
            r.runtime_seconds.to_string(),
            r.seed.to_string(),
            r.error_message.clone().unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str, out: &Path) -> ExperimentConfig {
        let text = format!("mode = synthetic\nM = 2\nn = 2000\nseed = 5\nepochs = 2\nhidden = 8\noutput = {}\n{extra}", out.display());
        ExperimentConfig::parse_str(&text).unwrap()
    }

    fn strip_runtime(csv: &str) -> Vec<Vec<String>> {
        csv.lines()
            .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 8).map(|(_, f)| f.to_string()).collect())
            .collect()
    }

    #[test]
    fn deterministic_csv() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a.csv");
        let c = cfg("schemes = gen_cude, quantize_dude, fb, ml_pdf\nk = 1, 2", &out);
        let runs = run_experiment(&c).unwrap();
        assert_eq!(runs.len(), 7);
        let first = std::fs::read_to_string(&out).unwrap();
        run_experiment(&c).unwrap();
        let second = std::fs::read_to_string(&out).unwrap();
        assert_eq!(strip_runtime(&first), strip_runtime(&second));
        assert_eq!(first.lines().next().unwrap(), CSV_COLUMNS.join(","));
        let ml: Vec<_> = runs.iter().filter(|r| r.scheme == Scheme::MlPdf).collect();
        assert_eq!(ml.len(), 1);
        assert_eq!(ml[0].k, None);
        assert!(runs.iter().all(|r| r.error_message.is_none() && r.similarity.is_none()));
    }

    #[test]
    fn failures_become_rows() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("b.csv");
        let c = cfg("schemes = gen_dude, ml_pdf\nk = 1\ntuple_cap = 4", &out);
        let runs = run_experiment(&c).unwrap();
        assert!(runs[0].error_message.as_deref().unwrap().contains("cap"));
        assert!(runs[0].raw_error.is_none());
        assert!(runs[1].error_message.is_none());
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn flowspace_reports_similarity() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.csv");
        let text = format!(
            "mode = flowspace\nseed = 2\nn = 3000\nwash_cycle = TACG\nnoise_stddev = 0.35\nschemes = quantize_dude, fb, ml_pdf\nk = 1\noutput = {}",
            out.display()
        );
        let runs = run_experiment(&ExperimentConfig::parse_str(&text).unwrap()).unwrap();
        assert_eq!(runs[0].n, 3000);
        assert!(runs[0].similarity.unwrap() > 0.5);
        assert!(runs[1].error_message.as_deref().unwrap().contains("baum_welch"));
        assert!(runs[2].similarity.is_some());
    }
}
