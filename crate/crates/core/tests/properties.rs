use gencude_core::channel::{induced_dmc, ChannelModel, Density, Encoding, Quantizer};
use gencude_core::denoise::{
    bayes_response, delta_round, gen_cude_denoise, gen_cude_denoise_with, gen_cude_posteriors, GenCudeModel,
    LossMatrix,
};
use gencude_core::eval::hamming_loss;
use gencude_core::neural::{build_contexts, train, TrainConfig};
use gencude_core::source::{corrupt, gen_markov_source};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binary_task(n: usize, seed: u64) -> (gencude_core::source::SymbolSequence, gencude_core::ObservationsF64, ChannelModel<f64>) {
    let x = gen_markov_source(2, n, 0.9, seed).unwrap();
    let ch = ChannelModel::gaussian(&[-1.0, 1.0], 1.0).unwrap();
    let y = corrupt(&x, &ch, seed + 1).unwrap();
    (x, y, ch)
}

#[test]
fn seven_cell_quantizers_have_full_row_rank() {
    let ch = ChannelModel::gaussian(&Encoding::OddIntegers.values::<f64>(4), 1.0).unwrap();
    let sets = [
        [-2.42, -1.35, -0.48, 0.57, 1.44, 2.36],
        [-2.34, -1.45, -0.41, 0.55, 1.55, 2.32],
        [-2.56, -1.62, -0.4, 0.59, 1.56, 2.55],
        [-2.49, -1.58, -0.68, 0.59, 1.49, 2.51],
        [-2.33, -1.34, -0.58, 0.5, 1.67, 2.64],
    ];
    for b in sets {
        let q = Quantizer::new(b.to_vec()).unwrap();
        let dmc = induced_dmc(&ch, &q).unwrap();
        assert_eq!(dmc.pi().dim(), (4, 7));
        let eye = dmc.pi().dot(&dmc.pi_inv());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((eye[[i, j]] - want).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn non_square_quantizer_runs_end_to_end() {
    let x = gen_markov_source(4, 5000, 0.9, 11).unwrap();
    let ch = ChannelModel::gaussian(&Encoding::OddIntegers.values::<f64>(4), 1.0).unwrap();
    let y = corrupt(&x, &ch, 12).unwrap();
    let q = Quantizer::new(vec![-2.42, -1.35, -0.48, 0.57, 1.44, 2.36]).unwrap();
    let cfg = TrainConfig { epochs: 5, ..TrainConfig::default() };
    let out = gen_cude_denoise(&y, 2, &ch, &q, &LossMatrix::hamming(4), &[32, 32], &cfg).unwrap();
    assert_eq!(out.alphabet(), 4);
    let ml = gencude_core::denoise::ml_pdf(&y, &ch).unwrap();
    assert!(hamming_loss(&x, &out, true, 2).unwrap() < hamming_loss(&x, &ml, true, 2).unwrap());
}

#[test]
fn induced_channel_matches_monte_carlo() {
    let gauss = ChannelModel::gaussian(&Encoding::OddIntegers.values::<f64>(4), 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kde_samples: Vec<f64> = (0..200).map(|i| (i % 7) as f64 * 0.3 - 1.0).collect();
    let kde = ChannelModel::new(vec![
        Density::kde(kde_samples.clone(), 0.6).unwrap(),
        Density::kde(kde_samples.iter().map(|v| v + 2.0).collect(), 0.6).unwrap(),
    ])
    .unwrap();
    let cases = [
        (gauss, Quantizer::new(vec![-2.0, 0.0, 2.0]).unwrap()),
        (kde, Quantizer::new(vec![0.5]).unwrap()),
    ];
    for (ch, q) in cases {
        let pi = induced_dmc(&ch, &q).unwrap();
        for a in 0..ch.alphabet_size() {
            let mut counts = vec![0usize; q.num_cells()];
            let draws = 1_000_000;
            for _ in 0..draws {
                counts[q.quantize(ch.sample_output(a, &mut rng).unwrap())] += 1;
            }
            for (z, &c) in counts.iter().enumerate() {
                let freq = c as f64 / draws as f64;
                assert!((freq - pi.pi()[[a, z]]).abs() < 0.005, "a={a} z={z}: {freq} vs {}", pi.pi()[[a, z]]);
            }
        }
    }
}

#[test]
fn delta_rounding_converges_to_gen_cude() {
    let (_, y, ch) = binary_task(20_000, 21);
    let q = Encoding::OddIntegers.rounding_quantizer(2);
    let loss = LossMatrix::hamming(2);
    let k = 2;
    let model = GenCudeModel::fit(&y, k, &ch, &q, &[32, 32], &TrainConfig::default()).unwrap();
    let net = &model.outcome.network;
    let plain = gen_cude_denoise_with(&y, k, &ch, &q, &loss, net).unwrap();
    let posts = gen_cude_posteriors(&y, k, &ch, &q, net).unwrap();
    let rounded: Vec<usize> = posts.iter().map(|v| bayes_response(&delta_round(v, 1e-4), &loss)).collect();
    let agree = rounded.iter().zip(&plain.symbols()[k..y.len() - k]).filter(|(a, b)| a == b).count();
    assert!(agree as f64 / rounded.len() as f64 >= 0.999, "{agree} of {}", rounded.len());
}

#[test]
fn training_loss_decreases() {
    let (_, y, _) = binary_task(20_000, 31);
    let q = Encoding::OddIntegers.rounding_quantizer::<f64>(2);
    let z = q.quantize_all(y.values());
    let data = build_contexts(y.values(), &z, 3, 2).unwrap();
    let cfg = TrainConfig { seed: 4, ..TrainConfig::default() };
    let a = train(&data, &[32, 32], &cfg).unwrap();
    assert_eq!(a.epoch_losses.len(), 10);
    assert!(a.epoch_losses[9] < a.epoch_losses[0], "{:?}", a.epoch_losses);
    let b = train(&data, &[32, 32], &cfg).unwrap();
    assert_eq!(a.epoch_losses.last(), b.epoch_losses.last());
}

#[test]
fn gen_cude_beats_quantizer_on_binary_markov() {
    let (x, y, ch) = binary_task(30_000, 41);
    let q = Encoding::OddIntegers.rounding_quantizer(2);
    let out = gen_cude_denoise(&y, 3, &ch, &q, &LossMatrix::hamming(2), &[32, 32], &TrainConfig::default()).unwrap();
    let z = gencude_core::source::SymbolSequence::new(q.quantize_all(y.values()), 2).unwrap();
    let e = hamming_loss(&x, &out, true, 3).unwrap();
    assert!(e < 0.6 * hamming_loss(&x, &z, true, 3).unwrap(), "{e}");
}
