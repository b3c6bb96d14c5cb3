use crate::channel::ChannelModel;
use crate::error::Result;
use crate::scalar::Real;
use crate::source::{ObservationSequence, SymbolSequence};

/// Symbol-by-symbol maximum likelihood: `argmax_a f_a(Y_i)`, ties to the smallest symbol.
pub fn ml_pdf<T: Real>(y: &ObservationSequence<T>, channel: &ChannelModel<T>) -> Result<SymbolSequence> {
    let m = channel.alphabet_size();
    let mut f = vec![T::zero(); m];
    let out = y
        .values()
        .iter()
        .map(|&v| {
            channel.density_vector_into(v, &mut f);
            let mut best = 0;
            for a in 1..m {
                if f[a] > f[best] {
                    best = a;
                }
            }
            best
        })
        .collect();
    SymbolSequence::new(out, m)
}
