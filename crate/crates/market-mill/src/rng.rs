use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream-splitting rule: every series owns ChaCha8 stream `series_index` of
/// the generator keyed by the batch seed. Streams never overlap, so a batch
/// is bit-identical no matter how series are scheduled across threads.
pub fn series_rng(seed: u64, series_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(series_index);
    rng
}

/// Draws a uniform in the open interval (0, 1). Used where a closed-form
/// transform must produce a strictly positive magnitude.
#[inline]
pub(crate) fn unit_open<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
