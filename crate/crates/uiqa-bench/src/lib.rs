//! Shared data builders for the benchmark targets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uiqa_core::subjective::{MosEntry, MosTable};
use uiqa_core::ImageBuffer;

/// Deterministic textured RGB image of the given size.
pub fn bench_image(width: u32, height: u32) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE7C);
    ImageBuffer::from_fn_rgb(width, height, |x, y| {
        let base = ((x * 3 + y * 5) % 200) as u8;
        [
            base.saturating_add(rng.random_range(0..40)),
            base,
            255 - base,
        ]
    })
}

/// Paired score/MOS vectors with tie-heavy integer scores.
pub fn bench_vectors(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5C0);
    let pred: Vec<f64> = (0..n).map(|_| rng.random_range(0..500) as f64 / 7.0).collect();
    let mos: Vec<f64> = pred
        .iter()
        .map(|&p| p * 0.8 + rng.random_range(0.0..20.0))
        .collect();
    (pred, mos)
}

/// A MOS table of `n` images with distinct values and modest variance.
pub fn bench_mos(n: usize) -> (MosTable, Vec<String>) {
    let mut entries = std::collections::BTreeMap::new();
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("img_{i:04}");
        entries.insert(
            id.clone(),
            MosEntry {
                mos: (i as f64 * 37.0) % 100.0 + i as f64 * 1e-3,
                raw_mean: 3.0,
                variance: 0.4,
                n_raters: 21,
                iqr: 0.5,
            },
        );
        ids.push(id);
    }
    (MosTable::from_entries(entries), ids)
}
