//! Random oversampling: duplicate minority rows until classes balance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Dataset;

/// Resample every minority class with replacement up to the majority
/// count. Original rows are untouched and keep their order; synthesized
/// rows are exact copies appended at the end, grouped by class id.
pub fn random_oversample(dataset: &Dataset, seed: u64) -> Dataset {
    let counts = dataset.class_counts();
    let majority = counts.iter().copied().max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut out = dataset.clone();
    for (class, &count) in counts.iter().enumerate() {
        if count == 0 || count == majority {
            continue;
        }
        let members: Vec<usize> = dataset
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        for _ in 0..majority - count {
            let pick = members[rng.gen_range(0..members.len())];
            out.features.push(dataset.features[pick].clone());
            out.labels.push(class);
        }
    }
    out
}
