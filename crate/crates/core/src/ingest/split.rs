use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::ingest::corpus::DomainCorpus;
use crate::rng::{SeededRng, PRNG_NAME};

pub const DEFAULT_RATIOS: [f64; 3] = [0.7, 0.1, 0.2];
const MIN_QUESTIONS: usize = 10;

/// Disjoint train/dev/test partition of a corpus' question ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSplit {
    pub domain: String,
    pub seed: u64,
    pub ratios: [f64; 3],
    pub prng: String,
    pub train: Vec<i64>,
    pub dev: Vec<i64>,
    pub test: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPart {
    Train,
    Dev,
    Test,
}

impl CorpusSplit {
    pub fn ids(&self, part: SplitPart) -> &[i64] {
        match part {
            SplitPart::Train => &self.train,
            SplitPart::Dev => &self.dev,
            SplitPart::Test => &self.test,
        }
    }

    pub fn id_set(&self, part: SplitPart) -> HashSet<i64> {
        self.ids(part).iter().copied().collect()
    }

    /// SHA-256 over the canonical JSON of the manifest; identifies the split in vocab files.
    pub fn manifest_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("split serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn part(&self, corpus: &DomainCorpus, part: SplitPart) -> DomainCorpus {
        corpus.subset(&self.id_set(part))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CorpusSplit> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

/// Allocates `total` items to buckets by largest remainder.
///
/// Each bucket gets `floor(total * ratio)`; leftover items go one at a time to
/// the largest fractional parts, earlier buckets winning ties.
pub fn largest_remainder(total: usize, ratios: &[f64]) -> Vec<usize> {
    let exact: Vec<f64> = ratios.iter().map(|r| r * total as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    sizes
}

/// Uniform random train/dev/test partition driven only by `seed`.
///
/// Question ids are sorted, shuffled with the pinned PRNG, and cut into
/// consecutive runs whose sizes come from [`largest_remainder`].
pub fn split_corpus(corpus: &DomainCorpus, ratios: [f64; 3], seed: u64) -> Result<CorpusSplit> {
    if ratios.iter().any(|r| r.is_nan() || *r <= 0.0) {
        return Err(invalid(format!("split ratios must be positive, got {ratios:?}")));
    }
    if (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("split ratios must sum to 1, got {ratios:?}")));
    }
    let n = corpus.questions.len();
    if n < MIN_QUESTIONS {
        return Err(Error::CorpusTooSmall(n));
    }

    let mut ids = corpus.question_ids();
    ids.sort_unstable();
    SeededRng::new(seed).shuffle(&mut ids);

    let sizes = largest_remainder(n, &ratios);
    let test = ids.split_off(sizes[0] + sizes[1]);
    let dev = ids.split_off(sizes[0]);
    let mut split = CorpusSplit {
        domain: corpus.domain.clone(),
        seed,
        ratios,
        prng: PRNG_NAME.into(),
        train: ids,
        dev,
        test,
    };
    split.train.sort_unstable();
    split.dev.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}
