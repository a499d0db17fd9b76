use crate::analytics::TagFrequencyTable;
use crate::error::Result;
use crate::ingest::{DomainCorpus, MAX_TAGS};
use crate::predictions::{Prediction, PredictionSet, Source};

/// The five most frequent training tags, ties broken lexicographically.
/// Shorter when the training split has fewer distinct tags.
pub fn majority_predict(train: &DomainCorpus) -> Vec<(String, u64)> {
    let freq = TagFrequencyTable::from_corpus(train);
    freq.top(MAX_TAGS)
        .iter()
        .map(|t| (t.clone(), freq.count(t)))
        .collect()
}

/// The same majority list for every post, scored by training-question share.
pub fn majority_predictions(train: &DomainCorpus, post_ids: &[i64], k: usize) -> Result<Vec<PredictionSet>> {
    let n = train.questions.len().max(1) as f64;
    let top: Vec<Prediction> = majority_predict(train)
        .into_iter()
        .map(|(tag, c)| Prediction {
            tag,
            score: c as f64 / n,
            source: Source::Majority,
        })
        .collect();
    post_ids
        .iter()
        .map(|&id| PredictionSet::from_ranked(id, top.iter().cloned(), k))
        .collect()
}
