//! Majority and linear (tf-idf / bag-of-words) tagging baselines.

mod features;
mod majority;
mod sgd;

pub use features::{
    featurize, question_text, tokenize, CsrMatrix, FeatureConfig, FeatureSpace, Weighting, IDF_FORMULA,
};
pub use majority::{majority_predict, majority_predictions};
pub use sgd::{predict_all, predict_topk, train_ovr_sgd, ClassModel, OvrModel, SgdConfig};

use crate::error::Result;
use crate::ingest::DomainCorpus;
use crate::predictions::PredictionSet;

/// Featurizes `train`, fits the one-vs-rest model on its question tags.
pub fn train_baseline(train: &DomainCorpus, features: &FeatureConfig, sgd: &SgdConfig) -> Result<OvrModel> {
    let texts: Vec<String> = train.questions.iter().map(question_text).collect();
    let (space, x) = featurize(&texts, features)?;
    let labels: Vec<Vec<String>> = train.questions.iter().map(|q| q.tags.clone()).collect();
    train_ovr_sgd(space, &x, &labels, sgd)
}

/// Top-`k` predictions for every question of `corpus`.
pub fn predict_corpus(model: &OvrModel, corpus: &DomainCorpus, k: usize) -> Result<Vec<PredictionSet>> {
    let texts: Vec<String> = corpus.questions.iter().map(question_text).collect();
    let ids: Vec<i64> = corpus.questions.iter().map(|q| q.id).collect();
    let x = model.features.transform(&texts);
    predict_all(model, &ids, &x, k)
}
