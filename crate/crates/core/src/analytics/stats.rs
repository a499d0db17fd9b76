use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::analytics::freq::TagFrequencyTable;
use crate::error::{Error, Result};
use crate::ingest::DomainCorpus;

/// Default view threshold for the "V>100" column.
pub const DEFAULT_VIEW_THRESHOLD: u64 = 100;

/// Domain-level volume and engagement statistics, all over questions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainStats {
    pub domain: String,
    pub q_count: u64,
    pub tag_count: u64,
    /// Questions per distinct tag.
    pub ppt: f64,
    pub avg_tags: f64,
    pub view_threshold: u64,
    /// Questions with more than `view_threshold` views.
    pub views_gt_threshold: u64,
    /// Distinct question owners.
    pub askers: u64,
    /// Questions per asker.
    pub qpa: f64,
    pub pct_no_answers: f64,
    pub pct_no_scores: f64,
    pub pct_no_accepted: f64,
    pub max_answers: u64,
    pub max_views: u64,
}

pub fn compute_domain_stats(corpus: &DomainCorpus) -> Result<DomainStats> {
    compute_domain_stats_with(corpus, DEFAULT_VIEW_THRESHOLD)
}

pub fn compute_domain_stats_with(corpus: &DomainCorpus, view_threshold: u64) -> Result<DomainStats> {
    let questions = &corpus.questions;
    if questions.is_empty() {
        return Err(Error::EmptyCorpus("no questions to compute statistics over"));
    }
    let freq = TagFrequencyTable::from_corpus(corpus);
    let q = questions.len() as f64;
    let pct = |n: usize| 100.0 * n as f64 / q;

    let askers: HashSet<_> = questions.iter().filter_map(|p| p.owner_key()).collect();
    let tag_incidences: usize = questions.iter().map(|p| p.tags.len()).sum();

    Ok(DomainStats {
        domain: corpus.domain.clone(),
        q_count: questions.len() as u64,
        tag_count: freq.len() as u64,
        ppt: q / freq.len() as f64,
        avg_tags: tag_incidences as f64 / q,
        view_threshold,
        views_gt_threshold: questions.iter().filter(|p| p.view_count > view_threshold).count() as u64,
        askers: askers.len() as u64,
        qpa: q / askers.len() as f64,
        pct_no_answers: pct(questions.iter().filter(|p| p.answer_count == 0).count()),
        pct_no_scores: pct(questions.iter().filter(|p| p.score == 0).count()),
        pct_no_accepted: pct(questions.iter().filter(|p| p.accepted_answer_id.is_none()).count()),
        max_answers: questions.iter().map(|p| p.answer_count).max().unwrap_or(0),
        max_views: questions.iter().map(|p| p.view_count).max().unwrap_or(0),
    })
}
