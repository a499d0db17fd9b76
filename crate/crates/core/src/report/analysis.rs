use serde::{Deserialize, Serialize};

use crate::analytics::{
    all_positional_profiles, build_cooccurrence, compute_domain_stats_with, coverage_counts, overlap_row,
    pair_post_coverage, stability_report_with, tag_char_stats, tag_word_length_distribution, top_n_tag_share,
    DomainStats, OrderingPreference, OverlapRow, StabilityReport, TagCharStats, TagFrequencyTable,
    WordLengthDistribution,
};
use crate::config::AnalysisSection;
use crate::error::Result;
use crate::ingest::DomainCorpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    pub first: String,
    pub second: String,
    pub count: u64,
}

/// Every tag-usage statistic of one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainAnalysis {
    pub domain: String,
    pub stats: DomainStats,
    pub word_lengths: WordLengthDistribution,
    pub char_stats: Option<TagCharStats>,
    /// Share of the tag space made up by the 100 most frequent tags.
    pub top100_tag_share: f64,
    /// `(n, % questions covered by the n most frequent tags)`.
    pub coverage: Vec<(usize, f64)>,
    /// `(k, % questions containing one of the k most frequent pairs)`.
    pub pair_coverage: Vec<(usize, f64)>,
    pub single_tag_pct: f64,
    pub top_pairs: Vec<PairCount>,
    /// Ordering counts for `top_pairs`, in the same order.
    pub orderings: Vec<OrderingPreference>,
    pub overlap: OverlapRow,
    pub stability: Vec<StabilityReport>,
    /// Most frequent tags with their question counts.
    pub tag_series: Vec<(String, u64)>,
    pub pair_series: Vec<PairCount>,
}

pub fn analyze_domain(corpus: &DomainCorpus, cfg: &AnalysisSection, view_threshold: u64) -> Result<DomainAnalysis> {
    let stats = compute_domain_stats_with(corpus, view_threshold)?;
    let freq = TagFrequencyTable::from_corpus(corpus);
    let covered = coverage_counts(&freq, corpus);
    let nq = corpus.questions.len().max(1) as f64;
    let coverage = cfg
        .coverage_ns
        .iter()
        .map(|&n| (n, 100.0 * covered[n.min(freq.len())] as f64 / nq))
        .collect();

    let co = build_cooccurrence(corpus);
    let pair_coverage: Vec<(usize, f64)> = cfg
        .pair_ks
        .iter()
        .map(|&k| (k, pair_post_coverage(&co, corpus, k).coverage))
        .collect();
    let single_tag_pct = pair_post_coverage(&co, corpus, 0).single_tag;
    let ranked = co.ranked_pairs();
    let pair = |(p, c): &(&crate::analytics::TagPair, u64)| PairCount {
        first: p.0.clone(),
        second: p.1.clone(),
        count: *c,
    };
    let top_pairs: Vec<PairCount> = ranked.iter().take(cfg.top_pairs).map(pair).collect();
    let orderings = top_pairs
        .iter()
        .map(|p| co.ordering_preference(&p.first, &p.second))
        .collect::<Result<Vec<_>>>()?;
    let pair_series = ranked.iter().take(cfg.pair_series_len).map(pair).collect();

    let profiles = all_positional_profiles(corpus);
    let stability = cfg
        .stability_thresholds
        .iter()
        .map(|&d| stability_report_with(&profiles, &cfg.position_sets, d, cfg.stability_min_count))
        .collect::<Result<Vec<_>>>()?;

    Ok(DomainAnalysis {
        domain: corpus.domain.clone(),
        stats,
        word_lengths: tag_word_length_distribution(&freq),
        char_stats: tag_char_stats(&freq),
        top100_tag_share: top_n_tag_share(&freq, 100),
        coverage,
        pair_coverage,
        single_tag_pct,
        top_pairs,
        orderings,
        overlap: overlap_row(corpus),
        stability,
        tag_series: freq
            .top(cfg.tag_series_len)
            .iter()
            .map(|t| (t.clone(), freq.count(t)))
            .collect(),
        pair_series,
    })
}
