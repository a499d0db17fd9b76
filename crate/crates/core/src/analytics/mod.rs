//! Tag usage statistics over a domain corpus.

mod cooccur;
mod coverage;
mod freq;
mod lexicon;
mod overlap;
mod position;
mod stats;

pub use cooccur::{
    build_cooccurrence, ordering_preference, pair_post_coverage, CooccurrenceTable,
    OrderingPreference, PairCoverage, TagPair,
};
pub use coverage::{coverage_counts, top_n_post_coverage, top_n_tag_share};
pub use freq::TagFrequencyTable;
pub use lexicon::{
    tag_char_stats, tag_word_count, tag_word_length_distribution, TagCharStats,
    WordLengthDistribution,
};
pub use overlap::{
    contains_phrase, normalize_text, overlap_row, scoped_text, tag_phrase, tag_post_overlap,
    MatchMode, OverlapRow, OverlapScope,
};
pub use position::{
    all_positional_profiles, default_position_sets, positional_profile, stability_report,
    stability_report_with, PositionSet, PositionalProfile, StabilityReport, STABILITY_THRESHOLDS,
};
pub use stats::{compute_domain_stats, compute_domain_stats_with, DomainStats, DEFAULT_VIEW_THRESHOLD};
