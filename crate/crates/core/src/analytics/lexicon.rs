use serde::{Deserialize, Serialize};

use crate::analytics::freq::TagFrequencyTable;

/// Number of words in a tag, counting hyphen-separated parts.
pub fn tag_word_count(tag: &str) -> usize {
    tag.split('-').filter(|p| !p.is_empty()).count().max(1)
}

/// Percentage of distinct tags having 1, 2, 3, 4, 5 and more than 5 words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordLengthDistribution {
    pub buckets: [f64; 6],
}

impl WordLengthDistribution {
    pub const LABELS: [&'static str; 6] = ["1", "2", "3", "4", "5", ">5"];

    pub fn bucket(&self, words: usize) -> f64 {
        self.buckets[words.clamp(1, 6) - 1]
    }
}

pub fn tag_word_length_distribution(freq: &TagFrequencyTable) -> WordLengthDistribution {
    let mut counts = [0u64; 6];
    for tag in &freq.ranked {
        counts[tag_word_count(tag).min(6) - 1] += 1;
    }
    let total = freq.len().max(1) as f64;
    WordLengthDistribution {
        buckets: counts.map(|c| 100.0 * c as f64 / total),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagCharStats {
    pub shortest: String,
    pub shortest_len: usize,
    pub longest: String,
    pub longest_len: usize,
    pub average_len: f64,
}

/// Shortest and longest tag (in characters) and the mean length over distinct tags.
///
/// Among equally long tags the lexicographically smallest is reported.
/// Returns `None` for an empty table.
pub fn tag_char_stats(freq: &TagFrequencyTable) -> Option<TagCharStats> {
    let mut tags: Vec<(&str, usize)> = freq
        .counts
        .keys()
        .map(|t| (t.as_str(), t.chars().count()))
        .collect();
    if tags.is_empty() {
        return None;
    }
    let total: usize = tags.iter().map(|(_, l)| l).sum();
    let average_len = total as f64 / tags.len() as f64;
    // Keys are sorted, so min/max by length keep the first (smallest) tag on ties.
    tags.sort_by_key(|&(_, l)| l);
    let (shortest, shortest_len) = tags[0];
    let max_len = tags[tags.len() - 1].1;
    let (longest, longest_len) = *tags.iter().find(|(_, l)| *l == max_len).unwrap();
    Some(TagCharStats {
        shortest: shortest.to_owned(),
        shortest_len,
        longest: longest.to_owned(),
        longest_len,
        average_len,
    })
}
