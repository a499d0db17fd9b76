use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::ingest::DomainCorpus;

/// Per-tag question counts with a deterministic frequency ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagFrequencyTable {
    pub domain: String,
    pub counts: BTreeMap<String, u64>,
    /// Tags by descending count, ties in lexicographic order.
    pub ranked: Vec<String>,
}

impl TagFrequencyTable {
    pub fn from_corpus(corpus: &DomainCorpus) -> Self {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for q in &corpus.questions {
            let mut seen = HashSet::with_capacity(q.tags.len());
            for t in &q.tags {
                if seen.insert(t.as_str()) {
                    *counts.entry(t.clone()).or_default() += 1;
                }
            }
        }
        Self::from_counts(corpus.domain.clone(), counts)
    }

    pub fn from_counts(domain: String, counts: BTreeMap<String, u64>) -> Self {
        let mut ranked: Vec<String> = counts.keys().cloned().collect();
        // BTreeMap keys are already sorted, so a stable sort keeps ties lexicographic.
        ranked.sort_by_key(|t| std::cmp::Reverse(counts[t]));
        TagFrequencyTable {
            domain,
            counts,
            ranked,
        }
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn count(&self, tag: &str) -> u64 {
        self.counts.get(tag).copied().unwrap_or(0)
    }

    /// The `n` most frequent tags (all of them if `n` exceeds the tag count).
    pub fn top(&self, n: usize) -> &[String] {
        &self.ranked[..n.min(self.ranked.len())]
    }

    /// Tag → 0-based position in `ranked`.
    pub fn rank_index(&self) -> HashMap<&str, usize> {
        self.ranked
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect()
    }

    /// Total tag incidences, i.e. the sum of tag-sequence lengths.
    pub fn total_incidences(&self) -> u64 {
        self.counts.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_corpus;
    use crate::ingest::fixtures::question;

    #[test]
    fn ranking_breaks_ties_lexicographically() {
        let c = build_corpus(
            vec![
                question(1, &["b", "a"]),
                question(2, &["c", "a"]),
                question(3, &["c", "b"]),
                question(4, &["z"]),
            ],
            "d",
        )
        .unwrap();
        let f = TagFrequencyTable::from_corpus(&c);
        assert_eq!(f.ranked, vec!["a", "b", "c", "z"]);
        assert_eq!(f.count("a"), 2);
        assert_eq!(f.total_incidences(), 7);
        assert_eq!(f.top(2), ["a", "b"]);
        assert_eq!(f.top(99).len(), 4);
    }
}
