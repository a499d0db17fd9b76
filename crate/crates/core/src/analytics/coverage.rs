use crate::analytics::freq::TagFrequencyTable;
use crate::ingest::DomainCorpus;

/// For each question, the best (smallest) frequency rank among its tags.
/// Questions whose tags are all absent from `freq` get `usize::MAX`.
pub(crate) fn best_ranks(freq: &TagFrequencyTable, corpus: &DomainCorpus) -> Vec<usize> {
    let rank = freq.rank_index();
    corpus
        .questions
        .iter()
        .map(|q| {
            q.tags
                .iter()
                .filter_map(|t| rank.get(t.as_str()).copied())
                .min()
                .unwrap_or(usize::MAX)
        })
        .collect()
}

/// `covered[n]` = number of questions covered by the `n` most frequent tags, for `n` in `0..=|T|`.
pub fn coverage_counts(freq: &TagFrequencyTable, corpus: &DomainCorpus) -> Vec<u64> {
    let mut hist = vec![0u64; freq.len() + 1];
    for r in best_ranks(freq, corpus) {
        if r < freq.len() {
            hist[r + 1] += 1;
        }
    }
    for i in 1..hist.len() {
        hist[i] += hist[i - 1];
    }
    hist
}

/// Percentage of questions that carry at least one of the `n` most frequent tags.
/// `n` larger than the tag count is clamped.
pub fn top_n_post_coverage(freq: &TagFrequencyTable, corpus: &DomainCorpus, n: usize) -> f64 {
    if corpus.questions.is_empty() {
        return 0.0;
    }
    let n = n.min(freq.len());
    let covered = best_ranks(freq, corpus).into_iter().filter(|&r| r < n).count();
    100.0 * covered as f64 / corpus.questions.len() as f64
}

/// Share of the tag space taken by the `n` most frequent tags ("100Tag%").
pub fn top_n_tag_share(freq: &TagFrequencyTable, n: usize) -> f64 {
    if freq.is_empty() {
        return 0.0;
    }
    100.0 * n.min(freq.len()) as f64 / freq.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_corpus;
    use crate::ingest::fixtures::question;

    #[test]
    fn full_tag_set_covers_everything() {
        let c = build_corpus(
            vec![question(1, &["a"]), question(2, &["b", "c"]), question(3, &["d"])],
            "d",
        )
        .unwrap();
        let f = TagFrequencyTable::from_corpus(&c);
        assert_eq!(top_n_post_coverage(&f, &c, f.len()), 100.0);
        assert_eq!(top_n_post_coverage(&f, &c, 1000), 100.0);
        assert_eq!(coverage_counts(&f, &c), vec![0, 1, 2, 2, 3]);
    }
}
