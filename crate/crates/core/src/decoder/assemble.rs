use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::decoder::stream::{ScoredTag, TokenKind, TokenStream};
use crate::error::{invalid, Result};
use crate::ingest::MAX_TAGS;
use crate::predictions::{Prediction, PredictionSet, Source};

/// Name of the token-score combination, recorded in prediction file metadata.
pub const COMBINED_SCORE_RULE: &str = "geometric-mean-of-token-probabilities";

/// A tag assembled from generated sub-word tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedTag {
    pub text: String,
    pub token_count: usize,
    /// Geometric mean of the token probabilities.
    pub combined_score: f64,
}

/// Joins the tokens between consecutive separators into tags.
///
/// Rules, in order: punctuation tokens are skipped; the remaining tokens of a
/// segment are concatenated without spaces, lowercased, and any internal
/// whitespace run becomes a hyphen; a tag that is empty or starts or ends
/// with `-` is dropped; a tag equal to the previously kept tag is collapsed
/// into it. Tokens before the first or after the last separator do not form
/// a tag.
pub fn assemble_tags(stream: &TokenStream) -> Vec<RefinedTag> {
    let mut out: Vec<RefinedTag> = Vec::new();
    let mut segment: Option<(String, usize, f64)> = None;

    for tok in &stream.tokens {
        match tok.kind {
            TokenKind::Separator => {
                if let Some((text, count, log_sum)) = segment.take() {
                    if let Some(tag) = finish(&text, count, log_sum) {
                        if out.last().map(|t| &t.text) != Some(&tag.text) {
                            out.push(tag);
                        }
                    }
                }
                segment = Some((String::new(), 0, 0.0));
            }
            TokenKind::Punctuation => {}
            TokenKind::Tag => {
                if TokenKind::classify(&tok.text) == TokenKind::Punctuation {
                    continue;
                }
                if let Some((text, count, log_sum)) = segment.as_mut() {
                    text.push_str(&tok.text);
                    *count += 1;
                    *log_sum += tok.log_prob;
                }
            }
        }
    }
    out
}

fn finish(raw: &str, token_count: usize, log_sum: f64) -> Option<RefinedTag> {
    if token_count == 0 {
        return None;
    }
    let text = raw
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join("-");
    if text.is_empty() || text.starts_with('-') || text.ends_with('-') {
        return None;
    }
    Some(RefinedTag {
        text,
        token_count,
        combined_score: (log_sum / token_count as f64).exp(),
    })
}

/// The `k` highest-scoring tags; equal scores keep their stream order.
pub fn select_topk_refined(tags: &[RefinedTag], k: usize) -> Vec<RefinedTag> {
    let mut v = tags.to_vec();
    v.sort_by(|a, b| b.combined_score.total_cmp(&a.combined_score));
    v.truncate(k);
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeOptions {
    pub n_meta: usize,
    pub n_refined: usize,
    /// Keep reading refined candidates past duplicates until `n_refined` are placed.
    pub backfill: bool,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions {
            n_meta: 2,
            n_refined: 3,
            backfill: false,
        }
    }
}

/// Final prediction: the top `n_meta` meta tags, then up to `n_refined` refined tags.
///
/// Meta tags are ranked by score first (stable). A tag already placed is
/// skipped without taking a replacement unless `backfill` is set.
pub fn merge_predictions(
    post_id: i64,
    meta: &[ScoredTag],
    refined: &[RefinedTag],
    opts: MergeOptions,
) -> Result<PredictionSet> {
    if opts.n_meta + opts.n_refined > MAX_TAGS {
        return Err(invalid(format!(
            "{} meta + {} refined tags exceed the limit of {MAX_TAGS}",
            opts.n_meta, opts.n_refined
        )));
    }
    let mut ranked_meta: Vec<&ScoredTag> = meta.iter().collect();
    ranked_meta.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut seen: HashSet<&str> = HashSet::new();
    let mut out = Vec::with_capacity(MAX_TAGS);
    for m in ranked_meta.into_iter().take(opts.n_meta) {
        if seen.insert(m.tag.as_str()) {
            out.push(Prediction {
                tag: m.tag.clone(),
                score: m.score,
                source: Source::PHead,
            });
        }
    }

    let mut placed = 0;
    for (i, r) in refined.iter().enumerate() {
        if placed == opts.n_refined || (!opts.backfill && i == opts.n_refined) {
            break;
        }
        if seen.insert(r.text.as_str()) {
            out.push(Prediction {
                tag: r.text.clone(),
                score: r.combined_score,
                source: Source::GHead,
            });
            placed += 1;
        }
    }
    PredictionSet::new(post_id, out)
}

/// Stream → assembled tags → top refined tags → merged prediction for one post.
pub fn decode_post(meta: &[ScoredTag], stream: &TokenStream, opts: MergeOptions) -> Result<PredictionSet> {
    let assembled = assemble_tags(stream);
    let pool = if opts.backfill {
        select_topk_refined(&assembled, assembled.len())
    } else {
        select_topk_refined(&assembled, opts.n_refined)
    };
    merge_predictions(stream.post_id, meta, &pool, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::stream::Token;

    fn sep() -> Token {
        Token::separator(1.0)
    }

    fn w(t: &str) -> Token {
        Token::word(t, 0.5)
    }

    fn texts(tags: &[RefinedTag]) -> Vec<&str> {
        tags.iter().map(|t| t.text.as_str()).collect()
    }

    fn meta(tags: &[&str]) -> Vec<ScoredTag> {
        tags.iter()
            .enumerate()
            .map(|(i, t)| ScoredTag {
                tag: t.to_string(),
                score: 1.0 - i as f64 * 0.1,
            })
            .collect()
    }

    fn refined(tags: &[&str]) -> Vec<RefinedTag> {
        tags.iter()
            .enumerate()
            .map(|(i, t)| RefinedTag {
                text: t.to_string(),
                token_count: 1,
                combined_score: 0.9 - i as f64 * 0.1,
            })
            .collect()
    }

    #[test]
    fn empty_stream() {
        assert!(assemble_tags(&TokenStream::default()).is_empty());
    }

    #[test]
    fn subword_join() {
        let s = TokenStream::new(1, vec![sep(), w("visa"), w("-refusals"), sep()]);
        assert_eq!(texts(&assemble_tags(&s)), ["visa-refusals"]);
    }

    #[test]
    fn hyphen_and_adjacent_duplicate_rules() {
        let s = TokenStream::new(
            1,
            vec![sep(), w("-foo"), sep(), w("bar"), sep(), w("bar"), sep()],
        );
        assert_eq!(texts(&assemble_tags(&s)), ["bar"]);
    }

    #[test]
    fn punctuation_skipped_and_interior_repeats_kept() {
        let s = TokenStream::new(
            1,
            vec![sep(), w("bar"), w("."), w("bar"), sep(), w("?"), sep(), w("foo-"), sep()],
        );
        assert_eq!(texts(&assemble_tags(&s)), ["barbar"]);
    }

    #[test]
    fn unterminated_segments_ignored() {
        let s = TokenStream::new(1, vec![w("lead"), sep(), w("mid"), sep(), w("tail")]);
        assert_eq!(texts(&assemble_tags(&s)), ["mid"]);
    }

    #[test]
    fn whitespace_tokens_become_hyphenated() {
        let s = TokenStream::new(1, vec![sep(), w(" Visa"), w(" Refusals"), sep()]);
        assert_eq!(texts(&assemble_tags(&s)), ["visa-refusals"]);
    }

    #[test]
    fn geometric_mean_score() {
        let s = TokenStream::new(1, vec![sep(), Token::word("a", 0.8), Token::word("b", 0.2), sep()]);
        let t = &assemble_tags(&s)[0];
        assert_eq!(t.token_count, 2);
        assert!((t.combined_score - 0.4).abs() < 1e-12);
    }

    #[test]
    fn topk_by_score() {
        let tags = vec![
            RefinedTag { text: "x".into(), token_count: 1, combined_score: 0.9 },
            RefinedTag { text: "y".into(), token_count: 1, combined_score: 0.5 },
            RefinedTag { text: "z".into(), token_count: 1, combined_score: 0.7 },
        ];
        assert_eq!(texts(&select_topk_refined(&tags, 2)), ["x", "z"]);
        assert!(select_topk_refined(&tags, 0).is_empty());
    }

    #[test]
    fn topk_ties_keep_stream_order() {
        let tags = refined(&["p", "q", "r"])
            .into_iter()
            .map(|mut t| {
                t.combined_score = 0.5;
                t
            })
            .collect::<Vec<_>>();
        assert_eq!(texts(&select_topk_refined(&tags, 2)), ["p", "q"]);
    }

    #[test]
    fn disjoint_merge() {
        let s = merge_predictions(1, &meta(&["a", "b"]), &refined(&["c", "d", "e"]), MergeOptions::default()).unwrap();
        assert_eq!(s.tag_strs().collect::<Vec<_>>(), ["a", "b", "c", "d", "e"]);
        assert_eq!(s.tags[0].source, Source::PHead);
        assert_eq!(s.tags[4].source, Source::GHead);
    }

    #[test]
    fn duplicates_dropped_without_replacement() {
        let s = merge_predictions(1, &meta(&["a", "b"]), &refined(&["b", "c", "d"]), MergeOptions::default()).unwrap();
        assert_eq!(s.tag_strs().collect::<Vec<_>>(), ["a", "b", "c", "d"]);
        let s = merge_predictions(
            1,
            &meta(&["a", "b"]),
            &refined(&["b", "c", "d", "e"]),
            MergeOptions { backfill: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(s.tag_strs().collect::<Vec<_>>(), ["a", "b", "c", "d", "e"]);
    }

    #[test]
    fn meta_repeats_collapse() {
        let s = merge_predictions(1, &meta(&["a", "a", "b"]), &[], MergeOptions::default()).unwrap();
        assert_eq!(s.tag_strs().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn platform_bound_enforced() {
        let opts = MergeOptions { n_meta: 3, n_refined: 3, backfill: false };
        assert!(merge_predictions(1, &[], &[], opts).is_err());
    }
}
