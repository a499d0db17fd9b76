use serde::{Deserialize, Serialize};

use crate::analytics::lexicon::tag_word_count;
use crate::ingest::{strip_html, DomainCorpus, Post};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OverlapScope {
    Title,
    TitleBody,
    TitleBodyAnswers,
}

impl OverlapScope {
    pub const ALL: [OverlapScope; 3] = [
        OverlapScope::Title,
        OverlapScope::TitleBody,
        OverlapScope::TitleBodyAnswers,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OverlapScope::Title => "Title",
            OverlapScope::TitleBody => "Title+Body",
            OverlapScope::TitleBodyAnswers => "Title+Body+Answer",
        }
    }
}

/// EMS matches single-word tags only; EMM also matches multi-word tags as phrases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchMode {
    Ems,
    Emm,
}

impl MatchMode {
    pub fn label(self) -> &'static str {
        match self {
            MatchMode::Ems => "EMS",
            MatchMode::Emm => "EMM",
        }
    }
}

/// Lowercases and collapses whitespace runs to one space.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// The phrase a tag is matched as: lowercase, hyphens read as spaces.
pub fn tag_phrase(tag: &str) -> String {
    tag.to_lowercase().replace('-', " ")
}

/// Whether `phrase` occurs in `text` with no alphanumeric character on either side.
pub fn contains_phrase(text: &str, phrase: &str) -> bool {
    if phrase.is_empty() {
        return false;
    }
    text.match_indices(phrase).any(|(start, m)| {
        let before = text[..start].chars().next_back();
        let after = text[start + m.len()..].chars().next();
        !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
    })
}

/// Scoped question text, HTML-stripped and normalized.
pub fn scoped_text(corpus: &DomainCorpus, q: &Post, scope: OverlapScope) -> String {
    let mut raw = q.title.clone();
    if scope != OverlapScope::Title {
        raw.push('\n');
        raw.push_str(&strip_html(&q.body));
    }
    if scope == OverlapScope::TitleBodyAnswers {
        for a in corpus.answers_of(q.id) {
            raw.push('\n');
            raw.push_str(&strip_html(&a.body));
        }
    }
    normalize_text(&raw)
}

fn question_hits(text: &str, tags: &[String], mode: MatchMode) -> bool {
    tags.iter()
        .filter(|t| mode == MatchMode::Emm || tag_word_count(t) == 1)
        .any(|t| contains_phrase(text, &tag_phrase(t)))
}

/// Percentage of questions where at least one of their own tags appears in the scoped text.
pub fn tag_post_overlap(corpus: &DomainCorpus, scope: OverlapScope, mode: MatchMode) -> f64 {
    if corpus.questions.is_empty() {
        return 0.0;
    }
    let hits = corpus
        .questions
        .iter()
        .filter(|q| question_hits(&scoped_text(corpus, q, scope), &q.tags, mode))
        .count();
    100.0 * hits as f64 / corpus.questions.len() as f64
}

/// All six scope × mode overlap percentages, computed in one pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    /// Indexed `[scope][mode]` in `OverlapScope::ALL` × `[Ems, Emm]` order.
    pub values: [[f64; 2]; 3],
}

impl OverlapRow {
    pub fn get(&self, scope: OverlapScope, mode: MatchMode) -> f64 {
        let s = OverlapScope::ALL.iter().position(|x| *x == scope).unwrap();
        self.values[s][mode as usize]
    }
}

pub fn overlap_row(corpus: &DomainCorpus) -> OverlapRow {
    let mut hits = [[0u64; 2]; 3];
    for q in &corpus.questions {
        for (s, scope) in OverlapScope::ALL.iter().enumerate() {
            let text = scoped_text(corpus, q, *scope);
            for (m, mode) in [MatchMode::Ems, MatchMode::Emm].iter().enumerate() {
                if question_hits(&text, &q.tags, *mode) {
                    hits[s][m] += 1;
                }
            }
        }
    }
    let n = corpus.questions.len().max(1) as f64;
    OverlapRow {
        values: hits.map(|row| row.map(|h| 100.0 * h as f64 / n)),
    }
}
