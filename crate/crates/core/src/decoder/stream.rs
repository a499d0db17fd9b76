//! Token streams emitted by a generative tagger, and the files that carry them.
//!
//! Token-stream file: one JSON object per line,
//! `{"post_id": 7, "tokens": [["visa", -0.11, "tag"], ["<tagsep>", -0.02, "sep"], ...]}`
//! where the number is the natural-log probability of the token.
//!
//! Meta-prediction file: one JSON object per line,
//! `{"post_id": 7, "tags": [{"tag": "visas", "score": 0.83}, ...]}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Tag,
    #[serde(rename = "sep")]
    Separator,
    #[serde(rename = "punct")]
    Punctuation,
}

impl TokenKind {
    /// Classifies a non-separator token: punctuation when every character is
    /// neither alphanumeric nor a hyphen.
    pub fn classify(text: &str) -> TokenKind {
        if text.chars().all(|c| !c.is_alphanumeric() && c != '-') {
            TokenKind::Punctuation
        } else {
            TokenKind::Tag
        }
    }
}

/// One generated token. Stores the log-probability so files round-trip exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "(String, f64, TokenKind)", into = "(String, f64, TokenKind)")]
pub struct Token {
    pub text: String,
    pub log_prob: f64,
    pub kind: TokenKind,
}

impl From<(String, f64, TokenKind)> for Token {
    fn from((text, log_prob, kind): (String, f64, TokenKind)) -> Self {
        Token { text, log_prob, kind }
    }
}

impl From<Token> for (String, f64, TokenKind) {
    fn from(t: Token) -> Self {
        (t.text, t.log_prob, t.kind)
    }
}

impl Token {
    /// Tag or punctuation token from a probability in `[0, 1]`.
    pub fn word(text: &str, prob: f64) -> Token {
        Token {
            text: text.to_owned(),
            log_prob: to_log(prob),
            kind: TokenKind::classify(text),
        }
    }

    pub fn separator(prob: f64) -> Token {
        Token {
            text: SEPARATOR_TEXT.to_owned(),
            log_prob: to_log(prob),
            kind: TokenKind::Separator,
        }
    }

    pub fn prob(&self) -> f64 {
        self.log_prob.exp()
    }
}

pub const SEPARATOR_TEXT: &str = "<tagsep>";

fn to_log(prob: f64) -> f64 {
    let p = prob.clamp(0.0, 1.0);
    if p == 0.0 {
        f64::MIN
    } else {
        p.ln()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenStream {
    pub post_id: i64,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn new(post_id: i64, tokens: Vec<Token>) -> Self {
        TokenStream { post_id, tokens }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTag {
    pub tag: String,
    pub score: f64,
}

/// Meta-head output for one post: ranked vocabulary tags with scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaPrediction {
    pub post_id: i64,
    pub tags: Vec<ScoredTag>,
}

fn write_lines<W: Write, T: Serialize>(out: W, records: &[T]) -> Result<()> {
    let mut out = BufWriter::new(out);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn read_lines<R: BufRead, T: for<'de> Deserialize<'de>>(input: R, path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Record {
            path: path.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_token_streams<W: Write>(out: W, streams: &[TokenStream]) -> Result<()> {
    write_lines(out, streams)
}

pub fn read_token_streams<R: BufRead>(input: R, path: &Path) -> Result<Vec<TokenStream>> {
    read_lines(input, path)
}

pub fn load_token_streams(path: &Path) -> Result<Vec<TokenStream>> {
    read_token_streams(BufReader::new(File::open(path)?), path)
}

pub fn write_meta_predictions<W: Write>(out: W, records: &[MetaPrediction]) -> Result<()> {
    write_lines(out, records)
}

pub fn read_meta_predictions<R: BufRead>(input: R, path: &Path) -> Result<Vec<MetaPrediction>> {
    read_lines(input, path)
}

pub fn load_meta_predictions(path: &Path) -> Result<Vec<MetaPrediction>> {
    read_meta_predictions(BufReader::new(File::open(path)?), path)
}
