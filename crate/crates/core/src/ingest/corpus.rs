use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::post::{Post, PostType};
use crate::ingest::xml::{parse_posts_stream, RejectsReport};

const CORPUS_FORMAT: &str = "cqatag-corpus";
const CORPUS_VERSION: u32 = 1;

/// All retained posts of one StackExchange site. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainCorpus {
    pub domain: String,
    pub questions: Vec<Post>,
    pub answers: Vec<Post>,
    /// Question id → indices into `answers`.
    answer_index: HashMap<i64, Vec<usize>>,
    /// Indices into `answers` whose parent question is not in the corpus.
    orphans: Vec<usize>,
}

/// Separates questions and answers and links answers to their parent.
///
/// Answers whose `ParentId` does not resolve are kept and reported by
/// [`DomainCorpus::orphan_answers`].
pub fn build_corpus<I>(posts: I, domain: &str) -> Result<DomainCorpus>
where
    I: IntoIterator<Item = Post>,
{
    let mut seen = HashSet::new();
    let mut questions = Vec::new();
    let mut answers = Vec::new();
    for post in posts {
        if !seen.insert(post.id) {
            return Err(Error::DuplicatePost(post.id));
        }
        match post.post_type {
            PostType::Question => questions.push(post),
            PostType::Answer => answers.push(post),
        }
    }
    Ok(DomainCorpus::from_parts(domain.to_owned(), questions, answers))
}

/// Parses a `Posts.xml` stream straight into a corpus.
pub fn ingest_posts<R: BufRead>(source: R, domain: &str) -> Result<(DomainCorpus, RejectsReport)> {
    let mut stream = parse_posts_stream(source);
    let mut posts = Vec::new();
    for post in stream.by_ref() {
        posts.push(post?);
    }
    let corpus = build_corpus(posts, domain)?;
    Ok((corpus, stream.into_report()))
}

impl DomainCorpus {
    fn from_parts(domain: String, questions: Vec<Post>, answers: Vec<Post>) -> Self {
        let qids: HashSet<i64> = questions.iter().map(|q| q.id).collect();
        let mut answer_index: HashMap<i64, Vec<usize>> = HashMap::new();
        let mut orphans = Vec::new();
        for (i, a) in answers.iter().enumerate() {
            match a.parent_id {
                Some(p) if qids.contains(&p) => answer_index.entry(p).or_default().push(i),
                _ => orphans.push(i),
            }
        }
        DomainCorpus {
            domain,
            questions,
            answers,
            answer_index,
            orphans,
        }
    }

    pub fn answers_of(&self, question_id: i64) -> impl Iterator<Item = &Post> + '_ {
        self.answer_index
            .get(&question_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.answers[i])
    }

    pub fn answer_count_of(&self, question_id: i64) -> usize {
        self.answer_index.get(&question_id).map_or(0, Vec::len)
    }

    pub fn orphan_answers(&self) -> impl Iterator<Item = &Post> + '_ {
        self.orphans.iter().map(move |&i| &self.answers[i])
    }

    pub fn question_ids(&self) -> Vec<i64> {
        self.questions.iter().map(|q| q.id).collect()
    }

    /// Restriction to the given question ids, keeping their answers.
    pub fn subset(&self, question_ids: &HashSet<i64>) -> DomainCorpus {
        let questions: Vec<Post> = self
            .questions
            .iter()
            .filter(|q| question_ids.contains(&q.id))
            .cloned()
            .collect();
        let answers: Vec<Post> = self
            .answers
            .iter()
            .filter(|a| a.parent_id.is_some_and(|p| question_ids.contains(&p)))
            .cloned()
            .collect();
        DomainCorpus::from_parts(self.domain.clone(), questions, answers)
    }

    /// Writes the line-delimited corpus file: a header line, then one post per line.
    pub fn write_jsonl<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        let header = CorpusHeader {
            format: CORPUS_FORMAT.into(),
            version: CORPUS_VERSION,
            domain: self.domain.clone(),
            questions: self.questions.len(),
            answers: self.answers.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for post in self.questions.iter().chain(&self.answers) {
            serde_json::to_writer(&mut out, post)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_jsonl(File::create(path)?)
    }

    pub fn read_jsonl<R: BufRead>(input: R, path: &Path) -> Result<DomainCorpus> {
        let record_err = |line: usize, message: String| Error::Record {
            path: path.to_owned(),
            line,
            message,
        };
        let mut lines = input.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| record_err(1, "missing header".into()))??;
        let header: CorpusHeader =
            serde_json::from_str(&header_line).map_err(|e| record_err(1, e.to_string()))?;
        if header.format != CORPUS_FORMAT || header.version != CORPUS_VERSION {
            return Err(record_err(
                1,
                format!("unsupported format {} v{}", header.format, header.version),
            ));
        }
        let mut posts = Vec::with_capacity(header.questions + header.answers);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let post: Post =
                serde_json::from_str(&line).map_err(|e| record_err(i + 2, e.to_string()))?;
            posts.push(post);
        }
        build_corpus(posts, &header.domain)
    }

    pub fn load(path: &Path) -> Result<DomainCorpus> {
        Self::read_jsonl(BufReader::new(File::open(path)?), path)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CorpusHeader {
    format: String,
    version: u32,
    domain: String,
    questions: usize,
    answers: usize,
}
