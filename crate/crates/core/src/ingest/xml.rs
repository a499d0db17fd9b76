//! Single-pass reader for StackExchange `Posts.xml` dumps.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::post::{Post, PostType};
use crate::ingest::tags::parse_tag_field;

/// How many rejected post ids are kept verbatim in the report.
const REJECT_SAMPLE: usize = 100;

/// What happened to every `<row>` seen by [`PostStream`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RejectsReport {
    pub rows_seen: u64,
    pub yielded: u64,
    /// Rows whose `PostTypeId` is neither question nor answer. Not rejects.
    pub other_post_types: u64,
    pub rejected: u64,
    pub by_reason: BTreeMap<String, u64>,
    /// First rejected rows, `(post id or -1, reason)`.
    pub sample: Vec<(i64, String)>,
}

impl RejectsReport {
    fn reject(&mut self, id: Option<i64>, reason: &str) {
        self.rejected += 1;
        *self.by_reason.entry(reason.to_owned()).or_default() += 1;
        if self.sample.len() < REJECT_SAMPLE {
            self.sample.push((id.unwrap_or(-1), reason.to_owned()));
        }
    }
}

/// Iterator over the question and answer rows of a `Posts.xml` stream.
///
/// Holds one row in memory at a time. A malformed document yields a single
/// `Err` carrying the byte offset and then ends; rows that are well-formed
/// XML but unusable are dropped and tallied in [`PostStream::report`].
pub struct PostStream<R> {
    reader: Reader<R>,
    buf: Vec<u8>,
    report: RejectsReport,
    done: bool,
}

/// Streams posts out of a `Posts.xml` byte source.
pub fn parse_posts_stream<R: BufRead>(source: R) -> PostStream<R> {
    let mut reader = Reader::from_reader(source);
    reader.config_mut().check_end_names = true;
    PostStream {
        reader,
        buf: Vec::with_capacity(16 * 1024),
        report: RejectsReport::default(),
        done: false,
    }
}

impl<R> PostStream<R> {
    pub fn report(&self) -> &RejectsReport {
        &self.report
    }

    pub fn into_report(self) -> RejectsReport {
        self.report
    }
}

impl<R: BufRead> Iterator for PostStream<R> {
    type Item = Result<Post>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Xml {
                        offset: self.reader.error_position(),
                        message: e.to_string(),
                    }));
                }
            };
            match event {
                Event::Empty(ref e) | Event::Start(ref e) if e.name().as_ref() == b"row" => {
                    self.report.rows_seen += 1;
                    match read_row(e) {
                        Ok(RowOutcome::Post(post)) => {
                            self.report.yielded += 1;
                            return Some(Ok(post));
                        }
                        Ok(RowOutcome::OtherType) => self.report.other_post_types += 1,
                        Ok(RowOutcome::Rejected(id, reason)) => self.report.reject(id, &reason),
                        Err(message) => {
                            self.done = true;
                            return Some(Err(Error::Xml {
                                offset: self.reader.buffer_position(),
                                message,
                            }));
                        }
                    }
                }
                Event::Eof => {
                    self.done = true;
                    return None;
                }
                _ => {}
            }
        }
    }
}

enum RowOutcome {
    Post(Post),
    OtherType,
    Rejected(Option<i64>, String),
}

#[derive(Default)]
struct RawRow<'a> {
    id: Option<Cow<'a, str>>,
    post_type_id: Option<Cow<'a, str>>,
    parent_id: Option<Cow<'a, str>>,
    title: Option<Cow<'a, str>>,
    body: Option<Cow<'a, str>>,
    tags: Option<Cow<'a, str>>,
    owner_user_id: Option<Cow<'a, str>>,
    owner_display_name: Option<Cow<'a, str>>,
    score: Option<Cow<'a, str>>,
    view_count: Option<Cow<'a, str>>,
    answer_count: Option<Cow<'a, str>>,
    accepted_answer_id: Option<Cow<'a, str>>,
    creation_date: Option<Cow<'a, str>>,
}

fn read_row(e: &BytesStart<'_>) -> std::result::Result<RowOutcome, String> {
    let mut raw = RawRow::default();
    for attr in e.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let slot = match attr.key.as_ref() {
            b"Id" => &mut raw.id,
            b"PostTypeId" => &mut raw.post_type_id,
            b"ParentId" => &mut raw.parent_id,
            b"Title" => &mut raw.title,
            b"Body" => &mut raw.body,
            b"Tags" => &mut raw.tags,
            b"OwnerUserId" => &mut raw.owner_user_id,
            b"OwnerDisplayName" => &mut raw.owner_display_name,
            b"Score" => &mut raw.score,
            b"ViewCount" => &mut raw.view_count,
            b"AnswerCount" => &mut raw.answer_count,
            b"AcceptedAnswerId" => &mut raw.accepted_answer_id,
            b"CreationDate" => &mut raw.creation_date,
            _ => continue,
        };
        *slot = Some(attr.unescape_value().map_err(|e| e.to_string())?);
    }
    Ok(build_post(raw))
}

fn build_post(raw: RawRow<'_>) -> RowOutcome {
    let id = match raw.id.as_deref().map(str::parse::<i64>) {
        Some(Ok(id)) => id,
        Some(Err(_)) => return RowOutcome::Rejected(None, "invalid Id".into()),
        None => return RowOutcome::Rejected(None, "missing Id".into()),
    };
    let reject = |reason: &str| RowOutcome::Rejected(Some(id), reason.to_owned());

    let post_type = match raw.post_type_id.as_deref().map(str::parse::<u32>) {
        Some(Ok(t)) => match PostType::from_type_id(t) {
            Some(pt) => pt,
            None => return RowOutcome::OtherType,
        },
        Some(Err(_)) => return reject("invalid PostTypeId"),
        None => return reject("missing PostTypeId"),
    };

    let owner_id = match parse_opt::<i64>(raw.owner_user_id.as_deref()) {
        Ok(v) => v,
        Err(()) => return reject("invalid OwnerUserId"),
    };
    let owner_display_name = raw
        .owner_display_name
        .map(Cow::into_owned)
        .filter(|s| !s.trim().is_empty());
    if owner_id.is_none() && owner_display_name.is_none() {
        return reject("no owner");
    }

    let Some(creation_date) = raw.creation_date else {
        return reject("missing CreationDate");
    };

    let mut parent_id = None;
    let mut title = String::new();
    let mut tags = Vec::new();
    match post_type {
        PostType::Question => {
            let Some(t) = raw.title else {
                return reject("missing Title");
            };
            title = t.into_owned();
            let Some(field) = raw.tags else {
                return reject("missing Tags");
            };
            tags = match parse_tag_field(&field, id) {
                Ok(tags) => tags,
                Err(_) => return reject("invalid Tags"),
            };
        }
        PostType::Answer => match parse_opt::<i64>(raw.parent_id.as_deref()) {
            Ok(Some(p)) => parent_id = Some(p),
            Ok(None) => return reject("missing ParentId"),
            Err(()) => return reject("invalid ParentId"),
        },
    }

    let (Ok(score), Ok(view_count), Ok(answer_count), Ok(accepted_answer_id)) = (
        parse_opt::<i64>(raw.score.as_deref()),
        parse_opt::<u64>(raw.view_count.as_deref()),
        parse_opt::<u64>(raw.answer_count.as_deref()),
        parse_opt::<i64>(raw.accepted_answer_id.as_deref()),
    ) else {
        return reject("invalid numeric attribute");
    };

    RowOutcome::Post(Post {
        id,
        post_type,
        parent_id,
        title,
        body: raw.body.map(Cow::into_owned).unwrap_or_default(),
        tags,
        owner_id,
        owner_display_name,
        score: score.unwrap_or(0),
        view_count: view_count.unwrap_or(0),
        answer_count: answer_count.unwrap_or(0),
        accepted_answer_id,
        creation_date: creation_date.into_owned(),
    })
}

fn parse_opt<T: std::str::FromStr>(v: Option<&str>) -> std::result::Result<Option<T>, ()> {
    match v.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|_| ()),
    }
}
