//! Reading StackExchange dumps into typed posts, corpora and splits.

mod corpus;
mod html;
mod post;
mod split;
mod tags;
mod xml;

pub use corpus::{build_corpus, ingest_posts, DomainCorpus};
pub use html::strip_html;
pub use post::{OwnerKey, Post, PostType, MAX_TAGS};
pub use split::{largest_remainder, split_corpus, CorpusSplit, SplitPart, DEFAULT_RATIOS};
pub use tags::parse_tag_field;
pub use xml::{parse_posts_stream, PostStream, RejectsReport};

#[cfg(test)]
pub(crate) use corpus::tests as fixtures;
