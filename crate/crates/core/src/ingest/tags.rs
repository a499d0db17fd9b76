use crate::error::{Error, Result};
use crate::ingest::post::MAX_TAGS;

/// Parses a `Tags` attribute (`<boot><grub2>`) into tags in document order.
///
/// Entity-escaped input (`&lt;boot&gt;`) is decoded first. The pipe-delimited
/// form used by later dumps (`|boot|grub2|`) is accepted as well. A tag
/// repeated within the field keeps only its first position.
pub fn parse_tag_field(raw: &str, post_id: i64) -> Result<Vec<String>> {
    let err = |message: String| Error::TagField { post_id, message };
    let decoded = html_escape::decode_html_entities(raw);
    let text = decoded.trim();
    if text.is_empty() {
        return Err(err("question has no tags".into()));
    }

    let tags: Vec<String> = if text.starts_with('|') {
        text.split('|')
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .fold(Vec::new(), |mut acc, t| {
                if !acc.contains(&t) {
                    acc.push(t);
                }
                acc
            })
    } else {
        let mut tags = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('<') else {
                return Err(err(format!("unbalanced brackets in {text:?}")));
            };
            let Some(close) = after_open.find('>') else {
                return Err(err(format!("unbalanced brackets in {text:?}")));
            };
            let tag = &after_open[..close];
            if tag.contains('<') {
                return Err(err(format!("unbalanced brackets in {text:?}")));
            }
            if tag.trim().is_empty() {
                return Err(err(format!("empty tag in {text:?}")));
            }
            let tag = tag.trim().to_lowercase();
            if !tags.contains(&tag) {
                tags.push(tag);
            }
            rest = &after_open[close + 1..];
        }
        tags
    };

    if tags.is_empty() {
        return Err(err("question has no tags".into()));
    }
    if tags.len() > MAX_TAGS {
        return Err(err(format!("{} tags exceeds the limit of {MAX_TAGS}", tags.len())));
    }
    Ok(tags)
}
