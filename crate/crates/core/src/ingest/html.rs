/// Elements that start a new line in rendered text.
const BLOCK_ELEMENTS: &[&str] = &[
    "p", "div", "br", "li", "ul", "ol", "pre", "blockquote", "h1", "h2", "h3", "h4", "h5", "h6",
    "hr", "table", "tr", "td", "th", "dl", "dt", "dd",
];

/// Elements whose content is never visible text.
const SKIPPED_ELEMENTS: &[&str] = &["script", "style"];

/// Removes HTML markup from a post body and decodes entity references.
///
/// Code blocks keep their text. Block-level elements become line breaks so
/// paragraphs do not run together. Never fails: an unterminated `<` is kept
/// as literal text.
pub fn strip_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    let mut skipping: Option<&str> = None;

    while let Some(lt) = rest.find('<') {
        if skipping.is_none() {
            out.push_str(&rest[..lt]);
        }
        let after = &rest[lt..];

        if let Some(comment) = after.strip_prefix("<!--") {
            rest = match comment.find("-->") {
                Some(end) => &comment[end + 3..],
                None => "",
            };
            continue;
        }

        let Some(gt) = after.find('>') else {
            if skipping.is_none() {
                out.push_str(after);
            }
            rest = "";
            break;
        };
        let inner = &after[1..gt];
        rest = &after[gt + 1..];

        let (closing, name) = element_name(inner);
        let Some(name) = name else {
            // `a < b > c` style text, not markup.
            if skipping.is_none() {
                out.push_str(&after[..=gt]);
            }
            continue;
        };

        if let Some(skip) = skipping {
            if closing && name.eq_ignore_ascii_case(skip) {
                skipping = None;
            }
            continue;
        }
        if !closing {
            if let Some(skip) = SKIPPED_ELEMENTS.iter().find(|s| name.eq_ignore_ascii_case(s)) {
                if !inner.trim_end().ends_with('/') {
                    skipping = Some(skip);
                }
                continue;
            }
        }
        if BLOCK_ELEMENTS.iter().any(|b| name.eq_ignore_ascii_case(b))
            && !out.is_empty()
            && !out.ends_with('\n')
        {
            out.push('\n');
        }
    }
    if skipping.is_none() {
        out.push_str(rest);
    }

    html_escape::decode_html_entities(out.trim()).into_owned()
}

fn element_name(inner: &str) -> (bool, Option<&str>) {
    let (closing, body) = match inner.strip_prefix('/') {
        Some(b) => (true, b),
        None => (false, inner),
    };
    let body = body.strip_prefix('!').unwrap_or(body);
    let end = body
        .find(|c: char| !(c.is_ascii_alphanumeric()))
        .unwrap_or(body.len());
    let name = &body[..end];
    if name.is_empty() || !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        (closing, None)
    } else {
        (closing, Some(name))
    }
}
