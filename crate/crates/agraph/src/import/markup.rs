//! A small forgiving tag scanner for the SGML-ish source formats.
//!
//! Handles unquoted attribute values, quoted values with embedded spaces,
//! self-closing tags, and skips declarations and comments. No entity
//! decoding here; formats that need it decode their own text runs.

/// One thing encountered in the markup stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Event {
    Open(Tag),
    Close(String),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Tag {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub self_closing: bool,
}

impl Tag {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

pub(crate) fn scan(text: &str) -> Result<Vec<Event>, String> {
    let mut events = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        match rest.find('<') {
            None => {
                push_text(&mut events, rest);
                break;
            }
            Some(i) => {
                push_text(&mut events, &rest[..i]);
                rest = &rest[i..];
                let end = tag_end(rest).ok_or_else(|| {
                    format!("unterminated tag at {:?}", rest.chars().take(24).collect::<String>())
                })?;
                let inner = &rest[1..end];
                rest = &rest[end + 1..];
                if inner.starts_with('!') || inner.starts_with('?') {
                    continue;
                }
                if let Some(name) = inner.strip_prefix('/') {
                    events.push(Event::Close(name.trim().to_string()));
                } else {
                    events.push(Event::Open(parse_tag(inner)?));
                }
            }
        }
    }
    Ok(events)
}

fn push_text(events: &mut Vec<Event>, s: &str) {
    if !s.trim().is_empty() {
        events.push(Event::Text(s.to_string()));
    }
}

/// Index of the `>` closing the tag that starts `rest`, respecting quotes.
fn tag_end(rest: &str) -> Option<usize> {
    let mut quote: Option<char> = None;
    for (i, c) in rest.char_indices().skip(1) {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '"' || c == '\'' => quote = Some(c),
            None if c == '>' => return Some(i),
            None => {}
        }
    }
    None
}

fn parse_tag(inner: &str) -> Result<Tag, String> {
    let inner = inner.trim();
    let (inner, self_closing) = match inner.strip_suffix('/') {
        Some(i) => (i.trim_end(), true),
        None => (inner, false),
    };
    let name_end = inner
        .find(|c: char| c.is_whitespace())
        .unwrap_or(inner.len());
    let name = inner[..name_end].to_string();
    if name.is_empty() {
        return Err("tag with empty name".into());
    }
    let mut attrs = Vec::new();
    let mut rest = inner[name_end..].trim_start();
    while !rest.is_empty() {
        let eq_or_space = rest
            .find(|c: char| c == '=' || c.is_whitespace())
            .unwrap_or(rest.len());
        let key = &rest[..eq_or_space];
        rest = rest[eq_or_space..].trim_start();
        if let Some(r) = rest.strip_prefix('=') {
            let r = r.trim_start();
            let (value, remainder) = if let Some(q) = r.chars().next().filter(|c| *c == '"' || *c == '\'') {
                let body = &r[1..];
                let close = body
                    .find(q)
                    .ok_or_else(|| format!("unterminated quote in attribute {key}"))?;
                (body[..close].to_string(), &body[close + 1..])
            } else {
                let end = r.find(|c: char| c.is_whitespace()).unwrap_or(r.len());
                (r[..end].to_string(), &r[end..])
            };
            attrs.push((key.to_string(), value));
            rest = remainder.trim_start();
        } else {
            // Bare attribute with no value.
            if !key.is_empty() {
                attrs.push((key.to_string(), String::new()));
            } else {
                break;
            }
        }
    }
    Ok(Tag { name, attrs, self_closing })
}

/// Decodes the character entities used by the archive formats.
pub(crate) fn decode_entities(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i + 1..];
        let semi = rest
            .find(';')
            .ok_or_else(|| format!("unterminated entity near {:?}", &rest[..rest.len().min(12)]))?;
        let name = &rest[..semi];
        rest = &rest[semi + 1..];
        if let Some(hex) = name.strip_prefix("#x").or_else(|| name.strip_prefix("#X")) {
            let cp = u32::from_str_radix(hex, 16).map_err(|_| format!("bad entity #{name}"))?;
            out.push(char::from_u32(cp).ok_or_else(|| format!("bad code point {cp:#x}"))?);
        } else if let Some(dec) = name.strip_prefix('#') {
            let cp: u32 = dec.parse().map_err(|_| format!("bad entity #{name}"))?;
            out.push(char::from_u32(cp).ok_or_else(|| format!("bad code point {cp}"))?);
        } else {
            out.push(named_entity(name).ok_or_else(|| format!("unknown entity &{name};"))?);
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn named_entity(name: &str) -> Option<char> {
    Some(match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "agrave" => 'à',
        "acirc" => 'â',
        "ccedil" => 'ç',
        "eacute" => 'é',
        "egrave" => 'è',
        "ecirc" => 'ê',
        "icirc" => 'î',
        "ocirc" => 'ô',
        "ugrave" => 'ù',
        "ucirc" => 'û',
        _ => return None,
    })
}
