//! Pulling Python source out of a free-form reply.

/// The first non-empty fenced block, or failing that the longest run of
/// whole lines the parser accepts. Always a slice of `raw`; empty when
/// neither is found.
pub fn extract_code(raw: &str) -> &str {
    fenced_block(raw).or_else(|| longest_parsable(raw)).unwrap_or("")
}

/// Byte ranges of each line, excluding the terminator.
fn line_spans(raw: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    for (i, b) in raw.bytes().enumerate() {
        if b == b'\n' {
            spans.push((start, i));
            start = i + 1;
        }
    }
    if start < raw.len() {
        spans.push((start, raw.len()));
    }
    spans
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

fn fenced_block(raw: &str) -> Option<&str> {
    let spans = line_spans(raw);
    let mut i = 0;
    while i < spans.len() {
        let (s, e) = spans[i];
        if !is_fence(&raw[s..e]) {
            i += 1;
            continue;
        }
        let body_start = if i + 1 < spans.len() { spans[i + 1].0 } else { raw.len() };
        let close = (i + 1..spans.len()).find(|&j| is_fence(&raw[spans[j].0..spans[j].1]));
        let body_end = close.map_or(raw.len(), |j| spans[j].0);
        let body = &raw[body_start..body_end];
        if !body.trim().is_empty() {
            return Some(body);
        }
        i = close.map_or(spans.len(), |j| j + 1);
    }
    None
}

fn longest_parsable(raw: &str) -> Option<&str> {
    let spans = line_spans(raw);
    let blank = |k: usize| raw[spans[k].0..spans[k].1].trim().is_empty();
    let mut best: Option<(usize, usize)> = None;
    for start in 0..spans.len() {
        if blank(start) {
            continue;
        }
        let floor = best.map_or(start, |(a, b)| start + (b - a));
        for end in (floor..spans.len()).rev() {
            if blank(end) {
                continue;
            }
            let text = &raw[spans[start].0..spans[end].1];
            if pelli_analyzer::parse(text).is_ok() {
                best = Some((start, end + 1));
                break;
            }
        }
    }
    best.map(|(a, b)| {
        let end =
            if b < spans.len() || raw.ends_with('\n') { (spans[b - 1].1 + 1).min(raw.len()) } else { spans[b - 1].1 };
        &raw[spans[a].0..end]
    })
}
