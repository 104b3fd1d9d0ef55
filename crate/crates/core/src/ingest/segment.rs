//! Period-driven sentence segmentation with abbreviation, decimal and
//! initial guards, followed by the word-count filter.

pub const MIN_WORDS: u32 = 10;
pub const MAX_WORDS: u32 = 256;

/// Abbreviations that never end a sentence. The first three are the
/// mandatory set; the rest are common in the same literature.
pub const DEFAULT_ABBREVIATIONS: [&str; 9] = [
    "et al.", "Fig.", "Tab.", "e.g.", "i.e.", "cf.", "Eq.", "Figs.", "Tabs.",
];

const TERMINATORS: [char; 3] = ['.', '?', '!'];
const CLOSERS: [char; 7] = [')', ']', '"', '\'', '\u{201d}', '\u{2019}', '}'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentOptions {
    pub abbreviations: Vec<String>,
    pub min_words: u32,
    pub max_words: u32,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        Self {
            abbreviations: DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
            min_words: MIN_WORDS,
            max_words: MAX_WORDS,
        }
    }
}

impl SegmentOptions {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn keeps(&self, words: u32) -> bool {
        (self.min_words..=self.max_words).contains(&words)
    }
}

/// Number of maximal non-whitespace runs.
pub fn word_count(text: &str) -> u32 {
    text.split_whitespace().count() as u32
}

/// Collapses every whitespace run (including newlines) to one space and trims.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Whether the period at byte offset `at` is part of a token rather than a
/// sentence end.
fn period_is_protected(text: &str, at: usize, abbreviations: &[String]) -> bool {
    let before = &text[..at];
    let after = &text[at + 1..];
    let prev = before.chars().next_back();
    let next = after.chars().next();

    if prev.is_some_and(|c| c.is_ascii_digit()) && next.is_some_and(|c| c.is_ascii_digit()) {
        return true;
    }

    let through = &text[..=at];
    for abbr in abbreviations {
        if let Some(head) = through.strip_suffix(abbr.as_str()) {
            if !head.chars().next_back().is_some_and(char::is_alphanumeric) {
                return true;
            }
        }
    }

    // Single-letter initial, as in "J. Smith".
    if let Some(p) = prev {
        if p.is_uppercase() {
            let head = &before[..before.len() - p.len_utf8()];
            let isolated = head
                .chars()
                .next_back()
                .is_none_or(|c| c.is_whitespace() || c == '(' || c == '[');
            if isolated && next.is_none_or(char::is_whitespace) {
                return true;
            }
        }
    }
    false
}

/// Splits text into whitespace-normalized sentences without length filtering.
pub(crate) fn split_raw(text: &str, abbreviations: &[String]) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (at, c) = chars[i];
        if !TERMINATORS.contains(&c) || (c == '.' && period_is_protected(text, at, abbreviations)) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < chars.len() && TERMINATORS.contains(&chars[j + 1].1) {
            j += 1;
        }
        while j + 1 < chars.len() && CLOSERS.contains(&chars[j + 1].1) {
            j += 1;
        }
        let at_boundary = chars.get(j + 1).is_none_or(|&(_, n)| n.is_whitespace());
        if at_boundary {
            let end = chars.get(j + 1).map_or(text.len(), |&(b, _)| b);
            let sentence = normalize_whitespace(&text[start..end]);
            if !sentence.is_empty() {
                out.push(sentence);
            }
            start = end;
        }
        i = j + 1;
    }
    let tail = normalize_whitespace(&text[start..]);
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// Splits body text into sentences and keeps those whose word count lies in
/// `[min_words, max_words]`.
pub fn split_sentences(body: &str, options: &SegmentOptions) -> Vec<String> {
    split_raw(body, &options.abbreviations)
        .into_iter()
        .filter(|s| options.keeps(word_count(s)))
        .collect()
}
