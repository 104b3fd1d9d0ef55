//! Page blocks to reading-order body text.

use serde::{Deserialize, Serialize};

use super::segment::normalize_whitespace;
use super::IngestError;

/// Line prefixes that mark a figure or table caption.
pub const CAPTION_PREFIXES: [&str; 4] = ["Figure ", "Fig. ", "Table ", "Tab. "];

/// Blocks wider than this fraction of the page's text width span columns.
const SPANNING_FRACTION: f32 = 0.6;

/// A block of text on a page, with optional geometry (`y` grows downward).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub text: String,
    #[serde(default)]
    pub x0: Option<f32>,
    #[serde(default)]
    pub x1: Option<f32>,
    #[serde(default)]
    pub y: Option<f32>,
}

impl Block {
    pub fn plain(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            x0: None,
            x1: None,
            y: None,
        }
    }

    pub fn at(text: impl Into<String>, x0: f32, x1: f32, y: f32) -> Self {
        Self {
            text: text.into(),
            x0: Some(x0),
            x1: Some(x1),
            y: Some(y),
        }
    }

    fn geometry(&self) -> Option<(f32, f32, f32)> {
        match (self.x0, self.x1, self.y) {
            (Some(x0), Some(x1), Some(y)) if x0.is_finite() && x1.is_finite() && y.is_finite() => {
                Some((x0, x1, y))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub blocks: Vec<Block>,
}

impl Page {
    pub fn plain(text: impl Into<String>) -> Self {
        Self {
            blocks: vec![Block::plain(text)],
        }
    }
}

/// Body text plus the captions diverted out of it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedText {
    pub body: String,
    pub captions: Vec<String>,
}

/// Orders a page's blocks for reading: full-width blocks split the page into
/// horizontal bands, and within a band each column is read top to bottom,
/// left column first. Pages lacking geometry keep their block order.
fn reading_order(page: &Page) -> Vec<&Block> {
    let mut placed = Vec::with_capacity(page.blocks.len());
    for block in &page.blocks {
        match block.geometry() {
            Some(g) => placed.push((block, g)),
            None => return page.blocks.iter().collect(),
        }
    }
    if placed.is_empty() {
        return Vec::new();
    }
    let left = placed.iter().map(|(_, g)| g.0).fold(f32::INFINITY, f32::min);
    let right = placed.iter().map(|(_, g)| g.1).fold(f32::NEG_INFINITY, f32::max);
    let width = (right - left).max(f32::EPSILON);

    let (mut spanning, narrow): (Vec<_>, Vec<_>) = placed
        .into_iter()
        .partition(|(_, g)| (g.1 - g.0) / width > SPANNING_FRACTION);
    spanning.sort_by(|a, b| a.1 .2.total_cmp(&b.1 .2));

    // Columns from horizontally overlapping narrow blocks.
    let mut by_x = narrow;
    by_x.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.1 .2.total_cmp(&b.1 .2)));
    let mut columns: Vec<(f32, Vec<(&Block, (f32, f32, f32))>)> = Vec::new();
    for item in by_x {
        match columns.last_mut() {
            Some((col_right, members)) if item.1 .0 < *col_right => {
                *col_right = col_right.max(item.1 .1);
                members.push(item);
            }
            _ => columns.push((item.1 .1, vec![item])),
        }
    }
    for (_, members) in &mut columns {
        members.sort_by(|a, b| a.1 .2.total_cmp(&b.1 .2));
    }

    let mut out = Vec::with_capacity(page.blocks.len());
    let mut band_top = f32::NEG_INFINITY;
    let band_limits = spanning
        .iter()
        .map(|(b, g)| (Some(*b), g.2))
        .chain(std::iter::once((None, f32::INFINITY)));
    for (separator, band_bottom) in band_limits {
        for (_, members) in &columns {
            out.extend(
                members
                    .iter()
                    .filter(|(_, g)| g.2 >= band_top && g.2 < band_bottom)
                    .map(|(b, _)| *b),
            );
        }
        if let Some(sep) = separator {
            out.push(sep);
        }
        band_top = band_bottom;
    }
    out
}

fn is_references_heading(line: &str) -> bool {
    let line = line
        .trim()
        .trim_start_matches(|c: char| c.is_ascii_digit() || c == '.')
        .trim()
        .trim_end_matches(':');
    line.eq_ignore_ascii_case("references") || line.eq_ignore_ascii_case("bibliography")
}

fn is_caption_start(line: &str) -> bool {
    let line = line.trim_start();
    CAPTION_PREFIXES.iter().any(|p| line.starts_with(p))
}

/// Appends a line to running text, joining words hyphenated across the break.
fn push_line(buf: &mut String, line: &str) {
    let line = line.trim();
    if line.is_empty() {
        return;
    }
    let hyphenated = buf.ends_with('-')
        && buf[..buf.len() - 1]
            .chars()
            .next_back()
            .is_some_and(char::is_alphabetic);
    if hyphenated {
        buf.pop();
    } else if !buf.is_empty() {
        buf.push(' ');
    }
    buf.push_str(line);
}

/// Extracts reading-order body text from a document's pages.
///
/// Everything from a standalone "References"/"Bibliography" line onward is
/// dropped, and paragraphs opening with a caption prefix are diverted into
/// [`ExtractedText::captions`].
pub fn extract_body(pages: &[Page]) -> Result<ExtractedText, IngestError> {
    let mut body = String::new();
    let mut captions = Vec::new();

    'pages: for page in pages {
        for block in reading_order(page) {
            let mut caption: Option<String> = None;
            for line in block.text.lines() {
                if is_references_heading(line) {
                    if let Some(c) = caption.take() {
                        captions.push(c);
                    }
                    break 'pages;
                }
                if line.trim().is_empty() {
                    // Paragraph break ends any caption.
                    if let Some(c) = caption.take() {
                        captions.push(c);
                    }
                    continue;
                }
                if is_caption_start(line) {
                    if let Some(c) = caption.take() {
                        captions.push(c);
                    }
                    caption = Some(String::new());
                }
                match caption.as_mut() {
                    Some(c) => push_line(c, line),
                    None => push_line(&mut body, line),
                }
            }
            if let Some(c) = caption.take() {
                captions.push(c);
            }
            // A new block never continues a hyphenated word.
            if !body.is_empty() && !body.ends_with(' ') {
                body.push(' ');
            }
        }
    }

    let body = normalize_whitespace(&body);
    if body.is_empty() {
        return Err(IngestError::EmptyDocument);
    }
    let captions = captions
        .iter()
        .map(|c| normalize_whitespace(c))
        .filter(|c| !c.is_empty())
        .collect();
    Ok(ExtractedText { body, captions })
}
