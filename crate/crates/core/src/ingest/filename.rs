use std::path::PathBuf;

use super::{DocMeta, IngestError, MAX_YEAR, MIN_YEAR};

const SEPARATORS: [char; 3] = ['-', '\u{2013}', '\u{2014}'];

/// Compound extensions recognised before falling back to the last `.ext`.
const COMPOUND_EXTENSIONS: [&str; 2] = [".blocks.json", ".captions.json"];

/// Strips a trailing file extension, leaving titles such as "ratio 0.5" intact.
pub(crate) fn strip_extension(name: &str) -> &str {
    for ext in COMPOUND_EXTENSIONS {
        if let Some(stem) = name.strip_suffix(ext) {
            return stem;
        }
    }
    match name.rfind('.') {
        Some(dot) if dot > 0 => {
            let ext = &name[dot + 1..];
            let looks_like_ext = (1..=5).contains(&ext.len())
                && ext.chars().all(|c| c.is_ascii_alphanumeric())
                && !ext.chars().all(|c| c.is_ascii_digit());
            if looks_like_ext {
                &name[..dot]
            } else {
                name
            }
        }
        _ => name,
    }
}

/// Parses a `journal-year-title[.ext]` basename.
///
/// Hyphen, en-dash and em-dash all count as separators; only the first two
/// occurrences are structural so titles may contain dashes themselves.
pub fn parse_filename(name: &str) -> Result<DocMeta, IngestError> {
    let malformed = |reason: &str| IngestError::MalformedFilename {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let stem = strip_extension(name);
    let mut fields = stem.splitn(3, |c| SEPARATORS.contains(&c));
    let (Some(journal), Some(year), Some(title)) = (fields.next(), fields.next(), fields.next())
    else {
        return Err(malformed("expected journal-year-title"));
    };
    let journal = journal.trim();
    let title = title.trim();
    if journal.is_empty() || !journal.chars().all(|c| c.is_ascii_alphanumeric()) {
        return Err(malformed("journal abbreviation must be ASCII letters/digits"));
    }
    let year: i32 = year
        .trim()
        .parse()
        .map_err(|_| malformed("year is not an integer"))?;
    if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
        return Err(malformed("year out of range"));
    }
    if title.is_empty() {
        return Err(malformed("empty title"));
    }
    Ok(DocMeta {
        doc_id: stem.to_string(),
        journal: journal.to_string(),
        year,
        title: title.to_string(),
        source_path: PathBuf::from(name),
    })
}
