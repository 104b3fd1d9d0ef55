//! Document ingestion: filenames to metadata, page text to body text, body
//! text to length-filtered sentences, and a directory of documents to an
//! on-disk sentence corpus.

mod corpus;
mod filename;
mod layout;
mod segment;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use corpus::{
    build_corpus, read_corpus, write_corpus, BuildOptions, BuildOutput, Corpus, CorpusStats,
    FileIssue, JournalStats, DOCS_FILE, REPORT_FILE, SENTENCES_FILE, STATS_FILE,
};
pub use filename::parse_filename;
pub use layout::{extract_body, Block, ExtractedText, Page, CAPTION_PREFIXES};
pub use segment::{
    normalize_whitespace, split_sentences, word_count, SegmentOptions, DEFAULT_ABBREVIATIONS,
    MAX_WORDS, MIN_WORDS,
};

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed filename {name:?}: {reason}")]
    MalformedFilename { name: String, reason: String },
    #[error("no body text remains")]
    EmptyDocument,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {detail}")]
    Format {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("{path}: unsupported document format ({detail})")]
    Unsupported { path: PathBuf, detail: String },
}

/// Metadata for one source document, derived from its filename.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocMeta {
    pub doc_id: String,
    pub journal: String,
    pub year: i32,
    pub title: String,
    pub source_path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentenceKind {
    Body,
    Caption,
}

/// One filtered sentence, the unit everything downstream works on.
///
/// Serialized field order is the sentence store's line format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub sid: u64,
    #[serde(rename = "doc")]
    pub doc_id: String,
    pub journal: String,
    pub year: i32,
    pub pos: u32,
    pub kind: SentenceKind,
    #[serde(rename = "wc")]
    pub word_count: u32,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asset: Option<String>,
}
