//! Directory of documents to sentence corpus, and the corpus' on-disk form.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filename::{parse_filename, strip_extension};
use super::layout::{extract_body, Page};
use super::segment::{normalize_whitespace, split_sentences, word_count, SegmentOptions};
use super::{DocMeta, IngestError, SentenceKind, SentenceRecord};

pub const SENTENCES_FILE: &str = "sentences.jsonl";
pub const DOCS_FILE: &str = "docs.jsonl";
pub const STATS_FILE: &str = "stats.tsv";
pub const REPORT_FILE: &str = "ingest_report.json";

const TEXT_EXT: &str = ".txt";
const BLOCKS_EXT: &str = ".blocks.json";
const CAPTIONS_EXT: &str = ".captions.json";
const PDF_EXT: &str = ".pdf";
const PAGE_BREAK: char = '\u{000C}';

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub segment: SegmentOptions,
}

/// A file that could not be ingested. Ingestion skips it and carries on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileIssue {
    pub file: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalStats {
    pub journal: String,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub article_count: u64,
    pub sentence_count: u64,
    pub caption_count: u64,
}

/// Per-journal coverage, articles and sentence totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub rows: Vec<JournalStats>,
    pub totals: JournalStats,
}

impl CorpusStats {
    pub fn compute(docs: &[DocMeta], records: &[SentenceRecord]) -> Self {
        let mut rows: BTreeMap<&str, JournalStats> = BTreeMap::new();
        let row = |rows: &mut BTreeMap<&str, JournalStats>, journal: &str| -> JournalStats {
            rows.remove(journal).unwrap_or_else(|| JournalStats {
                journal: journal.to_string(),
                year_min: None,
                year_max: None,
                article_count: 0,
                sentence_count: 0,
                caption_count: 0,
            })
        };
        for doc in docs {
            let mut r = row(&mut rows, &doc.journal);
            r.year_min = Some(r.year_min.map_or(doc.year, |y| y.min(doc.year)));
            r.year_max = Some(r.year_max.map_or(doc.year, |y| y.max(doc.year)));
            r.article_count += 1;
            rows.insert(&doc.journal, r);
        }
        for rec in records {
            let mut r = row(&mut rows, &rec.journal);
            match rec.kind {
                SentenceKind::Body => r.sentence_count += 1,
                SentenceKind::Caption => r.caption_count += 1,
            }
            rows.insert(&rec.journal, r);
        }
        let rows: Vec<JournalStats> = rows.into_values().collect();
        let totals = JournalStats {
            journal: "TOTAL".to_string(),
            year_min: rows.iter().filter_map(|r| r.year_min).min(),
            year_max: rows.iter().filter_map(|r| r.year_max).max(),
            article_count: rows.iter().map(|r| r.article_count).sum(),
            sentence_count: rows.iter().map(|r| r.sentence_count).sum(),
            caption_count: rows.iter().map(|r| r.caption_count).sum(),
        };
        Self { rows, totals }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("journal\tyear_min\tyear_max\tarticles\tsentences\tcaptions\n");
        let year = |y: Option<i32>| y.map(|y| y.to_string()).unwrap_or_default();
        for r in self.rows.iter().chain(std::iter::once(&self.totals)) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.journal,
                year(r.year_min),
                year(r.year_max),
                r.article_count,
                r.sentence_count,
                r.caption_count
            );
        }
        out
    }
}

/// An immutable sentence corpus. Record `i` always has sid `i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: Vec<SentenceRecord>,
    docs: Vec<DocMeta>,
    doc_index: HashMap<String, usize>,
}

impl Corpus {
    /// Validates and assembles a corpus from its two stores.
    pub fn new(docs: Vec<DocMeta>, records: Vec<SentenceRecord>) -> Result<Self, String> {
        let mut doc_index = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            if doc_index.insert(d.doc_id.clone(), i).is_some() {
                return Err(format!("duplicate doc_id {:?}", d.doc_id));
            }
        }
        let mut next_pos: HashMap<(&str, SentenceKind), u32> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if r.sid != i as u64 {
                return Err(format!("sid {} at row {i}; sids must be dense from 0", r.sid));
            }
            let Some(&d) = doc_index.get(&r.doc_id) else {
                return Err(format!("sid {} references unknown doc {:?}", r.sid, r.doc_id));
            };
            if docs[d].journal != r.journal || docs[d].year != r.year {
                return Err(format!("sid {} disagrees with its doc metadata", r.sid));
            }
            let expected = next_pos.entry((r.doc_id.as_str(), r.kind)).or_insert(0);
            if r.pos != *expected {
                return Err(format!("sid {} has pos {}, expected {}", r.sid, r.pos, expected));
            }
            *expected += 1;
            if r.text.trim() != r.text || r.text.contains('\n') {
                return Err(format!("sid {} text is not whitespace-normalized", r.sid));
            }
        }
        Ok(Self {
            records,
            docs,
            doc_index,
        })
    }

    pub fn records(&self) -> &[SentenceRecord] {
        &self.records
    }

    pub fn docs(&self) -> &[DocMeta] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, sid: u64) -> Option<&SentenceRecord> {
        usize::try_from(sid).ok().and_then(|i| self.records.get(i))
    }

    pub fn doc(&self, doc_id: &str) -> Option<&DocMeta> {
        self.doc_index.get(doc_id).map(|&i| &self.docs[i])
    }

    pub fn sids_of_kind(&self, kind: SentenceKind) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.sid)
            .collect()
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats::compute(&self.docs, &self.records)
    }
}

pub struct BuildOutput {
    pub corpus: Corpus,
    pub stats: CorpusStats,
    pub issues: Vec<FileIssue>,
}

#[derive(Debug, Deserialize)]
struct CaptionEntry {
    text: String,
    #[serde(default)]
    asset: Option<String>,
}

#[derive(Debug)]
enum TextSource {
    Plain(PathBuf),
    Blocks(PathBuf),
}

#[derive(Debug, Default)]
struct DocFiles {
    text: Option<TextSource>,
    pdf: Option<PathBuf>,
    captions: Option<PathBuf>,
}

struct ParsedDoc {
    meta: DocMeta,
    body: Vec<String>,
    captions: Vec<(String, Option<String>)>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_pages(source: &TextSource) -> Result<Vec<Page>, IngestError> {
    match source {
        TextSource::Plain(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            Ok(text.split(PAGE_BREAK).map(Page::plain).collect())
        }
        TextSource::Blocks(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            serde_json::from_str(&text).map_err(|e| IngestError::Format {
                path: path.clone(),
                line: e.line(),
                detail: e.to_string(),
            })
        }
    }
}

fn parse_document(
    name: &str,
    files: &DocFiles,
    options: &SegmentOptions,
) -> Result<ParsedDoc, IngestError> {
    let Some(text) = &files.text else {
        let path = files.pdf.clone().unwrap_or_else(|| PathBuf::from(name));
        return Err(IngestError::Unsupported {
            path,
            detail: "no extracted text layer (.txt or .blocks.json) beside the PDF".into(),
        });
    };
    let mut meta = parse_filename(name)?;
    meta.source_path = files.pdf.clone().unwrap_or_else(|| match text {
        TextSource::Plain(p) | TextSource::Blocks(p) => p.clone(),
    });

    let pages = read_pages(text)?;
    let extracted = extract_body(&pages)?;
    let body = split_sentences(&extracted.body, options);

    let mut captions: Vec<(String, Option<String>)> =
        extracted.captions.into_iter().map(|c| (c, None)).collect();
    if let Some(path) = &files.captions {
        let raw = fs::read_to_string(path).map_err(io_err(path))?;
        let entries: Vec<CaptionEntry> =
            serde_json::from_str(&raw).map_err(|e| IngestError::Format {
                path: path.clone(),
                line: e.line(),
                detail: e.to_string(),
            })?;
        captions.extend(
            entries
                .into_iter()
                .map(|e| (normalize_whitespace(&e.text), e.asset)),
        );
    }
    captions.retain(|(text, _)| {
        let wc = word_count(text);
        wc >= 1 && wc <= options.max_words
    });

    Ok(ParsedDoc {
        meta,
        body,
        captions,
    })
}

fn scan_dir(input_dir: &Path) -> Result<(BTreeMap<String, DocFiles>, Vec<FileIssue>), IngestError> {
    let mut docs: BTreeMap<String, DocFiles> = BTreeMap::new();
    let mut issues = Vec::new();
    let mut names = Vec::new();
    for entry in fs::read_dir(input_dir).map_err(io_err(input_dir))? {
        let entry = entry.map_err(io_err(input_dir))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        match entry.file_name().into_string() {
            Ok(name) => names.push((name, path)),
            Err(raw) => issues.push(FileIssue {
                file: raw.to_string_lossy().into_owned(),
                error: "filename is not valid UTF-8".into(),
            }),
        }
    }
    names.sort();

    for (name, path) in names {
        if name.starts_with('.') {
            continue;
        }
        let stem = strip_extension(&name).to_string();
        let slot = docs.entry(stem).or_default();
        if name.ends_with(BLOCKS_EXT) {
            if let Some(TextSource::Plain(p)) = &slot.text {
                issues.push(FileIssue {
                    file: p
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    error: "superseded by the .blocks.json layout of the same document".into(),
                });
            }
            slot.text = Some(TextSource::Blocks(path));
        } else if name.ends_with(CAPTIONS_EXT) {
            slot.captions = Some(path);
        } else if name.ends_with(TEXT_EXT) {
            if slot.text.is_some() {
                issues.push(FileIssue {
                    file: name.clone(),
                    error: "superseded by the .blocks.json layout of the same document".into(),
                });
            } else {
                slot.text = Some(TextSource::Plain(path));
            }
        } else if name.to_ascii_lowercase().ends_with(PDF_EXT) {
            slot.pdf = Some(path);
        }
    }
    docs.retain(|_, f| f.text.is_some() || f.pdf.is_some());
    Ok((docs, issues))
}

/// Builds a corpus from a directory of extracted documents.
///
/// Documents are parsed in parallel; sids are assigned afterwards in one
/// ordered pass over lexicographically sorted document names, so output is
/// independent of scheduling. Per-file failures land in
/// [`BuildOutput::issues`].
pub fn build_corpus(input_dir: &Path, options: &BuildOptions) -> Result<BuildOutput, IngestError> {
    let (files, mut issues) = scan_dir(input_dir)?;
    let files: Vec<(String, DocFiles)> = files.into_iter().collect();

    let parsed: Vec<Result<ParsedDoc, (String, IngestError)>> = files
        .par_iter()
        .map(|(stem, f)| {
            let name = match &f.text {
                Some(TextSource::Plain(p)) | Some(TextSource::Blocks(p)) => p,
                None => f.pdf.as_ref().expect("scan keeps docs with a file"),
            };
            let name = name
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or(stem)
                .to_string();
            parse_document(&name, f, &options.segment).map_err(|e| (name, e))
        })
        .collect();

    let mut docs = Vec::new();
    let mut records = Vec::new();
    for result in parsed {
        let doc = match result {
            Ok(doc) => doc,
            Err((file, e)) => {
                tracing::warn!(%file, error = %e, "skipping document");
                issues.push(FileIssue {
                    file,
                    error: e.to_string(),
                });
                continue;
            }
        };
        let meta = doc.meta;
        let mut push = |kind, pos: usize, text: String, asset: Option<String>| {
            records.push(SentenceRecord {
                sid: records.len() as u64,
                doc_id: meta.doc_id.clone(),
                journal: meta.journal.clone(),
                year: meta.year,
                pos: pos as u32,
                kind,
                word_count: word_count(&text),
                text,
                asset,
            });
        };
        for (pos, text) in doc.body.into_iter().enumerate() {
            push(SentenceKind::Body, pos, text, None);
        }
        for (pos, (text, asset)) in doc.captions.into_iter().enumerate() {
            push(SentenceKind::Caption, pos, text, asset);
        }
        docs.push(meta);
    }
    issues.sort_by(|a, b| a.file.cmp(&b.file));

    let stats = CorpusStats::compute(&docs, &records);
    let corpus = Corpus::new(docs, records).expect("build assigns consistent ids");
    Ok(BuildOutput {
        corpus,
        stats,
        issues,
    })
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), IngestError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut w, row).map_err(|e| IngestError::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, IngestError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| IngestError::Format {
            path: path.to_path_buf(),
            line: i + 1,
            detail: e.to_string(),
        })?);
    }
    Ok(rows)
}

/// Writes the sentence store, document store, stats table and issue report.
pub fn write_corpus(out_dir: &Path, output: &BuildOutput) -> Result<(), IngestError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    write_jsonl(&out_dir.join(SENTENCES_FILE), output.corpus.records())?;
    write_jsonl(&out_dir.join(DOCS_FILE), output.corpus.docs())?;
    let stats = out_dir.join(STATS_FILE);
    fs::write(&stats, output.stats.to_tsv()).map_err(io_err(&stats))?;
    let report = out_dir.join(REPORT_FILE);
    let json = serde_json::to_string_pretty(&output.issues).expect("issues serialize");
    fs::write(&report, json + "\n").map_err(io_err(&report))
}

/// Loads and validates a corpus directory written by [`write_corpus`].
pub fn read_corpus(dir: &Path) -> Result<Corpus, IngestError> {
    let docs: Vec<DocMeta> = read_jsonl(&dir.join(DOCS_FILE))?;
    let records: Vec<SentenceRecord> = read_jsonl(&dir.join(SENTENCES_FILE))?;
    Corpus::new(docs, records).map_err(|detail| IngestError::Format {
        path: dir.join(SENTENCES_FILE),
        line: 0,
        detail,
    })
}
