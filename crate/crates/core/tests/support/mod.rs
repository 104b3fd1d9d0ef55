#![allow(dead_code)]

pub mod oracles;

use std::fs;
use std::path::Path;

/// Writes `(filename, contents)` pairs into `dir`.
pub fn write_docs(dir: &Path, docs: &[(&str, &str)]) {
    for (name, text) in docs {
        fs::write(dir.join(name), text).unwrap();
    }
}
