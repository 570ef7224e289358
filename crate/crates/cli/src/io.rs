use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{anyhow, Context, Result};
use reinflect::unimorph::{parse_dataset_bytes, serialize_dataset, sniff_columns, Dataset, ParseOptions};
use sha2::{Digest, Sha256};

/// A problem with the command line rather than with the data; exits with 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Every file read or written during a run, with content digests.
#[derive(Default)]
pub struct Files {
    inputs: Mutex<BTreeMap<String, String>>,
    outputs: Mutex<BTreeMap<String, String>>,
}

impl Files {
    pub fn read(&self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs
            .lock()
            .expect("digest map")
            .insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    pub fn read_string(&self, path: &Path) -> Result<String> {
        String::from_utf8(self.read(path)?).map_err(|e| {
            let offset = e.utf8_error().valid_up_to();
            let line = 1 + e.as_bytes()[..offset].iter().filter(|&&b| b == b'\n').count();
            anyhow!("{}: invalid UTF-8 at byte offset {offset} (line {line})", path.display())
        })
    }

    pub fn write(&self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
        }
        fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        self.outputs
            .lock()
            .expect("digest map")
            .insert(path.display().to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn digests(&self) -> (BTreeMap<String, String>, BTreeMap<String, String>) {
        (
            self.inputs.lock().expect("digest map").clone(),
            self.outputs.lock().expect("digest map").clone(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forms {
    Required,
    /// Decided by the column count of the first non-blank line.
    Sniff,
}

/// A parsed TSV file that remembers where each entry came from.
pub struct Loaded {
    pub path: PathBuf,
    pub data: Dataset,
    lines: Vec<usize>,
}

impl Loaded {
    /// One-based source line of entry `index`.
    pub fn line(&self, index: usize) -> usize {
        self.lines.get(index).copied().unwrap_or(0)
    }

    pub fn at(&self, index: usize) -> String {
        format!("{}: line {}", self.path.display(), self.line(index))
    }
}

fn entry_lines(bytes: &[u8]) -> Vec<usize> {
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .filter(|(_, raw)| !String::from_utf8_lossy(raw).trim().is_empty())
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn load(files: &Files, path: &Path, language: &str, forms: Forms, nfc: bool) -> Result<Loaded> {
    let bytes = files.read(path)?;
    let expect_forms = match forms {
        Forms::Required => true,
        Forms::Sniff => std::str::from_utf8(&bytes).ok().and_then(sniff_columns) != Some(2),
    };
    let opts = ParseOptions { expect_forms, nfc };
    let data = parse_dataset_bytes(&bytes, language, opts).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(Loaded {
        path: path.to_path_buf(),
        data,
        lines: entry_lines(&bytes),
    })
}

pub fn write_dataset(files: &Files, path: &Path, d: &Dataset, forms: bool) -> Result<()> {
    let text = serialize_dataset(d, forms).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    files.write(path, text.as_bytes())
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(files: &Files, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => files.write(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Language code of a `<lang>.<split>` file name.
pub fn language_of(path: &Path) -> Result<String> {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.split('.').next())
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .ok_or_else(|| usage(format!("cannot tell the language of {}", path.display())))
}

/// All `<lang>.<ext>` files of a directory, sorted by language.
pub fn discover(dir: &Path, ext: &str) -> Result<Vec<(String, PathBuf)>> {
    let suffix = format!(".{ext}");
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(lang) = name.strip_suffix(&suffix) {
            if !lang.is_empty() && !lang.contains('.') && path.is_file() {
                found.push((lang.to_owned(), path.clone()));
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Inputs of a command that takes either one file or a directory of
/// `<lang>.<ext>` files.
pub struct Inputs {
    pub items: Vec<(String, PathBuf)>,
    pub batch: bool,
}

impl Inputs {
    pub fn resolve(input: &Path, ext: &str, language: Option<&str>) -> Result<Inputs> {
        if input.is_dir() {
            if language.is_some() {
                return Err(usage("--lang only applies to single-file input"));
            }
            let items = discover(input, ext)?;
            if items.is_empty() {
                return Err(anyhow!("{}: no *.{ext} files", input.display()));
            }
            return Ok(Inputs { items, batch: true });
        }
        let lang = match language {
            Some(l) => l.to_owned(),
            None => language_of(input)?,
        };
        Ok(Inputs {
            items: vec![(lang, input.to_path_buf())],
            batch: false,
        })
    }

    /// Output path for `lang`: `out` itself for a single file, or
    /// `out/<lang>.<ext>` in batch mode.
    pub fn output(&self, out: &Path, lang: &str, ext: &str) -> PathBuf {
        if self.batch {
            out.join(format!("{lang}.{ext}"))
        } else {
            out.to_path_buf()
        }
    }
}
