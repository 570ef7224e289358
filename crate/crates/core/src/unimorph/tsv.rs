//! Reading and writing the shared-task TSV files.
//!
//! A training or gold file has three tab-separated columns, `lemma`, `form`
//! and the `;`-joined tags. A blind test file drops the form column. Files are
//! UTF-8 and LF-terminated; blank lines are skipped on input.

use std::fmt::Write as _;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use super::{Dataset, Entry, FeatureBundle, UnimorphError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Three columns when true, two when false.
    pub expect_forms: bool,
    /// Apply NFC normalization to lemmas and forms.
    pub nfc: bool,
}

impl ParseOptions {
    pub fn with_forms() -> Self {
        ParseOptions {
            expect_forms: true,
            nfc: false,
        }
    }

    pub fn blind() -> Self {
        ParseOptions {
            expect_forms: false,
            nfc: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected {expected} tab-separated fields, found {found}")]
    MalformedLine {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: empty {field}")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: invalid tag {tag:?}")]
    InvalidTag { line: usize, tag: String },
    #[error("invalid UTF-8 at byte offset {offset} (line {line})")]
    InvalidUtf8 { line: usize, offset: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::MalformedLine { line, .. }
            | ParseError::EmptyField { line, .. }
            | ParseError::InvalidTag { line, .. }
            | ParseError::InvalidUtf8 { line, .. } => *line,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SerializeError {
    #[error("entry {index} has no form")]
    MissingForm { index: usize },
}

pub fn parse_dataset_bytes(
    bytes: &[u8],
    language: &str,
    opts: ParseOptions,
) -> Result<Dataset, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_dataset(text, language, opts),
        Err(e) => {
            let offset = e.valid_up_to();
            let line = 1 + bytes[..offset].iter().filter(|&&b| b == b'\n').count();
            Err(ParseError::InvalidUtf8 { line, offset })
        }
    }
}

pub fn parse_dataset(text: &str, language: &str, opts: ParseOptions) -> Result<Dataset, ParseError> {
    let expected = if opts.expect_forms { 3 } else { 2 };
    let mut entries = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != expected {
            return Err(ParseError::MalformedLine {
                line,
                found: fields.len(),
                expected,
            });
        }
        let text_field = |s: &str, field: &'static str| -> Result<String, ParseError> {
            if s.is_empty() {
                return Err(ParseError::EmptyField { line, field });
            }
            Ok(if opts.nfc { s.nfc().collect() } else { s.to_owned() })
        };
        let lemma = text_field(fields[0], "lemma")?;
        let form = if opts.expect_forms {
            Some(text_field(fields[1], "form")?)
        } else {
            None
        };
        let tags = fields[expected - 1];
        if tags.is_empty() {
            return Err(ParseError::EmptyField { line, field: "tags" });
        }
        let bundle: FeatureBundle = tags.parse().map_err(|e| match e {
            UnimorphError::InvalidTag(tag) => ParseError::InvalidTag { line, tag },
            _ => ParseError::EmptyField { line, field: "tags" },
        })?;
        entries.push(Entry {
            lemma,
            form,
            bundle,
        });
    }
    Ok(Dataset::new(language, entries))
}

pub fn serialize_dataset(d: &Dataset, emit_forms: bool) -> Result<String, SerializeError> {
    let mut out = String::new();
    for (index, e) in d.iter().enumerate() {
        out.push_str(&e.lemma);
        out.push('\t');
        if emit_forms {
            let form = e.form().ok_or(SerializeError::MissingForm { index })?;
            out.push_str(form);
            out.push('\t');
        }
        write!(out, "{}", e.bundle).expect("writing to a String");
        out.push('\n');
    }
    Ok(out)
}

/// Number of tab-separated fields on the first non-blank line, if any.
pub fn sniff_columns(text: &str) -> Option<usize> {
    text.lines()
        .map(|l| l.trim_end_matches('\r'))
        .find(|l| !l.trim().is_empty())
        .map(|l| l.split('\t').count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_three_columns() {
        let d = parse_dataset("walk\twalked\tV;PST", "eng", ParseOptions::with_forms()).unwrap();
        let e = &d.entries()[0];
        assert_eq!(e.lemma, "walk");
        assert_eq!(e.form(), Some("walked"));
        assert_eq!(e.bundle.to_string(), "V;PST");
    }

    #[test]
    fn parses_blind() {
        let d = parse_dataset("walk\tV;PST\n", "eng", ParseOptions::blind()).unwrap();
        assert_eq!(d.entries()[0].form, None);
        assert_eq!(d.entries()[0].bundle.len(), 2);
    }

    #[test]
    fn arity_error_reports_line_and_count() {
        let err = parse_dataset("walk\twalked", "eng", ParseOptions::with_forms()).unwrap_err();
        assert_eq!(
            err,
            ParseError::MalformedLine {
                line: 1,
                found: 2,
                expected: 3
            }
        );
        let err = parse_dataset("\n\na\tb\tV\nc\td\n", "eng", ParseOptions::with_forms()).unwrap_err();
        assert_eq!(err.line(), 4);
    }

    #[test]
    fn empty_fields() {
        let opts = ParseOptions::with_forms();
        assert!(matches!(
            parse_dataset("\tx\tV", "eng", opts),
            Err(ParseError::EmptyField { field: "lemma", .. })
        ));
        assert!(matches!(
            parse_dataset("a\t\tV", "eng", opts),
            Err(ParseError::EmptyField { field: "form", .. })
        ));
        assert!(matches!(
            parse_dataset("a\tb\t", "eng", opts),
            Err(ParseError::EmptyField { field: "tags", .. })
        ));
        assert!(matches!(
            parse_dataset("a\tb\tV; PST", "eng", opts),
            Err(ParseError::InvalidTag { .. })
        ));
    }

    #[test]
    fn invalid_utf8_is_located() {
        let bytes = b"a\tb\tV\nc\xff\td\tV\n";
        let err = parse_dataset_bytes(bytes, "x", ParseOptions::with_forms()).unwrap_err();
        assert_eq!(err, ParseError::InvalidUtf8 { line: 2, offset: 7 });
    }

    #[test]
    fn crlf_and_blank_lines() {
        let d = parse_dataset("a\tb\tV\r\n\r\n\nc\td\tN\r\n", "x", ParseOptions::with_forms()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.entries()[1].bundle.to_string(), "N");
    }

    #[test]
    fn nfc_is_opt_in() {
        let decomposed = "e\u{301}\te\u{301}s\tN";
        let raw = parse_dataset(decomposed, "x", ParseOptions::with_forms()).unwrap();
        assert_eq!(raw.entries()[0].lemma.chars().count(), 2);
        let opts = ParseOptions {
            expect_forms: true,
            nfc: true,
        };
        let nfc = parse_dataset(decomposed, "x", opts).unwrap();
        assert_eq!(nfc.entries()[0].lemma, "\u{e9}");
    }

    #[test]
    fn serialize_examples() {
        let d = Dataset::new("eng", vec![Entry::triple("walk", "walked", "V;PST").unwrap()]);
        assert_eq!(serialize_dataset(&d, true).unwrap(), "walk\twalked\tV;PST\n");
        assert_eq!(serialize_dataset(&d, false).unwrap(), "walk\tV;PST\n");
        assert_eq!(serialize_dataset(&Dataset::empty("eng"), true).unwrap(), "");
        let two = Dataset::new(
            "eng",
            vec![
                Entry::triple("b", "bs", "N;PL").unwrap(),
                Entry::triple("a", "as", "N;PL").unwrap(),
            ],
        );
        assert_eq!(serialize_dataset(&two, true).unwrap(), "b\tbs\tN;PL\na\tas\tN;PL\n");
        assert_eq!(
            serialize_dataset(&d.blind(), true),
            Err(SerializeError::MissingForm { index: 0 })
        );
    }
}
