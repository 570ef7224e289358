use std::fmt;

use serde::Serialize;

use super::{canonicalize_detailed, Dataset, Schema, UnimorphError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FindingKind {
    DuplicateCategory {
        category: String,
        first: String,
        second: String,
    },
    NonCanonicalOrder {
        found: String,
        expected: String,
    },
    RepeatedTag {
        tag: String,
    },
    EmptyField {
        field: &'static str,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    /// Zero-based index of the entry in the dataset.
    pub index: usize,
    #[serde(flatten)]
    pub kind: FindingKind,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry {}: ", self.index)?;
        match &self.kind {
            FindingKind::DuplicateCategory {
                category,
                first,
                second,
            } => write!(f, "category {category} assigned twice ({first}, {second})"),
            FindingKind::NonCanonicalOrder { found, expected } => {
                write!(f, "tags {found} not in canonical order (expected {expected})")
            }
            FindingKind::RepeatedTag { tag } => write!(f, "tag {tag} repeated"),
            FindingKind::EmptyField { field } => write!(f, "empty {field}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn count<F: Fn(&FindingKind) -> bool>(&self, pred: F) -> usize {
        self.findings.iter().filter(|f| pred(&f.kind)).count()
    }
}

/// Checks every entry against the schema without modifying the dataset.
pub fn validate_dataset(d: &Dataset, schema: &Schema) -> ValidationReport {
    let mut findings = Vec::new();
    for (index, e) in d.iter().enumerate() {
        let mut push = |kind| findings.push(Finding { index, kind });
        if e.lemma.is_empty() {
            push(FindingKind::EmptyField { field: "lemma" });
        }
        if e.form.as_deref() == Some("") {
            push(FindingKind::EmptyField { field: "form" });
        }
        match canonicalize_detailed(&e.bundle, schema) {
            Ok(canonical) => {
                for tag in canonical.collapsed {
                    push(FindingKind::RepeatedTag {
                        tag: tag.to_string(),
                    });
                }
                let found: Vec<_> = dedup_in_order(e.bundle.tags());
                if found.as_slice() != canonical.bundle.tags().iter().collect::<Vec<_>>().as_slice() {
                    push(FindingKind::NonCanonicalOrder {
                        found: e.bundle.to_string(),
                        expected: canonical.bundle.to_string(),
                    });
                }
            }
            Err(UnimorphError::DuplicateCategory {
                category,
                first,
                second,
            }) => push(FindingKind::DuplicateCategory {
                category,
                first,
                second,
            }),
            Err(other) => unreachable!("canonicalizing a valid bundle failed: {other}"),
        }
    }
    ValidationReport { findings }
}

fn dedup_in_order<T: PartialEq>(items: &[T]) -> Vec<&T> {
    let mut out: Vec<&T> = Vec::with_capacity(items.len());
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}
