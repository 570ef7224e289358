//! UniMorph-style triples: tags, bundles, entries, datasets, the category
//! schema, and the shared-task TSV format.

mod dataset;
mod schema;
mod tags;
mod tsv;
mod validate;

use thiserror::Error;

pub use dataset::{Dataset, Entry};
pub use schema::{canonicalize_bundle, canonicalize_detailed, Canonical, CategorySlot, Schema};
pub use tags::{FeatureBundle, FeatureTag};
pub use tsv::{
    parse_dataset, parse_dataset_bytes, serialize_dataset, sniff_columns, ParseError,
    ParseOptions, SerializeError,
};
pub use validate::{validate_dataset, Finding, FindingKind, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnimorphError {
    #[error("invalid feature tag {0:?}")]
    InvalidTag(String),
    #[error("feature bundle has no tags")]
    EmptyBundle,
    #[error("empty {0}")]
    EmptyField(&'static str),
    #[error("{0} contains a tab or newline")]
    ControlCharacter(&'static str),
    #[error("category {category} assigned two tags: {first} and {second}")]
    DuplicateCategory {
        category: String,
        first: String,
        second: String,
    },
    #[error("schema: {0}")]
    Schema(String),
}

/// Canonicalizes every bundle of a dataset, reporting the first failing entry.
pub fn canonicalize_dataset(d: Dataset, schema: &Schema) -> Result<Dataset, (usize, UnimorphError)> {
    let mut index = 0;
    d.try_map(|mut e| {
        e.bundle = canonicalize_bundle(&e.bundle, schema).map_err(|err| (index, err))?;
        index += 1;
        Ok(e)
    })
}
