use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::UnimorphError;

/// A single morphosyntactic feature tag such as `V`, `PST` or `PSS1S`.
///
/// Tags never contain tabs, newlines, semicolons, or surrounding whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureTag(String);

impl FeatureTag {
    pub fn new(text: impl Into<String>) -> Result<Self, UnimorphError> {
        let text = text.into();
        if text.is_empty()
            || text.contains(';')
            || text.chars().any(|c| c == '\t' || c == '\n' || c == '\r')
            || text.trim() != text
        {
            return Err(UnimorphError::InvalidTag(text));
        }
        Ok(FeatureTag(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for FeatureTag {
    type Error = UnimorphError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        FeatureTag::new(value)
    }
}

impl From<FeatureTag> for String {
    fn from(tag: FeatureTag) -> Self {
        tag.0
    }
}

/// An ordered, non-empty sequence of feature tags (an MSD).
///
/// Parsing and display use the `;`-joined shared-task notation. The order is
/// kept exactly as written; see [`crate::unimorph::canonicalize_bundle`] for
/// the schema-driven canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureBundle {
    tags: Vec<FeatureTag>,
}

impl FeatureBundle {
    pub fn new(tags: Vec<FeatureTag>) -> Result<Self, UnimorphError> {
        if tags.is_empty() {
            return Err(UnimorphError::EmptyBundle);
        }
        Ok(FeatureBundle { tags })
    }

    pub fn tags(&self) -> &[FeatureTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t.as_str() == tag)
    }

    /// Order-insensitive identity of the bundle: the sorted set of tag texts.
    ///
    /// Two bundles that canonicalize to the same result under any schema share
    /// this key, so it can be used for grouping without a schema at hand.
    pub fn set_key(&self) -> String {
        let mut texts: Vec<&str> = self.tags.iter().map(FeatureTag::as_str).collect();
        texts.sort_unstable();
        texts.dedup();
        texts.join(";")
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tag) in self.tags.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(tag.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for FeatureBundle {
    type Err = UnimorphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(UnimorphError::EmptyBundle);
        }
        let tags = s
            .split(';')
            .map(FeatureTag::new)
            .collect::<Result<Vec<_>, _>>()?;
        FeatureBundle::new(tags)
    }
}

impl Serialize for FeatureBundle {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureBundle {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
