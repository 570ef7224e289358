use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::{FeatureBundle, FeatureTag, UnimorphError};

const DEFAULT_SCHEMA: &str = include_str!("default_schema.tsv");

/// Maps tag texts onto categories and fixes the order categories appear in
/// once a bundle is canonicalized.
///
/// Text format, UTF-8, one record per line:
///
/// ```text
/// # comments and blank lines are ignored
/// @categories<TAB>POS<TAB>Aspect<TAB>Tense ...
/// @pos<TAB>POS
/// V<TAB>POS
/// PST<TAB>Tense
/// ```
///
/// The `@categories` header must come before any tag line and lists every
/// category exactly once; its order is the canonical order. `@pos` names the
/// categories that hold part-of-speech tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    category_of: HashMap<String, String>,
    category_order: Vec<String>,
    pos_categories: BTreeSet<String>,
}

/// Where a tag sorts in canonical order. Unknown tags share a sentinel slot
/// after every known category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CategorySlot {
    Known(usize),
    Unknown,
}

impl Schema {
    pub fn new(
        category_order: Vec<String>,
        category_of: HashMap<String, String>,
        pos_categories: BTreeSet<String>,
    ) -> Result<Self, UnimorphError> {
        let mut seen = BTreeSet::new();
        for c in &category_order {
            if !seen.insert(c.as_str()) {
                return Err(UnimorphError::Schema(format!("category {c} listed twice")));
            }
        }
        for (tag, c) in &category_of {
            if !seen.contains(c.as_str()) {
                return Err(UnimorphError::Schema(format!(
                    "tag {tag} maps to unlisted category {c}"
                )));
            }
        }
        for c in &pos_categories {
            if !seen.contains(c.as_str()) {
                return Err(UnimorphError::Schema(format!(
                    "part-of-speech category {c} is not listed"
                )));
            }
        }
        Ok(Schema {
            category_of,
            category_order,
            pos_categories,
        })
    }

    /// The built-in inventory covering the common UniMorph categories.
    pub fn builtin() -> Self {
        Schema::parse(DEFAULT_SCHEMA).expect("built-in schema is well formed")
    }

    pub fn load(path: &Path) -> Result<Self, UnimorphError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UnimorphError::Schema(format!("{}: {e}", path.display())))?;
        Schema::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, UnimorphError> {
        let mut order: Option<Vec<String>> = None;
        let mut pos = BTreeSet::new();
        let mut category_of = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| UnimorphError::Schema(format!("line {}: {msg}", i + 1));
            match fields[0] {
                "@categories" => {
                    if order.is_some() {
                        return Err(bad("duplicate @categories header"));
                    }
                    order = Some(fields[1..].iter().map(|s| s.to_string()).collect());
                }
                "@pos" => pos.extend(fields[1..].iter().map(|s| s.to_string())),
                tag => {
                    if order.is_none() {
                        return Err(bad("tag line before @categories header"));
                    }
                    if fields.len() != 2 {
                        return Err(bad("expected TAG<TAB>CATEGORY"));
                    }
                    FeatureTag::new(tag).map_err(|_| bad("invalid tag"))?;
                    if category_of
                        .insert(tag.to_string(), fields[1].to_string())
                        .is_some()
                    {
                        return Err(bad("tag listed twice"));
                    }
                }
            }
        }
        let order = order.ok_or_else(|| UnimorphError::Schema("missing @categories header".into()))?;
        Schema::new(order, category_of, pos)
    }

    pub fn category_of(&self, tag: &str) -> Option<&str> {
        self.category_of.get(tag).map(String::as_str)
    }

    pub fn category_order(&self) -> &[String] {
        &self.category_order
    }

    pub fn slot(&self, tag: &str) -> CategorySlot {
        self.category_of(tag)
            .and_then(|c| self.category_order.iter().position(|o| o == c))
            .map_or(CategorySlot::Unknown, CategorySlot::Known)
    }

    pub fn is_pos_category(&self, category: &str) -> bool {
        self.pos_categories.contains(category)
    }

    /// The first tag of the bundle that belongs to a part-of-speech category.
    pub fn pos_of<'b>(&self, bundle: &'b FeatureBundle) -> Option<&'b str> {
        bundle
            .tags()
            .iter()
            .map(FeatureTag::as_str)
            .find(|t| self.category_of(t).is_some_and(|c| self.is_pos_category(c)))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("@categories");
        for c in &self.category_order {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        if !self.pos_categories.is_empty() {
            out.push_str("@pos");
            for c in &self.pos_categories {
                out.push('\t');
                out.push_str(c);
            }
            out.push('\n');
        }
        let mut tags: Vec<(&String, &String)> = self.category_of.iter().collect();
        tags.sort_by_key(|(t, c)| (self.category_order.iter().position(|o| o == *c), *t));
        for (t, c) in tags {
            out.push_str(t);
            out.push('\t');
            out.push_str(c);
            out.push('\n');
        }
        out
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::builtin()
    }
}

/// Result of canonicalizing a bundle that did not raise an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub bundle: FeatureBundle,
    /// Tags that appeared more than once verbatim and were collapsed.
    pub collapsed: Vec<FeatureTag>,
}

/// Sorts tags into the schema's category order and rejects bundles that
/// assign two different tags to one category.
///
/// Sorting is stable, so tags sharing a slot (in practice: unknown tags) keep
/// their written order. Repeated identical tags are collapsed with a warning.
pub fn canonicalize_bundle(
    bundle: &FeatureBundle,
    schema: &Schema,
) -> Result<FeatureBundle, UnimorphError> {
    let canonical = canonicalize_detailed(bundle, schema)?;
    for tag in &canonical.collapsed {
        log::warn!("collapsed repeated tag {tag} in bundle {bundle}");
    }
    Ok(canonical.bundle)
}

pub fn canonicalize_detailed(
    bundle: &FeatureBundle,
    schema: &Schema,
) -> Result<Canonical, UnimorphError> {
    let mut kept: Vec<&FeatureTag> = Vec::with_capacity(bundle.len());
    let mut collapsed = Vec::new();
    for tag in bundle.tags() {
        if kept.contains(&tag) {
            collapsed.push(tag.clone());
        } else {
            kept.push(tag);
        }
    }
    for (i, a) in kept.iter().enumerate() {
        let Some(cat) = schema.category_of(a.as_str()) else {
            continue;
        };
        if let Some(b) = kept[i + 1..]
            .iter()
            .find(|b| schema.category_of(b.as_str()) == Some(cat))
        {
            return Err(UnimorphError::DuplicateCategory {
                category: cat.to_string(),
                first: a.to_string(),
                second: b.to_string(),
            });
        }
    }
    kept.sort_by_key(|t| schema.slot(t.as_str()));
    Ok(Canonical {
        bundle: FeatureBundle::new(kept.into_iter().cloned().collect())?,
        collapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> FeatureBundle {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_orders_pos_before_tense() {
        let s = Schema::builtin();
        assert_eq!(canonicalize_bundle(&b("PST;V"), &s).unwrap(), b("V;PST"));
        assert_eq!(canonicalize_bundle(&b("V;PST"), &s).unwrap(), b("V;PST"));
        assert_eq!(s.category_of("SG"), Some("Number"));
        assert_eq!(s.pos_of(&b("PST;V")), Some("V"));
    }

    #[test]
    fn duplicate_category_is_an_error() {
        let s = Schema::builtin();
        let err = canonicalize_bundle(&b("V;SG;PL"), &s).unwrap_err();
        assert_eq!(
            err,
            UnimorphError::DuplicateCategory {
                category: "Number".into(),
                first: "SG".into(),
                second: "PL".into()
            }
        );
    }

    #[test]
    fn identical_repeats_collapse() {
        let s = Schema::builtin();
        let c = canonicalize_detailed(&b("V;V;PST"), &s).unwrap();
        assert_eq!(c.bundle, b("V;PST"));
        assert_eq!(c.collapsed.len(), 1);
    }

    #[test]
    fn unknown_tags_go_last_in_written_order() {
        let s = Schema::builtin();
        let got = canonicalize_bundle(&b("LGSPEC2;PST;LGSPEC1;V"), &s).unwrap();
        assert_eq!(got, b("V;PST;LGSPEC2;LGSPEC1"));
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let s = Schema::builtin();
        assert_eq!(Schema::parse(&s.to_text()).unwrap(), s);
        assert!(Schema::parse("V\tPOS\n").is_err());
        assert!(Schema::parse("@categories\tA\nV\tB\n").is_err());
        assert!(Schema::parse("@categories\tA\tA\n").is_err());
        let custom = Schema::parse("@categories\tTense\tPOS\nV\tPOS\nPST\tTense\n").unwrap();
        assert_eq!(canonicalize_bundle(&b("V;PST"), &custom).unwrap(), b("PST;V"));
    }
}
