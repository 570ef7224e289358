use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{FeatureBundle, UnimorphError};

/// One lemma / form / feature-bundle triple.
///
/// `form` is absent in blind test files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entry {
    pub lemma: String,
    pub form: Option<String>,
    pub bundle: FeatureBundle,
}

fn check_field(name: &'static str, value: &str) -> Result<(), UnimorphError> {
    if value.is_empty() {
        return Err(UnimorphError::EmptyField(name));
    }
    if value.contains(['\t', '\n']) {
        return Err(UnimorphError::ControlCharacter(name));
    }
    Ok(())
}

impl Entry {
    pub fn new(
        lemma: impl Into<String>,
        form: Option<String>,
        bundle: FeatureBundle,
    ) -> Result<Self, UnimorphError> {
        let lemma = lemma.into();
        check_field("lemma", &lemma)?;
        if let Some(form) = &form {
            check_field("form", form)?;
        }
        Ok(Entry {
            lemma,
            form,
            bundle,
        })
    }

    /// Convenience constructor for a full triple, with the bundle in `;` notation.
    pub fn triple(lemma: &str, form: &str, bundle: &str) -> Result<Self, UnimorphError> {
        Entry::new(lemma, Some(form.to_owned()), bundle.parse()?)
    }

    pub fn form(&self) -> Option<&str> {
        self.form.as_deref()
    }

    /// The same entry with its form removed, as in a blind test file.
    pub fn blind(&self) -> Entry {
        Entry {
            form: None,
            ..self.clone()
        }
    }
}

/// A language-labelled sequence of entries together with its alphabet.
///
/// The alphabet is the set of characters occurring in any lemma or form and
/// is kept in sync on every mutation, which is why the entries are private.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    language: String,
    entries: Vec<Entry>,
    alphabet: BTreeSet<char>,
}

impl Dataset {
    pub fn new(language: impl Into<String>, entries: Vec<Entry>) -> Self {
        let mut d = Dataset {
            language: language.into(),
            entries,
            alphabet: BTreeSet::new(),
        };
        d.recompute_alphabet();
        d
    }

    pub fn empty(language: impl Into<String>) -> Self {
        Dataset::new(language, Vec::new())
    }

    fn recompute_alphabet(&mut self) {
        self.alphabet.clear();
        for e in &self.entries {
            extend_alphabet(&mut self.alphabet, e);
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Entry> {
        self.entries
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Entry> {
        self.entries.iter()
    }

    pub fn push(&mut self, entry: Entry) {
        extend_alphabet(&mut self.alphabet, &entry);
        self.entries.push(entry);
    }

    pub fn extend<I: IntoIterator<Item = Entry>>(&mut self, entries: I) {
        for e in entries {
            self.push(e);
        }
    }

    pub fn retain<F: FnMut(&Entry) -> bool>(&mut self, f: F) {
        self.entries.retain(f);
        self.recompute_alphabet();
    }

    /// Rebuilds the dataset with every entry passed through `f`.
    pub fn try_map<F, E>(self, f: F) -> Result<Dataset, E>
    where
        F: FnMut(Entry) -> Result<Entry, E>,
    {
        let entries = self.entries.into_iter().map(f).collect::<Result<_, _>>()?;
        Ok(Dataset::new(self.language, entries))
    }

    /// Copy of the dataset with all forms stripped.
    pub fn blind(&self) -> Dataset {
        Dataset::new(
            self.language.clone(),
            self.entries.iter().map(Entry::blind).collect(),
        )
    }

    pub fn has_all_forms(&self) -> bool {
        self.entries.iter().all(|e| e.form.is_some())
    }
}

fn extend_alphabet(alphabet: &mut BTreeSet<char>, e: &Entry) {
    alphabet.extend(e.lemma.chars());
    if let Some(form) = &e.form {
        alphabet.extend(form.chars());
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Entry;
    type IntoIter = std::slice::Iter<'a, Entry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
