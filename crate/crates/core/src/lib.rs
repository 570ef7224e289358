//! Toolkit for the morphological reinflection task: UniMorph data handling,
//! corpus splitting and data-quality statistics, the affix-rule baseline,
//! hallucination-based augmentation, and significance-tiered evaluation.

pub mod baseline;
pub mod datakit;
pub mod evalkit;
pub mod hallucinate;
pub mod rng;
pub mod synthetic;
pub mod unimorph;

pub use unimorph::{Dataset, Entry, FeatureBundle, FeatureTag, Schema};
