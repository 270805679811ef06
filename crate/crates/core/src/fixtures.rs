//! Synthetic bibliographies generated from a manifest of team templates.
//!
//! A template fixes the classification, author count and internal-author
//! count of `count` papers, so the team profiles of the generated corpus
//! are known exactly from the manifest alone. The seed only decides years,
//! paper order and which internal researchers sign each paper.

use serde::Deserialize;
use thiserror::Error;

use crate::calibration::{Author, BibRecord};
use crate::rng::RngStream;
use crate::types::{Culture, PerCulture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct TeamTemplate {
    pub classification: Culture,
    pub count: usize,
    pub size: usize,
    pub internal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub first_year: i32,
    pub last_year: i32,
    /// Number of internal researchers in each culture's department.
    pub internal_staff: PerCulture<usize>,
    #[serde(rename = "template")]
    pub templates: Vec<TeamTemplate>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("manifest: {0}")]
    Invalid(String),
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let m: Manifest = toml::from_str(text)?;
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<(), ManifestError> {
        if self.first_year > self.last_year {
            return Err(ManifestError::Invalid("first_year after last_year".into()));
        }
        for (i, t) in self.templates.iter().enumerate() {
            if t.size == 0 || t.internal > t.size {
                return Err(ManifestError::Invalid(format!(
                    "template {i}: need 0 <= internal <= size and size >= 1"
                )));
            }
            if t.internal > self.internal_staff[t.classification] {
                return Err(ManifestError::Invalid(format!(
                    "template {i}: {} internal authors but only {} {} staff",
                    t.internal, self.internal_staff[t.classification], t.classification
                )));
            }
        }
        Ok(())
    }

    pub fn paper_count(&self) -> usize {
        self.templates.iter().map(|t| t.count).sum()
    }
}

fn staff_id(culture: Culture, n: usize) -> String {
    format!("{culture}-int-{:02}", n + 1)
}

/// Expands the manifest into records. Deterministic in the manifest.
pub fn generate(manifest: &Manifest) -> Vec<BibRecord> {
    let mut rng = RngStream::new(manifest.seed, 0);
    let mut specs: Vec<TeamTemplate> = manifest
        .templates
        .iter()
        .flat_map(|t| std::iter::repeat_n(*t, t.count))
        .collect();
    for i in (1..specs.len()).rev() {
        specs.swap(i, rng.index(i + 1));
    }

    let mut next_external = 0usize;
    let width = specs.len().to_string().len().max(3);
    specs
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let year = rng.int_inclusive(i64::from(manifest.first_year), i64::from(manifest.last_year)) as i32;
            let staff = manifest.internal_staff[t.classification];
            let mut pool: Vec<usize> = (0..staff).collect();
            let mut authors = Vec::with_capacity(t.size);
            for k in 0..t.internal {
                let j = k + rng.index(staff - k);
                pool.swap(k, j);
                authors.push(Author {
                    id: staff_id(t.classification, pool[k]),
                    is_internal: true,
                    culture: t.classification,
                });
            }
            for _ in t.internal..t.size {
                next_external += 1;
                authors.push(Author {
                    id: format!("ext-{next_external:04}"),
                    is_internal: false,
                    culture: t.classification,
                });
            }
            BibRecord {
                paper_id: format!("P{:0width$}", i + 1),
                year,
                authors,
                classification: t.classification,
            }
        })
        .collect()
}
