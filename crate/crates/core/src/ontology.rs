//! Compact drug-lead ontologies: a root drug class, drug instances, and
//! each drug's components (SMILES fragments, conventional names, and an
//! optional skeleton placeholder for the part of the molecule the explicit
//! components leave out).
//!
//! # File format
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "root_class": "Chemotherapy",
//!   "drugs": [
//!     {
//!       "name": "Nelarabine",
//!       "full_smiles": "COC1=NC(N)=NC2=C1N=CN2C1OC(CO)C(O)C1O",
//!       "components": [
//!         { "kind": "fragment", "text": "(N)=NC2=C1N=CN2C" },
//!         { "kind": "named", "label": "Component-A" },
//!         { "kind": "skeleton" }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! `full_smiles` is omitted when unknown. Unknown keys are rejected.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::smiles::{tokenize, SmilesError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum OntologyError {
    #[error("root class name is empty")]
    EmptyRootClass,
    #[error("drug name is empty")]
    EmptyName,
    #[error("drug {0:?} already exists")]
    DuplicateDrug(String),
    #[error("drug {0:?} not found")]
    UnknownDrug(String),
    #[error("invalid SMILES for {drug:?}: {source}")]
    InvalidSmiles {
        drug: String,
        #[source]
        source: SmilesError,
    },
    #[error("drug {0:?} already has a skeleton")]
    DuplicateSkeleton(String),
    #[error("component text is empty")]
    EmptyComponent,
    #[error("malformed ontology file at line {line}, column {column}: {reason}")]
    MalformedFile {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("ontology file I/O: {0}")]
    Io(#[from] std::io::Error),
}

impl OntologyError {
    pub fn code(&self) -> &'static str {
        match self {
            OntologyError::EmptyRootClass => "EmptyRootClass",
            OntologyError::EmptyName => "EmptyName",
            OntologyError::DuplicateDrug(_) => "DuplicateDrug",
            OntologyError::UnknownDrug(_) => "UnknownDrug",
            OntologyError::InvalidSmiles { .. } => "InvalidSmiles",
            OntologyError::DuplicateSkeleton(_) => "DuplicateSkeleton",
            OntologyError::EmptyComponent => "EmptyComponent",
            OntologyError::MalformedFile { .. } => "MalformedFile",
            OntologyError::Io(_) => "OntologyIo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Component {
    /// A linearized SMILES substring, usable as a search query.
    Fragment { text: String },
    /// A conventional name, kept as an opaque label.
    Named { label: String },
    /// Marks that the explicit components do not cover the whole molecule.
    Skeleton,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrugEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_smiles: Option<String>,
    #[serde(default)]
    pub components: Vec<Component>,
}

impl DrugEntry {
    pub fn has_skeleton(&self) -> bool {
        self.components
            .iter()
            .any(|c| matches!(c, Component::Skeleton))
    }

    pub fn fragments(&self) -> impl Iterator<Item = &str> {
        self.components.iter().filter_map(|c| match c {
            Component::Fragment { text } => Some(text.as_str()),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrugLeadOntology {
    pub root_class: String,
    pub drugs: Vec<DrugEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OntologyFile {
    format_version: u32,
    root_class: String,
    #[serde(default)]
    drugs: Vec<DrugEntry>,
}

#[derive(Serialize)]
struct OntologyFileRef<'a> {
    format_version: u32,
    root_class: &'a str,
    drugs: &'a [DrugEntry],
}

impl DrugLeadOntology {
    pub fn new(root_class: impl Into<String>) -> Result<Self, OntologyError> {
        let root_class = root_class.into();
        if root_class.trim().is_empty() {
            return Err(OntologyError::EmptyRootClass);
        }
        Ok(DrugLeadOntology {
            root_class,
            drugs: Vec::new(),
        })
    }

    pub fn drug(&self, name: &str) -> Option<&DrugEntry> {
        self.drugs.iter().find(|d| d.name == name)
    }

    pub fn add_drug(
        mut self,
        name: impl Into<String>,
        full_smiles: Option<String>,
    ) -> Result<Self, OntologyError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(OntologyError::EmptyName);
        }
        if self.drug(&name).is_some() {
            return Err(OntologyError::DuplicateDrug(name));
        }
        if let Some(smiles) = &full_smiles {
            if let Err(source) = tokenize(smiles) {
                return Err(OntologyError::InvalidSmiles { drug: name, source });
            }
        }
        self.drugs.push(DrugEntry {
            name,
            full_smiles,
            components: Vec::new(),
        });
        Ok(self)
    }

    pub fn add_component(
        mut self,
        drug: &str,
        component: Component,
    ) -> Result<Self, OntologyError> {
        let entry = self
            .drugs
            .iter_mut()
            .find(|d| d.name == drug)
            .ok_or_else(|| OntologyError::UnknownDrug(drug.to_owned()))?;
        match &component {
            Component::Skeleton if entry.has_skeleton() => {
                return Err(OntologyError::DuplicateSkeleton(drug.to_owned()))
            }
            Component::Fragment { text } | Component::Named { label: text } if text.is_empty() => {
                return Err(OntologyError::EmptyComponent)
            }
            _ => {}
        }
        entry.components.push(component);
        Ok(self)
    }

    /// `(drug, fragment)` pairs for one drug or all drugs, in insertion
    /// order. Named components and skeletons are skipped.
    pub fn search_inputs(
        &self,
        drug: Option<&str>,
    ) -> Result<Vec<(String, String)>, OntologyError> {
        let selected: Vec<&DrugEntry> = match drug {
            Some(name) => vec![self
                .drug(name)
                .ok_or_else(|| OntologyError::UnknownDrug(name.to_owned()))?],
            None => self.drugs.iter().collect(),
        };
        Ok(selected
            .into_iter()
            .flat_map(|d| d.fragments().map(move |f| (d.name.clone(), f.to_owned())))
            .collect())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.root_class.trim().is_empty() {
            report.error(None, "EmptyRootClass", "root class name is empty");
        }
        let mut names = HashSet::new();
        for drug in &self.drugs {
            let who = Some(drug.name.as_str());
            if drug.name.trim().is_empty() {
                report.error(who, "EmptyName", "drug name is empty");
            }
            if !names.insert(drug.name.as_str()) {
                report.error(who, "DuplicateDrug", "drug name appears more than once");
            }
            let skeletons = drug
                .components
                .iter()
                .filter(|c| matches!(c, Component::Skeleton))
                .count();
            if skeletons > 1 {
                report.error(
                    who,
                    "DuplicateSkeleton",
                    format!("{skeletons} skeleton components"),
                );
            }
            for c in &drug.components {
                if let Component::Fragment { text } | Component::Named { label: text } = c {
                    if text.is_empty() {
                        report.error(who, "EmptyComponent", "component text is empty");
                    }
                }
            }
            let Some(full) = &drug.full_smiles else {
                continue;
            };
            if let Err(e) = tokenize(full) {
                report.error(who, "InvalidSmiles", e.to_string());
                continue;
            }
            let mut covered = vec![false; full.len()];
            for fragment in drug.fragments().filter(|f| !f.is_empty()) {
                match full.find(fragment) {
                    Some(at) => covered[at..at + fragment.len()].fill(true),
                    None => report.warn(
                        who,
                        "FragmentNotSubstring",
                        format!("fragment {fragment:?} does not occur in the full structure"),
                    ),
                }
            }
            if !drug.has_skeleton() && covered.iter().any(|c| !c) {
                report.warn(
                    who,
                    "MissingSkeleton",
                    "components do not cover the whole structure and no skeleton is present",
                );
            }
        }
        report
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&OntologyFileRef {
            format_version: FORMAT_VERSION,
            root_class: &self.root_class,
            drugs: &self.drugs,
        })
        .expect("ontology serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, OntologyError> {
        let file: OntologyFile =
            serde_json::from_str(text).map_err(|e| OntologyError::MalformedFile {
                line: e.line(),
                column: e.column(),
                reason: e.to_string(),
            })?;
        if file.format_version != FORMAT_VERSION {
            return Err(OntologyError::MalformedFile {
                line: 1,
                column: 1,
                reason: format!(
                    "unsupported format_version {} (expected {FORMAT_VERSION})",
                    file.format_version
                ),
            });
        }
        Ok(DrugLeadOntology {
            root_class: file.root_class,
            drugs: file.drugs,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), OntologyError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OntologyError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub drug: Option<String>,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.drug {
            Some(d) => write!(f, "{} [{}]: {}", self.code, d, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    fn error(&mut self, drug: Option<&str>, code: &'static str, message: impl Into<String>) {
        self.errors.push(Finding {
            drug: drug.map(str::to_owned),
            code,
            message: message.into(),
        });
    }

    fn warn(&mut self, drug: Option<&str>, code: &'static str, message: impl Into<String>) {
        self.warnings.push(Finding {
            drug: drug.map(str::to_owned),
            code,
            message: message.into(),
        });
    }

    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }
}
