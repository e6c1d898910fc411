//! Problem-document serialization: one JSON file carrying an instance plus
//! either explicit scenarios or a sampler recipe.

use crate::instance::{validate_instance, Instance};
use crate::scenario::{
    sample_scenarios, validate_scenarios, SamplerConfig, SamplerError, ScenarioSet,
};
use crate::validation::ValidationReport;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// On-disk problem description.
///
/// Exactly one of `scenarios` (explicit list) or `sampler` (generation
/// recipe, paired with `sampler_seed`) must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<ScenarioSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    /// Seed for the sampler; defaults to 0 when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler_seed: Option<u64>,
}

/// Errors reading, parsing, or resolving a problem document.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("document must carry exactly one of `scenarios` or `sampler`")]
    ScenarioSource,
    #[error("{0}")]
    Sampler(#[from] SamplerError),
    #[error("invalid problem:\n{0}")]
    Invalid(ValidationReport),
}

/// Parse a problem document from disk.
pub fn load_document(path: &Path) -> Result<ProblemDocument, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| LoadError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Turn a document into a concrete scenario set, sampling when a recipe is
/// given. Does not validate; see [`load_problem`].
pub fn resolve_scenarios(doc: &ProblemDocument) -> Result<ScenarioSet, LoadError> {
    match (&doc.scenarios, &doc.sampler) {
        (Some(set), None) => Ok(set.clone()),
        (None, Some(cfg)) => {
            let seed = doc.sampler_seed.unwrap_or(0);
            Ok(sample_scenarios(cfg, seed)?)
        }
        _ => Err(LoadError::ScenarioSource),
    }
}

/// Load, resolve, and validate a problem in one step.
pub fn load_problem(path: &Path) -> Result<(Instance, ScenarioSet), LoadError> {
    let doc = load_document(path)?;
    let scen = resolve_scenarios(&doc)?;
    let mut report = validate_instance(&doc.instance);
    report.extend(validate_scenarios(&scen, &doc.instance));
    if !report.is_ok() {
        return Err(LoadError::Invalid(report));
    }
    Ok((doc.instance, scen))
}

/// Write a document back to disk as pretty-printed JSON.
pub fn save_document(doc: &ProblemDocument, path: &Path) -> Result<(), LoadError> {
    let text = serde_json::to_string_pretty(doc).expect("document serializes");
    std::fs::write(path, text).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}
