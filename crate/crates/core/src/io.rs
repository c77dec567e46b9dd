//! JSON file formats for configs and nodal datasets.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inverse::{InverseError, NodalDataset, NodalEntry, Provenance};
use crate::model::{validate_config, ConfigError, ProblemConfig, RawConfig};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] InverseError),
}

/// Problem data echoed into a nodal file, or a free-form label such as
/// `"external"` when the data did not come from a known config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigEcho {
    Config(RawConfig),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalHeader {
    pub config: ConfigEcho,
    pub provenance: Provenance,
}

/// On-disk nodal dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalFile {
    pub version: u32,
    pub header: NodalHeader,
    pub entries: Vec<NodalEntry>,
}

impl NodalFile {
    pub fn new(dataset: &NodalDataset, config: Option<&ProblemConfig>) -> Self {
        NodalFile {
            version: FORMAT_VERSION,
            header: NodalHeader {
                config: match config {
                    Some(c) => ConfigEcho::Config(c.to_raw()),
                    None => ConfigEcho::Label("external".into()),
                },
                provenance: dataset.provenance,
            },
            entries: dataset.entries.clone(),
        }
    }

    pub fn dataset(&self) -> Result<NodalDataset, IoError> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version(self.version));
        }
        Ok(NodalDataset::new(
            self.header.provenance,
            self.entries.clone(),
        )?)
    }

    /// The echoed config, validated, if there is one.
    pub fn config(&self) -> Result<Option<ProblemConfig>, IoError> {
        match &self.header.config {
            ConfigEcho::Config(raw) => Ok(Some(validate_config(raw)?)),
            ConfigEcho::Label(_) => Ok(None),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("nodal files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_config(path: &Path) -> Result<ProblemConfig, IoError> {
    let raw: RawConfig = read_json(path)?;
    Ok(validate_config(&raw)?)
}

pub fn read_nodal_file(path: &Path) -> Result<NodalFile, IoError> {
    let file: NodalFile = read_json(path)?;
    if file.version != FORMAT_VERSION {
        return Err(IoError::Version(file.version));
    }
    Ok(file)
}
