//! On-disk formats: collections, joint tables and coupling artifacts.

use std::fs;
use std::path::Path;

use mincouple_core::{make_pmf, CellOrigin, Coupling, Pmf, SplitLimits};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::CliError;

pub const TOOL: &str = "mincouple";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionFile {
    pub distributions: Vec<Vec<f64>>,
    /// One display name per distribution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// One display name per element of the ground set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// A validated collection.
#[derive(Debug, Clone)]
pub struct Collection {
    pub pmfs: Vec<Pmf>,
    pub labels: Vec<String>,
}

impl Collection {
    pub fn n(&self) -> usize {
        self.pmfs.iter().map(Pmf::len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub joint: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_steps: Option<usize>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingFile {
    pub tool: String,
    pub version: String,
    pub m: usize,
    pub n: usize,
    pub q: Vec<f64>,
    pub maps: Vec<Vec<usize>>,
    /// `[rank, stick]` of each cell.
    #[serde(default)]
    pub provenance: Vec<[usize; 2]>,
    #[serde(default)]
    pub truncation: Option<Truncation>,
}

impl CouplingFile {
    pub fn from_coupling(c: &Coupling) -> Self {
        let limits = c.limits();
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            m: c.m(),
            n: c.n(),
            q: c.q().masses().to_vec(),
            maps: c.maps().to_vec(),
            provenance: c.provenance().iter().map(|o| [o.rank, o.stick]).collect(),
            truncation: (!limits.is_exact()).then_some(Truncation {
                max_steps: limits.max_steps,
                eps: limits.eps,
            }),
        }
    }

    pub fn into_coupling(self) -> Result<Coupling, CliError> {
        if self.maps.len() != self.m {
            return Err(CliError::Parse(format!(
                "coupling declares m = {} but has {} maps",
                self.m,
                self.maps.len()
            )));
        }
        let limits = self.truncation.map_or(SplitLimits::EXACT, |t| SplitLimits {
            max_steps: t.max_steps,
            eps: t.eps,
        });
        let provenance = self
            .provenance
            .iter()
            .map(|&[rank, stick]| CellOrigin { rank, stick })
            .collect();
        Ok(Coupling::from_parts(self.q, self.maps, provenance, self.n, limits)?)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_collection(path: &Path) -> Result<Collection, CliError> {
    let file: CollectionFile = read_json(path)?;
    if file.distributions.is_empty() {
        return Err(CliError::Parse(format!(
            "{}: no distributions",
            path.display()
        )));
    }
    let pmfs = file
        .distributions
        .iter()
        .enumerate()
        .map(|(row, masses)| {
            make_pmf(masses).map_err(|source| CliError::Row {
                path: path.to_path_buf(),
                row,
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels = match file.labels {
        Some(labels) if labels.len() != pmfs.len() => {
            return Err(CliError::Parse(format!(
                "{}: {} labels for {} distributions",
                path.display(),
                labels.len(),
                pmfs.len()
            )))
        }
        Some(labels) => labels,
        None => (0..pmfs.len()).map(|i| format!("p{i}")).collect(),
    };
    let n = pmfs.iter().map(Pmf::len).max().unwrap_or(0);
    if let Some(names) = &file.names {
        if names.len() != n {
            return Err(CliError::Parse(format!(
                "{}: {} names for a ground set of size {n}",
                path.display(),
                names.len()
            )));
        }
    }
    Ok(Collection { pmfs, labels })
}

pub fn read_joint(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    read_json::<JointFile>(path).map(|f| f.joint)
}

pub fn read_coupling(path: &Path) -> Result<Coupling, CliError> {
    let file: CouplingFile = read_json(path)?;
    file.into_coupling().map_err(|e| match e {
        CliError::Core(source) => CliError::Parse(format!("{}: {source}", path.display())),
        other => other,
    })
}
