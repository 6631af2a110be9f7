//! Map files: the JSON exchange format for piecewise maps. Loading accepts
//! any field order; saving is canonical (fixed field order, shortest
//! round-trip decimals, trailing newline), so load → save is idempotent.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branch::BranchSpec;
use crate::map::{MapBuildError, PiecewiseMap, Provenance};

#[derive(Debug, Error)]
pub enum MapfileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed map file {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("map file {path} violates structural invariants: {source}")]
    Structure {
        path: String,
        #[source]
        source: MapBuildError,
    },
    #[error(
        "map file {path}: stored exceptional_set {stored:?} does not match \
         branch boundaries {derived:?}"
    )]
    InconsistentExceptionalSet {
        path: String,
        stored: Vec<f64>,
        derived: Vec<f64>,
    },
}

/// On-disk layout. `exceptional_set` is redundant with the branch boundaries
/// and is cross-checked on load.
#[derive(Debug, Serialize, Deserialize)]
struct RawMapFile {
    name: String,
    exceptional_set: Vec<f64>,
    branches: Vec<BranchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

pub fn load_map(path: impl AsRef<Path>) -> Result<PiecewiseMap, MapfileError> {
    let path = path.as_ref();
    let p = || path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| MapfileError::Io {
        path: p(),
        source,
    })?;
    let raw: RawMapFile = serde_json::from_str(&text).map_err(|source| MapfileError::Parse {
        path: p(),
        source,
    })?;
    let map = PiecewiseMap::new(raw.name, raw.branches, raw.provenance).map_err(|source| {
        MapfileError::Structure {
            path: p(),
            source,
        }
    })?;
    if raw.exceptional_set != map.exceptional_set {
        return Err(MapfileError::InconsistentExceptionalSet {
            path: p(),
            stored: raw.exceptional_set,
            derived: map.exceptional_set,
        });
    }
    Ok(map)
}

/// Canonical serialization of a map.
pub fn canonical_json(map: &PiecewiseMap) -> String {
    let raw = RawMapFile {
        name: map.name.clone(),
        exceptional_set: map.exceptional_set.clone(),
        branches: map.branches.clone(),
        provenance: map.provenance.clone(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("map serialization cannot fail");
    s.push('\n');
    s
}

pub fn save_map(map: &PiecewiseMap, path: impl AsRef<Path>) -> Result<(), MapfileError> {
    let path = path.as_ref();
    fs::write(path, canonical_json(map)).map_err(|source| MapfileError::Io {
        path: path.display().to_string(),
        source,
    })
}
