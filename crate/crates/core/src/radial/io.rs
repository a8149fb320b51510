//! Field snapshots: CSV `(r, value)` and JSON with grid metadata.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GridSpec, RadialField, RadialGrid};
use crate::error::{Error, Result};

pub const SNAPSHOT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub schema_version: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub grid: Option<GridSpec>,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn snapshot(&self) -> FieldSnapshot {
        FieldSnapshot {
            schema_version: SNAPSHOT_SCHEMA,
            n: self.grid.dim(),
            grid: self.grid.spec(),
            nodes: self.grid.nodes().to_vec(),
            values: self.values.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.snapshot()).expect("finite values serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: FieldSnapshot = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_snapshot(snap)
    }

    pub fn from_snapshot(snap: FieldSnapshot) -> Result<Self> {
        if snap.schema_version != SNAPSHOT_SCHEMA {
            return Err(Error::Format(format!("unsupported snapshot schema {}", snap.schema_version)));
        }
        let grid = match snap.grid {
            Some(spec) => {
                let g = RadialGrid::new(spec)?;
                if g.nodes() != snap.nodes.as_slice() {
                    return Err(Error::Format("snapshot nodes disagree with its grid spec".into()));
                }
                g
            }
            None => RadialGrid::from_nodes(snap.n, snap.nodes)?,
        };
        RadialField::new(grid, snap.values)
    }

    /// `r,value` lines in shortest round-trip notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            out.push_str(&format!("{r:e},{v:e}\n"));
        }
        out
    }

    pub fn from_csv(n: u32, text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('r')) {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Format(format!("line {}: missing column", i + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))
            };
            nodes.push(parse(parts.next())?);
            values.push(parse(parts.next())?);
        }
        let grid: Arc<RadialGrid> = RadialGrid::from_nodes(n, nodes)?;
        RadialField::new(grid, values)
    }
}
