//! Figure-ready run output. Every run is wrapped in one envelope carrying
//! the echoed configuration, the analytic and empirical series, warnings,
//! and the comparison report; it serializes as long-format CSV or as JSON
//! against the embedded schema. Identical envelopes serialize to
//! identical bytes.

use crate::comb::{EmpiricalDensity, SpectralMeasure};
use crate::error::{invalid, Result};
use crate::tm_spectrum::DistributionFunction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "1";

/// The published shape of the JSON envelope. `validate_envelope` enforces
/// exactly this contract.
pub const ENVELOPE_SCHEMA: &str = r#"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "combscope run envelope",
  "type": "object",
  "required": ["schema_version", "model", "params", "seed", "series", "comparison", "warnings"],
  "additionalProperties": false,
  "properties": {
    "schema_version": { "const": "1" },
    "model": { "type": "string" },
    "params": { "type": "object", "additionalProperties": { "type": "string" } },
    "seed": { "type": ["integer", "null"], "minimum": 0 },
    "series": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["label", "atoms", "grid", "values"],
        "additionalProperties": false,
        "properties": {
          "label": { "type": "string" },
          "atoms": { "type": "array", "items": { "type": "array", "prefixItems": [{ "type": "number" }, { "type": "number" }], "minItems": 2, "maxItems": 2 } },
          "grid": { "type": "array", "items": { "type": "number" } },
          "values": { "type": "array", "items": { "type": "number" } }
        }
      }
    },
    "comparison": {
      "type": ["object", "null"],
      "required": ["interval", "l1_distance", "sup_distance", "atom_table"],
      "additionalProperties": false,
      "properties": {
        "interval": { "type": "array", "prefixItems": [{ "type": "number" }, { "type": "number" }], "minItems": 2, "maxItems": 2 },
        "l1_distance": { "type": ["number", "null"] },
        "sup_distance": { "type": ["number", "null"] },
        "atom_table": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["position", "analytic", "empirical"],
            "additionalProperties": false,
            "properties": {
              "position": { "type": "number" },
              "analytic": { "type": "number" },
              "empirical": { "type": ["number", "null"] }
            }
          }
        }
      }
    },
    "warnings": { "type": "array", "items": { "type": "string" } }
  }
}"#;

/// One named curve, possibly with point masses riding on top of it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub label: String,
    pub atoms: Vec<(f64, f64)>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn curve(label: impl Into<String>, grid: Vec<f64>, values: Vec<f64>) -> Result<Series> {
        if grid.len() != values.len() {
            return Err(invalid("series grid and values must have equal length"));
        }
        Ok(Series { label: label.into(), atoms: Vec::new(), grid, values })
    }

    pub fn from_density(label: impl Into<String>, density: &EmpiricalDensity) -> Series {
        Series {
            label: label.into(),
            atoms: Vec::new(),
            grid: density.grid().values(),
            values: density.values().to_vec(),
        }
    }

    pub fn from_spectrum(label: impl Into<String>, spectrum: &SpectralMeasure) -> Series {
        Series {
            label: label.into(),
            atoms: spectrum.atoms().to_vec(),
            grid: spectrum.ac_density().grid().values(),
            values: spectrum.ac_density().values().to_vec(),
        }
    }

    /// Node values of a distribution function on [0, 1].
    pub fn from_distribution(label: impl Into<String>, f: &DistributionFunction) -> Series {
        let h = f.step();
        Series {
            label: label.into(),
            atoms: Vec::new(),
            grid: (0..=f.grid_size()).map(|j| j as f64 * h).collect(),
            values: f.values().to_vec(),
        }
    }

    pub fn with_atoms(mut self, atoms: Vec<(f64, f64)>) -> Series {
        self.atoms = atoms;
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomRow {
    pub position: f64,
    pub analytic: f64,
    pub empirical: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    pub interval: (f64, f64),
    pub l1_distance: Option<f64>,
    pub sup_distance: Option<f64>,
    pub atom_table: Vec<AtomRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub schema_version: String,
    pub model: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub series: Vec<Series>,
    pub comparison: Option<Comparison>,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn new(model: impl Into<String>, seed: Option<u64>) -> Envelope {
        Envelope {
            schema_version: SCHEMA_VERSION.to_string(),
            model: model.into(),
            params: BTreeMap::new(),
            seed,
            series: Vec::new(),
            comparison: None,
            warnings: Vec::new(),
        }
    }

    pub fn set_param(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    pub fn push_series(&mut self, series: Series) {
        self.series.push(series);
    }

    pub fn push_warning(&mut self, warning: impl Into<String>) {
        self.warnings.push(warning.into());
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("envelope serializes");
        text.push('\n');
        text
    }

    /// Long-format table: `x,series,value` rows, atoms as `label.atoms`
    /// rows, configuration echoed in leading comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema_version,{}", self.schema_version);
        let _ = writeln!(out, "# model,{}", self.model);
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "# seed,{s}");
            }
            None => {
                let _ = writeln!(out, "# seed,");
            }
        }
        for (key, value) in &self.params {
            let _ = writeln!(out, "# param,{key},{value}");
        }
        for warning in &self.warnings {
            let _ = writeln!(out, "# warning,{warning}");
        }
        if let Some(cmp) = &self.comparison {
            let _ = writeln!(out, "# comparison_interval,{},{}", cmp.interval.0, cmp.interval.1);
            if let Some(l1) = cmp.l1_distance {
                let _ = writeln!(out, "# comparison_l1,{l1}");
            }
            if let Some(sup) = cmp.sup_distance {
                let _ = writeln!(out, "# comparison_sup,{sup}");
            }
            for row in &cmp.atom_table {
                let emp = row.empirical.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(out, "# atom,{},{},{emp}", row.position, row.analytic);
            }
        }
        let _ = writeln!(out, "x,series,value");
        for series in &self.series {
            for &(pos, mass) in &series.atoms {
                let _ = writeln!(out, "{pos},{}.atoms,{mass}", series.label);
            }
            for (x, v) in series.grid.iter().zip(&series.values) {
                let _ = writeln!(out, "{x},{},{v}", series.label);
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Strict parse of a JSON envelope: unknown fields are rejected, the
/// schema version must match, every numeric entry must be finite, and
/// series grids must align with their values.
pub fn validate_envelope(text: &str) -> Result<Envelope> {
    let envelope: Envelope = serde_json::from_str(text)
        .map_err(|e| invalid(format!("envelope does not match the schema: {e}")))?;
    if envelope.schema_version != SCHEMA_VERSION {
        return Err(invalid(format!(
            "schema version {:?} is not {SCHEMA_VERSION:?}",
            envelope.schema_version
        )));
    }
    for series in &envelope.series {
        if series.grid.len() != series.values.len() {
            return Err(invalid(format!(
                "series {:?} has {} grid points but {} values",
                series.label,
                series.grid.len(),
                series.values.len()
            )));
        }
        let finite = series.grid.iter().chain(&series.values).all(|v| v.is_finite())
            && series.atoms.iter().all(|(p, m)| p.is_finite() && m.is_finite());
        if !finite {
            return Err(invalid(format!("series {:?} contains non-finite entries", series.label)));
        }
    }
    if let Some(cmp) = &envelope.comparison {
        let finite = cmp.interval.0.is_finite()
            && cmp.interval.1.is_finite()
            && cmp.l1_distance.map_or(true, f64::is_finite)
            && cmp.sup_distance.map_or(true, f64::is_finite)
            && cmp
                .atom_table
                .iter()
                .all(|row| {
                    row.position.is_finite()
                        && row.analytic.is_finite()
                        && row.empirical.map_or(true, f64::is_finite)
                });
        if !finite {
            return Err(invalid("comparison contains non-finite entries"));
        }
    }
    Ok(envelope)
}
