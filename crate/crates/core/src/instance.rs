//! Instance files.
//!
//! ```json
//! {"m": 3, "ranges": [[0, 1], [1, 2]], "weights": [1, 1, 2],
//!  "points": [[0.1, 0.2], ...],
//!  "shapes": {"class": "discs", "seed": 1, "params": {...}, "items": [...]}}
//! ```
//!
//! Only `m` and `ranges` are required. Reading accepts unsorted ranges with
//! repeated points; writing always emits the canonical sorted form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{derive_system, GenParams, GeometryInstance, Shape, ShapeClass};
use crate::system::{SetSystem, WeightVector};

/// How a geometric instance was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapePayload {
    pub class: ShapeClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GenParams>,
    #[serde(default)]
    pub items: Vec<Shape>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub system: SetSystem,
    pub weights: Option<WeightVector>,
    pub points: Option<Vec<[f64; 2]>>,
    pub shapes: Option<ShapePayload>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    m: usize,
    ranges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shapes: Option<ShapePayload>,
}

impl Instance {
    pub fn from_system(system: SetSystem) -> Self {
        Self {
            system,
            weights: None,
            points: None,
            shapes: None,
        }
    }

    pub fn from_geometry(
        geo: GeometryInstance,
        seed: Option<u64>,
        params: Option<GenParams>,
    ) -> Self {
        Self {
            system: geo.system,
            weights: None,
            points: Some(geo.points),
            shapes: Some(ShapePayload {
                class: geo.class,
                seed,
                params,
                items: geo.shapes,
            }),
        }
    }

    pub fn class(&self) -> Option<ShapeClass> {
        self.shapes.as_ref().map(|s| s.class)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let system = SetSystem::from_unsorted(file.m, file.ranges)?;
        let weights = match file.weights {
            Some(raw) => {
                if raw.len() != file.m {
                    return Err(Error::WeightLength {
                        expected: file.m,
                        got: raw.len(),
                    });
                }
                Some(WeightVector::new(raw)?)
            }
            None => None,
        };
        if let Some(points) = &file.points {
            if points.len() != file.m {
                return Err(Error::Parse(format!(
                    "{} points listed for m = {}",
                    points.len(),
                    file.m
                )));
            }
        }
        if let (Some(points), Some(shapes)) = (&file.points, &file.shapes) {
            if !shapes.items.is_empty() && derive_system(points, &shapes.items)? != system {
                return Err(Error::Parse(
                    "ranges do not match the listed points and shapes".into(),
                ));
            }
        }
        Ok(Self {
            system,
            weights,
            points: file.points,
            shapes: file.shapes,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            m: self.system.num_points(),
            ranges: self.system.ranges().to_vec(),
            weights: self.weights.as_ref().map(|w| w.as_slice().to_vec()),
            points: self.points.clone(),
            shapes: self.shapes.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
        text.push('\n');
        text
    }
}
