//! JSON form of a diagram.
//!
//! Input needs only `crossings` (rows of four labels, same slot convention
//! as the text format) and optional `free_loops`. Emission also writes the
//! derived fields `signs`, `writhe` and `components` (edge labels in
//! traversal order per component). Derived fields present on input are
//! checked against the reconstruction and a mismatch is an error, so stale
//! files do not pass silently.

use serde::{Deserialize, Serialize};

use super::{Crossing, Diagram};
use crate::error::{LinkError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramJson {
    pub crossings: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub free_loops: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub writhe: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<usize>>>,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl DiagramJson {
    pub fn from_diagram(d: &Diagram) -> Self {
        DiagramJson {
            crossings: d.crossings().iter().map(|x| x.edges).collect(),
            free_loops: d.free_loops(),
            signs: Some(d.signs().to_vec()),
            writhe: Some(d.writhe()),
            components: Some(
                (0..d.n_graph_components())
                    .map(|c| d.component_edges(c))
                    .collect(),
            ),
        }
    }

    pub fn into_diagram(self) -> Result<Diagram> {
        let crossings = self
            .crossings
            .iter()
            .map(|&edges| Crossing { edges })
            .collect();
        let d = Diagram::new(crossings, self.free_loops)?;
        if let Some(signs) = &self.signs {
            if signs.as_slice() != d.signs() {
                return Err(LinkError::MalformedCode(
                    "stored signs disagree with the crossing data".into(),
                ));
            }
        }
        if let Some(w) = self.writhe {
            if w != d.writhe() {
                return Err(LinkError::MalformedCode(
                    "stored writhe disagrees with the crossing data".into(),
                ));
            }
        }
        if let Some(comps) = &self.components {
            let derived: Vec<Vec<usize>> = (0..d.n_graph_components())
                .map(|c| d.component_edges(c))
                .collect();
            if *comps != derived {
                return Err(LinkError::MalformedCode(
                    "stored components disagree with the crossing data".into(),
                ));
            }
        }
        Ok(d)
    }

    pub fn from_str(text: &str) -> Result<Diagram> {
        let me: DiagramJson =
            serde_json::from_str(text).map_err(|e| LinkError::MalformedCode(e.to_string()))?;
        me.into_diagram()
    }
}
