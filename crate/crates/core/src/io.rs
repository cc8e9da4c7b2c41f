//! JSON file formats.
//!
//! ```text
//! curve          {"vertices":[{"id":"v","genus":0},..],"edges":[{"id":"e1","ends":["v","w"]},..]}
//! modification   {"target":<curve>,"modified_edges":[{"edge":"e1","length":2}]}
//! multidegree    {"v":0,"w":2}
//! sheaf model    {"noninvertible":["e1"],"multidegree":{"v":0,"w":1}}
//! polarization   {"rank":2,"e":{"v":-1,"w":-1}}
//! ```
//!
//! Multidegrees, sheaf models and polarizations only make sense relative to a
//! curve, so they go through the `*File` records and a graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::curve::DualGraph;
use crate::error::{Error, Result};
use crate::modification::Modification;
use crate::sheaves::{Multidegree, SheafModel};
use crate::stability::Polarization;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    pub genus: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub ends: [String; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
}

impl TryFrom<CurveFile> for DualGraph {
    type Error = Error;

    fn try_from(file: CurveFile) -> Result<Self> {
        DualGraph::from_records(
            file.vertices.into_iter().map(|v| (v.id, v.genus)).collect(),
            file.edges
                .into_iter()
                .map(|e| {
                    let [a, b] = e.ends;
                    (e.id, a, b)
                })
                .collect(),
        )
    }
}

impl From<DualGraph> for CurveFile {
    fn from(g: DualGraph) -> Self {
        CurveFile {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexRecord {
                    id: v.id.clone(),
                    genus: v.genus,
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    ends: [g.vertex(e.ends[0]).id.clone(), g.vertex(e.ends[1]).id.clone()],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModifiedEdge {
    pub edge: String,
    pub length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModificationFile {
    pub target: DualGraph,
    #[serde(default)]
    pub modified_edges: Vec<ModifiedEdge>,
}

impl TryFrom<ModificationFile> for Modification {
    type Error = Error;

    fn try_from(file: ModificationFile) -> Result<Self> {
        let mut lengths = BTreeMap::new();
        for m in &file.modified_edges {
            let e = file.target.require_edge(&m.edge)?;
            if m.length == 0 {
                return Err(Error::NonPositiveLength(m.edge.clone()));
            }
            lengths.insert(e, m.length);
        }
        Modification::from_lengths(file.target, lengths)
    }
}

impl From<Modification> for ModificationFile {
    fn from(m: Modification) -> Self {
        let modified_edges = m
            .lengths()
            .iter()
            .map(|(&e, &length)| ModifiedEdge {
                edge: m.target().edge(e).id.clone(),
                length,
            })
            .collect();
        ModificationFile {
            target: m.target().clone(),
            modified_edges,
        }
    }
}

pub type MultidegreeFile = BTreeMap<String, i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafModelFile {
    #[serde(default)]
    pub noninvertible: Vec<String>,
    pub multidegree: MultidegreeFile,
}

impl SheafModelFile {
    pub fn from_model(graph: &DualGraph, model: &SheafModel) -> Self {
        SheafModelFile {
            noninvertible: model.noninvertible_ids(graph).into_iter().map(str::to_owned).collect(),
            multidegree: model.tilde.to_map(graph),
        }
    }

    pub fn to_model(&self, graph: &DualGraph) -> Result<SheafModel> {
        let n = self
            .noninvertible
            .iter()
            .map(|e| graph.require_edge(e))
            .collect::<Result<BitSet>>()?;
        SheafModel::new(graph, n, Multidegree::from_map(graph, &self.multidegree)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationFile {
    pub rank: i64,
    pub e: MultidegreeFile,
}

impl PolarizationFile {
    pub fn from_polarization(graph: &DualGraph, pol: &Polarization) -> Self {
        PolarizationFile {
            rank: pol.rank,
            e: pol.e.to_map(graph),
        }
    }

    pub fn to_polarization(&self, graph: &DualGraph) -> Result<Polarization> {
        Polarization::new(self.rank, Multidegree::from_map(graph, &self.e)?)
    }
}

pub fn curve_from_json(text: &str) -> Result<DualGraph> {
    Ok(serde_json::from_str(text)?)
}

pub fn modification_from_json(text: &str) -> Result<Modification> {
    Ok(serde_json::from_str(text)?)
}

pub fn multidegree_from_json(graph: &DualGraph, text: &str) -> Result<Multidegree> {
    let map: MultidegreeFile = serde_json::from_str(text)?;
    Multidegree::from_map(graph, &map)
}

pub fn sheaf_from_json(graph: &DualGraph, text: &str) -> Result<SheafModel> {
    let file: SheafModelFile = serde_json::from_str(text)?;
    file.to_model(graph)
}

pub fn polarization_from_json(graph: &DualGraph, text: &str) -> Result<Polarization> {
    let file: PolarizationFile = serde_json::from_str(text)?;
    file.to_polarization(graph)
}
