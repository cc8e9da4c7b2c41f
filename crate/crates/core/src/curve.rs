//! Nodal curves as dual graphs.
//!
//! A vertex is an irreducible component carrying its geometric genus, an edge
//! is a node, and a loop is a node joining a component to itself. Subcurves
//! are unions of components, so they are vertex subsets.
//!
//! Vertices and edges are stored sorted by id. Internal indices are therefore
//! canonical: two graphs built from the same records compare equal no matter
//! in which order the records were given.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::sheaves::Multidegree;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    /// Endpoint indices with `ends[0] <= ends[1]`; equal for a loop.
    pub ends: [usize; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    pub fn other_end(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.ends[0] == v || self.ends[1] == v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "crate::io::CurveFile", into = "crate::io::CurveFile")]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    /// Non-loop neighbours of each vertex.
    adjacency: Vec<BitSet>,
}

#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    vertices: Vec<(String, u32)>,
    edges: Vec<(String, String, String)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: impl Into<String>, genus: u32) -> Self {
        self.vertices.push((id.into(), genus));
        self
    }

    pub fn edge(mut self, id: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.edges.push((id.into(), a.into(), b.into()));
        self
    }

    pub fn build(self) -> Result<DualGraph> {
        DualGraph::from_records(self.vertices, self.edges)
    }
}

/// Classification of a curve by its exceptional components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveClass {
    Stable,
    Quasistable,
    Semistable,
    /// Some exceptional component meets the rest of the curve at most once.
    #[serde(rename = "none")]
    Unstable,
}

impl CurveClass {
    pub fn is_semistable(self) -> bool {
        !matches!(self, CurveClass::Unstable)
    }

    pub fn is_quasistable(self) -> bool {
        matches!(self, CurveClass::Stable | CurveClass::Quasistable)
    }

    pub fn is_stable(self) -> bool {
        matches!(self, CurveClass::Stable)
    }
}

/// A maximal chain of exceptional components, oriented by its attaching vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalChain {
    /// Exceptional vertices in order; `vertices[0]` meets `ends[0]`.
    pub vertices: Vec<usize>,
    /// Edges along the chain, `vertices.len() + 1` of them, starting at `ends[0]`.
    pub edges: Vec<usize>,
    /// Non-exceptional attaching vertices; equal when the chain closes a loop.
    pub ends: [usize; 2],
}

impl DualGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn from_records(vertices: Vec<(String, u32)>, edges: Vec<(String, String, String)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if vertices.len() > BitSet::CAPACITY {
            return Err(Error::TooLarge {
                what: "vertex",
                count: vertices.len(),
                max: BitSet::CAPACITY,
            });
        }
        if edges.len() > BitSet::CAPACITY {
            return Err(Error::TooLarge {
                what: "edge",
                count: edges.len(),
                max: BitSet::CAPACITY,
            });
        }

        let mut vertices: Vec<Vertex> = vertices.into_iter().map(|(id, genus)| Vertex { id, genus }).collect();
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
        }

        let mut built = Vec::with_capacity(edges.len());
        for (id, a, b) in edges {
            let ia = *vertex_index.get(&a).ok_or(Error::UnknownVertex(a))?;
            let ib = *vertex_index.get(&b).ok_or(Error::UnknownVertex(b))?;
            built.push(Edge {
                id,
                ends: [ia.min(ib), ia.max(ib)],
            });
        }
        built.sort_by(|a, b| a.id.cmp(&b.id));
        let mut edge_index = BTreeMap::new();
        for (i, e) in built.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateEdge(e.id.clone()));
            }
        }

        let mut adjacency = vec![BitSet::empty(); vertices.len()];
        for e in built.iter().filter(|e| !e.is_loop()) {
            adjacency[e.ends[0]].insert(e.ends[1]);
            adjacency[e.ends[1]].insert(e.ends[0]);
        }

        let graph = DualGraph {
            vertices,
            edges: built,
            vertex_index,
            edge_index,
            adjacency,
        };
        if !graph.is_connected_set(graph.all_vertices()) {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn require_vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index(id).ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn require_edge(&self, id: &str) -> Result<usize> {
        self.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_owned()))
    }

    pub fn all_vertices(&self) -> BitSet {
        BitSet::full(self.vertices.len())
    }

    pub fn all_edges(&self) -> BitSet {
        BitSet::full(self.edges.len())
    }

    pub fn neighbors(&self, v: usize) -> BitSet {
        self.adjacency[v]
    }

    /// Arithmetic genus `|E| - |V| + 1 + sum of vertex genera`.
    pub fn genus(&self) -> i64 {
        let geometric: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        self.edges.len() as i64 - self.vertices.len() as i64 + 1 + geometric
    }

    pub fn loop_count(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.is_loop() && e.ends[0] == v).count()
    }

    /// Number of edge-ends at `v`; loops count twice.
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.ends[0] == v) as usize + (e.ends[1] == v) as usize)
            .sum()
    }

    /// Degree of the dualizing sheaf on each component: `2 g_v - 2 + valence`.
    pub fn omega_multidegree(&self) -> Multidegree {
        Multidegree::new(
            (0..self.vertex_count())
                .map(|v| 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64)
                .collect(),
        )
    }

    pub fn omega_degree_of(&self, set: BitSet) -> i64 {
        set.iter()
            .map(|v| 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64)
            .sum()
    }

    /// Edges with both ends in `set`, loops included.
    pub fn internal_edge_count(&self, set: BitSet) -> usize {
        self.edges
            .iter()
            .filter(|e| set.contains(e.ends[0]) && set.contains(e.ends[1]))
            .count()
    }

    /// Edges with exactly one end in `set`.
    pub fn boundary_edge_count(&self, set: BitSet) -> usize {
        self.edges
            .iter()
            .filter(|e| set.contains(e.ends[0]) != set.contains(e.ends[1]))
            .count()
    }

    /// `chi(O_Z) = |Z| - (internal edges) - (sum of genera)`.
    pub fn chi_of(&self, set: BitSet) -> i64 {
        let genera: i64 = set.iter().map(|v| self.vertices[v].genus as i64).sum();
        set.len() as i64 - self.internal_edge_count(set) as i64 - genera
    }

    pub fn is_connected_set(&self, set: BitSet) -> bool {
        let Some(start) = set.iter().next() else {
            return false;
        };
        let mut seen = BitSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = BitSet::empty();
            for v in frontier {
                next = next.union(self.adjacency[v]);
            }
            frontier = next.intersection(set).difference(seen);
            seen = seen.union(frontier);
        }
        seen == set
    }

    /// Number of connected components of the subgraph induced on `set`.
    pub fn component_count(&self, set: BitSet) -> usize {
        let mut remaining = set;
        let mut count = 0;
        while let Some(start) = remaining.iter().next() {
            let mut seen = BitSet::singleton(start);
            let mut frontier = seen;
            while !frontier.is_empty() {
                let mut next = BitSet::empty();
                for v in frontier {
                    next = next.union(self.adjacency[v]);
                }
                frontier = next.intersection(remaining).difference(seen);
                seen = seen.union(frontier);
            }
            remaining = remaining.difference(seen);
            count += 1;
        }
        count
    }

    /// The subgraph induced on a connected vertex set.
    pub fn induced(&self, set: BitSet) -> Result<DualGraph> {
        let vertices = set
            .iter()
            .map(|v| (self.vertices[v].id.clone(), self.vertices[v].genus))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| set.contains(e.ends[0]) && set.contains(e.ends[1]))
            .map(|e| {
                (
                    e.id.clone(),
                    self.vertices[e.ends[0]].id.clone(),
                    self.vertices[e.ends[1]].id.clone(),
                )
            })
            .collect();
        DualGraph::from_records(vertices, edges)
    }

    /// Smooth rational component, not the whole curve, meeting the rest at most twice.
    pub fn is_exceptional(&self, v: usize) -> bool {
        self.vertices.len() > 1
            && self.vertices[v].genus == 0
            && self.loop_count(v) == 0
            && self.boundary_edge_count(BitSet::singleton(v)) <= 2
    }

    pub fn exceptional_vertices(&self) -> BitSet {
        (0..self.vertex_count()).filter(|&v| self.is_exceptional(v)).collect()
    }

    pub fn classify(&self) -> CurveClass {
        let exceptional = self.exceptional_vertices();
        if exceptional
            .iter()
            .any(|v| self.boundary_edge_count(BitSet::singleton(v)) < 2)
        {
            return CurveClass::Unstable;
        }
        if exceptional.is_empty() {
            CurveClass::Stable
        } else if exceptional
            .iter()
            .all(|v| self.adjacency[v].intersection(exceptional).is_empty())
        {
            CurveClass::Quasistable
        } else {
            CurveClass::Semistable
        }
    }

    /// All connected subcurves, smallest first, built by breadth-first closure.
    pub fn connected_subcurves(&self, proper: bool) -> Vec<Subcurve<'_>> {
        self.connected_sets(proper)
            .into_iter()
            .map(|members| Subcurve { graph: self, members })
            .collect()
    }

    /// Vertex sets of [`connected_subcurves`](Self::connected_subcurves).
    pub fn connected_sets(&self, proper: bool) -> Vec<BitSet> {
        let full = self.all_vertices();
        let mut out = Vec::new();
        let mut layer: BTreeSet<BitSet> = (0..self.vertex_count()).map(BitSet::singleton).collect();
        while !layer.is_empty() {
            let mut next = BTreeSet::new();
            for &set in &layer {
                let mut reach = BitSet::empty();
                for v in set {
                    reach = reach.union(self.adjacency[v]);
                }
                for u in reach.difference(set) {
                    next.insert(set.with(u));
                }
            }
            out.extend(layer.into_iter().filter(|&s| !(proper && s == full)));
            layer = next;
        }
        out
    }

    /// Maximal chains of exceptional vertices.
    ///
    /// Chains run from the attaching vertex with the smaller id; a chain whose
    /// two ends attach to the same vertex starts at its smaller-id extremity.
    pub fn maximal_exceptional_chains(&self) -> Result<Vec<ExceptionalChain>> {
        if !self.classify().is_semistable() {
            return Err(Error::NotSemistable);
        }
        let exceptional = self.exceptional_vertices();
        let mut visited = BitSet::empty();
        let mut chains = Vec::new();

        for (start_edge, e) in self.edges.iter().enumerate() {
            for (anchor, first) in [(e.ends[0], e.ends[1]), (e.ends[1], e.ends[0])] {
                if exceptional.contains(anchor) || !exceptional.contains(first) || visited.contains(first) {
                    continue;
                }
                let mut vertices = vec![first];
                let mut edges = vec![start_edge];
                let mut current = first;
                let mut via = start_edge;
                loop {
                    visited.insert(current);
                    let (next_edge, next) = self
                        .edges
                        .iter()
                        .enumerate()
                        .find(|&(i, f)| i != via && f.touches(current))
                        .map(|(i, f)| (i, f.other_end(current)))
                        .expect("exceptional vertex in a semistable curve has two edges");
                    edges.push(next_edge);
                    if !exceptional.contains(next) {
                        chains.push(orient(ExceptionalChain {
                            vertices,
                            edges,
                            ends: [anchor, next],
                        }));
                        break;
                    }
                    vertices.push(next);
                    current = next;
                    via = next_edge;
                }
            }
        }

        if visited != exceptional {
            return Err(Error::ExceptionalCycle);
        }
        chains.sort_by(|a, b| (a.ends, a.vertices[0]).cmp(&(b.ends, b.vertices[0])));
        Ok(chains)
    }
}

fn orient(mut chain: ExceptionalChain) -> ExceptionalChain {
    let flip = if chain.ends[0] == chain.ends[1] {
        chain.vertices[0] > *chain.vertices.last().unwrap()
    } else {
        chain.ends[0] > chain.ends[1]
    };
    if flip {
        chain.vertices.reverse();
        chain.edges.reverse();
        chain.ends.swap(0, 1);
    }
    chain
}

/// A nonempty union of components of a fixed curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subcurve<'g> {
    graph: &'g DualGraph,
    members: BitSet,
}

impl<'g> Subcurve<'g> {
    pub fn new(graph: &'g DualGraph, members: BitSet) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySubcurve);
        }
        if let Some(bad) = members.difference(graph.all_vertices()).iter().next() {
            return Err(Error::SubcurveOutOfRange(bad));
        }
        Ok(Subcurve { graph, members })
    }

    pub fn from_ids<'a>(graph: &'g DualGraph, ids: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let members = ids
            .into_iter()
            .map(|id| graph.require_vertex(id))
            .collect::<Result<BitSet>>()?;
        Subcurve::new(graph, members)
    }

    pub fn whole(graph: &'g DualGraph) -> Self {
        Subcurve {
            graph,
            members: graph.all_vertices(),
        }
    }

    pub fn graph(&self) -> &'g DualGraph {
        self.graph
    }

    pub fn members(&self) -> BitSet {
        self.members
    }

    pub fn ids(&self) -> Vec<&'g str> {
        self.members.iter().map(|v| self.graph.vertex(v).id.as_str()).collect()
    }

    pub fn is_proper(&self) -> bool {
        self.members != self.graph.all_vertices()
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected_set(self.members)
    }

    pub fn complement(&self) -> Option<Subcurve<'g>> {
        let rest = self.graph.all_vertices().difference(self.members);
        (!rest.is_empty()).then_some(Subcurve {
            graph: self.graph,
            members: rest,
        })
    }

    /// Number of nodes joining the subcurve to its complement.
    pub fn boundary_count(&self) -> Result<usize> {
        if !self.is_proper() {
            return Err(Error::NotProper);
        }
        Ok(self.graph.boundary_edge_count(self.members))
    }

    /// Euler characteristic of the structure sheaf of the subcurve.
    pub fn chi_structure(&self) -> i64 {
        self.graph.chi_of(self.members)
    }

    pub fn omega_degree(&self) -> i64 {
        self.graph.omega_degree_of(self.members)
    }
}
