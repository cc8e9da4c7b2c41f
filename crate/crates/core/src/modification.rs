//! Semistable modifications `ψ: Y → X` at the level of dual graphs.
//!
//! `Y` is obtained from `X` by replacing each node `e` in a chosen set `N`
//! with a chain of `η(e)` smooth rational components. Chain vertices get ids
//! `"{e}#1" .. "{e}#η(e)"` numbered from the endpoint of `e` with the smaller
//! id, and the `η(e) + 1` edges along the chain are `"{e}.0" .. "{e}.η(e)"`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::curve::DualGraph;
use crate::error::{Error, Result};
use crate::sheaves::Multidegree;

/// The chain of `Y` lying over one modified node of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Edge of the target.
    pub edge: usize,
    /// Target endpoints of `edge`; `ends[0]` is the side the chain is read from.
    pub ends: [usize; 2],
    /// Source vertices, starting next to `ends[0]`.
    pub vertices: Vec<usize>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    /// Degrees of `bundle` along the chain, read from `ends[0]`.
    pub fn degrees(&self, bundle: &Multidegree) -> Vec<i64> {
        self.vertices.iter().map(|&v| bundle.get(v)).collect()
    }

    pub fn vertex_set(&self) -> BitSet {
        self.vertices.iter().copied().collect()
    }
}

/// Where a vertex of the source sits over the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexOrigin {
    Vertex(usize),
    /// `position` counts from 0 at the `ends[0]` side.
    Chain {
        edge: usize,
        position: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "crate::io::ModificationFile", into = "crate::io::ModificationFile")]
pub struct Modification {
    target: DualGraph,
    lengths: BTreeMap<usize, usize>,
    source: DualGraph,
    chains: Vec<Chain>,
    origin: Vec<VertexOrigin>,
    lift: Vec<usize>,
}

impl Modification {
    /// `modify(X, N, η)`, with `N` and `η` given as `(edge-id, length)` pairs.
    pub fn new<'a>(target: DualGraph, lengths: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self> {
        let mut by_index = BTreeMap::new();
        for (id, len) in lengths {
            let e = target.require_edge(id)?;
            if len == 0 {
                return Err(Error::NonPositiveLength(id.to_owned()));
            }
            by_index.insert(e, len);
        }
        Self::from_lengths(target, by_index)
    }

    pub fn identity(target: DualGraph) -> Self {
        Self::from_lengths(target, BTreeMap::new()).expect("identity modification is always valid")
    }

    /// Small modification: one exceptional component over each edge of `edges`.
    pub fn small(target: DualGraph, edges: BitSet) -> Result<Self> {
        Self::from_lengths(target, edges.iter().map(|e| (e, 1)).collect())
    }

    pub fn from_lengths(target: DualGraph, lengths: BTreeMap<usize, usize>) -> Result<Self> {
        for (&e, &len) in &lengths {
            if e >= target.edge_count() {
                return Err(Error::UnknownEdge(format!("#{e}")));
            }
            if len == 0 {
                return Err(Error::NonPositiveLength(target.edge(e).id.clone()));
            }
        }

        let mut vertices: Vec<(String, u32)> = target.vertices().iter().map(|v| (v.id.clone(), v.genus)).collect();
        let mut edges = Vec::new();
        for (i, e) in target.edges().iter().enumerate() {
            let a = &target.vertex(e.ends[0]).id;
            let b = &target.vertex(e.ends[1]).id;
            match lengths.get(&i) {
                None => edges.push((e.id.clone(), a.clone(), b.clone())),
                Some(&len) => {
                    let names: Vec<String> = (1..=len).map(|k| format!("{}#{k}", e.id)).collect();
                    vertices.extend(names.iter().map(|n| (n.clone(), 0)));
                    let path: Vec<&String> = std::iter::once(a)
                        .chain(names.iter())
                        .chain(std::iter::once(b))
                        .collect();
                    for (k, pair) in path.windows(2).enumerate() {
                        edges.push((format!("{}.{k}", e.id), pair[0].clone(), pair[1].clone()));
                    }
                }
            }
        }
        let source = DualGraph::from_records(vertices, edges)?;

        let chains = lengths
            .iter()
            .map(|(&e, &len)| {
                let edge = target.edge(e);
                let vertices = (1..=len)
                    .map(|k| {
                        source
                            .vertex_index(&format!("{}#{k}", edge.id))
                            .expect("chain vertex present")
                    })
                    .collect();
                Chain {
                    edge: e,
                    ends: edge.ends,
                    vertices,
                }
            })
            .collect();
        Ok(Self::assemble(target, lengths, source, chains))
    }

    /// Completes the vertex maps. Non-chain source vertices share ids with the target.
    fn assemble(target: DualGraph, lengths: BTreeMap<usize, usize>, source: DualGraph, chains: Vec<Chain>) -> Self {
        let mut origin: Vec<Option<VertexOrigin>> = vec![None; source.vertex_count()];
        for c in &chains {
            for (position, &v) in c.vertices.iter().enumerate() {
                origin[v] = Some(VertexOrigin::Chain { edge: c.edge, position });
            }
        }
        let lift: Vec<usize> = target
            .vertices()
            .iter()
            .map(|v| source.vertex_index(&v.id).expect("target vertex survives in source"))
            .collect();
        for (x, &y) in lift.iter().enumerate() {
            origin[y] = Some(VertexOrigin::Vertex(x));
        }
        let origin = origin
            .into_iter()
            .map(|o| o.expect("every source vertex has an origin"))
            .collect();
        debug_assert_eq!(source.genus(), target.genus());
        Modification {
            target,
            lengths,
            source,
            chains,
            origin,
            lift,
        }
    }

    pub fn target(&self) -> &DualGraph {
        &self.target
    }

    pub fn source(&self) -> &DualGraph {
        &self.source
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn lengths(&self) -> &BTreeMap<usize, usize> {
        &self.lengths
    }

    pub fn modified_edges(&self) -> BitSet {
        self.lengths.keys().copied().collect()
    }

    pub fn chain_over(&self, edge: usize) -> Option<&Chain> {
        self.chains.iter().find(|c| c.edge == edge)
    }

    pub fn origin(&self, v: usize) -> VertexOrigin {
        self.origin[v]
    }

    /// Target vertex of a non-contracted source vertex.
    pub fn target_vertex(&self, v: usize) -> Option<usize> {
        match self.origin[v] {
            VertexOrigin::Vertex(x) => Some(x),
            VertexOrigin::Chain { .. } => None,
        }
    }

    /// Source vertex lying over a target vertex.
    pub fn lift(&self, x: usize) -> usize {
        self.lift[x]
    }

    pub fn lift_set(&self, set: BitSet) -> BitSet {
        set.iter().map(|x| self.lift[x]).collect()
    }

    /// Source vertices contracted by the modification.
    pub fn contracted(&self) -> BitSet {
        self.chains
            .iter()
            .fold(BitSet::empty(), |acc, c| acc.union(c.vertex_set()))
    }

    pub fn is_small(&self) -> bool {
        self.lengths.values().all(|&l| l == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.lengths.is_empty()
    }

    /// `ψ^*` on multidegrees: copy non-contracted values, zero on chains.
    pub fn pullback_multidegree(&self, degrees: &Multidegree) -> Result<Multidegree> {
        degrees.check_graph(&self.target)?;
        Ok(Multidegree::new(
            self.origin
                .iter()
                .map(|o| match *o {
                    VertexOrigin::Vertex(x) => degrees.get(x),
                    VertexOrigin::Chain { .. } => 0,
                })
                .collect(),
        ))
    }
}

/// The stable model of a semistable curve of genus at least 2.
///
/// Each maximal exceptional chain becomes one node of the target. The node
/// takes the id `e` when the chain vertices are named `e#1 .. e#n`, and
/// `"{a}~{b}"` (suffixed `/2`, `/3`, .. for parallel chains) otherwise, where
/// `a <= b` are the attaching vertex ids. The returned modification has `y`
/// itself as its source.
pub fn stable_model(y: &DualGraph) -> Result<Modification> {
    if !y.classify().is_semistable() {
        return Err(Error::NotSemistable);
    }
    if y.genus() < 2 {
        return Err(Error::GenusTooSmall(y.genus()));
    }
    let mut chains = y.maximal_exceptional_chains()?;
    let exceptional = y.exceptional_vertices();

    let kept_edges: Vec<usize> = (0..y.edge_count())
        .filter(|&e| {
            let [a, b] = y.edge(e).ends;
            !exceptional.contains(a) && !exceptional.contains(b)
        })
        .collect();
    let mut used: BTreeSet<String> = kept_edges.iter().map(|&e| y.edge(e).id.clone()).collect();

    // Names recovered from `e#k` vertex ids first, then canonical fallbacks.
    let mut names: Vec<Option<String>> = vec![None; chains.len()];
    for (i, chain) in chains.iter_mut().enumerate() {
        if let Some((base, reversed)) = recover_base(y, &chain.vertices) {
            if !used.contains(&base) {
                // Only a loop chain may be read from either extremity.
                if reversed && chain.ends[0] == chain.ends[1] {
                    chain.vertices.reverse();
                    chain.edges.reverse();
                }
                used.insert(base.clone());
                names[i] = Some(base);
            }
        }
    }
    for (i, chain) in chains.iter().enumerate() {
        if names[i].is_some() {
            continue;
        }
        let stem = format!("{}~{}", y.vertex(chain.ends[0]).id, y.vertex(chain.ends[1]).id);
        let mut candidate = stem.clone();
        let mut k = 2;
        while used.contains(&candidate) {
            candidate = format!("{stem}/{k}");
            k += 1;
        }
        used.insert(candidate.clone());
        names[i] = Some(candidate);
    }

    let vertices = (0..y.vertex_count())
        .filter(|&v| !exceptional.contains(v))
        .map(|v| (y.vertex(v).id.clone(), y.vertex(v).genus))
        .collect();
    let mut edges: Vec<(String, String, String)> = kept_edges
        .iter()
        .map(|&e| {
            let [a, b] = y.edge(e).ends;
            (y.edge(e).id.clone(), y.vertex(a).id.clone(), y.vertex(b).id.clone())
        })
        .collect();
    for (chain, name) in chains.iter().zip(&names) {
        let name = name.clone().expect("every chain named");
        edges.push((
            name,
            y.vertex(chain.ends[0]).id.clone(),
            y.vertex(chain.ends[1]).id.clone(),
        ));
    }
    let target = DualGraph::from_records(vertices, edges)?;

    let mut lengths = BTreeMap::new();
    let mut registry = Vec::with_capacity(chains.len());
    for (chain, name) in chains.into_iter().zip(names) {
        let e = target.require_edge(name.as_deref().unwrap())?;
        lengths.insert(e, chain.vertices.len());
        // Target and source indices follow the same id order, so `ends[0]`
        // is the smaller-id side in both.
        registry.push(Chain {
            edge: e,
            ends: target.edge(e).ends,
            vertices: chain.vertices,
        });
    }
    registry.sort_by_key(|c| c.edge);
    Ok(Modification::assemble(target, lengths, y.clone(), registry))
}

/// If the ids read `base#1 .. base#n` (possibly reversed), returns `base` and
/// whether the order was reversed.
fn recover_base(y: &DualGraph, chain: &[usize]) -> Option<(String, bool)> {
    let parsed: Vec<(&str, usize)> = chain
        .iter()
        .map(|&v| {
            let (base, k) = y.vertex(v).id.rsplit_once('#')?;
            Some((base, k.parse().ok()?))
        })
        .collect::<Option<_>>()?;
    let base = parsed[0].0;
    if parsed.iter().any(|(b, _)| *b != base) {
        return None;
    }
    let n = parsed.len();
    let ks: Vec<usize> = parsed.iter().map(|&(_, k)| k).collect();
    if ks.iter().enumerate().all(|(i, &k)| k == i + 1) {
        Some((base.to_owned(), false))
    } else if ks.iter().enumerate().all(|(i, &k)| k == n - i) {
        Some((base.to_owned(), true))
    } else {
        None
    }
}
