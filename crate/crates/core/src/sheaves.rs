//! Multidegrees, torsion-free sheaf models and twisters.
//!
//! An invertible sheaf is modelled by its multidegree, forgetting the
//! continuous part of its isomorphism class. A torsion-free rank-1 sheaf `I`
//! is modelled by the set `N` of nodes where it fails to be invertible together
//! with the multidegree of the invertible sheaf on the partial normalization
//! along `N` whose pushforward is `I`. Its degree is `sum(d̃) + |N|`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::curve::{DualGraph, Subcurve};
use crate::error::{Error, Result};
use crate::modification::Modification;

/// Integer degree per component, indexed like the vertices of its graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Multidegree(Vec<i64>);

impl Multidegree {
    pub fn new(values: Vec<i64>) -> Self {
        Multidegree(values)
    }

    pub fn zeros(n: usize) -> Self {
        Multidegree(vec![0; n])
    }

    pub fn from_ids<'a>(graph: &DualGraph, pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Result<Self> {
        let map: BTreeMap<String, i64> = pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect();
        Self::from_map(graph, &map)
    }

    /// Reads `{"vertex-id": degree, ..}`; the keys must be exactly the vertex ids.
    pub fn from_map(graph: &DualGraph, map: &BTreeMap<String, i64>) -> Result<Self> {
        if let Some(unknown) = map.keys().find(|k| graph.vertex_index(k).is_none()) {
            return Err(Error::UnknownVertex(unknown.clone()));
        }
        graph
            .vertices()
            .iter()
            .map(|v| {
                map.get(&v.id)
                    .copied()
                    .ok_or_else(|| Error::MissingVertex(v.id.clone()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Multidegree)
    }

    pub fn to_map(&self, graph: &DualGraph) -> BTreeMap<String, i64> {
        graph
            .vertices()
            .iter()
            .map(|v| v.id.clone())
            .zip(self.0.iter().copied())
            .collect()
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> i64 {
        self.0[v]
    }

    pub fn set(&mut self, v: usize, value: i64) {
        self.0[v] = value;
    }

    pub fn add(&mut self, v: usize, delta: i64) {
        self.0[v] += delta;
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn degree_on(&self, set: BitSet) -> i64 {
        set.iter().map(|v| self.0[v]).sum()
    }

    pub fn scaled(&self, factor: i64) -> Multidegree {
        Multidegree(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn check_graph(&self, graph: &DualGraph) -> Result<()> {
        if self.0.len() == graph.vertex_count() {
            Ok(())
        } else {
            Err(Error::GraphMismatch {
                expected: graph.vertex_count(),
                found: self.0.len(),
            })
        }
    }
}

/// Torsion-free rank-1 sheaf as (non-invertibility nodes, multidegree on the
/// partial normalization along them).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SheafModel {
    pub noninvertible: BitSet,
    pub tilde: Multidegree,
}

impl SheafModel {
    pub fn new(graph: &DualGraph, noninvertible: BitSet, tilde: Multidegree) -> Result<Self> {
        tilde.check_graph(graph)?;
        if let Some(bad) = noninvertible.difference(graph.all_edges()).iter().next() {
            return Err(Error::UnknownEdge(format!("#{bad}")));
        }
        Ok(SheafModel { noninvertible, tilde })
    }

    /// The invertible sheaf with the given multidegree.
    pub fn invertible(tilde: Multidegree) -> Self {
        SheafModel {
            noninvertible: BitSet::empty(),
            tilde,
        }
    }

    pub fn from_ids<'a>(
        graph: &DualGraph,
        noninvertible: impl IntoIterator<Item = &'a str>,
        tilde: impl IntoIterator<Item = (&'a str, i64)>,
    ) -> Result<Self> {
        let n = noninvertible
            .into_iter()
            .map(|e| graph.require_edge(e))
            .collect::<Result<BitSet>>()?;
        SheafModel::new(graph, n, Multidegree::from_ids(graph, tilde)?)
    }

    pub fn degree(&self) -> i64 {
        self.tilde.total() + self.noninvertible.len() as i64
    }

    pub fn is_invertible(&self) -> bool {
        self.noninvertible.is_empty()
    }

    /// `deg_Z(I)`: degrees on `Z` plus the non-invertible nodes internal to `Z`.
    pub fn degree_on(&self, graph: &DualGraph, set: BitSet) -> i64 {
        let internal = self
            .noninvertible
            .iter()
            .filter(|&e| {
                let [a, b] = graph.edge(e).ends;
                set.contains(a) && set.contains(b)
            })
            .count();
        self.tilde.degree_on(set) + internal as i64
    }

    pub fn noninvertible_ids<'g>(&self, graph: &'g DualGraph) -> Vec<&'g str> {
        self.noninvertible.iter().map(|e| graph.edge(e).id.as_str()).collect()
    }
}

pub fn sheaf_degree(sheaf: &SheafModel, subcurve: &Subcurve<'_>) -> Result<i64> {
    sheaf.tilde.check_graph(subcurve.graph())?;
    Ok(sheaf.degree_on(subcurve.graph(), subcurve.members()))
}

/// Coefficients `c_v` of the formal sum `sum c_v X_v` defining a twister.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Twister(pub Vec<i64>);

impl Twister {
    /// The twister with coefficient 1 on every vertex of `set`.
    pub fn indicator(n: usize, set: BitSet) -> Self {
        Twister((0..n).map(|v| set.contains(v) as i64).collect())
    }

    /// Multidegree of the twister: `sum over non-loop edges v-w of (c_w - c_v)` at `v`.
    pub fn multidegree(&self, graph: &DualGraph) -> Result<Multidegree> {
        if self.0.len() != graph.vertex_count() {
            return Err(Error::GraphMismatch {
                expected: graph.vertex_count(),
                found: self.0.len(),
            });
        }
        let mut delta = Multidegree::zeros(graph.vertex_count());
        for e in graph.edges().iter().filter(|e| !e.is_loop()) {
            let [a, b] = e.ends;
            delta.add(a, self.0[b] - self.0[a]);
            delta.add(b, self.0[a] - self.0[b]);
        }
        Ok(delta)
    }
}

pub fn twist(graph: &DualGraph, bundle: &Multidegree, twister: &Twister) -> Result<Multidegree> {
    bundle.check_graph(graph)?;
    let delta = twister.multidegree(graph)?;
    Ok(Multidegree(bundle.0.iter().zip(delta.0).map(|(a, b)| a + b).collect()))
}

/// Minimum and maximum sum over contiguous nonempty windows.
pub fn interval_sum_range(degrees: &[i64]) -> Result<(i64, i64)> {
    if degrees.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for i in 0..degrees.len() {
        let mut sum = 0;
        for &d in &degrees[i..] {
            sum += d;
            lo = lo.min(sum);
            hi = hi.max(sum);
        }
    }
    Ok((lo, hi))
}

/// Admissibility flags of a line bundle relative to a semistable modification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub negatively: bool,
    pub positively: bool,
    pub invertible: bool,
}

impl Admissibility {
    const ALL: Admissibility = Admissibility {
        admissible: true,
        negatively: true,
        positively: true,
        invertible: true,
    };

    /// Flags for a single chain read as a degree sequence.
    pub fn of_chain(degrees: &[i64]) -> Self {
        let Ok((lo, hi)) = interval_sum_range(degrees) else {
            return Self::ALL;
        };
        Admissibility {
            admissible: lo >= -1 && hi <= 1,
            negatively: lo >= -1 && hi <= 0,
            positively: lo >= 0 && hi <= 1,
            invertible: degrees.iter().all(|&d| d == 0),
        }
    }

    fn and(self, other: Self) -> Self {
        Admissibility {
            admissible: self.admissible && other.admissible,
            negatively: self.negatively && other.negatively,
            positively: self.positively && other.positively,
            invertible: self.invertible && other.invertible,
        }
    }
}

pub fn admissibility(m: &Modification, bundle: &Multidegree) -> Result<Admissibility> {
    bundle.check_graph(m.source())?;
    Ok(m.chains()
        .iter()
        .map(|c| Admissibility::of_chain(&c.degrees(bundle)))
        .fold(Admissibility::ALL, Admissibility::and))
}
