//! Seeded random instances.
//!
//! Graphs are grown as a random spanning tree on `v0 .. v{n-1}` (each new vertex
//! attaches to a uniformly chosen earlier one) plus a few extra edges, loops
//! allowed. Genera are handed out one unit at a time to random vertices until a
//! random budget of at most `max_genus` is spent. Edge ids are `e0, e1, ..` in
//! creation order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::curve::DualGraph;
use crate::modification::Modification;
use crate::sheaves::Multidegree;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphParams {
    pub max_vertices: usize,
    /// Budget for the sum of vertex genera.
    pub max_genus: u32,
    pub max_extra_edges: usize,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            max_vertices: 5,
            max_genus: 2,
            max_extra_edges: 3,
        }
    }
}

fn build(genera: &[u32], edges: &[(usize, usize)]) -> DualGraph {
    let mut b = DualGraph::builder();
    for (i, &g) in genera.iter().enumerate() {
        b = b.vertex(format!("v{i}"), g);
    }
    for (k, &(a, c)) in edges.iter().enumerate() {
        b = b.edge(format!("e{k}"), format!("v{a}"), format!("v{c}"));
    }
    b.build().expect("generated graph is connected")
}

fn skeleton(rng: &mut impl Rng, params: GraphParams) -> (Vec<u32>, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=params.max_vertices.max(1));
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..rng.gen_range(0..=params.max_extra_edges) {
        let a = rng.gen_range(0..n);
        let c = rng.gen_range(0..n);
        edges.push((a.min(c), a.max(c)));
    }
    let mut genera = vec![0u32; n];
    for _ in 0..rng.gen_range(0..=params.max_genus) {
        genera[rng.gen_range(0..n)] += 1;
    }
    (genera, edges)
}

/// A connected graph, with no further guarantees.
pub fn random_graph(rng: &mut impl Rng, params: GraphParams) -> DualGraph {
    let (genera, edges) = skeleton(rng, params);
    build(&genera, &edges)
}

/// A stable graph of genus at least 2: every genus-0 vertex meeting the rest
/// of the curve in fewer than three points gets a loop, then loops are added
/// at random vertices until the genus reaches 2.
pub fn random_stable_graph(rng: &mut impl Rng, params: GraphParams) -> DualGraph {
    let (genera, mut edges) = skeleton(rng, params);
    let n = genera.len();
    for (v, &genus) in genera.iter().enumerate() {
        let branches = edges.iter().filter(|&&(a, c)| a != c && (a == v || c == v)).count();
        let has_loop = edges.iter().any(|&(a, c)| a == v && c == v);
        if n > 1 && genus == 0 && branches <= 2 && !has_loop {
            edges.push((v, v));
        }
    }
    let mut graph = build(&genera, &edges);
    while graph.genus() < 2 {
        let v = rng.gen_range(0..n);
        edges.push((v, v));
        graph = build(&genera, &edges);
    }
    debug_assert!(graph.classify().is_stable());
    graph
}

pub fn random_multidegree(rng: &mut impl Rng, n: usize, window: (i64, i64)) -> Multidegree {
    Multidegree::new((0..n).map(|_| rng.gen_range(window.0..=window.1)).collect())
}

/// A random edge subset with a random length in `1..=max_length` on each
/// edge, inserting at most `max_chain_vertices` components in total.
pub fn random_modification(
    rng: &mut impl Rng,
    x: &DualGraph,
    max_length: usize,
    max_chain_vertices: usize,
) -> Modification {
    let budget = max_chain_vertices
        .min(BitSet::CAPACITY - x.vertex_count())
        .min(BitSet::CAPACITY - x.edge_count());
    let mut lengths = std::collections::BTreeMap::new();
    let mut used = 0;
    for e in 0..x.edge_count() {
        let len = rng.gen_range(1..=max_length.max(1));
        if rng.gen_bool(0.5) && used + len <= budget {
            lengths.insert(e, len);
            used += len;
        }
    }
    Modification::from_lengths(x.clone(), lengths).expect("lengths are positive and within capacity")
}

/// A degree sequence all of whose interval sums lie in `[-1, 1]`: prefix sums
/// wander inside a window `{a, a + 1}` containing 0.
pub fn random_admissible_chain(rng: &mut impl Rng, len: usize) -> Vec<i64> {
    let low: i64 = *[-1, 0].choose(rng).expect("nonempty");
    let mut prev = 0;
    (0..len)
        .map(|_| {
            let next = low + rng.gen_range(0..=1);
            let d = next - prev;
            prev = next;
            d
        })
        .collect()
}

/// A bundle with base degrees drawn from `window` and admissible chain degrees.
pub fn random_admissible_bundle(rng: &mut impl Rng, m: &Modification, window: (i64, i64)) -> Multidegree {
    let mut bundle = Multidegree::zeros(m.source().vertex_count());
    for x in 0..m.target().vertex_count() {
        bundle.set(m.lift(x), rng.gen_range(window.0..=window.1));
    }
    for chain in m.chains() {
        for (&v, d) in chain.vertices.iter().zip(random_admissible_chain(rng, chain.len())) {
            bundle.set(v, d);
        }
    }
    bundle
}

/// A uniformly random subset of `set`.
pub fn random_subset(rng: &mut impl Rng, set: BitSet) -> BitSet {
    set.iter().filter(|_| rng.gen_bool(0.5)).collect()
}
