//! Small named curves used throughout the tests and the guide.

use crate::curve::DualGraph;
use crate::modification::Modification;

/// Two smooth rational components meeting in three nodes `e1, e2, e3`; genus 2.
pub fn theta() -> DualGraph {
    DualGraph::builder()
        .vertex("v", 0)
        .vertex("w", 0)
        .edge("e1", "v", "w")
        .edge("e2", "v", "w")
        .edge("e3", "v", "w")
        .build()
        .expect("theta graph is valid")
}

/// Two elliptic components meeting in one node `e1`; genus 2.
pub fn banana11() -> DualGraph {
    DualGraph::builder()
        .vertex("v", 1)
        .vertex("w", 1)
        .edge("e1", "v", "w")
        .build()
        .expect("banana graph is valid")
}

/// `theta()` with `e1` replaced by a chain of `len` rational components.
pub fn theta_subdivided(len: usize) -> DualGraph {
    Modification::new(theta(), [("e1", len)])
        .expect("e1 exists")
        .source()
        .clone()
}

/// Rational components in a path, edges `p0, p1, ..`.
pub fn path(ids: &[&str]) -> DualGraph {
    let with_genera: Vec<(&str, u32)> = ids.iter().map(|&id| (id, 0)).collect();
    path_with_genera(&with_genera)
}

pub fn path_with_genera(vertices: &[(&str, u32)]) -> DualGraph {
    let mut b = DualGraph::builder();
    for &(id, g) in vertices {
        b = b.vertex(id, g);
    }
    for (k, pair) in vertices.windows(2).enumerate() {
        b = b.edge(format!("p{k}"), pair[0].0, pair[1].0);
    }
    b.build().expect("path graph is valid")
}

/// `n` rational components `c0 .. c{n-1}` in a cycle; genus 1.
pub fn cycle(n: usize) -> DualGraph {
    let mut b = DualGraph::builder();
    for i in 0..n {
        b = b.vertex(format!("c{i}"), 0);
    }
    for i in 0..n {
        b = b.edge(format!("r{i}"), format!("c{i}"), format!("c{}", (i + 1) % n));
    }
    b.build().expect("cycle graph is valid")
}
