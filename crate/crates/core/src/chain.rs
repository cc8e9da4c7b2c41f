//! Cohomology of line bundles on chains of rational curves by explicit linear algebra.
//!
//! A line bundle on a chain `E_1 ∪ .. ∪ E_n` is determined by its component
//! degrees. A global section is a tuple of binary forms `f_i` of degree `d_i`
//! (zero when `d_i < 0`) agreeing at the nodes. The node `E_i ∩ E_{i+1}` sits at
//! `[0:1]` on `E_i` and at `[1:0]` on `E_{i+1}`, with gluing constant 1. The
//! optional punctures are `[1:1]` on `E_1` and `[1:2]` on `E_n`.
//!
//! `h0` is the dimension of the solution space; `h1` follows from Riemann–Roch.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainCohomology {
    pub h0: i64,
    pub h1: i64,
}

pub fn chain_h(degrees: &[i64], puncture_ends: bool) -> Result<ChainCohomology> {
    let n = degrees.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }

    // Offset of each component's coefficient block; `None` when it has no sections.
    let mut offsets = Vec::with_capacity(n);
    let mut unknowns = 0usize;
    for &d in degrees {
        if d >= 0 {
            offsets.push(Some(unknowns));
            unknowns += d as usize + 1;
        } else {
            offsets.push(None);
        }
    }

    let mut rows: Vec<Vec<Ratio<i128>>> = Vec::new();
    let zero_row = || vec![Ratio::zero(); unknowns];

    for i in 0..n - 1 {
        let mut row = zero_row();
        if let Some(off) = offsets[i] {
            row[off + degrees[i] as usize] += 1;
        }
        if let Some(off) = offsets[i + 1] {
            row[off] -= 1;
        }
        rows.push(row);
    }

    if puncture_ends {
        for (component, lambda) in [(0, 1i128), (n - 1, 2i128)] {
            let mut row = zero_row();
            if let Some(off) = offsets[component] {
                let mut power = 1i128;
                for j in 0..=degrees[component] as usize {
                    row[off + j] = Ratio::from_integer(power);
                    power *= lambda;
                }
            }
            rows.push(row);
        }
    }

    let h0 = (unknowns - rank(rows)) as i64;
    let euler = degrees.iter().sum::<i64>() + 1 - if puncture_ends { 2 } else { 0 };
    Ok(ChainCohomology { h0, h1: h0 - euler })
}

fn rank(mut rows: Vec<Vec<Ratio<i128>>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c] / pivot_row[c];
                for (x, &y) in row[c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    *x -= y * f;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(d: &[i64], punct: bool) -> (i64, i64) {
        let c = chain_h(d, punct).unwrap();
        (c.h0, c.h1)
    }

    #[test]
    fn examples() {
        assert_eq!(h(&[0, 0, 0], false), (1, 0));
        assert_eq!(h(&[-1, -1], false), (0, 1));
        assert_eq!(h(&[2, -1, 1], false), (3, 0));
        assert_eq!(chain_h(&[], false), Err(Error::EmptySequence));
    }

    #[test]
    fn single_component_matches_projective_line() {
        for d in -4..=4i64 {
            assert_eq!(h(&[d], false), ((d + 1).max(0), (-d - 1).max(0)));
            // two points removed: O(d - 2)
            assert_eq!(h(&[d], true), ((d - 1).max(0), (1 - d).max(0)));
        }
    }

    #[test]
    fn dualizing_sheaf_of_chain_has_h1_one() {
        for n in 2..=5 {
            let mut d = vec![0; n];
            d[0] = -1;
            d[n - 1] = -1;
            assert_eq!(h(&d, false), (0, 1));
        }
    }
}
