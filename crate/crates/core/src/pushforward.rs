//! Pushforward of line bundles along semistable modifications.
//!
//! For an admissible `L` on `Y`, `ψ_*L` is torsion free of rank 1 and is read off
//! chain by chain. With `δ` the total degree of the chain over `e`:
//!
//! | chain                | `e ∈ N` | correction to `d̃`                                   |
//! |----------------------|---------|-----------------------------------------------------|
//! | identically zero     | no      | none                                                |
//! | `δ = 1`              | yes     | none                                                |
//! | `δ = 0`, not zero    | yes     | −1 at the end whose first nonzero entry is −1       |
//! | `δ = −1`             | yes     | −1 at both ends (twice on a loop vertex)            |
//!
//! [`pushforward_degree_oracle`] computes `deg_W(ψ_*L)` directly as a minimum of
//! degrees over connected preimages and is independent of the table above.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::curve::Subcurve;
use crate::error::{Error, Result};
use crate::modification::{Chain, Modification};
use crate::sheaves::{interval_sum_range, twist, Multidegree, SheafModel, Twister};

fn check_admissible(m: &Modification, bundle: &Multidegree) -> Result<()> {
    bundle.check_graph(m.source())?;
    for chain in m.chains() {
        let (lo, hi) = interval_sum_range(&chain.degrees(bundle))?;
        if lo < -1 || hi > 1 {
            return Err(Error::NotAdmissible(m.target().edge(chain.edge).id.clone()));
        }
    }
    Ok(())
}

/// The `(N, d̃)` model of `ψ_*L`. Fails with [`Error::NotAdmissible`] naming the
/// first offending node.
pub fn pushforward_model(m: &Modification, bundle: &Multidegree) -> Result<SheafModel> {
    check_admissible(m, bundle)?;
    let x = m.target();
    let mut tilde = Multidegree::new((0..x.vertex_count()).map(|v| bundle.get(m.lift(v))).collect());
    let mut noninvertible = BitSet::empty();

    for chain in m.chains() {
        let degrees = chain.degrees(bundle);
        if degrees.iter().all(|&d| d == 0) {
            continue;
        }
        noninvertible.insert(chain.edge);
        match degrees.iter().sum::<i64>() {
            1 => {}
            0 => tilde.add(drop_side(chain, &degrees), -1),
            -1 => {
                tilde.add(chain.ends[0], -1);
                tilde.add(chain.ends[1], -1);
            }
            total => unreachable!("admissible chain with total degree {total}"),
        }
    }
    let model = SheafModel { noninvertible, tilde };
    debug_assert_eq!(model.degree(), bundle.total());
    Ok(model)
}

/// For a nonzero chain of total 0: the end whose leading nonzero entry is −1.
fn drop_side(chain: &Chain, degrees: &[i64]) -> usize {
    let from_start = degrees.iter().find(|&&d| d != 0) == Some(&-1);
    let from_end = degrees.iter().rev().find(|&&d| d != 0) == Some(&-1);
    assert!(
        from_start != from_end,
        "chain {degrees:?}: expected exactly one side leading with -1"
    );
    if from_start {
        chain.ends[0]
    } else {
        chain.ends[1]
    }
}

/// `deg_W(ψ_*L)` as the minimum of `deg(L|_U)` over connected `U` between the
/// core preimage of `W` and its full preimage. Exponential in the number of
/// chain vertices over boundary nodes of `W`.
pub fn pushforward_degree_oracle(m: &Modification, bundle: &Multidegree, w: &Subcurve<'_>) -> Result<i64> {
    check_admissible(m, bundle)?;
    if !w.is_connected() {
        return Err(Error::SubcurveNotConnected);
    }
    let x = m.target();
    let y = m.source();
    let members = w.members();

    let mut core = m.lift_set(members);
    let mut optional = BitSet::empty();
    for chain in m.chains() {
        let [a, b] = chain.ends;
        match (members.contains(a), members.contains(b)) {
            (true, true) => core = core.union(chain.vertex_set()),
            (true, false) | (false, true) => optional = optional.union(chain.vertex_set()),
            (false, false) => {}
        }
    }

    let target_chi = x.chi_of(members);
    let mut best: Option<i64> = None;
    for extra in optional.subsets() {
        let u = core.union(extra);
        if !y.is_connected_set(u) {
            continue;
        }
        assert_eq!(
            y.chi_of(u),
            target_chi,
            "connected preimage with a different arithmetic genus"
        );
        let deg = bundle.degree_on(u);
        best = Some(best.map_or(deg, |b| b.min(deg)));
    }
    Ok(best.expect("the core preimage of a connected subcurve is connected"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    /// Some chain has an interval sum of at least 2.
    pub has_torsion: bool,
    /// Some chain has an interval sum of at most −2.
    pub degree_drops: bool,
    /// Edges whose chain is not identically zero.
    #[serde(skip)]
    pub noninvertible: BitSet,
}

pub fn pushforward_diagnostics(m: &Modification, bundle: &Multidegree) -> Result<Diagnostics> {
    bundle.check_graph(m.source())?;
    let mut diag = Diagnostics {
        has_torsion: false,
        degree_drops: false,
        noninvertible: BitSet::empty(),
    };
    for chain in m.chains() {
        let degrees = chain.degrees(bundle);
        let (lo, hi) = interval_sum_range(&degrees)?;
        diag.has_torsion |= hi >= 2;
        diag.degree_drops |= lo <= -2;
        if degrees.iter().any(|&d| d != 0) {
            diag.noninvertible.insert(chain.edge);
        }
    }
    Ok(diag)
}

/// Chain-supported `c` with `twist(L, c) = M`, if one exists.
///
/// On the chain `E_1 .. E_n` the twist changes `E_i` by `c_{i-1} - 2c_i + c_{i+1}`
/// with `c_0 = c_{n+1} = 0`, so `c` is pinned down by `c_1`; the end condition
/// makes `c_1` a rational number which must be an integer.
pub fn solve_chain_twister(m: &Modification, l: &Multidegree, target: &Multidegree) -> Result<Option<Twister>> {
    let y = m.source();
    l.check_graph(y)?;
    target.check_graph(y)?;
    let mut c = vec![0i64; y.vertex_count()];
    for chain in m.chains() {
        let n = chain.len();
        let diff: Vec<i64> = chain.vertices.iter().map(|&v| target.get(v) - l.get(v)).collect();
        // c_i = alpha_i + i * c_1
        let mut alpha = vec![0i64; n + 2];
        for i in 1..=n {
            alpha[i + 1] = diff[i - 1] + 2 * alpha[i] - alpha[i - 1];
        }
        let denom = (n + 1) as i64;
        if alpha[n + 1] % denom != 0 {
            return Ok(None);
        }
        let c1 = -alpha[n + 1] / denom;
        for (i, &v) in chain.vertices.iter().enumerate() {
            c[v] = alpha[i + 1] + (i as i64 + 1) * c1;
        }
    }
    let twister = Twister(c);
    Ok((twist(y, l, &twister)? == *target).then_some(twister))
}

/// Whether `M` is a chain-supported twist of `L`. When it is, the two
/// pushforward models are compared and a difference is reported as
/// [`Error::CompadmViolation`].
pub fn same_pushforward(m: &Modification, l: &Multidegree, target: &Multidegree) -> Result<bool> {
    check_admissible(m, l)?;
    check_admissible(m, target)?;
    if solve_chain_twister(m, l, target)?.is_none() {
        return Ok(false);
    }
    let a = pushforward_model(m, l)?;
    let b = pushforward_model(m, target)?;
    if a != b {
        return Err(Error::CompadmViolation(format!(
            "L = {:?} gives {a:?} but M = {:?} gives {b:?}",
            l.values(),
            target.values()
        )));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::curve::DualGraph;

    fn bundle(m: &Modification, pairs: &[(&str, i64)]) -> Multidegree {
        Multidegree::from_ids(m.source(), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn model_examples() {
        let m = Modification::new(catalog::theta(), [("e1", 1)]).unwrap();
        let l = bundle(&m, &[("v", 0), ("w", 1), ("e1#1", 1)]);
        let i = pushforward_model(&m, &l).unwrap();
        assert_eq!(
            i,
            SheafModel::from_ids(m.target(), ["e1"], [("v", 0), ("w", 1)]).unwrap()
        );

        let m = Modification::new(catalog::banana11(), [("e1", 2)]).unwrap();
        let l = bundle(&m, &[("v", 1), ("w", 1), ("e1#1", 1), ("e1#2", -1)]);
        let i = pushforward_model(&m, &l).unwrap();
        assert_eq!(
            i,
            SheafModel::from_ids(m.target(), ["e1"], [("v", 1), ("w", 0)]).unwrap()
        );

        let m = Modification::new(catalog::theta(), [("e1", 1)]).unwrap();
        let l = bundle(&m, &[("v", 2), ("w", -1), ("e1#1", 0)]);
        let i = pushforward_model(&m, &l).unwrap();
        assert!(i.is_invertible());
        assert_eq!(i.tilde.values(), &[2, -1]);
    }

    #[test]
    fn loop_chain_with_total_minus_one_drops_twice() {
        let x = DualGraph::builder().vertex("x", 1).edge("l", "x", "x").build().unwrap();
        let m = Modification::new(x, [("l", 2)]).unwrap();
        let l = bundle(&m, &[("x", 3), ("l#1", 0), ("l#2", -1)]);
        let i = pushforward_model(&m, &l).unwrap();
        assert_eq!(i.tilde.values(), &[1]);
        assert_eq!(i.degree(), 2);
    }

    #[test]
    fn model_rejects_inadmissible() {
        let m = Modification::new(catalog::theta(), [("e1", 2)]).unwrap();
        let l = bundle(&m, &[("v", 0), ("w", 0), ("e1#1", 2), ("e1#2", -1)]);
        assert_eq!(pushforward_model(&m, &l), Err(Error::NotAdmissible("e1".into())));
    }

    #[test]
    fn oracle_examples() {
        let m = Modification::new(catalog::banana11(), [("e1", 1)]).unwrap();
        let l = bundle(&m, &[("v", 4), ("w", 0), ("e1#1", -1)]);
        let v = Subcurve::from_ids(m.target(), ["v"]).unwrap();
        assert_eq!(pushforward_degree_oracle(&m, &l, &v), Ok(3));
        assert_eq!(pushforward_degree_oracle(&m, &l, &Subcurve::whole(m.target())), Ok(3));

        let m = Modification::new(catalog::theta(), [("e1", 1)]).unwrap();
        let l = bundle(&m, &[("v", 2), ("w", 5), ("e1#1", 1)]);
        let v = Subcurve::from_ids(m.target(), ["v"]).unwrap();
        assert_eq!(pushforward_degree_oracle(&m, &l, &v), Ok(2));

        let x = catalog::path_with_genera(&[("a", 1), ("b", 1), ("c", 1)]);
        let m = Modification::new(x, [("p1", 1)]).unwrap();
        let l = bundle(&m, &[("a", 2), ("b", 3), ("c", 0), ("p1#1", 0)]);
        let ab = Subcurve::from_ids(m.target(), ["a", "b"]).unwrap();
        assert_eq!(pushforward_degree_oracle(&m, &l, &ab), Ok(5));
        let ac = Subcurve::from_ids(m.target(), ["a", "c"]).unwrap();
        assert_eq!(pushforward_degree_oracle(&m, &l, &ac), Err(Error::SubcurveNotConnected));
    }

    #[test]
    fn diagnostics_examples() {
        let m = Modification::new(catalog::theta(), [("e1", 2)]).unwrap();
        let d = pushforward_diagnostics(&m, &bundle(&m, &[("v", 0), ("w", 0), ("e1#1", 2), ("e1#2", -1)])).unwrap();
        assert!(d.has_torsion);

        let m3 = Modification::new(catalog::theta(), [("e1", 3)]).unwrap();
        let d = pushforward_diagnostics(
            &m3,
            &bundle(&m3, &[("v", 0), ("w", 0), ("e1#1", -1), ("e1#2", 0), ("e1#3", -1)]),
        )
        .unwrap();
        assert!(d.degree_drops);

        let d = pushforward_diagnostics(&m, &bundle(&m, &[("v", 0), ("w", 0), ("e1#1", 1), ("e1#2", -1)])).unwrap();
        assert!(!d.has_torsion && !d.degree_drops);
        assert_eq!(d.noninvertible, BitSet::singleton(0));
    }

    #[test]
    fn same_pushforward_examples() {
        let m = Modification::new(catalog::theta(), [("e1", 2)]).unwrap();
        let y = m.source();
        let l = bundle(&m, &[("v", 1), ("w", 1), ("e1#1", 1), ("e1#2", -1)]);
        let c = Twister::indicator(y.vertex_count(), BitSet::singleton(y.require_vertex("e1#1").unwrap()));
        let twisted = twist(y, &l, &c).unwrap();
        assert_eq!(
            twisted.to_map(y),
            [("e1#1", -1), ("e1#2", 0), ("v", 2), ("w", 1)]
                .map(|(k, v)| (k.to_string(), v))
                .into()
        );
        assert_eq!(same_pushforward(&m, &l, &twisted), Ok(true));
        assert_eq!(solve_chain_twister(&m, &l, &twisted).unwrap(), Some(c));
        assert_eq!(same_pushforward(&m, &l, &l), Ok(true));

        let bad = bundle(&m, &[("v", 0), ("w", 0), ("e1#1", 2), ("e1#2", -1)]);
        assert_eq!(same_pushforward(&m, &l, &bad), Err(Error::NotAdmissible("e1".into())));

        let other = bundle(&m, &[("v", 0), ("w", 2), ("e1#1", 1), ("e1#2", -1)]);
        assert_eq!(same_pushforward(&m, &l, &other), Ok(false));
    }
}
