//! The correspondence between balanced line bundles on quasistable models and
//! semistable sheaf models on the stable curve.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::curve::DualGraph;
use crate::error::{Error, Result};
use crate::io::SheafModelFile;
use crate::modification::{stable_model, Modification};
use crate::pushforward::pushforward_model;
use crate::sheaves::{Multidegree, SheafModel};
use crate::stability::{enumerate_balanced, enumerate_semistable_models, BalanceMode, StabilityKind};

/// `(Y → X, L) ↦ (X, ψ_*L)` for a small modification of a stable curve with
/// `L` of degree 1 on every exceptional component.
pub fn phi(m: &Modification, bundle: &Multidegree) -> Result<(DualGraph, SheafModel)> {
    bundle.check_graph(m.source())?;
    if !m.is_small() {
        return Err(Error::Hypothesis("modification is not small".into()));
    }
    if !m.target().classify().is_stable() {
        return Err(Error::Hypothesis("target curve is not stable".into()));
    }
    if let Some(v) = m.contracted().iter().find(|&v| bundle.get(v) != 1) {
        return Err(Error::Hypothesis(format!(
            "degree {} on exceptional component `{}`, expected 1",
            bundle.get(v),
            m.source().vertex(v).id
        )));
    }
    Ok((m.target().clone(), pushforward_model(m, bundle)?))
}

/// [`phi`] starting from a quasistable curve: the stable model supplies `ψ`.
pub fn phi_of_curve(y: &DualGraph, bundle: &Multidegree) -> Result<(Modification, SheafModel)> {
    if !y.classify().is_quasistable() {
        return Err(Error::NotQuasistable);
    }
    let m = stable_model(y)?;
    let (_, sheaf) = phi(&m, bundle)?;
    Ok((m, sheaf))
}

/// `I ↦ (Y → X, L)` with `Y` the small modification along the
/// non-invertibility nodes, `L` of degree 1 on the new components and `d̃`
/// elsewhere.
pub fn phi_inverse(x: &DualGraph, sheaf: &SheafModel) -> Result<(Modification, Multidegree)> {
    sheaf.tilde.check_graph(x)?;
    let m = Modification::small(x.clone(), sheaf.noninvertible)?;
    let mut bundle = Multidegree::zeros(m.source().vertex_count());
    for v in 0..x.vertex_count() {
        bundle.set(m.lift(v), sheaf.tilde.get(v));
    }
    for v in m.contracted() {
        bundle.set(v, 1);
    }
    Ok((m, bundle))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrespondenceMode {
    /// Balanced bundles against semistable sheaves.
    Semistable,
    /// Stably balanced bundles against stable sheaves.
    Stable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub balanced_count: usize,
    pub semistable_count: usize,
    pub bijection: bool,
    pub mismatches: Vec<String>,
}

/// Runs both enumerations and checks that [`phi`] maps one onto the other
/// with [`phi_inverse`] as two-sided inverse.
pub fn certify_bijection(x: &DualGraph, degree: i64, mode: CorrespondenceMode) -> Result<BijectionReport> {
    let (balance, kind) = match mode {
        CorrespondenceMode::Semistable => (BalanceMode::Balanced, StabilityKind::Semistable),
        CorrespondenceMode::Stable => (BalanceMode::StablyBalanced, StabilityKind::Stable),
    };
    let balanced = enumerate_balanced(x, degree, balance)?;
    let models = enumerate_semistable_models(x, degree, kind)?;
    let describe = |i: &SheafModel| serde_json::to_string(&SheafModelFile::from_model(x, i)).expect("serializable");

    let model_set: BTreeSet<&SheafModel> = models.iter().collect();
    let balanced_keys: BTreeSet<(BitSet, &Multidegree)> =
        balanced.iter().map(|(m, l)| (m.modified_edges(), l)).collect();

    let images: Vec<Result<SheafModel>> = balanced.par_iter().map(|(m, l)| phi(m, l).map(|(_, i)| i)).collect();
    let mut mismatches = Vec::new();
    let mut preimage: BTreeMap<SheafModel, usize> = BTreeMap::new();
    for (k, image) in images.into_iter().enumerate() {
        let (m, l) = &balanced[k];
        let label = format!(
            "bundle {:?} on modification along {:?}",
            l.to_map(m.source()),
            m.modified_edges()
        );
        match image {
            Err(err) => mismatches.push(format!("phi failed on {label}: {err}")),
            Ok(i) => {
                if !model_set.contains(&i) {
                    mismatches.push(format!("phi sends {label} to {} outside the enumeration", describe(&i)));
                }
                if let Some(&other) = preimage.get(&i) {
                    mismatches.push(format!(
                        "phi not injective: items {other} and {k} both give {}",
                        describe(&i)
                    ));
                }
                preimage.insert(i, k);
            }
        }
    }

    for i in &models {
        match phi_inverse(x, i) {
            Err(err) => mismatches.push(format!("phi_inverse failed on {}: {err}", describe(i))),
            Ok((m, l)) => {
                if !balanced_keys.contains(&(m.modified_edges(), &l)) {
                    mismatches.push(format!(
                        "phi_inverse of {} is not in the balanced enumeration",
                        describe(i)
                    ));
                }
                match phi(&m, &l) {
                    Ok((_, back)) if back == *i => {}
                    Ok((_, back)) => {
                        mismatches.push(format!("phi(phi_inverse({})) = {}", describe(i), describe(&back)))
                    }
                    Err(err) => mismatches.push(format!("phi rejects phi_inverse of {}: {err}", describe(i))),
                }
            }
        }
    }

    if balanced.len() != models.len() {
        mismatches.push(format!(
            "{} balanced bundles against {} sheaf models",
            balanced.len(),
            models.len()
        ));
    }
    Ok(BijectionReport {
        balanced_count: balanced.len(),
        semistable_count: models.len(),
        bijection: mismatches.is_empty(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn phi_examples() {
        let m = Modification::new(catalog::theta(), [("e1", 1)]).unwrap();
        let l = Multidegree::from_ids(m.source(), [("v", 0), ("w", 1), ("e1#1", 1)]).unwrap();
        let (x, i) = phi(&m, &l).unwrap();
        assert_eq!(i, SheafModel::from_ids(&x, ["e1"], [("v", 0), ("w", 1)]).unwrap());

        let id = Modification::identity(catalog::theta());
        let l = Multidegree::new(vec![4, -3]);
        assert_eq!(phi(&id, &l).unwrap().1, SheafModel::invertible(l));

        let m = Modification::new(catalog::theta(), [("e1", 1), ("e2", 1)]).unwrap();
        let l = Multidegree::from_ids(m.source(), [("v", 0), ("w", 0), ("e1#1", 1), ("e2#1", 1)]).unwrap();
        let (x, i) = phi(&m, &l).unwrap();
        assert_eq!(i, SheafModel::from_ids(&x, ["e1", "e2"], [("v", 0), ("w", 0)]).unwrap());
    }

    #[test]
    fn phi_hypotheses() {
        let m = Modification::new(catalog::theta(), [("e1", 2)]).unwrap();
        assert!(matches!(
            phi(&m, &Multidegree::new(vec![1, 1, 0, 0])),
            Err(Error::Hypothesis(_))
        ));
        let m = Modification::new(catalog::theta(), [("e1", 1)]).unwrap();
        assert!(matches!(
            phi(&m, &Multidegree::new(vec![0, 1, 1])),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn phi_inverse_examples() {
        let theta = catalog::theta();
        let i = SheafModel::from_ids(&theta, ["e1"], [("v", 0), ("w", 1)]).unwrap();
        let (m, l) = phi_inverse(&theta, &i).unwrap();
        assert_eq!(m.source().classify(), crate::curve::CurveClass::Quasistable);
        assert_eq!(
            l.to_map(m.source()),
            [("e1#1", 1), ("v", 0), ("w", 1)]
                .map(|(k, v)| (k.to_string(), v))
                .into()
        );

        let (m, l) = phi_inverse(&theta, &SheafModel::invertible(Multidegree::new(vec![2, 0]))).unwrap();
        assert!(m.is_identity());
        assert_eq!(l.values(), &[2, 0]);

        let x = DualGraph::builder().vertex("x", 1).edge("l", "x", "x").build().unwrap();
        let i = SheafModel::from_ids(&x, ["l"], [("x", 2)]).unwrap();
        let (m, l) = phi_inverse(&x, &i).unwrap();
        assert_eq!(m.source().vertex_count(), 2);
        assert_eq!(
            l.to_map(m.source()),
            [("l#1", 1), ("x", 2)].map(|(k, v)| (k.to_string(), v)).into()
        );
    }

    #[test]
    fn phi_of_curve_uses_stable_model() {
        let y = catalog::theta_subdivided(1);
        let l = Multidegree::from_ids(&y, [("v", 0), ("w", 1), ("e1#1", 1)]).unwrap();
        let (m, i) = phi_of_curve(&y, &l).unwrap();
        assert_eq!(m.target(), &catalog::theta());
        assert_eq!(i.degree(), 2);
    }

    #[test]
    fn certify_examples() {
        let r = certify_bijection(&catalog::theta(), 2, CorrespondenceMode::Semistable).unwrap();
        assert_eq!(
            (r.balanced_count, r.semistable_count, r.bijection),
            (12, 12, true),
            "{:?}",
            r.mismatches
        );
        let r = certify_bijection(&catalog::banana11(), 2, CorrespondenceMode::Semistable).unwrap();
        assert_eq!((r.balanced_count, r.semistable_count, r.bijection), (1, 1, true));
        let r = certify_bijection(&catalog::theta(), 0, CorrespondenceMode::Semistable).unwrap();
        assert!(r.bijection, "{:?}", r.mismatches);
        assert_eq!(r.balanced_count, r.semistable_count);
    }
}
