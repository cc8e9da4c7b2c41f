//! Dual-graph calculus for compactified Jacobians of nodal curves.
//!
//! Curves are modelled by their dual graphs, line bundles by multidegrees and
//! torsion-free rank-1 sheaves by `(N, d̃)` pairs. On top of these the crate
//! provides semistable modifications and stable models, the pushforward of
//! admissible line bundles, polarized stability and the Basic Inequality, and
//! the correspondence between balanced bundles on quasistable models and
//! semistable sheaves on the stable curve.
//!
//! ```
//! use nodal_core::{catalog, correspondence::{certify_bijection, CorrespondenceMode}};
//!
//! let report = certify_bijection(&catalog::theta(), 2, CorrespondenceMode::Semistable).unwrap();
//! assert_eq!((report.balanced_count, report.semistable_count), (12, 12));
//! assert!(report.bijection);
//! ```

pub mod bitset;
pub mod catalog;
pub mod chain;
pub mod correspondence;
pub mod curve;
pub mod error;
pub mod io;
pub mod modification;
pub mod pushforward;
pub mod random;
pub mod sheaves;
pub mod stability;
pub mod verify;

pub use bitset::BitSet;
pub use curve::{CurveClass, DualGraph, Subcurve};
pub use error::{Error, Result};
pub use modification::{stable_model, Modification};
pub use sheaves::{Multidegree, SheafModel, Twister};
pub use stability::Polarization;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/dual-graphs.md")]
    mod dual_graphs {}
    #[doc = include_str!("../../../book/src/modifications.md")]
    mod modifications {}
    #[doc = include_str!("../../../book/src/sheaves.md")]
    mod sheaves {}
    #[doc = include_str!("../../../book/src/pushforward.md")]
    mod pushforward {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/correspondence.md")]
    mod correspondence {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
