//! Polarizations, (semi/quasi)stability, the Basic Inequality and enumerators.
//!
//! A polarization is recorded numerically as a rank and a multidegree. For a
//! sheaf or bundle `F` on a curve and a proper subcurve `Z`,
//!
//! ```text
//! χ(F_Z ⊗ E|_Z) = rank · (deg_Z F + χ(O_Z)) + deg_Z e
//! ```
//!
//! and the stability conditions ask for this to be nonnegative (semistable),
//! positive (stable) or positive whenever `Z` contains a base vertex
//! (quasistable). Both sides are additive over connected components of `Z`,
//! so only connected proper subcurves are scanned.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::curve::DualGraph;
use crate::error::{Error, Result};
use crate::modification::Modification;
use crate::sheaves::{Multidegree, SheafModel};

/// Enumerations are exponential in the edge count; refuse anything larger.
pub const MAX_ENUMERATION_EDGES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarization {
    pub rank: i64,
    pub e: Multidegree,
}

impl Polarization {
    pub fn new(rank: i64, e: Multidegree) -> Result<Self> {
        if rank <= 0 {
            return Err(Error::NonPositiveRank(rank));
        }
        Ok(Polarization { rank, e })
    }

    /// `rank · (d + χ(O_X)) + deg e`; zero for a polarization compatible with degree `d`.
    pub fn defect(&self, graph: &DualGraph, degree: i64) -> i64 {
        self.rank * (degree + 1 - graph.genus()) + self.e.total()
    }

    pub fn check_compatible(&self, graph: &DualGraph, degree: i64) -> Result<()> {
        self.e.check_graph(graph)?;
        match self.defect(graph, degree) {
            0 => Ok(()),
            defect => Err(Error::IncompatiblePolarization { degree, defect }),
        }
    }

    pub fn scaled(&self, factor: i64) -> Result<Self> {
        Polarization::new(self.rank * factor, self.e.scaled(factor))
    }

    pub fn pullback(&self, m: &Modification) -> Result<Self> {
        Ok(Polarization {
            rank: self.rank,
            e: m.pullback_multidegree(&self.e)?,
        })
    }
}

/// `O^{2g-3} ⊕ ω^{g-1-d}`: rank `2g - 2`, multidegree `(g - 1 - d) ω`.
pub fn canonical_polarization(x: &DualGraph, degree: i64) -> Result<Polarization> {
    let g = x.genus();
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    Polarization::new(2 * g - 2, x.omega_multidegree().scaled(g - 1 - degree))
}

pub fn chi_twisted(deg_z: i64, chi_oz: i64, deg_ze: i64, rank: i64) -> i64 {
    rank * (deg_z + chi_oz) + deg_ze
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityMode {
    Semistable,
    Stable,
    /// Quasistable with respect to a base vertex.
    Quasistable(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubcurveInfo {
    pub members: BitSet,
    pub chi: i64,
    pub boundary: i64,
    pub omega: i64,
}

/// Connected proper subcurves of one graph with their numerical invariants,
/// for running many checks against the same curve.
#[derive(Debug, Clone)]
pub struct SubcurveTable {
    vertex_count: usize,
    genus: i64,
    entries: Vec<SubcurveInfo>,
}

impl SubcurveTable {
    pub fn new(graph: &DualGraph) -> Self {
        let entries = graph
            .connected_sets(true)
            .into_iter()
            .map(|members| SubcurveInfo {
                members,
                chi: graph.chi_of(members),
                boundary: graph.boundary_edge_count(members) as i64,
                omega: graph.omega_degree_of(members),
            })
            .collect();
        SubcurveTable {
            vertex_count: graph.vertex_count(),
            genus: graph.genus(),
            entries,
        }
    }

    pub fn entries(&self) -> &[SubcurveInfo] {
        &self.entries
    }

    fn check(&self, graph: &DualGraph) -> Result<()> {
        if graph.vertex_count() == self.vertex_count {
            Ok(())
        } else {
            Err(Error::GraphMismatch {
                expected: graph.vertex_count(),
                found: self.vertex_count,
            })
        }
    }
}

fn scan(table: &SubcurveTable, pol: &Polarization, mode: StabilityMode, deg: impl Fn(BitSet) -> i64) -> bool {
    table.entries.iter().all(|z| {
        let value = chi_twisted(deg(z.members), z.chi, pol.e.degree_on(z.members), pol.rank);
        match (value.signum(), mode) {
            (1, _) | (0, StabilityMode::Semistable) => true,
            (0, StabilityMode::Quasistable(v0)) => !z.members.contains(v0),
            _ => false,
        }
    })
}

fn check_mode(graph: &DualGraph, mode: StabilityMode) -> Result<()> {
    match mode {
        StabilityMode::Quasistable(v) if v >= graph.vertex_count() => Err(Error::UnknownVertex(format!("#{v}"))),
        _ => Ok(()),
    }
}

pub fn check_sheaf_stability(
    x: &DualGraph,
    sheaf: &SheafModel,
    pol: &Polarization,
    mode: StabilityMode,
) -> Result<bool> {
    check_sheaf_stability_with(&SubcurveTable::new(x), x, sheaf, pol, mode)
}

pub fn check_sheaf_stability_with(
    table: &SubcurveTable,
    x: &DualGraph,
    sheaf: &SheafModel,
    pol: &Polarization,
    mode: StabilityMode,
) -> Result<bool> {
    table.check(x)?;
    sheaf.tilde.check_graph(x)?;
    check_mode(x, mode)?;
    pol.check_compatible(x, sheaf.degree())?;
    Ok(scan(table, pol, mode, |z| sheaf.degree_on(x, z)))
}

pub fn check_bundle_stability(
    y: &DualGraph,
    bundle: &Multidegree,
    pol: &Polarization,
    mode: StabilityMode,
) -> Result<bool> {
    check_bundle_stability_with(&SubcurveTable::new(y), y, bundle, pol, mode)
}

pub fn check_bundle_stability_with(
    table: &SubcurveTable,
    y: &DualGraph,
    bundle: &Multidegree,
    pol: &Polarization,
    mode: StabilityMode,
) -> Result<bool> {
    table.check(y)?;
    bundle.check_graph(y)?;
    check_mode(y, mode)?;
    pol.check_compatible(y, bundle.total())?;
    Ok(scan(table, pol, mode, |z| bundle.degree_on(z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteStatus {
    Strict,
    Equality,
    Violated,
}

/// One connected proper subcurve in a `deg_Z ≥ d·ω_Z/(2g-2) - k_Z/2` scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub members: BitSet,
    pub degree: i64,
    pub bound: Ratio<i64>,
    pub status: SiteStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityReport {
    pub sites: Vec<Site>,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.sites.iter().all(|s| s.status != SiteStatus::Violated)
    }

    pub fn holds_strictly(&self) -> bool {
        self.sites.iter().all(|s| s.status == SiteStatus::Strict)
    }

    pub fn equality_sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().filter(|s| s.status == SiteStatus::Equality)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().filter(|s| s.status == SiteStatus::Violated)
    }
}

fn lower_bound(degree: i64, genus: i64, omega: i64, boundary: i64) -> Ratio<i64> {
    Ratio::new(degree * omega, 2 * genus - 2) - Ratio::new(boundary, 2)
}

fn inequality_report(table: &SubcurveTable, degree: i64, deg: impl Fn(BitSet) -> i64) -> InequalityReport {
    let sites = table
        .entries
        .iter()
        .map(|z| {
            let bound = lower_bound(degree, table.genus, z.omega, z.boundary);
            let value = Ratio::from_integer(deg(z.members));
            let status = match value.cmp(&bound) {
                std::cmp::Ordering::Greater => SiteStatus::Strict,
                std::cmp::Ordering::Equal => SiteStatus::Equality,
                std::cmp::Ordering::Less => SiteStatus::Violated,
            };
            Site {
                members: z.members,
                degree: deg(z.members),
                bound,
                status,
            }
        })
        .collect();
    InequalityReport { sites }
}

/// `deg_Z(I) ≥ d·deg_Z(ω)/(2g-2) - k_Z/2` over connected proper `Z`, exactly.
pub fn check_ssi2(x: &DualGraph, sheaf: &SheafModel, degree: i64) -> Result<InequalityReport> {
    check_ssi2_with(&SubcurveTable::new(x), x, sheaf, degree)
}

pub fn check_ssi2_with(
    table: &SubcurveTable,
    x: &DualGraph,
    sheaf: &SheafModel,
    degree: i64,
) -> Result<InequalityReport> {
    table.check(x)?;
    sheaf.tilde.check_graph(x)?;
    if x.genus() < 2 {
        return Err(Error::GenusTooSmall(x.genus()));
    }
    if sheaf.degree() != degree {
        return Err(Error::Hypothesis(format!(
            "sheaf has degree {}, not {degree}",
            sheaf.degree()
        )));
    }
    Ok(inequality_report(table, degree, |z| sheaf.degree_on(x, z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceMode {
    Balanced,
    StablyBalanced,
}

/// The Basic Inequality scan for a line bundle on a quasistable curve.
pub fn balance_report(y: &DualGraph, bundle: &Multidegree) -> Result<InequalityReport> {
    balance_report_with(&SubcurveTable::new(y), y, bundle)
}

pub fn balance_report_with(table: &SubcurveTable, y: &DualGraph, bundle: &Multidegree) -> Result<InequalityReport> {
    table.check(y)?;
    bundle.check_graph(y)?;
    if !y.classify().is_quasistable() {
        return Err(Error::NotQuasistable);
    }
    if y.genus() < 2 {
        return Err(Error::GenusTooSmall(y.genus()));
    }
    Ok(inequality_report(table, bundle.total(), |z| bundle.degree_on(z)))
}

/// Degree 1 on every exceptional component plus the Basic Inequality; stably
/// balanced also requires every equality site to have an all-exceptional
/// complement.
pub fn check_balanced(y: &DualGraph, bundle: &Multidegree, mode: BalanceMode) -> Result<bool> {
    check_balanced_with(&SubcurveTable::new(y), y, bundle, mode)
}

pub fn check_balanced_with(
    table: &SubcurveTable,
    y: &DualGraph,
    bundle: &Multidegree,
    mode: BalanceMode,
) -> Result<bool> {
    let report = balance_report_with(table, y, bundle)?;
    let exceptional = y.exceptional_vertices();
    if exceptional.iter().any(|v| bundle.get(v) != 1) || !report.holds() {
        return Ok(false);
    }
    Ok(match mode {
        BalanceMode::Balanced => true,
        BalanceMode::StablyBalanced => {
            let full = y.all_vertices();
            report
                .equality_sites()
                .all(|s| full.difference(s.members).is_subset(exceptional))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityKind {
    Semistable,
    Stable,
}

fn require_enumerable(x: &DualGraph) -> Result<()> {
    if !x.classify().is_stable() {
        return Err(Error::NotStable);
    }
    if x.genus() < 2 {
        return Err(Error::GenusTooSmall(x.genus()));
    }
    if x.edge_count() > MAX_ENUMERATION_EDGES {
        return Err(Error::TooLarge {
            what: "edge",
            count: x.edge_count(),
            max: MAX_ENUMERATION_EDGES,
        });
    }
    Ok(())
}

/// Edge subsets ordered lexicographically by their sorted edge sequences.
fn ordered_edge_subsets(x: &DualGraph) -> Vec<BitSet> {
    let mut subsets: Vec<Vec<usize>> = x.all_edges().subsets().map(|s| s.iter().collect()).collect();
    subsets.sort();
    subsets.into_iter().map(|s| s.into_iter().collect()).collect()
}

fn ceil(r: Ratio<i64>) -> i64 {
    r.ceil().to_integer()
}

fn floor(r: Ratio<i64>) -> i64 {
    r.floor().to_integer()
}

/// Integer vectors with `lo ≤ v ≤ hi` componentwise and the given sum, in
/// lexicographic order.
fn bounded_vectors(lo: &[i64], hi: &[i64], sum: i64) -> Vec<Vec<i64>> {
    fn go(
        i: usize,
        lo: &[i64],
        hi: &[i64],
        rest: i64,
        suffix: &[(i64, i64)],
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == lo.len() {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let (min_after, max_after) = suffix[i + 1];
        let from = lo[i].max(rest - max_after);
        let to = hi[i].min(rest - min_after);
        for value in from..=to {
            cur.push(value);
            go(i + 1, lo, hi, rest - value, suffix, cur, out);
            cur.pop();
        }
    }
    let n = lo.len();
    let mut suffix = vec![(0, 0); n + 1];
    for i in (0..n).rev() {
        suffix[i] = (suffix[i + 1].0 + lo[i], suffix[i + 1].1 + hi[i]);
    }
    let mut out = Vec::new();
    go(0, lo, hi, sum, &suffix, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All (semi)stable sheaf models of degree `d` on a stable curve, ordered by
/// `N` then lexicographically by `d̃`.
pub fn enumerate_semistable_models(x: &DualGraph, degree: i64, kind: StabilityKind) -> Result<Vec<SheafModel>> {
    require_enumerable(x)?;
    let table = SubcurveTable::new(x);
    let g = x.genus();
    let nv = x.vertex_count();

    let per_subset = |n: BitSet| -> Result<Vec<SheafModel>> {
        let sum = degree - n.len() as i64;
        let (lo, hi): (Vec<i64>, Vec<i64>) = if nv == 1 {
            (vec![sum], vec![sum])
        } else {
            let lo: Vec<i64> = (0..nv)
                .map(|v| {
                    let loops_in_n = n.iter().filter(|&e| x.edge(e).ends == [v, v]).count() as i64;
                    let single = BitSet::singleton(v);
                    ceil(lower_bound(
                        degree,
                        g,
                        x.omega_degree_of(single),
                        x.boundary_edge_count(single) as i64,
                    )) - loops_in_n
                })
                .collect();
            let total_lo: i64 = lo.iter().sum();
            let hi = lo.iter().map(|&l| sum - (total_lo - l)).collect();
            (lo, hi)
        };
        let mut found = Vec::new();
        for values in bounded_vectors(&lo, &hi, sum) {
            let model = SheafModel {
                noninvertible: n,
                tilde: Multidegree::new(values),
            };
            let report = check_ssi2_with(&table, x, &model, degree)?;
            let keep = match kind {
                StabilityKind::Semistable => report.holds(),
                StabilityKind::Stable => report.holds_strictly(),
            };
            if keep {
                found.push(model);
            }
        }
        Ok(found)
    };

    let chunks = ordered_edge_subsets(x)
        .into_par_iter()
        .map(per_subset)
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// All (stably) balanced line bundles of degree `d` on small modifications of
/// a stable curve, ordered by the modified edge set then lexicographically.
pub fn enumerate_balanced(x: &DualGraph, degree: i64, mode: BalanceMode) -> Result<Vec<(Modification, Multidegree)>> {
    require_enumerable(x)?;
    let g = x.genus();

    let per_subset = |n: BitSet| -> Result<Vec<(Modification, Multidegree)>> {
        let m = Modification::small(x.clone(), n)?;
        let y = m.source();
        if !y.classify().is_quasistable() {
            return Ok(Vec::new());
        }
        let table = SubcurveTable::new(y);
        let chain_vertices = m.contracted();
        let sum = degree;
        let (lo, hi): (Vec<i64>, Vec<i64>) = (0..y.vertex_count())
            .map(|v| {
                if chain_vertices.contains(v) {
                    (1, 1)
                } else if y.vertex_count() == 1 {
                    (sum, sum)
                } else {
                    let single = BitSet::singleton(v);
                    let centre = lower_bound(degree, g, y.omega_degree_of(single), 0);
                    let half = Ratio::new(y.boundary_edge_count(single) as i64, 2);
                    (ceil(centre - half), floor(centre + half))
                }
            })
            .unzip();
        let mut found = Vec::new();
        for values in bounded_vectors(&lo, &hi, sum) {
            let bundle = Multidegree::new(values);
            if check_balanced_with(&table, y, &bundle, mode)? {
                found.push((m.clone(), bundle));
            }
        }
        Ok(found)
    };

    let chunks = ordered_edge_subsets(x)
        .into_par_iter()
        .map(per_subset)
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
