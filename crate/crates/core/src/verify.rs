//! Verification suites: the invariants of the other modules checked over
//! exhaustive small families and seeded random instances.
//!
//! Exhaustive parts run over the catalog curves `theta` and `banana11`, with
//! chain lengths up to `min(chain_length_max, 2)` and base degrees in
//! `[-min(w, 2), min(w, 2)]` for the degree window `w`. Random parts draw
//! `instance_count` stable curves with at most `max_vertices` components.
//!
//! Reports contain no timings, so the same configuration always produces the
//! same bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bitset::BitSet;
use crate::catalog;
use crate::chain::chain_h;
use crate::correspondence::{certify_bijection, phi, phi_inverse, CorrespondenceMode};
use crate::curve::{DualGraph, Subcurve};
use crate::error::{Error, Result};
use crate::io::{CurveFile, ModificationFile, SheafModelFile};
use crate::modification::{stable_model, Modification};
use crate::pushforward::{
    pushforward_degree_oracle, pushforward_diagnostics, pushforward_model, same_pushforward, solve_chain_twister,
};
use crate::random::{self, GraphParams};
use crate::sheaves::{admissibility, interval_sum_range, twist, Admissibility, Multidegree, SheafModel, Twister};
use crate::stability::{
    canonical_polarization, check_balanced_with, check_bundle_stability_with, check_sheaf_stability_with,
    check_ssi2_with, BalanceMode, StabilityMode, SubcurveTable,
};

/// Failures kept per suite; the rest are only counted.
pub const MAX_REPORTED_FAILURES: usize = 10;
/// Cap on inserted components in random instances, keeping the brute-force oracle cheap.
const RANDOM_CHAIN_VERTICES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ChainCohomology,
    Pushforward,
    Compadm,
    Famchain2,
    Biss,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::ChainCohomology,
        Suite::Pushforward,
        Suite::Compadm,
        Suite::Famchain2,
        Suite::Biss,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ChainCohomology => "chain-cohomology",
            Suite::Pushforward => "pushforward",
            Suite::Compadm => "compadm",
            Suite::Famchain2 => "famchain2",
            Suite::Biss => "biss",
            Suite::Roundtrip => "roundtrip",
        }
    }

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
            format!("unknown suite `{s}`; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub max_vertices: usize,
    pub max_genus: u32,
    pub degree_window: i64,
    pub chain_length_max: usize,
    pub seed: u64,
    pub instance_count: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: Suite::ALL.to_vec(),
            max_vertices: 4,
            max_genus: 2,
            degree_window: 3,
            chain_length_max: 3,
            seed: 0,
            instance_count: 100,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Hypothesis(format!("{what} must be positive")));
        if self.max_vertices == 0 {
            return bad("max_vertices");
        }
        if self.max_vertices > 16 {
            return Err(Error::TooLarge {
                what: "vertex",
                count: self.max_vertices,
                max: 16,
            });
        }
        if self.degree_window <= 0 {
            return bad("degree_window");
        }
        if self.chain_length_max == 0 {
            return bad("chain_length_max");
        }
        if self.chain_length_max > 8 {
            return Err(Error::TooLarge {
                what: "chain length",
                count: self.chain_length_max,
                max: 8,
            });
        }
        if self.suites.is_empty() {
            return Err(Error::Hypothesis("no suites selected".into()));
        }
        Ok(())
    }

    fn graph_params(&self) -> GraphParams {
        GraphParams {
            max_vertices: self.max_vertices,
            max_genus: self.max_genus,
            max_extra_edges: 3,
        }
    }

    fn exhaustive_length(&self) -> usize {
        self.chain_length_max.min(2)
    }

    fn base_window(&self) -> (i64, i64) {
        let w = self.degree_window.min(2);
        (-w, w)
    }

    fn random_window(&self) -> (i64, i64) {
        (-self.degree_window, self.degree_window)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub message: String,
    /// Instance size used to put the smallest counterexample first.
    pub size: usize,
    pub repro: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub exhaustive_cases: usize,
    pub random_cases: usize,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    let mut suites: Vec<Suite> = config.suites.clone();
    suites.sort();
    suites.dedup();
    let reports: Vec<SuiteReport> = suites.into_iter().map(|s| run_suite(s, config)).collect();
    Ok(VerifyReport {
        config: config.clone(),
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    })
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> SuiteReport {
    let (exhaustive, random) = match suite {
        Suite::ChainCohomology => chain_cohomology_suite(config),
        Suite::Pushforward => pushforward_suite(config),
        Suite::Compadm => compadm_suite(config),
        Suite::Famchain2 => famchain2_suite(config),
        Suite::Biss => biss_suite(config),
        Suite::Roundtrip => roundtrip_suite(config),
    };
    let mut failures: Vec<Failure> = exhaustive.failures.into_iter().chain(random.failures).collect();
    failures.sort_by(|a, b| (a.size, &a.message).cmp(&(b.size, &b.message)));
    let failure_count = failures.len();
    failures.truncate(MAX_REPORTED_FAILURES);
    SuiteReport {
        suite,
        passed: failure_count == 0,
        exhaustive_cases: exhaustive.cases,
        random_cases: random.cases,
        failure_count,
        failures,
    }
}

#[derive(Debug, Default)]
struct Tally {
    cases: usize,
    failures: Vec<Failure>,
}

/// Runs `check` on every item in parallel. A check returns its number of
/// verified cases or a failure message; panics count as failures.
fn run_instances<T: Sync>(
    items: &[T],
    check: impl Fn(&T) -> std::result::Result<usize, String> + Sync,
    repro: impl Fn(&T) -> (usize, Value) + Sync,
) -> Tally {
    let outcomes: Vec<std::result::Result<usize, String>> = items
        .par_iter()
        .map(|item| {
            catch_unwind(AssertUnwindSafe(|| check(item))).unwrap_or_else(|panic| {
                let text = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {text}"))
            })
        })
        .collect();
    let mut tally = Tally::default();
    for (item, outcome) in items.iter().zip(outcomes) {
        match outcome {
            Ok(n) => tally.cases += n,
            Err(message) => {
                let (size, mut repro) = repro(item);
                repro["message"] = Value::String(message.clone());
                tally.failures.push(Failure { message, size, repro });
            }
        }
    }
    tally
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn err_string(e: Error) -> String {
    e.to_string()
}

/// Self-contained reproduction record for an instance on a modification.
pub fn repro_record(m: &Modification, bundle: &Multidegree, extra: Value) -> Value {
    json!({
        "curve": CurveFile::from(m.target().clone()),
        "modification": ModificationFile::from(m.clone()),
        "multidegree": bundle.to_map(m.source()),
        "extra": extra,
    })
}

fn instance_size(m: &Modification, bundle: &Multidegree) -> usize {
    m.source().vertex_count() * 100 + bundle.values().iter().map(|d| d.unsigned_abs() as usize).sum::<usize>()
}

// ---------------------------------------------------------------------------
// families

/// `n`-fold Cartesian product of the given lists, in lexicographic order.
pub fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |item| {
                    let mut next = prefix.clone();
                    next.push(item.clone());
                    next
                })
            })
            .collect()
    })
}

/// All integer sequences of length `len` with entries in `window`.
pub fn sequences(len: usize, window: (i64, i64)) -> Vec<Vec<i64>> {
    let values: Vec<i64> = (window.0..=window.1).collect();
    cartesian(&vec![values; len])
}

/// Every modification of `x` (including the identity) with lengths in `1..=max_length`.
pub fn all_modifications(x: &DualGraph, max_length: usize) -> Vec<Modification> {
    let options: Vec<Vec<usize>> = (0..x.edge_count()).map(|_| (0..=max_length).collect()).collect();
    cartesian(&options)
        .into_iter()
        .map(|lens| {
            let lengths = lens.into_iter().enumerate().filter(|&(_, l)| l > 0).collect();
            Modification::from_lengths(x.clone(), lengths).expect("small catalog modification")
        })
        .collect()
}

/// Every bundle on `m.source()` with base degrees in `base` and chain degrees
/// in `chain`, optionally keeping only admissible chains.
pub fn family_bundles(
    m: &Modification,
    chain: (i64, i64),
    admissible_only: bool,
    base: (i64, i64),
) -> Vec<Multidegree> {
    let per_chain: Vec<Vec<Vec<i64>>> = m
        .chains()
        .iter()
        .map(|c| {
            sequences(c.len(), chain)
                .into_iter()
                .filter(|s| !admissible_only || Admissibility::of_chain(s).admissible)
                .collect()
        })
        .collect();
    let bases = sequences(m.target().vertex_count(), base);
    let mut out = Vec::new();
    for b in &bases {
        for combo in cartesian(&per_chain) {
            let mut bundle = Multidegree::zeros(m.source().vertex_count());
            for (x, &d) in b.iter().enumerate() {
                bundle.set(m.lift(x), d);
            }
            for (c, seq) in m.chains().iter().zip(&combo) {
                for (&v, &d) in c.vertices.iter().zip(seq) {
                    bundle.set(v, d);
                }
            }
            out.push(bundle);
        }
    }
    out
}

fn catalog_curves() -> Vec<DualGraph> {
    vec![catalog::theta(), catalog::banana11()]
}

fn catalog_modifications(config: &VerifyConfig) -> Vec<Modification> {
    catalog_curves()
        .iter()
        .flat_map(|x| all_modifications(x, config.exhaustive_length()))
        .collect()
}

fn random_instances(config: &VerifyConfig, suite: Suite) -> Vec<(Modification, Multidegree)> {
    let mut rng = random::rng(config.seed ^ suite.salt().wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..config.instance_count)
        .map(|_| {
            let x = random::random_stable_graph(&mut rng, config.graph_params());
            let m = random::random_modification(&mut rng, &x, config.chain_length_max, RANDOM_CHAIN_VERTICES);
            let l = random::random_admissible_bundle(&mut rng, &m, config.random_window());
            (m, l)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// chain cohomology

fn check_chain(degrees: &[i64]) -> std::result::Result<usize, String> {
    let (lo, hi) = interval_sum_range(degrees).map_err(err_string)?;
    let plain = chain_h(degrees, false).map_err(err_string)?;
    let punctured = chain_h(degrees, true).map_err(err_string)?;
    ensure((plain.h1 == 0) == (lo >= -1), || {
        format!("h1 = {} but min interval sum {lo}", plain.h1)
    })?;
    ensure((punctured.h0 == 0) == (hi <= 1), || {
        format!("punctured h0 = {} but max interval sum {hi}", punctured.h0)
    })?;
    Ok(1)
}

fn chain_repro(degrees: &Vec<i64>) -> (usize, Value) {
    (degrees.len() * 100, json!({ "degrees": degrees }))
}

fn chain_cohomology_suite(config: &VerifyConfig) -> (Tally, Tally) {
    let w = config.degree_window;
    let exhaustive: Vec<Vec<i64>> = (1..=config.chain_length_max)
        .flat_map(|len| sequences(len, (-w, w)))
        .collect();
    let mut rng = random::rng(config.seed ^ Suite::ChainCohomology.salt());
    let random: Vec<Vec<i64>> = (0..config.instance_count)
        .map(|_| {
            let len = rng.gen_range(1..=config.chain_length_max + 3);
            (0..len).map(|_| rng.gen_range(-w..=w)).collect()
        })
        .collect();
    (
        run_instances(&exhaustive, |d| check_chain(d), chain_repro),
        run_instances(&random, |d| check_chain(d), chain_repro),
    )
}

// ---------------------------------------------------------------------------
// pushforward

/// `deg(L|V1)` plus, for each chain over a boundary node, the most negative
/// prefix sum read from the `W` side (or 0).
fn prefix_formula(m: &Modification, bundle: &Multidegree, w: BitSet) -> i64 {
    let mut total = bundle.degree_on(m.lift_set(w));
    for chain in m.chains() {
        let degrees = chain.degrees(bundle);
        let [a, b] = chain.ends;
        let inward: Vec<i64> = match (w.contains(a), w.contains(b)) {
            (true, true) => {
                total += degrees.iter().sum::<i64>();
                continue;
            }
            (true, false) => degrees,
            (false, true) => degrees.into_iter().rev().collect(),
            (false, false) => continue,
        };
        let mut sum = 0;
        let mut best = 0;
        for d in inward {
            sum += d;
            best = best.min(sum);
        }
        total += best;
    }
    total
}

fn check_pushforward(m: &Modification, bundle: &Multidegree) -> std::result::Result<usize, String> {
    let x = m.target();
    let flags = admissibility(m, bundle).map_err(err_string)?;
    ensure(flags.admissible, || "instance is not admissible".into())?;
    let model = pushforward_model(m, bundle).map_err(err_string)?;
    ensure(model.degree() == bundle.total(), || {
        format!("model degree {} vs total {}", model.degree(), bundle.total())
    })?;
    ensure(model.noninvertible.is_empty() == flags.invertible, || {
        "invertibility flag disagrees with N".into()
    })?;
    let diag = pushforward_diagnostics(m, bundle).map_err(err_string)?;
    ensure(!diag.has_torsion && !diag.degree_drops, || {
        "diagnostics flag an admissible bundle".into()
    })?;
    ensure(diag.noninvertible == model.noninvertible, || {
        "diagnostics report different noninvertible edges".into()
    })?;
    let mut cases = 0;
    for w in x.connected_sets(false) {
        let sub = Subcurve::new(x, w).map_err(err_string)?;
        let oracle = pushforward_degree_oracle(m, bundle, &sub).map_err(err_string)?;
        let model_degree = model.degree_on(x, w);
        let closed = prefix_formula(m, bundle, w);
        ensure(oracle == model_degree && oracle == closed, || {
            format!(
                "W = {:?}: model {model_degree}, oracle {oracle}, prefix formula {closed}",
                sub.ids()
            )
        })?;
        cases += 1;
    }
    Ok(cases)
}

fn pair_repro(pair: &(Modification, Multidegree)) -> (usize, Value) {
    (
        instance_size(&pair.0, &pair.1),
        repro_record(&pair.0, &pair.1, Value::Null),
    )
}

fn pushforward_suite(config: &VerifyConfig) -> (Tally, Tally) {
    let exhaustive: Vec<(Modification, Multidegree)> = catalog_modifications(config)
        .into_iter()
        .flat_map(|m| {
            family_bundles(&m, (-1, 1), true, config.base_window())
                .into_iter()
                .map(move |l| (m.clone(), l))
        })
        .collect();
    let random = random_instances(config, Suite::Pushforward);
    let check = |(m, l): &(Modification, Multidegree)| check_pushforward(m, l);
    (
        run_instances(&exhaustive, check, pair_repro),
        run_instances(&random, check, pair_repro),
    )
}

// ---------------------------------------------------------------------------
// compadm

fn check_twist_pair(m: &Modification, bundle: &Multidegree, c: &Twister) -> std::result::Result<usize, String> {
    let twisted = twist(m.source(), bundle, c).map_err(err_string)?;
    if !admissibility(m, &twisted).map_err(err_string)?.admissible {
        return Ok(0);
    }
    ensure(
        solve_chain_twister(m, bundle, &twisted).map_err(err_string)?.is_some(),
        || format!("no chain twister found for c = {:?}", c.0),
    )?;
    match same_pushforward(m, bundle, &twisted) {
        Ok(true) => Ok(1),
        Ok(false) => Err(format!("twist by {:?} not recognised as chain-supported", c.0)),
        Err(e) => Err(e.to_string()),
    }
}

/// Chain-local twist of a chain by coefficients `c` (zero at both ends).
fn chain_laplacian(c: &[i64]) -> Vec<i64> {
    let at = |i: isize| {
        if i < 0 || i as usize >= c.len() {
            0
        } else {
            c[i as usize]
        }
    };
    (0..c.len() as isize)
        .map(|i| at(i - 1) - 2 * at(i) + at(i + 1))
        .collect()
}

/// Jobs for one modification: admissible chain configurations together with
/// the chain-supported twisters (entries in `[-2, 2]`) keeping every chain
/// admissible. Admissibility is chain-local, so the product of per-chain
/// lists is exactly the filtered product.
fn compadm_jobs(m: &Modification, base: (i64, i64)) -> Vec<(Modification, Multidegree, Twister)> {
    let per_chain: Vec<Vec<(Vec<i64>, Vec<i64>)>> = m
        .chains()
        .iter()
        .map(|ch| {
            let configs: Vec<Vec<i64>> = sequences(ch.len(), (-1, 1))
                .into_iter()
                .filter(|s| Admissibility::of_chain(s).admissible)
                .collect();
            let mut pairs = Vec::new();
            for cfg in &configs {
                for c in sequences(ch.len(), (-2, 2)) {
                    let moved: Vec<i64> = cfg.iter().zip(chain_laplacian(&c)).map(|(a, b)| a + b).collect();
                    if Admissibility::of_chain(&moved).admissible {
                        pairs.push((cfg.clone(), c));
                    }
                }
            }
            pairs
        })
        .collect();
    let n = m.source().vertex_count();
    let mut jobs = Vec::new();
    for b in sequences(m.target().vertex_count(), base) {
        for combo in cartesian(&per_chain) {
            let mut bundle = Multidegree::zeros(n);
            let mut coeffs = vec![0; n];
            for (x, &d) in b.iter().enumerate() {
                bundle.set(m.lift(x), d);
            }
            for (ch, (cfg, c)) in m.chains().iter().zip(&combo) {
                for (k, &v) in ch.vertices.iter().enumerate() {
                    bundle.set(v, cfg[k]);
                    coeffs[v] = c[k];
                }
            }
            jobs.push((m.clone(), bundle, Twister(coeffs)));
        }
    }
    jobs
}

fn compadm_suite(config: &VerifyConfig) -> (Tally, Tally) {
    let check = |(m, l, c): &(Modification, Multidegree, Twister)| check_twist_pair(m, l, c);
    let repro = |(m, l, c): &(Modification, Multidegree, Twister)| {
        (instance_size(m, l), repro_record(m, l, json!({ "twister": c.0 })))
    };

    let mut exhaustive = Tally::default();
    for m in catalog_modifications(config) {
        let t = run_instances(&compadm_jobs(&m, config.base_window()), check, repro);
        exhaustive.cases += t.cases;
        exhaustive.failures.extend(t.failures);
    }

    let mut rng = random::rng(config.seed ^ Suite::Compadm.salt());
    let mut jobs = Vec::new();
    for (m, l) in random_instances(config, Suite::Compadm) {
        let chain_vertices = m.contracted();
        for _ in 0..8 {
            let mut coeffs = vec![0; m.source().vertex_count()];
            for v in chain_vertices {
                coeffs[v] = rng.gen_range(-2..=2);
            }
            jobs.push((m.clone(), l.clone(), Twister(coeffs)));
        }
        // A single-vertex twist is usually admissible-preserving and exercises rule changes.
        if let Some(v) = chain_vertices.iter().next() {
            jobs.push((
                m.clone(),
                l.clone(),
                Twister::indicator(m.source().vertex_count(), BitSet::singleton(v)),
            ));
        }
    }
    (exhaustive, run_instances(&jobs, check, repro))
}

// ---------------------------------------------------------------------------
// famchain2

struct Famchain2Context {
    m: Modification,
    table_x: SubcurveTable,
    table_y: SubcurveTable,
}

fn check_famchain2(ctx: &Famchain2Context, bundle: &Multidegree) -> std::result::Result<usize, String> {
    let (m, x, y) = (&ctx.m, ctx.m.target(), ctx.m.source());
    let d = bundle.total();
    let pol_x = canonical_polarization(x, d).map_err(err_string)?;
    let pol_y = pol_x.pullback(m).map_err(err_string)?;
    let flags = admissibility(m, bundle).map_err(err_string)?;
    let model = if flags.admissible {
        Some(pushforward_model(m, bundle).map_err(err_string)?)
    } else {
        None
    };
    let sheaf = |mode| -> std::result::Result<bool, String> {
        match &model {
            Some(i) => check_sheaf_stability_with(&ctx.table_x, x, i, &pol_x, mode).map_err(err_string),
            None => Ok(false),
        }
    };
    let bundle_check = |mode| check_bundle_stability_with(&ctx.table_y, y, bundle, &pol_y, mode).map_err(err_string);

    let ss = bundle_check(StabilityMode::Semistable)?;
    let expected = flags.admissible && sheaf(StabilityMode::Semistable)?;
    ensure(ss == expected, || {
        format!("semistable on Y: {ss}, admissible and semistable pushforward: {expected}")
    })?;

    let st = bundle_check(StabilityMode::Stable)?;
    let expected = flags.invertible && sheaf(StabilityMode::Stable)?;
    ensure(st == expected, || {
        format!("stable on Y: {st}, invertible and stable pushforward: {expected}")
    })?;

    let mut cases = 2;
    for p in 0..x.vertex_count() {
        let lifted = m.lift(p);
        let qs = bundle_check(StabilityMode::Quasistable(lifted))?;
        let expected = flags.negatively && sheaf(StabilityMode::Quasistable(p))?;
        ensure(qs == expected, || {
            format!(
                "{}-quasistable on Y: {qs}, negatively admissible and quasistable pushforward: {expected}",
                x.vertex(p).id
            )
        })?;
        cases += 1;
    }
    Ok(cases)
}

fn famchain2_suite(config: &VerifyConfig) -> (Tally, Tally) {
    let run_family = |contexts: Vec<(Famchain2Context, Vec<Multidegree>)>| {
        let mut tally = Tally::default();
        for (ctx, bundles) in &contexts {
            let t = run_instances(
                bundles,
                |l| check_famchain2(ctx, l),
                |l| (instance_size(&ctx.m, l), repro_record(&ctx.m, l, Value::Null)),
            );
            tally.cases += t.cases;
            tally.failures.extend(t.failures);
        }
        tally
    };
    let context = |m: Modification| Famchain2Context {
        table_x: SubcurveTable::new(m.target()),
        table_y: SubcurveTable::new(m.source()),
        m,
    };

    let exhaustive = catalog_modifications(config)
        .into_iter()
        .map(|m| {
            let bundles = family_bundles(&m, (-1, 1), false, config.base_window());
            (context(m), bundles)
        })
        .collect();

    // Random instances mix admissible bundles with arbitrary chain degrees in [-2, 2].
    let mut rng = random::rng(config.seed ^ Suite::Famchain2.salt());
    let random = random_instances(config, Suite::Famchain2)
        .into_iter()
        .map(|(m, mut l)| {
            if rng.gen_bool(0.5) {
                for v in m.contracted() {
                    l.set(v, rng.gen_range(-2..=2));
                }
            }
            (context(m), vec![l])
        })
        .collect();
    (run_family(exhaustive), run_family(random))
}

// ---------------------------------------------------------------------------
// biss

struct BissContext {
    m: Modification,
    degree: i64,
    table_x: SubcurveTable,
    table_y: SubcurveTable,
}

fn check_biss(ctx: &BissContext, bundle: &Multidegree) -> std::result::Result<usize, String> {
    let (m, x, y, d) = (&ctx.m, ctx.m.target(), ctx.m.source(), ctx.degree);
    let pol = canonical_polarization(x, d).map_err(err_string)?;
    let balanced = check_balanced_with(&ctx.table_y, y, bundle, BalanceMode::Balanced).map_err(err_string)?;
    let stably = check_balanced_with(&ctx.table_y, y, bundle, BalanceMode::StablyBalanced).map_err(err_string)?;
    let sheaf = pushforward_model(m, bundle).map_err(err_string)?;
    let ss =
        check_sheaf_stability_with(&ctx.table_x, x, &sheaf, &pol, StabilityMode::Semistable).map_err(err_string)?;
    let st = check_sheaf_stability_with(&ctx.table_x, x, &sheaf, &pol, StabilityMode::Stable).map_err(err_string)?;
    ensure(balanced == ss, || {
        format!("balanced: {balanced}, pushforward semistable: {ss}")
    })?;
    ensure(stably == st, || {
        format!("stably balanced: {stably}, pushforward stable: {st}")
    })?;

    let report = check_ssi2_with(&ctx.table_x, x, &sheaf, d).map_err(err_string)?;
    ensure(report.holds() == ss && report.holds_strictly() == st, || {
        format!(
            "degree inequality ({}, strict {}) disagrees with polarized check ({ss}, {st})",
            report.holds(),
            report.holds_strictly()
        )
    })?;

    let shifted = twist(y, bundle, &Twister::indicator(y.vertex_count(), m.contracted())).map_err(err_string)?;
    ensure(admissibility(m, &shifted).map_err(err_string)?.negatively, || {
        "twisted bundle not negatively admissible".into()
    })?;
    let shifted_sheaf = pushforward_model(m, &shifted).map_err(err_string)?;
    ensure(shifted_sheaf == sheaf, || {
        "twisted bundle has a different pushforward".into()
    })?;
    let pol_y = pol.pullback(m).map_err(err_string)?;
    let shifted_ss = check_bundle_stability_with(&ctx.table_y, y, &shifted, &pol_y, StabilityMode::Semistable)
        .map_err(err_string)?;
    ensure(shifted_ss == balanced, || {
        format!("balanced: {balanced}, twisted bundle semistable on Y: {shifted_ss}")
    })?;
    Ok(1)
}

/// Bundles of total degree `d` with degree 1 on chain vertices and base
/// degrees in `[-(|d| + 4), |d| + 4]`.
pub fn biss_bundles(m: &Modification, degree: i64) -> Vec<Multidegree> {
    let spread = degree.abs() + 4;
    let base_total = degree - m.contracted().len() as i64;
    let bases: Vec<Vec<i64>> = sequences(m.target().vertex_count(), (-spread, spread))
        .into_iter()
        .filter(|b| b.iter().sum::<i64>() == base_total)
        .collect();
    bases
        .into_iter()
        .map(|b| {
            let mut bundle = Multidegree::zeros(m.source().vertex_count());
            for (x, d) in b.into_iter().enumerate() {
                bundle.set(m.lift(x), d);
            }
            for v in m.contracted() {
                bundle.set(v, 1);
            }
            bundle
        })
        .collect()
}

fn biss_suite(config: &VerifyConfig) -> (Tally, Tally) {
    let w = config.degree_window;
    let run_family = |contexts: Vec<(BissContext, Vec<Multidegree>)>| {
        let mut tally = Tally::default();
        for (ctx, bundles) in &contexts {
            let t = run_instances(
                bundles,
                |l| check_biss(ctx, l),
                |l| {
                    (
                        instance_size(&ctx.m, l),
                        repro_record(&ctx.m, l, json!({ "degree": ctx.degree })),
                    )
                },
            );
            tally.cases += t.cases;
            tally.failures.extend(t.failures);
        }
        tally
    };
    let contexts_for = |x: &DualGraph, degrees: &[i64]| -> Vec<(BissContext, Vec<Multidegree>)> {
        let mut out = Vec::new();
        for subset in x.all_edges().subsets() {
            let m = Modification::small(x.clone(), subset).expect("small modification");
            for &d in degrees {
                let bundles = biss_bundles(&m, d);
                let ctx = BissContext {
                    table_x: SubcurveTable::new(x),
                    table_y: SubcurveTable::new(m.source()),
                    m: m.clone(),
                    degree: d,
                };
                out.push((ctx, bundles));
            }
        }
        out
    };

    let degrees: Vec<i64> = (-w..=w).collect();
    let exhaustive = catalog_curves()
        .iter()
        .flat_map(|x| contexts_for(x, &degrees))
        .collect();

    let mut rng = random::rng(config.seed ^ Suite::Biss.salt());
    let mut random = Vec::new();
    for _ in 0..config.instance_count {
        let x = random::random_stable_graph(&mut rng, config.graph_params());
        if x.edge_count() > 6 {
            continue;
        }
        let subset = random::random_subset(&mut rng, x.all_edges());
        let m = Modification::small(x.clone(), subset).expect("small modification");
        let d = rng.gen_range(-w..=w);
        let bundles = biss_bundles(&m, d);
        let picked: Vec<Multidegree> = (0..4.min(bundles.len()))
            .map(|_| bundles[rng.gen_range(0..bundles.len())].clone())
            .collect();
        random.push((
            BissContext {
                table_x: SubcurveTable::new(&x),
                table_y: SubcurveTable::new(m.source()),
                m,
                degree: d,
            },
            picked,
        ));
    }
    (run_family(exhaustive), run_family(random))
}

// ---------------------------------------------------------------------------
// round trips and structural invariants

fn check_structure(
    m: &Modification,
    twister: &Twister,
    sheaf: &SheafModel,
    degree: i64,
) -> std::result::Result<usize, String> {
    let (x, y) = (m.target(), m.source());
    for g in [x, y] {
        let total = g.omega_multidegree().total();
        ensure(total == 2 * g.genus() - 2, || {
            format!("omega total {total} with genus {}", g.genus())
        })?;
    }
    let delta = twister.multidegree(y).map_err(err_string)?;
    ensure(delta.total() == 0, || {
        format!("twister {:?} has total degree {}", twister.0, delta.total())
    })?;

    let back = stable_model(y).map_err(err_string)?;
    ensure(back == *m, || {
        "stable model of the modification differs from the modification".into()
    })?;
    let pulled = m.pullback_multidegree(&x.omega_multidegree()).map_err(err_string)?;
    ensure(pulled == y.omega_multidegree(), || {
        "pullback of omega differs from omega of the source".into()
    })?;

    let (small, bundle) = phi_inverse(x, sheaf).map_err(err_string)?;
    ensure(bundle.total() == sheaf.degree(), || {
        "phi_inverse changes the degree".into()
    })?;
    let (_, again) = phi(&small, &bundle).map_err(err_string)?;
    ensure(again == *sheaf, || "phi(phi_inverse(I)) differs from I".into())?;
    let (small_back, bundle_back) = phi_inverse(x, &again).map_err(err_string)?;
    ensure(small_back == small && bundle_back == bundle, || {
        "phi_inverse(phi(m, L)) differs from (m, L)".into()
    })?;

    let mut cases = 1;
    if x.vertex_count() <= 4 && x.edge_count() <= 6 && x.genus() <= 3 {
        let report = certify_bijection(x, degree, CorrespondenceMode::Semistable).map_err(err_string)?;
        ensure(report.bijection, || {
            format!("bijection fails at degree {degree}: {:?}", report.mismatches)
        })?;
        let report = certify_bijection(x, degree, CorrespondenceMode::Stable).map_err(err_string)?;
        ensure(report.bijection, || {
            format!("stable bijection fails at degree {degree}: {:?}", report.mismatches)
        })?;
        cases += 1;
    }
    Ok(cases)
}

type RoundtripCase = (Modification, Twister, SheafModel, i64);

fn roundtrip_suite(config: &VerifyConfig) -> (Tally, Tally) {
    let check = |(m, c, i, d): &RoundtripCase| check_structure(m, c, i, *d);
    let repro = |(m, c, i, d): &RoundtripCase| {
        let zero = Multidegree::zeros(m.source().vertex_count());
        let extra = json!({
            "twister": c.0,
            "sheaf": SheafModelFile::from_model(m.target(), i),
            "degree": d,
        });
        (instance_size(m, &zero), repro_record(m, &zero, extra))
    };
    let w = config.degree_window;

    let mut exhaustive = Vec::new();
    for m in catalog_modifications(config) {
        let n = m.source().vertex_count();
        let x = m.target();
        for d in -w..=w {
            let sheaf = SheafModel {
                noninvertible: m.modified_edges(),
                tilde: Multidegree::new(
                    (0..x.vertex_count())
                        .map(|v| if v == 0 { d - m.modified_edges().len() as i64 } else { 0 })
                        .collect(),
                ),
            };
            exhaustive.push((m.clone(), Twister((0..n as i64).collect()), sheaf, d));
        }
    }

    let mut rng = random::rng(config.seed ^ Suite::Roundtrip.salt());
    let mut random_cases = Vec::new();
    for _ in 0..config.instance_count {
        let x = random::random_stable_graph(&mut rng, config.graph_params());
        let m = random::random_modification(&mut rng, &x, config.chain_length_max, 2 * RANDOM_CHAIN_VERTICES);
        let c = Twister(
            random::random_multidegree(&mut rng, m.source().vertex_count(), (-3, 3))
                .values()
                .to_vec(),
        );
        let sheaf = SheafModel {
            noninvertible: random::random_subset(&mut rng, x.all_edges()),
            tilde: random::random_multidegree(&mut rng, x.vertex_count(), (-w, w)),
        };
        let d = rng.gen_range(-w..=w);
        random_cases.push((m, c, sheaf, d));
    }
    (
        run_instances(&exhaustive, check, repro),
        run_instances(&random_cases, check, repro),
    )
}

/// One repro file per reported failure: `(file name, contents)`.
pub fn repro_files(report: &VerifyReport) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for suite in &report.suites {
        for (k, failure) in suite.failures.iter().enumerate() {
            let mut record = BTreeMap::new();
            record.insert("suite", json!(suite.suite));
            record.insert("seed", json!(report.config.seed));
            record.insert("instance", failure.repro.clone());
            let text = serde_json::to_string_pretty(&record).expect("serializable");
            files.push((format!("repro-{}-{k}.json", suite.suite.name()), text));
        }
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suites: &[Suite]) -> VerifyConfig {
        VerifyConfig {
            suites: suites.to_vec(),
            max_vertices: 3,
            max_genus: 2,
            degree_window: 1,
            chain_length_max: 2,
            seed: 42,
            instance_count: 10,
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn family_sizes() {
        assert_eq!(sequences(2, (-1, 1)).len(), 9);
        assert_eq!(all_modifications(&catalog::theta(), 2).len(), 27);
        let m = Modification::new(catalog::theta(), [("e1", 2)]).unwrap();
        // 7 admissible length-2 chains times 9 base pairs
        assert_eq!(family_bundles(&m, (-1, 1), true, (-1, 1)).len(), 63);
    }

    #[test]
    fn chain_laplacian_matches_twist() {
        let m = Modification::new(catalog::theta(), [("e1", 3)]).unwrap();
        let c = [2, -1, 1];
        let mut coeffs = vec![0; m.source().vertex_count()];
        for (k, &v) in m.chains()[0].vertices.iter().enumerate() {
            coeffs[v] = c[k];
        }
        let delta = Twister(coeffs).multidegree(m.source()).unwrap();
        assert_eq!(m.chains()[0].degrees(&delta), chain_laplacian(&c));
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        let config = small(&Suite::ALL);
        let a = run(&config).unwrap();
        for s in &a.suites {
            assert!(s.passed, "{}: {:?}", s.suite, s.failures);
        }
        let b = run(&config).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn repro_files_carry_seed_and_instance() {
        let failure = Failure {
            message: "boom".into(),
            size: 1,
            repro: json!({ "degrees": [2, -1] }),
        };
        let report = VerifyReport {
            config: small(&[Suite::ChainCohomology]),
            passed: false,
            suites: vec![SuiteReport {
                suite: Suite::ChainCohomology,
                passed: false,
                exhaustive_cases: 1,
                random_cases: 0,
                failure_count: 1,
                failures: vec![failure],
            }],
        };
        let files = repro_files(&report);
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "repro-chain-cohomology-0.json");
        let record: Value = serde_json::from_str(&files[0].1).unwrap();
        assert_eq!(record["seed"], 42);
        assert_eq!(record["instance"]["degrees"], json!([2, -1]));
    }

    #[test]
    fn config_validation() {
        let mut c = small(&[Suite::Pushforward]);
        c.max_vertices = 0;
        assert!(run(&c).is_err());
        let mut c = small(&[]);
        c.suites.clear();
        assert!(run(&c).is_err());
    }
}
