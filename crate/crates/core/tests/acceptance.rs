//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! fails if any criterion fails.
//!
//! Each criterion compares the library against oracles written here from the
//! definitions: stability and balance are checked over every proper subset of
//! components (not only connected ones), pushforward degrees by brute force
//! over connected preimages, twists by a direct Laplacian.

use std::time::{Duration, Instant};

use nodal_core::chain::chain_h;
use nodal_core::correspondence::{certify_bijection, phi, CorrespondenceMode};
use nodal_core::modification::Modification;
use nodal_core::pushforward::pushforward_model;
use nodal_core::random::{self, GraphParams};
use nodal_core::sheaves::admissibility;
use nodal_core::stability::{
    canonical_polarization, check_balanced, check_bundle_stability, check_sheaf_stability, enumerate_balanced,
    enumerate_semistable_models, BalanceMode, Polarization, StabilityKind, StabilityMode,
};
use nodal_core::{catalog, stable_model, DualGraph, Multidegree, SheafModel, Twister};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("chain cohomology equivalence", criterion_1),
        ("pushforward degree and min-formula", criterion_2),
        ("twist invariance of pushforward", criterion_3),
        ("stability on modifications vs pushforward", criterion_4),
        ("balanced/semistable counts and bijection", criterion_5),
        ("structural invariants on random graphs", criterion_6),
        ("balanced vs semistable pushforward", criterion_7),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{name}]: {verdict} ({}; {:.2} s)",
            k + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!outcome.passed);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// oracles

fn all_sequences(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..=hi).map(move |d| {
                    let mut q = p.clone();
                    q.push(d);
                    q
                })
            })
            .collect();
    }
    out
}

fn interval_sums(d: &[i64]) -> Vec<i64> {
    let mut sums = Vec::new();
    for i in 0..d.len() {
        for j in i..d.len() {
            sums.push(d[i..=j].iter().sum());
        }
    }
    sums
}

fn chain_admissible(d: &[i64]) -> bool {
    interval_sums(d).iter().all(|s| (-1..=1).contains(s))
}

fn mask_contains(mask: u64, v: usize) -> bool {
    mask >> v & 1 == 1
}

fn genus(g: &DualGraph) -> i64 {
    g.edge_count() as i64 - g.vertex_count() as i64 + 1 + g.vertices().iter().map(|v| v.genus as i64).sum::<i64>()
}

/// `χ(O_Z) = |Z| - (nodes inside Z) - Σ g_v`.
fn chi(g: &DualGraph, z: u64) -> i64 {
    let members = (0..g.vertex_count()).filter(|&v| mask_contains(z, v));
    let internal = g
        .edges()
        .iter()
        .filter(|e| mask_contains(z, e.ends[0]) && mask_contains(z, e.ends[1]))
        .count();
    members.map(|v| 1 - g.vertex(v).genus as i64).sum::<i64>() - internal as i64
}

fn boundary(g: &DualGraph, z: u64) -> i64 {
    g.edges()
        .iter()
        .filter(|e| mask_contains(z, e.ends[0]) != mask_contains(z, e.ends[1]))
        .count() as i64
}

fn omega(g: &DualGraph, v: usize) -> i64 {
    let valence: usize = g
        .edges()
        .iter()
        .map(|e| (e.ends[0] == v) as usize + (e.ends[1] == v) as usize)
        .sum();
    2 * g.vertex(v).genus as i64 - 2 + valence as i64
}

fn connected(g: &DualGraph, set: u64) -> bool {
    if set == 0 {
        return false;
    }
    let start = set.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for e in g.edges() {
            for (a, b) in [(e.ends[0], e.ends[1]), (e.ends[1], e.ends[0])] {
                if a == v && mask_contains(set, b) && !mask_contains(seen, b) {
                    seen |= 1 << b;
                    stack.push(b);
                }
            }
        }
    }
    seen == set
}

fn proper_subsets(g: &DualGraph) -> impl Iterator<Item = u64> {
    let full = (1u64 << g.vertex_count()) - 1;
    1..full
}

fn degree_on(values: &[i64], z: u64) -> i64 {
    values
        .iter()
        .enumerate()
        .filter(|&(v, _)| mask_contains(z, v))
        .map(|(_, d)| d)
        .sum()
}

fn sheaf_degree_on(x: &DualGraph, i: &SheafModel, z: u64) -> i64 {
    let internal = i
        .noninvertible
        .iter()
        .filter(|&e| mask_contains(z, x.edge(e).ends[0]) && mask_contains(z, x.edge(e).ends[1]))
        .count();
    degree_on(i.tilde.values(), z) + internal as i64
}

#[derive(Clone, Copy)]
enum Mode {
    Semistable,
    Stable,
    Quasistable(usize),
}

/// Polarized stability over every proper subcurve, from `deg_Z` values.
fn stable_by_definition(g: &DualGraph, pol: &Polarization, mode: Mode, deg: impl Fn(u64) -> i64) -> bool {
    proper_subsets(g).all(|z| {
        let value = pol.rank * (deg(z) + chi(g, z)) + degree_on(pol.e.values(), z);
        match mode {
            Mode::Semistable => value >= 0,
            Mode::Stable => value > 0,
            Mode::Quasistable(v0) => value > 0 || (value == 0 && !mask_contains(z, v0)),
        }
    })
}

/// `E_d` on `x`: rank `2g - 2`, multidegree `(g - 1 - d) ω`.
fn canonical(x: &DualGraph, d: i64) -> Polarization {
    let g = genus(x);
    let e = (0..x.vertex_count()).map(|v| (g - 1 - d) * omega(x, v)).collect();
    Polarization {
        rank: 2 * g - 2,
        e: Multidegree::new(e),
    }
}

fn pullback(m: &Modification, pol: &Polarization) -> Polarization {
    let mut e = vec![0; m.source().vertex_count()];
    for x in 0..m.target().vertex_count() {
        e[m.lift(x)] = pol.e.get(x);
    }
    Polarization {
        rank: pol.rank,
        e: Multidegree::new(e),
    }
}

fn exceptional_mask(y: &DualGraph) -> u64 {
    (0..y.vertex_count())
        .filter(|&v| {
            let loops = y.edges().iter().any(|e| e.ends == [v, v]);
            y.vertex(v).genus == 0 && !loops && boundary(y, 1 << v) <= 2 && y.vertex_count() > 1
        })
        .fold(0, |acc, v| acc | 1 << v)
}

/// Degree 1 on exceptional components and, scaled by `2(2g-2)`,
/// `2(2g-2) d_Z ≥ 2 d ω_Z - (2g-2) k_Z` on every proper subcurve.
fn balanced_by_definition(y: &DualGraph, l: &[i64], stably: bool) -> bool {
    let g = genus(y);
    let d: i64 = l.iter().sum();
    let exc = exceptional_mask(y);
    if (0..y.vertex_count()).any(|v| mask_contains(exc, v) && l[v] != 1) {
        return false;
    }
    let full = (1u64 << y.vertex_count()) - 1;
    proper_subsets(y).all(|z| {
        let omega_z: i64 = (0..y.vertex_count())
            .filter(|&v| mask_contains(z, v))
            .map(|v| omega(y, v))
            .sum();
        let lhs = 2 * (2 * g - 2) * degree_on(l, z);
        let rhs = 2 * d * omega_z - (2 * g - 2) * boundary(y, z);
        lhs > rhs || (lhs == rhs && (!stably || (full & !z) & !exc == 0))
    })
}

/// Direct Laplacian twist: `Δ_v = Σ_{non-loop edges v-w} (c_w - c_v)`.
fn twist_by(y: &DualGraph, l: &[i64], c: &[i64]) -> Vec<i64> {
    let mut out = l.to_vec();
    for e in y.edges() {
        let [a, b] = e.ends;
        if a != b {
            out[a] += c[b] - c[a];
            out[b] += c[a] - c[b];
        }
    }
    out
}

/// `min deg(L|_U)` over connected `U` with `V1 ⊆ U ⊆ ψ^{-1}(W)`.
fn min_formula(m: &Modification, l: &[i64], w: u64) -> i64 {
    let x = m.target();
    let y = m.source();
    let mut core = 0u64;
    let mut optional = Vec::new();
    for v in 0..x.vertex_count() {
        if mask_contains(w, v) {
            core |= 1 << m.lift(v);
        }
    }
    for chain in m.chains() {
        let inside = (mask_contains(w, chain.ends[0]), mask_contains(w, chain.ends[1]));
        for &v in &chain.vertices {
            match inside {
                (true, true) => core |= 1 << v,
                (false, false) => {}
                _ => optional.push(v),
            }
        }
    }
    let mut best = i64::MAX;
    for pick in 0u64..(1 << optional.len()) {
        let mut u = core;
        for (k, &v) in optional.iter().enumerate() {
            if mask_contains(pick, k) {
                u |= 1 << v;
            }
        }
        if connected(y, u) {
            best = best.min(degree_on(l, u));
        }
    }
    best
}

fn modifications(x: &DualGraph, max_len: usize) -> Vec<Modification> {
    let options = all_sequences(x.edge_count(), 0, max_len as i64);
    options
        .into_iter()
        .map(|lens| {
            let lengths = lens
                .iter()
                .enumerate()
                .filter(|&(_, &l)| l > 0)
                .map(|(e, &l)| (e, l as usize))
                .collect();
            Modification::from_lengths(x.clone(), lengths).unwrap()
        })
        .collect()
}

/// Bundles on `m.source()`: chain degrees in `[-1, 1]` (optionally only
/// admissible chains), base degrees in `[-2, 2]`.
fn bundles(m: &Modification, admissible_only: bool) -> Vec<Vec<i64>> {
    let chain_vertices: Vec<usize> = m.chains().iter().flat_map(|c| c.vertices.clone()).collect();
    let mut out = Vec::new();
    for chain_part in all_sequences(chain_vertices.len(), -1, 1) {
        let mut l = vec![0; m.source().vertex_count()];
        for (&v, &d) in chain_vertices.iter().zip(&chain_part) {
            l[v] = d;
        }
        if admissible_only
            && !m
                .chains()
                .iter()
                .all(|c| chain_admissible(&c.vertices.iter().map(|&v| l[v]).collect::<Vec<_>>()))
        {
            continue;
        }
        for base in all_sequences(m.target().vertex_count(), -2, 2) {
            let mut full = l.clone();
            for (x, &d) in base.iter().enumerate() {
                full[m.lift(x)] = d;
            }
            out.push(full);
        }
    }
    out
}

fn catalog_modifications() -> Vec<Modification> {
    [catalog::theta(), catalog::banana11()]
        .iter()
        .flat_map(|x| modifications(x, 2))
        .collect()
}

fn report(cases: usize, mismatches: Vec<String>, limit: Option<(Duration, Duration)>) -> Outcome {
    let mut detail = format!("{cases} cases, {} mismatches", mismatches.len());
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    let mut passed = mismatches.is_empty() && cases > 0;
    if let Some((elapsed, max)) = limit {
        detail.push_str(&format!(
            "; {:.2} s of {} s allowed",
            elapsed.as_secs_f64(),
            max.as_secs()
        ));
        passed &= elapsed < max;
    }
    Outcome { passed, detail }
}

// ---------------------------------------------------------------------------
// criteria

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for len in 1..=4 {
        for d in all_sequences(len, -3, 3) {
            cases += 1;
            let sums = interval_sums(&d);
            let h = chain_h(&d, false).unwrap();
            let hp = chain_h(&d, true).unwrap();
            if (h.h1 == 0) != sums.iter().all(|&s| s >= -1) {
                mismatches.push(format!("{d:?}: h1 = {}", h.h1));
            }
            if (hp.h0 == 0) != sums.iter().all(|&s| s <= 1) {
                mismatches.push(format!("{d:?}: punctured h0 = {}", hp.h0));
            }
        }
    }
    if cases != 2800 {
        mismatches.push(format!("expected 7 + 49 + 343 + 2401 = 2800 sequences, ran {cases}"));
    }
    report(cases, mismatches, Some((start.elapsed(), Duration::from_secs(10))))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for m in catalog_modifications() {
        let x = m.target();
        let connected_w: Vec<u64> = (1..1u64 << x.vertex_count()).filter(|&w| connected(x, w)).collect();
        for l in bundles(&m, true) {
            let model = pushforward_model(&m, &Multidegree::new(l.clone())).unwrap();
            let total: i64 = l.iter().sum();
            if model.tilde.total() + model.noninvertible.len() as i64 != total {
                mismatches.push(format!("{l:?}: degree {} vs {total}", model.degree()));
            }
            for &w in &connected_w {
                cases += 1;
                let expected = min_formula(&m, &l, w);
                let got = sheaf_degree_on(x, &model, w);
                if got != expected {
                    mismatches.push(format!(
                        "{l:?} on {:?}, W = {w:b}: model {got}, min-formula {expected}",
                        m.lengths()
                    ));
                }
            }
        }
    }
    report(cases, mismatches, Some((start.elapsed(), Duration::from_secs(60))))
}

fn criterion_3() -> Outcome {
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for m in catalog_modifications() {
        let y = m.source();
        let chain_vertices: Vec<usize> = m.chains().iter().flat_map(|c| c.vertices.clone()).collect();
        let twisters: Vec<Vec<i64>> = all_sequences(chain_vertices.len(), -2, 2)
            .into_iter()
            .map(|coeffs| {
                let mut c = vec![0; y.vertex_count()];
                for (&v, &k) in chain_vertices.iter().zip(&coeffs) {
                    c[v] = k;
                }
                c
            })
            .collect();
        // Admissibility only sees chain degrees, so pairs are filtered on one
        // base assignment and then run against all of them.
        let admissible = |l: &[i64]| {
            m.chains()
                .iter()
                .all(|c| chain_admissible(&c.vertices.iter().map(|&v| l[v]).collect::<Vec<_>>()))
        };
        let family = bundles(&m, true);
        let bases = all_sequences(m.target().vertex_count(), -2, 2).len();
        for chunk in family.chunks(bases) {
            let probe = &chunk[0];
            let keep: Vec<&Vec<i64>> = twisters.iter().filter(|c| admissible(&twist_by(y, probe, c))).collect();
            for l in chunk {
                let model = pushforward_model(&m, &Multidegree::new(l.clone())).unwrap();
                for c in &keep {
                    cases += 1;
                    let twisted = twist_by(y, l, c);
                    match pushforward_model(&m, &Multidegree::new(twisted.clone())) {
                        Ok(other) if other == model => {}
                        Ok(other) => mismatches.push(format!("{l:?} twisted by {c:?}: {model:?} vs {other:?}")),
                        Err(e) => mismatches.push(format!("{l:?} twisted by {c:?}: {e}")),
                    }
                }
            }
        }
    }
    report(cases, mismatches, None)
}

fn criterion_4() -> Outcome {
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for m in catalog_modifications() {
        let (x, y) = (m.target(), m.source());
        for l in bundles(&m, false) {
            let d: i64 = l.iter().sum();
            let pol_x = canonical(x, d);
            let pol_y = pullback(&m, &pol_x);
            let bundle = Multidegree::new(l.clone());
            let flags = admissibility(&m, &bundle).unwrap();
            let model = flags.admissible.then(|| pushforward_model(&m, &bundle).unwrap());
            let sheaf = |mode| {
                model
                    .as_ref()
                    .is_some_and(|i| stable_by_definition(x, &pol_x, mode, |z| sheaf_degree_on(x, i, z)))
            };
            let on_y = |mode| stable_by_definition(y, &pol_y, mode, |z| degree_on(&l, z));

            let mut check = |what: &str, lhs: bool, rhs: bool| {
                cases += 1;
                if lhs != rhs {
                    mismatches.push(format!(
                        "{what} for {l:?} over {:?}: bundle {lhs}, pushforward side {rhs}",
                        m.lengths()
                    ));
                }
            };
            check(
                "semistable",
                on_y(Mode::Semistable),
                flags.admissible && sheaf(Mode::Semistable),
            );
            check("stable", on_y(Mode::Stable), flags.invertible && sheaf(Mode::Stable));
            for p in 0..x.vertex_count() {
                check(
                    "quasistable",
                    on_y(Mode::Quasistable(m.lift(p))),
                    flags.negatively && sheaf(Mode::Quasistable(p)),
                );
            }
            // the library agrees with the definition
            let lib = check_bundle_stability(y, &bundle, &pol_y, StabilityMode::Semistable).unwrap();
            check("library bundle semistability", lib, on_y(Mode::Semistable));
        }
    }
    report(cases, mismatches, None)
}

fn criterion_5() -> Outcome {
    let mut cases = 0;
    let mut mismatches = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, x, expected) in [
        ("theta", catalog::theta(), 12usize),
        ("banana11", catalog::banana11(), 1),
    ] {
        let start = Instant::now();
        let report = certify_bijection(&x, 2, CorrespondenceMode::Semistable).unwrap();
        let balanced = enumerate_balanced(&x, 2, BalanceMode::Balanced).unwrap();
        let models = enumerate_semistable_models(&x, 2, StabilityKind::Semistable).unwrap();
        slowest = slowest.max(start.elapsed());
        cases += 1;
        if (report.balanced_count, report.semistable_count, report.bijection) != (expected, expected, true) {
            mismatches.push(format!("{name}: report {report:?}"));
        }

        // independent enumeration from the definitions over a generous box
        let pol = canonical(&x, 2);
        let mut brute_models = Vec::new();
        let mut brute_balanced = 0;
        for n in x.all_edges().subsets() {
            for tilde in all_sequences(x.vertex_count(), -6, 6) {
                if tilde.iter().sum::<i64>() + n.len() as i64 != 2 {
                    continue;
                }
                let i = SheafModel {
                    noninvertible: n,
                    tilde: Multidegree::new(tilde),
                };
                if stable_by_definition(&x, &pol, Mode::Semistable, |z| sheaf_degree_on(&x, &i, z)) {
                    brute_models.push(i);
                }
            }
            let m = Modification::small(x.clone(), n).unwrap();
            for base in all_sequences(x.vertex_count(), -6, 6) {
                if base.iter().sum::<i64>() + n.len() as i64 != 2 {
                    continue;
                }
                let mut l = vec![1; m.source().vertex_count()];
                for (v, &d) in base.iter().enumerate() {
                    l[m.lift(v)] = d;
                }
                brute_balanced += usize::from(balanced_by_definition(m.source(), &l, false));
            }
        }
        brute_models.sort();
        let mut sorted = models.clone();
        sorted.sort();
        if sorted != brute_models || brute_balanced != expected || balanced.len() != expected {
            mismatches.push(format!(
                "{name}: library {} models / {} balanced, definition {} / {brute_balanced}",
                models.len(),
                balanced.len(),
                brute_models.len()
            ));
        }
    }
    let b = catalog::banana11();
    let unique = SheafModel::from_ids(&b, [], [("v", 1), ("w", 1)]).unwrap();
    let pol = canonical_polarization(&b, 2).unwrap();
    cases += 1;
    if enumerate_semistable_models(&b, 2, StabilityKind::Semistable).unwrap() != [unique.clone()]
        || !check_sheaf_stability(&b, &unique, &pol, StabilityMode::Stable).unwrap()
    {
        mismatches.push("banana11: unique model is not (∅, (1, 1)) or is not stable".into());
    }
    report(cases, mismatches, Some((slowest, Duration::from_secs(5))))
}

fn criterion_6() -> Outcome {
    let mut rng = random::rng(20_261_015);
    let params = GraphParams {
        max_vertices: 8,
        max_genus: 3,
        max_extra_edges: 4,
    };
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for k in 0..1000 {
        let any = random::random_graph(&mut rng, params);
        let x = random::random_stable_graph(&mut rng, params);
        let m = random::random_modification(&mut rng, &x, 3, 24);
        let y = m.source();
        cases += 1;

        for g in [&any, &x, y] {
            let total: i64 = (0..g.vertex_count()).map(|v| omega(g, v)).sum();
            if total != 2 * genus(g) - 2 {
                mismatches.push(format!("instance {k}: omega total {total}, genus {}", genus(g)));
            }
        }
        let c: Vec<i64> = (0..any.vertex_count()).map(|v| (v as i64 * 7 + k) % 5 - 2).collect();
        let twisted = twist_by(&any, &vec![0; any.vertex_count()], &c);
        let lib = Twister(c.clone()).multidegree(&any).unwrap();
        if twisted.iter().sum::<i64>() != 0 || lib.values() != twisted.as_slice() {
            mismatches.push(format!(
                "instance {k}: twister {c:?} gives {twisted:?}, library {:?}",
                lib.values()
            ));
        }
        match stable_model(y) {
            Ok(back) if back == m => {}
            Ok(_) => mismatches.push(format!("instance {k}: stable model differs from the modification")),
            Err(e) => mismatches.push(format!("instance {k}: stable model failed: {e}")),
        }
        let pulled = m.pullback_multidegree(&x.omega_multidegree()).unwrap();
        let omega_y: Vec<i64> = (0..y.vertex_count()).map(|v| omega(y, v)).collect();
        if pulled.values() != omega_y.as_slice() {
            mismatches.push(format!(
                "instance {k}: pullback of omega differs from omega of the source"
            ));
        }
    }
    report(cases, mismatches, None)
}

fn criterion_7() -> Outcome {
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for x in [catalog::theta(), catalog::banana11()] {
        for n in x.all_edges().subsets() {
            let m = Modification::small(x.clone(), n).unwrap();
            let y = m.source();
            let chain_mask: Vec<i64> = (0..y.vertex_count())
                .map(|v| m.contracted().contains(v) as i64)
                .collect();
            for d in -3..=3 {
                let pol = canonical(&x, d);
                let pol_y = pullback(&m, &pol);
                for base in all_sequences(x.vertex_count(), -6, 6) {
                    if base.iter().sum::<i64>() + n.len() as i64 != d {
                        continue;
                    }
                    let mut l = vec![1; y.vertex_count()];
                    for (v, &b) in base.iter().enumerate() {
                        l[m.lift(v)] = b;
                    }
                    cases += 1;
                    let bundle = Multidegree::new(l.clone());
                    let sheaf = pushforward_model(&m, &bundle).unwrap();
                    let balanced = balanced_by_definition(y, &l, false);
                    let stably = balanced_by_definition(y, &l, true);
                    let ss = stable_by_definition(&x, &pol, Mode::Semistable, |z| sheaf_degree_on(&x, &sheaf, z));
                    let st = stable_by_definition(&x, &pol, Mode::Stable, |z| sheaf_degree_on(&x, &sheaf, z));
                    let label = format!("{l:?} on {:?}, d = {d}", m.lengths());
                    if balanced != ss {
                        mismatches.push(format!("{label}: balanced {balanced}, pushforward semistable {ss}"));
                    }
                    if stably != st {
                        mismatches.push(format!("{label}: stably balanced {stably}, pushforward stable {st}"));
                    }
                    if check_balanced(y, &bundle, BalanceMode::Balanced).unwrap() != balanced
                        || check_balanced(y, &bundle, BalanceMode::StablyBalanced).unwrap() != stably
                    {
                        mismatches.push(format!("{label}: library balance check disagrees with the definition"));
                    }
                    if balanced {
                        if let Ok((_, image)) = phi(&m, &bundle) {
                            if image != sheaf {
                                mismatches.push(format!("{label}: phi differs from the pushforward"));
                            }
                        }
                    }

                    // I = L ⊗ O(Σ E): negatively admissible, same pushforward,
                    // and semistable on Y exactly when L is balanced.
                    let shifted = Multidegree::new(twist_by(y, &l, &chain_mask));
                    let flags = admissibility(&m, &shifted).unwrap();
                    if !flags.negatively || pushforward_model(&m, &shifted).as_ref() != Ok(&sheaf) {
                        mismatches.push(format!(
                            "{label}: twist by the exceptional components changes the pushforward"
                        ));
                    }
                    let shifted_ss =
                        stable_by_definition(y, &pol_y, Mode::Semistable, |z| degree_on(shifted.values(), z));
                    if shifted_ss != balanced {
                        mismatches.push(format!(
                            "{label}: twisted bundle semistable {shifted_ss}, balanced {balanced}"
                        ));
                    }
                }
            }
        }
    }
    report(cases, mismatches, None)
}
