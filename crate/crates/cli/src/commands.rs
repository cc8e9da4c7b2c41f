use std::fs;
use std::path::Path;
use std::process::ExitCode;

use nodal_core::correspondence::{certify_bijection, phi, phi_inverse, CorrespondenceMode};
use nodal_core::io::{self, CurveFile, ModificationFile, PolarizationFile, SheafModelFile};
use nodal_core::pushforward::{pushforward_degree_oracle, pushforward_diagnostics, pushforward_model};
use nodal_core::sheaves::admissibility;
use nodal_core::stability::{
    balance_report, canonical_polarization, check_balanced, check_bundle_stability, check_sheaf_stability, check_ssi2,
    enumerate_balanced, enumerate_semistable_models, BalanceMode, InequalityReport, StabilityKind, StabilityMode,
};
use nodal_core::verify::{self, VerifyConfig};
use nodal_core::{chain::chain_h, stable_model, DualGraph, Modification};
use serde_json::{json, Value};

use crate::{CheckStability, Command, EnumerateMode, StabilityArg, VerifyArgs};

type Outcome = Result<(Value, ExitCode), String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> nodal_core::Result<T>) -> Result<T, String> {
    parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn curve(path: &Path) -> Result<DualGraph, String> {
    load(path, io::curve_from_json)
}

fn modification(path: &Path) -> Result<Modification, String> {
    load(path, io::modification_from_json)
}

fn ids(graph: &DualGraph, set: nodal_core::BitSet) -> Vec<String> {
    set.iter().map(|v| graph.vertex(v).id.clone()).collect()
}

fn edge_ids(graph: &DualGraph, set: nodal_core::BitSet) -> Vec<String> {
    set.iter().map(|e| graph.edge(e).id.clone()).collect()
}

fn inequality_json(graph: &DualGraph, report: &InequalityReport) -> Value {
    json!({
        "holds": report.holds(),
        "strict": report.holds_strictly(),
        "equality_sites": report.equality_sites().map(|s| ids(graph, s.members)).collect::<Vec<_>>(),
        "violations": report.violations().map(|s| json!({
            "subcurve": ids(graph, s.members),
            "degree": s.degree,
            "bound": s.bound.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn ok(value: Value) -> Outcome {
    Ok((value, ExitCode::SUCCESS))
}

pub fn emit(value: &Value, output: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize") + "\n";
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(command: Command) -> Outcome {
    let e = |err: nodal_core::Error| err.to_string();
    match command {
        Command::Classify { curve: path } => {
            let g = curve(&path)?;
            let class = g.classify();
            let chains: Vec<Vec<String>> = if class.is_semistable() {
                g.maximal_exceptional_chains()
                    .map_err(e)?
                    .into_iter()
                    .map(|c| c.vertices.iter().map(|&v| g.vertex(v).id.clone()).collect())
                    .collect()
            } else {
                Vec::new()
            };
            ok(json!({
                "genus": g.genus(),
                "class": class,
                "chains": chains,
                "omega": g.omega_multidegree().to_map(&g),
            }))
        }

        Command::StableModel { curve: path } => {
            let m = stable_model(&curve(&path)?).map_err(e)?;
            ok(serde_json::to_value(ModificationFile::from(m)).expect("serializable"))
        }

        Command::Modify { curve: path, edges } => {
            let x = curve(&path)?;
            let m = Modification::new(x, edges.iter().map(|(id, len)| (id.as_str(), *len))).map_err(e)?;
            ok(json!({
                "modification": ModificationFile::from(m.clone()),
                "source": CurveFile::from(m.source().clone()),
            }))
        }

        Command::Pushforward {
            modification: mpath,
            multidegree,
        } => {
            let m = modification(&mpath)?;
            let l = load(&multidegree, |t| io::multidegree_from_json(m.source(), t))?;
            let flags = admissibility(&m, &l).map_err(e)?;
            let diag = pushforward_diagnostics(&m, &l).map_err(e)?;
            let mut out = json!({
                "admissibility": flags,
                "has_torsion": diag.has_torsion,
                "degree_drops": diag.degree_drops,
                "noninvertible_edges": edge_ids(m.target(), diag.noninvertible),
            });
            if flags.admissible {
                let x = m.target();
                let model = pushforward_model(&m, &l).map_err(e)?;
                let mut agrees = true;
                for w in x.connected_subcurves(false) {
                    agrees &= pushforward_degree_oracle(&m, &l, &w).map_err(e)? == model.degree_on(x, w.members());
                }
                out["model"] = serde_json::to_value(SheafModelFile::from_model(x, &model)).expect("serializable");
                out["oracle_agrees"] = json!(agrees);
            }
            ok(out)
        }

        Command::ChainH { degrees, punctured } => {
            let h = chain_h(&degrees, punctured).map_err(e)?;
            ok(json!({ "h0": h.h0, "h1": h.h1 }))
        }

        Command::CheckStability(args) => check_stability(args),

        Command::CheckBalanced {
            curve: path,
            multidegree,
            stably,
        } => {
            let y = curve(&path)?;
            let l = load(&multidegree, |t| io::multidegree_from_json(&y, t))?;
            let mode = if stably {
                BalanceMode::StablyBalanced
            } else {
                BalanceMode::Balanced
            };
            let verdict = check_balanced(&y, &l, mode).map_err(e)?;
            let report = balance_report(&y, &l).map_err(e)?;
            ok(json!({
                "mode": if stably { "stably-balanced" } else { "balanced" },
                "verdict": verdict,
                "basic_inequality": inequality_json(&y, &report),
            }))
        }

        Command::Phi {
            modification: mpath,
            multidegree,
        } => {
            let m = modification(&mpath)?;
            let l = load(&multidegree, |t| io::multidegree_from_json(m.source(), t))?;
            let (x, sheaf) = phi(&m, &l).map_err(e)?;
            ok(json!({ "target": CurveFile::from(x.clone()), "sheaf": SheafModelFile::from_model(&x, &sheaf) }))
        }

        Command::PhiInv { curve: path, sheaf } => {
            let x = curve(&path)?;
            let i = load(&sheaf, |t| io::sheaf_from_json(&x, t))?;
            let (m, l) = phi_inverse(&x, &i).map_err(e)?;
            ok(json!({ "modification": ModificationFile::from(m.clone()), "multidegree": l.to_map(m.source()) }))
        }

        Command::Enumerate {
            curve: path,
            degree,
            mode,
        } => {
            let x = curve(&path)?;
            let items: Vec<Value> = match mode {
                EnumerateMode::Semistable | EnumerateMode::Stable => {
                    let kind = if matches!(mode, EnumerateMode::Stable) {
                        StabilityKind::Stable
                    } else {
                        StabilityKind::Semistable
                    };
                    enumerate_semistable_models(&x, degree, kind)
                        .map_err(e)?
                        .iter()
                        .map(|i| serde_json::to_value(SheafModelFile::from_model(&x, i)).expect("serializable"))
                        .collect()
                }
                EnumerateMode::Balanced | EnumerateMode::StablyBalanced => {
                    let balance = if matches!(mode, EnumerateMode::StablyBalanced) {
                        BalanceMode::StablyBalanced
                    } else {
                        BalanceMode::Balanced
                    };
                    enumerate_balanced(&x, degree, balance)
                        .map_err(e)?
                        .into_iter()
                        .map(|(m, l)| {
                            json!({
                                "modified_edges": edge_ids(m.target(), m.modified_edges()),
                                "multidegree": l.to_map(m.source()),
                            })
                        })
                        .collect()
                }
            };
            ok(json!({ "count": items.len(), "items": items }))
        }

        Command::Certify {
            curve: path,
            degree,
            stable,
        } => {
            let x = curve(&path)?;
            let mode = if stable {
                CorrespondenceMode::Stable
            } else {
                CorrespondenceMode::Semistable
            };
            let report = certify_bijection(&x, degree, mode).map_err(e)?;
            let status = if report.bijection {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            Ok((serde_json::to_value(report).expect("serializable"), status))
        }

        Command::Verify(args) => verify_command(args),
    }
}

fn check_stability(args: CheckStability) -> Outcome {
    let e = |err: nodal_core::Error| err.to_string();
    let g = curve(&args.curve)?;
    let mode = match args.mode {
        StabilityArg::Semistable => StabilityMode::Semistable,
        StabilityArg::Stable => StabilityMode::Stable,
        StabilityArg::Quasistable => {
            let base = args.base.as_deref().ok_or("--mode quasistable needs --base")?;
            StabilityMode::Quasistable(g.require_vertex(base).map_err(e)?)
        }
    };

    let (degree, sheaf, bundle) = if args.bundle {
        let l = load(&args.object, |t| io::multidegree_from_json(&g, t))?;
        (l.total(), None, Some(l))
    } else {
        let i = load(&args.object, |t| io::sheaf_from_json(&g, t))?;
        (i.degree(), Some(i), None)
    };
    let pol = match &args.polarization {
        Some(path) => load(path, |t| io::polarization_from_json(&g, t))?,
        None => canonical_polarization(&g, degree).map_err(e)?,
    };

    let verdict = match (&sheaf, &bundle) {
        (Some(i), _) => check_sheaf_stability(&g, i, &pol, mode),
        (_, Some(l)) => check_bundle_stability(&g, l, &pol, mode),
        _ => unreachable!(),
    }
    .map_err(e)?;

    let mut out = json!({
        "verdict": verdict,
        "degree": degree,
        "polarization": PolarizationFile::from_polarization(&g, &pol),
    });
    if let (Some(i), None) = (&sheaf, &args.polarization) {
        let report = check_ssi2(&g, i, degree).map_err(e)?;
        out["degree_inequality"] = inequality_json(&g, &report);
    }
    Ok((out, ExitCode::SUCCESS))
}

fn verify_command(args: VerifyArgs) -> Outcome {
    let config = VerifyConfig {
        suites: if args.suites.is_empty() {
            verify::Suite::ALL.to_vec()
        } else {
            args.suites
        },
        max_vertices: args.max_vertices,
        max_genus: args.max_genus,
        degree_window: args.degree_window,
        chain_length_max: args.chain_length_max,
        seed: args.seed,
        instance_count: args.instance_count,
    };
    let report = verify::run(&config).map_err(|e| e.to_string())?;
    for suite in &report.suites {
        eprintln!(
            "{:<17} {}  exhaustive {:>8}  random {:>6}  failures {}",
            suite.suite.name(),
            if suite.passed { "pass" } else { "FAIL" },
            suite.exhaustive_cases,
            suite.random_cases,
            suite.failure_count
        );
    }
    let files = verify::repro_files(&report);
    if !files.is_empty() {
        fs::create_dir_all(&args.repro_dir).map_err(|e| format!("{}: {e}", args.repro_dir.display()))?;
        for (name, text) in files {
            let path = args.repro_dir.join(name);
            fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
    }
    let status = if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    };
    Ok((serde_json::to_value(report).expect("serializable"), status))
}
