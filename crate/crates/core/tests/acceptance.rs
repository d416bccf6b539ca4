//! End-to-end acceptance run over the shipped scenarios. Prints one line per
//! criterion and fails if any criterion fails.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use currents_lab::oracles::plane_curve_multiplicity;
use currents_lab::poly::Poly;
use currents_lab::runner::{run_world, Report, RunOptions, TaskReport};
use currents_lab::scenario::{parse, resolve, World};

fn world(name: &str) -> World {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    resolve(parse(&text).unwrap()).unwrap()
}

fn run(name: &str) -> (World, Report) {
    let w = world(name);
    let r = run_world(&w, &RunOptions { seed: None, serial: false, tol: None });
    (w, r)
}

fn task<'a>(r: &'a Report, name: &str) -> &'a TaskReport {
    r.tasks.iter().find(|t| t.name == name).unwrap_or_else(|| panic!("{}: no task {name}", r.scenario))
}

fn value(t: &TaskReport) -> Result<f64, String> {
    t.extrapolated.ok_or_else(|| format!("{}: no value ({})", t.name, t.message.clone().unwrap_or_default()))
}

fn sup(w: &World, form: &str) -> f64 {
    w.forms[form].sup_norm(9)
}

fn relative_match(t: &TaskReport, tol: f64) -> Result<String, String> {
    let v = value(t)?;
    let o = t.oracle.ok_or_else(|| format!("{}: no oracle", t.name))?;
    let rel = (v - o).abs() / o.abs();
    if rel <= tol {
        Ok(format!("{} {v:.10} vs {o:.10} (rel {rel:.1e})", t.name))
    } else {
        Err(format!("{} {v:.10} vs {o:.10}: rel {rel:.1e} > {tol:.0e}", t.name))
    }
}

fn within_sup(t: &TaskReport, phi_sup: f64, tol: f64) -> Result<String, String> {
    let v = value(t)?;
    if v.abs() < tol * phi_sup {
        Ok(format!("{} |{v:.2e}| < {tol:.0e}·{phi_sup:.3}", t.name))
    } else {
        Err(format!("{} |{v:.2e}| ≥ {tol:.0e}·{phi_sup:.3}", t.name))
    }
}

fn residual_below(t: &TaskReport, tol: f64) -> Result<String, String> {
    let r = t.residual.ok_or_else(|| format!("{}: no residual ({})", t.name, t.message.clone().unwrap_or_default()))?;
    if r < tol {
        Ok(format!("{} residual {r:.1e}", t.name))
    } else {
        Err(format!("{} residual {r:.1e} ≥ {tol:.0e}", t.name))
    }
}

fn runtime_below(t: &TaskReport, limit: f64) -> Result<String, String> {
    if t.seconds < limit {
        Ok(String::new())
    } else {
        Err(format!("{} took {:.1}s (limit {limit}s)", t.name, t.seconds))
    }
}

fn all(parts: Vec<Result<String, String>>) -> Result<String, String> {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for p in parts {
        match p {
            Ok(s) if !s.is_empty() => ok.push(s),
            Ok(_) => {}
            Err(e) => bad.push(e),
        }
    }
    if bad.is_empty() {
        Ok(ok.join("; "))
    } else {
        Err(bad.join("; "))
    }
}

fn transversality() -> Result<String, String> {
    let (_, r) = run("transversal_lines");
    let names = ["axes-radial", "axes-poly4", "axes-two-chart"];
    let mut parts: Vec<_> = names.iter().map(|n| relative_match(task(&r, n), 1e-3)).collect();
    parts.extend(names.iter().map(|n| runtime_below(task(&r, n), 30.0)));
    let vals: Vec<f64> = names.iter().filter_map(|n| task(&r, n).extrapolated).collect();
    let mut spread = 0.0f64;
    for a in &vals {
        for b in &vals {
            spread = spread.max((a - b).abs() / a.abs());
        }
    }
    parts.push(if vals.len() == 3 && spread < 5e-4 {
        Ok(format!("spread {spread:.1e}"))
    } else {
        Err(format!("spread {spread:.1e} ≥ 5e-4"))
    });
    all(parts)
}

fn tangency(k2: bool) -> Result<String, String> {
    let (w, r) = run("tangency");
    let phi = sup(&w, "phi");
    if k2 {
        let t = task(&r, "k2-vanishes");
        all(vec![within_sup(t, phi, 1e-4), runtime_below(t, 60.0)])
    } else {
        let t = task(&r, "k3-point-mass");
        all(vec![relative_match(t, 5e-3), runtime_below(t, 60.0)])
    }
}

fn data_dependence() -> Result<String, String> {
    let start = Instant::now();
    let (w, r) = run("parabola_self");
    let (a, b) = (task(&r, "self-skewed-a"), task(&r, "self-skewed-b"));
    let mut parts = vec![relative_match(a, 1e-2), relative_match(b, 1e-2)];
    if let (Some(va), Some(vb)) = (a.extrapolated, b.extrapolated) {
        let err = a.error_estimate.unwrap_or(f64::INFINITY) + b.error_estimate.unwrap_or(f64::INFINITY);
        let gap = (va - vb).abs();
        parts.push(if gap > 10.0 * err {
            Ok(format!("gap {gap:.3} vs errors {err:.1e}"))
        } else {
            Err(format!("gap {gap:.3e} ≤ 10 × {err:.1e}"))
        });
    }
    parts.push(within_sup(task(&r, "self-symmetric"), sup(&w, "phi"), 1e-3));
    let secs = start.elapsed().as_secs_f64();
    parts.push(if secs < 120.0 { Ok(format!("{secs:.0}s")) } else { Err(format!("{secs:.0}s ≥ 120s")) });
    all(parts)
}

fn complex_proper() -> Result<String, String> {
    let (_, r) = run("complex_parabola");
    let t = task(&r, "multiplicity-two");
    let p = Poly::from_terms(2, vec![(vec![0, 1], 1.0), (vec![2, 0], -1.0)]);
    let q = Poly::from_terms(2, vec![(vec![0, 1], 1.0)]);
    let mult = plane_curve_multiplicity(&p, &q, &[0.0, 0.0]).map_err(|e| e.to_string())?;
    all(vec![
        relative_match(t, 5e-2),
        if mult == 2 { Ok("multiplicity 2".into()) } else { Err(format!("multiplicity {mult}")) },
        runtime_below(t, 600.0),
    ])
}

fn complex_excess() -> Result<String, String> {
    let (w, r) = run("complex_line_self");
    within_sup(task(&r, "self-vanishes"), sup(&w, "phi"), 1e-4)
}

fn homotopy() -> Result<String, String> {
    let (_, r) = run("homotopy");
    let per_eps = |name: &str| -> Result<String, String> {
        let t = task(&r, name);
        let forms = t.details["forms"].as_u64().unwrap_or(0);
        let worst: Vec<f64> = t.details["per_eps_max"]
            .as_array()
            .map(|v| v.iter().filter_map(|x| x.as_f64()).collect())
            .unwrap_or_default();
        if forms == 10 && !worst.is_empty() && worst.iter().all(|&x| x < 1e-6) {
            Ok(format!("{name} max {:.1e} over {} eps", worst.iter().cloned().fold(0.0, f64::max), worst.len()))
        } else {
            Err(format!("{name}: {forms} forms, per-eps maxima {worst:?}"))
        }
    };
    all(vec![per_eps("segment"), per_eps("lens")])
}

fn commutativity_associativity() -> Result<String, String> {
    let (_, r) = run("transversal_lines");
    all(vec![residual_below(task(&r, "axes-commute"), 1e-5), residual_below(task(&r, "axes-associate"), 1e-5)])
}

fn projection() -> Result<String, String> {
    let (_, r) = run("projection");
    let cyl = task(&r, "cylinder-kernel");
    let points = cyl.details["points"].as_u64().unwrap_or(0);
    all(vec![
        residual_below(task(&r, "segment-vs-line"), 1e-5),
        residual_below(task(&r, "diagonal-vs-segment"), 1e-5),
        residual_below(cyl, 1e-12),
        if points >= 100 { Ok(format!("{points} points")) } else { Err(format!("only {points} points")) },
    ])
}

fn kronecker() -> Result<String, String> {
    let (_, r) = run("kronecker");
    let check = |name: &str, expect: f64| -> Result<String, String> {
        let t = task(&r, name);
        let v = value(t)?;
        let o = t.oracle.ok_or("no oracle")?;
        let n = v.round();
        if n == o && n == expect && (v - n).abs() < 0.1 {
            Ok(format!("{name} {v:.6} → {n}"))
        } else {
            Err(format!("{name} {v:.6}, oracle {o}, expected {expect}"))
        }
    };
    all(vec![check("two-lenses", 0.0), check("single-crossing", 1.0)])
}

fn correspondence() -> Result<String, String> {
    let (_, r) = run("correspondence");
    all(["push-lens", "pull-segment", "diagonal-identity"].iter().map(|n| relative_match(task(&r, n), 1e-5)).collect())
}

fn properties() -> Result<String, String> {
    let mut failures = Vec::new();
    let seeds = 0..16u64;
    for (name, check) in common::PROPERTIES {
        for s in seeds.clone() {
            if let Err(e) = check(s) {
                failures.push(format!("{name}: {e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{} properties × {} seeds", common::PROPERTIES.len(), seeds.count()))
    } else {
        Err(failures.join("; "))
    }
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> Result<String, String>)> = vec![
        ("transversality, three data", transversality),
        ("tangency k = 2 vanishes", || tangency(true)),
        ("tangency k = 3 point mass", || tangency(false)),
        ("parabola self-intersection", data_dependence),
        ("complex proper intersection", complex_proper),
        ("complex excess intersection", complex_excess),
        ("homotopy formula", homotopy),
        ("commutativity, associativity", commutativity_associativity),
        ("projection formula", projection),
        ("kronecker indices", kronecker),
        ("correspondences", correspondence),
        ("property suite", properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(msg) => report(&format!("PASS {:>2} {name:<30} [{secs:6.1}s] {msg}", i + 1)),
            Err(msg) => {
                report(&format!("FAIL {:>2} {name:<30} [{secs:6.1}s] {msg}", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

/// Writes past the test harness capture so every criterion line is visible.
fn report(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}
