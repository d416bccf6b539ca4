use std::path::PathBuf;

use currents_lab::runner::{run_file, RunOptions};
use currents_lab::scenario::{parse, resolve};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn every_shipped_scenario_resolves() {
    let mut n = 0;
    for e in std::fs::read_dir(dir()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "json") {
            let text = std::fs::read_to_string(&p).unwrap();
            let w = resolve(parse(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display())))
                .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert!(!w.scenario.comment.is_empty(), "{} has no comment", p.display());
            assert!(!w.scenario.tasks.is_empty());
            n += 1;
        }
    }
    assert!(n >= 10, "only {n} scenarios");
}

#[test]
fn quick_scenarios_pass() {
    let opts = RunOptions { seed: None, serial: false, tol: None };
    for name in ["kronecker", "slice", "lebesgue", "tangency"] {
        let r = run_file(&dir().join(format!("{name}.json")), &opts).unwrap();
        for t in &r.tasks {
            assert!(t.pass, "{name}/{}: {:?} {:?}", t.name, t.residual, t.message);
        }
    }
}

#[test]
fn lebesgue_verdicts() {
    let r = run_file(&dir().join("lebesgue.json"), &RunOptions { seed: None, serial: true, tol: None }).unwrap();
    let flag = |name: &str, key: &str| r.tasks.iter().find(|t| t.name == name).unwrap().details[key].as_bool().unwrap();
    assert!(!flag("horizontal", "suspect_atom") && !flag("horizontal", "integrable_singularity"));
    assert!(flag("vertical", "suspect_atom"));
    assert!(flag("parabola-fold", "integrable_singularity"));
}
