use std::path::Path;
use std::process::{Command, Output};

use eikinetic::generators::gen_vortex;
use eikinetic::{GridSpec, VecN, Vfld};
use serde_json::Value;

fn eik(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eikinetic"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn classify_generated_vortex() {
    let d = tempfile::tempdir().unwrap();
    let g = eik(d.path(), &["generate", "--kind", "vortex", "--dim", "3", "--shape", "64", "--out", "v.vfld"]);
    assert_eq!(g.status.code(), Some(0));
    let c = eik(d.path(), &["classify", "v.vfld"]);
    assert_eq!(c.status.code(), Some(0));
    let v = json(&c);
    assert_eq!(v["tag"], "Vortex");
    assert_eq!(v["sign"], 1);
    assert_eq!(v["center"].as_array().unwrap().len(), 3);
    assert_eq!(v["params"]["seed"], 1);
}

#[test]
fn vortex_line_fails_off_equator() {
    let d = tempfile::tempdir().unwrap();
    eik(d.path(), &["generate", "--kind", "vortex-line", "--dim", "3", "--shape", "40", "--out", "l.vfld"]);
    let r = eik(d.path(), &["residual", "l.vfld", "--xi", "1,0,1"]);
    assert_eq!(r.status.code(), Some(1));
    let v = json(&r);
    assert_eq!(v["verdict"], "fail");
    // full parameter set travels with the report
    let p = &v["report"]["params"];
    assert_eq!(p["direction_count"], 1);
    assert_eq!(p["tangents_per_xi"], 2);
    assert_eq!(p["phi_count"], 20);
    assert!(v["report"]["calibration"]["tolerance"].as_f64().unwrap() > 0.0);
    let w = eik(d.path(), &["weak", "l.vfld", "--json", "w.json"]);
    assert_eq!(w.status.code(), Some(0));
    let wj: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(wj["verdict"], "pass");
    assert_eq!(wj["report"]["params"]["scheme"]["kind"], "uniform-angle");
}

#[test]
fn errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    let r = eik(d.path(), &["residual", "missing.vfld"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing.vfld"));
    std::fs::write(d.path().join("bad.vfld"), b"{\"magic\":\"VFLD1\",\"dim\":2,\"shape\":[3,3]\n").unwrap();
    let r = eik(d.path(), &["classify", "bad.vfld"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("byte"), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(eik(d.path(), &["classify", "bad.vfld", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(eik(d.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(eik(d.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn thread_cap_from_environment() {
    let d = tempfile::tempdir().unwrap();
    eik(d.path(), &["generate", "--kind", "vortex", "--dim", "2", "--shape", "65", "--out", "v.vfld"]);
    let run = |val: &str| {
        Command::new(env!("CARGO_BIN_EXE_eikinetic"))
            .current_dir(d.path())
            .env("EIKINETIC_THREADS", val)
            .args(["residual2d", "v.vfld", "--phi-radius", "0.2"])
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(run("abc").status.code(), Some(2));
    // results do not depend on the pool
    assert_eq!(json(&one)["max_abs"], json(&run("0"))["max_abs"]);
}

#[test]
fn svg_plots_and_slices() {
    let d = tempfile::tempdir().unwrap();
    let g = eik(d.path(), &["generate", "--kind", "rotational", "--shape", "33", "--out", "r.vfld", "--svg", "r.svg"]);
    assert_eq!(g.status.code(), Some(0));
    let svg = std::fs::read_to_string(d.path().join("r.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<line"));
    let g = eik(d.path(), &["generate", "--kind", "distance", "--shape", "33", "--out", "p.vfld", "--svg", "p.svg"]);
    assert_eq!(g.status.code(), Some(0));
    assert!(!std::fs::read_to_string(d.path().join("p.svg")).unwrap().contains("<line"));
    eik(d.path(), &["generate", "--kind", "vortex", "--dim", "3", "--shape", "33", "--out", "v3.vfld"]);
    let r = eik(d.path(), &["degree", "v3.vfld", "--svg", "v3.svg"]);
    assert_eq!(r.status.code(), Some(2));
    let r = eik(d.path(), &["degree", "v3.vfld", "--svg", "v3.svg", "--slice", "2=0"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(json(&r)["degree"], 1);
    assert!(d.path().join("v3.svg").exists());
}

#[test]
fn generated_files_match_the_library() {
    let d = tempfile::tempdir().unwrap();
    eik(d.path(), &["generate", "--kind", "vortex", "--dim", "3", "--shape", "12", "--center", "0.1,-0.2,0.05", "--sign", "-1", "--out", "v.vfld"]);
    let file = Vfld::read(d.path().join("v.vfld")).unwrap();
    let ours = gen_vortex(&GridSpec::cube(3, 12, -1.0, 1.0).unwrap(), &VecN::from_slice(&[0.1, -0.2, 0.05]), -1).unwrap();
    let u = file.vector_field(None).unwrap();
    assert_eq!(u.mask, ours.mask);
    for (a, b) in u.components.iter().zip(&ours.components) {
        assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    assert_eq!(file.provenance.unwrap()["params"]["sign"], -1);
    // atomic writes leave no temporaries behind
    let names: Vec<String> = std::fs::read_dir(d.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert_eq!(names, vec!["v.vfld".to_string()]);
}

#[test]
fn energy_sweep_csv() {
    let d = tempfile::tempdir().unwrap();
    let r = eik(d.path(), &["energy", "--shape", "65", "--eps", "0.4,0.2", "--out", "e.csv"]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(d.path().join("e.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps,dirichlet,penalty,curl_term,total"));
    let totals: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(totals.len(), 2);
    assert!(totals[1] < totals[0]);
    assert_eq!(eik(d.path(), &["energy", "--eps", "0,-1"]).status.code(), Some(2));
}

#[test]
fn umbilic_trace_entropy_reduce() {
    let d = tempfile::tempdir().unwrap();
    eik(d.path(), &["generate", "--kind", "ellipsoid", "--dim", "3", "--shape", "41", "--axes", "0.5,0.5,0.5", "--out", "s.vfld"]);
    let r = eik(d.path(), &["umbilic", "s.vfld", "--alpha", "0.6", "--samples", "50", "--tol", "0.3"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
    eik(d.path(), &["generate", "--kind", "ellipsoid", "--dim", "3", "--shape", "41", "--axes", "0.8,0.4,0.4", "--out", "e.vfld"]);
    assert_eq!(eik(d.path(), &["umbilic", "e.vfld", "--alpha", "0.1", "--samples", "50"]).status.code(), Some(1));

    eik(d.path(), &["generate", "--kind", "constant", "--dim", "3", "--shape", "41", "--w", "0,0,1", "--out", "c.vfld"]);
    let r = eik(d.path(), &["trace", "c.vfld", "--a", "0,0,-0.4", "--b", "0,0,0.4"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(json(&r)["reliable_samples"].as_u64().unwrap() > 0, true);

    eik(d.path(), &["generate", "--kind", "circle-gradient", "--shape", "129", "--out", "cg.vfld"]);
    let r = eik(d.path(), &["entropy", "cg.vfld", "--xi", "0.6,0.8", "--phi-count", "8"]);
    assert_eq!(r.status.code(), Some(0));

    eik(d.path(), &["generate", "--kind", "vortex-line", "--dim", "4", "--shape", "12", "--center", "0.1,2.0,0.0", "--out", "l4.vfld"]);
    let r = eik(d.path(), &["reduce", "l4.vfld", "--out", "red.vfld"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(json(&r)["reduced_class"]["tag"], "Vortex");
    assert_eq!(Vfld::read(d.path().join("red.vfld")).unwrap().grid.dim(), 3);
}

#[test]
fn battery_report() {
    let d = tempfile::tempdir().unwrap();
    let r = eik(d.path(), &["report", "out", "--battery", "--out", "out/summary.json"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&r);
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["summary"]["unexpected"], 0);
    assert!(v["summary"]["fail"].as_u64().unwrap() >= 2);
    assert!(d.path().join("out/summary.json").exists());
    // a rerun ignores the earlier summary
    let again = json(&eik(d.path(), &["report", "out", "--out", "out/summary.json"]));
    assert_eq!(again["results"].as_array().unwrap().len(), v["results"].as_array().unwrap().len());
}
