use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name);
    p.to_str().unwrap().to_string()
}

fn adual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adual"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bound_for_z4_is_nine() {
    let o = adual(&["bound", &data("z4.alg")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# adual bound seed=0 budget=1000000\n"));
    assert!(out.lines().any(|l| l == "N = 9"), "{out}");
}

#[test]
fn semilattice_is_not_abelian() {
    let o = adual(&["check-abelian", &data("semilattice.alg")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("no affine term"));
    assert!(out.contains("verdict: FAIL"));
}

#[test]
fn term_dump_reparses_as_maltsev_table() {
    let o = adual(&["check-abelian", &data("z3.alg")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let dump = &out[out.find("algebra t").unwrap()..];
    let doc = adual_core::text::parse_document("dump", dump).unwrap();
    let t = doc.algebra().unwrap();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                assert_eq!(t.apply(0, &[x, y, z]), (x + 3 - y + z) % 3);
            }
        }
    }
}

#[test]
fn duality_z2_passes_with_summary() {
    let o = adual(&["duality", &data("z2.alg"), "--max-power", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("DUALITY PASS k_max=2 relations=67 time="), "{last}");
}

#[test]
fn duality_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let rel = dir.path().join("diag.rel");
    std::fs::write(&rel, "relation D 2 over Z2\nt 0 0\nt 1 1\n").unwrap();
    let o = adual(&["duality", &data("z2.alg"), "--partial-relations", rel.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("DUALITY FAIL k_max=2 relations=1 partial=true"));
}

#[test]
fn output_is_deterministic_apart_from_timing() {
    let run = || {
        let o = adual(&["duality", &data("z2.alg")]);
        let s = stdout(&o);
        s[..s.rfind("time=").unwrap()].to_string()
    };
    assert_eq!(run(), run());
    let f = || stdout(&adual(&["factorize", &data("z2.alg"), "--arity", "3", "--seed", "7"]));
    let a = f();
    assert!(a.starts_with("# adual factorize seed=7 budget=1000000\n"));
    assert_eq!(a, f());
}

#[test]
fn entail_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [&[][..], &["--arity", "4"][..]] {
        let cert = dir.path().join("out.cert");
        let (alg, rels) = (data("z2.alg"), data("z2_diagonal3.rel"));
        let mut args = vec!["entail", &alg, &rels, "--out", cert.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = adual(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let o = adual(&["replay", cert.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert_eq!(out.matches("verdict: PASS").count(), 2, "{out}");
        assert!(out.contains("compatibility checked = true"));
    }
}

#[test]
fn tampered_certificate_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("out.cert");
    adual(&["entail", &data("z2.alg"), &data("z2_diagonal3.rel"), "--out", cert.to_str().unwrap()]);
    let text = std::fs::read_to_string(&cert).unwrap();
    // claim the diagonal also contains 0 0 1
    let tampered = text.replacen("conclusion relation 3\n  t 0 0 0\n", "conclusion relation 3\n  t 0 0 0\n  t 0 0 1\n", 1);
    assert_ne!(text, tampered);
    std::fs::write(&cert, tampered).unwrap();
    let o = adual(&["replay", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn refute_finds_witness() {
    let o = adual(&["refute", &data("refute_graph.rel")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("arity = 1") && out.contains("map = 1 0"), "{out}");
}

#[test]
fn structural_verbs_pass() {
    for args in [
        vec!["galois", "z4.alg"],
        vec!["hom", "z4.alg", "z2.alg"],
        vec!["hom", "z4.alg", "z2.alg", "--mode", "abelian"],
        vec!["hk", "z4.alg", "--arity", "2"],
        vec!["factorize", "z4.alg", "--arity", "2"],
    ] {
        let resolved: Vec<String> = args
            .iter()
            .map(|a| if a.ends_with(".alg") { data(a) } else { a.to_string() })
            .collect();
        let full: Vec<&str> = resolved.iter().map(String::as_str).collect();
        let o = adual(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(!stdout(&o).contains("verdict: FAIL"));
    }
    let o = adual(&["sub", &data("z4.alg")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("{0 2} meet-irreducible theta=[0 2][1 3]"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.alg");
    std::fs::write(&bad, "algebra A\nsize 2\nop f 1\n0 x\n").unwrap();
    let o = adual(&["bound", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.alg:4:") && err.contains("`x`"), "{err}");
    assert_eq!(adual(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(adual(&["bound", &data("z4.alg"), "--max-power", "2"]).status.code(), Some(2));
    assert_eq!(adual(&["duality", &data("z2.alg"), "--max-power", "4"]).status.code(), Some(2));
    assert_eq!(adual(&["hk", &data("semilattice.alg")]).status.code(), Some(2));
}

#[test]
fn budget_errors_exit_three() {
    let o = adual(&["galois", &data("z4.alg"), "--budget", "50"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("4096"));
    let o = adual(&["duality", &data("z4.alg")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("--partial-relations"));
}
