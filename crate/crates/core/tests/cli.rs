use std::path::PathBuf;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_gradedq");

const XY: &str = "manifold { base x; base y; gen xi : -1; } Q { xi -> x*y; }";
const FLOWED: &str = "manifold { base x; gen theta : 1; gen eta : -1; }
truncate { jet 3; filt 3; }
Q { eta -> 1; x -> theta; }
flowlog { jet 3; filt 3; step { x -> x^2; eta -> x*eta; } }
";

fn write(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn gradedq(args: &[&str]) -> (String, i32) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn run_on(name: &str, text: &str, args: &[&str]) -> (String, i32) {
    let p = write(name, text);
    let mut all = args.to_vec();
    let path = p.to_str().unwrap().to_string();
    all.extend(["--in", path.as_str()]);
    gradedq(&all)
}

/// The `Q { ... }` block of a document.
fn q_block(doc: &str) -> String {
    let start = doc.find("\nQ {").expect("Q block") + 1;
    let end = start + doc[start..].find("\n}").unwrap();
    doc[start..end + 2].to_string()
}

#[test]
fn xy_field_cohomology() {
    let (out, code) = run_on("xy.q", XY, &["kt-cohomology", "--vf", "--jet", "4", "--filt", "3"]);
    assert_eq!(code, 0);
    assert!(out.lines().next().unwrap().starts_with("dim H¹ = 1; representative ∂/∂ξ"), "{out}");
}

#[test]
fn missing_degree_is_located() {
    let (out, code) = run_on("nodeg.q", "manifold { gen theta; }", &["check"]);
    assert_eq!(code, 2);
    assert!(out.contains("1:16"), "{out}");
    assert!(out.contains("missing degree on generator `theta`"), "{out}");
}

#[test]
fn degree_mismatch_is_reported() {
    let (out, code) = run_on("mismatch.q", "manifold { base x; gen xi : -1; }\nQ { x -> x; }", &["check"]);
    assert_eq!(code, 2);
    assert!(out.contains("must have degree 1, found 0"), "{out}");
}

#[test]
fn failing_check_names_witness() {
    let text = "manifold { base x; gen theta : 1; gen eta : -1; } Q { eta -> x; x -> theta; }";
    let (out, code) = run_on("mutated.q", text, &["check"]);
    assert_eq!(code, 1);
    assert!(out.contains("`eta`"), "{out}");
}

#[test]
fn trivialize_replays_exactly() {
    let (flowed, code) = run_on("flowed.q", FLOWED, &["replay"]);
    assert_eq!(code, 0);
    let (triv, code) = run_on("flowed_q.q", &flowed, &["trivialize"]);
    assert_eq!(code, 0);
    let log = write("triv_log.q", &triv);
    let (replayed, code) = run_on("flowed_q2.q", &flowed, &["replay", "--log", log.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(q_block(&replayed), q_block(&triv));
    assert_eq!(q_block(&triv), "Q {\n  eta -> 1 + x;\n}");
}

#[test]
fn split_replays_exactly() {
    for seed in 0..4 {
        let (input, code) = gradedq(&["random", "--seed", &seed.to_string(), "--pairs", "2"]);
        assert_eq!(code, 0);
        let (split, code) = run_on(&format!("split{seed}.q"), &input, &["split"]);
        assert_eq!(code, 0, "{split}");
        let log = write(&format!("split_log{seed}.q"), &split);
        let (replayed, code) = run_on(&format!("split_in{seed}.q"), &input, &["replay", "--log", log.to_str().unwrap()]);
        assert_eq!(code, 0, "{replayed}");
        assert_eq!(q_block(&replayed), q_block(&split), "seed {seed}");
    }
}

#[test]
fn intertwine_replays_exactly() {
    let chart = "manifold { base x; base y; gen theta : 1; gen xi : -1; }\ntruncate { jet 3; filt 3; }\nQ { y -> y*theta; xi -> x; }\n";
    let flow = "flowlog { jet 3; filt 3; step { y -> y*xi*theta; x -> x*xi*theta; } }\n";
    let (flowed, code) = run_on("flowed_i.q", &format!("{chart}{flow}"), &["replay"]);
    assert_eq!(code, 0, "{flowed}");
    let qprime = q_block(&flowed).replacen("Q {", "Qprime {", 1);
    let both = format!("{chart}{qprime}\n");
    let (log, code) = run_on("pair.q", &both, &["intertwine"]);
    assert_eq!(code, 0, "{log}");
    let logfile = write("pair_log.q", &log);
    let (replayed, code) = run_on("pair_in.q", &both, &["replay", "--log", logfile.to_str().unwrap()]);
    assert_eq!(code, 0, "{replayed}");
    assert_eq!(q_block(&replayed), q_block(&flowed));
}

#[test]
fn structured_output_is_versioned_json() {
    for args in [&["check"][..], &["kt-cohomology", "--vf"][..], &["anchor"][..]] {
        let mut a = args.to_vec();
        a.extend(["--format", "structured"]);
        let (out, code) = run_on("xy_s.q", XY, &a);
        assert_eq!(code, 0, "{out}");
        for line in out.lines().filter(|l| !l.is_empty()) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["version"], 1);
            assert_eq!(v["command"], args[0]);
            assert!(v["kind"].is_string());
        }
    }
    let (out, code) = run_on("bad_s.q", "manifold { gen theta; }", &["check", "--format", "structured"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!((v["line"].as_u64(), v["column"].as_u64()), (Some(1), Some(16)));
}
