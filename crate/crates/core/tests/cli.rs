//! Command-line golden tests: for every subcommand, its worked examples are
//! pinned byte-exact against committed files, along with the exit-code
//! contract (0 positive, 1 negative, 2 bad input, 3 fuel exhaustion).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens")
}

fn golden(name: &str) -> Vec<u8> {
    let path = golden_dir().join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lameq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn eq_identity_golden() {
    let cert = tempfile::NamedTempFile::new().unwrap();
    let cert_path = cert.path().to_str().unwrap();
    let out = run(&["eq", "", "\\x. x", "\\x. x", "i -> i", "--cert", cert_path]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, golden("eq_id.stdout"));
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("eq_id.cert.json"));
}

#[test]
fn eq_eta_golden() {
    let cert = tempfile::NamedTempFile::new().unwrap();
    let cert_path = cert.path().to_str().unwrap();
    let out = run(&["eq", "f:i->i", "f", "\\y. f y", "i -> i", "--cert", cert_path]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, golden("eq_eta.stdout"));
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("eq_eta.cert.json"));
}

#[test]
fn eq_distinct_projections_golden() {
    let out = run(&["eq", "", "\\x.\\y. x", "\\x.\\y. y", "i -> i -> i"]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, golden("eq_proj.stdout"));
}

#[test]
fn eq_rejects_bad_input() {
    let out = run(&["eq", "", "\\x. x", "\\x. x", "i"]);
    assert_eq!(code(&out), 2, "lambdas never have the base type");
    let out = run(&["eq", "", "\\x.", "\\x. x", "i -> i"]);
    assert_eq!(code(&out), 2);
    let out = run(&["eq", "", "\\x. q", "\\x. x", "i -> i"]);
    assert_eq!(code(&out), 2, "unbound variable");
}

#[test]
fn eq_json_output() {
    let out = run(&["eq", "", "\\x. x", "\\x. x", "i -> i", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, b"{\"equivalent\":true}\n");
    let out = run(&["eq", "", "\\x.\\y. x", "\\x.\\y. y", "i -> i -> i", "--json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, b"{\"equivalent\":false}\n");
}

#[test]
fn verify_accepts_emitted_certificates() {
    for name in ["eq_id.cert.json", "eq_eta.cert.json"] {
        let path = golden_dir().join(name);
        let out = run(&["verify", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}");
        assert_eq!(out.stdout, b"valid\n", "{name}");
    }
}

#[test]
fn verify_rejects_a_deleted_trace_step() {
    let path = golden_dir().join("cert_mutated.json");
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, b"invalid\n");
}

#[test]
fn verify_rejects_a_tampered_statement() {
    // Keep the derivation tree but claim a different equation: the replayed
    // reduct no longer matches the path certificate.
    let src = std::fs::read_to_string(golden_dir().join("eq_eta.cert.json")).unwrap();
    let tampered = src.replace("\"right\":\"\\\\x. f x\"", "\"right\":\"\\\\x. f (f x)\"");
    assert_ne!(tampered, src, "replacement must hit the root statement");
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), tampered).unwrap();
    let out = run(&["verify", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, b"invalid\n");
}

#[test]
fn verify_rejects_an_empty_file() {
    let path = golden_dir().join("empty.json");
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn eq_then_verify_pipeline() {
    let cert = tempfile::NamedTempFile::new().unwrap();
    let cert_path = cert.path().to_str().unwrap();
    let out = run(&[
        "eq",
        "g:(i -> i) -> i, h:i -> i",
        "g",
        "\\k. g (\\a. k a)",
        "(i -> i) -> i",
        "--cert",
        cert_path,
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["verify", cert_path]);
    assert_eq!(code(&out), 0);
}

#[test]
fn translate_variable_golden() {
    let cert = tempfile::NamedTempFile::new().unwrap();
    let cert_path = cert.path().to_str().unwrap();
    let input = golden_dir().join("decl_var.json");
    let out = run(&["translate", input.to_str().unwrap(), "--cert", cert_path]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("decl_var.cert.json"));
}

#[test]
fn translate_beta_golden() {
    let cert = tempfile::NamedTempFile::new().unwrap();
    let cert_path = cert.path().to_str().unwrap();
    let input = golden_dir().join("decl_beta.json");
    let out = run(&["translate", input.to_str().unwrap(), "--cert", cert_path]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("decl_beta.cert.json"));
    // The emitted certificate itself verifies.
    let out = run(&["verify", cert_path]);
    assert_eq!(code(&out), 0);
}

#[test]
fn translate_rejects_mismatched_transitivity() {
    let input = golden_dir().join("decl_trans_bad.json");
    let out = run(&["translate", input.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn translate_without_cert_prints_to_stdout() {
    let input = golden_dir().join("decl_var.json");
    let out = run(&["translate", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, golden("decl_var.cert.json"));
}

#[test]
fn whnf_beta_golden() {
    let out = run(&["whnf", "z:i", "(\\x. x) z"]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, golden("whnf_beta.stdout"));
}

#[test]
fn whnf_does_not_reduce_under_binders() {
    let out = run(&["whnf", "", "\\x. (\\y. y) x"]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, golden("whnf_lam.stdout"));
}

#[test]
fn whnf_fuel_exhaustion() {
    let out = run(&["whnf", "", "(\\x. x x) (\\x. x x)", "--fuel", "50"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn whnf_json_output() {
    let out = run(&["whnf", "z:i", "(\\x. x) ((\\y. y) z)", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        out.stdout,
        b"{\"term\":\"z\",\"steps\":[{\"depth\":0},{\"depth\":0}]}\n"
    );
}

#[test]
fn criterion_8_cli_goldens() {
    // The three worked examples per command, byte-exact against the
    // committed files.
    let dir = golden_dir();
    let cert = tempfile::NamedTempFile::new().unwrap();
    let cert_path = cert.path().to_str().unwrap();
    let mut examples = 0usize;

    // eq
    let out = run(&["eq", "", "\\x. x", "\\x. x", "i -> i", "--cert", cert_path]);
    assert_eq!((code(&out), out.stdout), (0, golden("eq_id.stdout")));
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("eq_id.cert.json"));
    examples += 1;
    let out = run(&["eq", "f:i->i", "f", "\\y. f y", "i -> i", "--cert", cert_path]);
    assert_eq!((code(&out), out.stdout), (0, golden("eq_eta.stdout")));
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("eq_eta.cert.json"));
    examples += 1;
    let out = run(&["eq", "", "\\x.\\y. x", "\\x.\\y. y", "i -> i -> i"]);
    assert_eq!((code(&out), out.stdout), (1, golden("eq_proj.stdout")));
    examples += 1;

    // verify
    std::fs::write(cert_path, golden("eq_eta.cert.json")).unwrap();
    let out = run(&["verify", cert_path]);
    assert_eq!((code(&out), out.stdout.as_slice()), (0, b"valid\n".as_slice()));
    examples += 1;
    let out = run(&["verify", dir.join("cert_mutated.json").to_str().unwrap()]);
    assert_eq!((code(&out), out.stdout.as_slice()), (1, b"invalid\n".as_slice()));
    examples += 1;
    let out = run(&["verify", dir.join("empty.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    examples += 1;

    // translate
    let out = run(&["translate", dir.join("decl_var.json").to_str().unwrap(), "--cert", cert_path]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("decl_var.cert.json"));
    examples += 1;
    let out = run(&["translate", dir.join("decl_beta.json").to_str().unwrap(), "--cert", cert_path]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(cert_path).unwrap(), golden("decl_beta.cert.json"));
    examples += 1;
    let out = run(&["translate", dir.join("decl_trans_bad.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    examples += 1;

    // whnf
    let out = run(&["whnf", "z:i", "(\\x. x) z"]);
    assert_eq!((code(&out), out.stdout), (0, golden("whnf_beta.stdout")));
    examples += 1;
    let out = run(&["whnf", "", "\\x. (\\y. y) x"]);
    assert_eq!((code(&out), out.stdout), (0, golden("whnf_lam.stdout")));
    examples += 1;
    let out = run(&["whnf", "", "(\\x. x x) (\\x. x x)", "--fuel", "50"]);
    assert_eq!(code(&out), 3);
    examples += 1;

    println!("criterion 8 (cli golden tests): PASS ({examples} worked examples, byte-exact)");
}

#[test]
fn emitted_certificates_are_restable() {
    // Verifying and re-emitting a certificate keeps the bytes fixed.
    let path = golden_dir().join("eq_eta.cert.json");
    let src = std::fs::read_to_string(&path).unwrap();
    let (names, stmt, deriv) = lameq::cert::parse_tm_eq_certificate(&src).unwrap();
    let again = lameq::cert::tm_eq_certificate(&names, &stmt, &deriv).unwrap();
    assert_eq!(again, src);
}
