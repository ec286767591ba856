//! Command-line surface of the equality engine.
//!
//! Exit codes: 0 success (equal / valid), 1 negative result (not equivalent /
//! invalid derivation), 2 parse, type, or file errors, 3 fuel exhaustion.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lameq::algo::{check_tm_eq, decide_tm_eq_with_fuel, AlgoError};
use lameq::cert::{parse_decl_derivation, parse_tm_eq_certificate, tm_eq_certificate};
use lameq::decl::check_decl;
use lameq::logrel::completeness;
use lameq::reduction::whnf;
use lameq::syntax::{type_check, EqStatement};
use lameq::text::{parse_ctx, parse_term, parse_type, print_term};

#[derive(Parser)]
#[command(name = "lameq", version, about = "Typed equality checking for lambda terms, with checkable certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether two terms are equivalent at a type.
    Eq {
        /// Typing context, e.g. "f:i->i, x:i" (may be empty).
        ctx: String,
        left: String,
        right: String,
        /// The type to compare at, e.g. "i -> i".
        r#type: String,
        /// Write a certificate here when the terms are equivalent.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Machine-readable result on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Check a certificate file independently of the decision procedure.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Translate a declarative derivation into an algorithmic certificate.
    Translate {
        file: PathBuf,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Reduce a term to weak head normal form and print the trace.
    Whnf {
        ctx: String,
        term: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_FUEL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Eq { ctx, left, right, r#type, cert, fuel, json } => {
            run_eq(&ctx, &left, &right, &r#type, cert.as_deref(), fuel, json)
        }
        Cmd::Verify { file, json } => run_verify(&file, json),
        Cmd::Translate { file, cert } => run_translate(&file, cert.as_deref()),
        Cmd::Whnf { ctx, term, fuel, json } => run_whnf(&ctx, &term, fuel, json),
    };
    ExitCode::from(code)
}

fn fail(msg: impl std::fmt::Display, code: u8) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn run_eq(
    ctx_src: &str,
    left_src: &str,
    right_src: &str,
    ty_src: &str,
    cert: Option<&std::path::Path>,
    fuel: usize,
    json: bool,
) -> u8 {
    let (names, ctx) = match parse_ctx(ctx_src) {
        Ok(c) => c,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    let left = match parse_term(left_src, &names) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    let right = match parse_term(right_src, &names) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    let ty = match parse_type(ty_src) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    if !type_check(&ctx, &left, &ty) {
        return fail(
            format!("`{left_src}` does not have type `{ty_src}` in context `{ctx_src}`"),
            EXIT_BAD_INPUT,
        );
    }
    if !type_check(&ctx, &right, &ty) {
        return fail(
            format!("`{right_src}` does not have type `{ty_src}` in context `{ctx_src}`"),
            EXIT_BAD_INPUT,
        );
    }
    match decide_tm_eq_with_fuel(&ctx, &left, &right, &ty, fuel) {
        Ok(Some(deriv)) => {
            debug_assert!(check_tm_eq(&ctx, &deriv, &left, &right, &ty));
            if let Some(path) = cert {
                let stmt = EqStatement::new(ctx, left, right, ty);
                let text = match tm_eq_certificate(&names, &stmt, &deriv) {
                    Ok(t) => t,
                    Err(e) => return fail(e, EXIT_BAD_INPUT),
                };
                if let Err(e) = std::fs::write(path, text) {
                    return fail(e, EXIT_BAD_INPUT);
                }
            }
            if json {
                println!("{{\"equivalent\":true}}");
            } else {
                println!("equivalent");
            }
            EXIT_OK
        }
        Ok(None) => {
            if json {
                println!("{{\"equivalent\":false}}");
            } else {
                println!("not equivalent");
            }
            EXIT_NEGATIVE
        }
        Err(AlgoError::FuelExhausted) => fail("fuel exhausted", EXIT_FUEL),
        Err(e) => fail(e, EXIT_BAD_INPUT),
    }
}

fn run_verify(file: &std::path::Path, json: bool) -> u8 {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {e}", file.display()), EXIT_BAD_INPUT),
    };
    // Anything that fails before checking counts as a malformed file.
    let (_, stmt, deriv) = match parse_tm_eq_certificate(&src) {
        Ok(parts) => parts,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    let valid = check_tm_eq(&stmt.ctx, &deriv, &stmt.left, &stmt.right, &stmt.ty);
    if json {
        println!("{{\"valid\":{valid}}}");
    } else {
        println!("{}", if valid { "valid" } else { "invalid" });
    }
    if valid {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn run_translate(file: &std::path::Path, cert: Option<&std::path::Path>) -> u8 {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {e}", file.display()), EXIT_BAD_INPUT),
    };
    let (names, ctx, deriv) = match parse_decl_derivation(&src) {
        Ok(parts) => parts,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    if !check_decl(&ctx, &deriv, &deriv.left.clone(), &deriv.right.clone(), &deriv.ty.clone()) {
        return fail("invalid declarative derivation", EXIT_NEGATIVE);
    }
    let translated = match completeness(&ctx, &deriv) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_NEGATIVE),
    };
    let stmt = EqStatement::new(ctx, deriv.left, deriv.right, deriv.ty);
    if !check_tm_eq(&stmt.ctx, &translated, &stmt.left, &stmt.right, &stmt.ty) {
        return fail("translated certificate failed verification", EXIT_NEGATIVE);
    }
    let text = match tm_eq_certificate(&names, &stmt, &translated) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    match cert {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return fail(e, EXIT_BAD_INPUT);
            }
        }
        None => print!("{text}"),
    }
    EXIT_OK
}

fn run_whnf(ctx_src: &str, term_src: &str, fuel: usize, json: bool) -> u8 {
    let (names, _ctx) = match parse_ctx(ctx_src) {
        Ok(c) => c,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    let term = match parse_term(term_src, &names) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_BAD_INPUT),
    };
    match whnf(&term, fuel) {
        Ok((normal, trace)) => {
            if json {
                let steps: Vec<String> = trace
                    .steps()
                    .iter()
                    .map(|s| format!("{{\"depth\":{}}}", s.depth()))
                    .collect();
                println!(
                    "{{\"term\":{},\"steps\":[{}]}}",
                    serde_json::to_string(&print_term(&normal, &names)).expect("string encodes"),
                    steps.join(",")
                );
            } else {
                println!("{}", print_term(&normal, &names));
                for step in trace.steps() {
                    let depth = step.depth();
                    if depth == 0 {
                        println!("beta");
                    } else {
                        println!("app-left^{depth} beta");
                    }
                }
            }
            EXIT_OK
        }
        Err(_) => fail(format!("fuel exhausted after {fuel} steps"), EXIT_FUEL),
    }
}
