//! Certificate serialization.
//!
//! Derivations serialize as JSON trees. Every node is an object with a
//! `rule` tag, a `stmt` giving the concluded statement in concrete syntax,
//! and rule-specific children; reduction traces are arrays of
//! `{"depth": k}`, a beta contraction under `k` left applications. Output is
//! canonical (fixed key order, no insignificant whitespace, one trailing
//! newline) so files are bit-stable under re-serialization and usable in
//! line-diffed golden tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algo::{PathEqDeriv, TmEqDeriv};
use crate::decl::{DeclDeriv, DeclRule};
use crate::reduction::{replay, MStep, Step};
use crate::subst::shift;
use crate::syntax::{Ctx, EqStatement, Tm, Tp};
use crate::text::{
    extend_names, parse_ctx, parse_term, parse_type, print_ctx, print_term, print_type,
    ParseError,
};

#[derive(Debug, Error)]
pub enum CertError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed statement: {0}")]
    Parse(#[from] ParseError),
    #[error("inconsistent certificate: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StmtJson {
    pub ctx: String,
    pub left: String,
    pub right: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub depth: usize,
}

/// Nodes of a term- or path-equality certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum CertNodeJson {
    AlgBase {
        stmt: StmtJson,
        left_steps: Vec<StepJson>,
        right_steps: Vec<StepJson>,
        path: Box<CertNodeJson>,
    },
    AlgArr {
        stmt: StmtJson,
        body: Box<CertNodeJson>,
    },
    PVar {
        stmt: StmtJson,
        index: usize,
    },
    PApp {
        stmt: StmtJson,
        fun: Box<CertNodeJson>,
        arg: Box<CertNodeJson>,
    },
}

/// Nodes of a declarative derivation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum DeclNodeJson {
    DecBeta {
        stmt: StmtJson,
        body: Box<DeclNodeJson>,
        arg: Box<DeclNodeJson>,
    },
    DecLam {
        stmt: StmtJson,
        body: Box<DeclNodeJson>,
    },
    DecExt {
        stmt: StmtJson,
        body: Box<DeclNodeJson>,
    },
    DecVar {
        stmt: StmtJson,
        index: usize,
    },
    DecApp {
        stmt: StmtJson,
        fun: Box<DeclNodeJson>,
        arg: Box<DeclNodeJson>,
    },
    DecSym {
        stmt: StmtJson,
        inner: Box<DeclNodeJson>,
    },
    DecTrans {
        stmt: StmtJson,
        first: Box<DeclNodeJson>,
        second: Box<DeclNodeJson>,
    },
}

fn stmt_json(names: &[String], ctx: &Ctx, left: &Tm, right: &Tm, ty: &Tp) -> StmtJson {
    StmtJson {
        ctx: print_ctx(names, ctx),
        left: print_term(left, names),
        right: print_term(right, names),
        ty: print_type(ty),
    }
}

fn steps_json(tr: &MStep) -> Vec<StepJson> {
    tr.steps().iter().map(|s| StepJson { depth: s.depth() }).collect()
}

fn steps_from_json(steps: &[StepJson]) -> MStep {
    MStep::from_steps(steps.iter().map(|s| Step::at_depth(s.depth)).collect())
}

/// Serializes a term-equality certificate, deriving the statement of every
/// inner node from the root statement. Fails on certificates that do not fit
/// their statement.
pub fn tm_eq_to_json(
    names: &[String],
    stmt: &EqStatement,
    d: &TmEqDeriv,
) -> Result<CertNodeJson, CertError> {
    match (d, &stmt.ty) {
        (TmEqDeriv::AlgArr { body }, Tp::Arr(dom, cod)) => {
            let (names2, _) = extend_names(names);
            let inner = EqStatement::new(
                stmt.ctx.extend((**dom).clone()),
                Tm::app(shift(&stmt.left, 1), Tm::Var(0)),
                Tm::app(shift(&stmt.right, 1), Tm::Var(0)),
                (**cod).clone(),
            );
            Ok(CertNodeJson::AlgArr {
                stmt: stmt_json(names, &stmt.ctx, &stmt.left, &stmt.right, &stmt.ty),
                body: Box::new(tm_eq_to_json(&names2, &inner, body)?),
            })
        }
        (TmEqDeriv::AlgBase { left_steps, right_steps, path }, Tp::Base) => {
            let p = replay(&stmt.left, left_steps)
                .ok_or_else(|| CertError::Invalid("left trace does not replay".into()))?;
            let q = replay(&stmt.right, right_steps)
                .ok_or_else(|| CertError::Invalid("right trace does not replay".into()))?;
            let (path_node, _) = path_to_json(names, &stmt.ctx, path, &p, &q)?;
            Ok(CertNodeJson::AlgBase {
                stmt: stmt_json(names, &stmt.ctx, &stmt.left, &stmt.right, &stmt.ty),
                left_steps: steps_json(left_steps),
                right_steps: steps_json(right_steps),
                path: Box::new(path_node),
            })
        }
        _ => Err(CertError::Invalid(
            "certificate shape does not match the statement type".into(),
        )),
    }
}

fn path_to_json(
    names: &[String],
    ctx: &Ctx,
    d: &PathEqDeriv,
    p: &Tm,
    q: &Tm,
) -> Result<(CertNodeJson, Tp), CertError> {
    match d {
        PathEqDeriv::PVar { index } => {
            let ty = ctx
                .lookup(*index)
                .cloned()
                .ok_or_else(|| CertError::Invalid(format!("variable {index} out of range")))?;
            Ok((
                CertNodeJson::PVar {
                    stmt: stmt_json(names, ctx, p, q, &ty),
                    index: *index,
                },
                ty,
            ))
        }
        PathEqDeriv::PApp { fun, arg } => match (p, q) {
            (Tm::App(p1, a1), Tm::App(q1, a2)) => {
                let (fun_node, fun_ty) = path_to_json(names, ctx, fun, p1, q1)?;
                let Tp::Arr(dom, cod) = fun_ty else {
                    return Err(CertError::Invalid(
                        "application with base-typed function".into(),
                    ));
                };
                let arg_stmt =
                    EqStatement::new(ctx.clone(), (**a1).clone(), (**a2).clone(), (*dom).clone());
                let arg_node = tm_eq_to_json(names, &arg_stmt, arg)?;
                Ok((
                    CertNodeJson::PApp {
                        stmt: stmt_json(names, ctx, p, q, &cod),
                        fun: Box::new(fun_node),
                        arg: Box::new(arg_node),
                    },
                    *cod,
                ))
            }
            _ => Err(CertError::Invalid(
                "application node over non-application terms".into(),
            )),
        },
    }
}

fn stmt_from_json(stmt: &StmtJson) -> Result<(Vec<String>, EqStatement), CertError> {
    let (names, ctx) = parse_ctx(&stmt.ctx)?;
    let left = parse_term(&stmt.left, &names)?;
    let right = parse_term(&stmt.right, &names)?;
    let ty = parse_type(&stmt.ty)?;
    Ok((names, EqStatement::new(ctx, left, right, ty)))
}

fn tm_eq_tree(node: &CertNodeJson) -> Result<TmEqDeriv, CertError> {
    match node {
        CertNodeJson::AlgArr { body, .. } => Ok(TmEqDeriv::alg_arr(tm_eq_tree(body)?)),
        CertNodeJson::AlgBase { left_steps, right_steps, path, .. } => Ok(TmEqDeriv::alg_base(
            steps_from_json(left_steps),
            steps_from_json(right_steps),
            path_tree(path)?,
        )),
        _ => Err(CertError::Invalid(
            "path node where a term-equality node was expected".into(),
        )),
    }
}

fn path_tree(node: &CertNodeJson) -> Result<PathEqDeriv, CertError> {
    match node {
        CertNodeJson::PVar { index, .. } => Ok(PathEqDeriv::pvar(*index)),
        CertNodeJson::PApp { fun, arg, .. } => {
            Ok(PathEqDeriv::papp(path_tree(fun)?, tm_eq_tree(arg)?))
        }
        _ => Err(CertError::Invalid(
            "term-equality node where a path node was expected".into(),
        )),
    }
}

/// Canonical file contents for a term-equality certificate.
pub fn tm_eq_certificate(
    names: &[String],
    stmt: &EqStatement,
    d: &TmEqDeriv,
) -> Result<String, CertError> {
    let node = tm_eq_to_json(names, stmt, d)?;
    Ok(format!("{}\n", serde_json::to_string(&node)?))
}

/// Reads back a certificate: the root statement is authoritative and inner
/// statements are regenerated on re-serialization.
pub fn parse_tm_eq_certificate(
    src: &str,
) -> Result<(Vec<String>, EqStatement, TmEqDeriv), CertError> {
    let node: CertNodeJson = serde_json::from_str(src)?;
    let stmt = match &node {
        CertNodeJson::AlgBase { stmt, .. } | CertNodeJson::AlgArr { stmt, .. } => stmt,
        _ => {
            return Err(CertError::Invalid(
                "certificate root must be a term-equality node".into(),
            ))
        }
    };
    let (names, stmt) = stmt_from_json(stmt)?;
    let deriv = tm_eq_tree(&node)?;
    Ok((names, stmt, deriv))
}

pub fn decl_to_json(
    names: &[String],
    ctx: &Ctx,
    d: &DeclDeriv,
) -> Result<DeclNodeJson, CertError> {
    let stmt = stmt_json(names, ctx, &d.left, &d.right, &d.ty);
    match &d.rule {
        DeclRule::Var { index } => Ok(DeclNodeJson::DecVar { stmt, index: *index }),
        DeclRule::Lam { body } => {
            let Tp::Arr(dom, _) = &d.ty else {
                return Err(CertError::Invalid("binder rule at base type".into()));
            };
            let (names2, _) = extend_names(names);
            let ctx2 = ctx.extend((**dom).clone());
            Ok(DeclNodeJson::DecLam {
                stmt,
                body: Box::new(decl_to_json(&names2, &ctx2, body)?),
            })
        }
        DeclRule::Ext { body } => {
            let Tp::Arr(dom, _) = &d.ty else {
                return Err(CertError::Invalid("binder rule at base type".into()));
            };
            let (names2, _) = extend_names(names);
            let ctx2 = ctx.extend((**dom).clone());
            Ok(DeclNodeJson::DecExt {
                stmt,
                body: Box::new(decl_to_json(&names2, &ctx2, body)?),
            })
        }
        DeclRule::Beta { body, arg } => {
            let (names2, _) = extend_names(names);
            let ctx2 = ctx.extend(arg.ty.clone());
            Ok(DeclNodeJson::DecBeta {
                stmt,
                body: Box::new(decl_to_json(&names2, &ctx2, body)?),
                arg: Box::new(decl_to_json(names, ctx, arg)?),
            })
        }
        DeclRule::App { fun, arg } => Ok(DeclNodeJson::DecApp {
            stmt,
            fun: Box::new(decl_to_json(names, ctx, fun)?),
            arg: Box::new(decl_to_json(names, ctx, arg)?),
        }),
        DeclRule::Sym { inner } => Ok(DeclNodeJson::DecSym {
            stmt,
            inner: Box::new(decl_to_json(names, ctx, inner)?),
        }),
        DeclRule::Trans { first, second } => Ok(DeclNodeJson::DecTrans {
            stmt,
            first: Box::new(decl_to_json(names, ctx, first)?),
            second: Box::new(decl_to_json(names, ctx, second)?),
        }),
    }
}

fn decl_tree(node: &DeclNodeJson) -> Result<DeclDeriv, CertError> {
    let stmt = match node {
        DeclNodeJson::DecBeta { stmt, .. }
        | DeclNodeJson::DecLam { stmt, .. }
        | DeclNodeJson::DecExt { stmt, .. }
        | DeclNodeJson::DecVar { stmt, .. }
        | DeclNodeJson::DecApp { stmt, .. }
        | DeclNodeJson::DecSym { stmt, .. }
        | DeclNodeJson::DecTrans { stmt, .. } => stmt,
    };
    let (_, parsed) = stmt_from_json(stmt)?;
    let rule = match node {
        DeclNodeJson::DecVar { index, .. } => DeclRule::Var { index: *index },
        DeclNodeJson::DecLam { body, .. } => DeclRule::Lam {
            body: Box::new(decl_tree(body)?),
        },
        DeclNodeJson::DecExt { body, .. } => DeclRule::Ext {
            body: Box::new(decl_tree(body)?),
        },
        DeclNodeJson::DecBeta { body, arg, .. } => DeclRule::Beta {
            body: Box::new(decl_tree(body)?),
            arg: Box::new(decl_tree(arg)?),
        },
        DeclNodeJson::DecApp { fun, arg, .. } => DeclRule::App {
            fun: Box::new(decl_tree(fun)?),
            arg: Box::new(decl_tree(arg)?),
        },
        DeclNodeJson::DecSym { inner, .. } => DeclRule::Sym {
            inner: Box::new(decl_tree(inner)?),
        },
        DeclNodeJson::DecTrans { first, second, .. } => DeclRule::Trans {
            first: Box::new(decl_tree(first)?),
            second: Box::new(decl_tree(second)?),
        },
    };
    Ok(DeclDeriv {
        left: parsed.left,
        right: parsed.right,
        ty: parsed.ty,
        rule,
    })
}

/// Canonical file contents for a declarative derivation.
pub fn decl_derivation_to_string(
    names: &[String],
    ctx: &Ctx,
    d: &DeclDeriv,
) -> Result<String, CertError> {
    let node = decl_to_json(names, ctx, d)?;
    Ok(format!("{}\n", serde_json::to_string(&node)?))
}

/// Reads back a declarative derivation together with its root context.
pub fn parse_decl_derivation(src: &str) -> Result<(Vec<String>, Ctx, DeclDeriv), CertError> {
    let node: DeclNodeJson = serde_json::from_str(src)?;
    let stmt = match &node {
        DeclNodeJson::DecBeta { stmt, .. }
        | DeclNodeJson::DecLam { stmt, .. }
        | DeclNodeJson::DecExt { stmt, .. }
        | DeclNodeJson::DecVar { stmt, .. }
        | DeclNodeJson::DecApp { stmt, .. }
        | DeclNodeJson::DecSym { stmt, .. }
        | DeclNodeJson::DecTrans { stmt, .. } => stmt,
    };
    let (names, ctx) = parse_ctx(&stmt.ctx)?;
    let deriv = decl_tree(&node)?;
    Ok((names, ctx, deriv))
}
