//! Type-directed algorithmic term equality and syntax-directed path
//! equality.
//!
//! `decide_tm_eq` decides the judgment and produces a certificate tree;
//! `check_tm_eq` replays a certificate independently of the decision
//! procedure. Certificates embed full reduction traces rather than just the
//! normal forms, so the checker never runs the normalizer.

use thiserror::Error;

use crate::reduction::{replay, whnf, MStep};
use crate::subst::{shift, PathSubst};
use crate::syntax::{infer_path_type, is_path, type_check, Ctx, Tm, Tp};

/// Default step budget for normalization inside the decision procedure.
/// Well-typed inputs never get near it.
pub const DEFAULT_FUEL: usize = 10_000;

/// Certificate for type-directed term equality.
///
/// `AlgBase` certifies equality at the base type: both sides head-reduce
/// along the recorded traces to path-equal reducts. `AlgArr` certifies
/// equality at an arrow type: its body certifies the applications of both
/// sides (shifted) to a fresh variable in the extended context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TmEqDeriv {
    AlgBase {
        left_steps: MStep,
        right_steps: MStep,
        path: PathEqDeriv,
    },
    AlgArr {
        body: Box<TmEqDeriv>,
    },
}

impl TmEqDeriv {
    pub fn alg_base(left_steps: MStep, right_steps: MStep, path: PathEqDeriv) -> TmEqDeriv {
        TmEqDeriv::AlgBase { left_steps, right_steps, path }
    }

    pub fn alg_arr(body: TmEqDeriv) -> TmEqDeriv {
        TmEqDeriv::AlgArr { body: Box::new(body) }
    }
}

/// Certificate for syntax-directed path equality.
///
/// `PVar(k)` certifies `Var(k)` equal to itself at its declared type;
/// `PApp` combines a path certificate for the functions with a term
/// certificate for the arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathEqDeriv {
    PVar { index: usize },
    PApp {
        fun: Box<PathEqDeriv>,
        arg: Box<TmEqDeriv>,
    },
}

impl PathEqDeriv {
    pub fn pvar(index: usize) -> PathEqDeriv {
        PathEqDeriv::PVar { index }
    }

    pub fn papp(fun: PathEqDeriv, arg: TmEqDeriv) -> PathEqDeriv {
        PathEqDeriv::PApp { fun: Box::new(fun), arg: Box::new(arg) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgoError {
    #[error("ill-typed input: {0}")]
    IllTyped(String),
    #[error("fuel exhausted during normalization")]
    FuelExhausted,
    #[error("path substitution does not match the derivation's context")]
    InvalidPathSubst,
    #[error("transitivity applied to derivations with different middle terms")]
    MiddleTermMismatch,
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
}

/// Decides `ctx |- m <=> n : ty` with the default fuel.
///
/// Both terms must check at `ty`; an ill-typed input is a contract error,
/// reported apart from plain inequality.
pub fn decide_tm_eq(
    ctx: &Ctx,
    m: &Tm,
    n: &Tm,
    ty: &Tp,
) -> Result<Option<TmEqDeriv>, AlgoError> {
    decide_tm_eq_with_fuel(ctx, m, n, ty, DEFAULT_FUEL)
}

pub fn decide_tm_eq_with_fuel(
    ctx: &Ctx,
    m: &Tm,
    n: &Tm,
    ty: &Tp,
    fuel: usize,
) -> Result<Option<TmEqDeriv>, AlgoError> {
    if !type_check(ctx, m, ty) {
        return Err(AlgoError::IllTyped("left term".to_string()));
    }
    if !type_check(ctx, n, ty) {
        return Err(AlgoError::IllTyped("right term".to_string()));
    }
    decide_inner(ctx, m, n, ty, fuel)
}

fn decide_inner(
    ctx: &Ctx,
    m: &Tm,
    n: &Tm,
    ty: &Tp,
    fuel: usize,
) -> Result<Option<TmEqDeriv>, AlgoError> {
    match ty {
        Tp::Arr(dom, cod) => {
            let ctx2 = ctx.extend((**dom).clone());
            let m2 = Tm::app(shift(m, 1), Tm::Var(0));
            let n2 = Tm::app(shift(n, 1), Tm::Var(0));
            Ok(decide_inner(&ctx2, &m2, &n2, cod, fuel)?.map(TmEqDeriv::alg_arr))
        }
        Tp::Base => {
            let (p, left_steps) = whnf(m, fuel).map_err(|_| AlgoError::FuelExhausted)?;
            let (q, right_steps) = whnf(n, fuel).map_err(|_| AlgoError::FuelExhausted)?;
            if !is_path(&p) || !is_path(&q) {
                // Only reachable for ill-scoped or base-typed closed input.
                return Ok(None);
            }
            Ok(decide_path_eq(ctx, &p, &q)
                .map(|(path, _)| TmEqDeriv::alg_base(left_steps, right_steps, path)))
        }
    }
}

/// Decides path equality; on success also returns the common unique type.
pub fn decide_path_eq(ctx: &Ctx, p: &Tm, q: &Tm) -> Option<(PathEqDeriv, Tp)> {
    match (p, q) {
        (Tm::Var(j), Tm::Var(k)) if j == k => {
            ctx.lookup(*j).map(|ty| (PathEqDeriv::pvar(*j), ty.clone()))
        }
        (Tm::App(p1, a1), Tm::App(q1, a2)) => {
            let (fun, fun_ty) = decide_path_eq(ctx, p1, q1)?;
            match fun_ty {
                Tp::Arr(dom, cod) => {
                    let arg = decide_inner(ctx, a1, a2, &dom, DEFAULT_FUEL).ok()??;
                    Some((PathEqDeriv::papp(fun, arg), *cod))
                }
                Tp::Base => None,
            }
        }
        _ => None,
    }
}

/// Replays a term certificate against its claimed statement.
pub fn check_tm_eq(ctx: &Ctx, d: &TmEqDeriv, m: &Tm, n: &Tm, ty: &Tp) -> bool {
    match (d, ty) {
        (TmEqDeriv::AlgArr { body }, Tp::Arr(dom, cod)) => {
            let ctx2 = ctx.extend((**dom).clone());
            let m2 = Tm::app(shift(m, 1), Tm::Var(0));
            let n2 = Tm::app(shift(n, 1), Tm::Var(0));
            check_tm_eq(&ctx2, body, &m2, &n2, cod)
        }
        (TmEqDeriv::AlgBase { left_steps, right_steps, path }, Tp::Base) => {
            let (Some(p), Some(q)) = (replay(m, left_steps), replay(n, right_steps)) else {
                return false;
            };
            check_path_eq(ctx, path, &p, &q) == Some(Tp::Base)
        }
        _ => false,
    }
}

/// Replays a path certificate; returns the type it proves equality at.
pub fn check_path_eq(ctx: &Ctx, d: &PathEqDeriv, p: &Tm, q: &Tm) -> Option<Tp> {
    match d {
        PathEqDeriv::PVar { index } => {
            if p == &Tm::Var(*index) && q == &Tm::Var(*index) {
                ctx.lookup(*index).cloned()
            } else {
                None
            }
        }
        PathEqDeriv::PApp { fun, arg } => match (p, q) {
            (Tm::App(p1, a1), Tm::App(q1, a2)) => match check_path_eq(ctx, fun, p1, q1)? {
                Tp::Arr(dom, cod) => {
                    if check_tm_eq(ctx, arg, a1, a2, &dom) {
                        Some(*cod)
                    } else {
                        None
                    }
                }
                Tp::Base => None,
            },
            _ => None,
        },
    }
}

/// Transports a term certificate for `ctx |- m <=> n : ty` along a path
/// substitution, yielding one for the substituted statement.
///
/// Traces carry over step for step: head steps survive substitution at the
/// same spine position. Variable leaves are re-derived from the substitution's
/// path entries.
pub fn weaken_tm_eq(
    pi: &PathSubst,
    d: &TmEqDeriv,
    ctx: &Ctx,
    m: &Tm,
    n: &Tm,
    ty: &Tp,
) -> Result<TmEqDeriv, AlgoError> {
    if pi.domain() != ctx {
        return Err(AlgoError::InvalidPathSubst);
    }
    match (d, ty) {
        (TmEqDeriv::AlgArr { body }, Tp::Arr(dom, cod)) => {
            let pi2 = pi.lift(dom);
            let ctx2 = ctx.extend((**dom).clone());
            let m2 = Tm::app(shift(m, 1), Tm::Var(0));
            let n2 = Tm::app(shift(n, 1), Tm::Var(0));
            Ok(TmEqDeriv::alg_arr(weaken_tm_eq(&pi2, body, &ctx2, &m2, &n2, cod)?))
        }
        (TmEqDeriv::AlgBase { left_steps, right_steps, path }, Tp::Base) => {
            let p = replay(m, left_steps)
                .ok_or_else(|| AlgoError::InvalidDerivation("left trace does not replay".into()))?;
            let q = replay(n, right_steps).ok_or_else(|| {
                AlgoError::InvalidDerivation("right trace does not replay".into())
            })?;
            let path2 = weaken_path_eq(pi, path, &p, &q)?;
            Ok(TmEqDeriv::alg_base(left_steps.clone(), right_steps.clone(), path2))
        }
        _ => Err(AlgoError::InvalidDerivation(
            "certificate shape does not match the type".into(),
        )),
    }
}

/// Path-certificate counterpart of [`weaken_tm_eq`]. A `PVar` leaf becomes
/// the self-equality derivation of the substitution's entry for it.
pub fn weaken_path_eq(
    pi: &PathSubst,
    d: &PathEqDeriv,
    p: &Tm,
    q: &Tm,
) -> Result<PathEqDeriv, AlgoError> {
    match d {
        PathEqDeriv::PVar { index } => {
            if p != &Tm::Var(*index) || q != &Tm::Var(*index) {
                return Err(AlgoError::InvalidDerivation(
                    "variable leaf does not match its terms".into(),
                ));
            }
            let entry = pi.entry(*index).ok_or(AlgoError::InvalidPathSubst)?;
            decide_path_eq(pi.codomain(), entry, entry)
                .map(|(d2, _)| d2)
                .ok_or(AlgoError::InvalidPathSubst)
        }
        PathEqDeriv::PApp { fun, arg } => match (p, q) {
            (Tm::App(p1, a1), Tm::App(q1, a2)) => {
                let fun_ty = infer_path_type(pi.domain(), p1)
                    .map_err(|e| AlgoError::InvalidDerivation(e.to_string()))?;
                let Tp::Arr(dom, _) = fun_ty else {
                    return Err(AlgoError::InvalidDerivation(
                        "application with base-typed function".into(),
                    ));
                };
                let fun2 = weaken_path_eq(pi, fun, p1, q1)?;
                let arg2 = weaken_tm_eq(pi, arg, pi.domain(), a1, a2, &dom)?;
                Ok(PathEqDeriv::papp(fun2, arg2))
            }
            _ => Err(AlgoError::InvalidDerivation(
                "application node over non-application terms".into(),
            )),
        },
    }
}

/// Certificate for the flipped statement; purely structural.
pub fn sym_tm_eq(d: &TmEqDeriv) -> TmEqDeriv {
    match d {
        TmEqDeriv::AlgArr { body } => TmEqDeriv::alg_arr(sym_tm_eq(body)),
        TmEqDeriv::AlgBase { left_steps, right_steps, path } => {
            TmEqDeriv::alg_base(right_steps.clone(), left_steps.clone(), sym_path_eq(path))
        }
    }
}

pub fn sym_path_eq(d: &PathEqDeriv) -> PathEqDeriv {
    match d {
        PathEqDeriv::PVar { index } => PathEqDeriv::pvar(*index),
        PathEqDeriv::PApp { fun, arg } => {
            PathEqDeriv::papp(sym_path_eq(fun), sym_tm_eq(arg))
        }
    }
}

/// Composes certificates for `m <=> mid` and `mid <=> o` into one for
/// `m <=> o`. The callers' middle terms must coincide.
///
/// At the base type this leans on determinacy: both inner traces start from
/// the shared middle term and stop at a path, so they reach the same reduct
/// and can be dropped from the composite.
pub fn trans_tm_eq(
    d1: &TmEqDeriv,
    mid_left: &Tm,
    d2: &TmEqDeriv,
    mid_right: &Tm,
) -> Result<TmEqDeriv, AlgoError> {
    if mid_left != mid_right {
        return Err(AlgoError::MiddleTermMismatch);
    }
    match (d1, d2) {
        (TmEqDeriv::AlgArr { body: b1 }, TmEqDeriv::AlgArr { body: b2 }) => {
            let mid2 = Tm::app(shift(mid_left, 1), Tm::Var(0));
            Ok(TmEqDeriv::alg_arr(trans_tm_eq(b1, &mid2, b2, &mid2)?))
        }
        (
            TmEqDeriv::AlgBase { left_steps: l1, right_steps: r1, path: p1 },
            TmEqDeriv::AlgBase { left_steps: l2, right_steps: r2, path: p2 },
        ) => {
            let q1 = replay(mid_left, r1).ok_or_else(|| {
                AlgoError::InvalidDerivation("middle trace of the first derivation".into())
            })?;
            let q2 = replay(mid_right, l2).ok_or_else(|| {
                AlgoError::InvalidDerivation("middle trace of the second derivation".into())
            })?;
            if q1 != q2 {
                return Err(AlgoError::InvalidDerivation(
                    "traces from the middle term reach different reducts".into(),
                ));
            }
            Ok(TmEqDeriv::alg_base(l1.clone(), r2.clone(), trans_path_eq(p1, &q1, p2, &q2)?))
        }
        _ => Err(AlgoError::InvalidDerivation("certificate shapes differ".into())),
    }
}

pub fn trans_path_eq(
    d1: &PathEqDeriv,
    mid_left: &Tm,
    d2: &PathEqDeriv,
    mid_right: &Tm,
) -> Result<PathEqDeriv, AlgoError> {
    if mid_left != mid_right {
        return Err(AlgoError::MiddleTermMismatch);
    }
    match (d1, d2) {
        (PathEqDeriv::PVar { index: j }, PathEqDeriv::PVar { index: k }) => {
            if j == k {
                Ok(PathEqDeriv::pvar(*j))
            } else {
                Err(AlgoError::MiddleTermMismatch)
            }
        }
        (
            PathEqDeriv::PApp { fun: f1, arg: a1 },
            PathEqDeriv::PApp { fun: f2, arg: a2 },
        ) => match mid_left {
            Tm::App(mf, ma) => Ok(PathEqDeriv::papp(
                trans_path_eq(f1, mf, f2, mf)?,
                trans_tm_eq(a1, ma, a2, ma)?,
            )),
            _ => Err(AlgoError::InvalidDerivation(
                "application node over a non-application middle term".into(),
            )),
        },
        _ => Err(AlgoError::InvalidDerivation("certificate shapes differ".into())),
    }
}
