//! The executable logical relation.
//!
//! A [`LogWitness`] carries the computational content of logical equivalence
//! at a type: a term-equality certificate at the base type, and at an arrow
//! type a Kripke-style mapping that takes a path substitution into a target
//! context together with a witness for related arguments, and yields a
//! witness for the related applications.
//!
//! [`reflect`] and [`reify`] convert between path equality, logical
//! equivalence, and algorithmic equality; [`fundamental`] interprets a
//! declarative derivation under an environment of related substitutions; and
//! [`completeness`] composes the two into a certificate translator.
//!
//! Every witness stores the statement it claims, and [`LogWitness::apply`]
//! asserts that each mapping output matches the statement computed from its
//! inputs, so the substitution reasoning that justifies each step is checked
//! at runtime rather than assumed.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algo::{
    check_tm_eq, sym_tm_eq, trans_tm_eq, weaken_path_eq, weaken_tm_eq, PathEqDeriv, TmEqDeriv,
};
use crate::decl::{check_decl, DeclDeriv, DeclRule};
use crate::reduction::{check_mstep, MStep, Step};
use crate::subst::{PathSubst, Subst};
use crate::syntax::{Ctx, EqStatement, Tm, Tp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogrelError {
    #[error("path substitution does not match the witness context")]
    InvalidPathSubst,
    #[error("trace does not reduce onto the witness statement")]
    InvalidTrace,
    #[error("witnesses do not share a middle term")]
    MiddleTermMismatch,
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
}

/// The arrow-type evidence: given a path substitution out of the witness
/// context and a witness relating two arguments in the target context,
/// produces a witness relating the applications.
pub type ArrMapping = Arc<dyn Fn(&PathSubst, &LogWitness) -> LogWitness + Send + Sync>;

#[derive(Clone)]
enum Evidence {
    Base(TmEqDeriv),
    Arr(ArrMapping),
}

/// A witness of `ctx |- left ~ right : ty` in the logical relation,
/// stratified on the type.
#[derive(Clone)]
pub struct LogWitness {
    stmt: EqStatement,
    evidence: Evidence,
}

impl fmt::Debug for LogWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.evidence {
            Evidence::Base(_) => "base",
            Evidence::Arr(_) => "arrow",
        };
        f.debug_struct("LogWitness")
            .field("stmt", &self.stmt)
            .field("evidence", &kind)
            .finish()
    }
}

impl LogWitness {
    /// Base-type witness; the certificate must check against the statement.
    pub fn base(stmt: EqStatement, deriv: TmEqDeriv) -> Result<LogWitness, LogrelError> {
        if stmt.ty != Tp::Base {
            return Err(LogrelError::InvalidDerivation(
                "base evidence at an arrow type".into(),
            ));
        }
        if !check_tm_eq(&stmt.ctx, &deriv, &stmt.left, &stmt.right, &stmt.ty) {
            return Err(LogrelError::InvalidDerivation(
                "certificate does not check against the statement".into(),
            ));
        }
        Ok(LogWitness { stmt, evidence: Evidence::Base(deriv) })
    }

    fn base_unchecked(stmt: EqStatement, deriv: TmEqDeriv) -> LogWitness {
        debug_assert_eq!(stmt.ty, Tp::Base);
        LogWitness { stmt, evidence: Evidence::Base(deriv) }
    }

    /// Arrow-type witness from a mapping obeying the statement discipline.
    pub fn arrow(stmt: EqStatement, mapping: ArrMapping) -> LogWitness {
        assert!(stmt.ty.is_arr(), "arrow evidence requires an arrow type");
        LogWitness { stmt, evidence: Evidence::Arr(mapping) }
    }

    pub fn statement(&self) -> &EqStatement {
        &self.stmt
    }

    /// Applies an arrow witness to related arguments under a path
    /// substitution. Panics if the inputs violate the contract or the
    /// mapping returns a witness for the wrong statement; both indicate a
    /// broken construction rather than bad user input.
    pub fn apply(&self, pi: &PathSubst, arg: &LogWitness) -> LogWitness {
        let Evidence::Arr(mapping) = &self.evidence else {
            panic!("apply on a base-type witness");
        };
        let Tp::Arr(dom, cod) = &self.stmt.ty else {
            unreachable!("arrow evidence carries an arrow type");
        };
        assert_eq!(pi.domain(), &self.stmt.ctx, "substitution domain mismatch");
        assert_eq!(&arg.stmt.ctx, pi.codomain(), "argument context mismatch");
        assert_eq!(&arg.stmt.ty, dom.as_ref(), "argument type mismatch");
        let out = mapping(pi, arg);
        let expected = EqStatement::new(
            pi.codomain().clone(),
            Tm::app(pi.apply(&self.stmt.left), arg.stmt.left.clone()),
            Tm::app(pi.apply(&self.stmt.right), arg.stmt.right.clone()),
            (**cod).clone(),
        );
        assert_eq!(
            out.stmt, expected,
            "mapping produced a witness for the wrong statement"
        );
        out
    }
}

/// Embeds path equality into the logical relation; structural on the type.
///
/// At the base type the evidence is forced: empty traces around the given
/// path certificate. At an arrow type the mapping weakens the certificate,
/// reifies the argument witness, and reflects the extended application.
pub fn reflect(ctx: &Ctx, p: &Tm, q: &Tm, ty: &Tp, d: &PathEqDeriv) -> LogWitness {
    let stmt = EqStatement::new(ctx.clone(), p.clone(), q.clone(), ty.clone());
    match ty {
        Tp::Base => LogWitness::base_unchecked(
            stmt,
            TmEqDeriv::alg_base(MStep::empty(), MStep::empty(), d.clone()),
        ),
        Tp::Arr(_, cod) => {
            let p = p.clone();
            let q = q.clone();
            let cod = (**cod).clone();
            let d = d.clone();
            let mapping: ArrMapping = Arc::new(move |pi, arg| {
                let d2 = weaken_path_eq(pi, &d, &p, &q)
                    .expect("path certificates weaken along path substitutions");
                let arg_deriv = reify(arg);
                let p2 = Tm::app(pi.apply(&p), arg.stmt.left.clone());
                let q2 = Tm::app(pi.apply(&q), arg.stmt.right.clone());
                reflect(
                    pi.codomain(),
                    &p2,
                    &q2,
                    &cod,
                    &PathEqDeriv::papp(d2, arg_deriv),
                )
            });
            LogWitness::arrow(stmt, mapping)
        }
    }
}

/// Extracts an algorithmic certificate from a witness; structural on the
/// type. At an arrow type the mapping is instantiated with the one-step
/// weakening into the extended context and a fresh-variable argument
/// obtained by reflection.
pub fn reify(w: &LogWitness) -> TmEqDeriv {
    match &w.evidence {
        Evidence::Base(d) => d.clone(),
        Evidence::Arr(_) => {
            let Tp::Arr(dom, _) = &w.stmt.ty else {
                unreachable!("arrow evidence carries an arrow type");
            };
            let pi = PathSubst::weakening(&w.stmt.ctx, std::slice::from_ref(dom));
            let ctx2 = w.stmt.ctx.extend((**dom).clone());
            let fresh = reflect(&ctx2, &Tm::Var(0), &Tm::Var(0), dom, &PathEqDeriv::pvar(0));
            let inner = w.apply(&pi, &fresh);
            TmEqDeriv::alg_arr(reify(&inner))
        }
    }
}

/// Transports a witness along a path substitution.
pub fn log_monotone(pi: &PathSubst, w: &LogWitness) -> Result<LogWitness, LogrelError> {
    if pi.domain() != &w.stmt.ctx {
        return Err(LogrelError::InvalidPathSubst);
    }
    let stmt = EqStatement::new(
        pi.codomain().clone(),
        pi.apply(&w.stmt.left),
        pi.apply(&w.stmt.right),
        w.stmt.ty.clone(),
    );
    match &w.evidence {
        Evidence::Base(d) => {
            let d2 = weaken_tm_eq(pi, d, &w.stmt.ctx, &w.stmt.left, &w.stmt.right, &w.stmt.ty)
                .map_err(|_| LogrelError::InvalidPathSubst)?;
            Ok(LogWitness::base_unchecked(stmt, d2))
        }
        Evidence::Arr(_) => {
            let w = w.clone();
            let pi = pi.clone();
            let mapping: ArrMapping = Arc::new(move |pi2, arg| {
                let composed = pi.compose(pi2).expect("surrounding contexts line up");
                w.apply(&composed, arg)
            });
            Ok(LogWitness::arrow(stmt, mapping))
        }
    }
}

/// Backward closure of the relation under weak head reduction: given traces
/// from new sources onto the witness's terms, yields a witness for the
/// sources. Structural on the type; under an arrow, every head step is
/// transported below the pending application with one extra `AppLeft`.
pub fn head_expand(
    src_left: &Tm,
    tr_left: &MStep,
    src_right: &Tm,
    tr_right: &MStep,
    w: &LogWitness,
) -> Result<LogWitness, LogrelError> {
    if !check_mstep(src_left, tr_left, &w.stmt.left)
        || !check_mstep(src_right, tr_right, &w.stmt.right)
    {
        return Err(LogrelError::InvalidTrace);
    }
    let stmt = EqStatement::new(
        w.stmt.ctx.clone(),
        src_left.clone(),
        src_right.clone(),
        w.stmt.ty.clone(),
    );
    match &w.evidence {
        Evidence::Base(d) => {
            let TmEqDeriv::AlgBase { left_steps, right_steps, path } = d else {
                unreachable!("base evidence at the base type");
            };
            let d2 = TmEqDeriv::alg_base(
                tr_left.concat(left_steps),
                tr_right.concat(right_steps),
                path.clone(),
            );
            Ok(LogWitness::base_unchecked(stmt, d2))
        }
        Evidence::Arr(_) => {
            let w = w.clone();
            let src_left = src_left.clone();
            let src_right = src_right.clone();
            let tr_left = tr_left.clone();
            let tr_right = tr_right.clone();
            let mapping: ArrMapping = Arc::new(move |pi, arg| {
                let inner = w.apply(pi, arg);
                let app_left = Tm::app(pi.apply(&src_left), arg.stmt.left.clone());
                let app_right = Tm::app(pi.apply(&src_right), arg.stmt.right.clone());
                head_expand(
                    &app_left,
                    &tr_left.under_app_left(),
                    &app_right,
                    &tr_right.under_app_left(),
                    &inner,
                )
                .expect("head steps survive substitution and application")
            });
            Ok(LogWitness::arrow(stmt, mapping))
        }
    }
}

/// Witness for the flipped statement.
pub fn log_sym(w: &LogWitness) -> LogWitness {
    let stmt = w.stmt.flipped();
    match &w.evidence {
        Evidence::Base(d) => LogWitness::base_unchecked(stmt, sym_tm_eq(d)),
        Evidence::Arr(_) => {
            let w = w.clone();
            let mapping: ArrMapping = Arc::new(move |pi, arg| {
                // Flip the arguments, apply, flip the result.
                log_sym(&w.apply(pi, &log_sym(arg)))
            });
            LogWitness::arrow(stmt, mapping)
        }
    }
}

/// Composes witnesses sharing a middle term.
pub fn log_trans(w1: &LogWitness, w2: &LogWitness) -> Result<LogWitness, LogrelError> {
    if w1.stmt.right != w2.stmt.left || w1.stmt.ctx != w2.stmt.ctx || w1.stmt.ty != w2.stmt.ty {
        return Err(LogrelError::MiddleTermMismatch);
    }
    let stmt = EqStatement::new(
        w1.stmt.ctx.clone(),
        w1.stmt.left.clone(),
        w2.stmt.right.clone(),
        w1.stmt.ty.clone(),
    );
    match (&w1.evidence, &w2.evidence) {
        (Evidence::Base(d1), Evidence::Base(d2)) => {
            let d = trans_tm_eq(d1, &w1.stmt.right, d2, &w2.stmt.left)
                .map_err(|e| LogrelError::InvalidDerivation(e.to_string()))?;
            Ok(LogWitness::base_unchecked(stmt, d))
        }
        (Evidence::Arr(_), Evidence::Arr(_)) => {
            let w1 = w1.clone();
            let w2 = w2.clone();
            let mapping: ArrMapping = Arc::new(move |pi, arg| {
                let first = w1.apply(pi, arg);
                // The second witness eats the argument related to itself.
                let arg_refl = log_trans(&log_sym(arg), arg)
                    .expect("an argument shares its middle with itself");
                let second = w2.apply(pi, &arg_refl);
                log_trans(&first, &second).expect("application results share the middle term")
            });
            Ok(LogWitness::arrow(stmt, mapping))
        }
        _ => Err(LogrelError::InvalidDerivation(
            "witness evidence shapes differ".into(),
        )),
    }
}

/// Environment of the fundamental theorem: two substitutions out of `source`
/// into `target` with a witness relating them pointwise at the declared
/// types.
#[derive(Debug, Clone)]
pub struct LogSubEnv {
    target: Ctx,
    source: Ctx,
    s1: Subst,
    s2: Subst,
    /// Aligned with the substitution entries: the witness at distance `k`
    /// from the right end relates the entries for `Var(k)`.
    witnesses: Vec<LogWitness>,
}

impl LogSubEnv {
    /// The identity substitution related to itself, with each variable
    /// reflected at its declared type.
    pub fn identity(ctx: &Ctx) -> LogSubEnv {
        let n = ctx.len();
        let witnesses = (0..n)
            .map(|pos| {
                let k = n - 1 - pos;
                let ty = ctx.lookup(k).expect("index in range");
                reflect(ctx, &Tm::Var(k), &Tm::Var(k), ty, &PathEqDeriv::pvar(k))
            })
            .collect();
        LogSubEnv {
            target: ctx.clone(),
            source: ctx.clone(),
            s1: Subst::identity(n),
            s2: Subst::identity(n),
            witnesses,
        }
    }

    pub fn target(&self) -> &Ctx {
        &self.target
    }

    pub fn source(&self) -> &Ctx {
        &self.source
    }

    pub fn s1(&self) -> &Subst {
        &self.s1
    }

    pub fn s2(&self) -> &Subst {
        &self.s2
    }

    /// Witness relating the entries for `Var(k)`.
    pub fn witness(&self, k: usize) -> Option<&LogWitness> {
        let n = self.witnesses.len();
        if k < n {
            Some(&self.witnesses[n - 1 - k])
        } else {
            None
        }
    }

    /// Extends the environment with a witness for a new innermost variable.
    pub fn extend(&self, w: LogWitness) -> LogSubEnv {
        assert_eq!(w.stmt.ctx, self.target, "witness context mismatch");
        let mut witnesses = self.witnesses.clone();
        let source = self.source.extend(w.stmt.ty.clone());
        let s1 = self.s1.extend(w.stmt.left.clone());
        let s2 = self.s2.extend(w.stmt.right.clone());
        witnesses.push(w);
        LogSubEnv { target: self.target.clone(), source, s1, s2, witnesses }
    }

    /// Transports the whole environment along a path substitution.
    pub fn weaken(&self, pi: &PathSubst) -> Result<LogSubEnv, LogrelError> {
        if pi.domain() != &self.target {
            return Err(LogrelError::InvalidPathSubst);
        }
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| log_monotone(pi, w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LogSubEnv {
            target: pi.codomain().clone(),
            source: self.source.clone(),
            s1: self.s1.compose(pi.subst()),
            s2: self.s2.compose(pi.subst()),
            witnesses,
        })
    }

    /// The environment relating `s2` to `s1`.
    pub fn swapped(&self) -> LogSubEnv {
        LogSubEnv {
            target: self.target.clone(),
            source: self.source.clone(),
            s1: self.s2.clone(),
            s2: self.s1.clone(),
            witnesses: self.witnesses.iter().map(log_sym).collect(),
        }
    }

    /// The environment relating `s2` to itself.
    pub fn right_identity(&self) -> LogSubEnv {
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| {
                log_trans(&log_sym(w), w).expect("a witness shares its middle with itself")
            })
            .collect();
        LogSubEnv {
            target: self.target.clone(),
            source: self.source.clone(),
            s1: self.s2.clone(),
            s2: self.s2.clone(),
            witnesses,
        }
    }

    /// Statement-level invariant check.
    pub fn validate(&self) -> bool {
        let n = self.source.len();
        if self.s1.len() != n || self.s2.len() != n || self.witnesses.len() != n {
            return false;
        }
        (0..n).all(|k| {
            let w = self.witness(k).expect("length checked");
            w.stmt.ctx == self.target
                && Some(&w.stmt.left) == self.s1.entry(k)
                && Some(&w.stmt.right) == self.s2.entry(k)
                && Some(&w.stmt.ty) == self.source.lookup(k)
        })
    }
}

/// Identity environment on `ctx`; convenience alias for
/// [`LogSubEnv::identity`].
pub fn id_logsub(ctx: &Ctx) -> LogSubEnv {
    LogSubEnv::identity(ctx)
}

/// Interprets a declarative derivation under an environment of related
/// substitutions, producing a witness for the substituted statement.
pub fn fundamental(d: &DeclDeriv, env: &LogSubEnv) -> Result<LogWitness, LogrelError> {
    if !check_decl(env.source(), d, &d.left, &d.right, &d.ty) {
        return Err(LogrelError::InvalidDerivation(
            "declarative derivation does not check".into(),
        ));
    }
    if !env.validate() {
        return Err(LogrelError::InvalidDerivation(
            "environment statements are inconsistent".into(),
        ));
    }
    Ok(fundamental_inner(d, env))
}

fn fundamental_inner(d: &DeclDeriv, env: &LogSubEnv) -> LogWitness {
    match &d.rule {
        DeclRule::Var { index } => env
            .witness(*index)
            .expect("checked derivations look up in range")
            .clone(),
        DeclRule::Lam { body } => {
            let stmt = substituted_statement(d, env);
            let body = (**body).clone();
            let env = env.clone();
            let left = stmt.left.clone();
            let right = stmt.right.clone();
            let mapping: ArrMapping = Arc::new(move |pi, arg| {
                let env2 = env
                    .weaken(pi)
                    .expect("environment transports along the substitution")
                    .extend(arg.clone());
                let ih = fundamental_inner(&body, &env2);
                let src_left = Tm::app(pi.apply(&left), arg.stmt.left.clone());
                let src_right = Tm::app(pi.apply(&right), arg.stmt.right.clone());
                head_expand(
                    &src_left,
                    &MStep::single(Step::BetaHead),
                    &src_right,
                    &MStep::single(Step::BetaHead),
                    &ih,
                )
                .expect("one beta step reaches the instantiated bodies")
            });
            LogWitness::arrow(stmt, mapping)
        }
        DeclRule::Beta { body, arg } => {
            let w_arg = fundamental_inner(arg, env);
            let env2 = env.extend(w_arg);
            let ih = fundamental_inner(body, &env2);
            let src_left = env.s1().apply(&d.left);
            let src_right = env.s2().apply(&d.right);
            // The left side contracts its redex; the right side is already
            // the substituted conclusion.
            head_expand(
                &src_left,
                &MStep::single(Step::BetaHead),
                &src_right,
                &MStep::empty(),
                &ih,
            )
            .expect("the substituted conclusion matches the instantiated body")
        }
        DeclRule::Ext { body } => {
            let stmt = substituted_statement(d, env);
            let body = (**body).clone();
            let env = env.clone();
            let mapping: ArrMapping = Arc::new(move |pi, arg| {
                let env2 = env
                    .weaken(pi)
                    .expect("environment transports along the substitution")
                    .extend(arg.clone());
                fundamental_inner(&body, &env2)
            });
            LogWitness::arrow(stmt, mapping)
        }
        DeclRule::App { fun, arg } => {
            let w_fun = fundamental_inner(fun, env);
            let w_arg = fundamental_inner(arg, env);
            w_fun.apply(&PathSubst::identity(env.target()), &w_arg)
        }
        DeclRule::Sym { inner } => log_sym(&fundamental_inner(inner, &env.swapped())),
        DeclRule::Trans { first, second } => {
            let w1 = fundamental_inner(first, env);
            let w2 = fundamental_inner(second, &env.right_identity());
            log_trans(&w1, &w2).expect("instantiated middles agree")
        }
    }
}

fn substituted_statement(d: &DeclDeriv, env: &LogSubEnv) -> EqStatement {
    EqStatement::new(
        env.target().clone(),
        env.s1().apply(&d.left),
        env.s2().apply(&d.right),
        d.ty.clone(),
    )
}

/// Translates a checked declarative derivation into an algorithmic
/// certificate by interpreting it under the identity environment and
/// reifying the resulting witness.
pub fn completeness(ctx: &Ctx, d: &DeclDeriv) -> Result<TmEqDeriv, LogrelError> {
    if !check_decl(ctx, d, &d.left, &d.right, &d.ty) {
        return Err(LogrelError::InvalidDerivation(
            "declarative derivation does not check".into(),
        ));
    }
    let w = fundamental_inner(d, &LogSubEnv::identity(ctx));
    debug_assert_eq!(w.statement().left, d.left);
    debug_assert_eq!(w.statement().right, d.right);
    Ok(reify(&w))
}
