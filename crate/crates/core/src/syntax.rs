//! Object-language types, terms, typing contexts, and the type checker.

use thiserror::Error;

/// Simple types over the single base type `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tp {
    Base,
    Arr(Box<Tp>, Box<Tp>),
}

impl Tp {
    pub fn arr(dom: Tp, cod: Tp) -> Tp {
        Tp::Arr(Box::new(dom), Box::new(cod))
    }

    pub fn is_arr(&self) -> bool {
        matches!(self, Tp::Arr(..))
    }

    /// Nesting depth; the base type has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Tp::Base => 0,
            Tp::Arr(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

/// Lambda terms in de Bruijn representation.
///
/// `Var(0)` refers to the innermost enclosing binder; free variables index
/// into the ambient context from its right end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tm {
    Var(usize),
    Lam(Box<Tm>),
    App(Box<Tm>, Box<Tm>),
}

impl Tm {
    pub fn lam(body: Tm) -> Tm {
        Tm::Lam(Box::new(body))
    }

    pub fn app(fun: Tm, arg: Tm) -> Tm {
        Tm::App(Box::new(fun), Box::new(arg))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Tm::Var(_) => 1,
            Tm::Lam(b) => 1 + b.size(),
            Tm::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

/// A typing context. The entry at distance `k` from the right end gives the
/// type of `Var(k)`, so extending binds a new innermost variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ctx(Vec<Tp>);

impl Ctx {
    pub fn empty() -> Ctx {
        Ctx(Vec::new())
    }

    /// Builds a context from types listed outermost first.
    pub fn from_types(types: Vec<Tp>) -> Ctx {
        Ctx(types)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn types(&self) -> &[Tp] {
        &self.0
    }

    /// Type of `Var(k)`, if the index is in range.
    pub fn lookup(&self, k: usize) -> Option<&Tp> {
        let n = self.0.len();
        if k < n {
            Some(&self.0[n - 1 - k])
        } else {
            None
        }
    }

    /// Context extended with a new innermost binding.
    pub fn extend(&self, ty: Tp) -> Ctx {
        let mut types = self.0.clone();
        types.push(ty);
        Ctx(types)
    }

    /// Concatenation; entries of `other` become the innermost bindings.
    pub fn concat(&self, other: &Ctx) -> Ctx {
        let mut types = self.0.clone();
        types.extend(other.0.iter().cloned());
        Ctx(types)
    }
}

/// The statement of an equation `ctx |- left = right : ty`, shared by the
/// algorithmic, declarative, and logical judgments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqStatement {
    pub ctx: Ctx,
    pub left: Tm,
    pub right: Tm,
    pub ty: Tp,
}

impl EqStatement {
    pub fn new(ctx: Ctx, left: Tm, right: Tm, ty: Tp) -> EqStatement {
        EqStatement { ctx, left, right, ty }
    }

    /// The same statement with left and right swapped.
    pub fn flipped(&self) -> EqStatement {
        EqStatement {
            ctx: self.ctx.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
            ty: self.ty.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("not a path: the head is a lambda")]
    NotAPath,
    #[error("ill-typed: {0}")]
    IllTyped(String),
}

/// True for terms of the form `x M1 ... Mn`, i.e. a variable head under a
/// (possibly empty) spine of applications.
pub fn is_path(m: &Tm) -> bool {
    match m {
        Tm::Var(_) => true,
        Tm::App(f, _) => is_path(f),
        Tm::Lam(_) => false,
    }
}

/// Infers the unique type of a path. Syntax-directed, so repeated calls on
/// equal inputs return equal outputs.
pub fn infer_path_type(ctx: &Ctx, p: &Tm) -> Result<Tp, TypeError> {
    match p {
        Tm::Var(k) => ctx
            .lookup(*k)
            .cloned()
            .ok_or_else(|| TypeError::IllTyped(format!("variable {k} out of range"))),
        Tm::App(f, a) => match infer_path_type(ctx, f)? {
            Tp::Arr(dom, cod) => {
                if type_check(ctx, a, &dom) {
                    Ok(*cod)
                } else {
                    Err(TypeError::IllTyped(
                        "argument does not have the domain type".to_string(),
                    ))
                }
            }
            Tp::Base => Err(TypeError::IllTyped(
                "base-type term in function position".to_string(),
            )),
        },
        Tm::Lam(_) => Err(TypeError::NotAPath),
    }
}

/// True iff every variable of `m` is bound either by one of the `n` ambient
/// context entries or by an enclosing lambda.
pub fn is_well_scoped(m: &Tm, n: usize) -> bool {
    fn go(m: &Tm, bound: usize) -> bool {
        match m {
            Tm::Var(k) => *k < bound,
            Tm::Lam(b) => go(b, bound + 1),
            Tm::App(f, a) => go(f, bound) && go(a, bound),
        }
    }
    go(m, n)
}

/// Smallest context length in which `m` is well scoped.
pub fn min_scope(m: &Tm) -> usize {
    match m {
        Tm::Var(k) => k + 1,
        Tm::Lam(b) => min_scope(b).saturating_sub(1),
        Tm::App(f, a) => min_scope(f).max(min_scope(a)),
    }
}

// ---------------------------------------------------------------------------
// Type checking.
//
// Checking is bidirectional: lambdas are checked against arrow types and
// variables and applications are inferred. A lambda in inference position
// (the function of a beta redex) gets a fresh metavariable domain which
// first-order unification then solves, so redexes need no annotations.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum MTp {
    Base,
    Arr(Box<MTp>, Box<MTp>),
    Meta(usize),
}

impl MTp {
    fn arr(dom: MTp, cod: MTp) -> MTp {
        MTp::Arr(Box::new(dom), Box::new(cod))
    }

    fn from_tp(t: &Tp) -> MTp {
        match t {
            Tp::Base => MTp::Base,
            Tp::Arr(a, b) => MTp::arr(MTp::from_tp(a), MTp::from_tp(b)),
        }
    }
}

#[derive(Default)]
struct Unifier {
    bindings: Vec<Option<MTp>>,
}

impl Unifier {
    fn fresh(&mut self) -> MTp {
        self.bindings.push(None);
        MTp::Meta(self.bindings.len() - 1)
    }

    /// Resolves top-level metavariable chains.
    fn find(&self, t: &MTp) -> MTp {
        let mut t = t.clone();
        while let MTp::Meta(i) = t {
            match &self.bindings[i] {
                Some(b) => t = b.clone(),
                None => return MTp::Meta(i),
            }
        }
        t
    }

    fn occurs(&self, i: usize, t: &MTp) -> bool {
        match self.find(t) {
            MTp::Meta(j) => i == j,
            MTp::Base => false,
            MTp::Arr(a, b) => self.occurs(i, &a) || self.occurs(i, &b),
        }
    }

    fn unify(&mut self, a: &MTp, b: &MTp) -> bool {
        let a = self.find(a);
        let b = self.find(b);
        match (a, b) {
            (MTp::Meta(i), MTp::Meta(j)) if i == j => true,
            (MTp::Meta(i), t) | (t, MTp::Meta(i)) => {
                if self.occurs(i, &t) {
                    false
                } else {
                    self.bindings[i] = Some(t);
                    true
                }
            }
            (MTp::Base, MTp::Base) => true,
            (MTp::Arr(a1, b1), MTp::Arr(a2, b2)) => self.unify(&a1, &a2) && self.unify(&b1, &b2),
            _ => false,
        }
    }

    /// Fully resolves `t`, defaulting any unconstrained metavariables to the
    /// base type.
    fn ground(&self, t: &MTp) -> Tp {
        match self.find(t) {
            MTp::Base | MTp::Meta(_) => Tp::Base,
            MTp::Arr(a, b) => Tp::arr(self.ground(&a), self.ground(&b)),
        }
    }
}

fn infer(u: &mut Unifier, env: &mut Vec<MTp>, m: &Tm) -> Option<MTp> {
    match m {
        Tm::Var(k) => {
            let n = env.len();
            if *k < n {
                Some(env[n - 1 - k].clone())
            } else {
                None
            }
        }
        Tm::Lam(b) => {
            let dom = u.fresh();
            env.push(dom.clone());
            let cod = infer(u, env, b);
            env.pop();
            Some(MTp::arr(dom, cod?))
        }
        Tm::App(f, a) => {
            let tf = infer(u, env, f)?;
            let ta = infer(u, env, a)?;
            let res = u.fresh();
            if u.unify(&tf, &MTp::arr(ta, res.clone())) {
                Some(res)
            } else {
                None
            }
        }
    }
}

fn check(u: &mut Unifier, env: &mut Vec<MTp>, m: &Tm, expected: &MTp) -> bool {
    match m {
        Tm::Lam(b) => match u.find(expected) {
            MTp::Arr(dom, cod) => {
                env.push(*dom);
                let ok = check(u, env, b, &cod);
                env.pop();
                ok
            }
            MTp::Meta(_) => {
                let dom = u.fresh();
                let cod = u.fresh();
                if !u.unify(expected, &MTp::arr(dom.clone(), cod.clone())) {
                    return false;
                }
                env.push(dom);
                let ok = check(u, env, b, &cod);
                env.pop();
                ok
            }
            MTp::Base => false,
        },
        _ => match infer(u, env, m) {
            Some(t) => u.unify(&t, expected),
            None => false,
        },
    }
}

/// True iff `m` has type `ty` in `ctx`.
pub fn type_check(ctx: &Ctx, m: &Tm, ty: &Tp) -> bool {
    let mut u = Unifier::default();
    let mut env: Vec<MTp> = ctx.types().iter().map(MTp::from_tp).collect();
    check(&mut u, &mut env, m, &MTp::from_tp(ty))
}

/// A term annotated with the argument type at every application node, as
/// fixed by one typing of the whole term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypedTm {
    Var(usize),
    Lam(Box<TypedTm>),
    App {
        fun: Box<TypedTm>,
        arg: Box<TypedTm>,
        arg_ty: Tp,
    },
}

enum RawTyped {
    Var(usize),
    Lam(Box<RawTyped>),
    App {
        fun: Box<RawTyped>,
        arg: Box<RawTyped>,
        arg_ty: MTp,
    },
}

fn infer_annotated(u: &mut Unifier, env: &mut Vec<MTp>, m: &Tm) -> Option<(MTp, RawTyped)> {
    match m {
        Tm::Var(k) => {
            let n = env.len();
            if *k < n {
                Some((env[n - 1 - k].clone(), RawTyped::Var(*k)))
            } else {
                None
            }
        }
        Tm::Lam(b) => {
            let dom = u.fresh();
            env.push(dom.clone());
            let body = infer_annotated(u, env, b);
            env.pop();
            let (cod, body) = body?;
            Some((MTp::arr(dom, cod), RawTyped::Lam(Box::new(body))))
        }
        Tm::App(f, a) => {
            let (tf, fun) = infer_annotated(u, env, f)?;
            let (ta, arg) = infer_annotated(u, env, a)?;
            let res = u.fresh();
            if u.unify(&tf, &MTp::arr(ta.clone(), res.clone())) {
                Some((
                    res,
                    RawTyped::App {
                        fun: Box::new(fun),
                        arg: Box::new(arg),
                        arg_ty: ta,
                    },
                ))
            } else {
                None
            }
        }
    }
}

fn ground_tree(u: &Unifier, t: &RawTyped) -> TypedTm {
    match t {
        RawTyped::Var(k) => TypedTm::Var(*k),
        RawTyped::Lam(b) => TypedTm::Lam(Box::new(ground_tree(u, b))),
        RawTyped::App { fun, arg, arg_ty } => TypedTm::App {
            fun: Box::new(ground_tree(u, fun)),
            arg: Box::new(ground_tree(u, arg)),
            arg_ty: u.ground(arg_ty),
        },
    }
}

/// Types `m` against `ty` and returns the term with every application's
/// argument type filled in. Unconstrained positions default to the base type.
pub fn annotate(ctx: &Ctx, m: &Tm, ty: &Tp) -> Option<TypedTm> {
    let mut u = Unifier::default();
    let mut env: Vec<MTp> = ctx.types().iter().map(MTp::from_tp).collect();
    let (inferred, tree) = infer_annotated(&mut u, &mut env, m)?;
    if u.unify(&inferred, &MTp::from_tp(ty)) {
        Some(ground_tree(&u, &tree))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Tp {
        Tp::Base
    }

    fn arr(a: Tp, b: Tp) -> Tp {
        Tp::arr(a, b)
    }

    #[test]
    fn paths_are_variable_headed() {
        assert!(is_path(&Tm::Var(0)));
        assert!(is_path(&Tm::app(Tm::Var(0), Tm::lam(Tm::Var(0)))));
        assert!(!is_path(&Tm::lam(Tm::Var(0))));
    }

    #[test]
    fn path_closed_under_left_application() {
        let p = Tm::app(Tm::app(Tm::Var(1), Tm::Var(0)), Tm::lam(Tm::Var(0)));
        assert_eq!(is_path(&p), is_path(&Tm::app(p.clone(), Tm::Var(0))));
        let l = Tm::lam(Tm::Var(0));
        assert_eq!(is_path(&l), is_path(&Tm::app(l.clone(), Tm::Var(0))));
    }

    #[test]
    fn infer_path_type_variable() {
        let ctx = Ctx::from_types(vec![arr(i(), i())]);
        assert_eq!(infer_path_type(&ctx, &Tm::Var(0)), Ok(arr(i(), i())));
    }

    #[test]
    fn infer_path_type_application() {
        let ctx = Ctx::from_types(vec![arr(i(), i()), i()]);
        let p = Tm::app(Tm::Var(1), Tm::Var(0));
        assert_eq!(infer_path_type(&ctx, &p), Ok(i()));
        // Agreement with the checker on the inferred type.
        assert!(type_check(&ctx, &p, &i()));
    }

    #[test]
    fn infer_path_type_rejects_base_head() {
        let ctx = Ctx::from_types(vec![i()]);
        let p = Tm::app(Tm::Var(0), Tm::Var(0));
        assert!(matches!(infer_path_type(&ctx, &p), Err(TypeError::IllTyped(_))));
    }

    #[test]
    fn infer_path_type_rejects_lambda() {
        let ctx = Ctx::empty();
        assert_eq!(
            infer_path_type(&ctx, &Tm::lam(Tm::Var(0))),
            Err(TypeError::NotAPath)
        );
    }

    #[test]
    fn identity_checks_at_arrow_only() {
        let id = Tm::lam(Tm::Var(0));
        assert!(type_check(&Ctx::empty(), &id, &arr(i(), i())));
        assert!(!type_check(&Ctx::empty(), &id, &i()));
    }

    #[test]
    fn nested_application_with_ill_typed_leaf() {
        // f (f (f (\x. x))) where f : i -> i; the lambda leaf is not of type i.
        let ctx = Ctx::from_types(vec![arr(i(), i())]);
        let mut m = Tm::lam(Tm::Var(0));
        for _ in 0..3 {
            m = Tm::app(Tm::Var(0), m);
        }
        assert!(!type_check(&ctx, &m, &i()));
    }

    #[test]
    fn beta_redex_checks_without_annotations() {
        // (\x. x) z : i with z : i.
        let ctx = Ctx::from_types(vec![i()]);
        let m = Tm::app(Tm::lam(Tm::Var(0)), Tm::Var(0));
        assert!(type_check(&ctx, &m, &i()));
        // (\x. x) (\y. y) : i -> i; the argument's type is solved by
        // unification.
        let m = Tm::app(Tm::lam(Tm::Var(0)), Tm::lam(Tm::Var(0)));
        assert!(type_check(&Ctx::empty(), &m, &arr(i(), i())));
    }

    #[test]
    fn self_application_is_rejected() {
        let m = Tm::lam(Tm::app(Tm::Var(0), Tm::Var(0)));
        assert!(!type_check(&Ctx::empty(), &m, &arr(i(), i())));
        assert!(!type_check(&Ctx::empty(), &m, &arr(arr(i(), i()), i())));
    }

    // Exhaustive rule-based derivation search, used as an independent oracle
    // for the unification-based checker. The application rule existentially
    // quantifies over the argument type, searched in a finite universe.
    fn oracle_has_type(ctx: &Ctx, m: &Tm, ty: &Tp, universe: &[Tp]) -> bool {
        match m {
            Tm::Var(k) => ctx.lookup(*k) == Some(ty),
            Tm::Lam(b) => match ty {
                Tp::Arr(a, c) => oracle_has_type(&ctx.extend((**a).clone()), b, c, universe),
                Tp::Base => false,
            },
            Tm::App(f, a) => universe.iter().any(|t| {
                oracle_has_type(ctx, f, &Tp::arr(t.clone(), ty.clone()), universe)
                    && oracle_has_type(ctx, a, t, universe)
            }),
        }
    }

    fn types_up_to(depth: usize) -> Vec<Tp> {
        let mut by_depth: Vec<Vec<Tp>> = vec![vec![Tp::Base]];
        for d in 1..=depth {
            let mut new = Vec::new();
            let smaller: Vec<Tp> = by_depth.iter().flatten().cloned().collect();
            for a in &smaller {
                for b in &smaller {
                    let t = Tp::arr(a.clone(), b.clone());
                    if t.depth() == d {
                        new.push(t);
                    }
                }
            }
            by_depth.push(new);
        }
        by_depth.into_iter().flatten().collect()
    }

    fn all_terms(size: usize, scope: usize) -> Vec<Tm> {
        if size == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        if size == 1 {
            for k in 0..scope {
                out.push(Tm::Var(k));
            }
            return out;
        }
        for b in all_terms(size - 1, scope + 1) {
            out.push(Tm::lam(b));
        }
        for fs in 1..size - 1 {
            for f in all_terms(fs, scope) {
                for a in all_terms(size - 1 - fs, scope) {
                    out.push(Tm::app(f.clone(), a));
                }
            }
        }
        out
    }

    #[test]
    fn checker_agrees_with_derivation_search() {
        let universe = types_up_to(3);
        let queries = types_up_to(2);
        let ctx = Ctx::from_types(vec![arr(i(), i()), i()]);
        let mut checked = 0usize;
        for size in 1..=5 {
            for m in all_terms(size, ctx.len()) {
                for ty in &queries {
                    let ours = type_check(&ctx, &m, ty);
                    let oracle = oracle_has_type(&ctx, &m, ty, &universe);
                    assert_eq!(ours, oracle, "disagreement on {m:?} : {ty:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 500);
    }

    #[test]
    fn typed_paths_check_at_their_inferred_type() {
        let ctx = Ctx::from_types(vec![arr(i(), i()), i()]);
        for size in 1..=5 {
            for m in all_terms(size, ctx.len()) {
                if !is_path(&m) {
                    continue;
                }
                if let Ok(ty) = infer_path_type(&ctx, &m) {
                    assert!(type_check(&ctx, &m, &ty), "path {m:?} at {ty:?}");
                }
            }
        }
    }

    #[test]
    fn annotate_fills_argument_types() {
        let ctx = Ctx::from_types(vec![i()]);
        let m = Tm::app(Tm::lam(Tm::Var(0)), Tm::Var(0));
        let t = annotate(&ctx, &m, &i()).unwrap();
        match t {
            TypedTm::App { arg_ty, .. } => assert_eq!(arg_ty, i()),
            _ => panic!("expected application"),
        }
        assert_eq!(annotate(&ctx, &Tm::lam(Tm::Var(0)), &i()), None);
    }

    #[test]
    fn scoping_helpers() {
        let m = Tm::lam(Tm::app(Tm::Var(0), Tm::Var(3)));
        assert!(!is_well_scoped(&m, 2));
        assert!(is_well_scoped(&m, 3));
        assert_eq!(min_scope(&m), 3);
        assert_eq!(min_scope(&Tm::lam(Tm::Var(0))), 0);
    }
}
