//! Shared generators and enumerators for the integration suites.

use rand::rngs::StdRng;
use rand::Rng;

use lameq::algo::{check_path_eq, check_tm_eq, decide_tm_eq, PathEqDeriv, TmEqDeriv};
use lameq::reduction::{MStep, Step};
use lameq::subst::{shift, PathSubst, Subst};
use lameq::syntax::{Ctx, Tm, Tp};

pub fn random_ty(rng: &mut StdRng, depth: usize) -> Tp {
    if depth == 0 || rng.gen_bool(0.45) {
        Tp::Base
    } else {
        Tp::arr(random_ty(rng, depth - 1), random_ty(rng, depth - 1))
    }
}

/// All types of nesting depth at most `depth`.
pub fn types_up_to(depth: usize) -> Vec<Tp> {
    let mut out = vec![Tp::Base];
    for _ in 0..depth {
        let prev = out.clone();
        for a in &prev {
            for b in &prev {
                let t = Tp::arr(a.clone(), b.clone());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out.retain(|t| t.depth() <= depth);
    out
}

/// All terms with exactly `size` nodes, well scoped at `scope`.
pub fn terms_of_size(size: usize, scope: usize) -> Vec<Tm> {
    if size == 0 {
        return Vec::new();
    }
    if size == 1 {
        return (0..scope).map(Tm::Var).collect();
    }
    let mut out = Vec::new();
    for b in terms_of_size(size - 1, scope + 1) {
        out.push(Tm::lam(b));
    }
    for fs in 1..size - 1 {
        for f in terms_of_size(fs, scope) {
            for a in terms_of_size(size - 1 - fs, scope) {
                out.push(Tm::app(f.clone(), a));
            }
        }
    }
    out
}

pub fn terms_up_to(size: usize, scope: usize) -> Vec<Tm> {
    (1..=size).flat_map(|s| terms_of_size(s, scope)).collect()
}

/// The codomain reached from `ty` after consuming `n` arguments, if any.
fn peel(ty: &Tp, n: usize) -> Option<(Vec<Tp>, Tp)> {
    let mut args = Vec::new();
    let mut cur = ty.clone();
    for _ in 0..n {
        match cur {
            Tp::Arr(a, b) => {
                args.push(*a);
                cur = *b;
            }
            Tp::Base => return None,
        }
    }
    Some((args, cur))
}

/// A pair of path-equal terms of type `ty` over `ctx`, with its certificate.
/// Arguments along the spine are either further path pairs or beta-decorated
/// variants of one side, so certificates contain real traces.
pub fn gen_path_pair(
    rng: &mut StdRng,
    ctx: &Ctx,
    ty: &Tp,
    depth: usize,
) -> Option<(Tm, Tm, PathEqDeriv)> {
    // Heads whose type reaches `ty` within the spine budget; the budget
    // shrinks with depth so argument generation always bottoms out at
    // zero-argument candidates.
    let max_args = depth.min(3);
    let mut candidates = Vec::new();
    for k in 0..ctx.len() {
        let head_ty = ctx.lookup(k).expect("in range");
        for n in 0..=max_args {
            if let Some((args, cod)) = peel(head_ty, n) {
                if &cod == ty {
                    candidates.push((k, args));
                }
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let pick = rng.gen_range(0..candidates.len());
    let (head, args) = candidates[pick].clone();
    let mut left = Tm::Var(head);
    let mut right = Tm::Var(head);
    let mut deriv = PathEqDeriv::pvar(head);
    for arg_ty in args {
        let (a1, a2, d) = gen_arg_pair(rng, ctx, &arg_ty, depth.saturating_sub(1))?;
        left = Tm::app(left, a1);
        right = Tm::app(right, a2);
        deriv = PathEqDeriv::papp(deriv, d);
    }
    debug_assert_eq!(check_path_eq(ctx, &deriv, &left, &right), Some(ty.clone()));
    Some((left, right, deriv))
}

/// A pair of terms related at `ty` with a term-equality certificate.
pub fn gen_arg_pair(
    rng: &mut StdRng,
    ctx: &Ctx,
    ty: &Tp,
    depth: usize,
) -> Option<(Tm, Tm, TmEqDeriv)> {
    let (p, q, _) = gen_path_pair(rng, ctx, ty, depth)?;
    // Optionally hide one side behind a beta redex so traces are non-empty.
    let (left, right) = match rng.gen_range(0..3) {
        0 => (p.clone(), q),
        1 => (redex_around(rng, ctx, &p), q),
        _ => (p.clone(), redex_around(rng, ctx, &q)),
    };
    let d = decide_tm_eq(ctx, &left, &right, ty).ok()??;
    debug_assert!(check_tm_eq(ctx, &d, &left, &right, ty));
    Some((left, right, d))
}

/// Wraps a term in a redex contracting back to it; the discarded argument is
/// any context variable, or the identity in an empty context.
pub fn redex_around(rng: &mut StdRng, ctx: &Ctx, m: &Tm) -> Tm {
    let junk = if ctx.is_empty() {
        Tm::lam(Tm::Var(0))
    } else {
        Tm::Var(rng.gen_range(0..ctx.len()))
    };
    Tm::app(Tm::lam(shift(m, 1)), junk)
}

/// A context guaranteed to have material for paths at `ty`: a variable of
/// the type itself, a function producing it, and assorted extras.
pub fn ctx_for(rng: &mut StdRng, ty: &Tp) -> Ctx {
    let mut types = vec![ty.clone()];
    let a = random_ty(rng, 1);
    types.push(Tp::arr(a.clone(), ty.clone()));
    types.push(a);
    for _ in 0..rng.gen_range(0..2) {
        types.push(random_ty(rng, 2));
    }
    // Order matters for indices but not for feasibility.
    for i in (1..types.len()).rev() {
        let j = rng.gen_range(0..=i);
        types.swap(i, j);
    }
    Ctx::from_types(types)
}

/// A path substitution out of `ctx`. With `general`, some entries become
/// applied paths rather than plain weakened variables.
pub fn gen_path_subst(rng: &mut StdRng, ctx: &Ctx, general: bool) -> PathSubst {
    let n = ctx.len();
    // Plan the extras: fancy entries need a function and an argument.
    let mut extra: Vec<Tp> = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        extra.push(random_ty(rng, 1));
    }
    let mut plans: Vec<Option<(usize, usize)>> = vec![None; n];
    if general {
        for (k, plan) in plans.iter_mut().enumerate() {
            if rng.gen_bool(0.4) {
                let ty = ctx.lookup(k).expect("in range").clone();
                let arg_ty = random_ty(rng, 1);
                let fun_pos = extra.len();
                extra.push(Tp::arr(arg_ty.clone(), ty));
                let arg_pos = extra.len();
                extra.push(arg_ty);
                *plan = Some((fun_pos, arg_pos));
            }
        }
    }
    let extra_len = extra.len();
    let codomain = ctx.concat(&Ctx::from_types(extra));
    // Entry for Var(k), listed outermost first in the entries vector.
    let entries: Vec<Tm> = (0..n)
        .rev()
        .map(|k| match plans[k] {
            None => Tm::Var(k + extra_len),
            Some((fun_pos, arg_pos)) => {
                let fun = Tm::Var(extra_len - 1 - fun_pos);
                let arg = Tm::Var(extra_len - 1 - arg_pos);
                Tm::app(fun, arg)
            }
        })
        .collect();
    PathSubst::new(Subst::from_entries(entries), ctx.clone(), codomain)
        .expect("constructed entries are typed paths")
}

/// Expands `m` backwards through `steps` head reductions, returning the new
/// source and the trace that contracts it back onto `m`.
pub fn backward_expand(rng: &mut StdRng, ctx: &Ctx, m: &Tm, steps: usize) -> (Tm, MStep) {
    let mut cur = m.clone();
    let mut trace: Vec<Step> = Vec::new();
    for _ in 0..steps {
        let (next, step) = expand_once(rng, ctx, &cur, 0);
        trace.insert(0, step);
        cur = next;
    }
    (cur, MStep::from_steps(trace))
}

fn expand_once(rng: &mut StdRng, ctx: &Ctx, m: &Tm, depth: usize) -> (Tm, Step) {
    if let Tm::App(f, a) = m {
        // Expanding the function position keeps this application's argument.
        if !matches!(f.as_ref(), Tm::Lam(_)) && rng.gen_bool(0.4) {
            let (f2, step) = expand_once(rng, ctx, f, depth + 1);
            return (Tm::app(f2, (**a).clone()), Step::app_left(step));
        }
    }
    let _ = depth;
    (redex_around(rng, ctx, m), Step::BetaHead)
}
