//! Weak head reduction and checkable reduction traces.
//!
//! Reduction happens at the head of the application spine only, never under
//! binders or in argument position. A trace records the position of each
//! step so certificates can be replayed without re-running the normalizer.

use thiserror::Error;

use crate::subst::Subst;
use crate::syntax::{is_path, min_scope, Tm};

/// One head reduction step: a beta contraction under `depth` left
/// applications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    BetaHead,
    AppLeft(Box<Step>),
}

impl Step {
    pub fn app_left(s: Step) -> Step {
        Step::AppLeft(Box::new(s))
    }

    /// Number of `AppLeft` wrappers around the beta contraction.
    pub fn depth(&self) -> usize {
        match self {
            Step::BetaHead => 0,
            Step::AppLeft(s) => 1 + s.depth(),
        }
    }

    /// The beta contraction at the given spine depth.
    pub fn at_depth(depth: usize) -> Step {
        let mut s = Step::BetaHead;
        for _ in 0..depth {
            s = Step::app_left(s);
        }
        s
    }
}

/// A multi-step trace; the empty trace is reflexivity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MStep {
    steps: Vec<Step>,
}

impl MStep {
    pub fn empty() -> MStep {
        MStep::default()
    }

    pub fn single(step: Step) -> MStep {
        MStep { steps: vec![step] }
    }

    pub fn from_steps(steps: Vec<Step>) -> MStep {
        MStep { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &MStep) -> MStep {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        MStep { steps }
    }

    /// Each step transported to the function position of an application.
    pub fn under_app_left(&self) -> MStep {
        MStep {
            steps: self.steps.iter().map(|s| Step::app_left(s.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fuel exhausted after {0} steps")]
pub struct FuelExhausted(pub usize);

/// Contracts the head redex of `App(Lam(body), arg)`.
fn beta_contract(body: &Tm, arg: &Tm, redex_scope: usize) -> Tm {
    Subst::identity(redex_scope).extend(arg.clone()).apply(body)
}

/// The unique head reduct of `m`, or `None` when `m` is weak head normal
/// (a lambda or a path). The beta rule fires only when the function is a
/// lambda, which never itself steps, so at most one rule ever applies.
pub fn whstep(m: &Tm) -> Option<(Tm, Step)> {
    match m {
        Tm::App(f, a) => match f.as_ref() {
            Tm::Lam(body) => Some((beta_contract(body, a, min_scope(m)), Step::BetaHead)),
            _ => whstep(f).map(|(f2, s)| (Tm::app(f2, (**a).clone()), Step::app_left(s))),
        },
        _ => None,
    }
}

/// Iterates `whstep` to weak head normal form, returning the full trace.
pub fn whnf(m: &Tm, fuel: usize) -> Result<(Tm, MStep), FuelExhausted> {
    let mut cur = m.clone();
    let mut steps = Vec::new();
    loop {
        match whstep(&cur) {
            None => return Ok((cur, MStep::from_steps(steps))),
            Some((next, step)) => {
                if steps.len() >= fuel {
                    return Err(FuelExhausted(steps.len()));
                }
                steps.push(step);
                cur = next;
            }
        }
    }
}

/// Applies `step` at its recorded position, if legal there.
pub fn apply_step(m: &Tm, step: &Step) -> Option<Tm> {
    match (step, m) {
        (Step::BetaHead, Tm::App(f, a)) => match f.as_ref() {
            Tm::Lam(body) => Some(beta_contract(body, a, min_scope(m))),
            _ => None,
        },
        (Step::AppLeft(s), Tm::App(f, a)) => {
            apply_step(f, s).map(|f2| Tm::app(f2, (**a).clone()))
        }
        _ => None,
    }
}

/// Replays a trace from `m`; `None` if any step is illegal at its position.
pub fn replay(m: &Tm, trace: &MStep) -> Option<Tm> {
    let mut cur = m.clone();
    for step in trace.steps() {
        cur = apply_step(&cur, step)?;
    }
    Some(cur)
}

/// True iff replaying `trace` from `m` lands exactly on `n`.
pub fn check_mstep(m: &Tm, trace: &MStep, n: &Tm) -> bool {
    replay(m, trace).as_ref() == Some(n)
}

/// Weak head normal terms: lambdas and paths.
pub fn is_whnf(m: &Tm) -> bool {
    matches!(m, Tm::Lam(_)) || is_path(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{type_check, Ctx, Tp};

    fn i() -> Tp {
        Tp::Base
    }

    fn omega() -> Tm {
        let half = Tm::lam(Tm::app(Tm::Var(0), Tm::Var(0)));
        Tm::app(half.clone(), half)
    }

    #[test]
    fn beta_at_head() {
        let m = Tm::app(Tm::lam(Tm::Var(0)), Tm::Var(3));
        assert_eq!(whstep(&m), Some((Tm::Var(3), Step::BetaHead)));
    }

    #[test]
    fn lambdas_are_normal() {
        assert_eq!(whstep(&Tm::lam(omega())), None);
    }

    #[test]
    fn reduction_in_function_position() {
        let m = Tm::app(Tm::app(Tm::lam(Tm::Var(0)), Tm::Var(2)), Tm::Var(0));
        assert_eq!(
            whstep(&m),
            Some((
                Tm::app(Tm::Var(2), Tm::Var(0)),
                Step::app_left(Step::BetaHead)
            ))
        );
    }

    #[test]
    fn whnf_of_normal_term_is_trivial() {
        let (n, tr) = whnf(&Tm::Var(0), 10).unwrap();
        assert_eq!(n, Tm::Var(0));
        assert!(tr.is_empty());
    }

    #[test]
    fn whnf_iterates_head_steps() {
        // (\x. x) ((\x. x) y) steps at the head twice: the argument is
        // substituted unreduced, then the inner redex becomes the head.
        let inner = Tm::app(Tm::lam(Tm::Var(0)), Tm::Var(1));
        let m = Tm::app(Tm::lam(Tm::Var(0)), inner);
        let (n, tr) = whnf(&m, 100).unwrap();
        assert_eq!(n, Tm::Var(1));
        assert_eq!(
            tr,
            MStep::from_steps(vec![Step::BetaHead, Step::BetaHead])
        );
        assert!(check_mstep(&m, &tr, &Tm::Var(1)));
    }

    #[test]
    fn omega_exhausts_fuel() {
        assert_eq!(whnf(&omega(), 100), Err(FuelExhausted(100)));
    }

    #[test]
    fn empty_trace_is_reflexivity() {
        let m = Tm::lam(Tm::Var(0));
        assert!(check_mstep(&m, &MStep::empty(), &m));
        assert!(!check_mstep(&m, &MStep::empty(), &Tm::Var(0)));
    }

    #[test]
    fn traces_replay_to_their_normal_form() {
        for (m, _) in sample_terms() {
            if let Ok((n, tr)) = whnf(&m, 1000) {
                assert!(check_mstep(&m, &tr, &n));
                assert!(is_whnf(&n));
            }
        }
    }

    // All single steps derivable by the two rules, found by brute search.
    fn derivable_steps(m: &Tm) -> Vec<(Tm, Step)> {
        let mut out = Vec::new();
        if let Tm::App(f, a) = m {
            if let Tm::Lam(body) = f.as_ref() {
                out.push((
                    beta_contract(body, a, min_scope(m)),
                    Step::BetaHead,
                ));
            }
            for (f2, s) in derivable_steps(f) {
                out.push((Tm::app(f2, (**a).clone()), Step::app_left(s)));
            }
        }
        out
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

    fn sample_terms() -> Vec<(Tm, usize)> {
        let mut out = Vec::new();
        for size in 1..=6 {
            for m in all_terms(size, 2) {
                out.push((m, 2));
            }
        }
        out
    }

    #[test]
    fn single_steps_are_determined() {
        for size in 1..=6 {
            for m in all_terms(size, 2) {
                let steps = derivable_steps(&m);
                assert!(steps.len() <= 1, "multiple steps from {m:?}");
                assert_eq!(whstep(&m), steps.into_iter().next());
            }
        }
    }

    #[test]
    fn well_typed_terms_reduce_to_whnf_of_the_right_shape() {
        let ctx = Ctx::from_types(vec![Tp::arr(i(), i()), i()]);
        let queries = [i(), Tp::arr(i(), i())];
        for size in 1..=6 {
            for m in all_terms(size, 2) {
                for ty in &queries {
                    if !type_check(&ctx, &m, ty) {
                        continue;
                    }
                    let (n, _) = whnf(&m, 10_000).expect("well-typed terms normalize");
                    match ty {
                        Tp::Base => assert!(is_path(&n)),
                        Tp::Arr(..) => assert!(is_whnf(&n)),
                    }
                    // Subject reduction along the whole trace.
                    let mut cur = m.clone();
                    while let Some((next, _)) = whstep(&cur) {
                        assert!(type_check(&ctx, &next, ty));
                        cur = next;
                    }
                }
            }
        }
    }
}
