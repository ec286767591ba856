//! Simultaneous substitutions and their equational theory.
//!
//! Substitutions are first-class sequences of terms rather than functions:
//! the logical-relation machinery pattern-matches, weakens, and composes
//! them, and the laws they satisfy (identity, composition, extension
//! exchange, lifting) are tested as exact structural equalities.

use thiserror::Error;

use crate::syntax::{infer_path_type, is_path, Ctx, Tm, Tp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("not a path substitution for the given contexts")]
    InvalidPathSubst,
    #[error("context mismatch when composing substitutions")]
    ContextMismatch,
}

/// Shifts every free variable of `m` up by `by`.
pub fn shift(m: &Tm, by: usize) -> Tm {
    shift_above(m, 0, by)
}

/// Shifts free variables with index >= `cutoff` up by `by`.
pub fn shift_above(m: &Tm, cutoff: usize, by: usize) -> Tm {
    match m {
        Tm::Var(k) => {
            if *k >= cutoff {
                Tm::Var(k + by)
            } else {
                Tm::Var(*k)
            }
        }
        Tm::Lam(b) => Tm::lam(shift_above(b, cutoff + 1, by)),
        Tm::App(f, a) => Tm::app(shift_above(f, cutoff, by), shift_above(a, cutoff, by)),
    }
}

/// A simultaneous substitution. The entry at distance `k` from the right end
/// replaces `Var(k)`, mirroring the context convention; every entry is a term
/// over the codomain context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subst {
    entries: Vec<Tm>,
}

impl Subst {
    pub fn empty() -> Subst {
        Subst { entries: Vec::new() }
    }

    /// The identity on a context of length `n`: entries `Var(n-1) .. Var(0)`.
    pub fn identity(n: usize) -> Subst {
        Subst {
            entries: (0..n).rev().map(Tm::Var).collect(),
        }
    }

    /// Entries listed outermost first, matching `Ctx::from_types`.
    pub fn from_entries(entries: Vec<Tm>) -> Subst {
        Subst { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Tm] {
        &self.entries
    }

    /// Replacement for `Var(k)`.
    pub fn entry(&self, k: usize) -> Option<&Tm> {
        let n = self.entries.len();
        if k < n {
            Some(&self.entries[n - 1 - k])
        } else {
            None
        }
    }

    /// Shifts every entry up by `by`; the codomain grows accordingly.
    pub fn weaken(&self, by: usize) -> Subst {
        Subst {
            entries: self.entries.iter().map(|e| shift(e, by)).collect(),
        }
    }

    /// Appends a replacement for a new innermost domain variable.
    pub fn extend(&self, m: Tm) -> Subst {
        let mut entries = self.entries.clone();
        entries.push(m);
        Subst { entries }
    }

    /// Pushes the substitution under one binder: entries are weakened by one
    /// and the bound variable maps to itself.
    pub fn lift(&self) -> Subst {
        self.weaken(1).extend(Tm::Var(0))
    }

    /// Composition in diagram order: applying the result is applying `self`
    /// and then `other`.
    pub fn compose(&self, other: &Subst) -> Subst {
        Subst {
            entries: self.entries.iter().map(|e| other.apply(e)).collect(),
        }
    }

    /// Capture-avoiding simultaneous substitution.
    ///
    /// Panics if `m` mentions a variable the substitution has no entry for;
    /// callers are responsible for scoping.
    pub fn apply(&self, m: &Tm) -> Tm {
        match m {
            Tm::Var(k) => self.entry(*k).cloned().unwrap_or_else(|| {
                panic!(
                    "substitution of length {} applied to out-of-scope Var({k})",
                    self.len()
                )
            }),
            Tm::Lam(b) => Tm::lam(self.lift().apply(b)),
            Tm::App(f, a) => Tm::app(self.apply(f), self.apply(a)),
        }
    }
}

/// True iff `s` maps the whole of `from` to paths of the declared types
/// over `to`.
pub fn is_path_subst(from: &Ctx, s: &Subst, to: &Ctx) -> bool {
    if s.len() != from.len() {
        return false;
    }
    (0..from.len()).all(|k| {
        let entry = s.entry(k).expect("length checked");
        is_path(entry) && infer_path_type(to, entry).as_ref().ok() == from.lookup(k)
    })
}

/// A substitution whose every entry is a path of the type declared by the
/// domain context, packaged with both contexts so uses can be checked.
/// Generalizes weakening.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSubst {
    subst: Subst,
    domain: Ctx,
    codomain: Ctx,
}

impl PathSubst {
    pub fn new(subst: Subst, domain: Ctx, codomain: Ctx) -> Result<PathSubst, SubstError> {
        if is_path_subst(&domain, &subst, &codomain) {
            Ok(PathSubst { subst, domain, codomain })
        } else {
            Err(SubstError::InvalidPathSubst)
        }
    }

    pub fn identity(ctx: &Ctx) -> PathSubst {
        PathSubst {
            subst: Subst::identity(ctx.len()),
            domain: ctx.clone(),
            codomain: ctx.clone(),
        }
    }

    /// The weakening `ctx -> ctx, extra` that maps each variable to itself.
    pub fn weakening(ctx: &Ctx, extra: &[Tp]) -> PathSubst {
        let codomain = ctx.concat(&Ctx::from_types(extra.to_vec()));
        PathSubst {
            subst: Subst::identity(ctx.len()).weaken(extra.len()),
            domain: ctx.clone(),
            codomain,
        }
    }

    pub fn subst(&self) -> &Subst {
        &self.subst
    }

    pub fn domain(&self) -> &Ctx {
        &self.domain
    }

    pub fn codomain(&self) -> &Ctx {
        &self.codomain
    }

    pub fn entry(&self, k: usize) -> Option<&Tm> {
        self.subst.entry(k)
    }

    pub fn apply(&self, m: &Tm) -> Tm {
        self.subst.apply(m)
    }

    /// Pushes the path substitution under one binder of type `ty`.
    pub fn lift(&self, ty: &Tp) -> PathSubst {
        PathSubst {
            subst: self.subst.lift(),
            domain: self.domain.extend(ty.clone()),
            codomain: self.codomain.extend(ty.clone()),
        }
    }

    /// Composition; path substitutions are closed under it because a path
    /// with its head variable replaced by a path is again a path.
    pub fn compose(&self, other: &PathSubst) -> Result<PathSubst, SubstError> {
        if self.codomain != other.domain {
            return Err(SubstError::ContextMismatch);
        }
        Ok(PathSubst {
            subst: self.subst.compose(&other.subst),
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
        })
    }

    /// Weakens the codomain by `extra` while keeping the domain.
    pub fn weakened(&self, extra: &[Tp]) -> PathSubst {
        PathSubst {
            subst: self.subst.weaken(extra.len()),
            domain: self.domain.clone(),
            codomain: self.codomain.concat(&Ctx::from_types(extra.to_vec())),
        }
    }

    /// Revalidates the packaged invariant.
    pub fn is_valid(&self) -> bool {
        is_path_subst(&self.domain, &self.subst, &self.codomain)
    }
}
