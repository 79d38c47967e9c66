//! Carriers, windows, and the brute-force quantifier loops behind every validator.
//!
//! Finite carriers are always scanned completely. Symbolic carriers are
//! unbounded, so universally quantified checks run over the window of
//! elements whose coordinates are at most `bound`; evaluation of the
//! operations themselves is never truncated. When a window would make a
//! pair or triple scan exceed its budget, the bound is lowered for that
//! arity and the reduced bound is recorded in the check's scope.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use crate::report::{Check, Failure, Scope};

pub const DEFAULT_BOUND: u32 = 8;

pub trait Carrier {
    type Elem: Clone + Eq + Hash + Debug + Display;

    /// All elements for finite carriers; the bounded window otherwise.
    fn elements(&self, bound: u32) -> Vec<Self::Elem>;

    fn is_finite(&self) -> bool;

    fn element_count(&self, bound: u32) -> usize {
        self.elements(bound).len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub bound: u32,
    pub pair_budget: usize,
    pub triple_budget: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window::new(DEFAULT_BOUND)
    }
}

impl Window {
    pub fn new(bound: u32) -> Self {
        Window {
            bound,
            pair_budget: 4_000_000,
            triple_budget: 5_000_000,
        }
    }

    pub fn with_budgets(mut self, pair_budget: usize, triple_budget: usize) -> Self {
        self.pair_budget = pair_budget;
        self.triple_budget = triple_budget;
        self
    }

    pub fn scope_for<C: Carrier + ?Sized>(&self, carrier: &C, bound: u32) -> Scope {
        if carrier.is_finite() {
            Scope::Exhaustive
        } else {
            Scope::Window(bound)
        }
    }

    /// Largest bound not exceeding `self.bound` whose window fits the budget for `arity`.
    pub fn bound_for<C: Carrier + ?Sized>(&self, carrier: &C, arity: u32) -> u32 {
        if carrier.is_finite() || arity <= 1 {
            return self.bound;
        }
        let budget = if arity == 2 {
            self.pair_budget
        } else {
            self.triple_budget
        };
        let mut bound = self.bound;
        while bound > 0 {
            let count = carrier.element_count(bound);
            if count.checked_pow(arity).is_some_and(|total| total <= budget) {
                break;
            }
            bound -= 1;
        }
        bound
    }

    /// Elements to quantify over for a check of the given arity, with its scope.
    pub fn sample<C: Carrier + ?Sized>(&self, carrier: &C, arity: u32) -> (Vec<C::Elem>, Scope) {
        let bound = self.bound_for(carrier, arity);
        (carrier.elements(bound), self.scope_for(carrier, bound))
    }
}

pub fn unary<E: Display>(
    axiom: &str,
    scope: Scope,
    elems: &[E],
    mut property: impl FnMut(&E) -> Option<Failure>,
) -> Check {
    for x in elems {
        if let Some(failure) = property(x) {
            return Check::fail(axiom, scope, elems.len() as u64, vec![x.to_string()], failure);
        }
    }
    Check::pass(axiom, scope, elems.len() as u64)
}

pub fn binary<E: Display>(
    axiom: &str,
    scope: Scope,
    elems: &[E],
    mut property: impl FnMut(&E, &E) -> Option<Failure>,
) -> Check {
    let total = (elems.len() as u64).pow(2);
    for x in elems {
        for y in elems {
            if let Some(failure) = property(x, y) {
                return Check::fail(axiom, scope, total, vec![x.to_string(), y.to_string()], failure);
            }
        }
    }
    Check::pass(axiom, scope, total)
}

pub fn ternary<E: Display>(
    axiom: &str,
    scope: Scope,
    elems: &[E],
    mut property: impl FnMut(&E, &E, &E) -> Option<Failure>,
) -> Check {
    let total = (elems.len() as u64).pow(3);
    for x in elems {
        for y in elems {
            for z in elems {
                if let Some(failure) = property(x, y, z) {
                    return Check::fail(
                        axiom,
                        scope,
                        total,
                        vec![x.to_string(), y.to_string(), z.to_string()],
                        failure,
                    );
                }
            }
        }
    }
    Check::pass(axiom, scope, total)
}

/// Like [`binary`], but over an explicit list of pairs (e.g. random samples).
pub fn pairs<E: Display>(
    axiom: &str,
    scope: Scope,
    pairs: &[(E, E)],
    mut property: impl FnMut(&E, &E) -> Option<Failure>,
) -> Check {
    for (x, y) in pairs {
        if let Some(failure) = property(x, y) {
            return Check::fail(axiom, scope, pairs.len() as u64, vec![x.to_string(), y.to_string()], failure);
        }
    }
    Check::pass(axiom, scope, pairs.len() as u64)
}

/// `None` when both sides agree, a [`Failure`] carrying them otherwise.
pub fn equal<T: PartialEq + Display>(lhs: T, rhs: T) -> Option<Failure> {
    (lhs != rhs).then(|| Failure::new(lhs, rhs))
}

/// Checks an implication `premise => conclusion`, reporting both truth values on failure.
pub fn implies(premise: bool, conclusion: bool) -> Option<Failure> {
    (premise && !conclusion).then(|| Failure::new("premise holds", "conclusion fails"))
}

/// Checks an equivalence `a <=> b`.
pub fn iff(lhs: bool, rhs: bool) -> Option<Failure> {
    (lhs != rhs).then(|| Failure::new(lhs, rhs))
}
