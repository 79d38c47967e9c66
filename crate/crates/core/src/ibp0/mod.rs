//! Bounded integral residuated lattices: MTL- and IBP₀-algebras.
//!
//! Algebras come in three shapes: finite operation tables, rotations of
//! symbolic cone hoops (Chang-style perfect algebras), and finite products of
//! those. Every shape is validated by the same brute-force scans; symbolic
//! factors are scanned on a window while the operations themselves are
//! evaluated exactly.

mod algebra;
mod finite;
mod rotation;
mod structure;

pub use algebra::{parse_element, Algebra, Component, Element, Factor};
pub use finite::FiniteMtl;
pub use rotation::{rotate_finite, Rotation, Signed};
pub use structure::{Decomposition, Ibp0, RadicalHoop, Skeleton};

use crate::report::{Failure, ValidationReport};
use crate::scan::{self, equal, Carrier, Window};

pub trait Residuated: Carrier {
    fn bot(&self) -> Self::Elem;
    fn top(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn imp(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn meet(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        self.meet(x, y) == *x
    }

    fn neg(&self, x: &Self::Elem) -> Self::Elem {
        self.imp(x, &self.bot())
    }

    /// `x ⊕ y = ¬x → y`.
    fn oplus(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.imp(&self.neg(x), y)
    }

    fn double(&self, x: &Self::Elem) -> Self::Elem {
        self.oplus(x, x)
    }

    fn square(&self, x: &Self::Elem) -> Self::Elem {
        self.mul(x, x)
    }
}

/// Bounded commutative integral residuated lattice axioms plus prelinearity.
pub fn validate_mtl<A: Residuated>(a: &A, window: &Window) -> ValidationReport {
    let subject = if a.is_finite() {
        format!("algebra of size {}", a.element_count(0))
    } else {
        "symbolic algebra".to_string()
    };
    let mut report = ValidationReport::new(subject);
    let (singles, s1) = window.sample(a, 1);
    let (doubles, s2) = window.sample(a, 2);
    let (triples, s3) = window.sample(a, 3);
    let (zero, one) = (a.bot(), a.top());

    for (name, op) in [("meet", A::meet as fn(&A, &A::Elem, &A::Elem) -> A::Elem), ("join", A::join)] {
        report.push(scan::ternary(&format!("{name} associative"), s3, &triples, |x, y, z| {
            equal(op(a, &op(a, x, y), z), op(a, x, &op(a, y, z)))
        }));
        report.push(scan::binary(&format!("{name} commutative"), s2, &doubles, |x, y| {
            equal(op(a, x, y), op(a, y, x))
        }));
        report.push(scan::unary(&format!("{name} idempotent"), s1, &singles, |x| equal(op(a, x, x), x.clone())));
    }
    report.push(scan::binary("absorption", s2, &doubles, |x, y| {
        equal(a.meet(x, &a.join(x, y)), x.clone()).or_else(|| equal(a.join(x, &a.meet(x, y)), x.clone()))
    }));
    report.push(scan::unary("bounds", s1, &singles, |x| {
        equal(a.meet(x, &zero), zero.clone()).or_else(|| equal(a.join(x, &one), one.clone()))
    }));
    report.push(scan::ternary("mul associative", s3, &triples, |x, y, z| {
        equal(a.mul(&a.mul(x, y), z), a.mul(x, &a.mul(y, z)))
    }));
    report.push(scan::binary("mul commutative", s2, &doubles, |x, y| equal(a.mul(x, y), a.mul(y, x))));
    report.push(scan::unary("mul unit", s1, &singles, |x| equal(a.mul(x, &one), x.clone())));
    report.push(scan::ternary("residuation", s3, &triples, |x, y, z| {
        let lhs = a.leq(&a.mul(x, y), z);
        let rhs = a.leq(y, &a.imp(x, z));
        (lhs != rhs).then(|| Failure::new(format!("x·y <= z is {lhs}"), format!("y <= x→z is {rhs}")))
    }));
    report.push(scan::binary("order iff implication is top", s2, &doubles, |x, y| {
        let leq = a.leq(x, y);
        (leq != (a.imp(x, y) == one)).then(|| Failure::new(a.imp(x, y), format!("leq = {leq}")))
    }));
    report.push(scan::binary("prelinearity", s2, &doubles, |x, y| {
        equal(a.join(&a.imp(x, y), &a.imp(y, x)), one.clone())
    }));
    report
}

/// MTL axioms plus (DL) `(2x)² = 2(x²)` and (Inv) `¬¬x = x`.
pub fn validate_ibp0<A: Residuated>(a: &A, window: &Window) -> ValidationReport {
    let mut report = validate_mtl(a, window);
    let (singles, s1) = window.sample(a, 1);
    report.push(scan::unary("DL", s1, &singles, |x| {
        equal(a.square(&a.double(x)), a.double(&a.square(x)))
    }));
    report.push(scan::unary("Inv", s1, &singles, |x| equal(a.neg(&a.neg(x)), x.clone())));
    report
}

/// `x·y = (x∧y)·(x∨y)` for MTL-algebras and `x⊕y = (x∧y)⊕(x∨y)` for IBP₀.
pub fn lattice_split_identities<A: Residuated>(a: &A, window: &Window) -> ValidationReport {
    let mut report = ValidationReport::new("lattice split identities");
    let (doubles, s2) = window.sample(a, 2);
    report.push(scan::binary("mul splits over meet and join", s2, &doubles, |x, y| {
        equal(a.mul(x, y), a.mul(&a.meet(x, y), &a.join(x, y)))
    }));
    report.push(scan::binary("oplus splits over meet and join", s2, &doubles, |x, y| {
        equal(a.oplus(x, y), a.oplus(&a.meet(x, y), &a.join(x, y)))
    }));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn boolean_two_is_ibp0() {
        let report = validate_ibp0(&corpus::boolean(1), &Window::default());
        assert!(report.is_valid(), "{:?}", report.first_failure());
    }

    #[test]
    fn lukasiewicz_three_chain_fails_dl_at_half() {
        let report = validate_ibp0(&corpus::lukasiewicz_chain(3), &Window::default());
        let dl = report.check("DL").unwrap();
        assert!(dl.failed());
        assert_eq!(dl.witness.as_deref().unwrap(), &["1".to_string()]);
        assert_eq!((dl.lhs.as_deref(), dl.rhs.as_deref()), (Some("2"), Some("0")));
        // everything else holds: it is an MV-algebra
        assert_eq!(report.failures().count(), 1);
    }

    #[test]
    fn chang_rank_one_window_verified() {
        let chang = corpus::chang(1);
        let report = validate_ibp0(&chang, &Window::new(8));
        assert!(report.is_valid(), "{:?}", report.first_failure());
        assert_eq!(report.check("DL").unwrap().scope.to_string(), "window-verified (8)");
    }

    #[test]
    fn split_identities_hold_on_corpus() {
        for (name, algebra) in corpus::ibp0_corpus().into_iter().take(7) {
            let report = lattice_split_identities(&algebra, &Window::new(3));
            assert!(report.is_valid(), "{name}: {:?}", report.first_failure());
        }
        let report = lattice_split_identities(&corpus::lukasiewicz_chain(4), &Window::default());
        assert!(report.passes("mul splits over meet and join"));
    }
}
