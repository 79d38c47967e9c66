use std::fmt;

use crate::error::{Error, Result};
use crate::scan::{Carrier, Window};
use crate::semihoop::{FiniteSemihoop, Semihoop};

use super::{validate_ibp0, FiniteMtl, Residuated};

/// An element of a rotation: a copy of the hoop on top (`Pos`) and its
/// order-reversed negation below (`Neg`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signed<E> {
    Neg(E),
    Pos(E),
}

impl<E: fmt::Display> fmt::Display for Signed<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signed::Neg(e) => write!(f, "neg{e}"),
            Signed::Pos(e) => write!(f, "pos{e}"),
        }
    }
}

/// The disconnected rotation of a semihoop: every negative element lies
/// below every positive one, and `¬pos(x) = neg(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rotation<H> {
    pub hoop: H,
}

impl<H: Semihoop> Rotation<H> {
    pub fn new(hoop: H) -> Self {
        Rotation { hoop }
    }
}

impl<H: Semihoop> Carrier for Rotation<H> {
    type Elem = Signed<H::Elem>;

    fn elements(&self, bound: u32) -> Vec<Self::Elem> {
        let base = self.hoop.elements(bound);
        let mut out: Vec<_> = base.iter().cloned().map(Signed::Neg).collect();
        out.extend(base.into_iter().map(Signed::Pos));
        out
    }

    fn is_finite(&self) -> bool {
        self.hoop.is_finite()
    }

    fn element_count(&self, bound: u32) -> usize {
        2 * self.hoop.element_count(bound)
    }
}

impl<H: Semihoop> Residuated for Rotation<H> {
    fn bot(&self) -> Self::Elem {
        Signed::Neg(self.hoop.top())
    }

    fn top(&self) -> Self::Elem {
        Signed::Pos(self.hoop.top())
    }

    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let h = &self.hoop;
        match (x, y) {
            (Signed::Pos(a), Signed::Pos(b)) => Signed::Pos(h.mul(a, b)),
            (Signed::Pos(a), Signed::Neg(b)) | (Signed::Neg(b), Signed::Pos(a)) => Signed::Neg(h.imp(a, b)),
            (Signed::Neg(_), Signed::Neg(_)) => Signed::Neg(h.top()),
        }
    }

    fn imp(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let h = &self.hoop;
        match (x, y) {
            (Signed::Pos(a), Signed::Pos(b)) => Signed::Pos(h.imp(a, b)),
            (Signed::Pos(a), Signed::Neg(b)) => Signed::Neg(h.mul(a, b)),
            (Signed::Neg(_), Signed::Pos(_)) => Signed::Pos(h.top()),
            (Signed::Neg(a), Signed::Neg(b)) => Signed::Pos(h.imp(b, a)),
        }
    }

    fn meet(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let h = &self.hoop;
        match (x, y) {
            (Signed::Pos(a), Signed::Pos(b)) => Signed::Pos(h.meet(a, b)),
            (Signed::Neg(a), Signed::Neg(b)) => Signed::Neg(h.join(a, b)),
            (Signed::Neg(_), _) => x.clone(),
            (_, Signed::Neg(_)) => y.clone(),
        }
    }

    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let h = &self.hoop;
        match (x, y) {
            (Signed::Pos(a), Signed::Pos(b)) => Signed::Pos(h.join(a, b)),
            (Signed::Neg(a), Signed::Neg(b)) => Signed::Neg(h.meet(a, b)),
            (Signed::Pos(_), _) => x.clone(),
            (_, Signed::Pos(_)) => y.clone(),
        }
    }

    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        match (x, y) {
            (Signed::Pos(a), Signed::Pos(b)) => self.hoop.leq(a, b),
            (Signed::Neg(a), Signed::Neg(b)) => self.hoop.leq(b, a),
            (Signed::Neg(_), Signed::Pos(_)) => true,
            (Signed::Pos(_), Signed::Neg(_)) => false,
        }
    }

    fn neg(&self, x: &Self::Elem) -> Self::Elem {
        match x {
            Signed::Pos(a) => Signed::Neg(a.clone()),
            Signed::Neg(a) => Signed::Pos(a.clone()),
        }
    }
}

/// Tabulates the rotation of a finite semihoop. Index `i < n` is `neg(i)` and
/// `n + i` is `pos(i)`. The tables are validated before being returned.
pub fn rotate_finite(hoop: &FiniteSemihoop) -> Result<FiniteMtl> {
    let rotation = &Rotation::new(hoop.clone());
    let n = hoop.size();
    let decode = |i: usize| if i < n { Signed::Neg(i) } else { Signed::Pos(i - n) };
    let encode = |e: Signed<usize>| match e {
        Signed::Neg(i) => i,
        Signed::Pos(i) => n + i,
    };
    let op = |f: fn(&Rotation<FiniteSemihoop>, &Signed<usize>, &Signed<usize>) -> Signed<usize>| {
        move |x: usize, y: usize| encode(f(rotation, &decode(x), &decode(y)))
    };
    let mtl = FiniteMtl::from_fns(
        2 * n,
        op(Rotation::mul),
        op(Rotation::imp),
        op(Rotation::meet),
        op(Rotation::join),
        hoop.top_index(),
        n + hoop.top_index(),
    );
    let report = validate_ibp0(&mtl, &Window::default());
    match report.first_failure() {
        None => Ok(mtl),
        Some(failure) => Err(Error::Precondition(format!("rotation is not an IBP0-algebra: {failure}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;
    use crate::corpus;
    use crate::semihoop::ConeHoop;

    #[test]
    fn trivial_rotation_is_boolean_two() {
        let b = rotate_finite(&corpus::goedel_hoop(1)).unwrap();
        assert_eq!(b.size(), 2);
        let boolean = corpus::boolean(1);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(b.times(x, y), boolean.times(x, y));
                assert_eq!(b.implies(x, y), boolean.implies(x, y));
            }
        }
    }

    #[test]
    fn rotated_goedel_chain_is_ibp0() {
        let a = rotate_finite(&corpus::goedel_hoop(3)).unwrap();
        assert_eq!(a.size(), 6);
        assert!(validate_ibp0(&a, &Window::default()).is_valid());
    }

    #[test]
    fn bad_input_is_rejected_with_witness() {
        let hoop = corpus::goedel_hoop(3);
        let (times, imp, meet) = hoop.tables();
        let mut imp = imp.clone();
        imp.set(2, 1, 2);
        let broken = FiniteSemihoop::new(3, times.clone(), imp, meet.clone(), 2).unwrap();
        let err = rotate_finite(&broken).unwrap_err();
        assert!(err.to_string().contains("fails at"), "{err}");
    }

    #[test]
    fn cone_rotation_negation_and_order() {
        let r = Rotation::new(ConeHoop::new(1));
        let c = |v| Cone::new(&[v]);
        assert_eq!(r.neg(&Signed::Pos(c(3))), Signed::Neg(c(3)));
        assert_eq!(r.imp(&Signed::Pos(c(3)), &r.bot()), Signed::Neg(c(3)));
        assert!(r.leq(&Signed::Neg(c(0)), &Signed::Neg(c(1))));
        assert!(!r.leq(&Signed::Neg(c(1)), &Signed::Neg(c(0))));
        assert!(r.leq(&Signed::Neg(c(0)), &Signed::Pos(c(9))));
        assert_eq!(r.mul(&Signed::Pos(c(5)), &Signed::Neg(c(2))), Signed::Neg(c(0)));
        assert_eq!(r.mul(&Signed::Pos(c(1)), &Signed::Neg(c(2))), Signed::Neg(c(1)));
    }
}
