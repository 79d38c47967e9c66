use std::collections::HashMap;

use smallvec::SmallVec;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::report::{Check, Failure, Scope, ValidationReport};
use crate::scan::{self, equal, iff, Carrier, Window};
use crate::semihoop::{validate_semihoop, Semihoop};

use super::{Algebra, Component, Element, Factor, Residuated, Signed};

/// An IBP₀-algebra that has passed validation on its window.
#[derive(Clone, Debug)]
pub struct Ibp0 {
    algebra: Algebra,
    window: Window,
    report: ValidationReport,
    skeleton: Skeleton,
    radical_parts: Vec<Option<Vec<Component>>>,
}

/// The Boolean skeleton `{a | a ∨ ¬a = 1}` with its atoms.
#[derive(Clone, Debug)]
pub struct Skeleton {
    elements: Vec<Element>,
    atoms: Vec<Element>,
    masks: Vec<u64>,
    index: HashMap<Element, usize>,
}

impl Skeleton {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn atoms(&self) -> &[Element] {
        &self.atoms
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index.contains_key(e)
    }

    /// Bit `i` is set when atom `i` lies below `e`.
    pub fn mask(&self, e: &Element) -> Option<u64> {
        self.index.get(e).map(|&i| self.masks[i])
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The pair `(b_a, c_a)` of a skeleton element and a radical element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub b: Element,
    pub c: Element,
}

fn cartesian(parts: &[Vec<Component>]) -> Vec<Element> {
    let mut out = vec![Element(SmallVec::new())];
    for part in parts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                part.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.0.push(*c);
                    next
                })
            })
            .collect();
    }
    out
}

fn factor_skeleton(factor: &Factor) -> Vec<Component> {
    match factor {
        Factor::Finite(_) => factor
            .elements(0)
            .into_iter()
            .filter(|x| factor.join(x, &factor.neg(x)) == factor.top())
            .collect(),
        Factor::Perfect(_) => vec![factor.bot(), factor.top()],
    }
}

fn is_radical_in<A: Residuated>(a: &A, x: &A::Elem) -> bool {
    let n = a.neg(x);
    a.leq(&n, x) && n != *x
}

impl Ibp0 {
    /// Validates `algebra` on `window` and refuses anything that is not IBP₀.
    pub fn new(algebra: Algebra, window: Window) -> Result<Self> {
        let report = algebra.validate(&window);
        if let Some(failure) = report.first_failure() {
            return Err(Error::Precondition(format!("not an IBP0-algebra: {failure}")));
        }
        Ok(Ibp0::assume_valid(algebra, window, report))
    }

    fn assume_valid(algebra: Algebra, window: Window, report: ValidationReport) -> Self {
        let parts: Vec<Vec<Component>> = algebra.factors().iter().map(factor_skeleton).collect();
        let elements = cartesian(&parts);
        let bot = algebra.bot();
        let atoms: Vec<Element> = elements
            .iter()
            .filter(|b| **b != bot)
            .filter(|b| !elements.iter().any(|c| *c != bot && c != *b && algebra.leq(c, b)))
            .cloned()
            .collect();
        assert!(atoms.len() <= 64, "skeleton with more than 64 atoms");
        let masks = elements
            .iter()
            .map(|b| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, atom)| algebra.leq(atom, b))
                    .fold(0u64, |m, (i, _)| m | (1 << i))
            })
            .collect();
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let radical_parts = algebra
            .factors()
            .iter()
            .map(|f| match f {
                Factor::Finite(_) => Some(f.elements(0).into_iter().filter(|x| is_radical_in(f, x)).collect()),
                Factor::Perfect(_) => None,
            })
            .collect();
        Ibp0 {
            algebra,
            window,
            report,
            skeleton: Skeleton {
                elements,
                atoms,
                masks,
                index,
            },
            radical_parts,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.report
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn is_complemented(&self, a: &Element) -> bool {
        let alg = &self.algebra;
        alg.join(a, &alg.neg(a)) == alg.top()
    }

    /// `a > ¬a`.
    pub fn is_radical(&self, a: &Element) -> bool {
        is_radical_in(&self.algebra, a)
    }

    pub fn is_coradical(&self, a: &Element) -> bool {
        self.is_radical(&self.algebra.neg(a))
    }

    /// `b_a = ¬((¬(a²))²)` and `c_a = a ∨ ¬a`, checked against recomposition.
    pub fn decompose(&self, a: &Element) -> Result<Decomposition> {
        let alg = &self.algebra;
        let b = alg.neg(&alg.square(&alg.neg(&alg.square(a))));
        let c = alg.join(a, &alg.neg(a));
        let d = Decomposition { b, c };
        if !self.is_complemented(&d.b) {
            return Err(Error::Internal(format!("b = {} is not complemented (a = {a})", d.b)));
        }
        if !self.is_radical(&d.c) {
            return Err(Error::Internal(format!("c = {} is not radical (a = {a})", d.c)));
        }
        let back = self.recompose(&d);
        if back != *a {
            return Err(Error::Internal(format!(
                "recomposition of {a} from b = {}, c = {} gives {back}",
                d.b, d.c
            )));
        }
        Ok(d)
    }

    /// `(b ∨ ¬c) ∧ (¬b ∨ c)`.
    pub fn recompose(&self, d: &Decomposition) -> Element {
        let alg = &self.algebra;
        alg.meet(&alg.join(&d.b, &alg.neg(&d.c)), &alg.join(&alg.neg(&d.b), &d.c))
    }

    /// Radical components of a finite factor; `None` for perfect factors.
    pub fn radical_components(&self, factor: usize) -> Option<&[Component]> {
        self.radical_parts.get(factor).and_then(|p| p.as_deref())
    }

    pub fn radical_hoop(&self) -> RadicalHoop {
        RadicalHoop {
            algebra: self.algebra.clone(),
            parts: self.radical_parts.clone(),
        }
    }

    /// Total cone rank when every finite factor has the trivial radical `{1}`,
    /// so that the radical is a free cancellative hoop.
    pub fn radical_cone_rank(&self) -> Option<usize> {
        let trivial = self.radical_parts.iter().all(|p| p.as_ref().map_or(true, |p| p.len() == 1));
        let rank = self.algebra.cone_rank();
        (trivial && rank > 0).then_some(rank)
    }

    /// Concatenated exponents of a radical element whose finite components are top.
    pub fn radical_to_cone(&self, x: &Element) -> Option<Cone> {
        let mut exps = Vec::new();
        for (c, f) in x.0.iter().zip(self.algebra.factors()) {
            match c {
                Component::Perfect(Signed::Pos(m)) => exps.extend_from_slice(m.exps()),
                Component::Fin(_) if *c == f.top() => {}
                _ => return None,
            }
        }
        Cone::try_new(&exps).ok()
    }

    pub fn cone_to_radical(&self, m: &Cone) -> Element {
        let mut offset = 0;
        let parts = self.algebra.factors().iter().map(|f| match f.rank() {
            Some(k) => {
                let c = Cone::new(&m.exps()[offset..offset + k]);
                offset += k;
                Component::Perfect(Signed::Pos(c))
            }
            None => f.top(),
        });
        Element(parts.collect())
    }

    /// Closure of the skeleton, its Boolean laws, and a membership scan on the window.
    pub fn skeleton_report(&self) -> ValidationReport {
        let alg = &self.algebra;
        let sk = &self.skeleton;
        let elems = sk.elements();
        let s = Scope::Exhaustive;
        let mut report = ValidationReport::new(format!("Boolean skeleton of {} elements", sk.len()));
        report.push(scan::binary("closed under mul and oplus", s, elems, |x, y| {
            [alg.mul(x, y), alg.oplus(x, y)]
                .into_iter()
                .find(|r| !sk.contains(r))
                .map(|r| Failure::new(r, "outside the skeleton"))
        }));
        report.push(scan::unary("closed under negation", s, elems, |x| {
            (!sk.contains(&alg.neg(x))).then(|| Failure::new(alg.neg(x), "outside the skeleton"))
        }));
        report.push(scan::binary("mul is meet", s, elems, |x, y| equal(alg.mul(x, y), alg.meet(x, y))));
        report.push(scan::binary("oplus is join", s, elems, |x, y| equal(alg.oplus(x, y), alg.join(x, y))));
        report.push(scan::unary("complement", s, elems, |x| {
            equal(alg.meet(x, &alg.neg(x)), alg.bot()).or_else(|| equal(alg.join(x, &alg.neg(x)), alg.top()))
        }));
        report.push(scan::unary("join of atoms below", s, elems, |x| {
            let below = sk.atoms().iter().filter(|a| alg.leq(a, x)).fold(alg.bot(), |acc, a| alg.join(&acc, a));
            equal(below, x.clone())
        }));
        let (window, scope) = self.window.sample(alg, 1);
        report.push(scan::unary("membership matches a ∨ ¬a = 1", scope, &window, |x| {
            iff(self.is_complemented(x), sk.contains(x))
        }));
        report
    }

    /// The radical as a prelinear semihoop, its closure, the coradical, and
    /// the join law `b ∨ c ∈ ℋ` for skeleton `b` and radical `c`.
    pub fn radical_report(&self) -> ValidationReport {
        let alg = &self.algebra;
        let hoop = self.radical_hoop();
        let mut report = ValidationReport::new("radical");
        let semihoop = validate_semihoop(&hoop, &self.window);
        let prelinear = semihoop.get_flag("prelinear").unwrap_or(false);
        report.absorb("semihoop: ", semihoop);
        report.push(Check::fact("prelinear", prelinear, prelinear, true));

        let (pairs, s2) = self.window.sample(&hoop, 2);
        report.push(scan::binary("closed under operations", s2, &pairs, |x, y| {
            [hoop.mul(x, y), hoop.imp(x, y), hoop.meet(x, y), alg.join(x, y)]
                .into_iter()
                .find(|r| !self.is_radical(r))
                .map(|r| Failure::new(r, "not radical"))
        }));
        report.push(scan::binary("pseudo-join is the lattice join", s2, &pairs, |x, y| {
            equal(hoop.join(x, y), alg.join(x, y))
        }));
        let (window, scope) = self.window.sample(alg, 1);
        report.push(scan::unary("radical membership", scope, &window, |x| {
            iff(self.is_radical(x), hoop.contains(x))
        }));
        report.push(scan::unary("coradical is the negated radical", scope, &window, |x| {
            iff(self.is_coradical(x), hoop.contains(&alg.neg(x)))
        }));
        let (singles, s1) = self.window.sample(&hoop, 1);
        let skeleton = self.skeleton.elements();
        let instances = (singles.len() * skeleton.len()) as u64;
        let witness = skeleton.iter().find_map(|b| {
            singles
                .iter()
                .find(|c| !self.is_radical(&alg.join(b, c)))
                .map(|c| (b.clone(), c.clone()))
        });
        report.push(match witness {
            None => Check::pass("skeleton join radical is radical", s1, instances),
            Some((b, c)) => Check::fail(
                "skeleton join radical is radical",
                s1,
                instances,
                vec![b.to_string(), c.to_string()],
                Failure::new(alg.join(&b, &c), "not radical"),
            ),
        });
        report
    }

    /// Decomposition identities on every window element.
    pub fn decomposition_report(&self) -> ValidationReport {
        let (window, scope) = self.window.sample(&self.algebra, 1);
        let mut report = ValidationReport::new("decomposition");
        report.push(scan::unary("recomposition", scope, &window, |a| {
            self.decompose(a).err().map(|e| Failure::new(e, a))
        }));
        report
    }
}

/// The radical `ℋ(A)` with the restricted operations.
#[derive(Clone, Debug)]
pub struct RadicalHoop {
    algebra: Algebra,
    parts: Vec<Option<Vec<Component>>>,
}

impl RadicalHoop {
    pub fn contains(&self, x: &Element) -> bool {
        x.0.iter().zip(&self.parts).all(|(c, part)| match part {
            Some(set) => set.contains(c),
            None => matches!(c, Component::Perfect(Signed::Pos(_))),
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }
}

impl Carrier for RadicalHoop {
    type Elem = Element;

    fn elements(&self, bound: u32) -> Vec<Element> {
        let parts: Vec<Vec<Component>> = self
            .parts
            .iter()
            .zip(self.algebra.factors())
            .map(|(part, factor)| match (part, factor) {
                (Some(set), _) => set.clone(),
                (None, Factor::Perfect(r)) => Cone::window(r.hoop.rank, bound)
                    .into_iter()
                    .map(|m| Component::Perfect(Signed::Pos(m)))
                    .collect(),
                (None, Factor::Finite(_)) => unreachable!("finite factors carry explicit radicals"),
            })
            .collect();
        cartesian(&parts)
    }

    fn is_finite(&self) -> bool {
        self.algebra.is_finite()
    }

    fn element_count(&self, bound: u32) -> usize {
        self.parts
            .iter()
            .zip(self.algebra.factors())
            .map(|(part, factor)| match (part, factor) {
                (Some(set), _) => set.len(),
                (None, Factor::Perfect(r)) => Cone::window_len(r.hoop.rank, bound),
                (None, Factor::Finite(_)) => unreachable!(),
            })
            .product()
    }
}

impl Semihoop for RadicalHoop {
    fn top(&self) -> Element {
        self.algebra.top()
    }

    fn mul(&self, x: &Element, y: &Element) -> Element {
        self.algebra.mul(x, y)
    }

    fn imp(&self, x: &Element, y: &Element) -> Element {
        self.algebra.imp(x, y)
    }

    fn meet(&self, x: &Element, y: &Element) -> Element {
        self.algebra.meet(x, y)
    }

    fn leq(&self, x: &Element, y: &Element) -> bool {
        self.algebra.leq(x, y)
    }
}
