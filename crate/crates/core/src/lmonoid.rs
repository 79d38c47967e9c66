//! Lattice-ordered commutative monoids and their Grothendieck ℓ-group envelopes.
//!
//! The envelope `K(M)` is the set of pair classes `[x, y]` of `M × M` under
//! `(x, y) ~ (x', y')` iff `z + x + y' = z + x' + y` for some `z`. For finite
//! monoids the witness `z` is searched over the whole carrier, which is exact.
//! Symbolic monoids are the cones `ℕᵏ`; they are cancellative, so classes are
//! identified with the integer vectors `x - y`.

use std::collections::BTreeSet;
use std::fmt;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::report::{Check, Failure, Scope, ValidationReport};
use crate::scan::{self, equal, Carrier, Window};
use crate::table::{check_index, check_size, Table};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLMonoid {
    add: Table,
    meet: Table,
    join: Table,
    unit: usize,
}

impl FiniteLMonoid {
    pub fn new(size: usize, add: Table, meet: Table, join: Table, unit: usize) -> Result<Self> {
        check_size("size", size)?;
        for (field, table) in [("add", &add), ("meet", &meet), ("join", &join)] {
            if table.size() != size {
                return Err(Error::structural(
                    field,
                    format!("table of size {} for carrier of size {size}", table.size()),
                ));
            }
        }
        check_index("unit", size, unit as i64)?;
        Ok(FiniteLMonoid {
            add,
            meet,
            join,
            unit,
        })
    }

    pub fn from_fns(
        size: usize,
        add: impl FnMut(usize, usize) -> usize,
        meet: impl FnMut(usize, usize) -> usize,
        join: impl FnMut(usize, usize) -> usize,
        unit: usize,
    ) -> Self {
        FiniteLMonoid::new(
            size,
            Table::from_fn(size, add),
            Table::from_fn(size, meet),
            Table::from_fn(size, join),
            unit,
        )
        .expect("tables built from functions have consistent shape")
    }

    pub fn size(&self) -> usize {
        self.add.size()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add.get(x, y)
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet.get(x, y)
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join.get(x, y)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.meet(x, y) == x
    }

    pub fn tables(&self) -> (&Table, &Table, &Table) {
        (&self.add, &self.meet, &self.join)
    }

    /// Componentwise product; element `(a, b)` has index `a * other.size() + b`.
    pub fn product(&self, other: &FiniteLMonoid) -> FiniteLMonoid {
        let m = other.size();
        let split = |i: usize| (i / m, i % m);
        let lift = |f: &dyn Fn(&FiniteLMonoid, usize, usize) -> usize,
                    g: &dyn Fn(&FiniteLMonoid, usize, usize) -> usize| {
            Table::from_fn(self.size() * m, |i, j| {
                let ((a1, b1), (a2, b2)) = (split(i), split(j));
                f(self, a1, a2) * m + g(other, b1, b2)
            })
        };
        FiniteLMonoid {
            add: lift(&|s, x, y| s.add(x, y), &|s, x, y| s.add(x, y)),
            meet: lift(&|s, x, y| s.meet(x, y), &|s, x, y| s.meet(x, y)),
            join: lift(&|s, x, y| s.join(x, y), &|s, x, y| s.join(x, y)),
            unit: self.unit * m + other.unit,
        }
    }
}

impl Carrier for FiniteLMonoid {
    type Elem = usize;

    fn elements(&self, _bound: u32) -> Vec<usize> {
        (0..self.size()).collect()
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn element_count(&self, _bound: u32) -> usize {
        self.size()
    }
}

/// Checks the commutative-monoid, lattice, and distribution laws exhaustively.
pub fn validate_lmonoid(m: &FiniteLMonoid) -> ValidationReport {
    let mut report = ValidationReport::new(format!("l-monoid of size {}", m.size()));
    let elems = m.elements(0);
    let s = Scope::Exhaustive;
    let u = m.unit();
    report.push(scan::ternary("add associative", s, &elems, |&x, &y, &z| {
        equal(m.add(m.add(x, y), z), m.add(x, m.add(y, z)))
    }));
    report.push(scan::binary("add commutative", s, &elems, |&x, &y| {
        equal(m.add(x, y), m.add(y, x))
    }));
    report.push(scan::unary("unit", s, &elems, |&x| equal(m.add(x, u), x)));
    for (name, op) in [("meet", &m.meet), ("join", &m.join)] {
        report.push(scan::ternary(&format!("{name} associative"), s, &elems, |&x, &y, &z| {
            equal(op.get(op.get(x, y), z), op.get(x, op.get(y, z)))
        }));
        report.push(scan::binary(&format!("{name} commutative"), s, &elems, |&x, &y| {
            equal(op.get(x, y), op.get(y, x))
        }));
        report.push(scan::unary(&format!("{name} idempotent"), s, &elems, |&x| {
            equal(op.get(x, x), x)
        }));
    }
    report.push(scan::binary("absorption", s, &elems, |&x, &y| {
        equal(m.meet(x, m.join(x, y)), x).or_else(|| equal(m.join(x, m.meet(x, y)), x))
    }));
    report.push(scan::ternary("D1", s, &elems, |&x, &y, &z| {
        equal(m.add(x, m.meet(y, z)), m.meet(m.add(x, y), m.add(x, z)))
    }));
    report.push(scan::ternary("D2", s, &elems, |&x, &y, &z| {
        equal(m.add(x, m.join(y, z)), m.join(m.add(x, y), m.add(x, z)))
    }));
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `(ℕᵏ, +, min, max, 0)`.
    Natural,
    /// `(ℕᵏ, +, max, min, 0)`: the monoid reduct of the cone hoop, where larger
    /// exponents are lower elements.
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolicMonoid {
    pub rank: usize,
    pub orientation: Orientation,
}

impl SymbolicMonoid {
    pub fn new(rank: usize, orientation: Orientation) -> Self {
        assert!((1..=crate::cone::MAX_RANK).contains(&rank));
        SymbolicMonoid { rank, orientation }
    }

    pub fn unit(&self) -> Cone {
        Cone::zero(self.rank)
    }

    pub fn add(&self, x: &Cone, y: &Cone) -> Cone {
        x.add(y)
    }

    pub fn meet(&self, x: &Cone, y: &Cone) -> Cone {
        match self.orientation {
            Orientation::Natural => x.inf(y),
            Orientation::Reversed => x.sup(y),
        }
    }

    pub fn join(&self, x: &Cone, y: &Cone) -> Cone {
        match self.orientation {
            Orientation::Natural => x.sup(y),
            Orientation::Reversed => x.inf(y),
        }
    }

    pub fn leq(&self, x: &Cone, y: &Cone) -> bool {
        self.meet(x, y) == *x
    }

    fn int_leq(&self, a: &[i64], b: &[i64]) -> bool {
        match self.orientation {
            Orientation::Natural => a.iter().zip(b).all(|(x, y)| x <= y),
            Orientation::Reversed => a.iter().zip(b).all(|(x, y)| x >= y),
        }
    }
}

impl Carrier for SymbolicMonoid {
    type Elem = Cone;

    fn elements(&self, bound: u32) -> Vec<Cone> {
        Cone::window(self.rank, bound)
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn element_count(&self, bound: u32) -> usize {
        Cone::window_len(self.rank, bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LMonoid {
    Finite(FiniteLMonoid),
    Symbolic(SymbolicMonoid),
}

/// An element of the base monoid of either representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Index(usize),
    Tuple(Cone),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Tuple(c) => write!(f, "{c}"),
        }
    }
}

/// Brute-force cancellativity for finite monoids; symbolic cones are cancellative.
pub fn is_cancellative(m: &LMonoid) -> bool {
    match m {
        LMonoid::Finite(m) => {
            let n = m.size();
            (0..n).all(|a| {
                (0..n).all(|b| a == b || (0..n).all(|c| m.add(a, c) != m.add(b, c)))
            })
        }
        LMonoid::Symbolic(_) => true,
    }
}

/// True when the unit is the top element, so `x + y <= x` always.
pub fn is_integral(m: &LMonoid) -> bool {
    match m {
        LMonoid::Finite(m) => (0..m.size()).all(|x| m.leq(x, m.unit())),
        LMonoid::Symbolic(s) => s.orientation == Orientation::Reversed,
    }
}

/// A class `[pos, neg]` of the envelope. Finite-mode elements carry any
/// representative pair; symbolic elements carry the integer vector `pos - neg`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum KElement {
    Pair(usize, usize),
    Integer(Vec<i64>),
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KElement::Pair(x, y) => write!(f, "[{x},{y}]"),
            KElement::Integer(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "<{}>", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteEnvelope {
    base: FiniteLMonoid,
    /// Class id of the pair `(x, y)` at index `x * n + y`.
    class_of: Vec<usize>,
    /// Canonical (lexicographically least) pair of every class.
    reps: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub enum KGroup {
    Finite(FiniteEnvelope),
    Symbolic(SymbolicMonoid),
}

/// The canonical map `h(x) = [x + x, x]`.
#[derive(Clone, Debug)]
pub struct Embedding {
    images: Option<Vec<KElement>>,
    injective: bool,
}

impl Embedding {
    pub fn apply(&self, x: &Point) -> KElement {
        match (x, &self.images) {
            (Point::Index(i), Some(images)) => images[*i].clone(),
            (Point::Tuple(c), None) => KElement::Integer(c.to_i64()),
            _ => panic!("point {x} does not belong to the embedded monoid"),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }
}

/// Builds `K(M)` and `h`. Injectivity of `h` is decided from the class
/// structure, independently of [`is_cancellative`].
pub fn k_envelope(m: &LMonoid) -> (KGroup, Embedding) {
    match m {
        LMonoid::Finite(base) => {
            let n = base.size();
            let mut class_of = vec![usize::MAX; n * n];
            let mut reps = Vec::new();
            for p in 0..n * n {
                if class_of[p] != usize::MAX {
                    continue;
                }
                let id = reps.len();
                let (x, y) = (p / n, p % n);
                reps.push((x, y));
                for q in p..n * n {
                    if class_of[q] == usize::MAX && pair_equivalent(base, (x, y), (q / n, q % n)) {
                        class_of[q] = id;
                    }
                }
            }
            let group = KGroup::Finite(FiniteEnvelope {
                base: base.clone(),
                class_of,
                reps,
            });
            let images: Vec<KElement> = (0..n)
                .map(|x| group.canonical(&KElement::Pair(base.add(x, x), x)))
                .collect();
            let distinct: BTreeSet<_> = images
                .iter()
                .map(|e| group.class_index(e).expect("finite element"))
                .collect();
            let injective = distinct.len() == n;
            (
                group,
                Embedding {
                    images: Some(images),
                    injective,
                },
            )
        }
        LMonoid::Symbolic(s) => (
            KGroup::Symbolic(*s),
            Embedding {
                images: None,
                injective: true,
            },
        ),
    }
}

fn pair_equivalent(m: &FiniteLMonoid, (x, y): (usize, usize), (x2, y2): (usize, usize)) -> bool {
    let left = m.add(x, y2);
    let right = m.add(x2, y);
    (0..m.size()).any(|z| m.add(z, left) == m.add(z, right))
}

fn pair_leq(m: &FiniteLMonoid, (x1, y1): (usize, usize), (x2, y2): (usize, usize)) -> bool {
    let left = m.add(x1, y2);
    let right = m.add(y1, x2);
    (0..m.size()).any(|z| m.leq(m.add(z, left), m.add(z, right)))
}

impl KGroup {
    pub fn is_finite(&self) -> bool {
        matches!(self, KGroup::Finite(_))
    }

    fn finite(&self) -> &FiniteEnvelope {
        match self {
            KGroup::Finite(f) => f,
            KGroup::Symbolic(_) => panic!("finite-mode operation on a symbolic envelope"),
        }
    }

    fn pair(e: &KElement) -> (usize, usize) {
        match e {
            KElement::Pair(x, y) => (*x, *y),
            KElement::Integer(_) => panic!("symbolic element {e} used with a finite envelope"),
        }
    }

    fn ints(e: &KElement) -> &[i64] {
        match e {
            KElement::Integer(v) => v,
            KElement::Pair(..) => panic!("finite element {e} used with a symbolic envelope"),
        }
    }

    /// The class `[x, y]` for base elements `x`, `y`.
    pub fn class_of_pair(&self, x: &Point, y: &Point) -> KElement {
        match (x, y) {
            (Point::Index(a), Point::Index(b)) => KElement::Pair(*a, *b),
            (Point::Tuple(a), Point::Tuple(b)) => {
                KElement::Integer(a.to_i64().iter().zip(b.to_i64()).map(|(p, q)| p - q).collect())
            }
            _ => panic!("mixed pair ({x}, {y})"),
        }
    }

    pub fn zero(&self) -> KElement {
        match self {
            KGroup::Finite(f) => KElement::Pair(f.base.unit(), f.base.unit()),
            KGroup::Symbolic(s) => KElement::Integer(vec![0; s.rank]),
        }
    }

    /// Class id in finite mode.
    pub fn class_index(&self, e: &KElement) -> Option<usize> {
        match self {
            KGroup::Finite(f) => {
                let (x, y) = Self::pair(e);
                Some(f.class_of[x * f.base.size() + y])
            }
            KGroup::Symbolic(_) => None,
        }
    }

    /// The lexicographically least representative in finite mode; identity otherwise.
    pub fn canonical(&self, e: &KElement) -> KElement {
        match self {
            KGroup::Finite(f) => {
                let (x, y) = f.reps[self.class_index(e).unwrap()];
                KElement::Pair(x, y)
            }
            KGroup::Symbolic(_) => e.clone(),
        }
    }

    /// Canonical representatives of all classes (finite mode only).
    pub fn classes(&self) -> Vec<KElement> {
        match self {
            KGroup::Finite(f) => f.reps.iter().map(|&(x, y)| KElement::Pair(x, y)).collect(),
            KGroup::Symbolic(_) => Vec::new(),
        }
    }

    pub fn base_size(&self) -> Option<usize> {
        match self {
            KGroup::Finite(f) => Some(f.base.size()),
            KGroup::Symbolic(_) => None,
        }
    }

    /// Equality of classes. Finite mode searches the whole carrier for a witness `z`.
    pub fn k_equal(&self, e1: &KElement, e2: &KElement) -> bool {
        match self {
            KGroup::Finite(f) => pair_equivalent(&f.base, Self::pair(e1), Self::pair(e2)),
            KGroup::Symbolic(_) => Self::ints(e1) == Self::ints(e2),
        }
    }

    /// `[x1, y1] <= [x2, y2]` iff `z + x1 + y2 <= z + y1 + x2` for some `z`.
    pub fn k_leq(&self, e1: &KElement, e2: &KElement) -> bool {
        match self {
            KGroup::Finite(f) => pair_leq(&f.base, Self::pair(e1), Self::pair(e2)),
            KGroup::Symbolic(s) => s.int_leq(Self::ints(e1), Self::ints(e2)),
        }
    }

    pub fn add(&self, e1: &KElement, e2: &KElement) -> KElement {
        match self {
            KGroup::Finite(f) => {
                let ((x1, y1), (x2, y2)) = (Self::pair(e1), Self::pair(e2));
                KElement::Pair(f.base.add(x1, x2), f.base.add(y1, y2))
            }
            KGroup::Symbolic(_) => KElement::Integer(
                Self::ints(e1)
                    .iter()
                    .zip(Self::ints(e2))
                    .map(|(a, b)| a + b)
                    .collect(),
            ),
        }
    }

    pub fn neg(&self, e: &KElement) -> KElement {
        match self {
            KGroup::Finite(_) => {
                let (x, y) = Self::pair(e);
                KElement::Pair(y, x)
            }
            KGroup::Symbolic(_) => KElement::Integer(Self::ints(e).iter().map(|a| -a).collect()),
        }
    }

    pub fn sub(&self, e1: &KElement, e2: &KElement) -> KElement {
        self.add(e1, &self.neg(e2))
    }

    /// `[x1, y1] ⊔ [x2, y2] = [x1 + x2, (x1 + y2) ∧ (x2 + y1)]`.
    pub fn k_join(&self, e1: &KElement, e2: &KElement) -> KElement {
        match self {
            KGroup::Finite(f) => {
                let m = &f.base;
                let ((x1, y1), (x2, y2)) = (Self::pair(e1), Self::pair(e2));
                KElement::Pair(m.add(x1, x2), m.meet(m.add(x1, y2), m.add(x2, y1)))
            }
            KGroup::Symbolic(s) => self.symbolic_lattice(s, e1, e2, true),
        }
    }

    /// `[x1, y1] ⊓ [x2, y2] = [(x1 + y2) ∧ (x2 + y1), y1 + y2]`.
    pub fn k_meet(&self, e1: &KElement, e2: &KElement) -> KElement {
        match self {
            KGroup::Finite(f) => {
                let m = &f.base;
                let ((x1, y1), (x2, y2)) = (Self::pair(e1), Self::pair(e2));
                KElement::Pair(m.meet(m.add(x1, y2), m.add(x2, y1)), m.add(y1, y2))
            }
            KGroup::Symbolic(s) => self.symbolic_lattice(s, e1, e2, false),
        }
    }

    fn symbolic_lattice(&self, s: &SymbolicMonoid, e1: &KElement, e2: &KElement, join: bool) -> KElement {
        let upward = join == (s.orientation == Orientation::Natural);
        KElement::Integer(
            Self::ints(e1)
                .iter()
                .zip(Self::ints(e2))
                .map(|(&a, &b)| if upward { a.max(b) } else { a.min(b) })
                .collect(),
        )
    }

    /// An element of the subgroup generated by `h[M]` lying below `[a, b]`.
    ///
    /// For integral monoids (unit on top) this is `h(a ∧ b)`. Otherwise
    /// `h(a ∧ b) - h(b)` is returned, which lies below `[a, b]` in every ℓ-monoid.
    pub fn image_bound(&self, emb: &Embedding, integral: bool, a: &Point, b: &Point) -> KElement {
        let c = match (self, a, b) {
            (KGroup::Finite(f), Point::Index(x), Point::Index(y)) => Point::Index(f.base.meet(*x, *y)),
            (KGroup::Symbolic(s), Point::Tuple(x), Point::Tuple(y)) => Point::Tuple(s.meet(x, y)),
            _ => panic!("pair ({a}, {b}) does not match the envelope's mode"),
        };
        let hc = emb.apply(&c);
        let bound = if integral {
            hc
        } else {
            self.sub(&hc, &emb.apply(b))
        };
        self.canonical(&bound)
    }

    /// Dual of [`KGroup::image_bound`]: an image-subgroup element above `[a, b]`.
    pub fn image_upper_bound(&self, emb: &Embedding, integral: bool, a: &Point, b: &Point) -> KElement {
        let lower = self.image_bound(emb, integral, b, a);
        self.canonical(&self.neg(&lower))
    }

    /// Class ids of the ℓ-subgroup generated by `h[M]` (finite mode).
    pub fn image_subgroup(&self, emb: &Embedding) -> BTreeSet<usize> {
        let n = self.base_size().expect("finite envelope");
        let mut members: Vec<KElement> = vec![self.canonical(&self.zero())];
        members.extend((0..n).map(|x| emb.apply(&Point::Index(x))));
        let mut ids: BTreeSet<usize> = members.iter().filter_map(|e| self.class_index(e)).collect();
        loop {
            let current: Vec<KElement> = ids
                .iter()
                .map(|&id| {
                    let (x, y) = self.finite().reps[id];
                    KElement::Pair(x, y)
                })
                .collect();
            let before = ids.len();
            for e1 in &current {
                ids.insert(self.class_index(&self.neg(e1)).unwrap());
                for e2 in &current {
                    for r in [self.add(e1, e2), self.k_join(e1, e2), self.k_meet(e1, e2)] {
                        ids.insert(self.class_index(&r).unwrap());
                    }
                }
            }
            if ids.len() == before {
                return ids;
            }
        }
    }
}

fn integer_window(rank: usize, radius: i64) -> Vec<KElement> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-radius..=radius).map(move |c| {
                    let mut next = v.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(KElement::Integer).collect()
}

/// Exhaustive (finite) or windowed (symbolic) verification of the envelope's
/// ℓ-group structure and of `h`.
pub fn envelope_report(m: &LMonoid, group: &KGroup, emb: &Embedding, window: &Window) -> ValidationReport {
    let mut report = ValidationReport::new("Grothendieck envelope");
    let (elems, pair_scope, triple_elems, triple_scope) = match m {
        LMonoid::Finite(base) => {
            let n = base.size();
            let pairs: Vec<KElement> = (0..n * n).map(|p| KElement::Pair(p / n, p % n)).collect();
            verify_class_structure(base, group, &pairs, &mut report);
            let classes = group.classes();
            (classes.clone(), Scope::Exhaustive, classes, Scope::Exhaustive)
        }
        LMonoid::Symbolic(s) => {
            let radius = |arity: u32, budget: usize| {
                let mut r = i64::from(window.bound);
                while r > 0 && ((2 * r + 1) as usize).pow(s.rank as u32 * arity) > budget {
                    r -= 1;
                }
                r
            };
            let r2 = radius(2, window.pair_budget);
            let r3 = radius(3, window.triple_budget);
            (
                integer_window(s.rank, r2),
                Scope::Window(r2 as u32),
                integer_window(s.rank, r3),
                Scope::Window(r3 as u32),
            )
        }
    };

    let eq = |a: &KElement, b: &KElement| group.k_equal(a, b);
    let show = |e: &KElement| e.to_string();
    let eqf = |a: KElement, b: KElement| (!eq(&a, &b)).then(|| Failure::new(show(&a), show(&b)));

    report.push(scan::unary("<= reflexive", pair_scope, &elems, |e| {
        (!group.k_leq(e, e)).then(|| Failure::new(e, e))
    }));
    report.push(scan::binary("<= antisymmetric", pair_scope, &elems, |a, b| {
        (group.k_leq(a, b) && group.k_leq(b, a) && !eq(a, b)).then(|| Failure::new(a, b))
    }));
    report.push(scan::ternary("<= transitive", triple_scope, &triple_elems, |a, b, c| {
        (group.k_leq(a, b) && group.k_leq(b, c) && !group.k_leq(a, c)).then(|| Failure::new(a, c))
    }));
    report.push(scan::ternary("+ associative", triple_scope, &triple_elems, |a, b, c| {
        eqf(group.add(&group.add(a, b), c), group.add(a, &group.add(b, c)))
    }));
    report.push(scan::binary("+ commutative", pair_scope, &elems, |a, b| {
        eqf(group.add(a, b), group.add(b, a))
    }));
    report.push(scan::unary("zero and inverse", pair_scope, &elems, |a| {
        eqf(group.add(a, &group.zero()), a.clone()).or_else(|| eqf(group.add(a, &group.neg(a)), group.zero()))
    }));
    report.push(scan::binary("join is an upper bound", pair_scope, &elems, |a, b| {
        let j = group.k_join(a, b);
        (!group.k_leq(a, &j) || !group.k_leq(b, &j)).then(|| Failure::new(&j, "not above both"))
    }));
    report.push(scan::ternary("join is least", triple_scope, &triple_elems, |a, b, u| {
        let above = group.k_leq(a, u) && group.k_leq(b, u);
        (above && !group.k_leq(&group.k_join(a, b), u)).then(|| Failure::new(group.k_join(a, b), u))
    }));
    report.push(scan::binary("meet is a lower bound", pair_scope, &elems, |a, b| {
        let m = group.k_meet(a, b);
        (!group.k_leq(&m, a) || !group.k_leq(&m, b)).then(|| Failure::new(&m, "not below both"))
    }));
    report.push(scan::ternary("meet is greatest", triple_scope, &triple_elems, |a, b, l| {
        let below = group.k_leq(l, a) && group.k_leq(l, b);
        (below && !group.k_leq(l, &group.k_meet(a, b))).then(|| Failure::new(l, group.k_meet(a, b)))
    }));
    report.push(scan::ternary("+ distributes over join", triple_scope, &triple_elems, |a, b, c| {
        eqf(
            group.add(a, &group.k_join(b, c)),
            group.k_join(&group.add(a, b), &group.add(a, c)),
        )
    }));
    report.push(scan::ternary("+ distributes over meet", triple_scope, &triple_elems, |a, b, c| {
        eqf(
            group.add(a, &group.k_meet(b, c)),
            group.k_meet(&group.add(a, b), &group.add(a, c)),
        )
    }));

    verify_embedding(m, group, emb, window, &mut report);
    report.flag("cancellative", is_cancellative(m));
    report.flag("injective", emb.is_injective());
    report.flag("integral", is_integral(m));
    report
}

fn verify_class_structure(base: &FiniteLMonoid, group: &KGroup, pairs: &[KElement], report: &mut ValidationReport) {
    let s = Scope::Exhaustive;
    let eq = |a: &KElement, b: &KElement| group.k_equal(a, b);
    report.push(scan::unary("~ reflexive", s, pairs, |p| (!eq(p, p)).then(|| Failure::new(p, p))));
    report.push(scan::binary("~ symmetric", s, pairs, |p, q| {
        (eq(p, q) != eq(q, p)).then(|| Failure::new(p, q))
    }));
    report.push(scan::ternary("~ transitive", s, pairs, |p, q, r| {
        (eq(p, q) && eq(q, r) && !eq(p, r)).then(|| Failure::new(p, r))
    }));
    report.push(scan::binary("class ids agree with ~", s, pairs, |p, q| {
        (eq(p, q) != (group.class_index(p) == group.class_index(q))).then(|| Failure::new(p, q))
    }));

    // Representative independence: equivalent inputs give equivalent outputs.
    let classes_of: Vec<Vec<&KElement>> = {
        let mut buckets = vec![Vec::new(); group.classes().len()];
        for p in pairs {
            buckets[group.class_index(p).unwrap()].push(p);
        }
        buckets
    };
    let binary_ops: [(&str, &dyn Fn(&KElement, &KElement) -> KElement); 3] = [
        ("+ well-defined", &|a, b| group.add(a, b)),
        ("join well-defined", &|a, b| group.k_join(a, b)),
        ("meet well-defined", &|a, b| group.k_meet(a, b)),
    ];
    let reps = group.classes();
    for (name, op) in binary_ops {
        report.push(scan::binary(name, s, &reps, |c1, c2| {
            let expected = op(c1, c2);
            let bucket1 = &classes_of[group.class_index(c1).unwrap()];
            let bucket2 = &classes_of[group.class_index(c2).unwrap()];
            bucket1.iter().find_map(|p| {
                bucket2.iter().find_map(|q| {
                    let got = op(p, q);
                    (!eq(&got, &expected)).then(|| Failure::new(&got, &expected))
                })
            })
        }));
    }
    report.push(scan::unary("- well-defined", s, &reps, |c| {
        let expected = group.neg(c);
        classes_of[group.class_index(c).unwrap()].iter().find_map(|p| {
            let got = group.neg(p);
            (!eq(&got, &expected)).then(|| Failure::new(&got, &expected))
        })
    }));
    report.push(scan::binary("<= well-defined", s, &reps, |c1, c2| {
        let expected = group.k_leq(c1, c2);
        let bucket1 = &classes_of[group.class_index(c1).unwrap()];
        let bucket2 = &classes_of[group.class_index(c2).unwrap()];
        bucket1.iter().find_map(|p| {
            bucket2
                .iter()
                .find_map(|q| (group.k_leq(p, q) != expected).then(|| Failure::new(p, q)))
        })
    }));
    let _ = base;
}

fn verify_embedding(m: &LMonoid, group: &KGroup, emb: &Embedding, window: &Window, report: &mut ValidationReport) {
    let (points, scope): (Vec<Point>, Scope) = match m {
        LMonoid::Finite(base) => ((0..base.size()).map(Point::Index).collect(), Scope::Exhaustive),
        LMonoid::Symbolic(s) => {
            let (cones, scope) = window.sample(s, 2);
            (cones.into_iter().map(Point::Tuple).collect(), scope)
        }
    };
    let add = |x: &Point, y: &Point| -> Point {
        match (m, x, y) {
            (LMonoid::Finite(b), Point::Index(a), Point::Index(c)) => Point::Index(b.add(*a, *c)),
            (LMonoid::Symbolic(s), Point::Tuple(a), Point::Tuple(c)) => Point::Tuple(s.add(a, c)),
            _ => unreachable!(),
        }
    };
    let lattice = |x: &Point, y: &Point, join: bool| -> Point {
        match (m, x, y) {
            (LMonoid::Finite(b), Point::Index(a), Point::Index(c)) => {
                Point::Index(if join { b.join(*a, *c) } else { b.meet(*a, *c) })
            }
            (LMonoid::Symbolic(s), Point::Tuple(a), Point::Tuple(c)) => {
                Point::Tuple(if join { s.join(a, c) } else { s.meet(a, c) })
            }
            _ => unreachable!(),
        }
    };
    let unit = match m {
        LMonoid::Finite(b) => Point::Index(b.unit()),
        LMonoid::Symbolic(s) => Point::Tuple(s.unit()),
    };
    let eqf = |a: KElement, b: KElement| (!group.k_equal(&a, &b)).then(|| Failure::new(&a, &b));

    report.push(scan::unary("h agrees with [x+x, x]", scope, &points, |x| {
        eqf(emb.apply(x), group.class_of_pair(&add(x, x), x))
    }));
    report.push(Check::fact(
        "h(unit) = 0",
        group.k_equal(&emb.apply(&unit), &group.zero()),
        emb.apply(&unit),
        group.zero(),
    ));
    report.push(scan::binary("h preserves +", scope, &points, |x, y| {
        eqf(emb.apply(&add(x, y)), group.add(&emb.apply(x), &emb.apply(y)))
    }));
    report.push(scan::binary("h preserves meet", scope, &points, |x, y| {
        eqf(emb.apply(&lattice(x, y, false)), group.k_meet(&emb.apply(x), &emb.apply(y)))
    }));
    report.push(scan::binary("h preserves join", scope, &points, |x, y| {
        eqf(emb.apply(&lattice(x, y, true)), group.k_join(&emb.apply(x), &emb.apply(y)))
    }));
    report.push(Check::fact(
        "h injective iff cancellative",
        emb.is_injective() == is_cancellative(m),
        format!("injective = {}", emb.is_injective()),
        format!("cancellative = {}", is_cancellative(m)),
    ));
}

/// Checks that `image_bound` lands in the image subgroup below every element.
pub fn image_bound_report(m: &LMonoid, group: &KGroup, emb: &Embedding, window: &Window) -> ValidationReport {
    let mut report = ValidationReport::new("image bounds");
    let integral = is_integral(m);
    let (points, scope): (Vec<Point>, Scope) = match m {
        LMonoid::Finite(base) => ((0..base.size()).map(Point::Index).collect(), Scope::Exhaustive),
        LMonoid::Symbolic(s) => {
            let (cones, scope) = window.sample(s, 2);
            (cones.into_iter().map(Point::Tuple).collect(), scope)
        }
    };
    let subgroup = group.is_finite().then(|| group.image_subgroup(emb));
    report.push(scan::binary("lower bound in image subgroup", scope, &points, |a, b| {
        let e = group.class_of_pair(a, b);
        let bound = group.image_bound(emb, integral, a, b);
        if !group.k_leq(&bound, &e) {
            return Some(Failure::new(&bound, format!("not below {e}")));
        }
        match &subgroup {
            Some(ids) if !ids.contains(&group.class_index(&bound).unwrap()) => {
                Some(Failure::new(&bound, "outside the image subgroup"))
            }
            _ => None,
        }
    }));
    report.push(scan::binary("upper bound in image subgroup", scope, &points, |a, b| {
        let e = group.class_of_pair(a, b);
        let bound = group.image_upper_bound(emb, integral, a, b);
        if !group.k_leq(&e, &bound) {
            return Some(Failure::new(&bound, format!("not above {e}")));
        }
        match &subgroup {
            Some(ids) if !ids.contains(&group.class_index(&bound).unwrap()) => {
                Some(Failure::new(&bound, "outside the image subgroup"))
            }
            _ => None,
        }
    }));
    report
}
