//! Semihoops, their validators, and states into the nonpositive reals.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::hypernum::Rational;
use crate::lmonoid::{self, Embedding, FiniteLMonoid, KElement, KGroup, LMonoid, Orientation, Point, SymbolicMonoid};
use crate::report::{Check, Failure, Scope, ValidationReport};
use crate::scan::{self, equal, implies, Carrier, Window};
use crate::table::{check_index, check_size, Table};

/// The operations `·`, `→`, `∧` and the top element `1`.
pub trait Semihoop: Carrier {
    fn top(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn imp(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn meet(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        self.meet(x, y) == *x
    }

    /// The pseudo-join `((x → y) → y) ∧ ((y → x) → x)`.
    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let left = self.imp(&self.imp(x, y), y);
        let right = self.imp(&self.imp(y, x), x);
        self.meet(&left, &right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSemihoop {
    times: Table,
    imp: Table,
    meet: Table,
    top: usize,
}

impl FiniteSemihoop {
    pub fn new(size: usize, times: Table, imp: Table, meet: Table, top: usize) -> Result<Self> {
        check_size("size", size)?;
        for (field, table) in [("times", &times), ("impl", &imp), ("meet", &meet)] {
            if table.size() != size {
                return Err(Error::structural(
                    field,
                    format!("table of size {} for carrier of size {size}", table.size()),
                ));
            }
        }
        check_index("top", size, top as i64)?;
        Ok(FiniteSemihoop { times, imp, meet, top })
    }

    pub fn from_fns(
        size: usize,
        times: impl FnMut(usize, usize) -> usize,
        imp: impl FnMut(usize, usize) -> usize,
        meet: impl FnMut(usize, usize) -> usize,
        top: usize,
    ) -> Self {
        FiniteSemihoop::new(
            size,
            Table::from_fn(size, times),
            Table::from_fn(size, imp),
            Table::from_fn(size, meet),
            top,
        )
        .expect("tables built from functions have consistent shape")
    }

    pub fn size(&self) -> usize {
        self.times.size()
    }

    pub fn top_index(&self) -> usize {
        self.top
    }

    pub fn tables(&self) -> (&Table, &Table, &Table) {
        (&self.times, &self.imp, &self.meet)
    }

    pub fn times(&self, x: usize, y: usize) -> usize {
        self.times.get(x, y)
    }

    pub fn implies(&self, x: usize, y: usize) -> usize {
        self.imp.get(x, y)
    }

    pub fn meet_index(&self, x: usize, y: usize) -> usize {
        self.meet.get(x, y)
    }

    pub fn join_index(&self, x: usize, y: usize) -> usize {
        self.join(&x, &y)
    }

    /// The ℓ-monoid `(H, ·, ∧, ∨, 1)` with the pseudo-join as lattice join.
    pub fn monoid_reduct(&self) -> FiniteLMonoid {
        FiniteLMonoid::from_fns(
            self.size(),
            |x, y| self.times(x, y),
            |x, y| self.meet_index(x, y),
            |x, y| self.join_index(x, y),
            self.top,
        )
    }

    /// Componentwise product; `(a, b)` has index `a * other.size() + b`.
    pub fn product(&self, other: &FiniteSemihoop) -> FiniteSemihoop {
        let m = other.size();
        let n = self.size() * m;
        let lift = |f: &dyn Fn(usize, usize) -> usize, g: &dyn Fn(usize, usize) -> usize| {
            Table::from_fn(n, |i, j| f(i / m, j / m) * m + g(i % m, j % m))
        };
        FiniteSemihoop {
            times: lift(&|x, y| self.times(x, y), &|x, y| other.times(x, y)),
            imp: lift(&|x, y| self.implies(x, y), &|x, y| other.implies(x, y)),
            meet: lift(&|x, y| self.meet_index(x, y), &|x, y| other.meet_index(x, y)),
            top: self.top * m + other.top,
        }
    }
}

impl Carrier for FiniteSemihoop {
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

impl Semihoop for FiniteSemihoop {
    fn top(&self) -> usize {
        self.top
    }

    fn mul(&self, x: &usize, y: &usize) -> usize {
        self.times(*x, *y)
    }

    fn imp(&self, x: &usize, y: &usize) -> usize {
        self.implies(*x, *y)
    }

    fn meet(&self, x: &usize, y: &usize) -> usize {
        self.meet_index(*x, *y)
    }
}

/// The free cancellative hoop on `rank` generators: tuples of exponents with
/// `x · y = x + y` and `x → y = y ∸ x`. Larger exponents are lower elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeHoop {
    pub rank: usize,
}

impl ConeHoop {
    pub fn new(rank: usize) -> Self {
        assert!((1..=crate::cone::MAX_RANK).contains(&rank));
        ConeHoop { rank }
    }

    /// The ℓ-monoid `(ℕᵏ, +, max, min, 0)` underlying the hoop order.
    pub fn monoid_reduct(&self) -> SymbolicMonoid {
        SymbolicMonoid::new(self.rank, Orientation::Reversed)
    }
}

impl Carrier for ConeHoop {
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

impl Semihoop for ConeHoop {
    fn top(&self) -> Cone {
        Cone::zero(self.rank)
    }

    fn mul(&self, x: &Cone, y: &Cone) -> Cone {
        x.add(y)
    }

    fn imp(&self, x: &Cone, y: &Cone) -> Cone {
        y.monus(x)
    }

    fn meet(&self, x: &Cone, y: &Cone) -> Cone {
        x.sup(y)
    }

    fn leq(&self, x: &Cone, y: &Cone) -> bool {
        x.dominates(y)
    }

    fn join(&self, x: &Cone, y: &Cone) -> Cone {
        x.inf(y)
    }
}

/// `(ℝ⁻, +, ⊖, min, 0)` with `x ⊖ y = min(0, y - x)`, on rationals. The
/// window is the grid of halves in `[-bound, 0]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NegativeReals;

impl Carrier for NegativeReals {
    type Elem = Rational;

    fn elements(&self, bound: u32) -> Vec<Rational> {
        (0..=2 * i64::from(bound)).map(|k| Rational::new(-k, 2)).collect()
    }

    fn is_finite(&self) -> bool {
        false
    }
}

impl Semihoop for NegativeReals {
    fn top(&self) -> Rational {
        Rational::zero()
    }

    fn mul(&self, x: &Rational, y: &Rational) -> Rational {
        x + y
    }

    fn imp(&self, x: &Rational, y: &Rational) -> Rational {
        (y - x).min(Rational::zero())
    }

    fn meet(&self, x: &Rational, y: &Rational) -> Rational {
        *x.min(y)
    }
}

/// Checks the semihoop axioms and classifies the structure. Symbolic
/// carriers are scanned on the window only.
pub fn validate_semihoop<H: Semihoop>(h: &H, window: &Window) -> ValidationReport {
    let subject = if h.is_finite() {
        format!("semihoop of size {}", h.element_count(0))
    } else {
        "symbolic semihoop".to_string()
    };
    let mut report = ValidationReport::new(subject);
    let (singles, s1) = window.sample(h, 1);
    let (doubles, s2) = window.sample(h, 2);
    let (triples, s3) = window.sample(h, 3);
    let one = h.top();

    report.push(scan::ternary("meet associative", s3, &triples, |x, y, z| {
        equal(h.meet(&h.meet(x, y), z), h.meet(x, &h.meet(y, z)))
    }));
    report.push(scan::binary("meet commutative", s2, &doubles, |x, y| {
        equal(h.meet(x, y), h.meet(y, x))
    }));
    report.push(scan::unary("meet idempotent", s1, &singles, |x| equal(h.meet(x, x), x.clone())));
    report.push(scan::unary("top is an upper bound", s1, &singles, |x| {
        equal(h.meet(x, &one), x.clone())
    }));
    report.push(scan::ternary("mul associative", s3, &triples, |x, y, z| {
        equal(h.mul(&h.mul(x, y), z), h.mul(x, &h.mul(y, z)))
    }));
    report.push(scan::binary("mul commutative", s2, &doubles, |x, y| {
        equal(h.mul(x, y), h.mul(y, x))
    }));
    report.push(scan::unary("mul unit", s1, &singles, |x| equal(h.mul(x, &one), x.clone())));
    report.push(scan::ternary("mul isotone", s3, &triples, |x, y, z| {
        implies(h.leq(x, y), h.leq(&h.mul(x, z), &h.mul(y, z)))
    }));
    report.push(scan::binary("order iff implication is top", s2, &doubles, |x, y| {
        let holds = h.leq(x, y) == (h.imp(x, y) == one);
        (!holds).then(|| Failure::new(h.imp(x, y), format!("leq = {}", h.leq(x, y))))
    }));
    report.push(scan::ternary("currying", s3, &triples, |x, y, z| {
        equal(h.imp(&h.mul(x, y), z), h.imp(x, &h.imp(y, z)))
    }));
    report.push(scan::ternary("residuation", s3, &triples, |x, y, z| {
        let lhs = h.leq(&h.mul(x, z), y);
        let rhs = h.leq(z, &h.imp(x, y));
        (lhs != rhs).then(|| Failure::new(format!("x·z <= y is {lhs}"), format!("z <= x→y is {rhs}")))
    }));
    let base_ok = report.is_valid();

    let pre = scan::ternary("Pre", s3, &triples, |x, y, z| {
        let lhs = h.imp(&h.imp(x, y), z);
        let rhs = h.imp(&h.imp(&h.imp(y, x), z), z);
        (!h.leq(&lhs, &rhs)).then(|| Failure::new(lhs, rhs))
    });
    let div = scan::binary("Div", s2, &doubles, |x, y| {
        equal(h.mul(x, &h.imp(x, y)), h.mul(y, &h.imp(y, x)))
    });
    let canc = scan::binary("Canc", s2, &doubles, |x, y| {
        equal(h.imp(&h.imp(x, &h.mul(x, y)), y), one.clone())
    });
    let lattice = scan::ternary("pseudo-join associative", s3, &triples, |x, y, z| {
        equal(h.join(&h.join(x, y), z), h.join(x, &h.join(y, z)))
    });
    let prelinear = base_ok && pre.passed();
    let basic = prelinear && div.passed();
    report.flag("prelinear", prelinear);
    report.flag("basic", basic);
    report.flag("divisible", base_ok && div.passed());
    report.flag("cancellative", basic && canc.passed());
    report.flag("lattice", lattice.passed());
    // Only the semihoop axioms and, for prelinear structures, the join law are
    // requirements; Div and Canc are classifications.
    report.push(pre);
    report.push(Check { verdict: classification(&div), ..div });
    report.push(Check { verdict: classification(&canc), ..canc });
    if prelinear {
        report.push(lattice);
    } else {
        report.push(Check { verdict: classification(&lattice), ..lattice });
    }
    report
}

fn classification(check: &Check) -> crate::report::Verdict {
    if check.passed() {
        crate::report::Verdict::Pass
    } else {
        crate::report::Verdict::Skipped
    }
}

/// A state `w : H → ℝ⁻`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemihoopState {
    /// Values by carrier index; may be partial until validated.
    Table(BTreeMap<usize, Rational>),
    /// `w(m) = -⟨λ, m⟩` on a cone hoop.
    Weights(Vec<Rational>),
}

impl SemihoopState {
    pub fn zero_table(size: usize) -> Self {
        SemihoopState::Table((0..size).map(|i| (i, Rational::zero())).collect())
    }

    pub fn at_index(&self, i: usize) -> Option<Rational> {
        match self {
            SemihoopState::Table(t) => t.get(&i).copied(),
            SemihoopState::Weights(_) => None,
        }
    }

    pub fn at_cone(&self, m: &Cone) -> Option<Rational> {
        match self {
            SemihoopState::Weights(lambda) if lambda.len() == m.rank() => Some(weighted(lambda, m)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SemihoopState::Table(t) => t.values().all(Zero::is_zero),
            SemihoopState::Weights(l) => l.iter().all(Zero::is_zero),
        }
    }
}

pub(crate) fn weighted(lambda: &[Rational], m: &Cone) -> Rational {
    -lambda
        .iter()
        .zip(m.exps())
        .map(|(l, &e)| l * Rational::from(i64::from(e)))
        .sum::<Rational>()
}

/// A semihoop of either representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnySemihoop {
    Finite(FiniteSemihoop),
    Cone(ConeHoop),
}

impl AnySemihoop {
    pub fn validate(&self, window: &Window) -> ValidationReport {
        match self {
            AnySemihoop::Finite(h) => validate_semihoop(h, window),
            AnySemihoop::Cone(h) => validate_semihoop(h, window),
        }
    }
}

/// Resolves a state against a finite semihoop, rejecting partial tables.
fn finite_values(h: &FiniteSemihoop, w: &SemihoopState) -> Result<Vec<Rational>> {
    match w {
        SemihoopState::Table(t) => {
            if let Some(&bad) = t.keys().find(|&&k| k >= h.size()) {
                return Err(Error::structural("state", format!("index {bad} outside the carrier")));
            }
            (0..h.size())
                .map(|i| {
                    t.get(&i)
                        .copied()
                        .ok_or_else(|| Error::structural("state", format!("no value for element {i}")))
                })
                .collect()
        }
        SemihoopState::Weights(_) => Err(Error::structural(
            "state",
            "weight vector given for a finite semihoop; expected an index table",
        )),
    }
}

fn cone_weights<'a>(h: &ConeHoop, w: &'a SemihoopState) -> Result<&'a [Rational]> {
    match w {
        SemihoopState::Weights(l) if l.len() == h.rank => Ok(l),
        SemihoopState::Weights(l) => Err(Error::structural(
            "lambda",
            format!("expected {} weights, found {}", h.rank, l.len()),
        )),
        SemihoopState::Table(_) => Err(Error::structural(
            "state",
            "index table given for a cone hoop; expected {\"lambda\": [...]}",
        )),
    }
}

/// Runs the state checks `v1`, `v2`, `v3` and `nonpositive` for a map given as a function.
pub fn validate_state_fn<H: Semihoop>(
    h: &H,
    w: impl Fn(&H::Elem) -> Rational,
    window: &Window,
) -> ValidationReport {
    let mut report = ValidationReport::new("state");
    let (singles, s1) = window.sample(h, 1);
    let (doubles, s2) = window.sample(h, 2);
    report.push(Check::fact("v1", w(&h.top()).is_zero(), w(&h.top()), 0));
    report.push(scan::binary("v2", s2, &doubles, |x, y| {
        equal(w(&h.mul(x, y)), w(x) + w(y))
    }));
    report.push(scan::binary("v3", s2, &doubles, |x, y| {
        (h.leq(x, y) && w(x) > w(y)).then(|| Failure::new(w(x), w(y)))
    }));
    report.push(scan::unary("nonpositive", s1, &singles, |x| {
        w(x).is_positive().then(|| Failure::new(w(x), 0))
    }));
    report
}

pub fn validate_state(h: &AnySemihoop, w: &SemihoopState, window: &Window) -> Result<ValidationReport> {
    Ok(match h {
        AnySemihoop::Finite(h) => {
            let values = finite_values(h, w)?;
            validate_state_fn(h, |&x| values[x], window)
        }
        AnySemihoop::Cone(h) => {
            let lambda = cone_weights(h, w)?;
            validate_state_fn(h, |m| weighted(lambda, m), window)
        }
    })
}

/// Which structural facts about `H` enable which identities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub prelinear: bool,
    pub basic: bool,
    pub divisible: bool,
}

impl Classification {
    pub fn from_report(report: &ValidationReport) -> Self {
        Classification {
            prelinear: report.get_flag("prelinear").unwrap_or(false),
            basic: report.get_flag("basic").unwrap_or(false),
            divisible: report.get_flag("divisible").unwrap_or(false),
        }
    }
}

/// `v1`, `v2` and `nonpositive` already force `v3` when `H` is divisible.
/// checks `v1`, `v2` and `nonpositive` already force `v3` when `H` is divisible.
pub fn state_properties_fn<H: Semihoop>(
    h: &H,
    w: impl Fn(&H::Elem) -> Rational,
    class: Classification,
    window: &Window,
) -> ValidationReport {
    let (doubles, scope) = window.sample(h, 2);
    let pairs: Vec<(H::Elem, H::Elem)> = doubles
        .iter()
        .flat_map(|x| doubles.iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let mut report = state_identities(h, &w, class, &pairs, scope);
    let base = validate_state_fn(h, &w, window);
    if class.divisible {
        let premises = base.passes("v1") && base.passes("v2") && base.passes("nonpositive");
        let v3 = base.check("v3").cloned().expect("v3 is always checked");
        report.push(Check::fact(
            "v3 redundant",
            !premises || v3.passed(),
            format!("v3 at {:?}", v3.witness),
            "premises hold",
        ));
    } else {
        report.push(Check::skipped("v3 redundant", "semihoop is not divisible"));
    }
    report
}

/// The valuation and Bosbach identities on an explicit list of pairs.
pub fn state_identities<H: Semihoop>(
    h: &H,
    w: impl Fn(&H::Elem) -> Rational,
    class: Classification,
    pairs: &[(H::Elem, H::Elem)],
    scope: Scope,
) -> ValidationReport {
    let mut report = ValidationReport::new("state properties");
    if class.prelinear {
        report.push(scan::pairs("valuation", scope, pairs, |x, y| {
            equal(w(&h.meet(x, y)) + w(&h.join(x, y)), w(x) + w(y))
        }));
    } else {
        report.push(Check::skipped("valuation", "semihoop is not prelinear"));
    }
    if class.basic {
        report.push(scan::pairs("Bosbach", scope, pairs, |x, y| {
            equal(w(x) + w(&h.imp(x, y)), w(y) + w(&h.imp(y, x)))
        }));
    } else {
        report.push(Check::skipped("Bosbach", "semihoop is not basic"));
    }
    report
}

pub fn state_properties(h: &AnySemihoop, w: &SemihoopState, window: &Window) -> Result<ValidationReport> {
    let class = Classification::from_report(&h.validate(window));
    Ok(match h {
        AnySemihoop::Finite(h) => {
            let values = finite_values(h, w)?;
            state_properties_fn(h, |&x| values[x], class, window)
        }
        AnySemihoop::Cone(h) => {
            let lambda = cone_weights(h, w)?;
            state_properties_fn(h, |m| weighted(lambda, m), class, window)
        }
    })
}

/// `v1` and `v2` exactly and then filtering by `v3` and the codomain.
/// checks `v1` and `v2` exactly and then filtering by `v3` and the codomain.
pub fn enumerate_states_finite(h: &FiniteSemihoop) -> Result<Vec<SemihoopState>> {
    let n = h.size();
    let mut system = Echelon::new(n);
    let mut unit_row = vec![Rational::zero(); n];
    unit_row[h.top_index()] = Rational::one();
    system.insert(unit_row);
    for x in 0..n {
        for y in x..n {
            let mut row = vec![Rational::zero(); n];
            row[h.times(x, y)] += Rational::one();
            row[x] -= Rational::one();
            row[y] -= Rational::one();
            system.insert(row);
        }
    }
    if system.rank() < n {
        return Err(Error::Internal(format!(
            "state equations of a finite semihoop have a {}-dimensional solution space",
            n - system.rank()
        )));
    }
    let zero = SemihoopState::zero_table(n);
    let report = validate_state(&AnySemihoop::Finite(h.clone()), &zero, &Window::default())?;
    Ok(if report.is_valid() { vec![zero] } else { Vec::new() })
}

/// Rows in reduced echelon form, keyed by pivot column.
struct Echelon {
    width: usize,
    rows: BTreeMap<usize, Vec<Rational>>,
}

impl Echelon {
    fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: BTreeMap::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, mut row: Vec<Rational>) {
        debug_assert_eq!(row.len(), self.width);
        for (&pivot, basis) in &self.rows {
            let factor = row[pivot];
            if !factor.is_zero() {
                for (r, b) in row.iter_mut().zip(basis) {
                    *r -= factor * b;
                }
            }
        }
        let Some(pivot) = row.iter().position(|v| !v.is_zero()) else {
            return;
        };
        let scale = row[pivot];
        for v in row.iter_mut() {
            *v /= scale;
        }
        for basis in self.rows.values_mut() {
            let factor = basis[pivot];
            if !factor.is_zero() {
                for (b, r) in basis.iter_mut().zip(&row) {
                    *b -= factor * r;
                }
            }
        }
        self.rows.insert(pivot, row);
    }
}

/// A positive homomorphism from the envelope of `(H, ·, ∧, ∨, 1)` to the reals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupState {
    /// Value of each class, indexed by class id of a finite envelope.
    Classes(Vec<Rational>),
    /// `σ(n) = -⟨λ, n⟩` on integer canonical forms.
    Linear(Vec<Rational>),
}

impl GroupState {
    pub fn eval(&self, group: &KGroup, e: &KElement) -> Rational {
        match (self, e) {
            (GroupState::Classes(values), KElement::Pair(..)) => {
                values[group.class_index(e).expect("finite envelope")]
            }
            (GroupState::Linear(lambda), KElement::Integer(v)) => -lambda
                .iter()
                .zip(v)
                .map(|(l, &c)| l * Rational::from(c))
                .sum::<Rational>(),
            _ => panic!("group state does not match element {e}"),
        }
    }
}

pub struct GroupStateResult {
    pub group: KGroup,
    pub embedding: Embedding,
    pub sigma: GroupState,
    pub report: ValidationReport,
}

/// The value `w(x) - w(y)` assigned to the pair `[x, y]`.
pub fn sigma_of_pair(w_x: Rational, w_y: Rational) -> Rational {
    w_x - w_y
}

/// What each sign convention assigns to `h(x) = [x·x, x]`: the adopted
/// `w(x·x) - w(x)` and the alternative `w(x) - w(x·x)`.
pub fn sign_diagnostic(w_x: Rational, w_xx: Rational) -> (Rational, Rational) {
    (sigma_of_pair(w_xx, w_x), w_x - w_xx)
}

/// Builds `σ̂([x, y]) = w(x) - w(y)` on the envelope and verifies it. `samples`
/// random class pairs are drawn for the symbolic well-definedness and
/// additivity checks.
pub fn state_to_kgroup_state(
    h: &AnySemihoop,
    w: &SemihoopState,
    window: &Window,
    samples: usize,
    seed: u64,
) -> Result<GroupStateResult> {
    match h {
        AnySemihoop::Finite(fh) => {
            let values = finite_values(fh, w)?;
            let m = LMonoid::Finite(fh.monoid_reduct());
            let (group, embedding) = lmonoid::k_envelope(&m);
            let n = fh.size();
            let classes = group.classes();
            let mut sigma = vec![None::<Rational>; classes.len()];
            for x in 0..n {
                for y in 0..n {
                    let id = group.class_index(&KElement::Pair(x, y)).unwrap();
                    let value = sigma_of_pair(values[x], values[y]);
                    match sigma[id] {
                        None => sigma[id] = Some(value),
                        Some(prev) if prev != value => {
                            return Err(Error::Internal(format!(
                                "σ̂ is not well defined: [{x},{y}] gets {value} but its class already has {prev}"
                            )))
                        }
                        Some(_) => {}
                    }
                }
            }
            let sigma = GroupState::Classes(sigma.into_iter().map(Option::unwrap).collect());
            let mut report = ValidationReport::new("envelope state");
            report.push(Check::pass("well-defined", Scope::Exhaustive, (n * n) as u64));
            report.push(scan::binary("additive", Scope::Exhaustive, &classes, |a, b| {
                equal(sigma.eval(&group, &group.add(a, b)), sigma.eval(&group, a) + sigma.eval(&group, b))
            }));
            report.push(scan::unary("positive", Scope::Exhaustive, &classes, |a| {
                let v = sigma.eval(&group, a);
                (group.k_leq(&group.zero(), a) && v.is_negative()).then(|| Failure::new(v, 0))
            }));
            let points: Vec<usize> = (0..n).collect();
            report.push(scan::unary("σ̂∘h = w", Scope::Exhaustive, &points, |&x| {
                equal(sigma.eval(&group, &embedding.apply(&Point::Index(x))), values[x])
            }));
            Ok(GroupStateResult {
                group,
                embedding,
                sigma,
                report,
            })
        }
        AnySemihoop::Cone(ch) => {
            let lambda = cone_weights(ch, w)?.to_vec();
            let m = LMonoid::Symbolic(ch.monoid_reduct());
            let (group, embedding) = lmonoid::k_envelope(&m);
            let sigma = GroupState::Linear(lambda.clone());
            let report = cone_group_state_report(ch, &lambda, &group, &embedding, &sigma, window, samples, seed)?;
            Ok(GroupStateResult {
                group,
                embedding,
                sigma,
                report,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cone_group_state_report(
    ch: &ConeHoop,
    lambda: &[Rational],
    group: &KGroup,
    embedding: &Embedding,
    sigma: &GroupState,
    window: &Window,
    samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let bound = window.bound.max(1);
    let rank = ch.rank;
    let random_cone = |rng: &mut rand_chacha::ChaCha8Rng| {
        let exps: Vec<u32> = (0..rank).map(|_| rng.gen_range(0..=bound)).collect();
        Cone::new(&exps)
    };
    let w = |m: &Cone| weighted(lambda, m);
    let mut report = ValidationReport::new("envelope state");

    // Two representatives of the same class: (x + z, y + z) ~ (x, y).
    let mut class_pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (x, y, z) = (random_cone(&mut rng), random_cone(&mut rng), random_cone(&mut rng));
        class_pairs.push(((x, y), (x.add(&z), y.add(&z))));
    }
    for ((x, y), (x2, y2)) in &class_pairs {
        let e1 = group.class_of_pair(&Point::Tuple(*x), &Point::Tuple(*y));
        let e2 = group.class_of_pair(&Point::Tuple(*x2), &Point::Tuple(*y2));
        let v1 = sigma_of_pair(w(x), w(y));
        let v2 = sigma_of_pair(w(x2), w(y2));
        if !group.k_equal(&e1, &e2) || v1 != v2 || sigma.eval(group, &e1) != v1 {
            return Err(Error::Internal(format!(
                "σ̂ is not well defined: [{x},{y}] gives {v1}, [{x2},{y2}] gives {v2}"
            )));
        }
    }
    report.push(Check::pass("well-defined", Scope::Sampled(samples), samples as u64));

    let elems: Vec<(KElement, KElement)> = class_pairs
        .iter()
        .map(|((x, y), (x2, _))| {
            let e1 = group.class_of_pair(&Point::Tuple(*x), &Point::Tuple(*y));
            let e2 = group.class_of_pair(&Point::Tuple(*x2), &Point::Tuple(*x));
            (e1, e2)
        })
        .collect();
    report.push(scan::pairs("additive", Scope::Sampled(samples), &elems, |a, b| {
        equal(sigma.eval(group, &group.add(a, b)), sigma.eval(group, a) + sigma.eval(group, b))
    }));
    report.push(scan::pairs("positive", Scope::Sampled(samples), &elems, |a, _| {
        let v = sigma.eval(group, a);
        (group.k_leq(&group.zero(), a) && v.is_negative()).then(|| Failure::new(v, 0))
    }));
    let (points, scope) = window.sample(ch, 1);
    report.push(scan::unary("σ̂∘h = w", scope, &points, |m| {
        equal(sigma.eval(group, &embedding.apply(&Point::Tuple(*m))), w(m))
    }));
    Ok(report)
}

/// Recovers `w = σ ∘ h` and validates it as a state.
pub fn kgroup_state_to_state(
    h: &AnySemihoop,
    group: &KGroup,
    embedding: &Embedding,
    sigma: &GroupState,
    window: &Window,
) -> Result<(SemihoopState, ValidationReport)> {
    let w = match (h, sigma) {
        (AnySemihoop::Finite(fh), GroupState::Classes(_)) => SemihoopState::Table(
            (0..fh.size())
                .map(|x| (x, sigma.eval(group, &embedding.apply(&Point::Index(x)))))
                .collect(),
        ),
        (AnySemihoop::Cone(ch), GroupState::Linear(lambda)) if lambda.len() == ch.rank => {
            SemihoopState::Weights(lambda.clone())
        }
        _ => {
            return Err(Error::Precondition(
                "group state does not match the semihoop's envelope".into(),
            ))
        }
    };
    let report = validate_state(h, &w, window)?;
    Ok((w, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::hypernum::parse_rational;

    fn r(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    fn lambda(values: &[&str]) -> SemihoopState {
        SemihoopState::Weights(values.iter().map(|v| r(v)).collect())
    }

    #[test]
    fn goedel_three_chain() {
        let h = corpus::goedel_hoop(3);
        let report = validate_semihoop(&h, &Window::default());
        assert!(report.is_valid(), "{:?}", report.first_failure());
        assert_eq!(report.get_flag("prelinear"), Some(true));
        assert_eq!(report.get_flag("divisible"), Some(true));
        assert_eq!(report.get_flag("cancellative"), Some(false));
        assert_eq!(report.get_flag("lattice"), Some(true));
        assert_eq!(report.check("Pre").unwrap().instances, 27);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(h.join_index(x, y), x.max(y));
            }
        }
    }

    #[test]
    fn cone_rank_one_is_window_verified() {
        let report = validate_semihoop(&ConeHoop::new(1), &Window::new(8));
        assert!(report.is_valid(), "{:?}", report.first_failure());
        for flag in ["prelinear", "divisible", "cancellative", "lattice"] {
            assert_eq!(report.get_flag(flag), Some(true), "{flag}");
        }
        assert_eq!(report.check("Pre").unwrap().scope.to_string(), "window-verified (8)");
    }

    #[test]
    fn cone_join_is_componentwise_min() {
        let h = ConeHoop::new(2);
        let (x, y) = (Cone::new(&[3, 1]), Cone::new(&[0, 4]));
        let generic = {
            let left = h.imp(&h.imp(&x, &y), &y);
            let right = h.imp(&h.imp(&y, &x), &x);
            h.meet(&left, &right)
        };
        assert_eq!(generic, Cone::new(&[0, 1]));
        assert_eq!(h.join(&x, &y), generic);
        assert_eq!(h.join(&x, &x), x);
    }

    #[test]
    fn broken_residuum_fails_order_law() {
        let h = corpus::goedel_hoop(3);
        let (times, imp, meet) = h.tables();
        let mut imp = imp.clone();
        imp.set(2, 1, 2);
        let broken = FiniteSemihoop::new(3, times.clone(), imp, meet.clone(), 2).unwrap();
        let report = validate_semihoop(&broken, &Window::default());
        let check = report.check("order iff implication is top").unwrap();
        assert!(check.failed());
        assert_eq!(check.witness.as_deref().unwrap(), &["2".to_string(), "1".to_string()]);
    }

    #[test]
    fn states_on_cones() {
        let h = AnySemihoop::Cone(ConeHoop::new(2));
        let window = Window::new(8);
        let report = validate_state(&h, &lambda(&["1", "2"]), &window).unwrap();
        assert!(report.is_valid());
        assert_eq!(
            SemihoopState::Weights(vec![r("1"), r("2")]).at_cone(&Cone::new(&[3, 2])),
            Some(r("-7"))
        );
        let bad = lambda(&["1", "-1"]);
        let report = validate_state(&h, &bad, &window).unwrap();
        let nonpos = report.check("nonpositive").unwrap();
        let v3 = report.check("v3").unwrap();
        assert!(nonpos.failed() && v3.failed());
        assert_eq!(nonpos.witness.as_ref().unwrap()[0], v3.witness.as_ref().unwrap()[0]);
    }

    #[test]
    fn zero_state_and_positive_values() {
        let h = AnySemihoop::Finite(corpus::goedel_hoop(3));
        let window = Window::default();
        assert!(validate_state(&h, &SemihoopState::zero_table(3), &window).unwrap().is_valid());
        let mut table = BTreeMap::new();
        table.extend([(0, r("1")), (1, r("0")), (2, r("0"))]);
        let report = validate_state(&h, &SemihoopState::Table(table.clone()), &window).unwrap();
        assert!(report.check("nonpositive").unwrap().failed());
        table.remove(&1);
        let err = validate_state(&h, &SemihoopState::Table(table), &window).unwrap_err();
        assert!(matches!(err, Error::Structural { .. }));
        let props = state_properties(&h, &SemihoopState::zero_table(3), &window).unwrap();
        assert!(props.is_valid());
    }

    #[test]
    fn identities_on_cone_rank_two() {
        let h = AnySemihoop::Cone(ConeHoop::new(2));
        let report = state_properties(&h, &lambda(&["1", "2"]), &Window::new(6)).unwrap();
        assert!(report.is_valid(), "{:?}", report.first_failure());
        assert!(report.passes("valuation") && report.passes("Bosbach") && report.passes("v3 redundant"));
    }

    #[test]
    fn finite_states_are_trivial() {
        for h in [corpus::goedel_hoop(3), corpus::goedel_hoop(1), corpus::lukasiewicz_hoop(4)] {
            // Oracle: every power sequence stabilises at an idempotent e with
            // w(e) = 2 w(e), so n w(x) = 0 and w vanishes.
            for x in 0..h.size() {
                let mut p = x;
                while h.times(p, p) != p {
                    p = h.times(p, x);
                }
                assert_eq!(h.times(p, p), p);
            }
            let states = enumerate_states_finite(&h).unwrap();
            assert_eq!(states.len(), 1);
            assert!(states[0].is_zero());
        }
    }

    #[test]
    fn envelope_state_on_cone_rank_one() {
        let h = AnySemihoop::Cone(ConeHoop::new(1));
        let w = lambda(&["3"]);
        let result = state_to_kgroup_state(&h, &w, &Window::new(8), 1000, 7).unwrap();
        assert!(result.report.is_valid(), "{:?}", result.report.first_failure());
        for m in 0..=8u32 {
            let x = Point::Tuple(Cone::new(&[m]));
            let value = result.sigma.eval(&result.group, &result.embedding.apply(&x));
            assert_eq!(value, Rational::from(-3 * i64::from(m)));
        }
        let (adopted, alternative) = sign_diagnostic(r("-3"), r("-6"));
        assert_eq!((adopted, alternative), (r("-3"), r("3")));
    }

    #[test]
    fn envelope_state_roundtrip() {
        let h = AnySemihoop::Cone(ConeHoop::new(2));
        let w = lambda(&["2", "3"]);
        let result = state_to_kgroup_state(&h, &w, &Window::new(8), 200, 1).unwrap();
        let (back, report) =
            kgroup_state_to_state(&h, &result.group, &result.embedding, &result.sigma, &Window::new(8)).unwrap();
        assert_eq!(back, w);
        assert!(report.is_valid());

        let h3 = AnySemihoop::Cone(ConeHoop::new(3));
        let (group, embedding) = lmonoid::k_envelope(&LMonoid::Symbolic(ConeHoop::new(3).monoid_reduct()));
        let sigma = GroupState::Linear(vec![r("1"), r("0"), r("1/2")]);
        let (w, report) = kgroup_state_to_state(&h3, &group, &embedding, &sigma, &Window::new(4)).unwrap();
        assert!(report.is_valid());
        assert_eq!(w.at_cone(&Cone::new(&[2, 5, 3])), Some(r("-7/2")));

        let negative = GroupState::Linear(vec![r("-1"), r("0"), r("0")]);
        let (_, report) = kgroup_state_to_state(&h3, &group, &embedding, &negative, &Window::new(3)).unwrap();
        assert!(report.check("v3").unwrap().failed());
    }

    #[test]
    fn finite_envelope_state_is_zero() {
        let h = AnySemihoop::Finite(corpus::lukasiewicz_hoop(3));
        let result = state_to_kgroup_state(&h, &SemihoopState::zero_table(3), &Window::default(), 0, 0).unwrap();
        assert!(result.report.is_valid());
        assert_eq!(result.sigma, GroupState::Classes(vec![Rational::zero(); result.group.classes().len()]));
    }

    #[test]
    fn negative_reals_and_homomorphisms() {
        let report = validate_semihoop(&NegativeReals, &Window::new(3));
        assert!(report.is_valid(), "{:?}", report.first_failure());
        let cone = ConeHoop::new(1);
        for c in ["0", "1", "5/2"] {
            let c = r(c);
            let f = |m: &Cone| weighted(&[c], m);
            for x in Cone::window(1, 8) {
                for y in Cone::window(1, 8) {
                    assert_eq!(f(&cone.mul(&x, &y)), NegativeReals.mul(&f(&x), &f(&y)));
                    assert_eq!(f(&cone.imp(&x, &y)), NegativeReals.imp(&f(&x), &f(&y)));
                    assert_eq!(f(&cone.meet(&x, &y)), NegativeReals.meet(&f(&x), &f(&y)));
                }
            }
            assert!(validate_state_fn(&cone, f, &Window::new(8)).is_valid());
        }
    }
}
