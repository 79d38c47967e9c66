//! Probability measures on Boolean skeletons, hyperstates, and the passage
//! between a hyperstate and its pair (measure on the skeleton, state on the
//! radical).
//!
//! A hyperstate `s` built from a measure `p` and a radical state `w` is
//!
//! ```text
//! s(a) = p(b_a) + ε·(w(¬b_a ∨ c_a) − w(b_a ∨ c_a))
//! ```
//!
//! which is linear in the atom weights of `p`, the cone weights `λ` of `w` and
//! the values of `w` on finite radicals. [`HyperstatePlan`] exploits this: for
//! one algebra it compiles every check into linear forms over those
//! coordinates, deduplicates the forms, and then evaluates any number of
//! hyperstates with exact scaled integer arithmetic. Tabulated hyperstates use
//! one coordinate per element instead.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed as _, Zero};
use smallvec::SmallVec;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::hypernum::{DualRational, Lex, Rational};
use crate::ibp0::{Component, Element, Factor, Ibp0, Residuated, Signed};
use crate::lmonoid::{KGroup, Point};
use crate::report::{Check, Failure, Scope, ValidationReport};
use crate::scan;
use crate::semihoop::{self, AnySemihoop, ConeHoop, GroupState, Semihoop, SemihoopState};

/// A finitely additive probability measure on a finite Boolean skeleton,
/// given by the weights of its atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbabilityMeasure {
    pub weights: Vec<Rational>,
}

impl ProbabilityMeasure {
    pub fn new(weights: Vec<Rational>) -> Self {
        ProbabilityMeasure { weights }
    }

    pub fn uniform(atoms: usize) -> Self {
        ProbabilityMeasure::new(vec![Rational::new(1, atoms as i64); atoms])
    }

    pub fn point(atoms: usize, atom: usize) -> Self {
        let mut weights = vec![Rational::zero(); atoms];
        weights[atom] = Rational::one();
        ProbabilityMeasure::new(weights)
    }

    /// Sum of the weights of the atoms whose bits are set.
    pub fn at_mask(&self, mask: u64) -> Rational {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| *w)
            .sum()
    }

    pub fn at(&self, ibp: &Ibp0, b: &Element) -> Option<Rational> {
        ibp.skeleton().mask(b).map(|m| self.at_mask(m))
    }
}

impl fmt::Display for ProbabilityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", join_rationals(&self.weights))
    }
}

fn join_rationals(values: &[Rational]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// The restriction of a state on the radical to one factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorState {
    /// Values on the radical of a finite factor, keyed by component index.
    Table(BTreeMap<u32, Rational>),
    /// `m ↦ -⟨λ, m⟩` on the cone of a perfect factor.
    Weights(Vec<Rational>),
}

/// A state on the radical of a product. Every element of the radical is the
/// product of its single-factor pieces, so a state is the sum of one state
/// per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalState {
    pub parts: Vec<FactorState>,
}

impl RadicalState {
    pub fn zero(ibp: &Ibp0) -> Self {
        let lambda = vec![Rational::zero(); ibp.algebra().cone_rank()];
        RadicalState::from_lambda(ibp, &lambda).expect("lambda has the cone rank")
    }

    /// Splits concatenated cone weights over the perfect factors; finite
    /// factors get the zero state.
    pub fn from_lambda(ibp: &Ibp0, lambda: &[Rational]) -> Result<Self> {
        let rank = ibp.algebra().cone_rank();
        if lambda.len() != rank {
            return Err(Error::structural(
                "lambda",
                format!("expected {rank} weights, found {}", lambda.len()),
            ));
        }
        let mut offset = 0;
        let parts = ibp
            .algebra()
            .factors()
            .iter()
            .enumerate()
            .map(|(f, factor)| match factor.rank() {
                Some(k) => {
                    offset += k;
                    FactorState::Weights(lambda[offset - k..offset].to_vec())
                }
                None => FactorState::Table(
                    ibp.radical_components(f)
                        .unwrap_or_default()
                        .iter()
                        .map(|c| (component_index(c), Rational::zero()))
                        .collect(),
                ),
            })
            .collect();
        Ok(RadicalState { parts })
    }

    /// Concatenated cone weights of the perfect factors.
    pub fn lambda(&self) -> Vec<Rational> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                FactorState::Weights(l) => Some(l.as_slice()),
                FactorState::Table(_) => None,
            })
            .flatten()
            .copied()
            .collect()
    }

    /// Rejects states whose parts do not match the factors of the algebra.
    pub fn check_shape(&self, ibp: &Ibp0) -> Result<()> {
        let factors = ibp.algebra().factors();
        if self.parts.len() != factors.len() {
            return Err(Error::structural(
                "radical state",
                format!("{} parts for {} factors", self.parts.len(), factors.len()),
            ));
        }
        for (f, (part, factor)) in self.parts.iter().zip(factors).enumerate() {
            match (part, factor) {
                (FactorState::Weights(l), Factor::Perfect(r)) if l.len() == r.hoop.rank => {}
                (FactorState::Table(t), Factor::Finite(_)) => {
                    let radical = ibp.radical_components(f).unwrap_or_default();
                    let keys: BTreeSet<u32> = radical.iter().map(component_index).collect();
                    if let Some(extra) = t.keys().find(|k| !keys.contains(k)) {
                        return Err(Error::structural(
                            format!("radical state[{f}]"),
                            format!("element {extra} is not in the radical"),
                        ));
                    }
                    if let Some(missing) = keys.iter().find(|k| !t.contains_key(k)) {
                        return Err(Error::structural(
                            format!("radical state[{f}]"),
                            format!("no value for radical element {missing}"),
                        ));
                    }
                }
                _ => {
                    return Err(Error::structural(
                        format!("radical state[{f}]"),
                        "part does not match the factor",
                    ))
                }
            }
        }
        Ok(())
    }

    /// `w(x)` for a radical element `x`.
    pub fn eval(&self, x: &Element) -> Result<Rational> {
        let mut total = Rational::zero();
        for (f, (c, part)) in x.0.iter().zip(&self.parts).enumerate() {
            total += match (c, part) {
                (Component::Fin(i), FactorState::Table(t)) => *t.get(i).ok_or_else(|| {
                    Error::structural(format!("radical state[{f}]"), format!("no value for element {i}"))
                })?,
                (Component::Perfect(Signed::Pos(m)), FactorState::Weights(l)) => semihoop::weighted(l, m),
                _ => return Err(Error::Precondition(format!("{x} is not in the radical"))),
            };
        }
        Ok(total)
    }
}

impl fmt::Display for RadicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| match p {
                FactorState::Weights(l) => format!("lambda [{}]", join_rationals(l)),
                FactorState::Table(t) => {
                    let cells: Vec<String> = t.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                    format!("{{{}}}", cells.join(", "))
                }
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

fn component_index(c: &Component) -> u32 {
    match c {
        Component::Fin(i) => *i,
        Component::Perfect(_) => unreachable!("finite radicals hold finite components"),
    }
}

/// A map from an IBP₀-algebra into the unit interval of `ℚ ×lex ℚ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hyperstate {
    Table(BTreeMap<Element, DualRational>),
    Split {
        measure: ProbabilityMeasure,
        state: RadicalState,
    },
}

impl Hyperstate {
    /// `s(a)`. Formula values are computed in the ambient group and may fall
    /// outside `[0, 1]` when the pair does not define a hyperstate.
    pub fn value(&self, ibp: &Ibp0, a: &Element) -> Result<Lex> {
        match self {
            Hyperstate::Table(t) => t
                .get(a)
                .map(|v| v.to_lex())
                .ok_or_else(|| Error::structural("hyperstate", format!("no value for element {a}"))),
            Hyperstate::Split { measure, state } => formula(ibp, measure, state, a),
        }
    }
}

/// `p(b_a) + ε·(w(¬b_a ∨ c_a) − w(b_a ∨ c_a))`.
pub fn formula(ibp: &Ibp0, measure: &ProbabilityMeasure, state: &RadicalState, a: &Element) -> Result<Lex> {
    let alg = ibp.algebra();
    let d = ibp.decompose(a)?;
    let std = measure
        .at(ibp, &d.b)
        .ok_or_else(|| Error::Internal(format!("{} is not in the skeleton", d.b)))?;
    let upper = alg.join(&alg.neg(&d.b), &d.c);
    let lower = alg.join(&d.b, &d.c);
    Ok(Lex::new(std, state.eval(&upper)? - state.eval(&lower)?))
}

/// Normalization, range and additivity of a measure on the skeleton.
pub fn validate_probability(ibp: &Ibp0, p: &ProbabilityMeasure) -> Result<ValidationReport> {
    let sk = ibp.skeleton();
    let alg = ibp.algebra();
    if p.weights.len() != sk.atoms().len() {
        return Err(Error::structural(
            "measure",
            format!("{} weights for {} atoms", p.weights.len(), sk.atoms().len()),
        ));
    }
    let mut report = ValidationReport::new("probability measure");
    let s = Scope::Exhaustive;
    report.push(scan::unary("nonnegative", s, sk.atoms(), |a| {
        let v = p.at(ibp, a).unwrap_or_default();
        v.is_negative().then(|| Failure::new(v, 0))
    }));
    let total: Rational = p.weights.iter().sum();
    report.push(Check::fact("normalized", total.is_one(), total, 1));
    let value = |b: &Element| p.at(ibp, b).unwrap_or_default();
    report.push(scan::unary("range", s, sk.elements(), |b| {
        let v = value(b);
        (v.is_negative() || v > Rational::one()).then(|| Failure::new(v, "in [0, 1]"))
    }));
    report.push(scan::binary("additive", s, sk.elements(), |b, c| {
        if alg.meet(b, c) != alg.bot() {
            return None;
        }
        scan::equal(value(&alg.join(b, c)), value(b) + value(c))
    }));
    Ok(report)
}

type Form = SmallVec<[(u32, i64); 8]>;

fn normalize(mut form: Form) -> Form {
    form.sort_unstable_by_key(|&(k, _)| k);
    let mut out = Form::new();
    for (k, c) in form {
        match out.last_mut() {
            Some((last, acc)) if *last == k => *acc += c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| *c != 0);
    out
}

fn combine(terms: &[(i64, &Form)]) -> Form {
    normalize(terms.iter().flat_map(|(m, f)| f.iter().map(move |&(k, c)| (k, m * c))).collect())
}

const CONSTANT: u32 = 0;

fn constant() -> Form {
    SmallVec::from_slice(&[(CONSTANT, 1)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    Zero,
    NonNegative,
    InUnitInterval,
    StdZero,
    InfZero,
    InfNonNegative,
    InfNonPositive,
    /// First value equals `max(second, 0)`, the truncated product.
    MvProduct,
}

#[derive(Clone, Debug)]
struct Case {
    forms: SmallVec<[Form; 2]>,
    witness: Vec<String>,
}

#[derive(Clone, Debug)]
struct PlannedCheck {
    axiom: String,
    scope: Scope,
    instances: u64,
    rule: Rule,
    cases: Vec<Case>,
}

struct CheckBuilder {
    check: PlannedCheck,
    seen: HashMap<SmallVec<[Form; 2]>, ()>,
}

impl CheckBuilder {
    fn new(axiom: &str, scope: Scope, rule: Rule) -> Self {
        CheckBuilder {
            check: PlannedCheck {
                axiom: axiom.to_string(),
                scope,
                instances: 0,
                rule,
                cases: Vec::new(),
            },
            seen: HashMap::new(),
        }
    }

    fn add(&mut self, forms: SmallVec<[Form; 2]>, witness: impl FnOnce() -> Vec<String>) {
        self.check.instances += 1;
        if self.seen.insert(forms.clone(), ()).is_none() {
            self.check.cases.push(Case { forms, witness: witness() });
        }
    }

    fn one(&mut self, form: Form, witness: impl FnOnce() -> Vec<String>) {
        self.add(SmallVec::from_elem(form, 1), witness);
    }

    fn finish(self) -> PlannedCheck {
        self.check
    }
}

#[derive(Clone, Debug)]
enum Coordinates {
    /// Constant, atom weights, cone weights, then finite radical values.
    Formula {
        atoms: usize,
        rank: usize,
        finite: HashMap<(usize, Component), u32>,
    },
    /// Constant, then one coordinate per tabulated element.
    Table { elements: Vec<Element>, index: HashMap<Element, u32> },
}

impl Coordinates {
    fn formula(ibp: &Ibp0) -> Self {
        let atoms = ibp.skeleton().atoms().len();
        let rank = ibp.algebra().cone_rank();
        let mut finite = HashMap::new();
        let mut next = (1 + atoms + rank) as u32;
        for f in 0..ibp.algebra().factors().len() {
            for c in ibp.radical_components(f).unwrap_or_default() {
                finite.insert((f, *c), next);
                next += 1;
            }
        }
        Coordinates::Formula { atoms, rank, finite }
    }

    fn table(table: &BTreeMap<Element, DualRational>) -> Self {
        let elements: Vec<Element> = table.keys().cloned().collect();
        let index = elements.iter().cloned().zip(1u32..).collect();
        Coordinates::Table { elements, index }
    }

    /// `w(x)` as a form over the cone and finite-radical coordinates.
    fn radical_form(&self, ibp: &Ibp0, x: &Element) -> Result<Form> {
        let Coordinates::Formula { atoms, finite, .. } = self else {
            unreachable!("radical forms need formula coordinates")
        };
        let mut form = Form::new();
        let mut offset = 1 + atoms;
        for (f, (c, factor)) in x.0.iter().zip(ibp.algebra().factors()).enumerate() {
            match (c, factor) {
                (Component::Perfect(Signed::Pos(m)), Factor::Perfect(_)) => {
                    for (j, &e) in m.exps().iter().enumerate() {
                        form.push(((offset + j) as u32, -i64::from(e)));
                    }
                    offset += m.rank();
                }
                (Component::Fin(_), Factor::Finite(_)) => {
                    let slot = finite
                        .get(&(f, *c))
                        .ok_or_else(|| Error::Internal(format!("{x} is not in the radical")))?;
                    form.push((*slot, 1));
                }
                _ => return Err(Error::Internal(format!("{x} is not in the radical"))),
            }
        }
        Ok(normalize(form))
    }

    /// `s(a)` as a form.
    fn value_form(&self, ibp: &Ibp0, a: &Element) -> Result<Form> {
        match self {
            Coordinates::Table { index, .. } => index
                .get(a)
                .map(|&k| SmallVec::from_slice(&[(k, 1)]))
                .ok_or_else(|| Error::structural("hyperstate", format!("no value for element {a}"))),
            Coordinates::Formula { atoms, .. } => {
                let alg = ibp.algebra();
                let d = ibp.decompose(a)?;
                let mask = ibp
                    .skeleton()
                    .mask(&d.b)
                    .ok_or_else(|| Error::Internal(format!("{} is not in the skeleton", d.b)))?;
                let measure: Form = (0..*atoms).filter(|i| mask >> i & 1 == 1).map(|i| (1 + i as u32, 1)).collect();
                let upper = self.radical_form(ibp, &alg.join(&alg.neg(&d.b), &d.c))?;
                let lower = self.radical_form(ibp, &alg.join(&d.b, &d.c))?;
                Ok(combine(&[(1, &measure), (1, &upper), (-1, &lower)]))
            }
        }
    }

    /// The value of every coordinate for a given hyperstate.
    fn values(&self, ibp: &Ibp0, s: &Hyperstate) -> Result<Vec<Lex>> {
        match (self, s) {
            (Coordinates::Table { elements, .. }, _) => {
                let mut out = vec![Lex::one()];
                for e in elements {
                    out.push(s.value(ibp, e)?);
                }
                Ok(out)
            }
            (Coordinates::Formula { atoms, rank, finite }, Hyperstate::Split { measure, state }) => {
                if measure.weights.len() != *atoms {
                    return Err(Error::structural(
                        "measure",
                        format!("{} weights for {atoms} atoms", measure.weights.len()),
                    ));
                }
                state.check_shape(ibp)?;
                let mut out = vec![Lex::one()];
                out.extend(measure.weights.iter().map(|w| Lex::standard(*w)));
                let lambda = state.lambda();
                debug_assert_eq!(lambda.len(), *rank);
                out.extend(lambda.iter().map(|l| Lex::infinitesimal(*l)));
                let mut slots: Vec<(u32, Lex)> = finite
                    .iter()
                    .map(|(&(f, c), &slot)| {
                        let FactorState::Table(t) = &state.parts[f] else { unreachable!() };
                        (slot, Lex::infinitesimal(t[&component_index(&c)]))
                    })
                    .collect();
                slots.sort_unstable_by_key(|(k, _)| *k);
                out.extend(slots.into_iter().map(|(_, v)| v));
                Ok(out)
            }
            (Coordinates::Formula { .. }, Hyperstate::Table(_)) => Err(Error::Precondition(
                "this plan evaluates hyperstates given by a measure and a radical state".into(),
            )),
        }
    }
}

/// Coordinate values over a common denominator, so that evaluating a form is
/// an integer dot product.
struct Scaled {
    std: Vec<i128>,
    inf: Vec<i128>,
    std_den: i128,
    inf_den: i128,
}

fn overflow() -> Error {
    Error::Precondition("values too large for exact evaluation".into())
}

fn common_denominator<'a>(mut values: impl Iterator<Item = &'a Rational>) -> Result<i128> {
    values.try_fold(1i128, |acc, r| {
        let d = i128::from(*r.denom());
        (acc / acc.gcd(&d)).checked_mul(d).ok_or_else(overflow)
    })
}

fn scale(r: &Rational, den: i128) -> Result<i128> {
    i128::from(*r.numer()).checked_mul(den / i128::from(*r.denom())).ok_or_else(overflow)
}

impl Scaled {
    fn new(values: &[Lex]) -> Result<Self> {
        let std_den = common_denominator(values.iter().map(|v| &v.std))?;
        let inf_den = common_denominator(values.iter().map(|v| &v.inf))?;
        Ok(Scaled {
            std: values.iter().map(|v| scale(&v.std, std_den)).collect::<Result<_>>()?,
            inf: values.iter().map(|v| scale(&v.inf, inf_den)).collect::<Result<_>>()?,
            std_den,
            inf_den,
        })
    }

    fn eval(&self, form: &Form) -> Result<(i128, i128)> {
        let mut std = 0i128;
        let mut inf = 0i128;
        for &(k, c) in form {
            let c = i128::from(c);
            let k = k as usize;
            std = c.checked_mul(self.std[k]).and_then(|v| v.checked_add(std)).ok_or_else(overflow)?;
            inf = c.checked_mul(self.inf[k]).and_then(|v| v.checked_add(inf)).ok_or_else(overflow)?;
        }
        Ok((std, inf))
    }

    fn show(&self, (std, inf): (i128, i128)) -> String {
        format!("{}+e{}", Ratio::new(std, self.std_den), Ratio::new(inf, self.inf_den))
    }

    /// Exact equality of values scaled by two different coordinate systems.
    fn same(&self, v: (i128, i128), other: &Scaled, u: (i128, i128)) -> bool {
        v.0 * other.std_den == u.0 * self.std_den && v.1 * other.inf_den == u.1 * self.inf_den
    }
}

fn nonnegative((std, inf): (i128, i128)) -> bool {
    std > 0 || (std == 0 && inf >= 0)
}

fn judge(rule: Rule, sc: &Scaled, v: &[(i128, i128)]) -> Option<Failure> {
    let x = v[0];
    let fail = |rhs: &str| Some(Failure::new(sc.show(x), rhs));
    let holds = match rule {
        Rule::Zero => x == (0, 0),
        Rule::NonNegative => nonnegative(x),
        Rule::InUnitInterval => nonnegative(x) && nonnegative((sc.std_den - x.0, -x.1)),
        Rule::StdZero => x.0 == 0,
        Rule::InfZero => x.1 == 0,
        Rule::InfNonNegative => x.1 >= 0,
        Rule::InfNonPositive => x.1 <= 0,
        Rule::MvProduct => {
            let expected = if nonnegative(v[1]) { v[1] } else { (0, 0) };
            if x != expected {
                return Some(Failure::new(sc.show(x), sc.show(expected)));
            }
            true
        }
    };
    if holds {
        return None;
    }
    match rule {
        Rule::Zero => fail("0+e0"),
        Rule::NonNegative => fail(">= 0"),
        Rule::InUnitInterval => fail("in [0, 1]"),
        Rule::StdZero => fail("standard part 0"),
        Rule::InfZero => fail("infinitesimal part 0"),
        Rule::InfNonNegative => fail("infinitesimal part >= 0"),
        Rule::InfNonPositive => fail("infinitesimal part <= 0"),
        Rule::MvProduct => None,
    }
}

fn run(subject: &str, checks: &[PlannedCheck], sc: &Scaled) -> Result<ValidationReport> {
    let mut report = ValidationReport::new(subject);
    for check in checks {
        let mut failure = None;
        for case in &check.cases {
            let values: SmallVec<[(i128, i128); 2]> = case.forms.iter().map(|f| sc.eval(f)).collect::<Result<_>>()?;
            if let Some(f) = judge(check.rule, sc, &values) {
                failure = Some((case, f));
                break;
            }
        }
        report.push(match failure {
            None => Check::pass(check.axiom.clone(), check.scope, check.instances),
            Some((case, f)) => Check::fail(check.axiom.clone(), check.scope, check.instances, case.witness.clone(), f),
        });
    }
    Ok(report)
}

/// Output of [`split_hyperstate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub measure: ProbabilityMeasure,
    pub state: RadicalState,
    pub report: ValidationReport,
}

/// Every hyperstate check for one algebra, compiled into deduplicated linear
/// forms. Build it once and evaluate many hyperstates against it.
pub struct HyperstatePlan {
    coords: Coordinates,
    validity: Vec<PlannedCheck>,
    properties: Vec<PlannedCheck>,
    radical_state: Vec<PlannedCheck>,
    /// `s(a)` for every window element, deduplicated.
    window_values: Vec<(Form, String)>,
    window_scope: Scope,
}

struct Builder<'a> {
    ibp: &'a Ibp0,
    coords: &'a Coordinates,
    cache: HashMap<Element, Form>,
}

impl Builder<'_> {
    fn value(&mut self, a: &Element) -> Result<Form> {
        if let Some(f) = self.cache.get(a) {
            return Ok(f.clone());
        }
        let f = self.coords.value_form(self.ibp, a)?;
        self.cache.insert(a.clone(), f.clone());
        Ok(f)
    }
}

fn names<E: fmt::Display>(xs: &[&E]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

impl HyperstatePlan {
    /// A plan for hyperstates given by a measure and a radical state.
    pub fn formula(ibp: &Ibp0) -> Result<Self> {
        HyperstatePlan::build(ibp, Coordinates::formula(ibp))
    }

    /// A plan matching the shape of `s`.
    pub fn for_hyperstate(ibp: &Ibp0, s: &Hyperstate) -> Result<Self> {
        match s {
            Hyperstate::Table(t) => HyperstatePlan::build(ibp, Coordinates::table(t)),
            Hyperstate::Split { .. } => HyperstatePlan::formula(ibp),
        }
    }

    fn build(ibp: &Ibp0, coords: Coordinates) -> Result<Self> {
        let alg = ibp.algebra();
        let window = ibp.window();
        let mut b = Builder {
            ibp,
            coords: &coords,
            cache: HashMap::new(),
        };
        let one = constant();
        let (singles, s1) = window.sample(alg, 1);
        let (pairs, s2) = window.sample(alg, 2);
        let skeleton = ibp.skeleton().elements();
        let (top, bot) = (alg.top(), alg.bot());

        let mut unit = CheckBuilder::new("s1", Scope::Exhaustive, Rule::Zero);
        let v_top = b.value(&top)?;
        unit.one(combine(&[(1, &v_top), (-1, &one)]), || vec![top.to_string()]);
        unit.one(b.value(&bot)?, || vec![bot.to_string()]);

        let mut sum_law = CheckBuilder::new("s2", s2, Rule::Zero);
        let mut monotone = CheckBuilder::new("monotone", s2, Rule::NonNegative);
        let mut orthogonal = CheckBuilder::new("additive on orthogonal pairs", s2, Rule::Zero);
        let mut covering = CheckBuilder::new("multiplicative on covering pairs", s2, Rule::MvProduct);
        let mut valuation = CheckBuilder::new("valuation", s2, Rule::Zero);
        for x in &pairs {
            let vx = b.value(x)?;
            for y in &pairs {
                let vy = b.value(y)?;
                let (sum, prod) = (alg.oplus(x, y), alg.mul(x, y));
                let v_sum = b.value(&sum)?;
                let v_prod = b.value(&prod)?;
                let witness = || names(&[x, y]);
                sum_law.one(combine(&[(1, &v_sum), (1, &v_prod), (-1, &vx), (-1, &vy)]), witness);
                if alg.leq(x, y) {
                    monotone.one(combine(&[(1, &vy), (-1, &vx)]), witness);
                }
                if prod == bot {
                    orthogonal.one(combine(&[(1, &v_sum), (-1, &vx), (-1, &vy)]), witness);
                }
                if sum == top {
                    let truncated = combine(&[(1, &vx), (1, &vy), (-1, &one)]);
                    covering.add(SmallVec::from_vec(vec![v_prod.clone(), truncated]), witness);
                }
                let v_meet = b.value(&alg.meet(x, y))?;
                let v_join = b.value(&alg.join(x, y))?;
                valuation.one(combine(&[(1, &v_meet), (1, &v_join), (-1, &vx), (-1, &vy)]), witness);
            }
        }

        let mut standard = CheckBuilder::new("s3", Scope::Exhaustive, Rule::InfZero);
        let mut sk_range = CheckBuilder::new("skeleton values in [0, 1]", Scope::Exhaustive, Rule::InUnitInterval);
        let mut sk_additive = CheckBuilder::new("skeleton additive", Scope::Exhaustive, Rule::Zero);
        for x in skeleton {
            let vx = b.value(x)?;
            standard.one(vx.clone(), || names(&[x]));
            sk_range.one(vx.clone(), || names(&[x]));
            for y in skeleton {
                if alg.meet(x, y) == bot {
                    let vy = b.value(y)?;
                    let vj = b.value(&alg.join(x, y))?;
                    sk_additive.one(combine(&[(1, &vj), (-1, &vx), (-1, &vy)]), || names(&[x, y]));
                }
            }
        }

        let mut range = CheckBuilder::new("range", s1, Rule::InUnitInterval);
        let mut negation = CheckBuilder::new("negation", s1, Rule::Zero);
        let mut radical = CheckBuilder::new("radical to standard part 1", s1, Rule::StdZero);
        let mut coradical = CheckBuilder::new("coradical to standard part 0", s1, Rule::StdZero);
        let mut window_values = Vec::new();
        let mut seen = HashMap::new();
        for x in &singles {
            let vx = b.value(x)?;
            range.one(vx.clone(), || names(&[x]));
            let vn = b.value(&alg.neg(x))?;
            negation.one(combine(&[(1, &vn), (1, &vx), (-1, &one)]), || names(&[x]));
            if ibp.is_radical(x) {
                radical.one(combine(&[(1, &vx), (-1, &one)]), || names(&[x]));
            }
            if ibp.is_coradical(x) {
                coradical.one(vx.clone(), || names(&[x]));
            }
            if seen.insert(vx.clone(), ()).is_none() {
                window_values.push((vx, x.to_string()));
            }
        }

        let hoop = ibp.radical_hoop();
        let (rsingles, r1) = window.sample(&hoop, 1);
        let (rpairs, r2) = window.sample(&hoop, 2);
        let mut induced = [
            CheckBuilder::new("induced state v1", Scope::Exhaustive, Rule::InfZero),
            CheckBuilder::new("induced state v2", r2, Rule::InfZero),
            CheckBuilder::new("induced state v3", r2, Rule::InfNonNegative),
            CheckBuilder::new("induced state nonpositive", r1, Rule::InfNonPositive),
        ];
        let formula_coords = matches!(coords, Coordinates::Formula { .. });
        let mut state = [
            CheckBuilder::new("v1", Scope::Exhaustive, Rule::InfZero),
            CheckBuilder::new("v2", r2, Rule::Zero),
            CheckBuilder::new("v3", r2, Rule::InfNonNegative),
            CheckBuilder::new("nonpositive", r1, Rule::InfNonPositive),
        ];
        let hoop_top = hoop.top();
        induced[0].one(b.value(&hoop_top)?, || names(&[&hoop_top]));
        if formula_coords {
            state[0].one(coords.radical_form(ibp, &hoop_top)?, || names(&[&hoop_top]));
        }
        for x in &rpairs {
            let vx = b.value(x)?;
            for y in &rpairs {
                let vy = b.value(y)?;
                let vxy = b.value(&hoop.mul(x, y))?;
                let witness = || names(&[x, y]);
                induced[1].one(combine(&[(1, &vxy), (-1, &vx), (-1, &vy)]), witness);
                let ordered = hoop.leq(x, y);
                if ordered {
                    induced[2].one(combine(&[(1, &vy), (-1, &vx)]), witness);
                }
                if formula_coords {
                    let (wx, wy) = (coords.radical_form(ibp, x)?, coords.radical_form(ibp, y)?);
                    let wxy = coords.radical_form(ibp, &hoop.mul(x, y))?;
                    state[1].one(combine(&[(1, &wxy), (-1, &wx), (-1, &wy)]), witness);
                    if ordered {
                        state[2].one(combine(&[(1, &wy), (-1, &wx)]), witness);
                    }
                }
            }
        }
        for x in &rsingles {
            induced[3].one(b.value(x)?, || names(&[x]));
            if formula_coords {
                state[3].one(coords.radical_form(ibp, x)?, || names(&[x]));
            }
        }

        let validity = vec![unit.finish(), sum_law.finish(), standard.finish(), range.finish()];
        let mut properties = vec![
            negation.finish(),
            monotone.finish(),
            orthogonal.finish(),
            covering.finish(),
            valuation.finish(),
            sk_range.finish(),
            sk_additive.finish(),
            radical.finish(),
            coradical.finish(),
        ];
        properties.extend(induced.into_iter().map(CheckBuilder::finish));
        let radical_state = if formula_coords {
            state.into_iter().map(CheckBuilder::finish).collect()
        } else {
            Vec::new()
        };
        Ok(HyperstatePlan {
            coords,
            validity,
            properties,
            radical_state,
            window_values,
            window_scope: s1,
        })
    }

    fn scaled(&self, ibp: &Ibp0, s: &Hyperstate) -> Result<Scaled> {
        Scaled::new(&self.coords.values(ibp, s)?)
    }

    /// `s1`, `s2`, `s3`, and that every window value lies in `[0, 1]`.
    pub fn validate(&self, ibp: &Ibp0, s: &Hyperstate) -> Result<ValidationReport> {
        run("hyperstate", &self.validity, &self.scaled(ibp, s)?)
    }

    /// The derived laws of a hyperstate: negation, monotonicity, additivity on
    /// orthogonal pairs, truncated multiplicativity on covering pairs, the
    /// valuation law, the skeleton restriction, radical and coradical values,
    /// and the induced state on the radical.
    pub fn properties(&self, ibp: &Ibp0, s: &Hyperstate) -> Result<ValidationReport> {
        run("hyperstate properties", &self.properties, &self.scaled(ibp, s)?)
    }

    /// Builds `s` from `p` and `w` and validates all three.
    pub fn join(&self, ibp: &Ibp0, p: &ProbabilityMeasure, w: &RadicalState) -> Result<(Hyperstate, ValidationReport)> {
        let s = Hyperstate::Split {
            measure: p.clone(),
            state: w.clone(),
        };
        let sc = self.scaled(ibp, &s)?;
        let mut report = ValidationReport::new("joined hyperstate");
        report.absorb("measure: ", validate_probability(ibp, p)?);
        report.absorb("radical state: ", run("radical state", &self.radical_state, &sc)?);
        report.absorb("", run("hyperstate", &self.validity, &sc)?);
        Ok((s, report))
    }

    /// Recovers `p` and `w` from `s` and checks the decomposition identity on
    /// every window element.
    pub fn split(&self, ibp: &Ibp0, s: &Hyperstate) -> Result<SplitResult> {
        let (measure, state) = extract(ibp, s)?;
        let recovered = Hyperstate::Split {
            measure: measure.clone(),
            state: state.clone(),
        };
        let axiom = "split identity";
        let instances;
        match (&self.coords, s) {
            (Coordinates::Formula { .. }, Hyperstate::Split { .. }) => {
                let given = self.scaled(ibp, s)?;
                let rebuilt = self.scaled(ibp, &recovered)?;
                for (form, witness) in &self.window_values {
                    let (v, u) = (given.eval(form)?, rebuilt.eval(form)?);
                    if !given.same(v, &rebuilt, u) {
                        return Err(Error::TheoremViolation {
                            identity: axiom.into(),
                            witness: witness.clone(),
                            lhs: given.show(v),
                            rhs: rebuilt.show(u),
                        });
                    }
                }
                instances = ibp.window().sample(ibp.algebra(), 1).0.len();
            }
            _ => {
                let residuals = split_residuals(ibp, s, &measure, &state)?;
                if let Some((a, lhs, rhs)) = residuals.iter().find(|(_, l, r)| l != r) {
                    return Err(Error::TheoremViolation {
                        identity: axiom.into(),
                        witness: a.to_string(),
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
                instances = residuals.len();
            }
        }
        let mut report = ValidationReport::new("split");
        report.push(Check::pass(axiom, self.window_scope, instances as u64));
        Ok(SplitResult { measure, state, report })
    }
}

/// `p` from the atoms and `w` from the infinitesimal parts on the radical.
fn extract(ibp: &Ibp0, s: &Hyperstate) -> Result<(ProbabilityMeasure, RadicalState)> {
    let alg = ibp.algebra();
    let weights = ibp
        .skeleton()
        .atoms()
        .iter()
        .map(|a| s.value(ibp, a).map(|v| v.std))
        .collect::<Result<Vec<_>>>()?;
    let top = alg.top();
    let at = |f: usize, c: Component| -> Result<Rational> {
        let mut e = top.clone();
        e.0[f] = c;
        Ok(s.value(ibp, &e)?.inf)
    };
    let mut parts = Vec::new();
    for (f, factor) in alg.factors().iter().enumerate() {
        parts.push(match factor {
            Factor::Finite(_) => FactorState::Table(
                ibp.radical_components(f)
                    .unwrap_or_default()
                    .iter()
                    .map(|c| Ok((component_index(c), at(f, *c)?)))
                    .collect::<Result<_>>()?,
            ),
            Factor::Perfect(r) => {
                let k = r.hoop.rank;
                FactorState::Weights(
                    (0..k)
                        .map(|j| Ok(-at(f, Component::Perfect(Signed::Pos(Cone::generator(k, j))))?))
                        .collect::<Result<_>>()?,
                )
            }
        });
    }
    Ok((ProbabilityMeasure::new(weights), RadicalState { parts }))
}

/// `(a, s(a), p(b_a) + ε·(w(¬b_a ∨ c_a) − w(b_a ∨ c_a)))` for every window element.
pub fn split_residuals(
    ibp: &Ibp0,
    s: &Hyperstate,
    measure: &ProbabilityMeasure,
    state: &RadicalState,
) -> Result<Vec<(Element, Lex, Lex)>> {
    let (singles, _) = ibp.window().sample(ibp.algebra(), 1);
    singles
        .into_iter()
        .map(|a| {
            let lhs = s.value(ibp, &a)?;
            let rhs = formula(ibp, measure, state, &a)?;
            Ok((a, lhs, rhs))
        })
        .collect()
}

pub fn validate_hyperstate(ibp: &Ibp0, s: &Hyperstate) -> Result<ValidationReport> {
    HyperstatePlan::for_hyperstate(ibp, s)?.validate(ibp, s)
}

pub fn hyperstate_properties(ibp: &Ibp0, s: &Hyperstate) -> Result<ValidationReport> {
    HyperstatePlan::for_hyperstate(ibp, s)?.properties(ibp, s)
}

/// Fails with [`Error::TheoremViolation`] when `s` is not given by its
/// recovered measure and radical state at some window element.
pub fn split_hyperstate(ibp: &Ibp0, s: &Hyperstate) -> Result<SplitResult> {
    HyperstatePlan::for_hyperstate(ibp, s)?.split(ibp, s)
}

/// Validation failures are reported, not raised; only ill-shaped inputs are errors.
pub fn join_hyperstate(ibp: &Ibp0, p: &ProbabilityMeasure, w: &RadicalState) -> Result<(Hyperstate, ValidationReport)> {
    HyperstatePlan::formula(ibp)?.join(ibp, p, w)
}

/// A hyperstate over a cancellative radical, with its radical part read
/// through a state on the envelope group.
pub struct CancellativeForm {
    pub measure: ProbabilityMeasure,
    pub group: KGroup,
    pub sigma: GroupState,
    pub report: ValidationReport,
}

/// Requires the radical to be a free cone. Checks
/// `s(a) = p(b_a) + ε·σ([¬b_a ∨ c_a, b_a ∨ c_a])` on the window.
pub fn cancellative_form(ibp: &Ibp0, s: &Hyperstate, samples: usize, seed: u64) -> Result<CancellativeForm> {
    let rank = ibp
        .radical_cone_rank()
        .ok_or_else(|| Error::Precondition("the radical is not cancellative".into()))?;
    let split = split_hyperstate(ibp, s)?;
    let hoop = AnySemihoop::Cone(ConeHoop::new(rank));
    let envelope = semihoop::state_to_kgroup_state(
        &hoop,
        &SemihoopState::Weights(split.state.lambda()),
        ibp.window(),
        samples,
        seed,
    )?;
    let alg = ibp.algebra();
    let mut report = ValidationReport::new("cancellative form");
    report.absorb("envelope state: ", envelope.report);

    let (singles, scope) = ibp.window().sample(alg, 1);
    let mut rows = HashMap::with_capacity(singles.len());
    for a in &singles {
        let d = ibp.decompose(a)?;
        let cone = |x: &Element| {
            ibp.radical_to_cone(x)
                .ok_or_else(|| Error::Internal(format!("{x} is not a cone element")))
        };
        let upper = cone(&alg.join(&alg.neg(&d.b), &d.c))?;
        let lower = cone(&alg.join(&d.b, &d.c))?;
        let class = envelope.group.class_of_pair(&Point::Tuple(upper), &Point::Tuple(lower));
        let p = split
            .measure
            .at(ibp, &d.b)
            .ok_or_else(|| Error::Internal(format!("{} is not in the skeleton", d.b)))?;
        let via_group = Lex::new(p, envelope.sigma.eval(&envelope.group, &class));
        let via_split = formula(ibp, &split.measure, &split.state, a)?;
        rows.insert(a.clone(), (s.value(ibp, a)?, via_group, via_split));
    }
    report.push(scan::unary("envelope identity", scope, &singles, |a| {
        let (v, g, _) = rows[a];
        scan::equal(v, g)
    }));
    report.push(scan::unary("agrees with split", scope, &singles, |a| {
        let (_, g, w) = rows[a];
        scan::equal(g, w)
    }));
    Ok(CancellativeForm {
        measure: split.measure,
        group: envelope.group,
        sigma: envelope.sigma,
        report,
    })
}

/// All measures on `atoms` atoms whose weights share a denominator of at
/// most `max_denominator`, without repetitions.
pub fn measure_family(atoms: usize, max_denominator: i64) -> Vec<ProbabilityMeasure> {
    fn compositions(total: i64, parts: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            compositions(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    if atoms == 0 {
        return Vec::new();
    }
    let mut set = BTreeSet::new();
    for d in 1..=max_denominator {
        let mut out = Vec::new();
        compositions(d, atoms, &mut Vec::new(), &mut out);
        set.extend(
            out.into_iter()
                .map(|c| ProbabilityMeasure::new(c.into_iter().map(|n| Rational::new(n, d)).collect())),
        );
    }
    set.into_iter().collect()
}

/// Every weight vector of length `rank` with entries drawn from `entries`.
pub fn lambda_family(rank: usize, entries: &[Rational]) -> Vec<Vec<Rational>> {
    (0..rank).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                entries.iter().map(move |e| {
                    let mut next = prefix.clone();
                    next.push(*e);
                    next
                })
            })
            .collect()
    })
}

/// Outcome of joining, splitting and checking every member of a family.
#[derive(Clone, Debug, Default)]
pub struct FamilyReport {
    pub members: usize,
    pub accepted: usize,
    /// Pairs that do not join to a hyperstate, with the first failed check.
    pub rejected: Vec<String>,
    pub split_failures: Vec<String>,
    pub property_failures: Vec<String>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.accepted > 0 && self.split_failures.is_empty() && self.property_failures.is_empty()
    }
}

/// Joins every `(p, λ)` of the family, splits each valid result, and
/// compares the split with its input and checks the derived laws.
pub fn sweep_family(ibp: &Ibp0, max_denominator: i64, entries: &[Rational]) -> Result<FamilyReport> {
    let plan = HyperstatePlan::formula(ibp)?;
    let measures = measure_family(ibp.skeleton().atoms().len(), max_denominator);
    let states = lambda_family(ibp.algebra().cone_rank(), entries)
        .into_iter()
        .map(|l| RadicalState::from_lambda(ibp, &l))
        .collect::<Result<Vec<_>>>()?;
    let mut out = FamilyReport::default();
    for p in &measures {
        for w in &states {
            out.members += 1;
            let label = format!("p = {p}, w = {w}");
            let (s, report) = plan.join(ibp, p, w)?;
            if let Some(failure) = report.first_failure() {
                out.rejected.push(format!("{label}: {failure}"));
                continue;
            }
            out.accepted += 1;
            match plan.split(ibp, &s) {
                Err(e) => out.split_failures.push(format!("{label}: {e}")),
                Ok(split) if split.measure != *p || split.state != *w => out.split_failures.push(format!(
                    "{label}: split returned p = {}, w = {}",
                    split.measure, split.state
                )),
                Ok(_) => {}
            }
            if let Some(failure) = plan.properties(ibp, &s)?.first_failure() {
                out.property_failures.push(format!("{label}: {failure}"));
            }
        }
    }
    Ok(out)
}
