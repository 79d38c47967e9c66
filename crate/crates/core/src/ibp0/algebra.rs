use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use smallvec::SmallVec;

use crate::cone::{parse_cone, Cone};
use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::scan::{Carrier, Window};
use crate::semihoop::ConeHoop;

use super::{validate_ibp0, FiniteMtl, Residuated, Rotation, Signed};

/// One coordinate of an algebra element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Fin(u32),
    Perfect(Signed<Cone>),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Fin(i) => write!(f, "{i}"),
            Component::Perfect(s) => write!(f, "{s}"),
        }
    }
}

/// An element of an [`Algebra`], one component per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub SmallVec<[Component; 2]>);

impl Element {
    pub fn components(&self) -> &[Component] {
        &self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [single] = self.0.as_slice() {
            return write!(f, "{single}");
        }
        f.write_str("<")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(">")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Finite(FiniteMtl),
    /// The rotation of the cone hoop of the given rank.
    Perfect(Rotation<ConeHoop>),
}

impl Factor {
    pub fn perfect(rank: usize) -> Self {
        Factor::Perfect(Rotation::new(ConeHoop::new(rank)))
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            Factor::Finite(_) => None,
            Factor::Perfect(r) => Some(r.hoop.rank),
        }
    }
}

fn fin(c: &Component) -> usize {
    match c {
        Component::Fin(i) => *i as usize,
        Component::Perfect(_) => panic!("component {c} does not belong to a finite factor"),
    }
}

fn perfect(c: &Component) -> &Signed<Cone> {
    match c {
        Component::Perfect(s) => s,
        Component::Fin(_) => panic!("component {c} does not belong to a perfect factor"),
    }
}

macro_rules! lift_binary {
    ($self:ident, $x:ident, $y:ident, $finite:ident, $rotation:ident) => {
        match $self {
            Factor::Finite(m) => Component::Fin(m.$finite(fin($x), fin($y)) as u32),
            Factor::Perfect(r) => Component::Perfect(r.$rotation(perfect($x), perfect($y))),
        }
    };
}

impl Carrier for Factor {
    type Elem = Component;

    fn elements(&self, bound: u32) -> Vec<Component> {
        match self {
            Factor::Finite(m) => (0..m.size() as u32).map(Component::Fin).collect(),
            Factor::Perfect(r) => r.elements(bound).into_iter().map(Component::Perfect).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        matches!(self, Factor::Finite(_))
    }

    fn element_count(&self, bound: u32) -> usize {
        match self {
            Factor::Finite(m) => m.size(),
            Factor::Perfect(r) => r.element_count(bound),
        }
    }
}

impl Residuated for Factor {
    fn bot(&self) -> Component {
        match self {
            Factor::Finite(m) => Component::Fin(m.bot_index() as u32),
            Factor::Perfect(r) => Component::Perfect(r.bot()),
        }
    }

    fn top(&self) -> Component {
        match self {
            Factor::Finite(m) => Component::Fin(m.top_index() as u32),
            Factor::Perfect(r) => Component::Perfect(r.top()),
        }
    }

    fn mul(&self, x: &Component, y: &Component) -> Component {
        lift_binary!(self, x, y, times, mul)
    }

    fn imp(&self, x: &Component, y: &Component) -> Component {
        lift_binary!(self, x, y, implies, imp)
    }

    fn meet(&self, x: &Component, y: &Component) -> Component {
        lift_binary!(self, x, y, meet_index, meet)
    }

    fn join(&self, x: &Component, y: &Component) -> Component {
        lift_binary!(self, x, y, join_index, join)
    }

    fn leq(&self, x: &Component, y: &Component) -> bool {
        match self {
            Factor::Finite(m) => m.meet_index(fin(x), fin(y)) == fin(x),
            Factor::Perfect(r) => r.leq(perfect(x), perfect(y)),
        }
    }

    fn neg(&self, x: &Component) -> Component {
        match self {
            Factor::Finite(m) => Component::Fin(m.implies(fin(x), m.bot_index()) as u32),
            Factor::Perfect(r) => Component::Perfect(r.neg(perfect(x))),
        }
    }
}

/// A finite product of factors; a single factor is the algebra itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    factors: Vec<Factor>,
}

impl Algebra {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::structural("factors", "a product needs at least one factor"));
        }
        Ok(Algebra { factors })
    }

    pub fn single(factor: Factor) -> Self {
        Algebra { factors: vec![factor] }
    }

    pub fn product(&self, other: &Algebra) -> Algebra {
        Algebra {
            factors: self.factors.iter().chain(&other.factors).cloned().collect(),
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Total rank of the perfect factors.
    pub fn cone_rank(&self) -> usize {
        self.factors.iter().filter_map(Factor::rank).sum()
    }

    pub fn element(&self, components: impl IntoIterator<Item = Component>) -> Result<Element> {
        let parts: SmallVec<[Component; 2]> = components.into_iter().collect();
        self.check_element(&Element(parts.clone()))?;
        Ok(Element(parts))
    }

    /// Rejects elements with the wrong arity, foreign components or out-of-range indices.
    pub fn check_element(&self, e: &Element) -> Result<()> {
        if e.0.len() != self.factors.len() {
            return Err(Error::structural(
                "element",
                format!("{e} has {} components, the algebra has {} factors", e.0.len(), self.factors.len()),
            ));
        }
        for (i, (c, f)) in e.0.iter().zip(&self.factors).enumerate() {
            let ok = match (c, f) {
                (Component::Fin(v), Factor::Finite(m)) => (*v as usize) < m.size(),
                (Component::Perfect(Signed::Pos(m) | Signed::Neg(m)), Factor::Perfect(r)) => m.rank() == r.hoop.rank,
                _ => false,
            };
            if !ok {
                return Err(Error::structural(
                    format!("element[{i}]"),
                    format!("component {c} does not belong to factor {i}"),
                ));
            }
        }
        Ok(())
    }

    #[inline]
    fn zip(&self, x: &Element, y: &Element, op: impl Fn(&Factor, &Component, &Component) -> Component) -> Element {
        let mut out = SmallVec::new();
        for ((f, a), b) in self.factors.iter().zip(&x.0).zip(&y.0) {
            out.push(op(f, a, b));
        }
        Element(out)
    }

    fn constant(&self, op: impl Fn(&Factor) -> Component) -> Element {
        Element(self.factors.iter().map(op).collect())
    }

    /// Validates the whole algebra. A product is validated factor by factor
    /// on the full window, then directly on a quarter of the pair budget and
    /// a fifth of the triple budget.
    pub fn validate(&self, window: &Window) -> ValidationReport {
        if let [factor] = self.factors.as_slice() {
            return validate_factor(factor, window);
        }
        let mut report = ValidationReport::new(format!("product of {} factors", self.factors.len()));
        for (i, factor) in self.factors.iter().enumerate() {
            report.absorb(&format!("factor {i}: "), validate_factor(factor, window));
        }
        let direct = window.with_budgets(window.pair_budget / 4, window.triple_budget / 5);
        report.absorb("product: ", validate_ibp0(self, &direct));
        report
    }
}

/// Reports on perfect factors depend only on the rank and the window, so
/// they are computed once per process.
fn validate_factor(factor: &Factor, window: &Window) -> ValidationReport {
    let Some(rank) = factor.rank() else {
        return validate_ibp0(factor, window);
    };
    static REPORTS: OnceLock<Mutex<HashMap<(usize, Window), ValidationReport>>> = OnceLock::new();
    let cache = REPORTS.get_or_init(Default::default);
    if let Some(report) = cache.lock().unwrap().get(&(rank, *window)) {
        return report.clone();
    }
    let report = validate_ibp0(factor, window);
    cache.lock().unwrap().insert((rank, *window), report.clone());
    report
}

impl Carrier for Algebra {
    type Elem = Element;

    fn elements(&self, bound: u32) -> Vec<Element> {
        let mut out = vec![Element(SmallVec::new())];
        for factor in &self.factors {
            let part = factor.elements(bound);
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

    fn is_finite(&self) -> bool {
        self.factors.iter().all(Carrier::is_finite)
    }

    fn element_count(&self, bound: u32) -> usize {
        self.factors.iter().map(|f| f.element_count(bound)).product()
    }
}

impl Residuated for Algebra {
    fn bot(&self) -> Element {
        self.constant(Factor::bot)
    }

    fn top(&self) -> Element {
        self.constant(Factor::top)
    }

    fn mul(&self, x: &Element, y: &Element) -> Element {
        self.zip(x, y, Factor::mul)
    }

    fn imp(&self, x: &Element, y: &Element) -> Element {
        self.zip(x, y, Factor::imp)
    }

    fn meet(&self, x: &Element, y: &Element) -> Element {
        self.zip(x, y, Factor::meet)
    }

    fn join(&self, x: &Element, y: &Element) -> Element {
        self.zip(x, y, Factor::join)
    }

    fn leq(&self, x: &Element, y: &Element) -> bool {
        self.factors
            .iter()
            .zip(x.0.iter().zip(&y.0))
            .all(|(f, (a, b))| f.leq(a, b))
    }

    fn neg(&self, x: &Element) -> Element {
        Element(self.factors.iter().zip(&x.0).map(|(f, a)| f.neg(a)).collect())
    }
}

/// Parses `3`, `pos(1,2)`, `neg(0)` or a tuple `<2,pos(1)>` and checks it
/// against the algebra.
pub fn parse_element(algebra: &Algebra, text: &str) -> Result<Element> {
    let text = text.trim();
    let parts: Vec<&str> = match text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        Some(inner) => split_top_level(inner),
        None => vec![text],
    };
    let components = parts
        .into_iter()
        .map(parse_component)
        .collect::<Result<SmallVec<[Component; 2]>>>()?;
    let element = Element(components);
    algebra.check_element(&element)?;
    Ok(element)
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn parse_component(text: &str) -> Result<Component> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("pos") {
        return Ok(Component::Perfect(Signed::Pos(parse_cone(rest)?)));
    }
    if let Some(rest) = text.strip_prefix("neg") {
        return Ok(Component::Perfect(Signed::Neg(parse_cone(rest)?)));
    }
    text.parse::<u32>()
        .map(Component::Fin)
        .map_err(|_| Error::Parse(format!("bad element component {text:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn element_text_roundtrip() {
        let a = corpus::finite(corpus::boolean(2)).product(&corpus::chang(1));
        for e in a.elements(2) {
            assert_eq!(parse_element(&a, &e.to_string()).unwrap(), e);
        }
        assert!(parse_element(&a, "<4,pos(1)>").is_err());
        assert!(parse_element(&a, "<1,pos(1,2)>").is_err());
        assert!(parse_element(&a, "<1>").is_err());
        let chang = corpus::chang(2);
        let e = parse_element(&chang, "neg(0,3)").unwrap();
        assert_eq!(e.to_string(), "neg(0,3)");
    }

    #[test]
    fn empty_product_rejected() {
        assert!(matches!(Algebra::new(Vec::new()), Err(Error::Structural { .. })));
    }

    #[test]
    fn single_factor_product_matches_factor() {
        let b = corpus::boolean(1);
        let alone = Algebra::single(Factor::Finite(b.clone()));
        for x in 0..2u32 {
            for y in 0..2u32 {
                let e = |v| Element(SmallVec::from_slice(&[Component::Fin(v)]));
                assert_eq!(alone.mul(&e(x), &e(y)), e(b.times(x as usize, y as usize) as u32));
            }
        }
    }

    #[test]
    fn products_validate() {
        let window = Window::new(3);
        let a = corpus::finite(corpus::boolean(2)).product(&corpus::chang(1));
        let report = a.validate(&window);
        assert!(report.is_valid(), "{:?}", report.first_failure());
        let b = corpus::chang(1).product(&corpus::chang(2));
        let report = b.validate(&window);
        assert!(report.is_valid(), "{:?}", report.first_failure());
        assert!(report.checks.iter().any(|c| c.axiom.starts_with("product: ")));
    }
}
