//! JSON documents for every structure the command line reads or writes,
//! and a canonical printer so that parse → print is byte-stable.
//!
//! Recognized shapes:
//!
//! | document | fields |
//! |---|---|
//! | finite ℓ-monoid | `size`, `add`, `meet`, `join`, `unit` |
//! | symbolic ℓ-monoid | `{"kind": "symbolic", "rank": k}` |
//! | finite semihoop | `size`, `times`, `impl`, `meet`, `top` |
//! | cone hoop | `{"kind": "cone", "rank": k}` |
//! | finite algebra | `size`, `times`, `impl`, `meet`, `join`, `bot`, `top` |
//! | perfect algebra | `{"kind": "rotation", "rank": k}` |
//! | product | `{"kind": "product", "factors": [...]}` |
//! | semihoop state | `{"0": "-1/2", ...}` or `{"lambda": [...]}` |
//! | hyperstate | `{"measure": {...}, "lambda": [...]}` or `{"table": {...}}` |
//!
//! Tables are arrays of rows. Fractions are strings such as `"-3/4"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::cone::MAX_RANK;
use crate::error::{Error, Result};
use crate::hypernum::{parse_rational, DualRational, Rational};
use crate::ibp0::{parse_element, Algebra, Factor, FiniteMtl, Ibp0};
use crate::lmonoid::{FiniteLMonoid, LMonoid, Orientation, SymbolicMonoid};
use crate::semihoop::{AnySemihoop, ConeHoop, FiniteSemihoop, SemihoopState};
use crate::states::{FactorState, Hyperstate, ProbabilityMeasure, RadicalState};
use crate::table::Table;

/// Any document the command line accepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    LMonoid(LMonoid),
    Semihoop(AnySemihoop),
    Algebra(Algebra),
    SemihoopState(SemihoopState),
    Hyperstate(HyperstateDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::LMonoid(_) => "l-monoid",
            Document::Semihoop(_) => "semihoop",
            Document::Algebra(_) => "algebra",
            Document::SemihoopState(_) => "semihoop state",
            Document::Hyperstate(_) => "hyperstate",
        }
    }
}

/// A hyperstate as written in a file. Resolving it needs the algebra, which
/// fixes the atoms, the element syntax and the finite radicals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperstateDoc {
    Table(BTreeMap<String, DualRational>),
    Split {
        measure: BTreeMap<usize, Rational>,
        lambda: Vec<Rational>,
        /// Values on finite radicals, by factor and component; absent entries are 0.
        radical: BTreeMap<usize, BTreeMap<u32, Rational>>,
    },
}

impl HyperstateDoc {
    pub fn resolve(&self, ibp: &Ibp0) -> Result<Hyperstate> {
        match self {
            HyperstateDoc::Table(t) => t
                .iter()
                .map(|(k, v)| Ok((parse_element(ibp.algebra(), k)?, *v)))
                .collect::<Result<_>>()
                .map(Hyperstate::Table),
            HyperstateDoc::Split { measure, lambda, radical } => {
                let atoms = ibp.skeleton().atoms().len();
                if let Some(bad) = measure.keys().find(|&&k| k >= atoms) {
                    return Err(Error::structural("measure", format!("atom {bad} out of range; the skeleton has {atoms} atoms")));
                }
                let weights = (0..atoms).map(|i| measure.get(&i).copied().unwrap_or_default()).collect();
                let mut state = RadicalState::from_lambda(ibp, lambda)?;
                for (&f, values) in radical {
                    match state.parts.get_mut(f) {
                        Some(FactorState::Table(t)) => {
                            for (&k, &v) in values {
                                if !t.contains_key(&k) {
                                    return Err(Error::structural(
                                        format!("radical.{f}"),
                                        format!("element {k} is not in the radical of factor {f}"),
                                    ));
                                }
                                t.insert(k, v);
                            }
                        }
                        _ => return Err(Error::structural("radical", format!("factor {f} is not a finite factor"))),
                    }
                }
                Ok(Hyperstate::Split {
                    measure: ProbabilityMeasure::new(weights),
                    state,
                })
            }
        }
    }

    pub fn from_hyperstate(s: &Hyperstate) -> Self {
        match s {
            Hyperstate::Table(t) => HyperstateDoc::Table(t.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
            Hyperstate::Split { measure, state } => HyperstateDoc::Split {
                measure: measure.weights.iter().copied().enumerate().collect(),
                lambda: state.lambda(),
                radical: state
                    .parts
                    .iter()
                    .enumerate()
                    .filter_map(|(f, part)| match part {
                        FactorState::Table(t) => {
                            let nonzero: BTreeMap<u32, Rational> =
                                t.iter().filter(|(_, v)| **v != Rational::default()).map(|(k, v)| (*k, *v)).collect();
                            (!nonzero.is_empty()).then_some((f, nonzero))
                        }
                        FactorState::Weights(_) => None,
                    })
                    .collect(),
            },
        }
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path)?;
    parse_document(&text)
}

pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text)?;
    document_from_value(&value)
}

pub fn parse_algebra(path: &Path) -> Result<Algebra> {
    match read_document(path)? {
        Document::Algebra(a) => Ok(a),
        other => Err(Error::structural("document", format!("expected an algebra, found a {}", other.kind()))),
    }
}

pub fn document_from_value(value: &Value) -> Result<Document> {
    let obj = object("document", value)?;
    if let Some(kind) = obj.get("kind") {
        return match kind.as_str() {
            Some("rotation" | "product") => algebra_from_value(value).map(Document::Algebra),
            Some("cone") => Ok(Document::Semihoop(AnySemihoop::Cone(ConeHoop::new(rank(obj)?)))),
            Some("symbolic") => Ok(Document::LMonoid(LMonoid::Symbolic(SymbolicMonoid::new(
                rank(obj)?,
                Orientation::Natural,
            )))),
            _ => Err(Error::structural("kind", format!("unknown kind {kind}"))),
        };
    }
    if obj.contains_key("add") {
        return lmonoid_from_value(obj).map(Document::LMonoid);
    }
    if obj.contains_key("table") || obj.contains_key("measure") {
        return hyperstate_from_value(obj).map(Document::Hyperstate);
    }
    if obj.contains_key("lambda") {
        return Ok(Document::SemihoopState(SemihoopState::Weights(fractions("lambda", field(obj, "lambda")?)?)));
    }
    if obj.contains_key("times") {
        return if obj.contains_key("join") || obj.contains_key("bot") {
            algebra_from_value(value).map(Document::Algebra)
        } else {
            semihoop_from_value(obj).map(Document::Semihoop)
        };
    }
    if !obj.is_empty() && obj.keys().all(|k| k.parse::<usize>().is_ok()) {
        let table = obj
            .iter()
            .map(|(k, v)| Ok((k.parse::<usize>().unwrap(), fraction(&format!("state.{k}"), v)?)))
            .collect::<Result<_>>()?;
        return Ok(Document::SemihoopState(SemihoopState::Table(table)));
    }
    Err(Error::structural("document", "unrecognized document shape"))
}

fn object<'a>(name: &str, value: &'a Value) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::structural(name, "expected a JSON object"))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::structural(name, "missing field"))
}

fn index(obj: &Map<String, Value>, name: &str) -> Result<usize> {
    field(obj, name)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::structural(name, "expected a nonnegative integer"))
}

fn rank(obj: &Map<String, Value>) -> Result<usize> {
    let k = index(obj, "rank")?;
    if !(1..=MAX_RANK).contains(&k) {
        return Err(Error::structural("rank", format!("rank {k} outside 1..={MAX_RANK}")));
    }
    Ok(k)
}

fn table(obj: &Map<String, Value>, name: &str, size: usize) -> Result<Table> {
    let rows = field(obj, name)?
        .as_array()
        .ok_or_else(|| Error::structural(name, "expected an array of rows"))?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| Error::structural(format!("{name}[{i}]"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v.as_i64()
                        .ok_or_else(|| Error::structural(format!("{name}[{i}][{j}]"), "expected an integer index"))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Table::from_rows(name, size, &rows)
}

fn fraction(name: &str, value: &Value) -> Result<Rational> {
    match value {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(Rational::from)
            .ok_or_else(|| Error::structural(name, "expected an integer or a fraction string")),
        _ => Err(Error::structural(name, "expected a fraction string")),
    }
}

fn fractions(name: &str, value: &Value) -> Result<Vec<Rational>> {
    value
        .as_array()
        .ok_or_else(|| Error::structural(name, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| fraction(&format!("{name}[{i}]"), v))
        .collect()
}

fn lmonoid_from_value(obj: &Map<String, Value>) -> Result<LMonoid> {
    let size = index(obj, "size")?;
    let m = FiniteLMonoid::new(
        size,
        table(obj, "add", size)?,
        table(obj, "meet", size)?,
        table(obj, "join", size)?,
        index(obj, "unit")?,
    )?;
    Ok(LMonoid::Finite(m))
}

fn semihoop_from_value(obj: &Map<String, Value>) -> Result<AnySemihoop> {
    let size = index(obj, "size")?;
    let h = FiniteSemihoop::new(
        size,
        table(obj, "times", size)?,
        table(obj, "impl", size)?,
        table(obj, "meet", size)?,
        index(obj, "top")?,
    )?;
    Ok(AnySemihoop::Finite(h))
}

fn finite_mtl(obj: &Map<String, Value>) -> Result<FiniteMtl> {
    let size = index(obj, "size")?;
    FiniteMtl::new(
        size,
        table(obj, "times", size)?,
        table(obj, "impl", size)?,
        table(obj, "meet", size)?,
        table(obj, "join", size)?,
        index(obj, "bot")?,
        index(obj, "top")?,
    )
}

fn factors_from_value(value: &Value) -> Result<Vec<Factor>> {
    let obj = object("factor", value)?;
    match obj.get("kind").map(|k| k.as_str()) {
        None => Ok(vec![Factor::Finite(finite_mtl(obj)?)]),
        Some(Some("rotation")) => Ok(vec![Factor::perfect(rank(obj)?)]),
        Some(Some("product")) => {
            let items = field(obj, "factors")?
                .as_array()
                .ok_or_else(|| Error::structural("factors", "expected an array"))?;
            let mut out = Vec::new();
            for item in items {
                out.extend(factors_from_value(item)?);
            }
            Ok(out)
        }
        Some(other) => Err(Error::structural("kind", format!("not an algebra kind: {other:?}"))),
    }
}

pub fn algebra_from_value(value: &Value) -> Result<Algebra> {
    Algebra::new(factors_from_value(value)?)
}

fn hyperstate_from_value(obj: &Map<String, Value>) -> Result<HyperstateDoc> {
    if let Some(t) = obj.get("table") {
        let t = object("table", t)?;
        return t
            .iter()
            .map(|(k, v)| {
                let text = v
                    .as_str()
                    .ok_or_else(|| Error::structural(format!("table.{k}"), "expected a string r+es"))?;
                Ok((k.clone(), text.parse::<DualRational>()?))
            })
            .collect::<Result<_>>()
            .map(HyperstateDoc::Table);
    }
    let measure = object("measure", field(obj, "measure")?)?
        .iter()
        .map(|(k, v)| {
            let atom = k
                .parse::<usize>()
                .map_err(|_| Error::structural("measure", format!("atom key {k:?} is not an index")))?;
            Ok((atom, fraction(&format!("measure.{k}"), v)?))
        })
        .collect::<Result<_>>()?;
    let lambda = match obj.get("lambda") {
        Some(v) => fractions("lambda", v)?,
        None => Vec::new(),
    };
    let mut radical = BTreeMap::new();
    if let Some(r) = obj.get("radical") {
        for (f, values) in object("radical", r)? {
            let factor = f
                .parse::<usize>()
                .map_err(|_| Error::structural("radical", format!("factor key {f:?} is not an index")))?;
            let values = object(&format!("radical.{f}"), values)?
                .iter()
                .map(|(k, v)| {
                    let key = k
                        .parse::<u32>()
                        .map_err(|_| Error::structural(format!("radical.{f}"), format!("key {k:?} is not an index")))?;
                    Ok((key, fraction(&format!("radical.{f}.{k}"), v)?))
                })
                .collect::<Result<_>>()?;
            radical.insert(factor, values);
        }
    }
    Ok(HyperstateDoc::Split { measure, lambda, radical })
}

fn rows(t: &Table) -> Value {
    Value::from(t.rows())
}

fn text(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn object_value(entries: impl IntoIterator<Item = (String, Value)>) -> Value {
    Value::Object(entries.into_iter().collect())
}

pub fn lmonoid_to_value(m: &LMonoid) -> Value {
    match m {
        LMonoid::Finite(m) => {
            let (add, meet, join) = m.tables();
            serde_json::json!({
                "size": m.size(), "add": rows(add), "meet": rows(meet), "join": rows(join), "unit": m.unit(),
            })
        }
        LMonoid::Symbolic(s) => serde_json::json!({ "kind": "symbolic", "rank": s.rank }),
    }
}

pub fn semihoop_to_value(h: &AnySemihoop) -> Value {
    match h {
        AnySemihoop::Finite(h) => {
            let (times, imp, meet) = h.tables();
            serde_json::json!({
                "size": h.size(), "times": rows(times), "impl": rows(imp), "meet": rows(meet), "top": h.top_index(),
            })
        }
        AnySemihoop::Cone(c) => serde_json::json!({ "kind": "cone", "rank": c.rank }),
    }
}

fn factor_to_value(f: &Factor) -> Value {
    match f {
        Factor::Finite(m) => {
            let [times, imp, meet, join] = m.tables();
            serde_json::json!({
                "size": m.size(), "times": rows(times), "impl": rows(imp), "meet": rows(meet),
                "join": rows(join), "bot": m.bot_index(), "top": m.top_index(),
            })
        }
        Factor::Perfect(r) => serde_json::json!({ "kind": "rotation", "rank": r.hoop.rank }),
    }
}

pub fn algebra_to_value(a: &Algebra) -> Value {
    match a.factors() {
        [single] => factor_to_value(single),
        factors => serde_json::json!({
            "kind": "product",
            "factors": factors.iter().map(factor_to_value).collect::<Vec<_>>(),
        }),
    }
}

pub fn semihoop_state_to_value(w: &SemihoopState) -> Value {
    match w {
        SemihoopState::Table(t) => object_value(t.iter().map(|(k, v)| (k.to_string(), text(v)))),
        SemihoopState::Weights(l) => serde_json::json!({ "lambda": l.iter().map(text).collect::<Vec<_>>() }),
    }
}

pub fn hyperstate_to_value(doc: &HyperstateDoc) -> Value {
    match doc {
        HyperstateDoc::Table(t) => serde_json::json!({
            "table": object_value(t.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string())))),
        }),
        HyperstateDoc::Split { measure, lambda, radical } => {
            let mut out = Map::new();
            out.insert("measure".into(), object_value(measure.iter().map(|(k, v)| (k.to_string(), text(v)))));
            out.insert("lambda".into(), Value::from(lambda.iter().map(text).collect::<Vec<_>>()));
            if !radical.is_empty() {
                out.insert(
                    "radical".into(),
                    object_value(radical.iter().map(|(f, values)| {
                        (f.to_string(), object_value(values.iter().map(|(k, v)| (k.to_string(), text(v)))))
                    })),
                );
            }
            Value::Object(out)
        }
    }
}

pub fn document_to_value(doc: &Document) -> Value {
    match doc {
        Document::LMonoid(m) => lmonoid_to_value(m),
        Document::Semihoop(h) => semihoop_to_value(h),
        Document::Algebra(a) => algebra_to_value(a),
        Document::SemihoopState(w) => semihoop_state_to_value(w),
        Document::Hyperstate(s) => hyperstate_to_value(s),
    }
}

/// Pretty JSON with sorted keys, two-space indentation, and arrays of
/// scalars kept on one line. Ends with a newline.
pub fn to_canonical(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    let pad = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    match value {
        Value::Array(items) if items.iter().all(is_scalar) => {
            let inner: Vec<String> = items.iter().map(Value::to_string).collect();
            let _ = write!(out, "[{}]", inner.join(", "));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{close}]");
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            for (i, (k, v)) in entries.iter().enumerate() {
                let _ = write!(out, "{pad}{}: ", Value::String((*k).clone()));
                write_value(out, v, depth + 1);
                out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{close}}}");
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::scan::Window;

    fn roundtrip(doc: &Document) {
        let text = to_canonical(&document_to_value(doc));
        let back = parse_document(&text).unwrap();
        assert_eq!(&back, doc);
        assert_eq!(to_canonical(&document_to_value(&back)), text);
    }

    #[test]
    fn corpus_documents_roundtrip() {
        for (_, a) in corpus::ibp0_corpus() {
            roundtrip(&Document::Algebra(a));
        }
        for (_, m) in corpus::lmonoid_corpus() {
            roundtrip(&Document::LMonoid(LMonoid::Finite(m)));
        }
        for (_, h) in corpus::semihoop_corpus() {
            roundtrip(&Document::Semihoop(AnySemihoop::Finite(h)));
        }
        roundtrip(&Document::Semihoop(AnySemihoop::Cone(ConeHoop::new(2))));
        roundtrip(&Document::SemihoopState(SemihoopState::Weights(vec![Rational::new(1, 2)])));
    }

    #[test]
    fn boolean_two_file() {
        let text = r#"{"size": 2, "times": [[0,0],[0,1]], "impl": [[1,1],[0,1]],
                       "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]], "bot": 0, "top": 1}"#;
        let Document::Algebra(a) = parse_document(text).unwrap() else { panic!("not an algebra") };
        let Factor::Finite(m) = &a.factors()[0] else { panic!("not finite") };
        assert_eq!(m.size(), 2);
        assert_eq!(a, corpus::finite(corpus::boolean(1)));
    }

    #[test]
    fn rotation_descriptor() {
        let doc = parse_document(r#"{"kind": "rotation", "rank": 1}"#).unwrap();
        assert_eq!(doc, Document::Algebra(corpus::chang(1)));
    }

    #[test]
    fn errors_name_the_field() {
        let bad_cell = r#"{"size": 2, "times": [[0,0],[0,2]], "impl": [[1,1],[0,1]],
                           "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]], "bot": 0, "top": 1}"#;
        let err = parse_document(bad_cell).unwrap_err();
        assert!(err.to_string().contains("times[1][1]"), "{err}");

        let ragged = r#"{"size": 2, "add": [[0,1],[1]], "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]], "unit": 0}"#;
        let err = parse_document(ragged).unwrap_err();
        assert!(err.to_string().contains("add[1]"), "{err}");

        let missing = r#"{"size": 2, "times": [[0,0],[0,1]], "impl": [[1,1],[0,1]], "meet": [[0,0],[0,1]], "top": 1, "bot": 0}"#;
        let err = parse_document(missing).unwrap_err();
        assert!(err.to_string().contains("`join`"), "{err}");
    }

    #[test]
    fn hyperstate_documents() {
        let ibp = Ibp0::new(corpus::finite(corpus::boolean(2)).product(&corpus::chang(1)), Window::new(3)).unwrap();
        let text = r#"{"measure": {"0": "1/2", "2": "1/2"}, "lambda": ["2"]}"#;
        let Document::Hyperstate(doc) = parse_document(text).unwrap() else { panic!("not a hyperstate") };
        let s = doc.resolve(&ibp).unwrap();
        let Hyperstate::Split { measure, .. } = &s else { panic!("not split") };
        assert_eq!(measure.weights, vec![Rational::new(1, 2), Rational::default(), Rational::new(1, 2)]);
        let back = HyperstateDoc::from_hyperstate(&s);
        roundtrip(&Document::Hyperstate(back));

        let table = r#"{"table": {"0": "0+e0", "1": "1+e0"}}"#;
        let doc = parse_document(table).unwrap();
        roundtrip(&doc);
    }

    #[test]
    fn canonical_layout() {
        let text = to_canonical(&algebra_to_value(&corpus::finite(corpus::boolean(1))));
        assert!(text.contains("\"times\": [\n    [0, 0],\n    [0, 1]\n  ]"), "{text}");
        assert!(text.ends_with("}\n"));
    }
}
