//! The `ibpkit` command line.
//!
//! Every verb produces a [`RunReport`]. The exit status is 0 when every
//! check passes, 1 when a check fails, and 2 when the input could not be
//! read or does not meet the preconditions of the command.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus;
use crate::error::{Error, Result};
use crate::ibp0::{self, parse_element, Algebra, Ibp0};
use crate::io::{self, Document, HyperstateDoc};
use crate::lmonoid::{self, is_cancellative, validate_lmonoid, LMonoid};
use crate::report::{Check, ValidationReport};
use crate::scan::Window;
use crate::semihoop::{self, AnySemihoop, GroupState, SemihoopState};
use crate::states::{self, Hyperstate};

#[derive(Debug, Parser)]
#[command(name = "ibpkit", version, about = "Validators and constructions for IBP0-algebras and their states")]
pub struct Cli {
    /// Coordinate bound for scans over symbolic carriers.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub window: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of an l-monoid, semihoop or algebra file.
    Validate {
        file: PathBuf,
        /// Also require the DL and Inv identities on algebras.
        #[arg(long)]
        ibp0: bool,
    },
    /// List the Boolean skeleton of an IBP0-algebra.
    Skeleton { file: PathBuf },
    /// Describe the radical of an IBP0-algebra.
    Radical { file: PathBuf },
    /// Split elements into a complemented and a radical part.
    Decompose {
        file: PathBuf,
        /// Elements to decompose; all window elements when omitted.
        elements: Vec<String>,
    },
    /// Build the group envelope of an l-monoid or of a semihoop's monoid reduct.
    Grothendieck { file: PathBuf },
    /// Enumerate the states of a finite semihoop, or check one state.
    States {
        file: PathBuf,
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate, split, join or inspect a hyperstate on an algebra.
    #[command(subcommand)]
    Hyperstate(HyperstateCommand),
    /// Write the built-in corpus as canonical JSON files.
    Corpus {
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum HyperstateCommand {
    /// Check the hyperstate axioms s1, s2 and s3.
    Validate { algebra: PathBuf, state: PathBuf },
    /// Check the derived laws of a valid hyperstate.
    Properties { algebra: PathBuf, state: PathBuf },
    /// Recover the measure and the radical state and check the split identity.
    Split { algebra: PathBuf, state: PathBuf },
    /// Build a hyperstate from a measure and a radical state and validate it.
    Join { algebra: PathBuf, state: PathBuf },
    /// Read the radical part through a state on the envelope group.
    Cancellative {
        algebra: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Everything a command reports, in the order it is printed.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub status: i32,
    pub checks: Vec<Check>,
    pub data: Value,
    pub error: Option<String>,
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => io::to_canonical(&serde_json::to_value(self).expect("reports serialize")),
            Format::Tsv => {
                let mut out = String::new();
                for c in &self.checks {
                    let witness = c.witness.as_ref().map_or_else(|| "-".to_string(), |w| w.join(", "));
                    out.push_str(&format!("{}\t{}\t{}\n", c.axiom, verdict(c), witness));
                }
                if let Some(e) = &self.error {
                    out.push_str(&format!("error\tfail\t{e}\n"));
                }
                out
            }
        }
    }
}

fn verdict(c: &Check) -> &'static str {
    match c.verdict {
        crate::report::Verdict::Pass => "pass",
        crate::report::Verdict::Fail => "fail",
        crate::report::Verdict::Skipped => "skipped",
    }
}

/// What the process should print and return.
#[derive(Debug)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { status, stdout: String::new(), stderr: text }
            } else {
                Outcome { status, stdout: text, stderr: String::new() }
            };
        }
    };
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let report = execute(&cli, echo);
    Outcome {
        status: report.status,
        stdout: report.render(cli.format),
        stderr: report.error.clone().map(|e| format!("error: {e}\n")).unwrap_or_default(),
    }
}

pub fn execute(cli: &Cli, command: Vec<String>) -> RunReport {
    let started = Instant::now();
    let window = Window::new(cli.window);
    let result = dispatch(&cli.command, &window);
    let elapsed_ms = started.elapsed().as_millis() as u64;
    match result {
        Ok((report, data)) => RunReport {
            command,
            status: if report.is_valid() { 0 } else { 1 },
            checks: report.checks,
            data,
            error: None,
            elapsed_ms,
        },
        Err(e) => RunReport {
            command,
            status: if e.is_check_failure() { 1 } else { 2 },
            checks: Vec::new(),
            data: Value::Null,
            error: Some(e.to_string()),
            elapsed_ms,
        },
    }
}

type Output = (ValidationReport, Value);

fn dispatch(command: &Command, window: &Window) -> Result<Output> {
    match command {
        Command::Validate { file, ibp0 } => validate(io::read_document(file)?, *ibp0, window),
        Command::Skeleton { file } => skeleton(&load_ibp0(file, window)?),
        Command::Radical { file } => radical(&load_ibp0(file, window)?),
        Command::Decompose { file, elements } => decompose(&load_ibp0(file, window)?, elements),
        Command::Grothendieck { file } => grothendieck(io::read_document(file)?, window),
        Command::States { file, state, samples, seed } => {
            let hoop = match io::read_document(file)? {
                Document::Semihoop(h) => h,
                other => return Err(wrong_document("a semihoop", &other)),
            };
            match state {
                None => enumerate_states(&hoop),
                Some(path) => check_state(&hoop, &load_semihoop_state(path)?, window, *samples, *seed),
            }
        }
        Command::Hyperstate(sub) => hyperstate(sub, window),
        Command::Corpus { out } => write_corpus(out),
    }
}

fn wrong_document(expected: &str, found: &Document) -> Error {
    Error::Structural {
        field: "document".into(),
        message: format!("expected {expected}, found a {}", found.kind()),
    }
}

fn load_ibp0(path: &Path, window: &Window) -> Result<Ibp0> {
    Ibp0::new(io::parse_algebra(path)?, *window)
}

fn load_semihoop_state(path: &Path) -> Result<SemihoopState> {
    match io::read_document(path)? {
        Document::SemihoopState(w) => Ok(w),
        other => Err(wrong_document("a semihoop state", &other)),
    }
}

fn load_hyperstate(ibp: &Ibp0, path: &Path) -> Result<Hyperstate> {
    match io::read_document(path)? {
        Document::Hyperstate(doc) => doc.resolve(ibp),
        other => Err(wrong_document("a hyperstate", &other)),
    }
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

fn validate_mtl_algebra(a: &Algebra, window: &Window) -> ValidationReport {
    if let [factor] = a.factors() {
        return ibp0::validate_mtl(factor, window);
    }
    let mut report = ValidationReport::new(format!("product of {} factors", a.factors().len()));
    for (i, factor) in a.factors().iter().enumerate() {
        report.absorb(&format!("factor {i}: "), ibp0::validate_mtl(factor, window));
    }
    report.absorb("product: ", ibp0::validate_mtl(a, window));
    report
}

fn validate(doc: Document, ibp0: bool, window: &Window) -> Result<Output> {
    let report = match &doc {
        Document::LMonoid(LMonoid::Finite(m)) => validate_lmonoid(m),
        Document::LMonoid(LMonoid::Symbolic(_)) => {
            let mut r = ValidationReport::new("symbolic l-monoid");
            r.push(Check::skipped("l-monoid axioms", "the symbolic monoid is built from its definition"));
            r
        }
        Document::Semihoop(h) => h.validate(window),
        Document::Algebra(a) if ibp0 => a.validate(window),
        Document::Algebra(a) => validate_mtl_algebra(a, window),
        other => return Err(wrong_document("an l-monoid, semihoop or algebra", other)),
    };
    let data = json!({ "kind": doc.kind(), "subject": report.subject, "flags": report.flags });
    Ok((report, data))
}

fn skeleton(ibp: &Ibp0) -> Result<Output> {
    let sk = ibp.skeleton();
    let data = json!({
        "elements": strings(sk.elements()),
        "atoms": strings(sk.atoms()),
        "size": sk.len(),
    });
    Ok((ibp.skeleton_report(), data))
}

fn radical(ibp: &Ibp0) -> Result<Output> {
    let finite: serde_json::Map<String, Value> = (0..ibp.algebra().factors().len())
        .filter_map(|f| ibp.radical_components(f).map(|c| (f.to_string(), Value::from(strings(c)))))
        .collect();
    let data = json!({
        "cone_rank": ibp.algebra().cone_rank(),
        "cancellative": ibp.radical_cone_rank().is_some(),
        "finite_parts": finite,
    });
    Ok((ibp.radical_report(), data))
}

fn decompose(ibp: &Ibp0, texts: &[String]) -> Result<Output> {
    if texts.is_empty() {
        let (singles, _) = ibp.window().sample(ibp.algebra(), 1);
        let rows = singles
            .iter()
            .map(|a| {
                let d = ibp.decompose(a)?;
                Ok(json!({ "element": a.to_string(), "b": d.b.to_string(), "c": d.c.to_string() }))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((ibp.decomposition_report(), Value::from(rows)));
    }
    let elements = texts
        .iter()
        .map(|t| parse_element(ibp.algebra(), t))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ValidationReport::new("decomposition");
    let mut rows = Vec::new();
    for a in &elements {
        let d = ibp.decompose(a)?;
        let back = ibp.recompose(&d);
        report.push(Check::fact(format!("recompose {a}"), back == *a, &back, a));
        rows.push(json!({ "element": a.to_string(), "b": d.b.to_string(), "c": d.c.to_string() }));
    }
    Ok((report, Value::from(rows)))
}

fn grothendieck(doc: Document, window: &Window) -> Result<Output> {
    let m = match doc {
        Document::LMonoid(m) => m,
        Document::Semihoop(AnySemihoop::Finite(h)) => LMonoid::Finite(h.monoid_reduct()),
        Document::Semihoop(AnySemihoop::Cone(h)) => LMonoid::Symbolic(h.monoid_reduct()),
        other => return Err(wrong_document("an l-monoid or semihoop", &other)),
    };
    let (group, embedding) = lmonoid::k_envelope(&m);
    let mut report = lmonoid::envelope_report(&m, &group, &embedding, window);
    report.absorb("image bound: ", lmonoid::image_bound_report(&m, &group, &embedding, window));
    let classes = group.classes();
    let data = json!({
        "finite": group.is_finite(),
        "classes": if group.is_finite() { Value::from(strings(&classes)) } else { Value::Null },
        "trivial": group.is_finite() && classes.len() == 1,
        "h_injective": embedding.is_injective(),
        "cancellative": is_cancellative(&m),
    });
    Ok((report, data))
}

fn enumerate_states(hoop: &AnySemihoop) -> Result<Output> {
    let AnySemihoop::Finite(h) = hoop else {
        return Err(Error::Precondition(
            "a cone hoop has a state for every nonnegative weight vector; pass one as a state file".into(),
        ));
    };
    let found = semihoop::enumerate_states_finite(h)?;
    let mut report = ValidationReport::new("states");
    let only_zero = found.len() == 1 && found[0].is_zero();
    report.push(Check::fact("only the zero state", only_zero, found.len(), 1));
    let data = json!({
        "count": found.len(),
        "states": found.iter().map(io::semihoop_state_to_value).collect::<Vec<_>>(),
    });
    Ok((report, data))
}

fn check_state(hoop: &AnySemihoop, w: &SemihoopState, window: &Window, samples: usize, seed: u64) -> Result<Output> {
    let mut report = semihoop::validate_state(hoop, w, window)?;
    report.absorb("", semihoop::state_properties(hoop, w, window)?);
    let envelope = semihoop::state_to_kgroup_state(hoop, w, window, samples, seed)?;
    report.absorb("envelope: ", envelope.report);
    let (back, back_report) =
        semihoop::kgroup_state_to_state(hoop, &envelope.group, &envelope.embedding, &envelope.sigma, window)?;
    report.absorb("recovered: ", back_report);
    report.push(Check::fact("sigma after h recovers w", back == *w, format!("{back:?}"), format!("{w:?}")));
    let sigma = match &envelope.sigma {
        GroupState::Classes(v) => json!({ "classes": strings(v) }),
        GroupState::Linear(l) => json!({ "lambda": strings(l) }),
    };
    Ok((report, json!({ "state": io::semihoop_state_to_value(w), "sigma": sigma })))
}

fn lex_row(a: &ibp0::Element, value: crate::hypernum::Lex, formula: crate::hypernum::Lex) -> Value {
    json!({
        "element": a.to_string(),
        "value": value.to_string(),
        "formula": formula.to_string(),
        "residual": (value - formula).to_string(),
    })
}

fn hyperstate(sub: &HyperstateCommand, window: &Window) -> Result<Output> {
    match sub {
        HyperstateCommand::Validate { algebra, state } => {
            let ibp = load_ibp0(algebra, window)?;
            let s = load_hyperstate(&ibp, state)?;
            Ok((states::validate_hyperstate(&ibp, &s)?, Value::Null))
        }
        HyperstateCommand::Properties { algebra, state } => {
            let ibp = load_ibp0(algebra, window)?;
            let s = load_hyperstate(&ibp, state)?;
            Ok((states::hyperstate_properties(&ibp, &s)?, Value::Null))
        }
        HyperstateCommand::Split { algebra, state } => {
            let ibp = load_ibp0(algebra, window)?;
            let s = load_hyperstate(&ibp, state)?;
            let split = states::split_hyperstate(&ibp, &s)?;
            let residuals = states::split_residuals(&ibp, &s, &split.measure, &split.state)?
                .into_iter()
                .map(|(a, lhs, rhs)| lex_row(&a, lhs, rhs))
                .collect::<Vec<_>>();
            let joined = Hyperstate::Split { measure: split.measure.clone(), state: split.state.clone() };
            let data = json!({
                "measure": strings(&split.measure.weights),
                "lambda": strings(split.state.lambda()),
                "radical_state": split.state.to_string(),
                "split": io::hyperstate_to_value(&HyperstateDoc::from_hyperstate(&joined)),
                "residuals": residuals,
            });
            Ok((split.report, data))
        }
        HyperstateCommand::Join { algebra, state } => {
            let ibp = load_ibp0(algebra, window)?;
            let Hyperstate::Split { measure, state } = load_hyperstate(&ibp, state)? else {
                return Err(Error::structural("document", "join needs a measure and a radical state, not a table"));
            };
            let (s, report) = states::join_hyperstate(&ibp, &measure, &state)?;
            let (singles, _) = ibp.window().sample(ibp.algebra(), 1);
            let values = singles
                .iter()
                .map(|a| Ok(json!({ "element": a.to_string(), "value": s.value(&ibp, a)?.to_string() })))
                .collect::<Result<Vec<_>>>()?;
            Ok((report, json!({ "values": values })))
        }
        HyperstateCommand::Cancellative { algebra, state, samples, seed } => {
            let ibp = load_ibp0(algebra, window)?;
            let s = load_hyperstate(&ibp, state)?;
            let form = states::cancellative_form(&ibp, &s, *samples, *seed)?;
            let sigma = match &form.sigma {
                GroupState::Linear(l) => strings(l),
                GroupState::Classes(v) => strings(v),
            };
            Ok((form.report, json!({ "measure": strings(&form.measure.weights), "sigma": sigma })))
        }
    }
}

/// Name and document of every file the `corpus` verb writes.
pub fn corpus_documents() -> Vec<(String, Document)> {
    let mut out = Vec::new();
    for (name, a) in corpus::ibp0_corpus() {
        out.push((format!("algebras/{name}.json"), Document::Algebra(a)));
    }
    for (name, m) in corpus::lmonoid_corpus() {
        out.push((format!("lmonoids/{name}.json"), Document::LMonoid(LMonoid::Finite(m))));
    }
    for (name, h) in corpus::semihoop_corpus() {
        out.push((format!("semihoops/{name}.json"), Document::Semihoop(AnySemihoop::Finite(h))));
    }
    for rank in 1..=3 {
        let cone = AnySemihoop::Cone(semihoop::ConeHoop::new(rank));
        out.push((format!("semihoops/cone{rank}.json"), Document::Semihoop(cone)));
    }
    let r = |n, d| crate::hypernum::Rational::new(n, d);
    let split = |measure: Vec<crate::hypernum::Rational>, lambda: Vec<crate::hypernum::Rational>| {
        Document::Hyperstate(HyperstateDoc::Split {
            measure: measure.into_iter().enumerate().collect(),
            lambda,
            radical: Default::default(),
        })
    };
    out.push(("states/cone1_lambda2.json".into(), Document::SemihoopState(SemihoopState::Weights(vec![r(2, 1)]))));
    out.push(("hyperstates/chang1_lambda2.json".into(), split(vec![r(1, 1)], vec![r(2, 1)])));
    out.push(("hyperstates/chang2_mixed.json".into(), split(vec![r(1, 1)], vec![r(1, 2), r(2, 1)])));
    out.push((
        "hyperstates/boolean4_x_chang1.json".into(),
        split(vec![r(1, 3), r(1, 6), r(1, 2)], vec![r(1, 1)]),
    ));
    out
}

fn write_corpus(dir: &Path) -> Result<Output> {
    let mut report = ValidationReport::new("corpus");
    let mut written = Vec::new();
    for (name, doc) in corpus_documents() {
        let path = dir.join(&name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let text = io::to_canonical(&io::document_to_value(&doc));
        std::fs::write(&path, &text)?;
        let again = io::to_canonical(&io::document_to_value(&io::read_document(&path)?));
        report.push(Check::fact(format!("roundtrip {name}"), again == text, "reprinted file differs", "original"));
        written.push(name);
    }
    Ok((report, json!({ "files": written })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_window() {
        let out = run(["ibpkit", "--window", "0", "corpus"]);
        assert_eq!(out.status, 2);
        assert!(out.stderr.contains("window"));
    }

    #[test]
    fn help_exits_zero() {
        let out = run(["ibpkit", "--help"]);
        assert_eq!(out.status, 0);
        assert!(out.stdout.contains("hyperstate"));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let out = run(["ibpkit", "validate", "/nonexistent/algebra.json"]);
        assert_eq!(out.status, 2);
        assert!(out.stdout.contains("\"error\""));
    }

    #[test]
    fn tsv_lists_one_check_per_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b2.json");
        let doc = Document::Algebra(corpus::finite(corpus::boolean(1)));
        std::fs::write(&path, io::to_canonical(&io::document_to_value(&doc))).unwrap();
        let out = run(["ibpkit".as_ref(), "validate".as_ref(), path.as_os_str(), "--format".as_ref(), "tsv".as_ref()]);
        assert_eq!(out.status, 0, "{}", out.stdout);
        for line in out.stdout.lines() {
            assert_eq!(line.split('\t').count(), 3, "{line}");
            assert!(line.split('\t').nth(1).unwrap() == "pass");
        }
    }
}
