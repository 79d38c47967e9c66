//! One line per acceptance criterion, run in order in a single test so that
//! the timings are not disturbed by other tests sharing the machine.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ibpkit::cli;
use ibpkit::cone::Cone;
use ibpkit::corpus;
use ibpkit::hypernum::Rational;
use ibpkit::ibp0::{validate_ibp0, Ibp0};
use ibpkit::io;
use ibpkit::lmonoid::{envelope_report, image_bound_report, k_envelope, LMonoid};
use ibpkit::scan::Window;
use ibpkit::semihoop::{
    enumerate_states_finite, state_identities, state_properties, state_to_kgroup_state, validate_state,
    AnySemihoop, Classification, ConeHoop, Semihoop, SemihoopState,
};
use ibpkit::report::Scope;
use ibpkit::states::{cancellative_form, join_hyperstate, lambda_family, split_hyperstate, sweep_family, ProbabilityMeasure, RadicalState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn family_entries() -> Vec<Rational> {
    vec![Rational::from(0), Rational::from(1), Rational::new(1, 2), Rational::from(2)]
}

fn family_window() -> Window {
    Window::new(8).with_budgets(50_000, 200_000)
}

fn variety_gate() -> Outcome {
    let started = Instant::now();
    let window = Window::default();
    let mut failures = Vec::new();
    let algebras = corpus::ibp0_corpus();
    for (name, a) in &algebras {
        if let Some(f) = a.validate(&window).first_failure() {
            failures.push(format!("{name}: {f}"));
        }
    }
    let luk = validate_ibp0(&corpus::lukasiewicz_chain(3), &window);
    let dl = luk.check("DL").cloned();
    let luk_ok = dl.as_ref().is_some_and(|c| c.failed() && c.witness.as_deref() == Some(&["1".to_string()][..]));
    let elapsed = started.elapsed();
    let passed = failures.is_empty() && luk_ok && elapsed < Duration::from_secs(10);
    outcome(
        passed,
        format!(
            "{} algebras, {} failures {:?}; lukasiewicz3 DL witness {:?}; {:.2}s (limit 10s)",
            algebras.len(),
            failures.len(),
            failures,
            dl.and_then(|c| c.witness),
            elapsed.as_secs_f64()
        ),
    )
}

fn envelopes() -> Outcome {
    let started = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, m) in corpus::lmonoid_corpus() {
        if m.size() > 4 {
            continue;
        }
        let m = LMonoid::Finite(m);
        let (group, emb) = k_envelope(&m);
        let report = envelope_report(&m, &group, &emb, &Window::default());
        if let Some(f) = report.first_failure() {
            failures.push(format!("{name}: {f}"));
        }
        checked += 1;
    }
    let elapsed = started.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(30),
        format!("{checked} monoids, failures {failures:?}; {:.2}s (limit 30s)", elapsed.as_secs_f64()),
    )
}

fn image_bounds() -> Outcome {
    let mut failures = Vec::new();
    let monoids = corpus::lmonoid_corpus();
    for (name, m) in &monoids {
        let m = LMonoid::Finite(m.clone());
        let (group, emb) = k_envelope(&m);
        if let Some(f) = image_bound_report(&m, &group, &emb, &Window::default()).first_failure() {
            failures.push(format!("{name}: {f}"));
        }
    }
    outcome(failures.is_empty(), format!("{} monoids, failures {failures:?}", monoids.len()))
}

fn state_triviality() -> Outcome {
    let mut failures = Vec::new();
    let hoops = corpus::semihoop_corpus();
    for (name, h) in &hoops {
        match enumerate_states_finite(h) {
            Ok(states) if states.len() == 1 && states[0].is_zero() => {}
            Ok(states) => failures.push(format!("{name}: {} states", states.len())),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    outcome(failures.is_empty(), format!("{} semihoops, failures {failures:?}", hoops.len()))
}

fn random_lambda(rng: &mut ChaCha8Rng, rank: usize) -> Vec<Rational> {
    (0..rank).map(|_| Rational::new(rng.gen_range(0..=12), rng.gen_range(1..=6))).collect()
}

fn random_cone(rng: &mut ChaCha8Rng, rank: usize) -> Cone {
    let exps: Vec<u32> = (0..rank).map(|_| rng.gen_range(0..=20)).collect();
    Cone::new(&exps)
}

fn cone_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let window = Window::default();
    let mut failures = Vec::new();
    let mut instances = 0;
    for rank in 1..=3 {
        let h = ConeHoop::new(rank);
        let any = AnySemihoop::Cone(h);
        let class = Classification::from_report(&any.validate(&window));
        if !class.divisible || !class.basic || !class.prelinear {
            failures.push(format!("cone{rank} classified as {class:?}"));
        }
        for _ in 0..20 {
            let lambda = random_lambda(&mut rng, rank);
            let w = SemihoopState::Weights(lambda.clone());
            let at = |m: &Cone| w.at_cone(m).unwrap();
            let mut pairs = Vec::with_capacity(30_000);
            for _ in 0..10_000 {
                let (x, y, z) = (random_cone(&mut rng, rank), random_cone(&mut rng, rank), random_cone(&mut rng, rank));
                pairs.push((x, y));
                pairs.push((y, z));
                pairs.push((h.mul(&x, &y), z));
            }
            instances += pairs.len();
            let report = state_identities(&h, at, class, &pairs, Scope::Sampled(pairs.len()));
            if let Some(f) = report.first_failure() {
                failures.push(format!("cone{rank} {lambda:?}: {f}"));
            }
        }
        for lambda in lambda_family(rank, &family_entries()) {
            let w = SemihoopState::Weights(lambda.clone());
            let valid = validate_state(&any, &w, &window).unwrap();
            let props = state_properties(&any, &w, &window).unwrap();
            if !valid.passes("v3") || !props.passes("v3 redundant") {
                failures.push(format!("cone{rank} {lambda:?}: not monotone"));
            }
        }
    }
    outcome(failures.is_empty(), format!("{instances} pairs from random triples, failures {failures:?}"))
}

fn envelope_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let window = Window::default();
    let mut failures = Vec::new();
    for rank in 1..=3 {
        let h = AnySemihoop::Cone(ConeHoop::new(rank));
        for i in 0..20 {
            let w = SemihoopState::Weights(random_lambda(&mut rng, rank));
            match state_to_kgroup_state(&h, &w, &window, 1000, i) {
                Ok(r) if r.report.is_valid() => {}
                Ok(r) => failures.push(format!("cone{rank}: {}", r.report.first_failure().unwrap())),
                Err(e) => failures.push(format!("cone{rank}: {e}")),
            }
        }
    }
    outcome(failures.is_empty(), format!("60 instances, failures {failures:?}"))
}

struct SweepTotals {
    members: usize,
    accepted: usize,
    rejected: usize,
    split_failures: Vec<String>,
    property_failures: Vec<String>,
    errors: Vec<String>,
}

fn sweep() -> SweepTotals {
    let mut totals = SweepTotals {
        members: 0,
        accepted: 0,
        rejected: 0,
        split_failures: Vec::new(),
        property_failures: Vec::new(),
        errors: Vec::new(),
    };
    for (name, a) in corpus::ibp0_corpus() {
        let result = Ibp0::new(a, family_window()).and_then(|ibp| sweep_family(&ibp, 6, &family_entries()));
        match result {
            Ok(r) => {
                totals.members += r.members;
                totals.accepted += r.accepted;
                totals.rejected += r.rejected.len();
                totals.split_failures.extend(r.split_failures.iter().map(|f| format!("{name}: {f}")));
                totals.property_failures.extend(r.property_failures.iter().map(|f| format!("{name}: {f}")));
                if r.accepted == 0 {
                    totals.errors.push(format!("{name}: no member joins to a hyperstate"));
                }
            }
            Err(e) => totals.errors.push(format!("{name}: {e}")),
        }
    }
    totals
}

fn split_family(t: &SweepTotals) -> Outcome {
    outcome(
        t.split_failures.is_empty() && t.errors.is_empty(),
        format!(
            "{} members, {} valid, {} rejected by join validation; split failures {:?}; errors {:?}",
            t.members, t.accepted, t.rejected, t.split_failures, t.errors
        ),
    )
}

fn property_suite(t: &SweepTotals) -> Outcome {
    outcome(
        t.property_failures.is_empty() && t.errors.is_empty(),
        format!("{} valid hyperstates; property failures {:?}", t.accepted, t.property_failures),
    )
}

fn cancellative_forms() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for rank in 1..=2 {
        let ibp = Ibp0::new(corpus::chang(rank), Window::default()).unwrap();
        let measure = ProbabilityMeasure::uniform(ibp.skeleton().atoms().len());
        for lambda in lambda_family(rank, &family_entries()) {
            let state = RadicalState::from_lambda(&ibp, &lambda).unwrap();
            let (s, report) = join_hyperstate(&ibp, &measure, &state).unwrap();
            if !report.is_valid() {
                failures.push(format!("chang{rank} {lambda:?}: join {}", report.first_failure().unwrap()));
                continue;
            }
            let form = cancellative_form(&ibp, &s, 1000, 7).and_then(|f| Ok((f, split_hyperstate(&ibp, &s)?)));
            match form {
                Ok((f, split)) if f.report.is_valid() && f.measure == split.measure => checked += 1,
                Ok((f, _)) => failures.push(format!("chang{rank} {lambda:?}: {:?}", f.report.first_failure())),
                Err(e) => failures.push(format!("chang{rank} {lambda:?}: {e}")),
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} hyperstates, failures {failures:?}"))
}

fn corpus_files(dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            corpus_files(&path, out);
        } else if path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
}

fn cli_contract() -> Outcome {
    let root = repo_root();
    let mut files = Vec::new();
    corpus_files(&root.join("corpus"), &mut files);
    let mut failures = Vec::new();
    for path in &files {
        let text = std::fs::read_to_string(path).unwrap();
        match io::parse_document(&text) {
            Ok(doc) if io::to_canonical(&io::document_to_value(&doc)) == text => {}
            Ok(_) => failures.push(format!("{} reprints differently", path.display())),
            Err(e) => failures.push(format!("{}: {e}", path.display())),
        }
    }
    let fixtures = root.join("crates/core/tests/fixtures");
    let fixture = |name: &str| fixtures.join(name).to_string_lossy().into_owned();
    let boolean2 = root.join("corpus/algebras/boolean2.json").to_string_lossy().into_owned();
    let planted = [
        (vec!["validate".to_string(), "--ibp0".into(), fixture("lukasiewicz3.json")], 1),
        (vec!["validate".to_string(), fixture("out_of_range.json")], 2),
        (vec!["hyperstate".to_string(), "validate".into(), boolean2, fixture("zero_hyperstate.json")], 1),
    ];
    for (args, expected) in &planted {
        let out = cli::run(std::iter::once("ibpkit".to_string()).chain(args.iter().cloned()));
        if out.status != *expected {
            failures.push(format!("{args:?} exited {} instead of {expected}", out.status));
        }
    }
    outcome(
        failures.is_empty() && !files.is_empty(),
        format!("{} corpus files, 3 planted fixtures; failures {failures:?}", files.len()),
    )
}

#[test]
fn acceptance() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "variety gate", variety_gate()),
        (2, "Grothendieck envelope", envelopes()),
        (3, "image bounds", image_bounds()),
        (4, "finite state triviality", state_triviality()),
        (5, "cone state identities", cone_identities()),
        (6, "envelope state roundtrip", envelope_roundtrip()),
    ];
    let totals = sweep();
    results.push((7, "split on the hyperstate family", split_family(&totals)));
    results.push((8, "hyperstate property suite", property_suite(&totals)));
    results.push((9, "cancellative form", cancellative_forms()));
    results.push((10, "CLI roundtrip and exit status", cli_contract()));

    let mut out = std::io::stderr().lock();
    for (n, name, o) in &results {
        let _ = writeln!(
            out,
            "criterion {n:>2} {}: {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<u32> = results.iter().filter(|(_, _, o)| !o.passed).map(|(n, _, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
