//! Command-line front end for the workbench.
//!
//! Six subcommands: `check` evaluates identities on a table, `classify`
//! prints the full law/class profile, `convert` maps between the two
//! signatures, `search` enumerates models under constraints, `prove`
//! replays a derivation-chain file, and `verify-paper` runs the whole
//! battery — fixtures, conversion roundtrips, class equivalences,
//! structural lemmas, independence witnesses, and the bundled proof
//! corpus — printing one machine-readable `<check-id> PASS|FAIL <detail>`
//! line per check plus a traceability table.
//!
//! Exit status: 0 when every requested verdict holds, 1 when some check
//! fails, 2 on operational errors (unreadable files, unknown names,
//! bounds beyond the supported range).

use bimagma::algebra::{parse_algebra, Algebra};
use bimagma::classes::{
    check_doubleprime_lemma, check_equivalence, check_inverse_sufficiency, class_table,
    classify_bimagma, classify_semigroup, registry,
};
use bimagma::fixtures::{all_fixture_ids, load_fixture, verify_all_fixtures, witness_spec, Fixture, FIXTURE_DIR_ENV};
use bimagma::functors::{roundtrip_check, to_division_bimagma, to_unary_semigroup, FunctorError};
use bimagma::proof::{check_soundness, check_suite, paper_suites, parse_suite, run_paper_suite, Verdict};
use bimagma::search::{
    enumerate, enumerate_with_limit, find_witness, size_bound, Dedup, SearchKind, SearchSpec,
};
use bimagma::term::{find_violation, parse_identity, Identity};
use clap::{Parser, Subcommand, ValueEnum};
use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bimagma",
    version,
    about = "Workbench for finite unary semigroups and their division bimagmas"
)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Load fixtures from this directory instead of the embedded copies.
    #[arg(long, global = true, value_name = "DIR")]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate identities on an algebra file, reporting violating assignments.
    Check {
        /// Algebra file (`unary_semigroup N` or `bimagma N` table format).
        file: PathBuf,

        /// A registry name (`B1`, `I3`, ...) or literal identity text
        /// (`x*y = y*x`). Repeatable.
        #[arg(long = "identity", value_name = "NAME-OR-TEXT", required = true)]
        identities: Vec<String>,
    },

    /// Print the law and class profile of an algebra file.
    Classify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,

        /// Restrict the report to these laws or classes (comma separated).
        #[arg(long, value_name = "NAMES", value_delimiter = ',')]
        axioms: Vec<String>,
    },

    /// Convert a unary semigroup to its division bimagma or back.
    Convert {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,

        #[arg(long, value_enum)]
        direction: ConvertDirection,

        /// Output file (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Enumerate models of one size under identity constraints.
    Search {
        #[arg(long, value_enum)]
        kind: KindArg,

        /// Number of elements.
        #[arg(long, value_name = "N")]
        size: usize,

        /// Identities every model must satisfy (names or literal text,
        /// comma separated).
        #[arg(long, value_name = "NAMES", value_delimiter = ',')]
        require: Vec<String>,

        /// Identity every model must violate.
        #[arg(long, value_name = "NAME-OR-TEXT")]
        forbid: Option<String>,

        #[arg(long, value_enum, default_value_t = DedupArg::Iso)]
        dedup: DedupArg,

        /// Stop once this many surviving models have been collected.
        #[arg(long, value_name = "K")]
        limit: Option<usize>,

        /// Write the models into this directory as numbered `.alg` files.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },

    /// Replay every derivation chain in a proof-suite file.
    Prove {
        #[arg(long, value_name = "FILE")]
        suite: PathBuf,
    },

    /// Re-derive every mechanically checkable claim and print a
    /// traceability table.
    #[command(name = "verify-paper")]
    VerifyPaper {
        /// Size bound for the enumeration sweeps.
        #[arg(long, value_name = "N", default_value_t = 3)]
        bound: usize,

        /// Push the expensive witness searches one size further.
        #[arg(long)]
        deep: bool,

        /// Also write the machine-readable summary to `<DIR>/summary.txt`.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertDirection {
    /// Divisions from a multiplication table: x\y = x'*y, x/y = x*y'.
    ToBimagma,
    /// Recover multiplication and the unary operation from divisions.
    ToSemigroup,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// Multiplication tables only (reported with the identity map for ').
    Semigroup,
    /// Multiplication plus an arbitrary unary operation.
    UnarySemigroup,
    /// Two division tables, no laws assumed.
    Bimagma,
}

impl From<KindArg> for SearchKind {
    fn from(k: KindArg) -> SearchKind {
        match k {
            KindArg::Semigroup => SearchKind::Semigroup,
            KindArg::UnarySemigroup => SearchKind::UnarySemigroup,
            KindArg::Bimagma => SearchKind::Bimagma,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DedupArg {
    /// Keep every table.
    None,
    /// One representative per isomorphism class.
    Iso,
    /// Collapse anti-isomorphic tables as well.
    IsoAnti,
}

impl From<DedupArg> for Dedup {
    fn from(d: DedupArg) -> Dedup {
        match d {
            DedupArg::None => Dedup::None,
            DedupArg::Iso => Dedup::Iso,
            DedupArg::IsoAnti => Dedup::IsoAntiIso,
        }
    }
}

/// `Ok(true)` = every check holds (exit 0), `Ok(false)` = a verdict
/// failed (exit 1), `Err` = operational problem (exit 2).
type CmdResult = Result<bool, Box<dyn Error>>;

fn main() -> ExitCode {
    // Die silently on a closed pipe (`bimagma search ... | head`) instead
    // of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(dir) = &cli.fixtures {
        std::env::set_var(FIXTURE_DIR_ENV, dir);
    }

    let outcome = match &cli.command {
        Command::Check { file, identities } => cmd_check(file, identities),
        Command::Classify { input, axioms } => cmd_classify(input, axioms),
        Command::Convert { input, direction, out } => cmd_convert(input, *direction, out.as_deref()),
        Command::Search { kind, size, require, forbid, dedup, limit, out } => cmd_search(
            (*kind).into(),
            *size,
            require,
            forbid.as_deref(),
            (*dedup).into(),
            *limit,
            out.as_deref(),
        ),
        Command::Prove { suite } => cmd_prove(suite),
        Command::VerifyPaper { bound, deep, out } => cmd_verify_paper(*bound, *deep, out.as_deref()),
    };

    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_algebra(path: &Path) -> Result<Algebra, Box<dyn Error>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_algebra(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

/// Registry names take precedence; anything else must parse as identity
/// text in the term grammar.
fn resolve_identity(text: &str) -> Result<Identity, Box<dyn Error>> {
    if let Some(id) = registry().get(text) {
        return Ok(id.clone());
    }
    parse_identity(text, text)
        .map_err(|e| format!("`{text}` is neither a registry name nor a parsable identity: {e}").into())
}

fn cmd_check(file: &Path, identities: &[String]) -> CmdResult {
    let alg = read_algebra(file)?;
    let ids = identities
        .iter()
        .map(|s| resolve_identity(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut all_hold = true;
    for id in &ids {
        match find_violation(id, &alg) {
            Ok(None) => println!("{}: true", id.name),
            Ok(Some(witness)) => {
                all_hold = false;
                let binds = witness
                    .iter()
                    .map(|(v, e)| format!("{v}={e}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                println!("{}: false  ({binds})", id.name);
            }
            Err(e) => return Err(format!("{}: {e}", id.name).into()),
        }
    }
    Ok(all_hold)
}

fn cmd_classify(input: &Path, axioms: &[String]) -> CmdResult {
    let alg = read_algebra(input)?;
    let profile = match &alg {
        Algebra::UnarySemigroup(s) => classify_semigroup(s),
        Algebra::Bimagma(b) => classify_bimagma(b),
    };
    println!("{} of size {}", alg.kind(), alg.size());
    if axioms.is_empty() {
        println!("laws:");
        for name in registry().names() {
            if let Some(v) = profile.get(name) {
                println!("  {name} = {v}");
            }
        }
        for name in ["I4", "tech"] {
            if let Some(v) = profile.get(name) {
                println!("  {name} = {v}");
            }
        }
        println!("classes:");
        for class in class_table() {
            if let Some(v) = profile.get(class.name) {
                println!("  {} = {v}", class.name);
            }
        }
    } else {
        for name in axioms {
            match profile.get(name.as_str()) {
                Some(v) => println!("  {name} = {v}"),
                None => {
                    return Err(format!(
                        "`{name}` is not a law or class with a reading on a {}",
                        alg.kind()
                    )
                    .into())
                }
            }
        }
    }
    Ok(true)
}

fn cmd_convert(input: &Path, direction: ConvertDirection, out: Option<&Path>) -> CmdResult {
    let alg = read_algebra(input)?;
    let converted = match (direction, &alg) {
        (ConvertDirection::ToBimagma, Algebra::UnarySemigroup(s)) => {
            Algebra::Bimagma(to_division_bimagma(s))
        }
        (ConvertDirection::ToBimagma, Algebra::Bimagma(_)) => {
            return Err("input is already a bimagma; `--direction to-bimagma` expects a unary semigroup".into())
        }
        (ConvertDirection::ToSemigroup, Algebra::Bimagma(b)) => match to_unary_semigroup(b) {
            Ok(s) => Algebra::UnarySemigroup(s),
            Err(FunctorError::IllDefined(report)) => {
                println!("{report}");
                return Ok(false);
            }
            Err(e @ FunctorError::NonAssociative { .. }) => {
                println!("{e}");
                return Ok(false);
            }
        },
        (ConvertDirection::ToSemigroup, Algebra::UnarySemigroup(_)) => {
            return Err("input is already a unary semigroup; `--direction to-semigroup` expects a bimagma".into())
        }
    };
    match out {
        Some(path) => {
            fs::write(path, converted.to_file_string()).map_err(|e| format!("{}: {e}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", converted.to_file_string()),
    }
    Ok(true)
}

fn cmd_search(
    kind: SearchKind,
    size: usize,
    require: &[String],
    forbid: Option<&str>,
    dedup: Dedup,
    limit: Option<usize>,
    out: Option<&Path>,
) -> CmdResult {
    let require = require
        .iter()
        .map(|s| resolve_identity(s))
        .collect::<Result<Vec<_>, _>>()?;
    let forbid = forbid.map(resolve_identity).transpose()?;
    let spec = SearchSpec { kind, size, require, forbid, dedup };
    let result = match limit {
        Some(k) => enumerate_with_limit(&spec, k)?,
        None => enumerate(&spec)?,
    };
    println!(
        "models: {}   raw tables: {}   exhausted: {}",
        result.models.len(),
        result.count_raw,
        if result.exhausted { "yes" } else { "no (stopped at limit)" }
    );
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            for (i, model) in result.models.iter().enumerate() {
                let path = dir.join(format!("model-{i:03}.alg"));
                fs::write(&path, model.to_file_string()).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            println!("wrote {} file(s) to {}", result.models.len(), dir.display());
        }
        None => {
            for (i, model) in result.models.iter().enumerate() {
                println!();
                println!("# model {i}");
                print!("{}", model.to_file_string());
            }
        }
    }
    Ok(true)
}

fn cmd_prove(path: &Path) -> CmdResult {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("suite")
        .to_string();
    let suite = parse_suite(&name, &text)?;
    let report = check_suite(&suite);
    print!("{report}");
    Ok(report.ok())
}

// ---------------------------------------------------------------------------
// verify-paper
// ---------------------------------------------------------------------------

struct CheckLine {
    id: String,
    pass: bool,
    detail: String,
}

/// Collects check outcomes, echoing each as a machine-readable line the
/// moment it is recorded, so the output order is the execution order.
#[derive(Default)]
struct Battery {
    checks: Vec<CheckLine>,
}

impl Battery {
    fn record(&mut self, id: impl Into<String>, pass: bool, detail: impl Into<String>) {
        let line = CheckLine { id: id.into(), pass, detail: detail.into() };
        println!("{} {} {}", line.id, if line.pass { "PASS" } else { "FAIL" }, line.detail);
        self.checks.push(line);
    }

    fn failures(&self) -> Vec<&CheckLine> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn cmd_verify_paper(bound: usize, deep: bool, out: Option<&Path>) -> CmdResult {
    if bound == 0 {
        return Err("--bound must be at least 1".into());
    }
    let mut battery = Battery::default();

    stage_fixtures(&mut battery)?;
    stage_roundtrips(&mut battery, bound)?;
    stage_equivalences(&mut battery, bound)?;
    stage_structural_lemmas(&mut battery, bound)?;
    stage_tamura_converse(&mut battery, bound, deep)?;
    stage_independence(&mut battery, bound)?;
    stage_proofs(&mut battery)?;
    stage_soundness(&mut battery, bound)?;

    print_traceability(&battery);

    let failures = battery.failures();
    println!();
    if failures.is_empty() {
        println!("result: PASS ({} checks)", battery.checks.len());
    } else {
        println!(
            "result: FAIL ({} of {} checks failed; first: {})",
            failures.len(),
            battery.checks.len(),
            failures[0].id
        );
    }

    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let mut text = String::new();
        for c in &battery.checks {
            let _ = writeln!(text, "{} {} {}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.detail);
        }
        let _ = writeln!(
            text,
            "result: {}",
            if failures.is_empty() { "PASS" } else { "FAIL" }
        );
        let path = dir.join("summary.txt");
        fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }

    Ok(failures.is_empty())
}

fn stage_fixtures(battery: &mut Battery) -> Result<(), Box<dyn Error>> {
    let report = verify_all_fixtures()?;
    let detail = if report.ok() {
        format!("{} fixtures verified", report.outcomes.len())
    } else {
        let bad: Vec<&str> = report
            .outcomes
            .iter()
            .filter(|o| !o.ok())
            .map(|o| o.id.as_str())
            .collect();
        format!("mismatched: {}", bad.join(", "))
    };
    battery.record("fixtures", report.ok(), detail);
    Ok(())
}

/// Under the weak laws both conversions are mutually inverse on the nose;
/// sweep each side and replay the roundtrip on every model.
fn stage_roundtrips(battery: &mut Battery, bound: usize) -> Result<(), Box<dyn Error>> {
    let sides: [(&str, SearchKind, &[&str]); 2] = [
        ("roundtrip/semigroup", SearchKind::UnarySemigroup, &["I1", "tech-left", "tech-right"]),
        ("roundtrip/bimagma", SearchKind::Bimagma, &["B1", "comp1", "comp2"]),
    ];
    for (id, kind, laws) in sides {
        let require = registry().resolve(laws)?;
        let top = bound.min(size_bound(kind, true));
        let mut checked = 0usize;
        let mut failures = 0usize;
        for n in 1..=top {
            let spec = SearchSpec {
                kind,
                size: n,
                require: require.clone(),
                forbid: None,
                dedup: Dedup::Iso,
            };
            for model in &enumerate(&spec)?.models {
                checked += 1;
                if !matches!(roundtrip_check(model), Ok(true)) {
                    failures += 1;
                }
            }
        }
        let detail = if failures == 0 {
            format!("{checked} models round-trip (sizes <= {top})")
        } else {
            format!("{failures} of {checked} models fail to round-trip")
        };
        battery.record(id, failures == 0, detail);
    }
    Ok(())
}

fn stage_equivalences(battery: &mut Battery, bound: usize) -> Result<(), Box<dyn Error>> {
    for class in class_table() {
        let report = check_equivalence(class, bound)?;
        let id = format!("equivalence/{}", class.name.replace(' ', "-"));
        let detail = if report.ok() {
            format!(
                "{} semigroups, {} division models",
                report.semigroups_checked, report.bimagmas_checked
            )
        } else {
            format!("{} counterexample(s); first: {}", report.failures.len(), report.failures[0])
        };
        battery.record(id, report.ok(), detail);
    }
    Ok(())
}

fn stage_structural_lemmas(battery: &mut Battery, bound: usize) -> Result<(), Box<dyn Error>> {
    let top = bound.min(size_bound(SearchKind::UnarySemigroup, true));
    let dp = check_doubleprime_lemma(top)?;
    battery.record(
        "doubleprime",
        dp.ok(),
        if dp.ok() {
            format!("{} models: I3 holds exactly on the regular ones", dp.checked)
        } else {
            format!("{} violation(s)", dp.violations.len())
        },
    );
    let inv = check_inverse_sufficiency(top)?;
    battery.record(
        "inverse-sufficiency",
        inv.ok(),
        if inv.ok() {
            format!("{} models of {{I2, I3, I8}} all satisfy I1 and I6", inv.checked)
        } else {
            format!("{} violation(s)", inv.violations.len())
        },
    );
    Ok(())
}

/// Every small model of {T1, T2, T3} must satisfy T4; the general claim is
/// not finitely checkable, so the bundled derivation chains carry it and
/// this search hunts for finite counterexamples.
fn stage_tamura_converse(battery: &mut Battery, bound: usize, deep: bool) -> Result<(), Box<dyn Error>> {
    let require = registry().resolve(&["T1", "T2", "T3"])?;
    let t4 = registry().get("T4").expect("T4 registered").clone();
    let mut top = bound.min(3);
    if deep {
        top += 1;
    }
    let top = top.min(size_bound(SearchKind::Bimagma, true));
    let mut counterexample = None;
    for n in 1..=top {
        let spec = SearchSpec {
            kind: SearchKind::Bimagma,
            size: n,
            require: require.clone(),
            forbid: Some(t4.clone()),
            dedup: Dedup::Iso,
        };
        if find_witness(&spec)?.is_some() {
            counterexample = Some(n);
            break;
        }
    }
    battery.record(
        "tamura-converse",
        counterexample.is_none(),
        match counterexample {
            None => format!("no model through size {top} violates T4"),
            Some(n) => format!("counterexample at size {n}"),
        },
    );
    Ok(())
}

/// Rediscover every advertised separation: a witness isomorphic to the
/// fixture at its own size, and the advertised minimality verdict below.
fn stage_independence(battery: &mut Battery, bound: usize) -> Result<(), Box<dyn Error>> {
    // An explicitly degenerate bound caps this stage too, so `--bound 1`
    // stays trivially fast; at the default and above, each fixture is
    // checked at its own intrinsic size.
    let cap = if bound < 3 { bound } else { usize::MAX };
    for id in all_fixture_ids() {
        let fixture = load_fixture(id)?;
        let Some(minimal) = fixture.minimal else { continue };
        let size = fixture.algebra.size();
        if size > cap {
            continue;
        }
        let (pass, detail) = rediscover(&fixture, minimal)?;
        battery.record(format!("independence/{id}"), pass, detail);
    }
    Ok(())
}

fn rediscover(fixture: &Fixture, minimal: bool) -> Result<(bool, String), Box<dyn Error>> {
    let size = fixture.algebra.size();
    let spec = witness_spec(fixture, size)
        .ok_or_else(|| format!("fixture {} does not advertise a single violated law", fixture.id))?;
    let target = fixture.algebra.canonical_form();

    // Exhaustive enumeration is cheap through size 4. At size 5 a single
    // witness is found instead and compared directly: the constrained
    // space there has one isomorphism class (established by a one-off
    // exhaustive run), so any witness must be the fixture itself.
    let found_iso = if size <= 4 {
        enumerate(&spec)?
            .models
            .iter()
            .any(|m| m.canonical_form().bytes == target.bytes)
    } else {
        match find_witness(&spec)? {
            Some(m) => m.canonical_form().bytes == target.bytes,
            None => false,
        }
    };
    if !found_iso {
        return Ok((false, format!("no witness isomorphic to the fixture at size {size}")));
    }

    let mut smaller = None;
    for s in 1..size {
        let sub = SearchSpec { size: s, ..spec.clone() };
        if find_witness(&sub)?.is_some() {
            smaller = Some(s);
            break;
        }
    }

    Ok(match (minimal, smaller) {
        (true, None) => (true, format!("witness at size {size}; none smaller")),
        (true, Some(s)) => (false, format!("advertised minimal, but a witness exists at size {s}")),
        (false, Some(s)) => (true, format!("witness at size {size}; smaller witness at size {s} as advertised")),
        (false, None) => (false, "advertised non-minimal, but no smaller witness was found".to_string()),
    })
}

fn stage_proofs(battery: &mut Battery) -> Result<(), Box<dyn Error>> {
    let report = run_paper_suite()?;
    let detail = if report.ok() {
        format!("{} proofs, {} steps, all accepted", report.proofs(), report.steps())
    } else {
        let mut first = String::from("rejection");
        'outer: for suite in &report.suites {
            for check in &suite.checks {
                if let Verdict::Rejected { step, .. } = &check.verdict {
                    first = format!("first rejection: {}/{} step {}", suite.suite, check.name, step);
                    break 'outer;
                }
            }
        }
        first
    };
    battery.record("proofs", report.ok(), detail);
    Ok(())
}

fn stage_soundness(battery: &mut Battery, bound: usize) -> Result<(), Box<dyn Error>> {
    for suite in paper_suites()? {
        let report = check_soundness(&suite, bound.min(3))?;
        let detail = if report.ok() {
            format!(
                "{} models, {} fixtures agree with every goal",
                report.models_checked, report.fixtures_checked
            )
        } else {
            format!("{} violation(s); first: {}", report.violations.len(), report.violations[0])
        };
        battery.record(format!("soundness/{}", suite.name), report.ok(), detail);
    }
    Ok(())
}

fn print_traceability(battery: &Battery) {
    let groups: &[(&str, &str)] = &[
        ("fixtures", "fixture tables reproduce their advertised law profiles"),
        ("roundtrip/", "the two conversions are mutually inverse under the weak laws"),
        ("equivalence/", "each semigroup class matches its division basis on every small model"),
        ("doubleprime", "the double-prime law is equivalent to regularity over the weak-law sweep"),
        ("inverse-sufficiency", "I2, I3 and I8 alone force the full inverse profile"),
        ("tamura-converse", "no small model of {T1, T2, T3} violates T4"),
        ("independence/", "every advertised separation is rediscovered by bounded search"),
        ("proofs", "every bundled derivation chain replays without gaps"),
        ("soundness/", "accepted chains hold on all small models of their hypotheses"),
    ];
    println!();
    println!("traceability:");
    for (prefix, claim) in groups {
        let matching: Vec<&CheckLine> = battery
            .checks
            .iter()
            .filter(|c| c.id == *prefix || (prefix.ends_with('/') && c.id.starts_with(prefix)))
            .collect();
        if matching.is_empty() {
            continue;
        }
        let pass = matching.iter().all(|c| c.pass);
        println!(
            "  {:<72} {:>2} check{}  {}",
            claim,
            matching.len(),
            if matching.len() == 1 { " " } else { "s" },
            if pass { "PASS" } else { "FAIL" }
        );
    }
}
