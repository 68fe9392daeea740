//! Concrete reference models shipped with the crate, each stored as an
//! algebra file plus an expectation file, with a loader and a verifier.
//!
//! Every fixture records two layers of truth.  The `claim` lines carry the
//! advertised behaviour of the table — which laws it was stated to satisfy
//! or violate when it was catalogued.  The `[observed]` block freezes the
//! full evaluated law profile from the first oracle run and acts as a
//! regression baseline: [`verify_fixture`] recomputes it on every call and
//! any drift is an error.  Three tables are marked `defective=true`: their
//! advertised claims do not hold as printed, the mismatch is recorded here
//! on purpose, and the verifier checks that the defect is still present
//! rather than silently repaired.
//!
//! Fixture data is embedded in the binary.  Set the `BIMAGMA_FIXTURE_DIR`
//! environment variable (or use [`load_fixture_from`]) to read the same
//! file layout from disk instead, e.g. to test candidate replacements.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::algebra::{parse_algebra, Algebra, AlgebraParseError};
use crate::classes::registry;
use crate::search::{Dedup, SearchKind, SearchSpec};
use crate::term::{find_violation, Assignment, Identity};

/// Environment variable naming a directory to load fixtures from instead
/// of the embedded copies.
pub const FIXTURE_DIR_ENV: &str = "BIMAGMA_FIXTURE_DIR";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture `{id}`: {source}")]
    BadAlgebra {
        id: String,
        source: AlgebraParseError,
    },
    #[error("fixture `{id}` expectation line {line}: {reason}")]
    BadExpectation {
        id: String,
        line: usize,
        reason: String,
    },
    #[error("reading fixture `{id}`: {source}")]
    Io {
        id: String,
        source: std::io::Error,
    },
}

struct RawFixture {
    id: &'static str,
    alg: &'static str,
    expect: &'static str,
}

macro_rules! embedded_fixtures {
    ($($id:literal),+ $(,)?) => {
        &[$(RawFixture {
            id: $id,
            alg: include_str!(concat!("../data/fixtures/", $id, ".alg")),
            expect: include_str!(concat!("../data/fixtures/", $id, ".expect")),
        }),+]
    };
}

static EMBEDDED: &[RawFixture] = embedded_fixtures![
    "einv-not-comp2",
    "einv-not-comp1",
    "einv-not-B1",
    "reg-not-B2",
    "reg-not-reg2",
    "reg-not-B1",
    "str-not-B2",
    "str-not-str3",
    "str-not-B3",
    "str-not-B1",
    "indep-not-reginv1",
    "indep-not-B3",
    "indep-not-B1",
    "indep-not-B2",
    "indep-not-ir4",
    "cliffindep-not-invcase",
    "cliffindep-not-B3",
    "cliffindep-not-B2",
    "cliffindep-not-B1",
    "cliffindep-not-cr4",
    "replacement-not-B1",
    "band4",
];

/// A reference model with its advertised claims and frozen profile.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: String,
    pub algebra: Algebra,
    /// Advertised law verdicts, in file order.
    pub expected: Vec<(String, bool)>,
    /// Frozen full-profile regression values, in file order.
    pub observed: Vec<(String, bool)>,
    /// The `# provenance:` comment text from the expectation file.
    pub provenance: String,
    /// Whether no smaller table achieves the advertised separation.
    /// Absent for fixtures that do not claim a separation.
    pub minimal: Option<bool>,
    /// True when the advertised claims are known not to hold on the
    /// printed table; the mismatch itself is then the recorded value.
    pub defective: bool,
}

/// Identifiers of all embedded fixtures, in catalogue order.
pub fn all_fixture_ids() -> Vec<&'static str> {
    EMBEDDED.iter().map(|raw| raw.id).collect()
}

/// Loads a fixture by id — from `BIMAGMA_FIXTURE_DIR` when that variable
/// is set, otherwise from the embedded copies.
pub fn load_fixture(id: &str) -> Result<Fixture, FixtureError> {
    match std::env::var_os(FIXTURE_DIR_ENV) {
        Some(dir) => load_fixture_from(Path::new(&dir), id),
        None => {
            let raw = EMBEDDED
                .iter()
                .find(|raw| raw.id == id)
                .ok_or_else(|| FixtureError::UnknownFixture(id.to_string()))?;
            parse_fixture(id, raw.alg, raw.expect)
        }
    }
}

/// Loads `<dir>/<id>.alg` and `<dir>/<id>.expect`.
pub fn load_fixture_from(dir: &Path, id: &str) -> Result<Fixture, FixtureError> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
            id: id.to_string(),
            source,
        })
    };
    let alg = read(&dir.join(format!("{id}.alg")))?;
    let expect = read(&dir.join(format!("{id}.expect")))?;
    parse_fixture(id, &alg, &expect)
}

fn parse_fixture(id: &str, alg_text: &str, expect_text: &str) -> Result<Fixture, FixtureError> {
    let algebra = parse_algebra(alg_text).map_err(|source| FixtureError::BadAlgebra {
        id: id.to_string(),
        source,
    })?;

    let bad = |line: usize, reason: String| FixtureError::BadExpectation {
        id: id.to_string(),
        line,
        reason,
    };

    let mut provenance = String::new();
    let mut expected = Vec::new();
    let mut observed = Vec::new();
    let mut minimal = None;
    let mut defective = false;
    let mut in_observed = false;
    let mut seen: BTreeSet<(bool, String)> = BTreeSet::new();

    for (idx, line) in expect_text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(text) = rest.trim_start().strip_prefix("provenance:") {
                if !provenance.is_empty() {
                    provenance.push(' ');
                }
                provenance.push_str(text.trim());
            }
            continue;
        }
        if line == "[observed]" {
            if in_observed {
                return Err(bad(lineno, "duplicate [observed] section".to_string()));
            }
            in_observed = true;
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(lineno, format!("expected `name=value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let flag = match value {
            "true" => true,
            "false" => false,
            other => return Err(bad(lineno, format!("expected true or false, got {other:?}"))),
        };
        if !in_observed && key == "minimal" {
            minimal = Some(flag);
            continue;
        }
        if !in_observed && key == "defective" {
            defective = flag;
            continue;
        }
        if registry().get(key).is_none() {
            return Err(bad(lineno, format!("`{key}` is not a registered law")));
        }
        if !seen.insert((in_observed, key.to_string())) {
            return Err(bad(lineno, format!("duplicate entry for `{key}`")));
        }
        if in_observed {
            observed.push((key.to_string(), flag));
        } else {
            expected.push((key.to_string(), flag));
        }
    }

    if expected.is_empty() {
        return Err(bad(0, "no claim lines before [observed]".to_string()));
    }
    if !in_observed {
        return Err(bad(0, "missing [observed] section".to_string()));
    }

    Ok(Fixture {
        id: id.to_string(),
        algebra,
        expected,
        observed,
        provenance,
        minimal,
        defective,
    })
}

/// A recorded verdict that did not reproduce on evaluation.
#[derive(Debug, Clone)]
pub struct Mismatch {
    pub law: String,
    pub recorded: bool,
    pub actual: bool,
    /// First violating assignment when the law actually fails.
    pub violation: Option<Assignment>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: recorded {}, evaluates {}",
            self.law, self.recorded, self.actual
        )?;
        if let Some(v) = &self.violation {
            let parts: Vec<String> = v.iter().map(|(var, e)| format!("{var}={e}")).collect();
            write!(f, " (fails at {})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Outcome of re-evaluating one fixture against its recorded values.
#[derive(Debug, Clone)]
pub struct FixtureOutcome {
    pub id: String,
    pub defective: bool,
    /// Advertised claims that do not hold on the table.
    pub claim_mismatches: Vec<Mismatch>,
    /// Frozen profile entries that no longer reproduce.  Always a defect.
    pub observed_mismatches: Vec<Mismatch>,
}

impl FixtureOutcome {
    /// The frozen profile must reproduce exactly; the advertised claims
    /// must hold unless the fixture is marked defective, in which case
    /// they must still fail (a silently repaired defect is also drift).
    pub fn ok(&self) -> bool {
        self.observed_mismatches.is_empty()
            && (self.defective != self.claim_mismatches.is_empty())
    }
}

impl fmt::Display for FixtureOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            if self.defective {
                let laws: Vec<&str> =
                    self.claim_mismatches.iter().map(|m| m.law.as_str()).collect();
                write!(
                    f,
                    "{}: ok (recorded defect reproduced: {})",
                    self.id,
                    laws.join(", ")
                )
            } else {
                write!(f, "{}: ok", self.id)
            }
        } else {
            writeln!(f, "{}: MISMATCH", self.id)?;
            for m in &self.claim_mismatches {
                writeln!(f, "  claim {m}")?;
            }
            for m in &self.observed_mismatches {
                writeln!(f, "  observed {m}")?;
            }
            if self.defective && self.claim_mismatches.is_empty() {
                writeln!(f, "  marked defective but every claim now holds")?;
            }
            Ok(())
        }
    }
}

fn evaluate(id: &Identity, algebra: &Algebra) -> (bool, Option<Assignment>) {
    match find_violation(id, algebra) {
        Ok(Some(assignment)) => (false, Some(assignment)),
        Ok(None) => (true, None),
        Err(e) => unreachable!("fixture law {} on {:?}: {e}", id.name, algebra.kind()),
    }
}

/// Re-evaluates every recorded verdict of a fixture.
pub fn verify_fixture(fixture: &Fixture) -> FixtureOutcome {
    let reg = registry();
    let check = |entries: &[(String, bool)]| {
        let mut mismatches = Vec::new();
        for (name, recorded) in entries {
            let law = reg.get(name).expect("load_fixture validated law names");
            let (actual, violation) = evaluate(law, &fixture.algebra);
            if actual != *recorded {
                mismatches.push(Mismatch {
                    law: name.clone(),
                    recorded: *recorded,
                    actual,
                    violation,
                });
            }
        }
        mismatches
    };
    FixtureOutcome {
        id: fixture.id.clone(),
        defective: fixture.defective,
        claim_mismatches: check(&fixture.expected),
        observed_mismatches: check(&fixture.observed),
    }
}

/// Verification summary over a whole fixture set.
#[derive(Debug, Clone)]
pub struct FixtureReport {
    pub outcomes: Vec<FixtureOutcome>,
}

impl FixtureReport {
    pub fn ok(&self) -> bool {
        self.outcomes.iter().all(FixtureOutcome::ok)
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for outcome in &self.outcomes {
            writeln!(f, "{outcome}")?;
        }
        let good = self.outcomes.iter().filter(|o| o.ok()).count();
        write!(f, "{good}/{} fixtures reproduce their records", self.outcomes.len())
    }
}

/// Loads and re-evaluates every embedded fixture (or the directory
/// override when `BIMAGMA_FIXTURE_DIR` is set).
pub fn verify_all_fixtures() -> Result<FixtureReport, FixtureError> {
    let mut outcomes = Vec::new();
    for id in all_fixture_ids() {
        outcomes.push(verify_fixture(&load_fixture(id)?));
    }
    Ok(FixtureReport { outcomes })
}

/// Builds the bounded search that would rediscover this fixture: require
/// every law the fixture advertises as holding, forbid the single law it
/// advertises as failing.  `None` when the fixture does not advertise
/// exactly one failing law.
pub fn witness_spec(fixture: &Fixture, size: usize) -> Option<SearchSpec> {
    let reg = registry();
    let mut require = Vec::new();
    let mut forbid: Option<Identity> = None;
    for (name, value) in &fixture.expected {
        let law = reg.get(name).expect("load_fixture validated law names").clone();
        if *value {
            require.push(law);
        } else if forbid.replace(law).is_some() {
            return None;
        }
    }
    let forbid = forbid?;
    let kind = match &fixture.algebra {
        Algebra::UnarySemigroup(_) => SearchKind::UnarySemigroup,
        Algebra::Bimagma(_) => SearchKind::Bimagma,
    };
    Some(SearchSpec {
        kind,
        size,
        require,
        forbid: Some(forbid),
        dedup: Dedup::Iso,
    })
}
