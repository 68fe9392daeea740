//! Step-checked equational derivations.
//!
//! A [`Proof`] is a straight-line rewrite chain: it starts at the left side
//! of its goal and applies one named rule per step — a hypothesis from the
//! axiom [`registry`](crate::classes::registry), a lemma proven earlier in
//! the same [`ProofSuite`], or (when the hypotheses justify it) one of the
//! two recovery laws `prime-def-L` / `prime-def-R`. Each step names the rule,
//! a direction, the position of the redex as a path of child indices, and an
//! explicit substitution for every variable of the rule; the checker is a
//! verifier, not a prover, so nothing is inferred. The resulting term of each
//! step is recorded in the suite file and re-checked, which keeps the files
//! readable as ordinary equational derivations.
//!
//! Suites are checked in order and a proof may only cite lemmas that appear
//! before it, so a well-formed suite is acyclic by construction. The bundled
//! suites ([`run_paper_suite`]) cover the derivations behind every class
//! correspondence in [`class_table`](crate::classes::class_table) that needs
//! one, ending in the quotient-swap law T4 for the triple basis.

use crate::classes::{registry, ClassError};
use crate::fixtures::{self, FixtureError};
use crate::search::{self, Dedup, SearchError, SearchKind, SearchSpec};
use crate::term::{self, parse_identity, parse_term, Identity, Term};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Which way a rule is read: `l2r` rewrites an instance of the left side
/// into the right side, `r2l` the reverse.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::LeftToRight => "l2r",
            Direction::RightToLeft => "r2l",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// One rewrite in a chain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofStep {
    /// Name of the rule being applied.
    pub rule: String,
    pub direction: Direction,
    /// Root-to-leaf path of child indices locating the redex; empty = root.
    pub position: Vec<usize>,
    /// Binding for every variable of the rule, given explicitly.
    pub substitution: BTreeMap<char, Term>,
    /// The term the chain reaches after this step, as recorded in the file.
    pub expect: Term,
    /// Marks a step that was interpolated to make a compressed derivation
    /// fully explicit. Checked exactly like any other step.
    pub synthetic: bool,
}

/// A named straight-line derivation of `goal` from `hypotheses`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Proof {
    pub name: String,
    /// Registry names of the laws this proof may assume.
    pub hypotheses: Vec<String>,
    pub goal: Identity,
    pub steps: Vec<ProofStep>,
}

/// An ordered collection of proofs; later proofs may cite earlier ones.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofSuite {
    pub name: String,
    pub proofs: Vec<Proof>,
}

/// Why a single step (or the chain as a whole) is not acceptable.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum StepError {
    #[error("unknown rule `{0}` (not a hypothesis, not proven earlier)")]
    UnknownRule(String),
    #[error("`{rule}` needs B1 among the hypotheses or the lemma `same` proven earlier")]
    PrimeDefUnavailable { rule: String },
    #[error("no subterm at position {position}")]
    BadPosition { position: String },
    #[error("substitution does not bind `{0}`, a variable of the rule")]
    MissingBinding(char),
    #[error("substitution binds `{0}`, which is not a variable of the rule")]
    ExtraBinding(char),
    #[error("`{rule}` does not match at {position}: found `{found}`, instantiated side is `{want}`")]
    NoMatch {
        rule: String,
        position: String,
        found: String,
        want: String,
    },
    #[error("recorded result `{recorded}` differs from the actual result `{got}`")]
    ResultMismatch { got: String, recorded: String },
    #[error("chain stops at `{reached}` but the goal's right side is `{goal}`")]
    GoalNotReached { reached: String, goal: String },
}

/// Outcome of checking one proof. `step` is 1-based; step 0 marks a
/// structural problem (an unknown hypothesis, or an empty chain that does
/// not already equal its goal).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Accepted,
    Rejected { step: usize, reason: StepError },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected { step, reason } => {
                write!(f, "rejected at step {step}: {reason}")
            }
        }
    }
}

/// One row of a [`SuiteReport`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofCheck {
    pub name: String,
    pub steps: usize,
    pub verdict: Verdict,
}

/// Result of checking a suite in order. Checking aborts at the first
/// rejection, so `checks` can be shorter than `total` — `ok` is true only
/// if every proof was reached and accepted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub total: usize,
    pub checks: Vec<ProofCheck>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.len() == self.total && self.checks.iter().all(|c| c.verdict.is_accepted())
    }

    pub fn steps(&self) -> usize {
        self.checks.iter().map(|c| c.steps).sum()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {}/{} proofs accepted ({} steps)",
            self.suite,
            self.checks.iter().filter(|c| c.verdict.is_accepted()).count(),
            self.total,
            self.steps()
        )?;
        for check in &self.checks {
            writeln!(f, "  {}: {} ({} steps)", check.name, check.verdict, check.steps)?;
        }
        if self.checks.len() < self.total {
            writeln!(f, "  ... {} proofs not reached", self.total - self.checks.len())?;
        }
        Ok(())
    }
}

/// A parse failure in a suite file, with its 1-based line number.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{suite}.proof line {line}: {reason}")]
pub struct ProofParseError {
    pub suite: String,
    pub line: usize,
    pub reason: String,
}

fn malformed(suite: &str, line: usize, reason: impl Into<String>) -> ProofParseError {
    ProofParseError {
        suite: suite.to_string(),
        line,
        reason: reason.into(),
    }
}

fn path_string(position: &[usize]) -> String {
    if position.is_empty() {
        "-".to_string()
    } else {
        position
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn parse_path(text: &str) -> Option<Vec<usize>> {
    if text == "-" {
        return Some(Vec::new());
    }
    text.split('.').map(|seg| seg.parse().ok()).collect()
}

/// Parses the plain-text suite format:
///
/// ```text
/// proof <name> from <hyp>, <hyp>, ... goal <lhs> = <rhs>
/// <rule> <l2r|r2l> at <p.a.t.h> with x:=<term>, y:=<term> -> <term>
/// ```
///
/// Positions use `-` for the root. Blank lines separate proofs; `#` starts
/// a comment (a trailing comment containing `synthetic` marks the step as
/// interpolated). The recorded `->` result of every step is mandatory.
pub fn parse_suite(name: &str, text: &str) -> Result<ProofSuite, ProofParseError> {
    let mut proofs: Vec<Proof> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut current: Option<Proof> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (code, comment) = match raw.split_once('#') {
            Some((c, rest)) => (c, Some(rest)),
            None => (raw, None),
        };
        let code = code.trim();
        if code.is_empty() {
            continue;
        }

        if let Some(rest) = code.strip_prefix("proof ") {
            if let Some(done) = current.take() {
                proofs.push(done);
            }
            let (pname, rest) = rest
                .split_once(" from ")
                .ok_or_else(|| malformed(name, line, "expected `from` after the proof name"))?;
            let pname = pname.trim();
            if pname.is_empty() {
                return Err(malformed(name, line, "empty proof name"));
            }
            if !seen.insert(pname.to_string()) {
                return Err(malformed(name, line, format!("duplicate proof name `{pname}`")));
            }
            let (hyps, goal_text) = rest
                .split_once(" goal ")
                .ok_or_else(|| malformed(name, line, "expected `goal` after the hypothesis list"))?;
            let hypotheses: Vec<String> =
                hyps.split(',').map(|h| h.trim().to_string()).collect();
            if hypotheses.iter().any(String::is_empty) {
                return Err(malformed(name, line, "empty hypothesis name"));
            }
            let goal = parse_identity(pname, goal_text)
                .map_err(|e| malformed(name, line, format!("bad goal: {e}")))?;
            current = Some(Proof {
                name: pname.to_string(),
                hypotheses,
                goal,
                steps: Vec::new(),
            });
        } else {
            let proof = current
                .as_mut()
                .ok_or_else(|| malformed(name, line, "step before any proof header"))?;

            let (head, result) = code
                .split_once(" -> ")
                .ok_or_else(|| malformed(name, line, "step is missing its `->` result"))?;
            let (lead, bindings) = head
                .split_once(" with ")
                .ok_or_else(|| malformed(name, line, "step is missing its `with` bindings"))?;
            let lead: Vec<&str> = lead.split_whitespace().collect();
            let (rule, dir, pos) = match lead.as_slice() {
                [rule, dir, "at", pos] => (*rule, *dir, *pos),
                _ => {
                    return Err(malformed(
                        name,
                        line,
                        "expected `<rule> <l2r|r2l> at <position>` before `with`",
                    ))
                }
            };
            let direction = match dir {
                "l2r" => Direction::LeftToRight,
                "r2l" => Direction::RightToLeft,
                other => {
                    return Err(malformed(name, line, format!("bad direction `{other}`")))
                }
            };
            let position = parse_path(pos)
                .ok_or_else(|| malformed(name, line, format!("bad position `{pos}`")))?;
            let mut substitution = BTreeMap::new();
            for part in bindings.split(',') {
                let part = part.trim();
                let (var, value) = part
                    .split_once(":=")
                    .ok_or_else(|| malformed(name, line, format!("bad binding `{part}`")))?;
                let mut chars = var.trim().chars();
                let var = match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => c,
                    _ => {
                        return Err(malformed(
                            name,
                            line,
                            format!("binding variable `{}` is not a single letter", var.trim()),
                        ))
                    }
                };
                let value = parse_term(value.trim())
                    .map_err(|e| malformed(name, line, format!("bad binding term: {e}")))?;
                if substitution.insert(var, value).is_some() {
                    return Err(malformed(name, line, format!("variable `{var}` bound twice")));
                }
            }
            let expect = parse_term(result.trim())
                .map_err(|e| malformed(name, line, format!("bad result term: {e}")))?;
            proof.steps.push(ProofStep {
                rule: rule.to_string(),
                direction,
                position,
                substitution,
                expect,
                synthetic: comment.is_some_and(|c| c.contains("synthetic")),
            });
        }
    }
    if let Some(done) = current.take() {
        proofs.push(done);
    }
    if proofs.is_empty() {
        return Err(malformed(name, 0, "no proofs in file"));
    }
    Ok(ProofSuite {
        name: name.to_string(),
        proofs,
    })
}

/// Applies one rewrite: instantiates the source side of `rule` with the
/// step's substitution, matches it syntactically against the subterm at the
/// step's position, and splices in the instantiated target side. Everything
/// outside the position is untouched; nothing is normalized or searched.
pub fn apply_step(
    term: &Term,
    rule: &Identity,
    direction: Direction,
    position: &[usize],
    substitution: &BTreeMap<char, Term>,
) -> Result<Term, StepError> {
    let needed: BTreeSet<char> = rule.vars().into_iter().collect();
    for v in &needed {
        if !substitution.contains_key(v) {
            return Err(StepError::MissingBinding(*v));
        }
    }
    for k in substitution.keys() {
        if !needed.contains(k) {
            return Err(StepError::ExtraBinding(*k));
        }
    }
    let (source, target) = match direction {
        Direction::LeftToRight => (&rule.lhs, &rule.rhs),
        Direction::RightToLeft => (&rule.rhs, &rule.lhs),
    };
    let at = term.subterm_at(position).ok_or_else(|| StepError::BadPosition {
        position: path_string(position),
    })?;
    let instance = source.substitute(substitution);
    if *at != instance {
        return Err(StepError::NoMatch {
            rule: rule.name.clone(),
            position: path_string(position),
            found: at.to_string(),
            want: instance.to_string(),
        });
    }
    Ok(term
        .with_replaced(position, target.substitute(substitution))
        .expect("position was just validated"))
}

/// The two spellings of the recovered unary operation. They are sound
/// rewrite rules only where interchangeable, i.e. once B1 is a hypothesis
/// or the suite has proven the lemma `same`; elsewhere they are refused.
const PRIME_DEFS: [&str; 2] = ["prime-def-L", "prime-def-R"];

fn resolve_rule<'a>(
    name: &str,
    hypotheses: &[String],
    proven: &'a BTreeMap<String, Identity>,
) -> Result<&'a Identity, StepError> {
    if hypotheses.iter().any(|h| h == name) {
        return registry()
            .get(name)
            .ok_or_else(|| StepError::UnknownRule(name.to_string()));
    }
    if let Some(lemma) = proven.get(name) {
        return Ok(lemma);
    }
    if PRIME_DEFS.contains(&name) {
        if hypotheses.iter().any(|h| h == "B1") || proven.contains_key("same") {
            return Ok(registry().get(name).expect("recovery laws are registered"));
        }
        return Err(StepError::PrimeDefUnavailable {
            rule: name.to_string(),
        });
    }
    Err(StepError::UnknownRule(name.to_string()))
}

/// Checks one proof against the laws in `proven` (lemmas established
/// earlier; pass an empty map to check a proof in isolation). Deterministic:
/// the outcome depends only on the proof and `proven`.
pub fn check_proof(proof: &Proof, proven: &BTreeMap<String, Identity>) -> Verdict {
    for h in &proof.hypotheses {
        if registry().get(h).is_none() {
            return Verdict::Rejected {
                step: 0,
                reason: StepError::UnknownRule(h.clone()),
            };
        }
    }
    let mut current = proof.goal.lhs.clone();
    for (i, step) in proof.steps.iter().enumerate() {
        let outcome = resolve_rule(&step.rule, &proof.hypotheses, proven).and_then(|rule| {
            apply_step(
                &current,
                rule,
                step.direction,
                &step.position,
                &step.substitution,
            )
        });
        match outcome {
            Ok(next) => {
                if next != step.expect {
                    return Verdict::Rejected {
                        step: i + 1,
                        reason: StepError::ResultMismatch {
                            got: next.to_string(),
                            recorded: step.expect.to_string(),
                        },
                    };
                }
                current = next;
            }
            Err(reason) => return Verdict::Rejected { step: i + 1, reason },
        }
    }
    if current != proof.goal.rhs {
        return Verdict::Rejected {
            step: proof.steps.len(),
            reason: StepError::GoalNotReached {
                reached: current.to_string(),
                goal: proof.goal.rhs.to_string(),
            },
        };
    }
    Verdict::Accepted
}

/// Checks a suite front to back, aborting at the first rejection. Each
/// accepted proof becomes citable by the ones after it.
pub fn check_suite(suite: &ProofSuite) -> SuiteReport {
    let mut proven: BTreeMap<String, Identity> = BTreeMap::new();
    let mut checks = Vec::new();
    for proof in &suite.proofs {
        let verdict = check_proof(proof, &proven);
        let accepted = verdict.is_accepted();
        checks.push(ProofCheck {
            name: proof.name.clone(),
            steps: proof.steps.len(),
            verdict,
        });
        if accepted {
            proven.insert(proof.name.clone(), proof.goal.clone());
        } else {
            break;
        }
    }
    SuiteReport {
        suite: suite.name.clone(),
        total: suite.proofs.len(),
        checks,
    }
}

/// The bundled derivation suites, in presentation order.
static SUITE_SOURCES: &[(&str, &str)] = &[
    ("tamura", include_str!("../data/proofs/tamura.proof")),
    ("einversive", include_str!("../data/proofs/einversive.proof")),
    ("regular", include_str!("../data/proofs/regular.proof")),
    ("strange", include_str!("../data/proofs/strange.proof")),
    ("involuted", include_str!("../data/proofs/involuted.proof")),
    ("inverse", include_str!("../data/proofs/inverse.proof")),
    ("idemrespect", include_str!("../data/proofs/idemrespect.proof")),
];

/// Parses every bundled suite.
pub fn paper_suites() -> Result<Vec<ProofSuite>, ProofParseError> {
    SUITE_SOURCES
        .iter()
        .map(|(name, text)| parse_suite(name, text))
        .collect()
}

/// Combined outcome for all bundled suites.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PaperReport {
    pub suites: Vec<SuiteReport>,
}

impl PaperReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteReport::ok)
    }

    pub fn proofs(&self) -> usize {
        self.suites.iter().map(|s| s.checks.len()).sum()
    }

    pub fn steps(&self) -> usize {
        self.suites.iter().map(SuiteReport::steps).sum()
    }
}

impl fmt::Display for PaperReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for suite in &self.suites {
            suite.fmt(f)?;
        }
        writeln!(
            f,
            "total: {} proofs, {} steps, {}",
            self.proofs(),
            self.steps(),
            if self.ok() { "all accepted" } else { "REJECTIONS PRESENT" }
        )
    }
}

/// Checks every bundled suite. Suites are independent, so they are checked
/// concurrently; within a suite checking stays sequential.
pub fn run_paper_suite() -> Result<PaperReport, ProofParseError> {
    let parsed = paper_suites()?;
    let suites = parsed.par_iter().map(check_suite).collect();
    Ok(PaperReport { suites })
}

/// A problem while *sweeping* models for [`check_soundness`] (not a failed
/// check — goal failures are reported in the [`SoundnessReport`] itself).
#[derive(Debug, Error)]
pub enum SoundnessError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
}

/// Numeric cross-check of a suite's conclusions: every goal must hold on
/// every model of its hypotheses, sweeping all models up to `max_size` (up
/// to isomorphism) plus every bundled fixture that satisfies the hypotheses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SoundnessReport {
    pub suite: String,
    pub max_size: usize,
    pub models_checked: usize,
    pub fixtures_checked: usize,
    pub violations: Vec<String>,
}

impl SoundnessReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn mentions_mul(t: &Term) -> bool {
    match t {
        Term::Var(_) => false,
        Term::Mul(..) => true,
        Term::Ld(a, b) | Term::Rd(a, b) => mentions_mul(a) || mentions_mul(b),
        Term::Inv(a) => mentions_mul(a),
    }
}

/// Checks the conclusions of `suite` against actual models of its
/// hypotheses, grouped by hypothesis set. The signature is inferred from
/// the laws involved: any `*` puts the group on the semigroup side,
/// otherwise models are bimagmas (with the unary operation evaluated as the
/// canonical recovery `(x\x)/x`).
pub fn check_soundness(suite: &ProofSuite, max_size: usize) -> Result<SoundnessReport, SoundnessError> {
    let mut groups: BTreeMap<&[String], Vec<&Proof>> = BTreeMap::new();
    for proof in &suite.proofs {
        groups.entry(&proof.hypotheses).or_default().push(proof);
    }

    let mut models_checked = 0;
    let mut fixtures_checked = 0;
    let mut violations = Vec::new();

    for (hypotheses, proofs) in &groups {
        let names: Vec<&str> = hypotheses.iter().map(String::as_str).collect();
        let require = registry().resolve(&names)?;
        let semigroup_side = require
            .iter()
            .chain(proofs.iter().map(|p| &p.goal))
            .any(|id| mentions_mul(&id.lhs) || mentions_mul(&id.rhs));
        let kind = if semigroup_side {
            SearchKind::UnarySemigroup
        } else {
            SearchKind::Bimagma
        };

        for size in 1..=max_size {
            let spec = SearchSpec {
                kind,
                size,
                require: require.clone(),
                forbid: None,
                dedup: Dedup::Iso,
            };
            let found = search::enumerate(&spec)?;
            for model in &found.models {
                models_checked += 1;
                for proof in proofs {
                    match term::holds(&proof.goal, model) {
                        Ok(true) => {}
                        Ok(false) => violations.push(format!(
                            "{}/{}: goal fails on a size-{} model of its hypotheses",
                            suite.name, proof.name, size
                        )),
                        Err(e) => violations.push(format!(
                            "{}/{}: evaluation error on a size-{} model: {}",
                            suite.name, proof.name, size, e
                        )),
                    }
                }
            }
        }

        for id in fixtures::all_fixture_ids() {
            let fixture = fixtures::load_fixture(id)?;
            let algebra = &fixture.algebra;
            let compatible = match kind {
                SearchKind::UnarySemigroup => algebra.as_unary_semigroup().is_some(),
                _ => algebra.as_bimagma().is_some(),
            };
            if !compatible {
                continue;
            }
            let satisfies = require
                .iter()
                .all(|law| term::holds(law, algebra).unwrap_or(false));
            if !satisfies {
                continue;
            }
            fixtures_checked += 1;
            for proof in proofs {
                match term::holds(&proof.goal, algebra) {
                    Ok(true) => {}
                    Ok(false) => violations.push(format!(
                        "{}/{}: goal fails on fixture {}",
                        suite.name, proof.name, id
                    )),
                    Err(e) => violations.push(format!(
                        "{}/{}: evaluation error on fixture {}: {}",
                        suite.name, proof.name, id, e
                    )),
                }
            }
        }
    }

    Ok(SoundnessReport {
        suite: suite.name.to_string(),
        max_size,
        models_checked,
        fixtures_checked,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn suite(name: &str) -> ProofSuite {
        let text = SUITE_SOURCES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .unwrap();
        parse_suite(name, text).unwrap()
    }

    #[test]
    fn two_step_chain_is_accepted_in_isolation() {
        let s = parse_suite(
            "mini",
            "proof t2a from T1, T2, T3 goal x/(x\\x) = x\n\
             T1 r2l at - with x:=x, y:=x, z:=x -> (x/x)\\x\n\
             T2 l2r at - with a:=x -> x\n",
        )
        .unwrap();
        let report = check_suite(&s);
        assert!(report.ok(), "{report}");
        assert_eq!(report.checks[0].steps, 2);
    }

    #[test]
    fn swapping_one_rule_name_rejects_at_that_step() {
        let s = parse_suite(
            "mini",
            "proof t2a from T1, T2, T3 goal x/(x\\x) = x\n\
             T1 r2l at - with x:=x, y:=x, z:=x -> (x/x)\\x\n\
             T3 l2r at - with a:=x -> x\n",
        )
        .unwrap();
        match check_proof(&s.proofs[0], &BTreeMap::new()) {
            Verdict::Rejected { step: 2, .. } => {}
            other => panic!("expected rejection at step 2, got {other:?}"),
        }
    }

    #[test]
    fn tampering_with_a_recorded_result_is_a_result_mismatch() {
        let s = parse_suite(
            "mini",
            "proof t2a from T1, T2, T3 goal x/(x\\x) = x\n\
             T1 r2l at - with x:=x, y:=x, z:=x -> (x\\x)/x\n\
             T2 l2r at - with a:=x -> x\n",
        )
        .unwrap();
        match check_proof(&s.proofs[0], &BTreeMap::new()) {
            Verdict::Rejected {
                step: 1,
                reason: StepError::ResultMismatch { .. },
            } => {}
            other => panic!("expected a result mismatch at step 1, got {other:?}"),
        }
    }

    #[test]
    fn identity_rule_at_the_root_leaves_the_term_unchanged() {
        let rule = Identity::new("refl", parse_term("x").unwrap(), parse_term("x").unwrap());
        let t = parse_term("(x\\y)/z").unwrap();
        let mut sub = BTreeMap::new();
        sub.insert('x', t.clone());
        let out = apply_step(&t, &rule, Direction::LeftToRight, &[], &sub).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn mismatched_substitution_is_a_no_match() {
        let rule = registry().get("B3").unwrap();
        let t = parse_term("x/(x\\x)").unwrap();
        let mut sub = BTreeMap::new();
        sub.insert('x', parse_term("y").unwrap());
        match apply_step(&t, rule, Direction::LeftToRight, &[], &sub) {
            Err(StepError::NoMatch { .. }) => {}
            other => panic!("expected NoMatch, got {other:?}"),
        }
    }

    #[test]
    fn position_outside_the_term_is_a_bad_position() {
        let rule = registry().get("B3").unwrap();
        let t = parse_term("x/(x\\x)").unwrap();
        let mut sub = BTreeMap::new();
        sub.insert('x', parse_term("x").unwrap());
        match apply_step(&t, rule, Direction::LeftToRight, &[0, 1], &sub) {
            Err(StepError::BadPosition { .. }) => {}
            other => panic!("expected BadPosition, got {other:?}"),
        }
    }

    #[test]
    fn bindings_must_cover_the_rule_variables_exactly() {
        let rule = registry().get("B1").unwrap();
        let t = parse_term("(x\\y)/z").unwrap();
        let mut sub = BTreeMap::new();
        sub.insert('x', parse_term("x").unwrap());
        sub.insert('y', parse_term("y").unwrap());
        match apply_step(&t, rule, Direction::LeftToRight, &[], &sub) {
            Err(StepError::MissingBinding('z')) => {}
            other => panic!("expected MissingBinding(z), got {other:?}"),
        }
        sub.insert('z', parse_term("z").unwrap());
        sub.insert('w', parse_term("x").unwrap());
        match apply_step(&t, rule, Direction::LeftToRight, &[], &sub) {
            Err(StepError::ExtraBinding('w')) => {}
            other => panic!("expected ExtraBinding(w), got {other:?}"),
        }
    }

    #[test]
    fn recovery_laws_are_gated() {
        let text = "proof p from T1, T2, T3 goal x' = x\\(x/x)\n\
                    prime-def-R l2r at - with x:=x -> x\\(x/x)\n";
        let s = parse_suite("mini", text).unwrap();
        match check_proof(&s.proofs[0], &BTreeMap::new()) {
            Verdict::Rejected {
                step: 1,
                reason: StepError::PrimeDefUnavailable { .. },
            } => {}
            other => panic!("expected the recovery law to be refused, got {other:?}"),
        }

        // The same step is fine once B1 is among the hypotheses...
        let text_b1 = text.replace("from T1, T2, T3", "from B1, B2, reg2");
        let s = parse_suite("mini", &text_b1).unwrap();
        assert!(check_proof(&s.proofs[0], &BTreeMap::new()).is_accepted());

        // ...or once a lemma named `same` has been proven.
        let mut proven = BTreeMap::new();
        proven.insert(
            "same".to_string(),
            registry().get("prime-def-L").unwrap().clone(),
        );
        let s = parse_suite("mini", text).unwrap();
        assert!(check_proof(&s.proofs[0], &proven).is_accepted());
    }

    #[test]
    fn all_bundled_suites_are_accepted() {
        let report = run_paper_suite().unwrap();
        assert!(report.ok(), "{report}");
        let sizes: Vec<(String, usize, usize)> = report
            .suites
            .iter()
            .map(|s| (s.suite.clone(), s.checks.len(), s.steps()))
            .collect();
        let expected: Vec<(String, usize, usize)> = [
            ("tamura", 15, 74),
            ("einversive", 4, 18),
            ("regular", 15, 51),
            ("strange", 3, 15),
            ("involuted", 2, 9),
            ("inverse", 11, 44),
            ("idemrespect", 3, 13),
        ]
        .iter()
        .map(|(n, p, s)| (n.to_string(), *p, *s))
        .collect();
        assert_eq!(sizes, expected);
        assert_eq!(report.proofs(), 53);
        assert_eq!(report.steps(), 224);
    }

    #[test]
    fn paper_report_names_every_proof_with_its_step_count() {
        let report = run_paper_suite().unwrap();
        let rendered = report.to_string();
        assert!(rendered.contains("t4: accepted (8 steps)"));
        assert!(rendered.contains("e-inv-tmp2: accepted (10 steps)"));
        assert!(rendered.contains("ir-tmp3: accepted (6 steps)"));
        assert!(rendered.contains("total: 53 proofs, 224 steps, all accepted"));
    }

    #[test]
    fn deleting_a_cited_lemma_rejects_its_first_use() {
        let mut regular = suite("regular");
        regular.proofs.retain(|p| p.name != "reg-45");
        let report = check_suite(&regular);
        assert!(!report.ok());
        let last = report.checks.last().unwrap();
        assert_eq!(last.name, "reg-46a");
        match &last.verdict {
            Verdict::Rejected {
                step: 3,
                reason: StepError::UnknownRule(name),
            } => assert_eq!(name, "reg-45"),
            other => panic!("expected reg-45 to be unknown at step 3, got {other:?}"),
        }
        // Everything after the rejection is not reached.
        assert!(report.checks.len() < report.total);
    }

    #[test]
    fn reordering_a_suite_breaks_the_earlier_only_rule() {
        let mut tamura = suite("tamura");
        // `t4-goal1` uses the recovery law, which is only unlocked by the
        // lemma `same`; moving `same` after it must fail structurally.
        let same_at = tamura.proofs.iter().position(|p| p.name == "same").unwrap();
        let same = tamura.proofs.remove(same_at);
        let goal1_at = tamura.proofs.iter().position(|p| p.name == "t4-goal1").unwrap();
        tamura.proofs.insert(goal1_at + 1, same);
        let report = check_suite(&tamura);
        assert!(!report.ok());
        let last = report.checks.last().unwrap();
        assert_eq!(last.name, "t4-goal1");
        match &last.verdict {
            Verdict::Rejected {
                step: 1,
                reason: StepError::PrimeDefUnavailable { .. },
            } => {}
            other => panic!("expected the recovery law to be refused, got {other:?}"),
        }
    }

    #[test]
    fn lemma_citations_only_see_earlier_proofs() {
        let mut regular = suite("regular");
        // comp2 cites i3; moving it to the front makes that citation dangle.
        let comp2_at = regular.proofs.iter().position(|p| p.name == "comp2").unwrap();
        let comp2 = regular.proofs.remove(comp2_at);
        regular.proofs.insert(0, comp2);
        let report = check_suite(&regular);
        assert!(!report.ok());
        assert_eq!(report.checks[0].name, "comp2");
        match &report.checks[0].verdict {
            Verdict::Rejected {
                reason: StepError::UnknownRule(name),
                ..
            } => assert_eq!(name, "i3"),
            other => panic!("expected i3 to be unknown, got {other:?}"),
        }
    }

    #[test]
    fn checking_is_deterministic() {
        let tamura = suite("tamura");
        let a = check_suite(&tamura);
        let b = check_suite(&tamura);
        assert_eq!(a, b);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let missing_result = "proof p from B1 goal x' = x'\nB1 l2r at - with x:=x\n";
        let err = parse_suite("mini", missing_result).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.to_string().contains("->"), "{err}");

        let headerless = "B1 l2r at - with x:=x -> x\n";
        let err = parse_suite("mini", headerless).unwrap_err();
        assert_eq!(err.line, 1);

        let dup = "proof p from B1 goal x' = x'\n\nproof p from B1 goal x' = x'\n";
        let err = parse_suite("mini", dup).unwrap_err();
        assert_eq!(err.line, 3);

        let bad_path = "proof p from B1 goal x' = x'\nB1 l2r at 0..1 with x:=x -> x\n";
        assert!(parse_suite("mini", bad_path).is_err());
    }

    #[test]
    fn synthetic_steps_are_flagged_by_their_comment() {
        let inverse = suite("inverse");
        let lem26 = inverse.proofs.iter().find(|p| p.name == "lem26").unwrap();
        let flags: Vec<bool> = lem26.steps.iter().map(|s| s.synthetic).collect();
        assert_eq!(flags, [false, false, true, false]);
    }

    #[test]
    fn soundness_sweep_passes_at_size_two() {
        for s in paper_suites().unwrap() {
            let report = check_soundness(&s, 2).unwrap();
            assert!(report.ok(), "{:?}", report.violations);
            assert!(report.models_checked > 0, "no models for {}", s.name);
        }
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(Term::var('x')), Just(Term::var('y'))];
        leaf.prop_recursive(3, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::ld(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::rd(a, b)),
                inner.prop_map(Term::inv),
            ]
        })
    }

    fn all_paths(t: &Term, prefix: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for i in 0..2 {
            if let Some(child) = t.child(i) {
                let mut p = prefix.clone();
                p.push(i);
                all_paths(child, p, out);
            }
        }
    }

    proptest! {
        // A step touches exactly the subterm at its position: every path
        // that neither extends nor prefixes it is left alone.
        #[test]
        fn apply_step_is_local(t in arb_term(), idx in any::<prop::sample::Index>()) {
            let mut paths = Vec::new();
            all_paths(&t, Vec::new(), &mut paths);
            let target = paths[idx.index(paths.len())].clone();
            let rule = Identity::new(
                "wrap",
                parse_term("u").unwrap(),
                parse_term("u'").unwrap(),
            );
            let mut sub = BTreeMap::new();
            sub.insert('u', t.subterm_at(&target).unwrap().clone());
            let out = apply_step(&t, &rule, Direction::LeftToRight, &target, &sub).unwrap();
            prop_assert_eq!(
                out.subterm_at(&target).unwrap(),
                &Term::inv(t.subterm_at(&target).unwrap().clone())
            );
            for path in &paths {
                let related = path.starts_with(&target) || target.starts_with(path);
                if !related {
                    prop_assert_eq!(out.subterm_at(path), t.subterm_at(path));
                }
            }
        }
    }
}
