//! The named-law registry and the class predicates on both sides of the
//! correspondence between unary semigroups and their division bimagmas.
//!
//! The registry is loaded from `data/registry.txt` (shipped inside the
//! binary) and is immutable after load.  A [`ClassSpec`] pairs a class of
//! unary semigroups, given by registry names for its defining laws, with
//! the division-side basis that characterizes the same class; the table in
//! [`class_table`] lists every such pairing the workbench verifies.
//! [`check_equivalence`] replays one pairing exhaustively at a size bound:
//! every semigroup model must translate to a division model and back to
//! itself, and every division model must reconstruct to a semigroup model
//! of the class that translates back on the nose.

use std::collections::BTreeMap;
use std::fmt;

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::algebra::{Elem, FiniteBimagma, FiniteUnarySemigroup};
use crate::functors;
use crate::search::{self, Dedup, SearchError, SearchKind, SearchSpec};
use crate::term::{holds_on_bimagma, holds_on_semigroup, parse_identity, Identity, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("unknown law name `{0}`")]
    UnknownLaw(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// All named laws, keyed by name, in declaration order.
pub struct AxiomRegistry {
    entries: BTreeMap<String, Identity>,
    order: Vec<String>,
}

impl AxiomRegistry {
    fn from_source(src: &str) -> AxiomRegistry {
        let mut entries = BTreeMap::new();
        let mut order = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, text) = line
                .split_once(':')
                .unwrap_or_else(|| panic!("registry line {}: missing `:`", lineno + 1));
            let name = name.trim();
            let id = parse_identity(name, text.trim())
                .unwrap_or_else(|e| panic!("registry line {}: {e}", lineno + 1));
            if entries.insert(name.to_string(), id).is_some() {
                panic!("registry line {}: duplicate name `{name}`", lineno + 1);
            }
            order.push(name.to_string());
        }
        AxiomRegistry { entries, order }
    }

    pub fn get(&self, name: &str) -> Option<&Identity> {
        self.entries.get(name)
    }

    /// Law names in file order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Looks up each name, cloning the laws in request order.
    pub fn resolve(&self, names: &[&str]) -> Result<Vec<Identity>, ClassError> {
        names
            .iter()
            .map(|n| {
                self.get(n)
                    .cloned()
                    .ok_or_else(|| ClassError::UnknownLaw((*n).to_string()))
            })
            .collect()
    }
}

static REGISTRY: Lazy<AxiomRegistry> =
    Lazy::new(|| AxiomRegistry::from_source(include_str!("../data/registry.txt")));

/// The shared immutable registry.
pub fn registry() -> &'static AxiomRegistry {
    &REGISTRY
}

/// One row of the correspondence: a class of unary semigroups and the
/// division-side basis that characterizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassSpec {
    pub name: &'static str,
    /// Registry names of the laws defining the class on the semigroup
    /// side.  Empty for the `group` row, whose semigroup side is the
    /// semantic predicate [`is_group`] rather than a law list.
    pub semigroup_axioms: &'static [&'static str],
    /// Registry names of the division-side basis.
    pub bimagma_axioms: &'static [&'static str],
}

const CLASS_TABLE: &[ClassSpec] = &[
    ClassSpec {
        name: "E-inversive+tech",
        semigroup_axioms: &["I1", "tech-left", "tech-right"],
        bimagma_axioms: &["B1", "comp1", "comp2"],
    },
    ClassSpec {
        name: "regular+I3",
        semigroup_axioms: &["I1", "I2", "I3"],
        bimagma_axioms: &["B1", "B2", "reg2"],
    },
    ClassSpec {
        name: "regular+I3+I4",
        semigroup_axioms: &["I1", "I2", "I3", "I4a", "I4b"],
        bimagma_axioms: &["B1", "B2", "B3", "str3"],
    },
    ClassSpec {
        name: "regular-involuted",
        semigroup_axioms: &["I1", "I2", "I3", "I6"],
        bimagma_axioms: &["B1", "B2", "B3", "reginv1"],
    },
    ClassSpec {
        name: "regular-involuted+I5",
        semigroup_axioms: &["I1", "I2", "I3", "I5", "I6"],
        bimagma_axioms: &["B1", "B2", "B3", "reginv1", "ir4"],
    },
    ClassSpec {
        name: "inverse",
        semigroup_axioms: &["I1", "I2", "I3", "I6", "I8"],
        bimagma_axioms: &["B1", "B2", "B3", "invcase"],
    },
    ClassSpec {
        name: "completely-regular",
        semigroup_axioms: &["I1", "I2", "I7"],
        bimagma_axioms: &["B1", "B2", "B3", "cr4"],
    },
    ClassSpec {
        name: "Clifford",
        semigroup_axioms: &["I1", "I2", "I3", "I6", "I7", "I8"],
        bimagma_axioms: &["B1", "B2", "B3", "cr4", "invcase"],
    },
    ClassSpec {
        name: "Tamura regular-involuted",
        semigroup_axioms: &["I1", "I2", "I3", "I6"],
        bimagma_axioms: &["T1", "T2", "T3"],
    },
    ClassSpec {
        name: "Tamura inverse",
        semigroup_axioms: &["I1", "I2", "I3", "I6", "I8"],
        bimagma_axioms: &["T1", "T2", "T3", "T5"],
    },
    ClassSpec {
        name: "group",
        semigroup_axioms: &[],
        bimagma_axioms: &["T1", "KS2"],
    },
];

/// Every class pairing the workbench verifies.
pub fn class_table() -> &'static [ClassSpec] {
    CLASS_TABLE
}

pub fn class_spec(name: &str) -> Option<&'static ClassSpec> {
    CLASS_TABLE.iter().find(|c| c.name == name)
}

/// True when the multiplication has a two-sided identity element and the
/// unary operation sends every element to its group inverse.  (In a
/// monoid inverses are unique, so this pins the unary operation exactly.)
pub fn is_group(s: &FiniteUnarySemigroup) -> bool {
    let n = s.size() as Elem;
    let e = match (0..n).find(|&e| (0..n).all(|x| s.mul(e, x) == x && s.mul(x, e) == x)) {
        Some(e) => e,
        None => return false,
    };
    (0..n).all(|x| s.mul(x, s.inv(x)) == e && s.mul(s.inv(x), x) == e)
}

/// True when the unary operation fixes every idempotent pointwise.  On
/// models of {I1, I2} this agrees with the law I5; the test suite sweeps
/// that equivalence.
pub fn fixes_idempotents(s: &FiniteUnarySemigroup) -> bool {
    s.idempotents().into_iter().all(|e| s.inv(e) == e)
}

/// Verdict map produced by the classifiers: law names and class names to
/// whether they hold.
pub type Profile = BTreeMap<String, bool>;

/// Evaluates every registry law on the semigroup (division and unary
/// symbols expand over multiplication and the unary operation), adds the
/// `I4` and `tech` conjunctions, and adds one verdict per class in
/// [`class_table`] — the `group` verdict is the semantic predicate
/// [`is_group`], every other class is the conjunction of its law list.
pub fn classify_semigroup(s: &FiniteUnarySemigroup) -> Profile {
    let reg = registry();
    let mut profile = Profile::new();
    for name in reg.names() {
        let id = reg.get(name).expect("names() yields registered names");
        profile.insert(name.to_string(), holds_on_semigroup(id, s));
    }
    let i4 = profile["I4a"] && profile["I4b"];
    profile.insert("I4".to_string(), i4);
    let tech = profile["tech-left"] && profile["tech-right"];
    profile.insert("tech".to_string(), tech);
    for class in CLASS_TABLE {
        let verdict = if class.semigroup_axioms.is_empty() {
            is_group(s)
        } else {
            class.semigroup_axioms.iter().all(|a| profile[*a])
        };
        profile.insert(class.name.to_string(), verdict);
    }
    profile
}

/// Evaluates every division-signature registry law on the bimagma (the
/// unary symbol expands through the recovery formula), and adds one
/// verdict per class basis in [`class_table`].  Laws mentioning
/// multiplication are skipped: they have no reading on this side.
pub fn classify_bimagma(b: &FiniteBimagma) -> Profile {
    let reg = registry();
    let mut profile = Profile::new();
    for name in reg.names() {
        let id = reg.get(name).expect("names() yields registered names");
        if id.side == Side::Bimagma {
            let verdict = holds_on_bimagma(id, b)
                .expect("division-signature law evaluates on a bimagma");
            profile.insert(name.to_string(), verdict);
        }
    }
    for class in CLASS_TABLE {
        let verdict = class.bimagma_axioms.iter().all(|a| profile[*a]);
        profile.insert(class.name.to_string(), verdict);
    }
    profile
}

/// One way a class pairing can fail on a concrete model.
#[derive(Debug, Clone)]
pub enum EquivalenceFailure {
    /// A semigroup model of the class whose division bimagma misses a
    /// basis law.
    ForwardLaw {
        semigroup: FiniteUnarySemigroup,
        law: String,
    },
    /// A semigroup model of the class that does not survive the
    /// translate-and-reconstruct round trip unchanged.
    ForwardRoundtrip { semigroup: FiniteUnarySemigroup },
    /// A division model of the basis whose reconstruction fails outright.
    ConverseReconstruction {
        bimagma: FiniteBimagma,
        detail: String,
    },
    /// A division model whose reconstruction lands outside the class.
    ConverseClass {
        bimagma: FiniteBimagma,
        law: String,
    },
    /// A division model whose reconstruction does not translate back to
    /// the very same tables.
    ConverseRoundtrip { bimagma: FiniteBimagma },
}

impl fmt::Display for EquivalenceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceFailure::ForwardLaw { semigroup, law } => write!(
                f,
                "division bimagma of a class member fails {law}:\n{}",
                semigroup.to_file_string()
            ),
            EquivalenceFailure::ForwardRoundtrip { semigroup } => write!(
                f,
                "class member does not round-trip through its division bimagma:\n{}",
                semigroup.to_file_string()
            ),
            EquivalenceFailure::ConverseReconstruction { bimagma, detail } => write!(
                f,
                "basis model fails to reconstruct ({detail}):\n{}",
                bimagma.to_file_string()
            ),
            EquivalenceFailure::ConverseClass { bimagma, law } => write!(
                f,
                "reconstruction of a basis model fails {law}:\n{}",
                bimagma.to_file_string()
            ),
            EquivalenceFailure::ConverseRoundtrip { bimagma } => write!(
                f,
                "basis model does not round-trip through its reconstruction:\n{}",
                bimagma.to_file_string()
            ),
        }
    }
}

/// Result of replaying one class pairing over every model up to a size.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub class: String,
    pub bound: usize,
    /// Semigroup models of the class checked, all sizes up to the bound.
    pub semigroups_checked: usize,
    /// Division models of the basis checked, all sizes up to the bound.
    pub bimagmas_checked: usize,
    pub failures: Vec<EquivalenceFailure>,
}

impl EquivalenceReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: sizes <= {}, {} semigroup models, {} division models, ",
            self.class, self.bound, self.semigroups_checked, self.bimagmas_checked
        )?;
        if self.ok() {
            write!(f, "no counterexample")
        } else {
            writeln!(f, "{} counterexample(s):", self.failures.len())?;
            for failure in &self.failures {
                writeln!(f, "{failure}")?;
            }
            Ok(())
        }
    }
}

fn class_membership_failure(
    class: &ClassSpec,
    back: &FiniteUnarySemigroup,
    laws: &[Identity],
) -> Option<String> {
    if class.semigroup_axioms.is_empty() {
        if is_group(back) {
            None
        } else {
            Some("group structure".to_string())
        }
    } else {
        laws.iter()
            .find(|law| !holds_on_semigroup(law, back))
            .map(|law| law.name.clone())
    }
}

/// Replays one row of the class table over every model of size `1..=n`.
///
/// Forward: every unary semigroup satisfying the class laws must yield a
/// division bimagma satisfying the basis, and reconstructing that bimagma
/// must return the original tables.  Converse: every bimagma satisfying
/// the basis must reconstruct to a unary semigroup inside the class whose
/// division bimagma is again the original tables.  All failures are
/// collected, none tolerated.
pub fn check_equivalence(class: &ClassSpec, n: usize) -> Result<EquivalenceReport, ClassError> {
    let reg = registry();
    let sg_laws = reg.resolve(class.semigroup_axioms)?;
    let bm_laws = reg.resolve(class.bimagma_axioms)?;

    let mut report = EquivalenceReport {
        class: class.name.to_string(),
        bound: n,
        semigroups_checked: 0,
        bimagmas_checked: 0,
        failures: Vec::new(),
    };

    for size in 1..=n {
        let forward = search::enumerate(&SearchSpec {
            kind: SearchKind::UnarySemigroup,
            size,
            require: sg_laws.clone(),
            forbid: None,
            dedup: Dedup::None,
        })?;
        for model in &forward.models {
            let s = model
                .as_unary_semigroup()
                .expect("unary-semigroup search yields unary semigroups");
            if class.semigroup_axioms.is_empty() && !is_group(s) {
                continue;
            }
            report.semigroups_checked += 1;
            let b = functors::to_division_bimagma(s);
            let mut sound = true;
            for law in &bm_laws {
                let holds = holds_on_bimagma(law, &b)
                    .expect("division-signature law evaluates on a bimagma");
                if !holds {
                    report.failures.push(EquivalenceFailure::ForwardLaw {
                        semigroup: s.clone(),
                        law: law.name.clone(),
                    });
                    sound = false;
                    break;
                }
            }
            if sound && functors::to_unary_semigroup(&b).ok().as_ref() != Some(s) {
                report
                    .failures
                    .push(EquivalenceFailure::ForwardRoundtrip { semigroup: s.clone() });
            }
        }

        let converse = search::enumerate(&SearchSpec {
            kind: SearchKind::Bimagma,
            size,
            require: bm_laws.clone(),
            forbid: None,
            dedup: Dedup::None,
        })?;
        report.bimagmas_checked += converse.models.len();
        for model in &converse.models {
            let b = model.as_bimagma().expect("bimagma search yields bimagmas");
            let back = match functors::to_unary_semigroup(b) {
                Ok(back) => back,
                Err(e) => {
                    report.failures.push(EquivalenceFailure::ConverseReconstruction {
                        bimagma: b.clone(),
                        detail: e.to_string(),
                    });
                    continue;
                }
            };
            if let Some(law) = class_membership_failure(class, &back, &sg_laws) {
                report.failures.push(EquivalenceFailure::ConverseClass {
                    bimagma: b.clone(),
                    law,
                });
                continue;
            }
            if functors::to_division_bimagma(&back) != *b {
                report
                    .failures
                    .push(EquivalenceFailure::ConverseRoundtrip { bimagma: b.clone() });
            }
        }
    }
    Ok(report)
}

/// Result of a one-directional law sweep over a constrained model space.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub bound: usize,
    /// Models of the hypothesis laws inspected, all sizes up to the bound.
    pub checked: usize,
    pub violations: Vec<FiniteUnarySemigroup>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sizes <= {}, {} models, {}",
            self.bound,
            self.checked,
            if self.ok() {
                "no violation".to_string()
            } else {
                format!("{} violation(s)", self.violations.len())
            }
        )
    }
}

fn sweep_unary_semigroups(
    n: usize,
    hypotheses: &[&str],
    violated: impl Fn(&FiniteUnarySemigroup) -> bool,
) -> Result<SweepReport, ClassError> {
    let laws = registry().resolve(hypotheses)?;
    let mut report = SweepReport {
        bound: n,
        checked: 0,
        violations: Vec::new(),
    };
    for size in 1..=n {
        let result = search::enumerate(&SearchSpec {
            kind: SearchKind::UnarySemigroup,
            size,
            require: laws.clone(),
            forbid: None,
            dedup: Dedup::None,
        })?;
        report.checked += result.models.len();
        for model in &result.models {
            let s = model
                .as_unary_semigroup()
                .expect("unary-semigroup search yields unary semigroups");
            if violated(s) {
                report.violations.push(s.clone());
            }
        }
    }
    Ok(report)
}

/// Over every model of {I1, tech-left, tech-right} of size `1..=n`,
/// checks that the double-application law I3 holds exactly when both I1
/// and I2 do.
pub fn check_doubleprime_lemma(n: usize) -> Result<SweepReport, ClassError> {
    let reg = registry();
    let i1 = reg.get("I1").expect("I1 registered").clone();
    let i2 = reg.get("I2").expect("I2 registered").clone();
    let i3 = reg.get("I3").expect("I3 registered").clone();
    sweep_unary_semigroups(n, &["I1", "tech-left", "tech-right"], move |s| {
        let lhs = holds_on_semigroup(&i3, s);
        let rhs = holds_on_semigroup(&i1, s) && holds_on_semigroup(&i2, s);
        lhs != rhs
    })
}

/// Over every model of {I2, I3, I8} of size `1..=n`, checks that I1 and
/// I6 follow.
pub fn check_inverse_sufficiency(n: usize) -> Result<SweepReport, ClassError> {
    let reg = registry();
    let i1 = reg.get("I1").expect("I1 registered").clone();
    let i6 = reg.get("I6").expect("I6 registered").clone();
    sweep_unary_semigroups(n, &["I2", "I3", "I8"], move |s| {
        !(holds_on_semigroup(&i1, s) && holds_on_semigroup(&i6, s))
    })
}
