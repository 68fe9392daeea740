//! Bounded exhaustive enumeration of finite algebras under identity
//! constraints, with propagation-based pruning, isomorphism dedup, and
//! witness search for independence claims.
//!
//! Required identities are compiled to ground instances (one per assignment
//! of variables to elements). During the table-filling search each instance
//! watches the first undefined cell it needs; assigning that cell re-checks
//! the instance, which either completes (pruning the branch on violation),
//! moves its watch, or — when one side is known and the other is a single
//! table lookup away — forces the looked-up cell. Branching always picks the
//! undefined cell with the most watchers.
//!
//! The search tree is split into a deterministic frontier whose subtrees run
//! in parallel; results are merged in frontier order, so output order never
//! depends on scheduling. The `forbid` identity is only evaluated on
//! completed tables, keeping its handling trivially sound.

pub mod naive;

use crate::algebra::{Algebra, Elem, FiniteBimagma, FiniteUnarySemigroup};
use crate::term::{holds, parse_identity, Identity, Term};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchKind {
    /// Multiplication table only. Models are reported as unary semigroups
    /// with the identity map for `'`, which has exactly the same
    /// isomorphism orbits as the bare semigroup.
    Semigroup,
    UnarySemigroup,
    Bimagma,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Dedup {
    None,
    #[default]
    Iso,
    IsoAntiIso,
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub kind: SearchKind,
    pub size: usize,
    pub require: Vec<Identity>,
    pub forbid: Option<Identity>,
    pub dedup: Dedup,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Surviving representatives, one per dedup class, in deterministic
    /// order (canonical-form order when dedup is active, discovery order
    /// otherwise).
    pub models: Vec<Algebra>,
    /// Completed tables satisfying the spec (including the forbid filter)
    /// before dedup.
    pub count_raw: usize,
    /// True when the whole bounded space was explored rather than cut off
    /// by a result limit.
    pub exhausted: bool,
}

/// Canonical-form view of a sweep, for set comparisons that should not
/// materialize every representative.
#[derive(Debug, Clone)]
pub struct FormSweep {
    pub forms: BTreeSet<Vec<u8>>,
    pub count_raw: usize,
    pub exhausted: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search size must be at least 1")]
    EmptySize,
    #[error("size {size} exceeds the configured bound {bound} for this search")]
    BoundExceeded { size: usize, bound: usize },
    #[error("identity {identity} uses operations unavailable on a {kind:?} search")]
    SignatureMismatch { identity: String, kind: SearchKind },
}

/// The largest size `enumerate` accepts: constraint propagation earns
/// bimagma searches a higher bound than unconstrained pair enumeration.
pub fn size_bound(kind: SearchKind, constrained: bool) -> usize {
    match kind {
        SearchKind::Semigroup | SearchKind::UnarySemigroup => 4,
        SearchKind::Bimagma => {
            if constrained {
                5
            } else {
                3
            }
        }
    }
}

const UNSET: u8 = u8::MAX;

#[derive(Clone, Copy, Debug)]
enum Op {
    Push(u8),
    /// Unary table lookup at `base + i`.
    Look1(usize),
    /// Binary table lookup at `base + i*n + j`.
    Look2(usize),
}

#[derive(Clone, Debug)]
struct Instance {
    lhs: Box<[Op]>,
    rhs: Box<[Op]>,
}

/// Rewrite divisions in terms of `·` and `'` for semigroup-signature
/// searches; `None` when the term is unrepresentable in the kind.
fn normalize(term: &Term, kind: SearchKind) -> Option<Term> {
    match kind {
        SearchKind::Semigroup => match term {
            Term::Var(c) => Some(Term::Var(*c)),
            Term::Mul(a, b) => Some(Term::mul(normalize(a, kind)?, normalize(b, kind)?)),
            Term::Inv(_) | Term::Ld(..) | Term::Rd(..) => None,
        },
        SearchKind::UnarySemigroup => Some(match term {
            Term::Var(c) => Term::Var(*c),
            Term::Mul(a, b) => Term::mul(normalize(a, kind)?, normalize(b, kind)?),
            Term::Inv(a) => Term::inv(normalize(a, kind)?),
            Term::Ld(a, b) => Term::mul(
                Term::inv(normalize(a, kind)?),
                normalize(b, kind)?,
            ),
            Term::Rd(a, b) => Term::mul(
                normalize(a, kind)?,
                Term::inv(normalize(b, kind)?),
            ),
        }),
        SearchKind::Bimagma => match term {
            Term::Var(c) => Some(Term::Var(*c)),
            Term::Mul(..) => None,
            Term::Ld(a, b) => Some(Term::ld(normalize(a, kind)?, normalize(b, kind)?)),
            Term::Rd(a, b) => Some(Term::rd(normalize(a, kind)?, normalize(b, kind)?)),
            Term::Inv(a) => {
                let e = normalize(a, kind)?;
                Some(Term::rd(Term::ld(e.clone(), e.clone()), e))
            }
        },
    }
}

fn compile(term: &Term, n: usize, assign: &BTreeMap<char, u8>, out: &mut Vec<Op>) {
    match term {
        Term::Var(c) => out.push(Op::Push(assign[c])),
        Term::Mul(a, b) | Term::Ld(a, b) => {
            compile(a, n, assign, out);
            compile(b, n, assign, out);
            out.push(Op::Look2(0));
        }
        Term::Rd(a, b) => {
            compile(a, n, assign, out);
            compile(b, n, assign, out);
            out.push(Op::Look2(n * n));
        }
        Term::Inv(a) => {
            compile(a, n, assign, out);
            out.push(Op::Look1(n * n));
        }
    }
}

fn ground_instances(
    id: &Identity,
    kind: SearchKind,
    n: usize,
    out: &mut Vec<Instance>,
) -> Result<(), SearchError> {
    let mismatch = || SearchError::SignatureMismatch {
        identity: id.name.clone(),
        kind,
    };
    let lhs = normalize(&id.lhs, kind).ok_or_else(mismatch)?;
    let rhs = normalize(&id.rhs, kind).ok_or_else(mismatch)?;
    let vars = id.vars();
    let mut counters = vec![0u8; vars.len()];
    loop {
        let assign: BTreeMap<char, u8> =
            vars.iter().copied().zip(counters.iter().copied()).collect();
        let mut l = Vec::new();
        let mut r = Vec::new();
        compile(&lhs, n, &assign, &mut l);
        compile(&rhs, n, &assign, &mut r);
        out.push(Instance {
            lhs: l.into_boxed_slice(),
            rhs: r.into_boxed_slice(),
        });
        let mut i = counters.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            counters[i] += 1;
            if (counters[i] as usize) < n {
                break;
            }
            counters[i] = 0;
        }
        if counters.is_empty() {
            return Ok(());
        }
    }
}

fn cell_count(kind: SearchKind, n: usize) -> usize {
    match kind {
        SearchKind::Semigroup => n * n,
        SearchKind::UnarySemigroup => n * n + n,
        SearchKind::Bimagma => 2 * n * n,
    }
}

fn build_algebra(kind: SearchKind, n: usize, cells: &[u8]) -> Algebra {
    match kind {
        SearchKind::Bimagma => Algebra::Bimagma(FiniteBimagma::from_flat(
            n,
            cells[..n * n].to_vec(),
            cells[n * n..].to_vec(),
        )),
        SearchKind::UnarySemigroup => Algebra::UnarySemigroup(
            FiniteUnarySemigroup::from_flat(n, cells[..n * n].to_vec(), cells[n * n..].to_vec())
                .expect("search invariant: completed tables are valid and associative"),
        ),
        SearchKind::Semigroup => Algebra::UnarySemigroup(
            FiniteUnarySemigroup::from_flat(n, cells.to_vec(), (0..n as Elem).collect())
                .expect("search invariant: completed tables are valid and associative"),
        ),
    }
}

#[derive(Clone, Debug)]
enum EvalOut {
    Val(u8),
    Blocked { cell: usize, at_last: bool },
}

fn eval(prog: &[Op], cells: &[u8], n: usize, stack: &mut Vec<u8>) -> EvalOut {
    stack.clear();
    let last = prog.len() - 1;
    for (k, op) in prog.iter().enumerate() {
        match *op {
            Op::Push(v) => stack.push(v),
            Op::Look1(base) => {
                let i = stack.pop().expect("compiled program is well-formed") as usize;
                let cell = base + i;
                match cells[cell] {
                    UNSET => return EvalOut::Blocked { cell, at_last: k == last },
                    v => stack.push(v),
                }
            }
            Op::Look2(base) => {
                let j = stack.pop().expect("compiled program is well-formed") as usize;
                let i = stack.pop().expect("compiled program is well-formed") as usize;
                let cell = base + i * n + j;
                match cells[cell] {
                    UNSET => return EvalOut::Blocked { cell, at_last: k == last },
                    v => stack.push(v),
                }
            }
        }
    }
    EvalOut::Val(stack.pop().expect("compiled program is well-formed"))
}

/// A suspended search position: the partial tables plus where every still-
/// undetermined instance is watching. Watch lists migrate monotonically and
/// are never rewound, so a node can be resumed or cloned freely.
#[derive(Clone, Debug)]
struct Node {
    cells: Vec<u8>,
    watch: Vec<Vec<u32>>,
    unset: usize,
    depth: usize,
}

struct Searcher<'a> {
    n: usize,
    instances: &'a [Instance],
    cells: Vec<u8>,
    watch: Vec<Vec<u32>>,
    unset: usize,
    depth: usize,
    trail: Vec<usize>,
    queue: Vec<usize>,
    scratch: Vec<u8>,
}

impl<'a> Searcher<'a> {
    fn from_node(node: Node, instances: &'a [Instance]) -> Self {
        Searcher {
            n: 0, // set below; kept out of Node since it is spec-global
            instances,
            cells: node.cells,
            watch: node.watch,
            unset: node.unset,
            depth: node.depth,
            trail: Vec::new(),
            queue: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn with_size(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    fn into_node(self) -> Node {
        Node {
            cells: self.cells,
            watch: self.watch,
            unset: self.unset,
            depth: self.depth + 1,
        }
    }

    fn set(&mut self, cell: usize, v: u8) {
        debug_assert_eq!(self.cells[cell], UNSET);
        self.cells[cell] = v;
        self.trail.push(cell);
        self.unset -= 1;
        self.queue.push(cell);
    }

    fn assign(&mut self, cell: usize, v: u8) -> bool {
        match self.cells[cell] {
            UNSET => {
                self.set(cell, v);
                true
            }
            existing => existing == v,
        }
    }

    /// Re-evaluate one instance. `trigger` is the just-assigned cell that
    /// woke it (absent only during root initialization). Keeps the
    /// invariant that every undetermined instance sits in exactly one watch
    /// list; completed instances are parked on their trigger cell so that
    /// backtracking past it re-examines them.
    fn process_instance(&mut self, ins: u32, trigger: Option<usize>) -> bool {
        let inst = &self.instances[ins as usize];
        let l = eval(&inst.lhs, &self.cells, self.n, &mut self.scratch);
        let r = eval(&inst.rhs, &self.cells, self.n, &mut self.scratch);
        match (l, r) {
            (EvalOut::Val(a), EvalOut::Val(b)) => {
                if a != b {
                    return false;
                }
                if let Some(c) = trigger {
                    self.watch[c].push(ins);
                }
                true
            }
            (EvalOut::Val(v), EvalOut::Blocked { cell, at_last: true })
            | (EvalOut::Blocked { cell, at_last: true }, EvalOut::Val(v)) => {
                // the blocked side is one outermost lookup away from done,
                // so that cell's value is forced
                self.set(cell, v);
                self.watch[cell].push(ins);
                true
            }
            (EvalOut::Blocked { cell, .. }, _) | (_, EvalOut::Blocked { cell, .. }) => {
                self.watch[cell].push(ins);
                true
            }
        }
    }

    fn propagate(&mut self) -> bool {
        while let Some(cell) = self.queue.pop() {
            let list = std::mem::take(&mut self.watch[cell]);
            for (k, &ins) in list.iter().enumerate() {
                if !self.process_instance(ins, Some(cell)) {
                    // park the violated instance and the not-yet-rechecked
                    // remainder back where they were
                    self.watch[cell].extend_from_slice(&list[k..]);
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn init_root(&mut self) -> bool {
        for ins in 0..self.instances.len() as u32 {
            if !self.process_instance(ins, None) {
                return false;
            }
        }
        self.propagate()
    }

    fn pick_cell(&self) -> usize {
        let mut best = usize::MAX;
        let mut best_score = 0usize;
        for c in 0..self.cells.len() {
            if self.cells[c] != UNSET {
                continue;
            }
            let score = self.watch[c].len();
            if best == usize::MAX || score > best_score {
                best = c;
                best_score = score;
            }
        }
        best
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let cell = self.trail.pop().expect("trail length checked");
            self.cells[cell] = UNSET;
            self.unset += 1;
        }
        self.queue.clear();
    }

    /// Depth-first completion; `sink` returns `false` to abort the search.
    fn dfs(&mut self, sink: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        if self.unset == 0 {
            return sink(&self.cells);
        }
        let cell = self.pick_cell();
        for v in 0..self.n as u8 {
            let mark = self.trail.len();
            if self.assign(cell, v) && self.propagate() && !self.dfs(sink) {
                self.undo_to(mark);
                return false;
            }
            self.undo_to(mark);
        }
        true
    }
}

fn compile_spec(spec: &SearchSpec) -> Result<Vec<Instance>, SearchError> {
    let mut requirements: Vec<&Identity> = spec.require.iter().collect();
    let associativity;
    if spec.kind != SearchKind::Bimagma {
        associativity = parse_identity("assoc", "(x*y)*z = x*(y*z)")
            .expect("built-in identity parses");
        requirements.push(&associativity);
    }
    let mut instances = Vec::new();
    for id in requirements {
        ground_instances(id, spec.kind, spec.size, &mut instances)?;
    }
    // the forbid identity is only evaluated on completed tables, but its
    // signature must still fit the kind
    if let Some(forbid) = &spec.forbid {
        normalize(&forbid.lhs, spec.kind)
            .and(normalize(&forbid.rhs, spec.kind))
            .ok_or_else(|| SearchError::SignatureMismatch {
                identity: forbid.name.clone(),
                kind: spec.kind,
            })?;
    }
    Ok(instances)
}

fn validate(spec: &SearchSpec) -> Result<(), SearchError> {
    if spec.size == 0 {
        return Err(SearchError::EmptySize);
    }
    let bound = size_bound(spec.kind, !spec.require.is_empty());
    if spec.size > bound {
        return Err(SearchError::BoundExceeded {
            size: spec.size,
            bound,
        });
    }
    Ok(())
}

#[cfg(debug_assertions)]
fn verify_model(spec: &SearchSpec, algebra: &Algebra) {
    for id in &spec.require {
        debug_assert!(
            holds(id, algebra).unwrap_or(false),
            "propagation let a model through that violates {}",
            id.name
        );
    }
}

fn keeps(spec: &SearchSpec, algebra: &Algebra) -> bool {
    match &spec.forbid {
        None => true,
        Some(forbid) => !holds(forbid, algebra)
            .expect("forbid signature validated against the search kind"),
    }
}

/// Core driver: fold all completed models (post forbid filter) through
/// `step`, merging per-subtree accumulators in deterministic frontier
/// order. With a `limit`, runs sequentially and stops early.
fn run_fold<A, FI, FS>(
    spec: &SearchSpec,
    limit: Option<usize>,
    init: FI,
    step: FS,
) -> Result<(Vec<A>, usize, bool), SearchError>
where
    A: Send,
    FI: Fn() -> A + Sync,
    FS: Fn(&mut A, Algebra) + Sync,
{
    validate(spec)?;
    let instances = compile_spec(spec)?;
    let n = spec.size;
    let total = cell_count(spec.kind, n);
    let root = Node {
        cells: vec![UNSET; total],
        watch: vec![Vec::new(); total],
        unset: total,
        depth: 0,
    };
    let mut searcher = Searcher::from_node(root, &instances).with_size(n);
    if !searcher.init_root() {
        return Ok((Vec::new(), 0, true));
    }
    let root = searcher.into_node();

    if let Some(limit) = limit {
        let mut acc = init();
        let mut raw = 0usize;
        let mut searcher = Searcher::from_node(root, &instances).with_size(n);
        let exhausted = searcher.dfs(&mut |cells| {
            let algebra = build_algebra(spec.kind, n, cells);
            #[cfg(debug_assertions)]
            verify_model(spec, &algebra);
            if keeps(spec, &algebra) {
                step(&mut acc, algebra);
                raw += 1;
                raw < limit
            } else {
                true
            }
        });
        return Ok((vec![acc], raw, exhausted));
    }

    let leaves = expand_frontier(root, &instances, n);
    let folded: Vec<(A, usize)> = leaves
        .into_par_iter()
        .map(|leaf| {
            let mut acc = init();
            let mut raw = 0usize;
            let mut consume = |cells: &[u8]| {
                let algebra = build_algebra(spec.kind, n, cells);
                #[cfg(debug_assertions)]
                verify_model(spec, &algebra);
                if keeps(spec, &algebra) {
                    step(&mut acc, algebra);
                    raw += 1;
                }
            };
            match leaf {
                Leaf::Done(cells) => consume(&cells),
                Leaf::Open(node) => {
                    let mut searcher = Searcher::from_node(node, &instances).with_size(n);
                    searcher.dfs(&mut |cells| {
                        consume(cells);
                        true
                    });
                }
            }
            (acc, raw)
        })
        .collect();
    let mut accs = Vec::with_capacity(folded.len());
    let mut raw = 0usize;
    for (a, r) in folded {
        accs.push(a);
        raw += r;
    }
    Ok((accs, raw, true))
}

enum Leaf {
    Done(Vec<u8>),
    Open(Node),
}

/// Split the root's subtree into a deterministic, reasonably balanced set
/// of independent partitions by repeatedly expanding the shallowest open
/// node in place. Leaf order equals sequential depth-first order.
fn expand_frontier(root: Node, instances: &[Instance], n: usize) -> Vec<Leaf> {
    if root.unset == 0 {
        return vec![Leaf::Done(root.cells)];
    }
    let target = rayon::current_num_threads().saturating_mul(8).max(8);
    let cap = 4096;
    let mut leaves: Vec<Leaf> = vec![Leaf::Open(root)];
    let mut open = 1usize;
    while open > 0 && open < target && leaves.len() < cap {
        let (idx, _) = match leaves
            .iter()
            .enumerate()
            .filter_map(|(i, l)| match l {
                Leaf::Open(node) => Some((i, node.depth)),
                Leaf::Done(_) => None,
            })
            .min_by_key(|&(i, depth)| (depth, i))
        {
            Some(found) => found,
            None => break,
        };
        let Leaf::Open(node) = leaves.remove(idx) else {
            unreachable!("index selected from open leaves");
        };
        open -= 1;
        let cell = {
            let probe = Searcher::from_node(node.clone(), instances).with_size(n);
            probe.pick_cell()
        };
        let mut children = Vec::new();
        for v in 0..n as u8 {
            let mut searcher = Searcher::from_node(node.clone(), instances).with_size(n);
            if searcher.assign(cell, v) && searcher.propagate() {
                let child = searcher.into_node();
                if child.unset == 0 {
                    children.push(Leaf::Done(child.cells));
                } else {
                    open += 1;
                    children.push(Leaf::Open(child));
                }
            }
        }
        leaves.splice(idx..idx, children);
    }
    leaves
}

fn canonical_bytes(algebra: &Algebra, dedup: Dedup) -> Vec<u8> {
    match dedup {
        Dedup::None => unreachable!("no canonicalization for dedup=None"),
        Dedup::Iso => algebra.canonical_form().bytes,
        Dedup::IsoAntiIso => match algebra {
            Algebra::UnarySemigroup(s) => s.canonical_form_with_anti().bytes,
            Algebra::Bimagma(b) => b.canonical_form_with_anti().bytes,
        },
    }
}

fn finish(spec: &SearchSpec, raw_models: Vec<Algebra>, count_raw: usize, exhausted: bool) -> SearchResult {
    let models = match spec.dedup {
        Dedup::None => raw_models,
        dedup => {
            let mut seen: BTreeMap<Vec<u8>, Algebra> = BTreeMap::new();
            for m in raw_models {
                seen.entry(canonical_bytes(&m, dedup)).or_insert(m);
            }
            seen.into_values().collect()
        }
    };
    SearchResult {
        models,
        count_raw,
        exhausted,
    }
}

/// Complete enumeration of the spec's models up to the size bound.
pub fn enumerate(spec: &SearchSpec) -> Result<SearchResult, SearchError> {
    let (chunks, raw, exhausted) = run_fold(spec, None, Vec::new, |acc, m| acc.push(m))?;
    let models = chunks.into_iter().flatten().collect();
    Ok(finish(spec, models, raw, exhausted))
}

/// Like [`enumerate`] but stops after `limit` (pre-dedup) models; the
/// result then reports `exhausted: false` unless the space ran out first.
pub fn enumerate_with_limit(spec: &SearchSpec, limit: usize) -> Result<SearchResult, SearchError> {
    if limit == 0 {
        return Ok(SearchResult {
            models: Vec::new(),
            count_raw: 0,
            exhausted: false,
        });
    }
    let (chunks, raw, exhausted) = run_fold(spec, Some(limit), Vec::new, |acc, m| acc.push(m))?;
    let models = chunks.into_iter().flatten().collect();
    Ok(finish(spec, models, raw, exhausted))
}

/// First model satisfying `require` and violating `forbid`, if any exists
/// within the bound.
pub fn find_witness(spec: &SearchSpec) -> Result<Option<Algebra>, SearchError> {
    Ok(enumerate_with_limit(spec, 1)?.models.into_iter().next())
}

/// Enumerate, but keep only the set of canonical forms — mirror classes
/// collapse when the spec's dedup mode says so, and `Dedup::None` still
/// canonicalizes (the raw volume is reported by `count_raw`). Memory stays
/// proportional to the number of classes, not the number of models.
pub fn canonical_forms(spec: &SearchSpec) -> Result<FormSweep, SearchError> {
    let to_bytes = |m: &Algebra| match spec.dedup {
        Dedup::None => match m {
            Algebra::UnarySemigroup(s) => s.canonical_form().bytes,
            Algebra::Bimagma(b) => b.canonical_form().bytes,
        },
        dedup => canonical_bytes(m, dedup),
    };
    let (chunks, raw, exhausted) = run_fold(spec, None, BTreeSet::new, |acc: &mut BTreeSet<Vec<u8>>, m| {
        acc.insert(to_bytes(&m));
    })?;
    let mut forms = BTreeSet::new();
    for c in chunks {
        forms.extend(c);
    }
    Ok(FormSweep {
        forms,
        count_raw: raw,
        exhausted,
    })
}

/// Exact model count for an unconstrained sweep. Semigroup kinds run the
/// pruned enumerator; bimagma counts use closed forms (orbit counting for
/// the dedup modes), cross-checked elsewhere against materialized sweeps.
pub fn count_models(kind: SearchKind, n: usize, dedup: Dedup) -> Result<usize, SearchError> {
    if n == 0 {
        return Err(SearchError::EmptySize);
    }
    if n > 3 {
        return Err(SearchError::BoundExceeded { size: n, bound: 3 });
    }
    match kind {
        SearchKind::Bimagma => Ok(match dedup {
            Dedup::None => (n as u64).pow(2 * (n * n) as u32) as usize,
            Dedup::Iso => naive::burnside_bimagma_orbits(n, false) as usize,
            Dedup::IsoAntiIso => naive::burnside_bimagma_orbits(n, true) as usize,
        }),
        SearchKind::Semigroup | SearchKind::UnarySemigroup => {
            let spec = SearchSpec {
                kind,
                size: n,
                require: Vec::new(),
                forbid: None,
                dedup,
            };
            let result = enumerate(&spec)?;
            Ok(match dedup {
                Dedup::None => result.count_raw,
                _ => result.models.len(),
            })
        }
    }
}
