//! Immutable finite-algebra values: operation tables, validation, idempotent
//! detection, isomorphism canonicalization, and the text file format.
//!
//! Elements are the indices `0..n`. Tables are row-major: `table[i][j] = i op j`,
//! so the row label is the left argument. Printed letters `a, b, c, ...` in the
//! sources these models come from map to `0, 1, 2, ...` in file order.

use itertools::Itertools;
use std::fmt;
use thiserror::Error;

/// Element index inside a finite algebra.
pub type Elem = u8;

/// Upper bound on algebra size accepted by validation. Canonicalization is
/// brute force over all `n!` relabelings, so practical sizes are far smaller;
/// the cap just keeps table files and element indices sane.
pub const MAX_SIZE: usize = 32;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum AlgebraError {
    #[error("algebra size must be at least 1")]
    EmptySize,
    #[error("algebra size {0} exceeds the supported maximum {MAX_SIZE}")]
    TooLarge(usize),
    #[error("table row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("inv vector has length {len}, expected {size}")]
    BadInvLength { len: usize, size: usize },
    #[error("table entry at ({row}, {col}) is {value}, not in [0, {size})")]
    OutOfRangeEntry {
        row: usize,
        col: usize,
        value: usize,
        size: usize,
    },
    #[error("inv entry at {index} is {value}, not in [0, {size})")]
    OutOfRangeInv {
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("multiplication is not associative: ({i}·{j})·{k} ≠ {i}·({j}·{k})")]
    NonAssociative { i: Elem, j: Elem, k: Elem },
}

/// Which of the two signatures an algebra or canonical form belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    UnarySemigroup,
    Bimagma,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraKind::UnarySemigroup => write!(f, "unary_semigroup"),
            AlgebraKind::Bimagma => write!(f, "bimagma"),
        }
    }
}

/// A finite semigroup `(S, ·)` with an arbitrary unary operation `′`.
///
/// Associativity of `mul` is part of the type's invariant and is checked at
/// construction; the unary map is unconstrained.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FiniteUnarySemigroup {
    n: usize,
    mul: Vec<Elem>, // row-major n×n
    inv: Vec<Elem>, // length n
}

/// A finite set with two binary operations `\` (left division) and `/`
/// (right division). No law is assumed at construction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FiniteBimagma {
    n: usize,
    ld: Vec<Elem>, // row-major n×n
    rd: Vec<Elem>, // row-major n×n
}

/// Lexicographically minimal serialization of an algebra's tables over all
/// permutations of `[0, n)`. Two algebras of the same kind have equal
/// canonical forms iff they are isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub kind: AlgebraKind,
    pub bytes: Vec<u8>,
}

fn check_square(n: usize, table: &[Vec<Elem>]) -> Result<(), AlgebraError> {
    if table.len() != n {
        return Err(AlgebraError::NotSquare {
            row: table.len(),
            len: 0,
            size: n,
        });
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(AlgebraError::NotSquare {
                row,
                len: r.len(),
                size: n,
            });
        }
    }
    Ok(())
}

fn check_range(n: usize, table: &[Vec<Elem>]) -> Result<(), AlgebraError> {
    for (row, r) in table.iter().enumerate() {
        for (col, &v) in r.iter().enumerate() {
            if (v as usize) >= n {
                return Err(AlgebraError::OutOfRangeEntry {
                    row,
                    col,
                    value: v as usize,
                    size: n,
                });
            }
        }
    }
    Ok(())
}

fn check_size(n: usize) -> Result<(), AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::EmptySize);
    }
    if n > MAX_SIZE {
        return Err(AlgebraError::TooLarge(n));
    }
    Ok(())
}

fn flatten(table: &[Vec<Elem>]) -> Vec<Elem> {
    table.iter().flatten().copied().collect()
}

impl FiniteUnarySemigroup {
    /// Validate raw tables and construct. Checks shape, entry ranges, and
    /// associativity of `mul`, reporting the first violating triple in
    /// lexicographic order.
    pub fn from_tables(mul: &[Vec<Elem>], inv: &[Elem]) -> Result<Self, AlgebraError> {
        let n = mul.len();
        check_size(n)?;
        check_square(n, mul)?;
        check_range(n, mul)?;
        if inv.len() != n {
            return Err(AlgebraError::BadInvLength { len: inv.len(), size: n });
        }
        for (index, &v) in inv.iter().enumerate() {
            if (v as usize) >= n {
                return Err(AlgebraError::OutOfRangeInv {
                    index,
                    value: v as usize,
                    size: n,
                });
            }
        }
        Self::from_flat(n, flatten(mul), inv.to_vec())
    }

    /// Construct from row-major flat tables whose shape and ranges are already
    /// correct. Still checks associativity.
    pub(crate) fn from_flat(n: usize, mul: Vec<Elem>, inv: Vec<Elem>) -> Result<Self, AlgebraError> {
        debug_assert_eq!(mul.len(), n * n);
        debug_assert_eq!(inv.len(), n);
        let s = FiniteUnarySemigroup { n, mul, inv };
        if let Some((i, j, k)) = s.first_nonassociative_triple() {
            return Err(AlgebraError::NonAssociative { i, j, k });
        }
        Ok(s)
    }

    fn first_nonassociative_triple(&self) -> Option<(Elem, Elem, Elem)> {
        let n = self.n as Elem;
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul(i, j);
                for k in 0..n {
                    if self.mul(ij, k) != self.mul(i, self.mul(j, k)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, i: Elem, j: Elem) -> Elem {
        self.mul[i as usize * self.n + j as usize]
    }

    #[inline]
    pub fn inv(&self, i: Elem) -> Elem {
        self.inv[i as usize]
    }

    /// True iff `e·e = e`.
    pub fn is_idempotent(&self, e: Elem) -> bool {
        self.mul(e, e) == e
    }

    /// All idempotent elements in increasing order.
    pub fn idempotents(&self) -> Vec<Elem> {
        (0..self.n as Elem).filter(|&e| self.is_idempotent(e)).collect()
    }

    /// Apply a relabeling permutation: element `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[Elem]) -> Self {
        debug_assert!(is_permutation(self.n, perm));
        let n = self.n;
        let mut mul = vec![0; n * n];
        let mut inv = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                mul[perm[i] as usize * n + perm[j] as usize] =
                    perm[self.mul[i * n + j] as usize];
            }
            inv[perm[i] as usize] = perm[self.inv[i] as usize];
        }
        // Relabeling preserves associativity, so skip revalidation.
        FiniteUnarySemigroup { n, mul, inv }
    }

    /// The opposite semigroup: `i ·op j = j · i`, same unary map. Transposing
    /// preserves associativity.
    pub fn opposite(&self) -> Self {
        let n = self.n;
        let mut mul = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = self.mul[j * n + i];
            }
        }
        FiniteUnarySemigroup { n, mul, inv: self.inv.clone() }
    }

    fn serialize_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(1 + self.mul.len() + self.inv.len());
        b.push(self.n as u8);
        b.extend_from_slice(&self.mul);
        b.extend_from_slice(&self.inv);
        b
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm {
            kind: AlgebraKind::UnarySemigroup,
            bytes: min_over_relabelings(self.n, |perm| self.relabel(perm).serialize_bytes()),
        }
    }

    /// Canonical form joint over relabelings of both the algebra and its
    /// opposite; equal iff isomorphic or anti-isomorphic.
    pub fn canonical_form_with_anti(&self) -> CanonicalForm {
        let a = self.canonical_form();
        let b = self.opposite().canonical_form();
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("unary_semigroup {}\n", self.n);
        for i in 0..self.n {
            let row = &self.mul[i * self.n..(i + 1) * self.n];
            out.push_str(&row.iter().map(|v| v.to_string()).join(" "));
            out.push('\n');
        }
        out.push_str("inv: ");
        out.push_str(&self.inv.iter().map(|v| v.to_string()).join(" "));
        out.push('\n');
        out
    }
}

impl FiniteBimagma {
    /// Validate raw tables and construct. Only shape and entry ranges are
    /// checked; a bimagma carries no laws.
    pub fn from_tables(ld: &[Vec<Elem>], rd: &[Vec<Elem>]) -> Result<Self, AlgebraError> {
        let n = ld.len();
        check_size(n)?;
        check_square(n, ld)?;
        check_square(n, rd)?;
        check_range(n, ld)?;
        check_range(n, rd)?;
        Ok(FiniteBimagma {
            n,
            ld: flatten(ld),
            rd: flatten(rd),
        })
    }

    pub(crate) fn from_flat(n: usize, ld: Vec<Elem>, rd: Vec<Elem>) -> Self {
        debug_assert_eq!(ld.len(), n * n);
        debug_assert_eq!(rd.len(), n * n);
        FiniteBimagma { n, ld, rd }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ld(&self, i: Elem, j: Elem) -> Elem {
        self.ld[i as usize * self.n + j as usize]
    }

    #[inline]
    pub fn rd(&self, i: Elem, j: Elem) -> Elem {
        self.rd[i as usize * self.n + j as usize]
    }

    /// Apply a relabeling permutation: element `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[Elem]) -> Self {
        debug_assert!(is_permutation(self.n, perm));
        let n = self.n;
        let mut ld = vec![0; n * n];
        let mut rd = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (pi, pj) = (perm[i] as usize, perm[j] as usize);
                ld[pi * n + pj] = perm[self.ld[i * n + j] as usize];
                rd[pi * n + pj] = perm[self.rd[i * n + j] as usize];
            }
        }
        FiniteBimagma { n, ld, rd }
    }

    /// The left-right dual: `i \m j = j / i` and `i /m j = j \ i`. This is the
    /// bimagma counterpart of the opposite semigroup — the division bimagma of
    /// an opposite semigroup is the mirror of the original division bimagma.
    pub fn mirror(&self) -> Self {
        let n = self.n;
        let mut ld = vec![0; n * n];
        let mut rd = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                ld[i * n + j] = self.rd[j * n + i];
                rd[i * n + j] = self.ld[j * n + i];
            }
        }
        FiniteBimagma { n, ld, rd }
    }

    fn serialize_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(1 + 2 * self.ld.len());
        b.push(self.n as u8);
        b.extend_from_slice(&self.ld);
        b.extend_from_slice(&self.rd);
        b
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm {
            kind: AlgebraKind::Bimagma,
            bytes: min_over_relabelings(self.n, |perm| self.relabel(perm).serialize_bytes()),
        }
    }

    /// Canonical form joint over relabelings of both the bimagma and its
    /// mirror; equal iff isomorphic or mirror-isomorphic.
    pub fn canonical_form_with_anti(&self) -> CanonicalForm {
        let a = self.canonical_form();
        let b = self.mirror().canonical_form();
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("bimagma {}\n", self.n);
        for table in [&self.ld, &self.rd] {
            for i in 0..self.n {
                let row = &table[i * self.n..(i + 1) * self.n];
                out.push_str(&row.iter().map(|v| v.to_string()).join(" "));
                out.push('\n');
            }
        }
        out
    }
}

fn is_permutation(n: usize, perm: &[Elem]) -> bool {
    let mut seen = vec![false; n];
    perm.len() == n
        && perm.iter().all(|&p| {
            let ok = (p as usize) < n && !seen[p as usize];
            if ok {
                seen[p as usize] = true;
            }
            ok
        })
}

fn min_over_relabelings(n: usize, mut serialize: impl FnMut(&[Elem]) -> Vec<u8>) -> Vec<u8> {
    (0..n as Elem)
        .permutations(n)
        .map(|perm| serialize(&perm))
        .min()
        .expect("n ≥ 1 guarantees at least one permutation")
}

/// Either kind of algebra, as read from a file.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Algebra {
    UnarySemigroup(FiniteUnarySemigroup),
    Bimagma(FiniteBimagma),
}

impl Algebra {
    pub fn kind(&self) -> AlgebraKind {
        match self {
            Algebra::UnarySemigroup(_) => AlgebraKind::UnarySemigroup,
            Algebra::Bimagma(_) => AlgebraKind::Bimagma,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Algebra::UnarySemigroup(s) => s.size(),
            Algebra::Bimagma(b) => b.size(),
        }
    }

    pub fn as_unary_semigroup(&self) -> Option<&FiniteUnarySemigroup> {
        match self {
            Algebra::UnarySemigroup(s) => Some(s),
            Algebra::Bimagma(_) => None,
        }
    }

    pub fn as_bimagma(&self) -> Option<&FiniteBimagma> {
        match self {
            Algebra::Bimagma(b) => Some(b),
            Algebra::UnarySemigroup(_) => None,
        }
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        match self {
            Algebra::UnarySemigroup(s) => s.canonical_form(),
            Algebra::Bimagma(b) => b.canonical_form(),
        }
    }

    pub fn to_file_string(&self) -> String {
        match self {
            Algebra::UnarySemigroup(s) => s.to_file_string(),
            Algebra::Bimagma(b) => b.to_file_string(),
        }
    }
}

impl From<FiniteUnarySemigroup> for Algebra {
    fn from(s: FiniteUnarySemigroup) -> Self {
        Algebra::UnarySemigroup(s)
    }
}

impl From<FiniteBimagma> for Algebra {
    fn from(b: FiniteBimagma) -> Self {
        Algebra::Bimagma(b)
    }
}

impl fmt::Display for FiniteUnarySemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_string())
    }
}

impl fmt::Display for FiniteBimagma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_string())
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_string())
    }
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum AlgebraParseError {
    #[error("missing header line (expected 'unary_semigroup <n>' or 'bimagma <n>')")]
    MissingHeader,
    #[error("bad header line {0:?}")]
    BadHeader(String),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("expected {expected} more table row(s), file ended early")]
    MissingRows { expected: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    BadRowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing 'inv:' line")]
    MissingInv,
    #[error("unexpected trailing content {0:?}")]
    TrailingContent(String),
    #[error(transparent)]
    Invalid(#[from] AlgebraError),
}

/// Parse the algebra file format.
///
/// ```text
/// unary_semigroup <n>      |  bimagma <n>
/// <n rows of mul>          |  <n rows of ld>
/// inv: i0 i1 ... i(n-1)    |  <n rows of rd>
/// ```
///
/// `#` starts a comment (to end of line); blank lines are ignored. The writer
/// ([`Algebra::to_file_string`]) emits a canonical comment-free form, and
/// writing a parsed canonical file reproduces it byte for byte.
pub fn parse_algebra(text: &str) -> Result<Algebra, AlgebraParseError> {
    let mut lines = text
        .lines()
        .map(|l| match l.find('#') {
            Some(pos) => l[..pos].trim(),
            None => l.trim(),
        })
        .filter(|l| !l.is_empty());

    let header = lines.next().ok_or(AlgebraParseError::MissingHeader)?;
    let mut parts = header.split_whitespace();
    let kind = parts.next().unwrap_or_default();
    let n: usize = parts
        .next()
        .ok_or_else(|| AlgebraParseError::BadHeader(header.to_string()))?
        .parse()
        .map_err(|_| AlgebraParseError::BadHeader(header.to_string()))?;
    if parts.next().is_some() {
        return Err(AlgebraParseError::BadHeader(header.to_string()));
    }
    check_size(n).map_err(AlgebraError::from)?;

    let read_row = |lines: &mut dyn Iterator<Item = &str>, row: usize| -> Result<Vec<Elem>, AlgebraParseError> {
        let line = lines
            .next()
            .ok_or(AlgebraParseError::MissingRows { expected: 1 })?;
        let entries: Vec<Elem> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Elem>()
                    .map_err(|_| AlgebraParseError::BadNumber(tok.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if entries.len() != n {
            return Err(AlgebraParseError::BadRowLength {
                row,
                expected: n,
                found: entries.len(),
            });
        }
        Ok(entries)
    };

    let algebra = match kind {
        "unary_semigroup" => {
            let mut mul = Vec::with_capacity(n);
            for row in 0..n {
                mul.push(read_row(&mut lines, row)?);
            }
            let inv_line = lines.next().ok_or(AlgebraParseError::MissingInv)?;
            let rest = inv_line
                .strip_prefix("inv:")
                .ok_or(AlgebraParseError::MissingInv)?;
            let inv: Vec<Elem> = rest
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<Elem>()
                        .map_err(|_| AlgebraParseError::BadNumber(tok.to_string()))
                })
                .collect::<Result<_, _>>()?;
            if inv.len() != n {
                return Err(AlgebraParseError::BadRowLength {
                    row: n,
                    expected: n,
                    found: inv.len(),
                });
            }
            Algebra::UnarySemigroup(FiniteUnarySemigroup::from_tables(&mul, &inv)?)
        }
        "bimagma" => {
            let mut ld = Vec::with_capacity(n);
            let mut rd = Vec::with_capacity(n);
            for row in 0..n {
                ld.push(read_row(&mut lines, row)?);
            }
            for row in 0..n {
                rd.push(read_row(&mut lines, n + row)?);
            }
            Algebra::Bimagma(FiniteBimagma::from_tables(&ld, &rd)?)
        }
        _ => return Err(AlgebraParseError::BadHeader(header.to_string())),
    };

    if let Some(extra) = lines.next() {
        return Err(AlgebraParseError::TrailingContent(extra.to_string()));
    }
    Ok(algebra)
}
