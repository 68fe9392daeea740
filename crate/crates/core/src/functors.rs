//! The two object maps between unary semigroups and their division
//! bimagmas, plus verification that they are mutually inverse on the nose.
//!
//! Forward: `x\y = x'·y`, `x/y = x·y'`. Backward: `x' = (x\x)/x` (cross-
//! checked against `x\(x/x)`) and `x·y = x/y'` (cross-checked against
//! `x'\y`). Any disagreement between an expansion and its cross-check is
//! reported, never silently resolved.

use crate::algebra::{Algebra, Elem, FiniteBimagma, FiniteUnarySemigroup};
use std::fmt;
use thiserror::Error;

/// Where the reconstruction out of a bimagma is ambiguous.
///
/// `prime_disagreements` lists elements `x` with `(x\x)/x ≠ x\(x/x)`;
/// `mul_disagreements` lists pairs `(x, y)` with `x/y' ≠ x'\y`, where `'`
/// is the `(x\x)/x` expansion. Reconstruction proceeds only when both are
/// empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub ok: bool,
    pub prime_disagreements: Vec<Elem>,
    pub mul_disagreements: Vec<(Elem, Elem)>,
}

impl fmt::Display for ReconstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "reconstruction well-defined");
        }
        write!(f, "reconstruction ill-defined:")?;
        if !self.prime_disagreements.is_empty() {
            write!(f, " (x\\x)/x differs from x\\(x/x) at x in {:?};", self.prime_disagreements)?;
        }
        if !self.mul_disagreements.is_empty() {
            write!(f, " x/y' differs from x'\\y at (x,y) in {:?}", self.mul_disagreements)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("{0}")]
    IllDefined(ReconstructionReport),
    #[error("reconstructed multiplication is not associative at ({i}, {j}, {k})")]
    NonAssociative { i: Elem, j: Elem, k: Elem },
}

/// The division bimagma of a unary semigroup: `ld[i][j] = i'·j`,
/// `rd[i][j] = i·j'`.
pub fn to_division_bimagma(s: &FiniteUnarySemigroup) -> FiniteBimagma {
    let n = s.size();
    let mut ld = Vec::with_capacity(n * n);
    let mut rd = Vec::with_capacity(n * n);
    for i in 0..n as Elem {
        for j in 0..n as Elem {
            ld.push(s.mul(s.inv(i), j));
            rd.push(s.mul(i, s.inv(j)));
        }
    }
    FiniteBimagma::from_flat(n, ld, rd)
}

/// Check whether both expansions of `'` and both expansions of `·` agree on
/// every element of `b`.
pub fn reconstruction_report(b: &FiniteBimagma) -> ReconstructionReport {
    let n = b.size() as Elem;
    let mut prime_disagreements = Vec::new();
    let mut inv = Vec::with_capacity(n as usize);
    for x in 0..n {
        let left_first = b.rd(b.ld(x, x), x);
        let right_first = b.ld(x, b.rd(x, x));
        if left_first != right_first {
            prime_disagreements.push(x);
        }
        inv.push(left_first);
    }
    let mut mul_disagreements = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if b.rd(x, inv[y as usize]) != b.ld(inv[x as usize], y) {
                mul_disagreements.push((x, y));
            }
        }
    }
    let ok = prime_disagreements.is_empty() && mul_disagreements.is_empty();
    ReconstructionReport { ok, prime_disagreements, mul_disagreements }
}

/// Reconstruct the unary semigroup of a division bimagma: `x' = (x\x)/x`,
/// `x·y = x/y'`. Fails if either expansion is ambiguous (with the full
/// report) or if the recovered multiplication is not associative.
pub fn to_unary_semigroup(b: &FiniteBimagma) -> Result<FiniteUnarySemigroup, FunctorError> {
    let report = reconstruction_report(b);
    if !report.ok {
        return Err(FunctorError::IllDefined(report));
    }
    let n = b.size() as Elem;
    let inv: Vec<Elem> = (0..n).map(|x| b.rd(b.ld(x, x), x)).collect();
    let mul: Vec<Vec<Elem>> = (0..n)
        .map(|x| (0..n).map(|y| b.rd(x, inv[y as usize])).collect())
        .collect();
    FiniteUnarySemigroup::from_tables(&mul, &inv).map_err(|e| match e {
        crate::algebra::AlgebraError::NonAssociative { i, j, k } => {
            FunctorError::NonAssociative { i, j, k }
        }
        other => unreachable!("reconstructed tables are shape- and range-valid: {other}"),
    })
}

/// True iff applying both constructions returns a table-identical algebra.
///
/// For a unary semigroup input, a failed reconstruction of its division
/// bimagma counts as an unsuccessful round trip (`Ok(false)`). For a bimagma
/// input, reconstruction is a precondition, so its failure propagates.
pub fn roundtrip_check(a: &Algebra) -> Result<bool, FunctorError> {
    match a {
        Algebra::UnarySemigroup(s) => {
            let b = to_division_bimagma(s);
            match to_unary_semigroup(&b) {
                Ok(back) => Ok(back == *s),
                Err(_) => Ok(false),
            }
        }
        Algebra::Bimagma(b) => {
            let s = to_unary_semigroup(b)?;
            Ok(to_division_bimagma(&s) == *b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{holds_on_bimagma, holds_on_semigroup, parse_identity};
    use proptest::prelude::*;

    fn z2() -> FiniteUnarySemigroup {
        FiniteUnarySemigroup::from_tables(&[vec![0, 1], vec![1, 0]], &[0, 1]).unwrap()
    }

    #[test]
    fn self_inverse_group_divisions_collapse_to_multiplication() {
        let b = to_division_bimagma(&z2());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(b.ld(i, j), i ^ j);
                assert_eq!(b.rd(i, j), i ^ j);
            }
        }
    }

    #[test]
    fn one_element_semigroup_maps_to_one_element_bimagma() {
        let s = FiniteUnarySemigroup::from_tables(&[vec![0]], &[0]).unwrap();
        let b = to_division_bimagma(&s);
        assert_eq!(b.size(), 1);
        assert_eq!(b.ld(0, 0), 0);
        assert_eq!(b.rd(0, 0), 0);
    }

    #[test]
    fn band_division_rows_come_from_the_inverse_row() {
        let s = FiniteUnarySemigroup::from_tables(
            &[
                vec![0, 3, 0, 3],
                vec![2, 1, 2, 1],
                vec![2, 1, 2, 1],
                vec![0, 3, 0, 3],
            ],
            &[1, 0, 0, 0],
        )
        .unwrap();
        let b = to_division_bimagma(&s);
        // ld row i is the mul row of i'; rd column j is the mul column of j'
        let expect_ld = [[2, 1, 2, 1], [0, 3, 0, 3], [0, 3, 0, 3], [0, 3, 0, 3]];
        let expect_rd = [[3, 0, 0, 0], [1, 2, 2, 2], [1, 2, 2, 2], [3, 0, 0, 0]];
        for i in 0..4u8 {
            for j in 0..4u8 {
                assert_eq!(b.ld(i, j), expect_ld[i as usize][j as usize]);
                assert_eq!(b.rd(i, j), expect_rd[i as usize][j as usize]);
            }
        }
    }

    #[test]
    fn xor_bimagma_reconstructs_z2_with_identity_inverse() {
        let xor = vec![vec![0, 1], vec![1, 0]];
        let b = FiniteBimagma::from_tables(&xor, &xor).unwrap();
        let s = to_unary_semigroup(&b).unwrap();
        assert_eq!(s, z2());
        assert_eq!(s.inv(0), 0);
        assert_eq!(s.inv(1), 1);
    }

    #[test]
    fn well_defined_reconstruction_can_still_be_nonassociative() {
        // Both prime expansions agree (identity) and both product expansions
        // agree on this table, yet the recovered product is not associative.
        let t = vec![vec![0, 2, 0], vec![2, 1, 0], vec![0, 0, 2]];
        let b = FiniteBimagma::from_tables(&t, &t).unwrap();
        let report = reconstruction_report(&b);
        assert!(report.ok);
        assert_eq!(
            to_unary_semigroup(&b),
            Err(FunctorError::NonAssociative { i: 0, j: 0, k: 1 })
        );
    }

    #[test]
    fn disagreeing_expansions_are_reported_cell_by_cell() {
        let b = FiniteBimagma::from_tables(
            &[vec![1, 0], vec![0, 0]],
            &[vec![0, 0], vec![0, 0]],
        )
        .unwrap();
        let report = reconstruction_report(&b);
        assert!(!report.ok);
        assert_eq!(report.prime_disagreements, vec![0]);
        assert_eq!(report.mul_disagreements, vec![(0, 0), (1, 0)]);
        assert_eq!(to_unary_semigroup(&b), Err(FunctorError::IllDefined(report)));
    }

    #[test]
    fn roundtrip_holds_exactly_when_the_weak_laws_do_at_size_two() {
        let i1 = parse_identity("I1", "(x'*x)*x' = x'").unwrap();
        let tl = parse_identity("tech-left", "x''*y = x*y").unwrap();
        let tr = parse_identity("tech-right", "x*y'' = x*y").unwrap();
        let mut lawful = 0;
        let mut lawless_false = 0;
        for bits in 0..(1u32 << 4) {
            let mul = vec![
                vec![(bits & 1) as u8, ((bits >> 1) & 1) as u8],
                vec![((bits >> 2) & 1) as u8, ((bits >> 3) & 1) as u8],
            ];
            for inv_bits in 0..4u32 {
                let inv = vec![(inv_bits & 1) as u8, ((inv_bits >> 1) & 1) as u8];
                let Ok(s) = FiniteUnarySemigroup::from_tables(&mul, &inv) else {
                    continue;
                };
                let weak = holds_on_semigroup(&i1, &s)
                    && holds_on_semigroup(&tl, &s)
                    && holds_on_semigroup(&tr, &s);
                let round = roundtrip_check(&Algebra::UnarySemigroup(s)).unwrap();
                if weak {
                    lawful += 1;
                    assert!(round, "mul={mul:?} inv={inv:?}");
                } else if !round {
                    lawless_false += 1;
                }
            }
        }
        assert!(lawful > 0);
        // a witness that the weak laws are not decorative: some semigroup
        // violating them fails to round-trip
        assert!(lawless_false > 0);
    }

    #[test]
    fn double_inverse_drift_breaks_the_roundtrip() {
        // left-zero product with a constant inverse violates x''y = xy
        let s = FiniteUnarySemigroup::from_tables(&[vec![0, 0], vec![1, 1]], &[1, 1]).unwrap();
        let tl = parse_identity("tech-left", "x''*y = x*y").unwrap();
        assert!(!holds_on_semigroup(&tl, &s));
        assert_eq!(roundtrip_check(&Algebra::UnarySemigroup(s)), Ok(false));
    }

    #[test]
    fn structural_laws_give_a_semigroup_and_complement_laws_give_the_roundtrip() {
        let b1 = parse_identity("B1", r"(x\y)/z = x\(y/z)").unwrap();
        let b2 = parse_identity("B2", r"x/y' = x'\y").unwrap();
        let comp1 = parse_identity("comp1", r"x'\y' = x/y").unwrap();
        let comp2 = parse_identity("comp2", r"x'/y' = x\y").unwrap();
        let mut reconstructed = 0;
        let mut round_tripped = 0;
        for ld_bits in 0..(1u32 << 4) {
            for rd_bits in 0..(1u32 << 4) {
                let cell = |bits: u32, idx: u32| ((bits >> idx) & 1) as u8;
                let ld = vec![
                    vec![cell(ld_bits, 0), cell(ld_bits, 1)],
                    vec![cell(ld_bits, 2), cell(ld_bits, 3)],
                ];
                let rd = vec![
                    vec![cell(rd_bits, 0), cell(rd_bits, 1)],
                    vec![cell(rd_bits, 2), cell(rd_bits, 3)],
                ];
                let m = FiniteBimagma::from_tables(&ld, &rd).unwrap();
                let sat = |id| holds_on_bimagma(id, &m).unwrap();
                if sat(&b1) && sat(&b2) {
                    reconstructed += 1;
                    assert!(
                        to_unary_semigroup(&m).is_ok(),
                        "ld={ld:?} rd={rd:?}"
                    );
                }
                if sat(&b1) && sat(&comp1) && sat(&comp2) {
                    round_tripped += 1;
                    assert_eq!(
                        roundtrip_check(&Algebra::Bimagma(m)),
                        Ok(true),
                        "ld={ld:?} rd={rd:?}"
                    );
                }
            }
        }
        assert!(reconstructed > 0);
        assert!(round_tripped > 0);
    }

    #[test]
    fn structural_laws_alone_do_not_force_the_roundtrip() {
        // Constant primes leave the off-diagonal division cells unobserved
        // by the reconstruction, so they are not recovered. The right
        // division here has one live cell the composite never touches.
        let m = FiniteBimagma::from_tables(
            &[vec![0, 0], vec![0, 0]],
            &[vec![0, 0], vec![0, 1]],
        )
        .unwrap();
        let b1 = parse_identity("B1", r"(x\y)/z = x\(y/z)").unwrap();
        let b2 = parse_identity("B2", r"x/y' = x'\y").unwrap();
        let comp1 = parse_identity("comp1", r"x'\y' = x/y").unwrap();
        assert!(holds_on_bimagma(&b1, &m).unwrap());
        assert!(holds_on_bimagma(&b2, &m).unwrap());
        assert!(!holds_on_bimagma(&comp1, &m).unwrap());
        assert_eq!(roundtrip_check(&Algebra::Bimagma(m)), Ok(false));
    }

    proptest! {
        /// The report is exactly the set of cells where the two expansions
        /// differ: listed cells disagree, unlisted cells agree, and `ok`
        /// means both lists are empty.
        #[test]
        fn report_is_sound_and_complete(tables in proptest::collection::vec(0u8..3, 18)) {
            let b = FiniteBimagma::from_tables(
                &[tables[0..3].to_vec(), tables[3..6].to_vec(), tables[6..9].to_vec()],
                &[tables[9..12].to_vec(), tables[12..15].to_vec(), tables[15..18].to_vec()],
            ).unwrap();
            let report = reconstruction_report(&b);
            prop_assert_eq!(
                report.ok,
                report.prime_disagreements.is_empty() && report.mul_disagreements.is_empty()
            );
            let inv: Vec<u8> = (0..3).map(|x| b.rd(b.ld(x, x), x)).collect();
            for x in 0..3u8 {
                let agree = b.rd(b.ld(x, x), x) == b.ld(x, b.rd(x, x));
                prop_assert_eq!(!agree, report.prime_disagreements.contains(&x));
            }
            for x in 0..3u8 {
                for y in 0..3u8 {
                    let agree = b.rd(x, inv[y as usize]) == b.ld(inv[x as usize], y);
                    prop_assert_eq!(!agree, report.mul_disagreements.contains(&(x, y)));
                }
            }
        }
    }
}
