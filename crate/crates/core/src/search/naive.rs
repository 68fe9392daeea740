//! Unpruned reference enumerators and orbit-counting formulas.
//!
//! Everything here is deliberately independent of the propagation-based
//! search: plain odometer loops over complete tables with direct
//! associativity checks, and a Burnside count for unconstrained bimagma
//! orbits. The main search is validated against these.

use crate::algebra::{Elem, FiniteBimagma, FiniteUnarySemigroup};
use itertools::Itertools;
use rayon::prelude::*;

fn decode(mut code: u64, n: usize, cells: usize) -> Vec<Elem> {
    let mut t = vec![0 as Elem; cells];
    for slot in t.iter_mut() {
        *slot = (code % n as u64) as Elem;
        code /= n as u64;
    }
    t
}

fn is_associative(t: &[Elem], n: usize) -> bool {
    for i in 0..n {
        for j in 0..n {
            let ij = t[i * n + j] as usize;
            for k in 0..n {
                let jk = t[j * n + k] as usize;
                if t[ij * n + k] != t[i * n + jk] {
                    return false;
                }
            }
        }
    }
    true
}

/// All associative multiplication tables on `n` elements, flattened
/// row-major, in odometer order. Capped at `n ≤ 3`.
pub fn semigroup_tables(n: usize) -> Vec<Vec<Elem>> {
    assert!((1..=3).contains(&n), "naive semigroup enumeration is capped at size 3");
    let cells = n * n;
    let total = (n as u64).pow(cells as u32);
    (0..total)
        .filter_map(|code| {
            let t = decode(code, n, cells);
            is_associative(&t, n).then_some(t)
        })
        .collect()
}

/// All unary semigroups on `n` elements: every associative table paired
/// with every unary map. Capped at `n ≤ 3`.
pub fn unary_semigroups(n: usize) -> Vec<FiniteUnarySemigroup> {
    let tables = semigroup_tables(n);
    let mut out = Vec::new();
    for t in &tables {
        let rows: Vec<Vec<Elem>> = (0..n).map(|i| t[i * n..(i + 1) * n].to_vec()).collect();
        for inv_code in 0..(n as u64).pow(n as u32) {
            let inv = decode(inv_code, n, n);
            out.push(
                FiniteUnarySemigroup::from_tables(&rows, &inv)
                    .expect("associativity already verified"),
            );
        }
    }
    out
}

/// Every bimagma on `n` elements. Capped at `n ≤ 2` (the size-3 space has
/// 3^18 members; use [`bimagmas_satisfying`] to stream it with a filter).
pub fn bimagmas(n: usize) -> Vec<FiniteBimagma> {
    assert!((1..=2).contains(&n), "full naive bimagma enumeration is capped at size 2");
    let cells = n * n;
    let total = (n as u64).pow(cells as u32);
    let mut out = Vec::new();
    for lc in 0..total {
        let ld = decode(lc, n, cells);
        for rc in 0..total {
            let rd = decode(rc, n, cells);
            let ld_rows: Vec<Vec<Elem>> = (0..n).map(|i| ld[i * n..(i + 1) * n].to_vec()).collect();
            let rd_rows: Vec<Vec<Elem>> = (0..n).map(|i| rd[i * n..(i + 1) * n].to_vec()).collect();
            out.push(FiniteBimagma::from_tables(&ld_rows, &rd_rows).expect("entries in range"));
        }
    }
    out
}

/// Walk every size-`n` bimagma pair and keep those passing `keep` (called
/// with the flat ld and rd tables). Parallel over the left table but
/// deterministic in output order. Capped at `n ≤ 3`.
pub fn bimagmas_satisfying<F>(n: usize, keep: F) -> Vec<FiniteBimagma>
where
    F: Fn(&[Elem], &[Elem]) -> bool + Sync,
{
    assert!((1..=3).contains(&n), "naive bimagma sweep is capped at size 3");
    let cells = n * n;
    let total = (n as u64).pow(cells as u32);
    (0..total)
        .into_par_iter()
        .map(|lc| {
            let ld = decode(lc, n, cells);
            let mut found = Vec::new();
            let mut rd = vec![0 as Elem; cells];
            loop {
                if keep(&ld, &rd) {
                    found.push(FiniteBimagma::from_flat(n, ld.clone(), rd.clone()));
                }
                // odometer increment, least-significant cell first
                let mut i = 0;
                loop {
                    if i == cells {
                        return found;
                    }
                    rd[i] += 1;
                    if (rd[i] as usize) < n {
                        break;
                    }
                    rd[i] = 0;
                    i += 1;
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Direct-loop check of the mixed associativity law
/// `(x\y)/z = x\(y/z)` on flat tables, for use as an independent filter.
pub fn mixed_associativity_holds(n: usize, ld: &[Elem], rd: &[Elem]) -> bool {
    for x in 0..n {
        for y in 0..n {
            let xy = ld[x * n + y] as usize;
            for z in 0..n {
                let yz = rd[y * n + z] as usize;
                if rd[xy * n + z] != ld[x * n + yz] {
                    return false;
                }
            }
        }
    }
    true
}

/// Number of bimagma isomorphism orbits on `n` elements (all table pairs,
/// no laws), by Burnside's lemma over the relabeling group — optionally
/// extended by the mirror symmetry that swaps the two tables and
/// transposes both. A symmetry's fixed tables factor over its cycles on
/// table positions: each position cycle of length L contributes the number
/// of elements fixed by the L-th power of the relabeling.
pub fn burnside_bimagma_orbits(n: usize, include_mirror: bool) -> u64 {
    let mut total: u64 = 0;
    let mut group = 0u64;
    for perm in (0..n).permutations(n) {
        let mut inverse = vec![0usize; n];
        for (a, &b) in perm.iter().enumerate() {
            inverse[b] = a;
        }
        for mirror in [false, true] {
            if mirror && !include_mirror {
                continue;
            }
            group += 1;
            // position (table, i, j) encoded as table*n*n + i*n + j; the
            // predecessor map inverts one application of the symmetry
            let pre = |pos: usize| -> usize {
                let (mut tab, rest) = (pos / (n * n), pos % (n * n));
                let (mut i, mut j) = (rest / n, rest % n);
                if mirror {
                    tab = 1 - tab;
                    std::mem::swap(&mut i, &mut j);
                }
                tab * n * n + inverse[i] * n + inverse[j]
            };
            let mut seen = vec![false; 2 * n * n];
            let mut fixed: u64 = 1;
            for start in 0..2 * n * n {
                if seen[start] {
                    continue;
                }
                let mut len = 0u32;
                let mut cur = start;
                loop {
                    seen[cur] = true;
                    cur = pre(cur);
                    len += 1;
                    if cur == start {
                        break;
                    }
                }
                let mut fixed_values = 0u64;
                for v in 0..n {
                    let mut w = v;
                    for _ in 0..len {
                        w = perm[w];
                    }
                    if w == v {
                        fixed_values += 1;
                    }
                }
                fixed *= fixed_values;
            }
            total += fixed;
        }
    }
    total / group
}
