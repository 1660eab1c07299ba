//! Strategies and fixtures shared by the property and acceptance targets.

#![allow(dead_code)]

use molskit::group::{parse_group_spec, FiniteGroup};
use molskit::iso::IsoElement;
use molskit::Permutation;
use proptest::prelude::*;

/// Uniformly random permutation of the stated degree.
pub fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u16).collect::<Vec<u16>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).expect("a shuffle is a bijection"))
}

/// Uniformly random isometry (b₁, b₂, ε) of degree-n words.
pub fn arb_iso(n: usize) -> impl Strategy<Value = IsoElement> {
    (arb_perm(n), arb_perm(n), any::<bool>()).prop_map(|(b1, b2, eps)| {
        IsoElement::recompose(&b1, &b2, eps).expect("components share the degree")
    })
}

/// Groups and starting difference matrices for the dm ↔ code suites. Each
/// base is a classical (G, k; 1)-DM: the multiplication table over a prime
/// cyclic group, the duplication construction for odd order, or the trivial
/// two-row matrix that exists over every group.
pub fn dm_pool() -> Vec<(FiniteGroup, Vec<Vec<u16>>)> {
    let mut pool = Vec::new();
    for p in [5u16, 7] {
        let g = parse_group_spec(&format!("Z{p}")).unwrap();
        let rows = (0..p).map(|i| (0..p).map(|j| (i * j) % p).collect()).collect();
        pool.push((g, rows));
    }
    for spec in ["Z3xZ3", "Z9", "Z15"] {
        let g = parse_group_spec(spec).unwrap();
        let n = g.order();
        let row1: Vec<u16> = (0..n as u16).collect();
        let row2: Vec<u16> = (0..n).map(|j| g.mul(j, j) as u16).collect();
        pool.push((g, vec![vec![0; n], row1, row2]));
    }
    for spec in ["Z4", "Z6", "Z2xZ2", "Z12", "Z2xZ4"] {
        let g = parse_group_spec(spec).unwrap();
        let n = g.order();
        let row1: Vec<u16> = (0..n as u16).collect();
        pool.push((g, vec![vec![0; n], row1]));
    }
    pool
}

/// A scramble of a base DM: permute rows and columns and add per-row and
/// per-column constants — all operations that preserve the difference
/// property, giving a large randomized family of valid matrices.
#[derive(Debug, Clone)]
pub struct DmScramble {
    pub base: usize,
    pub row_order: Vec<usize>,
    pub col_order: Vec<usize>,
    pub row_consts: Vec<usize>,
    pub col_consts: Vec<usize>,
}

pub fn arb_scramble() -> impl Strategy<Value = DmScramble> {
    let pool = dm_pool();
    (0..pool.len()).prop_flat_map(move |base| {
        let (g, rows) = &pool[base];
        let (k, n) = (rows.len(), g.order());
        (
            Just(base),
            Just((0..k).collect::<Vec<usize>>()).prop_shuffle(),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            prop::collection::vec(0..n, k),
            prop::collection::vec(0..n, n),
        )
            .prop_map(|(base, row_order, col_order, row_consts, col_consts)| DmScramble {
                base,
                row_order,
                col_order,
                row_consts,
                col_consts,
            })
    })
}

/// Apply a scramble to its base matrix, then renormalize back into the
/// canonical form: per-column constants make row 0 the all-identity row,
/// and a column sort makes row 1 the canonical element enumeration. Both
/// renormalizations preserve the difference property, and row 1 is a
/// permutation of the elements whenever λ = 1 (its differences against the
/// identity row must cover the group exactly once).
pub fn scrambled_normalized_rows(s: &DmScramble) -> (FiniteGroup, Vec<Vec<u16>>) {
    let pool = dm_pool();
    let (g, base_rows) = &pool[s.base];
    let mut rows: Vec<Vec<u16>> = s
        .row_order
        .iter()
        .enumerate()
        .map(|(i, &src)| {
            s.col_order
                .iter()
                .enumerate()
                .map(|(j, &col)| {
                    let cell = base_rows[src][col] as usize;
                    g.mul(g.mul(cell, s.row_consts[i]), s.col_consts[j]) as u16
                })
                .collect()
        })
        .collect();
    let head_inv: Vec<usize> = rows[0].iter().map(|&e| g.inverse(e as usize)).collect();
    for row in &mut rows {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = g.mul(*cell as usize, head_inv[j]) as u16;
        }
    }
    let mut order: Vec<usize> = (0..rows[1].len()).collect();
    order.sort_by_key(|&j| rows[1][j]);
    let rows: Vec<Vec<u16>> =
        rows.iter().map(|row| order.iter().map(|&j| row[j]).collect()).collect();
    (g.clone(), rows)
}
