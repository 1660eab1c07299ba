//! Finite groups as explicit multiplication tables, their right regular
//! representations, and the `Z<m>x...` group-spec grammar.
//!
//! Only abelian groups are constructible (via [`FiniteGroup::cyclic`] and
//! [`FiniteGroup::direct_product`]), but the type itself is a general
//! multiplication table so that other inputs could be represented without
//! redesign.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest constructible group order; keeps the O(order²) table small.
pub const MAX_GROUP_ORDER: usize = 4096;

/// A finite group given by a total multiplication table.
///
/// Elements are indices `0..order`; `labels[i]` is the residue tuple naming
/// element `i`. Labels are lexicographically sorted with the identity first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    /// Cyclic factor sizes, e.g. `[3, 21]` for Z3xZ21.
    moduli: Vec<u32>,
    /// Residue-tuple label of each element, lexicographically sorted.
    labels: Vec<Vec<u32>>,
    /// Row-major `order × order` table: `mul[i * order + j] = index of g_i·g_j`.
    mul: Vec<u16>,
    identity: usize,
    /// Canonical spec string, e.g. `"Z3xZ21"`.
    spec: String,
    /// Label → index lookup.
    index_of: BTreeMap<Vec<u32>, usize>,
}

impl FiniteGroup {
    /// The cyclic group ℤₘ: elements 0..m−1 under addition mod m.
    pub fn cyclic(m: usize) -> Result<FiniteGroup> {
        if m == 0 {
            return Err(Error::GroupSpec {
                spec: format!("Z{m}"),
                msg: "cyclic order must be at least 1".into(),
            });
        }
        if m > MAX_GROUP_ORDER {
            return Err(Error::GroupSpec {
                spec: format!("Z{m}"),
                msg: format!("group order exceeds the supported maximum {MAX_GROUP_ORDER}"),
            });
        }
        let labels: Vec<Vec<u32>> = (0..m as u32).map(|i| vec![i]).collect();
        let mut mul = vec![0u16; m * m];
        for i in 0..m {
            for j in 0..m {
                mul[i * m + j] = ((i + j) % m) as u16;
            }
        }
        let index_of = labels.iter().cloned().zip(0..).collect();
        Ok(FiniteGroup {
            moduli: vec![m as u32],
            labels,
            mul,
            identity: 0,
            spec: format!("Z{m}"),
            index_of,
        })
    }

    /// Componentwise direct product. Element labels are the concatenated
    /// residue tuples in lexicographic order, identity first.
    pub fn direct_product(factors: &[FiniteGroup]) -> Result<FiniteGroup> {
        if factors.is_empty() {
            return Err(Error::Empty("direct product of no groups"));
        }
        let mut order: usize = 1;
        for f in factors {
            order = order.checked_mul(f.order()).unwrap_or(usize::MAX);
            if order > MAX_GROUP_ORDER {
                return Err(Error::GroupSpec {
                    spec: factors.iter().map(|f| f.spec.as_str()).collect::<Vec<_>>().join("x"),
                    msg: format!("group order exceeds the supported maximum {MAX_GROUP_ORDER}"),
                });
            }
        }
        // Mixed-radix enumeration over factor indices: because every factor's
        // labels are lexicographically sorted, the concatenated tuples come
        // out lexicographically sorted as well.
        let k = factors.len();
        let radices: Vec<usize> = factors.iter().map(|f| f.order()).collect();
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut digits = vec![0usize; k];
            for pos in (0..k).rev() {
                digits[pos] = idx % radices[pos];
                idx /= radices[pos];
            }
            digits
        };
        let encode = |digits: &[usize]| -> usize {
            let mut idx = 0;
            for pos in 0..k {
                idx = idx * radices[pos] + digits[pos];
            }
            idx
        };
        let mut labels = Vec::with_capacity(order);
        for idx in 0..order {
            let digits = decode(idx);
            let mut label = Vec::new();
            for (pos, &d) in digits.iter().enumerate() {
                label.extend_from_slice(&factors[pos].labels[d]);
            }
            labels.push(label);
        }
        let mut mul = vec![0u16; order * order];
        for i in 0..order {
            let di = decode(i);
            for j in 0..order {
                let dj = decode(j);
                let prod: Vec<usize> =
                    (0..k).map(|pos| factors[pos].mul(di[pos], dj[pos])).collect();
                mul[i * order + j] = encode(&prod) as u16;
            }
        }
        let identity = encode(&factors.iter().map(|f| f.identity).collect::<Vec<_>>());
        let moduli = factors.iter().flat_map(|f| f.moduli.iter().copied()).collect();
        let spec = factors.iter().map(|f| f.spec.as_str()).collect::<Vec<_>>().join("x");
        let index_of = labels.iter().cloned().zip(0..).collect();
        Ok(FiniteGroup { moduli, labels, mul, identity, spec, index_of })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// Index of g_i · g_j.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.order() + j] as usize
    }

    /// Index of g_i⁻¹.
    pub fn inverse(&self, i: usize) -> usize {
        (0..self.order())
            .find(|&j| self.mul(i, j) == self.identity)
            .expect("every element of a group table has an inverse")
    }

    /// Multiplicative order of element `i`.
    pub fn element_order(&self, i: usize) -> usize {
        let mut acc = i;
        let mut ord = 1;
        while acc != self.identity {
            acc = self.mul(acc, i);
            ord += 1;
        }
        ord
    }

    /// Multiset of element orders, as order → multiplicity.
    ///
    /// Two finite abelian groups are isomorphic iff their order profiles
    /// match, so this is a complete isomorphism invariant for the groups
    /// constructible here.
    pub fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut profile = BTreeMap::new();
        for i in 0..self.order() {
            *profile.entry(self.element_order(i)).or_insert(0) += 1;
        }
        profile
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (i..n).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    /// The canonical spec string, e.g. `"Z6xZ2xZ2xZ2"`.
    pub fn spec_string(&self) -> &str {
        &self.spec
    }

    /// Residue-tuple label of element `i`, rendered as `5` (single factor)
    /// or `(2,5)` (product).
    pub fn label(&self, i: usize) -> String {
        let t = &self.labels[i];
        if t.len() == 1 {
            t[0].to_string()
        } else {
            let inner: Vec<String> = t.iter().map(|r| r.to_string()).collect();
            format!("({})", inner.join(","))
        }
    }

    /// Parse a rendered label back to its element index.
    pub fn parse_label(&self, text: &str) -> Result<usize> {
        let text = text.trim();
        let tuple: Vec<u32> = if let Some(stripped) =
            text.strip_prefix('(').and_then(|t| t.strip_suffix(')'))
        {
            stripped
                .split(',')
                .map(|part| {
                    part.trim().parse::<u32>().map_err(|_| Error::GroupSpec {
                        spec: text.into(),
                        msg: "label component is not a number".into(),
                    })
                })
                .collect::<Result<_>>()?
        } else {
            vec![text.parse::<u32>().map_err(|_| Error::GroupSpec {
                spec: text.into(),
                msg: "label is not a number".into(),
            })?]
        };
        self.index_of.get(&tuple).copied().ok_or_else(|| Error::GroupSpec {
            spec: text.into(),
            msg: format!("no element with label {text} in {}", self.spec),
        })
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.spec, self.order())
    }
}

/// Parse a group spec like `Z35` or `Z3xZ21` into a group.
pub fn parse_group_spec(spec: &str) -> Result<FiniteGroup> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::GroupSpec { spec: spec.into(), msg: "empty group spec".into() });
    }
    let mut factors = Vec::new();
    for part in spec.split('x') {
        let m: usize = part
            .strip_prefix('Z')
            .and_then(|digits| {
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    None
                } else {
                    digits.parse().ok()
                }
            })
            .ok_or_else(|| Error::GroupSpec {
                spec: spec.into(),
                msg: format!("expected a factor like Z6, found {part:?}"),
            })?;
        factors.push(FiniteGroup::cyclic(m)?);
    }
    if factors.len() == 1 {
        Ok(factors.pop().unwrap())
    } else {
        FiniteGroup::direct_product(&factors)
    }
}

/// Right regular representation R(G): γⱼ maps index k to index of g_k·g_j,
/// one permutation per element, ordered to match the element labels.
pub fn regular_representation(g: &FiniteGroup) -> Vec<Permutation> {
    let n = g.order();
    (0..n)
        .map(|j| {
            let images: Vec<u16> = (0..n).map(|k| g.mul(k, j) as u16).collect();
            Permutation::from_images(images).expect("rows of a group table are bijections")
        })
        .collect()
}

/// Closure of a set of degree-n permutations under composition, sorted
/// lexicographically. Errors if the closure exceeds `limit` elements.
pub fn permutation_closure(gens: &[Permutation], n: usize, limit: usize) -> Result<Vec<Permutation>> {
    for g in gens {
        if g.degree() != n {
            return Err(Error::DegreeMismatch(g.degree(), n));
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut elements = vec![Permutation::identity(n)];
    seen.insert(elements[0].clone());
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in gens {
            let next = current.compose(g)?;
            if seen.insert(next.clone()) {
                if elements.len() >= limit {
                    return Err(Error::ClosureLimit { limit });
                }
                elements.push(next);
            }
        }
    }
    elements.sort();
    Ok(elements)
}

/// Multiset of permutation orders, as order → multiplicity.
pub fn perm_order_profile(perms: &[Permutation]) -> BTreeMap<usize, usize> {
    let mut profile = BTreeMap::new();
    for p in perms {
        *profile.entry(p.order() as usize).or_insert(0) += 1;
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{min_distance, parse_cycles};

    #[test]
    fn cyclic_one_is_trivial() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.identity_index(), 0);
        assert_eq!(g.mul(0, 0), 0);
    }

    #[test]
    fn cyclic_two_addition() {
        let g = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(g.mul(1, 1), 0);
        assert_eq!(g.inverse(1), 1);
    }

    #[test]
    fn cyclic_thirty_five() {
        let g = FiniteGroup::cyclic(35).unwrap();
        assert_eq!(g.order(), 35);
        assert_eq!(g.element_order(1), 35);
    }

    #[test]
    fn product_order_and_labels() {
        let g = parse_group_spec("Z6xZ2xZ2xZ2").unwrap();
        assert_eq!(g.order(), 48);
        assert_eq!(g.label(0), "(0,0,0,0)");
        assert!(g.is_abelian());
        let h = parse_group_spec("Z3xZ21").unwrap();
        assert_eq!(h.order(), 63);
        assert_eq!(h.spec_string(), "Z3xZ21");
    }

    #[test]
    fn product_with_trivial_group_keeps_order() {
        let g = FiniteGroup::direct_product(&[
            FiniteGroup::cyclic(5).unwrap(),
            FiniteGroup::cyclic(1).unwrap(),
        ])
        .unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(g.order_profile(), FiniteGroup::cyclic(5).unwrap().order_profile());
    }

    #[test]
    fn labels_are_lexicographic_with_identity_first() {
        let g = parse_group_spec("Z2xZ3").unwrap();
        let rendered: Vec<String> = (0..6).map(|i| g.label(i)).collect();
        assert_eq!(rendered, ["(0,0)", "(0,1)", "(0,2)", "(1,0)", "(1,1)", "(1,2)"]);
        for i in 0..6 {
            assert_eq!(g.parse_label(&g.label(i)).unwrap(), i);
        }
    }

    #[test]
    fn parse_label_on_cyclic_group() {
        let g = FiniteGroup::cyclic(7).unwrap();
        assert_eq!(g.parse_label("5").unwrap(), 5);
        assert!(g.parse_label("7").is_err());
        assert!(g.parse_label("(1,2)").is_err());
    }

    #[test]
    fn spec_parse_errors() {
        for bad in ["", "Z", "Z0", "Zx", "z3", "3", "Z3x", "Z3xx21", "Z5000"] {
            assert!(parse_group_spec(bad).is_err(), "spec {bad:?} should fail");
        }
    }

    #[test]
    fn associativity_exhaustive_for_a_product() {
        let g = parse_group_spec("Z4xZ5").unwrap();
        let n = g.order();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
        for a in 0..n {
            assert_eq!(g.mul(a, g.identity_index()), a);
            assert_eq!(g.mul(g.identity_index(), a), a);
            assert_eq!(g.mul(a, g.inverse(a)), g.identity_index());
        }
    }

    #[test]
    fn regular_representation_of_z2() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let r = regular_representation(&g);
        assert_eq!(r[0], Permutation::identity(2));
        assert_eq!(r[1], parse_cycles("(1, 2)", 2).unwrap());
    }

    #[test]
    fn regular_representation_of_z35_contains_the_long_cycle() {
        let g = FiniteGroup::cyclic(35).unwrap();
        let r = regular_representation(&g);
        let text: Vec<String> = (1..=35).map(|k| k.to_string()).collect();
        let long_cycle = parse_cycles(&format!("({})", text.join(", ")), 35).unwrap();
        assert_eq!(r[1], long_cycle);
    }

    #[test]
    fn regular_representation_is_a_homomorphism() {
        for spec in ["Z8", "Z2xZ6", "Z3xZ7"] {
            let g = parse_group_spec(spec).unwrap();
            let r = regular_representation(&g);
            for i in 0..g.order() {
                for j in 0..g.order() {
                    assert_eq!(r[i].compose(&r[j]).unwrap(), r[g.mul(i, j)]);
                }
            }
        }
    }

    #[test]
    fn regular_representation_is_sharply_transitive() {
        for spec in ["Z2", "Z5", "Z12", "Z2xZ2xZ2", "Z4xZ6"] {
            let g = parse_group_spec(spec).unwrap();
            let r = regular_representation(&g);
            assert_eq!(min_distance(&r).unwrap(), g.order(), "R({spec})");
        }
    }

    #[test]
    fn order_profile_of_z6() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let profile = g.order_profile();
        let expected: BTreeMap<usize, usize> = [(1, 1), (2, 1), (3, 2), (6, 2)].into();
        assert_eq!(profile, expected);
    }

    #[test]
    fn order_profile_distinguishes_nonisomorphic_groups() {
        let z4 = parse_group_spec("Z4").unwrap();
        let klein = parse_group_spec("Z2xZ2").unwrap();
        assert_ne!(z4.order_profile(), klein.order_profile());
        let z6 = parse_group_spec("Z6").unwrap();
        let z2z3 = parse_group_spec("Z2xZ3").unwrap();
        assert_eq!(z6.order_profile(), z2z3.order_profile());
    }

    #[test]
    fn closure_generates_s3() {
        let gens =
            vec![parse_cycles("(1, 2)", 3).unwrap(), parse_cycles("(1, 2, 3)", 3).unwrap()];
        let s3 = permutation_closure(&gens, 3, 1000).unwrap();
        assert_eq!(s3.len(), 6);
        assert!(s3.windows(2).all(|w| w[0] < w[1]), "sorted output");
    }

    #[test]
    fn closure_respects_limit() {
        let gens =
            vec![parse_cycles("(1, 2)", 5).unwrap(), parse_cycles("(1, 2, 3, 4, 5)", 5).unwrap()];
        assert!(matches!(
            permutation_closure(&gens, 5, 10),
            Err(Error::ClosureLimit { limit: 10 })
        ));
    }

    #[test]
    fn perm_order_profile_matches_group_profile_via_regular_representation() {
        for spec in ["Z6", "Z2xZ2xZ2", "Z3xZ21"] {
            let g = parse_group_spec(spec).unwrap();
            let r = regular_representation(&g);
            assert_eq!(perm_order_profile(&r), g.order_profile(), "{spec}");
        }
    }
}
