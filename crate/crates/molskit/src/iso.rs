//! The isometry group of `(S_n, Hamming)` and its right action.
//!
//! For the Hamming metric on `S_n` the full isometry group is
//! `Iso(n) = (B1 x B2) : <t_n>` inside `S_2n`, where `B1` permutes the
//! points `{1..n}`, `B2` permutes `{n+1..2n}`, and `t_n` is the block
//! swap `(1, n+1)(2, n+2)...(n, 2n)`.  Identifying a permutation
//! `b ∈ S_n` with a word, the right action is
//!
//! * `b * x = x^-1 · b`      for `x ∈ B1`,
//! * `b * x = b · phi(x)`    for `x ∈ B2`,
//! * `b * t_n = b^-1`,
//!
//! with `phi : B2 -> B1` the isomorphism that subtracts `n` from every
//! point.  Every `g ∈ Iso(n)` factors as `g = b1 · b2 · t_n^eps`, and
//! the composite action used here is
//!
//! ```text
//! b * g = (b1^-1 · b · phi(b2))^(-1 if eps)
//! ```
//!
//! which the tests validate against factor-by-factor application of the
//! three cases and against the right-action law `b*(gh) = (b*g)*h`.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Default cap on materialized group closures.
pub const DEFAULT_CLOSURE_LIMIT: usize = 10_000_000;

/// An element of `Iso(n)`: a permutation of `{1..2n}` that either fixes
/// both blocks setwise (`block_swap = false`) or exchanges them
/// (`block_swap = true`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoElement {
    inner: Permutation,
    block_swap: bool,
}

impl IsoElement {
    /// Wrap a degree-`2n` permutation, validating the block structure.
    pub fn new(inner: Permutation) -> Result<IsoElement> {
        let degree = inner.degree();
        if degree % 2 != 0 {
            return Err(Error::OddDegree(degree));
        }
        let n = degree / 2;
        if n == 0 {
            return Err(Error::Empty("block permutation"));
        }
        let block_swap = inner.image(0) >= n;
        for x in 0..degree {
            let x_lower = x < n;
            let image_lower = inner.image(x) < n;
            let expected_lower = if block_swap { !x_lower } else { x_lower };
            if image_lower != expected_lower {
                return Err(Error::BlockStructure { point: x + 1 });
            }
        }
        Ok(IsoElement { inner, block_swap })
    }

    /// The identity of `Iso(n)`.
    pub fn identity(n: usize) -> IsoElement {
        IsoElement {
            inner: Permutation::identity(2 * n),
            block_swap: false,
        }
    }

    /// The block swap `t_n = (1, n+1)(2, n+2)...(n, 2n)`.
    pub fn t_n(n: usize) -> IsoElement {
        let images = (0..2 * n)
            .map(|x| if x < n { (x + n) as u16 } else { (x - n) as u16 })
            .collect();
        IsoElement {
            inner: Permutation::from_images(images).unwrap(),
            block_swap: true,
        }
    }

    /// Half the inner degree.
    pub fn n(&self) -> usize {
        self.inner.degree() / 2
    }

    pub fn inner(&self) -> &Permutation {
        &self.inner
    }

    /// Whether the element exchanges the two blocks.
    pub fn block_swap(&self) -> bool {
        self.block_swap
    }

    pub fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &IsoElement) -> Result<IsoElement> {
        Ok(IsoElement {
            inner: self.inner.compose(&other.inner)?,
            block_swap: self.block_swap != other.block_swap,
        })
    }

    pub fn inverse(&self) -> IsoElement {
        IsoElement {
            inner: self.inner.inverse(),
            block_swap: self.block_swap,
        }
    }

    /// Factor as `g = b1 · b2 · t_n^eps` with `b1`, `b2` of degree `n`
    /// (`b2` is returned through `phi`, i.e. already shifted down).
    pub fn decompose(&self) -> (Permutation, Permutation, bool) {
        let n = self.n();
        let mut lower = vec![0u16; n];
        let mut upper = vec![0u16; n];
        for x in 0..n {
            if self.block_swap {
                lower[x] = (self.inner.image(x) - n) as u16;
                upper[x] = self.inner.image(x + n) as u16;
            } else {
                lower[x] = self.inner.image(x) as u16;
                upper[x] = (self.inner.image(x + n) - n) as u16;
            }
        }
        (
            Permutation::from_images(lower).unwrap(),
            Permutation::from_images(upper).unwrap(),
            self.block_swap,
        )
    }

    /// Rebuild an element from its `decompose` factors.
    pub fn recompose(b1: &Permutation, b2: &Permutation, eps: bool) -> Result<IsoElement> {
        if b1.degree() != b2.degree() {
            return Err(Error::DegreeMismatch(b1.degree(), b2.degree()));
        }
        let n = b1.degree();
        let mut images = vec![0u16; 2 * n];
        for x in 0..n {
            if eps {
                images[x] = (b1.image(x) + n) as u16;
                images[x + n] = b2.image(x) as u16;
            } else {
                images[x] = b1.image(x) as u16;
                images[x + n] = (b2.image(x) + n) as u16;
            }
        }
        Ok(IsoElement {
            inner: Permutation::from_images(images).unwrap(),
            block_swap: eps,
        })
    }
}

impl std::fmt::Debug for IsoElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IsoElement[n={}]({})", self.n(), self.inner)
    }
}

impl std::fmt::Display for IsoElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.inner.fmt(f)
    }
}

/// `phi`: strip a pure-`B2` permutation of degree `2n` down to `S_n`.
///
/// Errors if the input moves any point of the lower block.
pub fn phi(p: &Permutation) -> Result<Permutation> {
    let degree = p.degree();
    if degree % 2 != 0 {
        return Err(Error::OddDegree(degree));
    }
    let n = degree / 2;
    for x in 0..n {
        if p.image(x) != x {
            return Err(Error::OutsideBlock { point: x + 1 });
        }
    }
    let images = (0..n).map(|x| (p.image(x + n) - n) as u16).collect();
    Ok(Permutation::from_images(images).unwrap())
}

/// `Phi`: embed a permutation of degree `m <= n` into `B1 <= Iso(n)`,
/// acting on `{1..m}` and fixing everything else.
pub fn embed_phi(p: &Permutation, n: usize) -> Result<IsoElement> {
    let m = p.degree();
    if m > n {
        return Err(Error::EmbedDegree { inner: m, outer: n });
    }
    let mut images: Vec<u16> = (0..2 * n as u16).collect();
    for x in 0..m {
        images[x] = p.image(x) as u16;
    }
    Ok(IsoElement {
        inner: Permutation::from_images(images).unwrap(),
        block_swap: false,
    })
}

/// The diagonal element `v · v^(t_n)`: acts as `v` on both blocks.
pub fn delta_element(v: &Permutation) -> IsoElement {
    let n = v.degree();
    let mut images = vec![0u16; 2 * n];
    for x in 0..n {
        images[x] = v.image(x) as u16;
        images[x + n] = (v.image(x) + n) as u16;
    }
    IsoElement {
        inner: Permutation::from_images(images).unwrap(),
        block_swap: false,
    }
}

/// `Delta(V) = { v · v^(t_n) : v ∈ V }` for a subgroup `V <= S_n`.
///
/// Validates that `V` contains the identity and is closed under
/// composition before mapping.
pub fn delta(v: &[Permutation]) -> Result<Vec<IsoElement>> {
    if v.is_empty() {
        return Err(Error::Empty("delta input"));
    }
    let set: HashSet<&Permutation> = v.iter().collect();
    if !v.iter().any(|p| p.is_identity()) {
        return Err(Error::NoIdentity);
    }
    for a in v {
        for b in v {
            let ab = a.compose(b)?;
            if !set.contains(&ab) {
                return Err(Error::NotClosed {
                    witness: ab.to_string(),
                });
            }
        }
    }
    Ok(v.iter().map(delta_element).collect())
}

/// Right action of `g ∈ Iso(n)` on a word `b ∈ S_n`.
pub fn act(b: &Permutation, g: &IsoElement) -> Result<Permutation> {
    if b.degree() != g.n() {
        return Err(Error::DegreeMismatch(b.degree(), g.n()));
    }
    let (b1, b2, eps) = g.decompose();
    let c = b1.inverse().compose(b)?.compose(&b2)?;
    Ok(if eps { c.inverse() } else { c })
}

/// Whether every element of `stabilizer` fixes the word `b`.
pub fn is_stabilized(b: &Permutation, stabilizer: &[IsoElement]) -> Result<bool> {
    for s in stabilizer {
        if &act(b, s)? != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finitely generated subgroup of `Iso(n)` with its elements
/// materialized in BFS order over the generator list.
#[derive(Clone, Debug)]
pub struct IsoGroup {
    n: usize,
    generators: Vec<IsoElement>,
    elements: Vec<IsoElement>,
}

impl IsoGroup {
    /// Close the generators under composition (plain BFS with hashing).
    ///
    /// The element order is the BFS insertion order, so it is
    /// deterministic for a fixed generator list.  Closures larger than
    /// `limit` are an error.
    pub fn generate(generators: Vec<IsoElement>, limit: usize) -> Result<IsoGroup> {
        if generators.is_empty() {
            return Err(Error::Empty("generator list"));
        }
        let n = generators[0].n();
        for g in &generators {
            if g.n() != n {
                return Err(Error::DegreeMismatch(2 * n, 2 * g.n()));
            }
        }
        let identity = IsoElement::identity(n);
        let mut seen: HashSet<IsoElement> = HashSet::new();
        let mut elements = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(identity.clone());
        elements.push(identity.clone());
        queue.push_back(identity);
        while let Some(e) = queue.pop_front() {
            for g in &generators {
                let f = e.compose(g)?;
                if seen.insert(f.clone()) {
                    if elements.len() >= limit {
                        return Err(Error::ClosureLimit { limit });
                    }
                    elements.push(f.clone());
                    queue.push_back(f);
                }
            }
        }
        Ok(IsoGroup {
            n,
            generators,
            elements,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[IsoElement] {
        &self.generators
    }

    /// All elements in BFS order.
    pub fn elements(&self) -> &[IsoElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &IsoElement) -> bool {
        self.elements.contains(e)
    }

    /// The point stabilizer `{ u ∈ U : b * u = b }`.
    pub fn stabilizer(&self, b: &Permutation) -> Result<Vec<IsoElement>> {
        let mut stab = Vec::new();
        for e in &self.elements {
            if &act(b, e)? == b {
                stab.push(e.clone());
            }
        }
        Ok(stab)
    }
}

/// The orbit of `b` under the group, sorted lexicographically by image
/// array.  The first word is the canonical orbit representative.
pub fn orbit(b: &Permutation, group: &IsoGroup) -> Result<Vec<Permutation>> {
    orbit_under(b, group.generators())
}

/// Orbit of `b` under the closure of a generator list (the group need
/// not be materialized; forward BFS suffices for finite groups).
pub fn orbit_under(b: &Permutation, generators: &[IsoElement]) -> Result<Vec<Permutation>> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(b.clone());
    queue.push_back(b.clone());
    while let Some(w) = queue.pop_front() {
        for g in generators {
            let v = act(&w, g)?;
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    let mut words: Vec<Permutation> = seen.into_iter().collect();
    words.sort_unstable();
    Ok(words)
}

/// Split a group-invariant set of words into orbits.
///
/// Errors with a witness if some orbit leaves the set.  Orbits are
/// sorted by size descending, ties by canonical representative.
pub fn orbit_split(set: &[Permutation], group: &IsoGroup) -> Result<Vec<Vec<Permutation>>> {
    let mut remaining: HashMap<&Permutation, ()> = set.iter().map(|p| (p, ())).collect();
    let mut sorted: Vec<&Permutation> = set.iter().collect();
    sorted.sort_unstable();
    let mut orbits = Vec::new();
    for b in sorted {
        if !remaining.contains_key(b) {
            continue;
        }
        let orb = orbit(b, group)?;
        for w in &orb {
            if remaining.remove(w).is_none() && !set.contains(w) {
                return Err(Error::NotInvariant {
                    witness: w.to_string(),
                });
            }
        }
        orbits.push(orb);
    }
    orbits.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    Ok(orbits)
}
