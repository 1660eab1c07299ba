//! Permutations of `{1..n}` under the Hamming metric.
//!
//! A [`Permutation`] stores its image array 0-based; every textual
//! interface (cycle notation, file formats, reports) is 1-based.
//!
//! The Hamming distance between two permutations of the same degree is
//! the number of points on which they disagree.  It can never be 1: if
//! two permutations agree on all points but one, they agree everywhere.
//!
//! Composition is in left-to-right order: `p.compose(&q)` is the
//! permutation "apply `p`, then `q`", i.e. `x^(pq) = (x^p)^q`.

use crate::error::{Error, Result};

/// An immutable permutation of `{0..n-1}` (printed 1-based).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Box<[u16]>,
}

impl Permutation {
    /// The identity permutation of the given degree.
    pub fn identity(degree: usize) -> Permutation {
        Permutation {
            images: (0..degree as u16).collect(),
        }
    }

    /// Build from a 0-based image array, validating that it is a bijection.
    pub fn from_images(images: Vec<u16>) -> Result<Permutation> {
        let n = images.len();
        if n > u16::MAX as usize {
            return Err(Error::InvalidImages(format!("degree {n} too large")));
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if (v as usize) >= n {
                return Err(Error::InvalidImages(format!(
                    "image {} out of range for degree {n}",
                    v + 1
                )));
            }
            if seen[v as usize] {
                return Err(Error::InvalidImages(format!("image {} repeated", v + 1)));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation {
            images: images.into_boxed_slice(),
        })
    }

    /// Number of points acted on.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// The raw 0-based image array.
    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// `self` followed by `other`: `x^(self · other) = (x^self)^other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        let images = self
            .images
            .iter()
            .map(|&v| other.images[v as usize])
            .collect();
        Ok(Permutation { images })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u16; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u16;
        }
        Permutation {
            images: images.into_boxed_slice(),
        }
    }

    /// Number of points on which the two permutations disagree.
    pub fn hamming_distance(&self, other: &Permutation) -> Result<usize> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self
            .images
            .iter()
            .zip(other.images.iter())
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Number of fixed points.
    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &v)| *i == v as usize)
            .count()
    }

    /// Multiplicative order (least k ≥ 1 with self^k = Id).
    pub fn order(&self) -> u64 {
        self.cycles_with_fixed(false)
            .iter()
            .map(|c| c.len() as u64)
            .fold(1, lcm)
    }

    /// Cycle decomposition in canonical order: cycles sorted by least
    /// moved point, each rotated so its least point comes first.
    /// Fixed points are omitted.  Points are 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed(false)
    }

    fn cycles_with_fixed(&self, include_fixed: bool) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.image(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.image(p);
            }
            if cycle.len() > 1 || include_fixed {
                cycles.push(cycle);
            }
        }
        cycles
    }
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Permutation[{}]({})", self.degree(), self)
    }
}

/// Canonical cycle notation: `Id` for the identity, otherwise cycles in
/// canonical order with 1-based points, e.g. `(1, 2)(3, 4, 5)`.
impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "Id");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Parse cycle notation into a permutation of the declared degree.
///
/// Grammar: the literal `Id`, or one or more parenthesized cycles
/// `(a1, a2, ..., ak)` with k ≥ 2, points 1-based, commas mandatory,
/// arbitrary whitespace (including newlines) between tokens.
/// Singleton cycles, repeated points and points above the declared
/// degree are errors.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    Parser::new(text, degree).parse()
}

/// Canonical cycle notation for `p` (see [`Permutation`]'s `Display`).
pub fn format_cycles(p: &Permutation) -> String {
    p.to_string()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    degree: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, degree: usize) -> Parser<'a> {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            degree,
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::CycleParse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse(&mut self) -> Result<Permutation> {
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.error("empty cycle text"));
        }
        if self.bytes[self.pos..].starts_with(b"Id") {
            self.pos += 2;
            self.skip_ws();
            if let Some(c) = self.peek() {
                return Err(self.error(format!("unexpected '{}' after Id", c as char)));
            }
            return Ok(Permutation::identity(self.degree));
        }
        let mut images: Vec<u16> = (0..self.degree as u16).collect();
        let mut used = vec![false; self.degree];
        let mut any = false;
        while let Some(c) = self.peek() {
            if c != b'(' {
                return Err(self.error(format!("expected '(' but found '{}'", c as char)));
            }
            self.parse_cycle(&mut images, &mut used)?;
            any = true;
            self.skip_ws();
        }
        if !any {
            return Err(self.error("expected 'Id' or a cycle"));
        }
        Ok(Permutation {
            images: images.into_boxed_slice(),
        })
    }

    fn parse_cycle(&mut self, images: &mut [u16], used: &mut [bool]) -> Result<()> {
        debug_assert_eq!(self.peek(), Some(b'('));
        self.pos += 1;
        let mut points: Vec<usize> = Vec::new();
        loop {
            self.skip_ws();
            let point = self.parse_point(used)?;
            points.push(point);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(c) => {
                    return Err(self.error(format!("expected ',' or ')' but found '{}'", c as char)))
                }
                None => return Err(self.error("unterminated cycle")),
            }
        }
        if points.len() < 2 {
            return Err(self.error("cycle of length 1"));
        }
        for w in 0..points.len() {
            let from = points[w];
            let to = points[(w + 1) % points.len()];
            images[from] = to as u16;
        }
        Ok(())
    }

    fn parse_point(&mut self, used: &mut [bool]) -> Result<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |c| format!("'{}'", c as char));
            return Err(self.error(format!("expected a point but found {found}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: usize = text
            .parse()
            .map_err(|_| self.error(format!("point '{text}' out of range")))?;
        if value == 0 {
            return Err(self.error("points are 1-based; 0 is not a point"));
        }
        if value > self.degree {
            return Err(self.error(format!(
                "point {value} exceeds the declared degree {}",
                self.degree
            )));
        }
        if used[value - 1] {
            return Err(self.error(format!("point {value} appears twice")));
        }
        used[value - 1] = true;
        Ok(value - 1)
    }
}

/// Minimum pairwise Hamming distance over a set of at least two words.
pub fn min_distance(words: &[Permutation]) -> Result<usize> {
    let (d, _, _) = min_distance_witness(words)?;
    Ok(d)
}

/// Minimum pairwise distance together with the indices of a closest pair.
pub fn min_distance_witness(words: &[Permutation]) -> Result<(usize, usize, usize)> {
    if words.len() < 2 {
        return Err(Error::TooFewWords);
    }
    let mut best = (usize::MAX, 0, 0);
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            let d = words[i].hamming_distance(&words[j])?;
            if d < best.0 {
                best = (d, i, j);
                if d == 0 {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

/// Minimum distance between two non-empty sets of words.
pub fn set_distance(a: &[Permutation], b: &[Permutation]) -> Result<usize> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("set_distance operand"));
    }
    let mut best = usize::MAX;
    for x in a {
        for y in b {
            best = best.min(x.hamming_distance(y)?);
            if best == 0 {
                return Ok(0);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, degree: usize) -> Permutation {
        parse_cycles(text, degree).unwrap()
    }

    #[test]
    fn identity_properties() {
        let id = Permutation::identity(5);
        assert!(id.is_identity());
        assert_eq!(id.to_string(), "Id");
        assert_eq!(id.order(), 1);
        assert_eq!(id.fixed_points(), 5);
    }

    #[test]
    fn compose_applies_left_then_right() {
        // (1,2) then (2,3): 1 -> 2 -> 3.
        let a = p("(1, 2)", 3);
        let b = p("(2, 3)", 3);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.image(0), 2);
        assert_eq!(c.to_string(), "(1, 3, 2)");
    }

    #[test]
    fn transposition_squares_to_identity() {
        let a = p("(1, 2)", 4);
        assert!(a.compose(&a).unwrap().is_identity());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let a = p("(1, 2, 3)(4, 5)", 6);
        assert!(a.compose(&a.inverse()).unwrap().is_identity());
        assert!(a.inverse().compose(&a).unwrap().is_identity());
    }

    #[test]
    fn distance_counts_disagreements() {
        let id = Permutation::identity(5);
        let a = p("(1, 2)", 5);
        assert_eq!(a.hamming_distance(&id).unwrap(), 2);
        assert_eq!(id.hamming_distance(&id).unwrap(), 0);
    }

    #[test]
    fn distance_degree_mismatch_errors() {
        let a = Permutation::identity(4);
        let b = Permutation::identity(5);
        assert!(matches!(
            a.hamming_distance(&b),
            Err(Error::DegreeMismatch(4, 5))
        ));
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn parse_format_round_trip() {
        for text in ["Id", "(1, 2)", "(1, 2)(3, 4)", "(2, 5, 3)", "(1, 4)(2, 6, 5)"] {
            let q = p(text, 6);
            assert_eq!(q.to_string(), text);
            assert_eq!(parse_cycles(&q.to_string(), 6).unwrap(), q);
        }
    }

    #[test]
    fn parse_canonicalizes_cycle_order() {
        // Same permutation written non-canonically.
        let q = p("(4, 3)(2, 1)", 4);
        assert_eq!(q.to_string(), "(1, 2)(3, 4)");
        let r = p("(5, 3, 2)", 5);
        assert_eq!(r.to_string(), "(2, 5, 3)");
    }

    #[test]
    fn parse_accepts_newlines_between_tokens() {
        let q = p("(1,\n   2)(3,\t4 ,5)", 5);
        assert_eq!(q.to_string(), "(1, 2)(3, 4, 5)");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_cycles("", 3).is_err());
        assert!(parse_cycles("   ", 3).is_err());
        assert!(parse_cycles("(1)", 3).is_err(), "singleton cycle");
        assert!(parse_cycles("(1, 2", 3).is_err(), "unterminated");
        assert!(parse_cycles("(1 2)", 3).is_err(), "missing comma");
        assert!(parse_cycles("(1, 2)(1, 3)", 3).is_err(), "repeated point");
        assert!(parse_cycles("(1, 4)", 3).is_err(), "point above degree");
        assert!(parse_cycles("(0, 1)", 3).is_err(), "0 is not a point");
        assert!(parse_cycles("Id(1, 2)", 3).is_err(), "junk after Id");
        assert!(parse_cycles("(1, 2) x", 3).is_err(), "trailing junk");
    }

    #[test]
    fn parse_error_positions_point_at_offender() {
        match parse_cycles("(1, 9)", 5) {
            Err(Error::CycleParse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn order_is_lcm_of_cycle_lengths() {
        assert_eq!(p("(1, 2, 3)(4, 5)", 6).order(), 6);
        assert_eq!(p("(1, 2)(3, 4)", 4).order(), 2);
    }

    #[test]
    fn min_distance_of_regular_set() {
        // The five rotations of Z5 pairwise disagree everywhere.
        let shift = p("(1, 2, 3, 4, 5)", 5);
        let mut words = vec![Permutation::identity(5)];
        for _ in 0..4 {
            let next = words.last().unwrap().compose(&shift).unwrap();
            words.push(next);
        }
        assert_eq!(min_distance(&words).unwrap(), 5);
    }

    #[test]
    fn min_distance_needs_two_words() {
        assert!(matches!(
            min_distance(&[Permutation::identity(3)]),
            Err(Error::TooFewWords)
        ));
    }

    #[test]
    fn set_distance_basics() {
        let a = [Permutation::identity(4)];
        let b = [p("(1, 2)", 4), p("(1, 2, 3, 4)", 4)];
        assert_eq!(set_distance(&a, &b).unwrap(), 2);
        assert!(set_distance(&a, &[]).is_err());
    }
}
