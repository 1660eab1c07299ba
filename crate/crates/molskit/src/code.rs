//! Permutation codes under the Hamming metric, their separability structure,
//! and the McNeish bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{format_cycles, parse_cycles, Permutation};

/// A set of distinct degree-n permutations (a permutation array).
///
/// Words are kept lexicographically sorted, which fixes a canonical order
/// for reporting and for class representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationCode {
    n: usize,
    words: Vec<Permutation>,
}

/// Result of a distance check, see [`PermutationCode::verify_pa`].
#[derive(Debug, Clone, Serialize)]
pub struct PaReport {
    pub size: usize,
    pub min_distance: usize,
    pub required: usize,
    pub ok: bool,
}

impl PermutationCode {
    /// Build a code from distinct words. Errors on a degree mismatch or a
    /// duplicate word.
    pub fn new(n: usize, mut words: Vec<Permutation>) -> Result<PermutationCode> {
        for w in &words {
            if w.degree() != n {
                return Err(Error::DegreeMismatch(w.degree(), n));
            }
        }
        words.sort();
        if let Some(pair) = words.windows(2).find(|pair| pair[0] == pair[1]) {
            return Err(Error::DuplicateWord(format_cycles(&pair[0])));
        }
        Ok(PermutationCode { n, words })
    }

    /// Build a code as the union of possibly-overlapping word collections.
    pub fn from_union(n: usize, parts: &[Vec<Permutation>]) -> Result<PermutationCode> {
        let mut words: Vec<Permutation> = parts.iter().flatten().cloned().collect();
        for w in &words {
            if w.degree() != n {
                return Err(Error::DegreeMismatch(w.degree(), n));
            }
        }
        words.sort();
        words.dedup();
        Ok(PermutationCode { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The words in lexicographic order.
    pub fn words(&self) -> &[Permutation] {
        &self.words
    }

    pub fn contains(&self, w: &Permutation) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// Minimum pairwise Hamming distance. Errors if the code has < 2 words.
    pub fn min_distance(&self) -> Result<usize> {
        crate::perm::min_distance(&self.words)
    }

    /// Check that the code is an (n, d)-PA; the report carries the exact
    /// computed minimum distance.
    pub fn verify_pa(&self, d: usize) -> Result<PaReport> {
        let min = self.min_distance()?;
        Ok(PaReport { size: self.len(), min_distance: min, required: d, ok: min >= d })
    }

    /// Render as a code file: an `n <degree>` header, then one word per line
    /// in cycle notation.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for w in &self.words {
            out.push_str(&format_cycles(w));
            out.push('\n');
        }
        out
    }

    /// Parse the code file format produced by [`PermutationCode::to_text`].
    /// Blank lines and `#` comments are allowed.
    pub fn parse_text(text: &str) -> Result<PermutationCode> {
        let mut n: Option<usize> = None;
        let mut words = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n ") {
                if n.is_some() {
                    return Err(Error::FileFormat {
                        line: idx + 1,
                        msg: "repeated n header".into(),
                    });
                }
                n = Some(rest.trim().parse().map_err(|_| Error::FileFormat {
                    line: idx + 1,
                    msg: format!("invalid degree {rest:?}"),
                })?);
                continue;
            }
            let n = n.ok_or(Error::FileFormat {
                line: idx + 1,
                msg: "word before the n header".into(),
            })?;
            words.push(parse_cycles(line, n).map_err(|e| Error::FileFormat {
                line: idx + 1,
                msg: e.to_string(),
            })?);
        }
        let n = n.ok_or(Error::FileFormat { line: 0, msg: "missing n header".into() })?;
        PermutationCode::new(n, words)
    }
}

/// A partition of an (n, n−1)-PA into m classes of equal size r with
/// within-class distance exactly n and cross-class distance exactly n−1.
#[derive(Debug, Clone)]
pub struct SeparabilityPartition {
    n: usize,
    r: usize,
    classes: Vec<Vec<Permutation>>,
}

impl SeparabilityPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Common class size.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of classes.
    pub fn m(&self) -> usize {
        self.classes.len()
    }

    /// Classes, each sorted, ordered by their least representative.
    pub fn classes(&self) -> &[Vec<Permutation>] {
        &self.classes
    }
}

/// Partition `code` by the relation σ~τ iff σ=τ or d(σ,τ)=n, verifying that
/// the relation is transitive, that all classes have equal size, and that
/// every cross pair sits at distance exactly n−1.
///
/// Errors name witnesses: the closest offending pair for a distance
/// violation, a failing triple for transitivity, or the class sizes.
pub fn separability_partition(code: &PermutationCode) -> Result<SeparabilityPartition> {
    let n = code.n();
    let words = code.words();
    if words.len() < 2 {
        return Err(Error::TooFewWords);
    }
    // Pairwise distances drive everything; n ≤ 96 and |C| ≤ 768 for the
    // shipped data, so the O(|C|²·n) loop is cheap.
    let count = words.len();
    let mut class_of: Vec<usize> = (0..count).collect();
    // Union-find (path halving) over distance-n pairs.
    fn root(class_of: &mut [usize], mut i: usize) -> usize {
        while class_of[i] != i {
            class_of[i] = class_of[class_of[i]];
            i = class_of[i];
        }
        i
    }
    for i in 0..count {
        for j in (i + 1)..count {
            let d = words[i].hamming_distance(&words[j])?;
            if d < n - 1 {
                return Err(Error::MinDistance { found: d, required: n - 1, i, j });
            }
            if d == n {
                let (ri, rj) = (root(&mut class_of, i), root(&mut class_of, j));
                class_of[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut classes_idx: Vec<Vec<usize>> = Vec::new();
    let mut class_slot = vec![usize::MAX; count];
    for i in 0..count {
        let r = root(&mut class_of, i);
        if class_slot[r] == usize::MAX {
            class_slot[r] = classes_idx.len();
            classes_idx.push(Vec::new());
        }
        classes_idx[class_slot[r]].push(i);
    }
    // Transitivity = within every union-find class, ALL pairs are at
    // distance n. A violating pair (i, j) sits in one class because of some
    // chain; report the triple (i, k, j) where k links them.
    for class in &classes_idx {
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                if words[i].hamming_distance(&words[j])? != n {
                    let k = class
                        .iter()
                        .copied()
                        .find(|&k| {
                            k != i
                                && k != j
                                && words[i].hamming_distance(&words[k]).unwrap() == n
                                && words[k].hamming_distance(&words[j]).unwrap() == n
                        })
                        .unwrap_or(i);
                    return Err(Error::NotTransitive { i, j, k });
                }
            }
        }
    }
    let sizes: Vec<usize> = classes_idx.iter().map(|c| c.len()).collect();
    let r = sizes[0];
    if sizes.iter().any(|&s| s != r) {
        let mut sorted = sizes.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        return Err(Error::UnequalClasses { sizes: sorted });
    }
    // Words are sorted, so each class (in index order) is sorted, and
    // ordering classes by first member orders them by least representative.
    let mut classes: Vec<Vec<Permutation>> = classes_idx
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| words[i].clone()).collect())
        .collect();
    classes.sort_by(|a, b| a[0].cmp(&b[0]));
    Ok(SeparabilityPartition { n, r, classes })
}

/// McNeish bound on N(n): factor n into prime powers q₁..q_t and return
/// min(qᵢ) − 1.
pub fn macneish_bound(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::MatrixShape(format!(
            "the McNeish bound is defined for orders n ≥ 2, got {n}"
        )));
    }
    let mut rest = n;
    let mut min_power = usize::MAX;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            let mut q = 1;
            while rest % p == 0 {
                q *= p;
                rest /= p;
            }
            min_power = min_power.min(q);
        }
        p += 1;
    }
    if rest > 1 {
        min_power = min_power.min(rest);
    }
    Ok(min_power - 1)
}
