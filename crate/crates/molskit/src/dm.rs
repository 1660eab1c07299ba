//! Difference matrices over finite groups and the constructive
//! correspondence between normalized (G, m+1; 1)-difference matrices and
//! codes that are unions of right-regular-representation cosets.

use crate::code::PermutationCode;
use crate::error::{Error, Result};
use crate::group::{parse_group_spec, regular_representation, FiniteGroup};
use crate::perm::Permutation;

/// A (G, rows; λ) difference matrix: `rows` many rows of λ·|G| entries,
/// stored as element indices into the group's canonical enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceMatrix {
    group: FiniteGroup,
    lambda: usize,
    rows: Vec<Vec<u16>>,
}

impl DifferenceMatrix {
    /// Validate shape: every row has λ·|G| entries, all entries are element
    /// indices, at least two rows. The difference property itself is checked
    /// by [`DifferenceMatrix::verify`].
    pub fn new(group: FiniteGroup, lambda: usize, rows: Vec<Vec<u16>>) -> Result<DifferenceMatrix> {
        if lambda == 0 {
            return Err(Error::MatrixShape("lambda must be positive".into()));
        }
        if rows.len() < 2 {
            return Err(Error::MatrixShape("a difference matrix needs at least two rows".into()));
        }
        let cols = lambda * group.order();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::MatrixShape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&e| e as usize >= group.order()) {
                return Err(Error::MatrixShape(format!(
                    "row {i} entry {bad} is not an element index of {}",
                    group.spec_string()
                )));
            }
        }
        Ok(DifferenceMatrix { group, lambda, rows })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Number of rows (m + 1 for a (G, m+1; λ) matrix).
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.lambda * self.group.order()
    }

    pub fn rows(&self) -> &[Vec<u16>] {
        &self.rows
    }

    /// Check the defining property: for every pair of distinct rows i < j,
    /// the multiset { d_ik⁻¹·d_jk : k } contains every group element exactly
    /// λ times. The error names the first failing row pair and element.
    pub fn verify(&self) -> Result<()> {
        let g = &self.group;
        let n = g.order();
        let mut counts = vec![0usize; n];
        for i in 0..self.rows.len() {
            for j in (i + 1)..self.rows.len() {
                counts.fill(0);
                for k in 0..self.cols() {
                    let diff =
                        g.mul(g.inverse(self.rows[i][k] as usize), self.rows[j][k] as usize);
                    counts[diff] += 1;
                }
                if let Some(bad) = (0..n).find(|&e| counts[e] != self.lambda) {
                    return Err(Error::DifferenceProperty {
                        i,
                        j,
                        element: g.label(bad),
                        count: counts[bad],
                        lambda: self.lambda,
                    });
                }
            }
        }
        Ok(())
    }

    /// Normalize: left-multiply every column by d₀ₖ⁻¹ so row 0 becomes the
    /// all-identity row; for λ = 1, additionally sort columns so row 1 reads
    /// the canonical element enumeration.
    ///
    /// Returns the normalized matrix and a flag: `true` when the full λ=1
    /// normal form was reached, `false` when only row-0 normalization was
    /// possible (λ > 1). The input must verify.
    pub fn normalize(&self) -> Result<(DifferenceMatrix, bool)> {
        self.verify()?;
        let g = &self.group;
        let cols = self.cols();
        let mut rows = self.rows.clone();
        for k in 0..cols {
            let inv = g.inverse(rows[0][k] as usize);
            for row in rows.iter_mut() {
                row[k] = g.mul(inv, row[k] as usize) as u16;
            }
        }
        let full = self.lambda == 1;
        if full {
            // Row 1's entries are a complete set of representatives, so
            // sorting columns by the row-1 entry puts row 1 into the
            // canonical enumeration g₁..gₙ.
            let mut order: Vec<usize> = (0..cols).collect();
            order.sort_by_key(|&k| rows[1][k]);
            rows = rows
                .into_iter()
                .map(|row| order.iter().map(|&k| row[k]).collect())
                .collect();
        }
        let normalized = DifferenceMatrix { group: g.clone(), lambda: self.lambda, rows };
        normalized.verify().expect("normalization preserves the difference property");
        Ok((normalized, full))
    }

    /// Render in the DM file format: a `group=… lambda=… rows=… cols=…`
    /// header, then one row per line with entries as element labels.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "group={} lambda={} rows={} cols={}\n",
            self.group.spec_string(),
            self.lambda,
            self.num_rows(),
            self.cols()
        );
        for row in &self.rows {
            let labels: Vec<String> =
                row.iter().map(|&e| self.group.label(e as usize)).collect();
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the DM file format produced by [`DifferenceMatrix::to_text`].
    pub fn parse_text(text: &str) -> Result<DifferenceMatrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
        let (header_line, header) = lines
            .next()
            .ok_or(Error::FileFormat { line: 0, msg: "empty difference matrix file".into() })?;
        let mut group_spec = None;
        let mut lambda = None;
        let mut expected_rows = None;
        let mut expected_cols = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or(Error::FileFormat {
                line: header_line + 1,
                msg: format!("expected key=value, found {field:?}"),
            })?;
            let bad_number = || Error::FileFormat {
                line: header_line + 1,
                msg: format!("invalid number in {field:?}"),
            };
            match key {
                "group" => group_spec = Some(value.to_string()),
                "lambda" => lambda = Some(value.parse::<usize>().map_err(|_| bad_number())?),
                "rows" => expected_rows = Some(value.parse::<usize>().map_err(|_| bad_number())?),
                "cols" => expected_cols = Some(value.parse::<usize>().map_err(|_| bad_number())?),
                other => {
                    return Err(Error::FileFormat {
                        line: header_line + 1,
                        msg: format!("unknown header field {other:?}"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::FileFormat {
            line: header_line + 1,
            msg: format!("missing {what} in header"),
        };
        let group = parse_group_spec(&group_spec.ok_or_else(|| missing("group="))?)?;
        let lambda = lambda.ok_or_else(|| missing("lambda="))?;
        let expected_rows = expected_rows.ok_or_else(|| missing("rows="))?;
        let expected_cols = expected_cols.ok_or_else(|| missing("cols="))?;
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let row: Vec<u16> = line
                .split_whitespace()
                .map(|entry| {
                    group.parse_label(entry).map(|e| e as u16).map_err(|e| Error::FileFormat {
                        line: idx + 1,
                        msg: e.to_string(),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        if rows.len() != expected_rows {
            return Err(Error::FileFormat {
                line: header_line + 1,
                msg: format!("header says rows={expected_rows}, found {}", rows.len()),
            });
        }
        if lambda * group.order() != expected_cols {
            return Err(Error::FileFormat {
                line: header_line + 1,
                msg: format!(
                    "header says cols={expected_cols}, but lambda·|G| = {}",
                    lambda * group.order()
                ),
            });
        }
        DifferenceMatrix::new(group, lambda, rows)
    }
}

/// Proposition-1 forward direction: turn a normalized (G, m+1; 1)-difference
/// matrix into the permutation code ⋃ᵢ R(G)·θᵢ where g_k^{θᵢ} = d_ik.
///
/// The result has m·|G| words, minimum distance |G|−1 (for m ≥ 2), contains
/// the regular representation (θ₁ = Id), and is (|G|, m)-separable.
pub fn dm_to_code(dm: &DifferenceMatrix) -> Result<PermutationCode> {
    dm.verify()?;
    if dm.lambda() != 1 {
        return Err(Error::LambdaNotOne(dm.lambda()));
    }
    let g = dm.group();
    let n = g.order();
    let identity = g.identity_index() as u16;
    if dm.rows()[0].iter().any(|&e| e != identity) {
        return Err(Error::NotNormalized("row 0 is not the all-identity row".into()));
    }
    if dm.rows()[1].iter().enumerate().any(|(k, &e)| e as usize != k) {
        return Err(Error::NotNormalized(
            "row 1 is not the canonical element enumeration".into(),
        ));
    }
    let regular = regular_representation(g);
    let mut cosets = Vec::new();
    for row in &dm.rows()[1..] {
        let theta = Permutation::from_images(row.clone()).map_err(|_| {
            Error::NotNormalized("a nonzero row is not a permutation of the elements".into())
        })?;
        let coset: Vec<Permutation> =
            regular.iter().map(|gamma| gamma.compose(&theta)).collect::<Result<_>>()?;
        cosets.push(coset);
    }
    let code = PermutationCode::from_union(n, &cosets)?;
    // Distinct rows of a λ=1 matrix give disjoint cosets, so the union is
    // exactly m·|G| words.
    assert_eq!(
        code.len(),
        (dm.num_rows() - 1) * n,
        "verified λ=1 difference matrices always give disjoint cosets"
    );
    Ok(code)
}

/// Theorem-2 reverse direction: decompose a Φ(R(G))-invariant code into
/// cosets R(G)·θᵢ and emit the corresponding normalized difference matrix.
///
/// Coset representatives are chosen canonically as the lexicographically
/// least member of each coset, and rows are sorted by representative; this
/// makes the map inverse to [`dm_to_code`] on its outputs.
pub fn code_to_dm(code: &PermutationCode, group: &FiniteGroup) -> Result<DifferenceMatrix> {
    let n = group.order();
    if code.n() != n {
        return Err(Error::DegreeMismatch(code.n(), n));
    }
    if code.len() % n != 0 {
        return Err(Error::NotCosetUnion {
            witness: format!("code size {} is not a multiple of |G| = {n}", code.len()),
        });
    }
    let regular = regular_representation(group);
    for gamma in &regular {
        if !code.contains(gamma) {
            return Err(Error::MissingRegularRep {
                missing: crate::perm::format_cycles(gamma),
            });
        }
    }
    // The code must be closed under left multiplication by R(G): each word's
    // coset { γ·θ } must lie inside the code.
    let mut assigned = vec![false; code.len()];
    let mut thetas = Vec::new();
    for (idx, word) in code.words().iter().enumerate() {
        if assigned[idx] {
            continue;
        }
        // Words are processed in lexicographic order and whole cosets are
        // assigned at once, so `word` is the least member of its coset.
        for gamma in &regular {
            let member = gamma.compose(word)?;
            match code.words().binary_search(&member) {
                Ok(pos) if !assigned[pos] => assigned[pos] = true,
                Ok(_) => {
                    return Err(Error::NotCosetUnion {
                        witness: format!(
                            "word {} reached twice — cosets overlap",
                            crate::perm::format_cycles(&member)
                        ),
                    })
                }
                Err(_) => {
                    return Err(Error::NotCosetUnion {
                        witness: format!(
                            "{} · {} = {} is outside the code",
                            crate::perm::format_cycles(gamma),
                            crate::perm::format_cycles(word),
                            crate::perm::format_cycles(&member)
                        ),
                    })
                }
            }
        }
        thetas.push(word.clone());
    }
    let mut rows = vec![vec![group.identity_index() as u16; n]];
    for theta in &thetas {
        rows.push(theta.images().to_vec());
    }
    let dm = DifferenceMatrix::new(group.clone(), 1, rows)?;
    // The difference property is exactly the code's distance structure;
    // verifying the output is the authoritative distance check.
    dm.verify()?;
    Ok(dm)
}
