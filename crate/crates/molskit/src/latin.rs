//! Latin squares, mutually orthogonal families, and the correspondence
//! between (n, m)-separable permutation codes with class size n and m MOLS.

use crate::code::{PermutationCode, SeparabilityPartition};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// An n×n Latin square. Cells are stored row-major with 0-based symbols;
/// all rendering uses 1-based symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u16>,
}

impl LatinSquare {
    /// Validate and build from row-major 0-based cells.
    pub fn new(n: usize, cells: Vec<u16>) -> Result<LatinSquare> {
        if n == 0 || cells.len() != n * n {
            return Err(Error::MatrixShape(format!(
                "expected {n}×{n} cells, got {}",
                cells.len()
            )));
        }
        let mut seen = vec![false; n];
        for row in 0..n {
            seen.fill(false);
            for col in 0..n {
                let s = cells[row * n + col] as usize;
                if s >= n {
                    return Err(Error::NotLatin(format!(
                        "symbol {} outside 1..{n} in row {}",
                        s + 1,
                        row + 1
                    )));
                }
                if seen[s] {
                    return Err(Error::NotLatin(format!(
                        "symbol {} repeats in row {}",
                        s + 1,
                        row + 1
                    )));
                }
                seen[s] = true;
            }
        }
        for col in 0..n {
            seen.fill(false);
            for row in 0..n {
                let s = cells[row * n + col] as usize;
                if seen[s] {
                    return Err(Error::NotLatin(format!(
                        "symbol {} repeats in column {}",
                        s + 1,
                        col + 1
                    )));
                }
                seen[s] = true;
            }
        }
        Ok(LatinSquare { n, cells })
    }

    /// Build from rows given as permutations (row i maps column → symbol).
    pub fn from_rows(rows: &[Permutation]) -> Result<LatinSquare> {
        if rows.is_empty() {
            return Err(Error::Empty("Latin square needs at least one row"));
        }
        let n = rows[0].degree();
        if rows.len() != n {
            return Err(Error::MatrixShape(format!(
                "{} rows for a square of order {n}",
                rows.len()
            )));
        }
        let mut cells = Vec::with_capacity(n * n);
        for row in rows {
            if row.degree() != n {
                return Err(Error::DegreeMismatch(row.degree(), n));
            }
            cells.extend(row.images().iter().copied());
        }
        LatinSquare::new(n, cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based symbol at (row, col).
    pub fn cell(&self, row: usize, col: usize) -> u16 {
        self.cells[row * self.n + col]
    }

    /// The rows as permutations.
    pub fn rows(&self) -> Vec<Permutation> {
        (0..self.n)
            .map(|r| {
                let images = self.cells[r * self.n..(r + 1) * self.n].to_vec();
                Permutation::from_images(images).expect("validated Latin rows are bijections")
            })
            .collect()
    }
}

/// True iff superimposing the two squares yields all n² ordered symbol pairs.
pub fn verify_orthogonal(a: &LatinSquare, b: &LatinSquare) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DegreeMismatch(a.n(), b.n()));
    }
    let n = a.n();
    let mut seen = vec![false; n * n];
    for i in 0..n * n {
        let pair = a.cells[i] as usize * n + b.cells[i] as usize;
        if seen[pair] {
            return Ok(false);
        }
        seen[pair] = true;
    }
    Ok(true)
}

/// A family of pairwise-orthogonal Latin squares; orthogonality is verified
/// at construction time and therefore holds by invariant afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolsSet {
    n: usize,
    squares: Vec<LatinSquare>,
}

impl MolsSet {
    pub fn new(squares: Vec<LatinSquare>) -> Result<MolsSet> {
        if squares.is_empty() {
            return Err(Error::Empty("MOLS family needs at least one square"));
        }
        let n = squares[0].n();
        for s in &squares {
            if s.n() != n {
                return Err(Error::DegreeMismatch(s.n(), n));
            }
        }
        for a in 0..squares.len() {
            for b in (a + 1)..squares.len() {
                if !verify_orthogonal(&squares[a], &squares[b])? {
                    // Find one duplicated pair as the witness.
                    let (x, y, count) = first_repeated_pair(&squares[a], &squares[b]);
                    return Err(Error::NotOrthogonal { a, b, x, y, count });
                }
            }
        }
        Ok(MolsSet { n, squares })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    /// Plain-text export: space-separated 1-based rows, one blank line
    /// between squares.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (idx, square) in self.squares.iter().enumerate() {
            if idx > 0 {
                out.push('\n');
            }
            for row in 0..self.n {
                let line: Vec<String> =
                    (0..self.n).map(|col| (square.cell(row, col) + 1).to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// JSON export: an array of n×n integer matrices with 1-based symbols.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.squares
                .iter()
                .map(|square| {
                    serde_json::Value::Array(
                        (0..self.n)
                            .map(|row| {
                                serde_json::Value::Array(
                                    (0..self.n)
                                        .map(|col| {
                                            serde_json::Value::from(square.cell(row, col) + 1)
                                        })
                                        .collect(),
                                )
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Parse the plain-text export format.
    pub fn parse_text(text: &str) -> Result<MolsSet> {
        let mut squares = Vec::new();
        let mut rows: Vec<Vec<u16>> = Vec::new();
        let mut flush = |rows: &mut Vec<Vec<u16>>, line: usize| -> Result<()> {
            if rows.is_empty() {
                return Ok(());
            }
            let n = rows[0].len();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::FileFormat { line, msg: "square is not n×n".into() });
            }
            let mut cells = Vec::with_capacity(n * n);
            for row in rows.drain(..) {
                for symbol in row {
                    if symbol == 0 {
                        return Err(Error::FileFormat {
                            line,
                            msg: "symbols are 1-based".into(),
                        });
                    }
                    cells.push(symbol - 1);
                }
            }
            squares.push(LatinSquare::new(n, cells)?);
            Ok(())
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                flush(&mut rows, idx + 1)?;
                continue;
            }
            let row: Vec<u16> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u16>().map_err(|_| Error::FileFormat {
                        line: idx + 1,
                        msg: format!("invalid symbol {tok:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        let total = text.lines().count();
        flush(&mut rows, total)?;
        MolsSet::new(squares)
    }
}

fn first_repeated_pair(a: &LatinSquare, b: &LatinSquare) -> (usize, usize, usize) {
    let n = a.n();
    let mut counts = vec![0usize; n * n];
    for i in 0..n * n {
        counts[a.cells[i] as usize * n + b.cells[i] as usize] += 1;
    }
    for i in 0..n * n {
        let pair = a.cells[i] as usize * n + b.cells[i] as usize;
        if counts[pair] > 1 {
            return (a.cells[i] as usize + 1, b.cells[i] as usize + 1, counts[pair]);
        }
    }
    unreachable!("caller established the squares are not orthogonal");
}

/// Turn an (n, m)-separable partition with class size r = n into m MOLS.
///
/// Square k records which word of class k covers each cell: since the
/// class's words are pairwise at distance n, exactly one word w has
/// w(j) = x, and the square's cell (j, x) holds that word's index within
/// the class. Rows and columns are Latin because a class is sharply
/// transitive in both coordinates, and two squares are orthogonal because
/// words from different classes agree in exactly one position, so every
/// ordered index pair appears on exactly one cell. Squares follow the
/// class order and symbols the word order within each class (both
/// canonically sorted), making the map invertible. Orthogonality of every
/// pair is still verified before returning — a failure indicates an
/// upstream bug and is an error, never a silent result.
pub fn code_to_mols(part: &SeparabilityPartition) -> Result<MolsSet> {
    if part.r() != part.n() {
        return Err(Error::ClassSizeNotDegree { r: part.r(), n: part.n() });
    }
    let n = part.n();
    let mut squares = Vec::with_capacity(part.m());
    for class in part.classes() {
        let mut cells = vec![0u16; n * n];
        for (i, w) in class.iter().enumerate() {
            for j in 0..n {
                cells[j * n + w.image(j)] = i as u16;
            }
        }
        squares.push(LatinSquare::new(n, cells)?);
    }
    MolsSet::new(squares)
}

/// The inverse of [`code_to_mols`]: square k and symbol s define the word
/// sending each row j to the column where row j of square k holds s. The
/// words of one square are pairwise at distance n (a cell holds a single
/// symbol) and words of different squares at distance exactly n−1
/// (orthogonality puts the symbol pair (s, t) on exactly one cell), so the
/// union is an (n, m)-separable code with class size n.
pub fn mols_to_code(mols: &MolsSet) -> Result<PermutationCode> {
    let n = mols.n();
    let mut parts = Vec::with_capacity(mols.len());
    for square in mols.squares() {
        let mut images = vec![vec![0u16; n]; n];
        for j in 0..n {
            for x in 0..n {
                images[square.cell(j, x) as usize][j] = x as u16;
            }
        }
        let words: Vec<Permutation> =
            images.into_iter().map(Permutation::from_images).collect::<Result<_>>()?;
        parts.push(words);
    }
    PermutationCode::from_union(n, &parts)
}
