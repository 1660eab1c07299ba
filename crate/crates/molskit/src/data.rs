//! The shipped construction datasets: file format, loader, code assembly,
//! and verification of every published expectation.
//!
//! Dataset files are plain text: a header (`name`, `n`, optional `group`,
//! `include-e`), blank-line-separated blocks (`egen`/`isogen`/`rep`, each
//! with a name and a cycle-notation body, `Id` for the identity), and
//! `expect` lines freezing the published numbers. The files double as test
//! fixtures; every expected value is a transcription tripwire.

use crate::code::{separability_partition, PermutationCode, SeparabilityPartition};
use crate::error::{Error, Result};
use crate::group::{
    parse_group_spec, perm_order_profile, permutation_closure, FiniteGroup,
};
use crate::iso::{
    delta_element, orbit, orbit_split, IsoElement, IsoGroup, DEFAULT_CLOSURE_LIMIT,
};
use crate::perm::{min_distance, parse_cycles, Permutation};
use serde::Serialize;

/// The eight shipped dataset names.
pub const DATASET_NAMES: [&str; 8] = ["n14", "n20", "n21", "n35", "n48", "n56", "n63", "n96"];

const EMBEDDED: [(&str, &str); 8] = [
    ("n14", include_str!("../data/n14.txt")),
    ("n20", include_str!("../data/n20.txt")),
    ("n21", include_str!("../data/n21.txt")),
    ("n35", include_str!("../data/n35.txt")),
    ("n48", include_str!("../data/n48.txt")),
    ("n56", include_str!("../data/n56.txt")),
    ("n63", include_str!("../data/n63.txt")),
    ("n96", include_str!("../data/n96.txt")),
];

/// Frozen published values a dataset must reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub group_order: usize,
    /// Orbit size per representative, in declaration order.
    pub orbit_sizes: Vec<usize>,
    /// Sizes of the U-orbits of E, descending, when E is part of the code's
    /// analysis.
    pub e_orbit_sizes: Option<Vec<usize>>,
    pub code_size: usize,
    pub min_distance: usize,
    pub r: usize,
    pub m: usize,
    /// Index in U of a subgroup conjugate to the diagonal Δ(Φ(R(G))),
    /// when claimed.
    pub delta_index: Option<usize>,
    /// (H, K) cyclic group specs when the code is the double coset H·Id·K.
    pub double_coset: Option<(String, String)>,
}

/// A parsed construction dataset.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub n: usize,
    pub group_spec: Option<String>,
    pub include_e: bool,
    /// Degree-n generators of E; their Δ-images generate the diagonal part
    /// of U.
    pub egens: Vec<(String, Permutation)>,
    /// Degree-2n isometry generators.
    pub isogens: Vec<(String, IsoElement)>,
    /// Degree-n orbit representatives, in the published order.
    pub representatives: Vec<(String, Permutation)>,
    pub expected: Expected,
}

/// Load a dataset by name. The embedded fixtures cover
/// [`DATASET_NAMES`]; when the `MOLSKIT_DATA` environment variable points
/// at a directory, `<dir>/<name>.txt` takes precedence for any name (and
/// names outside the embedded set become loadable).
pub fn load_dataset(name: &str) -> Result<Dataset> {
    if let Ok(dir) = std::env::var("MOLSKIT_DATA") {
        let path = std::path::Path::new(&dir).join(format!("{name}.txt"));
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(e.to_string()))?;
            return parse_dataset(&text);
        }
    }
    let text = EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownDataset(name.to_string()))?;
    parse_dataset(text)
}

/// Parse the dataset file format.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let err = |line: usize, msg: String| Error::DatasetParse { line, msg };
    let mut name = None;
    let mut n: Option<usize> = None;
    let mut group_spec = None;
    let mut include_e = false;
    let mut egens = Vec::new();
    let mut isogens = Vec::new();
    let mut representatives = Vec::new();
    let mut expects: Vec<(usize, String, Vec<String>)> = Vec::new();

    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "name" => {
                name = Some(
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, "name needs a value".into()))?
                        .to_string(),
                )
            }
            "n" => {
                n = Some(
                    parts
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(lineno, "n needs a positive integer".into()))?,
                )
            }
            "group" => {
                group_spec = Some(
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, "group needs a spec".into()))?
                        .to_string(),
                )
            }
            "include-e" => {
                include_e = match parts.next() {
                    Some("true") => true,
                    Some("false") => false,
                    other => {
                        return Err(err(lineno, format!("include-e expects true/false, got {other:?}")))
                    }
                }
            }
            "expect" => {
                let field = parts
                    .next()
                    .ok_or_else(|| err(lineno, "expect needs a field name".into()))?
                    .to_string();
                let values: Vec<String> = parts.map(|s| s.to_string()).collect();
                if values.is_empty() {
                    return Err(err(lineno, format!("expect {field} needs at least one value")));
                }
                expects.push((lineno, field, values));
            }
            "egen" | "isogen" | "rep" => {
                let block_name = parts
                    .next()
                    .ok_or_else(|| err(lineno, format!("{key} needs a name")))?
                    .to_string();
                let degree_n =
                    n.ok_or_else(|| err(lineno, "n must be declared before any block".into()))?;
                let mut body = String::new();
                while i < lines.len() && !lines[i].trim().is_empty() {
                    body.push_str(lines[i]);
                    body.push(' ');
                    i += 1;
                }
                if body.trim().is_empty() {
                    return Err(err(lineno, format!("{key} {block_name} has an empty body")));
                }
                match key {
                    "egen" => {
                        let p = parse_cycles(&body, degree_n)
                            .map_err(|e| err(lineno, format!("egen {block_name}: {e}")))?;
                        egens.push((block_name, p));
                    }
                    "isogen" => {
                        let p = parse_cycles(&body, 2 * degree_n)
                            .map_err(|e| err(lineno, format!("isogen {block_name}: {e}")))?;
                        let g = IsoElement::new(p)
                            .map_err(|e| err(lineno, format!("isogen {block_name}: {e}")))?;
                        isogens.push((block_name, g));
                    }
                    _ => {
                        let p = parse_cycles(&body, degree_n)
                            .map_err(|e| err(lineno, format!("rep {block_name}: {e}")))?;
                        representatives.push((block_name, p));
                    }
                }
            }
            other => return Err(err(lineno, format!("unknown key {other:?}"))),
        }
    }

    let name = name.ok_or_else(|| err(0, "missing name".into()))?;
    let n = n.ok_or_else(|| err(0, "missing n".into()))?;
    let mut expected = ExpectedBuilder::default();
    for (lineno, field, values) in expects {
        expected.set(&field, &values).map_err(|msg| err(lineno, msg))?;
    }
    if egens.is_empty() && isogens.is_empty() {
        return Err(err(0, "dataset declares no generators".into()));
    }
    if representatives.is_empty() {
        return Err(err(0, "dataset declares no representatives".into()));
    }
    let expected = expected.build().map_err(|msg| err(0, msg))?;
    if expected.orbit_sizes.len() != representatives.len() {
        return Err(err(
            0,
            format!(
                "expect orbit-sizes lists {} sizes for {} representatives",
                expected.orbit_sizes.len(),
                representatives.len()
            ),
        ));
    }
    Ok(Dataset { name, n, group_spec, include_e, egens, isogens, representatives, expected })
}

#[derive(Default)]
struct ExpectedBuilder {
    group_order: Option<usize>,
    orbit_sizes: Option<Vec<usize>>,
    e_orbit_sizes: Option<Vec<usize>>,
    code_size: Option<usize>,
    min_distance: Option<usize>,
    r: Option<usize>,
    m: Option<usize>,
    delta_index: Option<usize>,
    double_coset: Option<(String, String)>,
}

impl ExpectedBuilder {
    fn set(&mut self, field: &str, values: &[String]) -> std::result::Result<(), String> {
        let ints = || -> std::result::Result<Vec<usize>, String> {
            values
                .iter()
                .map(|v| v.parse().map_err(|_| format!("expect {field}: bad integer {v:?}")))
                .collect()
        };
        let one = || -> std::result::Result<usize, String> {
            let v = ints()?;
            if v.len() == 1 { Ok(v[0]) } else { Err(format!("expect {field} takes one value")) }
        };
        match field {
            "group-order" => self.group_order = Some(one()?),
            "orbit-sizes" => self.orbit_sizes = Some(ints()?),
            "e-orbit-sizes" => self.e_orbit_sizes = Some(ints()?),
            "code-size" => self.code_size = Some(one()?),
            "min-distance" => self.min_distance = Some(one()?),
            "r" => self.r = Some(one()?),
            "m" => self.m = Some(one()?),
            "delta-index" => self.delta_index = Some(one()?),
            "double-coset" => {
                if values.len() != 2 {
                    return Err("expect double-coset takes two group specs".into());
                }
                self.double_coset = Some((values[0].clone(), values[1].clone()));
            }
            other => return Err(format!("unknown expect field {other:?}")),
        }
        Ok(())
    }

    fn build(self) -> std::result::Result<Expected, String> {
        let need = |what: &str| format!("missing expect {what}");
        Ok(Expected {
            group_order: self.group_order.ok_or_else(|| need("group-order"))?,
            orbit_sizes: self.orbit_sizes.ok_or_else(|| need("orbit-sizes"))?,
            e_orbit_sizes: self.e_orbit_sizes,
            code_size: self.code_size.ok_or_else(|| need("code-size"))?,
            min_distance: self.min_distance.ok_or_else(|| need("min-distance"))?,
            r: self.r.ok_or_else(|| need("r"))?,
            m: self.m.ok_or_else(|| need("m"))?,
            delta_index: self.delta_index,
            double_coset: self.double_coset,
        })
    }
}

/// Generate the dataset's isometry group U: the Δ-images of the E
/// generators plus the listed isometry generators.
pub fn build_group(ds: &Dataset) -> Result<IsoGroup> {
    let mut gens: Vec<IsoElement> = ds.egens.iter().map(|(_, p)| delta_element(p)).collect();
    gens.extend(ds.isogens.iter().map(|(_, g)| g.clone()));
    IsoGroup::generate(gens, DEFAULT_CLOSURE_LIMIT)
}

/// The subgroup E generated by the dataset's degree-n generators.
pub fn e_words(ds: &Dataset) -> Result<Vec<Permutation>> {
    permutation_closure(
        &ds.egens.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>(),
        ds.n,
        DEFAULT_CLOSURE_LIMIT,
    )
}

fn mismatch<T: std::fmt::Debug>(ds: &Dataset, field: &str, expected: T, got: T) -> Error {
    Error::DatasetMismatch {
        name: ds.name.clone(),
        field: field.to_string(),
        expected: format!("{expected:?}"),
        got: format!("{got:?}"),
    }
}

/// Assemble the dataset's code: the union of the U-orbits of all
/// representatives, plus E wholesale when the dataset includes it. The
/// group order, every orbit size, and the code size are checked against
/// the frozen expectations — any deviation is a hard mismatch error.
pub fn assemble_code(ds: &Dataset) -> Result<PermutationCode> {
    let u = build_group(ds)?;
    assemble_code_with_group(ds, &u)
}

fn assemble_code_with_group(ds: &Dataset, u: &IsoGroup) -> Result<PermutationCode> {
    if u.order() != ds.expected.group_order {
        return Err(mismatch(ds, "group-order", ds.expected.group_order, u.order()));
    }
    let mut parts: Vec<Vec<Permutation>> = Vec::new();
    let mut sizes = Vec::new();
    for (_, rep) in &ds.representatives {
        let orb = orbit(rep, u)?;
        sizes.push(orb.len());
        parts.push(orb);
    }
    if sizes != ds.expected.orbit_sizes {
        return Err(mismatch(ds, "orbit-sizes", ds.expected.orbit_sizes.clone(), sizes));
    }
    if ds.include_e {
        parts.push(e_words(ds)?);
    }
    let code = PermutationCode::from_union(ds.n, &parts)?;
    if code.len() != ds.expected.code_size {
        return Err(mismatch(ds, "code-size", ds.expected.code_size, code.len()));
    }
    Ok(code)
}

/// The verified numbers for one dataset, mirroring `verify`'s JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct DatasetReport {
    pub name: String,
    pub n: usize,
    pub group_order: usize,
    pub orbit_sizes: Vec<usize>,
    pub stabilizer_orders: Vec<usize>,
    pub e_orbit_sizes: Option<Vec<usize>>,
    pub code_size: usize,
    pub min_distance: usize,
    pub r: usize,
    pub m: usize,
    /// Group spec verified to have a sharply transitive copy inside the
    /// construction — as E itself, or as the diagonal-subgroup witness.
    pub regular_subgroup: Option<String>,
    /// Verified index in U of a subgroup conjugate to Δ(Φ(R(G))).
    pub delta_index: Option<usize>,
    /// "H Id K" when the code was verified to be that double coset.
    pub double_coset: Option<String>,
}

/// Run the complete verification pipeline for a dataset: group order,
/// orbit sizes, orbit–stabilizer consistency, code size, minimum distance,
/// separability (r, m), the E-orbit split, the E ≅ R(G) identification,
/// the diagonal-subgroup index, and the double-coset closure — each
/// compared against the frozen expectations.
pub fn verify_dataset(ds: &Dataset) -> Result<DatasetReport> {
    verify_dataset_full(ds).map(|(report, _, _)| report)
}

/// [`verify_dataset`], additionally returning the assembled code and its
/// separability partition for downstream use (e.g. MOLS export).
pub fn verify_dataset_full(
    ds: &Dataset,
) -> Result<(DatasetReport, PermutationCode, SeparabilityPartition)> {
    let u = build_group(ds)?;
    let code = assemble_code_with_group(ds, &u)?;

    // Orbit–stabilizer cross-check: |orbit| · |stabilizer| = |U|.
    let mut stabilizer_orders = Vec::new();
    for ((_, rep), &size) in ds.representatives.iter().zip(&ds.expected.orbit_sizes) {
        let stab = u.stabilizer(rep)?.len();
        if stab * size != u.order() {
            return Err(mismatch(ds, "stabilizer-order", u.order() / size, stab));
        }
        stabilizer_orders.push(stab);
    }

    let d = code.min_distance()?;
    if d != ds.expected.min_distance {
        return Err(mismatch(ds, "min-distance", ds.expected.min_distance, d));
    }
    let partition = separability_partition(&code)?;
    if partition.r() != ds.expected.r {
        return Err(mismatch(ds, "r", ds.expected.r, partition.r()));
    }
    if partition.m() != ds.expected.m {
        return Err(mismatch(ds, "m", ds.expected.m, partition.m()));
    }

    // E-orbit split under U, descending sizes.
    let mut e_orbit_sizes = None;
    if let Some(expected_sizes) = &ds.expected.e_orbit_sizes {
        let split = orbit_split(&e_words(ds)?, &u)?;
        let mut sizes: Vec<usize> = split.iter().map(|o| o.len()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        if &sizes != expected_sizes {
            return Err(mismatch(ds, "e-orbit-sizes", expected_sizes.clone(), sizes));
        }
        e_orbit_sizes = Some(sizes);
    }

    // Identify the abstract group named by the spec inside the
    // construction: as E itself when the dataset lists its generators, and
    // otherwise through the diagonal-subgroup witness below.
    let spec_group = ds.group_spec.as_deref().map(parse_group_spec).transpose()?;
    let mut regular_subgroup = None;
    if let Some(g) = &spec_group {
        if !ds.egens.is_empty() {
            verify_regular_subgroup(ds, g, &e_words(ds)?)?;
            regular_subgroup = Some(g.spec_string().to_string());
        }
    }

    let mut delta_index = None;
    if let Some(expected_index) = ds.expected.delta_index {
        let g = spec_group.as_ref().ok_or_else(|| Error::DatasetMismatch {
            name: ds.name.clone(),
            field: "delta-index".into(),
            expected: "a group spec naming the diagonal subgroup".into(),
            got: "no group declared".into(),
        })?;
        let index = verify_delta_index(ds, &u, g, expected_index)?;
        delta_index = Some(index);
        regular_subgroup = Some(g.spec_string().to_string());
    }

    let mut double_coset = None;
    if let Some((h_spec, k_spec)) = &ds.expected.double_coset {
        verify_double_coset(ds, &code, h_spec, k_spec)?;
        double_coset = Some(format!("{h_spec} Id {k_spec}"));
    }

    let report = DatasetReport {
        name: ds.name.clone(),
        n: ds.n,
        group_order: u.order(),
        orbit_sizes: ds.expected.orbit_sizes.clone(),
        stabilizer_orders,
        e_orbit_sizes,
        code_size: code.len(),
        min_distance: d,
        r: partition.r(),
        m: partition.m(),
        regular_subgroup,
        delta_index,
        double_coset,
    };
    Ok((report, code, partition))
}

/// Pairwise commutativity of a set of same-degree permutations.
fn all_commute(words: &[Permutation]) -> Result<bool> {
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            if a.compose(b)? != b.compose(a)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Check that `e` is a sharply transitive permutation copy of the abstract
/// group `g`: order n, pairwise distance n, pairwise commuting, and the
/// same element-order profile. Every expressible group spec is a direct
/// product of cyclic factors, hence abelian, and a finite abelian group is
/// determined up to isomorphism by its element-order multiset — so these
/// checks pin E ≅ R(G) completely.
fn verify_regular_subgroup(ds: &Dataset, g: &FiniteGroup, e: &[Permutation]) -> Result<()> {
    if g.order() != ds.n {
        return Err(mismatch(ds, "group-spec-order", ds.n, g.order()));
    }
    if e.len() != ds.n {
        return Err(mismatch(ds, "e-order", ds.n, e.len()));
    }
    let e_dist = min_distance(e)?;
    if e_dist != ds.n {
        return Err(mismatch(ds, "e-sharp-transitivity-distance", ds.n, e_dist));
    }
    if !all_commute(e)? {
        return Err(Error::DatasetMismatch {
            name: ds.name.clone(),
            field: "e-abelian".into(),
            expected: "pairwise commuting elements".into(),
            got: "a non-commuting pair".into(),
        });
    }
    let profile = perm_order_profile(e);
    if profile != g.order_profile() {
        return Err(Error::DatasetMismatch {
            name: ds.name.clone(),
            field: "e-order-profile".into(),
            expected: format!("{:?}", g.order_profile()),
            got: format!("{profile:?}"),
        });
    }
    Ok(())
}

/// Verify that U contains a subgroup conjugate in Iso(n) to Δ(Φ(R(G)))
/// and return its index in U.
///
/// The copy is witnessed by a stabilizer. For a word w, every block-fixing
/// element of the stabilizer of w is forced into the twisted-diagonal form
/// (b, w⁻¹bw), so that part of the stabilizer is carried onto the literal
/// diagonal Δ(w⁻¹Vw) by conjugation with the isometry (w, Id), where
/// V := {b} is its first-block projection (a group isomorphic to it). A
/// witness is accepted when V is a sharply transitive copy of G — checked
/// exactly as for E ≅ R(G) — so the conjugated diagonal has index |U|/n.
/// Candidate witnesses are the listed representatives plus the identity
/// word; the identity's witness is the literal diagonal part of U itself.
fn verify_delta_index(
    ds: &Dataset,
    u: &IsoGroup,
    g: &FiniteGroup,
    expected_index: usize,
) -> Result<usize> {
    let mut candidates: Vec<Permutation> =
        ds.representatives.iter().map(|(_, p)| p.clone()).collect();
    let id = Permutation::identity(ds.n);
    if !candidates.contains(&id) {
        candidates.push(id);
    }
    for w in &candidates {
        let v: Vec<Permutation> = u
            .stabilizer(w)?
            .iter()
            .filter_map(|s| {
                let (b1, _, eps) = s.decompose();
                (!eps).then_some(b1)
            })
            .collect();
        if verify_regular_subgroup(ds, g, &v).is_err() {
            continue;
        }
        let index = u.order() / v.len();
        if index != expected_index {
            return Err(mismatch(ds, "delta-index", expected_index, index));
        }
        return Ok(index);
    }
    Err(Error::DatasetMismatch {
        name: ds.name.clone(),
        field: "delta-subgroup".into(),
        expected: format!("a stabilizer conjugate to Δ(Φ(R({})))", g.spec_string()),
        got: "no candidate stabilizer projects to a sharply transitive copy of the group".into(),
    })
}

/// Check the double-coset identity: the first isometry generator
/// decomposes as (β₁, β₂) with ⟨β₁⟩ ≅ H and ⟨β₂⟩ ≅ K, and the code is
/// closed under left multiplication by β₁ and right multiplication by β₂.
/// Together with Id ∈ C and |C| = |H|·|K| this proves C = H·Id·K.
fn verify_double_coset(
    ds: &Dataset,
    code: &PermutationCode,
    h_spec: &str,
    k_spec: &str,
) -> Result<()> {
    let h_order = parse_group_spec(h_spec)?.order();
    let k_order = parse_group_spec(k_spec)?.order();
    let (_, first) = ds
        .isogens
        .first()
        .ok_or(Error::Empty("double-coset check needs an isometry generator"))?;
    let (b1, b2, eps) = first.decompose();
    if eps {
        return Err(Error::DatasetMismatch {
            name: ds.name.clone(),
            field: "double-coset-generator".into(),
            expected: "a block-fixing generator".into(),
            got: "a block-swapping generator".into(),
        });
    }
    if b1.order() as usize != h_order {
        return Err(mismatch(ds, "double-coset-H-order", h_order, b1.order() as usize));
    }
    if b2.order() as usize != k_order {
        return Err(mismatch(ds, "double-coset-K-order", k_order, b2.order() as usize));
    }
    if code.len() != h_order * k_order {
        return Err(mismatch(ds, "double-coset-size", h_order * k_order, code.len()));
    }
    if !code.contains(&Permutation::identity(ds.n)) {
        return Err(Error::DatasetMismatch {
            name: ds.name.clone(),
            field: "double-coset-identity".into(),
            expected: "Id in the code".into(),
            got: "Id missing".into(),
        });
    }
    for w in code.words() {
        if !code.contains(&b1.compose(w)?) {
            return Err(Error::DatasetMismatch {
                name: ds.name.clone(),
                field: "double-coset-left-closure".into(),
                expected: "β₁·w in the code for every word".into(),
                got: format!("escapes at w = {w}"),
            });
        }
        if !code.contains(&w.compose(&b2)?) {
            return Err(Error::DatasetMismatch {
                name: ds.name.clone(),
                field: "double-coset-right-closure".into(),
                expected: "w·β₂ in the code for every word".into(),
                got: format!("escapes at w = {w}"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_dataset_name() {
        assert!(matches!(load_dataset("n99"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn all_embedded_datasets_parse() {
        for name in DATASET_NAMES {
            let ds = load_dataset(name).unwrap();
            assert_eq!(ds.name, name);
            assert_eq!(ds.expected.orbit_sizes.len(), ds.representatives.len());
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let cases: &[(&str, &str)] = &[
            ("", "missing name"),
            ("name t\nn 3\nexpect bogus-field 1\n", "unknown expect field"),
            ("name t\nn 3\nwat 4\n", "unknown key"),
            ("name t\nrep a\n(1, 2)\n", "n must be declared"),
            ("name t\nn 3\nrep a\n(1, 9)\n", "rep a"),
            (
                "name t\nn 2\nisogen a\n(1, 4)\n",
                "isogen a",
            ),
            (
                "name t\nn 3\negen x\n(1, 2, 3)\n\nrep a\nId\n\nexpect group-order 3\n\
                 expect orbit-sizes 1 1\nexpect code-size 3\nexpect min-distance 3\n\
                 expect r 3\nexpect m 1\n",
                "orbit-sizes lists 2 sizes for 1",
            ),
            (
                "name t\nn 3\negen x\n(1, 2, 3)\n\nrep a\nId\n\nexpect orbit-sizes 1\n\
                 expect code-size 3\nexpect min-distance 3\nexpect r 3\nexpect m 1\n",
                "missing expect group-order",
            ),
        ];
        for (text, needle) in cases {
            match parse_dataset(text) {
                Err(Error::DatasetParse { msg, .. }) => {
                    assert!(msg.contains(needle), "{msg:?} should mention {needle:?}")
                }
                other => panic!("expected parse error mentioning {needle:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "name t\nn 3\n# comment\nexpect group-order x\n";
        match parse_dataset(text) {
            Err(Error::DatasetParse { line: 4, .. }) => {}
            other => panic!("expected an error on line 4, got {other:?}"),
        }
    }

    #[test]
    fn environment_override_supplies_extra_datasets() {
        let dir = std::env::temp_dir().join(format!("molskit-data-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(
            dir.join("tiny.txt"),
            "name tiny\nn 3\ngroup Z3\ninclude-e true\n\negen x\n(1, 2, 3)\n\nrep a\nId\n\n\
             expect group-order 3\nexpect orbit-sizes 1\nexpect code-size 3\n\
             expect min-distance 3\nexpect r 3\nexpect m 1\n",
        )
        .unwrap();
        std::env::set_var("MOLSKIT_DATA", &dir);
        let loaded = load_dataset("tiny");
        // Embedded names keep working while the override is set (the
        // directory only takes precedence for files it actually contains).
        let embedded = load_dataset("n35");
        std::env::remove_var("MOLSKIT_DATA");
        std::fs::remove_dir_all(&dir).unwrap();
        let ds = loaded.unwrap();
        assert_eq!(ds.name, "tiny");
        assert_eq!(ds.group_spec.as_deref(), Some("Z3"));
        verify_dataset(&ds).unwrap();
        assert_eq!(embedded.unwrap().n, 35);
    }

    #[test]
    fn mismatched_expectations_are_hard_errors() {
        let mut ds = load_dataset("n35").unwrap();
        ds.expected.code_size = 211;
        match assemble_code(&ds) {
            Err(Error::DatasetMismatch { field, expected, got, .. }) => {
                assert_eq!(field, "code-size");
                assert_eq!(expected, "211");
                assert_eq!(got, "210");
            }
            other => panic!("expected a code-size mismatch, got {other:?}"),
        }
        let mut ds = load_dataset("n20").unwrap();
        ds.expected.orbit_sizes = vec![79];
        assert!(matches!(
            assemble_code(&ds),
            Err(Error::DatasetMismatch { field, .. }) if field == "orbit-sizes"
        ));
        let mut ds = load_dataset("n21").unwrap();
        ds.expected.m = 4;
        assert!(matches!(
            verify_dataset(&ds),
            Err(Error::DatasetMismatch { field, .. }) if field == "m"
        ));
    }

    #[test]
    fn n35_verifies_in_full() {
        let ds = load_dataset("n35").unwrap();
        let report = verify_dataset(&ds).unwrap();
        assert_eq!(report.group_order, 140);
        assert_eq!(report.orbit_sizes, vec![70, 70, 35]);
        assert_eq!(report.stabilizer_orders, vec![2, 2, 4]);
        assert_eq!(report.code_size, 210);
        assert_eq!(report.min_distance, 34);
        assert_eq!((report.r, report.m), (35, 6));
        assert_eq!(report.regular_subgroup.as_deref(), Some("Z35"));
        let sizes = report.e_orbit_sizes.unwrap();
        assert_eq!(sizes.len(), 18);
        assert!(sizes.iter().all(|&s| s == 1 || s == 2));
    }

    #[test]
    fn n48_verifies_in_full() {
        let report = verify_dataset(&load_dataset("n48").unwrap()).unwrap();
        assert_eq!(report.group_order, 1152);
        assert_eq!(report.orbit_sizes, vec![288, 144]);
        assert_eq!(report.code_size, 480);
        assert_eq!((report.r, report.m), (48, 10));
        assert_eq!(report.e_orbit_sizes, Some(vec![24, 12, 12]));
    }

    #[test]
    fn n63_verifies_in_full() {
        let report = verify_dataset(&load_dataset("n63").unwrap()).unwrap();
        assert_eq!(report.group_order, 3402);
        assert_eq!(report.code_size, 504);
        assert_eq!((report.r, report.m), (63, 8));
        assert_eq!(report.e_orbit_sizes, Some(vec![54, 9]));
    }

    #[test]
    fn n96_verifies_in_full() {
        let report = verify_dataset(&load_dataset("n96").unwrap()).unwrap();
        assert_eq!(report.group_order, 4608);
        assert_eq!(report.orbit_sizes, vec![576, 96, 48, 48]);
        assert_eq!(report.stabilizer_orders, vec![8, 48, 96, 96]);
        assert_eq!(report.code_size, 768);
        assert_eq!((report.r, report.m), (96, 8));
        assert_eq!(report.delta_index, Some(48));
        assert_eq!(report.regular_subgroup.as_deref(), Some("Z2xZ2xZ2xZ2xZ6"));
    }

    #[test]
    fn section_four_datasets_verify() {
        for (name, m) in [("n14", 4), ("n20", 4), ("n21", 5), ("n56", 7)] {
            let report = verify_dataset(&load_dataset(name).unwrap()).unwrap();
            assert_eq!(report.m, m, "{name}");
            assert_eq!(report.r, report.n, "{name}");
        }
    }

    #[test]
    fn n21_is_a_double_coset() {
        let report = verify_dataset(&load_dataset("n21").unwrap()).unwrap();
        assert_eq!(report.double_coset.as_deref(), Some("Z21 Id Z5"));
    }

    #[test]
    fn every_dataset_yields_verified_mols() {
        // MolsSet::new checks pairwise orthogonality, so constructing the
        // family from each dataset's partition proves the m MOLS exist.
        for name in DATASET_NAMES {
            let (report, _, part) = verify_dataset_full(&load_dataset(name).unwrap()).unwrap();
            let mols = crate::latin::code_to_mols(&part).unwrap();
            assert_eq!(mols.len(), report.m, "{name}");
            assert_eq!(mols.n(), report.n, "{name}");
        }
    }

    #[test]
    fn n56_orbit_stabilizer_numbers() {
        let report = verify_dataset(&load_dataset("n56").unwrap()).unwrap();
        assert_eq!(report.group_order, 9408);
        assert_eq!(report.orbit_sizes, vec![392]);
        assert_eq!(report.stabilizer_orders, vec![24]);
    }
}
