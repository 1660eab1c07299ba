//! Search configuration files.
//!
//! The format mirrors the dataset files: `key value` lines, named blocks
//! whose cycle-notation bodies run until a blank line, `#` comments.
//!
//! ```text
//! n 35                  # degree (required unless dataset is given)
//! dataset n35           # U and seed orbits from a shipped dataset
//! target-m 6            # stop a branch once this many classes are found
//! node-limit 1000000    # search node budget (default 100000000)
//! workers 4             # worker threads (the --workers flag overrides)
//! checkpoint ck.json    # branch-boundary checkpoint file
//!
//! isogen g1             # degree-2n generators of U (when no dataset)
//! (1, 36)(2, 37)
//!
//! stab s1               # degree-2n isometries every candidate must respect
//! (1, 2, 3)(36, 37, 38)
//!
//! seed w1               # extra degree-n seed words
//! (1, 2)
//! ```
//!
//! A config must yield a group (`dataset` or `isogen` blocks, not both) and
//! at least one candidate source (`dataset`, `seed`, or `stab`).

use molskit::data::{build_group, e_words, load_dataset};
use molskit::iso::{IsoElement, IsoGroup, DEFAULT_CLOSURE_LIMIT};
use molskit::perm::{parse_cycles, Permutation};
use molskit::search::SearchConfig;
use molskit::{Error, Result};
use std::path::PathBuf;

/// A parsed search config: the library config plus how to enumerate.
pub struct CliSearch {
    pub cfg: SearchConfig,
    /// True when a `stab` constraint was given, i.e. representatives are
    /// enumerated by constraint propagation rather than taken from seeds
    /// alone.
    pub enumerate_stabilized: bool,
}

pub fn parse_search_config(text: &str) -> Result<CliSearch> {
    let err = |line: usize, msg: String| Error::DatasetParse { line, msg };
    let mut n: Option<usize> = None;
    let mut dataset: Option<String> = None;
    let mut target_m: Option<usize> = None;
    let mut node_limit: Option<u64> = None;
    let mut workers: Option<usize> = None;
    let mut checkpoint: Option<PathBuf> = None;
    let mut isogens: Vec<IsoElement> = Vec::new();
    let mut stabs: Vec<IsoElement> = Vec::new();
    let mut seeds: Vec<Permutation> = Vec::new();

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
        let mut value = || {
            parts
                .next()
                .map(|v| v.to_string())
                .ok_or_else(|| err(lineno, format!("{key} needs a value")))
        };
        match key {
            "n" => {
                n = Some(value()?.parse().map_err(|_| {
                    err(lineno, "n needs a positive integer".into())
                })?)
            }
            "dataset" => dataset = Some(value()?),
            "target-m" => {
                target_m = Some(value()?.parse().map_err(|_| {
                    err(lineno, "target-m needs a positive integer".into())
                })?)
            }
            "node-limit" => {
                node_limit = Some(value()?.parse().map_err(|_| {
                    err(lineno, "node-limit needs a positive integer".into())
                })?)
            }
            "workers" => {
                workers = Some(value()?.parse().map_err(|_| {
                    err(lineno, "workers needs a positive integer".into())
                })?)
            }
            "checkpoint" => checkpoint = Some(PathBuf::from(value()?)),
            "isogen" | "stab" | "seed" => {
                let _block_name = value()?;
                let degree_n = n.ok_or_else(|| {
                    err(lineno, "n must be declared before any block".into())
                })?;
                let mut body = String::new();
                while i < lines.len() && !lines[i].trim().is_empty() {
                    body.push_str(lines[i]);
                    body.push(' ');
                    i += 1;
                }
                if body.trim().is_empty() {
                    return Err(err(lineno, format!("{key} block has an empty body")));
                }
                let degree = if key == "seed" { degree_n } else { 2 * degree_n };
                let p = parse_cycles(&body, degree)
                    .map_err(|e| err(lineno, format!("{key} block: {e}")))?;
                match key {
                    "isogen" => isogens
                        .push(IsoElement::new(p).map_err(|e| err(lineno, format!("{key}: {e}")))?),
                    "stab" => stabs
                        .push(IsoElement::new(p).map_err(|e| err(lineno, format!("{key}: {e}")))?),
                    _ => seeds.push(p),
                }
            }
            other => return Err(err(lineno, format!("unknown key {other:?}"))),
        }
    }

    let input = |msg: &str| Error::SearchConfig(msg.to_string());
    if dataset.is_some() && !isogens.is_empty() {
        return Err(input("declare either a dataset or isogen blocks, not both"));
    }
    let u: IsoGroup;
    match &dataset {
        Some(name) => {
            let ds = load_dataset(name)?;
            if let Some(declared) = n {
                if declared != ds.n {
                    return Err(input(&format!(
                        "config declares n = {declared} but dataset {name} has n = {}",
                        ds.n
                    )));
                }
            }
            u = build_group(&ds)?;
            let mut dataset_seeds: Vec<Permutation> =
                ds.representatives.iter().map(|(_, p)| p.clone()).collect();
            if !ds.egens.is_empty() {
                dataset_seeds.extend(e_words(&ds)?);
            }
            dataset_seeds.extend(std::mem::take(&mut seeds));
            seeds = dataset_seeds;
        }
        None => {
            if isogens.is_empty() {
                return Err(input("config needs a dataset or isogen blocks to define U"));
            }
            u = IsoGroup::generate(isogens, DEFAULT_CLOSURE_LIMIT)?;
        }
    }
    if seeds.is_empty() && stabs.is_empty() {
        return Err(input(
            "config yields no candidates: provide a dataset, seed blocks, or a stab constraint",
        ));
    }

    let mut cfg = SearchConfig::new(u);
    cfg.target_m = target_m;
    if let Some(limit) = node_limit {
        cfg.node_limit = limit;
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    cfg.checkpoint_path = checkpoint;
    if !seeds.is_empty() {
        cfg.seed_orbits = Some(seeds);
    }
    let enumerate_stabilized = !stabs.is_empty();
    if enumerate_stabilized {
        cfg.required_stabilizer = Some(stabs);
    }
    Ok(CliSearch { cfg, enumerate_stabilized })
}
