//! Enumeration of separable orbits under distance and stabilizer
//! constraints, and a deterministic backtrack search that joins orbit
//! subsets into an (n, m)-separable permutation array with maximal m.

use crate::code::{separability_partition, PermutationCode, SeparabilityPartition};
use crate::error::{Error, Result};
use crate::iso::{is_stabilized, orbit, IsoElement, IsoGroup};
use crate::perm::{format_cycles, Permutation};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Default backtracking budget (total, split evenly across branches).
pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

const CHECKPOINT_VERSION: u32 = 1;

/// Configuration for orbit enumeration and the backtrack join.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// The isometry subgroup whose orbits are joined.
    pub u: IsoGroup,
    /// Orbit representatives must be fixed by every element of this set
    /// (used to enumerate representatives when no universe is given).
    pub required_stabilizer: Option<Vec<IsoElement>>,
    /// Stop deepening a branch once a union with at least this many
    /// classes has been found.
    pub target_m: Option<usize>,
    /// Extra representatives whose orbits are always offered as candidates.
    pub seed_orbits: Option<Vec<Permutation>>,
    /// Total node budget; exhausting it returns best-so-far, flagged.
    pub node_limit: u64,
    /// Worker threads for top-level branches. Results and node counts are
    /// independent of this value.
    pub workers: usize,
    /// Where to persist per-branch results for later resumption.
    pub checkpoint_path: Option<PathBuf>,
    /// Load previously completed branches from `checkpoint_path`.
    pub resume: bool,
}

impl SearchConfig {
    pub fn new(u: IsoGroup) -> SearchConfig {
        SearchConfig {
            u,
            required_stabilizer: None,
            target_m: None,
            seed_orbits: None,
            node_limit: DEFAULT_NODE_LIMIT,
            workers: 1,
            checkpoint_path: None,
            resume: false,
        }
    }
}

/// A U-orbit that is itself joinable: minimum distance ≥ n−1 and the
/// distance-n relation restricted to the orbit is an equivalence.
///
/// `classes` lists the distance-n equivalence classes as index sets into
/// `words`; within one orbit they are automatically equal-sized because U
/// acts transitively by isometries, but they may be smaller than n (they
/// only fill up to full Latin-square classes after joining with other
/// orbits).
#[derive(Clone, Debug)]
pub struct OrbitCandidate {
    representative: Permutation,
    words: Vec<Permutation>,
    classes: Vec<Vec<usize>>,
    stabilizer_order: usize,
}

impl OrbitCandidate {
    /// Build a candidate from an explicit word set (sorted internally; the
    /// canonical representative is the least word). `stabilizer_order` is
    /// carried as metadata; use 1 when no group action is involved.
    pub fn from_words(mut words: Vec<Permutation>, stabilizer_order: usize) -> Result<OrbitCandidate> {
        if words.is_empty() {
            return Err(Error::Empty("orbit candidate word list"));
        }
        words.sort_unstable();
        let n = words[0].degree();
        if let Some(w) = words.iter().find(|w| w.degree() != n) {
            return Err(Error::DegreeMismatch(w.degree(), n));
        }
        let classes = distance_classes(n, &words)?;
        Ok(OrbitCandidate { representative: words[0].clone(), words, classes, stabilizer_order })
    }

    /// Compute the U-orbit of `b` and build a candidate from it. Errors if
    /// the orbit violates the distance or transitivity requirements.
    pub fn from_representative(b: &Permutation, u: &IsoGroup) -> Result<OrbitCandidate> {
        let words = orbit(b, u)?;
        let stabilizer_order = u.order() / words.len();
        OrbitCandidate::from_words(words, stabilizer_order)
    }

    /// Lexicographically least orbit member.
    pub fn representative(&self) -> &Permutation {
        &self.representative
    }

    pub fn words(&self) -> &[Permutation] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Distance-n classes as index sets into `words()`.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn stabilizer_order(&self) -> usize {
        self.stabilizer_order
    }
}

/// Partition `words` (sorted, fixed degree n) by the relation
/// σ~τ ⟺ σ=τ or d(σ,τ)=n, checking minimum distance ≥ n−1 and that the
/// relation is transitive. Unlike the full separability check, class sizes
/// may be unequal and smaller than n — partial classes are legitimate
/// mid-join and only the final union must consist of full classes.
fn distance_classes(n: usize, words: &[Permutation]) -> Result<Vec<Vec<usize>>> {
    let count = words.len();
    let mut class_of: Vec<usize> = (0..count).collect();
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
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; count];
    for i in 0..count {
        let r = root(&mut class_of, i);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[r]].push(i);
    }
    for class in &classes {
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
    Ok(classes)
}

/// Result of `enumerate_orbits`: the candidates found, the number of
/// enumeration nodes spent, and whether the enumeration ran to completion
/// (false when the node budget was exhausted; the candidates are then a
/// deterministic prefix).
#[derive(Clone, Debug)]
pub struct EnumerationOutcome {
    pub candidates: Vec<OrbitCandidate>,
    pub node_count: u64,
    pub complete: bool,
}

/// Enumerate joinable U-orbits.
///
/// Representatives are drawn from `universe` when given (filtered by the
/// required stabilizer, if any), otherwise by direct constraint-propagation
/// enumeration of all words fixed by `cfg.required_stabilizer` — rejection
/// sampling over Sₙ is hopeless at these degrees, the stabilizer constraint
/// is the tractable entry point. Seed orbits from the config are always
/// offered first. Each orbit is computed once (dedup by membership), must
/// pass the distance/transitivity filter, and candidates are returned
/// sorted by size descending, ties by representative.
pub fn enumerate_orbits(
    cfg: &SearchConfig,
    universe: Option<&[Permutation]>,
) -> Result<EnumerationOutcome> {
    let n = cfg.u.n();
    if let Some(stab) = &cfg.required_stabilizer {
        for s in stab {
            if !cfg.u.contains(s) {
                return Err(Error::SearchConfig(format!(
                    "required stabilizer element {} is not in U",
                    s.inner()
                )));
            }
        }
    }
    let mut budget = cfg.node_limit;
    let mut complete = true;
    let mut seeds: Vec<Permutation> = Vec::new();
    if let Some(extra) = &cfg.seed_orbits {
        seeds.extend_from_slice(extra);
    }
    match universe {
        Some(words) => {
            for w in words {
                if cfg.required_stabilizer.as_deref().map_or(true, |s| {
                    is_stabilized(w, s).unwrap_or(false)
                }) {
                    seeds.push(w.clone());
                }
            }
        }
        None => {
            let stab = cfg.required_stabilizer.as_deref().ok_or_else(|| {
                Error::SearchConfig(
                    "enumerating representatives without a universe requires a \
                     required_stabilizer constraint"
                        .into(),
                )
            })?;
            let (found, finished) = enumerate_stabilized(n, stab, &mut budget)?;
            complete &= finished;
            seeds.extend(found);
        }
    }
    for s in &seeds {
        if s.degree() != n {
            return Err(Error::DegreeMismatch(s.degree(), n));
        }
    }
    let mut covered: std::collections::HashSet<Permutation> = std::collections::HashSet::new();
    let mut candidates = Vec::new();
    let mut node_count = cfg.node_limit - budget;
    for seed in &seeds {
        if covered.contains(seed) {
            continue;
        }
        let words = orbit(seed, &cfg.u)?;
        if node_count + words.len() as u64 > cfg.node_limit {
            complete = false;
            break;
        }
        node_count += words.len() as u64;
        for w in &words {
            covered.insert(w.clone());
        }
        let stabilizer_order = cfg.u.order() / words.len();
        match OrbitCandidate::from_words(words, stabilizer_order) {
            Ok(c) => candidates.push(c),
            Err(Error::MinDistance { .. }) | Err(Error::NotTransitive { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    candidates.sort_by(|a, b| {
        b.len().cmp(&a.len()).then_with(|| a.representative().cmp(b.representative()))
    });
    Ok(EnumerationOutcome { candidates, node_count, complete })
}

/// Enumerate all words of Sₙ fixed by every element of `stab`, by
/// backtracking over partial images with constraint propagation: a fixed
/// word must satisfy b(β₁(x)) = β₂(b(x)) for (β₁, β₂) pairs and
/// b(β₂(y)) = β₁(x) whenever b(x) = y for block-swapped elements, so each
/// committed image forces a cascade of further images.
fn enumerate_stabilized(
    n: usize,
    stab: &[IsoElement],
    budget: &mut u64,
) -> Result<(Vec<Permutation>, bool)> {
    let rules: Vec<(Vec<u16>, Vec<u16>, bool)> = stab
        .iter()
        .map(|s| {
            let (b1, b2, eps) = s.decompose();
            (b1.images().to_vec(), b2.images().to_vec(), eps)
        })
        .collect();

    struct State {
        img: Vec<u16>,
        pre: Vec<u16>,
    }
    const UNSET: u16 = u16::MAX;

    // Assign img[x] = y plus everything it forces; rollback is by
    // truncating `trail` back to its length before the call.
    fn assign(
        state: &mut State,
        trail: &mut Vec<usize>,
        rules: &[(Vec<u16>, Vec<u16>, bool)],
        x: usize,
        y: usize,
    ) -> bool {
        let mut queue = vec![(x, y)];
        while let Some((x, y)) = queue.pop() {
            if state.img[x] != UNSET {
                if state.img[x] as usize != y {
                    return false;
                }
                continue;
            }
            if state.pre[y] != UNSET {
                return false;
            }
            state.img[x] = y as u16;
            state.pre[y] = x as u16;
            trail.push(x);
            for (b1, b2, eps) in rules {
                if *eps {
                    queue.push((b2[y] as usize, b1[x] as usize));
                } else {
                    queue.push((b1[x] as usize, b2[y] as usize));
                }
            }
        }
        true
    }

    fn undo(state: &mut State, trail: &mut Vec<usize>, mark: usize) {
        while trail.len() > mark {
            let x = trail.pop().unwrap();
            let y = state.img[x] as usize;
            state.img[x] = UNSET;
            state.pre[y] = UNSET;
        }
    }

    fn search(
        state: &mut State,
        trail: &mut Vec<usize>,
        rules: &[(Vec<u16>, Vec<u16>, bool)],
        out: &mut Vec<Permutation>,
        budget: &mut u64,
    ) -> Result<bool> {
        let n = state.img.len();
        let Some(x) = state.img.iter().position(|&v| v == UNSET) else {
            out.push(Permutation::from_images(state.img.clone())?);
            return Ok(true);
        };
        for y in 0..n {
            if state.pre[y] != UNSET {
                continue;
            }
            if *budget == 0 {
                return Ok(false);
            }
            *budget -= 1;
            let mark = trail.len();
            if assign(state, trail, rules, x, y) && !search(state, trail, rules, out, budget)? {
                return Ok(false);
            }
            undo(state, trail, mark);
        }
        Ok(true)
    }

    let mut state = State { img: vec![UNSET; n], pre: vec![UNSET; n] };
    let mut trail = Vec::new();
    let mut out = Vec::new();
    let finished = search(&mut state, &mut trail, &rules, &mut out, budget)?;
    out.sort_unstable();
    Ok((out, finished))
}

/// Whether two candidates can participate in one union: every cross pair
/// at distance ≥ n−1 and the distance-n relation on the union still an
/// equivalence. Pairwise compatibility is necessary but not sufficient for
/// joining three or more orbits — the backtrack re-verifies every
/// extension (see `three_orbit_counterexample` in the tests).
pub fn compatible(a: &OrbitCandidate, b: &OrbitCandidate) -> Result<bool> {
    compatible_all(&[a, b])
}

/// The joint version of [`compatible`]: whether the union of all the
/// candidates' words passes the distance and transitivity requirements.
pub fn compatible_all(cands: &[&OrbitCandidate]) -> Result<bool> {
    if cands.is_empty() {
        return Err(Error::Empty("candidate list"));
    }
    let n = cands[0].words()[0].degree();
    for c in cands {
        if c.words()[0].degree() != n {
            return Err(Error::DegreeMismatch(c.words()[0].degree(), n));
        }
    }
    let mut words: Vec<Permutation> = cands.iter().flat_map(|c| c.words().iter().cloned()).collect();
    words.sort_unstable();
    // Duplicate words across candidates collapse to distance 0 and are
    // rejected by the minimum-distance check.
    match distance_classes(n, &words) {
        Ok(_) => Ok(true),
        Err(Error::MinDistance { .. }) | Err(Error::NotTransitive { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// A partial union during the backtrack: the distance-n classes of the
/// words chosen so far, as (candidate, word) index pairs. Invariant: any
/// two words in different classes are at distance exactly n−1.
#[derive(Clone)]
struct JoinState {
    classes: Vec<Vec<(usize, usize)>>,
    total: usize,
}

impl JoinState {
    fn empty() -> JoinState {
        JoinState { classes: Vec::new(), total: 0 }
    }

    fn all_classes_full(&self, n: usize) -> bool {
        !self.classes.is_empty() && self.classes.iter().all(|c| c.len() == n)
    }

    /// Extend by candidate `j`, checking all cross pairs: each must be at
    /// distance n−1 or n, and for every (existing class C, new class D)
    /// the distance-n pairs must be all of C×D or none (a mixed pair
    /// breaks transitivity). All-n blocks merge; the merge pattern must be
    /// a partial matching, because an existing class linking two new
    /// classes (or vice versa) would transitively force two classes known
    /// to contain an (n−1)-pair into one.
    fn try_extend(&self, j: usize, cands: &[OrbitCandidate]) -> Option<JoinState> {
        let cand = &cands[j];
        let n = cand.words()[0].degree();
        let mut partner_of_new: Vec<Option<usize>> = vec![None; cand.classes().len()];
        let mut partner_of_old: Vec<Option<usize>> = vec![None; self.classes.len()];
        for (di, d_class) in cand.classes().iter().enumerate() {
            for (ci, c_class) in self.classes.iter().enumerate() {
                let mut saw: Option<bool> = None; // Some(true) = all-n block so far
                for &(cc, cw) in c_class {
                    let u = &cands[cc].words()[cw];
                    for &dw in d_class {
                        let v = &cand.words()[dw];
                        let dist = u.hamming_distance(v).expect("same degree");
                        if dist < n - 1 {
                            return None;
                        }
                        let is_n = dist == n;
                        match saw {
                            None => saw = Some(is_n),
                            Some(prev) if prev != is_n => return None,
                            _ => {}
                        }
                    }
                }
                if saw == Some(true) {
                    if partner_of_new[di].is_some() || partner_of_old[ci].is_some() {
                        return None;
                    }
                    partner_of_new[di] = Some(ci);
                    partner_of_old[ci] = Some(di);
                }
            }
        }
        let mut next = self.clone();
        for (di, d_class) in cand.classes().iter().enumerate() {
            let members = d_class.iter().map(|&dw| (j, dw));
            match partner_of_new[di] {
                Some(ci) => next.classes[ci].extend(members),
                None => next.classes.push(members.collect()),
            }
        }
        next.total += cand.len();
        Some(next)
    }
}

/// Per-branch result, persisted in checkpoints. `chosen` holds indices
/// into the sorted candidate order; `total` is 0 when the branch found no
/// union with all classes of size n beating the greedy seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct BranchResult {
    branch: usize,
    chosen: Vec<usize>,
    total: usize,
    nodes: u64,
    complete: bool,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    fingerprint: String,
    branches: BTreeMap<usize, BranchResult>,
}

/// Outcome of [`backtrack_join`]. `chosen` indexes the caller's candidate
/// slice; `code`/`partition` are `None` when no union with full classes
/// exists among the candidates (then `m_found` is 0).
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub code: Option<PermutationCode>,
    pub partition: Option<SeparabilityPartition>,
    pub chosen: Vec<usize>,
    pub m_found: usize,
    pub node_count: u64,
    pub complete: bool,
}

/// JSON-facing report for a search run.
#[derive(Serialize)]
pub struct SearchReport {
    pub version: u32,
    pub n: usize,
    pub candidates: Vec<CandidateReport>,
    pub chosen: Vec<usize>,
    pub m_found: usize,
    pub words: Vec<String>,
    pub node_count: u64,
    pub complete: bool,
}

#[derive(Serialize)]
pub struct CandidateReport {
    pub representative: String,
    pub size: usize,
    pub stabilizer_order: usize,
    pub class_sizes: Vec<usize>,
}

impl SearchOutcome {
    pub fn report(&self, candidates: &[OrbitCandidate]) -> SearchReport {
        SearchReport {
            version: 1,
            n: candidates.first().map_or(0, |c| c.words()[0].degree()),
            candidates: candidates
                .iter()
                .map(|c| CandidateReport {
                    representative: format_cycles(c.representative()),
                    size: c.len(),
                    stabilizer_order: c.stabilizer_order(),
                    class_sizes: c.classes().iter().map(|cl| cl.len()).collect(),
                })
                .collect(),
            chosen: self.chosen.clone(),
            m_found: self.m_found,
            words: self
                .code
                .as_ref()
                .map(|c| c.words().iter().map(format_cycles).collect())
                .unwrap_or_default(),
            node_count: self.node_count,
            complete: self.complete,
        }
    }
}

struct Dfs<'a> {
    cands: &'a [OrbitCandidate],
    n: usize,
    suffix_total: &'a [usize],
    target_words: Option<usize>,
    limit: u64,
    nodes: u64,
    best_total: usize,
    best_chosen: Option<Vec<usize>>,
    chosen: Vec<usize>,
    truncated: bool,
    done: bool,
}

impl Dfs<'_> {
    fn record(&mut self, state: &JoinState) {
        if state.all_classes_full(self.n) && state.total > self.best_total {
            self.best_total = state.total;
            self.best_chosen = Some(self.chosen.clone());
            if let Some(t) = self.target_words {
                if state.total >= t {
                    self.done = true;
                }
            }
        }
    }

    fn go(&mut self, idx: usize, state: &JoinState) {
        for j in idx..self.cands.len() {
            // suffix_total is non-increasing in j, so the first index whose
            // full remainder cannot beat the incumbent ends the loop.
            if state.total + self.suffix_total[j] <= self.best_total {
                return;
            }
            if self.nodes >= self.limit {
                self.truncated = true;
                return;
            }
            self.nodes += 1;
            if let Some(next) = state.try_extend(j, self.cands) {
                self.chosen.push(j);
                self.record(&next);
                if !self.done {
                    self.go(j + 1, &next);
                }
                self.chosen.pop();
                if self.done || self.truncated {
                    return;
                }
            }
        }
    }
}

/// Join orbit candidates into the largest union whose distance-n classes
/// all have size exactly n — an (n, m)-separable array with m = total/n
/// classes — maximizing m.
///
/// Deterministic by construction: candidates are sorted (size descending,
/// then representative), a greedy pass seeds the incumbent, and the search
/// space is split into top-level branches ("first chosen candidate is i")
/// that never share discoveries, so outputs and node counts are identical
/// for any worker count. Each branch gets node_limit/#branches nodes; an
/// exhausted budget returns best-so-far flagged incomplete. Branch results
/// are checkpointed when a path is configured and reloaded under
/// `resume` (the checkpoint is validated against the search fingerprint).
pub fn backtrack_join(candidates: &[OrbitCandidate], cfg: &SearchConfig) -> Result<SearchOutcome> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate list"));
    }
    let n = cfg.u.n();
    for c in candidates {
        if c.words()[0].degree() != n {
            return Err(Error::DegreeMismatch(c.words()[0].degree(), n));
        }
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[b]
            .len()
            .cmp(&candidates[a].len())
            .then_with(|| candidates[a].representative().cmp(candidates[b].representative()))
    });
    let sorted: Vec<OrbitCandidate> = order.iter().map(|&i| candidates[i].clone()).collect();
    let k = sorted.len();
    let mut suffix_total = vec![0usize; k + 1];
    for j in (0..k).rev() {
        suffix_total[j] = suffix_total[j + 1] + sorted[j].len();
    }
    let target_words = cfg.target_m.map(|m| m * n);

    // Greedy seed: extend by each candidate in order when possible, and
    // remember the best prefix state whose classes are all full.
    let mut greedy_nodes = 0u64;
    let mut greedy_best: Option<(usize, Vec<usize>)> = None;
    {
        let mut state = JoinState::empty();
        let mut chosen = Vec::new();
        for j in 0..k {
            greedy_nodes += 1;
            if let Some(next) = state.try_extend(j, &sorted) {
                chosen.push(j);
                if next.all_classes_full(n)
                    && greedy_best.as_ref().map_or(true, |(t, _)| next.total > *t)
                {
                    greedy_best = Some((next.total, chosen.clone()));
                }
                state = next;
            }
        }
    }
    let seed_total = greedy_best.as_ref().map_or(0, |(t, _)| *t);
    if let (Some(t), Some((total, _))) = (target_words, &greedy_best) {
        if *total >= t {
            // The greedy seed already meets the target; skip branching.
            return finish(&sorted, &order, greedy_best, greedy_nodes, true, n);
        }
    }

    let fingerprint = search_fingerprint(&sorted, cfg, n);
    let mut loaded: BTreeMap<usize, BranchResult> = BTreeMap::new();
    if cfg.resume {
        if let Some(path) = &cfg.checkpoint_path {
            if path.exists() {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
                let cp: Checkpoint =
                    serde_json::from_str(&text).map_err(|e| Error::Checkpoint(e.to_string()))?;
                if cp.version != CHECKPOINT_VERSION {
                    return Err(Error::Checkpoint(format!(
                        "checkpoint version {} does not match {}",
                        cp.version, CHECKPOINT_VERSION
                    )));
                }
                if cp.fingerprint != fingerprint {
                    return Err(Error::Checkpoint(
                        "checkpoint was written for a different search".into(),
                    ));
                }
                loaded = cp.branches;
            }
        }
    }

    let branch_limit = (cfg.node_limit / k as u64).max(1);
    let next_branch = AtomicUsize::new(0);
    let results: Mutex<BTreeMap<usize, BranchResult>> = Mutex::new(loaded);
    let checkpoint_err: Mutex<Option<Error>> = Mutex::new(None);
    let workers = cfg.workers.max(1).min(k);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let b = next_branch.fetch_add(1, Ordering::SeqCst);
                if b >= k {
                    break;
                }
                if results.lock().unwrap().contains_key(&b) {
                    continue;
                }
                let result = run_branch(b, &sorted, n, &suffix_total, seed_total, branch_limit, target_words);
                let mut map = results.lock().unwrap();
                map.insert(b, result);
                if let Some(path) = &cfg.checkpoint_path {
                    let cp = Checkpoint {
                        version: CHECKPOINT_VERSION,
                        fingerprint: fingerprint.clone(),
                        branches: map.clone(),
                    };
                    if let Err(e) = write_checkpoint(path, &cp) {
                        checkpoint_err.lock().unwrap().get_or_insert(e);
                    }
                }
            });
        }
    });
    if let Some(e) = checkpoint_err.into_inner().unwrap() {
        return Err(e);
    }

    let results = results.into_inner().unwrap();
    let mut best = greedy_best;
    let mut node_count = greedy_nodes;
    let mut complete = true;
    for b in 0..k {
        let r = &results[&b];
        node_count += r.nodes;
        complete &= r.complete;
        if !r.chosen.is_empty() && best.as_ref().map_or(true, |(t, _)| r.total > *t) {
            best = Some((r.total, r.chosen.clone()));
        }
    }
    finish(&sorted, &order, best, node_count, complete, n)
}

fn run_branch(
    b: usize,
    sorted: &[OrbitCandidate],
    n: usize,
    suffix_total: &[usize],
    seed_total: usize,
    branch_limit: u64,
    target_words: Option<usize>,
) -> BranchResult {
    let mut dfs = Dfs {
        cands: sorted,
        n,
        suffix_total,
        target_words,
        limit: branch_limit,
        nodes: 1, // the branch-opening inclusion below
        best_total: seed_total,
        best_chosen: None,
        chosen: vec![b],
        truncated: false,
        done: false,
    };
    let state = JoinState::empty()
        .try_extend(b, sorted)
        .expect("a lone candidate always extends the empty union");
    dfs.record(&state);
    if !dfs.done {
        dfs.go(b + 1, &state);
    }
    BranchResult {
        branch: b,
        chosen: dfs.best_chosen.unwrap_or_default(),
        total: dfs.best_total,
        nodes: dfs.nodes,
        complete: !dfs.truncated,
    }
}

fn finish(
    sorted: &[OrbitCandidate],
    order: &[usize],
    best: Option<(usize, Vec<usize>)>,
    node_count: u64,
    complete: bool,
    n: usize,
) -> Result<SearchOutcome> {
    let Some((total, chosen_sorted)) = best else {
        return Ok(SearchOutcome {
            code: None,
            partition: None,
            chosen: Vec::new(),
            m_found: 0,
            node_count,
            complete,
        });
    };
    let words: Vec<Vec<Permutation>> =
        chosen_sorted.iter().map(|&j| sorted[j].words().to_vec()).collect();
    let code = PermutationCode::from_union(n, &words)?;
    assert_eq!(code.len(), total, "joined candidates never overlap");
    // The search's incremental checks imply these, but the returned claim
    // is always re-verified from scratch.
    let report = code.verify_pa(n - 1)?;
    if !report.ok {
        return Err(Error::MinDistance {
            found: report.min_distance,
            required: n - 1,
            i: 0,
            j: 0,
        });
    }
    let partition = separability_partition(&code)?;
    assert_eq!(partition.r(), n, "full classes have size n");
    let m_found = partition.m();
    let mut chosen: Vec<usize> = chosen_sorted.iter().map(|&j| order[j]).collect();
    chosen.sort_unstable();
    Ok(SearchOutcome {
        code: Some(code),
        partition: Some(partition),
        chosen,
        m_found,
        node_count,
        complete,
    })
}

fn search_fingerprint(sorted: &[OrbitCandidate], cfg: &SearchConfig, n: usize) -> String {
    let cands: Vec<String> = sorted
        .iter()
        .map(|c| format!("{}|{}|{}", format_cycles(c.representative()), c.len(), c.stabilizer_order()))
        .collect();
    format!(
        "v{CHECKPOINT_VERSION};n={n};k={};limit={};target={:?};cands={}",
        sorted.len(),
        cfg.node_limit,
        cfg.target_m,
        cands.join(";")
    )
}

fn write_checkpoint(path: &PathBuf, cp: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string_pretty(cp).map_err(|e| Error::Json(e.to_string()))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{regular_representation, FiniteGroup};
    use crate::iso::{delta, IsoElement};
    use crate::perm::Permutation;

    fn perm(images: &[u16]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    /// The affine word x ↦ ax + b over Z_p.
    fn affine_word(p: u16, a: u16, b: u16) -> Permutation {
        perm(&(0..p).map(|x| (a * x + b) % p).collect::<Vec<_>>())
    }

    /// U = Δ(R(Z_p)): conjugation by translations.
    fn translation_conjugation(p: usize) -> IsoGroup {
        let g = FiniteGroup::cyclic(p).unwrap();
        let gens = delta(&regular_representation(&g)).unwrap();
        IsoGroup::generate(gens, 10_000).unwrap()
    }

    fn trivial_u(n: usize) -> IsoGroup {
        IsoGroup::generate(vec![IsoElement::identity(n)], 10).unwrap()
    }

    #[test]
    fn candidate_from_words_orders_and_classifies() {
        let words: Vec<Permutation> = (0..5).map(|b| affine_word(5, 1, b)).collect();
        let cand = OrbitCandidate::from_words(words, 1).unwrap();
        assert_eq!(cand.len(), 5);
        assert_eq!(cand.representative(), &perm(&[0, 1, 2, 3, 4]));
        assert_eq!(cand.classes(), &[vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn candidate_rejects_close_words() {
        let words = vec![perm(&[0, 1, 2, 3]), perm(&[1, 0, 2, 3])];
        assert!(matches!(
            OrbitCandidate::from_words(words, 1),
            Err(Error::MinDistance { found: 2, .. })
        ));
    }

    #[test]
    fn candidate_from_representative_uses_the_orbit() {
        let u = translation_conjugation(5);
        // Conjugating x↦2x by all translations gives the five slope-2 words.
        let cand = OrbitCandidate::from_representative(&affine_word(5, 2, 0), &u).unwrap();
        assert_eq!(cand.len(), 5);
        assert_eq!(cand.stabilizer_order(), 1);
        assert_eq!(cand.len() * cand.stabilizer_order(), u.order());
        let expected: Vec<Permutation> = (0..5).map(|b| affine_word(5, 2, b)).collect();
        let mut expected = expected;
        expected.sort_unstable();
        assert_eq!(cand.words(), &expected[..]);
        // A fixed word gives a singleton candidate.
        let id = OrbitCandidate::from_representative(&perm(&[0, 1, 2, 3, 4]), &u).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(id.stabilizer_order(), 5);
        assert_eq!(id.classes(), &[vec![0]]);
    }

    #[test]
    fn enumerate_orbits_over_the_affine_universe() {
        let p = 7;
        let universe: Vec<Permutation> =
            (1..7).flat_map(|a| (0..7).map(move |b| affine_word(p, a, b))).collect();
        let cfg = SearchConfig::new(translation_conjugation(7));
        let out = enumerate_orbits(&cfg, Some(&universe)).unwrap();
        assert!(out.complete);
        // Five slope orbits of size 7 (slopes 2..6), then the seven fixed
        // translations as singletons.
        assert_eq!(out.candidates.len(), 12);
        let sizes: Vec<usize> = out.candidates.iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![7, 7, 7, 7, 7, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(out.node_count, 42);
        // Orbit computed once per orbit: representatives are canonical.
        for c in &out.candidates {
            assert_eq!(c.representative(), &c.words()[0]);
        }
    }

    #[test]
    fn enumerate_orbits_without_universe_needs_a_stabilizer() {
        let cfg = SearchConfig::new(trivial_u(4));
        assert!(matches!(enumerate_orbits(&cfg, None), Err(Error::SearchConfig(_))));
    }

    #[test]
    fn enumerate_orbits_rejects_stabilizer_outside_u() {
        let mut cfg = SearchConfig::new(trivial_u(4));
        let sigma = perm(&[1, 2, 3, 0]);
        cfg.required_stabilizer =
            Some(vec![IsoElement::recompose(&sigma, &sigma, false).unwrap()]);
        assert!(matches!(enumerate_orbits(&cfg, None), Err(Error::SearchConfig(_))));
    }

    #[test]
    fn stabilized_enumeration_finds_the_centralizer() {
        // Words commuting with a 4-cycle = its powers.
        let sigma = perm(&[1, 2, 3, 0]);
        let s = IsoElement::recompose(&sigma, &sigma, false).unwrap();
        let mut cfg = SearchConfig::new(IsoGroup::generate(vec![s.clone()], 100).unwrap());
        cfg.required_stabilizer = Some(vec![s]);
        let out = enumerate_orbits(&cfg, None).unwrap();
        assert!(out.complete);
        // All four centralizer words are fixed by the conjugation group, so
        // each is a singleton candidate.
        assert_eq!(out.candidates.len(), 4);
        let mut words: Vec<Permutation> =
            out.candidates.iter().map(|c| c.words()[0].clone()).collect();
        words.sort_unstable();
        let mut expected =
            vec![perm(&[0, 1, 2, 3]), sigma.clone(), sigma.compose(&sigma).unwrap(), sigma.inverse()];
        expected.sort_unstable();
        assert_eq!(words, expected);
    }

    #[test]
    fn stabilized_enumeration_handles_inversion_constraints() {
        // Words fixed by t_n are the self-inverse ones: 10 of them in S₄.
        let t = IsoElement::t_n(4);
        let mut cfg = SearchConfig::new(IsoGroup::generate(vec![t.clone()], 100).unwrap());
        cfg.required_stabilizer = Some(vec![t]);
        let out = enumerate_orbits(&cfg, None).unwrap();
        assert!(out.complete);
        assert_eq!(out.candidates.len(), 10);
        for c in &out.candidates {
            assert_eq!(c.words()[0], c.words()[0].inverse());
        }
    }

    #[test]
    fn enumeration_respects_the_node_budget() {
        let t = IsoElement::t_n(4);
        let mut cfg = SearchConfig::new(IsoGroup::generate(vec![t.clone()], 100).unwrap());
        cfg.required_stabilizer = Some(vec![t]);
        cfg.node_limit = 3;
        let out = enumerate_orbits(&cfg, None).unwrap();
        assert!(!out.complete);
        assert!(out.candidates.len() < 10);
    }

    #[test]
    fn three_orbit_counterexample() {
        // Pairwise compatible singletons that cannot be joined jointly:
        // d(w1,w2) = 4, d(w2,w3) = 4, but d(w1,w3) = 3, so the distance-n
        // relation on the triple is not transitive.
        let u = trivial_u(4);
        let w1 = OrbitCandidate::from_representative(&perm(&[0, 1, 2, 3]), &u).unwrap();
        let w2 = OrbitCandidate::from_representative(&perm(&[1, 2, 3, 0]), &u).unwrap();
        let w3 = OrbitCandidate::from_representative(&perm(&[3, 1, 0, 2]), &u).unwrap();
        assert!(compatible(&w1, &w2).unwrap());
        assert!(compatible(&w2, &w3).unwrap());
        assert!(compatible(&w1, &w3).unwrap());
        assert!(!compatible_all(&[&w1, &w2, &w3]).unwrap());
    }

    #[test]
    fn overlapping_candidates_are_incompatible() {
        let u = translation_conjugation(5);
        let a = OrbitCandidate::from_representative(&affine_word(5, 2, 0), &u).unwrap();
        let b = OrbitCandidate::from_representative(&affine_word(5, 2, 3), &u).unwrap();
        assert_eq!(a.words(), b.words());
        assert!(!compatible(&a, &b).unwrap());
    }

    #[test]
    fn join_single_regular_representation() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let cand = OrbitCandidate::from_words(regular_representation(&g), 1).unwrap();
        let cfg = SearchConfig::new(translation_conjugation(5));
        let out = backtrack_join(&[cand], &cfg).unwrap();
        assert_eq!(out.m_found, 1);
        assert_eq!(out.chosen, vec![0]);
        assert!(out.complete);
        let part = out.partition.unwrap();
        assert_eq!((part.r(), part.m()), (5, 1));
    }

    #[test]
    fn join_recovers_the_full_affine_code() {
        // The classical full slope set over Z7: six cosets, one per slope.
        let cands: Vec<OrbitCandidate> = (1..7)
            .map(|a| {
                let words: Vec<Permutation> = (0..7).map(|b| affine_word(7, a, b)).collect();
                OrbitCandidate::from_words(words, 1).unwrap()
            })
            .collect();
        let cfg = SearchConfig::new(translation_conjugation(7));
        let out = backtrack_join(&cands, &cfg).unwrap();
        assert_eq!(out.m_found, 6);
        assert_eq!(out.chosen, vec![0, 1, 2, 3, 4, 5]);
        assert!(out.complete);
        let code = out.code.unwrap();
        assert_eq!(code.len(), 42);
        assert_eq!(code.min_distance().unwrap(), 6);
    }

    #[test]
    fn join_from_enumerated_orbits_and_worker_determinism() {
        let universe: Vec<Permutation> =
            (1..7).flat_map(|a| (0..7).map(move |b| affine_word(7, a, b))).collect();
        let mut cfg = SearchConfig::new(translation_conjugation(7));
        let cands = enumerate_orbits(&cfg, Some(&universe)).unwrap().candidates;
        let single = backtrack_join(&cands, &cfg).unwrap();
        cfg.workers = 4;
        let multi = backtrack_join(&cands, &cfg).unwrap();
        assert_eq!(single.m_found, 6);
        assert_eq!(multi.m_found, single.m_found);
        assert_eq!(multi.chosen, single.chosen);
        assert_eq!(multi.node_count, single.node_count);
        assert_eq!(multi.complete, single.complete);
        assert_eq!(
            multi.code.as_ref().unwrap().words(),
            single.code.as_ref().unwrap().words()
        );
    }

    #[test]
    fn monotonicity_in_the_candidate_list() {
        let cands: Vec<OrbitCandidate> = (1..7)
            .map(|a| {
                let words: Vec<Permutation> = (0..7).map(|b| affine_word(7, a, b)).collect();
                OrbitCandidate::from_words(words, 1).unwrap()
            })
            .collect();
        let cfg = SearchConfig::new(translation_conjugation(7));
        let mut last = 0;
        for take in 1..=6 {
            let m = backtrack_join(&cands[..take], &cfg).unwrap().m_found;
            assert!(m >= last, "m dropped from {last} to {m} with {take} candidates");
            last = m;
        }
        assert_eq!(last, 6);
    }

    #[test]
    fn target_m_short_circuits() {
        let cands: Vec<OrbitCandidate> = (1..7)
            .map(|a| {
                let words: Vec<Permutation> = (0..7).map(|b| affine_word(7, a, b)).collect();
                OrbitCandidate::from_words(words, 1).unwrap()
            })
            .collect();
        let mut cfg = SearchConfig::new(translation_conjugation(7));
        cfg.target_m = Some(3);
        let out = backtrack_join(&cands, &cfg).unwrap();
        // The greedy seed alone reaches the target, so only the six greedy
        // extension attempts are spent.
        assert!(out.m_found >= 3);
        assert_eq!(out.node_count, 6);
        assert!(out.complete);
    }

    /// Four full slope cosets over Z5 plus a larger "poison" candidate
    /// that overlaps three of them. The greedy pass picks the poison first
    /// and never completes a class, so the branches must do real work:
    /// the optimum lives in the branch that skips the poison.
    fn poisoned_candidates() -> Vec<OrbitCandidate> {
        let mut cands: Vec<OrbitCandidate> = (1..5)
            .map(|a| {
                let words: Vec<Permutation> = (0..5).map(|b| affine_word(5, a, b)).collect();
                OrbitCandidate::from_words(words, 1).unwrap()
            })
            .collect();
        let mut poison: Vec<Permutation> =
            (1..4).map(|b| affine_word(5, 1, b)).collect();
        poison.extend((1..3).map(|b| affine_word(5, 2, b)));
        poison.push(affine_word(5, 3, 1));
        cands.push(OrbitCandidate::from_words(poison, 1).unwrap());
        cands
    }

    #[test]
    fn search_recovers_from_a_misleading_greedy_seed() {
        let cands = poisoned_candidates();
        let cfg = SearchConfig::new(translation_conjugation(5));
        let out = backtrack_join(&cands, &cfg).unwrap();
        assert!(out.complete);
        assert_eq!(out.m_found, 4);
        // The chosen indices refer to the caller's order: the four cosets.
        assert_eq!(out.chosen, vec![0, 1, 2, 3]);
        assert_eq!(out.code.unwrap().len(), 20);
    }

    #[test]
    fn node_limit_truncates_but_still_reports() {
        let cands = poisoned_candidates();
        let mut cfg = SearchConfig::new(translation_conjugation(5));
        cfg.node_limit = 5; // one node per branch
        let out = backtrack_join(&cands, &cfg).unwrap();
        assert!(!out.complete);
        // Best-so-far is still a verified array, just not the optimum.
        assert_eq!(out.m_found, 1);
        assert!(out.code.is_some());
    }

    #[test]
    fn checkpoint_round_trip_and_mismatch() {
        let cands: Vec<OrbitCandidate> = (1..7)
            .map(|a| {
                let words: Vec<Permutation> = (0..7).map(|b| affine_word(7, a, b)).collect();
                OrbitCandidate::from_words(words, 1).unwrap()
            })
            .collect();
        let dir = std::env::temp_dir().join(format!("molskit-ckpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("join.ckpt.json");
        let mut cfg = SearchConfig::new(translation_conjugation(7));
        cfg.checkpoint_path = Some(path.clone());
        let first = backtrack_join(&cands, &cfg).unwrap();
        assert!(path.exists());
        cfg.resume = true;
        let second = backtrack_join(&cands, &cfg).unwrap();
        assert_eq!(second.m_found, first.m_found);
        assert_eq!(second.chosen, first.chosen);
        assert_eq!(second.node_count, first.node_count);
        // A different search must refuse the checkpoint.
        let out = backtrack_join(&cands[..3], &cfg);
        assert!(matches!(out, Err(Error::Checkpoint(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn no_full_class_union_reports_m_zero() {
        // Three pairwise-compatible singletons can never fill a class of
        // size 4, so there is no valid array at all.
        let u = trivial_u(4);
        let cands = vec![
            OrbitCandidate::from_representative(&perm(&[0, 1, 2, 3]), &u).unwrap(),
            OrbitCandidate::from_representative(&perm(&[1, 2, 3, 0]), &u).unwrap(),
            OrbitCandidate::from_representative(&perm(&[3, 1, 0, 2]), &u).unwrap(),
        ];
        let cfg = SearchConfig::new(u);
        let out = backtrack_join(&cands, &cfg).unwrap();
        assert_eq!(out.m_found, 0);
        assert!(out.code.is_none());
        assert!(out.complete);
    }

    #[test]
    fn report_serializes() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let cand = OrbitCandidate::from_words(regular_representation(&g), 1).unwrap();
        let cfg = SearchConfig::new(translation_conjugation(5));
        let cands = vec![cand];
        let out = backtrack_join(&cands, &cfg).unwrap();
        let report = out.report(&cands);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["version"], 1);
        assert_eq!(json["n"], 5);
        assert_eq!(json["m_found"], 1);
        assert_eq!(json["words"].as_array().unwrap().len(), 5);
        assert_eq!(json["candidates"][0]["size"], 5);
    }
}
