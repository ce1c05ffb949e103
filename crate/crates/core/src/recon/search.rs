//! Block-subset selection.
//!
//! A subset is a solution when projecting its blocks reproduces the input
//! drawing unit for unit, visibility included. Every block's outline shows
//! up in its projection, so a solution must cover the input's units exactly
//! with block outlines: the search enumerates such covers by increasing
//! size (branching on the unit with the fewest generators) and runs the
//! full re-projection check only on complete covers.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CandidateBlock, Candidates, UnitStates};
use crate::geom::Aabb;
use crate::projector::project;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReconStatus {
    Verified,
    UnionFallback,
    NoMatch,
    Timeout,
}

impl ReconStatus {
    /// Whether the solution carries usable blocks.
    pub fn has_output(self) -> bool {
        matches!(self, ReconStatus::Verified | ReconStatus::UnionFallback)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub timeout: Duration,
    /// Pick uniformly among the minimum-size matches instead of the first.
    pub sample_seed: Option<u64>,
    /// Matches collected before sampling.
    pub max_samples: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { timeout: Duration::from_secs(300), sample_seed: None, max_samples: 64 }
    }
}

impl SearchConfig {
    pub fn with_timeout(timeout: Duration) -> Self {
        Self { timeout, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconSolution {
    pub status: ReconStatus,
    /// Indices into the candidate block list.
    pub chosen: Vec<usize>,
    pub blocks: Vec<CandidateBlock>,
    /// Complete covers that went through the re-projection check.
    pub checks: usize,
    pub elapsed: Duration,
}

impl ReconSolution {
    fn new(status: ReconStatus, c: &Candidates, chosen: Vec<usize>, checks: usize, start: Instant) -> Self {
        let blocks = chosen.iter().map(|&i| c.blocks[i].clone()).collect();
        Self { status, chosen, blocks, checks, elapsed: start.elapsed() }
    }

    /// Every box of every chosen block.
    pub fn boxes(&self) -> Vec<Aabb> {
        self.blocks.iter().flat_map(|b| b.boxes.iter().copied()).collect()
    }

    /// One prediction per block (its bounding box).
    pub fn block_hulls(&self) -> Vec<Aabb> {
        self.blocks.iter().map(|b| b.hull).collect()
    }
}

/// Every candidate block, unverified.
pub fn union_all(c: &Candidates) -> ReconSolution {
    ReconSolution::new(ReconStatus::UnionFallback, c, (0..c.blocks.len()).collect(), 0, Instant::now())
}

/// Merge blocks that overlap the same ground-truth plank (by largest
/// overlap volume) into that group's bounding box; blocks touching no plank
/// stay separate predictions.
pub fn group_blocks(sol: &ReconSolution, gt: &[Aabb]) -> Vec<Aabb> {
    let mut groups: Vec<Option<Aabb>> = vec![None; gt.len()];
    let mut singles = Vec::new();
    for b in &sol.blocks {
        let mut best: Option<(usize, f64)> = None;
        for (g, plank) in gt.iter().enumerate() {
            let v: f64 = b.boxes.iter().map(|x| x.intersection_volume(plank)).sum();
            if v > 0.0 && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((g, v));
            }
        }
        match best {
            Some((g, _)) => groups[g] = Some(groups[g].map_or(b.hull, |h| h.union_hull(&b.hull))),
            None => singles.push(b.hull),
        }
    }
    groups.into_iter().flatten().chain(singles).collect()
}

struct Dfs<'a> {
    units_of: &'a [Vec<u32>],
    gens: &'a [Vec<u32>],
    check: &'a dyn Fn(&[usize]) -> bool,
    cover: Vec<u16>,
    uncovered: usize,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
    stamp: Vec<u32>,
    round: u32,
    k: usize,
    deadline: Instant,
    timed_out: bool,
    /// A branch was cut by the size limit, so a larger limit may help.
    cut: bool,
    checked: HashSet<Vec<usize>>,
    matches: Vec<Vec<usize>>,
    want: usize,
}

impl Dfs<'_> {
    fn done(&self) -> bool {
        self.timed_out || self.matches.len() >= self.want
    }

    fn add(&mut self, b: usize) {
        self.chosen.push(b);
        for &u in &self.units_of[b] {
            if self.cover[u as usize] == 0 {
                self.uncovered -= 1;
            }
            self.cover[u as usize] += 1;
        }
    }

    fn remove(&mut self, b: usize) {
        let last = self.chosen.pop();
        debug_assert_eq!(last, Some(b));
        for &u in &self.units_of[b] {
            self.cover[u as usize] -= 1;
            if self.cover[u as usize] == 0 {
                self.uncovered += 1;
            }
        }
    }

    /// Uncovered units with pairwise disjoint available generators each
    /// need their own block.
    fn lower_bound(&mut self) -> usize {
        self.round += 1;
        let mut count = 0;
        for u in 0..self.gens.len() {
            if self.cover[u] != 0 {
                continue;
            }
            let free = self.gens[u].iter().all(|&b| self.excluded[b as usize] || self.stamp[b as usize] != self.round);
            if free {
                count += 1;
                for &b in &self.gens[u] {
                    self.stamp[b as usize] = self.round;
                }
            }
        }
        count
    }

    fn try_set(&mut self, mut set: Vec<usize>) {
        set.sort_unstable();
        if !self.checked.insert(set.clone()) {
            return;
        }
        if (self.check)(&set) {
            self.matches.push(set);
        }
    }

    fn leaf(&mut self) {
        self.try_set(self.chosen.clone());
        let room = self.k - self.chosen.len();
        let extras: Vec<usize> = (0..self.units_of.len())
            .filter(|&b| !self.excluded[b] && !self.chosen.contains(&b))
            .collect();
        if extras.len() > room {
            self.cut = true;
        }
        // Blocks adding no new units can still change visibility.
        let mut pick = Vec::new();
        self.extend(&extras, 0, room, &mut pick);
    }

    fn extend(&mut self, extras: &[usize], from: usize, room: usize, pick: &mut Vec<usize>) {
        if room == 0 {
            return;
        }
        for i in from..extras.len() {
            if self.done() || self.tick() {
                return;
            }
            pick.push(extras[i]);
            let mut set = self.chosen.clone();
            set.extend_from_slice(pick);
            self.try_set(set);
            self.extend(extras, i + 1, room - 1, pick);
            pick.pop();
        }
    }

    /// True once the deadline has passed.
    fn tick(&mut self) -> bool {
        if !self.timed_out && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn run(&mut self) {
        if self.done() || self.tick() {
            return;
        }
        if self.uncovered == 0 {
            self.leaf();
            return;
        }
        if self.chosen.len() >= self.k {
            self.cut = true;
            return;
        }
        let mut best: Option<(usize, usize)> = None;
        for u in 0..self.gens.len() {
            if self.cover[u] != 0 {
                continue;
            }
            let n = self.gens[u].iter().filter(|&&b| !self.excluded[b as usize]).count();
            if n == 0 {
                return;
            }
            if best.is_none_or(|(_, bn)| n < bn) {
                best = Some((u, n));
            }
        }
        if self.chosen.len() + self.lower_bound() > self.k {
            self.cut = true;
            return;
        }
        let (u, _) = best.expect("an uncovered unit exists");
        let branch: Vec<usize> =
            self.gens[u].iter().map(|&b| b as usize).filter(|&b| !self.excluded[b]).collect();
        let mut newly = Vec::new();
        for b in branch {
            self.add(b);
            self.run();
            self.remove(b);
            if self.done() {
                break;
            }
            self.excluded[b] = true;
            newly.push(b);
        }
        for b in newly {
            self.excluded[b] = false;
        }
    }
}

/// Smallest block subset whose projection equals the input drawing.
pub fn verify_search(c: &Candidates, cfg: &SearchConfig) -> ReconSolution {
    let start = Instant::now();
    let deadline = start.checked_add(cfg.timeout).unwrap_or_else(|| start + Duration::from_secs(86400 * 365));
    let states = &c.indexed.states;
    let frame = &c.indexed.frame;
    if states.stray > 0 {
        return ReconSolution::new(ReconStatus::NoMatch, c, Vec::new(), 0, start);
    }

    let mut compact = vec![u32::MAX; states.state.len()];
    let mut n_units = 0u32;
    for (id, &s) in states.state.iter().enumerate() {
        if s > 0 {
            compact[id] = n_units;
            n_units += 1;
        }
    }
    if n_units == 0 {
        return ReconSolution::new(ReconStatus::Verified, c, Vec::new(), 0, start);
    }

    // Candidates: blocks whose whole outline appears in the input, largest first.
    let mut order: Vec<usize> = (0..c.blocks.len()).collect();
    order.sort_by(|&a, &b| c.blocks[b].volume.total_cmp(&c.blocks[a].volume).then(a.cmp(&b)));
    let mut kept = Vec::new();
    let mut units_of: Vec<Vec<u32>> = Vec::new();
    let mut raw = Vec::new();
    for &b in &order {
        raw.clear();
        for &(lo, hi) in &c.blocks[b].index_boxes {
            states.box_units(lo, hi, &mut raw);
        }
        let mut units: Vec<u32> = raw.iter().map(|&id| compact[id]).collect();
        if units.contains(&u32::MAX) {
            continue;
        }
        units.sort_unstable();
        units.dedup();
        kept.push(b);
        units_of.push(units);
    }
    let mut gens: Vec<Vec<u32>> = vec![Vec::new(); n_units as usize];
    for (b, units) in units_of.iter().enumerate() {
        for &u in units {
            gens[u as usize].push(b as u32);
        }
    }
    if gens.iter().any(Vec::is_empty) {
        return ReconSolution::new(ReconStatus::NoMatch, c, Vec::new(), 0, start);
    }

    let check = |set: &[usize]| {
        let boxes: Vec<Aabb> = set.iter().flat_map(|&b| c.blocks[kept[b]].boxes.iter().copied()).collect();
        let s = UnitStates::from_drawing(frame, &project(&boxes));
        s.stray == 0 && s.state == states.state
    };
    let nb = kept.len();
    let mut dfs = Dfs {
        units_of: &units_of,
        gens: &gens,
        check: &check,
        cover: vec![0; n_units as usize],
        uncovered: n_units as usize,
        chosen: Vec::new(),
        excluded: vec![false; nb],
        stamp: vec![0; nb],
        round: 0,
        k: 0,
        deadline,
        timed_out: false,
        cut: false,
        checked: HashSet::new(),
        matches: Vec::new(),
        want: if cfg.sample_seed.is_some() { cfg.max_samples.max(1) } else { 1 },
    };
    let mut k = dfs.lower_bound().max(1);
    while k <= nb {
        dfs.k = k;
        dfs.cut = false;
        dfs.run();
        if dfs.timed_out || !dfs.matches.is_empty() || !dfs.cut {
            break;
        }
        k += 1;
    }
    let checks = dfs.checked.len();
    let to_blocks = |set: &Vec<usize>| -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&b| kept[b]).collect();
        v.sort_unstable();
        v
    };
    let pick = match cfg.sample_seed {
        Some(seed) if dfs.matches.len() > 1 => {
            let min = dfs.matches.iter().map(Vec::len).min().unwrap();
            let best: Vec<&Vec<usize>> = dfs.matches.iter().filter(|m| m.len() == min).collect();
            best.choose(&mut ChaCha8Rng::seed_from_u64(seed)).map(|m| (*m).clone())
        }
        _ => dfs.matches.first().cloned(),
    };
    match pick {
        Some(set) => ReconSolution::new(ReconStatus::Verified, c, to_blocks(&set), checks, start),
        None if dfs.timed_out => ReconSolution::new(ReconStatus::Timeout, c, Vec::new(), checks, start),
        None => ReconSolution::new(ReconStatus::NoMatch, c, Vec::new(), checks, start),
    }
}
