//! The padlock solitaire engine.
//!
//! An [`Instance`] fixes the hidden state of one game: which keys are
//! retained and which box holds every other key. Key `k` opens box `k`.
//! [`play`] runs the game under an opening discipline and order policy and
//! returns the full trace; [`wins`] decides the outcome directly by
//! reachability; [`solvent`] checks the prefix-count criterion for a
//! master-key opening order.

use std::collections::BTreeSet;

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub type BoxId = usize;
pub type KeyId = usize;

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Partition of the boxes into rows. Boxes of one row never hold keys to
/// their own row in the row-structured schemes; the engine only uses rows
/// for per-row bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rows {
    part_of: Vec<usize>,
    sizes: Vec<usize>,
}

impl Rows {
    /// Rows of the given sizes covering boxes `0..n` in order.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidParameter("at least one row required".into()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter("row sizes must be positive".into()));
        }
        let mut part_of = Vec::with_capacity(sizes.iter().sum());
        for (i, &s) in sizes.iter().enumerate() {
            part_of.extend(std::iter::repeat(i).take(s));
        }
        Ok(Rows { part_of, sizes: sizes.to_vec() })
    }

    /// Arbitrary partition given explicitly as disjoint box sets covering `0..box_count`.
    pub fn from_parts(box_count: usize, parts: &[Vec<BoxId>]) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidParameter("rows must be nonempty".into()));
        }
        let mut part_of = vec![usize::MAX; box_count];
        for (i, part) in parts.iter().enumerate() {
            for &b in part {
                if b >= box_count {
                    return Err(Error::InvalidParameter(format!("box {b} out of range")));
                }
                if part_of[b] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("box {b} in two rows")));
                }
                part_of[b] = i;
            }
        }
        if part_of.iter().any(|&r| r == usize::MAX) {
            return Err(Error::InvalidParameter("rows must cover all boxes".into()));
        }
        Ok(Rows { part_of, sizes: parts.iter().map(Vec::len).collect() })
    }

    /// One row containing every box.
    pub fn single(box_count: usize) -> Self {
        Rows { part_of: vec![0; box_count], sizes: vec![box_count] }
    }

    pub fn part_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn row_of(&self, b: BoxId) -> usize {
        self.part_of[b]
    }

    pub fn box_count(&self) -> usize {
        self.part_of.len()
    }
}

/// One fully dealt game: `box_count` boxes, a nonempty retained key set, and
/// the box holding every non-retained key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    holder: Vec<Option<BoxId>>,
    rows: Option<Rows>,
}

impl Instance {
    pub fn new(box_count: usize, retained: &[KeyId], placement: &[(KeyId, BoxId)]) -> Result<Self> {
        if box_count == 0 {
            return Err(Error::InvalidInstance("need at least one box".into()));
        }
        if retained.is_empty() {
            return Err(Error::InvalidInstance("need at least one retained key".into()));
        }
        let mut holder: Vec<Option<BoxId>> = vec![None; box_count];
        let mut assigned = vec![false; box_count];
        for &k in retained {
            if k >= box_count {
                return Err(Error::InvalidInstance(format!("retained key {k} out of range")));
            }
            assigned[k] = true;
        }
        for &(k, b) in placement {
            if k >= box_count || b >= box_count {
                return Err(Error::InvalidInstance(format!("placement ({k} -> {b}) out of range")));
            }
            if assigned[k] {
                return Err(Error::InvalidInstance(format!("key {k} placed twice or retained")));
            }
            assigned[k] = true;
            holder[k] = Some(b);
        }
        if !assigned.iter().all(|&a| a) {
            return Err(Error::InvalidInstance("every key must be retained or placed".into()));
        }
        Ok(Instance { holder, rows: None })
    }

    pub fn with_rows(mut self, rows: Rows) -> Result<Self> {
        if rows.box_count() != self.box_count() {
            return Err(Error::InvalidInstance("rows do not cover the boxes".into()));
        }
        self.rows = Some(rows);
        Ok(self)
    }

    pub fn box_count(&self) -> usize {
        self.holder.len()
    }

    pub fn is_retained(&self, k: KeyId) -> bool {
        self.holder[k].is_none()
    }

    pub fn retained(&self) -> Vec<KeyId> {
        (0..self.box_count()).filter(|&k| self.is_retained(k)).collect()
    }

    /// Box holding key `k`, or `None` if the key is retained.
    pub fn holder_of(&self, k: KeyId) -> Option<BoxId> {
        self.holder[k]
    }

    pub fn placement(&self) -> Vec<(KeyId, BoxId)> {
        self.holder
            .iter()
            .enumerate()
            .filter_map(|(k, b)| b.map(|b| (k, b)))
            .collect()
    }

    /// Keys inside each box, indexed by box.
    pub fn contents(&self) -> Vec<Vec<KeyId>> {
        let mut contents = vec![Vec::new(); self.box_count()];
        for (k, b) in self.holder.iter().enumerate() {
            if let Some(b) = b {
                contents[*b].push(k);
            }
        }
        contents
    }

    pub fn rows(&self) -> Option<&Rows> {
        self.rows.as_ref()
    }

    /// The row partition to use for bookkeeping: the attached one, or a
    /// single row covering everything.
    pub fn effective_rows(&self) -> Rows {
        self.rows.clone().unwrap_or_else(|| Rows::single(self.box_count()))
    }
}

/// True iff every box can eventually be opened, starting from the retained
/// keys. Computed by reachability; independent of any opening order.
pub fn wins(instance: &Instance) -> bool {
    let n = instance.box_count();
    let contents = instance.contents();
    let mut open = vec![false; n];
    let mut stack: Vec<KeyId> = instance.retained();
    let mut opened = 0usize;
    while let Some(k) = stack.pop() {
        if open[k] {
            continue;
        }
        open[k] = true;
        opened += 1;
        stack.extend_from_slice(&contents[k]);
    }
    opened == n
}

/// With a single retained key, decides whether the placement graph (edge
/// `i -> j` when key `j` lies in box `i`) is a spanning tree rooted at the
/// retained box and directed away from it. Walks parent pointers, so it is
/// an independent route from the forward reachability in [`wins`].
pub fn is_rooted_tree(instance: &Instance) -> Result<bool> {
    let retained = instance.retained();
    if retained.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "rooted-tree check needs exactly one retained key, got {}",
            retained.len()
        )));
    }
    let root = retained[0];
    let n = instance.box_count();
    // state: 0 unvisited, 1 on current path, 2 known good
    let mut state = vec![0u8; n];
    state[root] = 2;
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        loop {
            match state[v] {
                2 => break,
                1 => return Ok(false), // cycle
                _ => {
                    state[v] = 1;
                    path.push(v);
                    v = instance.holder_of(v).expect("non-root keys are placed");
                }
            }
        }
        for p in path {
            state[p] = 2;
        }
    }
    Ok(true)
}

/// Opening discipline: one box per step, or all openable boxes at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlayMode {
    Sequential,
    Rounds,
}

/// How a sequential play picks among the openable boxes.
#[derive(Clone, Debug)]
pub enum OrderPolicy {
    /// Open the openable box with the smallest id. Canonical, deterministic.
    LowestKeyFirst,
    /// Follow the given box order; each named box must be openable at its turn.
    GivenSequence(Vec<BoxId>),
    /// Pick uniformly among openable boxes with a seeded generator.
    RngChoice(u64),
}

/// Live bookkeeping of one game: which boxes are open, the keys in hand
/// whose boxes are still locked, and per-row hidden/locked counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    opened: Vec<bool>,
    held: BTreeSet<KeyId>,
    hidden: Vec<usize>,
    locked: Vec<usize>,
    rows: Rows,
}

impl GameState {
    pub fn start(instance: &Instance) -> Self {
        let rows = instance.effective_rows();
        let k = rows.part_count();
        let mut hidden = vec![0; k];
        let mut locked = vec![0; k];
        for b in 0..instance.box_count() {
            locked[rows.row_of(b)] += 1;
        }
        let mut held = BTreeSet::new();
        for key in 0..instance.box_count() {
            match instance.holder_of(key) {
                None => {
                    held.insert(key);
                }
                Some(_) => hidden[rows.row_of(key)] += 1,
            }
        }
        GameState { opened: vec![false; instance.box_count()], held, hidden, locked, rows }
    }

    /// Hidden keys per row (keys not yet seen, counted by the row of the box
    /// they open).
    pub fn hidden_counts(&self) -> &[usize] {
        &self.hidden
    }

    /// Locked boxes per row, counting boxes whose key is already in hand.
    pub fn locked_counts(&self) -> &[usize] {
        &self.locked
    }

    pub fn held(&self) -> &BTreeSet<KeyId> {
        &self.held
    }

    pub fn is_opened(&self, b: BoxId) -> bool {
        self.opened[b]
    }

    pub fn opened_boxes(&self) -> Vec<BoxId> {
        (0..self.opened.len()).filter(|&b| self.opened[b]).collect()
    }

    pub fn rows(&self) -> &Rows {
        &self.rows
    }

    pub fn hidden_total(&self) -> usize {
        self.hidden.iter().sum()
    }

    pub fn locked_total(&self) -> usize {
        self.locked.iter().sum()
    }

    /// Boxes that could be opened right now.
    pub fn openable(&self) -> Vec<BoxId> {
        self.held.iter().copied().filter(|&k| !self.opened[k]).collect()
    }

    fn open_box(&mut self, contents: &[Vec<KeyId>], b: BoxId) -> Vec<KeyId> {
        debug_assert!(!self.opened[b] && self.held.contains(&b));
        self.opened[b] = true;
        self.held.remove(&b);
        self.locked[self.rows.row_of(b)] -= 1;
        let found = contents[b].clone();
        for &k in &found {
            debug_assert!(!self.opened[k], "a found key always opens a still-locked box");
            self.hidden[self.rows.row_of(k)] -= 1;
            self.held.insert(k);
        }
        found
    }
}

/// The exact per-row ratios of a state: `hidden[i] / (L - L_i)` (or
/// `hidden / L` with a single row) and `held_i / L_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateRatios {
    pub hidden: Vec<BigRational>,
    pub held: Vec<BigRational>,
}

/// Ratios of a live state. Errors with [`Error::DegenerateState`] if any
/// queried denominator set is fully open; callers stop the game before that.
pub fn ratios(state: &GameState) -> Result<StateRatios> {
    let k = state.rows.part_count();
    let total: usize = state.locked_total();
    let mut hidden = Vec::with_capacity(k);
    let mut held = Vec::with_capacity(k);
    let mut held_per_row = vec![0usize; k];
    for &key in state.held() {
        held_per_row[state.rows.row_of(key)] += 1;
    }
    for i in 0..k {
        let hidden_den = if k == 1 { total } else { total - state.locked[i] };
        if hidden_den == 0 {
            return Err(Error::DegenerateState(format!(
                "all boxes of the denominator set for row {i} are open"
            )));
        }
        if state.locked[i] == 0 {
            return Err(Error::DegenerateState(format!("all boxes of row {i} are open")));
        }
        hidden.push(ratio(state.hidden[i], hidden_den));
        held.push(ratio(held_per_row[i], state.locked[i]));
    }
    Ok(StateRatios { hidden, held })
}

/// One step of a trace: the boxes opened, the keys found inside, and the
/// state snapshot after the step.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub opened: Vec<BoxId>,
    pub found: Vec<KeyId>,
    pub state: GameState,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub won: bool,
}

impl Trace {
    pub fn opened_order(&self) -> Vec<BoxId> {
        self.steps.iter().flat_map(|s| s.opened.iter().copied()).collect()
    }
}

/// Play one game to the end, opening until no held key fits a locked box.
/// The `won` flag equals [`wins`] for every mode and policy.
pub fn play(instance: &Instance, mode: PlayMode, policy: &OrderPolicy) -> Result<Trace> {
    let contents = instance.contents();
    let mut state = GameState::start(instance);
    let mut steps = Vec::new();
    let mut given = match policy {
        OrderPolicy::GivenSequence(seq) => Some(seq.iter().copied()),
        _ => None,
    };
    let mut rng = match policy {
        OrderPolicy::RngChoice(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    loop {
        let openable = state.openable();
        if openable.is_empty() {
            break;
        }
        let batch = match mode {
            PlayMode::Rounds => openable,
            PlayMode::Sequential => {
                let choice = match policy {
                    OrderPolicy::LowestKeyFirst => openable[0],
                    OrderPolicy::GivenSequence(_) => {
                        let next = given.as_mut().unwrap().next().ok_or_else(|| {
                            Error::OrderViolation("sequence exhausted while boxes were openable".into())
                        })?;
                        if !openable.contains(&next) {
                            return Err(Error::OrderViolation(format!(
                                "box {next} is not openable at its turn"
                            )));
                        }
                        next
                    }
                    OrderPolicy::RngChoice(_) => {
                        let r = rng.as_mut().unwrap();
                        openable[r.gen_range(0..openable.len())]
                    }
                };
                vec![choice]
            }
        };
        let mut found = Vec::new();
        for &b in &batch {
            found.extend(state.open_box(&contents, b));
        }
        steps.push(TraceStep { opened: batch, found, state: state.clone() });
    }
    Ok(Trace { steps, won: state.locked_total() == 0 })
}

/// Solvency of a master-key opening order: with `r` retained keys counted as
/// held before the first box, every prefix of `k` opened boxes must have
/// yielded enough keys to keep going (`found(k) + r >= k + 1` for all
/// `k < n`). For any order that a real play could realize, this equals
/// [`wins`].
pub fn solvent(instance: &Instance, order: &[BoxId]) -> Result<bool> {
    let n = instance.box_count();
    if order.len() != n {
        return Err(Error::OrderViolation("order must cover every box".into()));
    }
    let mut seen = vec![false; n];
    for &b in order {
        if b >= n || seen[b] {
            return Err(Error::OrderViolation("order must be a permutation of the boxes".into()));
        }
        seen[b] = true;
    }
    let contents = instance.contents();
    let r = instance.retained().len();
    let mut found = 0usize;
    for k in 1..n {
        found += contents[order[k - 1]].len();
        if found + r < k + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(n: usize, retained: &[KeyId], placement: &[(KeyId, BoxId)]) -> Instance {
        Instance::new(n, retained, placement).unwrap()
    }

    #[test]
    fn wins_by_reachability() {
        assert!(wins(&instance(3, &[0], &[(1, 0), (2, 1)])));
        assert!(!wins(&instance(3, &[0], &[(1, 2), (2, 1)])));
        assert!(wins(&instance(1, &[0], &[])));
    }

    #[test]
    fn rooted_tree_matches_wins() {
        assert!(is_rooted_tree(&instance(3, &[0], &[(1, 0), (2, 0)])).unwrap());
        assert!(!is_rooted_tree(&instance(3, &[0], &[(1, 1), (2, 0)])).unwrap());
        // all 64 placements for n=4: exactly 16 rooted trees
        let n = 4;
        let mut trees = 0;
        for idx in 0..64 {
            let placement: Vec<_> = (1..n).map(|k| (k, (idx / 4usize.pow(k as u32 - 1)) % 4)).collect();
            let inst = instance(n, &[0], &placement);
            let t = is_rooted_tree(&inst).unwrap();
            assert_eq!(t, wins(&inst));
            trees += t as usize;
        }
        assert_eq!(trees, 16);
    }

    #[test]
    fn rooted_tree_rejects_multiple_roots() {
        let inst = instance(3, &[0, 1], &[(2, 0)]);
        assert!(is_rooted_tree(&inst).is_err());
    }

    #[test]
    fn play_opens_in_canonical_order() {
        let inst = instance(3, &[0], &[(1, 0), (2, 1)]);
        let trace = play(&inst, PlayMode::Sequential, &OrderPolicy::LowestKeyFirst).unwrap();
        assert_eq!(trace.opened_order(), vec![0, 1, 2]);
        assert!(trace.won);
    }

    #[test]
    fn play_stops_when_stuck() {
        let inst = instance(3, &[0], &[(1, 2), (2, 1)]);
        for policy in [OrderPolicy::LowestKeyFirst, OrderPolicy::RngChoice(7)] {
            let trace = play(&inst, PlayMode::Sequential, &policy).unwrap();
            assert_eq!(trace.opened_order(), vec![0]);
            assert!(!trace.won);
        }
    }

    #[test]
    fn play_rejects_unopenable_sequence() {
        let inst = instance(3, &[0], &[(1, 0), (2, 1)]);
        let err = play(&inst, PlayMode::Sequential, &OrderPolicy::GivenSequence(vec![0, 2, 1]));
        assert!(matches!(err, Err(Error::OrderViolation(_))));
        let ok = play(&inst, PlayMode::Sequential, &OrderPolicy::GivenSequence(vec![0, 1, 2])).unwrap();
        assert!(ok.won);
    }

    #[test]
    fn rounds_mode_opens_batches() {
        let inst = instance(4, &[0], &[(1, 0), (2, 0), (3, 1)]);
        let trace = play(&inst, PlayMode::Rounds, &OrderPolicy::LowestKeyFirst).unwrap();
        assert_eq!(trace.steps[0].opened, vec![0]);
        assert_eq!(trace.steps[1].opened, vec![1, 2]);
        assert!(trace.won);
    }

    #[test]
    fn solvency_examples() {
        let inst = instance(3, &[0], &[(1, 0), (2, 1)]);
        assert!(solvent(&inst, &[0, 1, 2]).unwrap());
        let inst = instance(3, &[0], &[(1, 2), (2, 1)]);
        assert!(!solvent(&inst, &[0, 1, 2]).unwrap());
        assert!(solvent(&inst, &[0, 1, 1]).is_err());
        assert!(solvent(&inst, &[0, 1]).is_err());
    }

    #[test]
    fn start_ratios_single_row() {
        let inst = instance(4, &[0], &[(1, 0), (2, 1), (3, 2)]);
        let state = GameState::start(&inst);
        let r = ratios(&state).unwrap();
        assert_eq!(r.held[0], ratio(1, 4));
        assert_eq!(r.hidden[0], ratio(3, 4));
    }

    #[test]
    fn start_ratios_bipartite() {
        // rows of sizes (m, n) = (2, 3); key 0 retained
        let rows = Rows::contiguous(&[2, 3]).unwrap();
        let inst = instance(5, &[0], &[(1, 2), (2, 0), (3, 1), (4, 0)])
            .with_rows(rows)
            .unwrap();
        let state = GameState::start(&inst);
        let r = ratios(&state).unwrap();
        // X_1 = (m-1)/n, X_2 = n/m
        assert_eq!(r.hidden[0], ratio(1, 3));
        assert_eq!(r.hidden[1], ratio(3, 2));
    }

    #[test]
    fn won_state_has_zero_hidden_ratio() {
        let inst = instance(3, &[0], &[(1, 0), (2, 1)]);
        let trace = play(&inst, PlayMode::Sequential, &OrderPolicy::LowestKeyFirst).unwrap();
        // after the second step the last key is found but box 2 is still locked
        let state = &trace.steps[1].state;
        assert_eq!(state.hidden_total(), 0);
        let r = ratios(state).unwrap();
        assert_eq!(r.hidden[0], ratio(0, 1));
        // the fully opened final state is degenerate
        assert!(matches!(ratios(&trace.steps[2].state), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn order_invariance_small() {
        // every placement for n=4, every policy and mode: identical outcome
        for idx in 0..64usize {
            let placement: Vec<_> = (1..4).map(|k| (k, (idx / 4usize.pow(k as u32 - 1)) % 4)).collect();
            let inst = instance(4, &[0], &placement);
            let expected = wins(&inst);
            for mode in [PlayMode::Sequential, PlayMode::Rounds] {
                for policy in [OrderPolicy::LowestKeyFirst, OrderPolicy::RngChoice(1), OrderPolicy::RngChoice(99)] {
                    assert_eq!(play(&inst, mode, &policy).unwrap().won, expected);
                }
            }
        }
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(0, &[], &[]).is_err());
        assert!(Instance::new(2, &[], &[(1, 0)]).is_err());
        assert!(Instance::new(2, &[0], &[]).is_err()); // key 1 unaccounted
        assert!(Instance::new(2, &[0], &[(1, 0), (1, 1)]).is_err());
        assert!(Instance::new(2, &[0, 1], &[]).is_ok());
    }
}
