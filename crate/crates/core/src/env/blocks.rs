//! Blocks rearrangement: five labeled columns, 3-8 uniquely numbered blocks.
//!
//! The solver searches the configuration space directly. Small spaces (up to
//! six blocks) use breadth-first search; seven and eight blocks switch to
//! iterative-deepening A* with an admissible must-move heuristic, which finds
//! the same canonical plan (lexicographically first under the fixed
//! `(block_id, dest_col)` move order).

use super::action::ActionRecord;
use super::{ApplyOutcome, EnvError, ViolationKind, ViolationTag};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use thiserror::Error;

pub const NUM_COLUMNS: usize = 5;

/// Default block palette, matching the numbered colors used in the rendered
/// figures and scene-graph properties.
pub const BLOCK_COLORS: [&str; 8] =
    ["purple", "orange", "green", "pink", "light_pink", "red", "blue", "yellow"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlocksLayoutError {
    #[error("block count out of range: {0} (expected 3..=8)")]
    CountOutOfRange(usize),
    #[error("color map must cover block ids 0..{0}")]
    IncompleteColors(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlocksLayout {
    pub num_columns: usize,
    pub num_blocks: usize,
    pub colors: BTreeMap<u32, String>,
}

impl BlocksLayout {
    pub fn new(num_blocks: usize) -> Result<Self, BlocksLayoutError> {
        if !(3..=8).contains(&num_blocks) {
            return Err(BlocksLayoutError::CountOutOfRange(num_blocks));
        }
        let colors = (0..num_blocks as u32)
            .map(|id| (id, BLOCK_COLORS[id as usize].to_string()))
            .collect();
        Ok(BlocksLayout { num_columns: NUM_COLUMNS, num_blocks, colors })
    }

    pub fn with_colors(num_blocks: usize, colors: BTreeMap<u32, String>) -> Result<Self, BlocksLayoutError> {
        if !(3..=8).contains(&num_blocks) {
            return Err(BlocksLayoutError::CountOutOfRange(num_blocks));
        }
        if (0..num_blocks as u32).any(|id| !colors.contains_key(&id)) {
            return Err(BlocksLayoutError::IncompleteColors(num_blocks));
        }
        Ok(BlocksLayout { num_columns: NUM_COLUMNS, num_blocks, colors })
    }
}

/// Column stacks are ordered bottom to top; every block id appears exactly
/// once across the five stacks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlocksState {
    pub layout: BlocksLayout,
    pub columns: Vec<Vec<u32>>,
    pub violations: Vec<ViolationTag>,
}

impl BlocksState {
    pub fn new(layout: BlocksLayout, columns: Vec<Vec<u32>>) -> Self {
        debug_assert_eq!(columns.len(), NUM_COLUMNS);
        debug_assert_eq!(columns.iter().map(Vec::len).sum::<usize>(), layout.num_blocks);
        BlocksState { layout, columns, violations: Vec::new() }
    }

    pub fn column_of(&self, block_id: u32) -> Option<usize> {
        self.columns.iter().position(|col| col.contains(&block_id))
    }
}

pub(crate) fn legal_actions(state: &BlocksState) -> Vec<ActionRecord> {
    legal_moves(&state.columns)
        .into_iter()
        .map(|(b, from, to)| ActionRecord::block_move(b, from as i32, to as i32))
        .collect()
}

/// Movable tops with destinations, sorted by `(block_id, dest_col)`.
fn legal_moves(columns: &[Vec<u32>]) -> Vec<(u32, usize, usize)> {
    let mut tops: Vec<(u32, usize)> =
        columns.iter().enumerate().filter_map(|(c, col)| col.last().map(|&b| (b, c))).collect();
    tops.sort_unstable();
    let mut moves = Vec::with_capacity(tops.len() * (NUM_COLUMNS - 1));
    for (b, from) in tops {
        for to in 0..NUM_COLUMNS {
            if to != from {
                moves.push((b, from, to));
            }
        }
    }
    moves
}

pub(crate) fn apply(
    state: &BlocksState,
    block_id: u32,
    from_col: i32,
    to_col: i32,
    step: usize,
) -> ApplyOutcome {
    let fault = |kind: ViolationKind| {
        let mut next = state.clone();
        next.violations.push(ViolationTag { kind, step_index: step });
        ApplyOutcome::Fault { kind, state: super::EnvState::Blocks(next) }
    };
    if block_id >= state.layout.num_blocks as u32 {
        return fault(ViolationKind::UnknownObject);
    }
    if !(0..NUM_COLUMNS as i32).contains(&from_col) || !(0..NUM_COLUMNS as i32).contains(&to_col) {
        return fault(ViolationKind::InvalidColumn);
    }
    if from_col == to_col {
        return fault(ViolationKind::PreconditionMismatch);
    }
    let (from_col, to_col) = (from_col as usize, to_col as usize);
    if state.column_of(block_id) != Some(from_col) {
        return fault(ViolationKind::PreconditionMismatch);
    }
    if state.columns[from_col].last() != Some(&block_id) {
        return fault(ViolationKind::NontopBlock);
    }
    let mut next = state.clone();
    next.columns[from_col].pop();
    next.columns[to_col].push(block_id);
    ApplyOutcome::Ok(super::EnvState::Blocks(next))
}

/// Packs a configuration into a u64: each column's blocks as nibbles
/// (id + 1), columns separated by a zero nibble. At most 8 + 4 nibbles.
fn encode(columns: &[Vec<u32>]) -> u64 {
    let mut acc = 0u64;
    for (i, col) in columns.iter().enumerate() {
        for &b in col {
            acc = (acc << 4) | (b as u64 + 1);
        }
        if i + 1 < columns.len() {
            acc <<= 4;
        }
    }
    acc
}

fn apply_move(columns: &mut [Vec<u32>], m: (u32, usize, usize)) {
    let b = columns[m.1].pop().expect("move source must have a top");
    debug_assert_eq!(b, m.0);
    columns[m.2].push(m.0);
}

fn undo_move(columns: &mut [Vec<u32>], m: (u32, usize, usize)) {
    let b = columns[m.2].pop().expect("move dest must have a top");
    debug_assert_eq!(b, m.0);
    columns[m.1].push(m.0);
}

/// Total number of configurations of `n` distinct blocks over five columns
/// (rising factorial 5·6·…·(5+n-1)).
fn space_size(n: usize) -> u64 {
    (0..n as u64).map(|i| 5 + i).product()
}

const BFS_SPACE_LIMIT: u64 = 200_000;

/// Blocks never get stuck: with five columns every configuration is
/// reachable, so `solve` always succeeds for well-formed states.
pub(crate) fn solve(initial: &[Vec<u32>], goal: &[Vec<u32>]) -> Result<Vec<ActionRecord>, EnvError> {
    let n = initial.iter().map(Vec::len).sum::<usize>();
    let moves = if space_size(n) <= BFS_SPACE_LIMIT {
        bfs_plan(initial, goal)
    } else {
        ida_star_plan(initial, goal)
    }
    .ok_or(EnvError::Unsolvable)?;
    Ok(moves
        .into_iter()
        .map(|(b, from, to)| ActionRecord::block_move(b, from as i32, to as i32))
        .collect())
}

pub(crate) fn distance(initial: &[Vec<u32>], goal: &[Vec<u32>]) -> Option<usize> {
    if initial == goal {
        return Some(0);
    }
    let n = initial.iter().map(Vec::len).sum::<usize>();
    if space_size(n) <= BFS_SPACE_LIMIT {
        bfs_distance(initial, goal)
    } else {
        bidirectional_distance(initial, goal)
    }
}

fn bfs_plan(initial: &[Vec<u32>], goal: &[Vec<u32>]) -> Option<Vec<(u32, usize, usize)>> {
    let target = encode(goal);
    let start = encode(initial);
    if start == target {
        return Some(Vec::new());
    }
    let mut parent: HashMap<u64, (u64, (u32, usize, usize))> = HashMap::new();
    let mut queue = VecDeque::from([initial.to_vec()]);
    parent.insert(start, (start, (0, 0, 0)));
    while let Some(cur) = queue.pop_front() {
        let cur_key = encode(&cur);
        for m in legal_moves(&cur) {
            let mut next = cur.clone();
            apply_move(&mut next, m);
            let key = encode(&next);
            if parent.contains_key(&key) {
                continue;
            }
            parent.insert(key, (cur_key, m));
            if key == target {
                let mut plan = Vec::new();
                let mut at = key;
                while at != start {
                    let (prev, m) = parent[&at];
                    plan.push(m);
                    at = prev;
                }
                plan.reverse();
                return Some(plan);
            }
            queue.push_back(next);
        }
    }
    None
}

fn bfs_distance(initial: &[Vec<u32>], goal: &[Vec<u32>]) -> Option<usize> {
    bfs_plan(initial, goal).map(|p| p.len())
}

/// Full distance map from `origin` to every reachable configuration. The
/// move graph is undirected (every move is invertible), so a map built from
/// the goal gives distances to the goal.
pub fn distance_map_from(origin: &[Vec<u32>]) -> HashMap<u64, usize> {
    let mut dist: HashMap<u64, usize> = HashMap::new();
    dist.insert(encode(origin), 0);
    let mut queue = VecDeque::from([origin.to_vec()]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[&encode(&cur)];
        for m in legal_moves(&cur) {
            let mut next = cur.clone();
            apply_move(&mut next, m);
            let key = encode(&next);
            if !dist.contains_key(&key) {
                dist.insert(key, d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

fn bidirectional_distance(initial: &[Vec<u32>], goal: &[Vec<u32>]) -> Option<usize> {
    let mut fwd: HashMap<u64, usize> = HashMap::from([(encode(initial), 0)]);
    let mut bwd: HashMap<u64, usize> = HashMap::from([(encode(goal), 0)]);
    let mut fwd_frontier = vec![initial.to_vec()];
    let mut bwd_frontier = vec![goal.to_vec()];
    let (mut fwd_depth, mut bwd_depth) = (0usize, 0usize);
    let mut best: Option<usize> = None;
    loop {
        // Any undiscovered path is at least fwd_depth + bwd_depth + 1 long,
        // so the current best cannot be beaten once it drops to that bound.
        if let Some(b) = best {
            if b <= fwd_depth + bwd_depth + 1 {
                return Some(b);
            }
        }
        if fwd_frontier.is_empty() && bwd_frontier.is_empty() {
            return best;
        }
        let forward = !fwd_frontier.is_empty()
            && (bwd_frontier.is_empty() || fwd_frontier.len() <= bwd_frontier.len());
        let (frontier, seen, other) = if forward {
            (&mut fwd_frontier, &mut fwd, &bwd)
        } else {
            (&mut bwd_frontier, &mut bwd, &fwd)
        };
        let mut next_frontier = Vec::new();
        for cur in frontier.drain(..) {
            let d = seen[&encode(&cur)];
            for m in legal_moves(&cur) {
                let mut next = cur.clone();
                apply_move(&mut next, m);
                let key = encode(&next);
                if seen.contains_key(&key) {
                    continue;
                }
                seen.insert(key, d + 1);
                if let Some(&od) = other.get(&key) {
                    let total = d + 1 + od;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                next_frontier.push(next);
            }
        }
        if forward {
            fwd_frontier = next_frontier;
            fwd_depth += 1;
        } else {
            bwd_frontier = next_frontier;
            bwd_depth += 1;
        }
    }
}

/// Admissible lower bound: a block must move if it is not at its goal
/// position or if anything below it in its column must move.
fn must_move_count(columns: &[Vec<u32>], goal_pos: &HashMap<u32, (usize, usize)>) -> usize {
    let mut count = 0;
    for (c, col) in columns.iter().enumerate() {
        let mut below_wrong = false;
        for (level, &b) in col.iter().enumerate() {
            if below_wrong || goal_pos[&b] != (c, level) {
                below_wrong = true;
                count += 1;
            }
        }
    }
    count
}

fn goal_positions(goal: &[Vec<u32>]) -> HashMap<u32, (usize, usize)> {
    let mut pos = HashMap::new();
    for (c, col) in goal.iter().enumerate() {
        for (level, &b) in col.iter().enumerate() {
            pos.insert(b, (c, level));
        }
    }
    pos
}

fn ida_star_plan(initial: &[Vec<u32>], goal: &[Vec<u32>]) -> Option<Vec<(u32, usize, usize)>> {
    let goal_pos = goal_positions(goal);
    let target = encode(goal);
    let mut columns = initial.to_vec();
    let mut bound = must_move_count(&columns, &goal_pos);
    let mut path: Vec<(u32, usize, usize)> = Vec::new();
    loop {
        match dfs(&mut columns, target, &goal_pos, 0, bound, &mut path) {
            DfsResult::Found => return Some(path),
            DfsResult::Exceeded(next) => {
                if next == usize::MAX {
                    return None;
                }
                bound = next;
            }
        }
    }
}

enum DfsResult {
    Found,
    Exceeded(usize),
}

fn dfs(
    columns: &mut Vec<Vec<u32>>,
    target: u64,
    goal_pos: &HashMap<u32, (usize, usize)>,
    g: usize,
    bound: usize,
    path: &mut Vec<(u32, usize, usize)>,
) -> DfsResult {
    let h = must_move_count(columns, goal_pos);
    if g + h > bound {
        return DfsResult::Exceeded(g + h);
    }
    if encode(columns) == target {
        return DfsResult::Found;
    }
    let mut min_exceed = usize::MAX;
    for m in legal_moves(columns) {
        // An optimal plan never immediately undoes its previous move.
        if let Some(&(pb, pf, pt)) = path.last() {
            if pb == m.0 && pf == m.2 && pt == m.1 {
                continue;
            }
        }
        apply_move(columns, m);
        path.push(m);
        match dfs(columns, target, goal_pos, g + 1, bound, path) {
            DfsResult::Found => return DfsResult::Found,
            DfsResult::Exceeded(t) => min_exceed = min_exceed.min(t),
        }
        path.pop();
        undo_move(columns, m);
    }
    DfsResult::Exceeded(min_exceed)
}
