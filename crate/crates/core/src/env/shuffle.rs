//! Tile shuffle: reconstruct an image by swapping patches.
//!
//! The state is a permutation mapping each grid cell to the source tile it
//! currently displays. The minimal swap count between two arrangements is
//! `tile_count - cycle_count` of the relative permutation, and the canonical
//! plan fixes cells in row-major order.

use super::action::{ActionRecord, Cell};
use super::{ApplyOutcome, EnvError, ViolationKind, ViolationTag};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleState {
    pub tile_rows: usize,
    pub tile_cols: usize,
    /// `perm[cell] = source tile index shown at that cell` (row-major cells).
    pub perm: Vec<usize>,
    pub violations: Vec<ViolationTag>,
}

impl ShuffleState {
    pub fn new(tile_rows: usize, tile_cols: usize, perm: Vec<usize>) -> Self {
        debug_assert_eq!(perm.len(), tile_rows * tile_cols);
        debug_assert!(is_permutation(&perm));
        ShuffleState { tile_rows, tile_cols, perm, violations: Vec::new() }
    }

    pub fn identity(tile_rows: usize, tile_cols: usize) -> Self {
        Self::new(tile_rows, tile_cols, (0..tile_rows * tile_cols).collect())
    }

    pub fn tile_count(&self) -> usize {
        self.tile_rows * self.tile_cols
    }

    pub fn in_grid(&self, c: Cell) -> bool {
        c.0 >= 0 && c.1 >= 0 && (c.0 as usize) < self.tile_rows && (c.1 as usize) < self.tile_cols
    }

    pub fn cell_index(&self, c: Cell) -> usize {
        c.0 as usize * self.tile_cols + c.1 as usize
    }

    pub fn index_cell(&self, i: usize) -> Cell {
        ((i / self.tile_cols) as i32, (i % self.tile_cols) as i32)
    }
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&t| {
        if t < perm.len() && !seen[t] {
            seen[t] = true;
            true
        } else {
            false
        }
    })
}

/// Number of cycles of a permutation, counting fixed points.
pub fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
        }
    }
    cycles
}

/// All unordered position pairs, row-major, `a < b`. Self-swaps are excluded
/// here although `apply` accepts them as identities.
pub(crate) fn legal_actions(state: &ShuffleState) -> Vec<ActionRecord> {
    let n = state.tile_count();
    let mut actions = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            actions.push(ActionRecord::tile_swap(state.index_cell(a), state.index_cell(b)));
        }
    }
    actions
}

pub(crate) fn apply(state: &ShuffleState, a: Cell, b: Cell, step: usize) -> ApplyOutcome {
    if !state.in_grid(a) || !state.in_grid(b) {
        let mut next = state.clone();
        next.violations.push(ViolationTag { kind: ViolationKind::InvalidTile, step_index: step });
        return ApplyOutcome::Fault {
            kind: ViolationKind::InvalidTile,
            state: super::EnvState::Shuffle(next),
        };
    }
    let mut next = state.clone();
    let (ia, ib) = (state.cell_index(a), state.cell_index(b));
    next.perm.swap(ia, ib);
    ApplyOutcome::Ok(super::EnvState::Shuffle(next))
}

/// Canonical minimal swap sequence from one arrangement to another: walk the
/// cells row-major and put the wanted tile in place. Yields exactly
/// `tile_count - cycle_count(relative perm)` swaps.
pub(crate) fn solve(initial: &ShuffleState, goal: &ShuffleState) -> Result<Vec<ActionRecord>, EnvError> {
    if initial.tile_rows != goal.tile_rows || initial.tile_cols != goal.tile_cols {
        return Err(EnvError::LayoutMismatch);
    }
    let mut cur = initial.perm.clone();
    let mut plan = Vec::new();
    for p in 0..cur.len() {
        if cur[p] == goal.perm[p] {
            continue;
        }
        let q = (p + 1..cur.len())
            .find(|&q| cur[q] == goal.perm[p])
            .expect("both arrangements permute the same tiles");
        cur.swap(p, q);
        plan.push(ActionRecord::tile_swap(initial.index_cell(p), initial.index_cell(q)));
    }
    Ok(plan)
}

pub(crate) fn distance(initial: &ShuffleState, goal: &ShuffleState) -> Option<usize> {
    // Relative permutation sigma = goal_perm^-1 . perm; swaps = n - cycles.
    let mut inv_goal = vec![0usize; goal.perm.len()];
    for (cell, &tile) in goal.perm.iter().enumerate() {
        inv_goal[tile] = cell;
    }
    let relative: Vec<usize> = initial.perm.iter().map(|&t| inv_goal[t]).collect();
    Some(relative.len() - cycle_count(&relative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_has_six_swaps() {
        let s = ShuffleState::identity(2, 2);
        assert_eq!(legal_actions(&s).len(), 6);
    }

    #[test]
    fn self_swap_is_identity() {
        let s = ShuffleState::identity(2, 2);
        match apply(&s, (0, 0), (0, 0), 0) {
            ApplyOutcome::Ok(super::super::EnvState::Shuffle(next)) => assert_eq!(next, s),
            other => panic!("expected identity result, got {other:?}"),
        }
    }

    #[test]
    fn three_cycle_on_nine_tiles_needs_two_swaps() {
        // Tiles at cells 0,1,2 rotated; brute force over all swap sequences
        // of length <= 2 confirms no single swap restores the image.
        let mut perm: Vec<usize> = (0..9).collect();
        perm.swap(0, 1);
        perm.swap(1, 2);
        let state = ShuffleState::new(3, 3, perm.clone());
        let goal = ShuffleState::identity(3, 3);
        let plan = solve(&state, &goal).unwrap();
        assert_eq!(plan.len(), 2);
        assert_eq!(distance(&state, &goal), Some(2));
        let single_swap_fixes = (0..9).any(|a| {
            (a + 1..9).any(|b| {
                let mut p = perm.clone();
                p.swap(a, b);
                p.iter().enumerate().all(|(i, &t)| i == t)
            })
        });
        assert!(!single_swap_fixes);
    }

    #[test]
    fn solve_between_arbitrary_arrangements() {
        let a = ShuffleState::new(2, 2, vec![2, 0, 3, 1]);
        let b = ShuffleState::new(2, 2, vec![1, 3, 0, 2]);
        let plan = solve(&a, &b).unwrap();
        let mut cur = a.perm.clone();
        for action in &plan {
            if let super::super::action::ActionPayload::TileSwap { a: pa, b: pb } = action.payload {
                let (ia, ib) = (a.cell_index(pa), a.cell_index(pb));
                cur.swap(ia, ib);
            }
        }
        assert_eq!(cur, b.perm);
        assert_eq!(plan.len(), distance(&a, &b).unwrap());
    }
}
